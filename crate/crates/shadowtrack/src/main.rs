fn main() {
    std::process::exit(shadowtrack::cli::run(std::env::args_os()));
}
