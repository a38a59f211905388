//! Writes a complete synthetic dataset to disk in the on-disk layout the CLI
//! consumes: numbered frames, gt.csv, and the resolved spec.json.
//!
//! ```bash
//! cargo run --example generate_dataset [OUTPUT_DIR] [PRESET]
//! ```

use shadowtrack::eval::write_gt_csv;
use shadowtrack::imaging::{frame_filename, save_frame, ImageFormat};
use shadowtrack::synth::{self, Preset};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("shadow_dataset")
            .display()
            .to_string()
    });
    let preset: Preset = std::env::args()
        .nth(2)
        .unwrap_or_else(|| "moving_distractor".into())
        .parse()
        .expect("valid preset name");

    let spec = synth::preset_sized(preset, 640, 360, 80).expect("preset is valid");
    let out = std::path::PathBuf::from(out);
    std::fs::create_dir_all(&out).expect("output dir");

    for t in 0..spec.frames {
        let frame = synth::render_frame(&spec, t).expect("frame renders");
        save_frame(
            &frame,
            out.join(frame_filename(t, ImageFormat::Png)),
            ImageFormat::Png,
        )
        .expect("frame writes");
    }
    let gt = synth::ground_truth(&spec).expect("ground truth");
    write_gt_csv(out.join("gt.csv"), &gt).expect("gt writes");
    std::fs::write(
        out.join("spec.json"),
        serde_json::to_string_pretty(&spec).expect("spec serializes"),
    )
    .expect("spec writes");

    println!(
        "wrote {} frames of '{preset}' plus gt.csv and spec.json to {}",
        spec.frames,
        out.display()
    );
    println!("track it with:");
    let b = gt.boxes[0];
    println!(
        "  shadowtrack track --in {} --out {}/run --init {},{},{},{}",
        out.display(),
        out.display(),
        b.cx,
        b.cy,
        b.w,
        b.h
    );
}
