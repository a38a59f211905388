//! Adaptive-threshold shadow detection on a synthetic scene: raw mask,
//! cleaned mask, and the component measurements the tracker relies on.
//!
//! Writes the frame and both masks as PGM files for visual inspection.
//!
//! ```bash
//! cargo run --example shadow_masks [OUTPUT_DIR]
//! ```

use shadowtrack::imaging::{connected_components, save_frame, ImageFormat};
use shadowtrack::shadow::{clean_mask, detect_shadows, ShadowDetectorConfig};
use shadowtrack::synth::{Background, Occluder, ScenarioSpec, Shape, Waypoint};

fn main() {
    // A textured scene with a soft elliptical shadow and a sprinkle of noise
    // for the cleanup stage to remove.
    let spec = ScenarioSpec {
        width: 320,
        height: 200,
        frames: 2,
        background: Background::Noise {
            level: 170.0,
            amplitude: 35.0,
        },
        target: Occluder {
            shape: Shape::Ellipse { rx: 16.0, ry: 10.0 },
            attenuation: 0.35,
            blur_sigma: 1.5,
            path: vec![Waypoint { x: 160.0, y: 100.0 }],
        },
        distractors: vec![],
        seed: 21,
    };
    let frame = shadowtrack::synth::render_frame(&spec, 0).expect("scene renders");

    let cfg = ShadowDetectorConfig::default();
    let raw = detect_shadows(&frame, &cfg);
    let cleaned = clean_mask(&raw);

    println!(
        "window {}x{}, threshold factor {}",
        cfg.window, cfg.window, cfg.threshold_factor
    );
    println!(
        "raw mask: {} shadow pixels; cleaned: {} (noise removed: {})",
        raw.count_set(),
        cleaned.count_set(),
        raw.count_set().saturating_sub(cleaned.count_set()),
    );

    let components = connected_components(&cleaned);
    println!("{} components after cleanup:", components.len());
    let mut by_size: Vec<_> = components.iter().collect();
    by_size.sort_by_key(|c| std::cmp::Reverse(c.pixel_count));
    for c in by_size.iter().take(5) {
        println!(
            "  {:>5} px at ({:.1}, {:.1})",
            c.pixel_count, c.centroid.0, c.centroid.1
        );
    }

    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("shadow_masks")
            .display()
            .to_string()
    });
    std::fs::create_dir_all(&out).expect("output dir");
    for (name, img) in [
        ("frame.pgm", frame.clone()),
        ("mask_raw.pgm", raw.to_frame()),
        ("mask_clean.pgm", cleaned.to_frame()),
    ] {
        let path = std::path::Path::new(&out).join(name);
        save_frame(&img, &path, ImageFormat::Pgm).expect("mask writes");
        println!("wrote {}", path.display());
    }
}
