//! Correlation-filter mechanics in isolation: train a filter on a target,
//! then correlate patches cut at increasing offsets and watch the response
//! peak report the displacement back.
//!
//! ```bash
//! cargo run --example correlation_peak
//! ```

use shadowtrack::corr::{CorrelationFilter, FilterConfig};
use shadowtrack::imaging::{extract_patch, BoundingBox};
use shadowtrack::synth::{self, Background, Occluder, ScenarioSpec, Shape, Waypoint};

fn main() {
    let spec = ScenarioSpec {
        width: 300,
        height: 200,
        frames: 2,
        background: Background::Flat { level: 200.0 },
        target: Occluder {
            shape: Shape::Ellipse { rx: 12.0, ry: 8.0 },
            attenuation: 0.35,
            blur_sigma: 1.5,
            path: vec![Waypoint { x: 150.0, y: 100.0 }],
        },
        distractors: vec![],
        seed: 4,
    };
    let frame = synth::render_frame(&spec, 0).expect("scene renders");

    let target = BoundingBox::new(150.0, 100.0, 24.0, 16.0).expect("valid box");
    let cfg = FilterConfig::default();
    let filter = CorrelationFilter::init(&frame, &target, 2.0, &cfg).expect("filter trains");
    println!(
        "trained a {}x{} filter (sigma {}, {} augmentations, eps {})",
        filter.width(),
        filter.height(),
        cfg.sigma,
        cfg.augmentations,
        cfg.epsilon
    );

    let center = (filter.width() as f64 / 2.0, filter.height() as f64 / 2.0);
    println!("\n{:>10}  {:>12}  {:>10}", "offset", "peak at", "recovered");
    for offset in [0.0f64, 2.0, 5.0, 9.0, -6.0] {
        // Cut the search patch deliberately off-center; the peak should point
        // back at the true target location.
        let region = BoundingBox::new(
            150.0 + offset,
            100.0,
            filter.width() as f64,
            filter.height() as f64,
        )
        .expect("valid region");
        let patch = extract_patch(&frame, &region);
        let map = filter.correlate(&patch).expect("dims match");
        let (ax, ay) = map.argmax();
        let dx = ax as f64 - center.0;
        let dy = ay as f64 - center.1;
        println!(
            "{:>10} {:>13} {:>11}",
            format!("{offset:+.0} px"),
            format!("({ax}, {ay})"),
            format!("({:+.0}, {:+.0})", dx, dy)
        );
        // The Hann window attenuates off-center evidence, so large offsets
        // come back slightly conservative; in a tracking loop the box
        // re-centers every frame and the residual shrinks to nothing.
        assert!(
            (dx + offset).abs() <= 1.5 + 0.25 * offset.abs() && dy.abs() <= 1.5,
            "peak should point back toward the target"
        );
    }
    println!(
        "\nthe argmax points back at the target; large offsets read slightly\n\
         conservative because the raised-cosine window de-weights patch edges."
    );
}
