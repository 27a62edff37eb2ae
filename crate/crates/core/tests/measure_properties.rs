mod common;

use common::scenarios::{ANGLES_DEG, HALF_WIDTHS_MM};
use fetal_biometry::geometry::{angle_diff_deg, Line2D};
use fetal_biometry::measure::Measurement;
use fetal_biometry::phantom::{generate, PhantomSpec};
use fetal_biometry::pipeline::{run_pipeline, PipelineConfig, PipelineReport};
use fetal_biometry::volume::Dims;
use proptest::prelude::*;

fn spec(half_width: f64, angle: f64, offset: [f64; 2], noise: f64, seed: u64) -> PhantomSpec {
    PhantomSpec {
        dims: Dims {
            nx: 216,
            ny: 216,
            nz: 24,
        },
        msl_angle_deg: angle,
        center_offset_mm: offset,
        noise_sigma: noise,
        seed,
        ..PhantomSpec::with_half_width(half_width)
    }
}

fn measure(spec: &PhantomSpec) -> PipelineReport {
    let p = generate(spec).unwrap();
    run_pipeline(&p.volume, &p.labels, &p.probabilities, &PipelineConfig::default()).unwrap()
}

fn segment_angle(m: &Measurement) -> f64 {
    let d = m.endpoint_b - m.endpoint_a;
    d.y.atan2(d.x).to_degrees()
}

fn line_of(r: &PipelineReport, z: usize) -> Line2D {
    r.slices[z].line.expect("line on the measured slice")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    #[test]
    fn skull_width_exceeds_brain_width_and_cbd_crosses_the_line_squarely(
        half_width in 30.0f64..46.0,
        angle in -25.0f64..25.0,
        seed in 0u64..1000,
    ) {
        let r = measure(&spec(half_width, angle, [0.0, 0.0], 0.01, seed));
        let (cbd, bbd) = (r.cbd.as_ref().unwrap(), r.bbd.as_ref().unwrap());
        prop_assert!(bbd.value_mm >= cbd.value_mm);
        let line = line_of(&r, cbd.slice_index);
        let off_square = angle_diff_deg(segment_angle(cbd), line.angle_deg() + 90.0);
        prop_assert!(off_square <= 1.0, "CBD is {off_square} degrees off perpendicular");
    }

    #[test]
    fn whole_pixel_shifts_leave_measurements_unchanged(
        half_width in 30.0f64..42.0,
        angle_idx in 0usize..5,
        dx in -6i32..=6,
        dy in -6i32..=6,
    ) {
        let angle = ANGLES_DEG[angle_idx];
        let base = measure(&spec(half_width, angle, [0.0, 0.0], 0.0, 7));
        let shifted = measure(&spec(half_width, angle, [0.75 * dx as f64, 0.75 * dy as f64], 0.0, 7));
        for (a, b) in [(&base.cbd, &shifted.cbd), (&base.bbd, &shifted.bbd), (&base.tcd, &shifted.tcd)] {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            prop_assert!((a.value_mm - b.value_mm).abs() <= 0.25, "{:?}: {} vs {}", a.kind, a.value_mm, b.value_mm);
        }
    }
}

#[test]
fn widening_the_cerebrum_widens_cbd_by_twice_the_step() {
    let widths = HALF_WIDTHS_MM;
    for &angle in &[0.0, 25.0] {
        let cbds: Vec<f64> = widths
            .iter()
            .map(|&b| measure(&spec(b, angle, [0.0, 0.0], 0.01, 3)).cbd.unwrap().value_mm)
            .collect();
        for (w, c) in widths.windows(2).zip(cbds.windows(2)) {
            let expected = 2.0 * (w[1] - w[0]);
            let got = c[1] - c[0];
            assert!((got - expected).abs() <= 1.5, "angle {angle}: {c:?} for widths {w:?}");
        }
    }
}
