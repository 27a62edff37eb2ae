mod common;

use common::{separable_clusters, svm_oracle};
use fetal_biometry::geometry::Point2;
use fetal_biometry::msl::svm::{fit_linear_svm, SvmConfig};

#[test]
fn objective_matches_oracle_and_separates() {
    for seed in 0..50u64 {
        let (points, labels) = separable_clusters(seed, 200);
        let yf: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        let (_, best) = svm_oracle(&points, &yf, 10.0);
        let cfg = SvmConfig { seed, ..SvmConfig::default() };
        let fit = fit_linear_svm(&points, &labels, &cfg).unwrap();
        assert!(fit.converged, "seed {seed} did not converge");
        let rel = (fit.objective - best) / best;
        assert!(rel < 0.01, "seed {seed}: objective {} vs oracle {best}", fit.objective);
        for (p, &l) in points.iter().zip(&labels) {
            assert!(fit.decision(*p) * f64::from(l) > 0.0, "seed {seed}: {p:?} misclassified");
        }
    }
}

#[test]
fn rotated_mirror_pair_recovers_the_axis() {
    // points mirrored across a line through (30, 40) at 70 degrees
    let axis = Point2::new(70f64.to_radians().cos(), 70f64.to_radians().sin());
    let normal = axis.perp();
    let anchor = Point2::new(30.0, 40.0);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for i in 0..12 {
        for j in 1..5 {
            let along = -11.0 + 2.0 * i as f64;
            let off = 2.5 * j as f64;
            points.push(anchor + axis * along - normal * off);
            labels.push(-1);
            points.push(anchor + axis * along + normal * off);
            labels.push(1);
        }
    }
    let fit = fit_linear_svm(&points, &labels, &SvmConfig::default()).unwrap();
    let line = fit.line().unwrap();
    let diff = fetal_biometry::geometry::angle_diff_deg(line.angle_deg(), 70.0);
    assert!(diff < 1.0, "angle off by {diff}");
    assert!(line.signed_distance(anchor).abs() < 0.1);
}
