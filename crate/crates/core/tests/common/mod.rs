//! Oracles and fixtures shared by the integration suites.
#![allow(dead_code)]

use fetal_biometry::geometry::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum over the bias of the mean hinge loss for fixed scores `s_i = w . x_i`.
///
/// Convex and piecewise linear in the bias with kinks at `s_i - y_i`; every
/// kink is evaluated with prefix sums over the sorted kinks of each class.
fn min_hinge_over_bias(scores: &[f64], labels: &[f64]) -> f64 {
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    for (s, y) in scores.iter().zip(labels) {
        if *y > 0.0 {
            pos.push(s - 1.0);
        } else {
            neg.push(s + 1.0);
        }
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    let prefix = |v: &[f64]| {
        let mut acc = vec![0.0];
        for x in v {
            acc.push(acc.last().unwrap() + x);
        }
        acc
    };
    let (pp, np) = (prefix(&pos), prefix(&neg));
    let n = scores.len() as f64;
    pos.iter()
        .chain(neg.iter())
        .map(|&b| {
            // positives with kink <= b contribute b - k, negatives with kink >= b contribute k - b
            let cp = pos.partition_point(|&k| k <= b);
            let cn = neg.partition_point(|&k| k < b);
            let pos_part = cp as f64 * b - pp[cp];
            let neg_part = (np[neg.len()] - np[cn]) - (neg.len() - cn) as f64 * b;
            (pos_part + neg_part) / n
        })
        .fold(f64::INFINITY, f64::min)
}

/// Reduced objective `g(w) = lambda |w|^2 + min_b hinge(w, b)`.
pub fn reduced_objective(points: &[Point2], labels: &[f64], w: [f64; 2], lambda: f64) -> f64 {
    let scores: Vec<f64> = points.iter().map(|p| w[0] * p.x + w[1] * p.y).collect();
    lambda * (w[0] * w[0] + w[1] * w[1]) + min_hinge_over_bias(&scores, labels)
}

fn ternary(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Deterministic optimum of the SVM objective by nested ternary search over
/// the two weights (the reduced objective is jointly convex). Returns the
/// optimal weights and objective value.
pub fn svm_oracle(points: &[Point2], labels: &[f64], lambda: f64) -> ([f64; 2], f64) {
    let r = 1.0001 / lambda.sqrt();
    let iters = 70;
    let inner = |w0: f64| ternary(-r, r, iters, |w1| reduced_objective(points, labels, [w0, w1], lambda));
    let (w0, _) = ternary(-r, r, iters, |w0| inner(w0).1);
    let (w1, val) = inner(w0);
    ([w0, w1], val)
}

/// Two equally populated uniform discs of random radius separated by a gap.
pub fn separable_clusters(seed: u64, max_n: usize) -> (Vec<Point2>, Vec<i8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // equal class sizes, as for the two hemispheres
    let n_neg = rng.random_range(10..=max_n / 2);
    let n_pos = n_neg;
    let r_neg = rng.random_range(2.0..6.0);
    let r_pos = rng.random_range(2.0..6.0);
    let gap = rng.random_range(6.0..14.0);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let c_neg = Point2::new(rng.random_range(20.0..80.0), rng.random_range(20.0..80.0));
    let dir = Point2::new(angle.cos(), angle.sin());
    let c_pos = c_neg + dir * (r_neg + r_pos + gap);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (c, r, n, y) in [(c_neg, r_neg, n_neg, -1i8), (c_pos, r_pos, n_pos, 1i8)] {
        for _ in 0..n {
            let rho = r * rng.random_range(0.0f64..1.0).sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            points.push(c + Point2::new(rho * phi.cos(), rho * phi.sin()));
            labels.push(y);
        }
    }
    (points, labels)
}

/// Random point cloud of 3 to `max_n` points: uniform in a box, on a circle or
/// on a few grid rows, so that hulls with collinear runs also appear.
pub fn random_point_set(seed: u64, max_n: usize) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_n);
    match seed % 3 {
        0 => (0..n)
            .map(|_| Point2::new(rng.random_range(-50.0..50.0), rng.random_range(-30.0..30.0)))
            .collect(),
        1 => (0..n)
            .map(|_| {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                Point2::new(20.0 * t.cos(), 12.0 * t.sin())
            })
            .collect(),
        _ => (0..n)
            .map(|_| Point2::new(rng.random_range(0..40) as f64 * 0.75, rng.random_range(0..6) as f64 * 0.75))
            .collect(),
    }
}

/// Largest squared pairwise distance by checking every pair.
pub fn brute_diameter_sq(points: &[Point2]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((*p - *q).norm_sq());
        }
    }
    best
}

/// Smallest bounding-box area over the directions of every point pair.
pub fn brute_min_rect_area(points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let d = *q - *p;
            if d.norm_sq() == 0.0 {
                continue;
            }
            let e = d.normalized();
            let n = e.perp();
            let (mut lo_e, mut hi_e, mut lo_n, mut hi_n) =
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for r in points {
                lo_e = lo_e.min(r.dot(e));
                hi_e = hi_e.max(r.dot(e));
                lo_n = lo_n.min(r.dot(n));
                hi_n = hi_n.max(r.dot(n));
            }
            best = best.min((hi_e - lo_e) * (hi_n - lo_n));
        }
    }
    best
}

pub mod scenarios;
pub mod worked;
