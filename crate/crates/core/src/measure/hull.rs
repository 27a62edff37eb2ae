use serde::{Deserialize, Serialize};

use super::{half_pixel_extent, Aux, Measurement, MeasurementKind};
use crate::error::{Error, Result};
use crate::geometry::{fold_angle_deg, voxel_to_mm, Point2, Spacing2};
use crate::imageops::Mask2D;

/// Rectangle with arbitrary orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub center: Point2,
    /// Half-extents along the long and short axes.
    pub half_long: f64,
    pub half_short: f64,
    /// Long-axis angle against +x, in `[0, 180)`.
    pub angle_deg: f64,
}

impl OrientedRect {
    pub fn area(&self) -> f64 {
        4.0 * self.half_long * self.half_short
    }
}

/// Convex hull in counter-clockwise order (y up), without collinear points.
/// Fewer than three distinct points come back as they are, deduplicated.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Farthest pair of points by rotating calipers over the convex hull.
pub fn convex_hull_diameter(points: &[Point2]) -> Result<(Point2, Point2, f64)> {
    let hull = convex_hull(points);
    match hull.len() {
        0 => return Err(Error::Degenerate("no points".into())),
        1 => return Err(Error::Degenerate("all points coincide".into())),
        2 => return Ok((hull[0], hull[1], (hull[0] - hull[1]).norm())),
        _ => {}
    }
    let m = hull.len();
    let area = |i: usize, j: usize, k: usize| (hull[j] - hull[i]).cross(hull[k] - hull[i]).abs();
    let mut best = (hull[0], hull[1], (hull[0] - hull[1]).norm_sq());
    let mut consider = |p: Point2, q: Point2| {
        let d = (p - q).norm_sq();
        if d > best.2 {
            best = (p, q, d);
        }
    };
    let mut j = 1;
    for i in 0..m {
        let next = (i + 1) % m;
        while area(i, next, (j + 1) % m) > area(i, next, j) {
            j = (j + 1) % m;
        }
        consider(hull[i], hull[j]);
        consider(hull[next], hull[j]);
    }
    Ok((best.0, best.1, best.2.sqrt()))
}

/// Minimum-area enclosing rectangle; one side is flush with a hull edge.
/// Ties keep the first hull edge found. Collinear input yields a rectangle
/// of zero width along the points.
pub fn min_area_rect(points: &[Point2]) -> Result<OrientedRect> {
    let hull = convex_hull(points);
    if hull.len() < 2 {
        return Err(Error::Degenerate("need two distinct points".into()));
    }
    let edges = if hull.len() == 2 { 1 } else { hull.len() };
    let mut best: Option<(f64, OrientedRect)> = None;
    for i in 0..edges {
        let e = (hull[(i + 1) % hull.len()] - hull[i]).normalized();
        let n = e.perp();
        let (mut lo_e, mut hi_e, mut lo_n, mut hi_n) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &hull {
            let (a, b) = (p.dot(e), p.dot(n));
            lo_e = lo_e.min(a);
            hi_e = hi_e.max(a);
            lo_n = lo_n.min(b);
            hi_n = hi_n.max(b);
        }
        let (len_e, len_n) = (hi_e - lo_e, hi_n - lo_n);
        let area = len_e * len_n;
        let scale = len_e.max(len_n).powi(2);
        if best.as_ref().is_some_and(|(a, _)| area >= *a - 1e-12 * scale) {
            continue;
        }
        let center = e * (0.5 * (lo_e + hi_e)) + n * (0.5 * (lo_n + hi_n));
        let long = if len_e >= len_n { e } else { n };
        best = Some((
            area,
            OrientedRect {
                center,
                half_long: 0.5 * len_e.max(len_n),
                half_short: 0.5 * len_e.min(len_n),
                angle_deg: fold_angle_deg(long.y.atan2(long.x).to_degrees()),
            },
        ));
    }
    Ok(best.expect("at least one edge").1)
}

/// Largest cerebellum diameter, from the convex hull of its boundary pixels.
///
/// Endpoints sit on the outer edges of the two extreme pixels. `aux` carries
/// the angle of the diameter and of the long axis of the minimum-area
/// rectangle.
pub fn compute_tcd(cerebellum: &Mask2D, slice_index: usize, spacing: Spacing2) -> Result<Measurement> {
    let pts: Vec<Point2> = cerebellum
        .boundary_points()
        .into_iter()
        .map(|p| voxel_to_mm(p, spacing))
        .collect();
    if pts.is_empty() {
        return Err(Error::MissingStructure("cerebellum".into()));
    }
    let (p, q, _) = convex_hull_diameter(&pts)?;
    let dir = (q - p).normalized();
    let pad = half_pixel_extent(dir, spacing);
    let rect = min_area_rect(&pts)?;
    Ok(Measurement::new(
        MeasurementKind::Tcd,
        slice_index,
        p - dir * pad,
        q + dir * pad,
        Aux::Tcd {
            hull_angle_deg: fold_angle_deg(dir.y.atan2(dir.x).to_degrees()),
            rect_angle_deg: rect.angle_deg,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle_diff_deg;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn unit_square_diagonal() {
        let (_, _, d) = convex_hull_diameter(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_use_the_extremes() {
        let (p, q, d) = convex_hull_diameter(&pts(&[(1.0, 1.0), (3.0, 3.0), (2.0, 2.0), (0.0, 0.0)])).unwrap();
        assert!((d - 18f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.min_x_y(q), (0.0, 0.0));
        let r = min_area_rect(&pts(&[(0.0, 0.0), (1.0, 1.0), (3.0, 3.0)])).unwrap();
        assert_eq!(r.half_short, 0.0);
        assert!((r.angle_deg - 45.0).abs() < 1e-9);
    }

    trait MinXY {
        fn min_x_y(self, other: Point2) -> (f64, f64);
    }

    impl MinXY for Point2 {
        fn min_x_y(self, other: Point2) -> (f64, f64) {
            (self.x.min(other.x), self.y.min(other.y))
        }
    }

    #[test]
    fn identical_points_are_degenerate() {
        assert!(convex_hull_diameter(&pts(&[(2.0, 2.0), (2.0, 2.0)])).is_err());
        assert!(convex_hull_diameter(&[]).is_err());
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let h = convex_hull(&pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (2.0, 2.0), (0.0, 2.0), (1.0, 1.0)]));
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn axis_aligned_rectangle() {
        let mut v = Vec::new();
        for i in 0..=8 {
            for j in 0..=4 {
                v.push(Point2::new(i as f64 * 0.5, j as f64 * 0.5));
            }
        }
        let r = min_area_rect(&v).unwrap();
        assert!((r.half_long - 2.0).abs() < 1e-12 && (r.half_short - 1.0).abs() < 1e-12);
        assert!(angle_diff_deg(r.angle_deg, 0.0) < 1e-9);
        assert!((r.center - Point2::new(2.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn square_takes_the_first_edge() {
        let r = min_area_rect(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        // first hull edge runs from (0,0) to (1,0)
        assert_eq!(r.angle_deg, 0.0);
    }

    #[test]
    fn rotated_rectangle() {
        let a = 25f64.to_radians();
        let (e, n) = (Point2::new(a.cos(), a.sin()), Point2::new(-a.sin(), a.cos()));
        let mut v = Vec::new();
        for i in 0..=40 {
            for j in 0..=20 {
                v.push(e * (i as f64 * 0.1) + n * (j as f64 * 0.1));
            }
        }
        let r = min_area_rect(&v).unwrap();
        assert!(angle_diff_deg(r.angle_deg, 25.0) < 1.0, "{r:?}");
        assert!((r.area() - 8.0).abs() < 1e-9);
    }

    fn ellipse_mask(cx: f64, cy: f64, a: f64, b: f64, theta: f64, size: usize) -> Mask2D {
        let mut m = Mask2D::new(size, size);
        for y in 0..size {
            for x in 0..size {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let u = dx * theta.cos() + dy * theta.sin();
                let v = -dx * theta.sin() + dy * theta.cos();
                m.set(x, y, (u / a).powi(2) + (v / b).powi(2) <= 1.0);
            }
        }
        m
    }

    #[test]
    fn dense_ellipse_axes_agree() {
        let theta = 0.35f64;
        let (e, n) = (Point2::new(theta.cos(), theta.sin()), Point2::new(-theta.sin(), theta.cos()));
        let outline: Vec<Point2> = (0..2000)
            .map(|k| {
                let s = k as f64 * std::f64::consts::TAU / 2000.0;
                e * (20.0 * s.cos()) + n * (12.0 * s.sin())
            })
            .collect();
        let (p, q, d) = convex_hull_diameter(&outline).unwrap();
        assert!((d - 40.0).abs() < 1e-3);
        let dir = q - p;
        let hull_angle = fold_angle_deg(dir.y.atan2(dir.x).to_degrees());
        let rect = min_area_rect(&outline).unwrap();
        assert!(angle_diff_deg(hull_angle, rect.angle_deg) < 1.0);
        assert!(angle_diff_deg(rect.angle_deg, theta.to_degrees()) < 1.0);
    }

    #[test]
    fn raster_ellipse_diameter() {
        let sp = Spacing2::new(0.75, 0.75).unwrap();
        // major diameter 40 mm
        let m = ellipse_mask(60.0, 60.0, 20.0 / 0.75, 8.0 / 0.75, 0.35, 120);
        let t = compute_tcd(&m, 7, sp).unwrap();
        assert!((t.value_mm - 40.0).abs() < 1.5, "{}", t.value_mm);
        assert_eq!(t.slice_index, 7);
        match t.aux {
            // pixel lattice directions pull both angles by a few degrees
            Aux::Tcd { hull_angle_deg, rect_angle_deg } => {
                assert!(angle_diff_deg(hull_angle_deg, rect_angle_deg) < 10.0);
            }
            _ => panic!("wrong aux"),
        }
    }

    #[test]
    fn l_shape_splits_the_angles() {
        let mut m = Mask2D::new(60, 60);
        for y in 10..50 {
            for x in 10..18 {
                m.set(x, y, true);
            }
        }
        for y in 42..50 {
            for x in 10..40 {
                m.set(x, y, true);
            }
        }
        let t = compute_tcd(&m, 0, Spacing2::new(1.0, 1.0).unwrap()).unwrap();
        match t.aux {
            Aux::Tcd { hull_angle_deg, rect_angle_deg } => {
                assert!(angle_diff_deg(hull_angle_deg, rect_angle_deg) > 10.0);
            }
            _ => panic!("wrong aux"),
        }
    }

    #[test]
    fn single_pixel_is_degenerate() {
        let mut m = Mask2D::new(5, 5);
        m.set(2, 2, true);
        assert!(compute_tcd(&m, 0, Spacing2::new(1.0, 1.0).unwrap()).is_err());
        assert!(compute_tcd(&Mask2D::new(5, 5), 0, Spacing2::new(1.0, 1.0).unwrap()).is_err());
    }
}
