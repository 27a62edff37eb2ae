//! In-plane geometry in millimetre coordinates.
//!
//! Pixel coordinates follow the image convention: `x` is the column, `y` the
//! row, origin at the top-left pixel centre. Everything downstream of the
//! label maps works on millimetre points obtained with [`voxel_to_mm`].

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product of two in-plane vectors.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise rotation by 90 degrees (in a y-up frame).
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn rotated(self, angle_rad: f64) -> Point2 {
        let (s, c) = angle_rad.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// In-plane pixel spacing in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing2 {
    pub sx: f64,
    pub sy: f64,
}

impl Spacing2 {
    pub fn new(sx: f64, sy: f64) -> Result<Self> {
        if !(sx > 0.0 && sy > 0.0 && sx.is_finite() && sy.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "spacing must be positive, got ({sx}, {sy})"
            )));
        }
        Ok(Self { sx, sy })
    }

    pub fn min(self) -> f64 {
        self.sx.min(self.sy)
    }
}

pub fn voxel_to_mm(p: Point2, spacing: Spacing2) -> Point2 {
    Point2::new(p.x * spacing.sx, p.y * spacing.sy)
}

pub fn mm_to_voxel(p: Point2, spacing: Spacing2) -> Point2 {
    Point2::new(p.x / spacing.sx, p.y / spacing.sy)
}

pub fn length_mm(p0: Point2, p1: Point2) -> f64 {
    (p1 - p0).norm()
}

/// Undirected line `a*x + b*y + c = 0` with `a^2 + b^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line2D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Line2D {
    /// Builds a normalized line from arbitrary implicit coefficients.
    pub fn from_implicit(a: f64, b: f64, c: f64) -> Result<Self> {
        let n = a.hypot(b);
        if !(n > 0.0) || !n.is_finite() || !c.is_finite() {
            return Err(Error::Degenerate(format!(
                "line normal ({a}, {b}) is not a valid direction"
            )));
        }
        Ok(Self {
            a: a / n,
            b: b / n,
            c: c / n,
        })
    }

    pub fn through(point: Point2, direction: Point2) -> Result<Self> {
        let normal = direction.perp();
        Self::from_implicit(normal.x, normal.y, -normal.dot(point))
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.a, self.b)
    }

    /// Unit direction along the line; the sign is arbitrary but fixed.
    pub fn direction(&self) -> Point2 {
        Point2::new(-self.b, self.a)
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn project(&self, p: Point2) -> Point2 {
        p - self.normal() * self.signed_distance(p)
    }

    /// Point of the line closest to the origin.
    pub fn anchor(&self) -> Point2 {
        self.normal() * (-self.c)
    }

    /// Same line with every coefficient negated.
    pub fn negated(&self) -> Line2D {
        Line2D {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }

    /// Undirected angle of the line direction against the +x axis, in `[0, 180)`.
    pub fn angle_deg(&self) -> f64 {
        let d = self.direction();
        fold_angle_deg(d.y.atan2(d.x).to_degrees())
    }

    /// True when both lines describe the same set of points, within `tol`.
    pub fn same_as(&self, other: &Line2D, tol: f64) -> bool {
        let close = |l: &Line2D| {
            (self.a - l.a).abs() < tol && (self.b - l.b).abs() < tol && (self.c - l.c).abs() < tol
        };
        close(other) || close(&other.negated())
    }
}

/// Folds an angle in degrees into `[0, 180)`.
pub fn fold_angle_deg(angle: f64) -> f64 {
    let a = angle.rem_euclid(180.0);
    if a >= 180.0 {
        0.0
    } else {
        a
    }
}

/// Undirected difference of two line angles, in `[0, 90]`.
pub fn angle_diff_deg(a1: f64, a2: f64) -> f64 {
    let d = (a1 - a2).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Axis-aligned rectangle in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectMm {
    pub min: Point2,
    pub max: Point2,
}

impl RectMm {
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    /// Parameters `s` (along `dir` from `origin`) where the line enters and
    /// leaves the rectangle, or `None` when it misses.
    pub fn clip_line(&self, origin: Point2, dir: Point2) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (o, d, mn, mx) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
        ] {
            if d.abs() < 1e-12 {
                if o < mn || o > mx {
                    return None;
                }
            } else {
                let (s0, s1) = ((mn - o) / d, (mx - o) / d);
                lo = lo.max(s0.min(s1));
                hi = hi.min(s0.max(s1));
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}
