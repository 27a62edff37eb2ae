//! Which end of the mid-sagittal line points to the cerebellum.
//!
//! The line is clipped to the ROI rectangle (`B0`, `B1`, midpoint `C`) and the
//! normal through `C` meets the border at `Q`. For a cerebellum point `P` the
//! sign of `cross(C - Q, P - C)` says on which side of the normal, and hence
//! towards which end of the line, `P` lies.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Line2D, Point2, RectMm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrientationSource {
    Cerebellum,
    Propagated { from: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    pub b0: Point2,
    pub b1: Point2,
    pub c: Point2,
    pub q: Point2,
    /// Sign of `cross(C - Q, P - C)` on the inferior (cerebellum) side.
    pub inferior_sign: i8,
    /// Per-sample signs; empty for propagated orientations.
    pub signs: Vec<i8>,
    pub consistent: bool,
    pub source: OrientationSource,
}

impl Orientation {
    fn side(&self, p: Point2) -> f64 {
        (self.c - self.q).cross(p - self.c)
    }

    /// Line endpoint on the cerebellum side.
    pub fn inferior(&self) -> Point2 {
        if self.side(self.b0) * f64::from(self.inferior_sign) > 0.0 {
            self.b0
        } else {
            self.b1
        }
    }

    pub fn superior(&self) -> Point2 {
        if self.inferior() == self.b0 {
            self.b1
        } else {
            self.b0
        }
    }

    /// Unit vector along the line pointing away from the cerebellum.
    pub fn superior_dir(&self) -> Point2 {
        (self.superior() - self.inferior()).normalized()
    }
}

struct Frame {
    b0: Point2,
    b1: Point2,
    c: Point2,
    q: Point2,
}

fn frame(line: &Line2D, roi: &RectMm) -> Result<Frame> {
    let origin = line.anchor();
    let dir = line.direction();
    let (lo, hi) = roi.clip_line(origin, dir).ok_or(Error::LineOutsideRoi)?;
    if hi - lo < 1e-9 {
        return Err(Error::Degenerate("line touches the ROI in a single point".into()));
    }
    let b0 = origin + dir * lo;
    let b1 = origin + dir * hi;
    let c = b0.midpoint(b1);
    let n = line.normal();
    let (s0, s1) = roi.clip_line(c, n).ok_or(Error::LineOutsideRoi)?;
    let (p0, p1) = (c + n * s0, c + n * s1);
    let q = if (p0.x - p1.x).abs() > 1e-9 {
        if p0.x > p1.x { p0 } else { p1 }
    } else if p0.y >= p1.y {
        p0
    } else {
        p1
    };
    if (q - c).norm() < 1e-9 {
        return Err(Error::Degenerate("normal foot coincides with the midpoint".into()));
    }
    Ok(Frame { b0, b1, c, q })
}

/// Orientation from `k` seeded cerebellum samples; the inferior side is the
/// majority sign and `consistent` reports whether all samples agree.
pub fn slice_orientation(
    line: &Line2D,
    roi: &RectMm,
    cerebellum: &[Point2],
    k: usize,
    seed: u64,
) -> Result<Orientation> {
    if cerebellum.is_empty() {
        return Err(Error::NoCerebellum);
    }
    if k == 0 {
        return Err(Error::InvalidInput("orientation needs at least one sample".into()));
    }
    let f = frame(line, roi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = if cerebellum.len() <= k {
        (0..cerebellum.len()).collect()
    } else {
        sample(&mut rng, cerebellum.len(), k).into_vec()
    };
    let crosses: Vec<f64> = picks
        .iter()
        .map(|&i| (f.c - f.q).cross(cerebellum[i] - f.c))
        .collect();
    let signs: Vec<i8> = crosses
        .iter()
        .map(|&v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
        .collect();
    let votes: i32 = signs.iter().map(|&s| i32::from(s)).sum();
    let inferior_sign = match votes.signum() {
        0 => {
            let total: f64 = crosses.iter().sum();
            if total == 0.0 {
                return Err(Error::Degenerate("cerebellum samples lie on the normal".into()));
            }
            if total > 0.0 { 1 } else { -1 }
        }
        s => s as i8,
    };
    let consistent = signs.iter().all(|&s| s == inferior_sign);
    Ok(Orientation {
        b0: f.b0,
        b1: f.b1,
        c: f.c,
        q: f.q,
        inferior_sign,
        signs,
        consistent,
        source: OrientationSource::Cerebellum,
    })
}

/// Fills in orientations for slices without cerebellum.
///
/// Each such slice takes the nearest oriented slice (lower index on ties) and
/// labels its own line endpoints by the pairing with the smaller summed
/// in-plane distance to that slice's inferior and superior endpoints.
/// Slices without a line stay `None`.
pub fn propagate_orientation(
    lines: &[Option<Line2D>],
    known: &[Option<Orientation>],
    roi: &RectMm,
) -> Result<Vec<Option<Orientation>>> {
    if lines.len() != known.len() {
        return Err(Error::LengthMismatch(lines.len(), known.len()));
    }
    let sources: Vec<usize> = (0..known.len()).filter(|&z| known[z].is_some()).collect();
    if sources.is_empty() {
        return Err(Error::NoCerebellum);
    }
    let mut out = Vec::with_capacity(lines.len());
    for (z, line) in lines.iter().enumerate() {
        if let Some(o) = &known[z] {
            out.push(Some(o.clone()));
            continue;
        }
        let Some(line) = line else {
            out.push(None);
            continue;
        };
        let from = *sources
            .iter()
            .min_by_key(|&&s| (s.abs_diff(z), s))
            .expect("non-empty");
        let src = known[from].as_ref().expect("source slice is oriented");
        let (inf, sup) = (src.inferior(), src.superior());
        let f = frame(line, roi)?;
        let keep = (f.b0 - inf).norm() + (f.b1 - sup).norm();
        let swap = (f.b1 - inf).norm() + (f.b0 - sup).norm();
        let inferior_pt = if keep <= swap { f.b0 } else { f.b1 };
        let side = (f.c - f.q).cross(inferior_pt - f.c);
        out.push(Some(Orientation {
            b0: f.b0,
            b1: f.b1,
            c: f.c,
            q: f.q,
            inferior_sign: if side >= 0.0 { 1 } else { -1 },
            signs: Vec::new(),
            consistent: true,
            source: OrientationSource::Propagated { from },
        }));
    }
    Ok(out)
}
