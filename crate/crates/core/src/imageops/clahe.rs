//! Contrast limited adaptive histogram equalization.
//!
//! Each `tile_h x tile_w` tile gets a 256-bin histogram. Bins above
//! `clip * tile_pixels` are cut and the excess is spread uniformly over all
//! bins in a single pass. The tile CDF is the lookup table; every pixel blends
//! the tables of the four surrounding tile centres bilinearly.

use serde::{Deserialize, Serialize};

use super::Image2D;

pub const CLAHE_BINS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub tile_h: usize,
    pub tile_w: usize,
    /// Per-bin limit as a fraction of the tile pixel count, in `(0, 1]`.
    pub clip: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            tile_h: 20,
            tile_w: 20,
            clip: 0.01,
        }
    }
}

#[inline]
fn bin_of(v: f64) -> usize {
    ((v.clamp(0.0, 1.0) * CLAHE_BINS as f64) as usize).min(CLAHE_BINS - 1)
}

/// Tile start offsets and centres along one axis.
fn tile_layout(n: usize, tile: usize) -> (Vec<(usize, usize)>, Vec<f64>) {
    let count = n.div_ceil(tile);
    let spans: Vec<(usize, usize)> = (0..count)
        .map(|i| (i * tile, ((i + 1) * tile).min(n)))
        .collect();
    let centres = spans
        .iter()
        .map(|&(s, e)| (s + e - 1) as f64 / 2.0)
        .collect();
    (spans, centres)
}

fn tile_lut(img: &Image2D, rows: (usize, usize), cols: (usize, usize), clip: f64) -> Vec<f64> {
    let mut hist = [0.0f64; CLAHE_BINS];
    for y in rows.0..rows.1 {
        for x in cols.0..cols.1 {
            hist[bin_of(img.get(x, y))] += 1.0;
        }
    }
    let total = ((rows.1 - rows.0) * (cols.1 - cols.0)) as f64;
    let limit = clip * total;
    let excess: f64 = hist.iter().map(|&h| (h - limit).max(0.0)).sum();
    if excess > 0.0 {
        let share = excess / CLAHE_BINS as f64;
        for h in hist.iter_mut() {
            *h = h.min(limit) + share;
        }
    }
    let mut acc = 0.0;
    hist.iter()
        .map(|&h| {
            acc += h;
            (acc / total).min(1.0)
        })
        .collect()
}

/// Locates the two tile centres bracketing `pos` and the blend weight of the second.
fn bracket(centres: &[f64], pos: f64) -> (usize, usize, f64) {
    let last = centres.len() - 1;
    if pos <= centres[0] {
        return (0, 0, 0.0);
    }
    if pos >= centres[last] {
        return (last, last, 0.0);
    }
    let i0 = centres.partition_point(|&c| c <= pos) - 1;
    let i1 = i0 + 1;
    let w = (pos - centres[i0]) / (centres[i1] - centres[i0]);
    (i0, i1, w)
}

/// CLAHE on a normalized image. Constant images are returned unchanged.
pub fn clahe(img: &Image2D, params: ClaheParams) -> Image2D {
    assert!(params.tile_h > 0 && params.tile_w > 0, "tile dims must be positive");
    assert!(
        params.clip > 0.0 && params.clip <= 1.0,
        "clip must lie in (0, 1]"
    );
    let (lo, hi) = img.range();
    if lo == hi {
        return img.clone();
    }
    let (row_spans, row_centres) = tile_layout(img.height(), params.tile_h);
    let (col_spans, col_centres) = tile_layout(img.width(), params.tile_w);
    let luts: Vec<Vec<Vec<f64>>> = row_spans
        .iter()
        .map(|&rows| {
            col_spans
                .iter()
                .map(|&cols| tile_lut(img, rows, cols, params.clip))
                .collect()
        })
        .collect();
    let col_brackets: Vec<_> = (0..img.width())
        .map(|x| bracket(&col_centres, x as f64))
        .collect();
    let mut out = img.clone();
    for y in 0..img.height() {
        let (r0, r1, wy) = bracket(&row_centres, y as f64);
        for (x, &(c0, c1, wx)) in col_brackets.iter().enumerate() {
            let b = bin_of(img.get(x, y));
            let top = luts[r0][c0][b] * (1.0 - wx) + luts[r0][c1][b] * wx;
            let bottom = luts[r1][c0][b] * (1.0 - wx) + luts[r1][c1][b] * wx;
            out.set(x, y, (top * (1.0 - wy) + bottom * wy).clamp(0.0, 1.0));
        }
    }
    out
}
