//! 8-connected component labelling and size-based cleanup.

use super::Mask2D;
use crate::volume::{Class, LabelSlice};

const NEIGHBOURS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Flood-fills pixels for which `same(a, b)` groups neighbours together.
/// Returns per-pixel component ids (0 = unlabelled) and component sizes
/// indexed by `id - 1`, in raster order of first appearance.
fn flood(
    width: usize,
    height: usize,
    active: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> (Vec<u32>, Vec<usize>) {
    let mut ids = vec![0u32; width * height];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..width * height {
        if ids[start] != 0 || !active(start) {
            continue;
        }
        let id = sizes.len() as u32 + 1;
        ids[start] = id;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = ((i % width) as isize, (i / width) as isize);
            for (dx, dy) in NEIGHBOURS {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if ids[j] == 0 && active(j) && same(i, j) {
                    ids[j] = id;
                    stack.push(j);
                }
            }
        }
        sizes.push(size);
    }
    (ids, sizes)
}

/// Component ids (0 for background) and sizes of a binary mask.
pub fn label_components(mask: &Mask2D) -> (Vec<u32>, Vec<usize>) {
    let data = mask.data();
    flood(mask.width(), mask.height(), |i| data[i], |_, _| true)
}

/// Ids of the `k` largest components; equal sizes keep the earlier component.
fn largest_ids(sizes: &[usize], k: usize) -> Vec<bool> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut keep = vec![false; sizes.len() + 1];
    for &idx in order.iter().take(k) {
        keep[idx + 1] = true;
    }
    keep
}

/// Keeps only the `k` largest 8-connected components of `mask`.
pub fn keep_largest_components(mask: &Mask2D, k: usize) -> Mask2D {
    assert!(k >= 1, "k must be at least 1");
    let (ids, sizes) = label_components(mask);
    let keep = largest_ids(&sizes, k);
    let data = ids.iter().map(|&id| id != 0 && keep[id as usize]).collect();
    Mask2D::from_vec(mask.height(), mask.width(), data).expect("same dims")
}

/// Keeps the `k` largest single-class components of a label slice; the rest
/// becomes background. Components never mix classes.
pub fn keep_largest_label_components(slice: &LabelSlice, k: usize) -> LabelSlice {
    assert!(k >= 1, "k must be at least 1");
    let labels = &slice.labels;
    let (ids, sizes) = flood(
        slice.width,
        slice.height,
        |i| labels[i] != Class::Background as u8,
        |i, j| labels[i] == labels[j],
    );
    let keep = largest_ids(&sizes, k);
    LabelSlice {
        width: slice.width,
        height: slice.height,
        labels: labels
            .iter()
            .zip(&ids)
            .map(|(&l, &id)| if id != 0 && keep[id as usize] { l } else { 0 })
            .collect(),
    }
}
