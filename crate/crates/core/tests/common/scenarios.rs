//! Phantom sweeps and the corrupted phantoms behind each reliability warning.

use fetal_biometry::geometry::Point2;
use fetal_biometry::phantom::{generate, Phantom, PhantomSpec};
use fetal_biometry::slice_select::SliceProbabilities;
use fetal_biometry::volume::{Class, Dims, Volume};

pub const ANGLES_DEG: [f64; 5] = [-25.0, -10.0, 0.0, 10.0, 25.0];
pub const HALF_WIDTHS_MM: [f64; 5] = [30.0, 35.0, 40.0, 45.0, 50.0];

/// The `i`-th phantom of the recovery sweep: every angle meets every
/// cerebrum width across the first 20 indices.
pub fn sweep_spec(i: usize) -> PhantomSpec {
    let b = HALF_WIDTHS_MM[(i + i / 5) % 5];
    PhantomSpec {
        dims: Dims {
            nx: 216,
            ny: 216,
            nz: 24,
        },
        msl_angle_deg: ANGLES_DEG[i % 5],
        noise_sigma: 0.01,
        seed: 1000 + i as u64,
        ..PhantomSpec::with_half_width(b)
    }
}

pub fn sweep_phantom(i: usize) -> Phantom {
    generate(&sweep_spec(i)).expect("sweep spec is valid")
}

/// In-plane position of voxel `(x, y)` in the head frame: (along the line
/// towards superior, across it).
pub fn head_frame(p: &Phantom, x: usize, y: usize) -> (f64, f64) {
    let sp = p.volume.spacing();
    let q = Point2::new(x as f64 * sp.sx, y as f64 * sp.sy) - p.truth.center_mm;
    let u = p.truth.superior_dir;
    let v = Point2::new(-u.y, u.x);
    (q.dot(u), q.dot(v))
}

fn relabel(p: &mut Phantom, z: usize, f: impl Fn(f64, f64, u8) -> u8) {
    let mut slice = p.labels.slice(z);
    for y in 0..slice.height {
        for x in 0..slice.width {
            let (s, l) = head_frame(p, x, y);
            let old = slice.labels[x + slice.width * y];
            slice.labels[x + slice.width * y] = f(s, l, old);
        }
    }
    let mut labels = p.labels.clone();
    labels.set_slice(z, &slice);
    p.labels = labels;
}

/// Scales the CBD/BBD probabilities so the selected slice peaks at 0.45.
pub fn low_slice_confidence(p: &mut Phantom) {
    let v = p.probabilities.cbd_bbd.values.iter().map(|v| v * 0.45).collect();
    p.probabilities.cbd_bbd = SliceProbabilities::new(p.probabilities.cbd_bbd.task, v).unwrap();
}

/// Same for the TCD probabilities.
pub fn low_tcd_slice_confidence(p: &mut Phantom) {
    let v = p.probabilities.tcd.values.iter().map(|v| v * 0.45).collect();
    p.probabilities.tcd = SliceProbabilities::new(p.probabilities.tcd.task, v).unwrap();
}

/// Grows a cerebellum band up the midline from the cerebellum on the slices
/// next to the TCD slice, so cerebellum samples fall on both sides.
pub fn straddling_cerebellum(p: &mut Phantom, spec: &PhantomSpec) {
    let top = 0.6 * spec.a_mm;
    let bottom = -spec.cerebellum_offset_mm;
    let half = 2.5;
    for z in [spec.tcd_slice - 1, spec.tcd_slice + 1] {
        relabel(p, z, |s, l, old| {
            if l.abs() < half && s > bottom && s < top {
                Class::Cerebellum as u8
            } else {
                old
            }
        });
    }
}

/// Reassigns left/right on one slice by a line tilted 30 degrees, so that
/// slice's mid-sagittal line jumps away from its neighbours.
pub fn tilted_msl_slice(p: &mut Phantom, spec: &PhantomSpec) {
    let z = spec.cbd_slice + 3;
    let (sn, cs) = 30f64.to_radians().sin_cos();
    relabel(p, z, |s, l, old| {
        if old == Class::Left as u8 || old == Class::Right as u8 {
            let side = l * cs - s * sn;
            if side < 0.0 {
                Class::Left as u8
            } else {
                Class::Right as u8
            }
        } else {
            old
        }
    });
}

/// Puts one very bright voxel in a corner of the CBD slice, away from the
/// BBD rays. Rescaling to [0, 1] before CLAHE then crushes all tissue into
/// the lowest histogram bin.
pub fn intensity_spike(p: &mut Phantom, spec: &PhantomSpec) {
    let d = p.volume.dims();
    let mut voxels = p.volume.voxels().to_vec();
    voxels[d.index(0, 0, spec.cbd_slice)] = 1.0e4;
    p.volume = Volume::new(d, p.volume.spacing(), voxels).expect("same dims");
}

/// Replaces the cerebellum on the TCD slice with an L of two equal legs:
/// the hull diameter runs along the diagonal while the tightest box follows
/// the legs.
pub fn l_shaped_cerebellum(p: &mut Phantom, spec: &PhantomSpec) {
    let [ca, cb, _] = spec.cerebellum_semi_axes_mm;
    let leg = ca;
    let thick = 0.3 * leg;
    let bottom = -spec.cerebellum_offset_mm - cb;
    let left = -0.5 * leg;
    let half_gap = 0.5 * spec.gap_mm;
    relabel(p, spec.tcd_slice, |s, l, old| {
        let foot = s >= bottom && s < bottom + thick && l >= left && l < left + leg;
        let upright = s >= bottom && s < bottom + leg && l >= left && l < left + thick;
        if foot || upright {
            Class::Cerebellum as u8
        } else if old == Class::Cerebellum as u8 {
            if l <= -half_gap {
                Class::Left as u8
            } else if l >= half_gap {
                Class::Right as u8
            } else {
                Class::Background as u8
            }
        } else {
            old
        }
    });
}
