//! Self-assessment checks that flag measurements which may be unreliable.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_diff_deg, RectMm, Spacing2};
use crate::imageops::{clahe, normalize01, ClaheParams, Image2D};
use crate::measure::{compute_bbd, Aux, Measurement};
use crate::msl::{Orientation, OrientationSource};
use crate::slice_select::{Selection, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WarningCode {
    SliceConfCbd,
    SliceConfTcd,
    OrientInconsistent,
    MslRough,
    BbdUnstable,
    TcdAngles,
}

impl WarningCode {
    pub const ALL: [WarningCode; 6] = [
        WarningCode::SliceConfCbd,
        WarningCode::SliceConfTcd,
        WarningCode::OrientInconsistent,
        WarningCode::MslRough,
        WarningCode::BbdUnstable,
        WarningCode::TcdAngles,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::SliceConfCbd => "SLICE_CONF_CBD",
            WarningCode::SliceConfTcd => "SLICE_CONF_TCD",
            WarningCode::OrientInconsistent => "ORIENT_INCONSISTENT",
            WarningCode::MslRough => "MSL_ROUGH",
            WarningCode::BbdUnstable => "BBD_UNSTABLE",
            WarningCode::TcdAngles => "TCD_ANGLES",
        }
    }
}

impl fmt::Display for WarningCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: WarningCode,
    pub detail: String,
}

impl Warning {
    pub fn new(code: WarningCode, detail: impl Into<String>) -> Self {
        Self {
            code,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReliabilityConfig {
    pub slice_prob_threshold: f64,
    pub orientation_samples: usize,
    pub msl_adjacent_angle_deg: f64,
    pub bbd_clahe_diff_mm: f64,
    pub tcd_angle_deg: f64,
    pub clahe: ClaheParams,
    pub seed: u64,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        Self {
            slice_prob_threshold: 0.5,
            orientation_samples: 5,
            msl_adjacent_angle_deg: 10.0,
            bbd_clahe_diff_mm: 2.0,
            tcd_angle_deg: 10.0,
            clahe: ClaheParams::default(),
            seed: 0,
        }
    }
}

impl ReliabilityConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("slice_prob_threshold", self.slice_prob_threshold),
            ("msl_adjacent_angle_deg", self.msl_adjacent_angle_deg),
            ("bbd_clahe_diff_mm", self.bbd_clahe_diff_mm),
            ("tcd_angle_deg", self.tcd_angle_deg),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
        if self.orientation_samples < 2 {
            return Err(Error::InvalidInput("orientation_samples must be at least 2".into()));
        }
        let c = self.clahe;
        if c.tile_h == 0 || c.tile_w == 0 || !(c.clip > 0.0 && c.clip <= 1.0) {
            return Err(Error::InvalidInput(format!("invalid CLAHE parameters {c:?}")));
        }
        Ok(())
    }
}

/// Warns when the selected reference slice has low probability.
pub fn check_slice_confidence(sel: &Selection, task: Task, cfg: &ReliabilityConfig) -> Option<Warning> {
    if sel.probability >= cfg.slice_prob_threshold {
        return None;
    }
    let code = match task {
        Task::CbdBbd => WarningCode::SliceConfCbd,
        Task::Tcd => WarningCode::SliceConfTcd,
    };
    Some(Warning::new(
        code,
        format!(
            "slice {} selected with probability {:.3} < {}",
            sel.index, sel.probability, cfg.slice_prob_threshold
        ),
    ))
}

/// Warns when the cerebellum samples of any slice disagree on the side.
pub fn check_orientation_consistency(orientations: &[Option<Orientation>]) -> Option<Warning> {
    let bad: Vec<usize> = orientations
        .iter()
        .enumerate()
        .filter_map(|(z, o)| o.as_ref().map(|o| (z, o)))
        .filter(|(_, o)| o.source == OrientationSource::Cerebellum && !o.consistent)
        .map(|(z, _)| z)
        .collect();
    (!bad.is_empty()).then(|| {
        Warning::new(
            WarningCode::OrientInconsistent,
            format!("cerebellum samples disagree on slices {bad:?}"),
        )
    })
}

/// Warns when the line angle jumps between neighbouring slices that both
/// have a line. `angles` holds `(slice, angle in degrees)` in slice order.
pub fn check_msl_smoothness(angles: &[(usize, f64)], cfg: &ReliabilityConfig) -> Option<Warning> {
    let jumps: Vec<String> = angles
        .windows(2)
        .filter_map(|w| {
            let diff = angle_diff_deg(w[0].1, w[1].1);
            (diff > cfg.msl_adjacent_angle_deg)
                .then(|| format!("{}->{}: {diff:.1} deg", w[0].0, w[1].0))
        })
        .collect();
    (!jumps.is_empty()).then(|| {
        Warning::new(
            WarningCode::MslRough,
            format!(
                "adjacent line angles differ by more than {} deg ({})",
                cfg.msl_adjacent_angle_deg,
                jumps.join(", ")
            ),
        )
    })
}

/// Recomputes BBD on the contrast-enhanced slice and warns when the two
/// results disagree or either one fails.
pub fn check_bbd_stability(
    img: &Image2D,
    spacing: Spacing2,
    cbd: &Measurement,
    original: std::result::Result<&Measurement, &Error>,
    limit: Option<&RectMm>,
    tau_rel: f64,
    cfg: &ReliabilityConfig,
) -> Option<Warning> {
    let enhanced = clahe(&normalize01(img), cfg.clahe);
    let redo = compute_bbd(&enhanced, spacing, cbd, limit, tau_rel);
    let detail = match (original, &redo) {
        (Ok(a), Ok(b)) => {
            let diff = (a.value_mm - b.value_mm).abs();
            if diff <= cfg.bbd_clahe_diff_mm {
                return None;
            }
            format!(
                "BBD {:.2} mm vs {:.2} mm after CLAHE (difference {diff:.2} > {})",
                a.value_mm, b.value_mm, cfg.bbd_clahe_diff_mm
            )
        }
        (Err(e), _) => format!("BBD failed on the original slice: {e}"),
        (Ok(_), Err(e)) => format!("BBD failed on the CLAHE slice: {e}"),
    };
    Some(Warning::new(WarningCode::BbdUnstable, detail))
}

/// Warns when the hull diameter and the bounding-box long axis disagree.
pub fn check_tcd_angles(tcd: &Measurement, cfg: &ReliabilityConfig) -> Option<Warning> {
    let Aux::Tcd {
        hull_angle_deg,
        rect_angle_deg,
    } = tcd.aux
    else {
        return None;
    };
    let diff = angle_diff_deg(hull_angle_deg, rect_angle_deg);
    (diff > cfg.tcd_angle_deg).then(|| {
        Warning::new(
            WarningCode::TcdAngles,
            format!(
                "hull diameter at {hull_angle_deg:.1} deg vs box axis at {rect_angle_deg:.1} deg"
            ),
        )
    })
}
