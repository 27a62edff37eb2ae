//! End-to-end measurement of one volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{voxel_to_mm, Line2D, Point2, RectMm, Spacing2};
use crate::imageops::keep_largest_label_components;
use crate::measure::{compute_bbd, compute_cbd, compute_tcd, Measurement, MeasurementKind};
use crate::msl::{msl_for_slice, propagate_orientation, slice_orientation, MslConfig, Orientation};
use crate::reliability::{
    check_bbd_stability, check_msl_smoothness, check_orientation_consistency, check_slice_confidence,
    check_tcd_angles, ReliabilityConfig, Warning, WarningCode,
};
use crate::roi::{prepare_slices, tight_bbox};
use crate::slice_select::{select_reference, ProbabilitySource, Selection, Task};
use crate::volume::{Class, LabelMap, LabelSlice, RoiBox, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub reliability: ReliabilityConfig,
    pub msl: MslConfig,
    /// Enlargement of the brain box for the square ROI window.
    pub roi_factor: f64,
    /// Side of the prepared slices handed to the probability source.
    pub roi_out: usize,
    /// Components kept per slice during label cleanup.
    pub keep_components: usize,
    pub bbd_tau_rel: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            reliability: ReliabilityConfig::default(),
            msl: MslConfig::default(),
            roi_factor: 1.5,
            roi_out: 224,
            keep_components: 3,
            bbd_tau_rel: 0.2,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.reliability.validate()?;
        if !(self.roi_factor > 0.0) || self.roi_out == 0 || self.keep_components == 0 {
            return Err(Error::InvalidInput(
                "roi_factor, roi_out and keep_components must be positive".into(),
            ));
        }
        if !(self.bbd_tau_rel > 0.0 && self.bbd_tau_rel <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "bbd_tau_rel must be in (0, 1], got {}",
                self.bbd_tau_rel
            )));
        }
        if self.msl.max_points_per_class == 0 {
            return Err(Error::InvalidInput("max_points_per_class must be positive".into()));
        }
        Ok(())
    }
}

/// A stage that failed without aborting the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

/// Line and orientation of one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    pub index: usize,
    pub line: Option<Line2D>,
    pub svm_converged: Option<bool>,
    pub svm_iterations: Option<u64>,
    pub orientation: Option<Orientation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub roi: RoiBox,
    pub spacing: Spacing2,
    pub cbd_selection: Selection,
    pub tcd_selection: Selection,
    pub cbd: Option<Measurement>,
    pub bbd: Option<Measurement>,
    pub tcd: Option<Measurement>,
    pub slices: Vec<SliceResult>,
    pub warnings: Vec<Warning>,
    pub errors: Vec<StageError>,
}

impl PipelineReport {
    pub fn measurement(&self, kind: MeasurementKind) -> Option<&Measurement> {
        match kind {
            MeasurementKind::Cbd => self.cbd.as_ref(),
            MeasurementKind::Bbd => self.bbd.as_ref(),
            MeasurementKind::Tcd => self.tcd.as_ref(),
        }
    }

    pub fn has_warning(&self, code: WarningCode) -> bool {
        self.warnings.iter().any(|w| w.code == code)
    }

    pub fn warning_codes(&self) -> Vec<WarningCode> {
        let mut codes: Vec<WarningCode> = self.warnings.iter().map(|w| w.code).collect();
        codes.sort();
        codes.dedup();
        codes
    }
}

/// Mixes a base seed with a slice index.
fn slice_seed(base: u64, z: usize) -> u64 {
    base ^ (z as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn window_rect_mm(x0: usize, y0: usize, width: usize, height: usize, sp: Spacing2) -> RectMm {
    RectMm {
        min: Point2::new(x0 as f64 * sp.sx, y0 as f64 * sp.sy),
        max: Point2::new((x0 + width - 1) as f64 * sp.sx, (y0 + height - 1) as f64 * sp.sy),
    }
}

struct Run {
    warnings: Vec<Warning>,
    errors: Vec<StageError>,
}

impl Run {
    fn fail(&mut self, stage: &str, e: &Error) {
        self.errors.push(StageError {
            stage: stage.into(),
            message: e.to_string(),
        });
    }

    fn warn(&mut self, w: Option<Warning>) {
        self.warnings.extend(w);
    }
}

/// Runs every stage on one volume.
///
/// Input problems (mismatched dimensions, bad probabilities, no brain, no
/// hemispheres on the CBD slice) abort with an error. Failures inside a
/// measurement stage leave that measurement absent and are listed in
/// `errors`.
pub fn run_pipeline(
    vol: &Volume,
    labels: &LabelMap,
    source: &dyn ProbabilitySource,
    cfg: &PipelineConfig,
) -> Result<PipelineReport> {
    cfg.validate()?;
    labels.check_aligned(vol)?;
    let nz = vol.dims().nz;
    let sp = vol.spacing().in_plane();

    let roi = tight_bbox(labels, &Class::BRAIN)?;
    let stack = prepare_slices(vol, &roi, cfg.roi_factor, cfg.roi_out)?;
    let pick = |task| -> Result<Selection> {
        let probs = source.probabilities(&stack, task)?;
        if probs.len() != nz {
            return Err(Error::LengthMismatch(probs.len(), nz));
        }
        select_reference(&probs)
    };
    let cbd_sel = pick(Task::CbdBbd)?;
    let tcd_sel = pick(Task::Tcd)?;

    let cleaned: Vec<LabelSlice> = (0..nz)
        .map(|z| keep_largest_label_components(&labels.slice(z), cfg.keep_components))
        .collect();
    let cbd_slice = &cleaned[cbd_sel.index];
    if !cbd_slice.contains(Class::Left) && !cbd_slice.contains(Class::Right) {
        return Err(Error::MissingStructure(format!(
            "both hemispheres on slice {}",
            cbd_sel.index
        )));
    }

    let mut run = Run {
        warnings: Vec::new(),
        errors: Vec::new(),
    };
    run.warn(check_slice_confidence(&cbd_sel, Task::CbdBbd, &cfg.reliability));
    run.warn(check_slice_confidence(&tcd_sel, Task::Tcd, &cfg.reliability));

    // mid-sagittal lines
    let mut slices: Vec<SliceResult> = (0..nz)
        .map(|index| SliceResult {
            index,
            line: None,
            svm_converged: None,
            svm_iterations: None,
            orientation: None,
        })
        .collect();
    let mut unconverged = Vec::new();
    for (z, slice) in cleaned.iter().enumerate() {
        if !(slice.contains(Class::Left) && slice.contains(Class::Right)) {
            continue;
        }
        let mut mcfg = cfg.msl;
        mcfg.svm.seed = slice_seed(cfg.msl.svm.seed, z);
        match msl_for_slice(slice, sp, &mcfg) {
            Ok(m) => {
                slices[z].line = Some(m.line);
                slices[z].svm_converged = Some(m.svm.converged);
                slices[z].svm_iterations = Some(m.svm.iterations);
                if !m.svm.converged {
                    unconverged.push(z);
                }
            }
            Err(e) => run.fail(&format!("msl slice {z}"), &e),
        }
    }
    if !unconverged.is_empty() {
        run.warn(Some(Warning::new(
            WarningCode::MslRough,
            format!("line fit did not converge on slices {unconverged:?}"),
        )));
    }
    let adjacent: Vec<(usize, f64)> = slices
        .iter()
        .filter_map(|s| s.line.map(|l| (s.index, l.angle_deg())))
        .collect();
    for pair in adjacent.windows(2).filter(|w| w[1].0 == w[0].0 + 1) {
        if let Some(w) = check_msl_smoothness(pair, &cfg.reliability) {
            run.warn(Some(w));
        }
    }

    // orientation
    let roi_rect = roi.in_plane_rect_mm(sp);
    let lines: Vec<Option<Line2D>> = slices.iter().map(|s| s.line).collect();
    let mut known: Vec<Option<Orientation>> = vec![None; nz];
    for (z, slice) in cleaned.iter().enumerate() {
        let Some(line) = &lines[z] else { continue };
        let cerebellum: Vec<Point2> = slice
            .pixels_of(Class::Cerebellum)
            .into_iter()
            .map(|p| voxel_to_mm(p, sp))
            .collect();
        if cerebellum.is_empty() {
            continue;
        }
        let seed = slice_seed(cfg.reliability.seed, z);
        match slice_orientation(line, &roi_rect, &cerebellum, cfg.reliability.orientation_samples, seed) {
            Ok(o) => known[z] = Some(o),
            Err(e) => run.fail(&format!("orientation slice {z}"), &e),
        }
    }
    run.warn(check_orientation_consistency(&known));
    match propagate_orientation(&lines, &known, &roi_rect) {
        Ok(all) => {
            for (s, o) in slices.iter_mut().zip(all) {
                s.orientation = o;
            }
        }
        Err(e) => run.fail("orientation", &e),
    }

    // CBD and BBD
    let z = cbd_sel.index;
    let cbd = match (&slices[z].line, &slices[z].orientation) {
        (Some(line), Some(o)) => compute_cbd(&cleaned[z], z, sp, line, o.superior_dir())
            .map_err(|e| run.fail("cbd", &e))
            .ok(),
        (None, _) => {
            run.fail("cbd", &Error::MissingStructure(format!("mid-sagittal line on slice {z}")));
            None
        }
        (_, None) => {
            run.fail("cbd", &Error::MissingStructure(format!("orientation on slice {z}")));
            None
        }
    };
    let mut bbd = None;
    if let Some(cbd) = &cbd {
        let w = stack.window;
        let limit = window_rect_mm(w.x0, w.y0, w.width, w.height, sp);
        let img = vol.slice(z);
        let result = compute_bbd(&img, sp, cbd, Some(&limit), cfg.bbd_tau_rel);
        run.warn(check_bbd_stability(
            &img,
            sp,
            cbd,
            result.as_ref(),
            Some(&limit),
            cfg.bbd_tau_rel,
            &cfg.reliability,
        ));
        match result {
            Ok(m) => bbd = Some(m),
            Err(e) => run.fail("bbd", &e),
        }
    } else {
        run.fail("bbd", &Error::MissingStructure("CBD measurement".into()));
    }

    // TCD
    let z = tcd_sel.index;
    let tcd = match compute_tcd(&cleaned[z].mask_of(&[Class::Cerebellum]), z, sp) {
        Ok(m) => {
            run.warn(check_tcd_angles(&m, &cfg.reliability));
            Some(m)
        }
        Err(e) => {
            run.fail("tcd", &e);
            None
        }
    };

    Ok(PipelineReport {
        roi,
        spacing: sp,
        cbd_selection: cbd_sel,
        tcd_selection: tcd_sel,
        cbd,
        bbd,
        tcd,
        slices,
        warnings: run.warnings,
        errors: run.errors,
    })
}
