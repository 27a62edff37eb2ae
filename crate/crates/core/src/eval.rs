//! Agreement of predicted reports with a reference table.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_report, ReferenceRow, ReportFile, FORMAT_VERSION};
use crate::measure::MeasurementKind;
use crate::metrics::{bland_altman, slice_selection_accuracy, AgreementStats};

/// Agreement for one measurement kind. `stats` is absent with fewer than two
/// measured volumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindStats {
    pub stats: Option<AgreementStats>,
    /// Volumes whose report lacks this measurement.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceAccuracy {
    pub cbd_bbd: f64,
    pub tcd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub volume_id: String,
    /// Predicted minus reference, per measurement kind.
    pub differences_mm: BTreeMap<String, Option<f64>>,
    pub cbd_slice_accuracy: f64,
    pub tcd_slice_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    pub format_version: String,
    /// Standard deviation convention used for `ci95`.
    pub std_convention: String,
    pub n_volumes: usize,
    pub measurements: BTreeMap<String, KindStats>,
    pub slice_accuracy: SliceAccuracy,
    pub volumes: Vec<VolumeRow>,
}

/// Reads every report document in `dir`, sorted by file name. Other JSON
/// files are skipped.
pub fn load_reports(dir: &Path) -> Result<Vec<ReportFile>> {
    let io_err = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io_err)?
        .map(|e| e.map(|e| e.path()).map_err(io_err))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let value: serde_json::Value = crate::io::read_json(&p)?;
        if value.get("kind").and_then(|k| k.as_str()) == Some("report") {
            out.push(read_report(&p)?);
        }
    }
    Ok(out)
}

/// Pairs reports with reference rows by volume id. Every id must appear on
/// both sides.
pub fn run_eval(reports: &[ReportFile], reference: &[ReferenceRow]) -> Result<EvalStats> {
    let refs: BTreeMap<&str, &ReferenceRow> = reference.iter().map(|r| (r.volume_id.as_str(), r)).collect();
    let preds: BTreeMap<&str, &ReportFile> = reports.iter().map(|r| (r.volume_id.as_str(), r)).collect();
    if refs.len() != reference.len() || preds.len() != reports.len() {
        return Err(Error::InvalidInput("duplicate volume identifiers".into()));
    }
    let pred_ids: BTreeSet<&str> = preds.keys().copied().collect();
    let ref_ids: BTreeSet<&str> = refs.keys().copied().collect();
    let unmatched: Vec<String> = pred_ids
        .symmetric_difference(&ref_ids)
        .map(|s| s.to_string())
        .collect();
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedIds(unmatched));
    }
    if preds.is_empty() {
        return Err(Error::InvalidInput("no reports to evaluate".into()));
    }

    let reference_value = |r: &ReferenceRow, k: MeasurementKind| match k {
        MeasurementKind::Cbd => r.cbd_mm,
        MeasurementKind::Bbd => r.bbd_mm,
        MeasurementKind::Tcd => r.tcd_mm,
    };

    let mut volumes = Vec::new();
    let mut measurements = BTreeMap::new();
    let mut paired: BTreeMap<MeasurementKind, (Vec<f64>, Vec<f64>, Vec<String>)> = BTreeMap::new();
    for (&id, report) in &preds {
        let r = refs[id];
        let n = report.slice_count;
        let mut diffs = BTreeMap::new();
        for k in MeasurementKind::ALL {
            let entry = paired.entry(k).or_default();
            let value = report.measurement(k).map(|m| m.value_mm);
            match value {
                Some(v) => {
                    entry.0.push(v);
                    entry.1.push(reference_value(r, k));
                }
                None => entry.2.push(id.to_string()),
            }
            diffs.insert(k.name().to_string(), value.map(|v| v - reference_value(r, k)));
        }
        volumes.push(VolumeRow {
            volume_id: id.to_string(),
            differences_mm: diffs,
            cbd_slice_accuracy: slice_selection_accuracy(report.selections.cbd_bbd.index, r.cbd_slice, n)?,
            tcd_slice_accuracy: slice_selection_accuracy(report.selections.tcd.index, r.tcd_slice, n)?,
        });
    }
    for (k, (pred, truth, missing)) in paired {
        let stats = if pred.len() >= 2 { Some(bland_altman(&pred, &truth)?) } else { None };
        measurements.insert(k.name().to_string(), KindStats { stats, missing });
    }
    let nv = volumes.len() as f64;
    let slice_accuracy = SliceAccuracy {
        cbd_bbd: volumes.iter().map(|v| v.cbd_slice_accuracy).sum::<f64>() / nv,
        tcd: volumes.iter().map(|v| v.tcd_slice_accuracy).sum::<f64>() / nv,
    };
    Ok(EvalStats {
        format_version: FORMAT_VERSION.into(),
        std_convention: "population".into(),
        n_volumes: volumes.len(),
        measurements,
        slice_accuracy,
        volumes,
    })
}
