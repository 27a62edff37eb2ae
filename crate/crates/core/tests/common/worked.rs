//! The three-volume agreement example written out as report and reference files.

use std::path::Path;

use fetal_biometry::io::{write_json, write_reference, Inputs, ReferenceRow, ReportFile};
use fetal_biometry::phantom::{generate, PhantomSpec};
use fetal_biometry::pipeline::{run_pipeline, PipelineConfig};

pub const PREDICTED_CBD: [f64; 3] = [30.0, 32.0, 34.0];
pub const REFERENCE_CBD: [f64; 3] = [31.0, 32.0, 36.0];

/// A report of the default phantom, used as a template.
pub fn template_report() -> ReportFile {
    let p = generate(&PhantomSpec::default()).unwrap();
    let cfg = PipelineConfig::default();
    let r = run_pipeline(&p.volume, &p.labels, &p.probabilities, &cfg).unwrap();
    ReportFile::new(&r, "template", Inputs::default(), &cfg)
}

/// Writes `vol{i}.json` reports into `pred` and `reference.csv` next to it.
/// Every measurement of volume `i` carries `predicted[i]`; the reference holds
/// `reference[i]` for all three kinds and the template's slices.
pub fn write_example(
    template: &ReportFile,
    pred: &Path,
    reference_csv: &Path,
    predicted: &[f64],
    reference: &[f64],
) {
    std::fs::create_dir_all(pred).unwrap();
    let mut rows = Vec::new();
    for (i, (&p, &r)) in predicted.iter().zip(reference).enumerate() {
        let id = format!("vol{i}");
        let mut report = template.clone();
        report.volume_id = id.clone();
        for m in &mut report.measurements {
            m.value_mm = p;
        }
        write_json(&pred.join(format!("{id}.json")), &report).unwrap();
        rows.push(ReferenceRow {
            volume_id: id,
            cbd_mm: r,
            bbd_mm: r,
            tcd_mm: r,
            cbd_slice: template.selections.cbd_bbd.index,
            tcd_slice: template.selections.tcd.index,
        });
    }
    write_reference(reference_csv, &rows).unwrap();
}
