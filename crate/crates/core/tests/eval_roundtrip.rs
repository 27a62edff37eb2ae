mod common;

use common::worked::{template_report, write_example, PREDICTED_CBD, REFERENCE_CBD};
use fetal_biometry::eval::{load_reports, run_eval, EvalStats};
use fetal_biometry::io::{read_json, read_reference, write_json};
use fetal_biometry::Error;

#[test]
fn worked_example_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, csv) = (dir.path().join("pred"), dir.path().join("reference.csv"));
    write_example(&template_report(), &pred, &csv, &PREDICTED_CBD, &REFERENCE_CBD);
    // a stray non-report JSON file is skipped
    write_json(&pred.join("notes.json"), &serde_json::json!({"kind": "other"})).unwrap();

    let stats = run_eval(&load_reports(&pred).unwrap(), &read_reference(&csv).unwrap()).unwrap();
    let out = dir.path().join("stats.json");
    write_json(&out, &stats).unwrap();
    let back: EvalStats = read_json(&out).unwrap();
    assert_eq!(back, stats);

    assert_eq!(stats.n_volumes, 3);
    for kind in ["CBD", "BBD", "TCD"] {
        let s = stats.measurements[kind].stats.as_ref().unwrap();
        assert!((s.bias + 1.0).abs() <= 1e-9, "{kind}: {}", s.bias);
        assert!((s.ci95 - 1.96 * (2.0f64 / 3.0).sqrt()).abs() <= 1e-9);
        assert!((s.ci95 - 1.6003).abs() <= 1e-4);
        assert!((s.mean_abs_diff - 1.0).abs() <= 1e-9);
        assert!(stats.measurements[kind].missing.is_empty());
    }
    assert_eq!(stats.slice_accuracy.cbd_bbd, 1.0);
    assert_eq!(stats.slice_accuracy.tcd, 1.0);
    let diffs: Vec<f64> = stats.volumes.iter().map(|v| v.differences_mm["CBD"].unwrap()).collect();
    assert_eq!(diffs, vec![-1.0, 0.0, -2.0]);
}

#[test]
fn identical_values_give_zero_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, csv) = (dir.path().join("pred"), dir.path().join("reference.csv"));
    let values = [41.5, 38.25, 44.0, 39.0];
    write_example(&template_report(), &pred, &csv, &values, &values);
    let stats = run_eval(&load_reports(&pred).unwrap(), &read_reference(&csv).unwrap()).unwrap();
    for ks in stats.measurements.values() {
        let s = ks.stats.as_ref().unwrap();
        assert_eq!((s.bias, s.ci95, s.mean_abs_diff, s.n), (0.0, 0.0, 0.0, 4));
    }
}

#[test]
fn unmatched_ids_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, csv) = (dir.path().join("pred"), dir.path().join("reference.csv"));
    write_example(&template_report(), &pred, &csv, &PREDICTED_CBD, &REFERENCE_CBD);
    std::fs::remove_file(pred.join("vol1.json")).unwrap();
    let err = run_eval(&load_reports(&pred).unwrap(), &read_reference(&csv).unwrap()).unwrap_err();
    match err {
        Error::UnmatchedIds(ids) => assert_eq!(ids, vec!["vol1".to_string()]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn slice_offsets_lower_accuracy() {
    let template = template_report();
    let dir = tempfile::tempdir().unwrap();
    let (pred, csv) = (dir.path().join("pred"), dir.path().join("reference.csv"));
    write_example(&template, &pred, &csv, &[1.0, 2.0], &[1.0, 2.0]);
    let mut rows = read_reference(&csv).unwrap();
    rows[0].cbd_slice += 2;
    let stats = run_eval(&load_reports(&pred).unwrap(), &rows).unwrap();
    let n = template.slice_count as f64;
    assert!((stats.volumes[0].cbd_slice_accuracy - (1.0 - 2.0 / n)).abs() <= 1e-12);
    assert!((stats.slice_accuracy.cbd_bbd - (1.0 - 1.0 / n)).abs() <= 1e-12);
}
