//! File formats: volume and label headers with raw data, slice
//! probabilities, reports, reference tables and phantom bundles.
//!
//! Headers and documents are JSON and carry `format_version` "1". Raw data is
//! little-endian, x-fastest, z-slowest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{mm_to_voxel, Line2D, Point2, Spacing2};
use crate::measure::{Aux, Measurement, MeasurementKind};
use crate::msl::Orientation;
use crate::phantom::{Phantom, PhantomTruth};
use crate::pipeline::{PipelineConfig, PipelineReport, StageError};
use crate::reliability::Warning;
use crate::slice_select::{FixedProbabilities, Selection, SliceProbabilities, Task};
use crate::volume::{Class, Dims, LabelMap, RoiBox, Spacing3, Volume};

pub const FORMAT_VERSION: &str = "1";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn check_version(found: &str, path: &Path) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "{}: format_version {found:?}, expected {FORMAT_VERSION:?}",
            path.display()
        )));
    }
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    U8,
    U16,
    F32,
}

impl DType {
    fn size(self) -> usize {
        match self {
            DType::U8 => 1,
            DType::U16 => 2,
            DType::F32 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeaderKind {
    Volume,
    Labels,
}

/// Header of a raw volume or label file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawHeader {
    pub format_version: String,
    pub kind: HeaderKind,
    pub dims: [usize; 3],
    pub spacing_mm: [f64; 3],
    pub dtype: DType,
    pub byte_order: String,
    pub order: String,
    /// Data file path, relative to the header's directory.
    pub data_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legend: Option<BTreeMap<String, String>>,
}

impl RawHeader {
    fn new(kind: HeaderKind, dims: Dims, spacing: Spacing3, dtype: DType, data_file: String) -> Self {
        let legend = (kind == HeaderKind::Labels).then(|| {
            Class::ALL
                .iter()
                .map(|&c| ((c as u8).to_string(), c.name().to_string()))
                .collect()
        });
        Self {
            format_version: FORMAT_VERSION.into(),
            kind,
            dims: [dims.nx, dims.ny, dims.nz],
            spacing_mm: [spacing.sx, spacing.sy, spacing.sz],
            dtype,
            byte_order: "little".into(),
            order: "x-fastest".into(),
            data_file,
            legend,
        }
    }

    fn validate(&self, path: &Path, kind: HeaderKind) -> Result<(Dims, Spacing3)> {
        check_version(&self.format_version, path)?;
        let fail = |msg: String| Err(Error::Format(format!("{}: {msg}", path.display())));
        if self.kind != kind {
            return fail(format!("expected a {kind:?} header, found {:?}", self.kind));
        }
        if self.byte_order != "little" {
            return fail(format!("unsupported byte order {:?}", self.byte_order));
        }
        if self.order != "x-fastest" {
            return fail(format!("unsupported voxel order {:?}", self.order));
        }
        let allowed = match kind {
            HeaderKind::Volume => matches!(self.dtype, DType::U16 | DType::F32),
            HeaderKind::Labels => self.dtype == DType::U8,
        };
        if !allowed {
            return fail(format!("dtype {:?} not allowed for {kind:?}", self.dtype));
        }
        let [nx, ny, nz] = self.dims;
        let [sx, sy, sz] = self.spacing_mm;
        Ok((Dims::new(nx, ny, nz)?, Spacing3::new(sx, sy, sz)?))
    }
}

fn read_raw(header_path: &Path, kind: HeaderKind) -> Result<(RawHeader, Dims, Spacing3, Vec<u8>)> {
    let header: RawHeader = read_json(header_path)?;
    let (dims, spacing) = header.validate(header_path, kind)?;
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let data_path = dir.join(&header.data_file);
    let bytes = fs::read(&data_path).map_err(io_err(&data_path))?;
    let expected = dims.len() * header.dtype.size();
    if bytes.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{}: {} bytes, expected {expected} for dims {:?} and dtype {:?}",
            data_path.display(),
            bytes.len(),
            header.dims,
            header.dtype
        )));
    }
    Ok((header, dims, spacing, bytes))
}

/// Data file name placed next to a header: `x.json` -> `x.raw`.
fn data_name(header_path: &Path) -> Result<String> {
    header_path
        .with_extension("raw")
        .file_name()
        .and_then(|n| n.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::InvalidInput(format!("bad header path {}", header_path.display())))
}

fn write_raw(header_path: &Path, header: &RawHeader, bytes: &[u8]) -> Result<()> {
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let data_path = dir.join(&header.data_file);
    fs::write(&data_path, bytes).map_err(io_err(&data_path))?;
    write_json(header_path, header)
}

pub fn read_volume(header_path: &Path) -> Result<Volume> {
    let (header, dims, spacing, bytes) = read_raw(header_path, HeaderKind::Volume)?;
    let voxels: Vec<f32> = match header.dtype {
        DType::U16 => bytes
            .chunks_exact(2)
            .map(|c| f32::from(u16::from_le_bytes([c[0], c[1]])))
            .collect(),
        DType::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
        DType::U8 => unreachable!("rejected by validate"),
    };
    Volume::new(dims, spacing, voxels)
}

/// Writes `vol` as `dtype` (u16 rounds and saturates) next to `header_path`.
pub fn write_volume(header_path: &Path, vol: &Volume, dtype: DType) -> Result<()> {
    let bytes: Vec<u8> = match dtype {
        DType::F32 => vol.voxels().iter().flat_map(|v| v.to_le_bytes()).collect(),
        DType::U16 => vol
            .voxels()
            .iter()
            .flat_map(|v| (v.round().clamp(0.0, f32::from(u16::MAX)) as u16).to_le_bytes())
            .collect(),
        DType::U8 => return Err(Error::Format("volumes are stored as u16 or f32".into())),
    };
    let header = RawHeader::new(HeaderKind::Volume, vol.dims(), vol.spacing(), dtype, data_name(header_path)?);
    write_raw(header_path, &header, &bytes)
}

pub fn read_labels(header_path: &Path) -> Result<LabelMap> {
    let (_, dims, spacing, bytes) = read_raw(header_path, HeaderKind::Labels)?;
    LabelMap::new(dims, spacing, bytes)
}

pub fn write_labels(header_path: &Path, labels: &LabelMap) -> Result<()> {
    let header = RawHeader::new(
        HeaderKind::Labels,
        labels.dims(),
        labels.spacing(),
        DType::U8,
        data_name(header_path)?,
    );
    write_raw(header_path, &header, labels.labels())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProbabilityFile {
    format_version: String,
    cbd_bbd: Vec<f64>,
    tcd: Vec<f64>,
}

pub fn read_probabilities(path: &Path) -> Result<FixedProbabilities> {
    let f: ProbabilityFile = read_json(path)?;
    check_version(&f.format_version, path)?;
    if f.cbd_bbd.len() != f.tcd.len() {
        return Err(Error::LengthMismatch(f.cbd_bbd.len(), f.tcd.len()));
    }
    Ok(FixedProbabilities {
        cbd_bbd: SliceProbabilities::new(Task::CbdBbd, f.cbd_bbd)?,
        tcd: SliceProbabilities::new(Task::Tcd, f.tcd)?,
    })
}

pub fn write_probabilities(path: &Path, probs: &FixedProbabilities) -> Result<()> {
    write_json(
        path,
        &ProbabilityFile {
            format_version: FORMAT_VERSION.into(),
            cbd_bbd: probs.cbd_bbd.values.clone(),
            tcd: probs.tcd.values.clone(),
        },
    )
}

/// A measurement with endpoints in both slice millimetres and voxels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub kind: MeasurementKind,
    pub slice_index: usize,
    pub value_mm: f64,
    pub endpoint_a_mm: Point2,
    pub endpoint_b_mm: Point2,
    pub endpoint_a_voxel: Point2,
    pub endpoint_b_voxel: Point2,
    pub aux: Aux,
}

impl MeasurementRecord {
    fn new(m: &Measurement, spacing: Spacing2) -> Self {
        Self {
            kind: m.kind,
            slice_index: m.slice_index,
            value_mm: m.value_mm,
            endpoint_a_mm: m.endpoint_a,
            endpoint_b_mm: m.endpoint_b,
            endpoint_a_voxel: mm_to_voxel(m.endpoint_a, spacing),
            endpoint_b_voxel: mm_to_voxel(m.endpoint_b, spacing),
            aux: m.aux.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRecord {
    pub index: usize,
    /// `a x + b y + c = 0` in slice millimetres.
    pub line: Option<Line2D>,
    pub angle_deg: Option<f64>,
    pub svm_converged: Option<bool>,
    pub svm_iterations: Option<u64>,
    pub orientation: Option<Orientation>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub volume: Option<String>,
    pub labels: Option<String>,
    pub probabilities: Option<String>,
    pub config: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selections {
    pub cbd_bbd: Selection,
    pub tcd: Selection,
}

/// The report document written by `measure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format_version: String,
    pub kind: String,
    pub volume_id: String,
    pub slice_count: usize,
    pub inputs: Inputs,
    pub roi: RoiBox,
    pub spacing_mm: Spacing2,
    pub selections: Selections,
    pub measurements: Vec<MeasurementRecord>,
    pub slices: Vec<SliceRecord>,
    pub warnings: Vec<Warning>,
    pub errors: Vec<StageError>,
    pub config: PipelineConfig,
}

impl ReportFile {
    pub fn new(report: &PipelineReport, volume_id: &str, inputs: Inputs, config: &PipelineConfig) -> Self {
        let sp = report.spacing;
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: "report".into(),
            volume_id: volume_id.into(),
            slice_count: report.slices.len(),
            inputs,
            roi: report.roi,
            spacing_mm: sp,
            selections: Selections {
                cbd_bbd: report.cbd_selection,
                tcd: report.tcd_selection,
            },
            measurements: MeasurementKind::ALL
                .iter()
                .filter_map(|&k| report.measurement(k))
                .map(|m| MeasurementRecord::new(m, sp))
                .collect(),
            slices: report
                .slices
                .iter()
                .map(|s| SliceRecord {
                    index: s.index,
                    line: s.line,
                    angle_deg: s.line.map(|l| l.angle_deg()),
                    svm_converged: s.svm_converged,
                    svm_iterations: s.svm_iterations,
                    orientation: s.orientation.clone(),
                })
                .collect(),
            warnings: report.warnings.clone(),
            errors: report.errors.clone(),
            config: *config,
        }
    }

    pub fn measurement(&self, kind: MeasurementKind) -> Option<&MeasurementRecord> {
        self.measurements.iter().find(|m| m.kind == kind)
    }
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let r: ReportFile = read_json(path)?;
    check_version(&r.format_version, path)?;
    if r.kind != "report" {
        return Err(Error::Format(format!("{}: not a report", path.display())));
    }
    Ok(r)
}

/// One row of the reference table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub volume_id: String,
    pub cbd_mm: f64,
    pub bbd_mm: f64,
    pub tcd_mm: f64,
    pub cbd_slice: usize,
    pub tcd_slice: usize,
}

pub fn read_reference(path: &Path) -> Result<Vec<ReferenceRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn write_reference(path: &Path, rows: &[ReferenceRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        writer.serialize(row).map_err(csv_err)?;
    }
    writer.flush().map_err(io_err(path))
}

#[derive(Serialize)]
struct TruthFile<'a> {
    format_version: &'a str,
    volume_id: &'a str,
    #[serde(flatten)]
    truth: &'a PhantomTruth,
}

/// Paths written for one phantom.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomFiles {
    pub volume: PathBuf,
    pub labels: PathBuf,
    pub probabilities: PathBuf,
    pub truth: PathBuf,
    pub reference: PathBuf,
}

/// Writes `<id>_volume`, `<id>_labels`, `<id>_probs`, `<id>_truth` and
/// `<id>_reference.csv` into `dir`.
pub fn write_phantom(dir: &Path, id: &str, phantom: &Phantom) -> Result<PhantomFiles> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = PhantomFiles {
        volume: dir.join(format!("{id}_volume.json")),
        labels: dir.join(format!("{id}_labels.json")),
        probabilities: dir.join(format!("{id}_probs.json")),
        truth: dir.join(format!("{id}_truth.json")),
        reference: dir.join(format!("{id}_reference.csv")),
    };
    write_volume(&files.volume, &phantom.volume, DType::F32)?;
    write_labels(&files.labels, &phantom.labels)?;
    write_probabilities(&files.probabilities, &phantom.probabilities)?;
    let t = &phantom.truth;
    write_json(
        &files.truth,
        &TruthFile {
            format_version: FORMAT_VERSION,
            volume_id: id,
            truth: t,
        },
    )?;
    write_reference(
        &files.reference,
        &[ReferenceRow {
            volume_id: id.into(),
            cbd_mm: t.cbd_mm,
            bbd_mm: t.bbd_mm,
            tcd_mm: t.tcd_mm,
            cbd_slice: t.cbd_slice,
            tcd_slice: t.tcd_slice,
        }],
    )?;
    Ok(files)
}
