//! Reference slice selection over pluggable per-slice probability sources.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roi::PreparedStack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Task {
    CbdBbd,
    Tcd,
}

impl Task {
    pub fn key(self) -> &'static str {
        match self {
            Task::CbdBbd => "cbd_bbd",
            Task::Tcd => "tcd",
        }
    }
}

/// One probability in `[0, 1]` per slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceProbabilities {
    pub task: Task,
    pub values: Vec<f64>,
}

impl SliceProbabilities {
    pub fn new(task: Task, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!(
                "{} probability {bad} outside [0, 1]",
                task.key()
            )));
        }
        Ok(Self { task, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    pub probability: f64,
}

/// Argmax slice; ties go to the lowest index.
pub fn select_reference(probs: &SliceProbabilities) -> Result<Selection> {
    let mut best: Option<Selection> = None;
    for (index, &probability) in probs.values.iter().enumerate() {
        if best.is_none_or(|b| probability > b.probability) {
            best = Some(Selection { index, probability });
        }
    }
    best.ok_or(Error::EmptyProbabilities)
}

/// Produces per-slice reference probabilities for a prepared ROI stack.
pub trait ProbabilitySource: Send + Sync {
    fn probabilities(&self, stack: &PreparedStack, task: Task) -> Result<SliceProbabilities>;
}

/// Precomputed probabilities, e.g. read from a sidecar file.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedProbabilities {
    pub cbd_bbd: SliceProbabilities,
    pub tcd: SliceProbabilities,
}

impl ProbabilitySource for FixedProbabilities {
    fn probabilities(&self, stack: &PreparedStack, task: Task) -> Result<SliceProbabilities> {
        let probs = match task {
            Task::CbdBbd => &self.cbd_bbd,
            Task::Tcd => &self.tcd,
        };
        if probs.len() != stack.slices.len() {
            return Err(Error::LengthMismatch(probs.len(), stack.slices.len()));
        }
        Ok(probs.clone())
    }
}

/// Unimodal profile peaked at known truth slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhantomProfile {
    pub peak: usize,
    /// Half-width of the triangular profile in slices.
    pub half_width: f64,
    /// Uniform noise amplitude.
    pub noise: f64,
    /// Multiplier on the noiseless profile (1.0 = peak probability 1).
    pub peak_scale: f64,
    pub seed: u64,
}

impl PhantomProfile {
    pub fn new(peak: usize, noise: f64, seed: u64) -> Self {
        Self {
            peak,
            half_width: 3.0,
            noise,
            peak_scale: 1.0,
            seed,
        }
    }

    /// `peak_scale * max(0, 1 - |i - peak| / half_width) + U(-noise, noise)`,
    /// clamped into `[0, 1]`.
    pub fn values(&self, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..n)
            .map(|i| {
                let base = (1.0 - (i as f64 - self.peak as f64).abs() / self.half_width).max(0.0);
                let jitter = if self.noise > 0.0 {
                    rng.random_range(-self.noise..=self.noise)
                } else {
                    0.0
                };
                (self.peak_scale * base + jitter).clamp(0.0, 1.0)
            })
            .collect()
    }
}

/// Probability source for synthetic volumes with known reference slices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhantomSource {
    pub cbd_bbd: PhantomProfile,
    pub tcd: PhantomProfile,
}

impl ProbabilitySource for PhantomSource {
    fn probabilities(&self, stack: &PreparedStack, task: Task) -> Result<SliceProbabilities> {
        let profile = match task {
            Task::CbdBbd => &self.cbd_bbd,
            Task::Tcd => &self.tcd,
        };
        SliceProbabilities::new(task, profile.values(stack.slices.len()))
    }
}
