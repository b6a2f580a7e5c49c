//! Pose corpus construction, k-means++ clustering, and the cluster-balanced
//! batch sampler that feeds mapper training.

mod cluster;
mod ingest;
mod sample;
mod synth;

pub use cluster::{kmeans_points, kmeans_pp, ClusterIndex, KmeansFit};
pub use ingest::{export_csv, ingest_csv, IngestMode, IngestReport};
pub use sample::{
    balanced_sample, balanced_sample_from_members, balanced_sample_indices,
    balanced_sample_with_rng,
};
pub use synth::{synth_corpus, synth_corpus_with_joints};

use grove_env::PoseVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceTag {
    Synthetic,
    Csv,
    Rollout,
}

/// A flat pose corpus. All poses share one joint count and every angle is a
/// finite value in [-pi, pi].
#[derive(Clone, Debug)]
pub struct PoseDataset {
    pub num_joints: usize,
    pub poses: Vec<PoseVector>,
    pub tags: Vec<SourceTag>,
    /// Per-pose oracle embeddings, filled lazily by training code.
    pub oracle_targets: Option<Vec<Vec<f64>>>,
}

impl PoseDataset {
    pub fn new(num_joints: usize) -> Self {
        PoseDataset {
            num_joints,
            poses: Vec::new(),
            tags: Vec::new(),
            oracle_targets: None,
        }
    }

    pub fn push(&mut self, pose: PoseVector, tag: SourceTag) -> Result<(), DataError> {
        if pose.num_joints() != self.num_joints {
            return Err(DataError::PoseShape {
                expected: self.num_joints,
                got: pose.num_joints(),
            });
        }
        pose.validate().map_err(|e| DataError::BadPose(e.to_string()))?;
        self.poses.push(pose);
        self.tags.push(tag);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Row-major n x 3J matrix of flattened angles.
    pub fn flat_matrix(&self) -> Vec<Vec<f64>> {
        self.poses.iter().map(|p| p.flat()).collect()
    }

    /// Keeps every `stride`-th pose (indices 0, stride, 2*stride, ...).
    pub fn subsample(&self, stride: usize) -> PoseDataset {
        assert!(stride >= 1, "subsample stride must be at least 1");
        let mut out = PoseDataset::new(self.num_joints);
        for i in (0..self.len()).step_by(stride) {
            out.poses.push(self.poses[i].clone());
            out.tags.push(self.tags[i]);
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header mismatch: expected column {expected} at position {position}, found {got}")]
    HeaderMismatch {
        position: usize,
        expected: String,
        got: String,
    },
    #[error("header has {got} columns, expected {expected}")]
    MissingColumns { expected: usize, got: usize },
    #[error("line {line}: non-numeric value {value:?} in column {column}")]
    NonNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: angle {value} in column {column} outside [-pi, pi]")]
    AngleRange { line: u64, column: String, value: f64 },
    #[error("line {line}: row has {got} fields, expected {expected}")]
    RowWidth { line: u64, expected: usize, got: usize },
    #[error("pose has {got} joints, dataset expects {expected}")]
    PoseShape { expected: usize, got: usize },
    #[error("invalid pose: {0}")]
    BadPose(String),
    #[error("dataset has {n} poses but k = {k}; clustering needs n >= k")]
    TooFewPoses { n: usize, k: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("cluster index file is not valid: {0}")]
    BadIndexFile(String),
}
