use crate::EvalError;

/// Similarity scores laid out rows = poses or runs, cols = instructions.
/// Rectangular and finite by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    entries: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<SimilarityMatrix, EvalError> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(EvalError::EmptyMatrix);
        }
        let cols = entries[0].len();
        for (row, r) in entries.iter().enumerate() {
            if r.len() != cols {
                return Err(EvalError::RaggedMatrix {
                    row,
                    expected: cols,
                    got: r.len(),
                });
            }
            for (col, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(EvalError::NonFiniteEntry { row, col });
                }
            }
        }
        Ok(SimilarityMatrix { entries })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.entries.len(), self.entries[0].len())
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Min-max scales each column into [0, 1]. A constant column carries no
    /// ranking information and maps to all zeros.
    pub fn normalize_columns(&self) -> SimilarityMatrix {
        let (rows, cols) = self.shape();
        let mut out = self.entries.clone();
        for c in 0..cols {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for r in 0..rows {
                min = min.min(self.entries[r][c]);
                max = max.max(self.entries[r][c]);
            }
            for r in 0..rows {
                out[r][c] = if max == min {
                    0.0
                } else {
                    (self.entries[r][c] - min) / (max - min)
                };
            }
        }
        SimilarityMatrix { entries: out }
    }
}

/// sim(M, GT) = 1 - sqrt(sum (M - GT)^2) / sqrt(sum (M^2 + GT^2)).
/// Both inputs are expected to be column-normalized already; the formula is
/// applied as given either way. Equal matrices short-circuit to exactly 1,
/// which also covers the all-zero pair the quotient cannot express.
pub fn matrix_similarity(
    m: &SimilarityMatrix,
    gt: &SimilarityMatrix,
) -> Result<f64, EvalError> {
    if m.shape() != gt.shape() {
        return Err(EvalError::ShapeMismatch {
            a: m.shape(),
            b: gt.shape(),
        });
    }
    let mut diff_sq = 0.0;
    let mut mass = 0.0;
    for (ra, rb) in m.entries.iter().zip(&gt.entries) {
        for (a, b) in ra.iter().zip(rb) {
            diff_sq += (a - b) * (a - b);
            mass += a * a + b * b;
        }
    }
    if diff_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - diff_sq.sqrt() / mass.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(entries: &[&[f64]]) -> SimilarityMatrix {
        SimilarityMatrix::new(entries.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identical_matrices_score_one() {
        let m = mat(&[&[0.3, 0.7], &[0.9, 0.1]]);
        assert_eq!(matrix_similarity(&m, &m).unwrap(), 1.0);
    }

    #[test]
    fn antidiagonal_hand_case_scores_zero() {
        let m = mat(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let gt = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(matrix_similarity(&m, &gt).unwrap(), 0.0);
    }

    #[test]
    fn zero_ground_truth_collapses_to_zero() {
        let m = mat(&[&[0.5, 0.25], &[1.0, 0.0]]);
        let gt = mat(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(matrix_similarity(&m, &gt).unwrap(), 0.0);
    }

    #[test]
    fn normalize_hand_columns() {
        let m = mat(&[&[2.0, 3.0, 1.0], &[4.0, 3.0, 2.0], &[3.0, 3.0, 4.0]]);
        let n = m.normalize_columns();
        assert_eq!(n.entries()[0], vec![0.0, 0.0, 0.0]);
        assert_eq!(n.entries()[1], vec![1.0, 0.0, 1.0 / 3.0]);
        assert_eq!(n.entries()[2], vec![0.5, 0.0, 1.0]);
    }

    #[test]
    fn ragged_and_empty_rejected() {
        assert!(matches!(
            SimilarityMatrix::new(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(EvalError::RaggedMatrix { row: 1, .. })
        ));
        assert!(matches!(
            SimilarityMatrix::new(vec![]),
            Err(EvalError::EmptyMatrix)
        ));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = mat(&[&[1.0, 0.0]]);
        let b = mat(&[&[1.0], &[0.0]]);
        assert!(matches!(
            matrix_similarity(&a, &b),
            Err(EvalError::ShapeMismatch { .. })
        ));
    }
}
