use crate::VlmError;

/// Cosine similarity, the core of the semantic reward. Rejects zero vectors
/// rather than returning NaN; the result is clamped into [-1, 1] so rounding
/// on near-parallel vectors cannot leak values like 1 + 1e-16 into reward
/// math.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, VlmError> {
    if a.len() != b.len() {
        return Err(VlmError::DimMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let norm_a = norm(a);
    let norm_b = norm(b);
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(VlmError::ZeroVector);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (norm_a * norm_b)).clamp(-1.0, 1.0))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_similarity_is_one() {
        let v = vec![0.3, -1.2, 4.5, 0.0];
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_unit_vectors_score_zero() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn forty_five_degrees() {
        let c = cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((c - 0.7071067811865476).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(VlmError::ZeroVector)
        ));
        assert!(matches!(
            cosine(&[1.0, 0.0], &[0.0, 0.0]),
            Err(VlmError::ZeroVector)
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(matches!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(VlmError::DimMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn antiparallel_is_minus_one() {
        let c = cosine(&[2.0, -3.0], &[-4.0, 6.0]).unwrap();
        assert_eq!(c, -1.0);
    }

    #[test]
    fn scaling_either_argument_changes_nothing() {
        let a = vec![0.2, 0.5, -0.7];
        let b = vec![1.0, -0.3, 0.4];
        let base = cosine(&a, &b).unwrap();
        for lambda in [1e-6, 0.5, 3.0, 1e9] {
            let scaled: Vec<f64> = a.iter().map(|x| x * lambda).collect();
            assert!((cosine(&scaled, &b).unwrap() - base).abs() < 1e-12);
            let scaled_b: Vec<f64> = b.iter().map(|x| x * lambda).collect();
            assert!((cosine(&a, &scaled_b).unwrap() - base).abs() < 1e-12);
        }
    }
}
