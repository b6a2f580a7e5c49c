use crate::EvalError;

/// Tolerance for values that sit numerically on the cap.
const CAP_SLACK: f64 = 1e-9;

/// An expert-reward learning curve: per-iteration means plus the task's
/// fixed upper reference. Construction enforces every invariant, so the
/// metric itself cannot fail.
#[derive(Clone, Debug)]
pub struct ExpertCurve {
    points: Vec<(u64, f64)>,
    cap: f64,
}

impl ExpertCurve {
    pub fn new(points: Vec<(u64, f64)>, cap: f64) -> Result<ExpertCurve, EvalError> {
        if points.is_empty() {
            return Err(EvalError::EmptyCurve);
        }
        if !cap.is_finite() {
            return Err(EvalError::BadCap);
        }
        for (index, &(_, value)) in points.iter().enumerate() {
            if !value.is_finite() {
                return Err(EvalError::NonFiniteValue { index });
            }
            if value > cap + CAP_SLACK {
                return Err(EvalError::AboveCap { index, value, cap });
            }
        }
        for (index, pair) in points.windows(2).enumerate() {
            if pair[1].0 <= pair[0].0 {
                return Err(EvalError::IterationOrder { index: index + 1 });
            }
        }
        Ok(ExpertCurve { points, cap })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    /// Area above the curve and below the cap, as a left Riemann sum with
    /// one iteration per sample. Lower is better: an agent that sits at the
    /// cap from the first update scores 0.
    pub fn reward_distance(&self) -> f64 {
        self.points.iter().map(|&(_, r)| self.cap - r).sum()
    }
}

/// The fixed upper reference per task. Environments without an expert
/// shaping (the humanoid pose tasks) have no cap and no reward distance.
pub fn task_cap(env_name: &str) -> Option<f64> {
    match env_name {
        "cartpole" => Some(1.0),
        "planar_runner" => Some(grove_env::planar_runner::V_MAX),
        _ => None,
    }
}
