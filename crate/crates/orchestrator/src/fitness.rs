//! Fitness bookkeeping for reward regeneration: the per-iteration mean
//! semantic reward, and the collapse trigger that fires after a sustained
//! strict decline ending below an absolute threshold.

/// Append-only record of per-iteration fitness (mean semantic reward over
/// all environments and steps of the iteration).
#[derive(Clone, Debug, Default)]
pub struct FitnessTrace {
    values: Vec<f64>,
    /// Index of the first value eligible for trigger evaluation. Advanced
    /// past the current history after each regeneration so one decline
    /// cannot fire the trigger twice.
    barrier: usize,
}

impl FitnessTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one fitness value. Non-finite values are rejected so the
    /// trigger logic never compares against NaN.
    pub fn push(&mut self, value: f64) -> Result<(), String> {
        if !value.is_finite() {
            return Err(format!("non-finite fitness value {value}"));
        }
        self.values.push(value);
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Resets the decline counter: trigger evaluation ignores everything
    /// appended before this point.
    pub fn mark_regenerated(&mut self) {
        self.barrier = self.values.len();
    }

    /// True iff the last `window` deltas since the barrier are all strictly
    /// negative and the latest value sits below `threshold`. Equal
    /// consecutive values break the streak.
    pub fn should_regenerate(&self, window: usize, threshold: f64) -> bool {
        assert!(window >= 1, "trigger window must be at least 1");
        let eligible = &self.values[self.barrier..];
        if eligible.len() < window + 1 {
            return false;
        }
        let tail = &eligible[eligible.len() - (window + 1)..];
        let all_drops = tail.windows(2).all(|pair| pair[1] < pair[0]);
        all_drops && tail[window] < threshold
    }
}
