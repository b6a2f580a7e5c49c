mod fitness;
mod run;

pub use fitness::FitnessTrace;
pub use run::{run_training, RunArtifacts};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("bad run config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Env(#[from] grove_env::EnvError),
    #[error("llm error: {0}")]
    Llm(#[from] grove_llm::LlmError),
    #[error("vlm error: {0}")]
    Vlm(#[from] grove_vlm::VlmError),
    #[error(transparent)]
    Ppo(#[from] grove_ppo::PpoError),
    #[error("fitness trace error: {0}")]
    Fitness(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Weights of the combined reward. Both components are optional but at
/// least one must carry weight.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RewardWeights {
    pub wv: f64,
    pub wl: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self { wv: 0.5, wl: 0.5 }
    }
}

impl RewardWeights {
    pub fn new(wv: f64, wl: f64) -> Result<Self, OrchestratorError> {
        let w = Self { wv, wl };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if !(self.wv.is_finite() && self.wl.is_finite()) {
            return Err(OrchestratorError::BadConfig(
                "reward weights must be finite".into(),
            ));
        }
        if self.wv < 0.0 || self.wl < 0.0 {
            return Err(OrchestratorError::BadConfig(
                "reward weights must be nonnegative".into(),
            ));
        }
        if self.wv + self.wl <= 0.0 {
            return Err(OrchestratorError::BadConfig(
                "at least one reward weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The weighted combination of the semantic and constraint rewards.
pub fn combine(r_v: f64, r_l: f64, weights: &RewardWeights) -> f64 {
    weights.wv * r_v + weights.wl * r_l
}

/// Everything one training run needs: task, environment, reward weights,
/// regeneration policy, optimizer budget, and output location.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub instruction: String,
    pub env_name: String,
    #[serde(default)]
    pub weights: RewardWeights,
    /// Consecutive strictly-negative fitness deltas required to regenerate.
    pub trigger_window: usize,
    /// The final fitness value must also sit below this threshold.
    pub trigger_threshold: f64,
    /// Regeneration budget; 0 disables regeneration entirely.
    pub max_regens: usize,
    pub updates: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub n_envs: usize,
    pub horizon: usize,
    /// Override of the PPO KL early-stop threshold. The per-environment
    /// default is tuned for low-dimensional action spaces; high-dimensional
    /// envs accumulate KL across action dims and may need a looser stop.
    #[serde(default)]
    pub kl_stop: Option<f64>,
}

impl RunConfig {
    pub fn new(instruction: &str, env_name: &str, out_dir: PathBuf) -> Self {
        Self {
            instruction: instruction.to_string(),
            env_name: env_name.to_string(),
            weights: RewardWeights::default(),
            trigger_window: 8,
            trigger_threshold: 0.1,
            max_regens: 5,
            updates: 100,
            seed: 0,
            out_dir,
            n_envs: 8,
            horizon: 32,
            kl_stop: None,
        }
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if self.instruction.trim().is_empty() {
            return Err(OrchestratorError::BadConfig("empty instruction".into()));
        }
        if self.trigger_window < 1 {
            return Err(OrchestratorError::BadConfig(
                "trigger window must be at least 1".into(),
            ));
        }
        if !self.trigger_threshold.is_finite() {
            return Err(OrchestratorError::BadConfig(
                "trigger threshold must be finite".into(),
            ));
        }
        if self.updates == 0 {
            return Err(OrchestratorError::BadConfig(
                "updates must be positive".into(),
            ));
        }
        self.weights.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_is_the_weighted_sum() {
        let w = RewardWeights { wv: 1.0, wl: 1.0 };
        assert_eq!(combine(0.5, 0.2, &w), 0.7);
        let half = RewardWeights::default();
        assert_eq!(combine(1.0, 1.0, &half), 1.0);
        let vlm_only = RewardWeights { wv: 0.7, wl: 0.0 };
        assert_eq!(combine(0.4, 123.0, &vlm_only), 0.7 * 0.4);
    }

    #[test]
    fn combine_is_linear() {
        let w = RewardWeights { wv: 0.3, wl: 0.9 };
        for a in [0.0, 0.5, -2.0, 3.5] {
            let lhs = combine(a * 0.2, a * -0.7, &w);
            let rhs = a * combine(0.2, -0.7, &w);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_must_be_nonnegative_and_not_both_zero() {
        assert!(RewardWeights::new(0.5, 0.5).is_ok());
        assert!(RewardWeights::new(1.0, 0.0).is_ok());
        assert!(RewardWeights::new(-0.1, 0.5).is_err());
        assert!(RewardWeights::new(0.0, 0.0).is_err());
        assert!(RewardWeights::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new("fold the arms", "stick_humanoid", "/tmp/run".into());
        assert!(cfg.validate().is_ok());
        cfg.trigger_window = 0;
        assert!(cfg.validate().is_err());
        cfg = RunConfig::new("  ", "cartpole", "/tmp/run".into());
        assert!(cfg.validate().is_err());
    }
}
