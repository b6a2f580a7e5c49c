mod buffer;
mod gae;
mod policy;
mod trainer;
mod update;

pub use buffer::{RolloutBuffer, StepReward};
pub use gae::gae;
pub use policy::{
    hidden_dims, PolicyModel, LOG_STD_INIT, LOG_STD_MAX, LOG_STD_MIN,
};
pub use trainer::PpoTrainer;
pub use update::{approx_kl, policy_objective, value_objective, UpdateStats};

use grove_env::EnvError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpoError {
    #[error("environment error: {0}")]
    Env(#[from] EnvError),
    #[error("reward function failed at buffer step {step}: {message}")]
    Reward { step: usize, message: String },
    #[error("non-finite reward component `{component}` at buffer step {step}")]
    NonFiniteReward { step: usize, component: &'static str },
    #[error("non-finite gradient in epoch {epoch}, minibatch {minibatch}")]
    NonFiniteGradient { epoch: usize, minibatch: usize },
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// PPO hyperparameters. `for_env` picks the per-environment defaults; every
/// field stays overridable for tests and experiments.
#[derive(Clone, Copy, Debug)]
pub struct PpoConfig {
    pub clip: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub lr: f64,
    /// Early-stop threshold on the full-buffer approximate KL, checked after
    /// each epoch.
    pub kl_stop: f64,
    pub epochs: usize,
    pub minibatches: usize,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub n_envs: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl PpoConfig {
    pub fn for_env(env_name: &str) -> Self {
        let lr = if env_name == "stick_humanoid" { 5e-4 } else { 3e-4 };
        Self {
            clip: 0.2,
            gamma: 0.99,
            gae_lambda: 0.95,
            lr,
            kl_stop: 0.008,
            epochs: 4,
            minibatches: 4,
            value_coef: 0.5,
            entropy_coef: 0.0,
            n_envs: 16,
            horizon: 64,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PpoError> {
        let checks: [(bool, &str); 8] = [
            (self.clip > 0.0, "clip must be positive"),
            (
                self.gamma > 0.0 && self.gamma <= 1.0,
                "gamma must be in (0, 1]",
            ),
            (
                (0.0..=1.0).contains(&self.gae_lambda),
                "gae_lambda must be in [0, 1]",
            ),
            (self.lr > 0.0, "lr must be positive"),
            (self.epochs > 0, "epochs must be positive"),
            (self.minibatches > 0, "minibatches must be positive"),
            (self.n_envs > 0, "n_envs must be positive"),
            (self.horizon > 0, "horizon must be positive"),
        ];
        for (ok, message) in checks {
            if !ok {
                return Err(PpoError::BadConfig(message.into()));
            }
        }
        Ok(())
    }
}
