use crate::gae::gae;
use ndarray::Array2;

/// One step's reward as seen by the trainer: the combined scalar that drives
/// PPO plus its semantic and constraint components, carried separately so the
/// fitness trace can watch R_V alone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReward {
    pub total: f64,
    pub r_v: f64,
    pub r_l: f64,
}

impl From<f64> for StepReward {
    fn from(total: f64) -> StepReward {
        StepReward {
            total,
            r_v: 0.0,
            r_l: 0.0,
        }
    }
}

/// Fixed-capacity on-policy storage: `n_envs * horizon` rows, env-major
/// (row = env * horizon + step). Filled exactly once per update.
#[derive(Clone, Debug)]
pub struct RolloutBuffer {
    pub n_envs: usize,
    pub horizon: usize,
    pub obs: Array2<f64>,
    pub actions: Array2<f64>,
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    /// V(s_T) per env for the GAE bootstrap.
    pub bootstrap_values: Vec<f64>,
    /// Totals of episodes that finished during collection.
    pub episode_returns: Vec<f64>,
    pub mean_rv: f64,
    pub mean_rl: f64,
    pub mean_reward: f64,
    /// Mean expert shaping over visited states, when the env defines one.
    pub expert_reward_mean: Option<f64>,
}

impl RolloutBuffer {
    pub fn len(&self) -> usize {
        self.n_envs * self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Mean return of episodes completed during collection.
    pub fn mean_episode_return(&self) -> Option<f64> {
        if self.episode_returns.is_empty() {
            None
        } else {
            Some(self.episode_returns.iter().sum::<f64>() / self.episode_returns.len() as f64)
        }
    }

    /// GAE over every env's segment, concatenated in row order.
    pub fn advantages_and_returns(&self, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let mut advantages = Vec::with_capacity(self.len());
        let mut returns = Vec::with_capacity(self.len());
        for env in 0..self.n_envs {
            let at = env * self.horizon;
            let slice = at..at + self.horizon;
            let (a, r) = gae(
                &self.rewards[slice.clone()],
                &self.values[slice.clone()],
                &self.dones[slice],
                self.bootstrap_values[env],
                gamma,
                lambda,
            );
            advantages.extend(a);
            returns.extend(r);
        }
        (advantages, returns)
    }
}
