use crate::buffer::{RolloutBuffer, StepReward};
use crate::policy::PolicyModel;
use crate::update::{approx_kl, policy_objective, value_objective, UpdateStats};
use crate::{PpoConfig, PpoError};
use grove_env::{expert_reward, reset, step, EnvSpec, EnvState};
use grove_nn::Adam;
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// On-policy trainer: collect rollouts with the current policy, then take
/// clipped-surrogate gradient steps on them.
pub struct PpoTrainer {
    pub spec: &'static EnvSpec,
    pub config: PpoConfig,
    pub policy: PolicyModel,
    envs: Vec<EnvState>,
    episode_accum: Vec<f64>,
    adam_policy: Adam,
    adam_value: Adam,
    rng: ChaCha8Rng,
}

impl PpoTrainer {
    pub fn new(spec: &'static EnvSpec, config: PpoConfig) -> Result<Self, PpoError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let policy_seed = rng.gen::<u64>();
        let policy = PolicyModel::for_env(spec, policy_seed);
        let envs: Vec<EnvState> = (0..config.n_envs)
            .map(|_| reset(spec, rng.gen::<u64>()))
            .collect();
        let episode_accum = vec![0.0; config.n_envs];
        let adam_policy = Adam::new(policy.policy_params_flat().len());
        let adam_value = Adam::new(policy.value.params_flat().len());
        Ok(Self {
            spec,
            config,
            policy,
            envs,
            episode_accum,
            adam_policy,
            adam_value,
            rng,
        })
    }

    fn obs_matrix(&self) -> Array2<f64> {
        let obs_dim = self.policy.obs_dim;
        let mut obs = Array2::zeros((self.envs.len(), obs_dim));
        for (i, env) in self.envs.iter().enumerate() {
            let flat = env.embed.flatten();
            debug_assert_eq!(flat.len(), obs_dim);
            for (d, x) in flat.iter().enumerate() {
                obs[(i, d)] = *x;
            }
        }
        obs
    }

    /// Roll every environment forward `horizon` steps under the current
    /// policy, scoring transitions with `reward_fn(next_state, action)`.
    pub fn collect<F>(&mut self, mut reward_fn: F) -> Result<RolloutBuffer, PpoError>
    where
        F: FnMut(&EnvState, &[f64]) -> Result<StepReward, String>,
    {
        let n = self.config.n_envs;
        let k = self.config.horizon;
        let obs_dim = self.policy.obs_dim;
        let act_dim = self.policy.action_dim;

        let mut buffer = RolloutBuffer {
            n_envs: n,
            horizon: k,
            obs: Array2::zeros((n * k, obs_dim)),
            actions: Array2::zeros((n * k, act_dim)),
            log_probs: vec![0.0; n * k],
            rewards: vec![0.0; n * k],
            values: vec![0.0; n * k],
            dones: vec![false; n * k],
            bootstrap_values: vec![0.0; n],
            episode_returns: Vec::new(),
            mean_rv: 0.0,
            mean_rl: 0.0,
            mean_reward: 0.0,
            expert_reward_mean: None,
        };

        let mut rv_sum = 0.0;
        let mut rl_sum = 0.0;
        let mut total_sum = 0.0;
        let mut expert_sum = 0.0;
        let mut expert_available = true;

        for t in 0..k {
            let obs_step = self.obs_matrix();
            let means = self.policy.mean.forward(&obs_step);
            let values = self.policy.value.forward(&obs_step);
            let actions = self.policy.sample_actions(&means, &mut self.rng);
            let log_probs = self.policy.log_prob_rows(&means, &actions);

            for i in 0..n {
                let row = i * k + t;
                let action: Vec<f64> = actions.row(i).to_vec();
                let (next, done) = step(self.spec, &self.envs[i], &action)?;
                let reward = reward_fn(&next, &action)
                    .map_err(|message| PpoError::Reward { step: row, message })?;
                for (component, x) in
                    [("total", reward.total), ("r_v", reward.r_v), ("r_l", reward.r_l)]
                {
                    if !x.is_finite() {
                        return Err(PpoError::NonFiniteReward { step: row, component });
                    }
                }

                for d in 0..obs_dim {
                    buffer.obs[(row, d)] = obs_step[(i, d)];
                }
                for d in 0..act_dim {
                    buffer.actions[(row, d)] = actions[(i, d)];
                }
                buffer.log_probs[row] = log_probs[i];
                buffer.rewards[row] = reward.total;
                buffer.values[row] = values[(i, 0)];
                buffer.dones[row] = done;

                rv_sum += reward.r_v;
                rl_sum += reward.r_l;
                total_sum += reward.total;
                if expert_available {
                    match expert_reward(self.spec, &next) {
                        Ok(r) => expert_sum += r,
                        Err(_) => expert_available = false,
                    }
                }

                self.episode_accum[i] += reward.total;
                if done {
                    buffer.episode_returns.push(self.episode_accum[i]);
                    self.episode_accum[i] = 0.0;
                    self.envs[i] = reset(self.spec, self.rng.gen::<u64>());
                } else {
                    self.envs[i] = next;
                }
            }
        }

        let final_obs = self.obs_matrix();
        let final_values = self.policy.value.forward(&final_obs);
        for i in 0..n {
            buffer.bootstrap_values[i] = final_values[(i, 0)];
        }

        let samples = (n * k) as f64;
        buffer.mean_rv = rv_sum / samples;
        buffer.mean_rl = rl_sum / samples;
        buffer.mean_reward = total_sum / samples;
        buffer.expert_reward_mean = expert_available.then(|| expert_sum / samples);
        Ok(buffer)
    }

    /// One PPO update over `buffer`: advantage normalization, then up to
    /// `epochs` passes of minibatched clipped-surrogate steps, stopping early
    /// once the full-buffer approximate KL exceeds `kl_stop`.
    pub fn update(&mut self, buffer: &RolloutBuffer) -> Result<UpdateStats, PpoError> {
        let cfg = self.config;
        let (raw_adv, returns) = buffer.advantages_and_returns(cfg.gamma, cfg.gae_lambda);
        let n = raw_adv.len();
        let mean = raw_adv.iter().sum::<f64>() / n as f64;
        let var = raw_adv.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        let advantages: Vec<f64> = raw_adv.iter().map(|a| (a - mean) / (std + 1e-8)).collect();

        let mut policy_loss_sum = 0.0;
        let mut value_loss_sum = 0.0;
        let mut clip_sum = 0.0;
        let mut minibatches_run = 0usize;
        let mut epochs_run = 0usize;
        let mut kl = 0.0;

        let chunk = n.div_ceil(cfg.minibatches);
        for epoch in 0..cfg.epochs {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut self.rng);
            for (mb, rows) in perm.chunks(chunk).enumerate() {
                let obs = gather_rows(&buffer.obs, rows);
                let actions = gather_rows(&buffer.actions, rows);
                let old: Vec<f64> = rows.iter().map(|&j| buffer.log_probs[j]).collect();
                let adv: Vec<f64> = rows.iter().map(|&j| advantages[j]).collect();
                let ret: Vec<f64> = rows.iter().map(|&j| returns[j]).collect();

                let (ploss, pgrads, clip_frac) = policy_objective(
                    &self.policy,
                    &obs,
                    &actions,
                    &old,
                    &adv,
                    cfg.clip,
                    cfg.entropy_coef,
                );
                let (vloss, vgrads) = value_objective(&self.policy, &obs, &ret, cfg.value_coef);
                if pgrads.iter().chain(&vgrads).any(|g| !g.is_finite()) {
                    return Err(PpoError::NonFiniteGradient { epoch, minibatch: mb });
                }

                let mut params = self.policy.policy_params_flat();
                self.adam_policy.step(&mut params, &pgrads, cfg.lr);
                self.policy.set_policy_params_flat(&params);

                let mut vparams = self.policy.value.params_flat();
                self.adam_value.step(&mut vparams, &vgrads, cfg.lr);
                self.policy.value.set_params_flat(&vparams);

                policy_loss_sum += ploss;
                value_loss_sum += vloss;
                clip_sum += clip_frac;
                minibatches_run += 1;
            }
            epochs_run += 1;

            let means = self.policy.mean.forward(&buffer.obs);
            let new_log_probs = self.policy.log_prob_rows(&means, &buffer.actions);
            kl = approx_kl(&new_log_probs, &buffer.log_probs);
            if kl > cfg.kl_stop {
                break;
            }
        }

        let mb = minibatches_run.max(1) as f64;
        Ok(UpdateStats {
            policy_loss: policy_loss_sum / mb,
            value_loss: value_loss_sum / mb,
            kl,
            clip_fraction: clip_sum / mb,
            entropy: self.policy.entropy(),
            epochs_run,
        })
    }
}

fn gather_rows(src: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), src.ncols()));
    for (k, &j) in rows.iter().enumerate() {
        for d in 0..src.ncols() {
            out[(k, d)] = src[(j, d)];
        }
    }
    out
}
