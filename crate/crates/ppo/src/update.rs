use crate::policy::PolicyModel;
use ndarray::Array2;

/// What one `update` call reports back for the metrics CSV.
#[derive(Clone, Copy, Debug)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Approximate KL (the nonnegative (r-1) - ln r estimator) between the
    /// pre-update policy and the policy after the last executed epoch.
    pub kl: f64,
    /// Share of samples whose ratio left the clip band, over all processed
    /// minibatches.
    pub clip_fraction: f64,
    pub entropy: f64,
    pub epochs_run: usize,
}

/// Clipped-surrogate policy loss and its gradient in the layout of
/// `policy_params_flat` (mean net, then log-std). Also reports the fraction
/// of samples outside the clip band.
pub fn policy_objective(
    policy: &PolicyModel,
    obs: &Array2<f64>,
    actions: &Array2<f64>,
    old_log_probs: &[f64],
    advantages: &[f64],
    clip: f64,
    entropy_coef: f64,
) -> (f64, Vec<f64>, f64) {
    let m = obs.nrows();
    assert_eq!(old_log_probs.len(), m);
    assert_eq!(advantages.len(), m);
    let dim = policy.action_dim;
    let std = policy.std();

    let (means, cache) = policy.mean.forward_cached(obs);
    let new_log_probs = policy.log_prob_rows(&means, actions);

    let mut surrogate_sum = 0.0;
    let mut clipped = 0usize;
    let mut grad_means = Array2::zeros((m, dim));
    let mut grad_log_std = vec![0.0; dim];
    for j in 0..m {
        let ratio = (new_log_probs[j] - old_log_probs[j]).exp();
        let adv = advantages[j];
        let unclipped = ratio * adv;
        let clipped_term = ratio.clamp(1.0 - clip, 1.0 + clip) * adv;
        surrogate_sum += unclipped.min(clipped_term);
        if (ratio - 1.0).abs() > clip {
            clipped += 1;
        }
        // gradient flows only through the branch min() selects; on ties the
        // branches coincide locally, so the unclipped derivative is exact
        let dlogp = if unclipped <= clipped_term {
            -(ratio * adv) / m as f64
        } else {
            0.0
        };
        for d in 0..dim {
            let z = (actions[(j, d)] - means[(j, d)]) / std[d];
            // d logp / d mean = z / std, d logp / d log_std = z^2 - 1
            grad_means[(j, d)] = dlogp * z / std[d];
            grad_log_std[d] += dlogp * (z * z - 1.0);
        }
    }
    let loss = -surrogate_sum / m as f64 - entropy_coef * policy.entropy();
    for g in &mut grad_log_std {
        *g -= entropy_coef;
    }

    let net_grads = policy.mean.backward(&cache, &grad_means);
    let mut flat = net_grads.flat();
    flat.extend_from_slice(&grad_log_std);
    (loss, flat, clipped as f64 / m as f64)
}

/// Value-regression loss `value_coef * mean((V - R)^2)` and its gradient in
/// the value net's flat layout.
pub fn value_objective(
    policy: &PolicyModel,
    obs: &Array2<f64>,
    returns: &[f64],
    value_coef: f64,
) -> (f64, Vec<f64>) {
    let m = obs.nrows();
    assert_eq!(returns.len(), m);
    let (v, cache) = policy.value.forward_cached(obs);
    let mut loss = 0.0;
    let mut grad_out = Array2::zeros((m, 1));
    for j in 0..m {
        let err = v[(j, 0)] - returns[j];
        loss += err * err;
        grad_out[(j, 0)] = value_coef * 2.0 * err / m as f64;
    }
    loss = value_coef * loss / m as f64;
    (loss, policy.value.backward(&cache, &grad_out).flat())
}

/// The nonnegative approximate KL estimator mean((r - 1) - ln r).
pub fn approx_kl(new_log_probs: &[f64], old_log_probs: &[f64]) -> f64 {
    assert_eq!(new_log_probs.len(), old_log_probs.len());
    let n = new_log_probs.len() as f64;
    new_log_probs
        .iter()
        .zip(old_log_probs)
        .map(|(new, old)| {
            let log_ratio = new - old;
            log_ratio.exp() - 1.0 - log_ratio
        })
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn kl_of_identical_policies_is_exactly_zero() {
        let logp = vec![-1.3, 0.2, -0.8];
        assert_eq!(approx_kl(&logp, &logp), 0.0);
    }

    #[test]
    fn kl_estimator_is_nonnegative() {
        // r - 1 - ln r >= 0 for every r > 0
        let old = vec![-1.0, -2.0, 0.5, -0.3];
        let new = vec![-1.7, -0.1, 0.4, -3.0];
        assert!(approx_kl(&new, &old) >= 0.0);
        assert!(approx_kl(&old, &new) >= 0.0);
    }

    #[test]
    fn ratio_one_reduces_to_vanilla_policy_gradient() {
        let policy = PolicyModel::init(3, 2, &[4], 5);
        let obs = array![[0.1, -0.2, 0.3], [0.5, 0.0, -0.1]];
        let actions = array![[0.2, -0.1], [0.0, 0.4]];
        let advantages = vec![1.5, -0.7];
        // old log-probs equal to current ones: every ratio is exactly 1
        let (means, _) = policy.mean.forward_cached(&obs);
        let old = policy.log_prob_rows(&means, &actions);

        let (_, surrogate_grad, clip_frac) =
            policy_objective(&policy, &obs, &actions, &old, &advantages, 0.2, 0.0);
        assert_eq!(clip_frac, 0.0);

        // vanilla policy gradient of -mean(A * logp), computed independently
        let m = 2.0;
        let std = policy.std();
        let (means, cache) = policy.mean.forward_cached(&obs);
        let mut grad_means = Array2::zeros((2, 2));
        let mut grad_log_std = vec![0.0; 2];
        for j in 0..2 {
            let w = -advantages[j] / m;
            for d in 0..2 {
                let z = (actions[(j, d)] - means[(j, d)]) / std[d];
                grad_means[(j, d)] = w * z / std[d];
                grad_log_std[d] += w * (z * z - 1.0);
            }
        }
        let mut vanilla = policy.mean.backward(&cache, &grad_means).flat();
        vanilla.extend_from_slice(&grad_log_std);

        assert_eq!(surrogate_grad.len(), vanilla.len());
        for (s, v) in surrogate_grad.iter().zip(&vanilla) {
            assert!((s - v).abs() < 1e-12, "{s} vs {v}");
        }
    }
}
