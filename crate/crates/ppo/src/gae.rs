/// Generalized advantage estimation over one trajectory segment.
///
/// `bootstrap` is V(s_T) for the state after the last step; a done flag at
/// step t cuts both the TD target and the advantage recursion, so values
/// never leak across episode boundaries. Returns (advantages, returns) with
/// returns = advantages + values.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let t_max = rewards.len();
    assert_eq!(values.len(), t_max, "values misaligned");
    assert_eq!(dones.len(), t_max, "dones misaligned");
    let mut advantages = vec![0.0; t_max];
    let mut acc = 0.0;
    for t in (0..t_max).rev() {
        let mask = if dones[t] { 0.0 } else { 1.0 };
        let next_value = if t + 1 < t_max { values[t + 1] } else { bootstrap };
        let delta = rewards[t] + gamma * next_value * mask - values[t];
        acc = delta + gamma * lambda * mask * acc;
        advantages[t] = acc;
    }
    let returns = advantages
        .iter()
        .zip(values)
        .map(|(a, v)| a + v)
        .collect();
    (advantages, returns)
}
