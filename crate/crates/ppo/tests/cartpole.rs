//! Training benchmark: PPO on the cartpole expert reward must balance the
//! pole (mean episode return at least 0.9 * episode_length) within 200
//! updates for every seed.

use grove_env::{env_spec, expert_reward};
use grove_ppo::{PpoConfig, PpoTrainer, StepReward};

const MAX_UPDATES: usize = 200;
const TARGET_RETURN: f64 = 270.0; // 0.9 * 300-step episodes

fn train_one_seed(seed: u64) -> (usize, f64) {
    let spec = env_spec("cartpole").unwrap();
    let mut config = PpoConfig::for_env("cartpole");
    config.seed = seed;
    let mut trainer = PpoTrainer::new(spec, config).unwrap();

    let mut best = f64::NEG_INFINITY;
    for update in 1..=MAX_UPDATES {
        let buffer = trainer
            .collect(|state, _| {
                expert_reward(spec, state)
                    .map(StepReward::from)
                    .map_err(|e| e.to_string())
            })
            .unwrap();
        let mean_return = buffer.mean_episode_return();
        trainer.update(&buffer).unwrap();
        if let Some(r) = mean_return {
            if r > best {
                best = r;
            }
            if update % 10 == 0 {
                eprintln!("seed {seed} update {update}: mean episode return {r:.1}");
            }
            if r >= TARGET_RETURN {
                return (update, r);
            }
        }
    }
    (MAX_UPDATES + 1, best)
}

#[test]
fn cartpole_reaches_ninety_percent_of_max_return_on_three_seeds() {
    for seed in [1, 2, 3] {
        let (updates, reached) = train_one_seed(seed);
        eprintln!("seed {seed}: return {reached:.1} after {updates} updates");
        assert!(
            updates <= MAX_UPDATES,
            "seed {seed} stalled at mean return {reached:.1} after {MAX_UPDATES} updates"
        );
    }
}
