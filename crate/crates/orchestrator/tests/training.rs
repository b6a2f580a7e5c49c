//! End-to-end training runs with mock clients on the stick humanoid: the
//! semantic reward improves on an anchor task, a hostile constraint program
//! triggers regeneration, and the regeneration budget and determinism
//! contracts hold.

use grove_env::{env_spec, pose_of, reset, step, EnvSpec, PoseVector};
use grove_llm::{ChatClient, LlmError, Message, MockLlm};
use grove_mapper::SyntheticOracle;
use grove_orchestrator::{run_training, FitnessTrace, RewardWeights, RunConfig};
use grove_ppo::PolicyModel;
use grove_vlm::{AnchorTask, MockVlm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::path::Path;

const DIMS: usize = 64;
const ORACLE_SEED: u64 = 17;

/// Pose the humanoid settles into when every joint tracks `action` long
/// enough for the first-order lag to die out.
fn settled_pose(spec: &'static EnvSpec, action: &[f64]) -> PoseVector {
    let mut state = reset(spec, 0);
    for _ in 0..120 {
        let (next, done) = step(spec, &state, action).unwrap();
        assert!(!done);
        state = next;
    }
    pose_of(&state)
}

fn anchor_action(scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..45).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn read_metrics(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

fn regen_flags(path: &Path) -> Vec<bool> {
    read_metrics(path)
        .iter()
        .skip(1)
        .map(|line| line.rsplit(',').next().unwrap() == "1")
        .collect()
}

struct PanicClient;

impl ChatClient for PanicClient {
    fn complete(&self, _messages: &[Message]) -> Result<String, LlmError> {
        panic!("the constraint-reward path must stay inert when its weight is zero");
    }
}

#[test]
fn anchor_task_improves_mean_semantic_reward() {
    let spec = env_spec("stick_humanoid").unwrap();
    let instruction = "fold both arms over the chest";
    let anchor = AnchorTask::new(instruction, settled_pose(spec, &anchor_action(0.45, 55)))
        .unwrap();
    let vlm = MockVlm::new(DIMS, ORACLE_SEED).with_anchor(anchor);
    let llm = MockLlm::new(); // unknown instruction: constant zero program
    let oracle = SyntheticOracle::new(15, DIMS, ORACLE_SEED);

    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::new(instruction, "stick_humanoid", dir.path().join("run"));
    config.updates = 100;
    config.n_envs = 16;
    config.horizon = 64;
    config.seed = 5;
    config.kl_stop = Some(0.05);
    let artifacts = run_training(&config, &llm, &vlm, &oracle).unwrap();

    eprintln!(
        "anchor run: initial mean r_v {:.4}, final {:.4}, regens {}",
        artifacts.initial_mean_rv, artifacts.final_mean_rv, artifacts.regenerations
    );
    for (i, v) in artifacts.fitness.iter().enumerate() {
        if i % 10 == 0 {
            eprintln!("  update {i}: mean r_v {v:.4}");
        }
    }
    assert!(
        artifacts.final_mean_rv - artifacts.initial_mean_rv >= 0.3,
        "improvement {:.4} below margin",
        artifacts.final_mean_rv - artifacts.initial_mean_rv
    );
    assert!(!artifacts.degraded);

    // artifacts on disk: metrics rows, loadable checkpoint, initial program
    let lines = read_metrics(&artifacts.metrics_path);
    assert_eq!(lines.len(), config.updates + 1);
    assert!(lines[0].starts_with("update_index,"));
    PolicyModel::load(&artifacts.checkpoint_path).unwrap();
    assert!(artifacts.reward_paths[0].ends_with("rewards/000.dsl"));
    assert_eq!(
        fs::read_to_string(&artifacts.reward_paths[0]).unwrap().trim(),
        "return 0.0"
    );
}

/// One `abs(joint.rot.axis - c)` term with the literal folded into the sign.
fn rot_term(joint: &str, axis: char, target: f64) -> String {
    if target < 0.0 {
        format!("abs({joint}.rot.{axis} + {:.4})", -target)
    } else {
        format!("abs({joint}.rot.{axis} - {target:.4})")
    }
}

/// A constraint program that rewards matching every joint rotation of a pose
/// bent opposite to the anchor: optimizing it drags the whole body away from
/// the anchor, so the semantic fitness collapses and the trigger must fire.
fn adversarial_program(spec: &'static EnvSpec, anchor_action: &[f64]) -> String {
    let opposite: Vec<f64> = anchor_action.iter().map(|x| -x).collect();
    let mut state = reset(spec, 0);
    for _ in 0..120 {
        state = step(spec, &state, &opposite).unwrap().0;
    }
    let reset_state = reset(spec, 0);
    let mut lines = Vec::new();
    let mut names = Vec::new();
    let mut reset_gap = 0.0;
    for (j, name) in spec.joint_names.iter().enumerate() {
        let q = state.embed.joints[j].rot;
        let q0 = reset_state.embed.joints[j].rot;
        let comps = [('x', q.x, q0.x), ('y', q.y, q0.y), ('z', q.z, q0.z), ('w', q.w, q0.w)];
        let terms: Vec<String> = comps
            .iter()
            .map(|&(axis, c, c0)| {
                reset_gap += (c0 - c).abs();
                rot_term(name, axis, c)
            })
            .collect();
        lines.push(format!("{name}_err = {}", terms.join(" + ")));
        names.push(format!("{name}_err"));
    }
    // scale so the program pays roughly exp(-2) at reset and 1.0 at the target
    lines.push(format!("return exp(-({}) / {:.4})", names.join(" + "), reset_gap / 2.0));
    lines.join("\n")
}

fn adversarial_config(out_dir: std::path::PathBuf) -> (RunConfig, MockLlm, MockVlm, SyntheticOracle) {
    let spec = env_spec("stick_humanoid").unwrap();
    let instruction = "hold this exact guard stance";
    let anchor_act = anchor_action(0.45, 55);
    let anchor = AnchorTask::new(instruction, settled_pose(spec, &anchor_act)).unwrap();
    let vlm = MockVlm::new(DIMS, ORACLE_SEED).with_anchor(anchor);
    let llm = MockLlm::new().with_program(instruction, &adversarial_program(spec, &anchor_act));
    let oracle = SyntheticOracle::new(15, DIMS, ORACLE_SEED);

    let mut config = RunConfig::new(instruction, "stick_humanoid", out_dir);
    // horizon = episode length so every update sees the same reset transient:
    // staggered resets would otherwise put periodic bumps in the fitness trace
    config.weights = RewardWeights { wv: 0.0, wl: 1.0 };
    config.updates = 120;
    config.n_envs = 16;
    config.horizon = 300;
    config.seed = 11;
    config.kl_stop = Some(0.1);
    (config, llm, vlm, oracle)
}

#[test]
fn adversarial_constraint_program_triggers_regeneration() {
    let dir = tempfile::tempdir().unwrap();
    let (config, llm, vlm, oracle) = adversarial_config(dir.path().join("run"));
    let artifacts = run_training(&config, &llm, &vlm, &oracle).unwrap();

    eprintln!("adversarial run: regens {}", artifacts.regenerations);
    let rl_column: Vec<f64> = read_metrics(&artifacts.metrics_path)
        .iter()
        .skip(1)
        .map(|line| line.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    for (i, v) in artifacts.fitness.iter().enumerate() {
        if i % 5 == 0 {
            eprintln!("  update {i}: mean r_v {v:.4}, mean r_l {:.4}", rl_column[i]);
        }
    }
    assert!(
        artifacts.regenerations >= 1,
        "fitness collapse never triggered regeneration; trace tail {:?}",
        &artifacts.fitness[artifacts.fitness.len().saturating_sub(12)..]
    );
    // every regeneration left its program and log on disk
    assert_eq!(artifacts.reward_paths.len(), artifacts.regenerations + 1);
    for path in &artifacts.reward_paths {
        assert!(path.exists());
    }
    // and was flagged in exactly as many metric rows
    let flags = regen_flags(&artifacts.metrics_path);
    assert_eq!(
        flags.iter().filter(|&&f| f).count(),
        artifacts.regenerations
    );
}

#[test]
fn zero_regeneration_budget_never_regenerates() {
    let dir = tempfile::tempdir().unwrap();
    let (mut config, llm, vlm, oracle) = adversarial_config(dir.path().join("run"));
    config.max_regens = 0;
    config.updates = 80;
    let artifacts = run_training(&config, &llm, &vlm, &oracle).unwrap();

    // the collapse would have fired the trigger, so only the budget held it back
    let mut replay = FitnessTrace::new();
    let mut would_fire = false;
    for v in &artifacts.fitness {
        replay.push(*v).unwrap();
        would_fire |= replay.should_regenerate(config.trigger_window, config.trigger_threshold);
    }
    assert!(would_fire, "scenario no longer collapses; the ablation is vacuous");

    assert_eq!(artifacts.regenerations, 0);
    assert_eq!(artifacts.reward_paths.len(), 1);
    assert!(regen_flags(&artifacts.metrics_path).iter().all(|&f| !f));
}

#[test]
fn zero_constraint_weight_never_invokes_the_llm_and_matches_the_mock_run() {
    let spec = env_spec("stick_humanoid").unwrap();
    let instruction = "reach upward";
    let anchor = AnchorTask::new(instruction, settled_pose(spec, &anchor_action(0.1, 9))).unwrap();
    let oracle = SyntheticOracle::new(15, DIMS, ORACLE_SEED);

    let run = |llm: &dyn ChatClient, out: std::path::PathBuf| {
        let vlm = MockVlm::new(DIMS, ORACLE_SEED)
            .with_anchor(AnchorTask::new(instruction, anchor.anchor.clone()).unwrap());
        let mut config = RunConfig::new(instruction, "stick_humanoid", out);
        config.weights = RewardWeights { wv: 1.0, wl: 0.0 };
        config.updates = 3;
        config.n_envs = 2;
        config.horizon = 8;
        config.seed = 77;
        run_training(&config, llm, &vlm, &oracle).unwrap()
    };

    let dir = tempfile::tempdir().unwrap();
    // a client that panics on contact proves the constraint path is inert
    let silent = run(&PanicClient, dir.path().join("a"));
    let mock = run(&MockLlm::new(), dir.path().join("b"));

    assert!(silent.reward_paths.is_empty());
    assert_eq!(silent.regenerations, 0);
    assert_eq!(
        fs::read(&silent.metrics_path).unwrap(),
        fs::read(&mock.metrics_path).unwrap(),
        "constraint-free runs must be byte-identical regardless of the chat client"
    );
    assert!(silent.fitness.iter().all(|v| v.is_finite()));
}

#[test]
fn identical_configs_produce_identical_artifacts() {
    let spec = env_spec("stick_humanoid").unwrap();
    let instruction = "crouch low";
    let anchor_pose = settled_pose(spec, &anchor_action(0.08, 3));
    let oracle = SyntheticOracle::new(15, DIMS, ORACLE_SEED);

    let run = |out: std::path::PathBuf| {
        let vlm = MockVlm::new(DIMS, ORACLE_SEED)
            .with_anchor(AnchorTask::new(instruction, anchor_pose.clone()).unwrap());
        let llm = MockLlm::new();
        let mut config = RunConfig::new(instruction, "stick_humanoid", out);
        config.updates = 4;
        config.n_envs = 2;
        config.horizon = 8;
        config.seed = 123;
        run_training(&config, &llm, &vlm, &oracle).unwrap()
    };

    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path().join("a"));
    let second = run(dir.path().join("b"));
    assert_eq!(
        fs::read(&first.metrics_path).unwrap(),
        fs::read(&second.metrics_path).unwrap()
    );
    assert_eq!(
        fs::read(&first.checkpoint_path).unwrap(),
        fs::read(&second.checkpoint_path).unwrap()
    );
}
