//! The training loop: generate the constraint reward, roll out under the
//! combined reward, track fitness, regenerate on collapse, and keep
//! per-update metrics plus all produced artifacts on disk.

use crate::{combine, FitnessTrace, OrchestratorError, RunConfig};
use grove_env::env_spec;
use grove_llm::{generate_reward, AgentDescription, ChatClient, GenerationResult};
use grove_mapper::PoseEmbedder;
use grove_ppo::{PpoConfig, PpoTrainer, StepReward};
use grove_vlm::{r_v, EmbedClient, Instruction};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

const LLM_MAX_RETRIES: usize = 3;

pub const METRICS_HEADER: &str =
    "update_index,mean_episode_return,mean_rv,mean_rl,expert_reward_mean,kl,clip_fraction,regen_flag";

/// What a finished run leaves behind, with the numbers tests care about
/// surfaced directly.
#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub metrics_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub reward_paths: Vec<PathBuf>,
    pub regenerations: usize,
    /// True if the constraint reward ever fell back to the constant program.
    pub degraded: bool,
    pub fitness: Vec<f64>,
    pub initial_mean_rv: f64,
    pub final_mean_rv: f64,
}

/// Runs one full training: constraint-reward generation, rollout/update
/// iterations under the combined reward, fitness-triggered regeneration,
/// and artifact emission (metrics.csv, policy.ckpt, rewards/NNN.dsl).
///
/// `embedder` maps poses into the instruction-embedding space: the trained
/// mapper in production, the synthetic oracle in mock runs.
pub fn run_training(
    config: &RunConfig,
    llm: &dyn ChatClient,
    vlm: &dyn EmbedClient,
    embedder: &dyn PoseEmbedder,
) -> Result<RunArtifacts, OrchestratorError> {
    config.validate()?;
    let spec = env_spec(&config.env_name)?;
    let instruction = Instruction::embed(&config.instruction, vlm)?;
    if instruction.embedding().len() != embedder.dims() {
        return Err(OrchestratorError::BadConfig(format!(
            "instruction embedding has {} dims but the pose embedder expects {}",
            instruction.embedding().len(),
            embedder.dims()
        )));
    }

    fs::create_dir_all(&config.out_dir)?;
    let rewards_dir = config.out_dir.join("rewards");
    fs::create_dir_all(&rewards_dir)?;
    let snapshot = serde_json::to_string_pretty(config)
        .map_err(|e| OrchestratorError::BadConfig(e.to_string()))?;
    fs::write(config.out_dir.join("config.snapshot"), snapshot)?;

    let agent = AgentDescription::for_env(spec);
    let use_constraint = config.weights.wl > 0.0;
    let mut reward_paths = Vec::new();
    let mut degraded = false;
    let mut generation: Option<GenerationResult> = None;
    if use_constraint {
        let result = generate_reward(&config.instruction, spec, &agent, llm, LLM_MAX_RETRIES);
        degraded |= result.degraded;
        reward_paths.push(save_generation(&rewards_dir, 0, &result)?);
        generation = Some(result);
    }

    let mut ppo = PpoConfig::for_env(spec.name);
    ppo.n_envs = config.n_envs;
    ppo.horizon = config.horizon;
    ppo.seed = config.seed;
    if let Some(kl_stop) = config.kl_stop {
        ppo.kl_stop = kl_stop;
    }
    let mut trainer = PpoTrainer::new(spec, ppo)?;

    let metrics_path = config.out_dir.join("metrics.csv");
    let mut metrics = fs::File::create(&metrics_path)?;
    writeln!(metrics, "{METRICS_HEADER}")?;

    let mut trace = FitnessTrace::new();
    let mut regenerations = 0usize;
    let mut initial_mean_rv = f64::NAN;
    let mut final_mean_rv = f64::NAN;

    for update_index in 0..config.updates {
        let weights = config.weights;
        let program = generation.as_ref().map(|g| &g.program);
        let buffer = trainer.collect(|state, action| {
            let rv = r_v(state, &instruction, embedder).map_err(|e| e.to_string())?;
            let rl = match program {
                Some(p) => p.evaluate(&state.embed, action).map_err(|e| e.to_string())?.total,
                None => 0.0,
            };
            Ok(StepReward {
                total: combine(rv, rl, &weights),
                r_v: rv,
                r_l: rl,
            })
        })?;

        if update_index == 0 {
            initial_mean_rv = buffer.mean_rv;
        }
        final_mean_rv = buffer.mean_rv;
        trace
            .push(buffer.mean_rv)
            .map_err(OrchestratorError::Fitness)?;

        let mut regen_flag = false;
        if use_constraint
            && regenerations < config.max_regens
            && trace.should_regenerate(config.trigger_window, config.trigger_threshold)
        {
            regenerations += 1;
            let result =
                generate_reward(&config.instruction, spec, &agent, llm, LLM_MAX_RETRIES);
            degraded |= result.degraded;
            reward_paths.push(save_generation(&rewards_dir, regenerations, &result)?);
            generation = Some(result);
            trace.mark_regenerated();
            regen_flag = true;
        }

        let stats = trainer.update(&buffer)?;
        let episode_return = buffer.mean_episode_return().unwrap_or(f64::NAN);
        let expert = buffer.expert_reward_mean.unwrap_or(f64::NAN);
        writeln!(
            metrics,
            "{},{},{},{},{},{},{},{}",
            update_index,
            episode_return,
            buffer.mean_rv,
            buffer.mean_rl,
            expert,
            stats.kl,
            stats.clip_fraction,
            u8::from(regen_flag),
        )?;
    }
    metrics.flush()?;

    let checkpoint_path = config.out_dir.join("policy.ckpt");
    trainer.policy.save(&checkpoint_path)?;

    Ok(RunArtifacts {
        out_dir: config.out_dir.clone(),
        metrics_path,
        checkpoint_path,
        reward_paths,
        regenerations,
        degraded,
        fitness: trace.values().to_vec(),
        initial_mean_rv,
        final_mean_rv,
    })
}

/// Writes rewards/NNN.dsl plus a sibling attempt log with the raw replies
/// and rejection reasons of that generation.
fn save_generation(
    rewards_dir: &std::path::Path,
    index: usize,
    result: &GenerationResult,
) -> Result<PathBuf, OrchestratorError> {
    let dsl_path = rewards_dir.join(format!("{index:03}.dsl"));
    fs::write(&dsl_path, &result.source)?;

    let mut log = String::new();
    log.push_str(&format!(
        "attempts: {}\ndegraded: {}\n",
        result.attempts, result.degraded
    ));
    for (i, reason) in result.failures.iter().enumerate() {
        log.push_str(&format!("rejection {}: {}\n", i + 1, reason));
    }
    for (i, raw) in result.raw_responses.iter().enumerate() {
        log.push_str(&format!("--- reply {} ---\n{}\n", i + 1, raw));
    }
    fs::write(rewards_dir.join(format!("{index:03}.log")), log)?;
    Ok(dsl_path)
}
