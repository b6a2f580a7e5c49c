//! Planar point-mass runner: actions command planar velocity and yaw rate,
//! tracked with first-order relaxation. Forward is +y, z is up.

use crate::math::Quat;
use crate::types::{Dynamics, EnvSpec, EnvState, JointState, StateEmbed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SPEC: EnvSpec = EnvSpec {
    name: "planar_runner",
    joint_names: &["root"],
    action_dim: 3,
    dt: 0.05,
    episode_length: 300,
    up_axis: 'z',
};

pub const V_MAX: f64 = 2.0;
pub const YAW_RATE_MAX: f64 = std::f64::consts::PI;
/// Velocity relaxation gain (1/s): v += K_V * (v_cmd - v) * dt.
pub const K_V: f64 = 4.0;

pub fn reset(rng: &mut ChaCha8Rng) -> EnvState {
    let pos = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), 0.0];
    let yaw = rng.gen_range(-0.2..0.2);
    build_state(0, pos, [0.0; 3], yaw, 0.0)
}

pub fn step(state: &EnvState, action: &[f64]) -> (EnvState, bool) {
    let Dynamics::PlanarRunner {
        mut pos,
        mut vel,
        mut yaw,
        ..
    } = state.dynamics
    else {
        unreachable!("planar_runner step on foreign state");
    };
    let dt = SPEC.dt;
    let cmd = [
        V_MAX * action[0].clamp(-1.0, 1.0),
        V_MAX * action[1].clamp(-1.0, 1.0),
    ];
    let yaw_rate = YAW_RATE_MAX * action[2].clamp(-1.0, 1.0);
    vel[0] += K_V * (cmd[0] - vel[0]) * dt;
    vel[1] += K_V * (cmd[1] - vel[1]) * dt;
    pos[0] += vel[0] * dt;
    pos[1] += vel[1] * dt;
    yaw = crate::math::wrap_angle(yaw + yaw_rate * dt);

    let step_index = state.step_index + 1;
    let done = step_index >= SPEC.episode_length;
    (build_state(step_index, pos, vel, yaw, yaw_rate), done)
}

fn build_state(step_index: usize, pos: [f64; 3], vel: [f64; 3], yaw: f64, yaw_rate: f64) -> EnvState {
    let root = JointState {
        pos,
        rot: Quat::from_axis_angle([0.0, 0.0, 1.0], yaw),
        vel,
        ang_vel: [0.0, 0.0, yaw_rate],
    };
    EnvState {
        step_index,
        embed: StateEmbed { joints: vec![root] },
        dynamics: Dynamics::PlanarRunner {
            pos,
            vel,
            yaw,
            yaw_rate,
        },
    }
}

/// Expert shaping for evaluation: forward (y) velocity of the root.
pub fn expert_reward(state: &EnvState) -> f64 {
    let Dynamics::PlanarRunner { vel, .. } = state.dynamics else {
        unreachable!("planar_runner expert reward on foreign state");
    };
    vel[1]
}
