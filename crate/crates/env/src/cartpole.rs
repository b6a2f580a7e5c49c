//! Classic cart-pole with the standard frictionless ODE, integrated with
//! semi-implicit Euler. The pole pivots about the world y axis; z is up.

use crate::math::Quat;
use crate::types::{Dynamics, EnvSpec, EnvState, JointState, StateEmbed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SPEC: EnvSpec = EnvSpec {
    name: "cartpole",
    joint_names: &["cart", "pole"],
    action_dim: 1,
    dt: 0.02,
    episode_length: 300,
    up_axis: 'z',
};

pub const GRAVITY: f64 = 9.8;
pub const MASS_CART: f64 = 1.0;
pub const MASS_POLE: f64 = 0.1;
pub const HALF_LENGTH: f64 = 0.5;
pub const FORCE_MAG: f64 = 10.0;
pub const THETA_LIMIT: f64 = 0.4;
pub const X_LIMIT: f64 = 2.4;

pub fn reset(rng: &mut ChaCha8Rng) -> EnvState {
    let x = rng.gen_range(-0.05..0.05);
    let x_dot = rng.gen_range(-0.05..0.05);
    let theta = rng.gen_range(-0.05..0.05);
    let theta_dot = rng.gen_range(-0.05..0.05);
    build_state(0, x, x_dot, theta, theta_dot)
}

pub fn step(state: &EnvState, action: &[f64]) -> (EnvState, bool) {
    let Dynamics::Cartpole {
        mut x,
        mut x_dot,
        mut theta,
        mut theta_dot,
    } = state.dynamics
    else {
        unreachable!("cartpole step on foreign state");
    };
    let force = FORCE_MAG * action[0].clamp(-1.0, 1.0);
    let (x_acc, theta_acc) = accelerations(x_dot, theta, theta_dot, force);
    let dt = SPEC.dt;
    x_dot += x_acc * dt;
    theta_dot += theta_acc * dt;
    x += x_dot * dt;
    theta += theta_dot * dt;

    let step_index = state.step_index + 1;
    let failed = theta.abs() > THETA_LIMIT || x.abs() > X_LIMIT;
    let done = failed || step_index >= SPEC.episode_length;
    (build_state(step_index, x, x_dot, theta, theta_dot), done)
}

fn accelerations(x_dot: f64, theta: f64, theta_dot: f64, force: f64) -> (f64, f64) {
    let _ = x_dot;
    let total_mass = MASS_CART + MASS_POLE;
    let pole_mass_length = MASS_POLE * HALF_LENGTH;
    let (sin_t, cos_t) = theta.sin_cos();
    let temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
    let theta_acc = (GRAVITY * sin_t - cos_t * temp)
        / (HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos_t * cos_t / total_mass));
    let x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;
    (x_acc, theta_acc)
}

fn build_state(step_index: usize, x: f64, x_dot: f64, theta: f64, theta_dot: f64) -> EnvState {
    let cart = JointState {
        pos: [x, 0.0, 0.0],
        rot: Quat::IDENTITY,
        vel: [x_dot, 0.0, 0.0],
        ang_vel: [0.0; 3],
    };
    // pole joint tracks the center of mass, half-length up the (rotated) rod
    let (sin_t, cos_t) = theta.sin_cos();
    let pole = JointState {
        pos: [x + HALF_LENGTH * sin_t, 0.0, HALF_LENGTH * cos_t],
        rot: Quat::from_axis_angle([0.0, 1.0, 0.0], theta),
        vel: [
            x_dot + HALF_LENGTH * theta_dot * cos_t,
            0.0,
            -HALF_LENGTH * theta_dot * sin_t,
        ],
        ang_vel: [0.0, theta_dot, 0.0],
    };
    EnvState {
        step_index,
        embed: StateEmbed {
            joints: vec![cart, pole],
        },
        dynamics: Dynamics::Cartpole {
            x,
            x_dot,
            theta,
            theta_dot,
        },
    }
}

/// Expert shaping for evaluation: cosine of the pole angle, 1.0 upright.
pub fn expert_reward(state: &EnvState) -> f64 {
    let Dynamics::Cartpole { theta, .. } = state.dynamics else {
        unreachable!("cartpole expert reward on foreign state");
    };
    theta.cos()
}

/// Total mechanical energy of the passive system, for integrator tests.
/// Pole is a uniform rod of length 2 * HALF_LENGTH pivoting at the cart.
pub fn energy(state: &EnvState) -> f64 {
    let Dynamics::Cartpole {
        x_dot,
        theta,
        theta_dot,
        ..
    } = state.dynamics
    else {
        unreachable!("cartpole energy on foreign state");
    };
    let (sin_t, cos_t) = theta.sin_cos();
    let vpx = x_dot + HALF_LENGTH * theta_dot * cos_t;
    let vpz = -HALF_LENGTH * theta_dot * sin_t;
    let i_com = MASS_POLE * HALF_LENGTH * HALF_LENGTH / 3.0;
    let kinetic = 0.5 * MASS_CART * x_dot * x_dot
        + 0.5 * MASS_POLE * (vpx * vpx + vpz * vpz)
        + 0.5 * i_com * theta_dot * theta_dot;
    let potential = MASS_POLE * GRAVITY * HALF_LENGTH * cos_t;
    kinetic + potential
}
