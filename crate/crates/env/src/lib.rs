//! World-model core: three toy environments behind one functional API.
//!
//! States are self-contained values: `step` is a pure function of
//! (spec, state, action), so a seed plus an action sequence replays a
//! trajectory bit for bit.

pub mod cartpole;
pub mod math;
pub mod planar_runner;
pub mod stick_humanoid;
mod types;

pub use math::Quat;
pub use types::{Dynamics, EnvError, EnvSpec, EnvState, JointState, PoseVector, StateEmbed};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ENV_NAMES: [&str; 3] = ["cartpole", "planar_runner", "stick_humanoid"];

/// Looks up a registered environment spec by name.
pub fn env_spec(name: &str) -> Result<&'static EnvSpec, EnvError> {
    match name {
        "cartpole" => Ok(&cartpole::SPEC),
        "planar_runner" => Ok(&planar_runner::SPEC),
        "stick_humanoid" => Ok(&stick_humanoid::SPEC),
        other => Err(EnvError::UnknownEnv(other.to_string())),
    }
}

pub fn reset(spec: &EnvSpec, seed: u64) -> EnvState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec.name {
        "cartpole" => cartpole::reset(&mut rng),
        "planar_runner" => planar_runner::reset(&mut rng),
        "stick_humanoid" => stick_humanoid::reset(&mut rng),
        other => panic!("unregistered env `{other}`"),
    }
}

pub fn step(spec: &EnvSpec, state: &EnvState, action: &[f64]) -> Result<(EnvState, bool), EnvError> {
    if action.len() != spec.action_dim {
        return Err(EnvError::ActionDim {
            expected: spec.action_dim,
            got: action.len(),
        });
    }
    Ok(match spec.name {
        "cartpole" => cartpole::step(state, action),
        "planar_runner" => planar_runner::step(state, action),
        "stick_humanoid" => stick_humanoid::step(state, action),
        other => panic!("unregistered env `{other}`"),
    })
}

/// Joint-wise Euler angles extracted from the rot channel, wrapped to [-pi, pi].
pub fn pose_of(state: &EnvState) -> PoseVector {
    PoseVector {
        theta: state
            .embed
            .joints
            .iter()
            .map(|j| j.rot.to_euler_xyz())
            .collect(),
    }
}

/// Builds a rest state whose rot channel realizes the given pose.
/// Only the stick humanoid supports arbitrary poses; the other environments
/// have lower-dimensional pose manifolds (cartpole: pole pitch, runner: yaw).
pub fn inject_pose(spec: &EnvSpec, pose: &PoseVector) -> Result<EnvState, EnvError> {
    if pose.num_joints() != spec.num_joints() {
        return Err(EnvError::PoseShape {
            expected: spec.num_joints(),
            got: pose.num_joints(),
        });
    }
    pose.validate()?;
    match spec.name {
        "stick_humanoid" => Ok(stick_humanoid::state_from_angles(&pose.theta)),
        other => Err(EnvError::UnknownTask(other.to_string())),
    }
}

/// Per-environment expert shaping, used by evaluation only.
pub fn expert_reward(spec: &EnvSpec, state: &EnvState) -> Result<f64, EnvError> {
    match spec.name {
        "cartpole" => Ok(cartpole::expert_reward(state)),
        "planar_runner" => Ok(planar_runner::expert_reward(state)),
        other => Err(EnvError::UnknownTask(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn reset_is_deterministic() {
        for name in ENV_NAMES {
            let spec = env_spec(name).unwrap();
            assert_eq!(reset(spec, 7), reset(spec, 7), "{name}");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let spec = env_spec("planar_runner").unwrap();
        assert_ne!(reset(spec, 3), reset(spec, 4));
    }

    #[test]
    fn humanoid_reset_velocities_zero() {
        let spec = env_spec("stick_humanoid").unwrap();
        let state = reset(spec, 0);
        for j in &state.embed.joints {
            assert_eq!(j.vel, [0.0; 3]);
            assert_eq!(j.ang_vel, [0.0; 3]);
        }
    }

    #[test]
    fn action_dim_checked() {
        let spec = env_spec("cartpole").unwrap();
        let state = reset(spec, 0);
        assert!(matches!(
            step(spec, &state, &[0.0, 0.0]),
            Err(EnvError::ActionDim { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn cartpole_equilibrium() {
        // exactly upright and at rest: zero action leaves the pole angle alone
        let spec = env_spec("cartpole").unwrap();
        let state = EnvState {
            step_index: 0,
            embed: reset(spec, 0).embed,
            dynamics: Dynamics::Cartpole {
                x: 0.0,
                x_dot: 0.0,
                theta: 0.0,
                theta_dot: 0.0,
            },
        };
        let (next, done) = step(spec, &state, &[0.0]).unwrap();
        let Dynamics::Cartpole { theta, .. } = next.dynamics else {
            unreachable!();
        };
        assert!(theta.abs() < 1e-9);
        assert!(!done);
    }

    #[test]
    fn runner_constant_action_moves_forward_in_x() {
        let spec = env_spec("planar_runner").unwrap();
        let mut state = reset(spec, 1);
        let mut xs = Vec::new();
        for _ in 0..10 {
            let (next, _) = step(spec, &state, &[1.0, 0.0, 0.0]).unwrap();
            xs.push(next.embed.joints[0].pos[0]);
            state = next;
        }
        for w in xs.windows(2) {
            assert!(w[1] > w[0], "root x not strictly increasing: {xs:?}");
        }
        let Dynamics::PlanarRunner { pos, .. } = reset(spec, 1).dynamics else {
            unreachable!();
        };
        assert!(xs[0] > pos[0]);
    }

    #[test]
    fn humanoid_tracking_fixed_point() {
        let spec = env_spec("stick_humanoid").unwrap();
        let state = reset(spec, 5);
        let Dynamics::StickHumanoid { angles } = &state.dynamics else {
            unreachable!();
        };
        let action: Vec<f64> = angles
            .iter()
            .flatten()
            .map(|a| a / std::f64::consts::PI)
            .collect();
        let (next, _) = step(spec, &state, &action).unwrap();
        let Dynamics::StickHumanoid { angles: after } = &next.dynamics else {
            unreachable!();
        };
        for (a, b) in angles.iter().zip(after) {
            for c in 0..3 {
                assert_abs_diff_eq!(a[c], b[c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pose_of_identity_quaternions() {
        let spec = env_spec("stick_humanoid").unwrap();
        let zero = PoseVector {
            theta: vec![[0.0; 3]; 15],
        };
        let state = inject_pose(spec, &zero).unwrap();
        let pose = pose_of(&state);
        assert_eq!(pose.theta, vec![[0.0; 3]; 15]);
    }

    #[test]
    fn pose_of_z_rotation() {
        let mut theta = vec![[0.0; 3]; 15];
        theta[0] = [0.0, 0.0, FRAC_PI_2];
        let spec = env_spec("stick_humanoid").unwrap();
        let state = inject_pose(spec, &PoseVector { theta }).unwrap();
        let pose = pose_of(&state);
        assert_abs_diff_eq!(pose.theta[0][0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pose.theta[0][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pose.theta[0][2], FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn expert_rewards() {
        let runner = env_spec("planar_runner").unwrap();
        let state = EnvState {
            step_index: 1,
            embed: StateEmbed {
                joints: vec![JointState {
                    pos: [0.0; 3],
                    rot: Quat::IDENTITY,
                    vel: [0.0, 2.0, 0.0],
                    ang_vel: [0.0; 3],
                }],
            },
            dynamics: Dynamics::PlanarRunner {
                pos: [0.0; 3],
                vel: [0.0, 2.0, 0.0],
                yaw: 0.0,
                yaw_rate: 0.0,
            },
        };
        assert_eq!(expert_reward(runner, &state).unwrap(), 2.0);

        let cp = env_spec("cartpole").unwrap();
        let upright = EnvState {
            step_index: 0,
            embed: reset(cp, 0).embed,
            dynamics: Dynamics::Cartpole {
                x: 0.0,
                x_dot: 0.0,
                theta: 0.0,
                theta_dot: 0.0,
            },
        };
        assert_eq!(expert_reward(cp, &upright).unwrap(), 1.0);
        let at_limit = EnvState {
            dynamics: Dynamics::Cartpole {
                x: 0.0,
                x_dot: 0.0,
                theta: 0.4,
                theta_dot: 0.0,
            },
            ..upright
        };
        // cos(0.4), hand-checked
        assert_abs_diff_eq!(
            expert_reward(cp, &at_limit).unwrap(),
            0.921060994002885,
            epsilon = 1e-12
        );

        let hum = env_spec("stick_humanoid").unwrap();
        assert!(expert_reward(hum, &reset(hum, 0)).is_err());
    }
}
