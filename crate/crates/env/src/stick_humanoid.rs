//! Kinematic stick humanoid over the 15-bone SMPL naming. Actions set
//! per-angle targets (scaled by pi) that each joint tracks with first-order
//! dynamics. Positions come from forward kinematics over a fixed skeleton;
//! the rot channel stores the local joint quaternion so pose extraction is
//! an exact inverse of the angle state.

use crate::math::Quat;
use crate::types::{Dynamics, EnvSpec, EnvState, JointState, StateEmbed};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SPEC: EnvSpec = EnvSpec {
    name: "stick_humanoid",
    joint_names: &[
        "pelvis",
        "torso",
        "head",
        "right_upper_arm",
        "right_lower_arm",
        "right_hand",
        "left_upper_arm",
        "left_lower_arm",
        "left_hand",
        "right_thigh",
        "right_shin",
        "right_foot",
        "left_thigh",
        "left_shin",
        "left_foot",
    ],
    action_dim: 45,
    dt: 1.0 / 30.0,
    episode_length: 300,
    up_axis: 'z',
};

/// Tracking gain (1/s): angle += K_TRACK * (target - angle) * dt.
pub const K_TRACK: f64 = 8.0;

/// Parent joint index per bone; pelvis is the root.
const PARENT: [usize; 15] = [usize::MAX, 0, 1, 1, 3, 4, 1, 6, 7, 0, 9, 10, 0, 12, 13];

/// Bone offset from the parent joint, in the parent frame (meters).
/// Right side is -x, forward +y, up +z; the pelvis sits 1 m above ground.
const OFFSET: [[f64; 3]; 15] = [
    [0.0, 0.0, 1.0],
    [0.0, 0.0, 0.25],
    [0.0, 0.0, 0.30],
    [-0.20, 0.0, 0.22],
    [0.0, 0.0, -0.28],
    [0.0, 0.0, -0.25],
    [0.20, 0.0, 0.22],
    [0.0, 0.0, -0.28],
    [0.0, 0.0, -0.25],
    [-0.10, 0.0, -0.05],
    [0.0, 0.0, -0.42],
    [0.0, 0.0, -0.40],
    [0.10, 0.0, -0.05],
    [0.0, 0.0, -0.42],
    [0.0, 0.0, -0.40],
];

pub fn reset(rng: &mut ChaCha8Rng) -> EnvState {
    let angles: Vec<[f64; 3]> = (0..15)
        .map(|_| {
            [
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
            ]
        })
        .collect();
    state_from_angles(&angles)
}

/// State at the given local angles with zero velocities (step_index 0).
pub fn state_from_angles(angles: &[[f64; 3]]) -> EnvState {
    assert_eq!(angles.len(), 15);
    let rots: Vec<Quat> = angles.iter().map(|a| Quat::from_euler_xyz(*a)).collect();
    let pos = forward_kinematics(&rots);
    let joints = (0..15)
        .map(|j| JointState::at_rest(pos[j], rots[j]))
        .collect();
    EnvState {
        step_index: 0,
        embed: StateEmbed { joints },
        dynamics: Dynamics::StickHumanoid {
            angles: angles.to_vec(),
        },
    }
}

pub fn step(state: &EnvState, action: &[f64]) -> (EnvState, bool) {
    let Dynamics::StickHumanoid { angles } = &state.dynamics else {
        unreachable!("stick_humanoid step on foreign state");
    };
    let dt = SPEC.dt;
    let mut new_angles = angles.clone();
    for j in 0..15 {
        for c in 0..3 {
            let target = std::f64::consts::PI * action[3 * j + c].clamp(-1.0, 1.0);
            new_angles[j][c] += K_TRACK * (target - new_angles[j][c]) * dt;
        }
    }

    let old_rots: Vec<Quat> = angles.iter().map(|a| Quat::from_euler_xyz(*a)).collect();
    let old_pos = forward_kinematics(&old_rots);
    let new_rots: Vec<Quat> = new_angles.iter().map(|a| Quat::from_euler_xyz(*a)).collect();
    let new_pos = forward_kinematics(&new_rots);

    let joints = (0..15)
        .map(|j| JointState {
            pos: new_pos[j],
            rot: new_rots[j],
            vel: [
                (new_pos[j][0] - old_pos[j][0]) / dt,
                (new_pos[j][1] - old_pos[j][1]) / dt,
                (new_pos[j][2] - old_pos[j][2]) / dt,
            ],
            ang_vel: new_rots[j].angular_velocity_from(&old_rots[j], dt),
        })
        .collect();

    let step_index = state.step_index + 1;
    let done = step_index >= SPEC.episode_length;
    (
        EnvState {
            step_index,
            embed: StateEmbed { joints },
            dynamics: Dynamics::StickHumanoid { angles: new_angles },
        },
        done,
    )
}

fn forward_kinematics(local_rots: &[Quat]) -> Vec<[f64; 3]> {
    let mut global_rot = vec![Quat::IDENTITY; 15];
    let mut global_pos = vec![[0.0; 3]; 15];
    for j in 0..15 {
        if PARENT[j] == usize::MAX {
            global_rot[j] = local_rots[j];
            global_pos[j] = OFFSET[j];
        } else {
            let p = PARENT[j];
            global_rot[j] = global_rot[p].mul(&local_rots[j]).normalized();
            let off = global_rot[p].rotate(OFFSET[j]);
            global_pos[j] = [
                global_pos[p][0] + off[0],
                global_pos[p][1] + off[1],
                global_pos[p][2] + off[2],
            ];
        }
    }
    global_pos
}
