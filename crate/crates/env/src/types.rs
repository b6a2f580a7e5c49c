use crate::math::Quat;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
    #[error("action has {got} entries, expected {expected}")]
    ActionDim { expected: usize, got: usize },
    #[error("no expert task registered for `{0}`")]
    UnknownTask(String),
    #[error("pose has {got} joints, expected {expected}")]
    PoseShape { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Static description of a world model: state space, action space, timing.
#[derive(Clone, Debug)]
pub struct EnvSpec {
    pub name: &'static str,
    pub joint_names: &'static [&'static str],
    pub action_dim: usize,
    pub dt: f64,
    pub episode_length: usize,
    pub up_axis: char,
}

impl EnvSpec {
    pub fn num_joints(&self) -> usize {
        self.joint_names.len()
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joint_names.iter().position(|j| *j == name)
    }

    /// Flattened observation width: 13 channels per joint.
    pub fn obs_dim(&self) -> usize {
        13 * self.num_joints()
    }
}

/// Physical state of one joint: 13 channels laid out as
/// pos `[:3]`, rot quaternion (x,y,z,w) `[3:7]`, vel `[7:10]`, ang_vel `[10:13]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointState {
    pub pos: [f64; 3],
    pub rot: Quat,
    pub vel: [f64; 3],
    pub ang_vel: [f64; 3],
}

impl JointState {
    pub fn at_rest(pos: [f64; 3], rot: Quat) -> JointState {
        JointState {
            pos,
            rot,
            vel: [0.0; 3],
            ang_vel: [0.0; 3],
        }
    }
}

/// Per-joint state embedding consumed by both reward paths and the policy.
#[derive(Clone, Debug, PartialEq)]
pub struct StateEmbed {
    pub joints: Vec<JointState>,
}

impl StateEmbed {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(13 * self.joints.len());
        for j in &self.joints {
            out.extend_from_slice(&j.pos);
            out.extend_from_slice(&[j.rot.x, j.rot.y, j.rot.z, j.rot.w]);
            out.extend_from_slice(&j.vel);
            out.extend_from_slice(&j.ang_vel);
        }
        out
    }
}

/// Joint-wise Euler angles (radians), each row (roll, pitch, yaw) in [-pi, pi].
#[derive(Clone, Debug, PartialEq)]
pub struct PoseVector {
    pub theta: Vec<[f64; 3]>,
}

impl PoseVector {
    pub fn num_joints(&self) -> usize {
        self.theta.len()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.theta.iter().flatten().copied().collect()
    }

    pub fn from_flat(v: &[f64]) -> PoseVector {
        assert_eq!(v.len() % 3, 0, "flat pose length must be a multiple of 3");
        PoseVector {
            theta: v.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        for row in &self.theta {
            for a in row {
                if !a.is_finite() {
                    return Err(EnvError::NonFinite("pose angle"));
                }
                if a.abs() > std::f64::consts::PI + 1e-9 {
                    return Err(EnvError::NonFinite("pose angle out of [-pi, pi]"));
                }
            }
        }
        Ok(())
    }
}

/// Environment-specific dynamics memory carried alongside the embedding.
#[derive(Clone, Debug, PartialEq)]
pub enum Dynamics {
    Cartpole {
        x: f64,
        x_dot: f64,
        theta: f64,
        theta_dot: f64,
    },
    PlanarRunner {
        pos: [f64; 3],
        vel: [f64; 3],
        yaw: f64,
        yaw_rate: f64,
    },
    StickHumanoid {
        /// Local Euler angles per joint, extrinsic XYZ.
        angles: Vec<[f64; 3]>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvState {
    pub step_index: usize,
    pub embed: StateEmbed,
    pub dynamics: Dynamics,
}
