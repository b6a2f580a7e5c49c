use crate::EvalError;
use grove_env::StateEmbed;

/// Mean change in joint acceleration along a trajectory: accelerations by
/// central second difference of joint positions, then the L2 norm of each
/// consecutive acceleration delta, averaged over interior steps and joints.
/// Lower is smoother; constant-acceleration motion scores exactly 0.
pub fn smoothness(frames: &[StateEmbed], dt: f64) -> Result<f64, EvalError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(EvalError::BadDt);
    }
    if frames.len() < 4 {
        return Err(EvalError::ShortTrajectory { got: frames.len() });
    }
    let joints = frames[0].joints.len();
    if joints == 0 {
        return Err(EvalError::NoJoints);
    }
    for (frame, f) in frames.iter().enumerate() {
        if f.joints.len() != joints {
            return Err(EvalError::JointCountMismatch {
                frame,
                expected: joints,
                got: f.joints.len(),
            });
        }
    }

    let dt2 = dt * dt;
    let accel = |t: usize, j: usize| -> [f64; 3] {
        let prev = frames[t - 1].joints[j].pos;
        let here = frames[t].joints[j].pos;
        let next = frames[t + 1].joints[j].pos;
        [
            (next[0] - 2.0 * here[0] + prev[0]) / dt2,
            (next[1] - 2.0 * here[1] + prev[1]) / dt2,
            (next[2] - 2.0 * here[2] + prev[2]) / dt2,
        ]
    };

    let mut total = 0.0;
    let mut count = 0usize;
    for t in 1..frames.len() - 2 {
        for j in 0..joints {
            let a = accel(t, j);
            let b = accel(t + 1, j);
            let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            total += (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            count += 1;
        }
    }
    Ok(total / count as f64)
}
