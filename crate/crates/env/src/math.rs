//! Quaternion and Euler-angle utilities.
//!
//! Euler convention throughout: extrinsic XYZ, i.e. a rotation about the world
//! x axis, then world y, then world z, so the matrix form is `Rz * Ry * Rx`.

/// Unit quaternion stored as (x, y, z, w).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        w: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Quat {
        Quat { x, y, z, w }
    }

    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Quat {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n < 1e-12 {
            return Quat::IDENTITY;
        }
        let half = 0.5 * angle;
        let s = half.sin() / n;
        Quat {
            x: axis[0] * s,
            y: axis[1] * s,
            z: axis[2] * s,
            w: half.cos(),
        }
    }

    /// Quaternion for extrinsic XYZ Euler angles (roll, pitch, yaw).
    pub fn from_euler_xyz(e: [f64; 3]) -> Quat {
        let qx = Quat::from_axis_angle([1.0, 0.0, 0.0], e[0]);
        let qy = Quat::from_axis_angle([0.0, 1.0, 0.0], e[1]);
        let qz = Quat::from_axis_angle([0.0, 0.0, 1.0], e[2]);
        qz.mul(&qy).mul(&qx)
    }

    /// Extrinsic XYZ Euler angles (roll, pitch, yaw), each in [-pi, pi].
    ///
    /// At gimbal lock (|pitch| = pi/2) the roll/yaw split is degenerate; the
    /// convention here puts the full twist into yaw and sets roll to zero.
    pub fn to_euler_xyz(&self) -> [f64; 3] {
        let (x, y, z, w) = (self.x, self.y, self.z, self.w);
        let sin_pitch = (2.0 * (w * y - z * x)).clamp(-1.0, 1.0);
        if sin_pitch.abs() > 1.0 - 1e-9 {
            let yaw = 2.0 * x.atan2(w) * sin_pitch.signum();
            return [0.0, sin_pitch.asin(), yaw];
        }
        let roll = (2.0 * (w * x + y * z)).atan2(1.0 - 2.0 * (x * x + y * y));
        let yaw = (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z));
        [roll, sin_pitch.asin(), yaw]
    }

    pub fn mul(&self, rhs: &Quat) -> Quat {
        Quat {
            x: self.w * rhs.x + self.x * rhs.w + self.y * rhs.z - self.z * rhs.y,
            y: self.w * rhs.y - self.x * rhs.z + self.y * rhs.w + self.z * rhs.x,
            z: self.w * rhs.z + self.x * rhs.y - self.y * rhs.x + self.z * rhs.w,
            w: self.w * rhs.w - self.x * rhs.x - self.y * rhs.y - self.z * rhs.z,
        }
    }

    pub fn conjugate(&self) -> Quat {
        Quat {
            x: -self.x,
            y: -self.y,
            z: -self.z,
            w: self.w,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w).sqrt()
    }

    pub fn normalized(&self) -> Quat {
        let n = self.norm();
        Quat {
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
            w: self.w / n,
        }
    }

    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        // v' = q * (v, 0) * q^-1, expanded to avoid building intermediates
        let (x, y, z, w) = (self.x, self.y, self.z, self.w);
        let tx = 2.0 * (y * v[2] - z * v[1]);
        let ty = 2.0 * (z * v[0] - x * v[2]);
        let tz = 2.0 * (x * v[1] - y * v[0]);
        [
            v[0] + w * tx + (y * tz - z * ty),
            v[1] + w * ty + (z * tx - x * tz),
            v[2] + w * tz + (x * ty - y * tx),
        ]
    }

    /// Rotation carrying `prev` to `self`, expressed as angular velocity over `dt`.
    pub fn angular_velocity_from(&self, prev: &Quat, dt: f64) -> [f64; 3] {
        let mut delta = self.mul(&prev.conjugate());
        if delta.w < 0.0 {
            delta = Quat::new(-delta.x, -delta.y, -delta.z, -delta.w);
        }
        let sin_half = (delta.x * delta.x + delta.y * delta.y + delta.z * delta.z).sqrt();
        if sin_half < 1e-12 {
            return [0.0, 0.0, 0.0];
        }
        let angle = 2.0 * sin_half.atan2(delta.w);
        let scale = angle / (sin_half * dt);
        [delta.x * scale, delta.y * scale, delta.z * scale]
    }
}

/// Wraps an angle to [-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = (a + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if r < -std::f64::consts::PI + 1e-15 && a > 0.0 {
        r = std::f64::consts::PI;
    }
    r
}
