//! The DFS coordinate transform `phi: T^2 -> S^2`,
//! `phi(lambda, theta) = (cos lambda sin theta, sin lambda sin theta, cos theta)`,
//! together with its inverse on the fundamental domain and its Jacobian.

use std::f64::consts::{PI, TAU};

use crate::error::{DfsError, Result};

/// Maximum deviation from unit norm accepted by [`dfs_coord_inverse`].
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// Reduce an angle to the canonical interval `[-pi, pi)`.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x - TAU * ((x + PI) / TAU).floor();
    // rounding can land exactly on +pi
    if r >= PI {
        r - TAU
    } else if r < -PI {
        -PI
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub const NORTH_POLE: SpherePoint = SpherePoint { x: 0.0, y: 0.0, z: 1.0 };
    pub const SOUTH_POLE: SpherePoint = SpherePoint { x: 0.0, y: 0.0, z: -1.0 };

    /// Construct without normalizing. Use [`SpherePoint::normalized`] for raw vectors.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(DfsError::NotUnit { norm: n });
        }
        Ok(Self::new(x / n, y / n, z / n))
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// A point `(lambda, theta)` of the torus, both angles in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub lambda: f64,
    pub theta: f64,
}

impl TorusPoint {
    pub fn new(lambda: f64, theta: f64) -> Self {
        Self {
            lambda: reduce_angle(lambda),
            theta: reduce_angle(theta),
        }
    }

    /// Keep the angles as given. Needed where a representative outside
    /// `[-pi, pi)` matters, e.g. `theta = pi` for the south pole.
    pub const fn raw(lambda: f64, theta: f64) -> Self {
        Self { lambda, theta }
    }

    /// Flat distance in `R^2` between the stored representatives.
    pub fn flat_distance(&self, other: &TorusPoint) -> f64 {
        (self.lambda - other.lambda).hypot(self.theta - other.theta)
    }
}

/// The 3x2 Jacobian of `phi`; column 0 is `d/d lambda`, column 1 is `d/d theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian23(pub [[f64; 2]; 3]);

impl Jacobian23 {
    pub fn apply(&self, h: [f64; 2]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * h[0] + m[0][1] * h[1],
            m[1][0] * h[0] + m[1][1] * h[1],
            m[2][0] * h[0] + m[2][1] * h[1],
        ]
    }

    pub fn column(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }
}

pub fn dfs_coord(p: TorusPoint) -> SpherePoint {
    let (sl, cl) = p.lambda.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    SpherePoint::new(cl * st, sl * st, ct)
}

/// Inverse of the longitude-latitude transform on
/// `[-pi, pi) x (0, pi)` plus the poles `(0, 0)` and `(0, pi)`.
///
/// Poles return `lambda = 0`. The south pole is returned as the raw point
/// `(0, pi)` rather than its reduced representative `(0, -pi)`.
pub fn dfs_coord_inverse(p: SpherePoint) -> Result<TorusPoint> {
    let norm = p.norm();
    if !((norm - 1.0).abs() <= UNIT_NORM_TOLERANCE) {
        return Err(DfsError::NotUnit { norm });
    }
    let rho = p.x.hypot(p.y);
    if rho == 0.0 {
        let theta = if p.z > 0.0 { 0.0 } else { PI };
        return Ok(TorusPoint::raw(0.0, theta));
    }
    // atan2 keeps full accuracy near the poles where acos(z) would not
    let theta = rho.atan2(p.z);
    let lambda = reduce_angle(p.y.atan2(p.x));
    Ok(TorusPoint::raw(lambda, theta))
}

pub fn glide_reflect(p: TorusPoint) -> TorusPoint {
    TorusPoint::new(p.lambda + PI, -p.theta)
}

pub fn jacobian(p: TorusPoint) -> Jacobian23 {
    let (sl, cl) = p.lambda.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    Jacobian23([
        [-sl * st, cl * ct],
        [cl * st, sl * ct],
        [0.0, -st],
    ])
}
