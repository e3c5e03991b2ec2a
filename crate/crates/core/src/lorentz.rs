//! Vector algebra of Minkowski 3-space with signature (-, +, +).
//!
//! The first coordinate is the timelike axis. All operations are exact
//! polynomial expressions in the components; only the causal
//! classification needs a tolerance.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Default width of the null band used by [`causal_character`].
pub const DEFAULT_TOL_NULL: f64 = 1e-9;

/// A vector of Minkowski 3-space. `x1` is the timelike coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkVec3 {
    pub const ZERO: MinkVec3 = MinkVec3::new(0.0, 0.0, 0.0);
    pub const E1: MinkVec3 = MinkVec3::new(1.0, 0.0, 0.0);
    pub const E2: MinkVec3 = MinkVec3::new(0.0, 1.0, 0.0);
    pub const E3: MinkVec3 = MinkVec3::new(0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MinkVec3 { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Largest absolute component.
    pub fn norm_inf(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    pub fn inner(self, other: MinkVec3) -> f64 {
        minkowski_inner(self, other)
    }

    pub fn cross(self, other: MinkVec3) -> MinkVec3 {
        minkowski_cross(self, other)
    }

    /// `<x, x>`.
    pub fn norm_sq(self) -> f64 {
        minkowski_inner(self, self)
    }
}

impl fmt::Display for MinkVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

impl From<[f64; 3]> for MinkVec3 {
    fn from(a: [f64; 3]) -> Self {
        MinkVec3::new(a[0], a[1], a[2])
    }
}

impl Add for MinkVec3 {
    type Output = MinkVec3;
    fn add(self, o: MinkVec3) -> MinkVec3 {
        MinkVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MinkVec3 {
    fn add_assign(&mut self, o: MinkVec3) {
        *self = *self + o;
    }
}

impl Sub for MinkVec3 {
    type Output = MinkVec3;
    fn sub(self, o: MinkVec3) -> MinkVec3 {
        MinkVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for MinkVec3 {
    type Output = MinkVec3;
    fn neg(self) -> MinkVec3 {
        MinkVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for MinkVec3 {
    type Output = MinkVec3;
    fn mul(self, k: f64) -> MinkVec3 {
        MinkVec3::new(self.x1 * k, self.x2 * k, self.x3 * k)
    }
}

impl Mul<MinkVec3> for f64 {
    type Output = MinkVec3;
    fn mul(self, v: MinkVec3) -> MinkVec3 {
        v * self
    }
}

impl Div<f64> for MinkVec3 {
    type Output = MinkVec3;
    fn div(self, k: f64) -> MinkVec3 {
        MinkVec3::new(self.x1 / k, self.x2 / k, self.x3 / k)
    }
}

/// Causal character of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

impl CausalCharacter {
    /// `<x,x>` sign of a unit vector of this character; `None` for lightlike.
    pub fn sign(self) -> Option<f64> {
        match self {
            CausalCharacter::Spacelike => Some(1.0),
            CausalCharacter::Timelike => Some(-1.0),
            CausalCharacter::Lightlike => None,
        }
    }

    pub fn from_sign(sign: f64) -> Self {
        if sign < 0.0 {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Spacelike
        }
    }
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalCharacter::Spacelike => "spacelike",
            CausalCharacter::Timelike => "timelike",
            CausalCharacter::Lightlike => "lightlike",
        };
        f.write_str(s)
    }
}

/// `-x1 y1 + x2 y2 + x3 y3`.
pub fn minkowski_inner(x: MinkVec3, y: MinkVec3) -> f64 {
    -x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3
}

/// Lorentzian vector product; orthogonal to both factors under [`minkowski_inner`].
pub fn minkowski_cross(x: MinkVec3, y: MinkVec3) -> MinkVec3 {
    MinkVec3::new(
        x.x2 * y.x3 - x.x3 * y.x2,
        x.x1 * y.x3 - x.x3 * y.x1,
        -(x.x1 * y.x2 - x.x2 * y.x1),
    )
}

fn null_band(x: MinkVec3, tol_null: f64) -> f64 {
    let m = x.norm_inf();
    tol_null * (m * m).max(1.0)
}

/// Classify `x`. The band `tol_null * max(1, |x|_inf^2)` around zero counts as
/// lightlike, which keeps the verdict invariant under uniform scaling for
/// vectors of size at least one. The zero vector is spacelike.
pub fn causal_character(x: MinkVec3, tol_null: f64) -> CausalCharacter {
    if x == MinkVec3::ZERO {
        return CausalCharacter::Spacelike;
    }
    let q = x.norm_sq();
    let band = null_band(x, tol_null);
    if q > band {
        CausalCharacter::Spacelike
    } else if q < -band {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    }
}

/// Scale `x` to `<u,u> = sigma`, returning `(u, sigma)`.
pub fn lorentz_normalize(x: MinkVec3, tol_null: f64) -> Result<(MinkVec3, f64)> {
    let q = x.norm_sq();
    if q.abs() <= null_band(x, tol_null) {
        return Err(GeometryError::NullVector { norm_sq: q });
    }
    let sigma = q.signum();
    Ok((x / q.abs().sqrt(), sigma))
}
