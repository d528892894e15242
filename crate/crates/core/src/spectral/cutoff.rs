//! Spectral cutoffs `Π_Λ` and their smooth analogues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub const DEFAULT_SMOOTH_WIDTH: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    Sharp,
    Smooth,
}

/// Cutoff at frequency `Λ`. For the smooth kind the multiplier is `ψ(√λ/Λ)`
/// with `ψ` the plateau of the given `width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub lambda: f64,
    pub kind: CutoffKind,
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_width() -> f64 {
    DEFAULT_SMOOTH_WIDTH
}

impl CutoffSpec {
    pub fn sharp(lambda: f64) -> Self {
        CutoffSpec {
            lambda,
            kind: CutoffKind::Sharp,
            width: DEFAULT_SMOOTH_WIDTH,
        }
    }

    pub fn smooth(lambda: f64, width: f64) -> Self {
        CutoffSpec {
            lambda,
            kind: CutoffKind::Smooth,
            width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::config("cutoff.lambda", "must be a positive real"));
        }
        if self.kind == CutoffKind::Smooth && !(self.width > 0.0 && self.width <= 1.0) {
            return Err(Error::config("cutoff.width", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda * self.lambda
    }

    /// Multiplier applied to a mode of Laplacian eigenvalue `eigenvalue`.
    pub fn multiplier<T: Real>(&self, eigenvalue: T) -> T {
        let l: T = lit(self.lambda);
        match self.kind {
            CutoffKind::Sharp => {
                if eigenvalue <= l * l * lit(1.0 + 1e-12) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            CutoffKind::Smooth => plateau(eigenvalue.max(T::zero()).sqrt() / l, lit(self.width)),
        }
    }
}

/// Smooth step from 0 at `s ≤ 0` to 1 at `s ≥ 1`, built from `exp(-1/s)`.
pub fn smooth_step<T: Real>(s: T) -> T {
    if s <= T::zero() {
        return T::zero();
    }
    if s >= T::one() {
        return T::one();
    }
    let e = |x: T| (-T::one() / x).exp();
    let a = e(s);
    a / (a + e(T::one() - s))
}

/// Even `C^∞` plateau: 1 on `|x| ≤ 1 − width`, 0 on `|x| ≥ 1`.
pub fn plateau<T: Real>(x: T, width: T) -> T {
    let r = x.abs();
    smooth_step((T::one() - r) / width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_is_an_indicator() {
        let c = CutoffSpec::sharp(3.0);
        assert_eq!(c.multiplier(9.0f64), 1.0);
        assert_eq!(c.multiplier(4.0f64), 1.0);
        assert_eq!(c.multiplier(16.0f64), 0.0);
    }

    #[test]
    fn smooth_profile_shape() {
        let c = CutoffSpec::smooth(2.0, 0.25);
        assert_eq!(c.multiplier(0.0f64), 1.0);
        assert_eq!(c.multiplier(2.25f64), 1.0);
        assert_eq!(c.multiplier(4.0f64), 0.0);
        let mid = c.multiplier(1.75f64 * 1.75);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((plateau(0.875f64, 0.25) - 0.5).abs() < 1e-15);
        assert_eq!(plateau(-0.5f64, 0.25), plateau(0.5f64, 0.25));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CutoffSpec::sharp(0.0).validate().is_err());
        assert!(CutoffSpec::smooth(1.0, 1.5).validate().is_err());
    }
}
