use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bump `exp(−1/(1−t²))`, `t = (x − center)/width`, on `[center − width, center + width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpSpec {
    pub center: f64,
    pub width: f64,
    pub derivative_order_cap: u32,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec {
            center: std::f64::consts::FRAC_PI_2,
            width: 0.3,
            derivative_order_cap: 64,
        }
    }
}

impl BumpSpec {
    pub fn new(center: f64, width: f64) -> Self {
        BumpSpec {
            center,
            width,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::config("bump.width", "must be a positive real"));
        }
        if !(self.center.is_finite() && self.center - self.width > 0.0) {
            return Err(Error::config("bump.center", "bump support must lie in (0, ∞)"));
        }
        if self.derivative_order_cap < 2 || !self.derivative_order_cap.is_multiple_of(2) {
            return Err(Error::config(
                "bump.derivative_order_cap",
                "must be a positive even integer ≥ 2",
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - t * t)).exp()
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() < self.width
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let b = BumpSpec::default();
        b.validate().unwrap();
        assert!((b.value(b.center) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(b.value(b.center + b.width), 0.0);
    }

    #[test]
    fn support_must_avoid_the_origin() {
        assert!(BumpSpec::new(0.2, 0.3).validate().is_err());
        assert!(BumpSpec::new(0.01, 0.005).validate().is_ok());
        let mut odd = BumpSpec::default();
        odd.derivative_order_cap = 7;
        assert!(odd.validate().is_err());
    }
}
