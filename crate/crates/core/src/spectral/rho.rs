//! Radial spatial cutoffs `ρ`: 1 on `|x| ≤ core`, 0 on `|x| ≥ support`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis::SpectralBasis;
use super::cutoff::smooth_step;
use super::field::Field;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoSpec {
    pub core: f64,
    pub support: f64,
}

impl RhoSpec {
    pub fn new(core: f64, support: f64) -> Self {
        RhoSpec { core, support }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.core >= 0.0 && self.support > self.core && self.support.is_finite()) {
            return Err(Error::config("rho", "need 0 ≤ core < support < ∞"));
        }
        Ok(())
    }

    /// Profile at distance `r` from the origin.
    pub fn value(&self, r: f64) -> f64 {
        smooth_step((self.support - r.abs()) / (self.support - self.core))
    }

    /// `ρ(|x|)` sampled at the nodes of `basis`, with `|x|` the distance to
    /// node 0.
    pub fn field<T: Real>(&self, basis: Arc<SpectralBasis<T>>) -> Field<T> {
        Field::from_fn(basis, |x| lit(self.value(x.iter().map(|c| c * c).sum::<f64>().sqrt())))
    }

    /// Nodes where `ρ = 1`.
    pub fn core_mask<T: Real>(&self, basis: &SpectralBasis<T>) -> Vec<bool> {
        self.mask(basis, |r| r <= self.core)
    }

    /// Nodes where `ρ > 0`.
    pub fn support_mask<T: Real>(&self, basis: &SpectralBasis<T>) -> Vec<bool> {
        self.mask(basis, |r| r < self.support)
    }

    fn mask<T: Real>(&self, basis: &SpectralBasis<T>, keep: impl Fn(f64) -> bool) -> Vec<bool> {
        let g = basis.geometry();
        (0..g.num_nodes())
            .map(|v| keep(g.coordinates(v).iter().map(|c| c * c).sum::<f64>().sqrt()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, Geometry};

    #[test]
    fn plateau_levels() {
        let rho = RhoSpec::new(2.4, 3.0);
        assert_eq!(rho.value(0.0), 1.0);
        assert_eq!(rho.value(2.4), 1.0);
        assert_eq!(rho.value(-3.0), 0.0);
        let v = rho.value(2.7);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn masks_agree_with_values() {
        let basis = build_basis::<f64>(&Geometry::circle(64).unwrap());
        let rho = RhoSpec::new(2.4, 3.0);
        let f = rho.field(basis.clone());
        let core = rho.core_mask(&basis);
        let supp = rho.support_mask(&basis);
        for v in 0..64 {
            assert_eq!(core[v], f.values()[v] == 1.0);
            assert_eq!(supp[v], f.values()[v] > 0.0);
        }
    }
}
