//! Diagonal covariance kernels `m(Δ)` and the pairings they induce.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::basis::SpectralBasis;
use super::cutoff::CutoffSpec;
use super::field::Field;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Mass of the free field; every kernel uses `Δ + MASS²`.
pub const MASS: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelKind {
    /// `1/(λ+1)` with `λ` the lattice Laplacian eigenvalue of each mode.
    Uncut,
    /// `χ/(λ+1)` or `ψ²/(λ+1)` with the continuum eigenvalue.
    Cut {
        cutoff: CutoffSpec,
    },
    Zero,
    Custom,
}

#[derive(Clone, Debug)]
pub struct CovarianceKernel<T> {
    basis: Arc<SpectralBasis<T>>,
    multiplier: Vec<T>,
    kind: KernelKind,
}

impl<T: Real> CovarianceKernel<T> {
    /// Free-field covariance without cutoff.
    ///
    /// The discretised Laplacian is used here: its Green's function is
    /// reflection positive on the grid, while `1/(k²+1)` truncated at the
    /// Nyquist frequency is not.
    pub fn uncut(basis: Arc<SpectralBasis<T>>) -> Self {
        let mass_sq: T = lit(MASS * MASS);
        let multiplier = basis
            .lattice_eigenvalues()
            .iter()
            .map(|&l| T::one() / (l + mass_sq))
            .collect();
        CovarianceKernel {
            basis,
            multiplier,
            kind: KernelKind::Uncut,
        }
    }

    pub fn cut(basis: Arc<SpectralBasis<T>>, cutoff: CutoffSpec) -> Self {
        let mass_sq: T = lit(MASS * MASS);
        let multiplier = basis
            .eigenvalues()
            .iter()
            .map(|&l| {
                let p = cutoff.multiplier(l);
                p * p / (l + mass_sq)
            })
            .collect();
        CovarianceKernel {
            basis,
            multiplier,
            kind: KernelKind::Cut { cutoff },
        }
    }

    pub fn zero(basis: Arc<SpectralBasis<T>>) -> Self {
        let multiplier = vec![T::zero(); basis.len()];
        CovarianceKernel {
            basis,
            multiplier,
            kind: KernelKind::Zero,
        }
    }

    pub fn custom(basis: Arc<SpectralBasis<T>>, multiplier: Vec<T>) -> Result<Self> {
        if multiplier.len() != basis.len() {
            return Err(Error::Precondition(format!(
                "{} multipliers for {} modes",
                multiplier.len(),
                basis.len()
            )));
        }
        if let Some(k) = multiplier.iter().position(|&m| !(m >= T::zero())) {
            return Err(Error::Precondition(format!("multiplier {k} is negative or NaN")));
        }
        Ok(CovarianceKernel {
            basis,
            multiplier,
            kind: KernelKind::Custom,
        })
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        &self.basis
    }

    pub fn multiplier(&self) -> &[T] {
        &self.multiplier
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn cutoff(&self) -> Option<&CutoffSpec> {
        match &self.kind {
            KernelKind::Cut { cutoff } => Some(cutoff),
            _ => None,
        }
    }

    pub fn mass(&self) -> f64 {
        MASS
    }

    /// Indices of modes with a nonzero multiplier.
    pub fn active_modes(&self) -> Vec<usize> {
        (0..self.multiplier.len())
            .filter(|&k| self.multiplier[k] != T::zero())
            .collect()
    }

    /// `Σ_k m_k ⟨f, e_k⟩⟨h, e_k⟩`.
    pub fn pairing(&self, f: &Field<T>, h: &Field<T>) -> Result<T> {
        covariance_pairing(f, h, self)
    }

    /// `C(x, x) = Σ_k m_k e_k(x)²`.
    pub fn pointwise_variance(&self, node: usize) -> T {
        self.active_modes().into_iter().fold(T::zero(), |acc, k| {
            let e = self.basis.mode_value(k, node);
            acc + self.multiplier[k] * e * e
        })
    }

    /// Covariance of the point values `Φ(x_i)` for the given nodes.
    pub fn node_covariance(&self, nodes: &[usize]) -> DMatrix<T> {
        let active = self.active_modes();
        let table = DMatrix::from_fn(nodes.len(), active.len(), |i, j| {
            let k = active[j];
            self.basis.mode_value(k, nodes[i]) * self.multiplier[k].sqrt()
        });
        let cov = &table * table.transpose();
        (&cov + cov.transpose()) * lit::<T>(0.5)
    }
}

/// Covariance pairing of two fields under `kernel`.
pub fn covariance_pairing<T: Real>(f: &Field<T>, h: &Field<T>, kernel: &CovarianceKernel<T>) -> Result<T> {
    if !f.same_basis(kernel.basis()) || !h.same_basis(kernel.basis()) {
        return Err(Error::GeometryMismatch);
    }
    Ok(f.coeffs()
        .iter()
        .zip(h.coeffs())
        .zip(kernel.multiplier())
        .fold(T::zero(), |acc, ((&a, &b), &m)| acc + m * a * b))
}
