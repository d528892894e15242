//! Real fields held both as node values and as spectral coefficients.

use std::sync::Arc;

use super::basis::SpectralBasis;
use super::cutoff::CutoffSpec;
use super::geometry::Geometry;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real field on the nodes of a geometry. Node values and coefficients are
/// kept in sync at construction; the basis is complete on the node set, so
/// every node vector is represented exactly.
#[derive(Clone, Debug)]
pub struct Field<T> {
    basis: Arc<SpectralBasis<T>>,
    values: Vec<T>,
    coeffs: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn from_values(basis: Arc<SpectralBasis<T>>, values: Vec<T>) -> Self {
        let coeffs = basis.analyze(&values);
        Field { basis, values, coeffs }
    }

    pub fn from_coeffs(basis: Arc<SpectralBasis<T>>, coeffs: Vec<T>) -> Self {
        let values = basis.synthesize(&coeffs);
        Field { basis, values, coeffs }
    }

    /// Samples `f` at node coordinates.
    pub fn from_fn(basis: Arc<SpectralBasis<T>>, f: impl Fn(&[f64]) -> T) -> Self {
        let geom = basis.geometry();
        let values = (0..geom.num_nodes()).map(|v| f(&geom.coordinates(v))).collect();
        Self::from_values(basis, values)
    }

    pub fn zeros(basis: Arc<SpectralBasis<T>>) -> Self {
        let n = basis.len();
        Field {
            basis,
            values: vec![T::zero(); n],
            coeffs: vec![T::zero(); n],
        }
    }

    /// The `k`-th sorted eigenmode.
    pub fn mode(basis: Arc<SpectralBasis<T>>, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); basis.len()];
        coeffs[k] = T::one();
        let values = basis.mode_vector(k);
        Field { basis, values, coeffs }
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        &self.basis
    }

    pub fn geometry(&self) -> &Geometry {
        self.basis.geometry()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn same_basis(&self, basis: &Arc<SpectralBasis<T>>) -> bool {
        Arc::ptr_eq(&self.basis, basis) || self.basis.geometry() == basis.geometry()
    }

    fn check(&self, other: &Field<T>) -> Result<()> {
        if self.same_basis(&other.basis) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }

    /// Multiplies every coefficient by `m(λ_k)`.
    pub fn map_spectrum(&self, m: impl Fn(usize) -> T) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, &c)| c * m(k)).collect();
        Self::from_coeffs(self.basis.clone(), coeffs)
    }

    pub fn apply_cutoff(&self, cutoff: &CutoffSpec) -> Self {
        let basis = self.basis.clone();
        self.map_spectrum(|k| cutoff.multiplier(basis.eigenvalue(k)))
    }

    /// `f ∘ Θ`.
    pub fn reflect(&self) -> Self {
        let geom = self.basis.geometry();
        let values = (0..self.values.len())
            .map(|v| self.values[geom.reflect_node(v)])
            .collect();
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.basis.parities())
            .map(|(&c, &p)| if p < 0 { -c } else { c })
            .collect();
        Field {
            basis: self.basis.clone(),
            values,
            coeffs,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Field {
            basis: self.basis.clone(),
            values: self.values.iter().map(|&x| x * s).collect(),
            coeffs: self.coeffs.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Field<T>) -> Result<Self> {
        self.check(other)?;
        Ok(Field {
            basis: self.basis.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect(),
        })
    }

    /// Pointwise product on nodes.
    pub fn multiply(&self, other: &Field<T>) -> Result<Self> {
        self.check(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect();
        Ok(Self::from_values(self.basis.clone(), values))
    }

    /// Zeroes the field outside `mask`.
    pub fn restrict(&self, mask: &[bool]) -> Self {
        let values = self
            .values
            .iter()
            .zip(mask)
            .map(|(&x, &keep)| if keep { x } else { T::zero() })
            .collect();
        Self::from_values(self.basis.clone(), values)
    }

    /// Quadrature `L²` norm.
    pub fn norm(&self) -> T {
        self.basis.inner(&self.values, &self.values).sqrt()
    }

    /// Euclidean norm of the coefficients.
    pub fn coeff_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt()
    }

    /// Quadrature `L²` norm of the part of the field outside `mask`.
    pub fn norm_outside(&self, mask: &[bool]) -> T {
        let s = self
            .values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| !m)
            .fold(T::zero(), |acc, (&x, _)| acc + x * x);
        (s * self.basis.weight()).sqrt()
    }

    /// `⟨f, g⟩_{L²}` by quadrature.
    pub fn inner(&self, other: &Field<T>) -> Result<T> {
        self.check(other)?;
        Ok(self.basis.inner(&self.values, &other.values))
    }

    /// Highest mode index carrying a nonzero coefficient, if any.
    pub fn top_mode(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != T::zero())
    }
}

/// Free-function form of [`Field::apply_cutoff`].
pub fn apply_cutoff<T: Real>(field: &Field<T>, cutoff: &CutoffSpec) -> Field<T> {
    field.apply_cutoff(cutoff)
}

/// Free-function form of [`Field::reflect`].
pub fn reflect<T: Real>(field: &Field<T>) -> Field<T> {
    field.reflect()
}
