//! Compact-manifold witness: `f` supported in the plus region with
//! `⟨f, e_k⟩ = δ_{k k*}` for every mode below the cutoff, where `k*` carries
//! the largest odd eigenvalue `λ* ≤ Λ²`. Then `⟨Θf, C_Λ f⟩ = −1/(λ*+1)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::certificate::{WitnessCertificate, WitnessKind};
use crate::error::{Error, Result};
use crate::linalg::lstsq_truncated;
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{CovarianceKernel, CutoffSpec, Field, RegionPartition, SpectralBasis};

pub const TRUNCATION: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CompactWitness<T> {
    pub f: Field<T>,
    pub certificate: WitnessCertificate,
    /// Sorted index of the target mode.
    pub target_mode: usize,
}

/// Index of the mode carrying the largest odd eigenvalue `≤ bound`; ties go
/// to the highest index.
pub fn largest_odd_mode<T: Real>(basis: &SpectralBasis<T>, bound: T) -> Option<usize> {
    let active = basis.count_at_most(bound);
    (0..active).rev().find(|&k| basis.parity(k) < 0)
}

pub fn smallest_odd_eigenvalue<T: Real>(basis: &SpectralBasis<T>) -> Option<T> {
    (0..basis.len())
        .find(|&k| basis.parity(k) < 0)
        .map(|k| basis.eigenvalue(k))
}

pub fn build_compact_witness<T: Real>(
    basis: &Arc<SpectralBasis<T>>,
    lambda: f64,
    region: &RegionPartition,
) -> Result<CompactWitness<T>> {
    build_compact_witness_within(basis, lambda, region, None)
}

/// As [`build_compact_witness`], with the support further restricted to
/// `support_mask`.
pub fn build_compact_witness_within<T: Real>(
    basis: &Arc<SpectralBasis<T>>,
    lambda: f64,
    region: &RegionPartition,
    support_mask: Option<&[bool]>,
) -> Result<CompactWitness<T>> {
    let geom = basis.geometry();
    region.validate(geom)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::config("cutoff.lambda", "must be a positive real"));
    }
    let lambda_sq = lambda * lambda;
    let target = largest_odd_mode(basis, lit(lambda_sq)).ok_or_else(|| Error::NoOddModeBelowCutoff {
        lambda_sq,
        smallest_odd: smallest_odd_eigenvalue(basis).map_or(f64::NAN, to_f64),
    })?;
    let support: Vec<usize> = (0..geom.num_nodes())
        .filter(|&v| region.plus[v] && support_mask.is_none_or(|m| m[v]))
        .collect();
    if support.is_empty() {
        return Err(Error::Precondition(
            "plus region (within the support mask) is empty".into(),
        ));
    }

    let active = basis.count_at_most(lit(lambda_sq));
    let w = basis.weight();
    let rows: Vec<Vec<T>> = (0..active).map(|k| basis.mode_vector(k)).collect();
    let m = DMatrix::from_fn(active, support.len(), |k, j| w * rows[k][support[j]]);
    let mut rhs = DVector::zeros(active);
    rhs[target] = T::one();
    let sol = lstsq_truncated(&m, &rhs, lit(TRUNCATION))?;
    if sol.rank < active {
        return Err(Error::RankDeficient {
            singular_value: to_f64(sol.singular_values.get(sol.rank).copied().unwrap_or_else(T::zero)),
            index: sol.rank,
            largest: to_f64(sol.largest_singular_value()),
        });
    }

    let mut values = vec![T::zero(); geom.num_nodes()];
    for (j, &v) in support.iter().enumerate() {
        values[v] = sol.x[j];
    }
    let f = Field::from_values(basis.clone(), values);
    let residual = f.coeffs()[..active]
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let want = if k == target { T::one() } else { T::zero() };
            to_f64((c - want).abs())
        })
        .fold(0.0, f64::max);

    let kernel = CovarianceKernel::cut(basis.clone(), CutoffSpec::sharp(lambda));
    let value = to_f64(kernel.pairing(&f.reflect(), &f)?);
    let lambda_star = to_f64(basis.eigenvalue(target));
    if !(value < 0.0) {
        return Err(Error::ConstructionFailed {
            reason: "reflected pairing of the least-squares solution is not negative".into(),
            best: value,
        });
    }
    let mut certificate = WitnessCertificate::new(WitnessKind::Compact, value)
        .param("lambda", lambda)
        .param("constraints", active as f64)
        .param("support_nodes", support.len() as f64)
        .param("target_mode", target as f64)
        .param(
            "smallest_odd_eigenvalue",
            smallest_odd_eigenvalue(basis).map_or(f64::NAN, to_f64),
        );
    certificate.predicted = Some(-1.0 / (lambda_star + 1.0));
    certificate.lambda_star = Some(lambda_star);
    certificate.residual = Some(residual);
    certificate.smallest_singular_value = Some(to_f64(sol.smallest_retained()));
    Ok(CompactWitness {
        f,
        certificate,
        target_mode: target,
    })
}
