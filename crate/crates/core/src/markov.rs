//! Gaussian conditioning probes of the spatial Markov property.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pinv_symmetric, symmetric_eigen, symmetry_defect};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::CovarianceKernel;

pub const PINV_CUTOFF: f64 = 1e-12;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Centred Gaussian vector indexed by `sites`.
#[derive(Clone, Debug)]
pub struct GaussianModel<T: Real> {
    sites: Vec<usize>,
    covariance: DMatrix<T>,
    /// `R` with `Σ = R Rᵀ`.
    factor: DMatrix<T>,
}

impl<T: Real> GaussianModel<T> {
    pub fn new(sites: Vec<usize>, covariance: DMatrix<T>) -> Result<Self> {
        if covariance.nrows() != sites.len() || covariance.ncols() != sites.len() {
            return Err(Error::Precondition(format!(
                "covariance is {}×{} for {} sites",
                covariance.nrows(),
                covariance.ncols(),
                sites.len()
            )));
        }
        let scale = covariance.iter().fold(0.0f64, |m, &x| m.max(to_f64(x).abs())).max(1.0);
        let defect = to_f64(symmetry_defect(&covariance));
        if defect > 1e-12 * scale {
            return Err(Error::NotSymmetric { defect });
        }
        let (vals, vecs) = symmetric_eigen(&covariance);
        if let Some(&min) = vals.first() {
            let min = to_f64(min);
            if min < -1e-10 * scale {
                return Err(Error::Precondition(format!("covariance has eigenvalue {min:e} < 0")));
            }
        }
        let mut factor = vecs;
        for (j, &v) in vals.iter().enumerate() {
            let root = v.max(T::zero()).sqrt();
            factor.column_mut(j).scale_mut(root);
        }
        Ok(GaussianModel {
            sites,
            covariance,
            factor,
        })
    }

    /// Point values of a kernel's field at `nodes`.
    pub fn from_kernel(kernel: &CovarianceKernel<T>, nodes: &[usize]) -> Result<Self> {
        Self::new(nodes.to_vec(), kernel.node_covariance(nodes))
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn covariance(&self) -> &DMatrix<T> {
        &self.covariance
    }

    fn position(&self, site: usize) -> Result<usize> {
        self.sites
            .iter()
            .position(|&s| s == site)
            .ok_or_else(|| Error::Precondition(format!("site {site} is not in the model")))
    }

    fn positions(&self, set: &[usize]) -> Result<Vec<usize>> {
        set.iter().map(|&s| self.position(s)).collect()
    }
}

/// `Σ = (L + mass² I)⁻¹` for the graph Laplacian `L` of `adjacency`.
pub fn build_discrete_gff<T: Real>(adjacency: &[Vec<usize>], mass: f64) -> Result<GaussianModel<T>> {
    let n = adjacency.len();
    if n == 0 {
        return Err(Error::Precondition("graph has no vertices".into()));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::config("mass", "must be a positive real"));
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if u >= n {
                return Err(Error::Precondition(format!("edge {v}–{u} leaves the graph")));
            }
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(Error::Precondition(format!("graph is disconnected at vertex {v}")));
    }
    let mut lap = DMatrix::<T>::zeros(n, n);
    for (v, nbrs) in adjacency.iter().enumerate() {
        for &u in nbrs.iter().collect::<BTreeSet<_>>() {
            if u != v {
                lap[(v, v)] += T::one();
                lap[(v, u)] -= T::one();
            }
        }
    }
    let m2: T = lit(mass * mass);
    for v in 0..n {
        lap[(v, v)] += m2;
    }
    let inv = lap
        .try_inverse()
        .ok_or_else(|| Error::Numerical("graph Laplacian plus mass is singular".into()))?;
    let sym = (&inv + inv.transpose()) * lit::<T>(0.5);
    GaussianModel::new((0..n).collect(), sym)
}

pub fn path_graph(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|v| {
            let mut nb = Vec::new();
            if v > 0 {
                nb.push(v - 1);
            }
            if v + 1 < n {
                nb.push(v + 1);
            }
            nb
        })
        .collect()
}

pub fn cycle_graph(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect()
}

/// Nodes of `set` adjacent to a node outside it.
pub fn graph_boundary(adjacency: &[Vec<usize>], set: &[usize]) -> Vec<usize> {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    set.iter()
        .copied()
        .filter(|&v| adjacency[v].iter().any(|u| !inside.contains(u)))
        .collect()
}

/// Weights `w` with `E[X_target | X_C] = w · X_C`.
pub fn conditional_predictor<T: Real>(
    model: &GaussianModel<T>,
    conditioning: &[usize],
    target: usize,
) -> Result<DVector<T>> {
    if conditioning.is_empty() {
        return Err(Error::Precondition("conditioning set is empty".into()));
    }
    let c = model.positions(conditioning)?;
    let t = model.position(target)?;
    let s = &model.covariance;
    let scc = DMatrix::from_fn(c.len(), c.len(), |i, j| s[(c[i], c[j])]);
    let stc = DVector::from_fn(c.len(), |i, _| s[(t, c[i])]);
    Ok(pinv_symmetric(&scc, lit(PINV_CUTOFF)) * stc)
}

/// `Var(E[X_target | X_C])`; zero for an empty set.
pub fn explained_variance<T: Real>(model: &GaussianModel<T>, conditioning: &[usize], target: usize) -> Result<T> {
    if conditioning.is_empty() {
        return Ok(T::zero());
    }
    let w = conditional_predictor(model, conditioning, target)?;
    let c = model.positions(conditioning)?;
    let t = model.position(target)?;
    Ok((0..c.len()).fold(T::zero(), |acc, i| acc + w[i] * model.covariance[(c[i], t)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkovVerdict {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovReport {
    pub targets: Vec<usize>,
    pub delta_sq: Vec<f64>,
    pub max_delta_sq: f64,
    pub verdict: MarkovVerdict,
    pub tolerance: f64,
}

/// `δ²_b = Var(E[X_b|X_A]) − Var(E[X_b|X_∂A])` per target, evaluated as
/// `Var(E[X_b|X_A] − E[X_b|X_∂A])` so that it is a squared norm.
pub fn markov_discrepancy<T: Real>(
    model: &GaussianModel<T>,
    a: &[usize],
    boundary: &[usize],
    targets: &[usize],
    tolerance: f64,
) -> Result<MarkovReport> {
    let a_set: BTreeSet<usize> = a.iter().copied().collect();
    let b_set: BTreeSet<usize> = boundary.iter().copied().collect();
    if let Some(v) = boundary.iter().find(|v| !a_set.contains(v)) {
        return Err(Error::Precondition(format!("boundary site {v} is not in A")));
    }
    if let Some(v) = targets.iter().find(|v| a_set.contains(v) && !b_set.contains(v)) {
        return Err(Error::Precondition(format!("target {v} lies in the interior of A")));
    }
    let a_pos = model.positions(a)?;
    let b_pos = model.positions(boundary)?;
    let delta_sq = targets
        .iter()
        .map(|&t| {
            let mut d = DVector::<T>::zeros(model.sites.len());
            for (&p, &w) in a_pos.iter().zip(conditional_predictor(model, a, t)?.iter()) {
                d[p] += w;
            }
            if !boundary.is_empty() {
                for (&p, &w) in b_pos.iter().zip(conditional_predictor(model, boundary, t)?.iter()) {
                    d[p] -= w;
                }
            }
            Ok(to_f64(model.factor.tr_mul(&d).norm_squared()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = delta_sq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max = if delta_sq.is_empty() { 0.0 } else { max };
    Ok(MarkovReport {
        targets: targets.to_vec(),
        delta_sq,
        max_delta_sq: max,
        verdict: if max <= tolerance {
            MarkovVerdict::Holds
        } else {
            MarkovVerdict::Fails
        },
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertex_path() {
        let m = build_discrete_gff::<f64>(&path_graph(2), 1.0).unwrap();
        let want = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.covariance()[(i, j)] - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn target_in_conditioning_is_reproduced() {
        let m = build_discrete_gff::<f64>(&path_graph(5), 1.0).unwrap();
        let ev = explained_variance(&m, &[1, 2, 3], 2).unwrap();
        assert!((ev - m.covariance()[(2, 2)]).abs() < 1e-12);
    }

    #[test]
    fn independent_coordinates_give_zero_weights() {
        let m = GaussianModel::new(vec![0, 1, 2], DMatrix::<f64>::identity(3, 3)).unwrap();
        let w = conditional_predictor(&m, &[0, 1], 2).unwrap();
        assert!(w.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn boundary_outside_a_is_rejected() {
        let m = build_discrete_gff::<f64>(&path_graph(4), 1.0).unwrap();
        assert!(markov_discrepancy(&m, &[0, 1], &[2], &[3], 1e-10).is_err());
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let adj = vec![vec![1], vec![0], vec![]];
        assert!(build_discrete_gff::<f64>(&adj, 1.0).is_err());
    }

    #[test]
    fn graph_boundary_of_a_prefix() {
        assert_eq!(graph_boundary(&path_graph(6), &[0, 1, 2]), vec![2]);
        assert_eq!(graph_boundary(&cycle_graph(6), &[0, 1, 2]), vec![0, 2]);
    }
}
