//! Laplacian eigenbases on product geometries.
//!
//! Every axis carries the real Fourier basis `1, cos kx, sin kx, …, cos(N/2)x`
//! sampled at its nodes. Product modes are tensor products of axis modes; they
//! are orthonormal under the uniform node quadrature and each one is an
//! eigenvector of the reflection. Analysis and synthesis are done axis by axis,
//! so no dense mode table is ever stored.

use std::sync::Arc;

use serde::Serialize;

use super::geometry::{Axis, Geometry};
use crate::scalar::{from_usize, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisMode {
    pub k: usize,
    pub trig: Trig,
}

#[derive(Clone, Debug)]
struct AxisBasis<T> {
    points: usize,
    spacing: T,
    modes: Vec<AxisMode>,
    norms: Vec<T>,
    omega: Vec<T>,
    lattice: Vec<T>,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> AxisBasis<T> {
    fn new(axis: &Axis) -> Self {
        let n = axis.points;
        let mut modes = vec![AxisMode { k: 0, trig: Trig::Cos }];
        for k in 1..n / 2 {
            modes.push(AxisMode { k, trig: Trig::Cos });
            modes.push(AxisMode { k, trig: Trig::Sin });
        }
        modes.push(AxisMode {
            k: n / 2,
            trig: Trig::Cos,
        });

        let length: T = lit(axis.length);
        let spacing: T = lit(axis.spacing());
        let edge_norm = (T::one() / length).sqrt();
        let bulk_norm = (lit::<T>(2.0) / length).sqrt();
        let norms = modes
            .iter()
            .map(|m| if m.k == 0 || 2 * m.k == n { edge_norm } else { bulk_norm })
            .collect();
        let scale: T = lit(axis.wave_scale);
        let omega: Vec<T> = modes.iter().map(|m| from_usize::<T>(m.k) * scale).collect();
        let two: T = lit(2.0);
        let lattice = modes
            .iter()
            .map(|m| {
                let s = (T::pi() * from_usize::<T>(m.k) / from_usize::<T>(n)).sin();
                two * two * s * s / (spacing * spacing)
            })
            .collect();

        // Tables are built so that index j and N-j agree to the bit, which makes
        // reflection parities exact on nodes.
        let mut cos = vec![T::zero(); n];
        let mut sin = vec![T::zero(); n];
        let step = T::two_pi() / from_usize::<T>(n);
        for j in 0..=n / 2 {
            let (c, s) = if 4 * j == n {
                (T::zero(), T::one())
            } else if 4 * j < n {
                let x = step * from_usize::<T>(j);
                (x.cos(), x.sin())
            } else {
                let x = step * from_usize::<T>(n / 2 - j);
                (-x.cos(), x.sin())
            };
            cos[j] = c;
            sin[j] = if 2 * j == n { T::zero() } else { s };
            if j > 0 && 2 * j < n {
                cos[n - j] = c;
                sin[n - j] = -s;
            }
        }

        AxisBasis {
            points: n,
            spacing,
            modes,
            norms,
            omega,
            lattice,
            cos,
            sin,
        }
    }

    #[inline]
    fn value(&self, m: usize, i: usize) -> T {
        let mode = self.modes[m];
        let j = (mode.k * i) % self.points;
        let t = match mode.trig {
            Trig::Cos => self.cos[j],
            Trig::Sin => self.sin[j],
        };
        self.norms[m] * t
    }

    fn forward_line(&self, input: &[T], out: &mut [T]) {
        let n = self.points;
        let nonzero: Vec<usize> = (0..n).filter(|&i| input[i] != T::zero()).collect();
        if 4 * nonzero.len() < n {
            for (m, mode) in self.modes.iter().enumerate() {
                let table = match mode.trig {
                    Trig::Cos => &self.cos,
                    Trig::Sin => &self.sin,
                };
                let acc = nonzero
                    .iter()
                    .fold(T::zero(), |acc, &i| acc + input[i] * table[(mode.k * i) % n]);
                out[m] = acc * self.norms[m] * self.spacing;
            }
            return;
        }
        for (m, mode) in self.modes.iter().enumerate() {
            let table = match mode.trig {
                Trig::Cos => &self.cos,
                Trig::Sin => &self.sin,
            };
            let mut j = 0usize;
            let mut acc = T::zero();
            for &x in input {
                acc += x * table[j];
                j += mode.k;
                if j >= n {
                    j -= n;
                }
            }
            out[m] = acc * self.norms[m] * self.spacing;
        }
    }

    fn inverse_line(&self, input: &[T], out: &mut [T]) {
        let n = self.points;
        out.iter_mut().for_each(|x| *x = T::zero());
        for (m, mode) in self.modes.iter().enumerate() {
            let c = input[m] * self.norms[m];
            if c == T::zero() {
                continue;
            }
            let table = match mode.trig {
                Trig::Cos => &self.cos,
                Trig::Sin => &self.sin,
            };
            let mut j = 0usize;
            for o in out.iter_mut() {
                *o += c * table[j];
                j += mode.k;
                if j >= n {
                    j -= n;
                }
            }
        }
    }
}

/// Orthonormal, reflection-resolved eigenbasis of the Laplacian on a geometry.
///
/// Modes are sorted by eigenvalue; equal eigenvalues list even modes before
/// odd ones, then follow construction order (axis modes by increasing `k`,
/// cosine before sine, row-major across axes).
#[derive(Clone, Debug)]
pub struct SpectralBasis<T> {
    geometry: Geometry,
    axes: Vec<AxisBasis<T>>,
    order: Vec<usize>,
    eigenvalues: Vec<T>,
    lattice_eigenvalues: Vec<T>,
    parity: Vec<i8>,
    weight: T,
}

/// Builds the sorted eigenbasis of `geometry`.
pub fn build_basis<T: Real>(geometry: &Geometry) -> Arc<SpectralBasis<T>> {
    Arc::new(SpectralBasis::new(geometry.clone()))
}

impl<T: Real> SpectralBasis<T> {
    pub fn new(geometry: Geometry) -> Self {
        let axes: Vec<AxisBasis<T>> = geometry.axes().iter().map(AxisBasis::new).collect();
        let total = geometry.num_nodes();
        let refl = geometry.reflection_axis();
        let shape = geometry.shape();

        let mut raw_eig = Vec::with_capacity(total);
        let mut raw_lat = Vec::with_capacity(total);
        let mut raw_par = Vec::with_capacity(total);
        for p in 0..total {
            let idx = unflatten(p, &shape);
            let mut eig = T::zero();
            let mut lat = T::zero();
            for (a, &m) in idx.iter().enumerate() {
                let w = axes[a].omega[m];
                eig += w * w;
                lat += axes[a].lattice[m];
            }
            raw_eig.push(eig);
            raw_lat.push(lat);
            raw_par.push(match axes[refl].modes[idx[refl]].trig {
                Trig::Cos => 1i8,
                Trig::Sin => -1i8,
            });
        }

        let mut order: Vec<usize> = (0..total).collect();
        order.sort_by(|&a, &b| {
            raw_eig[a]
                .partial_cmp(&raw_eig[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        // Merge numerically equal eigenvalues into tie groups, then order each
        // group even-before-odd and by construction index.
        let tol: T = lit(1e-12);
        let mut eigenvalues = vec![T::zero(); total];
        let mut start = 0;
        while start < total {
            let base = raw_eig[order[start]];
            let mut end = start + 1;
            while end < total && raw_eig[order[end]] - base <= tol * (T::one() + base.abs()) {
                end += 1;
            }
            order[start..end].sort_by(|&a, &b| raw_par[b].cmp(&raw_par[a]).then(a.cmp(&b)));
            for e in eigenvalues.iter_mut().take(end).skip(start) {
                *e = base;
            }
            start = end;
        }
        let lattice_eigenvalues = order.iter().map(|&p| raw_lat[p]).collect();
        let parity = order.iter().map(|&p| raw_par[p]).collect();

        SpectralBasis {
            weight: lit(geometry.quadrature_weight()),
            geometry,
            axes,
            order,
            eigenvalues,
            lattice_eigenvalues,
            parity,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn num_nodes(&self) -> usize {
        self.order.len()
    }

    /// Quadrature weight of a single node.
    pub fn weight(&self) -> T {
        self.weight
    }

    /// Continuum eigenvalues `|ω|²`, nondecreasing.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, mode: usize) -> T {
        self.eigenvalues[mode]
    }

    /// Eigenvalues of the nearest-neighbour lattice Laplacian on the same
    /// modes, `Σ_a (4/h_a²) sin²(ω_a h_a / 2)`.
    pub fn lattice_eigenvalues(&self) -> &[T] {
        &self.lattice_eigenvalues
    }

    pub fn parities(&self) -> &[i8] {
        &self.parity
    }

    pub fn parity(&self, mode: usize) -> i8 {
        self.parity[mode]
    }

    /// Number of leading modes with eigenvalue `≤ bound` (relative slack 1e-12).
    pub fn count_at_most(&self, bound: T) -> usize {
        let slack = bound * lit(1e-12);
        self.eigenvalues.partition_point(|&e| e <= bound + slack)
    }

    /// Construction index of a sorted mode.
    pub fn construction_index(&self, mode: usize) -> usize {
        self.order[mode]
    }

    pub fn axis_modes(&self, mode: usize) -> Vec<AxisMode> {
        unflatten(self.order[mode], &self.geometry.shape())
            .into_iter()
            .enumerate()
            .map(|(a, m)| self.axes[a].modes[m])
            .collect()
    }

    /// Angular wavenumber of the mode along each axis (nonnegative).
    pub fn wavevector(&self, mode: usize) -> Vec<T> {
        unflatten(self.order[mode], &self.geometry.shape())
            .into_iter()
            .enumerate()
            .map(|(a, m)| self.axes[a].omega[m])
            .collect()
    }

    pub fn mode_value(&self, mode: usize, node: usize) -> T {
        let shape = self.geometry.shape();
        let midx = unflatten(self.order[mode], &shape);
        let nidx = unflatten(node, &shape);
        midx.iter()
            .zip(&nidx)
            .enumerate()
            .fold(T::one(), |acc, (a, (&m, &i))| acc * self.axes[a].value(m, i))
    }

    pub fn mode_vector(&self, mode: usize) -> Vec<T> {
        (0..self.num_nodes()).map(|v| self.mode_value(mode, v)).collect()
    }

    /// Node values to coefficients, `c_k = Σ_x w e_k(x) f(x)`.
    pub fn analyze(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.num_nodes(), "value vector has wrong length");
        let mut data = values.to_vec();
        for a in 0..self.axes.len() {
            self.apply_axis(&mut data, a, true);
        }
        self.order.iter().map(|&p| data[p]).collect()
    }

    /// Coefficients to node values.
    pub fn synthesize(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.num_nodes(), "coefficient vector has wrong length");
        let mut data = vec![T::zero(); coeffs.len()];
        for (s, &p) in self.order.iter().enumerate() {
            data[p] = coeffs[s];
        }
        for a in 0..self.axes.len() {
            self.apply_axis(&mut data, a, false);
        }
        data
    }

    fn apply_axis(&self, data: &mut [T], a: usize, forward: bool) {
        let axis = &self.axes[a];
        let n = axis.points;
        let stride = self.geometry.strides()[a];
        let outer = data.len() / (n * stride);
        let mut line = vec![T::zero(); n];
        let mut out = vec![T::zero(); n];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for (j, x) in line.iter_mut().enumerate() {
                    *x = data[base + j * stride];
                }
                if forward {
                    axis.forward_line(&line, &mut out);
                } else {
                    axis.inverse_line(&line, &mut out);
                }
                for (j, x) in out.iter().enumerate() {
                    data[base + j * stride] = *x;
                }
            }
        }
    }

    /// Quadrature inner product of two node vectors.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y) * self.weight
    }
}

fn unflatten(mut p: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = p % shape[a];
        p /= shape[a];
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_defect(basis: &SpectralBasis<f64>) -> f64 {
        let vecs: Vec<Vec<f64>> = (0..basis.len()).map(|k| basis.mode_vector(k)).collect();
        let mut worst = 0.0f64;
        for i in 0..vecs.len() {
            for j in 0..vecs.len() {
                // direct quadrature, independent of the axis transforms
                let g: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum::<f64>() * basis.weight();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }

    #[test]
    fn circle_eight_spectrum_and_parities() {
        let basis = SpectralBasis::<f64>::new(Geometry::circle(8).unwrap());
        assert_eq!(basis.eigenvalues(), &[0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0]);
        assert_eq!(basis.parities(), &[1, 1, -1, 1, -1, 1, -1, 1]);
        assert_eq!(basis.axis_modes(2)[0], AxisMode { k: 1, trig: Trig::Sin });
    }

    #[test]
    fn circle_six_is_orthonormal() {
        let basis = SpectralBasis::<f64>::new(Geometry::circle(6).unwrap());
        assert!(gram_defect(&basis) < 1e-10);
    }

    #[test]
    fn product_bases_are_orthonormal() {
        for g in [
            Geometry::torus(&[4, 6]).unwrap(),
            Geometry::cylinder(6, 2.5, 4).unwrap(),
            Geometry::periodic_grid(&[3.0, 5.0, 2.0], &[4, 2, 4]).unwrap(),
        ] {
            let basis = SpectralBasis::<f64>::new(g);
            assert!(gram_defect(&basis) < 1e-10);
        }
    }

    #[test]
    fn torus_has_a_single_constant_mode() {
        let basis = SpectralBasis::<f64>::new(Geometry::torus(&[4, 4]).unwrap());
        let zeros: Vec<usize> = (0..basis.len()).filter(|&k| basis.eigenvalue(k) == 0.0).collect();
        assert_eq!(zeros, vec![0]);
        assert_eq!(basis.parity(0), 1);
    }

    #[test]
    fn ties_put_even_modes_first() {
        let basis = SpectralBasis::<f64>::new(Geometry::torus(&[6, 6]).unwrap());
        for k in 1..basis.len() {
            assert!(basis.eigenvalue(k) >= basis.eigenvalue(k - 1));
            if basis.eigenvalue(k) == basis.eigenvalue(k - 1) {
                assert!(basis.parity(k - 1) >= basis.parity(k));
            }
        }
    }

    #[test]
    fn modes_are_exact_reflection_eigenvectors() {
        let g = Geometry::torus(&[8, 6]).unwrap();
        let perm = g.reflection_permutation();
        let basis = SpectralBasis::<f64>::new(g);
        for k in 0..basis.len() {
            let v = basis.mode_vector(k);
            let p = f64::from(basis.parity(k));
            for node in 0..v.len() {
                assert_eq!(v[perm[node]], p * v[node]);
            }
        }
    }

    #[test]
    fn analyze_inverts_synthesize() {
        let basis = SpectralBasis::<f64>::new(Geometry::periodic_grid(&[4.0, 7.0], &[6, 8]).unwrap());
        let coeffs: Vec<f64> = (0..basis.len()).map(|k| ((k * 7 + 3) % 11) as f64 - 5.0).collect();
        let back = basis.analyze(&basis.synthesize(&coeffs));
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_eigenvalues_approach_continuum_at_low_k() {
        let basis = SpectralBasis::<f64>::new(Geometry::circle(256).unwrap());
        for k in 0..5 {
            let rel = (basis.lattice_eigenvalues()[k] - basis.eigenvalue(k)).abs() / (1.0 + basis.eigenvalue(k));
            assert!(rel < 1e-3);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let basis = SpectralBasis::<f32>::new(Geometry::circle(8).unwrap());
        assert_eq!(basis.eigenvalue(7), 16.0f32);
        let c = basis.analyze(&basis.mode_vector(3));
        assert!((c[3] - 1.0).abs() < 1e-5);
    }
}
