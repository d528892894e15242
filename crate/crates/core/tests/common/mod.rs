#![allow(dead_code)]

use std::sync::Arc;

use gff_cutoff::markov::{markov_discrepancy, GaussianModel};
use gff_cutoff::phi4::{interaction_weight, Phi4Config};
use gff_cutoff::spectral::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn even(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    2 * rng.random_range(lo / 2..=hi / 2)
}

/// A small random geometry of any supported kind.
pub fn random_geometry(seed: u64) -> Geometry {
    let mut r = rng(seed);
    match r.random_range(0..6) {
        0 => Geometry::circle(even(&mut r, 8, 48)),
        1 => Geometry::torus(&[even(&mut r, 4, 12), even(&mut r, 4, 12)]),
        2 => Geometry::periodic_grid(&[r.random_range(4.0..20.0)], &[even(&mut r, 16, 64)]),
        3 => Geometry::periodic_grid(
            &[r.random_range(4.0..12.0), r.random_range(4.0..12.0)],
            &[even(&mut r, 8, 16), even(&mut r, 8, 16)],
        ),
        4 => Geometry::cylinder(even(&mut r, 8, 24), r.random_range(3.0..10.0), even(&mut r, 6, 12)),
        _ => Geometry::torus(&[even(&mut r, 4, 6), even(&mut r, 4, 6), 4]),
    }
    .unwrap()
}

pub fn random_values(basis: &Arc<SpectralBasis<f64>>, seed: u64) -> Vec<f64> {
    let mut r = rng(seed ^ 0x5eed);
    (0..basis.num_nodes()).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// Λ with roughly `count` modes at or below Λ².
pub fn lambda_for(basis: &SpectralBasis<f64>, count: usize) -> f64 {
    let k = count.min(basis.len() - 1);
    basis.eigenvalue(k).sqrt() + 1e-6
}

pub fn idempotence(seed: u64) -> Result<(), String> {
    let basis = build_basis::<f64>(&random_geometry(seed));
    let f = Field::from_values(basis.clone(), random_values(&basis, seed));
    let cut = CutoffSpec::sharp(lambda_for(&basis, 1 + seed as usize % 9));
    let once = f.apply_cutoff(&cut);
    let twice = once.apply_cutoff(&cut);
    if once.coeffs() == twice.coeffs() {
        Ok(())
    } else {
        Err("sharp cutoff is not idempotent".into())
    }
}

pub fn theta_commutation(seed: u64) -> Result<(), String> {
    let basis = build_basis::<f64>(&random_geometry(seed));
    let f = Field::from_values(basis.clone(), random_values(&basis, seed));
    let h = Field::from_values(basis.clone(), random_values(&basis, seed + 1000));
    let cut = CutoffSpec::smooth(lambda_for(&basis, 12), 0.25);
    let a = f.apply_cutoff(&cut).reflect();
    let b = f.reflect().apply_cutoff(&cut);
    let diff = a.add(&b.scale(-1.0)).unwrap().norm();
    if diff > 1e-12 * f.norm() {
        return Err(format!("‖ΘΠf − ΠΘf‖ = {diff:e}"));
    }
    let kernel = CovarianceKernel::cut(basis, cut);
    let p = covariance_pairing(&f, &h, &kernel).unwrap();
    let q = covariance_pairing(&f.reflect(), &h.reflect(), &kernel).unwrap();
    if (p - q).abs() > 1e-12 * (1.0 + p.abs()) {
        return Err(format!("pairing changes under Θ: {p} vs {q}"));
    }
    Ok(())
}

pub fn parseval(seed: u64) -> Result<(), String> {
    let basis = build_basis::<f64>(&random_geometry(seed));
    let values = random_values(&basis, seed);
    let f = Field::from_values(basis.clone(), values.clone());
    let (a, b) = (f.norm(), f.coeff_norm());
    if (a - b).abs() > 1e-10 * a {
        return Err(format!("‖f‖ = {a}, ‖c‖ = {b}"));
    }
    let back = basis.synthesize(f.coeffs());
    let err = back.iter().zip(&values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if err > 1e-10 {
        return Err(format!("round trip error {err:e}"));
    }
    Ok(())
}

/// Largest deviation of the empirical coefficient covariance from
/// `diag(m)`, in units of its standard error.
pub fn sampler_covariance(seed: u64, samples: usize) -> Result<f64, String> {
    let basis = build_basis::<f64>(&random_geometry(seed));
    let kernel = CovarianceKernel::cut(basis.clone(), CutoffSpec::sharp(lambda_for(&basis, 8)));
    let active = kernel.active_modes();
    let m: Vec<f64> = active.iter().map(|&k| kernel.multiplier()[k]).collect();
    let draws = sample_coefficient_batch(&kernel, seed, samples);
    let d = active.len();
    let mut cov = vec![0.0; d * d];
    for z in &draws {
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] += z[active[i]] * z[active[j]];
            }
        }
    }
    let n = samples as f64;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let est = cov[i * d + j] / n;
            let (want, se) = if i == j {
                (m[i], m[i] * (2.0 / n).sqrt())
            } else {
                (0.0, (m[i] * m[j] / n).sqrt())
            };
            worst = worst.max((est - want).abs() / se);
        }
    }
    for z in &draws {
        if (0..basis.len()).any(|k| !active.contains(&k) && z[k] != 0.0) {
            return Err("inactive mode sampled".into());
        }
    }
    if worst > 5.0 {
        return Err(format!("covariance entry off by {worst:.2} standard errors"));
    }
    Ok(worst)
}

pub fn phi4_config(basis: &Arc<SpectralBasis<f64>>, seed: u64) -> Phi4Config<f64> {
    let mut r = rng(seed ^ 0xf4);
    let shortest = basis
        .geometry()
        .axes()
        .iter()
        .map(|a| a.length)
        .fold(f64::INFINITY, f64::min);
    let support = 0.45 * shortest;
    Phi4Config::new(
        basis,
        RhoSpec::new(0.5 * support, support),
        CutoffSpec::sharp(lambda_for(basis, 10)),
        r.random_range(0.01..1.0),
        Some(r.random_range(-2.0..1.0)),
        16,
        seed,
    )
    .unwrap()
}

pub fn weight_factorization(seed: u64) -> Result<(), String> {
    let geom = random_geometry(seed);
    let basis = build_basis::<f64>(&geom);
    let config = phi4_config(&basis, seed);
    let kernel = CovarianceKernel::cut(basis.clone(), config.cutoff);
    let part = geom.partition();
    for s in 0..8 {
        let field = Field::from_coeffs(basis.clone(), sample_coefficients(&kernel, seed, s));
        let full = interaction_weight(&field, &config, &part.quadrature_split(Side::Full));
        let plus = interaction_weight(&field, &config, &part.quadrature_split(Side::Plus));
        let minus = interaction_weight(&field, &config, &part.quadrature_split(Side::Minus));
        if (full - plus * minus).abs() > 1e-12 * full {
            return Err(format!("G = {full:e} but G₊G₋ = {:e}", plus * minus));
        }
    }
    Ok(())
}

pub fn nested_predictor(seed: u64) -> Result<f64, String> {
    let geom = random_geometry(seed);
    let basis = build_basis::<f64>(&geom);
    let kernel = CovarianceKernel::cut(basis.clone(), CutoffSpec::sharp(lambda_for(&basis, 10)));
    let mut r = rng(seed ^ 0x3a);
    let mut nodes: Vec<usize> = (0..geom.num_nodes()).collect();
    nodes.shuffle(&mut r);
    nodes.truncate(40);
    let model = GaussianModel::from_kernel(&kernel, &nodes).map_err(|e| e.to_string())?;
    let split = r.random_range(2..nodes.len() - 1);
    let a = nodes[..split].to_vec();
    let nb = r.random_range(1..=a.len());
    let boundary = a[..nb].to_vec();
    let mut targets = nodes[split..].to_vec();
    targets.push(boundary[0]);
    let report = markov_discrepancy(&model, &a, &boundary, &targets, 1e-10).map_err(|e| e.to_string())?;
    let min = report.delta_sq.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-12 {
        return Err(format!("δ² = {min:e} < 0"));
    }
    Ok(min)
}

pub type Check = fn(u64) -> Result<(), String>;

pub fn property_suite() -> Vec<(&'static str, Check)> {
    vec![
        ("projector idempotence", idempotence),
        ("theta commutation", theta_commutation),
        ("parseval", parseval),
        ("sampler covariance", |s| sampler_covariance(s, 100_000).map(|_| ())),
        ("weight factorization", weight_factorization),
        ("nested predictor", |s| nested_predictor(s).map(|_| ())),
    ]
}

fn bump(center: f64, width: f64, x: f64) -> f64 {
    let t = (x - center) / width;
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `κ`-integrals of the unit-norm `φ^(2n)` predicted from samples of `φ`
/// alone: the norm by Parseval over an FFT, the transforms on `[0, 1]` by
/// trapezoid sums and the outer integral by Simpson's rule.
pub fn halfline_oracle(center: f64, width: f64, extent: f64, points: usize, n: u32, kappas: &[f64]) -> Vec<f64> {
    use rustfft::num_complex::Complex;
    let dx = extent / points as f64;
    let samples: Vec<(f64, f64)> = (0..points / 2)
        .map(|j| (j as f64 * dx, bump(center, width, j as f64 * dx)))
        .filter(|&(_, v)| v > 0.0)
        .collect();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); points];
    for &(x, v) in &samples {
        buf[(x / dx).round() as usize] = Complex::new(v, 0.0);
    }
    rustfft::FftPlanner::new().plan_fft_forward(points).process(&mut buf);
    let peak = buf[0].norm();
    let mut norm_sq = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let signed = if k <= points / 2 {
            k as f64
        } else {
            k as f64 - points as f64
        };
        if c.norm() < 1e-13 * peak {
            continue;
        }
        let xi = 2.0 * std::f64::consts::PI * signed / extent;
        norm_sq += xi.powi(4 * n as i32) * (dx * c.norm()).powi(2) / extent;
    }
    let transform = |xi: f64| {
        samples.iter().fold((0.0, 0.0), |(a, b), &(x, v)| {
            (a + v * (xi * x).cos() * dx, b + v * (xi * x).sin() * dx)
        })
    };
    let intervals = 2000;
    let table: Vec<(f64, f64, f64)> = (0..=intervals)
        .map(|i| {
            let xi = i as f64 / intervals as f64;
            let (a, b) = transform(xi);
            (xi, a, b)
        })
        .collect();
    kappas
        .iter()
        .map(|&kappa| {
            let f = |i: usize| {
                let (xi, a, b) = table[i];
                xi.powi(4 * n as i32) * (a * a - b * b) / (xi * xi + kappa) / norm_sq
            };
            let h = 1.0 / intervals as f64;
            let mut s = f(0) + f(intervals);
            for i in 1..intervals {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
            }
            2.0 * s * h / 3.0
        })
        .collect()
}

/// `A(1)² − B(1)²` for a bump, by Simpson's rule over its support.
pub fn endpoint_sign(center: f64, width: f64) -> f64 {
    let a = simpson(
        |x| bump(center, width, x) * x.cos(),
        center - width,
        center + width,
        4000,
    );
    let b = simpson(
        |x| bump(center, width, x) * x.sin(),
        center - width,
        center + width,
        4000,
    );
    a * a - b * b
}
