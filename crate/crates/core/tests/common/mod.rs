#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use xxz_floquet::linalg::DenseMatrix;
use xxz_floquet::{LatticeGraph, ModelParams, SpinBasis, StateVector, XxzModel};

pub const FIRST_ZERO: f64 = 2.404825557695773;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ring(l: usize, two_s: u32, params: ModelParams) -> XxzModel {
    XxzModel::new(
        LatticeGraph::chain(l, true).unwrap(),
        SpinBasis::new(l, two_s).unwrap(),
        params,
    )
    .unwrap()
}

/// Couplings used throughout the dynamics checks.
pub fn reference_params(omega: f64, a: f64) -> ModelParams {
    ModelParams::new(-0.75, -1.0, omega, a).unwrap()
}

/// Haar-distributed state: normalized complex Gaussian amplitudes.
pub fn random_state(basis: SpinBasis, rng: &mut ChaCha8Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..basis.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let mut psi = StateVector::from_amplitudes(basis, amps).unwrap();
    let n = psi.norm();
    psi.scale(Complex64::new(1.0 / n, 0.0));
    psi
}

/// `exp(-i dt H)` by scaling and squaring a Taylor series.
pub fn dense_expm(h: &DenseMatrix, dt: f64) -> DenseMatrix {
    let n = h.dim();
    let norm = h.max_abs() * n as f64 * dt.abs();
    let mut squarings = 0;
    let mut scale = dt;
    while norm * (scale / dt).abs() > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let minus_i_h: Vec<Complex64> =
        h.as_slice().iter().map(|v| v * Complex64::new(0.0, -scale)).collect();
    let a = DenseMatrix::from_row_major(n, minus_i_h).unwrap();
    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&a);
        let inv = 1.0 / k as f64;
        let scaled: Vec<Complex64> = term.as_slice().iter().map(|v| v * inv).collect();
        term = DenseMatrix::from_row_major(n, scaled).unwrap();
        let sum: Vec<Complex64> =
            result.as_slice().iter().zip(term.as_slice()).map(|(x, y)| x + y).collect();
        result = DenseMatrix::from_row_major(n, sum).unwrap();
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

pub fn apply_dense(m: &DenseMatrix, psi: &StateVector) -> StateVector {
    StateVector::from_amplitudes(psi.basis(), m.matvec(psi.amplitudes())).unwrap()
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    xxz_floquet::observables::overlap(a, b).unwrap().norm_sqr()
}
