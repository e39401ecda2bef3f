//! Brute-force check of the effective Hamiltonian: the rotating frame
//! `U(t) = exp(-i A sin(Ωt) Σ SzSz)` is diagonal in the product basis, so
//! `U H0 U†` can be applied exactly at any `t` and averaged over one period
//! with the trapezoidal rule.
//!
//! Two independent routes to `U(t) H0 U†(t)` are provided: conjugating the
//! ordinary `H0` kernel with the diagonal phases, and a direct loop over
//! bonds with hopping dressed by `exp(∓i A sin(Ωt) Z_ij)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::operators::{build_dense, LinearOperator, ModelParams, OperatorHandle, OperatorKind, XxzModel};
use crate::spin::{SpinBasis, StateVector};

pub const DEFAULT_NODES: usize = 128;
pub const MIN_NODES: usize = 32;
/// Largest Hilbert-space dimension accepted by [`effcheck`].
pub const EFFCHECK_DIM_CAP: usize = 1024;

/// The frame generated by the drive at amplitude `A`.
#[derive(Clone, Debug)]
pub struct RotatingFrame<'m> {
    model: &'m XxzModel,
    h0: OperatorHandle<'m>,
    amplitude: f64,
    /// `Σ_bonds m_k m_l` per basis index, recomputed here on purpose.
    bond_sum: Vec<f64>,
}

impl<'m> RotatingFrame<'m> {
    /// Frame at the model's own amplitude.
    pub fn new(model: &'m XxzModel) -> Result<Self> {
        Self::with_amplitude(model, model.params().amplitude_a)
    }

    pub fn with_amplitude(model: &'m XxzModel, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be finite"));
        }
        let basis = model.basis();
        let graph = model.graph();
        let mut digits = vec![0u8; basis.num_sites()];
        let bond_sum = (0..basis.dim())
            .map(|idx| {
                basis.decode_into(idx, &mut digits);
                graph
                    .edges()
                    .iter()
                    .map(|&(k, l)| basis.m_value(digits[k]) * basis.m_value(digits[l]))
                    .sum()
            })
            .collect();
        Ok(Self { model, h0: model.operator(OperatorKind::H0)?, amplitude, bond_sum })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn params(&self) -> &ModelParams {
        self.model.params()
    }

    pub fn graph(&self) -> &LatticeGraph {
        self.model.graph()
    }

    pub fn basis(&self) -> SpinBasis {
        self.model.basis()
    }

    fn angle(&self, t: f64) -> f64 {
        self.amplitude * (self.params().omega * t).sin()
    }

    /// Diagonal element of `U(t)` for basis state `index`.
    pub fn u_phase(&self, t: f64, index: usize) -> Result<Complex64> {
        let zz = self
            .bond_sum
            .get(index)
            .ok_or_else(|| Error::invalid(format!("basis index {index} out of range")))?;
        Ok(Complex64::from_polar(1.0, -self.angle(t) * zz))
    }

    fn conjugated_into(&self, t: f64, x: &[Complex64], y: &mut [Complex64]) {
        let theta = self.angle(t);
        let rotated: Vec<Complex64> = x
            .iter()
            .zip(&self.bond_sum)
            .map(|(v, zz)| v * Complex64::from_polar(1.0, theta * zz))
            .collect();
        self.h0.apply_into(&rotated, y);
        for (v, zz) in y.iter_mut().zip(&self.bond_sum) {
            *v *= Complex64::from_polar(1.0, -theta * zz);
        }
    }

    /// `U(t) H0 U†(t) ψ` by three passes: phase, `H0`, conjugate phase.
    pub fn conjugated_h0_apply(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.check(psi)?;
        let mut out = StateVector::zeros(self.basis());
        self.conjugated_into(t, psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `U(t) H0 U†(t) ψ` from the closed form: undressed Ising term plus
    /// `S_i^+ e^{-iθZ_ij} S_j^- + S_i^- e^{+iθZ_ij} S_j^+` on every bond,
    /// `θ = A sin Ωt`, with `Z_ij` read on the state after the right-hand
    /// ladder operator.
    pub fn closed_form_apply(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.check(psi)?;
        let basis = self.basis();
        let graph = self.graph();
        let p = self.params();
        let theta = self.angle(t);
        let s = 0.5 * basis.two_s() as f64;
        let ladder = |m: f64, up: bool| -> f64 {
            let mm = if up { m + 1.0 } else { m - 1.0 };
            if mm.abs() > s { 0.0 } else { (s * (s + 1.0) - m * mm).max(0.0).sqrt() }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
        let mut m = vec![0.0; basis.num_sites()];
        let mut digits = vec![0u8; basis.num_sites()];
        let strides = basis.strides();
        for (n, &amp) in psi.amplitudes().iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            basis.decode_into(n, &mut digits);
            for (mk, &d) in m.iter_mut().zip(&digits) {
                *mk = basis.m_value(d);
            }
            let mut ising = 0.0;
            for &(i, j) in graph.edges() {
                ising += m[i] * m[j];
                // (raise i, lower j) then (lower i, raise j)
                for (raise_i, sign) in [(true, -1.0), (false, 1.0)] {
                    let cj = ladder(m[j], !raise_i);
                    let ci = ladder(m[i], raise_i);
                    if ci == 0.0 || cj == 0.0 {
                        continue;
                    }
                    let shift = if raise_i { -1.0 } else { 1.0 };
                    let mj_mid = m[j] + shift;
                    let sum_at = |site: usize| -> f64 {
                        graph
                            .neighbors(site)
                            .iter()
                            .map(|&k| if k == j { mj_mid } else { m[k] })
                            .sum()
                    };
                    let z = sum_at(i) - sum_at(j);
                    let dress = Complex64::from_polar(1.0, sign * theta * z);
                    let target = if raise_i {
                        n + strides[i] - strides[j]
                    } else {
                        n - strides[i] + strides[j]
                    };
                    out[target] += amp * dress * (-0.5 * p.j_perp * ci * cj);
                }
            }
            out[n] += amp * (-p.j_par_bar * ising);
        }
        StateVector::from_amplitudes(basis, out)
    }

    fn average_into(&self, nodes: usize, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut term = vec![Complex64::new(0.0, 0.0); x.len()];
        let omega = self.params().omega;
        for k in 0..nodes {
            let t = 2.0 * PI * k as f64 / (nodes as f64 * omega);
            self.conjugated_into(t, x, &mut term);
            for (acc, v) in y.iter_mut().zip(&term) {
                *acc += v;
            }
        }
        let inv = 1.0 / nodes as f64;
        y.iter_mut().for_each(|v| *v *= inv);
    }

    /// Trapezoidal average of `U H0 U†` over one period applied to `ψ`.
    pub fn average_by_quadrature(&self, nodes: usize, psi: &StateVector) -> Result<StateVector> {
        check_nodes(nodes)?;
        self.check(psi)?;
        let mut out = StateVector::zeros(self.basis());
        self.average_into(nodes, psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// The averaged operator as a matrix-free operator.
    pub fn averaged_operator(&self, nodes: usize) -> Result<QuadratureAverage<'_, 'm>> {
        check_nodes(nodes)?;
        Ok(QuadratureAverage { frame: self, nodes })
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.basis() != self.basis() {
            return Err(Error::invalid("state basis does not match the frame"));
        }
        Ok(())
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < MIN_NODES {
        return Err(Error::invalid(format!(
            "quadrature needs at least {MIN_NODES} nodes, got {nodes}"
        )));
    }
    Ok(())
}

/// Period average of the rotated `H0` with a fixed node count.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureAverage<'f, 'm> {
    frame: &'f RotatingFrame<'m>,
    nodes: usize,
}

impl LinearOperator for QuadratureAverage<'_, '_> {
    fn dim(&self) -> usize {
        self.frame.basis().dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.frame.average_into(self.nodes, x, y);
    }
}

/// Result of comparing the dense quadrature average with the dense
/// closed-form effective Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffCheck {
    pub a: f64,
    pub nodes: usize,
    pub max_abs_deviation: f64,
    /// Largest `|M - M†|` entry of the quadrature matrix.
    pub hermiticity_error: f64,
}

/// Builds both operators densely for `model` at amplitude `a` and returns
/// their largest elementwise difference.
pub fn effcheck(model: &XxzModel, a: f64, nodes: usize) -> Result<EffCheck> {
    let dim = model.basis().dim();
    if dim > EFFCHECK_DIM_CAP {
        return Err(Error::resource(format!(
            "effective-Hamiltonian check limited to dimension {EFFCHECK_DIM_CAP}, requested {dim}"
        )));
    }
    let frame = RotatingFrame::with_amplitude(model, a)?;
    let averaged = build_dense(&frame.averaged_operator(nodes)?)?;
    let closed = build_dense(&model.operator(OperatorKind::HEff(a))?)?;
    Ok(EffCheck {
        a,
        nodes,
        max_abs_deviation: averaged.max_abs_diff(&closed),
        hermiticity_error: averaged.hermiticity_error(),
    })
}
