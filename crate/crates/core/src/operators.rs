//! Matrix-free application of the driven XXZ Hamiltonian, its drive, the
//! Bessel-dressed effective Hamiltonian and its pieces, the bond operator and
//! the staggered magnetization.
//!
//! All operators conserve total `S^z`. Dressed hopping terms evaluate
//! `J0(a Z_ij)` on the intermediate state left by the right-most ladder
//! operator, so `S_i^+ J0(a Z_ij) S_j^-` sees `m_j - 1` and
//! `S_i^- J0(a Z_ij) S_j^+` sees `m_j + 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Math methods without std; redundant when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::linalg::DenseMatrix;
use crate::specfun::BesselTable;
use crate::spin::{ladder_coefficient, Ladder, ProductState, SpinBasis, StateVector};

/// Largest dimension for which dense matrices are assembled.
pub const DENSE_DIM_CAP: usize = 4096;

/// Couplings of `H(t) = -(J⊥/2) Σ (S+S- + S-S+) - (J̄∥ + δJ cos Ωt) Σ SzSz`
/// with `ħ = 1`. The drive strength is stored through the dimensionless
/// amplitude `A = δJ / Ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub j_perp: f64,
    pub j_par_bar: f64,
    pub omega: f64,
    pub amplitude_a: f64,
}

impl ModelParams {
    pub fn new(j_perp: f64, j_par_bar: f64, omega: f64, amplitude_a: f64) -> Result<Self> {
        let p = Self { j_perp, j_par_bar, omega, amplitude_a };
        p.validate()?;
        Ok(p)
    }

    pub fn from_delta_j(j_perp: f64, j_par_bar: f64, omega: f64, delta_j: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        Self::new(j_perp, j_par_bar, omega, delta_j / omega)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.j_perp, self.j_par_bar, self.omega, self.amplitude_a];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("model parameters must be finite"));
        }
        if !(self.omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {}", self.omega)));
        }
        if self.amplitude_a < 0.0 {
            return Err(Error::invalid(format!(
                "amplitude A must be non-negative, got {}",
                self.amplitude_a
            )));
        }
        Ok(())
    }

    /// `δJ = ħ Ω A`.
    pub fn delta_j(&self) -> f64 {
        self.omega * self.amplitude_a
    }

    pub fn period(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.omega
    }

    /// `J∥(t) = J̄∥ + δJ cos Ωt`.
    pub fn j_par_at(&self, t: f64) -> f64 {
        self.j_par_bar + self.delta_j() * (self.omega * t).cos()
    }
}

/// Lattice, basis and couplings together with the per-state Ising bond sum
/// `Σ_bonds m_i m_j`, which every diagonal term reuses.
#[derive(Clone, Debug)]
pub struct XxzModel {
    graph: LatticeGraph,
    basis: SpinBasis,
    params: ModelParams,
    strides: Vec<usize>,
    bond_zz: Vec<f64>,
    neighbor_masks: Vec<u64>,
}

impl XxzModel {
    pub fn new(graph: LatticeGraph, basis: SpinBasis, params: ModelParams) -> Result<Self> {
        if graph.num_sites() != basis.num_sites() {
            return Err(Error::invalid(format!(
                "lattice has {} sites but basis has {}",
                graph.num_sites(),
                basis.num_sites()
            )));
        }
        params.validate()?;
        let strides = basis.strides();
        let mut digits = vec![0u8; basis.num_sites()];
        let mut bond_zz = Vec::with_capacity(basis.dim());
        for idx in 0..basis.dim() {
            basis.decode_into(idx, &mut digits);
            let s: i64 = graph
                .edges()
                .iter()
                .map(|&(i, j)| (basis.twice_m(digits[i]) * basis.twice_m(digits[j])) as i64)
                .sum();
            bond_zz.push(0.25 * s as f64);
        }
        let neighbor_masks = if basis.two_s() == 1 && basis.num_sites() <= 64 {
            (0..graph.num_sites())
                .map(|s| graph.neighbors(s).iter().fold(0u64, |m, &k| m | (1 << k)))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self { graph, basis, params, strides, bond_zz, neighbor_masks })
    }

    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Same lattice and basis with different couplings; reuses the cached
    /// diagonal.
    pub fn with_params(&self, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let mut m = self.clone();
        m.params = params;
        Ok(m)
    }

    /// `Σ_bonds m_i m_j` for each basis index.
    pub fn bond_zz(&self) -> &[f64] {
        &self.bond_zz
    }

    pub fn operator(&self, kind: OperatorKind) -> Result<OperatorHandle<'_>> {
        OperatorHandle::new(self, kind)
    }

    pub fn apply_h0(&self, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::H0)?.apply(psi)
    }

    pub fn apply_v(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::V(t))?.apply(psi)
    }

    pub fn apply_h_of_t(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::HOfT(t))?.apply(psi)
    }

    pub fn apply_h_eff(&self, a: f64, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::HEff(a))?.apply(psi)
    }

    pub fn apply_h_eff_xy(&self, a: f64, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::HEffXy(a))?.apply(psi)
    }

    pub fn apply_h_ising(&self, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::HIsing)?.apply(psi)
    }

    pub fn apply_bond(&self, i: usize, j: usize, a: f64, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::Bond { i, j, a })?.apply(psi)
    }

    pub fn apply_z(&self, i: usize, j: usize, psi: &StateVector) -> Result<StateVector> {
        self.operator(OperatorKind::Z { i, j })?.apply(psi)
    }

    /// `2 Z_ij` on basis state `digits`.
    fn twice_z(&self, digits: &[u8], i: usize, j: usize) -> i32 {
        let b = self.basis;
        let pos: i32 = self.graph.neighbors(i).iter().map(|&k| b.twice_m(digits[k])).sum();
        let neg: i32 = self.graph.neighbors(j).iter().map(|&k| b.twice_m(digits[k])).sum();
        pos - neg
    }

    fn bessel_half_range(&self) -> i32 {
        2 * self.basis.two_s() as i32 * self.graph.max_degree() as i32
    }
}

/// Eigenvalue of `Z_ij = Σ_{k~i} S_k^z - Σ_{k~j} S_k^z` on a product state.
pub fn z_eigenvalue(graph: &LatticeGraph, state: &ProductState, i: usize, j: usize) -> Result<f64> {
    let (pos, neg) = graph.neighbor_sum_sites(i, j)?;
    if state.digits().len() != graph.num_sites() {
        return Err(Error::invalid("product state and lattice differ in size"));
    }
    let b = state.basis();
    let d = state.digits();
    let twice: i32 = pos.iter().map(|&k| b.twice_m(d[k])).sum::<i32>()
        - neg.iter().map(|&k| b.twice_m(d[k])).sum::<i32>();
    Ok(0.5 * twice as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    /// Full driven Hamiltonian at time `t`.
    HOfT(f64),
    /// Undriven part, `J∥ = J̄∥`.
    H0,
    /// Drive `-δJ cos(Ωt) Σ SzSz` at time `t`.
    V(f64),
    /// Effective Hamiltonian at amplitude `a`.
    HEff(f64),
    /// Dressed transverse part of the effective Hamiltonian.
    HEffXy(f64),
    /// `-J̄∥ Σ SzSz`.
    HIsing,
    /// `S_i^+ J0(a Z_ij) S_j^- + (+ <-> -)` without the `-J⊥/2` prefactor.
    Bond { i: usize, j: usize, a: f64 },
    /// Staggered magnetization around bond `(i, j)`.
    Z { i: usize, j: usize },
}

impl OperatorKind {
    pub fn is_time_dependent(&self) -> bool {
        matches!(self, OperatorKind::HOfT(_) | OperatorKind::V(_))
    }
}

/// Anything that maps a vector over the model basis linearly.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`; `y` is overwritten.
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// A prepared operator: Bessel factors tabulated and bond validated.
#[derive(Clone, Debug)]
pub struct OperatorHandle<'m> {
    model: &'m XxzModel,
    kind: OperatorKind,
    /// Dressing factors; `None` means undressed hopping (factor 1).
    table: Option<BesselTable>,
    hop_prefactor: f64,
    diag_coeff: f64,
}

impl<'m> OperatorHandle<'m> {
    pub fn new(model: &'m XxzModel, kind: OperatorKind) -> Result<Self> {
        let p = model.params;
        let half_range = model.bessel_half_range();
        let table_for = |a: f64| -> Result<Option<BesselTable>> {
            if !(a.is_finite()) {
                return Err(Error::invalid(format!("amplitude must be finite, got {a}")));
            }
            Ok(Some(BesselTable::new(a, half_range)?))
        };
        let check_time = |t: f64| -> Result<()> {
            if t.is_finite() { Ok(()) } else { Err(Error::invalid("time must be finite")) }
        };
        let (table, hop_prefactor, diag_coeff) = match kind {
            OperatorKind::HOfT(t) => {
                check_time(t)?;
                (None, -0.5 * p.j_perp, -p.j_par_at(t))
            }
            OperatorKind::H0 => (None, -0.5 * p.j_perp, -p.j_par_bar),
            OperatorKind::V(t) => {
                check_time(t)?;
                (None, 0.0, -p.delta_j() * (p.omega * t).cos())
            }
            OperatorKind::HEff(a) => (table_for(a)?, -0.5 * p.j_perp, -p.j_par_bar),
            OperatorKind::HEffXy(a) => (table_for(a)?, -0.5 * p.j_perp, 0.0),
            OperatorKind::HIsing => (None, 0.0, -p.j_par_bar),
            OperatorKind::Bond { i, j, a } => {
                model.graph.neighbor_sum_sites(i, j)?;
                (table_for(a)?, 1.0, 0.0)
            }
            OperatorKind::Z { i, j } => {
                model.graph.neighbor_sum_sites(i, j)?;
                (None, 0.0, 0.0)
            }
        };
        Ok(Self { model, kind, table, hop_prefactor, diag_coeff })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn model(&self) -> &'m XxzModel {
        self.model
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        psi.check_basis(self.model.basis)?;
        let mut out = StateVector::zeros(self.model.basis);
        self.apply_into(psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    fn bonds(&self) -> BondSelection<'_> {
        match self.kind {
            OperatorKind::Bond { i, j, .. } => BondSelection::One([(i, j)]),
            _ => BondSelection::All(self.model.graph.edges()),
        }
    }

    fn apply_diagonal(&self, x: &[Complex64], y: &mut [Complex64]) {
        if let OperatorKind::Z { i, j } = self.kind {
            let b = self.model.basis;
            let mut digits = vec![0u8; b.num_sites()];
            for (idx, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
                b.decode_into(idx, &mut digits);
                *yi = xi * (0.5 * self.model.twice_z(&digits, i, j) as f64);
            }
            return;
        }
        let c = self.diag_coeff;
        if c == 0.0 {
            y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            return;
        }
        for ((yi, xi), zz) in y.iter_mut().zip(x).zip(&self.model.bond_zz) {
            *yi = xi * (c * zz);
        }
    }

    fn apply_hopping_half(&self, x: &[Complex64], y: &mut [Complex64]) {
        let m = self.model;
        let bonds = self.bonds();
        let bonds = bonds.as_slice();
        let pre = self.hop_prefactor;
        let table = self.table.as_ref();
        let factor = |twice_z: i32| table.map_or(1.0, |t| t.get(twice_z));
        let masks = &m.neighbor_masks;
        for (n, &xn) in x.iter().enumerate() {
            if xn.re == 0.0 && xn.im == 0.0 {
                continue;
            }
            for &(i, j) in bonds {
                let bi = (n >> i) & 1;
                let bj = (n >> j) & 1;
                if bi == bj {
                    continue;
                }
                // bj = 1: S_i^+ S_j^- ; bj = 0: S_i^- S_j^+
                let mid = n ^ (1 << j);
                let tz = twice_z_bits(mid, masks[i], masks[j]);
                let target = mid ^ (1 << i);
                y[target] += xn * (pre * factor(tz));
            }
        }
    }

    fn apply_hopping_general(&self, x: &[Complex64], y: &mut [Complex64]) {
        let m = self.model;
        let b = m.basis;
        let two_s = b.two_s();
        let bonds = self.bonds();
        let bonds = bonds.as_slice();
        let pre = self.hop_prefactor;
        let table = self.table.as_ref();
        let mut digits = vec![0u8; b.num_sites()];
        for (n, &xn) in x.iter().enumerate() {
            if xn.re == 0.0 && xn.im == 0.0 {
                continue;
            }
            b.decode_into(n, &mut digits);
            for &(i, j) in bonds {
                // S_i^+ J0 S_j^- then S_i^- J0 S_j^+
                for (dir_i, dir_j) in [(Ladder::Raise, Ladder::Lower), (Ladder::Lower, Ladder::Raise)] {
                    let cj = ladder_coefficient(two_s, b.twice_m(digits[j]), dir_j);
                    let ci = ladder_coefficient(two_s, b.twice_m(digits[i]), dir_i);
                    if cj == 0.0 || ci == 0.0 {
                        continue;
                    }
                    let old_j = digits[j];
                    digits[j] = if dir_j == Ladder::Lower { old_j - 1 } else { old_j + 1 };
                    let dress = table.map_or(1.0, |t| t.get(m.twice_z(&digits, i, j)));
                    digits[j] = old_j;
                    let mut target = n;
                    target = if dir_j == Ladder::Lower { target - m.strides[j] } else { target + m.strides[j] };
                    target = if dir_i == Ladder::Raise { target + m.strides[i] } else { target - m.strides[i] };
                    y[target] += xn * (pre * ci * cj * dress);
                }
            }
        }
    }
}

/// `2 Z_ij` for a spin-1/2 basis index from neighbor bit masks.
#[inline]
fn twice_z_bits(state: usize, mask_i: u64, mask_j: u64) -> i32 {
    let s = state as u64;
    let up_i = (s & mask_i).count_ones() as i32;
    let up_j = (s & mask_j).count_ones() as i32;
    let deg_i = mask_i.count_ones() as i32;
    let deg_j = mask_j.count_ones() as i32;
    (2 * up_i - deg_i) - (2 * up_j - deg_j)
}

enum BondSelection<'a> {
    One([(usize, usize); 1]),
    All(&'a [(usize, usize)]),
}

impl BondSelection<'_> {
    fn as_slice(&self) -> &[(usize, usize)] {
        match self {
            BondSelection::One(b) => b,
            BondSelection::All(b) => b,
        }
    }
}

impl LinearOperator for OperatorHandle<'_> {
    fn dim(&self) -> usize {
        self.model.basis.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        self.apply_diagonal(x, y);
        if self.hop_prefactor == 0.0 {
            return;
        }
        if self.model.neighbor_masks.is_empty() {
            self.apply_hopping_general(x, y);
        } else {
            self.apply_hopping_half(x, y);
        }
    }
}

/// Dense matrix of a matrix-free operator, assembled column by column.
pub fn build_dense(op: &impl LinearOperator) -> Result<DenseMatrix> {
    let n = op.dim();
    if n > DENSE_DIM_CAP {
        return Err(Error::resource(format!(
            "dense build limited to dimension {DENSE_DIM_CAP}, requested {n}"
        )));
    }
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    let mut columns = Vec::with_capacity(n);
    for col in 0..n {
        e[col] = Complex64::new(1.0, 0.0);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        op.apply_into(&e, &mut y);
        columns.push(y);
        e[col] = Complex64::new(0.0, 0.0);
    }
    DenseMatrix::from_columns(&columns)
}
