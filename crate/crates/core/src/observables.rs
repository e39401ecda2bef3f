//! Measured quantities: local magnetization, the half-chain reduced density
//! matrix and its entropy per site, overlaps and energies.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, DenseMatrix};
use crate::operators::{OperatorHandle, DENSE_DIM_CAP};
use crate::spin::StateVector;

const NORM_TOLERANCE: f64 = 1e-6;
const CLIP_THRESHOLD: f64 = 1e-12;
const NEGATIVE_EIGENVALUE_LIMIT: f64 = 1e-9;

fn check_normalized(psi: &StateVector) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::invalid(format!("state must be normalized, has norm {n}")));
    }
    Ok(())
}

/// `⟨ψ| S_n^z |ψ⟩` for every site `n`.
pub fn sz_profile(psi: &StateVector) -> Result<Vec<f64>> {
    check_normalized(psi)?;
    let basis = psi.basis();
    let l = basis.num_sites();
    let mut out = vec![0.0; l];
    let mut digits = vec![0u8; l];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        basis.decode_into(idx, &mut digits);
        for (o, &d) in out.iter_mut().zip(&digits) {
            *o += w * basis.m_value(d);
        }
    }
    Ok(out)
}

/// Amplitudes arranged as `M[a][b]` with `a` indexing the first `L/2` sites
/// and `b` the rest. Site 0 is the least significant digit, so `a` is the
/// low part of the basis index.
fn half_split(psi: &StateVector) -> Result<(usize, usize)> {
    let basis = psi.basis();
    let l = basis.num_sites();
    if l % 2 != 0 {
        return Err(Error::invalid(format!("half-chain cut needs an even length, got {l}")));
    }
    let first = basis.local_dim().pow((l / 2) as u32);
    let second = basis.dim() / first;
    if second > DENSE_DIM_CAP {
        return Err(Error::resource(format!(
            "reduced density matrix of dimension {second} exceeds {DENSE_DIM_CAP}"
        )));
    }
    Ok((first, second))
}

/// `ρ = Tr_{first half} |ψ⟩⟨ψ|` on the second half, i.e. `M^T M*` in the
/// layout above: `ρ[b][b'] = Σ_a ψ[a,b] ψ*[a,b']`.
pub fn reduced_density_half(psi: &StateVector) -> Result<DenseMatrix> {
    let (first, second) = half_split(psi)?;
    let amps = psi.amplitudes();
    let mut rho = DenseMatrix::zeros(second);
    for b in 0..second {
        for bp in b..second {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..first {
                s += amps[a + first * b] * amps[a + first * bp].conj();
            }
            rho.set(b, bp, s);
            if bp != b {
                rho.set(bp, b, s.conj());
            }
        }
    }
    Ok(rho)
}

/// Reduced density matrix of the first half, used to confirm that both
/// halves of a pure state carry the same entropy.
pub fn reduced_density_first_half(psi: &StateVector) -> Result<DenseMatrix> {
    let (first, second) = half_split(psi)?;
    if first > DENSE_DIM_CAP {
        return Err(Error::resource("reduced density matrix too large"));
    }
    let amps = psi.amplitudes();
    let mut rho = DenseMatrix::zeros(first);
    for a in 0..first {
        for ap in a..first {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..second {
                s += amps[a + first * b] * amps[ap + first * b].conj();
            }
            rho.set(a, ap, s);
            if ap != a {
                rho.set(ap, a, s.conj());
            }
        }
    }
    Ok(rho)
}

/// Von Neumann entropy (natural log) of a density matrix.
pub fn von_neumann_entropy(rho: &DenseMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in hermitian_eigenvalues(rho) {
        if lambda < -NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::NumericalConsistency(format!(
                "density matrix has eigenvalue {lambda:e}"
            )));
        }
        let p = if lambda < CLIP_THRESHOLD { 0.0 } else { lambda.min(1.0) };
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s)
}

/// `(1/L) S(ρ_{L/2})` in nats.
pub fn entanglement_entropy_per_site(psi: &StateVector) -> Result<f64> {
    let l = psi.basis().num_sites();
    let rho = reduced_density_half(psi)?;
    Ok(von_neumann_entropy(&rho)? / l as f64)
}

/// `⟨φ|ψ⟩`.
pub fn overlap(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    psi.check_basis(phi.basis())?;
    Ok(phi.amplitudes().iter().zip(psi.amplitudes()).map(|(p, q)| p.conj() * q).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energy {
    pub value: f64,
    /// Imaginary part of `⟨ψ|H|ψ⟩`; roundoff for a Hermitian operator.
    pub imaginary: f64,
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy(handle: &OperatorHandle<'_>, psi: &StateVector) -> Result<Energy> {
    let h_psi = handle.apply(psi)?;
    let e = overlap(&h_psi, psi)?;
    Ok(Energy { value: e.re, imaginary: e.im })
}
