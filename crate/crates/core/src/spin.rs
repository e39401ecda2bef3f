//! Spin-S product basis, product states and dense state vectors.
//!
//! A basis state is a base-`(2S+1)` number whose digit at position `k` is the
//! local level of site `k` (site 0 least significant). Digit `d` carries
//! magnetic quantum number `m = d - S`, so for spin 1/2 bit value 1 is `|↑⟩`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Math methods without std; redundant when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default cap on the number of amplitudes in a state vector.
pub const DEFAULT_DIM_CAP: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinBasis {
    num_sites: usize,
    two_s: u32,
    dim: usize,
}

impl SpinBasis {
    pub fn new(num_sites: usize, two_s: u32) -> Result<Self> {
        Self::with_cap(num_sites, two_s, DEFAULT_DIM_CAP)
    }

    pub fn spin_half(num_sites: usize) -> Result<Self> {
        Self::new(num_sites, 1)
    }

    pub fn with_cap(num_sites: usize, two_s: u32, cap: usize) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::invalid("basis needs at least one site"));
        }
        if two_s == 0 {
            return Err(Error::invalid("two_s must be positive"));
        }
        let local = two_s as usize + 1;
        let dim = u32::try_from(num_sites)
            .ok()
            .and_then(|n| local.checked_pow(n))
            .filter(|&d| d <= cap)
            .ok_or_else(|| {
                Error::resource(format!(
                    "Hilbert space of {num_sites} spin-{two_s}/2 sites exceeds the cap of {cap} amplitudes"
                ))
            })?;
        Ok(Self { num_sites, two_s, dim })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn local_dim(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Place values `(2S+1)^k` of each site.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.local_dim();
        let mut s = Vec::with_capacity(self.num_sites);
        let mut p = 1usize;
        for _ in 0..self.num_sites {
            s.push(p);
            p *= d;
        }
        s
    }

    /// `2m` for a local digit.
    #[inline]
    pub fn twice_m(&self, digit: u8) -> i32 {
        2 * digit as i32 - self.two_s as i32
    }

    #[inline]
    pub fn m_value(&self, digit: u8) -> f64 {
        0.5 * self.twice_m(digit) as f64
    }

    pub fn decode_into(&self, mut index: usize, digits: &mut [u8]) {
        debug_assert_eq!(digits.len(), self.num_sites);
        if self.two_s == 1 {
            for (k, d) in digits.iter_mut().enumerate() {
                *d = ((index >> k) & 1) as u8;
            }
            return;
        }
        let base = self.local_dim();
        for d in digits.iter_mut() {
            *d = (index % base) as u8;
            index /= base;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<u8> {
        let mut digits = vec![0; self.num_sites];
        self.decode_into(index, &mut digits);
        digits
    }

    pub fn encode(&self, digits: &[u8]) -> usize {
        let base = self.local_dim();
        digits.iter().rev().fold(0usize, |acc, &d| acc * base + d as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Matrix element `⟨m±1| S^± |m⟩ = sqrt(S(S+1) - m(m±1))`, zero when the move
/// leaves the multiplet.
pub fn ladder_coefficient(two_s: u32, twice_m: i32, direction: Ladder) -> f64 {
    let ts = two_s as i32;
    let target = match direction {
        Ladder::Raise => twice_m + 2,
        Ladder::Lower => twice_m - 2,
    };
    if twice_m.abs() > ts || target.abs() > ts {
        return 0.0;
    }
    // 4 [S(S+1) - m(m±1)] in integers
    let quad = match direction {
        Ladder::Raise => ts * (ts + 2) - twice_m * (twice_m + 2),
        Ladder::Lower => ts * (ts + 2) - twice_m * (twice_m - 2),
    };
    0.5 * (quad as f64).sqrt()
}

/// A tensor product of local `S^z` eigenstates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductState {
    basis: SpinBasis,
    digits: Vec<u8>,
}

impl ProductState {
    pub fn new(basis: SpinBasis, digits: Vec<u8>) -> Result<Self> {
        if digits.len() != basis.num_sites() {
            return Err(Error::invalid(format!(
                "expected {} site digits, got {}",
                basis.num_sites(),
                digits.len()
            )));
        }
        if let Some(pos) = digits.iter().position(|&d| d as usize >= basis.local_dim()) {
            return Err(Error::invalid(format!("digit at site {pos} exceeds 2S")));
        }
        Ok(Self { basis, digits })
    }

    pub fn from_index(basis: SpinBasis, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        Ok(Self { basis, digits: basis.decode(index) })
    }

    /// Spin-1/2 state from per-site up flags.
    pub fn from_spins(ups: &[bool]) -> Result<Self> {
        let basis = SpinBasis::spin_half(ups.len())?;
        Ok(Self { basis, digits: ups.iter().map(|&u| u as u8).collect() })
    }

    /// Parses arrow notation (`u`/`d` or `↑`/`↓`, leftmost character is the
    /// first site) for spin 1/2, or comma-separated `m` values such as
    /// `1,0,-1` or `3/2,-1/2` for any spin.
    pub fn parse(text: &str, basis: SpinBasis) -> Result<Self> {
        let digits = if text.contains(',') || basis.two_s() != 1 {
            parse_m_list(text, basis)?
        } else {
            parse_arrows(text, basis)?
        };
        Ok(Self { basis, digits })
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn index(&self) -> usize {
        self.basis.encode(&self.digits)
    }

    pub fn sz(&self, site: usize) -> Result<f64> {
        self.digits
            .get(site)
            .map(|&d| self.basis.m_value(d))
            .ok_or_else(|| Error::invalid(format!("site {site} out of range")))
    }

    pub fn is_up(&self, site: usize) -> bool {
        self.digits[site] as u32 == self.basis.two_s()
    }

    /// Every local level reflected, `m -> -m`.
    pub fn flipped(&self) -> Self {
        let top = self.basis.two_s() as u8;
        Self { basis: self.basis, digits: self.digits.iter().map(|&d| top - d).collect() }
    }

    /// Cyclic relabeling: the spin on site `k` moves to site `k + 1`.
    pub fn shifted(&self) -> Self {
        let mut digits = self.digits.clone();
        digits.rotate_right(1);
        Self { basis: self.basis, digits }
    }

    pub fn to_spin_string(&self) -> String {
        if self.basis.two_s() == 1 {
            self.digits.iter().map(|&d| if d == 1 { 'u' } else { 'd' }).collect()
        } else {
            let parts: Vec<String> = self
                .digits
                .iter()
                .map(|&d| {
                    let tm = self.basis.twice_m(d);
                    if tm % 2 == 0 { format!("{}", tm / 2) } else { format!("{tm}/2") }
                })
                .collect();
            parts.join(",")
        }
    }
}

fn parse_arrows(text: &str, basis: SpinBasis) -> Result<Vec<u8>> {
    let mut digits = Vec::with_capacity(basis.num_sites());
    for (pos, c) in text.chars().enumerate() {
        let d = match c {
            'u' | 'U' | '↑' => 1,
            'd' | 'D' | '↓' => 0,
            other => {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        digits.push(d);
    }
    if digits.len() != basis.num_sites() {
        return Err(Error::Parse {
            position: digits.len().min(basis.num_sites()),
            message: format!("expected {} sites, got {}", basis.num_sites(), digits.len()),
        });
    }
    Ok(digits)
}

fn parse_m_list(text: &str, basis: SpinBasis) -> Result<Vec<u8>> {
    let mut digits = Vec::with_capacity(basis.num_sites());
    for (pos, field) in text.split(',').enumerate() {
        let field = field.trim();
        let bad = |message: String| Error::Parse { position: pos, message };
        let twice_m: i32 = match field.split_once('/') {
            Some((num, "2")) => num.trim().parse().map_err(|_| bad(format!("bad value {field:?}")))?,
            Some(_) => return Err(bad(format!("bad fraction {field:?}"))),
            None => {
                let m: i32 = field.parse().map_err(|_| bad(format!("bad value {field:?}")))?;
                2 * m
            }
        };
        let shifted = twice_m + basis.two_s() as i32;
        if shifted < 0 || shifted > 2 * basis.two_s() as i32 || shifted % 2 != 0 {
            return Err(bad(format!("m = {field} is not a level of spin {}/2", basis.two_s())));
        }
        digits.push((shifted / 2) as u8);
    }
    if digits.len() != basis.num_sites() {
        return Err(Error::Parse {
            position: digits.len().min(basis.num_sites()),
            message: format!("expected {} sites, got {}", basis.num_sites(), digits.len()),
        });
    }
    Ok(digits)
}

/// Complex amplitudes over the full product basis. Never renormalized
/// implicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: SpinBasis,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(basis: SpinBasis) -> Self {
        Self { basis, amps: vec![Complex64::new(0.0, 0.0); basis.dim()] }
    }

    pub fn from_amplitudes(basis: SpinBasis, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                basis.dim(),
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(Self { basis, amps })
    }

    pub fn product(state: &ProductState) -> Self {
        let mut v = Self::zeros(state.basis());
        v.amps[state.index()] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: Complex64, other: &StateVector) -> Result<()> {
        self.check_basis(other.basis)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += alpha * b;
        }
        Ok(())
    }

    /// Euclidean distance `‖self - other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_basis(other.basis)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn check_basis(&self, other: SpinBasis) -> Result<()> {
        if self.basis != other {
            return Err(Error::invalid(format!(
                "basis mismatch: {} sites spin {}/2 vs {} sites spin {}/2",
                self.basis.num_sites(),
                self.basis.two_s(),
                other.num_sites(),
                other.two_s()
            )));
        }
        Ok(())
    }
}

/// `⟨Σ_i S_i^z⟩`, not divided by the norm.
pub fn total_magnetization(psi: &StateVector) -> f64 {
    let basis = psi.basis();
    let mut digits = vec![0u8; basis.num_sites()];
    let mut total = 0.0;
    for (idx, a) in psi.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        basis.decode_into(idx, &mut digits);
        let tm: i32 = digits.iter().map(|&d| basis.twice_m(d)).sum();
        total += p * 0.5 * tm as f64;
    }
    total
}
