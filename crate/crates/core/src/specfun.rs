//! Zeroth-order Bessel function of the first kind, its positive zeros, and a
//! trapezoidal evaluation of its integral representation used as a
//! cross-check.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
// Math methods without std; redundant when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Positive zeros of J0, refined against [`j0`] on request.
const J0_ZEROS: [f64; 20] = [
    2.404825557695773,
    5.520078110286311,
    8.653727912911013,
    11.791534439014281,
    14.930917708487787,
    18.071063967910924,
    21.211636629879260,
    24.352471530749302,
    27.493479132040254,
    30.634606468431975,
    33.775820213573570,
    36.917098353664045,
    40.058425764628240,
    43.199791713176730,
    46.341188371661815,
    49.482609897397815,
    52.624051841115000,
    55.765510755019980,
    58.906983926080940,
    62.048469190227166,
];

/// `J0(x)`. Even in `x`; accurate to about 1e-14 absolute for `|x| <= 50`.
pub fn j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("j0 argument must be finite, got {x}")));
    }
    Ok(j0_finite(x))
}

pub(crate) fn j0_finite(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        j0_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        j0_miller(x)
    } else {
        j0_hankel(x)
    }
}

/// `Σ_k (-x²/4)^k / (k!)²`, summed until terms drop below 1e-18.
fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Backward recurrence `J_{k-1} = (2k/x) J_k - J_{k+1}` normalized by
/// `J0 + 2 Σ J_{2k} = 1`.
fn j0_miller(x: f64) -> f64 {
    let mut n = (1.5 * x) as usize + 40;
    n += n % 2;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=n).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    cur / (norm + cur)
}

/// Hankel expansion `sqrt(2/πx) (P cos χ - Q sin χ)`, `χ = x - π/4`.
fn j0_hankel(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = Π_{j=1..k} (2j-1)² / (k! (8x)^k), alternating by pairs.
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * eight_x);
        if term.abs() > last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q -= sign * term;
        } else {
            p += sign * term;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The `k`-th positive zero of J0, `1 <= k <= 20`, with `|J0| <= 1e-12` there.
pub fn j0_zero(k: usize) -> Result<f64> {
    if k == 0 || k > J0_ZEROS.len() {
        return Err(Error::invalid(format!(
            "zero index must be in 1..={}, got {k}",
            J0_ZEROS.len()
        )));
    }
    Ok(refine_root(J0_ZEROS[k - 1]))
}

/// Bisection on a bracket around a tabulated zero.
fn refine_root(guess: f64) -> f64 {
    let (mut lo, mut hi) = (guess - 1e-3, guess + 1e-3);
    let mut flo = j0_finite(lo);
    debug_assert!(flo * j0_finite(hi) < 0.0);
    while hi - lo > 2.0 * f64::EPSILON * guess {
        let mid = 0.5 * (lo + hi);
        let fm = j0_finite(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm * flo > 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if j0_finite(lo).abs() <= j0_finite(hi).abs() { lo } else { hi }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    /// Imaginary part of the trapezoidal sum; zero in exact arithmetic.
    pub imaginary: f64,
}

/// Trapezoidal rule for `(1/2π) ∫₀^{2π} exp(-i a sin θ) dθ = J0(a)`.
pub fn j0_by_quadrature(a: f64, nodes: usize) -> Result<QuadratureValue> {
    if nodes < 16 {
        return Err(Error::invalid(format!("need at least 16 quadrature nodes, got {nodes}")));
    }
    if !a.is_finite() {
        return Err(Error::invalid("quadrature argument must be finite"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = 2.0 * PI * k as f64 / nodes as f64;
        let phase = -a * theta.sin();
        sum += Complex64::new(phase.cos(), phase.sin());
    }
    sum /= nodes as f64;
    Ok(QuadratureValue { value: sum.re, imaginary: sum.im })
}

/// `J0(a z / 2)` for every integer `z` in `-half_range..=half_range`: the
/// dressing factors for one amplitude `a` when the staggered magnetization
/// takes values `z / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselTable {
    amplitude: f64,
    half_range: i32,
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(amplitude: f64, half_range: i32) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be finite"));
        }
        let values = (-half_range..=half_range)
            .map(|tz| j0_finite(amplitude * 0.5 * tz as f64))
            .collect();
        Ok(Self { amplitude, half_range, values })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `J0(a · twice_z / 2)`.
    #[inline]
    pub fn get(&self, twice_z: i32) -> f64 {
        debug_assert!(twice_z.abs() <= self.half_range);
        self.values[(twice_z + self.half_range) as usize]
    }
}
