//! Time evolution: a Lanczos approximation of `exp(-i dt H) ψ` and the
//! midpoint-frozen (second-order Magnus) stepping used for the driven
//! Hamiltonian.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::SymmetricTridiagonal;
use crate::operators::{LinearOperator, OperatorHandle, OperatorKind, XxzModel};
use crate::spin::StateVector;

/// Drift beyond which a run is rejected.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Allowed deviation of the initial norm from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

const MAX_SUBSTEPS: usize = 100_000;
const MAX_HALVINGS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub steps_per_period: usize,
    pub t_max: f64,
    /// Sorted times in `[0, t_max]` at which the state is reported.
    pub snapshot_times: Vec<f64>,
    pub krylov_dim: usize,
    pub tolerance: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            steps_per_period: 64,
            t_max: 0.0,
            snapshot_times: Vec::new(),
            krylov_dim: 20,
            tolerance: 1e-10,
        }
    }
}

impl EvolutionConfig {
    /// Snapshots every `interval` from 0 through `t_max` (inclusive when it
    /// lands on the grid within roundoff).
    pub fn with_uniform_snapshots(mut self, t_max: f64, interval: f64) -> Result<Self> {
        if !(interval > 0.0) || !interval.is_finite() {
            return Err(Error::invalid("snapshot interval must be positive"));
        }
        if !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::invalid("t_max must be finite and non-negative"));
        }
        let count = (t_max / interval + 1e-9).floor() as usize;
        self.t_max = t_max;
        self.snapshot_times = (0..=count).map(|k| (k as f64 * interval).min(t_max)).collect();
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < 8 {
            return Err(Error::invalid(format!(
                "steps_per_period must be at least 8, got {}",
                self.steps_per_period
            )));
        }
        if self.krylov_dim < 2 {
            return Err(Error::invalid("krylov_dim must be at least 2"));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::invalid("t_max must be finite and non-negative"));
        }
        let mut prev = 0.0;
        for &t in &self.snapshot_times {
            if !(t >= prev) || t > self.t_max {
                return Err(Error::invalid(format!(
                    "snapshot times must be sorted within [0, {}], found {t}",
                    self.t_max
                )));
            }
            prev = t;
        }
        Ok(())
    }
}

/// Stored snapshots of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `max |1 - ‖ψ(t)‖|` over every step taken.
    pub norm_drift: f64,
}

/// Outcome of a streamed run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub final_state: StateVector,
    pub norm_drift: f64,
    pub steps: usize,
}

/// `exp(-i dt H) ψ` for a Hermitian handle, accurate to
/// `tolerance · ‖ψ‖`.
pub fn expm_apply(
    handle: &OperatorHandle<'_>,
    dt: f64,
    psi: &StateVector,
    krylov_dim: usize,
    tolerance: f64,
) -> Result<StateVector> {
    psi.check_basis(handle.model().basis())?;
    let out = expm_apply_operator(handle, dt, psi.amplitudes(), krylov_dim, tolerance)?;
    StateVector::from_amplitudes(psi.basis(), out)
}

/// Slice-level variant of [`expm_apply`] for any operator known to be
/// Hermitian.
pub fn expm_apply_operator<O: LinearOperator + ?Sized>(
    op: &O,
    dt: f64,
    x: &[Complex64],
    krylov_dim: usize,
    tolerance: f64,
) -> Result<Vec<Complex64>> {
    if !dt.is_finite() {
        return Err(Error::invalid("time step must be finite"));
    }
    if krylov_dim < 2 {
        return Err(Error::invalid("krylov_dim must be at least 2"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if x.len() != op.dim() {
        return Err(Error::invalid("vector length does not match operator dimension"));
    }
    let mut v: Vec<Complex64> = x.to_vec();
    if dt == 0.0 {
        return Ok(v);
    }
    let total = dt.abs();
    let sign = dt.signum();
    let mut done = 0.0;
    let mut substeps = 0;
    let mut lanczos = Lanczos::new(op.dim(), krylov_dim.min(op.dim()));
    while done < total {
        substeps += 1;
        if substeps > MAX_SUBSTEPS {
            return Err(Error::accuracy("Krylov exponential needed too many substeps"));
        }
        let beta0 = norm(&v);
        if beta0 == 0.0 {
            return Ok(v);
        }
        let remaining = total - done;
        lanczos.build(op, &v, beta0, (sign * remaining, tolerance * remaining / total));
        let mut tau = remaining;
        let mut halvings = 0;
        let coeffs = loop {
            let c = lanczos.small_exponential(sign * tau);
            let err = lanczos.error_estimate(&c) * beta0;
            if err <= tolerance * beta0 * (tau / total) {
                break c;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::accuracy(format!(
                    "Krylov exponential did not converge (estimate {err:.3e})"
                )));
            }
            tau *= 0.5;
        };
        lanczos.combine(&coeffs, beta0, &mut v);
        // the last substep lands exactly on the target
        done = if tau == remaining { total } else { done + tau };
    }
    Ok(v)
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(p, q)| p.conj() * q).sum()
}

/// Orthonormal Krylov basis with full reorthogonalization.
struct Lanczos {
    basis: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Coupling to the first discarded direction; zero after breakdown.
    residual: f64,
    work: Vec<Complex64>,
}

impl Lanczos {
    fn new(dim: usize, m: usize) -> Self {
        Self {
            basis: (0..m).map(|_| vec![Complex64::new(0.0, 0.0); dim]).collect(),
            alpha: Vec::with_capacity(m),
            beta: Vec::with_capacity(m),
            residual: 0.0,
            work: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    fn size(&self) -> usize {
        self.alpha.len()
    }

    /// Builds up to `m` basis vectors from `start`, stopping early once the
    /// projected exponential at `target.0` meets the error bound `target.1`;
    /// short steps then need only a few vectors.
    fn build<O: LinearOperator + ?Sized>(
        &mut self,
        op: &O,
        start: &[Complex64],
        beta0: f64,
        target: (f64, f64),
    ) {
        let m = self.basis.len();
        self.alpha.clear();
        self.beta.clear();
        self.residual = 0.0;
        let inv = 1.0 / beta0;
        for (b, s) in self.basis[0].iter_mut().zip(start) {
            *b = s * inv;
        }
        let mut scale = 0.0f64;
        for j in 0..m {
            op.apply_into(&self.basis[j], &mut self.work);
            let a = dot(&self.basis[j], &self.work).re;
            self.alpha.push(a);
            let before = norm(&self.work);
            self.orthogonalize(j);
            let mut b = norm(&self.work);
            // second sweep only when the first one cancelled heavily
            if b < FRAC_1_SQRT_2 * before {
                self.orthogonalize(j);
                b = norm(&self.work);
            }
            scale = scale.max(a.abs() + b + self.beta.last().copied().unwrap_or(0.0));
            if b <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                // invariant subspace: the projection is exact
                return;
            }
            if j + 1 == m {
                self.residual = b;
                return;
            }
            if j >= 1 {
                self.residual = b;
                if self.error_estimate(&self.small_exponential(target.0)) <= target.1 {
                    return;
                }
                self.residual = 0.0;
            }
            self.beta.push(b);
            let inv = 1.0 / b;
            for (t, w) in self.basis[j + 1].iter_mut().zip(&self.work) {
                *t = w * inv;
            }
        }
    }

    fn orthogonalize(&mut self, j: usize) {
        for k in 0..=j {
            let c = dot(&self.basis[k], &self.work);
            for (w, b) in self.work.iter_mut().zip(&self.basis[k]) {
                *w -= c * b;
            }
        }
    }

    /// `exp(-i t T) e1` in the Krylov coordinates.
    fn small_exponential(&self, t: f64) -> Vec<Complex64> {
        let n = self.size();
        let tri = SymmetricTridiagonal { diag: self.alpha.clone(), off: self.beta.clone() };
        let eig = tri.eigen();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (col, &lambda) in eig.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -t * lambda);
            let weight = phase * eig.vectors[col];
            for (row, o) in out.iter_mut().enumerate() {
                *o += weight * eig.vectors[row * n + col];
            }
        }
        out
    }

    fn error_estimate(&self, coeffs: &[Complex64]) -> f64 {
        self.residual * coeffs.last().map_or(0.0, |c| c.norm())
    }

    fn combine(&self, coeffs: &[Complex64], beta0: f64, out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (c, b) in coeffs.iter().zip(&self.basis) {
            let w = c * beta0;
            for (o, v) in out.iter_mut().zip(b) {
                *o += w * v;
            }
        }
    }
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::invalid(format!("initial state must be normalized, has norm {n}")));
    }
    Ok(())
}

fn drift_check(drift: f64) -> Result<()> {
    if drift > MAX_NORM_DRIFT {
        return Err(Error::accuracy(format!(
            "norm drift {drift:.3e} exceeds {MAX_NORM_DRIFT:e}; increase steps_per_period"
        )));
    }
    Ok(())
}

/// Evolves `psi` from `t_start` to `t_end` under `H(t)` (either direction),
/// calling `observer` at each of `stops` (monotone between the two ends)
/// and at `t_end`.
///
/// Steps follow the grid `k T / steps_per_period`; a stop between grid
/// points shortens the step that reaches it, and the walk resumes on the
/// grid afterwards. Each step applies `exp(-i h H(t_mid))`.
pub fn evolve_periodic_between(
    model: &XxzModel,
    psi: &StateVector,
    t_start: f64,
    t_end: f64,
    stops: &[f64],
    config: &EvolutionConfig,
    observer: &mut dyn FnMut(f64, &StateVector) -> Result<()>,
) -> Result<RunSummary> {
    if !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::invalid("evolution endpoints must be finite"));
    }
    if config.steps_per_period < 8 {
        return Err(Error::invalid("steps_per_period must be at least 8"));
    }
    psi.check_basis(model.basis())?;
    let initial_norm = psi.norm();
    let dir = if t_end >= t_start { 1.0 } else { -1.0 };
    let h = model.params().period() / config.steps_per_period as f64;
    let snap = 1e-9 * h;

    let mut state = psi.clone();
    let mut t = t_start;
    let mut drift: f64 = 0.0;
    let mut steps = 0;
    let targets = stops.iter().copied().chain(core::iter::once(t_end));
    for target in targets {
        if (target - t) * dir < -snap || (target - t_end) * dir > snap {
            return Err(Error::invalid(format!("stop {target} is outside the evolution window")));
        }
        while (target - t) * dir > snap {
            let cell = t / h;
            let next_grid = if dir > 0.0 {
                ((cell + 1e-9).floor() + 1.0) * h
            } else {
                ((cell - 1e-9).ceil() - 1.0) * h
            };
            let end = if (target - next_grid) * dir <= snap { target } else { next_grid };
            let handle = model.operator(OperatorKind::HOfT(0.5 * (t + end)))?;
            let amps = expm_apply_operator(
                &handle,
                end - t,
                state.amplitudes(),
                config.krylov_dim,
                config.tolerance,
            )?;
            state = StateVector::from_amplitudes(model.basis(), amps)?;
            steps += 1;
            drift = drift.max((state.norm() - initial_norm).abs());
            drift_check(drift)?;
            t = end;
        }
        observer(target, &state)?;
    }
    Ok(RunSummary { final_state: state, norm_drift: drift, steps })
}

/// Streams the driven evolution from 0 to `config.t_max`, calling
/// `observer` at every snapshot time.
pub fn evolve_periodic_with(
    model: &XxzModel,
    psi0: &StateVector,
    config: &EvolutionConfig,
    observer: &mut dyn FnMut(f64, &StateVector) -> Result<()>,
) -> Result<RunSummary> {
    config.validate()?;
    check_normalized(psi0)?;
    let snaps = &config.snapshot_times;
    let mut wrapped = |t: f64, s: &StateVector| -> Result<()> {
        // the final call at t_max is only reported if requested
        if snaps.iter().any(|&x| x == t) { observer(t, s) } else { Ok(()) }
    };
    let stops: Vec<f64> = dedup(snaps).into_iter().filter(|&x| x < config.t_max).collect();
    evolve_periodic_between(model, psi0, 0.0, config.t_max, &stops, config, &mut wrapped)
}

fn dedup(times: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(times.len());
    for &t in times {
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    out
}

/// Driven evolution keeping the full state at every snapshot time.
pub fn evolve_periodic(
    model: &XxzModel,
    psi0: &StateVector,
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let summary = evolve_periodic_with(model, psi0, config, &mut |t, s| {
        times.push(t);
        states.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory { times, states, norm_drift: summary.norm_drift })
}

fn check_static(handle: &OperatorHandle<'_>) -> Result<()> {
    match handle.kind() {
        OperatorKind::H0 | OperatorKind::HEff(_) | OperatorKind::HEffXy(_) | OperatorKind::HIsing => {
            Ok(())
        }
        other => Err(Error::invalid(format!(
            "static evolution needs a time-independent Hamiltonian, got {other:?}"
        ))),
    }
}

/// Streams `exp(-i t H) ψ0` for each of `times` (evaluated in order, each
/// from the previous one).
pub fn evolve_static_with(
    handle: &OperatorHandle<'_>,
    psi0: &StateVector,
    times: &[f64],
    krylov_dim: usize,
    tolerance: f64,
    observer: &mut dyn FnMut(f64, &StateVector) -> Result<()>,
) -> Result<RunSummary> {
    check_static(handle)?;
    check_normalized(psi0)?;
    psi0.check_basis(handle.model().basis())?;
    let initial_norm = psi0.norm();
    let mut state = psi0.clone();
    let mut t_prev = 0.0;
    let mut drift: f64 = 0.0;
    for &t in times {
        if !t.is_finite() {
            return Err(Error::invalid("evolution times must be finite"));
        }
        if t != t_prev {
            state = expm_apply(handle, t - t_prev, &state, krylov_dim, tolerance)?;
            drift = drift.max((state.norm() - initial_norm).abs());
            drift_check(drift)?;
            t_prev = t;
        }
        observer(t, &state)?;
    }
    Ok(RunSummary { final_state: state, norm_drift: drift, steps: times.len() })
}

/// Static evolution keeping the full state at every requested time.
pub fn evolve_static(
    handle: &OperatorHandle<'_>,
    psi0: &StateVector,
    times: &[f64],
) -> Result<Trajectory> {
    let defaults = EvolutionConfig::default();
    let mut out_times = Vec::new();
    let mut states = Vec::new();
    let summary = evolve_static_with(
        handle,
        psi0,
        times,
        defaults.krylov_dim,
        defaults.tolerance,
        &mut |t, s| {
            out_times.push(t);
            states.push(s.clone());
            Ok(())
        },
    )?;
    Ok(Trajectory { times: out_times, states, norm_drift: summary.norm_drift })
}
