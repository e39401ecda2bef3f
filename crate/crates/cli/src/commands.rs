use std::path::{Path, PathBuf};
use std::thread;

use serde::Serialize;
use xxz_floquet::classifier::{
    all_clusters, classify_product_state, embed_cluster, localized_indices, MAX_ENUMERATION_LENGTH,
};
use xxz_floquet::evolution::{evolve_periodic_with, evolve_static_with, EvolutionConfig, RunSummary};
use xxz_floquet::observables::{entanglement_entropy_per_site, sz_profile};
use xxz_floquet::{
    classify_cluster, j0_zero, ClusterClass, LatticeGraph, OperatorKind, SpinBasis, StateVector,
    XxzModel,
};

use crate::config::{parse_state, Config, Driver};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, CsvWriter, Manifest};

pub const SZ_PROFILE_FILE: &str = "sz_profile.csv";
pub const ENTROPY_FILE: &str = "entropy.csv";
pub const CLASSIFY_FILE: &str = "classify.json";
pub const EFFCHECK_FILE: &str = "effcheck.json";
pub const TABLE1_FILE: &str = "table1.json";

/// Norm drift above this is reported as a warning.
const DRIFT_WARNING: f64 = 1e-8;

/// What a command hands back to the driver: the manifest to write and the
/// text to print.
pub struct Outcome {
    pub manifest: Manifest,
    pub stdout: String,
}

fn relative(out: &Path, path: &Path) -> String {
    path.strip_prefix(out).unwrap_or(path).to_string_lossy().replace('\\', "/")
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Serialize)]
pub struct StateReport {
    pub input: String,
    pub spins: String,
    pub class: &'static str,
    /// 1-based bonds whose four-site cluster is in class h1.
    pub witness: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct EnumerationReport {
    pub total: u64,
    pub localized: u64,
    pub non_localized: u64,
    pub localized_states: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationReport>,
}

pub fn classify(config: &Config, out: &Path) -> CliResult<Outcome> {
    let graph = config.graph()?;
    let basis = config.basis(&graph)?;
    let length = graph.periodic_chain_length().filter(|_| basis.two_s() == 1).ok_or_else(|| {
        CliError::Config("lattice: classification needs a periodic spin-1/2 chain".into())
    })?;
    let section = &config.classify;
    if section.state.is_none() && !section.enumerate {
        return Err(CliError::Config("classify: give classify.state or set classify.enumerate".into()));
    }

    let state = match &section.state {
        Some(text) => {
            let s = parse_state(text, basis, "classify.state")?;
            let class = classify_product_state(&graph, &s).map_err(|e| CliError::at("classify", e))?;
            Some(StateReport {
                input: text.clone(),
                spins: s.to_spin_string(),
                class: if class.is_localized() { "localized" } else { "non-localized" },
                witness: class.witness.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            })
        }
        None => None,
    };

    let enumeration = if section.enumerate {
        if length > MAX_ENUMERATION_LENGTH {
            return Err(CliError::Resource(format!(
                "enumeration is limited to L <= {MAX_ENUMERATION_LENGTH}, got {length}"
            )));
        }
        let idx = localized_indices(length)?;
        let total = 1u64 << length;
        let localized_states = idx
            .iter()
            .map(|&n| xxz_floquet::ProductState::from_index(basis, n).map(|s| s.to_spin_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Some(EnumerationReport {
            total,
            localized: idx.len() as u64,
            non_localized: total - idx.len() as u64,
            localized_states,
        })
    } else {
        None
    };

    let report = ClassifyReport { length, state, enumeration };
    let path = write_json(out, CLASSIFY_FILE, &report)?;
    let mut manifest = Manifest::new("classify", config);
    manifest.outputs.push(relative(out, &path));
    Ok(Outcome { manifest, stdout: to_json(&report) })
}

// ---------------------------------------------------------------- effcheck

#[derive(Debug, Serialize)]
pub struct EffcheckEntry {
    pub a: f64,
    pub max_abs_deviation: f64,
    pub hermiticity_error: f64,
}

#[derive(Debug, Serialize)]
pub struct EffcheckReport {
    pub sites: usize,
    pub spin: String,
    pub dim: usize,
    pub nodes: usize,
    pub checks: Vec<EffcheckEntry>,
    pub max_abs_deviation: f64,
}

pub fn effcheck(config: &Config, out: &Path) -> CliResult<Outcome> {
    let model = config.model()?;
    let section = &config.effcheck;
    if section.a.is_empty() {
        return Err(CliError::Config("effcheck.a: at least one amplitude is required".into()));
    }
    let mut checks = Vec::with_capacity(section.a.len());
    for &a in &section.a {
        let c = xxz_floquet::effcheck(&model, a, section.nodes).map_err(|e| CliError::at("effcheck", e))?;
        checks.push(EffcheckEntry {
            a,
            max_abs_deviation: c.max_abs_deviation,
            hermiticity_error: c.hermiticity_error,
        });
    }
    let report = EffcheckReport {
        sites: model.graph().num_sites(),
        spin: config.lattice.spin.clone(),
        dim: model.basis().dim(),
        nodes: section.nodes,
        max_abs_deviation: checks.iter().map(|c| c.max_abs_deviation).fold(0.0, f64::max),
        checks,
    };
    let path = write_json(out, EFFCHECK_FILE, &report)?;
    let mut manifest = Manifest::new("effcheck", config);
    manifest.outputs.push(relative(out, &path));
    Ok(Outcome { manifest, stdout: to_json(&report) })
}

// ------------------------------------------------------------------ table1

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub cluster: String,
    pub spins: String,
    pub class: &'static str,
    pub coefficient: &'static str,
    /// Numerical value of the coefficient at the configured amplitude.
    pub coefficient_value: Option<f64>,
    /// Whether the dressed bond operator at the first zero of J0 maps the
    /// embedded cluster to zero.
    pub annihilated_at_zero: bool,
}

#[derive(Debug, Serialize)]
pub struct Table1Report {
    pub amplitude: f64,
    pub first_zero: f64,
    pub rows: Vec<TableRow>,
}

pub fn table1(config: &Config, out: &Path) -> CliResult<Outcome> {
    let params = config.params(config.omegas()?[0])?;
    let a = params.amplitude_a;
    let zero = j0_zero(1)?;
    let ring = 8;
    let model = XxzModel::new(LatticeGraph::chain(ring, true)?, SpinBasis::spin_half(ring)?, params)?;
    let mut rows = Vec::with_capacity(16);
    for c in all_clusters() {
        let class = classify_cluster(c[0], c[1], c[2], c[3]);
        // cluster on 0-based sites 1..=4, central bond (2, 3)
        let psi = StateVector::product(&embed_cluster(ring, 2, c)?);
        let image = model.apply_bond(2, 3, zero, &psi)?;
        rows.push(TableRow {
            cluster: c.iter().map(|s| s.arrow()).collect(),
            spins: c.iter().map(|s| if s.is_up() { 'u' } else { 'd' }).collect(),
            class: class.label(),
            coefficient: match class {
                ClusterClass::H0 => "J0(A)",
                ClusterClass::H1 => "1",
                ClusterClass::HX => "undefined",
            },
            coefficient_value: class.coefficient(a)?,
            annihilated_at_zero: image.norm() <= 1e-12,
        });
    }
    let report = Table1Report { amplitude: a, first_zero: zero, rows };
    let path = write_json(out, TABLE1_FILE, &report)?;
    let mut manifest = Manifest::new("table1", config);
    manifest.outputs.push(relative(out, &path));

    let mut text = format!("{:<8} {:<5} {:<11} {:<22} annihilated at A={zero}\n", "cluster", "class", "coefficient", "value");
    for r in &report.rows {
        let value = r.coefficient_value.map_or("-".to_string(), |v| format!("{v:.16e}"));
        let yes = if r.annihilated_at_zero { "yes" } else { "no" };
        text.push_str(&format!("{:<8} {:<5} {:<11} {:<22} {yes}\n", r.cluster, r.class, r.coefficient, value));
    }
    text.pop();
    Ok(Outcome { manifest, stdout: text })
}

// ------------------------------------------------------------------ evolve

struct Trajectory {
    outputs: Vec<PathBuf>,
    norm_drift: f64,
    warnings: Vec<String>,
}

fn omega_dir(out: &Path, omega: f64, sweep: bool) -> PathBuf {
    if sweep { out.join(format!("omega_{omega}")) } else { out.to_path_buf() }
}

pub fn evolve(config: &Config, out: &Path) -> CliResult<Outcome> {
    let omegas = config.omegas()?;
    let graph = config.graph()?;
    let basis = config.basis(&graph)?;
    let psi0 = StateVector::product(&parse_state(&config.evolve.state, basis, "evolve.state")?);
    let unit = config.time_unit()?;
    let times = config.snapshot_times()?;
    let e = &config.evolve;
    let ev = EvolutionConfig {
        steps_per_period: e.steps_per_period,
        t_max: e.t_max * unit,
        snapshot_times: times.iter().map(|t| t * unit).collect(),
        krylov_dim: e.krylov_dim,
        tolerance: e.tolerance,
    };
    ev.validate().map_err(|err| CliError::at("evolve", err))?;
    let mut models = Vec::with_capacity(omegas.len());
    for &w in &omegas {
        models.push(XxzModel::new(graph.clone(), basis, config.params(w)?)?);
    }

    let sweep = omegas.len() > 1;
    // independent trajectories, one thread each; results are per-thread
    // deterministic, so the outputs do not depend on scheduling
    let results: Vec<CliResult<Trajectory>> = thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .zip(&omegas)
            .map(|(model, &w)| {
                let dir = omega_dir(out, w, sweep);
                let (psi0, ev, times) = (&psi0, &ev, &times);
                scope.spawn(move || run_trajectory(model, psi0, ev, e.driver, times, dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trajectory thread panicked")).collect()
    });

    let mut manifest = Manifest::new("evolve", config);
    let mut drift: f64 = 0.0;
    for (r, w) in results.into_iter().zip(&omegas) {
        let traj = r?;
        drift = drift.max(traj.norm_drift);
        manifest.outputs.extend(traj.outputs.iter().map(|p| relative(out, p)));
        let tag = if sweep { format!("omega={w}: ") } else { String::new() };
        manifest.warnings.extend(traj.warnings.into_iter().map(|m| format!("{tag}{m}")));
    }
    manifest.norm_drift = Some(drift);
    let stdout = manifest.outputs.join("\n");
    Ok(Outcome { manifest, stdout })
}

fn run_trajectory(
    model: &XxzModel,
    psi0: &StateVector,
    ev: &EvolutionConfig,
    driver: Driver,
    times: &[f64],
    dir: PathBuf,
) -> CliResult<Trajectory> {
    let with_entropy = model.basis().num_sites() % 2 == 0;
    let mut profiles: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    let mut entropies: Vec<f64> = Vec::with_capacity(times.len());
    let mut observer = |_t: f64, s: &StateVector| -> xxz_floquet::Result<()> {
        profiles.push(sz_profile(s)?);
        if with_entropy {
            entropies.push(entanglement_entropy_per_site(s)?);
        }
        Ok(())
    };
    let summary: RunSummary = match driver {
        Driver::Periodic => evolve_periodic_with(model, psi0, ev, &mut observer)?,
        Driver::Effective => {
            let h = model.operator(OperatorKind::HEff(model.params().amplitude_a))?;
            evolve_static_with(&h, psi0, &ev.snapshot_times, ev.krylov_dim, ev.tolerance, &mut observer)?
        }
    };
    debug_assert_eq!(profiles.len(), times.len());

    let mut outputs = Vec::new();
    let mut warnings = Vec::new();
    let path = dir.join(SZ_PROFILE_FILE);
    let mut csv = CsvWriter::create(&path, "t,site,sz")?;
    for (t, p) in times.iter().zip(&profiles) {
        csv.profile_rows(*t, p)?;
    }
    csv.finish()?;
    outputs.push(path);
    if with_entropy {
        let path = dir.join(ENTROPY_FILE);
        let mut csv = CsvWriter::create(&path, "t,sigma")?;
        for (t, s) in times.iter().zip(&entropies) {
            csv.pair(*t, *s)?;
        }
        csv.finish()?;
        outputs.push(path);
    } else {
        warnings.push(format!("{ENTROPY_FILE} skipped: the half-system cut needs an even number of sites"));
    }
    if summary.norm_drift > DRIFT_WARNING {
        warnings.push(format!("norm drift {:.3e} exceeds {DRIFT_WARNING:e}", summary.norm_drift));
    }
    Ok(Trajectory { outputs, norm_drift: summary.norm_drift, warnings })
}
