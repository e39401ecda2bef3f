//! Run configuration: a TOML file with `[lattice]`, `[model]`, `[evolve]`,
//! `[classify]` and `[effcheck]` sections, every key optional. Command-line
//! flags are applied on top of the file.
//!
//! Times (`evolve.t_max`, `evolve.snapshots`) are in units of `1/|J∥|`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use xxz_floquet::{LatticeGraph, LibraryState, ModelParams, ProductState, SpinBasis, XxzModel};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lattice: LatticeSection,
    pub model: ModelSection,
    pub evolve: EvolveSection,
    pub classify: ClassifySection,
    pub effcheck: EffcheckSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LatticeShape {
    Chain,
    Square,
    /// Sites and bonds from `lattice.edges`.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: LatticeShape,
    /// Chain length; ignored for square lattices.
    pub length: usize,
    pub lx: usize,
    pub ly: usize,
    pub periodic: bool,
    /// 1-based bonds of a custom graph; the largest index sets the site count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    /// Local spin as `"1/2"`, `"1"`, `"3/2"`, ...
    pub spin: String,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            kind: LatticeShape::Chain,
            length: 16,
            lx: 4,
            ly: 4,
            periodic: true,
            edges: None,
            spin: "1/2".into(),
        }
    }
}

/// A single value or a list, so `omega = 10` and `omega = [10, 8]` both parse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    pub fn from_values(mut v: Vec<f64>) -> Self {
        if v.len() == 1 { OneOrMany::One(v.remove(0)) } else { OneOrMany::Many(v) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub j_perp: f64,
    /// Static part of the longitudinal coupling.
    pub j_par_bar: f64,
    /// Driving frequency; a list runs one trajectory per value.
    pub omega: OneOrMany,
    /// Dimensionless drive amplitude `δJ/Ω`; 2.4048 when neither this nor
    /// `delta_j` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_a: Option<f64>,
    /// Drive strength; the amplitude is then `delta_j/Ω` for each frequency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_j: Option<f64>,
}

pub const DEFAULT_AMPLITUDE: f64 = 2.4048;

impl Default for ModelSection {
    fn default() -> Self {
        Self { j_perp: -0.75, j_par_bar: -1.0, omega: OneOrMany::One(10.0), amplitude_a: None, delta_j: None }
    }
}

/// Explicit snapshot times, or a uniform grid `{ every = Δt }` from 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Snapshots {
    Times(Vec<f64>),
    Every { every: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Driver {
    /// The full time-periodic Hamiltonian.
    Periodic,
    /// The static dressed Hamiltonian.
    Effective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    /// `A0`, `A1`, `B0`, `B1`, a spin string such as `uudd`, or a
    /// comma-separated list of `m` values.
    pub state: String,
    pub driver: Driver,
    pub t_max: f64,
    pub snapshots: Snapshots,
    pub steps_per_period: usize,
    pub krylov_dim: usize,
    pub tolerance: f64,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            state: "A0".into(),
            driver: Driver::Periodic,
            t_max: 50.0,
            snapshots: Snapshots::Every { every: 0.5 },
            steps_per_period: 64,
            krylov_dim: 20,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub enumerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffcheckSection {
    pub a: Vec<f64>,
    pub nodes: usize,
}

impl Default for EffcheckSection {
    fn default() -> Self {
        Self { a: vec![0.0, 0.5, 1.0, 2.404825557695773], nodes: 128 }
    }
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn two_s(&self) -> CliResult<u32> {
        let s = self.lattice.spin.trim();
        let bad = || CliError::Config(format!("lattice.spin: expected 1/2, 1, 3/2, ..., got {s:?}"));
        let two_s = match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<u32>().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
            None => 2 * s.parse::<u32>().map_err(|_| bad())?,
        };
        if two_s == 0 {
            return Err(bad());
        }
        Ok(two_s)
    }

    pub fn graph(&self) -> CliResult<LatticeGraph> {
        let l = &self.lattice;
        let g = match l.kind {
            LatticeShape::Chain => LatticeGraph::chain(l.length, l.periodic),
            LatticeShape::Square => LatticeGraph::square(l.lx, l.ly, l.periodic),
            LatticeShape::Custom => {
                let edges = l.edges.as_deref().unwrap_or_default();
                if edges.is_empty() {
                    return Err(CliError::Config("lattice.edges: a custom lattice needs at least one bond".into()));
                }
                if edges.iter().flatten().any(|&k| k == 0) {
                    return Err(CliError::Config("lattice.edges: sites are numbered from 1".into()));
                }
                let sites = edges.iter().flatten().copied().max().unwrap_or(0);
                let zero_based: Vec<(usize, usize)> = edges.iter().map(|&[i, j]| (i - 1, j - 1)).collect();
                LatticeGraph::from_edges(sites, &zero_based)
            }
        };
        g.map_err(|e| CliError::at("lattice", e))
    }

    pub fn basis(&self, graph: &LatticeGraph) -> CliResult<SpinBasis> {
        SpinBasis::new(graph.num_sites(), self.two_s()?).map_err(|e| CliError::at("lattice", e))
    }

    pub fn omegas(&self) -> CliResult<Vec<f64>> {
        let w = self.model.omega.values();
        if w.is_empty() {
            return Err(CliError::Config("model.omega: at least one value is required".into()));
        }
        if let Some(bad) = w.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(CliError::Config(format!("model.omega: must be positive, got {bad}")));
        }
        Ok(w)
    }

    pub fn params(&self, omega: f64) -> CliResult<ModelParams> {
        let m = &self.model;
        let p = match (m.amplitude_a, m.delta_j) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "model.amplitude_a and model.delta_j are mutually exclusive".into(),
                ))
            }
            (a, None) => {
                let a = a.unwrap_or(DEFAULT_AMPLITUDE);
                ModelParams::new(m.j_perp, m.j_par_bar, omega, a).map_err(|e| CliError::at("model.amplitude_a", e))
            }
            (None, Some(dj)) => ModelParams::from_delta_j(m.j_perp, m.j_par_bar, omega, dj)
                .map_err(|e| CliError::at("model.delta_j", e)),
        }?;
        Ok(p)
    }

    /// The model for the first (or only) frequency.
    pub fn model(&self) -> CliResult<XxzModel> {
        let graph = self.graph()?;
        let basis = self.basis(&graph)?;
        let params = self.params(self.omegas()?[0])?;
        XxzModel::new(graph, basis, params).map_err(CliError::from)
    }

    /// Scale converting the configured time unit `1/|J∥|` to `ħ = 1` time.
    pub fn time_unit(&self) -> CliResult<f64> {
        let j = self.model.j_par_bar.abs();
        if !(j > 0.0) || !j.is_finite() {
            return Err(CliError::Config(
                "model.j_par_bar: times are measured in 1/|j_par_bar|, which must be finite and nonzero".into(),
            ));
        }
        Ok(1.0 / j)
    }

    /// Snapshot times in configured units.
    pub fn snapshot_times(&self) -> CliResult<Vec<f64>> {
        let e = &self.evolve;
        if !(e.t_max >= 0.0) || !e.t_max.is_finite() {
            return Err(CliError::Config(format!("evolve.t_max: must be non-negative, got {}", e.t_max)));
        }
        match &e.snapshots {
            Snapshots::Times(times) => {
                let mut prev = f64::NEG_INFINITY;
                for &t in times {
                    if !(t > prev) || t < 0.0 || t > e.t_max {
                        return Err(CliError::Config(format!(
                            "evolve.snapshots: must be strictly increasing within [0, t_max], found {t}"
                        )));
                    }
                    prev = t;
                }
                Ok(times.clone())
            }
            Snapshots::Every { every } => {
                if !(*every > 0.0) || !every.is_finite() {
                    return Err(CliError::Config(format!("evolve.snapshots.every: must be positive, got {every}")));
                }
                let count = (e.t_max / every + 1e-9).floor() as usize;
                Ok((0..=count).map(|k| (k as f64 * every).min(e.t_max)).collect())
            }
        }
    }
}

/// A library name, a spin string, or an `m` list, on `basis`.
pub fn parse_state(text: &str, basis: SpinBasis, key: &str) -> CliResult<ProductState> {
    let text = text.trim();
    if let Ok(named) = text.parse::<LibraryState>() {
        if basis.two_s() != 1 {
            return Err(CliError::Config(format!("{key}: library state {text} needs spin 1/2")));
        }
        return named.build(basis.num_sites()).map_err(|e| CliError::at(key, e));
    }
    ProductState::parse(text, basis).map_err(|e| CliError::at(key, e))
}
