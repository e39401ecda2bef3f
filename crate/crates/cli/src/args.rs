use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, Driver, LatticeShape, OneOrMany, Snapshots};

#[derive(Debug, Parser)]
#[command(name = "xxz-floquet", version, about = "Driven XXZ chain: classification, dynamics and checks")]
pub struct Cli {
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the outputs and manifest.json.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localization class and witness bonds of a product state.
    Classify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// A0, A1, B0, B1 or a spin string such as uudd.
        #[arg(long)]
        state: Option<String>,
        /// Count every localized product state of the chain.
        #[arg(long)]
        enumerate: bool,
    },
    /// Time evolution; writes sz_profile.csv and entropy.csv.
    Evolve {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        driver: Option<Driver>,
        /// In units of 1/|j_par_bar|.
        #[arg(long)]
        t_max: Option<f64>,
        /// Snapshot spacing.
        #[arg(long, conflicts_with = "snapshots")]
        every: Option<f64>,
        /// Explicit snapshot times, comma separated.
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
        #[arg(long)]
        steps_per_period: Option<usize>,
        #[arg(long)]
        krylov_dim: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Compares the quadrature period average with the closed form.
    Effcheck {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Amplitudes to check, comma separated.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<f64>>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Cluster classes, coefficients and annihilation at the first J0 zero.
    Table1 {
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeShape>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub lx: Option<usize>,
    #[arg(long)]
    pub ly: Option<usize>,
    /// Open instead of periodic boundaries.
    #[arg(long)]
    pub open: bool,
    /// Local spin: 1/2, 1, 3/2, ...
    #[arg(long)]
    pub spin: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub j_perp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j_par_bar: Option<f64>,
    /// One frequency, or a comma-separated sweep.
    #[arg(long, value_delimiter = ',')]
    pub omega: Option<Vec<f64>>,
    /// Dimensionless amplitude delta_j/omega.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "delta_j")]
    pub amplitude_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_j: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl LatticeArgs {
    fn apply(self, c: &mut Config) {
        let l = &mut c.lattice;
        set(&mut l.kind, self.lattice);
        set(&mut l.length, self.length);
        set(&mut l.lx, self.lx);
        set(&mut l.ly, self.ly);
        set(&mut l.spin, self.spin);
        if self.open {
            l.periodic = false;
        }
    }
}

impl ModelArgs {
    fn apply(self, c: &mut Config) {
        let m = &mut c.model;
        set(&mut m.j_perp, self.j_perp);
        set(&mut m.j_par_bar, self.j_par_bar);
        set(&mut m.omega, self.omega.map(OneOrMany::from_values));
        // either flag replaces whichever amplitude source the file used
        if self.amplitude_a.is_some() {
            m.amplitude_a = self.amplitude_a;
            m.delta_j = None;
        }
        if self.delta_j.is_some() {
            m.delta_j = self.delta_j;
            m.amplitude_a = None;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Classify,
    Evolve,
    Effcheck,
    Table1,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Classify { .. } => CommandKind::Classify,
            Command::Evolve { .. } => CommandKind::Evolve,
            Command::Effcheck { .. } => CommandKind::Effcheck,
            Command::Table1 { .. } => CommandKind::Table1,
        }
    }

    /// Writes the flags over `config`.
    pub fn apply(self, c: &mut Config) {
        match self {
            Command::Classify { lattice, state, enumerate } => {
                lattice.apply(c);
                if state.is_some() {
                    c.classify.state = state;
                }
                if enumerate {
                    c.classify.enumerate = true;
                }
            }
            Command::Evolve {
                lattice,
                model,
                state,
                driver,
                t_max,
                every,
                snapshots,
                steps_per_period,
                krylov_dim,
                tolerance,
            } => {
                lattice.apply(c);
                model.apply(c);
                let e = &mut c.evolve;
                set(&mut e.state, state);
                set(&mut e.driver, driver);
                set(&mut e.t_max, t_max);
                if let Some(every) = every {
                    e.snapshots = Snapshots::Every { every };
                }
                if let Some(times) = snapshots {
                    e.snapshots = Snapshots::Times(times);
                }
                set(&mut e.steps_per_period, steps_per_period);
                set(&mut e.krylov_dim, krylov_dim);
                set(&mut e.tolerance, tolerance);
            }
            Command::Effcheck { lattice, model, a, nodes } => {
                lattice.apply(c);
                model.apply(c);
                set(&mut c.effcheck.a, a);
                set(&mut c.effcheck.nodes, nodes);
            }
            Command::Table1 { model } => model.apply(c),
        }
    }
}
