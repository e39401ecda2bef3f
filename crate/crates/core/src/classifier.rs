//! Four-site cluster classes of the spin-1/2 ring and the resulting split of
//! Ising-like product states into fixed points of the effective dynamics
//! (`Localized`) and the rest.
//!
//! A bond `(i, i+1)` sees the cluster `(m_{i-1}, m_i, m_{i+1}, m_{i+2})`. At a
//! zero of J0 the bond operator annihilates clusters of class `H0` and `HX`
//! and acts as the bare flip on class `H1`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{LatticeGraph, MIN_DYNAMICS_CHAIN_LENGTH};
use crate::specfun::j0;
use crate::spin::{ProductState, SpinBasis};

/// Longest ring for which all `2^L` product states are enumerated.
pub const MAX_ENUMERATION_LENGTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn from_up(up: bool) -> Self {
        if up { Spin::Up } else { Spin::Down }
    }

    pub fn is_up(self) -> bool {
        self == Spin::Up
    }

    pub fn arrow(self) -> char {
        match self {
            Spin::Up => '↑',
            Spin::Down => '↓',
        }
    }
}

use Spin::{Down as D, Up as U};

const H0_CLUSTERS: [[Spin; 4]; 4] = [[U, U, D, D], [U, D, U, D], [D, U, D, U], [D, D, U, U]];
const H1_CLUSTERS: [[Spin; 4]; 4] = [[U, U, D, U], [U, D, U, U], [D, D, U, D], [D, U, D, D]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClusterClass {
    /// Dressed by `J0(A)`: annihilated at a zero of J0.
    H0,
    /// Undressed (`J0(0) = 1`): never annihilated.
    H1,
    /// Aligned bond: no flip possible.
    HX,
}

impl ClusterClass {
    /// Proportionality factor between `b(A)` and `b(0)` on this class;
    /// undefined on `HX` where both vanish.
    pub fn coefficient(self, a: f64) -> Result<Option<f64>> {
        Ok(match self {
            ClusterClass::H0 => Some(j0(a)?),
            ClusterClass::H1 => Some(1.0),
            ClusterClass::HX => None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            ClusterClass::H0 => "h0",
            ClusterClass::H1 => "h1",
            ClusterClass::HX => "hx",
        }
    }
}

impl fmt::Display for ClusterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Class of the cluster `(m_{i-1}, m_i, m_{i+1}, m_{i+2})` around bond `(i, i+1)`.
pub fn classify_cluster(prev: Spin, first: Spin, second: Spin, next: Spin) -> ClusterClass {
    let c = [prev, first, second, next];
    if H0_CLUSTERS.contains(&c) {
        ClusterClass::H0
    } else if H1_CLUSTERS.contains(&c) {
        ClusterClass::H1
    } else {
        debug_assert_eq!(first, second);
        ClusterClass::HX
    }
}

/// All 16 clusters in binary order, `↓↓↓↓` first and the leftmost spin most
/// significant.
pub fn all_clusters() -> [[Spin; 4]; 16] {
    let mut out = [[D; 4]; 16];
    for (code, c) in out.iter_mut().enumerate() {
        for (k, s) in c.iter_mut().enumerate() {
            *s = Spin::from_up((code >> (3 - k)) & 1 == 1);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Localization {
    /// Annihilated by the dressed transverse term at a zero of J0.
    Localized,
    NonLocalized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateClass {
    pub tag: Localization,
    /// Bonds `(i, i+1)` (0-based) whose cluster is in `H1`.
    pub witness: Vec<(usize, usize)>,
}

impl StateClass {
    pub fn is_localized(&self) -> bool {
        self.tag == Localization::Localized
    }
}

fn check_ring(graph: &LatticeGraph) -> Result<usize> {
    let length = graph.periodic_chain_length().ok_or_else(|| {
        Error::UnsupportedLattice("cluster classification is defined on periodic chains only".into())
    })?;
    if length < MIN_DYNAMICS_CHAIN_LENGTH {
        return Err(Error::invalid(format!(
            "cluster classification needs a ring of at least {MIN_DYNAMICS_CHAIN_LENGTH} sites, got {length}"
        )));
    }
    Ok(length)
}

/// Classifies a product state on a periodic spin-1/2 chain by its bond
/// clusters.
pub fn classify_product_state(graph: &LatticeGraph, state: &ProductState) -> Result<StateClass> {
    let length = check_ring(graph)?;
    if state.basis().two_s() != 1 {
        return Err(Error::UnsupportedLattice("cluster classification is spin-1/2 only".into()));
    }
    if state.basis().num_sites() != length {
        return Err(Error::invalid("product state and lattice differ in size"));
    }
    let spin = |k: usize| Spin::from_up(state.is_up(k % length));
    let witness: Vec<(usize, usize)> = (0..length)
        .filter(|&i| {
            classify_cluster(spin(i + length - 1), spin(i), spin(i + 1), spin(i + 2))
                == ClusterClass::H1
        })
        .map(|i| (i, (i + 1) % length))
        .collect();
    let tag = if witness.is_empty() { Localization::Localized } else { Localization::NonLocalized };
    Ok(StateClass { tag, witness })
}

fn bits_localized(bits: u32, length: usize) -> bool {
    let up = |k: usize| (bits >> (k % length)) & 1 == 1;
    (0..length).all(|i| {
        let (p, a, b, n) = (up(i + length - 1), up(i), up(i + 1), up(i + 2));
        // H1 needs an antialigned bond with equal outer spins
        !(a != b && p == n)
    })
}

/// Basis indices (spin-1/2 encoding) of every localized product state on a
/// ring, ascending.
pub fn localized_indices(length: usize) -> Result<Vec<usize>> {
    if length > MAX_ENUMERATION_LENGTH {
        return Err(Error::resource(format!(
            "enumeration limited to rings of {MAX_ENUMERATION_LENGTH} sites, requested {length}"
        )));
    }
    check_ring(&LatticeGraph::chain(length.max(3), true)?)?;
    Ok((0..1u32 << length)
        .filter(|&bits| bits_localized(bits, length))
        .map(|b| b as usize)
        .collect())
}

/// Every localized product state on a ring of `length` sites, sorted by
/// basis index.
pub fn enumerate_localized_states(length: usize) -> Result<Vec<ProductState>> {
    let basis = SpinBasis::spin_half(length)?;
    localized_indices(length)?
        .into_iter()
        .map(|idx| ProductState::from_index(basis, idx))
        .collect()
}

/// Product state on a ring with `cluster` occupying sites `i-1 ..= i+2`
/// (cyclic) and all other sites down.
pub fn embed_cluster(length: usize, i: usize, cluster: [Spin; 4]) -> Result<ProductState> {
    if length < 4 || i >= length {
        return Err(Error::invalid("cluster does not fit the ring"));
    }
    let mut ups = alloc::vec![false; length];
    for (k, s) in cluster.iter().enumerate() {
        ups[(i + length - 1 + k) % length] = s.is_up();
    }
    ProductState::from_spins(&ups)
}

/// Named initial states: one domain wall (`A0`), the same with the central
/// pair swapped (`A1`), four domains (`B0`), and `B0` with the central pair
/// swapped (`B1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LibraryState {
    A0,
    A1,
    B0,
    B1,
}

impl LibraryState {
    pub const ALL: [LibraryState; 4] =
        [LibraryState::A0, LibraryState::A1, LibraryState::B0, LibraryState::B1];

    pub fn name(self) -> &'static str {
        match self {
            LibraryState::A0 => "A0",
            LibraryState::A1 => "A1",
            LibraryState::B0 => "B0",
            LibraryState::B1 => "B1",
        }
    }

    /// The state on a ring of even `length >= 12`.
    ///
    /// With `h = L/2` and `q = floor(L/4)` (1-based sites): `A0` is down on
    /// `1..=h` and up on the rest; `B0` is down on `1..=q`, up on `q+1..=h`,
    /// down on `h+1..=h+q`, up on the rest. `A1`/`B1` swap sites `h` and
    /// `h+1`. At `L = 16` these are the reference patterns.
    pub fn build(self, length: usize) -> Result<ProductState> {
        if length < 12 || length % 2 != 0 {
            return Err(Error::invalid(format!(
                "library states need an even length >= 12, got {length}"
            )));
        }
        let h = length / 2;
        let q = length / 4;
        let ups: Vec<bool> = (0..length)
            .map(|k| match self {
                LibraryState::A0 | LibraryState::A1 => k >= h,
                LibraryState::B0 | LibraryState::B1 => (q..h).contains(&k) || k >= h + q,
            })
            .collect();
        let mut ups = ups;
        if matches!(self, LibraryState::A1 | LibraryState::B1) {
            ups.swap(h - 1, h);
        }
        ProductState::from_spins(&ups)
    }
}

impl FromStr for LibraryState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A0" | "a0" => Ok(LibraryState::A0),
            "A1" | "a1" => Ok(LibraryState::A1),
            "B0" | "b0" => Ok(LibraryState::B0),
            "B1" | "b1" => Ok(LibraryState::B1),
            other => Err(Error::invalid(format!("unknown library state {other:?}"))),
        }
    }
}
