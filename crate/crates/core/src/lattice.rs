//! Interaction graphs: rings, open chains, square lattices and explicit edge
//! lists. Sites are 0-based here; 1-based labels only appear at the I/O
//! boundary.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Shortest periodic chain whose four-site window around a bond never
/// covers a site twice.
pub const MIN_DYNAMICS_CHAIN_LENGTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    Chain { length: usize, periodic: bool },
    Square { lx: usize, ly: usize, periodic: bool },
    Custom,
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeGraph {
    kind: LatticeKind,
    num_sites: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl LatticeGraph {
    pub fn chain(length: usize, periodic: bool) -> Result<Self> {
        let min = if periodic { 3 } else { 2 };
        if length < min {
            return Err(Error::invalid(format!(
                "chain length must be >= {min} ({}), got {length}",
                if periodic { "periodic" } else { "open" }
            )));
        }
        let mut edges: Vec<(usize, usize)> = (0..length - 1).map(|i| (i, i + 1)).collect();
        if periodic {
            edges.push((length - 1, 0));
        }
        Self::assemble(LatticeKind::Chain { length, periodic }, length, edges)
    }

    /// `lx` by `ly` grid; site `(x, y)` has index `x + lx * y`.
    pub fn square(lx: usize, ly: usize, periodic: bool) -> Result<Self> {
        if periodic && (lx < 3 || ly < 3) {
            return Err(Error::invalid(format!(
                "periodic square lattice needs lx, ly >= 3, got {lx}x{ly}"
            )));
        }
        if lx == 0 || ly == 0 || lx * ly < 2 {
            return Err(Error::invalid(format!(
                "square lattice needs at least two sites, got {lx}x{ly}"
            )));
        }
        let idx = |x: usize, y: usize| x + lx * y;
        let mut edges = Vec::with_capacity(2 * lx * ly);
        for y in 0..ly {
            for x in 0..lx {
                if x + 1 < lx {
                    edges.push((idx(x, y), idx(x + 1, y)));
                } else if periodic {
                    edges.push((idx(x, y), idx(0, y)));
                }
                if y + 1 < ly {
                    edges.push((idx(x, y), idx(x, y + 1)));
                } else if periodic {
                    edges.push((idx(x, y), idx(x, 0)));
                }
            }
        }
        Self::assemble(LatticeKind::Square { lx, ly, periodic }, lx * ly, edges)
    }

    /// Graph from an explicit 0-based edge list.
    pub fn from_edges(num_sites: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::invalid("custom lattice needs at least one site"));
        }
        Self::assemble(LatticeKind::Custom, num_sites, edges.to_vec())
    }

    fn assemble(kind: LatticeKind, num_sites: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_sites];
        for &(i, j) in &edges {
            if i >= num_sites || j >= num_sites {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) references a site outside 0..{num_sites}"
                )));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at site {i}")));
            }
            if adjacency[i].contains(&j) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { kind, num_sites, edges, adjacency })
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.adjacency[site].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.num_sites && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Periodic chain length, if this graph is one.
    pub fn periodic_chain_length(&self) -> Option<usize> {
        match self.kind {
            LatticeKind::Chain { length, periodic: true } => Some(length),
            _ => None,
        }
    }

    /// Sites entering the staggered magnetization around bond `(i, j)` with
    /// positive and negative sign: the neighbors of `i` and of `j`.
    ///
    /// `j` is always in the positive list and `i` in the negative one. On open
    /// boundaries only existing neighbors contribute.
    pub fn neighbor_sum_sites(&self, i: usize, j: usize) -> Result<(&[usize], &[usize])> {
        if !self.has_edge(i, j) {
            return Err(Error::invalid(format!("({i}, {j}) is not a bond of the lattice")));
        }
        Ok((&self.adjacency[i], &self.adjacency[j]))
    }
}
