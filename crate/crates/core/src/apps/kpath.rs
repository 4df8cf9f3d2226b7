//! Heaviest simple `k`-edge paths by meet in the middle.
//!
//! A path `s → … → v → … → t` with `⌊k/2⌋` edges before the middle vertex
//! `v` is split into two halves whose vertex sets, minus `v`, must be
//! disjoint. Each half is tabulated per vertex set, and the disjoint pairs
//! are combined by [`pair_sum`] in the count-weight semiring.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::algebra::{oplus, Adjoined, CountWeight, CountWeightSemiring, Semigroup, Semiring};
use crate::summation::{pair_sum, DisjointInput, Mode};
use crate::universe::Subset;
use crate::{Error, Result};

/// Largest vertex count the subset masks can hold.
pub const MAX_VERTICES: usize = 63;

/// A simple edge-weighted graph. Undirected edges are stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertices: usize,
    directed: bool,
    edges: Vec<(usize, usize, f64)>,
    out: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    pub fn new(vertices: usize, directed: bool) -> Result<Self> {
        if vertices == 0 || vertices > MAX_VERTICES {
            return Err(Error::param(format!(
                "vertex count must be in 1..={MAX_VERTICES}, got {vertices}"
            )));
        }
        Ok(Graph {
            vertices,
            directed,
            edges: Vec::new(),
            out: vec![Vec::new(); vertices],
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if u >= self.vertices || v >= self.vertices {
            return Err(Error::InvalidKey(format!(
                "edge {u}-{v} names a vertex outside 0..{}",
                self.vertices
            )));
        }
        if u == v {
            return Err(Error::InvalidKey(format!("self-loop at {u}")));
        }
        if weight.is_nan() {
            return Err(Error::InvalidKey(format!("edge {u}-{v} has NaN weight")));
        }
        if self.weight(u, v).is_some() {
            return Err(Error::InvalidKey(format!("duplicate edge {u}-{v}")));
        }
        self.edges.push((u, v, weight));
        self.out[u].push((v, weight));
        if !self.directed {
            self.out[v].push((u, weight));
        }
        Ok(())
    }

    /// Weight of the arc `u → v`, if present.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.out
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, weight)| weight)
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.out[u]
    }

    /// The graph with every arc flipped; undirected graphs are unchanged.
    pub fn reversed(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut rev = Graph {
            vertices: self.vertices,
            directed: true,
            edges: Vec::with_capacity(self.edges.len()),
            out: vec![Vec::new(); self.vertices],
        };
        for &(u, v, w) in &self.edges {
            rev.edges.push((v, u, w));
            rev.out[v].push((u, w));
        }
        rev
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertices {
            Ok(())
        } else {
            Err(Error::param(format!(
                "vertex {v} outside 0..{}",
                self.vertices
            )))
        }
    }
}

fn mask_to_subset(mask: u64, level: u8) -> Subset {
    let members = (0..64).filter(|i| mask >> i & 1 == 1);
    Subset::new(level, members).expect("mask fits the universe")
}

/// For every `m`-set `X ∋ source` avoiding `anchor`: the heaviest `m`-edge
/// paths from `source` to `anchor` whose vertex set is exactly
/// `X ∪ {anchor}`. Sets with no such path are left out.
pub fn half_path_table(
    graph: &Graph,
    source: usize,
    anchor: usize,
    m: usize,
) -> Result<DisjointInput<CountWeight>> {
    graph.check_vertex(source)?;
    graph.check_vertex(anchor)?;
    if source == anchor {
        return Err(Error::param("source and anchor coincide"));
    }
    if m == 0 {
        return Err(Error::param("half paths need at least one edge"));
    }
    if m + 1 > graph.vertices {
        return Err(Error::param(format!(
            "a {m}-edge path needs {} vertices, graph has {}",
            m + 1,
            graph.vertices
        )));
    }
    let cw = CountWeightSemiring;
    let mut table = DisjointInput::new(graph.vertices as u64, m)?;
    let level = table.universe().height();

    // (vertex mask, endpoint) → best paths from source covering the mask
    let mut layer: HashMap<(u64, usize), CountWeight> = HashMap::new();
    layer.insert((1 << source, source), CountWeight::ONE);
    for _ in 1..m {
        let mut next: HashMap<(u64, usize), CountWeight> = HashMap::new();
        for (&(mask, end), value) in &layer {
            for &(w, weight) in graph.neighbors(end) {
                if w == anchor || mask >> w & 1 == 1 {
                    continue;
                }
                let step = cw.otimes(value, &CountWeight::new(1, weight))?;
                let slot = next.entry((mask | 1 << w, w)).or_insert(CountWeight::ZERO);
                *slot = cw.oplus(slot, &step)?;
            }
        }
        layer = next;
    }

    let mut closed: BTreeMap<u64, Adjoined<CountWeight>> = BTreeMap::new();
    for (&(mask, end), value) in &layer {
        if let Some(weight) = graph.weight(end, anchor) {
            let step = Adjoined::Carrier(cw.otimes(value, &CountWeight::new(1, weight))?);
            let slot = closed.entry(mask).or_default();
            *slot = oplus(&cw, slot, &step)?;
        }
    }
    for (mask, value) in closed {
        if let Adjoined::Carrier(v) = value {
            table.insert(mask_to_subset(mask, level), v)?;
        }
    }
    Ok(table)
}

fn check_endpoints(graph: &Graph, s: usize, t: usize) -> Result<()> {
    graph.check_vertex(s)?;
    graph.check_vertex(t)?;
    if s == t {
        return Err(Error::param("s and t must differ"));
    }
    Ok(())
}

/// Number and weight of the heaviest simple `k`-edge paths from `s` to `t`.
/// [`CountWeight::ZERO`] means there is no such path.
pub fn kpath_count(graph: &Graph, s: usize, t: usize, k: usize, mode: Mode) -> Result<CountWeight> {
    check_endpoints(graph, s, t)?;
    if k < 2 {
        return Err(Error::param(format!("k must be at least 2, got {k}")));
    }
    if k + 1 > graph.vertices {
        return Ok(CountWeight::ZERO);
    }
    let (p, q) = (k / 2, k - k / 2);
    let reversed = graph.reversed();
    let middles: Vec<usize> = (0..graph.vertices).filter(|&v| v != s && v != t).collect();
    let per_middle: Vec<Result<CountWeight>> = middles
        .par_iter()
        .map(|&v| {
            let first = half_path_table(graph, s, v, p)?;
            let second = half_path_table(&reversed, t, v, q)?;
            pair_sum(&first, &second, &CountWeightSemiring, mode)
        })
        .collect();
    let cw = CountWeightSemiring;
    per_middle
        .into_iter()
        .try_fold(CountWeight::ZERO, |acc, r| cw.oplus(&acc, &r?))
}

/// Enumerates every simple `k`-edge path from `s` to `t`.
pub fn oracle_kpath(graph: &Graph, s: usize, t: usize, k: usize) -> Result<CountWeight> {
    check_endpoints(graph, s, t)?;
    if graph.vertices > 10 || k > 6 {
        return Err(Error::ScaleGuard(format!(
            "path oracle limited to 10 vertices and k ≤ 6, got {} and {k}",
            graph.vertices
        )));
    }
    let mut best = CountWeight::ZERO;
    let mut visited = vec![false; graph.vertices];
    visited[s] = true;
    walk(graph, s, t, k, 0.0, &mut visited, &mut best)?;
    Ok(best)
}

fn walk(
    graph: &Graph,
    at: usize,
    t: usize,
    remaining: usize,
    weight: f64,
    visited: &mut [bool],
    best: &mut CountWeight,
) -> Result<()> {
    if remaining == 0 {
        if at == t {
            *best = CountWeightSemiring.oplus(best, &CountWeight::new(1, weight))?;
        }
        return Ok(());
    }
    for &(w, edge) in graph.neighbors(at) {
        if visited[w] || (w == t && remaining > 1) {
            continue;
        }
        visited[w] = true;
        walk(graph, w, t, remaining - 1, weight + edge, visited, best)?;
        visited[w] = false;
    }
    Ok(())
}
