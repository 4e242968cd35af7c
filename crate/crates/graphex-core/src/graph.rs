//! Finite graph representations and degree statistics.
//!
//! Graphs are immutable once constructed and derive their vertex set from
//! the edge set, so no vertex is ever isolated. Unipartite edges are stored
//! as canonical unordered pairs; self-pairs are legal and kept apart from
//! the non-self degree bookkeeping that the estimators consume.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Opaque vertex identifier.
pub type VertexId = u64;

/// Undirected graph with optional self-loops and optional per-vertex latent
/// coordinates (populated by the samplers, absent for ingested graphs).
#[derive(Debug, Clone, PartialEq)]
pub struct UndirectedGraph {
    vertices: BTreeSet<VertexId>,
    /// Canonical unordered pairs `(a, b)` with `a <= b`; `(v, v)` is a self-loop.
    edges: BTreeSet<(VertexId, VertexId)>,
    non_self_degree: BTreeMap<VertexId, u64>,
    self_loops: BTreeSet<VertexId>,
    coords: BTreeMap<VertexId, f64>,
}

impl UndirectedGraph {
    /// Build a graph from an edge list. Duplicate and reversed pairs collapse.
    pub fn from_edges<I: IntoIterator<Item = (VertexId, VertexId)>>(edges: I) -> Self {
        Self::build(edges, None)
    }

    /// Build a graph from an edge list, attaching latent coordinates
    /// (`coords[id]`) to every vertex that survives.
    pub fn from_edges_with_coords<I: IntoIterator<Item = (VertexId, VertexId)>>(
        edges: I,
        coords: &BTreeMap<VertexId, f64>,
    ) -> Self {
        Self::build(edges, Some(coords))
    }

    fn build<I: IntoIterator<Item = (VertexId, VertexId)>>(
        edges: I,
        coords: Option<&BTreeMap<VertexId, f64>>,
    ) -> Self {
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            let pair = if a <= b { (a, b) } else { (b, a) };
            edge_set.insert(pair);
        }
        let mut vertices = BTreeSet::new();
        let mut non_self_degree = BTreeMap::new();
        let mut self_loops = BTreeSet::new();
        for &(a, b) in &edge_set {
            vertices.insert(a);
            vertices.insert(b);
            if a == b {
                self_loops.insert(a);
            } else {
                *non_self_degree.entry(a).or_insert(0) += 1;
                *non_self_degree.entry(b).or_insert(0) += 1;
            }
        }
        let coords = match coords {
            Some(map) => vertices
                .iter()
                .filter_map(|v| map.get(v).map(|&x| (*v, x)))
                .collect(),
            None => BTreeMap::new(),
        };
        UndirectedGraph {
            vertices,
            edges: edge_set,
            non_self_degree,
            self_loops,
            coords,
        }
    }

    pub fn vertex_count(&self) -> u64 {
        self.vertices.len() as u64
    }

    /// Number of unordered edges, self-loops counted once.
    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let pair = if a <= b { (a, b) } else { (b, a) };
        self.edges.contains(&pair)
    }

    pub fn has_self_loop(&self, v: VertexId) -> bool {
        self.self_loops.contains(&v)
    }

    /// Latent coordinate of `v`, when the graph was produced by a sampler.
    pub fn latent_coord(&self, v: VertexId) -> Option<f64> {
        self.coords.get(&v).copied()
    }

    /// Number of distinct neighbors of `v` excluding `v` itself.
    pub fn non_self_degree(&self, v: VertexId) -> Result<u64> {
        if !self.vertices.contains(&v) {
            return Err(Error::domain(format!("unknown vertex id {v}")));
        }
        Ok(self.non_self_degree.get(&v).copied().unwrap_or(0))
    }

    /// Number of self-pair edges.
    pub fn count_self_loops(&self) -> u64 {
        self.self_loops.len() as u64
    }

    /// Exact degree histogram under the chosen self-loop convention.
    ///
    /// With `include_self_loops` a self-loop contributes one neighbor
    /// (the vertex itself); without it, vertices whose only edge is a
    /// self-loop land in the zero-degree bucket.
    pub fn degree_summary(&self, include_self_loops: bool) -> DegreeSummary {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in &self.vertices {
            let mut d = self.non_self_degree.get(&v).copied().unwrap_or(0);
            if include_self_loops && self.self_loops.contains(&v) {
                d += 1;
            }
            *counts.entry(d).or_insert(0) += 1;
        }
        DegreeSummary {
            counts,
            includes_self_loops: include_self_loops,
        }
    }
}

/// Histogram of vertex degrees: degree k -> number of vertices with
/// exactly k neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSummary {
    counts: BTreeMap<u64, u64>,
    includes_self_loops: bool,
}

impl DegreeSummary {
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn includes_self_loops(&self) -> bool {
        self.includes_self_loops
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Two-part graph; edges only join a left vertex to a right vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: BTreeSet<VertexId>,
    right: BTreeSet<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
    left_degree: BTreeMap<VertexId, u64>,
    right_degree: BTreeMap<VertexId, u64>,
}

impl BipartiteGraph {
    /// Build from (left id, right id) pairs; duplicates collapse and both
    /// vertex sets are derived from the edges, so no vertex is isolated.
    pub fn from_edges<I: IntoIterator<Item = (VertexId, VertexId)>>(edges: I) -> Self {
        let edge_set: BTreeSet<(VertexId, VertexId)> = edges.into_iter().collect();
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        let mut left_degree = BTreeMap::new();
        let mut right_degree = BTreeMap::new();
        for &(u, w) in &edge_set {
            left.insert(u);
            right.insert(w);
            *left_degree.entry(u).or_insert(0) += 1;
            *right_degree.entry(w).or_insert(0) += 1;
        }
        BipartiteGraph {
            left,
            right,
            edges: edge_set,
            left_degree,
            right_degree,
        }
    }

    pub fn left_count(&self) -> u64 {
        self.left.len() as u64
    }

    pub fn right_count(&self) -> u64 {
        self.right.len() as u64
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn left_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.left.iter().copied()
    }

    pub fn left_degree(&self, v: VertexId) -> Result<u64> {
        self.left_degree
            .get(&v)
            .copied()
            .ok_or_else(|| Error::domain(format!("unknown left vertex id {v}")))
    }

    /// Histogram of left-part degrees (degree k -> count, k >= 1).
    pub fn left_degree_summary(&self) -> DegreeSummary {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for d in self.left_degree.values() {
            *counts.entry(*d).or_insert(0) += 1;
        }
        DegreeSummary {
            counts,
            includes_self_loops: false,
        }
    }
}
