//! Finite undirected multigraphs with loops: disjoint union, quotient by a
//! vertex partition, brute-force canonical forms, and bounded enumeration.
//!
//! Vertices are 1-indexed. Edges are stored as sorted pairs `(u, v)` with
//! `u <= v` and an explicit multiplicity; a loop has `u == v`.

use std::collections::BTreeMap;

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::partition::SetPartition;

/// Canonicalization tries all vertex permutations, so cap at 8! = 40320.
pub const MAX_CANONICAL_VERTICES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multigraph {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), usize>,
}

impl Multigraph {
    /// The graph with no vertices and no edges.
    pub fn empty() -> Self {
        Multigraph {
            vertex_count: 0,
            edges: BTreeMap::new(),
        }
    }

    /// Edgeless graph on `n` vertices; `vertex(1)` gives the one-vertex graph.
    pub fn edgeless(n: usize) -> Self {
        Multigraph {
            vertex_count: n,
            edges: BTreeMap::new(),
        }
    }

    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (u, v, mult) in edges {
            if u == 0 || v == 0 || u > vertex_count || v > vertex_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) outside vertex range 1..={vertex_count}"
                )));
            }
            if mult == 0 {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) with zero multiplicity"
                )));
            }
            let key = if u <= v { (u, v) } else { (v, u) };
            *map.entry(key).or_insert(0) += mult;
        }
        Ok(Multigraph {
            vertex_count,
            edges: map,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges as `(u, v, multiplicity)` with `u <= v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Total edge count, multiplicities included.
    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    /// Vertices of `other` are shifted past the vertices of `self`.
    pub fn disjoint_union(&self, other: &Multigraph) -> Multigraph {
        let shift = self.vertex_count;
        let mut edges = self.edges.clone();
        for (&(u, v), &m) in &other.edges {
            edges.insert((u + shift, v + shift), m);
        }
        Multigraph {
            vertex_count: self.vertex_count + other.vertex_count,
            edges,
        }
    }

    /// Merges each block of `p` into a single vertex. Every edge is kept
    /// with its multiplicity: edges inside a block become loops and
    /// parallel images accumulate, so the total edge count is preserved.
    pub fn quotient(&self, p: &SetPartition) -> Result<Multigraph> {
        if p.ground_size() != self.vertex_count {
            return Err(Error::GroundSetMismatch(
                "quotient",
                self.vertex_count,
                p.ground_size(),
            ));
        }
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&(u, v), &m) in &self.edges {
            let bu = p.block_of(u) + 1;
            let bv = p.block_of(v) + 1;
            let key = if bu <= bv { (bu, bv) } else { (bv, bu) };
            *edges.entry(key).or_insert(0) += m;
        }
        Ok(Multigraph {
            vertex_count: p.block_count(),
            edges,
        })
    }

    /// Dense multiplicity matrix, 0-indexed.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count;
        let mut adj = vec![vec![0usize; n]; n];
        for (&(u, v), &m) in &self.edges {
            adj[u - 1][v - 1] = m;
            adj[v - 1][u - 1] = m;
        }
        adj
    }

    /// Upper-triangle (with diagonal) multiplicity vector under the vertex
    /// placement `perm`, where `perm[position] = original vertex - 1`.
    fn placed_upper_triangle(adj: &[Vec<usize>], perm: &[usize]) -> Vec<usize> {
        let n = perm.len();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(adj[perm[i]][perm[j]]);
            }
        }
        out
    }

    /// Relabels vertices: vertex `v` becomes `relabel[v-1] + 1`.
    pub fn apply_permutation(&self, relabel: &[usize]) -> Result<Multigraph> {
        if relabel.len() != self.vertex_count {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut check: Vec<usize> = relabel.to_vec();
        check.sort_unstable();
        if check != (0..self.vertex_count).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        Multigraph::new(
            self.vertex_count,
            self.edges
                .iter()
                .map(|(&(u, v), &m)| (relabel[u - 1] + 1, relabel[v - 1] + 1, m)),
        )
    }

    fn guard_canonical(&self) -> Result<()> {
        if self.vertex_count > MAX_CANONICAL_VERTICES {
            return Err(Error::SizeGuard {
                what: "canonical form vertex count",
                got: self.vertex_count as u128,
                limit: MAX_CANONICAL_VERTICES as u128,
            });
        }
        Ok(())
    }

    fn minimal_upper_triangle(&self) -> Result<Vec<usize>> {
        self.guard_canonical()?;
        let adj = self.adjacency();
        let mut best: Option<Vec<usize>> = None;
        for_each_permutation(self.vertex_count, |perm| {
            let candidate = Self::placed_upper_triangle(&adj, perm);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        });
        Ok(best.expect("at least the identity permutation"))
    }

    /// A string equal for isomorphic multigraphs and distinct otherwise,
    /// from the lexicographically minimal adjacency serialization over all
    /// vertex permutations.
    pub fn canonical_key(&self) -> Result<String> {
        let tri = self.minimal_upper_triangle()?;
        Ok(format_key(self.vertex_count, &tri))
    }

    /// The relabeled graph realizing `canonical_key`.
    pub fn canonical_form(&self) -> Result<Multigraph> {
        let tri = self.minimal_upper_triangle()?;
        let n = self.vertex_count;
        let mut edges = Vec::new();
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                if tri[idx] > 0 {
                    edges.push((i + 1, j + 1, tri[idx]));
                }
                idx += 1;
            }
        }
        Multigraph::new(n, edges)
    }

    pub fn stats(&self) -> GraphStats {
        let loop_count = self
            .edges
            .iter()
            .filter(|(&(u, v), _)| u == v)
            .map(|(_, &m)| m)
            .sum();
        let mut dsu = Dsu::new(self.vertex_count);
        for &(u, v) in self.edges.keys() {
            dsu.union(u - 1, v - 1);
        }
        let mut roots: Vec<usize> = dsu.roots();
        roots.sort_unstable();
        roots.dedup();
        GraphStats {
            vertex_count: self.vertex_count,
            edge_count: self.edge_count(),
            loop_count,
            component_count: roots.len(),
        }
    }
}

fn format_key(n: usize, upper_triangle: &[usize]) -> String {
    let cells: Vec<String> = upper_triangle.iter().map(usize::to_string).collect();
    format!("g:{}:{}", n, cells.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub loop_count: usize,
    pub component_count: usize,
}

/// Heap's algorithm; visits all `n!` placements of `0..n`.
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All edge multisets on `slots` with total multiplicity at most `budget`,
/// visited in deterministic order.
fn for_each_edge_multiset(
    slots: &[(usize, usize)],
    budget: usize,
    current: &mut Vec<(usize, usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize, usize)]),
) {
    match slots.split_first() {
        None => visit(current),
        Some((&(u, v), rest)) => {
            for mult in 0..=budget {
                if mult > 0 {
                    current.push((u, v, mult));
                }
                for_each_edge_multiset(rest, budget - mult, current, visit);
                if mult > 0 {
                    current.pop();
                }
            }
        }
    }
}

/// All multigraphs on exactly `vertex_count` vertices with total edge
/// multiplicity at most `max_edge_total`, one canonical representative per
/// isomorphism class, sorted by canonical key.
pub fn enumerate_multigraphs(
    vertex_count: usize,
    max_edge_total: usize,
) -> Result<Vec<Multigraph>> {
    if vertex_count > MAX_CANONICAL_VERTICES {
        return Err(Error::SizeGuard {
            what: "multigraph enumeration vertex count",
            got: vertex_count as u128,
            limit: MAX_CANONICAL_VERTICES as u128,
        });
    }
    let mut slots = Vec::new();
    for u in 1..=vertex_count {
        for v in u..=vertex_count {
            slots.push((u, v));
        }
    }
    let mut seen: BTreeMap<String, Multigraph> = BTreeMap::new();
    let mut failure: Option<Error> = None;
    let mut current = Vec::new();
    for_each_edge_multiset(&slots, max_edge_total, &mut current, &mut |edges| {
        if failure.is_some() {
            return;
        }
        let graph =
            Multigraph::new(vertex_count, edges.iter().copied()).expect("edges are in range");
        match graph.canonical_key() {
            Ok(key) => {
                seen.entry(key)
                    .or_insert_with(|| graph.canonical_form().expect("within canonical guard"));
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(seen.into_values().collect())
}

/// Canonical multigraphs with at most `max_vertices` vertices (including
/// the empty graph) and total edge multiplicity at most `max_edge_total`.
pub fn enumerate_multigraphs_up_to(
    max_vertices: usize,
    max_edge_total: usize,
) -> Result<Vec<Multigraph>> {
    let mut out = Vec::new();
    for v in 0..=max_vertices {
        out.extend(enumerate_multigraphs(v, max_edge_total)?);
    }
    Ok(out)
}
