//! Spin matrices and exact partition-function evaluation.
//!
//! A spin matrix is a symmetric matrix of edge weights over Q(i); its
//! partition function sums, over all maps from vertices to states, the
//! product of entry weights along edges (one factor per multiplicity,
//! loops included). Three evaluators live here: plain brute force over all
//! state maps, a vertex-elimination path whose cost is exponential only in
//! the boundary width, and the variant with marked vertices pinned to
//! prescribed states.

use std::collections::BTreeSet;

use crate::characterize::InvariantSource;
use crate::error::{Error, Result};
use crate::marked::{FormalSum, MarkedGraph};
use crate::matrix::ScalarMatrix;
use crate::multigraph::Multigraph;
use crate::scalar::GaussianRational;

/// Hard cap on enumerated state spaces and elimination tables.
pub const STATE_SPACE_LIMIT: u128 = 10_000_000;

/// A symmetric matrix of interaction weights; states are its indices.
/// The 0x0 matrix is allowed and realizes the invariant that is 1 on the
/// empty graph and 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinMatrix {
    entries: ScalarMatrix,
}

impl SpinMatrix {
    pub fn new(entries: ScalarMatrix) -> Result<Self> {
        if entries.rows() != entries.cols() {
            return Err(Error::InvalidInput(format!(
                "spin matrix must be square, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if !entries.is_symmetric() {
            return Err(Error::InvalidInput("spin matrix must be symmetric".into()));
        }
        Ok(SpinMatrix { entries })
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        Self::new(ScalarMatrix::from_rows(rows)?)
    }

    pub fn empty() -> Self {
        SpinMatrix {
            entries: ScalarMatrix::zero(0, 0),
        }
    }

    pub fn identity(n: usize) -> Self {
        SpinMatrix {
            entries: ScalarMatrix::identity(n),
        }
    }

    pub fn all_ones(n: usize) -> Self {
        SpinMatrix {
            entries: ScalarMatrix::from_fn(n, n, |_, _| GaussianRational::one()),
        }
    }

    /// All-ones off the diagonal, zero on it; counts proper colorings.
    pub fn ones_minus_identity(n: usize) -> Self {
        SpinMatrix {
            entries: ScalarMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    GaussianRational::zero()
                } else {
                    GaussianRational::one()
                }
            }),
        }
    }

    pub fn state_count(&self) -> usize {
        self.entries.rows()
    }

    /// Interaction weight between 0-indexed states.
    pub fn entry(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[(i, j)]
    }

    pub fn entries(&self) -> &ScalarMatrix {
        &self.entries
    }
}

fn guard_state_space(states: usize, vertices: usize) -> Result<()> {
    let total = (states as u128)
        .checked_pow(vertices as u32)
        .unwrap_or(u128::MAX);
    if total > STATE_SPACE_LIMIT {
        return Err(Error::SizeGuard {
            what: "partition-function state space",
            got: total,
            limit: STATE_SPACE_LIMIT,
        });
    }
    Ok(())
}

/// Edge factors grouped by their larger endpoint, so the recursion can
/// multiply in every edge as soon as its second endpoint gets a state.
fn edge_buckets(g: &Multigraph) -> Vec<Vec<(usize, usize)>> {
    let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.vertex_count()];
    for (u, v, m) in g.edges() {
        buckets[v - 1].push((u - 1, m));
    }
    buckets
}

fn sum_assignments(
    a: &SpinMatrix,
    buckets: &[Vec<(usize, usize)>],
    pinned: &[Option<usize>],
    depth: usize,
    states: &mut Vec<usize>,
    partial: &GaussianRational,
    total: &mut GaussianRational,
) {
    if depth == buckets.len() {
        *total += partial;
        return;
    }
    let choices: Vec<usize> = match pinned[depth] {
        Some(s) => vec![s],
        None => (0..a.state_count()).collect(),
    };
    for s in choices {
        states[depth] = s;
        let mut factor = partial.clone();
        for &(u, mult) in &buckets[depth] {
            let weight = a.entry(states[u], s);
            if weight.is_zero() {
                factor = GaussianRational::zero();
                break;
            }
            factor = &factor * &weight.pow(mult as i64).expect("positive exponent");
        }
        if !factor.is_zero() {
            sum_assignments(a, buckets, pinned, depth + 1, states, &factor, total);
        }
    }
}

/// The partition function: the exact sum over all maps from vertices to
/// states of the product of edge weights. The empty graph gives 1 for
/// every matrix, including the 0x0 one.
pub fn partition_function(a: &SpinMatrix, g: &Multigraph) -> Result<GaussianRational> {
    guard_state_space(a.state_count(), g.vertex_count())?;
    let buckets = edge_buckets(g);
    let mut total = GaussianRational::zero();
    let mut states = vec![0usize; g.vertex_count()];
    let pinned = vec![None; g.vertex_count()];
    sum_assignments(
        a,
        &buckets,
        &pinned,
        0,
        &mut states,
        &GaussianRational::one(),
        &mut total,
    );
    Ok(total)
}

/// Partition function restricted to state maps that send the vertex with
/// mark i to `lambda[i]`. A mark assignment that pins one vertex to two
/// different states contributes 0.
pub fn marked_partition_function(
    a: &SpinMatrix,
    mg: &MarkedGraph,
    lambda: &[usize],
) -> Result<GaussianRational> {
    if lambda.len() != mg.mark_count() {
        return Err(Error::InvalidInput(format!(
            "state assignment has {} entries for {} marks",
            lambda.len(),
            mg.mark_count()
        )));
    }
    for &s in lambda {
        if s >= a.state_count() {
            return Err(Error::InvalidInput(format!(
                "state {s} out of range for {} states",
                a.state_count()
            )));
        }
    }
    let g = mg.underlying();
    guard_state_space(a.state_count(), g.vertex_count())?;
    let mut pinned: Vec<Option<usize>> = vec![None; g.vertex_count()];
    for (i, &state) in lambda.iter().enumerate() {
        let vertex = mg.marks()[i] - 1;
        match pinned[vertex] {
            None => pinned[vertex] = Some(state),
            Some(existing) if existing != state => return Ok(GaussianRational::zero()),
            Some(_) => {}
        }
    }
    let buckets = edge_buckets(g);
    let mut total = GaussianRational::zero();
    let mut states = vec![0usize; g.vertex_count()];
    sum_assignments(
        a,
        &buckets,
        &pinned,
        0,
        &mut states,
        &GaussianRational::one(),
        &mut total,
    );
    Ok(total)
}

/// A partial sum over some subset of vertices: exact values indexed by the
/// states of the still-live boundary variables.
struct EliminationFactor {
    /// sorted 0-indexed vertices; first variable is most significant
    vars: Vec<usize>,
    table: Vec<GaussianRational>,
}

impl EliminationFactor {
    fn lookup(&self, state_of: impl Fn(usize) -> usize, states: usize) -> &GaussianRational {
        let mut idx = 0;
        for &v in &self.vars {
            idx = idx * states + state_of(v);
        }
        &self.table[idx]
    }
}

/// Same value as [`partition_function`], computed by eliminating vertices
/// in the given order (1-indexed) while keeping a table over the states of
/// the current boundary. Cost is exponential only in the boundary width.
pub fn partition_function_ordered(
    a: &SpinMatrix,
    g: &Multigraph,
    order: &[usize],
) -> Result<GaussianRational> {
    let v = g.vertex_count();
    let mut check: Vec<usize> = order.to_vec();
    check.sort_unstable();
    if check != (1..=v).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(
            "elimination order is not a permutation of the vertices".into(),
        ));
    }
    let n = a.state_count();
    let mut factors: Vec<EliminationFactor> = Vec::new();
    for (u, w, mult) in g.edges() {
        if u == w {
            factors.push(EliminationFactor {
                vars: vec![u - 1],
                table: (0..n)
                    .map(|s| a.entry(s, s).pow(mult as i64).expect("positive exponent"))
                    .collect(),
            });
        } else {
            let mut table = Vec::with_capacity(n * n);
            for su in 0..n {
                for sw in 0..n {
                    table.push(a.entry(su, sw).pow(mult as i64).expect("positive exponent"));
                }
            }
            factors.push(EliminationFactor {
                vars: vec![u - 1, w - 1],
                table,
            });
        }
    }
    let mut scalar = GaussianRational::one();
    for &vertex in order {
        let x = vertex - 1;
        let (touching, rest): (Vec<_>, Vec<_>) =
            factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        let mut boundary: BTreeSet<usize> = BTreeSet::new();
        for f in &touching {
            boundary.extend(f.vars.iter().copied());
        }
        boundary.remove(&x);
        let vars: Vec<usize> = boundary.into_iter().collect();
        let width = vars.len();
        let size = (n as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
        if size > STATE_SPACE_LIMIT {
            return Err(Error::SizeGuard {
                what: "elimination boundary table",
                got: size,
                limit: STATE_SPACE_LIMIT,
            });
        }
        let size = if width == 0 { 1 } else { size as usize };
        let mut table = Vec::with_capacity(size);
        let mut states_of = vec![0usize; width];
        for idx in 0..size {
            // decode idx into boundary states, most significant first
            let mut rem = idx;
            for pos in (0..width).rev() {
                states_of[pos] = rem % n.max(1);
                rem /= n.max(1);
            }
            let mut sum = GaussianRational::zero();
            for sx in 0..n {
                let mut prod = GaussianRational::one();
                for f in &touching {
                    let value = f.lookup(
                        |var| {
                            if var == x {
                                sx
                            } else {
                                let pos = vars.binary_search(&var).expect("var is on the boundary");
                                states_of[pos]
                            }
                        },
                        n,
                    );
                    if value.is_zero() {
                        prod = GaussianRational::zero();
                        break;
                    }
                    prod = &prod * value;
                }
                sum += &prod;
            }
            table.push(sum);
        }
        if width == 0 {
            scalar = &scalar * &table[0];
        } else {
            factors.push(EliminationFactor { vars, table });
        }
    }
    debug_assert!(factors.is_empty());
    Ok(scalar)
}

/// Greedy minimum-degree elimination order on the simple skeleton, with
/// fill-in, ties broken by smallest vertex id. Returns 1-indexed vertices.
pub fn min_degree_order(g: &Multigraph) -> Vec<usize> {
    let v = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); v];
    for (u, w, _) in g.edges() {
        if u != w {
            adj[u - 1].insert(w - 1);
            adj[w - 1].insert(u - 1);
        }
    }
    let mut remaining: BTreeSet<usize> = (0..v).collect();
    let mut order = Vec::with_capacity(v);
    while !remaining.is_empty() {
        let &best = remaining
            .iter()
            .min_by_key(|&&x| (adj[x].iter().filter(|n| remaining.contains(n)).count(), x))
            .expect("remaining is nonempty");
        let neighbors: Vec<usize> = adj[best]
            .iter()
            .copied()
            .filter(|n| remaining.contains(n))
            .collect();
        for (i, &p) in neighbors.iter().enumerate() {
            for &q in &neighbors[i + 1..] {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
        remaining.remove(&best);
        order.push(best + 1);
    }
    order
}

/// Linear extension of an invariant to formal sums: the weighted sum of
/// the invariant on each term's underlying (unmarked) graph.
pub fn evaluate_formal(f: &InvariantSource, u: &FormalSum) -> Result<GaussianRational> {
    let mut total = GaussianRational::zero();
    for (term, coeff) in u.terms() {
        let value = f.evaluate(term.underlying())?;
        total += &(coeff * &value);
    }
    Ok(total)
}
