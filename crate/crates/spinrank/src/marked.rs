//! k-marked graphs, the gluing product, and formal linear combinations.
//!
//! A k-marked graph is a multigraph plus a (not necessarily injective) map
//! from marks 1..k to vertices. Gluing takes a disjoint union and then
//! identifies equally marked vertices, keeping every edge. Isomorphism of
//! marked graphs is graph isomorphism that preserves the mark map, and
//! formal sums merge terms by that notion via canonical keys.

use std::collections::BTreeMap;

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::multigraph::{for_each_permutation, Multigraph, MAX_CANONICAL_VERTICES};
use crate::partition::{enumerate_partitions, mu_row, SetPartition};
use crate::scalar::GaussianRational;

/// Building the Moebius-weighted element walks all of Pi_k.
pub const MAX_B_ELEMENT_MARKS: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedGraph {
    graph: Multigraph,
    marks: Vec<usize>,
}

impl MarkedGraph {
    /// `marks[i]` is the vertex (1-indexed) carrying mark i+1.
    pub fn new(graph: Multigraph, marks: Vec<usize>) -> Result<Self> {
        for &v in &marks {
            if v == 0 || v > graph.vertex_count() {
                return Err(Error::InvalidInput(format!(
                    "mark on vertex {v} outside 1..={}",
                    graph.vertex_count()
                )));
            }
        }
        Ok(MarkedGraph { graph, marks })
    }

    /// The gluing unit: k isolated vertices, mark i on vertex i.
    pub fn unit(k: usize) -> Self {
        MarkedGraph {
            graph: Multigraph::edgeless(k),
            marks: (1..=k).collect(),
        }
    }

    /// The edgeless marked graph whose vertices are the blocks of `p`,
    /// with mark i on the block containing i.
    pub fn edgeless_from_partition(p: &SetPartition) -> Self {
        let k = p.ground_size();
        MarkedGraph {
            graph: Multigraph::edgeless(p.block_count()),
            marks: (1..=k).map(|i| p.block_of(i) + 1).collect(),
        }
    }

    pub fn mark_count(&self) -> usize {
        self.marks.len()
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    /// The underlying unmarked graph.
    pub fn underlying(&self) -> &Multigraph {
        &self.graph
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    /// Disjoint union followed by identification of equally marked
    /// vertices. All edges survive (possibly as loops or parallels) and
    /// the mark count is unchanged.
    pub fn glue(&self, other: &MarkedGraph) -> Result<MarkedGraph> {
        if self.mark_count() != other.mark_count() {
            return Err(Error::MarkCountMismatch(
                self.mark_count(),
                other.mark_count(),
            ));
        }
        let shift = self.graph.vertex_count();
        let union = self.graph.disjoint_union(&other.graph);
        let mut dsu = Dsu::new(union.vertex_count());
        for i in 0..self.mark_count() {
            dsu.union(self.marks[i] - 1, other.marks[i] - 1 + shift);
        }
        let merged = SetPartition::kernel(&dsu.roots());
        let graph = union.quotient(&merged)?;
        let marks = self.marks.iter().map(|&v| merged.block_of(v) + 1).collect();
        Ok(MarkedGraph { graph, marks })
    }

    fn guard_canonical(&self) -> Result<()> {
        if self.graph.vertex_count() > MAX_CANONICAL_VERTICES {
            return Err(Error::SizeGuard {
                what: "marked canonical form vertex count",
                got: self.graph.vertex_count() as u128,
                limit: MAX_CANONICAL_VERTICES as u128,
            });
        }
        Ok(())
    }

    /// Canonical key and relabeled representative: the mark vector acts as
    /// extra vertex structure, so the minimization runs over all vertex
    /// permutations comparing (adjacency, marks) serializations.
    pub fn canonical_form(&self) -> Result<(String, MarkedGraph)> {
        self.guard_canonical()?;
        let n = self.graph.vertex_count();
        let mut adj = vec![vec![0usize; n]; n];
        for (u, v, m) in self.graph.edges() {
            adj[u - 1][v - 1] = m;
            adj[v - 1][u - 1] = m;
        }
        let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
        for_each_permutation(n, |perm| {
            // perm[position] = original vertex - 1
            let mut tri = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    tri.push(adj[perm[i]][perm[j]]);
                }
            }
            let mut position_of = vec![0usize; n];
            for (pos, &orig) in perm.iter().enumerate() {
                position_of[orig] = pos;
            }
            let marks: Vec<usize> = self.marks.iter().map(|&v| position_of[v - 1] + 1).collect();
            let candidate = (tri, marks);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        });
        let (tri, marks) = best.expect("identity permutation always visited");
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
        let cells: Vec<String> = tri.iter().map(usize::to_string).collect();
        let mark_cells: Vec<String> = marks.iter().map(usize::to_string).collect();
        let key = format!(
            "m:{}:{}:{}:{}",
            n,
            self.marks.len(),
            mark_cells.join(","),
            cells.join(",")
        );
        let graph = Multigraph::new(n, edges)?;
        Ok((key, MarkedGraph { graph, marks }))
    }

    pub fn canonical_key(&self) -> Result<String> {
        Ok(self.canonical_form()?.0)
    }
}

/// A finite Q(i)-linear combination of k-marked graphs, merged up to
/// mark-preserving isomorphism. Zero coefficients are dropped eagerly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSum {
    k: usize,
    terms: BTreeMap<String, (MarkedGraph, GaussianRational)>,
}

impl FormalSum {
    pub fn zero(k: usize) -> Self {
        FormalSum {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(coeff: GaussianRational, term: MarkedGraph) -> Result<Self> {
        let mut sum = FormalSum::zero(term.mark_count());
        sum.add_term(coeff, term)?;
        Ok(sum)
    }

    /// The multiplicative unit: 1 times the k-marked gluing unit.
    pub fn one(k: usize) -> Self {
        Self::from_term(GaussianRational::one(), MarkedGraph::unit(k))
            .expect("unit has matching mark count")
    }

    pub fn mark_count(&self) -> usize {
        self.k
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical-key order.
    pub fn terms(&self) -> impl Iterator<Item = (&MarkedGraph, &GaussianRational)> {
        self.terms.values().map(|(g, c)| (g, c))
    }

    pub fn coefficient_of(&self, graph: &MarkedGraph) -> Result<GaussianRational> {
        let key = graph.canonical_key()?;
        Ok(self
            .terms
            .get(&key)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero))
    }

    pub fn add_term(&mut self, coeff: GaussianRational, term: MarkedGraph) -> Result<()> {
        if term.mark_count() != self.k {
            return Err(Error::MarkCountMismatch(self.k, term.mark_count()));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let (key, canonical) = term.canonical_form()?;
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert((canonical, coeff));
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let merged = &slot.get().1 + &coeff;
                if merged.is_zero() {
                    slot.remove();
                } else {
                    slot.get_mut().1 = merged;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &FormalSum) -> Result<FormalSum> {
        if self.k != other.k {
            return Err(Error::MarkCountMismatch(self.k, other.k));
        }
        let mut out = self.clone();
        for (graph, coeff) in other.terms() {
            out.add_term(coeff.clone(), graph.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &GaussianRational) -> FormalSum {
        if factor.is_zero() {
            return FormalSum::zero(self.k);
        }
        FormalSum {
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|(key, (g, c))| (key.clone(), (g.clone(), c * factor)))
                .collect(),
        }
    }

    /// Bilinear extension of gluing.
    pub fn product(&self, other: &FormalSum) -> Result<FormalSum> {
        if self.k != other.k {
            return Err(Error::MarkCountMismatch(self.k, other.k));
        }
        let mut out = FormalSum::zero(self.k);
        for (ga, ca) in self.terms() {
            for (gb, cb) in other.terms() {
                out.add_term(ca * cb, ga.glue(gb)?)?;
            }
        }
        Ok(out)
    }

    /// m-fold gluing power; the zeroth power is the unit sum.
    pub fn power(&self, exponent: usize) -> Result<FormalSum> {
        let mut acc = FormalSum::one(self.k);
        for _ in 0..exponent {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }
}

/// The Moebius-weighted sum of edgeless marked graphs: coefficient mu_P on
/// the k-marked graph of partition P, over all P in Pi_k. Idempotent under
/// the gluing product.
pub fn b_element(k: usize) -> Result<FormalSum> {
    if k > MAX_B_ELEMENT_MARKS {
        return Err(Error::SizeGuard {
            what: "b element mark count",
            got: k as u128,
            limit: MAX_B_ELEMENT_MARKS as u128,
        });
    }
    let parts = enumerate_partitions(k)?;
    let mu = mu_row(k)?;
    let mut sum = FormalSum::zero(k);
    for (p, &mu_p) in parts.iter().zip(mu.iter()) {
        sum.add_term(
            GaussianRational::from_int(mu_p),
            MarkedGraph::edgeless_from_partition(p),
        )?;
    }
    Ok(sum)
}

/// A fixed bijection [k] x [n] -> [kn] used to address marks when a
/// k-marked element is replicated across the classes of a partition of [n].
#[derive(Clone, Debug)]
pub struct MarkBijection {
    k: usize,
    n: usize,
    /// `map[(j-1)*k + (i-1)]` is s(i, j), 1-indexed.
    map: Vec<usize>,
}

impl MarkBijection {
    /// The default choice s(i, j) = (j-1)k + i.
    pub fn standard(k: usize, n: usize) -> Self {
        MarkBijection {
            k,
            n,
            map: (1..=k * n).collect(),
        }
    }

    /// Any bijection given as the flat table `map[(j-1)*k + (i-1)] = s(i,j)`.
    pub fn from_table(k: usize, n: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != k * n {
            return Err(Error::InvalidInput(
                "mark bijection table has wrong length".into(),
            ));
        }
        let mut sorted = map.clone();
        sorted.sort_unstable();
        if sorted != (1..=k * n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(
                "mark bijection table is not a bijection".into(),
            ));
        }
        Ok(MarkBijection { k, n, map })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// s(i, j) for 1-indexed i in [k], j in [n].
    pub fn apply(&self, i: usize, j: usize) -> usize {
        self.map[(j - 1) * self.k + (i - 1)]
    }
}

/// Replicates `z` over the classes of `p` (a partition of [n]): the result
/// is a (k·n)-marked sum whose terms take one independent copy of `z` per
/// class, marks addressed through `s`. Mark s(i, j) lands on the vertex
/// marked i in the copy attached to the class containing j, so every mark
/// in [kn] is placed exactly once.
pub fn gamma(p: &SetPartition, z: &FormalSum, s: &MarkBijection) -> Result<FormalSum> {
    if z.mark_count() != s.k() {
        return Err(Error::MarkCountMismatch(z.mark_count(), s.k()));
    }
    if p.ground_size() != s.n() {
        return Err(Error::GroundSetMismatch("gamma", p.ground_size(), s.n()));
    }
    let k = s.k();
    let n = s.n();
    let class_count = p.block_count();
    let terms: Vec<(&MarkedGraph, &GaussianRational)> = z.terms().collect();
    if terms.is_empty() {
        return Ok(FormalSum::zero(k * n));
    }
    let mut out = FormalSum::zero(k * n);
    // one independent term choice per class; the combination is multilinear
    let mut choice = vec![0usize; class_count];
    loop {
        let mut coeff = GaussianRational::one();
        let mut graph = Multigraph::empty();
        let mut offsets = Vec::with_capacity(class_count);
        for &t in &choice {
            let (term_graph, term_coeff) = terms[t];
            offsets.push(graph.vertex_count());
            graph = graph.disjoint_union(term_graph.underlying());
            coeff = &coeff * term_coeff;
        }
        let mut marks = vec![0usize; k * n];
        for j in 1..=n {
            let class = p.block_of(j);
            let (term_graph, _) = terms[choice[class]];
            for i in 1..=k {
                marks[s.apply(i, j) - 1] = offsets[class] + term_graph.marks()[i - 1];
            }
        }
        out.add_term(coeff, MarkedGraph::new(graph, marks)?)?;

        // odometer over term choices
        let mut pos = 0;
        loop {
            if pos == class_count {
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] < terms.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
