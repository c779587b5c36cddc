//! Finite windows into connection matrices: deterministic families of
//! k-marked graphs, the matrix of invariant values on glued pairs, exact
//! rank, and the rank-bound factorization check for spin invariants.
//!
//! A window certifies a rank lower bound for an arbitrary invariant; for a
//! spin invariant with n states it also respects the n^k upper bound, and
//! the window of the connection matrix factors exactly through the matrix
//! of pinned partition-function values.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::characterize::InvariantSource;
use crate::error::{Error, Result};
use crate::marked::MarkedGraph;
use crate::matrix::ScalarMatrix;
use crate::multigraph::{enumerate_multigraphs, MAX_CANONICAL_VERTICES};
use crate::scalar::GaussianRational;
use crate::spin::{marked_partition_function, SpinMatrix, STATE_SPACE_LIMIT};

/// Windows stay square in this many members at most.
pub const MAX_FAMILY_SIZE: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyBounds {
    pub max_vertices: usize,
    pub max_edge_total: usize,
}

/// A deduplicated, deterministically ordered finite set of k-marked graphs.
#[derive(Clone, Debug)]
pub struct MarkedFamily {
    k: usize,
    bounds: FamilyBounds,
    members: Vec<MarkedGraph>,
}

impl MarkedFamily {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bounds(&self) -> FamilyBounds {
        self.bounds
    }

    pub fn members(&self) -> &[MarkedGraph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All k-marked graphs, up to mark-preserving isomorphism, whose underlying
/// graph has at most `max_vertices` vertices and total edge multiplicity at
/// most `max_edge_total`. The gluing unit is always included even when its
/// k vertices exceed the bound. Members are sorted by (vertex count,
/// canonical key).
pub fn generate_family(
    k: usize,
    max_vertices: usize,
    max_edge_total: usize,
) -> Result<MarkedFamily> {
    if max_vertices > MAX_CANONICAL_VERTICES {
        return Err(Error::SizeGuard {
            what: "family vertex bound",
            got: max_vertices as u128,
            limit: MAX_CANONICAL_VERTICES as u128,
        });
    }
    let mut seen: BTreeMap<String, MarkedGraph> = BTreeMap::new();
    let min_vertices = if k == 0 { 0 } else { 1 };
    for v in min_vertices..=max_vertices {
        for graph in enumerate_multigraphs(v, max_edge_total)? {
            // all mark maps [k] -> [v], lexicographically
            let mut marks = vec![1usize; k];
            loop {
                let mg = MarkedGraph::new(graph.clone(), marks.clone())?;
                let (key, canonical) = mg.canonical_form()?;
                seen.entry(key).or_insert(canonical);
                if seen.len() > MAX_FAMILY_SIZE {
                    return Err(Error::SizeGuard {
                        what: "marked family size",
                        got: seen.len() as u128,
                        limit: MAX_FAMILY_SIZE as u128,
                    });
                }
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    marks[pos] += 1;
                    if marks[pos] <= v {
                        break;
                    }
                    marks[pos] = 1;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
    }
    let unit = MarkedGraph::unit(k);
    let (unit_key, unit_canonical) = unit.canonical_form()?;
    seen.entry(unit_key).or_insert(unit_canonical);
    let mut members: Vec<MarkedGraph> = seen.into_values().collect();
    members.sort_by_cached_key(|m| {
        (
            m.underlying().vertex_count(),
            m.canonical_key()
                .expect("members are within the canonical guard"),
        )
    });
    Ok(MarkedFamily {
        k,
        bounds: FamilyBounds {
            max_vertices,
            max_edge_total,
        },
        members,
    })
}

/// A finite window of a connection matrix: entry (i, j) holds the
/// invariant value on the gluing of members i and j.
#[derive(Clone, Debug)]
pub struct ConnectionSubmatrix {
    pub k: usize,
    pub f_descriptor: String,
    pub matrix: ScalarMatrix,
}

/// Builds the window by gluing each pair and evaluating the invariant.
/// Gluing is commutative up to marked isomorphism and the invariant is
/// isomorphism-invariant, so only the upper triangle is evaluated and the
/// result is exactly symmetric.
pub fn build_submatrix(f: &InvariantSource, family: &MarkedFamily) -> Result<ConnectionSubmatrix> {
    let size = family.len();
    let members = family.members();
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (i..size).map(move |j| (i, j)))
        .collect();
    let values: Vec<Result<GaussianRational>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let glued = members[i].glue(&members[j])?;
            f.evaluate(glued.underlying())
        })
        .collect();
    let mut matrix = ScalarMatrix::zero(size, size);
    for (&(i, j), value) in pairs.iter().zip(values) {
        let value = value?;
        matrix[(i, j)] = value.clone();
        matrix[(j, i)] = value;
    }
    Ok(ConnectionSubmatrix {
        k: family.k(),
        f_descriptor: f.descriptor(),
        matrix,
    })
}

/// Exact rank over Q(i); see [`ScalarMatrix::rank`] for the pivot rule.
pub fn exact_rank(matrix: &ScalarMatrix) -> usize {
    matrix.rank()
}

#[derive(Clone, Debug)]
pub struct NecessityReport {
    pub family_size: usize,
    pub rank: usize,
    pub state_count: usize,
    pub bound: u128,
    pub rank_within_bound: bool,
    pub factorization_ok: bool,
}

/// For a spin invariant with n states: assembles the matrix of pinned
/// partition-function values over all n^k mark-state assignments, checks
/// entrywise that the connection window equals that matrix times its own
/// transpose, and reports the window rank against the n^k bound.
pub fn necessity_check(a: &SpinMatrix, family: &MarkedFamily) -> Result<NecessityReport> {
    let k = family.k();
    let n = a.state_count();
    let columns = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let work = columns.saturating_mul(family.len() as u128);
    if work > STATE_SPACE_LIMIT {
        return Err(Error::SizeGuard {
            what: "factorization-check work",
            got: work,
            limit: STATE_SPACE_LIMIT,
        });
    }
    let column_count = columns as usize;
    // enumerate all assignments [k] -> states in lexicographic order
    let assignments: Vec<Vec<usize>> = {
        let mut all = Vec::with_capacity(column_count);
        let mut current = vec![0usize; k];
        loop {
            if n == 0 && k > 0 {
                break;
            }
            all.push(current.clone());
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                current[pos] += 1;
                if current[pos] < n {
                    break;
                }
                current[pos] = 0;
                pos += 1;
            }
            if pos == k || k == 0 {
                break;
            }
        }
        all
    };
    let members = family.members();
    let rows: Vec<Result<Vec<GaussianRational>>> = members
        .par_iter()
        .map(|mg| {
            assignments
                .iter()
                .map(|lambda| marked_partition_function(a, mg, lambda))
                .collect()
        })
        .collect();
    let mut b = ScalarMatrix::zero(members.len(), assignments.len());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, value) in row?.into_iter().enumerate() {
            b[(i, j)] = value;
        }
    }
    let f = InvariantSource::from_spin(a.clone());
    let window = build_submatrix(&f, family)?;
    let product = b.matmul(&b.transpose())?;
    let factorization_ok = product == window.matrix;
    let rank = exact_rank(&window.matrix);
    Ok(NecessityReport {
        family_size: family.len(),
        rank,
        state_count: n,
        bound: columns,
        rank_within_bound: (rank as u128) <= columns,
        factorization_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::Multigraph;

    #[test]
    fn family_for_unmarked_graphs() {
        let family = generate_family(0, 1, 0).unwrap();
        let keys: Vec<String> = family
            .members()
            .iter()
            .map(|m| m.underlying().canonical_key().unwrap())
            .collect();
        assert_eq!(
            keys,
            vec![
                Multigraph::empty().canonical_key().unwrap(),
                Multigraph::edgeless(1).canonical_key().unwrap()
            ]
        );
    }

    #[test]
    fn family_one_mark_loops() {
        // a single marked vertex with 0, 1, or 2 loops
        let family = generate_family(1, 1, 2).unwrap();
        assert_eq!(family.len(), 3);
        for m in family.members() {
            assert_eq!(m.underlying().vertex_count(), 1);
        }
    }

    #[test]
    fn family_includes_non_injective_marks() {
        let family = generate_family(2, 2, 1).unwrap();
        let has_doubly_marked_vertex = family
            .members()
            .iter()
            .any(|m| m.underlying().vertex_count() == 1 && m.marks() == [1, 1]);
        let has_injective = family
            .members()
            .iter()
            .any(|m| m.underlying().vertex_count() == 2 && m.marks()[0] != m.marks()[1]);
        assert!(has_doubly_marked_vertex);
        assert!(has_injective);
        // the unit is always present
        let unit_key = MarkedGraph::unit(2).canonical_key().unwrap();
        assert!(family
            .members()
            .iter()
            .any(|m| m.canonical_key().unwrap() == unit_key));
    }

    #[test]
    fn family_always_contains_unit_even_beyond_bounds() {
        let family = generate_family(3, 1, 0).unwrap();
        let unit_key = MarkedGraph::unit(3).canonical_key().unwrap();
        assert!(family
            .members()
            .iter()
            .any(|m| m.canonical_key().unwrap() == unit_key));
    }

    #[test]
    fn family_order_is_deterministic() {
        let a = generate_family(1, 2, 2).unwrap();
        let b = generate_family(1, 2, 2).unwrap();
        let keys = |fam: &MarkedFamily| {
            fam.members()
                .iter()
                .map(|m| m.canonical_key().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(keys(&a), keys(&b));
        let mut sorted = keys(&a);
        sorted.dedup();
        assert_eq!(sorted.len(), a.len(), "no duplicate members");
    }

    #[test]
    fn submatrix_is_symmetric_and_constant_for_trivial_invariant() {
        let f = InvariantSource::from_spin(SpinMatrix::all_ones(1));
        let family = generate_family(1, 2, 1).unwrap();
        let window = build_submatrix(&f, &family).unwrap();
        assert!(window.matrix.is_symmetric());
        for v in window.matrix.entries() {
            assert!(v.is_one());
        }
        assert_eq!(exact_rank(&window.matrix), 1);
    }

    #[test]
    fn unmarked_window_has_rank_one() {
        // multiplicativity makes every 2x2 minor of the k=0 window singular
        let f = InvariantSource::from_spin(SpinMatrix::identity(2));
        let family = generate_family(0, 2, 1).unwrap();
        let window = build_submatrix(&f, &family).unwrap();
        assert_eq!(exact_rank(&window.matrix), 1);
        for i in 0..family.len() {
            for j in 0..family.len() {
                let minor = ScalarMatrix::from_rows(vec![
                    vec![window.matrix[(0, 0)].clone(), window.matrix[(0, j)].clone()],
                    vec![window.matrix[(i, 0)].clone(), window.matrix[(i, j)].clone()],
                ])
                .unwrap();
                assert!(minor.determinant().unwrap().is_zero());
            }
        }
    }

    #[test]
    fn rank_is_monotone_under_family_extension() {
        let f = InvariantSource::from_spin(SpinMatrix::ones_minus_identity(2));
        let small = generate_family(1, 1, 1).unwrap();
        let large = generate_family(1, 2, 2).unwrap();
        assert!(small.len() < large.len());
        let rank_small = exact_rank(&build_submatrix(&f, &small).unwrap().matrix);
        let rank_large = exact_rank(&build_submatrix(&f, &large).unwrap().matrix);
        assert!(rank_small <= rank_large);
    }

    #[test]
    fn necessity_on_identity_two_states() {
        let a = SpinMatrix::identity(2);
        let family = generate_family(1, 2, 1).unwrap();
        let report = necessity_check(&a, &family).unwrap();
        assert!(report.factorization_ok);
        assert!(report.rank_within_bound);
        assert!(report.rank <= 2);
    }

    #[test]
    fn rank_of_lattice_matrices() {
        let zeta = crate::partition::zeta_matrix(3).unwrap();
        assert_eq!(exact_rank(&zeta.matrix), 5);
        assert_eq!(exact_rank(&ScalarMatrix::identity(4)), 4);
    }

    #[test]
    fn necessity_single_state_rank_one() {
        let a = SpinMatrix::all_ones(1);
        for k in [0usize, 2] {
            let family = generate_family(k, 2, 1).unwrap();
            let report = necessity_check(&a, &family).unwrap();
            assert!(report.factorization_ok);
            assert_eq!(report.bound, 1);
            assert!(report.rank <= 1);
        }
    }
}
