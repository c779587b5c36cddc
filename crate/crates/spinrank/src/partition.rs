//! The lattice of set partitions of [n] under refinement, with its zeta and
//! Moebius matrices and the join-power matrix P_n(x).
//!
//! Partitions are canonically encoded as restricted-growth strings and
//! ordered finest-first (the all-singletons partition comes first, the
//! one-block partition last). Every matrix in the crate indexes Pi_n in
//! this order, so results are deterministic across modules and runs.

use std::collections::HashMap;

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::matrix::ScalarMatrix;
use crate::scalar::GaussianRational;

/// Enumeration guard: Bell(10) = 115975 partitions is the desk-scale limit.
pub const MAX_ENUMERATION_GROUND_SIZE: usize = 10;
/// Lattice matrices are Bell(n) x Bell(n); n = 8 means 4140 x 4140.
pub const MAX_MATRIX_GROUND_SIZE: usize = 8;
/// P_n(x) additionally computes all pairwise joins.
pub const MAX_P_MATRIX_GROUND_SIZE: usize = 7;
/// The diagonalization check multiplies three Bell(n)-sized matrices.
pub const MAX_DIAGONALIZATION_GROUND_SIZE: usize = 6;

/// A partition of [n] = {1, ..., n}, stored as a restricted-growth string:
/// `rgs[i]` is the block label of element i+1, labels appear in order of
/// first occurrence. [0] has exactly one partition, with no blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    rgs: Vec<usize>,
}

impl SetPartition {
    /// The all-singletons partition (the lattice bottom).
    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            rgs: (0..n).collect(),
        }
    }

    /// The one-block partition (the lattice top); for n = 0 it coincides
    /// with the empty partition.
    pub fn top(n: usize) -> Self {
        SetPartition { n, rgs: vec![0; n] }
    }

    pub fn from_rgs(rgs: Vec<usize>) -> Result<Self> {
        let mut max_seen: Option<usize> = None;
        for &label in &rgs {
            let limit = max_seen.map_or(0, |m| m + 1);
            if label > limit {
                return Err(Error::InvalidInput(format!(
                    "not a restricted-growth string: {rgs:?}"
                )));
            }
            max_seen = Some(max_seen.map_or(label, |m| m.max(label)));
        }
        Ok(SetPartition { n: rgs.len(), rgs })
    }

    /// Builds a partition from explicit blocks of 1-indexed elements, which
    /// must disjointly cover [n] with no empty block.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidInput("empty block in partition".into()));
            }
            for &el in block {
                if el == 0 || el > n {
                    return Err(Error::InvalidInput(format!(
                        "element {el} outside ground set [{n}]"
                    )));
                }
                if owner[el - 1] != usize::MAX {
                    return Err(Error::InvalidInput(format!("element {el} appears twice")));
                }
                owner[el - 1] = b;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::InvalidInput(
                "blocks do not cover the ground set".into(),
            ));
        }
        Ok(Self::kernel(&owner))
    }

    /// The partition whose blocks are the nonempty fibers of `map`
    /// (element i+1 maps to `map[i]`; the codomain is irrelevant).
    pub fn kernel(map: &[usize]) -> Self {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut rgs = Vec::with_capacity(map.len());
        for &value in map {
            let next = relabel.len();
            rgs.push(*relabel.entry(value).or_insert(next));
        }
        SetPartition { n: map.len(), rgs }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Number of blocks; 0 only for the partition of the empty set.
    pub fn block_count(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as sorted 1-indexed element lists, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &label) in self.rgs.iter().enumerate() {
            blocks[label].push(i + 1);
        }
        blocks
    }

    /// 0-indexed block label of a 1-indexed element.
    pub fn block_of(&self, element: usize) -> usize {
        self.rgs[element - 1]
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Compact digit string of the RGS; empty for n = 0. Labels stay below
    /// 10 because enumeration is capped at n = 10.
    pub fn rgs_string(&self) -> String {
        self.rgs
            .iter()
            .map(|&l| char::from_digit(l as u32, 36).unwrap())
            .collect()
    }

    pub fn from_rgs_string(text: &str) -> Result<Self> {
        let rgs = text
            .chars()
            .map(|c| c.to_digit(36).map(|d| d as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput(format!("bad RGS string `{text}`")))?;
        Self::from_rgs(rgs)
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &SetPartition) -> Result<bool> {
        if self.n != coarser.n {
            return Err(Error::GroundSetMismatch("refines", self.n, coarser.n));
        }
        // self <= coarser iff elements sharing a self-label share a coarser-label
        let mut image = vec![usize::MAX; self.block_count()];
        for i in 0..self.n {
            let from = self.rgs[i];
            let to = coarser.rgs[i];
            if image[from] == usize::MAX {
                image[from] = to;
            } else if image[from] != to {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least common coarsening, via union-find over the two block structures.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch("join", self.n, other.n));
        }
        let mut dsu = Dsu::new(self.n);
        for part in [self, other] {
            let mut first = vec![usize::MAX; part.block_count()];
            for (i, &label) in part.rgs.iter().enumerate() {
                if first[label] == usize::MAX {
                    first[label] = i;
                } else {
                    dsu.union(first[label], i);
                }
            }
        }
        Ok(SetPartition::kernel(&dsu.roots()))
    }
}

/// All partitions of [n] in canonical order: descending lexicographic on
/// the restricted-growth string, i.e. all-singletons first, one-block last.
/// This order linearly extends refinement, which keeps the zeta matrix
/// unit upper-triangular.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if n > MAX_ENUMERATION_GROUND_SIZE {
        return Err(Error::SizeGuard {
            what: "partition enumeration ground size",
            got: n as u128,
            limit: MAX_ENUMERATION_GROUND_SIZE as u128,
        });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(
        rgs: &mut Vec<usize>,
        pos: usize,
        max_used: usize,
        n: usize,
        out: &mut Vec<SetPartition>,
    ) {
        if pos == n {
            out.push(SetPartition {
                n,
                rgs: rgs.clone(),
            });
            return;
        }
        let limit = if pos == 0 { 0 } else { max_used + 1 };
        for label in 0..=limit {
            rgs[pos] = label;
            rec(rgs, pos + 1, max_used.max(label), n, out);
        }
    }
    rec(&mut rgs, 0, 0, n, &mut out);
    out.reverse();
    Ok(out)
}

/// Index of each partition within `enumerate_partitions(n)`, keyed by RGS.
pub fn partition_index_map(parts: &[SetPartition]) -> HashMap<Vec<usize>, usize> {
    parts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.rgs.clone(), i))
        .collect()
}

/// A square matrix indexed by Pi_n in canonical order.
#[derive(Clone, Debug)]
pub struct LatticeMatrix {
    pub n: usize,
    pub partitions: Vec<SetPartition>,
    pub matrix: ScalarMatrix,
}

fn guard_matrix_size(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeGuard {
            what,
            got: n as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Zeta matrix: entry (P, Q) is 1 when P refines Q, else 0. Unit
/// upper-triangular in the canonical order.
pub fn zeta_matrix(n: usize) -> Result<LatticeMatrix> {
    guard_matrix_size(n, MAX_MATRIX_GROUND_SIZE, "zeta matrix ground size")?;
    let parts = enumerate_partitions(n)?;
    let matrix = ScalarMatrix::from_fn(parts.len(), parts.len(), |r, c| {
        if parts[r].refines(&parts[c]).expect("same ground set") {
            GaussianRational::one()
        } else {
            GaussianRational::zero()
        }
    });
    Ok(LatticeMatrix {
        n,
        partitions: parts,
        matrix,
    })
}

/// Moebius matrix: the exact inverse of the zeta matrix, computed by
/// back-substitution on the unit-triangular zeta matrix.
pub fn moebius_matrix(n: usize) -> Result<LatticeMatrix> {
    let zeta = zeta_matrix(n)?;
    let matrix = zeta.matrix.invert_unitriangular()?;
    Ok(LatticeMatrix {
        n,
        partitions: zeta.partitions,
        matrix,
    })
}

/// The full top row of the Moebius matrix for ground size `n`, in canonical
/// order: `mu_row(n)[i]` is the Moebius value of the i-th partition. Solved
/// as the row system (row)·Z = e_singletons rather than via the closed-form
/// product, which tests use as an independent cross-check.
pub fn mu_row(n: usize) -> Result<Vec<i64>> {
    if n > MAX_ENUMERATION_GROUND_SIZE {
        return Err(Error::SizeGuard {
            what: "moebius row ground size",
            got: n as u128,
            limit: MAX_ENUMERATION_GROUND_SIZE as u128,
        });
    }
    let parts = enumerate_partitions(n)?;
    let count = parts.len();
    let mut row = vec![0i64; count];
    for q in 0..count {
        // the all-singletons partition sits at index 0
        let mut value: i64 = if q == 0 { 1 } else { 0 };
        for p in 0..q {
            if row[p] != 0 && parts[p].refines(&parts[q]).expect("same ground set") {
                value -= row[p];
            }
        }
        row[q] = value;
    }
    Ok(row)
}

/// Moebius value of one partition: the entry of the Moebius matrix in the
/// all-singletons row at this partition's column.
pub fn mu_top(p: &SetPartition) -> Result<i64> {
    let parts = enumerate_partitions(p.ground_size())?;
    let row = mu_row(p.ground_size())?;
    let index = parts
        .iter()
        .position(|q| q == p)
        .expect("every partition appears in the enumeration");
    Ok(row[index])
}

/// The matrix with entry x^(number of blocks of P join Q).
pub fn p_matrix(n: usize, x: &GaussianRational) -> Result<LatticeMatrix> {
    guard_matrix_size(n, MAX_P_MATRIX_GROUND_SIZE, "P_n(x) ground size")?;
    let parts = enumerate_partitions(n)?;
    let count = parts.len();
    // cache powers of x up to n blocks
    let mut powers = Vec::with_capacity(n + 1);
    let mut acc = GaussianRational::one();
    powers.push(acc.clone());
    for _ in 0..n {
        acc = &acc * x;
        powers.push(acc.clone());
    }
    let mut matrix = ScalarMatrix::zero(count, count);
    for r in 0..count {
        for c in r..count {
            let blocks = parts[r]
                .join(&parts[c])
                .expect("same ground set")
                .block_count();
            matrix[(r, c)] = powers[blocks].clone();
            if c != r {
                matrix[(c, r)] = powers[blocks].clone();
            }
        }
    }
    Ok(LatticeMatrix {
        n,
        partitions: parts,
        matrix,
    })
}

/// x(x-1)...(x-k+1); the empty product is 1.
pub fn falling_factorial(x: &GaussianRational, k: usize) -> GaussianRational {
    let mut acc = GaussianRational::one();
    for i in 0..k {
        let term = x - &GaussianRational::from_int(i as i64);
        if term.is_zero() {
            return GaussianRational::zero();
        }
        acc = &acc * &term;
    }
    acc
}

/// One offending entry of a failed diagonalization check.
#[derive(Clone, Debug)]
pub struct DiagonalizationMismatch {
    pub row_partition: String,
    pub col_partition: String,
    pub got: GaussianRational,
    pub expected: GaussianRational,
}

#[derive(Clone, Debug)]
pub struct DiagonalizationReport {
    pub pass: bool,
    pub first_mismatch: Option<DiagonalizationMismatch>,
}

/// Checks that M · P_n(x) · M^T equals the diagonal matrix of falling
/// factorials x(x-1)...(x-|P|+1), entry by entry, exactly.
pub fn verify_diagonalization(n: usize, x: &GaussianRational) -> Result<DiagonalizationReport> {
    guard_matrix_size(
        n,
        MAX_DIAGONALIZATION_GROUND_SIZE,
        "diagonalization ground size",
    )?;
    let p = p_matrix(n, x)?;
    let m = moebius_matrix(n)?;
    let product = m.matrix.matmul(&p.matrix)?.matmul(&m.matrix.transpose())?;
    for r in 0..product.rows() {
        for c in 0..product.cols() {
            let expected = if r == c {
                falling_factorial(x, p.partitions[r].block_count())
            } else {
                GaussianRational::zero()
            };
            if product[(r, c)] != expected {
                return Ok(DiagonalizationReport {
                    pass: false,
                    first_mismatch: Some(DiagonalizationMismatch {
                        row_partition: p.partitions[r].rgs_string(),
                        col_partition: p.partitions[c].rgs_string(),
                        got: product[(r, c)].clone(),
                        expected,
                    }),
                });
            }
        }
    }
    Ok(DiagonalizationReport {
        pass: true,
        first_mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Bell numbers from the Bell-triangle recurrence.
    fn bell_oracle(n: usize) -> u64 {
        let mut prev: Vec<u64> = vec![1];
        for _ in 0..n {
            let mut next = Vec::with_capacity(prev.len() + 1);
            next.push(*prev.last().unwrap());
            for &v in &prev {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            prev = next;
        }
        prev[0]
    }

    fn blocks(n: usize, layout: &[&[usize]]) -> SetPartition {
        SetPartition::from_blocks(n, &layout.iter().map(|b| b.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn enumeration_counts_match_bell_triangle() {
        for n in 0..=8 {
            let parts = enumerate_partitions(n).unwrap();
            assert_eq!(parts.len() as u64, bell_oracle(n), "n={n}");
            let mut seen = std::collections::HashSet::new();
            for p in &parts {
                assert!(seen.insert(p.rgs().to_vec()), "duplicate at n={n}");
            }
        }
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
        assert!(enumerate_partitions(11).is_err());
    }

    #[test]
    fn enumeration_order_is_finest_first() {
        let p0 = enumerate_partitions(0).unwrap();
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0].block_count(), 0);

        let p2 = enumerate_partitions(2).unwrap();
        assert_eq!(p2[0], SetPartition::singletons(2));
        assert_eq!(p2[1], SetPartition::top(2));

        // descending lexicographic on the RGS throughout
        let p4 = enumerate_partitions(4).unwrap();
        for w in p4.windows(2) {
            assert!(w[0].rgs() > w[1].rgs());
        }
        assert_eq!(p4[0], SetPartition::singletons(4));
        assert_eq!(p4[14], SetPartition::top(4));
    }

    #[test]
    fn refinement_examples() {
        let t = SetPartition::singletons(3);
        let q = blocks(3, &[&[1, 2], &[3]]);
        assert!(t.refines(&q).unwrap());
        let r = blocks(3, &[&[1], &[2, 3]]);
        assert!(!q.refines(&r).unwrap());
        for p in enumerate_partitions(4).unwrap() {
            assert!(p.refines(&p).unwrap());
        }
        assert!(t.refines(&SetPartition::top(2)).is_err());
    }

    #[test]
    fn join_examples() {
        let a = blocks(3, &[&[1, 2], &[3]]);
        let b = blocks(3, &[&[1], &[2, 3]]);
        assert_eq!(a.join(&b).unwrap(), SetPartition::top(3));
        let t = SetPartition::singletons(3);
        for q in enumerate_partitions(3).unwrap() {
            assert_eq!(t.join(&q).unwrap(), q);
        }
    }

    #[test]
    fn join_is_least_upper_bound_on_pi4() {
        // brute force: the join must be the unique minimal common coarsening
        let parts = enumerate_partitions(4).unwrap();
        let a = blocks(4, &[&[1, 3], &[2], &[4]]);
        let b = blocks(4, &[&[1], &[3, 4], &[2]]);
        let expected = blocks(4, &[&[1, 3, 4], &[2]]);
        let commons: Vec<&SetPartition> = parts
            .iter()
            .filter(|r| a.refines(r).unwrap() && b.refines(r).unwrap())
            .collect();
        let minimal: Vec<&&SetPartition> = commons
            .iter()
            .filter(|r| commons.iter().all(|s| *s == **r || !s.refines(r).unwrap()))
            .collect();
        assert_eq!(minimal.len(), 1);
        assert_eq!(**minimal[0], expected);
        assert_eq!(a.join(&b).unwrap(), expected);

        for p in &parts {
            for q in &parts {
                let j = p.join(q).unwrap();
                assert!(p.refines(&j).unwrap());
                assert!(q.refines(&j).unwrap());
                for r in &parts {
                    if p.refines(r).unwrap() && q.refines(r).unwrap() {
                        assert!(j.refines(r).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            SetPartition::kernel(&[1, 1, 2]),
            blocks(3, &[&[1, 2], &[3]])
        );
        assert_eq!(SetPartition::kernel(&[7, 7, 7, 7]), SetPartition::top(4));
        assert_eq!(
            SetPartition::kernel(&[2, 3, 1]),
            SetPartition::singletons(3)
        );
        assert_eq!(SetPartition::kernel(&[]), SetPartition::top(0));
    }

    #[test]
    fn zeta_matrix_examples() {
        let z1 = zeta_matrix(1).unwrap();
        assert_eq!(z1.matrix, ScalarMatrix::identity(1));

        let z2 = zeta_matrix(2).unwrap();
        let one = GaussianRational::one();
        let zero = GaussianRational::zero();
        assert_eq!(
            vec![
                z2.matrix[(0, 0)].clone(),
                z2.matrix[(0, 1)].clone(),
                z2.matrix[(1, 0)].clone(),
                z2.matrix[(1, 1)].clone()
            ],
            vec![one.clone(), one.clone(), zero, one]
        );

        let z3 = zeta_matrix(3).unwrap();
        for c in 0..5 {
            assert!(
                z3.matrix[(0, c)].is_one(),
                "singletons row must be all ones"
            );
        }
        assert!(zeta_matrix(9).is_err());
    }

    #[test]
    fn moebius_inverts_zeta_exactly() {
        for n in 0..=6 {
            let z = zeta_matrix(n).unwrap();
            let m = moebius_matrix(n).unwrap();
            let id = ScalarMatrix::identity(z.matrix.rows());
            assert_eq!(z.matrix.matmul(&m.matrix).unwrap(), id, "Z*M at n={n}");
            assert_eq!(m.matrix.matmul(&z.matrix).unwrap(), id, "M*Z at n={n}");
        }
        let m2 = moebius_matrix(2).unwrap();
        assert_eq!(m2.matrix[(0, 0)], GaussianRational::from_int(1));
        assert_eq!(m2.matrix[(0, 1)], GaussianRational::from_int(-1));
        assert_eq!(m2.matrix[(1, 0)], GaussianRational::from_int(0));
        assert_eq!(m2.matrix[(1, 1)], GaussianRational::from_int(1));
    }

    #[test]
    fn mu_values() {
        // derived by inverting the 5x5 zeta matrix at n=3
        let m3 = moebius_matrix(3).unwrap();
        let top_col = m3
            .partitions
            .iter()
            .position(|p| *p == SetPartition::top(3))
            .unwrap();
        assert_eq!(m3.matrix[(0, top_col)], GaussianRational::from_int(2));

        assert_eq!(mu_top(&SetPartition::top(3)).unwrap(), 2);
        assert_eq!(mu_top(&SetPartition::singletons(5)).unwrap(), 1);
        assert_eq!(mu_top(&blocks(4, &[&[1, 2], &[3, 4]])).unwrap(), 1);
    }

    #[test]
    fn mu_matches_closed_form_product() {
        // closed form: product over blocks of (-1)^(size-1) (size-1)!
        fn closed_form(p: &SetPartition) -> i64 {
            p.blocks()
                .iter()
                .map(|b| {
                    let s = b.len() as i64;
                    let sign = if (s - 1) % 2 == 0 { 1 } else { -1 };
                    sign * (1..s).product::<i64>().max(1)
                })
                .product()
        }
        for n in 0..=7 {
            let parts = enumerate_partitions(n).unwrap();
            let row = mu_row(n).unwrap();
            for (i, p) in parts.iter().enumerate() {
                assert_eq!(row[i], closed_form(p), "n={n} P={:?}", p.rgs());
            }
        }
    }

    #[test]
    fn mu_row_sums_to_falling_factorial() {
        // sum over Pi_k of mu_P x^{|P|} = x(x-1)...(x-k+1)
        let samples: Vec<GaussianRational> = vec![
            GaussianRational::from_int(0),
            GaussianRational::from_int(1),
            GaussianRational::from_int(2),
            GaussianRational::from_int(5),
            GaussianRational::from_int(-3),
            GaussianRational::rational(1, 2).unwrap(),
            GaussianRational::rational(-2, 3).unwrap(),
            GaussianRational::rational(7, 5).unwrap(),
            GaussianRational::complex(1, 1, 1, 1).unwrap(),
            GaussianRational::complex(0, 1, -1, 2).unwrap(),
        ];
        for k in 0..=6 {
            let parts = enumerate_partitions(k).unwrap();
            let row = mu_row(k).unwrap();
            for x in &samples {
                let mut sum = GaussianRational::zero();
                for (i, p) in parts.iter().enumerate() {
                    let term = x.pow(p.block_count() as i64).unwrap();
                    sum += &(&GaussianRational::from_int(row[i]) * &term);
                }
                assert_eq!(sum, falling_factorial(x, k), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn mu_convolution_identity() {
        // for each R: sum over P join Q = R of mu_P mu_Q equals mu_R
        for k in 0..=5 {
            let parts = enumerate_partitions(k).unwrap();
            let row = mu_row(k).unwrap();
            let index = partition_index_map(&parts);
            let mut conv = vec![0i64; parts.len()];
            for (pi, p) in parts.iter().enumerate() {
                for (qi, q) in parts.iter().enumerate() {
                    let r = index[p.join(q).unwrap().rgs()];
                    conv[r] += row[pi] * row[qi];
                }
            }
            assert_eq!(conv, row, "k={k}");
        }
    }

    #[test]
    fn p_matrix_example_at_x5() {
        let x = GaussianRational::from_int(5);
        let p2 = p_matrix(2, &x).unwrap();
        assert_eq!(p2.matrix[(0, 0)], GaussianRational::from_int(25));
        assert_eq!(p2.matrix[(0, 1)], GaussianRational::from_int(5));
        assert_eq!(p2.matrix[(1, 0)], GaussianRational::from_int(5));
        assert_eq!(p2.matrix[(1, 1)], GaussianRational::from_int(5));
        assert!(p_matrix(8, &x).is_err());
    }

    #[test]
    fn p2_determinant_is_x_cubed_minus_x_squared() {
        // derived by 2x2 cofactor expansion: x^2 * x - x * x = x^3 - x^2
        for (num, den) in [
            (0i64, 1i64),
            (1, 1),
            (2, 1),
            (5, 1),
            (-3, 1),
            (1, 2),
            (-7, 3),
        ] {
            let x = GaussianRational::rational(num, den).unwrap();
            let det = p_matrix(2, &x).unwrap().matrix.determinant().unwrap();
            let expected = &x.pow(3).unwrap() - &x.pow(2).unwrap();
            assert_eq!(det, expected, "x={x}");
        }
    }

    #[test]
    fn p_matrix_singularity_boundary() {
        let three = GaussianRational::from_int(3);
        let p3 = p_matrix(3, &three).unwrap();
        assert_eq!(p3.matrix.rank(), 5);
        assert!(!p3.matrix.determinant().unwrap().is_zero());
        let one = GaussianRational::from_int(1);
        assert!(p_matrix(3, &one)
            .unwrap()
            .matrix
            .determinant()
            .unwrap()
            .is_zero());
    }

    #[test]
    fn falling_factorial_examples() {
        let three = GaussianRational::from_int(3);
        assert_eq!(falling_factorial(&three, 3), GaussianRational::from_int(6));
        let two = GaussianRational::from_int(2);
        assert_eq!(falling_factorial(&two, 3), GaussianRational::zero());
        let half = GaussianRational::rational(1, 2).unwrap();
        assert_eq!(
            falling_factorial(&half, 2),
            GaussianRational::rational(-1, 4).unwrap()
        );
        assert_eq!(falling_factorial(&half, 0), GaussianRational::one());
    }

    #[test]
    fn diagonalization_examples() {
        let seven = GaussianRational::from_int(7);
        assert!(verify_diagonalization(2, &seven).unwrap().pass);
        let zero = GaussianRational::zero();
        assert!(verify_diagonalization(3, &zero).unwrap().pass);
        let half = GaussianRational::rational(1, 2).unwrap();
        assert!(verify_diagonalization(4, &half).unwrap().pass);
        assert!(verify_diagonalization(7, &seven).is_err());
    }

    #[test]
    fn diagonalization_at_n6() {
        let x = GaussianRational::rational(-3, 2).unwrap();
        assert!(verify_diagonalization(6, &x).unwrap().pass);
    }
}
