//! Smith normal form over the integers.
//!
//! Pivots are always a nonzero entry of smallest absolute value. Unit
//! entries are taken first while the matrix is still sparse (each unit
//! pivot lets its row and column be discarded without touching anything
//! else); whatever remains is reduced densely with the classic
//! row/column Euclid loop. All arithmetic is arbitrary precision.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithResult {
    /// Positive invariant factors `d_1 | d_2 | … | d_r`.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub nrows: usize,
    pub ncols: usize,
}

impl SmithResult {
    /// Number of invariant factors that are odd, i.e. the rank over Z₂.
    pub fn rank_mod2(&self) -> usize {
        self.diagonal.iter().filter(|d| d.is_odd()).count()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn divisibility_chain_holds(&self) -> bool {
        self.diagonal.iter().all(|d| d.is_positive())
            && self.diagonal.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithResult {
    let (nrows, ncols) = (m.nrows(), m.ncols());
    let mut sparse = SparseRows::from_matrix(m);
    let units = sparse.eliminate_units();
    let mut diagonal = vec![BigInt::one(); units];
    diagonal.extend(dense_snf(sparse.into_dense()));
    SmithResult { rank: diagonal.len(), diagonal, nrows, ncols }
}

struct SparseRows {
    rows: Vec<BTreeMap<usize, BigInt>>,
    col_rows: Vec<BTreeSet<usize>>,
}

impl SparseRows {
    fn from_matrix(m: &IntMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.nrows()];
        let mut col_rows = vec![BTreeSet::new(); m.ncols()];
        for (c, rows_of_c) in col_rows.iter_mut().enumerate() {
            for &(r, v) in m.column(c) {
                rows[r].insert(c, BigInt::from(v));
                rows_of_c.insert(r);
            }
        }
        SparseRows { rows, col_rows }
    }

    /// Repeatedly pivots on ±1 entries; returns how many were used.
    fn eliminate_units(&mut self) -> usize {
        let mut count = 0;
        loop {
            let mut progress = false;
            for r in 0..self.rows.len() {
                // Markowitz-style choice: the unit in the sparsest column
                let pick = self.rows[r]
                    .iter()
                    .filter(|(_, v)| v.abs().is_one())
                    .min_by_key(|(c, _)| (self.col_rows[**c].len(), **c))
                    .map(|(c, _)| *c);
                if let Some(c) = pick {
                    self.pivot(r, c);
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                return count;
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let p = pivot_row[&c].clone();
        let others: Vec<usize> = self.col_rows[c].iter().copied().filter(|&x| x != r).collect();
        for r2 in others {
            // p is a unit, so p⁻¹ = p
            let factor = &self.rows[r2][&c] * &p;
            for (&c2, v) in &pivot_row {
                let entry = self.rows[r2].entry(c2).or_insert_with(BigInt::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    self.rows[r2].remove(&c2);
                    self.col_rows[c2].remove(&r2);
                } else {
                    self.col_rows[c2].insert(r2);
                }
            }
        }
        for &c2 in pivot_row.keys() {
            self.col_rows[c2].remove(&r);
        }
        debug_assert!(self.col_rows[c].is_empty());
    }

    fn into_dense(self) -> Vec<Vec<BigInt>> {
        let cols: Vec<usize> = self
            .col_rows
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, _)| c)
            .collect();
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        self.rows
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let mut dense = vec![BigInt::zero(); cols.len()];
                for (c, v) in r {
                    dense[pos[&c]] = v;
                }
                dense
            })
            .collect()
    }
}

fn smallest_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            if best.as_ref().map_or(true, |(_, _, b)| mag < *b) {
                best = Some((i, j, mag));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_cols(a: &mut [Vec<BigInt>], x: usize, y: usize) {
    for row in a.iter_mut() {
        row.swap(x, y);
    }
}

fn dense_snf(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        let Some((pi, pj)) = smallest_nonzero(&a, t) else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut residue = false;
            for i in t + 1..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                for j in t..ncols {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
                residue |= !a[i][t].is_zero();
            }
            for j in t + 1..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                for i in t..nrows {
                    let delta = &q * &a[i][t];
                    a[i][j] -= delta;
                }
                residue |= !a[t][j].is_zero();
            }
            if residue {
                // a remainder smaller than the pivot survived; make it the pivot
                let mut best = (t, t, a[t][t].abs());
                for i in t + 1..nrows {
                    if !a[i][t].is_zero() && a[i][t].abs() < best.2 {
                        best = (i, t, a[i][t].abs());
                    }
                }
                for j in t + 1..ncols {
                    if !a[t][j].is_zero() && a[t][j].abs() < best.2 {
                        best = (t, j, a[t][j].abs());
                    }
                }
                a.swap(t, best.0);
                swap_cols(&mut a, t, best.1);
                continue;
            }
            let offender = (t + 1..nrows)
                .find(|&i| (t + 1..ncols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match offender {
                Some(i) => {
                    for j in t..ncols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Rank over Z₂ by column reduction on the odd entries.
pub fn rank_mod2(m: &IntMatrix) -> usize {
    let mut pivots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut rank = 0;
    for c in 0..m.ncols() {
        let mut col: Vec<usize> = m
            .column(c)
            .iter()
            .filter(|(_, v)| v.rem_euclid(2) == 1)
            .map(|&(r, _)| r)
            .collect();
        while let Some(&low) = col.last() {
            match pivots.get(&low) {
                Some(p) => col = symmetric_difference(&col, p),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivots.insert(low, col);
            rank += 1;
        }
    }
    rank
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.diagonal, big(&[1, 1, 1]));
        assert_eq!(s.rank, 3);
    }

    #[test]
    fn zero_matrix() {
        let s = smith_normal_form(&IntMatrix::zeros(3, 4));
        assert!(s.diagonal.is_empty());
        assert_eq!(s.rank, 0);
        assert_eq!((s.nrows, s.ncols), (3, 4));
    }

    #[test]
    fn two_by_two() {
        let s = smith_normal_form(&IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal, big(&[2, 4]));
    }

    #[test]
    fn needs_divisibility_fix() {
        // diag(2, 3) is not in normal form: its SNF is diag(1, 6)
        let s = smith_normal_form(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal, big(&[1, 6]));
    }

    #[test]
    fn torsion_of_projective_plane_boundary() {
        // ∂2 of a Δ-complex RP²-like pattern: column (2) yields Z/2 torsion
        let s = smith_normal_form(&IntMatrix::from_dense(&[vec![2], vec![0]]));
        assert_eq!(s.torsion(), big(&[2]));
        assert_eq!(s.rank_mod2(), 0);
    }

    #[test]
    fn mod2_rank_examples() {
        assert_eq!(rank_mod2(&IntMatrix::from_dense(&[vec![1, 1], vec![1, 1]])), 1);
        assert_eq!(rank_mod2(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]])), 1);
        assert_eq!(rank_mod2(&IntMatrix::identity(4)), 4);
    }

    /// Determinantal-divisor oracle: gcd of all k×k minors equals d_1⋯d_k.
    fn det(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum()
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut with_last: Vec<Vec<usize>> = subsets(n - 1, k - 1);
        for s in &mut with_last {
            s.push(n - 1);
        }
        let mut out = subsets(n - 1, k);
        out.extend(with_last);
        out
    }

    fn determinantal_divisor(a: &[Vec<i64>], k: usize) -> i128 {
        let (r, c) = (a.len(), a[0].len());
        let mut g: i128 = 0;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let m: Vec<Vec<i128>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
                g = g.gcd(&det(&m));
            }
        }
        g
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-6i64..7, c), r)
        })
    }

    proptest! {
        #[test]
        fn matches_determinantal_divisors(a in small_matrix()) {
            let s = smith_normal_form(&IntMatrix::from_dense(&a));
            prop_assert!(s.divisibility_chain_holds());
            let mut prod = BigInt::one();
            for k in 1..=a.len().min(a[0].len()) {
                let dk = determinantal_divisor(&a, k);
                if k <= s.rank {
                    prod *= &s.diagonal[k - 1];
                    prop_assert_eq!(BigInt::from(dk), prod.clone());
                } else {
                    prop_assert_eq!(dk, 0);
                }
            }
        }

        #[test]
        fn invariant_under_unimodular_operations(
            a in small_matrix(),
            ops in proptest::collection::vec((0usize..4, 0usize..4, -3i64..4, any::<bool>()), 0..12),
        ) {
            let base = smith_normal_form(&IntMatrix::from_dense(&a));
            let mut b = a.clone();
            let (r, c) = (b.len(), b[0].len());
            for (x, y, k, on_rows) in ops {
                if on_rows {
                    let (x, y) = (x % r, y % r);
                    if x == y { b.swap(0, x); continue; }
                    for j in 0..c { b[x][j] += k * b[y][j]; }
                } else {
                    let (x, y) = (x % c, y % c);
                    if x == y { for row in b.iter_mut() { row[x] = -row[x]; } continue; }
                    for row in b.iter_mut() { row[x] += k * row[y]; }
                }
            }
            prop_assert_eq!(smith_normal_form(&IntMatrix::from_dense(&b)).diagonal, base.diagonal);
        }

        #[test]
        fn mod2_rank_agrees_with_snf(a in small_matrix()) {
            let m = IntMatrix::from_dense(&a);
            prop_assert_eq!(rank_mod2(&m), smith_normal_form(&m).rank_mod2());
        }
    }
}
