//! Relative cubical homology in degrees 0..2.

mod snf;

pub use snf::{rank_mod2, smith_normal_form, SmithResult};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::complex::{relative_complex, BoundaryMatrices, ComplexError, CubicalSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    Z2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
    /// Rational Betti numbers; `None` when only Z₂ was requested.
    pub betti_q: Option<[u64; 3]>,
    pub betti_z2: [u64; 3],
    /// Prime-power torsion coefficients per degree; `None` when only Z₂ was requested.
    pub torsion: Option<[Vec<BigInt>; 3]>,
    pub poincare_poly: Vec<i64>,
    pub euler: i64,
}

impl HomologySummary {
    /// Betti numbers used for the Poincaré polynomial.
    pub fn betti(&self) -> [u64; 3] {
        self.betti_q.unwrap_or(self.betti_z2)
    }

    pub fn is_trivial(&self) -> bool {
        self.betti() == [0, 0, 0]
    }
}

pub fn relative_homology(
    n: &CubicalSet,
    l: &CubicalSet,
    coefficients: Coefficients,
) -> Result<HomologySummary, ComplexError> {
    Ok(homology_of(&relative_complex(n, l)?, coefficients))
}

fn betti_from_ranks(counts: [usize; 3], r1: usize, r2: usize) -> [u64; 3] {
    [
        (counts[0] - r1) as u64,
        (counts[1] - r1 - r2) as u64,
        (counts[2] - r2) as u64,
    ]
}

/// Homology of an already assembled (relative) chain complex.
pub fn homology_of(bm: &BoundaryMatrices, coefficients: Coefficients) -> HomologySummary {
    let counts = bm.counts();
    let (betti_q, torsion, betti_z2) = match coefficients {
        Coefficients::Integers => {
            let (s1, s2) = rayon::join(|| smith_normal_form(&bm.d1), || smith_normal_form(&bm.d2));
            let bq = betti_from_ranks(counts, s1.rank, s2.rank);
            let bz = betti_from_ranks(counts, s1.rank_mod2(), s2.rank_mod2());
            let tors = [prime_powers(&s1.torsion()), prime_powers(&s2.torsion()), Vec::new()];
            (Some(bq), Some(tors), bz)
        }
        Coefficients::Z2 => {
            let bz = betti_from_ranks(counts, rank_mod2(&bm.d1), rank_mod2(&bm.d2));
            (None, None, bz)
        }
    };
    let betti = betti_q.unwrap_or(betti_z2);
    let poincare_poly = poincare_coefficients(betti);
    HomologySummary {
        euler: evaluate(&poincare_poly, -1),
        betti_q,
        betti_z2,
        torsion,
        poincare_poly,
    }
}

fn poincare_coefficients(betti: [u64; 3]) -> Vec<i64> {
    betti.iter().map(|&b| b as i64).collect()
}

/// `[b0, b1, b2]` of the rational (or, failing that, Z₂) Betti numbers.
pub fn poincare_polynomial(h: &HomologySummary) -> Vec<i64> {
    poincare_coefficients(h.betti())
}

/// Splits invariant factors into prime powers, sorted ascending.
pub fn prime_powers(factors: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::new();
    for f in factors {
        let mut n = f.clone();
        let mut p = BigInt::from(2);
        while &p * &p <= n {
            if n.is_multiple_of(&p) {
                let mut q = BigInt::one();
                while n.is_multiple_of(&p) {
                    n /= &p;
                    q *= &p;
                }
                out.push(q);
            }
            p += 1;
        }
        if n > BigInt::one() {
            out.push(n);
        }
    }
    out.sort();
    out
}

/// `p(t)` for integer coefficients listed from the constant term up.
pub fn evaluate(coeffs: &[i64], t: i64) -> i64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
}

/// Exact quotient by `1 + t`; `None` if there is a remainder.
pub fn divide_by_one_plus_t(coeffs: &[i64]) -> Option<Vec<i64>> {
    let mut c: Vec<i64> = coeffs.to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    if c.is_empty() {
        return Some(Vec::new());
    }
    let n = c.len();
    let mut q = vec![0; n - 1];
    if n >= 2 {
        q[n - 2] = c[n - 1];
        for k in (1..n - 1).rev() {
            q[k - 1] = c[k] - q[k];
        }
    }
    let remainder = c[0] - q.first().copied().unwrap_or(0);
    (remainder == 0).then_some(q)
}

pub fn torsion_as_u64(t: &BigInt) -> Option<u64> {
    if t.is_zero() {
        return Some(0);
    }
    t.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Axis, Cell, Rect};

    fn unit() -> Rect {
        Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()
    }

    fn square() -> CubicalSet {
        CubicalSet::from_cells(unit(), 0, [Cell::square(0, 0, 0)])
    }

    fn edges(list: &[Cell]) -> CubicalSet {
        CubicalSet::from_cells(unit(), 0, list.iter().copied())
    }

    // edges of the depth-0 square: bottom/top are horizontal at rows 0/1,
    // left/right vertical at columns 0/1
    fn bottom() -> Cell {
        Cell::edge(0, Axis::Horizontal, 0, 0)
    }
    fn top() -> Cell {
        Cell::edge(0, Axis::Horizontal, 0, 1)
    }
    fn left() -> Cell {
        Cell::edge(0, Axis::Vertical, 0, 0)
    }
    fn right() -> Cell {
        Cell::edge(0, Axis::Vertical, 1, 0)
    }

    /// Rank over Q by fraction-free elimination on i128, independent of SNF.
    fn rank_bareiss(a: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, p);
            for r in rank + 1..rows {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = a * m[r][k] - b * m[rank][k];
                }
            }
            rank += 1;
        }
        rank
    }

    fn oracle_betti(n: &CubicalSet, l: &CubicalSet) -> [u64; 3] {
        let bm = relative_complex(n, l).unwrap();
        let r1 = rank_bareiss(&bm.d1.to_dense());
        let r2 = rank_bareiss(&bm.d2.to_dense());
        betti_from_ranks(bm.counts(), r1, r2)
    }

    #[test]
    fn square_rel_boundary() {
        let l = edges(&[bottom(), top(), left(), right()]);
        let h = relative_homology(&square(), &l, Coefficients::Integers).unwrap();
        assert_eq!(h.betti_q, Some([0, 0, 1]));
        assert_eq!(oracle_betti(&square(), &l), [0, 0, 1]);
        assert_eq!(h.euler, 1);
    }

    #[test]
    fn square_rel_one_edge() {
        let l = edges(&[left()]);
        let bm = relative_complex(&square(), &l).unwrap();
        assert_eq!(bm.counts(), [2, 3, 1]);
        let h = relative_homology(&square(), &l, Coefficients::Integers).unwrap();
        assert_eq!(h.betti_q, Some([0, 0, 0]));
        assert_eq!(oracle_betti(&square(), &l), [0, 0, 0]);
        assert!(h.is_trivial());
    }

    #[test]
    fn square_rel_opposite_edges() {
        let l = edges(&[left(), right()]);
        let h = relative_homology(&square(), &l, Coefficients::Integers).unwrap();
        assert_eq!(h.betti_q, Some([0, 1, 0]));
        assert_eq!(oracle_betti(&square(), &l), [0, 1, 0]);
        assert_eq!(h.poincare_poly, vec![0, 1, 0]);
        assert_eq!(h.euler, -1);
        let h2 = relative_homology(&square(), &l, Coefficients::Z2).unwrap();
        assert_eq!(h2.betti_z2, [0, 1, 0]);
        assert_eq!(h2.betti_q, None);
        assert_eq!(h2.torsion, None);
    }

    #[test]
    fn absolute_homology_of_square_and_ring() {
        let empty = CubicalSet::empty(unit(), 0);
        let h = relative_homology(&square(), &empty, Coefficients::Integers).unwrap();
        assert_eq!(h.betti_q, Some([1, 0, 0]));
        let ring = edges(&[bottom(), top(), left(), right()]);
        let h = relative_homology(&ring, &empty, Coefficients::Integers).unwrap();
        assert_eq!(h.betti_q, Some([1, 1, 0]));
        assert_eq!(h.torsion, Some([vec![], vec![], vec![]]));
    }

    #[test]
    fn not_subcomplex() {
        let n = edges(&[left()]);
        let l = edges(&[right()]);
        assert_eq!(relative_homology(&n, &l, Coefficients::Integers), Err(ComplexError::NotSubcomplex));
    }

    #[test]
    fn polynomial_examples() {
        let mk = |b: [u64; 3]| HomologySummary {
            betti_q: Some(b),
            betti_z2: b,
            torsion: None,
            poincare_poly: poincare_coefficients(b),
            euler: 0,
        };
        assert_eq!(poincare_polynomial(&mk([0, 1, 0])), vec![0, 1, 0]);
        assert_eq!(evaluate(&poincare_polynomial(&mk([0, 1, 0])), -1), -1);
        assert_eq!(evaluate(&poincare_polynomial(&mk([1, 0, 0])), -1), 1);
        assert_eq!(evaluate(&poincare_polynomial(&mk([0, 2, 0])), -1), -2);
    }

    #[test]
    fn division_by_one_plus_t() {
        // (1 + t)(2 + 3t) = 2 + 5t + 3t²
        assert_eq!(divide_by_one_plus_t(&[2, 5, 3]), Some(vec![2, 3]));
        assert_eq!(divide_by_one_plus_t(&[1, 1, 0]), Some(vec![1]));
        assert_eq!(divide_by_one_plus_t(&[0, 0, 0]), Some(vec![]));
        assert_eq!(divide_by_one_plus_t(&[1, 0, 0]), None);
        assert_eq!(divide_by_one_plus_t(&[-1, 0, 1]), Some(vec![-1, 1]));
    }

    #[test]
    fn prime_power_split() {
        let v: Vec<BigInt> = [12, 2, 9].iter().map(|&x| BigInt::from(x)).collect();
        let got: Vec<u64> = prime_powers(&v).iter().map(|b| b.to_u64().unwrap()).collect();
        assert_eq!(got, vec![2, 3, 4, 9]);
    }
}
