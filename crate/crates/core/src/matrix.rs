/// Column-sparse integer matrix. Entries are kept sorted by row within each
/// column and zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for k in 0..n {
            m.set(k, k, 1);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.cols[c].binary_search_by_key(&r, |&(row, _)| row) {
            Ok(k) => self.cols[c][k].1,
            Err(_) => 0,
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.nrows, "row {r} out of range");
        let col = &mut self.cols[c];
        match col.binary_search_by_key(&r, |&(row, _)| row) {
            Ok(k) if v == 0 => {
                col.remove(k);
            }
            Ok(k) => col[k].1 = v,
            Err(_) if v == 0 => {}
            Err(k) => col.insert(k, (r, v)),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.ncols()]; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                out[r][c] = v;
            }
        }
        out
    }

    /// `self · rhs`; panics on overflow or shape mismatch.
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "shape mismatch");
        let mut out = IntMatrix::zeros(self.nrows, rhs.ncols());
        let mut acc = vec![0i64; self.nrows];
        for (c, rcol) in rhs.cols.iter().enumerate() {
            acc.iter_mut().for_each(|a| *a = 0);
            for &(k, b) in rcol {
                for &(r, a) in &self.cols[k] {
                    let t = a.checked_mul(b).expect("overflow in matrix product");
                    acc[r] = acc[r].checked_add(t).expect("overflow in matrix product");
                }
            }
            out.cols[c] = acc
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(r, &v)| (r, v))
                .collect();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_product() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![0, -1], vec![3, 0]]);
        let b = IntMatrix::from_dense(&[vec![2, 0, 1], vec![1, 1, 0]]);
        assert_eq!(a.to_dense(), vec![vec![1, 2], vec![0, -1], vec![3, 0]]);
        assert_eq!(
            a.mul(&b).to_dense(),
            vec![vec![4, 2, 1], vec![-1, -1, 0], vec![6, 0, 3]]
        );
        assert_eq!(a.nnz(), 4);
    }

    #[test]
    fn setting_zero_removes_entry() {
        let mut m = IntMatrix::identity(2);
        m.set(0, 0, 0);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 0);
        assert_eq!(m.get(1, 1), 1);
    }
}
