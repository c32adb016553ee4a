use nalgebra::DMatrix;

use crate::exec::{fill_rows, Exec};

/// Sparse symmetric matrix.
///
/// The strict upper triangle is kept once as coordinate-sorted triplets next
/// to a dense diagonal; a row-compressed expansion of both triangles is built
/// at construction and used by [`SymSparse::matvec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymSparse {
    n: usize,
    diag: Vec<f64>,
    upper: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymSparse {
    /// `upper` entries must satisfy `i < j < n`; repeated coordinates are summed.
    pub fn new(n: usize, diag: Vec<f64>, mut upper: Vec<(usize, usize, f64)>) -> Self {
        assert_eq!(diag.len(), n, "diagonal length");
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            assert!(i < j && j < n, "upper-triangle entry ({i}, {j}) invalid for n = {n}");
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }

        let mut counts = vec![0usize; n];
        for &(i, j, _) in &merged {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let mut fill = row_ptr.clone();
        let mut cols = vec![0usize; row_ptr[n]];
        let mut vals = vec![0.0; row_ptr[n]];
        // Row r receives its lower entries (col < r) in increasing col, then its
        // upper entries in increasing col, so each row is column-sorted.
        for &(i, j, v) in &merged {
            cols[fill[j]] = i;
            vals[fill[j]] = v;
            fill[j] += 1;
        }
        for &(i, j, v) in &merged {
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
        }

        Self {
            n,
            diag,
            upper: merged,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(n, vec![0.0; n], Vec::new())
    }

    /// Build from a dense symmetric matrix, keeping exact nonzeros of the upper
    /// triangle.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let mut upper = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = m[(i, j)];
                if v != 0.0 {
                    upper.push((i, j, v));
                }
            }
        }
        Self::new(n, diag, upper)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Strict upper triangle, sorted by (row, column).
    pub fn upper(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    /// Number of stored off-diagonal pairs.
    pub fn offdiag_pairs(&self) -> usize {
        self.upper.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[a..b].binary_search(&j) {
            Ok(k) => self.vals[a + k],
            Err(_) => 0.0,
        }
    }

    /// `alpha * self + beta * I`, sharing the sparsity pattern plus the full
    /// diagonal.
    pub fn affine(&self, alpha: f64, beta: f64) -> Self {
        let mut out = self.clone();
        for d in &mut out.diag {
            *d = alpha * *d + beta;
        }
        for e in &mut out.upper {
            e.2 *= alpha;
        }
        for v in &mut out.vals {
            *v *= alpha;
        }
        out
    }

    /// `out = self * x`.
    pub fn matvec_into(&self, exec: Exec, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        fill_rows(exec, out, |i| self.row_dot(i, x));
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(Exec::default(), x, &mut out);
        out
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = self.diag[i] * x[i];
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            acc += self.vals[k] * x[self.cols[k]];
        }
        acc
    }

    /// `‖row_i‖_1` maximized over rows (Gershgorin radius plus diagonal).
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let off: f64 = self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum();
                self.diag[i] + off
            })
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.diag.iter().all(|&d| d == 0.0) && self.upper.iter().all(|e| e.2 == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = self.diag[i];
        }
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }
}
