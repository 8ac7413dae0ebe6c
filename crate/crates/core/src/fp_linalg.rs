//! Exact sparse linear algebra over F_p.
//!
//! Matrices are stored as sorted sparse rows. Elimination works row by row
//! against a table of pivot rows, so fill-in only costs what it touches.
//! Reduced row echelon form is unique, so `pivot_cols` is deterministic no
//! matter which order rows are processed in.

use std::collections::HashMap;

use thiserror::Error;

use crate::arith::Prime;

/// Sparse vector: `(index, nonzero residue)` pairs sorted by index.
pub type SparseVec = Vec<(u32, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReduction {
    pub reduced: FpMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// `v - c * w` for sparse vectors.
pub fn axpy_sub(p: Prime, v: &[(u32, u32)], c: u32, w: &[(u32, u32)]) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j == w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i]);
            i += 1;
        } else if i == v.len() || w[j].0 < v[i].0 {
            out.push((w[j].0, p.neg(p.mul(c, w[j].1))));
            j += 1;
        } else {
            let x = p.sub(v[i].1, p.mul(c, w[j].1));
            if x != 0 {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale(p: Prime, v: &mut [(u32, u32)], c: u32) {
    for e in v.iter_mut() {
        e.1 = p.mul(e.1, c);
    }
}

/// Echelon form built by inserting rows one at a time.
///
/// Every stored row has a leading 1 at its pivot column and no entries before
/// it. Rows are not reduced above other pivots until [`Echelon::into_rref`].
struct Echelon {
    p: Prime,
    pivot_of_col: HashMap<u32, usize>,
    rows: Vec<SparseVec>,
}

impl Echelon {
    fn new(p: Prime) -> Self {
        Echelon {
            p,
            pivot_of_col: HashMap::new(),
            rows: Vec::new(),
        }
    }

    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut idx = 0;
        while idx < v.len() {
            let (c, val) = v[idx];
            match self.pivot_of_col.get(&c) {
                Some(&r) => v = axpy_sub(self.p, &v, val, &self.rows[r]),
                None => idx += 1,
            }
        }
        v
    }

    fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = self.reduce(v);
        if v.is_empty() {
            return false;
        }
        let lead = v[0].1;
        scale(self.p, &mut v, self.p.inv(lead));
        self.pivot_of_col.insert(v[0].0, self.rows.len());
        self.rows.push(v);
        true
    }

    fn into_rref(self) -> Vec<SparseVec> {
        let p = self.p;
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.rows[r][0].0);
        let mut pivot_of_col: HashMap<u32, usize> = HashMap::new();
        let mut done: Vec<SparseVec> = vec![Vec::new(); self.rows.len()];
        let mut rows = self.rows;
        // Back-substitute from the last pivot up; rows below are already reduced.
        for &r in order.iter().rev() {
            let mut v = std::mem::take(&mut rows[r]);
            let mut idx = 1;
            while idx < v.len() {
                let (c, val) = v[idx];
                match pivot_of_col.get(&c) {
                    Some(&q) => v = axpy_sub(p, &v, val, &done[q]),
                    None => idx += 1,
                }
            }
            pivot_of_col.insert(v[0].0, r);
            done[r] = v;
        }
        order.into_iter().map(|r| std::mem::take(&mut done[r])).collect()
    }
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        FpMatrix {
            p,
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i as u32, 1)]).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions are
    /// summed and values are reduced mod p.
    pub fn from_triplets<I>(p: Prime, rows: usize, cols: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut acc: Vec<HashMap<u32, u32>> = vec![HashMap::new(); rows];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            let e = acc[r].entry(c as u32).or_insert(0);
            *e = p.add(*e, p.reduce(v));
        }
        let data = acc
            .into_iter()
            .map(|m| {
                let mut row: SparseVec = m.into_iter().filter(|&(_, v)| v != 0).collect();
                row.sort_unstable();
                row
            })
            .collect();
        Ok(FpMatrix { p, rows, cols, data })
    }

    /// Builds a matrix from already-sorted sparse rows.
    pub fn from_sparse_rows(p: Prime, cols: usize, data: Vec<SparseVec>) -> Result<Self, LinalgError> {
        for (r, row) in data.iter().enumerate() {
            if let Some(&(c, _)) = row.last() {
                if c as usize >= cols {
                    return Err(LinalgError::OutOfRange {
                        row: r,
                        col: c as usize,
                        rows: data.len(),
                        cols,
                    });
                }
            }
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(row.iter().all(|&(_, v)| v != 0 && v < p.get()));
        }
        Ok(FpMatrix {
            p,
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn from_dense(p: Prime, dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, |r| r.len());
        let data = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                r.iter()
                    .enumerate()
                    .filter_map(|(c, &v)| {
                        let x = p.reduce(v);
                        (x != 0).then_some((c as u32, x))
                    })
                    .collect()
            })
            .collect();
        FpMatrix { p, rows, cols, data }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(u32, u32)] {
        &self.data[r]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r]
            .binary_search_by_key(&(c as u32), |e| e.0)
            .map_or(0, |i| self.data[r][i].1)
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.data
            .iter()
            .map(|row| {
                let mut d = vec![0; self.cols];
                for &(c, v) in row {
                    d[c as usize] = v;
                }
                d
            })
            .collect()
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut data = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for &(c, v) in row {
                data[c as usize].push((r as u32, v));
            }
        }
        FpMatrix {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Concatenates columns: `[self | other]`.
    pub fn hstack(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_modulus(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let off = self.cols as u32;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&(c, v)| (c + off, v))).collect())
            .collect();
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    fn check_modulus(&self, other: &FpMatrix) -> Result<(), LinalgError> {
        if self.p != other.p {
            return Err(LinalgError::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let p = self.p;
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(0, |acc, &(c, v)| p.add(acc, p.mul(v, x[c as usize] % p.get())))
            })
            .collect())
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_modulus(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let p = self.p;
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: HashMap<u32, u32> = HashMap::new();
                for &(k, a) in row {
                    for &(c, b) in &other.data[k as usize] {
                        let e = acc.entry(c).or_insert(0);
                        *e = p.add(*e, p.mul(a, b));
                    }
                }
                let mut out: SparseVec = acc.into_iter().filter(|&(_, v)| v != 0).collect();
                out.sort_unstable();
                out
            })
            .collect();
        Ok(FpMatrix {
            p,
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Reduced row echelon form, rank, and pivot columns in increasing order.
    pub fn row_reduce(&self) -> RowReduction {
        let mut ech = Echelon::new(self.p);
        for row in &self.data {
            ech.insert(row.clone());
        }
        let rref = ech.into_rref();
        let rank = rref.len();
        let pivot_cols = rref.iter().map(|r| r[0].0 as usize).collect();
        let mut data = rref;
        data.resize(self.rows, Vec::new());
        RowReduction {
            reduced: FpMatrix {
                p: self.p,
                rows: self.rows,
                cols: self.cols,
                data,
            },
            rank,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.p);
        self.data.iter().filter(|row| ech.insert((*row).clone())).count()
    }

    /// Basis of the right kernel `{x : self * x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let red = self.row_reduce();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &red.pivot_cols {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = vec![0u32; self.cols];
                x[f] = 1;
                for (i, &pc) in red.pivot_cols.iter().enumerate() {
                    let v = red.reduced.get(i, f);
                    x[pc] = p.neg(v);
                }
                x
            })
            .collect()
    }

    /// Whether `v` lies in the column span. On success returns `x` with
    /// `self * x = v`; free variables are set to zero.
    pub fn in_column_span(&self, v: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let p = self.p;
        let aug_col = self.cols as u32;
        let mut ech = Echelon::new(p);
        for (r, row) in self.data.iter().enumerate() {
            let mut aug = row.clone();
            let x = v[r] % p.get();
            if x != 0 {
                aug.push((aug_col, x));
            }
            ech.insert(aug);
        }
        let rref = ech.into_rref();
        let mut x = vec![0u32; self.cols];
        for row in &rref {
            let lead = row[0].0;
            if lead == aug_col {
                return Ok(None);
            }
            if let Some(&(c, val)) = row.last() {
                if c == aug_col {
                    x[lead as usize] = val;
                }
            }
        }
        Ok(Some(x))
    }
}

/// Incrementally grown column space with combination tracking.
///
/// Columns are added one at a time; [`ColumnSpan::solve`] expresses a target
/// in terms of the columns added so far. Used where the full matrix is too
/// large to assemble at once.
#[derive(Debug, Clone)]
pub struct ColumnSpan {
    p: Prime,
    pivot_of_row: HashMap<u32, usize>,
    basis: Vec<(SparseVec, SparseVec)>,
    added: usize,
}

impl ColumnSpan {
    pub fn new(p: Prime) -> Self {
        ColumnSpan {
            p,
            pivot_of_row: HashMap::new(),
            basis: Vec::new(),
            added: 0,
        }
    }

    pub fn columns_added(&self) -> usize {
        self.added
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn reduce(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        let p = self.p;
        let mut idx = 0;
        while idx < v.len() {
            let (r, val) = v[idx];
            match self.pivot_of_row.get(&r) {
                Some(&b) => {
                    let (w, wc) = &self.basis[b];
                    v = axpy_sub(p, &v, val, w);
                    combo = axpy_sub(p, &combo, val, wc);
                }
                None => idx += 1,
            }
        }
        (v, combo)
    }

    /// Adds the next column; returns whether it was independent of earlier ones.
    pub fn add_column(&mut self, column: SparseVec) -> bool {
        let id = self.added as u32;
        self.added += 1;
        let (mut v, mut combo) = self.reduce(column, vec![(id, 1)]);
        if v.is_empty() {
            return false;
        }
        let inv = self.p.inv(v[0].1);
        scale(self.p, &mut v, inv);
        scale(self.p, &mut combo, inv);
        self.pivot_of_row.insert(v[0].0, self.basis.len());
        self.basis.push((v, combo));
        true
    }

    /// Coefficients `x` (sparse, by column index) with `Σ x_j col_j = target`.
    pub fn solve(&self, target: SparseVec) -> Option<SparseVec> {
        let p = self.p;
        let idx = 0;
        let mut v = target;
        let mut combo: SparseVec = Vec::new();
        while idx < v.len() {
            let (r, val) = v[idx];
            match self.pivot_of_row.get(&r) {
                Some(&b) => {
                    let (w, wc) = &self.basis[b];
                    v = axpy_sub(p, &v, val, w);
                    combo = axpy_sub(p, &combo, p.neg(val), wc);
                }
                None => return None,
            }
        }
        Some(combo)
    }
}
