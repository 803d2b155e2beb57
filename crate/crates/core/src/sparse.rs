//! Minimal sparse complex matrices in canonical triplet form, plus the
//! text exchange format. Desk-scale only: everything is exact bookkeeping
//! over `Complex64`, dense conversion happens at the norm boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: ({0}x{1}) vs ({2}x{3})")]
    DimMismatch(usize, usize, usize, usize),
    #[error("triplet ({0},{1}) out of bounds for a {2}x{3} matrix")]
    OutOfBounds(usize, usize, usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Sparse matrix with sorted row-major triplets and no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            triplets: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            triplets: (0..n).map(|i| (i, i, Complex64::ONE)).collect(),
        }
    }

    /// Diagonal 0/1 projection onto the selected indices.
    pub fn diagonal_indicator(n: usize, selected: impl Iterator<Item = usize>) -> Self {
        let mut idx: Vec<usize> = selected.collect();
        idx.sort_unstable();
        idx.dedup();
        SparseMatrix {
            rows: n,
            cols: n,
            triplets: idx.into_iter().map(|i| (i, i, Complex64::ONE)).collect(),
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        SparseMatrix {
            rows: n,
            cols: n,
            triplets: values
                .iter()
                .enumerate()
                .filter(|(_, z)| **z != Complex64::ZERO)
                .map(|(i, z)| (i, i, *z))
                .collect(),
        }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self, MatrixError> {
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, z) in triplets {
            if r >= rows || c >= cols {
                return Err(MatrixError::OutOfBounds(r, c, rows, cols));
            }
            *acc.entry((r, c)).or_insert(Complex64::ZERO) += z;
        }
        Ok(SparseMatrix {
            rows,
            cols,
            triplets: acc
                .into_iter()
                .filter(|(_, z)| *z != Complex64::ZERO)
                .map(|((r, c), z)| (r, c, z))
                .collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, Complex64)] {
        &self.triplets
    }

    pub fn is_zero(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.triplets
            .binary_search_by_key(&(r, c), |&(tr, tc, _)| (tr, tc))
            .map(|i| self.triplets[i].2)
            .unwrap_or(Complex64::ZERO)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        if z == Complex64::ZERO {
            return SparseMatrix::zero(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            triplets: self.triplets.iter().map(|&(r, c, v)| (r, c, v * z)).collect(),
        }
    }

    pub fn add(&self, rhs: &SparseMatrix) -> Result<Self, MatrixError> {
        self.check_same_dims(rhs)?;
        SparseMatrix::from_triplets(
            self.rows,
            self.cols,
            self.triplets.iter().chain(rhs.triplets.iter()).copied(),
        )
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> Result<Self, MatrixError> {
        self.add(&rhs.scale(-Complex64::ONE))
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimMismatch(
                self.rows, self.cols, rhs.rows, rhs.cols,
            ));
        }
        // row index for the right factor
        let mut rhs_rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); rhs.rows];
        for &(r, c, z) in &rhs.triplets {
            rhs_rows[r].push((c, z));
        }
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for &(i, k, a) in &self.triplets {
            for &(j, b) in &rhs_rows[k] {
                *acc.entry((i, j)).or_insert(Complex64::ZERO) += a * b;
            }
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            triplets: acc
                .into_iter()
                .filter(|(_, z)| *z != Complex64::ZERO)
                .map(|((r, c), z)| (r, c, z))
                .collect(),
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut triplets: Vec<(usize, usize, Complex64)> = self
            .triplets
            .iter()
            .map(|&(r, c, z)| (c, r, z.conj()))
            .collect();
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            triplets,
        }
    }

    /// Conjugation `D M D*` by a diagonal matrix given entrywise.
    pub fn conjugate_by_diagonal(&self, diag: &[Complex64]) -> Self {
        assert_eq!(diag.len(), self.rows);
        assert_eq!(self.rows, self.cols);
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            triplets: self
                .triplets
                .iter()
                .map(|&(r, c, z)| (r, c, diag[r] * z * diag[c].conj()))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets
            .iter()
            .map(|(_, _, z)| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude restricted to the given row/column sets.
    pub fn max_abs_where(
        &self,
        row_ok: impl Fn(usize) -> bool,
        col_ok: impl Fn(usize) -> bool,
    ) -> f64 {
        self.triplets
            .iter()
            .filter(|(r, c, _)| row_ok(*r) && col_ok(*c))
            .map(|(_, _, z)| z.norm())
            .fold(0.0, f64::max)
    }

    /// Index of the largest entry, if any.
    pub fn argmax_abs(&self) -> Option<(usize, usize)> {
        self.triplets
            .iter()
            .max_by(|a, b| a.2.norm().total_cmp(&b.2.norm()))
            .map(|&(r, c, _)| (r, c))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, z) in &self.triplets {
            m[(r, c)] += z;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != Complex64::ZERO {
                    triplets.push((r, c, m[(r, c)]));
                }
            }
        }
        SparseMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            triplets,
        }
    }

    /// Apply to a dense vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex64::ZERO; self.rows];
        for &(r, c, z) in &self.triplets {
            y[r] += z * x[c];
        }
        y
    }

    /// Apply the adjoint to a dense vector.
    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![Complex64::ZERO; self.cols];
        for &(r, c, z) in &self.triplets {
            y[c] += z.conj() * x[r];
        }
        y
    }

    fn check_same_dims(&self, rhs: &SparseMatrix) -> Result<(), MatrixError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            Err(MatrixError::DimMismatch(
                self.rows, self.cols, rhs.rows, rhs.cols,
            ))
        } else {
            Ok(())
        }
    }

    // --- text exchange format -----------------------------------------
    //
    // `matrix <rows> <cols> <nnz>` header, then one `<row> <col> <re> <im>`
    // triplet per line, 0-based, sorted row-major.

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "matrix {} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for &(r, c, z) in &self.triplets {
            writeln!(out, "{} {} {} {}", r, c, z.re, z.im).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let err = |line: usize, message: String| MatrixError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(0, "empty matrix file".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let [kw, rows, cols, nnz] = toks.as_slice() else {
            return Err(err(hline, format!("bad header `{header}`")));
        };
        if *kw != "matrix" {
            return Err(err(hline, format!("expected `matrix` header, got `{kw}`")));
        }
        let parse_usize = |s: &str, line: usize| {
            s.parse::<usize>()
                .map_err(|_| err(line, format!("bad integer `{s}`")))
        };
        let rows = parse_usize(rows, hline)?;
        let cols = parse_usize(cols, hline)?;
        let nnz = parse_usize(nnz, hline)?;
        let mut triplets = Vec::with_capacity(nnz);
        for (line, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [r, c, re, im] = toks.as_slice() else {
                return Err(err(line, format!("bad triplet `{l}`")));
            };
            let r = parse_usize(r, line)?;
            let c = parse_usize(c, line)?;
            let re: f64 = re
                .parse()
                .map_err(|_| err(line, format!("bad float `{re}`")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| err(line, format!("bad float `{im}`")))?;
            triplets.push((r, c, Complex64::new(re, im)));
        }
        if triplets.len() != nnz {
            return Err(err(
                0,
                format!("header promises {nnz} triplets, found {}", triplets.len()),
            ));
        }
        SparseMatrix::from_triplets(rows, cols, triplets)
    }
}
