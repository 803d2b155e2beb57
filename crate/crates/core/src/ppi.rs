//! Power partial isometries: truncated shifts, the defining predicate, and
//! the Toeplitz representation of the shift bimodule over eventually
//! constant sequences that any power partial isometry generates.
//!
//! The bimodule here is `tau(1) c` over the sequence algebra `c`, where
//! `tau` is the forward shift. Eventually constant sequences are enough
//! because the generating projections `V^n V*^n` stabilize at the matrix
//! dimension; head-plus-tail data represents them with finite storage.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::report::{Finding, VerificationReport};
use crate::sparse::{MatrixError, SparseMatrix};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Error)]
pub enum PpiError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("truncated shift needs n >= 1")]
    SizeTooSmall,
    #[error("V^{power} fails the partial-isometry identity (residual {residual:.3e} > {tol:.1e})")]
    NotPowerPartialIsometry {
        power: usize,
        residual: f64,
        tol: f64,
    },
    #[error("the module element must vanish at index 0 (support of tau(1))")]
    SupportViolation,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The truncated shift `J_n` on C^n: `e_k -> e_{k+1}`, `e_{n-1} -> 0`;
/// `J_1 = 0`.
pub fn truncated_shift(n: usize) -> Result<CMatrix, PpiError> {
    if n < 1 {
        return Err(PpiError::SizeTooSmall);
    }
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n - 1 {
        m[(k + 1, k)] = Complex64::ONE;
    }
    Ok(m)
}

/// Direct sum of square matrices.
pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(CMatrix::nrows).sum();
    let mut m = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    m
}

fn op_norm(m: &CMatrix) -> f64 {
    crate::analysis::dense_spectral_norm(m)
}

/// Checks `V^n (V^n)* V^n = V^n` for `1 <= n <= kmax`, stopping early once
/// a power vanishes (all higher powers are then trivially partial
/// isometries).
pub fn is_power_partial_isometry(v: &CMatrix, kmax: usize, tol: f64) -> Result<VerificationReport, PpiError> {
    if v.nrows() != v.ncols() {
        return Err(PpiError::NotSquare(v.nrows(), v.ncols()));
    }
    let mut findings = Vec::new();
    let mut power = v.clone();
    for n in 1..=kmax.max(1) {
        let residual = op_norm(&(&power * power.adjoint() * &power - &power));
        findings.push(Finding::residual(
            format!("partial_isometry_power[{n}]"),
            residual,
            tol,
            format!("V^{n}"),
        ));
        if op_norm(&power) <= tol {
            // nilpotent: nothing further to check
            break;
        }
        if n < kmax {
            power *= v;
        }
    }
    Ok(VerificationReport::with_verdicts(
        findings,
        "power partial isometry",
        "not a power partial isometry",
    ))
}

fn check_ppi_depth(v: &CMatrix, depth: usize, tol: f64) -> Result<(), PpiError> {
    let report = is_power_partial_isometry(v, depth, tol)?;
    if let Some(bad) = report.findings.iter().find(|f| !f.pass) {
        let power = bad
            .name
            .trim_start_matches("partial_isometry_power[")
            .trim_end_matches(']')
            .parse()
            .unwrap_or(0);
        return Err(PpiError::NotPowerPartialIsometry {
            power,
            residual: bad.value,
            tol,
        });
    }
    Ok(())
}

/// An eventually constant complex sequence: explicit head, constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSequence {
    head: Vec<Complex64>,
    tail: Complex64,
}

impl TruncatedSequence {
    pub fn new(head: Vec<Complex64>, tail: Complex64) -> Self {
        TruncatedSequence { head, tail }
    }

    pub fn constant(z: Complex64) -> Self {
        TruncatedSequence { head: Vec::new(), tail: z }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::ONE)
    }

    /// `tau^n(1)`: n zeros, then ones.
    pub fn shifted_one(n: usize) -> Self {
        TruncatedSequence {
            head: vec![Complex64::ZERO; n],
            tail: Complex64::ONE,
        }
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn tail(&self) -> Complex64 {
        self.tail
    }

    pub fn value_at(&self, i: usize) -> Complex64 {
        self.head.get(i).copied().unwrap_or(self.tail)
    }

    /// The forward shift `tau`: prepend a zero.
    pub fn shift(&self) -> Self {
        let mut head = Vec::with_capacity(self.head.len() + 1);
        head.push(Complex64::ZERO);
        head.extend_from_slice(&self.head);
        TruncatedSequence { head, tail: self.tail }
    }

    pub fn pointwise_mul(&self, rhs: &TruncatedSequence) -> Self {
        let len = self.head.len().max(rhs.head.len());
        TruncatedSequence {
            head: (0..len).map(|i| self.value_at(i) * rhs.value_at(i)).collect(),
            tail: self.tail * rhs.tail,
        }
    }

    pub fn conj(&self) -> Self {
        TruncatedSequence {
            head: self.head.iter().map(Complex64::conj).collect(),
            tail: self.tail.conj(),
        }
    }

    /// Vanishes at index 0, i.e. lies in the module `tau(1) c`.
    pub fn in_shift_module(&self) -> bool {
        self.value_at(0) == Complex64::ZERO
    }
}

/// The unital homomorphism sending a sequence to the spectral combination
/// of the decreasing projections `V^n V*^n`:
/// `pi_V(a) = sum_{n < L} a_n (V^n V*^n - V^{n+1} V*^{n+1}) + tail V^L V*^L`.
pub fn sequence_rep(
    v: &CMatrix,
    a: &TruncatedSequence,
    tol: f64,
) -> Result<CMatrix, PpiError> {
    if v.nrows() != v.ncols() {
        return Err(PpiError::NotSquare(v.nrows(), v.ncols()));
    }
    let depth = a.head_len();
    // constants need no powers at all; otherwise V must be a power
    // partial isometry up to the head length
    if depth > 0 {
        check_ppi_depth(v, depth, tol)?;
    }
    let n = v.nrows();
    let mut out = CMatrix::zeros(n, n);
    // range projections V^k V*^k, k = 0..=L
    let mut power = CMatrix::identity(n, n);
    let mut range_proj = Vec::with_capacity(depth + 2);
    range_proj.push(CMatrix::identity(n, n));
    for _ in 0..depth {
        power *= v;
        range_proj.push(&power * power.adjoint());
    }
    for k in 0..depth {
        let gap = &range_proj[k] - &range_proj[k + 1];
        out += gap * a.value_at(k);
    }
    out += &range_proj[depth] * a.tail;
    Ok(out)
}

/// The module half of the representation: `psi_V(x) = V* pi_V(x)` for `x`
/// supported in `tau(1) c`.
pub fn module_rep(v: &CMatrix, x: &TruncatedSequence, tol: f64) -> Result<CMatrix, PpiError> {
    if !x.in_shift_module() {
        return Err(PpiError::SupportViolation);
    }
    Ok(v.adjoint() * sequence_rep(v, x, tol)?)
}

/// Full relation check for the representation generated by `V`: the three
/// Toeplitz-representation identities on a generating set of sequences,
/// plus pairwise commutation of the range and initial projections of the
/// powers of `V`. Refuses non power partial isometries.
pub fn verify_ppi_rep(v: &CMatrix, tol: f64) -> Result<VerificationReport, PpiError> {
    if v.nrows() != v.ncols() {
        return Err(PpiError::NotSquare(v.nrows(), v.ncols()));
    }
    let dim = v.nrows();
    let ppi = is_power_partial_isometry(v, dim, tol)?;
    if !ppi.passed() {
        return Ok(VerificationReport::refused(
            ppi.findings,
            "refused: not a power partial isometry",
        ));
    }
    let mut findings = ppi.findings;

    // commuting family: range projections V^n V*^n and initial projections
    // V*^m V^m for 0 <= n, m <= dim
    let mut range_proj = vec![CMatrix::identity(dim, dim)];
    let mut init_proj = vec![CMatrix::identity(dim, dim)];
    let mut power = CMatrix::identity(dim, dim);
    for _ in 0..dim {
        power *= v;
        range_proj.push(&power * power.adjoint());
        init_proj.push(power.adjoint() * &power);
    }
    let mut worst = (0.0f64, String::new());
    for (i, p) in range_proj.iter().chain(init_proj.iter()).enumerate() {
        for (j, q) in range_proj.iter().chain(init_proj.iter()).enumerate() {
            if j <= i {
                continue;
            }
            let comm = op_norm(&(p * q - q * p));
            if comm > worst.0 {
                worst = (comm, format!("pair ({i},{j}) in the projection list"));
            }
        }
    }
    findings.push(Finding::residual(
        "projection_family_commutes",
        worst.0,
        tol,
        if worst.1.is_empty() { "all pairs".into() } else { worst.1 },
    ));

    // decreasing range projections
    let mut monotone = 0.0f64;
    for k in 0..dim {
        let gap = &range_proj[k] - &range_proj[k + 1];
        let herm = (&gap + gap.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eig = nalgebra::SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        monotone = monotone.max((-min_eig).max(0.0));
    }
    findings.push(Finding::residual(
        "range_projections_decreasing",
        monotone,
        tol,
        "V^n V*^n >= V^{n+1} V*^{n+1}",
    ));

    // the three representation identities on a generating set
    let generators: Vec<TruncatedSequence> = (0..=dim).map(TruncatedSequence::shifted_one).collect();
    let module_gens: Vec<TruncatedSequence> =
        (1..=dim).map(TruncatedSequence::shifted_one).collect();

    let mut right_action = 0.0f64; // psi(x . a) = psi(x) pi(a)
    let mut inner_product = 0.0f64; // psi(x)* psi(y) = pi(<x,y>)
    let mut left_action = 0.0f64; // psi(a . x) = pi(a) psi(x)
    for x in &module_gens {
        let psi_x = module_rep(v, x, tol)?;
        for a in &generators {
            let xa = x.pointwise_mul(a);
            let lhs = module_rep(v, &xa, tol)?;
            let rhs = &psi_x * sequence_rep(v, a, tol)?;
            right_action = right_action.max(op_norm(&(lhs - rhs)));

            let ax = a.shift().pointwise_mul(x);
            let lhs = module_rep(v, &ax, tol)?;
            let rhs = sequence_rep(v, a, tol)? * &psi_x;
            left_action = left_action.max(op_norm(&(lhs - rhs)));
        }
        for y in &module_gens {
            let psi_y = module_rep(v, y, tol)?;
            let lhs = psi_x.adjoint() * &psi_y;
            let rhs = sequence_rep(v, &x.conj().pointwise_mul(y), tol)?;
            inner_product = inner_product.max(op_norm(&(lhs - rhs)));
        }
    }
    findings.push(Finding::residual(
        "right_module_action",
        right_action,
        tol,
        "psi(x.a) = psi(x) pi(a)",
    ));
    findings.push(Finding::residual(
        "inner_product",
        inner_product,
        tol,
        "psi(x)* psi(y) = pi(<x,y>)",
    ));
    findings.push(Finding::residual(
        "left_module_action",
        left_action,
        tol,
        "psi(a.x) = pi(a) psi(x)",
    ));

    Ok(VerificationReport::new(findings))
}

// --- dense matrix text format ---------------------------------------------
//
// `dense <n>` header, then n rows of n whitespace-separated `re,im` pairs.

pub fn write_dense(m: &CMatrix) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "dense {}", m.nrows()).unwrap();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{},{}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn parse_dense(text: &str) -> Result<CMatrix, PpiError> {
    let err = |line: usize, message: String| PpiError::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(0, "empty matrix file".into()))?;
    let n: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dense", n] => n
            .parse()
            .map_err(|_| err(hline, format!("bad size `{n}`")))?,
        _ => return Err(err(hline, format!("expected `dense <n>`, got `{header}`"))),
    };
    let mut m = CMatrix::zeros(n, n);
    let mut row = 0;
    for (line, l) in lines {
        if row >= n {
            return Err(err(line, "too many rows".into()));
        }
        let entries: Vec<&str> = l.split_whitespace().collect();
        if entries.len() != n {
            return Err(err(line, format!("expected {n} entries, got {}", entries.len())));
        }
        for (c, entry) in entries.iter().enumerate() {
            let (re, im) = entry
                .split_once(',')
                .ok_or_else(|| err(line, format!("expected `re,im`, got `{entry}`")))?;
            let re: f64 = re
                .parse()
                .map_err(|_| err(line, format!("bad float `{re}`")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| err(line, format!("bad float `{im}`")))?;
            m[(row, c)] = Complex64::new(re, im);
        }
        row += 1;
    }
    if row != n {
        return Err(err(0, format!("expected {n} rows, found {row}")));
    }
    Ok(m)
}

/// Accept either the dense format or the sparse exchange format.
pub fn parse_matrix_any(text: &str) -> Result<CMatrix, PpiError> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("matrix") {
        let sparse = SparseMatrix::parse_text(text)?;
        if sparse.rows() != sparse.cols() {
            return Err(PpiError::NotSquare(sparse.rows(), sparse.cols()));
        }
        Ok(sparse.to_dense())
    } else {
        parse_dense(text)
    }
}
