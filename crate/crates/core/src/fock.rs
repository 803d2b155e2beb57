//! Truncated Fock representation of the edge bimodule: sparse matrices for
//! the creation operators `S_f` and vertex projections `P_v` over the basis
//! of paths of length at most `N`, together with the projection families
//! and gauge unitaries that drive the norm and partition arguments.
//!
//! Truncation is compression to levels `<= N`: every operator is cut to the
//! finite path space. The left-action, right-module, and range-bound
//! relations survive compression globally; the inner-product relation
//! `S_f* S_f = P_{dst f}` holds on levels `<= N-1` and fails at the top
//! level, which the verifier reports rather than hides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{DirectedGraph, EdgeId, GraphError, VertexId};
use crate::report::{Finding, VerificationReport};
use crate::sparse::{MatrixError, SparseMatrix};
use crate::staralg::StarPolynomial;
use crate::words::{enumerate_paths, GraphPath, PathError, Word};

#[derive(Debug, Error)]
pub enum FockError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("depth must be at least 1")]
    DepthTooSmall,
    #[error("level {0} out of range (depth {1})")]
    LevelOutOfRange(usize, usize),
    #[error("word `{0}` longer than the truncation depth {1}")]
    WordTooLong(Word, usize),
    #[error("the projection family requires the identity word in the index set")]
    MissingIdentity,
    #[error("word `{0}` is not in the index set")]
    NotInIndexSet(Word),
    #[error("operands live over different graphs")]
    GraphMismatch,
    #[error("|z| must be 1 within 1e-12, got {0}")]
    NotUnitModulus(f64),
    #[error("polynomial is not supported on the edge generators")]
    NotEdgeSpan,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("import: {0}")]
    Import(String),
}

/// Ordered path basis, grouped by level 0..=N.
#[derive(Debug, Clone)]
pub struct FockBasis {
    levels: Vec<Vec<GraphPath>>,
    index: BTreeMap<GraphPath, usize>,
    offsets: Vec<usize>,
}

impl FockBasis {
    fn new(levels: Vec<Vec<GraphPath>>) -> Self {
        let mut index = BTreeMap::new();
        let mut offsets = Vec::with_capacity(levels.len() + 1);
        let mut pos = 0;
        for level in &levels {
            offsets.push(pos);
            for p in level {
                index.insert(p.clone(), pos);
                pos += 1;
            }
        }
        offsets.push(pos);
        FockBasis {
            levels,
            index,
            offsets,
        }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<GraphPath>] {
        &self.levels
    }

    pub fn index_of(&self, p: &GraphPath) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn path_at(&self, i: usize) -> &GraphPath {
        let lvl = self.level_of(i);
        &self.levels[lvl][i - self.offsets[lvl]]
    }

    /// Level of the basis vector at position `i`.
    pub fn level_of(&self, i: usize) -> usize {
        debug_assert!(i < self.dim());
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    /// Basis positions of the given level.
    pub fn level_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &GraphPath)> {
        self.levels
            .iter()
            .flatten()
            .enumerate()
    }
}

/// Depth-N compression of the Fock representation on the path basis.
#[derive(Debug, Clone)]
pub struct TruncatedFockRep {
    graph: Arc<DirectedGraph>,
    depth: usize,
    basis: FockBasis,
    creation: BTreeMap<EdgeId, SparseMatrix>,
    vertex_proj: BTreeMap<VertexId, SparseMatrix>,
}

impl TruncatedFockRep {
    /// Build the representation: `S_f` prepends `f` to paths starting at
    /// `dst(f)` on levels `< N` and kills level `N`; `P_v` is the diagonal
    /// indicator of paths with source `v`.
    pub fn build(graph: &Arc<DirectedGraph>, depth: usize) -> Result<Self, FockError> {
        if depth < 1 {
            return Err(FockError::DepthTooSmall);
        }
        let basis = FockBasis::new(enumerate_paths(graph, depth)?);
        let dim = basis.dim();

        let mut creation = BTreeMap::new();
        for f in graph.edge_ids() {
            let mut triplets = Vec::new();
            for (i, p) in basis.iter() {
                if p.len() < depth {
                    if let Some(q) = p.prepend(f) {
                        let j = basis.index_of(&q).expect("prepended path is in the basis");
                        triplets.push((j, i, Complex64::ONE));
                    }
                }
            }
            creation.insert(f.clone(), SparseMatrix::from_triplets(dim, dim, triplets)?);
        }

        let mut vertex_proj = BTreeMap::new();
        for v in graph.vertices() {
            let selected = basis
                .iter()
                .filter(|(_, p)| p.source() == v)
                .map(|(i, _)| i);
            vertex_proj.insert(v.clone(), SparseMatrix::diagonal_indicator(dim, selected));
        }

        Ok(TruncatedFockRep {
            graph: Arc::clone(graph),
            depth,
            basis,
            creation,
            vertex_proj,
        })
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn creation(&self, f: &EdgeId) -> Result<&SparseMatrix, FockError> {
        self.creation
            .get(f)
            .ok_or_else(|| GraphError::UnknownEdge(f.as_str().into()).into())
    }

    pub fn vertex_projection(&self, v: &VertexId) -> Result<&SparseMatrix, FockError> {
        self.vertex_proj
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.as_str().into()).into())
    }

    /// Matrix of a path monomial factor: the product of creation matrices
    /// along the path, or the vertex projection for an empty path.
    fn path_matrix(&self, p: &GraphPath) -> Result<SparseMatrix, FockError> {
        if p.is_vertex() {
            return Ok(self.vertex_projection(p.source())?.clone());
        }
        let mut m: Option<SparseMatrix> = None;
        for f in p.edges() {
            let s = self.creation(f)?;
            m = Some(match m {
                None => s.clone(),
                Some(acc) => acc.mul(s)?,
            });
        }
        Ok(m.expect("nonempty path"))
    }

    /// Linear extension of `s_f -> S_f`, `p_v -> P_v`; each monomial is the
    /// matrix product of its two normalized factors.
    pub fn represent(&self, poly: &StarPolynomial) -> Result<SparseMatrix, FockError> {
        if !(Arc::ptr_eq(&self.graph, poly.graph()) || *self.graph == **poly.graph()) {
            return Err(FockError::GraphMismatch);
        }
        let dim = self.dim();
        let mut out = SparseMatrix::zero(dim, dim);
        for (m, c) in poly.terms() {
            let mu = self.path_matrix(m.mu())?;
            let nu = self.path_matrix(m.nu())?;
            let term = mu.mul(&nu.adjoint())?;
            out = out.add(&term.scale(c.to_complex()))?;
        }
        Ok(out)
    }

    /// Projection onto levels `>= k`; `k = N+1` gives zero.
    pub fn level_projection(&self, k: usize) -> Result<SparseMatrix, FockError> {
        if k > self.depth + 1 {
            return Err(FockError::LevelOutOfRange(k, self.depth));
        }
        let dim = self.dim();
        Ok(SparseMatrix::diagonal_indicator(
            dim,
            (0..dim).filter(|&i| self.basis.level_of(i) >= k),
        ))
    }

    /// Projection onto basis paths having the word as a prefix.
    pub fn word_projection(&self, s: &Word) -> Result<SparseMatrix, FockError> {
        if s.len() > self.depth {
            return Err(FockError::WordTooLong(s.clone(), self.depth));
        }
        let dim = self.dim();
        Ok(SparseMatrix::diagonal_indicator(
            dim,
            self.basis
                .iter()
                .filter(|(_, p)| s.le(&p.word()))
                .map(|(i, _)| i),
        ))
    }

    /// The member at `s` of the partition of unity indexed by a finite set
    /// `F` of words containing the identity:
    /// `Q_s = P_s * prod_{t in F, s < t} (1 - P_t)`.
    pub fn partition_projection(
        &self,
        family: &[Word],
        s: &Word,
    ) -> Result<SparseMatrix, FockError> {
        if !family.iter().any(|w| w.is_empty()) {
            return Err(FockError::MissingIdentity);
        }
        if !family.contains(s) {
            return Err(FockError::NotInIndexSet(s.clone()));
        }
        let identity = SparseMatrix::identity(self.dim());
        let mut q = self.word_projection(s)?;
        for t in family {
            if s.lt(t) {
                q = q.mul(&identity.sub(&self.word_projection(t)?)?)?;
            }
        }
        Ok(q)
    }

    /// Diagonal gauge unitary with entry `z^level`; requires `|z| = 1`.
    pub fn gauge_unitary(&self, z: Complex64) -> Result<SparseMatrix, FockError> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(FockError::NotUnitModulus(z.norm()));
        }
        let diag = self.level_phases(z);
        Ok(SparseMatrix::diagonal(&diag))
    }

    /// The diagonal of the gauge unitary, `z^level` per basis vector.
    pub fn level_phases(&self, z: Complex64) -> Vec<Complex64> {
        let mut powers = vec![Complex64::ONE; self.depth + 1];
        for k in 1..=self.depth {
            powers[k] = powers[k - 1] * z;
        }
        (0..self.dim())
            .map(|i| powers[self.basis.level_of(i)])
            .collect()
    }

    /// Representation of the rank-one module operator determined by two
    /// elements of the edge span: `psi(x) psi(y)*`.
    pub fn represent_rank_one(
        &self,
        x: &StarPolynomial,
        y: &StarPolynomial,
    ) -> Result<SparseMatrix, FockError> {
        Ok(self.edge_span_matrix(x)?.mul(&self.edge_span_matrix(y)?.adjoint())?)
    }

    /// Matrix of an element of the edge span `sum_f c_f s_f`.
    pub fn edge_span_matrix(&self, x: &StarPolynomial) -> Result<SparseMatrix, FockError> {
        let dim = self.dim();
        let mut out = SparseMatrix::zero(dim, dim);
        for (m, c) in x.terms() {
            // must be a normalized edge generator: mu one edge, nu its range
            if m.mu().len() != 1 || !m.nu().is_vertex() {
                return Err(FockError::NotEdgeSpan);
            }
            let s = self.creation(&m.mu().edges()[0])?;
            out = out.add(&s.scale(c.to_complex()))?;
        }
        Ok(out)
    }

    /// View the matrices as a plain family for the relation checkers,
    /// carrying the truncation boundary.
    pub fn as_family(&self) -> TckFamily {
        let cutoff = self.basis.level_range(self.depth).start;
        TckFamily {
            graph: Arc::clone(&self.graph),
            dim: self.dim(),
            creation: self.creation.clone(),
            vertex_proj: self.vertex_proj.clone(),
            top_level_start: (cutoff < self.dim()).then_some(cutoff),
        }
    }

    /// Relation report for the truncated model: the inner-product relation
    /// is checked on levels `<= N-1` where compression preserves it, all
    /// other relations globally.
    pub fn verify_truncated(&self, tol: f64) -> Result<VerificationReport, FockError> {
        self.as_family().verify(tol)
    }

    // --- export / import ------------------------------------------------

    /// Write `basis.txt` plus one matrix file per generator into `dir`.
    pub fn export(&self, dir: &std::path::Path) -> Result<(), FockError> {
        std::fs::create_dir_all(dir)?;
        let mut basis = String::new();
        for (_, p) in self.basis.iter() {
            writeln!(basis, "{} {}", p.len(), p).unwrap();
        }
        std::fs::write(dir.join("basis.txt"), basis)?;
        for (f, m) in &self.creation {
            std::fs::write(dir.join(format!("S_{f}.txt")), m.write_text())?;
        }
        for (v, m) in &self.vertex_proj {
            std::fs::write(dir.join(format!("P_{v}.txt")), m.write_text())?;
        }
        Ok(())
    }
}

/// An arbitrary candidate family of matrices `S_f`, `P_v` on a common
/// finite-dimensional space, as supplied by the user or read from disk.
///
/// `top_level_start`, when set, marks the family as the compression of a
/// deeper model: the inner-product relation is only expected to hold on
/// basis columns below that index.
#[derive(Debug, Clone)]
pub struct TckFamily {
    pub graph: Arc<DirectedGraph>,
    pub dim: usize,
    pub creation: BTreeMap<EdgeId, SparseMatrix>,
    pub vertex_proj: BTreeMap<VertexId, SparseMatrix>,
    pub top_level_start: Option<usize>,
}

impl TckFamily {
    pub fn new(
        graph: &Arc<DirectedGraph>,
        dim: usize,
        creation: BTreeMap<EdgeId, SparseMatrix>,
        vertex_proj: BTreeMap<VertexId, SparseMatrix>,
        top_level_start: Option<usize>,
    ) -> Result<Self, FockError> {
        for f in graph.edge_ids() {
            let m = creation
                .get(f)
                .ok_or_else(|| FockError::Import(format!("missing matrix for edge {f}")))?;
            if m.rows() != dim || m.cols() != dim {
                return Err(MatrixError::DimMismatch(m.rows(), m.cols(), dim, dim).into());
            }
        }
        for v in graph.vertices() {
            let m = vertex_proj
                .get(v)
                .ok_or_else(|| FockError::Import(format!("missing matrix for vertex {v}")))?;
            if m.rows() != dim || m.cols() != dim {
                return Err(MatrixError::DimMismatch(m.rows(), m.cols(), dim, dim).into());
            }
        }
        Ok(TckFamily {
            graph: Arc::clone(graph),
            dim,
            creation,
            vertex_proj,
            top_level_start: top_level_start.filter(|&c| c < dim),
        })
    }

    /// Read a directory produced by `TruncatedFockRep::export`. The basis
    /// file fixes the dimension and the truncation boundary.
    pub fn import(graph: &Arc<DirectedGraph>, dir: &std::path::Path) -> Result<Self, FockError> {
        let basis = std::fs::read_to_string(dir.join("basis.txt"))?;
        let mut levels = Vec::new();
        for (i, line) in basis.lines().enumerate() {
            let l = line.trim();
            if l.is_empty() {
                continue;
            }
            let level: usize = l
                .split_whitespace()
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| FockError::Import(format!("basis.txt line {}: bad level tag", i + 1)))?;
            levels.push(level);
        }
        let dim = levels.len();
        let top = levels.iter().copied().max();
        let top_level_start = top.map(|t| levels.iter().position(|&l| l == t).unwrap_or(dim));
        let mut creation = BTreeMap::new();
        for f in graph.edge_ids() {
            let text = std::fs::read_to_string(dir.join(format!("S_{f}.txt")))?;
            creation.insert(f.clone(), SparseMatrix::parse_text(&text)?);
        }
        let mut vertex_proj = BTreeMap::new();
        for v in graph.vertices() {
            let text = std::fs::read_to_string(dir.join(format!("P_{v}.txt")))?;
            vertex_proj.insert(v.clone(), SparseMatrix::parse_text(&text)?);
        }
        TckFamily::new(graph, dim, creation, vertex_proj, top_level_start)
    }

    pub fn creation(&self, f: &EdgeId) -> Result<&SparseMatrix, FockError> {
        self.creation
            .get(f)
            .ok_or_else(|| GraphError::UnknownEdge(f.as_str().into()).into())
    }

    pub fn vertex_projection(&self, v: &VertexId) -> Result<&SparseMatrix, FockError> {
        self.vertex_proj
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.as_str().into()).into())
    }

    /// Check the family relations:
    /// (i) the `P_v` are self-adjoint idempotents with orthogonal ranges,
    /// (ii) `S_f* S_f = P_{dst f}`,
    /// (iii) `sum_{src f = v} S_f S_f* <= P_v` (positive semidefiniteness).
    ///
    /// For a family carrying a truncation boundary, (ii) is tested below
    /// that boundary only; use `verify_global` to test the whole space.
    pub fn verify(&self, tol: f64) -> Result<VerificationReport, FockError> {
        self.verify_with_column_cutoff(tol, self.top_level_start)
    }

    /// Relation check over the whole space, ignoring any truncation
    /// boundary. A compressed model fails (ii) at its top level here.
    pub fn verify_global(&self, tol: f64) -> Result<VerificationReport, FockError> {
        self.verify_with_column_cutoff(tol, None)
    }

    /// Same as `verify`, but when `cutoff = Some(c)` the inner-product
    /// relation (ii) is tested only on the first `c` basis columns. Used
    /// for truncated models whose top level is compressed away.
    fn verify_with_column_cutoff(
        &self,
        tol: f64,
        cutoff: Option<usize>,
    ) -> Result<VerificationReport, FockError> {
        let mut findings = Vec::new();
        let vs: Vec<&VertexId> = self.graph.vertices().collect();

        for v in &vs {
            let p = self.vertex_projection(v)?;
            let herm = p.sub(&p.adjoint())?.max_abs();
            findings.push(Finding::residual(
                format!("projection_self_adjoint[{v}]"),
                herm,
                tol,
                format!("P_{v}"),
            ));
            let idem = p.mul(p)?.sub(p)?.max_abs();
            findings.push(Finding::residual(
                format!("projection_idempotent[{v}]"),
                idem,
                tol,
                format!("P_{v}"),
            ));
        }
        for (a, v) in vs.iter().enumerate() {
            for w in vs.iter().skip(a + 1) {
                let prod = self
                    .vertex_projection(v)?
                    .mul(self.vertex_projection(w)?)?
                    .max_abs();
                findings.push(Finding::residual(
                    format!("projections_orthogonal[{v},{w}]"),
                    prod,
                    tol,
                    format!("P_{v} P_{w}"),
                ));
            }
        }

        let col_ok = |c: usize| cutoff.is_none_or(|n| c < n);
        for f in self.graph.edge_ids() {
            let s = self.creation(f)?;
            let target = self.vertex_projection(self.graph.edge_dst(f)?)?;
            let diff = s.adjoint().mul(s)?.sub(target)?;
            let violation = diff.max_abs_where(|_| true, col_ok);
            let worst_allowed = diff
                .triplets()
                .iter()
                .filter(|(_, c, _)| col_ok(*c))
                .max_by(|a, b| a.2.norm().total_cmp(&b.2.norm()))
                .map(|&(r, c, _)| (r, c));
            let locus = match (worst_allowed, diff.argmax_abs()) {
                (Some((r, c)), _) if violation > tol => format!("entry ({r},{c})"),
                (_, Some((r, c))) if diff.max_abs() > tol => {
                    format!("holds below the cutoff; residual at entry ({r},{c})")
                }
                _ => "all levels".into(),
            };
            findings.push(Finding::residual(
                format!("initial_projection[{f}]"),
                violation,
                tol,
                locus,
            ));
        }

        for v in &vs {
            let mut range_sum = SparseMatrix::zero(self.dim, self.dim);
            for f in self.graph.edges_from(v) {
                let s = self.creation(f)?;
                range_sum = range_sum.add(&s.mul(&s.adjoint())?)?;
            }
            let gap = self.vertex_projection(v)?.sub(&range_sum)?;
            // positive semidefiniteness of the gap, via its smallest
            // Hermitian eigenvalue
            let dense = gap.to_dense();
            let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
            let min_eig = nalgebra::SymmetricEigen::new(herm)
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            let violation = (-min_eig).max(0.0);
            findings.push(Finding::residual(
                format!("range_bound[{v}]"),
                violation,
                tol,
                format!("P_{v} - sum of range projections"),
            ));
        }

        Ok(VerificationReport::new(findings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testgraphs::*;
    use crate::scalar::GaussianRational;
    use crate::staralg::defect;
    use crate::words::JoinResult;

    fn v(s: &str) -> VertexId {
        VertexId::new(s).unwrap()
    }

    fn e(s: &str) -> EdgeId {
        EdgeId::new(s).unwrap()
    }

    fn w(g: &DirectedGraph, s: &str) -> Word {
        let _ = g;
        if s.is_empty() {
            Word::empty()
        } else {
            Word::from_letters(s.chars().map(|c| EdgeId::new(c.to_string()).unwrap()))
        }
    }

    #[test]
    fn loop_fock_is_truncated_shift() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        assert_eq!(rep.dim(), 4);
        let s = rep.creation(&e("f")).unwrap();
        // e_k -> e_{k+1}, e_3 -> 0
        let expect = SparseMatrix::from_triplets(
            4,
            4,
            (0..3).map(|k| (k + 1, k, Complex64::ONE)),
        )
        .unwrap();
        assert_eq!(s, &expect);
    }

    #[test]
    fn arrow_fock_matrices() {
        let g = Arc::new(arrow_graph());
        let rep = TruncatedFockRep::build(&g, 2).unwrap();
        // basis: level 0 = {u, v}, level 1 = {f}, level 2 empty
        assert_eq!(rep.dim(), 3);
        let s = rep.creation(&e("f")).unwrap();
        let expect = SparseMatrix::from_triplets(3, 3, [(2, 1, Complex64::ONE)]).unwrap();
        assert_eq!(s, &expect);
        let pu = rep.vertex_projection(&v("u")).unwrap();
        assert_eq!(
            pu,
            &SparseMatrix::diagonal_indicator(3, [0, 2].into_iter())
        );
        let pv = rep.vertex_projection(&v("v")).unwrap();
        assert_eq!(pv, &SparseMatrix::diagonal_indicator(3, [1].into_iter()));
    }

    #[test]
    fn vertex_projections_partition_identity() {
        for g in [
            Arc::new(loop_graph()),
            Arc::new(arrow_graph()),
            Arc::new(two_cycle()),
            Arc::new(three_edge()),
        ] {
            let rep = TruncatedFockRep::build(&g, 3).unwrap();
            let mut sum = SparseMatrix::zero(rep.dim(), rep.dim());
            for vx in g.vertices() {
                sum = sum.add(rep.vertex_projection(vx).unwrap()).unwrap();
            }
            assert_eq!(sum, SparseMatrix::identity(rep.dim()));
        }
    }

    #[test]
    fn build_rejects_omega_and_zero_depth() {
        let omega = Arc::new(parse("vertex v omega\nedge f v v"));
        assert!(matches!(
            TruncatedFockRep::build(&omega, 2),
            Err(FockError::Path(PathError::OmegaVertex))
        ));
        let g = Arc::new(loop_graph());
        assert!(matches!(
            TruncatedFockRep::build(&g, 0),
            Err(FockError::DepthTooSmall)
        ));
    }

    #[test]
    fn represent_examples() {
        let arrow = Arc::new(arrow_graph());
        let rep = TruncatedFockRep::build(&arrow, 2).unwrap();
        let sum = StarPolynomial::gen_vertex(&arrow, &v("u"))
            .unwrap()
            .add(&StarPolynomial::gen_vertex(&arrow, &v("v")).unwrap())
            .unwrap();
        assert_eq!(
            rep.represent(&sum).unwrap(),
            SparseMatrix::identity(rep.dim())
        );

        // the defect of the loop graph is the level-0 projection
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let d = rep.represent(&defect(&g, &v("v")).unwrap()).unwrap();
        assert_eq!(
            d,
            SparseMatrix::diagonal_indicator(4, [0].into_iter())
        );

        // s_e* s_f represents as zero for distinct edges
        let cyc = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&cyc, 3).unwrap();
        let sf = StarPolynomial::gen_edge(&cyc, &e("f")).unwrap();
        let sg = StarPolynomial::gen_edge(&cyc, &e("g")).unwrap();
        let prod = sf.adjoint().mul(&sg).unwrap();
        assert!(rep.represent(&prod).unwrap().is_zero());
        // and the raw matrix product vanishes too
        let m = rep
            .creation(&e("f"))
            .unwrap()
            .adjoint()
            .mul(rep.creation(&e("g")).unwrap())
            .unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn level_projection_cases() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        assert_eq!(
            rep.level_projection(0).unwrap(),
            SparseMatrix::identity(4)
        );
        assert_eq!(
            rep.level_projection(2).unwrap(),
            SparseMatrix::diagonal_indicator(4, [2, 3].into_iter())
        );
        assert!(rep.level_projection(4).unwrap().is_zero());
        assert!(rep.level_projection(5).is_err());
    }

    #[test]
    fn word_projection_meet_rule() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let pf = rep.word_projection(&w(&g, "f")).unwrap();
        let pff = rep.word_projection(&w(&g, "ff")).unwrap();
        assert_eq!(pf.mul(&pff).unwrap(), pff);
        assert!(rep.word_projection(&w(&g, "ffff")).is_err());
    }

    #[test]
    fn word_projection_join_exhaustive() {
        // P_s P_t = P_{s v t} for all words up to the depth, infinity -> 0
        let g = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let mut words = vec![Word::empty()];
        let mut frontier = vec![Word::empty()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for wd in &frontier {
                for c in ["f", "g"] {
                    let mut letters = wd.letters().to_vec();
                    letters.push(e(c));
                    next.push(Word::from_letters(letters));
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        for s in &words {
            for t in &words {
                let left = rep
                    .word_projection(s)
                    .unwrap()
                    .mul(&rep.word_projection(t).unwrap())
                    .unwrap();
                let right = match s.join(t) {
                    JoinResult::Word(u) => rep.word_projection(&u).unwrap(),
                    JoinResult::Infinity => SparseMatrix::zero(rep.dim(), rep.dim()),
                };
                assert_eq!(left, right, "P_{s} P_{t}");
            }
        }
    }

    #[test]
    fn partition_projection_cases() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let id = SparseMatrix::identity(4);
        let empty = Word::empty();
        let f_w = w(&g, "f");
        let ff_w = w(&g, "ff");

        // F = {e}: Q_e = 1
        let q = rep.partition_projection(std::slice::from_ref(&empty), &empty).unwrap();
        assert_eq!(q, id);

        // F = {e, f}: Q_e = 1 - P_f, Q_f = P_f
        let fam = vec![empty.clone(), f_w.clone()];
        let qe = rep.partition_projection(&fam, &empty).unwrap();
        let qf = rep.partition_projection(&fam, &f_w).unwrap();
        let pf = rep.word_projection(&f_w).unwrap();
        assert_eq!(qe, id.sub(&pf).unwrap());
        assert_eq!(qf, pf);
        assert_eq!(qe.add(&qf).unwrap(), id);

        // F = {e, f, ff}: telescoping partition
        let fam = vec![empty.clone(), f_w.clone(), ff_w.clone()];
        let qe = rep.partition_projection(&fam, &empty).unwrap();
        let qf = rep.partition_projection(&fam, &f_w).unwrap();
        let qff = rep.partition_projection(&fam, &ff_w).unwrap();
        let pff = rep.word_projection(&ff_w).unwrap();
        assert_eq!(qe, id.sub(&pf).unwrap());
        assert_eq!(qf, pf.sub(&pff).unwrap());
        assert_eq!(qff, pff);
        assert_eq!(qe.add(&qf).unwrap().add(&qff).unwrap(), id);

        // identity must be in the family, s must be in the family
        assert!(matches!(
            rep.partition_projection(std::slice::from_ref(&f_w), &f_w),
            Err(FockError::MissingIdentity)
        ));
        assert!(matches!(
            rep.partition_projection(&fam, &w(&g, "fff")),
            Err(FockError::NotInIndexSet(_))
        ));
    }

    #[test]
    fn gauge_unitary_cases() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        assert_eq!(
            rep.gauge_unitary(Complex64::ONE).unwrap(),
            SparseMatrix::identity(4)
        );
        let um1 = rep.gauge_unitary(-Complex64::ONE).unwrap();
        let expect = SparseMatrix::diagonal(&[
            Complex64::ONE,
            -Complex64::ONE,
            Complex64::ONE,
            -Complex64::ONE,
        ]);
        assert_eq!(um1, expect);
        assert!(rep.gauge_unitary(Complex64::new(0.5, 0.0)).is_err());

        // U_z P_v U_z* = P_v and U_z S_f U_z* = z S_f
        let z = Complex64::from_polar(1.0, 1.0);
        let phases = rep.level_phases(z);
        let pv = rep.vertex_projection(&v("v")).unwrap();
        assert!(pv.conjugate_by_diagonal(&phases).sub(pv).unwrap().max_abs() < 1e-15);
        let sf = rep.creation(&e("f")).unwrap();
        let conj = sf.conjugate_by_diagonal(&phases);
        assert!(conj.sub(&sf.scale(z)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn gauge_covariance_scales_terms_by_degree() {
        // with z = i the scaling is exact in Gaussian rationals
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 4).unwrap();
        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        let pv = StarPolynomial::gen_vertex(&g, &v("v")).unwrap();
        let poly = sf
            .mul(&sf)
            .unwrap()
            .add(&pv)
            .unwrap()
            .add(&sf.adjoint())
            .unwrap();
        let z = Complex64::new(0.0, 1.0);
        let phases = rep.level_phases(z);
        let left = rep.represent(&poly).unwrap().conjugate_by_diagonal(&phases);

        let mut scaled = StarPolynomial::zero(&g);
        for (m, c) in poly.terms() {
            let d = m.mu().len() as i64 - m.nu().len() as i64;
            let mut factor = GaussianRational::one();
            let i_pow = GaussianRational::i();
            for _ in 0..d.unsigned_abs() {
                factor = &factor * &i_pow;
            }
            if d < 0 {
                factor = factor.conj();
            }
            scaled = scaled
                .add(&StarPolynomial::from_terms(
                    &g,
                    [(m.clone(), &c.clone() * &factor)],
                ))
                .unwrap();
        }
        let right = rep.represent(&scaled).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn creation_level_commutation() {
        // S_f P_k = P_{k+1} S_f, exactly, for 0 <= k <= N-1
        for g in [Arc::new(two_cycle()), Arc::new(three_edge())] {
            let rep = TruncatedFockRep::build(&g, 3).unwrap();
            for f in g.edge_ids() {
                let s = rep.creation(f).unwrap();
                for k in 0..rep.depth() {
                    let left = s.mul(&rep.level_projection(k).unwrap()).unwrap();
                    let right = rep.level_projection(k + 1).unwrap().mul(s).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn rank_one_operator_cases() {
        let cyc = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&cyc, 3).unwrap();
        let sf = StarPolynomial::gen_edge(&cyc, &e("f")).unwrap();
        let sg = StarPolynomial::gen_edge(&cyc, &e("g")).unwrap();

        let sf_m = rep.creation(&e("f")).unwrap();
        let sg_m = rep.creation(&e("g")).unwrap();
        assert_eq!(
            rep.represent_rank_one(&sf, &sf).unwrap(),
            sf_m.mul(&sf_m.adjoint()).unwrap()
        );
        // distinct ranges force a zero product
        assert!(rep.represent_rank_one(&sf, &sg).unwrap().is_zero());
        assert_eq!(
            rep.represent_rank_one(&sf, &sg).unwrap(),
            sf_m.mul(&sg_m.adjoint()).unwrap()
        );

        // not in the edge span: p_v
        let pv = StarPolynomial::gen_vertex(&cyc, &v("v")).unwrap();
        assert!(matches!(
            rep.represent_rank_one(&pv, &sf),
            Err(FockError::NotEdgeSpan)
        ));
    }

    #[test]
    fn rank_one_module_map_law() {
        // the module-map law: rank_one(x,y) psi(delta_h) = psi(Theta_{x,y}(delta_h)),
        // with Theta_{x,y}(delta_h) = x . <y, delta_h>
        let cyc = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&cyc, 3).unwrap();
        let i = GaussianRational::i();
        let x = StarPolynomial::gen_edge(&cyc, &e("f"))
            .unwrap()
            .scale(&GaussianRational::from_ratio(1, 2))
            .add(&StarPolynomial::gen_edge(&cyc, &e("g")).unwrap().scale(&i))
            .unwrap();
        let y = StarPolynomial::gen_edge(&cyc, &e("f"))
            .unwrap()
            .add(&StarPolynomial::gen_edge(&cyc, &e("g")).unwrap())
            .unwrap();
        let theta = rep.represent_rank_one(&x, &y).unwrap();
        for h in cyc.edge_ids() {
            let s_h = rep.creation(h).unwrap();
            let left = theta.mul(s_h).unwrap();
            // <y, delta_h> = conj(y_h) p_{dst h}; x . that scales edge terms
            // with matching range
            let y_h = y.terms().find_map(|(m, c)| {
                (m.mu().edges() == std::slice::from_ref(h)).then(|| c.clone())
            });
            let mut image = StarPolynomial::zero(&cyc);
            if let Some(c) = y_h {
                let dst = cyc.edge_dst(h).unwrap();
                for (m, a) in x.terms() {
                    if m.mu().range() == dst {
                        image = image
                            .add(&StarPolynomial::from_terms(
                                &cyc,
                                [(m.clone(), a * &c.conj())],
                            ))
                            .unwrap();
                    }
                }
            }
            let right = rep.edge_span_matrix(&image).unwrap();
            assert!(left.sub(&right).unwrap().max_abs() < 1e-12, "edge {h}");
        }
    }

    #[test]
    fn homomorphism_up_to_truncation() {
        let g = Arc::new(two_cycle());
        let depth = 5;
        let rep = TruncatedFockRep::build(&g, depth).unwrap();
        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        let sg = StarPolynomial::gen_edge(&g, &e("g")).unwrap();
        let a = sf.mul(&sg).unwrap().add(&sf.adjoint()).unwrap(); // degree 2
        let b = sg.adjoint().mul(&sf.adjoint()).unwrap(); // degree 2
        let d = 2;
        let sym = rep.represent(&a.mul(&b).unwrap()).unwrap();
        let num = rep
            .represent(&a)
            .unwrap()
            .mul(&rep.represent(&b).unwrap())
            .unwrap();
        let cutoff = rep.basis().level_range(depth - 2 * d).start;
        let diff = sym.sub(&num).unwrap();
        assert_eq!(diff.max_abs_where(|_| true, |c| c < cutoff), 0.0);
    }

    #[test]
    fn level_compression_q_k_rank_one_for_loop() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        for k in 0..=2 {
            let qk = rep
                .level_projection(k)
                .unwrap()
                .sub(&rep.level_projection(k + 1).unwrap())
                .unwrap();
            assert_eq!(qk.nnz(), 1);
        }
    }

    #[test]
    fn verify_truncated_and_full() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        // on levels <= N-1 every relation passes
        let report = rep.verify_truncated(1e-12).unwrap();
        assert!(report.passed(), "{report}");

        // on the full space the inner-product relation fails at the top level
        let report = rep.as_family().verify_global(1e-12).unwrap();
        assert!(!report.passed());
        let failing: Vec<&str> = report
            .findings
            .iter()
            .filter(|f| !f.pass)
            .map(|f| f.name.as_str())
            .collect();
        assert_eq!(failing, vec!["initial_projection[f]"]);
        let bad = report
            .findings
            .iter()
            .find(|f| !f.pass)
            .unwrap();
        // the maximal violation sits at the top-level basis vector (index 3)
        assert!(bad.locus.contains("(3,3)"), "locus = {}", bad.locus);
    }

    #[test]
    fn verify_two_cycle_depth_four() {
        let g = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&g, 4).unwrap();
        let report = rep.verify_truncated(1e-12).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn verify_rejects_non_orthogonal_family() {
        let g = Arc::new(arrow_graph());
        let rep = TruncatedFockRep::build(&g, 2).unwrap();
        let mut fam = rep.as_family();
        let id = SparseMatrix::identity(fam.dim);
        fam.vertex_proj.insert(v("u"), id.clone());
        fam.vertex_proj.insert(v("v"), id);
        let report = fam.verify(1e-12).unwrap();
        assert!(!report.passed());
        assert!(report
            .findings
            .iter()
            .any(|f| f.name.starts_with("projections_orthogonal") && !f.pass));
    }

    #[test]
    fn export_import_roundtrip() {
        let g = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let dir = std::env::temp_dir().join(format!("tck-fock-test-{}", std::process::id()));
        rep.export(&dir).unwrap();
        let fam = TckFamily::import(&g, &dir).unwrap();
        assert_eq!(fam.dim, rep.dim());
        for f in g.edge_ids() {
            assert_eq!(fam.creation(f).unwrap(), rep.creation(f).unwrap());
        }
        for vx in g.vertices() {
            assert_eq!(
                fam.vertex_projection(vx).unwrap(),
                rep.vertex_projection(vx).unwrap()
            );
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
