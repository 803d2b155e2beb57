//! Quantitative verifiers: the level-wise core-norm formula and its
//! cross-check against the matrix model, numeric gauge averaging, the
//! contractivity of both expectations, the faithfulness criterion, partition
//! residuals, and the finite-degree linear-independence oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{FockError, TckFamily, TruncatedFockRep};
use crate::graph::DirectedGraph;
use crate::report::{Finding, VerificationReport};
use crate::sparse::SparseMatrix;
use crate::staralg::{spanning_monomials, AlgebraError, StarPolynomial};
use crate::words::{enumerate_paths, GraphPath, PathError, Word};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("polynomial is not in the core (a term has |mu| != |nu|)")]
    NotCore,
    #[error("depth {got} too small, need at least {need}")]
    DepthTooSmall { need: usize, got: usize },
    #[error("{got} gauge modes cannot separate degrees at depth {depth}; need more than {}", 2 * depth)]
    ModesTooSmall { depth: usize, got: usize },
    #[error("family fails the defining relations; refusing to evaluate the criterion")]
    NotTckFamily(Box<VerificationReport>),
}

/// Tolerance knobs, overridable from the CLI.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// exact-relation residuals
    pub relation: f64,
    /// rank / smallest-singular-value / nonvanishing thresholds
    pub rank: f64,
    /// comparisons between independently computed norms
    pub norm_cmp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relation: 1e-10,
            rank: 1e-8,
            norm_cmp: 1e-8,
        }
    }
}

// --- spectral norms ------------------------------------------------------

const DENSE_SVD_LIMIT: usize = 512;
const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 100_000;

/// Largest singular value: dense SVD up to 512 columns/rows, deterministic
/// power iteration on `A* A` beyond.
pub fn spectral_norm(m: &SparseMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
        return 0.0;
    }
    if m.rows().max(m.cols()) <= DENSE_SVD_LIMIT {
        dense_spectral_norm(&m.to_dense())
    } else {
        power_iteration_norm(m)
    }
}

pub fn dense_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn power_iteration_norm(m: &SparseMatrix) -> f64 {
    let n = m.cols();
    let start = (n as f64).sqrt().recip();
    let mut v = vec![Complex64::new(start, 0.0); n];

    // all-ones start can land in the kernel; fall back through basis vectors
    let step = |v: &[Complex64]| m.apply_adjoint(&m.apply(v));
    if l2(&step(&v)) == 0.0 {
        let mut found = false;
        for i in 0..n {
            let mut e = vec![Complex64::ZERO; n];
            e[i] = Complex64::ONE;
            if l2(&step(&e)) > 0.0 {
                v = e;
                found = true;
                break;
            }
        }
        if !found {
            return 0.0;
        }
    }

    let mut sigma_prev = 0.0f64;
    for _ in 0..POWER_CAP {
        let y = step(&v);
        let norm_y = l2(&y);
        if norm_y == 0.0 {
            return 0.0;
        }
        let sigma = norm_y.sqrt();
        if (sigma - sigma_prev).abs() <= POWER_TOL * sigma.max(1.0) {
            return sigma;
        }
        sigma_prev = sigma;
        let inv = norm_y.recip();
        v = y.into_iter().map(|z| z * inv).collect();
    }
    sigma_prev
}

// --- the core-norm formula -----------------------------------------------

/// A gauge-invariant polynomial together with its level bound (the maximal
/// term length).
#[derive(Debug, Clone)]
pub struct CoreElement {
    poly: StarPolynomial,
    level_bound: usize,
}

impl CoreElement {
    pub fn new(poly: StarPolynomial) -> Result<Self, AnalysisError> {
        if !poly.is_core() {
            return Err(AnalysisError::NotCore);
        }
        let level_bound = poly.degree();
        Ok(CoreElement { poly, level_bound })
    }

    pub fn poly(&self) -> &StarPolynomial {
        &self.poly
    }

    /// Maximal term length K.
    pub fn level_bound(&self) -> usize {
        self.level_bound
    }
}

/// Matrix of the element compressed to one level of the path space: each
/// term `s_mu s_nu*` with `|nu| <= k` sends a level-k path `nu.r` to `mu.r`
/// and kills everything else.
fn core_level_matrix(r: &CoreElement, level: &[GraphPath]) -> SparseMatrix {
    let n = level.len();
    let k = level.first().map_or(0, GraphPath::len);
    let index: BTreeMap<&GraphPath, usize> =
        level.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut triplets = Vec::new();
    for (m, c) in r.poly().terms() {
        if m.nu().len() > k {
            continue;
        }
        for (j, sigma) in level.iter().enumerate() {
            if sigma.has_path_prefix(m.nu()) {
                let tail = sigma.suffix_after(m.nu().len());
                let target = m
                    .mu()
                    .concat(&tail)
                    .expect("monomial ranges agree at the junction");
                let i = index[&target];
                triplets.push((i, j, c.to_complex()));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets).expect("indices in range")
}

/// The exact norm of a core element: the maximum over levels `0..=K` of the
/// spectral norm of its compression to the level-k path space, where level
/// k sees only the terms of length at most k.
pub fn core_norm(r: &CoreElement) -> Result<f64, AnalysisError> {
    let g = r.poly().graph();
    let levels = enumerate_paths(g, r.level_bound())?;
    let mut best = 0.0f64;
    for level in &levels {
        if !level.is_empty() {
            best = best.max(spectral_norm(&core_level_matrix(r, level)));
        }
    }
    Ok(best)
}

/// Independent route: compare the formula with the spectral norm of the
/// matrix model at the given depth (needs `depth >= K + 1`).
pub fn cross_check_core_norm(
    r: &CoreElement,
    depth: usize,
    tols: &Tolerances,
) -> Result<VerificationReport, AnalysisError> {
    if depth < r.level_bound() + 1 {
        return Err(AnalysisError::DepthTooSmall {
            need: r.level_bound() + 1,
            got: depth,
        });
    }
    let formula = core_norm(r)?;
    let rep = TruncatedFockRep::build(r.poly().graph(), depth)?;
    let matrix = spectral_norm(&rep.represent(r.poly())?);
    let finding = Finding::residual(
        "core_norm_agreement",
        (formula - matrix).abs(),
        tols.norm_cmp,
        format!("formula={formula} matrix={matrix} depth={depth}"),
    );
    Ok(VerificationReport::new(vec![finding]))
}

// --- numeric expectations --------------------------------------------------

/// Average of the conjugates `U_z M U_z*` over the given number of roots of
/// unity. Requires more modes than twice the depth so every nonzero degree
/// is annihilated.
pub fn gauge_average(
    rep: &TruncatedFockRep,
    m: &SparseMatrix,
    modes: usize,
) -> Result<SparseMatrix, AnalysisError> {
    if modes <= 2 * rep.depth() {
        return Err(AnalysisError::ModesTooSmall {
            depth: rep.depth(),
            got: modes,
        });
    }
    let mut sum = SparseMatrix::zero(m.rows(), m.cols());
    for j in 0..modes {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / modes as f64);
        let phases = rep.level_phases(z);
        sum = sum
            .add(&m.conjugate_by_diagonal(&phases))
            .map_err(FockError::from)?;
    }
    Ok(sum.scale(Complex64::new(1.0 / modes as f64, 0.0)))
}

/// Check that both expectations are norm-decreasing on the represented
/// polynomial at the given depth.
pub fn expectation_contractivity(
    poly: &StarPolynomial,
    depth: usize,
    tols: &Tolerances,
) -> Result<VerificationReport, AnalysisError> {
    if depth < poly.degree() + 1 {
        return Err(AnalysisError::DepthTooSmall {
            need: poly.degree() + 1,
            got: depth,
        });
    }
    let rep = TruncatedFockRep::build(poly.graph(), depth)?;
    let full = spectral_norm(&rep.represent(poly)?);
    let gauge = spectral_norm(&rep.represent(&poly.gauge_expect())?);
    let free = spectral_norm(&rep.represent(&poly.free_expect())?);
    let findings = vec![
        Finding::residual(
            "gauge_expectation_contractive",
            (gauge - full).max(0.0),
            tols.norm_cmp,
            format!("|E(P)|={gauge} |P|={full}"),
        ),
        Finding::residual(
            "free_expectation_contractive",
            (free - full).max(0.0),
            tols.norm_cmp,
            format!("|E_free(P)|={free} |P|={full}"),
        ),
    ];
    Ok(VerificationReport::new(findings))
}

// --- faithfulness ----------------------------------------------------------

/// The faithfulness criterion for a family satisfying the relations: every
/// vertex projection is nonzero and, for every finite emitter, the defect
/// `P_v - sum S_f S_f*` is nonzero.
pub fn faithfulness_verdict(
    fam: &TckFamily,
    tols: &Tolerances,
) -> Result<VerificationReport, AnalysisError> {
    let relations = fam.verify(tols.relation)?;
    if !relations.passed() {
        return Err(AnalysisError::NotTckFamily(Box::new(relations)));
    }
    let mut findings = Vec::new();
    for v in fam.graph.vertices() {
        let p = fam.vertex_projection(v)?;
        findings.push(Finding::strictness(
            format!("vertex_projection_nonzero[{v}]"),
            spectral_norm(p),
            tols.rank,
            format!("P_{v}"),
        ));
    }
    let graph = Arc::clone(&fam.graph);
    for v in graph.compact_ideal_support() {
        let mut defect = fam.vertex_projection(&v)?.clone();
        for f in graph.edges_from(&v) {
            let s = fam.creation(f)?;
            defect = defect
                .sub(&s.mul(&s.adjoint()).map_err(FockError::from)?)
                .map_err(FockError::from)?;
        }
        findings.push(Finding::strictness(
            format!("defect_nonzero[{v}]"),
            spectral_norm(&defect),
            tols.rank,
            format!("P_{v} - sum of range projections"),
        ));
    }
    Ok(VerificationReport::with_verdicts(
        findings,
        "faithful",
        "criterion fails",
    ))
}

// --- partitions of unity ----------------------------------------------------

/// Norm of `sum_{s in F} Q_s - 1`; exactly zero for the diagonal model.
pub fn partition_residual(
    rep: &TruncatedFockRep,
    family: &[Word],
) -> Result<f64, AnalysisError> {
    let dim = rep.dim();
    let mut sum = SparseMatrix::zero(dim, dim);
    for s in family {
        sum = sum
            .add(&rep.partition_projection(family, s)?)
            .map_err(FockError::from)?;
    }
    let diff = sum
        .sub(&SparseMatrix::identity(dim))
        .map_err(FockError::from)?;
    // the summands are diagonal, so the max entry is the operator norm
    Ok(diff.max_abs())
}

// --- finite-degree independence ----------------------------------------------

/// Linear independence of the spanning monomials of degree at most `d`,
/// witnessed by the singular values of their flattened matrix images at the
/// given depth.
pub fn independence_rank(
    g: &Arc<DirectedGraph>,
    d: usize,
    depth: usize,
    tols: &Tolerances,
) -> Result<VerificationReport, AnalysisError> {
    if depth < d {
        return Err(AnalysisError::DepthTooSmall { need: d, got: depth });
    }
    let monomials = spanning_monomials(g, d)?;
    let rep = TruncatedFockRep::build(g, depth)?;
    let dim = rep.dim();
    let count = monomials.len();
    let mut stacked = DMatrix::<Complex64>::zeros(count, dim * dim);
    for (row, m) in monomials.iter().enumerate() {
        let mat = rep.represent(&StarPolynomial::monomial(g, m.clone()))?;
        for &(r, c, z) in mat.triplets() {
            stacked[(row, r * dim + c)] = z;
        }
    }
    let svals = stacked.singular_values();
    let smallest = svals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let numerical_rank = svals.iter().filter(|&&s| s > tols.rank).count();
    let findings = vec![
        Finding::strictness(
            "smallest_singular_value",
            smallest,
            tols.rank,
            format!("{count} monomials, degree <= {d}, depth {depth}"),
        ),
        Finding::residual(
            "rank_deficit",
            (count - numerical_rank) as f64,
            0.0,
            format!("rank {numerical_rank} of {count}"),
        ),
    ];
    Ok(VerificationReport::new(findings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testgraphs::*;
    use crate::graph::{EdgeId, VertexId};
    use crate::scalar::GaussianRational;
    use crate::staralg::{defect, parse_poly};

    fn v(s: &str) -> VertexId {
        VertexId::new(s).unwrap()
    }

    fn e(s: &str) -> EdgeId {
        EdgeId::new(s).unwrap()
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn core(g: &Arc<DirectedGraph>, text: &str) -> CoreElement {
        CoreElement::new(parse_poly(g, text).unwrap()).unwrap()
    }

    #[test]
    fn spectral_norm_simple_cases() {
        let id = SparseMatrix::identity(4);
        assert!((spectral_norm(&id) - 1.0).abs() < 1e-14);
        assert_eq!(spectral_norm(&SparseMatrix::zero(3, 3)), 0.0);
        let m = SparseMatrix::from_triplets(2, 2, [(0, 1, Complex64::new(0.0, -3.0))]).unwrap();
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn power_iteration_matches_svd() {
        // deterministic sparse test matrix, compared against the SVD route
        let mut triplets = Vec::new();
        for i in 0..40usize {
            for j in 0..40usize {
                if (i + 2 * j) % 7 == 0 {
                    let z = Complex64::new((i as f64 - 3.0) / 11.0, (j as f64) / 17.0);
                    triplets.push((i, j, z));
                }
            }
        }
        let m = SparseMatrix::from_triplets(40, 40, triplets).unwrap();
        let by_svd = dense_spectral_norm(&m.to_dense());
        let by_power = power_iteration_norm(&m);
        assert!((by_svd - by_power).abs() < 1e-9, "{by_svd} vs {by_power}");
    }

    #[test]
    fn power_iteration_survives_kernel_start() {
        // maps the all-ones vector to zero but is nonzero
        let m = SparseMatrix::from_triplets(
            2,
            2,
            [(0, 0, Complex64::ONE), (0, 1, -Complex64::ONE)],
        )
        .unwrap();
        let want = dense_spectral_norm(&m.to_dense());
        assert!((power_iteration_norm(&m) - want).abs() < 1e-9);
    }

    #[test]
    fn core_norm_examples() {
        let g = Arc::new(loop_graph());
        let d = CoreElement::new(defect(&g, &v("v")).unwrap()).unwrap();
        assert_eq!(core_norm(&d).unwrap(), 1.0);

        // p_v + s_f s_f*: level 0 gives 1, level 1 gives 2
        let r = core(&g, "1 0 ; @v ; @v\n1 0 ; f ; f");
        assert!((core_norm(&r).unwrap() - 2.0).abs() < 1e-12);

        let p = core(&g, "1 0 ; @v ; @v");
        assert_eq!(core_norm(&p).unwrap(), 1.0);
    }

    #[test]
    fn core_element_rejects_off_diagonal() {
        let g = Arc::new(loop_graph());
        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        assert!(matches!(CoreElement::new(sf), Err(AnalysisError::NotCore)));
    }

    #[test]
    fn cross_check_examples() {
        let g = Arc::new(loop_graph());
        let d = CoreElement::new(defect(&g, &v("v")).unwrap()).unwrap();
        let report = cross_check_core_norm(&d, 4, &tols()).unwrap();
        assert!(report.passed(), "{report}");

        let r = core(&g, "1 0 ; @v ; @v\n1 0 ; f ; f");
        let report = cross_check_core_norm(&r, 4, &tols()).unwrap();
        assert!(report.passed(), "{report}");

        assert!(matches!(
            cross_check_core_norm(&r, 1, &tols()),
            Err(AnalysisError::DepthTooSmall { need: 2, got: 1 })
        ));
    }

    #[test]
    fn gauge_average_examples() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let modes = 2 * rep.depth() + 3;

        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        let m = rep.represent(&sf).unwrap();
        let avg = gauge_average(&rep, &m, modes).unwrap();
        assert!(avg.max_abs() < 1e-14, "degree-1 term must average away");

        let diag = rep.represent(&sf.mul(&sf.adjoint()).unwrap()).unwrap();
        let avg = gauge_average(&rep, &diag, modes).unwrap();
        assert!(avg.sub(&diag).unwrap().max_abs() < 1e-13);

        assert!(matches!(
            gauge_average(&rep, &m, 6),
            Err(AnalysisError::ModesTooSmall { .. })
        ));
    }

    #[test]
    fn contractivity_examples() {
        let g = Arc::new(loop_graph());
        let pv = StarPolynomial::gen_vertex(&g, &v("v")).unwrap();
        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        let p = sf.add(&pv).unwrap();
        assert!(expectation_contractivity(&p, 3, &tols()).unwrap().passed());

        // diagonal polynomial: expectations fix it, equality holds
        let diag = sf.mul(&sf.adjoint()).unwrap();
        let report = expectation_contractivity(&diag, 3, &tols()).unwrap();
        assert!(report.passed());
        for f in &report.findings {
            assert_eq!(f.value, 0.0);
        }
    }

    #[test]
    fn faithfulness_examples() {
        // the truncated model is faithful
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let report = faithfulness_verdict(&rep.as_family(), &tols()).unwrap();
        assert!(report.passed());
        assert_eq!(report.verdict, "faithful");

        // cyclic shift: relations pass but the defect vanishes
        let n = 4;
        let shift = SparseMatrix::from_triplets(
            n,
            n,
            (0..n).map(|k| ((k + 1) % n, k, Complex64::ONE)),
        )
        .unwrap();
        let fam = TckFamily::new(
            &g,
            n,
            [(e("f"), shift)].into(),
            [(v("v"), SparseMatrix::identity(n))].into(),
            None,
        )
        .unwrap();
        let report = faithfulness_verdict(&fam, &tols()).unwrap();
        assert!(!report.passed());
        assert_eq!(report.verdict, "criterion fails");
        assert!(report
            .findings
            .iter()
            .any(|f| f.name.starts_with("defect_nonzero") && !f.pass));

        // zero projections: relations hold, nonvanishing fails
        let fam = TckFamily::new(
            &g,
            n,
            [(e("f"), SparseMatrix::zero(n, n))].into(),
            [(v("v"), SparseMatrix::zero(n, n))].into(),
            None,
        )
        .unwrap();
        let report = faithfulness_verdict(&fam, &tols()).unwrap();
        assert!(!report.passed());
        assert!(report
            .findings
            .iter()
            .any(|f| f.name.starts_with("vertex_projection_nonzero") && !f.pass));
    }

    #[test]
    fn faithfulness_refuses_non_family() {
        let g = Arc::new(loop_graph());
        // halving S_f breaks the inner-product relation
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let mut fam = rep.as_family();
        let halved = fam.creation[&e("f")].scale(Complex64::new(0.5, 0.0));
        fam.creation.insert(e("f"), halved);
        assert!(matches!(
            faithfulness_verdict(&fam, &tols()),
            Err(AnalysisError::NotTckFamily(_))
        ));
    }

    #[test]
    fn faithfulness_passes_for_all_test_graphs() {
        for g in [
            Arc::new(loop_graph()),
            Arc::new(arrow_graph()),
            Arc::new(two_cycle()),
            Arc::new(three_edge()),
        ] {
            for depth in [2, 3] {
                let rep = TruncatedFockRep::build(&g, depth).unwrap();
                let report = faithfulness_verdict(&rep.as_family(), &tols()).unwrap();
                assert!(report.passed(), "depth {depth}: {report}");
            }
        }
    }

    #[test]
    fn partition_residual_examples() {
        let g = Arc::new(loop_graph());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let word = |n: usize| Word::from_letters(std::iter::repeat_n(e("f"), n));

        assert_eq!(partition_residual(&rep, &[Word::empty()]).unwrap(), 0.0);
        assert_eq!(
            partition_residual(&rep, &[Word::empty(), word(1), word(2)]).unwrap(),
            0.0
        );
        assert!(matches!(
            partition_residual(&rep, &[word(1)]),
            Err(AnalysisError::Fock(FockError::MissingIdentity))
        ));
    }

    #[test]
    fn independence_rank_examples() {
        let g = Arc::new(loop_graph());
        let report = independence_rank(&g, 1, 3, &tols()).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.findings[1].locus.contains("rank 4 of 4"));

        let arrow = Arc::new(arrow_graph());
        let report = independence_rank(&arrow, 1, 2, &tols()).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.findings[1].locus.contains("rank 5 of 5"));

        let cyc = Arc::new(two_cycle());
        let report = independence_rank(&cyc, 2, 5, &tols()).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn gauge_average_matches_symbolic_expectation() {
        let g = Arc::new(two_cycle());
        let rep = TruncatedFockRep::build(&g, 3).unwrap();
        let sf = StarPolynomial::gen_edge(&g, &e("f")).unwrap();
        let sg = StarPolynomial::gen_edge(&g, &e("g")).unwrap();
        let poly = sf
            .mul(&sg)
            .unwrap()
            .add(&sg.adjoint().scale(&GaussianRational::i()))
            .unwrap()
            .add(&sf.mul(&sf.adjoint()).unwrap())
            .unwrap();
        let avg = gauge_average(&rep, &rep.represent(&poly).unwrap(), 9).unwrap();
        let sym = rep.represent(&poly.gauge_expect()).unwrap();
        assert!(avg.sub(&sym).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn core_norm_is_a_c_star_seminorm_on_samples() {
        let g = Arc::new(two_cycle());
        let r = core(
            &g,
            "1 0 ; @u ; @u\n0 1 ; f ; f\n1/2 0 ; f,g ; f,g\n-1 0 ; g,f ; g,f",
        );
        let square = CoreElement::new(r.poly().adjoint().mul(r.poly()).unwrap()).unwrap();
        let n1 = core_norm(&r).unwrap();
        let n2 = core_norm(&square).unwrap();
        assert!((n2 - n1 * n1).abs() < 1e-8, "{n2} vs {}", n1 * n1);
    }
}
