//! Exact *-algebra on the spanning monomials `s_mu s_nu*` of the Toeplitz
//! algebra of a graph, with Gaussian-rational coefficients.
//!
//! A monomial is a pair of graph paths with a common range. Products reduce
//! by the prefix calculus: with `nu = m1.nu` and `sigma = m2.mu`,
//!
//! * no prefix relation between the words  ->  0,
//! * `sigma = nu . sigma'`  ->  `s_{mu . sigma'} s_tau*`,
//! * `nu = sigma . nu'`     ->  `s_mu s_{tau . nu'}*`,
//!
//! with the product additionally vanishing when the junction vertices do
//! not match (the word order is blind to the basepoints of empty paths).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{DirectedGraph, EdgeId, GraphError, OutDegree, VertexId};
use crate::scalar::{GaussianRational, RationalParseError};
use crate::words::{GraphPath, PathError, WordError, WordLiteral};

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("monomial paths must share their range vertex (got `{0}` and `{1}`)")]
    RangeMismatch(VertexId, VertexId),
    #[error("operands live over different graphs")]
    GraphMismatch,
    #[error("vertex `{0}` is a declared infinite emitter; its defect is not a finite sum")]
    OmegaDefect(VertexId),
    #[error("line {line}: {message}")]
    PolyParse { line: usize, message: String },
}

/// `s_mu s_nu*` with range(mu) = range(nu). `mu = nu = @v` is the vertex
/// projection `p_v`; `s_f` is normalized as `(f, @dst(f))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    mu: GraphPath,
    nu: GraphPath,
}

impl Monomial {
    pub fn new(mu: GraphPath, nu: GraphPath) -> Result<Self, AlgebraError> {
        if mu.range() != nu.range() {
            return Err(AlgebraError::RangeMismatch(
                mu.range().clone(),
                nu.range().clone(),
            ));
        }
        Ok(Monomial { mu, nu })
    }

    pub fn vertex(g: &Arc<DirectedGraph>, v: &VertexId) -> Result<Self, AlgebraError> {
        let p = GraphPath::at_vertex(g, v)?;
        Ok(Monomial {
            mu: p.clone(),
            nu: p,
        })
    }

    pub fn edge(g: &Arc<DirectedGraph>, f: &EdgeId) -> Result<Self, AlgebraError> {
        let mu = GraphPath::from_edges(g, std::slice::from_ref(f))?;
        let nu = GraphPath::at_vertex(g, mu.range())?;
        Ok(Monomial { mu, nu })
    }

    pub fn mu(&self) -> &GraphPath {
        &self.mu
    }

    pub fn nu(&self) -> &GraphPath {
        &self.nu
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
        }
    }

    pub fn degree(&self) -> usize {
        self.mu.len().max(self.nu.len())
    }

    pub fn is_diagonal(&self) -> bool {
        self.mu == self.nu
    }

    pub fn is_gauge_invariant(&self) -> bool {
        self.mu.len() == self.nu.len()
    }

    /// Product of two monomials: zero (None) or a single monomial with
    /// coefficient one.
    pub fn mul(&self, rhs: &Monomial) -> Option<Monomial> {
        let nu_word = self.nu.word();
        let sigma_word = rhs.mu.word();
        if nu_word.le(&sigma_word) {
            // s_mu s_nu* s_{nu sigma'} s_tau* = s_{mu sigma'} s_tau*
            let tail = rhs.mu.suffix_after(nu_word.len());
            let mu = self.mu.concat(&tail)?;
            Monomial::new(mu, rhs.nu.clone()).ok()
        } else if sigma_word.le(&nu_word) {
            // s_mu s_{sigma nu'}* s_sigma s_tau* = s_mu (s_tau s_nu')*
            let tail = self.nu.suffix_after(sigma_word.len());
            let nu = rhs.nu.concat(&tail)?;
            Monomial::new(self.mu.clone(), nu).ok()
        } else {
            None
        }
    }
}

// Canonical term order: (|mu|, |nu|, mu-word, nu-word, basepoints).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.mu.len(), self.nu.len(), &self.mu, &self.nu).cmp(&(
            other.mu.len(),
            other.nu.len(),
            &other.mu,
            &other.nu,
        ))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {}", self.mu, self.nu)
    }
}

/// Finite linear combination of monomials in canonical form: terms sorted,
/// zero coefficients absent.
#[derive(Debug, Clone)]
pub struct StarPolynomial {
    graph: Arc<DirectedGraph>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl PartialEq for StarPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.same_graph(other)
    }
}

impl Eq for StarPolynomial {}

impl StarPolynomial {
    pub fn zero(graph: &Arc<DirectedGraph>) -> Self {
        StarPolynomial {
            graph: Arc::clone(graph),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        graph: &Arc<DirectedGraph>,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Self {
        let mut p = Self::zero(graph);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(graph: &Arc<DirectedGraph>, m: Monomial) -> Self {
        Self::from_terms(graph, [(m, GaussianRational::one())])
    }

    /// The generator `s_f`.
    pub fn gen_edge(graph: &Arc<DirectedGraph>, f: &EdgeId) -> Result<Self, AlgebraError> {
        Ok(Self::monomial(graph, Monomial::edge(graph, f)?))
    }

    /// The vertex projection `p_v`.
    pub fn gen_vertex(graph: &Arc<DirectedGraph>, v: &VertexId) -> Result<Self, AlgebraError> {
        Ok(Self::monomial(graph, Monomial::vertex(graph, v)?))
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    fn same_graph(&self, other: &StarPolynomial) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph
    }

    fn check_graph(&self, other: &StarPolynomial) -> Result<(), AlgebraError> {
        if self.same_graph(other) {
            Ok(())
        } else {
            Err(AlgebraError::GraphMismatch)
        }
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &StarPolynomial) -> Result<StarPolynomial, AlgebraError> {
        self.check_graph(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &StarPolynomial) -> Result<StarPolynomial, AlgebraError> {
        self.add(&rhs.scale(&(-&GaussianRational::one())))
    }

    pub fn scale(&self, c: &GaussianRational) -> StarPolynomial {
        if c.is_zero() {
            return Self::zero(&self.graph);
        }
        StarPolynomial {
            graph: Arc::clone(&self.graph),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &StarPolynomial) -> Result<StarPolynomial, AlgebraError> {
        self.check_graph(rhs)?;
        let mut out = Self::zero(&self.graph);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some(m) = m1.mul(m2) {
                    out.add_term(m, c1 * c2);
                }
            }
        }
        Ok(out)
    }

    /// Involution: swaps each `mu` and `nu` and conjugates coefficients.
    pub fn adjoint(&self) -> StarPolynomial {
        StarPolynomial {
            graph: Arc::clone(&self.graph),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.adjoint(), c.conj()))
                .collect(),
        }
    }

    /// Expectation onto the gauge-invariant part: keeps `|mu| = |nu|` terms.
    pub fn gauge_expect(&self) -> StarPolynomial {
        StarPolynomial {
            graph: Arc::clone(&self.graph),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_gauge_invariant())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Finer expectation onto the free-monoid diagonal: keeps `mu = nu`.
    pub fn free_expect(&self) -> StarPolynomial {
        StarPolynomial {
            graph: Arc::clone(&self.graph),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_diagonal())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True iff the polynomial is fixed by the gauge expectation.
    pub fn is_core(&self) -> bool {
        self.terms.keys().all(Monomial::is_gauge_invariant)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }
}

/// All spanning monomials `s_mu s_nu*` with both path lengths at most
/// `max_len`, in canonical order.
pub fn spanning_monomials(
    g: &Arc<DirectedGraph>,
    max_len: usize,
) -> Result<Vec<Monomial>, AlgebraError> {
    let paths: Vec<GraphPath> = crate::words::enumerate_paths(g, max_len)?
        .into_iter()
        .flatten()
        .collect();
    let mut out = Vec::new();
    for mu in &paths {
        for nu in &paths {
            if mu.range() == nu.range() {
                out.push(Monomial {
                    mu: mu.clone(),
                    nu: nu.clone(),
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The defect projection `p_v - sum_{src(f)=v} s_f s_f*`, whose
/// nonvanishing in a representation is the faithfulness criterion.
pub fn defect(g: &Arc<DirectedGraph>, v: &VertexId) -> Result<StarPolynomial, AlgebraError> {
    match g.out_degree(v)? {
        OutDegree::Omega => Err(AlgebraError::OmegaDefect(v.clone())),
        OutDegree::Finite(_) => {
            let mut p = StarPolynomial::gen_vertex(g, v)?;
            let edges: Vec<EdgeId> = g.edges_from(v).cloned().collect();
            for f in edges {
                let sf = StarPolynomial::gen_edge(g, &f)?;
                p = p.sub(&sf.mul(&sf.adjoint())?)?;
            }
            Ok(p)
        }
    }
}

// --- polynomial file format -------------------------------------------
//
// One term per line: `<re> <im> ; <mu> ; <nu>` where mu and nu are word
// literals (`f,g` or `@v`). `#` starts a comment. The writer emits terms
// in canonical order.

pub fn write_poly(p: &StarPolynomial) -> String {
    let mut out = String::new();
    for (m, c) in p.terms() {
        out.push_str(&format!("{c} ; {m}\n"));
    }
    out
}

pub fn parse_poly(g: &Arc<DirectedGraph>, text: &str) -> Result<StarPolynomial, AlgebraError> {
    let mut p = StarPolynomial::zero(g);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| AlgebraError::PolyParse { line, message };
        let parts: Vec<&str> = body.split(';').map(str::trim).collect();
        let [coeff, mu, nu] = parts.as_slice() else {
            return Err(err(format!(
                "expected `<re> <im> ; <mu> ; <nu>`, got `{body}`"
            )));
        };
        let mut nums = coeff.split_whitespace();
        let (re, im) = match (nums.next(), nums.next(), nums.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(err(format!("expected two rationals, got `{coeff}`"))),
        };
        let re = GaussianRational::parse_rational(re)
            .map_err(|e: RationalParseError| err(e.to_string()))?;
        let im = GaussianRational::parse_rational(im)
            .map_err(|e: RationalParseError| err(e.to_string()))?;
        let mu = WordLiteral::parse(mu)
            .map_err(|e: WordError| err(e.to_string()))?
            .to_graph_path(g)
            .map_err(|e| err(e.to_string()))?;
        let nu = WordLiteral::parse(nu)
            .map_err(|e: WordError| err(e.to_string()))?
            .to_graph_path(g)
            .map_err(|e| err(e.to_string()))?;
        let m = Monomial::new(mu, nu).map_err(|e| err(e.to_string()))?;
        p.add_term(m, GaussianRational::new(re, im));
    }
    Ok(p)
}
