//! The free monoid over the edge alphabet with its prefix (quasi-lattice)
//! order, and the specialization to composable graph paths.
//!
//! A `Word` is any finite sequence of edge identifiers; composability is not
//! a property of words. A `GraphPath` is a word that composes in a fixed
//! graph (`dst` of each edge equals `src` of the next), or a single vertex
//! standing for the empty path based there.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{DirectedGraph, EdgeId, GraphError, VertexId};

#[derive(Debug, Error, PartialEq)]
pub enum WordError {
    #[error("`{0}` is not a prefix of `{1}`")]
    NotPrefix(Word, Word),
    #[error("quotient difference requires distinct words below the common bound")]
    EqualWords,
    #[error("quotient difference undefined: the two quotients have no common upper bound")]
    IncomparableQuotients,
    #[error("malformed word literal `{0}`")]
    BadLiteral(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edges `{0}` and `{1}` do not compose (dst of the first is not src of the second)")]
    NonComposable(EdgeId, EdgeId),
    #[error("the empty word needs a basepoint vertex to become a path")]
    NeedsBasepoint,
    #[error("graph has omega vertices; path enumeration requires finite out-degrees")]
    OmegaVertex,
}

/// An element of the free monoid over edge identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<EdgeId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = EdgeId>) -> Self {
        Word(letters.into_iter().collect())
    }

    pub fn letters(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// The prefix order: `self <= other` iff `other = self * r`.
    pub fn le(&self, other: &Word) -> bool {
        self.0.len() <= other.0.len() && self.0 == other.0[..self.0.len()]
    }

    /// Strict prefix.
    pub fn lt(&self, other: &Word) -> bool {
        self.0.len() < other.0.len() && self.le(other)
    }

    /// Least upper bound in the prefix order; `Infinity` when the words
    /// have no common upper bound.
    pub fn join(&self, other: &Word) -> JoinResult {
        if self.le(other) {
            JoinResult::Word(other.clone())
        } else if other.le(self) {
            JoinResult::Word(self.clone())
        } else {
            JoinResult::Infinity
        }
    }

    /// Maximal common prefix of the two words.
    pub fn longest_common_prefix(&self, other: &Word) -> Word {
        let n = self
            .0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count();
        Word(self.0[..n].to_vec())
    }

    /// The unique `r` with `self * r = other`, when `self <= other`.
    pub fn left_quotient(&self, other: &Word) -> Result<Word, WordError> {
        if self.le(other) {
            Ok(Word(other.0[self.0.len()..].to_vec()))
        } else {
            Err(WordError::NotPrefix(self.clone(), other.clone()))
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("@");
        }
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

/// Result of a join in the quasi-lattice order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinResult {
    Word(Word),
    Infinity,
}

impl JoinResult {
    pub fn is_infinity(&self) -> bool {
        matches!(self, JoinResult::Infinity)
    }

    pub fn word(&self) -> Option<&Word> {
        match self {
            JoinResult::Word(w) => Some(w),
            JoinResult::Infinity => None,
        }
    }
}

/// The separating word used to refine partition projections: for distinct
/// `s, t` below `c` whose quotients `s^-1 c` and `t^-1 c` are comparable,
/// this is the quotient of the longer by the shorter. Never empty.
pub fn quotient_difference(s: &Word, t: &Word, c: &Word) -> Result<Word, WordError> {
    if s == t {
        return Err(WordError::EqualWords);
    }
    let sc = s.left_quotient(c)?;
    let tc = t.left_quotient(c)?;
    if sc.lt(&tc) {
        sc.left_quotient(&tc)
    } else if tc.lt(&sc) {
        tc.left_quotient(&sc)
    } else {
        // equality is impossible here since s != t share the bound c
        Err(WordError::IncomparableQuotients)
    }
}

/// A composable path in a fixed graph. Length 0 is a vertex.
#[derive(Debug, Clone)]
pub struct GraphPath {
    graph: Arc<DirectedGraph>,
    edges: Vec<EdgeId>,
    source: VertexId,
    range: VertexId,
}

impl GraphPath {
    /// The empty path based at `v`.
    pub fn at_vertex(graph: &Arc<DirectedGraph>, v: &VertexId) -> Result<Self, PathError> {
        if !graph.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v.as_str().into()).into());
        }
        Ok(GraphPath {
            graph: Arc::clone(graph),
            edges: Vec::new(),
            source: v.clone(),
            range: v.clone(),
        })
    }

    /// A path from a nonempty, composable edge sequence.
    pub fn from_edges(graph: &Arc<DirectedGraph>, edges: &[EdgeId]) -> Result<Self, PathError> {
        let first = edges.first().ok_or(PathError::NeedsBasepoint)?;
        let source = graph.edge_src(first)?.clone();
        let mut range = graph.edge_dst(first)?.clone();
        for pair in edges.windows(2) {
            let next_src = graph.edge_src(&pair[1])?;
            if &range != next_src {
                return Err(PathError::NonComposable(pair[0].clone(), pair[1].clone()));
            }
            range = graph.edge_dst(&pair[1])?.clone();
        }
        Ok(GraphPath {
            graph: Arc::clone(graph),
            edges: edges.to_vec(),
            source,
            range,
        })
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn word(&self) -> Word {
        Word(self.edges.clone())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// Length-0 paths are vertices.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertex the path starts at.
    pub fn source(&self) -> &VertexId {
        &self.source
    }

    /// Vertex the path ends at.
    pub fn range(&self) -> &VertexId {
        &self.range
    }

    /// Prepend one edge; `None` unless dst(f) = source(self).
    pub fn prepend(&self, f: &EdgeId) -> Option<GraphPath> {
        if self.graph.edge_dst(f).ok()? != &self.source {
            return None;
        }
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(f.clone());
        edges.extend_from_slice(&self.edges);
        Some(GraphPath {
            graph: Arc::clone(&self.graph),
            edges,
            source: self.graph.edge_src(f).ok()?.clone(),
            range: self.range.clone(),
        })
    }

    /// Concatenation; `None` unless range(self) = source(other).
    pub fn concat(&self, other: &GraphPath) -> Option<GraphPath> {
        if self.range != other.source {
            return None;
        }
        Some(GraphPath {
            graph: Arc::clone(&self.graph),
            edges: self.edges.iter().chain(other.edges.iter()).cloned().collect(),
            source: self.source.clone(),
            range: other.range.clone(),
        })
    }

    /// The sub-path after dropping the first `n` edges; based at the
    /// junction vertex when everything is dropped.
    pub fn suffix_after(&self, n: usize) -> GraphPath {
        assert!(n <= self.edges.len(), "suffix index out of range");
        if n == self.edges.len() {
            return GraphPath {
                graph: Arc::clone(&self.graph),
                edges: Vec::new(),
                source: self.range.clone(),
                range: self.range.clone(),
            };
        }
        let edges = self.edges[n..].to_vec();
        let source = self
            .graph
            .edge_src(&edges[0])
            .expect("path edges are in the graph")
            .clone();
        GraphPath {
            graph: Arc::clone(&self.graph),
            edges,
            source,
            range: self.range.clone(),
        }
    }

    /// Path-aware prefix test: for an empty `other` this requires
    /// source(self) = basepoint(other), not just the trivial word relation.
    pub fn has_path_prefix(&self, other: &GraphPath) -> bool {
        if other.is_vertex() {
            self.source == other.source
        } else {
            other.word().le(&self.word())
        }
    }
}

// Path identity is (edges, source); the range is determined, and the graph
// is tracked separately by the structures that own paths.
impl PartialEq for GraphPath {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.source == other.source
    }
}

impl Eq for GraphPath {}

impl Ord for GraphPath {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edges.len(), &self.edges, &self.source).cmp(&(
            other.edges.len(),
            &other.edges,
            &other.source,
        ))
    }
}

impl PartialOrd for GraphPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::hash::Hash for GraphPath {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.edges.hash(state);
        self.source.hash(state);
    }
}

impl fmt::Display for GraphPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vertex() {
            write!(f, "@{}", self.source)
        } else {
            write!(f, "{}", self.word())
        }
    }
}

/// True iff the word's letters are edges of `g` composing into a path.
pub fn is_graph_path(g: &DirectedGraph, w: &Word) -> Result<bool, PathError> {
    let mut prev_dst: Option<&VertexId> = None;
    for id in w.letters() {
        let src = g.edge_src(id)?;
        if let Some(d) = prev_dst {
            if d != src {
                return Ok(false);
            }
        }
        prev_dst = Some(g.edge_dst(id)?);
    }
    Ok(true)
}

/// Promote a word to a path; the empty word needs a basepoint.
pub fn to_path(
    g: &Arc<DirectedGraph>,
    w: &Word,
    basepoint: Option<&VertexId>,
) -> Result<GraphPath, PathError> {
    if w.is_empty() {
        let v = basepoint.ok_or(PathError::NeedsBasepoint)?;
        GraphPath::at_vertex(g, v)
    } else {
        GraphPath::from_edges(g, w.letters())
    }
}

/// Word/path literal as written in polynomial files and on the CLI:
/// comma-separated edge ids, `@v` for the empty path based at `v`, bare
/// `@` for the identity word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordLiteral {
    Letters(Word),
    Vertex(VertexId),
    Identity,
}

impl WordLiteral {
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let t = text.trim();
        if t.is_empty() {
            return Err(WordError::BadLiteral(text.into()));
        }
        if t == "@" {
            return Ok(WordLiteral::Identity);
        }
        if let Some(v) = t.strip_prefix('@') {
            let v = VertexId::new(v).map_err(|_| WordError::BadLiteral(text.into()))?;
            return Ok(WordLiteral::Vertex(v));
        }
        let mut letters = Vec::new();
        for part in t.split(',') {
            let id =
                EdgeId::new(part.trim()).map_err(|_| WordError::BadLiteral(text.into()))?;
            letters.push(id);
        }
        Ok(WordLiteral::Letters(Word(letters)))
    }

    /// The underlying word, forgetting any basepoint.
    pub fn word(&self) -> Word {
        match self {
            WordLiteral::Letters(w) => w.clone(),
            _ => Word::empty(),
        }
    }

    pub fn to_graph_path(&self, g: &Arc<DirectedGraph>) -> Result<GraphPath, PathError> {
        match self {
            WordLiteral::Letters(w) => GraphPath::from_edges(g, w.letters()),
            WordLiteral::Vertex(v) => GraphPath::at_vertex(g, v),
            WordLiteral::Identity => Err(PathError::NeedsBasepoint),
        }
    }
}

impl fmt::Display for WordLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordLiteral::Letters(w) => write!(f, "{w}"),
            WordLiteral::Vertex(v) => write!(f, "@{v}"),
            WordLiteral::Identity => f.write_str("@"),
        }
    }
}

/// All paths of length 0..=max_len, level by level, lexicographic within
/// each level. Level 0 is the vertices.
pub fn enumerate_paths(
    g: &Arc<DirectedGraph>,
    max_len: usize,
) -> Result<Vec<Vec<GraphPath>>, PathError> {
    if g.has_omega() {
        return Err(PathError::OmegaVertex);
    }
    let mut levels: Vec<Vec<GraphPath>> = Vec::with_capacity(max_len + 1);
    let level0: Vec<GraphPath> = g
        .vertices()
        .map(|v| GraphPath::at_vertex(g, v).expect("graph vertex"))
        .collect();
    levels.push(level0);
    for k in 0..max_len {
        // prepending in lexicographic edge order keeps each level sorted
        let mut next = Vec::new();
        for f in g.edge_ids() {
            for p in &levels[k] {
                if let Some(q) = p.prepend(f) {
                    next.push(q);
                }
            }
        }
        levels.push(next);
    }
    Ok(levels)
}
