//! Directed graphs with optional infinite-emitter annotations, plus the
//! structural predicates the faithfulness and simplicity criteria consume.
//!
//! Convention throughout the crate: an edge goes `src -> dst`, so `src` is
//! the vertex the edge starts at and `dst` the vertex it points to.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

fn valid_id(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

/// Opaque vertex identifier: nonempty, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

/// Opaque edge identifier: nonempty, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Result<Self, GraphError> {
        let s = s.into();
        if valid_id(&s) {
            Ok(VertexId(s))
        } else {
            Err(GraphError::BadId(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl EdgeId {
    pub fn new(s: impl Into<String>) -> Result<Self, GraphError> {
        let s = s.into();
        if valid_id(&s) {
            Ok(EdgeId(s))
        } else {
            Err(GraphError::BadId(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("identifier `{0}` is empty or contains whitespace")]
    BadId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
}

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {kind}")]
pub struct GraphParseError {
    pub line: usize,
    pub kind: GraphParseErrorKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphParseErrorKind {
    #[error("malformed declaration `{0}` (expected `vertex <id> [omega]` or `edge <id> <src> <dst>`)")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Out-valency of a vertex; `Omega` marks a declared infinite emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutDegree {
    Finite(usize),
    Omega,
}

/// Whether the graph is simple as witnessed by the emitter/transitivity criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple,
    /// No edges and no declared infinite emitters: the criteria assume at
    /// least one edge, so no verdict applies.
    NotApplicable,
}

#[derive(Debug, Clone)]
pub struct SimplicityVerdict {
    pub verdict: Simplicity,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Edge {
    src: VertexId,
    dst: VertexId,
}

/// A finite directed graph. Immutable after construction; all iteration is
/// lexicographic by identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    omega: BTreeSet<VertexId>,
}

impl DirectedGraph {
    /// Programmatic constructor. Edge endpoints must be among the vertices,
    /// omega vertices among the vertices.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
        omega: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self, GraphError> {
        let mut g = DirectedGraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
            omega: BTreeSet::new(),
        };
        for v in vertices {
            if !g.vertices.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v.0));
            }
        }
        for (id, src, dst) in edges {
            if !g.vertices.contains(&src) {
                return Err(GraphError::UnknownVertex(src.0));
            }
            if !g.vertices.contains(&dst) {
                return Err(GraphError::UnknownVertex(dst.0));
            }
            if g.edges.insert(id.clone(), Edge { src, dst }).is_some() {
                return Err(GraphError::DuplicateEdge(id.0));
            }
        }
        for v in omega {
            if !g.vertices.contains(&v) {
                return Err(GraphError::UnknownVertex(v.0));
            }
            g.omega.insert(v);
        }
        Ok(g)
    }

    /// Parse the line-oriented graph text format:
    /// `vertex <id> [omega]`, `edge <id> <src> <dst>`, `#` comments,
    /// blank lines ignored. Declarations may appear in any order.
    pub fn parse(text: &str) -> Result<Self, GraphParseError> {
        let err = |line, kind| GraphParseError { line, kind };
        let lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                (i + 1, body.split_whitespace().collect::<Vec<_>>())
            })
            .filter(|(_, toks)| !toks.is_empty())
            .collect();

        let mut g = DirectedGraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
            omega: BTreeSet::new(),
        };

        // Vertices first so edges may reference vertices declared later.
        for (line, toks) in &lines {
            if toks[0] != "vertex" {
                continue;
            }
            let id = match toks.as_slice() {
                ["vertex", id] | ["vertex", id, "omega"] => *id,
                _ => return Err(err(*line, GraphParseErrorKind::Malformed(toks.join(" ")))),
            };
            let v = VertexId::new(id).map_err(|e| err(*line, e.into()))?;
            if !g.vertices.insert(v.clone()) {
                return Err(err(*line, GraphError::DuplicateVertex(v.0).into()));
            }
            if toks.len() == 3 {
                g.omega.insert(v);
            }
        }
        for (line, toks) in &lines {
            match toks.as_slice() {
                ["vertex", ..] => {}
                ["edge", id, src, dst] => {
                    let id = EdgeId::new(*id).map_err(|e| err(*line, e.into()))?;
                    let src = VertexId::new(*src).map_err(|e| err(*line, e.into()))?;
                    let dst = VertexId::new(*dst).map_err(|e| err(*line, e.into()))?;
                    if !g.vertices.contains(&src) {
                        return Err(err(*line, GraphError::UnknownVertex(src.0).into()));
                    }
                    if !g.vertices.contains(&dst) {
                        return Err(err(*line, GraphError::UnknownVertex(dst.0).into()));
                    }
                    if g.edges.insert(id.clone(), Edge { src, dst }).is_some() {
                        return Err(err(*line, GraphError::DuplicateEdge(id.0).into()));
                    }
                }
                _ => return Err(err(*line, GraphParseErrorKind::Malformed(toks.join(" ")))),
            }
        }
        Ok(g)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.keys()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, f: &EdgeId) -> bool {
        self.edges.contains_key(f)
    }

    pub fn omega_vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.omega.iter()
    }

    pub fn has_omega(&self) -> bool {
        !self.omega.is_empty()
    }

    pub fn is_omega(&self, v: &VertexId) -> bool {
        self.omega.contains(v)
    }

    pub fn edge_src(&self, f: &EdgeId) -> Result<&VertexId, GraphError> {
        self.edges
            .get(f)
            .map(|e| &e.src)
            .ok_or_else(|| GraphError::UnknownEdge(f.0.clone()))
    }

    pub fn edge_dst(&self, f: &EdgeId) -> Result<&VertexId, GraphError> {
        self.edges
            .get(f)
            .map(|e| &e.dst)
            .ok_or_else(|| GraphError::UnknownEdge(f.0.clone()))
    }

    /// Edges starting at `v`, lexicographic.
    pub fn edges_from<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a EdgeId> + 'a {
        self.edges
            .iter()
            .filter(move |(_, e)| e.src == *v)
            .map(|(id, _)| id)
    }

    /// Declared out-valency, or `Omega` for a flagged infinite emitter
    /// (listed edges are then a finite sample of the emission).
    pub fn out_degree(&self, v: &VertexId) -> Result<OutDegree, GraphError> {
        if !self.vertices.contains(v) {
            return Err(GraphError::UnknownVertex(v.0.clone()));
        }
        if self.omega.contains(v) {
            Ok(OutDegree::Omega)
        } else {
            Ok(OutDegree::Finite(self.edges_from(v).count()))
        }
    }

    /// Vertices emitting no edge (and not flagged omega).
    pub fn sinks(&self) -> BTreeSet<VertexId> {
        self.vertices
            .iter()
            .filter(|v| !self.omega.contains(v) && self.edges_from(v).next().is_none())
            .cloned()
            .collect()
    }

    /// Vertices receiving no edge.
    pub fn sources(&self) -> BTreeSet<VertexId> {
        let targets: BTreeSet<&VertexId> = self.edges.values().map(|e| &e.dst).collect();
        self.vertices
            .iter()
            .filter(|v| !targets.contains(v))
            .cloned()
            .collect()
    }

    /// Smallest superset H of `set` with dst(f) in H whenever src(f) in H.
    pub fn hereditary_closure(
        &self,
        set: &BTreeSet<VertexId>,
    ) -> Result<BTreeSet<VertexId>, GraphError> {
        for v in set {
            if !self.vertices.contains(v) {
                return Err(GraphError::UnknownVertex(v.0.clone()));
            }
        }
        let mut closed = set.clone();
        let mut queue: VecDeque<VertexId> = set.iter().cloned().collect();
        while let Some(v) = queue.pop_front() {
            for f in self.edges_from(&v) {
                let w = &self.edges[f].dst;
                if closed.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
        Ok(closed)
    }

    /// Vertices reachable from `v` by a directed path of length >= 0.
    pub fn reachable_from(&self, v: &VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([v.clone()]);
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(u) = queue.pop_front() {
            for f in self.edges_from(&u) {
                let w = &self.edges[f].dst;
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
        seen
    }

    /// True iff every ordered pair of vertices is joined by a directed path
    /// (the empty path witnesses v ~> v). On failure returns the first
    /// failing pair in lexicographic order.
    pub fn is_transitive(&self) -> (bool, Option<(VertexId, VertexId)>) {
        for v in &self.vertices {
            let reach = self.reachable_from(v);
            for w in &self.vertices {
                if !reach.contains(w) {
                    return (false, Some((v.clone(), w.clone())));
                }
            }
        }
        (true, None)
    }

    /// Vertices of finite out-valency: the support of the ideal of
    /// diagonal elements acting compactly on the edge bimodule.
    pub fn compact_ideal_support(&self) -> BTreeSet<VertexId> {
        self.vertices.difference(&self.omega).cloned().collect()
    }

    /// Simple iff every vertex is a declared infinite emitter and the graph
    /// is transitive. Applies only when there is at least one edge or one
    /// omega vertex.
    pub fn simplicity_verdict(&self) -> SimplicityVerdict {
        if self.edges.is_empty() && self.omega.is_empty() {
            return SimplicityVerdict {
                verdict: Simplicity::NotApplicable,
                reasons: vec!["graph has no edges and no omega vertices".into()],
            };
        }
        let mut reasons = Vec::new();
        for v in self.vertices.difference(&self.omega) {
            reasons.push(format!("vertex {v} emits finitely many edges"));
        }
        let (transitive, witness) = self.is_transitive();
        if !transitive {
            let (v, w) = witness.expect("non-transitive graph has a witness");
            reasons.push(format!("({v},{w}) not joined by a directed path"));
        }
        SimplicityVerdict {
            verdict: if reasons.is_empty() {
                Simplicity::Simple
            } else {
                Simplicity::NotSimple
            },
            reasons,
        }
    }
}

#[cfg(test)]
pub(crate) mod testgraphs {
    use super::*;

    pub fn parse(text: &str) -> DirectedGraph {
        DirectedGraph::parse(text).expect("test graph parses")
    }

    /// Single vertex, single loop edge f.
    pub fn loop_graph() -> DirectedGraph {
        parse("vertex v\nedge f v v\n")
    }

    /// Two vertices, one edge u -> v.
    pub fn arrow_graph() -> DirectedGraph {
        parse("vertex u\nvertex v\nedge f u v\n")
    }

    /// Two vertices with edges f: u -> v and g: v -> u.
    pub fn two_cycle() -> DirectedGraph {
        parse("vertex u\nvertex v\nedge f u v\nedge g v u\n")
    }

    /// Two vertices, three edges: a: u -> v, b: v -> u, c: v -> v.
    pub fn three_edge() -> DirectedGraph {
        parse("vertex u\nvertex v\nedge a u v\nedge b v u\nedge c v v\n")
    }
}
