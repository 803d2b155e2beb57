//! Symbolic and numeric workbench for the Toeplitz algebra of a finite
//! directed graph: exact rewriting on the spanning monomials `s_mu s_nu*`,
//! truncated Fock-space matrix models, and verifiers for the algebra's
//! relations, norm formulas, partitions of unity, and faithfulness and
//! simplicity criteria, together with a power-partial-isometry toolbox.

pub mod analysis;
pub mod fock;
pub mod graph;
pub mod ppi;
pub mod report;
pub mod scalar;
pub mod sparse;
pub mod staralg;
pub mod words;

pub use graph::{DirectedGraph, EdgeId, OutDegree, VertexId};
pub use report::{Finding, VerificationReport};
pub use scalar::GaussianRational;
pub use sparse::SparseMatrix;
pub use staralg::{Monomial, StarPolynomial};
pub use words::{GraphPath, JoinResult, Word, WordLiteral};
