//! Shared fixtures for the integration suites: the standard small graphs
//! and seeded random instances.

// each test target uses its own subset of these helpers
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tck_core::scalar::GaussianRational;
use tck_core::staralg::{spanning_monomials, StarPolynomial};
use tck_core::words::Word;
use tck_core::{DirectedGraph, EdgeId};

/// Seed for the randomized suites; override with TCK_SEED.
pub fn suite_seed() -> u64 {
    std::env::var("TCK_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn parse(text: &str) -> Arc<DirectedGraph> {
    Arc::new(DirectedGraph::parse(text).expect("fixture graph parses"))
}

/// The four standard small graphs: a loop, a single arrow, a 2-cycle, and
/// a two-vertex graph with three edges.
pub fn standard_graphs() -> Vec<(&'static str, Arc<DirectedGraph>)> {
    vec![
        ("loop", parse("vertex v\nedge f v v\n")),
        ("arrow", parse("vertex u\nvertex v\nedge f u v\n")),
        ("two-cycle", parse("vertex u\nvertex v\nedge f u v\nedge g v u\n")),
        (
            "three-edge",
            parse("vertex u\nvertex v\nedge a u v\nedge b v u\nedge c v v\n"),
        ),
    ]
}

pub fn coefficient_pool() -> Vec<GaussianRational> {
    vec![
        GaussianRational::one(),
        -&GaussianRational::one(),
        GaussianRational::i(),
        GaussianRational::from_integer(2),
        GaussianRational::from_ratio(1, 2),
        GaussianRational::new(
            GaussianRational::from_ratio(-1, 2).re,
            GaussianRational::from_ratio(1, 3).re,
        ),
    ]
}

/// Random polynomial with terms of path length at most `max_len`;
/// `core_only` restricts to gauge-invariant terms.
pub fn random_polynomial(
    g: &Arc<DirectedGraph>,
    max_len: usize,
    core_only: bool,
    rng: &mut ChaCha8Rng,
) -> StarPolynomial {
    let monos: Vec<_> = spanning_monomials(g, max_len)
        .expect("finite graph")
        .into_iter()
        .filter(|m| !core_only || m.is_gauge_invariant())
        .collect();
    let pool = coefficient_pool();
    let terms = rng.random_range(1..=5usize);
    let picks = (0..terms).map(|_| {
        (
            monos[rng.random_range(0..monos.len())].clone(),
            pool[rng.random_range(0..pool.len())].clone(),
        )
    });
    StarPolynomial::from_terms(g, picks)
}

/// Random word over the graph's edge alphabet; not necessarily a path.
pub fn random_word(g: &Arc<DirectedGraph>, max_len: usize, rng: &mut ChaCha8Rng) -> Word {
    let alphabet: Vec<EdgeId> = g.edge_ids().cloned().collect();
    let len = rng.random_range(1..=max_len);
    Word::from_letters((0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())].clone()))
}
