//! Randomized cross-module invariants over the standard graphs, seeded for
//! reproducibility (TCK_SEED overrides).

mod common;

use num_complex::Complex64;

use common::{random_polynomial, rng, standard_graphs, suite_seed};
use tck_core::analysis::{core_norm, gauge_average, spectral_norm, CoreElement};
use tck_core::fock::TruncatedFockRep;

#[test]
fn core_norm_is_a_c_star_seminorm() {
    for (gi, (name, g)) in standard_graphs().iter().enumerate() {
        let mut rng = rng(suite_seed() ^ (0x900 + gi as u64));
        for case in 0..25 {
            let r = CoreElement::new(random_polynomial(g, 2, true, &mut rng)).unwrap();
            let square = CoreElement::new(r.poly().adjoint().mul(r.poly()).unwrap()).unwrap();
            let n = core_norm(&r).unwrap();
            let n2 = core_norm(&square).unwrap();
            assert!(
                (n2 - n * n).abs() <= 1e-8 * (1.0 + n * n),
                "{name} case {case}: |R*R| = {n2} vs |R|^2 = {}",
                n * n
            );
        }
    }
}

#[test]
fn matrix_norm_never_exceeds_the_formula() {
    // the formula is an upper bound for the represented norm at any depth
    for (gi, (name, g)) in standard_graphs().iter().enumerate() {
        let mut rng = rng(suite_seed() ^ (0xA00 + gi as u64));
        for case in 0..25 {
            let r = CoreElement::new(random_polynomial(g, 2, true, &mut rng)).unwrap();
            let bound = core_norm(&r).unwrap();
            for depth in [1usize, 2, 4] {
                let rep = TruncatedFockRep::build(g, depth).unwrap();
                let norm = spectral_norm(&rep.represent(r.poly()).unwrap());
                assert!(
                    norm <= bound + 1e-8,
                    "{name} case {case} depth {depth}: {norm} > {bound}"
                );
            }
        }
    }
}

#[test]
fn gauge_average_is_idempotent_and_positive() {
    for (gi, (name, g)) in standard_graphs().iter().enumerate() {
        let rep = TruncatedFockRep::build(g, 3).unwrap();
        let modes = 2 * rep.depth() + 3;
        let mut rng = rng(suite_seed() ^ (0xB00 + gi as u64));
        for case in 0..10 {
            let poly = random_polynomial(g, 2, false, &mut rng);
            let m = rep.represent(&poly).unwrap();
            let avg = gauge_average(&rep, &m, modes).unwrap();
            let twice = gauge_average(&rep, &avg, modes).unwrap();
            assert!(
                twice.sub(&avg).unwrap().max_abs() < 1e-12,
                "{name} case {case}: averaging twice moved the matrix"
            );

            // averaging a positive matrix keeps it positive
            let psd = m.adjoint().mul(&m).unwrap();
            let avg = gauge_average(&rep, &psd, modes).unwrap();
            let dense = avg.to_dense();
            let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
            let min_eig = nalgebra::SymmetricEigen::new(herm)
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            assert!(
                min_eig > -1e-10,
                "{name} case {case}: averaged positive matrix has eigenvalue {min_eig}"
            );
        }
    }
}
