//! Acceptance suite: every shipped criterion as a callable check, shared by
//! the CLI (`suite acceptance`) and the integration tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{CriterionResult, SuiteReport};

mod criteria;

pub use criteria::*;

/// Seeded generator for the randomized populations. ChaCha8 is a counter
/// based stream generator, so populations are reproducible from the seed
/// alone.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random disjoint interval union with at most `max_intervals` intervals,
/// coordinates within ±10 and gaps at least 1e−3.
pub fn random_union(rng: &mut ChaCha8Rng, max_intervals: usize) -> crate::IntervalUnion {
    let k = rng.gen_range(1..=max_intervals);
    let mut coords: Vec<f64> = Vec::with_capacity(2 * k);
    let mut x: f64 = rng.gen_range(-10.0..-5.0);
    for _ in 0..2 * k {
        x += rng.gen_range(1e-3..2.5);
        coords.push(x);
    }
    let spans: Vec<(f64, f64)> = coords.chunks(2).map(|c| (c[0], c[1])).collect();
    crate::IntervalUnion::new(spans)
}

/// Runs every acceptance criterion in order.
pub fn run_acceptance(seed: u64) -> SuiteReport {
    let checks: Vec<fn(u64) -> CriterionResult> = vec![
        criteria::c01_rearrangement_exactness,
        criteria::c02_lp_preservation,
        criteria::c03_seminorm_strict_decrease,
        criteria::c04_closed_form_seminorm,
        criteria::c05_derivative_formula,
        criteria::c06_local_vs_nonlocal_contrast,
        criteria::c07_height_closed_form,
        criteria::c08_convexity_suite,
        criteria::c09_truncated_symmetrization,
        criteria::c10_stationary_profile,
        criteria::c11_descent_and_perturbation,
        criteria::c12_determinism,
    ];
    let results = checks.iter().map(|c| c(seed)).collect();
    SuiteReport { seed, results }
}
