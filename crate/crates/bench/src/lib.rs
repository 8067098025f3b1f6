//! Shared inputs for the benchmarks.

use tropline::lifting::{alpha_lifting, Lifting};
use tropline::Rat;

/// The alpha lifting of degree `delta` perturbed by at most 1/100.
pub fn perturbed_alpha(delta: i64, seed: u64) -> Lifting {
    alpha_lifting(delta)
        .expect("valid degree")
        .perturbed(&Rat::new(1, 100), seed)
}
