//! Deterministic random generation for the axiom suites.
//!
//! Every suite takes a 64-bit seed and a [`SizeBound`]; identical inputs give
//! identical samples, so every failure witness can be replayed from its seed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{HSeries, Rational, Window};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent per-sample seed; reports quote these.
pub fn sample_seed(suite_seed: u64, index: u64) -> u64 {
    suite_seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(index).rotate_left(17)
}

/// Bounds that keep random elements small enough for exact arithmetic to
/// stay fast: term count, coefficient height, generator degree, ℏ order.
#[derive(Debug, Clone, Copy)]
pub struct SizeBound {
    pub max_terms: usize,
    pub coeff_height: i64,
    pub degree: usize,
    pub hbar_order: i64,
}

impl SizeBound {
    pub fn small() -> Self {
        SizeBound { max_terms: 2, coeff_height: 3, degree: 2, hbar_order: 0 }
    }

    pub fn with_degree(degree: usize) -> Self {
        SizeBound { degree, ..Self::small() }
    }

    pub fn with_hbar(mut self, order: i64) -> Self {
        self.hbar_order = order;
        self
    }
}

pub fn random_rational(rng: &mut dyn RngCore, height: i64) -> Rational {
    let h = height.max(1);
    let num = rng.gen_range(-h..=h);
    let den = rng.gen_range(1..=h);
    Rational::new(num.into(), den.into())
}

pub fn random_nonzero_rational(rng: &mut dyn RngCore, height: i64) -> Rational {
    loop {
        let q = random_rational(rng, height);
        if !num_traits::Zero::is_zero(&q) {
            return q;
        }
    }
}

/// A random series supported on ℏ-orders `0..=bound.hbar_order`.
pub fn random_series(rng: &mut dyn RngCore, bound: &SizeBound, window: Window) -> HSeries {
    let top = bound.hbar_order.min(window.order);
    let mut s = HSeries::zero(window);
    for e in 0..=top {
        if rng.gen_bool(0.6) {
            s = s.add(&HSeries::monomial(random_rational(rng, bound.coeff_height), e, window));
        }
    }
    if s.is_zero() {
        s = HSeries::from_rational(random_nonzero_rational(rng, bound.coeff_height), window);
    }
    s
}
