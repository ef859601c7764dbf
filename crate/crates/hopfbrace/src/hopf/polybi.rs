//! The primitive polynomial bialgebra on commuting generators: `K[x_1..x_d]`
//! with `Δ(x_i) = x_i⊗1 + 1⊗x_i` and `ε(x_i) = 0`, over the scalars.

use rand::{Rng, RngCore};

use crate::coeff::{HSeries, Rational, Window};
use crate::hopf::{HopfAlgebroid, Tensor, WordSum};
use crate::linear::LinComb;
use crate::sample::{random_series, SizeBound};

/// Monomial exponent vector.
pub type Mono = Vec<u32>;

#[derive(Debug, Clone)]
pub struct PolyBialgebra {
    dim: usize,
    window: Window,
}

impl PolyBialgebra {
    pub fn new(dim: usize, window: Window) -> Self {
        assert!(dim >= 1);
        PolyBialgebra { dim, window }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut out = Rational::from_integer(1.into());
    for i in 0..k {
        out *= Rational::from_integer((n - i).into());
        out /= Rational::from_integer((i + 1).into());
    }
    out
}

/// All componentwise splits `b + c = a` with multinomial coefficients.
pub fn binomial_splits(a: &[u32]) -> Vec<(Mono, Mono, Rational)> {
    let mut out: Vec<(Mono, Mono, Rational)> =
        vec![(Vec::new(), Vec::new(), Rational::from_integer(1.into()))];
    for &ai in a {
        let mut next = Vec::with_capacity(out.len() * (ai as usize + 1));
        for (l, r, c) in &out {
            for k in 0..=ai {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.push(k);
                r2.push(ai - k);
                next.push((l2, r2, c * binomial(ai, k)));
            }
        }
        out = next;
    }
    out
}

pub fn monos_up_to(dim: usize, degree: usize) -> Vec<Mono> {
    let mut out = vec![vec![0u32; dim]];
    for _ in 0..degree {
        let mut next: Vec<Mono> = Vec::new();
        for m in &out {
            for i in 0..dim {
                let mut m2 = m.clone();
                m2[i] += 1;
                next.push(m2);
            }
        }
        out.extend(next);
        out.sort();
        out.dedup();
    }
    out
}

pub fn fmt_mono(m: &[u32], var: &str) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("{var}{}", i + 1)
            } else {
                format!("{var}{}^{e}", i + 1)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl HopfAlgebroid for PolyBialgebra {
    type HKey = Mono;
    type RElem = HSeries;

    fn name(&self) -> String {
        format!("K[x1..x{}] primitive", self.dim)
    }

    fn window(&self) -> Window {
        self.window
    }

    fn r_zero(&self) -> HSeries {
        HSeries::zero(self.window)
    }
    fn r_one(&self) -> HSeries {
        HSeries::one(self.window)
    }
    fn r_add(&self, a: &HSeries, b: &HSeries) -> HSeries {
        a.add(b)
    }
    fn r_scale(&self, c: &HSeries, a: &HSeries) -> HSeries {
        a.mul(c)
    }
    fn r_mul(&self, a: &HSeries, b: &HSeries) -> HSeries {
        a.mul(b)
    }
    fn r_eq(&self, a: &HSeries, b: &HSeries) -> bool {
        a == b
    }
    fn r_order_part(&self, a: &HSeries, k: i64) -> HSeries {
        HSeries::monomial(a.coeff(k), 0, a.window())
    }
    fn r_fmt(&self, a: &HSeries) -> String {
        a.to_string()
    }
    fn r_random(&self, bound: &SizeBound, rng: &mut dyn RngCore) -> HSeries {
        random_series(rng, bound, self.window)
    }
    fn r_basis(&self, _bound: &SizeBound) -> Vec<HSeries> {
        vec![HSeries::one(self.window)]
    }

    fn h_unit(&self) -> LinComb<Mono> {
        LinComb::term(vec![0; self.dim], HSeries::one(self.window))
    }

    fn h_mul(&self, a: &Mono, b: &Mono) -> LinComb<Mono> {
        let sum: Mono = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
        LinComb::term(sum, HSeries::one(self.window))
    }

    fn alpha(&self, a: &HSeries) -> LinComb<Mono> {
        LinComb::term(vec![0; self.dim], a.clone())
    }

    fn beta(&self, a: &HSeries) -> LinComb<Mono> {
        self.alpha(a)
    }

    fn coproduct(&self, h: &Mono) -> Tensor<Mono, HSeries> {
        let mut words = LinComb::zero();
        for (l, r, c) in binomial_splits(h) {
            words.add_term(vec![l, r], HSeries::from_rational(c, self.window));
        }
        Tensor::Words(2, words)
    }

    fn counit(&self, h: &Mono) -> HSeries {
        if h.iter().all(|&e| e == 0) {
            HSeries::one(self.window)
        } else {
            HSeries::zero(self.window)
        }
    }

    fn act(&self, h: &Mono, a: &HSeries) -> HSeries {
        self.counit(h).mul(a)
    }

    fn h_basis(&self, bound: &SizeBound) -> Vec<Mono> {
        monos_up_to(self.dim, bound.degree.max(1))
    }

    fn key_fmt(&self, k: &Mono) -> String {
        fmt_mono(k, "x")
    }

    fn normalize(&self, _arity: usize, words: WordSum<Mono>) -> WordSum<Mono> {
        words
    }

    fn h_random(&self, bound: &SizeBound, rng: &mut dyn RngCore) -> LinComb<Mono> {
        let basis = self.h_basis(bound);
        let mut out = LinComb::zero();
        for _ in 0..bound.max_terms.max(1) {
            let k = basis[rng.gen_range(0..basis.len())].clone();
            out.add_term(k, random_series(rng, bound, self.window));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{delta_power, t_eq, Tensor};

    #[test]
    fn primitive_coproduct() {
        let m = PolyBialgebra::new(2, Window::power(2));
        let one = HSeries::one(m.window);
        let x = LinComb::term(vec![1, 0], one.clone());
        let d = delta_power(&m, &x, 2);
        let mut words = LinComb::zero();
        words.add_term(vec![vec![1, 0], vec![0, 0]], one.clone());
        words.add_term(vec![vec![0, 0], vec![1, 0]], one.clone());
        assert!(t_eq(&m, &d, &Tensor::Words(2, words)));
    }

    #[test]
    fn coproduct_of_square_has_binomials() {
        let m = PolyBialgebra::new(1, Window::power(2));
        let x2 = LinComb::term(vec![2u32], HSeries::one(m.window));
        let d = delta_power(&m, &x2, 2);
        let Tensor::Words(_, w) = &d else { panic!() };
        let mid = w.coeff(&vec![vec![1u32], vec![1u32]]).expect("cross term");
        assert_eq!(mid.coeff(0), crate::coeff::rat(2, 1));
    }
}
