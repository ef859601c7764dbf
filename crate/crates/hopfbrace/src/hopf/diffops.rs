//! The differential-operator Hopf algebroids: the polynomial Weyl model
//! `H = D` over `R = K[λ_1..λ_d][[ℏ]]` with `α = β` the inclusion,
//! `Δ(∂_i) = ∂_i⊗1 + 1⊗∂_i`, `Δ(f) = f⊗1`, `ε(D) = D(1)`; and its
//! quantum-groupoid extension `H = U(g) ⊗ D[[ℏ]]` over the same base, with
//! Δ the tensor product of the two Hopf coproducts.
//!
//! Tensor powers are kept in coefficient-left polydifferential normal form:
//! all λ-coefficients gathered in slot 1 through the `I_n` relations, slots
//! 2..n constant-coefficient.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::coeff::{HSeries, Window};
use crate::hopf::polybi::{fmt_mono, monos_up_to};
use crate::hopf::{HopfAlgebroid, Tensor, Tp, WordSum};
use crate::liepair::{Mono, ValidatedPair};
use crate::linear::LinComb;
use crate::sample::{random_series, SizeBound};
use crate::weyl::{fmt_poly, poly_derivative, weyl_mul_keys, Poly, WeylKey};

/// Basis key: a `U(g)` PBW monomial (empty when the model has no Lie part)
/// tensor a normal-ordered Weyl key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DKey {
    pub g: Mono,
    pub w: WeylKey,
}

/// The model: `U(g) ⊗ D[[ℏ]]` over `K[λ][[ℏ]]`, or plain `D[[ℏ]]` when
/// `pair` is absent.
#[derive(Clone)]
pub struct DiffOpAlgebroid {
    pub pair: Option<Arc<ValidatedPair>>,
    /// Number of λ variables (equals `dim_l` when a pair is present).
    pub dvars: usize,
    pub window: Window,
    /// Equality is decided modulo `ℏ^(cmp+1)`; `None` means the window
    /// order. Laurent-heavy pipelines compute in a widened window and set
    /// this to the requested order.
    pub cmp: Option<i64>,
}

/// The polynomial Weyl model on `d` variables.
pub fn weyl_model(d: usize, window: Window) -> DiffOpAlgebroid {
    DiffOpAlgebroid { pair: None, dvars: d, window, cmp: None }
}

/// The quantum groupoid `U(g) ⊗ D[[ℏ]]` of a Lie algebra pair.
pub fn hgl_model(pair: Arc<ValidatedPair>, window: Window) -> DiffOpAlgebroid {
    let dvars = pair.dim_l;
    DiffOpAlgebroid { pair: Some(pair), dvars, window, cmp: None }
}

impl DiffOpAlgebroid {
    pub fn with_cmp_order(mut self, order: i64) -> Self {
        self.cmp = Some(order);
        self
    }

    fn dim_g(&self) -> usize {
        self.pair.as_ref().map(|p| p.dim_g).unwrap_or(0)
    }

    pub fn unit_key(&self) -> DKey {
        DKey { g: vec![0; self.dim_g()], w: WeylKey::one(self.dvars) }
    }

    /// Embed a `U(g)` element as `u ⊗ 1`.
    pub fn embed_uenv(&self, u: &crate::liepair::UEnv) -> LinComb<DKey> {
        u.map_keys(|m| DKey { g: m.clone(), w: WeylKey::one(self.dvars) })
    }

    /// Embed a `U(l)` element (exp vectors over `dim_l`) as `u ⊗ 1`.
    pub fn embed_ul(&self, u: &crate::liepair::UEnv) -> LinComb<DKey> {
        let dim_g = self.dim_g();
        u.map_keys(|m| {
            let mut g = vec![0u32; dim_g];
            g[..m.len()].copy_from_slice(m);
            DKey { g, w: WeylKey::one(self.dvars) }
        })
    }

    /// Embed a differential operator as `1 ⊗ D`.
    pub fn embed_weyl(&self, op: &crate::weyl::WeylOp) -> LinComb<DKey> {
        let dim_g = self.dim_g();
        op.map_keys(|w| DKey { g: vec![0; dim_g], w: w.clone() })
    }

    /// Parse a twistor-candidate JSON key `{"g": […], "lam": […], "d": […]}`.
    pub fn parse_key_json(&self, v: &serde_json::Value) -> Result<DKey, String> {
        let get = |name: &str, len: usize| -> Result<Vec<u32>, String> {
            match v.get(name) {
                None => Ok(vec![0; len]),
                Some(serde_json::Value::Array(items)) => {
                    if items.len() != len {
                        return Err(format!("{name} must have length {len}"));
                    }
                    items
                        .iter()
                        .map(|x| {
                            x.as_u64().map(|n| n as u32).ok_or_else(|| "bad exponent".to_string())
                        })
                        .collect()
                }
                _ => Err(format!("{name} must be an array")),
            }
        };
        Ok(DKey {
            g: get("g", self.dim_g())?,
            w: WeylKey { lam: get("lam", self.dvars)?, dd: get("d", self.dvars)? },
        })
    }
}

impl HopfAlgebroid for DiffOpAlgebroid {
    type HKey = DKey;
    type RElem = Poly;

    fn name(&self) -> String {
        match &self.pair {
            Some(p) => format!("U(g)⊗D[{}]", p.name),
            None => format!("Weyl(d={})", self.dvars),
        }
    }

    fn window(&self) -> Window {
        self.window
    }

    fn cmp_order(&self) -> i64 {
        self.cmp.unwrap_or(self.window.order)
    }

    fn r_zero(&self) -> Poly {
        LinComb::zero()
    }
    fn r_one(&self) -> Poly {
        LinComb::term(vec![0; self.dvars], HSeries::one(self.window))
    }
    fn r_add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b)
    }
    fn r_scale(&self, c: &HSeries, a: &Poly) -> Poly {
        a.scale(c)
    }
    fn r_mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.bilinear(b, |x, y| {
            let sum: Vec<u32> = x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
            LinComb::term(sum, HSeries::one(self.window))
        })
    }
    fn r_eq(&self, a: &Poly, b: &Poly) -> bool {
        let ord = self.cmp_order();
        let zero = HSeries::zero(self.window);
        let mut keys: Vec<&Vec<u32>> = a.keys().chain(b.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().all(|k| {
            a.coeff(k).unwrap_or(&zero).truncate(ord) == b.coeff(k).unwrap_or(&zero).truncate(ord)
        })
    }
    fn r_order_part(&self, a: &Poly, k: i64) -> Poly {
        a.hbar_coefficient(k)
    }
    fn r_fmt(&self, a: &Poly) -> String {
        fmt_poly(a)
    }
    fn r_random(&self, bound: &SizeBound, rng: &mut dyn RngCore) -> Poly {
        let monos = monos_up_to(self.dvars, bound.degree.max(1));
        let mut out = LinComb::zero();
        for _ in 0..bound.max_terms.max(1) {
            let m = monos[rng.gen_range(0..monos.len())].clone();
            out.add_term(m, random_series(rng, bound, self.window));
        }
        out
    }
    fn r_basis(&self, bound: &SizeBound) -> Vec<Poly> {
        monos_up_to(self.dvars, bound.degree.max(1))
            .into_iter()
            .map(|m| LinComb::term(m, HSeries::one(self.window)))
            .collect()
    }

    fn h_unit(&self) -> LinComb<DKey> {
        LinComb::term(self.unit_key(), HSeries::one(self.window))
    }

    fn h_mul(&self, a: &DKey, b: &DKey) -> LinComb<DKey> {
        // (u₁⊗D₁)(u₂⊗D₂) = u₁u₂ ⊗ D₁D₂.
        let wparts = weyl_mul_keys(&a.w, &b.w);
        let mut out = LinComb::zero();
        match &self.pair {
            None => {
                for (w, c) in wparts {
                    out.add_term(
                        DKey { g: Vec::new(), w },
                        HSeries::from_rational(c, self.window),
                    );
                }
            }
            Some(pair) => {
                let gprod = pair.mono_mul(&a.g, &b.g, pair.dim_g, self.window);
                for (gm, cg) in gprod.iter() {
                    for (w, c) in &wparts {
                        out.add_term(
                            DKey { g: gm.clone(), w: w.clone() },
                            cg.scale(c),
                        );
                    }
                }
            }
        }
        out
    }

    fn alpha(&self, a: &Poly) -> LinComb<DKey> {
        let dim_g = self.dim_g();
        a.map_keys(|m| DKey {
            g: vec![0; dim_g],
            w: WeylKey { lam: m.clone(), dd: vec![0; self.dvars] },
        })
    }

    fn beta(&self, a: &Poly) -> LinComb<DKey> {
        self.alpha(a)
    }

    fn coproduct(&self, h: &DKey) -> Tp<Self> {
        // Δ_W(λ^a ∂^b) = Σ_{b'≤b} binom(b,b') λ^a∂^{b'} ⊗ ∂^{b-b'}.
        let mut wsplits: Vec<(WeylKey, WeylKey, crate::coeff::Rational)> = Vec::new();
        let zero_lam = vec![0u32; self.dvars];
        for (parts, c) in split_multi(&h.w.dd) {
            wsplits.push((
                WeylKey { lam: h.w.lam.clone(), dd: parts.0 },
                WeylKey { lam: zero_lam.clone(), dd: parts.1 },
                c,
            ));
        }
        let mut words = LinComb::zero();
        match &self.pair {
            None => {
                for (w1, w2, c) in wsplits {
                    words.add_term(
                        vec![DKey { g: Vec::new(), w: w1 }, DKey { g: Vec::new(), w: w2 }],
                        HSeries::from_rational(c, self.window),
                    );
                }
            }
            Some(_) => {
                for (gparts, cg) in ValidatedPair::mono_splits(&h.g, 2) {
                    for (w1, w2, cw) in &wsplits {
                        words.add_term(
                            vec![
                                DKey { g: gparts[0].clone(), w: w1.clone() },
                                DKey { g: gparts[1].clone(), w: w2.clone() },
                            ],
                            HSeries::from_rational(cg.clone() * cw, self.window),
                        );
                    }
                }
            }
        }
        Tensor::Words(2, self.normalize(2, words))
    }

    fn counit(&self, h: &DKey) -> Poly {
        // ε(u⊗D) = ε_U(u) · D(1).
        if !ValidatedPair::mono_counit(&h.g) || h.w.dd.iter().any(|&e| e > 0) {
            return LinComb::zero();
        }
        LinComb::term(h.w.lam.clone(), HSeries::one(self.window))
    }

    fn act(&self, h: &DKey, a: &Poly) -> Poly {
        if !ValidatedPair::mono_counit(&h.g) {
            return LinComb::zero();
        }
        let df = poly_derivative(a, &h.w.dd);
        df.map_keys(|m| m.iter().zip(h.w.lam.iter()).map(|(x, y)| x + y).collect())
    }

    fn h_basis(&self, bound: &SizeBound) -> Vec<DKey> {
        let deg = bound.degree.max(1);
        let gmonos = monos_up_to(self.dim_g().max(0), deg.min(1).max(1));
        let wmonos = monos_up_to(self.dvars, deg);
        let mut out = Vec::new();
        for g in &gmonos {
            let g = if self.pair.is_some() { g.clone() } else { Vec::new() };
            for lam in &wmonos {
                for dd in &wmonos {
                    if lam.iter().sum::<u32>() + dd.iter().sum::<u32>() > deg as u32 {
                        continue;
                    }
                    out.push(DKey {
                        g: g.clone(),
                        w: WeylKey { lam: lam.clone(), dd: dd.clone() },
                    });
                }
            }
            if self.pair.is_none() {
                break;
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn key_fmt(&self, k: &DKey) -> String {
        let w = crate::weyl::fmt_weyl_key(&k.w);
        if k.g.is_empty() || ValidatedPair::mono_counit(&k.g) {
            w
        } else {
            let g = fmt_mono(&k.g, "g");
            if w == "1" {
                g
            } else {
                format!("{g}·{w}")
            }
        }
    }

    fn normalize(&self, arity: usize, words: WordSum<DKey>) -> WordSum<DKey> {
        if arity <= 1 {
            return words;
        }
        // Gather all λ-coefficients of slots ≥ 2 into slot 1.
        let mut out = LinComb::zero();
        for (word, c) in words.iter() {
            let mut w2 = word.clone();
            let mut lam_total = w2[0].w.lam.clone();
            for key in w2.iter_mut().skip(1) {
                for (i, e) in key.w.lam.iter_mut().enumerate() {
                    lam_total[i] += *e;
                    *e = 0;
                }
            }
            w2[0].w.lam = lam_total;
            out.add_term(w2, c.clone());
        }
        out
    }
}

/// All two-part splits of a multi-exponent with binomial coefficients.
fn split_multi(e: &[u32]) -> Vec<((Vec<u32>, Vec<u32>), crate::coeff::Rational)> {
    use num_traits::One;
    let mut out: Vec<((Vec<u32>, Vec<u32>), crate::coeff::Rational)> =
        vec![((Vec::new(), Vec::new()), crate::coeff::Rational::one())];
    for &total in e {
        let mut next = Vec::with_capacity(out.len() * (total as usize + 1));
        for ((l, r), c) in &out {
            for k in 0..=total {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.push(k);
                r2.push(total - k);
                let mut binom = crate::coeff::Rational::one();
                for i in 0..k {
                    binom *= crate::coeff::Rational::from_integer((total - i).into());
                    binom /= crate::coeff::Rational::from_integer((i + 1).into());
                }
                next.push(((l2, r2), c * binom));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use crate::hopf::{delta_power, insert, t_eq, t_fmt};
    use crate::liepair::LiePair;

    fn wmodel() -> DiffOpAlgebroid {
        weyl_model(2, Window::power(3))
    }

    #[test]
    fn primitive_partials_and_functions() {
        let m = wmodel();
        // Δ(∂₁) = ∂₁⊗1 + 1⊗∂₁.
        let del = DKey { g: Vec::new(), w: WeylKey::del(2, 0) };
        let d = m.coproduct(&del);
        let Tensor::Words(_, w) = &d else { panic!() };
        assert_eq!(w.len(), 2);
        // Δ(λ₁) = λ₁⊗1 (normal form gathers functions left).
        let lam = DKey { g: Vec::new(), w: WeylKey::lambda(2, 0) };
        let d = m.coproduct(&lam);
        let Tensor::Words(_, w) = &d else { panic!() };
        assert_eq!(w.len(), 1);
        // ε(∂) = 0, ε(λ^a) = λ^a.
        assert!(m.counit(&del).is_zero());
        assert!(!m.counit(&lam).is_zero());
    }

    #[test]
    fn normal_form_moves_functions_left() {
        let m = wmodel();
        let one = HSeries::one(m.window);
        let k_fun = DKey { g: Vec::new(), w: WeylKey { lam: vec![1, 0], dd: vec![0, 0] } };
        let k_del = DKey { g: Vec::new(), w: WeylKey { lam: vec![0, 0], dd: vec![1, 0] } };
        let words = LinComb::term(vec![k_del.clone(), k_fun.clone()], one.clone());
        let nf = m.normalize(2, words);
        let expect_key = vec![
            DKey { g: Vec::new(), w: WeylKey { lam: vec![1, 0], dd: vec![1, 0] } },
            DKey { g: Vec::new(), w: WeylKey::one(2) },
        ];
        assert!(nf.coeff(&expect_key).is_some(), "λ moved to slot 1: {:?}", nf);
    }

    #[test]
    fn insert_expands_leibniz() {
        // insert(∂₁, f⊗g-style tensor) = Leibniz rule across slots.
        let m = wmodel();
        let one = HSeries::one(m.window);
        let del = LinComb::term(DKey { g: Vec::new(), w: WeylKey::del(2, 0) }, one.clone());
        let lam1 = DKey { g: Vec::new(), w: WeylKey { lam: vec![1, 0], dd: vec![0, 0] } };
        let u = Tensor::Words(2, LinComb::term(vec![lam1.clone(), lam1.clone()], one.clone()));
        let got = insert(&m, &del, &u);
        // (∂⊗1 + 1⊗∂)·(λ⊗λ) = (∂λ)⊗λ + λ⊗(∂λ) with λs gathered left:
        // = (λ²∂⊗1-part…) — just check against delta_power and right action.
        let expected = crate::hopf::right_action(
            &m,
            &delta_power(&m, &del, 2),
            &LinComb::term(vec![lam1.clone(), lam1.clone()], one),
        );
        assert!(t_eq(&m, &got, &expected), "{} vs {}", t_fmt(&m, &got), t_fmt(&m, &expected));
    }

    #[test]
    fn hgl_counit_mixes_both_factors() {
        let pair = Arc::new(crate::liepair::ValidatedPair::new(LiePair::aff1()).unwrap());
        let m = hgl_model(pair, Window::power(2));
        // ε(x⊗1) = 0 for a primitive U(g) generator, ε(1⊗λ) = λ, ε(1⊗∂) = 0.
        let x = DKey { g: vec![0, 1], w: WeylKey::one(1) };
        assert!(m.counit(&x).is_zero());
        let lam = DKey { g: vec![0, 0], w: WeylKey::lambda(1, 0) };
        assert_eq!(m.counit(&lam).coeff(&vec![1u32]).unwrap().coeff(0), rat(1, 1));
        let del = DKey { g: vec![0, 0], w: WeylKey::del(1, 0) };
        assert!(m.counit(&del).is_zero());
    }
}
