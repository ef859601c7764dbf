//! Twistors of Hopf algebroids and the two types of twisted brace B∞
//! algebras.
//!
//! A twistor is an `F ∈ H ⊗_R H` with
//!
//! ```text
//! (Δ⊗id)F · (F⊗1) = (id⊗Δ)F · (1⊗F),    (ε⊗id)F = (id⊗ε)F = 1,
//! ```
//!
//! whose associated maps `F♯` are invertible. This artifact certifies
//! *formal* twistors, `F = 1⊗1 + O(ℏ)`, where `F♯` inverts order by order
//! in ℏ. From a certified twistor it builds the twisted algebra `R_F`, the
//! twisted Hopf algebroid `H_F = (H, α_F, β_F, ·, Δ_F, ε)` (a full
//! [`HopfAlgebroid`] model whose tensor powers are represented by lifts over
//! `R` with equality decided through `F♯` normal forms), the type I twisted
//! brace B∞ algebra `B∞(H_F)`, the type II algebra `B∞(H)^F` with
//! differential `[F, ·]_G` and product `∪_F`, and the verification suite for
//! the strict B∞ isomorphism `F♯` between them.

use std::sync::Mutex;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::brace::BraceAlgebra;
use crate::coeff::{HSeries, Window};
use crate::hopf::{
    canonical_multiplication, concat, delta_power, embed_key, insert,
    right_action, t_add, t_eq, t_fmt, t_is_zero, t_order_part, t_scale, t_sub, t_unit, t_zero,
    word_of_elems, HElem, HopfAlgebroid, HopfOperad, Tensor, Tp, WordSum,
};
use crate::linear::LinComb;
use crate::operad::{Operad, OperadMorphism};
use crate::report::{Failure, Report};
use crate::sample::{rng_from_seed, sample_seed, SizeBound};

#[derive(Debug, Error)]
pub enum TwistError {
    #[error("the candidate fails the twistor equation at ℏ-order {0}")]
    Cocycle(i64),
    #[error("the candidate fails the counit equation at ℏ-order {0}")]
    Counit(i64),
    #[error("the candidate is not formal: its ℏ⁰ part is not 1⊗1")]
    NotFormal,
    #[error("order-by-order inversion did not converge within the window")]
    InversionDiverged,
}

/// Per-ℏ-order verdicts of the two twistor equations.
#[derive(Debug, Clone)]
pub struct TwistorVerdict {
    /// `(Δ⊗id)F·(F⊗1) = (id⊗Δ)F·(1⊗F)` per order `0..=window.order`.
    pub cocycle: Vec<bool>,
    /// `(ε⊗id)F = (id⊗ε)F = 1` per order.
    pub counit: Vec<bool>,
}

impl TwistorVerdict {
    pub fn passed(&self) -> bool {
        self.cocycle.iter().all(|&b| b) && self.counit.iter().all(|&b| b)
    }

    pub fn first_failure(&self) -> Option<(i64, &'static str)> {
        for (k, &ok) in self.cocycle.iter().enumerate() {
            if !ok {
                return Some((k as i64, "twistor equation"));
            }
        }
        for (k, &ok) in self.counit.iter().enumerate() {
            if !ok {
                return Some((k as i64, "counit equation"));
            }
        }
        None
    }

    /// Combined per-order verdict (both equations).
    pub fn per_order(&self) -> Vec<bool> {
        self.cocycle.iter().zip(self.counit.iter()).map(|(&a, &b)| a && b).collect()
    }
}

/// Both sides of the twistor equation, computed in `P_H(3)` canonical form
/// via the lemma-level insertion operations, compared per ℏ-order.
pub fn check_twistor<M: HopfAlgebroid>(m: &M, f: &Tp<M>) -> TwistorVerdict {
    assert_eq!(f.arity(), 2, "twistor candidates live in H⊗H");
    let Tensor::Words(_, fw) = f else { unreachable!() };
    // (Δ⊗id)F and (id⊗Δ)F.
    let mut left = t_zero(m, 3);
    let mut right = t_zero(m, 3);
    for (word, c) in fw.iter() {
        let k1 = LinComb::term(word[0].clone(), HSeries::one(m.window()));
        let k2 = LinComb::term(word[1].clone(), HSeries::one(m.window()));
        left = t_add(
            m,
            &left,
            &t_scale(m, c, &concat(m, &delta_power(m, &k1, 2), &embed_key(m, &word[1]))),
        );
        right = t_add(
            m,
            &right,
            &t_scale(m, c, &concat(m, &embed_key(m, &word[0]), &delta_power(m, &k2, 2))),
        );
    }
    // Right actions by the lifts F⊗1 and 1⊗F.
    let unit = m.h_unit();
    let mut f_ext = LinComb::zero();
    let mut ext_f = LinComb::zero();
    for (word, c) in fw.iter() {
        for (ku, cu) in unit.iter() {
            let mut w1 = word.clone();
            w1.push(ku.clone());
            f_ext.add_term(w1, c.mul(cu));
            let mut w2 = vec![ku.clone()];
            w2.extend(word.iter().cloned());
            ext_f.add_term(w2, c.mul(cu));
        }
    }
    let lhs = right_action(m, &left, &f_ext);
    let rhs = right_action(m, &right, &ext_f);
    let residual = t_sub(m, &lhs, &rhs);
    let cocycle = (0..=m.window().order)
        .map(|k| t_is_zero(m, &t_order_part(m, &residual, k)))
        .collect();

    // Counit equation.
    let eps_left = crate::hopf::counit_slot(m, f, 0);
    let eps_right = crate::hopf::counit_slot(m, f, 1);
    let one = t_unit(m);
    let res_l = t_sub(m, &eps_left, &one);
    let res_r = t_sub(m, &eps_right, &one);
    let counit = (0..=m.window().order)
        .map(|k| {
            t_is_zero(m, &t_order_part(m, &res_l, k)) && t_is_zero(m, &t_order_part(m, &res_r, k))
        })
        .collect();
    TwistorVerdict { cocycle, counit }
}

/// `F = 1⊗1 + O(ℏ)`.
pub fn is_formal<M: HopfAlgebroid>(m: &M, f: &Tp<M>) -> bool {
    t_eq(m, &t_order_part(m, f, 0), &canonical_multiplication(m))
}

/// A certified formal twistor together with its `F♯` chains.
pub struct Twistor<M: HopfAlgebroid> {
    pub f: Tp<M>,
    chains: Mutex<Vec<Tp<M>>>,
}

impl<M: HopfAlgebroid> Twistor<M> {
    /// Certify the two twistor equations (within the window) and formality.
    pub fn certify(m: &M, f: Tp<M>) -> Result<Self, TwistError> {
        if !is_formal(m, &f) {
            return Err(TwistError::NotFormal);
        }
        let verdict = check_twistor(m, &f);
        if let Some((order, which)) = verdict.first_failure() {
            return Err(match which {
                "twistor equation" => TwistError::Cocycle(order),
                _ => TwistError::Counit(order),
            });
        }
        Ok(Twistor { f, chains: Mutex::new(Vec::new()) })
    }

    /// Without certification — for two-sided verdict experiments where the
    /// candidate may fail (e.g. the ADT ↔ twistor correspondence).
    pub fn unchecked(f: Tp<M>) -> Self {
        Twistor { f, chains: Mutex::new(Vec::new()) }
    }

    /// The chain `F_{1∧…∧n-1,n} · … · F_{1∧2,3} · F_{1,2} ∈ P_H(n)`, so that
    /// `F♯(x_1⊗…⊗x_n)` is its right action on the lift `x_1⊗…⊗x_n`.
    pub fn chain(&self, m: &M, n: usize) -> Tp<M> {
        assert!(n >= 1);
        let mut chains = self.chains.lock().unwrap();
        while chains.len() < n {
            let k = chains.len() + 1;
            let value = if k == 1 {
                t_unit(m)
            } else if k == 2 {
                self.f.clone()
            } else {
                // (Δ^{k-2}⊗id)F right-acted by the lift chain_{k-1} ⊗ 1.
                let prev = &chains[k - 2];
                let Tensor::Words(_, fw) = &self.f else { unreachable!() };
                let mut placed = t_zero(m, k);
                for (word, c) in fw.iter() {
                    let k1 = LinComb::term(word[0].clone(), HSeries::one(m.window()));
                    placed = t_add(
                        m,
                        &placed,
                        &t_scale(
                            m,
                            c,
                            &concat(m, &delta_power(m, &k1, k - 1), &embed_key(m, &word[1])),
                        ),
                    );
                }
                let Tensor::Words(_, prev_w) = prev else { unreachable!() };
                let mut lift = LinComb::zero();
                for (word, c) in prev_w.iter() {
                    for (ku, cu) in m.h_unit().iter() {
                        let mut w = word.clone();
                        w.push(ku.clone());
                        lift.add_term(w, c.mul(cu));
                    }
                }
                right_action(m, &placed, &lift)
            };
            chains.push(value);
        }
        chains[n - 1].clone()
    }

    /// `F♯` on a lift: the nested-brace formula
    /// `F{F{⋯F{F{x_1,x_2},x_3},⋯},x_n}` as a right action of the chain.
    pub fn sharp(&self, m: &M, arity: usize, lift: &WordSum<M::HKey>) -> Tp<M> {
        if arity == 0 {
            panic!("sharp on scalars is the identity; handle at the call site")
        }
        right_action(m, &self.chain(m, arity), lift)
    }

    pub fn sharp_tensor(&self, m: &M, t: &Tp<M>) -> Tp<M> {
        match t {
            Tensor::Scalar(_) => t.clone(),
            Tensor::Words(n, w) => self.sharp(m, *n, w),
        }
    }

    /// Order-by-order inverse of `F♯`: a lift `v` with `F♯(v) = target`
    /// modulo `ℏ^{window.order+1}`.
    pub fn sharp_inverse(
        &self,
        m: &M,
        target: &Tp<M>,
        stop_after_leading: bool,
    ) -> Result<WordSum<M::HKey>, TwistError> {
        let Tensor::Words(n, tw) = target else {
            return Err(TwistError::InversionDiverged);
        };
        let mut v = tw.clone();
        if stop_after_leading {
            return Ok(v);
        }
        for _ in 0..=(m.window().order + 1) {
            let residual = t_sub(m, target, &self.sharp(m, *n, &v));
            let Tensor::Words(_, rw) = &residual else { unreachable!() };
            if rw.is_zero() {
                return Ok(v);
            }
            v.add_assign(rw);
        }
        Err(TwistError::InversionDiverged)
    }
}

// ---------------------------------------------------------------------------
// The twisted base ring and structure maps.
// ---------------------------------------------------------------------------

/// `a ⋆_F b = (F_1 ⊳ a)·(F_2 ⊳ b)`.
pub fn star_f<M: HopfAlgebroid>(m: &M, f: &Tp<M>, a: &M::RElem, b: &M::RElem) -> M::RElem {
    let Tensor::Words(_, fw) = f else { panic!("twistor has arity 2") };
    let mut out = m.r_zero();
    for (word, c) in fw.iter() {
        let left = m.act(&word[0], a);
        let right = m.act(&word[1], b);
        out = m.r_add(&out, &m.r_scale(c, &m.r_mul(&left, &right)));
    }
    out
}

/// `α_F(a) = α(F_1 ⊳ a)·F_2`.
pub fn alpha_f<M: HopfAlgebroid>(m: &M, f: &Tp<M>, a: &M::RElem) -> HElem<M> {
    let Tensor::Words(_, fw) = f else { panic!("twistor has arity 2") };
    let mut out = LinComb::zero();
    for (word, c) in fw.iter() {
        let acted = m.act(&word[0], a);
        for (k, ck) in m.alpha(&acted).iter() {
            for (k2, c2) in m.h_mul(k, &word[1]).iter() {
                out.add_term(k2.clone(), c.mul(ck).mul(c2));
            }
        }
    }
    out
}

/// `β_F(a) = β(F_2 ⊳ a)·F_1`.
pub fn beta_f<M: HopfAlgebroid>(m: &M, f: &Tp<M>, a: &M::RElem) -> HElem<M> {
    let Tensor::Words(_, fw) = f else { panic!("twistor has arity 2") };
    let mut out = LinComb::zero();
    for (word, c) in fw.iter() {
        let acted = m.act(&word[1], a);
        for (k, ck) in m.beta(&acted).iter() {
            for (k2, c2) in m.h_mul(k, &word[0]).iter() {
                out.add_term(k2.clone(), c.mul(ck).mul(c2));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The twisted Hopf algebroid H_F as a model.
// ---------------------------------------------------------------------------

/// `H_F = (H, α_F, β_F, ·, Δ_F, ε)` over `R_F = (R, ⋆_F)`. Tensor powers
/// over `R_F` are represented by lifts over `R`; the canonical form of a
/// word sum is the `F♯`-preimage of the base-canonical form of its
/// `F♯`-image, so equality is decided through `F♯`.
pub struct TwistedModel<M: HopfAlgebroid> {
    pub base: M,
    pub twistor: Twistor<M>,
    /// Mutation hook: truncate the order-by-order inverse of `F♯` after its
    /// leading term (see `mutation`).
    pub corrupt_inverse: bool,
}

impl<M: HopfAlgebroid> TwistedModel<M> {
    pub fn new(base: M, f: Tp<M>) -> Result<Self, TwistError> {
        let twistor = Twistor::certify(&base, f)?;
        Ok(TwistedModel { base, twistor, corrupt_inverse: false })
    }

    /// `Δ_F(x) = (F♯)^{-1}(Δ(x)·F)` as a lift.
    pub fn twisted_coproduct(&self, x: &HElem<M>) -> WordSum<M::HKey> {
        let target = insert(&self.base, x, &self.twistor.f);
        self.twistor
            .sharp_inverse(&self.base, &target, self.corrupt_inverse)
            .expect("Δ_F inversion converges for formal twistors")
    }
}

impl<M: HopfAlgebroid> HopfAlgebroid for TwistedModel<M> {
    type HKey = M::HKey;
    type RElem = M::RElem;

    fn name(&self) -> String {
        format!("{}_F", self.base.name())
    }

    fn window(&self) -> Window {
        self.base.window()
    }

    fn cmp_order(&self) -> i64 {
        self.base.cmp_order()
    }

    fn r_zero(&self) -> Self::RElem {
        self.base.r_zero()
    }
    fn r_one(&self) -> Self::RElem {
        self.base.r_one()
    }
    fn r_add(&self, a: &Self::RElem, b: &Self::RElem) -> Self::RElem {
        self.base.r_add(a, b)
    }
    fn r_scale(&self, c: &HSeries, a: &Self::RElem) -> Self::RElem {
        self.base.r_scale(c, a)
    }
    fn r_mul(&self, a: &Self::RElem, b: &Self::RElem) -> Self::RElem {
        star_f(&self.base, &self.twistor.f, a, b)
    }
    fn r_eq(&self, a: &Self::RElem, b: &Self::RElem) -> bool {
        self.base.r_eq(a, b)
    }
    fn r_order_part(&self, a: &Self::RElem, k: i64) -> Self::RElem {
        self.base.r_order_part(a, k)
    }
    fn r_fmt(&self, a: &Self::RElem) -> String {
        self.base.r_fmt(a)
    }
    fn r_random(&self, bound: &SizeBound, rng: &mut dyn RngCore) -> Self::RElem {
        self.base.r_random(bound, rng)
    }
    fn r_basis(&self, bound: &SizeBound) -> Vec<Self::RElem> {
        self.base.r_basis(bound)
    }

    fn h_unit(&self) -> HElem<Self> {
        self.base.h_unit()
    }
    fn h_mul(&self, a: &Self::HKey, b: &Self::HKey) -> HElem<Self> {
        self.base.h_mul(a, b)
    }
    fn alpha(&self, a: &Self::RElem) -> HElem<Self> {
        alpha_f(&self.base, &self.twistor.f, a)
    }
    fn beta(&self, a: &Self::RElem) -> HElem<Self> {
        beta_f(&self.base, &self.twistor.f, a)
    }

    fn coproduct(&self, h: &Self::HKey) -> Tp<Self> {
        let elem = LinComb::term(h.clone(), HSeries::one(self.window()));
        Tensor::Words(2, self.normalize(2, self.twisted_coproduct(&elem)))
    }

    fn counit(&self, h: &Self::HKey) -> Self::RElem {
        self.base.counit(h)
    }

    fn act(&self, h: &Self::HKey, a: &Self::RElem) -> Self::RElem {
        // x ⊳_F a = ε(x·α_F(a)).
        let mut out = self.base.r_zero();
        for (k, c) in self.alpha(a).iter() {
            for (k2, c2) in self.base.h_mul(h, k).iter() {
                out = self.base.r_add(
                    &out,
                    &self.base.r_scale(&c.mul(c2), &self.base.counit(k2)),
                );
            }
        }
        out
    }

    fn h_basis(&self, bound: &SizeBound) -> Vec<Self::HKey> {
        self.base.h_basis(bound)
    }

    fn key_fmt(&self, k: &Self::HKey) -> String {
        self.base.key_fmt(k)
    }

    fn normalize(&self, arity: usize, words: WordSum<Self::HKey>) -> WordSum<Self::HKey> {
        if arity == 0 || words.is_zero() {
            return words;
        }
        let image = self.twistor.sharp(&self.base, arity, &words);
        self.twistor
            .sharp_inverse(&self.base, &image, self.corrupt_inverse)
            .expect("normal-form inversion converges for formal twistors")
    }
}

// ---------------------------------------------------------------------------
// Type I and type II twisted brace B∞ algebras.
// ---------------------------------------------------------------------------

/// Type I: the canonical brace B∞ algebra of the twisted Hopf algebroid.
pub fn build_type_i<M: HopfAlgebroid>(
    base: M,
    f: Tp<M>,
) -> Result<BraceAlgebra<HopfOperad<TwistedModel<M>>>, crate::brace::BraceError> {
    let model = TwistedModel::new(base, f).map_err(|_| crate::brace::BraceError::MBraceMNotZero)?;
    crate::hopf::canonical_binf(model)
}

/// Type II: the base spaces with multiplication `F`, differential
/// `[F, ·]_G` and product `∪_F` (the generic GV construction applied to the
/// operad `P_H` with `m := F`; `F{F} = 0` is exactly the twistor equation).
pub fn build_type_ii<M: HopfAlgebroid>(
    base: M,
    f: Tp<M>,
) -> Result<BraceAlgebra<HopfOperad<M>>, crate::brace::BraceError> {
    BraceAlgebra::with_multiplication(HopfOperad::new(base), f)
}

/// The operad morphism `F♯ : P_{H_F} → P_H`.
pub struct SharpMorphism<'a, M: HopfAlgebroid> {
    pub source: &'a HopfOperad<TwistedModel<M>>,
    pub target: &'a HopfOperad<M>,
}

impl<'a, M: HopfAlgebroid> OperadMorphism<HopfOperad<TwistedModel<M>>, HopfOperad<M>>
    for SharpMorphism<'a, M>
{
    fn source(&self) -> &HopfOperad<TwistedModel<M>> {
        self.source
    }
    fn target(&self) -> &HopfOperad<M> {
        self.target
    }
    fn apply(&self, x: &Tp<TwistedModel<M>>) -> Tp<M> {
        let model = &self.source.model;
        match x {
            Tensor::Scalar(r) => Tensor::Scalar(r.clone()),
            Tensor::Words(n, w) => model.twistor.sharp(&model.base, *n, w),
        }
    }
}

/// The Theorem-level verification that `F♯` is a strict B∞ isomorphism from
/// the type I to the type II twisted brace B∞ algebra: `F♯(1⊗1) = F`, the
/// operad-morphism property, intertwining of differential/cup/braces, and
/// the key identity `F♯((Δ_F^{k-1}h)·u) = (Δ^{k-1}h)·(F♯u)`.
pub fn verify_two_types<M: HopfAlgebroid + Clone>(
    base: &M,
    f: &Tp<M>,
    trials: u64,
    seed: u64,
    degree_bound: usize,
) -> Result<Report, TwistError> {
    let mut report = Report::new(format!("two types of twisted B∞ [{}]", base.name()))
        .with_config(json!({
            "model": base.name(),
            "trials": trials,
            "seed": seed,
            "degree": degree_bound,
        }));
    let type_i = build_type_i(base.clone(), f.clone())
        .map_err(|_| TwistError::Cocycle(-1))?;
    let type_ii = build_type_ii(base.clone(), f.clone())
        .map_err(|_| TwistError::Cocycle(-1))?;
    let src_op = type_i.operad();
    let tgt_op = type_ii.operad();
    let twisted = &src_op.model;

    // F♯(1 ⊗_{R_F} 1) = F.
    let m1 = canonical_multiplication(twisted);
    let sharp = SharpMorphism { source: src_op, target: tgt_op };
    let image = sharp.apply(&m1);
    report.record(t_eq(base, &image, f), || Failure {
        check: "F♯(1⊗1) = F".into(),
        seed,
        inputs: t_fmt(twisted, &m1),
        lhs: t_fmt(base, &image),
        rhs: t_fmt(base, f),
    });

    // Operad morphism and strict B∞ morphism on samples.
    let bound = SizeBound::with_degree(degree_bound).with_hbar(base.window().order.min(2));
    report.absorb(crate::operad::check_morphism(&sharp, trials, seed, &bound));
    report.absorb(crate::brace::check_strict_binf_morphism(
        &sharp,
        &type_i,
        &type_ii,
        trials,
        seed.wrapping_add(1),
        degree_bound,
    ));

    // Lemma-level identity F♯((Δ_F^{k-1}h)·u) = (Δ^{k-1}h)·(F♯u).
    for t in 0..trials {
        let s = sample_seed(seed.wrapping_add(2), t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        let k = 1 + (t as usize % degree_bound.max(1));
        let h = base.h_random(&bound, &mut rng);
        let u = tgt_op.random(k, &bound, &mut rng); // a lift, read over R_F
        let Tensor::Words(_, uw) = &u else { unreachable!() };
        let twisted_insert = insert(twisted, &h, &Tensor::Words(k, uw.clone()));
        let lhs = sharp.apply(&twisted_insert);
        let rhs = insert(base, &h, &twisted.twistor.sharp(base, k, uw));
        report.record(t_eq(base, &lhs, &rhs), || Failure {
            check: "F♯((Δ_F^{k-1}h)·u) = (Δ^{k-1}h)·(F♯u)".into(),
            seed: s,
            inputs: format!("h = {}, u = {}", base.h_fmt(&h), t_fmt(base, &u)),
            lhs: t_fmt(base, &lhs),
            rhs: t_fmt(base, &rhs),
        });
    }
    Ok(report)
}

/// Theorem-level conclusions about a certified twistor: `⋆_F` associative
/// and unital, `α_F` a homomorphism and `β_F` an anti-homomorphism into `H`
/// with commuting images, and `F·(β_F(a)⊗1 - 1⊗α_F(a)) = 0`.
pub fn check_theorem_pre<M: HopfAlgebroid>(
    m: &M,
    f: &Tp<M>,
    trials: u64,
    seed: u64,
) -> Report {
    let mut report = Report::new(format!("twisted base ring [{}]", m.name()))
        .with_config(json!({"model": m.name(), "trials": trials, "seed": seed}));
    let bound = SizeBound::small();
    let mul_h = |a: &HElem<M>, b: &HElem<M>| -> HElem<M> { a.bilinear(b, |x, y| m.h_mul(x, y)) };
    let h_eq = |a: &HElem<M>, b: &HElem<M>| {
        t_eq(m, &crate::hopf::embed_h(m, a), &crate::hopf::embed_h(m, b))
    };
    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        let a = m.r_random(&bound, &mut rng);
        let b = m.r_random(&bound, &mut rng);
        let c = m.r_random(&bound, &mut rng);
        let star = |x: &M::RElem, y: &M::RElem| star_f(m, f, x, y);

        let lhs = star(&star(&a, &b), &c);
        let rhs = star(&a, &star(&b, &c));
        report.record(m.r_eq(&lhs, &rhs), || Failure {
            check: "⋆_F associativity".into(),
            seed: s,
            inputs: format!("a = {}, b = {}, c = {}", m.r_fmt(&a), m.r_fmt(&b), m.r_fmt(&c)),
            lhs: m.r_fmt(&lhs),
            rhs: m.r_fmt(&rhs),
        });
        let unit_ok =
            m.r_eq(&star(&m.r_one(), &a), &a) && m.r_eq(&star(&a, &m.r_one()), &a);
        report.record(unit_ok, || Failure {
            check: "1 ⋆_F a = a ⋆_F 1 = a".into(),
            seed: s,
            inputs: m.r_fmt(&a),
            lhs: m.r_fmt(&star(&m.r_one(), &a)),
            rhs: m.r_fmt(&a),
        });

        let lhs = alpha_f(m, f, &star(&a, &b));
        let rhs = mul_h(&alpha_f(m, f, &a), &alpha_f(m, f, &b));
        report.record(h_eq(&lhs, &rhs), || Failure {
            check: "α_F(a ⋆_F b) = α_F(a)·α_F(b)".into(),
            seed: s,
            inputs: format!("a = {}, b = {}", m.r_fmt(&a), m.r_fmt(&b)),
            lhs: m.h_fmt(&lhs),
            rhs: m.h_fmt(&rhs),
        });
        let lhs = beta_f(m, f, &star(&a, &b));
        let rhs = mul_h(&beta_f(m, f, &b), &beta_f(m, f, &a));
        report.record(h_eq(&lhs, &rhs), || Failure {
            check: "β_F(a ⋆_F b) = β_F(b)·β_F(a)".into(),
            seed: s,
            inputs: format!("a = {}, b = {}", m.r_fmt(&a), m.r_fmt(&b)),
            lhs: m.h_fmt(&lhs),
            rhs: m.h_fmt(&rhs),
        });
        let lhs = mul_h(&alpha_f(m, f, &a), &beta_f(m, f, &b));
        let rhs = mul_h(&beta_f(m, f, &b), &alpha_f(m, f, &a));
        report.record(h_eq(&lhs, &rhs), || Failure {
            check: "α_F(a)β_F(b) = β_F(b)α_F(a)".into(),
            seed: s,
            inputs: format!("a = {}, b = {}", m.r_fmt(&a), m.r_fmt(&b)),
            lhs: m.h_fmt(&lhs),
            rhs: m.h_fmt(&rhs),
        });

        // F·(β_F(a)⊗1 - 1⊗α_F(a)) = 0.
        let unit = m.h_unit();
        let gen_plus = word_of_elems(m, &[beta_f(m, f, &a), unit.clone()]);
        let gen_minus = word_of_elems(m, &[unit.clone(), alpha_f(m, f, &a)]);
        let hit = t_sub(
            m,
            &right_action(m, f, &gen_plus),
            &right_action(m, f, &gen_minus),
        );
        report.record(t_is_zero(m, &hit), || Failure {
            check: "F·(β_F(a)⊗1 - 1⊗α_F(a)) = 0".into(),
            seed: s,
            inputs: m.r_fmt(&a),
            lhs: t_fmt(m, &hit),
            rhs: "0".into(),
        });
    }
    report
}

// ---------------------------------------------------------------------------
// Serialization of twistor candidates.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct TwistorTermJson {
    pub u: serde_json::Value,
    pub v: serde_json::Value,
    pub coeff: HSeries,
}

#[derive(Serialize, Deserialize)]
pub struct TwistorJson {
    pub model: String,
    pub terms: Vec<TwistorTermJson>,
}

/// Decode a twistor candidate file against a model, given the model's key
/// parser.
pub fn twistor_from_json<M: HopfAlgebroid>(
    m: &M,
    json: &TwistorJson,
    parse_key: impl Fn(&serde_json::Value) -> Result<M::HKey, String>,
) -> Result<Tp<M>, String> {
    let mut words = LinComb::zero();
    for term in &json.terms {
        let u = parse_key(&term.u)?;
        let v = parse_key(&term.v)?;
        words.add_term(vec![u, v], term.coeff.clone());
    }
    Ok(Tensor::Words(2, m.normalize(2, words)))
}
