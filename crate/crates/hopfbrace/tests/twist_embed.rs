//! The twistor and embedding layers end to end: the Weyl exponential
//! twistor, the two types of twisted brace B∞ algebras, the quantum
//! groupoid axioms, the embedding theorem, the ADT ↔ twistor equivalence,
//! and the twisted diagram.

use std::sync::Arc;

use hopfbrace::coeff::{HSeries, Rational, Window};
use hopfbrace::hopf::diffops::{hgl_model, weyl_model, DKey, DiffOpAlgebroid};
use hopfbrace::hopf::{check_hopfalgd_axioms, t_eq, Tensor};
use hopfbrace::liepair::{Chain, LiePair, ValidatedPair};
use hopfbrace::linear::LinComb;
use hopfbrace::twist::{
    check_theorem_pre, check_twistor, is_formal, star_f, verify_two_types, Twistor,
};
use hopfbrace::weyl::WeylKey;

/// `exp(ℏ ∂_i ⊗ ∂_j)` truncated to the window.
pub fn exp_twistor(m: &DiffOpAlgebroid, i: usize, j: usize) -> Tensor<DKey, hopfbrace::weyl::Poly> {
    let d = m.dvars;
    let mut words = LinComb::zero();
    let mut factorial = Rational::from_integer(1.into());
    for k in 0..=m.window.order.max(0) as u32 {
        if k > 0 {
            factorial = factorial * Rational::from_integer((k as i64).into());
        }
        let mut left = WeylKey::one(d);
        left.dd[i] = k;
        let mut right = WeylKey::one(d);
        right.dd[j] = k;
        let g = vec![0u32; m.pair.as_ref().map(|p| p.dim_g).unwrap_or(0)];
        words.add_term(
            vec![DKey { g: g.clone(), w: left }, DKey { g, w: right }],
            HSeries::monomial(factorial.clone().recip(), k as i64, m.window),
        );
    }
    Tensor::Words(2, hopfbrace::hopf::HopfAlgebroid::normalize(m, 2, words))
}

#[test]
fn weyl_model_passes_hopf_axioms() {
    let m = weyl_model(1, Window::power(3));
    let report = check_hopfalgd_axioms(&m, 4, 5);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn hgl_model_passes_hopf_axioms() {
    let pair = Arc::new(ValidatedPair::new(LiePair::aff1()).unwrap());
    let m = hgl_model(pair, Window::power(2));
    let report = check_hopfalgd_axioms(&m, 3, 6);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn exponential_twistor_certifies_mod_h5() {
    let m = weyl_model(2, Window::power(4));
    let f = exp_twistor(&m, 0, 1);
    assert!(is_formal(&m, &f));
    let verdict = check_twistor(&m, &f);
    assert!(verdict.passed(), "cocycle {:?}, counit {:?}", verdict.cocycle, verdict.counit);
    // Trivial twistor: identities exactly.
    let trivial = hopfbrace::hopf::canonical_multiplication(&m);
    assert!(check_twistor(&m, &trivial).passed());
}

#[test]
fn counit_failure_is_detected() {
    // F = 1⊗1 + ℏ(x⊗1) in a primitive bialgebra: (ε⊗id)F = 1 but the other
    // leg gives 1 + ℏx ≠ 1.
    let m = hopfbrace::hopf::polybi::PolyBialgebra::new(1, Window::power(2));
    let mut f = hopfbrace::hopf::canonical_multiplication(&m);
    if let Tensor::Words(_, w) = &mut f {
        w.add_term(vec![vec![1u32], vec![0u32]], HSeries::hbar(Window::power(2)));
    }
    let verdict = check_twistor(&m, &f);
    assert!(!verdict.counit.iter().all(|&b| b), "counit failure detected");
}

#[test]
fn weyl_star_f_examples() {
    let m = weyl_model(2, Window::power(3));
    let f = exp_twistor(&m, 0, 1);
    // λ₁ ⋆_F λ₂ = λ₁λ₂ + ℏ.
    let l1: hopfbrace::weyl::Poly = LinComb::term(vec![1, 0], HSeries::one(m.window));
    let l2: hopfbrace::weyl::Poly = LinComb::term(vec![0, 1], HSeries::one(m.window));
    let prod = star_f(&m, &f, &l1, &l2);
    let mut expect: hopfbrace::weyl::Poly = LinComb::term(vec![1, 1], HSeries::one(m.window));
    expect.add_term(vec![0, 0], HSeries::hbar(m.window));
    assert!(m_eq(&m, &prod, &expect));
    // 1 ⋆_F a = a.
    let one = hopfbrace::hopf::HopfAlgebroid::r_one(&m);
    assert!(m_eq(&m, &star_f(&m, &f, &one, &l1), &l1));

    let report = check_theorem_pre(&m, &f, 12, 17);
    assert!(report.passed(), "{}", report.render_text());
}

fn m_eq(m: &DiffOpAlgebroid, a: &hopfbrace::weyl::Poly, b: &hopfbrace::weyl::Poly) -> bool {
    hopfbrace::hopf::HopfAlgebroid::r_eq(m, a, b)
}

#[test]
fn two_types_weyl_exponential() {
    let m = weyl_model(2, Window::power(2));
    let f = exp_twistor(&m, 0, 1);
    let report = verify_two_types(&m, &f, 8, 23, 2).expect("certified twistor");
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn two_types_trivial_twistor_is_identity() {
    let m = weyl_model(1, Window::power(1));
    let f = hopfbrace::hopf::canonical_multiplication(&m);
    let twistor = Twistor::certify(&m, f).expect("trivial twistor certifies");
    // F♯ is the identity on sampled lifts.
    let one = HSeries::one(m.window);
    let x = DKey { g: Vec::new(), w: WeylKey { lam: vec![1], dd: vec![1] } };
    let y = DKey { g: Vec::new(), w: WeylKey { lam: vec![0], dd: vec![2] } };
    let lift = LinComb::term(vec![x, y], one);
    let image = twistor.sharp(&m, 2, &lift);
    let direct = Tensor::Words(2, hopfbrace::hopf::HopfAlgebroid::normalize(&m, 2, lift));
    assert!(t_eq(&m, &image, &direct));
}

#[test]
fn embedding_theorem_aff1() {
    let pair = Arc::new(ValidatedPair::new(LiePair::aff1()).unwrap());
    let report = hopfbrace::embed::check_embedding(pair, 2, 8, 41, 2);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn equivalence_theorem_aff1() {
    let pair = Arc::new(ValidatedPair::new(LiePair::aff1()).unwrap());
    let report = hopfbrace::embed::check_equivalence(pair, 2, 8, 43);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn twisted_diagram_trivial_adt() {
    let pair = Arc::new(ValidatedPair::new(LiePair::aff1()).unwrap());
    let k = Chain::unit(2, &pair, Window::laurent(8, 2));
    let report =
        hopfbrace::embed::check_twisted_diagram(pair, &k, 2, 6, 47).expect("trivial ADT");
    assert!(report.passed(), "{}", report.render_text());
}
