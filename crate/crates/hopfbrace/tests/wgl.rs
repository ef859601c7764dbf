//! The Lie-pair layer end to end: operad axioms for `P_(g,l)`, the brace
//! B∞ axiom suite for `W_(g,l)`, the explicit structure formulas against
//! the generic Gerstenhaber–Voronov ones, and invariance preservation.

use std::sync::Arc;

use hopfbrace::brace::{check_brace_binf_axioms, Graded};
use hopfbrace::coeff::Window;
use hopfbrace::liepair::{
    brace_gl_explicit, check_invariance, cup_gl_explicit, delta_gl_explicit, wgl_structures,
    LiePair, LiePairOperad, ValidatedPair,
};
use hopfbrace::operad::{check_operad_axioms, Operad};
use hopfbrace::sample::{rng_from_seed, SizeBound};

fn win() -> Window {
    Window::power(2)
}

fn pairs() -> Vec<Arc<ValidatedPair>> {
    [LiePair::aff1(), LiePair::sl2_cartan(), LiePair::aff1_full()]
        .into_iter()
        .map(|p| Arc::new(ValidatedPair::new(p).unwrap()))
        .collect()
}

#[test]
fn operad_axioms_liepair() {
    for pair in pairs() {
        let op = LiePairOperad::new(pair, win());
        let report = check_operad_axioms(&op, 25, 31, &SizeBound::with_degree(2).with_hbar(1));
        assert!(report.passed(), "{}", report.render_text());
    }
}

#[test]
fn binf_axioms_wgl() {
    for pair in pairs() {
        let alg = wgl_structures(pair, win()).expect("m{m} = 0 for W_(g,l)");
        let report = check_brace_binf_axioms(&alg, 8, 33, 2);
        assert!(report.passed(), "{}", report.render_text());
    }
}

#[test]
fn explicit_wgl_formulas_match_generic() {
    for pair in pairs() {
        let alg = wgl_structures(pair.clone(), win()).expect("W_(g,l)");
        let op = alg.operad();
        let bound = SizeBound::with_degree(2).with_hbar(1);
        let mut rng = rng_from_seed(55);
        for t in 0..20u64 {
            let dx = (t % 3) as usize;
            let x = Graded::new(dx, op.random(dx, &bound, &mut rng));

            let lhs = alg.differential(&x).unwrap();
            let rhs = delta_gl_explicit(&pair, &x.payload);
            assert!(op.eq(&lhs.payload, &rhs), "δ_(g,l) explicit = generic ({})", pair.name);

            let dy = ((t / 3) % 3) as usize;
            let y = Graded::new(dy, op.random(dy, &bound, &mut rng));
            let lhs = alg.cup(&x, &y).unwrap();
            let rhs = cup_gl_explicit(&pair, &x.payload, &y.payload, win());
            assert!(op.eq(&lhs.payload, &rhs), "∪_(g,l) explicit = generic ({})", pair.name);

            let k = 1 + (t % 2) as usize;
            let ys: Vec<Graded<_>> = (0..k)
                .map(|j| {
                    let d = ((t + j as u64) % 3) as usize;
                    Graded::new(d, op.random(d, &bound, &mut rng))
                })
                .collect();
            let lhs = alg.brace(&x, &ys);
            let refs: Vec<&_> = ys.iter().map(|y| &y.payload).collect();
            let rhs = brace_gl_explicit(&pair, &x.payload, &refs, win());
            assert!(op.eq(&lhs.payload, &rhs), "braces explicit = generic ({})", pair.name);
        }
    }
}

#[test]
fn invariance_preserved_by_structures() {
    for pair in pairs() {
        let alg = wgl_structures(pair.clone(), win()).expect("W_(g,l)");
        let op = alg.operad();
        let bound = SizeBound::with_degree(2).with_hbar(1);
        let mut rng = rng_from_seed(91);
        for t in 0..10u64 {
            let dx = 1 + (t % 2) as usize;
            let x = Graded::new(dx, op.random(dx, &bound, &mut rng));
            let y = Graded::new(1, op.random(1, &bound, &mut rng));
            assert!(check_invariance(&pair, &x.payload, win()).is_ok());
            for out in [
                alg.differential(&x).unwrap(),
                alg.cup(&x, &y).unwrap(),
                alg.brace(&x, std::slice::from_ref(&y)),
                Graded::new(dx, op.partial(&x.payload, 1, &y.payload)),
            ] {
                assert!(
                    check_invariance(&pair, &out.payload, win()).is_ok(),
                    "invariance preserved ({})",
                    pair.name
                );
            }
        }
    }
}

#[test]
fn invariant_sampler_spans_nontrivial_space() {
    // sl₂/Cartan degree 1: the weight-zero subspace is non-trivial.
    let pair = Arc::new(ValidatedPair::new(LiePair::sl2_cartan()).unwrap());
    let op = LiePairOperad::new(pair.clone(), win());
    let basis = op.invariants(1);
    assert!(!basis.is_empty());
    for chain in &basis {
        assert!(check_invariance(&pair, chain, win()).is_ok());
    }
}
