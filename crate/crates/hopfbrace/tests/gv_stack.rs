//! Cross-layer checks of the Gerstenhaber–Voronov stack on the small
//! built-in models: operad axioms, brace B∞ axioms, and the explicit
//! structure formulas against the generic operadic ones.

use hopfbrace::brace::{check_brace_binf_axioms, BraceAlgebra, Graded};
use hopfbrace::coeff::Window;
use hopfbrace::hopf::endo::{
    brace_direct, cochain_to_tensor, cup_direct, differential_direct, tensor_to_cochain,
    EndAlgebra,
};
use hopfbrace::hopf::group::GroupAlgebra;
use hopfbrace::hopf::polybi::PolyBialgebra;
use hopfbrace::hopf::{
    brace_explicit, canonical_binf, check_hopfalgd_axioms, check_lift_invariance,
    cup_explicit, delta_explicit, HopfOperad,
};
use hopfbrace::operad::{check_operad_axioms, Operad};
use hopfbrace::sample::{rng_from_seed, SizeBound};

#[test]
fn operad_axioms_group_algebra() {
    let op = HopfOperad::new(GroupAlgebra::s3(Window::power(0)));
    let report = check_operad_axioms(&op, 30, 11, &SizeBound::with_degree(2));
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn operad_axioms_endo() {
    let op = HopfOperad::new(EndAlgebra::upper_triangular_2x2(Window::power(0)));
    let report = check_operad_axioms(&op, 20, 12, &SizeBound::with_degree(2));
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn hopf_axioms_all_small_models() {
    for report in [
        check_hopfalgd_axioms(&GroupAlgebra::s3(Window::power(0)), 6, 3),
        check_hopfalgd_axioms(&PolyBialgebra::new(2, Window::power(2)), 6, 4),
        check_hopfalgd_axioms(&EndAlgebra::upper_triangular_2x2(Window::power(0)), 6, 5),
        check_hopfalgd_axioms(&EndAlgebra::dual_numbers(Window::power(0)), 6, 6),
    ] {
        assert!(report.passed(), "{}", report.render_text());
    }
}

#[test]
fn lift_invariance_endo() {
    let report = check_lift_invariance(&EndAlgebra::upper_triangular_2x2(Window::power(0)), 20, 9);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn binf_axioms_group_algebra() {
    let alg = canonical_binf(GroupAlgebra::s3(Window::power(0))).expect("m{m} = 0");
    let report = check_brace_binf_axioms(&alg, 16, 21, 3);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn binf_axioms_endo() {
    let alg = canonical_binf(EndAlgebra::upper_triangular_2x2(Window::power(0))).expect("m{m} = 0");
    let report = check_brace_binf_axioms(&alg, 10, 22, 2);
    assert!(report.passed(), "{}", report.render_text());
}

#[test]
fn explicit_formulas_match_generic() {
    let model = GroupAlgebra::s3(Window::power(0));
    let alg = canonical_binf(model).expect("m{m} = 0");
    let op = alg.operad();
    let bound = SizeBound::with_degree(3);
    let mut rng = rng_from_seed(77);
    for t in 0..40u64 {
        let dx = (t % 4) as usize;
        let x = Graded::new(dx, op.random(dx, &bound, &mut rng));
        let model = &op.model;
        let lhs = alg.differential(&x).unwrap();
        let rhs = delta_explicit(model, &x.payload);
        assert!(op.eq(&lhs.payload, &rhs), "explicit δ matches [m, ·]_G");

        let dy = ((t / 4) % 3) as usize;
        let y = Graded::new(dy, op.random(dy, &bound, &mut rng));
        let lhs = alg.cup(&x, &y).unwrap();
        let rhs = cup_explicit(model, &x.payload, &y.payload);
        assert!(op.eq(&lhs.payload, &rhs), "explicit ∪ matches (-1)^|x| m{{x,y}}");

        let k = (t % 2) as usize + 1;
        let ys: Vec<Graded<_>> = (0..k)
            .map(|j| {
                let d = ((t + j as u64) % 3) as usize;
                Graded::new(d, op.random(d, &bound, &mut rng))
            })
            .collect();
        let lhs = alg.brace(&x, &ys);
        let payloads: Vec<_> = ys.iter().map(|y| y.payload.clone()).collect();
        let rhs = brace_explicit(model, &x.payload, &payloads);
        assert!(op.eq(&lhs.payload, &rhs), "explicit braces match the generic ones");
    }
}

#[test]
fn hochschild_oracle_matches_endo_binf() {
    let model = EndAlgebra::upper_triangular_2x2(Window::power(0));
    let alg = canonical_binf(model.clone()).expect("m{m} = 0");
    let op = alg.operad();
    let bound = SizeBound::with_degree(2);
    let mut rng = rng_from_seed(101);
    for t in 0..25u64 {
        let dx = (t % 3) as usize + 1;
        let x = Graded::new(dx, op.random(dx, &bound, &mut rng));
        let cx = tensor_to_cochain(&model, &x.payload);

        let lhs = alg.differential(&x).unwrap();
        let rhs = cochain_to_tensor(&model, &differential_direct(&model, &cx));
        assert!(op.eq(&lhs.payload, &rhs), "oracle δ at t={t}");

        let dy = (t % 2) as usize + 1;
        let y = Graded::new(dy, op.random(dy, &bound, &mut rng));
        let cy = tensor_to_cochain(&model, &y.payload);
        let lhs = alg.cup(&x, &y).unwrap();
        let rhs = cochain_to_tensor(&model, &cup_direct(&model, &cx, &cy));
        assert!(op.eq(&lhs.payload, &rhs), "oracle ∪ at t={t}");

        let lhs = alg.brace(&x, std::slice::from_ref(&y));
        let rhs = cochain_to_tensor(&model, &brace_direct(&model, &cx, &[cy]));
        assert!(op.eq(&lhs.payload, &rhs), "oracle braces at t={t}");
    }
}

#[test]
fn explicit_brace_zero_when_args_exceed_slots() {
    let model = GroupAlgebra::s3(Window::power(0));
    let op = HopfOperad::new(model);
    let bound = SizeBound::with_degree(2);
    let mut rng = rng_from_seed(5);
    let x = op.random(1, &bound, &mut rng);
    let y1 = op.random(1, &bound, &mut rng);
    let y2 = op.random(2, &bound, &mut rng);
    let alg = BraceAlgebra::new(op);
    let out = alg.brace(&Graded::new(1, x), &[Graded::new(1, y1), Graded::new(2, y2)]);
    assert!(alg.is_zero(&out), "p < k gives zero");
}
