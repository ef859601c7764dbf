//! The non-symmetric operad contract: arity spaces with linear structure,
//! a full composition map γ, partial compositions `∘_i`, and an identity
//! element, together with the operad axiom suite and operad morphisms.
//!
//! Operads here are value-level model objects rather than compile-time
//! abstractions: the axiom harness can enumerate, wrap, and deliberately
//! corrupt a model (see [`crate::mutation`]) to demonstrate that the suites
//! detect broken structure.

use rand::RngCore;
use serde_json::json;
use thiserror::Error;

use crate::coeff::HSeries;
use crate::report::{Failure, Report};
use crate::sample::{rng_from_seed, sample_seed, SizeBound};

#[derive(Debug, Error)]
pub enum OperadError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element is not a multiplication: γ(m; m, id) ≠ γ(m; id, m)")]
    NotAMultiplication,
}

/// A non-symmetric operad with K-linear arity spaces `P(n)`.
///
/// A model must override at least one of [`Operad::compose`] and
/// [`Operad::partial`]; each has a default implementation in terms of the
/// other (γ as the iterated-∘ chain, `∘_i` as γ padded with identities).
pub trait Operad {
    type Elem: Clone;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Elem;
    fn arity(&self, x: &Self::Elem) -> usize;
    fn zero(&self, arity: usize) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &HSeries, x: &Self::Elem) -> Self::Elem;
    fn eq(&self, x: &Self::Elem, y: &Self::Elem) -> bool;
    fn is_zero(&self, x: &Self::Elem) -> bool {
        self.eq(x, &self.zero(self.arity(x)))
    }

    /// Full composition γ(x; y_1, …, y_n) with `n = arity(x)`.
    fn compose(&self, x: &Self::Elem, ys: &[Self::Elem]) -> Self::Elem {
        compose_via_partials(self, x, ys)
    }

    /// Partial composition `x ∘_i y`, `i` 1-based, `1 ≤ i ≤ arity(x)`.
    fn partial(&self, x: &Self::Elem, i: usize, y: &Self::Elem) -> Self::Elem {
        let n = self.arity(x);
        assert!((1..=n).contains(&i), "partial composition index {i} out of 1..={n}");
        let ys: Vec<Self::Elem> = (1..=n)
            .map(|j| if j == i { y.clone() } else { self.identity() })
            .collect();
        self.compose(x, &ys)
    }

    /// Seeded random element of the given arity, bounded in size.
    fn random(&self, arity: usize, bound: &SizeBound, rng: &mut dyn RngCore) -> Self::Elem;

    fn fmt_elem(&self, x: &Self::Elem) -> String;
}

/// Reconstruct γ from the partial compositions by the iterated-∘ chain
/// `(((x ∘_1 y_1) ∘_{k_1+1} y_2) ∘_{k_1+k_2+1} …) ∘_{k_1+…+k_{n-1}+1} y_n`.
pub fn compose_via_partials<O: Operad + ?Sized>(
    op: &O,
    x: &O::Elem,
    ys: &[O::Elem],
) -> O::Elem {
    let n = op.arity(x);
    assert_eq!(ys.len(), n, "γ needs exactly arity(x) arguments");
    let mut acc = x.clone();
    let mut pos = 1usize;
    for y in ys {
        acc = op.partial(&acc, pos, y);
        pos += op.arity(y);
    }
    acc
}

/// An arity-2 element `m` with γ(m; m, id) = γ(m; id, m), i.e. an associative
/// multiplication on the operad.
#[derive(Debug, Clone)]
pub struct Multiplication<E> {
    pub elem: E,
}

impl<E: Clone> Multiplication<E> {
    pub fn certify<O: Operad<Elem = E>>(op: &O, elem: E) -> Result<Self, OperadError> {
        if op.arity(&elem) != 2 {
            return Err(OperadError::ArityMismatch { expected: 2, got: op.arity(&elem) });
        }
        let lhs = op.compose(&elem, &[elem.clone(), op.identity()]);
        let rhs = op.compose(&elem, &[op.identity(), elem.clone()]);
        if op.eq(&lhs, &rhs) {
            Ok(Multiplication { elem })
        } else {
            Err(OperadError::NotAMultiplication)
        }
    }
}

/// A morphism of operads: arity-indexed linear maps with `f_1(id) = id` that
/// commute with the partial compositions.
pub trait OperadMorphism<S: Operad, T: Operad> {
    fn source(&self) -> &S;
    fn target(&self) -> &T;
    fn apply(&self, x: &S::Elem) -> T::Elem;
}

/// The identity morphism, mostly a sanity baseline for the checkers.
pub struct IdentityMorphism<'a, O: Operad>(pub &'a O);

impl<'a, O: Operad> OperadMorphism<O, O> for IdentityMorphism<'a, O> {
    fn source(&self) -> &O {
        self.0
    }
    fn target(&self) -> &O {
        self.0
    }
    fn apply(&self, x: &O::Elem) -> O::Elem {
        x.clone()
    }
}

fn sampled_arity(rng: &mut dyn RngCore, max: usize) -> usize {
    use rand::Rng;
    // Bias towards small positive arities; arity 0 stays reachable.
    let r: f64 = rng.gen();
    if r < 0.1 {
        0
    } else {
        1 + (rng.gen_range(0..max.max(1)))
    }
}

/// Property suite for the operad axioms: sequential composition, parallel
/// composition, unitality, and the γ-vs-∘ reconstruction identity. Failures
/// are data, not panics; each carries its reproduction seed.
pub fn check_operad_axioms<O: Operad>(
    op: &O,
    trials: u64,
    seed: u64,
    bound: &SizeBound,
) -> Report {
    let mut report = Report::new(format!("operad axioms [{}]", op.name())).with_config(json!({
        "model": op.name(),
        "trials": trials,
        "seed": seed,
        "degree": bound.degree,
    }));
    let fmt = |x: &O::Elem| op.fmt_elem(x);
    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;

        let n = sampled_arity(&mut rng, bound.degree);
        let m = sampled_arity(&mut rng, bound.degree);
        let l = sampled_arity(&mut rng, bound.degree);
        let x = op.random(n, bound, &mut rng);
        let y = op.random(m, bound, &mut rng);
        let z = op.random(l, bound, &mut rng);

        // Unitality: id ∘_1 x = x and x ∘_i id = x.
        report.check_eq(
            "unitality id∘1x",
            s,
            &format!("x = {}", fmt(&x)),
            &WrapEq(op, &op.partial(&op.identity(), 1, &x)),
            &WrapEq(op, &x),
            |e| fmt(e.1),
        );
        if n >= 1 {
            use rand::Rng;
            let i = rng.gen_range(1..=n);
            report.check_eq(
                "unitality x∘i id",
                s,
                &format!("x = {}, i = {i}", fmt(&x)),
                &WrapEq(op, &op.partial(&x, i, &op.identity())),
                &WrapEq(op, &x),
                |e| fmt(e.1),
            );
        }

        // Sequential composition: (x ∘_i y) ∘_{i-1+j} z = x ∘_i (y ∘_j z).
        if n >= 1 && m >= 1 {
            use rand::Rng;
            let i = rng.gen_range(1..=n);
            let j = rng.gen_range(1..=m);
            let lhs = op.partial(&op.partial(&x, i, &y), i - 1 + j, &z);
            let rhs = op.partial(&x, i, &op.partial(&y, j, &z));
            report.check_eq(
                "sequential composition",
                s,
                &format!("x = {}, y = {}, z = {}, i = {i}, j = {j}", fmt(&x), fmt(&y), fmt(&z)),
                &WrapEq(op, &lhs),
                &WrapEq(op, &rhs),
                |e| fmt(e.1),
            );
        }

        // Parallel composition: (x ∘_i y) ∘_{k-1+m} z = (x ∘_k z) ∘_i y, i < k.
        if n >= 2 {
            use rand::Rng;
            let i = rng.gen_range(1..n);
            let k = rng.gen_range(i + 1..=n);
            let lhs = op.partial(&op.partial(&x, i, &y), k - 1 + m, &z);
            let rhs = op.partial(&op.partial(&x, k, &z), i, &y);
            report.check_eq(
                "parallel composition",
                s,
                &format!("x = {}, y = {}, z = {}, i = {i}, k = {k}", fmt(&x), fmt(&y), fmt(&z)),
                &WrapEq(op, &lhs),
                &WrapEq(op, &rhs),
                |e| fmt(e.1),
            );
        }

        // γ(id; x) = x, γ(x; id, …, id) = x, and γ agrees with the ∘ chain.
        report.check_eq(
            "γ(id; x) = x",
            s,
            &format!("x = {}", fmt(&x)),
            &WrapEq(op, &op.compose(&op.identity(), std::slice::from_ref(&x))),
            &WrapEq(op, &x),
            |e| fmt(e.1),
        );
        let ids: Vec<O::Elem> = (0..n).map(|_| op.identity()).collect();
        report.check_eq(
            "γ(x; id,…,id) = x",
            s,
            &format!("x = {}", fmt(&x)),
            &WrapEq(op, &op.compose(&x, &ids)),
            &WrapEq(op, &x),
            |e| fmt(e.1),
        );
        if n >= 1 {
            let ys: Vec<O::Elem> = (0..n)
                .map(|_| {
                    let a = sampled_arity(&mut rng, bound.degree);
                    op.random(a, bound, &mut rng)
                })
                .collect();
            let direct = op.compose(&x, &ys);
            let chained = compose_via_partials(op, &x, &ys);
            report.check_eq(
                "γ = iterated ∘ chain",
                s,
                &format!("x = {}, ys = [{}]", fmt(&x), ys.iter().map(&fmt).collect::<Vec<_>>().join(", ")),
                &WrapEq(op, &direct),
                &WrapEq(op, &chained),
                |e| fmt(e.1),
            );
        }
    }
    report
}

/// Check that a family of maps is an operad morphism on sampled inputs:
/// `f(id) = id` and `f(x ∘_i y) = f(x) ∘_i f(y)`.
pub fn check_morphism<S: Operad, T: Operad, F: OperadMorphism<S, T>>(
    f: &F,
    trials: u64,
    seed: u64,
    bound: &SizeBound,
) -> Report {
    let src = f.source();
    let tgt = f.target();
    let mut report = Report::new(format!(
        "operad morphism [{} → {}]",
        src.name(),
        tgt.name()
    ))
    .with_config(json!({"trials": trials, "seed": seed, "degree": bound.degree}));
    report.record(tgt.eq(&f.apply(&src.identity()), &tgt.identity()), || Failure {
        check: "f(id) = id".into(),
        seed,
        inputs: "id".into(),
        lhs: tgt.fmt_elem(&f.apply(&src.identity())),
        rhs: tgt.fmt_elem(&tgt.identity()),
    });
    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        let n = 1 + (t as usize % bound.degree.max(1));
        let m = sampled_arity(&mut rng, bound.degree);
        let x = src.random(n, bound, &mut rng);
        let y = src.random(m, bound, &mut rng);
        use rand::Rng;
        let i = rng.gen_range(1..=n);
        let lhs = f.apply(&src.partial(&x, i, &y));
        let rhs = tgt.partial(&f.apply(&x), i, &f.apply(&y));
        report.record(tgt.eq(&lhs, &rhs), || Failure {
            check: "f(x ∘_i y) = f(x) ∘_i f(y)".into(),
            seed: s,
            inputs: format!("x = {}, y = {}, i = {i}", src.fmt_elem(&x), src.fmt_elem(&y)),
            lhs: tgt.fmt_elem(&lhs),
            rhs: tgt.fmt_elem(&rhs),
        });
    }
    report
}

/// Equality adaptor so `Report::check_eq` can compare through `Operad::eq`.
struct WrapEq<'a, O: Operad>(&'a O, &'a O::Elem);

impl<'a, O: Operad> PartialEq for WrapEq<'a, O> {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq(self.1, other.1)
    }
}
