//! The Gerstenhaber–Voronov operadic modeling of brace B∞ algebras.
//!
//! From any non-symmetric operad `P` this module builds the graded space
//! `W_P = ⊕ P(n)[-n]` with the brace operations
//!
//! ```text
//! x{y_1, …, y_k} = Σ ± γ(x; id, …, y_1, …, id, …, y_k, …, id)
//! ```
//!
//! summed over all insertions, with sign `(-1)^{Σ_p i_p(|y_p|-1)}` where
//! `i_p` counts one per identity slot before `y_p` plus `|y_q|` per earlier
//! inserted argument. Given a multiplication `m` with `m{m} = 0` the cup
//! product `x ∪ y = (-1)^{|x|} m{x, y}` and differential `δ = [m, ·]_G`
//! complete a brace B∞ algebra, and [`check_brace_binf_axioms`] asserts the
//! five defining identity families exactly on sampled elements.

use rand::{Rng, RngCore};
use serde_json::json;
use thiserror::Error;

use crate::operad::{Multiplication, Operad, OperadMorphism};
use crate::report::{Failure, Report};
use crate::sample::{rng_from_seed, sample_seed, SizeBound};

/// Homogeneous element of `W_P`: the degree equals the payload's arity.
#[derive(Debug, Clone)]
pub struct Graded<E> {
    pub degree: usize,
    pub payload: E,
}

impl<E> Graded<E> {
    pub fn new(degree: usize, payload: E) -> Self {
        Graded { degree, payload }
    }

    /// Degree after the shift `W_P[1]`, as a signed integer.
    pub fn shifted_degree(&self) -> i64 {
        self.degree as i64 - 1
    }
}

#[derive(Debug, Error)]
pub enum BraceError {
    #[error("no multiplication installed")]
    NoMultiplication,
    #[error("m{{m}} ≠ 0, the element does not induce a brace B∞ structure")]
    MBraceMNotZero,
    #[error(transparent)]
    Operad(#[from] crate::operad::OperadError),
}

/// Which sign rule [`BraceAlgebra::brace`] applies. `DropInsertionSign`
/// deliberately omits the word-level sign so the axiom suites can prove they
/// notice (mutation testing); everything else uses `Paper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
    #[default]
    Paper,
    DropInsertionSign,
}

/// `W_P` together with an optional certified multiplication.
pub struct BraceAlgebra<O: Operad> {
    op: O,
    mult: Option<Multiplication<O::Elem>>,
    sign_rule: SignRule,
}

impl<O: Operad> BraceAlgebra<O> {
    /// Brace algebra without differential/cup (no multiplication).
    pub fn new(op: O) -> Self {
        BraceAlgebra { op, mult: None, sign_rule: SignRule::Paper }
    }

    /// Certifies that `m` is a multiplication (γ(m; m, id) = γ(m; id, m))
    /// and that `m{m} = 0` before installing it.
    pub fn with_multiplication(op: O, m: O::Elem) -> Result<Self, BraceError> {
        let mult = Multiplication::certify(&op, m)?;
        let alg = BraceAlgebra { op, mult: Some(mult), sign_rule: SignRule::Paper };
        let m = alg.multiplication().expect("just installed");
        let mm = alg.brace(&m, std::slice::from_ref(&m));
        if !alg.op.is_zero(&mm.payload) {
            return Err(BraceError::MBraceMNotZero);
        }
        Ok(alg)
    }

    pub fn with_sign_rule(mut self, rule: SignRule) -> Self {
        self.sign_rule = rule;
        self
    }

    pub fn operad(&self) -> &O {
        &self.op
    }

    pub fn multiplication(&self) -> Option<Graded<O::Elem>> {
        self.mult.as_ref().map(|m| Graded::new(2, m.elem.clone()))
    }

    pub fn zero(&self, degree: usize) -> Graded<O::Elem> {
        Graded::new(degree, self.op.zero(degree))
    }

    pub fn add(&self, x: &Graded<O::Elem>, y: &Graded<O::Elem>) -> Graded<O::Elem> {
        // Zero is degree-ambiguous: braces of degree-0 arguments report a
        // clamped degree, so let a vanishing summand adopt the other side's.
        if x.degree != y.degree {
            if self.op.is_zero(&x.payload) {
                return y.clone();
            }
            if self.op.is_zero(&y.payload) {
                return x.clone();
            }
            panic!("only homogeneous sums are supported: {} vs {}", x.degree, y.degree);
        }
        Graded::new(x.degree, self.op.add(&x.payload, &y.payload))
    }

    pub fn scale(&self, c: &crate::coeff::HSeries, x: &Graded<O::Elem>) -> Graded<O::Elem> {
        Graded::new(x.degree, self.op.scale(c, &x.payload))
    }

    fn scale_sign(&self, sign: i64, x: Graded<O::Elem>) -> Graded<O::Elem> {
        if sign.rem_euclid(2) == 0 {
            x
        } else {
            Graded::new(x.degree, self.op.scale(&neg_one(), &x.payload))
        }
    }

    pub fn eq(&self, x: &Graded<O::Elem>, y: &Graded<O::Elem>) -> bool {
        x.degree == y.degree && self.op.eq(&x.payload, &y.payload)
    }

    pub fn is_zero(&self, x: &Graded<O::Elem>) -> bool {
        self.op.is_zero(&x.payload)
    }

    pub fn fmt(&self, x: &Graded<O::Elem>) -> String {
        format!("deg {}: {}", x.degree, self.op.fmt_elem(&x.payload))
    }

    pub fn random(&self, degree: usize, bound: &SizeBound, rng: &mut dyn RngCore) -> Graded<O::Elem> {
        Graded::new(degree, self.op.random(degree, bound, rng))
    }

    /// The brace `x{y_1, …, y_k}`, zero when there are more arguments than
    /// insertion slots, `x` itself when the argument list is empty.
    pub fn brace(&self, x: &Graded<O::Elem>, ys: &[Graded<O::Elem>]) -> Graded<O::Elem> {
        let n = x.degree;
        let k = ys.len();
        let out_degree = (n + ys.iter().map(|y| y.degree).sum::<usize>()).saturating_sub(k);
        if k == 0 {
            return x.clone();
        }
        if k > n {
            return self.zero(out_degree);
        }
        let mut acc = self.op.zero(out_degree);
        let mut positions: Vec<usize> = (1..=k).collect();
        loop {
            // Sign exponent Σ_p i_p(|y_p| - 1), i_p = (j_p - p) + Σ_{q<p}|y_q|.
            let mut exponent = 0i64;
            let mut before = 0i64;
            for (p, &j) in positions.iter().enumerate() {
                let i_p = (j as i64 - (p as i64 + 1)) + before;
                exponent += i_p * (ys[p].degree as i64 - 1);
                before += ys[p].degree as i64;
            }
            if self.sign_rule == SignRule::DropInsertionSign {
                exponent = 0;
            }
            let mut args: Vec<O::Elem> = Vec::with_capacity(n);
            let mut next = 0usize;
            for j in 1..=n {
                if next < k && positions[next] == j {
                    args.push(ys[next].payload.clone());
                    next += 1;
                } else {
                    args.push(self.op.identity());
                }
            }
            let term = self.op.compose(&x.payload, &args);
            let term = if exponent.rem_euclid(2) == 1 {
                self.op.scale(&neg_one(), &term)
            } else {
                term
            };
            acc = self.op.add(&acc, &term);

            // Next combination j_1 < … < j_k in 1..=n.
            let mut idx = k;
            loop {
                if idx == 0 {
                    return Graded::new(out_degree, acc);
                }
                idx -= 1;
                if positions[idx] < n - (k - 1 - idx) {
                    positions[idx] += 1;
                    for t in idx + 1..k {
                        positions[t] = positions[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// `x ∪ y = (-1)^{|x|} m{x, y}`.
    pub fn cup(
        &self,
        x: &Graded<O::Elem>,
        y: &Graded<O::Elem>,
    ) -> Result<Graded<O::Elem>, BraceError> {
        let m = self.multiplication().ok_or(BraceError::NoMultiplication)?;
        let raw = self.brace(&m, &[x.clone(), y.clone()]);
        Ok(self.scale_sign(x.degree as i64, raw))
    }

    /// `δ(x) = m{x} - (-1)^{|x|+1} x{m} = [m, x]_G`.
    pub fn differential(&self, x: &Graded<O::Elem>) -> Result<Graded<O::Elem>, BraceError> {
        let m = self.multiplication().ok_or(BraceError::NoMultiplication)?;
        Ok(self.gerstenhaber(&m, x))
    }

    /// Gerstenhaber bracket `[x, y]_G = x{y} - (-1)^{(|x|+1)(|y|+1)} y{x}`.
    pub fn gerstenhaber(&self, x: &Graded<O::Elem>, y: &Graded<O::Elem>) -> Graded<O::Elem> {
        let xy = self.brace(x, std::slice::from_ref(y));
        let yx = self.brace(y, std::slice::from_ref(x));
        let sign = (x.degree as i64 + 1) * (y.degree as i64 + 1) + 1;
        self.add(&xy, &self.scale_sign(sign, yx))
    }

    /// The shifted bracket `[x[1], y[1]]_G = (-1)^{|x|}([x, y]_G)[1]`, which
    /// together with `-δ` makes `W_P[1]` a dg Lie algebra.
    pub fn shifted_bracket(&self, x: &Graded<O::Elem>, y: &Graded<O::Elem>) -> Graded<O::Elem> {
        let b = self.gerstenhaber(x, y);
        self.scale_sign(x.degree as i64, b)
    }
}

fn neg_one() -> crate::coeff::HSeries {
    use crate::coeff::{HSeries, Window};
    HSeries::from_int(-1, Window::power(0))
}

/// All sequences `(i_1..i_n, r_1..r_n)` with `0 ≤ i_1`, `i_p + r_p ≤ i_{p+1}`
/// and `i_n + r_n ≤ m` — the index set of the higher pre-Jacobi identity.
fn prejacobi_sequences(n: usize, m: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut i = vec![0usize; n];
    let mut r = vec![0usize; n];
    fn rec(
        p: usize,
        n: usize,
        m: usize,
        start: usize,
        i: &mut Vec<usize>,
        r: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if p == n {
            out.push((i.clone(), r.clone()));
            return;
        }
        for ip in start..=m {
            for rp in 0..=(m - ip) {
                i[p] = ip;
                r[p] = rp;
                rec(p + 1, n, m, ip + rp, i, r, out);
            }
        }
    }
    rec(0, n, m, 0, &mut i, &mut r, &mut out);
    out
}

/// Left side minus right side of the pre-Jacobi identity; zero iff it holds.
fn prejacobi_residual<O: Operad>(
    alg: &BraceAlgebra<O>,
    x: &Graded<O::Elem>,
    ys: &[Graded<O::Elem>],
    zs: &[Graded<O::Elem>],
) -> Graded<O::Elem> {
    let lhs = alg.brace(&alg.brace(x, ys), zs);
    let mut rhs = alg.zero(lhs.degree);
    for (i, r) in prejacobi_sequences(ys.len(), zs.len()) {
        // Sign Σ_p (|y_p|+1) Σ_{q ≤ i_p} (|z_q|+1).
        let mut exponent = 0i64;
        for (p, &ip) in i.iter().enumerate() {
            let inner: i64 = zs[..ip].iter().map(|z| z.degree as i64 + 1).sum();
            exponent += (ys[p].degree as i64 + 1) * inner;
        }
        let mut args: Vec<Graded<O::Elem>> = Vec::new();
        let mut consumed = 0usize;
        for (p, (&ip, &rp)) in i.iter().zip(r.iter()).enumerate() {
            for z in &zs[consumed..ip] {
                args.push(z.clone());
            }
            args.push(alg.brace(&ys[p], &zs[ip..ip + rp]));
            consumed = ip + rp;
        }
        for z in &zs[consumed..] {
            args.push(z.clone());
        }
        let term = alg.brace(x, &args);
        if term.degree == rhs.degree {
            rhs = alg.add(&rhs, &alg.scale_sign(exponent, term));
        } else {
            debug_assert!(alg.is_zero(&term), "degree mismatch only for zero terms");
        }
    }
    alg.add(&lhs, &alg.scale_sign(1, rhs))
}

/// Left minus right of the distributivity relation
/// `(x_1 ∪ x_2){y_1..y_n} = Σ_k ± x_1{y_1..y_k} ∪ x_2{y_{k+1}..y_n}`.
fn distributivity_residual<O: Operad>(
    alg: &BraceAlgebra<O>,
    x1: &Graded<O::Elem>,
    x2: &Graded<O::Elem>,
    ys: &[Graded<O::Elem>],
) -> Result<Graded<O::Elem>, BraceError> {
    let lhs = alg.brace(&alg.cup(x1, x2)?, ys);
    let mut rhs = alg.zero(lhs.degree);
    for k in 0..=ys.len() {
        let exponent: i64 =
            x2.degree as i64 * ys[..k].iter().map(|y| y.degree as i64 + 1).sum::<i64>();
        let left = alg.brace(x1, &ys[..k]);
        let right = alg.brace(x2, &ys[k..]);
        let term = alg.cup(&left, &right)?;
        if term.degree == rhs.degree {
            rhs = alg.add(&rhs, &alg.scale_sign(exponent, term));
        } else {
            debug_assert!(alg.is_zero(&term));
        }
    }
    Ok(alg.add(&lhs, &alg.scale_sign(1, rhs)))
}

/// Left minus right of the higher homotopy relation for `n ≥ 1` arguments.
fn homotopy_residual<O: Operad>(
    alg: &BraceAlgebra<O>,
    x: &Graded<O::Elem>,
    xs: &[Graded<O::Elem>],
) -> Result<Graded<O::Elem>, BraceError> {
    let n = xs.len();
    assert!(n >= 1);
    let d = |e: &Graded<O::Elem>| alg.differential(e);
    let mut lhs = d(&alg.brace(x, xs))?;
    lhs = alg.add(&lhs, &alg.scale_sign(1, alg.brace(&d(x)?, xs)));
    for i in 0..n {
        let exponent =
            x.degree as i64 + 1 + xs[..i].iter().map(|e| e.degree as i64 + 1).sum::<i64>() + 1;
        let mut args = xs.to_vec();
        args[i] = d(&xs[i])?;
        lhs = alg.add(&lhs, &alg.scale_sign(exponent, alg.brace(x, &args)));
    }

    let mut rhs = alg.zero(lhs.degree);
    {
        let exponent = x.degree as i64 * (xs[0].degree as i64 + 1);
        let inner = alg.brace(x, &xs[1..]);
        let term = alg.cup(&xs[0], &inner)?;
        rhs = alg.add(&rhs, &alg.scale_sign(exponent, term));
    }
    for i in 0..n.saturating_sub(1) {
        let exponent =
            x.degree as i64 + 1 + xs[..=i].iter().map(|e| e.degree as i64 + 1).sum::<i64>() + 1;
        let mut args: Vec<Graded<O::Elem>> = Vec::with_capacity(n - 1);
        args.extend_from_slice(&xs[..i]);
        args.push(alg.cup(&xs[i], &xs[i + 1])?);
        args.extend_from_slice(&xs[i + 2..]);
        rhs = alg.add(&rhs, &alg.scale_sign(exponent, alg.brace(x, &args)));
    }
    {
        let exponent =
            x.degree as i64 + 1 + xs[..n - 1].iter().map(|e| e.degree as i64 + 1).sum::<i64>();
        let inner = alg.brace(x, &xs[..n - 1]);
        let term = alg.cup(&inner, &xs[n - 1])?;
        rhs = alg.add(&rhs, &alg.scale_sign(exponent, term));
    }
    Ok(alg.add(&lhs, &alg.scale_sign(1, rhs)))
}

/// The brace B∞ axiom suite: identity brace, higher pre-Jacobi, dg algebra,
/// distributivity, higher homotopies, plus the dg Lie shift compatibilities.
/// Everything is asserted exactly; failures carry reproduction seeds.
pub fn check_brace_binf_axioms<O: Operad>(
    alg: &BraceAlgebra<O>,
    trials: u64,
    seed: u64,
    degree_bound: usize,
) -> Report {
    let mut report =
        Report::new(format!("brace B∞ axioms [{}]", alg.operad().name())).with_config(json!({
            "model": alg.operad().name(),
            "trials": trials,
            "seed": seed,
            "degree": degree_bound,
        }));
    let bound = SizeBound::with_degree(degree_bound);
    let pre_jacobi_shapes = [(1usize, 1usize), (1, 2), (2, 1), (2, 2)];
    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        let deg = |rng: &mut dyn RngCore| rng.gen_range(0..=degree_bound);

        // (1) x{} = x.
        let x = alg.random(deg(&mut rng), &bound, &mut rng);
        report.record(alg.eq(&alg.brace(&x, &[]), &x), || Failure {
            check: "x{} = x".into(),
            seed: s,
            inputs: alg.fmt(&x),
            lhs: alg.fmt(&alg.brace(&x, &[])),
            rhs: alg.fmt(&x),
        });

        // (2) pre-Jacobi for the sampled shape.
        let (n, m) = pre_jacobi_shapes[(t as usize) % pre_jacobi_shapes.len()];
        let ys: Vec<_> = (0..n).map(|_| alg.random(deg(&mut rng), &bound, &mut rng)).collect();
        let zs: Vec<_> = (0..m).map(|_| alg.random(deg(&mut rng), &bound, &mut rng)).collect();
        let res = prejacobi_residual(alg, &x, &ys, &zs);
        report.record(alg.is_zero(&res), || Failure {
            check: format!("pre-Jacobi (n,m)=({n},{m})"),
            seed: s,
            inputs: format!(
                "x = {}; ys = [{}]; zs = [{}]",
                alg.fmt(&x),
                ys.iter().map(|y| alg.fmt(y)).collect::<Vec<_>>().join(", "),
                zs.iter().map(|z| alg.fmt(z)).collect::<Vec<_>>().join(", ")
            ),
            lhs: alg.fmt(&res),
            rhs: "0".into(),
        });

        if alg.multiplication().is_some() {
            let a = alg.random(deg(&mut rng), &bound, &mut rng);
            let b = alg.random(deg(&mut rng), &bound, &mut rng);
            let c = alg.random(deg(&mut rng), &bound, &mut rng);

            // (3) dg associative algebra: associativity, Leibniz, δ² = 0.
            let assoc_l = alg.cup(&alg.cup(&a, &b).unwrap(), &c).unwrap();
            let assoc_r = alg.cup(&a, &alg.cup(&b, &c).unwrap()).unwrap();
            report.record(alg.eq(&assoc_l, &assoc_r), || Failure {
                check: "cup associativity".into(),
                seed: s,
                inputs: format!("a = {}; b = {}; c = {}", alg.fmt(&a), alg.fmt(&b), alg.fmt(&c)),
                lhs: alg.fmt(&assoc_l),
                rhs: alg.fmt(&assoc_r),
            });
            let leib_l = alg.differential(&alg.cup(&a, &b).unwrap()).unwrap();
            let leib_r = alg.add(
                &alg.cup(&alg.differential(&a).unwrap(), &b).unwrap(),
                &alg.scale_sign(a.degree as i64, alg.cup(&a, &alg.differential(&b).unwrap()).unwrap()),
            );
            report.record(alg.eq(&leib_l, &leib_r), || Failure {
                check: "Leibniz rule".into(),
                seed: s,
                inputs: format!("a = {}; b = {}", alg.fmt(&a), alg.fmt(&b)),
                lhs: alg.fmt(&leib_l),
                rhs: alg.fmt(&leib_r),
            });
            let dd = alg.differential(&alg.differential(&a).unwrap()).unwrap();
            report.record(alg.is_zero(&dd), || Failure {
                check: "δ² = 0".into(),
                seed: s,
                inputs: alg.fmt(&a),
                lhs: alg.fmt(&dd),
                rhs: "0".into(),
            });

            // (4) distributivity with up to 3 arguments.
            let nargs = 1 + (t as usize % 3);
            let ys: Vec<_> =
                (0..nargs).map(|_| alg.random(deg(&mut rng), &bound, &mut rng)).collect();
            let res = distributivity_residual(alg, &a, &b, &ys).unwrap();
            report.record(alg.is_zero(&res), || Failure {
                check: format!("distributivity n={nargs}"),
                seed: s,
                inputs: format!(
                    "x1 = {}; x2 = {}; ys = [{}]",
                    alg.fmt(&a),
                    alg.fmt(&b),
                    ys.iter().map(|y| alg.fmt(y)).collect::<Vec<_>>().join(", ")
                ),
                lhs: alg.fmt(&res),
                rhs: "0".into(),
            });

            // (5) higher homotopies with up to 3 arguments.
            let res = homotopy_residual(alg, &a, &ys).unwrap();
            report.record(alg.is_zero(&res), || Failure {
                check: format!("higher homotopy n={nargs}"),
                seed: s,
                inputs: format!(
                    "x = {}; xs = [{}]",
                    alg.fmt(&a),
                    ys.iter().map(|y| alg.fmt(y)).collect::<Vec<_>>().join(", ")
                ),
                lhs: alg.fmt(&res),
                rhs: "0".into(),
            });

            // dg Lie shift: graded Jacobi and compatibility of -δ.
            let jac = shifted_jacobi_residual(alg, &a, &b, &c);
            report.record(alg.is_zero(&jac), || Failure {
                check: "shifted bracket Jacobi".into(),
                seed: s,
                inputs: format!("a = {}; b = {}; c = {}", alg.fmt(&a), alg.fmt(&b), alg.fmt(&c)),
                lhs: alg.fmt(&jac),
                rhs: "0".into(),
            });
            let comp = shifted_leibniz_residual(alg, &a, &b).unwrap();
            report.record(alg.is_zero(&comp), || Failure {
                check: "-δ is a shifted bracket derivation".into(),
                seed: s,
                inputs: format!("a = {}; b = {}", alg.fmt(&a), alg.fmt(&b)),
                lhs: alg.fmt(&comp),
                rhs: "0".into(),
            });
        }
    }
    report
}

/// Graded Jacobi in Leibniz form for the Gerstenhaber bracket with shifted
/// parity `‖x‖ = |x|+1`:
/// `[a,[b,c]] - [[a,b],c] - (-1)^{‖a‖‖b‖}[b,[a,c]]`.
fn shifted_jacobi_residual<O: Operad>(
    alg: &BraceAlgebra<O>,
    a: &Graded<O::Elem>,
    b: &Graded<O::Elem>,
    c: &Graded<O::Elem>,
) -> Graded<O::Elem> {
    let lhs = alg.gerstenhaber(a, &alg.gerstenhaber(b, c));
    let t1 = alg.gerstenhaber(&alg.gerstenhaber(a, b), c);
    let t2 = alg.gerstenhaber(b, &alg.gerstenhaber(a, c));
    let sign = (a.degree as i64 + 1) * (b.degree as i64 + 1);
    let rhs = alg.add(&t1, &alg.scale_sign(sign, t2));
    alg.add(&lhs, &alg.scale_sign(1, rhs))
}

/// Graded antisymmetry `[x,y]_G + (-1)^{‖x‖‖y‖}[y,x]_G` plus the derivation
/// property `δ[a,b] - [δa, b] - (-1)^{‖a‖}[a, δb]` — the dg Lie facts about
/// `(W[1], -δ, [·,·]_G)`.
fn shifted_leibniz_residual<O: Operad>(
    alg: &BraceAlgebra<O>,
    a: &Graded<O::Elem>,
    b: &Graded<O::Elem>,
) -> Result<Graded<O::Elem>, BraceError> {
    let anti = alg.add(
        &alg.gerstenhaber(a, b),
        &alg.scale_sign(
            (a.degree as i64 + 1) * (b.degree as i64 + 1),
            alg.gerstenhaber(b, a),
        ),
    );
    if !alg.is_zero(&anti) {
        return Ok(anti);
    }
    let lhs = alg.differential(&alg.gerstenhaber(a, b))?;
    let t1 = alg.gerstenhaber(&alg.differential(a)?, b);
    let t2 = alg.scale_sign(
        a.degree as i64 + 1,
        alg.gerstenhaber(a, &alg.differential(b)?),
    );
    let rhs = alg.add(&t1, &t2);
    Ok(alg.add(&lhs, &alg.scale_sign(1, rhs)))
}

/// Check that an operad morphism with `f(m_1) = m_2` induces a strict B∞
/// morphism: the degree-wise map intertwines δ, ∪, and all sampled braces.
pub fn check_strict_binf_morphism<S, T, F>(
    f: &F,
    src: &BraceAlgebra<S>,
    tgt: &BraceAlgebra<T>,
    trials: u64,
    seed: u64,
    degree_bound: usize,
) -> Report
where
    S: Operad,
    T: Operad,
    F: OperadMorphism<S, T>,
{
    let mut report = Report::new(format!(
        "strict B∞ morphism [{} → {}]",
        src.operad().name(),
        tgt.operad().name()
    ))
    .with_config(json!({"trials": trials, "seed": seed, "degree": degree_bound}));
    let lift = |x: &Graded<S::Elem>| Graded::new(x.degree, f.apply(&x.payload));

    // Precondition: f_2(m_1) = m_2.
    if let (Some(m1), Some(m2)) = (src.multiplication(), tgt.multiplication()) {
        report.record(tgt.eq(&lift(&m1), &m2), || Failure {
            check: "f(m1) = m2".into(),
            seed,
            inputs: src.fmt(&m1),
            lhs: tgt.fmt(&lift(&m1)),
            rhs: tgt.fmt(&m2),
        });
    }

    let bound = SizeBound::with_degree(degree_bound);
    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        let deg = |rng: &mut dyn RngCore| rng.gen_range(0..=degree_bound);
        let x = src.random(deg(&mut rng), &bound, &mut rng);
        let k = rng.gen_range(0..=2usize);
        let ys: Vec<_> = (0..k).map(|_| src.random(deg(&mut rng), &bound, &mut rng)).collect();

        let lhs = lift(&src.brace(&x, &ys));
        let fys: Vec<_> = ys.iter().map(&lift).collect();
        let rhs = tgt.brace(&lift(&x), &fys);
        report.record(tgt.eq(&lhs, &rhs), || Failure {
            check: "f intertwines braces".into(),
            seed: s,
            inputs: format!(
                "x = {}; ys = [{}]",
                src.fmt(&x),
                ys.iter().map(|y| src.fmt(y)).collect::<Vec<_>>().join(", ")
            ),
            lhs: tgt.fmt(&lhs),
            rhs: tgt.fmt(&rhs),
        });

        if src.multiplication().is_some() && tgt.multiplication().is_some() {
            let y = alg_random(src, deg(&mut rng), &bound, &mut rng);
            let lhs = lift(&src.cup(&x, &y).unwrap());
            let rhs = tgt.cup(&lift(&x), &lift(&y)).unwrap();
            report.record(tgt.eq(&lhs, &rhs), || Failure {
                check: "f intertwines ∪".into(),
                seed: s,
                inputs: format!("x = {}; y = {}", src.fmt(&x), src.fmt(&y)),
                lhs: tgt.fmt(&lhs),
                rhs: tgt.fmt(&rhs),
            });
            let lhs = lift(&src.differential(&x).unwrap());
            let rhs = tgt.differential(&lift(&x)).unwrap();
            report.record(tgt.eq(&lhs, &rhs), || Failure {
                check: "f intertwines δ".into(),
                seed: s,
                inputs: src.fmt(&x),
                lhs: tgt.fmt(&lhs),
                rhs: tgt.fmt(&rhs),
            });
        }
    }
    report
}

fn alg_random<O: Operad>(
    alg: &BraceAlgebra<O>,
    degree: usize,
    bound: &SizeBound,
    rng: &mut dyn RngCore,
) -> Graded<O::Elem> {
    alg.random(degree, bound, rng)
}
