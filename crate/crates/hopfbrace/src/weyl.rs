//! Polynomial-coefficient differential operators on `d` variables: the Weyl
//! algebra in normal order (all `λ`s left of all `∂`s), with the rewriting
//! `∂_i λ_j = λ_j ∂_i + δ_ij` baked into the key product.

use num_traits::One;

use crate::coeff::{HSeries, Rational, Window};
use crate::linear::LinComb;

/// Basis key `λ^lam ∂^dd` of the Weyl algebra on `lam.len()` variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylKey {
    pub lam: Vec<u32>,
    pub dd: Vec<u32>,
}

impl WeylKey {
    pub fn one(d: usize) -> Self {
        WeylKey { lam: vec![0; d], dd: vec![0; d] }
    }

    pub fn lambda(d: usize, i: usize) -> Self {
        let mut k = Self::one(d);
        k.lam[i] = 1;
        k
    }

    pub fn del(d: usize, i: usize) -> Self {
        let mut k = Self::one(d);
        k.dd[i] = 1;
        k
    }

    pub fn is_one(&self) -> bool {
        self.lam.iter().all(|&e| e == 0) && self.dd.iter().all(|&e| e == 0)
    }
}

/// A differential operator: sparse sum of normal-ordered keys.
pub type WeylOp = LinComb<WeylKey>;

fn falling_product(n: u32, k: u32) -> Rational {
    // n (n-1) … (n-k+1)
    let mut out = Rational::one();
    for i in 0..k {
        out *= Rational::from_integer((n - i).into());
    }
    out
}

fn binom(n: u32, k: u32) -> Rational {
    let mut out = Rational::one();
    for i in 0..k {
        out *= Rational::from_integer((n - i).into());
        out /= Rational::from_integer((i + 1).into());
    }
    out
}

/// Normal-ordered product of two keys:
/// `(λ^a ∂^b)(λ^c ∂^e) = Σ_k binom(b,k)·c!/(c-k)!·λ^{a+c-k} ∂^{b+e-k}`.
pub fn weyl_mul_keys(x: &WeylKey, y: &WeylKey) -> Vec<(WeylKey, Rational)> {
    let d = x.lam.len();
    debug_assert_eq!(d, y.lam.len());
    let mut out: Vec<(WeylKey, Rational)> = vec![(WeylKey::one(d), Rational::one())];
    // Per-variable contraction count k_i ≤ min(b_i, c_i).
    let mut results = Vec::new();
    fn rec(
        i: usize,
        d: usize,
        x: &WeylKey,
        y: &WeylKey,
        acc_key: &mut WeylKey,
        acc_coeff: Rational,
        results: &mut Vec<(WeylKey, Rational)>,
    ) {
        if i == d {
            results.push((acc_key.clone(), acc_coeff));
            return;
        }
        let b = x.dd[i];
        let c = y.lam[i];
        for k in 0..=b.min(c) {
            let coeff = binom(b, k) * falling_product(c, k);
            acc_key.lam[i] = x.lam[i] + c - k;
            acc_key.dd[i] = b - k + y.dd[i];
            rec(i + 1, d, x, y, acc_key, acc_coeff.clone() * coeff, results);
        }
        acc_key.lam[i] = 0;
        acc_key.dd[i] = 0;
    }
    let mut acc = WeylKey::one(d);
    rec(0, d, x, y, &mut acc, Rational::one(), &mut results);
    out.clear();
    out.extend(results);
    out
}

/// Product of operators via the key product.
pub fn weyl_mul(a: &WeylOp, b: &WeylOp) -> WeylOp {
    a.bilinear(b, |x, y| {
        let mut out = LinComb::zero();
        for (k, c) in weyl_mul_keys(x, y) {
            let window = window_of(a, b);
            out.add_term(k, HSeries::from_rational(c, window));
        }
        out
    })
}

fn window_of(a: &WeylOp, b: &WeylOp) -> Window {
    a.iter()
        .next()
        .map(|(_, c)| c.window())
        .or_else(|| b.iter().next().map(|(_, c)| c.window()))
        .unwrap_or(Window::power(0))
}

/// Commutator `[a, b]`.
pub fn weyl_commutator(a: &WeylOp, b: &WeylOp) -> WeylOp {
    weyl_mul(a, b).sub(&weyl_mul(b, a))
}

/// A polynomial in the `λ` variables: sparse exponent vectors over series.
pub type Poly = LinComb<Vec<u32>>;

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    a.bilinear(b, |x, y| {
        let sum: Vec<u32> = x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
        LinComb::term(sum, HSeries::one(window_of_poly(a, b)))
    })
}

fn window_of_poly(a: &Poly, b: &Poly) -> Window {
    a.iter()
        .next()
        .map(|(_, c)| c.window())
        .or_else(|| b.iter().next().map(|(_, c)| c.window()))
        .unwrap_or(Window::power(0))
}

/// `∂^e f` for a polynomial `f`.
pub fn poly_derivative(f: &Poly, e: &[u32]) -> Poly {
    let mut out = LinComb::zero();
    for (mono, c) in f.iter() {
        let mut coeff = Rational::one();
        let mut ok = true;
        let mut m2 = mono.clone();
        for (i, &k) in e.iter().enumerate() {
            if mono[i] < k {
                ok = false;
                break;
            }
            coeff *= falling_product(mono[i], k);
            m2[i] = mono[i] - k;
        }
        if ok {
            out.add_term(m2, c.scale(&coeff));
        }
    }
    out
}

/// Apply a differential operator to a polynomial.
pub fn weyl_apply(op: &WeylOp, f: &Poly) -> Poly {
    let mut out = LinComb::zero();
    for (key, c) in op.iter() {
        let df = poly_derivative(f, &key.dd);
        for (mono, cf) in df.iter() {
            let shifted: Vec<u32> = mono.iter().zip(key.lam.iter()).map(|(a, b)| a + b).collect();
            out.add_term(shifted, cf.mul(c));
        }
    }
    out
}

/// Embed a polynomial as the multiplication operator `f·`.
pub fn poly_as_op(f: &Poly) -> WeylOp {
    f.map_keys(|mono| WeylKey { lam: mono.clone(), dd: vec![0; mono.len()] })
}

/// The constant-term projection `D ↦ D(1)`: keeps the `∂`-free part as a
/// polynomial.
pub fn weyl_counit(op: &WeylOp) -> Poly {
    let mut out = LinComb::zero();
    for (key, c) in op.iter() {
        if key.dd.iter().all(|&e| e == 0) {
            out.add_term(key.lam.clone(), c.clone());
        }
    }
    out
}

pub fn fmt_weyl_key(k: &WeylKey) -> String {
    let lam = crate::hopf::polybi::fmt_mono(&k.lam, "λ");
    let dd = crate::hopf::polybi::fmt_mono(&k.dd, "∂");
    match (lam.as_str(), dd.as_str()) {
        ("1", "1") => "1".into(),
        (_, "1") => lam,
        ("1", _) => dd,
        _ => format!("{lam}·{dd}"),
    }
}

pub fn fmt_poly(f: &Poly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    f.iter()
        .map(|(m, c)| format!("({})·{}", c, crate::hopf::polybi::fmt_mono(m, "λ")))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The linear vector field `X_i = Σ_{j,k} c_{ij}^k λ_k ∂_j` generating the
/// coadjoint action of the `i`-th basis vector; `ad*_{l_i}(D) = [X_i, D]`.
pub fn coadjoint_field(structure: &dyn Fn(usize, usize) -> Vec<(usize, Rational)>, d: usize, i: usize, window: Window) -> WeylOp {
    let mut out = LinComb::zero();
    for j in 0..d {
        for (k, c) in structure(i, j) {
            let mut key = WeylKey::one(d);
            key.lam[k] = 1;
            key.dd[j] = 1;
            out.add_term(key, HSeries::from_rational(c, window));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn hw() -> Window {
        Window::power(3)
    }

    #[test]
    fn heisenberg_relation() {
        let d = 1;
        let del = LinComb::term(WeylKey::del(d, 0), HSeries::one(hw()));
        let lam = LinComb::term(WeylKey::lambda(d, 0), HSeries::one(hw()));
        let comm = weyl_commutator(&del, &lam);
        let one = LinComb::term(WeylKey::one(d), HSeries::one(hw()));
        assert_eq!(comm, one, "[∂, λ] = 1");
    }

    #[test]
    fn confluent_rewriting() {
        // (∂²)(λ²) = λ²∂² + 4λ∂ + 2.
        let d = 1;
        let d2 = LinComb::term(WeylKey { lam: vec![0], dd: vec![2] }, HSeries::one(hw()));
        let l2 = LinComb::term(WeylKey { lam: vec![2], dd: vec![0] }, HSeries::one(hw()));
        let p = weyl_mul(&d2, &l2);
        assert_eq!(p.coeff(&WeylKey { lam: vec![2], dd: vec![2] }).unwrap().coeff(0), rat(1, 1));
        assert_eq!(p.coeff(&WeylKey { lam: vec![1], dd: vec![1] }).unwrap().coeff(0), rat(4, 1));
        assert_eq!(p.coeff(&WeylKey { lam: vec![0], dd: vec![0] }).unwrap().coeff(0), rat(2, 1));
        // Associativity spot check: (∂²·λ²)·∂ = ∂²·(λ²·∂).
        let del = LinComb::term(WeylKey::del(d, 0), HSeries::one(hw()));
        assert_eq!(weyl_mul(&p, &del), weyl_mul(&d2, &weyl_mul(&l2, &del)));
    }

    #[test]
    fn apply_operator() {
        // (λ∂)(λ²) = 2λ².
        let f: Poly = LinComb::term(vec![2u32], HSeries::one(hw()));
        let op = LinComb::term(WeylKey { lam: vec![1], dd: vec![1] }, HSeries::one(hw()));
        let got = weyl_apply(&op, &f);
        assert_eq!(got.coeff(&vec![2u32]).unwrap().coeff(0), rat(2, 1));
    }
}
