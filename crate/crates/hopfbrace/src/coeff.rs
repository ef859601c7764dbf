//! Exact scalar arithmetic: arbitrary-precision rationals and truncated
//! Laurent/power series in the formal parameter ℏ.
//!
//! [`HSeries`] is the universal coefficient scalar of the whole crate. A
//! series carries an explicit truncation [`Window`] `(vmin, order)`: stored
//! exponents lie in `[vmin, order]` and the value is exact modulo
//! `ℏ^(order+1)`. A window with `vmin < 0` models `K((ℏ))`, one with
//! `vmin = 0` models `K[[ℏ]]`. Mixing two windows widens conservatively:
//! claimed precision shrinks to what both operands support, and a product
//! term falling below the representable floor is an error rather than a
//! silent truncation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Parse `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational, CoeffError> {
    let bad = || CoeffError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: num_bigint::BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Format as `"num/den"`, or `"num"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
    #[error("window too narrow: exponent {exp} below floor {vmin}")]
    WindowTooNarrow { exp: i64, vmin: i64 },
    #[error("cannot invert the zero series")]
    ZeroInverse,
}

/// Truncation window: exponents valid in `[vmin, order]`, `vmin ≤ 0 ≤ order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub vmin: i64,
    pub order: i64,
}

impl Window {
    pub fn new(vmin: i64, order: i64) -> Self {
        assert!(vmin <= 0 && 0 <= order, "window must satisfy vmin ≤ 0 ≤ order");
        Window { vmin, order }
    }

    /// Power-series window `[0, order]`.
    pub fn power(order: i64) -> Self {
        Window::new(0, order)
    }

    /// Laurent window `[-depth, order]`.
    pub fn laurent(depth: i64, order: i64) -> Self {
        Window::new(-depth, order)
    }
}

/// Sparse truncated Laurent series in ℏ over [`Rational`].
///
/// Invariants: no stored zero coefficients; stored exponents lie inside the
/// window. Equality compares coefficients up to the smaller of the two
/// orders, so a value is only ever compared where both sides are exact.
#[derive(Debug, Clone)]
pub struct HSeries {
    terms: BTreeMap<i64, Rational>,
    window: Window,
}

impl HSeries {
    pub fn zero(window: Window) -> Self {
        HSeries { terms: BTreeMap::new(), window }
    }

    pub fn one(window: Window) -> Self {
        Self::from_rational(Rational::one(), window)
    }

    /// The monomial `q·ℏ^exp`. Exponents above the order truncate to zero
    /// (the monomial vanishes modulo `ℏ^(order+1)`); exponents below the
    /// floor are a genuine representation error and panic.
    pub fn monomial(q: Rational, exp: i64, window: Window) -> Self {
        assert!(
            window.vmin <= exp,
            "monomial exponent {exp} below window floor {}",
            window.vmin
        );
        let mut terms = BTreeMap::new();
        if !q.is_zero() && exp <= window.order {
            terms.insert(exp, q);
        }
        HSeries { terms, window }
    }

    pub fn from_rational(q: Rational, window: Window) -> Self {
        Self::monomial(q, 0, window)
    }

    pub fn from_int(n: i64, window: Window) -> Self {
        Self::from_rational(Rational::from_integer(n.into()), window)
    }

    /// The generator ℏ itself.
    pub fn hbar(window: Window) -> Self {
        Self::monomial(Rational::one(), 1, window)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rational)> {
        self.terms.iter()
    }

    /// Lowest stored exponent, if any term survives the window.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term is 1 and nothing else is stored.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    /// Reinterpret in a new window, dropping terms above the new order.
    /// Errors if a stored term falls below the new floor.
    pub fn with_window(&self, window: Window) -> Result<Self, CoeffError> {
        if let Some(v) = self.valuation() {
            if v < window.vmin {
                return Err(CoeffError::WindowTooNarrow { exp: v, vmin: window.vmin });
            }
        }
        let terms = self
            .terms
            .iter()
            .filter(|(&e, _)| e <= window.order)
            .map(|(&e, q)| (e, q.clone()))
            .collect();
        Ok(HSeries { terms, window })
    }

    fn insert(&mut self, exp: i64, q: Rational) {
        if exp < self.window.vmin || exp > self.window.order || q.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let window = Window {
            vmin: self.window.vmin.min(other.window.vmin),
            order: self.window.order.min(other.window.order),
        };
        let mut out = HSeries::zero(window);
        for (&e, q) in &self.terms {
            out.insert(e, q.clone());
        }
        for (&e, q) in &other.terms {
            out.insert(e, q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(&e, q)| (e, -q.clone())).collect();
        HSeries { terms, window: self.window }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return HSeries::zero(self.window);
        }
        let terms = self.terms.iter().map(|(&e, c)| (e, c * q)).collect();
        HSeries { terms, window: self.window }
    }

    /// Effective valuation used when combining precision claims: a series
    /// with no stored terms is `O(ℏ^(order+1))`.
    fn eff_valuation(&self) -> i64 {
        self.valuation().unwrap_or(self.window.order + 1)
    }

    /// Cauchy product truncated to the combined window. The claimed order is
    /// `min(val_a + N_b, val_b + N_a)` (a Laurent factor genuinely lowers
    /// exactness), capped at `max(N_a, N_b)` so results never claim more
    /// precision than the ambient computation carries.
    pub fn try_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        let va = self.eff_valuation();
        let vb = other.eff_valuation();
        let order = (va + other.window.order)
            .min(vb + self.window.order)
            .min(self.window.order.max(other.window.order));
        let vmin = self.window.vmin.min(other.window.vmin);
        let window = Window { vmin, order: order.max(0).max(vmin) };
        let mut out = HSeries::zero(window);
        for (&ea, qa) in &self.terms {
            for (&eb, qb) in &other.terms {
                let e = ea + eb;
                if e < vmin {
                    return Err(CoeffError::WindowTooNarrow { exp: e, vmin });
                }
                if e <= window.order {
                    out.insert(e, qa * qb);
                }
            }
        }
        Ok(out)
    }

    /// Product; panics on window underflow (see [`HSeries::try_mul`]).
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("series product underflows the window")
    }

    /// Multiply by `ℏ^k` (shifting the window along with the terms).
    pub fn shift(&self, k: i64) -> Self {
        let window = Window {
            vmin: (self.window.vmin + k).min(0),
            order: (self.window.order + k).max(0),
        };
        let terms = self.terms.iter().map(|(&e, q)| (e + k, q.clone())).collect();
        HSeries { terms, window }
    }

    /// Multiplicative inverse, exact modulo `ℏ^(order - 2t + 1)` where `t` is
    /// the valuation. Errors on the zero series and when `ℏ^(-t)` would fall
    /// below the window floor.
    pub fn invert(&self) -> Result<Self, CoeffError> {
        let t = self.valuation().ok_or(CoeffError::ZeroInverse)?;
        if -t < self.window.vmin {
            return Err(CoeffError::WindowTooNarrow { exp: -t, vmin: self.window.vmin });
        }
        let n = self.window.order - t; // unit part coefficients known through ℏ^n
        let lead = self.coeff(t);
        // u = self / ℏ^t with u_0 = lead invertible; invert order by order.
        let mut inv_u: Vec<Rational> = Vec::with_capacity((n + 1).max(0) as usize);
        inv_u.push(lead.recip());
        for j in 1..=n.max(0) {
            let mut acc = Rational::zero();
            for i in 1..=j {
                let a_i = self.coeff(t + i);
                if a_i.is_zero() {
                    continue;
                }
                acc += a_i * &inv_u[(j - i) as usize];
            }
            inv_u.push(-acc / &lead);
        }
        let order = (self.window.order - 2 * t).max(-t).max(0);
        let window = Window { vmin: self.window.vmin, order };
        let mut out = HSeries::zero(window);
        for (j, q) in inv_u.iter().enumerate() {
            out.insert(-t + j as i64, q.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = HSeries::one(self.window);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Truncate strictly above `order` without changing the floor.
    pub fn truncate(&self, order: i64) -> Self {
        let window = Window { vmin: self.window.vmin, order: order.max(0) };
        let terms = self
            .terms
            .iter()
            .filter(|(&e, _)| e <= order)
            .map(|(&e, q)| (e, q.clone()))
            .collect();
        HSeries { terms, window }
    }
}

impl PartialEq for HSeries {
    /// Exact equality of coefficients up to the smaller claimed order.
    fn eq(&self, other: &Self) -> bool {
        let order = self.window.order.min(other.window.order);
        let mut keys: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().filter(|&e| e <= order).all(|e| self.coeff(e) == other.coeff(e))
    }
}

impl Eq for HSeries {}

impl fmt::Display for HSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, q) in &self.terms {
            let (sign, mag) = if q.is_negative() { ("-", -q.clone()) } else { ("+", q.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let coeff = format_rational(&mag);
            match e {
                0 => write!(f, "{coeff}")?,
                1 if mag.is_one() => write!(f, "h")?,
                1 => write!(f, "{coeff}*h")?,
                _ if mag.is_one() => write!(f, "h^{e}")?,
                _ => write!(f, "{coeff}*h^{e}")?,
            }
        }
        Ok(())
    }
}

// JSON encoding: {"terms": [[v, "num/den"], ...], "vmin": v, "order": N},
// terms sorted by exponent.
#[derive(Serialize, Deserialize)]
struct HSeriesJson {
    terms: Vec<(i64, String)>,
    vmin: i64,
    order: i64,
}

impl Serialize for HSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let json = HSeriesJson {
            terms: self.terms.iter().map(|(&e, q)| (e, format_rational(q))).collect(),
            vmin: self.window.vmin,
            order: self.window.order,
        };
        json.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let json = HSeriesJson::deserialize(de)?;
        let window = Window::new(json.vmin, json.order);
        let mut out = HSeries::zero(window);
        for (e, q) in json.terms {
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            if e < window.vmin || e > window.order {
                return Err(D::Error::custom(format!("exponent {e} outside window")));
            }
            out.insert(e, q);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(order: i64) -> Window {
        Window::power(order)
    }

    #[test]
    fn add_cancellation_and_identity() {
        let window = w(4);
        let one = HSeries::one(window);
        let h = HSeries::hbar(window);
        let a = one.add(&h); // 1 + h
        assert_eq!(a.add(&h.neg()), one);
        assert_eq!(HSeries::zero(window).add(&a), a);
        let hm = HSeries::monomial(Rational::one(), -1, Window::laurent(1, 3));
        let two = hm.add(&hm);
        assert_eq!(two.coeff(-1), rat(2, 1));
    }

    #[test]
    fn mul_examples() {
        let window = w(2);
        let one = HSeries::one(window);
        let h = HSeries::hbar(window);
        // (1 + h)(1 - h) mod h^3 = 1 - h^2
        let p = one.add(&h).mul(&one.sub(&h));
        assert_eq!(p, one.sub(&h.mul(&h)));
        // h^{-1} * h = 1
        let lw = Window::laurent(1, 3);
        let hm = HSeries::monomial(Rational::one(), -1, lw);
        let hp = HSeries::hbar(lw);
        assert!(hm.mul(&hp).is_one());
    }

    /// Independent oracle: expand exp(±ℏ) to order 4 by factorials and check
    /// that the truncated product is 1 mod ℏ^5.
    #[test]
    fn exp_product_oracle() {
        let window = w(4);
        let mut plus = HSeries::zero(window);
        let mut minus = HSeries::zero(window);
        let mut fact = Rational::one();
        for k in 0..=4i64 {
            if k > 0 {
                fact *= Rational::from_integer(k.into());
            }
            plus.insert(k, fact.recip());
            let sign = if k % 2 == 0 { 1 } else { -1 };
            minus.insert(k, fact.recip() * Rational::from_integer(sign.into()));
        }
        assert!(plus.mul(&minus).is_one());
    }

    #[test]
    fn invert_examples() {
        let window = w(2);
        let one = HSeries::one(window);
        let h = HSeries::hbar(window);
        // (1 - h)^{-1} = 1 + h + h^2 mod h^3
        let inv = one.sub(&h).invert().unwrap();
        let expect = one.add(&h).add(&h.mul(&h));
        assert_eq!(inv, expect);
        // 2^{-1} = 1/2
        let two = HSeries::from_int(2, window);
        assert_eq!(two.invert().unwrap().coeff(0), rat(1, 2));
        // h^{-1} needs a Laurent floor
        let lw = Window::laurent(1, 3);
        let h = HSeries::hbar(lw);
        let inv = h.invert().unwrap();
        assert_eq!(inv.coeff(-1), rat(1, 1));
        assert!(HSeries::hbar(w(3)).invert().is_err() || w(3).vmin < 0);
        assert!(HSeries::zero(window).invert().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let lw = Window::laurent(1, 3);
        let s = HSeries::monomial(rat(3, 2), -1, lw).add(&HSeries::hbar(lw));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"vmin\":-1"));
        let back: HSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    fn arb_series() -> impl Strategy<Value = HSeries> {
        proptest::collection::vec((0i64..=3, -6i64..=6, 1i64..=4), 0..4).prop_map(|terms| {
            let mut s = HSeries::zero(w(3));
            for (e, n, d) in terms {
                s.insert(e, rat(n, d));
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn invert_roundtrip(a in arb_series()) {
            if let Ok(inv) = a.invert() {
                let prod = a.mul(&inv);
                prop_assert!(prod.is_one(), "a * a^-1 = {} for a = {}", prod, a);
            }
        }
    }
}
