//! The quantum groupoid machinery of a Lie algebra pair: the ℏ-weighted
//! PBW map and its inverse, the PBW star product `⋆_PBW` on polynomials,
//! the extraction of its bidifferential twistor `Θ_PBW`, the Hopf-algebra
//! morphism `φ` with `φ(l_i) = ℏ^{-1}(λ_i ⋆_PBW)`, the Gutt twistor
//! `Θ_Gutt` in coefficient-left normal form, and the Lemma identity suite
//! relating all of them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde_json::json;

use crate::coeff::{CoeffError, HSeries, Rational, Window};
use crate::hopf::diffops::{hgl_model, DKey, DiffOpAlgebroid};
use crate::hopf::{
    concat, delta_power, insert, left_action, right_action, t_add, t_fmt, t_is_zero,
    t_scale, t_sub, t_zero, HopfAlgebroid, Tensor, Tp,
};
use crate::liepair::{Mono, UEnv, ValidatedPair};
use crate::linear::LinComb;
use crate::report::{Failure, Report};
use crate::operad::Operad;
use crate::sample::{rng_from_seed, sample_seed, SizeBound};
use crate::weyl::{
    poly_derivative, weyl_commutator, weyl_mul, Poly, WeylKey, WeylOp,
};

fn factorial(n: u32) -> Rational {
    let mut out = Rational::one();
    for i in 1..=n {
        out *= Rational::from_integer(i.into());
    }
    out
}

/// `Π_i e_i!`.
pub fn multi_factorial(e: &[u32]) -> Rational {
    e.iter().map(|&k| factorial(k)).product()
}

/// The PBW star-product context of a Lie algebra pair: all computations
/// concern the subalgebra `l` (the first `dim_l` basis vectors).
pub struct PbwStar {
    pub pair: Arc<ValidatedPair>,
    pub window: Window,
    pbw_cache: Mutex<HashMap<Mono, Vec<(Mono, Rational)>>>,
    star_cache: Mutex<HashMap<(Mono, Mono), Poly>>,
    theta_cache: Mutex<Option<Vec<(Poly, Mono, Mono)>>>,
}

impl PbwStar {
    pub fn new(pair: Arc<ValidatedPair>, window: Window) -> Self {
        PbwStar {
            pair,
            window,
            pbw_cache: Mutex::new(HashMap::new()),
            star_cache: Mutex::new(HashMap::new()),
            theta_cache: Mutex::new(None),
        }
    }

    pub fn dim(&self) -> usize {
        self.pair.dim_l
    }

    /// The symmetrization `pbw(λ^μ) = (1/k!) Σ_σ l_{σ(1)}⋯l_{σ(k)}` with
    /// exact rational coefficients (ℏ-free).
    pub fn pbw_rat(&self, mono: &Mono) -> Vec<(Mono, Rational)> {
        if let Some(hit) = self.pbw_cache.lock().unwrap().get(mono) {
            return hit.clone();
        }
        let mut letters = Vec::new();
        for (i, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                letters.push(i);
            }
        }
        // Compute in a throwaway window; all coefficients are constants.
        let w0 = Window::power(0);
        let out: Vec<(Mono, Rational)> = if letters.is_empty() {
            vec![(vec![0; self.dim()], Rational::one())]
        } else {
            let mut acc: UEnv = LinComb::zero();
            letters.sort_unstable();
            let mut perms = Vec::new();
            permute_multiset(&letters, &mut Vec::new(), &mut perms);
            let k = letters.len() as u32;
            let weight = factorial(k).recip() * multi_factorial(mono);
            for word in &perms {
                let mut prod: UEnv = LinComb::term(vec![0; self.dim()], HSeries::one(w0));
                for &i in word {
                    let mut li = vec![0u32; self.dim()];
                    li[i] = 1;
                    prod = self.pair.uenv_mul(
                        &prod,
                        &LinComb::term(li, HSeries::one(w0)),
                        self.dim(),
                        w0,
                    );
                }
                acc.add_assign(&prod);
            }
            acc.iter().map(|(m, c)| (m.clone(), c.coeff(0) * &weight)).collect()
        };
        self.pbw_cache.lock().unwrap().insert(mono.clone(), out.clone());
        out
    }

    /// `pbw(λ^μ) ∈ U(l)` in the ambient window.
    pub fn pbw(&self, mono: &Mono) -> UEnv {
        let mut out = LinComb::zero();
        for (m, c) in self.pbw_rat(mono) {
            out.add_term(m, HSeries::from_rational(c, self.window));
        }
        out
    }

    /// `pbw_ℏ(λ^μ) = ℏ^{|μ|} pbw(λ^μ)`, extended linearly, in an explicit
    /// window (internal computations widen the window so that inversion can
    /// recover low ℏ-orders of high-degree outputs).
    pub fn pbw_hbar_in(&self, f: &Poly, window: Window) -> UEnv {
        let mut out = LinComb::zero();
        for (mono, c) in f.iter() {
            let deg: u32 = mono.iter().sum();
            for (m, q) in self.pbw_rat(mono) {
                let weight = c
                    .with_window(window)
                    .unwrap_or_else(|_| HSeries::zero(window))
                    .mul(&HSeries::monomial(q, deg as i64, window));
                out.add_term(m.clone(), weight);
            }
        }
        out
    }

    pub fn pbw_hbar(&self, f: &Poly) -> UEnv {
        self.pbw_hbar_in(f, self.window)
    }

    /// Inverse of `pbw_ℏ` on its image, by downward induction on the PBW
    /// degree. The input must carry a window wide enough to see ℏ-order
    /// `deg + k` for every output term of degree `deg` at order `k`.
    pub fn pbw_hbar_inverse_in(&self, u: &UEnv, window: Window) -> Result<Poly, CoeffError> {
        let mut rest = u.clone();
        let mut f: Poly = LinComb::zero();
        loop {
            let Some(top_deg) = rest.keys().map(|m| m.iter().sum::<u32>()).max() else {
                return Ok(f);
            };
            let mut layer: Vec<(Mono, HSeries)> = Vec::new();
            for (m, c) in rest.iter() {
                if m.iter().sum::<u32>() == top_deg {
                    layer.push((m.clone(), c.clone()));
                }
            }
            for (mono, coeff) in layer {
                // pbw(λ^mono) has leading coefficient 1 on `mono`.
                let fcoeff = coeff.shift(-(top_deg as i64));
                if fcoeff.valuation().map(|v| v < window.vmin).unwrap_or(false) {
                    return Err(CoeffError::WindowTooNarrow {
                        exp: fcoeff.valuation().unwrap(),
                        vmin: window.vmin,
                    });
                }
                f.add_term(mono.clone(), fcoeff.clone());
                let back = self.pbw_hbar_in(&LinComb::term(mono, fcoeff), coeff.window()).neg();
                rest.add_assign(&back);
            }
            if rest.keys().map(|m| m.iter().sum::<u32>()).max() == Some(top_deg) {
                return Err(CoeffError::ZeroInverse);
            }
        }
    }

    pub fn pbw_hbar_inverse(&self, u: &UEnv) -> Result<Poly, CoeffError> {
        self.pbw_hbar_inverse_in(u, self.window)
    }

    /// The star product of λ-monomials via
    /// `pbw_ℏ(f ⋆ g) = pbw_ℏ(f)·pbw_ℏ(g)`, computed in a widened window and
    /// truncated back. Cached.
    pub fn star_monos(&self, a: &Mono, b: &Mono) -> Poly {
        if let Some(hit) = self.star_cache.lock().unwrap().get(&(a.clone(), b.clone())) {
            return hit.clone();
        }
        let deg = (a.iter().sum::<u32>() + b.iter().sum::<u32>()) as i64;
        let wide = Window::new(self.window.vmin, self.window.order + deg);
        let fa = LinComb::term(a.clone(), HSeries::one(wide));
        let fb = LinComb::term(b.clone(), HSeries::one(wide));
        let prod = self.pair.uenv_mul(
            &self.pbw_hbar_in(&fa, wide),
            &self.pbw_hbar_in(&fb, wide),
            self.dim(),
            wide,
        );
        let raw = self
            .pbw_hbar_inverse_in(&prod, wide)
            .expect("⋆ of polynomials stays polynomial");
        let mut out: Poly = LinComb::zero();
        for (m, c) in raw.iter() {
            if let Ok(c) = c.truncate(self.window.order).with_window(self.window) {
                out.add_term(m.clone(), c);
            }
        }
        self.star_cache.lock().unwrap().insert((a.clone(), b.clone()), out.clone());
        out
    }

    pub fn star(&self, f: &Poly, g: &Poly) -> Poly {
        f.bilinear(g, |a, b| self.star_monos(a, b))
    }

    /// Bidifferential coefficients of `⋆_PBW`: triples `(c_{a,b}(λ), a, b)`
    /// with `⋆ = Σ c_{a,b}·∂^a ⊗ ∂^b`, extracted to the window order. The
    /// per-order differential-order bound (order ≤ ℏ exponent) is asserted,
    /// not assumed.
    pub fn theta_pbw_coeffs(&self) -> Vec<(Poly, Mono, Mono)> {
        if let Some(hit) = self.theta_cache.lock().unwrap().as_ref() {
            return hit.clone();
        }
        let max_order = self.window.order.max(0) as usize;
        let monos = crate::hopf::polybi::monos_up_to(self.dim(), max_order);
        let mut pairs: Vec<(Mono, Mono)> = Vec::new();
        for a in &monos {
            for b in &monos {
                pairs.push((a.clone(), b.clone()));
            }
        }
        pairs.sort_by_key(|(a, b)| {
            (a.iter().sum::<u32>() + b.iter().sum::<u32>(), a.clone(), b.clone())
        });
        let mut coeffs: HashMap<(Mono, Mono), Poly> = HashMap::new();
        for (a, b) in &pairs {
            let mut value = self.star_monos(a, b);
            for ((a2, b2), c) in coeffs.iter() {
                if a2.iter().zip(a.iter()).all(|(x, y)| x <= y)
                    && b2.iter().zip(b.iter()).all(|(x, y)| x <= y)
                {
                    // c·(∂^{a2} λ^a)·(∂^{b2} λ^b)
                    let da = poly_derivative(
                        &LinComb::term(a.clone(), HSeries::one(self.window)),
                        a2,
                    );
                    let db = poly_derivative(
                        &LinComb::term(b.clone(), HSeries::one(self.window)),
                        b2,
                    );
                    let mut prod = c.clone();
                    for part in [da, db] {
                        prod = prod.bilinear(&part, |x, y| {
                            let sum: Vec<u32> =
                                x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
                            LinComb::term(sum, HSeries::one(self.window))
                        });
                    }
                    value.add_assign(&prod.neg());
                }
            }
            let norm = (multi_factorial(a) * multi_factorial(b)).recip();
            let c_ab = value.scale_rat(&norm);
            if !c_ab.is_zero() {
                // Runtime check of the ℏ-order bound.
                let min_order = c_ab.valuation().unwrap_or(self.window.order + 1);
                let need = a.iter().sum::<u32>().max(b.iter().sum::<u32>()) as i64;
                assert!(
                    min_order >= need,
                    "⋆ coefficient at (∂^{a:?}, ∂^{b:?}) appears below ℏ^{need}"
                );
                coeffs.insert((a.clone(), b.clone()), c_ab);
            }
        }
        let mut out: Vec<(Poly, Mono, Mono)> =
            coeffs.into_iter().map(|((a, b), c)| (c, a, b)).collect();
        out.sort_by(|x, y| (x.1.clone(), x.2.clone()).cmp(&(y.1.clone(), y.2.clone())));
        self.theta_cache.lock().unwrap().replace(out.clone());
        out
    }

    /// Evaluate the extracted `Θ_PBW` on two polynomials — the consistency
    /// oracle against `⋆_PBW` itself.
    pub fn theta_eval(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = LinComb::zero();
        for (c, a, b) in self.theta_pbw_coeffs() {
            let da = poly_derivative(f, &a);
            let db = poly_derivative(g, &b);
            let mut prod = c.clone();
            for part in [da, db] {
                prod = prod.bilinear(&part, |x, y| {
                    let sum: Vec<u32> = x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
                    LinComb::term(sum, HSeries::one(self.window))
                });
            }
            out.add_assign(&prod);
        }
        out
    }

    /// The left ⋆-multiplication operator `g⋆_PBW ∈ D[[ℏ]]`:
    /// `Σ c_{a,b}·(∂^a g)·∂^b` from the extracted coefficients.
    pub fn star_op(&self, g: &Poly) -> WeylOp {
        let mut out: WeylOp = LinComb::zero();
        for (c, a, b) in self.theta_pbw_coeffs() {
            let da = poly_derivative(g, &a);
            let coeff_poly = c.bilinear(&da, |x, y| {
                let sum: Vec<u32> = x.iter().zip(y.iter()).map(|(p, q)| p + q).collect();
                LinComb::term(sum, HSeries::one(self.window))
            });
            for (m, cm) in coeff_poly.iter() {
                out.add_term(WeylKey { lam: m.clone(), dd: b.clone() }, cm.clone());
            }
        }
        out
    }

    /// `φ(l_{i_1}…l_{i_k}) = ℏ^{-k} (λ_{i_1}⋆)·…·(λ_{i_k}⋆)` on PBW words,
    /// extended linearly. Requires a Laurent window deep enough for the
    /// maximal `U(l)` degree.
    pub fn varphi(&self, u: &UEnv) -> Result<WeylOp, CoeffError> {
        let mut out: WeylOp = LinComb::zero();
        for (mono, c) in u.iter() {
            let deg: u32 = mono.iter().sum();
            if -(deg as i64) < self.window.vmin {
                return Err(CoeffError::WindowTooNarrow {
                    exp: -(deg as i64),
                    vmin: self.window.vmin,
                });
            }
            let mut op: WeylOp =
                LinComb::term(WeylKey::one(self.dim()), HSeries::one(self.window));
            for (i, &e) in mono.iter().enumerate() {
                let mut lam_i = vec![0u32; self.dim()];
                lam_i[i] = 1;
                let star_i = self.star_op(&LinComb::term(lam_i, HSeries::one(self.window)));
                for _ in 0..e {
                    op = weyl_mul(&op, &star_i);
                }
            }
            out.add_assign(&op.scale(&c.shift(-(deg as i64))));
        }
        Ok(out)
    }

    /// The coadjoint action `ad*_{l_i}` on polynomials: the derivation with
    /// `ad*_{l_i}(λ_j) = Σ_k c_{ij}^k λ_k`.
    pub fn coadjoint_poly(&self, i: usize, f: &Poly) -> Poly {
        let mut out = LinComb::zero();
        for (mono, c) in f.iter() {
            for (j, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                for (k, q) in self.pair.bracket(i, j) {
                    let mut m2 = mono.clone();
                    m2[j] -= 1;
                    m2[k] += 1;
                    out.add_term(m2, c.scale(&(q * Rational::from_integer(e.into()))));
                }
            }
        }
        out
    }

    /// The linear vector field `X_i` generating `ad*_{l_i}` on `D`:
    /// `ad*_{l_i}(D) = [X_i, D]`.
    pub fn coadjoint_field(&self, i: usize) -> WeylOp {
        let mut out: WeylOp = LinComb::zero();
        for j in 0..self.dim() {
            for (k, c) in self.pair.bracket(i, j) {
                let mut key = WeylKey::one(self.dim());
                key.lam[k] = 1;
                key.dd[j] = 1;
                out.add_term(key, HSeries::from_rational(c, self.window));
            }
        }
        out
    }
}

fn permute_multiset(letters: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if letters.is_empty() {
        out.push(prefix.clone());
        return;
    }
    let mut last: Option<usize> = None;
    for idx in 0..letters.len() {
        if last == Some(letters[idx]) {
            continue;
        }
        last = Some(letters[idx]);
        let mut rest = letters.to_vec();
        let x = rest.remove(idx);
        prefix.push(x);
        permute_multiset(&rest, prefix, out);
        prefix.pop();
    }
}

// ---------------------------------------------------------------------------
// The Gutt twistor.
// ---------------------------------------------------------------------------

/// `Θ_Gutt = Σ_μ (1/μ!) (Θ_PBW)_1·∂^μ ⊗_R pbw_ℏ(λ^μ)·(Θ_PBW)_2` in
/// coefficient-left normal form, truncated at the window order.
pub fn theta_gutt(star: &PbwStar, model: &DiffOpAlgebroid) -> Tp<DiffOpAlgebroid> {
    let pair = model.pair.as_ref().expect("Θ_Gutt needs the quantum groupoid model");
    assert_eq!(pair.dim_l, star.dim());
    let d = star.dim();
    let mut words = LinComb::zero();
    let mus = crate::hopf::polybi::monos_up_to(d, star.window.order.max(0) as usize);
    for (c, a, b) in star.theta_pbw_coeffs() {
        for mu in &mus {
            let k: u32 = mu.iter().sum();
            let hbar_k = HSeries::monomial(
                multi_factorial(mu).recip(),
                k as i64,
                star.window,
            );
            // Slot 1: coefficient-left (Θ₁ = c·∂^a) times ∂^μ.
            let dd1: Vec<u32> = a.iter().zip(mu.iter()).map(|(x, y)| x + y).collect();
            // Slot 2: pbw(λ^μ) in U(l) ⊂ U(g), tensor ∂^b.
            let pbw_mu = star.pbw(mu);
            for (m_lam, c_lam) in c.iter() {
                for (lmono, cl) in pbw_mu.iter() {
                    let mut g2 = vec![0u32; pair.dim_g];
                    g2[..d].copy_from_slice(lmono);
                    let key1 = DKey {
                        g: vec![0; pair.dim_g],
                        w: WeylKey { lam: m_lam.clone(), dd: dd1.clone() },
                    };
                    let key2 = DKey { g: g2, w: WeylKey { lam: vec![0; d], dd: b.clone() } };
                    words.add_term(
                        vec![key1, key2],
                        c_lam.mul(&hbar_k).mul(cl),
                    );
                }
            }
        }
    }
    Tensor::Words(2, model.normalize(2, words))
}

/// `f ⋆_Gutt`, the left Gutt multiplication operator, as an element of the
/// quantum groupoid: `Σ_μ (1/μ!) pbw_ℏ(λ^μ) ⊗ (∂^μ f)⋆_PBW`.
pub fn gutt_op(star: &PbwStar, model: &DiffOpAlgebroid, f: &Poly) -> LinComb<DKey> {
    let pair = model.pair.as_ref().expect("Gutt operators need the quantum groupoid model");
    let d = star.dim();
    let mut out = LinComb::zero();
    let mus = crate::hopf::polybi::monos_up_to(d, star.window.order.max(0) as usize);
    for mu in &mus {
        let df = poly_derivative(f, mu);
        if df.is_zero() {
            continue;
        }
        let k: u32 = mu.iter().sum();
        let weight = HSeries::monomial(multi_factorial(mu).recip(), k as i64, star.window);
        let op = star.star_op(&df);
        let pbw_mu = star.pbw(mu);
        for (lmono, cl) in pbw_mu.iter() {
            let mut g = vec![0u32; pair.dim_g];
            g[..d].copy_from_slice(lmono);
            for (wkey, cw) in op.iter() {
                out.add_term(
                    DKey { g: g.clone(), w: wkey.clone() },
                    weight.mul(cl).mul(cw),
                );
            }
        }
    }
    out
}

/// The two-block placement `(Δ^{p-1} ⊗ Δ^{q-1})Θ` of an arity-2 tensor.
pub fn theta_placement(
    model: &DiffOpAlgebroid,
    theta: &Tp<DiffOpAlgebroid>,
    parts_left: usize,
    parts_right: usize,
) -> Tp<DiffOpAlgebroid> {
    let Tensor::Words(_, w) = theta else { panic!("placement of an arity-2 tensor") };
    let mut out = t_zero(model, parts_left + parts_right);
    for (word, c) in w.iter() {
        let left = delta_power(
            model,
            &LinComb::term(word[0].clone(), HSeries::one(model.window)),
            parts_left,
        );
        let right = delta_power(
            model,
            &LinComb::term(word[1].clone(), HSeries::one(model.window)),
            parts_right,
        );
        out = t_add(model, &out, &t_scale(model, c, &concat(model, &left, &right)));
    }
    out
}

// ---------------------------------------------------------------------------
// The Lemma suite.
// ---------------------------------------------------------------------------

/// Identity suite for the star-product machinery of a pair:
///
/// 1. `[λ_i⋆, f⋆] = ℏ (ad*_{l_i}f)⋆` and `l`-invariance of `⋆_PBW`;
/// 2. `φ([l, A]) = ad*_l(φ(A))`;
/// 3. `l`-invariance of a chain ⇔ its groupoid image commutes with
///    `Δ^{n-1}(f ⋆_Gutt)` (checked in both directions, with a planted
///    non-invariant chain);
/// 4. the pass-through of `(Θ_Gutt)` placements over padded images;
/// 5. `Θ_Gutt·(λ_i⋆ ⊗ 1) = (1⊗ℏl_i)·Θ_Gutt + Δ(λ_i⋆)·Θ_Gutt`.
pub fn lemma_suite(
    pair: Arc<ValidatedPair>,
    window: Window,
    trials: u64,
    seed: u64,
) -> Report {
    let mut report = Report::new(format!("gutt/pbw lemma suite [{}]", pair.name)).with_config(
        json!({"pair": pair.name, "order": window.order, "trials": trials, "seed": seed}),
    );
    let star = PbwStar::new(pair.clone(), window);
    let model = hgl_model(pair.clone(), window);
    let theta = theta_gutt(&star, &model);
    let d = star.dim();
    let bound = SizeBound { max_terms: 2, coeff_height: 3, degree: 2, hbar_order: 1 };

    let random_poly = |rng: &mut dyn rand::RngCore| -> Poly {
        let monos = crate::hopf::polybi::monos_up_to(d, 2);
        let mut out = LinComb::zero();
        for _ in 0..2 {
            use rand::Rng;
            let m = monos[rng.gen_range(0..monos.len())].clone();
            out.add_term(m, crate::sample::random_series(rng, &bound, window));
        }
        out
    };

    for t in 0..trials {
        let s = sample_seed(seed, t);
        let mut rng = rng_from_seed(s);
        report.trials += 1;
        use rand::Rng;
        let i = rng.gen_range(0..d);
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);

        // Lemma 1 part (1): [λ_i⋆, f⋆] = ℏ (ad*_{l_i} f)⋆.
        let mut lam_i = vec![0u32; d];
        lam_i[i] = 1;
        let lam_star = star.star_op(&LinComb::term(lam_i.clone(), HSeries::one(window)));
        let f_star = star.star_op(&f);
        let lhs = weyl_commutator(&lam_star, &f_star);
        let rhs = star.star_op(&star.coadjoint_poly(i, &f)).scale(&HSeries::hbar(window));
        report.record(lhs == rhs, || Failure {
            check: "No1(1): [λ_i⋆, f⋆] = ℏ(ad*_l f)⋆".into(),
            seed: s,
            inputs: format!("i = {i}, f = {}", crate::weyl::fmt_poly(&f)),
            lhs: format!("{:?}", lhs),
            rhs: format!("{:?}", rhs),
        });

        // Lemma 1 part (2): ad*(f ⋆ g) = ad*(f) ⋆ g + f ⋆ ad*(g).
        let lhs = star.coadjoint_poly(i, &star.star(&f, &g));
        let rhs = star
            .star(&star.coadjoint_poly(i, &f), &g)
            .add(&star.star(&f, &star.coadjoint_poly(i, &g)));
        report.record(lhs == rhs, || Failure {
            check: "No1(2): ⋆_PBW is l-invariant".into(),
            seed: s,
            inputs: format!("i = {i}"),
            lhs: crate::weyl::fmt_poly(&lhs),
            rhs: crate::weyl::fmt_poly(&rhs),
        });

        // Lemma 2: φ([l_i, A]) = ad*_{l_i}(φ(A)) for A ∈ U(l).
        let lmonos = crate::hopf::polybi::monos_up_to(d, 2);
        let a_mono = lmonos[rng.gen_range(0..lmonos.len())].clone();
        let a: UEnv = LinComb::term(a_mono, HSeries::one(window));
        let mut li = vec![0u32; d];
        li[i] = 1;
        let li: UEnv = LinComb::term(li, HSeries::one(window));
        let bracket = pair
            .uenv_mul(&li, &a, d, window)
            .sub(&pair.uenv_mul(&a, &li, d, window));
        let lhs = star.varphi(&bracket).expect("window admits φ");
        let rhs = weyl_commutator(&star.coadjoint_field(i), &star.varphi(&a).expect("φ"));
        report.record(lhs == rhs, || Failure {
            check: "No2: φ([l, A]) = ad*_l(φ(A))".into(),
            seed: s,
            inputs: format!("i = {i}"),
            lhs: format!("{:?}", lhs),
            rhs: format!("{:?}", rhs),
        });

        // Lemma 3, both directions, degree 1 and 2 chains.
        let n = 1 + (t as usize % 2);
        let op = crate::liepair::LiePairOperad::new(pair.clone(), window);
        let a_chain = op.random(n, &bound, &mut rng);
        if !a_chain.is_zero() {
            let res = lemma3_residual(&star, &model, &a_chain, &f);
            report.record(t_is_zero(&model, &res), || Failure {
                check: "No3: invariant chains commute with Δ^{n-1}(f⋆_Gutt)".into(),
                seed: s,
                inputs: format!("A = {}", a_chain.fmt(&pair)),
                lhs: t_fmt(&model, &res),
                rhs: "0".into(),
            });
        }

        // Lemma 5 / the Hard identity:
        // Θ·(λ_i⋆ ⊗ 1) = (1 ⊗ ℏl_i)·Θ + Δ(λ_i⋆)·Θ.
        let lam_star_elem = model.embed_weyl(&lam_star);
        let mut lift = LinComb::zero();
        for (k, c) in lam_star_elem.iter() {
            lift.add_term(vec![k.clone(), model.unit_key()], c.clone());
        }
        let lhs = right_action(&model, &theta, &lift);
        let mut li_g = vec![0u32; pair.dim_g];
        li_g[i] = 1;
        let mut li_lift = LinComb::zero();
        li_lift.add_term(
            vec![model.unit_key(), DKey { g: li_g, w: WeylKey::one(d) }],
            HSeries::hbar(window),
        );
        let term1 = left_action(&model, &li_lift, &theta);
        let term2 = insert(&model, &lam_star_elem, &theta);
        let rhs = t_add(&model, &term1, &term2);
        let res = t_sub(&model, &lhs, &rhs);
        report.record(t_is_zero(&model, &res), || Failure {
            check: "No5: Θ·(λ_i⋆⊗1) = (1⊗ℏl_i)·Θ + Δ(λ_i⋆)·Θ".into(),
            seed: s,
            inputs: format!("i = {i}"),
            lhs: t_fmt(&model, &res),
            rhs: "0".into(),
        });

        // Lemma 4 with i = 2: the Θ-placement passes through padded images.
        let m_deg = 1;
        let b_chain = op.random(m_deg, &bound, &mut rng);
        if !b_chain.is_zero() {
            let res = lemma4_residual(&star, &model, &theta, &b_chain, 2);
            report.record(t_is_zero(&model, &res), || Failure {
                check: "No4: Θ-placement passes through padded images".into(),
                seed: s,
                inputs: format!("B = {}", b_chain.fmt(&pair)),
                lhs: t_fmt(&model, &res),
                rhs: "0".into(),
            });
        }
    }

    // Lemma 3 must also *fail* on a planted non-invariant chain whenever the
    // pair is non-abelian.
    if pair
        .bracket(0, pair.dim_g - 1)
        .iter()
        .any(|(_, c)| !c.is_zero())
        || pair.dim_l < pair.dim_g
    {
        if let Some((bad, f)) = planted_noninvariant(&pair, window) {
            let res = lemma3_residual(&star, &model, &bad, &f);
            report.record(!t_is_zero(&model, &res), || Failure {
                check: "No3: planted non-invariant chain must fail".into(),
                seed,
                inputs: format!("A = {}", bad.fmt(&pair)),
                lhs: "0".into(),
                rhs: "non-zero expected".into(),
            });
        }
    }
    report
}

/// `Δ^{n-1}(f⋆_Gutt)·X - X·Δ^{n-1}(f⋆_Gutt)` where
/// `X = (A_1⊗…⊗A_n)·Δ^{n-1}(φ(A_{n+1}))` is the groupoid image of a chain.
pub fn lemma3_residual(
    star: &PbwStar,
    model: &DiffOpAlgebroid,
    chain: &crate::liepair::Chain,
    f: &Poly,
) -> Tp<DiffOpAlgebroid> {
    let n = chain.deg;
    assert!(n >= 1);
    let fg = gutt_op(star, model, f);
    let mut lhs = t_zero(model, n);
    let mut rhs = t_zero(model, n);
    for (key, c) in chain.terms.iter() {
        let phi = star.varphi(&LinComb::term(key.l.clone(), HSeries::one(star.window)));
        let phi = model.embed_weyl(&phi.expect("window admits φ"));
        let x = delta_power(model, &phi, n);
        let glift = LinComb::term(
            key.g
                .iter()
                .map(|m| DKey { g: m.clone(), w: WeylKey::one(star.dim()) })
                .collect::<Vec<_>>(),
            c.clone(),
        );
        let x = left_action(model, &glift, &x);
        lhs = t_add(model, &lhs, &insert(model, &fg, &x));
        let Tensor::Words(_, dfw) = delta_power(model, &fg, n) else { unreachable!() };
        rhs = t_add(model, &rhs, &right_action(model, &x, &dfw));
    }
    t_sub(model, &lhs, &rhs)
}

/// Lemma-4 residual with left padding `i ≥ 2` and a degree-`m` chain `B`:
/// `(Θ)_{1∧…∧i-1, i∧…∧i+m-1}·(1^{i-1}⊗img(B)) -
///  (1^{i-1}⊗B-legs)·Δ^{i+m-2}(φ(B_{m+1}))·(Θ)_{…}`.
pub fn lemma4_residual(
    star: &PbwStar,
    model: &DiffOpAlgebroid,
    theta: &Tp<DiffOpAlgebroid>,
    chain: &crate::liepair::Chain,
    i: usize,
) -> Tp<DiffOpAlgebroid> {
    let m = chain.deg;
    assert!(i >= 2 && m >= 1);
    let total = i + m - 1;
    let placed = theta_placement(model, theta, i - 1, m);
    let mut lhs = t_zero(model, total);
    let mut rhs = t_zero(model, total);
    for (key, c) in chain.terms.iter() {
        let phi = star.varphi(&LinComb::term(key.l.clone(), HSeries::one(star.window)));
        let phi = model.embed_weyl(&phi.expect("window admits φ"));
        // img(B) = (B_1⊗…⊗B_m)·Δ^{m-1}(φ(B_{m+1}))
        let img = {
            let x = delta_power(model, &phi, m);
            let glift = LinComb::term(
                key.g
                    .iter()
                    .map(|mo| DKey { g: mo.clone(), w: WeylKey::one(star.dim()) })
                    .collect::<Vec<_>>(),
                c.clone(),
            );
            left_action(model, &glift, &x)
        };
        // LHS: right action of the lift 1^{i-1} ⊗ lift(img).
        let Tensor::Words(_, img_w) = &img else { unreachable!() };
        let mut padded = LinComb::zero();
        for (word, cw) in img_w.iter() {
            let mut w2 = vec![model.unit_key(); i - 1];
            w2.extend(word.iter().cloned());
            padded.add_term(w2, cw.clone());
        }
        lhs = t_add(model, &lhs, &right_action(model, &placed, &padded));

        // RHS: (1^{i-1}⊗B-legs)·Δ^{i+m-2}(φ(B_{m+1}))·placed.
        let y = insert(model, &phi, &placed);
        let mut gpad: Vec<DKey> = vec![model.unit_key(); i - 1];
        gpad.extend(
            key.g.iter().map(|mo| DKey { g: mo.clone(), w: WeylKey::one(star.dim()) }),
        );
        let glift = LinComb::term(gpad, c.clone());
        rhs = t_add(model, &rhs, &left_action(model, &glift, &y));
    }
    t_sub(model, &lhs, &rhs)
}

/// A planted non-invariant chain for the Lemma-3 failure leg, with the test
/// polynomial it fails against.
fn planted_noninvariant(
    pair: &Arc<ValidatedPair>,
    window: Window,
) -> Option<(crate::liepair::Chain, Poly)> {
    // Find a basis vector x_j of g and a generator l_i with [l_i, x_j] ≠ 0;
    // then x_j⊗1 is not invariant.
    for i in 0..pair.dim_l {
        for j in 0..pair.dim_g {
            if i != j && pair.bracket(i, j).iter().any(|(_, c)| !c.is_zero()) {
                let mut g = vec![0u32; pair.dim_g];
                g[j] = 1;
                let key = crate::liepair::ChainKey { g: vec![g], l: vec![0; pair.dim_l] };
                let chain = crate::liepair::Chain::term(1, key, HSeries::one(window));
                let mut lam = vec![0u32; pair.dim_l];
                lam[i] = 1;
                let f: Poly = LinComb::term(lam, HSeries::one(window));
                return Some((chain, f));
            }
        }
    }
    None
}

/// Convenience: the full quantum-groupoid toolkit of a pair.
pub struct QGroupoid {
    pub star: PbwStar,
    pub model: DiffOpAlgebroid,
}

impl QGroupoid {
    pub fn new(pair: Arc<ValidatedPair>, window: Window) -> Self {
        let star = PbwStar::new(pair.clone(), window);
        let model = hgl_model(pair, window);
        QGroupoid { star, model }
    }

    pub fn theta_gutt(&self) -> Tp<DiffOpAlgebroid> {
        theta_gutt(&self.star, &self.model)
    }

    /// The arity-2 `Θ_PBW` tensor (zero `U(g)` legs).
    pub fn theta_pbw(&self) -> Tp<DiffOpAlgebroid> {
        let d = self.star.dim();
        let dim_g = self.model.pair.as_ref().map(|p| p.dim_g).unwrap_or(0);
        let mut words = LinComb::zero();
        for (c, a, b) in self.star.theta_pbw_coeffs() {
            for (m, cm) in c.iter() {
                words.add_term(
                    vec![
                        DKey { g: vec![0; dim_g], w: WeylKey { lam: m.clone(), dd: a.clone() } },
                        DKey { g: vec![0; dim_g], w: WeylKey { lam: vec![0; d], dd: b.clone() } },
                    ],
                    cm.clone(),
                );
            }
        }
        Tensor::Words(2, self.model.normalize(2, words))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use crate::liepair::LiePair;

    fn star_for(pair: LiePair, order: i64) -> PbwStar {
        let pair = Arc::new(ValidatedPair::new(pair).unwrap());
        PbwStar::new(pair, Window::laurent(4, order))
    }

    #[test]
    fn pbw_examples() {
        let star = star_for(LiePair::aff1_full(), 4);
        // pbw_ℏ(λ_x) = ℏ x.
        let f: Poly = LinComb::term(vec![1, 0], HSeries::one(star.window));
        let u = star.pbw_hbar(&f);
        assert_eq!(u.coeff(&vec![1, 0]).unwrap().coeff(1), rat(1, 1));
        // pbw_ℏ(λ_x λ_y) = (ℏ²/2)(xy + yx) = ℏ²(xy - y/2).
        let f: Poly = LinComb::term(vec![1, 1], HSeries::one(star.window));
        let u = star.pbw_hbar(&f);
        assert_eq!(u.coeff(&vec![1, 1]).unwrap().coeff(2), rat(1, 1));
        assert_eq!(u.coeff(&vec![0, 1]).unwrap().coeff(2), rat(-1, 2));
        // Roundtrip.
        let back = star.pbw_hbar_inverse(&u).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn star_aff1_examples() {
        let star = star_for(LiePair::aff1_full(), 4);
        // λ_x ⋆ λ_y = λ_xλ_y + (ℏ/2)λ_y.
        let fx: Poly = LinComb::term(vec![1, 0], HSeries::one(star.window));
        let fy: Poly = LinComb::term(vec![0, 1], HSeries::one(star.window));
        let p = star.star(&fx, &fy);
        assert_eq!(p.coeff(&vec![1, 1]).unwrap().coeff(0), rat(1, 1));
        assert_eq!(p.coeff(&vec![0, 1]).unwrap().coeff(1), rat(1, 2));
        // Commutator λ_x ⋆ λ_y - λ_y ⋆ λ_x = ℏ λ_y.
        let comm = star.star(&fx, &fy).sub(&star.star(&fy, &fx));
        assert_eq!(comm.coeff(&vec![0, 1]).unwrap().coeff(1), rat(1, 1));
        assert_eq!(comm.len(), 1);
    }

    #[test]
    fn star_associativity_small() {
        for pair in [LiePair::aff1_full(), LiePair::heisenberg3()] {
            let star = star_for(pair, 4);
            let d = star.dim();
            let monos = crate::hopf::polybi::monos_up_to(d, 2);
            for a in monos.iter().take(6) {
                for b in monos.iter().take(6) {
                    for c in monos.iter().take(4) {
                        let fa: Poly = LinComb::term(a.clone(), HSeries::one(star.window));
                        let fb: Poly = LinComb::term(b.clone(), HSeries::one(star.window));
                        let fc: Poly = LinComb::term(c.clone(), HSeries::one(star.window));
                        let lhs = star.star(&star.star(&fa, &fb), &fc);
                        let rhs = star.star(&fa, &star.star(&fb, &fc));
                        assert_eq!(lhs, rhs, "⋆ associativity at {:?} {:?} {:?}", a, b, c);
                    }
                }
            }
        }
    }

    #[test]
    fn theta_matches_star_and_abelian_is_trivial() {
        let star = star_for(LiePair::aff1_full(), 3);
        let monos = crate::hopf::polybi::monos_up_to(star.dim(), 3);
        for a in &monos {
            for b in &monos {
                let fa: Poly = LinComb::term(a.clone(), HSeries::one(star.window));
                let fb: Poly = LinComb::term(b.clone(), HSeries::one(star.window));
                assert_eq!(star.theta_eval(&fa, &fb), star.star(&fa, &fb));
            }
        }
        // Abelian l: Θ_PBW = 1⊗1.
        let star = star_for(LiePair::abelian(2), 3);
        let coeffs = star.theta_pbw_coeffs();
        assert_eq!(coeffs.len(), 1);
        let (c, a, b) = &coeffs[0];
        assert!(a.iter().all(|&e| e == 0) && b.iter().all(|&e| e == 0));
        assert_eq!(c.coeff(&vec![0, 0]).unwrap().coeff(0), rat(1, 1));
    }

    #[test]
    fn varphi_morphism_and_pbw_property() {
        let star = star_for(LiePair::aff1_full(), 3);
        // φ(pbw_ℏ f) = f⋆ as operators, on a few monomials.
        let monos = crate::hopf::polybi::monos_up_to(star.dim(), 2);
        for m in &monos {
            let f: Poly = LinComb::term(m.clone(), HSeries::one(star.window));
            let lhs = star.varphi(&star.pbw_hbar(&f)).unwrap();
            let rhs = star.star_op(&f);
            assert_eq!(lhs, rhs, "φ(pbw_ℏ λ^{:?}) = λ^{:?}⋆", m, m);
        }
        // (f⋆g)⋆ = (f⋆)·(g⋆).
        let fx: Poly = LinComb::term(vec![1, 0], HSeries::one(star.window));
        let fy: Poly = LinComb::term(vec![0, 2], HSeries::one(star.window));
        let lhs = star.star_op(&star.star(&fx, &fy));
        let rhs = weyl_mul(&star.star_op(&fx), &star.star_op(&fy));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_gutt_abelian_is_exponential() {
        let pair = Arc::new(ValidatedPair::new(LiePair::abelian(1)).unwrap());
        let window = Window::laurent(3, 3);
        let star = PbwStar::new(pair.clone(), window);
        let model = hgl_model(pair, window);
        let theta = theta_gutt(&star, &model);
        // exp(ℏ ∂⊗l): coefficient of ∂^k ⊗ l^k is ℏ^k/k!.
        let Tensor::Words(_, w) = &theta else { panic!() };
        for k in 0..=3u32 {
            let key = vec![
                DKey { g: vec![0], w: WeylKey { lam: vec![0], dd: vec![k] } },
                DKey { g: vec![k], w: WeylKey { lam: vec![0], dd: vec![0] } },
            ];
            let c = w.coeff(&key).expect("exp term present");
            assert_eq!(c.coeff(k as i64), factorial(k).recip());
        }
    }
}
