//! Lie algebra pairs `(g, l)`, the universal enveloping algebra engine
//! (PBW straightening, coproducts), `l`-invariant chains in
//! `U(g)^{⊗n} ⊗ U(l)[[ℏ]]`, the placement calculus for subscripted tensors,
//! the operad `P_(g,l)`, the explicit `W_(g,l)` structure formulas, the
//! algebraic dynamical twist equation, and the ℏ-adic valuation filter.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::coeff::{parse_rational, HSeries, Rational, Window};
use crate::linear::{rational_kernel, LinComb};
use crate::operad::Operad;
use crate::sample::{random_series, SizeBound};

/// PBW monomial: exponent vector over the ordered basis.
pub type Mono = Vec<u32>;

/// Element of `U(g)` (or `U(l)`): sparse sum of PBW monomials.
pub type UEnv = LinComb<Mono>;

// ---------------------------------------------------------------------------
// Lie pairs.
// ---------------------------------------------------------------------------

/// A Lie algebra pair: structure constants of `g` with the convention that
/// the first `dim_l` basis vectors span the subalgebra `l`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiePair {
    pub name: String,
    pub dim_g: usize,
    pub dim_l: usize,
    /// Brackets `[x_i, x_j] = Σ_k c · x_k` for `i < j`, 0-based indices.
    pub brackets: Vec<(usize, usize, usize, String)>,
}

#[derive(Debug, thiserror::Error)]
pub enum PairError {
    #[error("bad dims: need 1 ≤ dim_l ≤ dim_g")]
    BadDims,
    #[error("bracket index out of range")]
    BadIndex,
    #[error("bad rational: {0}")]
    BadRational(String),
    #[error("Jacobi identity fails at ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("l is not closed under the bracket: [{0}, {1}] leaves l")]
    NotClosed(usize, usize),
}

impl LiePair {
    pub fn from_toml(text: &str) -> Result<ValidatedPair, String> {
        let pair: LiePair = toml::from_str(text).map_err(|e| e.to_string())?;
        ValidatedPair::new(pair).map_err(|e| e.to_string())
    }

    /// `aff(1)`: `[x, y] = y` with `l = span(y)`; basis ordered `(y, x)` so
    /// that `l` is the leading block.
    pub fn aff1() -> LiePair {
        LiePair {
            name: "aff1".into(),
            dim_g: 2,
            dim_l: 1,
            // basis: x_0 = y (spans l), x_1 = x; [x_0, x_1] = [y, x] = -y.
            brackets: vec![(0, 1, 0, "-1".into())],
        }
    }

    /// `aff(1)` with `l = g`.
    pub fn aff1_full() -> LiePair {
        LiePair {
            name: "aff1-full".into(),
            dim_g: 2,
            dim_l: 2,
            // basis: x_0 = x, x_1 = y; [x, y] = y.
            brackets: vec![(0, 1, 1, "1".into())],
        }
    }

    /// `sl₂` with the Cartan subalgebra: basis `(h, e, f)`,
    /// `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2_cartan() -> LiePair {
        LiePair {
            name: "sl2-cartan".into(),
            dim_g: 3,
            dim_l: 1,
            brackets: vec![
                (0, 1, 1, "2".into()),
                (0, 2, 2, "-2".into()),
                (1, 2, 0, "1".into()),
            ],
        }
    }

    /// The 3-dimensional Heisenberg algebra with `l = g`:
    /// `[e_1, e_2] = e_3`.
    pub fn heisenberg3() -> LiePair {
        LiePair {
            name: "heis3".into(),
            dim_g: 3,
            dim_l: 3,
            brackets: vec![(0, 1, 2, "1".into())],
        }
    }

    /// Abelian pair of the given dimension with `l = g`.
    pub fn abelian(dim: usize) -> LiePair {
        LiePair { name: format!("abelian{dim}"), dim_g: dim, dim_l: dim, brackets: vec![] }
    }

    pub fn builtin(name: &str) -> Option<LiePair> {
        match name {
            "aff1" => Some(Self::aff1()),
            "aff1-full" => Some(Self::aff1_full()),
            "sl2-cartan" | "sl2" => Some(Self::sl2_cartan()),
            "heis3" => Some(Self::heisenberg3()),
            "abelian2" => Some(Self::abelian(2)),
            _ => None,
        }
    }
}

/// A validated pair with its bracket table and PBW straightening cache.
pub struct ValidatedPair {
    pub name: String,
    pub dim_g: usize,
    pub dim_l: usize,
    /// `table[i][j] = [x_i, x_j]` as a sparse vector, all `i, j`.
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    straighten_cache: Mutex<HashMap<Vec<u8>, Vec<(Mono, Rational)>>>,
}

impl ValidatedPair {
    pub fn new(pair: LiePair) -> Result<Self, PairError> {
        if pair.dim_l == 0 || pair.dim_l > pair.dim_g {
            return Err(PairError::BadDims);
        }
        let d = pair.dim_g;
        let mut table = vec![vec![Vec::new(); d]; d];
        for (i, j, k, c) in &pair.brackets {
            if *i >= d || *j >= d || *k >= d || i >= j {
                return Err(PairError::BadIndex);
            }
            let c = parse_rational(c).map_err(|e| PairError::BadRational(e.to_string()))?;
            table[*i][*j].push((*k, c.clone()));
            table[*j][*i].push((*k, -c));
        }
        let out = ValidatedPair {
            name: pair.name,
            dim_g: d,
            dim_l: pair.dim_l,
            table,
            straighten_cache: Mutex::new(HashMap::new()),
        };
        // Jacobi identity on basis triples.
        for a in 0..d {
            for b in a + 1..d {
                for c in b + 1..d {
                    let mut acc: Vec<Rational> = vec![Rational::zero(); d];
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        // [x, [y, z]]
                        for (k, q) in out.bracket(y, z) {
                            for (m, r) in out.bracket(x, k) {
                                acc[m] += q.clone() * r;
                            }
                        }
                    }
                    if acc.iter().any(|q| !q.is_zero()) {
                        return Err(PairError::Jacobi(a, b, c));
                    }
                }
            }
        }
        // l closed under the bracket.
        for i in 0..out.dim_l {
            for j in 0..out.dim_l {
                if out.bracket(i, j).iter().any(|(k, _)| *k >= out.dim_l) {
                    return Err(PairError::NotClosed(i, j));
                }
            }
        }
        Ok(out)
    }

    pub fn builtin(name: &str) -> Option<ValidatedPair> {
        LiePair::builtin(name).map(|p| ValidatedPair::new(p).expect("builtin pairs validate"))
    }

    pub fn bracket(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        self.table[i][j].clone()
    }

    // --- PBW straightening ---

    fn word_of(mono: &Mono) -> Vec<u8> {
        let mut w = Vec::new();
        for (i, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                w.push(i as u8);
            }
        }
        w
    }

    fn mono_of(word: &[u8], dim: usize) -> Mono {
        let mut m = vec![0u32; dim];
        for &i in word {
            m[i as usize] += 1;
        }
        m
    }

    /// Straighten an arbitrary word of basis indices into the PBW basis.
    /// Results are computed and cached over `dim_g`; the `dim` argument only
    /// controls the length of the returned exponent vectors (indices inside
    /// the `l` block stay inside it).
    fn straighten(&self, word: &[u8], dim: usize) -> Vec<(Mono, Rational)> {
        if word.windows(2).all(|p| p[0] <= p[1]) {
            return vec![(Self::mono_of(word, dim), Rational::one())];
        }
        if let Some(hit) = self.straighten_cache.lock().unwrap().get(word) {
            return hit.iter().map(|(m, c)| (m[..dim].to_vec(), c.clone())).collect();
        }
        let i = word.windows(2).position(|p| p[0] > p[1]).expect("unsorted");
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut acc: HashMap<Mono, Rational> = HashMap::new();
        for (m, c) in self.straighten(&swapped, self.dim_g) {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        for (k, q) in self.bracket(word[i] as usize, word[i + 1] as usize) {
            let mut contracted = Vec::with_capacity(word.len() - 1);
            contracted.extend_from_slice(&word[..i]);
            contracted.push(k as u8);
            contracted.extend_from_slice(&word[i + 2..]);
            for (m, c) in self.straighten(&contracted, self.dim_g) {
                *acc.entry(m).or_insert_with(Rational::zero) += q.clone() * c;
            }
        }
        let mut out: Vec<(Mono, Rational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        self.straighten_cache.lock().unwrap().insert(word.to_vec(), out.clone());
        out.into_iter().map(|(m, c)| (m[..dim].to_vec(), c)).collect()
    }

    /// Product of PBW monomials in `U(g)` (`dim = dim_g`) or `U(l)`
    /// (`dim = dim_l`).
    pub fn mono_mul(&self, a: &Mono, b: &Mono, dim: usize, window: Window) -> UEnv {
        let mut word = Self::word_of(a);
        word.extend(Self::word_of(b));
        let mut out = LinComb::zero();
        for (m, c) in self.straighten(&word, dim) {
            out.add_term(m, HSeries::from_rational(c, window));
        }
        out
    }

    pub fn uenv_mul(&self, a: &UEnv, b: &UEnv, dim: usize, window: Window) -> UEnv {
        a.bilinear(b, |x, y| self.mono_mul(x, y, dim, window))
    }

    /// All splits of a monomial into `parts` ordered factors with their
    /// multinomial coefficients (the iterated coproduct on primitives).
    pub fn mono_splits(mono: &Mono, parts: usize) -> Vec<(Vec<Mono>, Rational)> {
        assert!(parts >= 1);
        let dim = mono.len();
        let mut out: Vec<(Vec<Mono>, Rational)> =
            vec![(vec![vec![0u32; dim]; parts], Rational::one())];
        for (var, &total) in mono.iter().enumerate() {
            if total == 0 {
                continue;
            }
            let compositions = compositions_of(total, parts);
            let mut next = Vec::with_capacity(out.len() * compositions.len());
            for (split, coeff) in &out {
                for comp in &compositions {
                    let mut split2 = split.clone();
                    let mut c2 = coeff.clone();
                    let mut rem = total;
                    for (p, &k) in comp.iter().enumerate() {
                        split2[p][var] = k;
                        c2 *= binom_u32(rem, k);
                        rem -= k;
                    }
                    next.push((split2, c2));
                }
            }
            out = next;
        }
        out
    }

    /// Counit of `U(g)`: 1 on the empty monomial, 0 otherwise.
    pub fn mono_counit(mono: &Mono) -> bool {
        mono.iter().all(|&e| e == 0)
    }
}

fn binom_u32(n: u32, k: u32) -> Rational {
    let mut out = Rational::one();
    for i in 0..k {
        out *= Rational::from_integer((n - i).into());
        out /= Rational::from_integer((i + 1).into());
    }
    out
}

fn compositions_of(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions_of(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Chains.
// ---------------------------------------------------------------------------

/// Key of a chain term: `n` PBW monomials in `U(g)` and one in `U(l)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainKey {
    pub g: Vec<Mono>,
    pub l: Mono,
}

/// Element of `U(g)^{⊗n} ⊗ U(l)[[ℏ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub deg: usize,
    pub terms: LinComb<ChainKey>,
}

impl Chain {
    pub fn zero(deg: usize) -> Self {
        Chain { deg, terms: LinComb::zero() }
    }

    pub fn unit(deg: usize, pair: &ValidatedPair, window: Window) -> Self {
        let key = ChainKey { g: vec![vec![0; pair.dim_g]; deg], l: vec![0; pair.dim_l] };
        Chain { deg, terms: LinComb::term(key, HSeries::one(window)) }
    }

    pub fn term(deg: usize, key: ChainKey, coeff: HSeries) -> Self {
        Chain { deg, terms: LinComb::term(key, coeff) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn add(&self, other: &Chain) -> Chain {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.deg, other.deg, "chain degree mismatch");
        Chain { deg: self.deg, terms: self.terms.add(&other.terms) }
    }

    pub fn scale(&self, c: &HSeries) -> Chain {
        Chain { deg: self.deg, terms: self.terms.scale(c) }
    }

    pub fn scale_rat(&self, q: &Rational) -> Chain {
        Chain { deg: self.deg, terms: self.terms.scale_rat(q) }
    }

    pub fn neg(&self) -> Chain {
        Chain { deg: self.deg, terms: self.terms.neg() }
    }

    pub fn fmt(&self, _pair: &ValidatedPair) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, c)| {
                let gs = k
                    .g
                    .iter()
                    .map(|m| crate::hopf::polybi::fmt_mono(m, "g"))
                    .collect::<Vec<_>>()
                    .join("⊗");
                let l = crate::hopf::polybi::fmt_mono(&k.l, "l");
                if gs.is_empty() {
                    format!("({c})·[{l}]")
                } else {
                    format!("({c})·{gs}⊗[{l}]")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Slotwise product of two same-degree chains.
pub fn chain_mul(pair: &ValidatedPair, a: &Chain, b: &Chain, window: Window) -> Chain {
    assert_eq!(a.deg, b.deg, "chain product needs equal degrees");
    let deg = a.deg;
    let mut out = Chain::zero(deg);
    for (ka, ca) in a.terms.iter() {
        for (kb, cb) in b.terms.iter() {
            let mut partial: Vec<(Vec<Mono>, HSeries)> = vec![(Vec::new(), ca.mul(cb))];
            for s in 0..deg {
                let prod = pair.mono_mul(&ka.g[s], &kb.g[s], pair.dim_g, window);
                let mut next = Vec::new();
                for (acc, c) in &partial {
                    for (m, cm) in prod.iter() {
                        let mut g2 = acc.clone();
                        g2.push(m.clone());
                        next.push((g2, c.mul(cm)));
                    }
                }
                partial = next;
            }
            let lprod = pair.mono_mul(&ka.l, &kb.l, pair.dim_l, window);
            for (g, c) in &partial {
                for (lm, cl) in lprod.iter() {
                    out.terms.add_term(ChainKey { g: g.clone(), l: lm.clone() }, c.mul(cl));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Placements.
// ---------------------------------------------------------------------------

/// Where one factor of a chain goes: a block of consecutive result slots
/// (1-based start, length); length 0 means the counit ε.
pub type Block = (usize, usize);

/// The subscript-placement operator: apply `Δ^{len-1}` (or ε for `len = 0`)
/// to each factor of `a`, place the outputs at the given result slots, and
/// fill the uncovered slots with 1. The last factor is the `U(l)` leg; the
/// final slot of its block is the result's `U(l)` slot (`out_deg + 1`).
pub fn place(
    pair: &ValidatedPair,
    a: &Chain,
    blocks: &[Block],
    out_deg: usize,
) -> Chain {
    assert_eq!(blocks.len(), a.deg + 1, "one block per factor");
    let total_slots = out_deg + 1;
    let mut cursor = 0usize;
    for (idx, &(start, len)) in blocks.iter().enumerate() {
        if len == 0 {
            continue;
        }
        assert!(start >= 1 && start > cursor, "blocks must be increasing");
        let end = start + len - 1;
        assert!(end <= total_slots, "block exceeds the slot range");
        if idx + 1 < blocks.len() {
            assert!(end <= out_deg, "only the l-factor may reach the l-slot");
        } else {
            assert_eq!(end, total_slots, "a non-empty l-block must end at the l-slot");
        }
        cursor = end;
    }

    let mut out = Chain::zero(out_deg);
    'terms: for (key, coeff) in a.terms.iter() {
        // Expanded pieces per result slot; None = unit.
        let mut variants: Vec<(Vec<Option<Mono>>, Option<Mono>, Rational)> =
            vec![(vec![None; out_deg], None, Rational::one())];
        for (idx, &(start, len)) in blocks.iter().enumerate() {
            let is_l = idx == a.deg;
            let mono: &Mono = if is_l { &key.l } else { &key.g[idx] };
            if len == 0 {
                // ε kills non-trivial monomials; the whole term dies.
                if !ValidatedPair::mono_counit(mono) {
                    continue 'terms;
                }
                continue;
            }
            let splits = ValidatedPair::mono_splits(mono, len);
            let mut next = Vec::with_capacity(variants.len() * splits.len());
            for (slots, lval, c) in &variants {
                for (parts, cs) in &splits {
                    let mut slots2 = slots.clone();
                    let mut lval2 = lval.clone();
                    for (p, part) in parts.iter().enumerate() {
                        let slot = start + p; // 1-based
                        if slot == total_slots {
                            lval2 = Some(part.clone());
                        } else {
                            // Embed l-monomials into U(g) when needed.
                            let g_part = if is_l {
                                let mut m = vec![0u32; pair.dim_g];
                                m[..pair.dim_l].copy_from_slice(part);
                                m
                            } else {
                                part.clone()
                            };
                            slots2[slot - 1] = Some(g_part);
                        }
                    }
                    next.push((slots2, lval2, c * cs));
                }
            }
            variants = next;
        }
        for (slots, lval, c) in variants {
            let g: Vec<Mono> =
                slots.into_iter().map(|m| m.unwrap_or_else(|| vec![0; pair.dim_g])).collect();
            let l = lval.unwrap_or_else(|| vec![0; pair.dim_l]);
            out.terms.add_term(ChainKey { g, l }, coeff.scale(&c));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Invariance.
// ---------------------------------------------------------------------------

/// The commutator `Δⁿ(l_i)·A - A·Δⁿ(l_i)`: sum over slots of the slotwise
/// bracket action of the basis vector `l_i`.
pub fn invariance_residual(
    pair: &ValidatedPair,
    a: &Chain,
    i: usize,
    window: Window,
) -> Chain {
    let mut li_g = vec![0u32; pair.dim_g];
    li_g[i] = 1;
    let mut li_l = vec![0u32; pair.dim_l];
    li_l[i] = 1;
    let mut out = Chain::zero(a.deg);
    for (key, c) in a.terms.iter() {
        for s in 0..=a.deg {
            let (mono, dim): (&Mono, usize) =
                if s < a.deg { (&key.g[s], pair.dim_g) } else { (&key.l, pair.dim_l) };
            let li: &Mono = if s < a.deg { &li_g } else { &li_l };
            let comm =
                pair.mono_mul(li, mono, dim, window).sub(&pair.mono_mul(mono, li, dim, window));
            for (m, cm) in comm.iter() {
                let mut k2 = key.clone();
                if s < a.deg {
                    k2.g[s] = m.clone();
                } else {
                    k2.l = m.clone();
                }
                out.terms.add_term(k2, c.mul(cm));
            }
        }
    }
    out
}

/// Certify `l`-invariance on the Lie-algebra generators of `l` (sufficient
/// because `ad` acts by derivations); returns the violating generator and
/// the difference term on failure.
pub fn check_invariance(
    pair: &ValidatedPair,
    a: &Chain,
    window: Window,
) -> Result<(), (usize, Chain)> {
    for i in 0..pair.dim_l {
        let res = invariance_residual(pair, a, i, window);
        if !res.is_zero() {
            return Err((i, res));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The operad P_(g,l).
// ---------------------------------------------------------------------------

/// Basis of chain keys with per-slot `U(g)` degree ≤ `gdeg` and `U(l)`
/// degree ≤ `ldeg`.
pub fn chain_key_basis(
    pair: &ValidatedPair,
    deg: usize,
    gdeg: usize,
    ldeg: usize,
) -> Vec<ChainKey> {
    let gmonos = crate::hopf::polybi::monos_up_to(pair.dim_g, gdeg);
    let lmonos = crate::hopf::polybi::monos_up_to(pair.dim_l, ldeg);
    let mut words: Vec<Vec<Mono>> = vec![Vec::new()];
    for _ in 0..deg {
        let mut next = Vec::new();
        for w in &words {
            for m in &gmonos {
                let mut w2 = w.clone();
                w2.push(m.clone());
                next.push(w2);
            }
        }
        words = next;
    }
    let mut out = Vec::new();
    for w in words {
        for l in &lmonos {
            out.push(ChainKey { g: w.clone(), l: l.clone() });
        }
    }
    out
}

/// A basis of the `l`-invariant subspace spanned by the given keys: exact
/// kernel of the linear invariance system.
pub fn invariant_basis(
    pair: &ValidatedPair,
    keys: &[ChainKey],
    deg: usize,
    window: Window,
) -> Vec<Chain> {
    let mut rows_map: HashMap<(usize, ChainKey), Vec<Rational>> = HashMap::new();
    for (col, key) in keys.iter().enumerate() {
        let unit_chain = Chain::term(deg, key.clone(), HSeries::one(window));
        for i in 0..pair.dim_l {
            let res = invariance_residual(pair, &unit_chain, i, window);
            for (out_key, c) in res.terms.iter() {
                let row = rows_map
                    .entry((i, out_key.clone()))
                    .or_insert_with(|| vec![Rational::zero(); keys.len()]);
                row[col] += c.coeff(0);
            }
        }
    }
    let rows: Vec<Vec<Rational>> = rows_map.into_values().collect();
    let kernel = rational_kernel(rows, keys.len());
    kernel
        .into_iter()
        .map(|v| {
            let mut terms = LinComb::zero();
            for (col, q) in v.into_iter().enumerate() {
                if !q.is_zero() {
                    terms.add_term(keys[col].clone(), HSeries::from_rational(q, window));
                }
            }
            Chain { deg, terms }
        })
        .filter(|c| !c.is_zero())
        .collect()
}

/// The non-symmetric operad `P_(g,l)` on `l`-invariant chains, with the
/// partial compositions
/// `A ∘_i B = A_{1,…,i∧…∧i+m-1,…,n+m} · B_{i,…,i+m-1,i+m∧…∧n+m}`.
pub struct LiePairOperad {
    pub pair: std::sync::Arc<ValidatedPair>,
    pub window: Window,
    invariant_cache: Mutex<HashMap<usize, Vec<Chain>>>,
    /// Mutation hook: misplace the `∘_i` blocks by one (see `mutation`).
    pub misplace: bool,
}

impl LiePairOperad {
    pub fn new(pair: std::sync::Arc<ValidatedPair>, window: Window) -> Self {
        LiePairOperad {
            pair,
            window,
            invariant_cache: Mutex::new(HashMap::new()),
            misplace: false,
        }
    }

    /// Cached basis of the invariant subspace at the given degree (per-slot
    /// `U(g)` degree ≤ 1, `U(l)` degree ≤ 2).
    pub fn invariants(&self, deg: usize) -> Vec<Chain> {
        if let Some(hit) = self.invariant_cache.lock().unwrap().get(&deg) {
            return hit.clone();
        }
        let keys = chain_key_basis(&self.pair, deg, 1, 2);
        let basis = invariant_basis(&self.pair, &keys, deg, self.window);
        self.invariant_cache.lock().unwrap().insert(deg, basis.clone());
        basis
    }

    /// The placement blocks of `A ∘_i B` (1-based `i`).
    fn compose_blocks(n: usize, m: usize, i: usize) -> (Vec<Block>, Vec<Block>) {
        let mut a_blocks = Vec::with_capacity(n + 1);
        for t in 1..=n {
            if t < i {
                a_blocks.push((t, 1));
            } else if t == i {
                a_blocks.push((i, m));
            } else {
                a_blocks.push((t + m - 1, 1));
            }
        }
        a_blocks.push((n + m, 1));
        let mut b_blocks = Vec::with_capacity(m + 1);
        for t in 1..=m {
            b_blocks.push((i + t - 1, 1));
        }
        b_blocks.push((i + m, n - i + 1));
        (a_blocks, b_blocks)
    }
}

impl Operad for LiePairOperad {
    type Elem = Chain;

    fn name(&self) -> String {
        format!("P_(g,l)[{}]", self.pair.name)
    }

    fn identity(&self) -> Chain {
        Chain::unit(1, &self.pair, self.window)
    }

    fn arity(&self, x: &Chain) -> usize {
        x.deg
    }

    fn zero(&self, arity: usize) -> Chain {
        Chain::zero(arity)
    }

    fn add(&self, x: &Chain, y: &Chain) -> Chain {
        x.add(y)
    }

    fn scale(&self, c: &HSeries, x: &Chain) -> Chain {
        x.scale(c)
    }

    fn eq(&self, x: &Chain, y: &Chain) -> bool {
        x.deg == y.deg && x.terms == y.terms
    }

    fn partial(&self, x: &Chain, i: usize, y: &Chain) -> Chain {
        let n = x.deg;
        let m = y.deg;
        assert!((1..=n).contains(&i), "partial composition index out of range");
        let eff_i = if self.misplace && i < n { i + 1 } else { i };
        let (a_blocks, b_blocks) = Self::compose_blocks(n, m, eff_i);
        let pa = place(&self.pair, x, &a_blocks, n + m - 1);
        let pb = place(&self.pair, y, &b_blocks, n + m - 1);
        chain_mul(&self.pair, &pa, &pb, self.window)
    }

    fn random(&self, arity: usize, bound: &SizeBound, rng: &mut dyn RngCore) -> Chain {
        let basis = self.invariants(arity);
        if basis.is_empty() {
            return Chain::zero(arity);
        }
        let mut out = Chain::zero(arity);
        for _ in 0..bound.max_terms.max(1) {
            let pick = &basis[rng.gen_range(0..basis.len())];
            out = out.add(&pick.scale(&random_series(rng, bound, self.window)));
        }
        out
    }

    fn fmt_elem(&self, x: &Chain) -> String {
        x.fmt(&self.pair)
    }
}

/// The multiplication `m = 1⊗1⊗1 ∈ P_(g,l)(2)`.
pub fn wgl_multiplication(pair: &ValidatedPair, window: Window) -> Chain {
    Chain::unit(2, pair, window)
}

/// The canonical brace B∞ algebra `W_(g,l)` (generic GV construction over
/// `P_(g,l)` with `m = 1⊗1⊗1`).
pub fn wgl_structures(
    pair: std::sync::Arc<ValidatedPair>,
    window: Window,
) -> Result<crate::brace::BraceAlgebra<LiePairOperad>, crate::brace::BraceError> {
    let op = LiePairOperad::new(pair.clone(), window);
    let m = wgl_multiplication(&pair, window);
    crate::brace::BraceAlgebra::with_multiplication(op, m)
}

// ---------------------------------------------------------------------------
// Explicit W_(g,l) structure formulas (oracles against the generic GV ones).
// ---------------------------------------------------------------------------

/// `δ_(g,l)(A) = (-1)^{n-1} A_{2,…,n+2} + Σ_{i=1}^{n+1} (-1)^{n-1+i} A_{1,…,i∧i+1,…,n+2}`.
pub fn delta_gl_explicit(pair: &ValidatedPair, a: &Chain) -> Chain {
    let n = a.deg;
    let mut blocks: Vec<Block> = (1..=n + 1).map(|t| (t + 1, 1)).collect();
    let mut out = place(pair, a, &blocks, n + 1);
    if (n as i64 - 1).rem_euclid(2) == 1 {
        out = out.neg();
    }
    for i in 1..=n + 1 {
        blocks = (1..=n + 1)
            .map(|t| {
                if t < i {
                    (t, 1)
                } else if t == i {
                    (i, 2)
                } else {
                    (t + 1, 1)
                }
            })
            .collect();
        let mut piece = place(pair, a, &blocks, n + 1);
        if (n as i64 - 1 + i as i64).rem_euclid(2) == 1 {
            piece = piece.neg();
        }
        out = out.add(&piece);
    }
    out
}

/// `A ∪_(g,l) B = (-1)^{nm} A_{1,…,n,n+1∧…∧n+m+1} · B_{n+1,…,n+m+1}`.
pub fn cup_gl_explicit(pair: &ValidatedPair, a: &Chain, b: &Chain, window: Window) -> Chain {
    let n = a.deg;
    let m = b.deg;
    let mut a_blocks: Vec<Block> = (1..=n).map(|t| (t, 1)).collect();
    a_blocks.push((n + 1, m + 1));
    let mut b_blocks: Vec<Block> = (1..=m).map(|t| (n + t, 1)).collect();
    b_blocks.push((n + m + 1, 1));
    let pa = place(pair, a, &a_blocks, n + m);
    let pb = place(pair, b, &b_blocks, n + m);
    let mut out = chain_mul(pair, &pa, &pb, window);
    if (n * m) % 2 == 1 {
        out = out.neg();
    }
    out
}

/// The explicit brace `A{B_1,…,B_k}`: placement sum over result positions
/// `j_s` with sign `(-1)^{Σ_s (q_s-1)(j_s-1)}`.
pub fn brace_gl_explicit(
    pair: &ValidatedPair,
    a: &Chain,
    bs: &[&Chain],
    window: Window,
) -> Chain {
    let p = a.deg;
    let k = bs.len();
    if k == 0 {
        return a.clone();
    }
    let out_deg = (p + bs.iter().map(|b| b.deg).sum::<usize>()).saturating_sub(k);
    if p < k {
        return Chain::zero(out_deg);
    }
    let mut acc = Chain::zero(out_deg);
    // Choose x-input positions J_1 < … < J_k ⊆ {1..p}; the result slots are
    // j_s = J_s + Σ_{t<s}(q_t - 1).
    let mut positions: Vec<usize> = (1..=k).collect();
    loop {
        let mut jshift = 0i64;
        let mut exponent = 0i64;
        let mut result_pos = Vec::with_capacity(k);
        for (s, &jcap) in positions.iter().enumerate() {
            let q = bs[s].deg as i64;
            let j = jcap as i64 + jshift;
            exponent += (q - 1) * (j - 1);
            result_pos.push(j as usize);
            jshift += q - 1;
        }

        // A's placement: blocks at the chosen slots, singles elsewhere.
        let mut a_blocks: Vec<Block> = Vec::with_capacity(p + 1);
        for t in 1..=p {
            if let Some(s) = positions.iter().position(|&j| j == t) {
                a_blocks.push((result_pos[s], bs[s].deg));
            } else {
                let shift: i64 = positions
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| j < t)
                    .map(|(s, _)| bs[s].deg as i64 - 1)
                    .sum();
                a_blocks.push(((t as i64 + shift) as usize, 1));
            }
        }
        a_blocks.push((out_deg + 1, 1));
        let mut term = place(pair, a, &a_blocks, out_deg);

        for (s, b) in bs.iter().enumerate() {
            let q = b.deg;
            let j = result_pos[s];
            let mut b_blocks: Vec<Block> = (0..q).map(|u| (j + u, 1)).collect();
            b_blocks.push((j + q, out_deg + 2 - j - q));
            let pb = place(pair, b, &b_blocks, out_deg);
            term = chain_mul(pair, &term, &pb, window);
        }
        if exponent.rem_euclid(2) == 1 {
            term = term.neg();
        }
        acc = acc.add(&term);

        let mut idx = k;
        loop {
            if idx == 0 {
                return acc;
            }
            idx -= 1;
            if positions[idx] < p - (k - 1 - idx) {
                positions[idx] += 1;
                for t in idx + 1..k {
                    positions[t] = positions[t - 1] + 1;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ADTE and the valuation property.
// ---------------------------------------------------------------------------

/// Residual of the algebraic dynamical twist equation
/// `K_{1∧2,3,4}·K_{1,2,3∧4} - K_{1,2∧3,4}·K_{2,3,4}` for a degree-2 chain.
pub fn adte_residual(pair: &ValidatedPair, k: &Chain, window: Window) -> Chain {
    assert_eq!(k.deg, 2, "the ADTE concerns degree-2 chains");
    let lhs = chain_mul(
        pair,
        &place(pair, k, &[(1, 2), (3, 1), (4, 1)], 3),
        &place(pair, k, &[(1, 1), (2, 1), (3, 2)], 3),
        window,
    );
    let rhs = chain_mul(
        pair,
        &place(pair, k, &[(1, 1), (2, 2), (4, 1)], 3),
        &place(pair, k, &[(2, 1), (3, 1), (4, 1)], 3),
        window,
    );
    lhs.add(&rhs.neg())
}

/// `true` per ℏ-order `0..=window.order` iff the ADTE holds at that order.
pub fn adte_verdicts(pair: &ValidatedPair, k: &Chain, window: Window) -> Vec<bool> {
    let res = adte_residual(pair, k, window);
    (0..=window.order).map(|ord| res.terms.hbar_coefficient(ord).is_zero()).collect()
}

/// The ℏ-adic valuation property: each coefficient `K_n` of `ℏ^n` must have
/// its `U(l)` legs in `(U(l))_{≤n} = Ker (id - ηε)^{⊗(n+1)} ∘ Δⁿ`.
pub fn valuation_check(k: &Chain, window: Window) -> Result<(), (i64, Mono)> {
    for ord in 1..=window.order {
        let part = k.terms.hbar_coefficient(ord);
        for (key, _) in part.iter() {
            // (id - ηε)^{⊗(n+1)} ∘ Δⁿ on the l-leg: the surviving splits are
            // exactly those with every factor non-trivial (no cross-term
            // cancellation is possible since all multinomials are positive
            // and distinct monomials have disjoint split supports).
            let parts = ord as usize + 1;
            let splits = ValidatedPair::mono_splits(&key.l, parts);
            let survives =
                splits.iter().any(|(fs, _)| fs.iter().all(|m| !ValidatedPair::mono_counit(m)));
            if survives {
                return Err((ord, key.l.clone()));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct ChainTermJson {
    pub gfactors: Vec<Vec<u32>>,
    pub lfactor: Vec<u32>,
    pub coeff: HSeries,
}

#[derive(Serialize, Deserialize)]
pub struct ChainJson {
    pub degree: usize,
    pub terms: Vec<ChainTermJson>,
}

pub fn chain_to_json(c: &Chain) -> ChainJson {
    ChainJson {
        degree: c.deg,
        terms: c
            .terms
            .iter()
            .map(|(k, coeff)| ChainTermJson {
                gfactors: k.g.clone(),
                lfactor: k.l.clone(),
                coeff: coeff.clone(),
            })
            .collect(),
    }
}

pub fn chain_from_json(json: &ChainJson, pair: &ValidatedPair) -> Result<Chain, String> {
    let mut terms = LinComb::zero();
    for t in &json.terms {
        if t.gfactors.len() != json.degree {
            return Err("gfactors length must equal the degree".into());
        }
        if t.gfactors.iter().any(|m| m.len() != pair.dim_g) || t.lfactor.len() != pair.dim_l {
            return Err("monomial length does not match the pair dims".into());
        }
        terms.add_term(ChainKey { g: t.gfactors.clone(), l: t.lfactor.clone() }, t.coeff.clone());
    }
    Ok(Chain { deg: json.degree, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn win() -> Window {
        Window::power(3)
    }

    #[test]
    fn straightening_examples() {
        // aff1-full: basis (x, y), [x, y] = y; monomials sorted as x^a y^b.
        let pair = ValidatedPair::new(LiePair::aff1_full()).unwrap();
        // y·x = xy - y.
        let y = vec![0u32, 1u32];
        let x = vec![1u32, 0u32];
        let prod = pair.mono_mul(&y, &x, 2, win());
        assert_eq!(prod.coeff(&vec![1, 1]).unwrap().coeff(0), rat(1, 1));
        assert_eq!(prod.coeff(&vec![0, 1]).unwrap().coeff(0), rat(-1, 1));

        // sl2 (h, e, f): f·e = ef - h in the PBW order.
        let pair = ValidatedPair::new(LiePair::sl2_cartan()).unwrap();
        let e = vec![0u32, 1, 0];
        let f = vec![0u32, 0, 1];
        let fe = pair.mono_mul(&f, &e, 3, win());
        assert_eq!(fe.coeff(&vec![0, 1, 1]).unwrap().coeff(0), rat(1, 1));
        assert_eq!(fe.coeff(&vec![1, 0, 0]).unwrap().coeff(0), rat(-1, 1));

        // Associativity on sampled monomials (confluence of straightening).
        let a = vec![1u32, 1, 0];
        let b = vec![0u32, 0, 2];
        let c = vec![1u32, 1, 1];
        let ab = pair.mono_mul(&a, &b, 3, win());
        let bc = pair.mono_mul(&b, &c, 3, win());
        let lhs = pair.uenv_mul(&ab, &LinComb::term(c.clone(), HSeries::one(win())), 3, win());
        let rhs = pair.uenv_mul(&LinComb::term(a.clone(), HSeries::one(win())), &bc, 3, win());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn placement_examples() {
        let pair = ValidatedPair::new(LiePair::aff1_full()).unwrap();
        // A = a⊗c of degree 1: A_{2,3} = 1⊗a⊗c.
        let a_key = ChainKey { g: vec![vec![1, 0]], l: vec![0, 1] };
        let a = Chain::term(1, a_key, HSeries::one(win()));
        let placed = place(&pair, &a, &[(2, 1), (3, 1)], 2);
        let expect = ChainKey { g: vec![vec![0, 0], vec![1, 0]], l: vec![0, 1] };
        assert_eq!(placed.terms.coeff(&expect).unwrap().coeff(0), rat(1, 1));

        // An empty block applies ε: non-trivial factors kill the term.
        let placed = place(&pair, &a, &[(0, 0), (1, 1)], 0);
        assert!(placed.is_zero());
        let unit = Chain::unit(1, &pair, win());
        let placed = place(&pair, &unit, &[(0, 0), (1, 1)], 0);
        assert!(!placed.is_zero());
    }

    #[test]
    fn delta_splits_with_multinomials() {
        // Δ of l² into two parts: l²⊗1 + 2 l⊗l + 1⊗l².
        let splits = ValidatedPair::mono_splits(&vec![2u32], 2);
        assert_eq!(splits.len(), 3);
        let mid =
            splits.iter().find(|(p, _)| p[0] == vec![1] && p[1] == vec![1]).expect("middle");
        assert_eq!(mid.1, rat(2, 1));
    }

    #[test]
    fn m_is_a_multiplication() {
        for pair in [LiePair::aff1(), LiePair::sl2_cartan(), LiePair::aff1_full()] {
            let pair = std::sync::Arc::new(ValidatedPair::new(pair).unwrap());
            let op = LiePairOperad::new(pair.clone(), win());
            let m = wgl_multiplication(&pair, win());
            // m ∘_1 m = m ∘_2 m = 1⊗1⊗1⊗1.
            let lhs = op.partial(&m, 1, &m);
            let rhs = op.partial(&m, 2, &m);
            let unit4 = Chain::unit(3, &pair, win());
            assert!(op.eq(&lhs, &rhs) && op.eq(&lhs, &unit4));
        }
    }

    #[test]
    fn invariance_examples() {
        let pair = ValidatedPair::new(LiePair::sl2_cartan()).unwrap();
        // m = 1⊗1⊗1 is invariant.
        let m = wgl_multiplication(&pair, win());
        assert!(check_invariance(&pair, &m, win()).is_ok());
        // The Casimir chain 1⊗Ω with Ω = ef + fe + h²/2 = 2ef - h + h²/2 in
        // the PBW order (h, e, f) is Cartan-invariant.
        let mut terms = LinComb::zero();
        terms.add_term(
            ChainKey { g: vec![vec![0, 1, 1]], l: vec![0] },
            HSeries::from_rational(rat(2, 1), win()),
        );
        terms.add_term(
            ChainKey { g: vec![vec![1, 0, 0]], l: vec![0] },
            HSeries::from_rational(rat(-1, 1), win()),
        );
        terms.add_term(
            ChainKey { g: vec![vec![2, 0, 0]], l: vec![0] },
            HSeries::from_rational(rat(1, 2), win()),
        );
        let omega = Chain { deg: 1, terms };
        assert!(check_invariance(&pair, &omega, win()).is_ok());
        // e⊗1 is not invariant: [h, e] = 2e.
        let e =
            Chain::term(1, ChainKey { g: vec![vec![0, 1, 0]], l: vec![0] }, HSeries::one(win()));
        let err = check_invariance(&pair, &e, win()).unwrap_err();
        assert_eq!(err.0, 0);
    }

    #[test]
    fn valuation_examples() {
        let pair = ValidatedPair::new(LiePair::aff1_full()).unwrap();
        let w = win();
        let k = Chain::unit(2, &pair, w);
        assert!(valuation_check(&k, w).is_ok());
        // ℏ·l_i is fine; ℏ·l_i l_j is not.
        let mut ok = k.clone();
        ok.terms.add_term(ChainKey { g: vec![vec![0; 2]; 2], l: vec![1, 0] }, HSeries::hbar(w));
        assert!(valuation_check(&ok, w).is_ok());
        let mut bad = k.clone();
        bad.terms.add_term(ChainKey { g: vec![vec![0; 2]; 2], l: vec![1, 1] }, HSeries::hbar(w));
        assert_eq!(valuation_check(&bad, w).unwrap_err().0, 1);
    }

    #[test]
    fn adte_trivial_twist_passes() {
        let pair = ValidatedPair::new(LiePair::aff1()).unwrap();
        let k = Chain::unit(2, &pair, win());
        assert!(adte_verdicts(&pair, &k, win()).iter().all(|&b| b));
    }
}
