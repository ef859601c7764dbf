//! Sparse linear combinations over [`HSeries`] and exact rational linear
//! algebra used by the invariant-chain samplers.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::coeff::{HSeries, Rational};

/// Sparse linear combination of basis keys with [`HSeries`] coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinComb<K: Ord + Clone> {
    terms: BTreeMap<K, HSeries>,
}

impl<K: Ord + Clone> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: K, coeff: HSeries) -> Self {
        let mut s = Self::zero();
        s.add_term(key, coeff);
        s
    }

    pub fn add_term(&mut self, key: K, coeff: HSeries) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect();
        LinComb { terms }
    }

    pub fn scale(&self, c: &HSeries) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (k, q) in &self.terms {
            out.add_term(k.clone(), q.mul(c));
        }
        out
    }

    pub fn scale_rat(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale(q));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &HSeries)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &K) -> Option<&HSeries> {
        self.terms.get(key)
    }

    /// Extend a map defined on keys linearly.
    pub fn apply<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<K2>) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_assign(&f(k).scale(c));
        }
        out
    }

    /// Extend a bilinear map defined on key pairs.
    pub fn bilinear<K2: Ord + Clone, K3: Ord + Clone>(
        &self,
        other: &LinComb<K2>,
        mut f: impl FnMut(&K, &K2) -> LinComb<K3>,
    ) -> LinComb<K3> {
        let mut out = LinComb::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_assign(&f(ka, kb).scale(&ca.mul(cb)));
            }
        }
        out
    }

    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Keep only the `ℏ^k` part of every coefficient (as a plain series).
    pub fn hbar_coefficient(&self, k: i64) -> LinComb<K> {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            let q = c.coeff(k);
            if !q.is_zero() {
                out.add_term(key.clone(), HSeries::monomial(q, 0, c.window()));
            }
        }
        out
    }

    /// Lowest ℏ-order at which some coefficient is non-zero.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.values().filter_map(|c| c.valuation()).min()
    }
}

/// Exact reduced row echelon form over the rationals. Returns a basis of the
/// kernel of the matrix (rows are equations over `cols` unknowns).
pub fn rational_kernel(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..cols {
                    let delta = &rows[rank][c] * &factor;
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::from_integer(1.into());
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                v[col] = -rows[r][free].clone();
            }
        }
        kernel.push(v);
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, Window};

    #[test]
    fn lincomb_cancels() {
        let w = Window::power(2);
        let mut a = LinComb::term("x", HSeries::one(w));
        a.add_term("x", HSeries::one(w).neg());
        assert!(a.is_zero());
    }

    #[test]
    fn kernel_of_simple_system() {
        // x + y = 0 over (x, y, z): kernel spanned by (1, -1, 0), (0, 0, 1).
        let rows = vec![vec![rat(1, 1), rat(1, 1), rat(0, 1)]];
        let kernel = rational_kernel(rows, 3);
        assert_eq!(kernel.len(), 2);
        for v in kernel {
            assert_eq!(&v[0] + &v[1], rat(0, 1));
        }
    }
}
