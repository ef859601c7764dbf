//! Group algebra `K[G]` from a Cayley table, as a Hopf algebroid over the
//! scalars: `Δ(g) = g⊗g`, `ε(g) = 1`, `α = β` the unit inclusion.

use rand::RngCore;
use serde::Deserialize;
use thiserror::Error;

use crate::coeff::{HSeries, Window};
use crate::hopf::{HopfAlgebroid, Tensor, WordSum};
use crate::linear::LinComb;
use crate::sample::{random_series, SizeBound};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("cayley table is not square or out of range")]
    Malformed,
    #[error("no identity element")]
    NoIdentity,
    #[error("table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
}

/// A finite group algebra model.
#[derive(Debug, Clone)]
pub struct GroupAlgebra {
    name: String,
    table: Vec<Vec<usize>>,
    names: Vec<String>,
    unit: usize,
    window: Window,
}

#[derive(Debug, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupAlgebra {
    pub fn new(
        name: impl Into<String>,
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        window: Window,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::Malformed);
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        for g in 0..n {
            if !(0..n).any(|h| table[g][h] == unit) {
                return Err(GroupError::NoInverse(g));
            }
        }
        let names = if names.len() == n {
            names
        } else {
            (0..n).map(|i| format!("g{i}")).collect()
        };
        Ok(GroupAlgebra { name: name.into(), table, names, unit, window })
    }

    pub fn from_spec(spec: GroupSpec, window: Window) -> Result<Self, GroupError> {
        Self::new(spec.name.clone(), spec.elements, spec.table, window)
    }

    pub fn from_toml(text: &str, window: Window) -> Result<Self, String> {
        let spec: GroupSpec = toml::from_str(text).map_err(|e| e.to_string())?;
        Self::from_spec(spec, window).map_err(|e| e.to_string())
    }

    /// The symmetric group S₃ as permutations of `{0,1,2}` in one-line
    /// notation `012, 120, 201, 021, 102, 210`.
    pub fn s3(window: Window) -> Self {
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [1, 0, 2], [2, 1, 0]];
        let idx = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut table = vec![vec![0usize; 6]; 6];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                // (p∘q)(x) = p(q(x))
                let composed = [p[q[0]], p[q[1]], p[q[2]]];
                table[i][j] = idx(&composed);
            }
        }
        let names = perms.iter().map(|p| format!("({}{}{})", p[0], p[1], p[2])).collect();
        Self::new("K[S3]", names, table, window).expect("S3 is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }
}

impl HopfAlgebroid for GroupAlgebra {
    type HKey = usize;
    type RElem = HSeries;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn window(&self) -> Window {
        self.window
    }

    fn r_zero(&self) -> HSeries {
        HSeries::zero(self.window)
    }
    fn r_one(&self) -> HSeries {
        HSeries::one(self.window)
    }
    fn r_add(&self, a: &HSeries, b: &HSeries) -> HSeries {
        a.add(b)
    }
    fn r_scale(&self, c: &HSeries, a: &HSeries) -> HSeries {
        a.mul(c)
    }
    fn r_mul(&self, a: &HSeries, b: &HSeries) -> HSeries {
        a.mul(b)
    }
    fn r_eq(&self, a: &HSeries, b: &HSeries) -> bool {
        a == b
    }
    fn r_order_part(&self, a: &HSeries, k: i64) -> HSeries {
        HSeries::monomial(a.coeff(k), 0, a.window())
    }
    fn r_fmt(&self, a: &HSeries) -> String {
        a.to_string()
    }
    fn r_random(&self, bound: &SizeBound, rng: &mut dyn RngCore) -> HSeries {
        random_series(rng, bound, self.window)
    }
    fn r_basis(&self, _bound: &SizeBound) -> Vec<HSeries> {
        vec![HSeries::one(self.window)]
    }

    fn h_unit(&self) -> LinComb<usize> {
        LinComb::term(self.unit, HSeries::one(self.window))
    }

    fn h_mul(&self, a: &usize, b: &usize) -> LinComb<usize> {
        LinComb::term(self.table[*a][*b], HSeries::one(self.window))
    }

    fn alpha(&self, a: &HSeries) -> LinComb<usize> {
        LinComb::term(self.unit, a.clone())
    }

    fn beta(&self, a: &HSeries) -> LinComb<usize> {
        self.alpha(a)
    }

    fn coproduct(&self, h: &usize) -> Tensor<usize, HSeries> {
        Tensor::Words(2, LinComb::term(vec![*h, *h], HSeries::one(self.window)))
    }

    fn counit(&self, _h: &usize) -> HSeries {
        HSeries::one(self.window)
    }

    fn act(&self, _h: &usize, a: &HSeries) -> HSeries {
        a.clone()
    }

    fn h_basis(&self, _bound: &SizeBound) -> Vec<usize> {
        (0..self.order()).collect()
    }

    fn key_fmt(&self, k: &usize) -> String {
        self.names[*k].clone()
    }

    fn normalize(&self, _arity: usize, words: WordSum<usize>) -> WordSum<usize> {
        // R = K is central, so I_n = 0 and the plain tensor words are
        // already canonical.
        words
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{delta_power, gamma, insert, t_eq, t_fmt, Tensor};

    fn model() -> GroupAlgebra {
        GroupAlgebra::s3(Window::power(0))
    }

    #[test]
    fn grouplike_iterated_coproduct() {
        let m = model();
        let g = LinComb::term(1usize, HSeries::one(m.window));
        let d2 = delta_power(&m, &g, 3);
        let expect = Tensor::Words(3, LinComb::term(vec![1, 1, 1], HSeries::one(m.window)));
        assert!(t_eq(&m, &d2, &expect), "Δ²(g) = g⊗g⊗g, got {}", t_fmt(&m, &d2));
    }

    #[test]
    fn grouplike_insert_is_diagonal() {
        let m = model();
        let g = LinComb::term(2usize, HSeries::one(m.window));
        let u = Tensor::Words(2, LinComb::term(vec![1, 4], HSeries::one(m.window)));
        let got = insert(&m, &g, &u);
        let expect = Tensor::Words(
            2,
            LinComb::term(vec![m.table[2][1], m.table[2][4]], HSeries::one(m.window)),
        );
        assert!(t_eq(&m, &got, &expect), "insert(g, u₁⊗u₂) = gu₁⊗gu₂");
    }

    #[test]
    fn gamma_of_unit_tensor_is_concat() {
        let m = model();
        let one = HSeries::one(m.window);
        let x = Tensor::Words(2, LinComb::term(vec![m.unit, m.unit], one.clone()));
        let u = Tensor::Words(1, LinComb::term(vec![3usize], one.clone()));
        let v = Tensor::Words(2, LinComb::term(vec![1usize, 5usize], one.clone()));
        let got = gamma(&m, &x, &[u, v]);
        let expect = Tensor::Words(3, LinComb::term(vec![3usize, 1, 5], one));
        assert!(t_eq(&m, &got, &expect), "γ(1⊗1; u, v) = u ⊗_R v");
    }
}
