//! Exact symbolic computation with non-symmetric operads, brace B-infinity
//! algebras, Hopf algebroids, twistors, and PBW/Gutt star products.
//!
//! Everything is computed over arbitrary-precision rationals and truncated
//! Laurent series in the formal parameter `h` (written `ℏ` in the docs), so
//! every identity the test suites assert is checked *exactly*, coefficient by
//! coefficient, with no floating point anywhere.
//!
//! The main entry points:
//!
//! * [`coeff`] — rationals and the truncated series scalar [`coeff::HSeries`].
//! * [`operad`] — the non-symmetric operad contract and its axiom suite.
//! * [`brace`] — the Gerstenhaber–Voronov braces on `W_P = ⊕ P(n)[-n]` and the
//!   brace B∞ axiom suite.
//! * [`hopf`] — Hopf algebroids, their tensor powers, the operad `P_H`, the
//!   canonical brace B∞ algebra, and three concrete models.
//! * [`twist`] — twistors, twisted Hopf algebroids, `F♯`, and the two types of
//!   twisted brace B∞ algebras.
//! * [`liepair`] — universal enveloping algebras of Lie algebra pairs,
//!   invariant chains, the operad `P_(g,l)` and the algebra `W_(g,l)`.
//! * [`qgroupoid`] — the quantum groupoid `U(g) ⊗ D[[ℏ]]`, the PBW and Gutt
//!   star products and their twistors.
//! * [`embed`] — the embedding `c : W_(g,l) → B∞(H_(g,l))((ℏ))` and the
//!   dynamical-twist ↔ twistor correspondence.
//!
//! See the book under `book/` (rendered with mdBook) for a guided tour; its
//! code listings are compiled as doc-tests through the [`guide`] module.

pub mod brace;
pub mod coeff;
pub mod embed;
pub mod guide;
pub mod hopf;
pub mod liepair;
pub mod linear;
pub mod mutation;
pub mod operad;
pub mod qgroupoid;
pub mod report;
pub mod sample;
pub mod twist;
pub mod weyl;

pub use coeff::{HSeries, Rational, Window};
pub use report::Report;
