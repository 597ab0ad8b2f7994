//! Asymptotic expansions in `n` whose coefficients depend polynomially on a
//! second variable `k` with `n^alpha <= k <= n^beta`, together with explicit
//! error terms, certified interval numerics for zeta/gamma, a Mellin-transform
//! remainder pipeline, and the divisor-sum case study built on top of them.

pub mod exact;
pub mod expansion;
pub mod taylor;
pub mod interval;
pub mod special;
pub mod quad;
pub mod mellin;
pub mod case_study;

pub use expansion::{Expansion, GrowthRange, KPoly, RingConfig, Term};
pub use interval::{ComplexInterval, Interval};

