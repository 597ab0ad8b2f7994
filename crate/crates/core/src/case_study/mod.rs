//! The divisor-sum inequality: exact small-n verification and the explicit
//! asymptotic bound for large n.

pub mod bounds;
pub mod ratio;
pub mod sigma;
pub mod small_n;
pub mod sums;
pub mod theorem;

use thiserror::Error;

use crate::exact::{int, rat, Exponent, Rat};
use crate::mellin::{KnPoly, MellinError};

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("robin: {0}")]
    Robin(#[from] sigma::RobinError),
    #[error("expansion: {0}")]
    Ratio(#[from] ratio::RatioError),
    #[error("mellin: {0}")]
    Mellin(#[from] MellinError),
    #[error("bounds: {0}")]
    Bound(#[from] bounds::BoundError),
}

impl CaseError {
    pub fn stage(&self) -> &'static str {
        match self {
            CaseError::Robin(_) => "robin",
            CaseError::Ratio(_) => "expansion",
            CaseError::Mellin(_) => "mellin",
            CaseError::Bound(_) => "bounds",
        }
    }
}

/// `k (k^2 - 3n + 2)(2k^2 - n)`, the factor next to `sigma(k)` in every summand.
pub fn multiplier() -> KnPoly {
    KnPoly::from_terms([(5, 0, int(2)), (3, 1, int(-7)), (1, 2, int(3)), (3, 0, int(4)), (1, 1, int(-2))])
}

/// Parameters of the large-n analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseConfig {
    /// Threshold from which all explicit bounds are claimed.
    pub n0: u64,
    /// Split exponent: the central range is `k < n^alpha_split`.
    pub alpha_split: Exponent,
    /// Upper exponent of the expansion ring (`k <= n^beta`).
    pub beta: Exponent,
    /// First odd power left out of the exponent series.
    pub cutoff_r: u32,
    /// Decimal digits for rounding B-term constants.
    pub round_digits: u32,
    /// Taylor order of the exponential factor.
    pub exp_order: u32,
    /// Taylor order of the geometric factor `n/(n-k)`.
    pub geometric_order: u32,
    /// Robin-type constant with `sigma(k) <= a * k * log log k`.
    pub robin_a: Rat,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            n0: 10_000,
            alpha_split: Exponent::new(7, 10),
            beta: Exponent::new(7, 10),
            cutoff_r: 9,
            round_digits: 4,
            exp_order: 6,
            geometric_order: 6,
            robin_a: rat(52, 25),
        }
    }
}

impl CaseConfig {
    pub fn n0_rat(&self) -> Rat {
        int(self.n0 as i64)
    }
}
