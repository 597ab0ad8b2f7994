//! Expansion of `C(2n, n-k)/C(2n, n) * e^(k^2/n)` for `1 <= k <= n^beta`.
//!
//! Writing the ratio as `n/(n-k) * prod_{j<=k} (n-j)/(n+j)` and using
//! `log((1-x)/(1+x)) = -2 sum_{r odd} x^r/r` gives
//! `e^(k^2/n) * ratio = n/(n-k) * exp(u)` with
//! `u = -k/n - sum_{3<=r<R, r odd} 2 P_r(k)/(r n^r) + tail`,
//! where `P_r` is the Faulhaber polynomial and the tail is bounded by
//! `2/(R n^R (1 - k^2/n^2)) (k^R + k^(R+1)/(R+1))`.

use num_traits::{One, Zero};

use super::CaseConfig;
use crate::exact::{int, pow_upper, rat, round_up, Exponent, Rat};
use crate::expansion::{simplify_expansion, Expansion, ExpansionError, KPoly, RingConfig, Term};
use crate::taylor::{faulhaber, taylor_with_explicit_error, Kernel, TaylorError};

#[derive(Debug, thiserror::Error)]
pub enum RatioError {
    #[error("cutoff R = {0} must be odd and at least 3")]
    Cutoff(u32),
    #[error("beta must satisfy beta < 1 for the tail estimate")]
    Beta,
    #[error(transparent)]
    Taylor(#[from] TaylorError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

pub fn ring(cfg: &CaseConfig) -> Result<RingConfig, ExpansionError> {
    Ok(RingConfig::new(Exponent::zero(), cfg.beta)?.with_round_digits(cfg.round_digits))
}

/// Upper bound of `1/(1 - k^2/n^2)` for `k <= n^beta`, `n >= n0`.
pub fn tail_denominator_bound(cfg: &CaseConfig) -> Rat {
    let x = pow_upper(&cfg.n0_rat(), (cfg.beta - Exponent::one()) * 2);
    (Rat::one() - x).recip()
}

/// B-term bounding the neglected odd powers `r >= R` of the exponent.
pub fn tail_bterm(cfg: &CaseConfig, ring: &RingConfig) -> Result<Expansion, RatioError> {
    let r = cfg.cutoff_r;
    if r < 3 || r.is_multiple_of(2) {
        return Err(RatioError::Cutoff(r));
    }
    if cfg.beta >= Exponent::one() {
        return Err(RatioError::Beta);
    }
    let lead = int(2) * tail_denominator_bound(cfg) / int(r as i64);
    let digits = Some(cfg.round_digits);
    let majorant = KPoly::from_coeffs([
        (r + 1, round_up(&(&lead / int(r as i64 + 1)), digits)),
        (r, round_up(&lead, digits)),
    ]);
    Ok(Expansion::b_term(ring, majorant, Exponent::from_integer(-(r as i64)), cfg.n0))
}

/// Exponent `u` including the tail B-term.
pub fn exponent_expansion(cfg: &CaseConfig, ring: &RingConfig) -> Result<Expansion, RatioError> {
    let mut u = Expansion::monomial(ring, KPoly::monomial(int(-1), 1), Exponent::from_integer(-1));
    let mut r = 3;
    while r < cfg.cutoff_r {
        let c = rat(-2, r as i64);
        u = u.add(&Expansion::monomial(ring, faulhaber(r).scale(&c), Exponent::from_integer(-(r as i64))));
        r += 2;
    }
    Ok(u.add(&tail_bterm(cfg, ring)?))
}

/// The full expansion `S(n,k) + S_B(n,k)` of the ratio times `e^(k^2/n)`,
/// after simplification.
pub fn binomial_ratio_expansion(cfg: &CaseConfig) -> Result<Expansion, RatioError> {
    let ring = ring(cfg)?;
    let u = exponent_expansion(cfg, &ring)?;
    let e = taylor_with_explicit_error(&Kernel::Exp, &u, cfg.exp_order, cfg.n0)?;
    let x = Expansion::monomial(&ring, KPoly::k(), Exponent::from_integer(-1));
    let g = taylor_with_explicit_error(&Kernel::Geometric, &x, cfg.geometric_order, cfg.n0)?;
    Ok(simplify_expansion(&e.mul(&g)))
}

/// Exact-term part `S` and B-term part `S_B`.
pub fn split(ex: &Expansion) -> (Vec<(KPoly, Exponent)>, Vec<Term>) {
    let exact = ex.exact_terms().map(|(c, q)| (c.clone(), q)).collect();
    let errors = ex.terms().iter().filter(|t| t.is_error()).cloned().collect();
    (exact, errors)
}
