//! Bounds of the shape `C n^q e^(e n^gamma) (log log n)^m` and the chains
//! that produce the explicit error constants of the large-n analysis.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use super::CaseConfig;
use crate::exact::{exp_bounds, exp_to_rat, fmt_exponent, fmt_rat, int, pow_lower, pow_upper, rat, round_up, Exponent, Rat};
use crate::expansion::{KPoly, Term};
use crate::interval::Interval;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("{what} does not collapse onto {target} for n >= {n0}: {reason}")]
    Collapse { what: String, target: String, n0: u64, reason: String },
    #[error("side condition failed: {0}")]
    SideCondition(String),
    #[error("T = n^{tau} lies in the increasing regime of t^{j} e^(-t^2/n) at n = {n0}")]
    Increasing { j: u32, tau: String, n0: u64 },
    #[error("S(n,k) is unbounded for k <= n^(3/4): term {0}")]
    Unbounded(String),
}

/// `C n^q e^(e n^gamma) (log log n)^m` with `C >= 0`, `e <= 0`, `gamma > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundExpr {
    pub c: Rat,
    pub q: Exponent,
    pub e: Rat,
    pub gamma: Exponent,
    pub m: u32,
}

impl BoundExpr {
    pub fn power(c: Rat, q: Exponent) -> BoundExpr {
        assert!(!c.is_negative(), "bound constants are non-negative");
        BoundExpr { c, q, e: Rat::zero(), gamma: Exponent::one(), m: 0 }
    }

    pub fn with_exp(mut self, e: Rat, gamma: Exponent) -> BoundExpr {
        assert!(!e.is_positive() && gamma > Exponent::zero(), "need e <= 0 < gamma");
        self.e = e;
        self.gamma = if self.e.is_zero() { Exponent::one() } else { gamma };
        self
    }

    pub fn with_loglog(mut self, m: u32) -> BoundExpr {
        self.m = m;
        self
    }

    pub fn scale(&self, f: &Rat) -> BoundExpr {
        BoundExpr { c: &self.c * f, ..self.clone() }
    }

    pub fn times_n(&self, q: Exponent) -> BoundExpr {
        BoundExpr { q: self.q + q, ..self.clone() }
    }

    /// Same growth, constant 1.
    pub fn shape(&self) -> BoundExpr {
        BoundExpr { c: Rat::one(), ..self.clone() }
    }

    /// Enclosure of the value at `n >= 16`.
    pub fn eval(&self, n: u64) -> Interval {
        let nn = Interval::from_int(n as i64);
        let ln = nn.ln();
        let mut v = Interval::from_rat(&self.c).mul(&ln.mul(&Interval::from_rat(&exp_to_rat(self.q))).exp());
        if !self.e.is_zero() {
            let pw = ln.mul(&Interval::from_rat(&exp_to_rat(self.gamma))).exp();
            v = v.mul(&pw.mul(&Interval::from_rat(&self.e)).exp());
        }
        if self.m > 0 {
            v = v.mul(&ln.ln().powi(self.m));
        }
        v
    }

    /// Upper bound of `sup_{n >= n0} self(n) / target(n)`, using
    /// `log log n <= n^(1/10)` for surplus log log factors.
    pub fn sup_ratio(&self, target: &BoundExpr, n0: u64) -> Result<Rat, BoundError> {
        let fail = |reason: &str| BoundError::Collapse {
            what: self.to_string(),
            target: target.shape().to_string(),
            n0,
            reason: reason.to_string(),
        };
        if self.c.is_zero() {
            return Ok(Rat::zero());
        }
        let n = int(n0 as i64);
        let mut p = exp_to_rat(self.q - target.q);
        let mut factor = target.c.recip();
        if self.m > target.m {
            loglog_power_check(n0).map_err(|r| fail(&r))?;
            p += rat((self.m - target.m) as i64, 10);
        } else if self.m < target.m {
            let ll = Interval::from_int(n0 as i64).ln().ln();
            if !ll.is_positive() {
                return Err(fail("log log n0 is not positive"));
            }
            factor *= ll.lo_rat().recip().pow((target.m - self.m) as i32);
        }
        let (eps, gamma) = match (self.e.is_zero(), target.e.is_zero()) {
            (true, true) => (Rat::zero(), Exponent::one()),
            (false, true) => (self.e.clone(), self.gamma),
            (true, false) => return Err(fail("the target decays exponentially, the bound does not")),
            (false, false) => {
                if self.gamma != target.gamma {
                    return Err(fail("different exponential scales"));
                }
                (&self.e - &target.e, self.gamma)
            }
        };
        if eps.is_positive() {
            return Err(fail("exponential growth relative to the target"));
        }
        let p_exp = rat_exponent(&p);
        let sup = if eps.is_zero() {
            if p.is_positive() {
                return Err(fail("positive surplus power of n"));
            }
            pow_upper(&n, p_exp)
        } else {
            // d/dn log = (p - |eps| gamma n^gamma)/n, negative from n0 on
            let ng = pow_lower(&n, gamma);
            if p > -&eps * exp_to_rat(gamma) * &ng {
                return Err(fail("not decreasing from n0"));
            }
            pow_upper(&n, p_exp) * exp_bounds(&(&eps * &ng)).1
        };
        Ok(&self.c * sup * factor)
    }
}

fn rat_exponent(p: &Rat) -> Exponent {
    Exponent::new(p.numer().to_i64().expect("small exponent"), p.denom().to_i64().expect("small exponent"))
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rat(&self.c))?;
        if !self.e.is_zero() {
            let arg = if self.gamma.is_one() { "n".to_string() } else { format!("n^({})", fmt_exponent(self.gamma)) };
            write!(f, "*e^(({})*{arg})", fmt_rat(&self.e))?;
        }
        if !self.q.is_zero() {
            write!(f, "*n^({})", fmt_exponent(self.q))?;
        }
        match self.m {
            0 => Ok(()),
            1 => write!(f, "*log(log(n))"),
            m => write!(f, "*log(log(n))^{m}"),
        }
    }
}

impl Serialize for BoundExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundExpr", 7)?;
        st.serialize_field("expr", &self.to_string())?;
        st.serialize_field("c", &fmt_rat(&self.c))?;
        st.serialize_field("c_decimal", &crate::exact::to_decimal(&self.c, 6))?;
        st.serialize_field("q", &fmt_exponent(self.q))?;
        st.serialize_field("e", &fmt_rat(&self.e))?;
        st.serialize_field("gamma", &fmt_exponent(self.gamma))?;
        st.serialize_field("m", &self.m)?;
        st.end()
    }
}

/// Sum of bounds collapsed onto the shape of `target`, rounded up.
pub fn collapse(parts: &[BoundExpr], target: &BoundExpr, n0: u64, digits: Option<u32>) -> Result<BoundExpr, BoundError> {
    let mut c = Rat::zero();
    for p in parts {
        c += p.sup_ratio(target, n0)?;
    }
    Ok(BoundExpr { c: round_up(&c, digits), ..target.shape() })
}

/// Certifies `log log n <= n^(1/10)` for every `n >= n0`: it holds at `n0`
/// and the difference increases once `n^(1/10) log n >= 10`.
pub fn loglog_power_check(n0: u64) -> Result<(), String> {
    let n = Interval::from_int(n0 as i64);
    let ln = n.ln();
    let tenth = ln.scale(&rat(1, 10)).exp();
    if !(ln.ln().hi_rat() <= tenth.lo_rat()) {
        return Err(format!("log log {n0} > {n0}^(1/10)"));
    }
    if !(tenth.mul(&ln).lo_rat() >= int(10)) {
        return Err(format!("n^(1/10) - log log n is not increasing from {n0}"));
    }
    Ok(())
}

fn gamma_half(j: u32) -> Interval {
    // Gamma((j+1)/2)
    if j % 2 == 1 {
        let m = j.div_ceil(2);
        Interval::from_bigint(&crate::exact::factorial(m - 1))
    } else {
        // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
        let m = j / 2;
        let num = crate::exact::factorial(2 * m);
        let den = num_bigint::BigInt::from(4).pow(m) * crate::exact::factorial(m);
        Interval::from_bigint(&num).div(&Interval::from_bigint(&den)).mul(&Interval::pi().sqrt())
    }
}

/// Bounds for `sum_k k^j e^(-k^2/n)` as a sum of shapes in `n`.
///
/// Without `tau`: the sum over `k >= 1` is at most `f(t0) + int_0^inf`, with
/// `t0 = sqrt(j n/2)` the maximum of `f(t) = t^j e^(-t^2/n)`.
/// With `tau` (`T = n^tau`): the sum over `k >= T` is at most
/// `f(T) + int_T^inf` once `T >= t0`. Odd `j` integrate in closed form,
/// even `j` use `t^j <= t^(j+1)/T` first.
pub fn gaussian_sum_bound(j: u32, tau: Option<Exponent>, n0: u64) -> Result<Vec<BoundExpr>, BoundError> {
    let up = |x: Interval| x.hi_rat();
    let Some(tau) = tau else {
        let peak = if j == 0 {
            Rat::one()
        } else {
            let h = rat(j as i64, 2);
            let pw = Interval::from_rat(&h).ln().mul(&Interval::from_rat(&h)).exp();
            up(pw.mul(&Interval::from_rat(&-h).exp()))
        };
        return Ok(vec![
            BoundExpr::power(peak, Exponent::new(j as i64, 2)),
            BoundExpr::power(up(gamma_half(j).scale(&rat(1, 2))), Exponent::new(j as i64 + 1, 2)),
        ]);
    };
    let decay = tau * 2 - 1;
    let n = int(n0 as i64);
    if decay <= Exponent::zero() || pow_lower(&n, decay) < rat(j as i64, 2) {
        return Err(BoundError::Increasing { j, tau: fmt_exponent(tau), n0 });
    }
    let gauss = |b: BoundExpr| b.with_exp(int(-1), decay);
    let mut out = vec![gauss(BoundExpr::power(Rat::one(), tau * j as i64))];
    let (odd, extra) = if j % 2 == 1 { (j, Exponent::zero()) } else { (j + 1, -tau) };
    let m = (odd - 1) / 2;
    // int_T^inf t^(2m+1) e^(-t^2/n) dt = (n/2) sum_i m!/(m-i)! n^i T^(2(m-i)) e^(-T^2/n)
    let mut falling = num_bigint::BigInt::one();
    for i in 0..=m {
        if i > 0 {
            falling *= num_bigint::BigInt::from(m - i + 1);
        }
        let q = Exponent::from_integer(1 + i as i64) + tau * (2 * (m - i) as i64) + extra;
        out.push(gauss(BoundExpr::power(Rat::from_integer(falling.clone()) / int(2), q)));
    }
    Ok(out)
}

/// `sum_{n/2 < k <= n} k^6 <= n^7/4` for one `n`, exactly.
pub fn power_sum_holds(n: u64) -> bool {
    let s: num_bigint::BigInt = (n / 2 + 1..=n).map(|k| num_bigint::BigInt::from(k).pow(6)).sum();
    s * 4 <= num_bigint::BigInt::from(n).pow(7)
}

/// The two pruned tails of the sum.
#[derive(Clone, Debug, Serialize)]
pub struct PruneBounds {
    /// `n/2 < k <= n`.
    pub large_k: BoundExpr,
    /// `n^alpha <= k <= n/2`.
    pub mid_k: BoundExpr,
    pub mid_k_parts: Vec<BoundExpr>,
}

/// Side conditions on `(n0, alpha)`: `k^2 >= 3n` for `k >= n^alpha`, and
/// `sum_{n/2<k<=n} k^6 <= n^7/4` via `int_{n/2}^{n+1} t^6 dt`, which is
/// decreasing in `n` relative to `n^7`.
pub fn prune_side_conditions(cfg: &CaseConfig) -> Result<(), BoundError> {
    let n = cfg.n0_rat();
    let two_alpha = cfg.alpha_split * 2 - 1;
    if two_alpha <= Exponent::zero() || pow_lower(&n, two_alpha) < int(3) {
        return Err(BoundError::SideCondition(format!("k^2 >= 3n fails for k = n^alpha at n = {}", cfg.n0)));
    }
    let lhs = num_traits::pow(&n + int(1), 7) - num_traits::pow(&n / int(2), 7);
    if lhs > int(7) * num_traits::pow(n.clone(), 7) / int(4) {
        return Err(BoundError::SideCondition(format!("sum of k^6 over (n/2, n] exceeds n^7/4 at n = {}", cfg.n0)));
    }
    Ok(())
}

/// The binomial ratio is at most `2 e^(-n/4)` beyond `n/2` and at most
/// `2 e^(-k^2/n)` below, `|(k^2-3n+2)(2k^2-n)| <= 2k^4` once `k^2 >= 3n`,
/// and `sigma(k) <= A k log log n`.
pub fn prune_tail_bounds(cfg: &CaseConfig) -> Result<PruneBounds, BoundError> {
    prune_side_conditions(cfg)?;
    let a = &cfg.robin_a;
    // 4 A log log n e^(-n/4) * n^7/4
    let large_k = BoundExpr::power(a.clone(), Exponent::from_integer(7)).with_exp(rat(-1, 4), Exponent::one()).with_loglog(1);
    let four_a = a * int(4);
    let parts: Vec<BoundExpr> = gaussian_sum_bound(6, Some(cfg.alpha_split), cfg.n0)?
        .into_iter()
        .map(|b| b.scale(&four_a).with_loglog(1))
        .collect();
    let target = BoundExpr::power(Rat::one(), Exponent::new(9, 2))
        .with_exp(int(-1), cfg.alpha_split * 2 - 1)
        .with_loglog(1);
    let mid_k = collapse(&parts, &target, cfg.n0, Some(cfg.round_digits))?;
    Ok(PruneBounds { large_k, mid_k, mid_k_parts: parts })
}

/// Bound for `sum_{k < n^alpha} k sigma(k) S_B(n,k) |(k^2-3n+2)(2k^2-n)| e^(-k^2/n)`
/// using `|(k^2-3n+2)(2k^2-n)| <= 2k^4 + 3n^2`, `sigma(k) <= A k log log n`
/// and the full Gaussian sum bound for each majorant monomial.
pub fn sb_error_bound(cfg: &CaseConfig, s_b: &[Term]) -> Result<(BoundExpr, Vec<BoundExpr>), BoundError> {
    let target = BoundExpr::power(Rat::one(), Exponent::new(1, 2)).with_loglog(1);
    let mut parts = Vec::new();
    for t in s_b {
        let Term::B { majorant, q, valid_from } = t else {
            return Err(BoundError::SideCondition("S_B holds a term without an explicit constant".into()));
        };
        if *valid_from > cfg.n0 {
            return Err(BoundError::SideCondition(format!("B-term valid only from n = {valid_from}")));
        }
        for (a, c) in majorant.iter() {
            let base = c * &cfg.robin_a;
            for g in gaussian_sum_bound(a + 6, None, cfg.n0)? {
                parts.push(g.scale(&(&base * int(2))).times_n(*q).with_loglog(1));
            }
            for g in gaussian_sum_bound(a + 2, None, cfg.n0)? {
                parts.push(g.scale(&(&base * int(3))).times_n(*q + 2).with_loglog(1));
            }
        }
    }
    Ok((collapse(&parts, &target, cfg.n0, Some(cfg.round_digits))?, parts))
}

/// Completion of the exact part to all `k >= n^alpha`.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionBounds {
    /// `|S(n,k)| <= c1` for `k <= n^(3/4)`, `n >= n0`.
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub c1: Rat,
    /// `|S(n,k)| <= c1 k^D n^(-3D/4)` for `k >= n^(3/4)`.
    pub tail_degree: u32,
    /// `n^alpha <= k < n^(3/4)`.
    pub until_34: BoundExpr,
    /// `k >= n^(3/4)`.
    pub after_34: BoundExpr,
}

/// `sum_i |c_i| n0^(3 a_i/4 + q_i)` over the monomials of `S`; every
/// monomial must be bounded at `k = n^(3/4)`.
pub fn c1_bound(cfg: &CaseConfig, exact: &[(KPoly, Exponent)]) -> Result<(Rat, u32), BoundError> {
    let n = cfg.n0_rat();
    let mut c1 = Rat::zero();
    let mut degree = 0;
    for (p, q) in exact {
        for (a, c) in p.iter() {
            let e = Exponent::new(3 * a as i64, 4) + *q;
            if e > Exponent::zero() {
                return Err(BoundError::Unbounded(format!("{c} k^{a} n^({})", fmt_exponent(*q))));
            }
            c1 += c.abs() * pow_upper(&n, e);
            degree = degree.max(a);
        }
    }
    Ok((round_up(&c1, Some(cfg.round_digits)), degree))
}

/// `sigma(k) <= A k log log n` below `n^(3/4)` and `sigma(k) <= k^2` above;
/// `0 <= (k^2-3n+2)(2k^2-n) <= 2k^4` throughout since `k^2 >= 3n`.
pub fn completion_bounds(cfg: &CaseConfig, exact: &[(KPoly, Exponent)]) -> Result<CompletionBounds, BoundError> {
    prune_side_conditions(cfg)?;
    let (c1, d) = c1_bound(cfg, exact)?;
    let decay = cfg.alpha_split * 2 - 1;
    let parts: Vec<BoundExpr> = gaussian_sum_bound(6, Some(cfg.alpha_split), cfg.n0)?
        .into_iter()
        .map(|b| b.scale(&(int(2) * &cfg.robin_a * &c1)).with_loglog(1))
        .collect();
    let target = BoundExpr::power(Rat::one(), Exponent::new(19, 4)).with_exp(int(-1), decay).with_loglog(1);
    let until_34 = collapse(&parts, &target, cfg.n0, Some(cfg.round_digits))?;
    let shift = Exponent::new(-3 * d as i64, 4);
    let parts: Vec<BoundExpr> = gaussian_sum_bound(d + 7, Some(Exponent::new(3, 4)), cfg.n0)?
        .into_iter()
        .map(|b| b.scale(&(int(2) * &c1)).times_n(shift))
        .collect();
    let target = BoundExpr::power(Rat::one(), Exponent::new(11, 2)).with_exp(int(-1), Exponent::new(1, 2));
    let after_34 = collapse(&parts, &target, cfg.n0, Some(cfg.round_digits))?;
    Ok(CompletionBounds { c1, tail_degree: d, until_34, after_34 })
}

/// One bound collapsed onto `n^(3/4)`.
#[derive(Clone, Debug, Serialize)]
pub struct Collapsed {
    pub name: String,
    pub bound: BoundExpr,
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub constant: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct Combined {
    pub parts: Vec<Collapsed>,
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub mellin: Rat,
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub total: Rat,
}

/// Sum of `sup_{n >= n0} bound(n)/n^(3/4)` over all bounds plus the integral
/// constant, rounded up.
pub fn combine_errors(bounds: &[(String, BoundExpr)], mellin_c: &Rat, n0: u64, digits: Option<u32>) -> Result<Combined, BoundError> {
    let target = BoundExpr::power(Rat::one(), Exponent::new(3, 4));
    let mut parts = Vec::new();
    let mut total = mellin_c.clone();
    for (name, b) in bounds {
        let c = b.sup_ratio(&target, n0).map_err(|e| match e {
            BoundError::Collapse { target, n0, reason, .. } => BoundError::Collapse { what: name.clone(), target, n0, reason },
            other => other,
        })?;
        let c = round_up(&c, digits);
        total += &c;
        parts.push(Collapsed { name: name.clone(), bound: b.clone(), constant: c });
    }
    Ok(Combined { parts, mellin: mellin_c.clone(), total: round_up(&total, digits) })
}
