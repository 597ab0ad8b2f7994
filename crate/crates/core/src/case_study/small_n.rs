//! Exact and interval verification of `F(n) < 0` for small `n`, and the
//! Dyck path counts `a_n` behind it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::sigma::SigmaTable;
use crate::exact::binomial;
use crate::interval::F64Interval;

/// `a_n = sum_{k=1}^{n+1} 4 k sigma(k) (2k^2 - 3n - 2) (2n-1)! / ((n+1-k)! (n+1+k)!)`,
/// computed as `sum 4 k sigma(k) (2k^2 - 3n - 2) C(2n+2, n+1-k) / ((2n)(2n+1)(2n+2))`.
pub fn a_n_formula(n: u64, table: &SigmaTable) -> BigInt {
    assert!(n >= 1, "a_n needs n >= 1");
    let n1 = n + 1;
    let mut sum = BigInt::zero();
    for k in 1..=n1 {
        let c = BigInt::from(4 * k) * table.big(k as usize) * BigInt::from(2 * (k as i64).pow(2) - 3 * n as i64 - 2);
        sum += c * binomial(2 * n1, n1 - k);
    }
    let den = BigInt::from(2 * n) * BigInt::from(2 * n + 1) * BigInt::from(2 * n + 2);
    let (q, r) = sum.div_rem(&den);
    assert!(r.is_zero(), "a_{n} is not an integer");
    q
}

/// Dyck paths of length `2n` with a unique peak of maximum height, by
/// dynamic programming over (height, maximum so far, peaks at the maximum
/// capped at 2, last step up).
pub fn a_n_oracle(n: u32) -> u128 {
    dyck_counts(n).0
}

/// All Dyck paths of length `2n`, counted by the same recursion.
pub fn dyck_total(n: u32) -> u128 {
    dyck_counts(n).1
}

fn dyck_counts(n: u32) -> (u128, u128) {
    assert!(n <= 30, "the path DP is meant for n <= 30");
    let n = n as usize;
    let dim = n + 2;
    let idx = |h: usize, m: usize, c: usize, up: usize| ((h * dim + m) * 3 + c) * 2 + up;
    let mut cur = vec![0u128; dim * dim * 6];
    cur[idx(0, 0, 0, 0)] = 1;
    for step in 0..2 * n {
        let mut next = vec![0u128; cur.len()];
        let left = 2 * n - step - 1;
        for h in 0..=n {
            for m in h..=n {
                for c in 0..3 {
                    for up in 0..2 {
                        let w = cur[idx(h, m, c, up)];
                        if w == 0 {
                            continue;
                        }
                        if h < left && h < n {
                            let (m2, c2) = if h + 1 > m { (h + 1, 0) } else { (m, c) };
                            next[idx(h + 1, m2, c2, 1)] += w;
                        }
                        if h > 0 {
                            let c2 = if up == 1 && h == m { (c + 1).min(2) } else { c };
                            next[idx(h - 1, m, c2, 0)] += w;
                        }
                    }
                }
            }
        }
        cur = next;
    }
    let mut unique = 0;
    let mut total = 0;
    for m in 0..=n {
        for c in 0..3 {
            let w = cur[idx(0, m, c, 0)];
            total += w;
            if c == 1 {
                unique += w;
            }
        }
    }
    (unique, total)
}

pub fn catalan(n: u64) -> BigInt {
    binomial(2 * n, n) / BigInt::from(n + 1)
}

fn summand_weight(n: u64, k: u64, table: &SigmaTable) -> i128 {
    let (n, k) = (n as i128, k as i128);
    k * table.get(k as usize) as i128 * (k * k - 3 * n + 2) * (2 * k * k - n)
}

/// `F(n) = sum_{k=1}^n k sigma(k) (k^2 - 3n + 2) (2k^2 - n) C(2n, n-k)`.
pub fn f_exact(n: u64, table: &SigmaTable) -> BigInt {
    assert!(n >= 1, "F needs n >= 1");
    let mut b = binomial(2 * n, n);
    let mut sum = BigInt::zero();
    for k in 1..=n {
        // C(2n, n-k) = C(2n, n-k+1) (n-k+1) / (n+k)
        b = b * BigInt::from(n - k + 1) / BigInt::from(n + k);
        sum += BigInt::from(summand_weight(n, k, table)) * &b;
    }
    sum
}

/// Interval enclosure of `F(n) / C(2n, n)` using `r_k = C(2n, n-k)/C(2n, n)`.
pub fn normalized_f(n: u64, table: &SigmaTable) -> F64Interval {
    let nf = n as f64;
    let mut r = F64Interval::point(1.0);
    let mut sum = F64Interval::point(0.0);
    for k in 1..=n {
        let kf = k as f64;
        r = r.mul(F64Interval::point(nf - kf + 1.0)).div_pos(F64Interval::point(nf + kf));
        sum = sum.add(F64Interval::from_i128(summand_weight(n, k, table)).mul(r));
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMethod {
    Interval,
    Exact,
    /// Interval straddles 0 and no fallback was requested.
    Inconclusive,
}

impl SweepMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMethod::Interval => "interval",
            SweepMethod::Exact => "exact",
            SweepMethod::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: u64,
    /// Certified upper bound of `F(n) / C(2n, n)`.
    pub upper_bound: f64,
    pub method: SweepMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub n_min: u64,
    pub n_max: u64,
    pub rows: Vec<SweepRow>,
    /// `n` with a certified `F(n) >= 0`.
    pub violations: Vec<u64>,
    pub inconclusive: Vec<u64>,
    pub exact_fallbacks: usize,
}

impl SweepReport {
    pub fn certified(&self) -> bool {
        self.violations.is_empty() && self.inconclusive.is_empty()
    }
}

/// Certifies `F(n) < 0` for `n_min <= n <= n_max`; rows are ordered by `n`
/// whatever the thread count.
pub fn f_sign_sweep(n_min: u64, n_max: u64, table: &SigmaTable, exact_fallback: bool) -> SweepReport {
    use rayon::prelude::*;
    assert!(n_min >= 1 && n_min <= n_max, "empty or invalid range");
    assert!(table.len() as u64 >= n_max, "sigma table too short");
    let rows: Vec<(SweepRow, bool)> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let iv = normalized_f(n, table);
            if iv.is_negative() {
                return (SweepRow { n, upper_bound: iv.hi, method: SweepMethod::Interval }, false);
            }
            if !exact_fallback {
                return (SweepRow { n, upper_bound: iv.hi, method: SweepMethod::Inconclusive }, false);
            }
            let f = f_exact(n, table);
            let ratio = num_rational::BigRational::new(f.clone(), binomial(2 * n, n));
            let up = crate::exact::round_up(&ratio, Some(12));
            let upper = up.to_f64().unwrap_or(f64::INFINITY);
            (SweepRow { n, upper_bound: upper, method: SweepMethod::Exact }, !f.is_negative())
        })
        .collect();
    let violations = rows.iter().filter(|(_, bad)| *bad).map(|(r, _)| r.n).collect();
    let inconclusive = rows.iter().filter(|(r, _)| r.method == SweepMethod::Inconclusive).map(|(r, _)| r.n).collect();
    let exact_fallbacks = rows.iter().filter(|(r, _)| r.method == SweepMethod::Exact).count();
    SweepReport {
        n_min,
        n_max,
        rows: rows.into_iter().map(|(r, _)| r).collect(),
        violations,
        inconclusive,
        exact_fallbacks,
    }
}

/// `(4n+2) a_n - (n+2) a_{n+1}`.
pub fn monotonicity_gap(n: u64, table: &SigmaTable) -> BigInt {
    BigInt::from(4 * n + 2) * a_n_formula(n, table) - BigInt::from(n + 2) * a_n_formula(n + 1, table)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub n_max: u64,
    pub checked: u64,
    pub violations: Vec<u64>,
}

/// Checks `(4n+2) a_n > (n+2) a_{n+1}` exactly for `3 <= n <= n_max`.
pub fn monotonicity_check(n_max: u64, table: &SigmaTable) -> MonotonicityReport {
    use rayon::prelude::*;
    assert!(n_max >= 3, "monotonicity starts at n = 3");
    let violations: Vec<u64> =
        (3..=n_max).into_par_iter().filter(|&n| !monotonicity_gap(n, table).is_positive()).collect();
    MonotonicityReport { n_max, checked: n_max - 2, violations }
}
