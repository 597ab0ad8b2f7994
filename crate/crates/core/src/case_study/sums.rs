//! Certified values at a fixed `n` of the partial sums that the explicit
//! bounds are meant to dominate.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::sigma::SigmaTable;
use crate::exact::{int, Exponent, Rat};
use crate::expansion::KPoly;
use crate::interval::Interval;

/// Exact part `S(n,k)` at fixed `n` as a polynomial in `k`.
#[derive(Clone, Debug)]
pub struct ExactPart {
    /// `coeffs[a]` encloses the coefficient of `k^a`.
    coeffs: Vec<Interval>,
    /// `sum |coeffs|`, for tail estimates.
    abs_sum: Interval,
}

impl ExactPart {
    pub fn at(terms: &[(KPoly, Exponent)], n: u64) -> ExactPart {
        let deg = terms.iter().filter_map(|(p, _)| p.max_degree()).max().unwrap_or(0) as usize;
        let mut exact = vec![Rat::zero(); deg + 1];
        let nn = int(n as i64);
        for (p, q) in terms {
            assert!(q.is_integer(), "S(n,k) with a fractional power of n");
            let pw = num_traits::pow::pow(nn.clone(), q.numer().unsigned_abs() as usize);
            let pw = if *q.numer() < 0 { pw.recip() } else { pw };
            for (a, c) in p.iter() {
                exact[a as usize] += c * &pw;
            }
        }
        let coeffs: Vec<Interval> = exact.iter().map(Interval::from_rat).collect();
        let abs_sum = coeffs.iter().fold(Interval::zero(), |acc, c| acc.add(&c.abs()));
        ExactPart { coeffs, abs_sum }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, k: &Interval) -> Interval {
        self.coeffs.iter().rev().fold(Interval::zero(), |acc, c| acc.mul(k).add(c))
    }
}

/// Smallest integer `k >= 1` with `k^b >= n^a`, i.e. `k >= n^(a/b)`.
pub fn ceil_power(n: u64, e: Exponent) -> u64 {
    let (a, b) = (*e.numer() as u32, *e.denom() as u32);
    let target = BigInt::from(n).pow(a);
    let mut k = (n as f64).powf(a as f64 / b as f64).floor().max(1.0) as u64;
    while k > 1 && BigInt::from(k - 1).pow(b) >= target {
        k -= 1;
    }
    while BigInt::from(k).pow(b) < target {
        k += 1;
    }
    k
}

/// Partial sums at one `n`, with `P(n,k) = (k^2-3n+2)(2k^2-n)`,
/// `r_k = C(2n,n-k)/C(2n,n)` and `g_k = e^(-k^2/n)`.
#[derive(Clone, Debug)]
pub struct PartialSums {
    pub n: u64,
    /// `sum_{n/2 < k <= n} k sigma P r_k`.
    pub large_k: Interval,
    /// `sum_{n^alpha <= k <= n/2} k sigma P r_k`.
    pub mid_k: Interval,
    /// `sum_{k < n^alpha} k sigma P (r_k - S g_k)`.
    pub expansion_error: Interval,
    /// `sum_{n^alpha <= k < n^(3/4)} k sigma S P g_k`.
    pub completion_mid: Interval,
    /// `sum_{k >= n^(3/4)} k sigma S P g_k`.
    pub completion_tail: Interval,
    /// `sum_{k >= 1} k sigma S P g_k`.
    pub completed: Interval,
    /// `F(n)/C(2n,n) = sum_{k <= n} k sigma P r_k`.
    pub normalized_f: Interval,
}

impl PartialSums {
    pub fn compute(n: u64, alpha: Exponent, exact: &[(KPoly, Exponent)], table: &SigmaTable) -> PartialSums {
        assert!(table.len() as u64 >= n, "sigma table too short");
        let s = ExactPart::at(exact, n);
        let k_alpha = ceil_power(n, alpha);
        let k_34 = ceil_power(n, Exponent::new(3, 4));
        let nn = Interval::from_int(n as i64);
        let step = nn.recip().scale(&int(-2)).exp();
        let mut q = nn.recip().neg().exp();
        let mut g = Interval::one();
        let mut r = Interval::one();
        let zero = Interval::zero;
        let (mut large_k, mut mid_k, mut expansion_error) = (zero(), zero(), zero());
        let (mut completion_mid, mut completion_tail, mut completed, mut normalized_f) = (zero(), zero(), zero(), zero());
        for k in 1..=n {
            let ki = Interval::from_int(k as i64);
            // r_k = r_{k-1} (n-k+1)/(n+k); g_k = g_{k-1} e^(-(2k-1)/n)
            r = r.mul(&Interval::from_int((n - k + 1) as i64)).div(&Interval::from_int((n + k) as i64));
            g = g.mul(&q);
            q = q.mul(&step);
            let (kk, ni) = (k as i128, n as i128);
            let w = k as i128 * table.get(k as usize) as i128 * (kk * kk - 3 * ni + 2) * (2 * kk * kk - ni);
            let w = Interval::from_bigint(&BigInt::from(w));
            let binom = w.mul(&r);
            let gauss = w.mul(&s.eval(&ki)).mul(&g);
            normalized_f = normalized_f.add(&binom);
            completed = completed.add(&gauss);
            if 2 * k > n {
                large_k = large_k.add(&binom);
            } else if k >= k_alpha {
                mid_k = mid_k.add(&binom);
            } else {
                expansion_error = expansion_error.add(&binom.sub(&gauss));
            }
            if k >= k_34 {
                completion_tail = completion_tail.add(&gauss);
            } else if k >= k_alpha {
                completion_mid = completion_mid.add(&gauss);
            }
        }
        // k > n: |k sigma S P g| <= 3 |S|_1 k^(D+7) e^(-k^2/n) =: f(k), and
        // f(k+1)/f(k) <= rho = e^((D+7)/n - 2) <= 1/2, so the rest is <= f(n)
        let j = s.degree() as u32 + 7;
        let rho = Interval::from_rat(&(Rat::new(BigInt::from(j), BigInt::from(n)) - int(2))).exp();
        assert!(rho.hi_rat() <= Rat::new(1.into(), 2.into()), "tail ratio too large");
        let f = s.abs_sum.scale(&int(3)).mul(&nn.powi(j)).mul(&nn.neg().exp());
        let tail = Interval::new(f.hi().neg(), f.hi().clone());
        completed = completed.add(&tail);
        completion_tail = completion_tail.add(&tail);
        PartialSums { n, large_k, mid_k, expansion_error, completion_mid, completion_tail, completed, normalized_f }
    }
}

/// `[lo, hi]` of an interval as `f64`, for reports.
pub fn bounds_f64(x: &Interval) -> [f64; 2] {
    [x.lo_f64(), x.hi_f64()]
}

/// A quantity checked against the value of its bound.
#[derive(Clone, Debug, Serialize)]
pub struct SoundnessRow {
    pub name: String,
    pub n: u64,
    /// Enclosure of the bounded quantity (absolute value for signed sums).
    pub quantity: [f64; 2],
    pub bound: [f64; 2],
    /// `ln(bound) - ln(quantity)` at the endpoints, `None` when the
    /// quantity may be 0.
    pub log_margin: Option<f64>,
    pub holds: bool,
}

impl SoundnessRow {
    pub fn new(name: &str, n: u64, quantity: &Interval, bound: &Interval) -> SoundnessRow {
        let q = quantity.abs();
        let holds = q.hi_rat() <= bound.lo_rat();
        let log_margin = if q.is_positive() { Some(bound.ln().sub(&q.ln()).lo_f64()) } else { None };
        SoundnessRow { name: name.to_string(), n, quantity: bounds_f64(&q), bound: bounds_f64(bound), log_margin, holds }
    }
}
