//! Divisor sums and the explicit bound `sigma(k) <= A k log log n`.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, Rat};
use crate::interval::Interval;

/// `sigma(1..=M)`. Entries are exact as long as `M < 2^40`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaTable {
    values: Vec<u64>,
}

impl SigmaTable {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sigma(k)` for `1 <= k <= M`.
    pub fn get(&self, k: usize) -> u64 {
        assert!(k >= 1 && k < self.values.len(), "sigma({k}) outside the table");
        self.values[k]
    }

    pub fn big(&self, k: usize) -> BigInt {
        BigInt::from(self.get(k))
    }
}

/// Divisor sieve: every `d` adds itself to its multiples.
pub fn sigma_sieve(m: usize) -> SigmaTable {
    assert!(m >= 1, "sigma_sieve needs M >= 1");
    assert!(m < 1 << 40, "table entries would overflow");
    let mut values = vec![0u64; m + 1];
    for d in 1..=m {
        for j in (d..=m).step_by(d) {
            values[j] += d as u64;
        }
    }
    SigmaTable { values }
}

#[derive(Debug, Error)]
pub enum RobinError {
    #[error("N = {0} is too small: log log N must be positive")]
    SmallN(u64),
    #[error("e^gamma + 0.6483/log log N is not certified <= A: enclosure {0}")]
    Constant(String),
    #[error("sigma({k}) = {sigma} exceeds A k log log N")]
    Violation { k: u64, sigma: u64 },
}

/// Enclosure of Euler's constant from `H_m - log m` and the alternating
/// Euler-Maclaurin tail, whose error has the sign and at most the size of
/// the first omitted term.
pub fn euler_gamma() -> Interval {
    let m = 10i64;
    let h: Rat = (1..=m).map(|j| rat(1, j)).sum();
    let mf = int(m);
    let corr = rat(-1, 2 * m) + rat(1, 12 * m * m) - rat(1, 120 * m.pow(4));
    let base = Interval::from_rat(&(h + corr)).sub(&Interval::from_rat(&mf).ln());
    base.hull(&base.add(&Interval::from_rat(&rat(1, 252 * m.pow(6)))))
}

/// Outcome of the divisor-bound verification.
#[derive(Clone, Debug, Serialize)]
pub struct RobinReport {
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub a: Rat,
    pub n: u64,
    /// Enclosure of `e^gamma + 0.6483/log log N`.
    pub robin_value: [f64; 2],
    /// Largest `sigma(k) / (A k log log N)` over `1 <= k <= N`, and its `k`.
    pub worst_ratio: f64,
    pub worst_k: u64,
}

/// Checks `A >= e^gamma + 0.6483/log log N`, which covers `N <= k <= n`, and
/// `sigma(k) <= A k log log N` for every `k <= N`.
pub fn robin_constant(n: u64, a: &Rat, table: &SigmaTable) -> Result<RobinReport, RobinError> {
    if n < 16 {
        return Err(RobinError::SmallN(n));
    }
    let loglog = Interval::from_int(n as i64).ln().ln();
    let value = euler_gamma().exp().add(&Interval::from_ratio(6483, 10000).div(&loglog));
    if !(value.hi_rat() <= *a) {
        return Err(RobinError::Constant(value.to_string()));
    }
    // sigma(k) <= A k L with L the lower end of log log N
    let bound = a * loglog.lo_rat();
    let mut worst = (Rat::from_integer(0.into()), 1u64);
    for k in 1..=n {
        let s = table.get(k as usize);
        let r = Rat::new(BigInt::from(s), BigInt::from(k)) / &bound;
        if r > int(1) {
            return Err(RobinError::Violation { k, sigma: s });
        }
        if r > worst.0 {
            worst = (r, k);
        }
    }
    Ok(RobinReport {
        a: a.clone(),
        n,
        robin_value: [value.lo_f64(), value.hi_f64()],
        worst_ratio: crate::exact::to_f64(&worst.0),
        worst_k: worst.1,
    })
}
