//! Exact rational helpers: directed rational bounds for rational powers and
//! exponentials, decimal rounding, and formatting.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;
pub type Exponent = Ratio<i64>;

/// Decimal digits carried by the rational upper/lower bounds of irrational
/// quantities such as `10^(-3/7)`.
pub const BOUND_DIGITS: u32 = 40;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn exp_to_rat(e: Exponent) -> Rat {
    rat(*e.numer(), *e.denom())
}

pub fn pow10(d: u32) -> BigInt {
    BigInt::from(10u32).pow(d)
}

/// Smallest multiple of `10^-digits` that is `>= x`; identity when `digits` is `None`.
pub fn round_up(x: &Rat, digits: Option<u32>) -> Rat {
    match digits {
        None => x.clone(),
        Some(d) => {
            let scale = pow10(d);
            let scaled = x * Rat::from_integer(scale.clone());
            Rat::new(scaled.ceil().to_integer(), scale)
        }
    }
}

/// Largest multiple of `10^-digits` that is `<= x`.
pub fn round_down(x: &Rat, digits: u32) -> Rat {
    let scale = pow10(digits);
    let scaled = x * Rat::from_integer(scale.clone());
    Rat::new(scaled.floor().to_integer(), scale)
}

/// Rounds to a grid of `BOUND_DIGITS` significant decimal digits, downwards or
/// upwards. Keeps rational bounds from growing without limit in iterated work.
pub fn trim(x: &Rat, up: bool) -> Rat {
    if x.is_zero() {
        return x.clone();
    }
    let mag = decimal_exponent(x);
    let shift = BOUND_DIGITS as i64 - mag;
    let scale = if shift >= 0 {
        Rat::from_integer(pow10(shift as u32))
    } else {
        Rat::new(BigInt::one(), pow10((-shift) as u32))
    };
    let scaled = x * &scale;
    let r = if up { scaled.ceil() } else { scaled.floor() };
    r / scale
}

/// Roughly floor(log10 |x|); only used for choosing working precision.
fn decimal_exponent(x: &Rat) -> i64 {
    let n = x.numer().abs().to_string().len() as i64;
    let d = x.denom().to_string().len() as i64;
    n - d
}

fn floor_root(x: &BigUint, q: u32) -> BigUint {
    x.nth_root(q)
}

fn ceil_root(x: &BigUint, q: u32) -> BigUint {
    let r = x.nth_root(q);
    if &r.pow(q) == x {
        r
    } else {
        r + 1u32
    }
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative integer expected")
}

/// Rational bounds `(lo, hi)` with `lo <= x^e <= hi` for positive rational `x`.
pub fn pow_bounds(x: &Rat, e: Exponent) -> (Rat, Rat) {
    assert!(x.is_positive(), "pow_bounds needs a positive base");
    let p = *e.numer();
    let q = *e.denom();
    let pe = p.unsigned_abs() as u32;
    let y = num_traits::pow(x.clone(), pe as usize);
    let (lo, hi) = if q == 1 {
        (y.clone(), y)
    } else {
        let q = q as u32;
        let a = to_biguint(y.numer());
        let b = to_biguint(y.denom());
        let scale = BigUint::from(10u32).pow(BOUND_DIGITS);
        let radicand = a * b.pow(q - 1) * scale.pow(q);
        let denom = BigInt::from(b * scale);
        (
            Rat::new(BigInt::from(floor_root(&radicand, q)), denom.clone()),
            Rat::new(BigInt::from(ceil_root(&radicand, q)), denom),
        )
    };
    if p >= 0 {
        (lo, hi)
    } else {
        (hi.recip(), lo.recip())
    }
}

pub fn pow_upper(x: &Rat, e: Exponent) -> Rat {
    pow_bounds(x, e).1
}

pub fn pow_lower(x: &Rat, e: Exponent) -> Rat {
    pow_bounds(x, e).0
}

/// Rational bounds on `e^x`.
pub fn exp_bounds(x: &Rat) -> (Rat, Rat) {
    if x.is_zero() {
        return (Rat::one(), Rat::one());
    }
    if x.is_negative() {
        let (lo, hi) = exp_bounds(&-x);
        return (hi.recip(), lo.recip());
    }
    // halve until x <= 1/2, sum the series, square back
    let mut s = 0u32;
    let mut y = x.clone();
    let half = rat(1, 2);
    while y > half {
        y /= int(2);
        s += 1;
    }
    let mut term_lo = Rat::one();
    let mut term_hi = Rat::one();
    let mut lo = Rat::one();
    let mut hi = Rat::one();
    let mut i = 1i64;
    let eps = Rat::new(BigInt::one(), pow10(BOUND_DIGITS + 10));
    loop {
        term_lo = trim(&(term_lo * &y / int(i)), false);
        term_hi = trim(&(term_hi * &y / int(i)), true);
        lo += &term_lo;
        hi += &term_hi;
        i += 1;
        if term_hi < eps {
            break;
        }
    }
    // y <= 1/2, so the tail after the last term is at most that term
    hi += &term_hi;
    let mut lo = trim(&lo, false);
    let mut hi = trim(&hi, true);
    for _ in 0..s {
        lo = trim(&(&lo * &lo), false);
        hi = trim(&(&hi * &hi), true);
    }
    (lo, hi)
}

pub fn factorial(m: u32) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Fixed-point decimal rendering truncated towards zero.
pub fn to_decimal(x: &Rat, digits: u32) -> String {
    let neg = x.is_negative();
    let scaled = (x.abs() * Rat::from_integer(pow10(digits))).floor().to_integer();
    let s = scaled.to_str_radix(10);
    let s = if s.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
    } else {
        s
    };
    let (a, b) = s.split_at(s.len() - digits as usize);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{a}")
    } else {
        format!("{sign}{a}.{b}")
    }
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large or tiny magnitude; fall back on string lengths
        let e = decimal_exponent(x);
        let s = if x.is_negative() { -1.0 } else { 1.0 };
        s * 10f64.powi(e as i32)
    })
}

/// Exponent rendering used by the text format: `n`, `n^2`, `n^(-1)`, `n^(3/2)`.
pub fn fmt_n_power(var: &str, q: Exponent) -> Option<String> {
    if q.is_zero() {
        None
    } else if q.is_one() {
        Some(var.to_string())
    } else if q.is_integer() && q.is_positive() {
        Some(format!("{var}^{}", q.numer()))
    } else {
        Some(format!("{var}^({})", fmt_exponent(q)))
    }
}

pub fn fmt_exponent(q: Exponent) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(Rat::new(a, b))
            }
        }
        None => {
            if let Some((w, f)) = s.split_once('.') {
                let neg = w.starts_with('-');
                let digits = format!("{}{}", w.trim_start_matches('-'), f);
                let v: BigInt = digits.parse().ok()?;
                let r = Rat::new(v, pow10(f.len() as u32));
                Some(if neg { -r } else { r })
            } else {
                Some(Rat::from_integer(s.parse().ok()?))
            }
        }
    }
}

pub fn parse_exponent(s: &str) -> Option<Exponent> {
    let r = parse_rat(s)?;
    Some(Exponent::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

pub fn big_sign(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Ceiling of a non-negative rational as an integer-valued rational.
pub fn ceil_int(x: &Rat) -> Rat {
    Rat::from_integer(x.ceil().to_integer())
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_up_grid() {
        assert_eq!(round_up(&rat(222301, 10_000_000), Some(4)), rat(223, 10000));
        assert_eq!(round_up(&rat(3, 10), Some(3)), rat(3, 10));
        assert_eq!(round_up(&rat(1, 3), None), rat(1, 3));
    }

    #[test]
    fn pow_bounds_bracket() {
        let (lo, hi) = pow_bounds(&int(10), Exponent::new(-1, 3));
        assert!(lo.pow(3) <= rat(1, 10) && rat(1, 10) <= hi.pow(3));
        assert!(&hi - &lo < rat(1, 1_000_000_000));
        let (lo, hi) = pow_bounds(&int(16), Exponent::new(3, 2));
        assert_eq!(lo, int(64));
        assert_eq!(hi, int(64));
    }

    #[test]
    fn exp_bounds_bracket() {
        let (lo, hi) = exp_bounds(&int(1));
        assert!(to_f64(&lo) <= std::f64::consts::E + 1e-15);
        assert!(to_f64(&hi) >= std::f64::consts::E - 1e-15);
        assert!(&hi - &lo < rat(1, 1_000_000_000_000));
        let (lo, hi) = exp_bounds(&rat(-7, 2));
        let v = (-3.5f64).exp();
        assert!(to_f64(&lo) <= v * (1.0 + 1e-14) && v <= to_f64(&hi) * (1.0 + 1e-14));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(41441, 1000), 3), "41.441");
        assert_eq!(to_decimal(&rat(-1, 8), 4), "-0.1250");
        assert_eq!(parse_rat("0.0223"), Some(rat(223, 10000)));
        assert_eq!(parse_rat("-7/10"), Some(rat(-7, 10)));
    }
}
