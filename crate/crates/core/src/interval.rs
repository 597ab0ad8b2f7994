//! Outward-rounded interval arithmetic on 128-bit binary floats, a complex
//! rectangle type built on top of it, and a light `f64` interval for sweeps
//! where speed matters more than width.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::exact::Rat;

/// Mantissa bits of every endpoint.
pub const PREC: usize = 128;

/// Extra relative widening applied to transcendental results, covering
/// possible last-bit errors of the backend.
const TRANSCENDENTAL_SLACK_BITS: i32 = 120;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

const DN: RoundingMode = RoundingMode::Down;
const UP: RoundingMode = RoundingMode::Up;

fn bf_cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    a.partial_cmp(b).expect("NaN endpoint")
}

fn bf_min(a: BigFloat, b: BigFloat) -> BigFloat {
    if bf_cmp(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn bf_max(a: BigFloat, b: BigFloat) -> BigFloat {
    if bf_cmp(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Strict sign tests; astro-float reports a sign for zero as well.
pub fn bf_gt0(x: &BigFloat) -> bool {
    x.is_positive() && !x.is_zero()
}

pub fn bf_lt0(x: &BigFloat) -> bool {
    x.is_negative() && !x.is_zero()
}

fn pow2(e: i32) -> BigFloat {
    let mut x = BigFloat::from_u8(1, PREC);
    x.set_exponent(e + 1);
    x
}

/// Moves `x` outward by a relative `2^-TRANSCENDENTAL_SLACK_BITS`.
fn nudge(x: &BigFloat, up: bool) -> BigFloat {
    if x.is_zero() || x.is_inf() {
        return x.clone();
    }
    let rel = pow2(-TRANSCENDENTAL_SLACK_BITS);
    let d = x.abs().mul(&rel, PREC, UP);
    if up {
        x.add(&d, PREC, UP)
    } else {
        x.sub(&d, PREC, DN)
    }
}

fn biguint_to_bf(x: &BigUint, rm: RoundingMode) -> BigFloat {
    if x.is_zero() {
        return BigFloat::from_u8(0, PREC);
    }
    let words: Vec<u64> = x.to_u64_digits();
    let bits = (words.len() * 64) as i32;
    let mut f = BigFloat::from_words(&words, Sign::Pos, bits);
    f.set_precision(PREC, rm).expect("precision");
    f
}

fn bigint_to_bf(x: &BigInt, rm: RoundingMode) -> BigFloat {
    let mag = x.magnitude();
    if x.is_negative() {
        let flip = if rm == UP { DN } else { UP };
        biguint_to_bf(mag, flip).neg()
    } else {
        biguint_to_bf(mag, rm)
    }
}

/// Exact rational value of a finite float.
pub fn bf_to_rat(x: &BigFloat) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let (m, _, s, e, _) = x.as_raw_parts().expect("finite value");
    let mut mant = BigUint::zero();
    for w in m.iter().rev() {
        mant = (mant << 64u32) + BigUint::from(*w);
    }
    let shift = e as i64 - 64 * m.len() as i64;
    let v = if shift >= 0 {
        Rat::from_integer(BigInt::from(mant << shift as u64))
    } else {
        Rat::new(BigInt::from(mant), BigInt::one() << (-shift) as u64)
    };
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    crate::exact::to_f64(&bf_to_rat(x))
}

/// Closed interval `[lo, hi]` with 128-bit endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
}

impl Interval {
    pub fn new(lo: BigFloat, hi: BigFloat) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN endpoint");
        assert!(bf_cmp(&lo, &hi) != Ordering::Greater, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: BigFloat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::point(BigFloat::from_f64(x, PREC))
    }

    pub fn from_int(x: i64) -> Self {
        Self::from_bigint(&BigInt::from(x))
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        Interval { lo: bigint_to_bf(x, DN), hi: bigint_to_bf(x, UP) }
    }

    pub fn from_rat(x: &Rat) -> Self {
        if x.is_integer() {
            return Self::from_bigint(x.numer());
        }
        let n = Self::from_bigint(x.numer());
        let d = Self::from_bigint(x.denom());
        n.div(&d)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rat(&crate::exact::rat(n, d))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The whole real line.
    pub fn entire() -> Self {
        Interval { lo: BigFloat::from_f64(f64::NEG_INFINITY, PREC), hi: BigFloat::from_f64(f64::INFINITY, PREC) }
    }

    pub fn pi() -> Self {
        with_consts(|cc| Interval { lo: nudge(&cc.pi(PREC, DN), false), hi: nudge(&cc.pi(PREC, UP), true) })
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn lo_rat(&self) -> Rat {
        bf_to_rat(&self.lo)
    }

    pub fn hi_rat(&self) -> Rat {
        bf_to_rat(&self.hi)
    }

    pub fn lo_f64(&self) -> f64 {
        bf_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        bf_to_f64(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo_f64() + self.hi_f64())
    }

    pub fn is_finite(&self) -> bool {
        !self.lo.is_inf() && !self.hi.is_inf()
    }

    pub fn width(&self) -> BigFloat {
        self.hi.sub(&self.lo, PREC, UP)
    }

    pub fn width_f64(&self) -> f64 {
        bf_to_f64(&self.width())
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        self.is_finite() && &self.lo_rat() <= x && x <= &self.hi_rat()
            || (!self.is_finite() && {
                let lo_ok = self.lo.is_inf_neg() || &self.lo_rat() <= x;
                let hi_ok = self.hi.is_inf_pos() || x <= &self.hi_rat();
                lo_ok && hi_ok
            })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        bf_cmp(&self.lo, &other.lo) != Ordering::Greater && bf_cmp(&other.hi, &self.hi) != Ordering::Greater
    }

    pub fn contains_zero(&self) -> bool {
        !bf_gt0(&self.lo) && !bf_lt0(&self.hi)
    }

    /// `true` when every point is `> 0`.
    pub fn is_positive(&self) -> bool {
        bf_gt0(&self.lo)
    }

    /// `true` when every point is `< 0`.
    pub fn is_negative(&self) -> bool {
        bf_lt0(&self.hi)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: bf_min(self.lo.clone(), other.lo.clone()), hi: bf_max(self.hi.clone(), other.hi.clone()) }
    }

    /// Intersection; `self` unchanged when the two are disjoint.
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = bf_max(self.lo.clone(), other.lo.clone());
        let hi = bf_min(self.hi.clone(), other.hi.clone());
        if bf_cmp(&lo, &hi) == Ordering::Greater {
            self.clone()
        } else {
            Interval { lo, hi }
        }
    }

    /// `[-m, m]` with `m` the largest magnitude in `self`.
    pub fn symmetric(&self) -> Interval {
        let m = self.abs().hi;
        Interval { lo: BigFloat::neg(&m), hi: m }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.add(&o.lo, PREC, DN), hi: self.hi.add(&o.hi, PREC, UP) }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.sub(&o.hi, PREC, DN), hi: self.hi.sub(&o.lo, PREC, UP) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: BigFloat::neg(&self.hi), hi: BigFloat::neg(&self.lo) }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        // sign-case split avoids inf*0 and halves the work in the common case
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        if !a.is_negative() && !c.is_negative() {
            return Interval { lo: a.mul(c, PREC, DN), hi: b.mul(d, PREC, UP) };
        }
        let prod = |x: &BigFloat, y: &BigFloat, rm| {
            if x.is_zero() || y.is_zero() {
                BigFloat::from_u8(0, PREC)
            } else {
                x.mul(y, PREC, rm)
            }
        };
        let lo = [prod(a, c, DN), prod(a, d, DN), prod(b, c, DN), prod(b, d, DN)].into_iter().reduce(bf_min).unwrap();
        let hi = [prod(a, c, UP), prod(a, d, UP), prod(b, c, UP), prod(b, d, UP)].into_iter().reduce(bf_max).unwrap();
        Interval { lo, hi }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval { lo: a.lo.mul(&a.lo, PREC, DN), hi: a.hi.mul(&a.hi, PREC, UP) }
    }

    pub fn powi(&self, e: u32) -> Interval {
        let mut acc = Interval::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && acc.lo.is_negative() {
            acc.lo = BigFloat::from_u8(0, PREC);
        }
        acc
    }

    /// Reciprocal; the whole line when the interval contains zero.
    pub fn recip(&self) -> Interval {
        if self.contains_zero() {
            return Interval::entire();
        }
        let one = BigFloat::from_u8(1, PREC);
        Interval { lo: one.div(&self.hi, PREC, DN), hi: one.div(&self.lo, PREC, UP) }
    }

    pub fn div(&self, o: &Interval) -> Interval {
        if o.contains_zero() {
            return Interval::entire();
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        let lo = [a.div(c, PREC, DN), a.div(d, PREC, DN), b.div(c, PREC, DN), b.div(d, PREC, DN)]
            .into_iter()
            .reduce(bf_min)
            .unwrap();
        let hi = [a.div(c, PREC, UP), a.div(d, PREC, UP), b.div(c, PREC, UP), b.div(d, PREC, UP)]
            .into_iter()
            .reduce(bf_max)
            .unwrap();
        Interval { lo, hi }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() || self.hi.is_zero() {
            self.neg()
        } else {
            Interval { lo: BigFloat::from_u8(0, PREC), hi: bf_max(BigFloat::neg(&self.lo), self.hi.clone()) }
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: bf_max(self.lo.clone(), o.lo.clone()), hi: bf_max(self.hi.clone(), o.hi.clone()) }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval { lo: bf_min(self.lo.clone(), o.lo.clone()), hi: bf_min(self.hi.clone(), o.hi.clone()) }
    }

    pub fn exp(&self) -> Interval {
        with_consts(|cc| Interval {
            lo: nudge(&self.lo.exp(PREC, DN, cc), false).max(&BigFloat::from_u8(0, PREC)),
            hi: nudge(&self.hi.exp(PREC, UP, cc), true),
        })
    }

    /// Natural logarithm; the lower end is `-inf` if the interval reaches 0.
    pub fn ln(&self) -> Interval {
        assert!(self.hi.is_positive() && !self.hi.is_zero(), "log of a non-positive interval");
        with_consts(|cc| {
            let lo = if self.lo.is_positive() && !self.lo.is_zero() {
                nudge(&self.lo.ln(PREC, DN, cc), false)
            } else {
                BigFloat::from_f64(f64::NEG_INFINITY, PREC)
            };
            Interval { lo, hi: nudge(&self.hi.ln(PREC, UP, cc), true) }
        })
    }

    pub fn sqrt(&self) -> Interval {
        let z = BigFloat::from_u8(0, PREC);
        let lo = if self.lo.is_positive() { self.lo.sqrt(PREC, DN) } else { z.clone() };
        let hi = if self.hi.is_positive() { self.hi.sqrt(PREC, UP) } else { z };
        Interval { lo, hi }
    }

    pub fn atan(&self) -> Interval {
        with_consts(|cc| Interval {
            lo: nudge(&self.lo.atan(PREC, DN, cc), false),
            hi: nudge(&self.hi.atan(PREC, UP, cc), true),
        })
    }

    /// Range of `sin(x + phase)` with `phase` a multiple of `pi/2`, from the
    /// endpoint values and the extrema the interval contains.
    fn unit_wave(&self, quarter_turns: i64) -> Interval {
        let unit = Interval::from_ratio(-1, 1).hull(&Interval::one());
        if !self.is_finite() || self.width_f64() > 6.0 {
            return unit;
        }
        let pi = Interval::pi();
        let shift = pi.scale(&crate::exact::rat(quarter_turns, 2));
        let at = |x: &BigFloat| -> Interval {
            let y = Interval::point(x.clone()).add(&shift);
            with_consts(|cc| Interval {
                lo: bf_max(nudge(&y.lo.sin(PREC, DN, cc), false).sub(&y.width(), PREC, DN), unit.lo.clone()),
                hi: bf_min(nudge(&y.hi.sin(PREC, UP, cc), true).add(&y.width(), PREC, UP), unit.hi.clone()),
            })
        };
        let mut out = at(&self.lo).hull(&at(&self.hi));
        // maxima of sin(y) at y = pi/2 + 2 k pi, minima at y = -pi/2 + 2 k pi
        let y = self.add(&shift);
        let two_pi = pi.scale(&crate::exact::int(2));
        for (offset, value) in [(1i64, Interval::one()), (-1, Interval::from_int(-1))] {
            let t = y.sub(&pi.scale(&crate::exact::rat(offset, 2))).div(&two_pi);
            if (t.hi_f64() + 1e-9).floor() >= (t.lo_f64() - 1e-9).ceil() {
                out = out.hull(&value);
            }
        }
        out
    }

    pub fn sin(&self) -> Interval {
        self.unit_wave(0)
    }

    pub fn cos(&self) -> Interval {
        self.unit_wave(1)
    }

    pub fn scale(&self, c: &Rat) -> Interval {
        self.mul(&Interval::from_rat(c))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $ty:ty) => {
        impl $tr<&$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                <$ty>::$m(self, rhs)
            }
        }
    };
}

binop!(Add, add, Interval);
binop!(Sub, sub, Interval);
binop!(Mul, mul, Interval);
binop!(Div, div, Interval);

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

/// Rectangle `re + i*im` in the complex plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::zero() }
    }

    pub fn from_rats(re: &Rat, im: &Rat) -> Self {
        ComplexInterval { re: Interval::from_rat(re), im: Interval::from_rat(im) }
    }

    pub fn zero() -> Self {
        Self::real(Interval::zero())
    }

    pub fn one() -> Self {
        Self::real(Interval::one())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        ComplexInterval { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, c: &Interval) -> Self {
        ComplexInterval { re: self.re.mul(c), im: self.im.mul(c) }
    }

    /// `|z|^2` as an interval.
    pub fn norm_sqr(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Interval {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        ComplexInterval { re: self.re.div(&d), im: self.im.neg().div(&d) }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        ComplexInterval { re: m.mul(&self.im.cos()), im: m.mul(&self.im.sin()) }
    }

    /// Principal logarithm for arguments in the open right half-plane.
    pub fn ln_right(&self) -> Self {
        assert!(self.re.is_positive(), "ln_right needs Re(z) > 0");
        let arg = self.im.div(&self.re).atan();
        ComplexInterval { re: self.norm_sqr().ln().scale(&crate::exact::rat(1, 2)), im: arg }
    }

    /// `x^z` for a real `x > 0` given through `ln x`.
    pub fn pow_from_ln(ln_x: &Interval, z: &ComplexInterval) -> Self {
        ComplexInterval { re: z.re.mul(ln_x), im: z.im.mul(ln_x) }.exp()
    }

    /// `sin z = sin x cosh y + i cos x sinh y`.
    pub fn sin(&self) -> Self {
        let ey = self.im.exp();
        let emy = self.im.neg().exp();
        let half = Interval::from_ratio(1, 2);
        let cosh = ey.add(&emy).mul(&half);
        let sinh = ey.sub(&emy).mul(&half);
        ComplexInterval { re: self.re.sin().mul(&cosh), im: self.re.cos().mul(&sinh) }
    }

    pub fn contains(&self, re: &Rat, im: &Rat) -> bool {
        self.re.contains_rat(re) && self.im.contains_rat(im)
    }

    pub fn hull(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.hull(&o.re), im: self.im.hull(&o.im) }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i*{}", self.re, self.im)
    }
}

binop!(Add, add, ComplexInterval);
binop!(Sub, sub, ComplexInterval);
binop!(Mul, mul, ComplexInterval);
binop!(Div, div, ComplexInterval);

/// `f64` interval with one-ulp outward steps after every operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        F64Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        F64Interval { lo: x, hi: x }
    }

    /// Enclosure of an integer that may not be exactly representable.
    pub fn from_u128(x: u128) -> Self {
        let f = x as f64;
        if f as u128 == x {
            Self::point(f)
        } else {
            F64Interval { lo: f.next_down(), hi: f.next_up() }
        }
    }

    pub fn from_i128(x: i128) -> Self {
        let m = Self::from_u128(x.unsigned_abs());
        if x < 0 {
            F64Interval { lo: -m.hi, hi: -m.lo }
        } else {
            m
        }
    }

    fn out(lo: f64, hi: f64) -> Self {
        F64Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn add(self, o: Self) -> Self {
        Self::out(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::out(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Self::out(p.iter().cloned().fold(f64::INFINITY, f64::min), p.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Division by an interval of positive numbers.
    pub fn div_pos(self, o: Self) -> Self {
        assert!(o.lo > 0.0, "divisor must be positive");
        let p = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Self::out(p.iter().cloned().fold(f64::INFINITY, f64::min), p.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn is_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn is_positive(self) -> bool {
        self.lo > 0.0
    }
}
