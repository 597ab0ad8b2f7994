//! Certified enclosures of the Riemann zeta function and the gamma function
//! for complex rectangle arguments.
//!
//! zeta: Euler-Maclaurin summation for `Re(s) >= 0`, the functional equation
//! otherwise. gamma: upward shift to `Re(s) >= GAMMA_SHIFT`, Stirling series
//! with the Binet remainder bound, downward shift.
//!
//! Both are written over [`Cx`], so the same code evaluates plain rectangles
//! and first-order jets (value and derivative enclosures over a box). Jets feed
//! the mean-value form used by the line integrals.

use std::cell::RefCell;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exact::{factorial, rat, Rat};
use crate::interval::{bf_lt0, ComplexInterval, Interval};
use crate::taylor::bernoulli_table;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("zeta argument {0} touches the pole at s = 1")]
    ZetaPole(String),
    #[error("gamma argument {0} touches a non-positive integer")]
    GammaPole(String),
    #[error("Euler-Maclaurin remainder does not converge for s = {s} with {terms} terms")]
    Divergent { s: String, terms: usize },
}

/// Real part from which the Stirling series is applied.
pub const GAMMA_SHIFT: i64 = 24;
/// Stirling terms `B_2j / (2j(2j-1) z^(2j-1))` kept before the remainder.
const STIRLING_TERMS: usize = 12;
/// Euler-Maclaurin correction terms.
const EM_TERMS: usize = 16;
/// Minimum number of directly summed terms.
pub const ZETA_MIN_TERMS: usize = 32;
/// Radius of the Cauchy estimate that turns remainder bounds into bounds
/// for their derivatives.
const CAUCHY_RADIUS: (i64, i64) = (1, 2);

/// Complex scalar the special functions are generic over.
pub trait Cx: Clone {
    /// Number of derivative enclosures carried along with the value.
    const ORDER: usize;
    fn cst(c: ComplexInterval) -> Self;
    /// Enclosure of the value.
    fn val(&self) -> &ComplexInterval;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn recip(&self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Interval) -> Self;
    fn exp(&self) -> Self;
    fn ln_right(&self) -> Self;
    fn sin(&self) -> Self;
    /// Complex conjugate; for jets in a real variable, of every component.
    fn conj(&self) -> Self;
    /// Adds `R(arg)` for an unknown analytic `R` with `|R^(j)| <= radii[j]`
    /// (`radii.len() == ORDER + 1`, derivatives with respect to `arg`).
    fn widen(&self, arg: &Self, radii: &[Interval]) -> Self;

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    fn add_real(&self, c: &Interval) -> Self {
        self.add(&Self::cst(ComplexInterval::real(c.clone())))
    }
}

fn disc(c: &ComplexInterval, r: &Interval) -> ComplexInterval {
    let rad = Interval::new(astro_float::BigFloat::neg(r.hi()), r.hi().clone());
    ComplexInterval::new(c.re.add(&rad), c.im.add(&rad))
}

impl Cx for ComplexInterval {
    const ORDER: usize = 0;
    fn cst(c: ComplexInterval) -> Self {
        c
    }
    fn val(&self) -> &ComplexInterval {
        self
    }
    fn add(&self, o: &Self) -> Self {
        ComplexInterval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ComplexInterval::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ComplexInterval::mul(self, o)
    }
    fn recip(&self) -> Self {
        ComplexInterval::recip(self)
    }
    fn neg(&self) -> Self {
        ComplexInterval::neg(self)
    }
    fn scale(&self, c: &Interval) -> Self {
        ComplexInterval::scale(self, c)
    }
    fn exp(&self) -> Self {
        ComplexInterval::exp(self)
    }
    fn ln_right(&self) -> Self {
        ComplexInterval::ln_right(self)
    }
    fn sin(&self) -> Self {
        ComplexInterval::sin(self)
    }
    fn conj(&self) -> Self {
        ComplexInterval::conj(self)
    }
    fn widen(&self, _arg: &Self, radii: &[Interval]) -> Self {
        disc(self, &radii[0])
    }
}

/// Value and derivative enclosures of a function over a box of its variable.
#[derive(Clone, Debug)]
pub struct Jet {
    pub v: ComplexInterval,
    pub d: ComplexInterval,
}

impl Jet {
    /// The independent variable ranging over `v`, with `d = ds/dw`.
    pub fn var(v: ComplexInterval, d: ComplexInterval) -> Self {
        Jet { v, d }
    }
}

fn cos_c(z: &ComplexInterval) -> ComplexInterval {
    // cos z = sin(z + pi/2)
    let half_pi = Interval::pi().scale(&rat(1, 2));
    ComplexInterval::new(z.re.add(&half_pi), z.im.clone()).sin()
}

impl Cx for Jet {
    const ORDER: usize = 1;
    fn cst(c: ComplexInterval) -> Self {
        Jet { v: c, d: ComplexInterval::zero() }
    }
    fn val(&self) -> &ComplexInterval {
        &self.v
    }
    fn add(&self, o: &Self) -> Self {
        Jet { v: self.v.add(&o.v), d: self.d.add(&o.d) }
    }
    fn sub(&self, o: &Self) -> Self {
        Jet { v: self.v.sub(&o.v), d: self.d.sub(&o.d) }
    }
    fn mul(&self, o: &Self) -> Self {
        Jet { v: self.v.mul(&o.v), d: self.d.mul(&o.v).add(&self.v.mul(&o.d)) }
    }
    fn recip(&self) -> Self {
        let r = self.v.recip();
        Jet { d: self.d.mul(&r).mul(&r).neg(), v: r }
    }
    fn neg(&self) -> Self {
        Jet { v: self.v.neg(), d: self.d.neg() }
    }
    fn scale(&self, c: &Interval) -> Self {
        Jet { v: self.v.scale(c), d: self.d.scale(c) }
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        Jet { d: self.d.mul(&e), v: e }
    }
    fn ln_right(&self) -> Self {
        Jet { v: self.v.ln_right(), d: self.d.div(&self.v) }
    }
    fn sin(&self) -> Self {
        Jet { v: self.v.sin(), d: self.d.mul(&cos_c(&self.v)) }
    }
    fn conj(&self) -> Self {
        Jet { v: self.v.conj(), d: self.d.conj() }
    }
    fn widen(&self, arg: &Self, radii: &[Interval]) -> Self {
        let d1 = radii[1].mul(&arg.d.abs());
        Jet { v: disc(&self.v, &radii[0]), d: disc(&self.d, &d1) }
    }
}

/// Value, first and second derivative enclosures over a box.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub v: ComplexInterval,
    pub d: ComplexInterval,
    pub dd: ComplexInterval,
}

impl Jet2 {
    /// The independent variable ranging over `v`, with `d = ds/dw` constant.
    pub fn var(v: ComplexInterval, d: ComplexInterval) -> Self {
        Jet2 { v, d, dd: ComplexInterval::zero() }
    }

    /// `f(x)` given `f(v)`, `f'(v)`, `f''(v)`.
    fn chain(&self, f0: ComplexInterval, f1: ComplexInterval, f2: ComplexInterval) -> Self {
        let d = self.d.mul(&f1);
        let dd = self.dd.mul(&f1).add(&self.d.mul(&self.d).mul(&f2));
        Jet2 { v: f0, d, dd }
    }
}

impl Cx for Jet2 {
    const ORDER: usize = 2;
    fn cst(c: ComplexInterval) -> Self {
        Jet2 { v: c, d: ComplexInterval::zero(), dd: ComplexInterval::zero() }
    }
    fn val(&self) -> &ComplexInterval {
        &self.v
    }
    fn add(&self, o: &Self) -> Self {
        Jet2 { v: self.v.add(&o.v), d: self.d.add(&o.d), dd: self.dd.add(&o.dd) }
    }
    fn sub(&self, o: &Self) -> Self {
        Jet2 { v: self.v.sub(&o.v), d: self.d.sub(&o.d), dd: self.dd.sub(&o.dd) }
    }
    fn mul(&self, o: &Self) -> Self {
        let two = Interval::from_int(2);
        Jet2 {
            v: self.v.mul(&o.v),
            d: self.d.mul(&o.v).add(&self.v.mul(&o.d)),
            dd: self.dd.mul(&o.v).add(&self.d.mul(&o.d).scale(&two)).add(&self.v.mul(&o.dd)),
        }
    }
    fn recip(&self) -> Self {
        let r = self.v.recip();
        let r2 = r.mul(&r);
        let r3 = r2.mul(&r).scale(&Interval::from_int(2));
        self.chain(r, r2.neg(), r3)
    }
    fn neg(&self) -> Self {
        Jet2 { v: self.v.neg(), d: self.d.neg(), dd: self.dd.neg() }
    }
    fn scale(&self, c: &Interval) -> Self {
        Jet2 { v: self.v.scale(c), d: self.d.scale(c), dd: self.dd.scale(c) }
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e.clone(), e.clone(), e)
    }
    fn ln_right(&self) -> Self {
        let r = self.v.recip();
        let r2 = r.mul(&r).neg();
        self.chain(self.v.ln_right(), r, r2)
    }
    fn sin(&self) -> Self {
        let s = self.v.sin();
        self.chain(s.clone(), cos_c(&self.v), s.neg())
    }
    fn conj(&self) -> Self {
        Jet2 { v: self.v.conj(), d: self.d.conj(), dd: self.dd.conj() }
    }
    fn widen(&self, arg: &Self, radii: &[Interval]) -> Self {
        let a1 = arg.d.abs();
        let d1 = radii[1].mul(&a1);
        let d2 = radii[2].mul(&a1.sqr()).add(&radii[1].mul(&arg.dd.abs()));
        Jet2 { v: disc(&self.v, &radii[0]), d: disc(&self.d, &d1), dd: disc(&self.dd, &d2) }
    }
}

struct Tables {
    /// `B_2j / (2j)!` for `j <= EM_TERMS`.
    em: Vec<Interval>,
    /// `B_2j / (2j (2j-1))` for `j <= STIRLING_TERMS + 1`.
    stirling: Vec<Interval>,
    ln_int: Vec<Interval>,
    half_ln_2pi: Interval,
    ln_pi: Interval,
}

thread_local! {
    static TABLES: RefCell<Option<Tables>> = const { RefCell::new(None) };
}

fn with_tables<T>(f: impl FnOnce(&mut Tables) -> T) -> T {
    TABLES.with(|t| {
        let mut t = t.borrow_mut();
        let tables = t.get_or_insert_with(|| {
            let m = 2 * (EM_TERMS.max(STIRLING_TERMS + 1) as u32);
            let b = bernoulli_table(m);
            let em = (1..=EM_TERMS)
                .map(|j| Interval::from_rat(&(&b[2 * j] / Rat::from_integer(factorial(2 * j as u32)))))
                .collect();
            let stirling = (1..=STIRLING_TERMS + 1)
                .map(|j| Interval::from_rat(&(&b[2 * j] / crate::exact::int((2 * j * (2 * j - 1)) as i64))))
                .collect();
            let pi = Interval::pi();
            let two_pi = pi.mul(&Interval::from_int(2));
            Tables {
                em,
                stirling,
                ln_int: vec![Interval::zero()],
                half_ln_2pi: two_pi.ln().scale(&rat(1, 2)),
                ln_pi: pi.ln(),
            }
        });
        f(tables)
    })
}

/// `ln k` for a positive integer, cached per thread.
pub fn ln_int(k: usize) -> Interval {
    with_tables(|t| {
        while t.ln_int.len() <= k {
            let j = t.ln_int.len();
            t.ln_int.push(Interval::from_int(j as i64).ln());
        }
        t.ln_int[k].clone()
    })
}

fn is_prime(k: usize) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

fn smallest_factor(k: usize) -> usize {
    (2..).take_while(|d| d * d <= k).find(|d| k.is_multiple_of(*d)).unwrap_or(k)
}

/// `k^(-s)` for `k = 1..n`, primes by exponentials and composites by
/// complete multiplicativity.
fn inverse_powers<T: Cx>(s: &T, n: usize) -> Vec<T> {
    let minus_s = s.neg();
    let mut out: Vec<T> = Vec::with_capacity(n + 1);
    out.push(T::cst(ComplexInterval::zero()));
    if n >= 1 {
        out.push(T::cst(ComplexInterval::one()));
    }
    for k in 2..=n {
        let v = if is_prime(k) {
            minus_s.scale(&ln_int(k)).exp()
        } else {
            let p = smallest_factor(k);
            out[p].mul(&out[k / p])
        };
        out.push(v);
    }
    out
}

/// Number of direct terms that keeps the Euler-Maclaurin remainder small.
pub fn default_zeta_terms(s: &ComplexInterval) -> usize {
    let m = s.abs().hi_f64() + 2.0 * EM_TERMS as f64;
    let n = (2.0 * m / std::f64::consts::PI).ceil() as usize + 1;
    n.max(ZETA_MIN_TERMS)
}

fn point(x: &astro_float::BigFloat) -> Interval {
    Interval::new(x.clone(), x.clone())
}

/// `prod_{j<2M} (a + j) |B_2M|/(2M)! N^(1-sigma-2M) / (sigma+2M-1)`, which
/// bounds the Euler-Maclaurin remainder for `Re(s) >= sigma`, `|s| <= a`.
fn em_remainder_bound(sigma: &Interval, a: &Interval, n: usize) -> Interval {
    let two_m = 2 * EM_TERMS as i64;
    let mut rising = Interval::one();
    for j in 0..two_m {
        rising = rising.mul(&a.add(&Interval::from_int(j)));
    }
    let tail = with_tables(|t| t.em[EM_TERMS - 1].abs());
    let e = Interval::one().sub(sigma).sub(&Interval::from_int(two_m));
    let npow = e.mul(&ln_int(n)).exp();
    let denom = sigma.add(&Interval::from_int(two_m - 1));
    rising.mul(&tail).mul(&npow).div(&denom)
}

/// Radii for the remainder and its first `order` derivatives, the latter by
/// Cauchy estimates `j! B / rho^j` on the box inflated by `rho`.
fn cauchy_radii(r: Interval, inflated: impl FnOnce() -> Interval, rho: &Interval, order: usize) -> Vec<Interval> {
    let mut out = vec![r];
    if order == 0 {
        return out;
    }
    let b = inflated();
    let mut c = b;
    for j in 1..=order {
        c = c.mul(&Interval::from_int(j as i64)).div(rho);
        out.push(c.clone());
    }
    out
}

/// Euler-Maclaurin with `terms` direct terms. Needs `Re(s) > 1 - 2 * EM_TERMS`.
fn zeta_em<T: Cx>(s: &T, terms: usize) -> Result<T, SpecialError> {
    Ok(zeta_ladder(s, 1, terms)?.pop().expect("one value"))
}

/// `zeta(s + j)` for `j = 0..count`, sharing the powers `k^(-s)` of the
/// direct sum. Every `s + j` must stay clear of the pole and satisfy
/// `Re > 1 - 2 * EM_TERMS`.
pub fn zeta_ladder<T: Cx>(s: &T, count: usize, terms: usize) -> Result<Vec<T>, SpecialError> {
    let n = terms.max(2);
    let sv = s.val().clone();
    let slack = if T::ORDER > 0 { CAUCHY_RADIUS.0 as f64 / CAUCHY_RADIUS.1 as f64 } else { 0.0 };
    if sv.re.lo_f64() - slack + 2.0 * EM_TERMS as f64 - 1.0 <= 0.0 {
        return Err(SpecialError::Divergent { s: sv.to_string(), terms });
    }
    let mut pows = inverse_powers(s, n);
    let inv_k: Vec<Interval> = (0..=n).map(|k| if k == 0 { Interval::zero() } else { Interval::from_int(k as i64).recip() }).collect();
    let nn = Interval::from_int(n as i64);
    let one = T::cst(ComplexInterval::one());
    let rho = Interval::from_ratio(CAUCHY_RADIUS.0, CAUCHY_RADIUS.1);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        if j > 0 {
            for (p, ik) in pows.iter_mut().zip(&inv_k).skip(1) {
                *p = p.scale(ik);
            }
        }
        let sj = s.add_real(&Interval::from_int(j as i64));
        let svj = sj.val().clone();
        let s_minus_1 = sj.sub(&one);
        if s_minus_1.val().re.contains_zero() && s_minus_1.val().im.contains_zero() {
            return Err(SpecialError::ZetaPole(svj.to_string()));
        }
        let mut sum = T::cst(ComplexInterval::zero());
        for p in pows.iter().take(n).skip(1) {
            sum = sum.add(p);
        }
        let n_ms = pows[n].clone();
        // N^(1-s)/(s-1) + N^(-s)/2
        sum = sum.add(&n_ms.scale(&nn).div(&s_minus_1));
        sum = sum.add(&n_ms.scale(&Interval::from_ratio(1, 2)));
        let em = with_tables(|t| {
            let mut rising = sj.clone();
            let mut acc = T::cst(ComplexInterval::zero());
            let inv_n = nn.recip();
            let inv_n2 = inv_n.sqr();
            let mut npow = n_ms.scale(&inv_n);
            for (i, c) in t.em.iter().enumerate() {
                // B_2i/(2i)! (s)_(2i-1) N^(-s-2i+1)
                acc = acc.add(&rising.mul(&npow).scale(c));
                if i + 1 < t.em.len() {
                    let a = sj.add_real(&Interval::from_int(2 * i as i64 + 1));
                    let b = sj.add_real(&Interval::from_int(2 * i as i64 + 2));
                    rising = rising.mul(&a).mul(&b);
                    npow = npow.scale(&inv_n2);
                }
            }
            acc
        });
        sum = sum.add(&em);
        let sigma = point(svj.re.lo());
        let a = point(svj.abs().hi());
        let radii = cauchy_radii(
            em_remainder_bound(&sigma, &a, n),
            || em_remainder_bound(&sigma.sub(&rho), &a.add(&rho), n),
            &rho,
            T::ORDER,
        );
        if radii[0].hi_f64() > 1e6 || radii.iter().any(|r| !r.is_finite()) {
            return Err(SpecialError::Divergent { s: svj.to_string(), terms });
        }
        out.push(sum.widen(&sj, &radii));
    }
    Ok(out)
}

/// Generic zeta with `terms` direct Euler-Maclaurin terms.
pub fn zeta_cx<T: Cx>(s: &T, terms: usize) -> Result<T, SpecialError> {
    if bf_lt0(s.val().re.hi()) {
        // zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        let one = T::cst(ComplexInterval::one());
        let t = one.sub(s);
        let pi = Interval::pi();
        let (ln2, lnpi) = (ln_int(2), with_tables(|t| t.ln_pi.clone()));
        let f = s
            .scale(&ln2)
            .exp()
            .mul(&s.sub(&one).scale(&lnpi).exp())
            .mul(&s.scale(&pi.scale(&rat(1, 2))).sin())
            .mul(&gamma_cx(&t)?);
        let terms = terms.max(default_zeta_terms(t.val()));
        return Ok(f.mul(&zeta_em(&t, terms)?));
    }
    zeta_em(s, terms)
}

/// Enclosure of `zeta(s)` using `terms` direct terms for the Euler-Maclaurin part.
pub fn zeta_enclosure(s: &ComplexInterval, terms: usize) -> Result<ComplexInterval, SpecialError> {
    zeta_cx(s, terms)
}

/// Enclosure of `zeta(s)` with an automatic number of terms.
pub fn zeta(s: &ComplexInterval) -> Result<ComplexInterval, SpecialError> {
    zeta_enclosure(s, default_zeta_terms(s))
}

fn touches_nonpositive_integer(z: &ComplexInterval) -> bool {
    if !z.im.contains_zero() {
        return false;
    }
    let lo = z.re.lo_rat();
    let hi = z.re.hi_rat();
    // some integer m <= 0 in [lo, hi]
    let top = hi.floor().min(Rat::from_integer(0.into()));
    top >= lo
}

/// `|B_2K+2| / ((2K+2)(2K+1)) * 2^(K+1) / |z|^(2K+1)`: the Binet remainder
/// bound with `sec^2(arg z / 2) <= 2` on the right half-plane.
fn stirling_remainder_bound(abs_lo: &Interval) -> Interval {
    let k = STIRLING_TERMS as u32 + 1;
    let c = with_tables(|t| t.stirling[STIRLING_TERMS].abs());
    c.mul(&Interval::from_int(2).powi(k)).mul(&abs_lo.powi(2 * k - 1).recip())
}

/// `ln Gamma(z)` for `Re(z) >= GAMMA_SHIFT - 1`.
fn ln_gamma_stirling<T: Cx>(z: &T) -> T {
    let (half_ln_2pi, coeffs) = with_tables(|t| (t.half_ln_2pi.clone(), t.stirling.clone()));
    let lnz = z.ln_right();
    let mut acc = z.add_real(&Interval::from_ratio(-1, 2)).mul(&lnz).sub(z).add_real(&half_ln_2pi);
    let zinv = z.recip();
    let zinv2 = zinv.mul(&zinv);
    let mut p = zinv;
    for c in coeffs.iter().take(STIRLING_TERMS) {
        acc = acc.add(&p.scale(c));
        p = p.mul(&zinv2);
    }
    let abs_lo = point(z.val().abs().lo());
    let rho = Interval::one();
    let radii = cauchy_radii(
        stirling_remainder_bound(&abs_lo),
        || stirling_remainder_bound(&abs_lo.sub(&rho)),
        &rho,
        T::ORDER,
    );
    acc.widen(z, &radii)
}

/// Generic gamma.
pub fn gamma_cx<T: Cx>(z: &T) -> Result<T, SpecialError> {
    let zv = z.val();
    if touches_nonpositive_integer(zv) {
        return Err(SpecialError::GammaPole(zv.to_string()));
    }
    let lo = zv.re.lo_rat();
    let shift = if lo >= Rat::from_integer(GAMMA_SHIFT.into()) {
        0
    } else {
        (Rat::from_integer(GAMMA_SHIFT.into()) - lo).ceil().to_integer().to_i64().expect("shift fits")
    };
    // factors in the right half-plane go through logarithms; multiplying
    // rotated rectangles directly wraps badly for wide boxes
    let mut prod = T::cst(ComplexInterval::one());
    let mut ln_prod = T::cst(ComplexInterval::zero());
    let mut direct = false;
    for j in 0..shift {
        let f = z.add_real(&Interval::from_int(j));
        if crate::interval::bf_gt0(f.val().re.lo()) {
            ln_prod = ln_prod.add(&f.ln_right());
        } else {
            prod = prod.mul(&f);
            direct = true;
        }
    }
    let w = z.add_real(&Interval::from_int(shift));
    let g = ln_gamma_stirling(&w).sub(&ln_prod).exp();
    Ok(if direct { g.div(&prod) } else { g })
}

/// Enclosure of `Gamma(z)`.
pub fn gamma_enclosure(z: &ComplexInterval) -> Result<ComplexInterval, SpecialError> {
    gamma_cx(z)
}

/// Real-argument convenience wrapper.
pub fn gamma_real(x: &Rat) -> Result<Interval, SpecialError> {
    Ok(gamma_enclosure(&ComplexInterval::from_rats(x, &Rat::from_integer(0.into())))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn c(re: Rat, im: Rat) -> ComplexInterval {
        ComplexInterval::from_rats(&re, &im)
    }

    #[test]
    fn zeta_classical() {
        let z2 = zeta(&c(int(2), int(0))).unwrap();
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((z2.re.mid_f64() - pi2_6).abs() < 1e-15);
        assert!(z2.re.width_f64() < 1e-20);
        let z0 = zeta(&c(int(0), int(0))).unwrap();
        assert!(z0.re.contains_rat(&rat(-1, 2)));
        let z = zeta(&c(int(-3), int(0))).unwrap();
        assert!(z.re.contains_rat(&rat(1, 120)), "{z}");
    }

    #[test]
    fn gamma_classical() {
        let g = gamma_real(&int(5)).unwrap();
        assert!(g.contains_rat(&int(24)) && g.width_f64() < 1e-20);
        let g = gamma_real(&rat(1, 2)).unwrap();
        assert!((g.mid_f64() - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!(gamma_real(&int(-2)).is_err());
    }
}
