//! Analytic bounds for the transform on `|w| > W`.
//!
//! Every factor is bounded by `K |y|^p e^(-q |y|)` on its own vertical line
//! `x + i y`, `|y| >= Y`:
//!
//! * zeta, `x >= 3/2`: `zeta(3/2)`;
//! * zeta, `x = 1/2`: `0.618 |y|^(1/2)`, from `0.618 |y|^(1/6) log |y|` for `|y| >= 100`;
//! * zeta, `x <= -1/2`: the functional equation with `|sin(pi s/2)| <= e^(pi |y|/2)`,
//!   the gamma bound below for `Gamma(1 - s)` and `|zeta(1 - s)| <= zeta(1 - x)`;
//! * gamma, `x > 0`: `sqrt(2 pi) |z|^(x - 1/2) e^(-pi |y|/2) e^(1/(6|z|))` from
//!   Binet's remainder `|mu(z)| <= 1/(6|z|)` on `Re z > 0`;
//! * gamma, `x <= 0`: shift right by `m` and divide by `|y|^m`.

use num_traits::{Signed, ToPrimitive, Zero};

use super::{Affine, MellinError};
use crate::exact::{int, rat, Rat};
use crate::interval::{bf_to_rat, ComplexInterval, Interval};
use crate::special::{zeta, SpecialError};

/// Constant in the bound `|zeta(1/2 + i t)| <= 0.618 t^(1/6) log t`.
pub const HALF_LINE_CONSTANT: (i64, i64) = (618, 1000);

/// `K |y|^p e^(-q |y|)` for `|y| >= y_min`.
#[derive(Clone, Debug)]
pub struct Majorant {
    pub k: Interval,
    pub p: Rat,
    pub q: Interval,
}

impl Majorant {
    fn one() -> Majorant {
        Majorant { k: Interval::one(), p: Rat::zero(), q: Interval::zero() }
    }

    fn times(&self, o: &Majorant) -> Majorant {
        Majorant { k: self.k.mul(&o.k), p: &self.p + &o.p, q: self.q.add(&o.q) }
    }

    /// Upper value at `|y| = y`.
    pub fn at(&self, y: &Rat) -> Interval {
        let yi = Interval::from_rat(y);
        self.k.mul(&rpow(&yi, &self.p)).mul(&self.q.mul(&yi).neg().exp())
    }

    /// Rewrites a bound in `y = scale * w` as a bound in `w`.
    fn rescale(&self, scale: i64) -> Majorant {
        let s = Interval::from_int(scale.abs());
        Majorant { k: self.k.mul(&rpow(&s, &self.p)), p: self.p.clone(), q: self.q.mul(&s) }
    }
}

fn rpow(x: &Interval, p: &Rat) -> Interval {
    if p.is_zero() {
        return Interval::one();
    }
    x.ln().mul(&Interval::from_rat(p)).exp()
}

fn sqrt_2pi() -> Interval {
    Interval::pi().scale(&int(2)).sqrt()
}

/// Bound for `|Gamma(x + i y)|`, `|y| >= y_min > 0`.
pub fn gamma_majorant(x: &Rat, y_min: &Rat) -> Majorant {
    let shift = if x.is_positive() { 0 } else { (-x).floor().to_integer().to_i64().expect("small shift") + 1 };
    let xs = x + int(shift);
    let ym = Interval::from_rat(y_min);
    let p = &xs - rat(1, 2);
    // |z| <= |y| sqrt(1 + xs^2 / y_min^2)
    let kappa = Interval::one().add(&Interval::from_rat(&(&xs * &xs)).div(&ym.sqr())).sqrt();
    let kappa_p = if p.is_positive() { rpow(&kappa, &p) } else { Interval::one() };
    let binet = ym.scale(&int(6)).recip().exp();
    // dividing by |z (z+1) ... (z+shift-1)| >= |y|^shift turns xs - 1/2 back into x - 1/2
    Majorant {
        k: sqrt_2pi().mul(&kappa_p).mul(&binet),
        p: x - rat(1, 2),
        q: Interval::pi().scale(&rat(1, 2)),
    }
}

/// Bound for `|zeta(x + i y)|`, `|y| >= y_min`, on the supported abscissae.
pub fn zeta_majorant(x: &Rat, y_min: &Rat) -> Result<Majorant, SpecialError> {
    let half = rat(1, 2);
    if x >= &rat(3, 2) {
        let z = zeta(&ComplexInterval::from_rats(&rat(3, 2), &Rat::zero()))?;
        return Ok(Majorant { k: Interval::new(z.re.hi().clone(), z.re.hi().clone()), p: Rat::zero(), q: Interval::zero() });
    }
    if x == &half {
        assert!(y_min >= &int(100), "the half-line bound needs |y| >= 100");
        return Ok(Majorant {
            k: Interval::from_ratio(HALF_LINE_CONSTANT.0, HALF_LINE_CONSTANT.1),
            p: half,
            q: Interval::zero(),
        });
    }
    if x <= &-half.clone() {
        // |2^s pi^(s-1)| = 2^x pi^(x-1); |sin(pi s/2)| e^(-pi|y|/2) <= 1
        let one_minus = Rat::from_integer(1.into()) - x;
        let pre = rpow(&Interval::from_int(2), x).mul(&rpow(&Interval::pi(), &(x - int(1))));
        let g = gamma_majorant(&one_minus, y_min);
        let z = zeta(&ComplexInterval::from_rats(&one_minus, &Rat::zero()))?;
        let zhi = Interval::new(z.re.hi().clone(), z.re.hi().clone());
        return Ok(Majorant { k: pre.mul(&g.k).mul(&zhi), p: g.p, q: Interval::zero() });
    }
    Err(SpecialError::Divergent { s: crate::exact::fmt_rat(x), terms: 0 })
}

fn zeta_factor(x: &Rat, y_min: &Rat) -> Result<Majorant, MellinError> {
    zeta_majorant(x, y_min).map_err(|_| MellinError::Abscissa {
        a: 0,
        b: 0,
        reason: format!("zeta abscissa {} lies in an unsupported gap", crate::exact::fmt_rat(x)),
    })
}

/// Combined bound `K |w|^P e^(-lambda |w|)` of `|zeta(z1) zeta(z2) Gamma(g)|`
/// on `s = c + i w`, `|w| >= w_min`.
pub fn integrand_majorant(
    c: &Rat,
    w_min: &Rat,
    zeta_args: (&Affine, &Affine),
    gamma_arg: &Affine,
) -> Result<Majorant, MellinError> {
    let mut m = Majorant::one();
    for z in [zeta_args.0, zeta_args.1] {
        let y_min = w_min * int(z.scale.abs());
        m = m.times(&zeta_factor(&z.at(c), &y_min)?.rescale(z.scale));
    }
    let y_min = w_min * int(gamma_arg.scale.abs());
    Ok(m.times(&gamma_majorant(&gamma_arg.at(c), &y_min).rescale(gamma_arg.scale)))
}

/// Upper bound of `int_{|w| > W} |zeta(z1(s)) zeta(z2(s)) Gamma(g(s))| dw`
/// on `s = c + i w`.
///
/// With the majorant `K w^P e^(-lambda w)`, `(w/W)^P <= e^(P (w - W)/W)`
/// gives `int_W^inf <= K W^P e^(-lambda W) / (lambda - max(P, 0)/W)`; both
/// signs of `w` double it.
pub fn vertical_tail_bound(
    c: &Rat,
    w: &Rat,
    zeta_args: (&Affine, &Affine),
    gamma_arg: &Affine,
) -> Result<Rat, MellinError> {
    let m = integrand_majorant(c, w, zeta_args, gamma_arg)?;
    let wi = Interval::from_rat(w);
    let p_pos = if m.p.is_positive() { m.p.clone() } else { Rat::zero() };
    let rate = m.q.sub(&Interval::from_rat(&p_pos).div(&wi));
    if !rate.is_positive() {
        return Err(MellinError::Abscissa {
            a: 0,
            b: 0,
            reason: format!("tail does not decay from W = {}", crate::exact::fmt_rat(w)),
        });
    }
    let one_side = m.at(w).div(&rate);
    Ok(bf_to_rat(one_side.scale(&int(2)).hi()))
}
