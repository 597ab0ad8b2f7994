//! Mellin analysis of sums `sum_k d k^a n^b sigma(k) e^(-k^2/n)`.
//!
//! With `t = 1/n` the transform of `g_{a,b}(t) = sum_k k^a t^(-b) sigma(k) e^(-k^2 t)`
//! is `zeta(2s-2b-a-1) zeta(2s-2b-a) Gamma(s-b)`. Residues to the right of
//! the shifted line give the main term; the shifted integrals are bounded by
//! certified quadrature on `|w| <= W` and analytic estimates beyond.

pub mod line;
pub mod tail;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, to_decimal, Rat};
use crate::expansion::Expansion;
use crate::interval::{ComplexInterval, Interval};
use crate::quad::{self, QuadError};
use crate::special::{gamma_cx, zeta_cx, default_zeta_terms, Cx, SpecialError};

#[derive(Debug, Error)]
pub enum MellinError {
    #[error("exact term with non-integral n-exponent {0} cannot be transformed")]
    NonIntegral(String),
    #[error("no supported abscissa for summand (a, b) = ({a}, {b}): {reason}")]
    Abscissa { a: u32, b: i64, reason: String },
    #[error("{0} is not a pole of the transform of (a, b) = ({1}, {2})")]
    NotAPole(String, u32, i64),
    #[error("coefficient of {term} is not within {tol} of {expected}: {got}")]
    MainTerm { term: String, expected: String, tol: String, got: String },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Polynomial in `k` and `n` with integer `n`-exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnPoly {
    coeffs: BTreeMap<(u32, i64), Rat>,
}

impl KnPoly {
    pub fn from_terms<I: IntoIterator<Item = (u32, i64, Rat)>>(it: I) -> Self {
        let mut p = KnPoly::default();
        for (a, b, c) in it {
            p.add_monomial(a, b, c);
        }
        p
    }

    pub fn add_monomial(&mut self, a: u32, b: i64, c: Rat) {
        let e = self.coeffs.entry((a, b)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(a, b));
        }
    }

    pub fn mul(&self, o: &KnPoly) -> KnPoly {
        let mut p = KnPoly::default();
        for ((a1, b1), c1) in &self.coeffs {
            for ((a2, b2), c2) in &o.coeffs {
                p.add_monomial(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        p
    }

    /// Monomials `(a, b, coefficient)` with `a` then `b` ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64, &Rat)> {
        self.coeffs.iter().map(|((a, b), c)| (*a, *b, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `d * k^a * n^b * sigma(k) * e^(-k^2/n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MellinSummand {
    pub a: u32,
    pub b: i64,
    #[serde(serialize_with = "ser_rat")]
    pub d: Rat,
}

pub(crate) fn ser_rat<S: serde::Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::fmt_rat(x))
}

impl MellinSummand {
    pub fn new(a: u32, b: i64, d: Rat) -> Self {
        MellinSummand { a, b, d }
    }

    /// `a + 2b`; the zeta arguments are `2s - m - 1` and `2s - m`.
    pub fn m(&self) -> i64 {
        self.a as i64 + 2 * self.b
    }

    pub fn params(&self) -> TransformParams {
        let m = self.m();
        TransformParams {
            zeta1: Affine { scale: 2, shift: int(-m - 1) },
            zeta2: Affine { scale: 2, shift: int(-m) },
            gamma: Affine { scale: 1, shift: int(-self.b) },
        }
    }
}

/// `scale * s + shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub scale: i64,
    pub shift: Rat,
}

impl Affine {
    pub fn at(&self, s: &Rat) -> Rat {
        s * int(self.scale) + &self.shift
    }

    /// Solves `scale * s + shift = v`.
    pub fn solve(&self, v: &Rat) -> Rat {
        (v - &self.shift) / int(self.scale)
    }

    pub fn apply<T: Cx>(&self, s: &T) -> T {
        s.scale(&Interval::from_int(self.scale)).add_real(&Interval::from_rat(&self.shift))
    }
}

/// Affine arguments of the transform `zeta(zeta1) zeta(zeta2) Gamma(gamma)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformParams {
    pub zeta1: Affine,
    pub zeta2: Affine,
    pub gamma: Affine,
}

impl TransformParams {
    /// Value of the transform (without `d`) at `s`.
    pub fn eval<T: Cx>(&self, s: &T) -> Result<T, SpecialError> {
        let z1 = self.zeta1.apply(s);
        let z2 = self.zeta2.apply(s);
        let g = self.gamma.apply(s);
        let t1 = default_zeta_terms(z1.val());
        let t2 = default_zeta_terms(z2.val());
        Ok(zeta_cx(&z1, t1)?.mul(&zeta_cx(&z2, t2)?).mul(&gamma_cx(&g)?))
    }

    /// The transform as an integrand expression.
    pub fn expr(&self) -> quad::Expr {
        use quad::Expr;
        let aff = |a: &Affine| Expr::affine(int(a.scale), a.shift.clone());
        Expr::zeta(aff(&self.zeta1)).mul(Expr::zeta(aff(&self.zeta2))).mul(Expr::gamma(aff(&self.gamma)))
    }
}

/// Builds the summand list of `exact_part * multiplier`, combining like terms
/// and dropping zeros; sorted by `a`, then `b`.
pub fn extract_summands(exact_part: &Expansion, multiplier: &KnPoly) -> Result<Vec<MellinSummand>, MellinError> {
    let mut s = KnPoly::default();
    for (poly, q) in exact_part.exact_terms() {
        if !q.is_integer() {
            return Err(MellinError::NonIntegral(crate::exact::fmt_exponent(q)));
        }
        for (d, c) in poly.iter() {
            s.add_monomial(d, q.to_integer(), c.clone());
        }
    }
    Ok(s.mul(multiplier).iter().map(|(a, b, d)| MellinSummand::new(a, b, d.clone())).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PoleSource {
    /// `zeta(2s-2b-a-1)` at argument 1.
    Zeta1,
    /// `zeta(2s-2b-a)` at argument 1.
    Zeta2,
    /// `Gamma(s-b)` at argument `-j`.
    Gamma(u64),
}

/// A singularity of a summand transform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleSpec {
    #[serde(serialize_with = "ser_rat")]
    pub s0: Rat,
    /// Number of coinciding singular factors (1 or 2).
    pub order: u8,
    pub sources: Vec<PoleSource>,
    /// Zeta factors with a trivial zero at `s0`; `zeros >= order` means the
    /// singularity is removable.
    pub zeros: u8,
}

impl PoleSpec {
    pub fn is_removable(&self) -> bool {
        self.zeros >= self.order
    }
}

fn is_trivial_zero(arg: &Rat) -> bool {
    arg.is_integer() && arg.is_negative() && (arg.to_integer() % 2i32).is_zero()
}

/// All poles of the transform with `Re(s) >= sigma_min`, sorted by location
/// descending.
pub fn poles_in_halfplane(m: &MellinSummand, sigma_min: &Rat) -> Vec<PoleSpec> {
    let p = m.params();
    let one = Rat::one();
    let mut at: BTreeMap<Rat, Vec<PoleSource>> = BTreeMap::new();
    at.entry(p.zeta1.solve(&one)).or_default().push(PoleSource::Zeta1);
    at.entry(p.zeta2.solve(&one)).or_default().push(PoleSource::Zeta2);
    let mut j = 0u64;
    loop {
        let s0 = p.gamma.solve(&-int(j as i64));
        if &s0 < sigma_min {
            break;
        }
        at.entry(s0).or_default().push(PoleSource::Gamma(j));
        j += 1;
    }
    at.into_iter()
        .rev()
        .filter(|(s0, _)| s0 >= sigma_min)
        .map(|(s0, sources)| {
            let zeros = [&p.zeta1, &p.zeta2].iter().filter(|z| is_trivial_zero(&z.at(&s0))).count() as u8;
            PoleSpec { order: sources.len() as u8, sources, zeros, s0 }
        })
        .collect()
}

/// Points on the residue circles.
pub const RESIDUE_NODES: usize = 64;
/// Radius of the residue circles.
pub const RESIDUE_RADIUS: (i64, i64) = (1, 4);
/// Radius of the circle on which the transform is bounded for the aliasing estimate.
const ALIAS_RADIUS: (i64, i64) = (9, 20);
/// Number of boxes covering the aliasing circle.
const ALIAS_ARCS: usize = 96;

/// Residue of `g*(s) n^s` at `s0`, returned as the coefficients of `n^s0`
/// and of `n^s0 log n` (multiplied by `d`).
///
/// Trapezoidal rule on the circle of radius 1/4 for `(1/2 pi i) oint g*` and
/// `(1/2 pi i) oint (s - s0) g*`, with the aliasing error bounded through
/// `max |g*|` on a larger circle that stays clear of the neighbouring poles.
pub fn residue_enclosure(m: &MellinSummand, p: &PoleSpec) -> Result<(Interval, Interval), MellinError> {
    let params = m.params();
    let s0 = &p.s0;
    // poles sit on the half-integer grid, so the aliasing circle avoids the neighbours
    if !poles_in_halfplane(m, &(s0 - int(1))).iter().any(|q| &q.s0 == s0) {
        return Err(MellinError::NotAPole(crate::exact::fmt_rat(s0), m.a, m.b));
    }
    let rho = rat(RESIDUE_RADIUS.0, RESIDUE_RADIUS.1);
    let outer = rat(ALIAS_RADIUS.0, ALIAS_RADIUS.1);
    let eval = |s: &ComplexInterval| params.eval(s);
    let (i0, i1) = quad::circle_residues(&eval, s0, &rho, &outer, RESIDUE_NODES, ALIAS_ARCS)?;
    let d = Interval::from_rat(&m.d);
    // the residue of a function with real Laurent coefficients is real
    Ok((i0.re.mul(&d), i1.re.mul(&d)))
}

/// Residue table entry.
#[derive(Clone, Debug, Serialize)]
pub struct ResidueEntry {
    #[serde(serialize_with = "ser_rat")]
    pub s0: Rat,
    pub sources: Vec<PoleSource>,
    pub coefficient: [f64; 2],
    pub log_coefficient: [f64; 2],
    #[serde(skip)]
    pub enclosures: (Interval, Interval),
}

/// Residues of one summand for all poles with `Re(s) >= sigma_min`.
pub fn summand_residues(m: &MellinSummand, sigma_min: &Rat) -> Result<Vec<ResidueEntry>, MellinError> {
    poles_in_halfplane(m, sigma_min)
        .into_iter()
        .map(|p| {
            let (c0, c1) = residue_enclosure(m, &p)?;
            Ok(ResidueEntry {
                coefficient: [c0.lo_f64(), c0.hi_f64()],
                log_coefficient: [c1.lo_f64(), c1.hi_f64()],
                s0: p.s0,
                sources: p.sources,
                enclosures: (c0, c1),
            })
        })
        .collect()
}

/// Aggregated residue coefficients by power of `n`.
#[derive(Clone, Debug)]
pub struct MainTerm {
    /// `s0 -> (coefficient of n^s0, coefficient of n^s0 log n)`.
    pub coefficients: BTreeMap<Rat, (Interval, Interval)>,
    pub per_summand: Vec<Vec<ResidueEntry>>,
}

impl MainTerm {
    pub fn coefficient(&self, s0: &Rat) -> (Interval, Interval) {
        self.coefficients.get(s0).cloned().unwrap_or((Interval::zero(), Interval::zero()))
    }

    /// Checks every coefficient against `expected` (missing powers expect 0)
    /// within `tol`.
    pub fn check(&self, expected: &[(Rat, Rat)], tol: &Rat) -> Result<(), MellinError> {
        let want = |s0: &Rat| expected.iter().find(|(p, _)| p == s0).map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero);
        let mut powers: Vec<Rat> = self.coefficients.keys().cloned().collect();
        for (p, _) in expected {
            if !powers.contains(p) {
                powers.push(p.clone());
            }
        }
        for s0 in powers {
            let (c0, c1) = self.coefficient(&s0);
            for (c, target, name) in [
                (c0, want(&s0), format!("n^({})", crate::exact::fmt_rat(&s0))),
                (c1, Rat::zero(), format!("n^({}) log n", crate::exact::fmt_rat(&s0))),
            ] {
                let lo = &target - tol;
                let hi = &target + tol;
                if c.lo_rat() < lo || c.hi_rat() > hi {
                    return Err(MellinError::MainTerm {
                        term: name,
                        expected: crate::exact::fmt_rat(&target),
                        tol: to_decimal(tol, 12),
                        got: c.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Sums the residues of all summands with `Re(s0) >= sigma_min`.
pub fn main_term_residues(summands: &[MellinSummand], sigma_min: &Rat) -> Result<MainTerm, MellinError> {
    use rayon::prelude::*;
    let per_summand: Vec<Vec<ResidueEntry>> = summands
        .par_iter()
        .map(|m| summand_residues(m, sigma_min))
        .collect::<Result<_, _>>()?;
    let mut coefficients: BTreeMap<Rat, (Interval, Interval)> = BTreeMap::new();
    for entries in &per_summand {
        for e in entries {
            let slot = coefficients.entry(e.s0.clone()).or_insert_with(|| (Interval::zero(), Interval::zero()));
            slot.0 = slot.0.add(&e.enclosures.0);
            slot.1 = slot.1.add(&e.enclosures.1);
        }
    }
    Ok(MainTerm { coefficients, per_summand })
}

/// Expected main term `-n^2/8 + n/24`.
pub fn expected_main_term() -> Vec<(Rat, Rat)> {
    vec![(int(2), rat(-1, 8)), (int(1), rat(1, 24))]
}
