//! Asymptotic expansions in `n` with coefficients polynomial in a dependent
//! variable `k`, where `n^alpha <= k <= n^beta`.
//!
//! Three kinds of terms live in an [`Expansion`]: exact terms `c(k) n^q`,
//! k-free O-terms, and B-terms `B(m(k) n^q, n >= N)` which stand for an
//! unknown quantity bounded in absolute value by `m(k) n^q` for all `n >= N`.
//! Terms are ordered by the upper end of their growth range (the growth
//! obtained with `k = n^beta`), then by the lower end (`k = n^alpha`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    fmt_exponent, fmt_n_power, fmt_rat, int, parse_exponent, parse_rat, pow_bounds, pow_upper,
    round_up, Exponent, Rat,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("invalid ring configuration: {0}")]
    Config(String),
    #[error("term cannot be absorbed: {0}")]
    NotAbsorbable(String),
    #[error("leading term is not an invertible k-free exact term")]
    NotInvertible,
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed serialized expansion: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingConfig {
    pub alpha: Exponent,
    pub beta: Exponent,
    pub round_digits: Option<u32>,
    pub default_prec: usize,
}

impl RingConfig {
    pub fn new(alpha: Exponent, beta: Exponent) -> Result<Self, ExpansionError> {
        if alpha < Exponent::zero() {
            return Err(ExpansionError::Config(format!("alpha = {alpha} is negative")));
        }
        if beta <= alpha {
            return Err(ExpansionError::Config(format!("beta = {beta} must exceed alpha = {alpha}")));
        }
        Ok(RingConfig { alpha, beta, round_digits: None, default_prec: 10 })
    }

    pub fn with_round_digits(mut self, digits: u32) -> Self {
        self.round_digits = Some(digits);
        self
    }

    pub fn with_default_prec(mut self, prec: usize) -> Self {
        assert!(prec > 0, "default_prec must be positive");
        self.default_prec = prec;
        self
    }
}

/// Polynomial in `k` with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct KPoly {
    coeffs: BTreeMap<u32, Rat>,
}

impl KPoly {
    pub fn zero() -> Self {
        KPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        KPoly::monomial(c, 0)
    }

    pub fn one() -> Self {
        KPoly::constant(Rat::one())
    }

    pub fn monomial(c: Rat, d: u32) -> Self {
        let mut p = KPoly::zero();
        p.add_monomial(c, d);
        p
    }

    pub fn k() -> Self {
        KPoly::monomial(Rat::one(), 1)
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Rat)>>(it: I) -> Self {
        let mut p = KPoly::zero();
        for (d, c) in it {
            p.add_monomial(c, d);
        }
        p
    }

    pub fn add_monomial(&mut self, c: Rat, d: u32) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(d).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, d: u32) -> Rat {
        self.coeffs.get(&d).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u32, &Rat)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.max_degree().is_none_or(|d| d == 0)
    }

    pub fn scale(&self, c: &Rat) -> KPoly {
        if c.is_zero() {
            return KPoly::zero();
        }
        KPoly { coeffs: self.coeffs.iter().map(|(d, x)| (*d, x * c)).collect() }
    }

    pub fn abs(&self) -> KPoly {
        KPoly { coeffs: self.coeffs.iter().map(|(d, x)| (*d, x.abs())).collect() }
    }

    pub fn abs_sum(&self) -> Rat {
        self.coeffs.values().fold(Rat::zero(), |acc, c| acc + c.abs())
    }

    pub fn add(&self, other: &KPoly) -> KPoly {
        let mut out = self.clone();
        for (d, c) in other.iter() {
            out.add_monomial(c.clone(), d);
        }
        out
    }

    pub fn mul(&self, other: &KPoly) -> KPoly {
        let mut out = KPoly::zero();
        for (d1, c1) in self.iter() {
            for (d2, c2) in other.iter() {
                out.add_monomial(c1 * c2, d1 + d2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> KPoly {
        (0..e).fold(KPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, k: &Rat) -> Rat {
        // Horner from the top degree
        let mut acc = Rat::zero();
        let mut last = match self.max_degree() {
            Some(d) => d,
            None => return acc,
        };
        for (d, c) in self.coeffs.iter().rev() {
            for _ in *d..last {
                acc *= k;
            }
            acc += c;
            last = *d;
        }
        for _ in 0..last {
            acc *= k;
        }
        acc
    }

    pub fn monomials(&self) -> impl Iterator<Item = KPoly> + '_ {
        self.iter().map(|(d, c)| KPoly::monomial(c.clone(), d))
    }

    fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> KPoly {
        KPoly::from_coeffs(self.iter().map(|(d, c)| (d, f(c))))
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            write!(f, "{}", fmt_monomial(&c.abs(), *d))?;
        }
        Ok(())
    }
}

fn fmt_monomial(c: &Rat, d: u32) -> String {
    let kpart = match d {
        0 => None,
        1 => Some("k".to_string()),
        _ => Some(format!("k^{d}")),
    };
    match (c.is_one(), kpart) {
        (_, None) => fmt_rat(c),
        (true, Some(k)) => k,
        (false, Some(k)) => format!("{}*{}", fmt_rat(c), k),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthRange {
    pub lower: Exponent,
    pub upper: Exponent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Exact { coeff: KPoly, q: Exponent },
    O { q: Exponent },
    B { majorant: KPoly, q: Exponent, valid_from: u64 },
}

impl Term {
    pub fn exact(coeff: KPoly, q: Exponent) -> Term {
        Term::Exact { coeff, q }
    }

    pub fn bterm(majorant: KPoly, q: Exponent, valid_from: u64) -> Term {
        assert!(valid_from >= 1, "valid_from must be positive");
        assert!(
            majorant.iter().all(|(_, c)| !c.is_negative()),
            "B-term majorants have non-negative coefficients"
        );
        Term::B { majorant, q, valid_from }
    }

    pub fn q(&self) -> Exponent {
        match self {
            Term::Exact { q, .. } | Term::O { q } | Term::B { q, .. } => *q,
        }
    }

    /// Coefficient polynomial (majorant for B-terms, `1` for O-terms).
    pub fn poly(&self) -> KPoly {
        match self {
            Term::Exact { coeff, .. } => coeff.clone(),
            Term::B { majorant, .. } => majorant.clone(),
            Term::O { .. } => KPoly::one(),
        }
    }

    pub fn is_error(&self) -> bool {
        !matches!(self, Term::Exact { .. })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Term::Exact { coeff, .. } => coeff.is_zero(),
            Term::B { majorant, .. } => majorant.is_zero(),
            Term::O { .. } => false,
        }
    }

    pub fn valid_from(&self) -> u64 {
        match self {
            Term::B { valid_from, .. } => *valid_from,
            _ => 1,
        }
    }

    pub fn growth_range(&self, cfg: &RingConfig) -> GrowthRange {
        growth_range(self, cfg)
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Exact { .. } => 0,
            Term::B { .. } => 1,
            Term::O { .. } => 2,
        }
    }
}

pub fn growth_range(t: &Term, cfg: &RingConfig) -> GrowthRange {
    let q = t.q();
    match t {
        Term::O { .. } => GrowthRange { lower: q, upper: q },
        _ => {
            let p = t.poly();
            let lo = p.min_degree().unwrap_or(0) as i64;
            let hi = p.max_degree().unwrap_or(0) as i64;
            GrowthRange { lower: q + cfg.alpha * lo, upper: q + cfg.beta * hi }
        }
    }
}

/// Descending by (upper, lower); exact terms before B-terms before O-terms on ties.
fn term_order(a: &Term, b: &Term, cfg: &RingConfig) -> Ordering {
    let ga = growth_range(a, cfg);
    let gb = growth_range(b, cfg);
    gb.upper
        .cmp(&ga.upper)
        .then(gb.lower.cmp(&ga.lower))
        .then(a.rank().cmp(&b.rank()))
        .then(b.q().cmp(&a.q()))
        .then_with(|| {
            let da = a.poly().max_degree();
            let db = b.poly().max_degree();
            db.cmp(&da)
        })
}

/// Two-sided growth test, plus, when `alpha > 0`, a per-monomial check that
/// the absorption estimates below actually apply.
pub fn can_absorb(b: &Term, t: &Term, cfg: &RingConfig) -> bool {
    let Term::B { majorant, q: qb, .. } = b else {
        return false;
    };
    if t.is_zero() {
        return true;
    }
    if matches!(t, Term::O { .. }) {
        return false;
    }
    let gb = growth_range(b, cfg);
    let gt = growth_range(t, cfg);
    if !(gt.upper <= gb.upper && gt.lower <= gb.lower) {
        return false;
    }
    if cfg.alpha.is_zero() {
        return true;
    }
    let dmax = majorant.max_degree().unwrap_or(0);
    let p = t.poly();
    fit_monomial(p.max_degree().unwrap_or(0), t.q(), dmax, *qb, cfg).is_some()
        || p.iter().all(|(d, _)| fit_monomial(d, t.q(), dmax, *qb, cfg).is_some())
}

/// Moves `k^d n^p` onto a monomial `k^d' n^p'` with `d' <= dmax` and `p' <= q`,
/// using `k <= n^beta` to lower the degree and `k >= n^alpha` to lower the
/// n-exponent. Returns `(d', p')`.
fn fit_monomial(d: u32, p: Exponent, dmax: u32, q: Exponent, cfg: &RingConfig) -> Option<(u32, Exponent)> {
    let mut d = d;
    let mut p = p;
    if d > dmax {
        p += cfg.beta * ((d - dmax) as i64);
        d = dmax;
    }
    if p > q {
        if cfg.alpha.is_zero() {
            return None;
        }
        let need = ((p - q) / cfg.alpha).ceil().to_integer();
        let need = u32::try_from(need).ok()?;
        if d + need > dmax {
            return None;
        }
        d += need;
        p -= cfg.alpha * (need as i64);
    }
    Some((d, p))
}

fn round_poly(p: &KPoly, digits: Option<u32>) -> KPoly {
    p.map_coeffs(|c| round_up(c, digits))
}

/// Adds `c k^d n^p` (with `c >= 0`) to the majorant of a B-term at exponent `q`.
fn absorb_monomial(
    majorant: &mut KPoly,
    q: Exponent,
    valid_from: u64,
    c: Rat,
    d: u32,
    p: Exponent,
    cfg: &RingConfig,
) -> Result<(), ExpansionError> {
    let dmax = majorant.max_degree().unwrap_or(0);
    let (d2, p2) = fit_monomial(d, p, dmax, q, cfg)
        .ok_or_else(|| ExpansionError::NotAbsorbable(format!("k^{d}*n^({p}) into n^({q})")))?;
    let lift = if p2 == q { Rat::one() } else { pow_upper(&int(valid_from as i64), p2 - q) };
    majorant.add_monomial(c * lift, d2);
    *majorant = round_poly(majorant, cfg.round_digits);
    Ok(())
}

pub fn absorb_into_bterm(b: &Term, t: &Term, cfg: &RingConfig) -> Result<Term, ExpansionError> {
    if !can_absorb(b, t, cfg) {
        return Err(ExpansionError::NotAbsorbable(format!("{t:?} into {b:?}")));
    }
    let Term::B { majorant, q, valid_from } = b else { unreachable!() };
    if t.is_zero() {
        return Ok(b.clone());
    }
    let vf = (*valid_from).max(t.valid_from());
    let poly = t.poly();
    let p = t.q();
    let dt = poly.max_degree().unwrap_or(0);
    let mut m = majorant.clone();
    let whole = absorb_monomial(&mut m, *q, vf, poly.abs_sum(), dt, p, cfg);
    if whole.is_err() {
        // only reachable with alpha > 0: place each monomial separately
        m = majorant.clone();
        for (d, c) in poly.iter() {
            absorb_monomial(&mut m, *q, vf, c.abs(), d, p, cfg)?;
        }
    }
    Ok(Term::B { majorant: m, q: *q, valid_from: vf })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    config: RingConfig,
    terms: Vec<Term>,
}

impl Expansion {
    pub fn zero(cfg: &RingConfig) -> Self {
        Expansion { config: cfg.clone(), terms: Vec::new() }
    }

    pub fn from_terms(cfg: &RingConfig, terms: Vec<Term>) -> Self {
        Expansion { config: cfg.clone(), terms: normalize(cfg, terms) }
    }

    pub fn term(cfg: &RingConfig, t: Term) -> Self {
        Self::from_terms(cfg, vec![t])
    }

    pub fn constant(cfg: &RingConfig, c: Rat) -> Self {
        Self::term(cfg, Term::exact(KPoly::constant(c), Exponent::zero()))
    }

    pub fn one(cfg: &RingConfig) -> Self {
        Self::constant(cfg, Rat::one())
    }

    /// `c(k) n^q`.
    pub fn monomial(cfg: &RingConfig, coeff: KPoly, q: Exponent) -> Self {
        Self::term(cfg, Term::exact(coeff, q))
    }

    pub fn n_pow(cfg: &RingConfig, q: Exponent) -> Self {
        Self::monomial(cfg, KPoly::one(), q)
    }

    pub fn k(cfg: &RingConfig) -> Self {
        Self::monomial(cfg, KPoly::k(), Exponent::zero())
    }

    pub fn o_term(cfg: &RingConfig, q: Exponent) -> Self {
        Self::term(cfg, Term::O { q })
    }

    pub fn b_term(cfg: &RingConfig, majorant: KPoly, q: Exponent, valid_from: u64) -> Self {
        Self::term(cfg, Term::bterm(majorant, q, valid_from))
    }

    pub fn config(&self) -> &RingConfig {
        &self.config
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exact_terms(&self) -> impl Iterator<Item = (&KPoly, Exponent)> {
        self.terms.iter().filter_map(|t| match t {
            Term::Exact { coeff, q } => Some((coeff, *q)),
            _ => None,
        })
    }

    pub fn exact_part(&self) -> Expansion {
        let terms = self.terms.iter().filter(|t| !t.is_error()).cloned().collect();
        Expansion { config: self.config.clone(), terms }
    }

    pub fn error_part(&self) -> Expansion {
        let terms = self.terms.iter().filter(|t| t.is_error()).cloned().collect();
        Expansion { config: self.config.clone(), terms }
    }

    pub fn has_o_term(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::O { .. }))
    }

    pub fn max_valid_from(&self) -> u64 {
        self.terms.iter().map(Term::valid_from).max().unwrap_or(1)
    }

    /// Largest upper growth over all terms; `None` for the zero expansion.
    pub fn upper_growth(&self) -> Option<Exponent> {
        self.terms.iter().map(|t| growth_range(t, &self.config).upper).max()
    }

    fn check_config(&self, other: &Expansion) {
        assert_eq!(self.config, other.config, "expansions from different rings");
    }

    pub fn add(&self, other: &Expansion) -> Expansion {
        self.check_config(other);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expansion::from_terms(&self.config, terms)
    }

    pub fn neg(&self) -> Expansion {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Exact { coeff, q } => Term::Exact { coeff: coeff.scale(&-Rat::one()), q: *q },
                other => other.clone(),
            })
            .collect();
        Expansion { config: self.config.clone(), terms }
    }

    pub fn sub(&self, other: &Expansion) -> Expansion {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Expansion {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Exact { coeff, q } => Term::Exact { coeff: coeff.scale(c), q: *q },
                Term::B { majorant, q, valid_from } => {
                    Term::B { majorant: majorant.scale(&c.abs()), q: *q, valid_from: *valid_from }
                }
                other => other.clone(),
            })
            .collect();
        Expansion::from_terms(&self.config, terms)
    }

    pub fn mul(&self, other: &Expansion) -> Expansion {
        self.check_config(other);
        Expansion::from_terms(&self.config, raw_product(&self.terms, &other.terms, &self.config))
    }

    pub fn pow(&self, e: u32) -> Expansion {
        let mut acc = Expansion::one(&self.config);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Replaces every term by a B-term on its absolute coefficients; O-terms
    /// have no explicit constant and are rejected.
    pub fn abs_majorant(&self, valid_from: u64) -> Result<Expansion, ExpansionError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            match t {
                Term::Exact { coeff, q } => terms.push(Term::bterm(coeff.abs(), *q, valid_from)),
                Term::B { majorant, q, valid_from: v } => {
                    terms.push(Term::bterm(majorant.clone(), *q, valid_from.max(*v)))
                }
                Term::O { .. } => {
                    return Err(ExpansionError::Unsupported(
                        "O-terms carry no explicit constant".to_string(),
                    ))
                }
            }
        }
        Ok(Expansion::from_terms(&self.config, terms))
    }

    /// Rational bounds `(lo, hi)` of the envelope at integer `n` and rational `k`:
    /// exact part minus/plus the sum of all B-term majorants. O-terms are rejected.
    pub fn envelope(&self, n: u64, k: &Rat) -> Result<(Rat, Rat), ExpansionError> {
        if k.is_negative() {
            return Err(ExpansionError::Unsupported(format!("k = {k} lies below n^alpha")));
        }
        let nn = int(n as i64);
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for t in &self.terms {
            let (plo, phi) = pow_bounds(&nn, t.q());
            match t {
                Term::Exact { coeff, .. } => {
                    let c = coeff.eval(k);
                    if c.is_negative() {
                        lo += &c * &phi;
                        hi += &c * &plo;
                    } else {
                        lo += &c * &plo;
                        hi += &c * &phi;
                    }
                }
                Term::B { majorant, .. } => {
                    let m = majorant.eval(k) * &phi;
                    lo -= &m;
                    hi += &m;
                }
                Term::O { .. } => {
                    return Err(ExpansionError::Unsupported(
                        "envelope of an expansion with an O-term".to_string(),
                    ))
                }
            }
        }
        Ok((lo, hi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SerialExpansion::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Expansion, ExpansionError> {
        let s: SerialExpansion =
            serde_json::from_value(v.clone()).map_err(|e| ExpansionError::Parse(e.to_string()))?;
        s.into_expansion()
    }
}

/// Termwise product with like terms merged but no absorption or rounding.
pub(crate) fn raw_product(a: &[Term], b: &[Term], cfg: &RingConfig) -> Vec<Term> {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            terms.push(mul_terms(x, y, cfg));
        }
    }
    merge_like(terms)
}

/// Sums exact terms and B-terms sharing an exponent and keeps the strongest
/// O-term; no absorption and no rounding.
pub(crate) fn merge_like(terms: Vec<Term>) -> Vec<Term> {
    let mut exact: BTreeMap<Exponent, KPoly> = BTreeMap::new();
    let mut bterms: BTreeMap<Exponent, (KPoly, u64)> = BTreeMap::new();
    let mut oq: Option<Exponent> = None;
    for t in terms {
        match t {
            Term::Exact { coeff, q } => {
                let e = exact.entry(q).or_default();
                *e = e.add(&coeff);
            }
            Term::B { majorant, q, valid_from } => {
                let e = bterms.entry(q).or_insert_with(|| (KPoly::zero(), valid_from));
                e.0 = e.0.add(&majorant);
                e.1 = e.1.max(valid_from);
            }
            Term::O { q } => oq = Some(oq.map_or(q, |o| o.max(q))),
        }
    }
    let mut out: Vec<Term> = exact
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(q, coeff)| Term::Exact { coeff, q })
        .collect();
    out.extend(
        bterms
            .into_iter()
            .filter(|(_, (m, _))| !m.is_zero())
            .map(|(q, (majorant, valid_from))| Term::B { majorant, q, valid_from }),
    );
    out.extend(oq.map(|q| Term::O { q }));
    out
}

fn mul_terms(a: &Term, b: &Term, cfg: &RingConfig) -> Term {
    use Term::*;
    match (a, b) {
        (Exact { coeff: c1, q: q1 }, Exact { coeff: c2, q: q2 }) => Exact { coeff: c1.mul(c2), q: q1 + q2 },
        (Exact { coeff, q: q1 }, B { majorant, q: q2, valid_from })
        | (B { majorant, q: q2, valid_from }, Exact { coeff, q: q1 }) => {
            B { majorant: coeff.abs().mul(majorant), q: q1 + q2, valid_from: *valid_from }
        }
        (B { majorant: m1, q: q1, valid_from: v1 }, B { majorant: m2, q: q2, valid_from: v2 }) => {
            B { majorant: m1.mul(m2), q: q1 + q2, valid_from: (*v1).max(*v2) }
        }
        (O { q: q1 }, O { q: q2 }) => O { q: q1 + q2 },
        (O { q }, t) | (t, O { q }) => {
            if t.is_zero() {
                Exact { coeff: KPoly::zero(), q: Exponent::zero() }
            } else {
                O { q: q + growth_range(t, cfg).upper }
            }
        }
    }
}

/// Merges like terms, sorts, and lets error terms absorb weaker terms,
/// weakest first, each into the eligible absorber of largest upper growth.
fn normalize(cfg: &RingConfig, terms: Vec<Term>) -> Vec<Term> {
    let mut exact: BTreeMap<Exponent, KPoly> = BTreeMap::new();
    let mut bterms: BTreeMap<Exponent, (KPoly, u64, usize)> = BTreeMap::new();
    let mut oq: Option<Exponent> = None;
    for t in terms {
        match t {
            Term::Exact { coeff, q } => {
                let e = exact.entry(q).or_default();
                *e = e.add(&coeff);
            }
            Term::B { majorant, q, valid_from } => {
                let e = bterms.entry(q).or_insert_with(|| (KPoly::zero(), valid_from, 0));
                e.0 = e.0.add(&majorant);
                e.1 = e.1.max(valid_from);
                e.2 += 1;
            }
            Term::O { q } => oq = Some(oq.map_or(q, |o| o.max(q))),
        }
    }
    let mut list: Vec<Term> = Vec::new();
    for (q, coeff) in exact {
        if !coeff.is_zero() {
            list.push(Term::Exact { coeff, q });
        }
    }
    for (q, (majorant, valid_from, count)) in bterms {
        if majorant.is_zero() {
            continue;
        }
        let majorant = if count > 1 { round_poly(&majorant, cfg.round_digits) } else { majorant };
        list.push(Term::B { majorant, q, valid_from });
    }
    if let Some(q) = oq {
        list.push(Term::O { q });
    }
    absorb_pass(cfg, list)
}

fn absorb_pass(cfg: &RingConfig, mut list: Vec<Term>) -> Vec<Term> {
    list.sort_by(|a, b| term_order(a, b, cfg));
    let len = list.len();
    let mut alive = vec![true; len];
    for i in (0..len).rev() {
        if matches!(list[i], Term::O { .. }) {
            continue;
        }
        if let Some(j) = pick_absorber(cfg, &list, &alive, i, |j| {
            !(matches!(list[i], Term::B { .. }) && j > i)
        }) {
            if let Term::B { .. } = list[j] {
                list[j] = absorb_into_bterm(&list[j], &list[i], cfg).expect("eligibility checked");
            }
            alive[i] = false;
        }
    }
    let mut out: Vec<Term> = list.into_iter().zip(alive).filter(|(_, a)| *a).map(|(t, _)| t).collect();
    out.sort_by(|a, b| term_order(a, b, cfg));
    out
}

/// Index of the error term that should absorb `list[i]`, if any.
fn pick_absorber(
    cfg: &RingConfig,
    list: &[Term],
    alive: &[bool],
    i: usize,
    allowed: impl Fn(usize) -> bool,
) -> Option<usize> {
    let t = &list[i];
    let gt = growth_range(t, cfg);
    let mut best: Option<(Exponent, u8, usize)> = None;
    for (j, cand) in list.iter().enumerate() {
        if j == i || !alive[j] || !allowed(j) {
            continue;
        }
        let ok = match cand {
            Term::O { q } => gt.upper <= *q,
            Term::B { .. } => can_absorb(cand, t, cfg),
            Term::Exact { .. } => false,
        };
        if !ok {
            continue;
        }
        let key = (growth_range(cand, cfg).upper, cand.rank(), j);
        let better = match &best {
            None => true,
            Some((u, r, _)) => key.0 > *u || (key.0 == *u && key.1 < *r),
        };
        if better {
            best = Some(key);
        }
    }
    best.map(|(_, _, j)| j)
}

/// Splits exact coefficients into monomials, lets B- and O-terms absorb every
/// eligible monomial, and regroups the remaining monomials by exponent. Two
/// monomials with the same exponent stay separate when an error term sits
/// between them in the term order.
pub fn simplify_expansion(x: &Expansion) -> Expansion {
    let cfg = &x.config;
    let mut items: Vec<Term> = Vec::new();
    for t in &x.terms {
        match t {
            Term::Exact { coeff, q } => {
                items.extend(coeff.monomials().map(|m| Term::Exact { coeff: m, q: *q }))
            }
            other => items.push(other.clone()),
        }
    }
    items.sort_by(|a, b| term_order(a, b, cfg));
    let len = items.len();
    let mut alive = vec![true; len];
    for i in (0..len).rev() {
        if items[i].is_error() {
            continue;
        }
        if let Some(j) = pick_absorber(cfg, &items, &alive, i, |_| true) {
            if let Term::B { .. } = items[j] {
                items[j] = absorb_into_bterm(&items[j], &items[i], cfg).expect("eligibility checked");
            }
            alive[i] = false;
        }
    }
    let mut rest: Vec<Term> = items.into_iter().zip(alive).filter(|(_, a)| *a).map(|(t, _)| t).collect();
    rest.sort_by(|a, b| term_order(a, b, cfg));
    // regroup exact monomials band by band
    let mut out: Vec<Term> = Vec::new();
    let mut band: BTreeMap<Exponent, KPoly> = BTreeMap::new();
    let flush = |band: &mut BTreeMap<Exponent, KPoly>, out: &mut Vec<Term>| {
        for (q, coeff) in std::mem::take(band) {
            if !coeff.is_zero() {
                out.push(Term::Exact { coeff, q });
            }
        }
    };
    for t in rest {
        match t {
            Term::Exact { coeff, q } => {
                let e = band.entry(q).or_default();
                *e = e.add(&coeff);
            }
            err => {
                flush(&mut band, &mut out);
                out.push(err);
            }
        }
    }
    flush(&mut band, &mut out);
    out.sort_by(|a, b| term_order(a, b, cfg));
    Expansion { config: cfg.clone(), terms: out }
}

/// Substitutes `k -> n^beta` inside every B-term and merges all B-terms into a
/// single k-free B-term at the largest resulting exponent; exact monomials
/// that fall under it are absorbed as well. Constants are rounded after
/// every step.
pub fn collapse_bterm_growth(x: &Expansion) -> Result<Expansion, ExpansionError> {
    let cfg = &x.config;
    let simplified = simplify_expansion(x);
    let bterms: Vec<&Term> = simplified.terms.iter().filter(|t| matches!(t, Term::B { .. })).collect();
    if bterms.is_empty() {
        return Err(ExpansionError::Unsupported("no B-term to collapse".to_string()));
    }
    let top = bterms.iter().map(|t| growth_range(t, cfg).upper).max().expect("non-empty");
    let vf = bterms.iter().map(|t| t.valid_from()).max().expect("non-empty");
    let vfr = int(vf as i64);
    let mut constant = Rat::zero();
    let mut add = |c: Rat, exponent: Exponent| {
        let lift = if exponent == top { Rat::one() } else { pow_upper(&vfr, exponent - top) };
        constant = round_up(&(&constant + c * lift), cfg.round_digits);
    };
    let mut ordered = bterms.clone();
    ordered.sort_by(|a, b| term_order(a, b, cfg));
    for t in &ordered {
        let Term::B { majorant, q, .. } = t else { unreachable!() };
        for (d, c) in majorant.iter().rev() {
            add(c.clone(), *q + cfg.beta * (d as i64));
        }
    }
    let mut remaining = Vec::new();
    let candidate = Term::B { majorant: KPoly::one(), q: top, valid_from: vf };
    for t in &simplified.terms {
        match t {
            Term::B { .. } => {}
            Term::Exact { coeff, q } => {
                let mut keep = KPoly::zero();
                for (d, c) in coeff.iter().rev() {
                    let mono = Term::Exact { coeff: KPoly::monomial(c.clone(), d), q: *q };
                    if can_absorb(&candidate, &mono, cfg) {
                        add(c.abs(), *q + cfg.beta * (d as i64));
                    } else {
                        keep.add_monomial(c.clone(), d);
                    }
                }
                if !keep.is_zero() {
                    remaining.push(Term::Exact { coeff: keep, q: *q });
                }
            }
            Term::O { .. } => remaining.push(t.clone()),
        }
    }
    remaining.push(Term::B { majorant: KPoly::constant(constant), q: top, valid_from: vf });
    remaining.sort_by(|a, b| term_order(a, b, cfg));
    Ok(Expansion { config: cfg.clone(), terms: remaining })
}

/// `1/x` by geometric-series inversion around the leading exact k-free term,
/// keeping `prec` terms. The truncation error is an O-term, or a B-term
/// valid from `bterm_valid_from` when given.
pub fn invert_leading_kfree(
    x: &Expansion,
    prec: usize,
    bterm_valid_from: Option<u64>,
) -> Result<Expansion, ExpansionError> {
    let cfg = &x.config;
    let (c, q) = match x.terms.first() {
        Some(Term::Exact { coeff, q }) if coeff.is_constant() => (coeff.coeff(0), *q),
        _ => return Err(ExpansionError::NotInvertible),
    };
    let lead_inv = Expansion::monomial(cfg, KPoly::constant(c.recip()), -q);
    // x = c n^q (1 + y)
    let y = x.mul(&lead_inv).sub(&Expansion::one(cfg));
    if y.is_zero() {
        return Ok(lead_inv);
    }
    let neg_y = y.neg();
    let series = match bterm_valid_from {
        Some(vf) => crate::taylor::taylor_with_explicit_error(
            &crate::taylor::Kernel::Geometric,
            &neg_y,
            prec as u32,
            vf,
        )
        .map_err(|e| ExpansionError::Unsupported(e.to_string()))?,
        None => crate::taylor::series_with_o_term(&crate::taylor::Kernel::Geometric, &neg_y, prec)
            .map_err(|e| ExpansionError::Unsupported(e.to_string()))?,
    };
    Ok(series.mul(&lead_inv))
}

impl Expansion {
    /// `self / other` with `other` inverted to `default_prec` terms.
    pub fn div(&self, other: &Expansion) -> Result<Expansion, ExpansionError> {
        let inv = invert_leading_kfree(other, self.config.default_prec, None)?;
        Ok(self.mul(&inv))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::O { q } => match fmt_n_power("n", *q) {
                Some(np) => write!(f, "O({np})"),
                None => write!(f, "O(1)"),
            },
            Term::Exact { coeff, q } => {
                let np = fmt_n_power("n", *q);
                if coeff.len() == 1 {
                    let (d, c) = coeff.iter().next().expect("one monomial");
                    let sign = if c.is_negative() { "-" } else { "" };
                    let c = c.abs();
                    match np {
                        None => write!(f, "{sign}{}", fmt_monomial(&c, d)),
                        Some(np) if c.is_one() && d == 0 => write!(f, "{sign}{np}"),
                        Some(np) => write!(f, "{sign}{}*{np}", fmt_monomial(&c, d)),
                    }
                } else {
                    match np {
                        None => write!(f, "{coeff}"),
                        Some(np) => write!(f, "({coeff})*{np}"),
                    }
                }
            }
            Term::B { majorant, q, valid_from } => {
                let np = fmt_n_power("n", *q);
                let body = if majorant.is_constant() {
                    let c = majorant.coeff(0);
                    match np {
                        None => fmt_rat(&c),
                        Some(np) if c.is_one() => np,
                        Some(np) => format!("{}*{np}", fmt_rat(&c)),
                    }
                } else if majorant.len() == 1 {
                    let (d, c) = majorant.iter().next().expect("one monomial");
                    let kpart = fmt_monomial(&Rat::one(), d);
                    let head = if c.is_one() {
                        format!("abs({kpart})")
                    } else {
                        format!("{}*abs({kpart})", fmt_rat(c))
                    };
                    match np {
                        None => head,
                        Some(np) => format!("{head}*{np}"),
                    }
                } else {
                    match np {
                        None => format!("abs({majorant})"),
                        Some(np) => format!("(abs({majorant}))*{np}"),
                    }
                };
                write!(f, "B({body}, n >= {valid_from})")
            }
        }
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let s = t.to_string();
            if i == 0 {
                write!(f, "{s}")?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Expansion {
    type Output = Expansion;
    fn add(self, rhs: &Expansion) -> Expansion {
        Expansion::add(self, rhs)
    }
}

impl std::ops::Sub for &Expansion {
    type Output = Expansion;
    fn sub(self, rhs: &Expansion) -> Expansion {
        Expansion::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expansion {
    type Output = Expansion;
    fn mul(self, rhs: &Expansion) -> Expansion {
        Expansion::mul(self, rhs)
    }
}

impl std::ops::Neg for &Expansion {
    type Output = Expansion;
    fn neg(self) -> Expansion {
        Expansion::neg(self)
    }
}

#[derive(Serialize, Deserialize)]
struct SerialExpansion {
    alpha: String,
    beta: String,
    round_digits: Option<u32>,
    default_prec: usize,
    terms: Vec<SerialTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SerialTerm {
    Exact { coeff: BTreeMap<String, String>, q: String },
    O { q: String },
    B { majorant: BTreeMap<String, String>, q: String, valid_from: u64 },
}

// degrees are string keys: the tagged enum buffers its content, and buffered
// map keys do not parse as integers
fn poly_to_map(p: &KPoly) -> BTreeMap<String, String> {
    p.iter().map(|(d, c)| (d.to_string(), fmt_rat(c))).collect()
}

fn map_to_poly(m: &BTreeMap<String, String>) -> Result<KPoly, ExpansionError> {
    let mut p = KPoly::zero();
    for (d, s) in m {
        let d: u32 = d.parse().map_err(|_| ExpansionError::Parse(format!("degree {d}")))?;
        let c = parse_rat(s).ok_or_else(|| ExpansionError::Parse(format!("coefficient {s}")))?;
        p.add_monomial(c, d);
    }
    Ok(p)
}

fn parse_q(s: &str) -> Result<Exponent, ExpansionError> {
    parse_exponent(s).ok_or_else(|| ExpansionError::Parse(format!("exponent {s}")))
}

impl From<&Expansion> for SerialExpansion {
    fn from(x: &Expansion) -> Self {
        SerialExpansion {
            alpha: fmt_exponent(x.config.alpha),
            beta: fmt_exponent(x.config.beta),
            round_digits: x.config.round_digits,
            default_prec: x.config.default_prec,
            terms: x
                .terms
                .iter()
                .map(|t| match t {
                    Term::Exact { coeff, q } => SerialTerm::Exact { coeff: poly_to_map(coeff), q: fmt_exponent(*q) },
                    Term::O { q } => SerialTerm::O { q: fmt_exponent(*q) },
                    Term::B { majorant, q, valid_from } => SerialTerm::B {
                        majorant: poly_to_map(majorant),
                        q: fmt_exponent(*q),
                        valid_from: *valid_from,
                    },
                })
                .collect(),
        }
    }
}

impl SerialExpansion {
    fn into_expansion(self) -> Result<Expansion, ExpansionError> {
        let mut cfg = RingConfig::new(parse_q(&self.alpha)?, parse_q(&self.beta)?)?;
        cfg.round_digits = self.round_digits;
        cfg.default_prec = self.default_prec;
        let mut terms = Vec::new();
        for t in self.terms {
            terms.push(match t {
                SerialTerm::Exact { coeff, q } => Term::Exact { coeff: map_to_poly(&coeff)?, q: parse_q(&q)? },
                SerialTerm::O { q } => Term::O { q: parse_q(&q)? },
                SerialTerm::B { majorant, q, valid_from } => {
                    let m = map_to_poly(&majorant)?;
                    if m.iter().any(|(_, c)| c.is_negative()) || valid_from == 0 {
                        return Err(ExpansionError::Parse("invalid B-term".to_string()));
                    }
                    Term::B { majorant: m, q: parse_q(&q)?, valid_from }
                }
            });
        }
        Ok(Expansion { config: cfg, terms })
    }
}

/// Value of a k-free exponent as `f64`, for diagnostics.
pub fn exponent_f64(q: Exponent) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat_to_u64(x: &Rat) -> Option<u64> {
    if x.is_integer() {
        x.numer().to_u64()
    } else {
        None
    }
}
