//! Certified integration: adaptive quadrature along vertical segments and
//! trapezoidal residues on circles.
//!
//! Integrands are expression trees over the complex variable `s`, evaluated
//! on rectangles or on jets. A panel `[w0, w1]` with centre `wc` and radius
//! `r` uses the Taylor form `f(wc + t) = A + B t + R(t)`, `|R| <= t^2 M/2`,
//! with `A`, `B` from a first-order jet at the centre and `M` bounding `|f''|`
//! from a second-order jet over the panel. For `Re f` this gives
//! `int = 2r Re A + [-1, 1] r^3 M/3`; for `|f|`, convexity of `|A + B t|`
//! gives `2r|A| - r^3 M/3 <= int <= r(|A - Br| + |A + Br|) + r^3 M/3`.
//! Both are intersected with the plain first-order and box enclosures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exact::{int, rat, Rat};
use crate::interval::{ComplexInterval, Interval};
use crate::special::{default_zeta_terms, gamma_cx, zeta_cx, Cx, Jet, Jet2, SpecialError};

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("empty or reversed segment [{0}, {1}]")]
    Segment(String, String),
    #[error("integrand not defined on the panel: {0}")]
    Special(#[from] SpecialError),
    #[error("integrand enclosure is not finite on [{0}, {1}]")]
    NotFinite(f64, f64),
}

/// Expression in the complex variable `s`.
#[derive(Clone, Debug)]
pub enum Expr {
    Var,
    Const(ComplexInterval),
    /// `a s + b` with rational `a`, `b`.
    Affine(Rat, Rat),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Zeta(Box<Expr>),
    Gamma(Box<Expr>),
}

impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(c: ComplexInterval) -> Expr {
        Expr::Const(c)
    }

    pub fn affine(a: Rat, b: Rat) -> Expr {
        Expr::Affine(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(o))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn zeta(arg: Expr) -> Expr {
        Expr::Zeta(Box::new(arg))
    }

    pub fn gamma(arg: Expr) -> Expr {
        Expr::Gamma(Box::new(arg))
    }

    pub fn eval<T: Cx>(&self, s: &T) -> Result<T, SpecialError> {
        Ok(match self {
            Expr::Var => s.clone(),
            Expr::Const(c) => T::cst(c.clone()),
            Expr::Affine(a, b) => s.scale(&Interval::from_rat(a)).add_real(&Interval::from_rat(b)),
            Expr::Add(x, y) => x.eval(s)?.add(&y.eval(s)?),
            Expr::Mul(x, y) => x.eval(s)?.mul(&y.eval(s)?),
            Expr::Div(x, y) => x.eval(s)?.div(&y.eval(s)?),
            Expr::Exp(x) => x.eval(s)?.exp(),
            Expr::Zeta(x) => {
                let z = x.eval(s)?;
                let terms = default_zeta_terms(z.val());
                zeta_cx(&z, terms)?
            }
            Expr::Gamma(x) => gamma_cx(&x.eval(s)?)?,
        })
    }
}

/// Real quantity integrated along the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Abs,
}

#[derive(Clone, Debug)]
pub struct Integrand {
    pub expr: Expr,
    pub part: Part,
}

impl Integrand {
    pub fn re(expr: Expr) -> Self {
        Integrand { expr, part: Part::Re }
    }

    pub fn abs(expr: Expr) -> Self {
        Integrand { expr, part: Part::Abs }
    }
}

/// Result of [`line_segment_enclosure`].
#[derive(Clone, Debug)]
pub struct SegmentEnclosure {
    pub enclosure: Interval,
    pub width: f64,
    pub panels: usize,
    /// Set when the panel limit stopped the refinement before `tol` was met.
    pub limit_hit: bool,
}

/// Upper limit on the number of panels of one segment.
pub const MAX_PANELS: usize = 1 << 14;

fn point_on_line(c: &Rat, w: &Rat) -> ComplexInterval {
    ComplexInterval::from_rats(c, w)
}

fn box_on_line(c: &Rat, w0: &Rat, w1: &Rat) -> ComplexInterval {
    ComplexInterval::new(Interval::from_rat(c), Interval::from_rat(w0).hull(&Interval::from_rat(w1)))
}

fn i_unit() -> ComplexInterval {
    ComplexInterval::new(Interval::zero(), Interval::one())
}

/// Value and `d/dw` at the panel centre; value and two `w`-derivatives over
/// the whole panel.
#[derive(Clone, Debug)]
pub struct PanelData {
    pub centre: Jet,
    pub panel: Jet2,
}

/// Jet of `s = c + i w` at the centre of `[w0, w1]` and over the panel.
pub fn panel_vars(c: &Rat, w0: &Rat, w1: &Rat) -> (Jet, Jet2) {
    let wc = (w0 + w1) / int(2);
    (Jet::var(point_on_line(c, &wc), i_unit()), Jet2::var(box_on_line(c, w0, w1), i_unit()))
}

/// Evaluates `f(c + i w)` for a panel.
pub fn panel_data(
    f1: &(dyn Fn(&Jet) -> Result<Jet, SpecialError> + Sync),
    f2: &(dyn Fn(&Jet2) -> Result<Jet2, SpecialError> + Sync),
    c: &Rat,
    w0: &Rat,
    w1: &Rat,
) -> Result<PanelData, SpecialError> {
    let (x1, x2) = panel_vars(c, w0, w1);
    Ok(PanelData { centre: f1(&x1)?, panel: f2(&x2)? })
}

impl PanelData {
    /// `d * f` for a real constant `d`.
    pub fn scale(&self, d: &Interval) -> PanelData {
        PanelData { centre: self.centre.scale(d), panel: self.panel.scale(d) }
    }

    pub fn mul(&self, o: &PanelData) -> PanelData {
        PanelData { centre: self.centre.mul(&o.centre), panel: self.panel.mul(&o.panel) }
    }
}

/// Enclosure of `int_{w0}^{w1} part(f)` from panel data.
pub fn panel_integral(data: &PanelData, part: Part, w0: &Rat, w1: &Rat) -> Interval {
    let r = Interval::from_rat(&((w1 - w0) / int(2)));
    let two_r = r.scale(&int(2));
    let r2 = r.sqr();
    let r3_3 = r2.mul(&r).scale(&crate::exact::rat(1, 3));
    let (a, b) = (&data.centre.v, &data.centre.d);
    let p = &data.panel;
    match part {
        Part::Re => {
            let taylor = two_r.mul(&a.re).add(&r3_3.mul(&p.dd.re.abs()).symmetric());
            let first = two_r.mul(&a.re).add(&r2.mul(&p.d.re.abs()).symmetric());
            taylor.intersect(&first).intersect(&two_r.mul(&p.v.re))
        }
        Part::Abs => {
            let m = r3_3.mul(&p.dd.abs());
            let br = b.scale(&r);
            let lo = two_r.mul(&a.abs()).sub(&m);
            let hi = r.mul(&a.sub(&br).abs().add(&a.add(&br).abs())).add(&m);
            let taylor = Interval::new(lo.lo().clone(), hi.hi().clone());
            let first = two_r.mul(&a.abs()).add(&r2.mul(&p.d.abs()).symmetric());
            taylor.intersect(&first).intersect(&two_r.mul(&p.v.abs())).max(&Interval::zero())
        }
    }
}

/// Width used for refinement decisions; infinite widths become a huge finite
/// number so the running total stays meaningful.
fn capped_width(e: &Interval) -> f64 {
    let w = e.width_f64();
    if w.is_finite() {
        w.min(1e300)
    } else {
        1e300
    }
}

#[derive(PartialEq)]
struct Pending {
    width: f64,
    index: usize,
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Pending {
    fn cmp(&self, o: &Self) -> Ordering {
        self.width.total_cmp(&o.width).then(o.index.cmp(&self.index))
    }
}

/// Certified enclosure of `int_{w_lo}^{w_hi} part(f(c + i w)) dw`.
///
/// The panel with the widest enclosure is bisected until the total width is
/// at most `tol` or [`MAX_PANELS`] is reached. Panels are summed in order of
/// position, so the result does not depend on the evaluation schedule.
pub fn line_segment_enclosure(
    f: &Integrand,
    c: &Rat,
    w_lo: &Rat,
    w_hi: &Rat,
    tol: &Rat,
) -> Result<SegmentEnclosure, QuadError> {
    line_segment_enclosure_limited(f, c, w_lo, w_hi, tol, MAX_PANELS)
}

pub fn line_segment_enclosure_limited(
    f: &Integrand,
    c: &Rat,
    w_lo: &Rat,
    w_hi: &Rat,
    tol: &Rat,
    max_panels: usize,
) -> Result<SegmentEnclosure, QuadError> {
    if w_lo >= w_hi {
        return Err(QuadError::Segment(crate::exact::fmt_rat(w_lo), crate::exact::fmt_rat(w_hi)));
    }
    let f1 = |s: &Jet| f.expr.eval(s);
    let f2 = |s: &Jet2| f.expr.eval(s);
    let eval = |w0: &Rat, w1: &Rat| -> Result<Interval, QuadError> {
        let data = panel_data(&f1, &f2, c, w0, w1)?;
        Ok(panel_integral(&data, f.part, w0, w1))
    };
    // unit-length starting panels
    let len = w_hi - w_lo;
    let n0 = len.ceil().to_integer().to_usize().unwrap_or(1).clamp(1, max_panels);
    let cuts: Vec<Rat> = (0..=n0).map(|j| w_lo + &len * rat(j as i64, n0 as i64)).collect();
    let first: Vec<Interval> = {
        use rayon::prelude::*;
        (0..n0).into_par_iter().map(|j| eval(&cuts[j], &cuts[j + 1])).collect::<Result<_, _>>()?
    };
    // (w0, w1, enclosure); retired entries are None
    let mut panels: Vec<Option<(Rat, Rat, Interval)>> = Vec::new();
    let mut heap = BinaryHeap::new();
    for (j, e) in first.into_iter().enumerate() {
        heap.push(Pending { width: capped_width(&e), index: j });
        panels.push(Some((cuts[j].clone(), cuts[j + 1].clone(), e)));
    }
    let tol_f = crate::exact::to_f64(tol);
    let mut total: f64 = heap.iter().map(|p| p.width).sum();
    let mut live = n0;
    let mut limit_hit = false;
    while total > tol_f {
        if live >= max_panels {
            limit_hit = true;
            break;
        }
        let Some(top) = heap.pop() else { break };
        let (w0, w1, _) = panels[top.index].take().expect("live panel");
        let mid = (&w0 + &w1) / int(2);
        let (left, right) = rayon::join(|| eval(&w0, &mid), || eval(&mid, &w1));
        let (left, right) = (left?, right?);
        total += capped_width(&left) + capped_width(&right) - top.width;
        for (a, b, e) in [(w0, mid.clone(), left), (mid, w1, right)] {
            heap.push(Pending { width: capped_width(&e), index: panels.len() });
            panels.push(Some((a, b, e)));
        }
        live += 1;
    }
    let mut live_panels: Vec<(Rat, Rat, Interval)> = panels.into_iter().flatten().collect();
    live_panels.sort_by(|x, y| x.0.cmp(&y.0));
    let enclosure = live_panels.iter().fold(Interval::zero(), |acc, p| acc.add(&p.2));
    if !enclosure.is_finite() {
        return Err(QuadError::NotFinite(crate::exact::to_f64(w_lo), crate::exact::to_f64(w_hi)));
    }
    Ok(SegmentEnclosure { width: enclosure.width_f64(), enclosure, panels: live_panels.len(), limit_hit })
}

/// `s0 + rho e^{i theta}` for an interval `theta`.
fn circle_point(s0: &Rat, rho: &Interval, theta: &Interval) -> ComplexInterval {
    ComplexInterval::new(Interval::from_rat(s0).add(&rho.mul(&theta.cos())), rho.mul(&theta.sin()))
}

fn unit(theta: &Interval) -> ComplexInterval {
    ComplexInterval::new(theta.cos(), theta.sin())
}

/// Enclosures of `(1/2 pi i) oint f ds` and `(1/2 pi i) oint (s - s0) f ds`
/// over `|s - s0| = rho`, for `f` analytic on `0 < |s - s0| <= outer` with a
/// pole of order below `nodes` at `s0`.
///
/// `nodes`-point trapezoidal rule; the aliasing error is at most
/// `B R q^M / (1 - q^M)` (times `R` for the second integral) with
/// `q = rho/R` and `B` a bound of `|f|` on the circle of radius `R = outer`,
/// obtained by covering that circle with `arcs` boxes.
pub fn circle_residues(
    f: &(dyn Fn(&ComplexInterval) -> Result<ComplexInterval, SpecialError> + Sync),
    s0: &Rat,
    rho: &Rat,
    outer: &Rat,
    nodes: usize,
    arcs: usize,
) -> Result<(ComplexInterval, ComplexInterval), QuadError> {
    use rayon::prelude::*;
    let two_pi = Interval::pi().scale(&int(2));
    let rho_i = Interval::from_rat(rho);
    let samples: Vec<(ComplexInterval, ComplexInterval)> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let theta = two_pi.scale(&rat(j as i64, nodes as i64));
            let e = unit(&theta);
            let v = f(&circle_point(s0, &rho_i, &theta))?;
            let a = v.mul(&e);
            let b = a.mul(&e);
            Ok((a, b))
        })
        .collect::<Result<_, SpecialError>>()?;
    let (mut i0, mut i1) = (ComplexInterval::zero(), ComplexInterval::zero());
    for (a, b) in &samples {
        i0 = i0.add(a);
        i1 = i1.add(b);
    }
    let w0 = rho_i.scale(&rat(1, nodes as i64));
    let w1 = rho_i.mul(&w0);
    i0 = i0.scale(&w0);
    i1 = i1.scale(&w1);

    let outer_i = Interval::from_rat(outer);
    let bounds: Vec<Interval> = (0..arcs)
        .into_par_iter()
        .map(|j| {
            let t0 = two_pi.scale(&rat(j as i64, arcs as i64));
            let t1 = two_pi.scale(&rat(j as i64 + 1, arcs as i64));
            let theta = t0.hull(&t1);
            Ok(f(&circle_point(s0, &outer_i, &theta))?.abs())
        })
        .collect::<Result<_, SpecialError>>()?;
    let b = bounds.iter().fold(Interval::zero(), |acc, x| acc.max(x));
    if !b.is_finite() {
        return Err(QuadError::NotFinite(crate::exact::to_f64(s0), crate::exact::to_f64(outer)));
    }
    let q = Interval::from_rat(&(rho / outer));
    let qm = q.powi(nodes as u32);
    let alias = qm.div(&Interval::one().sub(&qm));
    let e0 = b.mul(&outer_i).mul(&alias);
    let e1 = e0.mul(&outer_i);
    let widen = |z: &ComplexInterval, e: &Interval| {
        let d = e.symmetric();
        ComplexInterval::new(z.re.add(&d), z.im.add(&d))
    };
    Ok((widen(&i0, &e0), widen(&i1, &e1)))
}
