//! Certified `int |g*(c + i w)| dw` over `|w| <= W` for many summands at once.
//!
//! On `Re(s) = c` with `2c - 1/2` an integer, every zeta argument of every
//! summand has a half-integer real part. Those with real part `>= 1/2` are
//! `zeta(1/2 + j + 2 i w)` and come from one Euler-Maclaurin ladder; the
//! others are reflected onto the conjugates of ladder values. The gamma
//! factors `Gamma(c - b + i w)` come from one evaluation and the recurrence.
//! All summands therefore share one panel grid and one set of special
//! function evaluations per panel.

use std::collections::BinaryHeap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{tail, MellinError, MellinSummand};
use crate::exact::{int, rat, Rat};
use crate::interval::{bf_to_rat, ComplexInterval, Interval};
use crate::quad::{panel_integral, panel_vars, PanelData, Part};
use crate::special::{default_zeta_terms, gamma_cx, zeta_ladder, Cx, SpecialError};

#[derive(Clone, Copy, Debug)]
enum ZetaSource {
    /// `zeta(1/2 + j + 2iw)`
    Ladder(usize),
    /// entry of the reflection list
    Reflected(usize),
}

/// Shared evaluator of all summand transforms on one vertical line.
#[derive(Clone, Debug)]
pub struct LineFamily {
    c: Rat,
    summands: Vec<MellinSummand>,
    plan: Vec<(ZetaSource, ZetaSource, usize)>,
    ladder: usize,
    /// Negative abscissae `x`, with the ladder index `1/2 - x`.
    reflect: Vec<(Rat, usize)>,
    b_max: i64,
    gamma_count: usize,
}

impl LineFamily {
    pub fn new(c: &Rat, summands: &[MellinSummand]) -> Result<LineFamily, MellinError> {
        let shift = int(2) * c - rat(1, 2);
        if !shift.is_integer() {
            return Err(MellinError::Abscissa {
                a: summands.first().map(|m| m.a).unwrap_or(0),
                b: summands.first().map(|m| m.b).unwrap_or(0),
                reason: format!("line Re(s) = {} does not put the zeta arguments on half-integers", crate::exact::fmt_rat(c)),
            });
        }
        let b_max = summands.iter().map(|m| m.b).max().unwrap_or(0);
        let b_min = summands.iter().map(|m| m.b).min().unwrap_or(0);
        let mut ladder = 1usize;
        let mut reflect: Vec<(Rat, usize)> = Vec::new();
        let mut source = |x: Rat| -> ZetaSource {
            let half = rat(1, 2);
            if x >= half {
                let j = (&x - &half).to_integer().to_usize().expect("ladder index");
                ladder = ladder.max(j + 1);
                ZetaSource::Ladder(j)
            } else {
                let j = (&half - &x).to_integer().to_usize().expect("ladder index");
                ladder = ladder.max(j + 1);
                let idx = match reflect.iter().position(|(y, _)| y == &x) {
                    Some(i) => i,
                    None => {
                        reflect.push((x, j));
                        reflect.len() - 1
                    }
                };
                ZetaSource::Reflected(idx)
            }
        };
        let mut plan = Vec::with_capacity(summands.len());
        for m in summands {
            let p = m.params();
            let z1 = source(p.zeta1.at(c));
            let z2 = source(p.zeta2.at(c));
            plan.push((z1, z2, (b_max - m.b) as usize));
        }
        Ok(LineFamily {
            c: c.clone(),
            summands: summands.to_vec(),
            plan,
            ladder,
            reflect,
            b_max,
            gamma_count: (b_max - b_min) as usize + 1,
        })
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn summands(&self) -> &[MellinSummand] {
        &self.summands
    }

    /// `g*(s)` (without `d`) for every summand; `s` must lie on the line.
    pub fn eval<T: Cx>(&self, s: &T) -> Result<Vec<T>, SpecialError> {
        if self.summands.is_empty() {
            return Ok(Vec::new());
        }
        // 1/2 + 2 i w
        let z0 = s.scale(&Interval::from_int(2)).add_real(&Interval::from_rat(&(rat(1, 2) - int(2) * &self.c)));
        let top = z0.add_real(&Interval::from_int(self.ladder as i64));
        let terms = default_zeta_terms(top.val());
        let lad = zeta_ladder(&z0, self.ladder, terms)?;
        let pi = Interval::pi();
        let ln_2pi = pi.scale(&int(2)).ln();
        let half_pi = pi.scale(&rat(1, 2));
        let one = T::cst(ComplexInterval::one());
        let mut reflected = Vec::with_capacity(self.reflect.len());
        for (x, j) in &self.reflect {
            // zeta(s) = (2 pi)^s / pi * sin(pi s/2) Gamma(1-s) zeta(1-s)
            let arg = z0.add_real(&Interval::from_rat(&(x - rat(1, 2))));
            let chi = arg
                .scale(&ln_2pi)
                .exp()
                .scale(&pi.recip())
                .mul(&arg.scale(&half_pi).sin())
                .mul(&gamma_cx(&one.sub(&arg))?);
            reflected.push(chi.mul(&lad[*j].conj()));
        }
        let base = s.add_real(&Interval::from_int(-self.b_max));
        let mut gammas = Vec::with_capacity(self.gamma_count);
        gammas.push(gamma_cx(&base)?);
        for i in 1..self.gamma_count {
            let prev = &gammas[i - 1];
            gammas.push(prev.mul(&base.add_real(&Interval::from_int(i as i64 - 1))));
        }
        let zeta_of = |src: &ZetaSource| match src {
            ZetaSource::Ladder(j) => lad[*j].clone(),
            ZetaSource::Reflected(i) => reflected[*i].clone(),
        };
        // gammas[i] = Gamma(s - b_max + i) and plan stores b_max - b
        Ok(self.plan.iter().map(|(z1, z2, g)| zeta_of(z1).mul(&zeta_of(z2)).mul(&gammas[*g])).collect())
    }

    /// Panel data of `d * g*` for every summand on `[w0, w1]`.
    pub fn panel(&self, w0: &Rat, w1: &Rat) -> Result<Vec<PanelData>, SpecialError> {
        let (x1, x2) = panel_vars(&self.c, w0, w1);
        let (c1, c2) = rayon::join(|| self.eval(&x1), || self.eval(&x2));
        let (c1, c2) = (c1?, c2?);
        Ok(c1
            .into_iter()
            .zip(c2)
            .zip(&self.summands)
            .map(|((a, b), m)| PanelData { centre: a, panel: b }.scale(&Interval::from_rat(&m.d)))
            .collect())
    }
}

/// Options of the central-region integration.
#[derive(Clone, Debug)]
pub struct LineOptions {
    /// Central region `|w| <= w_max`.
    pub w_max: Rat,
    /// Initial panel length.
    pub step: Rat,
    /// Stop once the weighted enclosure widths are at most this fraction of
    /// the weighted upper bounds.
    pub rel_tol: Rat,
    pub max_panels: usize,
}

impl Default for LineOptions {
    fn default() -> Self {
        LineOptions { w_max: int(100), step: rat(1, 2), rel_tol: rat(1, 100), max_panels: 8000 }
    }
}

/// Per-summand result on its own line.
#[derive(Clone, Debug, Serialize)]
pub struct SummandLine {
    pub summand: MellinSummand,
    #[serde(serialize_with = "super::ser_rat")]
    pub c: Rat,
    /// Upper bound of `N^(c - top)`.
    pub weight: f64,
    /// Enclosure of `|d| int_{|w| <= W} |g*(c + i w)| dw`, as `[lo, hi]`.
    pub central: [f64; 2],
    /// Upper bound for `|d| int_{|w| > W} |g*|`.
    pub tail: f64,
    /// `weight (central + tail) / 2 pi`, upper.
    pub contribution: f64,
    #[serde(skip)]
    pub central_enclosure: Interval,
    #[serde(skip)]
    pub tail_bound: Rat,
}

/// Result of the shared central integration plus tails.
#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub per_summand: Vec<SummandLine>,
    pub panels: usize,
    pub limit_hit: bool,
    /// Summed weighted widths of the central enclosures.
    pub weighted_width: f64,
    /// Summed weighted upper bounds of the central enclosures.
    pub weighted_upper: f64,
}

struct Pending {
    width: f64,
    index: usize,
}

impl PartialEq for Pending {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == std::cmp::Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Pending {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.width.total_cmp(&o.width).then(o.index.cmp(&self.index))
    }
}

fn capped(x: f64) -> f64 {
    if x.is_finite() {
        x.min(1e300)
    } else {
        1e300
    }
}

struct Panel {
    family: usize,
    w0: Rat,
    w1: Rat,
    encs: Vec<Interval>,
}

/// Certified central integrals over `|w| <= W` of every summand of every
/// family, plus the analytic tails. All families share one refinement queue
/// ordered by `weight * width`. Uses `|g*(c - i w)| = |g*(c + i w)|`.
pub fn line_integrals(families: &[(LineFamily, Rat)], opts: &LineOptions) -> Result<LineReport, MellinError> {
    use rayon::prelude::*;
    // tails first: an undecaying majorant should fail before the quadrature
    let mut tails = Vec::with_capacity(families.len());
    for (fam, _) in families {
        let mut t = Vec::with_capacity(fam.summands().len());
        for m in fam.summands() {
            let p = m.params();
            let b = tail::vertical_tail_bound(fam.c(), &opts.w_max, (&p.zeta1, &p.zeta2), &p.gamma).map_err(|e| match e {
                MellinError::Abscissa { reason, .. } => MellinError::Abscissa { a: m.a, b: m.b, reason },
                other => other,
            })?;
            t.push(b * m.d.abs());
        }
        tails.push(t);
    }
    let weights: Vec<f64> = families.iter().map(|(_, w)| crate::exact::to_f64(w)).collect();
    let eval = |f: usize, w0: &Rat, w1: &Rat| -> Result<Vec<Interval>, MellinError> {
        let data = families[f].0.panel(w0, w1)?;
        Ok(data.iter().map(|d| panel_integral(d, Part::Abs, w0, w1)).collect())
    };
    let width_of = |p: &Panel| capped(weights[p.family] * p.encs.iter().map(|e| capped(e.width_f64())).sum::<f64>());
    let upper_of = |p: &Panel| capped(weights[p.family] * p.encs.iter().map(|e| capped(e.hi_f64())).sum::<f64>());
    let n0 = (&opts.w_max / &opts.step).ceil().to_integer().to_usize().unwrap_or(1).max(1);
    let cuts: Vec<Rat> = (0..=n0).map(|j| &opts.w_max * rat(j as i64, n0 as i64)).collect();
    let jobs: Vec<(usize, usize)> = (0..families.len()).flat_map(|f| (0..n0).map(move |j| (f, j))).collect();
    let first: Vec<Vec<Interval>> =
        jobs.par_iter().map(|&(f, j)| eval(f, &cuts[j], &cuts[j + 1])).collect::<Result<_, _>>()?;
    let mut panels: Vec<Option<Panel>> = Vec::new();
    let mut heap = BinaryHeap::new();
    for (&(f, j), encs) in jobs.iter().zip(first) {
        let p = Panel { family: f, w0: cuts[j].clone(), w1: cuts[j + 1].clone(), encs };
        heap.push(Pending { width: width_of(&p), index: panels.len() });
        panels.push(Some(p));
    }
    let tol = crate::exact::to_f64(&opts.rel_tol);
    let mut live = panels.len();
    let mut limit_hit = false;
    // every refinement state is a valid enclosure; keeping the intersection
    // makes the result monotone in the tolerance
    let mut best: Vec<Vec<Interval>> =
        families.iter().map(|(f, _)| vec![Interval::entire(); f.summands().len()]).collect();
    loop {
        let mut sums: Vec<Vec<Interval>> =
            families.iter().map(|(f, _)| vec![Interval::zero(); f.summands().len()]).collect();
        for p in panels.iter().flatten() {
            for (s, e) in sums[p.family].iter_mut().zip(&p.encs) {
                *s = s.add(e);
            }
        }
        for (b, s) in best.iter_mut().zip(sums) {
            for (bi, si) in b.iter_mut().zip(s) {
                *bi = bi.intersect(&si);
            }
        }
        // recomputed from scratch so capped entries cannot cancel
        let (width, upper) =
            panels.iter().flatten().fold((0.0, 0.0), |(w, u), p| (capped(w + width_of(p)), capped(u + upper_of(p))));
        if width <= tol * upper {
            break;
        }
        if live >= opts.max_panels {
            limit_hit = true;
            break;
        }
        let batch: Vec<Pending> = (0..8).filter_map(|_| heap.pop()).collect();
        if batch.is_empty() {
            break;
        }
        let split: Vec<(usize, Rat, Rat, Rat)> = batch
            .iter()
            .map(|q| {
                let p = panels[q.index].take().expect("live panel");
                let mid = (&p.w0 + &p.w1) / int(2);
                (p.family, p.w0, mid, p.w1)
            })
            .collect();
        let results: Vec<(Vec<Interval>, Vec<Interval>)> = split
            .par_iter()
            .map(|(f, a, m, b)| Ok((eval(*f, a, m)?, eval(*f, m, b)?)))
            .collect::<Result<_, MellinError>>()?;
        for ((f, a, m, b), (l, r)) in split.into_iter().zip(results) {
            for p in [Panel { family: f, w0: a, w1: m.clone(), encs: l }, Panel { family: f, w0: m, w1: b, encs: r }] {
                heap.push(Pending { width: width_of(&p), index: panels.len() });
                panels.push(Some(p));
            }
            live += 1;
        }
    }
    let panel_count = panels.iter().flatten().count();
    let two_pi = Interval::pi().scale(&int(2));
    let mut per_summand = Vec::new();
    let (mut ww, mut wu) = (0.0, 0.0);
    for (((fam, weight), fam_sums), fam_tails) in families.iter().zip(best).zip(tails) {
        let wi = Interval::from_rat(weight);
        for ((m, half), tail_bound) in fam.summands().iter().zip(fam_sums).zip(fam_tails) {
            let central = half.scale(&int(2));
            let contribution = central.add(&Interval::from_rat(&tail_bound)).mul(&wi).div(&two_pi);
            ww += wi.hi_f64() * central.width_f64();
            wu += wi.hi_f64() * central.hi_f64();
            per_summand.push(SummandLine {
                summand: m.clone(),
                c: fam.c().clone(),
                weight: wi.hi_f64(),
                central: [central.lo_f64(), central.hi_f64()],
                tail: crate::exact::to_f64(&tail_bound),
                contribution: contribution.hi_f64(),
                central_enclosure: central,
                tail_bound,
            });
        }
    }
    Ok(LineReport { per_summand, panels: panel_count, limit_hit, weighted_width: ww, weighted_upper: wu })
}

/// Leftmost line `Re(s) = c`, `c = top - j/2`, such that no factor of the
/// transform is singular in `c < Re(s) < top`.
///
/// Gamma poles cancelled by trivial zeros still stop the shift: beyond them
/// the reflected zeta factors grow faster than the shift gains.
pub fn shift_abscissa(m: &MellinSummand, top: &Rat) -> Rat {
    let p = m.params();
    let one = Rat::one();
    let gamma_top = p.gamma.solve(&Rat::zero());
    // first gamma pole below `top`
    let gamma_first = if &gamma_top < top {
        gamma_top
    } else {
        let j = (&gamma_top - top).floor() + int(1);
        p.gamma.solve(&-j)
    };
    let singular = [p.zeta1.solve(&one), p.zeta2.solve(&one), gamma_first]
        .into_iter()
        .filter(|s| s < top)
        .max()
        .expect("gamma has a pole below any line");
    let step = rat(1, 2);
    let mut c = top.clone();
    while &c - &step > singular {
        c -= &step;
    }
    c
}

/// Shifted-line remainder bound `C`: for `n >= n_min`,
/// `|sum_{a,b} d (1/2 pi i) int_{top} g*(s) n^s ds| <= C n^top`.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftedBound {
    #[serde(serialize_with = "super::ser_rat")]
    pub top: Rat,
    pub n_min: u64,
    #[serde(serialize_with = "super::ser_rat")]
    pub w_max: Rat,
    #[serde(serialize_with = "super::ser_rat")]
    pub constant: Rat,
    pub lines: LineReport,
}

/// Groups the summands by `shift_abscissa`, integrates each group on its own
/// line and adds `n^c <= n_min^(c - top) n^top`.
pub fn shifted_integral_bound(
    summands: &[MellinSummand],
    top: &Rat,
    n_min: u64,
    opts: &LineOptions,
) -> Result<ShiftedBound, MellinError> {
    let mut groups: std::collections::BTreeMap<Rat, Vec<MellinSummand>> = std::collections::BTreeMap::new();
    for m in summands {
        groups.entry(shift_abscissa(m, top)).or_default().push(m.clone());
    }
    let n = Rat::from_integer(n_min.into());
    let mut families = Vec::with_capacity(groups.len());
    for (c, ms) in groups.into_iter().rev() {
        let e = &c - top;
        let weight = crate::exact::pow_upper(&n, crate::exact::Exponent::new(e.numer().to_i64().unwrap(), e.denom().to_i64().unwrap()));
        families.push((LineFamily::new(&c, &ms)?, weight));
    }
    let lines = line_integrals(&families, opts)?;
    let two_pi = Interval::pi().scale(&int(2));
    let mut total = Interval::zero();
    for (fam, w) in &families {
        for s in lines.per_summand.iter().filter(|s| &s.c == fam.c()) {
            let v = s.central_enclosure.add(&Interval::from_rat(&s.tail_bound)).mul(&Interval::from_rat(w));
            total = total.add(&v);
        }
    }
    let total = total.div(&two_pi);
    if !total.is_finite() {
        return Err(MellinError::Quad(crate::quad::QuadError::NotFinite(0.0, crate::exact::to_f64(&opts.w_max))));
    }
    Ok(ShiftedBound {
        top: top.clone(),
        n_min,
        w_max: opts.w_max.clone(),
        constant: crate::exact::round_up(&bf_to_rat(total.hi()), Some(2)),
        lines,
    })
}

/// Non-certified reference values of `|d| int_{|w| <= W} |g*(c + i w)| dw`
/// for every summand of the family: composite Simpson on `intervals` panels
/// of `[0, W]` using the midpoints of point enclosures.
pub fn reference_central(family: &LineFamily, w_max: &Rat, intervals: usize) -> Result<Vec<f64>, SpecialError> {
    use rayon::prelude::*;
    let n = intervals.max(1) * 2;
    let values: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let w = w_max * rat(j as i64, n as i64);
            let s = ComplexInterval::from_rats(family.c(), &w);
            Ok(family.eval(&s)?.iter().map(|v| v.abs().mid_f64()).collect())
        })
        .collect::<Result<_, SpecialError>>()?;
    let h = crate::exact::to_f64(w_max) / n as f64;
    Ok(family
        .summands()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let simpson: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let weight = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                    weight * v[i]
                })
                .sum();
            2.0 * crate::exact::to_f64(&m.d).abs() * simpson * h / 3.0
        })
        .collect())
}
