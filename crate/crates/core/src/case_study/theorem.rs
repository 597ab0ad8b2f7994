//! Assembly of all stages into the explicit large-n statement
//! `F(n)/C(2n,n) = -n^2/8 + n/24 + B(C_total n^(3/4))` for `n >= N`.

use num_traits::Zero;
use serde::Serialize;

use super::bounds::{
    combine_errors, completion_bounds, prune_tail_bounds, sb_error_bound, BoundExpr, Combined, CompletionBounds,
    PruneBounds,
};
use super::ratio::{binomial_ratio_expansion, split};
use super::sigma::{robin_constant, sigma_sieve, RobinReport, SigmaTable};
use super::sums::{bounds_f64, PartialSums, SoundnessRow};
use super::{multiplier, CaseConfig, CaseError};
use crate::exact::{fmt_rat, int, pow_upper, rat, to_decimal, Exponent, Rat};
use crate::interval::Interval;
use crate::mellin::line::{shifted_integral_bound, LineOptions, ShiftedBound};
use crate::mellin::{expected_main_term, extract_summands, main_term_residues, MellinSummand};

#[derive(Clone, Debug)]
pub struct TheoremOptions {
    pub line: LineOptions,
    /// Cancellation tolerance for the residue coefficients.
    pub residue_tol: Rat,
    /// Largest admissible `C_total N^(3/4) / (N^2/8 - N/24)`.
    pub max_ratio: Rat,
    /// Points where every bound is compared with the quantity it bounds.
    pub soundness_at: Vec<u64>,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        TheoremOptions {
            line: LineOptions { w_max: int(100), step: int(1), rel_tol: rat(1, 100), max_panels: 3000 },
            residue_tol: Rat::new(1.into(), crate::exact::pow10(9)),
            max_ratio: rat(7, 10),
            soundness_at: Vec::new(),
        }
    }
}

/// Reference constant next to ours.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub name: String,
    pub ours: BoundExpr,
    pub reference: String,
    /// `ours / reference - 1`.
    pub deviation: f64,
}

fn compare(name: &str, ours: &BoundExpr, reference: Rat) -> Comparison {
    let dev = crate::exact::to_f64(&(&ours.c / &reference)) - 1.0;
    Comparison { name: name.to_string(), ours: ours.clone(), reference: fmt_rat(&reference), deviation: dev }
}

/// Reference values of the error constants.
pub fn reference_constants() -> Vec<(&'static str, Rat)> {
    vec![
        ("large_k", rat(52, 25)),
        ("mid_k", rat(50153, 10000)),
        ("expansion_error", rat(146718899, 10000)),
        ("completion_mid", rat(12553, 5000)),
        ("completion_tail", rat(3, 2000)),
        ("integral", rat(406531, 100)),
        ("total", rat(38755553, 5000)),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueRow {
    pub power: String,
    pub coefficient: [f64; 2],
    pub log_coefficient: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeCheck {
    pub n: u64,
    /// Enclosure of `F(n)/C(2n,n)`.
    pub value: [f64; 2],
    pub lower: f64,
    pub upper: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub n0: u64,
    pub alpha: String,
    pub beta: String,
    pub cutoff_r: u32,
    pub round_digits: u32,
    pub robin: RobinReport,
    pub expansion: String,
    pub exact_terms: usize,
    pub b_terms: usize,
    pub summand_count: usize,
    pub summands: Vec<MellinSummand>,
    pub main_term: Vec<ResidueRow>,
    pub main_term_ok: bool,
    pub main_term_error: Option<String>,
    pub integral: ShiftedBound,
    pub prune: PruneBounds,
    pub expansion_error: BoundExpr,
    pub completion: CompletionBounds,
    pub combined: Combined,
    pub comparisons: Vec<Comparison>,
    /// Upper bound of `C_total N^(3/4) / (N^2/8 - N/24)`.
    pub ratio_at_n0: f64,
    #[serde(serialize_with = "crate::mellin::ser_rat")]
    pub ratio_upper: Rat,
    pub ratio_ok: bool,
    pub envelope: EnvelopeCheck,
    pub soundness: Vec<SoundnessRow>,
}

impl TheoremReport {
    /// The large-n statement holds: residues cancel, the ratio stays below
    /// the threshold, `F(N)` lies in the envelope and every sampled bound
    /// dominates its quantity.
    pub fn closes(&self) -> bool {
        self.main_term_ok && self.ratio_ok && self.envelope.inside && self.soundness.iter().all(|r| r.holds)
    }

    pub fn total(&self) -> &Rat {
        &self.combined.total
    }
}

/// Named error bounds in the order they enter the total.
pub fn named_bounds(prune: &PruneBounds, sb: &BoundExpr, completion: &CompletionBounds) -> Vec<(String, BoundExpr)> {
    vec![
        ("large_k".into(), prune.large_k.clone()),
        ("mid_k".into(), prune.mid_k.clone()),
        ("expansion_error".into(), sb.clone()),
        ("completion_mid".into(), completion.until_34.clone()),
        ("completion_tail".into(), completion.after_34.clone()),
    ]
}

/// Upper bound of `c N^(3/4) / (N^2/8 - N/24)`.
pub fn ratio_at(c: &Rat, n0: u64) -> Rat {
    let n = int(n0 as i64);
    let main = &n * &n / int(8) - &n / int(24);
    c * pow_upper(&n, Exponent::new(3, 4)) / main
}

/// Compares every bound with its quantity at `n`.
pub fn soundness_rows(
    cfg: &CaseConfig,
    bounds: &[(String, BoundExpr)],
    integral: &Rat,
    exact: &[(crate::KPoly, Exponent)],
    table: &SigmaTable,
    n: u64,
) -> Vec<SoundnessRow> {
    let sums = PartialSums::compute(n, cfg.alpha_split, exact, table);
    let nn = Interval::from_int(n as i64);
    let main = nn.sqr().scale(&rat(-1, 8)).add(&nn.scale(&rat(1, 24)));
    let quantity = |name: &str| match name {
        "large_k" => sums.large_k.clone(),
        "mid_k" => sums.mid_k.clone(),
        "expansion_error" => sums.expansion_error.clone(),
        "completion_mid" => sums.completion_mid.clone(),
        "completion_tail" => sums.completion_tail.clone(),
        _ => unreachable!("unknown bound {name}"),
    };
    let mut rows: Vec<SoundnessRow> =
        bounds.iter().map(|(name, b)| SoundnessRow::new(name, n, &quantity(name), &b.eval(n))).collect();
    let int_bound = BoundExpr::power(integral.clone(), Exponent::new(3, 4)).eval(n);
    rows.push(SoundnessRow::new("integral", n, &sums.completed.sub(&main), &int_bound));
    rows
}

/// Runs every large-n stage for `cfg`.
pub fn main_theorem(cfg: &CaseConfig, opts: &TheoremOptions) -> Result<TheoremReport, CaseError> {
    let table_len = opts.soundness_at.iter().copied().max().unwrap_or(0).max(cfg.n0) as usize;
    let table = sigma_sieve(table_len);
    let robin = robin_constant(cfg.n0, &cfg.robin_a, &table)?;

    let ex = binomial_ratio_expansion(cfg)?;
    let (exact, s_b) = split(&ex);
    let summands = extract_summands(&ex.exact_part(), &multiplier())?;

    let sigma_min = rat(3, 4);
    let main = main_term_residues(&summands, &sigma_min)?;
    let main_term_error = main.check(&expected_main_term(), &opts.residue_tol).err().map(|e| e.to_string());
    let main_term = main
        .coefficients
        .iter()
        .map(|(s0, (c0, c1))| ResidueRow { power: fmt_rat(s0), coefficient: bounds_f64(c0), log_coefficient: bounds_f64(c1) })
        .collect();

    let integral = shifted_integral_bound(&summands, &sigma_min, cfg.n0, &opts.line)?;
    let prune = prune_tail_bounds(cfg)?;
    let (sb, _) = sb_error_bound(cfg, &s_b)?;
    let completion = completion_bounds(cfg, &exact)?;
    let bounds = named_bounds(&prune, &sb, &completion);
    let combined = combine_errors(&bounds, &integral.constant, cfg.n0, Some(cfg.round_digits))?;

    let refs = reference_constants();
    let reference = |name: &str| refs.iter().find(|(n, _)| *n == name).map(|(_, c)| c.clone()).expect("reference");
    let mut comparisons: Vec<Comparison> = bounds.iter().map(|(name, b)| compare(name, b, reference(name))).collect();
    comparisons.push(compare("integral", &BoundExpr::power(integral.constant.clone(), Exponent::new(3, 4)), reference("integral")));
    comparisons.push(compare("total", &BoundExpr::power(combined.total.clone(), Exponent::new(3, 4)), reference("total")));

    let ratio_upper = ratio_at(&combined.total, cfg.n0);
    let ratio_ok = ratio_upper <= opts.max_ratio;

    let at_n0 = PartialSums::compute(cfg.n0, cfg.alpha_split, &exact, &table);
    let n = int(cfg.n0 as i64);
    let centre = -(&n * &n) / int(8) + &n / int(24);
    let radius = &combined.total * pow_upper(&n, Exponent::new(3, 4));
    let (lower, upper) = (&centre - &radius, &centre + &radius);
    let inside = at_n0.normalized_f.lo_rat() >= lower && at_n0.normalized_f.hi_rat() <= upper;
    let envelope = EnvelopeCheck {
        n: cfg.n0,
        value: bounds_f64(&at_n0.normalized_f),
        lower: crate::exact::to_f64(&lower),
        upper: crate::exact::to_f64(&upper),
        inside,
    };

    let soundness = {
        use rayon::prelude::*;
        let rows: Vec<Vec<SoundnessRow>> = opts
            .soundness_at
            .par_iter()
            .map(|&m| soundness_rows(cfg, &bounds, &integral.constant, &exact, &table, m))
            .collect();
        rows.into_iter().flatten().collect()
    };

    Ok(TheoremReport {
        n0: cfg.n0,
        alpha: crate::exact::fmt_exponent(cfg.alpha_split),
        beta: crate::exact::fmt_exponent(cfg.beta),
        cutoff_r: cfg.cutoff_r,
        round_digits: cfg.round_digits,
        robin,
        expansion: ex.to_string(),
        exact_terms: exact.len(),
        b_terms: s_b.len(),
        summand_count: summands.len(),
        summands,
        main_term,
        main_term_ok: main_term_error.is_none(),
        main_term_error,
        integral,
        prune,
        expansion_error: sb,
        completion,
        combined,
        comparisons,
        ratio_at_n0: crate::exact::to_f64(&ratio_upper),
        ratio_upper,
        ratio_ok,
        envelope,
        soundness,
    })
}

/// Decimal rendering used next to exact rationals in reports.
pub fn decimal(x: &Rat) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        to_decimal(x, 6)
    }
}
