use bterms::case_study::bounds::*;
use bterms::case_study::ratio::{binomial_ratio_expansion, split, tail_bterm};
use bterms::case_study::sigma::{euler_gamma, robin_constant, sigma_sieve, RobinError};
use bterms::case_study::small_n::*;
use bterms::case_study::sums::{ceil_power, ExactPart};
use bterms::case_study::theorem::ratio_at;
use bterms::case_study::{ratio, CaseConfig};
use bterms::exact::{exp_bounds, int, rat, Exponent, Rat};
use bterms::interval::Interval;
use bterms::{KPoly, Term};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn trial_sigma(k: u64) -> u64 {
    (1..=k).filter(|d| k.is_multiple_of(*d)).sum()
}

fn cfg() -> CaseConfig {
    CaseConfig::default()
}

#[test]
fn sigma_values() {
    let t = sigma_sieve(10_000);
    assert_eq!(t.get(1), 1);
    assert_eq!(t.get(12), 28);
    assert_eq!(t.get(9973), trial_sigma(9973));
    assert_eq!(t.get(9973), 9974);
}

#[test]
fn euler_constant_enclosure() {
    let g = euler_gamma();
    assert!(g.contains_rat(&rat(5772156649, 10_000_000_000)), "{g}");
    assert!(g.width_f64() < 1e-8);
}

#[test]
fn divisor_bound_at_ten_thousand() {
    let t = sigma_sieve(10_000);
    let r = robin_constant(10_000, &rat(52, 25), &t).unwrap();
    assert!(r.robin_value[1] <= 2.08);
    assert!(r.worst_ratio < 1.0 && r.worst_ratio > 0.5);
    // sigma(1) = 1 against A log log N ~ 4.62
    let loglog = (10_000f64).ln().ln();
    assert!(1.0 <= 52.0 / 25.0 * loglog && (52.0 / 25.0 * loglog - 4.62).abs() < 0.01);
}

#[test]
fn divisor_bound_rejects_small_constants() {
    let t = sigma_sieve(10_000);
    assert!(matches!(robin_constant(10_000, &rat(2, 1), &t), Err(RobinError::Constant(_))));
    assert!(matches!(robin_constant(10, &rat(52, 25), &t), Err(RobinError::SmallN(10))));
}

#[test]
fn small_path_counts() {
    let t = sigma_sieve(40);
    for (n, want) in [(1, 1), (2, 1), (3, 3)] {
        assert_eq!(a_n_formula(n, &t), BigInt::from(want), "a_{n}");
        assert_eq!(a_n_oracle(n as u32), want as u128);
    }
}

#[test]
fn formula_matches_path_enumeration() {
    let t = sigma_sieve(40);
    for n in 1..=20u32 {
        assert_eq!(a_n_formula(n as u64, &t), BigInt::from(a_n_oracle(n)), "n = {n}");
    }
}

#[test]
fn path_totals_are_catalan() {
    for n in 0..=30u32 {
        assert_eq!(BigInt::from(dyck_total(n)), catalan(n as u64), "n = {n}");
    }
}

#[test]
fn binomial_sum_small_values() {
    let t = sigma_sieve(10);
    assert_eq!(f_exact(1, &t), BigInt::zero());
    assert_eq!(f_exact(2, &t), BigInt::zero());
    assert_eq!(f_exact(3, &t), BigInt::from(-90));
}

#[test]
fn normalized_sum_encloses_the_exact_quotient() {
    let t = sigma_sieve(3000);
    for n in [5u64, 6, 17, 250, 2999] {
        let iv = normalized_f(n, &t);
        let exact = Rat::new(f_exact(n, &t), bterms::exact::binomial(2 * n, n)).to_f64().unwrap();
        assert!(iv.lo <= exact && exact <= iv.hi, "n = {n}: {exact} not in [{}, {}]", iv.lo, iv.hi);
    }
}

#[test]
fn sweep_over_a_short_range() {
    let t = sigma_sieve(400);
    let r = f_sign_sweep(5, 400, &t, true);
    assert!(r.certified());
    assert_eq!(r.rows.len(), 396);
    assert!(r.rows.windows(2).all(|w| w[0].n + 1 == w[1].n));
    assert!(r.rows.iter().all(|row| row.upper_bound < 0.0));
    let single = f_sign_sweep(5, 5, &t, false);
    assert_eq!(single.rows.len(), 1);
    assert!(single.certified());
}

#[test]
fn sweep_signs_agree_with_exact_values() {
    let t = sigma_sieve(4000);
    let mut rng_state = 0x2545F491u64;
    for _ in 0..20 {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let n = 5 + (rng_state >> 33) % 3995;
        let iv = normalized_f(n, &t);
        let exact = f_exact(n, &t);
        assert!(exact.is_negative() && iv.is_negative(), "n = {n}");
    }
}

#[test]
fn monotonicity_first_cases() {
    let t = sigma_sieve(10);
    assert!(monotonicity_gap(3, &t).is_positive());
    assert!(monotonicity_gap(4, &t).is_positive());
}

#[test]
fn monotonicity_up_to_two_hundred() {
    let t = sigma_sieve(210);
    let r = monotonicity_check(200, &t);
    assert!(r.violations.is_empty());
    assert_eq!(r.checked, 198);
}

#[test]
fn monotonicity_sign_is_minus_the_sign_of_f() {
    let t = sigma_sieve(60);
    for n in 3..=50u64 {
        let gap = monotonicity_gap(n, &t);
        let f = f_exact(n + 2, &t);
        assert_eq!(gap.signum(), -f.signum(), "n = {n}");
    }
}

fn exact_coefficient(q: i64) -> KPoly {
    let ex = binomial_ratio_expansion(&cfg()).unwrap();
    ex.exact_terms().filter(|(_, e)| *e == Exponent::from_integer(q)).fold(KPoly::zero(), |acc, (c, _)| acc.add(c))
}

#[test]
fn leading_expansion_coefficients() {
    // the ratio times e^(k^2/n) is exp(k^2/(2n^2) + ...) (1 + ...)
    assert_eq!(exact_coefficient(0), KPoly::one());
    assert_eq!(exact_coefficient(-1), KPoly::zero());
    assert_eq!(exact_coefficient(-2), KPoly::monomial(rat(1, 2), 2));
    assert_eq!(exact_coefficient(-3), KPoly::from_coeffs([(4, rat(-1, 6)), (2, rat(-1, 6))]));
}

#[test]
fn cutoff_tail_constants() {
    let c = cfg();
    let b = tail_bterm(&c, &ratio::ring(&c).unwrap()).unwrap();
    let t = &b.terms()[0];
    let Term::B { majorant, q, .. } = t else { panic!("not a B-term") };
    assert_eq!(*q, Exponent::from_integer(-9));
    let k10 = majorant.coeff(10);
    let k9 = majorant.coeff(9);
    assert!((&k10 / rat(239, 10000) - int(1)).abs() <= rat(1, 10), "{k10}");
    assert!((&k9 / rat(2223, 10000) - int(1)).abs() <= rat(1, 10), "{k9}");
}

/// `sum_{j<=k} sum_{r>=R odd} 2 j^r/(r n^r)` by `2 atanh(x) = log((1+x)/(1-x))`.
fn cut_tail(n: u64, k: u64, r: u32) -> Interval {
    let mut total = Interval::zero();
    for j in 1..=k {
        let x = Interval::from_rat(&rat(j as i64, n as i64));
        let mut v = Interval::one().add(&x).div(&Interval::one().sub(&x)).ln();
        let mut odd = 1;
        while odd < r {
            v = v.sub(&x.powi(odd).scale(&rat(2, odd as i64)));
            odd += 2;
        }
        total = total.add(&v);
    }
    total
}

#[test]
fn cutoff_tail_is_sound() {
    let c = cfg();
    let b = tail_bterm(&c, &ratio::ring(&c).unwrap()).unwrap();
    for (n, k) in [(10_000u64, 1u64), (10_000, 50), (10_000, 631), (40_000, 1659)] {
        let truth = cut_tail(n, k, 9);
        let (_, hi) = b.envelope(n, &int(k as i64)).unwrap();
        assert!(truth.hi_rat() <= hi, "n = {n}, k = {k}");
    }
}

fn ratio_times_gauss(n: u64, k: u64) -> (Rat, Rat) {
    // C(2n, n-k)/C(2n, n) = prod_{j=1}^k (n-j+1)/(n+j)
    let mut r = Rat::one();
    for j in 1..=k {
        r *= rat((n - j + 1) as i64, (n + j) as i64);
    }
    let (lo, hi) = exp_bounds(&rat((k * k) as i64, n as i64));
    (&r * lo, r * hi)
}

#[test]
fn expansion_envelope_at_a_sample_point() {
    let ex = binomial_ratio_expansion(&cfg()).unwrap();
    let (lo, hi) = ex.envelope(10_000, &int(50)).unwrap();
    let (tlo, thi) = ratio_times_gauss(10_000, 50);
    assert!(lo <= tlo && thi <= hi);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn expansion_envelope_contains_the_ratio(n in 10_000u64..60_000, frac in 0.0f64..1.0) {
        let kmax = ceil_power(n, Exponent::new(7, 10)) - 1;
        let k = 1 + ((kmax - 1) as f64 * frac) as u64;
        let ex = binomial_ratio_expansion(&cfg()).unwrap();
        let (lo, hi) = ex.envelope(n, &int(k as i64)).unwrap();
        let (tlo, thi) = ratio_times_gauss(n, k);
        prop_assert!(lo <= tlo && thi <= hi, "n = {}, k = {}", n, k);
    }

    #[test]
    fn sieve_matches_trial_division(k in 1u64..3000) {
        let t = sigma_sieve(3000);
        prop_assert_eq!(t.get(k as usize), trial_sigma(k));
    }
}

#[test]
fn gaussian_sum_closed_forms() {
    // j = 0 without T: 1 + sqrt(pi n)/2
    let b = gaussian_sum_bound(0, None, 10_000).unwrap();
    assert_eq!(b[0], BoundExpr::power(int(1), Exponent::zero()));
    assert_eq!(b[1].q, Exponent::new(1, 2));
    let half_sqrt_pi = Interval::pi().sqrt().scale(&rat(1, 2));
    assert!(b[1].c >= half_sqrt_pi.hi_rat() && b[1].c <= half_sqrt_pi.hi_rat() + rat(1, 1_000_000));
    // j = 7 beyond T = n^(7/10): T^7 plus (n/2)(T^6 + 3nT^4 + 6n^2T^2 + 6n^3), all times e^(-T^2/n)
    let tau = Exponent::new(7, 10);
    let b = gaussian_sum_bound(7, Some(tau), 10_000).unwrap();
    let shapes: Vec<(Rat, Exponent)> = b.iter().map(|x| (x.c.clone(), x.q)).collect();
    assert_eq!(
        shapes,
        vec![
            (int(1), tau * 7),
            (rat(1, 2), Exponent::from_integer(1) + tau * 6),
            (rat(3, 2), Exponent::from_integer(2) + tau * 4),
            (int(3), Exponent::from_integer(3) + tau * 2),
            (int(3), Exponent::from_integer(4)),
        ]
    );
    assert!(b.iter().all(|x| x.e == int(-1) && x.gamma == Exponent::new(2, 5)));
}

#[test]
fn gaussian_sum_rejects_the_increasing_regime() {
    assert!(matches!(gaussian_sum_bound(6, Some(Exponent::new(1, 2)), 10_000), Err(BoundError::Increasing { .. })));
    assert!(matches!(gaussian_sum_bound(400, Some(Exponent::new(3, 5)), 100), Err(BoundError::Increasing { .. })));
}

fn gauss_sum(j: u32, n: u64, from: u64) -> Interval {
    let nn = Interval::from_int(n as i64);
    let mut s = Interval::zero();
    let mut k = from.max(1);
    loop {
        let ki = Interval::from_int(k as i64);
        let t = ki.powi(j).mul(&ki.sqr().div(&nn).neg().exp());
        s = s.add(&t);
        if k * k > 60 * n + j as u64 * n {
            // remaining terms are below e^(-60) of the peak and shrink geometrically
            return s.add(&t);
        }
        k += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]
    #[test]
    fn gaussian_bounds_dominate_the_sums(j in 0u32..14, n in 200u64..3000, with_t in any::<bool>()) {
        let tau = Exponent::new(7, 10);
        let (parts, from) = if with_t {
            match gaussian_sum_bound(j, Some(tau), n) {
                Ok(p) => (p, ceil_power(n, tau)),
                Err(_) => return Ok(()),
            }
        } else {
            (gaussian_sum_bound(j, None, n).unwrap(), 1)
        };
        let bound = parts.iter().fold(Interval::zero(), |acc, b| acc.add(&b.eval(n)));
        let sum = gauss_sum(j, n, from);
        prop_assert!(sum.hi_rat() <= bound.lo_rat(), "j = {}, n = {}", j, n);
    }

    #[test]
    fn collapsed_constants_dominate_sampled_ratios(
        q in -8i64..8, qd in 1i64..5, e_num in 0i64..3, m in 0u32..3, mult in 1u64..200
    ) {
        let e = rat(-e_num, 4);
        let b = BoundExpr::power(rat(7, 3), Exponent::new(q, qd)).with_exp(e, Exponent::new(1, 2)).with_loglog(m);
        let target = BoundExpr::power(int(1), Exponent::new(3, 4));
        let n0 = 10_000u64;
        if let Ok(c) = b.sup_ratio(&target, n0) {
            let n = n0 * mult;
            let lhs = b.eval(n);
            let rhs = target.eval(n).mul(&Interval::from_rat(&c));
            prop_assert!(lhs.hi_rat() <= rhs.hi_rat(), "{} at n = {}", b, n);
        }
    }
}

#[test]
fn power_sum_side_condition() {
    for n in 6..=500 {
        assert!(power_sum_holds(n), "n = {n}");
    }
    assert!(prune_side_conditions(&cfg()).is_ok());
    let mut bad = cfg();
    bad.n0 = 100;
    bad.alpha_split = Exponent::new(11, 20);
    assert!(matches!(prune_side_conditions(&bad), Err(BoundError::SideCondition(_))));
}

#[test]
fn pruning_constants() {
    let p = prune_tail_bounds(&cfg()).unwrap();
    assert_eq!(p.large_k.c, rat(52, 25));
    assert_eq!((p.large_k.q, p.large_k.e.clone(), p.large_k.m), (Exponent::from_integer(7), rat(-1, 4), 1));
    let dev = (&p.mid_k.c / rat(50153, 10000) - int(1)).abs();
    assert!(dev <= rat(1, 10), "{}", p.mid_k);
    assert_eq!(p.mid_k.q, Exponent::new(9, 2));
    assert_eq!(p.mid_k.gamma, Exponent::new(2, 5));
}

#[test]
fn expansion_error_shape() {
    let (empty, _) = sb_error_bound(&cfg(), &[]).unwrap();
    assert!(empty.c.is_zero());
    let ex = binomial_ratio_expansion(&cfg()).unwrap();
    let (_, s_b) = split(&ex);
    let (b, _) = sb_error_bound(&cfg(), &s_b).unwrap();
    assert_eq!((b.q, b.m, b.e.clone()), (Exponent::new(1, 2), 1, Rat::zero()));
    assert!(b.c.is_positive());
}

#[test]
fn c1_dominates_the_exact_part() {
    let c = cfg();
    let ex = binomial_ratio_expansion(&c).unwrap();
    let (exact, _) = split(&ex);
    let (c1, d) = c1_bound(&c, &exact).unwrap();
    assert_eq!(d, 20);
    for n in [10_000u64, 20_000, 50_000] {
        let s = ExactPart::at(&exact, n);
        let top = ceil_power(n, Exponent::new(3, 4));
        for k in (1..top).step_by(7).chain([top - 1]) {
            let v = s.eval(&Interval::from_int(k as i64)).abs();
            assert!(v.hi_rat() <= c1, "n = {n}, k = {k}");
        }
    }
}

#[test]
fn completion_shapes() {
    let c = cfg();
    let ex = binomial_ratio_expansion(&c).unwrap();
    let (exact, _) = split(&ex);
    let b = completion_bounds(&c, &exact).unwrap();
    assert_eq!(b.until_34.q, Exponent::new(19, 4));
    assert_eq!(b.after_34.q, Exponent::new(11, 2));
    assert_eq!((b.after_34.gamma, b.after_34.m), (Exponent::new(1, 2), 0));
}

#[test]
fn combining_a_single_power() {
    let b = BoundExpr::power(rat(123, 10), Exponent::new(3, 4));
    let c = combine_errors(&[("x".into(), b)], &Rat::zero(), 10_000, Some(4)).unwrap();
    assert_eq!(c.total, rat(123, 10));
}

#[test]
fn combining_the_large_k_tail() {
    let b = BoundExpr::power(rat(52, 25), Exponent::from_integer(7)).with_exp(rat(-1, 4), Exponent::one()).with_loglog(1);
    let c = combine_errors(&[("large_k".into(), b)], &int(5), 10_000, Some(4)).unwrap();
    // e^(-2500) leaves only the rounding unit
    assert_eq!(c.total, int(5) + rat(1, 10000));
}

#[test]
fn combining_reports_the_offending_bound() {
    let b = BoundExpr::power(int(1), Exponent::from_integer(1));
    let err = combine_errors(&[("too_big".into(), b)], &Rat::zero(), 10_000, Some(4)).unwrap_err();
    assert!(err.to_string().contains("too_big"), "{err}");
}

#[test]
fn ratio_of_the_reference_total() {
    let r = ratio_at(&rat(38755553, 5000), 10_000).to_f64().unwrap();
    assert!((r - 0.621).abs() < 0.001, "{r}");
}
