use bterms::exact::{exp_bounds, factorial, int, rat, Exponent, Rat};
use bterms::interval::Interval;
use bterms::taylor::*;
use bterms::{Expansion, KPoly, RingConfig};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn ring() -> RingConfig {
    RingConfig::new(Exponent::zero(), Exponent::new(4, 7)).unwrap().with_round_digits(3).with_default_prec(5)
}

const KERNELS: [Kernel; 4] = [Kernel::Exp, Kernel::Geometric, Kernel::EvenGeometric, Kernel::Log1p];

#[test]
fn catalog_names() {
    for k in KERNELS {
        assert_eq!(Kernel::from_name(k.name()).unwrap(), k);
    }
    assert!(matches!(Kernel::from_name("sinh"), Err(TaylorError::UnknownKernel(_))));
}

#[test]
fn exp_of_zero() {
    let cfg = ring();
    let ex = taylor_with_explicit_error(&Kernel::Exp, &Expansion::zero(&cfg), 3, 10).unwrap();
    assert_eq!(ex, Expansion::one(&cfg));
}

#[test]
fn exp_of_reciprocal() {
    let cfg = ring();
    let arg = Expansion::n_pow(&cfg, Exponent::from_integer(-1));
    let ex = taylor_with_explicit_error(&Kernel::Exp, &arg, 2, 10).unwrap();
    // sup of e^x/2 on [-1/10, 1/10] is 0.5526..., and the remainder constant
    // is its integer ceiling
    let m = Kernel::Exp.derivative_bound(2, &rat(1, 10));
    assert!(m > rat(5525, 10000) && m <= rat(553, 1000));
    assert_eq!(ex.to_string(), "1 + n^(-1) + B(n^(-2), n >= 10)");
}

#[test]
fn radius_violation_names_the_threshold() {
    let cfg = ring();
    let arg = Expansion::n_pow(&cfg, Exponent::from_integer(-1)).scale(&int(2));
    let err = taylor_with_explicit_error(&Kernel::Geometric, &arg, 3, 2).unwrap_err();
    assert!(matches!(err, TaylorError::Radius { valid_from: 2, .. }), "{err}");
    assert!(taylor_with_explicit_error(&Kernel::Geometric, &arg, 3, 3).is_ok());
}

#[test]
fn growing_arguments_are_rejected() {
    let cfg = ring();
    let arg = Expansion::k(&cfg).mul(&Expansion::n_pow(&cfg, Exponent::new(-1, 2)));
    assert!(matches!(taylor_with_explicit_error(&Kernel::Exp, &arg, 2, 10), Err(TaylorError::Growing(_))));
}

/// Akiyama-Tanigawa, which yields `B_1 = +1/2`.
fn bernoulli_oracle(m: usize) -> Rat {
    let mut a: Vec<Rat> = (0..=m).map(|j| rat(1, j as i64 + 1)).collect();
    for i in 1..=m {
        for j in 0..=m - i {
            a[j] = int(j as i64 + 1) * (&a[j] - &a[j + 1]);
        }
    }
    a[0].clone()
}

#[test]
fn bernoulli_against_an_independent_recurrence() {
    assert_eq!(bernoulli(0), int(1));
    assert_eq!(bernoulli(1), rat(-1, 2));
    assert_eq!(bernoulli(2), rat(1, 6));
    assert_eq!(bernoulli(12), rat(-691, 2730));
    for m in 2..=24u32 {
        assert_eq!(bernoulli(m), bernoulli_oracle(m as usize), "B_{m}");
    }
}

#[test]
fn faulhaber_matches_direct_sums() {
    for r in 1..=12u32 {
        let p = faulhaber(r);
        assert_eq!(p.max_degree(), Some(r + 1));
        assert_eq!(p.coeff(r + 1), rat(1, r as i64 + 1));
        let mut s = Rat::zero();
        assert!(p.eval(&Rat::zero()).is_zero());
        for k in 1..=50i64 {
            s += num_traits::pow(int(k), r as usize);
            assert_eq!(p.eval(&int(k)), s, "r = {r}, k = {k}");
        }
    }
}

fn kernel_value(kernel: &Kernel, t: &Interval) -> Interval {
    let one = Interval::one();
    match kernel {
        Kernel::Exp => t.exp(),
        Kernel::Geometric => one.sub(t).recip(),
        Kernel::EvenGeometric => one.sub(&t.sqr()).recip(),
        Kernel::Log1p => one.add(t).ln(),
    }
}

fn kernel_index() -> impl Strategy<Value = Kernel> {
    (0usize..4).prop_map(|i| KERNELS[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn lagrange_constants_are_valid(kernel in kernel_index(), m in 1u32..9, r_num in 1i64..90, t in -1.0f64..1.0) {
        let r = rat(r_num, 100);
        let xi = &r * Rat::from_float(t).unwrap();
        let bound = kernel.derivative_bound(m, &r);
        let actual = match scaled_derivative(&kernel, m, &xi) {
            Some(v) => v.abs(),
            None => exp_bounds(&xi).1 / Rat::from_integer(factorial(m)),
        };
        prop_assert!(actual <= bound, "{} m = {} at {}", kernel.name(), m, xi);
        prop_assert!(kernel.derivative_bound(m, &(&r * rat(1, 2))) <= bound);
    }

    #[test]
    fn taylor_envelope_soundness(
        kernel in kernel_index(), order in 1u32..5, c1 in -3i64..4, c2 in -3i64..4,
        maj in 0i64..3, theta in -4i64..5, vf in 10u64..40, mult in 1u64..50, kf in 0.0f64..1.0,
    ) {
        let cfg = ring();
        let mut arg = Expansion::n_pow(&cfg, Exponent::from_integer(-1)).scale(&int(c1))
            .add(&Expansion::k(&cfg).mul(&Expansion::n_pow(&cfg, Exponent::from_integer(-2))).scale(&int(c2)));
        if maj > 0 {
            arg = arg.add(&Expansion::b_term(&cfg, KPoly::monomial(int(maj), 2), Exponent::from_integer(-3), vf));
        }
        let ex = match taylor_with_explicit_error(&kernel, &arg, order, vf) {
            Ok(ex) => ex,
            Err(TaylorError::Radius { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let n = vf * mult;
        let kmax = (n as f64).powf(4.0 / 7.0).floor() as i64;
        let k = int(1 + ((kmax - 1) as f64 * kf) as i64);
        let nn = int(n as i64);
        let mut t = int(c1) / &nn + int(c2) * &k / (&nn * &nn);
        if maj > 0 {
            t += rat(theta, 4) * int(maj) * &k * &k / (&nn * &nn * &nn);
        }
        let truth = kernel_value(&kernel, &Interval::from_rat(&t));
        let (lo, hi) = ex.envelope(n, &k).unwrap();
        prop_assert!(lo <= truth.lo_rat() && truth.hi_rat() <= hi, "{} at n = {}, k = {}", ex, n, k);
    }

    #[test]
    fn higher_order_never_widens(kernel in kernel_index(), order in 1u32..5, c1 in 1i64..4, vf in 10u64..40, kf in 0.0f64..1.0) {
        let cfg = ring();
        let arg = Expansion::n_pow(&cfg, Exponent::from_integer(-1)).scale(&int(c1))
            .add(&Expansion::k(&cfg).mul(&Expansion::n_pow(&cfg, Exponent::from_integer(-2))));
        let (Ok(a), Ok(b)) = (
            taylor_with_explicit_error(&kernel, &arg, order, vf),
            taylor_with_explicit_error(&kernel, &arg, order + 1, vf),
        ) else { return Ok(()) };
        let n = 10 * vf;
        let kmax = (n as f64).powf(4.0 / 7.0).floor() as i64;
        let k = int(1 + ((kmax - 1) as f64 * kf) as i64);
        let (alo, ahi) = a.envelope(n, &k).unwrap();
        let (blo, bhi) = b.envelope(n, &k).unwrap();
        prop_assert!(bhi - blo <= ahi - alo, "order {} vs {}", order, order + 1);
    }
}

#[test]
fn series_with_o_term_matches_coefficients() {
    let cfg = ring();
    let arg = Expansion::n_pow(&cfg, Exponent::from_integer(-1));
    let s = series_with_o_term(&Kernel::Log1p, &arg, 4).unwrap();
    assert_eq!(s.to_string(), "n^(-1) - 1/2*n^(-2) + 1/3*n^(-3) + O(n^(-4))");
    assert!(Kernel::Geometric.coefficient(7).is_one());
}
