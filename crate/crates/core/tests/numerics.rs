use bterms::exact::{exp_bounds, int, rat, Rat};
use bterms::interval::{ComplexInterval, F64Interval, Interval};
use bterms::quad::{line_segment_enclosure, Expr, Integrand};
use bterms::special::{gamma_enclosure, gamma_real, zeta, zeta_enclosure, SpecialError};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

// reference digits from an independent 40-digit evaluation
const ZETA_3_2: &str = "2.612375348685488343348567567924071630571";
const ZETA_3_4_5I: (&str, &str) = ("0.7322122488042882921595056745447448762042", "0.2037932027641261802324323804974063977417");
const GAMMA_1_3: &str = "2.678938534707747633655692940974677644129";
const ABS_GAMMA_3_4_10I: &str = "0.0000006716981968105012934288196109877400029219";

fn dec(s: &str) -> Rat {
    bterms::exact::parse_rat(s).expect("decimal")
}

/// The reference has 40 digits; allow for the last one.
fn near(x: &Interval, s: &str) -> bool {
    let r = dec(s);
    let slack = r.abs() / Rat::from_integer(bterms::exact::pow10(38)) + Rat::new(1.into(), bterms::exact::pow10(45));
    x.lo_rat() <= &r + &slack && &r - &slack <= x.hi_rat()
}

fn c(re: Rat, im: Rat) -> ComplexInterval {
    ComplexInterval::from_rats(&re, &im)
}

#[test]
fn classical_zeta_values() {
    let z0 = zeta(&c(int(0), int(0))).unwrap();
    assert!(z0.re.contains_rat(&rat(-1, 2)) && z0.re.width_f64() < 1e-20);
    let z2 = zeta(&c(int(2), int(0))).unwrap();
    let pi2_6 = Interval::pi().sqr().scale(&rat(1, 6));
    assert!(z2.re.lo_rat() <= pi2_6.hi_rat() && pi2_6.lo_rat() <= z2.re.hi_rat());
    assert!(z2.re.width_f64() < 1e-20 && z2.im.contains_zero());
    let z = zeta(&c(rat(3, 2), int(0))).unwrap();
    assert!(near(&z.re, ZETA_3_2) && z.re.width_f64() < 1e-20, "{z}");
    let z = zeta(&c(rat(3, 4), int(5))).unwrap();
    assert!(near(&z.re, ZETA_3_4_5I.0) && near(&z.im, ZETA_3_4_5I.1), "{z}");
    assert!(matches!(zeta(&c(int(1), int(0))), Err(SpecialError::ZetaPole(_))));
}

#[test]
fn classical_gamma_values() {
    let g = gamma_real(&rat(1, 2)).unwrap();
    let sqrt_pi = Interval::pi().sqrt();
    assert!(g.lo_rat() <= sqrt_pi.hi_rat() && sqrt_pi.lo_rat() <= g.hi_rat() && g.width_f64() < 1e-20);
    let g = gamma_real(&int(5)).unwrap();
    assert!(g.contains_rat(&int(24)) && g.width_f64() < 1e-20);
    assert!(near(&gamma_real(&rat(1, 3)).unwrap(), GAMMA_1_3));
    let g = gamma_enclosure(&c(rat(3, 4), int(10))).unwrap();
    assert!(near(&g.abs(), ABS_GAMMA_3_4_10I), "{}", g.abs());
    assert!(gamma_real(&int(0)).is_err() && gamma_real(&int(-3)).is_err());
}

#[test]
fn zeta_refines_with_more_terms() {
    for (re, im) in [(rat(3, 4), int(7)), (rat(-1, 4), int(3)), (int(2), int(40))] {
        let s = c(re, im);
        let mut prev: Option<ComplexInterval> = None;
        for t in [10usize, 20, 40, 80, 160] {
            let z = zeta_enclosure(&s, t).unwrap();
            if let Some(p) = &prev {
                // past the remainder, extra summands only move the rounding error
                let floor = 1e-32 * z.abs().hi_f64().max(1.0);
                assert!(z.re.width_f64() <= (p.re.width_f64() * (1.0 + 1e-6)).max(floor), "{s}: {} then {}", p.re.width_f64(), z.re.width_f64());
                assert!(z.im.width_f64() <= (p.im.width_f64() * (1.0 + 1e-6)).max(floor), "{s}");
                assert!(p.re.lo_rat() <= z.re.hi_rat() && z.re.lo_rat() <= p.re.hi_rat());
            }
            prev = Some(z);
        }
    }
}

#[test]
fn segment_integrals() {
    let one = Integrand::re(Expr::constant(ComplexInterval::one()));
    let r = line_segment_enclosure(&one, &int(0), &int(0), &int(2), &rat(1, 1000)).unwrap();
    assert!(r.enclosure.contains_rat(&int(2)) && r.width <= 1e-3);
    let gauss = Integrand::re(Expr::var().mul(Expr::var()).exp());
    let r = line_segment_enclosure(&gauss, &int(0), &int(-5), &int(5), &rat(1, 10000)).unwrap();
    let sqrt_pi = Interval::pi().sqrt();
    assert!(r.enclosure.lo_rat() <= sqrt_pi.hi_rat() && sqrt_pi.lo_rat() <= r.enclosure.hi_rat());
    assert!(line_segment_enclosure(&one, &int(0), &int(1), &int(1), &rat(1, 10)).is_err());
}

#[test]
fn segment_integrals_split_additively() {
    // |zeta(s) Gamma(s)| on Re(s) = 3/4
    let f = Integrand::abs(Expr::zeta(Expr::var()).mul(Expr::gamma(Expr::var())));
    let tol = rat(1, 1000);
    let whole = line_segment_enclosure(&f, &rat(3, 4), &int(1), &int(9), &tol).unwrap().enclosure;
    let a = line_segment_enclosure(&f, &rat(3, 4), &int(1), &rat(7, 2), &tol).unwrap().enclosure;
    let b = line_segment_enclosure(&f, &rat(3, 4), &rat(7, 2), &int(9), &tol).unwrap().enclosure;
    let sum = a.add(&b);
    assert!(whole.lo_rat() <= sum.hi_rat() && sum.lo_rat() <= whole.hi_rat(), "{whole} vs {sum}");
}

fn point() -> impl Strategy<Value = Rat> {
    (-10_000i64..10_000, 1i64..997).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn containment_of_rational_operations(x in point(), y in point()) {
        let (ix, iy) = (Interval::from_rat(&x), Interval::from_rat(&y));
        prop_assert!(ix.add(&iy).contains_rat(&(&x + &y)));
        prop_assert!(ix.sub(&iy).contains_rat(&(&x - &y)));
        prop_assert!(ix.mul(&iy).contains_rat(&(&x * &y)));
        if !y.is_zero() {
            prop_assert!(ix.div(&iy).contains_rat(&(&x / &y)));
        }
        prop_assert!(ix.powi(3).contains_rat(&(&x * &x * &x)));
        prop_assert!(ix.abs().contains_rat(&x.abs()));
    }

    #[test]
    fn containment_of_exp_and_log(x in point()) {
        // exp against rational Taylor bounds
        let small = &x / int(200);
        let e = Interval::from_rat(&small).exp();
        let (lo, hi) = exp_bounds(&small);
        prop_assert!(e.lo_rat() <= hi && lo <= e.hi_rat());
        prop_assert!(e.width_f64() <= 1e-30 * e.hi_f64().max(1.0));
        // log through exp at the endpoints
        let p = x.abs() + rat(1, 1000);
        let l = Interval::from_rat(&p).ln();
        prop_assert!(exp_bounds(&l.lo_rat()).0 <= p && p <= exp_bounds(&l.hi_rat()).1);
        prop_assert!((l.mid_f64() - bterms::exact::to_f64(&p).ln()).abs() <= 1e-12);
        let s = Interval::from_rat(&p).sqrt();
        prop_assert!(s.lo_rat() * s.lo_rat() <= p && p <= s.hi_rat() * s.hi_rat());
    }

    #[test]
    fn f64_intervals_contain_exact_products(a in -1_000_000i64..1_000_000, b in 1i64..1_000_000, c2 in 1i64..1000) {
        let x = F64Interval::from_i128(a as i128).mul(F64Interval::point(b as f64)).div_pos(F64Interval::point(c2 as f64));
        let exact = rat(a, 1) * rat(b, c2);
        prop_assert!(Rat::from_float(x.lo).unwrap() <= exact && exact <= Rat::from_float(x.hi).unwrap());
    }
}
