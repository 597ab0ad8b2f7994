//! Taylor expansion of a small catalog of analytic kernels at expansion-valued
//! arguments, with a Lagrange remainder turned into a B-term. Also Bernoulli
//! numbers and Faulhaber power-sum polynomials.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{binomial, ceil_int, exp_bounds, factorial, int, pow_upper, rat, Exponent, Rat};
use crate::expansion::{raw_product, Expansion, KPoly, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaylorError {
    #[error("argument radius {radius} at valid_from = {valid_from} is outside the kernel's disc of convergence")]
    Radius { valid_from: u64, radius: String },
    #[error("argument term {0} does not decay, so no uniform radius exists")]
    Growing(String),
    #[error("argument contains an O-term; an explicit radius needs B-terms")]
    OTerm,
    #[error("unknown kernel {0}")]
    UnknownKernel(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `e^t`
    Exp,
    /// `1/(1-t)`
    Geometric,
    /// `1/(1-t^2)`
    EvenGeometric,
    /// `log(1+t)`
    Log1p,
}

impl Kernel {
    pub fn from_name(name: &str) -> Result<Kernel, TaylorError> {
        match name {
            "exp" => Ok(Kernel::Exp),
            "geometric" => Ok(Kernel::Geometric),
            "even-geometric" => Ok(Kernel::EvenGeometric),
            "log1p" => Ok(Kernel::Log1p),
            other => Err(TaylorError::UnknownKernel(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Exp => "exp",
            Kernel::Geometric => "geometric",
            Kernel::EvenGeometric => "even-geometric",
            Kernel::Log1p => "log1p",
        }
    }

    /// Taylor coefficient of `t^i` at the origin.
    pub fn coefficient(&self, i: u32) -> Rat {
        match self {
            Kernel::Exp => Rat::new(BigInt::one(), factorial(i)),
            Kernel::Geometric => Rat::one(),
            Kernel::EvenGeometric => {
                if i.is_multiple_of(2) {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }
            Kernel::Log1p => {
                if i == 0 {
                    Rat::zero()
                } else {
                    let s = if i % 2 == 1 { 1 } else { -1 };
                    rat(s, i as i64)
                }
            }
        }
    }

    /// Radius of the disc of convergence; `None` for entire kernels.
    pub fn radius(&self) -> Option<Rat> {
        match self {
            Kernel::Exp => None,
            _ => Some(Rat::one()),
        }
    }

    /// Upper bound on `sup_{|x| <= r} |f^(m)(x)| / m!`.
    pub fn derivative_bound(&self, m: u32, r: &Rat) -> Rat {
        let one = Rat::one();
        match self {
            Kernel::Exp => exp_bounds(r).1 / Rat::from_integer(factorial(m)),
            Kernel::Geometric => (&one - r).pow(-(m as i32 + 1)),
            Kernel::Log1p => (&one - r).pow(-(m as i32)) / int(m as i64),
            Kernel::EvenGeometric => {
                // f = (1/(1-x) + 1/(1+x))/2; |f^(m)/m!| is increasing in |x| and
                // its value at x = r is the bound
                let a = (&one - r).pow(-(m as i32 + 1));
                let b = (&one + r).pow(-(m as i32 + 1));
                if m.is_multiple_of(2) {
                    (a + b) / int(2)
                } else {
                    (a - b) / int(2)
                }
            }
        }
    }

    /// Remainder constant actually used: the derivative bound rounded up to
    /// the next integer.
    pub fn remainder_constant(&self, m: u32, r: &Rat) -> Rat {
        ceil_int(&self.derivative_bound(m, r))
    }
}

/// Upper bound for `|arg|` on the whole domain `n >= valid_from`,
/// `k <= n^beta`, attained at `n = valid_from`, `k = valid_from^beta`
/// because every monomial has non-positive upper growth.
pub fn argument_radius(arg: &Expansion, valid_from: u64) -> Result<Rat, TaylorError> {
    let cfg = arg.config();
    let v = int(valid_from as i64);
    let mut r = Rat::zero();
    for t in arg.terms() {
        let (poly, q) = match t {
            Term::Exact { coeff, q } => (coeff.abs(), *q),
            Term::B { majorant, q, .. } => (majorant.clone(), *q),
            Term::O { .. } => return Err(TaylorError::OTerm),
        };
        for (d, c) in poly.iter() {
            let e: Exponent = q + cfg.beta * (d as i64);
            if e > Exponent::zero() {
                return Err(TaylorError::Growing(t.to_string()));
            }
            r += c * pow_upper(&v, e);
        }
    }
    Ok(r)
}

fn scale_terms(terms: &[Term], c: &Rat) -> Vec<Term> {
    terms
        .iter()
        .map(|t| match t {
            Term::Exact { coeff, q } => Term::Exact { coeff: coeff.scale(c), q: *q },
            Term::B { majorant, q, valid_from } => {
                Term::B { majorant: majorant.scale(&c.abs()), q: *q, valid_from: *valid_from }
            }
            other => other.clone(),
        })
        .collect()
}

/// Terms of `sum_{i<order} c_i arg^i`, multiplied out without absorption.
fn partial_sum_terms(kernel: &Kernel, arg: &Expansion, order: u32) -> Vec<Term> {
    let cfg = arg.config();
    let mut out = Vec::new();
    let mut power = Expansion::one(cfg).terms().to_vec();
    for i in 0..order {
        let c = kernel.coefficient(i);
        if !c.is_zero() {
            out.extend(scale_terms(&power, &c));
        }
        if i + 1 < order {
            power = raw_product(&power, arg.terms(), cfg);
        }
    }
    out
}

/// `sum_{i<order} c_i arg^i + B(M |arg|^order)`, valid for `n >= valid_from`.
/// Powers are multiplied out first; absorption happens once, on the full sum.
pub fn taylor_with_explicit_error(
    kernel: &Kernel,
    arg: &Expansion,
    order: u32,
    valid_from: u64,
) -> Result<Expansion, TaylorError> {
    let cfg = arg.config();
    let r = argument_radius(arg, valid_from)?;
    if let Some(rho) = kernel.radius() {
        if r >= rho {
            return Err(TaylorError::Radius { valid_from, radius: crate::exact::to_decimal(&r, 6) });
        }
    }
    let mut terms = partial_sum_terms(kernel, arg, order);
    if !arg.is_zero() {
        let m = kernel.remainder_constant(order, &r);
        let abs: Vec<Term> = arg
            .terms()
            .iter()
            .map(|t| match t {
                Term::Exact { coeff, q } => Ok(Term::bterm(coeff.abs(), *q, valid_from)),
                Term::B { majorant, q, valid_from: v } => Ok(Term::bterm(majorant.clone(), *q, valid_from.max(*v))),
                Term::O { .. } => Err(TaylorError::OTerm),
            })
            .collect::<Result<_, _>>()?;
        let mut power = abs.clone();
        for _ in 1..order {
            power = raw_product(&power, &abs, cfg);
        }
        terms.extend(scale_terms(&power, &m));
    }
    Ok(Expansion::from_terms(cfg, terms))
}

/// `sum_{i<prec} c_i arg^i + O(n^(prec*u))`, `u` the upper growth of `arg`.
pub fn series_with_o_term(kernel: &Kernel, arg: &Expansion, prec: usize) -> Result<Expansion, TaylorError> {
    let head = Expansion::from_terms(arg.config(), partial_sum_terms(kernel, arg, prec as u32));
    let Some(u) = arg.upper_growth() else {
        return Ok(head);
    };
    if u >= Exponent::zero() {
        return Err(TaylorError::Growing(arg.to_string()));
    }
    Ok(head.add(&Expansion::o_term(arg.config(), u * (prec as i64))))
}

/// Bernoulli numbers with `B_1 = -1/2`.
pub fn bernoulli(m: u32) -> Rat {
    bernoulli_table(m).pop().expect("non-empty table")
}

pub fn bernoulli_table(m: u32) -> Vec<Rat> {
    let mut b: Vec<Rat> = vec![Rat::one()];
    for n in 1..=m {
        // sum_{j<=n} C(n+1, j) B_j = 0
        let mut s = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Rat::from_integer(binomial(n as u64 + 1, j as u64)) * bj;
        }
        b.push(-s / int(n as i64 + 1));
    }
    b
}

/// Polynomial `P` with `P(k) = 1^r + 2^r + ... + k^r`.
pub fn faulhaber(r: u32) -> KPoly {
    let b = bernoulli_table(r);
    let mut p = KPoly::zero();
    // sum_{j<k} j^r = 1/(r+1) sum_j C(r+1, j) B_j k^(r+1-j)
    for (j, bj) in b.iter().enumerate() {
        let c = Rat::from_integer(binomial(r as u64 + 1, j as u64)) * bj / int(r as i64 + 1);
        p.add_monomial(c, r + 1 - j as u32);
    }
    p.add_monomial(Rat::one(), r);
    p
}

/// Exact value of `f^(m)(x)/m!` for the rational kernels; `None` for `exp`.
pub fn scaled_derivative(kernel: &Kernel, m: u32, x: &Rat) -> Option<Rat> {
    let one = Rat::one();
    let e = -(m as i32 + 1);
    match kernel {
        Kernel::Exp => None,
        Kernel::Geometric => Some((&one - x).pow(e)),
        Kernel::EvenGeometric => {
            let a = (&one - x).pow(e);
            let b = (&one + x).pow(e);
            Some(if m.is_multiple_of(2) { (a + b) / int(2) } else { (a - b) / int(2) })
        }
        Kernel::Log1p => {
            if m == 0 {
                return None;
            }
            let s = if m % 2 == 1 { one.clone() } else { -one.clone() };
            Some(s * (&one + x).pow(-(m as i32)) / int(m as i64))
        }
    }
}

pub fn is_nonnegative(x: &Rat) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn faulhaber_small() {
        assert_eq!(faulhaber(1), KPoly::from_coeffs([(2, rat(1, 2)), (1, rat(1, 2))]));
        assert_eq!(faulhaber(3), KPoly::from_coeffs([(4, rat(1, 4)), (3, rat(1, 2)), (2, rat(1, 4))]));
        assert_eq!(faulhaber(9).max_degree(), Some(10));
        assert_eq!(faulhaber(9).coeff(10), rat(1, 10));
    }
}
