//! Parser for exact expansions written in the display syntax, e.g.
//! `k*n^(-1) + n^(-1) - 1/2*k^2*n^(-2)`.

use bterms::exact::{parse_exponent, parse_rat, Exponent, Rat};
use bterms::{Expansion, KPoly, RingConfig};
use num_traits::{One, Zero};

fn parse_factor(f: &str, c: &mut Rat, d: &mut u32, q: &mut Exponent) -> Result<(), String> {
    let f = f.trim();
    if let Some(rest) = f.strip_prefix('k') {
        let e = match rest.strip_prefix('^') {
            Some(p) => p.trim().parse::<u32>().map_err(|_| format!("bad power of k: {f}"))?,
            None if rest.is_empty() => 1,
            None => return Err(format!("bad factor: {f}")),
        };
        *d += e;
    } else if let Some(rest) = f.strip_prefix('n') {
        let e = match rest.strip_prefix('^') {
            Some(p) => {
                let p = p.trim();
                let p = p.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(p);
                parse_exponent(p.trim()).ok_or_else(|| format!("bad power of n: {f}"))?
            }
            None if rest.is_empty() => Exponent::one(),
            None => return Err(format!("bad factor: {f}")),
        };
        *q += e;
    } else {
        *c *= parse_rat(f).ok_or_else(|| format!("bad coefficient: {f}"))?;
    }
    Ok(())
}

/// Splits at top-level `+`/`-`, keeping signs inside `^(...)`.
fn split_terms(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') {
            if !cur.trim().is_empty() {
                out.push((neg, std::mem::take(&mut cur)));
            }
            cur.clear();
            neg = ch == '-';
            continue;
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur));
    }
    out
}

pub fn parse_expansion(cfg: &RingConfig, s: &str) -> Result<Expansion, String> {
    if s.trim().is_empty() {
        return Err("empty expression".into());
    }
    let mut x = Expansion::zero(cfg);
    for (neg, term) in split_terms(s) {
        let mut c = Rat::one();
        let mut d = 0;
        let mut q = Exponent::zero();
        for f in term.split('*') {
            parse_factor(f, &mut c, &mut d, &mut q)?;
        }
        if neg {
            c = -c;
        }
        x = x.add(&Expansion::monomial(cfg, KPoly::monomial(c, d), q));
    }
    Ok(x)
}
