//! Exact division and greatest common divisors over `Q[vars]`.
//!
//! Variables that cannot occur in the gcd are ruled out first by univariate
//! images at integer points; most calls end there with gcd 1. If some
//! variables are ruled out, the gcd is taken over the coefficients in those
//! variables. Otherwise a heuristic gcd by integer evaluation is tried and
//! checked by division, with a subresultant remainder sequence in the variable
//! of least degree as the fallback. Inputs must be free of exponential factors except where a
//! monomial divisor is involved.

use num::{BigInt, Integer, One, Signed, Zero};

use super::coord::Coord;
use super::poly::{Monomial, Poly, Q};

/// `a / b` when `b` divides `a` exactly, `None` otherwise.
pub(crate) fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(Poly::zero());
    }
    if let Some(c) = b.as_constant() {
        return Some(a.scale(&c.recip()));
    }
    if b.is_monomial() {
        let (bm, bq) = b.leading()?;
        let inv = bq.recip();
        let mut out = Poly::zero();
        for (m, q) in a.terms() {
            out.add_term(m.div(bm)?, q * &inv);
        }
        return Some(out);
    }
    let x = b.poly_vars().into_iter().next_back()?;
    let db = b.degree_in(x);
    let lcb = b.coeff_of_degree(x, db);
    let mut r = a.clone();
    let mut q = Poly::zero();
    while !r.is_zero() {
        let dr = r.degree_in(x);
        if dr < db {
            return None;
        }
        let lcr = r.coeff_of_degree(x, dr);
        let t = div_exact(&lcr, &lcb)?.mul_var_pow(x, dr - db);
        r = &r - &(&t * b);
        q = &q + &t;
    }
    Some(q)
}

fn monomial_gcd(m: &Monomial, p: &Poly) -> Poly {
    let pows: Vec<(Coord, u32)> = m
        .pows
        .iter()
        .filter_map(|&(c, k)| {
            let d = p.terms().map(|(pm, _)| pm.degree_in(c)).min().unwrap_or(0).min(k);
            (d > 0).then_some((c, d))
        })
        .collect();
    Poly::term(
        Monomial {
            pows,
            exps: Vec::new(),
        },
        Q::one(),
    )
}

/// A gcd of `a` and `b`, scaled to coprime integer coefficients.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.integer_primitive();
    }
    if b.is_zero() {
        return a.integer_primitive();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() {
        return monomial_gcd(a.leading().unwrap().0, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b.leading().unwrap().0, a);
    }
    let ma = Poly::term(monomial_content(a), Q::one());
    let mb = Poly::term(monomial_content(b), Q::one());
    let gm = monomial_gcd(ma.leading().unwrap().0, &mb);
    let a = div_exact(a, &ma).expect("monomial content divides");
    let b = div_exact(b, &mb).expect("monomial content divides");
    if a.is_constant() || b.is_constant() {
        return gm;
    }
    &gm * &gcd_no_monomial(&a, &b)
}

fn monomial_content(p: &Poly) -> Monomial {
    let mut iter = p.terms().map(|(m, _)| m);
    let Some(first) = iter.next() else {
        return Monomial::one();
    };
    let mut pows: Vec<(Coord, u32)> = first.pows.clone();
    for m in iter {
        pows = pows
            .into_iter()
            .filter_map(|(c, k)| {
                let d = m.degree_in(c).min(k);
                (d > 0).then_some((c, d))
            })
            .collect();
        if pows.is_empty() {
            break;
        }
    }
    Monomial {
        pows,
        exps: Vec::new(),
    }
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    let va = a.poly_vars();
    let vb = b.poly_vars();
    // The gcd can only involve variables that survive a univariate image test.
    let candidates: Vec<Coord> = va
        .intersection(&vb)
        .copied()
        .filter(|&x| !image_gcd_is_trivial(a, b, x))
        .collect();
    if candidates.is_empty() {
        return Poly::one();
    }
    // The gcd lies in Q[candidates], so it is the gcd of the coefficients of
    // `a` and `b` in the remaining variables.
    if va.union(&vb).any(|c| !candidates.contains(c)) {
        let mut parts: Vec<Poly> = coeffs_outside(a, &candidates);
        parts.extend(coeffs_outside(b, &candidates));
        parts.sort_by_key(Poly::len);
        let mut g = Poly::zero();
        for p in &parts {
            g = gcd(&g, p);
            if g.is_constant() {
                return Poly::one();
            }
        }
        return g.integer_primitive();
    }
    if let Some(g) = heuristic_gcd(a, b) {
        return g.integer_primitive();
    }
    let Some(&x) = candidates
        .iter()
        .min_by_key(|&&x| (a.degree_in(x).max(b.degree_in(x)), std::cmp::Reverse(x)))
    else {
        return Poly::one();
    };
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let pa = div_exact(a, &ca).expect("content divides");
    let pb = div_exact(b, &cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = subresultant(&pa, &pb, x);
    (&c * &g).integer_primitive()
}

/// Heuristic gcd by evaluation at a large integer and ξ-adic reconstruction.
/// A result is only returned after exact division confirms it; `None` means
/// the heuristic gave up, never that the gcd is trivial.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let plain = |p: &Poly| {
        p.terms().all(|(m, _)| m.exps.is_empty())
            && !p.poly_vars().iter().any(|&c| c == Coord::I || c == Coord::SQRT2)
    };
    if !plain(a) || !plain(b) {
        return None;
    }
    heu_z(&a.integer_primitive(), &b.integer_primitive(), 0)
}

fn max_coeff(p: &Poly) -> BigInt {
    p.terms().map(|(_, q)| q.numer().abs()).max().unwrap_or_default()
}

fn int_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |g, (_, q)| g.gcd(q.numer()))
}

/// Gcd over `Z[vars]` of integer polynomials, including the integer content.
fn heu_z(a: &Poly, b: &Poly, depth: u32) -> Option<Poly> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let (ca, cb) = (int_content(a), int_content(b));
    let content = ca.gcd(&cb);
    if a.is_constant() || b.is_constant() {
        return Some(Poly::constant(Q::from_integer(content)));
    }
    let (a, b) = (a.scale(&Q::from_integer(ca).recip()), b.scale(&Q::from_integer(cb).recip()));
    let mut vars = a.poly_vars();
    vars.extend(b.poly_vars());
    let x = *vars.iter().next_back()?;
    let mut xi: BigInt = BigInt::from(2) * max_coeff(&a).min(max_coeff(&b)) + BigInt::from(29);
    for _ in 0..6 {
        // Too many digits means the reconstruction is hopeless at this depth.
        if xi.bits() > 4096 || depth > 8 {
            return None;
        }
        let ea = eval_at(&a, x, &xi);
        let eb = eval_at(&b, x, &xi);
        if let Some(gamma) = heu_z(&ea, &eb, depth + 1) {
            let g = reconstruct(&gamma, x, &xi);
            if !g.is_zero() {
                let g = g.scale(&Q::from_integer(int_content(&g)).recip());
                if div_exact(&a, &g).is_some() && div_exact(&b, &g).is_some() {
                    return Some(g.scale(&Q::from_integer(content)));
                }
            }
        }
        xi = &xi * BigInt::from(73794) / BigInt::from(27011);
    }
    None
}

fn eval_at(p: &Poly, x: Coord, xi: &BigInt) -> Poly {
    let mut out = Poly::zero();
    for (m, q) in p.terms() {
        let k = m.degree_in(x);
        out.add_term(m.with_degree(x, 0), q * Q::from_integer(num::pow(xi.clone(), k as usize)));
    }
    out
}

/// Inverse of `eval_at` with symmetric digits in base `xi`.
fn reconstruct(gamma: &Poly, x: Coord, xi: &BigInt) -> Poly {
    let half = xi / 2;
    let mut out = Poly::zero();
    for (m, q) in gamma.terms() {
        let mut c = q.numer().clone();
        let mut k = 0u32;
        while !c.is_zero() {
            let mut r = c.mod_floor(xi);
            if r > half {
                r -= xi;
            }
            if !r.is_zero() {
                out.add_term(m.with_degree(x, k), Q::from_integer(r.clone()));
            }
            c = (c - r) / xi;
            k += 1;
        }
    }
    out
}

/// Coefficients of `p` as a polynomial in the variables outside `keep`.
fn coeffs_outside(p: &Poly, keep: &[Coord]) -> Vec<Poly> {
    let mut groups: std::collections::BTreeMap<Vec<(Coord, u32)>, Poly> = Default::default();
    for (m, q) in p.terms() {
        let (inside, outside): (Vec<_>, Vec<_>) = m.pows.iter().partition(|(c, _)| keep.contains(c));
        let inner = Monomial {
            pows: inside,
            exps: m.exps.clone(),
        };
        groups.entry(outside).or_default().add_term(inner, q.clone());
    }
    groups.into_values().collect()
}

/// Whether an evaluation of every variable except `x` proves that the gcd is
/// free of `x`. A `false` answer proves nothing.
fn image_gcd_is_trivial(a: &Poly, b: &Poly, x: Coord) -> bool {
    let mut vars = a.poly_vars();
    vars.extend(b.poly_vars());
    vars.remove(&x);
    let (da, db) = (a.degree_in(x), b.degree_in(x));
    let mut seed: u64 = 0x9e37_79b9;
    for _ in 0..3 {
        let point: Vec<(Coord, Q)> = vars
            .iter()
            .map(|&c| {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (c, Q::from_integer((3 + ((seed >> 33) % 97) as i64).into()))
            })
            .collect();
        let ua = univariate_image(a, x, &point);
        let ub = univariate_image(b, x, &point);
        if ua.len() != da as usize + 1 || ub.len() != db as usize + 1 {
            continue;
        }
        return univariate_gcd_degree(ua, ub) == 0;
    }
    false
}

/// Coefficients (lowest first, trailing zeros trimmed) of `p` with every
/// variable but `x` fixed.
fn univariate_image(p: &Poly, x: Coord, point: &[(Coord, Q)]) -> Vec<Q> {
    let mut out = vec![Q::zero(); p.degree_in(x) as usize + 1];
    for (m, q) in p.terms() {
        let mut v = q.clone();
        for &(c, k) in &m.pows {
            if c != x {
                let val = &point.iter().find(|(pc, _)| *pc == c).expect("bound").1;
                v *= num::pow(val.clone(), k as usize);
            }
        }
        out[m.degree_in(x) as usize] += v;
    }
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

fn univariate_gcd_degree(mut f: Vec<Q>, mut g: Vec<Q>) -> usize {
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_empty() {
        let lg = g.last().unwrap().clone();
        while f.len() >= g.len() {
            let shift = f.len() - g.len();
            let c = f.last().unwrap() / &lg;
            for (i, gi) in g.iter().enumerate() {
                f[i + shift] -= &c * gi;
            }
            f.pop();
            while f.last().is_some_and(Zero::is_zero) {
                f.pop();
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    f.len().saturating_sub(1)
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
fn content_in(p: &Poly, x: Coord) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(x).into_values() {
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn primitive_in(p: &Poly, x: Coord) -> Poly {
    let c = content_in(p, x);
    div_exact(p, &c).expect("content divides").integer_primitive()
}

/// Pseudo-remainder `lc(g)^(deg f - deg g + 1) * f mod g` in `x`.
fn prem(f: &Poly, g: &Poly, x: Coord) -> Poly {
    let dg = g.degree_in(x);
    let lcg = g.coeff_of_degree(x, dg);
    let mut r = f.clone();
    let mut e = (f.degree_in(x) + 1).saturating_sub(dg);
    while !r.is_zero() {
        let dr = r.degree_in(x);
        if dr < dg {
            break;
        }
        let lcr = r.coeff_of_degree(x, dr);
        r = &(&r * &lcg) - &(&g.mul_var_pow(x, dr - dg) * &lcr);
        e = e.saturating_sub(1);
    }
    &r * &lcg.pow(e)
}

/// Subresultant remainder sequence; inputs primitive in `x`.
fn subresultant(a: &Poly, b: &Poly, x: Coord) -> Poly {
    let (mut f, mut g) = if a.degree_in(x) >= b.degree_in(x) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let mut psi = Poly::one();
    let mut h = Poly::one();
    loop {
        let d = f.degree_in(x) - g.degree_in(x);
        let r = prem(&f, &g, x);
        if r.is_zero() {
            return primitive_in(&g, x);
        }
        if r.degree_in(x) == 0 {
            return Poly::one();
        }
        let divisor = &psi * &h.pow(d);
        f = g;
        g = div_exact(&r, &divisor).expect("subresultant division is exact");
        psi = f.coeff_of_degree(x, f.degree_in(x));
        h = if d == 0 {
            h
        } else {
            div_exact(&psi.pow(d), &h.pow(d - 1)).expect("subresultant division is exact")
        };
    }
}
