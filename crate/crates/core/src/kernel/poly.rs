//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A monomial is a product of coordinate powers times at most one exponential
//! factor per base coordinate. Exponential factors carry a parameter-polynomial
//! exponent, so `exp(a*x) * exp(b*x)` collapses to `exp((a+b)*x)` and
//! `exp(0*x)` disappears. The formal units `i` and `sqrt2` are reduced by
//! `i^2 = -1` and `sqrt2^2 = 2` whenever monomials are multiplied.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use super::coord::{Coord, Param};

pub type Q = BigRational;

pub(crate) fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub(crate) fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Sorted by coordinate; every power is positive.
    pub(crate) pows: Vec<(Coord, u32)>,
    /// Sorted by base coordinate; every exponent is a non-zero polynomial in parameters.
    pub(crate) exps: Vec<(Coord, Poly)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(c: Coord, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        Monomial {
            pows: vec![(c, k)],
            exps: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.pows.is_empty() && self.exps.is_empty()
    }

    pub fn has_exps(&self) -> bool {
        !self.exps.is_empty()
    }

    pub fn degree_in(&self, c: Coord) -> u32 {
        self.pows
            .iter()
            .find(|(v, _)| *v == c)
            .map_or(0, |&(_, k)| k)
    }

    pub fn total_degree(&self) -> u32 {
        self.pows.iter().map(|&(_, k)| k).sum()
    }

    /// Same monomial with the power of `c` replaced by `k`.
    pub(crate) fn with_degree(&self, c: Coord, k: u32) -> Monomial {
        let mut pows: Vec<(Coord, u32)> = self.pows.iter().copied().filter(|(v, _)| *v != c).collect();
        if k > 0 {
            let at = pows.partition_point(|(v, _)| *v < c);
            pows.insert(at, (c, k));
        }
        Monomial {
            pows,
            exps: self.exps.clone(),
        }
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut pows = Vec::with_capacity(self.pows.len() + other.pows.len());
        let (mut i, mut j) = (0, 0);
        while i < self.pows.len() && j < other.pows.len() {
            let (a, ka) = self.pows[i];
            let (b, kb) = other.pows[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    pows.push((a, ka));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    pows.push((b, kb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    pows.push((a, ka + kb));
                    i += 1;
                    j += 1;
                }
            }
        }
        pows.extend_from_slice(&self.pows[i..]);
        pows.extend_from_slice(&other.pows[j..]);
        let exps = if other.exps.is_empty() {
            self.exps.clone()
        } else if self.exps.is_empty() {
            other.exps.clone()
        } else {
            merge_exps(&self.exps, &other.exps, false)
        };
        Monomial { pows, exps }
    }

    /// Quotient when `other` divides `self` coordinate-wise. Exponential parts
    /// are invertible, so they never block division.
    pub(crate) fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut pows = Vec::with_capacity(self.pows.len());
        let mut j = 0;
        for &(c, k) in &self.pows {
            while j < other.pows.len() && other.pows[j].0 < c {
                return None;
            }
            if j < other.pows.len() && other.pows[j].0 == c {
                let kb = other.pows[j].1;
                if kb > k {
                    return None;
                }
                if k > kb {
                    pows.push((c, k - kb));
                }
                j += 1;
            } else {
                pows.push((c, k));
            }
        }
        if j < other.pows.len() {
            return None;
        }
        let exps = if other.exps.is_empty() {
            self.exps.clone()
        } else {
            merge_exps(&self.exps, &other.exps, true)
        };
        Some(Monomial { pows, exps })
    }

    /// Applies `i^2 = -1` and `sqrt2^2 = 2`, returning the scalar picked up.
    fn reduce_units(&mut self) -> Option<Q> {
        let mut factor: Option<Q> = None;
        for (c, k) in self.pows.iter_mut() {
            let base = match c {
                Coord::Param(Param::I) => -1,
                Coord::Param(Param::Sqrt2) => 2,
                _ => continue,
            };
            if *k >= 2 {
                let f = num::pow(q_int(base), (*k / 2) as usize);
                factor = Some(factor.map_or(f.clone(), |g| g * f));
                *k %= 2;
            }
        }
        if factor.is_some() {
            self.pows.retain(|&(_, k)| k > 0);
        }
        factor
    }
}

fn merge_exps(a: &[(Coord, Poly)], b: &[(Coord, Poly)], subtract: bool) -> Vec<(Coord, Poly)> {
    let mut out: BTreeMap<Coord, Poly> = a.iter().cloned().collect();
    for (base, e) in b {
        let entry = out.entry(*base).or_default();
        *entry = if subtract { &*entry - e } else { &*entry + e };
    }
    out.into_iter().filter(|(_, e)| !e.is_zero()).collect()
}

/// A polynomial: a finite map from monomials to non-zero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    pub(crate) terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(q: Q) -> Self {
        Self::term(Monomial::one(), q)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q_int(n))
    }

    pub fn var(c: Coord) -> Self {
        Self::term(Monomial::var(c, 1), Q::one())
    }

    pub fn term(m: Monomial, q: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, q);
        p
    }

    /// The exponential `exp(exponent * base)`; `exponent` must be free of exponentials.
    pub(crate) fn exp_atom(base: Coord, exponent: Poly) -> Self {
        if exponent.is_zero() {
            return Poly::one();
        }
        Self::term(
            Monomial {
                pows: Vec::new(),
                exps: vec![(base, exponent)],
            },
            Q::one(),
        )
    }

    pub(crate) fn add_term(&mut self, m: Monomial, q: Q) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + q;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, q) = self.terms.iter().next()?;
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn has_exps(&self) -> bool {
        self.terms.keys().any(Monomial::has_exps)
    }

    /// Greatest monomial under the derived order, with its coefficient.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Every coordinate the polynomial depends on, including exponent parameters
    /// and exponential bases.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    pub(crate) fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        for m in self.terms.keys() {
            out.extend(m.pows.iter().map(|&(c, _)| c));
            for (base, e) in &m.exps {
                out.insert(*base);
                e.collect_coords(out);
            }
        }
    }

    /// Coordinates appearing as polynomial variables (exponentials excluded).
    pub(crate) fn poly_vars(&self) -> BTreeSet<Coord> {
        self.terms
            .keys()
            .flat_map(|m| m.pows.iter().map(|&(c, _)| c))
            .collect()
    }

    pub fn degree_in(&self, c: Coord) -> u32 {
        self.terms.keys().map(|m| m.degree_in(c)).max().unwrap_or(0)
    }

    /// Splits into coefficients of powers of `c`.
    pub(crate) fn coeffs_in(&self, c: Coord) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, q) in &self.terms {
            let k = m.degree_in(c);
            out.entry(k)
                .or_default()
                .add_term(m.with_degree(c, 0), q.clone());
        }
        out
    }

    pub(crate) fn coeff_of_degree(&self, c: Coord, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, q) in &self.terms {
            if m.degree_in(c) == k {
                out.add_term(m.with_degree(c, 0), q.clone());
            }
        }
        out
    }

    pub(crate) fn mul_var_pow(&self, c: Coord, k: u32) -> Poly {
        if k == 0 {
            return self.clone();
        }
        self.mul_monomial(&Monomial::var(c, k), &Q::one())
    }

    pub(crate) fn mul_monomial(&self, m: &Monomial, q: &Q) -> Poly {
        let mut out = Poly::zero();
        for (a, qa) in &self.terms {
            let mut prod = a.mul(m);
            let mut coef = qa * q;
            if let Some(f) = prod.reduce_units() {
                coef *= f;
            }
            out.add_term(prod, coef);
        }
        out
    }

    pub fn scale(&self, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Negates every odd power of `c`: the conjugate used to clear `i` or `sqrt2`
    /// from a denominator.
    pub(crate) fn conjugate_in(&self, c: Coord) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, q)| {
                    let q = if m.degree_in(c) % 2 == 1 { -q } else { q.clone() };
                    (m.clone(), q)
                })
                .collect(),
        }
    }

    /// Rational factor `s` such that `s * self` has coprime integer coefficients
    /// and a positive leading coefficient.
    pub(crate) fn integer_normalizer(&self) -> Q {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for q in self.terms.values() {
            lcm = lcm.lcm(q.denom());
            gcd = gcd.gcd(q.numer());
        }
        if gcd.is_zero() {
            return Q::one();
        }
        let mut s = Q::new(lcm, gcd);
        if let Some((_, lead)) = self.leading() {
            if lead.is_negative() {
                s = -s;
            }
        }
        s
    }

    pub(crate) fn integer_primitive(&self) -> Poly {
        self.scale(&self.integer_normalizer())
    }

    pub fn diff(&self, c: Coord) -> Poly {
        let mut out = Poly::zero();
        for (m, q) in &self.terms {
            let k = m.degree_in(c);
            if k > 0 {
                out.add_term(m.with_degree(c, k - 1), q * q_int(k as i64));
            }
            for (base, e) in &m.exps {
                let mut inner = e.diff(c).mul_var_pow(*base, 1);
                if *base == c {
                    inner = &inner + e;
                }
                if !inner.is_zero() {
                    out = &out + &inner.mul_monomial(m, q);
                }
            }
        }
        out
    }

    pub(crate) fn eval_with<F>(&self, value: &F) -> Result<f64, Coord>
    where
        F: Fn(Coord) -> Option<f64>,
    {
        let mut sum = 0.0;
        for (m, q) in &self.terms {
            let mut t = q_to_f64(q);
            for &(c, k) in &m.pows {
                t *= value(c).ok_or(c)?.powi(k as i32);
            }
            for (base, e) in &m.exps {
                let b = value(*base).ok_or(*base)?;
                t *= (e.eval_with(value)? * b).exp();
            }
            sum += t;
        }
        Ok(sum)
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, q) in &small.terms {
            out.add_term(m.clone(), q.clone());
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.add_term(m.clone(), -q.clone());
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect(),
        }
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (a, qa) in &self.terms {
            for (b, qb) in &rhs.terms {
                let mut m = a.mul(b);
                let mut q = qa * qb;
                if let Some(f) = m.reduce_units() {
                    q *= f;
                }
                out.add_term(m, q);
            }
        }
        out
    }
}

fn fmt_q_abs(q: &Q) -> String {
    let a = q.abs();
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, k) in &self.pows {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}^{k}")?;
            }
        }
        for (base, e) in &self.exps {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match e.as_constant() {
                Some(q) if q.is_one() => write!(f, "exp({base})")?,
                _ if e.is_monomial() => write!(f, "exp({e}*{base})")?,
                _ => write!(f, "exp(({e})*{base})")?,
            }
        }
        Ok(())
    }
}

/// Terms are printed from the greatest monomial down.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, q)) in self.terms.iter().rev().enumerate() {
            let neg = q.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = q.abs().is_one();
            if m.is_one() {
                f.write_str(&fmt_q_abs(q))?;
            } else if unit {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_q_abs(q))?;
            }
        }
        Ok(())
    }
}
