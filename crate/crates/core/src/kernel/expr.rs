//! Canonical rational expressions.
//!
//! An [`Expr`] is `num / den` with `gcd(num, den) = 1`. The denominator has
//! coprime integer coefficients and a positive coefficient on its greatest
//! monomial; zero is `0 / 1`. Denominators never contain `i` or `sqrt2`
//! (they are cleared by conjugation). Exponential factors are units, so any
//! pure exponential content of the denominator is moved into the numerator.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use super::coord::{Coord, CoordKind};
use super::error::KernelError;
use super::gcd::{div_exact, gcd};
use super::poly::{q_int, Monomial, Poly, Q};

/// Denominators with magnitude at or below this are rejected by numeric evaluation.
pub const DEFAULT_EPS_DIV: f64 = 1e-12;

pub type Bindings = BTreeMap<Coord, Expr>;
pub type Point = BTreeMap<Coord, f64>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::from_poly(Poly::int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::from_poly(Poly::constant(Q::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn constant(q: Q) -> Self {
        Expr::from_poly(Poly::constant(q))
    }

    pub fn coord(c: Coord) -> Self {
        Expr::from_poly(Poly::var(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// `exp(exponent * base)` where `exponent` involves parameters only.
    pub fn exp_atom(base: Coord, exponent: &Expr) -> Result<Expr, KernelError> {
        exp_of(&(exponent * &Expr::coord(base))).map(Expr::from_poly)
    }

    /// Builds `num / den` and normalizes.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, KernelError> {
        normalize(num, den)
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_identically_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one_poly() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one_poly()
    }

    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.num.collect_coords(&mut out);
        self.den.collect_coords(&mut out);
        out
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        self.coords().contains(&c)
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, KernelError> {
        if rhs.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn recip(&self) -> Result<Expr, KernelError> {
        Expr::one().checked_div(self)
    }

    pub fn scale(&self, q: &Q) -> Expr {
        Expr {
            num: self.num.scale(q),
            den: if q.is_zero() { Poly::one() } else { self.den.clone() },
        }
    }

    /// Integer power; negative powers of zero are an error.
    pub fn pow(&self, k: i32) -> Result<Expr, KernelError> {
        let p = Expr {
            num: self.num.pow(k.unsigned_abs()),
            den: self.den.pow(k.unsigned_abs()),
        };
        let p = if p.num.is_zero() { Expr::zero() } else { normalize(p.num, p.den)? };
        if k < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    pub fn diff(&self, c: Coord) -> Expr {
        let dn = self.num.diff(c);
        let dd = self.den.diff(c);
        if dd.is_zero() {
            if dn.is_zero() {
                return Expr::zero();
            }
            return normalize(dn, self.den.clone()).expect("denominator is non-zero");
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        normalize(num, &self.den * &self.den).expect("denominator is non-zero")
    }

    /// Simultaneous substitution. Fails if an image mentions a bound coordinate.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Expr, KernelError> {
        for img in bindings.values() {
            if let Some(c) = img.coords().into_iter().find(|c| bindings.contains_key(c)) {
                return Err(KernelError::CyclicBinding(c));
            }
        }
        self.substitute_unchecked(bindings)
    }

    pub(crate) fn substitute_unchecked(&self, bindings: &Bindings) -> Result<Expr, KernelError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let coords = self.coords();
        if !bindings.keys().any(|c| coords.contains(c)) {
            return Ok(self.clone());
        }
        let (n1, d1) = subst_poly(&self.num, bindings)?;
        let (n2, d2) = subst_poly(&self.den, bindings)?;
        if n2.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        normalize(&n1 * &d2, &d1 * &n2)
    }

    pub fn subs(&self, c: Coord, img: &Expr) -> Result<Expr, KernelError> {
        let mut b = Bindings::new();
        b.insert(c, img.clone());
        self.substitute_unchecked(&b)
    }

    pub fn eval(&self, point: &Point) -> Result<f64, KernelError> {
        self.eval_with_threshold(point, DEFAULT_EPS_DIV)
    }

    pub fn eval_with_threshold(&self, point: &Point, eps_div: f64) -> Result<f64, KernelError> {
        self.eval_by(&|c| point.get(&c).copied(), eps_div)
    }

    pub(crate) fn eval_by<F>(&self, value: &F, eps_div: f64) -> Result<f64, KernelError>
    where
        F: Fn(Coord) -> Option<f64>,
    {
        let lookup = |c: Coord| {
            value(c).or(if c == Coord::SQRT2 {
                Some(std::f64::consts::SQRT_2)
            } else {
                None
            })
        };
        let d = self.den.eval_with(&lookup).map_err(KernelError::Unbound)?;
        if d.abs() <= eps_div || !d.is_finite() {
            return Err(KernelError::NearZeroDenominator { value: d });
        }
        let n = self.num.eval_with(&lookup).map_err(KernelError::Unbound)?;
        Ok(n / d)
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
}

/// Interprets `arg` as `c * base` with `c` a parameter polynomial and returns
/// the exponential atom.
pub(crate) fn exp_of(arg: &Expr) -> Result<Poly, KernelError> {
    if arg.is_zero() {
        return Ok(Poly::one());
    }
    let bad = || KernelError::UnsupportedExp(arg.to_string());
    if !arg.is_polynomial() || arg.num.has_exps() {
        return Err(bad());
    }
    let mut base: Option<Coord> = None;
    let mut exponent = Poly::zero();
    for (m, q) in arg.num.terms() {
        let mut term_base = None;
        for &(c, k) in &m.pows {
            if c.kind() != CoordKind::Parameter {
                if term_base.is_some() || k != 1 {
                    return Err(bad());
                }
                term_base = Some(c);
            }
        }
        let tb = term_base.ok_or_else(bad)?;
        if *base.get_or_insert(tb) != tb {
            return Err(bad());
        }
        exponent.add_term(m.with_degree(tb, 0), q.clone());
    }
    Ok(Poly::exp_atom(base.expect("non-zero argument"), exponent))
}

fn subst_poly(p: &Poly, b: &Bindings) -> Result<(Poly, Poly), KernelError> {
    let mut maxpow: BTreeMap<Coord, u32> = BTreeMap::new();
    for (m, _) in p.terms() {
        for &(c, k) in &m.pows {
            if b.contains_key(&c) {
                let e = maxpow.entry(c).or_insert(0);
                *e = (*e).max(k);
            }
        }
    }
    let mut cache: HashMap<(Coord, u32, bool), Poly> = HashMap::new();
    let mut power = |c: Coord, k: u32, num: bool| -> Poly {
        cache
            .entry((c, k, num))
            .or_insert_with(|| {
                let img = &b[&c];
                if num { img.num.pow(k) } else { img.den.pow(k) }
            })
            .clone()
    };
    let mut den = Poly::one();
    for (&c, &k) in &maxpow {
        den = &den * &power(c, k, false);
    }
    let mut out = Poly::zero();
    for (m, q) in p.terms() {
        let mut kept = Monomial::one();
        let mut factor = Poly::one();
        for &(c, k) in &m.pows {
            if b.contains_key(&c) {
                factor = &factor * &power(c, k, true);
                let rest = maxpow[&c] - k;
                if rest > 0 {
                    factor = &factor * &power(c, rest, false);
                }
            } else {
                kept = kept.mul(&Monomial::var(c, k));
            }
        }
        for &c in maxpow.keys() {
            if m.degree_in(c) == 0 {
                factor = &factor * &power(c, maxpow[&c], false);
            }
        }
        for (base, e) in &m.exps {
            let touched = b.contains_key(base) || e.coords().iter().any(|c| b.contains_key(c));
            let atom = if touched {
                let ee = Expr::from_poly(e.clone()).substitute_unchecked(b)?;
                let bb = Expr::from_poly(Poly::var(*base)).substitute_unchecked(b)?;
                exp_of(&(&ee * &bb))?
            } else {
                Poly::exp_atom(*base, e.clone())
            };
            factor = &factor * &atom;
        }
        out = &out + &factor.mul_monomial(&kept, q);
    }
    Ok((out, den))
}

fn normalize(num: Poly, den: Poly) -> Result<Expr, KernelError> {
    if den.is_zero() {
        return Err(KernelError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(Expr::zero());
    }
    let (mut num, mut den) = (num, den);
    for c in [Coord::I, Coord::SQRT2] {
        if den.degree_in(c) > 0 {
            let conj = den.conjugate_in(c);
            num = &num * &conj;
            den = &den * &conj;
        }
    }
    if let Some(c) = den.as_constant() {
        return Ok(Expr {
            num: num.scale(&c.recip()),
            den: Poly::one(),
        });
    }
    let direct = !den.has_exps() && (!num.has_exps() || num.is_monomial() || den.is_monomial());
    if direct {
        let g = gcd(&num, &den);
        if !g.is_constant() {
            num = div_exact(&num, &g).expect("gcd divides numerator");
            den = div_exact(&den, &g).expect("gcd divides denominator");
        }
    } else {
        (num, den) = laurent_reduce(&num, &den);
    }
    if let Some(c) = den.as_constant() {
        return Ok(Expr {
            num: num.scale(&c.recip()),
            den: Poly::one(),
        });
    }
    let s = den.integer_normalizer();
    Ok(Expr {
        num: num.scale(&s),
        den: den.scale(&s),
    })
}

/// Exponential generators chosen for one reduction: each `(base, exponent)`
/// pair seen in the inputs becomes a signed power product of generators.
struct LaurentMap {
    gens: Vec<(Coord, Poly)>,
    table: BTreeMap<(Coord, Poly), Vec<(u16, i64)>>,
}

impl LaurentMap {
    fn build(polys: &[&Poly]) -> LaurentMap {
        let mut by_base: BTreeMap<Coord, BTreeSet<Poly>> = BTreeMap::new();
        for p in polys {
            for (m, _) in p.terms() {
                for (base, e) in &m.exps {
                    by_base.entry(*base).or_default().insert(e.clone());
                }
            }
        }
        let mut gens = Vec::new();
        let mut table = BTreeMap::new();
        for (base, exps) in by_base {
            let mut basis: Vec<Poly> = Vec::new();
            let mut rows: Vec<(Monomial, Poly, Vec<Q>)> = Vec::new();
            let mut coords: Vec<(Poly, Vec<Q>)> = Vec::new();
            for e in exps {
                let mut rem = e.clone();
                let mut co = vec![Q::zero(); basis.len()];
                for (piv, row, comb) in &rows {
                    if let Some(c) = rem.terms.get(piv) {
                        let f = c / &row.terms[piv];
                        rem = &rem - &row.scale(&f);
                        for (l, cl) in comb.iter().enumerate() {
                            co[l] += &f * cl;
                        }
                    }
                }
                if rem.is_zero() {
                    coords.push((e, co));
                } else {
                    let l = basis.len();
                    basis.push(e.clone());
                    let mut comb: Vec<Q> = co.iter().map(|c| -c).collect();
                    comb.push(Q::one());
                    for (_, _, cmb) in rows.iter_mut() {
                        cmb.push(Q::zero());
                    }
                    let piv = rem.leading().expect("non-zero").0.clone();
                    rows.push((piv, rem, comb));
                    let mut unit = vec![Q::zero(); l + 1];
                    unit[l] = Q::one();
                    coords.push((e, unit));
                }
            }
            let n = basis.len();
            let mut scale = vec![BigInt::one(); n];
            for (_, co) in &coords {
                for (l, c) in co.iter().enumerate() {
                    scale[l] = scale[l].lcm(c.denom());
                }
            }
            let first = gens.len() as u16;
            for (l, b) in basis.iter().enumerate() {
                gens.push((base, b.scale(&Q::new(BigInt::one(), scale[l].clone()))));
            }
            for (e, co) in coords {
                let powers = co
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(l, c)| {
                        let k = (c * Q::from_integer(scale[l].clone())).to_integer();
                        (first + l as u16, k.to_i64().expect("small exponent multiple"))
                    })
                    .collect();
                table.insert((base, e), powers);
            }
        }
        LaurentMap { gens, table }
    }

    /// Rewrites `p` over generator variables, shifted so every power is
    /// non-negative; returns the shift.
    fn to_laurent(&self, p: &Poly) -> (Poly, BTreeMap<u16, i64>) {
        let mut signed: Vec<(Monomial, BTreeMap<u16, i64>, Q)> = Vec::new();
        let mut mins: BTreeMap<u16, i64> = BTreeMap::new();
        for (m, q) in p.terms() {
            let mut pw: BTreeMap<u16, i64> = BTreeMap::new();
            for (base, e) in &m.exps {
                for &(id, k) in &self.table[&(*base, e.clone())] {
                    *pw.entry(id).or_insert(0) += k;
                }
            }
            signed.push((
                Monomial {
                    pows: m.pows.clone(),
                    exps: Vec::new(),
                },
                pw,
                q.clone(),
            ));
        }
        for id in 0..self.gens.len() as u16 {
            let lo = signed
                .iter()
                .map(|(_, pw, _)| pw.get(&id).copied().unwrap_or(0))
                .min()
                .unwrap_or(0);
            mins.insert(id, lo);
        }
        let mut out = Poly::zero();
        for (m, pw, q) in signed {
            let mut mono = m;
            for (&id, &lo) in &mins {
                let k = pw.get(&id).copied().unwrap_or(0) - lo;
                if k > 0 {
                    mono = mono.mul(&Monomial::var(Coord::Laurent(id), k as u32));
                }
            }
            out.add_term(mono, q);
        }
        (out, mins)
    }

    fn from_laurent(&self, p: &Poly, offset: &BTreeMap<u16, i64>) -> Poly {
        let mut out = Poly::zero();
        for (m, q) in p.terms() {
            let mut plain = Monomial::one();
            let mut term = Poly::one();
            for &(c, k) in &m.pows {
                match c {
                    Coord::Laurent(_) => {}
                    _ => plain = plain.mul(&Monomial::var(c, k)),
                }
            }
            for (id, (base, e)) in self.gens.iter().enumerate() {
                let id = id as u16;
                let k = m.degree_in(Coord::Laurent(id)) as i64 + offset.get(&id).copied().unwrap_or(0);
                if k != 0 {
                    term = &term * &Poly::exp_atom(*base, e.scale(&q_int(k)));
                }
            }
            out = &out + &term.mul_monomial(&plain, q);
        }
        out
    }
}

fn laurent_reduce(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let map = LaurentMap::build(&[num, den]);
    let (n, a) = map.to_laurent(num);
    let (d, b) = map.to_laurent(den);
    let g = gcd(&n, &d);
    let (n, d) = if g.is_constant() {
        (n, d)
    } else {
        (div_exact(&n, &g).expect("gcd divides"), div_exact(&d, &g).expect("gcd divides"))
    };
    let mut offset = BTreeMap::new();
    let mut d_shift = BTreeMap::new();
    for id in 0..map.gens.len() as u16 {
        let c = d.degree_low(Coord::Laurent(id)) as i64;
        d_shift.insert(id, -c);
        offset.insert(id, a[&id] - b[&id] - c);
    }
    let d = map.from_laurent(&d, &d_shift);
    let n = map.from_laurent(&n, &offset);
    (n, d)
}

impl Poly {
    fn degree_low(&self, c: Coord) -> u32 {
        self.terms().map(|(m, _)| m.degree_in(c)).min().unwrap_or(0)
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.den == rhs.den {
            if self.den.is_one_poly() {
                return Expr::from_poly(&self.num + &rhs.num);
            }
            return normalize(&self.num + &rhs.num, self.den.clone()).expect("non-zero denominator");
        }
        if rhs.den.is_one_poly() {
            return Expr {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        if self.den.is_one_poly() {
            return Expr {
                num: &rhs.num + &(&self.num * &rhs.den),
                den: rhs.den.clone(),
            };
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        normalize(num, &self.den * &rhs.den).expect("non-zero denominator")
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return Expr::from_poly(&self.num * &rhs.num);
        }
        normalize(&self.num * &rhs.num, &self.den * &rhs.den).expect("non-zero denominator")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Self {
        Expr::coord(c)
    }
}

fn needs_parens(p: &Poly) -> bool {
    if p.len() > 1 {
        return true;
    }
    match p.leading() {
        Some((m, q)) => !(q.is_one() && m.pows.len() + m.exps.len() <= 1 && m.total_degree() <= 1),
        None => false,
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens(&self.den) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;

    fn c(x: Coord) -> Expr {
        Expr::coord(x)
    }

    #[test]
    fn quotient_is_reduced() {
        let x = c(Coord::X);
        let t = c(Coord::T);
        let a = &(&x * &x) - &(&t * &t);
        let b = &x + &t;
        assert_eq!(a.checked_div(&b).unwrap(), &x - &t);
    }

    #[test]
    fn denominator_sign_is_fixed() {
        let x = c(Coord::X);
        let a = Expr::one().checked_div(&-&x).unwrap();
        let b = (-Expr::one()).checked_div(&x).unwrap();
        assert_eq!(a, b);
        assert!(a.denom().leading().unwrap().1.is_positive());
    }

    #[test]
    fn imaginary_denominator_is_rationalized() {
        let i = c(Coord::I);
        let r = Expr::one().checked_div(&i).unwrap();
        assert_eq!(r, -&i);
    }

    #[test]
    fn exponential_in_denominator_moves_up() {
        let eta = c(Coord::ETA);
        let e = Expr::exp_atom(Coord::X, &eta).unwrap();
        let r = Expr::one().checked_div(&e).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(&r * &e, Expr::one());
        let s = (&e + &Expr::one()).checked_div(&(&(&e * &e) - &Expr::one())).unwrap();
        assert_eq!(s, Expr::one().checked_div(&(&e - &Expr::one())).unwrap());
    }

    #[test]
    fn substitution_detects_cycles() {
        let mut b = Bindings::new();
        b.insert(Coord::X, c(Coord::T));
        b.insert(Coord::T, c(Coord::X));
        assert!(matches!(c(Coord::X).substitute(&b), Err(KernelError::CyclicBinding(_))));
    }

    #[test]
    fn substitution_to_zero_denominator_fails() {
        let g = &c(Coord::X) - &c(Coord::T);
        let e = Expr::one().checked_div(&g).unwrap();
        let mut b = Bindings::new();
        b.insert(Coord::X, c(Coord::T));
        assert_eq!(e.substitute(&b), Err(KernelError::DivisionByZero));
    }

    #[test]
    fn eval_reports_unbound_and_small_denominators() {
        let e = Expr::one().checked_div(&c(Coord::X)).unwrap();
        assert_eq!(e.eval(&Point::new()), Err(KernelError::Unbound(Coord::X)));
        let p: Point = [(Coord::X, 1e-14)].into_iter().collect();
        assert!(matches!(e.eval(&p), Err(KernelError::NearZeroDenominator { .. })));
    }
}
