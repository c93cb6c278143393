//! The cubic two-component Camassa-Holm system
//!
//! `m_t = 1/2 (m (uv - u1 v1))_x - 1/2 m (u v1 - u1 v)`,
//! `n_t = 1/2 (n (uv - u1 v1))_x + 1/2 n (u v1 - u1 v)`,
//! with `m = u - u2`, `n = v - v2`, treated with `m`, `n` as coordinates of
//! their own. Covers the spectral problem and its adjoint, the nonlocal
//! symmetry, its prolongation to a pseudo-potential, the finite symmetry and
//! the solution it generates from a constant seed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::jetcalc::{
    check_rule_compatibility, close_momentum, euler_operator, total_dt_mod_system, total_dx, total_dx_n, Delta,
    DerivationRules, JetError, PdeSystem,
};
use crate::kernel::{parse_with, Bindings, Coord, Expr, Field, KernelError, Momentum, ParseOptions};
use crate::laxzoo::Mat2;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Parses with `m`, `n` as first-class symbols.
pub fn expr(text: &str) -> Expr {
    let opts = ParseOptions {
        momentum: Momentum::Independent,
        delta: None,
    };
    parse_with(text, &opts).unwrap_or_else(|e| panic!("built-in expression `{text}`: {e}"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ch2System {
    pub system: PdeSystem,
    /// `m - (u - u2)` and `n - (v - v2)`.
    pub constraints: [Expr; 2],
}

impl Default for Ch2System {
    fn default() -> Self {
        Self::new()
    }
}

impl Ch2System {
    pub fn new() -> Self {
        let plain = DerivationRules::new(Momentum::Independent);
        let half = Expr::rational(1, 2);
        let flux = |mom: &str| total_dx(&expr(&format!("{mom}*(u*v - u1*v1)")), &plain).unwrap();
        let f = &(&half * &flux("m")) - &expr("1/2*m*(u*v1 - u1*v)");
        let g = &(&half * &flux("n")) + &expr("1/2*n*(u*v1 - u1*v)");
        let mut system = PdeSystem::new(f, g, Delta::Pseudospherical);
        system.orders = (2, 2);
        Ch2System {
            system,
            constraints: [expr("m - (u - u2)"), expr("n - (v - v2)")],
        }
    }
}

pub struct LinearProblem {
    pub x: Mat2,
    pub t: Mat2,
    /// x- and t-rules for `phi1, phi2` and the adjoint `phih1, phih2`.
    pub rules: DerivationRules,
}

fn spectral_x() -> Mat2 {
    [
        [expr("-1/2"), expr("1/2*eta*m")],
        [expr("-1/2*eta*n"), expr("1/2")],
    ]
}

fn spectral_t() -> Mat2 {
    let alpha = "(1/(2*eta^2) + 1/4*(u*v - u1*v1 + u*v1 - u1*v))";
    let beta = "(u*v - u1*v1)";
    [
        [expr(&format!("-{alpha}")), expr(&format!("1/4*eta*m*{beta} + (u - u1)/(2*eta)"))],
        [expr(&format!("-1/4*eta*n*{beta} - (v + v1)/(2*eta)")), expr(alpha)],
    ]
}

/// `psi_x = A psi` as rules, and `(psih1, psih2)_x = -(psih1, psih2) A`.
fn install(rules: DerivationRules, a: &Mat2, by_x: bool) -> DerivationRules {
    let [p1, p2, h1, h2] = [Coord::PHI1, Coord::PHI2, Coord::PHIHAT1, Coord::PHIHAT2].map(Expr::coord);
    let imgs = [
        (Coord::PHI1, &(&a[0][0] * &p1) + &(&a[0][1] * &p2)),
        (Coord::PHI2, &(&a[1][0] * &p1) + &(&a[1][1] * &p2)),
        (Coord::PHIHAT1, -&(&(&h1 * &a[0][0]) + &(&h2 * &a[1][0]))),
        (Coord::PHIHAT2, -&(&(&h1 * &a[0][1]) + &(&h2 * &a[1][1]))),
    ];
    imgs.into_iter().fold(rules, |r, (c, e)| if by_x { r.with_x(c, e) } else { r.with_t(c, e) })
}

pub fn linear_problem() -> LinearProblem {
    let (x, t) = (spectral_x(), spectral_t());
    let rules = install(install(DerivationRules::new(Momentum::Independent), &x, true), &t, false);
    LinearProblem { x, t, rules }
}

/// The spectral rules together with the pseudo-potential
/// `p_x = -1/2 eta^2 m phi2^2`,
/// `p_t = -phi1 phi2/eta + 1/2 (v + v1) phi1^2 - 1/4 eta^2 (uv - u1 v1) m phi2^2`.
pub fn full_rules() -> DerivationRules {
    linear_problem()
        .rules
        .with_x(Coord::P, expr("-1/2*eta^2*m*phi2^2"))
        .with_t(
            Coord::P,
            expr("-phi1*phi2/eta + 1/2*(v + v1)*phi1^2 - 1/4*eta^2*(u*v - u1*v1)*m*phi2^2"),
        )
}

/// `D_t D_x - D_x D_t` on each auxiliary symbol, modulo the system.
pub fn compatibility_residuals(ch: &Ch2System) -> Result<BTreeMap<Coord, Expr>, ChError> {
    Ok(check_rule_compatibility(&full_rules(), &ch.system)?)
}

/// `(phih1, phih2) = (phi2, -phi1)`, which solves the adjoint problem.
pub fn adjoint_reduction() -> Bindings {
    let mut b = Bindings::new();
    b.insert(Coord::PHIHAT1, Expr::coord(Coord::PHI2));
    b.insert(Coord::PHIHAT2, -&Expr::coord(Coord::PHI1));
    b
}

/// Gradient of the spectral parameter, up to a constant factor.
pub fn spectral_gradient() -> (Expr, Expr) {
    (expr("phih1*phi2"), expr("-phi1*phih2"))
}

/// The first Hamiltonian operator: `(a, b) -> ((D^2 - 1) b, (1 - D^2) a)`.
pub fn apply_d1(a: &Expr, b: &Expr, rules: &DerivationRules) -> Result<(Expr, Expr), ChError> {
    let first = &total_dx_n(b, 2, rules)? - b;
    let second = a - &total_dx_n(a, 2, rules)?;
    Ok((first, second))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryTuple {
    pub u: Expr,
    pub v: Expr,
    pub m: Expr,
    pub n: Expr,
}

impl SymmetryTuple {
    pub fn variation(&self) -> Variation {
        let mut v = Variation::new();
        v.insert(Coord::u(0), self.u.clone());
        v.insert(Coord::v(0), self.v.clone());
        v.insert(Coord::m(0), self.m.clone());
        v.insert(Coord::n(0), self.n.clone());
        v
    }

    /// `omega_m - (1 - D^2) omega_u` and the `n` analogue.
    pub fn momentum_mismatch(&self, rules: &DerivationRules) -> Result<(Expr, Expr), ChError> {
        let lower = |w: &Expr| -> Result<Expr, ChError> { Ok(w - &total_dx_n(w, 2, rules)?) };
        Ok((&self.m - &lower(&self.u)?, &self.n - &lower(&self.v)?))
    }
}

pub fn nonlocal_symmetry(reduced: bool) -> SymmetryTuple {
    if reduced {
        let tail = "1/2*eta^2*{}*(m*phi2^2 - n*phi1^2)";
        SymmetryTuple {
            u: expr("-phi1^2"),
            v: expr("phi2^2"),
            m: expr(&format!("eta*(m1 - m)*phi1*phi2 + {}", tail.replace("{}", "m"))),
            n: expr(&format!("eta*(n1 + n)*phi1*phi2 + {}", tail.replace("{}", "n"))),
        }
    } else {
        let tail = "1/2*eta^2*{}*(n*phi1*phih2 + m*phi2*phih1)";
        let mixed = "(phi1*phih1 - phi2*phih2)";
        SymmetryTuple {
            u: expr("phi1*phih2"),
            v: expr("phih1*phi2"),
            m: expr(&format!("1/2*eta*(m1 - m)*{mixed} + {}", tail.replace("{}", "m"))),
            n: expr(&format!("1/2*eta*(n1 + n)*{mixed} + {}", tail.replace("{}", "n"))),
        }
    }
}

/// Variations of base coordinates: `Jet(f, 0)` keys stand for every jet of
/// `f`, auxiliary keys for themselves.
pub type Variation = BTreeMap<Coord, Expr>;

/// The Frechet derivative of `e` in the direction `var`.
pub fn linearize(e: &Expr, var: &Variation, rules: &DerivationRules) -> Result<Expr, ChError> {
    let mut acc = Expr::zero();
    for c in e.coords() {
        let dir = match c {
            Coord::Jet(f, k) => match var.get(&Coord::Jet(f, 0)) {
                Some(w) => total_dx_n(w, k, rules)?,
                None => return Err(ChError::Domain(format!("no variation given for `{c}`"))),
            },
            Coord::Aux(_) => match var.get(&c) {
                Some(w) => w.clone(),
                None => continue,
            },
            _ => continue,
        };
        acc = &acc + &(&e.diff(c) * &dir);
    }
    Ok(close_momentum(&acc)?)
}

/// `D_t omega_m - F'[omega]` and `D_t omega_n - G'[omega]`.
pub fn check_symmetry_residual(
    s: &SymmetryTuple,
    ch: &Ch2System,
    rules: &DerivationRules,
) -> Result<(Expr, Expr), ChError> {
    let var = s.variation();
    let one = |w: &Expr, rhs: &Expr| -> Result<Expr, ChError> {
        let dt = total_dt_mod_system(w, &ch.system, rules)?;
        Ok(close_momentum(&(&dt - &linearize(rhs, &var, rules)?))?)
    };
    Ok((one(&s.m, &ch.system.f)?, one(&s.n, &ch.system.g)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation {
    pub omega1: Expr,
    pub omega2: Expr,
    pub omega_p: Expr,
}

impl Prolongation {
    pub fn variation(&self, s: &SymmetryTuple) -> Variation {
        let mut v = s.variation();
        v.insert(Coord::PHI1, self.omega1.clone());
        v.insert(Coord::PHI2, self.omega2.clone());
        v.insert(Coord::P, self.omega_p.clone());
        v
    }
}

/// Variations of `phi1`, `phi2`, `p` extending the reduced symmetry.
pub fn prolongation() -> Prolongation {
    let rules = full_rules();
    let rule = |c: Coord| rules.x_rules[&c].clone();
    let (phi1x, phi2x, px) = (rule(Coord::PHI1), rule(Coord::PHI2), rule(Coord::P));
    let eta_f1f2 = expr("eta*phi1*phi2");
    Prolongation {
        omega1: &expr("phi1*p + 1/2*eta*phi1^2*phi2") + &(&eta_f1f2 * &phi1x),
        omega2: &expr("phi2*p + 1/2*eta*phi1*phi2^2") + &(&eta_f1f2 * &phi2x),
        omega_p: &expr("p^2") + &(&eta_f1f2 * &px),
    }
}

/// `D_x w_a - (x-rule of a)'[w]` and the t analogue for `a = phi1, phi2, p`;
/// all six vanish exactly when the prolongation is a symmetry of the rules.
pub fn prolongation_residuals(
    pro: &Prolongation,
    s: &SymmetryTuple,
    ch: &Ch2System,
) -> Result<Vec<(String, Expr)>, ChError> {
    let rules = full_rules();
    let var = pro.variation(s);
    let mut out = Vec::new();
    for (name, c, w) in [
        ("phi1", Coord::PHI1, &pro.omega1),
        ("phi2", Coord::PHI2, &pro.omega2),
        ("p", Coord::P, &pro.omega_p),
    ] {
        let dx = &total_dx(w, &rules)? - &linearize(&rules.x_rules[&c], &var, &rules)?;
        out.push((format!("{name}.x"), close_momentum(&dx)?));
        let dt = &total_dt_mod_system(w, &ch.system, &rules)? - &linearize(&rules.t_rules[&c], &var, &rules)?;
        out.push((format!("{name}.t"), close_momentum(&dt)?));
    }
    Ok(out)
}

/// The infinitesimal generator of the finite symmetry, component by component,
/// over `(x, t, u, v, u1, v1, m, n, phi1, phi2, p)`.
pub fn vector_field() -> Vec<(&'static str, Expr)> {
    [
        ("x", "-eta*phi1*phi2"),
        ("t", "0"),
        ("u", "-(phi1^2 + eta*phi1*phi2*u1)"),
        ("v", "phi2^2 - eta*phi1*phi2*v1"),
        ("u1", "phi1^2 - eta*u*phi1*phi2"),
        ("v1", "phi2^2 - eta*v*phi1*phi2"),
        ("m", "-eta*m*phi1*phi2 + 1/2*eta^2*m*(m*phi2^2 - n*phi1^2)"),
        ("n", "eta*n*phi1*phi2 + 1/2*eta^2*n*(m*phi2^2 - n*phi1^2)"),
        ("phi1", "phi1*p + 1/2*eta*phi1^2*phi2"),
        ("phi2", "phi2*p + 1/2*eta*phi1*phi2^2"),
        ("p", "p^2"),
    ]
    .into_iter()
    .map(|(k, v)| (k, expr(v)))
    .collect()
}

const D1: &str = "(1 - eps*p)";
const D2: &str = "(1 - eps*p - eps*eta*phi1*phi2)";

/// The rational components of the finite symmetry. `x` and `phi_i` involve a
/// logarithm and a square root and are handled separately.
pub fn transform_rational_parts() -> Vec<(&'static str, Expr)> {
    let den = format!("({D2}*(2*{D1} - eps*eta^2*(m*phi2^2 - n*phi1^2)) + eps^2*eta^3*n*phi1^3*phi2)");
    [
        ("u", format!("(u + u1)*{D2}/(2*{D1}) - (u1 - u)*{D1}/(2*{D2}) - eps*phi1^2/{D2}")),
        ("v", format!("(v + v1)*{D2}/(2*{D1}) - (v1 - v)*{D1}/(2*{D2}) + eps*phi2^2/{D1}")),
        ("u1", format!("(u + u1)*{D2}/(2*{D1}) + (u1 - u)*{D1}/(2*{D2}) + eps*phi1^2/{D2}")),
        ("v1", format!("(v + v1)*{D2}/(2*{D1}) + (v1 - v)*{D1}/(2*{D2}) + eps*phi2^2/{D1}")),
        ("m", format!("2*m*{D2}^2/{den}")),
        ("n", format!("2*n*{D1}^2/{den}")),
        ("p", format!("p/{D1}")),
    ]
    .into_iter()
    .map(|(k, v)| (k, expr(&v)))
    .collect()
}

/// Coefficient of `eps` in the finite symmetry, per component.
pub fn transform_first_order() -> Result<Vec<(&'static str, Expr)>, ChError> {
    let at0 = |e: &Expr| e.subs(Coord::EPS, &Expr::zero());
    let (d1, d2) = (expr(D1), expr(D2));
    let mut out = Vec::new();
    // d/deps log(D2/D1) with D1 = D2 = 1 at eps = 0.
    out.push(("x", at0(&(&d2.diff(Coord::EPS) - &d1.diff(Coord::EPS)))?));
    out.push(("t", Expr::zero()));
    for (k, e) in transform_rational_parts() {
        out.push((k, at0(&e.diff(Coord::EPS))?));
    }
    // phi / sqrt(D1 D2): the derivative is -1/2 phi (D1 D2)'(0).
    let radicand_dot = at0(&(&d1 * &d2).diff(Coord::EPS))?;
    for (k, c) in [("phi1", Coord::PHI1), ("phi2", Coord::PHI2)] {
        out.push((k, &(&Expr::rational(-1, 2) * &Expr::coord(c)) * &radicand_dot));
    }
    Ok(out)
}

/// One condition per component: first order of the finite symmetry minus the
/// generator.
pub fn vector_field_first_order_check() -> Report {
    let mut r = Report::new("finite symmetry to first order");
    let v: BTreeMap<_, _> = vector_field().into_iter().collect();
    match transform_first_order() {
        Ok(parts) => {
            for (k, e) in parts {
                r.expect_zero(format!("d/deps {k}"), &(&e - &v[k]));
            }
        }
        Err(e) => r.push("d/deps", e.to_string(), false),
    }
    r
}

/// A point of the enlarged space `(x, t, u, v, u_x, v_x, m, n, phi1, phi2, p)`
/// with the spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnlargedState {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub ux: f64,
    pub vx: f64,
    pub m: f64,
    pub n: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub p: f64,
    pub eta: f64,
}

fn wave_number(u0: f64, eta: f64) -> Result<f64, ChError> {
    if eta == 0.0 {
        return Err(ChError::Domain("eta must be nonzero".into()));
    }
    if u0 == 0.0 {
        return Err(ChError::Domain("u0 must be nonzero".into()));
    }
    let k2 = 1.0 - eta * eta * u0;
    if !(k2 > 0.0) {
        return Err(ChError::Domain(format!("requires 1 - eta^2 u0 > 0, got {k2}")));
    }
    Ok(k2.sqrt())
}

impl EnlargedState {
    /// The constant solution `u = m = u0`, `v = n = 1` with its eigenfunctions
    /// and pseudo-potential at `(x, t)`.
    pub fn seed(u0: f64, eta: f64, x: f64, t: f64) -> Result<Self, ChError> {
        let k = wave_number(u0, eta)?;
        let z = x + (3.0 - k * k) * t / (2.0 * eta * eta);
        let e = (k * z / 2.0).exp();
        Ok(EnlargedState {
            x,
            t,
            u: u0,
            v: 1.0,
            ux: 0.0,
            vx: 0.0,
            m: u0,
            n: 1.0,
            phi1: e,
            phi2: (1.0 + k) / (eta * u0) * e,
            p: -(1.0 + k).powi(2) / (2.0 * k * u0) * e * e,
            eta,
        })
    }

    pub fn to_array(&self) -> [f64; 11] {
        [
            self.x, self.t, self.u, self.v, self.ux, self.vx, self.m, self.n, self.phi1, self.phi2, self.p,
        ]
    }

    pub fn from_array(a: [f64; 11], eta: f64) -> Self {
        let [x, t, u, v, ux, vx, m, n, phi1, phi2, p] = a;
        EnlargedState {
            x,
            t,
            u,
            v,
            ux,
            vx,
            m,
            n,
            phi1,
            phi2,
            p,
            eta,
        }
    }

    /// The generator evaluated here, in `to_array` order.
    pub fn generator(&self) -> [f64; 11] {
        let s = self;
        let q = s.eta * s.phi1 * s.phi2;
        let spread = 0.5 * s.eta * s.eta * (s.m * s.phi2 * s.phi2 - s.n * s.phi1 * s.phi1);
        [
            -q,
            0.0,
            -(s.phi1 * s.phi1 + q * s.ux),
            s.phi2 * s.phi2 - q * s.vx,
            s.phi1 * s.phi1 - q * s.u,
            s.phi2 * s.phi2 - q * s.v,
            -q * s.m + s.m * spread,
            q * s.n + s.n * spread,
            s.phi1 * s.p + 0.5 * q * s.phi1,
            s.phi2 * s.p + 0.5 * q * s.phi2,
            s.p * s.p,
        ]
    }
}

/// Smallest admissible size of a denominator.
pub const EPS_DIV: f64 = 1e-12;

pub fn finite_transform(s: &EnlargedState, eps: f64) -> Result<EnlargedState, ChError> {
    let d1 = 1.0 - eps * s.p;
    let d2 = d1 - eps * s.eta * s.phi1 * s.phi2;
    if d1.abs() <= EPS_DIV {
        return Err(ChError::Domain(format!("denominator 1 - eps*p = {d1} vanishes")));
    }
    if d2.abs() <= EPS_DIV {
        return Err(ChError::Domain(format!(
            "denominator 1 - eps*p - eps*eta*phi1*phi2 = {d2} vanishes"
        )));
    }
    let ratio = d2 / d1;
    if ratio <= 0.0 {
        return Err(ChError::Domain(format!(
            "logarithm argument (1 - eps*p - eps*eta*phi1*phi2)/(1 - eps*p) = {ratio} is not positive"
        )));
    }
    let eta = s.eta;
    let den = d2 * (2.0 * d1 - eps * eta * eta * (s.m * s.phi2 * s.phi2 - s.n * s.phi1 * s.phi1))
        + eps * eps * eta.powi(3) * s.n * s.phi1.powi(3) * s.phi2;
    if den.abs() <= EPS_DIV {
        return Err(ChError::Domain(format!("momentum denominator = {den} vanishes")));
    }
    let root = (d1 * d2).sqrt();
    let even = |a: f64, b: f64| (a + b) * d2 / (2.0 * d1);
    let odd = |a: f64, b: f64| (b - a) * d1 / (2.0 * d2);
    Ok(EnlargedState {
        x: s.x + ratio.ln(),
        t: s.t,
        u: even(s.u, s.ux) - odd(s.u, s.ux) - eps * s.phi1 * s.phi1 / d2,
        v: even(s.v, s.vx) - odd(s.v, s.vx) + eps * s.phi2 * s.phi2 / d1,
        ux: even(s.u, s.ux) + odd(s.u, s.ux) + eps * s.phi1 * s.phi1 / d2,
        vx: even(s.v, s.vx) + odd(s.v, s.vx) + eps * s.phi2 * s.phi2 / d1,
        m: 2.0 * s.m * d2 * d2 / den,
        n: 2.0 * s.n * d1 * d1 / den,
        phi1: s.phi1 / root,
        phi2: s.phi2 / root,
        p: s.p / d1,
        eta,
    })
}

/// The solution obtained by applying the finite symmetry to the constant seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactSolution {
    pub u0: f64,
    pub eta: f64,
    pub eps: f64,
    pub k: f64,
    /// Phase shift `ln sqrt(|eps| (1 - k^2) / (2 k u0))`.
    pub shift: f64,
}

/// Field values at one `(x, t)`; the fields solve the system in `(x_tilde, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionPoint {
    pub x_tilde: f64,
    pub u: f64,
    pub v: f64,
    pub m: f64,
    pub n: f64,
}

pub fn exact_solution(u0: f64, eta: f64, eps: f64) -> Result<ExactSolution, ChError> {
    let k = wave_number(u0, eta)?;
    if eps == 0.0 {
        return Err(ChError::Domain("eps = 0 gives back the seed".into()));
    }
    let arg = eps.abs() * (1.0 - k * k) / (2.0 * k * u0);
    if !(arg > 0.0) {
        return Err(ChError::Domain(format!("phase logarithm argument {arg} is not positive")));
    }
    Ok(ExactSolution {
        u0,
        eta,
        eps,
        k,
        shift: arg.sqrt().ln(),
    })
}

impl ExactSolution {
    pub fn z(&self, x: f64, t: f64) -> f64 {
        x + (3.0 - self.k * self.k) * t / (2.0 * self.eta * self.eta)
    }

    /// `tanh` for `eps > 0`, `coth` for `eps < 0`.
    pub fn theta(&self, x: f64, t: f64) -> f64 {
        let s = (self.k / 2.0 * self.z(x, t) + self.shift).tanh();
        if self.eps > 0.0 {
            s
        } else {
            1.0 / s
        }
    }

    pub fn at(&self, x: f64, t: f64) -> Result<SolutionPoint, ChError> {
        let (k, u0) = (self.k, self.u0);
        let th = self.theta(x, t);
        let a = 1.0 + k * th;
        if a.abs() <= EPS_DIV || (1.0 - k).abs() <= EPS_DIV {
            return Err(ChError::Domain(format!("logarithm of zero in x_tilde at theta = {th}")));
        }
        let c = 1.0 - k * k + a * a;
        Ok(SolutionPoint {
            x_tilde: x + (1.0 - k).abs().ln() - a.abs().ln(),
            u: (2.0 - k * k * (1.0 + th * th)) * u0 / (2.0 * (1.0 + k) * a),
            v: (1.0 + k * (k + 2.0 * th) + a * a) / (2.0 * (1.0 - k) * a),
            m: 2.0 * u0 * (1.0 - k) / c,
            n: 2.0 * a * a / ((1.0 - k) * c),
        })
    }
}

/// `(u, v, m, n)` of the solution in terms of `theta`, `kk` (for `k`) and `u0`.
pub fn solution_exprs() -> [Expr; 4] {
    [
        "(2 - kk^2*(1 + theta^2))*u0/(2*(1 + kk)*(1 + kk*theta))",
        "(1 + kk*(kk + 2*theta) + (1 + kk*theta)^2)/(2*(1 - kk)*(1 + kk*theta))",
        "2*u0*(1 - kk)/(1 - kk^2 + (1 + kk*theta)^2)",
        "2*(1 + kk*theta)^2/((1 - kk)*(1 - kk^2 + (1 + kk*theta)^2))",
    ]
    .map(expr)
}

/// Density `1/4 (u^2 v1 + u1^2 v1 - 2 u u1 v) n` in `u`, `v` jets.
pub fn hamiltonian_density() -> Expr {
    crate::kernel::parse("1/4*(u^2*v1 + u1^2*v1 - 2*u*u1*v)*(v - v2)").unwrap()
}

/// `m_t + E_v(h)` and `n_t - E_u(h)` in `u`, `v` jets. Since
/// `m = (1 - D^2) u` with a self-adjoint factor, `E_u = (1 - D^2) dH/dm`, so
/// these are the two components of `m_t - D1 grad H`.
pub fn check_bihamiltonian_d1() -> Result<(Expr, Expr), ChError> {
    let rules = DerivationRules::default();
    let parse = |s: &str| crate::kernel::parse(s).unwrap();
    let half = Expr::rational(1, 2);
    let mt = &(&half * &total_dx(&parse("(u - u2)*(u*v - u1*v1)"), &rules)?)
        - &parse("1/2*(u - u2)*(u*v1 - u1*v)");
    let nt = &(&half * &total_dx(&parse("(v - v2)*(u*v - u1*v1)"), &rules)?)
        + &parse("1/2*(v - v2)*(u*v1 - u1*v)");
    let h = hamiltonian_density();
    let ev = euler_operator(&h, Field::V)?;
    let eu = euler_operator(&h, Field::U)?;
    Ok((&mt + &ev, &nt - &eu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules() -> DerivationRules {
        full_rules()
    }

    #[test]
    fn system_matches_expanded_form() {
        let ch = Ch2System::new();
        // Oracle: hand expansion with u2 = u - m, v2 = v - n.
        let f = expr(
            "1/2*m1*(u*v - u1*v1) + 1/2*m*(u1*v + u*v1 - (u - m)*v1 - u1*(v - n)) - 1/2*m*(u*v1 - u1*v)",
        );
        assert_eq!(ch.system.f, f);
        assert!(ch.system.g.depends_on(Coord::n(1)));
    }

    #[test]
    fn spectral_matrix_entry() {
        let lp = linear_problem();
        assert_eq!(lp.x[0][1], expr("1/2*eta*m"));
        assert!(crate::laxzoo::trace(&lp.t).is_zero());
    }

    #[test]
    fn all_rules_are_compatible() {
        let res = compatibility_residuals(&Ch2System::new()).unwrap();
        assert_eq!(res.len(), 5);
        for (c, r) in res {
            assert!(r.is_zero(), "{c}: {r}");
        }
    }

    #[test]
    fn reduced_adjoint_solves_the_spectral_problem() {
        let r = linear_problem().rules;
        let b = adjoint_reduction();
        for (hat, img) in &b {
            for table in [&r.x_rules, &r.t_rules] {
                let lhs = table[hat].substitute(&b).unwrap();
                let phi = if *hat == Coord::PHIHAT1 { Coord::PHI2 } else { Coord::PHI1 };
                let sign = if img.coords().contains(&Coord::PHI1) { -1 } else { 1 };
                assert_eq!(lhs, &Expr::int(sign) * &table[&phi]);
            }
        }
    }

    #[test]
    fn d1_of_gradient_is_the_momentum_symmetry() {
        let (a, b) = spectral_gradient();
        let (om, on) = apply_d1(&a, &b, &rules()).unwrap();
        let s = nonlocal_symmetry(false);
        assert_eq!(om, s.m);
        assert_eq!(on, s.n);
        let (ru, rv) = (a.substitute(&adjoint_reduction()).unwrap(), b.substitute(&adjoint_reduction()).unwrap());
        assert_eq!((ru, rv), (expr("phi2^2"), expr("phi1^2")));
    }

    #[test]
    fn reduced_tuple_is_the_reduction_of_the_full_one() {
        let full = nonlocal_symmetry(false);
        let red = nonlocal_symmetry(true);
        let b = adjoint_reduction();
        assert_eq!(full.m.substitute(&b).unwrap(), red.m);
        assert_eq!(full.n.substitute(&b).unwrap(), red.n);
        assert_eq!(full.u.substitute(&b).unwrap(), red.u);
        assert_eq!(red.u, expr("-phi1^2"));
    }

    #[test]
    fn momentum_components_follow_from_u_components() {
        for reduced in [true, false] {
            let (a, b) = nonlocal_symmetry(reduced).momentum_mismatch(&rules()).unwrap();
            assert!(a.is_zero() && b.is_zero(), "{a} / {b}");
        }
    }

    #[test]
    fn symmetry_residuals_vanish() {
        let ch = Ch2System::new();
        for reduced in [true, false] {
            let (a, b) = check_symmetry_residual(&nonlocal_symmetry(reduced), &ch, &rules()).unwrap();
            assert!(a.is_zero() && b.is_zero(), "{a} / {b}");
        }
        let mut s = nonlocal_symmetry(true);
        s.m = &s.m + &expr("m");
        let (a, _) = check_symmetry_residual(&s, &ch, &rules()).unwrap();
        assert!(!a.is_zero());
        // Oracle: D_t m - F'[m in the m slot] computed by hand.
        let ch_rules = rules();
        let mut var = Variation::new();
        for c in [Coord::u(0), Coord::v(0), Coord::n(0)] {
            var.insert(c, Expr::zero());
        }
        var.insert(Coord::m(0), expr("m"));
        let dt = total_dt_mod_system(&expr("m"), &ch.system, &ch_rules).unwrap();
        let want = &dt - &linearize(&ch.system.f, &var, &ch_rules).unwrap();
        assert_eq!(a, want);
    }

    #[test]
    fn prolongation_closes() {
        let pro = prolongation();
        assert_eq!(pro.omega_p, expr("p^2 - 1/2*eta^3*m*phi1*phi2^3"));
        let ch = Ch2System::new();
        let s = nonlocal_symmetry(true);
        for (name, r) in prolongation_residuals(&pro, &s, &ch).unwrap() {
            assert!(r.is_zero(), "{name}: {r}");
        }
        let mut broken = pro.clone();
        broken.omega1 = &broken.omega1 - &expr("phi1*p");
        let res = prolongation_residuals(&broken, &s, &ch).unwrap();
        assert!(!res[0].1.is_zero());
    }

    #[test]
    fn first_order_matches_generator() {
        let r = vector_field_first_order_check();
        assert!(r.passed(), "{}", r.to_table());
        assert_eq!(r.conditions.len(), 11);
        let parts: BTreeMap<_, _> = transform_first_order().unwrap().into_iter().collect();
        assert_eq!(parts["x"], expr("-eta*phi1*phi2"));
        assert_eq!(parts["p"], expr("p^2"));
        assert_eq!(parts["phi1"], expr("phi1*p + 1/2*eta*phi1^2*phi2"));
    }

    #[test]
    fn transform_at_zero_is_identity() {
        let s = EnlargedState::seed(0.75, 1.0, 0.3, -0.2).unwrap();
        let out = finite_transform(&s, 0.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn seed_values_and_domain_errors() {
        let s = EnlargedState::seed(0.75, 1.0, 0.0, 0.0).unwrap();
        assert_eq!((s.phi1, s.phi2, s.p), (1.0, 2.0, -3.0));
        let out = finite_transform(&s, 1.0).unwrap();
        assert!(out.m * out.n > 0.0);
        // 1 - eps p = 0 at eps = -1/3.
        let err = finite_transform(&s, -1.0 / 3.0).unwrap_err();
        assert!(err.to_string().contains("1 - eps*p "), "{err}");
        assert!(EnlargedState::seed(2.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn transformed_seed_matches_closed_form() {
        let sol = exact_solution(0.75, 1.0, 1.0).unwrap();
        assert_eq!(sol.k, 0.5);
        assert_eq!(sol.z(1.0, 8.0), 12.0);
        for (x, t) in [(0.0, 0.0), (1.3, 0.4), (-2.0, 0.7)] {
            let s = finite_transform(&EnlargedState::seed(0.75, 1.0, x, t).unwrap(), 1.0).unwrap();
            let p = sol.at(x, t).unwrap();
            for (a, b) in [(s.x, p.x_tilde), (s.u, p.u), (s.v, p.v), (s.m, p.m), (s.n, p.n)] {
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn exact_solution_rejects_bad_parameters() {
        assert!(exact_solution(2.0, 1.0, 1.0).is_err());
        assert!(exact_solution(0.75, 1.0, 0.0).is_err());
        assert!(exact_solution(0.75, 0.0, 1.0).is_err());
        let neg = exact_solution(0.75, 1.0, -1.0).unwrap();
        assert!(neg.theta(0.3, 0.0).abs() > 1.0);
    }

    #[test]
    fn closed_form_limits() {
        let [u, _, m, n] = solution_exprs();
        for s in [1, -1] {
            let lim = u.subs(Coord::THETA, &Expr::int(s)).unwrap();
            let want = expr(&format!("(2 - 2*kk^2)*u0/(2*(1 + kk)*(1 + {s}*kk))"));
            assert_eq!(lim, want);
            for e in [&m, &n] {
                let v = e.subs(Coord::THETA, &Expr::int(s)).unwrap();
                assert!(!v.denom().is_zero());
            }
        }
    }

    #[test]
    fn bihamiltonian_residuals_vanish() {
        let (a, b) = check_bihamiltonian_d1().unwrap();
        assert!(a.is_zero(), "{a}");
        assert!(b.is_zero(), "{b}");
        assert_eq!(euler_operator(&expr("u1^2"), Field::U).unwrap(), expr("-2*u2"));
        let (p, q) = apply_d1(&expr("u"), &expr("v"), &DerivationRules::default()).unwrap();
        assert_eq!((p, q), (expr("v2 - v"), expr("u - u2")));
    }
}
