//! Constructors for systems with prescribed associated forms, and the
//! catalog of known examples.
//!
//! Builders validate every hypothesis before producing output. The system is
//! always obtained by solving the two structure equations that contain `F`
//! and `G`; the closed third-order formulas are kept as an independent
//! cross-check.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::forms::{AssociatedForms, EtaSlot};
use crate::jetcalc::{total_dx, total_dx_n, Delta, DerivationRules, JetError, PdeSystem};
use crate::kernel::{parse, Coord, Expr, Field, KernelError};
use crate::laxzoo::{from_forms, MatrixForm, Packing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("hypothesis `{condition}` fails: {residual}")]
    Hypothesis { condition: String, residual: String },
    #[error("M must be non-constant")]
    ConstantM,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn violated(condition: &str, residual: impl ToString) -> ClassifyError {
    ClassifyError::Hypothesis {
        condition: condition.into(),
        residual: residual.to_string(),
    }
}

/// Free data of the second-kind theorems: `f11 = g`, `f12 = L`, and either
/// `f21 = eta, f31 = h` or `f21 = h, f31 = eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm34Input {
    pub g: Expr,
    pub h: Expr,
    pub l: Expr,
    pub m: Expr,
    pub eta: Expr,
    pub delta: Delta,
    pub orders: (u8, u8),
}

/// Free data of the third-order theorems.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm36Input {
    pub g: Expr,
    pub h: Expr,
    pub a: Expr,
    pub l1: Expr,
    pub n1: Expr,
    pub m: Expr,
    pub eta: Expr,
    pub delta: Delta,
}

fn u(k: u8) -> Coord {
    Coord::u(k)
}

fn v(k: u8) -> Coord {
    Coord::v(k)
}

fn max_jet(e: &Expr, field: Field) -> Option<u8> {
    e.coords()
        .into_iter()
        .filter_map(|c| match c {
            Coord::Jet(f, k) if f == field => Some(k),
            _ => None,
        })
        .max()
}

fn is_constant(e: &Expr) -> bool {
    e.coords().iter().all(|c| c.is_param())
}

fn wronskian(g: &Expr, h: &Expr) -> Expr {
    &(&g.diff(u(0)) * &h.diff(v(0))) - &(&g.diff(v(0)) * &h.diff(u(0)))
}

/// `g`, `h` may depend on x, t, parameters and `u - u2`, `v - v2` only.
fn check_factored(name: &str, e: &Expr) -> Result<(), ClassifyError> {
    for c in e.coords() {
        let ok = match c {
            Coord::Jet(Field::U | Field::V, k) => k == 0 || k == 2,
            Coord::Jet(..) => false,
            _ => c == Coord::X || c == Coord::T || c.is_param(),
        };
        if !ok {
            return Err(violated(&format!("{name} depends on x, t, u - u2, v - v2 only"), c));
        }
    }
    for f in [Field::U, Field::V] {
        let r = &e.diff(Coord::Jet(f, 0)) + &e.diff(Coord::Jet(f, 2));
        if !r.is_zero() {
            return Err(violated(&format!("{name} depends on {f} through {f} - {f}2"), r));
        }
    }
    Ok(())
}

fn check_order(name: &str, e: &Expr, bound: (i16, i16)) -> Result<(), ClassifyError> {
    for (field, b) in [(Field::U, bound.0), (Field::V, bound.1)] {
        if let Some(k) = max_jet(e, field) {
            if k as i16 > b {
                return Err(violated(
                    &format!("{name} has {field}-order at most {b}"),
                    Coord::Jet(field, k),
                ));
            }
        }
    }
    Ok(())
}

/// `(F, G)` from `g_u F + g_v G = r1`, `h_u F + h_v G = r2`.
fn solve_fg(g: &Expr, h: &Expr, r1: &Expr, r2: &Expr) -> Result<(Expr, Expr), ClassifyError> {
    let w = wronskian(g, h);
    let f = (&(&h.diff(v(0)) * r1) - &(&g.diff(v(0)) * r2)).checked_div(&w)?;
    let gg = (&(&g.diff(u(0)) * r2) - &(&h.diff(u(0)) * r1)).checked_div(&w)?;
    Ok((f, gg))
}

fn common_checks(input: &Thm34Input) -> Result<(), ClassifyError> {
    let (m, n) = input.orders;
    if !is_constant(&input.eta) {
        return Err(violated("eta is constant", &input.eta));
    }
    check_factored("g", &input.g)?;
    check_factored("h", &input.h)?;
    let w = wronskian(&input.g, &input.h);
    if w.is_zero() {
        return Err(violated("W = g_u h_v - g_v h_u is not identically zero", w));
    }
    check_order("L", &input.l, (m as i16 - 1, n as i16 - 1))?;
    check_order("M", &input.m, (m as i16 - 2, n as i16 - 2))?;
    Ok(())
}

/// `(L_{u_{m-1}}^2 + N_{u_{m-1}}^2)(L_{v_{n-1}}^2 + N_{v_{n-1}}^2)`.
fn generic_condition(l: &Expr, nn: &Expr, (m, n): (u8, u8)) -> Expr {
    let sq = |c: Coord| &(&l.diff(c) * &l.diff(c)) + &(&nn.diff(c) * &nn.diff(c));
    &sq(u(m - 1)) * &sq(v(n - 1))
}

fn system(f: Expr, g: Expr, delta: Delta, orders: (u8, u8)) -> PdeSystem {
    let mut sys = PdeSystem::new(f, g, delta);
    sys.orders = orders;
    sys
}

/// `f21 = eta`: `N = (D_x M + h L)/g`.
pub fn build_theorem34(input: &Thm34Input) -> Result<(PdeSystem, AssociatedForms), ClassifyError> {
    common_checks(input)?;
    let rules = DerivationRules::default();
    let Thm34Input { g, h, l, m, eta, delta, orders } = input;
    let gm = &(g * m) - &(eta * l);
    if gm.is_zero() {
        return Err(violated("gM - eta L is not identically zero", gm));
    }
    let nn = (&total_dx(m, &rules)? + &(h * l)).checked_div(g)?;
    let generic = generic_condition(l, &nn, *orders);
    if generic.is_zero() {
        return Err(violated("generic top-order condition on L, N", generic));
    }
    let d = delta.expr();
    let r1 = &(&(&total_dx(l, &rules)? - &g.diff(Coord::T)) - &(h * m)) + &(eta * &nn);
    let r2 = &(&total_dx(&nn, &rules)? - &h.diff(Coord::T)) + &(&d * &(&(eta * l) - &(g * m)));
    let (f, gg) = solve_fg(g, h, &r1, &r2)?;
    let forms = AssociatedForms::new(
        [[g.clone(), l.clone()], [eta.clone(), m.clone()], [h.clone(), nn]],
        *delta,
    )
    .with_eta_role(EtaSlot::Omega2);
    Ok((system(f, gg, *delta, *orders), forms))
}

/// `f31 = eta` with non-constant `M`: `N = (delta D_x M + h L)/g`.
pub fn build_theorem35(input: &Thm34Input) -> Result<(PdeSystem, AssociatedForms), ClassifyError> {
    if is_constant(&input.m) {
        return Err(ClassifyError::ConstantM);
    }
    common_checks(input)?;
    let rules = DerivationRules::default();
    let Thm34Input { g, h, l, m, eta, delta, orders } = input;
    let d = delta.expr();
    let nn = (&(&d * &total_dx(m, &rules)?) + &(h * l)).checked_div(g)?;
    let generic = generic_condition(l, &nn, *orders);
    if generic.is_zero() {
        return Err(violated("generic top-order condition on L, N", generic));
    }
    let r1 = &(&(&total_dx(l, &rules)? - &g.diff(Coord::T)) - &(eta * &nn)) + &(h * m);
    let r2 = &(&(&total_dx(&nn, &rules)? - &h.diff(Coord::T)) - &(g * m)) + &(eta * l);
    let (f, gg) = solve_fg(g, h, &r1, &r2)?;
    let forms = AssociatedForms::new(
        [[g.clone(), l.clone()], [h.clone(), nn], [eta.clone(), m.clone()]],
        *delta,
    )
    .with_eta_role(EtaSlot::Omega3);
    Ok((system(f, gg, *delta, *orders), forms))
}

fn packing(delta: Delta) -> Packing {
    match delta {
        Delta::Spherical => Packing::Su2,
        _ => Packing::Sl2,
    }
}

fn third_order_checks(input: &Thm36Input, closure_delta: &Expr) -> Result<(Expr, Expr), ClassifyError> {
    let Thm36Input { g, h, a, l1, n1, m, eta, .. } = input;
    if !is_constant(eta) {
        return Err(violated("eta is constant", eta));
    }
    for (name, e) in [("g", g), ("h", h)] {
        check_factored(name, e)?;
        if e.depends_on(Coord::T) {
            return Err(violated(&format!("{name} is free of t"), e));
        }
    }
    for (name, e) in [("A", a), ("L1", l1), ("N1", n1), ("M", m)] {
        for c in e.coords() {
            let ok = match c {
                Coord::Jet(Field::U | Field::V, k) => k <= 1,
                Coord::Jet(..) => false,
                _ => c == Coord::X || c.is_param(),
            };
            if !ok {
                return Err(violated(&format!("{name} depends on x, u, u1, v, v1 only"), c));
            }
        }
    }
    let k = &(g * n1) - &(h * l1);
    let mixed = &k.diff(u(2)).diff(v(1)) - &k.diff(u(1)).diff(v(2));
    if !mixed.is_zero() {
        return Err(violated("(g N1 - h L1)_{u2 v1} = (g N1 - h L1)_{u1 v2}", mixed));
    }
    let rules = DerivationRules::default();
    let closure = &(&(closure_delta * &total_dx(m, &rules)?) + &(h * l1)) - &(g * n1);
    if !closure.is_zero() {
        return Err(violated("D_x M + h L1 - g N1 = 0", closure));
    }
    let l = &(-&(a * g)) + l1;
    let nn = &(-&(a * h)) + n1;
    Ok((l, nn))
}

/// Third-order system with `f21 = eta`.
pub fn build_theorem36(
    input: &Thm36Input,
) -> Result<(PdeSystem, AssociatedForms, MatrixForm), ClassifyError> {
    let (l, _) = third_order_checks(input, &Expr::one())?;
    let (sys, forms) = build_theorem34(&Thm34Input {
        g: input.g.clone(),
        h: input.h.clone(),
        l,
        m: input.m.clone(),
        eta: input.eta.clone(),
        delta: input.delta,
        orders: (3, 3),
    })?;
    let lax = from_forms(&forms, packing(input.delta));
    Ok((sys, forms, lax))
}

/// Third-order system with `f31 = eta` and non-constant `M`.
pub fn build_theorem37(
    input: &Thm36Input,
) -> Result<(PdeSystem, AssociatedForms, MatrixForm), ClassifyError> {
    if is_constant(&input.m) {
        return Err(ClassifyError::ConstantM);
    }
    let (l, _) = third_order_checks(input, &input.delta.expr())?;
    let (sys, forms) = build_theorem35(&Thm34Input {
        g: input.g.clone(),
        h: input.h.clone(),
        l,
        m: input.m.clone(),
        eta: input.eta.clone(),
        delta: input.delta,
        orders: (3, 3),
    })?;
    let lax = from_forms(&forms, packing(input.delta));
    Ok((sys, forms, lax))
}

/// The closed third-order right-hand sides, written out term by term.
/// Only valid for inputs without explicit x-dependence.
pub fn third_order_closed_form(input: &Thm36Input, slot: EtaSlot) -> Result<(Expr, Expr), ClassifyError> {
    let rules = DerivationRules::default();
    let Thm36Input { g, h, a, l1, n1, m, eta, delta } = input;
    let d = delta.expr();
    let (gu, gv, hu, hv) = (g.diff(u(0)), g.diff(v(0)), h.diff(u(0)), h.diff(v(0)));
    let w = wronskian(g, h);
    let dxa = total_dx(a, &rules)?;
    let dxl1 = total_dx(l1, &rules)?;
    let dxn1 = total_dx(n1, &rules)?;
    let half_w = &w * &Expr::int(2);
    let ea_m = &(eta * a) + m;
    let lead = |k: Coord, k1: Coord| &(a * &Expr::coord(k)) - &(a * &Expr::coord(k1));
    let mut f = &lead(u(3), u(1)) - &(&dxa * &(&(g * &hv) - &(h * &gv))).checked_div(&w)?;
    let mut gg = &lead(v(3), v(1)) - &(&dxa * &(&(h * &gu) - &(g * &hu))).checked_div(&w)?;
    f = &f + &(&(&hv * &dxl1) - &(&gv * &dxn1)).checked_div(&w)?;
    gg = &gg + &(&(&gu * &dxn1) - &(&hu * &dxl1)).checked_div(&w)?;
    let h2 = h * h;
    let g2 = g * g;
    match slot {
        EtaSlot::Omega2 => {
            let s = &h2 - &(&d * &g2);
            f = &f - &(&ea_m * &s.diff(v(0))).checked_div(&half_w)?;
            gg = &gg + &(&ea_m * &s.diff(u(0))).checked_div(&half_w)?;
            let k = &(&d * &(g * l1)) - &(h * n1);
            f = &f + &(eta * &k.diff(v(2))).checked_div(&w)?;
            gg = &gg - &(eta * &k.diff(u(2))).checked_div(&w)?;
        }
        _ => {
            let s = &h2 + &g2;
            f = &f + &(&ea_m * &s.diff(v(0))).checked_div(&half_w)?;
            gg = &gg - &(&ea_m * &s.diff(u(0))).checked_div(&half_w)?;
            let k = &(h * n1) + &(g * l1);
            f = &f + &(eta * &k.diff(v(2))).checked_div(&w)?;
            gg = &gg - &(eta * &k.diff(u(2))).checked_div(&w)?;
        }
    }
    Ok((f, gg))
}

/// `F` and `G` are linear in the top jets `u_m`, `v_n`.
pub fn check_corollary33(sys: &PdeSystem) -> bool {
    let (um, vn) = (u(sys.orders.0), v(sys.orders.1));
    [&sys.f, &sys.g].iter().all(|e| {
        let du = e.diff(um);
        let dv = e.diff(vn);
        du.diff(um).is_zero() && du.diff(vn).is_zero() && dv.diff(vn).is_zero()
    })
}

/// `(F, G)` with every `v_k` replaced by `D_x^k image`.
pub fn reduce_v(sys: &PdeSystem, image: &Expr) -> Result<(Expr, Expr), ClassifyError> {
    let rules = DerivationRules::default();
    let mut b = BTreeMap::new();
    let top = max_jet(&sys.f, Field::V).max(max_jet(&sys.g, Field::V));
    for k in 0..=top.unwrap_or(0) {
        b.insert(v(k), total_dx_n(image, k, &rules)?);
    }
    Ok((sys.f.substitute(&b)?, sys.g.substitute(&b)?))
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub system: PdeSystem,
    pub forms: AssociatedForms,
    /// Lax pair as printed, when one is known.
    pub lax: Option<MatrixForm>,
    /// The constant `f_i1` of the theorem pattern; distinct from any spectral
    /// parameter inside the coefficients.
    pub theorem_eta: Option<Expr>,
}

fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("catalog expression `{s}`: {e}"))
}

fn dx(s: &str) -> Expr {
    total_dx(&p(s), &DerivationRules::default()).expect("catalog derivative")
}

fn rows3(f: [[&str; 2]; 3]) -> [[Expr; 2]; 3] {
    f.map(|r| r.map(p))
}

fn mat(x: [[&str; 2]; 2], t: [[&str; 2]; 2], packing: Packing) -> MatrixForm {
    let half = Expr::rational(1, 2);
    let m = |a: [[&str; 2]; 2]| a.map(|r| r.map(|s| &half * &p(s)));
    MatrixForm::new(m(x), m(t), packing)
}

fn song_qu_qiao() -> CatalogEntry {
    const Q: &str = "(u1*v1 - u*v + u*v1 - u1*v)";
    const E: &str = "exp((eta - 1)*x)";
    const EI: &str = "exp((1 - eta)*x)";
    let plus = format!("((u - u2)*{E} + (v - v2)*{EI})");
    let minus = format!("((u - u2)*{E} - (v - v2)*{EI})");
    let f11 = format!("eta*{plus}");
    let f12 = format!("eta*{Q}*{plus} + 1/(2*eta)*((u + u1)*{E} + (v - v1)*{EI})");
    let f22 = format!("1/(2*eta^2) + {Q}");
    let f31 = format!("-eta*{minus}");
    let f32 = format!("-eta*{Q}*{minus} - 1/(2*eta)*((u + u1)*{E} - (v - v1)*{EI})");
    let system = PdeSystem::new(
        dx(&format!("(u - u2)*{Q}")),
        dx(&format!("(v - v2)*{Q}")),
        Delta::Pseudospherical,
    );
    let forms = AssociatedForms::new(
        rows3([[&f11, &f12], ["eta", &f22], [&f31, &f32]]),
        Delta::Pseudospherical,
    )
    .with_eta_role(EtaSlot::Omega2);
    let lax = mat(
        [
            ["eta", &format!("2*eta*(u - u2)*{E}")],
            [&format!("2*eta*(v - v2)*{EI}"), "-eta"],
        ],
        [
            [&f22, &format!("(2*eta*{Q}*(u - u2) + 1/eta*(u + u1))*{E}")],
            [&format!("(2*eta*{Q}*(v - v2) + 1/eta*(v - v1))*{EI}"), &format!("-({f22})")],
        ],
        Packing::Sl2,
    );
    CatalogEntry {
        name: "song-qu-qiao",
        system,
        forms,
        lax: Some(lax),
        theorem_eta: Some(p("eta")),
    }
}

fn cubic_ch() -> CatalogEntry {
    let system = PdeSystem::new(
        &dx("1/2*(u - u2)*(u*v - u1*v1)") - &p("1/2*(u - u2)*(u*v1 - u1*v)"),
        &dx("1/2*(v - v2)*(u*v - u1*v1)") + &p("1/2*(v - v2)*(u*v1 - u1*v)"),
        Delta::Pseudospherical,
    );
    let f22 = "-1/eta^2 - 1/2*(u*v - u1*v1 + u*v1 - u1*v)";
    let forms = AssociatedForms::new(
        rows3([
            [
                "1/2*eta*((u - u2) - (v - v2))",
                "1/4*eta*(u*v - u1*v1)*((u - u2) - (v - v2)) + 1/(2*eta)*((u - u1) - (v + v1))",
            ],
            ["-1", f22],
            [
                "-1/2*eta*((u - u2) + (v - v2))",
                "-1/4*eta*(u*v - u1*v1)*((u - u2) + (v - v2)) - 1/(2*eta)*((u - u1) + (v + v1))",
            ],
        ]),
        Delta::Pseudospherical,
    )
    .with_eta_role(EtaSlot::Omega2);
    let lax = mat(
        [["-1", "eta*(u - u2)"], ["-eta*(v - v2)", "1"]],
        [
            [f22, "1/2*eta*(u*v - u1*v1)*(u - u2) + 1/eta*(u - u1)"],
            [
                "-1/2*eta*(u*v - u1*v1)*(v - v2) - 1/eta*(v + v1)",
                "1/eta^2 + 1/2*(u*v - u1*v1 + u*v1 - u1*v)",
            ],
        ],
        Packing::Sl2,
    );
    CatalogEntry {
        name: "two-component-cubic-ch",
        system,
        forms,
        lax: Some(lax),
        theorem_eta: Some(Expr::int(-1)),
    }
}

fn product() -> CatalogEntry {
    let system = PdeSystem::new(
        p("-1/2*(u - u2)*(u - u1)*(v + v1)"),
        p("1/2*(v - v2)*(u - u1)*(v + v1)"),
        Delta::Pseudospherical,
    );
    let f22 = "1/eta^2 + 1/2*(u - u1)*(v + v1)";
    let forms = AssociatedForms::new(
        rows3([
            ["1/2*eta*((v - v2) - (u - u2))", "1/(2*eta)*((v + v1) - (u - u1))"],
            ["1", f22],
            ["-1/2*eta*((u - u2) + (v - v2))", "-1/(2*eta)*((u - u1) + (v + v1))"],
        ]),
        Delta::Pseudospherical,
    )
    .with_eta_role(EtaSlot::Omega2);
    let lax = mat(
        [["1", "eta*(v - v2)"], ["-eta*(u - u2)", "-1"]],
        [
            [f22, "1/eta*(v + v1)"],
            ["-1/eta*(u - u1)", "-1/eta^2 - 1/2*(u - u1)*(v + v1)"],
        ],
        Packing::Sl2,
    );
    CatalogEntry {
        name: "two-component-product",
        system,
        forms,
        lax: Some(lax),
        theorem_eta: Some(Expr::one()),
    }
}

fn mch_type() -> CatalogEntry {
    const S: &str = "(1/2*(u^2 + v^2 - u1^2 - v1^2) + (u*v1 - u1*v))";
    const R: &str = "(-1/2*(u^2 + v^2 - u1^2 - v1^2) - u*v1 + u1*v)";
    let system = PdeSystem::new(
        &(-&dx(&format!("{S}*(u - u2)"))) - &p("2*u1"),
        &(-&dx(&format!("{S}*(v - v2)"))) - &p("2*v1"),
        Delta::Spherical,
    );
    let forms = AssociatedForms::new(
        rows3([
            ["-(v - v2)", &format!("-{R}*(v - v2) + v + u1")],
            ["1", &format!("{R} - 1")],
            ["u - u2", &format!("{R}*(u - u2) - u + v1")],
        ]),
        Delta::Spherical,
    )
    .with_eta_role(EtaSlot::Omega2);
    let (m, n) = ("(u - u2)", "(v - v2)");
    let lax = mat(
        [["i", &format!("-{n} + i*{m}")], [&format!("{n} + i*{m}"), "-i"]],
        [
            [
                &format!("i*({R} - 1)"),
                &format!("-{R}*({n} - i*{m}) + v + u1 + i*(v1 - u)"),
            ],
            [
                &format!("{R}*({n} + i*{m}) - v - u1 + i*(v1 - u)"),
                &format!("-i*({R} - 1)"),
            ],
        ],
        Packing::Su2,
    );
    CatalogEntry {
        name: "mch-type",
        system,
        forms,
        lax: Some(lax),
        theorem_eta: Some(Expr::one()),
    }
}

fn cubic_ch_dual() -> CatalogEntry {
    let system = PdeSystem::new(
        &dx("1/2*(u - u2)*(u*v1 - u1*v)") - &p("1/2*(u - u2)*(u*v - u1*v1)"),
        &dx("1/2*(v - v2)*(u*v1 - u1*v)") + &p("1/2*(v - v2)*(u*v - u1*v1)"),
        Delta::Pseudospherical,
    );
    let f22 = "1/eta^2 + 1/2*(u - u1)*(v + v1)";
    let forms = AssociatedForms::new(
        rows3([
            [
                "-1/2*eta*((u - u2) - (v - v2))",
                "-1/4*eta*(u*v1 - u1*v)*((u - u2) - (v - v2)) - 1/(2*eta)*((u - u1) - (v + v1))",
            ],
            ["1", f22],
            [
                "-1/2*eta*((u - u2) + (v - v2))",
                "-1/4*eta*(u*v1 - u1*v)*((u - u2) + (v - v2)) - 1/(2*eta)*((u - u1) + (v + v1))",
            ],
        ]),
        Delta::Pseudospherical,
    )
    .with_eta_role(EtaSlot::Omega2);
    let lax = mat(
        [["1", "eta*(v - v2)"], ["-eta*(u - u2)", "-1"]],
        [
            [f22, "1/2*eta*(u*v1 - u1*v)*(v - v2) + 1/eta*(v + v1)"],
            [
                "-1/2*eta*(u*v1 - u1*v)*(u - u2) - 1/eta*(u - u1)",
                "-1/eta^2 - 1/2*(u - u1)*(v + v1)",
            ],
        ],
        Packing::Sl2,
    );
    CatalogEntry {
        name: "two-component-cubic-ch-dual",
        system,
        forms,
        lax: Some(lax),
        theorem_eta: Some(Expr::one()),
    }
}

/// The known examples, plus the cubic CH system under the swap
/// `(omega2, omega1, -omega3)`.
pub fn catalog() -> Vec<CatalogEntry> {
    let cubic = cubic_ch();
    let swapped = CatalogEntry {
        name: "two-component-cubic-ch-swapped",
        system: cubic.system.clone(),
        forms: cubic.forms.swapped(),
        lax: None,
        theorem_eta: Some(Expr::int(-1)),
    };
    vec![song_qu_qiao(), cubic, product(), mch_type(), cubic_ch_dual(), swapped]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

/// Theorem data read back from forms with `f21` constant.
pub fn extract_thm34(entry: &CatalogEntry) -> Option<Thm34Input> {
    if entry.forms.eta_role != Some(EtaSlot::Omega2) {
        return None;
    }
    let f = &entry.forms.f;
    Some(Thm34Input {
        g: f[0][0].clone(),
        h: f[2][0].clone(),
        l: f[0][1].clone(),
        m: f[1][1].clone(),
        eta: f[1][0].clone(),
        delta: entry.forms.delta,
        orders: entry.system.orders,
    })
}
