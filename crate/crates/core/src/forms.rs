//! 1-forms `a dx + b dt`, their wedge products and exterior derivatives on
//! solutions of a system, and the verifier for associated forms.

use serde::Serialize;

use crate::jetcalc::{total_dt_mod_system, total_dx, Delta, DerivationRules, JetError, PdeSystem};
use crate::kernel::{Coord, Expr, Field};
use crate::report::Report;

#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub a: Expr,
    pub b: Expr,
}

impl OneForm {
    pub fn new(a: Expr, b: Expr) -> Self {
        OneForm { a, b }
    }

    pub fn dx() -> Self {
        OneForm::new(Expr::one(), Expr::zero())
    }

    pub fn dt() -> Self {
        OneForm::new(Expr::zero(), Expr::one())
    }

    pub fn neg(&self) -> Self {
        OneForm::new(-&self.a, -&self.b)
    }
}

/// Coefficient of `dx ^ dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    pub c: Expr,
}

pub fn wedge(w: &OneForm, th: &OneForm) -> TwoForm {
    TwoForm {
        c: &(&w.a * &th.b) - &(&w.b * &th.a),
    }
}

/// `d(a dx + b dt) = (D_x b - D_t a) dx ^ dt` on solutions of `sys`.
pub fn exterior_d_mod_system(w: &OneForm, sys: &PdeSystem, rules: &DerivationRules) -> Result<TwoForm, JetError> {
    let dt_a = total_dt_mod_system(&w.a, sys, rules)?;
    let dx_b = total_dx(&w.b, rules)?;
    Ok(TwoForm { c: &dx_b - &dt_a })
}

/// Which `f_i1` is the constant of the surface family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaSlot {
    Omega1,
    Omega2,
    Omega3,
}

/// `omega_i = f[i][0] dx + f[i][1] dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedForms {
    pub f: [[Expr; 2]; 3],
    pub delta: Delta,
    pub eta_role: Option<EtaSlot>,
}

impl AssociatedForms {
    pub fn new(f: [[Expr; 2]; 3], delta: Delta) -> Self {
        AssociatedForms {
            f,
            delta,
            eta_role: None,
        }
    }

    pub fn with_eta_role(mut self, slot: EtaSlot) -> Self {
        self.eta_role = Some(slot);
        self
    }

    pub fn omega(&self, i: usize) -> OneForm {
        OneForm::new(self.f[i][0].clone(), self.f[i][1].clone())
    }

    /// `(omega2, omega1, -omega3)`, which leaves the structure equations intact.
    pub fn swapped(&self) -> Self {
        let [w1, w2, w3] = &self.f;
        AssociatedForms {
            f: [w2.clone(), w1.clone(), [-&w3[0], -&w3[1]]],
            delta: self.delta,
            eta_role: self.eta_role.map(|s| match s {
                EtaSlot::Omega1 => EtaSlot::Omega2,
                EtaSlot::Omega2 => EtaSlot::Omega1,
                EtaSlot::Omega3 => EtaSlot::Omega3,
            }),
        }
    }

    /// `f11 f22 - f12 f21`.
    pub fn metric_determinant(&self) -> Expr {
        wedge(&self.omega(0), &self.omega(1)).c
    }

    /// Sum of the squared 2x2 minors of the `(f_i1,u, f_i1,v)` rows.
    pub fn nondegeneracy(&self) -> Expr {
        let row = |i: usize| (self.f[i][0].diff(Coord::u(0)), self.f[i][0].diff(Coord::v(0)));
        let minor = |i: usize, j: usize| {
            let (a, b) = row(i);
            let (c, d) = row(j);
            let m = &(&a * &d) - &(&b * &c);
            &m * &m
        };
        minor(0, 1) + minor(1, 2) + minor(0, 2)
    }

    /// Structure residuals `d omega_i - (omega3^omega2, omega1^omega3, delta omega1^omega2)`.
    pub fn structure_residuals(&self, sys: &PdeSystem, rules: &DerivationRules) -> Result<[Expr; 3], JetError> {
        let w: Vec<OneForm> = (0..3).map(|i| self.omega(i)).collect();
        let d = |i: usize| exterior_d_mod_system(&w[i], sys, rules).map(|t| t.c);
        Ok([
            &d(0)? - &wedge(&w[2], &w[1]).c,
            &d(1)? - &wedge(&w[0], &w[2]).c,
            &d(2)? - &(&self.delta.expr() * &wedge(&w[0], &w[1]).c),
        ])
    }
}

fn jets_of(e: &Expr, field: Field) -> Vec<u8> {
    e.coords()
        .into_iter()
        .filter_map(|c| match c {
            Coord::Jet(f, k) if f == field => Some(k),
            _ => None,
        })
        .collect()
}

/// Joins the nonzero partials as `d/dc: expr` items, or "0".
fn partials_text(e: &Expr, cs: impl IntoIterator<Item = Coord>) -> (String, bool) {
    let parts: Vec<String> = cs
        .into_iter()
        .filter_map(|c| {
            let d = e.diff(c);
            (!d.is_zero()).then(|| format!("d/d{c}: {d}"))
        })
        .collect();
    if parts.is_empty() {
        ("0".into(), true)
    } else {
        (parts.join("; "), false)
    }
}

/// Every condition for `forms` to make `sys` describe a surface of curvature
/// sign `forms.delta`. Failures are reported, never thrown.
pub fn check_lemma31(forms: &AssociatedForms, sys: &PdeSystem, rules: &DerivationRules) -> Report {
    let mut r = Report::new("associated forms");
    let (m, n) = sys.orders;
    let mut gate = true;
    for i in 0..3 {
        let w = i + 1;
        let f1 = &forms.f[i][0];
        let f2 = &forms.f[i][1];
        for (field, name) in [(Field::U, "u"), (Field::V, "v")] {
            let res = &f1.diff(Coord::Jet(field, 0)) + &f1.diff(Coord::Jet(field, 2));
            gate &= res.is_zero();
            r.expect_zero(format!("omega{w}.dx-depends-on-{name}-through-{name}-minus-{name}2"), &res);
        }
        let stray = jets_of(f1, Field::U)
            .into_iter()
            .filter(|&k| k != 0 && k != 2)
            .map(Coord::u)
            .chain(jets_of(f1, Field::V).into_iter().filter(|&k| k != 0 && k != 2).map(Coord::v));
        let (text, ok) = partials_text(f1, stray);
        gate &= ok;
        r.push(format!("omega{w}.dx-free-of-other-jets"), text, ok);
        let top = jets_of(f2, Field::U)
            .into_iter()
            .filter(|&k| k >= m)
            .map(Coord::u)
            .chain(jets_of(f2, Field::V).into_iter().filter(|&k| k >= n).map(Coord::v));
        let (text, ok) = partials_text(f2, top);
        r.push(format!("omega{w}.dt-below-system-order"), text, ok);
    }
    r.expect_nonzero("nondegeneracy", &forms.nondegeneracy());
    let ids = ["structure-omega1", "structure-omega2", "structure-omega3"];
    let residuals = if gate {
        forms.structure_residuals(sys, rules).map_err(|e| e.to_string())
    } else {
        Err("not evaluated: dx coefficients depend on other jets".into())
    };
    match residuals {
        Ok(res) => {
            for (id, e) in ids.iter().zip(res.iter()) {
                r.expect_zero(*id, e);
            }
        }
        Err(msg) => {
            for id in ids {
                r.push(id, msg.clone(), false);
            }
        }
    }
    r.expect_nonzero("metric-nondegeneracy", &forms.metric_determinant());
    r
}
