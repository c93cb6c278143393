//! Total derivatives on jet space.
//!
//! `D_x` promotes jets and applies x-rules for auxiliary symbols. `D_t` is only
//! defined modulo a system: in alias contexts the `u`, `v` dependence must
//! factor through `u - u2` and `v - v2`; in momentum-independent contexts
//! `m`, `n` and their jets carry the evolution and `u`, `v` jets are rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kernel::{Bindings, Coord, Expr, Field, KernelError, Momentum, MAX_JET_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("no derivation rule for `{0}`")]
    MissingRule(Coord),
    #[error("t-derivative of `{coord}` is not expressible: {reason}")]
    IllFormedDependence { coord: Coord, reason: String },
    #[error("jet order above {max} requested for `{0}`", max = MAX_JET_ORDER)]
    JetOrder(Coord),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Images of auxiliary symbols under `D_x` and `D_t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DerivationRules {
    pub x_rules: BTreeMap<Coord, Expr>,
    pub t_rules: BTreeMap<Coord, Expr>,
    pub momentum: Momentum,
}

impl DerivationRules {
    pub fn new(momentum: Momentum) -> Self {
        DerivationRules {
            momentum,
            ..Default::default()
        }
    }

    pub fn with_x(mut self, c: Coord, e: Expr) -> Self {
        self.x_rules.insert(c, e);
        self
    }

    pub fn with_t(mut self, c: Coord, e: Expr) -> Self {
        self.t_rules.insert(c, e);
        self
    }

    /// Every auxiliary symbol mentioned by a rule needs an x-rule of its own.
    pub fn validate(&self) -> Result<(), JetError> {
        for img in self.x_rules.values().chain(self.t_rules.values()) {
            for c in img.coords() {
                if matches!(c, Coord::Aux(_)) && !self.x_rules.contains_key(&c) {
                    return Err(JetError::MissingRule(c));
                }
            }
        }
        Ok(())
    }
}

/// Curvature sign of the surface: `+1` pseudospherical, `-1` spherical.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delta {
    Pseudospherical,
    Spherical,
    Symbolic,
}

impl Delta {
    pub fn expr(self) -> Expr {
        match self {
            Delta::Pseudospherical => Expr::int(1),
            Delta::Spherical => Expr::int(-1),
            Delta::Symbolic => Expr::coord(Coord::DELTA),
        }
    }

    pub fn from_sign(s: i8) -> Option<Delta> {
        match s {
            1 => Some(Delta::Pseudospherical),
            -1 => Some(Delta::Spherical),
            _ => None,
        }
    }
}

/// `u_t - u_{2,t} = F`, `v_t - v_{2,t} = G` (or `m_t = F`, `n_t = G`).
#[derive(Clone, Debug, PartialEq)]
pub struct PdeSystem {
    pub orders: (u8, u8),
    pub f: Expr,
    pub g: Expr,
    pub delta: Delta,
}

impl PdeSystem {
    /// Orders are the highest `u`, `v` jets present, but at least 2.
    pub fn new(f: Expr, g: Expr, delta: Delta) -> Self {
        let order = |field: Field| {
            f.coords()
                .into_iter()
                .chain(g.coords())
                .filter_map(|c| match c {
                    Coord::Jet(fl, k) if fl == field => Some(k),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
                .max(2)
        };
        PdeSystem {
            orders: (order(Field::U), order(Field::V)),
            f,
            g,
            delta,
        }
    }
}

/// Applies the derivation `c -> image(c)` to `e`, using the quotient rule once
/// on the canonical fraction.
fn derivation<F>(e: &Expr, image: F) -> Result<Expr, JetError>
where
    F: Fn(Coord) -> Result<Option<Expr>, JetError>,
{
    let on_poly = |p: &crate::kernel::Poly| -> Result<Expr, JetError> {
        let whole = Expr::from_poly(p.clone());
        let mut acc = Expr::zero();
        for c in whole.coords() {
            if let Some(img) = image(c)? {
                if img.is_zero() {
                    continue;
                }
                let d = whole.diff(c);
                if !d.is_zero() {
                    acc = &acc + &(&d * &img);
                }
            }
        }
        Ok(acc)
    };
    let dn = on_poly(e.numer())?;
    if e.is_polynomial() {
        return Ok(dn);
    }
    let dd = on_poly(e.denom())?;
    let n = Expr::from_poly(e.numer().clone());
    let d = Expr::from_poly(e.denom().clone());
    let top = &(&dn * &d) - &(&n * &dd);
    Ok(top.checked_div(&(&d * &d))?)
}

fn promote(c: Coord) -> Result<Expr, JetError> {
    match c {
        Coord::Jet(f, k) if k < MAX_JET_ORDER => Ok(Expr::coord(Coord::Jet(f, k + 1))),
        _ => Err(JetError::JetOrder(c)),
    }
}

pub fn total_dx(e: &Expr, rules: &DerivationRules) -> Result<Expr, JetError> {
    let out = derivation(e, |c| match c {
        Coord::X => Ok(Some(Expr::one())),
        Coord::T | Coord::Param(_) => Ok(None),
        Coord::Jet(..) => promote(c).map(Some),
        _ => rules
            .x_rules
            .get(&c)
            .cloned()
            .map(Some)
            .ok_or(JetError::MissingRule(c)),
    })?;
    match rules.momentum {
        Momentum::Independent => close_momentum(&out),
        Momentum::Alias => Ok(out),
    }
}

/// `D_x^k e`.
pub fn total_dx_n(e: &Expr, k: u8, rules: &DerivationRules) -> Result<Expr, JetError> {
    let mut out = e.clone();
    for _ in 0..k {
        out = total_dx(&out, rules)?;
    }
    Ok(out)
}

/// Rewrites `u_j` (`j >= 2`) as `u_{j-2} - m_{j-2}`, recursively, and the same
/// for `v` with `n`: the canonical form modulo `m = u - u2`, `n = v - v2`.
pub fn close_momentum(e: &Expr) -> Result<Expr, JetError> {
    let mut b = Bindings::new();
    for c in e.coords() {
        if let Coord::Jet(field @ (Field::U | Field::V), j) = c {
            if j >= 2 {
                let mom = if field == Field::U { Field::M } else { Field::N };
                let mut img = Expr::coord(Coord::Jet(field, j % 2));
                let mut i = j;
                while i >= 2 {
                    img = &img - &Expr::coord(Coord::Jet(mom, i - 2));
                    i -= 2;
                }
                b.insert(c, img);
            }
        }
    }
    Ok(e.substitute(&b)?)
}

/// `D_t e` on solutions of `sys`.
pub fn total_dt_mod_system(e: &Expr, sys: &PdeSystem, rules: &DerivationRules) -> Result<Expr, JetError> {
    match rules.momentum {
        Momentum::Alias => dt_alias(e, sys, rules),
        Momentum::Independent => dt_independent(e, sys, rules),
    }
}

fn dt_alias(e: &Expr, sys: &PdeSystem, rules: &DerivationRules) -> Result<Expr, JetError> {
    let coords = e.coords();
    for field in [Field::U, Field::V] {
        for &c in &coords {
            match c {
                Coord::Jet(f, k) if f == field && k != 0 && k != 2 => {
                    if !e.diff(c).is_zero() {
                        return Err(JetError::IllFormedDependence {
                            coord: c,
                            reason: format!("depends on `{c}` outside `{field} - {field}2`"),
                        });
                    }
                }
                Coord::Jet(Field::M | Field::N, _) => {
                    return Err(JetError::IllFormedDependence {
                        coord: c,
                        reason: "momentum symbols are aliases in this context".into(),
                    });
                }
                _ => {}
            }
        }
        let base = Coord::Jet(field, 0);
        let second = Coord::Jet(field, 2);
        if !(&e.diff(base) + &e.diff(second)).is_zero() {
            return Err(JetError::IllFormedDependence {
                coord: base,
                reason: format!("dependence on `{field}` and `{field}2` does not factor through `{field} - {field}2`"),
            });
        }
    }
    derivation(e, |c| match c {
        Coord::T => Ok(Some(Expr::one())),
        Coord::X | Coord::Param(_) => Ok(None),
        Coord::Jet(Field::U, 0) => Ok(Some(sys.f.clone())),
        Coord::Jet(Field::V, 0) => Ok(Some(sys.g.clone())),
        // Accounted for through the base jet.
        Coord::Jet(_, _) => Ok(None),
        _ => rules
            .t_rules
            .get(&c)
            .cloned()
            .map(Some)
            .ok_or(JetError::MissingRule(c)),
    })
}

fn dt_independent(e: &Expr, sys: &PdeSystem, rules: &DerivationRules) -> Result<Expr, JetError> {
    let mut images: BTreeMap<Coord, Expr> = BTreeMap::new();
    for c in e.coords() {
        match c {
            Coord::Jet(Field::U | Field::V, _) => {
                return Err(JetError::IllFormedDependence {
                    coord: c,
                    reason: "only momentum jets evolve in this context".into(),
                })
            }
            Coord::Jet(f @ (Field::M | Field::N), k) => {
                let rhs = if f == Field::M { &sys.f } else { &sys.g };
                images.insert(c, total_dx_n(rhs, k, rules)?);
            }
            _ => {}
        }
    }
    let out = derivation(e, |c| match c {
        Coord::T => Ok(Some(Expr::one())),
        Coord::X | Coord::Param(_) => Ok(None),
        Coord::Jet(..) => Ok(images.get(&c).cloned()),
        _ => rules
            .t_rules
            .get(&c)
            .cloned()
            .map(Some)
            .ok_or(JetError::MissingRule(c)),
    })?;
    close_momentum(&out)
}

/// `D_t(x_rule(s)) - D_x(t_rule(s))` on solutions, for every symbol with both rules.
pub fn check_rule_compatibility(
    rules: &DerivationRules,
    sys: &PdeSystem,
) -> Result<BTreeMap<Coord, Expr>, JetError> {
    let mut out = BTreeMap::new();
    for (c, xr) in &rules.x_rules {
        if let Some(tr) = rules.t_rules.get(c) {
            let lhs = total_dt_mod_system(xr, sys, rules)?;
            let rhs = total_dx(tr, rules)?;
            let mut r = &lhs - &rhs;
            if rules.momentum == Momentum::Independent {
                r = close_momentum(&r)?;
            }
            out.insert(*c, r);
        }
    }
    Ok(out)
}

/// Variational derivative `sum_k (-D_x)^k d h / d field_k` with plain jet promotion.
pub fn euler_operator(h: &Expr, field: Field) -> Result<Expr, JetError> {
    let rules = DerivationRules::default();
    let top = h
        .coords()
        .into_iter()
        .filter_map(|c| match c {
            Coord::Jet(f, k) if f == field => Some(k),
            _ => None,
        })
        .max();
    let Some(top) = top else {
        return Ok(Expr::zero());
    };
    let mut acc = Expr::zero();
    for k in (0..=top).rev() {
        // Horner form: acc = dh/dfield_k - D_x acc.
        acc = &h.diff(Coord::Jet(field, k)) - &total_dx(&acc, &rules)?;
    }
    Ok(acc)
}
