//! 2x2 matrix 1-forms `X dx + T dt`, packings of associated forms, gauge
//! transformations and the zero-curvature residual.

use serde::Serialize;
use thiserror::Error;

use crate::forms::AssociatedForms;
use crate::jetcalc::{total_dt_mod_system, total_dx, DerivationRules, JetError, PdeSystem};
use crate::kernel::{Coord, Expr, KernelError};
use crate::report::Report;

pub type Mat2 = [[Expr; 2]; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaxError {
    #[error("gauge matrix is not unimodular: det - 1 = {residual}")]
    NonUnimodular { residual: String },
    #[error("gauge matrix depends on `{0}`; only x, t and parameters are allowed")]
    GaugeDependence(Coord),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// How `(omega1, omega2, omega3)` are placed in a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Packing {
    /// `1/2 [[w2, w1 - w3], [w1 + w3, -w2]]`.
    Sl2,
    /// `1/2 [[i w2, w1 + i w3], [-w1 + i w3, -i w2]]`, the form used by the
    /// spherical Lax pairs.
    Su2,
    /// `1/2 [[i w3, w1 - i w2], [w1 + i w2, -i w3]]`, the conjugate of `Sl2`.
    ComplexGauge,
}

pub fn zero() -> Mat2 {
    [[Expr::zero(), Expr::zero()], [Expr::zero(), Expr::zero()]]
}

pub fn identity() -> Mat2 {
    [[Expr::one(), Expr::zero()], [Expr::zero(), Expr::one()]]
}


pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][j] + &b[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][j] - &b[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn scale(a: &Mat2, s: &Expr) -> Mat2 {
    map(a, |x| s * x)
}

pub fn map(a: &Mat2, f: impl Fn(&Expr) -> Expr) -> Mat2 {
    [[f(&a[0][0]), f(&a[0][1])], [f(&a[1][0]), f(&a[1][1])]]
}

pub fn try_map<E>(a: &Mat2, f: impl Fn(&Expr) -> Result<Expr, E>) -> Result<Mat2, E> {
    Ok([[f(&a[0][0])?, f(&a[0][1])?], [f(&a[1][0])?, f(&a[1][1])?]])
}

pub fn det(a: &Mat2) -> Expr {
    &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0])
}

pub fn trace(a: &Mat2) -> Expr {
    &a[0][0] + &a[1][1]
}

/// Adjugate; the inverse when `det a = 1`.
pub fn adjugate(a: &Mat2) -> Mat2 {
    [[a[1][1].clone(), -&a[0][1]], [-&a[1][0], a[0][0].clone()]]
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    sub(&mul(a, b), &mul(b, a))
}

pub fn is_zero(a: &Mat2) -> bool {
    a.iter().flatten().all(Expr::is_identically_zero)
}

/// Rows of printed entries, the JSON shape of matrix reports.
pub fn to_strings(a: &Mat2) -> [[String; 2]; 2] {
    [
        [a[0][0].to_string(), a[0][1].to_string()],
        [a[1][0].to_string(), a[1][1].to_string()],
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixForm {
    pub x: Mat2,
    pub t: Mat2,
    pub packing: Packing,
}

impl MatrixForm {
    pub fn new(x: Mat2, t: Mat2, packing: Packing) -> Self {
        MatrixForm { x, t, packing }
    }

    pub fn is_trace_free(&self) -> bool {
        trace(&self.x).is_zero() && trace(&self.t).is_zero()
    }
}

fn pack(w: [&Expr; 3], packing: Packing) -> Mat2 {
    let half = Expr::rational(1, 2);
    let i = Expr::coord(Coord::I);
    let [w1, w2, w3] = w;
    let m = match packing {
        Packing::Sl2 => [[w2.clone(), w1 - w3], [w1 + w3, -w2]],
        Packing::Su2 => [
            [&i * w2, w1 + &(&i * w3)],
            [&(-w1) + &(&i * w3), -(&i * w2)],
        ],
        Packing::ComplexGauge => [
            [&i * w3, w1 - &(&i * w2)],
            [w1 + &(&i * w2), -(&i * w3)],
        ],
    };
    scale(&m, &half)
}

pub fn from_forms(forms: &AssociatedForms, packing: Packing) -> MatrixForm {
    let col = |j: usize| pack([&forms.f[0][j], &forms.f[1][j], &forms.f[2][j]], packing);
    MatrixForm::new(col(0), col(1), packing)
}

/// `D_t X - D_x T + [X, T]` on solutions of `sys`.
pub fn zero_curvature_residual(mf: &MatrixForm, sys: &PdeSystem, rules: &DerivationRules) -> Result<Mat2, JetError> {
    let xt = try_map(&mf.x, |e| total_dt_mod_system(e, sys, rules))?;
    let tx = try_map(&mf.t, |e| total_dx(e, rules))?;
    Ok(add(&sub(&xt, &tx), &commutator(&mf.x, &mf.t)))
}

/// One condition per residual entry.
pub fn zero_curvature_report(mf: &MatrixForm, sys: &PdeSystem, rules: &DerivationRules) -> Report {
    let mut r = Report::new("zero curvature");
    match zero_curvature_residual(mf, sys, rules) {
        Ok(res) => {
            for (i, row) in res.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    r.expect_zero(format!("zero-curvature[{}][{}]", i + 1, j + 1), e);
                }
            }
        }
        Err(e) => r.push("zero-curvature", e.to_string(), false),
    }
    r
}

/// `Omega' = dA A^-1 + A Omega A^-1` for unimodular `A` depending on x, t and
/// parameters only.
pub fn gauge_transform(mf: &MatrixForm, a: &Mat2) -> Result<MatrixForm, LaxError> {
    let d = &det(a) - &Expr::one();
    if !d.is_identically_zero() {
        return Err(LaxError::NonUnimodular { residual: d.to_string() });
    }
    for c in a.iter().flatten().flat_map(Expr::coords) {
        if !(c == Coord::X || c == Coord::T || c.is_param()) {
            return Err(LaxError::GaugeDependence(c));
        }
    }
    let inv = adjugate(a);
    let conj = |m: &Mat2, by: Coord| {
        let da = map(a, |e| e.diff(by));
        add(&mul(&da, &inv), &mul(&mul(a, m), &inv))
    };
    Ok(MatrixForm::new(conj(&mf.x, Coord::X), conj(&mf.t, Coord::T), mf.packing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::Delta;
    use crate::kernel::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn m(rows: [[&str; 2]; 2]) -> Mat2 {
        rows.map(|r| r.map(e))
    }

    fn sample_forms() -> AssociatedForms {
        AssociatedForms::new(
            [
                [e("u - u2"), e("u*v1 + x")],
                [e("eta"), e("v^2 - t")],
                [e("v - v2"), e("u1 - eta*v")],
            ],
            Delta::Pseudospherical,
        )
    }

    #[test]
    fn zero_forms_pack_to_zero() {
        let z = AssociatedForms::new(Default::default(), Delta::Pseudospherical);
        for p in [Packing::Sl2, Packing::Su2, Packing::ComplexGauge] {
            let mf = from_forms(&z, p);
            assert!(is_zero(&mf.x) && is_zero(&mf.t));
        }
    }

    #[test]
    fn packings_are_trace_free() {
        for p in [Packing::Sl2, Packing::Su2, Packing::ComplexGauge] {
            assert!(from_forms(&sample_forms(), p).is_trace_free());
        }
    }

    #[test]
    fn identity_gauge_is_a_no_op() {
        let mf = from_forms(&sample_forms(), Packing::Sl2);
        assert_eq!(gauge_transform(&mf, &identity()).unwrap(), mf);
    }

    #[test]
    fn non_unimodular_gauge_is_rejected() {
        let mf = from_forms(&sample_forms(), Packing::Sl2);
        let a = m([["2", "0"], ["0", "1"]]);
        assert!(matches!(gauge_transform(&mf, &a), Err(LaxError::NonUnimodular { .. })));
        // The printed conjugating matrix has determinant -1.
        let printed = scale(&m([["-i", "1"], ["1", "-i"]]), &e("sqrt2/2"));
        assert_eq!(det(&printed), Expr::int(-1));
        assert!(gauge_transform(&mf, &printed).is_err());
    }

    #[test]
    fn jet_dependent_gauge_is_rejected() {
        let mf = from_forms(&sample_forms(), Packing::Sl2);
        let a = m([["1", "u"], ["0", "1"]]);
        assert_eq!(gauge_transform(&mf, &a), Err(LaxError::GaugeDependence(Coord::u(0))));
    }

    #[test]
    fn rescaled_printed_gauge_maps_sl2_to_complex_packing() {
        let f = sample_forms();
        let a = scale(&m([["-i", "1"], ["1", "-i"]]), &e("i*sqrt2/2"));
        let out = gauge_transform(&from_forms(&f, Packing::Sl2), &a).unwrap();
        let want = from_forms(&f, Packing::ComplexGauge);
        assert_eq!((out.x, out.t), (want.x, want.t));
    }

    #[test]
    fn x_dependent_gauge_adds_derivative_term() {
        let mf = MatrixForm::new(zero(), zero(), Packing::Sl2);
        let a = m([["1", "x^2"], ["0", "1"]]);
        let out = gauge_transform(&mf, &a).unwrap();
        assert_eq!(out.x, m([["0", "2*x"], ["0", "0"]]));
        assert!(is_zero(&out.t));
    }

    #[test]
    fn residual_is_covariant_under_constant_gauge() {
        let sys = PdeSystem::new(e("u3 - v"), e("u*v1"), Delta::Pseudospherical);
        let rules = DerivationRules::default();
        let mf = from_forms(&sample_forms(), Packing::Sl2);
        let a = m([["2", "eta"], ["1", "(eta + 1)/2"]]);
        let r0 = zero_curvature_residual(&mf, &sys, &rules).unwrap();
        let r1 = zero_curvature_residual(&gauge_transform(&mf, &a).unwrap(), &sys, &rules).unwrap();
        assert_eq!(r1, mul(&mul(&a, &r0), &adjugate(&a)));
        assert!(trace(&r0).is_zero());
        assert!(!is_zero(&r0));
    }
}
