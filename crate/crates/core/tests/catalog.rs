use pseudosphere::classify::{
    build_theorem34, build_theorem36, build_theorem37, catalog, catalog_entry, check_corollary33, extract_thm34,
    reduce_v, third_order_closed_form, Thm36Input,
};
use pseudosphere::forms::{check_lemma31, exterior_d_mod_system, wedge, EtaSlot};
use pseudosphere::jetcalc::{total_dx, Delta, DerivationRules, PdeSystem};
use pseudosphere::kernel::{parse, Coord, Expr};
use pseudosphere::laxzoo::{from_forms, is_zero, zero_curvature_residual, Packing};

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn rules() -> DerivationRules {
    DerivationRules::default()
}

#[test]
fn every_entry_satisfies_the_lemma() {
    for entry in catalog() {
        let r = check_lemma31(&entry.forms, &entry.system, &rules());
        assert!(r.passed(), "{}\n{}", entry.name, r.to_table());
        // The factored dependence of the dx coefficients.
        for row in &entry.forms.f {
            for (a, b) in [(Coord::u(0), Coord::u(2)), (Coord::v(0), Coord::v(2))] {
                assert!((&row[0].diff(a) + &row[0].diff(b)).is_zero());
            }
        }
        assert!(check_corollary33(&entry.system), "{}", entry.name);
    }
}

#[test]
fn swapped_forms_still_pass() {
    for entry in catalog() {
        let r = check_lemma31(&entry.forms.swapped(), &entry.system, &rules());
        assert!(r.passed(), "{}\n{}", entry.name, r.to_table());
    }
}

#[test]
fn printed_lax_pairs_are_packed_forms_with_zero_curvature() {
    for entry in catalog() {
        let Some(lax) = &entry.lax else { continue };
        let packed = from_forms(&entry.forms, lax.packing);
        assert_eq!(packed.x, lax.x, "{} X", entry.name);
        assert_eq!(packed.t, lax.t, "{} T", entry.name);
        let res = zero_curvature_residual(lax, &entry.system, &rules()).unwrap();
        assert!(is_zero(&res), "{}", entry.name);
    }
}

#[test]
fn lax_residual_vanishes_exactly_when_structure_equations_hold() {
    let mut cases: Vec<_> = catalog().into_iter().map(|c| (c.forms, c.system, true)).collect();
    let cubic = catalog_entry("two-component-cubic-ch").unwrap();
    let mut bumped = cubic.forms.clone();
    bumped.f[1][1] = &bumped.f[1][1] + &e("u");
    cases.push((bumped, cubic.system.clone(), false));
    let sqq = catalog_entry("song-qu-qiao").unwrap();
    let mut bumped = sqq.forms.clone();
    bumped.f[0][1] = &bumped.f[0][1] + &e("x*v1");
    cases.push((bumped, sqq.system.clone(), false));
    let mch = catalog_entry("mch-type").unwrap();
    let mut sys = mch.system.clone();
    sys.g = &sys.g + &e("v");
    cases.push((mch.forms.clone(), sys, false));
    for (forms, sys, expected) in cases {
        let packing = if forms.delta == Delta::Spherical { Packing::Su2 } else { Packing::Sl2 };
        let structure = forms.structure_residuals(&sys, &rules()).unwrap();
        let lax = zero_curvature_residual(&from_forms(&forms, packing), &sys, &rules()).unwrap();
        assert_eq!(structure.iter().all(Expr::is_zero), expected);
        assert_eq!(is_zero(&lax), expected);
    }
}

#[test]
fn wrong_curvature_sign_fails_only_the_third_equation() {
    let mut entry = catalog_entry("song-qu-qiao").unwrap();
    entry.forms.delta = Delta::Spherical;
    let r = check_lemma31(&entry.forms, &entry.system, &rules());
    let failed: Vec<_> = r.failures().map(|c| c.condition_id.as_str()).collect();
    assert_eq!(failed, ["structure-omega3"]);
    // Oracle: the residual flips by -2 times the metric determinant.
    let res = &r.conditions.iter().find(|c| c.condition_id == "structure-omega3").unwrap().residual_text;
    let expected = &entry.forms.metric_determinant() * &Expr::int(2);
    assert_eq!(parse(res).unwrap(), expected);
}

#[test]
fn perturbed_dt_coefficient_fails_the_second_equation() {
    let mut entry = catalog_entry("two-component-cubic-ch").unwrap();
    entry.forms.f[1][1] = &entry.forms.f[1][1] + &e("u");
    let r = check_lemma31(&entry.forms, &entry.system, &rules());
    let failed: Vec<_> = r.failures().map(|c| c.condition_id.as_str()).collect();
    assert_eq!(failed, ["structure-omega1", "structure-omega2", "structure-omega3"]);
    let res = r.conditions.iter().find(|c| c.condition_id == "structure-omega2").unwrap();
    // f22 enters the omega2 residual only through D_x f22.
    assert_eq!(parse(&res.residual_text).unwrap(), e("u1"));
}

#[test]
fn spherical_example_first_structure_equation() {
    let entry = catalog_entry("mch-type").unwrap();
    let w = |i: usize| entry.forms.omega(i);
    let d1 = exterior_d_mod_system(&w(0), &entry.system, &rules()).unwrap();
    assert!((&d1.c - &wedge(&w(2), &w(1)).c).is_zero());
}

#[test]
fn wedge_of_cubic_ch_forms_matches_hand_expansion() {
    let f = catalog_entry("two-component-cubic-ch").unwrap().forms;
    let got = wedge(&f.omega(0), &f.omega(1)).c;
    let f11 = e("1/2*eta*((u - u2) - (v - v2))");
    let f12 = e("1/4*eta*(u*v - u1*v1)*((u - u2) - (v - v2)) + 1/(2*eta)*((u - u1) - (v + v1))");
    let f22 = e("-1/eta^2 - 1/2*(u*v - u1*v1 + u*v1 - u1*v)");
    assert_eq!(got, &(&f11 * &f22) + &f12);
    assert!(!got.is_zero());
}

#[test]
fn theorem34_round_trip_reproduces_each_system() {
    let mut seen = 0;
    for entry in catalog() {
        let Some(input) = extract_thm34(&entry) else { continue };
        if entry.name == "two-component-product" {
            // Second order, yet f22 depends on u1: outside the order bound on M.
            let err = build_theorem34(&input).unwrap_err();
            assert!(err.to_string().contains("M has u-order at most 0"), "{err}");
            continue;
        }
        let (sys, forms) = build_theorem34(&input).unwrap();
        assert_eq!(sys.f, entry.system.f, "{} F", entry.name);
        assert_eq!(sys.g, entry.system.g, "{} G", entry.name);
        assert_eq!(forms.f, entry.forms.f, "{}", entry.name);
        seen += 1;
    }
    assert_eq!(seen, 4);
}

#[test]
fn song_qu_qiao_from_the_third_order_theorem() {
    let entry = catalog_entry("song-qu-qiao").unwrap();
    let f = &entry.forms.f;
    let q = e("u1*v1 - u*v + u*v1 - u1*v");
    let input = Thm36Input {
        g: f[0][0].clone(),
        h: f[2][0].clone(),
        a: -&q,
        l1: e("1/(2*eta)*((u + u1)*exp((eta - 1)*x) + (v - v1)*exp((1 - eta)*x))"),
        n1: e("-1/(2*eta)*((u + u1)*exp((eta - 1)*x) - (v - v1)*exp((1 - eta)*x))"),
        m: f[1][1].clone(),
        eta: e("eta"),
        delta: Delta::Pseudospherical,
    };
    let (sys, forms, lax) = build_theorem36(&input).unwrap();
    assert_eq!((&sys.f, &sys.g), (&entry.system.f, &entry.system.g));
    assert_eq!(forms.f, entry.forms.f);
    assert_eq!(Some(lax), entry.lax);
    // The u3 coefficient of the printed system is -Q.
    assert_eq!(entry.system.f.diff(Coord::u(3)), e("-(u1*v1 - u*v + u*v1 - u1*v)"));
}

#[test]
fn spherical_example_from_the_third_order_theorem() {
    let entry = catalog_entry("mch-type").unwrap();
    let r = e("-1/2*(u^2 + v^2 - u1^2 - v1^2) - u*v1 + u1*v");
    let input = Thm36Input {
        g: e("-(v - v2)"),
        h: e("u - u2"),
        a: -&r,
        l1: e("v + u1"),
        n1: e("v1 - u"),
        m: &r - &Expr::one(),
        eta: Expr::one(),
        delta: Delta::Spherical,
    };
    let (sys, _, lax) = build_theorem36(&input).unwrap();
    assert_eq!((&sys.f, &sys.g), (&entry.system.f, &entry.system.g));
    assert_eq!(Some(lax), entry.lax);
    assert_eq!(third_order_closed_form(&input, EtaSlot::Omega2).unwrap(), (sys.f, sys.g));
}

fn thm37_input(delta: Delta) -> Thm36Input {
    // delta D_x M + h L1 - g N1 = 0 with M = u1^2 - u^2, L1 = 0, N1 = -2 delta u1.
    Thm36Input {
        g: e("u - u2"),
        h: e("v - v2"),
        a: e("v1"),
        l1: Expr::zero(),
        n1: &delta.expr() * &e("-2*u1"),
        m: e("u1^2 - u^2"),
        eta: e("eta"),
        delta,
    }
}

#[test]
fn theorem37_outputs_pass_both_checks() {
    for delta in [Delta::Pseudospherical, Delta::Spherical] {
        let input = thm37_input(delta);
        let (sys, forms, lax) = build_theorem37(&input).unwrap();
        assert_eq!(lax.packing, if delta == Delta::Spherical { Packing::Su2 } else { Packing::Sl2 });
        assert_eq!(forms.f[2][0], e("eta"));
        assert!(check_lemma31(&forms, &sys, &rules()).passed());
        assert!(is_zero(&zero_curvature_residual(&lax, &sys, &rules()).unwrap()));
        assert_eq!(third_order_closed_form(&input, EtaSlot::Omega3).unwrap(), (sys.f, sys.g));
    }
    let mut bad = thm37_input(Delta::Spherical);
    bad.m = e("3");
    assert!(build_theorem37(&bad).is_err());
    let mut bad = thm37_input(Delta::Spherical);
    bad.n1 = e("u1");
    assert!(build_theorem37(&bad).is_err());
}

#[test]
fn negated_flux_leaves_an_off_diagonal_residual() {
    let entry = catalog_entry("two-component-cubic-ch").unwrap();
    let lax = entry.lax.unwrap();
    let mut sys = entry.system.clone();
    sys.f = -&sys.f;
    let res = zero_curvature_residual(&lax, &sys, &rules()).unwrap();
    // The residual is linear in F; only u-dependence of X sits in the (1,2) entry.
    let x12_u = lax.x[0][1].diff(Coord::u(0));
    assert_eq!(res[0][1], &(&x12_u * &entry.system.f) * &Expr::int(-2));
    assert!(res[0][0].is_zero());
}

fn mch_flux() -> Expr {
    total_dx(&e("(u - u2)*(u^2 - u1^2)"), &rules()).unwrap()
}

#[test]
fn reductions_to_single_equations() {
    let sqq = catalog_entry("song-qu-qiao").unwrap();
    let (f, _) = reduce_v(&sqq.system, &e("-u")).unwrap();
    assert_eq!(f, mch_flux());
    let cubic = catalog_entry("two-component-cubic-ch").unwrap();
    let (f, _) = reduce_v(&cubic.system, &e("2*u")).unwrap();
    assert_eq!(f, mch_flux());
    let mch = catalog_entry("mch-type").unwrap();
    let (f, g) = reduce_v(&mch.system, &e("u")).unwrap();
    assert_eq!(f, &(-&mch_flux()) - &e("2*u1"));
    assert_eq!(f, g.subs(Coord::v(0), &e("u")).unwrap());
}

#[test]
fn corollary33_on_the_cubic_system() {
    let cubic = catalog_entry("two-component-cubic-ch").unwrap();
    assert_eq!(cubic.system.orders, (3, 3));
    assert!(check_corollary33(&cubic.system));
    let sys = PdeSystem::new(e("u2^2"), e("v2"), Delta::Pseudospherical);
    assert!(!check_corollary33(&sys));
}
