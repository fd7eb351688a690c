//! Secular coefficients and RG fields for the worked examples, compared
//! exactly against published values.

use num_complex::Complex64;
use rgsec_core::algebra::{HarmonicSeries, MultiPoly};
use rgsec_core::model::{parse_expression, parse_poly, LinearPart, ODESystemSpec, OscillatorSpec};
use rgsec_core::perturb::{expand, SecularTable};
use rgsec_core::rg::{derive_rg, polar_transform, renormalized_expansion, PolarPoly};

fn spec(linear: LinearPart, v: &[&str], params: &[&str], k: u32) -> ODESystemSpec {
    let v = v.iter().map(|s| parse_expression(s).unwrap()).collect();
    let params = params.iter().map(|s| s.to_string()).collect();
    ODESystemSpec::new(linear, v, params, k, None).unwrap()
}

fn cd(k: u32) -> SecularTable {
    expand(&spec(LinearPart::Semisimple(vec![1, -1]), &["y1*y2 + E^-1*y2", "y1*y2 + E*y1"], &[], k)).unwrap()
}

fn assert_poly(got: &MultiPoly, want: &str, label: &str) {
    let want = parse_poly(got.ctx(), want).unwrap();
    assert_eq!(got, &want, "{label}: got {got}, want {want}");
}

const CD_P1: &[(i64, &str)] = &[
    (-3, "-A2^2*eps^2/12 + (1/432)*A2^2*eps^4*(18*A1*A2^2 - 72*i*A1*A2*t + 12*A1*A2 - 72*A1 - 24*i*t - 1)"),
    (-2, "i*A2*eps/3 - (1/54)*i*A2*eps^3*(9*A1*A2^2 - 18*i*A1*A2*t - 18*A1*A2 - 6*i*t - 2)"),
    (-1, "-(1/2)*A1*(A2 - 1)*A2*eps^2 + (1/36)*A1*A2*eps^4*(-18*i*A1*A2^2*t - 27*A1*A2^2 + 27*A1*A2 - 6*i*A2*t - 25*A2 + 11)"),
    (0, "i*A1*A2*eps + (1/18)*i*A1*A2*eps^3*(18*A1*A2 - 9*A1 + 11)"),
    (1, "A1 - (1/3)*i*A1*eps^2*t*(3*A1*A2 + 1) - (1/54)*A1*eps^4*t*(i*(54*A1^2*A2^2 - 9*A1^2*A2 - 27*A1*A2^2 + 57*A1*A2 + 2) + 3*t*(3*A1*A2 + 1)^2)"),
    (2, "(1/12)*i*A1^2*eps^3*(6*A1*A2 - 8*A2 + 1)"),
    (3, "-A1^2*eps^2/6 + A1^2*eps^4*(90*A1^2*A2 + 360*i*A1*A2*t - 300*A1*A2 + 9*A1 + 120*i*t - 62)/1080"),
];

#[test]
fn cd_first_component_to_fourth_order() {
    let table = cd(4);
    for (m, want) in CD_P1 {
        assert_poly(&table.p(0, *m), want, &format!("P_1,{m}"));
    }
}


#[test]
fn cd_second_component_mirrors_first() {
    let table = cd(4);
    let c = &table.ctx;
    let (a1, a2) = (c.amp(0), c.amp(1));
    for m in -5..=5 {
        assert_eq!(table.p(1, m), table.p(0, -m).swap_vars(a1, a2).conj(), "m = {m}");
    }
}

#[test]
fn cd_rg_field_to_fourth_order() {
    let rg = derive_rg(&cd(4)).unwrap();
    assert_poly(
        &rg.field[0],
        "-(i*eps^2/3)*𝒜1*(1 + 3*𝒜1*𝒜2) - (i*eps^4/54)*𝒜1*(2 + 57*𝒜1*𝒜2 - 27*𝒜1*𝒜2^2 - 9*𝒜1^2*𝒜2 + 54*𝒜1^2*𝒜2^2)",
        "F1",
    );
    assert_poly(
        &rg.field[1],
        "(i*eps^2/3)*𝒜2*(1 + 3*𝒜1*𝒜2) + (i*eps^4/54)*𝒜2*(2 + 57*𝒜1*𝒜2 - 9*𝒜1*𝒜2^2 - 27*𝒜1^2*𝒜2 + 54*𝒜1^2*𝒜2^2)",
        "F2",
    );
}

fn assert_series(got: &HarmonicSeries, want: &str, label: &str) {
    let want = parse_expression(want).unwrap().expand(got.ctx()).unwrap();
    assert_eq!(got, &want, "{label}: got {got}, want {want}");
}

#[test]
fn cd_renormalized_expansion_to_second_order() {
    let ren = renormalized_expansion(&cd(2)).unwrap();
    assert_series(
        &ren.components[0],
        "𝒜1*E + (eps/3)*(3*i*𝒜1*𝒜2 + i*𝒜2*E^-2) + (eps^2/12)*(6*𝒜1*𝒜2*E^-1 - 6*𝒜1*𝒜2^2*E^-1 - 𝒜2^2*E^-3 - 2*𝒜1^2*E^3)",
        "Y1",
    );
    assert_series(
        &ren.components[1],
        "𝒜2*E^-1 - (eps/3)*(3*i*𝒜1*𝒜2 + i*𝒜1*E^2) + (eps^2/12)*(6*𝒜1*𝒜2*E - 6*𝒜1^2*𝒜2*E - 2*𝒜2^2*E^-3 - 𝒜1^2*E^3)",
        "Y2",
    );
}

#[test]
fn cd_polar_form_to_sixth_order() {
    let rg = derive_rg(&cd(6)).unwrap();
    let polar = polar_transform(&rg, &[(0, 1)]).unwrap();
    let r_dot = PolarPoly::zero(1, &[])
        .with(1, 3, 4, &[4], &[1], true)
        .with(97, 180, 6, &[4], &[1], true)
        .with(175, 180, 6, &[6], &[1], true);
    let theta_dot = PolarPoly::zero(1, &[])
        .with(-1, 3, 2, &[0], &[0], false)
        .with(-1, 1, 2, &[2], &[0], false)
        .with(-2, 54, 4, &[0], &[0], false)
        .with(-57, 54, 4, &[2], &[0], false)
        .with(-54, 54, 4, &[4], &[0], false)
        .with(36, 54, 4, &[3], &[1], false)
        .with(-80, 9720, 6, &[0], &[0], false)
        .with(-7023, 9720, 6, &[2], &[0], false)
        .with(-32913, 9720, 6, &[4], &[0], false)
        .with(-21870, 9720, 6, &[6], &[0], false)
        .with(11610, 9720, 6, &[3], &[1], false)
        .with(28890, 9720, 6, &[5], &[1], false);
    assert_eq!(polar.r_dot[0], r_dot);
    assert_eq!(polar.theta_dot[0], theta_dot);
}

fn bt(k: u32) -> SecularTable {
    expand(&spec(
        LinearPart::Nilpotent { m: 0, size: 2 },
        &["2*alpha*y1*cos(t)", "beta*y2*(mu + y1^2 + 2*cos(t))"],
        &["alpha", "beta", "mu"],
        k,
    ))
    .unwrap()
}

#[test]
fn bt_secular_coefficients_first_order() {
    let table = bt(1);
    assert_poly(
        &table.p(0, 0),
        "A1 + A2*t + (eps*beta*A2*t^2/12)*(6*A1^2 + 6*mu + 4*A1*A2*t + A2^2*t^2)",
        "P_1,0",
    );
    assert_poly(&table.p(1, 0), "A2 + (eps*beta*A2*t/3)*(3*A1^2 + 3*mu + 3*A1*A2*t + A2^2*t^2)", "P_2,0");
}

#[test]
fn bt_rg_field_to_third_order() {
    let rg = derive_rg(&bt(3)).unwrap();
    assert_poly(
        &rg.field[0],
        "𝒜2*(1 + 2*alpha*(alpha - beta)*eps^2 - 8*alpha*𝒜1*𝒜2*(3*alpha - beta)*beta*eps^3)",
        "F1",
    );
    assert_poly(
        &rg.field[1],
        "beta*𝒜2*(eps*(𝒜1^2 + mu) + 2*(alpha^2*𝒜1^2 + alpha^2*𝒜2^2 + 4*alpha*𝒜2^2*beta - 𝒜2^2*beta^2)*eps^3)",
        "F2",
    );
}

fn third(k: u32) -> SecularTable {
    expand(&spec(LinearPart::Scalar(vec![(0, 3)]), &["2*y*y''*cos(t)"], &[], k)).unwrap()
}

#[test]
fn third_order_secular_coefficient() {
    let table = third(2);
    assert_poly(
        &table.p(0, 0),
        "A1 + A2*t + A3*t^2/2 + (eps^2*A3*t^3/120)*(40*A2*(A1 - 3*A3) + 10*(A2^2 + A1*A3 - 3*A3^2)*t + 6*A2*A3*t^2 + A3^2*t^3)",
        "P_0",
    );
}

#[test]
fn third_order_rg_equation() {
    let rg = derive_rg(&third(4)).unwrap();
    assert_poly(&rg.field[0], "𝒜2", "F1");
    assert_poly(&rg.field[1], "𝒜3", "F2");
    assert_poly(
        &rg.field[2],
        "6*(eps^2*𝒜2*𝒜3*(𝒜1 - 3*𝒜3)/3 + (eps^4*𝒜2*𝒜3/192)*(-32*𝒜1^3 - 32*𝒜1*𝒜2^2 - 120*𝒜1^2*𝒜3 + 924*𝒜2^2*𝒜3 + 5576*𝒜1*𝒜3^2 - 48165*𝒜3^3))",
        "F3",
    );
}

#[test]
fn third_order_renormalized_solution() {
    let ren = renormalized_expansion(&third(2)).unwrap();
    assert_series(
        &ren.components[0],
        "𝒜1 - 2*eps*𝒜3*(3*𝒜2*cos(t) + (𝒜1 - 6*𝒜3)*sin(t)) + (eps^2*𝒜3/32)*((8*𝒜1^2 - 36*𝒜2^2 - 52*𝒜1*𝒜3 + 183*𝒜3^2)*cos(2*t) + 16*𝒜2*(-2*𝒜1 + 9*𝒜3)*sin(2*t))",
        "Y",
    );
}

fn oscillators(k: u32) -> SecularTable {
    let osc = OscillatorSpec {
        masses: vec![1, 1],
        v: vec![parse_expression("-4*q2*p1").unwrap(), parse_expression("-4*q1*p2").unwrap()],
        params: vec![],
        order: k,
    };
    expand(&osc.to_first_order().unwrap()).unwrap()
}

#[test]
fn oscillators_resonant_coefficient() {
    let table = oscillators(3);
    assert_poly(&table.p(0, 1), "A1 - (2/3)*i*A1*(-4*A2*A3 + 3*A1*A4 + 2*A3*A4)*t*eps^2", "P_1,1");
}

#[test]
fn oscillators_polar_form() {
    let rg = derive_rg(&oscillators(4)).unwrap();
    let polar = polar_transform(&rg, &[(0, 1), (2, 3)]).unwrap();
    let r1 = PolarPoly::zero(2, &[])
        .with(14, 3, 2, &[2, 1], &[1, -1], true)
        .with(-70, 27, 4, &[4, 1], &[1, -1], true)
        .with(-274, 27, 4, &[2, 3], &[1, -1], true)
        .with(-43, 27, 4, &[3, 2], &[2, -2], true)
        .with(-72, 27, 4, &[1, 4], &[2, -2], true);
    let th1 = PolarPoly::zero(2, &[])
        .with(-4, 3, 2, &[0, 2], &[0, 0], false)
        .with(2, 3, 2, &[1, 1], &[1, -1], false)
        .with(-50, 27, 4, &[2, 2], &[0, 0], false)
        .with(-52, 27, 4, &[0, 4], &[0, 0], false)
        .with(2, 27, 4, &[3, 1], &[1, -1], false)
        .with(90, 27, 4, &[1, 3], &[1, -1], false)
        .with(65, 27, 4, &[2, 2], &[2, -2], false)
        .with(-72, 27, 4, &[0, 4], &[2, -2], false);
    assert_eq!(polar.r_dot[0], r1);
    assert_eq!(polar.theta_dot[0], th1);
}

#[test]
fn oscillators_first_coordinate() {
    let ren = renormalized_expansion(&oscillators(2)).unwrap();
    let (r1, r2, t1, t2) = (0.8_f64, 1.3_f64, 0.4_f64, -1.1_f64);
    let amps = [
        Complex64::from_polar(r1, t1),
        Complex64::from_polar(r1, -t1),
        Complex64::from_polar(r2, t2),
        Complex64::from_polar(r2, -t2),
    ];
    for &(eps, t) in &[(0.3, 0.0), (0.2, 1.7), (0.45, -2.9)] {
        let y = ren.eval(eps, t, &amps, &[]);
        let q1 = (y[0] - y[1]) / Complex64::new(0.0, 2.0);
        let s = f64::sin;
        let want = r1 * s(t + t1)
            + (2.0 / 3.0) * eps * r1 * r2 * (3.0 * s(t1 - t2) + s(2.0 * t + t1 + t2))
            + (1.0 / 6.0) * eps * eps * r1 * r2
                * (4.0 * r2 * s(t + t1) + 6.0 * r1 * s(t + 2.0 * t1 - t2) - 8.0 * r1 * s(t + t2)
                    + r1 * s(3.0 * t + 2.0 * t1 + t2)
                    + 2.0 * r2 * s(3.0 * t + t1 + 2.0 * t2));
        assert!(q1.im.abs() < 1e-12);
        assert!((q1.re - want).abs() < 1e-12, "q1 = {q1}, want {want}");
    }
}

fn scalar1(k: u32) -> SecularTable {
    expand(&spec(LinearPart::Scalar(vec![(0, 1)]), &["y^2 - 1"], &[], k)).unwrap()
}

/// Taylor coefficients through ε⁵ of `(A cosh εt − sinh εt)/(cosh εt − A sinh εt)`,
/// the quadrature solution of `y' = ε(y² − 1)` with `y(0) = A`.
const SCALAR1_ORACLE: &str = "A1^6*eps^5*t^5 + A1^5*eps^4*t^4 - 2*A1^4*eps^5*t^5 + A1^4*eps^3*t^3 - 5*A1^3*eps^4*t^4/3 \
    + A1^3*eps^2*t^2 + 17*A1^2*eps^5*t^5/15 - 4*A1^2*eps^3*t^3/3 + A1^2*eps*t + 2*A1*eps^4*t^4/3 - A1*eps^2*t^2 + A1 \
    - 2*eps^5*t^5/15 + eps^3*t^3/3 - eps*t";

#[test]
fn scalar_first_order_matches_quadrature() {
    let table = scalar1(5);
    assert_eq!(table.ctx.amplitude_names(), ["A1"]);
    assert_poly(&table.p(0, 0), SCALAR1_ORACLE, "P_0");
    assert_eq!(table.components[0].len(), 1);
}

/// The published closed form has `A sinh εt + cosh εt` in the denominator;
/// its ε¹ coefficient is `−(1 + A²)t`, which does not solve the equation.
#[test]
fn scalar_first_order_published_denominator_differs() {
    let table = scalar1(1);
    let published = parse_poly(&table.ctx, "A1 - (1 + A1^2)*eps*t").unwrap();
    assert_ne!(table.p(0, 0), published);
    assert_poly(&table.p(0, 0), "A1 + (A1^2 - 1)*eps*t", "P_0");
}

#[test]
fn scalar_first_order_rg_is_the_equation() {
    let rg = derive_rg(&scalar1(5)).unwrap();
    assert_poly(&rg.field[0], "eps*(𝒜1^2 - 1)", "F");
}
