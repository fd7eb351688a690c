//! Difference-equation scheme: g_k table, normalization constants, the two
//! constructions of the secular coefficients and the resummed amplitudes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rgsec_core::algebra::{MultiPoly, EPS, T};
use rgsec_core::difference::{
    check_difference_identities, ckj_coeffs, closed_form_amplitude, difference_ctx, gk_poly, normalization_constant,
    secular_pm, secular_pm_recursive, stability, theta_series, LaurentPoly,
};
use rgsec_core::verify::CheckStatus;
use rgsec_core::Gq;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn cos2() -> LaurentPoly {
    LaurentPoly::new([(2, Gq::from_int(1)), (-2, Gq::from_int(1))])
}

/// `u/(2^k k!) Π_{i=1}^{k−1} (u − k + 2i)`, the Γ-ratio written as a product.
fn g_oracle(k: usize, u: &BigRational) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let fact: i64 = (1..=k as i64).product();
    let mut v = u / BigRational::from_integer(BigInt::from(2).pow(k as u32) * fact);
    for i in 1..k as i64 {
        v *= u - q(k as i64 - 2 * i, 1);
    }
    v
}

#[test]
fn gk_matches_product_form_through_eight() {
    let table = gk_poly(8);
    for k in 0..=8 {
        assert_eq!(table.g[k].len(), k + 1, "degree of g_{k}");
        for n in -6..=6 {
            let u = q(n, 3);
            assert_eq!(table.eval(k, &u), g_oracle(k, &u), "g_{k}({u})");
        }
    }
}

#[test]
fn gk_published_list() {
    let table = gk_poly(5);
    let published = ["1", "1/2*u", "1/8*u^2", "-1/48*u + 1/48*u^3", "-1/96*u^2 + 1/384*u^4", "3/1280*u - 1/384*u^3 + 1/3840*u^5"];
    for (k, want) in published.iter().enumerate() {
        assert_eq!(table.render(k), *want);
    }
}

/// Power series of `(√(1+ζ²) + ζ)^u` up to `ζ^n`.
fn generating_oracle(u: u32, n: usize) -> Vec<BigRational> {
    // √(1+x) = Σ binom(1/2, j) x^j
    let mut sqrt = vec![BigRational::zero(); n + 1];
    let mut c = BigRational::one();
    for j in 0..=n / 2 {
        sqrt[2 * j] = c.clone();
        c = c * (q(1, 2) - q(j as i64, 1)) / q(j as i64 + 1, 1);
    }
    let mut base = sqrt;
    if n >= 1 {
        base[1] += BigRational::one();
    }
    let mut acc = vec![BigRational::zero(); n + 1];
    acc[0] = BigRational::one();
    for _ in 0..u {
        let mut next = vec![BigRational::zero(); n + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in base.iter().enumerate().take(n + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

#[test]
fn gk_generating_identity() {
    let k = 8;
    let table = gk_poly(k as u32);
    for u in 1..=4u32 {
        let want = generating_oracle(u, k);
        for (n, w) in want.iter().enumerate() {
            let got = table.eval(n, &q(u as i64, 1)) * BigRational::from_integer(BigInt::from(2).pow(n as u32));
            assert_eq!(&got, w, "u = {u}, ζ^{n}");
        }
    }
}

#[test]
fn normalization_constants() {
    let want = [q(1, 1), q(1, 6), q(3, 40), q(5, 112), q(35, 1152)];
    for (k, w) in want.iter().enumerate() {
        assert_eq!(&normalization_constant(k as u32), w);
    }
    let table = gk_poly(9);
    assert_eq!(table.n, want.to_vec());
    for k in 0..=4usize {
        assert!(table.g[2 * k].get(1).map_or(true, Zero::is_zero));
        let sign = if k % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        let expected = sign * &want[k] / BigRational::from_integer(BigInt::from(2).pow(2 * k as u32 + 1));
        assert_eq!(table.g[2 * k + 1][1], expected, "g'_{}(0)", 2 * k + 1);
    }
}

fn alpha_strategy() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-2i64..=2, -3i64..=3, -3i64..=3), 1..4).prop_map(|v| {
        LaurentPoly::new(v.into_iter().map(|(l, re, im)| (l, Gq::parts((re, 1), (im, 1)))))
    })
}

/// `A_m + Σ_j A_{m+j}(ε(−1)^m u/2 α_{−j} + ε² u²/8 Σ_l (−1)^l α_l α_{−j−l})`.
fn low_order_oracle(alpha: &LaurentPoly, m: i64, window: i64) -> MultiPoly {
    let ctx = difference_ctx(window, 2).unwrap();
    let amp = |n: i64| MultiPoly::var(&ctx, ctx.amp((n + window) as usize));
    let u = MultiPoly::var(&ctx, T);
    let eps = MultiPoly::var(&ctx, EPS);
    let sm = Gq::from_int(if m % 2 == 0 { 1 } else { -1 });
    let first = eps.mul(&u).scale(&(Gq::from_frac(1, 2) * sm));
    let second = eps.mul(&eps).mul(&u).mul(&u).scale(&Gq::from_frac(1, 8));
    let mut out = amp(m);
    for j in -4..=4 {
        let mut c2 = Gq::zero();
        for l in -2..=2 {
            let s = Gq::from_int(if l % 2 == 0 { 1 } else { -1 });
            c2 = c2 + s * alpha.coeff(l) * alpha.coeff(-j - l);
        }
        let term = first.scale(&alpha.coeff(-j)).add(&second.scale(&c2));
        out = out.add(&term.mul(&amp(m + j)));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn low_orders_match_formula(alpha in alpha_strategy(), m in -2i64..=2) {
        let p = secular_pm(&alpha, m, 2, 6).unwrap();
        prop_assert_eq!(p, low_order_oracle(&alpha, m, 6));
    }

    #[test]
    fn two_constructions_agree(alpha in alpha_strategy(), m in -1i64..=1) {
        prop_assert_eq!(secular_pm(&alpha, m, 3, 7).unwrap(), secular_pm_recursive(&alpha, m, 3, 7).unwrap());
    }

    #[test]
    fn first_coefficients_reflect_alpha(alpha in alpha_strategy()) {
        let h1 = ckj_coeffs(&alpha, 1);
        for j in -3..=3 {
            prop_assert_eq!(h1.coeff(j), alpha.coeff(-j));
        }
    }

    #[test]
    fn identities_hold_for_general_u(alpha in alpha_strategy()) {
        for r in check_difference_identities(&alpha, 2, 5).unwrap() {
            prop_assert!(r.status != CheckStatus::Fail, "{}", r);
        }
    }
}

#[test]
fn even_u_collapses_generating_function() {
    let a = LaurentPoly::new([(2, Gq::from_int(3)), (0, Gq::from_frac(1, 2)), (-4, Gq::i())]);
    for k in 0..=4 {
        assert_eq!(ckj_coeffs(&a, k), a.reflect().pow(k));
    }
}

#[test]
fn theta_inverts_sinh() {
    let a = LaurentPoly::new([(2, Gq::from_int(1)), (-2, Gq::from_int(1)), (0, Gq::from_int(-3))]);
    let theta = theta_series(&a, 7);
    let s = theta.sinh();
    let u = a.scale(&Gq::from_frac(1, 2));
    for (n, c) in s.iter().enumerate() {
        let want = if n == 1 { u.clone() } else { LaurentPoly::zero() };
        assert_eq!(c, &want, "ε^{n}");
    }
    for c in &theta.coeffs {
        assert_eq!(c.alternate(), *c);
    }
}

#[test]
fn resummed_amplitudes_match_secular_coefficients() {
    for m in -2..=2 {
        assert_eq!(closed_form_amplitude(&cos2(), m, 4, 10).unwrap(), secular_pm(&cos2(), m, 4, 10).unwrap(), "m = {m}");
    }
    let a0 = closed_form_amplitude(&cos2(), 0, 4, 10).unwrap();
    let ctx = difference_ctx(10, 4).unwrap();
    assert_eq!(a0.eps_coeff(0), MultiPoly::var(&ctx, ctx.amp(10)));
}

#[test]
fn identities_for_cos2() {
    let reports = check_difference_identities(&cos2(), 3, 8).unwrap();
    assert_eq!(reports.len(), 4);
    for r in reports {
        assert_eq!(r.status, CheckStatus::Pass, "{r}");
    }
}

#[test]
fn stability_flag_is_reported() {
    let real = stability(&cos2(), num_complex::Complex64::new(0.5, 0.0), 64);
    assert!(real.bounded);
    assert!(!real.theta_imaginary);
    let imag = stability(&cos2(), num_complex::Complex64::new(0.0, 0.5), 64);
    assert!(imag.bounded && imag.theta_imaginary);
}
