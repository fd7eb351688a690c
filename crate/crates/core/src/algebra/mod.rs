//! Exact coefficient arithmetic, sparse polynomials and harmonic series, and
//! the linear inversions the perturbation engines are built on.

mod context;
mod harmonic;
mod poly;

pub use context::{same_ctx, Ctx, PolyContext, AMP0, EPS, S, T};
pub use harmonic::HarmonicSeries;
pub use poly::{Monomial, MultiPoly};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::Gq;

/// The unique polynomial `P` with `∂P/∂t + c·P = R`:
/// `P = (1/c)·Σ_k (−1/c)^k ∂^k R/∂t^k`, a finite sum.
pub fn resolve_shift(c: &Gq, rhs: &MultiPoly) -> Result<MultiPoly> {
    if c.is_zero() {
        return Err(Error::ZeroShift);
    }
    let inv = c.inv()?;
    let step = -&inv;
    let mut out = MultiPoly::zero(rhs.ctx());
    let mut deriv = rhs.clone();
    let mut factor = inv;
    while !deriv.is_zero() {
        out = out.add(&deriv.scale(&factor));
        deriv = deriv.diff_t();
        factor = &factor * &step;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use alloc::vec::Vec;
    use num_complex::Complex64;
    use num_traits::One;
    use proptest::prelude::*;

    fn ctx(k: u32) -> Ctx {
        let amps: Vec<String> = vec!["A1".to_string(), "A2".to_string()];
        PolyContext::new(&amps, &["mu".to_string()], k).unwrap().shared()
    }

    fn a(c: &Ctx, j: usize) -> MultiPoly {
        MultiPoly::var(c, c.amp(j))
    }

    fn eps(c: &Ctx) -> MultiPoly {
        MultiPoly::var(c, EPS)
    }

    fn t(c: &Ctx) -> MultiPoly {
        MultiPoly::var(c, T)
    }

    fn num(c: &Ctx, n: i64, d: i64) -> MultiPoly {
        MultiPoly::constant(c, Gq::from_frac(n, d))
    }

    #[test]
    fn product_examples() {
        let c = ctx(3);
        let lhs = a(&c, 0).add(&eps(&c).mul(&t(&c)));
        let got = lhs.mul(&a(&c, 1));
        let want = a(&c, 0).mul(&a(&c, 1)).add(&eps(&c).mul(&t(&c)).mul(&a(&c, 1)));
        assert_eq!(got, want);

        let top = MultiPoly::var_pow(&c, EPS, 3).mul(&t(&c));
        assert!(top.mul(&eps(&c)).is_zero());

        let x = a(&c, 0);
        let one = MultiPoly::one(&c);
        assert_eq!(x.sub(&one).mul(&x.add(&one)), x.mul(&x).sub(&one));
    }

    #[test]
    fn context_mismatch() {
        let c1 = ctx(3);
        let c2 = ctx(4);
        assert_eq!(a(&c1, 0).try_mul(&a(&c2, 0)), Err(Error::ContextMismatch));
    }

    #[test]
    fn derivative_examples() {
        let c = ctx(3);
        let t3 = MultiPoly::var_pow(&c, T, 3).scale(&Gq::from_frac(1, 6));
        assert_eq!(t3.diff_t(), MultiPoly::var_pow(&c, T, 2).scale(&Gq::from_frac(1, 2)));
        assert!(a(&c, 0).diff_t().is_zero());
        let p = eps(&c).mul(&MultiPoly::var_pow(&c, T, 2)).mul(&a(&c, 1));
        assert_eq!(p.diff_t(), p.var_coeff(T, 2).mul(&t(&c)).scale(&Gq::from_int(2)));
    }

    #[test]
    fn antiderivative_examples() {
        let c = ctx(3);
        assert_eq!(
            MultiPoly::var_pow(&c, T, 2).antidiff_t(),
            MultiPoly::var_pow(&c, T, 3).scale(&Gq::from_frac(1, 3))
        );
        let aa = a(&c, 0).mul(&a(&c, 1));
        assert_eq!(aa.antidiff_t(), aa.mul(&t(&c)));
        assert!(MultiPoly::zero(&c).antidiff_t().is_zero());
    }

    #[test]
    fn resolve_shift_examples() {
        let c = ctx(3);
        let minus_3i = Gq::parts((0, 1), (-3, 1));
        let p = resolve_shift(&minus_3i, &a(&c, 1)).unwrap();
        assert_eq!(p, a(&c, 1).scale(&Gq::parts((0, 1), (1, 3))));

        let minus_i = Gq::parts((0, 1), (-1, 1));
        let aa = a(&c, 0).mul(&a(&c, 1));
        assert_eq!(resolve_shift(&minus_i, &aa).unwrap(), aa.scale(&Gq::i()));

        let p = resolve_shift(&Gq::one(), &t(&c)).unwrap();
        assert_eq!(p, t(&c).sub(&MultiPoly::one(&c)));

        assert_eq!(resolve_shift(&Gq::zero(), &t(&c)), Err(Error::ZeroShift));
    }

    #[test]
    fn substitute_examples() {
        let c = ctx(3);
        let x = a(&c, 0);
        let p = x.add(&eps(&c).mul(&t(&c)).mul(&x.mul(&x)));
        let same = p.substitute(&[(c.amp(0), x.clone())]).unwrap();
        assert_eq!(same, p);

        // t -> t - s, A -> A + eps*s*A^2 reproduces p up to O(eps^2).
        let s = MultiPoly::var(&c, S);
        let shifted = p
            .substitute(&[
                (T, t(&c).sub(&s)),
                (c.amp(0), x.add(&eps(&c).mul(&s).mul(&x.mul(&x)))),
            ])
            .unwrap();
        assert_eq!(shifted.truncate(1), p.truncate(1));

        let t2 = MultiPoly::var_pow(&c, T, 2);
        let got = t2.substitute(&[(T, t(&c).sub(&s))]).unwrap();
        let want = t2
            .sub(&t(&c).mul(&s).scale(&Gq::from_int(2)))
            .add(&MultiPoly::var_pow(&c, S, 2));
        assert_eq!(got, want);
    }

    #[test]
    fn substitute_named_unknown_symbol() {
        let c = ctx(2);
        let err = a(&c, 0).substitute_named(&[("B7", a(&c, 0))]).unwrap_err();
        assert_eq!(err, Error::UnknownSymbol("B7".into()));
    }

    #[test]
    fn harmonic_products() {
        let c = ctx(3);
        let x = HarmonicSeries::single(1, a(&c, 0));
        let y = HarmonicSeries::single(-1, a(&c, 1));
        let xy = x.mul(&y);
        assert_eq!(xy, HarmonicSeries::single(0, a(&c, 0).mul(&a(&c, 1))));

        let e_inv = HarmonicSeries::single(-1, MultiPoly::one(&c));
        assert_eq!(e_inv.mul(&y), HarmonicSeries::single(-2, a(&c, 1)));

        assert!(x.mul(&HarmonicSeries::zero(&c)).is_zero());
    }

    #[test]
    fn eval_examples() {
        let c = ctx(3);
        let p = a(&c, 0).mul(&a(&c, 1)).mul(&eps(&c)).scale(&Gq::i());
        let one = Complex64::new(1.0, 0.0);
        let v = p.eval_complex(&[("A1", one), ("A2", one)], 0.25, 0.0).unwrap();
        assert!((v - Complex64::new(0.0, 0.25)).norm() < 1e-15);

        let t2 = MultiPoly::var_pow(&c, T, 2);
        assert_eq!(t2.eval_complex(&[], 0.0, 3.0).unwrap(), Complex64::new(9.0, 0.0));

        let x = a(&c, 0);
        let q = x.mul(&x).sub(&MultiPoly::one(&c));
        assert_eq!(q.eval_complex(&[("A1", one)], 0.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));

        assert_eq!(
            x.eval_complex(&[], 0.0, 0.0),
            Err(Error::UnboundSymbol("A1".into()))
        );
    }

    #[test]
    fn rendering_is_canonical() {
        let c = ctx(3);
        let p = a(&c, 1).scale(&Gq::parts((0, 1), (1, 3))).mul(&eps(&c))
            .sub(&eps(&c).pow(3).mul(&t(&c)).scale(&Gq::from_int(2)));
        assert_eq!(alloc::format!("{p}"), "1/3*i*eps*A2 - 2*eps^3*t");
        assert_eq!(alloc::format!("{}", num(&c, -1, 2)), "-1/2");
    }

    // Random small polynomials over (eps, t, A1, A2, mu).
    fn arb_poly() -> impl Strategy<Value = Vec<(Vec<u16>, i64, i64, i64)>> {
        proptest::collection::vec(
            (proptest::collection::vec(0u16..3, 6), -3i64..=3, -3i64..=3, 1i64..=3),
            0..5,
        )
    }

    fn build(c: &Ctx, spec: &[(Vec<u16>, i64, i64, i64)]) -> MultiPoly {
        MultiPoly::from_terms(
            c,
            spec.iter().map(|(e, re, im, d)| {
                let mut e = e.clone();
                e[2] = 0; // keep s out
                (Monomial::from_exps(e), Gq::parts((*re, *d), (*im, *d)))
            }),
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            let c = ctx(3);
            let (p, q, r) = (build(&c, &p), build(&c, &q), build(&c, &r));
            prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
            prop_assert_eq!(p.mul(&q), q.mul(&p));
        }

        #[test]
        fn antiderivative_inverts_derivative(p in arb_poly()) {
            let c = ctx(3);
            let p = build(&c, &p);
            prop_assert_eq!(p.antidiff_t().diff_t(), p);
        }

        #[test]
        fn resolve_shift_solves(p in arb_poly(), re in -3i64..=3, im in -3i64..=3) {
            prop_assume!(re != 0 || im != 0);
            let c = ctx(3);
            let r = build(&c, &p);
            let k = Gq::parts((re, 1), (im, 2));
            let sol = resolve_shift(&k, &r).unwrap();
            prop_assert_eq!(sol.diff_t().add(&sol.scale(&k)), r);
        }

        #[test]
        fn substitution_is_a_ring_homomorphism(p in arb_poly(), q in arb_poly(), img in arb_poly()) {
            let c = ctx(3);
            let (p, q, img) = (build(&c, &p), build(&c, &q), build(&c, &img));
            let b = [(c.amp(0), img.clone()), (T, t(&c).add(&MultiPoly::var(&c, S)))];
            let lhs = p.mul(&q).substitute(&b).unwrap();
            let rhs = p.substitute(&b).unwrap().mul(&q.substitute(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
            let lhs = p.add(&q).substitute(&b).unwrap();
            let rhs = p.substitute(&b).unwrap().add(&q.substitute(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
            let ident = [(c.amp(0), a(&c, 0)), (c.amp(1), a(&c, 1))];
            prop_assert_eq!(p.substitute(&ident).unwrap(), p);
        }

        #[test]
        fn harmonic_products_keep_finite_support(
            p in arb_poly(), q in arb_poly(), mp in -2i64..=2, mq in -2i64..=2,
        ) {
            // Inputs whose minimal eps-order grows with |m| keep that property.
            let c = ctx(3);
            let lift = |x: MultiPoly, m: i64| x.shift_var(EPS, m.unsigned_abs() as u16);
            let x = HarmonicSeries::single(mp, lift(build(&c, &p), mp))
                .add(&HarmonicSeries::single(0, build(&c, &q)));
            let y = HarmonicSeries::single(mq, lift(build(&c, &q), mq));
            let prod = x.mul(&y);
            for (m, poly) in prod.entries() {
                prop_assert!(poly.min_eps().unwrap() >= m.unsigned_abs() as u32);
            }
        }
    }
}
