use heckeval::eval::{choose_truncation, evaluate_form, tail_bound, EvalPoint, FormEvaluator, TailModel};
use heckeval::hecke::{eigenvalue_numerical, Method};
use heckeval::qexp::{eta_delta_oracle, EigenformHandle};
use heckeval::BallComplex;
use proptest::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

fn point(x: i64, y: i64) -> EvalPoint {
    EvalPoint::exact(Rational::from((x, 1000)), Rational::from((y, 1000))).unwrap()
}

fn delta() -> FormEvaluator {
    FormEvaluator::with_sign(EigenformHandle::level1(12, 0).unwrap(), None)
}

#[test]
fn deep_point_near_the_real_axis() {
    let f = EigenformHandle::level1(12, 0).unwrap();
    let eps = Float::with_val(64, 1e-15);
    let z = point(0, 50);
    let v = evaluate_form(&f, &z, &eps, None).unwrap();
    assert!(v.disc_radius() < eps);
    // Δ(i/20) = (20)^12 Δ(20i)
    let w = evaluate_form(&f, &point(0, 20_000), &Float::with_val(64, 1e-200), None).unwrap();
    let scaled = w.mul_rational(&Rational::from(rug::Integer::u_pow_u(20, 12)));
    assert!(v.overlaps(&scaled));
}

#[test]
fn eigenvalue_does_not_depend_on_the_point() {
    let f = EigenformHandle::level1(12, 0).unwrap();
    let eps = Float::with_val(64, 1e-12);
    for z in [point(0, 1000), point(300, 1100), point(-170, 900)] {
        let v = eigenvalue_numerical(&f, 7, &eps, Some(&z), None, Method::Direct).unwrap();
        assert!(v.value.contains_integer(&rug::Integer::from(-16744)), "z0 = {z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn periodic(x in -500i64..500, y in 200i64..2000) {
        let ev = delta();
        let eps = Float::with_val(64, 1e-20);
        let a = ev.evaluate(&point(x, y), &eps).unwrap().value;
        let b = ev.evaluate(&point(x + 1000, y), &eps).unwrap().value;
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn inversion(x in -400i64..400, y in 900i64..1600) {
        let ev = delta();
        let eps = Float::with_val(64, 1e-20);
        let z = point(x, y);
        let w = z.mobius(0, -1, 1, 0).unwrap();
        let fz = ev.evaluate_unreduced(&z, &eps).unwrap().value;
        let fw = ev.evaluate_unreduced(&w, &eps).unwrap().value;
        let (re, im) = z.as_exact().unwrap();
        let zb = BallComplex::from_rationals(re, im, 128);
        prop_assert!(fw.overlaps(&fz.mul(&zb.pow_u(12))));
    }

    #[test]
    fn reduction_agrees_with_direct_sums(x in -500i64..500, y in 300i64..1500) {
        let ev = delta();
        let eps = Float::with_val(64, 1e-25);
        let z = point(x, y);
        let a = ev.evaluate(&z, &eps).unwrap().value;
        let b = ev.evaluate_unreduced(&z, &eps).unwrap().value;
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn tail_bound_covers_the_tail(x in -0.5f64..0.5, y in 0.3f64..3.0, e in 1.0f64..30.0) {
        let prec = 192;
        let yf = Float::with_val(64, y);
        let t = choose_truncation(&yf, 12, &Float::with_val(64, 10f64.powf(-e))).unwrap().terms as usize;
        let bound = tail_bound(&yf, TailModel::cusp_form(12), t as u64).unwrap();
        let limit = 3000;
        prop_assume!(t < limit);
        let tau = eta_delta_oracle(limit + 1);
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let r = Float::with_val(prec, -(Float::with_val(prec, &two_pi * y))).exp();
        let theta = Float::with_val(prec, &two_pi * x);
        let (mut re, mut im) = (Float::new(prec), Float::new(prec));
        let mut rn = Float::with_val(prec, (&r).pow(t as u32 + 1));
        for n in t + 1..=limit {
            let mag = Float::with_val(prec, &rn * tau.coeff(n));
            let ang = Float::with_val(prec, &theta * n as u32);
            re += Float::with_val(prec, ang.cos_ref()) * &mag;
            im += Float::with_val(prec, ang.sin_ref()) * &mag;
            rn *= &r;
        }
        prop_assert!((re.square() + im.square()).sqrt() <= bound);
    }
}
