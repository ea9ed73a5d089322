use num_complex::Complex64;
use proptest::prelude::*;

use heunqp_core::elliptic::{eval_jacobi, inverse_sn, quarter_periods, HalfPeriod, QuarterShift, Triple};
use heunqp_core::families::{Poly, Vars};
use heunqp_core::gal::{apply_symmetry, potential};
use heunqp_core::heun::second_exponent_params;
use heunqp_core::{EllipticModulus, GalParams, Generator, HeunParams, SymmetryOp};

fn modulus() -> impl Strategy<Value = EllipticModulus> {
    (0.01f64..0.99).prop_map(|m| EllipticModulus::new(m).unwrap())
}

fn close(a: Complex64, b: f64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #[test]
    fn pythagorean_identities(y in -60.0f64..60.0, m in modulus()) {
        let p = eval_jacobi(y, m).unwrap();
        prop_assert!((p.sn * p.sn + p.cn * p.cn - 1.0).abs() < 1e-13);
        prop_assert!((p.dn * p.dn + m.value() * p.sn * p.sn - 1.0).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_the_addition_laws(y in -10.0f64..10.0, m in modulus()) {
        let p = eval_jacobi(y, m).unwrap();
        let tr = Triple::at(&p);
        prop_assert!(close(tr.sn.d1, p.cn * p.dn, 1e-13));
        prop_assert!(close(tr.cn.d1, -p.sn * p.dn, 1e-13));
        prop_assert!(close(tr.dn.d1, -m.value() * p.sn * p.cn, 1e-13));
    }

    #[test]
    fn real_period_is_4k(y in -10.0f64..10.0, m in modulus()) {
        let k = quarter_periods(m).k;
        let (a, b) = (eval_jacobi(y, m).unwrap(), eval_jacobi(y + 4.0 * k, m).unwrap());
        prop_assert!((a.sn - b.sn).abs() < 1e-11);
        prop_assert!((a.cn - b.cn).abs() < 1e-11);
        let c = eval_jacobi(y + 2.0 * k, m).unwrap();
        prop_assert!((a.sn + c.sn).abs() < 1e-11 && (a.dn - c.dn).abs() < 1e-11);
    }

    #[test]
    fn quarter_shift_k_matches_translation(y in 0.05f64..3.0, m in modulus()) {
        let k = quarter_periods(m).k;
        let moved = Triple::at(&eval_jacobi(y, m).unwrap()).shifted(QuarterShift::K, m);
        let direct = eval_jacobi(y + k, m).unwrap();
        prop_assert!(close(moved.sn.v, direct.sn, 1e-12));
        prop_assert!(close(moved.cn.v, direct.cn, 1e-12));
        prop_assert!(close(moved.dn.v, direct.dn, 1e-12));
    }

    #[test]
    fn two_quarter_shifts_make_a_half_period(y in 0.05f64..1.5, m in modulus()) {
        let tr = Triple::at(&eval_jacobi(y, m).unwrap());
        for (q, h) in [
            (QuarterShift::K, HalfPeriod::TwoK),
            (QuarterShift::IKPrime, HalfPeriod::TwoIKPrime),
            (QuarterShift::KIKPrime, HalfPeriod::TwoKTwoIKPrime),
        ] {
            let twice = tr.shifted(q, m).shifted(q, m);
            let half = tr.half_period(h);
            for (a, b) in [(twice.sn, half.sn), (twice.cn, half.cn), (twice.dn, half.dn)] {
                prop_assert!((a.v - b.v).norm() < 1e-10 * (1.0 + b.v.norm()));
                prop_assert!((a.d1 - b.d1).norm() < 1e-9 * (1.0 + b.d1.norm()));
            }
        }
    }

    #[test]
    fn inverse_sn_round_trips(s in 0.0f64..1.0, m in modulus()) {
        let y = inverse_sn(s, m).unwrap();
        prop_assert!((eval_jacobi(y, m).unwrap().sn - s).abs() < 1e-13);
    }

    #[test]
    fn every_generator_is_an_involution(
        a in -3.0f64..3.0, b in -3.0f64..3.0, f in -3.0f64..3.0, g in -3.0f64..3.0, m in modulus(),
    ) {
        let p = GalParams::new(a, b, f, g, m);
        for gen in Generator::ALL {
            let q = apply_symmetry(&SymmetryOp(vec![gen, gen]), &p);
            prop_assert!((q.a - a).abs() < 1e-14 && (q.b - b).abs() < 1e-14);
            prop_assert!((q.f - f).abs() < 1e-14 && (q.g - g).abs() < 1e-14);
        }
    }

    #[test]
    fn negations_leave_the_potential_unchanged(
        a in -3.0f64..3.0, b in -3.0f64..3.0, f in -3.0f64..3.0, g in -3.0f64..3.0,
        y in 0.1f64..1.4, m in modulus(),
    ) {
        let p = GalParams::new(a, b, f, g, m);
        let pt = eval_jacobi(y, m).unwrap();
        let v = potential(&p, &pt, 0.0).unwrap();
        for gen in [Generator::NegateA, Generator::NegateB, Generator::NegateF, Generator::NegateG, Generator::TReflection] {
            let w = potential(&apply_symmetry(&SymmetryOp(vec![gen]), &p), &pt, 0.0).unwrap();
            prop_assert!((v - w).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn shift_k_moves_the_potential_up_to_a_constant(
        a in -2.0f64..2.0, b in -2.0f64..2.0, f in -2.0f64..2.0, g in -2.0f64..2.0,
        y1 in 0.2f64..0.8, y2 in 0.2f64..0.8, m in modulus(),
    ) {
        let p = GalParams::new(a, b, f, g, m);
        let q = apply_symmetry(&SymmetryOp(vec![Generator::ShiftK]), &p);
        let k = quarter_periods(m).k;
        let gap = |y: f64| {
            potential(&p, &eval_jacobi(y + k, m).unwrap(), 0.0).unwrap()
                - potential(&q, &eval_jacobi(y, m).unwrap(), 0.0).unwrap()
        };
        let (d1, d2) = (gap(y1 * k), gap(y2 * k));
        prop_assert!((d1 - d2).abs() <= 1e-9 * d1.abs().max(1.0));
    }

    #[test]
    fn second_exponent_keeps_the_constraint(
        alpha in -3.0f64..3.0, gamma in -2.7f64..2.7, delta in -2.0f64..2.0, q in -5.0f64..5.0, m in 0.05f64..0.95,
    ) {
        prop_assume!((gamma - gamma.round()).abs() > 1e-3);
        // pick epsilon and beta so that the sum rule holds
        let epsilon = 0.5;
        let beta = gamma + delta + epsilon - alpha - 1.0;
        let p = HeunParams::new(alpha, beta, gamma, delta, epsilon, Complex64::new(q, 0.0), 1.0 / m).unwrap();
        let s = second_exponent_params(&p).unwrap();
        prop_assert!(s.constraint_defect() < 1e-12);
        prop_assert!((s.gamma - (2.0 - gamma)).abs() < 1e-15);
    }

    #[test]
    fn polynomials_round_trip_through_text(
        cs in proptest::collection::vec((-6i64..6, 1i64..4, 0u32..3, 0u32..3, 0u32..2, 0u32..2), 0..6),
        n in 0.0f64..4.0, p in 0.0f64..4.0, t in -1.0f64..1.0, m in 0.1f64..0.9,
    ) {
        let mut poly = Poly::zero();
        for (num, den, en, ep, et, em) in cs {
            let term = &(&(&Poly::n().pow(en) * &Poly::p().pow(ep)) * &Poly::t().pow(et)) * &Poly::m().pow(em);
            poly = &poly + &(&term * &Poly::frac(num, den));
        }
        let text = poly.to_string();
        let back = Poly::parse(&text).unwrap();
        prop_assert_eq!(&back, &poly, "{}", text);
        let v = Vars { n, p, t, m };
        prop_assert!((back.eval(&v) - poly.eval(&v)).abs() < 1e-9 * (1.0 + poly.eval(&v).abs()));
        prop_assert_eq!(poly.reflect_t().reflect_t(), poly);
    }
}
