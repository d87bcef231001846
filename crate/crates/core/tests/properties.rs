//! Randomized invariants of transforms, operators and the scaling helpers.

use proptest::prelude::*;
use ptdiff::operator::{assemble, Grid1D, OperatorSpec, Variant};
use ptdiff::scaling::{classify_regime, osp_to_pt, pt_to_osp};
use ptdiff::transform::PointTransform;

fn odd_polynomial() -> impl Strategy<Value = PointTransform> {
    (0.1..3.0f64, 0.0..2.0f64, 0.0..0.5f64)
        .prop_map(|(a1, a3, a5)| PointTransform::polynomial(&[a1, 0.0, a3, 0.0, a5]).unwrap())
}

fn monomial() -> impl Strategy<Value = PointTransform> {
    (0.5..4.0f64).prop_map(|b| PointTransform::monomial(b).unwrap())
}

fn any_transform() -> impl Strategy<Value = PointTransform> {
    prop_oneof![odd_polynomial(), monomial(), Just(PointTransform::identity())]
}

proptest! {
    #[test]
    fn invert_undoes_evaluate(pt in any_transform(), x in -10.0..10.0f64) {
        // Plateaus at the origin of steep monomials are excluded.
        prop_assume!(pt.monomial_beta().is_none() || x.abs() > 1e-3);
        let w = pt.evaluate(x);
        prop_assume!(w.is_finite() && w.abs() < 1e300);
        let back = pt.invert(w, 1e-12).unwrap();
        prop_assert!((back - x).abs() < 1e-10, "x={x} back={back}");
    }

    #[test]
    fn evaluate_is_increasing(pt in any_transform(), a in -5.0..5.0f64, b in -5.0..5.0f64) {
        prop_assume!(a < b);
        prop_assert!(pt.evaluate(a) < pt.evaluate(b));
    }

    #[test]
    fn polynomial_is_exactly_odd(pt in odd_polynomial(), x in -10.0..10.0f64) {
        prop_assert_eq!(pt.evaluate(-x), -pt.evaluate(x));
    }

    #[test]
    fn monomial_is_odd_to_an_ulp(pt in monomial(), x in -10.0..10.0f64) {
        let (p, m) = (pt.evaluate(x), -pt.evaluate(-x));
        prop_assert!((p - m).abs() <= f64::EPSILON * p.abs(), "{p} {m}");
    }

    #[test]
    fn derivative_matches_central_difference(pt in any_transform(), x in 0.1..5.0f64, sign in prop::bool::ANY) {
        let x = if sign { x } else { -x };
        let step = 1e-5;
        let fd = (pt.evaluate(x + step) - pt.evaluate(x - step)) / (2.0 * step);
        let d = pt.derivative(x).unwrap();
        prop_assert!(((fd - d) / d).abs() < 1e-6, "x={x} fd={fd} d={d}");
    }

    #[test]
    fn delta3_and_delta4_are_dx_adjoint(
        pt in prop_oneof![odd_polynomial(), (1.0..3.0f64).prop_map(|b| PointTransform::monomial(b).unwrap())],
        alpha in 0.0..=1.0f64,
        seed in prop::collection::vec(-1.0..1.0f64, 2 * 64),
    ) {
        let grid = Grid1D::symmetric(2.0, 64).unwrap();
        let op = |v| assemble(&OperatorSpec::new(v, alpha, pt.clone(), 1.0).unwrap(), &grid).unwrap();
        let (a3, a4) = (op(Variant::Delta3), op(Variant::Delta4));
        let (u, v) = seed.split_at(64);
        let (a3v, a4u) = (a3.apply(v), a4.apply(u));
        let lhs: f64 = u.iter().zip(&a3v).map(|(p, q)| p * q).sum();
        let rhs: f64 = a4u.iter().zip(v).map(|(p, q)| p * q).sum();
        let scale: f64 = u.iter().zip(&a3v).map(|(p, q)| (p * q).abs()).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} {rhs}");
    }

    #[test]
    fn osp_round_trip_on_dyadic_values(bi in 1u32..64, ci in 1u32..32) {
        let (beta, c) = (bi as f64 / 8.0, ci as f64 / 8.0);
        let g = pt_to_osp(beta, c);
        let (pt, params) = osp_to_pt(c, g, 1.0).unwrap();
        prop_assert_eq!(params.beta, beta);
        prop_assert_eq!(pt.monomial_beta(), Some(beta));
    }

    #[test]
    fn regime_is_stable_under_tiny_perturbation(exponent in 0.05..10.0f64, delta in -1e-6..1e-6f64) {
        // Class boundaries in exponent: β = 0.25 and the normal band |β - 1| = 0.02.
        let boundaries = [4.0, 1.0 / 1.02, 1.0 / 0.98];
        prop_assume!(boundaries.iter().all(|b| (exponent - b).abs() > 2e-6));
        prop_assert_eq!(classify_regime(exponent).unwrap(), classify_regime(exponent + delta).unwrap());
    }
}
