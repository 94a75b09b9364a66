use delc_core::delc::{
    build_quad_transform, build_tri_transform, conjugate_gain, gain_from_interaction, output_cm, quad_cascade,
    tri_cascade, two_mode_squeezer, PumpingParams,
};
use delc_core::gaussian::QuadratureTransform;
use delc_core::{Error, GainSet};
use proptest::prelude::*;

/// Quadrature rows rebuilt from the mode relations
/// `a_out,k = Σ α_kl a_in,l + Σ β_kl a_in,l†`: the X row is `α + β`, the P row
/// is `α − β`.
fn from_mode_relations(alpha: &[[f64; 3]; 3], beta: &[[f64; 3]; 3]) -> QuadratureTransform<f64> {
    let mut m = nalgebra::DMatrix::zeros(6, 6);
    for k in 0..3 {
        for l in 0..3 {
            m[(2 * k, 2 * l)] = alpha[k][l] + beta[k][l];
            m[(2 * k + 1, 2 * l + 1)] = alpha[k][l] - beta[k][l];
        }
    }
    QuadratureTransform::new(m).unwrap()
}

#[test]
fn tri_rows_follow_mode_relations() {
    let (big1, big2) = (1.4f64, 1.7);
    let (g1, g2) = (conjugate_gain(big1), conjugate_gain(big2));
    // a1 = G1 a1 + g1 a2†
    // a2 = G1 G2 a2 + g1 G2 a1† + g2 a3†
    // a3 = G2 a3 + g1 g2 a1 + G1 g2 a2†
    let alpha = [[big1, 0.0, 0.0], [0.0, big1 * big2, 0.0], [g1 * g2, 0.0, big2]];
    let beta = [[0.0, g1, 0.0], [g1 * big2, 0.0, g2], [0.0, big1 * g2, 0.0]];
    let u = build_tri_transform(&GainSet::tri(big1, big2).unwrap()).unwrap();
    assert!(u.max_abs_diff(&from_mode_relations(&alpha, &beta)).unwrap() < 1e-15);
}

#[test]
fn quad_entries() {
    let u = build_quad_transform(&GainSet::quad(1.0f64, 1.0, 1.1).unwrap()).unwrap();
    assert!((u.get(0, 6) - 0.21f64.sqrt()).abs() < 1e-15);
    assert!((u.get(0, 6) - 0.4583).abs() < 1e-4);
    assert_eq!(
        build_quad_transform(&GainSet::quad(1.0f64, 1.0, 1.0).unwrap()).unwrap(),
        QuadratureTransform::identity(4).unwrap()
    );
}

#[test]
fn four_mode_needs_g3() {
    let tri = GainSet::tri(1.2f64, 1.3).unwrap();
    assert!(matches!(build_quad_transform(&tri), Err(Error::Configuration(_))));
    let quad = GainSet::quad(1.2f64, 1.3, 1.1).unwrap();
    assert!(build_tri_transform(&quad).is_err());
}

#[test]
fn gains_below_one_rejected() {
    assert!(matches!(GainSet::tri(0.99f64, 1.0), Err(Error::Domain(_))));
    assert!(GainSet::quad(1.0f64, 1.0, f64::NAN).is_err());
    assert!(two_mode_squeezer(3, 1, 1, 1.2f64).is_err());
    assert!(two_mode_squeezer(3, 1, 4, 1.2f64).is_err());
}

#[test]
fn interaction_gain() {
    let g = |kappa, t| gain_from_interaction(&PumpingParams { kappa, t_interaction: t });
    assert_eq!(g(0.0f64, 3.0).unwrap(), 1.0);
    assert_eq!(g(1.0f64, 0.0).unwrap(), 1.0);
    assert!((g(0.5f64, 1.0).unwrap() - 1.1276).abs() < 1e-4);
    assert!(g(-0.5f64, 1.0).is_err());
}

#[test]
fn output_cm_diagonal() {
    let sigma = output_cm(&build_tri_transform(&GainSet::tri(1.3f64, 1.6).unwrap()).unwrap());
    assert!((sigma.xx(1, 1) - (2.0 * 1.69 - 1.0)).abs() < 1e-13);
    assert_eq!(sigma.max_xp_correlation(), 0.0);
}

fn gain() -> impl Strategy<Value = f64> {
    1.0f64..3.0
}

proptest! {
    #[test]
    fn tri_matches_cascade(a in gain(), b in gain()) {
        let gains = GainSet::tri(a, b).unwrap();
        let d = build_tri_transform(&gains).unwrap().max_abs_diff(&tri_cascade(&gains).unwrap()).unwrap();
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn quad_matches_cascade_in_either_order(a in gain(), b in gain(), c in gain()) {
        let gains = GainSet::quad(a, b, c).unwrap();
        let literal = build_quad_transform(&gains).unwrap();
        prop_assert!(literal.max_abs_diff(&quad_cascade(&gains).unwrap()).unwrap() < 1e-12);
        let s12 = two_mode_squeezer(4, 1, 2, a).unwrap();
        let s14 = two_mode_squeezer(4, 1, 4, c).unwrap();
        let s23 = two_mode_squeezer(4, 2, 3, b).unwrap();
        let commuted = QuadratureTransform::cascade([&s12, &s23, &s14]).unwrap();
        prop_assert!(literal.max_abs_diff(&commuted).unwrap() < 1e-12);
    }

    #[test]
    fn conjugate_gain_identity(a in gain()) {
        let g = conjugate_gain(a);
        prop_assert!((a * a - g * g - 1.0).abs() < 1e-13);
        prop_assert!(g >= 0.0);
    }
}
