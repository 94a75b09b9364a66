use delc_core::criteria::{
    classify_tri_region, duan_tri_closed, duan_value, ppt_value, reduced_cm, Criterion, Region, TriPair,
};
use delc_core::delc::{output_cm, two_mode_squeezer, System};
use delc_core::gaussian::{
    evolve_cm, is_symplectic, partial_transpose, symplectic_eigenvalues, symplectic_form, vacuum_cm,
    CovarianceMatrix, ModeBipartition, QuadratureTransform,
};
use delc_core::sweep::{sweep_criteria, Axis, GainGrid};
use delc_core::GainSet;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn gain() -> impl Strategy<Value = f64> {
    1.0f64..3.0
}

fn tri_cm(a: f64, b: f64) -> CovarianceMatrix<f64> {
    output_cm(&System::Tri.transform(&GainSet::tri(a, b).unwrap()).unwrap())
}

fn quad_cm(a: f64, b: f64, c: f64) -> CovarianceMatrix<f64> {
    output_cm(&System::Quad.transform(&GainSet::quad(a, b, c).unwrap()).unwrap())
}

/// Single-mode phase rotation, a passive symplectic map.
fn rotation(n: usize, mode: usize, theta: f64) -> QuadratureTransform<f64> {
    let mut m = DMatrix::identity(2 * n, 2 * n);
    let (x, p) = (2 * (mode - 1), 2 * (mode - 1) + 1);
    m[(x, x)] = theta.cos();
    m[(x, p)] = theta.sin();
    m[(p, x)] = -theta.sin();
    m[(p, p)] = theta.cos();
    QuadratureTransform::new(m).unwrap()
}

/// Symplectic eigenvalues from the moduli of the eigenvalues of `Ωσ`, an
/// independent route to the ones computed by the library.
fn spectrum_by_schur(sigma: &CovarianceMatrix<f64>) -> Vec<f64> {
    let n = sigma.n_modes();
    let m = symplectic_form::<f64>(n).unwrap() * sigma.matrix();
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
    moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

#[test]
fn independent_spectrum_on_thermal_like_state() {
    // Squeezed vacuum with extra local noise: ν differ from 1 and from each other.
    let mut sigma = tri_cm(1.3, 1.2).matrix().clone();
    for k in 0..6 {
        sigma[(k, k)] += 0.25 * (1 + k / 2) as f64;
    }
    let sigma = CovarianceMatrix::new(sigma).unwrap();
    let ours = symplectic_eigenvalues(&sigma).unwrap().values;
    let theirs = spectrum_by_schur(&sigma);
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-9, "{ours:?} vs {theirs:?}");
    }
    assert!(ours[0] > 1.0);
}

#[test]
fn single_mode_thermal_spectrum() {
    let sigma = CovarianceMatrix::new(DMatrix::from_diagonal_element(2, 2, 3.0f64)).unwrap();
    assert!((symplectic_eigenvalues(&sigma).unwrap().values[0] - 3.0).abs() < 1e-14);
}

#[test]
fn monotone_d12_in_g2() {
    let g2s = Axis::new(1.0f64, 3.0, 0.01).unwrap().points();
    for g1 in [1.1, 1.2, 1.5] {
        let d: Vec<f64> = g2s
            .iter()
            .map(|&g2| duan_tri_closed(&GainSet::tri(g1, g2).unwrap(), TriPair::P12))
            .collect();
        assert!(d.windows(2).all(|w| w[1] >= w[0] - 1e-12), "G1 = {g1}");
    }
}

#[test]
fn tripartite_sign_trends() {
    let axis = Axis::new(1.0f64, 3.0, 0.05).unwrap().points();
    let crit = |s: &str| s.parse::<Criterion>().unwrap();
    let (c1_23, c12, c3_12, c23) = (crit("PPT1|23"), crit("PPT1|2"), crit("PPT3|12"), crit("PPT2|3"));
    for &a in &axis {
        for &b in &axis {
            let sigma = tri_cm(a, b);
            assert_eq!(c1_23.evaluate(&sigma).unwrap().1, c12.evaluate(&sigma).unwrap().1, "({a}, {b})");
            assert_eq!(c3_12.evaluate(&sigma).unwrap().1, c23.evaluate(&sigma).unwrap().1, "({a}, {b})");
        }
    }
}

#[test]
fn region_structure_on_fine_grid() {
    let axis = Axis::new(1.0f64, 3.0, 0.02).unwrap().points();
    let mut seen = [false; 3];
    for &a in &axis {
        for &b in &axis {
            match classify_tri_region(&GainSet::tri(a, b).unwrap()) {
                Region::I => seen[0] = true,
                Region::II => seen[1] = true,
                Region::III => seen[2] = true,
                Region::None => {}
            }
        }
    }
    assert_eq!(seen, [true; 3]);
}

#[test]
fn d13_never_violated_in_sweep() {
    let grid = GainGrid {
        system: System::Tri,
        g1: Axis::new(1.0f64, 3.0, 0.05).unwrap(),
        g2: Axis::new(1.0, 3.0, 0.05).unwrap(),
        g3: None,
    };
    let rows = sweep_criteria(&grid, &["D13".parse().unwrap()], true).unwrap();
    for r in rows {
        if r.gains.g1() == 1.0 && r.gains.g2() == 1.0 {
            assert!((r.value - 4.0).abs() < 1e-12);
        } else {
            assert!(r.value > 4.0);
        }
    }
}

#[test]
fn fig6_cuts_entangled() {
    let axis = Axis::new(1.01f64, 2.0, 0.01).unwrap().points();
    let part = ModeBipartition::new(4, [1, 2]).unwrap();
    for g1 in axis {
        assert!(ppt_value(&quad_cm(g1, 1.3, 1.1), &part).unwrap().entangled);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transforms_are_symplectic(a in gain(), b in gain(), c in gain()) {
        let t = System::Tri.transform(&GainSet::tri(a, b).unwrap()).unwrap();
        prop_assert!(is_symplectic(&t, 1e-10).is_symplectic);
        let q = System::Quad.transform(&GainSet::quad(a, b, c).unwrap()).unwrap();
        prop_assert!(is_symplectic(&q, 1e-10).is_symplectic);
    }

    #[test]
    fn outputs_are_pure(a in gain(), b in gain(), c in gain()) {
        for sigma in [tri_cm(a, b), quad_cm(a, b, c)] {
            for v in symplectic_eigenvalues(&sigma).unwrap().values {
                prop_assert!((v - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(a in gain(), b in gain(), mask in 1usize..7) {
        let sigma = tri_cm(a, b);
        let set: Vec<usize> = (1..=3).filter(|m| mask & (1 << (m - 1)) != 0).collect();
        let part = ModeBipartition::new(3, set).unwrap();
        let twice = partial_transpose(&partial_transpose(&sigma, &part).unwrap(), &part).unwrap();
        prop_assert_eq!(twice, sigma);
    }

    #[test]
    fn spectrum_invariant_under_symplectic_congruence(
        a in gain(), b in gain(), r in 1.0f64..1.5, theta in -3.0f64..3.0,
    ) {
        let mut sigma = tri_cm(a, b).matrix().clone();
        sigma[(0, 0)] += 0.7;
        sigma[(5, 5)] += 0.3;
        let sigma = CovarianceMatrix::new(sigma).unwrap();
        let s = QuadratureTransform::cascade([&rotation(3, 2, theta), &two_mode_squeezer(3, 1, 3, r).unwrap()]).unwrap();
        let moved = evolve_cm(&s, &sigma).unwrap();
        let before = symplectic_eigenvalues(&sigma).unwrap().values;
        let after = symplectic_eigenvalues(&moved).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn ppt_complement_symmetry(a in gain(), b in gain(), c in gain()) {
        let sigma = quad_cm(a, b, c);
        for part in ModeBipartition::all(4) {
            let v = ppt_value(&sigma, &part).unwrap().value;
            let w = ppt_value(&sigma, &part.complement()).unwrap().value;
            prop_assert!((v - w).abs() < 1e-10 * v.abs().max(1.0));
        }
    }

    #[test]
    fn duan_is_symmetric(a in gain(), b in gain(), c in gain()) {
        let sigma = quad_cm(a, b, c);
        for i in 1..=4 {
            for j in 1..=4 {
                if i != j {
                    prop_assert_eq!(duan_value(&sigma, i, j).unwrap().value, duan_value(&sigma, j, i).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn duan_violation_implies_npt(a in gain(), b in gain(), c in gain()) {
        let sigma = quad_cm(a, b, c);
        for i in 1..=4usize {
            for j in i + 1..=4 {
                if duan_value(&sigma, i, j).unwrap().entangled {
                    let reduced = reduced_cm(&sigma, &[i, j]).unwrap();
                    let part = ModeBipartition::new(2, [1]).unwrap();
                    prop_assert!(ppt_value(&reduced, &part).unwrap().entangled);
                }
            }
        }
    }

    #[test]
    fn single_precision_agrees(a in 1.0f32..2.0, b in 1.0f32..2.0) {
        let g = GainSet::tri(a, b).unwrap();
        let sigma = output_cm(&System::Tri.transform(&g).unwrap());
        let d = duan_value(&sigma, 1, 3).unwrap().value;
        prop_assert!((d - duan_tri_closed(&g, TriPair::P13)).abs() < 1e-3 * d);
        prop_assert!((symplectic_eigenvalues(&sigma).unwrap().min() - 1.0).abs() < 1e-2);
    }
}

#[test]
fn vacuum_is_separable_everywhere() {
    let vac = vacuum_cm::<f64>(4).unwrap();
    for part in ModeBipartition::all(4) {
        let r = ppt_value(&vac, &part).unwrap();
        assert!(r.value.abs() < 1e-14 && !r.entangled);
    }
}
