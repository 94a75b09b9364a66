//! Self-checks of the model against its closed forms, structural claims and
//! the number-state oracle.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::atomic::{
    analytic_resonances, channel_capacity, find_peaks, AtomicParams, Chain, DressingCase,
};
use crate::criteria::{
    classify_tri_region, duan_quad_closed, duan_tri_closed, duan_value, ppt_value, reduced_cm, QuadPair, Region,
    TriPair, DUAN_BOUND,
};
use crate::delc::{build_quad_transform, build_tri_transform, output_cm, GainSet};
use crate::error::{Error, Result};
use crate::fock::{covariance_from_state, squeezed_cascade, DEFAULT_CUTOFF, DEFAULT_CUTOFF_QUAD};
use crate::gaussian::{is_symplectic, symplectic_eigenvalues, CovarianceMatrix, ModeBipartition};
use crate::sweep::Axis;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub group: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Outcome = Result<(bool, String)>;

pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub group: &'static str,
    run: fn() -> Outcome,
}

impl Check {
    /// A filter matches the id, the name or the group.
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.trim().to_ascii_lowercase();
        f == self.id.to_string() || f == self.name || f == self.group
    }

    pub fn run(&self) -> CheckResult {
        let start = Instant::now();
        let (passed, detail) = match (self.run)() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckResult {
            id: self.id,
            name: self.name,
            group: self.group,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub const CHECKS: &[Check] = &[
    Check { id: 1, name: "closed-form-duan", group: "closed-form", run: closed_form },
    Check { id: 2, name: "symplecticity", group: "symplectic", run: symplecticity },
    Check { id: 3, name: "purity", group: "symplectic", run: purity },
    Check { id: 4, name: "no-entanglement-1-3", group: "three-mode", run: no_entanglement_13 },
    Check { id: 5, name: "duan-regions", group: "three-mode", run: regions },
    Check { id: 6, name: "four-mode-structure", group: "four-mode", run: four_mode_structure },
    Check { id: 7, name: "resonance-agreement", group: "resonance", run: resonance_agreement },
    Check { id: 8, name: "energy-conservation", group: "resonance", run: energy_conservation },
    Check { id: 9, name: "capacity", group: "resonance", run: capacity },
    Check { id: 10, name: "fock-oracle", group: "oracle", run: oracle },
];

pub fn find_check(filter: &str) -> Vec<&'static Check> {
    CHECKS.iter().filter(|c| c.matches(filter)).collect()
}

/// Runs every check matching `filter` (all of them without one) in id order.
pub fn run_checks(filter: Option<&str>) -> Result<Report> {
    let selected: Vec<&Check> = match filter {
        Some(f) => find_check(f),
        None => CHECKS.iter().collect(),
    };
    if selected.is_empty() {
        return Err(Error::Configuration(format!(
            "no validation check matches `{}`",
            filter.unwrap_or_default()
        )));
    }
    let checks = selected.par_iter().map(|c| c.run()).collect();
    Ok(Report { checks })
}

fn tri_grid() -> Result<Vec<GainSet<f64>>> {
    let axis = Axis::<f64>::new(1.0, 3.0, 0.01)?.points();
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for &a in &axis {
        for &b in &axis {
            out.push(GainSet::tri(a, b)?);
        }
    }
    Ok(out)
}

fn quad_grid() -> Result<Vec<GainSet<f64>>> {
    let axis = Axis::<f64>::new(1.0, 2.0, 0.02)?.points();
    let mut out = Vec::with_capacity(axis.len().pow(3));
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                out.push(GainSet::quad(a, b, c)?);
            }
        }
    }
    Ok(out)
}

fn both_grids() -> Result<Vec<GainSet<f64>>> {
    let mut g = tri_grid()?;
    g.extend(quad_grid()?);
    Ok(g)
}

fn transform(gains: &GainSet<f64>) -> Result<crate::gaussian::QuadratureTransform<f64>> {
    match gains.g3() {
        None => build_tri_transform(gains),
        Some(_) => build_quad_transform(gains),
    }
}

fn max_of(values: impl ParallelIterator<Item = Result<f64>>) -> Result<f64> {
    values.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn closed_form() -> Outcome {
    let tri = max_of(tri_grid()?.into_par_iter().map(|g| {
        let sigma = output_cm(&build_tri_transform(&g)?);
        let mut worst = 0.0f64;
        for &pair in TriPair::ALL {
            let (i, j) = pair.modes();
            worst = worst.max((duan_value(&sigma, i, j)?.value - duan_tri_closed(&g, pair)).abs());
        }
        Ok(worst)
    }))?;
    let quad = max_of(quad_grid()?.into_par_iter().map(|g| {
        let sigma = output_cm(&build_quad_transform(&g)?);
        let mut worst = 0.0f64;
        for &pair in QuadPair::ALL {
            let (i, j) = pair.modes();
            worst = worst.max((duan_value(&sigma, i, j)?.value - duan_quad_closed(&g, pair)?).abs());
        }
        Ok(worst)
    }))?;
    let worst = tri.max(quad);
    Ok((worst < 1e-9, format!("max |CM − closed form| = {worst:e} (three-mode {tri:e}, four-mode {quad:e})")))
}

fn symplecticity() -> Outcome {
    let worst = max_of(both_grids()?.into_par_iter().map(|g| Ok(is_symplectic(&transform(&g)?, 1e-10).residual)))?;
    Ok((worst < 1e-10, format!("max |UΩUᵀ − Ω| = {worst:e}")))
}

fn purity() -> Outcome {
    let worst = max_of(both_grids()?.into_par_iter().map(|g| {
        let spec = symplectic_eigenvalues(&output_cm(&transform(&g)?))?;
        Ok(spec.values.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs())))
    }))?;
    Ok((worst < 1e-8, format!("max |ν − 1| = {worst:e}")))
}

fn no_entanglement_13() -> Outcome {
    let points: Vec<GainSet<f64>> = tri_grid()?
        .into_iter()
        .filter(|g| g.g1() > 1.0 && g.g2() > 1.0)
        .collect();
    let a1 = ModeBipartition::new(2, [1])?;
    let results: Vec<(f64, f64)> = points
        .par_iter()
        .map(|g| {
            let sigma = output_cm(&build_tri_transform(g)?);
            let d13 = duan_value(&sigma, 1, 3)?.value;
            let ppt = ppt_value(&reduced_cm(&sigma, &[1, 3])?, &a1)?.value;
            Ok((d13, ppt))
        })
        .collect::<Result<_>>()?;
    let min_d = results.iter().fold(f64::INFINITY, |m, r| m.min(r.0));
    let min_p = results.iter().fold(f64::INFINITY, |m, r| m.min(r.1));
    Ok((
        min_d > DUAN_BOUND && min_p >= 0.0,
        format!("{} points: min D13 = {min_d}, min PPT(1|3) = {min_p:e}", points.len()),
    ))
}

fn regions() -> Outcome {
    let mut counts = [0usize; 4];
    for g in tri_grid()? {
        counts[match classify_tri_region(&g) {
            Region::I => 0,
            Region::II => 1,
            Region::III => 2,
            Region::None => 3,
        }] += 1;
    }
    let witnesses = [
        ((1.2, 1.0001), Region::I),
        ((1.05, 2.0), Region::II),
        ((1.3, 1.05), Region::III),
    ];
    let mut ok = counts[..3].iter().all(|&c| c > 0);
    let mut detail = format!("I: {}, II: {}, III: {}, none: {}", counts[0], counts[1], counts[2], counts[3]);
    for ((g1, g2), want) in witnesses {
        let got = classify_tri_region(&GainSet::tri(g1, g2)?);
        ok &= got == want;
        detail.push_str(&format!("; ({g1}, {g2}) → {got}"));
    }
    Ok((ok, detail))
}

fn quad_cm(g1: f64, g2: f64, g3: f64) -> Result<CovarianceMatrix<f64>> {
    Ok(output_cm(&build_quad_transform(&GainSet::quad(g1, g2, g3)?)?))
}

fn four_mode_structure() -> Outcome {
    let axis = Axis::<f64>::new(1.0, 2.0, 0.02)?.points();

    let d13_d24 = max_of(quad_grid()?.into_par_iter().map(|g| {
        let sigma = output_cm(&build_quad_transform(&g)?);
        Ok((duan_value(&sigma, 1, 3)?.value - duan_value(&sigma, 2, 4)?.value).abs())
    }))?;

    // Spread of D14 along G2 and of D23 along G3, for every other gain pair.
    let mut spread14 = 0.0f64;
    let mut spread23 = 0.0f64;
    for &a in &axis {
        for &b in &axis {
            let d14: Vec<f64> = axis
                .iter()
                .map(|&g2| Ok(duan_value(&quad_cm(a, g2, b)?, 1, 4)?.value))
                .collect::<Result<_>>()?;
            let d23: Vec<f64> = axis
                .iter()
                .map(|&g3| Ok(duan_value(&quad_cm(a, b, g3)?, 2, 3)?.value))
                .collect::<Result<_>>()?;
            spread14 = spread14.max(spread(&d14));
            spread23 = spread23.max(spread(&d23));
        }
    }

    let g1s: Vec<f64> = Axis::new(1.0, 2.0, 0.01)?.points().into_iter().filter(|&g| g > 1.0).collect();
    let entangled_sets: Vec<ModeBipartition> = ModeBipartition::all(4);
    let separable: [(&[usize], &[usize]); 5] = [(&[1], &[3]), (&[2], &[4]), (&[3], &[4]), (&[3], &[1, 4]), (&[4], &[2, 3])];
    let mut max_npt = f64::NEG_INFINITY;
    let mut min_sep = f64::INFINITY;
    let mut signs_ok = true;
    for &g1 in &g1s {
        let sigma = quad_cm(g1, 1.3, 1.1)?;
        for part in &entangled_sets {
            let r = ppt_value(&sigma, part)?;
            signs_ok &= r.entangled;
            max_npt = max_npt.max(r.value);
        }
        for (a, b) in separable {
            let mut keep: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
            keep.sort_unstable();
            let reduced = reduced_cm(&sigma, &keep)?;
            let local: Vec<usize> = a
                .iter()
                .map(|m| keep.iter().position(|k| k == m).expect("kept") + 1)
                .collect();
            let part = ModeBipartition::new(keep.len(), local)?;
            let r = ppt_value(&reduced, &part)?;
            signs_ok &= !r.entangled;
            min_sep = min_sep.min(r.value);
        }
    }

    let ok = d13_d24 < 1e-12 && spread14 < 1e-10 && spread23 < 1e-10 && signs_ok;
    Ok((
        ok,
        format!(
            "|D13 − D24| ≤ {d13_d24:e}; D14 spread in G2 {spread14:e}; D23 spread in G3 {spread23:e}; \
             max PPT over 1|3 and 2|2 cuts {max_npt:e}; min PPT over separable pairs {min_sep:e}"
        ),
    ))
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let min = v.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    max - min
}

/// Cases covered by the resonance check and their expected peak counts.
pub fn resonance_cases() -> [(DressingCase, usize); 5] {
    [
        (DressingCase::Rho2ByE1, 3),
        (DressingCase::Rho1ByE1, 2),
        (DressingCase::Rho3ByE1, 3),
        (DressingCase::Rho2ByE3, 3),
        (DressingCase::Undressed(Chain::B), 2),
    ]
}

fn resonance_agreement() -> Outcome {
    let p = AtomicParams::<f64>::defaults();
    let grid = Axis::<f64>::new(-45.0, 45.0, 0.01)?;
    let tol = (2.0 * grid.step).max(2.0 * p.gamma.g21);
    let mut ok = true;
    let mut parts = Vec::new();
    for (case, expected) in resonance_cases() {
        let analytic = analytic_resonances(case, &p)?;
        let peaks = find_peaks(case, &p, &grid)?;
        let mut case_ok = peaks.len() == expected && analytic.len() == expected;
        let mut worst = 0.0f64;
        for pk in &peaks {
            let close: Vec<f64> = analytic
                .iter()
                .map(|c| (c.delta1 - pk.delta1).abs())
                .filter(|d| *d <= tol)
                .collect();
            case_ok &= close.len() == 1;
            worst = worst.max(close.first().copied().unwrap_or(f64::INFINITY));
        }
        ok &= case_ok;
        parts.push(format!("{case}: {} peaks, worst offset {worst:.3}", peaks.len()));
    }
    Ok((ok, parts.join("; ")))
}

fn energy_conservation() -> Outcome {
    let p = AtomicParams::<f64>::defaults();
    let mut n = 0;
    for case in DressingCase::ALL {
        for ch in analytic_resonances(case, &p)? {
            n += 1;
            let ok = ch.delta2 == -ch.delta1 && ch.delta3 == ch.delta1 && ch.energy_sum() == 0.0;
            if !ok {
                return Ok((false, format!("{case} {} violates energy conservation", ch.label())));
            }
        }
    }
    Ok((true, format!("{n} channels satisfy δ2 = −δ1, δ3 = δ1, δ1 + δ2 + δ2' + δ3 = 0")))
}

fn capacity() -> Outcome {
    let c = [channel_capacity(1)?, channel_capacity(2)?, channel_capacity(3)?];
    Ok((c == [1, 8, 27], format!("capacities for 1, 2, 3 channels: {c:?}")))
}

fn oracle() -> Outcome {
    let (r1, r2) = (0.2f64, 0.2f64);
    let state = squeezed_cascade(3, DEFAULT_CUTOFF, &[(1, 2, r1), (2, 3, r2)])?;
    let fock3 = covariance_from_state(&state)?;
    let model3 = output_cm(&build_tri_transform(&GainSet::tri(r1.cosh(), r2.cosh())?)?);
    let diff3 = fock3.max_abs_diff(&model3)?;

    let (q1, q2, q3) = (0.15f64, 0.15f64, 0.15f64);
    let state = squeezed_cascade(4, DEFAULT_CUTOFF_QUAD, &[(1, 2, q1), (1, 4, q3), (2, 3, q2)])?;
    let fock4 = covariance_from_state(&state)?;
    let model4 = output_cm(&build_quad_transform(&GainSet::quad(q1.cosh(), q2.cosh(), q3.cosh())?)?);
    let diff4 = fock4.max_abs_diff(&model4)?;

    let mut duan_agree = true;
    for (f, m, n) in [(&fock3, &model3, 3usize), (&fock4, &model4, 4)] {
        for i in 1..=n {
            for j in i + 1..=n {
                duan_agree &= duan_value(f, i, j)?.entangled == duan_value(m, i, j)?.entangled;
            }
        }
    }
    Ok((
        diff3 < 1e-3 && diff4 < 1e-3 && duan_agree,
        format!("three-mode max diff {diff3:e}, four-mode max diff {diff4:e}, Duan verdicts agree: {duan_agree}"),
    ))
}
