//! Deterministic criterion sweeps over gain grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::delc::{output_cm, GainSet, System};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inclusive uniform axis `start, start + step, ..., stop`.
///
/// Points are computed as `start + k * step` so no rounding accumulates; the
/// last point is clamped to `stop` when it lands within `1e-9 * step` of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis<T> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl<T: Real> Axis<T> {
    pub fn new(start: T, stop: T, step: T) -> Result<Self> {
        let axis = Self { start, stop, step };
        axis.validate()?;
        Ok(axis)
    }

    pub fn fixed(value: T) -> Self {
        Self {
            start: value,
            stop: value,
            step: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite_value() && self.stop.is_finite_value() && self.step.is_finite_value()) {
            return Err(Error::EmptyGrid("axis bounds must be finite".into()));
        }
        if !(self.step > T::zero()) {
            return Err(Error::EmptyGrid(format!("step {} must be positive", self.step)));
        }
        if self.stop < self.start {
            return Err(Error::EmptyGrid(format!(
                "stop {} lies below start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let span = (self.stop - self.start) / self.step;
        let n = (span + T::lit(1e-9)).floor();
        n.to_f64_lossy() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let x = self.start + self.step * T::from_usize(k).expect("index fits");
                if k + 1 == n && (x - self.stop).abs() <= self.step * T::lit(1e-9) {
                    self.stop
                } else {
                    x
                }
            })
            .collect()
    }
}

/// Gain grid for a cascade; `g3` is required for the four-mode system only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainGrid<T> {
    pub system: System,
    pub g1: Axis<T>,
    pub g2: Axis<T>,
    pub g3: Option<Axis<T>>,
}

impl<T: Real> GainGrid<T> {
    /// Gain sets in lexicographic order `(G1, G2, G3)`.
    pub fn gain_sets(&self) -> Result<Vec<GainSet<T>>> {
        self.g1.validate()?;
        self.g2.validate()?;
        let g1s = self.g1.points();
        let g2s = self.g2.points();
        let mut out = Vec::new();
        match self.system {
            System::Tri => {
                if self.g3.is_some() {
                    return Err(Error::Configuration("three-mode grid takes no G3 axis".into()));
                }
                for &a in &g1s {
                    for &b in &g2s {
                        out.push(GainSet::tri(a, b)?);
                    }
                }
            }
            System::Quad => {
                let g3 = self
                    .g3
                    .ok_or_else(|| Error::Configuration("four-mode grid needs a G3 axis".into()))?;
                g3.validate()?;
                let g3s = g3.points();
                for &a in &g1s {
                    for &b in &g2s {
                        for &c in &g3s {
                            out.push(GainSet::quad(a, b, c)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub gains: GainSet<T>,
    pub criterion: Criterion,
    pub value: T,
    pub entangled: bool,
}

/// Evaluates every criterion at every grid point.
///
/// Rows are ordered by grid point, then by criterion label. The order does
/// not depend on `parallel`.
pub fn sweep_criteria<T: Real>(
    grid: &GainGrid<T>,
    criteria: &[Criterion],
    parallel: bool,
) -> Result<Vec<SweepRow<T>>> {
    if criteria.is_empty() {
        return Err(Error::EmptyGrid("no criteria requested".into()));
    }
    let n = grid.system.n_modes();
    let mut sorted: Vec<&Criterion> = criteria.iter().collect();
    sorted.sort_by_key(|c| c.label());
    sorted.dedup();
    if let Some(c) = sorted.iter().find(|c| c.max_mode() > n) {
        return Err(Error::UnknownCriterion(format!(
            "{c} refers to a mode outside the {n}-mode system"
        )));
    }
    let points = grid.gain_sets()?;

    let eval = |gains: &GainSet<T>| -> Result<Vec<SweepRow<T>>> {
        let sigma = output_cm(&grid.system.transform(gains)?);
        sorted
            .iter()
            .map(|c| {
                let (value, entangled) = c.evaluate(&sigma)?;
                Ok(SweepRow {
                    gains: *gains,
                    criterion: (*c).clone(),
                    value,
                    entangled,
                })
            })
            .collect()
    };

    let chunks: Vec<Vec<SweepRow<T>>> = if parallel {
        points.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        points.iter().map(eval).collect::<Result<_>>()?
    };
    Ok(chunks.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delc::build_tri_transform;

    #[test]
    fn axis_points_are_inclusive() {
        let a = Axis::new(1.0f64, 3.0, 0.02).unwrap();
        let p = a.points();
        assert_eq!(p.len(), 101);
        assert_eq!(p[0], 1.0);
        assert_eq!(*p.last().unwrap(), 3.0);
        assert_eq!(Axis::fixed(1.1f64).points(), vec![1.1]);
        assert_eq!(Axis::new(1.0f64, 2.0, 0.3).unwrap().points().len(), 4);
    }

    #[test]
    fn axis_rejects_empty() {
        assert!(matches!(Axis::new(2.0f64, 1.0, 0.1), Err(Error::EmptyGrid(_))));
        assert!(matches!(Axis::new(1.0f64, 2.0, 0.0), Err(Error::EmptyGrid(_))));
        assert!(matches!(Axis::new(1.0f64, f64::NAN, 0.1), Err(Error::EmptyGrid(_))));
    }

    #[test]
    fn single_point_sweep_matches_direct_evaluation() {
        let grid = GainGrid {
            system: System::Tri,
            g1: Axis::fixed(1.2f64),
            g2: Axis::fixed(1.3),
            g3: None,
        };
        let criteria: Vec<Criterion> = ["PPT1|23", "D13", "D12"].iter().map(|s| s.parse().unwrap()).collect();
        let rows = sweep_criteria(&grid, &criteria, false).unwrap();
        let labels: Vec<String> = rows.iter().map(|r| r.criterion.label()).collect();
        assert_eq!(labels, ["D12", "D13", "PPT1|23"]);
        let sigma = output_cm(&build_tri_transform(&GainSet::tri(1.2, 1.3).unwrap()).unwrap());
        for r in &rows {
            assert_eq!(r.value, r.criterion.evaluate(&sigma).unwrap().0);
        }
    }

    #[test]
    fn d13_above_bound_except_origin() {
        let axis = Axis::new(1.0f64, 3.0, 0.05).unwrap();
        let grid = GainGrid { system: System::Tri, g1: axis, g2: axis, g3: None };
        let rows = sweep_criteria(&grid, &["D13".parse().unwrap()], true).unwrap();
        for r in rows {
            if r.gains.g1() == 1.0 && r.gains.g2() == 1.0 {
                assert!((r.value - 4.0).abs() < 1e-12);
            } else if r.gains.g1() > 1.0 && r.gains.g2() > 1.0 {
                assert!(r.value > 4.0);
            }
        }
    }

    #[test]
    fn parallel_and_serial_agree() {
        let grid = GainGrid {
            system: System::Quad,
            g1: Axis::new(1.0f64, 1.5, 0.1).unwrap(),
            g2: Axis::fixed(1.3),
            g3: Some(Axis::new(1.0, 1.2, 0.1).unwrap()),
        };
        let criteria: Vec<Criterion> = ["D34", "PPT12|34", "PPT3|14"].iter().map(|s| s.parse().unwrap()).collect();
        let a = sweep_criteria(&grid, &criteria, false).unwrap();
        let b = sweep_criteria(&grid, &criteria, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6 * 3 * 3);
    }

    #[test]
    fn sweep_errors() {
        let grid = GainGrid { system: System::Tri, g1: Axis::fixed(1.1f64), g2: Axis::fixed(1.1), g3: None };
        assert!(sweep_criteria(&grid, &[], false).is_err());
        assert!(matches!(
            sweep_criteria(&grid, &["D14".parse().unwrap()], false),
            Err(Error::UnknownCriterion(_))
        ));
        let quad = GainGrid { system: System::Quad, ..grid };
        assert!(matches!(
            sweep_criteria(&quad, &["D12".parse().unwrap()], false),
            Err(Error::Configuration(_))
        ));
        let below = GainGrid { g1: Axis::fixed(0.5), ..grid };
        assert!(matches!(sweep_criteria(&below, &["D12".parse().unwrap()], false), Err(Error::Domain(_))));
    }
}
