use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channels::analytic_resonances;
use super::spectrum::{rho3_dressed, spectrum};
use super::{AtomicParams, DressingCase};
use crate::criteria::Criterion;
use crate::delc::{output_cm, GainSet, System};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sweep::Axis;

/// `G1(δ1) = cosh(amplitude · |ρ(δ1)| / max|ρ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainMapping<T> {
    pub amplitude: T,
}

impl<T: Real> GainMapping<T> {
    pub fn new(amplitude: T) -> Result<Self> {
        let m = Self { amplitude };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite_value() && self.amplitude >= T::zero()) {
            return Err(Error::Domain("gain amplitude must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn gain(&self, normalized: T) -> T {
        (self.amplitude * normalized).cosh()
    }
}

impl<T: Real> Default for GainMapping<T> {
    fn default() -> Self {
        Self { amplitude: T::one() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainPoint<T> {
    pub delta1: T,
    pub g1: T,
}

/// Dressing-modulated gain of the first squeezer over a `δ1` grid.
pub fn gain_profile<T: Real>(
    case: DressingCase,
    p: &AtomicParams<T>,
    grid: &Axis<T>,
    mapping: &GainMapping<T>,
) -> Result<Vec<GainPoint<T>>> {
    mapping.validate()?;
    p.validate()?;
    Ok(spectrum(case, p, grid)?
        .into_iter()
        .map(|s| GainPoint {
            delta1: s.delta1,
            g1: mapping.gain(s.normalized).max(T::one()),
        })
        .collect())
}

/// Gains of the squeezers that are not modulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedGains<T> {
    pub g2: T,
    #[serde(default)]
    pub g3: Option<T>,
}

impl<T: Real> FixedGains<T> {
    fn gain_set(&self, system: System, g1: T) -> Result<GainSet<T>> {
        match (system, self.g3) {
            (System::Tri, None) => GainSet::tri(g1, self.g2),
            (System::Quad, Some(g3)) => GainSet::quad(g1, self.g2, g3),
            (System::Tri, Some(_)) => Err(Error::Configuration("three-mode profile takes no G3".into())),
            (System::Quad, None) => Err(Error::Configuration("four-mode profile needs G3".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow<T> {
    pub delta1: T,
    pub g1: T,
    pub criterion: Criterion,
    pub value: T,
    pub entangled: bool,
}

/// Criteria evaluated along the gain profile.
///
/// Rows are ordered by `δ1`, then by criterion label, whatever `parallel` is.
#[allow(clippy::too_many_arguments)]
pub fn criteria_profile<T: Real>(
    system: System,
    case: DressingCase,
    p: &AtomicParams<T>,
    grid: &Axis<T>,
    mapping: &GainMapping<T>,
    fixed: &FixedGains<T>,
    criteria: &[Criterion],
    parallel: bool,
) -> Result<Vec<ProfileRow<T>>> {
    if criteria.is_empty() {
        return Err(Error::EmptyGrid("no criteria requested".into()));
    }
    let n = system.n_modes();
    let mut sorted: Vec<&Criterion> = criteria.iter().collect();
    sorted.sort_by_key(|c| c.label());
    sorted.dedup();
    if let Some(c) = sorted.iter().find(|c| c.max_mode() > n) {
        return Err(Error::UnknownCriterion(format!(
            "{c} refers to a mode outside the {n}-mode system"
        )));
    }
    // Validate the fixed gains once, before the sweep.
    fixed.gain_set(system, T::one())?;
    let gains = gain_profile(case, p, grid, mapping)?;

    let eval = |point: &GainPoint<T>| -> Result<Vec<ProfileRow<T>>> {
        let set = fixed.gain_set(system, point.g1)?;
        let sigma = output_cm(&system.transform(&set)?);
        sorted
            .iter()
            .map(|c| {
                let (value, entangled) = c.evaluate(&sigma)?;
                Ok(ProfileRow {
                    delta1: point.delta1,
                    g1: point.g1,
                    criterion: (*c).clone(),
                    value,
                    entangled,
                })
            })
            .collect()
    };
    let chunks: Vec<Vec<ProfileRow<T>>> = if parallel {
        gains.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        gains.iter().map(eval).collect::<Result<_>>()?
    };
    Ok(chunks.into_iter().flatten().collect())
}

/// Analytic channel position annotated with the mapped gain there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelMarker<T> {
    pub label: String,
    pub delta1: T,
    pub g1: T,
}

/// Channel markers for a profile, normalized against the same grid maximum
/// as [`gain_profile`].
pub fn channel_markers<T: Real>(
    case: DressingCase,
    p: &AtomicParams<T>,
    grid: &Axis<T>,
    mapping: &GainMapping<T>,
) -> Result<Vec<ChannelMarker<T>>> {
    mapping.validate()?;
    let peak = spectrum(case, p, grid)?
        .into_iter()
        .fold(T::zero(), |m, s| m.max(s.abs));
    analytic_resonances(case, p)?
        .into_iter()
        .map(|ch| {
            let raw = rho3_dressed(case, p, ch.delta1)?;
            let abs = (raw.re * raw.re + raw.im * raw.im).sqrt();
            Ok(ChannelMarker {
                label: ch.label(),
                delta1: ch.delta1,
                g1: mapping.gain((abs / peak).min(T::one())),
            })
        })
        .collect()
}
