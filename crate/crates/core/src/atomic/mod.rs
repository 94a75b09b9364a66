//! Third-order atomic coherence spectra and their coherent channels.
//!
//! All frequencies are in MHz. The detuning of the relevant signal beam is
//! tied to the quantum frequency deviation `δ1` through energy conservation:
//! `Δ_S1 = Δ1 − δ1`, `Δ_S2 = Δ1' − δ2`, `Δ_S3 = Δ3 − δ3` with `δ2 = −δ1` and
//! `δ3 = δ1`.

mod channels;
mod profile;
mod spectrum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use channels::{
    analytic_resonances, channel_capacity, deviation_tuple, find_peaks, match_channels, ChannelMatch,
    CoherentChannel, Peak,
};
pub use profile::{channel_markers, criteria_profile, gain_profile, ChannelMarker, FixedGains, GainMapping, GainPoint, ProfileRow};
pub use spectrum::{rho3_dressed, rho3_undressed, signal_detuning, spectrum, SpectrumPoint};

/// Transverse relaxation rates `Γ_ij` (MHz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationRates<T> {
    pub g31: T,
    pub g21: T,
    pub g32: T,
    pub g12: T,
    pub g23: T,
    pub g33: T,
}

impl<T: Real> RelaxationRates<T> {
    pub fn uniform(rate: T) -> Self {
        Self {
            g31: rate,
            g21: rate,
            g32: rate,
            g12: rate,
            g23: rate,
            g33: rate,
        }
    }

    fn all(&self) -> [T; 6] {
        [self.g31, self.g21, self.g32, self.g12, self.g23, self.g33]
    }

    pub fn min(&self) -> T {
        self.all().into_iter().fold(self.g31, |a, b| a.min(b))
    }

    pub fn max(&self) -> T {
        self.all().into_iter().fold(self.g31, |a, b| a.max(b))
    }
}

/// Rabi frequencies, detunings and relaxation rates (MHz).
///
/// The signal Rabi frequencies only set the overall scale of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicParams<T> {
    pub omega1: T,
    pub omega2: T,
    pub omega3: T,
    pub omega_s1: T,
    /// Falls back to `omega_s1` when absent.
    #[serde(default)]
    pub omega_s3: Option<T>,
    pub delta1: T,
    pub delta1p: T,
    pub delta3: T,
    pub delta3p: T,
    pub gamma: RelaxationRates<T>,
}

impl<T: Real> AtomicParams<T> {
    /// Δ1 = 13, Δ1' = 20, Δ3 = 5, Ω1 = 5, Ω3 = 10, every Γ = 1, unit signal
    /// Rabi frequencies.
    pub fn defaults() -> Self {
        Self {
            omega1: T::lit(5.0),
            omega2: T::one(),
            omega3: T::lit(10.0),
            omega_s1: T::one(),
            omega_s3: None,
            delta1: T::lit(13.0),
            delta1p: T::lit(20.0),
            delta3: T::lit(5.0),
            delta3p: T::lit(20.0),
            gamma: RelaxationRates::uniform(T::one()),
        }
    }

    pub fn omega_s3(&self) -> T {
        self.omega_s3.unwrap_or(self.omega_s1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.all().iter().any(|g| !(g.is_finite_value() && *g > T::zero())) {
            return Err(Error::Domain("relaxation rates must be positive and finite".into()));
        }
        let rabi = [self.omega1, self.omega2, self.omega3, self.omega_s1, self.omega_s3()];
        if rabi.iter().any(|o| !(o.is_finite_value() && *o >= T::zero())) {
            return Err(Error::Domain("Rabi frequencies must be nonnegative and finite".into()));
        }
        let det = [self.delta1, self.delta1p, self.delta3, self.delta3p];
        if det.iter().any(|d| !d.is_finite_value()) {
            return Err(Error::Domain("detunings must be finite".into()));
        }
        Ok(())
    }
}

impl Default for AtomicParams<f64> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Undressed perturbation chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chain {
    /// PA-FWM1, `ρ32(S1)`, driven via E2.
    A,
    /// PA-FWM1, `ρ31(S2)`, driven via E_S1.
    B,
    /// PA-FWM2, `ρ31(S2)`, driven via E_S3.
    C,
    /// PA-FWM2, `ρ32(S3)`, driven via E2.
    D,
}

/// Which density-matrix element is dressed, and by which field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DressingCase {
    Undressed(Chain),
    /// Second-order element `ρ21` dressed by E1.
    Rho2ByE1,
    /// First-order element `ρ31` dressed by E1.
    Rho1ByE1,
    /// Third-order element `ρ31` dressed by E1.
    Rho3ByE1,
    /// Second-order element `ρ21` dressed by E3.
    Rho2ByE3,
}

impl DressingCase {
    pub const ALL: [DressingCase; 8] = [
        DressingCase::Undressed(Chain::A),
        DressingCase::Undressed(Chain::B),
        DressingCase::Undressed(Chain::C),
        DressingCase::Undressed(Chain::D),
        DressingCase::Rho2ByE1,
        DressingCase::Rho1ByE1,
        DressingCase::Rho3ByE1,
        DressingCase::Rho2ByE3,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DressingCase::Undressed(Chain::A) => "undressed_a",
            DressingCase::Undressed(Chain::B) => "undressed_b",
            DressingCase::Undressed(Chain::C) => "undressed_c",
            DressingCase::Undressed(Chain::D) => "undressed_d",
            DressingCase::Rho2ByE1 => "dress_rho2_by_E1",
            DressingCase::Rho1ByE1 => "dress_rho1_by_E1",
            DressingCase::Rho3ByE1 => "dress_rho3_by_E1",
            DressingCase::Rho2ByE3 => "dress_rho2_by_E3",
        }
    }
}

impl fmt::Display for DressingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DressingCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "undressed" {
            return Ok(DressingCase::Undressed(Chain::B));
        }
        DressingCase::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Configuration(format!("unknown dressing case `{s}`")))
    }
}

impl Serialize for DressingCase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for DressingCase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_labels_round_trip() {
        for case in DressingCase::ALL {
            assert_eq!(case.label().parse::<DressingCase>().unwrap(), case);
        }
        assert_eq!("undressed".parse::<DressingCase>().unwrap(), DressingCase::Undressed(Chain::B));
        assert!("dress_rho4_by_E1".parse::<DressingCase>().is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = AtomicParams::<f64>::defaults();
        assert!(p.validate().is_ok());
        assert_eq!(p.omega_s3(), p.omega_s1);
        p.gamma.g23 = 0.0;
        assert!(p.validate().is_err());
        let mut p = AtomicParams::<f64>::defaults();
        p.omega1 = -1.0;
        assert!(p.validate().is_err());
        let mut p = AtomicParams::<f64>::defaults();
        p.delta3 = f64::INFINITY;
        assert!(p.validate().is_err());
    }
}
