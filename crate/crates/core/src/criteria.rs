//! Duan and PPT entanglement criteria, their closed forms for the cascades,
//! and the three-mode region classification.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::delc::{conjugate_gain, GainSet};
use crate::error::{Error, Result};
use crate::gaussian::{check_mode, partial_transpose, symplectic_eigenvalues, CovarianceMatrix, ModeBipartition};
use crate::scalar::Real;

/// Separable two-mode states satisfy `D_ij >= 4`.
pub const DUAN_BOUND: f64 = 4.0;

/// Magnitude below which a PPT value is indistinguishable from zero.
///
/// Several bipartitions (e.g. `3|{1,4}` in the four-mode state) have a
/// partially transposed symplectic eigenvalue of exactly one; the eigen-solver
/// returns it with an error of order 1e-15 of either sign.
pub const PPT_NUMERICAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuanResult<T> {
    pub mode_i: usize,
    pub mode_j: usize,
    pub value: T,
    pub entangled: bool,
}

/// `V(X_i − X_j) + V(P_i + P_j)` read off the covariance matrix.
pub fn duan_value<T: Real>(sigma: &CovarianceMatrix<T>, i: usize, j: usize) -> Result<DuanResult<T>> {
    let n = sigma.n_modes();
    check_mode(i, n)?;
    check_mode(j, n)?;
    if i == j {
        return Err(Error::InvalidMode { mode: j, n_modes: n });
    }
    let two = T::lit(2.0);
    let var_x = sigma.xx(i, i) + sigma.xx(j, j) - two * sigma.xx(i, j);
    let var_p = sigma.pp(i, i) + sigma.pp(j, j) + two * sigma.pp(i, j);
    let value = var_x + var_p;
    Ok(DuanResult {
        mode_i: i,
        mode_j: j,
        value,
        entangled: value < T::lit(DUAN_BOUND),
    })
}

macro_rules! pair_enum {
    ($name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }

            /// 1-based modes of the pair.
            pub fn modes(self) -> (usize, usize) {
                let b = self.label().as_bytes();
                ((b[0] - b'0') as usize, (b[1] - b'0') as usize)
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let s = s.strip_prefix('D').unwrap_or(s);
                match s {
                    $($label => Ok($name::$variant),)+
                    other => Err(Error::UnknownCriterion(other.to_string())),
                }
            }
        }
    };
}

pair_enum!(TriPair { P12 => "12", P13 => "13", P23 => "23" });
pair_enum!(QuadPair {
    P12 => "12",
    P13 => "13",
    P14 => "14",
    P23 => "23",
    P24 => "24",
    P34 => "34",
});

/// Closed-form three-mode Duan values.
pub fn duan_tri_closed<T: Real>(gains: &GainSet<T>, pair: TriPair) -> T {
    let (big1, big2) = (gains.g1(), gains.g2());
    let (one, two, four) = (T::one(), T::lit(2.0), T::lit(4.0));
    let (a, b) = (big1 * big1, big2 * big2);
    match pair {
        TriPair::P12 => four * (a * (b + one) - two * big1 * big2 * conjugate_gain(big1) - one),
        TriPair::P13 => four * a * b,
        TriPair::P23 => -four * a * (two * big2 * conjugate_gain(big2) - two * b + one),
    }
}

/// Closed-form four-mode Duan values; `D24` coincides with `D13`.
pub fn duan_quad_closed<T: Real>(gains: &GainSet<T>, pair: QuadPair) -> Result<T> {
    let big3 = gains
        .g3()
        .ok_or_else(|| Error::Configuration("four-mode closed forms need G3".into()))?;
    let (big1, big2) = (gains.g1(), gains.g2());
    let (one, two, four) = (T::one(), T::lit(2.0), T::lit(4.0));
    let (a, b, c) = (big1 * big1, big2 * big2, big3 * big3);
    let (g1, g2, g3) = (conjugate_gain(big1), conjugate_gain(big2), conjugate_gain(big3));
    Ok(match pair {
        QuadPair::P12 => four * (a * b + a * c - two * big1 * big2 * big3 * g1 - one),
        QuadPair::P13 | QuadPair::P24 => four * a * (b + c - one),
        QuadPair::P14 => four * a * (two * c - two * big3 * g3 - one),
        QuadPair::P23 => four * a * (two * b - two * big2 * g2 - one),
        QuadPair::P34 => four * (-two * a + a * b + a * c - two * big1 * g1 * g2 * g3 + one),
    })
}

/// Whether a PPT violation is a complete characterization for the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    NecessaryAndSufficient,
    SufficientOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptResult<T> {
    #[serde(serialize_with = "serialize_display")]
    pub bipartition: ModeBipartition,
    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub nu_min: T,
    /// `nu_min − 1`; negative values certify entanglement.
    pub value: T,
    pub entangled: bool,
    pub sufficiency: Sufficiency,
}

fn serialize_display<S: serde::Serializer, D: fmt::Display>(v: &D, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ppt_value<T: Real>(sigma: &CovarianceMatrix<T>, part: &ModeBipartition) -> Result<PptResult<T>> {
    let transposed = partial_transpose(sigma, part)?;
    let nu_min = symplectic_eigenvalues(&transposed)?.min();
    let value = nu_min - T::one();
    Ok(PptResult {
        bipartition: part.clone(),
        nu_min,
        value,
        entangled: value < -T::tolerance(PPT_NUMERICAL_FLOOR),
        sufficiency: if part.is_one_versus_rest() {
            Sufficiency::NecessaryAndSufficient
        } else {
            Sufficiency::SufficientOnly
        },
    })
}

/// Covariance matrix of the subsystem `modes`, the rest traced out.
pub fn reduced_cm<T: Real>(sigma: &CovarianceMatrix<T>, modes: &[usize]) -> Result<CovarianceMatrix<T>> {
    sigma.submatrix(modes)
}

/// Three-mode Duan regions: I (only D12 < 4), II (only D23 < 4), III (both).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    I,
    II,
    III,
    None,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::None => "none",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify_tri_region<T: Real>(gains: &GainSet<T>) -> Region {
    let bound = T::lit(DUAN_BOUND);
    let d12 = duan_tri_closed(gains, TriPair::P12) < bound;
    let d23 = duan_tri_closed(gains, TriPair::P23) < bound;
    match (d12, d23) {
        (true, false) => Region::I,
        (false, true) => Region::II,
        (true, true) => Region::III,
        (false, false) => Region::None,
    }
}

/// A named criterion that can be evaluated on any covariance matrix with
/// enough modes.
///
/// Labels: `D12` is the Duan value of modes 1 and 2; `PPT1|23` is the PPT value
/// of `{1}` against `{2,3}`, evaluated on the reduced state of the listed modes.
/// Mode lists may be written with `.` separators (`PPT1.10|2`) for n > 9.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Duan { i: usize, j: usize },
    Ppt { a: BTreeSet<usize>, b: BTreeSet<usize> },
}

fn parse_modes(s: &str) -> Option<Vec<usize>> {
    if s.is_empty() {
        return None;
    }
    if s.contains('.') {
        s.split('.').map(|t| t.parse().ok()).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
    }
}

fn format_modes<'a, I: IntoIterator<Item = &'a usize>>(modes: I) -> String {
    let modes: Vec<usize> = modes.into_iter().copied().collect();
    if modes.iter().all(|&m| m < 10) {
        modes.iter().map(|m| m.to_string()).collect()
    } else {
        modes.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl Criterion {
    pub fn duan(i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i == j {
            return Err(Error::UnknownCriterion(format!("D{i}{j}")));
        }
        Ok(Criterion::Duan { i, j })
    }

    pub fn ppt<A, B>(a: A, b: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        let a: BTreeSet<usize> = a.into_iter().collect();
        let b: BTreeSet<usize> = b.into_iter().collect();
        if a.is_empty() || b.is_empty() || !a.is_disjoint(&b) || a.contains(&0) || b.contains(&0) {
            return Err(Error::UnknownCriterion(format!(
                "PPT{}|{}",
                format_modes(&a),
                format_modes(&b)
            )));
        }
        Ok(Criterion::Ppt { a, b })
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn max_mode(&self) -> usize {
        match self {
            Criterion::Duan { i, j } => *i.max(j),
            Criterion::Ppt { a, b } => *a.iter().chain(b.iter()).max().expect("nonempty"),
        }
    }

    /// Evaluates the criterion; returns `(value, entangled)`.
    pub fn evaluate<T: Real>(&self, sigma: &CovarianceMatrix<T>) -> Result<(T, bool)> {
        match self {
            Criterion::Duan { i, j } => {
                let r = duan_value(sigma, *i, *j)?;
                Ok((r.value, r.entangled))
            }
            Criterion::Ppt { .. } => {
                let r = self.evaluate_ppt(sigma)?;
                Ok((r.value, r.entangled))
            }
        }
    }

    /// Full PPT result; the bipartition is expressed on the reduced state.
    pub fn evaluate_ppt<T: Real>(&self, sigma: &CovarianceMatrix<T>) -> Result<PptResult<T>> {
        let Criterion::Ppt { a, b } = self else {
            return Err(Error::UnknownCriterion(format!("{self} is not a PPT criterion")));
        };
        let n = sigma.n_modes();
        for &m in a.iter().chain(b.iter()) {
            check_mode(m, n)?;
        }
        let kept: Vec<usize> = a.union(b).copied().collect();
        if kept.len() == n {
            let part = ModeBipartition::new(n, a.iter().copied())?;
            return ppt_value(sigma, &part);
        }
        let reduced = reduced_cm(sigma, &kept)?;
        let local_a = kept
            .iter()
            .enumerate()
            .filter(|(_, m)| a.contains(m))
            .map(|(k, _)| k + 1);
        let part = ModeBipartition::new(kept.len(), local_a)?;
        ppt_value(&reduced, &part)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Duan { i, j } => write!(f, "D{}", format_modes([i, j])),
            Criterion::Ppt { a, b } => write!(f, "PPT{}|{}", format_modes(a), format_modes(b)),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownCriterion(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("PPT") {
            let (a, b) = rest.split_once('|').ok_or_else(bad)?;
            let a = parse_modes(a).ok_or_else(bad)?;
            let b = parse_modes(b).ok_or_else(bad)?;
            Criterion::ppt(a, b).map_err(|_| bad())
        } else if let Some(rest) = s.strip_prefix('D') {
            let modes = parse_modes(rest).ok_or_else(bad)?;
            match modes.as_slice() {
                [i, j] => Criterion::duan(*i, *j).map_err(|_| bad()),
                _ => Err(bad()),
            }
        } else {
            Err(bad())
        }
    }
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
