//! Three- and four-mode cascaded squeezer transforms.
//!
//! Each parametric amplification process couples two modes as
//! `a_i → G a_i + g a_j†`, with `G = cosh r`, `g = sinh r`. On quadratures this
//! reads `X_i' = G X_i + g X_j`, `P_i' = G P_i − g P_j` (and symmetrically for
//! mode `j`). The three-mode system cascades `S(1,2; G1)` then `S(2,3; G2)`;
//! the four-mode system adds `S(1,4; G3)` acting alongside `S(2,3; G2)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{check_mode, evolve_cm, p_index, vacuum_cm, x_index, CovarianceMatrix, QuadratureTransform};
use crate::scalar::Real;

/// Number of output modes of a cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Tri,
    Quad,
}

impl System {
    pub fn n_modes(self) -> usize {
        match self {
            System::Tri => 3,
            System::Quad => 4,
        }
    }

    /// Literal transform matrix for the given gains.
    pub fn transform<T: Real>(self, gains: &GainSet<T>) -> Result<QuadratureTransform<T>> {
        match self {
            System::Tri => build_tri_transform(gains),
            System::Quad => build_quad_transform(gains),
        }
    }
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tri" => Ok(System::Tri),
            "quad" => Ok(System::Quad),
            other => Err(Error::Configuration(format!("unknown system `{other}` (tri|quad)"))),
        }
    }
}

fn check_gain<T: Real>(name: &str, g: T) -> Result<()> {
    if !g.is_finite_value() || g < T::one() {
        return Err(Error::Domain(format!("{name} = {g} must be a finite gain >= 1")));
    }
    Ok(())
}

/// `g = √(G² − 1)`, evaluated as `√((G − 1)(G + 1))`.
#[inline]
pub fn conjugate_gain<T: Real>(gain: T) -> T {
    ((gain - T::one()) * (gain + T::one())).sqrt()
}

/// Amplitude gains of the cascaded processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSet<T> {
    g1: T,
    g2: T,
    g3: Option<T>,
}

impl<T: Real> GainSet<T> {
    pub fn tri(g1: T, g2: T) -> Result<Self> {
        check_gain("G1", g1)?;
        check_gain("G2", g2)?;
        Ok(Self { g1, g2, g3: None })
    }

    pub fn quad(g1: T, g2: T, g3: T) -> Result<Self> {
        check_gain("G1", g1)?;
        check_gain("G2", g2)?;
        check_gain("G3", g3)?;
        Ok(Self { g1, g2, g3: Some(g3) })
    }

    pub fn g1(&self) -> T {
        self.g1
    }

    pub fn g2(&self) -> T {
        self.g2
    }

    pub fn g3(&self) -> Option<T> {
        self.g3
    }

    pub fn system(&self) -> System {
        if self.g3.is_some() {
            System::Quad
        } else {
            System::Tri
        }
    }

    /// Gains as a flat vector `[G1, G2(, G3)]`.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = vec![self.g1, self.g2];
        v.extend(self.g3);
        v
    }

    pub fn with_g1(&self, g1: T) -> Result<Self> {
        check_gain("G1", g1)?;
        Ok(Self { g1, ..*self })
    }

    fn require_g3(&self) -> Result<T> {
        self.g3
            .ok_or_else(|| Error::Configuration("four-mode transform needs G3".into()))
    }
}

/// Pumping strength `|κ|` and interaction time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpingParams<T> {
    pub kappa: T,
    pub t_interaction: T,
}

/// `G = cosh(κ t)`.
pub fn gain_from_interaction<T: Real>(p: &PumpingParams<T>) -> Result<T> {
    if !(p.kappa >= T::zero()) || !(p.t_interaction >= T::zero()) {
        return Err(Error::Domain(format!(
            "kappa = {} and t = {} must be nonnegative",
            p.kappa, p.t_interaction
        )));
    }
    Ok((p.kappa * p.t_interaction).cosh())
}

/// Two-mode squeezer between modes `i` and `j` (1-based) of an `n`-mode system.
pub fn two_mode_squeezer<T: Real>(n: usize, i: usize, j: usize, gain: T) -> Result<QuadratureTransform<T>> {
    check_mode(i, n)?;
    check_mode(j, n)?;
    if i == j {
        return Err(Error::InvalidMode { mode: j, n_modes: n });
    }
    check_gain("G", gain)?;
    let g = conjugate_gain(gain);
    let mut u = DMatrix::identity(2 * n, 2 * n);
    for (a, b) in [(i, j), (j, i)] {
        u[(x_index(a), x_index(a))] = gain;
        u[(x_index(a), x_index(b))] = g;
        u[(p_index(a), p_index(a))] = gain;
        u[(p_index(a), p_index(b))] = -g;
    }
    QuadratureTransform::new(u)
}

/// The 6×6 three-mode transform written out entry by entry.
pub fn build_tri_transform<T: Real>(gains: &GainSet<T>) -> Result<QuadratureTransform<T>> {
    if gains.g3.is_some() {
        return Err(Error::Configuration("three-mode transform takes no G3".into()));
    }
    let (big1, big2) = (gains.g1, gains.g2);
    let (g1, g2) = (conjugate_gain(big1), conjugate_gain(big2));
    let z = T::zero();
    #[rustfmt::skip]
    let rows = [
        big1,      z,          g1,          z,           z,    z,
        z,         big1,       z,           -g1,         z,    z,
        g1 * big2, z,          big1 * big2, z,           g2,   z,
        z,         -g1 * big2, z,           big1 * big2, z,    -g2,
        g1 * g2,   z,          big1 * g2,   z,           big2, z,
        z,         g1 * g2,    z,           -big1 * g2,  z,    big2,
    ];
    QuadratureTransform::new(DMatrix::from_row_slice(6, 6, &rows))
}

/// `S(2,3; G2) · S(1,2; G1)`.
pub fn tri_cascade<T: Real>(gains: &GainSet<T>) -> Result<QuadratureTransform<T>> {
    let first = two_mode_squeezer(3, 1, 2, gains.g1)?;
    let second = two_mode_squeezer(3, 2, 3, gains.g2)?;
    QuadratureTransform::cascade([&first, &second])
}

/// The 8×8 four-mode transform written out entry by entry.
pub fn build_quad_transform<T: Real>(gains: &GainSet<T>) -> Result<QuadratureTransform<T>> {
    let big3 = gains.require_g3()?;
    let (big1, big2) = (gains.g1, gains.g2);
    let (g1, g2, g3) = (conjugate_gain(big1), conjugate_gain(big2), conjugate_gain(big3));
    let z = T::zero();
    #[rustfmt::skip]
    let rows = [
        big1 * big3, z,           g1 * big3,   z,           z,    z,    g3,   z,
        z,           big1 * big3, z,           -g1 * big3,  z,    z,    z,    -g3,
        g1 * big2,   z,           big1 * big2, z,           g2,   z,    z,    z,
        z,           -g1 * big2,  z,           big1 * big2, z,    -g2,  z,    z,
        g1 * g2,     z,           big1 * g2,   z,           big2, z,    z,    z,
        z,           g1 * g2,     z,           -big1 * g2,  z,    big2, z,    z,
        big1 * g3,   z,           g1 * g3,     z,           z,    z,    big3, z,
        z,           -big1 * g3,  z,           g1 * g3,     z,    z,    z,    big3,
    ];
    QuadratureTransform::new(DMatrix::from_row_slice(8, 8, &rows))
}

/// `[S(2,3; G2) · S(1,4; G3)] · S(1,2; G1)`.
pub fn quad_cascade<T: Real>(gains: &GainSet<T>) -> Result<QuadratureTransform<T>> {
    let big3 = gains.require_g3()?;
    let s12 = two_mode_squeezer(4, 1, 2, gains.g1)?;
    let s14 = two_mode_squeezer(4, 1, 4, big3)?;
    let s23 = two_mode_squeezer(4, 2, 3, gains.g2)?;
    QuadratureTransform::cascade([&s12, &s14, &s23])
}

/// `σ = U Uᵀ` for vacuum (or coherent) inputs.
pub fn output_cm<T: Real>(u: &QuadratureTransform<T>) -> CovarianceMatrix<T> {
    let vac = vacuum_cm(u.n_modes()).expect("transform has at least one mode");
    evolve_cm(u, &vac).expect("matching dimensions")
}
