use num_complex::Complex;

use super::{AtomicParams, Chain, DressingCase};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sweep::Axis;

#[inline]
fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

fn modulus<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

fn checked_div<T: Real>(num: Complex<T>, den: Complex<T>, what: &str) -> Result<Complex<T>> {
    let m = modulus(den);
    if !(m > T::zero()) || !m.is_finite_value() {
        return Err(Error::Singular(what.to_string()));
    }
    Ok(num / den)
}

/// `−i · numerator / (d · d' · d'')`.
fn third_order<T: Real>(numerator: T, factors: [Complex<T>; 3], what: &str) -> Result<Complex<T>> {
    let den = factors[0] * factors[1] * factors[2];
    checked_div(c(T::zero(), -numerator), den, what)
}

/// Detuning of the signal beam that drives the second step of `chain`, given
/// the deviation `δ1`.
pub fn signal_detuning<T: Real>(chain: Chain, p: &AtomicParams<T>, delta1: T) -> T {
    match chain {
        // Δ_S2 = Δ1' − δ2 with δ2 = −δ1.
        Chain::A | Chain::D => p.delta1p + delta1,
        // Δ_S1 = Δ1 − δ1.
        Chain::B => p.delta1 - delta1,
        // Δ_S3 = Δ3 − δ3 with δ3 = δ1.
        Chain::C => p.delta3 - delta1,
    }
}

/// Undressed third-order element for one perturbation chain, as a function of
/// the signal detuning that chain depends on.
pub fn rho3_undressed<T: Real>(chain: Chain, p: &AtomicParams<T>, signal_detuning: T) -> Result<Complex<T>> {
    let g = &p.gamma;
    let o1 = p.omega1;
    match chain {
        Chain::A => {
            let d32 = c(g.g32, p.delta1p);
            let d12 = c(g.g12, p.delta1p - signal_detuning);
            let d32p = c(g.g32, p.delta1p - signal_detuning + p.delta1);
            third_order(o1 * o1 * p.omega2, [d32, d12, d32p], "undressed chain a")
        }
        Chain::B => {
            let d31 = c(g.g31, p.delta1);
            let d21 = c(g.g21, p.delta1 - signal_detuning);
            let d31p = c(g.g31, p.delta1 - signal_detuning + p.delta1p);
            third_order(o1 * o1 * p.omega_s1, [d31, d21, d31p], "undressed chain b")
        }
        Chain::C => {
            let d31 = c(g.g31, p.delta3);
            let d21 = c(g.g21, p.delta3 - signal_detuning);
            let d31p = c(g.g31, p.delta3 - signal_detuning + p.delta1p);
            third_order(o1 * p.omega3 * p.omega_s3(), [d31, d21, d31p], "undressed chain c")
        }
        Chain::D => {
            let d32 = c(g.g32, p.delta1p);
            let d12 = c(g.g12, p.delta1p - signal_detuning);
            let d32p = c(g.g32, p.delta1p - signal_detuning + p.delta3);
            third_order(o1 * p.omega2 * p.omega3, [d32, d12, d32p], "undressed chain d")
        }
    }
}

/// Third-order element of `case` at deviation `δ1`.
pub fn rho3_dressed<T: Real>(case: DressingCase, p: &AtomicParams<T>, delta1: T) -> Result<Complex<T>> {
    let g = &p.gamma;
    let o1sq = p.omega1 * p.omega1;
    let numerator = o1sq * p.omega_s1;
    let outer = c(g.g31, p.delta1);
    let middle = c(g.g21, delta1);
    let inner = c(g.g31, delta1 + p.delta1p);
    let dress = |rabi_sq: T, den: Complex<T>, what: &str| checked_div(c(rabi_sq, T::zero()), den, what);
    match case {
        DressingCase::Undressed(chain) => rho3_undressed(chain, p, signal_detuning(chain, p, delta1)),
        DressingCase::Rho2ByE1 => {
            let term = dress(o1sq, c(g.g23, delta1 - p.delta1), "E1 dressing of rho2")?;
            third_order(numerator, [outer, middle + term, inner], "rho2 dressed by E1")
        }
        DressingCase::Rho1ByE1 => {
            let term = dress(o1sq, c(g.g33, T::zero()), "E1 dressing of rho1")?;
            third_order(numerator, [outer + term, middle, inner], "rho1 dressed by E1")
        }
        DressingCase::Rho3ByE1 => {
            let term = dress(o1sq, c(g.g33, delta1 + p.delta1p - p.delta1), "E1 dressing of rho3")?;
            third_order(numerator, [outer, middle, inner + term], "rho3 dressed by E1")
        }
        DressingCase::Rho2ByE3 => {
            let term = dress(p.omega3 * p.omega3, c(g.g23, delta1 - p.delta3), "E3 dressing of rho2")?;
            third_order(numerator, [outer, middle + term, inner], "rho2 dressed by E3")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    pub delta1: T,
    pub value: Complex<T>,
    pub abs: T,
    /// `abs` divided by the largest `abs` on the grid.
    pub normalized: T,
}

/// `ρ(δ1)` over a grid, with the modulus max-normalized per curve.
pub fn spectrum<T: Real>(case: DressingCase, p: &AtomicParams<T>, grid: &Axis<T>) -> Result<Vec<SpectrumPoint<T>>> {
    grid.validate()?;
    let mut points = grid
        .points()
        .into_iter()
        .map(|d| {
            let value = rho3_dressed(case, p, d)?;
            Ok(SpectrumPoint {
                delta1: d,
                value,
                abs: modulus(value),
                normalized: T::zero(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let peak = points.iter().fold(T::zero(), |m, s| m.max(s.abs));
    if !(peak > T::zero()) {
        return Err(Error::Normalization);
    }
    for s in &mut points {
        s.normalized = s.abs / peak;
    }
    Ok(points)
}
