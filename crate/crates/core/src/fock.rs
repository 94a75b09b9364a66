//! Brute-force number-state simulation of cascaded two-mode squeezers.
//!
//! Used only to cross-check the Gaussian model at small squeezing.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::scalar::Real;

/// Largest boundary-shell population an evolution may leave behind.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

/// Smallest supported number of levels per mode.
pub const MIN_CUTOFF: usize = 4;

/// Default levels per mode for two- and three-mode simulations.
pub const DEFAULT_CUTOFF: usize = 12;

/// Default levels per mode for four-mode simulations.
pub const DEFAULT_CUTOFF_QUAD: usize = 8;

/// Largest `h·‖K‖` bound used for a single Taylor step.
const STEP_BOUND: f64 = 0.5;

/// Pure state on `n_modes` modes, each truncated to photon numbers
/// `0..cutoff`.
///
/// Amplitudes are stored row-major with mode 1 as the slowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState<T> {
    n_modes: usize,
    cutoff: usize,
    amplitudes: Vec<Complex<T>>,
    leakage: T,
}

impl<T: Real> TruncatedState<T> {
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidDimension("state needs at least one mode".into()));
        }
        if cutoff < MIN_CUTOFF {
            return Err(Error::Domain(format!("cutoff {cutoff} is below {MIN_CUTOFF}")));
        }
        let len = cutoff
            .checked_pow(n_modes as u32)
            .filter(|&l| l <= 1 << 24)
            .ok_or_else(|| Error::InvalidDimension(format!("{cutoff}^{n_modes} amplitudes is too many")))?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); len];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_modes,
            cutoff,
            amplitudes,
            leakage: T::zero(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Population found in the top level of any mode after the last
    /// evolution, an estimate of the probability lost to truncation.
    pub fn leakage(&self) -> T {
        self.leakage
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }

    /// Population of the boundary shell, where at least one mode sits at the
    /// highest retained level.
    pub fn boundary_population(&self) -> T {
        let top = self.cutoff - 1;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| (1..=self.n_modes).any(|m| self.level(*idx, m) == top))
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr())
    }

    /// `⟨n_mode⟩`, 1-based mode.
    pub fn mean_photon_number(&self, mode: usize) -> Result<T> {
        self.check_mode(mode)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (idx, a)| {
                acc + a.norm_sqr() * T::from_usize(self.level(idx, mode)).expect("small level")
            }))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.n_modes {
            return Err(Error::InvalidMode {
                mode,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.n_modes - mode) as u32)
    }

    fn level(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % self.cutoff
    }

    /// `out += scale · (a_i† a_j† − a_i a_j) v`.
    fn apply_generator(&self, i: usize, j: usize, v: &[Complex<T>], scale: T, out: &mut [Complex<T>]) {
        let (si, sj) = (self.stride(i), self.stride(j));
        let top = self.cutoff - 1;
        for (idx, amp) in v.iter().enumerate() {
            if amp.re == T::zero() && amp.im == T::zero() {
                continue;
            }
            let (ni, nj) = (self.level(idx, i), self.level(idx, j));
            if ni < top && nj < top {
                let c = T::from_usize((ni + 1) * (nj + 1)).expect("small level").sqrt() * scale;
                out[idx + si + sj] += *amp * c;
            }
            if ni > 0 && nj > 0 {
                let c = T::from_usize(ni * nj).expect("small level").sqrt() * scale;
                out[idx - si - sj] -= *amp * c;
            }
        }
    }

    /// `a_mode v`.
    fn lower(&self, mode: usize, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let s = self.stride(mode);
        let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
        for (idx, amp) in v.iter().enumerate() {
            let n = self.level(idx, mode);
            if n > 0 {
                out[idx - s] = *amp * T::from_usize(n).expect("small level").sqrt();
            }
        }
        out
    }
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * *y)
}

/// Applies `exp[r (a_i† a_j† − a_i a_j)]`.
///
/// The truncated generator is real antisymmetric, so the norm is preserved up
/// to rounding. Any population reaching the top level signals that the
/// truncation distorts the state; more than [`LEAKAGE_THRESHOLD`] is an error.
pub fn evolve_tms<T: Real>(state: &TruncatedState<T>, i: usize, j: usize, r: T) -> Result<TruncatedState<T>> {
    state.check_mode(i)?;
    state.check_mode(j)?;
    if i == j {
        return Err(Error::InvalidMode {
            mode: j,
            n_modes: state.n_modes,
        });
    }
    if !r.is_finite_value() {
        return Err(Error::Domain("squeezing parameter must be finite".into()));
    }
    let mut out = state.clone();
    if r == T::zero() {
        return Ok(out);
    }

    // ‖a_i† a_j† − a_i a_j‖ ≤ 2·(cutoff − 1).
    let bound = T::from_usize(2 * state.cutoff).expect("small cutoff") * r.abs();
    let steps = (bound / T::lit(STEP_BOUND)).ceil().to_f64_lossy().max(1.0) as usize;
    let h = r / T::from_usize(steps).expect("step count");
    let tiny = T::default_epsilon() * T::lit(1e-2);

    let mut v = out.amplitudes.clone();
    let mut term = vec![Complex::new(T::zero(), T::zero()); v.len()];
    let mut next = term.clone();
    for _ in 0..steps {
        term.copy_from_slice(&v);
        let mut sum = v.clone();
        for k in 1..=64usize {
            next.iter_mut().for_each(|x| *x = Complex::new(T::zero(), T::zero()));
            state.apply_generator(i, j, &term, h / T::from_usize(k).expect("term index"), &mut next);
            std::mem::swap(&mut term, &mut next);
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += *t;
            }
            if norm(&term) <= tiny {
                break;
            }
        }
        v = sum;
    }
    out.amplitudes = v;

    let leakage = out.boundary_population();
    if leakage.to_f64_lossy() > LEAKAGE_THRESHOLD {
        return Err(Error::Truncation {
            leakage: leakage.to_f64_lossy(),
            threshold: LEAKAGE_THRESHOLD,
        });
    }
    out.leakage = leakage;
    Ok(out)
}

/// Symmetrized quadrature covariance matrix of a truncated state, with
/// `X = a + a†` and `P = i(a† − a)`.
pub fn covariance_from_state<T: Real>(state: &TruncatedState<T>) -> Result<CovarianceMatrix<T>> {
    let n = state.n_modes;
    let psi = &state.amplitudes;
    let two = T::lit(2.0);
    let lowered: Vec<Vec<Complex<T>>> = (1..=n).map(|m| state.lower(m, psi)).collect();
    let mean_a: Vec<Complex<T>> = lowered.iter().map(|la| inner(psi, la)).collect();
    let mean_x: Vec<T> = mean_a.iter().map(|a| two * a.re).collect();
    let mean_p: Vec<T> = mean_a.iter().map(|a| two * a.im).collect();

    let mut sigma = DMatrix::<T>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // M = ⟨a_i a_j⟩, N = ⟨a_i† a_j⟩.
            let m = inner(psi, &state.lower(i + 1, &lowered[j]));
            let nn = inner(&lowered[i], &lowered[j]);
            let delta = if i == j { T::one() } else { T::zero() };
            sigma[(2 * i, 2 * j)] = two * m.re + two * nn.re + delta - mean_x[i] * mean_x[j];
            sigma[(2 * i + 1, 2 * j + 1)] = -two * m.re + two * nn.re + delta - mean_p[i] * mean_p[j];
            sigma[(2 * i, 2 * j + 1)] = two * m.im + two * nn.im - mean_x[i] * mean_p[j];
        }
    }
    for i in 0..n {
        for j in 0..n {
            sigma[(2 * j + 1, 2 * i)] = sigma[(2 * i, 2 * j + 1)];
        }
    }
    CovarianceMatrix::new(sigma)
}

/// Vacuum evolved through two-mode squeezers applied in order, each given as
/// `(i, j, r)`.
pub fn squeezed_cascade<T: Real>(n_modes: usize, cutoff: usize, stages: &[(usize, usize, T)]) -> Result<TruncatedState<T>> {
    let mut state = TruncatedState::vacuum(n_modes, cutoff)?;
    for &(i, j, r) in stages {
        state = evolve_tms(&state, i, j, r)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_squeezing_is_identity() {
        let v = TruncatedState::<f64>::vacuum(2, 6).unwrap();
        assert_eq!(evolve_tms(&v, 1, 2, 0.0).unwrap(), v);
    }

    #[test]
    fn vacuum_covariance_is_identity() {
        let v = TruncatedState::<f64>::vacuum(3, 5).unwrap();
        let s = covariance_from_state(&v).unwrap();
        assert!((s.matrix() - DMatrix::identity(6, 6)).amax() < 1e-12);
    }

    #[test]
    fn pair_photon_number() {
        let v = TruncatedState::<f64>::vacuum(2, 12).unwrap();
        let s = evolve_tms(&v, 1, 2, 0.2).unwrap();
        let n1 = s.mean_photon_number(1).unwrap();
        let n2 = s.mean_photon_number(2).unwrap();
        assert!((n1 - 0.2f64.sinh().powi(2)).abs() < 1e-5);
        assert!((n1 - n2).abs() < 1e-14);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(s.leakage() < LEAKAGE_THRESHOLD);
    }

    #[test]
    fn two_mode_covariance() {
        let r = 0.2f64;
        let s = squeezed_cascade(2, 12, &[(1, 2, r)]).unwrap();
        let sigma = covariance_from_state(&s).unwrap();
        assert!((sigma.xx(1, 1) - (2.0 * r).cosh()).abs() < 2e-4);
        assert!((sigma.xx(1, 2) - (2.0 * r).sinh()).abs() < 2e-4);
        assert!((sigma.pp(1, 2) + (2.0 * r).sinh()).abs() < 2e-4);
        assert!(sigma.max_xp_correlation() < 1e-12);
    }

    #[test]
    fn heavy_squeezing_reports_truncation() {
        let v = TruncatedState::<f64>::vacuum(2, 6).unwrap();
        assert!(matches!(evolve_tms(&v, 1, 2, 1.5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn bad_inputs() {
        assert!(TruncatedState::<f64>::vacuum(2, 3).is_err());
        let v = TruncatedState::<f64>::vacuum(2, 6).unwrap();
        assert!(evolve_tms(&v, 1, 1, 0.1).is_err());
        assert!(evolve_tms(&v, 1, 3, 0.1).is_err());
        assert!(evolve_tms(&v, 1, 2, f64::NAN).is_err());
    }
}
