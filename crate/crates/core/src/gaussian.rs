//! Covariance matrices and symplectic linear algebra for n-mode Gaussian states.
//!
//! Quadratures are ordered `(X1, P1, X2, P2, ...)` with `X = a + a†` and
//! `P = i(a† - a)`, so the vacuum covariance matrix is the identity. Mode
//! indices in the public API are 1-based.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Asymmetry accepted (and then removed) when constructing a covariance matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Tolerance on the `±iν` pairing of eigenvalues of `Ωσ`.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

#[inline]
pub(crate) fn x_index(mode: usize) -> usize {
    2 * (mode - 1)
}

#[inline]
pub(crate) fn p_index(mode: usize) -> usize {
    2 * (mode - 1) + 1
}

fn check_square_even<T: Real>(m: &DMatrix<T>) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    if r == 0 || r % 2 != 0 {
        return Err(Error::InvalidDimension(format!(
            "quadrature matrices need a positive even size, got {r}"
        )));
    }
    if m.iter().any(|x| !x.is_finite_value()) {
        return Err(Error::NonFinite);
    }
    Ok(r / 2)
}

pub(crate) fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode == 0 || mode > n_modes {
        Err(Error::InvalidMode { mode, n_modes })
    } else {
        Ok(())
    }
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// A linear map `r_out = U r_in` on the quadrature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureTransform<T: Real> {
    matrix: DMatrix<T>,
}

impl<T: Real> QuadratureTransform<T> {
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        check_square_even(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidDimension("n_modes must be at least 1".into()));
        }
        Ok(Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.matrix[(row, col)]
    }

    /// Returns `self · other`, i.e. `other` is applied first.
    pub fn then_after(&self, other: &Self) -> Result<Self> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Composes transforms listed in the order they act on the input.
    pub fn cascade<'a, I>(stages: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
        T: 'a,
    {
        let mut iter = stages.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidDimension("empty cascade".into()))?
            .clone();
        iter.try_fold(first, |acc, stage| stage.then_after(&acc))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    pub fn is_symplectic(&self, tol: T) -> SymplecticCheck<T> {
        // Shape is validated at construction.
        is_symplectic_matrix(&self.matrix, tol).expect("validated shape")
    }
}

/// Quadrature covariance matrix `σ_ij = ½⟨r_i r_j + r_j r_i⟩ − ⟨r_i⟩⟨r_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    matrix: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Validates shape and symmetry, then symmetrizes exactly.
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        check_square_even(&matrix)?;
        let asym = max_abs(&(&matrix - matrix.transpose()));
        let scale = T::one().max(max_abs(&matrix));
        if asym > T::tolerance(SYMMETRY_TOLERANCE) * scale {
            return Err(Error::NotSymmetric {
                asymmetry: asym.to_f64_lossy(),
            });
        }
        Ok(Self::symmetrized(matrix))
    }

    fn symmetrized(matrix: DMatrix<T>) -> Self {
        let half = T::lit(0.5);
        let sym = (&matrix + matrix.transpose()) * half;
        Self { matrix: sym }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.matrix[(row, col)]
    }

    /// `σ[X_i, X_j]` for 1-based modes.
    pub fn xx(&self, i: usize, j: usize) -> T {
        self.matrix[(x_index(i), x_index(j))]
    }

    /// `σ[P_i, P_j]` for 1-based modes.
    pub fn pp(&self, i: usize, j: usize) -> T {
        self.matrix[(p_index(i), p_index(j))]
    }

    /// `σ[X_i, P_j]` for 1-based modes.
    pub fn xp(&self, i: usize, j: usize) -> T {
        self.matrix[(x_index(i), p_index(j))]
    }

    /// Largest magnitude among the X–P cross correlations.
    pub fn max_xp_correlation(&self) -> T {
        let n = self.n_modes();
        let mut m = T::zero();
        for i in 1..=n {
            for j in 1..=n {
                m = m.max(self.xp(i, j).abs());
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: other.matrix.nrows(),
            });
        }
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// Principal submatrix on the quadratures of `modes` (1-based, kept in
    /// ascending order).
    pub fn submatrix(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        let kept: BTreeSet<usize> = modes.iter().copied().collect();
        if kept.is_empty() {
            return Err(Error::InvalidDimension("cannot keep an empty set of modes".into()));
        }
        for &m in &kept {
            check_mode(m, n)?;
        }
        let idx: Vec<usize> = kept.iter().flat_map(|&m| [x_index(m), p_index(m)]).collect();
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |r, c| self.matrix[(idx[r], idx[c])]);
        Ok(Self { matrix: sub })
    }
}

/// A split of the modes `{1..n}` into a nonempty proper subset `A` and its
/// complement `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeBipartition {
    n_modes: usize,
    set_a: BTreeSet<usize>,
}

impl ModeBipartition {
    pub fn new<I: IntoIterator<Item = usize>>(n_modes: usize, set_a: I) -> Result<Self> {
        let set_a: BTreeSet<usize> = set_a.into_iter().collect();
        if set_a.is_empty() {
            return Err(Error::InvalidBipartition("subsystem A is empty".into()));
        }
        for &m in &set_a {
            if m == 0 || m > n_modes {
                return Err(Error::InvalidBipartition(format!(
                    "mode {m} outside 1..={n_modes}"
                )));
            }
        }
        if set_a.len() == n_modes {
            return Err(Error::InvalidBipartition(
                "subsystem A contains every mode".into(),
            ));
        }
        Ok(Self { n_modes, set_a })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn set_a(&self) -> &BTreeSet<usize> {
        &self.set_a
    }

    pub fn set_b(&self) -> BTreeSet<usize> {
        (1..=self.n_modes).filter(|m| !self.set_a.contains(m)).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            set_a: self.set_b(),
        }
    }

    /// True when one side holds a single mode.
    pub fn is_one_versus_rest(&self) -> bool {
        self.set_a.len() == 1 || self.set_a.len() + 1 == self.n_modes
    }

    /// Every bipartition of `n` modes up to swapping `A` and `B`; the side
    /// containing mode 1 is used as `A`.
    pub fn all(n_modes: usize) -> Vec<Self> {
        if n_modes < 2 {
            return Vec::new();
        }
        let rest = n_modes - 1;
        (0u64..(1u64 << rest))
            .filter_map(|mask| {
                let a = std::iter::once(1).chain(
                    (0..rest).filter(|b| mask & (1 << b) != 0).map(|b| b + 2),
                );
                Self::new(n_modes, a).ok()
            })
            .collect()
    }
}

impl fmt::Display for ModeBipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<usize>| {
            s.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{}}}|{{{}}}", join(&self.set_a), join(&self.set_b()))
    }
}

/// Block-diagonal symplectic form with `n` copies of `[[0, 1], [-1, 0]]`.
pub fn symplectic_form<T: Real>(n: usize) -> Result<DMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension("symplectic form needs n >= 1".into()));
    }
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    Ok(omega)
}

pub fn vacuum_cm<T: Real>(n: usize) -> Result<CovarianceMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension("vacuum state needs n >= 1".into()));
    }
    Ok(CovarianceMatrix {
        matrix: DMatrix::identity(2 * n, 2 * n),
    })
}

/// Outcome of a symplecticity test: `residual = max |U Ω Uᵀ − Ω|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticCheck<T> {
    pub is_symplectic: bool,
    pub residual: T,
}

pub fn is_symplectic_matrix<T: Real>(u: &DMatrix<T>, tol: T) -> Result<SymplecticCheck<T>> {
    let n = check_square_even(u)?;
    let omega = symplectic_form::<T>(n)?;
    let residual = max_abs(&(u * &omega * u.transpose() - &omega));
    Ok(SymplecticCheck {
        is_symplectic: residual < tol,
        residual,
    })
}

pub fn is_symplectic<T: Real>(u: &QuadratureTransform<T>, tol: T) -> SymplecticCheck<T> {
    u.is_symplectic(tol)
}

/// `U σ_in Uᵀ`, symmetrized.
pub fn evolve_cm<T: Real>(
    u: &QuadratureTransform<T>,
    sigma_in: &CovarianceMatrix<T>,
) -> Result<CovarianceMatrix<T>> {
    if u.n_modes() != sigma_in.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: u.matrix.nrows(),
            found: sigma_in.matrix.nrows(),
        });
    }
    let out = &u.matrix * &sigma_in.matrix * u.matrix.transpose();
    Ok(CovarianceMatrix::symmetrized(out))
}

/// Symplectic spectrum of a covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum<T> {
    /// Ascending symplectic eigenvalues, one per mode.
    pub values: Vec<T>,
    /// Worst mismatch between the two copies of each eigenvalue.
    pub pairing_residual: T,
}

impl<T: Real> SymplecticSpectrum<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }
}

/// Symplectic eigenvalues of a positive-definite covariance matrix.
///
/// With `R = σ^{1/2}`, the antisymmetric matrix `RΩR` has eigenvalues `±iν`,
/// so the symmetric matrix `RΩσΩᵀR` carries each `ν²` twice. Working with the
/// symmetric form avoids a nonsymmetric eigensolver on `Ωσ`, whose repeated
/// eigenvalues make it ill-conditioned at large gain.
pub fn symplectic_eigenvalues<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<SymplecticSpectrum<T>> {
    let n = sigma.n_modes();
    let omega = symplectic_form::<T>(n)?;
    let eig = SymmetricEigen::new(sigma.matrix.clone());
    let smallest = eig.eigenvalues.iter().fold(eig.eigenvalues[0], |m, &v| m.min(v));
    if !(smallest > T::zero()) {
        return Err(Error::Numerical {
            what: "covariance matrix is not positive definite".into(),
            residual: smallest.to_f64_lossy(),
        });
    }
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.sqrt()));
    let r = &eig.eigenvectors * roots * eig.eigenvectors.transpose();
    let k = &r * &omega * &sigma.matrix * omega.transpose() * &r;
    let k = (&k + k.transpose()) * T::lit(0.5);
    let mut squares: Vec<T> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
    squares.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut values = Vec::with_capacity(n);
    let mut residual = T::zero();
    for pair in squares.chunks(2) {
        let (a, b) = (pair[0].max(T::zero()).sqrt(), pair[1].max(T::zero()).sqrt());
        residual = residual.max((a - b).abs());
        values.push((a + b) * T::lit(0.5));
    }
    let scale = T::one().max(values[n - 1]);
    if residual > T::tolerance(PAIRING_TOLERANCE) * scale {
        return Err(Error::Numerical {
            what: "pairing of symplectic eigenvalues".into(),
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(SymplecticSpectrum {
        values,
        pairing_residual: residual,
    })
}

/// `T_A σ T_A` with `T_A` flipping the sign of every P quadrature in `A`.
pub fn partial_transpose<T: Real>(
    sigma: &CovarianceMatrix<T>,
    part: &ModeBipartition,
) -> Result<CovarianceMatrix<T>> {
    if part.n_modes() != sigma.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: sigma.n_modes(),
            found: part.n_modes(),
        });
    }
    let mut out = sigma.matrix.clone();
    for &mode in part.set_a() {
        let p = p_index(mode);
        for k in 0..out.nrows() {
            out[(p, k)] = -out[(p, k)];
        }
        for k in 0..out.nrows() {
            out[(k, p)] = -out[(k, p)];
        }
    }
    Ok(CovarianceMatrix { matrix: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tms(g: f64) -> CovarianceMatrix<f64> {
        // Two-mode squeezed vacuum written out by hand.
        let s = g * g + (g * g - 1.0);
        let c = 2.0 * g * (g * g - 1.0).sqrt();
        CovarianceMatrix::new(DMatrix::from_row_slice(
            4,
            4,
            &[s, 0.0, c, 0.0, 0.0, s, 0.0, -c, c, 0.0, s, 0.0, 0.0, -c, 0.0, s],
        ))
        .unwrap()
    }

    #[test]
    fn symplectic_form_small_cases() {
        let o1 = symplectic_form::<f64>(1).unwrap();
        assert_eq!(o1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let o2 = symplectic_form::<f64>(2).unwrap();
        assert_eq!(o2[(0, 1)], 1.0);
        assert_eq!(o2[(3, 2)], -1.0);
        assert_eq!(o2[(0, 3)], 0.0);
        let o3 = symplectic_form::<f64>(3).unwrap();
        assert_eq!(&o3 * &o3, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(o3.transpose(), -o3);
        assert!(matches!(symplectic_form::<f64>(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn vacuum_is_identity() {
        assert_eq!(vacuum_cm::<f64>(1).unwrap().matrix(), &DMatrix::identity(2, 2));
        assert_eq!(vacuum_cm::<f64>(3).unwrap().matrix(), &DMatrix::identity(6, 6));
        assert!(vacuum_cm::<f64>(0).is_err());
    }

    #[test]
    fn identity_is_symplectic_and_perturbation_breaks_it() {
        let id = QuadratureTransform::<f64>::identity(3).unwrap();
        let check = id.is_symplectic(1e-12);
        assert!(check.is_symplectic);
        assert_eq!(check.residual, 0.0);

        let mut m = DMatrix::<f64>::identity(6, 6);
        m[(2, 2)] += 1e-3;
        let broken = QuadratureTransform::new(m).unwrap();
        assert!(!broken.is_symplectic(1e-12).is_symplectic);
    }

    #[test]
    fn raw_symplectic_check_rejects_bad_shapes() {
        assert!(is_symplectic_matrix(&DMatrix::<f64>::identity(3, 3), 1e-12).is_err());
        assert!(is_symplectic_matrix(&DMatrix::<f64>::zeros(2, 4), 1e-12).is_err());
    }

    #[test]
    fn covariance_rejects_asymmetry_and_nan() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 1e-6;
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::NotSymmetric { .. })));
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 0)] = f64::NAN;
        assert_eq!(CovarianceMatrix::new(m), Err(Error::NonFinite));
    }

    #[test]
    fn evolve_identity_and_dimension_mismatch() {
        let id = QuadratureTransform::<f64>::identity(2).unwrap();
        let vac = vacuum_cm::<f64>(2).unwrap();
        assert_eq!(evolve_cm(&id, &vac).unwrap(), vac);
        let vac3 = vacuum_cm::<f64>(3).unwrap();
        assert!(matches!(evolve_cm(&id, &vac3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vacuum_symplectic_spectrum() {
        let s = symplectic_eigenvalues(&vacuum_cm::<f64>(2).unwrap()).unwrap();
        assert_eq!(s.values.len(), 2);
        for v in s.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn partially_transposed_tms_min_eigenvalue() {
        // ν̃_min = (G − g)² for the transposed two-mode squeezed vacuum.
        let g_amp: f64 = 1.2;
        let g = (g_amp * g_amp - 1.0).sqrt();
        let expected = (g_amp - g).powi(2);
        assert!((expected - 0.28802).abs() < 1e-4);
        let part = ModeBipartition::new(2, [1]).unwrap();
        let pt = partial_transpose(&tms(g_amp), &part).unwrap();
        let spec = symplectic_eigenvalues(&pt).unwrap();
        assert!((spec.min() - expected).abs() < 1e-12, "{}", spec.min());
        assert!((spec.values[1] - 1.0 / expected).abs() < 1e-10);
    }

    #[test]
    fn bipartition_invariants() {
        assert!(ModeBipartition::new(3, []).is_err());
        assert!(ModeBipartition::new(3, [1, 2, 3]).is_err());
        assert!(ModeBipartition::new(3, [4]).is_err());
        assert!(ModeBipartition::new(3, [0]).is_err());
        let a = ModeBipartition::new(3, [3, 1]).unwrap();
        let b = ModeBipartition::new(3, [1, 3, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.complement().set_a().iter().copied().collect::<Vec<_>>(), vec![2]);
        assert!(a.is_one_versus_rest());
        assert!(!ModeBipartition::new(4, [1, 2]).unwrap().is_one_versus_rest());
        assert_eq!(ModeBipartition::all(3).len(), 3);
        assert_eq!(ModeBipartition::all(4).len(), 7);
        assert_eq!(a.to_string(), "{1,3}|{2}");
    }

    #[test]
    fn partial_transpose_on_vacuum_and_empty_set() {
        let vac = vacuum_cm::<f64>(3).unwrap();
        for part in ModeBipartition::all(3) {
            assert_eq!(partial_transpose(&vac, &part).unwrap(), vac);
        }
        let wrong = ModeBipartition::new(2, [1]).unwrap();
        assert!(partial_transpose(&vac, &wrong).is_err());
    }

    #[test]
    fn submatrix_keeps_requested_modes() {
        let vac = vacuum_cm::<f64>(3).unwrap();
        assert_eq!(vac.submatrix(&[1, 3]).unwrap().matrix(), &DMatrix::identity(4, 4));
        assert!(vac.submatrix(&[]).is_err());
        assert!(vac.submatrix(&[4]).is_err());
    }

    #[test]
    fn single_precision_round_trip() {
        let s = symplectic_eigenvalues(&vacuum_cm::<f32>(2).unwrap()).unwrap();
        assert!((s.min() - 1.0).abs() < 1e-5);
    }
}
