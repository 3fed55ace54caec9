//! Two-level state primitives: pure states, density matrices, unitaries.
//!
//! Basis ordering is `[|1⟩, |2⟩]` (ground, excited). A [`DensityMatrix2`]
//! stores only the real diagonal and the upper off-diagonal element, so it is
//! hermitian by construction.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<C64>;

/// Norm tolerance for accepting a pure state.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Unitarity tolerance for accepting an evolution matrix.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest absolute entry of a 2×2 complex matrix.
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `|ψ⟩ = c1|1⟩ + c2|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2 {
    pub c1: C64,
    pub c2: C64,
}

impl PureState2 {
    pub fn new(c1: C64, c2: C64) -> Self {
        Self { c1, c2 }
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(c1: C64, c2: C64) -> Result<Self> {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { defect: 1.0 });
        }
        Ok(Self::new(c1 / norm, c2 / norm))
    }

    pub fn ground() -> Self {
        Self::new(c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn excited() -> Self {
        Self::new(c(0.0, 0.0), c(1.0, 0.0))
    }

    pub fn norm_defect(&self) -> f64 {
        (self.c1.norm_sqr() + self.c2.norm_sqr() - 1.0).abs()
    }
}

/// Hermitian 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    rho11: f64,
    rho22: f64,
    rho12: C64,
}

impl DensityMatrix2 {
    /// Builds `[[rho11, rho12], [conj(rho12), rho22]]`. No positivity or trace
    /// check is made; see [`validate_density`].
    pub fn new(rho11: f64, rho22: f64, rho12: C64) -> Self {
        Self { rho11, rho22, rho12 }
    }

    pub fn ground() -> Self {
        Self::new(1.0, 0.0, c(0.0, 0.0))
    }

    pub fn excited() -> Self {
        Self::new(0.0, 1.0, c(0.0, 0.0))
    }

    /// Symmetrizes an arbitrary matrix onto the hermitian subspace, returning
    /// the projected state and the hermiticity defect `max|m - m†|` of the input.
    pub fn from_matrix_hermitized(m: &Mat2) -> (Self, f64) {
        let defect = max_abs(&(m - m.adjoint()));
        let rho12 = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        (Self::new(m[(0, 0)].re, m[(1, 1)].re, rho12), defect)
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho22(&self) -> f64 {
        self.rho22
    }

    pub fn rho12(&self) -> C64 {
        self.rho12
    }

    pub fn rho21(&self) -> C64 {
        self.rho12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    pub fn with_rho12(self, rho12: C64) -> Self {
        Self { rho12, ..self }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let half_tr = 0.5 * (self.rho11 + self.rho22);
        let half_diff = 0.5 * (self.rho11 - self.rho22);
        let r = (half_diff * half_diff + self.rho12.norm_sqr()).sqrt();
        [half_tr - r, half_tr + r]
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(
            c(self.rho11, 0.0),
            self.rho12,
            self.rho21(),
            c(self.rho22, 0.0),
        )
    }
}

/// 2×2 matrix whose unitarity defect has been checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    /// Accepts `m` if `max|m†m - I| ≤ 1e-9`.
    pub fn new(m: Mat2) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect.is_finite() && defect <= UNITARITY_TOLERANCE {
            Ok(Self(m))
        } else {
            Err(Error::NotUnitary { defect })
        }
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    pub fn compose(&self, rhs: &Unitary2) -> Unitary2 {
        Self(self.0 * rhs.0)
    }
}

pub fn unitarity_defect(m: &Mat2) -> f64 {
    max_abs(&(m.adjoint() * m - Mat2::identity()))
}

/// `ρ = |ψ⟩⟨ψ|`.
pub fn dm_from_pure(psi: &PureState2) -> Result<DensityMatrix2> {
    let defect = psi.norm_defect();
    if !(defect <= NORM_TOLERANCE) {
        return Err(Error::NotNormalized { defect });
    }
    Ok(DensityMatrix2::new(
        psi.c1.norm_sqr(),
        psi.c2.norm_sqr(),
        psi.c1 * psi.c2.conj(),
    ))
}

/// `UρU†`.
pub fn apply_unitary(rho: &DensityMatrix2, u: &Unitary2) -> DensityMatrix2 {
    let m = u.matrix() * rho.to_matrix() * u.matrix().adjoint();
    DensityMatrix2::from_matrix_hermitized(&m).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.trace_defect <= tol && self.hermiticity_defect <= tol && self.min_eigenvalue >= -tol
    }
}

pub fn validate_density(rho: &DensityMatrix2) -> DensityDiagnostics {
    DensityDiagnostics {
        trace_defect: (rho.trace() - 1.0).abs(),
        hermiticity_defect: 0.0,
        min_eigenvalue: rho.eigenvalues()[0],
    }
}

/// Diagnostics for a raw matrix that need not be hermitian. The eigenvalue is
/// that of the hermitian part.
pub fn validate_matrix(m: &Mat2) -> DensityDiagnostics {
    let (h, herm) = DensityMatrix2::from_matrix_hermitized(m);
    DensityDiagnostics {
        trace_defect: (m.trace() - c(1.0, 0.0)).norm(),
        hermiticity_defect: herm,
        min_eigenvalue: h.eigenvalues()[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_mat_close(a: &Mat2, b: &Mat2, tol: f64) {
        assert!(max_abs(&(a - b)) <= tol, "{a} vs {b}");
    }

    #[test]
    fn pure_ground_and_excited() {
        let g = dm_from_pure(&PureState2::ground()).unwrap();
        assert_eq!(g, DensityMatrix2::ground());
        let e = dm_from_pure(&PureState2::excited()).unwrap();
        assert_eq!(e, DensityMatrix2::excited());
    }

    #[test]
    fn pure_equal_superposition() {
        let psi = PureState2::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2));
        let rho = dm_from_pure(&psi).unwrap();
        let want = Mat2::new(c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0));
        assert_mat_close(&rho.to_matrix(), &want, 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        let psi = PureState2::new(c(1.0, 0.0), c(1e-4, 0.0));
        assert!(matches!(
            dm_from_pure(&psi),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn identity_leaves_state() {
        let rho = DensityMatrix2::new(0.7, 0.3, c(0.1, -0.2));
        assert_eq!(apply_unitary(&rho, &Unitary2::identity()), rho);
    }

    #[test]
    fn full_flip() {
        let u = Unitary2::new(Mat2::new(
            c(0.0, 0.0),
            c(0.0, -1.0),
            c(0.0, -1.0),
            c(0.0, 0.0),
        ))
        .unwrap();
        let out = apply_unitary(&DensityMatrix2::ground(), &u);
        assert_mat_close(&out.to_matrix(), &DensityMatrix2::excited().to_matrix(), 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Mat2::new(c(1.0, 0.0), c(1e-6, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(Unitary2::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn diagnostics() {
        let d = validate_density(&DensityMatrix2::ground());
        assert_eq!(
            d,
            DensityDiagnostics {
                trace_defect: 0.0,
                hermiticity_defect: 0.0,
                min_eigenvalue: 0.0
            }
        );

        let d = validate_density(&DensityMatrix2::new(0.5, 0.5, c(0.6, 0.0)));
        assert!((d.min_eigenvalue + 0.1).abs() < 1e-15);

        let d = validate_density(&DensityMatrix2::new(0.7, 0.3, c(0.0, 0.1)));
        assert_eq!(d.hermiticity_defect, 0.0);
        assert_eq!(d.trace_defect, 0.0);
        assert!(d.min_eigenvalue > 0.0);
    }

    #[test]
    fn raw_matrix_hermiticity_defect() {
        let m = Mat2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0));
        let d = validate_matrix(&m);
        assert!((d.hermiticity_defect - 0.2).abs() < 1e-15);
    }
}
