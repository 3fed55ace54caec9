//! Finite-dimensional conditional-probability clock.
//!
//! A clock `C` and a remainder `R` share the maximally entangled state
//! `|ψ⟩ = Σ_j α_j |c_j⟩|r_j⟩`. The abstract time integral of the conditional
//! probability is truncated to one recurrence period and evaluated with the
//! trapezoid rule. For a periodic integrand the trapezoid rule on a full
//! period is spectrally accurate.
//!
//! Bipartite vectors are ordered clock first: index `a·d + b` for clock index
//! `a` and remainder index `b`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{finite, positive, Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;
pub const PERIODICITY_TOLERANCE: f64 = 1e-9;
pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 8;

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_square(m: &CMat, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if m.nrows() != d { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn check_hermitian(m: &CMat) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect <= HERMITIAN_TOLERANCE {
        Ok(())
    } else {
        Err(Error::NotHermitian { defect })
    }
}

/// `max|B†B - I|` for a matrix whose columns are basis vectors.
pub fn orthonormality_defect(basis: &CMat) -> f64 {
    max_abs(&(basis.adjoint() * basis - CMat::identity(basis.ncols(), basis.ncols())))
}

fn check_orthonormal(basis: &CMat) -> Result<()> {
    let defect = orthonormality_defect(basis);
    if defect <= ORTHONORMAL_TOLERANCE {
        Ok(())
    } else {
        Err(Error::NotOrthonormal { defect })
    }
}

fn check_dimension(d: usize) -> Result<usize> {
    if (MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        Ok(d)
    } else {
        Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            reason: "must lie in [2, 8]",
        })
    }
}

/// Eigen-decomposition of a hermitian matrix with ascending eigenvalues.
fn sorted_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    coefficients: Vec<C64>,
    clock_basis: CMat,
    remainder_basis: CMat,
}

impl BipartiteState {
    /// `Σ_j α_j |c_j⟩|r_j⟩` with basis vectors as columns.
    pub fn new(coefficients: Vec<C64>, clock_basis: CMat, remainder_basis: CMat) -> Result<Self> {
        let d = check_dimension(coefficients.len())?;
        check_square(&clock_basis, d)?;
        check_square(&remainder_basis, d)?;
        check_orthonormal(&clock_basis)?;
        check_orthonormal(&remainder_basis)?;
        let norm: f64 = coefficients.iter().map(|a| a.norm_sqr()).sum();
        let defect = (norm - 1.0).abs();
        if defect > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self {
            coefficients,
            clock_basis,
            remainder_basis,
        })
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn clock_basis(&self) -> &CMat {
        &self.clock_basis
    }

    pub fn remainder_basis(&self) -> &CMat {
        &self.remainder_basis
    }

    pub fn is_maximally_entangled(&self) -> bool {
        let target = 1.0 / (self.dimension() as f64).sqrt();
        self.coefficients
            .iter()
            .all(|a| (a.norm() - target).abs() <= NORMALIZATION_TOLERANCE)
    }

    /// Amplitudes `M[a, b]` in the product of computational bases.
    pub fn amplitude_matrix(&self) -> CMat {
        let d = self.dimension();
        let mut m = CMat::zeros(d, d);
        for (j, &alpha) in self.coefficients.iter().enumerate() {
            let c = self.clock_basis.column(j);
            let r = self.remainder_basis.column(j);
            m += (c * r.transpose()) * alpha;
        }
        m
    }

    pub fn vector(&self) -> CVec {
        let d = self.dimension();
        let m = self.amplitude_matrix();
        CVec::from_fn(d * d, |i, _| m[(i / d, i % d)])
    }

    pub fn density_matrix(&self) -> CMat {
        let v = self.vector();
        &v * v.adjoint()
    }

    /// `Tr_R |ψ⟩⟨ψ|`.
    pub fn reduced_clock(&self) -> CMat {
        let m = self.amplitude_matrix();
        &m * m.adjoint()
    }

    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .amplitude_matrix()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn schmidt_rank(&self, tol: f64) -> usize {
        self.schmidt_coefficients().iter().filter(|&&s| s > tol).count()
    }
}

/// Uniform `α_j = 1/√d` over the given bases.
pub fn build_entangled_state(d: usize, clock_basis: CMat, remainder_basis: CMat) -> Result<BipartiteState> {
    let d = check_dimension(d)?;
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    BipartiteState::new(vec![a; d], clock_basis, remainder_basis)
}

/// `|c_0⟩|r_0⟩`: Schmidt rank one.
pub fn build_product_state(d: usize, clock_basis: CMat, remainder_basis: CMat) -> Result<BipartiteState> {
    let d = check_dimension(d)?;
    let mut coefficients = vec![C64::new(0.0, 0.0); d];
    coefficients[0] = C64::new(1.0, 0.0);
    BipartiteState::new(coefficients, clock_basis, remainder_basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClockModel {
    h_c: CMat,
    observable: CMat,
    period: f64,
    energies: Vec<f64>,
    energy_basis: CMat,
    readings: Vec<f64>,
    reading_basis: CMat,
}

impl ClockModel {
    /// Validates hermiticity and that `e^{-i H_C period}` is a global phase.
    pub fn new(h_c: CMat, observable: CMat, period: f64) -> Result<Self> {
        let d = check_dimension(h_c.nrows())?;
        check_square(&h_c, d)?;
        check_square(&observable, d)?;
        check_hermitian(&h_c)?;
        check_hermitian(&observable)?;
        let period = positive("period", period)?;
        let (energies, energy_basis) = sorted_eigen(&h_c);
        let (readings, reading_basis) = sorted_eigen(&observable);
        let model = Self {
            h_c,
            observable,
            period,
            energies,
            energy_basis,
            readings,
            reading_basis,
        };
        let u = model.propagator(period);
        let phase = u[(0, 0)];
        let defect = max_abs(&(&u - CMat::identity(d, d) * phase));
        if defect > PERIODICITY_TOLERANCE {
            return Err(Error::NotPeriodic { defect });
        }
        Ok(model)
    }

    /// Clock whose reading basis is the discrete Fourier transform of the
    /// energy basis, with readings `k·period/d`.
    pub fn with_phase_observable(h_c: CMat, period: f64) -> Result<Self> {
        let d = check_dimension(h_c.nrows())?;
        check_square(&h_c, d)?;
        check_hermitian(&h_c)?;
        let period = positive("period", period)?;
        let (_, v) = sorted_eigen(&h_c);
        let f = fourier_basis(d);
        let basis = &v * f;
        let readings = CMat::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(r as f64 * period / d as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let x = &basis * readings * basis.adjoint();
        let x = (&x + x.adjoint()) * C64::new(0.5, 0.0);
        Self::new(h_c, x, period)
    }

    /// `H_C = ω diag(0, 1, …, d-1)` with period `2π/ω`.
    pub fn harmonic(d: usize, omega: f64) -> Result<Self> {
        let d = check_dimension(d)?;
        let omega = positive("omega", omega)?;
        let h = CMat::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(omega * r as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::with_phase_observable(h, std::f64::consts::TAU / omega)
    }

    pub fn dimension(&self) -> usize {
        self.h_c.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h_c
    }

    pub fn observable(&self) -> &CMat {
        &self.observable
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy_basis(&self) -> &CMat {
        &self.energy_basis
    }

    /// Eigenvalues of the observable, ascending.
    pub fn readings(&self) -> &[f64] {
        &self.readings
    }

    /// Eigenvectors of the observable as columns, matching [`Self::readings`].
    pub fn reading_basis(&self) -> &CMat {
        &self.reading_basis
    }

    pub fn propagator(&self, t: f64) -> CMat {
        let d = self.dimension();
        let phases = CMat::from_fn(d, d, |r, c| {
            if r == c {
                C64::from_polar(1.0, -self.energies[r] * t)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.energy_basis * phases * self.energy_basis.adjoint()
    }

    pub fn evolve(&self, psi0: &CVec, t: f64) -> CVec {
        self.propagator(t) * psi0
    }
}

/// Nearest-neighbour hopping matrix `Σ_j |j⟩⟨j+1| + h.c.`, a discrete
/// position observable whose eigenbasis is not unbiased with respect to the
/// computational basis. For `d = 2` it is `σx`.
pub fn chain_observable(d: usize) -> CMat {
    CMat::from_fn(d, d, |r, c| {
        if r.abs_diff(c) == 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Columns `f_k = Σ_j e^{2πi jk/d}/√d e_j`.
pub fn fourier_basis(d: usize) -> CMat {
    let n = (d as f64).sqrt();
    CMat::from_fn(d, d, |j, k| {
        C64::from_polar(1.0 / n, std::f64::consts::TAU * (j * k) as f64 / d as f64)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureWindow {
    pub start: f64,
    pub length: f64,
    /// Number of trapezoid intervals.
    pub intervals: usize,
}

impl QuadratureWindow {
    pub const DEFAULT_INTERVALS: usize = 512;

    pub fn full_period(clock: &ClockModel) -> Self {
        Self {
            start: 0.0,
            length: clock.period(),
            intervals: Self::DEFAULT_INTERVALS,
        }
    }

    pub fn with_intervals(self, intervals: usize) -> Self {
        Self { intervals, ..self }
    }

    fn validate(&self, period: f64) -> Result<()> {
        finite("window_start", self.start)?;
        positive("window_length", self.length)?;
        if self.intervals == 0 {
            return Err(Error::InvalidParameter {
                name: "intervals",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        if (self.length - period).abs() > 1e-12 * period {
            return Err(Error::WindowMismatch {
                window: self.length,
                period,
            });
        }
        Ok(())
    }

    /// Nodes and trapezoid weights.
    fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.intervals;
        let h = self.length / n as f64;
        (0..=n).map(move |i| {
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            (self.start + h * i as f64, w)
        })
    }
}

fn normalized(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for v in &mut p {
            *v /= total;
        }
    }
    p
}

/// `P_C(x')` for every reading of the clock, in reading order.
pub fn conditional_distribution_clock(
    clock: &ClockModel,
    psi_c0: &CVec,
    window: &QuadratureWindow,
) -> Result<Vec<f64>> {
    let d = clock.dimension();
    if psi_c0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: psi_c0.len(),
        });
    }
    let defect = (psi_c0.norm_squared() - 1.0).abs();
    if defect > 1e-9 {
        return Err(Error::NotNormalized { defect });
    }
    window.validate(clock.period())?;
    let xb = clock.reading_basis().adjoint();
    let mut acc = vec![0.0; d];
    for (t, w) in window.nodes() {
        let amps = &xb * clock.evolve(psi_c0, t);
        for (a, z) in acc.iter_mut().zip(amps.iter()) {
            *a += w * z.norm_sqr();
        }
    }
    Ok(normalized(acc))
}

/// `P_C` at the reading with index `x_index`.
pub fn conditional_probability_clock(
    x_index: usize,
    clock: &ClockModel,
    psi_c0: &CVec,
    window: &QuadratureWindow,
) -> Result<f64> {
    let p = conditional_distribution_clock(clock, psi_c0, window)?;
    p.get(x_index).copied().ok_or(Error::DimensionMismatch {
        expected: p.len(),
        found: x_index,
    })
}

/// Remainder vectors correlated with the clock readings through the Schmidt
/// pairing: `x̃_k = Σ_j conj(⟨c_j|x_k⟩) |r_j⟩`.
pub fn mirror_basis(state: &BipartiteState, clock: &ClockModel) -> Result<CMat> {
    let d = state.dimension();
    if clock.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: clock.dimension(),
        });
    }
    let overlaps = state.clock_basis().adjoint() * clock.reading_basis();
    Ok(state.remainder_basis() * overlaps.map(|z| z.conj()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorCheck {
    pub readings: Vec<f64>,
    pub p_c: Vec<f64>,
    pub p_r: Vec<f64>,
    pub max_abs_diff: f64,
    pub total_variation: f64,
    pub maximally_entangled: bool,
}

/// Both distributions: `P_C` from the clock alone, and `P_R` from the joint
/// state conditioned on the evolving clock state and projected on the mirror
/// basis.
pub fn mirror_probability_check(
    state: &BipartiteState,
    clock: &ClockModel,
    psi_c0: &CVec,
    window: &QuadratureWindow,
) -> Result<MirrorCheck> {
    let p_c = conditional_distribution_clock(clock, psi_c0, window)?;
    let mirror = mirror_basis(state, clock)?;
    let m = state.amplitude_matrix();
    let d = state.dimension();
    // ⟨φ| ⊗ ⟨x̃_k| applied to ψ is (φ† M conj(x̃_k)).
    let projected = &m * mirror.map(|z| z.conj());
    let mut acc = vec![0.0; d];
    for (t, w) in window.nodes() {
        let phi = clock.evolve(psi_c0, t);
        let amps = phi.adjoint() * &projected;
        for (a, z) in acc.iter_mut().zip(amps.iter()) {
            *a += w * z.norm_sqr();
        }
    }
    let p_r = normalized(acc);
    let max_abs_diff = p_c
        .iter()
        .zip(&p_r)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let total_variation = 0.5 * p_c.iter().zip(&p_r).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(MirrorCheck {
        readings: clock.readings().to_vec(),
        p_c,
        p_r,
        max_abs_diff,
        total_variation,
        maximally_entangled: state.is_maximally_entangled(),
    })
}

fn total_hamiltonian(d: usize, h_c: &CMat, h_r: &CMat) -> Result<CMat> {
    check_square(h_c, d)?;
    check_square(h_r, d)?;
    let id = CMat::identity(d, d);
    Ok(h_c.kronecker(&id) + id.kronecker(h_r))
}

/// `⟨ψ| H_C ⊗ 1 + 1 ⊗ H_R |ψ⟩`.
pub fn hamiltonian_balance(state: &BipartiteState, h_c: &CMat, h_r: &CMat) -> Result<f64> {
    let h = total_hamiltonian(state.dimension(), h_c, h_r)?;
    let v = state.vector();
    Ok((v.adjoint() * h * &v)[(0, 0)].re)
}

/// `max|[ρ, H_C ⊗ 1 + 1 ⊗ H_R]|` for the global pure state.
pub fn global_commutator_defect(state: &BipartiteState, h_c: &CMat, h_r: &CMat) -> Result<f64> {
    let h = total_hamiltonian(state.dimension(), h_c, h_r)?;
    let rho = state.density_matrix();
    Ok(max_abs(&(&rho * &h - &h * &rho)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSystem {
    pub state: BipartiteState,
    pub h_c: CMat,
    pub h_r: CMat,
}

/// Maximally entangled state over the energy basis `v_j` of `H_C` and the
/// conjugate basis `conj(v_j)` of `H_R = -conj(H_C)`, so `E_j^R = -E_j^C`.
pub fn paired_construction(h_c: &CMat) -> Result<PairedSystem> {
    let d = check_dimension(h_c.nrows())?;
    check_square(h_c, d)?;
    check_hermitian(h_c)?;
    let (_, v) = sorted_eigen(h_c);
    let r = v.map(|z| z.conj());
    let h_r = -h_c.map(|z| z.conj());
    Ok(PairedSystem {
        state: build_entangled_state(d, v, r)?,
        h_c: h_c.clone(),
        h_r,
    })
}

pub fn identity_basis(d: usize) -> CMat {
    CMat::identity(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(v: &[f64]) -> CMat {
        CMat::from_fn(v.len(), v.len(), |r, col| if r == col { c(v[r]) } else { c(0.0) })
    }

    #[test]
    fn bell_and_qutrit_states() {
        let s = build_entangled_state(2, identity_basis(2), identity_basis(2)).unwrap();
        for a in s.coefficients() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let s = build_entangled_state(3, identity_basis(3), fourier_basis(3)).unwrap();
        assert_eq!(s.schmidt_rank(1e-9), 3);
        let rho = s.reduced_clock();
        assert!(max_abs(&(rho - identity_basis(3) * c(1.0 / 3.0))) < 1e-14);
    }

    #[test]
    fn rejects_bad_bases_and_dimensions() {
        let mut b = identity_basis(2);
        b[(0, 1)] = c(0.1);
        assert!(matches!(
            build_entangled_state(2, b, identity_basis(2)),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(build_entangled_state(1, identity_basis(1), identity_basis(1)).is_err());
        assert!(build_entangled_state(9, identity_basis(9), identity_basis(9)).is_err());
    }

    #[test]
    fn frozen_clock() {
        let h = diag(&[0.0, 1.0]);
        let x = diag(&[-1.0, 2.0]);
        let clock = ClockModel::new(h, x, TAU).unwrap();
        let psi = CVec::from_vec(vec![c(1.0), c(0.0)]);
        let p = conditional_distribution_clock(&clock, &psi, &QuadratureWindow::full_period(&clock)).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
    }

    #[test]
    fn qubit_clock_period_average() {
        let omega = 1.7;
        let h = diag(&[0.0, omega]);
        let x = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let clock = ClockModel::new(h, x, TAU / omega).unwrap();
        let psi = CVec::from_vec(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
        let w = QuadratureWindow::full_period(&clock);
        let p = conditional_distribution_clock(&clock, &psi, &w).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        let p2 = conditional_distribution_clock(&clock, &psi, &w.with_intervals(2 * w.intervals)).unwrap();
        for (a, b) in p.iter().zip(&p2) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn window_must_match_period() {
        let clock = ClockModel::harmonic(3, 1.0).unwrap();
        let mut w = QuadratureWindow::full_period(&clock);
        w.length *= 0.5;
        let psi = CVec::from_vec(vec![c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(
            conditional_distribution_clock(&clock, &psi, &w),
            Err(Error::WindowMismatch { .. })
        ));
    }

    #[test]
    fn incommensurate_spectrum_is_not_periodic() {
        let h = diag(&[0.0, 1.0, 2f64.sqrt()]);
        assert!(matches!(
            ClockModel::with_phase_observable(h, TAU),
            Err(Error::NotPeriodic { .. })
        ));
    }

    #[test]
    fn mirror_equality_and_product_state() {
        let clock = ClockModel::harmonic(2, 1.0).unwrap();
        let psi = clock.reading_basis().column(0).into_owned();
        let w = QuadratureWindow::full_period(&clock);
        let paired = paired_construction(clock.hamiltonian()).unwrap();
        let m = mirror_probability_check(&paired.state, &clock, &psi, &w).unwrap();
        assert!(m.max_abs_diff <= 1e-9, "{m:?}");

        let prod = build_product_state(
            2,
            paired.state.clock_basis().clone(),
            paired.state.remainder_basis().clone(),
        )
        .unwrap();
        assert_eq!(prod.schmidt_rank(1e-9), 1);
        let m = mirror_probability_check(&prod, &clock, &psi, &w).unwrap();
        assert!(!m.maximally_entangled);
        for p in &m.p_r {
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert!(m.total_variation > 0.0);
    }

    #[test]
    fn phase_observable_averages_to_uniform() {
        let clock = ClockModel::harmonic(4, 1.0).unwrap();
        let psi = clock.reading_basis().column(1).into_owned();
        let p = conditional_distribution_clock(&clock, &psi, &QuadratureWindow::full_period(&clock)).unwrap();
        for v in p {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_clock_product_state_is_uninformative() {
        let d = 4;
        let h = diag(&[0.0, 1.0, 2.0, 3.0]);
        let clock = ClockModel::new(h.clone(), chain_observable(d), TAU).unwrap();
        let psi = clock.reading_basis().column(0).into_owned();
        let w = QuadratureWindow::full_period(&clock);
        let split = clock.reading_basis() * fourier_basis(d);
        let prod = build_product_state(d, split.clone(), split.map(|z| z.conj())).unwrap();
        let m = mirror_probability_check(&prod, &clock, &psi, &w).unwrap();
        for p in &m.p_r {
            assert!((p - 0.25).abs() < 1e-12, "{m:?}");
        }
        assert!(m.total_variation > 1e-3, "{m:?}");

        let paired = paired_construction(&h).unwrap();
        let m = mirror_probability_check(&paired.state, &clock, &psi, &w).unwrap();
        assert!(m.max_abs_diff <= 1e-12);
    }

    #[test]
    fn balance_for_paired_and_unpaired() {
        let h = diag(&[0.0, 1.0, 3.0]);
        let paired = paired_construction(&h).unwrap();
        assert!(hamiltonian_balance(&paired.state, &paired.h_c, &paired.h_r).unwrap().abs() <= 1e-12);
        assert!(global_commutator_defect(&paired.state, &paired.h_c, &paired.h_r).unwrap() <= 1e-12);

        let h_r = -h.clone();
        let s = build_entangled_state(3, identity_basis(3), identity_basis(3)).unwrap();
        assert!(hamiltonian_balance(&s, &h, &h_r).unwrap().abs() <= 1e-12);

        let h_r = diag(&[0.5, -1.0, 1.0]);
        let want = (0.5 + 0.0 + 4.0) / 3.0;
        assert!((hamiltonian_balance(&s, &h, &h_r).unwrap() - want).abs() < 1e-14);

        assert!(matches!(
            hamiltonian_balance(&s, &h, &identity_basis(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
