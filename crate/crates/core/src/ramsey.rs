//! Closed-form Ramsey interrogation: pulse propagators, dephasing free
//! evolution and the excitation probability after the two-pulse sequence.
//!
//! Units use ħ = 1 with the ground level at zero energy, so the bare
//! Hamiltonian is `diag(0, ω21)`. The drive couples the levels through
//! `V(t) = λ(e^{iωt}|1⟩⟨2| + e^{-iωt}|2⟩⟨1|)`.
//!
//! Everything here is written in the laboratory frame. A pulse that starts
//! at `t0` and lasts `τ` acts as `W(τ) · U(τ; φ = ω t0)`, where `U` is
//! [`pulse_unitary`] (the propagator in the frame co-rotating with the drive)
//! and `W(τ) = diag(e^{iωτ/2}, e^{-iωτ/2})` is the frame rotation accrued over
//! the pulse ([`frame_phase`]). The trailing `W` never changes populations,
//! but skipping it after the first pulse leaves a spurious `ω21 τ` phase in
//! the fringe.
//!
//! Phase convention for dephasing: the spectral pair is `γ = α + iβ` acting
//! on `ρ21`, so `ρ12` evolves as `e^{(iω21 + iβ - α)T}`. With that choice the
//! central fringe sits at `ω = ω21 + β` and the near-resonance probability is
//! `½[1 + e^{-αT} cos((θ - β)T)]`; see [`FRINGE_SIGN`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{finite, non_negative, positive, Result};
use crate::statespace::{apply_unitary, c, DensityMatrix2, Mat2, Unitary2};

/// Sign of the cosine term in the near-resonance fringe,
/// `P = ½[1 + FRINGE_SIGN · e^{-αT} cos((θ - β)T)]`.
///
/// Fixed by requiring the ideal sequence (`α = β = θ = 0`, `τ = π/(4λ)`) to
/// end in the excited state, as both the composed closed form and the master
/// equation oracle do.
pub const FRINGE_SIGN: f64 = 1.0;

/// Rabi frequency `Ω = √(λ² + θ²/4)`.
pub fn rabi_frequency(lambda: f64, theta: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    finite("theta", theta)?;
    Ok(lambda.hypot(0.5 * theta))
}

/// Pulse duration that turns each pulse into a quarter Rabi cycle.
pub fn optimal_pulse_time(lambda: f64) -> Result<f64> {
    Ok(PI / (4.0 * positive("lambda", lambda)?))
}

/// Drive-frame propagator of a pulse of length `t` with drive phase `φ` at
/// its start:
///
/// ```text
/// [[b - iθa/(2Ω),        -iλ e^{+iφ} a/Ω],
///  [-iλ e^{-iφ} a/Ω,      b + iθa/(2Ω)  ]]     a = sin Ωt, b = cos Ωt
/// ```
pub fn pulse_unitary(lambda: f64, theta: f64, t: f64, drive_phase: f64) -> Result<Unitary2> {
    let omega = rabi_frequency(lambda, theta)?;
    non_negative("t", t)?;
    finite("drive_phase", drive_phase)?;
    let (a, b) = (omega * t).sin_cos();
    let diag = theta * a / (2.0 * omega);
    let off = lambda * a / omega;
    let phase = C64::from_polar(1.0, drive_phase);
    Unitary2::new(Mat2::new(
        c(b, -diag),
        c(0.0, -off) * phase,
        c(0.0, -off) * phase.conj(),
        c(b, diag),
    ))
}

/// `diag(e^{iωt/2}, e^{-iωt/2})`: rotation from the drive frame to the lab.
pub fn frame_phase(omega: f64, t: f64) -> Result<Unitary2> {
    let phi = 0.5 * finite("omega", omega)? * finite("t", t)?;
    Unitary2::new(Mat2::new(
        C64::from_polar(1.0, phi),
        c(0.0, 0.0),
        c(0.0, 0.0),
        C64::from_polar(1.0, -phi),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    lambda: f64,
    omega: f64,
    omega21: f64,
    tau: f64,
}

impl PulseParams {
    pub fn new(lambda: f64, omega: f64, omega21: f64, tau: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        finite("omega", omega)?;
        finite("omega21", omega21)?;
        positive("tau", tau)?;
        Ok(Self {
            lambda,
            omega,
            omega21,
            tau,
        })
    }

    /// Builds the drive frequency as `ω21 + θ`.
    pub fn from_detuning(lambda: f64, omega21: f64, theta: f64, tau: f64) -> Result<Self> {
        finite("theta", theta)?;
        Self::new(lambda, omega21 + theta, omega21, tau)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega21(&self) -> f64 {
        self.omega21
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Detuning `ω - ω21`.
    pub fn theta(&self) -> f64 {
        self.omega - self.omega21
    }

    pub fn rabi_frequency(&self) -> f64 {
        self.lambda.hypot(0.5 * self.theta())
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.lambda, omega, self.omega21, self.tau)
    }

    /// Lab-frame propagator for this pulse when it starts at `t_start`.
    pub fn lab_propagator(&self, t_start: f64) -> Result<Unitary2> {
        let u = pulse_unitary(self.lambda, self.theta(), self.tau, self.omega * t_start)?;
        Ok(frame_phase(self.omega, self.tau)?.compose(&u))
    }
}

/// Dephasing eigenvalue `γ = α + iβ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceSpec {
    alpha: f64,
    beta: f64,
}

impl DecoherenceSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        non_negative("alpha", alpha)?;
        finite("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn none() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolWarning {
    /// `τ > T/10`: the pulses are not short against the free interval.
    LongPulse { tau: f64, ramsey_time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyProtocol {
    pub pulse: PulseParams,
    ramsey_time: f64,
    pub gamma: DecoherenceSpec,
}

impl RamseyProtocol {
    pub fn new(pulse: PulseParams, ramsey_time: f64, gamma: DecoherenceSpec) -> Result<Self> {
        positive("T", ramsey_time)?;
        Ok(Self {
            pulse,
            ramsey_time,
            gamma,
        })
    }

    pub fn ramsey_time(&self) -> f64 {
        self.ramsey_time
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Ok(Self {
            pulse: self.pulse.with_omega(omega)?,
            ..self
        })
    }

    pub fn diagnostics(&self) -> Vec<ProtocolWarning> {
        let mut out = Vec::new();
        if self.pulse.tau > self.ramsey_time / 10.0 {
            out.push(ProtocolWarning::LongPulse {
                tau: self.pulse.tau,
                ramsey_time: self.ramsey_time,
            });
        }
        out
    }
}

/// Free evolution over `T` under the bare Hamiltonian plus pure dephasing.
/// Populations are returned untouched.
pub fn free_evolution(
    rho: &DensityMatrix2,
    ramsey_time: f64,
    gamma: &DecoherenceSpec,
    omega21: f64,
) -> Result<DensityMatrix2> {
    non_negative("T", ramsey_time)?;
    non_negative("alpha", gamma.alpha)?;
    finite("omega21", omega21)?;
    if ramsey_time == 0.0 {
        return Ok(*rho);
    }
    let factor = C64::from_polar(
        (-gamma.alpha * ramsey_time).exp(),
        (omega21 + gamma.beta) * ramsey_time,
    );
    Ok(rho.with_rho12(rho.rho12() * factor))
}

/// Lab-frame density matrix at `2τ + T`, starting from the ground state.
pub fn ramsey_sequence(p: &RamseyProtocol) -> Result<DensityMatrix2> {
    let tau = p.pulse.tau;
    let first = p.pulse.lab_propagator(0.0)?;
    let second = p.pulse.lab_propagator(tau + p.ramsey_time)?;
    let rho = apply_unitary(&DensityMatrix2::ground(), &first);
    let rho = free_evolution(&rho, p.ramsey_time, &p.gamma, p.pulse.omega21)?;
    Ok(apply_unitary(&rho, &second))
}

/// Excited-state population after the full sequence.
pub fn excitation_probability_full(p: &RamseyProtocol) -> Result<f64> {
    Ok(ramsey_sequence(p)?.rho22())
}

/// Near-resonance fringe `½[1 + e^{-αT} cos((θ - β)T)]`.
pub fn excitation_probability_resonant(
    theta: f64,
    beta: f64,
    alpha: f64,
    ramsey_time: f64,
) -> Result<f64> {
    finite("theta", theta)?;
    finite("beta", beta)?;
    non_negative("alpha", alpha)?;
    non_negative("T", ramsey_time)?;
    let envelope = (-alpha * ramsey_time).exp();
    Ok(0.5 * (1.0 + FRINGE_SIGN * envelope * ((theta - beta) * ramsey_time).cos()))
}

/// `excitation_probability_full` as a function of drive frequency, for
/// callers that sweep `ω` on a fixed template.
pub fn excitation_at_omega(template: &RamseyProtocol, omega: f64) -> Result<f64> {
    excitation_probability_full(&template.with_omega(omega)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::max_abs;
    use std::f64::consts::FRAC_PI_4;

    fn protocol(lambda: f64, theta: f64, t: f64, alpha: f64, beta: f64) -> RamseyProtocol {
        let tau = optimal_pulse_time(lambda).unwrap();
        RamseyProtocol::new(
            PulseParams::from_detuning(lambda, 3.0, theta, tau).unwrap(),
            t,
            DecoherenceSpec::new(alpha, beta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rabi_frequency_examples() {
        assert_eq!(rabi_frequency(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(rabi_frequency(3.0, 8.0).unwrap(), 5.0);
        // √(1 + 2.5e-5) = 1 + 1.25e-5 - 7.8125e-11 + ...
        let series = 1.0 + 1.25e-5 - 0.5 * 1.25e-5 * 1.25e-5;
        assert!((rabi_frequency(1.0, 0.01).unwrap() - series).abs() < 1e-14);
        assert!(rabi_frequency(0.0, 1.0).is_err());
        assert!(rabi_frequency(-1.0, 1.0).is_err());
    }

    #[test]
    fn rabi_frequency_bounds_lambda() {
        let p = PulseParams::from_detuning(2.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.rabi_frequency(), 2.0);
        let p = PulseParams::from_detuning(2.0, 0.0, 1e-3, 1.0).unwrap();
        assert!(p.rabi_frequency() > 2.0);
    }

    #[test]
    fn optimal_pulse_time_examples() {
        assert_eq!(optimal_pulse_time(1.0).unwrap(), FRAC_PI_4);
        assert!((optimal_pulse_time(FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(optimal_pulse_time(2.0).unwrap(), PI / 8.0);
        assert!(optimal_pulse_time(0.0).is_err());
    }

    #[test]
    fn pulse_unitary_at_zero_is_identity() {
        let u = pulse_unitary(1.3, 0.4, 0.0, 0.7).unwrap();
        assert!(max_abs(&(u.matrix() - Mat2::identity())) < 1e-15);
    }

    #[test]
    fn pulse_unitary_full_flip() {
        let u = pulse_unitary(1.0, 0.0, PI / 2.0, 0.0).unwrap();
        let want = Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, -1.0), c(0.0, 0.0));
        assert!(max_abs(&(u.matrix() - want)) < 1e-15);
    }

    #[test]
    fn pulse_unitary_rejects_non_finite() {
        assert!(pulse_unitary(1.0, f64::NAN, 1.0, 0.0).is_err());
        assert!(pulse_unitary(1.0, 0.0, f64::INFINITY, 0.0).is_err());
        assert!(pulse_unitary(1.0, 0.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn quarter_pulse_splits_population() {
        let u = pulse_unitary(1.0, 0.0, FRAC_PI_4, 0.0).unwrap();
        let rho = apply_unitary(&DensityMatrix2::ground(), &u);
        assert!((rho.rho22() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn free_evolution_zero_time() {
        let rho = DensityMatrix2::new(0.6, 0.4, c(0.2, 0.3));
        let out = free_evolution(&rho, 0.0, &DecoherenceSpec::new(5.0, 1.0).unwrap(), 2.0).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn free_evolution_half_life() {
        let t = 3.0;
        let rho = DensityMatrix2::new(0.5, 0.5, c(0.5, 0.0));
        let gamma = DecoherenceSpec::new(2f64.ln() / t, 0.0).unwrap();
        let out = free_evolution(&rho, t, &gamma, 0.0).unwrap();
        assert!((out.rho12() - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn free_evolution_keeps_populations_bitwise() {
        let rho = DensityMatrix2::new(0.137, 0.863, c(0.21, -0.17));
        for &(a, b) in &[(0.0, 0.0), (0.3, -2.0), (40.0, 7.0)] {
            let out = free_evolution(&rho, 1.7, &DecoherenceSpec::new(a, b).unwrap(), 4.2).unwrap();
            assert_eq!(out.rho11().to_bits(), rho.rho11().to_bits());
            assert_eq!(out.rho22().to_bits(), rho.rho22().to_bits());
        }
    }

    #[test]
    fn free_evolution_rejects_bad_input() {
        let rho = DensityMatrix2::ground();
        assert!(free_evolution(&rho, -1.0, &DecoherenceSpec::none(), 0.0).is_err());
        assert!(DecoherenceSpec::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn ideal_sequence_reaches_excited_state() {
        for &t in &[0.5, 10.0, 123.4] {
            let p = protocol(1.0, 0.0, t, 0.0, 0.0);
            assert!((excitation_probability_full(&p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn result_is_independent_of_transition_frequency() {
        let tau = FRAC_PI_4;
        let gamma = DecoherenceSpec::new(0.1, 0.02).unwrap();
        let reference = {
            let pulse = PulseParams::from_detuning(1.0, 0.0, 0.05, tau).unwrap();
            excitation_probability_full(&RamseyProtocol::new(pulse, 10.0, gamma).unwrap()).unwrap()
        };
        for &w21 in &[1.0, 17.0, 250.0] {
            let pulse = PulseParams::from_detuning(1.0, w21, 0.05, tau).unwrap();
            let p = excitation_probability_full(&RamseyProtocol::new(pulse, 10.0, gamma).unwrap())
                .unwrap();
            assert!((p - reference).abs() < 1e-10, "ω21 = {w21}: {p} vs {reference}");
        }
    }

    #[test]
    fn strong_dephasing_leaves_two_independent_pulses() {
        let p = protocol(1.0, 0.0, 10.0, 1e3, 0.0);
        let rho = ramsey_sequence(&p).unwrap();
        assert!((rho.rho22() - 0.5).abs() < 1e-12);
        assert!((excitation_probability_resonant(0.0, 0.0, 1e3, 10.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn resonant_formula_examples() {
        assert_eq!(excitation_probability_resonant(0.0, 0.0, 0.0, 7.0).unwrap(), 1.0);
        let t = 4.0;
        let a = 2f64.ln() / t;
        let bright = excitation_probability_resonant(0.0, 0.0, a, t).unwrap();
        let dark = excitation_probability_resonant(PI / t, 0.0, a, t).unwrap();
        assert!((bright - 0.75).abs() < 1e-15);
        assert!((dark - 0.25).abs() < 1e-15);
        for &alpha in &[0.0, 0.1, 3.0] {
            let p = excitation_probability_resonant(0.3 + PI / (2.0 * t), 0.3, alpha, t).unwrap();
            assert!((p - 0.5).abs() < 1e-15);
        }
        assert!(excitation_probability_resonant(0.0, 0.0, -1.0, 1.0).is_err());
        assert!(excitation_probability_resonant(0.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn long_pulse_flagged() {
        assert!(protocol(1.0, 0.0, 5.0, 0.0, 0.0).diagnostics().len() == 1);
        assert!(protocol(1.0, 0.0, 10.0, 0.0, 0.0).diagnostics().is_empty());
    }
}
