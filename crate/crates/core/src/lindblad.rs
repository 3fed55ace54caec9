//! Fixed-step RK4 integration of the two-level Lindblad master equation,
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})
//! ```
//!
//! and a numerical replay of the Ramsey sequence built on it. The replay is
//! the reference every closed form in [`crate::ramsey`] is checked against,
//! so it shares none of that module's propagators: it integrates in the frame
//! co-rotating with the drive, where both the pulse and the free-interval
//! Hamiltonians are time independent.

use num_complex::Complex64 as C64;

use crate::error::{non_negative, positive, Error, Result};
use crate::ramsey::RamseyProtocol;
use crate::statespace::{c, commutator, max_abs, pauli_x, pauli_z, DensityMatrix2, Mat2};

/// Hermiticity tolerance for a system Hamiltonian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Steps per fastest timescale used by automatic step sizing.
const RESOLUTION: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSystem {
    h: Mat2,
    jumps: Vec<Mat2>,
}

impl LindbladSystem {
    pub fn new(h: Mat2, jumps: Vec<Mat2>) -> Result<Self> {
        let defect = max_abs(&(h - h.adjoint()));
        if !(defect <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self { h, jumps })
    }

    pub fn hamiltonian(&self) -> &Mat2 {
        &self.h
    }

    pub fn jump_ops(&self) -> &[Mat2] {
        &self.jumps
    }

    /// Adds the channel's Hamiltonian shift and jump operator.
    pub fn with_channel(mut self, channel: &DephasingChannel) -> Self {
        self.h += channel.h_shift;
        if channel.jump != Mat2::zeros() {
            self.jumps.push(channel.jump);
        }
        self
    }

    fn rhs(&self, rho: &Mat2) -> Mat2 {
        let mut out = commutator(&self.h, rho) * c(0.0, -1.0);
        for l in &self.jumps {
            let ld = l.adjoint();
            let ldl = ld * l;
            out += l * rho * ld - (ldl * rho + rho * ldl) * c(0.5, 0.0);
        }
        out
    }
}

/// Right-hand side of the master equation at `ρ`.
pub fn lindblad_rhs(rho: &DensityMatrix2, sys: &LindbladSystem) -> Mat2 {
    sys.rhs(&rho.to_matrix())
}

/// Pure-dephasing realization of `γ = α + iβ`: `L = √(α/2) σz` damps the
/// coherence as `e^{-αt}` and `H_shift = -(β/2) σz` rotates `ρ12` as `e^{iβt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingChannel {
    pub h_shift: Mat2,
    pub jump: Mat2,
}

pub fn dephasing_channel(alpha: f64, beta: f64) -> Result<DephasingChannel> {
    non_negative("alpha", alpha)?;
    crate::error::finite("beta", beta)?;
    Ok(DephasingChannel {
        h_shift: pauli_z() * c(-0.5 * beta, 0.0),
        jump: pauli_z() * c((0.5 * alpha).sqrt(), 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub max_step_count: u64,
}

impl IntegratorConfig {
    pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

    pub fn new(dt: f64, max_step_count: u64) -> Result<Self> {
        positive("dt", dt)?;
        if max_step_count == 0 {
            return Err(Error::InvalidParameter {
                name: "max_step_count",
                value: 0.0,
                reason: "must be positive",
            });
        }
        Ok(Self { dt, max_step_count })
    }

    /// Step resolving the fastest rate in `rates` by three decades.
    pub fn resolving(rates: &[f64]) -> Self {
        let fastest = rates.iter().map(|r| r.abs()).fold(0.0, f64::max);
        let dt = if fastest > 0.0 { 1.0 / (RESOLUTION * fastest) } else { 1.0 };
        Self {
            dt,
            max_step_count: Self::DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOutcome {
    pub state: DensityMatrix2,
    pub steps: u64,
    /// Largest `|Tr ρ - 1|` seen along the trajectory.
    pub max_trace_defect: f64,
    /// Largest `max|ρ - ρ†|` produced by a step before re-symmetrization.
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl IntegrationOutcome {
    fn start(rho: &DensityMatrix2) -> Self {
        Self {
            state: *rho,
            steps: 0,
            max_trace_defect: (rho.trace() - 1.0).abs(),
            max_hermiticity_defect: 0.0,
            min_eigenvalue: rho.eigenvalues()[0],
        }
    }

    fn absorb(&mut self, other: &IntegrationOutcome) {
        self.state = other.state;
        self.steps += other.steps;
        self.max_trace_defect = self.max_trace_defect.max(other.max_trace_defect);
        self.max_hermiticity_defect = self.max_hermiticity_defect.max(other.max_hermiticity_defect);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
    }
}

/// Number of equal steps covering `t_final` with step at most `dt`.
fn step_count(t_final: f64, dt: f64) -> f64 {
    let n = t_final / dt;
    let nearest = n.round();
    if (n - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest.max(1.0)
    } else {
        n.ceil().max(1.0)
    }
}

pub fn integrate_master(
    rho0: &DensityMatrix2,
    sys: &LindbladSystem,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<IntegrationOutcome> {
    integrate_master_with(rho0, sys, t_final, cfg, |_, _| {})
}

/// As [`integrate_master`], calling `observer(t, ρ)` at the start and after
/// every step.
pub fn integrate_master_with(
    rho0: &DensityMatrix2,
    sys: &LindbladSystem,
    t_final: f64,
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(f64, &DensityMatrix2),
) -> Result<IntegrationOutcome> {
    non_negative("t_final", t_final)?;
    positive("dt", cfg.dt)?;
    let mut outcome = IntegrationOutcome::start(rho0);
    observer(0.0, rho0);
    if t_final == 0.0 {
        return Ok(outcome);
    }
    let n = step_count(t_final, cfg.dt);
    if n > cfg.max_step_count as f64 {
        return Err(Error::StepLimit {
            required: n.min(u64::MAX as f64) as u64,
            limit: cfg.max_step_count,
        });
    }
    let steps = n as u64;
    let h = t_final / n;
    let half = c(0.5 * h, 0.0);
    let full = c(h, 0.0);
    let sixth = c(h / 6.0, 0.0);
    let two = c(2.0, 0.0);

    let mut rho = rho0.to_matrix();
    for i in 1..=steps {
        let k1 = sys.rhs(&rho);
        let k2 = sys.rhs(&(rho + k1 * half));
        let k3 = sys.rhs(&(rho + k2 * half));
        let k4 = sys.rhs(&(rho + k3 * full));
        let next = rho + (k1 + k2 * two + k3 * two + k4) * sixth;
        let (state, herm) = DensityMatrix2::from_matrix_hermitized(&next);
        outcome.max_hermiticity_defect = outcome.max_hermiticity_defect.max(herm);
        outcome.max_trace_defect = outcome.max_trace_defect.max((state.trace() - 1.0).abs());
        outcome.min_eigenvalue = outcome.min_eigenvalue.min(state.eigenvalues()[0]);
        outcome.state = state;
        rho = state.to_matrix();
        observer(i as f64 * h, &state);
    }
    outcome.steps = steps;
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// Per segment, `1e-3 / fastest rate active in that segment`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub step: StepSize,
    pub max_step_count: u64,
    /// Keep the dephasing channel on during the pulses as well. Off by
    /// default: the pulses are taken short enough to ignore decoherence.
    pub dephase_during_pulses: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            step: StepSize::Auto,
            max_step_count: IntegratorConfig::DEFAULT_MAX_STEPS,
            dephase_during_pulses: false,
        }
    }
}

impl OracleConfig {
    pub fn fixed(dt: f64) -> Self {
        Self {
            step: StepSize::Fixed(dt),
            ..Self::default()
        }
    }

    fn segment(&self, rates: &[f64]) -> IntegratorConfig {
        match self.step {
            StepSize::Auto => IntegratorConfig {
                max_step_count: self.max_step_count,
                ..IntegratorConfig::resolving(rates)
            },
            StepSize::Fixed(dt) => IntegratorConfig {
                dt,
                max_step_count: self.max_step_count,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub p_ex: f64,
    /// Final state in the drive frame.
    pub integration: IntegrationOutcome,
}

/// Drive-frame systems for the pulse and the free interval.
fn ramsey_systems(p: &RamseyProtocol, cfg: &OracleConfig) -> Result<(LindbladSystem, LindbladSystem)> {
    let theta = p.pulse.theta();
    let detuning = pauli_z() * c(0.5 * theta, 0.0);
    let drive = pauli_x() * c(p.pulse.lambda(), 0.0);
    let channel = dephasing_channel(p.gamma.alpha(), p.gamma.beta())?;
    let mut pulse = LindbladSystem::new(detuning + drive, Vec::new())?;
    if cfg.dephase_during_pulses {
        pulse = pulse.with_channel(&channel);
    }
    let free = LindbladSystem::new(detuning, Vec::new())?.with_channel(&channel);
    Ok((pulse, free))
}

/// Numerically replays pulse, free interval and pulse from the ground state
/// and returns the final excited-state population.
pub fn simulate_ramsey_numeric(p: &RamseyProtocol, cfg: &OracleConfig) -> Result<OracleOutcome> {
    simulate_ramsey_trajectory(p, cfg, |_, _| {})
}

/// As [`simulate_ramsey_numeric`], reporting `(t, ρ)` along the way with
/// `t` measured from the start of the first pulse.
pub fn simulate_ramsey_trajectory(
    p: &RamseyProtocol,
    cfg: &OracleConfig,
    mut observer: impl FnMut(f64, &DensityMatrix2),
) -> Result<OracleOutcome> {
    let (pulse_sys, free_sys) = ramsey_systems(p, cfg)?;
    let tau = p.pulse.tau();
    let t_free = p.ramsey_time();
    let (alpha, beta) = (p.gamma.alpha(), p.gamma.beta());
    let theta = p.pulse.theta();

    let pulse_rates: Vec<f64> = if cfg.dephase_during_pulses {
        vec![p.pulse.lambda(), theta, alpha, beta]
    } else {
        vec![p.pulse.lambda(), theta]
    };
    let mut pulse_cfg = cfg.segment(&pulse_rates);
    pulse_cfg.dt = pulse_cfg.dt.min(tau);
    let mut free_cfg = cfg.segment(&[theta, alpha, beta]);
    free_cfg.dt = free_cfg.dt.min(t_free);

    let rho0 = DensityMatrix2::ground();
    let mut total = IntegrationOutcome::start(&rho0);

    let seg = integrate_master_with(&rho0, &pulse_sys, tau, &pulse_cfg, |t, r| observer(t, r))?;
    total.absorb(&seg);
    let seg = integrate_master_with(&seg.state, &free_sys, t_free, &free_cfg, |t, r| {
        if t > 0.0 {
            observer(tau + t, r)
        }
    })?;
    total.absorb(&seg);
    let seg = integrate_master_with(&seg.state, &pulse_sys, tau, &pulse_cfg, |t, r| {
        if t > 0.0 {
            observer(tau + t_free + t, r)
        }
    })?;
    total.absorb(&seg);

    Ok(OracleOutcome {
        p_ex: total.state.rho22(),
        integration: total,
    })
}

/// Closed-form `ρ12(t)` under [`dephasing_channel`] with no other
/// Hamiltonian: `ρ12(0) e^{(iβ - α)t}`.
pub fn dephasing_closed_form(rho12: C64, alpha: f64, beta: f64, t: f64) -> C64 {
    rho12 * C64::from_polar((-alpha * t).exp(), beta * t)
}
