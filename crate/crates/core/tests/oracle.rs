use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use ramsey_core::lindblad::{
    dephasing_channel, dephasing_closed_form, integrate_master, simulate_ramsey_numeric,
    simulate_ramsey_trajectory, IntegratorConfig, LindbladSystem, OracleConfig,
};
use ramsey_core::ramsey::{
    excitation_probability_full, optimal_pulse_time, DecoherenceSpec, PulseParams, RamseyProtocol,
};
use ramsey_core::statespace::{DensityMatrix2, Mat2};

fn protocol(alpha_t: f64, big_theta_t: f64, theta: f64, t: f64) -> RamseyProtocol {
    let lambda = 1.0;
    let beta = theta - big_theta_t / t;
    RamseyProtocol::new(
        PulseParams::from_detuning(lambda, 4.0, theta, optimal_pulse_time(lambda).unwrap()).unwrap(),
        t,
        DecoherenceSpec::new(alpha_t / t, beta).unwrap(),
    )
    .unwrap()
}

#[test]
fn closed_form_agrees_with_master_equation_on_a_coarse_grid() {
    let t = 10.0;
    let mut worst: f64 = 0.0;
    for &at in &[0.0, 1.0, 3.0] {
        for &tt in &[-3.0 * PI, -1.0, 0.0, 2.0, 3.0 * PI] {
            for &theta in &[0.0, 0.05, 0.1] {
                let p = protocol(at, tt, theta, t);
                let a = excitation_probability_full(&p).unwrap();
                let o = simulate_ramsey_numeric(&p, &OracleConfig::default()).unwrap();
                assert!(o.integration.max_trace_defect <= 1e-9);
                assert!(o.integration.max_hermiticity_defect <= 1e-11);
                worst = worst.max((a - o.p_ex).abs());
            }
        }
    }
    assert!(worst <= 1e-6, "worst |analytic - oracle| = {worst:e}");
}

#[test]
fn dephasing_during_pulses_changes_the_answer() {
    let p = protocol(1.0, 0.0, 0.0, 2.0);
    let off = simulate_ramsey_numeric(&p, &OracleConfig::default()).unwrap().p_ex;
    let on = simulate_ramsey_numeric(
        &p,
        &OracleConfig {
            dephase_during_pulses: true,
            ..OracleConfig::default()
        },
    )
    .unwrap()
    .p_ex;
    assert!(on < off);
}

#[test]
fn rk4_is_fourth_order_on_pure_dephasing() {
    let (alpha, beta, t) = (5.0, 20.0, 1.0);
    let sys = LindbladSystem::new(Mat2::zeros(), vec![])
        .unwrap()
        .with_channel(&dephasing_channel(alpha, beta).unwrap());
    let rho0 = DensityMatrix2::new(0.5, 0.5, C64::new(0.5, 0.0));
    let exact = dephasing_closed_form(rho0.rho12(), alpha, beta, t);
    let err = |dt: f64| {
        let cfg = IntegratorConfig::new(dt, 1_000_000).unwrap();
        let out = integrate_master(&rho0, &sys, t, &cfg).unwrap();
        assert!(out.max_trace_defect <= 1e-9);
        (out.state.rho12() - exact).norm()
    };
    let e: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&dt| err(dt)).collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "errors {e:?}");
    }
}

#[test]
fn coherence_never_grows_with_drive_off() {
    let p = RamseyProtocol::new(
        PulseParams::from_detuning(1.0, 0.0, 0.2, optimal_pulse_time(1.0).unwrap()).unwrap(),
        5.0,
        DecoherenceSpec::new(0.4, -0.3).unwrap(),
    )
    .unwrap();
    let tau = p.pulse.tau();
    let mut last: Option<f64> = None;
    simulate_ramsey_trajectory(&p, &OracleConfig::default(), |t, rho| {
        if t > tau + 1e-12 && t < tau + p.ramsey_time() - 1e-12 {
            let m = rho.rho12().norm();
            if let Some(prev) = last {
                assert!(m <= prev + 1e-15, "|rho12| grew at t={t}");
            }
            last = Some(m);
        }
    })
    .unwrap();
    assert!(last.is_some());
}
