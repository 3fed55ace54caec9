//! Closed-form propagators against direct integration of the Schrödinger
//! equation, both in the drive frame and in the lab frame with an explicitly
//! time-dependent drive.

use num_complex::Complex64 as C64;
use ramsey_core::ramsey::{
    optimal_pulse_time, pulse_unitary, ramsey_sequence, DecoherenceSpec, PulseParams,
    RamseyProtocol,
};
use ramsey_core::statespace::{max_abs, Mat2};

type State = [C64; 2];

fn rk4(psi: State, t0: f64, t1: f64, steps: usize, h: impl Fn(f64) -> Mat2) -> State {
    let f = |t: f64, y: &State| -> State {
        let m = h(t);
        let i = C64::new(0.0, -1.0);
        [
            i * (m[(0, 0)] * y[0] + m[(0, 1)] * y[1]),
            i * (m[(1, 0)] * y[0] + m[(1, 1)] * y[1]),
        ]
    };
    let dt = (t1 - t0) / steps as f64;
    let mut y = psi;
    for n in 0..steps {
        let t = t0 + dt * n as f64;
        let add = |a: &State, b: &State, s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * dt, &add(&y, &k1, 0.5 * dt));
        let k3 = f(t + 0.5 * dt, &add(&y, &k2, 0.5 * dt));
        let k4 = f(t + dt, &add(&y, &k3, dt));
        for j in 0..2 {
            y[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0);
        }
    }
    y
}

fn cplx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn drive_frame_pulse_matches_integration() {
    let (lambda, theta, t, phi) = (1.0, 0.3, 0.7, 0.45);
    let h = move |_t: f64| {
        let e = C64::from_polar(lambda, phi);
        Mat2::new(cplx(0.5 * theta, 0.0), e, e.conj(), cplx(-0.5 * theta, 0.0))
    };
    let u = pulse_unitary(lambda, theta, t, phi).unwrap();
    for col in 0..2 {
        let mut psi = [cplx(0.0, 0.0); 2];
        psi[col] = cplx(1.0, 0.0);
        let out = rk4(psi, 0.0, t, 20_000, h);
        for row in 0..2 {
            let d = (out[row] - u.matrix()[(row, col)]).norm();
            assert!(d <= 1e-8, "U[{row},{col}] off by {d:e}");
        }
    }
}

#[test]
fn lab_frame_sequence_matches_time_dependent_drive() {
    let (lambda, omega21, omega, t_free) = (2.0, 5.0, 5.3, 3.0);
    let tau = optimal_pulse_time(lambda).unwrap();
    let p = RamseyProtocol::new(
        PulseParams::new(lambda, omega, omega21, tau).unwrap(),
        t_free,
        DecoherenceSpec::none(),
    )
    .unwrap();
    let rho = ramsey_sequence(&p).unwrap().to_matrix();

    let driven = move |t: f64| {
        let v = C64::from_polar(lambda, omega * t);
        Mat2::new(cplx(0.0, 0.0), v, v.conj(), cplx(omega21, 0.0))
    };
    let bare = move |_t: f64| Mat2::new(cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(omega21, 0.0));

    let psi = [cplx(1.0, 0.0), cplx(0.0, 0.0)];
    let psi = rk4(psi, 0.0, tau, 20_000, driven);
    let psi = rk4(psi, tau, tau + t_free, 60_000, bare);
    let psi = rk4(psi, tau + t_free, 2.0 * tau + t_free, 20_000, driven);
    let want = Mat2::new(
        psi[0] * psi[0].conj(),
        psi[0] * psi[1].conj(),
        psi[1] * psi[0].conj(),
        psi[1] * psi[1].conj(),
    );
    let d = max_abs(&(rho - want));
    assert!(d <= 1e-8, "lab-frame density differs by {d:e}");
}
