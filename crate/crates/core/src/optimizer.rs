//! Relative uncertainty of the fringe and its Lagrange-constrained
//! stationary Ramsey times.
//!
//! With `P = ½(1 + e^{-αT} cos ΘT)` and `δP = |∂P/∂ω| · π/T`, the objective is
//!
//! ```text
//! g(T) = δP/P = π e^{-αT} |sin ΘT| / (1 + e^{-αT} cos ΘT)
//! ```
//!
//! and the stationarity condition is `g'(T) - Λ π/T² = 0`. Writing `x = αT`
//! and `k = Θ/α` the residual becomes `α (dg/dx - Λ̂ π/x²)` with `Λ̂ = αΛ`, so
//! solutions depend only on `(x, k, Λ̂)`. All root finding is done in these
//! rescaled variables and `Λ` arguments to the solver are `Λ̂`.
//!
//! An alternative form of the objective, `(π/2) e^{-αT} sin ΘT / (1 + e^{-αT}
//! cos ΘT)`, and its cleared-denominator stationarity polynomial are provided
//! under the `_printed` names for comparison only.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{finite, non_negative, positive, Error, Result};

/// Denominators smaller than this are reported as poles.
pub const POLE_TOLERANCE: f64 = 1e-9;
/// Accepted rescaled residual at a root.
pub const ROOT_TOLERANCE: f64 = 1e-9;
/// The band that operationalizes "αT of order unity".
pub const ORDER_UNITY_BAND: (f64, f64) = (0.1, 10.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyParams {
    alpha: f64,
    beta: f64,
    theta: f64,
    ramsey_time: f64,
}

impl UncertaintyParams {
    pub fn new(alpha: f64, beta: f64, theta: f64, ramsey_time: f64) -> Result<Self> {
        Ok(Self {
            alpha: non_negative("alpha", alpha)?,
            beta: finite("beta", beta)?,
            theta: finite("theta", theta)?,
            ramsey_time: positive("T", ramsey_time)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ramsey_time(&self) -> f64 {
        self.ramsey_time
    }

    /// Shifted detuning `Θ = θ - β`.
    pub fn big_theta(&self) -> f64 {
        self.theta - self.beta
    }
}

struct Fringe {
    envelope: f64,
    sin: f64,
    cos: f64,
}

impl Fringe {
    fn new(alpha_t: f64, phase: f64) -> Self {
        let (sin, cos) = phase.sin_cos();
        Self {
            envelope: (-alpha_t).exp(),
            sin,
            cos,
        }
    }

    fn denominator(&self) -> f64 {
        1.0 + self.envelope * self.cos
    }
}

fn checked_denominator(f: &Fringe) -> Result<f64> {
    let d = f.denominator();
    if d.abs() < POLE_TOLERANCE {
        Err(Error::Pole { denominator: d })
    } else {
        Ok(d)
    }
}

/// `δP/P` from the fringe as implemented.
pub fn relative_uncertainty(u: &UncertaintyParams) -> Result<f64> {
    let t = u.ramsey_time;
    let f = Fringe::new(u.alpha * t, u.big_theta() * t);
    let d = checked_denominator(&f)?;
    Ok(PI * f.envelope * f.sin.abs() / d)
}

/// Comparison variant with prefactor `π/2` and a signed sine.
pub fn relative_uncertainty_printed(u: &UncertaintyParams) -> Result<f64> {
    let t = u.ramsey_time;
    let f = Fringe::new(u.alpha * t, u.big_theta() * t);
    let d = checked_denominator(&f)?;
    Ok(0.5 * PI * f.envelope * f.sin / d)
}

/// `dg/dT` in physical units. At the zeros of `sin ΘT` the objective has a
/// cusp; there the one-sided slope is ambiguous and the `|sin|` branch with
/// sign zero is used.
pub fn objective_derivative(t: f64, alpha: f64, big_theta: f64) -> Result<f64> {
    let t = positive("T", t)?;
    let alpha = non_negative("alpha", alpha)?;
    let big_theta = finite("Theta", big_theta)?;
    let f = Fringe::new(alpha * t, big_theta * t);
    let d = checked_denominator(&f)?;
    let sign = if f.sin > 0.0 {
        1.0
    } else if f.sin < 0.0 {
        -1.0
    } else {
        0.0
    };
    let n = f.envelope * f.sin.abs();
    let dn = f.envelope * (-alpha * f.sin.abs() + big_theta * f.cos * sign);
    let dd = -f.envelope * (alpha * f.cos + big_theta * f.sin);
    Ok(PI * (dn * d - n * dd) / (d * d))
}

/// `∂/∂T [δP/P - Λ(δω - π/T)]` in physical units.
pub fn stationarity_residual(t: f64, alpha: f64, big_theta: f64, lambda: f64) -> Result<f64> {
    let lambda = finite("Lambda", lambda)?;
    Ok(objective_derivative(t, alpha, big_theta)? - lambda * PI / (t * t))
}

/// Residual in rescaled units: `x = αT`, `k = Θ/α`, `Λ̂ = αΛ`.
pub fn rescaled_residual(x: f64, k: f64, lambda_hat: f64) -> Result<f64> {
    stationarity_residual(x, 1.0, k, lambda_hat)
}

/// Cleared-denominator stationarity polynomial of the printed variant, at
/// `α = 1`:
///
/// `e^{-2x}(k x² - 2Λ cos²) + e^{-x}((k x² - 4Λ) cos - x² sin) - 2Λ`
/// with `sin, cos` evaluated at `k x`.
pub fn printed_stationarity(x: f64, k: f64, lambda_hat: f64) -> Result<f64> {
    let x = positive("alpha_t", x)?;
    let k = finite("Theta/alpha", k)?;
    let l = finite("Lambda", lambda_hat)?;
    let e = (-x).exp();
    let (s, c) = (k * x).sin_cos();
    let x2 = x * x;
    Ok(e * e * (k * x2 - 2.0 * l * c * c) + e * ((k * x2 - 4.0 * l) * c - x2 * s) - 2.0 * l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaritySolution {
    pub t_star: f64,
    pub lambda: f64,
    pub alpha_t: f64,
    pub residual: f64,
}

/// Search interval in `αT`, split into equal cells that are scanned for
/// sign changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub subdivisions: usize,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, subdivisions: usize) -> Result<Self> {
        let lo = positive("bracket_lo", lo)?;
        let hi = finite("bracket_hi", hi)?;
        if hi <= lo {
            return Err(Error::InvalidParameter {
                name: "bracket_hi",
                value: hi,
                reason: "must exceed bracket_lo",
            });
        }
        if subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "subdivisions",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        Ok(Self { lo, hi, subdivisions })
    }
}

impl Default for Bracket {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 50.0,
            subdivisions: 5000,
        }
    }
}

const MAX_BISECTIONS: usize = 200;

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> (f64, f64) {
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return (m, 0.0);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let m = 0.5 * (a + b);
    (m, f(m))
}

/// Which stationarity condition to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Objective {
    /// Derivative of [`relative_uncertainty`].
    #[default]
    Recomputed,
    /// [`printed_stationarity`].
    Printed,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Recomputed => "recomputed",
            Objective::Printed => "printed",
        }
    }

    fn residual(&self, x: f64, k: f64, lambda_hat: f64) -> f64 {
        match self {
            Objective::Recomputed => rescaled_residual(x, k, lambda_hat),
            Objective::Printed => printed_stationarity(x, k, lambda_hat),
        }
        .unwrap_or(f64::NAN)
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "recomputed" => Ok(Objective::Recomputed),
            "printed" => Ok(Objective::Printed),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

/// Every stationary point of the recomputed objective in the bracket.
/// `lambda_hat` is the rescaled multiplier `αΛ`.
pub fn solve_optimal_t(
    alpha: f64,
    big_theta: f64,
    lambda_hat: f64,
    bracket: &Bracket,
) -> Result<Vec<StationaritySolution>> {
    solve_optimal_t_with(Objective::Recomputed, alpha, big_theta, lambda_hat, bracket)
}

/// Sign flips caused by the cusps of `|sin ΘT|` converge to a point with a
/// large residual and are dropped.
pub fn solve_optimal_t_with(
    objective: Objective,
    alpha: f64,
    big_theta: f64,
    lambda_hat: f64,
    bracket: &Bracket,
) -> Result<Vec<StationaritySolution>> {
    let alpha = positive("alpha", alpha)?;
    let k = finite("Theta", big_theta)? / alpha;
    let lambda_hat = finite("Lambda", lambda_hat)?;
    let residual = |x: f64| objective.residual(x, k, lambda_hat);

    let n = bracket.subdivisions;
    let step = (bracket.hi - bracket.lo) / n as f64;
    let node = |i: usize| if i == n { bracket.hi } else { bracket.lo + step * i as f64 };

    let mut roots = Vec::new();
    let mut a = node(0);
    let mut fa = residual(a);
    let mut any_sign_change = false;
    for i in 1..=n {
        let b = node(i);
        let fb = residual(b);
        let candidate = if fa == 0.0 {
            Some((a, 0.0))
        } else if fa.is_finite() && fb.is_finite() && (fa > 0.0) != (fb > 0.0) && fb != 0.0 {
            any_sign_change = true;
            Some(bisect(&residual, a, b, fa))
        } else {
            None
        };
        if let Some((x, r)) = candidate {
            if r.abs() <= ROOT_TOLERANCE {
                roots.push(StationaritySolution {
                    t_star: x / alpha,
                    lambda: lambda_hat,
                    alpha_t: x,
                    residual: r,
                });
            }
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(StationaritySolution {
            t_star: a / alpha,
            lambda: lambda_hat,
            alpha_t: a,
            residual: 0.0,
        });
    }
    if roots.is_empty() && !any_sign_change {
        return Err(Error::NoSignChange {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaBranch {
    Plus,
    Minus,
}

impl ThetaBranch {
    pub fn sign(&self) -> f64 {
        match self {
            ThetaBranch::Plus => 1.0,
            ThetaBranch::Minus => -1.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ThetaBranch::Plus => "+",
            ThetaBranch::Minus => "-",
        }
    }
}

impl fmt::Display for ThetaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    /// A root with `αT` inside [`ORDER_UNITY_BAND`].
    Root,
    /// A root outside the band.
    RootOutsideBand,
    /// No stationary point in the band.
    NoInteriorRoot,
    /// The solver itself failed.
    Failed(String),
}

impl CellStatus {
    pub fn label(&self) -> String {
        match self {
            CellStatus::Root => "root".into(),
            CellStatus::RootOutsideBand => "root-outside-band".into(),
            CellStatus::NoInteriorRoot => "no-interior-root".into(),
            CellStatus::Failed(msg) => format!("error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub lambda: f64,
    pub branch: ThetaBranch,
    pub solution: Option<StationaritySolution>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn in_band(x: f64) -> bool {
    (ORDER_UNITY_BAND.0..=ORDER_UNITY_BAND.1).contains(&x)
}

impl SweepTable {
    /// Min, median and max `αT` over roots from cells with `Λ ≠ 0`.
    pub fn constrained_summary(&self) -> Option<SweepSummary> {
        let mut xs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.lambda != 0.0)
            .filter_map(|r| r.solution.map(|s| s.alpha_t))
            .collect();
        if xs.is_empty() {
            return None;
        }
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let median = if n % 2 == 1 {
            xs[n / 2]
        } else {
            0.5 * (xs[n / 2 - 1] + xs[n / 2])
        };
        Some(SweepSummary {
            min: xs[0],
            median,
            max: xs[n - 1],
            count: n,
        })
    }

    /// Rows from `Λ = 0` cells that carry a root inside the band.
    pub fn unconstrained_interior_roots(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.lambda == 0.0 && r.status == CellStatus::Root)
    }
}

/// `count` log-spaced values on `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        n => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n - 1 => hi,
                    _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

pub fn default_alphas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

/// `Λ̂ = 0` followed by nine log-spaced values on `[0.1, 10]`.
pub fn default_lambdas() -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(logspace(0.1, 10.0, 9));
    v
}

fn solve_cell(
    objective: Objective,
    alpha: f64,
    lambda: f64,
    branch: ThetaBranch,
    bracket: &Bracket,
) -> Vec<SweepRow> {
    let row = |solution, status| SweepRow {
        alpha,
        lambda,
        branch,
        solution,
        status,
    };
    match solve_optimal_t_with(objective, alpha, branch.sign() * alpha, lambda, bracket) {
        Ok(roots) => {
            let rows: Vec<SweepRow> = roots
                .into_iter()
                .map(|s| {
                    let status = if in_band(s.alpha_t) {
                        CellStatus::Root
                    } else {
                        CellStatus::RootOutsideBand
                    };
                    row(Some(s), status)
                })
                .collect();
            if rows.iter().any(|r| r.status == CellStatus::Root) {
                rows
            } else {
                let mut rows = rows;
                rows.push(row(None, CellStatus::NoInteriorRoot));
                rows
            }
        }
        Err(Error::NoSignChange { .. }) => vec![row(None, CellStatus::NoInteriorRoot)],
        Err(e) => vec![row(None, CellStatus::Failed(e.to_string()))],
    }
}

/// Solves every `(α, Λ̂, branch)` cell with `Θ = ±α`. Rows are in grid order
/// (α outermost, then Λ̂, then `+` before `-`), one row per root.
pub fn order_unity_sweep(
    alphas: &[f64],
    lambdas: &[f64],
    bracket: &Bracket,
    objective: Objective,
) -> Result<SweepTable> {
    if alphas.is_empty() || lambdas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let cells: Vec<(f64, f64, ThetaBranch)> = alphas
        .iter()
        .flat_map(|&a| {
            lambdas.iter().flat_map(move |&l| {
                [ThetaBranch::Plus, ThetaBranch::Minus].map(|b| (a, l, b))
            })
        })
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(a, l, b)| solve_cell(objective, a, l, b, bracket))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SweepTable { rows })
}
