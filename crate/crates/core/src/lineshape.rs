//! Lineshape scans over the drive frequency, fringe width and contrast.
//!
//! The width is taken at the mid-contrast level `(P_max + P_min)/2` around
//! the central fringe, i.e. the bright fringe nearest `ω21 + β`. Without
//! dephasing this is the usual half maximum.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{simulate_ramsey_numeric, OracleConfig};
use crate::ramsey::{excitation_probability_full, excitation_probability_resonant, RamseyProtocol};

/// Values below this are indistinguishable from a flat line.
pub const MIN_CONTRAST: f64 = 1e-6;

const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// Composed closed-form propagators.
    Analytic,
    /// Numerical master-equation replay.
    Oracle,
    /// Near-resonance fringe formula.
    Resonant,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Oracle => "oracle",
            Source::Resonant => "resonant",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytic" => Ok(Source::Analytic),
            "oracle" => Ok(Source::Oracle),
            "resonant" => Ok(Source::Resonant),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineshapeScan {
    omegas: Vec<f64>,
    probabilities: Vec<f64>,
    source: Source,
    reference_center: f64,
}

fn check_grid(omegas: &[f64]) -> Result<()> {
    if omegas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, w) in omegas.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::UnsortedGrid { index: i + 1 });
        }
    }
    Ok(())
}

impl LineshapeScan {
    /// `reference_center` is where the central fringe is expected
    /// (`ω21 + β` for a Ramsey scan).
    pub fn new(
        omegas: Vec<f64>,
        probabilities: Vec<f64>,
        source: Source,
        reference_center: f64,
    ) -> Result<Self> {
        check_grid(&omegas)?;
        if probabilities.len() != omegas.len() {
            return Err(Error::DimensionMismatch {
                expected: omegas.len(),
                found: probabilities.len(),
            });
        }
        for &p in &probabilities {
            if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
                return Err(Error::InvalidParameter {
                    name: "p_ex",
                    value: p,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        Ok(Self {
            omegas,
            probabilities,
            source,
            reference_center,
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn reference_center(&self) -> f64 {
        self.reference_center
    }

    /// Largest grid step.
    pub fn spacing(&self) -> f64 {
        self.omegas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Unrefined `max - min` over the grid samples.
    pub fn raw_contrast(&self) -> f64 {
        let (lo, hi) = self
            .probabilities
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            });
        hi - lo
    }
}

/// `count` equally spaced points on `[center - half_span, center + half_span]`.
pub fn centered_grid(center: f64, half_span: f64, count: usize) -> Vec<f64> {
    linspace(center - half_span, center + half_span, count)
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        n => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Evaluates `P_ex` at each drive frequency with the detuning recomputed
/// per point. Rows come back in grid order.
pub fn scan_lineshape(
    template: &RamseyProtocol,
    omegas: &[f64],
    source: Source,
    oracle: &OracleConfig,
) -> Result<LineshapeScan> {
    check_grid(omegas)?;
    let probabilities = omegas
        .par_iter()
        .map(|&omega| {
            let p = template.with_omega(omega)?;
            match source {
                Source::Analytic => excitation_probability_full(&p),
                Source::Oracle => simulate_ramsey_numeric(&p, oracle).map(|o| o.p_ex),
                Source::Resonant => excitation_probability_resonant(
                    p.pulse.theta(),
                    p.gamma.beta(),
                    p.gamma.alpha(),
                    p.ramsey_time(),
                ),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let center = template.pulse.omega21() + template.gamma.beta();
    LineshapeScan::new(omegas.to_vec(), probabilities, source, center)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwhmResult {
    pub center: f64,
    pub width: f64,
    pub contrast: f64,
    /// The mid-contrast level the width is measured at.
    pub level: f64,
}

/// Vertex of the parabola through three neighbouring samples.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let h0 = x[1] - x[0];
    let h1 = x[2] - x[1];
    let d0 = (y[1] - y[0]) / h0;
    let d1 = (y[2] - y[1]) / h1;
    let curvature = 2.0 * (d1 - d0) / (h0 + h1);
    if curvature == 0.0 {
        return (x[1], y[1]);
    }
    // p(x) = y1 + s (x - x1) + ½ curvature (x - x1)²
    let slope = d0 + 0.5 * curvature * h0;
    let dx = (-slope / curvature).clamp(-h0, h1);
    (x[1] + dx, y[1] + slope * dx + 0.5 * curvature * dx * dx)
}

fn refined(scan: &LineshapeScan, i: usize) -> (f64, f64) {
    let (w, p) = (&scan.omegas, &scan.probabilities);
    if i == 0 || i + 1 >= w.len() {
        return (w[i], p[i]);
    }
    parabolic_vertex([w[i - 1], w[i], w[i + 1]], [p[i - 1], p[i], p[i + 1]])
}

fn extreme_indices(p: &[f64]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, &v) in p.iter().enumerate() {
        if v < p[imin] {
            imin = i;
        }
        if v > p[imax] {
            imax = i;
        }
    }
    (imin, imax)
}

/// `P_max - P_min` with each extremum refined by a parabola through its
/// neighbours.
pub fn fringe_contrast(scan: &LineshapeScan) -> f64 {
    let (imin, imax) = extreme_indices(&scan.probabilities);
    (refined(scan, imax).1 - refined(scan, imin).1).max(0.0)
}

/// Expected contrast of the near-resonance fringe, `e^{-αT}`.
pub fn expected_contrast(alpha: f64, ramsey_time: f64) -> f64 {
    (-alpha * ramsey_time).exp()
}

/// Width of the central fringe at the level midway between its peak and
/// the lower of its two flanking minima. Both minima must be interior grid
/// points.
pub fn fwhm(scan: &LineshapeScan) -> Result<FwhmResult> {
    let (w, p) = (&scan.omegas, &scan.probabilities);
    let n = w.len();
    let global = fringe_contrast(scan);
    if global < MIN_CONTRAST {
        return Err(Error::NoFringe { contrast: global });
    }

    let target = scan.reference_center;
    let peak = (1..n.saturating_sub(1))
        .filter(|&i| p[i] >= p[i - 1] && p[i] >= p[i + 1])
        .min_by(|&a, &b| (w[a] - target).abs().total_cmp(&(w[b] - target).abs()))
        .ok_or(Error::FringeNotBracketed)?;

    let mut lmin = peak;
    while lmin > 0 && p[lmin - 1] <= p[lmin] {
        lmin -= 1;
    }
    let mut rmin = peak;
    while rmin + 1 < n && p[rmin + 1] <= p[rmin] {
        rmin += 1;
    }
    if lmin == 0 || rmin == n - 1 {
        return Err(Error::FringeNotBracketed);
    }

    let p_max = refined(scan, peak).1;
    let p_min = refined(scan, lmin).1.min(refined(scan, rmin).1);
    let contrast = p_max - p_min;
    if contrast < MIN_CONTRAST {
        return Err(Error::NoFringe { contrast });
    }
    let level = 0.5 * (p_max + p_min);

    let crossing = |i: usize, j: usize| w[i] + (level - p[i]) * (w[j] - w[i]) / (p[j] - p[i]);
    let left = (lmin + 1..=peak)
        .rev()
        .find(|&i| p[i - 1] <= level)
        .map(|i| crossing(i - 1, i))
        .ok_or(Error::FringeNotBracketed)?;
    let right = (peak..rmin)
        .find(|&i| p[i + 1] <= level)
        .map(|i| crossing(i, i + 1))
        .ok_or(Error::FringeNotBracketed)?;

    Ok(FwhmResult {
        center: refined(scan, peak).0,
        width: right - left,
        contrast,
        level,
    })
}
