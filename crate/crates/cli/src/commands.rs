use std::f64::consts::{PI, TAU};
use serde::Serialize;

use ramsey_core::cpi::{
    build_product_state, chain_observable, fourier_basis, global_commutator_defect,
    hamiltonian_balance, mirror_probability_check, paired_construction, BipartiteState, CMat,
    ClockModel, QuadratureWindow,
};
use ramsey_core::lindblad::{simulate_ramsey_numeric, OracleConfig};
use ramsey_core::lineshape::{
    expected_contrast, fringe_contrast, fwhm, linspace, scan_lineshape, FwhmResult, LineshapeScan,
    Source,
};
use ramsey_core::optimizer::{
    default_alphas, default_lambdas, order_unity_sweep, Bracket, Objective, SweepRow,
    ORDER_UNITY_BAND,
};
use ramsey_core::ramsey::{
    excitation_probability_full, optimal_pulse_time, DecoherenceSpec, ProtocolWarning,
    PulseParams, RamseyProtocol,
};

use crate::config::{CpiArgs, FwhmArgs, OptimizeArgs, Origins, RamseyArgs, ScanArgs, Tau};
use crate::error::CliError;
use crate::output::{csv_string, emit, json_string, num, Format};
use crate::svg::{render, Plot, Series, Style};

/// `|p_analytic - p_oracle|` above this is a numerical failure.
pub const AGREEMENT_THRESHOLD: f64 = 1e-5;

const DEFAULT_GRID_COUNT: usize = 1024;

struct PhysicsInput {
    lambda: Option<f64>,
    omega21: Option<f64>,
    theta: Option<f64>,
    omega: Option<f64>,
    tau: Option<Tau>,
    ramsey_time: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    dephase_during_pulses: Option<bool>,
}

macro_rules! physics_of {
    ($a:expr) => {
        PhysicsInput {
            lambda: $a.lambda,
            omega21: $a.omega21,
            theta: $a.theta,
            omega: $a.omega,
            tau: $a.tau,
            ramsey_time: $a.ramsey_time,
            alpha: $a.alpha,
            beta: $a.beta,
            dephase_during_pulses: $a.dephase_during_pulses,
        }
    };
}

fn finite(o: &Origins, key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(o.invalid(key, format!("must be finite, got {v}")))
    }
}

fn positive(o: &Origins, key: &str, v: f64) -> Result<f64, CliError> {
    if finite(o, key, v)? > 0.0 {
        Ok(v)
    } else {
        Err(o.invalid(key, format!("must be > 0, got {v}")))
    }
}

fn non_negative(o: &Origins, key: &str, v: f64) -> Result<f64, CliError> {
    if finite(o, key, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(o.invalid(key, format!("must be >= 0, got {v}")))
    }
}

fn format_of(o: &Origins, value: Option<&str>, default: Format) -> Result<Format, CliError> {
    match value {
        None => Ok(default),
        Some(s) => Format::parse(s).ok_or_else(|| o.invalid("format", format!("expected csv or json, got `{s}`"))),
    }
}

struct Physics {
    protocol: RamseyProtocol,
    oracle: OracleConfig,
}

fn resolve_physics(p: &PhysicsInput, o: &Origins) -> Result<Physics, CliError> {
    let lambda = positive(o, "lambda", p.lambda.unwrap_or(1.0))?;
    let omega21 = finite(o, "omega21", p.omega21.unwrap_or(0.0))?;
    let omega = match (p.theta, p.omega) {
        (Some(_), Some(_)) => return Err(o.invalid("omega", "give either theta or omega, not both")),
        (_, Some(w)) => finite(o, "omega", w)?,
        (t, None) => omega21 + finite(o, "theta", t.unwrap_or(0.0))?,
    };
    let tau = match p.tau.unwrap_or(Tau::Auto) {
        Tau::Auto => optimal_pulse_time(lambda)?,
        Tau::Value(v) => positive(o, "tau", v)?,
    };
    let ramsey_time = positive(o, "ramsey_time", p.ramsey_time.unwrap_or(10.0))?;
    let alpha = non_negative(o, "alpha", p.alpha.unwrap_or(0.0))?;
    let beta = finite(o, "beta", p.beta.unwrap_or(0.0))?;
    let protocol = RamseyProtocol::new(
        PulseParams::new(lambda, omega, omega21, tau)?,
        ramsey_time,
        DecoherenceSpec::new(alpha, beta)?,
    )?;
    for w in protocol.diagnostics() {
        match w {
            ProtocolWarning::LongPulse { tau, ramsey_time } => eprintln!(
                "warning: pulse duration {} exceeds a tenth of the Ramsey time {}",
                num(tau),
                num(ramsey_time)
            ),
        }
    }
    Ok(Physics {
        protocol,
        oracle: OracleConfig {
            dephase_during_pulses: p.dephase_during_pulses.unwrap_or(false),
            ..OracleConfig::default()
        },
    })
}

#[derive(Serialize)]
struct RamseyRecord {
    p_analytic: f64,
    p_oracle: f64,
    abs_diff: f64,
    lambda: f64,
    omega21: f64,
    omega: f64,
    theta: f64,
    tau: f64,
    ramsey_time: f64,
    alpha: f64,
    beta: f64,
    oracle_steps: u64,
    max_trace_defect: f64,
    max_hermiticity_defect: f64,
    min_eigenvalue: f64,
}

pub fn cmd_ramsey(args: RamseyArgs, o: &Origins) -> Result<(), CliError> {
    let format = format_of(o, args.format.as_deref(), Format::Json)?;
    let ph = resolve_physics(&physics_of!(args), o)?;
    let p = &ph.protocol;
    let p_analytic = excitation_probability_full(p)?;
    let oracle = simulate_ramsey_numeric(p, &ph.oracle)?;
    let abs_diff = (p_analytic - oracle.p_ex).abs();
    let rec = RamseyRecord {
        p_analytic,
        p_oracle: oracle.p_ex,
        abs_diff,
        lambda: p.pulse.lambda(),
        omega21: p.pulse.omega21(),
        omega: p.pulse.omega(),
        theta: p.pulse.theta(),
        tau: p.pulse.tau(),
        ramsey_time: p.ramsey_time(),
        alpha: p.gamma.alpha(),
        beta: p.gamma.beta(),
        oracle_steps: oracle.integration.steps,
        max_trace_defect: oracle.integration.max_trace_defect,
        max_hermiticity_defect: oracle.integration.max_hermiticity_defect,
        min_eigenvalue: oracle.integration.min_eigenvalue,
    };
    let text = match format {
        Format::Json => json_string(&rec)?,
        Format::Csv => csv_string(
            &["p_analytic", "p_oracle", "abs_diff"],
            &[vec![num(rec.p_analytic), num(rec.p_oracle), num(rec.abs_diff)]],
        )?,
    };
    emit(args.out.as_deref(), &text)?;
    if abs_diff > AGREEMENT_THRESHOLD {
        return Err(CliError::numerical(format!(
            "analytic and oracle disagree by {} (threshold {})",
            num(abs_diff),
            num(AGREEMENT_THRESHOLD)
        )));
    }
    Ok(())
}

fn parse_sources(o: &Origins, s: Option<&str>) -> Result<Vec<Source>, CliError> {
    match s.unwrap_or("analytic") {
        "both" => Ok(vec![Source::Analytic, Source::Oracle]),
        other => other
            .parse::<Source>()
            .map(|s| vec![s])
            .map_err(|e| o.invalid("source", format!("{e}; expected analytic, oracle, both or resonant"))),
    }
}

fn grid(
    o: &Origins,
    p: &RamseyProtocol,
    min: Option<f64>,
    max: Option<f64>,
    count: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    let center = p.pulse.omega21() + p.gamma.beta();
    let half = 2.0 * PI / p.ramsey_time();
    let lo = finite(o, "grid_min", min.unwrap_or(center - half))?;
    let hi = finite(o, "grid_max", max.unwrap_or(center + half))?;
    let n = count.unwrap_or(DEFAULT_GRID_COUNT);
    if n < 2 {
        return Err(o.invalid("grid_count", format!("must be >= 2, got {n}")));
    }
    if hi <= lo {
        return Err(o.invalid("grid_max", format!("must exceed grid_min ({})", num(lo))));
    }
    Ok(linspace(lo, hi, n))
}

fn scans(ph: &Physics, grid: &[f64], sources: &[Source]) -> Result<Vec<LineshapeScan>, CliError> {
    sources
        .iter()
        .map(|&s| scan_lineshape(&ph.protocol, grid, s, &ph.oracle).map_err(CliError::from))
        .collect()
}

fn scan_csv(scans: &[LineshapeScan]) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = scans
        .iter()
        .flat_map(|s| {
            s.omegas()
                .iter()
                .zip(s.probabilities())
                .map(move |(w, p)| vec![num(*w), num(*p), s.source().to_string()])
        })
        .collect();
    csv_string(&["omega", "p_ex", "source"], &rows)
}

#[derive(Serialize)]
struct ScanJson<'a> {
    source: &'a str,
    omega: &'a [f64],
    p_ex: &'a [f64],
}

fn scan_json(scans: &[LineshapeScan]) -> Result<String, CliError> {
    let v: Vec<ScanJson> = scans
        .iter()
        .map(|s| ScanJson {
            source: s.source().as_str(),
            omega: s.omegas(),
            p_ex: s.probabilities(),
        })
        .collect();
    json_string(&v)
}

fn lineshape_plot(scans: &[LineshapeScan], p: &RamseyProtocol, widths: &[FwhmResult]) -> Plot {
    let series = scans
        .iter()
        .enumerate()
        .map(|(i, s)| Series {
            label: s.source().to_string(),
            points: s.omegas().iter().copied().zip(s.probabilities().iter().copied()).collect(),
            style: if i == 0 { Style::Line } else { Style::Dashed },
        })
        .collect();
    let mut plot = Plot {
        title: format!(
            "Ramsey lineshape (T = {}, alpha T = {})",
            num(p.ramsey_time()),
            num(p.gamma.alpha() * p.ramsey_time())
        ),
        x_label: "drive frequency omega".into(),
        y_label: "excitation probability".into(),
        series,
        vlines: vec![(p.pulse.omega21() + p.gamma.beta(), "omega21 + beta".into())],
        ..Plot::default()
    };
    if let Some(r) = widths.first() {
        plot.hlines.push((r.level, format!("mid-contrast, width {:.5}", r.width)));
    }
    plot
}

pub fn cmd_scan(args: ScanArgs, o: &Origins) -> Result<(), CliError> {
    let format = format_of(o, args.format.as_deref(), Format::Csv)?;
    let sources = parse_sources(o, args.source.as_deref())?;
    let ph = resolve_physics(&physics_of!(args), o)?;
    let g = grid(o, &ph.protocol, args.grid_min, args.grid_max, args.grid_count)?;
    let scans = scans(&ph, &g, &sources)?;
    let text = match format {
        Format::Csv => scan_csv(&scans)?,
        Format::Json => scan_json(&scans)?,
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.svg {
        emit(Some(path), &render(&lineshape_plot(&scans, &ph.protocol, &[])))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FwhmRecord {
    source: String,
    center: f64,
    width: f64,
    contrast: f64,
    grid_spacing: f64,
}

pub fn cmd_fwhm(args: FwhmArgs, o: &Origins) -> Result<(), CliError> {
    let format = format_of(o, args.format.as_deref(), Format::Csv)?;
    let sources = parse_sources(o, args.source.as_deref())?;
    let ph = resolve_physics(&physics_of!(args), o)?;
    let p = &ph.protocol;
    let g = grid(o, p, args.grid_min, args.grid_max, args.grid_count)?;
    let scans = scans(&ph, &g, &sources)?;
    if let Some(path) = &args.scan_out {
        emit(Some(path), &scan_csv(&scans)?)?;
    }
    let results = scans
        .iter()
        .map(|s| fwhm(s).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let records: Vec<FwhmRecord> = scans
        .iter()
        .zip(&results)
        .map(|(s, r)| FwhmRecord {
            source: s.source().to_string(),
            center: r.center,
            width: r.width,
            contrast: r.contrast,
            grid_spacing: s.spacing(),
        })
        .collect();
    let t = p.ramsey_time();
    for r in &records {
        eprintln!(
            "fwhm {}: width={} pi/T={} center={} contrast={} exp(-alpha T)={} spacing={}",
            r.source,
            num(r.width),
            num(PI / t),
            num(r.center),
            num(r.contrast),
            num(expected_contrast(p.gamma.alpha(), t)),
            num(r.grid_spacing)
        );
    }
    let text = match format {
        Format::Csv => csv_string(
            &["source", "center", "width", "contrast", "grid_spacing"],
            &records
                .iter()
                .map(|r| vec![r.source.clone(), num(r.center), num(r.width), num(r.contrast), num(r.grid_spacing)])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => json_string(&records)?,
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.svg {
        emit(Some(path), &render(&lineshape_plot(&scans, p, &results)))?;
    }
    if let Some(path) = &args.decay_svg {
        let alpha_ts = args
            .decay_alpha_t
            .clone()
            .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0]);
        for &x in &alpha_ts {
            non_negative(o, "decay_alpha_t", x)?;
        }
        emit(Some(path), &render(&decay_plot(&ph, &g, sources[0], &alpha_ts)?))?;
    }
    Ok(())
}

fn decay_plot(ph: &Physics, grid: &[f64], source: Source, alpha_ts: &[f64]) -> Result<Plot, CliError> {
    let t = ph.protocol.ramsey_time();
    let measured = alpha_ts
        .iter()
        .map(|&x| {
            let p = RamseyProtocol::new(
                ph.protocol.pulse,
                t,
                DecoherenceSpec::new(x / t, ph.protocol.gamma.beta())?,
            )?;
            let s = scan_lineshape(&p, grid, source, &ph.oracle)?;
            Ok((x, fringe_contrast(&s)))
        })
        .collect::<Result<Vec<_>, ramsey_core::Error>>()?;
    let top = alpha_ts.iter().copied().fold(0.0, f64::max).max(1.0);
    let curve = linspace(0.0, top, 101).into_iter().map(|x| (x, (-x).exp())).collect();
    Ok(Plot {
        title: format!("Fringe contrast against dephasing (T = {})", num(t)),
        x_label: "alpha T".into(),
        y_label: "contrast".into(),
        series: vec![
            Series {
                label: "exp(-alpha T)".into(),
                points: curve,
                style: Style::Dashed,
            },
            Series {
                label: format!("measured ({source})"),
                points: measured,
                style: Style::Markers,
            },
        ],
        ..Plot::default()
    })
}

#[derive(Serialize)]
struct OptimizeRow {
    alpha: f64,
    lambda_multiplier: f64,
    theta_branch: String,
    t_star: Option<f64>,
    alpha_t: Option<f64>,
    residual: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct OptimizeSummary {
    objective: &'static str,
    roots: usize,
    alpha_t_min: Option<f64>,
    alpha_t_median: Option<f64>,
    alpha_t_max: Option<f64>,
    band: (f64, f64),
    unconstrained_interior_roots: usize,
}

#[derive(Serialize)]
struct OptimizeJson {
    rows: Vec<OptimizeRow>,
    summary: OptimizeSummary,
}

fn optimize_row(r: &SweepRow) -> OptimizeRow {
    OptimizeRow {
        alpha: r.alpha,
        lambda_multiplier: r.lambda,
        theta_branch: r.branch.to_string(),
        t_star: r.solution.map(|s| s.t_star),
        alpha_t: r.solution.map(|s| s.alpha_t),
        residual: r.solution.map(|s| s.residual),
        status: r.status.label(),
    }
}

pub fn cmd_optimize(args: OptimizeArgs, o: &Origins) -> Result<(), CliError> {
    let format = format_of(o, args.format.as_deref(), Format::Csv)?;
    let alphas = args.alphas.clone().unwrap_or_else(default_alphas);
    let lambdas = args.lambdas.clone().unwrap_or_else(default_lambdas);
    if alphas.is_empty() {
        return Err(o.invalid("alphas", "must not be empty"));
    }
    if lambdas.is_empty() {
        return Err(o.invalid("lambdas", "must not be empty"));
    }
    for &a in &alphas {
        positive(o, "alphas", a)?;
    }
    for &l in &lambdas {
        non_negative(o, "lambdas", l)?;
    }
    let branches = args.branches.clone().unwrap_or_else(|| vec!["+".into(), "-".into()]);
    for b in &branches {
        if b != "+" && b != "-" {
            return Err(o.invalid("branches", format!("expected `+` or `-`, got `{b}`")));
        }
    }
    let objective: Objective = match args.objective.as_deref() {
        None => Objective::Recomputed,
        Some(s) => s.parse().map_err(|e| o.invalid("objective", e))?,
    };
    let d = Bracket::default();
    let bracket = Bracket::new(
        positive(o, "bracket_lo", args.bracket_lo.unwrap_or(d.lo))?,
        finite(o, "bracket_hi", args.bracket_hi.unwrap_or(d.hi))?,
        args.subdivisions.unwrap_or(d.subdivisions),
    )
    .map_err(|e| o.invalid("bracket_hi", e))?;

    let mut table = order_unity_sweep(&alphas, &lambdas, &bracket, objective)?;
    table.rows.retain(|r| branches.iter().any(|b| b == r.branch.as_str()));
    let summary = table.constrained_summary();
    let unconstrained = table.unconstrained_interior_roots().count();
    let rows: Vec<OptimizeRow> = table.rows.iter().map(optimize_row).collect();

    match summary {
        Some(s) => eprintln!(
            "summary: objective={} roots={} alpha_t min={} median={} max={} band=[{}, {}]; lambda=0 interior roots={}",
            objective.as_str(),
            s.count,
            num(s.min),
            num(s.median),
            num(s.max),
            num(ORDER_UNITY_BAND.0),
            num(ORDER_UNITY_BAND.1),
            unconstrained
        ),
        None => eprintln!(
            "summary: objective={} roots=0; lambda=0 interior roots={}",
            objective.as_str(),
            unconstrained
        ),
    }

    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let text = match format {
        Format::Csv => csv_string(
            &["alpha", "lambda_multiplier", "theta_branch", "t_star", "alpha_t", "residual", "status"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.alpha),
                        num(r.lambda_multiplier),
                        r.theta_branch.clone(),
                        opt(r.t_star),
                        opt(r.alpha_t),
                        opt(r.residual),
                        r.status.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Json => json_string(&OptimizeJson {
            summary: OptimizeSummary {
                objective: objective.as_str(),
                roots: summary.map(|s| s.count).unwrap_or(0),
                alpha_t_min: summary.map(|s| s.min),
                alpha_t_median: summary.map(|s| s.median),
                alpha_t_max: summary.map(|s| s.max),
                band: ORDER_UNITY_BAND,
                unconstrained_interior_roots: unconstrained,
            },
            rows,
        })?,
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.svg {
        emit(Some(path), &render(&sweep_plot(&table.rows, objective)))?;
    }
    Ok(())
}

fn sweep_plot(rows: &[SweepRow], objective: Objective) -> Plot {
    let series = ["+", "-"]
        .iter()
        .map(|b| Series {
            label: format!("Theta = {b}alpha"),
            points: rows
                .iter()
                .filter(|r| r.branch.as_str() == *b && r.lambda > 0.0)
                .filter_map(|r| r.solution.map(|s| (r.lambda, s.alpha_t)))
                .collect(),
            style: Style::Markers,
        })
        .collect();
    Plot {
        title: format!("Stationary alpha T ({} objective)", objective.as_str()),
        x_label: "rescaled multiplier alpha Lambda".into(),
        y_label: "alpha T".into(),
        log_x: true,
        series,
        hlines: vec![
            (ORDER_UNITY_BAND.0, "0.1".into()),
            (ORDER_UNITY_BAND.1, "10".into()),
        ],
        ..Plot::default()
    }
}

#[derive(Serialize)]
struct CpiJson {
    x: Vec<f64>,
    p_c: Vec<f64>,
    p_r: Vec<f64>,
    max_abs_diff: f64,
    total_variation: f64,
    sum_p_c: f64,
    schmidt_rank: usize,
    hamiltonian_balance: f64,
    commutator_defect: f64,
}

pub fn cmd_cpi(args: CpiArgs, o: &Origins) -> Result<(), CliError> {
    let format = format_of(o, args.format.as_deref(), Format::Csv)?;
    let d = args.d.unwrap_or(2);
    if !(2..=8).contains(&d) {
        return Err(o.invalid("d", format!("must lie in [2, 8], got {d}")));
    }
    let omega = positive(o, "omega", args.omega.unwrap_or(1.0))?;
    let initial = args.initial_reading.unwrap_or(0);
    if initial >= d {
        return Err(o.invalid("initial_reading", format!("must be < d = {d}, got {initial}")));
    }
    let intervals = args.intervals.unwrap_or(QuadratureWindow::DEFAULT_INTERVALS);
    if intervals == 0 {
        return Err(o.invalid("intervals", "must be >= 1"));
    }
    let h = CMat::from_fn(d, d, |r, c| {
        if r == c {
            (omega * r as f64).into()
        } else {
            0.0.into()
        }
    });
    let period = TAU / omega;
    let clock = match args.observable.as_deref().unwrap_or("chain") {
        "chain" => ClockModel::new(h.clone(), chain_observable(d), period)?,
        "phase" => ClockModel::with_phase_observable(h.clone(), period)?,
        other => return Err(o.invalid("observable", format!("expected chain or phase, got `{other}`"))),
    };
    let paired = paired_construction(&h)?;
    let state: BipartiteState = if args.product.unwrap_or(false) {
        let split = clock.reading_basis() * fourier_basis(d);
        build_product_state(d, split.clone(), split.map(|z| z.conj()))?
    } else {
        paired.state.clone()
    };
    let psi = clock.reading_basis().column(initial).into_owned();
    let window = QuadratureWindow::full_period(&clock).with_intervals(intervals);
    let m = mirror_probability_check(&state, &clock, &psi, &window)?;
    let out = CpiJson {
        sum_p_c: m.p_c.iter().sum(),
        schmidt_rank: state.schmidt_rank(1e-9),
        hamiltonian_balance: hamiltonian_balance(&state, &paired.h_c, &paired.h_r)?,
        commutator_defect: global_commutator_defect(&state, &paired.h_c, &paired.h_r)?,
        x: m.readings,
        p_c: m.p_c,
        p_r: m.p_r,
        max_abs_diff: m.max_abs_diff,
        total_variation: m.total_variation,
    };
    eprintln!(
        "cpi d={d}: max_abs_diff={} total_variation={} sum_p_c={} schmidt_rank={} balance={} commutator_defect={}",
        num(out.max_abs_diff),
        num(out.total_variation),
        num(out.sum_p_c),
        out.schmidt_rank,
        num(out.hamiltonian_balance),
        num(out.commutator_defect)
    );
    let text = match format {
        Format::Csv => csv_string(
            &["x", "p_c", "p_r"],
            &(0..d)
                .map(|i| vec![num(out.x[i]), num(out.p_c[i]), num(out.p_r[i])])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => json_string(&out)?,
    };
    emit(args.out.as_deref(), &text)
}
