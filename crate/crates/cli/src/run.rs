//! Subcommand implementations. Every run returns its artifacts; nothing is
//! written until the caller collects them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use singlab::discretize::{assemble, build_grid, RadialGrid};
use singlab::evolution::{
    divergence_sweep, modal_coefficients, oscillatory_coefficient_scan, parseval_defect, propagate,
    stationary_profile_scenario, DataSpec, DivergenceReport, Flow, InitialData, ScanSettings, StationarySettings,
    SweepSettings, FIT_SAMPLES,
};
use singlab::fit::fit_line;
use singlab::model::{characteristic_roots, classify, hardy_constant, ProblemParams, Regime};
use singlab::spectral::{
    eigendecompose, eigenfunction_stats, leading_eigenpairs, resolve_positive_spectrum, scaling_check,
    ScalingOptions, Spectrum,
};

use crate::config::{ExperimentConfig, SweepMode, TimeSpec};
use crate::output::{num, opt_num, Plot, Table};
use crate::report::{EpsRecord, RunReport, Summary, SCHEMA_VERSION, TOOL_VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub report: RunReport,
    pub table: Table,
    /// Additional tables, written next to the main one as `<stem>_<name>.csv`.
    pub extra_tables: Vec<(String, Table)>,
    pub plot: Option<String>,
    csv_path: String,
    json_path: String,
    svg_path: String,
}

impl Artifacts {
    fn new(cfg: &ExperimentConfig, report: RunReport, table: Table) -> Self {
        let o = &cfg.outputs;
        let name = &cfg.scenario;
        Self {
            report,
            table,
            extra_tables: Vec::new(),
            plot: None,
            csv_path: o.csv_path.clone().unwrap_or_else(|| format!("{name}.csv")),
            json_path: o.json_path.clone().unwrap_or_else(|| format!("{name}.json")),
            svg_path: o.svg_path.clone().unwrap_or_else(|| format!("{name}.svg")),
        }
    }

    /// Writes the selected formats under `out_dir`; the plot is always written
    /// when present. Returns the written paths.
    pub fn write(&self, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
        let mut files: Vec<(PathBuf, String)> = Vec::new();
        if format.csv() {
            let main = out_dir.join(&self.csv_path);
            files.push((main.clone(), self.table.to_csv()?));
            let stem = main.with_extension("");
            for (name, table) in &self.extra_tables {
                let path = PathBuf::from(format!("{}_{name}.csv", stem.display()));
                files.push((path, table.to_csv()?));
            }
        }
        if format.json() {
            files.push((out_dir.join(&self.json_path), self.report.to_json()?));
        }
        if let Some(svg) = &self.plot {
            files.push((out_dir.join(&self.svg_path), svg.clone()));
        }
        for (path, text) in &files {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_owned(), source })?;
            }
            std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}

fn regime_name(regime: Regime) -> String {
    match regime {
        Regime::Subcritical => "subcritical",
        Regime::Critical => "critical",
        Regime::Supercritical => "supercritical",
    }
    .to_string()
}

fn report(
    command: &str,
    cfg: &ExperimentConfig,
    records: Vec<EpsRecord>,
    summary: Summary,
    details: serde_json::Value,
    start: Instant,
) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        scenario: cfg.scenario.clone(),
        config: cfg.render(),
        records,
        summary,
        details,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    }
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Hardy constants for every (N, m) in the ranges with N > 2m.
pub fn hardy_table(dims: (usize, usize), orders: (usize, usize)) -> Result<Table, CliError> {
    let mut table = Table::new(&["dim", "order", "hardy_constant"]);
    for order in orders.0..=orders.1 {
        for dim in dims.0..=dims.1 {
            if order == 0 || dim <= 2 * order {
                continue;
            }
            table.push(vec![dim.to_string(), order.to_string(), num(hardy_constant(dim, order)?)]);
        }
    }
    if table.rows.is_empty() {
        return Err(CliError::Config("no (N, m) pair in range satisfies N > 2m".into()));
    }
    Ok(table)
}

/// Roots of the characteristic polynomial along a grid of couplings.
pub fn run_roots(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let params = cfg.model.params()?;
    let roots_cfg = cfg.roots.ok_or_else(|| CliError::Config("section [roots] is required".into()))?;
    let couplings = roots_cfg.couplings();
    if couplings.is_empty() {
        return Err(CliError::Config("roots.c_count must be positive".into()));
    }
    let degree = 2 * params.order();
    let mut header = vec!["coupling".to_string(), "regime".into(), "frequency".into(), "max_residual".into()];
    for k in 0..degree {
        header.push(format!("root{k}_re"));
        header.push(format!("root{k}_im"));
    }
    let mut table = Table { header, rows: Vec::new() };
    let mut rows_json = Vec::new();
    let mut transition = None;
    let mut previous: Option<Regime> = None;
    for &c in &couplings {
        let p = params.with_coupling(c)?;
        let set = characteristic_roots(&p)?;
        let report = classify(&p)?;
        if previous == Some(Regime::Subcritical) && report.regime != Regime::Subcritical && transition.is_none() {
            transition = Some(c);
        }
        previous = Some(report.regime);
        let mut row = vec![num(c), regime_name(report.regime), opt_num(report.oscillation_frequency), num(set.max_residual)];
        for z in &set.roots {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        table.push(row);
        rows_json.push(json!({ "coupling": c, "criticality": report, "roots": set }));
    }
    let base = classify(&params)?;
    let mut summary = Summary { regime: regime_name(base.regime), ..Summary::default() };
    summary.set("hardy_constant", base.hardy_constant);
    if let Some(c) = transition {
        summary.set("transition_coupling", c);
    }
    let details = json!({ "rows": rows_json });
    Ok(Artifacts::new(cfg, report("roots", cfg, Vec::new(), summary, details, start), table))
}

fn initial_data(data: Option<DataSpec>, grid: &RadialGrid, params: &ProblemParams, spectrum: &Spectrum) -> Result<InitialData, CliError> {
    Ok(match data.unwrap_or(DataSpec::Constant { delta0: 1.0 }) {
        DataSpec::Constant { delta0 } => InitialData::constant(grid, delta0)?,
        DataSpec::Oscillatory { frequency } => InitialData::oscillatory(grid, params.order(), frequency),
        DataSpec::StationaryDerivative { coupling } => {
            InitialData::stationary_derivative(grid, coupling, params.order(), params.eps())?
        }
        DataSpec::Mode { index } => {
            if index >= spectrum.len() {
                return Err(CliError::Config(format!("data.index {index} outside the spectrum")));
            }
            InitialData::custom(spectrum.eigenvector(index).to_vec())
        }
    })
}

fn top_eigenvalue(params: &ProblemParams, cfg: &ExperimentConfig, radius: f64, nodes: usize) -> Result<f64, CliError> {
    let op = assemble(&build_grid(radius, nodes, params.dim())?, params, cfg.model.potential)?;
    Ok(leading_eigenpairs(&op, 1)?.eigenvalues()[0])
}

/// Positive spectrum of the configured operator, with optional resolution
/// checks and flow diagnostics.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let params = cfg.model.params()?;
    let n = cfg.grid.require_nodes()?;
    let radius = cfg.grid.radius;
    let options = cfg.spectrum.unwrap_or_default();
    let criticality = classify(&params)?;
    let resolved = resolve_positive_spectrum(&params, cfg.model.potential, radius, n)?;
    let spectrum = &resolved.spectrum;
    let top = spectrum.eigenvalues()[0];

    let mut table = Table::new(&[
        "index",
        "eigenvalue",
        "positive",
        "decay_rate",
        "decay_coefficient",
        "mean",
        "origin_value",
        "sign_changes",
    ]);
    let mut pairs = Vec::new();
    for j in 0..resolved.count.max(1).min(spectrum.len()) {
        let lambda = spectrum.eigenvalues()[j];
        let stats = match eigenfunction_stats(spectrum, j, params.order()) {
            Ok(s) => Some(s),
            Err(singlab::Error::TailUnderflow { .. } | singlab::Error::DegenerateFit { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            j.to_string(),
            num(lambda),
            u8::from(lambda > resolved.tolerance).to_string(),
            opt_num(stats.map(|s| s.decay_rate)),
            opt_num(stats.and_then(|s| s.decay_coefficient)),
            opt_num(stats.map(|s| s.mean)),
            opt_num(stats.map(|s| s.origin_value)),
            stats.map_or_else(String::new, |s| s.sign_changes.to_string()),
        ]);
        pairs.push(json!({ "index": j, "eigenvalue": lambda, "stats": stats }));
    }

    let mut summary = Summary {
        regime: regime_name(criticality.regime),
        classification: None,
        positive_count: Some(resolved.count),
        ..Summary::default()
    };
    summary.set("top_eigenvalue", top);
    summary.set("tolerance", resolved.tolerance);
    summary.set("refinement_shift", resolved.refinement_shift);
    summary.set("hardy_constant", criticality.hardy_constant);
    summary.set("effective_coupling", criticality.effective_coupling);
    if let Some(d) = criticality.oscillation_frequency {
        summary.set("oscillation_frequency", d);
    }

    let mut details = json!({
        "criticality": criticality,
        "tolerance": resolved.tolerance,
        "refinement_shift": resolved.refinement_shift,
        "residual_norm": spectrum.residual_norm(),
        "operator_norm": spectrum.operator_norm(),
        "eigenpairs": pairs,
    });

    if options.stability {
        let half = top_eigenvalue(&params, cfg, radius, n / 2)?;
        let double = top_eigenvalue(&params, cfg, radius, 2 * n)?;
        let extended = top_eigenvalue(&params, cfg, 2.0 * radius, 2 * n)?;
        summary.set("top_half_nodes", half);
        summary.set("top_double_nodes", double);
        summary.set("top_double_radius", extended);
        details["stability"] = json!({
            "half_nodes": { "radius": radius, "nodes": n / 2, "top": half },
            "double_nodes": { "radius": radius, "nodes": 2 * n, "top": double },
            "double_radius": { "radius": 2.0 * radius, "nodes": 2 * n, "top": extended },
        });
    }

    let mut extra_tables = Vec::new();
    let needs_full = cfg.flows.is_some() || matches!(cfg.times, Some(TimeSpec::List(_)));
    if needs_full {
        let grid = build_grid(radius, n, params.dim())?;
        let full = eigendecompose(&assemble(&grid, &params, cfg.model.potential)?)?;
        let u0 = initial_data(cfg.data, &grid, &params, &full)?;
        let coeffs = modal_coefficients(&u0, &full)?;
        let defect = parseval_defect(&u0, &full, &coeffs)?;
        summary.set("parseval_defect", defect);
        let mut flows = json!({ "parseval_defect": defect });

        if let Some(Some(times)) = cfg.times.as_ref().map(|t| match t {
            TimeSpec::List(list) => Some(list.clone()),
            TimeSpec::Fixed(_) => None,
        }) {
            let trace = propagate(&coeffs, &full, &times, &Flow::Parabolic, true)?;
            let mut snap = Table::new(&["r"]);
            snap.header.extend(times.iter().map(|t| format!("u(t={t:?})")));
            let shots = trace.snapshots.as_ref().expect("snapshots requested");
            for (i, r) in grid.nodes().iter().enumerate() {
                let mut row = vec![num(*r)];
                row.extend(shots.iter().map(|s| num(s.values[i] * s.log_scale.exp())));
                snap.push(row);
            }
            extra_tables.push(("parabolic".to_string(), snap));
            flows["parabolic"] = json!({ "times": times, "log_norms": trace.log_norms });
        }

        if let Some(f) = cfg.flows {
            if f.samples < 2 {
                return Err(CliError::Config("flows.samples must be at least 2".into()));
            }
            let times = linspace(0.0, f.horizon, f.samples);
            let trace = propagate(&coeffs, &full, &times, &Flow::Schrodinger, false)?;
            let norms = trace.norms();
            let drift = norms.iter().map(|v| (v / norms[0] - 1.0).abs()).fold(0.0, f64::max);
            summary.set("schrodinger_drift", drift);

            let lambda0 = full.eigenvalues()[0];
            let mut unit = vec![0.0; full.len()];
            unit[0] = 1.0;
            let wave_times = linspace(f.wave_start, f.wave_end, FIT_SAMPLES);
            let wave = Flow::Wave { velocity: vec![0.0; full.len()] };
            let wave_trace = propagate(&unit, &full, &wave_times, &wave, false)?;
            let rate = fit_line(&wave_times, &wave_trace.log_norms).map(|l| l.slope);
            let expected = (lambda0 > 0.0).then(|| lambda0.sqrt());
            if let Some(r) = rate {
                summary.set("wave_rate", r);
            }
            if let Some(e) = expected {
                summary.set("wave_rate_expected", e);
            }
            flows["schrodinger"] = json!({ "times": times, "norms": norms, "max_relative_drift": drift });
            flows["wave"] = json!({ "times": wave_times, "log_norms": wave_trace.log_norms, "rate": rate, "expected": expected });
        }
        details["flows"] = flows;
    }

    let wider;
    let spectrum = if options.eigenfunctions > spectrum.len() {
        let op = assemble(&build_grid(radius, n, params.dim())?, &params, cfg.model.potential)?;
        wider = leading_eigenpairs(&op, options.eigenfunctions.min(n))?;
        &wider
    } else {
        spectrum
    };
    let count = options.eigenfunctions.min(spectrum.len());
    if count > 0 {
        let mut header = vec!["r".to_string()];
        header.extend((0..count).map(|j| format!("psi{j}")));
        let mut samples = Table { header, rows: Vec::new() };
        for (i, r) in spectrum.grid().nodes().iter().enumerate() {
            let mut row = vec![num(*r)];
            row.extend((0..count).map(|j| num(spectrum.eigenvector(j)[i])));
            samples.push(row);
        }
        extra_tables.push(("eigenfunctions".to_string(), samples));
    }

    let record = EpsRecord {
        eps: (params.eps() > 0.0).then_some(params.eps()),
        nodes: n,
        top_eigenvalue: Some(top),
        ..EpsRecord::default()
    };
    let mut artifacts = Artifacts::new(cfg, report("spectrum", cfg, vec![record], summary, details, start), table);
    artifacts.extra_tables = extra_tables;
    Ok(artifacts)
}

/// Runs the sweep named by `sweep.mode`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sweep = cfg.sweep.ok_or_else(|| CliError::Config("section [sweep] is required".into()))?;
    match sweep.mode {
        SweepMode::Divergence => run_divergence(cfg),
        SweepMode::Stationary => run_stationary(cfg),
        SweepMode::Oscillatory => run_oscillatory(cfg),
        SweepMode::Scaling => run_scaling(cfg),
    }
}

fn sweep_settings(cfg: &ExperimentConfig) -> Result<SweepSettings, CliError> {
    Ok(SweepSettings { radius: cfg.grid.radius, grid: cfg.grid.policy()?, t_fixed: cfg.fixed_time()? })
}

fn divergence_records(r: &DivergenceReport, order: usize) -> Vec<EpsRecord> {
    let p = 2 * order as i32;
    (0..r.eps_values.len())
        .map(|i| EpsRecord {
            eps: Some(r.eps_values[i]),
            nodes: r.nodes[i],
            top_eigenvalue: Some(r.top_eigenvalues[i]),
            leading_coefficient: Some(r.leading_coefficients[i]),
            log_norm: Some(r.log_norms[i]),
            fitted_exponent: Some(r.fitted_exponents[i]),
            scaled_value: Some(r.top_eigenvalues[i] * r.eps_values[i].powi(p)),
        })
        .collect()
}

fn divergence_table(r: &DivergenceReport, overlaps: Option<&[f64]>) -> Table {
    let mut header = vec![
        "eps",
        "nodes",
        "top_eigenvalue",
        "log_norm",
        "fitted_exponent",
        "exponent_ratio",
        "expected_ratio",
        "leading_coefficient",
        "sign",
    ];
    if overlaps.is_some() {
        header.push("overlap");
    }
    let mut table = Table::new(&header);
    for i in 0..r.eps_values.len() {
        let ratio = |v: &[f64]| if i == 0 { String::new() } else { num(v[i - 1]) };
        let mut row = vec![
            num(r.eps_values[i]),
            r.nodes[i].to_string(),
            num(r.top_eigenvalues[i]),
            num(r.log_norms[i]),
            num(r.fitted_exponents[i]),
            ratio(&r.exponent_ratios),
            ratio(&r.expected_ratios),
            num(r.leading_coefficients[i]),
            r.sign_sequence[i].to_string(),
        ];
        if let Some(o) = overlaps {
            row.push(num(o[i]));
        }
        table.push(row);
    }
    table
}

fn divergence_summary(r: &DivergenceReport, regime: Regime) -> Summary {
    let mut summary = Summary {
        regime: regime_name(regime),
        classification: Some(serde_json::to_value(r.classification).expect("enum").as_str().unwrap_or("").to_string()),
        ..Summary::default()
    };
    let exponent_error = r
        .fitted_exponents
        .iter()
        .zip(&r.top_eigenvalues)
        .map(|(f, l)| (f / (2.0 * l) - 1.0).abs())
        .fold(0.0, f64::max);
    let ratio_error = r
        .exponent_ratios
        .iter()
        .zip(&r.expected_ratios)
        .map(|(a, e)| (a / e - 1.0).abs())
        .fold(0.0, f64::max);
    summary.set("max_exponent_error", exponent_error);
    summary.set("max_ratio_error", ratio_error);
    summary.set("fixed_time", r.fixed_time);
    summary
}

fn divergence_plot(r: &DivergenceReport, order: usize) -> String {
    let p = 2 * order as i32;
    Plot {
        title: "log10 norm at fixed time",
        x_label: &format!("1/eps^{p}"),
        y_label: "log10 |u(t)|",
        points: r
            .eps_values
            .iter()
            .zip(&r.log_norms)
            .map(|(e, l)| (e.powi(-p), l / std::f64::consts::LN_10))
            .collect(),
    }
    .to_svg()
}

fn run_divergence(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let params = cfg.model.params()?;
    let data = cfg.data.ok_or_else(|| CliError::Config("section [data] is required".into()))?;
    let eps = cfg.eps_values()?;
    let r = divergence_sweep(&data, &params, &eps, &sweep_settings(cfg)?)?;
    let regime = classify(&params)?.regime;
    let details = serde_json::to_value(&r)?;
    let mut artifacts = Artifacts::new(
        cfg,
        report("sweep", cfg, divergence_records(&r, params.order()), divergence_summary(&r, regime), details, start),
        divergence_table(&r, None),
    );
    artifacts.plot = Some(divergence_plot(&r, params.order()));
    Ok(artifacts)
}

fn run_stationary(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let sweep = cfg.sweep.expect("checked by run_sweep");
    let settings = StationarySettings {
        sweep: sweep_settings(cfg)?,
        limit_radius: sweep.limit_radius.ok_or_else(|| CliError::Config("sweep.limit_radius is required".into()))?,
        limit_nodes: sweep.limit_nodes.ok_or_else(|| CliError::Config("sweep.limit_nodes is required".into()))?,
    };
    let eps = cfg.eps_values()?;
    let r = stationary_profile_scenario(cfg.model.dim, cfg.model.order, &eps, &settings)?;
    let params = ProblemParams::new(cfg.model.dim, cfg.model.order, r.coupling, 0, 0.0)?;
    let mut summary = divergence_summary(&r.sweep, classify(&params)?.regime);
    summary.set("coupling", r.coupling);
    summary.set("limit_overlap", r.limit_overlap);
    summary.set("limit_eigenvalue", r.limit_eigenvalue);
    let details = serde_json::to_value(&r)?;
    let mut artifacts = Artifacts::new(
        cfg,
        report("sweep", cfg, divergence_records(&r.sweep, cfg.model.order), summary, details, start),
        divergence_table(&r.sweep, Some(&r.overlaps)),
    );
    artifacts.plot = Some(divergence_plot(&r.sweep, cfg.model.order));
    Ok(artifacts)
}

fn run_oscillatory(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let params = cfg.model.params()?;
    let settings = ScanSettings { radius: cfg.grid.radius, scaled_step: cfg.grid.require_scaled_step()? };
    let eps = cfg.eps_values()?;
    let s = oscillatory_coefficient_scan(&params, &eps, &settings)?;

    let mut table = Table::new(&["eps", "nodes", "coefficient", "scaled_coefficient", "sign"]);
    let mut records = Vec::new();
    for i in 0..s.eps_values.len() {
        table.push(vec![
            num(s.eps_values[i]),
            s.nodes[i].to_string(),
            num(s.coefficients[i]),
            num(s.scaled_coefficients[i]),
            s.sign_sequence[i].to_string(),
        ]);
        records.push(EpsRecord {
            eps: Some(s.eps_values[i]),
            nodes: s.nodes[i],
            leading_coefficient: Some(s.coefficients[i]),
            scaled_value: Some(s.scaled_coefficients[i]),
            ..EpsRecord::default()
        });
    }
    let plus = s.sign_sequence.iter().filter(|&&v| v > 0).count();
    let minus = s.sign_sequence.iter().filter(|&&v| v < 0).count();
    let mut summary = Summary {
        regime: regime_name(classify(&params)?.regime),
        classification: Some(if plus > 0 && minus > 0 { "sign_alternating" } else { "single_sign" }.to_string()),
        ..Summary::default()
    };
    summary.set("frequency", s.frequency);
    summary.set("fitted_frequency", s.fitted_frequency);
    summary.set("fitted_log_period", s.fitted_log_period);
    summary.set("expected_log_period", s.expected_log_period);
    summary.set("positive_signs", plus as f64);
    summary.set("negative_signs", minus as f64);
    let details = serde_json::to_value(&s)?;
    let plot = Plot {
        title: "scaled leading coefficient",
        x_label: "ln(1/eps)",
        y_label: &format!("c0 eps^-{}", params.order()),
        points: s.eps_values.iter().zip(&s.scaled_coefficients).map(|(e, c)| (-e.ln(), *c)).collect(),
    }
    .to_svg();
    let mut artifacts = Artifacts::new(cfg, report("sweep", cfg, records, summary, details, start), table);
    artifacts.plot = Some(plot);
    Ok(artifacts)
}

fn run_scaling(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let start = Instant::now();
    let params = cfg.model.params()?;
    let sweep = cfg.sweep.expect("checked by run_sweep");
    let defaults = ScalingOptions::default();
    let options = ScalingOptions {
        scaled_step: cfg.grid.scaled_step.unwrap_or(defaults.scaled_step),
        limit_radius: sweep.limit_radius.unwrap_or(defaults.limit_radius),
    };
    let eps = cfg.eps_values()?;
    let s = scaling_check(&params, &eps, cfg.grid.radius, options)?;
    let mut table = Table::new(&["eps", "nodes", "scaled_eigenvalue", "relative_error"]);
    let mut records = Vec::new();
    for i in 0..s.eps_values.len() {
        table.push(vec![num(s.eps_values[i]), s.nodes[i].to_string(), num(s.scaled_eigenvalues[i]), num(s.errors[i])]);
        let p = 2 * params.order() as i32;
        records.push(EpsRecord {
            eps: Some(s.eps_values[i]),
            nodes: s.nodes[i],
            top_eigenvalue: Some(s.scaled_eigenvalues[i] / s.eps_values[i].powi(p)),
            scaled_value: Some(s.scaled_eigenvalues[i]),
            ..EpsRecord::default()
        });
    }
    let mut summary = Summary { regime: regime_name(classify(&params)?.regime), ..Summary::default() };
    summary.set("limit_value", s.limit_value);
    summary.set("floor", s.floor);
    if let Some(e) = s.errors.last() {
        summary.set("final_error", *e);
    }
    let details = serde_json::to_value(&s)?;
    Ok(Artifacts::new(cfg, report("sweep", cfg, records, summary, details, start), table))
}
