//! Exact modal propagation in the discrete eigenbasis, divergence sweeps over
//! eps, the oscillatory-coefficient scan and the stationary-profile scenario.

use rayon::prelude::*;
use serde::Serialize;

use crate::discretize::{assemble, build_grid, PotentialKind, RadialGrid};
use crate::error::{Error, Result};
use crate::fit::{best_frequency, fit_line, fit_sinusoid};
use crate::model::{analytic_stationary_coupling, classify, ProblemParams, Regime};
use crate::spectral::{
    check_eps_list, eigendecompose, eigenfunction_stats, leading_eigenpairs, nodes_for_eps, Spectrum,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataKind {
    Constant { delta0: f64 },
    Oscillatory { frequency: f64 },
    StationaryDerivative { coupling: f64, order: usize, eps: f64 },
    Custom,
}

/// Initial data sampled on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialData {
    pub kind: DataKind,
    pub samples: Vec<f64>,
}

impl InitialData {
    pub fn constant(grid: &RadialGrid, delta0: f64) -> Result<Self> {
        if !(delta0.is_finite() && delta0 > 0.0) {
            return Err(Error::InvalidArgument(format!("constant data needs delta0 > 0, got {delta0}")));
        }
        Ok(Self { kind: DataKind::Constant { delta0 }, samples: vec![delta0; grid.len()] })
    }

    /// r^{-(N-2m)/2} cos(d ln r).
    pub fn oscillatory(grid: &RadialGrid, order: usize, frequency: f64) -> Self {
        let gamma = -(grid.dim() as f64 - 2.0 * order as f64) / 2.0;
        let samples = grid.sample(|r| r.powf(gamma) * (frequency * r.ln()).cos());
        Self { kind: DataKind::Oscillatory { frequency }, samples }
    }

    /// -c / (1 + (r/eps)^{2m}); eps = 1 gives the profile in the scaled variable.
    pub fn stationary_derivative(grid: &RadialGrid, coupling: f64, order: usize, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
        }
        let p = 2 * order as i32;
        let samples = grid.sample(|r| -coupling / (1.0 + (r / eps).powi(p)));
        Ok(Self { kind: DataKind::StationaryDerivative { coupling, order, eps }, samples })
    }

    pub fn custom(samples: Vec<f64>) -> Self {
        Self { kind: DataKind::Custom, samples }
    }

    /// Rescaled to unit weighted norm.
    pub fn normalized(&self, grid: &RadialGrid) -> Result<Self> {
        let norm = grid.norm(&self.samples)?;
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("initial data has zero norm".into()));
        }
        Ok(Self { kind: self.kind, samples: self.samples.iter().map(|v| v / norm).collect() })
    }
}

/// c_j = <u0, psi_j>.
pub fn modal_coefficients(u0: &InitialData, spectrum: &Spectrum) -> Result<Vec<f64>> {
    let grid = spectrum.grid();
    spectrum.eigenvectors().iter().map(|psi| grid.inner(&u0.samples, psi)).collect()
}

/// |sum c_j^2 / ||u0||^2 - 1|.
pub fn parseval_defect(u0: &InitialData, spectrum: &Spectrum, coefficients: &[f64]) -> Result<f64> {
    let norm2 = spectrum.grid().inner(&u0.samples, &u0.samples)?;
    let sum: f64 = coefficients.iter().map(|c| c * c).sum();
    if norm2 == 0.0 {
        return Ok(sum);
    }
    Ok((sum / norm2 - 1.0).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "flow", rename_all = "snake_case")]
pub enum Flow {
    /// u_t = B u.
    Parabolic,
    /// i u_t = B u.
    Schrodinger,
    /// u_tt = B u with u_t(0) expanded in `velocity`.
    Wave { velocity: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Parabolic,
    Schrodinger,
    Wave,
}

impl Flow {
    pub fn kind(&self) -> FlowKind {
        match self {
            Flow::Parabolic => FlowKind::Parabolic,
            Flow::Schrodinger => FlowKind::Schrodinger,
            Flow::Wave { .. } => FlowKind::Wave,
        }
    }
}

/// Node values u(t) / exp(log_scale).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub log_scale: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionTrace {
    pub flow: FlowKind,
    pub times: Vec<f64>,
    pub modal_coefficients: Vec<f64>,
    /// ln ||u(t)|| per time.
    pub log_norms: Vec<f64>,
    pub snapshots: Option<Vec<Snapshot>>,
}

impl EvolutionTrace {
    /// ||u(t)||; overflows to infinity for strongly growing flows.
    pub fn norms(&self) -> Vec<f64> {
        self.log_norms.iter().map(|l| l.exp()).collect()
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.filter(|t| *t > f64::NEG_INFINITY).collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    peak + terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
}

/// Signed log-magnitude of the wave amplitude c C(t) + d S(t).
fn wave_amplitude(lambda: f64, c: f64, d: f64, t: f64) -> (f64, f64) {
    let to_log = |v: f64| (v.abs().ln(), v.signum());
    if lambda > 0.0 {
        let root = lambda.sqrt();
        let x = root * t;
        if x < 20.0 {
            return to_log(c * x.cosh() + d * x.sinh() / root);
        }
        let grow = c + d / root;
        if grow != 0.0 {
            (x - std::f64::consts::LN_2 + grow.abs().ln(), grow.signum())
        } else {
            let decay = c - d / root;
            (-x - std::f64::consts::LN_2 + decay.abs().ln(), decay.signum())
        }
    } else if lambda < 0.0 {
        let root = (-lambda).sqrt();
        to_log(c * (root * t).cos() + d * (root * t).sin() / root)
    } else {
        to_log(c + d * t)
    }
}

/// Exact solution in the eigenbasis of `spectrum` at each time.
pub fn propagate(
    coefficients: &[f64],
    spectrum: &Spectrum,
    times: &[f64],
    flow: &Flow,
    snapshots: bool,
) -> Result<EvolutionTrace> {
    let k = spectrum.len();
    if coefficients.len() != k {
        return Err(Error::LengthMismatch { expected: k, actual: coefficients.len() });
    }
    if let Flow::Wave { velocity } = flow {
        if velocity.len() != k {
            return Err(Error::LengthMismatch { expected: k, actual: velocity.len() });
        }
    }
    let lambdas = spectrum.eigenvalues();
    let grid = spectrum.grid();
    let n = grid.len();
    let mut log_norms = Vec::with_capacity(times.len());
    let mut shots = Vec::new();
    for &t in times {
        match flow {
            Flow::Parabolic | Flow::Wave { .. } => {
                // signed log-amplitudes of every mode
                let amps: Vec<(f64, f64)> = match flow {
                    Flow::Wave { velocity } => (0..k)
                        .map(|j| wave_amplitude(lambdas[j], coefficients[j], velocity[j], t))
                        .collect(),
                    _ => (0..k)
                        .map(|j| (coefficients[j].abs().ln() + lambdas[j] * t, coefficients[j].signum()))
                        .collect(),
                };
                let log_norm = 0.5 * log_sum_exp(amps.iter().map(|(l, _)| 2.0 * l));
                log_norms.push(log_norm);
                if snapshots {
                    let scale = if log_norm.is_finite() { log_norm } else { 0.0 };
                    let mut values = vec![0.0; n];
                    for (j, (l, s)) in amps.iter().enumerate() {
                        let a = s * (l - scale).exp();
                        if a != 0.0 {
                            values.iter_mut().zip(spectrum.eigenvector(j)).for_each(|(v, p)| *v += a * p);
                        }
                    }
                    shots.push(Snapshot { log_scale: scale, values });
                }
            }
            Flow::Schrodinger => {
                let mut re = vec![0.0; n];
                let mut im = vec![0.0; n];
                for j in 0..k {
                    if coefficients[j] == 0.0 {
                        continue;
                    }
                    let (s, c) = (lambdas[j] * t).sin_cos();
                    let (a, b) = (coefficients[j] * c, -coefficients[j] * s);
                    for (p, psi) in spectrum.eigenvector(j).iter().enumerate() {
                        re[p] += a * psi;
                        im[p] += b * psi;
                    }
                }
                let norm2 = grid.inner(&re, &re)? + grid.inner(&im, &im)?;
                log_norms.push(0.5 * norm2.ln());
                if snapshots {
                    let values = re.iter().zip(&im).map(|(a, b)| a.hypot(*b)).collect();
                    shots.push(Snapshot { log_scale: 0.0, values });
                }
            }
        }
    }
    Ok(EvolutionTrace {
        flow: flow.kind(),
        times: times.to_vec(),
        modal_coefficients: coefficients.to_vec(),
        log_norms,
        snapshots: snapshots.then_some(shots),
    })
}

/// Number of samples and window used for in-time growth fits.
pub const FIT_SAMPLES: usize = 16;

/// Slope of ln ||u(t)||^2 over 16 equispaced times in [t/2, t].
pub fn fitted_growth_exponent(coefficients: &[f64], spectrum: &Spectrum, t: f64, flow: &Flow) -> Result<f64> {
    let times: Vec<f64> = (0..FIT_SAMPLES)
        .map(|i| 0.5 * t + 0.5 * t * i as f64 / (FIT_SAMPLES - 1) as f64)
        .collect();
    let trace = propagate(coefficients, spectrum, &times, flow, false)?;
    let logs: Vec<f64> = trace.log_norms.iter().map(|l| 2.0 * l).collect();
    fit_line(&times, &logs)
        .map(|f| f.slope)
        .ok_or_else(|| Error::InvalidArgument("growth fit needs t > 0".into()))
}

/// Data used by a sweep, built afresh on every eps grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    Constant { delta0: f64 },
    Oscillatory { frequency: f64 },
    StationaryDerivative { coupling: f64 },
    /// The j-th eigenfunction of B_eps itself.
    Mode { index: usize },
}

/// Per-eps grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum GridPolicy {
    Fixed { nodes: usize },
    /// Step eps * scaled_step.
    ScaledStep { scaled_step: f64 },
}

impl GridPolicy {
    pub fn nodes(&self, radius: f64, eps: f64) -> Result<usize> {
        match *self {
            GridPolicy::Fixed { nodes } => {
                let per_eps = eps * nodes as f64 / radius;
                if per_eps < 8.0 {
                    return Err(Error::UnderResolved { nodes_per_eps: per_eps });
                }
                Ok(nodes)
            }
            GridPolicy::ScaledStep { scaled_step } => nodes_for_eps(radius, eps, scaled_step),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSettings {
    /// Radius of the domain ball.
    pub radius: f64,
    pub grid: GridPolicy,
    pub t_fixed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Divergent,
    Bounded,
    OscillatoryDivergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub eps_values: Vec<f64>,
    pub nodes: Vec<usize>,
    pub fixed_time: f64,
    pub top_eigenvalues: Vec<f64>,
    /// ln ||u_eps(t_fixed)|| for unit-norm data.
    pub log_norms: Vec<f64>,
    /// Slope of ln ||u_eps||^2 in t, to be compared with 2 lambda_0^eps.
    pub fitted_exponents: Vec<f64>,
    /// fitted_exponents[i] / fitted_exponents[i-1].
    pub exponent_ratios: Vec<f64>,
    /// (eps[i-1] / eps[i])^{2m}.
    pub expected_ratios: Vec<f64>,
    pub leading_coefficients: Vec<f64>,
    pub sign_sequence: Vec<i8>,
    pub classification: Classification,
}

struct EpsRecord {
    nodes: usize,
    top: f64,
    log_norm: f64,
    exponent: f64,
    leading: f64,
}

fn sweep_point(data: &DataSpec, params: &ProblemParams, eps: f64, settings: &SweepSettings) -> Result<EpsRecord> {
    let n = settings.grid.nodes(settings.radius, eps)?;
    let grid = build_grid(settings.radius, n, params.dim())?;
    let op = assemble(&grid, &params.with_eps(eps)?, PotentialKind::Regularized)?;
    let spectrum = eigendecompose(&op)?;
    let raw = match *data {
        DataSpec::Constant { delta0 } => InitialData::constant(&grid, delta0)?,
        DataSpec::Oscillatory { frequency } => InitialData::oscillatory(&grid, params.order(), frequency),
        DataSpec::StationaryDerivative { coupling } => {
            InitialData::stationary_derivative(&grid, coupling, params.order(), eps)?
        }
        DataSpec::Mode { index } => {
            if index >= spectrum.len() {
                return Err(Error::InvalidArgument(format!("mode {index} outside a spectrum of {}", spectrum.len())));
            }
            InitialData::custom(spectrum.eigenvector(index).to_vec())
        }
    };
    let u0 = raw.normalized(&grid)?;
    let coefficients = modal_coefficients(&u0, &spectrum)?;
    let trace = propagate(&coefficients, &spectrum, &[settings.t_fixed], &Flow::Parabolic, false)?;
    let exponent = fitted_growth_exponent(&coefficients, &spectrum, settings.t_fixed, &Flow::Parabolic)?;
    Ok(EpsRecord { nodes: n, top: spectrum.eigenvalues()[0], log_norm: trace.log_norms[0], exponent, leading: coefficients[0] })
}

fn signum(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Parabolic evolution of unit-norm data on ball(radius) for each eps.
/// Results are collected in eps order, independent of scheduling.
pub fn divergence_sweep(
    data: &DataSpec,
    params: &ProblemParams,
    eps_list: &[f64],
    settings: &SweepSettings,
) -> Result<DivergenceReport> {
    check_eps_list(eps_list, settings.radius)?;
    if !(settings.t_fixed.is_finite() && settings.t_fixed > 0.0) {
        return Err(Error::InvalidArgument(format!("fixed time {} must be positive", settings.t_fixed)));
    }
    for &eps in eps_list {
        settings.grid.nodes(settings.radius, eps)?;
    }
    let records = eps_list
        .par_iter()
        .map(|&eps| sweep_point(data, params, eps, settings))
        .collect::<Result<Vec<_>>>()?;

    let p = 2 * params.order() as i32;
    let log_norms: Vec<f64> = records.iter().map(|r| r.log_norm).collect();
    let fitted: Vec<f64> = records.iter().map(|r| r.exponent).collect();
    let exponent_ratios = fitted.windows(2).map(|w| w[1] / w[0]).collect();
    let expected_ratios = eps_list.windows(2).map(|w| (w[0] / w[1]).powi(p)).collect();
    let sign_sequence: Vec<i8> = records.iter().map(|r| signum(r.leading)).collect();
    let top_eigenvalues: Vec<f64> = records.iter().map(|r| r.top).collect();

    let tail = &log_norms[log_norms.len().saturating_sub(4)..];
    let increasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);
    let growing = top_eigenvalues.last().is_some_and(|&l| l > 0.0);
    let mixed = sign_sequence.contains(&1) && sign_sequence.contains(&-1);
    let classification = match (increasing && growing, mixed) {
        (true, true) => Classification::OscillatoryDivergent,
        (true, false) => Classification::Divergent,
        (false, _) => Classification::Bounded,
    };

    Ok(DivergenceReport {
        eps_values: eps_list.to_vec(),
        nodes: records.iter().map(|r| r.nodes).collect(),
        fixed_time: settings.t_fixed,
        top_eigenvalues,
        log_norms,
        fitted_exponents: fitted,
        exponent_ratios,
        expected_ratios,
        leading_coefficients: records.iter().map(|r| r.leading).collect(),
        sign_sequence,
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSettings {
    pub radius: f64,
    pub scaled_step: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { radius: 10.0, scaled_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationScan {
    pub eps_values: Vec<f64>,
    pub nodes: Vec<usize>,
    /// c_0^eps = <u_0, psi_0^eps>.
    pub coefficients: Vec<f64>,
    /// c_0^eps eps^{-m}.
    pub scaled_coefficients: Vec<f64>,
    pub frequency: f64,
    /// A and B in A cos(d ln eps) + B sin(d ln eps).
    pub amplitude_cos: f64,
    pub amplitude_sin: f64,
    pub fitted_frequency: f64,
    pub fitted_log_period: f64,
    pub expected_log_period: f64,
    pub sign_sequence: Vec<i8>,
    /// eps where the scaled coefficient changes sign (log-linear interpolation).
    pub zero_crossings: Vec<f64>,
    /// The eps of largest |c_0| within each positive run.
    pub eps_plus: Vec<f64>,
    /// The eps of largest |c_0| within each negative run.
    pub eps_minus: Vec<f64>,
}

/// Leading modal coefficient of r^{-(N-2m)/2} cos(d ln r) across eps.
pub fn oscillatory_coefficient_scan(
    params: &ProblemParams,
    eps_list: &[f64],
    settings: &ScanSettings,
) -> Result<OscillationScan> {
    let report = classify(params)?;
    let frequency = match (report.regime, report.oscillation_frequency) {
        (Regime::Supercritical, Some(d)) if d > 0.0 => d,
        _ => {
            return Err(Error::Precondition(format!(
                "oscillation frequency undefined for c = {} (c_H = {}, k = {})",
                params.coupling(),
                report.hardy_constant,
                params.harmonic()
            )))
        }
    };
    check_eps_list(eps_list, settings.radius)?;
    let nodes = eps_list
        .iter()
        .map(|&e| nodes_for_eps(settings.radius, e, settings.scaled_step))
        .collect::<Result<Vec<_>>>()?;
    let coefficients = eps_list
        .par_iter()
        .zip(nodes.par_iter())
        .map(|(&eps, &n)| {
            let grid = build_grid(settings.radius, n, params.dim())?;
            let op = assemble(&grid, &params.with_eps(eps)?, PotentialKind::Regularized)?;
            let top = leading_eigenpairs(&op, 1)?;
            let u0 = InitialData::oscillatory(&grid, params.order(), frequency);
            grid.inner(&u0.samples, top.eigenvector(0))
        })
        .collect::<Result<Vec<_>>>()?;

    let m = params.order() as i32;
    let scaled: Vec<f64> = coefficients.iter().zip(eps_list).map(|(c, e)| c * e.powi(-m)).collect();
    let logs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let (a, b, _) = fit_sinusoid(&logs, &scaled, frequency)
        .ok_or(Error::DegenerateFit { amplitude: 0.0 })?;
    if a.abs() < 1e-10 && b.abs() < 1e-10 {
        return Err(Error::DegenerateFit { amplitude: a.abs().max(b.abs()) });
    }
    let fitted_frequency = best_frequency(&logs, &scaled, 0.25 * frequency, 4.0 * frequency, 2001)
        .ok_or(Error::DegenerateFit { amplitude: a.abs().max(b.abs()) })?;

    let sign_sequence: Vec<i8> = scaled.iter().map(|v| signum(*v)).collect();
    let mut zero_crossings = Vec::new();
    for i in 1..scaled.len() {
        if sign_sequence[i] * sign_sequence[i - 1] < 0 {
            let s = scaled[i - 1] / (scaled[i - 1] - scaled[i]);
            zero_crossings.push((logs[i - 1] + s * (logs[i] - logs[i - 1])).exp());
        }
    }
    let (mut eps_plus, mut eps_minus) = (Vec::new(), Vec::new());
    let mut start = 0;
    while start < scaled.len() {
        let sign = sign_sequence[start];
        let mut end = start;
        while end + 1 < scaled.len() && sign_sequence[end + 1] == sign {
            end += 1;
        }
        let best = (start..=end).max_by(|&i, &j| scaled[i].abs().total_cmp(&scaled[j].abs())).unwrap();
        match sign {
            1 => eps_plus.push(eps_list[best]),
            -1 => eps_minus.push(eps_list[best]),
            _ => {}
        }
        start = end + 1;
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(OscillationScan {
        eps_values: eps_list.to_vec(),
        nodes,
        coefficients,
        scaled_coefficients: scaled,
        frequency,
        amplitude_cos: a,
        amplitude_sin: b,
        fitted_frequency,
        fitted_log_period: two_pi / fitted_frequency,
        expected_log_period: two_pi / frequency,
        sign_sequence,
        zero_crossings,
        eps_plus,
        eps_minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarySettings {
    pub sweep: SweepSettings,
    /// Ball and node count carrying the limit eigenfunction U_0.
    pub limit_radius: f64,
    pub limit_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryReport {
    pub coupling: f64,
    pub sweep: DivergenceReport,
    /// <v_0, U_0(./eps)> on each eps grid, v_0 = -c / (1 + (r/eps)^{2m}).
    pub overlaps: Vec<f64>,
    /// <-c / (1 + y^{2m}), U_0> in the scaled variable.
    pub limit_overlap: f64,
    pub limit_eigenvalue: f64,
}

/// Sweep for the time derivative v = u_t of the data built from the
/// stationary singular solution |x|^{2m}.
pub fn stationary_profile_scenario(
    dim: usize,
    order: usize,
    eps_list: &[f64],
    settings: &StationarySettings,
) -> Result<StationaryReport> {
    let coupling = analytic_stationary_coupling(dim, order)?;
    let params = ProblemParams::new(dim, order, coupling, 0, 0.0)?;
    let sweep = divergence_sweep(&DataSpec::StationaryDerivative { coupling }, &params, eps_list, &settings.sweep)?;

    let limit_grid = build_grid(settings.limit_radius, settings.limit_nodes, dim)?;
    let limit = leading_eigenpairs(&assemble(&limit_grid, &params, PotentialKind::Limit)?, 1)?;
    let u0 = limit.eigenvector(0);
    let v_limit = InitialData::stationary_derivative(&limit_grid, coupling, order, 1.0)?;
    let limit_overlap = limit_grid.inner(&v_limit.samples, u0)?;

    let overlaps = eps_list
        .iter()
        .zip(&sweep.nodes)
        .map(|(&eps, &n)| {
            let grid = build_grid(settings.sweep.radius, n, dim)?;
            let v0 = InitialData::stationary_derivative(&grid, coupling, order, eps)?;
            let pulled: Vec<f64> = grid.nodes().iter().map(|&x| limit_grid.interpolate(u0, x / eps)).collect();
            grid.inner(&v0.samples, &pulled)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StationaryReport { coupling, sweep, overlaps, limit_overlap, limit_eigenvalue: limit.eigenvalues()[0] })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakerHypothesis {
    pub inner_product: f64,
    pub threshold: f64,
    pub decay_constant: f64,
    pub passes: bool,
}

/// Tests |<u0, U_j(./eps)>| >= exp(-c_star / eps) on the grid of `u0`, with
/// c_star required to stay below the fitted decay rate of U_j.
pub fn weaker_hypothesis_check(
    u0: &InitialData,
    grid: &RadialGrid,
    limit: &Spectrum,
    j: usize,
    order: usize,
    eps: f64,
    c_star: f64,
) -> Result<WeakerHypothesis> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    let stats = eigenfunction_stats(limit, j, order)?;
    if !(c_star > 0.0 && c_star < stats.decay_rate) {
        return Err(Error::Precondition(format!(
            "c_* = {c_star} must lie in (0, {}) given the fitted decay rate",
            stats.decay_rate
        )));
    }
    let u = limit.eigenvector(j);
    let pulled: Vec<f64> = grid.nodes().iter().map(|&x| limit.grid().interpolate(u, x / eps)).collect();
    let inner_product = grid.inner(&u0.samples, &pulled)?;
    let threshold = (-c_star / eps).exp();
    Ok(WeakerHypothesis { inner_product, threshold, decay_constant: stats.decay_rate, passes: inner_product.abs() >= threshold })
}

