//! Weighted symmetric eigenproblems, the positive point spectrum of the limit
//! operator, eigenfunction diagnostics, the eps-scaling check and the
//! constructive positive-lineal witness.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors, SelfAdjointEvdParams};
use faer::{Auto, Mat, Par};
use rayon::prelude::*;
use serde::Serialize;

use crate::band::BandMatrix;
use crate::discretize::{assemble, build_grid, OperatorMatrix, PotentialKind, RadialGrid, MIN_NODES};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::model::{classify, ProblemParams, Regime};

/// Residual bound relative to the operator norm accepted from the eigensolver.
pub const RESIDUAL_TOLERANCE: f64 = 1e-7;

/// Eigenpairs of a discretized operator, eigenvalues in descending order and
/// eigenvectors orthonormal in the weighted inner product.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    grid: RadialGrid,
    residual_norm: f64,
    operator_norm: f64,
    complete: bool,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        &self.eigenvectors[j]
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// max_j ||A psi_j - lambda_j psi_j||_w.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    /// True when every eigenpair of the matrix is present.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn top(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    /// max |<psi_i, psi_j> - delta_ij|.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = self.grid.weights();
        let k = self.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i..k {
                let dot: f64 = (0..w.len())
                    .map(|p| w[p] * self.eigenvectors[i][p] * self.eigenvectors[j][p])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn require_symmetrized(op: &OperatorMatrix) -> Result<()> {
    if !op.is_symmetrized() {
        return Err(Error::Precondition("operator must be symmetrized before decomposition".into()));
    }
    Ok(())
}

/// Fixes signs, measures residuals and packages eigenpairs.
fn finish(op: &OperatorMatrix, eigenvalues: Vec<f64>, mut vectors: Vec<Vec<f64>>, complete: bool) -> Result<Spectrum> {
    let w = op.grid().weights();
    let mut residual = 0.0f64;
    for (lambda, v) in eigenvalues.iter().zip(vectors.iter_mut()) {
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let av = op.entries().mul_vec(v);
        let r: f64 = av
            .iter()
            .zip(v.iter())
            .zip(w)
            .map(|((a, x), wi)| wi * (a - lambda * x).powi(2))
            .sum();
        residual = residual.max(r.sqrt());
    }
    let norm = op.norm();
    if !(residual <= RESIDUAL_TOLERANCE * norm.max(f64::MIN_POSITIVE)) {
        return Err(Error::Eigensolver(format!(
            "eigen-residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e} x norm {norm:.3e} (n = {})",
            op.len()
        )));
    }
    Ok(Spectrum { eigenvalues, eigenvectors: vectors, grid: op.grid().clone(), residual_norm: residual, operator_norm: norm, complete })
}

/// Dense symmetric eigensolver; `recursion_threshold` selects between
/// divide-and-conquer and plain QR iteration on the tridiagonal form.
fn dense_eigen(s: &Mat<f64>, recursion_threshold: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = s.nrows();
    let mut params: SelfAdjointEvdParams = <SelfAdjointEvdParams as Auto<f64>>::auto();
    params.recursion_threshold = recursion_threshold;
    let mut u = Mat::zeros(n, n);
    let mut values = Diag::zeros(n);
    let req = evd::self_adjoint_evd_scratch::<f64>(n, ComputeEigenvectors::Yes, Par::Seq, params.into());
    evd::self_adjoint_evd(
        s.as_ref(),
        values.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(req)),
        params.into(),
    )
    .map_err(|e| Error::Eigensolver(format!("{e:?} (n = {n})")))?;
    Ok(((0..n).map(|i| values.column_vector()[i]).collect(), u))
}

/// Full spectrum through a dense symmetric eigensolver applied to W^{1/2} A W^{-1/2}.
///
/// Divide-and-conquer loses accuracy on the strongly graded matrices of
/// higher order operators, so a residual failure triggers a QR-iteration rerun.
pub fn eigendecompose(op: &OperatorMatrix) -> Result<Spectrum> {
    require_symmetrized(op)?;
    let s = op.symmetric_dense();
    match decompose_with(op, &s, DIVIDE_AND_CONQUER_THRESHOLD) {
        Err(Error::Eigensolver(_)) => decompose_with(op, &s, usize::MAX),
        other => other,
    }
}

const DIVIDE_AND_CONQUER_THRESHOLD: usize = 128;

fn decompose_with(op: &OperatorMatrix, s: &Mat<f64>, threshold: usize) -> Result<Spectrum> {
    let n = op.len();
    let (values, u) = dense_eigen(s, threshold).map_err(|e| match e {
        Error::Eigensolver(msg) => Error::Eigensolver(format!(
            "{msg}, norm estimate {:.3e}, bandwidth {}",
            op.norm(),
            op.bandwidth()
        )),
        other => other,
    })?;
    let root: Vec<f64> = op.grid().weights().iter().map(|w| w.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for idx in (0..n).rev() {
        eigenvalues.push(values[idx]);
        vectors.push((0..n).map(|i| u[(i, idx)] / root[i]).collect());
    }
    finish(op, eigenvalues, vectors, true)
}

/// The `count` largest eigenpairs. Tridiagonal operators use Sturm bisection
/// and inverse iteration; wider bands fall back to the dense solver.
pub fn leading_eigenpairs(op: &OperatorMatrix, count: usize) -> Result<Spectrum> {
    require_symmetrized(op)?;
    let n = op.len();
    let count = count.min(n);
    if op.bandwidth() > 1 {
        let mut full = eigendecompose(op)?;
        full.eigenvalues.truncate(count);
        full.eigenvectors.truncate(count);
        full.complete = count == n;
        return Ok(full);
    }
    let tri = Tridiagonal::from_band(&op.symmetric_band());
    let root: Vec<f64> = op.grid().weights().iter().map(|w| w.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(count);
    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(count);
    for j in 0..count {
        let lambda = tri.eigenvalue(n - 1 - j);
        let v = tri.eigenvector(lambda, &unit)?;
        eigenvalues.push(lambda);
        unit.push(v);
    }
    let vectors = unit
        .into_iter()
        .map(|v| v.iter().zip(&root).map(|(x, r)| x / r).collect())
        .collect();
    finish(op, eigenvalues, vectors, count == n)
}

/// Number of eigenvalues strictly above `threshold`.
pub fn count_above(op: &OperatorMatrix, threshold: f64) -> Result<usize> {
    require_symmetrized(op)?;
    if op.bandwidth() > 1 {
        let full = eigendecompose(op)?;
        return Ok(full.eigenvalues.iter().filter(|&&l| l > threshold).count());
    }
    let tri = Tridiagonal::from_band(&op.symmetric_band());
    Ok(op.len() - tri.count_below(threshold))
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    pivmin: f64,
    bounds: (f64, f64),
}

impl Tridiagonal {
    fn from_band(band: &BandMatrix) -> Self {
        let n = band.len();
        let diag: Vec<f64> = (0..n).map(|i| band.get(i, i)).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| band.get(i, i + 1)).collect();
        let max_off2 = off.iter().fold(1.0f64, |m, e| m.max(e * e));
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
            lo = lo.min(diag[i] - radius);
            hi = hi.max(diag[i] + radius);
        }
        let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        Self { diag, off, pivmin: f64::MIN_POSITIVE * max_off2, bounds: (lo - pad, hi + pad) }
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Sturm count of eigenvalues below x.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            q = self.diag[i] - x - if i > 0 { self.off[i - 1] * self.off[i - 1] / q } else { 0.0 };
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalue with ascending index `idx` by bisection.
    fn eigenvalue(&self, idx: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves (T - shift I) x = b by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &mut [f64]) {
        let n = self.len();
        let tiny = f64::EPSILON * self.bounds.0.abs().max(self.bounds.1.abs()).max(f64::MIN_POSITIVE);
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - fact * b[i + 1];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
    }

    /// Inverse iteration at a converged eigenvalue, orthogonalized against `previous`.
    fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
        for _ in 0..5 {
            for p in previous {
                let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(p).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::Eigensolver(format!("inverse iteration broke down at lambda = {lambda:e}")));
            }
            x.iter_mut().for_each(|v| *v /= norm);
            self.solve_shifted(lambda, &mut x);
        }
        for p in previous {
            let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(p).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Eigensolver(format!("inverse iteration broke down at lambda = {lambda:e}")));
        }
        x.iter_mut().for_each(|v| *v /= norm);
        Ok(x)
    }
}

/// Eigenpairs with eigenvalue strictly above `tol`, in descending order.
pub fn positive_eigenpairs(spectrum: &Spectrum, tol: f64) -> Vec<(f64, Vec<f64>)> {
    spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .take_while(|(l, _)| **l > tol)
        .map(|(l, v)| (*l, v.clone()))
        .collect()
}

/// max(1e-8 ||A||, 3 x the top-eigenvalue shift under grid refinement).
pub fn positive_tolerance(operator_norm: f64, refinement_shift: f64) -> f64 {
    (1e-8 * operator_norm).max(3.0 * refinement_shift)
}

/// Positive spectrum of one operator with its refinement-based tolerance.
#[derive(Debug, Clone)]
pub struct PositiveSpectrum {
    pub spectrum: Spectrum,
    pub tolerance: f64,
    pub refinement_shift: f64,
    pub count: usize,
}

impl PositiveSpectrum {
    pub fn pairs(&self) -> Vec<(f64, Vec<f64>)> {
        positive_eigenpairs(&self.spectrum, self.tolerance)
    }
}

/// Assembles the operator of `kind` on ball(radius) with n and 2n nodes, sets
/// the tolerance from the shift of the top eigenvalue and keeps every
/// eigenpair above it (at least one pair is always returned).
pub fn resolve_positive_spectrum(
    params: &ProblemParams,
    kind: PotentialKind,
    radius: f64,
    n: usize,
) -> Result<PositiveSpectrum> {
    let coarse = assemble(&build_grid(radius, n, params.dim())?, params, kind)?;
    let fine = assemble(&build_grid(radius, 2 * n, params.dim())?, params, kind)?;
    let top_fine = leading_eigenpairs(&fine, 1)?.eigenvalues[0];
    let (spectrum, tolerance, shift) = if coarse.bandwidth() > 1 {
        let full = eigendecompose(&coarse)?;
        let shift = (full.eigenvalues[0] - top_fine).abs();
        (full, positive_tolerance(coarse.norm(), shift), shift)
    } else {
        let top = leading_eigenpairs(&coarse, 1)?.eigenvalues[0];
        let shift = (top - top_fine).abs();
        let tol = positive_tolerance(coarse.norm(), shift);
        let count = count_above(&coarse, tol)?.max(1);
        (leading_eigenpairs(&coarse, count)?, tol, shift)
    };
    let count = spectrum.eigenvalues.iter().take_while(|&&l| l > tolerance).count();
    Ok(PositiveSpectrum { spectrum, tolerance, refinement_shift: shift, count })
}

/// Diagnostics of one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenfunctionStats {
    pub lambda: f64,
    /// alpha in |U| ~ exp(-alpha r), fitted on the outer 30% of the grid.
    pub decay_rate: f64,
    /// sum_i w_i U_i, i.e. the integral of U r^{N-1} dr.
    pub mean: f64,
    pub origin_value: f64,
    pub sign_changes: usize,
    /// decay_rate / lambda^{1/2m} for positive lambda.
    pub decay_coefficient: Option<f64>,
}

pub fn eigenfunction_stats(spectrum: &Spectrum, j: usize, order: usize) -> Result<EigenfunctionStats> {
    if j >= spectrum.len() {
        return Err(Error::InvalidArgument(format!("eigenpair {j} not computed ({} available)", spectrum.len())));
    }
    let u = spectrum.eigenvector(j);
    let grid = spectrum.grid();
    let lambda = spectrum.eigenvalues[j];
    let peak = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let start = (grid.len() * 7) / 10;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in start..grid.len() {
        if u[i].abs() >= 1e-13 * peak && u[i] != 0.0 {
            xs.push(grid.nodes()[i]);
            ys.push(u[i].abs().ln());
        }
    }
    let window = grid.len() - start;
    if xs.len() < 8.max(window / 10) {
        return Err(Error::TailUnderflow { radius: grid.radius() });
    }
    let decay_rate = -fit_line(&xs, &ys).ok_or(Error::TailUnderflow { radius: grid.radius() })?.slope;

    let mean = u.iter().zip(grid.weights()).map(|(a, w)| a * w).sum();
    let mut sign_changes = 0;
    let mut last = 0.0f64;
    for &x in u {
        if x.abs() > 1e-12 * peak {
            if last != 0.0 && x.signum() != last.signum() {
                sign_changes += 1;
            }
            last = x;
        }
    }
    let decay_coefficient = (lambda > 0.0).then(|| decay_rate / lambda.powf(1.0 / (2 * order) as f64));
    Ok(EigenfunctionStats { lambda, decay_rate, mean, origin_value: u[0], sign_changes, decay_coefficient })
}

/// Resolution policy for the eps-scaling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingOptions {
    /// Grid step in the scaled variable y = x / eps.
    pub scaled_step: f64,
    /// Radius of the ball carrying the limit operator.
    pub limit_radius: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self { scaled_step: 0.02, limit_radius: 80.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCheck {
    pub eps_values: Vec<f64>,
    pub nodes: Vec<usize>,
    pub scaled_eigenvalues: Vec<f64>,
    pub limit_value: f64,
    pub errors: Vec<f64>,
    /// Change of the limit eigenvalue under radius doubling and step halving.
    pub floor: f64,
}

/// Nodes on ball(radius) giving a step of eps * scaled_step.
pub fn nodes_for_eps(radius: f64, eps: f64, scaled_step: f64) -> Result<usize> {
    let n = (radius / (eps * scaled_step)).ceil();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidArgument(format!("no grid for eps = {eps}, step {scaled_step}")));
    }
    let n = (n as usize).max(MIN_NODES);
    let per_eps = eps * n as f64 / radius;
    if per_eps < 8.0 {
        return Err(Error::UnderResolved { nodes_per_eps: per_eps });
    }
    Ok(n)
}

pub(crate) fn check_eps_list(eps_list: &[f64], radius: f64) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("empty eps list".into()));
    }
    if eps_list.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::InvalidArgument("eps values must be positive".into()));
    }
    if eps_list.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::Precondition("eps list must be strictly decreasing".into()));
    }
    if let Some(e) = eps_list.iter().find(|&&e| e > 0.2 * radius) {
        return Err(Error::Precondition(format!("eps = {e} exceeds 0.2 x domain radius {radius}")));
    }
    Ok(())
}

pub(crate) fn require_supercritical(params: &ProblemParams) -> Result<()> {
    let report = classify(params)?;
    if report.regime != Regime::Supercritical {
        return Err(Error::Precondition(format!(
            "coupling {} is not supercritical (c_H = {})",
            params.coupling(),
            report.hardy_constant
        )));
    }
    Ok(())
}

/// Top eigenvalue of B_1 on ball(radius) with the given scaled step.
fn limit_top(params: &ProblemParams, radius: f64, step: f64) -> Result<f64> {
    let n = ((radius / step).ceil() as usize).max(MIN_NODES);
    let op = assemble(&build_grid(radius, n, params.dim())?, params, PotentialKind::Limit)?;
    Ok(leading_eigenpairs(&op, 1)?.eigenvalues[0])
}

/// Compares lambda_0^eps eps^{2m} on ball(omega_radius) with Lambda_0 of B_1.
/// The limit operator uses the same scaled step, so the errors isolate the
/// effect of the finite domain; `floor` estimates the discretization error.
pub fn scaling_check(
    params: &ProblemParams,
    eps_list: &[f64],
    omega_radius: f64,
    options: ScalingOptions,
) -> Result<ScalingCheck> {
    require_supercritical(params)?;
    check_eps_list(eps_list, omega_radius)?;
    let nodes = eps_list
        .iter()
        .map(|&e| nodes_for_eps(omega_radius, e, options.scaled_step))
        .collect::<Result<Vec<_>>>()?;
    let p = 2 * params.order() as i32;
    let scaled_eigenvalues = eps_list
        .par_iter()
        .zip(nodes.par_iter())
        .map(|(&eps, &n)| {
            let op = assemble(&build_grid(omega_radius, n, params.dim())?, &params.with_eps(eps)?, PotentialKind::Regularized)?;
            Ok(leading_eigenpairs(&op, 1)?.eigenvalues[0] * eps.powi(p))
        })
        .collect::<Result<Vec<_>>>()?;
    let limit_value = limit_top(params, options.limit_radius, options.scaled_step)?;
    let wider = limit_top(params, 2.0 * options.limit_radius, options.scaled_step)?;
    let finer = limit_top(params, options.limit_radius, 0.5 * options.scaled_step)?;
    let floor = (wider - limit_value).abs().max((finer - limit_value).abs());
    let errors = scaled_eigenvalues.iter().map(|v| (v - limit_value).abs()).collect();
    Ok(ScalingCheck { eps_values: eps_list.to_vec(), nodes, scaled_eigenvalues, limit_value, errors, floor })
}

/// |<psi, U(./eps)>| / (||psi|| ||U(./eps)||) on the grid of `psi`.
pub fn rescaled_correlation(omega: &RadialGrid, psi: &[f64], eps: f64, limit_grid: &RadialGrid, u: &[f64]) -> Result<f64> {
    let pulled: Vec<f64> = omega.nodes().iter().map(|&x| limit_grid.interpolate(u, x / eps)).collect();
    let dot = omega.inner(psi, &pulled)?;
    let denom = omega.norm(psi)? * omega.norm(&pulled)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(dot.abs() / denom)
}

/// C^2 monotone step from 0 (s <= 0) to 1 (s >= 1): the integral of the
/// uniform quadratic B-spline on knots 0, 1/3, 2/3, 1.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let t = 3.0 * s;
    if t < 1.0 {
        t * t * t / 6.0
    } else if t < 2.0 {
        (-2.0 * t * t * t + 9.0 * t * t - 9.0 * t + 3.0) / 6.0
    } else {
        1.0 - (3.0 - t).powi(3) / 6.0
    }
}

/// Cut-off families for the positive-lineal witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffFamily {
    /// Unit-width ramps on [a, a+1] and [b+1, b+2].
    Linear,
    /// Ramps of width ln 4 in ln r on [a, 4a] and [b, 4b].
    Logarithmic,
}

const LOG_RAMP: f64 = 4.0;

pub fn cutoff_support(family: CutoffFamily, a: f64, b: f64) -> (f64, f64) {
    match family {
        CutoffFamily::Linear => (a, b + 2.0),
        CutoffFamily::Logarithmic => (a, LOG_RAMP * b),
    }
}

pub fn cutoff(family: CutoffFamily, a: f64, b: f64, r: f64) -> f64 {
    match family {
        CutoffFamily::Linear => smooth_step(r - a) * (1.0 - smooth_step(r - b - 1.0)),
        CutoffFamily::Logarithmic => {
            if r <= 0.0 {
                return 0.0;
            }
            let width = LOG_RAMP.ln();
            smooth_step((r / a).ln() / width) * (1.0 - smooth_step((r / b).ln() / width))
        }
    }
}

/// Test function r^{-(N-2m)/2} chi_{a,b}(r) sampled on the grid.
pub fn witness_samples(params: &ProblemParams, grid: &RadialGrid, family: CutoffFamily, a: f64, b: f64) -> Vec<f64> {
    let gamma = params.critical_exponent();
    grid.sample(|r| {
        let chi = cutoff(family, a, b, r);
        if chi == 0.0 {
            0.0
        } else {
            r.powf(gamma) * chi
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinealWitness {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<f64>,
    pub q1: f64,
    /// Every (b, Q_1) visited by the search.
    pub history: Vec<(f64, f64)>,
}

/// Geometric search in b (factor 2, starting at 4a) for a test function with
/// positive B_1 quadratic form.
pub fn positive_lineal_witness(
    params: &ProblemParams,
    a: f64,
    grid: &RadialGrid,
    family: CutoffFamily,
) -> Result<LinealWitness> {
    require_supercritical(params)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!("inner radius a = {a} must be positive")));
    }
    let op = assemble(grid, params, PotentialKind::Limit)?;
    let mut history = Vec::new();
    let mut b = 4.0 * a;
    while cutoff_support(family, a, b).1 < grid.radius() {
        let samples = witness_samples(params, grid, family, a, b);
        let q1 = op.quadratic_form(&samples)?;
        history.push((b, q1));
        if q1 > 0.0 {
            return Ok(LinealWitness { a, b, samples, q1, history });
        }
        b *= 2.0;
    }
    Err(Error::SearchExhausted { required_radius: cutoff_support(family, a, b).1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::radial_laplacian;

    #[test]
    fn smooth_step_is_c2_and_monotone() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let h = 1e-5;
        for knot in [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0] {
            let left = (smooth_step(knot) - smooth_step(knot - h)) / h;
            let right = (smooth_step(knot + h) - smooth_step(knot)) / h;
            assert!((left - right).abs() < 1e-3);
        }
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let grid = build_grid(1.0, 200, 3).unwrap();
        let lap = radial_laplacian(&grid);
        let dense = eigendecompose(&lap).unwrap();
        let lead = leading_eigenpairs(&lap, 5).unwrap();
        for j in 0..5 {
            assert!((dense.eigenvalues()[j] - lead.eigenvalues()[j]).abs() < 1e-9 * dense.operator_norm());
            let d: f64 = dense.eigenvector(j).iter().zip(lead.eigenvector(j)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d < 1e-6, "vector {j} differs by {d}");
        }
        assert!(lead.orthonormality_defect() < 1e-8);
        assert_eq!(count_above(&lap, -100.0).unwrap(), dense.eigenvalues().iter().filter(|&&l| l > -100.0).count());
    }

    #[test]
    fn tolerance_rule() {
        assert_eq!(positive_tolerance(1e4, 0.0), 1e-4);
        assert_eq!(positive_tolerance(1.0, 0.5), 1.5);
    }

    #[test]
    fn nodes_per_eps_guard() {
        assert_eq!(nodes_for_eps(1.0, 0.1, 0.1).unwrap(), 100);
        assert!(matches!(nodes_for_eps(1.0, 0.1, 0.2), Err(Error::UnderResolved { .. })));
    }
}
