//! Cell-centered radial grids, the conservative radial Laplacian and the
//! assembly of the separated radial operators B_0, B_eps and B_1.

use faer::Mat;
use serde::Serialize;

use crate::band::BandMatrix;
use crate::error::{Error, Result};
use crate::model::{angular_eigenvalue, ProblemParams};

/// Minimum interior node count of a grid.
pub const MIN_NODES: usize = 16;

/// Assembly fails when the skew part exceeds this fraction of the operator norm.
pub const MAX_ASYMMETRY: f64 = 0.05;

/// Cell-centered mesh r_i = (i + 1/2) h on (0, R) with weights r_i^{N-1} h.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    radius: f64,
    dim: usize,
    step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub fn build_grid(radius: f64, n: usize, dim: usize) -> Result<RadialGrid> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("grid radius {radius} must be positive")));
    }
    if n < MIN_NODES {
        return Err(Error::InvalidArgument(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let step = radius / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * step).collect();
    let weights = nodes.iter().map(|r| r.powi(dim as i32 - 1) * step).collect();
    Ok(RadialGrid { radius, dim, step, nodes, weights })
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Samples a radial function on the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    /// Piecewise-linear interpolant of node values: constant below the first
    /// node, decaying linearly to the Dirichlet value 0 at r = R, zero beyond.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let n = self.len();
        if r >= self.radius || n == 0 {
            return 0.0;
        }
        let s = r / self.step - 0.5;
        if s <= 0.0 {
            return values[0];
        }
        let i = s.floor() as usize;
        let frac = s - i as f64;
        let upper = if i + 1 < n { values[i + 1] } else { -values[n - 1] };
        values[i] + frac * (upper - values[i])
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        weighted_inner_product(self, f, g)
    }

    pub fn norm(&self, f: &[f64]) -> Result<f64> {
        Ok(weighted_inner_product(self, f, f)?.sqrt())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: v.len() });
        }
        Ok(())
    }
}

/// sum_i w_i f_i g_i.
pub fn weighted_inner_product(grid: &RadialGrid, f: &[f64], g: &[f64]) -> Result<f64> {
    grid.check_len(f)?;
    grid.check_len(g)?;
    Ok(grid
        .weights
        .iter()
        .zip(f.iter().zip(g))
        .map(|(w, (a, b))| w * a * b)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// c / r^{2m}
    Singular,
    /// c / (eps^{2m} + r^{2m})
    Regularized,
    /// c / (1 + r^{2m})
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Singular,
    Regularized,
    Limit,
    LaplacianPower,
}

impl From<PotentialKind> for OperatorKind {
    fn from(kind: PotentialKind) -> Self {
        match kind {
            PotentialKind::Singular => OperatorKind::Singular,
            PotentialKind::Regularized => OperatorKind::Regularized,
            PotentialKind::Limit => OperatorKind::Limit,
        }
    }
}

pub fn potential_samples(grid: &RadialGrid, params: &ProblemParams, kind: PotentialKind) -> Result<Vec<f64>> {
    let c = params.coupling();
    let p = 2 * params.order() as i32;
    match kind {
        PotentialKind::Singular => {
            if grid.nodes.contains(&0.0) {
                return Err(Error::InvalidArgument("singular potential sampled at r = 0".into()));
            }
            Ok(grid.sample(|r| c / r.powi(p)))
        }
        PotentialKind::Regularized => {
            let eps = params.eps();
            if eps <= 0.0 {
                return Err(Error::InvalidArgument("regularized potential needs eps > 0".into()));
            }
            let floor = eps.powi(p);
            Ok(grid.sample(|r| c / (floor + r.powi(p))))
        }
        PotentialKind::Limit => Ok(grid.sample(|r| c / (1.0 + r.powi(p)))),
    }
}

/// A discretized radial operator acting on node values.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: BandMatrix,
    grid: RadialGrid,
    symmetrized: bool,
    asymmetry_norm: f64,
    norm: f64,
    params: Option<ProblemParams>,
    kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn entries(&self) -> &BandMatrix {
        &self.entries
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn bandwidth(&self) -> usize {
        self.entries.bandwidth()
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Weighted-metric norm estimate of the skew part removed by symmetrization.
    pub fn asymmetry_norm(&self) -> f64 {
        self.asymmetry_norm
    }

    /// Upper estimate of the operator norm in the weighted metric.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn params(&self) -> Option<&ProblemParams> {
        self.params.as_ref()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(v)?;
        Ok(self.entries.mul_vec(v))
    }

    /// <v, A v> in the weighted inner product.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        let av = self.apply(v)?;
        weighted_inner_product(&self.grid, v, &av)
    }

    /// max |w_i A_ij - w_j A_ji|.
    pub fn weighted_symmetry_defect(&self) -> f64 {
        let w = self.grid.weights();
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in self.entries.row_columns(i) {
                worst = worst.max((w[i] * self.entries.get(i, j) - w[j] * self.entries.get(j, i)).abs());
            }
        }
        worst
    }

    /// A + s I.
    pub fn shifted(&self, s: f64) -> OperatorMatrix {
        let mut out = self.clone();
        out.entries.add_diagonal(&vec![s; self.len()]);
        out.norm = self.norm + s.abs();
        out
    }

    /// Band of W^{1/2} A W^{-1/2}, symmetric once the operator is symmetrized.
    pub fn symmetric_band(&self) -> BandMatrix {
        let root: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        let mut out = BandMatrix::zeros(self.len(), self.bandwidth());
        for i in 0..self.len() {
            for j in self.entries.row_columns(i) {
                out.set(i, j, root[i] * self.entries.get(i, j) / root[j]);
            }
        }
        out
    }

    /// Dense W^{1/2} A W^{-1/2}.
    pub fn symmetric_dense(&self) -> Mat<f64> {
        let band = self.symmetric_band();
        Mat::from_fn(self.len(), self.len(), |i, j| band.get(i, j))
    }
}

/// Face coefficients r_f^{N-1} / h at faces r = f h, with a zero-flux face at r = 0.
fn face_coefficients(grid: &RadialGrid) -> Vec<f64> {
    let h = grid.step;
    (0..=grid.len())
        .map(|f| if f == 0 { 0.0 } else { (f as f64 * h).powi(grid.dim as i32 - 1) / h })
        .collect()
}

fn laplacian_band(grid: &RadialGrid) -> BandMatrix {
    let n = grid.len();
    let a = face_coefficients(grid);
    let w = grid.weights();
    let mut band = BandMatrix::zeros(n, 1);
    for i in 0..n {
        let lower = a[i];
        // odd reflection across r = R puts the zero value on the outer face
        let upper = if i + 1 == n { 2.0 * a[n] } else { a[i + 1] };
        band.set(i, i, -(lower + upper) / w[i]);
        if i > 0 {
            band.set(i, i - 1, lower / w[i]);
        }
        if i + 1 < n {
            band.set(i, i + 1, a[i + 1] / w[i]);
        }
    }
    band
}

fn power(base: &BandMatrix, exponent: usize) -> BandMatrix {
    let mut out = base.clone();
    for _ in 1..exponent {
        out = out.matmul(base);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Symmetrizes in the weighted metric and returns (matrix, skew norm, norm).
fn symmetrize(entries: &BandMatrix, weights: &[f64]) -> (BandMatrix, f64, f64) {
    let n = entries.len();
    let mut sym = BandMatrix::zeros(n, entries.bandwidth());
    let mut skew_rows = vec![0.0f64; n];
    let mut sym_rows = vec![0.0f64; n];
    for i in 0..n {
        for j in entries.row_columns(i) {
            let mirrored = entries.get(j, i) * weights[j] / weights[i];
            let s = 0.5 * (entries.get(i, j) + mirrored);
            let k = 0.5 * (entries.get(i, j) - mirrored);
            sym.set(i, j, s);
            let scale = (weights[i] / weights[j]).sqrt();
            sym_rows[i] += (s * scale).abs();
            skew_rows[i] += (k * scale).abs();
        }
    }
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    (sym, max(skew_rows), max(sym_rows))
}

fn finish(
    entries: BandMatrix,
    grid: &RadialGrid,
    params: Option<ProblemParams>,
    kind: OperatorKind,
) -> Result<OperatorMatrix> {
    let (entries, asymmetry_norm, norm) = symmetrize(&entries, grid.weights());
    if asymmetry_norm > MAX_ASYMMETRY * norm {
        return Err(Error::Asymmetry { asymmetry: asymmetry_norm, norm });
    }
    Ok(OperatorMatrix {
        entries,
        grid: grid.clone(),
        symmetrized: true,
        asymmetry_norm,
        norm,
        params,
        kind,
    })
}

/// Divergence-form Δ_r = D_r^2 + (N-1)/r D_r with Dirichlet value at r = R.
pub fn radial_laplacian(grid: &RadialGrid) -> OperatorMatrix {
    finish(laplacian_band(grid), grid, None, OperatorKind::LaplacianPower)
        .expect("the radial Laplacian is weighted-symmetric by construction")
}

/// -(-Δ_r)^m, the potential-free operator of order 2m.
pub fn polyharmonic_operator(grid: &RadialGrid, order: usize) -> OperatorMatrix {
    let entries = polyharmonic_band(grid, order.max(1));
    finish(entries, grid, None, OperatorKind::LaplacianPower)
        .expect("powers of a weighted-symmetric matrix stay weighted-symmetric")
}

fn polyharmonic_band(grid: &RadialGrid, order: usize) -> BandMatrix {
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    power(&laplacian_band(grid), order).scaled(sign)
}

/// -(-Δ_r)^m + diag(V) assembled directly, without the angular expansion.
pub fn direct_radial_operator(
    grid: &RadialGrid,
    params: &ProblemParams,
    potential: &[f64],
    kind: OperatorKind,
) -> Result<OperatorMatrix> {
    grid.check_len(potential)?;
    let mut entries = polyharmonic_band(grid, params.order());
    entries.add_diagonal(potential);
    finish(entries, grid, Some(*params), kind)
}

/// (-1)^{m+1} Σ_l C(m,l) (-μ_k)^{m-l} L^l diag(r^{-2(m-l)}) + diag(V).
pub fn assemble_separated_operator(
    grid: &RadialGrid,
    params: &ProblemParams,
    potential: &[f64],
    kind: OperatorKind,
) -> Result<OperatorMatrix> {
    grid.check_len(potential)?;
    if grid.dim() != params.dim() {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {} differs from problem dimension {}",
            grid.dim(),
            params.dim()
        )));
    }
    let order = params.order();
    let mu = angular_eigenvalue(params.harmonic(), params.dim());
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    let laplacian = laplacian_band(grid);

    let mut entries = BandMatrix::zeros(grid.len(), order);
    for l in 0..=order {
        let coefficient = sign * binomial(order, l) * (-mu).powi((order - l) as i32);
        if coefficient == 0.0 {
            continue;
        }
        let singular_factor: Vec<f64> = grid.sample(|r| r.powi(-2 * (order - l) as i32));
        let term = if l == 0 {
            BandMatrix::from_diagonal(&singular_factor)
        } else {
            power(&laplacian, l).scale_columns(&singular_factor)
        };
        entries = entries.plus(&term.scaled(coefficient));
    }
    entries.add_diagonal(potential);
    finish(entries, grid, Some(*params), kind)
}

/// Samples the potential of `kind` and assembles the separated operator.
pub fn assemble(grid: &RadialGrid, params: &ProblemParams, kind: PotentialKind) -> Result<OperatorMatrix> {
    let potential = potential_samples(grid, params, kind)?;
    assemble_separated_operator(grid, params, &potential, kind.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(dim: usize, order: usize, c: f64, k: usize, eps: f64) -> ProblemParams {
        ProblemParams::new(dim, order, c, k, eps).unwrap()
    }

    #[test]
    fn grid_definition() {
        // h = 1/4 as for (R = 1, n = 4); n = 16 is the smallest admissible grid
        let grid = build_grid(4.0, 16, 3).unwrap();
        assert_eq!(&grid.nodes()[..4], &[0.125, 0.375, 0.625, 0.875]);
        for (r, w) in grid.nodes().iter().zip(grid.weights()) {
            assert_eq!(*w, r * r * 0.25);
        }
        assert!(build_grid(1.0, 4, 3).is_err());
        assert!(build_grid(0.0, 32, 3).is_err());
    }

    #[test]
    fn weights_integrate_volume() {
        let grid = build_grid(1.0, 1000, 3).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 1.0 / 3.0).abs() < 1e-4);
        let grid = build_grid(2.0, 64, 5).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert!((total / (32.0 / 5.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn inner_product_checks_length() {
        let grid = build_grid(1.0, 1000, 3).unwrap();
        let ones = vec![1.0; 1000];
        assert!((grid.inner(&ones, &ones).unwrap() - 1.0 / 3.0).abs() < 1e-4);
        assert_eq!(
            grid.inner(&ones, &ones[..10]),
            Err(Error::LengthMismatch { expected: 1000, actual: 10 })
        );
    }

    #[test]
    fn laplacian_annihilates_constants_in_the_interior() {
        let grid = build_grid(1.0, 200, 3).unwrap();
        let lap = radial_laplacian(&grid);
        let out = lap.apply(&vec![1.0; 200]).unwrap();
        assert!(out[..199].iter().all(|&v| v.abs() < 1e-9));
        assert!(out[199] < 0.0);
    }

    #[test]
    fn laplacian_of_r_squared() {
        let grid = build_grid(1.0, 1000, 3).unwrap();
        let lap = radial_laplacian(&grid);
        let u = grid.sample(|r| r * r);
        let out = lap.apply(&u).unwrap();
        for (r, v) in grid.nodes().iter().zip(out) {
            // node weights differ from exact shell volumes by O(1/i^2) near the origin
            if *r > 0.05 && *r < 0.9 {
                assert!((v - 6.0).abs() <= 1e-2, "{r}: {v}");
            }
        }
    }

    #[test]
    fn laplacian_is_weighted_symmetric() {
        let grid = build_grid(3.0, 300, 4).unwrap();
        let lap = radial_laplacian(&grid);
        let scale = lap.entries().norm_inf();
        let w = grid.weights();
        for i in 0..300 {
            for j in lap.entries().row_columns(i) {
                let d = (w[i] * lap.entries().get(i, j) - w[j] * lap.entries().get(j, i)).abs();
                assert!(d <= 1e-12 * scale);
            }
        }
        assert!(lap.asymmetry_norm() <= 1e-12 * lap.norm());
    }

    #[test]
    fn separated_m1_k0_without_potential_is_the_laplacian() {
        let grid = build_grid(1.0, 64, 3).unwrap();
        let p = params(3, 1, 0.0, 0, 0.0);
        let op = assemble_separated_operator(&grid, &p, &vec![0.0; 64], OperatorKind::Singular).unwrap();
        assert_eq!(op.entries(), radial_laplacian(&grid).entries());
    }

    #[test]
    fn singular_m1_annihilates_oscillatory_power() {
        let grid = build_grid(1.0, 4000, 3).unwrap();
        let p = params(3, 1, 1.0, 0, 0.0);
        let op = assemble(&grid, &p, PotentialKind::Singular).unwrap();
        let d = 3f64.sqrt() / 2.0;
        let u = grid.sample(|r| r.powf(-0.5) * (d * r.ln()).cos());
        let residual = op.apply(&u).unwrap();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for (i, &r) in grid.nodes().iter().enumerate() {
            if r > 0.05 && r < 0.9 {
                num = num.max(residual[i].abs());
                den = den.max((u[i] / (r * r)).abs());
            }
        }
        assert!(num / den <= 1e-2, "relative residual {}", num / den);
    }

    #[test]
    fn singular_m2_annihilates_r4_at_stationary_coupling() {
        let grid = build_grid(1.0, 1000, 5).unwrap();
        let p = params(5, 2, 280.0, 0, 0.0);
        let op = assemble(&grid, &p, PotentialKind::Singular).unwrap();
        let u = grid.sample(|r| r.powi(4));
        let residual = op.apply(&u).unwrap();
        let mut worst = 0.0f64;
        for (i, &r) in grid.nodes().iter().enumerate() {
            if r > 0.1 && r < 0.8 {
                worst = worst.max(residual[i].abs() / 280.0);
            }
        }
        assert!(worst <= 1e-2, "relative residual {worst}");
    }

    #[test]
    fn potential_kinds() {
        let grid = build_grid(1.0, 32, 3).unwrap();
        let p = params(3, 1, 1.0, 0, 1.0);
        let limit = potential_samples(&grid, &p, PotentialKind::Limit).unwrap();
        let reg = potential_samples(&grid, &p, PotentialKind::Regularized).unwrap();
        assert_eq!(limit, reg);
        assert!(limit[0] < 1.0 && (limit[0] - 1.0 / (1.0 + grid.nodes()[0].powi(2))).abs() < 1e-15);

        let p0 = params(3, 1, 0.25, 0, 0.0);
        assert!(potential_samples(&grid, &p0, PotentialKind::Regularized).is_err());
        let grid = build_grid(16.0, 16, 3).unwrap(); // first node at 0.5
        let s = potential_samples(&grid, &p0, PotentialKind::Singular).unwrap();
        assert_eq!(s[0], 1.0);
    }

    #[test]
    fn higher_harmonics_m2_assemble_with_recorded_asymmetry() {
        let grid = build_grid(2.0, 400, 5).unwrap();
        let p = params(5, 2, 10.0, 1, 0.0);
        match assemble(&grid, &p, PotentialKind::Limit) {
            Ok(op) => {
                assert!(op.asymmetry_norm() > 0.0);
                assert!(op.weighted_symmetry_defect() <= 1e-12 * op.entries().norm_inf() * 1e3);
            }
            Err(Error::Asymmetry { asymmetry, norm }) => assert!(asymmetry > MAX_ASYMMETRY * norm),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
