use proptest::prelude::*;
use singlab::discretize::*;
use singlab::evolution::*;
use singlab::model::ProblemParams;
use singlab::spectral::*;
use singlab::Error;

fn params(dim: usize, order: usize, c: f64, k: usize, eps: f64) -> ProblemParams {
    ProblemParams::new(dim, order, c, k, eps).unwrap()
}

fn spectrum(c: f64, radius: f64, n: usize) -> Spectrum {
    let grid = build_grid(radius, n, 3).unwrap();
    eigendecompose(&assemble(&grid, &params(3, 1, c, 0, 0.0), PotentialKind::Limit).unwrap()).unwrap()
}

type Dense = Vec<Vec<f64>>;

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// exp(M) by scaling and squaring with a degree-18 Taylor polynomial.
fn expm(m: &Dense) -> Dense {
    let n = m.len();
    let norm = m.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let a: Dense = m.iter().map(|row| row.iter().map(|x| x * scale).collect()).collect();
    let mut result: Dense = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut term = result.clone();
    for k in 1..=18 {
        term = matmul(&term, &a);
        term.iter_mut().flatten().for_each(|x| *x /= k as f64);
        result.iter_mut().flatten().zip(term.iter().flatten()).for_each(|(r, t)| *r += t);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

#[test]
fn modal_propagation_matches_matrix_exponential() {
    let grid = build_grid(1.0, 64, 3).unwrap();
    let op = assemble(&grid, &params(3, 1, 1.0, 0, 0.05), PotentialKind::Regularized).unwrap();
    let spec = eigendecompose(&op).unwrap();
    let u0 = InitialData::constant(&grid, 1.0).unwrap();
    let coeffs = modal_coefficients(&u0, &spec).unwrap();
    let t = 1e-2;
    let trace = propagate(&coeffs, &spec, &[t], &Flow::Parabolic, true).unwrap();
    let shot = &trace.snapshots.as_ref().unwrap()[0];
    let modal: Vec<f64> = shot.values.iter().map(|v| v * shot.log_scale.exp()).collect();

    let a: Dense = (0..64).map(|i| (0..64).map(|j| t * op.entries().get(i, j)).collect()).collect();
    let e = expm(&a);
    let direct: Vec<f64> = e.iter().map(|row| row.iter().zip(&u0.samples).map(|(x, u)| x * u).sum()).collect();
    let scale = grid.norm(&direct).unwrap();
    let diff: Vec<f64> = modal.iter().zip(&direct).map(|(a, b)| a - b).collect();
    assert!(grid.norm(&diff).unwrap() <= 1e-6 * scale);
    assert!((trace.log_norms[0] - scale.ln()).abs() <= 1e-6);
}

#[test]
fn modal_coefficients_trivial_cases() {
    let spec = spectrum(1.0, 10.0, 120);
    let grid = spec.grid().clone();
    let psi3 = InitialData::custom(spec.eigenvector(3).to_vec());
    let c = modal_coefficients(&psi3, &spec).unwrap();
    for (j, v) in c.iter().enumerate() {
        let target = if j == 3 { 1.0 } else { 0.0 };
        assert!((v - target).abs() <= 1e-10);
    }
    let zero = InitialData::custom(vec![0.0; grid.len()]);
    assert!(modal_coefficients(&zero, &spec).unwrap().iter().all(|&v| v == 0.0));
    let constant = InitialData::constant(&grid, 1.0).unwrap();
    let c = modal_coefficients(&constant, &spec).unwrap();
    assert!(c[0] > 0.0);
    assert!(parseval_defect(&constant, &spec, &c).unwrap() <= 1e-8);
    let short = InitialData::custom(vec![1.0; 7]);
    assert!(matches!(modal_coefficients(&short, &spec), Err(Error::LengthMismatch { .. })));
}

#[test]
fn parabolic_norms_follow_the_modal_identity() {
    let spec = spectrum(1.0, 20.0, 300);
    let u0 = InitialData::constant(spec.grid(), 2.0).unwrap();
    let c = modal_coefficients(&u0, &spec).unwrap();
    let times = [0.0, 0.5, 3.0, 40.0];
    let trace = propagate(&c, &spec, &times, &Flow::Parabolic, true).unwrap();
    assert!((trace.log_norms[0] - spec.grid().norm(&u0.samples).unwrap().ln()).abs() <= 1e-10);
    for (i, &t) in times.iter().enumerate() {
        let sum: f64 = c.iter().zip(spec.eigenvalues()).map(|(a, l)| a * a * (2.0 * l * t).exp()).sum();
        assert!(((2.0 * trace.log_norms[i]).exp() / sum - 1.0).abs() <= 1e-10);
        let shot = &trace.snapshots.as_ref().unwrap()[i];
        let rebuilt = spec.grid().norm(&shot.values).unwrap().ln() + shot.log_scale;
        assert!((rebuilt - trace.log_norms[i]).abs() <= 1e-8);
    }
}

#[test]
fn single_mode_log_norm_is_linear() {
    let spec = spectrum(1.0, 20.0, 300);
    let mut c = vec![0.0; spec.len()];
    c[0] = 1.0;
    let times: Vec<f64> = (0..10).map(|i| i as f64 * 3.0).collect();
    let trace = propagate(&c, &spec, &times, &Flow::Parabolic, false).unwrap();
    for (l, t) in trace.log_norms.iter().zip(&times) {
        assert!((l - spec.eigenvalues()[0] * t).abs() <= 1e-12 * (1.0 + t));
    }
}

#[test]
fn schrodinger_flow_conserves_the_norm() {
    let spec = spectrum(1.0, 40.0, 400);
    let u0 = InitialData::constant(spec.grid(), 1.0).unwrap();
    let c = modal_coefficients(&u0, &spec).unwrap();
    let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let trace = propagate(&c, &spec, &times, &Flow::Schrodinger, false).unwrap();
    let base = spec.grid().norm(&u0.samples).unwrap();
    for n in trace.norms() {
        assert!((n / base - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn wave_growth_rate_is_the_root_of_the_eigenvalue() {
    let spec = spectrum(1.0, 40.0, 400);
    let lambda = spec.eigenvalues()[0];
    assert!(lambda > 0.0);
    let mut c = vec![0.0; spec.len()];
    c[0] = 1.0;
    let flow = Flow::Wave { velocity: vec![0.0; spec.len()] };
    let times: Vec<f64> = (0..16).map(|i| 200.0 + 20.0 * i as f64).collect();
    let trace = propagate(&c, &spec, &times, &flow, false).unwrap();
    let slope = (trace.log_norms[15] - trace.log_norms[0]) / (times[15] - times[0]);
    assert!((slope / lambda.sqrt() - 1.0).abs() <= 0.01);
    let late = propagate(&c, &spec, &[1e6], &flow, false).unwrap();
    assert!((late.log_norms[0] - (lambda.sqrt() * 1e6 - std::f64::consts::LN_2)).abs() < 1e-6 * late.log_norms[0]);
}

#[test]
fn divergence_sweep_small() {
    let settings = SweepSettings { radius: 0.02, grid: GridPolicy::Fixed { nodes: 800 }, t_fixed: 1e-3 };
    let eps = [8e-4, 4e-4, 2e-4];
    let report = divergence_sweep(&DataSpec::Constant { delta0: 1.0 }, &params(3, 1, 1.0, 0, 0.0), &eps, &settings).unwrap();
    assert_eq!(report.classification, Classification::Divergent);
    for (fit, top) in report.fitted_exponents.iter().zip(&report.top_eigenvalues) {
        assert!((fit / (2.0 * top) - 1.0).abs() <= 0.01);
    }
    assert!(report.sign_sequence.iter().all(|&s| s == 1));
    let sub = divergence_sweep(&DataSpec::Constant { delta0: 1.0 }, &params(3, 1, 0.2, 0, 0.0), &eps, &settings).unwrap();
    assert_eq!(sub.classification, Classification::Bounded);
    let spread = sub.log_norms.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - sub.log_norms.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(spread < 10f64.ln());
}

#[test]
fn mode_data_grows_at_its_own_rate() {
    let settings = SweepSettings { radius: 0.02, grid: GridPolicy::Fixed { nodes: 400 }, t_fixed: 1e-5 };
    let eps = [8e-4, 4e-4];
    let p = params(3, 1, 1.0, 0, 0.0);
    let report = divergence_sweep(&DataSpec::Mode { index: 5 }, &p, &eps, &settings).unwrap();
    for (i, &e) in eps.iter().enumerate() {
        let grid = build_grid(0.02, 400, 3).unwrap();
        let spec = eigendecompose(&assemble(&grid, &p.with_eps(e).unwrap(), PotentialKind::Regularized).unwrap()).unwrap();
        let expected = 2.0 * spec.eigenvalues()[5];
        assert!((report.fitted_exponents[i] / expected - 1.0).abs() <= 0.01);
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let settings = SweepSettings { radius: 0.02, grid: GridPolicy::Fixed { nodes: 300 }, t_fixed: 1e-3 };
    let eps = [1e-3, 8e-4, 6e-4];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            divergence_sweep(&DataSpec::Constant { delta0: 1.0 }, &params(3, 1, 1.0, 0, 0.0), &eps, &settings).unwrap()
        })
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn sweep_preconditions() {
    let p = params(3, 1, 1.0, 0, 0.0);
    let settings = SweepSettings { radius: 0.02, grid: GridPolicy::Fixed { nodes: 100 }, t_fixed: 1e-3 };
    let data = DataSpec::Constant { delta0: 1.0 };
    assert!(matches!(divergence_sweep(&data, &p, &[1e-3], &settings), Err(Error::UnderResolved { .. })));
    assert!(matches!(divergence_sweep(&data, &p, &[4e-3, 4e-3], &settings), Err(Error::Precondition(_))));
    assert!(matches!(divergence_sweep(&data, &p, &[0.01], &settings), Err(Error::Precondition(_))));
}

#[test]
fn oscillatory_scan_short() {
    let p = params(3, 1, 1.0, 0, 0.0);
    let eps: Vec<f64> = (0..16).map(|i| 1e-1 * (1e-2f64).powf(i as f64 / 15.0)).collect();
    let scan = oscillatory_coefficient_scan(&p, &eps, &ScanSettings::default()).unwrap();
    assert!((scan.fitted_log_period / scan.expected_log_period - 1.0).abs() <= 0.05);
    assert!(scan.sign_sequence.contains(&1) && scan.sign_sequence.contains(&-1));
    for e in &scan.eps_plus {
        let i = scan.eps_values.iter().position(|x| x == e).unwrap();
        assert!(scan.coefficients[i] > 0.0);
    }
    for e in &scan.eps_minus {
        let i = scan.eps_values.iter().position(|x| x == e).unwrap();
        assert!(scan.coefficients[i] < 0.0);
    }
    assert!(!scan.zero_crossings.is_empty());
    let sub = params(3, 1, 0.2, 0, 0.0);
    assert!(matches!(oscillatory_coefficient_scan(&sub, &eps, &ScanSettings::default()), Err(Error::Precondition(_))));
}

#[test]
fn stationary_scenario() {
    let settings = StationarySettings {
        sweep: SweepSettings { radius: 1.0, grid: GridPolicy::Fixed { nodes: 400 }, t_fixed: 1e-5 },
        limit_radius: 15.0,
        limit_nodes: 600,
    };
    let report = stationary_profile_scenario(5, 2, &[0.1, 0.05], &settings).unwrap();
    assert_eq!(report.coupling, 280.0);
    assert_eq!(report.overlaps.len(), 2);
    assert!(report.limit_overlap.is_finite());
    assert!(matches!(stationary_profile_scenario(3, 1, &[0.1], &settings), Err(Error::Infeasible(_))));
    let grid = build_grid(1.0, 64, 5).unwrap();
    let v0 = InitialData::stationary_derivative(&grid, 280.0, 2, 0.1).unwrap();
    assert!(v0.samples.iter().all(|&v| v < 0.0));
}

#[test]
fn weaker_hypothesis() {
    let p = params(3, 1, 1.0, 0, 0.0);
    let limit = leading_eigenpairs(&assemble(&build_grid(40.0, 2000, 3).unwrap(), &p, PotentialKind::Limit).unwrap(), 1).unwrap();
    let c_j = eigenfunction_stats(&limit, 0, 1).unwrap().decay_rate;
    let grid = build_grid(1.0, 10000, 3).unwrap();
    let eps = 1e-3;
    let constant = InitialData::constant(&grid, 1.0).unwrap();
    let check = weaker_hypothesis_check(&constant, &grid, &limit, 0, 1, eps, 0.5 * c_j).unwrap();
    assert!(check.passes);
    let zero = InitialData::custom(vec![0.0; grid.len()]);
    assert!(!weaker_hypothesis_check(&zero, &grid, &limit, 0, 1, eps, 0.5 * c_j).unwrap().passes);
    assert!(matches!(
        weaker_hypothesis_check(&constant, &grid, &limit, 0, 1, eps, c_j),
        Err(Error::Precondition(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_and_conservation_on_random_data(seed in 0u64..10_000, c in 0.0f64..5.0, t in 0.0f64..1.0) {
        let spec = spectrum(c, 10.0, 64);
        let samples: Vec<f64> = (0..64).map(|i| (((i as u64 + 1) * (seed + 11)) % 23) as f64 - 11.0).collect();
        let u0 = InitialData::custom(samples);
        let coeffs = modal_coefficients(&u0, &spec).unwrap();
        prop_assert!(parseval_defect(&u0, &spec, &coeffs).unwrap() <= 1e-8);
        let trace = propagate(&coeffs, &spec, &[t], &Flow::Schrodinger, false).unwrap();
        let base = spec.grid().norm(&u0.samples).unwrap();
        prop_assert!((trace.norms()[0] / base - 1.0).abs() <= 1e-10);
    }
}
