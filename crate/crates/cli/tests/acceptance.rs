//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use singlab::discretize::{assemble, build_grid};
use singlab::model::{characteristic_derivative, characteristic_polynomial, critical_exponent, hardy_constant, ProblemParams};
use singlab_cli::presets;
use singlab_cli::run::{run_spectrum, run_sweep, Artifacts};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectrum(preset: &str) -> Result<Artifacts, String> {
    run_spectrum(&presets::load(preset).map_err(|e| e.to_string())?).map_err(|e| format!("{preset}: {e}"))
}

fn sweep(preset: &str) -> Result<Artifacts, String> {
    run_sweep(&presets::load(preset).map_err(|e| e.to_string())?).map_err(|e| format!("{preset}: {e}"))
}

fn constant(a: &Artifacts, key: &str) -> Result<f64, String> {
    a.report.summary.constants.get(key).copied().ok_or_else(|| format!("missing summary value {key}"))
}

/// G_* from its factored form.
fn star(gamma: f64, dim: usize, order: usize) -> f64 {
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    (1..=order).fold(sign, |acc, k| acc * (gamma - 2.0 * (k as f64 - 1.0)) * (gamma + dim as f64 - 2.0 * k as f64))
}

/// d/dgamma of the factored form, by the product rule.
fn star_derivative(gamma: f64, dim: usize, order: usize) -> f64 {
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    let factors: Vec<f64> = (1..=order)
        .flat_map(|k| [gamma - 2.0 * (k as f64 - 1.0), gamma + dim as f64 - 2.0 * k as f64])
        .collect();
    let mut total = 0.0;
    for skip in 0..factors.len() {
        total += factors.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, f)| f).product::<f64>();
    }
    sign * total
}

fn hardy_oracle() -> Outcome {
    let exact = hardy_constant(3, 1).map_err(|e| e.to_string())? == 0.25
        && hardy_constant(5, 2).map_err(|e| e.to_string())? == 1.5625;
    let mut worst = 0.0f64;
    for order in 1..=4 {
        for dim in (2 * order + 1)..=12 {
            let c_h = hardy_constant(dim, order).map_err(|e| e.to_string())?;
            let gamma = -((dim - 2 * order) as f64) / 2.0;
            worst = worst.max((c_h + star(gamma, dim, order)).abs());
        }
    }
    check(exact && worst <= 1e-9, format!("exact values {exact}, max |c_H + G*| = {worst:.2e}"))
}

fn double_root() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for (dim, order) in [(3, 1), (5, 2), (7, 3)] {
        let c_h = hardy_constant(dim, order).map_err(|e| e.to_string())?;
        let p = ProblemParams::new(dim, order, c_h, 0, 0.0).map_err(|e| e.to_string())?;
        let g = critical_exponent(dim, order);
        let z = Complex64::new(g, 0.0);
        let value = characteristic_polynomial(z, &p).norm().max((star(g, dim, order) + c_h).abs());
        let slope = characteristic_derivative(z, &p).norm().max(star_derivative(g, dim, order).abs());
        worst = (worst.0.max(value), worst.1.max(slope));
    }
    check(worst.0 <= 1e-9 && worst.1 <= 1e-9, format!("max |G| = {:.2e}, max |G'| = {:.2e}", worst.0, worst.1))
}

fn laplacian_baseline() -> Outcome {
    let a = spectrum("laplacian-baseline")?;
    let target = -std::f64::consts::PI.powi(2);
    let top = constant(&a, "top_eigenvalue")?;
    let half = constant(&a, "top_half_nodes")?;
    let rel = (top / target - 1.0).abs();
    let order = ((half - target).abs() / (top - target).abs()).log2();
    check(rel <= 5e-3 && order >= 1.8, format!("top {top:.8}, relative error {rel:.2e}, observed order {order:.3}"))
}

fn dichotomy() -> Outcome {
    let sub = spectrum("bg-limit-subcritical")?;
    let sup = spectrum("bg-limit-m1")?;
    let sub_count = sub.report.summary.positive_count.unwrap_or(usize::MAX);
    let count = sup.report.summary.positive_count.unwrap_or(0);
    let top = constant(&sup, "top_eigenvalue")?;
    let dn = (constant(&sup, "top_double_nodes")? / top - 1.0).abs();
    let dr = (constant(&sup, "top_double_radius")? / top - 1.0).abs();
    check(
        sub_count == 0 && count >= 1 && top > 0.0 && top < 1.0 && dn <= 0.01 && dr <= 0.01,
        format!("c=0.2: {sub_count} positive; c=1: {count} positive, top {top:.6e}, n->2n {dn:.2e}, R->2R {dr:.2e}"),
    )
}

fn scaling_law() -> Outcome {
    let a = sweep("scaling-m1")?;
    let errors: Vec<f64> = a
        .report
        .details
        .get("errors")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or("missing errors")?;
    let last = *errors.last().ok_or("empty sweep")?;
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    check(last <= 0.02 && decreasing, format!("relative errors {:?}", errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()))
}

fn divergence_rate() -> Outcome {
    let a = sweep("bg-divergence")?;
    let sub = sweep("bg-subcritical")?;
    let records = &a.report.records;
    let norms: Vec<f64> = records.iter().filter_map(|r| r.log_norm).collect();
    let increasing = norms.len() == records.len() && norms.windows(2).all(|w| w[1] > w[0]);
    let mut exp_err = 0.0f64;
    for r in records {
        let (fit, top) = (r.fitted_exponent.ok_or("missing exponent")?, r.top_eigenvalue.ok_or("missing eigenvalue")?);
        exp_err = exp_err.max((fit / (2.0 * top) - 1.0).abs());
    }
    let mut ratio_err = 0.0f64;
    for w in records.windows(2) {
        let ratio = w[1].fitted_exponent.unwrap_or(f64::NAN) / w[0].fitted_exponent.unwrap_or(f64::NAN);
        let halving = w[0].eps.unwrap_or(f64::NAN) / w[1].eps.unwrap_or(f64::NAN);
        if (halving - 2.0).abs() > 1e-12 {
            return Err(format!("eps values are not successive halvings ({halving})"));
        }
        ratio_err = ratio_err.max((ratio / 4.0 - 1.0).abs());
    }
    let control = sub.report.summary.classification.clone().unwrap_or_default();
    check(
        increasing && exp_err <= 0.01 && ratio_err <= 0.15 && control == "bounded",
        format!(
            "log norms increasing {increasing}, exponent error {exp_err:.2e}, halving ratio error {ratio_err:.3}, control {control}"
        ),
    )
}

fn flows() -> Outcome {
    let a = spectrum("flows")?;
    let drift = constant(&a, "schrodinger_drift")?;
    let rate = constant(&a, "wave_rate")?;
    let lambda = constant(&a, "top_eigenvalue")?;
    let rel = (rate / lambda.sqrt() - 1.0).abs();
    check(drift <= 1e-10 && rel <= 0.01, format!("Schrodinger drift {drift:.2e}, wave rate {rate:.6e} vs sqrt(lambda) error {rel:.2e}"))
}

fn oscillatory_scan() -> Outcome {
    let a = sweep("oscillatory-m1")?;
    let d = 3f64.sqrt() / 2.0;
    let expected = 2.0 * std::f64::consts::PI / d;
    let fitted = constant(&a, "fitted_log_period")?;
    let rel = (fitted / expected - 1.0).abs();
    let signs: Vec<f64> = a.report.records.iter().filter_map(|r| r.leading_coefficient).collect();
    let plus = signs.iter().filter(|&&c| c > 0.0).count();
    let minus = signs.iter().filter(|&&c| c < 0.0).count();
    check(
        a.report.records.len() == 40 && rel <= 0.05 && plus >= 2 && minus >= 2,
        format!("log period {fitted:.5} vs {expected:.5} ({rel:.2e}), signs +{plus} -{minus}"),
    )
}

fn mode_shift() -> Outcome {
    let k0 = spectrum("mode-shift-k0")?.report.summary.positive_count.unwrap_or(0);
    let k1 = spectrum("mode-shift-k1")?.report.summary.positive_count.unwrap_or(usize::MAX);
    check(k0 >= 1 && k1 == 0, format!("k=0: {k0} positive, k=1: {k1} positive"))
}

type Dense = Vec<Vec<f64>>;

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
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
    let s = 0.5f64.powi(squarings);
    let a: Dense = m.iter().map(|row| row.iter().map(|x| x * s).collect()).collect();
    let mut result: Dense = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
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

fn propagator_oracle() -> Outcome {
    let cfg = presets::load("oracle-64").map_err(|e| e.to_string())?;
    let a = run_spectrum(&cfg).map_err(|e| e.to_string())?;
    let (_, table) = a.extra_tables.iter().find(|(name, _)| name == "parabolic").ok_or("no parabolic snapshot")?;
    let modal: Vec<f64> = table.rows.iter().map(|row| row[1].parse::<f64>().unwrap_or(f64::NAN)).collect();
    let t = match &cfg.times {
        Some(singlab_cli::config::TimeSpec::List(list)) if list.len() == 1 => list[0],
        _ => return Err("oracle preset needs a single time".into()),
    };

    let params = cfg.model.params().map_err(|e| e.to_string())?;
    let grid = build_grid(cfg.grid.radius, cfg.grid.nodes.unwrap_or(0), params.dim()).map_err(|e| e.to_string())?;
    let op = assemble(&grid, &params, cfg.model.potential).map_err(|e| e.to_string())?;
    let n = grid.len();
    let m: Dense = (0..n).map(|i| (0..n).map(|j| t * op.entries().get(i, j)).collect()).collect();
    let e = expm(&m);
    let direct: Vec<f64> = e.iter().map(|row| row.iter().sum()).collect();
    let diff: Vec<f64> = modal.iter().zip(&direct).map(|(a, b)| a - b).collect();
    let rel = grid.norm(&diff).map_err(|e| e.to_string())? / grid.norm(&direct).map_err(|e| e.to_string())?;
    check(n == 64 && rel <= 1e-6, format!("n = {n}, t = {t}, relative difference {rel:.2e}"))
}

fn strip_wall_clock(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\"")).collect::<Vec<_>>().join("\n")
}

fn run_cli(args: &[&str], threads: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_singlab"))
        .args(args)
        .args(["--threads", threads, "--out-dir"])
        .arg(out)
        .env_remove("SINGLAB_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

fn determinism() -> Outcome {
    let runs = [
        ("roots", "roots-m1"),
        ("spectrum", "flows"),
        ("spectrum", "bg-limit-m1"),
        ("sweep", "scaling-m1"),
        ("sweep", "bg-divergence"),
        ("sweep", "oscillatory-m1"),
        ("sweep", "stationary-m2"),
    ];
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (cmd, preset) in runs {
        let dirs: Vec<_> = ["1", "4", "1"]
            .iter()
            .enumerate()
            .map(|(i, threads)| {
                let dir = root.path().join(format!("{preset}-{i}"));
                run_cli(&[cmd, "--preset", preset], threads, &dir).map(|_| dir)
            })
            .collect::<Result<_, _>>()?;
        let mut names: Vec<_> = std::fs::read_dir(&dirs[0])
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.file_name()))
            .collect();
        names.sort();
        for name in names {
            let read = |d: &Path| std::fs::read_to_string(d.join(&name)).map_err(|e| e.to_string());
            let base = read(&dirs[0])?;
            for other in &dirs[1..] {
                let text = read(other)?;
                let same = if name.to_string_lossy().ends_with(".json") {
                    strip_wall_clock(&base) == strip_wall_clock(&text)
                } else {
                    base == text
                };
                if !same {
                    return Err(format!("{preset}: {} differs between runs", name.to_string_lossy()));
                }
                compared += 1;
            }
        }
    }
    check(compared > 0, format!("{compared} file comparisons across --threads 1 and 4"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Hardy constant oracle", Duration::from_secs(1), hardy_oracle),
        ("double root at criticality", Duration::from_secs(1), double_root),
        ("Laplacian baseline", Duration::from_secs(30), laplacian_baseline),
        ("spectral dichotomy", Duration::from_secs(120), dichotomy),
        ("scaling law", Duration::from_secs(120), scaling_law),
        ("divergence rate", Duration::from_secs(120), divergence_rate),
        ("Schrodinger conservation and wave rate", Duration::from_secs(30), flows),
        ("oscillatory scan", Duration::from_secs(180), oscillatory_scan),
        ("mode-shifted criticality", Duration::from_secs(60), mode_shift),
        ("propagator oracle", Duration::from_secs(5), propagator_oracle),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let over = if elapsed > *budget { format!(" (over the {}s budget)", budget.as_secs()) } else { String::new() };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} criterion {:>2}: {name}: {detail} [{:.2}s{over}]", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
