//! Small least-squares helpers.

/// Straight-line fit y = intercept + slope x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares on centered data. `None` for fewer than two
/// points or a degenerate abscissa.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Some(LineFit { slope, intercept, rms_residual: (ss / n as f64).sqrt() })
}

/// y ≈ a cos(ω x) + b sin(ω x) at fixed ω. Returns (a, b, residual sum of squares).
pub fn fit_sinusoid(x: &[f64], y: &[f64], omega: f64) -> Option<(f64, f64, f64)> {
    let (mut cc, mut cs, mut ss, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in x.iter().zip(y) {
        let (s, c) = (omega * t).sin_cos();
        cc += c * c;
        cs += c * s;
        ss += s * s;
        yc += v * c;
        ys += v * s;
    }
    let det = cc * ss - cs * cs;
    if det.abs() <= 1e-14 * (cc * ss).max(f64::MIN_POSITIVE) {
        return None;
    }
    let a = (yc * ss - ys * cs) / det;
    let b = (ys * cc - yc * cs) / det;
    let rss = x
        .iter()
        .zip(y)
        .map(|(&t, &v)| {
            let (s, c) = (omega * t).sin_cos();
            (v - a * c - b * s).powi(2)
        })
        .sum();
    Some((a, b, rss))
}

/// Frequency minimizing the sinusoid residual: coarse scan over
/// [lo, hi] followed by golden-section refinement.
pub fn best_frequency(x: &[f64], y: &[f64], lo: f64, hi: f64, samples: usize) -> Option<f64> {
    let rss = |w: f64| fit_sinusoid(x, y, w).map_or(f64::INFINITY, |f| f.2);
    let samples = samples.max(3);
    let step = (hi - lo) / (samples - 1) as f64;
    let best = (0..samples)
        .map(|i| lo + step * i as f64)
        .min_by(|a, b| rss(*a).total_cmp(&rss(*b)))?;
    if !rss(best).is_finite() {
        return None;
    }
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if rss(c) < rss(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    Some(0.5 * (a + b))
}
