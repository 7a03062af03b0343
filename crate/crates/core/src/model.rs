//! Closed-form, parameter-level quantities: Hardy constants, angular
//! eigenvalues, the Euler-type characteristic polynomial of the singular
//! stationary operator and the criticality classification built on it.

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative band around the Hardy constant treated as critical.
pub const CRITICAL_BAND: f64 = 1e-12;

/// Relative imaginary part below which a computed root is snapped to the real axis.
const REAL_SNAP: f64 = 1e-9;

/// One singular or regularized radial problem.
///
/// `dim` is the space dimension N, `order` the parameter m of the operator
/// of order 2m, `coupling` the strength c of the potential, `harmonic` the
/// spherical-harmonic index k and `eps` the regularization scale (0 for the
/// singular problem).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    dim: usize,
    order: usize,
    coupling: f64,
    harmonic: usize,
    eps: f64,
}

impl ProblemParams {
    pub fn new(dim: usize, order: usize, coupling: f64, harmonic: usize, eps: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order m must be at least 1".into()));
        }
        if dim <= 2 * order {
            return Err(Error::Dimension { dim, order });
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling {coupling} is not finite")));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidArgument(format!("eps {eps} must be finite and >= 0")));
        }
        Ok(Self { dim, order, coupling, harmonic, eps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn harmonic(&self) -> usize {
        self.harmonic
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(self.dim, self.order, coupling, self.harmonic, self.eps)
    }

    pub fn with_harmonic(&self, harmonic: usize) -> Result<Self> {
        Self::new(self.dim, self.order, self.coupling, harmonic, self.eps)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.dim, self.order, self.coupling, self.harmonic, eps)
    }

    /// The exponent -(N-2m)/2 of the critical power solution.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.dim, self.order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalityReport {
    pub hardy_constant: f64,
    /// c - (mu_k)^m.
    pub effective_coupling: f64,
    pub regime: Regime,
    /// Imaginary part d of the principal root pair; only for supercritical k = 0.
    pub oscillation_frequency: Option<f64>,
}

/// All 2m roots of the characteristic polynomial, closed under conjugation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// The pair -(N-2m)/2 +- i d, present above the Hardy constant.
    pub principal_pair: Option<(Complex64, Complex64)>,
    /// The double real root -(N-2m)/2, present at the Hardy constant.
    pub double_root: Option<f64>,
    /// Largest |G(root)| divided by the largest coefficient magnitude.
    pub max_residual: f64,
}

pub fn critical_exponent(dim: usize, order: usize) -> f64 {
    -((dim as f64) - 2.0 * order as f64) / 2.0
}

fn check_dimension(dim: usize, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("order m must be at least 1".into()));
    }
    if dim <= 2 * order {
        return Err(Error::Dimension { dim, order });
    }
    Ok(())
}

/// Best constant of the Hardy-Rellich inequality for the operator of order 2m.
///
/// Products of B_k = [(N-2k)(N+2k-4)/4]^2 over even k for even m, and over
/// odd k >= 3 times ((N-2)/2)^2 for odd m.
pub fn hardy_constant(dim: usize, order: usize) -> Result<f64> {
    check_dimension(dim, order)?;
    let n = dim as f64;
    let factor = |k: usize| {
        let k = k as f64;
        ((n - 2.0 * k) * (n + 2.0 * k - 4.0) / 4.0).powi(2)
    };
    let value = if order.is_multiple_of(2) {
        (2..=order).step_by(2).map(factor).product()
    } else {
        let base = ((n - 2.0) / 2.0).powi(2);
        (3..=order).step_by(2).map(factor).product::<f64>() * base
    };
    Ok(value)
}

/// Eigenvalue mu_k = k(k+N-2) of minus the Laplace-Beltrami operator on the sphere.
///
/// Panics if `dim < 2`.
pub fn angular_eigenvalue(k: usize, dim: usize) -> f64 {
    assert!(dim >= 2, "angular eigenvalues need N >= 2");
    (k * (k + dim - 2)) as f64
}

/// Roots of G_*: the 2m integers 2(k-1) and 2k-N, k = 1..m.
fn star_linear_factors(dim: usize, order: usize) -> Vec<f64> {
    (1..=order)
        .flat_map(|k| [2.0 * (k as f64 - 1.0), 2.0 * k as f64 - dim as f64])
        .collect()
}

fn star_sign(order: usize) -> f64 {
    if order % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// G_*(gamma) = (-1)^{m+1} prod_k [gamma - 2(k-1)](gamma + N - 2k).
pub fn star_polynomial(gamma: Complex64, dim: usize, order: usize) -> Complex64 {
    star_linear_factors(dim, order)
        .into_iter()
        .fold(Complex64::new(star_sign(order), 0.0), |acc, root| acc * (gamma - root))
}

/// G(gamma) = G_*(gamma) + c, evaluated through the product form.
pub fn characteristic_polynomial(gamma: Complex64, params: &ProblemParams) -> Complex64 {
    star_polynomial(gamma, params.dim, params.order) + params.coupling
}

/// G'(gamma) by the product rule.
pub fn characteristic_derivative(gamma: Complex64, params: &ProblemParams) -> Complex64 {
    let roots = star_linear_factors(params.dim, params.order);
    let mut total = Complex64::new(0.0, 0.0);
    for skip in 0..roots.len() {
        let term = roots
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .fold(Complex64::new(1.0, 0.0), |acc, (_, &r)| acc * (gamma - r));
        total += term;
    }
    total * star_sign(params.order)
}

/// Coefficients of G_* in ascending powers, expanded exactly over the integers.
pub fn star_coefficients(dim: usize, order: usize) -> Vec<i128> {
    let mut coeffs = vec![if order % 2 == 1 { 1i128 } else { -1 }];
    for k in 1..=order {
        for root in [2 * (k as i128 - 1), 2 * k as i128 - dim as i128] {
            // multiply by (gamma - root)
            let mut next = vec![0i128; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * root;
            }
            coeffs = next;
        }
    }
    coeffs
}

fn companion_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let companion = Mat::<f64>::from_fn(degree, degree, |i, j| {
        if i == 0 {
            -coeffs[degree - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .eigenvalues()
        .map_err(|_| Error::RootFinder { residual: f64::NAN })
}

fn polish(mut root: Complex64, params: &ProblemParams) -> Complex64 {
    let mut best = characteristic_polynomial(root, params).norm();
    for _ in 0..4 {
        let d = characteristic_derivative(root, params);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = root - characteristic_polynomial(root, params) / d;
        let value = characteristic_polynomial(candidate, params).norm();
        if !(value < best) {
            break;
        }
        best = value;
        root = candidate;
    }
    root
}

fn is_critical(coupling: f64, hardy: f64) -> bool {
    (coupling - hardy).abs() <= CRITICAL_BAND * hardy.max(1.0)
}

/// All roots of G(gamma) = 0 via eigenvalues of the companion matrix of the
/// expanded polynomial, followed by Newton polishing on the product form.
pub fn characteristic_roots(params: &ProblemParams) -> Result<RootSet> {
    let (dim, order) = (params.dim, params.order);
    let degree = 2 * order;
    let mut coeffs: Vec<f64> = star_coefficients(dim, order).into_iter().map(|a| a as f64).collect();
    coeffs[0] += params.coupling;
    let scale = coeffs.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));

    let hardy = hardy_constant(dim, order)?;
    let gamma_m = critical_exponent(dim, order);
    let critical = is_critical(params.coupling, hardy);

    let mut raw: Vec<Complex64> = companion_roots(&coeffs)?
        .into_iter()
        .map(|z| polish(z, params))
        .collect();

    if critical {
        // the two roots nearest gamma_m are the double root
        raw.sort_by(|a, b| {
            (a - gamma_m).norm().total_cmp(&(b - gamma_m).norm())
        });
        raw[0] = Complex64::new(gamma_m, 0.0);
        raw[1] = Complex64::new(gamma_m, 0.0);
    }

    let mut reals = Vec::new();
    let mut uppers = Vec::new();
    for z in raw {
        if z.im.abs() < REAL_SNAP * (1.0 + z.re.abs()) {
            reals.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            uppers.push(z);
        }
    }
    let mut roots = reals;
    roots.extend(uppers.iter().copied());
    roots.extend(uppers.iter().map(|z| z.conj()));
    let max_residual = roots
        .iter()
        .map(|&z| characteristic_polynomial(z, params).norm() / scale)
        .fold(0.0, f64::max);
    if roots.len() != degree || !(max_residual <= 1e-9) {
        return Err(Error::RootFinder { residual: max_residual });
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let principal_pair = if !critical && params.coupling > hardy {
        uppers
            .iter()
            .min_by(|a, b| {
                let ka = ((a.re - gamma_m).abs(), a.im);
                let kb = ((b.re - gamma_m).abs(), b.im);
                ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            })
            .map(|&z| (z, z.conj()))
    } else {
        None
    };

    Ok(RootSet {
        roots,
        principal_pair,
        double_root: critical.then_some(gamma_m),
        max_residual,
    })
}

/// Classify the coupling against the Hardy constant after the angular shift (mu_k)^m.
pub fn classify(params: &ProblemParams) -> Result<CriticalityReport> {
    let hardy = hardy_constant(params.dim, params.order)?;
    let shift = angular_eigenvalue(params.harmonic, params.dim).powi(params.order as i32);
    let effective = params.coupling - shift;
    let regime = if is_critical(effective, hardy) {
        Regime::Critical
    } else if effective > hardy {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    };
    let oscillation_frequency = if regime == Regime::Supercritical && params.harmonic == 0 {
        characteristic_roots(params)?.principal_pair.map(|(z, _)| z.im)
    } else {
        None
    };
    Ok(CriticalityReport {
        hardy_constant: hardy,
        effective_coupling: effective,
        regime,
        oscillation_frequency,
    })
}

/// The coupling c = -G_*(2m) for which |x|^{2m} is a stationary solution of
/// the singular equation, provided it lies above the Hardy constant.
pub fn analytic_stationary_coupling(dim: usize, order: usize) -> Result<f64> {
    let hardy = hardy_constant(dim, order)?;
    let value = -star_polynomial(Complex64::new(2.0 * order as f64, 0.0), dim, order).re;
    if value > hardy {
        Ok(value)
    } else {
        Err(Error::Infeasible(format!(
            "gamma = 2m = {} is a root only for c = -G_*(2m) = {value}, which is not above c_H = {hardy}",
            2 * order
        )))
    }
}
