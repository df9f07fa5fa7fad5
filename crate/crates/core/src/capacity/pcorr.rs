use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{HvError, Result};
use crate::model::ModelKind;

/// Floor applied to estimated standard deviations so that noiseless
/// scenarios still give valid statistics.
pub const MIN_SIGMA: f64 = 1e-9;

/// Quadrature tolerance per panel.
const PANEL_TOL: f64 = 1e-8;
/// Equal panels covering ±10 standard deviations of the hit density.
const CORE_PANELS: usize = 40;
const MAX_DEPTH: u32 = 50;

/// Where a set of detection statistics came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: ModelKind,
    pub dim: usize,
    /// Item memory size N.
    pub items: usize,
    /// Superimposed terms m.
    pub terms: usize,
}

/// Gaussian summaries of the hit score (correct item) and reject score
/// (every other item) seen by clean-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub mu_hit: f64,
    pub sigma_hit: f64,
    pub mu_reject: f64,
    pub sigma_reject: f64,
    /// Score the statistics were measured with.
    pub metric: String,
    pub scenario: Option<Scenario>,
}

impl DetectionStats {
    pub fn new(mu_hit: f64, sigma_hit: f64, mu_reject: f64, sigma_reject: f64) -> Result<Self> {
        let stats = Self {
            mu_hit,
            sigma_hit,
            mu_reject,
            sigma_reject,
            metric: String::new(),
            scenario: None,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn with_context(mut self, metric: impl Into<String>, scenario: Scenario) -> Self {
        self.metric = metric.into();
        self.scenario = Some(scenario);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.mu_hit, self.sigma_hit, self.mu_reject, self.sigma_reject];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(HvError::NonFinite(format!("detection statistics {all:?}")));
        }
        if self.sigma_hit <= 0.0 || self.sigma_reject <= 0.0 {
            return Err(HvError::InvalidParameter(format!(
                "standard deviations must be positive, got {} and {}",
                self.sigma_hit, self.sigma_reject
            )));
        }
        Ok(())
    }
}

fn std_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn std_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Probability that the hit score beats all N−1 independent reject scores:
///
/// p = ∫ N(x; μh−μr, σh) Φ(x/σr)^{N−1} dx
///
/// evaluated by adaptive Simpson quadrature over (μh−μr) ± 10·max(σh, σr).
pub fn pcorr_analytic(stats: &DetectionStats, n: usize) -> Result<f64> {
    stats.validate()?;
    if n == 0 {
        return Err(HvError::InvalidParameter("need at least one candidate".into()));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let k = (n - 1) as f64;
    let delta = stats.mu_hit - stats.mu_reject;
    let (sh, sr) = (stats.sigma_hit, stats.sigma_reject);
    // x = δ + σh·z turns the hit density into a standard normal in z
    let f = |z: f64| {
        let p = std_pdf(z);
        if p == 0.0 {
            0.0
        } else {
            p * std_cdf((delta + sh * z) / sr).powf(k)
        }
    };
    let half = 10.0 * sh.max(sr) / sh;
    let core = half.min(10.0);
    let mut edges: Vec<f64> = (0..=CORE_PANELS)
        .map(|i| -core + 2.0 * core * i as f64 / CORE_PANELS as f64)
        .collect();
    if half > core {
        edges.insert(0, -half);
        edges.push(half);
    }
    // breakpoint where the reject factor switches on, which can be a sharp step
    let step = -delta / sh;
    if step > -half && step < half && !edges.contains(&step) {
        edges.push(step);
        edges.sort_by(f64::total_cmp);
    }
    let total: f64 = edges.windows(2).map(|w| simpson(&f, w[0], w[1])).sum();
    Ok(total.clamp(0.0, 1.0))
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, [fa, fm, fb], whole, PANEL_TOL, MAX_DEPTH)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, [fa, fm, fb]: [f64; 3], whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    refine(f, a, m, [fa, flm, fm], left, tol / 2.0, depth - 1) + refine(f, m, b, [fm, frm, fb], right, tol / 2.0, depth - 1)
}
