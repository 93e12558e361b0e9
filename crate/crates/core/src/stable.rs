//! Stable characteristic functions and the tail-to-parameter bookkeeping.
//!
//! The log-characteristic function is
//!
//! ```text
//! log f(t) = σ (iγt - |t|^α (1 - iβ sgn(t) ω(t, α))),
//! ω = tan(πα/2) for α ≠ 1,   ω = -(2/π) log|t| for α = 1.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::I;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableLawParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
}

impl StableLawParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return invalid(format!("alpha = {alpha} outside (0, 2]"));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return invalid(format!("beta = {beta} outside [-1, 1]"));
        }
        if !(sigma > 0.0) || !gamma.is_finite() {
            return invalid("sigma must be positive and gamma finite");
        }
        Ok(Self { alpha, beta, gamma, sigma })
    }

    /// Centred Gaussian with the given variance (`σ = variance/2`).
    pub fn gaussian(variance: f64) -> Result<Self> {
        Self::new(2.0, 0.0, 0.0, variance / 2.0)
    }
}

fn omega(t: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        -2.0 / PI * t.abs().ln()
    } else {
        (PI * alpha / 2.0).tan()
    }
}

pub fn stable_cf(p: &StableLawParams, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = t.abs().powf(p.alpha);
    let skew = if p.alpha == 2.0 { 0.0 } else { p.beta * t.signum() * omega(t, p.alpha) };
    ((I * (p.gamma * t) - a * (1.0 - I * skew)) * p.sigma).exp()
}

/// `d(α) = Γ(1-α) cos(πα/2)`, `d(1) = π/2`. At `α = 2` the formula has a
/// pole; the returned `+∞` encodes that a finite-variance law has vanishing
/// tail constants (see [`StableLawParams::gaussian`]).
pub fn d_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return invalid(format!("alpha = {alpha} outside (0, 2]"));
    }
    if alpha == 1.0 {
        return Ok(PI / 2.0);
    }
    if alpha == 2.0 {
        return Ok(f64::INFINITY);
    }
    Ok(gamma(1.0 - alpha) * (PI * alpha / 2.0).cos())
}

/// Stable parameters from the tail constants
/// `λ^α (1 - N(λ)) → c₁`, `λ^α N(-λ) → c₂`.
pub fn params_from_tails(c1: f64, c2: f64, alpha: f64) -> Result<StableLawParams> {
    if !(c1 >= 0.0 && c2 >= 0.0) || c1 + c2 <= 0.0 {
        return invalid("tail constants must be nonnegative with c1 + c2 > 0");
    }
    if alpha == 2.0 {
        return invalid("alpha = 2 has no tail parametrisation; use StableLawParams::gaussian");
    }
    let sigma = (c1 + c2) * d_alpha(alpha)?;
    StableLawParams::new(alpha, (c1 - c2) / (c1 + c2), 0.0, sigma)
}

/// One-sided ½-stable law: `(CDF, PDF)` at `λ`,
/// `CDF = erfc(√(σ/(2λ)))`, `PDF = √(σ/2π) λ^{-3/2} e^{-σ/(2λ)}`.
pub fn levy_half(sigma: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !(sigma > 0.0) {
        return invalid("levy_half needs λ > 0 and σ > 0");
    }
    let cdf = erfc((sigma / (2.0 * lambda)).sqrt());
    let pdf = (sigma / (2.0 * PI)).sqrt() * lambda.powf(-1.5) * (-sigma / (2.0 * lambda)).exp();
    Ok((cdf, pdf))
}

/// Characteristic function of [`levy_half`]: a `(½, 1)` stable law with
/// scale `√σ`.
pub fn levy_half_cf(sigma: f64, t: f64) -> Complex64 {
    let p = StableLawParams { alpha: 0.5, beta: 1.0, gamma: 0.0, sigma: sigma.sqrt() };
    stable_cf(&p, t)
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractionRow {
    pub n: u64,
    pub max_rel_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractionReport {
    pub alpha: f64,
    pub sigma: f64,
    pub rows: Vec<AttractionRow>,
}

impl AttractionReport {
    pub fn last_deviation(&self) -> f64 {
        self.rows.last().map(|r| r.max_rel_deviation).unwrap_or(f64::NAN)
    }
}

/// Compares `|f(t/n^{1/α})|^n` with `e^{-σ|t|^α}` over `t_grid` for each `n`
/// of the ladder. Moduli are insensitive to the centring constants.
pub fn attraction_check<F>(cf: F, target: &StableLawParams, n_ladder: &[u64], t_grid: &[f64]) -> AttractionReport
where
    F: Fn(f64) -> Complex64,
{
    let rows = n_ladder
        .iter()
        .map(|&n| {
            let b = (n as f64).powf(1.0 / target.alpha);
            let dev = t_grid
                .iter()
                .map(|&t| {
                    let got = (n as f64 * cf(t / b).norm().ln()).exp();
                    let want = (-target.sigma * t.abs().powf(target.alpha)).exp();
                    (got / want - 1.0).abs()
                })
                .fold(0.0, f64::max);
            AttractionRow { n, max_rel_deviation: dev }
        })
        .collect();
    AttractionReport { alpha: target.alpha, sigma: target.sigma, rows }
}

/// Chambers–Mallows–Stuck sampler, batched with per-batch derived seeds.
pub fn sample_stable(p: &StableLawParams, count: usize, seed: u64) -> Vec<f64> {
    const BATCH: usize = 4096;
    let scale = p.sigma.powf(1.0 / p.alpha);
    let mut out = Vec::with_capacity(count);
    let mut batch = 0u64;
    while out.len() < count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(batch.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let take = BATCH.min(count - out.len());
        for _ in 0..take {
            let v = PI * (rng.random::<f64>() - 0.5);
            let w = -(1.0 - rng.random::<f64>()).ln();
            let x = if p.alpha == 1.0 {
                let h = PI / 2.0 + p.beta * v;
                let core = 2.0 / PI * (h * v.tan() - p.beta * ((PI / 2.0 * w * v.cos()) / h).ln());
                scale * core + 2.0 / PI * p.beta * scale * scale.ln()
            } else {
                let t = p.beta * (PI * p.alpha / 2.0).tan();
                let b = t.atan() / p.alpha;
                let s = (1.0 + t * t).powf(1.0 / (2.0 * p.alpha));
                let a = p.alpha * (v + b);
                scale * s * a.sin() / v.cos().powf(1.0 / p.alpha)
                    * ((v - a).cos() / w).powf((1.0 - p.alpha) / p.alpha)
            };
            out.push(x + p.sigma * p.gamma);
        }
        batch += 1;
    }
    out
}

/// Empirical characteristic function of a sample.
pub fn empirical_cf(samples: &[f64], t: f64) -> Complex64 {
    let sum: Complex64 = samples.iter().map(|&x| (I * (t * x)).exp()).sum();
    sum / samples.len() as f64
}
