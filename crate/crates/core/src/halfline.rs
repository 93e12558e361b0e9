//! Spectral machinery of `H = -d²/dx²` on the half-line with Dirichlet or
//! mixed `φ'(0) = -γ φ(0)` boundary conditions.
//!
//! States are sampled at `x_j = j h`, `j = 1..=N`; transforms are exact for
//! the piecewise-linear interpolant whose value at 0 is the one-sided
//! quadratic extrapolation of the samples.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quad::{filon_linear, integrate_breaks, QuadOptions};

/// Grid-sampled state on `(0, X]`.
#[derive(Debug, Clone)]
pub struct HalfLineState {
    pub h: f64,
    /// `φ(jh)` for `j = 1..=N`.
    pub samples: Vec<Complex64>,
    /// `‖φ‖` before normalisation.
    pub raw_norm: f64,
}

fn segment_norm_sq(a: Complex64, b: Complex64, h: f64) -> f64 {
    h * (a.norm_sqr() + (a * b.conj()).re + b.norm_sqr()) / 3.0
}

impl HalfLineState {
    /// Samples `f` on `(0, x_max]` and normalises the interpolant to 1.
    pub fn from_fn<F>(f: F, h: f64, x_max: f64) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        if !(h > 0.0 && x_max >= 3.0 * h) {
            return invalid("half-line grid needs h > 0 and at least three samples");
        }
        let n = (x_max / h).round() as usize;
        Self::from_samples((1..=n).map(|j| f(j as f64 * h)).collect(), h)
    }

    pub fn from_samples(samples: Vec<Complex64>, h: f64) -> Result<Self> {
        if samples.len() < 3 || !(h > 0.0) {
            return invalid("half-line state needs h > 0 and at least three samples");
        }
        let mut s = Self { h, samples, raw_norm: 1.0 };
        let norm = s.interpolant_norm_sq().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return invalid("half-line state has zero or non-finite norm");
        }
        for v in &mut s.samples {
            *v /= norm;
        }
        s.raw_norm = norm;
        if s.samples.last().map(|v| v.norm_sqr()).unwrap_or(0.0) > 1e-10 {
            log::warn!("half-line state is not negligible at x_max; widen the window");
        }
        Ok(s)
    }

    pub fn x_max(&self) -> f64 {
        self.samples.len() as f64 * self.h
    }

    /// `φ(0)` by quadratic extrapolation.
    pub fn value_at_zero(&self) -> Complex64 {
        let f = &self.samples;
        f[0] * 3.0 - f[1] * 3.0 + f[2]
    }

    /// `φ'(0)` by the one-sided second-order difference.
    pub fn derivative_at_zero(&self) -> Complex64 {
        let f = &self.samples;
        (f[0] * -5.0 + f[1] * 8.0 - f[2] * 3.0) / (2.0 * self.h)
    }

    /// Interpolation nodes including `x = 0`.
    pub fn nodes(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.samples.len() + 1);
        v.push(self.value_at_zero());
        v.extend_from_slice(&self.samples);
        v
    }

    fn interpolant_norm_sq(&self) -> f64 {
        let n = self.nodes();
        n.windows(2).map(|w| segment_norm_sq(w[0], w[1], self.h)).sum()
    }

    /// `∫₀^X p(x) e^{ikx} dx`.
    pub fn fourier(&self, k: Complex64) -> Complex64 {
        filon_linear(&self.nodes(), self.h, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// `φ'(0) + γ φ(0) = 0`.
    Mixed(f64),
}

fn fourier_pair(nodes: &[Complex64], h: f64, k: f64) -> (Complex64, Complex64) {
    let fp = filon_linear(nodes, h, Complex64::new(k, 0.0));
    let fm = filon_linear(nodes, h, Complex64::new(-k, 0.0));
    let i = Complex64::new(0.0, 1.0);
    ((fp + fm) * 0.5, (fp - fm) / (2.0 * i))
}

fn transform_nodes(nodes: &[Complex64], h: f64, bc: BoundaryCondition, k: f64) -> Complex64 {
    let (cos_part, sin_part) = fourier_pair(nodes, h, k);
    let norm = (2.0 / PI).sqrt();
    match bc {
        BoundaryCondition::Dirichlet => sin_part * norm,
        BoundaryCondition::Mixed(g) => (cos_part * k - sin_part * g) * norm / (k * k + g * g).sqrt(),
    }
}

/// `√(2/π) ∫₀^∞ φ(x) sin(kx) dx`.
pub fn sine_transform(state: &HalfLineState, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return invalid("sine transform needs k > 0");
    }
    Ok(transform_nodes(&state.nodes(), state.h, BoundaryCondition::Dirichlet, k))
}

/// Expansion coefficient against the generalized eigenfunction
/// `√(2/π) (k cos kx - γ sin kx) / √(k² + γ²)`.
pub fn mixed_transform(state: &HalfLineState, gamma: f64, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return invalid("mixed transform needs k > 0");
    }
    Ok(transform_nodes(&state.nodes(), state.h, BoundaryCondition::Mixed(gamma), k))
}

/// One- and two-sided tails of a spectral distribution function.
pub trait SpectralTails {
    /// `1 - N(λ)`.
    fn upper_tail(&self, lambda: f64) -> Result<f64>;
    /// `N(-λ)`.
    fn lower_tail(&self, lambda: f64) -> Result<f64>;
}

/// `N(λ) = ν_φ((-∞, λ])` for one of the two boundary conditions.
#[derive(Debug, Clone)]
pub struct SpectralDistribution {
    pub bc: BoundaryCondition,
    nodes: Vec<Complex64>,
    h: f64,
    norm_sq: f64,
    /// Eigenvalue and weight of the bound state (mixed, `γ > 0`).
    pub bound_state: Option<(f64, f64)>,
    quad_tol: f64,
}

pub fn spectral_distribution(state: &HalfLineState, bc: BoundaryCondition) -> Result<SpectralDistribution> {
    if let BoundaryCondition::Mixed(g) = bc {
        if !g.is_finite() {
            return invalid("mixed boundary parameter must be finite");
        }
    }
    let nodes = state.nodes();
    let norm_sq = nodes.windows(2).map(|w| segment_norm_sq(w[0], w[1], state.h)).sum();
    let bound_state = match bc {
        BoundaryCondition::Mixed(g) if g > 0.0 => {
            let overlap = filon_linear(&nodes, state.h, Complex64::new(0.0, g));
            Some((-g * g, 2.0 * g * overlap.norm_sqr()))
        }
        _ => None,
    };
    Ok(SpectralDistribution { bc, nodes, h: state.h, norm_sq, bound_state, quad_tol: 1e-12 })
}

impl SpectralDistribution {
    /// `|φ̂(k)|²`; the absolutely continuous part of `dN` is `|φ̂(√λ)|²/(2√λ) dλ`.
    pub fn k_density(&self, k: f64) -> f64 {
        transform_nodes(&self.nodes, self.h, self.bc, k).norm_sqr()
    }

    /// Total mass, `‖φ‖²`.
    pub fn total(&self) -> f64 {
        self.norm_sq
    }

    fn bound_weight(&self) -> f64 {
        self.bound_state.map(|b| b.1).unwrap_or(0.0)
    }

    /// `∫_a^b |φ̂|² dk` on unit panels.
    fn k_mass(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let mut breaks = vec![a];
        let mut x = a.floor() + 1.0;
        while x < b {
            breaks.push(x);
            x += 1.0;
        }
        breaks.push(b);
        let opts = QuadOptions { abs_tol: self.quad_tol, rel_tol: 1e-13, max_intervals: 200_000 };
        Ok(integrate_breaks(|k| Complex64::new(self.k_density(k), 0.0), &breaks, opts)?.value.re)
    }

    pub fn n(&self, lambda: f64) -> Result<f64> {
        let atom = match self.bound_state {
            Some((e, w)) if lambda >= e => w,
            _ => 0.0,
        };
        if lambda <= 0.0 {
            return Ok(atom);
        }
        Ok(atom + self.k_mass(0.0, lambda.sqrt())?)
    }

    /// `1 - N(λ)` on an increasing ladder, sharing the quadrature.
    pub fn upper_tails(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        let mut acc = self.bound_weight();
        let mut k0 = 0.0;
        let mut out = Vec::with_capacity(lambdas.len());
        for &l in lambdas {
            if !(l > 0.0) || l.sqrt() < k0 {
                return invalid("tail ladder must be positive and increasing");
            }
            acc += self.k_mass(k0, l.sqrt())?;
            k0 = l.sqrt();
            out.push(self.norm_sq - acc);
        }
        Ok(out)
    }

    /// Rows `lambda,N`.
    pub fn to_csv(&self, lambdas: &[f64]) -> Result<String> {
        let mut s = String::from("lambda,N\n");
        for &l in lambdas {
            let _ = writeln!(s, "{l},{}", self.n(l)?);
        }
        Ok(s)
    }
}

impl SpectralTails for SpectralDistribution {
    fn upper_tail(&self, lambda: f64) -> Result<f64> {
        Ok(self.upper_tails(&[lambda])?[0])
    }

    fn lower_tail(&self, lambda: f64) -> Result<f64> {
        self.n(-lambda)
    }
}

/// Limits `c₁ = lim λ^α(1 - N(λ))`, `c₂ = lim λ^α N(-λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailConstants {
    pub c1: f64,
    pub c2: f64,
    pub ladder: Vec<f64>,
    /// `λ^α(1 - N(λ))` on the ladder.
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// Distance between the extrapolated and the last ladder value.
    pub residual: f64,
    pub conclusive: bool,
}

/// Aitken extrapolation of a sequence with geometric error; falls back to
/// the last term when the second difference vanishes or the step is wild.
pub fn aitken(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 3 {
        return v.last().copied().unwrap_or(f64::NAN);
    }
    let (a, b, c) = (v[n - 3], v[n - 2], v[n - 1]);
    let d2 = c - 2.0 * b + a;
    if d2.abs() <= 1e-14 * c.abs().max(1e-300) {
        return c;
    }
    let x = c - (c - b) * (c - b) / d2;
    if (x - c).abs() > 2.0 * (c - b).abs() || !x.is_finite() {
        c
    } else {
        x
    }
}

pub const TAIL_LADDER: [f64; 3] = [1e2, 1e3, 1e4];

pub fn tail_constants(dist: &SpectralDistribution, alpha: f64) -> Result<TailConstants> {
    tail_constants_on(dist, alpha, &TAIL_LADDER)
}

pub fn tail_constants_on(dist: &SpectralDistribution, alpha: f64, ladder: &[f64]) -> Result<TailConstants> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return invalid("alpha must lie in (0, 2]");
    }
    let upper_raw = dist.upper_tails(ladder)?;
    let upper: Vec<f64> = ladder.iter().zip(&upper_raw).map(|(l, t)| l.powf(alpha) * t).collect();
    let lower = ladder
        .iter()
        .map(|&l| Ok(l.powf(alpha) * dist.lower_tail(l)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(extrapolate(ladder.to_vec(), upper, lower))
}

/// Generic version for any [`SpectralTails`].
pub fn tail_constants_generic(dist: &dyn SpectralTails, alpha: f64, ladder: &[f64]) -> Result<TailConstants> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return invalid("alpha must lie in (0, 2]");
    }
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &l in ladder {
        upper.push(l.powf(alpha) * dist.upper_tail(l)?);
        lower.push(l.powf(alpha) * dist.lower_tail(l)?);
    }
    Ok(extrapolate(ladder.to_vec(), upper, lower))
}

fn extrapolate(ladder: Vec<f64>, upper: Vec<f64>, lower: Vec<f64>) -> TailConstants {
    let c1 = aitken(&upper);
    let c2 = aitken(&lower);
    let last = |v: &[f64]| v.last().copied().unwrap_or(0.0);
    let residual = (c1 - last(&upper)).abs() + (c2 - last(&lower)).abs();
    let scale = c1.abs() + c2.abs();
    let conclusive = residual <= 0.05 * scale.max(1e-12);
    TailConstants { c1, c2, ladder, upper, lower, residual, conclusive }
}

/// Rows `lambda,lambda^alpha(1-N)`.
pub fn tail_csv(t: &TailConstants) -> String {
    let mut s = String::from("lambda,scaled_upper_tail\n");
    for (l, u) in t.ladder.iter().zip(&t.upper) {
        let _ = writeln!(s, "{l},{u}");
    }
    s
}

/// Stability index and scale of the limiting law, or the degenerate
/// (Zeno-type) boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StableSigma {
    Stable { alpha: f64, sigma: f64 },
    Degenerate { boundary_sq: f64 },
}

/// Below this `|boundary data|²` the state is treated as degenerate.
pub const DEGENERATE_BOUNDARY: f64 = 1e-8;

pub fn stable_sigma(bc: BoundaryCondition, state: &HalfLineState) -> StableSigma {
    let c = (2.0 / PI).sqrt();
    let (b, alpha, factor) = match bc {
        BoundaryCondition::Dirichlet => (state.value_at_zero().norm_sqr(), 0.5, c),
        BoundaryCondition::Mixed(g) => {
            ((state.derivative_at_zero() + state.value_at_zero() * g).norm_sqr(), 1.5, 2.0 / 3.0 * c)
        }
    };
    if b < DEGENERATE_BOUNDARY {
        StableSigma::Degenerate { boundary_sq: b }
    } else {
        StableSigma::Stable { alpha, sigma: factor * b }
    }
}
