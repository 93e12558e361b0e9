//! Complex-analytic primitives on the upper half-plane.
//!
//! Livšic function `s`, Weyl–Titchmarsh function `M` and characteristic
//! function `S` are related by
//!
//! ```text
//! s = (M - i)/(M + i),        S = (s - κ)/(κ̄ s - 1).
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::graph::{self, GraphSpec};
use crate::quad::{integrate_breaks, QuadOptions};
use crate::I;

/// A Weyl–Titchmarsh value, which may be the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinity)
    }
}

impl From<Complex64> for Extended {
    fn from(z: Complex64) -> Self {
        Extended::Finite(z)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(z) => write!(f, "{z}"),
            Extended::Infinity => f.write_str("∞"),
        }
    }
}

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return invalid(format!("z = {re} + {im}i is not in the open upper half-plane"));
        }
        Ok(Self { re, im })
    }

    pub fn z(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<Complex64> for HalfPlanePoint {
    type Error = Error;
    fn try_from(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }
}

/// The von Neumann parameter `κ` of a triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonNeumannParam {
    kappa: Complex64,
}

impl VonNeumannParam {
    /// Accepts `|κ| ≤ 1`; `|κ| = 1` marks the self-adjoint case.
    pub fn new(kappa: Complex64) -> Result<Self> {
        if !(kappa.norm() <= 1.0 + 1e-15) {
            return invalid(format!("|kappa| = {} exceeds 1", kappa.norm()));
        }
        Ok(Self { kappa })
    }

    pub fn real(k: f64) -> Result<Self> {
        Self::new(Complex64::new(k, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.kappa
    }

    pub fn is_self_adjoint(self) -> bool {
        (self.kappa.norm() - 1.0).abs() < 1e-15
    }

    fn dissipative(self) -> Result<Complex64> {
        if self.is_self_adjoint() {
            return invalid("operation requires |kappa| < 1");
        }
        Ok(self.kappa)
    }
}

/// `s = (M - i)/(M + i)`; `∞ ↦ 1`.
pub fn livsic_from_weyl(m: Extended) -> Complex64 {
    match m {
        Extended::Infinity => Complex64::new(1.0, 0.0),
        Extended::Finite(m) => (m - I) / (m + I),
    }
}

/// `M = (1/i)(s + 1)/(s - 1)`.
pub fn weyl_from_livsic(s: Complex64) -> Result<Complex64> {
    let d = s - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(s));
    }
    Ok((s + 1.0) / (d * I))
}

/// `S = (s - κ)/(κ̄ s - 1)`. The map is an involution for fixed `κ`.
pub fn char_from_livsic(s: Complex64, kappa: VonNeumannParam) -> Result<Complex64> {
    let k = kappa.dissipative()?;
    let d = k.conj() * s - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(s));
    }
    Ok((s - k) / d)
}

/// Characteristic function directly from the Weyl–Titchmarsh value.
pub fn char_from_weyl(m: Extended, kappa: VonNeumannParam) -> Result<Complex64> {
    let k = kappa.dissipative()?;
    let one = Complex64::new(1.0, 0.0);
    if k == one {
        return invalid("kappa = 1");
    }
    let lead = -(one - k) / (one - k.conj());
    match m {
        Extended::Infinity => Ok(lead),
        Extended::Finite(m) => {
            let a = I * (one + k) / (one - k);
            let b = I * (one + k.conj()) / (one - k.conj());
            let d = m + b;
            if d == Complex64::new(0.0, 0.0) {
                return Err(Error::Pole(m));
            }
            Ok(lead * (m - a) / d)
        }
    }
}

/// Condition number of the Krein correction, `1/|1 - κ|`.
pub fn krein_condition(kappa: VonNeumannParam) -> f64 {
    1.0 / (Complex64::new(1.0, 0.0) - kappa.value()).norm()
}

/// `p(z) = (M(z) + i(κ+1)/(κ-1))⁻¹`.
pub fn krein_correction(m: Extended, kappa: VonNeumannParam) -> Result<Complex64> {
    let k = kappa.value();
    let km1 = k - 1.0;
    if km1 == Complex64::new(0.0, 0.0) {
        return invalid("kappa = 1 has no Krein correction");
    }
    let cond = krein_condition(kappa);
    if cond > 1e6 {
        log::warn!("Krein correction is ill-conditioned: 1/|1-kappa| = {cond:e}");
    }
    let m = match m {
        Extended::Infinity => return Ok(Complex64::new(0.0, 0.0)),
        Extended::Finite(m) => m,
    };
    let d = m + I * (k + 1.0) / km1;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(m));
    }
    Ok(1.0 / d)
}

/// Shape of a positive Borel measure.
#[derive(Clone)]
pub enum MeasureKind {
    /// Absolutely continuous with the given density; `mean_density` is the
    /// asymptotic average used for the analytic tail beyond the cutoff.
    LebesgueDensity { density: Arc<dyn Fn(f64) -> f64 + Send + Sync>, mean_density: f64 },
    /// Equal atoms at `offset + n·spacing`, `n ∈ ℤ`.
    AtomicLattice { offset: f64, spacing: f64, weight: f64 },
    /// Density `(A/π)·P_r(ℓλ - π - Φ)` with the Poisson kernel
    /// `P_r(θ) = (1 - r²)/(1 - 2r cos θ + r²)`.
    PoissonDensity { amplitude: f64, decay: f64, scale: f64, phase: f64 },
    /// Finitely many atoms `(position, mass)`.
    Discrete(Vec<(f64, f64)>),
}

impl fmt::Debug for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::LebesgueDensity { mean_density, .. } => {
                write!(f, "LebesgueDensity {{ mean_density: {mean_density} }}")
            }
            MeasureKind::AtomicLattice { offset, spacing, weight } => {
                write!(f, "AtomicLattice {{ offset: {offset}, spacing: {spacing}, weight: {weight} }}")
            }
            MeasureKind::PoissonDensity { amplitude, decay, scale, phase } => write!(
                f,
                "PoissonDensity {{ amplitude: {amplitude}, decay: {decay}, scale: {scale}, phase: {phase} }}"
            ),
            MeasureKind::Discrete(atoms) => write!(f, "Discrete({atoms:?})"),
        }
    }
}

/// A measure with its quadrature parameters.
#[derive(Debug, Clone)]
pub struct HerglotzMeasure {
    pub kind: MeasureKind,
    /// Integration cutoff `Λ` for density variants.
    pub cutoff: f64,
    /// Absolute tolerance.
    pub eps: f64,
}

pub const DEFAULT_CUTOFF: f64 = 1e4;
pub const DEFAULT_EPS: f64 = 1e-8;

fn poisson(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r)
}

impl HerglotzMeasure {
    pub fn new(kind: MeasureKind) -> Result<Self> {
        match &kind {
            MeasureKind::LebesgueDensity { mean_density, .. } if !(*mean_density >= 0.0) => {
                return invalid("mean density must be nonnegative")
            }
            MeasureKind::AtomicLattice { spacing, weight, .. } if !(*spacing > 0.0 && *weight > 0.0) => {
                return invalid("lattice spacing and weight must be positive")
            }
            MeasureKind::PoissonDensity { amplitude, decay, scale, .. }
                if !(*amplitude > 0.0 && *decay >= 0.0 && *decay < 1.0 && *scale > 0.0) =>
            {
                return invalid("Poisson density needs A > 0, r ∈ [0,1), ℓ > 0")
            }
            MeasureKind::Discrete(atoms) if atoms.iter().any(|&(_, m)| !(m > 0.0)) => {
                return invalid("atom masses must be positive")
            }
            _ => {}
        }
        Ok(Self { kind, cutoff: DEFAULT_CUTOFF, eps: DEFAULT_EPS })
    }

    pub fn constant_density(rho: f64) -> Result<Self> {
        Self::new(MeasureKind::LebesgueDensity { density: Arc::new(move |_| rho), mean_density: rho })
    }

    pub fn lattice(offset: f64, spacing: f64, weight: f64) -> Result<Self> {
        Self::new(MeasureKind::AtomicLattice { offset, spacing, weight })
    }

    pub fn poisson(amplitude: f64, decay: f64, scale: f64, phase: f64) -> Result<Self> {
        Self::new(MeasureKind::PoissonDensity { amplitude, decay, scale, phase })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(MeasureKind::Discrete(atoms))
    }

    pub fn with_tolerance(mut self, cutoff: f64, eps: f64) -> Self {
        self.cutoff = cutoff;
        self.eps = eps;
        self
    }

    /// Density at `λ` for absolutely continuous variants.
    pub fn density(&self, lambda: f64) -> Option<f64> {
        match &self.kind {
            MeasureKind::LebesgueDensity { density, .. } => Some(density(lambda)),
            MeasureKind::PoissonDensity { amplitude, decay, scale, phase } => {
                Some(amplitude / PI * poisson(*decay, scale * lambda - PI - phase))
            }
            _ => None,
        }
    }

    /// Total mass, when finite.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.kind {
            MeasureKind::Discrete(atoms) => Some(atoms.iter().map(|a| a.1).sum()),
            _ => None,
        }
    }

    fn mean_density(&self) -> f64 {
        match &self.kind {
            MeasureKind::LebesgueDensity { mean_density, .. } => *mean_density,
            MeasureKind::PoissonDensity { amplitude, .. } => amplitude / PI,
            _ => 0.0,
        }
    }

    /// Panel boundaries on the truncated window; periodic densities get
    /// period-aligned panels and a window made of whole periods.
    fn breaks(&self, z: Complex64) -> Vec<f64> {
        let mut b = match &self.kind {
            MeasureKind::PoissonDensity { scale, phase, .. } => {
                let period = 2.0 * PI / scale;
                let per_panel = (1.0 / period).ceil().max(1.0);
                let width = period * per_panel;
                // troughs of the kernel sit at ℓλ = 2π(n+1) + Φ
                let origin = (2.0 * PI + phase) / scale;
                let n = (self.cutoff / width).ceil() as i64;
                (-n..=n).map(|j| origin + j as f64 * width).collect::<Vec<_>>()
            }
            _ => {
                let lam = self.cutoff;
                let mut v = vec![-lam, lam];
                let mut w = 8.0;
                while w < lam {
                    v.push(-w);
                    v.push(w);
                    w *= 2.0;
                }
                v
            }
        };
        let lo = b.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let y = z.im.max(1e-3);
        for j in -3..=8 {
            let d = y * 2f64.powi(j);
            for x in [z.re - d, z.re + d, z.re] {
                if x > lo && x < hi {
                    b.push(x);
                }
            }
        }
        b.sort_by(|a, b| a.total_cmp(b));
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        b
    }

    /// `∫ dμ/(1+λ²)`; equals one for measures of Weyl–Titchmarsh functions
    /// normalised by `M(i) = i`.
    pub fn normalization(&self) -> Result<f64> {
        Ok(herglotz_eval(self, HalfPlanePoint { re: 0.0, im: 1.0 })?.im)
    }
}

fn herglotz_kernel(lambda: f64, z: Complex64) -> Complex64 {
    // 1/(λ - z) - λ/(1 + λ²) written without the O(1/λ) cancellation
    (1.0 + z * lambda) / ((lambda - z) * (1.0 + lambda * lambda))
}

/// `∫_{x}^{∞}` (plus the mirrored left tail) of the kernel against the
/// constant density `rho`.
fn constant_tails(rho: f64, lo: f64, hi: f64, z: Complex64) -> Complex64 {
    // antiderivative G(λ) = Log(λ - z) - ½ ln(1+λ²), G(+∞) = 0, G(-∞) = -iπ
    let g = |l: f64| (l - z).ln() - 0.5 * (1.0 + l * l).ln();
    let right = -g(hi);
    let left = g(lo) + I * PI;
    (right + left) * rho
}

fn lattice_sum(offset: f64, d: f64, w: f64, z: Complex64, eps: f64) -> Complex64 {
    let a = offset - d * (offset / d + 0.5).floor();
    let pair = |x: f64| herglotz_kernel(a + x * d, z) + herglotz_kernel(a - (x + 1.0) * d, z);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n: u64 = 0;
    loop {
        let t = pair(n as f64);
        acc += t;
        n += 1;
        if t.norm() * w < eps / 10.0 && n > 8 {
            break;
        }
        if n > 50_000_000 {
            break;
        }
    }
    // midpoint tail Σ_{m≥n} g(m) ≈ ∫_{n-½}^∞ g
    let x = n as f64 - 0.5;
    let num = a + x * d - z;
    let den = z - a + (x + 1.0) * d;
    let l1 = a + x * d;
    let l2 = a - (x + 1.0) * d;
    let f = (num.ln() - den.ln() - 0.5 * ((1.0 + l1 * l1) / (1.0 + l2 * l2)).ln()) / d;
    (acc - f) * w
}

/// `M(z) = ∫ (1/(λ - z) - λ/(1 + λ²)) dμ(λ)`.
pub fn herglotz_eval(mu: &HerglotzMeasure, z: HalfPlanePoint) -> Result<Complex64> {
    let z = z.z();
    match &mu.kind {
        MeasureKind::AtomicLattice { offset, spacing, weight } => {
            Ok(lattice_sum(*offset, *spacing, *weight, z, mu.eps))
        }
        MeasureKind::Discrete(atoms) => Ok(atoms.iter().map(|&(l, m)| herglotz_kernel(l, z) * m).sum()),
        MeasureKind::LebesgueDensity { .. } | MeasureKind::PoissonDensity { .. } => {
            let breaks = mu.breaks(z);
            let lo = breaks[0];
            let hi = *breaks.last().expect("non-empty breaks");
            let q = integrate_breaks(
                |l| herglotz_kernel(l, z) * mu.density(l).unwrap_or(0.0),
                &breaks,
                QuadOptions { abs_tol: mu.eps * 0.5, rel_tol: 0.0, max_intervals: 400_000 },
            )?;
            Ok(q.value + constant_tails(mu.mean_density(), lo, hi, z))
        }
    }
}

/// `∫ dμ(λ)/(λ - z)` for finite measures.
pub fn stieltjes(mu: &HerglotzMeasure, z: Complex64) -> Result<Complex64> {
    match &mu.kind {
        MeasureKind::Discrete(atoms) => Ok(atoms.iter().map(|&(l, m)| m / (l - z)).sum()),
        _ => invalid("Stieltjes transform needs a finite (discrete) measure"),
    }
}

/// Characteristic function of a rank-one dissipative perturbation with
/// `M(z) = ∫ dμ/(λ - z)`: `S = (1 + itM)/(1 - itM)`.
pub fn rank_one_char(mu: &HerglotzMeasure, t: f64, z: HalfPlanePoint) -> Result<Complex64> {
    if !(t > 0.0) {
        return invalid("rank-one coupling needs t > 0");
    }
    let m = stieltjes(mu, z.z())?;
    Ok((1.0 + I * t * m) / (1.0 - I * t * m))
}

/// An analytic contraction on the upper half-plane.
#[derive(Debug, Clone)]
pub enum CharFn {
    Constant(Complex64),
    /// `e^{iℓz}`.
    SingularInner(f64),
    /// `phase · k · e^{iℓz}`.
    ProductForm { k: f64, ell: f64, phase: Complex64 },
    RankOne { measure: HerglotzMeasure, t: f64 },
    /// `exp(-iℓ/z)`.
    Volterra(f64),
    GenericProduct(Vec<CharFn>),
    /// `z ↦ S((z - b)/a)`.
    Rescaled { inner: Box<CharFn>, a: f64, b: f64 },
    /// `z ↦ conj(S(-z̄))`.
    Reflected(Box<CharFn>),
    /// Closed form for a metric-graph triple.
    Graph(GraphSpec),
    /// Interval triple with gate `k` and boundary parameter `Θ`.
    Interval { k: f64, ell: f64, theta: Complex64 },
}

impl CharFn {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            CharFn::Constant(k) => *k,
            CharFn::SingularInner(l) => (I * z * *l).exp(),
            CharFn::ProductForm { k, ell, phase } => phase * *k * (I * z * *ell).exp(),
            CharFn::RankOne { measure, t } => {
                let m = stieltjes(measure, z)?;
                (1.0 + I * *t * m) / (1.0 - I * *t * m)
            }
            CharFn::Volterra(l) => (-I * *l / z).exp(),
            CharFn::GenericProduct(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval(z)?;
                }
                acc
            }
            CharFn::Rescaled { inner, a, b } => inner.eval((z - *b) / *a)?,
            CharFn::Reflected(inner) => inner.eval(-z.conj())?.conj(),
            CharFn::Graph(spec) => graph::char_closed(spec, z)?,
            CharFn::Interval { k, ell, theta } => graph::char_interval(*k, *ell, *theta, z),
        })
    }
}

/// Projective distance `sup_z |S₁(z) - e^{iθ*} S₂(z)|`, with `θ*` fixed at the
/// anchor `z = 2i` (or at the grid point where `|S₂|` is largest if either
/// function vanishes at the anchor).
pub fn projective_distance(s1: &CharFn, s2: &CharFn, grid: &[Complex64]) -> Result<f64> {
    let anchor = Complex64::new(0.0, 2.0);
    let (mut a1, mut a2) = (s1.eval(anchor)?, s2.eval(anchor)?);
    if a1.norm() < 1e-300 || a2.norm() < 1e-300 {
        let mut best = 0.0;
        for &z in grid {
            let v2 = s2.eval(z)?;
            if v2.norm() > best {
                best = v2.norm();
                a1 = s1.eval(z)?;
                a2 = v2;
            }
        }
    }
    let rot = if a1.norm() > 0.0 && a2.norm() > 0.0 {
        let r = a1 / a2;
        r / r.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut sup: f64 = 0.0;
    for &z in grid {
        sup = sup.max((s1.eval(z)? - rot * s2.eval(z)?).norm());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hp(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn cayley_normalisation() {
        assert!(livsic_from_weyl(I.into()).norm() < 1e-16);
        assert_eq!(livsic_from_weyl(Extended::Infinity), c(1.0, 0.0));
        assert!((weyl_from_livsic(c(0.0, 0.0)).unwrap() - I).norm() < 1e-16);
        assert!(matches!(weyl_from_livsic(c(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn interval_value_round_trip() {
        // coth(1/2)·tan(i) for the unit interval at z = 2i
        let m = c(0.0, (1.0f64).tanh() / (0.5f64).tanh());
        let s = livsic_from_weyl(m.into());
        assert!((s.re - 0.24472).abs() < 1e-4 && s.im.abs() < 1e-12, "{s}");
        let back = weyl_from_livsic(c(0.24472, 0.0)).unwrap();
        assert!((back - c(0.0, 1.6481)).norm() < 1e-3);
    }

    #[test]
    fn char_from_livsic_examples() {
        let k = VonNeumannParam::real(0.3).unwrap();
        assert!((char_from_livsic(c(0.0, 0.0), k).unwrap() - 0.3).norm() < 1e-16);
        let kappa = 0.5 * (-1.0f64).exp();
        let s = char_from_livsic(c(0.0, 0.0), VonNeumannParam::real(kappa).unwrap()).unwrap();
        assert!((s.re - 0.18394).abs() < 1e-5);
        assert!((s.re - kappa).abs() < 1e-12);
    }

    #[test]
    fn char_from_livsic_is_involutive() {
        let k = VonNeumannParam::new(c(0.2, -0.4)).unwrap();
        let s = c(0.1, 0.3);
        let back = char_from_livsic(char_from_livsic(s, k).unwrap(), k).unwrap();
        assert!((back - s).norm() < 1e-15);
    }

    #[test]
    fn char_from_weyl_two_paths() {
        assert!(char_from_weyl(I.into(), VonNeumannParam::real(0.0).unwrap()).unwrap().norm() < 1e-16);
        let kappa = VonNeumannParam::real(0.5 * (-1.0f64).exp()).unwrap();
        let m = c(0.0, 1.6481);
        let direct = char_from_weyl(m.into(), kappa).unwrap();
        let via = char_from_livsic(c(0.24472, 0.0), kappa).unwrap();
        assert!((direct - via).norm() < 1e-4);
        let inf = char_from_weyl(Extended::Infinity, kappa).unwrap();
        let inf2 = char_from_livsic(c(1.0, 0.0), kappa).unwrap();
        assert!((inf - inf2).norm() < 1e-15);
    }

    #[test]
    fn self_adjoint_kappa_rejected_where_undeclared() {
        let k = VonNeumannParam::real(1.0).unwrap();
        assert!(k.is_self_adjoint());
        assert!(char_from_livsic(c(0.1, 0.0), k).is_err());
        assert!(VonNeumannParam::real(1.5).is_err());
    }

    #[test]
    fn tan_lattice() {
        let mu = HerglotzMeasure::lattice(PI / 2.0, PI, 1.0).unwrap();
        let m = herglotz_eval(&mu, hp(0.0, 1.0)).unwrap();
        let tan_i = c(0.0, 1.0f64.tanh());
        assert!((m - tan_i).norm() < 1e-8, "{m}");
        let z = c(0.7, 0.3);
        let m = herglotz_eval(&mu, hp(z.re, z.im)).unwrap();
        assert!((m - z.tan()).norm() < 1e-8, "{m} vs {}", z.tan());
    }

    #[test]
    fn shifted_lattice_matches_tan() {
        // atoms at (2n+1)π + Φ with weight 2: M = tan((z-Φ)/2) + const
        let phi = 0.9;
        let mu = HerglotzMeasure::lattice(PI + phi, 2.0 * PI, 2.0).unwrap();
        let a = herglotz_eval(&mu, hp(0.3, 0.5)).unwrap();
        let b = herglotz_eval(&mu, hp(-1.1, 2.0)).unwrap();
        let ta = ((c(0.3, 0.5) - phi) / 2.0).tan();
        let tb = ((c(-1.1, 2.0) - phi) / 2.0).tan();
        assert!(((a - b) - (ta - tb)).norm() < 1e-8);
    }

    #[test]
    fn constant_density_gives_i() {
        let mu = HerglotzMeasure::constant_density(1.0 / PI).unwrap();
        for &(re, im) in &[(0.0, 1.0), (3.0, 0.2), (-40.0, 5.0)] {
            let m = herglotz_eval(&mu, hp(re, im)).unwrap();
            assert!((m - I).norm() < 1e-8, "z = {re}+{im}i: {m}");
        }
    }

    #[test]
    fn normalisation_of_tan_lattice_with_coth() {
        let mu = HerglotzMeasure::lattice(PI / 2.0, PI, 1.0 / 1.0f64.tanh()).unwrap();
        assert!((mu.normalization().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rank_one_single_atom() {
        let mu = HerglotzMeasure::discrete(vec![(0.0, 1.0)]).unwrap();
        let s = rank_one_char(&mu, 1.0, hp(0.0, 2.0)).unwrap();
        assert!((s - 1.0 / 3.0).norm() < 1e-12);
        let s = rank_one_char(&mu, 1.0, hp(0.0, 1.0)).unwrap();
        assert!(s.norm() < 1e-15);
        let inf = HerglotzMeasure::constant_density(1.0).unwrap();
        assert!(rank_one_char(&inf, 1.0, hp(0.0, 1.0)).is_err());
    }

    #[test]
    fn reflection_of_rank_one() {
        let atoms = vec![(0.4, 0.7), (-1.3, 0.2)];
        let reflected: Vec<_> = atoms.iter().map(|&(l, m)| (-l, m)).collect();
        let s = CharFn::RankOne { measure: HerglotzMeasure::discrete(atoms).unwrap(), t: 0.8 };
        let r = CharFn::RankOne { measure: HerglotzMeasure::discrete(reflected).unwrap(), t: 0.8 };
        let refl = CharFn::Reflected(Box::new(s.clone()));
        for &z in &[c(0.3, 0.4), c(-2.0, 1.5), c(0.0, 0.1)] {
            assert!((refl.eval(z).unwrap() - r.eval(z).unwrap()).norm() < 1e-14);
            let twice = CharFn::Reflected(Box::new(refl.clone()));
            assert!((twice.eval(z).unwrap() - s.eval(z).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn krein_pole_and_values() {
        let k0 = VonNeumannParam::real(0.0).unwrap();
        assert!(matches!(krein_correction(I.into(), k0), Err(Error::Pole(_))));
        let p = krein_correction(c(0.0, 2.0).into(), k0).unwrap();
        assert!((p - c(0.0, -1.0)).norm() < 1e-15);
        let near = VonNeumannParam::real(1.0 - 1e-9).unwrap();
        let p = krein_correction(I.into(), near).unwrap();
        assert!(p.is_finite() && krein_condition(near) > 1e8);
        assert!(krein_correction(I.into(), VonNeumannParam::real(1.0).unwrap()).is_err());
    }

    #[test]
    fn krein_poles_are_zeros_of_the_characteristic_function() {
        // single atom at 0, t = 1: S(z) = (z - i)/(z + i), κ = S(i) = 0
        let mu = HerglotzMeasure::discrete(vec![(0.0, 1.0)]).unwrap();
        let kappa = VonNeumannParam::real(0.0).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for j in 1..300 {
            let y = j as f64 * 0.01;
            if (y - 1.0).abs() < 1e-12 {
                continue;
            }
            let s_big = rank_one_char(&mu, 1.0, hp(0.0, y)).unwrap();
            let s = char_from_livsic(s_big, kappa).unwrap();
            let m = weyl_from_livsic(s).unwrap();
            let inv = 1.0 / krein_correction(m.into(), kappa).unwrap().norm();
            if inv < best.0 {
                best = (inv, y);
            }
        }
        assert!((best.1 - 1.0).abs() < 0.011, "minimum at {}", best.1);
    }

    #[test]
    fn projective_distance_ignores_unimodular_factor() {
        let s = CharFn::ProductForm { k: 0.5, ell: 1.0, phase: c(1.0, 0.0) };
        let t = CharFn::ProductForm { k: 0.5, ell: 1.0, phase: c(0.6, 0.8) };
        let grid = [c(0.0, 1.0), c(1.0, 0.5), c(-3.0, 2.0)];
        assert!(projective_distance(&s, &t, &grid).unwrap() < 1e-15);
    }
}
