//! Adaptive Gauss–Kronrod quadrature and a Filon rule for piecewise-linear data.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, max_intervals: 20_000 }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, ..Self::default() }
    }
}

/// One G7K15 panel: returns (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let s = f(c - dx) + f(c + dx);
        k += s * w;
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration of a complex integrand over the panels
/// delimited by `breaks` (sorted, at least two points).
pub fn integrate_breaks<F>(f: F, breaks: &[f64], opts: QuadOptions) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return Err(Error::InvalidInput("need at least two break points".into()));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        evals += 15;
        total += v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let limit = opts.max_intervals.max(breaks.len());
    while err > opts.abs_tol.max(opts.rel_tol * total.norm()) {
        if heap.len() >= limit {
            return Err(Error::Tolerance(format!(
                "quadrature did not converge: error estimate {err:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Panel { error: 0.0, ..worst });
            err = heap.iter().map(|p| p.error).sum();
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature { value, error, evaluations: evals })
}

/// Adaptive integration over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    integrate_breaks(f, &[a, b], opts)
}

/// Adaptive integration of a real integrand over `[a, b]`.
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Ok(integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)?.value.re)
}

/// Integral over `(0, ∞)` through the substitution `x = u / (1 - u)`.
pub fn integrate_half_line<F>(f: F, opts: QuadOptions) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let g = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let om = 1.0 - u;
        let x = u / om;
        let v = f(x);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v / (om * om)
        }
    };
    let breaks: Vec<f64> = (0..=16).map(|j| j as f64 / 16.0).collect();
    integrate_breaks(g, &breaks, opts)
}

/// `∫₀¹ (1 - u) e^{iθu} du`, the Fourier weight of a left half-hat.
pub fn half_hat_left(theta: Complex64) -> Complex64 {
    if theta.norm() < 1e-3 {
        let it = Complex64::new(0.0, 1.0) * theta;
        // 1/2 + iθ/6 + (iθ)²/24 + (iθ)³/120
        return 0.5 + it / 6.0 + it * it / 24.0 + it * it * it / 120.0 + it.powu(4) / 720.0;
    }
    let i = Complex64::new(0.0, 1.0);
    (1.0 + i * theta - (i * theta).exp()) / (theta * theta)
}

/// `(sin u / u)²` extended to complex `u`.
pub fn sinc2(u: Complex64) -> Complex64 {
    if u.norm() < 1e-4 {
        let u2 = u * u;
        return 1.0 - u2 / 3.0 + u2 * u2 * 2.0 / 45.0;
    }
    let s = u.sin() / u;
    s * s
}

/// Exact `∫₀^{x_N} p(x) e^{ikx} dx` for the piecewise-linear interpolant `p`
/// through `values[j]` at `x = j h`, `j = 0..N`. `k` may be complex.
pub fn filon_linear(values: &[Complex64], h: f64, k: Complex64) -> Complex64 {
    let n = values.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let i = Complex64::new(0.0, 1.0);
    let theta = k * h;
    let interior = sinc2(theta * 0.5) * h;
    let step = (i * theta).exp();
    let mut phase = step;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += v * phase;
        phase *= step;
        // periodic resync keeps the phase recurrence from drifting
        if j % 256 == 0 {
            phase = (i * theta * (j as f64 + 1.0)).exp();
        }
    }
    let left = values[0] * half_hat_left(theta) * h;
    let last = (i * theta * (n as f64 - 1.0)).exp();
    let right = values[n - 1] * last * half_hat_left(-theta) * h;
    acc * interior + left + right
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| c(x.powi(5) - 3.0 * x * x), -1.0, 2.0, QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value.re - exact).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand_converges() {
        // ∫ 1/(x² + ε²) over ℝ-window ≈ π/ε
        let eps = 1e-3;
        let q = integrate(|x| c(1.0 / (x * x + eps * eps)), -1.0, 1.0, QuadOptions::abs(1e-8)).unwrap();
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert!((q.value.re - exact).abs() < 1e-7, "{} vs {}", q.value.re, exact);
    }

    #[test]
    fn half_line_gaussian() {
        let q = integrate_half_line(|x| c((-x * x).exp()), QuadOptions::abs(1e-12)).unwrap();
        assert!((q.value.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn half_hat_series_matches_closed_form() {
        for &t in &[9e-4, 1.1e-3] {
            let th = Complex64::new(t, 0.0);
            let i = Complex64::new(0.0, 1.0);
            let closed = (1.0 + i * th - (i * th).exp()) / (th * th);
            let series = half_hat_left(th);
            assert!((closed - series).norm() < 1e-9);
        }
    }

    #[test]
    fn filon_is_exact_on_linear_data() {
        // p(x) = 1 - x on [0, 1]; ∫ (1-x) e^{ikx} dx known in closed form
        let n = 101;
        let h = 1.0 / (n as f64 - 1.0);
        let vals: Vec<Complex64> = (0..n).map(|j| c(1.0 - j as f64 * h)).collect();
        for &k in &[0.0, 0.3, 7.0, 250.0] {
            let got = filon_linear(&vals, h, c(k));
            let want = half_hat_left(c(k));
            assert!((got - want).norm() < 1e-12, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn filon_with_imaginary_wavenumber_is_a_laplace_transform() {
        // ∫₀^X e^{-x} e^{-x} dx with p = e^{-x} sampled finely
        let h = 1e-3;
        let vals: Vec<Complex64> = (0..=40_000).map(|j| c((-(j as f64) * h).exp())).collect();
        let got = filon_linear(&vals, h, Complex64::new(0.0, 1.0));
        assert!((got.re - 0.5).abs() < 1e-6);
    }
}
