//! Survival amplitudes under repeated measurement, decay-rate estimation and
//! Zeno/anti-Zeno classification.
//!
//! Units: `ħ = 1`, propagation speed `c` taken from the grid. Predicted decay
//! constants are `c` times the sum of squared jumps the evolution produces.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::json;

use crate::dynamics::{
    d_theta_network, evolve_on, inner_product, line_network, ring_network, GraphState, Grid, Network,
};
use crate::error::{invalid, Error, Result};
use crate::graph::{GraphCase, GraphSpec};
use crate::halfline::{spectral_distribution, BoundaryCondition, HalfLineState, SpectralTails};

/// Which evolution is monitored.
#[derive(Debug, Clone, PartialEq)]
pub enum Evolution {
    /// Magnetic ring, `f(0) = e^{-iΦ} f(ℓ)`.
    RingUnitary { flux: f64 },
    /// Contraction semigroup, `f(0) = κ f(ℓ)`.
    RingDissipative { kappa: Complex64 },
    /// Free transport on the line.
    Line,
    /// Self-adjoint `D_Θ` on a graph in Case I, II or III.
    Graph(GraphSpec),
    /// `-d²/dx²` on the half-line; only spectral classification is available.
    HalfLine(BoundaryCondition),
}

/// Discontinuity of the state at `x` on edge `edge`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub edge: String,
    pub x: f64,
}

#[derive(Debug, Clone)]
enum Body {
    Graph { network: Arc<Network>, state: GraphState },
    HalfLine(HalfLineState),
}

/// An evolution together with a normalised initial state.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub evolution: Evolution,
    /// Interior jumps of the state; they add `c|Δφ|²` each to the prediction.
    pub jumps: Vec<Jump>,
    body: Body,
}

impl Scenario {
    fn graph_body(evolution: Evolution, network: Arc<Network>, state: GraphState) -> Result<Self> {
        let state = state.normalized()?;
        Ok(Self { evolution, jumps: vec![], body: Body::Graph { network, state } })
    }

    pub fn ring<F>(ell: f64, flux: f64, grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let net = ring_network(ell, Complex64::from_polar(1.0, -flux), grid)?;
        let st = GraphState::from_fn(net.clone(), *grid, |_, x| f(x));
        Self::graph_body(Evolution::RingUnitary { flux }, net, st)
    }

    pub fn dissipative_ring<F>(ell: f64, kappa: Complex64, grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        if !(kappa.norm() < 1.0) {
            return invalid("dissipative ring needs |kappa| < 1");
        }
        let net = ring_network(ell, kappa, grid)?;
        let st = GraphState::from_fn(net.clone(), *grid, |_, x| f(x));
        Self::graph_body(Evolution::RingDissipative { kappa }, net, st)
    }

    pub fn line<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let net = line_network(grid)?;
        let st = GraphState::from_fn(net.clone(), *grid, |_, x| f(x));
        Self::graph_body(Evolution::Line, net, st)
    }

    /// `f(label, x)` with labels `left`/`right` (Cases I, III), `ring`
    /// (Case II) and `appendix` (Case III).
    pub fn graph<F>(spec: GraphSpec, grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&str, f64) -> Complex64,
    {
        let net = d_theta_network(&spec, grid)?;
        let st = GraphState::from_fn(net.clone(), *grid, f);
        Self::graph_body(Evolution::Graph(spec), net, st)
    }

    pub fn half_line(state: HalfLineState, bc: BoundaryCondition) -> Self {
        Self { evolution: Evolution::HalfLine(bc), jumps: vec![], body: Body::HalfLine(state) }
    }

    pub fn with_jumps(mut self, jumps: Vec<Jump>) -> Self {
        self.jumps = jumps;
        self
    }

    pub fn state(&self) -> Option<&GraphState> {
        match &self.body {
            Body::Graph { state, .. } => Some(state),
            Body::HalfLine(_) => None,
        }
    }

    pub fn grid(&self) -> Option<Grid> {
        self.state().map(|s| s.grid)
    }

    fn graph_parts(&self) -> Result<(&Arc<Network>, &GraphState)> {
        match &self.body {
            Body::Graph { network, state } => Ok((network, state)),
            Body::HalfLine(_) => invalid("half-line scenarios have no transport amplitude; use spectral tails"),
        }
    }

    fn ring_wrap(&self) -> Option<Complex64> {
        match self.evolution {
            Evolution::RingUnitary { flux } => Some(Complex64::from_polar(1.0, -flux)),
            Evolution::RingDissipative { kappa } => Some(kappa),
            _ => None,
        }
    }
}

/// `a(t) = ⟨U_t φ, φ⟩` at a commensurate time (or interpolated, depending on
/// the grid mode).
pub fn survival_amplitude(scn: &Scenario, t: f64) -> Result<Complex64> {
    let (net, st) = scn.graph_parts()?;
    if matches!(scn.evolution, Evolution::RingDissipative { .. }) && t < 0.0 {
        return invalid("the dissipative semigroup is defined for t ≥ 0 only");
    }
    inner_product(&evolve_on(net, st, t)?, st)
}

fn snapped_step(scn: &Scenario, s: f64) -> Result<f64> {
    let grid = scn.graph_parts()?.1.grid;
    let snapped = grid.snap(s);
    if snapped == 0.0 {
        return invalid(format!("time step {s} is below the grid resolution dx/c = {}", grid.dx / grid.c));
    }
    Ok(snapped)
}

/// `p_n(t) = |a(t/n)|^{2n}`; `t/n` is snapped to the grid and the exponent
/// becomes `2t/(t/n)_snapped`.
pub fn monitored_survival(scn: &Scenario, t: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let s = snapped_step(scn, t / n as f64)?;
    let a = survival_amplitude(scn, s)?.norm();
    Ok(a.powf(2.0 * t / s))
}

/// Reparametrised monitoring time `𝔱`.
#[derive(Clone)]
pub enum TimeScale {
    Linear,
    Sqrt,
    Square,
    TwoThirds,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for TimeScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            TimeScale::Linear => "Linear",
            TimeScale::Sqrt => "Sqrt",
            TimeScale::Square => "Square",
            TimeScale::TwoThirds => "TwoThirds",
            TimeScale::Custom(_) => "Custom",
        };
        f.write_str(name)
    }
}

impl TimeScale {
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            TimeScale::Linear => t,
            TimeScale::Sqrt => t.signum() * t.abs().sqrt(),
            TimeScale::Square => t * t.abs(),
            TimeScale::TwoThirds => t.signum() * t.abs().powf(2.0 / 3.0),
            TimeScale::Custom(f) => f(t),
        }
    }
}

impl std::str::FromStr for TimeScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "t" | "linear" => Ok(TimeScale::Linear),
            "sqrt" | "t^1/2" => Ok(TimeScale::Sqrt),
            "square" | "t^2" => Ok(TimeScale::Square),
            "two_thirds" | "t^2/3" => Ok(TimeScale::TwoThirds),
            other => invalid(format!("unknown time scale `{other}`")),
        }
    }
}

/// `[p(𝔱(t/n))]^n`, with `𝔱(t/n)` snapped to the grid.
pub fn timescale_survival(scn: &Scenario, scale: &TimeScale, t: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if scale.apply(0.0) != 0.0 {
        return invalid("time scale must vanish at 0");
    }
    let tau = scale.apply(t / n as f64);
    if !(tau.is_finite() && tau * t >= 0.0) {
        return invalid("time scale must be increasing");
    }
    if tau == 0.0 {
        return Ok(1.0);
    }
    let s = snapped_step(scn, tau)?;
    let p = survival_amplitude(scn, s)?.norm_sqr();
    Ok(p.powf(n as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringRow {
    pub n: u64,
    pub t_over_n: f64,
    pub abs_amplitude: f64,
    pub tau_hat: f64,
}

/// Decay-rate estimates along an `n` ladder with extrapolation `n → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringResult {
    pub t: f64,
    pub rows: Vec<MonitoringRow>,
    /// Fit `τ̂ = τ∞ + a s + b s²` in the snapped step `s = t/n`.
    pub tau_extrapolated: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    /// Some amplitude vanished: anti-Zeno indicator.
    pub divergent: bool,
    pub tau_predicted: Option<f64>,
}

impl MonitoringResult {
    pub fn relative_error(&self) -> Option<f64> {
        self.tau_predicted.map(|p| {
            let d = (self.tau_extrapolated - p).abs();
            if p.abs() > 0.0 {
                d / p.abs()
            } else {
                d
            }
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,t_over_n_snapped,abs_amplitude,tau_hat\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.n, r.t_over_n, r.abs_amplitude, r.tau_hat);
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "tau_extrapolated": self.tau_extrapolated,
            "tau_predicted": self.tau_predicted,
            "relative_error": self.relative_error(),
            "fit_residual": self.residual,
            "divergent": self.divergent,
        })
    }
}

/// `n ∈ {2⁶, …, 2¹²}`.
pub fn default_ladder() -> Vec<u64> {
    (6..=12).map(|p| 1u64 << p).collect()
}

/// Least-squares fit `y = c₀ + c₁x + c₂x²`; returns `(c₀, rms residual)`.
fn quadratic_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len();
    let a = DMatrix::from_fn(m, 3, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let sol = a.clone().svd(true, true).solve(&b, 1e-15).expect("svd with both factors");
    let r = &a * &sol - &b;
    (sol[0], (r.norm_squared() / m as f64).sqrt())
}

pub fn estimate_decay_rate(scn: &Scenario, t: f64, ladder: &[u64]) -> Result<MonitoringResult> {
    if ladder.len() < 4 {
        return invalid("decay-rate ladder needs at least 4 points");
    }
    if !(t > 0.0) {
        return invalid("decay-rate estimation needs t > 0");
    }
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        if n == 0 {
            return invalid("ladder entries must be positive");
        }
        let s = snapped_step(scn, t / n as f64)?;
        let a = survival_amplitude(scn, s)?.norm();
        let tau_hat = if a > 0.0 { -2.0 / s * a.ln() } else { f64::INFINITY };
        rows.push(MonitoringRow { n, t_over_n: s, abs_amplitude: a, tau_hat });
    }
    let divergent = rows.iter().any(|r| !r.tau_hat.is_finite());
    let (tau_extrapolated, residual) = if divergent {
        (f64::INFINITY, f64::NAN)
    } else {
        let x: Vec<f64> = rows.iter().map(|r| r.t_over_n).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.tau_hat).collect();
        quadratic_fit(&x, &y)
    };
    Ok(MonitoringResult { t, rows, tau_extrapolated, residual, divergent, tau_predicted: predicted_tau(scn).ok() })
}

/// Sample at coordinate `x` of an edge, if it lies on the grid.
fn sample_at(st: &GraphState, e: usize, x: f64) -> Option<Complex64> {
    let edge = &st.network.edges[e];
    let j = ((x - edge.start) / st.grid.dx).round() as i64 - 1;
    if j < 0 || j as usize >= edge.cells {
        return None;
    }
    Some(st.data[e][j as usize])
}

/// `φ(x+) - φ(x-)` by linear extrapolation from each side.
pub fn jump_at(st: &GraphState, jump: &Jump) -> Result<Complex64> {
    let e = st
        .network
        .edge_index(&jump.edge)
        .ok_or_else(|| Error::InvalidInput(format!("no edge `{}`", jump.edge)))?;
    let dx = st.grid.dx;
    let x = jump.x;
    let get = |y: f64| sample_at(st, e, y).ok_or_else(|| Error::InvalidInput(format!("jump at {x} too close to an edge end")));
    let right = get(x + dx)? * 2.0 - get(x + 2.0 * dx)?;
    let left = get(x - dx)? * 2.0 - get(x - 2.0 * dx)?;
    Ok(right - left)
}

/// Jumps where the support of a line state starts and ends.
fn support_jumps(st: &GraphState) -> f64 {
    let d = &st.data[0];
    let nz = |v: &Complex64| v.norm() > 0.0;
    let (Some(a), Some(b)) = (d.iter().position(nz), d.iter().rposition(nz)) else {
        return 0.0;
    };
    let inner = |i: usize, j: usize| d[i] * 1.5 - d[j] * 0.5;
    let left = if a + 1 < d.len() { inner(a, a + 1) } else { d[a] };
    let right = if b >= 1 { inner(b, b - 1) } else { d[b] };
    left.norm_sqr() + right.norm_sqr()
}

/// Closed-form decay constant of the scenario, in units of `c`.
pub fn predicted_tau(scn: &Scenario) -> Result<f64> {
    let (_, st) = scn.graph_parts()?;
    let mut interior = 0.0;
    for j in &scn.jumps {
        interior += jump_at(st, j)?.norm_sqr();
    }
    let tail = |label: &str| st.tail_value(label).ok_or_else(|| Error::InvalidInput(format!("missing edge `{label}`")));
    let head = |label: &str| st.head_value(label).ok_or_else(|| Error::InvalidInput(format!("missing edge `{label}`")));
    let boundary = match &scn.evolution {
        Evolution::RingUnitary { .. } => {
            let w = scn.ring_wrap().expect("ring");
            (w * head("ring")? - tail("ring")?).norm_sqr()
        }
        Evolution::RingDissipative { kappa } => {
            let end = head("ring")?;
            (tail("ring")? - kappa * end).norm_sqr() + (1.0 - kappa.norm_sqr()) * end.norm_sqr()
        }
        Evolution::Line => support_jumps(st),
        Evolution::Graph(spec) => {
            let theta = spec.theta()?;
            match spec.case {
                GraphCase::I => (theta * head("left")? + tail("right")?).norm_sqr(),
                GraphCase::II => (theta * head("ring")? + tail("ring")?).norm_sqr(),
                GraphCase::III => {
                    let s = (1.0 - spec.k * spec.k).sqrt();
                    (theta * head("appendix")? - (tail("right")? - head("left")? * spec.k) / s).norm_sqr()
                }
                GraphCase::IStar => return invalid("D_Θ is not defined in Case I*"),
            }
        }
        Evolution::HalfLine(_) => unreachable!("graph_parts rejects half-line scenarios"),
    };
    Ok(st.grid.c * (boundary + interior))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Zeno,
    AntiZeno,
    Resonant(f64),
    Unknown(String),
}

/// Predicted decay constants below this count as Zeno.
pub const ZENO_THRESHOLD: f64 = 1e-6;

/// Tail ladder for half-line classification.
pub const CLASSIFY_LADDER: [f64; 3] = [1e2, 1e3, 1e4];

/// Classifies by boundary data (graph scenarios) or by the growth of
/// `λ(1 - N(λ) + N(-λ))` (half-line scenarios).
pub fn classify_state(scn: &Scenario) -> Result<Classification> {
    match (&scn.evolution, &scn.body) {
        (Evolution::HalfLine(bc), Body::HalfLine(state)) => {
            let dist = spectral_distribution(state, *bc)?;
            classify_tails(&dist, &CLASSIFY_LADDER)
        }
        _ => {
            let tau = predicted_tau(scn)?;
            Ok(if tau < ZENO_THRESHOLD { Classification::Zeno } else { Classification::Resonant(tau) })
        }
    }
}

/// Tail rule on a ladder of at least two increasing points.
pub fn classify_tails(dist: &dyn SpectralTails, ladder: &[f64]) -> Result<Classification> {
    if ladder.len() < 2 {
        return invalid("classification ladder needs two points");
    }
    let mut g = Vec::with_capacity(ladder.len());
    for &l in ladder {
        g.push(l * (dist.upper_tail(l)? + dist.lower_tail(l)?));
    }
    let n = g.len();
    let (g1, g2) = (g[n - 2], g[n - 1]);
    if g2.abs() < 1e-12 {
        return Ok(Classification::Zeno);
    }
    if !(g1 > 0.0 && g2 > 0.0) {
        return Ok(Classification::Unknown(format!("non-positive tail values {g:?}")));
    }
    let slope = (g2 / g1).ln() / (ladder[n - 1] / ladder[n - 2]).ln();
    Ok(if slope > 0.25 {
        Classification::AntiZeno
    } else if slope < -0.25 {
        Classification::Zeno
    } else if slope.abs() < 0.1 {
        Classification::Resonant(std::f64::consts::PI * g2)
    } else {
        Classification::Unknown(format!("tail log-slope {slope:.3} is inconclusive"))
    })
}
