//! Concrete graphs: the four dissipative cases, the two-channel full graph,
//! magnetic and dissipative rings, their dilations and the self-adjoint
//! `D_Θ` groups.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{evolve_on, EdgeSpec, GraphState, Grid, Head, Network, Tail};
use crate::error::{invalid, Error, Result};
use crate::graph::{GraphCase, GraphSpec};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn edge(label: &str, start: f64, cells: usize, tail: Tail, head: Head) -> EdgeSpec {
    EdgeSpec { label: label.into(), start, cells, tail, head }
}

fn mat(rows: usize, cols: usize, v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(rows, cols, v)
}

/// Graph of the dissipative semigroup in the given case.
///
/// Edge labels: `left`, `right` (Cases I*, I, III), `appendix` (III),
/// `interval` (II).
pub fn case_network(spec: &GraphSpec, grid: &Grid) -> Result<Arc<Network>> {
    spec.validate()?;
    let (mu, nu, l) = (spec.mu, spec.nu, grid.l_max);
    let net = match spec.case {
        GraphCase::IStar => Network::new(
            vec![
                edge("left", -l, grid.cells_between(-l, nu)?, Tail::Truncated, Head::Sink),
                edge("right", mu, grid.cells_between(mu, l)?, Tail::Source, Head::Truncated),
            ],
            vec![],
        )?,
        GraphCase::I => Network::new(
            vec![
                edge("left", -l, grid.cells_between(-l, mu)?, Tail::Truncated, Head::Vertex(0)),
                edge("right", mu, grid.cells_between(mu, l)?, Tail::Vertex(0), Head::Truncated),
            ],
            vec![mat(1, 1, &[c(spec.k)])],
        )?,
        GraphCase::II => Network::new(
            vec![edge("interval", mu, grid.cells_between(mu, nu)?, Tail::Source, Head::Sink)],
            vec![],
        )?,
        GraphCase::III => {
            let s = (1.0 - spec.k * spec.k).sqrt();
            Network::new(
                vec![
                    edge("left", -l, grid.cells_between(-l, mu)?, Tail::Truncated, Head::Vertex(0)),
                    edge("right", mu, grid.cells_between(mu, l)?, Tail::Vertex(0), Head::Truncated),
                    edge("appendix", mu, grid.cells_between(mu, nu)?, Tail::Vertex(0), Head::Sink),
                ],
                vec![mat(2, 1, &[c(spec.k), c(s)])],
            )?
        }
    };
    Ok(Arc::new(net))
}

/// State sampled from `f(label, x)` on the case graph.
pub fn case_state<F>(spec: &GraphSpec, grid: &Grid, f: F) -> Result<GraphState>
where
    F: Fn(&str, f64) -> Complex64,
{
    Ok(GraphState::from_fn(case_network(spec, grid)?, *grid, f))
}

/// Contraction semigroup `V_s`, `s ≥ 0`.
pub fn evolve_contraction(state: &GraphState, spec: &GraphSpec, s: f64) -> Result<GraphState> {
    if !(s >= 0.0) {
        return invalid("contraction semigroups run forward only (s ≥ 0)");
    }
    evolve_on(&case_network(spec, &state.grid)?, state, s)
}

/// Two-channel state on `(-∞, μ) ⊔ (μ, ∞)`; edges `up_left`, `down_left`,
/// `up_right`, `down_right`.
#[derive(Debug, Clone)]
pub struct FullGraphState(pub GraphState);

pub fn full_network(k: f64, mu: f64, grid: &Grid) -> Result<Arc<Network>> {
    if !(k.abs() <= 1.0) {
        return invalid("full-graph coupling needs |k| ≤ 1");
    }
    let s = (1.0 - k * k).sqrt();
    let l = grid.l_max;
    let left = grid.cells_between(-l, mu)?;
    let right = grid.cells_between(mu, l)?;
    Ok(Arc::new(Network::new(
        vec![
            edge("up_left", -l, left, Tail::Truncated, Head::Vertex(0)),
            edge("down_left", -l, left, Tail::Truncated, Head::Vertex(0)),
            edge("up_right", mu, right, Tail::Vertex(0), Head::Truncated),
            edge("down_right", mu, right, Tail::Vertex(0), Head::Truncated),
        ],
        vec![mat(2, 2, &[c(k), c(-s), c(s), c(k)])],
    )?))
}

impl FullGraphState {
    pub fn from_fn<U, L>(mu: f64, grid: &Grid, upper: U, lower: L) -> Result<Self>
    where
        U: Fn(f64) -> Complex64,
        L: Fn(f64) -> Complex64,
    {
        let net = full_network(1.0, mu, grid)?;
        Ok(Self(GraphState::from_fn(net, *grid, |label, x| {
            if label.starts_with("up") {
                upper(x)
            } else {
                lower(x)
            }
        })))
    }

    pub fn state(&self) -> &GraphState {
        &self.0
    }
}

/// Unitary group on the full graph; `t` may be negative.
pub fn evolve_unitary_full(state: &FullGraphState, k: f64, mu: f64, t: f64) -> Result<FullGraphState> {
    Ok(FullGraphState(evolve_on(&full_network(k, mu, &state.0.grid)?, &state.0, t)?))
}

/// Embeds a Case-III state: the appendix becomes the first samples of the
/// lower right channel, the lower left channel is empty.
pub fn embed_case_iii(state: &GraphState, spec: &GraphSpec) -> Result<FullGraphState> {
    let grid = state.grid;
    let mut full = GraphState::zeros(full_network(1.0, spec.mu, &grid)?, grid);
    let missing = || Error::GridMismatch("not a Case-III state".into());
    let left = state.edge("left").ok_or_else(missing)?;
    let right = state.edge("right").ok_or_else(missing)?;
    let app = state.edge("appendix").ok_or_else(missing)?;
    full.edge_mut("up_left").expect("full graph edge").copy_from_slice(left);
    full.edge_mut("up_right").expect("full graph edge").copy_from_slice(right);
    full.edge_mut("down_right").expect("full graph edge")[..app.len()].copy_from_slice(app);
    Ok(FullGraphState(full))
}

/// Orthogonal projection of a full-graph state onto the Case-III subgraph.
pub fn compress_case_iii(full: &FullGraphState, spec: &GraphSpec) -> Result<GraphState> {
    let grid = full.0.grid;
    let mut out = GraphState::zeros(case_network(spec, &grid)?, grid);
    let f = &full.0;
    let up_l = f.edge("up_left").expect("full graph edge").to_vec();
    let up_r = f.edge("up_right").expect("full graph edge").to_vec();
    let down_r = f.edge("down_right").expect("full graph edge");
    let m = out.edge("appendix").map(|a| a.len()).unwrap_or(0);
    *out.edge_mut("left").ok_or_else(|| Error::GridMismatch("spec is not Case III".into()))? = up_l;
    *out.edge_mut("right").expect("case III edge") = up_r;
    *out.edge_mut("appendix").expect("case III edge") = down_r[..m].to_vec();
    out.exact = f.exact;
    Ok(out)
}

/// Loop `(0, ℓ]` whose outflow re-enters multiplied by `wrap`; edge `ring`.
pub fn ring_network(ell: f64, wrap: Complex64, grid: &Grid) -> Result<Arc<Network>> {
    Ok(Arc::new(Network::new(
        vec![edge("ring", 0.0, grid.cells_between(0.0, ell)?, Tail::Vertex(0), Head::Vertex(0))],
        vec![mat(1, 1, &[wrap])],
    )?))
}

pub fn ring_state<F>(ell: f64, grid: &Grid, f: F) -> Result<GraphState>
where
    F: Fn(f64) -> Complex64,
{
    Ok(GraphState::from_fn(ring_network(ell, c(1.0), grid)?, *grid, |_, x| f(x)))
}

fn ring_length(state: &GraphState) -> Result<f64> {
    let i = state.network.edge_index("ring").ok_or_else(|| Error::GridMismatch("not a ring state".into()))?;
    Ok(state.network.edges[i].cells as f64 * state.grid.dx)
}

/// Magnetic ring group, boundary condition `f(0) = e^{-iΦ} f(ℓ)`.
pub fn evolve_ring(state: &GraphState, flux: f64, t: f64) -> Result<GraphState> {
    let net = ring_network(ring_length(state)?, Complex64::from_polar(1.0, -flux), &state.grid)?;
    evolve_on(&net, state, t)
}

/// Dissipative ring semigroup `W_t`, boundary condition `f(0) = κ f(ℓ)`.
pub fn evolve_dissipative_ring(state: &GraphState, kappa: Complex64, t: f64) -> Result<GraphState> {
    if !(kappa.norm() < 1.0) {
        return invalid("dissipative ring needs |kappa| < 1");
    }
    if !(t >= 0.0) {
        return invalid("semigroup runs forward only (t ≥ 0)");
    }
    let net = ring_network(ring_length(state)?, kappa, &state.grid)?;
    evolve_on(&net, state, t)
}

/// Unitary dilation of the dissipative ring: lines `left`, `right` glued to
/// the loop `ring` at 0 by a unitary vertex matrix whose loop-to-loop entry
/// is `κ`.
pub fn ring_dilation_network(ell: f64, kappa: Complex64, grid: &Grid) -> Result<Arc<Network>> {
    let a = kappa.norm();
    if !(a < 1.0) {
        return invalid("dilation needs |kappa| < 1");
    }
    let s = (1.0 - a * a).sqrt();
    let phase = if a > 0.0 { kappa / a } else { c(1.0) };
    let l = grid.l_max;
    Ok(Arc::new(Network::new(
        vec![
            edge("left", -l, grid.cells_between(-l, 0.0)?, Tail::Truncated, Head::Vertex(0)),
            edge("right", 0.0, grid.cells_between(0.0, l)?, Tail::Vertex(0), Head::Truncated),
            edge("ring", 0.0, grid.cells_between(0.0, ell)?, Tail::Vertex(0), Head::Vertex(0)),
        ],
        vec![mat(2, 2, &[c(a), -phase * s, c(s), kappa])],
    )?))
}

/// Evolves a ring state inside the dilation and projects back onto the loop.
pub fn dilated_ring_evolution(state: &GraphState, kappa: Complex64, t: f64) -> Result<GraphState> {
    let ell = ring_length(state)?;
    let net = ring_dilation_network(ell, kappa, &state.grid)?;
    let mut big = GraphState::zeros(net.clone(), state.grid);
    *big.edge_mut("ring").expect("dilation has a ring") = state.edge("ring").expect("ring state").to_vec();
    let out = evolve_on(&net, &big, t)?;
    let mut ring = state.clone();
    *ring.edge_mut("ring").expect("ring state") = out.edge("ring").expect("dilation has a ring").to_vec();
    ring.exact = out.exact;
    Ok(ring)
}

/// Graph and vertex coupling of the self-adjoint extension `D_Θ`.
///
/// Case I: line with `f(μ+) = -Θ f(μ-)`; Case II: ring with
/// `f(0) = -Θ f(ℓ)`; Case III: line plus the appendix closed into a loop
/// through the unitary
/// `[[k, √(1-k²)Θ], [√(1-k²), -kΘ]]` acting on `(f(μ-), f_ℓ(ℓ))`.
pub fn d_theta_network(spec: &GraphSpec, grid: &Grid) -> Result<Arc<Network>> {
    spec.validate()?;
    let theta = spec.theta()?;
    let l = grid.l_max;
    let mu = spec.mu;
    match spec.case {
        GraphCase::I => Ok(Arc::new(Network::new(
            vec![
                edge("left", -l, grid.cells_between(-l, mu)?, Tail::Truncated, Head::Vertex(0)),
                edge("right", mu, grid.cells_between(mu, l)?, Tail::Vertex(0), Head::Truncated),
            ],
            vec![mat(1, 1, &[-theta])],
        )?)),
        GraphCase::II => Ok(Arc::new(Network::new(
            vec![edge("ring", mu, grid.cells_between(mu, spec.nu)?, Tail::Vertex(0), Head::Vertex(0))],
            vec![mat(1, 1, &[-theta])],
        )?)),
        GraphCase::III => {
            let k = spec.k;
            let s = (1.0 - k * k).sqrt();
            Ok(Arc::new(Network::new(
                vec![
                    edge("left", -l, grid.cells_between(-l, mu)?, Tail::Truncated, Head::Vertex(0)),
                    edge("right", mu, grid.cells_between(mu, l)?, Tail::Vertex(0), Head::Truncated),
                    edge("appendix", mu, grid.cells_between(mu, spec.nu)?, Tail::Vertex(0), Head::Vertex(0)),
                ],
                vec![mat(2, 2, &[c(k), theta * s, c(s), -theta * k])],
            )?))
        }
        GraphCase::IStar => invalid("D_Θ groups are defined for Cases I, II, III"),
    }
}

/// Single line `(-L, L]`, edge `line`.
pub fn line_network(grid: &Grid) -> Result<Arc<Network>> {
    let l = grid.l_max;
    Ok(Arc::new(Network::new(
        vec![edge("line", -l, grid.cells_between(-l, l)?, Tail::Truncated, Head::Truncated)],
        vec![],
    )?))
}

/// Cumulative phase `φ_j = Δx·Σ_{i≤j} 𝒜_i` of a potential sampled on an edge.
pub fn gauge_phase(potential: &[f64], dx: f64) -> Vec<f64> {
    let mut acc = 0.0;
    potential
        .iter()
        .map(|a| {
            acc += a * dx;
            acc
        })
        .collect()
}

/// `Φ = ∫₀^ℓ 𝒜`.
pub fn flux_of(potential: &[f64], dx: f64) -> f64 {
    gauge_phase(potential, dx).last().copied().unwrap_or(0.0)
}

/// Multiplies a single-edge state by `e^{iφ(x)}`, `φ' = 𝒜`, `φ(origin) = 0`.
pub fn apply_gauge(state: &GraphState, potential: &[f64]) -> Result<GraphState> {
    if state.data.len() != 1 || state.data[0].len() != potential.len() {
        return Err(Error::GridMismatch("potential must be sampled on the state's single edge".into()));
    }
    let phase = gauge_phase(potential, state.grid.dx);
    let mut out = state.clone();
    for (v, p) in out.data[0].iter_mut().zip(&phase) {
        *v *= Complex64::from_polar(1.0, *p);
    }
    Ok(out)
}

/// Ring transport with a vector potential: a sample carried from `x` to
/// `x + ct` picks up `e^{i∫𝒜}` along its path and `wrap` at every pass
/// through the vertex. Runs forward only.
pub fn evolve_ring_potential(state: &GraphState, potential: &[f64], wrap: Complex64, t: f64) -> Result<GraphState> {
    let n = state.data.first().map(|d| d.len()).unwrap_or(0);
    if state.data.len() != 1 || potential.len() != n {
        return Err(Error::GridMismatch("potential must be sampled on the ring".into()));
    }
    let m = state.grid.cells_for(t);
    if !(m >= 0.0) || (m - m.round()).abs() > 1e-9 * m.max(1.0) {
        return Err(Error::NonCommensurate { t, cells: m });
    }
    let m = m.round() as usize;
    let phase = gauge_phase(potential, state.grid.dx);
    let flux = phase[n - 1];
    let mut out = state.clone();
    for j in 0..n {
        // source index i = j - m (mod n) with w wraps
        let back = m as i64;
        let raw = j as i64 - back;
        let wraps = (-(raw.div_euclid(n as i64))) as i32;
        let i = raw.rem_euclid(n as i64) as usize;
        let path = phase[j] - phase[i] + wraps as f64 * flux;
        out.data[0][j] = state.data[0][i] * wrap.powi(wraps) * Complex64::from_polar(1.0, path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::inner_product;
    use crate::I;
    use std::f64::consts::PI;

    fn grid(dx: f64, l: f64) -> Grid {
        Grid::new(dx, 1.0, l).unwrap()
    }

    fn one() -> Complex64 {
        c(1.0)
    }

    #[test]
    fn interval_is_nilpotent() {
        let g = grid(1.0 / 64.0, 4.0);
        let spec = GraphSpec::interval(1.0, one()).unwrap();
        let st = case_state(&spec, &g, |_, x| c(1.0 + x)).unwrap();
        let out = evolve_contraction(&st, &spec, 1.5).unwrap();
        assert_eq!(out.norm_sq(), 0.0);
        let flat = case_state(&spec, &g, |_, _| c(1.0)).unwrap();
        let half = evolve_contraction(&flat, &spec, 0.5).unwrap();
        assert!((half.norm_sq() - 0.5).abs() <= g.dx);
    }

    #[test]
    fn gate_amplitude() {
        let g = grid(1.0 / 128.0, 4.0);
        let spec = GraphSpec::gate(0.5, one()).unwrap();
        let st = case_state(&spec, &g, |l, x| c(if l == "left" && x > -1.0 { 1.0 } else { 0.0 }))
            .unwrap()
            .normalized()
            .unwrap();
        let out = evolve_contraction(&st, &spec, 2.0).unwrap();
        assert!((out.norm_sq() - 0.25).abs() <= g.dx);
    }

    #[test]
    fn truncation_is_reported() {
        let g = grid(0.125, 2.0);
        let spec = GraphSpec::gate(0.5, one()).unwrap();
        let st = case_state(&spec, &g, |l, x| c(if l == "right" && x > 1.0 { 1.0 } else { 0.0 })).unwrap();
        assert!(matches!(evolve_contraction(&st, &spec, 1.5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn non_commensurate_times() {
        let g = grid(0.125, 2.0);
        let spec = GraphSpec::interval(1.0, one()).unwrap();
        let st = case_state(&spec, &g, |_, _| c(1.0)).unwrap();
        assert!(matches!(evolve_contraction(&st, &spec, 0.1), Err(Error::NonCommensurate { .. })));
        let gi = g.interpolating();
        let st = case_state(&spec, &gi, |_, _| c(1.0)).unwrap();
        let out = evolve_contraction(&st, &spec, 0.0625).unwrap();
        assert!(!out.exact);
        assert!((out.data[0][0] - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn ring_wraps() {
        let g = grid(1.0 / 256.0, 1.0);
        let st = ring_state(1.0, &g, |x| c(x.sin()) + I * x * x).unwrap();
        let same = evolve_ring(&st, 0.0, 1.0).unwrap();
        assert_eq!(same.data, st.data);
        let neg = evolve_ring(&st, PI, 1.0).unwrap();
        for (a, b) in neg.data[0].iter().zip(&st.data[0]) {
            assert!((a + b).norm() < 1e-15);
        }
        let back = evolve_ring(&evolve_ring(&st, 0.7, 0.3125).unwrap(), 0.7, -0.3125).unwrap();
        for (a, b) in back.data[0].iter().zip(&st.data[0]) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn dissipative_ring_examples() {
        let g = grid(1.0 / 64.0, 4.0);
        let st = ring_state(1.0, &g, |_| c(1.0)).unwrap();
        let dead = evolve_dissipative_ring(&st, c(0.0), 1.0).unwrap();
        assert_eq!(dead.norm_sq(), 0.0);
        let w = evolve_dissipative_ring(&st, c(0.5), 1.0).unwrap();
        assert!((w.norm_sq() - 0.25 * st.norm_sq()).abs() < 1e-14);
        let dil = dilated_ring_evolution(&st, Complex64::new(0.3, 0.4), 2.5).unwrap();
        let direct = evolve_dissipative_ring(&st, Complex64::new(0.3, 0.4), 2.5).unwrap();
        assert_eq!(dil.data, direct.data);
    }

    #[test]
    fn compression_of_full_group() {
        let g = grid(1.0 / 32.0, 16.0);
        let spec = GraphSpec::appendix(0.6, 1.0, one()).unwrap();
        let st = case_state(&spec, &g, |l, x| match l {
            "left" if x > -3.0 => Complex64::new((x * 3.0).cos(), x),
            "appendix" => c(x * (1.0 - x)),
            "right" if x < 2.0 => c(0.5),
            _ => c(0.0),
        })
        .unwrap();
        for &s in &[0.25, 1.0, 3.5] {
            let a = evolve_contraction(&st, &spec, s).unwrap();
            let full = evolve_unitary_full(&embed_case_iii(&st, &spec).unwrap(), spec.k, spec.mu, s).unwrap();
            let b = compress_case_iii(&full, &spec).unwrap();
            assert_eq!(a.data, b.data, "s = {s}");
        }
    }

    #[test]
    fn full_group_is_unitary_and_reversible() {
        let g = grid(1.0 / 32.0, 16.0);
        let st = FullGraphState::from_fn(0.0, &g, |x| c((-x * x).exp()), |x| Complex64::new(0.0, (-(x - 1.0).powi(2)).exp()))
            .unwrap();
        let n0 = st.0.norm_sq();
        let fwd = evolve_unitary_full(&st, 0.3, 0.0, 2.0).unwrap();
        assert!((fwd.0.norm_sq() - n0).abs() < 1e-13);
        let back = evolve_unitary_full(&fwd, 0.3, 0.0, -2.0).unwrap();
        for (a, b) in back.0.data.iter().flatten().zip(st.0.data.iter().flatten()) {
            assert!((a - b).norm() < 1e-15);
        }
        // k = 1 decouples the channels
        let free = evolve_unitary_full(&st, 1.0, 0.0, 1.0).unwrap();
        let up = free.0.edge("up_right").unwrap();
        assert!((up[0] - st.0.edge("up_left").unwrap()[st.0.edge("up_left").unwrap().len() - 32]).norm() == 0.0);
    }

    #[test]
    fn shifted_indicator_overlap() {
        let g = grid(1.0 / 64.0, 4.0);
        let net = line_network(&g).unwrap();
        let st = GraphState::from_fn(net.clone(), g, |_, x| c(if x > 0.0 && x <= 1.0 { 1.0 } else { 0.0 }));
        for &t in &[0.0, 0.25, 0.5, 1.0, -0.75] {
            let moved = evolve_on(&net, &st, t).unwrap();
            let a = inner_product(&moved, &st).unwrap();
            assert!((a.re - (1.0 - f64::abs(t))).abs() < 1e-14 && a.im == 0.0);
        }
    }

    #[test]
    fn gauge_moves_boundary_phase() {
        let g = grid(1.0 / 128.0, 1.0);
        let st = ring_state(1.0, &g, |x| Complex64::new((2.0 * x).cos(), x)).unwrap();
        let pot: Vec<f64> = (1..=128).map(|j| 1.0 + (j as f64 / 128.0 * 5.0).sin()).collect();
        let flux = flux_of(&pot, g.dx);
        let theta = Complex64::from_polar(1.0, 0.4);
        let zero_pot = vec![0.0; 128];
        assert_eq!(apply_gauge(&st, &zero_pot).unwrap().data, st.data);
        for &t in &[0.25, 1.0, 1.75] {
            // G U_Θ G⁻¹ = U^𝒜_{Θ e^{-iΦ}}
            let minus: Vec<f64> = pot.iter().map(|a| -a).collect();
            let lhs = apply_gauge(
                &evolve_on(&ring_network(1.0, theta, &g).unwrap(), &apply_gauge(&st, &minus).unwrap(), t).unwrap(),
                &pot,
            )
            .unwrap();
            let rhs = evolve_ring_potential(&st, &pot, theta * Complex64::from_polar(1.0, -flux), t).unwrap();
            for (a, b) in lhs.data[0].iter().zip(&rhs.data[0]) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn d_theta_groups_are_unitary() {
        let g = grid(1.0 / 32.0, 8.0);
        let theta = Complex64::from_polar(1.0, 1.2);
        for spec in [
            GraphSpec::gate(0.5, theta).unwrap(),
            GraphSpec::interval(1.0, theta).unwrap(),
            GraphSpec::appendix(0.4, 1.0, theta).unwrap(),
        ] {
            let net = d_theta_network(&spec, &g).unwrap();
            let st = GraphState::from_fn(net.clone(), g, |_, x| c((-x * x).exp()));
            let out = evolve_on(&net, &st, 2.0).unwrap();
            assert!((out.norm_sq() - st.norm_sq()).abs() < 1e-13);
        }
    }

    #[test]
    fn csv_export() {
        let g = grid(0.5, 1.0);
        let st = ring_state(1.0, &g, c).unwrap();
        assert_eq!(st.to_csv(), "edge_id,x,re,im\nring,0.5,0.5,0\nring,1,1,0\n");
    }
}
