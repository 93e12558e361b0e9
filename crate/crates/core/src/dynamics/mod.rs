//! Grid-exact transport on directed metric graphs.
//!
//! Every edge carries uniformly spaced samples; a sample at index `j` of an
//! edge starting at `x₀` sits at `x₀ + (j+1)Δx`, so the last sample of an
//! incoming edge sits on its head vertex. Evolution over `c·t = mΔx` shifts
//! samples by `m` cells; samples crossing a vertex are mixed by its
//! `(#out × #in)` matrix.

mod cases;
mod state;

pub use cases::*;
pub use state::*;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// What feeds an edge at its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Vertex(usize),
    /// Nothing enters (Dirichlet-type inflow).
    Source,
    /// End of the simulated window on an infinite edge.
    Truncated,
}

/// What receives the samples leaving an edge at its head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Vertex(usize),
    /// Physical absorption.
    Sink,
    /// End of the simulated window; nonzero outflow is an error.
    Truncated,
}

#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub label: String,
    /// Coordinate of the tail.
    pub start: f64,
    pub cells: usize,
    pub tail: Tail,
    pub head: Head,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
    /// Rows index `outgoing`, columns index `incoming`.
    pub matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub edges: Vec<EdgeSpec>,
    pub vertices: Vec<Vertex>,
}

impl Network {
    /// Builds the vertex incidence lists from the edge endpoints and checks the
    /// matrix shapes. `matrices[v]` belongs to vertex `v`.
    pub fn new(edges: Vec<EdgeSpec>, matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let mut vertices: Vec<Vertex> = matrices
            .into_iter()
            .map(|matrix| Vertex { incoming: vec![], outgoing: vec![], matrix })
            .collect();
        for (e, edge) in edges.iter().enumerate() {
            if edge.cells == 0 {
                return invalid(format!("edge `{}` has no cells", edge.label));
            }
            if let Tail::Vertex(v) = edge.tail {
                vertices.get_mut(v).ok_or_else(|| Error::InvalidInput(format!("no vertex {v}")))?.outgoing.push(e);
            }
            if let Head::Vertex(v) = edge.head {
                vertices.get_mut(v).ok_or_else(|| Error::InvalidInput(format!("no vertex {v}")))?.incoming.push(e);
            }
        }
        for (v, vx) in vertices.iter().enumerate() {
            if vx.matrix.nrows() != vx.outgoing.len() || vx.matrix.ncols() != vx.incoming.len() {
                return invalid(format!(
                    "vertex {v}: matrix is {}x{} but the vertex has {} outgoing and {} incoming edges",
                    vx.matrix.nrows(),
                    vx.matrix.ncols(),
                    vx.outgoing.len(),
                    vx.incoming.len()
                ));
            }
        }
        Ok(Self { edges, vertices })
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }

    pub fn min_cells(&self) -> usize {
        self.edges.iter().map(|e| e.cells).min().unwrap_or(0)
    }

    /// Same edges (labels, starts, cell counts) as `other`.
    pub fn same_layout(&self, other: &Network) -> bool {
        self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.label == b.label && a.cells == b.cells && (a.start - b.start).abs() < 1e-12)
    }
}

/// Outflow through a truncated end below this fraction of the state's
/// largest sample is dropped silently.
pub const TRUNCATION_TOL: f64 = 1e-12;

fn negligible(v: &[Complex64], scale: f64) -> bool {
    v.iter().all(|x| x.norm() <= TRUNCATION_TOL * scale)
}

fn scale_of(data: &[Vec<Complex64>]) -> f64 {
    data.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Forward shift by `q ≤ min_cells` cells.
fn step_forward(net: &Network, data: &[Vec<Complex64>], q: usize) -> Result<Vec<Vec<Complex64>>> {
    let zero = Complex64::new(0.0, 0.0);
    let scale = scale_of(data);
    let exiting: Vec<&[Complex64]> = data.iter().map(|d| &d[d.len() - q..]).collect();
    let mut out: Vec<Vec<Complex64>> = data
        .iter()
        .map(|d| {
            let mut v = vec![zero; q];
            v.extend_from_slice(&d[..d.len() - q]);
            v
        })
        .collect();
    for (e, edge) in net.edges.iter().enumerate() {
        if edge.head == Head::Truncated && !negligible(exiting[e], scale) {
            return Err(Error::Truncation { edge: edge.label.clone() });
        }
    }
    for vx in &net.vertices {
        for (r, &oe) in vx.outgoing.iter().enumerate() {
            for j in 0..q {
                let mut acc = zero;
                for (c, &ie) in vx.incoming.iter().enumerate() {
                    acc += vx.matrix[(r, c)] * exiting[ie][j];
                }
                out[oe][j] = acc;
            }
        }
    }
    Ok(out)
}

/// Backward shift by `q` cells with the adjoint vertex matrices.
fn step_backward(net: &Network, data: &[Vec<Complex64>], q: usize) -> Result<Vec<Vec<Complex64>>> {
    let zero = Complex64::new(0.0, 0.0);
    let scale = scale_of(data);
    let exiting: Vec<&[Complex64]> = data.iter().map(|d| &d[..q]).collect();
    let mut out: Vec<Vec<Complex64>> = data
        .iter()
        .map(|d| {
            let mut v = d[q..].to_vec();
            v.extend(std::iter::repeat_n(zero, q));
            v
        })
        .collect();
    for (e, edge) in net.edges.iter().enumerate() {
        if edge.tail == Tail::Truncated && !negligible(exiting[e], scale) {
            return Err(Error::Truncation { edge: edge.label.clone() });
        }
    }
    for vx in &net.vertices {
        for (c, &ie) in vx.incoming.iter().enumerate() {
            let len = out[ie].len();
            for j in 0..q {
                let mut acc = zero;
                for (r, &oe) in vx.outgoing.iter().enumerate() {
                    acc += vx.matrix[(r, c)].conj() * exiting[oe][j];
                }
                out[ie][len - q + j] = acc;
            }
        }
    }
    Ok(out)
}

/// Shifts the samples by `cells` (negative: backwards with adjoint vertices).
pub fn shift_cells(net: &Network, data: &[Vec<Complex64>], cells: i64) -> Result<Vec<Vec<Complex64>>> {
    let min = net.min_cells();
    let mut cur = data.to_vec();
    let mut rem = cells.unsigned_abs() as usize;
    while rem > 0 {
        let q = rem.min(min);
        cur = if cells > 0 { step_forward(net, &cur, q)? } else { step_backward(net, &cur, q)? };
        rem -= q;
    }
    Ok(cur)
}

/// How non-commensurate times are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeMode {
    #[default]
    Exact,
    /// Linear interpolation between neighbouring grid shifts; results are
    /// flagged inexact.
    Interpolate,
}

/// Grid parameters shared by all edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dx: f64,
    pub c: f64,
    /// Half-width of the simulated window on infinite edges.
    pub l_max: f64,
    pub mode: TimeMode,
}

impl Grid {
    pub fn new(dx: f64, c: f64, l_max: f64) -> Result<Self> {
        if !(dx > 0.0 && c > 0.0 && l_max > 0.0) {
            return invalid("grid needs dx > 0, c > 0, l_max > 0");
        }
        Ok(Self { dx, c, l_max, mode: TimeMode::Exact })
    }

    pub fn interpolating(mut self) -> Self {
        self.mode = TimeMode::Interpolate;
        self
    }

    /// Number of cells covering `[a, b]`; errors unless `b - a` is a multiple
    /// of `dx`.
    pub fn cells_between(&self, a: f64, b: f64) -> Result<usize> {
        let r = (b - a) / self.dx;
        if !(r > 0.5) || (r - r.round()).abs() > 1e-9 * r.abs().max(1.0) {
            return invalid(format!("[{a}, {b}] is not a positive multiple of dx = {}", self.dx));
        }
        Ok(r.round() as usize)
    }

    /// `c·t/Δx`.
    pub fn cells_for(&self, t: f64) -> f64 {
        self.c * t / self.dx
    }

    /// Nearest commensurate time to `t`.
    pub fn snap(&self, t: f64) -> f64 {
        self.cells_for(t).round() * self.dx / self.c
    }
}

/// Evolves `state` on `net` for time `t` (any sign).
pub fn evolve_on(net: &Arc<Network>, state: &GraphState, t: f64) -> Result<GraphState> {
    if !net.same_layout(&state.network) {
        return Err(Error::GridMismatch("state layout does not match the evolution's graph".into()));
    }
    let m = state.grid.cells_for(t);
    let rounded = m.round();
    let data = if (m - rounded).abs() <= 1e-9 * m.abs().max(1.0) {
        let data = shift_cells(net, &state.data, rounded as i64)?;
        return Ok(GraphState { network: net.clone(), grid: state.grid, data, exact: state.exact });
    } else {
        match state.grid.mode {
            TimeMode::Exact => return Err(Error::NonCommensurate { t, cells: m }),
            TimeMode::Interpolate => {
                log::warn!("t = {t} is {m} cells; interpolating between neighbouring shifts");
                let lo = m.floor();
                let w = m - lo;
                let a = shift_cells(net, &state.data, lo as i64)?;
                let b = shift_cells(net, &state.data, lo as i64 + 1)?;
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * (1.0 - w) + q * w).collect())
                    .collect()
            }
        }
    };
    Ok(GraphState { network: net.clone(), grid: state.grid, data, exact: false })
}
