use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Grid, Network};
use crate::error::{Error, Result};

/// Grid-sampled wavefunction on the edges of a [`Network`].
#[derive(Debug, Clone)]
pub struct GraphState {
    pub network: Arc<Network>,
    pub grid: Grid,
    pub data: Vec<Vec<Complex64>>,
    /// False once a non-commensurate time was interpolated.
    pub exact: bool,
}

impl GraphState {
    pub fn zeros(network: Arc<Network>, grid: Grid) -> Self {
        let data = network.edges.iter().map(|e| vec![Complex64::new(0.0, 0.0); e.cells]).collect();
        Self { network, grid, data, exact: true }
    }

    /// Samples `f(label, x)` at every grid point.
    pub fn from_fn<F>(network: Arc<Network>, grid: Grid, f: F) -> Self
    where
        F: Fn(&str, f64) -> Complex64,
    {
        let data = network
            .edges
            .iter()
            .map(|e| (0..e.cells).map(|j| f(&e.label, e.start + (j as f64 + 1.0) * grid.dx)).collect())
            .collect();
        Self { network, grid, data, exact: true }
    }

    pub fn edge(&self, label: &str) -> Option<&[Complex64]> {
        self.network.edge_index(label).map(|i| self.data[i].as_slice())
    }

    pub fn edge_mut(&mut self, label: &str) -> Option<&mut Vec<Complex64>> {
        self.network.edge_index(label).map(move |i| &mut self.data[i])
    }

    /// Coordinate of sample `j` on edge `e`.
    pub fn position(&self, e: usize, j: usize) -> f64 {
        self.network.edges[e].start + (j as f64 + 1.0) * self.grid.dx
    }

    /// `Δx·Σ|f|²`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.dx * self.data.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidInput("cannot normalise the zero state".into()));
        }
        for v in self.data.iter_mut().flatten() {
            *v /= n;
        }
        Ok(self)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for v in self.data.iter_mut().flatten() {
            *v *= c;
        }
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Value at the tail end of an edge by linear extrapolation `2f₁ - f₂`.
    pub fn tail_value(&self, label: &str) -> Option<Complex64> {
        let d = self.edge(label)?;
        match d.len() {
            0 => None,
            1 => Some(d[0]),
            _ => Some(d[0] * 2.0 - d[1]),
        }
    }

    /// Value at the head end of an edge (the sample on the vertex).
    pub fn head_value(&self, label: &str) -> Option<Complex64> {
        self.edge(label)?.last().copied()
    }

    /// CSV rows `edge_id,x,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("edge_id,x,re,im\n");
        for (e, d) in self.data.iter().enumerate() {
            let label = &self.network.edges[e].label;
            for (j, v) in d.iter().enumerate() {
                let _ = writeln!(s, "{label},{},{},{}", self.position(e, j), v.re, v.im);
            }
        }
        s
    }
}

/// `⟨a, b⟩ = Δx·Σ a·b̄`.
pub fn inner_product(a: &GraphState, b: &GraphState) -> Result<Complex64> {
    if a.grid.dx != b.grid.dx || !a.network.same_layout(&b.network) {
        return Err(Error::GridMismatch("states live on different grids".into()));
    }
    let s: Complex64 = a
        .data
        .iter()
        .zip(&b.data)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q.conj()))
        .sum();
    Ok(s * a.grid.dx)
}
