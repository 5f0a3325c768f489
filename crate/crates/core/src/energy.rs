//! Discrete p-Dirichlet energy on cell-centered averaged forward
//! differences, shared by the capacity and Dirichlet solvers.
//!
//! Per cell, each gradient component is the average of the forward
//! differences along the 2^(N-1) cell edges in that direction; the cell
//! contributes `h^N (eps^2 + |grad|^2)^(p/2)` to the energy.

use crate::geometry::{Grid, GridFunction, NodeRole, MAX_DIM};

/// Evaluates the regularized energy and accumulates its gradient with
/// respect to every node value into `grad` (which is zeroed first).
/// Pass `grad = None` to compute the energy alone.
pub fn energy_and_grad(
    grid: &Grid,
    p: f64,
    eps: f64,
    values: &[f64],
    mut grad: Option<&mut [f64]>,
) -> f64 {
    let dim = grid.dim;
    let nc = 1usize << dim;
    let offs = grid.corner_offsets();
    let cell_vol = grid.h.powi(dim as i32);
    let inv_edge = 1.0 / ((nc / 2) as f64 * grid.h);
    let eps2 = eps * eps;
    // sign[c][d]: +1 when corner c is on the far side along axis d
    let mut sign = [[0.0f64; MAX_DIM]; 8];
    for (c, s) in sign.iter_mut().enumerate().take(nc) {
        for (d, sd) in s.iter_mut().enumerate().take(dim) {
            *sd = if c >> (dim - 1 - d) & 1 == 1 { 1.0 } else { -1.0 };
        }
    }
    if let Some(g) = grad.as_deref_mut() {
        g.fill(0.0);
    }
    let mut energy = 0.0;
    let mut corner_vals = [0.0f64; 8];
    grid.for_each_cell(|lin0, _| {
        for (c, off) in offs.iter().enumerate() {
            corner_vals[c] = values[lin0 + off];
        }
        let mut g2 = eps2;
        let mut gd = [0.0f64; MAX_DIM];
        for d in 0..dim {
            let mut acc = 0.0;
            for c in 0..nc {
                acc += sign[c][d] * corner_vals[c];
            }
            let v = acc * inv_edge;
            gd[d] = v;
            g2 += v * v;
        }
        let w = g2.powf(0.5 * p);
        energy += cell_vol * w;
        if let Some(g) = grad.as_deref_mut() {
            // d/du of h^N (eps^2 + |grad|^2)^(p/2)
            let coef = cell_vol * p * g2.powf(0.5 * p - 1.0) * inv_edge;
            for (c, off) in offs.iter().enumerate() {
                let mut s = 0.0;
                for d in 0..dim {
                    s += sign[c][d] * gd[d];
                }
                g[lin0 + off] += coef * s;
            }
        }
    });
    energy
}

/// Largest cell-gradient magnitude of a grid function (eps = 0).
pub fn cell_gradient_max(f: &GridFunction) -> f64 {
    let grid = &f.grid;
    let dim = grid.dim;
    let nc = 1usize << dim;
    let offs = grid.corner_offsets();
    let inv_edge = 1.0 / ((nc / 2) as f64 * grid.h);
    let mut max_g = 0.0f64;
    grid.for_each_cell(|lin0, _| {
        let mut g2 = 0.0;
        for d in 0..dim {
            let mut acc = 0.0;
            for (c, off) in offs.iter().enumerate() {
                let s = if c >> (dim - 1 - d) & 1 == 1 { 1.0 } else { -1.0 };
                acc += s * f.values[lin0 + off];
            }
            let v = acc * inv_edge;
            g2 += v * v;
        }
        max_g = max_g.max(g2.sqrt());
    });
    max_g
}

/// The free degrees of freedom of a masked grid function.
pub struct FreeDofs {
    pub nodes: Vec<usize>,
}

impl FreeDofs {
    pub fn of(f: &GridFunction) -> Self {
        let nodes = f
            .mask
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == NodeRole::Free)
            .map(|(i, _)| i)
            .collect();
        FreeDofs { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn gather(&self, full: &[f64], x: &mut [f64]) {
        for (i, n) in self.nodes.iter().enumerate() {
            x[i] = full[*n];
        }
    }

    pub fn scatter(&self, x: &[f64], full: &mut [f64]) {
        for (i, n) in self.nodes.iter().enumerate() {
            full[*n] = x[i];
        }
    }
}

/// Objective wrapper that minimizes the energy over the free nodes of `f`,
/// holding fixed and exterior nodes at their current values.
pub struct MaskedEnergy<'a> {
    pub f: &'a mut GridFunction,
    pub dofs: FreeDofs,
    pub p: f64,
    pub eps: f64,
    full_grad: Vec<f64>,
}

impl<'a> MaskedEnergy<'a> {
    pub fn new(f: &'a mut GridFunction, p: f64, eps: f64) -> Self {
        let dofs = FreeDofs::of(f);
        let n = f.grid.node_count();
        MaskedEnergy { f, dofs, p, eps, full_grad: vec![0.0; n] }
    }

    /// Energy and gradient restricted to the free nodes at `x`.
    pub fn eval(&mut self, x: &[f64], grad_out: &mut [f64]) -> f64 {
        self.dofs.scatter(x, &mut self.f.values);
        let e = energy_and_grad(
            &self.f.grid,
            self.p,
            self.eps,
            &self.f.values,
            Some(&mut self.full_grad),
        );
        self.dofs.gather(&self.full_grad, grad_out);
        e
    }
}
