//! Variational p-capacity of rasterized compact sets by minimizing the
//! discrete p-Dirichlet energy, with a 1-D radial oracle for validation.

use crate::energy::{energy_and_grad, MaskedEnergy};
use crate::error::{Error, Result};
use crate::geometry::{
    grid_from_counts, rasterize_obstacle, BoundaryPoint, DomainSpec, Grid, GridFunction, NodeRole,
};
use crate::minimize::{lbfgs, MinimizeOptions};
use crate::wiener::{DeltaEntry, DeltaProfile, GridMeta};

/// Options for the energy minimization.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Relative optimality tolerance on the gradient norm.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial gradient regularization; defaults to the grid spacing.
    pub eps_reg: Option<f64>,
    /// Number of tenfold reductions of `eps_reg`.
    pub continuation_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iters: 20_000, eps_reg: None, continuation_steps: 3 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArg(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidArg("max_iters must be >= 1".into()));
        }
        if let Some(e) = self.eps_reg {
            if e < 0.0 {
                return Err(Error::InvalidArg(format!("eps_reg must be >= 0, got {e}")));
            }
        }
        Ok(())
    }

    /// Regularization schedule for a grid of spacing `h`.
    pub fn eps_schedule(&self, h: f64) -> Vec<f64> {
        let base = self.eps_reg.unwrap_or(h);
        (0..=self.continuation_steps)
            .map(|j| base * 10f64.powi(-(j as i32)))
            .collect()
    }

    /// Final regularization level for a grid of spacing `h`.
    pub fn eps_final(&self, h: f64) -> f64 {
        *self.eps_schedule(h).last().unwrap()
    }
}

/// Outer plate of the condenser.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OuterBoundary {
    /// Ground the box boundary only.
    Box,
    /// Ground every node at distance >= r from the grid center, so the
    /// outer plate is a sphere (plus the box boundary).
    Ball(f64),
}

/// Estimated capacity with refinement history.
#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub value: f64,
    /// (h, value) per refinement level, coarse to fine.
    pub per_level: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub order_estimate: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl CapacityResult {
    /// Flat record `value,extrapolated,order,levels,iterations,residual`.
    pub fn to_record(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            self.value,
            self.extrapolated,
            self.order_estimate,
            self.per_level.len(),
            self.iterations,
            self.residual
        )
    }
}

/// Capacity of the spherical condenser (closed ball `a`, ball `b`) by 1-D
/// radial quadrature; the independent oracle for the grid estimates.
///
/// The radial Euler equation forces `|u'| = c r^-(N-1)/(p-1)`; normalizing
/// u(a)=1, u(b)=0 gives capacity = omega_{N-1} * Q^(1-p) with
/// Q = integral_a^b r^-(N-1)/(p-1) dr, evaluated here by composite Simpson
/// quadrature in log r.
pub fn radial_condenser_capacity(p: f64, n: usize, a: f64, b: f64) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return Err(Error::InvalidArg(format!("dimension must be 2 or 3, got {n}")));
    }
    if !(a > 0.0 && a < b) {
        return Err(Error::InvalidArg(format!("need 0 < a < b, got a={a}, b={b}")));
    }
    if !(p > 1.0 && p <= n as f64) {
        return Err(Error::InvalidArg(format!("need p in (1, N], got p={p}, N={n}")));
    }
    let m = (n as f64 - 1.0) / (p - 1.0);
    // Q = int_a^b r^-m dr = int_{ln a}^{ln b} e^{(1-m)s} ds
    let (s0, s1) = (a.ln(), b.ln());
    let panels = 4096usize;
    let ds = (s1 - s0) / panels as f64;
    let f = |s: f64| ((1.0 - m) * s).exp();
    let mut q = f(s0) + f(s1);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        q += w * f(s0 + i as f64 * ds);
    }
    q *= ds / 3.0;
    let omega = match n {
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    };
    Ok(omega * q.powf(1.0 - p))
}

fn check_exponent(p: f64, dim: usize) -> Result<()> {
    if !(p > 1.0 && p <= dim as f64) {
        return Err(Error::InvalidArg(format!("need p in (1, N], got p={p}, N={dim}")));
    }
    Ok(())
}

fn grid_center(grid: &Grid) -> [f64; 3] {
    let mut c = [0.0; 3];
    for d in 0..grid.dim {
        c[d] = grid.origin[d] + (grid.counts[d] - 1) as f64 * 0.5 * grid.h;
    }
    c
}

/// Builds the capacitary potential ansatz: 1 on K, 0 on the outer plate,
/// free in between, with an optional warm start for the free nodes.
fn capacity_potential(
    k: &[usize],
    grid: &Grid,
    outer: OuterBoundary,
    init: Option<&GridFunction>,
) -> GridFunction {
    let n = grid.node_count();
    let mut f = GridFunction {
        grid: grid.clone(),
        values: vec![0.0; n],
        mask: vec![NodeRole::Free; n],
    };
    let center = grid_center(grid);
    grid.for_each_node(|lin, idx| {
        if grid.on_box_boundary(&idx[..grid.dim]) {
            f.mask[lin] = NodeRole::FixedZero;
        }
        if let OuterBoundary::Ball(b) = outer {
            let x = grid.coord(&idx[..grid.dim]);
            let d2: f64 = (0..grid.dim).map(|d| (x[d] - center[d]).powi(2)).sum();
            if d2 >= b * b {
                f.mask[lin] = NodeRole::Exterior;
            }
        }
    });
    if let Some(coarse) = init {
        let gr = grid.clone();
        gr.for_each_node(|lin, idx| {
            if f.mask[lin] == NodeRole::Free {
                let x = gr.coord(&idx[..gr.dim]);
                f.values[lin] = coarse.sample(&x[..gr.dim]).clamp(0.0, 1.0);
            }
        });
    }
    for lin in k {
        f.mask[*lin] = NodeRole::FixedOne;
        f.values[*lin] = 1.0;
    }
    f
}

/// Minimizes the energy over the free nodes of `f` with continuation in the
/// regularization, in place. Returns (unregularized energy, iterations,
/// residual, converged).
pub(crate) fn minimize_potential(
    f: &mut GridFunction,
    p: f64,
    opts: &SolverOptions,
) -> (f64, usize, f64, bool) {
    let schedule = opts.eps_schedule(f.grid.h);
    let mut total_iters = 0;
    let mut residual = 0.0;
    let mut converged = true;
    let last = schedule.len() - 1;
    for (stage, eps) in schedule.iter().enumerate() {
        let mut obj = MaskedEnergy::new(f, p, *eps);
        let nfree = obj.dofs.len();
        let mut x0 = vec![0.0; nfree];
        obj.dofs.gather(&obj.f.values, &mut x0);
        let mopts = MinimizeOptions { tol: opts.tol, max_iters: opts.max_iters, memory: 10 };
        let out = lbfgs(|x, g| obj.eval(x, g), &x0, &mopts);
        obj.dofs.scatter(&out.x, &mut f.values);
        total_iters += out.iterations;
        residual = out.residual;
        if stage == last {
            converged = out.converged;
        }
    }
    let value = energy_and_grad(&f.grid, p, 0.0, &f.values, None);
    (value, total_iters, residual, converged)
}

/// Estimates the p-capacity of the node set `K` on a single grid. Returns
/// the result together with the converged capacitary potential.
pub fn estimate_capacity_with_potential(
    k: &[usize],
    p: f64,
    grid: &Grid,
    opts: &SolverOptions,
    outer: OuterBoundary,
    init: Option<&GridFunction>,
) -> Result<(CapacityResult, GridFunction)> {
    check_exponent(p, grid.dim)?;
    opts.validate()?;
    if grid.node_count() == 0 {
        return Err(Error::InvalidArg("empty grid".into()));
    }
    let mut f = capacity_potential(k, grid, outer, init);
    let (value, iterations, residual, converged) = minimize_potential(&mut f, p, opts);
    if !converged {
        return Err(Error::NonConvergence {
            residual,
            iterations,
            tol: opts.tol,
            best: Box::new(f),
        });
    }
    let result = CapacityResult {
        value,
        per_level: vec![(grid.h, value)],
        extrapolated: value,
        order_estimate: 0.0,
        iterations,
        residual,
    };
    Ok((result, f))
}

/// Single-grid capacity estimate.
pub fn estimate_capacity(
    k: &[usize],
    p: f64,
    grid: &Grid,
    opts: &SolverOptions,
    outer: OuterBoundary,
) -> Result<CapacityResult> {
    estimate_capacity_with_potential(k, p, grid, opts, outer, None).map(|(r, _)| r)
}

/// Richardson extrapolation over (h, value) pairs with refinement ratio 2.
/// With fewer than three levels the order defaults to 1.
pub fn richardson(per_level: &[(f64, f64)]) -> (f64, f64) {
    match per_level.len() {
        0 => (f64::NAN, 0.0),
        1 => (per_level[0].1, 0.0),
        2 => {
            let (f_coarse, f_fine) = (per_level[0].1, per_level[1].1);
            (f_fine + (f_fine - f_coarse), 1.0)
        }
        _ => {
            let k = per_level.len();
            let f3 = per_level[k - 3].1;
            let f2 = per_level[k - 2].1;
            let f1 = per_level[k - 1].1;
            let denom = f2 - f1;
            if denom.abs() < 1e-300 {
                return (f1, 0.0);
            }
            let ratio = (f3 - f2) / denom;
            if ratio <= 0.0 {
                // non-monotone refinement; fall back to first order
                return (f1 + (f1 - f2), 1.0);
            }
            let order = ratio.ln() / std::f64::consts::LN_2;
            let order_c = order.clamp(0.25, 4.0);
            (f1 + (f1 - f2) / (2f64.powf(order_c) - 1.0), order)
        }
    }
}

/// Multilevel capacity estimate of E^c intersected with the closed
/// rho-ball, refined over `counts_levels` grids (ascending resolution) and
/// Richardson-extrapolated. Coarse solutions warm-start finer levels.
pub fn estimate_capacity_extrapolated(
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    p: f64,
    counts_levels: &[usize],
    half_width: f64,
    opts: &SolverOptions,
    outer: OuterBoundary,
) -> Result<CapacityResult> {
    if counts_levels.is_empty() {
        return Err(Error::InvalidArg("at least one refinement level required".into()));
    }
    let mut per_level = Vec::new();
    let mut iterations = 0;
    let mut residual = 0.0;
    let mut prev: Option<GridFunction> = None;
    for &counts in counts_levels {
        let grid = grid_from_counts(domain.dim, &y.coords[..domain.dim], half_width, counts)?;
        let k = rasterize_obstacle(domain, y, rho, &grid)?;
        let (res, pot) =
            estimate_capacity_with_potential(&k, p, &grid, opts, outer, prev.as_ref())?;
        per_level.push((grid.h, res.value));
        iterations += res.iterations;
        residual = res.residual;
        prev = Some(pot);
    }
    let (extrapolated, order_estimate) = richardson(&per_level);
    let value = per_level.last().unwrap().1;
    Ok(CapacityResult { value, per_level, extrapolated, order_estimate, iterations, residual })
}

/// Relative capacity delta_y(rho) on a caller-supplied grid covering the
/// outer ball B_2(y): capacity of E^c in the closed rho-ball with outer
/// plate at radius 2, divided by rho^(N-p).
pub fn relative_capacity(
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    p: f64,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArg(format!("need 0 < rho < 1, got {rho}")));
    }
    check_exponent(p, domain.dim)?;
    let k = rasterize_obstacle(domain, y, rho, grid)?;
    if k.is_empty() {
        return Ok(0.0);
    }
    let res = estimate_capacity(&k, p, grid, opts, OuterBoundary::Ball(2.0))?;
    Ok(res.value / rho.powf(domain.dim as f64 - p))
}

/// Per-radius grid selection for delta profiles.
#[derive(Clone, Copy, Debug)]
pub struct GridPolicy {
    /// Minimum nodes across the obstacle diameter.
    pub min_across: usize,
    /// Cap on nodes per axis (kept odd).
    pub max_counts: usize,
    /// Refinement levels per radius (each doubling resolution, capped).
    pub levels: usize,
    /// Half-width of the computational box; 2 covers the outer ball B_2.
    pub half_width: f64,
}

impl GridPolicy {
    pub fn planar_default() -> Self {
        GridPolicy { min_across: 8, max_counts: 1025, levels: 2, half_width: 2.0 }
    }

    pub fn spatial_default() -> Self {
        GridPolicy { min_across: 8, max_counts: 65, levels: 1, half_width: 2.0 }
    }

    pub fn for_dim(dim: usize) -> Self {
        if dim == 3 {
            Self::spatial_default()
        } else {
            Self::planar_default()
        }
    }

    /// Ascending per-axis node counts for radius `rho`.
    pub fn counts_for(&self, rho: f64) -> Vec<usize> {
        let h_target = 2.0 * rho / self.min_across as f64;
        let mut base = (2 * (self.half_width / h_target).ceil() as usize + 1).max(9);
        if base % 2 == 0 {
            base += 1;
        }
        let cap = if self.max_counts % 2 == 0 { self.max_counts - 1 } else { self.max_counts };
        let mut levels = Vec::new();
        let mut c = base.min(cap);
        for _ in 0..self.levels.max(1) {
            if levels.last() != Some(&c) {
                levels.push(c);
            }
            if c >= cap {
                break;
            }
            c = (2 * c - 1).min(cap);
        }
        levels
    }
}

/// Samples the relative capacity over a strictly decreasing list of radii.
pub fn delta_profile(
    domain: &DomainSpec,
    y: &BoundaryPoint,
    p: f64,
    radii: &[f64],
    policy: &GridPolicy,
    opts: &SolverOptions,
) -> Result<DeltaProfile> {
    check_exponent(p, domain.dim)?;
    if radii.is_empty() {
        return Err(Error::InvalidArg("radii list is empty".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidArg("radii must be strictly decreasing".into()));
        }
    }
    if !(radii[0] < 1.0 && *radii.last().unwrap() > 0.0) {
        return Err(Error::InvalidArg("radii must lie in (0, 1)".into()));
    }
    let mut entries = Vec::with_capacity(radii.len());
    for &rho in radii {
        let counts = policy.counts_for(rho);
        let coarse_grid =
            grid_from_counts(domain.dim, &y.coords[..domain.dim], policy.half_width, counts[0])?;
        let k = rasterize_obstacle(domain, y, rho, &coarse_grid)?;
        let (delta, meta) = if k.is_empty() {
            (0.0, GridMeta { h: coarse_grid.h, counts: counts[0], levels: 1 })
        } else {
            let res = estimate_capacity_extrapolated(
                domain,
                y,
                rho,
                p,
                &counts,
                policy.half_width,
                opts,
                OuterBoundary::Ball(2.0),
            )?;
            let finest = *counts.last().unwrap();
            let h = res.per_level.last().unwrap().0;
            (
                (res.extrapolated / rho.powf(domain.dim as f64 - p)).max(0.0),
                GridMeta { h, counts: finest, levels: counts.len() },
            )
        };
        entries.push(DeltaEntry { t: rho, delta, grid_meta: meta });
    }
    Ok(DeltaProfile {
        entries,
        p,
        domain_label: domain.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gallery, make_grid};

    #[test]
    fn radial_oracle_closed_forms() {
        // p=2, N=3: 4 pi / (1/a - 1/b)
        let c = radial_condenser_capacity(2.0, 3, 0.25, 1.0).unwrap();
        assert!((c - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-10, "c = {c}");
        // p=2, N=2: 2 pi / ln(b/a)
        let c = radial_condenser_capacity(2.0, 2, 0.25, 1.0).unwrap();
        assert!((c - 2.0 * std::f64::consts::PI / 4f64.ln()).abs() < 1e-10, "c = {c}");
    }

    #[test]
    fn radial_oracle_point_limit() {
        // a -> 0 with p < N: capacity of a point vanishes
        let mut prev = f64::INFINITY;
        for k in 2..10 {
            let a = 2f64.powi(-k);
            let c = radial_condenser_capacity(1.5, 2, a, 1.0).unwrap();
            assert!(c < prev);
            prev = c;
        }
        assert!(prev < 0.2, "capacity near a point: {prev}");
    }

    #[test]
    fn radial_oracle_rejects_bad_input() {
        assert!(radial_condenser_capacity(2.0, 2, 1.0, 0.5).is_err());
        assert!(radial_condenser_capacity(2.5, 2, 0.25, 1.0).is_err());
        assert!(radial_condenser_capacity(1.0, 2, 0.25, 1.0).is_err());
    }

    #[test]
    fn empty_obstacle_has_zero_capacity() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 16.0).unwrap();
        let res =
            estimate_capacity(&[], 2.0, &grid, &SolverOptions::default(), OuterBoundary::Box)
                .unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn disk_capacity_near_oracle_2d() {
        let dom = gallery("full_ball", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let res = estimate_capacity_extrapolated(
            &dom,
            &y,
            0.25,
            2.0,
            &[33, 65, 129],
            1.0,
            &SolverOptions::default(),
            OuterBoundary::Ball(1.0),
        )
        .unwrap();
        let oracle = radial_condenser_capacity(2.0, 2, 0.25, 1.0).unwrap();
        let rel = (res.extrapolated - oracle).abs() / oracle;
        assert!(rel < 0.05, "extrapolated {} vs oracle {oracle} ({rel:.3} rel)", res.extrapolated);
    }

    #[test]
    fn constraint_monotonicity() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 32.0).unwrap();
        let dom = gallery("full_ball", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let opts = SolverOptions::default();
        let k1 = rasterize_obstacle(&dom, &y, 0.15, &grid).unwrap();
        let k2 = rasterize_obstacle(&dom, &y, 0.3, &grid).unwrap();
        let c1 = estimate_capacity(&k1, 2.0, &grid, &opts, OuterBoundary::Box).unwrap();
        let c2 = estimate_capacity(&k2, 2.0, &grid, &opts, OuterBoundary::Box).unwrap();
        assert!(c1.value <= c2.value * (1.0 + opts.tol));
    }

    #[test]
    fn potential_satisfies_maximum_principle() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 32.0).unwrap();
        let dom = gallery("full_ball", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let k = rasterize_obstacle(&dom, &y, 0.25, &grid).unwrap();
        let opts = SolverOptions::default();
        let (_, pot) = estimate_capacity_with_potential(
            &k,
            1.5,
            &grid,
            &opts,
            OuterBoundary::Ball(1.0),
            None,
        )
        .unwrap();
        for (v, m) in pot.values.iter().zip(pot.mask.iter()) {
            if *m != NodeRole::Exterior {
                assert!(*v >= -opts.tol && *v <= 1.0 + opts.tol, "psi = {v}");
            }
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 16.0).unwrap();
        let dom = gallery("half_space", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let k = rasterize_obstacle(&dom, &y, 0.25, &grid).unwrap();
        let run = || {
            estimate_capacity(&k, 1.5, &grid, &SolverOptions::default(), OuterBoundary::Box)
                .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn relative_capacity_full_ball_3d() {
        // condenser (closed 1/4-ball, B_2): 4 pi / (4 - 1/2), delta = value / rho
        let dom = gallery("full_ball", 3).unwrap();
        let y = BoundaryPoint::origin(3);
        let res = estimate_capacity_extrapolated(
            &dom,
            &y,
            0.25,
            2.0,
            &[25, 49],
            2.0,
            &SolverOptions::default(),
            OuterBoundary::Ball(2.0),
        )
        .unwrap();
        let delta = res.extrapolated / 0.25;
        let oracle = radial_condenser_capacity(2.0, 3, 0.25, 2.0).unwrap() / 0.25;
        let rel = (delta - oracle).abs() / oracle;
        assert!(rel < 0.05, "delta {delta} vs oracle {oracle} ({rel:.3} rel)");
    }

    #[test]
    fn half_space_delta_scaling_p_below_n() {
        // for p < N the relative capacity is asymptotically scale invariant
        let dom = gallery("half_space", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let policy = GridPolicy { max_counts: 257, ..GridPolicy::planar_default() };
        let prof = delta_profile(
            &dom,
            &y,
            1.5,
            &[0.25, 0.125],
            &policy,
            &SolverOptions::default(),
        )
        .unwrap();
        let (d0, d1) = (prof.entries[0].delta, prof.entries[1].delta);
        assert!((d0 - d1).abs() / d0.max(d1) < 0.1, "delta {d0} vs {d1}");
    }

    #[test]
    fn delta_profile_empty_complement_is_zero() {
        let dom = DomainSpec::new(2, "empty", vec![], |_| false);
        let y = BoundaryPoint::origin(2);
        let prof = delta_profile(
            &dom,
            &y,
            2.0,
            &[0.25, 0.125, 0.0625],
            &GridPolicy::planar_default(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(prof.entries.iter().all(|e| e.delta == 0.0));
    }

    #[test]
    fn point_delta_shrinks_under_refinement() {
        let dom = gallery("point", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let opts = SolverOptions::default();
        let mut prev = f64::INFINITY;
        for counts in [33usize, 65, 129] {
            let grid = grid_from_counts(2, &[0.0, 0.0], 2.0, counts).unwrap();
            let d = relative_capacity(&dom, &y, 0.25, 1.5, &grid, &opts).unwrap();
            assert!(d < prev, "delta did not shrink: {d} vs {prev}");
            prev = d;
        }
    }

    #[test]
    fn full_ball_profile_near_constant_p_below_n() {
        let dom = gallery("full_ball", 2).unwrap();
        let y = BoundaryPoint::origin(2);
        let policy = GridPolicy { max_counts: 257, ..GridPolicy::planar_default() };
        let prof = delta_profile(
            &dom,
            &y,
            1.5,
            &[0.25, 0.125, 0.0625],
            &policy,
            &SolverOptions::default(),
        )
        .unwrap();
        let vals: Vec<f64> = prof.entries.iter().map(|e| e.delta).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in &vals {
            assert!((v - mean).abs() / mean < 0.15, "profile {vals:?} not near-constant");
        }
    }
}
