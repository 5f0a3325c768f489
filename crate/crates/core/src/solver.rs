//! Dirichlet solves for the prototype p-energy, boundary oscillation
//! measurement, and the normalized pair (w, v) used by the decay argument.
//!
//! The Dirichlet datum is imposed by fixing every complement node (and the
//! outer box boundary) to g, which is the conforming discrete realization
//! of membership of u - g in the zero-trace class.

use std::sync::Arc;

use crate::capacity::{minimize_potential, SolverOptions};
use crate::energy::energy_and_grad;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, DomainSpec, Grid, GridFunction, NodeRole};

/// A boundary datum as a coordinate function.
pub type Datum = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Parses a datum token: `zero`, `one`, `coord:d`, `affine:c,a1,...,aN`,
/// or `vee:c` for g(x) = max(|x| - c, 0).
pub fn parse_datum(token: &str) -> Result<Datum> {
    let (name, arg) = match token.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (token, None),
    };
    let parse_f64 = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArg(format!("bad number `{s}` in datum `{token}`")))
    };
    match (name, arg) {
        ("zero", None) => Ok(Arc::new(|_: &[f64]| 0.0)),
        ("one", None) => Ok(Arc::new(|_: &[f64]| 1.0)),
        ("coord", Some(a)) => {
            let d: usize = a
                .parse()
                .map_err(|_| Error::InvalidArg(format!("bad axis `{a}` in datum `{token}`")))?;
            Ok(Arc::new(move |x: &[f64]| x.get(d).copied().unwrap_or(0.0)))
        }
        ("affine", Some(a)) => {
            let coefs: Vec<f64> = a.split(',').map(parse_f64).collect::<Result<_>>()?;
            if coefs.is_empty() {
                return Err(Error::InvalidArg(format!("empty coefficients in datum `{token}`")));
            }
            Ok(Arc::new(move |x: &[f64]| {
                coefs[0] + coefs[1..].iter().zip(x.iter()).map(|(c, xi)| c * xi).sum::<f64>()
            }))
        }
        ("vee", Some(a)) => {
            let c = parse_f64(a)?;
            Ok(Arc::new(move |x: &[f64]| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (r - c).max(0.0)
            }))
        }
        _ => Err(Error::InvalidArg(format!(
            "unknown datum `{token}` (expected zero, one, coord:d, affine:..., vee:c)"
        ))),
    }
}

/// The prototype Dirichlet problem on a rasterized domain.
#[derive(Clone)]
pub struct DirichletProblem {
    pub domain: DomainSpec,
    pub g: Datum,
    pub p: f64,
    pub grid: Grid,
    pub opts: SolverOptions,
}

impl std::fmt::Debug for DirichletProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletProblem")
            .field("domain", &self.domain)
            .field("p", &self.p)
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub u: GridFunction,
    /// Discrete p-Dirichlet energy of u (eps = 0).
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
    /// (min u, max u) over the grid.
    pub range: (f64, f64),
}

impl DirichletProblem {
    fn check(&self) -> Result<()> {
        let n = self.grid.dim as f64;
        if !(self.p > 1.0 && self.p <= n) {
            return Err(Error::InvalidArg(format!(
                "need p in (1, N], got p={}, N={}",
                self.p, self.grid.dim
            )));
        }
        self.opts.validate()
    }

    /// Builds the masked ansatz: complement and box-boundary nodes fixed to
    /// g, interior domain nodes free and warm-started from g.
    pub fn assemble(&self) -> Result<GridFunction> {
        self.check()?;
        let grid = &self.grid;
        let n = grid.node_count();
        if n == 0 {
            return Err(Error::InvalidArg("empty grid".into()));
        }
        let mut f = GridFunction {
            grid: grid.clone(),
            values: vec![0.0; n],
            mask: vec![NodeRole::Free; n],
        };
        let mut bad: Option<[f64; 3]> = None;
        grid.for_each_node(|lin, idx| {
            let x = grid.coord(&idx[..grid.dim]);
            let gv = (self.g)(&x[..grid.dim]);
            if !gv.is_finite() && bad.is_none() {
                bad = Some(x);
            }
            f.values[lin] = gv;
            if self.domain.in_complement(&x[..grid.dim]) || grid.on_box_boundary(&idx[..grid.dim])
            {
                f.mask[lin] = NodeRole::FixedDatum;
            }
        });
        if let Some(x) = bad {
            return Err(Error::InvalidArg(format!(
                "datum not finite at ({}, {}, {})",
                x[0], x[1], x[2]
            )));
        }
        Ok(f)
    }
}

/// Minimizes the p-Dirichlet energy over interior domain nodes with the
/// datum held fixed. An all-fixed grid returns the datum restriction.
pub fn solve_p_laplace(prob: &DirichletProblem) -> Result<SolveResult> {
    let mut f = prob.assemble()?;
    if f.mask.iter().all(|m| *m != NodeRole::Free) {
        let energy = energy_and_grad(&f.grid, prob.p, 0.0, &f.values, None);
        let range = f.range().unwrap_or((0.0, 0.0));
        return Ok(SolveResult { u: f, energy, iterations: 0, residual: 0.0, range });
    }
    let (energy, iterations, residual, converged) = minimize_potential(&mut f, prob.p, &prob.opts);
    if !converged {
        return Err(Error::NonConvergence {
            residual,
            iterations,
            tol: prob.opts.tol,
            best: Box::new(f),
        });
    }
    let range = f.range().unwrap_or((0.0, 0.0));
    Ok(SolveResult { u: f, energy, iterations, residual, range })
}

/// Node-wise max - min of u over domain nodes in each ball B_rho(y);
/// empty intersections give 0. Radii must be positive, decreasing, and the
/// largest ball must fit in the grid box.
pub fn measure_boundary_oscillation(
    u: &GridFunction,
    domain: &DomainSpec,
    y: &BoundaryPoint,
    radii: &[f64],
) -> Result<Vec<f64>> {
    if radii.is_empty() {
        return Err(Error::InvalidArg("empty radius list".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidArg("radii must be strictly decreasing".into()));
        }
    }
    let rmax = radii[0];
    if !(radii[radii.len() - 1] > 0.0) {
        return Err(Error::InvalidArg("radii must be positive".into()));
    }
    if !u.grid.contains_ball(&y.coords[..y.dim], rmax) {
        return Err(Error::InvalidArg(format!(
            "ball of radius {rmax} about the boundary point leaves the grid box"
        )));
    }
    let grid = &u.grid;
    let mut out = Vec::with_capacity(radii.len());
    for &rho in radii {
        let r2 = rho * rho;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        grid.for_each_node(|lin, idx| {
            let x = grid.coord(&idx[..grid.dim]);
            let d2: f64 =
                (0..grid.dim).map(|d| (x[d] - y.coords[d]) * (x[d] - y.coords[d])).sum();
            if d2 <= r2 && domain.in_domain(&x[..grid.dim]) {
                lo = lo.min(u.values[lin]);
                hi = hi.max(u.values[lin]);
            }
        });
        out.push(if hi >= lo { hi - lo } else { 0.0 });
    }
    Ok(out)
}

/// Complement nodes with a face neighbor inside the domain: the rasterized
/// boundary on which the datum oscillation is measured.
pub fn boundary_nodes(domain: &DomainSpec, grid: &Grid) -> Vec<usize> {
    let n = grid.node_count();
    let mut inside = vec![false; n];
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        inside[lin] = domain.in_domain(&x[..grid.dim]);
    });
    let mut out = Vec::new();
    grid.for_each_node(|lin, idx| {
        if inside[lin] {
            return;
        }
        for d in 0..grid.dim {
            for step in [-1isize, 1] {
                let j = idx[d] as isize + step;
                if j < 0 || j as usize >= grid.counts[d] {
                    continue;
                }
                let mut nb = *idx;
                nb[d] = j as usize;
                if inside[grid.index(&nb[..grid.dim])] {
                    out.push(lin);
                    return;
                }
            }
        }
    });
    out
}

/// Oscillation of the datum over rasterized boundary nodes in B_rho(y).
pub fn datum_oscillation(
    domain: &DomainSpec,
    grid: &Grid,
    g: &Datum,
    y: &BoundaryPoint,
    rho: f64,
) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for lin in boundary_nodes(domain, grid) {
        let x = grid.coord_of(lin);
        let d2: f64 = (0..grid.dim).map(|d| (x[d] - y.coords[d]) * (x[d] - y.coords[d])).sum();
        if d2 <= rho * rho {
            let gv = g(&x[..grid.dim]);
            lo = lo.min(gv);
            hi = hi.max(gv);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// The normalized truncation w and its complement v = 1 - w.
#[derive(Clone, Debug)]
pub struct NormalizedPair {
    /// In [0,1] on domain nodes, 0 on complement nodes inside the ball.
    pub w: GridFunction,
    /// 1 - w, so 1 on complement nodes inside the ball.
    pub v: GridFunction,
    /// The normalizing constant, one quarter of the oscillation of u.
    pub quarter_osc: f64,
    /// True when u and g were negated to reach the first dichotomy branch.
    pub flipped: bool,
}

/// Either the dichotomy short-circuit bound or the normalized pair.
#[derive(Clone, Debug)]
pub enum NormalizeOutcome {
    /// The oscillation of u is already bounded by twice the datum's.
    ShortCircuit { osc_bound: f64 },
    Pair(NormalizedPair),
}

/// Tests the two dichotomy inequalities over B_{2 rho}(y) and either short
/// circuits with 2 osc(g) or builds w = (u - (sup u - osc/4))_+ / (osc/4)
/// on domain nodes, extended by zero on the complement.
///
/// When only the infimum inequality holds, u and g are negated first; the
/// prototype energy is invariant under negation, so the two branches are
/// symmetric for the instances solved here.
pub fn normalize_near_boundary(
    u: &GridFunction,
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    g: &Datum,
) -> Result<NormalizeOutcome> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArg(format!("rho must be positive, got {rho}")));
    }
    let grid = &u.grid;
    if !grid.contains_ball(&y.coords[..y.dim], 2.0 * rho) {
        return Err(Error::InvalidArg(format!(
            "ball of radius {} about the boundary point leaves the grid box",
            2.0 * rho
        )));
    }
    let r2 = 4.0 * rho * rho;
    let dist2 = |x: &[f64; 3]| -> f64 {
        (0..grid.dim).map(|d| (x[d] - y.coords[d]) * (x[d] - y.coords[d])).sum()
    };
    let mut sup_u = f64::NEG_INFINITY;
    let mut inf_u = f64::INFINITY;
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        if dist2(&x) <= r2 && domain.in_domain(&x[..grid.dim]) {
            sup_u = sup_u.max(u.values[lin]);
            inf_u = inf_u.min(u.values[lin]);
        }
    });
    let osc_g = datum_oscillation(domain, grid, g, y, 2.0 * rho);
    if sup_u < inf_u || sup_u - inf_u == 0.0 {
        // empty or constant: degenerate, covered by the datum bound
        return Ok(NormalizeOutcome::ShortCircuit { osc_bound: 2.0 * osc_g });
    }
    let osc_u = sup_u - inf_u;
    let (mut sup_g, mut inf_g) = (f64::NEG_INFINITY, f64::INFINITY);
    for lin in boundary_nodes(domain, grid) {
        let x = grid.coord_of(lin);
        if dist2(&x) <= r2 {
            let gv = g(&x[..grid.dim]);
            sup_g = sup_g.max(gv);
            inf_g = inf_g.min(gv);
        }
    }
    let no_boundary = sup_g < inf_g;
    let first = no_boundary || sup_u - 0.25 * osc_u > sup_g;
    let second = !no_boundary && inf_u + 0.25 * osc_u < inf_g;
    let (flipped, sup_w) = if first {
        (false, sup_u)
    } else if second {
        // negate: sup(-u) = -inf u, and the inequality becomes the first
        (true, -inf_u)
    } else {
        return Ok(NormalizeOutcome::ShortCircuit { osc_bound: 2.0 * osc_g });
    };
    let quarter_osc = 0.25 * osc_u;
    let level = sup_w - quarter_osc;
    let n = grid.node_count();
    let mut w = GridFunction {
        grid: grid.clone(),
        values: vec![0.0; n],
        mask: vec![NodeRole::Exterior; n],
    };
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        if dist2(&x) > r2 {
            return;
        }
        w.mask[lin] = NodeRole::Free;
        if domain.in_domain(&x[..grid.dim]) {
            let uv = if flipped { -u.values[lin] } else { u.values[lin] };
            w.values[lin] = ((uv - level).max(0.0) / quarter_osc).min(1.0);
        }
    });
    let mut v = w.clone();
    for (lin, m) in v.mask.iter().enumerate() {
        if *m == NodeRole::Free {
            v.values[lin] = 1.0 - w.values[lin];
        }
    }
    Ok(NormalizeOutcome::Pair(NormalizedPair { w, v, quarter_osc, flipped }))
}

/// Dense binary layout: N, counts (u64 LE), origin, h, node values (f64 LE,
/// row major).
pub fn grid_function_to_bytes(f: &GridFunction) -> Vec<u8> {
    let grid = &f.grid;
    let mut out = Vec::with_capacity(8 * (2 * grid.dim + 2 + f.values.len()));
    out.extend_from_slice(&(grid.dim as u64).to_le_bytes());
    for d in 0..grid.dim {
        out.extend_from_slice(&(grid.counts[d] as u64).to_le_bytes());
    }
    for d in 0..grid.dim {
        out.extend_from_slice(&grid.origin[d].to_le_bytes());
    }
    out.extend_from_slice(&grid.h.to_le_bytes());
    for v in &f.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`grid_function_to_bytes`]; all nodes come back free.
pub fn grid_function_from_bytes(bytes: &[u8]) -> Result<GridFunction> {
    let bad = || Error::InvalidArg("truncated or malformed grid function data".into());
    let take8 = |off: usize| -> Result<[u8; 8]> {
        bytes.get(off..off + 8).and_then(|s| s.try_into().ok()).ok_or_else(bad)
    };
    let dim = u64::from_le_bytes(take8(0)?) as usize;
    if dim == 0 || dim > crate::geometry::MAX_DIM {
        return Err(bad());
    }
    let mut counts = [1usize; 3];
    let mut origin = [0.0f64; 3];
    let mut off = 8;
    for c in counts.iter_mut().take(dim) {
        *c = u64::from_le_bytes(take8(off)?) as usize;
        off += 8;
    }
    for o in origin.iter_mut().take(dim) {
        *o = f64::from_le_bytes(take8(off)?);
        off += 8;
    }
    let h = f64::from_le_bytes(take8(off)?);
    off += 8;
    if !(h > 0.0) || counts[..dim].iter().any(|c| *c < 2) {
        return Err(bad());
    }
    let grid = Grid { dim, origin, h, counts };
    let n = grid.node_count();
    if bytes.len() != off + 8 * n {
        return Err(bad());
    }
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(f64::from_le_bytes(take8(off + 8 * i)?));
    }
    Ok(GridFunction { grid, values, mask: vec![NodeRole::Free; n] })
}

/// CSV export `x1,...,xN,value`, one node per row.
pub fn grid_function_csv(f: &GridFunction) -> String {
    let grid = &f.grid;
    let mut out = String::new();
    for d in 0..grid.dim {
        out.push_str(&format!("x{},", d + 1));
    }
    out.push_str("value\n");
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        for xd in x.iter().take(grid.dim) {
            out.push_str(&format!("{xd:.16e},"));
        }
        out.push_str(&format!("{:.16e}\n", f.values[lin]));
    });
    out
}
