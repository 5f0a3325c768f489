//! Empirical inequality checkers: each operation evaluates the two sides of
//! one of the structural estimates on concrete grid functions and reports
//! the ratio, which is a lower bound on the corresponding constant.
//!
//! Discrete gradients use the same cell-centered stencil as the energy
//! minimizers, so the measured ratios are internally consistent with the
//! solved problems.

use crate::capacity::{relative_capacity, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, CutoffSpec, DomainSpec, Grid, GridFunction, NodeRole};

/// One measured inequality: `ratio = lhs / rhs` is the empirical constant.
#[derive(Clone, Debug, PartialEq)]
pub struct IneqReport {
    /// eq21 | eq23 | eq25 | eq33 | eq34 | cap_lb.
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Description of the test/cutoff function used.
    pub witness: String,
    /// Grid spacing the report was measured on.
    pub h: f64,
    /// Both sides vanished; ratio reported as 0.
    pub degenerate: bool,
    /// rhs vanished with lhs positive; the inequality is vacuous.
    pub infinite: bool,
}

impl IneqReport {
    fn new(name: &str, lhs: f64, rhs: f64, witness: String, h: f64) -> Self {
        let (ratio, degenerate, infinite) = if rhs == 0.0 && lhs == 0.0 {
            (0.0, true, false)
        } else if rhs == 0.0 {
            (f64::INFINITY, false, true)
        } else {
            (lhs / rhs, false, false)
        };
        IneqReport { name: name.into(), lhs, rhs, ratio, witness, h, degenerate, infinite }
    }

    pub fn csv_header() -> &'static str {
        "name,lhs,rhs,ratio,witness,h,flags"
    }

    pub fn to_csv_row(&self) -> String {
        let flags = if self.degenerate {
            "degenerate"
        } else if self.infinite {
            "infinite"
        } else {
            "ok"
        };
        format!(
            "{},{:.16e},{:.16e},{:.16e},{},{:.16e},{}",
            self.name, self.lhs, self.rhs, self.ratio, self.witness, self.h, flags
        )
    }
}

/// Per-cell means and gradient magnitudes of several node fields at once.
fn for_each_cell_data(
    grid: &Grid,
    fields: &[&[f64]],
    mut f: impl FnMut(usize, &[f64], &[f64]),
) {
    let dim = grid.dim;
    let nc = 1usize << dim;
    let offs = grid.corner_offsets();
    let inv_edge = 1.0 / ((nc / 2) as f64 * grid.h);
    let inv_nc = 1.0 / nc as f64;
    let mut means = vec![0.0; fields.len()];
    let mut grads = vec![0.0; fields.len()];
    grid.for_each_cell(|lin0, _| {
        for (k, field) in fields.iter().enumerate() {
            let mut mean = 0.0;
            let mut g2 = 0.0;
            for d in 0..dim {
                let mut acc = 0.0;
                for (c, off) in offs.iter().enumerate() {
                    let v = field[lin0 + off];
                    if d == 0 {
                        mean += v;
                    }
                    let s = if c >> (dim - 1 - d) & 1 == 1 { 1.0 } else { -1.0 };
                    acc += s * v;
                }
                let gd = acc * inv_edge;
                g2 += gd * gd;
            }
            means[k] = mean * inv_nc;
            grads[k] = g2.sqrt();
        }
        f(lin0, &means, &grads);
    });
}

fn node_dist2(grid: &Grid, lin: usize, y: &BoundaryPoint) -> f64 {
    let x = grid.coord_of(lin);
    (0..grid.dim).map(|d| (x[d] - y.coords[d]) * (x[d] - y.coords[d])).sum()
}

fn indicator_of_domain(domain: &DomainSpec, grid: &Grid) -> Vec<f64> {
    let mut chi = vec![0.0; grid.node_count()];
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        if domain.in_domain(&x[..grid.dim]) {
            chi[lin] = 1.0;
        }
    });
    chi
}

/// Caccioppoli ratio for a nonnegative function vanishing on the boundary:
/// lhs = sum h^N |grad(u + h_shift)|^p phi^p over domain cells, rhs = the
/// same with the roles of (u + h_shift) and phi exchanged. Reports the
/// largest ratio over the supplied cutoff family.
pub fn caccioppoli_ratio(
    u: &GridFunction,
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    p: f64,
    cutoffs: &[CutoffSpec],
    h_shift: f64,
) -> Result<IneqReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidArg(format!("p must exceed 1, got {p}")));
    }
    if cutoffs.is_empty() {
        return Err(Error::InvalidArg("at least one cutoff is required".into()));
    }
    if h_shift < 0.0 {
        return Err(Error::InvalidArg(format!("h_shift must be >= 0, got {h_shift}")));
    }
    let grid = &u.grid;
    let r2 = rho * rho;
    let mut negative = None;
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        if negative.is_none()
            && node_dist2(grid, lin, y) <= r2
            && domain.in_domain(&x[..grid.dim])
            && u.values[lin] < -1e-12
        {
            negative = Some(u.values[lin]);
        }
    });
    if let Some(v) = negative {
        return Err(Error::InvalidArg(format!(
            "u must be nonnegative on domain nodes in the ball, found {v}"
        )));
    }
    let chi = indicator_of_domain(domain, grid);
    let shifted: Vec<f64> = u.values.iter().map(|v| v + h_shift).collect();
    let cell_vol = grid.h.powi(grid.dim as i32);
    let mut best: Option<(f64, f64, f64, &CutoffSpec)> = None;
    for spec in cutoffs {
        let phi: Vec<f64> = {
            let mut v = vec![0.0; grid.node_count()];
            grid.for_each_node(|lin, idx| {
                let x = grid.coord(&idx[..grid.dim]);
                v[lin] = spec.value(&x[..grid.dim]);
            });
            v
        };
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for_each_cell_data(grid, &[&shifted, &phi, &chi], |_, means, grads| {
            let frac = means[2];
            if frac == 0.0 {
                return;
            }
            lhs += cell_vol * frac * grads[0].powf(p) * means[1].max(0.0).powf(p);
            rhs += cell_vol * frac * means[0].max(0.0).powf(p) * grads[1].powf(p);
        });
        let ratio = if rhs == 0.0 { if lhs == 0.0 { 0.0 } else { f64::INFINITY } } else { lhs / rhs };
        if best.as_ref().map(|b| ratio > b.0).unwrap_or(true) {
            best = Some((ratio, lhs, rhs, spec));
        }
    }
    let (_, lhs, rhs, spec) = best.unwrap();
    let name = if h_shift > 0.0 { "eq23" } else { "eq21" };
    let witness = format!("cutoff r={:.4} h_shift={h_shift}", spec.r);
    Ok(IneqReport::new(name, lhs, rhs, witness, grid.h))
}

/// Weak Harnack ratio: lhs = (node average of v^eps over B_rho)^(1/eps),
/// rhs = node minimum of v over B_rho.
pub fn weak_harnack_ratio(
    v: &GridFunction,
    y: &BoundaryPoint,
    rho: f64,
    eps: f64,
) -> Result<IneqReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArg(format!("eps must lie in (0,1], got {eps}")));
    }
    let grid = &v.grid;
    let r2 = rho * rho;
    let big_r2 = 4.0 * rho * rho;
    let mut negative = None;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut min_v = f64::INFINITY;
    grid.for_each_node(|lin, _| {
        if v.mask[lin] == NodeRole::Exterior {
            return;
        }
        let d2 = node_dist2(grid, lin, y);
        if d2 <= big_r2 && v.values[lin] < -1e-12 && negative.is_none() {
            negative = Some(v.values[lin]);
        }
        if d2 <= r2 {
            sum += v.values[lin].max(0.0).powf(eps);
            count += 1;
            min_v = min_v.min(v.values[lin].max(0.0));
        }
    });
    if let Some(bad) = negative {
        return Err(Error::InvalidArg(format!(
            "v must be nonnegative on the double ball, found {bad}"
        )));
    }
    if count == 0 {
        return Ok(IneqReport::new(
            "eq25",
            0.0,
            0.0,
            format!("empty ball rho={rho}"),
            grid.h,
        ));
    }
    let lhs = (sum / count as f64).powf(1.0 / eps);
    let rhs = min_v;
    Ok(IneqReport::new(
        "eq25",
        lhs,
        rhs,
        format!("node average, {count} nodes, eps={eps}"),
        grid.h,
    ))
}

/// Eq 3.3 both sides: lhs = node average of v^eps over B_{2 rho}; rhs =
/// ((sup u over the double ball minus sup over the ball) / (osc/4))^eps,
/// sups over domain nodes. ratio^(1/eps) estimates the constant.
pub fn eq33_check(
    u: &GridFunction,
    v: &GridFunction,
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    eps: f64,
) -> Result<IneqReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArg(format!("eps must lie in (0,1], got {eps}")));
    }
    let grid = &u.grid;
    let r2 = rho * rho;
    let big_r2 = 4.0 * rho * rho;
    let mut sup2 = f64::NEG_INFINITY;
    let mut inf2 = f64::INFINITY;
    let mut sup1 = f64::NEG_INFINITY;
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        if !domain.in_domain(&x[..grid.dim]) {
            return;
        }
        let d2 = node_dist2(grid, lin, y);
        if d2 <= big_r2 {
            sup2 = sup2.max(u.values[lin]);
            inf2 = inf2.min(u.values[lin]);
        }
        if d2 <= r2 {
            sup1 = sup1.max(u.values[lin]);
        }
    });
    let osc = if sup2 >= inf2 { sup2 - inf2 } else { 0.0 };
    let witness = format!("sup drop over rho={rho}, eps={eps}");
    if osc == 0.0 || !sup1.is_finite() {
        let mut rep = IneqReport::new("eq33", 0.0, 0.0, witness, grid.h);
        rep.degenerate = true;
        return Ok(rep);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    let vgrid = &v.grid;
    vgrid.for_each_node(|lin, _| {
        if v.mask[lin] == NodeRole::Exterior {
            return;
        }
        if node_dist2(vgrid, lin, y) <= big_r2 {
            sum += v.values[lin].max(0.0).powf(eps);
            count += 1;
        }
    });
    let lhs = if count > 0 { sum / count as f64 } else { 0.0 };
    let rhs = ((sup2 - sup1).max(0.0) / (0.25 * osc)).powf(eps);
    Ok(IneqReport::new("eq33", lhs, rhs, witness, grid.h))
}

/// Eq 3.4 both sides for a strictly positive v and cutoff zeta:
/// lhs = sum h^N v^(-q) |grad v|^p zeta^p, rhs = sum h^N v^(p-q) |grad zeta|^p.
pub fn eq34_check(
    v: &GridFunction,
    zeta: &CutoffSpec,
    p: f64,
    q: f64,
    p_0: f64,
) -> Result<IneqReport> {
    if !(p_0 <= q && q < p) {
        return Err(Error::InvalidArg(format!(
            "need p_0 <= q < p, got p_0={p_0}, q={q}, p={p}"
        )));
    }
    let grid = &v.grid;
    let mut nonpositive = None;
    grid.for_each_node(|lin, _| {
        if v.mask[lin] != NodeRole::Exterior && v.values[lin] <= 0.0 && nonpositive.is_none() {
            nonpositive = Some(v.values[lin]);
        }
    });
    if let Some(bad) = nonpositive {
        return Err(Error::InvalidArg(format!(
            "v must be strictly positive (found {bad}); apply a positive shift first"
        )));
    }
    let zvals: Vec<f64> = {
        let mut z = vec![0.0; grid.node_count()];
        grid.for_each_node(|lin, idx| {
            let x = grid.coord(&idx[..grid.dim]);
            z[lin] = zeta.value(&x[..grid.dim]);
        });
        z
    };
    let offs = grid.corner_offsets();
    let cell_vol = grid.h.powi(grid.dim as i32);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for_each_cell_data(grid, &[&v.values, &zvals], |lin0, means, grads| {
        // skip cells touching the exterior extension of v
        if offs.iter().any(|off| v.mask[lin0 + off] == NodeRole::Exterior) {
            return;
        }
        let vm = means[0];
        lhs += cell_vol * vm.powf(-q) * grads[0].powf(p) * means[1].max(0.0).powf(p);
        rhs += cell_vol * vm.powf(p - q) * grads[1].powf(p);
    });
    Ok(IneqReport::new(
        "eq34",
        lhs,
        rhs,
        format!("cutoff r={:.4} p={p} q={q}", zeta.r),
        grid.h,
    ))
}

/// Capacity lower bound of the decay step: lhs = p-capacity of the
/// complement in the closed rho-ball; rhs = rho^(-p) sum h^N v^eps over the
/// double ball.
pub fn capacity_lower_bound_check(
    v: &GridFunction,
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    p: f64,
    eps: f64,
    opts: &SolverOptions,
) -> Result<IneqReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArg(format!("eps must lie in (0,1], got {eps}")));
    }
    let n = domain.dim as f64;
    let delta = relative_capacity(domain, y, rho, p, &v.grid, opts)?;
    let lhs = delta * rho.powf(n - p);
    let grid = &v.grid;
    let big_r2 = 4.0 * rho * rho;
    let cell_vol = grid.h.powi(grid.dim as i32);
    let mut sum = 0.0;
    grid.for_each_node(|lin, _| {
        if v.mask[lin] != NodeRole::Exterior && node_dist2(grid, lin, y) <= big_r2 {
            sum += cell_vol * v.values[lin].max(0.0).powf(eps);
        }
    });
    let rhs = rho.powf(-p) * sum;
    Ok(IneqReport::new(
        "cap_lb",
        lhs,
        rhs,
        format!("delta rho={rho} p={p} eps={eps}"),
        grid.h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{estimate_capacity_with_potential, OuterBoundary};
    use crate::geometry::{gallery, grid_from_counts, rasterize_obstacle};

    fn free_domain(dim: usize) -> DomainSpec {
        DomainSpec::new(dim, "none", Vec::new(), |_: &[f64]| false)
    }

    fn ball_complement(dim: usize, r: f64) -> DomainSpec {
        DomainSpec::new(dim, "inner_ball", vec![r], move |x: &[f64]| {
            x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r + 1e-12
        })
    }

    /// 1 - capacitary potential of the inner ball: vanishes on the
    /// complement, positive in the domain.
    fn condenser_complement_potential(counts: usize) -> GridFunction {
        let grid = grid_from_counts(2, &[0.0; 3], 2.0, counts).unwrap();
        let domain = ball_complement(2, 0.25);
        let y = BoundaryPoint::origin(2);
        let k = rasterize_obstacle(&domain, &y, 0.26, &grid).unwrap();
        let opts = SolverOptions::default();
        let (_, pot) =
            estimate_capacity_with_potential(&k, 2.0, &grid, &opts, OuterBoundary::Ball(2.0), None)
                .unwrap();
        let mut u = pot;
        for (lin, v) in u.values.iter_mut().enumerate() {
            if u.mask[lin] != NodeRole::Exterior {
                *v = 1.0 - *v;
            }
        }
        for m in u.mask.iter_mut() {
            if m.is_fixed() {
                *m = NodeRole::Free;
            }
        }
        u
    }

    #[test]
    fn degenerate_caccioppoli_is_flagged() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let u = GridFunction::constant(&grid, 0.0);
        let rep = caccioppoli_ratio(
            &u,
            &free_domain(2),
            &BoundaryPoint::origin(2),
            0.5,
            2.0,
            &[CutoffSpec::at_origin(0.25)],
            0.0,
        )
        .unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.ratio, 0.0);
        assert_eq!(rep.name, "eq21");
    }

    #[test]
    fn caccioppoli_rejects_negative_u() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let u = GridFunction::from_fn(&grid, |x| x[0]);
        let err = caccioppoli_ratio(
            &u,
            &free_domain(2),
            &BoundaryPoint::origin(2),
            0.5,
            2.0,
            &[CutoffSpec::at_origin(0.25)],
            0.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn caccioppoli_finite_and_refinement_stable() {
        let domain = ball_complement(2, 0.25);
        let y = BoundaryPoint::origin(2);
        let cutoffs = [CutoffSpec::at_origin(0.25), CutoffSpec::at_origin(0.125)];
        let mut ratios = Vec::new();
        for counts in [33usize, 65] {
            let u = condenser_complement_potential(counts);
            let rep = caccioppoli_ratio(&u, &domain, &y, 0.5, 2.0, &cutoffs, 0.0).unwrap();
            assert!(rep.ratio.is_finite() && rep.ratio > 0.0, "ratio {}", rep.ratio);
            ratios.push(rep.ratio);
        }
        let q = ratios[1] / ratios[0];
        assert!(q > 0.5 && q < 2.0, "refinement instability: {ratios:?}");
    }

    #[test]
    fn h_shift_only_lowers_the_ratio() {
        let domain = ball_complement(2, 0.25);
        let y = BoundaryPoint::origin(2);
        let cutoffs = [CutoffSpec::at_origin(0.25)];
        let u = condenser_complement_potential(33);
        let base = caccioppoli_ratio(&u, &domain, &y, 0.5, 2.0, &cutoffs, 0.0).unwrap();
        for h_shift in [0.01, 0.1, 1.0] {
            let rep = caccioppoli_ratio(&u, &domain, &y, 0.5, 2.0, &cutoffs, h_shift).unwrap();
            assert_eq!(rep.name, "eq23");
            assert!(
                rep.ratio <= 1.1 * base.ratio,
                "h_shift {h_shift}: {} vs base {}",
                rep.ratio,
                base.ratio
            );
        }
    }

    #[test]
    fn harnack_of_constant_is_one() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let v = GridFunction::constant(&grid, 3.0);
        let rep = weak_harnack_ratio(&v, &BoundaryPoint::origin(2), 0.25, 0.5).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-12);
        assert!(!rep.infinite && !rep.degenerate);
    }

    #[test]
    fn harnack_flags_zero_touching_functions() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let v = GridFunction::from_fn(&grid, |x| x[0].abs());
        let rep = weak_harnack_ratio(&v, &BoundaryPoint::origin(2), 0.25, 0.5).unwrap();
        assert!(rep.infinite);
        assert!(rep.ratio.is_infinite());
    }

    #[test]
    fn eq33_matches_direct_evaluation() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 129).unwrap();
        let u = GridFunction::from_fn(&grid, |x| (x[0] * x[0] + x[1] * x[1]).sqrt());
        let v = GridFunction::constant(&grid, 0.5);
        let rep =
            eq33_check(&u, &v, &free_domain(2), &BoundaryPoint::origin(2), 0.25, 0.5).unwrap();
        // sup drop rho, osc 2 rho: rhs = 2^eps; lhs = 0.5^eps
        assert!((rep.ratio - 0.5).abs() < 0.05, "ratio {}", rep.ratio);
    }

    #[test]
    fn eq33_degenerate_for_constant_u() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let u = GridFunction::constant(&grid, 1.0);
        let v = GridFunction::constant(&grid, 1.0);
        let rep =
            eq33_check(&u, &v, &free_domain(2), &BoundaryPoint::origin(2), 0.25, 0.5).unwrap();
        assert!(rep.degenerate);
    }

    #[test]
    fn eq34_constant_v_gives_zero_ratio() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let v = GridFunction::constant(&grid, 2.0);
        let rep = eq34_check(&v, &CutoffSpec::at_origin(0.25), 2.0, 1.5, 1.2).unwrap();
        assert_eq!(rep.ratio, 0.0);
        assert!(!rep.degenerate);
    }

    #[test]
    fn eq34_guards() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 17).unwrap();
        let v = GridFunction::constant(&grid, 2.0);
        assert!(eq34_check(&v, &CutoffSpec::at_origin(0.25), 2.0, 2.0, 1.2).is_err());
        assert!(eq34_check(&v, &CutoffSpec::at_origin(0.25), 2.0, 1.0, 1.2).is_err());
        let bad = GridFunction::constant(&grid, 0.0);
        assert!(eq34_check(&bad, &CutoffSpec::at_origin(0.25), 2.0, 1.5, 1.2).is_err());
    }

    #[test]
    fn eq34_finite_on_positive_field() {
        let grid = grid_from_counts(2, &[0.0; 3], 1.0, 33).unwrap();
        let v = GridFunction::from_fn(&grid, |x| 0.1 + x[0] * x[0] + 0.5 * x[1] * x[1]);
        let rep = eq34_check(&v, &CutoffSpec::at_origin(0.25), 2.0, 1.6, 1.2).unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
    }

    #[test]
    fn capacity_bound_zero_for_empty_obstacle() {
        let grid = grid_from_counts(2, &[0.0; 3], 2.0, 33).unwrap();
        let v = GridFunction::constant(&grid, 1.0);
        let rep = capacity_lower_bound_check(
            &v,
            &free_domain(2),
            &BoundaryPoint::origin(2),
            0.25,
            2.0,
            0.5,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.ratio, 0.0);
        assert!(!rep.degenerate);
    }

    #[test]
    fn capacity_bound_finite_on_slit() {
        let domain = gallery("slit", 2).unwrap();
        let grid = grid_from_counts(2, &[0.0; 3], 2.0, 65).unwrap();
        let v = GridFunction::constant(&grid, 0.8);
        let rep = capacity_lower_bound_check(
            &v,
            &domain,
            &BoundaryPoint::origin(2),
            0.25,
            2.0,
            0.5,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(rep.ratio.is_finite() && rep.ratio > 0.0, "ratio {}", rep.ratio);
    }

    #[test]
    fn csv_row_format() {
        let rep = IneqReport::new("eq25", 1.0, 2.0, "test".into(), 0.125);
        assert_eq!(IneqReport::csv_header(), "name,lhs,rhs,ratio,witness,h,flags");
        let row = rep.to_csv_row();
        assert!(row.starts_with("eq25,"));
        assert!(row.ends_with(",ok"));
        assert_eq!(row.split(',').count(), 7);
    }
}
