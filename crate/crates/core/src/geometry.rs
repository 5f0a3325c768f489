//! Uniform Cartesian grids, model domains, obstacle rasterization and
//! standard cutoff functions.
//!
//! Every computation in this crate lives on a box-shaped lattice centered at
//! the boundary point under study, which is always translated to the origin.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Default cap on the total node count of a single grid.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 25;

/// Role of a lattice node during an energy minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRole {
    /// Unknown, optimized over.
    Free,
    /// Clamped to 1 (obstacle plate).
    FixedOne,
    /// Clamped to 0 (outer plate).
    FixedZero,
    /// Clamped to a boundary-datum value stored in `values`.
    FixedDatum,
    /// Outside the computational region; value participates in cell sums
    /// but is never optimized and never enters node statistics.
    Exterior,
}

impl NodeRole {
    pub fn is_fixed(self) -> bool {
        !matches!(self, NodeRole::Free)
    }
}

/// A uniform lattice over a box in dimension 2 or 3.
///
/// Node coordinates are `origin + index * h`, computed the same way every
/// time so results are reproducible bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub origin: [f64; MAX_DIM],
    pub h: f64,
    /// Nodes per axis; axes beyond `dim` hold 1.
    pub counts: [usize; MAX_DIM],
}

impl Grid {
    pub fn node_count(&self) -> usize {
        self.counts[..self.dim].iter().product()
    }

    pub fn cell_count(&self) -> usize {
        self.counts[..self.dim].iter().map(|c| c - 1).product()
    }

    /// Linear index of the node with per-axis indices `idx`.
    pub fn index(&self, idx: &[usize]) -> usize {
        let mut lin = 0;
        for d in 0..self.dim {
            lin = lin * self.counts[d] + idx[d];
        }
        lin
    }

    /// Per-axis indices of linear index `lin`.
    pub fn multi_index(&self, mut lin: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for d in (0..self.dim).rev() {
            idx[d] = lin % self.counts[d];
            lin /= self.counts[d];
        }
        idx
    }

    /// Coordinate of the node with per-axis indices `idx`.
    pub fn coord(&self, idx: &[usize]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for d in 0..self.dim {
            x[d] = self.origin[d] + idx[d] as f64 * self.h;
        }
        x
    }

    pub fn coord_of(&self, lin: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(lin);
        self.coord(&idx)
    }

    /// True when the node lies on the boundary of the box.
    pub fn on_box_boundary(&self, idx: &[usize]) -> bool {
        (0..self.dim).any(|d| idx[d] == 0 || idx[d] + 1 == self.counts[d])
    }

    /// Upper corner of the box.
    pub fn max_corner(&self) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for d in 0..self.dim {
            x[d] = self.origin[d] + (self.counts[d] - 1) as f64 * self.h;
        }
        x
    }

    /// Whether the closed ball of radius `r` about `c` lies inside the box.
    pub fn contains_ball(&self, c: &[f64], r: f64) -> bool {
        let hi = self.max_corner();
        (0..self.dim).all(|d| c[d] - r >= self.origin[d] - 1e-12 && c[d] + r <= hi[d] + 1e-12)
    }

    /// Visits every node as (linear index, per-axis indices).
    pub fn for_each_node(&self, mut f: impl FnMut(usize, &[usize; MAX_DIM])) {
        let n = self.node_count();
        let mut idx = [0usize; MAX_DIM];
        for lin in 0..n {
            f(lin, &idx);
            for d in (0..self.dim).rev() {
                idx[d] += 1;
                if idx[d] < self.counts[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Linear-index offsets of the 2^dim corners of a cell relative to its
    /// low corner.
    pub fn corner_offsets(&self) -> Vec<usize> {
        let nc = 1usize << self.dim;
        let mut strides = [0usize; MAX_DIM];
        let mut s = 1;
        for d in (0..self.dim).rev() {
            strides[d] = s;
            s *= self.counts[d];
        }
        (0..nc)
            .map(|c| {
                (0..self.dim)
                    .filter(|d| c >> (self.dim - 1 - d) & 1 == 1)
                    .map(|d| strides[d])
                    .sum()
            })
            .collect()
    }

    /// Visits every cell as (low-corner linear index, low-corner per-axis
    /// indices).
    pub fn for_each_cell(&self, mut f: impl FnMut(usize, &[usize; MAX_DIM])) {
        let mut idx = [0usize; MAX_DIM];
        loop {
            f(self.index(&idx[..self.dim]), &idx);
            let mut d = self.dim;
            loop {
                if d == 0 {
                    return;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] + 1 < self.counts[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

/// Builds a grid covering the closed box of the given half-width about
/// `center`, with an odd node count per axis so the center is a node.
pub fn make_grid(dim: usize, center: &[f64], half_width: f64, h: f64) -> Result<Grid> {
    make_grid_with_budget(dim, center, half_width, h, DEFAULT_NODE_BUDGET)
}

pub fn make_grid_with_budget(
    dim: usize,
    center: &[f64],
    half_width: f64,
    h: f64,
    budget: usize,
) -> Result<Grid> {
    if !(dim == 2 || dim == 3) {
        return Err(Error::InvalidArg(format!("dimension must be 2 or 3, got {dim}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArg(format!("spacing must be positive, got {h}")));
    }
    if half_width < 2.0 * h {
        return Err(Error::InvalidArg(format!(
            "half_width {half_width} < 2h = {}",
            2.0 * h
        )));
    }
    let ratio = half_width / h;
    let rounded = ratio.round();
    let n_half = if (ratio - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        ratio.ceil() as usize
    };
    let per_axis = 2 * n_half + 1;
    let required = per_axis.pow(dim as u32);
    if required > budget {
        return Err(Error::BudgetExceeded { required, cap: budget });
    }
    let mut origin = [0.0; MAX_DIM];
    let mut counts = [1usize; MAX_DIM];
    for d in 0..dim {
        origin[d] = center[d] - n_half as f64 * h;
        counts[d] = per_axis;
    }
    Ok(Grid { dim, origin, h, counts })
}

/// Grid with a prescribed odd node count per axis.
pub fn grid_from_counts(dim: usize, center: &[f64], half_width: f64, counts: usize) -> Result<Grid> {
    if counts < 3 || counts % 2 == 0 {
        return Err(Error::InvalidArg(format!(
            "counts per axis must be odd and >= 3, got {counts}"
        )));
    }
    let h = 2.0 * half_width / (counts - 1) as f64;
    make_grid(dim, center, half_width, h)
}

/// Analytic description of the open set E through a membership predicate
/// for its complement.
#[derive(Clone)]
pub struct DomainSpec {
    pub dim: usize,
    pub name: String,
    pub params: Vec<f64>,
    predicate: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl DomainSpec {
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        params: Vec<f64>,
        predicate: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        DomainSpec {
            dim,
            name: name.into(),
            params,
            predicate: Arc::new(predicate),
        }
    }

    /// True when `x` belongs to the complement E^c.
    pub fn in_complement(&self, x: &[f64]) -> bool {
        (self.predicate)(&x[..self.dim])
    }

    /// True when `x` belongs to E.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        !self.in_complement(x)
    }
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

/// A point intended to lie on the boundary of a domain. By convention all
/// computations translate it to the origin first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub coords: [f64; MAX_DIM],
    pub dim: usize,
}

impl BoundaryPoint {
    pub fn origin(dim: usize) -> Self {
        BoundaryPoint { coords: [0.0; MAX_DIM], dim }
    }
}

/// Checks at resolution `h` that the complement predicate takes both values
/// within distance `r` of `y`, i.e. that `y` is a boundary point as far as
/// the grid can tell.
pub fn is_boundary_point(domain: &DomainSpec, y: &BoundaryPoint, h: f64, r: f64) -> bool {
    let steps = (r / h).ceil() as i64;
    let mut saw_in = false;
    let mut saw_out = false;
    let dim = domain.dim;
    let total = (2 * steps + 1).pow(dim as u32);
    for k in 0..total {
        let mut rem = k;
        let mut x = [0.0; MAX_DIM];
        for d in 0..dim {
            let side = 2 * steps + 1;
            let i = rem % side - steps;
            rem /= side;
            x[d] = y.coords[d] + i as f64 * h;
        }
        if domain.in_complement(&x[..dim]) {
            saw_in = true;
        } else {
            saw_out = true;
        }
        if saw_in && saw_out {
            return true;
        }
    }
    false
}

const GALLERY_NAMES: &str =
    "full_ball, half_space, cone(theta), slit, point, spine(c), square_minus_segment";

/// Returns a named model domain. Accepts tokens of the form `name` or
/// `name:param`, e.g. `cone:0.7853981634`.
pub fn gallery(token: &str, dim: usize) -> Result<DomainSpec> {
    if !(dim == 2 || dim == 3) {
        return Err(Error::InvalidArg(format!("dimension must be 2 or 3, got {dim}")));
    }
    let (name, param) = match token.split_once(':') {
        Some((n, p)) => {
            let v: f64 = p.parse().map_err(|_| {
                Error::InvalidArg(format!("malformed parameter `{p}` in gallery token `{token}`"))
            })?;
            (n, Some(v))
        }
        None => (token, None),
    };
    let spec = match name {
        "full_ball" => DomainSpec::new(dim, token, vec![], |_x| true),
        "half_space" => {
            let last = dim - 1;
            DomainSpec::new(dim, token, vec![], move |x| x[last] <= 0.0)
        }
        "cone" => {
            let theta = param.ok_or_else(|| {
                Error::InvalidArg("cone requires a half-aperture parameter, e.g. cone:0.5".into())
            })?;
            if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidArg(format!(
                    "cone half-aperture must be in (0, pi/2], got {theta}"
                )));
            }
            // Circular cone with vertex at the origin, axis along -x_N.
            let cos_t = theta.cos();
            let last = dim - 1;
            DomainSpec::new(dim, token, vec![theta], move |x| {
                let norm = x[..].iter().map(|v| v * v).sum::<f64>().sqrt();
                -x[last] >= cos_t * norm
            })
        }
        "slit" => {
            if dim != 2 {
                return Err(Error::InvalidArg("slit is a planar (N=2) domain".into()));
            }
            DomainSpec::new(dim, token, vec![], |x| {
                x[1].abs() <= 1e-12 && x[0] >= 0.0 && x[0] <= 1.0
            })
        }
        "point" => DomainSpec::new(dim, token, vec![], |x| {
            x.iter().all(|v| v.abs() <= 1e-12)
        }),
        "spine" => {
            if dim != 3 {
                return Err(Error::InvalidArg("spine is a spatial (N=3) domain".into()));
            }
            let c = param.unwrap_or(1.0);
            if !(c > 0.0) {
                return Err(Error::InvalidArg(format!(
                    "spine profile constant must be positive, got {c}"
                )));
            }
            // Exponentially sharp cusp along +x_1.
            DomainSpec::new(dim, token, vec![c], move |x| {
                let r = (x[1] * x[1] + x[2] * x[2]).sqrt();
                if x[0] > 0.0 {
                    r <= (-c / x[0]).exp()
                } else if x[0] == 0.0 {
                    r == 0.0
                } else {
                    false
                }
            })
        }
        "square_minus_segment" => {
            if dim != 2 {
                return Err(Error::InvalidArg(
                    "square_minus_segment is a planar (N=2) domain".into(),
                ));
            }
            // Bounded domain: the open square of half-width 1 with the slit
            // removed. Complement = exterior of the square plus the slit.
            DomainSpec::new(dim, token, vec![], |x| {
                let sup = x[0].abs().max(x[1].abs());
                sup >= 1.0 || (x[1].abs() <= 1e-12 && x[0] >= 0.0 && x[0] <= 1.0)
            })
        }
        other => {
            return Err(Error::UnknownGallery {
                name: other.to_string(),
                valid: GALLERY_NAMES.to_string(),
            })
        }
    };
    Ok(spec)
}

/// Rasterizes the obstacle K = E^c intersected with the closed ball of
/// radius `rho` about `y`: the sorted linear indices of the nodes whose
/// coordinates satisfy both conditions.
pub fn rasterize_obstacle(
    domain: &DomainSpec,
    y: &BoundaryPoint,
    rho: f64,
    grid: &Grid,
) -> Result<Vec<usize>> {
    if grid.node_count() == 0 {
        return Err(Error::InvalidArg("empty grid".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidArg(format!("radius must be positive, got {rho}")));
    }
    if !grid.contains_ball(&y.coords[..grid.dim], rho) {
        return Err(Error::InvalidArg(format!(
            "ball of radius {rho} about the boundary point is not inside the grid box"
        )));
    }
    let r2 = rho * rho;
    let mut out = Vec::new();
    grid.for_each_node(|lin, idx| {
        let x = grid.coord(&idx[..grid.dim]);
        let d2: f64 = (0..grid.dim)
            .map(|d| (x[d] - y.coords[d]) * (x[d] - y.coords[d]))
            .sum();
        if d2 <= r2 && domain.in_complement(&x[..grid.dim]) {
            out.push(lin);
        }
    });
    Ok(out)
}

/// Cutoff profile: 1 on the ball of radius `r` about `center`, linear ramp
/// to 0 at radius `2r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    pub center: [f64; MAX_DIM],
    pub r: f64,
}

impl CutoffSpec {
    pub fn at_origin(r: f64) -> Self {
        CutoffSpec { center: [0.0; MAX_DIM], r }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let d: f64 = x
            .iter()
            .zip(self.center.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        ((2.0 * self.r - d) / self.r).clamp(0.0, 1.0)
    }
}

/// Real values on a grid's nodes together with a per-node role mask.
#[derive(Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub mask: Vec<NodeRole>,
}

impl GridFunction {
    pub fn constant(grid: &Grid, v: f64) -> Self {
        let n = grid.node_count();
        GridFunction {
            grid: grid.clone(),
            values: vec![v; n],
            mask: vec![NodeRole::Free; n],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut g = GridFunction::constant(grid, 0.0);
        let gr = grid.clone();
        gr.for_each_node(|lin, idx| {
            let x = gr.coord(&idx[..gr.dim]);
            g.values[lin] = f(&x[..gr.dim]);
        });
        g
    }

    /// Multilinear interpolation at an arbitrary point inside the box.
    pub fn sample(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0f64; MAX_DIM];
        for d in 0..g.dim {
            let t = (x[d] - g.origin[d]) / g.h;
            let i = t.floor().clamp(0.0, (g.counts[d] - 2) as f64);
            base[d] = i as usize;
            frac[d] = (t - i).clamp(0.0, 1.0);
        }
        let offs = g.corner_offsets();
        let lin0 = g.index(&base[..g.dim]);
        let mut acc = 0.0;
        for (c, off) in offs.iter().enumerate() {
            let mut w = 1.0;
            for d in 0..g.dim {
                let bit = c >> (g.dim - 1 - d) & 1;
                w *= if bit == 1 { frac[d] } else { 1.0 - frac[d] };
            }
            acc += w * self.values[lin0 + off];
        }
        acc
    }

    /// Max and min over non-exterior nodes; `None` when there are none.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut r: Option<(f64, f64)> = None;
        for (v, m) in self.values.iter().zip(self.mask.iter()) {
            if *m != NodeRole::Exterior {
                r = Some(match r {
                    None => (*v, *v),
                    Some((lo, hi)) => (lo.min(*v), hi.max(*v)),
                });
            }
        }
        r
    }
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.range().unwrap_or((f64::NAN, f64::NAN));
        write!(
            f,
            "GridFunction {{ dim: {}, counts: {:?}, h: {}, range: [{lo:.6}, {hi:.6}] }}",
            self.grid.dim,
            &self.grid.counts[..self.grid.dim],
            self.grid.h
        )
    }
}

/// Builds the standard radial cutoff of `spec` on `grid`.
pub fn standard_cutoff(spec: &CutoffSpec, grid: &Grid) -> Result<GridFunction> {
    if spec.r < grid.h {
        return Err(Error::InvalidArg(format!(
            "cutoff unresolvable: inner radius {} below grid spacing {}",
            spec.r, grid.h
        )));
    }
    if !grid.contains_ball(&spec.center[..grid.dim], 2.0 * spec.r) {
        return Err(Error::InvalidArg(
            "cutoff support ball is not inside the grid box".into(),
        ));
    }
    Ok(GridFunction::from_fn(grid, |x| spec.value(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::cell_gradient_max;

    #[test]
    fn make_grid_small_2d() {
        let g = make_grid(2, &[0.0, 0.0], 1.0, 0.5).unwrap();
        assert_eq!(g.counts[..2], [5, 5]);
        let c = g.coord(&[2, 2]);
        assert_eq!(&c[..2], &[0.0, 0.0]);
    }

    #[test]
    fn make_grid_3d_counts() {
        let g = make_grid(3, &[0.0; 3], 1.0, 1.0 / 32.0).unwrap();
        assert_eq!(g.counts, [65, 65, 65]);
        assert_eq!(g.node_count(), 65 * 65 * 65);
    }

    #[test]
    fn make_grid_rejects_coarse_spacing() {
        let err = make_grid(2, &[0.0, 0.0], 1.0, 3.0).unwrap_err();
        assert!(matches!(err, Error::InvalidArg(_)));
    }

    #[test]
    fn make_grid_budget_refusal_reports_required() {
        let err = make_grid_with_budget(2, &[0.0, 0.0], 1.0, 1.0 / 512.0, 1000).unwrap_err();
        match err {
            Error::BudgetExceeded { required, cap } => {
                assert_eq!(required, 1025 * 1025);
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rasterize_full_and_empty() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 8.0).unwrap();
        let y = BoundaryPoint::origin(2);
        let all = gallery("full_ball", 2).unwrap();
        let k = rasterize_obstacle(&all, &y, 0.5, &grid).unwrap();
        let mut expect = 0;
        grid.for_each_node(|_, idx| {
            let x = grid.coord(&idx[..2]);
            if x[0] * x[0] + x[1] * x[1] <= 0.25 {
                expect += 1;
            }
        });
        assert_eq!(k.len(), expect);

        let none = DomainSpec::new(2, "empty", vec![], |_| false);
        let k = rasterize_obstacle(&none, &y, 0.5, &grid).unwrap();
        assert!(k.is_empty());
    }

    #[test]
    fn rasterize_half_space() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 8.0).unwrap();
        let y = BoundaryPoint::origin(2);
        let hs = gallery("half_space", 2).unwrap();
        let k = rasterize_obstacle(&hs, &y, 0.5, &grid).unwrap();
        for lin in &k {
            let x = grid.coord_of(*lin);
            assert!(x[1] <= 0.0);
            assert!(x[0] * x[0] + x[1] * x[1] <= 0.25 + 1e-12);
        }
        assert!(!k.is_empty());
    }

    #[test]
    fn rasterize_monotone_in_radius() {
        let grid = make_grid(2, &[0.0, 0.0], 2.0, 1.0 / 16.0).unwrap();
        let y = BoundaryPoint::origin(2);
        for token in ["half_space", "slit", "cone:0.5", "square_minus_segment"] {
            let dom = gallery(token, 2).unwrap();
            let mut prev: Option<Vec<usize>> = None;
            for k in [4u32, 3, 2, 1] {
                let rho = 2.0f64.powi(-(k as i32));
                let set = rasterize_obstacle(&dom, &y, rho, &grid).unwrap();
                if let Some(p) = &prev {
                    // previous (smaller) set must be contained in this one
                    let s: std::collections::HashSet<_> = set.iter().collect();
                    assert!(p.iter().all(|n| s.contains(n)), "{token} not monotone");
                }
                prev = Some(set);
            }
        }
    }

    #[test]
    fn rasterize_refinement_volume_consistent() {
        // Volume of the rasterized set changes at most proportionally to h
        // between one refinement and the next.
        let y = BoundaryPoint::origin(2);
        for token in ["full_ball", "half_space", "cone:0.5", "slit"] {
            let dom = gallery(token, 2).unwrap();
            let mut vols = Vec::new();
            for counts in [33usize, 65, 129] {
                let grid = grid_from_counts(2, &[0.0, 0.0], 1.0, counts).unwrap();
                let k = rasterize_obstacle(&dom, &y, 0.5, &grid).unwrap();
                vols.push((grid.h, k.len() as f64 * grid.h * grid.h));
            }
            for w in vols.windows(2) {
                let (h, v0) = w[0];
                let (_, v1) = w[1];
                assert!(
                    (v0 - v1).abs() <= 8.0 * h,
                    "{token}: volume jump {} at h={}",
                    (v0 - v1).abs(),
                    h
                );
            }
        }
    }

    #[test]
    fn cutoff_profile_and_gradient_bound() {
        let grid = make_grid(2, &[0.0, 0.0], 2.0, 1.0 / 32.0).unwrap();
        let spec = CutoffSpec::at_origin(0.5);
        let phi = standard_cutoff(&spec, &grid).unwrap();
        // 1 at the center, 0 outside 2r, values in [0,1]
        let center = grid.index(&[64, 64]);
        assert_eq!(phi.values[center], 1.0);
        grid.for_each_node(|lin, idx| {
            let x = grid.coord(&idx[..2]);
            let d = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let v = phi.values[lin];
            assert!((0.0..=1.0).contains(&v));
            if d >= 1.0 {
                assert_eq!(v, 0.0);
            }
            if d <= 0.5 {
                assert_eq!(v, 1.0);
            }
        });
        // discrete gradient bound, checked exhaustively over all cells
        let bound = 1.0 / spec.r + 2.0 * grid.h / (spec.r * spec.r);
        let max_grad = cell_gradient_max(&phi);
        assert!(max_grad <= bound, "max |grad phi| = {max_grad} > {bound}");
    }

    #[test]
    fn cutoff_radially_symmetric() {
        let grid = make_grid(2, &[0.0, 0.0], 2.0, 1.0 / 8.0).unwrap();
        let phi = standard_cutoff(&CutoffSpec::at_origin(0.5), &grid).unwrap();
        use std::collections::HashMap;
        let mut by_radius: HashMap<u64, f64> = HashMap::new();
        grid.for_each_node(|lin, idx| {
            let x = grid.coord(&idx[..2]);
            let d2 = x[0] * x[0] + x[1] * x[1];
            let key = d2.to_bits();
            let v = phi.values[lin];
            if let Some(prev) = by_radius.insert(key, v) {
                assert_eq!(prev, v);
            }
        });
    }

    #[test]
    fn cutoff_unresolvable_errors() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 4.0).unwrap();
        assert!(standard_cutoff(&CutoffSpec::at_origin(0.1), &grid).is_err());
    }

    #[test]
    fn gallery_half_space_matches_right_angle_cone() {
        let hs = gallery("half_space", 2).unwrap();
        let cone = gallery(&format!("cone:{}", std::f64::consts::FRAC_PI_2), 2).unwrap();
        for x in [[0.3, -0.2], [0.3, 0.2], [-0.5, 0.0], [0.0, 0.4], [0.1, -1e-9]] {
            assert_eq!(hs.in_complement(&x), cone.in_complement(&x), "at {x:?}");
        }
    }

    #[test]
    fn gallery_point_is_singleton() {
        let grid = make_grid(2, &[0.0, 0.0], 1.0, 1.0 / 8.0).unwrap();
        let y = BoundaryPoint::origin(2);
        let dom = gallery("point", 2).unwrap();
        for rho in [0.25, 0.5] {
            let k = rasterize_obstacle(&dom, &y, rho, &grid).unwrap();
            assert_eq!(k.len(), 1);
            let x = grid.coord_of(k[0]);
            assert_eq!(&x[..2], &[0.0, 0.0]);
        }
    }

    #[test]
    fn gallery_unknown_name_lists_valid() {
        let err = gallery("torus", 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("torus"));
        assert!(msg.contains("full_ball"));
    }

    #[test]
    fn boundary_point_detection() {
        let dom = gallery("half_space", 2).unwrap();
        assert!(is_boundary_point(&dom, &BoundaryPoint::origin(2), 1.0 / 16.0, 0.1));
        let mut interior = BoundaryPoint::origin(2);
        interior.coords[1] = 0.5;
        assert!(!is_boundary_point(&dom, &interior, 1.0 / 16.0, 0.1));
    }
}
