//! Limited-memory quasi-Newton minimizer with monotone Armijo line search.
//!
//! Deterministic: no randomness, serial reductions only, so identical
//! inputs give bit-identical iterates.

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    /// Relative gradient-norm stopping tolerance.
    pub tol: f64,
    pub max_iters: usize,
    pub memory: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { tol: 1e-8, max_iters: 20_000, memory: 10 }
    }
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Final gradient norm relative to max(1, initial gradient norm).
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f(x, grad_out) -> value` starting from `x0`.
pub fn lbfgs<F>(mut f: F, x0: &[f64], opts: &MinimizeOptions) -> MinimizeOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    if n == 0 {
        return MinimizeOutcome { x, value: f(&[], &mut []), iterations: 0, residual: 0.0, converged: true };
    }
    let mut fx = f(&x, &mut g);
    let g0_norm = norm(&g);
    let gscale = g0_norm.max(1.0);
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut residual = g0_norm / gscale;
    let mut converged = residual <= opts.tol;

    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    while !converged && iterations < opts.max_iters {
        // two-loop recursion: dir = -H g
        dir.copy_from_slice(&g);
        let m = s_hist.len();
        let mut alpha = vec![0.0; m];
        for i in (0..m).rev() {
            alpha[i] = rho_hist[i] * dot(&s_hist[i], &dir);
            for (d, y) in dir.iter_mut().zip(y_hist[i].iter()) {
                *d -= alpha[i] * y;
            }
        }
        if m > 0 {
            let sy = 1.0 / rho_hist[m - 1];
            let yy = dot(&y_hist[m - 1], &y_hist[m - 1]);
            if yy > 0.0 {
                let gamma = sy / yy;
                for d in dir.iter_mut() {
                    *d *= gamma;
                }
            }
        }
        for i in 0..m {
            let beta = rho_hist[i] * dot(&y_hist[i], &dir);
            for (d, s) in dir.iter_mut().zip(s_hist[i].iter()) {
                *d += (alpha[i] - beta) * s;
            }
        }
        for d in dir.iter_mut() {
            *d = -*d;
        }
        let mut dg = dot(&dir, &g);
        if !(dg < 0.0) {
            // not a descent direction: reset to steepest descent
            for (d, gi) in dir.iter_mut().zip(g.iter()) {
                *d = -gi;
            }
            dg = -dot(&g, &g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Armijo backtracking
        let mut step = if m == 0 { (1.0 / norm(&dir)).min(1.0) } else { 1.0 };
        let c1 = 1e-4;
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            let f_new = f(&x_new, &mut g_new);
            if f_new <= fx + c1 * step * dg {
                accepted = Some(f_new);
                break;
            }
            step *= 0.5;
        }
        let f_new = match accepted {
            Some(v) => v,
            None => break, // stalled at numerical precision
        };
        debug_assert!(f_new <= fx + 1e-12 * (1.0 + fx.abs()));
        // history update
        let mut s = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if s_hist.len() == opts.memory {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
            rho_hist.push(1.0 / sy);
            s_hist.push(s);
            y_hist.push(y);
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        iterations += 1;
        residual = norm(&g) / gscale;
        converged = residual <= opts.tol;
    }
    MinimizeOutcome { x, value: fx, iterations, residual, converged }
}
