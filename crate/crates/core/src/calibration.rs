//! Constant calibration and the dyadic oscillation-decay recursion.
//!
//! `calibrate_sigma` resolves the auxiliary exponent sigma from the
//! smallness condition g(sigma) = 1/2, which fixes the threshold exponent
//! p_0 = (1 - sigma^2) p and the capacity exponent eps_cap = sigma^2 p.
//! `oscillation_recursion` then iterates the per-level decay factor
//! 1 - delta^(1/eps)/(4 gamma) over dyadic radii and compares the result
//! with the closed-form modulus bound gamma * max(osc_g, osc_0 * exp(-I)).

use crate::error::{Error, Result};

/// The full constant set threading the estimates together.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub p: f64,
    /// Caccioppoli constant.
    pub gamma_0: f64,
    /// De Giorgi-class constant.
    pub gamma_1: f64,
    /// Weak Harnack constant.
    pub c_harnack: f64,
    /// Weak Harnack exponent.
    pub eps_harnack: f64,
    /// Auxiliary exponent in (0,1).
    pub sigma: f64,
    /// Threshold exponent in (1,p).
    pub p_0: f64,
    /// eps_cap = p - p_0 = sigma^2 p.
    pub eps_cap: f64,
    /// Effective exponent min(eps_harnack, eps_cap).
    pub eps_eff: f64,
    /// Final modulus constant, > 1.
    pub gamma: f64,
    /// Quasi-minimum constant, >= 1.
    pub q: f64,
    /// Ellipticity ratio, >= 1.
    pub ratio_c1_c0: f64,
}

impl std::fmt::Display for Calibration {
    /// Flat `key = value` block.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "p = {:.16e}", self.p)?;
        writeln!(f, "gamma_0 = {:.16e}", self.gamma_0)?;
        writeln!(f, "gamma_1 = {:.16e}", self.gamma_1)?;
        writeln!(f, "C_harnack = {:.16e}", self.c_harnack)?;
        writeln!(f, "eps_harnack = {:.16e}", self.eps_harnack)?;
        writeln!(f, "sigma = {:.16e}", self.sigma)?;
        writeln!(f, "p_0 = {:.16e}", self.p_0)?;
        writeln!(f, "eps_cap = {:.16e}", self.eps_cap)?;
        writeln!(f, "eps_eff = {:.16e}", self.eps_eff)?;
        writeln!(f, "gamma = {:.16e}", self.gamma)?;
        writeln!(f, "Q = {:.16e}", self.q)?;
        writeln!(f, "ratio_C1_C0 = {:.16e}", self.ratio_c1_c0)
    }
}

/// User-supplied constants feeding [`calibrate`]; everything that the
/// structural hypotheses provide but the calibration itself cannot derive.
#[derive(Clone, Copy, Debug)]
pub struct CalibrationParams {
    pub gamma_0: f64,
    pub gamma_1: f64,
    pub c_harnack: f64,
    pub eps_harnack: f64,
    pub q: f64,
    pub ratio_c1_c0: f64,
    /// Final modulus constant; defaults to max(2, C_harnack).
    pub gamma: Option<f64>,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        CalibrationParams {
            gamma_0: 1.0,
            gamma_1: 1.0,
            c_harnack: 2.0,
            eps_harnack: 0.5,
            q: 1.0,
            ratio_c1_c0: 1.0,
            gamma: None,
        }
    }
}

/// The smallness condition with q = p_0 = (1 - sigma^2) p substituted in:
/// g(sigma) = gamma_0 sigma^(p-1) (1 + sigma - sigma^2) / (1 - sigma).
fn smallness(gamma_0: f64, p: f64, sigma: f64) -> f64 {
    gamma_0 * sigma.powf(p - 1.0) * (1.0 + sigma - sigma * sigma) / (1.0 - sigma)
}

/// Solves g(sigma) = 1/2 by bisection and returns (sigma, p_0, eps_cap).
///
/// g is continuous and strictly increasing on (0,1) with g(0+) = 0 and
/// g(1-) = infinity, so the root exists and is unique. Fails when the root
/// leaves p_0 = (1 - sigma^2) p outside (1, p).
pub fn calibrate_sigma(gamma_0: f64, p: f64) -> Result<(f64, f64, f64)> {
    if !(gamma_0 > 0.0) {
        return Err(Error::InvalidArg(format!("gamma_0 must be positive, got {gamma_0}")));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidArg(format!("p must exceed 1, got {p}")));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-15;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let v = smallness(gamma_0, p, mid);
        if (v - 0.5).abs() <= 1e-10 || hi - lo <= f64::EPSILON * mid {
            break;
        }
        if v < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = mid;
    let p_0 = (1.0 - sigma * sigma) * p;
    let eps_cap = sigma * sigma * p;
    if !(p_0 > 1.0) {
        return Err(Error::CalibrationFailed { gamma_0, p, p_0 });
    }
    Ok((sigma, p_0, eps_cap))
}

/// min of the two exponents; shrinking eps keeps every estimate valid.
pub fn effective_epsilon(eps_harnack: f64, eps_cap: f64) -> Result<f64> {
    for (name, v) in [("eps_harnack", eps_harnack), ("eps_cap", eps_cap)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidArg(format!("{name} must lie in (0,1), got {v}")));
        }
    }
    Ok(eps_harnack.min(eps_cap))
}

/// Derives the complete constant set for exponent `p`.
pub fn calibrate(p: f64, params: &CalibrationParams) -> Result<Calibration> {
    if !(params.q >= 1.0) {
        return Err(Error::InvalidArg(format!("Q must be >= 1, got {}", params.q)));
    }
    if !(params.ratio_c1_c0 >= 1.0) {
        return Err(Error::InvalidArg(format!(
            "ellipticity ratio must be >= 1, got {}",
            params.ratio_c1_c0
        )));
    }
    let (sigma, p_0, eps_cap) = calibrate_sigma(params.gamma_0, p)?;
    let eps_eff = effective_epsilon(params.eps_harnack, eps_cap.min(1.0 - 1e-12))?;
    let gamma = params.gamma.unwrap_or_else(|| params.c_harnack.max(2.0));
    if !(gamma > 1.0) {
        return Err(Error::InvalidArg(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(Calibration {
        p,
        gamma_0: params.gamma_0,
        gamma_1: params.gamma_1,
        c_harnack: params.c_harnack,
        eps_harnack: params.eps_harnack,
        sigma,
        p_0,
        eps_cap,
        eps_eff,
        gamma,
        q: params.q,
        ratio_c1_c0: params.ratio_c1_c0,
    })
}

/// The closed-form modulus bound: gamma * max(osc_g, osc_u_b1 * exp(-i)).
pub fn bound_1_8(osc_g: f64, osc_u_b1: f64, gamma: f64, i: f64) -> Result<f64> {
    if osc_g < 0.0 || osc_u_b1 < 0.0 || i < 0.0 {
        return Err(Error::InvalidArg("oscillations and I must be nonnegative".into()));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArg(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok(gamma * osc_g.max(osc_u_b1 * (-i).exp()))
}

/// One dyadic level of the oscillation recursion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusEntry {
    pub n: usize,
    pub rho: f64,
    /// delta at rho_n; NaN-free, >= 0.
    pub delta: f64,
    /// 1 - clamp(delta^(1/eps)/(4 gamma), 0, 1).
    pub factor: f64,
    /// Oscillation bound after n applications of the recursion.
    pub osc: f64,
    /// gamma * max(osc_g, osc_0 * exp(-I_n)) with I_n the left Riemann sum.
    pub eq18_bound: f64,
}

/// The recursion trace over dyadic radii rho_n = 2^(-n) rho_0.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusSequence {
    pub rho_0: f64,
    pub osc_g: f64,
    pub entries: Vec<ModulusEntry>,
}

impl ModulusSequence {
    pub fn csv_header() -> &'static str {
        "n,rho,delta,factor,osc_bound,eq18_bound"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                e.n, e.rho, e.delta, e.factor, e.osc, e.eq18_bound
            ));
        }
        out
    }
}

/// Iterates osc_{n+1} = max(2 osc_g, factor_n * osc_n) over the supplied
/// delta sequence, one entry per level starting at n = 0.
///
/// The 2 osc_g floor is the short-circuit branch of the dichotomy: once the
/// solution oscillates no more than twice the datum, the decay argument is
/// unnecessary. Entry n carries the bound after n applications, so the last
/// entry has seen every factor but its own.
pub fn oscillation_recursion(
    deltas: &[f64],
    gamma: f64,
    eps: f64,
    osc_0: f64,
    osc_g: f64,
    rho_0: f64,
) -> Result<ModulusSequence> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidArg(format!("gamma must exceed 1, got {gamma}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArg(format!("eps must lie in (0,1], got {eps}")));
    }
    if osc_0 < 0.0 || osc_g < 0.0 {
        return Err(Error::InvalidArg("oscillations must be nonnegative".into()));
    }
    if !(rho_0 > 0.0) {
        return Err(Error::InvalidArg(format!("rho_0 must be positive, got {rho_0}")));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0)) {
        return Err(Error::InvalidArg(format!("deltas must be nonnegative, got {d}")));
    }
    let mut entries = Vec::with_capacity(deltas.len());
    let mut osc = osc_0;
    let mut i_n = 0.0f64; // left Riemann sum of delta^(1/eps), ln 2 per level
    for (n, &delta) in deltas.iter().enumerate() {
        let decay = delta.powf(1.0 / eps);
        let factor = 1.0 - (decay / (4.0 * gamma)).clamp(0.0, 1.0);
        entries.push(ModulusEntry {
            n,
            rho: rho_0 * 0.5f64.powi(n as i32),
            delta,
            factor,
            osc,
            eq18_bound: gamma * osc_g.max(osc_0 * (-i_n).exp()),
        });
        osc = (2.0 * osc_g).max(factor * osc);
        i_n += decay * std::f64::consts::LN_2;
    }
    Ok(ModulusSequence { rho_0, osc_g, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_oracle_for_unit_constant() {
        let (sigma, p_0, eps_cap) = calibrate_sigma(1.0, 2.0).unwrap();
        assert!((smallness(1.0, 2.0, sigma) - 0.5).abs() <= 1e-10);
        assert!((sigma - 0.293).abs() < 5e-3, "sigma = {sigma}");
        assert!(eps_cap > 0.15 && eps_cap < 0.20, "eps_cap = {eps_cap}");
        assert!((p_0 + eps_cap - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_decreases_as_gamma_0_grows() {
        let mut prev = calibrate_sigma(0.5, 2.0).unwrap().0;
        for g in [1.0, 2.0, 4.0, 8.0, 1e3] {
            let s = calibrate_sigma(g, 2.0).unwrap().0;
            assert!(s < prev, "sigma not decreasing at gamma_0 = {g}");
            prev = s;
        }
        assert!(prev < 0.05, "sigma should vanish for large gamma_0, got {prev}");
    }

    #[test]
    fn sigma_is_bit_deterministic() {
        let a = calibrate_sigma(3.7, 2.4).unwrap();
        let b = calibrate_sigma(3.7, 2.4).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
    }

    #[test]
    fn small_gamma_0_reports_failure() {
        // a tiny Caccioppoli constant pushes sigma toward 1 and p_0 below 1
        let err = calibrate_sigma(1e-8, 1.1).unwrap_err();
        match err {
            Error::CalibrationFailed { p_0, .. } => assert!(p_0 <= 1.0),
            other => panic!("expected CalibrationFailed, got {other:?}"),
        }
    }

    #[test]
    fn effective_epsilon_is_min() {
        assert_eq!(effective_epsilon(0.3, 0.172).unwrap(), 0.172);
        assert_eq!(effective_epsilon(0.1, 0.172).unwrap(), 0.1);
        assert_eq!(effective_epsilon(0.25, 0.25).unwrap(), 0.25);
        assert!(effective_epsilon(0.0, 0.5).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(bound_1_8(0.3, 0.7, 2.0, 0.0).unwrap(), 1.4);
        let b = bound_1_8(0.1, 1.0, 2.0, 10f64.ln()).unwrap();
        assert!((b - 0.2).abs() < 1e-15);
        assert!(bound_1_8(0.0, 1.0, 2.0, 700.0).unwrap() < 1e-300);
    }

    #[test]
    fn constant_delta_closed_form() {
        let (gamma, eps, d0, osc_0) = (2.0, 0.5, 0.3, 1.0);
        let deltas = vec![d0; 65];
        let seq = oscillation_recursion(&deltas, gamma, eps, osc_0, 0.0, 1.0).unwrap();
        let f = 1.0 - d0.powf(1.0 / eps) / (4.0 * gamma);
        for e in &seq.entries {
            let exact = osc_0 * f.powi(e.n as i32);
            assert!((e.osc - exact).abs() <= 1e-12, "n = {}: {} vs {exact}", e.n, e.osc);
            let upper = osc_0 * (-(e.n as f64) * d0.powf(1.0 / eps) / (4.0 * gamma)).exp();
            assert!(e.osc <= upper + 1e-15, "exp bound fails at n = {}", e.n);
        }
    }

    #[test]
    fn zero_delta_keeps_oscillation() {
        let seq = oscillation_recursion(&[0.0; 8], 2.0, 0.5, 0.7, 0.0, 0.5).unwrap();
        assert!(seq.entries.iter().all(|e| e.osc == 0.7 && e.factor == 1.0));
    }

    #[test]
    fn product_bounded_by_exponential_each_level() {
        let deltas = [0.9, 0.1, 2.5, 0.4, 0.0, 1.3, 0.7, 0.05];
        let (gamma, eps) = (1.5, 0.8);
        let seq = oscillation_recursion(&deltas, gamma, eps, 1.0, 0.0, 1.0).unwrap();
        let mut prod = 1.0f64;
        let mut sum = 0.0f64;
        for e in &seq.entries {
            assert!(prod <= (-sum).exp() + 1e-15, "level {}", e.n);
            assert!((0.0..=1.0).contains(&e.factor));
            prod *= e.factor;
            sum += (e.delta.powf(1.0 / eps) / (4.0 * gamma)).clamp(0.0, 1.0);
        }
    }

    #[test]
    fn datum_floor_holds_and_sequence_monotone() {
        let seq =
            oscillation_recursion(&[0.5; 80], 2.0, 0.5, 1.0, 0.1, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        let mut floored = false;
        for e in &seq.entries {
            assert!(e.osc <= prev + 1e-15);
            assert!(e.osc >= 0.2 - 1e-15 || e.n == 0);
            if (e.osc - 0.2).abs() < 1e-12 {
                floored = true;
            }
            prev = e.osc;
        }
        assert!(floored, "recursion never reached the 2*osc_g floor");
    }

    #[test]
    fn eq18_bound_tracks_riemann_sum() {
        let deltas = [0.25, 0.25, 0.25, 0.25];
        let seq = oscillation_recursion(&deltas, 2.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        for e in &seq.entries {
            let i_n = 0.25 * std::f64::consts::LN_2 * e.n as f64;
            let expect = 2.0 * (-i_n).exp();
            assert!((e.eq18_bound - expect).abs() < 1e-14, "n = {}", e.n);
        }
    }

    #[test]
    fn calibration_block_and_defaults() {
        let cal = calibrate(2.0, &CalibrationParams::default()).unwrap();
        assert!(cal.sigma > 0.0 && cal.sigma < 1.0);
        assert!(cal.p_0 > 1.0 && cal.p_0 < cal.p);
        assert_eq!(cal.gamma, 2.0);
        assert_eq!(cal.eps_eff, cal.eps_harnack.min(cal.eps_cap));
        let block = cal.to_string();
        for key in [
            "gamma_0 = ", "sigma = ", "p_0 = ", "eps_cap = ", "eps_eff = ", "gamma = ",
            "Q = ", "ratio_C1_C0 = ",
        ] {
            assert!(block.contains(key), "missing `{key}` in block:\n{block}");
        }
    }

    #[test]
    fn modulus_csv_shape() {
        let seq = oscillation_recursion(&[0.3, 0.2], 2.0, 0.5, 1.0, 0.0, 0.5).unwrap();
        let csv = seq.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,rho,delta,factor,osc_bound,eq18_bound"));
        assert_eq!(lines.count(), 2);
        assert_eq!(seq.entries[1].rho, 0.25);
    }
}
