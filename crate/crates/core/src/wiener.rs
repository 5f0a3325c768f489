//! Wiener-type integrals of sampled relative-capacity profiles, and
//! classification of their growth as the lower limit shrinks.
//!
//! All quadrature happens in the log variable s = ln t: the integrand is
//! interpolated piecewise-linearly in s and integrated exactly, which makes
//! the rule exact for integrands constant in s.

use serde::Serialize;

use crate::error::{Error, Result};

/// Provenance of one profile sample.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridMeta {
    pub h: f64,
    pub counts: usize,
    pub levels: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeltaEntry {
    pub t: f64,
    pub delta: f64,
    pub grid_meta: GridMeta,
}

/// Sampled relative capacity t -> delta_y(t), strictly decreasing in t.
#[derive(Clone, Debug)]
pub struct DeltaProfile {
    pub entries: Vec<DeltaEntry>,
    pub p: f64,
    pub domain_label: String,
}

impl DeltaProfile {
    /// Builds a profile from bare (t, delta) pairs (descending t).
    pub fn from_pairs(pairs: &[(f64, f64)], p: f64, label: &str) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|&(t, delta)| DeltaEntry {
                t,
                delta,
                grid_meta: GridMeta { h: 0.0, counts: 0, levels: 0 },
            })
            .collect();
        let prof = DeltaProfile { entries, p, domain_label: label.to_string() };
        prof.validate()?;
        Ok(prof)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() < 2 {
            return Err(Error::InvalidArg(
                "profile too short: need at least 2 entries".into(),
            ));
        }
        for e in &self.entries {
            if !(e.t > 0.0 && e.t < 1.0) {
                return Err(Error::InvalidArg(format!("radius {} outside (0,1)", e.t)));
            }
            if !(e.delta >= 0.0) {
                return Err(Error::InvalidArg(format!("delta {} negative", e.delta)));
            }
        }
        for w in self.entries.windows(2) {
            if !(w[1].t < w[0].t) {
                return Err(Error::InvalidArg("radii must be strictly decreasing".into()));
            }
        }
        Ok(())
    }

    pub fn t_min(&self) -> f64 {
        self.entries.last().unwrap().t
    }

    /// CSV with header `t,delta`, descending t, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,delta\n");
        for e in &self.entries {
            out.push_str(&format!("{:.16e},{:.16e}\n", e.t, e.delta));
        }
        out
    }

    /// Parses the `t,delta` CSV form (comment lines starting with `#` are
    /// skipped).
    pub fn parse_csv(text: &str, p: f64, label: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("t,") {
                continue;
            }
            let mut it = line.split(',');
            let t: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::InvalidArg(format!("bad profile line `{line}`")))?;
            let d: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::InvalidArg(format!("bad profile line `{line}`")))?;
            pairs.push((t, d));
        }
        Self::from_pairs(&pairs, p, label)
    }
}

/// Options for integral evaluation.
#[derive(Clone, Copy, Debug)]
pub struct WienerOptions {
    /// Deltas at or below this are treated as exactly 0 before
    /// exponentiation, so solver noise is not amplified.
    pub delta_floor: f64,
    /// Allow constant extension of the profile below its smallest radius.
    /// Off by default: divergence claims must not rest on invented tails.
    pub allow_tail_extrapolation: bool,
}

impl Default for WienerOptions {
    fn default() -> Self {
        WienerOptions { delta_floor: 1e-10, allow_tail_extrapolation: false }
    }
}

/// Integrates the piecewise-linear interpolant (in s = ln t) of the sampled
/// integrand values `f` over [ln rho, 0]. The profile is extended as a
/// constant from its largest radius up to t = 1.
fn log_grid_integral(ts_desc: &[f64], f_desc: &[f64], rho: f64, allow_tail: bool) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidArg(format!("need 0 < rho <= 1, got {rho}")));
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    let n = ts_desc.len();
    // ascending in s
    let s: Vec<f64> = ts_desc.iter().rev().map(|t| t.ln()).collect();
    let fv: Vec<f64> = f_desc.iter().rev().copied().collect();
    let s_lo = rho.ln();
    if s_lo < s[0] - 1e-12 && !allow_tail {
        return Err(Error::InvalidArg(format!(
            "rho = {rho} below the profile range (min t = {}); \
             enable tail extrapolation to extend it",
            ts_desc[n - 1]
        )));
    }
    let interp = |x: f64| -> f64 {
        if x <= s[0] {
            return fv[0];
        }
        if x >= s[n - 1] {
            return fv[n - 1];
        }
        let j = s.partition_point(|v| *v <= x).min(n - 1);
        let (s0, s1) = (s[j - 1], s[j]);
        let w = (x - s0) / (s1 - s0);
        fv[j - 1] * (1.0 - w) + fv[j] * w
    };
    // breakpoints: s_lo, interior sample points, 0
    let mut brk = vec![s_lo];
    for &si in &s {
        if si > s_lo && si < 0.0 {
            brk.push(si);
        }
    }
    brk.push(0.0);
    let mut acc = 0.0;
    for w in brk.windows(2) {
        let (a, b) = (w[0], w[1]);
        acc += 0.5 * (interp(a) + interp(b)) * (b - a);
    }
    Ok(acc)
}

/// The Wiener integral: integral over (rho, 1) of delta(t)^(1/eps) dt/t.
pub fn wiener_integral(
    profile: &DeltaProfile,
    eps: f64,
    rho: f64,
    opts: &WienerOptions,
) -> Result<f64> {
    profile.validate()?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArg(format!("need eps in (0, 1], got {eps}")));
    }
    let ts: Vec<f64> = profile.entries.iter().map(|e| e.t).collect();
    let fv: Vec<f64> = profile
        .entries
        .iter()
        .map(|e| {
            if e.delta <= opts.delta_floor {
                0.0
            } else {
                e.delta.powf(1.0 / eps)
            }
        })
        .collect();
    log_grid_integral(&ts, &fv, rho, opts.allow_tail_extrapolation)
}

/// Ziemer's integral: integral over (rho, 1) of
/// exp(-delta(t)^(-1/(p-1))) dt/t, with the integrand taken as 0 (its
/// limit) where delta vanishes.
pub fn ziemer_integral(
    profile: &DeltaProfile,
    p: f64,
    rho: f64,
    opts: &WienerOptions,
) -> Result<f64> {
    profile.validate()?;
    if !(p > 1.0) {
        return Err(Error::InvalidArg(format!("need p > 1, got {p}")));
    }
    let ts: Vec<f64> = profile.entries.iter().map(|e| e.t).collect();
    let fv: Vec<f64> = profile
        .entries
        .iter()
        .map(|e| {
            if e.delta <= opts.delta_floor {
                0.0
            } else {
                (-e.delta.powf(-1.0 / (p - 1.0))).exp()
            }
        })
        .collect();
    log_grid_integral(&ts, &fv, rho, opts.allow_tail_extrapolation)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Bounded,
    Log,
    LogLog,
    Indeterminate,
}

impl std::fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GrowthClass::Bounded => "bounded",
            GrowthClass::Log => "log",
            GrowthClass::LogLog => "loglog",
            GrowthClass::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// Summary of one Wiener evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct WienerReport {
    pub epsilon: f64,
    pub rho: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub ziemer: f64,
    pub growth_class: GrowthClass,
    pub fit_residual: f64,
}

impl WienerReport {
    pub fn csv_header() -> &'static str {
        "epsilon,rho,I,ziemer,growth_class,fit_residual"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            self.epsilon, self.rho, self.i, self.ziemer, self.growth_class, self.fit_residual
        )
    }
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

/// Residual of the affine fit y ~ a + b phi, scaled by the spread of y so a
/// large constant offset in y cannot hide a poor shape match.
fn affine_fit_residual(phi: &[f64], y: &[f64], spread: f64) -> f64 {
    let n = phi.len() as f64;
    let mp = phi.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = phi.iter().map(|x| (x - mp) * (x - mp)).sum();
    let sxy: f64 = phi.iter().zip(y.iter()).map(|(x, v)| (x - mp) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mp;
    let res: Vec<f64> = phi
        .iter()
        .zip(y.iter())
        .map(|(x, v)| v - (a + b * x))
        .collect();
    rms(&res) / spread
}

/// Diagnoses the growth of I(rho) over a decreasing list of lower limits by
/// fitting against a constant, ln(1/rho), and ln ln(1/rho).
///
/// Bounded requires both that I varies by less than 5% over the last dyadic
/// decade and that the per-decade increments of I decay faster than the
/// harmonic rate that characterizes ln ln growth.
pub fn classify_growth(
    profile: &DeltaProfile,
    eps: f64,
    rho_list: &[f64],
    opts: &WienerOptions,
) -> Result<(GrowthClass, f64)> {
    if rho_list.len() < 4 {
        return Err(Error::InvalidArg(format!(
            "need at least 4 rho samples, got {}",
            rho_list.len()
        )));
    }
    for w in rho_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidArg("rho list must be strictly decreasing".into()));
        }
    }
    let span = rho_list[0] / rho_list[rho_list.len() - 1];
    if span < 4.0 - 1e-9 {
        return Err(Error::InvalidArg(format!(
            "rho samples must span at least 2 dyadic decades (ratio >= 4), got {span:.3}"
        )));
    }
    let i_vals: Vec<f64> = rho_list
        .iter()
        .map(|&rho| wiener_integral(profile, eps, rho, opts))
        .collect::<Result<_>>()?;
    if rms(&i_vals) == 0.0 {
        return Ok((GrowthClass::Bounded, 0.0));
    }
    let n = i_vals.len();
    let mean = i_vals.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = i_vals.iter().map(|v| v - mean).collect();
    let spread = rms(&centered);
    let r_const = spread / rms(&i_vals);

    // variation of I over the last dyadic decade of rho
    let rho_min = rho_list[n - 1];
    let tail: Vec<f64> = rho_list
        .iter()
        .zip(i_vals.iter())
        .filter(|(r, _)| **r <= 2.0 * rho_min + 1e-12)
        .map(|(_, v)| *v)
        .collect();
    let tail_variation = if tail.len() >= 2 {
        let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let m = tail.iter().sum::<f64>() / tail.len() as f64;
        if m == 0.0 {
            0.0
        } else {
            (hi - lo) / m.abs()
        }
    } else {
        f64::INFINITY
    };

    // increments weighted by ln(1/rho): constant for lnln growth, decaying
    // for a convergent integral
    let w_first = (i_vals[1] - i_vals[0]).abs() * (1.0 / rho_list[1]).ln();
    let w_last = (i_vals[n - 1] - i_vals[n - 2]).abs() * (1.0 / rho_list[n - 1]).ln();
    let increments_die = w_first > 0.0 && w_last < 0.5 * w_first;

    if tail_variation < 0.05 && (increments_die || r_const < 0.02) {
        return Ok((GrowthClass::Bounded, r_const));
    }

    let log_basis: Vec<f64> = rho_list.iter().map(|&r| (1.0 / r).ln()).collect();
    let loglog_basis: Vec<f64> =
        rho_list.iter().map(|&r| (1.0 / r).ln().max(1e-9).ln()).collect();
    let r_log = affine_fit_residual(&log_basis, &i_vals, spread);
    let r_loglog = affine_fit_residual(&loglog_basis, &i_vals, spread);
    let (class, residual) = if r_log <= r_loglog {
        (GrowthClass::Log, r_log)
    } else {
        (GrowthClass::LogLog, r_loglog)
    };
    if residual < 0.2 {
        Ok((class, residual))
    } else {
        Ok((GrowthClass::Indeterminate, residual))
    }
}
