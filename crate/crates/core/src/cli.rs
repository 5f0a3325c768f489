//! Batch command-line front end: parses a flat key/value configuration,
//! dispatches the pipelines, and writes deterministic CSV/JSON/SVG
//! artifacts with a provenance comment line in every CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::calibration::{calibrate, oscillation_recursion, CalibrationParams};
use crate::capacity::{
    estimate_capacity_extrapolated, delta_profile, GridPolicy, OuterBoundary, SolverOptions,
};
use crate::error::{Error, Result};
use crate::estimates::{
    caccioppoli_ratio, capacity_lower_bound_check, eq33_check, eq34_check, weak_harnack_ratio,
    IneqReport,
};
use crate::geometry::{
    gallery, grid_from_counts, BoundaryPoint, CutoffSpec, NodeRole,
};
use crate::solver::{
    grid_function_csv, grid_function_to_bytes, normalize_near_boundary, parse_datum,
    solve_p_laplace, DirichletProblem, NormalizeOutcome,
};
use crate::svg::{render_svg, PlotOptions, Series};
use crate::wiener::{
    classify_growth, wiener_integral, ziemer_integral, DeltaProfile, GrowthClass, WienerOptions,
    WienerReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Capacity,
    Delta,
    Wiener,
    Modulus,
    Solve,
    Verify,
    Gallery,
}

impl Command {
    fn parse(token: &str) -> Result<Self> {
        Ok(match token {
            "capacity" => Command::Capacity,
            "delta" => Command::Delta,
            "wiener" => Command::Wiener,
            "modulus" => Command::Modulus,
            "solve" => Command::Solve,
            "verify" => Command::Verify,
            "gallery" => Command::Gallery,
            other => {
                return Err(Error::Config(format!(
                    "unknown command `{other}` (expected capacity, delta, wiener, modulus, \
                     solve, verify, or gallery)"
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Command::Capacity => "capacity",
            Command::Delta => "delta",
            Command::Wiener => "wiener",
            Command::Modulus => "modulus",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Gallery => "gallery",
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "domain", "dim", "p", "eps", "rho", "radii", "grid", "levels", "tol", "max_iters", "gamma",
    "gamma_0", "datum", "out", "svg", "profile", "osc_0", "osc_g",
];

/// Parsed configuration: the command plus validated key/value pairs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    values: BTreeMap<String, String>,
}

fn check_key(key: &str) -> Result<()> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown key `{key}`")))
    }
}

fn parse_config_file(path: &str) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{path}:{}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        check_key(key)?;
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Parses `<command> [--key value]... [--config path]`; flags override file
/// values; unknown keys are rejected by name.
pub fn parse_config(args: &[String]) -> Result<RunConfig> {
    let mut it = args.iter();
    let command = Command::parse(
        it.next().ok_or_else(|| Error::Config("missing command".into()))?,
    )?;
    let mut file_values = BTreeMap::new();
    let mut flag_values: BTreeMap<String, String> = BTreeMap::new();
    let mut rest: Vec<&String> = it.collect();
    rest.reverse(); // pop from the front
    while let Some(tok) = rest.pop() {
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected a `--key`, got `{tok}`")))?;
        if key == "config" {
            let path = rest
                .pop()
                .ok_or_else(|| Error::Config("`--config` requires a path".into()))?;
            file_values = parse_config_file(path)?;
            continue;
        }
        if key == "svg" {
            // boolean flag; an explicit true/false value is also accepted
            let val = match rest.last() {
                Some(next) if !next.starts_with("--") => rest.pop().unwrap().clone(),
                _ => "true".to_string(),
            };
            flag_values.insert("svg".into(), val);
            continue;
        }
        check_key(key)?;
        let value = rest
            .pop()
            .ok_or_else(|| Error::Config(format!("flag `--{key}` requires a value")))?;
        flag_values.insert(key.to_string(), value.clone());
    }
    let mut values = file_values;
    values.extend(flag_values);
    Ok(RunConfig { command, values })
}

impl RunConfig {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("bad number `{s}` for key `{key}`"))),
        }
    }

    fn get_opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad number `{s}` for key `{key}`"))),
        }
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("bad integer `{s}` for key `{key}`"))),
        }
    }

    fn get_opt_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad integer `{s}` for key `{key}`"))),
        }
    }

    fn get_bool(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(s) => Err(Error::Config(format!("bad boolean `{s}` for key `{key}`"))),
        }
    }

    fn get_radii(&self, default: &[f64]) -> Result<Vec<f64>> {
        match self.get("radii") {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad radius `{tok}` in `radii`")))
                })
                .collect(),
        }
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn dim(&self) -> Result<usize> {
        let dim = self.get_usize("dim", 2)?;
        if dim == 2 || dim == 3 {
            Ok(dim)
        } else {
            Err(Error::Config(format!("dim must be 2 or 3, got {dim}")))
        }
    }

    fn solver_options(&self) -> Result<SolverOptions> {
        let mut opts = SolverOptions::default();
        if let Some(tol) = self.get_opt_f64("tol")? {
            opts.tol = tol;
        }
        if let Some(mi) = self.get_opt_usize("max_iters")? {
            opts.max_iters = mi;
        }
        Ok(opts)
    }

    fn policy(&self) -> Result<GridPolicy> {
        let mut policy = GridPolicy::for_dim(self.dim()?);
        if let Some(grid) = self.get_opt_usize("grid")? {
            policy.max_counts = grid;
        }
        if let Some(levels) = self.get_opt_usize("levels")? {
            policy.levels = levels.max(1);
        }
        Ok(policy)
    }

    fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or("out"))
    }

    /// Canonical flat form used for the provenance hash.
    fn canonical(&self) -> String {
        let mut s = format!("command={}", self.command.name());
        for (k, v) in &self.values {
            s.push_str(&format!(";{k}={v}"));
        }
        s
    }

    fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let mut hex = String::new();
        for b in digest.iter().take(6) {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    fn provenance(&self, extra: &[(&str, String)]) -> String {
        let mut line = format!(
            "# config_hash={} command={}",
            self.config_hash(),
            self.command.name()
        );
        for (k, v) in &self.values {
            line.push_str(&format!(" {k}={v}"));
        }
        for (k, v) in extra {
            line.push_str(&format!(" {k}={v}"));
        }
        line.push('\n');
        line
    }
}

/// Validates `WIENERGAUGE_THREADS` if set; computations are serial and
/// deterministic, so the value only caps hypothetical workers.
fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("WIENERGAUGE_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => {
            let n: usize = s.parse().map_err(|_| {
                Error::Config(format!("bad WIENERGAUGE_THREADS value `{s}`"))
            })?;
            if n == 0 {
                return Err(Error::Config("WIENERGAUGE_THREADS must be >= 1".into()));
            }
            Ok(Some(n))
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        Ok(Artifacts { dir, written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn discard(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Executes the configured command; on failure any partially written
/// artifacts are removed. Returns the artifact paths.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    thread_cap()?;
    let mut art = Artifacts::new(cfg.out_dir())?;
    let outcome = dispatch(cfg, &mut art);
    match outcome {
        Ok(()) => Ok(art.written),
        Err(e) => {
            art.discard();
            Err(e)
        }
    }
}

fn dispatch(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    match cfg.command {
        Command::Capacity => run_capacity(cfg, art),
        Command::Delta => run_delta(cfg, art),
        Command::Wiener => run_wiener(cfg, art),
        Command::Modulus => run_modulus(cfg, art),
        Command::Solve => run_solve(cfg, art),
        Command::Verify => run_verify(cfg, art),
        Command::Gallery => run_gallery(cfg, art),
    }
}

const DEFAULT_RADII: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];

fn run_capacity(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let dim = cfg.dim()?;
    let domain = gallery(cfg.require("domain")?, dim)?;
    let rho = cfg.get_f64("rho", 0.25)?;
    let p = cfg.get_f64("p", 2.0)?;
    let base = cfg.get_usize("grid", if dim == 2 { 129 } else { 49 })?;
    let levels = cfg.get_usize("levels", if dim == 2 { 2 } else { 1 })?;
    let mut counts = Vec::new();
    let mut c = base;
    for _ in 0..levels.max(1) {
        counts.push(c);
        c = 2 * c - 1;
    }
    let opts = cfg.solver_options()?;
    let y = BoundaryPoint::origin(dim);
    let res = estimate_capacity_extrapolated(
        &domain,
        &y,
        rho,
        p,
        &counts,
        2.0,
        &opts,
        OuterBoundary::Ball(2.0),
    )?;
    let extra = [("tol", format!("{:e}", opts.tol)), ("grids", format!("{counts:?}"))];
    let mut csv = cfg.provenance(&extra);
    csv.push_str("value,extrapolated,order,levels,iterations,residual\n");
    csv.push_str(&res.to_record());
    csv.push('\n');
    art.write("capacity.csv", csv.as_bytes())?;
    let json = serde_json::json!({
        "domain": domain.name,
        "p": p,
        "rho": rho,
        "value": res.value,
        "extrapolated": res.extrapolated,
        "order_estimate": res.order_estimate,
        "per_level": res.per_level,
        "iterations": res.iterations,
        "residual": res.residual,
    });
    art.write("capacity.json", json.to_string().as_bytes())?;
    Ok(())
}

fn computed_profile(cfg: &RunConfig) -> Result<DeltaProfile> {
    let dim = cfg.dim()?;
    let domain = gallery(cfg.require("domain")?, dim)?;
    let p = cfg.get_f64("p", 2.0)?;
    let radii = cfg.get_radii(&DEFAULT_RADII)?;
    let policy = cfg.policy()?;
    let opts = cfg.solver_options()?;
    delta_profile(&domain, &BoundaryPoint::origin(dim), p, &radii, &policy, &opts)
}

fn run_delta(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let profile = computed_profile(cfg)?;
    let mut csv = cfg.provenance(&[("entries", profile.entries.len().to_string())]);
    csv.push_str(&profile.to_csv());
    art.write("delta.csv", csv.as_bytes())?;
    if cfg.get_bool("svg")? {
        let series = vec![Series {
            label: format!("delta({})", profile.domain_label),
            points: profile.entries.iter().map(|e| (e.t, e.delta)).collect(),
        }];
        let opts = PlotOptions {
            title: "relative capacity profile".into(),
            log_x: true,
            ..Default::default()
        };
        art.write("delta.svg", render_svg(&series, &opts)?.as_bytes())?;
    }
    Ok(())
}

fn load_or_compute_profile(cfg: &RunConfig) -> Result<DeltaProfile> {
    match cfg.get("profile") {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let p = cfg.get_f64("p", 2.0)?;
            let label = cfg.get("domain").unwrap_or("file");
            DeltaProfile::parse_csv(&text, p, label)
        }
        None => computed_profile(cfg),
    }
}

fn run_wiener(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let profile = load_or_compute_profile(cfg)?;
    let eps = cfg.get_f64("eps", 0.5)?;
    let p = cfg.get_f64("p", 2.0)?;
    let rho = cfg.get_f64("rho", profile.t_min())?;
    let wopts = WienerOptions::default();
    let i = wiener_integral(&profile, eps, rho, &wopts)?;
    let ziemer = ziemer_integral(&profile, p, rho, &wopts)?;
    let ts: Vec<f64> = profile.entries.iter().map(|e| e.t).collect();
    let classify = if ts.len() >= 4 && ts[0] / ts[ts.len() - 1] >= 4.0 - 1e-9 {
        Some(classify_growth(&profile, eps, &ts, &wopts)?)
    } else {
        None
    };
    let (growth_class, fit_residual) = classify.unwrap_or((GrowthClass::Indeterminate, 0.0));
    let report = WienerReport { epsilon: eps, rho, i, ziemer, growth_class, fit_residual };
    let mut csv = cfg.provenance(&[("t_min", format!("{:e}", profile.t_min()))]);
    csv.push_str(WienerReport::csv_header());
    csv.push('\n');
    csv.push_str(&report.to_csv_row());
    csv.push('\n');
    art.write("wiener.csv", csv.as_bytes())?;
    art.write("wiener.json", serde_json::to_string(&report).unwrap().as_bytes())?;
    if cfg.get_bool("svg")? {
        let series = vec![Series {
            label: "delta^(1/eps)".into(),
            points: profile
                .entries
                .iter()
                .map(|e| (e.t, e.delta.max(wopts.delta_floor).powf(1.0 / eps)))
                .collect(),
        }];
        let opts =
            PlotOptions { title: "Wiener integrand".into(), log_x: true, ..Default::default() };
        art.write("wiener.svg", render_svg(&series, &opts)?.as_bytes())?;
    }
    Ok(())
}

fn run_modulus(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let profile = computed_profile(cfg)?;
    let p = cfg.get_f64("p", 2.0)?;
    let gamma_0 = cfg.get_f64("gamma_0", 1.0)?;
    let params = CalibrationParams {
        gamma_0,
        gamma: cfg.get_opt_f64("gamma")?,
        ..Default::default()
    };
    let cal = calibrate(p, &params)?;
    let eps = match cfg.get_opt_f64("eps")? {
        Some(e) => e,
        None => cal.eps_eff,
    };
    let osc_0 = cfg.get_f64("osc_0", 1.0)?;
    let osc_g = cfg.get_f64("osc_g", 0.0)?;
    let deltas: Vec<f64> = profile.entries.iter().map(|e| e.delta).collect();
    let rho_0 = profile.entries[0].t;
    let seq = oscillation_recursion(&deltas, cal.gamma, eps, osc_0, osc_g, rho_0)?;
    let extra = [("eps", format!("{eps:e}")), ("gamma", format!("{:e}", cal.gamma))];
    let mut csv = cfg.provenance(&extra);
    csv.push_str(&seq.to_csv());
    art.write("modulus.csv", csv.as_bytes())?;
    let mut block = cfg.provenance(&[]);
    block.push_str(&cal.to_string());
    art.write("calibration.txt", block.as_bytes())?;
    if cfg.get_bool("svg")? {
        let series = vec![
            Series {
                label: "osc_bound".into(),
                points: seq.entries.iter().map(|e| (e.rho, e.osc)).collect(),
            },
            Series {
                label: "eq18_bound".into(),
                points: seq.entries.iter().map(|e| (e.rho, e.eq18_bound)).collect(),
            },
        ];
        let opts =
            PlotOptions { title: "oscillation decay".into(), log_x: true, ..Default::default() };
        art.write("modulus.svg", render_svg(&series, &opts)?.as_bytes())?;
    }
    Ok(())
}

fn run_solve(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let dim = cfg.dim()?;
    let domain = gallery(cfg.require("domain")?, dim)?;
    let p = cfg.get_f64("p", 2.0)?;
    let g = parse_datum(cfg.get("datum").unwrap_or("zero"))?;
    let counts = cfg.get_usize("grid", if dim == 2 { 65 } else { 33 })?;
    let grid = grid_from_counts(dim, &[0.0; 3], 2.0, counts)?;
    let opts = cfg.solver_options()?;
    let prob = DirichletProblem { domain, g, p, grid, opts };
    let res = solve_p_laplace(&prob)?;
    let json = serde_json::json!({
        "domain": prob.domain.name,
        "p": p,
        "counts": counts,
        "h": res.u.grid.h,
        "energy": res.energy,
        "iterations": res.iterations,
        "residual": res.residual,
        "min": res.range.0,
        "max": res.range.1,
    });
    art.write("solve.json", json.to_string().as_bytes())?;
    art.write("u.bin", &grid_function_to_bytes(&res.u))?;
    if res.u.grid.node_count() <= 1 << 16 {
        let mut csv = cfg.provenance(&[("h", format!("{:e}", res.u.grid.h))]);
        csv.push_str(&grid_function_csv(&res.u));
        art.write("u.csv", csv.as_bytes())?;
    }
    Ok(())
}

fn run_verify(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let dim = cfg.dim()?;
    let domain = gallery(cfg.get("domain").unwrap_or("slit"), dim)?;
    let p = cfg.get_f64("p", 2.0)?;
    let rho = cfg.get_f64("rho", 0.25)?;
    let datum_token = format!("vee:{rho}");
    let g = parse_datum(cfg.get("datum").unwrap_or(&datum_token))?;
    let counts = cfg.get_usize("grid", 129)?;
    let grid = grid_from_counts(dim, &[0.0; 3], 2.0, counts)?;
    let opts = cfg.solver_options()?;
    let prob =
        DirichletProblem { domain: domain.clone(), g: g.clone(), p, grid, opts };
    let res = solve_p_laplace(&prob)?;
    let y = BoundaryPoint::origin(dim);
    let gamma_0 = cfg.get_f64("gamma_0", 1.0)?;
    let cal = calibrate(p, &CalibrationParams { gamma_0, ..Default::default() })?;
    let eps = match cfg.get_opt_f64("eps")? {
        Some(e) => e,
        None => cal.eps_eff,
    };
    let rho_n = 0.5 * rho;
    let mut reports: Vec<IneqReport> = Vec::new();
    let cutoffs = [CutoffSpec::at_origin(0.5 * rho_n), CutoffSpec::at_origin(0.25 * rho_n)];
    reports.push(caccioppoli_ratio(&res.u, &domain, &y, rho, p, &cutoffs, 0.0)?);
    reports.push(caccioppoli_ratio(&res.u, &domain, &y, rho, p, &cutoffs, 0.1)?);
    let mut short_circuit = None;
    match normalize_near_boundary(&res.u, &domain, &y, rho_n, &g)? {
        NormalizeOutcome::ShortCircuit { osc_bound } => short_circuit = Some(osc_bound),
        NormalizeOutcome::Pair(pair) => {
            let oriented = if pair.flipped {
                let mut u = res.u.clone();
                for v in u.values.iter_mut() {
                    *v = -*v;
                }
                u
            } else {
                res.u.clone()
            };
            reports.push(weak_harnack_ratio(&pair.v, &y, rho_n, eps)?);
            reports.push(eq33_check(&oriented, &pair.v, &domain, &y, rho_n, eps)?);
            let mut shifted = pair.v.clone();
            for (lin, v) in shifted.values.iter_mut().enumerate() {
                if shifted.mask[lin] != NodeRole::Exterior {
                    *v += 0.1;
                }
            }
            let q = p - cal.eps_cap;
            reports.push(eq34_check(&shifted, &CutoffSpec::at_origin(rho_n), p, q, cal.p_0)?);
            reports.push(capacity_lower_bound_check(
                &pair.v, &domain, &y, rho_n, p, eps, &prob.opts,
            )?);
        }
    }
    let extra = [
        ("eps", format!("{eps:e}")),
        ("short_circuit", short_circuit.map(|v| format!("{v:e}")).unwrap_or_default()),
    ];
    let mut csv = cfg.provenance(&extra);
    csv.push_str(IneqReport::csv_header());
    csv.push('\n');
    for r in &reports {
        csv.push_str(&r.to_csv_row());
        csv.push('\n');
    }
    art.write("verify.csv", csv.as_bytes())?;
    Ok(())
}

/// Fixed, reproducible gallery manifest: (domain token, p, eps).
const GALLERY_MANIFEST: &[(&str, f64, f64)] = &[
    ("full_ball", 2.0, 0.5),
    ("half_space", 1.5, 0.5),
    ("cone:0.7853981634", 2.0, 1.0),
    ("slit", 2.0, 0.5),
    ("point", 2.0, 1.0),
    ("square_minus_segment", 2.0, 0.5),
];

fn run_gallery(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let radii = cfg.get_radii(&DEFAULT_RADII)?;
    let mut policy = GridPolicy::planar_default();
    policy.max_counts = cfg.get_usize("grid", 257)?;
    if let Some(levels) = cfg.get_opt_usize("levels")? {
        policy.levels = levels.max(1);
    }
    let opts = cfg.solver_options()?;
    let wopts = WienerOptions::default();
    let y = BoundaryPoint::origin(2);
    let mut csv = cfg.provenance(&[("entries", GALLERY_MANIFEST.len().to_string())]);
    csv.push_str("domain,p,eps,rho_min,I,ziemer,growth_class\n");
    for (token, p, eps) in GALLERY_MANIFEST {
        let domain = gallery(token, 2)?;
        let profile = delta_profile(&domain, &y, *p, &radii, &policy, &opts)?;
        let rho = profile.t_min();
        let i = wiener_integral(&profile, *eps, rho, &wopts)?;
        let z = ziemer_integral(&profile, *p, rho, &wopts)?;
        let ts: Vec<f64> = profile.entries.iter().map(|e| e.t).collect();
        let growth = if ts.len() >= 4 && ts[0] / ts[ts.len() - 1] >= 4.0 - 1e-9 {
            classify_growth(&profile, *eps, &ts, &wopts)?.0
        } else {
            GrowthClass::Indeterminate
        };
        csv.push_str(&format!(
            "{token},{p},{eps},{rho:.16e},{i:.16e},{z:.16e},{growth}\n"
        ));
    }
    art.write("gallery.csv", csv.as_bytes())?;
    Ok(())
}

/// Library entry point used by the binary: parse, run, map errors to exit
/// codes (0 success, 1 numerical failure, 2 configuration error).
pub fn main_with_args(args: &[String]) -> i32 {
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&cfg) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
