//! Figure-data generation and one-off measure evaluation for the `nlmem`
//! binary.
//!
//! Every run is described by a flat [`RunConfig`]; each subcommand writes its
//! CSV output together with a manifest holding the full effective config,
//! which can be fed back through `--config` to regenerate identical files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use crate::blp::{self, LabeledPair, MeasureResult, SampledDynamics, StatePair, TimeGrid};
use crate::dephasing::{InteractionSchedule, PureState2Q};
use crate::error::Error;
use crate::multimode::OhmicCorrelatedFields;
use crate::photon::{self, PhotonGaussianEnv, PlateSchedule};
use crate::qlinalg::DensityMatrix;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ohmic,
    Photon,
}

impl ModelKind {
    fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ohmic => "ohmic",
            ModelKind::Photon => "photon",
        }
    }
}

/// Flat run configuration. Defaults reproduce the published figure settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub alpha: f64,
    pub omega_c: f64,
    pub c: f64,
    pub t1s: f64,
    pub t1f: f64,
    pub t2s: f64,
    pub t2f: f64,
    pub omega0: f64,
    pub c11: f64,
    pub k: f64,
    pub delta_n: f64,
    pub plate_time: f64,
    pub n_points: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub c_min: f64,
    pub c_max: f64,
    pub c_step: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    pub c_list: Vec<f64>,
    pub k_list: Vec<f64>,
    pub density_points: usize,
    pub density_halfwidth: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Ohmic,
            alpha: 1.0,
            omega_c: 1.0,
            c: -1.0,
            t1s: 0.0,
            t1f: 1.0,
            t2s: 1.0,
            t2f: 2.0,
            omega0: 1.0,
            c11: 1.0,
            k: -1.0,
            delta_n: 1.0,
            plate_time: 1.0,
            n_points: blp::DEFAULT_GRID_POINTS,
            n_samples: 1000,
            seed: 1,
            c_min: -1.0,
            c_max: 1.0,
            c_step: 0.1,
            k_min: -1.0,
            k_max: 1.0,
            k_step: 0.1,
            c_list: vec![-1.0, -0.5, 0.0],
            k_list: vec![-1.0, -0.5, 0.0],
            density_points: 81,
            density_halfwidth: 4.0,
        }
    }
}

/// Keys written into manifests that carry no configuration.
const META_KEYS: [&str; 3] = ["command", "artifact_version", "outputs"];

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => config_err(format!("{key}: expected a finite number, got {v:?}")),
    }
}

fn parse_usize(key: &str, v: &str) -> CliResult<usize> {
    v.trim()
        .parse::<usize>()
        .or_else(|_| config_err(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

fn parse_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    let items: Vec<f64> = v
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect::<CliResult<_>>()?;
    if items.is_empty() {
        return config_err(format!("{key}: empty list"));
    }
    Ok(items)
}

fn join_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "model" => {
                self.model = match value.trim() {
                    "ohmic" => ModelKind::Ohmic,
                    "photon" => ModelKind::Photon,
                    other => {
                        return config_err(format!("model: expected ohmic|photon, got {other:?}"))
                    }
                }
            }
            "alpha" => self.alpha = parse_f64(key, value)?,
            "omega_c" => self.omega_c = parse_f64(key, value)?,
            "c" => self.c = parse_f64(key, value)?,
            "t1s" => self.t1s = parse_f64(key, value)?,
            "t1f" => self.t1f = parse_f64(key, value)?,
            "t2s" => self.t2s = parse_f64(key, value)?,
            "t2f" => self.t2f = parse_f64(key, value)?,
            "omega0" => self.omega0 = parse_f64(key, value)?,
            "c11" => self.c11 = parse_f64(key, value)?,
            "k" => self.k = parse_f64(key, value)?,
            "delta_n" => self.delta_n = parse_f64(key, value)?,
            "plate_time" => self.plate_time = parse_f64(key, value)?,
            "n_points" => self.n_points = parse_usize(key, value)?,
            "n_samples" => self.n_samples = parse_usize(key, value)?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .or_else(|_| config_err(format!("seed: expected u64, got {value:?}")))?
            }
            "c_min" => self.c_min = parse_f64(key, value)?,
            "c_max" => self.c_max = parse_f64(key, value)?,
            "c_step" => self.c_step = parse_f64(key, value)?,
            "k_min" => self.k_min = parse_f64(key, value)?,
            "k_max" => self.k_max = parse_f64(key, value)?,
            "k_step" => self.k_step = parse_f64(key, value)?,
            "c_list" => self.c_list = parse_list(key, value)?,
            "k_list" => self.k_list = parse_list(key, value)?,
            "density_points" => self.density_points = parse_usize(key, value)?,
            "density_halfwidth" => self.density_halfwidth = parse_f64(key, value)?,
            k if META_KEYS.contains(&k) => {}
            other => return config_err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Apply `key=value`.
    pub fn apply_assignment(&mut self, assignment: &str) -> CliResult<()> {
        match assignment.split_once('=') {
            Some((k, v)) => self.set(k.trim(), v),
            None => config_err(format!("--set expects key=value, got {assignment:?}")),
        }
    }

    /// Apply a flat JSON object (numbers or strings as values).
    pub fn apply_json(&mut self, text: &str) -> CliResult<()> {
        let value: Value = serde_json::from_str(text)
            .or_else(|e| config_err(format!("config is not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return config_err("config must be a flat JSON object");
        };
        for (k, v) in &map {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return config_err(format!("{k}: expected number or string, got {other}")),
            };
            self.set(k, &text)?;
        }
        Ok(())
    }

    /// Flat key-value view; every value is a JSON string or number.
    pub fn to_flat_map(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut num = |k: &str, v: f64| {
            m.insert(k.into(), json!(v));
        };
        num("alpha", self.alpha);
        num("omega_c", self.omega_c);
        num("c", self.c);
        num("t1s", self.t1s);
        num("t1f", self.t1f);
        num("t2s", self.t2s);
        num("t2f", self.t2f);
        num("omega0", self.omega0);
        num("c11", self.c11);
        num("k", self.k);
        num("delta_n", self.delta_n);
        num("plate_time", self.plate_time);
        num("c_min", self.c_min);
        num("c_max", self.c_max);
        num("c_step", self.c_step);
        num("k_min", self.k_min);
        num("k_max", self.k_max);
        num("k_step", self.k_step);
        num("density_halfwidth", self.density_halfwidth);
        m.insert("model".into(), json!(self.model.as_str()));
        m.insert("n_points".into(), json!(self.n_points));
        m.insert("n_samples".into(), json!(self.n_samples));
        m.insert("seed".into(), json!(self.seed));
        m.insert("density_points".into(), json!(self.density_points));
        m.insert("c_list".into(), json!(join_list(&self.c_list)));
        m.insert("k_list".into(), json!(join_list(&self.k_list)));
        m
    }

    pub fn ohmic_env(&self, c: f64) -> CliResult<OhmicCorrelatedFields> {
        Ok(OhmicCorrelatedFields::new(self.alpha, self.omega_c, c)?)
    }

    pub fn schedule(&self) -> CliResult<InteractionSchedule> {
        Ok(InteractionSchedule::new(
            self.t1s, self.t1f, self.t2s, self.t2f,
        )?)
    }

    pub fn photon_env(&self, k: f64) -> CliResult<PhotonGaussianEnv> {
        Ok(PhotonGaussianEnv::new(
            self.omega0,
            self.c11,
            k,
            self.delta_n,
        )?)
    }

    pub fn plates(&self) -> CliResult<PlateSchedule> {
        Ok(PlateSchedule::new(0.0, self.plate_time)?)
    }
}

/// Inclusive sweep `min, min+step, …, max`, values rounded to 1e-12.
pub fn sweep(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0) || max < min {
        return config_err(format!("invalid sweep [{min}, {max}] step {step}"));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let v = ((min + i as f64 * step) * 1e12).round() / 1e12;
            if v == 0.0 {
                0.0
            } else {
                v
            }
        })
        .collect())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..SIG).contains(&exp) {
        trim(&format!("{:.*}", (SIG - 1 - exp) as usize, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_manifest(out: &Path, command: &str, cfg: &RunConfig, outputs: &[&str]) -> CliResult<()> {
    let mut m = cfg.to_flat_map();
    m.insert("command".into(), json!(command));
    m.insert("artifact_version".into(), json!(ARTIFACT_VERSION));
    m.insert("outputs".into(), json!(outputs.join(",")));
    let text = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable") + "\n";
    write_file(&out.join(format!("{command}_manifest.json")), &text)
}

fn prepare_out(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })
}

/// Measure over Bell candidates plus sampled pairs.
fn measure_sweep_point(dynamics: &SampledDynamics, cfg: &RunConfig) -> CliResult<MeasureResult> {
    Ok(blp::maximize_on(
        dynamics,
        cfg.n_samples,
        cfg.seed,
        &blp::bell_candidates(),
    )?)
}

fn measure_rows(csv: &mut Csv, param: f64, r: &MeasureResult, extra: Option<f64>) {
    let p = fmt_num(param);
    let tail: Vec<String> = extra.map(fmt_num).into_iter().collect();
    let mut push = |id: String, v: f64| {
        let mut cells = vec![p.clone(), id, fmt_num(v)];
        cells.extend(tail.iter().cloned());
        csv.row(&cells);
    };
    for (label, v) in &r.candidate_values {
        push(label.clone(), *v);
    }
    for (i, v) in r.per_pair_values.iter().enumerate() {
        push(format!("sample_{i}"), *v);
    }
    push("best".into(), r.n_value);
}

/// Measure-vs-correlation data for the multimode-field model.
pub fn cmd_fig1a(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let schedule = cfg.schedule()?;
    let grid = TimeGrid::over(&schedule, cfg.n_points)?;
    let cs = sweep(cfg.c_min, cfg.c_max, cfg.c_step)?;
    let envs = cs
        .iter()
        .map(|&c| cfg.ohmic_env(c))
        .collect::<CliResult<Vec<_>>>()?;
    let mut csv = Csv::new(&["c", "pair_id", "measure"]);
    for (c, env) in cs.iter().zip(&envs) {
        let dynamics = SampledDynamics::new(env, &schedule, grid)?;
        let r = measure_sweep_point(&dynamics, cfg)?;
        measure_rows(&mut csv, *c, &r, None);
    }
    prepare_out(out)?;
    let path = out.join("fig1a.csv");
    write_file(&path, &csv.text)?;
    write_manifest(out, "fig1a", cfg, &["fig1a.csv"])?;
    Ok(vec![path])
}

/// Measure-vs-K data for the photon model, with the closed-form measure.
pub fn cmd_fig1b(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let plates = cfg.plates()?;
    let grid = TimeGrid::over(plates.schedule(), cfg.n_points)?;
    let ks = sweep(cfg.k_min, cfg.k_max, cfg.k_step)?;
    let envs = ks
        .iter()
        .map(|&k| cfg.photon_env(k))
        .collect::<CliResult<Vec<_>>>()?;
    let mut csv = Csv::new(&["K", "pair_id", "measure", "analytic_measure"]);
    for (k, env) in ks.iter().zip(&envs) {
        let dynamics = SampledDynamics::new(env, plates.schedule(), grid)?;
        let r = measure_sweep_point(&dynamics, cfg)?;
        let analytic = photon::analytic_measure(env, plates.plate_time())?;
        measure_rows(&mut csv, *k, &r, Some(analytic));
    }
    prepare_out(out)?;
    let path = out.join("fig1b.csv");
    write_file(&path, &csv.text)?;
    write_manifest(out, "fig1b", cfg, &["fig1b.csv"])?;
    Ok(vec![path])
}

fn plus_minus_qubit() -> (DensityMatrix, DensityMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).expect("normalized");
    let minus = DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(-h, 0.0)]).expect("normalized");
    (plus, minus)
}

/// The Bell candidate with the largest measure (first on ties).
fn best_bell_trajectory(dynamics: &SampledDynamics) -> CliResult<blp::Trajectory> {
    let mut best: Option<(f64, blp::Trajectory)> = None;
    for cand in blp::bell_candidates() {
        let t = dynamics.trajectory(&cand.pair)?;
        let m = blp::measure_from_trajectory(&t);
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((m, t));
        }
    }
    Ok(best.expect("two candidates").1)
}

/// Global and local trace-distance trajectories for the multimode model.
pub fn cmd_fig2(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let schedule = cfg.schedule()?;
    let grid = TimeGrid::over(&schedule, cfg.n_points)?;
    let envs = cfg
        .c_list
        .iter()
        .map(|&c| cfg.ohmic_env(c))
        .collect::<CliResult<Vec<_>>>()?;

    let mut globals = Vec::new();
    for env in &envs {
        let dynamics = SampledDynamics::new(env, &schedule, grid)?;
        globals.push(best_bell_trajectory(&dynamics)?);
    }
    // Local dynamics do not depend on c.
    let local_dyn = SampledDynamics::new(&cfg.ohmic_env(0.0)?, &schedule, grid)?;
    let (plus, minus) = plus_minus_qubit();
    let local1 = local_dyn.local_trajectory(&plus, &minus, crate::qlinalg::Subsystem::First)?;
    let local2 = local_dyn.local_trajectory(&plus, &minus, crate::qlinalg::Subsystem::Second)?;

    let mut header = vec!["t".to_string()];
    header.extend(
        cfg.c_list
            .iter()
            .map(|&c| format!("D_global_c={}", fmt_num(c))),
    );
    header.push("D_local_1".into());
    header.push("D_local_2".into());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (j, &t) in local_dyn.times().iter().enumerate() {
        let mut cells = vec![fmt_num(t)];
        cells.extend(globals.iter().map(|g| fmt_num(g.values[j])));
        cells.push(fmt_num(local1.values[j]));
        cells.push(fmt_num(local2.values[j]));
        csv.row(&cells);
    }
    prepare_out(out)?;
    let path = out.join("fig2.csv");
    write_file(&path, &csv.text)?;
    write_manifest(out, "fig2", cfg, &["fig2.csv"])?;
    Ok(vec![path])
}

/// Frequency distributions and trace-distance trajectories for the photon
/// model at the configured `K` values.
pub fn cmd_fig3(cfg: &RunConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let plates = cfg.plates()?;
    let grid = TimeGrid::over(plates.schedule(), cfg.n_points)?;
    if cfg.density_points < 2 || !(cfg.density_halfwidth > 0.0) {
        return config_err("density_points must be >= 2 and density_halfwidth > 0");
    }
    let envs = cfg
        .k_list
        .iter()
        .map(|&k| cfg.photon_env(k))
        .collect::<CliResult<Vec<_>>>()?;

    let mut density = Csv::new(&["K", "kind", "omega1", "omega2", "value"]);
    let sigma = cfg.c11.sqrt();
    let mean = 0.5 * cfg.omega0;
    let n = cfg.density_points;
    let axis: Vec<f64> = (0..n)
        .map(|i| mean + cfg.density_halfwidth * sigma * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect();
    for env in &envs {
        let k = fmt_num(env.k_corr);
        if env.k_corr.abs() < 1.0 {
            for &w1 in &axis {
                for &w2 in &axis {
                    let p = photon::frequency_pdf(env, w1, w2)?;
                    density.row(&[
                        k.clone(),
                        "density".into(),
                        fmt_num(w1),
                        fmt_num(w2),
                        fmt_num(p),
                    ]);
                }
            }
        } else {
            // Line support; value is the marginal density of omega1 along it.
            for &w1 in &axis {
                let w2 = photon::degenerate_support(env, w1).expect("|K| = 1");
                let p = (-(w1 - mean).powi(2) / (2.0 * cfg.c11)).exp()
                    / (2.0 * std::f64::consts::PI * cfg.c11).sqrt();
                density.row(&[
                    k.clone(),
                    "line".into(),
                    fmt_num(w1),
                    fmt_num(w2),
                    fmt_num(p),
                ]);
            }
        }
    }

    let mut trajectories = Vec::new();
    for env in &envs {
        let dynamics = SampledDynamics::new(env, plates.schedule(), grid)?;
        trajectories.push(dynamics.trajectory(&env.maximizing_pair())?);
    }
    let times = blp::evaluation_times(&grid, plates.schedule());
    let mut header = vec!["t".to_string(), "t_scaled".to_string()];
    header.extend(cfg.k_list.iter().map(|&k| format!("D_K={}", fmt_num(k))));
    let mut traj_csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let unit = cfg.c11.sqrt() * cfg.delta_n.abs();
    for (j, &t) in times.iter().enumerate() {
        let mut cells = vec![fmt_num(t), fmt_num(t * unit)];
        cells.extend(trajectories.iter().map(|tr| fmt_num(tr.values[j])));
        traj_csv.row(&cells);
    }

    prepare_out(out)?;
    let p1 = out.join("fig3_density.csv");
    let p2 = out.join("fig3_trajectories.csv");
    write_file(&p1, &density.text)?;
    write_file(&p2, &traj_csv.text)?;
    write_manifest(
        out,
        "fig3",
        cfg,
        &["fig3_density.csv", "fig3_trajectories.csv"],
    )?;
    Ok(vec![p1, p2])
}

fn pair_json(pair: &StatePair) -> Value {
    let amps = |s: &PureState2Q| -> Value {
        Value::Array(s.amplitudes().iter().map(|z| json!([z.re, z.im])).collect())
    };
    json!({ "state_a": amps(&pair.0), "state_b": amps(&pair.1) })
}

/// One-off measure evaluation; returns the JSON document.
pub fn cmd_measure(cfg: &RunConfig) -> CliResult<Value> {
    let candidates: Vec<LabeledPair> = blp::bell_candidates();
    let (result, grid, analytic) = match cfg.model {
        ModelKind::Ohmic => {
            let env = cfg.ohmic_env(cfg.c)?;
            let schedule = cfg.schedule()?;
            let grid = TimeGrid::over(&schedule, cfg.n_points)?;
            let r =
                blp::maximize_measure(&env, &schedule, grid, cfg.n_samples, cfg.seed, &candidates)?;
            (r, grid, None)
        }
        ModelKind::Photon => {
            let env = cfg.photon_env(cfg.k)?;
            let plates = cfg.plates()?;
            let grid = TimeGrid::over(plates.schedule(), cfg.n_points)?;
            let r = blp::maximize_measure(
                &env,
                plates.schedule(),
                grid,
                cfg.n_samples,
                cfg.seed,
                &candidates,
            )?;
            (
                r,
                grid,
                Some(photon::analytic_measure(&env, plates.plate_time())?),
            )
        }
    };
    let mut doc = json!({
        "n_value": result.n_value,
        "best_label": result.best_label,
        "best_pair": pair_json(&result.best_pair),
        "parameters": Value::Object(cfg.to_flat_map()),
        "grid": { "t_start": grid.t_start, "t_end": grid.t_end, "n_points": grid.n_points },
        "seed": cfg.seed,
        "artifact_version": ARTIFACT_VERSION,
    });
    if let Some(a) = analytic {
        doc["analytic_measure"] = json!(a);
    }
    Ok(doc)
}

#[derive(Debug, Parser)]
#[command(
    name = "nlmem",
    version,
    about = "Nonlocal memory effects in two-qubit dephasing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat key-value JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// RNG seed for the sampled state pairs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Measure vs field correlation c (multimode model).
    Fig1a,
    /// Measure vs frequency correlation K (photon model).
    Fig1b,
    /// Trace-distance trajectories, multimode model.
    Fig2,
    /// Frequency distributions and trajectories, photon model.
    Fig3,
    /// Single measure evaluation printed as JSON.
    Measure,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fig1a => "fig1a",
            Command::Fig1b => "fig1b",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Measure => "measure",
        }
    }
}

/// Effective config: defaults, then `--config`, then `--set`, then `--seed`.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if cli.command.name() == "fig1b" || cli.command.name() == "fig3" {
        cfg.model = ModelKind::Photon;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply_json(&text)?;
    }
    for a in &cli.set {
        cfg.apply_assignment(a)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Run the CLI; `stdout` receives the measure JSON and the written paths.
pub fn run<I, T, W>(args: I, stdout: &mut W) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let io = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(stdout, "{e}").map_err(io)?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let cfg = resolve_config(&cli)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let written = match cli.command {
        Command::Fig1a => cmd_fig1a(&cfg, &out)?,
        Command::Fig1b => cmd_fig1b(&cfg, &out)?,
        Command::Fig2 => cmd_fig2(&cfg, &out)?,
        Command::Fig3 => cmd_fig3(&cfg, &out)?,
        Command::Measure => {
            let doc = cmd_measure(&cfg)?;
            let text = serde_json::to_string_pretty(&doc).expect("serializable");
            writeln!(stdout, "{text}").map_err(io)?;
            prepare_out(&out)?;
            write_file(&out.join("measure.json"), &(text + "\n"))?;
            write_manifest(&out, "measure", &cfg, &["measure.json"])?;
            return Ok(());
        }
    };
    for p in written {
        writeln!(stdout, "{}", p.display()).map_err(io)?;
    }
    Ok(())
}

/// Group CSV rows by their first column (used by tests and tooling).
pub fn rows_by_first_column(csv: &str) -> BTreeMap<String, Vec<Vec<String>>> {
    let mut map: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if let Some(first) = cells.first() {
            map.entry(first.clone()).or_default().push(cells);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.3934693402873666), "0.393469340287");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(2.0e15), "2e15");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(0.00001234), "0.00001234");
    }

    #[test]
    fn sweeps_hit_endpoints_exactly() {
        let s = sweep(-1.0, 1.0, 0.1).unwrap();
        assert_eq!(s.len(), 21);
        assert_eq!(s[0], -1.0);
        assert_eq!(s[10], 0.0);
        assert_eq!(s[20], 1.0);
        assert_eq!(s[3], -0.7);
        assert!(sweep(0.0, 1.0, 0.0).is_err());
        assert!(sweep(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn config_set_and_json() {
        let mut cfg = RunConfig::default();
        cfg.apply_assignment("alpha=0.5").unwrap();
        cfg.apply_assignment("model=photon").unwrap();
        cfg.apply_assignment("c_list=-1,0.5").unwrap();
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.model, ModelKind::Photon);
        assert_eq!(cfg.c_list, vec![-1.0, 0.5]);
        assert!(cfg.apply_assignment("nope=1").is_err());
        assert!(cfg.apply_assignment("alpha").is_err());
        assert!(cfg.apply_assignment("alpha=abc").is_err());
        cfg.apply_json(r#"{"c": -0.25, "seed": "9", "command": "fig1a"}"#)
            .unwrap();
        assert_eq!(cfg.c, -0.25);
        assert_eq!(cfg.seed, 9);
        assert!(cfg.apply_json("[1, 2]").is_err());
        assert!(cfg.apply_json(r#"{"c": [1]}"#).is_err());
    }

    #[test]
    fn flat_map_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.apply_assignment("k_list=-0.75,0.1").unwrap();
        cfg.apply_assignment("n_samples=17").unwrap();
        let text = serde_json::to_string(&Value::Object(cfg.to_flat_map())).unwrap();
        let mut back = RunConfig::default();
        back.apply_json(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(
            CliError::from(Error::InvalidCorrelation(2.0)).exit_code(),
            2
        );
        let e = Error::QuadratureNotConverged {
            error: 1.0,
            tolerance: 0.1,
        };
        assert_eq!(CliError::from(e).exit_code(), 3);
    }
}
