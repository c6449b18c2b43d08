//! Batch scenarios: TOML configuration, validation and the tabular outputs
//! behind the command-line front-end.
//!
//! Every run function is pure in (config, seed) and returns the files it
//! would write as [`Artifact`]s, so output bytes can be compared directly.
//! Numbers are printed with 12 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channels::{photonic_channel, relabelled_photonic_channel, PhotonEnvParams};
use crate::correlations::{
    asymptotic_values, chsh_bell, chsh_max, chsh_optimize_numeric, classify_region, coeffs_at,
    concurrence_bell, concurrence_general, entanglement_sudden_death_time,
    nonlocality_sudden_death_time, OptimizerConfig,
};
use crate::error::Error;
use crate::experiment::{
    chsh_angle_scan, optimal_angles, simulate_counts, statistical_error_mc, tomography_reconstruct,
    write_counts_csv, ChshAngles, Plate, TomographyScheme, WaveplateSetting,
};
use crate::rng::derive_seed;
use crate::state::{bell_mixture, correlation_matrix, BellCoeffs, DensityMatrix};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numeric(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        ScenarioError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// non-convergence, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config { .. } => 2,
            ScenarioError::Numeric(Error::NotConverged { .. }) => 3,
            ScenarioError::Numeric(_) | ScenarioError::Io(_) => 1,
        }
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::Numeric(e)
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    fn new(file_name: impl Into<String>, contents: String) -> Self {
        Self {
            file_name: file_name.into(),
            contents,
        }
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.file_name), &a.contents)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_version")]
    pub format_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub state: StateConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub analyses: Analyses,
    pub tomography: Option<TomographyConfig>,
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub optimizer: Option<OptimizerConfig>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub coeffs: Option<[f64; 3]>,
    pub weights: Option<MixtureWeights>,
    /// Sweep-variable value at which scan, tomo and chsh evaluate the state.
    #[serde(default)]
    pub evolve_to: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureWeights {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub psi_plus: f64,
    pub psi_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    Global {
        #[serde(default = "one")]
        gamma_rate: f64,
    },
    Photonic {
        #[serde(default)]
        omega0: f64,
        c11: f64,
        k_corr: f64,
        #[serde(default = "one")]
        delta_n: f64,
        #[serde(default = "yes")]
        compensate_phase: bool,
    },
    PhotonicRelabelled {
        #[serde(default)]
        omega0: f64,
        c11: f64,
        k_corr: f64,
        #[serde(default = "one")]
        delta_n: f64,
        #[serde(default = "yes")]
        compensate_phase: bool,
    },
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig::Global { gamma_rate: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Dimensionless time `t Gamma` of global dephasing.
    TGamma,
    /// Effective path difference `x = delta_n t` of the photonic model.
    PathDifference,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepConfig {
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default = "yes")]
    pub region: bool,
    #[serde(default = "yes")]
    pub sudden_death: bool,
    #[serde(default = "yes")]
    pub asymptotics: bool,
}

impl Default for Analyses {
    fn default() -> Self {
        Self {
            region: true,
            sudden_death: true,
            asymptotics: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    pub total_coincidences: f64,
    pub repetitions: usize,
    #[serde(default = "default_scheme")]
    pub scheme: TomographyScheme,
    /// Integration time written on each count record.
    #[serde(default)]
    pub integration_s: f64,
}

fn default_scheme() -> TomographyScheme {
    TomographyScheme::Mub36
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub plates: Vec<String>,
    pub deltas: Option<Vec<f64>>,
    pub delta_range: Option<SweepRange>,
    /// `[h1, h2, h3, h4, q1, q2, q3, q4]` in degrees; the numerical CHSH
    /// optimum when absent.
    pub center: Option<[f64; 8]>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

/// A configuration that passed validation.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub initial: BellCoeffs,
}

pub fn parse_config(text: &str) -> ScenarioResult<Scenario> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("<document>")
            .to_string();
        ScenarioError::Config {
            field,
            message: e.to_string().trim().to_string(),
        }
    })?;
    validate(config)
}

pub fn load_config(path: &Path) -> ScenarioResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ScenarioError::config("--config", format!("cannot read {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

fn finite(field: &str, x: f64) -> ScenarioResult<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::config(
            field,
            format!("must be finite, got {x}"),
        ))
    }
}

pub fn validate(config: ScenarioConfig) -> ScenarioResult<Scenario> {
    if config.format_version != FORMAT_VERSION {
        return Err(ScenarioError::config(
            "format_version",
            format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                config.format_version
            ),
        ));
    }
    let initial = match (&config.state.coeffs, &config.state.weights) {
        (Some(c), None) => BellCoeffs::from_array(*c)
            .map_err(|e| ScenarioError::config("state.coeffs", e.to_string()))?,
        (None, Some(w)) => bell_mixture(w.phi_plus, w.phi_minus, w.psi_plus, w.psi_minus)
            .map_err(|e| ScenarioError::config("state.weights", e.to_string()))?,
        _ => {
            return Err(ScenarioError::config(
                "state",
                "give exactly one of `coeffs` or `weights`",
            ))
        }
    };
    finite("state.evolve_to", config.state.evolve_to)?;
    if config.state.evolve_to < 0.0 {
        return Err(ScenarioError::config("state.evolve_to", "must be >= 0"));
    }

    match config.channel {
        ChannelConfig::Global { gamma_rate } => {
            if !(gamma_rate > 0.0 && gamma_rate.is_finite()) {
                return Err(ScenarioError::config(
                    "channel.gamma_rate",
                    format!("must be > 0, got {gamma_rate}"),
                ));
            }
        }
        ChannelConfig::Photonic {
            omega0,
            c11,
            k_corr,
            delta_n,
            ..
        }
        | ChannelConfig::PhotonicRelabelled {
            omega0,
            c11,
            k_corr,
            delta_n,
            ..
        } => {
            for (f, v) in [
                ("channel.omega0", omega0),
                ("channel.c11", c11),
                ("channel.k_corr", k_corr),
                ("channel.delta_n", delta_n),
            ] {
                finite(f, v)?;
            }
            if c11 < 0.0 {
                return Err(ScenarioError::config("channel.c11", "must be >= 0"));
            }
            if k_corr.abs() > 1.0 {
                return Err(ScenarioError::config(
                    "channel.k_corr",
                    "must lie in [-1, 1]",
                ));
            }
            if delta_n <= 0.0 {
                return Err(ScenarioError::config("channel.delta_n", "must be > 0"));
            }
        }
    }

    if let Some(s) = &config.sweep {
        finite("sweep.min", s.min)?;
        finite("sweep.max", s.max)?;
        if s.min < 0.0 {
            return Err(ScenarioError::config("sweep.min", "must be >= 0"));
        }
        if !(s.min < s.max) {
            return Err(ScenarioError::config(
                "sweep.max",
                format!("range must satisfy min < max, got [{}, {}]", s.min, s.max),
            ));
        }
        if s.steps < 2 {
            return Err(ScenarioError::config(
                "sweep.steps",
                format!("must be >= 2, got {}", s.steps),
            ));
        }
        let wanted = match config.channel {
            ChannelConfig::Global { .. } => SweepVariable::TGamma,
            _ => SweepVariable::PathDifference,
        };
        if s.variable != wanted {
            return Err(ScenarioError::config(
                "sweep.variable",
                format!(
                    "channel `{}` is swept over `{}`",
                    channel_name(&config.channel),
                    variable_name(wanted)
                ),
            ));
        }
    }

    if let Some(t) = &config.tomography {
        if !(t.total_coincidences > 0.0 && t.total_coincidences.is_finite()) {
            return Err(ScenarioError::config(
                "tomography.total_coincidences",
                "must be > 0",
            ));
        }
        if t.repetitions < 100 {
            return Err(ScenarioError::config(
                "tomography.repetitions",
                format!("must be >= 100, got {}", t.repetitions),
            ));
        }
        if !(t.integration_s >= 0.0 && t.integration_s.is_finite()) {
            return Err(ScenarioError::config(
                "tomography.integration_s",
                "must be >= 0",
            ));
        }
    }

    if let Some(s) = &config.scan {
        if s.plates.is_empty() {
            return Err(ScenarioError::config(
                "scan.plates",
                "must name at least one plate",
            ));
        }
        for p in &s.plates {
            p.parse::<Plate>()
                .map_err(|e| ScenarioError::config("scan.plates", e.to_string()))?;
        }
        match (&s.deltas, &s.delta_range) {
            (Some(d), None) => {
                if d.is_empty() {
                    return Err(ScenarioError::config("scan.deltas", "must not be empty"));
                }
                for &x in d {
                    finite("scan.deltas", x)?;
                }
            }
            (None, Some(r)) => {
                finite("scan.delta_range.min", r.min)?;
                finite("scan.delta_range.max", r.max)?;
                if !(r.min < r.max) {
                    return Err(ScenarioError::config(
                        "scan.delta_range",
                        "range must satisfy min < max",
                    ));
                }
                if r.steps < 2 {
                    return Err(ScenarioError::config(
                        "scan.delta_range.steps",
                        "must be >= 2",
                    ));
                }
            }
            _ => {
                return Err(ScenarioError::config(
                    "scan",
                    "give exactly one of `deltas` or `delta_range`",
                ))
            }
        }
        if let Some(c) = &s.center {
            for &x in c {
                finite("scan.center", x)?;
            }
        }
    }

    if let Some(o) = &config.optimizer {
        if o.grid_polar == 0 || o.grid_azimuth == 0 || o.refine_starts == 0 || o.max_iterations == 0
        {
            return Err(ScenarioError::config(
                "optimizer",
                "grid sizes, refine_starts and max_iterations must be >= 1",
            ));
        }
        if !(o.step_tol > 0.0) {
            return Err(ScenarioError::config("optimizer.step_tol", "must be > 0"));
        }
    }

    Ok(Scenario { config, initial })
}

fn channel_name(c: &ChannelConfig) -> &'static str {
    match c {
        ChannelConfig::Global { .. } => "global",
        ChannelConfig::Photonic { .. } => "photonic",
        ChannelConfig::PhotonicRelabelled { .. } => "photonic-relabelled",
    }
}

fn variable_name(v: SweepVariable) -> &'static str {
    match v {
        SweepVariable::TGamma => "t_gamma",
        SweepVariable::PathDifference => "path_difference",
    }
}

/// Formats like C's `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits, for JSON output.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt_num(x).parse::<f64>().expect("formatted number parses"))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

impl Scenario {
    fn optimizer(&self) -> OptimizerConfig {
        self.config.optimizer.unwrap_or_default()
    }

    /// The density matrix at sweep-variable value `at`.
    pub fn state_at(&self, at: f64) -> ScenarioResult<DensityMatrix> {
        Ok(match self.config.channel {
            ChannelConfig::Global { .. } => coeffs_at(&self.initial, at).to_density(),
            ChannelConfig::Photonic {
                omega0,
                c11,
                k_corr,
                delta_n,
                compensate_phase,
            } => {
                let p =
                    PhotonEnvParams::new(omega0, c11, k_corr, delta_n, at / delta_n, at / delta_n)?;
                photonic_channel(&self.initial.to_density(), &p, compensate_phase)
            }
            ChannelConfig::PhotonicRelabelled {
                omega0,
                c11,
                k_corr,
                delta_n,
                compensate_phase,
            } => {
                let p =
                    PhotonEnvParams::new(omega0, c11, k_corr, delta_n, at / delta_n, at / delta_n)?;
                relabelled_photonic_channel(&self.initial.to_density(), &p, compensate_phase)
            }
        })
    }

    fn row_at(&self, at: f64) -> ScenarioResult<[f64; 6]> {
        Ok(match self.config.channel {
            ChannelConfig::Global { .. } => {
                let c = coeffs_at(&self.initial, at);
                [
                    at,
                    c.c1(),
                    c.c2(),
                    c.c3(),
                    concurrence_bell(&c),
                    chsh_bell(&c),
                ]
            }
            _ => {
                let rho = self.state_at(at)?;
                let t = correlation_matrix(&rho);
                [
                    at,
                    t[0][0],
                    t[1][1],
                    t[2][2],
                    concurrence_general(&rho),
                    chsh_max(&rho),
                ]
            }
        })
    }

    fn evaluated_state(&self) -> ScenarioResult<DensityMatrix> {
        self.state_at(self.config.state.evolve_to)
    }

    fn header_json(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("format_version".into(), json!(FORMAT_VERSION));
        m.insert("command".into(), json!(command));
        m.insert("channel".into(), json!(channel_name(&self.config.channel)));
        m.insert("initial_coeffs".into(), nums(&self.initial.as_array()));
        m
    }
}

const SWEEP_COLUMNS: [&str; 7] = ["t_or_x", "c1", "c2", "c3", "E", "B", "violated"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<[f64; 6]>,
}

impl SweepTable {
    pub fn violated(row: &[f64; 6]) -> bool {
        row[5] > 2.0
    }
}

/// Sweep points computed in parallel, returned in sweep order.
pub fn sweep_table(s: &Scenario) -> ScenarioResult<SweepTable> {
    let sweep = s
        .config
        .sweep
        .ok_or_else(|| ScenarioError::config("sweep", "section required for the sweep command"))?;
    let rows = sweep
        .points()
        .into_par_iter()
        .map(|x| s.row_at(x))
        .collect::<ScenarioResult<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

fn sweep_summary(s: &Scenario, table: &SweepTable) -> ScenarioResult<Vec<(String, Value)>> {
    let mut out: Vec<(String, Value)> = Vec::new();
    let a = s.config.analyses;
    if a.region {
        let r = classify_region(&s.initial);
        out.push((
            "region".into(),
            serde_json::to_value(r.region).expect("enum"),
        ));
        out.push((
            "time_invariant_entanglement".into(),
            json!(r.time_invariant_entanglement),
        ));
        out.push((
            "entanglement_fate".into(),
            serde_json::to_value(r.entanglement_fate).expect("enum"),
        ));
    }
    let global_rate = match s.config.channel {
        ChannelConfig::Global { gamma_rate } => Some(gamma_rate),
        _ => None,
    };
    if a.asymptotics && global_rate.is_some() {
        let (e_inf, b_inf) = asymptotic_values(&s.initial);
        out.push(("E_infinity".into(), num(e_inf)));
        out.push(("B_infinity".into(), num(b_inf)));
    }
    if a.sudden_death {
        if let Some(rate) = global_rate {
            // Times are reported in the sweep variable t Gamma.
            let esd = entanglement_sudden_death_time(&s.initial, rate)?.map(|t| t * rate);
            let nsd = nonlocality_sudden_death_time(&s.initial, rate)?.map(|t| t * rate);
            out.push(("entanglement_death_t_gamma".into(), opt_num(esd)));
            out.push(("nonlocality_death_t_gamma".into(), opt_num(nsd)));
        }
        let crossings: Vec<Value> = table
            .rows
            .windows(2)
            .filter(|w| SweepTable::violated(&w[0]) != SweepTable::violated(&w[1]))
            .map(|w| json!([num(w[0][0]), num(w[1][0])]))
            .collect();
        out.push(("violation_changes".into(), Value::Array(crossings)));
    }
    let b_min = table
        .rows
        .iter()
        .map(|r| r[5])
        .fold(f64::INFINITY, f64::min);
    let e_min = table
        .rows
        .iter()
        .map(|r| r[4])
        .fold(f64::INFINITY, f64::min);
    let e_max = table
        .rows
        .iter()
        .map(|r| r[4])
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(("B_min_over_sweep".into(), num(b_min)));
    out.push(("E_min_over_sweep".into(), num(e_min)));
    out.push(("E_max_over_sweep".into(), num(e_max)));
    Ok(out)
}

fn csv_header(command: &str, s: &Scenario) -> String {
    format!(
        "# format_version={FORMAT_VERSION} command={command} channel={}\n",
        channel_name(&s.config.channel)
    )
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(x) => x.clone(),
        Value::Number(n) => fmt_num(n.as_f64().expect("finite")),
        Value::Null => "none".into(),
        other => serde_json::to_string(other).expect("serializable"),
    }
}

pub fn run_sweep(s: &Scenario, format: OutputFormat) -> ScenarioResult<Vec<Artifact>> {
    let table = sweep_table(s)?;
    let summary = sweep_summary(s, &table)?;
    Ok(vec![match format {
        OutputFormat::Csv => {
            let mut out = csv_header("sweep", s);
            out.push_str(&SWEEP_COLUMNS.join(","));
            out.push('\n');
            for r in &table.rows {
                let cells: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
                let _ = writeln!(out, "{},{}", cells.join(","), SweepTable::violated(r));
            }
            out.push_str("# summary\n");
            for (k, v) in &summary {
                let _ = writeln!(out, "# {k}={}", compact(v));
            }
            Artifact::new("sweep.csv", out)
        }
        OutputFormat::Json => {
            let mut m = s.header_json("sweep");
            m.insert("columns".into(), json!(SWEEP_COLUMNS));
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let mut cells: Vec<Value> = r.iter().map(|&x| num(x)).collect();
                    cells.push(json!(SweepTable::violated(r)));
                    Value::Array(cells)
                })
                .collect();
            m.insert("rows".into(), Value::Array(rows));
            m.insert(
                "summary".into(),
                Value::Object(summary.into_iter().collect()),
            );
            Artifact::new("sweep.json", to_json_text(&Value::Object(m)))
        }
    }])
}

fn scan_deltas(cfg: &ScanConfig) -> Vec<f64> {
    match (&cfg.deltas, &cfg.delta_range) {
        (Some(d), _) => d.clone(),
        (None, Some(r)) => SweepConfig {
            variable: SweepVariable::TGamma,
            min: r.min,
            max: r.max,
            steps: r.steps,
        }
        .points(),
        (None, None) => Vec::new(),
    }
}

fn center_from_array(c: &[f64; 8]) -> ChshAngles {
    ChshAngles(std::array::from_fn(|k| {
        WaveplateSetting::new(c[k], c[k + 4])
    }))
}

fn angles_json(a: &ChshAngles) -> Value {
    let names = ["a", "a_prime", "b", "b_prime"];
    let m: serde_json::Map<String, Value> = names
        .iter()
        .zip(a.0)
        .map(|(n, w)| {
            (
                n.to_string(),
                json!({"hwp_deg": num(w.hwp_deg), "qwp_deg": num(w.qwp_deg)}),
            )
        })
        .collect();
    Value::Object(m)
}

pub fn run_scan(s: &Scenario, format: OutputFormat) -> ScenarioResult<Vec<Artifact>> {
    let cfg =
        s.config.scan.as_ref().ok_or_else(|| {
            ScenarioError::config("scan", "section required for the scan command")
        })?;
    let rho = s.evaluated_state()?;
    let center = match &cfg.center {
        Some(c) => center_from_array(c),
        None => optimal_angles(&rho, &s.optimizer())?,
    };
    let plates: Vec<Plate> = cfg
        .plates
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|e: Error| ScenarioError::config("scan.plates", e.to_string()))
        })
        .collect::<ScenarioResult<_>>()?;
    let deltas = scan_deltas(cfg);
    let curves: Vec<Vec<(f64, f64)>> = plates
        .par_iter()
        .map(|&p| chsh_angle_scan(&rho, &center, p, &deltas))
        .collect();
    let mut columns = vec!["delta_deg".to_string()];
    columns.extend(plates.iter().map(|p| p.to_string()));
    Ok(vec![match format {
        OutputFormat::Csv => {
            let mut out = csv_header("scan", s);
            let _ = writeln!(out, "# chsh_max={}", fmt_num(chsh_max(&rho)));
            out.push_str(&columns.join(","));
            out.push('\n');
            for (k, d) in deltas.iter().enumerate() {
                let mut cells = vec![fmt_num(*d)];
                cells.extend(curves.iter().map(|c| fmt_num(c[k].1)));
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Artifact::new("scan.csv", out)
        }
        OutputFormat::Json => {
            let mut m = s.header_json("scan");
            m.insert("evolve_to".into(), num(s.config.state.evolve_to));
            m.insert("chsh_max".into(), num(chsh_max(&rho)));
            m.insert("center".into(), angles_json(&center));
            m.insert("columns".into(), json!(columns));
            let rows: Vec<Value> = deltas
                .iter()
                .enumerate()
                .map(|(k, d)| {
                    let mut cells = vec![num(*d)];
                    cells.extend(curves.iter().map(|c| num(c[k].1)));
                    Value::Array(cells)
                })
                .collect();
            m.insert("rows".into(), Value::Array(rows));
            Artifact::new("scan.json", to_json_text(&Value::Object(m)))
        }
    }])
}

const SAMPLE_RUN_DOMAIN: u64 = u64::MAX;

pub fn run_tomo_sim(s: &Scenario, format: OutputFormat) -> ScenarioResult<Vec<Artifact>> {
    let cfg = s.config.tomography.ok_or_else(|| {
        ScenarioError::config("tomography", "section required for the tomo command")
    })?;
    let rho = s.evaluated_state()?;
    let seed = s.config.seed;
    let est = statistical_error_mc(
        &rho,
        cfg.scheme,
        cfg.total_coincidences,
        cfg.repetitions,
        seed,
    )?;

    let settings = cfg.scheme.settings();
    let sample = simulate_counts(
        &rho,
        &settings,
        cfg.total_coincidences,
        cfg.integration_s,
        derive_seed(seed, SAMPLE_RUN_DOMAIN),
    )?;
    let reconstruction = tomography_reconstruct(&sample)?;
    let mut counts_csv = Vec::new();
    write_counts_csv(&sample, &mut counts_csv)?;
    let counts_csv = String::from_utf8(counts_csv).expect("csv is utf-8");

    let fields: Vec<(&str, Value)> = vec![
        ("seed", json!(seed)),
        ("scheme", serde_json::to_value(cfg.scheme).expect("enum")),
        ("total_coincidences", num(cfg.total_coincidences)),
        ("repetitions", json!(est.repetitions)),
        ("exact_concurrence", num(concurrence_general(&rho))),
        ("exact_chsh", num(chsh_max(&rho))),
        ("sigma_concurrence", num(est.sigma_concurrence)),
        ("sigma_chsh", num(est.sigma_chsh)),
        ("mean_concurrence", num(est.mean_concurrence)),
        ("mean_chsh", num(est.mean_chsh)),
        ("mean_trace_distance", num(est.mean_trace_distance)),
        ("sd_trace_distance", num(est.sd_trace_distance)),
    ];
    let report = match format {
        OutputFormat::Csv => {
            let mut out = csv_header("tomo", s);
            out.push_str("quantity,value\n");
            for (k, v) in &fields {
                let _ = writeln!(out, "{k},{}", compact(v));
            }
            Artifact::new("tomo.csv", out)
        }
        OutputFormat::Json => {
            let mut m = s.header_json("tomo");
            m.insert("evolve_to".into(), num(s.config.state.evolve_to));
            for (k, v) in fields {
                m.insert(k.into(), v);
            }
            Artifact::new("tomo.json", to_json_text(&Value::Object(m)))
        }
    };
    let recon = {
        let entries: Vec<Value> = reconstruction
            .entries()
            .iter()
            .flatten()
            .map(|z| json!([num(z.re), num(z.im)]))
            .collect();
        Artifact::new(
            "reconstruction.json",
            to_json_text(&json!({"format_version": FORMAT_VERSION, "density_matrix": entries})),
        )
    };
    Ok(vec![report, Artifact::new("counts.csv", counts_csv), recon])
}

pub fn run_classify(s: &Scenario, format: OutputFormat) -> ScenarioResult<Vec<Artifact>> {
    let c = &s.initial;
    let report = classify_region(c);
    let (e_inf, b_inf) = asymptotic_values(c);
    let fields: Vec<(&str, Value)> = vec![
        ("coeffs", nums(&c.as_array())),
        ("bell_weights", nums(&c.eigenvalues())),
        ("region", serde_json::to_value(report.region).expect("enum")),
        (
            "time_invariant_entanglement",
            json!(report.time_invariant_entanglement),
        ),
        (
            "entanglement_fate",
            serde_json::to_value(report.entanglement_fate).expect("enum"),
        ),
        ("concurrence", num(concurrence_bell(c))),
        ("chsh_max", num(chsh_bell(c))),
        ("E_infinity", num(e_inf)),
        ("B_infinity", num(b_inf)),
        (
            "entanglement_death_t_gamma",
            opt_num(entanglement_sudden_death_time(c, 1.0)?),
        ),
        (
            "nonlocality_death_t_gamma",
            opt_num(nonlocality_sudden_death_time(c, 1.0)?),
        ),
    ];
    Ok(vec![match format {
        OutputFormat::Csv => {
            let mut out = csv_header("classify", s);
            out.push_str("quantity,value\n");
            for (k, v) in &fields {
                let _ = writeln!(out, "{k},\"{}\"", compact(v));
            }
            Artifact::new("classify.csv", out)
        }
        OutputFormat::Json => {
            let mut m = s.header_json("classify");
            for (k, v) in fields {
                m.insert(k.into(), v);
            }
            Artifact::new("classify.json", to_json_text(&Value::Object(m)))
        }
    }])
}

pub fn run_chsh(s: &Scenario, format: OutputFormat) -> ScenarioResult<Vec<Artifact>> {
    let rho = s.evaluated_state()?;
    let opt = chsh_optimize_numeric(&rho, &s.optimizer())?;
    let angles = ChshAngles::from_setting(&opt.setting);
    let st = &opt.setting;
    let fields: Vec<(&str, Value)> = vec![
        ("value", num(opt.value)),
        ("horodecki_chsh_max", num(chsh_max(&rho))),
        ("iterations", json!(opt.iterations)),
        ("a", nums(&st.a)),
        ("a_prime", nums(&st.a_prime)),
        ("b", nums(&st.b)),
        ("b_prime", nums(&st.b_prime)),
    ];
    Ok(vec![match format {
        OutputFormat::Csv => {
            let mut out = csv_header("chsh", s);
            out.push_str("quantity,value\n");
            for (k, v) in &fields {
                let _ = writeln!(out, "{k},\"{}\"", compact(v));
            }
            for (name, w) in ["a", "a_prime", "b", "b_prime"].iter().zip(angles.0) {
                let _ = writeln!(out, "{name}_hwp_deg,{}", fmt_num(w.hwp_deg));
                let _ = writeln!(out, "{name}_qwp_deg,{}", fmt_num(w.qwp_deg));
            }
            Artifact::new("chsh.csv", out)
        }
        OutputFormat::Json => {
            let mut m = s.header_json("chsh");
            m.insert("evolve_to".into(), num(s.config.state.evolve_to));
            for (k, v) in fields {
                m.insert(k.into(), v);
            }
            m.insert("angles".into(), angles_json(&angles));
            Artifact::new("chsh.json", to_json_text(&Value::Object(m)))
        }
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        seed = 7
        [state]
        coeffs = [1.0, 0.4, -0.4]
        [channel]
        kind = "global"
        gamma_rate = 1.0
        [sweep]
        variable = "t_gamma"
        min = 0.0
        max = 2.0
        steps = 41
    "#;

    fn field_of(e: ScenarioError) -> String {
        match e {
            ScenarioError::Config { field, .. } => field,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.4), "0.4");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.5493061443340549), "0.549306144334");
        assert_eq!(fmt_num(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(fmt_num(1.25e-7), "1.25e-7");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(99999.99999999999), "100000");
    }

    #[test]
    fn sweep_frozen_and_crossing() {
        let s = parse_config(BASE).unwrap();
        let t = sweep_table(&s).unwrap();
        assert_eq!(t.rows.len(), 41);
        assert!(t.rows.iter().all(|r| (r[4] - 0.4).abs() < 1e-12));
        let cross: Vec<_> = t
            .rows
            .windows(2)
            .filter(|w| w[0][5] > 2.0 && w[1][5] <= 2.0)
            .collect();
        assert_eq!(cross.len(), 1);
        assert!(cross[0][0][0] < 0.5493 && 0.5493 < cross[0][1][0]);
        let csv = &run_sweep(&s, OutputFormat::Csv).unwrap()[0].contents;
        assert!(csv.starts_with("# format_version=1 command=sweep channel=global\nt_or_x,c1,c2,c3,E,B,violated\n0,1,0.4,-0.4,0.4,"));
        let death: f64 = csv
            .lines()
            .find_map(|l| l.strip_prefix("# nonlocality_death_t_gamma="))
            .unwrap()
            .parse()
            .unwrap();
        assert!((death - 3f64.ln() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn trapped_state_sweep() {
        let text = BASE.replace("[1.0, 0.4, -0.4]", "[-0.5, -1.0, -0.5]");
        let t = sweep_table(&parse_config(&text).unwrap()).unwrap();
        let b_min = t.rows.iter().map(|r| r[5]).fold(f64::INFINITY, f64::min);
        assert!(b_min >= 2.0 * 1.125f64.sqrt() - 1e-9);
        assert!(t.rows.iter().all(|r| (r[4] - 0.5).abs() < 1e-12));
    }

    #[test]
    fn photonic_sweep_matches_global_at_anticorrelation() {
        let text = r#"
            [state]
            coeffs = [-0.5, -1.0, -0.5]
            [channel]
            kind = "photonic-relabelled"
            c11 = 2.0
            k_corr = -1.0
            [sweep]
            variable = "path_difference"
            min = 0.0
            max = 1.0
            steps = 11
        "#;
        let t = sweep_table(&parse_config(text).unwrap()).unwrap();
        for r in &t.rows {
            let c = coeffs_at(
                &BellCoeffs::new(-0.5, -1.0, -0.5).unwrap(),
                2.0 * r[0] * r[0],
            );
            assert!(
                (r[1] - c.c1()).abs() < 1e-12
                    && (r[2] - c.c2()).abs() < 1e-12
                    && (r[3] - c.c3()).abs() < 1e-12
            );
            assert!((r[5] - chsh_bell(&c)).abs() < 1e-10);
        }
    }

    #[test]
    fn validation_reports_fields() {
        let cases = [
            (BASE.replace("steps = 41", "steps = 1"), "sweep.steps"),
            (BASE.replace("max = 2.0", "max = 0.0"), "sweep.max"),
            (
                BASE.replace("[1.0, 0.4, -0.4]", "[1.0, 1.0, 1.0]"),
                "state.coeffs",
            ),
            (
                BASE.replace("gamma_rate = 1.0", "gamma_rate = -1.0"),
                "channel.gamma_rate",
            ),
            (
                BASE.replace("\"t_gamma\"", "\"path_difference\""),
                "sweep.variable",
            ),
            (
                BASE.replace("seed = 7", "format_version = 9"),
                "format_version",
            ),
            (
                format!("{BASE}\n[tomography]\ntotal_coincidences = 5e4\nrepetitions = 1\n"),
                "tomography.repetitions",
            ),
            (
                format!("{BASE}\n[scan]\nplates = [\"H1\"]\ndeltas = []\n"),
                "scan.deltas",
            ),
            (
                format!("{BASE}\n[scan]\nplates = [\"H9\"]\ndeltas = [0.0]\n"),
                "scan.plates",
            ),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(parse_config(&text).unwrap_err()), field, "{text}");
        }
        let missing = "[state]\ncoeffs=[0,0,0]\n[channel]\nkind = \"photonic\"\nk_corr = 1.0\n";
        assert_eq!(field_of(parse_config(missing).unwrap_err()), "c11");
        let unknown = format!("{BASE}\nbogus = 1\n");
        assert!(matches!(
            parse_config(&unknown),
            Err(ScenarioError::Config { .. })
        ));
        assert_eq!(parse_config(&unknown).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn mixture_weights_accepted() {
        let text = "[state]\nweights = { phi_plus = 0.1, phi_minus = 0.1, psi_plus = 0.7, psi_minus = 0.1 }\n";
        let s = parse_config(text).unwrap();
        let c = s.initial.as_array();
        assert!(
            (c[0] - 0.6).abs() < 1e-12 && (c[1] - 0.6).abs() < 1e-12 && (c[2] + 0.6).abs() < 1e-12
        );
    }

    #[test]
    fn outputs_are_deterministic() {
        let text = format!(
            "{BASE}\n[tomography]\ntotal_coincidences = 5e4\nrepetitions = 100\n[scan]\nplates = [\"H1\", \"Q3\"]\ndeltas = [-10.0, 0.0, 10.0]\n"
        );
        let s = parse_config(&text).unwrap();
        for f in [OutputFormat::Csv, OutputFormat::Json] {
            for run in [run_sweep, run_scan, run_tomo_sim, run_classify, run_chsh] {
                assert_eq!(run(&s, f).unwrap(), run(&s, f).unwrap());
            }
        }
    }

    #[test]
    fn scan_output_peaks_at_center() {
        let text = format!("{BASE}\n[scan]\nplates = [\"H2\"]\ndelta_range = {{ min = -30.0, max = 30.0, steps = 61 }}\n");
        let s = parse_config(&text).unwrap();
        let out = &run_scan(&s, OutputFormat::Json).unwrap()[0].contents;
        let v: Value = serde_json::from_str(out).unwrap();
        let rows = v["rows"].as_array().unwrap();
        let vals: Vec<f64> = rows.iter().map(|r| r[1].as_f64().unwrap()).collect();
        let peak = vals[30];
        assert!((peak - 2.0 * 1.16f64.sqrt()).abs() < 1e-4);
        assert!(vals.iter().all(|&x| x <= peak + 1e-6));
    }

    #[test]
    fn missing_sections_are_config_errors() {
        let s = parse_config("[state]\ncoeffs = [0.0, 0.0, 0.0]\n").unwrap();
        assert_eq!(run_sweep(&s, OutputFormat::Csv).unwrap_err().exit_code(), 2);
        assert_eq!(run_scan(&s, OutputFormat::Csv).unwrap_err().exit_code(), 2);
        assert_eq!(
            run_tomo_sim(&s, OutputFormat::Csv).unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn non_convergence_maps_to_exit_three() {
        let text = "[state]\ncoeffs = [1.0, 0.4, -0.4]\n[optimizer]\ngrid_polar = 2\ngrid_azimuth = 2\nstep_tol = 1e-30\nmax_iterations = 3\nrefine_starts = 1\n";
        let s = parse_config(text).unwrap();
        assert_eq!(run_chsh(&s, OutputFormat::Json).unwrap_err().exit_code(), 3);
    }
}
