//! Batch front end: JSON run configs in, JSON/CSV report files out.
//!
//! Outputs are deterministic for a fixed config and seed at any thread
//! count; every report body embeds the config hash, seed, and crate
//! version, plus a timestamp field that consumers are expected to strip
//! before byte comparison.

use crate::ancona::{bypass_probability, hit_probability_ball, AnconaError, GreenContext};
use crate::cayley::{Ball, BallError};
use crate::criteria::{
    derive_parameters, hyperbolicity_report, CriteriaError, EvidenceConfig, Verdict,
};
use crate::geometry::{bigon_scan, height_hk, pi_scan, ProperFunction};
use crate::groups::{
    classify_transience, element_of_word, make_group, GroupError, GroupSpec, Transience,
};
use crate::walk::{spectral_lower, Measure, RhoPlus, RhoPlusPolicy, WalkError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Exit code for schema and validation failures.
pub const EXIT_SCHEMA: i32 = 2;
/// Exit code for budget and memory failures (partial outputs marked).
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Schema(String),
    #[error("budget/memory: {0}")]
    Budget(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Budget(_) => EXIT_BUDGET,
            _ => 1,
        }
    }
}

impl From<BallError> for CliError {
    fn from(e: BallError) -> Self {
        if matches!(e, BallError::MemoryCap { .. }) {
            CliError::Budget(e.to_string())
        } else {
            CliError::Run(e.to_string())
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Asymmetric { .. }
            | WalkError::NonUnitSum { .. }
            | WalkError::NonPositiveWeight { .. }
            | WalkError::MissingWeight { .. }
            | WalkError::UnknownLabel { .. } => CliError::Schema(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<AnconaError> for CliError {
    fn from(e: AnconaError) -> Self {
        match e {
            AnconaError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            AnconaError::Walk(w) => w.into(),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Walk(w) => w.into(),
            CriteriaError::Ancona(a) => a.into(),
            CriteriaError::Ball(b) => b.into(),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<crate::geometry::GeometryError> for CliError {
    fn from(e: crate::geometry::GeometryError) -> Self {
        match e {
            crate::geometry::GeometryError::Ball(b) => b.into(),
            other => CliError::Run(other.to_string()),
        }
    }
}

/// Measure selection: uniform or explicit per-label weights.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MeasureSpec {
    Keyword(String),
    Weights(BTreeMap<String, f64>),
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec::Keyword("uniform".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Ball,
    Green,
    Spectral,
    Wa,
    Ta,
    Bypass,
    Pi,
    Bigons,
    Height,
    Criteria,
    Report,
}

/// One batch run: group, measure, command, parameters, seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub group: GroupSpec,
    #[serde(default)]
    pub measure: MeasureSpec,
    pub command: Command,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

/// Command parameters; unused fields are ignored by each command.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub radius: Option<u32>,
    pub n_max: Option<usize>,
    pub rho_plus: Option<f64>,
    pub memory_cap: Option<usize>,
    /// Generator-label words for endpoints.
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    pub r: Option<u32>,
    pub r_list: Option<Vec<u32>>,
    pub samples: Option<usize>,
    pub delta: Option<f64>,
    pub l_max: Option<u32>,
    pub budget: Option<usize>,
    pub epsilon: Option<f64>,
    /// Tail-condition parameters (A, a, B, b).
    pub factor_a: Option<f64>,
    pub prob_a: Option<f64>,
    pub factor_b: Option<f64>,
    pub prob_b: Option<f64>,
    pub c_list: Option<Vec<u32>>,
    /// Proper-function samples for the height command.
    pub function: Option<Vec<f64>>,
    pub k: Option<f64>,
    pub grid_step: Option<f64>,
    pub working_pad: Option<u32>,
    pub export_csv: Option<bool>,
}

impl Params {
    fn radius(&self) -> u32 {
        self.radius.unwrap_or(8)
    }

    fn n_max(&self) -> usize {
        self.n_max.unwrap_or(200)
    }

    fn memory_cap(&self) -> usize {
        self.memory_cap.unwrap_or(6 << 30)
    }
}

/// Validation diagnostic (returned, never thrown).
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub severity: String,
    pub message: String,
}

fn err_diag(message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        severity: "error".into(),
        message: message.into(),
    }
}

/// Full schema/admissibility/guard dry run without heavy computation.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let made = make_group(&config.group);
    let (oracle, gens) = match made {
        Ok(x) => x,
        Err(e) => {
            out.push(err_diag(format!("group spec: {e}")));
            return out;
        }
    };
    let measure = match &config.measure {
        MeasureSpec::Keyword(k) if k == "uniform" => Ok(Measure::uniform(&gens)),
        MeasureSpec::Keyword(k) => {
            out.push(err_diag(format!("unknown measure keyword {k:?}")));
            return out;
        }
        MeasureSpec::Weights(w) => Measure::validate(&gens, w),
    };
    let measure = match measure {
        Ok(m) => m,
        Err(e) => {
            out.push(err_diag(format!("measure: {e}")));
            return out;
        }
    };

    let needs_transient = matches!(
        config.command,
        Command::Green | Command::Wa | Command::Ta | Command::Bypass
    );
    if needs_transient && classify_transience(&config.group) == Transience::Recurrent {
        out.push(err_diag(
            "the group is recurrent (virtually abelian of rank <= 2): the Green series diverges",
        ));
    }
    if matches!(config.command, Command::Bypass) {
        let eps = config.params.epsilon.unwrap_or(measure.lambda() / 2.0);
        if eps >= measure.lambda() {
            out.push(err_diag(format!(
                "epsilon {eps} must stay below the minimal generator weight {} for the bypass-decay criterion",
                measure.lambda()
            )));
        }
    }
    let sampled = matches!(config.command, Command::Pi | Command::Bigons | Command::Report);
    if sampled && config.seed.is_none() {
        out.push(err_diag("seed is mandatory for sampled commands"));
    }
    for w in [&config.params.x, &config.params.y, &config.params.z]
        .into_iter()
        .flatten()
    {
        if let Err(e) = element_of_word(&oracle, &gens, w) {
            out.push(err_diag(format!("word {w:?}: {e}")));
        }
    }
    if matches!(config.command, Command::Height) {
        match &config.params.function {
            None => out.push(err_diag("height command needs params.function")),
            Some(samples) => {
                if let Err(e) = ProperFunction::new(samples.clone()) {
                    out.push(err_diag(format!("function: {e}")));
                }
            }
        }
    }
    if matches!(config.command, Command::Criteria | Command::Report) {
        if let (Some(pa), Some(pb)) = (config.params.prob_a, config.params.prob_b) {
            if pb >= 1.0 - pa {
                out.push(err_diag(format!(
                    "b = {pb} must be below 1 - a = {}",
                    1.0 - pa
                )));
            }
        }
    }
    out
}

/// Everything a run produces: file names relative to the output dir plus
/// the primary report body (also written to disk).
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub primary: String,
}

fn config_hash(config: &RunConfig) -> String {
    let canon = serde_json::to_string(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(canon.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn wrap_report(config: &RunConfig, result: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "meta": {
            "config_sha256": config_hash(config),
            "seed": config.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": now_rfc3339(),
        },
        "result": result,
    })
}

fn now_rfc3339() -> String {
    // wall-clock seconds; good enough for report provenance
    let d = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap_or_default();
    format!("unix:{}", d.as_secs())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut body = serde_json::to_string_pretty(value).expect("report serializes");
    body.push('\n');
    fs::write(&path, body)?;
    Ok(path)
}

/// Executes the configured command, writing reports under `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutput, CliError> {
    let diags = validate(config);
    if let Some(d) = diags.iter().find(|d| d.severity == "error") {
        return Err(CliError::Schema(d.message.clone()));
    }
    fs::create_dir_all(out_dir)?;
    let (oracle, gens) = make_group(&config.group)?;
    let measure = match &config.measure {
        MeasureSpec::Keyword(_) => Measure::uniform(&gens),
        MeasureSpec::Weights(w) => Measure::validate(&gens, w)?,
    };
    let p = &config.params;
    let seed = config.seed.unwrap_or(0);
    let mut files = Vec::new();

    let primary = match config.command {
        Command::Ball => {
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                p.radius(),
                p.memory_cap(),
            )?;
            let spheres: Vec<usize> = (0..=ball.radius()).map(|d| ball.sphere_size(d)).collect();
            if p.export_csv.unwrap_or(true) {
                let mut v = Vec::new();
                ball.write_vertices_csv(&mut v)?;
                let path = out_dir.join("ball_vertices.csv");
                fs::write(&path, v)?;
                files.push(path);
                let mut e = Vec::new();
                ball.write_edges_csv(&mut e)?;
                let path = out_dir.join("ball_edges.csv");
                fs::write(&path, e)?;
                files.push(path);
            }
            let report = wrap_report(
                config,
                serde_json::json!({
                    "radius": ball.radius(),
                    "vertices": ball.len(),
                    "sphere_sizes": spheres,
                    "generators": gens.labels(),
                }),
            );
            files.push(write_json(out_dir, "ball.json", &report)?);
            report
        }
        Command::Green => {
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                p.radius(),
                p.memory_cap(),
            )?;
            let x = word_or_identity(&oracle, &gens, p.x.as_deref())?;
            let z = word_or_identity(&oracle, &gens, p.z.as_deref())?;
            let xid = ball
                .id_of(&x)
                .ok_or_else(|| CliError::Run("x outside the ball".into()))?;
            let zid = ball
                .id_of(&z)
                .ok_or_else(|| CliError::Run("z outside the ball".into()))?;
            let est = crate::walk::green(
                &ball,
                &measure,
                xid,
                zid,
                p.n_max(),
                p.rho_plus.map(RhoPlus::user),
            )?;
            let report = wrap_report(
                config,
                serde_json::json!({
                    "x": oracle.display(&x),
                    "z": oracle.display(&z),
                    "lower": est.lower,
                    "upper": est.upper,
                    "n_max": est.n_max,
                    "rho_plus": est.rho_plus,
                    "rho_plus_provenance": est.rho_plus_provenance,
                    "escape_total": est.escape_total,
                    "tail_method": est.tail_method,
                    "unbounded": est.unbounded,
                }),
            );
            files.push(write_json(out_dir, "green.json", &report)?);
            report
        }
        Command::Spectral => {
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                p.radius(),
                p.memory_cap(),
            )?;
            let policy = match p.rho_plus {
                Some(v) => RhoPlusPolicy::User(v),
                None => RhoPlusPolicy::Auto,
            };
            let est = spectral_lower(&ball, &measure, p.n_max(), policy)?;
            let report = wrap_report(config, serde_json::to_value(&est).unwrap_or_default());
            files.push(write_json(out_dir, "spectral.json", &report)?);
            report
        }
        Command::Wa => {
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                p.radius(),
                p.memory_cap(),
            )?;
            let rho = p
                .rho_plus
                .map(RhoPlus::user)
                .unwrap_or_else(|| RhoPlus::user(1.0 - 1e-6));
            let ctx = GreenContext::new(&ball, &measure, p.n_max(), rho)?;
            let x = word_or_identity(&oracle, &gens, p.x.as_deref())?;
            let y = word_or_identity(&oracle, &gens, p.y.as_deref())?;
            let z = word_or_identity(&oracle, &gens, p.z.as_deref())?;
            let rep = ctx.hit_probability_point(&x, &y, &z)?;
            let report = wrap_report(config, hit_json("wa", &oracle, &x, Some(&y), &z, 0, &rep));
            files.push(write_json(out_dir, "wa.json", &report)?);
            report
        }
        Command::Ta => {
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                p.radius(),
                p.memory_cap(),
            )?;
            let rho = p
                .rho_plus
                .map(RhoPlus::user)
                .unwrap_or_else(|| RhoPlus::user(1.0 - 1e-6));
            let x = word_or_identity(&oracle, &gens, p.x.as_deref())?;
            let y = word_or_identity(&oracle, &gens, p.y.as_deref())?;
            let z = word_or_identity(&oracle, &gens, p.z.as_deref())?;
            let (xid, yid, zid) = (
                ball.id_of(&x)
                    .ok_or_else(|| CliError::Run("x outside the ball".into()))?,
                ball.id_of(&y)
                    .ok_or_else(|| CliError::Run("y outside the ball".into()))?,
                ball.id_of(&z)
                    .ok_or_else(|| CliError::Run("z outside the ball".into()))?,
            );
            let r = p.r.unwrap_or(1);
            let rep = hit_probability_ball(&ball, &measure, xid, yid, zid, r, p.n_max(), &rho)?;
            let report = wrap_report(config, hit_json("ta", &oracle, &x, Some(&y), &z, r, &rep));
            files.push(write_json(out_dir, "ta.json", &report)?);
            report
        }
        Command::Bypass => {
            let r = p.r.unwrap_or(2);
            let rho = p
                .rho_plus
                .map(RhoPlus::user)
                .unwrap_or_else(|| RhoPlus::user(1.0 - 1e-6));
            // antipodes along the first generator unless words are given
            let x = match &p.x {
                Some(w) => element_of_word(&oracle, &gens, w)?,
                None => {
                    let mut acc = oracle.identity();
                    let inv = gens.element(gens.inverse_index(0)).clone();
                    for _ in 0..r {
                        acc = oracle.multiply(&acc, &inv).expect("same oracle");
                    }
                    acc
                }
            };
            let z = match &p.z {
                Some(w) => element_of_word(&oracle, &gens, w)?,
                None => {
                    let mut acc = oracle.identity();
                    for _ in 0..r {
                        acc = oracle.multiply(&acc, gens.element(0)).expect("same oracle");
                    }
                    acc
                }
            };
            let pad = p.working_pad.unwrap_or(2);
            let ball = Ball::build(
                &oracle,
                &gens,
                &oracle.identity(),
                2 * r + pad,
                p.memory_cap(),
            )?;
            let (xid, zid) = (
                ball.id_of(&x)
                    .ok_or_else(|| CliError::Run("x outside the ball".into()))?,
                ball.id_of(&z)
                    .ok_or_else(|| CliError::Run("z outside the ball".into()))?,
            );
            let rep = bypass_probability(
                &ball,
                &measure,
                xid,
                ball.center_id(),
                zid,
                r,
                p.n_max(),
                &rho,
            )?;
            let report = wrap_report(config, hit_json("bypass", &oracle, &x, None, &z, r, &rep));
            files.push(write_json(out_dir, "bypass.json", &report)?);
            report
        }
        Command::Pi => {
            let r_list = p.r_list.clone().unwrap_or_else(|| vec![1, 2, 3]);
            let radius = p
                .radius
                .unwrap_or(2 * r_list.iter().max().copied().unwrap_or(1) + 2);
            let ball = Ball::build(&oracle, &gens, &oracle.identity(), radius, p.memory_cap())?;
            let summary = pi_scan(
                &ball,
                &r_list,
                p.samples.unwrap_or(5),
                seed,
                p.delta,
                p.memory_cap(),
            )?;
            let mut csv = Vec::new();
            summary.write_interval_csv(&mut csv)?;
            let path = out_dir.join("pi.csv");
            fs::write(&path, csv)?;
            files.push(path);
            let mut agg = String::from("r,samples,no_bypass,min_pi,median_pi,pi_infinite\n");
            for row in &summary.rows {
                let _ = writeln!(
                    agg,
                    "{},{},{},{},{},{}",
                    row.r,
                    row.samples,
                    row.no_bypass_count,
                    row.min_pi.map_or(String::new(), |v| format!("{v}")),
                    row.median_pi.map_or(String::new(), |v| format!("{v}")),
                    row.pi_infinite
                );
            }
            let path = out_dir.join("pi_summary.csv");
            fs::write(&path, agg)?;
            files.push(path);
            let report = wrap_report(config, serde_json::to_value(&summary).unwrap_or_default());
            files.push(write_json(out_dir, "pi.json", &report)?);
            report
        }
        Command::Bigons => {
            let radius = p.radius.unwrap_or(p.l_max.unwrap_or(6));
            let ball = Ball::build(&oracle, &gens, &oracle.identity(), radius, p.memory_cap())?;
            let scan = bigon_scan(
                &ball,
                p.l_max.unwrap_or(radius),
                p.budget.unwrap_or(200),
                seed,
            )?;
            let mut csv = Vec::new();
            scan.write_bigon_csv(&mut csv)?;
            let path = out_dir.join("bigons.csv");
            fs::write(&path, csv)?;
            files.push(path);
            let mut agg = String::from(
                "length,pairs,max_width,hausdorff_width,regular_count,min_lemma_slack\n",
            );
            for row in &scan.rows {
                let _ = writeln!(
                    agg,
                    "{},{},{},{},{},{}",
                    row.length,
                    row.pairs_scanned,
                    row.max_width,
                    row.max_hausdorff,
                    row.regular_count,
                    row.min_lemma_slack
                );
            }
            let path = out_dir.join("bigons_summary.csv");
            fs::write(&path, agg)?;
            files.push(path);
            let report = wrap_report(
                config,
                serde_json::json!({
                    "rows": scan.rows,
                    "budget_exhausted": scan.budget_exhausted,
                }),
            );
            files.push(write_json(out_dir, "bigons.json", &report)?);
            report
        }
        Command::Height => {
            let samples = p
                .function
                .clone()
                .ok_or_else(|| CliError::Schema("height needs params.function".into()))?;
            let f = ProperFunction::new(samples).map_err(|e| CliError::Schema(e.to_string()))?;
            let h = height_hk(&f, p.k.unwrap_or(1.0), p.grid_step.unwrap_or(0.5))?;
            let report = wrap_report(
                config,
                serde_json::json!({
                    "h_k": h.h_k,
                    "k": h.k,
                    "witness": h.witness,
                    "grid_step": h.grid_step,
                    "max_f": f.max(),
                    "height_bound": (2.0 * h.k + 1.0) * h.h_k,
                }),
            );
            files.push(write_json(out_dir, "height.json", &report)?);
            report
        }
        Command::Criteria => {
            let params = derive_parameters(
                p.factor_a.unwrap_or(2.0),
                p.prob_a.unwrap_or(0.5),
                p.factor_b.unwrap_or(4.0),
                p.prob_b.unwrap_or(0.25),
                p.r.unwrap_or(0),
            )?;
            let report = wrap_report(config, serde_json::to_value(&params).unwrap_or_default());
            files.push(write_json(out_dir, "criteria.json", &report)?);
            report
        }
        Command::Report => {
            let cfg = EvidenceConfig {
                ball_radius: p.radius(),
                n_max: p.n_max(),
                pi_r_list: p.r_list.clone().unwrap_or_else(|| vec![1, 2, 3]),
                pi_samples: p.samples.unwrap_or(5),
                bigon_l_max: p.l_max.unwrap_or(6),
                bigon_budget: p.budget.unwrap_or(100),
                theorem2_r_list: p.r_list.clone().unwrap_or_else(|| vec![1, 2]),
                theorem2_samples: p.samples.unwrap_or(3),
                epsilon: p.epsilon,
                conditions: match (p.factor_a, p.prob_a, p.factor_b, p.prob_b) {
                    (Some(fa), Some(pa), Some(fb), Some(pb)) => Some((fa, pa, fb, pb)),
                    _ => None,
                },
                condition_c_list: p.c_list.clone().unwrap_or_else(|| vec![1, 2]),
                condition_samples: p.samples.unwrap_or(4),
                working_pad: p.working_pad.unwrap_or(2),
                seed,
                memory_cap: p.memory_cap(),
                rho_plus: p.rho_plus,
                delta: p.delta,
            };
            let rep = hyperbolicity_report(&oracle, &gens, &measure, cfg)?;
            // human-readable verdict table
            let mut table = String::new();
            let _ = writeln!(table, "{:<14} {:<26} caveat", "criterion", "verdict");
            for c in &rep.criteria {
                let _ = writeln!(
                    table,
                    "{:<14} {:<26} {}",
                    c.id,
                    verdict_str(c.verdict),
                    c.caveat
                );
            }
            let _ = writeln!(table, "\n{}", rep.caveat);
            let path = out_dir.join("report.txt");
            fs::write(&path, &table)?;
            files.push(path);
            // per-criterion CSV appendices
            let mut pi_csv = String::from("r,min_pi,median_pi,pi_infinite\n");
            for row in &rep.pi.rows {
                let _ = writeln!(
                    pi_csv,
                    "{},{},{},{}",
                    row.r,
                    row.min_pi.map_or(String::new(), |v| format!("{v}")),
                    row.median_pi.map_or(String::new(), |v| format!("{v}")),
                    row.pi_infinite
                );
            }
            let path = out_dir.join("report_pi.csv");
            fs::write(&path, pi_csv)?;
            files.push(path);
            if let Some(bigons) = &rep.bigons {
                let mut csv = Vec::new();
                bigons.write_bigon_csv(&mut csv)?;
                let path = out_dir.join("report_bigons.csv");
                fs::write(&path, csv)?;
                files.push(path);
            }
            let report = wrap_report(config, serde_json::to_value(&rep).unwrap_or_default());
            files.push(write_json(out_dir, "report.json", &report)?);
            report
        }
    };
    let primary = serde_json::to_string_pretty(&primary).expect("serializes") + "\n";
    Ok(RunOutput { files, primary })
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::ConsistentWithHyperbolic => "consistent-with-hyperbolic",
        Verdict::Violation => "violation",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn word_or_identity(
    oracle: &crate::groups::GroupOracle,
    gens: &crate::groups::GeneratorSet,
    word: Option<&str>,
) -> Result<crate::groups::GroupElement, CliError> {
    match word {
        None => Ok(oracle.identity()),
        Some(w) => Ok(element_of_word(oracle, gens, w)?),
    }
}

fn hit_json(
    kind: &str,
    oracle: &crate::groups::GroupOracle,
    x: &crate::groups::GroupElement,
    y: Option<&crate::groups::GroupElement>,
    z: &crate::groups::GroupElement,
    r: u32,
    rep: &crate::ancona::HitReport,
) -> serde_json::Value {
    serde_json::json!({
        "kind": kind,
        "x": oracle.display(x),
        "y": y.map(|y| oracle.display(y)),
        "z": oracle.display(z),
        "r": r,
        "lower": rep.lower,
        "upper": rep.upper,
        "estimate": rep.estimate,
        "method": rep.method,
        "seed": rep.seed,
    })
}

/// Used by the byte-reproducibility contract: strips the timestamp line so
/// two runs of the same config can be compared byte for byte.
pub fn strip_timestamp(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses a config document (JSON).
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
}
