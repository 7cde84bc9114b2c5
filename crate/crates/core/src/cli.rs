//! Batch front end: `psido <command> --config <file>` reads a flat JSON
//! config, runs one computation and writes reports into the output directory.
//!
//! Exit codes: 0 success, 2 computed but the verdict is false, 1 error.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::characterize::{
    blowup_probe, compose_and_classify, inert_epsilon, recover_symbol, BlowupParams, CompositionParams,
    RecoveryOptions,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{
    iterated_commutator, membership, op_norm, op_norm_compressed, Block, MembershipParams, NormEstimate,
};
use crate::oscint::{oscint_ibp, oscint_regularized, Cutoff, Regularizer, TraceRow};
use crate::parse;
use crate::report;
use crate::selftest::run_selftest;
use crate::spaces::{bessel_norm, hoelder_norm, zygmund_norm, SpaceTag};
use crate::symbols::{hoelder_class_table, ClassParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT_FALSE: i32 = 2;

/// Config schema, published alongside the crate.
pub const CONFIG_SCHEMA: &str = include_str!("../schema/config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Norm,
    Seminorm,
    Apply,
    Oscint,
    Commutator,
    Membership,
    Recover,
    Compose,
    Blowup,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Seminorm => "seminorm",
            Command::Apply => "apply",
            Command::Oscint => "oscint",
            Command::Commutator => "commutator",
            Command::Membership => "membership",
            Command::Recover => "recover",
            Command::Compose => "compose",
            Command::Blowup => "blowup",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "psido", version, about = "Numerical laboratory for non-smooth pseudodifferential operators")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config file; omitted keys take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default `psido-<command>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid override `N,L`, e.g. `128,4pi`.
    #[arg(long, value_name = "N,L")]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub quiet: bool,
}

const COMMON_KEYS: [&str; 7] = ["dim", "n", "N", "half_length", "L", "seed", "out"];
const DEFAULT_SEED: u64 = 0x5eed;

fn default_dim() -> usize {
    1
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Keys shared by all commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default, alias = "N")]
    pub n: Option<usize>,
    #[serde(default, alias = "L")]
    pub half_length: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn half() -> f64 {
    0.5
}
fn unit() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn one_u32() -> u32 {
    1
}
fn gauss() -> String {
    "gauss".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub space: SpaceTag,
    /// Coefficient expression sampled on the grid.
    pub f: String,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default)]
    pub m: u32,
    #[serde(default = "unit")]
    pub s: f64,
    #[serde(default = "two")]
    pub q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormConfig {
    pub symbol: String,
    #[serde(default, alias = "m")]
    pub order: f64,
    #[serde(default = "unit")]
    pub rho: f64,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default = "one_u32")]
    pub budget: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplyConfig {
    #[serde(alias = "T")]
    pub operator: String,
    #[serde(default = "gauss")]
    pub f: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscintMethod {
    Regularized,
    Ibp,
}

fn default_amplitude() -> String {
    "gaussian".into()
}
fn default_method() -> OscintMethod {
    OscintMethod::Regularized
}
fn default_cutoff() -> Cutoff {
    Cutoff::Gaussian
}
fn default_schedule() -> Vec<f64> {
    Regularizer::default().schedule
}
fn two_u32() -> u32 {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscintConfig {
    #[serde(default = "default_amplitude")]
    pub amplitude: String,
    #[serde(default = "default_method")]
    pub method: OscintMethod,
    #[serde(default = "default_cutoff")]
    pub cutoff: Cutoff,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default = "two_u32")]
    pub l: u32,
    #[serde(default = "two_u32")]
    pub lp: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorConfig {
    #[serde(alias = "T")]
    pub operator: String,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    #[serde(default)]
    pub s_from: f64,
    #[serde(default = "two")]
    pub q: f64,
    #[serde(default)]
    pub compressed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipConfig {
    #[serde(alias = "T")]
    pub operator: String,
    #[serde(default, alias = "m")]
    pub order: f64,
    #[serde(default = "unit")]
    pub rho: f64,
    #[serde(default)]
    pub mtilde: u32,
    #[serde(default)]
    pub budget: u32,
    #[serde(default = "two")]
    pub q: f64,
}

fn default_tolerance() -> f64 {
    5e-3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    #[serde(alias = "T")]
    pub operator: String,
    #[serde(default)]
    pub m: f64,
    /// Default: the largest ε ≤ 0.05 with inert cutoffs on the grid.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Default: `{order: m, rho: 1, tau: 0.5, budget: 1}`.
    #[serde(default)]
    pub class: Option<ClassParams>,
}

fn three_u32() -> u32 {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeConfig {
    pub p1: String,
    pub p2: String,
    #[serde(default = "one_u32")]
    pub mtilde: u32,
    #[serde(default = "three_u32")]
    pub budget: u32,
    #[serde(default = "two")]
    pub q: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_sizes() -> Vec<usize> {
    vec![32, 64, 128]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupConfig {
    /// Coefficient expression `a(x)`.
    pub a: String,
    #[serde(default = "half")]
    pub tau: f64,
    #[serde(default)]
    pub axis: usize,
    #[serde(default)]
    pub order: f64,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {}

/// What a run produced: a one-line summary and, where the command has one, a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub verdict: Option<bool>,
    pub out: PathBuf,
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn read_config(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config { path: ".".into(), message: format!("invalid JSON: {e}") })?;
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Config { path: ".".into(), message: "config must be a JSON object".into() }),
    }
}

fn parse_grid_flag(spec: &str) -> Result<(usize, f64)> {
    let bad = || Error::Config { path: "--grid".into(), message: format!("expected `N,L`, got `{spec}`") };
    let (n, l) = spec.split_once(',').ok_or_else(bad)?;
    let n = n.trim().parse::<usize>().map_err(|_| bad())?;
    Ok((n, parse::length(l).map_err(|_| bad())?))
}

/// Resolved common settings for one run.
struct Context {
    common: CommonConfig,
    grid: Grid,
    out: PathBuf,
    command: Command,
}

impl Context {
    fn write_effective<T: Serialize>(&self, block: &T) -> Result<()> {
        let mut merged = match serde_json::to_value(&self.common)? {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        merged.remove("out");
        if let Value::Object(b) = serde_json::to_value(block)? {
            merged.extend(b);
        }
        report::write_json(&self.out.join("effective_config.json"), &Value::Object(merged))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn setup(cli: &Cli) -> Result<(Context, Map<String, Value>)> {
    let config = read_config(cli.config.as_deref())?;
    let (common, block): (Map<String, Value>, Map<String, Value>) =
        config.into_iter().partition(|(k, _)| COMMON_KEYS.contains(&k.as_str()));
    let mut common: CommonConfig = from_value(Value::Object(common))?;
    if let Some(g) = &cli.grid {
        let (n, l) = parse_grid_flag(g)?;
        common.n = Some(n);
        common.half_length = Some(l);
    }
    if let Some(seed) = cli.seed {
        common.seed = seed;
    }
    let default = Grid::default_for(common.dim)?;
    let n = *common.n.get_or_insert(default.n);
    let l = *common.half_length.get_or_insert(if cli.command == Command::Blowup { PI } else { default.half_length });
    let grid = Grid::new(common.dim, n, l)?;
    let out = cli
        .out
        .clone()
        .or_else(|| common.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("psido-{}", cli.command.name())));
    std::fs::create_dir_all(&out)?;
    Ok((Context { common, grid, out, command: cli.command }, block))
}

fn csv_file(path: &Path, f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>) -> Result<()> {
    let mut w = report::create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run_norm(ctx: &Context, cfg: NormConfig) -> Result<Outcome> {
    let f = parse::function(&cfg.f, &ctx.grid)?;
    let mut rep = match cfg.space {
        SpaceTag::Zygmund => zygmund_norm(&f, cfg.tau)?,
        SpaceTag::Hoelder => hoelder_norm(&f, cfg.m, cfg.s)?,
        SpaceTag::Bessel => bessel_norm(&f, cfg.s, cfg.q)?,
        SpaceTag::Lebesgue => bessel_norm(&f, 0.0, cfg.q)?,
    };
    if cfg.space == SpaceTag::Lebesgue {
        rep.space = SpaceTag::Lebesgue;
        rep.params.s = None;
    }
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    csv_file(&ctx.path("bands.csv"), |w| report::write_bands_csv(w, &rep))?;
    csv_file(&ctx.path("refinement.csv"), |w| report::write_refinement_csv(w, &rep))?;
    report::write_grid_file(&ctx.path("f.bin"), &f)?;
    Ok(Outcome { summary: format!("{:?} norm of {} = {}", rep.space, cfg.f, rep.value), verdict: None, out: ctx.out.clone() })
}

fn run_seminorm(ctx: &Context, cfg: SeminormConfig) -> Result<Outcome> {
    let p = parse::symbol(&cfg.symbol)?;
    let table = hoelder_class_table(&p, &ctx.grid, cfg.tau, cfg.order, cfg.rho, cfg.budget)?;
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &table)?;
    csv_file(&ctx.path("seminorms.csv"), |w| report::write_seminorm_csv(w, &table))?;
    Ok(Outcome {
        summary: format!("{} in C^{}_* S^{}: {}", cfg.symbol, cfg.tau, cfg.order, table.verdict),
        verdict: Some(table.verdict),
        out: ctx.out.clone(),
    })
}

#[derive(Serialize)]
struct ApplyReport<'a> {
    operator: String,
    input: &'a str,
    input_l2: f64,
    output_l2: f64,
    output_sup: f64,
}

fn run_apply(ctx: &Context, cfg: ApplyConfig) -> Result<Outcome> {
    let t = parse::operator(&cfg.operator, &ctx.grid)?;
    let u = parse::function(&cfg.f, &ctx.grid)?;
    let v = t.apply(&u)?;
    let rep = ApplyReport {
        operator: t.label(),
        input: &cfg.f,
        input_l2: u.l2_norm(),
        output_l2: v.l2_norm(),
        output_sup: v.sup_norm(),
    };
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    report::write_grid_file(&ctx.path("input.bin"), &u)?;
    report::write_grid_file(&ctx.path("output.bin"), &v)?;
    Ok(Outcome { summary: format!("applied {}: |Tu|_2 = {}", rep.operator, rep.output_l2), verdict: None, out: ctx.out.clone() })
}

#[derive(Serialize)]
struct OscintReport {
    amplitude: String,
    method: OscintMethod,
    value_re: f64,
    value_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regularized: Option<crate::oscint::OscintResult>,
}

fn run_oscint(ctx: &Context, cfg: OscintConfig) -> Result<Outcome> {
    let a = parse::amplitude(&cfg.amplitude, ctx.grid.dim)?;
    let (value, regularized, trace): (_, _, Vec<TraceRow>) = match cfg.method {
        OscintMethod::Regularized => {
            let reg = Regularizer { cutoff: cfg.cutoff, schedule: cfg.schedule.clone() };
            let r = oscint_regularized(&a, &reg)?;
            (r.value, Some(r.clone()), r.trace)
        }
        OscintMethod::Ibp => (oscint_ibp(&a, cfg.l, cfg.lp)?, None, Vec::new()),
    };
    let rep = OscintReport { amplitude: a.label.clone(), method: cfg.method, value_re: value.re, value_im: value.im, regularized };
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    csv_file(&ctx.path("trace.csv"), |w| report::write_trace_csv(w, &trace))?;
    Ok(Outcome { summary: format!("os-integral of {} = {value}", cfg.amplitude), verdict: None, out: ctx.out.clone() })
}

#[derive(Serialize)]
struct CommutatorReport<'a> {
    operator: String,
    alpha: &'a [u32],
    beta: &'a [u32],
    s_from: f64,
    q: f64,
    compressed: bool,
    norm: NormEstimate,
}

fn run_commutator(ctx: &Context, cfg: CommutatorConfig) -> Result<Outcome> {
    let dim = ctx.grid.dim;
    if cfg.alpha.len() != dim || cfg.beta.len() != dim {
        return Err(Error::Config { path: "alpha".into(), message: format!("alpha and beta need {dim} entries") });
    }
    let t = parse::operator(&cfg.operator, &ctx.grid)?;
    let c = iterated_commutator(t, &Block::decompose(&cfg.alpha, &cfg.beta))?;
    let norm = if cfg.compressed { op_norm_compressed(&c, cfg.s_from, cfg.q)? } else { op_norm(&c, cfg.s_from, cfg.q)? };
    let rep = CommutatorReport {
        operator: c.label(),
        alpha: &cfg.alpha,
        beta: &cfg.beta,
        s_from: cfg.s_from,
        q: cfg.q,
        compressed: cfg.compressed,
        norm,
    };
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    Ok(Outcome { summary: format!("|{}| = {}", rep.operator, norm.value), verdict: None, out: ctx.out.clone() })
}

fn run_membership(ctx: &Context, cfg: MembershipConfig) -> Result<Outcome> {
    let family = parse::operator_family(&cfg.operator)?;
    let params = MembershipParams { order: cfg.order, rho: cfg.rho, mtilde: cfg.mtilde, budget: cfg.budget, q: cfg.q };
    let mut rep = membership(&family, &ctx.grid, params)?;
    rep.operator = cfg.operator.clone();
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    csv_file(&ctx.path("membership.csv"), |w| report::write_membership_csv(w, &rep))?;
    Ok(Outcome {
        summary: format!("{} membership: {} ({} entries)", cfg.operator, rep.verdict, rep.entries.len()),
        verdict: Some(rep.verdict),
        out: ctx.out.clone(),
    })
}

fn verdict_text(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn run_recover(ctx: &Context, mut cfg: RecoverConfig) -> Result<Outcome> {
    let t = parse::operator(&cfg.operator, &ctx.grid)?;
    let eps = *cfg.epsilon.get_or_insert(inert_epsilon(&ctx.grid));
    let class = *cfg.class.get_or_insert(ClassParams { order: cfg.m, rho: 1.0, tau: 0.5, budget: 1 });
    let opts = RecoveryOptions {
        epsilon: Some(eps),
        order: cfg.m,
        tolerance: cfg.tolerance,
        class: Some(class),
        seed: ctx.common.seed,
        ..RecoveryOptions::default()
    };
    let r = recover_symbol(&t, &opts)?;
    ctx.write_effective(&cfg)?;
    report::write_recovery_bundle(&ctx.out, &r)?;
    let verdict = !r.failed && r.verdict().unwrap_or(true);
    Ok(Outcome {
        summary: format!(
            "recovered {}: replay {:.3e}, class verdict {}",
            cfg.operator,
            r.replay_error,
            verdict_text(r.verdict())
        ),
        verdict: Some(verdict),
        out: ctx.out.clone(),
    })
}

fn run_compose(ctx: &Context, mut cfg: ComposeConfig) -> Result<Outcome> {
    let (p1, p2) = (parse::symbol(&cfg.p1)?, parse::symbol(&cfg.p2)?);
    let eps = *cfg.epsilon.get_or_insert(inert_epsilon(&ctx.grid));
    let params = CompositionParams { mtilde: cfg.mtilde, budget: cfg.budget, q: cfg.q };
    let opts = RecoveryOptions { epsilon: Some(eps), tolerance: cfg.tolerance, seed: ctx.common.seed, ..RecoveryOptions::default() };
    let rep = compose_and_classify(&p1, &p2, &ctx.grid, &params, &opts)?;
    ctx.write_effective(&cfg)?;
    report::write_recovery_bundle(&ctx.out, &rep.recovered)?;
    report::write_json(&ctx.path("conditions.json"), &rep.conditions)?;
    let verdict = !rep.recovered.failed && rep.recovered.verdict().unwrap_or(true);
    Ok(Outcome {
        summary: format!(
            "{} . {}: conditions {}, replay {:.3e}, class verdict {}",
            cfg.p1,
            cfg.p2,
            if rep.conditions.all_hold() { "hold" } else { "fail" },
            rep.recovered.replay_error,
            verdict_text(rep.recovered.verdict())
        ),
        verdict: Some(verdict),
        out: ctx.out.clone(),
    })
}

fn run_blowup(ctx: &Context, cfg: BlowupConfig) -> Result<Outcome> {
    let a = parse::coefficient(&cfg.a)?;
    let params = BlowupParams {
        dim: ctx.grid.dim,
        axis: cfg.axis,
        tau: cfg.tau,
        order: cfg.order,
        sizes: cfg.sizes.clone(),
        half_length: ctx.grid.half_length,
    };
    let rep = blowup_probe(&a, &params)?;
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    csv_file(&ctx.path("blowup.csv"), |w| report::write_blowup_csv(w, &rep))?;
    Ok(Outcome {
        summary: format!("commutator growth for {}: {:.3} per doubling (flagged: {})", cfg.a, rep.growth, rep.flagged),
        verdict: None,
        out: ctx.out.clone(),
    })
}

fn run_selftest_command(ctx: &Context, cfg: SelftestConfig) -> Result<Outcome> {
    let rep = run_selftest();
    ctx.write_effective(&cfg)?;
    report::write_json(&ctx.path("report.json"), &rep)?;
    let passed = rep.rows.iter().filter(|r| r.pass).count();
    Ok(Outcome {
        summary: format!("selftest: {passed}/{} checks pass", rep.rows.len()),
        verdict: Some(rep.pass),
        out: ctx.out.clone(),
    })
}

/// Runs one command and writes its artifacts.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let (ctx, block) = setup(cli)?;
    let block = Value::Object(block);
    let outcome = match ctx.command {
        Command::Norm => run_norm(&ctx, from_value(block)?),
        Command::Seminorm => run_seminorm(&ctx, from_value(block)?),
        Command::Apply => run_apply(&ctx, from_value(block)?),
        Command::Oscint => run_oscint(&ctx, from_value(block)?),
        Command::Commutator => run_commutator(&ctx, from_value(block)?),
        Command::Membership => run_membership(&ctx, from_value(block)?),
        Command::Recover => run_recover(&ctx, from_value(block)?),
        Command::Compose => run_compose(&ctx, from_value(block)?),
        Command::Blowup => run_blowup(&ctx, from_value(block)?),
        Command::Selftest => run_selftest_command(&ctx, from_value(block)?),
    }?;
    report::write_metadata(&ctx.out, ctx.command.name())?;
    Ok(outcome)
}

pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.verdict == Some(false) => EXIT_VERDICT_FALSE,
        Ok(_) => EXIT_OK,
        Err(_) => EXIT_ERROR,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("PSIDO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses arguments, runs the command, prints the summary and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    configure_threads();
    let result = execute(&cli);
    match &result {
        Ok(o) if !cli.quiet => println!("{}", o.summary),
        Ok(_) => {}
        Err(e) => eprintln!("psido {}: {e}", cli.command.name()),
    }
    exit_code(&result)
}
