//! Command-line front end.
//!
//! A run is fully described by a [`RunConfig`]. Values come from flags, then
//! an optional JSON config file, then defaults; the only environment input is
//! `LOBFLUX_OUT_DIR`, the default output directory. Every artifact embeds the
//! resolved config, and wall-clock data is written to a separate
//! `runtime.json` so payloads stay byte-identical across reruns.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytics::{
    clt_variance_continuous, clt_variance_embedded, clt_variance_markov, drift_d, embedded_drift_v, ldp_exponent,
    mean_spread, next_move_prob, optimal_price_trajectories, optimal_spread_trajectory, rate_function,
    stationary_mu, stationary_pi, DriftMethod, PiecewiseLinearTrajectory, SERIES_EPS,
};
use crate::error::{invalid, Error, Result};
use crate::estimate::{estimate_rates, parse_event_log};
use crate::model::{BookState, CatastropheDist, HcParams, LlgParams, NcParams, RegimeSpec};
use crate::simulate::{simulate_book, simulate_spread, EmbeddedWalk, Embedding};
use crate::verify::{run_check, CheckName, CheckReport, Verdict, VerifySettings};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "LOBFLUX_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Simulate,
    Analyze,
    Estimate,
    Ldp,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SimulateMode {
    /// Book events `t,side,direction,delta,bid,ask`.
    #[default]
    Book,
    /// Spread jumps `t,spread`.
    Spread,
    /// Embedded chain `n,spread,f,price`.
    Embedded,
}

fn default_regime() -> RegimeSpec {
    RegimeSpec::hc(HcParams { alpha_plus: 5.0, alpha_minus: 3.0, beta_plus: 2.0, beta_minus: 4.0 })
}

/// Complete, serializable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub regime: RegimeSpec,
    pub seed: u64,
    /// Defaults to `$LOBFLUX_OUT_DIR`, then `out`.
    pub out_dir: Option<PathBuf>,
    /// Seconds; simulate defaults to 900.
    pub horizon: Option<f64>,
    /// Embedded steps for `simulate --mode embedded`.
    pub steps: Option<u64>,
    pub mode: SimulateMode,
    pub initial_bid: i64,
    pub initial_ask: i64,
    /// Event CSV read by `estimate`.
    pub input: Option<PathBuf>,
    pub t_obs: Option<f64>,
    /// Terminal level `x` for `ldp`.
    pub level: Option<f64>,
    /// Checks run by `verify`; empty means all.
    pub checks: Vec<CheckName>,
    /// Series tail tolerance for stationary tables.
    pub eps: f64,
    pub verify: VerifySettings,
    /// Worker threads; unset uses every core. Results do not depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Simulate,
            regime: default_regime(),
            seed: 1,
            out_dir: None,
            horizon: None,
            steps: None,
            mode: SimulateMode::Book,
            initial_bid: 100,
            initial_ask: 101,
            input: None,
            t_obs: None,
            level: None,
            checks: Vec::new(),
            eps: SERIES_EPS,
            verify: VerifySettings::default(),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn validate(&self) -> Result<()> {
        self.regime.validate()?;
        BookState::new(self.initial_bid, self.initial_ask)?;
        if !(self.eps > 0.0 && self.eps <= 1e-2) {
            return Err(invalid("eps must lie in (0, 1e-2]"));
        }
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(invalid("horizon must be positive"));
            }
        }
        if self.command == Command::Estimate && self.input.is_none() {
            return Err(invalid("estimate needs an input event log"));
        }
        Ok(())
    }

    /// One-line JSON used in CSV headers.
    fn header_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Checks with a `fail` verdict (verify only).
    pub failed_checks: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failed_checks.is_empty())
    }
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    fn json(&mut self, name: &str, config: &RunConfig, report: &impl Serialize) -> Result<()> {
        let doc = json!({"schema_version": SCHEMA_VERSION, "config": config, "report": report});
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn csv_comments(config: &RunConfig) -> Vec<String> {
        vec![format!("schema_version={SCHEMA_VERSION}"), format!("config={}", config.header_json())]
    }

    fn trajectory(&mut self, name: &str, config: &RunConfig, f: &PiecewiseLinearTrajectory) -> Result<()> {
        let mut w = self.create(name)?;
        for c in Self::csv_comments(config) {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "t,y")?;
        for (t, y) in f.points() {
            writeln!(w, "{t},{y}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the config back from the `# config=` line of a CSV artifact.
pub fn config_from_csv_header(text: &str) -> Result<RunConfig> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.trim_start_matches('#').trim().strip_prefix("config=").map(str::to_owned))
        .ok_or_else(|| Error::Parse { line: 0, message: "no config line in header".into() })
        .and_then(|s| RunConfig::from_json(&s))
}

/// Executes a run and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let mut out = Artifacts::new(config.resolved_out_dir())?;
    let mut failed = Vec::new();
    let mut runtimes = serde_json::Map::new();
    match config.command {
        Command::Simulate => simulate_cmd(config, &mut out)?,
        Command::Analyze => analyze_cmd(config, &mut out)?,
        Command::Estimate => estimate_cmd(config, &mut out)?,
        Command::Ldp => ldp_cmd(config, &mut out)?,
        Command::Verify => {
            let reports = verify_cmd(config, &mut out)?;
            for r in &reports {
                runtimes.insert(r.name.clone(), json!(r.runtime_seconds));
                if r.verdict == Verdict::Fail {
                    failed.push(r.name.clone());
                }
            }
        }
    }
    runtimes.insert("total".into(), json!(start.elapsed().as_secs_f64()));
    let mut w = BufWriter::new(File::create(out.dir.join("runtime.json"))?);
    serde_json::to_writer_pretty(&mut w, &json!({"runtime_seconds": runtimes}))?;
    writeln!(w)?;
    w.flush()?;
    Ok(RunOutcome { files: out.files, failed_checks: failed })
}

fn simulate_cmd(config: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let horizon = config.horizon.unwrap_or(900.0);
    let mut comments = Artifacts::csv_comments(config);
    match config.mode {
        SimulateMode::Book => {
            let init = BookState::new(config.initial_bid, config.initial_ask)?;
            let path = simulate_book(&config.regime, init, horizon, config.seed)?;
            comments.push(format!("horizon={horizon}"));
            let mut w = out.create("events.csv")?;
            path.write_csv(&mut w, &comments)?;
            w.flush()?;
        }
        SimulateMode::Spread => {
            let k0 = BookState::new(config.initial_bid, config.initial_ask)?.spread();
            let path = simulate_spread(&config.regime, k0, horizon, config.seed)?;
            comments.push(format!("horizon={horizon}"));
            let mut w = out.create("spread.csv")?;
            for c in &comments {
                writeln!(w, "# {c}")?;
            }
            writeln!(w, "t,spread")?;
            writeln!(w, "0,{k0}")?;
            for (t, k) in &path.jumps {
                writeln!(w, "{t},{k}")?;
            }
            w.flush()?;
        }
        SimulateMode::Embedded => {
            let params = config.regime.analytic_params()?;
            let steps = config.steps.unwrap_or(10_000);
            let mut walk = EmbeddedWalk::new(&params, Embedding::JumpSkeleton, 1, config.seed, 0);
            let mut w = out.create("embedded.csv")?;
            for c in &comments {
                writeln!(w, "# {c}")?;
            }
            writeln!(w, "n,spread,f,price")?;
            writeln!(w, "0,1,0,0")?;
            let mut p = 0i64;
            for n in 1..=steps {
                let (s, f) = walk.step();
                p += f;
                writeln!(w, "{n},{s},{f},{p}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn table_csv(out: &mut Artifacts, name: &str, config: &RunConfig, values: &[f64]) -> Result<()> {
    let mut w = out.create(name)?;
    for c in Artifacts::csv_comments(config) {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "k,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{v}", i + 1)?;
    }
    w.flush()?;
    Ok(())
}

fn analyze_cmd(config: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let p = config.regime.analytic_params()?;
    let mu = stationary_mu(&p, config.eps)?;
    let pi = stationary_pi(&p, config.eps)?;
    let mut d = serde_json::Map::new();
    for m in DriftMethod::ALL {
        d.insert(m.as_str().into(), json!(drift_d(&p, m)?));
    }
    let report = json!({
        "mu": mu.values,
        "mu_tail_bound": mu.tail_bound,
        "pi": pi.values,
        "pi_tail_bound": pi.tail_bound,
        "mean_spread": mean_spread(&p)?,
        "v": embedded_drift_v(&p)?,
        "D": d,
        "var_embedded": clt_variance_embedded(&p)?,
        "var_continuous": clt_variance_continuous(&p)?,
        "var_markov": clt_variance_markov(&p)?,
        "next_move_prob": next_move_prob(&p)?,
        "gamma_plus": p.gamma_plus(),
        "gamma_minus": p.gamma_minus(),
    });
    out.json("analysis.json", config, &report)?;
    table_csv(out, "mu.csv", config, &mu.values)?;
    table_csv(out, "pi.csv", config, &pi.values)
}

fn estimate_cmd(config: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let input = config.input.as_ref().ok_or_else(|| invalid("estimate needs an input event log"))?;
    let log = parse_event_log(File::open(input)?, config.t_obs)?;
    let est = estimate_rates(&log)?;
    out.json("estimate.json", config, &est)
}

fn ldp_cmd(config: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let p = config.regime.analytic_params()?;
    let x = config.level.ok_or_else(|| invalid("ldp needs a terminal level"))?;
    let spread = optimal_spread_trajectory(x, &p)?;
    let (bid, ask) = optimal_price_trajectories(x, &p)?;
    let report = json!({
        "x": x,
        "exponent": ldp_exponent(x, &p)?,
        "rate_function_at_optimum": rate_function(&spread, &p).value,
        "t_x": if x < p.gamma_plus() { 1.0 - x / p.gamma_plus() } else { 0.0 },
        "spread": spread.points(),
        "bid": bid.points(),
        "ask": ask.points(),
    });
    out.json("ldp.json", config, &report)?;
    out.trajectory("trajectory_spread.csv", config, &spread)?;
    out.trajectory("trajectory_bid.csv", config, &bid)?;
    out.trajectory("trajectory_ask.csv", config, &ask)
}

fn verify_cmd(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<CheckReport>> {
    let names = if config.checks.is_empty() { CheckName::ALL.to_vec() } else { config.checks.clone() };
    let mut reports = Vec::new();
    for name in names {
        let report = run_check(name, &config.regime, &config.verify, config.seed)?;
        out.json(&format!("verify_{}.json", name.as_str()), config, &report)?;
        reports.push(report);
    }
    let mut w = out.create("verify_summary.csv")?;
    for c in Artifacts::csv_comments(config) {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "check,verdict,target,estimate,ci_low,ci_high,replicas,seed,negative_control_flagged")?;
    for r in &reports {
        let verdict = serde_json::to_value(r.verdict)?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.name,
            verdict.as_str().unwrap_or_default(),
            r.target,
            r.estimate,
            r.ci[0],
            r.ci[1],
            r.replicas,
            r.seed,
            r.negative_control.as_ref().map_or(String::new(), |n| n.flagged.to_string())
        )?;
    }
    w.flush()?;
    Ok(reports)
}

#[derive(Debug, Parser)]
#[command(name = "lobflux", version, about = "Limit order book spread model: simulate, analyze, estimate, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Simulate a path and write it as CSV.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<SimulateMode>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        initial_bid: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        initial_ask: Option<i64>,
    },
    /// Closed-form stationary and asymptotic quantities (HC, uniform catastrophes).
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Estimate HC rates from an event CSV.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        t_obs: Option<f64>,
    },
    /// Large-deviation exponent and optimal trajectories for a terminal level.
    Ldp {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        level: Option<f64>,
    },
    /// Run Monte Carlo checks (`--check all` or repeated names).
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "check")]
        checks: Vec<String>,
    },
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long)]
    pub alpha_plus: Option<f64>,
    #[arg(long)]
    pub alpha_minus: Option<f64>,
    #[arg(long)]
    pub beta_plus: Option<f64>,
    #[arg(long)]
    pub beta_minus: Option<f64>,
    /// NC closing exponent.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub kappa_a: Option<f64>,
    #[arg(long)]
    pub kappa_b: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// HC catastrophe law as JSON, e.g. `{"kind":"uniform"}`.
    #[arg(long)]
    pub catastrophe: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn base_rates(regime: &RegimeSpec) -> [f64; 4] {
    match regime {
        RegimeSpec::Hc { params: p, .. } => [p.alpha_plus, p.alpha_minus, p.beta_plus, p.beta_minus],
        RegimeSpec::Nc { params: p } => [p.alpha_plus, p.alpha_minus, p.beta_plus, p.beta_minus],
        RegimeSpec::Llg { params: p } => [p.alpha_plus, p.alpha_minus, p.beta_plus, p.beta_minus],
    }
}

fn apply_regime_flags(current: RegimeSpec, a: &CommonArgs) -> Result<RegimeSpec> {
    let name = a.regime.clone().unwrap_or_else(|| current.name().to_string());
    if !["hc", "nc", "llg"].contains(&name.as_str()) {
        return Err(Error::Unknown { kind: "regime", name });
    }
    let switching = name != current.name();
    let keep = if switching { None } else { Some(base_rates(&current)) };
    let rate = |flag: Option<f64>, i: usize, what: &str| {
        flag.or(keep.map(|r| r[i])).ok_or_else(|| invalid(format!("--{what} is required for --regime {name}")))
    };
    let ap = rate(a.alpha_plus, 0, "alpha-plus")?;
    let am = rate(a.alpha_minus, 1, "alpha-minus")?;
    let bp = rate(a.beta_plus, 2, "beta-plus")?;
    let bm = rate(a.beta_minus, 3, "beta-minus")?;
    let need = |flag: Option<f64>, old: Option<f64>, what: &str| {
        flag.or(old).ok_or_else(|| invalid(format!("--{what} is required for --regime {name}")))
    };
    let spec = match name.as_str() {
        "hc" => {
            let old = match current {
                RegimeSpec::Hc { catastrophe, .. } => catastrophe,
                _ => CatastropheDist::Uniform,
            };
            let catastrophe = match &a.catastrophe {
                Some(s) => serde_json::from_str(s)?,
                None => old,
            };
            RegimeSpec::Hc { params: HcParams { alpha_plus: ap, alpha_minus: am, beta_plus: bp, beta_minus: bm }, catastrophe }
        }
        "nc" => {
            let old = match current {
                RegimeSpec::Nc { params } => Some(params.mu),
                _ => None,
            };
            let mu = need(a.mu, old, "mu")?;
            RegimeSpec::Nc { params: NcParams { alpha_plus: ap, alpha_minus: am, beta_plus: bp, beta_minus: bm, mu } }
        }
        "llg" => {
            let old = match current {
                RegimeSpec::Llg { params } => Some(params),
                _ => None,
            };
            RegimeSpec::Llg {
                params: LlgParams {
                    alpha_plus: ap,
                    alpha_minus: am,
                    beta_plus: bp,
                    beta_minus: bm,
                    kappa_a: need(a.kappa_a, old.map(|o| o.kappa_a), "kappa-a")?,
                    kappa_b: need(a.kappa_b, old.map(|o| o.kappa_b), "kappa-b")?,
                    theta: need(a.theta, old.map(|o| o.theta), "theta")?,
                },
            }
        }
        other => return Err(Error::Unknown { kind: "regime", name: other.into() }),
    };
    spec.validate()?;
    Ok(spec)
}

impl Cli {
    /// Resolves flags over the config file over defaults.
    pub fn into_config(self) -> Result<RunConfig> {
        let (command, common) = match &self.command {
            CliCommand::Simulate { common, .. } => (Command::Simulate, common),
            CliCommand::Analyze { common } => (Command::Analyze, common),
            CliCommand::Estimate { common, .. } => (Command::Estimate, common),
            CliCommand::Ldp { common, .. } => (Command::Ldp, common),
            CliCommand::Verify { common, .. } => (Command::Verify, common),
        };
        let mut cfg = match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command;
        cfg.regime = apply_regime_flags(cfg.regime, common)?;
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        if let Some(d) = &common.out_dir {
            cfg.out_dir = Some(d.clone());
        }
        if let Some(e) = common.eps {
            cfg.eps = e;
        }
        if common.threads.is_some() {
            cfg.threads = common.threads;
        }
        match self.command {
            CliCommand::Simulate { horizon, mode, steps, initial_bid, initial_ask, .. } => {
                cfg.horizon = horizon.or(cfg.horizon);
                cfg.mode = mode.unwrap_or(cfg.mode);
                cfg.steps = steps.or(cfg.steps);
                cfg.initial_bid = initial_bid.unwrap_or(cfg.initial_bid);
                cfg.initial_ask = initial_ask.unwrap_or(cfg.initial_ask);
            }
            CliCommand::Estimate { input, t_obs, .. } => {
                cfg.input = input.or(cfg.input);
                cfg.t_obs = t_obs.or(cfg.t_obs);
            }
            CliCommand::Ldp { level, .. } => cfg.level = level.or(cfg.level),
            CliCommand::Verify { checks, .. } => {
                if !checks.is_empty() {
                    cfg.checks = if checks.iter().any(|c| c == "all") {
                        Vec::new()
                    } else {
                        checks.iter().map(|c| c.parse()).collect::<Result<_>>()?
                    };
                }
            }
            CliCommand::Analyze { .. } => {}
        }
        Ok(cfg)
    }
}

/// Machine-readable error document printed on failure.
pub fn error_json(e: &Error) -> Value {
    json!({"error": e.kind(), "message": e.to_string()})
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.into_config().and_then(|cfg| {
        if let Some(n) = cfg.threads {
            // Ignored if a pool already exists; results do not depend on it.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        run(&cfg)
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if !outcome.failed_checks.is_empty() {
                eprintln!("{}", json!({"failed_checks": outcome.failed_checks}));
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        Cli::try_parse_from(std::iter::once("lobflux").chain(args.iter().copied())).unwrap().into_config()
    }

    #[test]
    fn flags_build_hc_regime() {
        let cfg = parse(&[
            "simulate", "--regime", "hc", "--alpha-plus", "5", "--alpha-minus", "3", "--beta-plus", "2",
            "--beta-minus", "4", "--horizon", "900", "--seed", "1",
        ])
        .unwrap();
        assert_eq!(cfg.regime, default_regime());
        assert_eq!(cfg.horizon, Some(900.0));
        assert_eq!(cfg.command, Command::Simulate);
    }

    #[test]
    fn switching_regime_needs_its_parameters() {
        assert!(parse(&["analyze", "--regime", "nc", "--alpha-plus", "1"]).is_err());
        let cfg = parse(&[
            "simulate", "--regime", "nc", "--alpha-plus", "1", "--alpha-minus", "1", "--beta-plus", "1",
            "--beta-minus", "1", "--mu", "1.5",
        ])
        .unwrap();
        assert_eq!(cfg.regime.name(), "nc");
        assert!(matches!(parse(&["analyze", "--regime", "xyz"]), Err(Error::Unknown { .. })));
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig {
            command: Command::Verify,
            checks: vec![CheckName::Lln],
            horizon: Some(12.5),
            ..Default::default()
        };
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn verify_check_names() {
        assert!(parse(&["verify", "--check", "all"]).unwrap().checks.is_empty());
        assert_eq!(parse(&["verify", "--check", "lln", "--check", "acf"]).unwrap().checks, vec![
            CheckName::Lln,
            CheckName::Acf
        ]);
        assert!(parse(&["verify", "--check", "nope"]).is_err());
    }
}
