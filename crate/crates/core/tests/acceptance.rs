//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::time::Instant;

use common::{f_moments, fitted};
use lobflux::analytics::{
    clt_variance_embedded, global_balance_residuals, ldp_exponent, optimal_spread_trajectory,
    rate_function, stationary_mu, stationary_pi, stationary_pi_from_mu, SERIES_EPS,
};
use lobflux::cli::{run, Command, RunConfig};
use lobflux::estimate::{estimate_rates, EventLog, LoggedEvent};
use lobflux::model::{Direction, Side};
use lobflux::rng::SimRng;
use lobflux::simulate::{simulate_book, simulate_embedded_price};
use lobflux::stats::{batch_means_se, mean};
use lobflux::verify::{
    check_acf, check_clt, check_invariant_occupancy, check_ldp_decay, check_lln, check_trajectory_concentration,
    CheckName, ReturnSeries, Verdict,
};
use lobflux::{BookState, HcParams, RegimeSpec};

const SEED: u64 = 7;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome { passed, summary: summary.into() }
}

fn secs(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn invariant_measure() -> Outcome {
    let start = Instant::now();
    let p = fitted();
    let mu = stationary_mu(&p, SERIES_EPS).unwrap();
    let residual = global_balance_residuals(&mu).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let identity: f64 = mu.values.iter().enumerate().skip(1).map(|(i, m)| (i + 1) as f64 * m).sum();
    let target = 2.0 * p.gamma_plus() / p.gamma_minus();
    let occ = check_invariant_occupancy(&p, 1e5, SEED).unwrap();
    let elapsed = secs(start);
    outcome(
        residual < 1e-10 && (identity - target).abs() < 1e-8 && occ.estimate < 0.01 && elapsed < 60.0,
        format!(
            "max balance residual {residual:.2e} (< 1e-10); sum k mu(k) = {identity:.10} vs {target} (1e-8); occupancy TV {:.5} (< 0.01); {elapsed:.1}s (< 60s)",
            occ.estimate
        ),
    )
}

fn measure_consistency() -> Outcome {
    let mut rng = SimRng::new(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut r = || 0.05 + 9.95 * rng.uniform();
        let p = HcParams::new(r(), r(), r(), r()).unwrap();
        let mu = stationary_mu(&p, SERIES_EPS).unwrap();
        let pi = stationary_pi(&p, SERIES_EPS).unwrap();
        worst = worst.max(pi.total_variation(&stationary_pi_from_mu(&mu).values));
    }
    outcome(worst < 1e-12, format!("max TV over 20 random quadruples {worst:.2e} (< 1e-12)"))
}

fn lln() -> Outcome {
    let start = Instant::now();
    let r = check_lln(&fitted(), &[1e3, 1e4, 1e5], 200, SEED).unwrap();
    let elapsed = secs(start);
    let variants = r.details["variants"].to_string();
    outcome(
        r.verdict == Verdict::Pass && elapsed < 600.0,
        format!(
            "mean P_b(T)/T = {:.5} CI [{:.5}, {:.5}] vs generator {:.4} (3 SE); variants {variants}; {elapsed:.1}s (< 600s)",
            r.estimate, r.ci[0], r.ci[1], r.target
        ),
    )
}

fn clt_normality() -> Outcome {
    let start = Instant::now();
    let r = check_clt(&fitted(), 100_000, 1000, SEED, None).unwrap();
    let elapsed = secs(start);
    let m = |key: &str| r.details["standardized"][key].as_f64().unwrap_or(f64::NAN);
    outcome(
        r.verdict == Verdict::Pass && elapsed < 600.0,
        format!(
            "mean {:.4} (|.|<0.05), var {:.4} (|var-1|<0.05), skew {:.4} (|.|<0.15), exkurt {:.4} (|.|<0.3); {elapsed:.1}s (< 600s)",
            m("mean"),
            m("variance"),
            m("skewness"),
            m("excess_kurtosis")
        ),
    )
}

fn clt_variance() -> Outcome {
    let p = fitted();
    let formula = clt_variance_embedded(&p).unwrap();
    let (m1, m2) = f_moments(&p, 140);
    let oracle = m2 - m1 * m1;
    let price = simulate_embedded_price(&p, 1_000_000, SEED).unwrap();
    let f: Vec<f64> = price.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let m = mean(&f);
    let sq: Vec<f64> = f.iter().map(|x| (x - m) * (x - m)).collect();
    let sample = mean(&sq);
    let se = batch_means_se(&sq, 100);
    outcome(
        (formula - oracle).abs() < 1e-10 && (sample - formula).abs() < 3.0 * se,
        format!(
            "formula {formula:.10} vs enumeration {oracle:.10} (1e-10); 1e6-step sample variance {sample:.5} +- {se:.5} (3 SE)"
        ),
    )
}

fn ldp() -> Outcome {
    let start = Instant::now();
    let p = fitted();
    let gp = p.gamma_plus();
    let worst = (1..=30)
        .map(|i| {
            let x = 0.1 * gp * i as f64;
            let f = optimal_spread_trajectory(x, &p).unwrap();
            (rate_function(&f, &p).value - ldp_exponent(x, &p).unwrap()).abs()
        })
        .fold(0.0f64, f64::max);
    let r = check_ldp_decay(&p, 0.5, &[25.0, 50.0, 100.0], 1_000_000, SEED).unwrap();
    let elapsed = secs(start);
    let hits: Vec<String> = r.details["per_horizon"].as_array().unwrap().iter().map(|h| h["hits"].to_string()).collect();
    outcome(
        worst < 1e-12 && r.verdict == Verdict::Pass && elapsed < 1800.0,
        format!(
            "rate_function vs exponent max gap {worst:.1e} (1e-12); empirical decay {:.4} vs exponent {:.4} (25% band), hits {} at T=25/50/100; {elapsed:.1}s (< 1800s)",
            r.estimate,
            r.target,
            hits.join("/")
        ),
    )
}

fn trajectory() -> Outcome {
    let r = check_trajectory_concentration(&fitted(), 0.2, &[25.0, 50.0, 100.0], 100_000, SEED).unwrap();
    let rows = r.details["per_horizon"].as_array().unwrap();
    let fmt = |key: &str| rows.iter().map(|h| format!("{:.3}", h[key].as_f64().unwrap_or(f64::NAN))).collect::<Vec<_>>().join("/");
    let control = r.negative_control.as_ref().unwrap();
    outcome(
        r.verdict == Verdict::Pass && control.flagged,
        format!(
            "conditioned medians {} (strictly decreasing: {}); unconditioned medians {} (must not strictly decrease: {})",
            fmt("median"),
            r.details["medians_decreasing"],
            fmt("unconditioned_median"),
            control.flagged
        ),
    )
}

fn bounce() -> Outcome {
    let r = check_acf(&RegimeSpec::hc(fitted()), 1e5, SEED, 10, 1000, ReturnSeries::Bid).unwrap();
    outcome(
        r.verdict == Verdict::Pass,
        format!(
            "lag-1 ACF {:.4} 99% CI [{:.4}, {:.4}]; aggregated (x{}) lag-1 {:.4} within band +-{:.4}",
            r.estimate,
            r.ci[0],
            r.ci[1],
            r.details["aggregation"],
            r.details["aggregated_lag1"].as_f64().unwrap_or(f64::NAN),
            r.details["aggregated_noise_band"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn estimation() -> Outcome {
    let p = fitted();
    let path = simulate_book(&RegimeSpec::hc(p), BookState::new(0, 1).unwrap(), 1e4, SEED).unwrap();
    let est = estimate_rates(&EventLog::from_path(&path)).unwrap();
    let z = |hat: f64, truth: f64| (hat - truth) / (truth / 1e4).sqrt();
    let zs = [
        z(est.rates.alpha_plus, p.alpha_plus),
        z(est.rates.alpha_minus, p.alpha_minus),
        z(est.rates.beta_plus, p.beta_plus),
        z(est.rates.beta_minus, p.beta_minus),
    ];
    let classes = [
        (Side::Ask, Direction::Up, 4500),
        (Side::Ask, Direction::Down, 2700),
        (Side::Bid, Direction::Up, 1800),
        (Side::Bid, Direction::Down, 3600),
    ];
    let mut events = Vec::new();
    for (side, direction, n) in classes {
        for _ in 0..n {
            events.push(LoggedEvent { t: 0.0, side, direction, delta: 1, state_after: None });
        }
    }
    for (i, e) in events.iter_mut().enumerate() {
        e.t = 900.0 * i as f64 / 12_600.0;
    }
    let fitted_back = estimate_rates(&EventLog { events, t_obs: 900.0, tick_size: None }).unwrap().to_params().unwrap();
    let exact = fitted_back == p;
    let corrected = est.exposure_corrected.unwrap();
    outcome(
        zs.iter().all(|z| z.abs() < 3.0) && exact,
        format!(
            "count/T z-scores a+ {:.2}, a- {:.2}, b+ {:.2}, b- {:.2} (|z| < 3); exposure-corrected a- {:.3}, b+ {:.3}; 900 s back-solved counts exact: {exact}",
            zs[0], zs[1], zs[2], zs[3], corrected.alpha_minus, corrected.beta_plus
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "runtime.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let sim_dir = root.path().join("simulate");
    let mut configs = Vec::new();
    let mut base = RunConfig { seed: SEED, horizon: Some(900.0), out_dir: Some(sim_dir.clone()), ..Default::default() };
    configs.push(base.clone());
    for (name, command) in [("analyze", Command::Analyze), ("ldp", Command::Ldp)] {
        base.command = command;
        base.out_dir = Some(root.path().join(name));
        base.level = Some(3.0);
        configs.push(base.clone());
    }
    configs.push(RunConfig {
        command: Command::Estimate,
        input: Some(sim_dir.join("events.csv")),
        out_dir: Some(root.path().join("estimate")),
        ..Default::default()
    });
    configs.push(RunConfig {
        command: Command::Verify,
        checks: vec![CheckName::Lln],
        seed: SEED,
        out_dir: Some(root.path().join("verify")),
        ..Default::default()
    });
    let mut identical = 0;
    let mut files = 0;
    for cfg in &configs {
        run(cfg).unwrap();
        let first = snapshot(cfg.out_dir.as_ref().unwrap());
        run(cfg).unwrap();
        let second = snapshot(cfg.out_dir.as_ref().unwrap());
        files += first.len();
        identical += usize::from(first == second);
    }
    outcome(identical == configs.len(), format!("{identical}/{} commands byte-identical on rerun ({files} payload files)", configs.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("invariant measure", invariant_measure),
        ("measure consistency", measure_consistency),
        ("LLN", lln),
        ("CLT normality", clt_normality),
        ("CLT variance formula", clt_variance),
        ("LDP", ldp),
        ("trajectory concentration", trajectory),
        ("bid-ask bounce", bounce),
        ("estimation round-trip", estimation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.passed);
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.summary);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
