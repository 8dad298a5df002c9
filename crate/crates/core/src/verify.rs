//! Monte Carlo checks of the closed-form results.
//!
//! Every check is a pure function of its arguments and a seed: replica `i`
//! draws from stream `i` of the seed, so reports are bit-identical across
//! runs and thread counts. Statistical verdicts use 99% bands (per-check
//! false-positive rate of 1%) unless a fixed tolerance is stated.

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytics::{
    clt_variance_continuous, clt_variance_embedded, clt_variance_markov, drift_d, embedded_drift_v, ldp_exponent,
    optimal_spread_trajectory, stationary_mu, stationary_pi, total_variation, DriftMethod, PiecewiseLinearTrajectory,
    SERIES_EPS,
};
use crate::error::{invalid, Error, Result};
use crate::model::{BookState, HcParams, RegimeSpec};
use crate::rng::SimRng;
use crate::simulate::{ensemble, BookStepper, EmbeddedWalk, Embedding, SimOptions, SpreadStepper};
use crate::stats::{self, Z99};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

/// A deliberately falsified target the check must reject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeControl {
    pub description: String,
    pub falsified_target: f64,
    pub statistic: f64,
    /// True when the harness rejects the falsified target, as it should.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub target: f64,
    pub target_label: String,
    pub estimate: f64,
    pub ci: [f64; 2],
    pub tolerance: String,
    pub replicas: u64,
    pub seed: u64,
    pub verdict: Verdict,
    pub details: Value,
    pub negative_control: Option<NegativeControl>,
    /// Wall-clock seconds; excluded from the serialized payload.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn timed(start: Instant, mut report: CheckReport) -> CheckReport {
    report.runtime_seconds = start.elapsed().as_secs_f64();
    report
}

fn replica_opts(replica: u64) -> SimOptions {
    SimOptions { replica, ..SimOptions::default() }
}

/// Replica stream for sweep index `i`, so different sweep points never share draws.
fn sweep_replica(i: usize, r: u64) -> u64 {
    ((i as u64) << 40) | r
}

fn sorted_horizons(list: &[f64]) -> Result<Vec<f64>> {
    if list.is_empty() || list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(invalid("horizon list must be non-empty with positive entries"));
    }
    let mut v = list.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    Ok(v)
}

fn require_replicas(n: u64, min: u64) -> Result<()> {
    if n < min {
        Err(invalid(format!("at least {min} replicas required, got {n}")))
    } else {
        Ok(())
    }
}

/// Time-weighted spread occupancy against `mu` along one long path, plus the
/// jump-count occupancy against `pi`.
pub fn check_invariant_occupancy(params: &HcParams, horizon: f64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let mu = stationary_mu(params, SERIES_EPS)?;
    let pi = stationary_pi(params, SERIES_EPS)?;
    let spec = RegimeSpec::hc(*params);
    let mut stepper = SpreadStepper::new(&spec, 1, seed, &SimOptions::default());
    let mut time_at: Vec<f64> = vec![0.0; 64];
    let mut visits: Vec<f64> = vec![0.0; 64];
    let bump = |v: &mut Vec<f64>, k: u64, w: f64| {
        let i = k as usize - 1;
        if v.len() <= i {
            v.resize(i + 1, 0.0);
        }
        v[i] += w;
    };
    let mut k = 1;
    let mut last = 0.0;
    let mut jumps = 0u64;
    while let Some((t, next)) = stepper.next_jump(horizon)? {
        bump(&mut time_at, k, t - last);
        bump(&mut visits, next, 1.0);
        last = t;
        k = next;
        jumps += 1;
    }
    bump(&mut time_at, k, horizon - last);
    for x in time_at.iter_mut() {
        *x /= horizon;
    }
    for x in visits.iter_mut() {
        *x /= jumps.max(1) as f64;
    }

    let tv_mu = total_variation(&time_at, &mu.values);
    let tv_pi = total_variation(&visits, &pi.values);
    let tv_wrong = total_variation(&time_at, &pi.values);
    let verdict = if tv_mu < 0.01 && tv_pi < 0.01 { Verdict::Pass } else { Verdict::Fail };
    let head = |v: &[f64]| v.iter().take(20).copied().collect::<Vec<_>>();
    Ok(timed(
        start,
        CheckReport {
            name: "occupancy".into(),
            target: 0.0,
            target_label: "total variation between time occupancy and mu".into(),
            estimate: tv_mu,
            ci: [tv_mu, tv_mu],
            tolerance: "TV < 0.01 (time occupancy vs mu and jump occupancy vs pi)".into(),
            replicas: 1,
            seed,
            verdict,
            details: json!({
                "horizon": horizon,
                "jumps": jumps,
                "tv_time_vs_mu": tv_mu,
                "tv_jumps_vs_pi": tv_pi,
                "time_occupancy": head(&time_at),
                "mu": head(&mu.values),
                "jump_occupancy": head(&visits),
                "pi": head(&pi.values),
            }),
            negative_control: Some(NegativeControl {
                description: "time occupancy compared against pi instead of mu".into(),
                falsified_target: 0.0,
                statistic: tv_wrong,
                flagged: tv_wrong >= 0.01,
            }),
            runtime_seconds: 0.0,
        },
    ))
}

/// Bid price at each horizon of `horizons` (ascending) along one path from `(0, 1)`.
fn bid_at_horizons(spec: &RegimeSpec, horizons: &[f64], seed: u64, replica: u64) -> Result<Vec<i64>> {
    let mut stepper = BookStepper::new(spec, BookState::new(0, 1)?, seed, &replica_opts(replica));
    let mut out = Vec::with_capacity(horizons.len());
    for &t in horizons {
        while stepper.next_event(t)?.is_some() {}
        out.push(stepper.state().bid());
    }
    Ok(out)
}

/// `P_b(T)/T` over replicas against every drift variant; the verdict uses the
/// generator value at the largest horizon.
pub fn check_lln(params: &HcParams, horizons: &[f64], replicas: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let horizons = sorted_horizons(horizons)?;
    require_replicas(replicas, 2)?;
    let spec = RegimeSpec::hc(*params);
    let paths: Vec<Vec<i64>> =
        ensemble(replicas, |r| bid_at_horizons(&spec, &horizons, seed, r)).into_iter().collect::<Result<_>>()?;

    let mut per_t = Vec::new();
    let (mut mean, mut se) = (0.0, 0.0);
    for (i, &t) in horizons.iter().enumerate() {
        let rates: Vec<f64> = paths.iter().map(|p| p[i] as f64 / t).collect();
        mean = stats::mean(&rates);
        se = stats::std_error(&rates);
        per_t.push(json!({"horizon": t, "mean": mean, "se": se}));
    }
    let mut variants = serde_json::Map::new();
    for m in DriftMethod::ALL {
        let value = drift_d(params, m)?;
        let z = (mean - value) / se;
        variants.insert(m.as_str().into(), json!({"value": value, "z": z, "within_3se": z.abs() <= 3.0}));
    }
    let target = drift_d(params, DriftMethod::Generator)?;
    let wrong = drift_d(params, DriftMethod::LemmaTimesGamma)?;
    let z = (mean - target) / se;
    let z_wrong = (mean - wrong) / se;
    Ok(timed(
        start,
        CheckReport {
            name: "lln".into(),
            target,
            target_label: "generator drift (alpha_plus beta_plus - alpha_minus beta_minus) / gamma_minus".into(),
            estimate: mean,
            ci: [mean - 3.0 * se, mean + 3.0 * se],
            tolerance: "target within 3 standard errors at the largest horizon".into(),
            replicas,
            seed,
            verdict: if z.abs() <= 3.0 { Verdict::Pass } else { Verdict::Fail },
            details: json!({
                "per_horizon": per_t,
                "variants": variants,
                "embedded_drift_v": embedded_drift_v(params)?,
            }),
            negative_control: Some(NegativeControl {
                description: "embedded drift times gamma used as the target".into(),
                falsified_target: wrong,
                statistic: z_wrong,
                flagged: z_wrong.abs() > 3.0,
            }),
            runtime_seconds: 0.0,
        },
    ))
}

/// Normality bands for a standardized sample.
fn normal_bands(m: &stats::Moments) -> bool {
    m.mean.abs() < 0.05 && (m.variance - 1.0).abs() < 0.05 && m.skewness.abs() < 0.15 && m.excess_kurtosis.abs() < 0.3
}

fn moments_json(m: &stats::Moments) -> Value {
    json!({
        "mean": m.mean, "mean_ci": [m.mean - Z99 * m.mean_se, m.mean + Z99 * m.mean_se],
        "variance": m.variance, "variance_ci": [m.variance - Z99 * m.variance_se, m.variance + Z99 * m.variance_se],
        "skewness": m.skewness, "skewness_ci": [m.skewness - Z99 * m.skewness_se, m.skewness + Z99 * m.skewness_se],
        "excess_kurtosis": m.excess_kurtosis,
        "excess_kurtosis_ci": [m.excess_kurtosis - Z99 * m.excess_kurtosis_se, m.excess_kurtosis + Z99 * m.excess_kurtosis_se],
        "bands_hold": normal_bands(m),
    })
}

/// Standardized embedded price `(p_n - n v) / sigma_n` over replicas. When
/// `continuous_horizon` is set, the continuous-time analogue
/// `Var(P_b(T)) / T` against `(sigma^2 + v^2) gamma` is added as information.
pub fn check_clt(
    params: &HcParams,
    n: u64,
    replicas: u64,
    seed: u64,
    continuous_horizon: Option<f64>,
) -> Result<CheckReport> {
    let start = Instant::now();
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    require_replicas(replicas, 3)?;
    let v = embedded_drift_v(params)?;
    let var = clt_variance_embedded(params)?;
    let var_markov = clt_variance_markov(params)?;
    let finals: Vec<f64> = ensemble(replicas, |r| {
        let mut walk = EmbeddedWalk::new(params, Embedding::JumpSkeleton, 1, seed, r);
        let mut p = 0i64;
        for _ in 0..n {
            p += walk.step().1;
        }
        p as f64
    });
    let nf = n as f64;
    let centered: Vec<f64> = finals.iter().map(|p| p - nf * v).collect();
    let sigma_n = (nf * var).sqrt();
    let z: Vec<f64> = centered.iter().map(|c| c / sigma_n).collect();
    let m = stats::moments(&z);
    let z_markov: Vec<f64> = centered.iter().map(|c| c / (nf * var_markov).sqrt()).collect();
    let m_markov = stats::moments(&z_markov);
    let z_double: Vec<f64> = centered.iter().map(|c| c / (2.0 * sigma_n)).collect();
    let m_double = stats::moments(&z_double);

    let continuous = match continuous_horizon {
        Some(t) => {
            let spec = RegimeSpec::hc(*params);
            let bids: Vec<f64> = ensemble(replicas, |r| bid_at_horizons(&spec, &[t], seed, sweep_replica(1, r)))
                .into_iter()
                .map(|b| b.map(|b| b[0] as f64))
                .collect::<Result<_>>()?;
            let empirical = stats::variance(&bids) / t;
            json!({
                "horizon": t,
                "empirical_var_rate": empirical,
                "variance_plus_drift_form": clt_variance_continuous(params)?,
                "markov_times_jump_rate": var_markov * crate::analytics::mean_jump_rate(params)?,
            })
        }
        None => Value::Null,
    };

    let asymptotic = n >= 10_000;
    let pass = normal_bands(&m);
    let verdict = match (asymptotic, pass) {
        (false, _) => Verdict::Informational,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    Ok(timed(
        start,
        CheckReport {
            name: "clt".into(),
            target: 1.0,
            target_label: "variance of (p_n - n v) / sigma_n".into(),
            estimate: m.variance,
            ci: [m.variance - Z99 * m.variance_se, m.variance + Z99 * m.variance_se],
            tolerance: "|mean| < 0.05, |var - 1| < 0.05, |skew| < 0.15, |excess kurtosis| < 0.3".into(),
            replicas,
            seed,
            verdict,
            details: json!({
                "n": n,
                "v": v,
                "var_embedded": var,
                "var_markov": var_markov,
                "sigma_n": sigma_n,
                "standardized": moments_json(&m),
                "standardized_by_markov_variance": moments_json(&m_markov),
                "continuous_time": continuous,
            }),
            negative_control: Some(NegativeControl {
                description: "sigma_n doubled".into(),
                falsified_target: 2.0 * sigma_n,
                statistic: m_double.variance,
                flagged: !normal_bands(&m_double),
            }),
            runtime_seconds: 0.0,
        },
    ))
}

/// `-ln P(S(T) > x T) / T` at each horizon from one sweep of replica paths.
pub fn check_ldp_decay(params: &HcParams, x: f64, horizons: &[f64], replicas: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let target = ldp_exponent(x, params)?;
    let horizons = sorted_horizons(horizons)?;
    require_replicas(replicas, 1)?;
    let spec = RegimeSpec::hc(*params);
    let finals: Vec<Vec<u64>> = ensemble(replicas, |r| {
        let mut stepper = SpreadStepper::new(&spec, 1, seed, &replica_opts(r));
        horizons.iter().map(|&t| stepper.advance_to(t)).collect::<Result<Vec<u64>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let rf = replicas as f64;
    let decay = |level: f64| -> Vec<(f64, u64, f64, f64)> {
        horizons
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let hits = finals.iter().filter(|f| f[i] as f64 > level * t).count() as u64;
                let p = hits as f64 / rf;
                // Delta-method standard error of ln p.
                let se_ln = if hits > 0 { ((1.0 - p) / hits as f64).sqrt() } else { f64::INFINITY };
                (t, hits, p, se_ln)
            })
            .collect()
    };
    let rows = decay(x);
    let usable: Vec<&(f64, u64, f64, f64)> = rows.iter().filter(|r| r.1 > 0).collect();
    let per_t: Vec<Value> = rows
        .iter()
        .map(|&(t, hits, p, se_ln)| {
            json!({
                "horizon": t, "hits": hits, "p_hat": p, "usable": hits > 0, "low_hits": hits < 10,
                "rate": if hits > 0 { -p.ln() / t } else { f64::NAN },
                "rate_ci": if hits > 0 { [(-p.ln() - Z99 * se_ln) / t, (-p.ln() + Z99 * se_ln) / t] } else { [f64::NAN, f64::NAN] },
            })
        })
        .collect();

    let (estimate, ci, basis) = match usable.as_slice() {
        [] => (f64::NAN, [f64::NAN, f64::NAN], "none".to_string()),
        [only] => {
            let (t, _, p, se) = **only;
            (-p.ln() / t, [(-p.ln() - Z99 * se) / t, (-p.ln() + Z99 * se) / t], format!("rate at T = {t}"))
        }
        [.., a, b] => {
            let (ta, _, pa, sa) = **a;
            let (tb, _, pb, sb) = **b;
            let slope = -(pb.ln() - pa.ln()) / (tb - ta);
            let se = (sa * sa + sb * sb).sqrt() / (tb - ta);
            (slope, [slope - Z99 * se, slope + Z99 * se], format!("finite-difference slope over T = {ta}..{tb}"))
        }
    };
    let largest_usable = usable.last().map(|r| r.0);
    let verdict = if usable.is_empty() {
        Verdict::Informational
    } else if ((estimate - target) / target).abs() <= 0.25 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    // Tail monotonicity in the level, from the same paths.
    let levels = [x / 2.0, x, 2.0 * x];
    let by_level: Vec<Value> = levels
        .iter()
        .map(|&l| {
            let r = decay(l);
            json!({"x": l, "hits": r.iter().map(|r| r.1).collect::<Vec<_>>(),
                   "rates": r.iter().map(|r| if r.1 > 0 { -r.2.ln() / r.0 } else { f64::NAN }).collect::<Vec<_>>()})
        })
        .collect();

    let first = rows[0];
    let last = usable.last().copied().copied().unwrap_or(first);
    let no_decay_flagged = last.2 < first.2 && last.0 > first.0;
    Ok(timed(
        start,
        CheckReport {
            name: "ldp".into(),
            target,
            target_label: format!("ldp_exponent({x})"),
            estimate,
            ci,
            tolerance: "estimate within 25% of the exponent at the largest usable horizon".into(),
            replicas,
            seed,
            verdict,
            details: json!({
                "x": x,
                "basis": basis,
                "largest_usable_horizon": largest_usable,
                "all_horizons_usable": usable.len() == rows.len(),
                "per_horizon": per_t,
                "by_level": by_level,
                "max_measurable_rate_at_largest_horizon": rf.ln() / horizons[horizons.len() - 1],
            }),
            negative_control: Some(NegativeControl {
                description: "no decay: tail probability constant in T".into(),
                falsified_target: 0.0,
                statistic: last.2 / first.2,
                flagged: no_decay_flagged,
            }),
            runtime_seconds: 0.0,
        },
    ))
}

/// `sup_t |S(tT)/T - f(t)|` along a path streamed from a stepper, and `S(T)`.
/// `f` is nondecreasing, so on each constant piece the supremum sits at an end.
fn sup_distance(stepper: &mut SpreadStepper, horizon: f64, f: &PiecewiseLinearTrajectory) -> Result<(f64, u64)> {
    let mut y = stepper.spread() as f64 / horizon;
    let mut s = 0.0;
    let mut sup: f64 = 0.0;
    while let Some((t, k)) = stepper.next_jump(horizon)? {
        let e = t / horizon;
        sup = sup.max((y - f.value_at(s)).abs()).max((y - f.value_at(e)).abs());
        s = e;
        y = k as f64 / horizon;
    }
    sup = sup.max((y - f.value_at(s)).abs()).max((y - f.value_at(1.0)).abs());
    Ok((sup, stepper.spread()))
}

/// Median sup-distance to the optimal trajectory among paths with
/// `S(T) >= x T`, for each horizon.
pub fn check_trajectory_concentration(
    params: &HcParams,
    x: f64,
    horizons: &[f64],
    replicas: u64,
    seed: u64,
) -> Result<CheckReport> {
    let start = Instant::now();
    let f = optimal_spread_trajectory(x, params)?;
    let horizons = sorted_horizons(horizons)?;
    require_replicas(replicas, 1)?;
    let spec = RegimeSpec::hc(*params);

    let mut rows = Vec::new();
    let mut medians = Vec::new();
    let mut control = Vec::new();
    let mut enough = true;
    for (i, &t) in horizons.iter().enumerate() {
        let out: Vec<(f64, u64)> = ensemble(replicas, |r| {
            let mut stepper = SpreadStepper::new(&spec, 1, seed, &replica_opts(sweep_replica(i, r)));
            sup_distance(&mut stepper, t, &f)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let cond: Vec<f64> = out.iter().filter(|o| o.1 as f64 >= x * t).map(|o| o.0).collect();
        let all: Vec<f64> = out.iter().map(|o| o.0).collect();
        let uncond = stats::median(&all);
        control.push(uncond);
        enough &= cond.len() >= 30;
        let med = if cond.is_empty() { f64::NAN } else { stats::median(&cond) };
        medians.push(med);
        let band =
            if cond.is_empty() { [f64::NAN; 2] } else { [stats::quantile(&cond, 0.25), stats::quantile(&cond, 0.75)] };
        rows.push(json!({
            "horizon": t, "conditioned_paths": cond.len(), "median": med, "quartiles": band,
            "unconditioned_median": uncond,
        }));
    }
    let decreasing = stats::strictly_decreasing(&medians);
    let verdict = match (enough, decreasing) {
        (false, _) => Verdict::Informational,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    let last = medians[medians.len() - 1];
    Ok(timed(
        start,
        CheckReport {
            name: "trajectory".into(),
            target: 0.0,
            target_label: format!("sup-distance to the optimal trajectory ending at {x}"),
            estimate: last,
            ci: [last, last],
            tolerance: "conditioned medians strictly decrease over the horizons, with at least 30 paths each".into(),
            replicas,
            seed,
            verdict,
            details: json!({"x": x, "trajectory": f.points(), "per_horizon": rows, "medians_decreasing": decreasing}),
            negative_control: Some(NegativeControl {
                description: "unconditioned paths concentrate on the optimal trajectory".into(),
                falsified_target: 0.0,
                statistic: control[control.len() - 1],
                flagged: !stats::strictly_decreasing(&control),
            }),
            runtime_seconds: 0.0,
        },
    ))
}

/// Which price the return series is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnSeries {
    #[default]
    Bid,
    /// Mid-price, in half ticks.
    Mid,
}

impl FromStr for ReturnSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bid" => Ok(ReturnSeries::Bid),
            "mid" => Ok(ReturnSeries::Mid),
            _ => Err(Error::Unknown { kind: "return series", name: s.into() }),
        }
    }
}

/// Per-event returns along one book path from `(0, 1)`.
pub fn event_returns(regime: &RegimeSpec, horizon: f64, seed: u64, series: ReturnSeries) -> Result<Vec<f64>> {
    let init = BookState::new(0, 1)?;
    let mut stepper = BookStepper::new(regime, init, seed, &SimOptions::default());
    let mut prev = init;
    let mut out = Vec::new();
    while let Some(e) = stepper.next_event(horizon)? {
        let now = e.state_after;
        out.push(match series {
            ReturnSeries::Bid => (now.bid() - prev.bid()) as f64,
            ReturnSeries::Mid => ((now.bid() + now.ask()) - (prev.bid() + prev.ask())) as f64,
        });
        prev = now;
    }
    Ok(out)
}

/// Lag-1 bounce of per-event returns and its disappearance under aggregation.
pub fn check_acf(
    regime: &RegimeSpec,
    horizon: f64,
    seed: u64,
    max_lag: usize,
    aggregation: usize,
    series: ReturnSeries,
) -> Result<CheckReport> {
    let start = Instant::now();
    if max_lag == 0 || aggregation < 2 {
        return Err(invalid("max_lag must be positive and aggregation at least 2"));
    }
    let returns = event_returns(regime, horizon, seed, series)?;
    let n = returns.len();
    let degenerate = match regime {
        RegimeSpec::Hc { params, .. } => params.gamma_minus() <= 0.0,
        _ => false,
    };
    let band = |len: usize| Z99 / (len as f64).sqrt();
    let rho = if n > max_lag + 1 { stats::acf(&returns, max_lag) } else { vec![f64::NAN; max_lag] };
    let noise = band(n);
    let lag1 = rho[0];
    let ci = [lag1 - noise, lag1 + noise];
    let outside: Vec<usize> = (2..=max_lag).filter(|&l| rho[l - 1].abs() > noise).collect();

    let agg = stats::aggregate(&returns, aggregation);
    let agg_rho = if agg.len() > 2 { stats::acf(&agg, 1)[0] } else { f64::NAN };
    let agg_noise = band(agg.len());
    let agg_vanishes = agg_rho.abs() <= agg_noise;

    // Shuffled returns keep the marginal law but lose the ordering.
    let mut shuffled = returns.clone();
    let mut rng = SimRng::for_replica(seed, 1);
    for i in (1..shuffled.len()).rev() {
        let j = ((rng.uniform() * (i + 1) as f64) as usize).min(i);
        shuffled.swap(i, j);
    }
    let shuf_rho = if n > 2 { stats::acf(&shuffled, 1)[0] } else { f64::NAN };

    let bounce = ci[1] < 0.0;
    let verdict = if degenerate || n < 10_000 {
        Verdict::Informational
    } else if bounce && agg_vanishes {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(timed(
        start,
        CheckReport {
            name: "acf".into(),
            target: 0.0,
            target_label: "lag-1 autocorrelation of per-event returns is negative".into(),
            estimate: lag1,
            ci,
            tolerance: "99% CI of lag 1 below 0; aggregated lag 1 inside the 99% noise band".into(),
            replicas: 1,
            seed,
            verdict,
            details: json!({
                "series": series,
                "returns": n,
                "acf": rho,
                "noise_band": noise,
                "lags_outside_band": outside,
                "aggregation": aggregation,
                "aggregated_returns": agg.len(),
                "aggregated_lag1": agg_rho,
                "aggregated_noise_band": agg_noise,
                "degenerate_regime": degenerate,
            }),
            negative_control: Some(NegativeControl {
                description: "shuffled returns show a bounce".into(),
                falsified_target: lag1,
                statistic: shuf_rho,
                flagged: shuf_rho + noise >= 0.0,
            }),
            runtime_seconds: 0.0,
        },
    ))
}

fn growth_medians(regime: &RegimeSpec, b: f64, horizons: &[f64], replicas: u64, seed: u64) -> Result<Vec<f64>> {
    horizons
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let sups: Vec<f64> = ensemble(replicas, |r| {
                let mut stepper = SpreadStepper::new(regime, 1, seed, &replica_opts(sweep_replica(i, r)));
                let mut sup = 1u64;
                while let Some((_, k)) = stepper.next_jump(t)? {
                    sup = sup.max(k);
                }
                Ok(sup as f64 / t.powf(b))
            })
            .into_iter()
            .collect::<Result<_>>()?;
            Ok(stats::median(&sups))
        })
        .collect()
}

/// Medians of `sup_{t <= T} S(t) / T^b` across horizons; informational.
pub fn check_max_growth(regime: &RegimeSpec, b: f64, horizons: &[f64], replicas: u64, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid(format!("b must lie in (0, 1), got {b}")));
    }
    regime.validate()?;
    let horizons = sorted_horizons(horizons)?;
    require_replicas(replicas, 1)?;
    let medians = growth_medians(regime, b, &horizons, replicas, seed)?;
    let control = growth_medians(regime, 0.0, &horizons, replicas, seed)?;
    let decreasing = stats::strictly_decreasing(&medians);
    let last = medians[medians.len() - 1];
    Ok(timed(
        start,
        CheckReport {
            name: "max_growth".into(),
            target: 0.0,
            target_label: format!("sup S / T^{b} tends to 0"),
            estimate: last,
            ci: [last, last],
            tolerance: "medians strictly decrease over the horizons (informational)".into(),
            replicas,
            seed,
            verdict: Verdict::Informational,
            details: json!({"b": b, "horizons": horizons, "medians": medians, "decreasing": decreasing}),
            negative_control: Some(NegativeControl {
                description: "unnormalized maximum (b = 0) decreases".into(),
                falsified_target: 0.0,
                statistic: control[control.len() - 1],
                flagged: !stats::strictly_decreasing(&control),
            }),
            runtime_seconds: 0.0,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Occupancy,
    Lln,
    Clt,
    Ldp,
    Trajectory,
    Acf,
    MaxGrowth,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::Occupancy,
        CheckName::Lln,
        CheckName::Clt,
        CheckName::Ldp,
        CheckName::Trajectory,
        CheckName::Acf,
        CheckName::MaxGrowth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Occupancy => "occupancy",
            CheckName::Lln => "lln",
            CheckName::Clt => "clt",
            CheckName::Ldp => "ldp",
            CheckName::Trajectory => "trajectory",
            CheckName::Acf => "acf",
            CheckName::MaxGrowth => "max_growth",
        }
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "check", name: s.into() })
    }
}

/// Sizes and levels for every check. Defaults are the desk-scale acceptance settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifySettings {
    pub occupancy_horizon: f64,
    pub lln_horizons: Vec<f64>,
    pub lln_replicas: u64,
    pub clt_steps: u64,
    pub clt_replicas: u64,
    pub clt_continuous_horizon: Option<f64>,
    pub ldp_level: f64,
    pub ldp_horizons: Vec<f64>,
    pub ldp_replicas: u64,
    pub trajectory_level: f64,
    pub trajectory_horizons: Vec<f64>,
    pub trajectory_replicas: u64,
    pub acf_horizon: f64,
    pub acf_max_lag: usize,
    pub acf_aggregation: usize,
    pub acf_series: ReturnSeries,
    pub growth_exponent: f64,
    pub growth_horizons: Vec<f64>,
    pub growth_replicas: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            occupancy_horizon: 1e5,
            lln_horizons: vec![1e3, 1e4, 1e5],
            lln_replicas: 200,
            clt_steps: 100_000,
            clt_replicas: 1000,
            clt_continuous_horizon: Some(1e4),
            ldp_level: 0.5,
            ldp_horizons: vec![25.0, 50.0, 100.0],
            ldp_replicas: 1_000_000,
            trajectory_level: 0.2,
            trajectory_horizons: vec![25.0, 50.0, 100.0],
            trajectory_replicas: 100_000,
            acf_horizon: 1e5,
            acf_max_lag: 10,
            acf_aggregation: 1000,
            acf_series: ReturnSeries::Bid,
            growth_exponent: 0.7,
            growth_horizons: vec![1e2, 1e3, 1e4],
            growth_replicas: 200,
        }
    }
}

/// Runs one named check. Checks needing closed forms require an HC regime
/// with uniform catastrophes.
pub fn run_check(name: CheckName, regime: &RegimeSpec, s: &VerifySettings, seed: u64) -> Result<CheckReport> {
    let hc = || regime.analytic_params();
    match name {
        CheckName::Occupancy => check_invariant_occupancy(&hc()?, s.occupancy_horizon, seed),
        CheckName::Lln => check_lln(&hc()?, &s.lln_horizons, s.lln_replicas, seed),
        CheckName::Clt => check_clt(&hc()?, s.clt_steps, s.clt_replicas, seed, s.clt_continuous_horizon),
        CheckName::Ldp => check_ldp_decay(&hc()?, s.ldp_level, &s.ldp_horizons, s.ldp_replicas, seed),
        CheckName::Trajectory => {
            check_trajectory_concentration(&hc()?, s.trajectory_level, &s.trajectory_horizons, s.trajectory_replicas, seed)
        }
        CheckName::Acf => check_acf(regime, s.acf_horizon, seed, s.acf_max_lag, s.acf_aggregation, s.acf_series),
        CheckName::MaxGrowth => check_max_growth(regime, s.growth_exponent, &s.growth_horizons, s.growth_replicas, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fitted() -> HcParams {
        HcParams::new(5.0, 3.0, 2.0, 4.0).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
        }
        assert!("bogus".parse::<CheckName>().is_err());
    }

    #[test]
    fn small_lln_is_reproducible() {
        let a = check_lln(&fitted(), &[100.0, 200.0], 8, 3).unwrap();
        let b = check_lln(&fitted(), &[200.0, 100.0], 8, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn small_clt_is_informational() {
        let r = check_clt(&fitted(), 10, 50, 1, None).unwrap();
        assert_eq!(r.verdict, Verdict::Informational);
    }

    #[test]
    fn sup_distance_of_flat_path() {
        // gamma_minus = 0 with no openings either: the path stays at 1.
        let p = HcParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let spec = RegimeSpec::hc(p);
        let mut st = SpreadStepper::new(&spec, 1, 0, &SimOptions::default());
        let f = PiecewiseLinearTrajectory::new(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 2.0)]).unwrap();
        let (d, k) = sup_distance(&mut st, 10.0, &f).unwrap();
        assert_eq!(k, 1);
        assert!((d - 1.9).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = RegimeSpec::hc(fitted());
        assert!(check_max_growth(&spec, 1.0, &[10.0], 2, 0).is_err());
        assert!(check_lln(&fitted(), &[], 2, 0).is_err());
        assert!(check_acf(&spec, 10.0, 0, 0, 10, ReturnSeries::Bid).is_err());
    }
}
