//! Event-log ingestion and jump-count rate estimation.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{spread_sign, BookState, Direction, HcParams, Side};
use crate::simulate::PathSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub t: f64,
    pub side: Side,
    pub direction: Direction,
    pub delta: u64,
    /// Present when the log carries `bid,ask` columns.
    pub state_after: Option<BookState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<LoggedEvent>,
    /// Observation length in seconds.
    pub t_obs: f64,
    /// Tick size in currency units; metadata only.
    pub tick_size: Option<f64>,
}

impl EventLog {
    pub fn from_path(path: &PathSample) -> Self {
        let events = path
            .events
            .iter()
            .map(|e| LoggedEvent {
                t: e.t,
                side: e.side,
                direction: e.direction,
                delta: e.delta,
                state_after: Some(e.state_after),
            })
            .collect();
        Self { events, t_obs: path.horizon, tick_size: None }
    }
}

fn parse_side(s: &str) -> Option<Side> {
    match s.trim() {
        "bid" => Some(Side::Bid),
        "ask" => Some(Side::Ask),
        _ => None,
    }
}

fn parse_direction(s: &str) -> Option<Direction> {
    match s.trim() {
        "up" => Some(Direction::Up),
        "down" => Some(Direction::Down),
        _ => None,
    }
}

/// Parses an event CSV with header `t,side,direction,delta[,bid,ask]`.
///
/// Leading `# key=value` lines are read as metadata; `horizon` supplies the
/// observation length and `tick_size` the tick. An explicit `t_obs` wins over
/// the metadata; without either the last timestamp is used.
pub fn parse_event_log<R: Read>(mut source: R, t_obs: Option<f64>) -> Result<EventLog> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut horizon = None;
    let mut tick_size = None;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim();
        if let Some((key, value)) = body.split_once('=') {
            let parsed = value.trim().parse::<f64>().ok();
            match key.trim() {
                "horizon" => horizon = parsed,
                "tick_size" => tick_size = parsed,
                _ => {}
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    let with_book = match names.as_slice() {
        ["t", "side", "direction", "delta"] => false,
        ["t", "side", "direction", "delta", "bid", "ask"] => true,
        _ => {
            let line = headers.position().map_or(1, |p| p.line());
            return Err(Error::Parse { line, message: format!("unexpected header `{}`", names.join(",")) });
        }
    };

    let mut events = Vec::new();
    let mut violations: Vec<(u64, String)> = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |what: &str| Error::Parse { line, message: format!("malformed {what} `{}`", record.iter().collect::<Vec<_>>().join(",")) };
        let t: f64 = record[0].trim().parse().map_err(|_| malformed("time"))?;
        if !t.is_finite() {
            return Err(malformed("time"));
        }
        let side = parse_side(&record[1]).ok_or_else(|| malformed("side"))?;
        let direction = parse_direction(&record[2]).ok_or_else(|| malformed("direction"))?;
        let delta: u64 = record[3].trim().parse().map_err(|_| malformed("delta"))?;
        let state_after = if with_book {
            let bid: i64 = record[4].trim().parse().map_err(|_| malformed("bid"))?;
            let ask: i64 = record[5].trim().parse().map_err(|_| malformed("ask"))?;
            Some(BookState::new(bid, ask).map_err(|e| Error::Parse { line, message: e.to_string() })?)
        } else {
            None
        };
        if delta == 0 {
            violations.push((line, "delta must be at least 1".into()));
        }
        if t < last_t {
            violations.push((line, format!("timestamp {t} precedes {last_t}")));
        }
        last_t = t;
        events.push(LoggedEvent { t, side, direction, delta, state_after });
    }

    if let Some((first, _)) = violations.first() {
        let message = violations.iter().map(|(l, m)| format!("line {l}: {m}")).collect::<Vec<_>>().join("; ");
        return Err(Error::Parse { line: *first, message });
    }
    if events.is_empty() {
        return Err(Error::Parse { line: 0, message: "event log has no rows".into() });
    }

    let last = events.last().map_or(0.0, |e| e.t);
    let t_obs = t_obs.or(horizon).unwrap_or(last);
    if t_obs < last {
        return Err(invalid(format!("observation length {t_obs} is shorter than the last timestamp {last}")));
    }
    Ok(EventLog { events, t_obs, tick_size })
}

/// One value per move class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerClass<T> {
    pub alpha_plus: T,
    pub alpha_minus: T,
    pub beta_plus: T,
    pub beta_minus: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub t_obs: f64,
    pub total_events: u64,
    pub counts: PerClass<u64>,
    /// Events per second, `count / t_obs`.
    pub rates: PerClass<f64>,
    /// Poisson standard errors `sqrt(count) / t_obs`.
    pub standard_errors: PerClass<f64>,
    /// Set when the log contains multi-tick openings, which the HC model cannot produce.
    pub model_mismatch: bool,
    /// Time spent at spread `>= 2`, when the log carries book states.
    pub closing_exposure: Option<f64>,
    /// Closing rates divided by `closing_exposure` instead of `t_obs`; the
    /// plain ratios underestimate them because nothing closes at spread 1.
    pub exposure_corrected: Option<PerClass<f64>>,
}

impl RateEstimate {
    pub fn to_params(&self) -> Result<HcParams> {
        HcParams::new(self.rates.alpha_plus, self.rates.alpha_minus, self.rates.beta_plus, self.rates.beta_minus)
    }
}

/// Time at spread `>= 2` over `[0, t_obs]`, reconstructing the initial
/// spread from the first event.
fn closing_exposure(log: &EventLog) -> Option<f64> {
    let first = log.events.first()?;
    let after = first.state_after?.spread() as i64;
    let sign = spread_sign(first.side.into(), first.direction);
    let mut spread = after - sign * first.delta as i64;
    let mut last = 0.0;
    let mut exposure = 0.0;
    for e in &log.events {
        if spread >= 2 {
            exposure += e.t - last;
        }
        last = e.t;
        spread = e.state_after?.spread() as i64;
    }
    if spread >= 2 {
        exposure += log.t_obs - last;
    }
    Some(exposure)
}

/// Counts each price change once (regardless of its size) and divides by the
/// observation length.
pub fn estimate_rates(log: &EventLog) -> Result<RateEstimate> {
    if !(log.t_obs > 0.0 && log.t_obs.is_finite()) {
        return Err(invalid("observation length must be positive"));
    }
    let mut counts = PerClass::<u64>::default();
    let mut mismatch = false;
    for e in &log.events {
        let slot = match (e.side, e.direction) {
            (Side::Ask, Direction::Up) => &mut counts.alpha_plus,
            (Side::Ask, Direction::Down) => &mut counts.alpha_minus,
            (Side::Bid, Direction::Up) => &mut counts.beta_plus,
            (Side::Bid, Direction::Down) => &mut counts.beta_minus,
        };
        *slot += 1;
        let opening = matches!((e.side, e.direction), (Side::Ask, Direction::Up) | (Side::Bid, Direction::Down));
        mismatch |= opening && e.delta > 1;
    }
    let t = log.t_obs;
    let exposure = closing_exposure(log);
    let rate = |n: u64| n as f64 / t;
    let se = |n: u64| (n as f64).sqrt() / t;
    Ok(RateEstimate {
        t_obs: t,
        total_events: log.events.len() as u64,
        counts,
        rates: PerClass {
            alpha_plus: rate(counts.alpha_plus),
            alpha_minus: rate(counts.alpha_minus),
            beta_plus: rate(counts.beta_plus),
            beta_minus: rate(counts.beta_minus),
        },
        standard_errors: PerClass {
            alpha_plus: se(counts.alpha_plus),
            alpha_minus: se(counts.alpha_minus),
            beta_plus: se(counts.beta_plus),
            beta_minus: se(counts.beta_minus),
        },
        model_mismatch: mismatch,
        closing_exposure: exposure,
        exposure_corrected: exposure.filter(|e| *e > 0.0).map(|e| PerClass {
            alpha_plus: rate(counts.alpha_plus),
            alpha_minus: counts.alpha_minus as f64 / e,
            beta_plus: counts.beta_plus as f64 / e,
            beta_minus: rate(counts.beta_minus),
        }),
    })
}
