//! Exact event-driven simulation of the book, the spread chain and the
//! embedded (jump) chains.
//!
//! Continuous-time paths follow the direct method: an exponential holding
//! time at the current total exit rate, then a move class chosen
//! proportionally to class rates, then an increment from the class's
//! increment law. Each event consumes exactly three uniforms in that order;
//! the draw that overshoots the horizon ends the path.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{spread_law, spread_sign, BookState, Direction, HcParams, Leg, RegimeSpec, Side, TransitionLaw};
use crate::rng::SimRng;

pub const EVENT_CSV_HEADER: &str = "t,side,direction,delta,bid,ask";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Event ceiling per path; exceeding it aborts with [`Error::EventCeiling`].
    pub max_events: u64,
    /// Replica index selecting the random stream for `seed`.
    pub replica: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { max_events: 500_000_000, replica: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub side: Side,
    pub direction: Direction,
    pub delta: u64,
    pub state_after: BookState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub initial: BookState,
    pub events: Vec<EventRecord>,
    pub horizon: f64,
    pub seed: u64,
    pub replica: u64,
}

impl PathSample {
    pub fn final_state(&self) -> BookState {
        self.events.last().map_or(self.initial, |e| e.state_after)
    }

    /// Book state in force at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> BookState {
        let idx = self.events.partition_point(|e| e.t <= t);
        if idx == 0 {
            self.initial
        } else {
            self.events[idx - 1].state_after
        }
    }

    /// Writes the event CSV. `comments` become leading `# ` lines.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{EVENT_CSV_HEADER}")?;
        for e in &self.events {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.t,
                e.side.as_str(),
                e.direction.as_str(),
                e.delta,
                e.state_after.bid(),
                e.state_after.ask()
            )?;
        }
        Ok(())
    }
}

struct CachedLaw {
    law: TransitionLaw,
    tables: Vec<Option<Vec<f64>>>,
    last_used: u64,
}

/// Per-spread law cache with least-recently-used eviction. Laws depend on the
/// book only through the spread, so the spread is the key.
/// Small spreads live in a dense vector that is never evicted.
struct LawCache {
    regime: RegimeSpec,
    marginal: bool,
    capacity: usize,
    clock: u64,
    dense: Vec<Option<CachedLaw>>,
    map: HashMap<u64, CachedLaw>,
}

impl LawCache {
    const CAPACITY: usize = 4096;
    const DENSE: u64 = 256;

    fn new(regime: RegimeSpec, marginal: bool) -> Self {
        Self { regime, marginal, capacity: Self::CAPACITY, clock: 0, dense: Vec::new(), map: HashMap::new() }
    }

    fn build(&self, k: u64, clock: u64) -> CachedLaw {
        let law = if self.marginal {
            spread_law(k, &self.regime)
        } else {
            self.regime.book_law(BookState::new(0, k as i64).expect("positive spread"))
        };
        let tables = law.classes().iter().map(|c| c.increment.needs_table().then(|| c.increment.cdf_table())).collect();
        CachedLaw { law, tables, last_used: clock }
    }

    #[inline]
    fn get(&mut self, k: u64) -> &CachedLaw {
        if k < Self::DENSE {
            let i = k as usize;
            if self.dense.len() <= i {
                self.dense.resize_with(i + 1, || None);
            }
            if self.dense[i].is_none() {
                self.dense[i] = Some(self.build(k, 0));
            }
            return self.dense[i].as_ref().expect("filled above");
        }
        self.clock += 1;
        let clock = self.clock;
        if !self.map.contains_key(&k) {
            if self.map.len() >= self.capacity {
                let oldest = self.map.iter().min_by_key(|(_, v)| v.last_used).map(|(k, _)| *k);
                if let Some(old) = oldest {
                    self.map.remove(&old);
                }
            }
            let entry = self.build(k, clock);
            self.map.insert(k, entry);
        }
        let entry = self.map.get_mut(&k).expect("inserted above");
        entry.last_used = clock;
        entry
    }
}

/// One sampled move: class index resolved to a leg, direction and increment.
struct Drawn {
    hold: f64,
    leg: Leg,
    direction: Direction,
    delta: u64,
}

fn draw(cache: &mut LawCache, k: u64, rng: &mut SimRng) -> Option<Drawn> {
    let u_hold = rng.uniform();
    let u_class = rng.uniform();
    let u_inc = rng.uniform();
    let entry = cache.get(k);
    let total = entry.law.total_rate();
    if total <= 0.0 {
        return None;
    }
    let hold = -(1.0 - u_hold).ln() / total;
    let i = entry.law.select(u_class);
    let class = &entry.law.classes()[i];
    let delta = class.increment.sample(u_inc, entry.tables[i].as_deref());
    Some(Drawn { hold, leg: class.leg, direction: class.direction, delta })
}

/// Streaming simulator of the book chain.
pub struct BookStepper {
    cache: LawCache,
    rng: SimRng,
    state: BookState,
    t: f64,
    count: u64,
    max_events: u64,
}

impl BookStepper {
    pub fn new(regime: &RegimeSpec, initial: BookState, seed: u64, opts: &SimOptions) -> Self {
        Self {
            cache: LawCache::new(*regime, false),
            rng: SimRng::for_replica(seed, opts.replica),
            state: initial,
            t: 0.0,
            count: 0,
            max_events: opts.max_events,
        }
    }

    pub fn state(&self) -> BookState {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Next event strictly before `horizon`, or `None` once the path passes it.
    pub fn next_event(&mut self, horizon: f64) -> Result<Option<EventRecord>> {
        let Some(d) = draw(&mut self.cache, self.state.spread(), &mut self.rng) else {
            self.t = horizon;
            return Ok(None);
        };
        let t = self.t + d.hold;
        if t > horizon {
            self.t = horizon;
            return Ok(None);
        }
        if self.count >= self.max_events {
            return Err(Error::EventCeiling { limit: self.max_events, time: self.t });
        }
        let side = match d.leg {
            Leg::Bid => Side::Bid,
            _ => Side::Ask,
        };
        self.state = self.state.apply(side, d.direction, d.delta)?;
        self.t = t;
        self.count += 1;
        Ok(Some(EventRecord { t, side, direction: d.direction, delta: d.delta, state_after: self.state }))
    }
}

/// Streaming simulator of the marginal spread chain.
pub struct SpreadStepper {
    cache: LawCache,
    rng: SimRng,
    k: u64,
    t: f64,
    count: u64,
    max_events: u64,
}

impl SpreadStepper {
    pub fn new(regime: &RegimeSpec, k0: u64, seed: u64, opts: &SimOptions) -> Self {
        Self {
            cache: LawCache::new(*regime, true),
            rng: SimRng::for_replica(seed, opts.replica),
            k: k0,
            t: 0.0,
            count: 0,
            max_events: opts.max_events,
        }
    }

    pub fn spread(&self) -> u64 {
        self.k
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Next `(time, new spread)` strictly before `horizon`.
    pub fn next_jump(&mut self, horizon: f64) -> Result<Option<(f64, u64)>> {
        let Some(d) = draw(&mut self.cache, self.k, &mut self.rng) else {
            self.t = horizon;
            return Ok(None);
        };
        let t = self.t + d.hold;
        if t > horizon {
            self.t = horizon;
            return Ok(None);
        }
        if self.count >= self.max_events {
            return Err(Error::EventCeiling { limit: self.max_events, time: self.t });
        }
        self.k = if spread_sign(d.leg, d.direction) > 0 { self.k + d.delta } else { self.k - d.delta };
        self.t = t;
        self.count += 1;
        Ok(Some((t, self.k)))
    }

    /// Advances to `horizon` and returns the spread in force there.
    pub fn advance_to(&mut self, horizon: f64) -> Result<u64> {
        while self.next_jump(horizon)?.is_some() {}
        Ok(self.k)
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("horizon must be positive and finite, got {horizon}")))
    }
}

pub fn simulate_book(regime: &RegimeSpec, initial: BookState, horizon: f64, seed: u64) -> Result<PathSample> {
    simulate_book_with(regime, initial, horizon, seed, &SimOptions::default())
}

pub fn simulate_book_with(
    regime: &RegimeSpec,
    initial: BookState,
    horizon: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<PathSample> {
    check_horizon(horizon)?;
    regime.validate()?;
    let mut stepper = BookStepper::new(regime, initial, seed, opts);
    let mut events = Vec::new();
    while let Some(e) = stepper.next_event(horizon)? {
        events.push(e);
    }
    Ok(PathSample { initial, events, horizon, seed, replica: opts.replica })
}

/// Piecewise-constant spread trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadPath {
    pub k0: u64,
    /// `(time, spread after the jump)`, times strictly increasing.
    pub jumps: Vec<(f64, u64)>,
    pub horizon: f64,
    pub seed: u64,
}

impl SpreadPath {
    pub fn value_at(&self, t: f64) -> u64 {
        let idx = self.jumps.partition_point(|j| j.0 <= t);
        if idx == 0 {
            self.k0
        } else {
            self.jumps[idx - 1].1
        }
    }

    pub fn final_spread(&self) -> u64 {
        self.jumps.last().map_or(self.k0, |j| j.1)
    }

    /// Time spent at each spread value, indexed by spread (index 0 unused).
    pub fn occupancy_times(&self) -> Vec<f64> {
        let mut out = vec![0.0; 2];
        let mut prev_t = 0.0;
        let mut k = self.k0;
        let mut add = |k: u64, dt: f64| {
            let k = k as usize;
            if out.len() <= k {
                out.resize(k + 1, 0.0);
            }
            out[k] += dt;
        };
        for &(t, next) in &self.jumps {
            add(k, t - prev_t);
            prev_t = t;
            k = next;
        }
        add(k, self.horizon - prev_t);
        out
    }
}

pub fn simulate_spread(regime: &RegimeSpec, k0: u64, horizon: f64, seed: u64) -> Result<SpreadPath> {
    simulate_spread_with(regime, k0, horizon, seed, &SimOptions::default())
}

pub fn simulate_spread_with(
    regime: &RegimeSpec,
    k0: u64,
    horizon: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SpreadPath> {
    check_horizon(horizon)?;
    regime.validate()?;
    if k0 == 0 {
        return Err(invalid("initial spread must be at least one tick"));
    }
    let mut stepper = SpreadStepper::new(regime, k0, seed, opts);
    let mut jumps = Vec::new();
    while let Some(j) = stepper.next_jump(horizon)? {
        jumps.push(j);
    }
    Ok(SpreadPath { k0, jumps, horizon, seed })
}

/// How the spread chain is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// Jump chain: `p(1,2) = 1`, no self-loops.
    #[default]
    JumpSkeleton,
    /// Uniformization at rate `gamma`: at spread 1 the chain stays put with
    /// probability `gamma_minus / gamma`.
    Uniformized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedStep {
    pub s_prev: u64,
    pub s_next: u64,
    pub u: f64,
    pub f_value: i64,
}

/// Bid increment over one embedded step.
///
/// Legal pairs are openings `s → s+1`, closings `s → s' < s`, and the
/// uniformized self-loop `1 → 1` (which never moves the price).
pub fn price_increment_f(s_prev: u64, s_next: u64, u: f64, params: &HcParams) -> Result<i64> {
    if !(0.0..1.0).contains(&u) {
        return Err(invalid(format!("u must lie in [0, 1), got {u}")));
    }
    if s_prev == 0 || s_next == 0 {
        return Err(Error::IllegalTransition { from: s_prev, to: s_next });
    }
    if s_next == s_prev + 1 {
        Ok(if u < params.beta_minus / params.gamma_plus() { -1 } else { 0 })
    } else if s_next < s_prev {
        Ok(if u < params.beta_plus / params.gamma_minus() { (s_prev - s_next) as i64 } else { 0 })
    } else if s_prev == 1 && s_next == 1 {
        Ok(0)
    } else {
        Err(Error::IllegalTransition { from: s_prev, to: s_next })
    }
}

/// Embedded chain together with the price increments `F` along it.
///
/// Each step consumes three uniforms: direction, closing target, then the
/// `u` fed to `F`.
pub struct EmbeddedWalk {
    params: HcParams,
    embedding: Embedding,
    rng: SimRng,
    s: u64,
    p_up: f64,
    f_down_cut: f64,
    f_up_cut: f64,
}

impl EmbeddedWalk {
    pub fn new(params: &HcParams, embedding: Embedding, s0: u64, seed: u64, replica: u64) -> Self {
        Self {
            params: *params,
            embedding,
            rng: SimRng::for_replica(seed, replica),
            s: s0.max(1),
            p_up: params.p(),
            f_up_cut: params.beta_minus / params.gamma_plus(),
            f_down_cut: params.beta_plus / params.gamma_minus(),
        }
    }

    pub fn state(&self) -> u64 {
        self.s
    }

    pub fn params(&self) -> &HcParams {
        &self.params
    }

    /// Advances one step and returns `(s_next, F)`.
    #[inline]
    pub fn step(&mut self) -> (u64, i64) {
        let u_dir = self.rng.uniform();
        let u_target = self.rng.uniform();
        let u_f = self.rng.uniform();
        let s = self.s;
        let up = if s == 1 {
            self.embedding == Embedding::JumpSkeleton || u_dir < self.p_up
        } else {
            u_dir < self.p_up
        };
        let (next, f) = if up {
            (s + 1, if u_f < self.f_up_cut { -1 } else { 0 })
        } else if s == 1 {
            (1, 0)
        } else {
            let n = s - 1;
            let target = (1 + (u_target * n as f64) as u64).min(n);
            (target, if u_f < self.f_down_cut { (s - target) as i64 } else { 0 })
        };
        self.s = next;
        (next, f)
    }

    /// Like [`step`](Self::step) but also reports the uniform used by `F`.
    pub fn step_detailed(&mut self) -> EmbeddedStep {
        let prev = self.s;
        let mut probe = self.rng.clone();
        let _ = (probe.uniform(), probe.uniform());
        let u = probe.uniform();
        let (next, f) = self.step();
        EmbeddedStep { s_prev: prev, s_next: next, u, f_value: f }
    }
}

pub fn embedded_spread_chain(params: &HcParams, n_steps: usize, seed: u64) -> Result<Vec<u64>> {
    embedded_spread_chain_with(params, n_steps, seed, Embedding::JumpSkeleton)
}

/// `s_0 = 1, s_1, …, s_n`.
pub fn embedded_spread_chain_with(
    params: &HcParams,
    n_steps: usize,
    seed: u64,
    embedding: Embedding,
) -> Result<Vec<u64>> {
    if n_steps == 0 {
        return Err(invalid("n_steps must be at least 1"));
    }
    params.validate()?;
    let mut walk = EmbeddedWalk::new(params, embedding, 1, seed, 0);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(1);
    out.extend((0..n_steps).map(|_| walk.step().0));
    Ok(out)
}

/// Embedded bid price `p_0 = 0, …, p_n`, cumulative sums of `F` along the
/// embedded spread chain started at spread 1.
pub fn simulate_embedded_price(params: &HcParams, n_steps: usize, seed: u64) -> Result<Vec<i64>> {
    if n_steps == 0 {
        return Err(invalid("n_steps must be at least 1"));
    }
    params.validate()?;
    let mut walk = EmbeddedWalk::new(params, Embedding::JumpSkeleton, 1, seed, 0);
    let mut p = 0i64;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(0);
    for _ in 0..n_steps {
        p += walk.step().1;
        out.push(p);
    }
    Ok(out)
}

/// `S_T(t) = S(tT)/T` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSpreadPath {
    pub scale: f64,
    /// `(t, S_T(t))` on the uniform grid.
    pub grid: Vec<(f64, f64)>,
    /// `(t, S_T(t))` right after every jump.
    pub jumps: Vec<(f64, f64)>,
}

impl ScaledSpreadPath {
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.jumps.partition_point(|j| j.0 <= t);
        if idx == 0 {
            1.0 / self.scale
        } else {
            self.jumps[idx - 1].1
        }
    }

    pub fn sup(&self) -> f64 {
        self.jumps.iter().map(|j| j.1).fold(1.0 / self.scale, f64::max)
    }
}

pub fn scaled_spread(regime: &RegimeSpec, scale: f64, n_grid: usize, seed: u64) -> Result<ScaledSpreadPath> {
    if n_grid < 2 {
        return Err(invalid("n_grid must be at least 2"));
    }
    let path = simulate_spread(regime, 1, scale, seed)?;
    let jumps: Vec<(f64, f64)> = path.jumps.iter().map(|&(t, k)| (t / scale, k as f64 / scale)).collect();
    let grid = (0..n_grid)
        .map(|i| {
            let t = i as f64 / (n_grid - 1) as f64;
            (t, path.value_at(t * scale) as f64 / scale)
        })
        .collect();
    Ok(ScaledSpreadPath { scale, grid, jumps })
}

/// Runs `f` for replicas `0..n` in parallel and returns results in replica order.
pub fn ensemble<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}
