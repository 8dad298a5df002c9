//! Regime parameterizations and exact transition laws.
//!
//! A book state is the pair `(bid, ask)` on the tick lattice. Every regime is
//! described by four move classes (ask up, ask down, bid up, bid down); each
//! class has a total rate and an increment law over the tick size `Δ ≥ 1`.
//! The per-increment rate of a move is `class rate × pmf(Δ)`. Laws with
//! unbounded support (geometric openings) are never materialized; callers
//! query rates, enumerate up to a cap, or sample.
//!
//! Class order inside a [`TransitionLaw`] is fixed: ask up, ask down, bid up,
//! bid down (absent classes are skipped). Simulators select classes in that
//! order, which makes seeds portable.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bid,
    Ask,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Bid => "bid",
            Side::Ask => "ask",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// The coordinate a move acts on. `Spread` only appears in marginal spread laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Leg {
    Bid,
    Ask,
    Spread,
}

impl From<Side> for Leg {
    fn from(s: Side) -> Self {
        match s {
            Side::Bid => Leg::Bid,
            Side::Ask => Leg::Ask,
        }
    }
}

/// Change of the spread caused by moving `leg` in `direction`: +1 opens, -1 closes.
pub fn spread_sign(leg: Leg, direction: Direction) -> i64 {
    match (leg, direction) {
        (Leg::Ask, Direction::Up) | (Leg::Bid, Direction::Down) | (Leg::Spread, Direction::Up) => 1,
        _ => -1,
    }
}

fn check_rate(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a finite non-negative rate, got {x}")))
    }
}

/// Highly competitive regime: unit openings, uniform (or almost-uniform) closings.
///
/// Zero rates are accepted so that degenerate limits (no bid moves, no
/// catastrophes) can be simulated; closed-form analytics additionally require
/// `gamma_plus > 0` and `gamma_minus > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
}

impl HcParams {
    pub fn new(alpha_plus: f64, alpha_minus: f64, beta_plus: f64, beta_minus: f64) -> Result<Self> {
        let p = Self { alpha_plus, alpha_minus, beta_plus, beta_minus };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("alpha_plus", self.alpha_plus)?;
        check_rate("alpha_minus", self.alpha_minus)?;
        check_rate("beta_plus", self.beta_plus)?;
        check_rate("beta_minus", self.beta_minus)
    }

    /// Spread opening rate `beta_minus + alpha_plus`.
    pub fn gamma_plus(&self) -> f64 {
        self.beta_minus + self.alpha_plus
    }

    /// Spread closing rate `beta_plus + alpha_minus`.
    pub fn gamma_minus(&self) -> f64 {
        self.beta_plus + self.alpha_minus
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_plus() + self.gamma_minus()
    }

    pub fn p(&self) -> f64 {
        self.gamma_plus() / self.gamma()
    }

    pub fn q(&self) -> f64 {
        self.gamma_minus() / self.gamma()
    }

    /// Both spread directions active: the spread chain is positive recurrent.
    pub fn is_ergodic(&self) -> bool {
        self.gamma_plus() > 0.0 && self.gamma_minus() > 0.0
    }

    /// Total exit rate of the spread chain at spread `k`.
    pub fn exit_rate(&self, k: u64) -> f64 {
        if k <= 1 {
            self.gamma_plus()
        } else {
            self.gamma()
        }
    }
}

/// Non-competitive regime: unit openings, closings with rate `∝ Δ^-mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub mu: f64,
}

impl NcParams {
    pub fn validate(&self) -> Result<()> {
        check_rate("alpha_plus", self.alpha_plus)?;
        check_rate("alpha_minus", self.alpha_minus)?;
        check_rate("beta_plus", self.beta_plus)?;
        check_rate("beta_minus", self.beta_minus)?;
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(invalid(format!("mu must be finite and non-negative, got {}", self.mu)));
        }
        Ok(())
    }
}

/// Low liquidity with gaps: geometric multi-tick openings, truncated-geometric
/// closings, class rates damped by `spread^kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlgParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub theta: f64,
}

impl LlgParams {
    pub fn validate(&self) -> Result<()> {
        check_rate("alpha_plus", self.alpha_plus)?;
        check_rate("alpha_minus", self.alpha_minus)?;
        check_rate("beta_plus", self.beta_plus)?;
        check_rate("beta_minus", self.beta_minus)?;
        for (n, k) in [("kappa_a", self.kappa_a), ("kappa_b", self.kappa_b)] {
            if !(k.is_finite() && k >= 0.0) {
                return Err(invalid(format!("{n} must be finite and non-negative, got {k}")));
            }
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(invalid(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        Ok(())
    }
}

/// Weight generators for almost-uniform catastrophes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlmostUniformGenerator {
    /// Linear weights `1 + eta (Δ-1)/(n-1)` over `Δ = 1..n`, `eta > -1`.
    Tilted { eta: f64 },
    /// Mass `first_mass` spread uniformly over the lower half `1..ceil(n/2)`,
    /// the rest uniformly over the upper half.
    TwoPart { first_mass: f64 },
}

impl AlmostUniformGenerator {
    /// Smallest constant `c` for which the almost-uniform bound holds for every `k`.
    pub fn required_c(&self) -> f64 {
        match *self {
            AlmostUniformGenerator::Tilted { eta } => {
                let mean = 1.0 + eta / 2.0;
                let (lo, hi) = if eta >= 0.0 { (1.0, 1.0 + eta) } else { (1.0 + eta, 1.0) };
                (hi / mean).max(mean / lo)
            }
            AlmostUniformGenerator::TwoPart { first_mass: f } => {
                (2.0 * f).max(1.0 / f).max(3.0 * (1.0 - f)).max(1.0 / (2.0 * (1.0 - f)))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AlmostUniformGenerator::Tilted { eta } if !(eta.is_finite() && eta > -1.0) => {
                Err(invalid(format!("tilted generator needs eta > -1, got {eta}")))
            }
            AlmostUniformGenerator::TwoPart { first_mass } if !(first_mass > 0.0 && first_mass < 1.0) => {
                Err(invalid(format!("two_part generator needs first_mass in (0,1), got {first_mass}")))
            }
            _ => Ok(()),
        }
    }

    fn prob(&self, delta: u64, n: u64) -> f64 {
        if n == 1 {
            return 1.0;
        }
        match *self {
            AlmostUniformGenerator::Tilted { eta } => {
                let w = 1.0 + eta * (delta - 1) as f64 / (n - 1) as f64;
                w / (n as f64 * (1.0 + eta / 2.0))
            }
            AlmostUniformGenerator::TwoPart { first_mass } => {
                let m = n.div_ceil(2);
                if delta <= m {
                    first_mass / m as f64
                } else {
                    (1.0 - first_mass) / (n - m) as f64
                }
            }
        }
    }
}

/// Distribution `Q_Δ(k)` of the closing size `Δ ∈ {1, …, k-1}` at spread `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatastropheDist {
    #[default]
    Uniform,
    AlmostUniform { generator: AlmostUniformGenerator, c: f64 },
}

impl CatastropheDist {
    pub fn validate(&self) -> Result<()> {
        if let CatastropheDist::AlmostUniform { generator, c } = self {
            generator.validate()?;
            let need = generator.required_c();
            if !(*c > 1.0 && *c >= need) {
                return Err(invalid(format!(
                    "almost-uniform bound constant c = {c} must exceed 1 and be at least {need}"
                )));
            }
        }
        Ok(())
    }

    /// `Q_Δ(k)`; zero outside `1..k`.
    pub fn prob(&self, delta: u64, k: u64) -> f64 {
        if k < 2 || delta == 0 || delta >= k {
            return 0.0;
        }
        match self {
            CatastropheDist::Uniform => 1.0 / (k - 1) as f64,
            CatastropheDist::AlmostUniform { generator, .. } => generator.prob(delta, k - 1),
        }
    }

    /// Bound constant: `c` for almost-uniform kinds, `1` for the uniform kind
    /// (which satisfies the bound for every `c > 1`).
    pub fn bound_constant(&self) -> f64 {
        match self {
            CatastropheDist::Uniform => 1.0,
            CatastropheDist::AlmostUniform { c, .. } => *c,
        }
    }

    /// Checks `1/(c(k-1)) ≤ Q_Δ(k) ≤ c/(k-1)` for every `Δ` at this `k`.
    pub fn bound_holds(&self, k: u64, c: f64) -> bool {
        if k < 2 {
            return true;
        }
        let n = (k - 1) as f64;
        let tol = 1e-12;
        (1..k).all(|d| {
            let q = self.prob(d, k);
            q * n * c >= 1.0 - tol && q * n <= c * (1.0 + tol)
        })
    }
}

/// Best bid and ask, in ticks. Prices may leave the positive half-line; only
/// `bid < ask` is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BookState {
    bid: i64,
    ask: i64,
}

impl BookState {
    pub fn new(bid: i64, ask: i64) -> Result<Self> {
        if bid < ask {
            Ok(Self { bid, ask })
        } else {
            Err(Error::InvalidState { bid, ask })
        }
    }

    pub fn bid(&self) -> i64 {
        self.bid
    }

    pub fn ask(&self) -> i64 {
        self.ask
    }

    pub fn spread(&self) -> u64 {
        (self.ask - self.bid) as u64
    }

    /// Applies a move. Fails if a closing move would cross the book.
    pub fn apply(&self, side: Side, direction: Direction, delta: u64) -> Result<Self> {
        let d = delta as i64;
        match (side, direction) {
            (Side::Ask, Direction::Up) => Self::new(self.bid, self.ask + d),
            (Side::Ask, Direction::Down) => Self::new(self.bid, self.ask - d),
            (Side::Bid, Direction::Up) => Self::new(self.bid + d, self.ask),
            (Side::Bid, Direction::Down) => Self::new(self.bid - d, self.ask),
        }
    }
}

/// Distribution of the increment `Δ ≥ 1` inside a move class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementLaw {
    Unit,
    /// `Q_Δ(spread)` on `1..spread`.
    Catastrophe { dist: CatastropheDist, spread: u64 },
    /// `Δ^-exponent / H` on `1..=max`.
    PowerLaw { exponent: f64, max: u64 },
    /// `theta (1-theta)^(Δ-1)` on all of ℕ.
    Geometric { theta: f64 },
    /// Geometric conditioned on `Δ ≤ max`.
    TruncatedGeometric { theta: f64, max: u64 },
}

/// `Σ_{d=1}^{n} d^-exponent`.
pub fn power_norm(exponent: f64, n: u64) -> f64 {
    (1..=n).map(|d| (d as f64).powf(-exponent)).sum()
}

impl IncrementLaw {
    pub fn support_max(&self) -> Option<u64> {
        match *self {
            IncrementLaw::Unit => Some(1),
            IncrementLaw::Catastrophe { spread, .. } => Some(spread - 1),
            IncrementLaw::PowerLaw { max, .. } => Some(max),
            IncrementLaw::Geometric { .. } => None,
            IncrementLaw::TruncatedGeometric { max, .. } => Some(max),
        }
    }

    pub fn pmf(&self, delta: u64) -> f64 {
        if delta == 0 {
            return 0.0;
        }
        match *self {
            IncrementLaw::Unit => f64::from(u8::from(delta == 1)),
            IncrementLaw::Catastrophe { dist, spread } => dist.prob(delta, spread),
            IncrementLaw::PowerLaw { exponent, max } => {
                if delta > max {
                    0.0
                } else {
                    (delta as f64).powf(-exponent) / power_norm(exponent, max)
                }
            }
            IncrementLaw::Geometric { theta } => theta * (1.0 - theta).powi((delta - 1) as i32),
            IncrementLaw::TruncatedGeometric { theta, max } => {
                if delta > max {
                    0.0
                } else {
                    theta * (1.0 - theta).powi((delta - 1) as i32) / (1.0 - (1.0 - theta).powi(max as i32))
                }
            }
        }
    }

    /// Whether sampling needs a tabulated CDF (no closed-form inverse).
    pub fn needs_table(&self) -> bool {
        matches!(
            self,
            IncrementLaw::PowerLaw { .. }
                | IncrementLaw::Catastrophe { dist: CatastropheDist::AlmostUniform { .. }, .. }
        )
    }

    /// Cumulative distribution on the (finite) support, last entry exactly 1.
    pub fn cdf_table(&self) -> Vec<f64> {
        let n = self.support_max().expect("cdf tables need bounded support");
        let mut acc = 0.0;
        let mut out: Vec<f64> = (1..=n)
            .map(|d| {
                acc += match *self {
                    IncrementLaw::PowerLaw { exponent, .. } => (d as f64).powf(-exponent),
                    _ => self.pmf(d),
                };
                acc
            })
            .collect();
        let total = acc;
        for c in out.iter_mut() {
            *c /= total;
        }
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Inverse-CDF sample from one uniform `u ∈ [0, 1)`. `table` must be the
    /// output of [`cdf_table`](Self::cdf_table) when [`needs_table`](Self::needs_table).
    pub fn sample(&self, u: f64, table: Option<&[f64]>) -> u64 {
        match *self {
            IncrementLaw::Unit => 1,
            IncrementLaw::Catastrophe { dist: CatastropheDist::Uniform, spread } => {
                let n = spread - 1;
                (1 + (u * n as f64) as u64).min(n)
            }
            IncrementLaw::Catastrophe { .. } | IncrementLaw::PowerLaw { .. } => {
                let t = table.expect("tabulated increment law sampled without its table");
                (t.partition_point(|&c| c <= u) as u64 + 1).min(t.len() as u64)
            }
            IncrementLaw::Geometric { theta } => geometric_inverse(theta, u),
            IncrementLaw::TruncatedGeometric { theta, max } => {
                let r = 1.0 - theta;
                if r <= 0.0 {
                    return 1;
                }
                let mass = 1.0 - r.powi(max as i32);
                let d = ((1.0 - u * mass).ln() / r.ln()).ceil();
                (d.max(1.0) as u64).min(max)
            }
        }
    }
}

fn geometric_inverse(theta: f64, u: f64) -> u64 {
    let r = 1.0 - theta;
    if r <= 0.0 {
        return 1;
    }
    let d = 1.0 + ((1.0 - u).ln() / r.ln()).floor();
    if d >= (u64::MAX / 4) as f64 {
        u64::MAX / 4
    } else {
        d.max(1.0) as u64
    }
}

/// One move: a leg shifted by `delta` ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub leg: Leg,
    pub direction: Direction,
    pub delta: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveClass {
    pub leg: Leg,
    pub direction: Direction,
    /// Total rate of the class, summed over increments.
    pub rate: f64,
    pub increment: IncrementLaw,
}

/// The moves available from one state with their rates.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLaw {
    classes: Vec<MoveClass>,
    total: f64,
}

impl TransitionLaw {
    fn from_classes(classes: impl IntoIterator<Item = MoveClass>) -> Self {
        let classes: Vec<MoveClass> = classes.into_iter().filter(|c| c.rate > 0.0).collect();
        let total = classes.iter().map(|c| c.rate).sum();
        Self { classes, total }
    }

    pub fn classes(&self) -> &[MoveClass] {
        &self.classes
    }

    pub fn total_rate(&self) -> f64 {
        self.total
    }

    /// True when every class has finite increment support.
    pub fn is_bounded(&self) -> bool {
        self.classes.iter().all(|c| c.increment.support_max().is_some())
    }

    /// Rate of one specific move.
    pub fn rate(&self, leg: Leg, direction: Direction, delta: u64) -> f64 {
        self.classes
            .iter()
            .filter(|c| c.leg == leg && c.direction == direction)
            .map(|c| c.rate * c.increment.pmf(delta))
            .sum()
    }

    /// Every move with positive rate. Bounded classes are enumerated in full,
    /// unbounded ones up to `max_delta`.
    pub fn entries(&self, max_delta: u64) -> Vec<(Move, f64)> {
        let mut out = Vec::new();
        for c in &self.classes {
            let top = c.increment.support_max().unwrap_or(max_delta);
            for delta in 1..=top {
                let r = c.rate * c.increment.pmf(delta);
                if r > 0.0 {
                    out.push((Move { leg: c.leg, direction: c.direction, delta }, r));
                }
            }
        }
        out
    }

    /// Index of the class selected by `u ∈ [0, 1)` proportionally to class rates.
    pub fn select(&self, u: f64) -> usize {
        let target = u * self.total;
        let mut acc = 0.0;
        for (i, c) in self.classes.iter().enumerate() {
            acc += c.rate;
            if target < acc {
                return i;
            }
        }
        self.classes.len() - 1
    }
}

/// Book law in the HC regime.
pub fn hc_rates(state: BookState, params: &HcParams, cat: &CatastropheDist) -> TransitionLaw {
    let k = state.spread();
    let closing = |rate| MoveClass {
        leg: Leg::Ask,
        direction: Direction::Down,
        rate,
        increment: IncrementLaw::Catastrophe { dist: *cat, spread: k },
    };
    let mut classes = vec![MoveClass {
        leg: Leg::Ask,
        direction: Direction::Up,
        rate: params.alpha_plus,
        increment: IncrementLaw::Unit,
    }];
    if k >= 2 {
        classes.push(closing(params.alpha_minus));
        classes.push(MoveClass { leg: Leg::Bid, direction: Direction::Up, ..closing(params.beta_plus) });
    }
    classes.push(MoveClass {
        leg: Leg::Bid,
        direction: Direction::Down,
        rate: params.beta_minus,
        increment: IncrementLaw::Unit,
    });
    TransitionLaw::from_classes(classes)
}

/// Book law in the NC regime.
pub fn nc_rates(state: BookState, params: &NcParams) -> TransitionLaw {
    let k = state.spread();
    let mut classes = vec![MoveClass {
        leg: Leg::Ask,
        direction: Direction::Up,
        rate: params.alpha_plus,
        increment: IncrementLaw::Unit,
    }];
    if k >= 2 {
        let n = k - 1;
        let h = power_norm(params.mu, n);
        let inc = IncrementLaw::PowerLaw { exponent: params.mu, max: n };
        classes.push(MoveClass { leg: Leg::Ask, direction: Direction::Down, rate: params.alpha_minus * h, increment: inc });
        classes.push(MoveClass { leg: Leg::Bid, direction: Direction::Up, rate: params.beta_plus * h, increment: inc });
    }
    classes.push(MoveClass {
        leg: Leg::Bid,
        direction: Direction::Down,
        rate: params.beta_minus,
        increment: IncrementLaw::Unit,
    });
    TransitionLaw::from_classes(classes)
}

/// Book law in the LLG regime.
pub fn llg_rates(state: BookState, params: &LlgParams) -> TransitionLaw {
    let k = state.spread();
    let kf = k as f64;
    let damp_a = kf.powf(params.kappa_a);
    let damp_b = kf.powf(params.kappa_b);
    let open = IncrementLaw::Geometric { theta: params.theta };
    let mut classes = vec![MoveClass {
        leg: Leg::Ask,
        direction: Direction::Up,
        rate: params.alpha_plus / damp_a,
        increment: open,
    }];
    if k >= 2 {
        let close = IncrementLaw::TruncatedGeometric { theta: params.theta, max: k - 1 };
        classes.push(MoveClass { leg: Leg::Ask, direction: Direction::Down, rate: params.alpha_minus / damp_a, increment: close });
        classes.push(MoveClass { leg: Leg::Bid, direction: Direction::Up, rate: params.beta_plus / damp_b, increment: close });
    }
    classes.push(MoveClass {
        leg: Leg::Bid,
        direction: Direction::Down,
        rate: params.beta_minus / damp_b,
        increment: open,
    });
    TransitionLaw::from_classes(classes)
}

/// Complete model specification: which regime, and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum RegimeSpec {
    Hc {
        #[serde(flatten)]
        params: HcParams,
        #[serde(default)]
        catastrophe: CatastropheDist,
    },
    Nc {
        #[serde(flatten)]
        params: NcParams,
    },
    Llg {
        #[serde(flatten)]
        params: LlgParams,
    },
}

impl RegimeSpec {
    pub fn hc(params: HcParams) -> Self {
        RegimeSpec::Hc { params, catastrophe: CatastropheDist::Uniform }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegimeSpec::Hc { .. } => "hc",
            RegimeSpec::Nc { .. } => "nc",
            RegimeSpec::Llg { .. } => "llg",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RegimeSpec::Hc { params, catastrophe } => {
                params.validate()?;
                catastrophe.validate()
            }
            RegimeSpec::Nc { params } => params.validate(),
            RegimeSpec::Llg { params } => params.validate(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// HC parameters when closed-form analytics apply (uniform catastrophes).
    pub fn analytic_params(&self) -> Result<HcParams> {
        match self {
            RegimeSpec::Hc { params, catastrophe: CatastropheDist::Uniform } => Ok(*params),
            RegimeSpec::Hc { .. } => Err(Error::AnalyticsUnavailable("hc with almost-uniform catastrophes".into())),
            other => Err(Error::AnalyticsUnavailable(other.name().into())),
        }
    }

    pub fn book_law(&self, state: BookState) -> TransitionLaw {
        match self {
            RegimeSpec::Hc { params, catastrophe } => hc_rates(state, params, catastrophe),
            RegimeSpec::Nc { params } => nc_rates(state, params),
            RegimeSpec::Llg { params } => llg_rates(state, params),
        }
    }
}

/// Marginal law of the spread chain at spread `k`.
pub fn spread_law(k: u64, regime: &RegimeSpec) -> TransitionLaw {
    assert!(k >= 1, "spread must be at least one tick");
    let up = |rate, increment| MoveClass { leg: Leg::Spread, direction: Direction::Up, rate, increment };
    let down = |rate, increment| MoveClass { leg: Leg::Spread, direction: Direction::Down, rate, increment };
    let mut classes = Vec::with_capacity(2);
    match regime {
        RegimeSpec::Hc { params, catastrophe } => {
            classes.push(up(params.gamma_plus(), IncrementLaw::Unit));
            if k >= 2 {
                classes.push(down(params.gamma_minus(), IncrementLaw::Catastrophe { dist: *catastrophe, spread: k }));
            }
        }
        RegimeSpec::Nc { params } => {
            classes.push(up(params.alpha_plus + params.beta_minus, IncrementLaw::Unit));
            if k >= 2 {
                let h = power_norm(params.mu, k - 1);
                classes.push(down(
                    (params.alpha_minus + params.beta_plus) * h,
                    IncrementLaw::PowerLaw { exponent: params.mu, max: k - 1 },
                ));
            }
        }
        RegimeSpec::Llg { params } => {
            let kf = k as f64;
            let (da, db) = (kf.powf(params.kappa_a), kf.powf(params.kappa_b));
            classes.push(up(
                params.alpha_plus / da + params.beta_minus / db,
                IncrementLaw::Geometric { theta: params.theta },
            ));
            if k >= 2 {
                classes.push(down(
                    params.alpha_minus / da + params.beta_plus / db,
                    IncrementLaw::TruncatedGeometric { theta: params.theta, max: k - 1 },
                ));
            }
        }
    }
    TransitionLaw::from_classes(classes)
}
