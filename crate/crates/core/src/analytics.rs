//! Closed-form quantities for the HC regime with uniform catastrophes.
//!
//! Stationary tables are truncated at the smallest `K` whose geometric
//! majorant `Σ_{n>K} n p^(n-2)` drops below the tolerance, then `K` is
//! doubled. Table values are scaled so that `Σ values + tail_bound = 1`.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::HcParams;

/// Series tolerance used by quantities derived from the stationary tables.
pub const SERIES_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    /// Continuous-time spread chain.
    Mu,
    /// Embedded jump chain.
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryTable {
    pub kind: MeasureKind,
    /// `values[i]` is the mass of spread `i + 1`.
    pub values: Vec<f64>,
    /// Upper bound on the mass beyond the table.
    pub tail_bound: f64,
    pub params: HcParams,
}

impl StationaryTable {
    /// Mass at spread `k` (zero beyond the table).
    pub fn at(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.values.get(k as usize - 1).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ_k k · value(k)`.
    pub fn first_moment(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum()
    }

    /// Total variation distance to another table (or any vector indexed from spread 1).
    pub fn total_variation(&self, other: &[f64]) -> f64 {
        total_variation(&self.values, other)
    }
}

/// `½ Σ |a_i - b_i|`, missing entries read as zero.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n).map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs()).sum::<f64>()
}

fn require_ergodic(params: &HcParams) -> Result<()> {
    params.validate()?;
    if params.is_ergodic() {
        Ok(())
    } else {
        Err(invalid("stationary analytics need gamma_plus > 0 and gamma_minus > 0"))
    }
}

/// `Σ_{n>k} n p^(n-2)`.
fn majorant_tail(p: f64, k: usize) -> f64 {
    let k = k as f64;
    p.powf(k - 1.0) * ((k + 1.0) - k * p) / ((1.0 - p) * (1.0 - p))
}

fn truncation(p: f64, eps: f64) -> usize {
    let mut k = 2usize;
    while majorant_tail(p, k) >= eps {
        k += 1;
    }
    2 * k
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1e-2 {
        Ok(())
    } else {
        Err(invalid(format!("tail tolerance must lie in (0, 1e-2], got {eps}")))
    }
}

/// Unnormalized product-formula weights with `w(1) = 1`.
fn weights(params: &HcParams, len: usize, kind: MeasureKind) -> Vec<f64> {
    let (p, q) = (params.p(), params.q());
    let mut w = Vec::with_capacity(len);
    w.push(1.0);
    for n in 2..=len {
        let prev = w[n - 2];
        let i = (n - 1) as f64;
        let ratio = if n == 2 && kind == MeasureKind::Pi { 2.0 / (1.0 + q) } else { (n as f64 / i) * p / (1.0 + q / i) };
        w.push(prev * ratio);
    }
    w
}

fn normalize(w: Vec<f64>, tail_weight: f64, kind: MeasureKind, params: &HcParams) -> StationaryTable {
    let z: f64 = w.iter().sum::<f64>() + tail_weight;
    StationaryTable { kind, values: w.into_iter().map(|x| x / z).collect(), tail_bound: tail_weight / z, params: *params }
}

/// Stationary law of the continuous-time spread chain.
pub fn stationary_mu(params: &HcParams, eps: f64) -> Result<StationaryTable> {
    check_eps(eps)?;
    require_ergodic(params)?;
    let len = truncation(params.p(), eps);
    let w = weights(params, len, MeasureKind::Mu);
    Ok(normalize(w, majorant_tail(params.p(), len), MeasureKind::Mu, params))
}

/// Stationary law of the embedded jump chain, from its product formula.
/// Cross-checked against the exit-rate reweighting of `mu`.
pub fn stationary_pi(params: &HcParams, eps: f64) -> Result<StationaryTable> {
    check_eps(eps)?;
    require_ergodic(params)?;
    let len = truncation(params.p(), eps);
    let w = weights(params, len, MeasureKind::Pi);
    let table = normalize(w, majorant_tail(params.p(), len), MeasureKind::Pi, params);
    let other = stationary_pi_from_mu(&stationary_mu(params, eps)?);
    let tv = table.total_variation(&other.values);
    if tv > 1e-12 {
        return Err(Error::InconsistentMeasure(tv));
    }
    Ok(table)
}

/// `pi(k) ∝ mu(k) · exit_rate(k)`, renormalized on the same support with
/// the same tail majorant as [`stationary_pi`].
pub fn stationary_pi_from_mu(mu: &StationaryTable) -> StationaryTable {
    let params = mu.params;
    let base = mu.values[0] * params.exit_rate(1);
    let w: Vec<f64> = mu.values.iter().enumerate().map(|(i, m)| m * params.exit_rate(i as u64 + 1) / base).collect();
    normalize(w, majorant_tail(params.p(), mu.len()), MeasureKind::Pi, &params)
}

/// Per-state `|inflow - outflow|` of the continuous-time balance equations on the truncated support.
pub fn global_balance_residuals(mu: &StationaryTable) -> Vec<f64> {
    let p = &mu.params;
    let (gp, gm) = (p.gamma_plus(), p.gamma_minus());
    let n = mu.len();
    // suffix[k] = Σ_{l > k+1} mu(l) / (l - 1) over table indices
    let mut suffix = vec![0.0; n + 1];
    for idx in (0..n).rev() {
        let l = (idx + 1) as f64;
        suffix[idx] = suffix[idx + 1] + if idx >= 1 { mu.values[idx] / (l - 1.0) } else { 0.0 };
    }
    (0..n)
        .map(|idx| {
            let k = idx as u64 + 1;
            let from_below = if idx >= 1 { mu.values[idx - 1] * gp } else { 0.0 };
            let from_above = gm * suffix[idx + 1];
            (from_below + from_above - mu.values[idx] * p.exit_rate(k)).abs()
        })
        .collect()
}

/// Per-state `|(πP)(k) - π(k)|` for the embedded chain on the truncated support.
pub fn embedded_balance_residuals(pi: &StationaryTable) -> Vec<f64> {
    let params = &pi.params;
    let (pu, pd) = (params.p(), params.q());
    let n = pi.len();
    let mut suffix = vec![0.0; n + 1];
    for idx in (0..n).rev() {
        let l = (idx + 1) as f64;
        suffix[idx] = suffix[idx + 1] + if idx >= 1 { pi.values[idx] / (l - 1.0) } else { 0.0 };
    }
    (0..n)
        .map(|idx| {
            let from_below = match idx {
                0 => 0.0,
                1 => pi.values[0],
                _ => pi.values[idx - 1] * pu,
            };
            (from_below + pd * suffix[idx + 1] - pi.values[idx]).abs()
        })
        .collect()
}

/// Mean number of spread jumps per unit time under `mu`.
pub fn mean_jump_rate(params: &HcParams) -> Result<f64> {
    let mu = stationary_mu(params, SERIES_EPS)?;
    Ok(mu.values.iter().enumerate().map(|(i, m)| m * params.exit_rate(i as u64 + 1)).sum())
}

/// Mean stationary spread `Σ k mu(k)`.
pub fn mean_spread(params: &HcParams) -> Result<f64> {
    Ok(stationary_mu(params, SERIES_EPS)?.first_moment())
}

/// Asymptotic bid drift per embedded step, `lim p_n / n`.
pub fn embedded_drift_v(params: &HcParams) -> Result<f64> {
    let pi = stationary_pi(params, SERIES_EPS)?;
    Ok(drift_from_pi(params, pi.at(1), pi.first_moment()))
}

fn drift_from_pi(p: &HcParams, pi1: f64, first_moment: f64) -> f64 {
    let (gp, gm, g) = (p.gamma_plus(), p.gamma_minus(), p.gamma());
    -p.beta_minus / g - (pi1 / g) * (p.beta_minus * gm / gp + p.beta_plus / 2.0) + p.beta_plus / (2.0 * g) * first_moment
}

/// Variants of the continuous-time bid drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMethod {
    /// `mu`-form with a factor `gamma`.
    Theorem,
    /// Embedded drift times `gamma` (treats jumps as Poisson at rate `gamma`).
    LemmaTimesGamma,
    /// Embedded drift times the stationary mean jump rate (renewal-reward).
    LemmaTimesJumpRate,
    /// Stationary expected bid velocity; the ground truth.
    Generator,
}

impl DriftMethod {
    pub const ALL: [DriftMethod; 4] =
        [DriftMethod::Theorem, DriftMethod::LemmaTimesGamma, DriftMethod::LemmaTimesJumpRate, DriftMethod::Generator];

    pub fn as_str(self) -> &'static str {
        match self {
            DriftMethod::Theorem => "theorem",
            DriftMethod::LemmaTimesGamma => "lemma_times_gamma",
            DriftMethod::LemmaTimesJumpRate => "lemma_times_jump_rate",
            DriftMethod::Generator => "generator",
        }
    }
}

impl FromStr for DriftMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DriftMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "drift method", name: s.to_string() })
    }
}

/// Almost-sure limit of `P_b(t) / t` by the chosen route.
pub fn drift_d(params: &HcParams, method: DriftMethod) -> Result<f64> {
    require_ergodic(params)?;
    let p = params;
    Ok(match method {
        DriftMethod::Generator => (p.alpha_plus * p.beta_plus - p.alpha_minus * p.beta_minus) / p.gamma_minus(),
        DriftMethod::Theorem => {
            let mu = stationary_mu(p, SERIES_EPS)?;
            let (gp, gm, g) = (p.gamma_plus(), p.gamma_minus(), p.gamma());
            -p.beta_minus - mu.at(1) * g * (p.beta_minus * gm / gp + p.beta_plus / 2.0)
                + p.beta_plus * g / 2.0 * mu.first_moment()
        }
        DriftMethod::LemmaTimesGamma => embedded_drift_v(p)? * p.gamma(),
        DriftMethod::LemmaTimesJumpRate => embedded_drift_v(p)? * mean_jump_rate(p)?,
    })
}

/// Which stationary weight multiplies the state-1 correction in the
/// one-step variance formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateOneWeight {
    #[default]
    Pi,
    /// Weights spread 1 by `mu(1)`; kept for comparison.
    Mu,
}

/// Stationary variance of one embedded bid increment `F`.
pub fn clt_variance_embedded(params: &HcParams) -> Result<f64> {
    clt_variance_embedded_with(params, StateOneWeight::Pi)
}

pub fn clt_variance_embedded_with(params: &HcParams, weight: StateOneWeight) -> Result<f64> {
    let pi = stationary_pi(params, SERIES_EPS)?;
    let p = params;
    let (gp, gm, g) = (p.gamma_plus(), p.gamma_minus(), p.gamma());
    let w1 = match weight {
        StateOneWeight::Pi => pi.at(1),
        StateOneWeight::Mu => stationary_mu(p, SERIES_EPS)?.at(1),
    };
    let second: f64 = pi.values.iter().enumerate().map(|(i, v)| {
        let s = (i + 1) as f64;
        s * (2.0 * s - 1.0) * v
    }).sum();
    let v = drift_from_pi(p, pi.at(1), pi.first_moment());
    Ok(p.beta_minus / g + (w1 / g) * (p.beta_minus * gm / gp - p.beta_plus / 6.0) + p.beta_plus / (6.0 * g) * second
        - v * v)
}

/// Price volatility after `n` embedded jumps, `sqrt(n · Var F)`.
pub fn volatility_sigma_n(params: &HcParams, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok((n as f64 * clt_variance_embedded(params)?).sqrt())
}

/// Continuous-time limit variance in the form `(σ² + v²) γ`.
pub fn clt_variance_continuous(params: &HcParams) -> Result<f64> {
    let s2 = clt_variance_embedded(params)?;
    let v = embedded_drift_v(params)?;
    Ok((s2 + v * v) * params.gamma())
}

/// Markov-chain asymptotic variance `lim Var(p_n)/n`, including the
/// autocovariance of successive increments. Solves the Poisson equation of
/// the embedded chain on the truncated support.
pub fn clt_variance_markov(params: &HcParams) -> Result<f64> {
    let pi = stationary_pi(params, SERIES_EPS)?;
    let p = params;
    let n = pi.len();
    let (pu, pd) = (p.p(), p.q());
    let up_cut = p.beta_minus / p.gamma_plus();
    let down_cut = if p.gamma_minus() > 0.0 { p.beta_plus / p.gamma_minus() } else { 0.0 };
    let v = drift_from_pi(p, pi.at(1), pi.first_moment());

    let mut trans = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let s = i + 1;
        if s == 1 {
            trans[(0, 1)] = 1.0;
            continue;
        }
        let up_to = (i + 1).min(n - 1);
        trans[(i, up_to)] += pu;
        for j in 0..i {
            trans[(i, j)] += pd / (s - 1) as f64;
        }
    }
    let mean_f: DVector<f64> = DVector::from_iterator(
        n,
        (1..=n).map(|s| if s == 1 { -up_cut } else { -pu * up_cut + pd * down_cut * s as f64 / 2.0 }),
    );
    let pi_vec = DVector::from_column_slice(&pi.values);
    let a = DMatrix::<f64>::identity(n, n) - &trans + DVector::from_element(n, 1.0) * pi_vec.transpose();
    let rhs = mean_f.add_scalar(-v);
    let psi = a.lu().solve(&rhs).ok_or_else(|| invalid("Poisson equation is singular"))?;

    let mut acc = 0.0;
    for i in 0..n {
        let s = i + 1;
        let w = pi.values[i];
        if w == 0.0 {
            continue;
        }
        // opening: F = -1 with probability up_cut, else 0
        let up_to = (i + 1).min(n - 1);
        let c = psi[up_to] - psi[i] - v;
        let p_up = if s == 1 { 1.0 } else { pu };
        acc += w * p_up * (up_cut * (c - 1.0).powi(2) + (1.0 - up_cut) * c * c);
        if s >= 2 {
            for j in 0..i {
                let d = (i - j) as f64;
                let c = psi[j] - psi[i] - v;
                acc += w * pd / (s - 1) as f64 * (down_cut * (c + d).powi(2) + (1.0 - down_cut) * c * c);
            }
        }
    }
    Ok(acc)
}

/// Probability that the next mid-price move is upward.
pub fn next_move_prob(params: &HcParams) -> Result<f64> {
    params.validate()?;
    let g = params.gamma();
    if g <= 0.0 {
        return Err(invalid("all rates are zero"));
    }
    Ok((params.alpha_plus + params.beta_plus) / g)
}

/// Continuous piecewise-linear function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearTrajectory {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinearTrajectory {
    /// Breakpoints must start at `t = 0`, end at `t = 1`, with strictly increasing times.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a trajectory needs at least two breakpoints"));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(invalid("trajectory must span exactly [0, 1]"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) || points.iter().any(|p| !p.1.is_finite()) {
            return Err(invalid("breakpoint times must increase strictly and values be finite"));
        }
        Ok(Self { points })
    }

    pub fn linear(slope: f64) -> Self {
        Self { points: vec![(0.0, 0.0), (1.0, slope)] }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// `(length, slope)` for each segment.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| {
            let len = w[1].0 - w[0].0;
            (len, (w[1].1 - w[0].1) / len)
        })
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.segments().map(|s| s.1).collect()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let idx = self.points.partition_point(|p| p.0 <= t).clamp(1, self.points.len() - 1);
        let (a, b) = (self.points[idx - 1], self.points[idx]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    }

    pub fn end_value(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFunctionValue {
    pub value: f64,
    /// `f(1)` of the evaluated trajectory.
    pub terminal: f64,
}

/// Local Poisson cost of a slope above the opening rate.
fn excess_cost(slope: f64, gamma_plus: f64) -> f64 {
    if slope > gamma_plus {
        slope * (slope / gamma_plus).ln() - (slope - gamma_plus)
    } else {
        0.0
    }
}

/// Rate function of the scaled spread along a piecewise-linear trajectory.
/// Trajectories that do not start at 0 or go negative cost `+∞`.
pub fn rate_function(f: &PiecewiseLinearTrajectory, params: &HcParams) -> RateFunctionValue {
    let terminal = f.end_value();
    if f.points[0].1 != 0.0 || f.points.iter().any(|p| p.1 < 0.0) {
        return RateFunctionValue { value: f64::INFINITY, terminal };
    }
    let gp = params.gamma_plus();
    let cost: f64 = f.segments().map(|(len, slope)| len * excess_cost(slope.max(0.0), gp)).sum();
    RateFunctionValue { value: params.gamma_minus() + cost, terminal }
}

fn check_level(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("terminal level must be positive, got {x}")))
    }
}

/// `inf I(f)` over trajectories with `f(1) = x`.
pub fn ldp_exponent(x: f64, params: &HcParams) -> Result<f64> {
    check_level(x)?;
    Ok(params.gamma_minus() + excess_cost(x, params.gamma_plus()))
}

/// Minimizer of the rate function ending at `x`: flat then slope `gamma_plus`
/// when `x < gamma_plus`, else the straight line of slope `x`.
pub fn optimal_spread_trajectory(x: f64, params: &HcParams) -> Result<PiecewiseLinearTrajectory> {
    check_level(x)?;
    let gp = params.gamma_plus();
    if x < gp {
        let tx = 1.0 - x / gp;
        Ok(PiecewiseLinearTrajectory { points: vec![(0.0, 0.0), (tx, 0.0), (1.0, x)] })
    } else {
        Ok(PiecewiseLinearTrajectory::linear(x))
    }
}

/// Bid and ask trajectories (relative to their starting prices) accompanying
/// the optimal spread trajectory. The opening is split between the ask and
/// the bid in proportion `alpha_plus : beta_minus`.
pub fn optimal_price_trajectories(
    x: f64,
    params: &HcParams,
) -> Result<(PiecewiseLinearTrajectory, PiecewiseLinearTrajectory)> {
    check_level(x)?;
    let gp = params.gamma_plus();
    if gp <= 0.0 {
        return Err(invalid("price trajectories need gamma_plus > 0"));
    }
    let spread = optimal_spread_trajectory(x, params)?;
    let share_ask = params.alpha_plus / gp;
    let scale = |share: f64, sign: f64| PiecewiseLinearTrajectory {
        points: spread.points.iter().map(|&(t, y)| (t, sign * share * y)).collect(),
    };
    Ok((scale(1.0 - share_ask, -1.0), scale(share_ask, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fitted() -> HcParams {
        HcParams::new(5.0, 3.0, 2.0, 4.0).unwrap()
    }

    #[test]
    fn mu_ratio_and_balance() {
        let p = fitted();
        let mu = stationary_mu(&p, 1e-10).unwrap();
        assert_relative_eq!(mu.at(2) / mu.at(1), 2.0 * p.p() / (1.0 + p.q()), epsilon = 1e-14);
        assert!(global_balance_residuals(&mu).iter().all(|&r| r < 1e-10));
        let total: f64 = mu.values.iter().sum::<f64>() + mu.tail_bound;
        assert!((1.0 - 1e-10..=1.0 + 1e-15).contains(&total));
        assert!(mu.tail_bound <= 1e-10);
    }

    #[test]
    fn eps_out_of_range() {
        assert!(stationary_mu(&fitted(), 0.0).is_err());
        assert!(stationary_mu(&fitted(), 0.5).is_err());
        assert!(stationary_pi(&fitted(), 1e-3).is_ok());
    }

    #[test]
    fn pi_product_formula() {
        let p = fitted();
        let pi = stationary_pi(&p, 1e-10).unwrap();
        let (pp, q) = (p.p(), p.q());
        for n in 2..=10u64 {
            let prod: f64 = (1..n).map(|i| 1.0 + q / i as f64).product();
            let expect = n as f64 * pp.powi(n as i32 - 2) / prod;
            assert_relative_eq!(pi.at(n) / pi.at(1), expect, max_relative = 1e-12);
        }
        for n in 2..=pi.len() as u64 {
            assert!(pi.at(n) < n as f64 * pp.powi(n as i32 - 2) * pi.at(1));
        }
        assert!(embedded_balance_residuals(&pi).iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn drift_examples() {
        let p = fitted();
        assert_relative_eq!(drift_d(&p, DriftMethod::Generator).unwrap(), -0.4, epsilon = 1e-15);
        assert_relative_eq!(drift_d(&p, DriftMethod::LemmaTimesJumpRate).unwrap(), -0.4, epsilon = 1e-9);
        let balanced = HcParams::new(3.0, 2.0, 4.0, 6.0).unwrap();
        assert_eq!(drift_d(&balanced, DriftMethod::Generator).unwrap(), 0.0);
        assert!("bogus".parse::<DriftMethod>().is_err());
        assert_eq!("lemma_times_gamma".parse::<DriftMethod>().unwrap(), DriftMethod::LemmaTimesGamma);
    }

    #[test]
    fn generator_drift_matches_mu_series() {
        let p = fitted();
        let mu = stationary_mu(&p, 1e-10).unwrap();
        let series = -p.beta_minus + p.beta_plus / 2.0 * (mu.first_moment() - mu.at(1));
        assert_relative_eq!(series, drift_d(&p, DriftMethod::Generator).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn no_bid_moves_means_no_drift_or_variance() {
        let p = HcParams::new(5.0, 3.0, 0.0, 0.0).unwrap();
        assert_eq!(embedded_drift_v(&p).unwrap(), 0.0);
        assert_eq!(clt_variance_embedded(&p).unwrap(), 0.0);
        assert_eq!(clt_variance_continuous(&p).unwrap(), 0.0);
    }

    #[test]
    fn sigma_scaling() {
        let p = fitted();
        let s1 = volatility_sigma_n(&p, 1).unwrap();
        assert_relative_eq!(s1, clt_variance_embedded(&p).unwrap().sqrt());
        assert_relative_eq!(volatility_sigma_n(&p, 400).unwrap(), 2.0 * volatility_sigma_n(&p, 100).unwrap(), max_relative = 1e-14);
        assert!(volatility_sigma_n(&p, 0).is_err());
    }

    #[test]
    fn continuous_variance_increases_with_beta_plus() {
        let mut last = 0.0;
        for i in 1..=20 {
            let p = HcParams::new(5.0, 3.0, 0.5 * i as f64, 4.0).unwrap();
            let v = clt_variance_continuous(&p).unwrap();
            assert!(v > last, "beta_plus = {}", p.beta_plus);
            last = v;
        }
    }

    #[test]
    fn next_move_examples() {
        assert_eq!(next_move_prob(&fitted()).unwrap(), 0.5);
        let p = HcParams::new(0.0, 3.0, 0.0, 4.0).unwrap();
        assert_eq!(next_move_prob(&p).unwrap(), 0.0);
    }

    #[test]
    fn rate_function_examples() {
        let p = fitted();
        let gp = p.gamma_plus();
        let flat = PiecewiseLinearTrajectory::new(vec![(0.0, 0.0), (0.3, 2.0), (0.6, 1.0), (1.0, 4.0)]).unwrap();
        assert!(flat.slopes().iter().all(|&s| s <= gp));
        assert_eq!(rate_function(&flat, &p).value, p.gamma_minus());
        let steep = PiecewiseLinearTrajectory::linear(2.0 * gp);
        assert_relative_eq!(
            rate_function(&steep, &p).value,
            p.gamma_minus() + 2.0 * gp * 2f64.ln() - gp,
            epsilon = 1e-12
        );
        let f2 = optimal_spread_trajectory(3.0, &p).unwrap();
        assert_eq!(rate_function(&f2, &p).value, p.gamma_minus());
        let bad = PiecewiseLinearTrajectory::new(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(rate_function(&bad, &p).value.is_infinite());
    }

    #[test]
    fn ldp_examples() {
        let p = fitted();
        let (gp, gm) = (p.gamma_plus(), p.gamma_minus());
        assert_eq!(ldp_exponent(gp, &p).unwrap(), gm);
        assert_relative_eq!(ldp_exponent(std::f64::consts::E * gp, &p).unwrap(), gm + gp, epsilon = 1e-12);
        assert_eq!(ldp_exponent(0.1, &p).unwrap(), ldp_exponent(8.0, &p).unwrap());
        assert!(ldp_exponent(0.0, &p).is_err());
        assert!(ldp_exponent(-1.0, &p).is_err());
    }

    #[test]
    fn optimal_trajectory_shapes() {
        let p = fitted();
        let gp = p.gamma_plus();
        let f = optimal_spread_trajectory(gp / 2.0, &p).unwrap();
        assert_eq!(f.points()[1].0, 0.5);
        let f = optimal_spread_trajectory(3.0, &p).unwrap();
        assert_relative_eq!(f.points()[1].0, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(f.slopes()[1], gp, epsilon = 1e-12);
        let f = optimal_spread_trajectory(2.0 * gp, &p).unwrap();
        assert_eq!(f.points(), &[(0.0, 0.0), (1.0, 2.0 * gp)]);
        assert!(optimal_spread_trajectory(0.0, &p).is_err());
    }

    #[test]
    fn price_trajectories_split_the_opening() {
        let p = fitted();
        for x in [0.5, 3.0, 9.0, 20.0] {
            let (bid, ask) = optimal_price_trajectories(x, &p).unwrap();
            assert_relative_eq!(ask.end_value() - bid.end_value(), x, epsilon = 1e-12);
        }
        let (bid, ask) = optimal_price_trajectories(3.0, &p).unwrap();
        assert_relative_eq!(*ask.slopes().last().unwrap(), p.alpha_plus, epsilon = 1e-12);
        assert_relative_eq!(*bid.slopes().last().unwrap(), -p.beta_minus, epsilon = 1e-12);
        let q = HcParams::new(0.0, 3.0, 2.0, 4.0).unwrap();
        let (bid, ask) = optimal_price_trajectories(1.0, &q).unwrap();
        assert!(ask.points().iter().all(|pt| pt.1 == 0.0));
        assert_relative_eq!(bid.end_value(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn markov_variance_reference_value() {
        // Poisson-equation value, cross-checked with an independent dense eigen-solve.
        let v = clt_variance_markov(&fitted()).unwrap();
        assert!((v - 0.806_785_526_2).abs() < 1e-6, "{v}");
    }
}
