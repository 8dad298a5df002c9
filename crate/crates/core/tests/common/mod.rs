//! Reference computations that avoid the library's closed forms.
#![allow(dead_code)]

use lobflux::HcParams;

pub fn fitted() -> HcParams {
    HcParams::new(5.0, 3.0, 2.0, 4.0).unwrap()
}

/// Continuous-time stationary law of the spread on `1..=n`, by power
/// iteration of the uniformized chain. Openings at `n` are suppressed.
pub fn mu_power(p: &HcParams, n: usize) -> Vec<f64> {
    let (gp, gm) = (p.gamma_plus(), p.gamma_minus());
    let lambda = gp + gm;
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let k = i + 1;
            let mut stay = 1.0;
            if k < n {
                y[i + 1] += x[i] * gp / lambda;
                stay -= gp / lambda;
            }
            if k >= 2 {
                let share = x[i] * gm / lambda / (k - 1) as f64;
                y[..i].iter_mut().for_each(|v| *v += share);
                stay -= gm / lambda;
            }
            y[i] += x[i] * stay;
        }
        let diff: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if diff < 1e-16 {
            break;
        }
    }
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

/// Jump-chain stationary law from `mu_power`, reweighted by exit rates.
pub fn pi_power(p: &HcParams, n: usize) -> Vec<f64> {
    let mu = mu_power(p, n);
    let w: Vec<f64> = mu.iter().enumerate().map(|(i, m)| m * if i == 0 { p.gamma_plus() } else { p.gamma() }).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// `(E F, E F²)` of one stationary embedded bid increment, enumerating every
/// transition and its price outcome.
pub fn f_moments(p: &HcParams, n: usize) -> (f64, f64) {
    let pi = pi_power(p, n);
    let (gp, gm) = (p.gamma_plus(), p.gamma_minus());
    let up_prob = gp / (gp + gm);
    let (mut m1, mut m2) = (0.0, 0.0);
    for (i, w) in pi.iter().enumerate() {
        let s = i + 1;
        let pu = if s == 1 { 1.0 } else { up_prob };
        // Opening: bid drops one tick with probability beta_minus / gamma_plus.
        let bid_down = p.beta_minus / gp;
        m1 -= w * pu * bid_down;
        m2 += w * pu * bid_down;
        if s >= 2 {
            let bid_up = p.beta_plus / gm;
            for target in 1..s {
                let d = (s - target) as f64;
                let pr = w * (1.0 - pu) / (s - 1) as f64 * bid_up;
                m1 += pr * d;
                m2 += pr * d * d;
            }
        }
    }
    (m1, m2)
}

/// `Σ_k μ(k) · (expected bid drift at spread k)`.
pub fn generator_drift(p: &HcParams, n: usize) -> f64 {
    let mu = mu_power(p, n);
    mu.iter()
        .enumerate()
        .map(|(i, m)| {
            let k = (i + 1) as f64;
            let up = if i >= 1 { p.beta_plus * k / 2.0 } else { 0.0 };
            m * (up - p.beta_minus)
        })
        .sum()
}
