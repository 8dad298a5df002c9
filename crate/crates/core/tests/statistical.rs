mod common;

use common::{fitted, mu_power, pi_power};
use lobflux::analytics::total_variation;
use lobflux::simulate::{embedded_spread_chain, simulate_book, simulate_spread};
use lobflux::stats::{ks_p_value, ks_statistic};
use lobflux::{BookState, RegimeSpec};

fn histogram(states: impl Iterator<Item = u64>) -> Vec<f64> {
    let mut counts = vec![0.0; 1];
    let mut n = 0.0;
    for s in states {
        let i = s as usize - 1;
        if counts.len() <= i {
            counts.resize(i + 1, 0.0);
        }
        counts[i] += 1.0;
        n += 1.0;
    }
    counts.iter().map(|c| c / n).collect()
}

#[test]
fn holding_times_are_exponential() {
    let p = fitted();
    let path = simulate_spread(&RegimeSpec::hc(p), 1, 2e4, 11).unwrap();
    let mut holds: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let mut prev_t = 0.0;
    let mut k = path.k0;
    for &(t, next) in &path.jumps {
        if (k as usize) < holds.len() {
            holds[k as usize].push(t - prev_t);
        }
        prev_t = t;
        k = next;
    }
    for k in 1..=3u64 {
        let xs = &holds[k as usize];
        let rate = p.exit_rate(k);
        let d = ks_statistic(xs, |x| 1.0 - (-rate * x).exp());
        let pv = ks_p_value(d, xs.len());
        assert!(xs.len() > 5000, "k={k}: only {} holds", xs.len());
        assert!(pv > 1e-3, "k={k}: KS p-value {pv} (d={d}, n={})", xs.len());
    }
}

#[test]
fn embedded_chain_matches_jump_skeleton() {
    let p = fitted();
    let embedded = embedded_spread_chain(&p, 400_000, 5).unwrap();
    let skeleton = simulate_spread(&RegimeSpec::hc(p), 1, 400_000.0 / p.gamma() * 1.1, 6).unwrap();
    let a = histogram(embedded.iter().skip(1).copied());
    let b = histogram(skeleton.jumps.iter().map(|j| j.1));
    let pi = pi_power(&p, 140);
    let tv_ab = total_variation(&a, &b);
    assert!(total_variation(&a, &pi) < 0.006, "embedded vs pi {}", total_variation(&a, &pi));
    assert!(total_variation(&b, &pi) < 0.006, "skeleton vs pi {}", total_variation(&b, &pi));
    assert!(tv_ab < 0.01, "two-sample TV {tv_ab}");
}

#[test]
fn book_spread_occupancy_matches_mu() {
    let p = fitted();
    let path = simulate_book(&RegimeSpec::hc(p), BookState::new(0, 1).unwrap(), 2e4, 2).unwrap();
    let mut occ = vec![0.0; 1];
    let mut last = 0.0;
    let mut k = 1usize;
    for e in &path.events {
        if occ.len() < k {
            occ.resize(k, 0.0);
        }
        occ[k - 1] += e.t - last;
        last = e.t;
        k = e.state_after.spread() as usize;
    }
    if occ.len() < k {
        occ.resize(k, 0.0);
    }
    occ[k - 1] += path.horizon - last;
    let occ: Vec<f64> = occ.iter().map(|o| o / path.horizon).collect();
    let tv = total_variation(&occ, &mu_power(&p, 140));
    assert!(tv < 0.015, "TV {tv}");
}

#[test]
fn mid_price_moves_up_with_next_move_probability() {
    let p = fitted();
    let path = simulate_book(&RegimeSpec::hc(p), BookState::new(0, 1).unwrap(), 2e4, 9).unwrap();
    let mut prev = path.initial;
    let (mut up, mut moves) = (0.0, 0.0);
    for e in &path.events {
        let before = prev.bid() + prev.ask();
        let after = e.state_after.bid() + e.state_after.ask();
        if after != before {
            moves += 1.0;
            if after > before {
                up += 1.0;
            }
        }
        prev = e.state_after;
    }
    // At spread 1 only openings occur, so the per-move frequency mixes two laws.
    let pi1 = pi_power(&p, 140)[0];
    let expected = pi1 * p.alpha_plus / p.gamma_plus() + (1.0 - pi1) * (p.alpha_plus + p.beta_plus) / p.gamma();
    let se = (expected * (1.0 - expected) / moves).sqrt();
    assert!(((up / moves) - expected).abs() < 4.0 * se, "{} vs {expected}", up / moves);
    let closed_form = lobflux::analytics::next_move_prob(&p).unwrap();
    assert!((expected - closed_form - pi1 * (p.alpha_plus / p.gamma_plus() - closed_form)).abs() < 1e-12);
}
