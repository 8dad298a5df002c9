mod common;

use approx::assert_abs_diff_eq;
use common::{f_moments, fitted, generator_drift, mu_power, pi_power};
use lobflux::analytics::{
    clt_variance_embedded, drift_d, global_balance_residuals, ldp_exponent, optimal_spread_trajectory,
    rate_function, stationary_mu, stationary_pi, stationary_pi_from_mu, DriftMethod, PiecewiseLinearTrajectory,
    SERIES_EPS,
};
use lobflux::model::{spread_law, AlmostUniformGenerator, Direction, Leg};
use lobflux::{BookState, CatastropheDist, HcParams, RegimeSpec};
use proptest::prelude::*;

const N: usize = 140;

#[test]
fn mu_matches_power_iteration() {
    let p = fitted();
    let mu = stationary_mu(&p, SERIES_EPS).unwrap();
    let reference = mu_power(&p, N);
    for (k, r) in reference.iter().enumerate().take(60) {
        assert_abs_diff_eq!(mu.at(k as u64 + 1), *r, epsilon = 1e-11);
    }
    assert_abs_diff_eq!(mu.at(1), 0.208911, epsilon = 5e-7);
}

#[test]
fn pi_matches_power_iteration() {
    let p = fitted();
    let pi = stationary_pi(&p, SERIES_EPS).unwrap();
    let reference = pi_power(&p, N);
    for (k, r) in reference.iter().enumerate().take(60) {
        assert_abs_diff_eq!(pi.at(k as u64 + 1), *r, epsilon = 1e-11);
    }
    assert_abs_diff_eq!(pi.at(1), 0.145128, epsilon = 5e-7);
}

#[test]
fn balance_residuals_recomputed_by_hand() {
    let p = fitted();
    let mu = stationary_mu(&p, SERIES_EPS).unwrap();
    let v = &mu.values;
    let n = v.len();
    for k in 1..n.saturating_sub(5) {
        let out = v[k - 1] * p.exit_rate(k as u64);
        let mut inflow = if k >= 2 { v[k - 2] * p.gamma_plus() } else { 0.0 };
        for j in (k + 1)..=n {
            inflow += v[j - 1] * p.gamma_minus() / (j - 1) as f64;
        }
        assert!((out - inflow).abs() < 1e-10, "k={k}: {out} vs {inflow}");
    }
    assert!(global_balance_residuals(&mu).iter().all(|r| r.abs() < 1e-10));
}

#[test]
fn spread_moment_identity() {
    let p = fitted();
    let mu = mu_power(&p, N);
    let s: f64 = mu.iter().enumerate().skip(1).map(|(i, m)| (i + 1) as f64 * m).sum();
    assert_abs_diff_eq!(s, 2.0 * p.gamma_plus() / p.gamma_minus(), epsilon = 1e-8);
}

#[test]
fn drift_generator_form() {
    let p = fitted();
    let reference = generator_drift(&p, N);
    assert_abs_diff_eq!(reference, -0.4, epsilon = 1e-9);
    assert_abs_diff_eq!(drift_d(&p, DriftMethod::Generator).unwrap(), reference, epsilon = 1e-9);
}

#[test]
fn embedded_variance_matches_enumeration() {
    for p in [fitted(), HcParams::new(1.0, 2.0, 0.5, 3.0).unwrap(), HcParams::new(0.3, 4.0, 1.7, 0.2).unwrap()] {
        let (m1, m2) = f_moments(&p, N);
        let var = clt_variance_embedded(&p).unwrap();
        assert_abs_diff_eq!(var, m2 - m1 * m1, epsilon = 1e-10);
    }
}

#[test]
fn optimal_trajectory_beats_two_segment_grid() {
    let p = fitted();
    let gp = p.gamma_plus();
    for i in 1..=30 {
        let x = 0.1 * gp * i as f64;
        let exponent = ldp_exponent(x, &p).unwrap();
        let f = optimal_spread_trajectory(x, &p).unwrap();
        assert_abs_diff_eq!(rate_function(&f, &p).value, exponent, epsilon = 1e-12);
        let mut best = f64::INFINITY;
        for a in 1..200 {
            let t1 = a as f64 / 200.0;
            for b in 0..=40 {
                let y1 = x * b as f64 / 40.0;
                let g = PiecewiseLinearTrajectory::new(vec![(0.0, 0.0), (t1, y1), (1.0, x)]).unwrap();
                best = best.min(rate_function(&g, &p).value);
            }
        }
        assert!(best >= exponent - 1e-12, "x={x}: grid {best} below {exponent}");
        assert!(best - exponent < 1e-2 * exponent.max(1.0), "x={x}: grid {best} far from {exponent}");
    }
}

fn hc_params() -> impl Strategy<Value = HcParams> {
    (0.01f64..10.0, 0.01f64..10.0, 0.01f64..10.0, 0.01f64..10.0)
        .prop_map(|(a, b, c, d)| HcParams::new(a, b, c, d).unwrap())
}

fn catastrophe() -> impl Strategy<Value = CatastropheDist> {
    prop_oneof![
        Just(CatastropheDist::Uniform),
        (-0.9f64..5.0).prop_map(|eta| {
            let generator = AlmostUniformGenerator::Tilted { eta };
            CatastropheDist::AlmostUniform { generator, c: generator.required_c().max(1.0 + 1e-9) }
        }),
        (0.05f64..0.95).prop_map(|first_mass| {
            let generator = AlmostUniformGenerator::TwoPart { first_mass };
            CatastropheDist::AlmostUniform { generator, c: generator.required_c().max(1.0 + 1e-9) }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn book_law_marginalizes_to_spread_law(p in hc_params(), cat in catastrophe(), k in 1u64..=50, bid in -50i64..50) {
        let regime = RegimeSpec::Hc { params: p, catastrophe: cat };
        let book = regime.book_law(BookState::new(bid, bid + k as i64).unwrap());
        let spread = spread_law(k, &regime);
        let up = book.rate(Leg::Ask, Direction::Up, 1) + book.rate(Leg::Bid, Direction::Down, 1);
        prop_assert!((up - spread.rate(Leg::Spread, Direction::Up, 1)).abs() < 1e-12);
        for d in 1..k {
            let down = book.rate(Leg::Ask, Direction::Down, d) + book.rate(Leg::Bid, Direction::Up, d);
            prop_assert!((down - spread.rate(Leg::Spread, Direction::Down, d)).abs() < 1e-12);
        }
        prop_assert!((book.total_rate() - spread.total_rate()).abs() < 1e-12);
    }

    #[test]
    fn closing_sizes_sum_to_one_and_respect_bounds(cat in catastrophe(), k in 2u64..=200) {
        let total: f64 = (1..k).map(|d| cat.prob(d, k)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(cat.bound_holds(k, cat.bound_constant()));
        prop_assert_eq!(cat.prob(k, k), 0.0);
    }

    #[test]
    fn pi_constructions_agree(p in hc_params()) {
        let mu = stationary_mu(&p, SERIES_EPS).unwrap();
        let direct = stationary_pi(&p, SERIES_EPS).unwrap();
        prop_assert!(direct.total_variation(&stationary_pi_from_mu(&mu).values) < 1e-12);
    }
}
