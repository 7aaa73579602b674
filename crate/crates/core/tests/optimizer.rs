use std::f64::consts::PI;

use oswr_core::frequency::{max_rho_over_band, rho, rho_sigma, scaled_rho, sufficient_condition_holds};
use oswr_core::optimizer::{
    brute_force_minmax, optimize_v1, optimize_v2, optimize_v3, quartic_positive_roots, v3_search_interval,
    OptimizerDetails, OracleResult, Uniqueness,
};
use oswr_core::{optimize, DiffusionPair, FrequencyBand, TransmissionParams, Version};
use proptest::prelude::*;

fn reference_band() -> FrequencyBand {
    FrequencyBand::from_grid(5.0, 1.0 / 40.0).unwrap()
}

const REFERENCE_MUS: [f64; 4] = [3.1622776601683795, 10.0, 31.622776601683793, 100.0];

#[test]
fn frozen_optimal_parameters_at_the_reference_grid() {
    let band = reference_band();
    let ten = DiffusionPair::from_ratio(10.0).unwrap();
    let hundred = DiffusionPair::from_ratio(100.0).unwrap();
    let p1 = optimize_v1(&band, &ten).unwrap().params.p();
    assert!((p1 - (2.0 * 10f64.sqrt() * PI).sqrt()).abs() < 1e-12);
    assert!((p1 - 4.4574854).abs() < 1e-7);
    let p1 = optimize_v1(&band, &hundred).unwrap().params.p();
    assert!((p1 - 7.92666).abs() < 1e-5);
    let q2 = optimize_v2(&band, &ten).unwrap().params.q();
    assert!((q2 - 2.50663).abs() < 1e-5);
    // V3 at ratio 10, frozen from the bisection
    let v3 = optimize_v3(&band, &ten).unwrap();
    assert!((v3.params.p() - 0.6561105).abs() < 1e-6, "{}", v3.params.p());
    assert!((v3.params.p() * v3.params.q() - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn version_three_bracket_and_estimate() {
    let band = reference_band();
    let pair = DiffusionPair::from_ratio(10.0).unwrap();
    let mu = pair.normalized_mu();
    let interval = v3_search_interval(&band, mu);
    assert!((interval.lo - 0.457505549).abs() < 1e-8);
    assert!((interval.hi - (2.0 * PI).sqrt()).abs() < 1e-12);
    let res = optimize_v3(&band, &pair).unwrap();
    let OptimizerDetails::VersionIII(Some(solve)) = &res.details else {
        panic!("expected a bisection record");
    };
    assert!(interval.contains(res.params.p()));
    assert!(solve.residual.abs() <= 1e-12);
    assert!((solve.estimate - 1.1593).abs() < 1e-4);
    // the estimate is asymptotic in dt; at dt = 1/40 it is still far off
    assert!((res.params.p() / solve.estimate - 0.566).abs() < 1e-3);
}

#[test]
fn version_three_estimate_improves_as_dt_shrinks() {
    let pair = DiffusionPair::from_ratio(10.0).unwrap();
    let ratios: Vec<f64> = [40.0, 400.0, 4000.0, 40000.0]
        .iter()
        .map(|n| {
            let band = FrequencyBand::from_grid(5.0, 1.0 / n).unwrap();
            let res = optimize_v3(&band, &pair).unwrap();
            let OptimizerDetails::VersionIII(Some(solve)) = res.details else {
                panic!("expected a bisection record");
            };
            res.params.p() / solve.estimate
        })
        .collect();
    assert!(ratios.windows(2).all(|w| (1.0 - w[1]).abs() < (1.0 - w[0]).abs()), "{ratios:?}");
}

#[test]
fn min_max_values_are_ordered() {
    let band = reference_band();
    for mu in REFERENCE_MUS {
        let pair = DiffusionPair::new(mu * mu, 1.0).unwrap();
        let r: Vec<f64> = [Version::I, Version::II, Version::III]
            .iter()
            .map(|&v| optimize(v, &band, &pair).unwrap().rho_star)
            .collect();
        assert!(r[2] <= r[1], "mu {mu}: {r:?}");
        if mu >= 10.0 {
            assert!(r[1] <= r[0], "mu {mu}: {r:?}");
        }
        assert!(r.iter().all(|v| *v > 0.0 && *v < 1.0));
    }
}

#[test]
fn predicted_values_match_band_maximum() {
    let band = reference_band();
    for mu in REFERENCE_MUS {
        let pair = DiffusionPair::new(1.0, 1.0 / (mu * mu)).unwrap();
        for version in [Version::II, Version::III] {
            let res = optimize(version, &band, &pair).unwrap();
            let (_, max) = max_rho_over_band(&res.params, &pair, &band, 2000);
            assert!((max - res.rho_star).abs() <= 1e-8, "{version} mu {mu}: {max} vs {}", res.rho_star);
        }
        let v2 = optimize_v2(&band, &pair).unwrap();
        let gap = (rho(band.wt1(), &v2.params, &pair) - rho(band.wt2(), &v2.params, &pair)).abs();
        assert!(gap <= 1e-12);
    }
}

#[test]
fn version_one_case_three_roots_beat_the_center() {
    let band = FrequencyBand::from_endpoints(1.0, 2.0).unwrap();
    let pair = DiffusionPair::from_ratio(100.0).unwrap();
    let res = optimize_v1(&band, &pair).unwrap();
    assert_eq!(res.uniqueness, Uniqueness::TwoMinimizers);
    let center = TransmissionParams::version_one((20.0f64 * 2.0).sqrt(), &pair).unwrap();
    let center_max = max_rho_over_band(&center, &pair, &band, 2000).1;
    for p in quartic_positive_roots(&band, 10.0) {
        let params = TransmissionParams::version_one(p, &pair).unwrap();
        let (a, b) = (rho(band.wt1(), &params, &pair), rho(band.wt2(), &params, &pair));
        assert!((a - b).abs() <= 1e-10);
        assert!(a < center_max);
    }
}

fn cells(x: f64, target: f64, grid: &[f64]) -> f64 {
    (x / target).ln().abs() / OracleResult::log_step(grid)
}

#[test]
fn oracle_certifies_version_one_small_mu() {
    let band = reference_band();
    let pair = DiffusionPair::from_ratio(10.0).unwrap();
    let res = optimize_v1(&band, &pair).unwrap();
    let oracle = brute_force_minmax(&band, &pair, Version::I, 2048, 256).unwrap();
    assert!(res.rho_star <= oracle.rho_star + 1e-3);
    assert!((oracle.rho_star / res.rho_star - 1.0).abs() <= 1e-3, "{} vs {}", oracle.rho_star, res.rho_star);
    assert!(cells(oracle.params.p(), res.params.p(), &oracle.p_grid) <= 1.0);
}

#[test]
fn oracle_product_for_version_three() {
    let band = reference_band();
    let pair = DiffusionPair::from_ratio(100.0).unwrap();
    let oracle = brute_force_minmax(&band, &pair, Version::III, 256, 256).unwrap();
    let product = oracle.params.p() * oracle.params.q();
    let step = OracleResult::log_step(&oracle.p_grid) + OracleResult::log_step(oracle.q_grid.as_ref().unwrap());
    assert!((product / (2.0 * PI)).ln().abs() <= 2.0 * step, "{product}");
    let analytic = optimize_v3(&band, &pair).unwrap();
    assert!(analytic.rho_star <= oracle.rho_star + 1e-3);
}

fn arb_band() -> impl Strategy<Value = FrequencyBand> {
    (1.0f64..10.0, -4.0f64..-2.0).prop_map(|(t, e)| FrequencyBand::from_grid(t, t * 10f64.powf(e)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sufficient_condition_implies_contraction(
        nu1 in 1e-3f64..10.0,
        nu2 in 1e-3f64..10.0,
        a in 1e-2f64..1e2,
        b in 1e-2f64..1e2,
        band in arb_band(),
    ) {
        let pair = DiffusionPair::new(nu1, nu2).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let (s1, s2) = if nu1 < nu2 { (hi, lo) } else { (lo, hi) };
        prop_assert!(sufficient_condition_holds(s1, s2, &pair).unwrap());
        for wt in band.geometric_grid(100) {
            let r = rho_sigma(wt, s1, s2, &pair);
            prop_assert!(r > 0.0 && r < 1.0, "rho {r} at {wt}");
        }
    }

    #[test]
    fn interchange_identity(
        nu1 in 1e-3f64..10.0,
        nu2 in 1e-3f64..10.0,
        s1 in 1e-2f64..1e2,
        s2 in 1e-2f64..1e2,
        wt in 1e-2f64..1e2,
    ) {
        let pair = DiffusionPair::new(nu1, nu2).unwrap();
        let a = rho_sigma(wt, s1, s2, &pair);
        let b = rho_sigma(wt, s2, s1, &pair.swapped());
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1.0));
    }

    #[test]
    fn ordering_p_below_q_is_better(
        mu in 1.01f64..100.0,
        x in 1e-2f64..1e2,
        y in 1e-2f64..1e2,
        wt in 1e-2f64..1e2,
    ) {
        prop_assume!((x / y - 1.0).abs() > 1e-6);
        let (p, q) = (x.max(y), x.min(y));
        prop_assert!(scaled_rho(wt, q, p, mu) < scaled_rho(wt, p, q, mu));
    }

    #[test]
    fn version_one_slope_in_p(mu in 1.01f64..50.0, p in 0.1f64..50.0, wt in 0.1f64..20.0) {
        let w2 = wt * wt;
        let predicted = (p * p - 2.0 * mu * w2)
            * (p.powi(4) - 2.0 * p * p * (mu - 1.0).powi(2) * w2 + 4.0 * mu * mu * w2 * w2);
        let scale = p.powi(6).max(w2.powi(3));
        prop_assume!(predicted.abs() > 1e-3 * scale);
        let h = 1e-6 * p;
        // sigma1 = sigma2 means b = p / mu in the scaled form
        let slope = scaled_rho(wt, p + h, (p + h) / mu, mu) - scaled_rho(wt, p - h, (p - h) / mu, mu);
        prop_assert_eq!(slope.signum(), predicted.signum());
    }

    #[test]
    fn version_two_slope_in_frequency(mu in 1.01f64..50.0, q in 0.1f64..50.0, wt in 0.1f64..20.0) {
        let predicted = 2.0 * wt * wt - q * q;
        prop_assume!(predicted.abs() > 1e-3 * q * q);
        let h = 1e-6 * wt;
        let slope = scaled_rho(wt + h, q, q, mu) - scaled_rho(wt - h, q, q, mu);
        prop_assert_eq!(slope.signum(), predicted.signum());
    }

    #[test]
    fn optimized_parameters_satisfy_the_sufficient_condition(
        ratio in prop_oneof![1e-4f64..0.9, 1.1f64..1e4],
        band in arb_band(),
    ) {
        let pair = DiffusionPair::from_ratio(ratio).unwrap();
        for version in [Version::I, Version::II, Version::III] {
            let res = optimize(version, &band, &pair).unwrap();
            let (s1, s2) = (res.params.sigma1(), res.params.sigma2());
            prop_assert!(sufficient_condition_holds(s1, s2, &pair).unwrap(), "{version}: {s1} {s2}");
            prop_assert!(res.rho_star > 0.0 && res.rho_star < 1.0);
        }
    }

    #[test]
    fn version_three_product_and_order(ratio in 1.1f64..1e4, band in arb_band()) {
        let pair = DiffusionPair::from_ratio(ratio).unwrap();
        let res = optimize_v3(&band, &pair).unwrap();
        let (p, q) = (res.params.p(), res.params.q());
        let target = 2.0 * band.wt1() * band.wt2();
        prop_assert!((p * q - target).abs() <= 1e-12 * target);
        prop_assert!(p <= target.sqrt() && target.sqrt() <= q);
        let v2 = optimize_v2(&band, &pair).unwrap();
        prop_assert!(res.rho_star <= v2.rho_star + 1e-12);
    }

    #[test]
    fn version_two_matches_its_oracle(ratio in 1.1f64..1e4, band in arb_band()) {
        let pair = DiffusionPair::from_ratio(ratio).unwrap();
        let res = optimize_v2(&band, &pair).unwrap();
        let oracle = brute_force_minmax(&band, &pair, Version::II, 128, 64).unwrap();
        prop_assert!(res.rho_star <= oracle.rho_star + 1e-3);
        prop_assert!(cells(oracle.params.q(), res.params.q(), &oracle.p_grid) <= 1.0);
    }
}
