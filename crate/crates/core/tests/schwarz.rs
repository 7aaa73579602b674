use oswr_core::frequency::{sufficient_condition_holds, DiffusionPair, FrequencyBand, TransmissionParams, Version};
use oswr_core::heat::{solve_monolithic, DiffusionField, Mesh1D, ProblemSpec};
use oswr_core::schwarz::{
    combined_error, decompose, interface_params, interface_params_for, oswr_iterate, run_oswr, InitMode, OswrOptions,
    SweepMode,
};
use oswr_core::Error;

fn two_layer(ratio: f64, dx: f64, dt: f64, t: f64) -> (ProblemSpec, oswr_core::Decomposition) {
    let nu = DiffusionField::layered(vec![1.0, 1.0 / ratio], vec![0.5]).unwrap();
    let problem = ProblemSpec::new(nu, t, dt).unwrap().with_constant_initial(20.0);
    let mesh = Mesh1D::with_spacing(0.0, 1.0, dx).unwrap();
    let d = decompose(&mesh, &[0.5]).unwrap();
    (problem, d)
}

fn iterations(problem: &ProblemSpec, d: &oswr_core::Decomposition, version: Version) -> usize {
    let params = interface_params(version, problem, d).unwrap();
    let (_, outcome) = run_oswr(problem, d, &params, &OswrOptions::default()).unwrap();
    outcome.history.iterations_to_tolerance().unwrap()
}

#[test]
fn version_three_ratio_ten() {
    let (problem, d) = two_layer(10.0, 1.0 / 40.0, 1.0 / 40.0, 5.0);
    let n = iterations(&problem, &d, Version::III);
    assert!((10..=16).contains(&n), "iterations {n}");
}

#[test]
fn exact_initialization_is_a_fixed_point() {
    let (problem, d) = two_layer(10.0, 1.0 / 40.0, 1.0 / 40.0, 5.0);
    let params = interface_params(Version::II, &problem, &d).unwrap();
    let options = OswrOptions {
        init: InitMode::Exact,
        max_iter: 1,
        ..OswrOptions::default()
    };
    let (_, outcome) = run_oswr(&problem, &d, &params, &options).unwrap();
    assert!(outcome.history.errors[0] <= 1e-10, "{:?}", outcome.history.errors);
}

#[test]
fn desk_scale_fixed_point_equivalence() {
    let nu = DiffusionField::layered(vec![1.0, 0.25], vec![0.5]).unwrap();
    let problem = ProblemSpec::new(nu, 1.0, 0.25).unwrap().with_constant_initial(20.0);
    let mesh = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
    let d = decompose(&mesh, &[0.5]).unwrap();
    let params = interface_params(Version::II, &problem, &d).unwrap();
    let options = OswrOptions {
        tolerance: 1e-12,
        max_iter: 50,
        ..OswrOptions::default()
    };
    let (mono, outcome) = run_oswr(&problem, &d, &params, &options).unwrap();
    assert!(outcome.history.iterations() <= 50);
    let combined = outcome.combined(&d);
    assert!(combined.max_abs_diff_from(&mono, 0) <= 1e-10);
}

#[test]
fn first_iterate_error_is_order_of_initial_data() {
    let (problem, d) = two_layer(10.0, 1.0 / 40.0, 1.0 / 40.0, 5.0);
    let params = interface_params(Version::III, &problem, &d).unwrap();
    let options = OswrOptions {
        max_iter: 1,
        ..OswrOptions::default()
    };
    let Err(Error::NotConverged { history }) = run_oswr(&problem, &d, &params, &options) else {
        panic!("one iteration cannot converge");
    };
    let e1 = history.errors[0];
    assert!((0.1..=100.0).contains(&e1), "e1 = {e1}");
}

#[test]
fn jacobi_converges_to_the_same_fixed_point() {
    let (problem, d) = two_layer(100.0, 1.0 / 20.0, 1.0 / 20.0, 2.0);
    let params = interface_params(Version::III, &problem, &d).unwrap();
    let gs = run_oswr(&problem, &d, &params, &OswrOptions::default()).unwrap().1;
    let jacobi_options = OswrOptions {
        sweep: SweepMode::Jacobi,
        ..OswrOptions::default()
    };
    let jacobi = run_oswr(&problem, &d, &params, &jacobi_options).unwrap().1;
    assert!(jacobi.history.converged);
    assert!(jacobi.history.iterations() >= gs.history.iterations());
}

#[test]
fn histories_are_deterministic() {
    let (problem, d) = two_layer(1000.0, 1.0 / 40.0, 1.0 / 40.0, 5.0);
    let params = interface_params(Version::I, &problem, &d).unwrap();
    let a = run_oswr(&problem, &d, &params, &OswrOptions::default()).unwrap().1;
    let b = run_oswr(&problem, &d, &params, &OswrOptions::default()).unwrap().1;
    assert_eq!(a.history, b.history);
}

#[test]
fn ordering_at_large_ratios() {
    for ratio in [100.0, 1000.0, 10000.0] {
        let (problem, d) = two_layer(ratio, 1.0 / 40.0, 1.0 / 40.0, 5.0);
        let n: Vec<usize> = Version::OPTIMIZED.iter().map(|&v| iterations(&problem, &d, v)).collect();
        assert!(n[2] <= n[1] && n[1] <= n[0], "ratio {ratio}: {n:?}");
    }
}

#[test]
fn tps_interface_parameters() {
    let band = FrequencyBand::from_grid(5.0, 1.0 / 40.0).unwrap();
    let pairs = [DiffusionPair::new(1.0, 1e-2).unwrap(), DiffusionPair::new(1e-2, 1e-3).unwrap()];
    for v in Version::OPTIMIZED {
        let params: Vec<TransmissionParams> = pairs.iter().map(|p| interface_params_for(v, &band, p).unwrap()).collect();
        assert_ne!(params[0], params[1]);
        for (p, pair) in params.iter().zip(&pairs) {
            assert!(sufficient_condition_holds(p.sigma1(), p.sigma2(), pair).unwrap(), "{v}: {p:?}");
        }
    }
    let equal = DiffusionPair::new(0.3, 0.3).unwrap();
    let v2 = interface_params_for(Version::II, &band, &equal).unwrap();
    let v3 = interface_params_for(Version::III, &band, &equal).unwrap();
    assert_eq!((v2.sigma1(), v2.sigma2()), (v3.sigma1(), v3.sigma2()));
}

#[test]
fn three_layer_fixed_point() {
    let nu = DiffusionField::layered(vec![1.0, 1e-2, 1e-3], vec![0.2, 0.4]).unwrap();
    let problem = ProblemSpec::new(nu, 1.0, 1.0 / 20.0)
        .unwrap()
        .with_constant_initial(20.0)
        .with_constant_boundary(0.0, 50.0);
    let mesh = Mesh1D::with_spacing(0.0, 1.0, 0.05).unwrap();
    let d = decompose(&mesh, &[0.2, 0.4]).unwrap();
    let params = interface_params(Version::III, &problem, &d).unwrap();
    let options = OswrOptions {
        tolerance: 1e-11,
        ..OswrOptions::default()
    };
    let (mono, outcome) = run_oswr(&problem, &d, &params, &options).unwrap();
    assert!(combined_error(&mono, &d, &outcome.fields) <= 1e-11);
    assert!(outcome.combined(&d).max_abs_diff_from(&mono, 0) <= 1e-11);
}

#[test]
fn mismatched_inputs_rejected() {
    let (problem, d) = two_layer(10.0, 0.25, 0.25, 1.0);
    let mono = solve_monolithic(&problem, d.global()).unwrap();
    assert!(oswr_iterate(&problem, &d, &[], &mono, &OswrOptions::default()).is_err());
    let params = interface_params(Version::II, &problem, &d).unwrap();
    let zero_iter = OswrOptions {
        max_iter: 0,
        ..OswrOptions::default()
    };
    assert!(oswr_iterate(&problem, &d, &params, &mono, &zero_iter).is_err());
}

#[test]
fn bad_parameters_can_diverge_or_stall() {
    // sigma far from optimal on a coarse grid: either reported as not
    // converged or converged, never a panic.
    let (problem, d) = two_layer(1000.0, 0.125, 0.125, 1.0);
    let pair = DiffusionPair::new(1.0, 1e-3).unwrap();
    let params = [TransmissionParams::custom(1e-6, 1e6, &pair).unwrap()];
    let options = OswrOptions {
        max_iter: 20,
        ..OswrOptions::default()
    };
    match run_oswr(&problem, &d, &params, &options) {
        Ok((_, out)) => assert!(out.history.converged),
        Err(Error::NotConverged { history }) | Err(Error::Diverged { history }) => {
            assert!(history.iterations() <= 20)
        }
        Err(other) => panic!("unexpected error {other}"),
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn desk_problem(nu1: f64, nu2: f64, steps: usize) -> (ProblemSpec, oswr_core::Decomposition) {
        let nu = DiffusionField::layered(vec![nu1, nu2], vec![0.5]).unwrap();
        let problem = ProblemSpec::new(nu, 1.0, 1.0 / steps as f64)
            .unwrap()
            .with_initial(|x| 20.0 * (1.0 + x));
        let mesh = Mesh1D::uniform(0.0, 1.0, 8).unwrap();
        let d = decompose(&mesh, &[0.5]).unwrap();
        (problem, d)
    }

    fn ordered_sigmas(nu1: f64, nu2: f64, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = (a.min(b), a.max(b));
        if nu1 < nu2 {
            (hi, lo)
        } else {
            (lo, hi)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn error_decreases_under_the_sufficient_condition(
            nu1 in 1e-3f64..10.0,
            nu2 in 1e-3f64..10.0,
            a in 1e-1f64..1e2,
            b in 1e-1f64..1e2,
        ) {
            let (problem, d) = desk_problem(nu1, nu2, 8);
            let pair = DiffusionPair::new(nu1, nu2).unwrap();
            let (s1, s2) = ordered_sigmas(nu1, nu2, a, b);
            prop_assert!(sufficient_condition_holds(s1, s2, &pair).unwrap());
            let params = [TransmissionParams::custom(s1, s2, &pair).unwrap()];
            let options = OswrOptions { tolerance: 1e-11, max_iter: 40, ..OswrOptions::default() };
            let history = match run_oswr(&problem, &d, &params, &options) {
                Ok((_, outcome)) => outcome.history,
                Err(Error::NotConverged { history }) => *history,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let e = &history.errors;
            for k in 1..e.len() {
                if e[k - 1] <= 1e-11 {
                    break;
                }
                prop_assert!(e[k] < e[k - 1], "iteration {}: {:?}", k + 1, e);
            }
        }

        #[test]
        fn converged_iterates_match_the_monolithic_solve(
            nu1 in 1e-2f64..10.0,
            nu2 in 1e-2f64..10.0,
            s1 in 1e-1f64..1e2,
            s2 in 1e-1f64..1e2,
            steps in 2usize..12,
        ) {
            let (problem, d) = desk_problem(nu1, nu2, steps);
            let pair = DiffusionPair::new(nu1, nu2).unwrap();
            let params = [TransmissionParams::custom(s1, s2, &pair).unwrap()];
            let options = OswrOptions { tolerance: 1e-12, max_iter: 400, ..OswrOptions::default() };
            if let Ok((mono, outcome)) = run_oswr(&problem, &d, &params, &options) {
                prop_assert!(outcome.combined(&d).max_abs_diff_from(&mono, 0) <= 1e-9);
            }
        }
    }
}
