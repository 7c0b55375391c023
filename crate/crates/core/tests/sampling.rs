use mvlab::distributions::{moments, sample, solve_params_for_moments, Family, FamilyParams, MomentTarget};
use mvlab::seed;
use mvlab::simulation::correlation_study;
use mvlab::utility::{ExpansionPoint, UtilitySpec};

#[test]
fn solved_parameters_reproduce_their_targets() {
    let targets = [
        (Family::Normal, MomentTarget::symmetric(0.01, 0.08).unwrap()),
        (Family::Laplace, MomentTarget::symmetric(0.01, 0.08).unwrap()),
        (Family::SkewNormal, MomentTarget::new(0.01, 0.08, Some(0.6)).unwrap()),
        (Family::Gev, MomentTarget::new(0.01, 0.08, Some(1.2)).unwrap()),
    ];
    for (family, target) in targets {
        let params = solve_params_for_moments(family, target).unwrap();
        for s in 0..10 {
            let m = moments(&sample(&params, 1_000_000, seed::derive(42, &[s])).unwrap()).unwrap();
            let skew = target.skewness.unwrap_or(0.0);
            assert!((m.mean - target.mean).abs() < 0.002, "{family} seed {s}: mean {}", m.mean);
            assert!((m.std / target.std - 1.0).abs() < 0.01, "{family} seed {s}: std {}", m.std);
            assert!((m.skewness - skew).abs() < 0.05, "{family} seed {s}: skew {}", m.skewness);
        }
    }
}

#[test]
fn quadratic_approximation_tracks_log_utility_across_funds() {
    let funds: Vec<_> = (0..149)
        .map(|i| {
            let x = i as f64 / 148.0;
            let params = FamilyParams::Normal {
                mean: 0.005 + 0.015 * x,
                std: 0.04 + 0.08 * ((i * 37) % 149) as f64 / 148.0,
            };
            sample(&params, 20_000, seed::derive(7, &[i as u64])).unwrap()
        })
        .collect();
    let log = UtilitySpec::log(1.0).unwrap();
    let rho = correlation_study(&funds, &log, ExpansionPoint::AroundMean).unwrap();
    assert!(rho > 0.99, "correlation {rho}");
}
