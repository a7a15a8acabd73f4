use dyadfit::estimation::FitOptions;
use dyadfit::model::*;
use dyadfit::simulation::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reps(p: usize, estimates: Vec<Vec<f64>>, ses: Vec<Vec<f64>>, active: Vec<Vec<usize>>) -> ReplicationSet {
    let items = estimates
        .into_iter()
        .zip(ses)
        .zip(active)
        .enumerate()
        .map(|(i, ((estimate, se), active_set))| {
            (
                i as u64,
                Replication {
                    estimate,
                    se,
                    active_set,
                },
            )
        })
        .collect();
    ReplicationSet::from_replications(p, FitKind::RmlePath, items)
}

#[test]
fn features_follow_their_laws() {
    let spec = GeneratorSpec {
        n: 10_000,
        ..GeneratorSpec::benchmark(10_000, 0)
    };
    let f = generate_features(&spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    for k in 0..2 {
        let mean = f.group(k).values().iter().sum::<f64>() / 10_000.0;
        assert!(mean.abs() < 0.05, "group {k}: mean {mean}");
    }
    for k in 2..4 {
        assert!(f.group(k).values().iter().all(|&v| v == 0.0 || v == 1.0));
    }
    let again = generate_features(&spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(f, again);
}

#[test]
fn dominant_density_fills_every_dyad() {
    let spec = GeneratorSpec::benchmark(30, 0);
    let f = generate_features(&spec, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let d = build_dyad_design(&f).unwrap();
    let mut theta = vec![0.0; 14];
    theta[1] = 20.0;
    let theta = ParamVector::from_vec(theta).unwrap();
    for row in d.rows() {
        assert!(dyad_probabilities(row, &theta).unwrap()[0] > 1.0 - 1e-8);
    }
    let y = sample_network(&theta, &d, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert!(y.iter().all(|&c| c == Category::Mutual));
}

#[test]
fn single_dyad_frequencies_match_probabilities() {
    let draws = 100_000;
    for theta in [vec![0.0; 5], vec![0.7, -0.4, 1.1, 0.5, -0.9]] {
        let d = DyadDesign::from_parts(
            2,
            1,
            vec![(0, 1); draws],
            vec![0.6; draws],
            vec![0.9; draws],
            vec![-0.2; draws],
        )
        .unwrap();
        let theta = ParamVector::from_vec(theta).unwrap();
        let p = dyad_probabilities(d.row(0), &theta).unwrap();
        let y = sample_network(&theta, &d, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let mut counts = [0usize; 4];
        for &c in y.iter() {
            counts[Category::ALL.iter().position(|&a| a == c).unwrap()] += 1;
        }
        for c in 0..4 {
            let freq = counts[c] as f64 / draws as f64;
            let bound = 4.0 * (p[c] * (1.0 - p[c]) / draws as f64).sqrt();
            assert!((freq - p[c]).abs() < bound.min(0.006), "{c}: {freq} vs {}", p[c]);
        }
    }
}

#[test]
fn inverse_cdf_boundaries() {
    let p = [0.1, 0.2, 0.3, 0.4];
    assert_eq!(draw_category(&p, 0.0), Category::Mutual);
    assert_eq!(draw_category(&p, 0.1), Category::Forward);
    assert_eq!(draw_category(&p, 0.299), Category::Forward);
    assert_eq!(draw_category(&p, 0.31), Category::Backward);
    assert_eq!(draw_category(&p, 0.999_999), Category::Null);
}

#[test]
fn sampling_is_reproducible() {
    let spec = GeneratorSpec::benchmark(25, 4);
    let f = generate_features(&spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let d = build_dyad_design(&f).unwrap();
    let theta = spec.theta().unwrap();
    let a = sample_network(&theta, &d, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let b = sample_network(&theta, &d, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn replications_are_deterministic_and_mle_keeps_every_coordinate() {
    let spec = GeneratorSpec::benchmark(30, 11);
    let opts = FitOptions::default();
    let a = run_replications(&spec, 2, FitKind::Mle, &opts).unwrap();
    let b = run_replications(&spec, 2, FitKind::Mle, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seeds, vec![derive_seed(11, 0), derive_seed(11, 1)]);
    for set in &a.active_sets {
        assert_eq!(set, &(0..14).collect::<Vec<_>>());
    }
    let c = run_replications(&spec, 2, FitKind::RmlePath, &opts).unwrap();
    assert_eq!(c, run_replications(&spec, 2, FitKind::RmlePath, &opts).unwrap());
}

#[test]
fn replication_count_must_be_positive() {
    let spec = GeneratorSpec::benchmark(10, 0);
    assert!(run_replications(&spec, 0, FitKind::Mle, &FitOptions::default()).is_err());
}

#[test]
fn estimation_metric_examples() {
    let set = reps(1, vec![vec![1.0], vec![1.2]], vec![vec![0.1], vec![0.1]], vec![vec![0], vec![0]]);
    let m = estimation_metrics(&set, &[1.0], &["t".into()]).unwrap();
    assert!((m[0].bias - 0.1).abs() < 1e-12);
    assert!((m[0].sd - 0.1).abs() < 1e-12);
    assert!((m[0].rmse - 0.141421).abs() < 1e-6);
    assert!((m[0].ase - 0.1).abs() < 1e-12);
    assert_eq!(m[0].cp, 0.5);

    let set = reps(1, vec![vec![2.0]; 3], vec![vec![0.3]; 3], vec![vec![0]; 3]);
    let m = estimation_metrics(&set, &[2.0], &["t".into()]).unwrap();
    assert_eq!((m[0].bias, m[0].sd, m[0].rmse, m[0].cp), (0.0, 0.0, 0.0, 1.0));
}

#[test]
fn selection_metric_examples() {
    let set = reps(
        4,
        vec![vec![0.0; 4]; 2],
        vec![vec![0.0; 4]; 2],
        vec![vec![0, 1], vec![0, 1, 2]],
    );
    let s = selection_metrics(&set, &[0, 1]).unwrap();
    assert_eq!((s.cf, s.tpr, s.fpr, s.ms), (0.5, 1.0, 0.25, 2.5));

    let set = reps(4, vec![vec![0.0; 4]; 3], vec![vec![0.0; 4]; 3], vec![vec![0, 1]; 3]);
    let s = selection_metrics(&set, &[0, 1]).unwrap();
    assert_eq!((s.cf, s.tpr, s.fpr, s.ms), (1.0, 1.0, 0.0, 2.0));
    assert!(selection_metrics(&set, &[0, 1, 2, 3]).is_err());
}

#[test]
fn metric_identities_on_a_small_study() {
    let spec = GeneratorSpec::benchmark(40, 21);
    let set = run_replications(&spec, 8, FitKind::RmlePath, &FitOptions::default()).unwrap();
    let labels: Vec<String> = (1..=14).map(|k| format!("theta{k}")).collect();
    let report = MetricsReport::new(40, &set, &spec.theta_true, &labels).unwrap();
    for c in &report.coordinates {
        assert!((c.rmse * c.rmse - c.bias * c.bias - c.sd * c.sd).abs() < 1e-10);
        assert!((0.0..=1.0).contains(&c.cp));
    }
    let s = report.selection.unwrap();
    assert!((s.ms - (5.0 * s.tpr + 9.0 * s.fpr)).abs() < 1e-10);
    for v in [s.cf, s.tpr, s.fpr] {
        assert!((0.0..=1.0).contains(&v));
    }
    assert_eq!(report.true_active, vec![1, 2, 3, 7, 11]);
    assert_eq!(report.replications, 8);
}
