use mixed_lingam::dist::RngStream;
use mixed_lingam::model::{log_likelihood, sample_prior, PairDataset, ParamDraw};
use mixed_lingam::{DirectionModel, ErrorFamily, HyperParams, PriorFamily, TauCommon};
use proptest::prelude::*;

fn hyper(errors: ErrorFamily) -> HyperParams {
    HyperParams {
        tau_cmmn: TauCommon::uniform(1.0),
        tau_indvdl: [0.0, 0.0],
        sigma12: 0.0,
        prior: PriorFamily::default(),
        errors,
    }
}

fn instance() -> impl Strategy<Value = (Vec<[f64; 2]>, ParamDraw)> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::array::uniform2(-50.0..50.0f64), n),
            prop::collection::vec(prop::array::uniform2(-5.0..5.0f64), n),
            prop::array::uniform5(-10.0..10.0f64),
        )
            .prop_map(|(rows, mt, p)| {
                let draw = ParamDraw {
                    mu1: p[0],
                    mu2: p[1],
                    b: p[2],
                    h1: if p[3].abs() < 0.01 { 0.5 } else { p[3] },
                    h2: if p[4].abs() < 0.01 { -0.5 } else { p[4] },
                    mu_tilde: mt,
                };
                (rows, draw)
            })
    })
}

fn errors() -> impl Strategy<Value = ErrorFamily> {
    prop_oneof![Just(ErrorFamily::Laplace), Just(ErrorFamily::Gaussian)]
}

proptest! {
    #[test]
    fn swap_identity((rows, draw) in instance(), errors in errors()) {
        let d = PairDataset::from_rows(rows, ["a".into(), "b".into()]).unwrap();
        let h = hyper(errors);
        for m in DirectionModel::BOTH {
            let l = log_likelihood(&d, m, &draw, &h).unwrap();
            let ls = log_likelihood(&d.swapped(), m.other(), &draw.swapped(), &h).unwrap();
            prop_assert!((l - ls).abs() <= 1e-12 * l.abs().max(1.0), "{} vs {}", l, ls);
        }
    }

    #[test]
    fn sign_of_h_is_ignored((rows, draw) in instance(), errors in errors()) {
        let d = PairDataset::from_rows(rows, ["a".into(), "b".into()]).unwrap();
        let h = hyper(errors);
        let mut neg = draw.clone();
        neg.h1 = -neg.h1;
        let l = log_likelihood(&d, DirectionModel::M1, &draw, &h).unwrap();
        prop_assert_eq!(l, log_likelihood(&d, DirectionModel::M1, &neg, &h).unwrap());
        neg.h2 = -neg.h2;
        prop_assert_eq!(l, log_likelihood(&d, DirectionModel::M1, &neg, &h).unwrap());
    }

    #[test]
    fn additive_over_row_partitions((rows, draw) in instance(), cut in 0usize..12, errors in errors()) {
        let n = rows.len();
        prop_assume!(n >= 2);
        let k = 1 + cut % (n - 1);
        let h = hyper(errors);
        let lab = || ["a".to_string(), "b".to_string()];
        let whole = PairDataset::from_rows(rows.clone(), lab()).unwrap();
        let left = PairDataset::from_rows(rows[..k].to_vec(), lab()).unwrap();
        let right = PairDataset::from_rows(rows[k..].to_vec(), lab()).unwrap();
        let split = |lo: usize, hi: usize| ParamDraw { mu_tilde: draw.mu_tilde[lo..hi].to_vec(), ..draw.clone() };
        for m in DirectionModel::BOTH {
            let l = log_likelihood(&whole, m, &draw, &h).unwrap();
            let parts = log_likelihood(&left, m, &split(0, k), &h).unwrap()
                + log_likelihood(&right, m, &split(k, n), &h).unwrap();
            prop_assert!((l - parts).abs() <= 1e-9 * l.abs().max(1.0));
        }
    }
}

fn indvdl(tau: [f64; 2], sigma12: f64, prior: PriorFamily) -> HyperParams {
    HyperParams { tau_indvdl: tau, sigma12, prior, ..hyper(ErrorFamily::Laplace) }
}

fn column_moments(draw: &ParamDraw) -> ([f64; 2], f64) {
    let n = draw.mu_tilde.len() as f64;
    let mean = [0, 1].map(|k| draw.mu_tilde.iter().map(|r| r[k]).sum::<f64>() / n);
    let var = [0, 1].map(|k| draw.mu_tilde.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / (n - 1.0));
    let cov = draw.mu_tilde.iter().map(|r| (r[0] - mean[0]) * (r[1] - mean[1])).sum::<f64>() / (n - 1.0);
    (var, cov / (var[0] * var[1]).sqrt())
}

#[test]
fn t_prior_individual_effect_variance() {
    let h = indvdl([4.0, 1.0], 0.0, PriorFamily::StudentT { nu: 6 });
    let d = sample_prior(&h, DirectionModel::M1, 100_000, &mut RngStream::new(61, 0).generator()).unwrap();
    let (var, _) = column_moments(&d);
    assert!((var[0] - 4.0).abs() < 0.15, "var {}", var[0]);
}

#[test]
fn gaussian_prior_individual_effect_correlation() {
    let h = indvdl([1.0, 1.0], 0.9, PriorFamily::Gaussian);
    let d = sample_prior(&h, DirectionModel::M2, 100_000, &mut RngStream::new(62, 0).generator()).unwrap();
    let (_, corr) = column_moments(&d);
    assert!((corr - 0.9).abs() < 0.01, "corr {corr}");
}

#[test]
fn zero_tau_zeroes_only_its_column() {
    for prior in [PriorFamily::StudentT { nu: 6 }, PriorFamily::Gaussian] {
        let h = indvdl([0.0, 2.0], 0.7, prior);
        let d = sample_prior(&h, DirectionModel::M1, 1000, &mut RngStream::new(63, 0).generator()).unwrap();
        assert!(d.mu_tilde.iter().all(|r| r[0] == 0.0));
        assert!(d.mu_tilde.iter().any(|r| r[1] != 0.0));
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn other_column_marginal_ignores_sigma() {
    let n = 100_000;
    // α = 0.01 critical value for two equal samples
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    for prior in [PriorFamily::StudentT { nu: 6 }, PriorFamily::Gaussian] {
        let col = |sigma12: f64, stream: u64| {
            let h = indvdl([0.0, 3.0], sigma12, prior);
            let d = sample_prior(&h, DirectionModel::M1, n, &mut RngStream::new(64, stream).generator()).unwrap();
            d.mu_tilde.iter().map(|r| r[1]).collect::<Vec<_>>()
        };
        let ks = ks_distance(col(0.0, 1), col(0.9, 2));
        assert!(ks < critical, "ks {ks} >= {critical}");
    }
}

#[test]
fn swapped_dataset_round_trips() {
    let d = PairDataset::new(vec![[1.0, 2.0], [3.0, 5.0], [4.0, 4.0]], ["p".into(), "q".into()]).unwrap();
    let s = d.swapped();
    assert_eq!(s.labels(), &["q".to_string(), "p".to_string()]);
    assert_eq!(s.rows()[1], [5.0, 3.0]);
    assert_eq!(s.swapped(), d);
}
