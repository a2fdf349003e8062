//! Prior Monte Carlo estimates of the log-marginal likelihood.
//!
//! `log p(D | M, η) ≈ log (1/S) Σ_s p(D | θ_s, M)` with `θ_s` drawn from the
//! prior. The constants `log p(M)` and `log p(D)` are common to every cell
//! and are left out.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{log_mean_exp, RngStream};
use crate::error::{Error, Result};
use crate::model::{log_likelihood_unchecked, DirectionModel, HyperParams, PairDataset, ParamDraw, PriorSampler};
use crate::serde_float;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalEstimate {
    #[serde(with = "serde_float")]
    pub log_ml: f64,
    /// Delta-method standard error of `log_ml`. Infinite when it cannot be
    /// estimated (one sample, or every draw scored zero likelihood).
    #[serde(with = "serde_float")]
    pub mc_se: f64,
    pub samples: usize,
    pub stream: RngStream,
    pub model: DirectionModel,
    pub hyper: HyperParams,
    /// Largest single-draw log-likelihood; `log_ml` never exceeds it.
    #[serde(with = "serde_float")]
    pub max_log_lik: f64,
}

/// Per-draw log-likelihoods of `samples` prior draws on one stream.
///
/// Draw `s` only depends on the stream and `s`, so a longer run extends a
/// shorter one on the same stream.
pub fn prior_log_likelihoods(
    data: &PairDataset,
    model: DirectionModel,
    hyper: &HyperParams,
    samples: usize,
    stream: RngStream,
) -> Result<Vec<f64>> {
    hyper.validate()?;
    if samples == 0 {
        return Err(Error::invalid("need at least one Monte Carlo sample"));
    }
    let sampler = PriorSampler::new(hyper, model);
    let mut rng = stream.generator();
    let mut draw = ParamDraw::zeros(data.n());
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        sampler.fill(&mut draw, &mut rng);
        out.push(log_likelihood_unchecked(data, model, &draw, hyper.errors));
    }
    Ok(out)
}

pub fn log_marginal(
    data: &PairDataset,
    model: DirectionModel,
    hyper: &HyperParams,
    samples: usize,
    stream: RngStream,
) -> Result<MarginalEstimate> {
    let lls = prior_log_likelihoods(data, model, hyper, samples, stream)?;
    let (log_ml, mc_se) = summarize(&lls)?;
    let max_log_lik = lls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MarginalEstimate { log_ml, mc_se, samples, stream, model, hyper: *hyper, max_log_lik })
}

/// `(log-mean-exp, delta-method SE)` of per-draw log-likelihoods.
///
/// With weights `w_s = exp(l_s − max l)`, the SE is
/// `sd(w) / (√S · mean(w))`.
pub fn summarize(log_liks: &[f64]) -> Result<(f64, f64)> {
    let log_ml = log_mean_exp(log_liks)?;
    if log_ml == f64::NEG_INFINITY {
        return Ok((log_ml, f64::INFINITY));
    }
    let s = log_liks.len();
    if s < 2 {
        return Ok((log_ml, f64::INFINITY));
    }
    let max = log_liks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_liks.iter().map(|l| (l - max).exp()).collect();
    let mean = w.iter().sum::<f64>() / s as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s - 1) as f64;
    Ok((log_ml, var.sqrt() / ((s as f64).sqrt() * mean)))
}

/// How score-table cells get their random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamMode {
    /// Every (model, η) cell draws from its own stream.
    #[default]
    Independent,
    /// M1 and M2 share a stream at each η (common random numbers).
    Common,
}

/// Stream for the cell of `model` at grid index `eta`.
pub fn cell_stream(base_seed: u64, eta: usize, model: DirectionModel, mode: StreamMode) -> RngStream {
    let id = match mode {
        StreamMode::Independent => 2 * eta as u64 + model.index() as u64,
        StreamMode::Common => 2 * eta as u64,
    };
    RngStream::new(base_seed, id)
}

/// Log-marginal estimates for both models at every grid point, ordered
/// `[(η0, M1), (η0, M2), (η1, M1), ...]`.
pub fn score_table(
    data: &PairDataset,
    grid: &[HyperParams],
    samples: usize,
    base_seed: u64,
    mode: StreamMode,
) -> Result<Vec<MarginalEstimate>> {
    if grid.is_empty() {
        return Err(Error::invalid("hyperparameter grid is empty"));
    }
    (0..grid.len() * 2)
        .into_par_iter()
        .map(|cell| {
            let eta = cell / 2;
            let model = DirectionModel::BOTH[cell % 2];
            let stream = cell_stream(base_seed, eta, model, mode);
            log_marginal(data, model, &grid[eta], samples, stream).map_err(|e| Error::Cell {
                index: cell,
                hyper: grid[eta].to_string(),
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ErrorFamily, PriorFamily, TauCommon};

    fn data() -> PairDataset {
        PairDataset::unlabeled(vec![[0.1, 0.4], [1.2, 2.0], [-0.7, -0.9], [0.3, 0.2], [2.1, 3.3]]).unwrap()
    }

    fn hyper(tau: [f64; 2], sigma12: f64) -> HyperParams {
        HyperParams {
            tau_cmmn: TauCommon::uniform(10.0),
            tau_indvdl: tau,
            sigma12,
            prior: PriorFamily::default(),
            errors: ErrorFamily::Laplace,
        }
    }

    #[test]
    fn one_sample_equals_single_draw_likelihood() {
        let h = hyper([0.5, 0.5], 0.3);
        let s = RngStream::new(4, 4);
        let est = log_marginal(&data(), DirectionModel::M1, &h, 1, s).unwrap();
        let draw = crate::model::sample_prior(&h, DirectionModel::M1, 5, &mut s.generator()).unwrap();
        let ll = crate::model::log_likelihood(&data(), DirectionModel::M1, &draw, &h).unwrap();
        assert_eq!(est.log_ml, ll);
        assert_eq!(est.samples, 1);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(log_marginal(&data(), DirectionModel::M1, &hyper([0.0; 2], 0.0), 0, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn all_negative_infinity_gives_infinite_se() {
        let (l, se) = summarize(&[f64::NEG_INFINITY; 4]).unwrap();
        assert_eq!(l, f64::NEG_INFINITY);
        assert_eq!(se, f64::INFINITY);
    }

    #[test]
    fn se_of_constant_weights_is_zero() {
        let (l, se) = summarize(&[-3.0; 10]).unwrap();
        assert!((l + 3.0).abs() < 1e-12);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn estimate_bounded_by_best_draw() {
        let est =
            log_marginal(&data(), DirectionModel::M2, &hyper([0.2, 0.8], -0.5), 500, RngStream::new(8, 1)).unwrap();
        assert!(est.log_ml <= est.max_log_lik);
        assert!(est.mc_se.is_finite() && est.mc_se > 0.0);
    }

    #[test]
    fn sigma_is_inert_without_individual_effects() {
        let a = log_marginal(&data(), DirectionModel::M1, &hyper([0.0; 2], 0.0), 300, RngStream::new(1, 2)).unwrap();
        let b = log_marginal(&data(), DirectionModel::M1, &hyper([0.0; 2], 0.9), 300, RngStream::new(1, 2)).unwrap();
        assert_eq!(a.log_ml, b.log_ml);
        assert_eq!(a.mc_se, b.mc_se);
    }

    #[test]
    fn streams_nest() {
        let h = hyper([0.4, 0.4], 0.5);
        let short = prior_log_likelihoods(&data(), DirectionModel::M1, &h, 50, RngStream::new(3, 3)).unwrap();
        let long = prior_log_likelihoods(&data(), DirectionModel::M1, &h, 200, RngStream::new(3, 3)).unwrap();
        assert_eq!(short[..], long[..50]);
    }

    #[test]
    fn table_shape_and_determinism() {
        let grid = vec![hyper([0.0; 2], 0.0)];
        let t = score_table(&data(), &grid, 20, 5, StreamMode::Independent).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].model, DirectionModel::M1);
        assert_eq!(t[1].model, DirectionModel::M2);
        assert_ne!(t[0].stream, t[1].stream);
        assert_eq!(t, score_table(&data(), &grid, 20, 5, StreamMode::Independent).unwrap());
        assert!(score_table(&data(), &[], 20, 5, StreamMode::Independent).is_err());

        let crn = score_table(&data(), &grid, 20, 5, StreamMode::Common).unwrap();
        assert_eq!(crn[0].stream, crn[1].stream);
    }

    #[test]
    fn failing_cell_names_its_hyperparameters() {
        let mut bad = hyper([0.0; 2], 0.0);
        bad.sigma12 = 1.5;
        let err = score_table(&data(), &[hyper([0.0; 2], 0.0), bad], 5, 0, StreamMode::Independent).unwrap_err();
        match err {
            Error::Cell { index, hyper, .. } => {
                assert!(index >= 2);
                assert!(hyper.contains("sigma12=1.5"));
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
