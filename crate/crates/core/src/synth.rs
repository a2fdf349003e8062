//! Synthetic benchmark: a latent-variable LiNGAM generator with `Q`
//! confounders and a success-rate harness.
//!
//! ```text
//! x1 = μ1 + Σ_q λ1q f_q + e1
//! x2 = μ2 + b21 x1 + Σ_q λ2q f_q + e2
//! ```
//!
//! Errors and confounders are drawn from a catalog of 18 standardized
//! non-Gaussian sources in the style of the kernel-ICA benchmark set:
//!
//! | id | source |
//! |----|--------|
//! | 1  | Student t, 3 d.o.f. |
//! | 2  | double exponential (Laplace) |
//! | 3  | uniform |
//! | 4  | Student t, 5 d.o.f. |
//! | 5  | exponential |
//! | 6  | mixture of two double exponentials, locations ±1, scale 0.5 |
//! | 7  | symmetric 2-Gaussian mixture, multimodal: ±1.5, sd 0.4 |
//! | 8  | symmetric 2-Gaussian mixture, transitional: ±1.0, sd 0.9 |
//! | 9  | symmetric 2-Gaussian mixture, unimodal: ±0.6, sd 0.8 |
//! | 10 | asymmetric 2-Gaussian mixture, multimodal: w (0.3, 0.7), means (−1.4, 0.6), sd 0.4 |
//! | 11 | asymmetric 2-Gaussian mixture, transitional: w (0.3, 0.7), means (−1.4, 0.6), sd 0.9 |
//! | 12 | asymmetric 2-Gaussian mixture, unimodal: w (0.3, 0.7), means (−0.7, 0.3), sd (0.9, 0.5) |
//! | 13 | symmetric 4-Gaussian mixture, multimodal: means ±1, ±3, sd 0.4 |
//! | 14 | symmetric 4-Gaussian mixture, transitional: means ±1, ±3, sd 0.9 |
//! | 15 | symmetric 4-Gaussian mixture, unimodal: means ±1, ±3, sd 1.3 |
//! | 16 | asymmetric 4-Gaussian mixture, multimodal: w (0.1, 0.2, 0.3, 0.4), means −3, −1, 1, 3, sd 0.4 |
//! | 17 | asymmetric 4-Gaussian mixture, transitional: same weights and means, sd 0.9 |
//! | 18 | asymmetric 4-Gaussian mixture, unimodal: same weights and means, sd 1.3 |
//!
//! Every source is shifted and scaled by its analytic mean and standard
//! deviation, so draws have zero mean and unit variance.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{laplace_draw, sample_chi_squared, splitmix64, std_normal, RngStream};
use crate::error::{Error, Result};
use crate::model::{DirectionModel, PairDataset};
use crate::search::{estimate_direction, GridSpec};
use crate::serde_float;

#[derive(Debug, Clone, Copy)]
enum Shape {
    StudentT(u32),
    Laplace,
    Uniform,
    Exponential,
    LaplaceMix { locs: &'static [f64], scale: f64 },
    GaussMix { weights: &'static [f64], means: &'static [f64], sds: &'static [f64] },
}

const HALF2: &[f64] = &[0.5, 0.5];
const W2: &[f64] = &[0.3, 0.7];
const QUARTER4: &[f64] = &[0.25, 0.25, 0.25, 0.25];
const W4: &[f64] = &[0.1, 0.2, 0.3, 0.4];
const M4: &[f64] = &[-3.0, -1.0, 1.0, 3.0];

const CATALOG: [(&str, Shape); 18] = [
    ("t3", Shape::StudentT(3)),
    ("double exponential", Shape::Laplace),
    ("uniform", Shape::Uniform),
    ("t5", Shape::StudentT(5)),
    ("exponential", Shape::Exponential),
    ("double exponential mixture", Shape::LaplaceMix { locs: &[-1.0, 1.0], scale: 0.5 }),
    ("sym 2-gauss multimodal", Shape::GaussMix { weights: HALF2, means: &[-1.5, 1.5], sds: &[0.4, 0.4] }),
    ("sym 2-gauss transitional", Shape::GaussMix { weights: HALF2, means: &[-1.0, 1.0], sds: &[0.9, 0.9] }),
    ("sym 2-gauss unimodal", Shape::GaussMix { weights: HALF2, means: &[-0.6, 0.6], sds: &[0.8, 0.8] }),
    ("asym 2-gauss multimodal", Shape::GaussMix { weights: W2, means: &[-1.4, 0.6], sds: &[0.4, 0.4] }),
    ("asym 2-gauss transitional", Shape::GaussMix { weights: W2, means: &[-1.4, 0.6], sds: &[0.9, 0.9] }),
    ("asym 2-gauss unimodal", Shape::GaussMix { weights: W2, means: &[-0.7, 0.3], sds: &[0.9, 0.5] }),
    ("sym 4-gauss multimodal", Shape::GaussMix { weights: QUARTER4, means: M4, sds: &[0.4; 4] }),
    ("sym 4-gauss transitional", Shape::GaussMix { weights: QUARTER4, means: M4, sds: &[0.9; 4] }),
    ("sym 4-gauss unimodal", Shape::GaussMix { weights: QUARTER4, means: M4, sds: &[1.3; 4] }),
    ("asym 4-gauss multimodal", Shape::GaussMix { weights: W4, means: M4, sds: &[0.4; 4] }),
    ("asym 4-gauss transitional", Shape::GaussMix { weights: W4, means: M4, sds: &[0.9; 4] }),
    ("asym 4-gauss unimodal", Shape::GaussMix { weights: W4, means: M4, sds: &[1.3; 4] }),
];

pub const CATALOG_SIZE: u8 = 18;

impl Shape {
    /// Analytic (mean, variance).
    fn moments(&self) -> (f64, f64) {
        match *self {
            Shape::StudentT(nu) => (0.0, f64::from(nu) / (f64::from(nu) - 2.0)),
            Shape::Laplace => (0.0, 2.0),
            Shape::Uniform => (0.5, 1.0 / 12.0),
            Shape::Exponential => (1.0, 1.0),
            Shape::LaplaceMix { locs, scale } => {
                let w = 1.0 / locs.len() as f64;
                let m: f64 = locs.iter().map(|l| w * l).sum();
                let m2: f64 = locs.iter().map(|l| w * (2.0 * scale * scale + l * l)).sum();
                (m, m2 - m * m)
            }
            Shape::GaussMix { weights, means, sds } => {
                let m: f64 = weights.iter().zip(means).map(|(w, mu)| w * mu).sum();
                let m2: f64 = weights.iter().zip(means).zip(sds).map(|((w, mu), s)| w * (s * s + mu * mu)).sum();
                (m, m2 - m * m)
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Shape::StudentT(nu) => std_normal(rng) / (sample_chi_squared(nu, rng) / f64::from(nu)).sqrt(),
            Shape::Laplace => laplace_draw(rng, 0.0, 1.0),
            Shape::Uniform => rng.random::<f64>(),
            Shape::Exponential => -(1.0 - rng.random::<f64>()).ln(),
            Shape::LaplaceMix { locs, scale } => {
                let k = rng.random_range(0..locs.len());
                laplace_draw(rng, locs[k], scale)
            }
            Shape::GaussMix { weights, means, sds } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut k = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        k = i;
                        break;
                    }
                }
                means[k] + sds[k] * std_normal(rng)
            }
        }
    }
}

/// One entry of the 18-source catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceDist {
    id: u8,
}

impl SourceDist {
    pub fn new(id: u8) -> Result<Self> {
        if !(1..=CATALOG_SIZE).contains(&id) {
            return Err(Error::invalid(format!("unknown source id {id}; the catalog has ids 1..=18")));
        }
        Ok(Self { id })
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn name(&self) -> &'static str {
        CATALOG[usize::from(self.id - 1)].0
    }

    pub fn all() -> impl Iterator<Item = SourceDist> {
        (1..=CATALOG_SIZE).map(|id| SourceDist { id })
    }

    #[inline]
    fn draw_standardized<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let shape = &CATALOG[usize::from(self.id - 1)].1;
        let (m, v) = shape.moments();
        (shape.draw(rng) - m) / v.sqrt()
    }
}

/// Standardized i.i.d. draws from catalog entry `id`.
pub fn sample_source<R: Rng + ?Sized>(id: u8, rng: &mut R, count: usize) -> Result<Vec<f64>> {
    let dist = SourceDist::new(id)?;
    Ok((0..count).map(|_| dist.draw_standardized(rng)).collect())
}

/// Where a generated error or confounder comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Catalog(SourceDist),
    Gaussian,
}

impl Source {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Source::Catalog(d) => d.draw_standardized(rng),
            Source::Gaussian => std_normal(rng),
        }
    }
}

/// Which distributions errors and confounders are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourcePolicy {
    /// Uniformly at random from the 18-source catalog.
    #[default]
    Catalog,
    /// Always the double exponential entry.
    Laplace,
    /// Standard Gaussian (outside the catalog; for Gaussianity checks).
    Gaussian,
}

impl SourcePolicy {
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> Source {
        match self {
            SourcePolicy::Catalog => Source::Catalog(SourceDist { id: rng.random_range(1..=CATALOG_SIZE) }),
            SourcePolicy::Laplace => Source::Catalog(SourceDist { id: 2 }),
            SourcePolicy::Gaussian => Source::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    /// Number of latent confounders.
    pub q: usize,
    /// Coefficient magnitudes are uniform on `(coef_low, coef_high)`.
    pub coef_low: f64,
    pub coef_high: f64,
    /// Error variances are uniform on `(err_var_low, err_var_high)`.
    pub err_var_low: f64,
    pub err_var_high: f64,
    pub sources: SourcePolicy,
    /// Use this `b21` instead of a random one.
    pub fixed_b21: Option<f64>,
    /// Use these error variances instead of random ones.
    pub fixed_err_var: Option<[f64; 2]>,
    /// Record confounder and error draws in the truth.
    pub keep_latents: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 100,
            q: 0,
            coef_low: 0.5,
            coef_high: 1.5,
            err_var_low: 0.25,
            err_var_high: 2.25,
            sources: SourcePolicy::Catalog,
            fixed_b21: None,
            fixed_err_var: None,
            keep_latents: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::invalid("generator needs n >= 3"));
        }
        if !(0.0 < self.coef_low && self.coef_low < self.coef_high && self.coef_high.is_finite()) {
            return Err(Error::invalid("need 0 < coef_low < coef_high"));
        }
        if !(0.0 < self.err_var_low && self.err_var_low < self.err_var_high && self.err_var_high.is_finite()) {
            return Err(Error::invalid("need 0 < err_var_low < err_var_high"));
        }
        if let Some(v) = self.fixed_err_var {
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::invalid("fixed error variances must be positive"));
            }
        }
        if self.fixed_b21.is_some_and(|b| !b.is_finite()) {
            return Err(Error::invalid("fixed b21 must be finite"));
        }
        Ok(())
    }
}

/// Confounder and error realizations, in generation (unpermuted) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Latents {
    /// `f[q][i]`.
    pub f: Vec<Vec<f64>>,
    /// Scaled errors `(e1, e2)` per observation.
    pub e: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenTruth {
    /// Direction in the presented column order.
    pub true_direction: DirectionModel,
    /// Columns were presented as `(x2, x1)`.
    pub swapped: bool,
    pub mu: [f64; 2],
    pub b21: f64,
    /// `(λ1q, λ2q)` per confounder.
    pub lambda: Vec<[f64; 2]>,
    pub err_var: [f64; 2],
    pub error_sources: [Source; 2],
    pub confounder_sources: Vec<Source>,
    pub latents: Option<Latents>,
}

fn signed_uniform<R: Rng + ?Sized>(rng: &mut R, low: f64, high: f64) -> f64 {
    let mag = rng.random_range(low..high);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Generate one pair with known direction.
pub fn gen_pair(config: &GenConfig, stream: RngStream) -> Result<(PairDataset, GenTruth)> {
    config.validate()?;
    let rng = &mut stream.generator();
    let n = config.n;

    let mu = [std_normal(rng), std_normal(rng)];
    let b21 = match config.fixed_b21 {
        Some(b) => b,
        None => signed_uniform(rng, config.coef_low, config.coef_high),
    };
    let lambda: Vec<[f64; 2]> = (0..config.q)
        .map(|_| {
            [
                signed_uniform(rng, config.coef_low, config.coef_high),
                signed_uniform(rng, config.coef_low, config.coef_high),
            ]
        })
        .collect();
    let err_var = match config.fixed_err_var {
        Some(v) => v,
        None => [
            rng.random_range(config.err_var_low..config.err_var_high),
            rng.random_range(config.err_var_low..config.err_var_high),
        ],
    };
    let error_sources = [config.sources.pick(rng), config.sources.pick(rng)];
    let confounder_sources: Vec<Source> = (0..config.q).map(|_| config.sources.pick(rng)).collect();
    let swapped = rng.random::<bool>();

    let f: Vec<Vec<f64>> = confounder_sources.iter().map(|s| (0..n).map(|_| s.draw(rng)).collect()).collect();
    let sd = [err_var[0].sqrt(), err_var[1].sqrt()];
    let e: Vec<[f64; 2]> =
        (0..n).map(|_| [sd[0] * error_sources[0].draw(rng), sd[1] * error_sources[1].draw(rng)]).collect();

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut conf = [0.0, 0.0];
        for (lam, fq) in lambda.iter().zip(&f) {
            conf[0] += lam[0] * fq[i];
            conf[1] += lam[1] * fq[i];
        }
        let x1 = mu[0] + conf[0] + e[i][0];
        let x2 = mu[1] + b21 * x1 + conf[1] + e[i][1];
        rows.push(if swapped { [x2, x1] } else { [x1, x2] });
    }
    let labels = if swapped { ["x2", "x1"] } else { ["x1", "x2"] }.map(String::from);
    let data = PairDataset::new(rows, labels)?;
    let truth = GenTruth {
        true_direction: if swapped { DirectionModel::M2 } else { DirectionModel::M1 },
        swapped,
        mu,
        b21,
        lambda,
        err_var,
        error_sources,
        confounder_sources,
        latents: config.keep_latents.then_some(Latents { f, e }),
    };
    Ok((data, truth))
}

/// Binomial standard error of a success percentage:
/// `100 √(p̂(1−p̂)/trials)`.
pub fn binomial_se_pct(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    100.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub labels: [String; 2],
    pub truth: DirectionModel,
    pub estimated: DirectionModel,
    pub decided: bool,
    /// Decided and equal to the truth.
    pub correct: bool,
    #[serde(with = "serde_float")]
    pub best_log_ml: f64,
    #[serde(with = "serde_float")]
    pub runner_up_log_ml: f64,
    pub best_tau_fracs: Option<[f64; 2]>,
    pub best_sigma12: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub trials: usize,
    pub successes: usize,
    pub success_pct: f64,
    pub se_pct: f64,
    pub records: Vec<TrialRecord>,
}

impl SuccessReport {
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let trials = records.len();
        let successes = records.iter().filter(|r| r.correct).count();
        Self {
            trials,
            successes,
            success_pct: if trials == 0 { f64::NAN } else { 100.0 * successes as f64 / trials as f64 },
            se_pct: binomial_se_pct(successes, trials),
            records,
        }
    }

    pub fn correct_flags(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.correct).collect()
    }
}

/// Generator stream and estimation seed for trial `t`. The generator
/// stream does not depend on the grid, so different grids see the same
/// datasets.
pub fn trial_streams(base_seed: u64, trial: usize) -> (RngStream, u64) {
    let root = RngStream::new(base_seed, trial as u64).derive(0);
    (root, splitmix64(root.seed ^ 0xA076_1D64_78BD_642F))
}

/// Generate a dataset for trial `trial`, exactly as [`run_experiment`] does.
pub fn trial_dataset(config: &GenConfig, base_seed: u64, trial: usize) -> Result<(PairDataset, GenTruth)> {
    gen_pair(config, trial_streams(base_seed, trial).0)
}

pub fn run_trial(config: &GenConfig, spec: &GridSpec, base_seed: u64, trial: usize) -> Result<TrialRecord> {
    let (gen_stream, est_seed) = trial_streams(base_seed, trial);
    let (data, truth) = gen_pair(config, gen_stream)?;
    let est = estimate_direction(&data, spec, est_seed)?;
    Ok(TrialRecord {
        trial,
        labels: data.labels().clone(),
        truth: truth.true_direction,
        estimated: est.winner,
        decided: est.decided,
        correct: est.decided && est.winner == truth.true_direction,
        best_log_ml: est.best_log_ml,
        runner_up_log_ml: est.runner_up_log_ml,
        best_tau_fracs: est.best_tau_fracs,
        best_sigma12: est.best_hyper.sigma12,
    })
}

/// Repeated generate-and-estimate trials.
pub fn run_experiment(trials: usize, config: &GenConfig, spec: &GridSpec, base_seed: u64) -> Result<SuccessReport> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    config.validate()?;
    spec.validate()?;
    let records =
        (0..trials).into_par_iter().map(|t| run_trial(config, spec, base_seed, t)).collect::<Result<Vec<_>>>()?;
    Ok(SuccessReport::from_records(records))
}

/// Exact sign test on paired success indicators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    /// Trials only the first method got right.
    pub first_only: usize,
    /// Trials only the second method got right.
    pub second_only: usize,
    /// One-sided `P(X >= first_only)` for `X ~ Bin(first_only + second_only, 1/2)`.
    pub p_value: f64,
}

pub fn paired_sign_test(first: &[bool], second: &[bool]) -> Result<SignTest> {
    if first.len() != second.len() {
        return Err(Error::invalid("paired sign test needs equal-length inputs"));
    }
    let first_only = first.iter().zip(second).filter(|(a, b)| **a && !**b).count();
    let second_only = first.iter().zip(second).filter(|(a, b)| !**a && **b).count();
    let m = first_only + second_only;
    let mut p = 0.0;
    for k in first_only..=m {
        p += binomial_coef(m, k) * 0.5f64.powi(m as i32);
    }
    Ok(SignTest { first_only, second_only, p_value: p.min(1.0) })
}

fn binomial_coef(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
