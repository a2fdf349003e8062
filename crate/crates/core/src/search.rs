//! Empirical-Bayes search over hyperparameter grids and model selection.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginal::{score_table, MarginalEstimate, StreamMode};
use crate::model::{default_tau_cmmn, DirectionModel, ErrorFamily, HyperParams, PairDataset, PriorFamily};
use crate::serde_float;

pub const DEFAULT_TAU_FRACS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
pub const DEFAULT_SIGMA12: [f64; 9] = [0.0, -0.3, 0.3, -0.5, 0.5, -0.7, 0.7, -0.9, 0.9];
pub const DEFAULT_SAMPLES: usize = 1000;

/// Candidate η values. Each individual-effect variance is
/// `frac² × var̂(x_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub tau_fracs: Vec<f64>,
    pub sigma12_values: Vec<f64>,
    pub prior: PriorFamily,
    pub errors: ErrorFamily,
    /// Monte Carlo draws per cell.
    pub samples: usize,
    /// Keep only `σ12 = 0` when either individual-effect variance is zero.
    pub dedup: bool,
    pub streams: StreamMode,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            tau_fracs: DEFAULT_TAU_FRACS.to_vec(),
            sigma12_values: DEFAULT_SIGMA12.to_vec(),
            prior: PriorFamily::default(),
            errors: ErrorFamily::Laplace,
            samples: DEFAULT_SAMPLES,
            dedup: true,
            streams: StreamMode::Independent,
        }
    }
}

impl GridSpec {
    /// Reduced profile for quick runs; not the canonical settings.
    pub fn fast() -> Self {
        Self {
            tau_fracs: vec![0.0, 0.4, 0.8, 1.0],
            sigma12_values: vec![0.0, -0.5, 0.5, -0.9, 0.9],
            samples: 250,
            ..Self::default()
        }
    }

    /// Only the point without individual-specific effects.
    pub fn without_individual_effects() -> Self {
        Self { tau_fracs: vec![0.0], sigma12_values: vec![0.0], ..Self::default() }
    }

    pub fn is_canonical(&self) -> bool {
        let d = Self::default();
        self.tau_fracs == d.tau_fracs
            && self.sigma12_values == d.sigma12_values
            && self.samples == d.samples
            && self.dedup
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_fracs.is_empty() || self.sigma12_values.is_empty() {
            return Err(Error::invalid("grid spec lists must be non-empty"));
        }
        if self.tau_fracs.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
            return Err(Error::invalid("tau fractions must be non-negative and finite"));
        }
        if self.tau_fracs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("tau fractions must be strictly ascending"));
        }
        if self.tau_fracs[0] != 0.0 {
            return Err(Error::invalid("tau fractions must include 0"));
        }
        if self.sigma12_values.iter().any(|s| s.is_nan() || s.abs() >= 1.0) {
            return Err(Error::invalid("sigma12 values must lie in (-1, 1)"));
        }
        if !self.sigma12_values.contains(&0.0) {
            return Err(Error::invalid("sigma12 values must include 0"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples per cell must be >= 1"));
        }
        Ok(())
    }
}

/// A grid point together with the fractions that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub hyper: HyperParams,
    pub tau_fracs: [f64; 2],
}

pub fn grid_points(data: &PairDataset, spec: &GridSpec) -> Result<Vec<GridPoint>> {
    spec.validate()?;
    let tau_cmmn = default_tau_cmmn(data)?;
    let var = [data.sample_variance(0), data.sample_variance(1)];
    let mut out = Vec::new();
    for &f1 in &spec.tau_fracs {
        for &f2 in &spec.tau_fracs {
            for &sigma12 in &spec.sigma12_values {
                if spec.dedup && (f1 == 0.0 || f2 == 0.0) && sigma12 != 0.0 {
                    continue;
                }
                let hyper = HyperParams {
                    tau_cmmn,
                    tau_indvdl: [f1 * f1 * var[0], f2 * f2 * var[1]],
                    sigma12,
                    prior: spec.prior,
                    errors: spec.errors,
                };
                out.push(GridPoint { hyper, tau_fracs: [f1, f2] });
            }
        }
    }
    Ok(out)
}

pub fn grid_hyperparams(data: &PairDataset, spec: &GridSpec) -> Result<Vec<HyperParams>> {
    Ok(grid_points(data, spec)?.into_iter().map(|p| p.hyper).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionEstimate {
    pub winner: DirectionModel,
    /// False when the best M1 and best M2 cells tie exactly.
    pub decided: bool,
    pub best_hyper: HyperParams,
    /// Grid fractions of the winning cell, when it came from a grid.
    pub best_tau_fracs: Option<[f64; 2]>,
    #[serde(with = "serde_float")]
    pub best_log_ml: f64,
    #[serde(with = "serde_float")]
    pub best_mc_se: f64,
    /// Best log-marginal of the losing model.
    #[serde(with = "serde_float")]
    pub runner_up_log_ml: f64,
    /// Best log-marginal of M1 and of M2.
    pub best_per_model: [BestCell; 2],
    pub table: Vec<MarginalEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub index: usize,
    #[serde(with = "serde_float")]
    pub log_ml: f64,
}

/// Pick the model and η with the largest log-marginal likelihood.
///
/// Ties between cells are broken by lowest table index.
pub fn select_direction(table: Vec<MarginalEstimate>) -> Result<DirectionEstimate> {
    let mut best: [Option<BestCell>; 2] = [None, None];
    for (index, cell) in table.iter().enumerate() {
        if cell.log_ml.is_nan() {
            return Err(Error::Numerical(format!("cell {index} has a NaN log-marginal")));
        }
        let slot = &mut best[cell.model.index()];
        if slot.is_none_or(|b| cell.log_ml > b.log_ml) {
            *slot = Some(BestCell { index, log_ml: cell.log_ml });
        }
    }
    let (Some(b1), Some(b2)) = (best[0], best[1]) else {
        return Err(Error::invalid("score table must contain cells for both models"));
    };
    let decided = b1.log_ml != b2.log_ml;
    let top = if b2.log_ml > b1.log_ml || (!decided && b2.index < b1.index) { b2 } else { b1 };
    let winner = table[top.index].model;
    let runner_up = if winner == DirectionModel::M1 { b2 } else { b1 };
    Ok(DirectionEstimate {
        winner,
        decided,
        best_hyper: table[top.index].hyper,
        best_tau_fracs: None,
        best_log_ml: top.log_ml,
        best_mc_se: table[top.index].mc_se,
        runner_up_log_ml: runner_up.log_ml,
        best_per_model: [b1, b2],
        table,
    })
}

pub fn estimate_direction(data: &PairDataset, spec: &GridSpec, base_seed: u64) -> Result<DirectionEstimate> {
    let points = grid_points(data, spec)?;
    let grid: Vec<HyperParams> = points.iter().map(|p| p.hyper).collect();
    let table = score_table(data, &grid, spec.samples, base_seed, spec.streams)?;
    let mut est = select_direction(table)?;
    // cells are laid out two per grid point
    let top = est.best_per_model[est.winner.index()].index;
    est.best_tau_fracs = Some(points[top / 2].tau_fracs);
    Ok(est)
}

/// Comparison of the Laplace-error search with a Gaussian-error search on
/// the same data and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianityCheck {
    pub laplace_winner: DirectionModel,
    #[serde(with = "serde_float")]
    pub laplace_best_log_ml: f64,
    pub gaussian_winner: DirectionModel,
    #[serde(with = "serde_float")]
    pub gaussian_best_log_ml: f64,
    /// Gaussian errors fit better; the direction estimate is unreliable.
    pub gaussian_preferred: bool,
}

pub fn gaussianity_check(data: &PairDataset, spec: &GridSpec, base_seed: u64) -> Result<GaussianityCheck> {
    let laplace = estimate_direction(data, &GridSpec { errors: ErrorFamily::Laplace, ..spec.clone() }, base_seed)?;
    let gaussian = estimate_direction(data, &GridSpec { errors: ErrorFamily::Gaussian, ..spec.clone() }, base_seed)?;
    Ok(GaussianityCheck {
        laplace_winner: laplace.winner,
        laplace_best_log_ml: laplace.best_log_ml,
        gaussian_winner: gaussian.winner,
        gaussian_best_log_ml: gaussian.best_log_ml,
        gaussian_preferred: gaussian.best_log_ml > laplace.best_log_ml,
    })
}

/// Outcome of one pairwise analysis, as needed for ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub labels: [String; 2],
    pub winner: DirectionModel,
    pub decided: bool,
}

impl PairOutcome {
    pub fn from_estimate(labels: [String; 2], est: &DirectionEstimate) -> Self {
        Self { labels, winner: est.winner, decided: est.decided }
    }

    /// Label estimated to be upstream, if decided.
    pub fn upstream(&self) -> Option<&str> {
        self.decided.then(|| self.labels[self.winner.index()].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    /// Most upstream first.
    pub order: Vec<String>,
    /// Win counts aligned with `order`.
    pub wins: Vec<usize>,
    /// Some win counts tied (a cycle or undecided pairs); those labels
    /// were ordered lexicographically.
    pub tie_broken: bool,
    pub method: String,
}

/// Causal ordering by counting pairwise wins (Copeland style). Heuristic.
pub fn aggregate_ordering(pairs: &[PairOutcome]) -> Result<Ordering> {
    let mut labels = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for p in pairs {
        if p.labels[0] == p.labels[1] {
            return Err(Error::invalid(format!("pair ({0}, {0}) compares a variable with itself", p.labels[0])));
        }
        let key = if p.labels[0] < p.labels[1] {
            (p.labels[0].clone(), p.labels[1].clone())
        } else {
            (p.labels[1].clone(), p.labels[0].clone())
        };
        if !seen.insert(key) {
            return Err(Error::invalid(format!("pair ({}, {}) appears twice", p.labels[0], p.labels[1])));
        }
        labels.insert(p.labels[0].clone());
        labels.insert(p.labels[1].clone());
    }
    let d = labels.len();
    if d < 2 || seen.len() != d * (d - 1) / 2 {
        return Err(Error::invalid(format!(
            "pair results cover {} of {} pairs over {d} variables",
            seen.len(),
            d * d.saturating_sub(1) / 2
        )));
    }
    let mut wins: BTreeMap<&str, usize> = labels.iter().map(|l| (l.as_str(), 0)).collect();
    for p in pairs {
        if let Some(up) = p.upstream() {
            *wins.get_mut(up).expect("label registered") += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = wins.into_iter().collect();
    // BTreeMap iteration is lexicographic, and the sort is stable
    ranked.sort_by_key(|r| std::cmp::Reverse(r.1));
    let tie_broken = ranked.windows(2).any(|w| w[0].1 == w[1].1);
    Ok(Ordering {
        order: ranked.iter().map(|(l, _)| l.to_string()).collect(),
        wins: ranked.iter().map(|(_, w)| *w).collect(),
        tie_broken,
        method: "pairwise win count (heuristic)".to_string(),
    })
}
