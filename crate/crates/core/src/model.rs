//! The mixed-LiNGAM pair model.
//!
//! Under [`DirectionModel::M1`] (`x1 → x2`):
//!
//! ```text
//! x1 = μ1 + μ̃1 + e1
//! x2 = μ2 + μ̃2 + b21·x1 + e2
//! ```
//!
//! and symmetrically under `M2`. The `μ̃` terms are per-observation
//! intercepts that absorb the summed effect of unobserved confounders.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{check_correlation, mvt_draw, std_normal, UnitCorrNormal};
use crate::error::{Error, Result};

/// Draws with `|h|` below this are scored `-∞`.
pub const H_FLOOR: f64 = 1e-12;

/// Degrees of freedom of the default t prior.
pub const DEFAULT_NU: u32 = 6;

/// Observations of one ordered variable pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    rows: Vec<[f64; 2]>,
    labels: [String; 2],
}

impl PairDataset {
    /// Validated dataset: finite entries, at least three rows, neither
    /// column constant.
    pub fn new(rows: Vec<[f64; 2]>, labels: [String; 2]) -> Result<Self> {
        let d = Self::from_rows(rows, labels)?;
        if d.n() < 3 {
            return Err(Error::invalid(format!("need at least 3 observations, got {}", d.n())));
        }
        for k in 0..2 {
            if d.sample_variance(k) <= 0.0 {
                return Err(Error::invalid(format!("column '{}' is constant", d.labels[k])));
            }
        }
        Ok(d)
    }

    /// Dataset that only requires finite entries and one row. Likelihood
    /// evaluation is well defined here even where hyperparameter defaults
    /// are not.
    pub fn from_rows(rows: Vec<[f64; 2]>, labels: [String; 2]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset has no rows"));
        }
        if let Some(i) = rows.iter().position(|r| !r[0].is_finite() || !r[1].is_finite()) {
            return Err(Error::invalid(format!("row {i} has a non-finite entry")));
        }
        Ok(Self { rows, labels })
    }

    /// Convenience for unlabeled data; columns are called `x1`, `x2`.
    pub fn unlabeled(rows: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(rows, ["x1".to_string(), "x2".to_string()])
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    /// Unbiased (n−1) sample variance of column `k`; zero for one row.
    pub fn sample_variance(&self, k: usize) -> f64 {
        let n = self.rows.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.rows.iter().map(|r| r[k]).sum::<f64>() / n as f64;
        self.rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    }

    /// Same observations with the two columns (and labels) exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            rows: self.rows.iter().map(|r| [r[1], r[0]]).collect(),
            labels: [self.labels[1].clone(), self.labels[0].clone()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectionModel {
    /// First column causes the second.
    M1,
    /// Second column causes the first.
    M2,
}

impl DirectionModel {
    pub const BOTH: [DirectionModel; 2] = [DirectionModel::M1, DirectionModel::M2];

    pub fn other(self) -> Self {
        match self {
            DirectionModel::M1 => DirectionModel::M2,
            DirectionModel::M2 => DirectionModel::M1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            DirectionModel::M1 => 0,
            DirectionModel::M2 => 1,
        }
    }
}

impl fmt::Display for DirectionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionModel::M1 => write!(f, "M1"),
            DirectionModel::M2 => write!(f, "M2"),
        }
    }
}

/// One prior draw of the parameters of a direction model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDraw {
    pub mu1: f64,
    pub mu2: f64,
    /// `b21` under M1, `b12` under M2.
    pub b: f64,
    pub h1: f64,
    pub h2: f64,
    /// Individual-specific effects, one row per observation.
    pub mu_tilde: Vec<[f64; 2]>,
}

impl ParamDraw {
    pub fn zeros(n: usize) -> Self {
        Self { mu1: 0.0, mu2: 0.0, b: 0.0, h1: 0.0, h2: 0.0, mu_tilde: vec![[0.0; 2]; n] }
    }

    /// The draw that pairs with [`PairDataset::swapped`] under the other
    /// direction.
    pub fn swapped(&self) -> Self {
        Self {
            mu1: self.mu2,
            mu2: self.mu1,
            b: self.b,
            h1: self.h2,
            h2: self.h1,
            mu_tilde: self.mu_tilde.iter().map(|r| [r[1], r[0]]).collect(),
        }
    }
}

/// Prior variances of the common effects, in the order
/// `(μ1, μ2, b12, b21, h1, h2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauCommon {
    pub mu1: f64,
    pub mu2: f64,
    pub b12: f64,
    pub b21: f64,
    pub h1: f64,
    pub h2: f64,
}

impl TauCommon {
    pub fn as_array(&self) -> [f64; 6] {
        [self.mu1, self.mu2, self.b12, self.b21, self.h1, self.h2]
    }

    pub fn uniform(v: f64) -> Self {
        Self { mu1: v, mu2: v, b12: v, b21: v, h1: v, h2: v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PriorFamily {
    StudentT { nu: u32 },
    Gaussian,
}

impl Default for PriorFamily {
    fn default() -> Self {
        PriorFamily::StudentT { nu: DEFAULT_NU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorFamily {
    #[default]
    Laplace,
    Gaussian,
}

/// One grid point η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub tau_cmmn: TauCommon,
    /// Variances of the individual-specific effects of x1 and x2.
    pub tau_indvdl: [f64; 2],
    pub sigma12: f64,
    pub prior: PriorFamily,
    pub errors: ErrorFamily,
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.tau_cmmn.as_array().iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::invalid("common-effect prior variances must be positive and finite"));
        }
        if self.tau_indvdl.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::invalid("individual-effect variances must be non-negative and finite"));
        }
        check_correlation(self.sigma12)?;
        if let PriorFamily::StudentT { nu } = self.prior {
            if nu <= 2 {
                return Err(Error::invalid(format!("t prior needs nu > 2, got {nu}")));
            }
        }
        Ok(())
    }

    /// True when the individual-specific effects are switched off.
    pub fn no_individual_effects(&self) -> bool {
        self.tau_indvdl == [0.0, 0.0]
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prior = match self.prior {
            PriorFamily::StudentT { nu } => format!("t{nu}"),
            PriorFamily::Gaussian => "gaussian".to_string(),
        };
        write!(
            f,
            "tau_indvdl=({:.4}, {:.4}), sigma12={}, prior={}, errors={:?}",
            self.tau_indvdl[0], self.tau_indvdl[1], self.sigma12, prior, self.errors
        )
    }
}

#[inline(always)]
fn residual_row(x: &[f64; 2], model: DirectionModel, draw: &ParamDraw, mt: &[f64; 2]) -> [f64; 2] {
    match model {
        DirectionModel::M1 => [x[0] - draw.mu1 - mt[0], x[1] - draw.mu2 - mt[1] - draw.b * x[0]],
        DirectionModel::M2 => [x[0] - draw.mu1 - mt[0] - draw.b * x[1], x[1] - draw.mu2 - mt[1]],
    }
}

fn check_rows(data: &PairDataset, draw: &ParamDraw) -> Result<()> {
    if draw.mu_tilde.len() != data.n() {
        return Err(Error::invalid(format!(
            "draw has {} individual-effect rows, dataset has {}",
            draw.mu_tilde.len(),
            data.n()
        )));
    }
    Ok(())
}

/// Implied error realizations under `model`.
pub fn residuals(data: &PairDataset, model: DirectionModel, draw: &ParamDraw) -> Result<Vec<[f64; 2]>> {
    check_rows(data, draw)?;
    Ok(data.rows.iter().zip(&draw.mu_tilde).map(|(x, mt)| residual_row(x, model, draw, mt)).collect())
}

/// Complete-data log-likelihood `Σ_i log p_e1(r_i1) + log p_e2(r_i2)`.
pub fn log_likelihood(data: &PairDataset, model: DirectionModel, draw: &ParamDraw, hyper: &HyperParams) -> Result<f64> {
    check_rows(data, draw)?;
    Ok(log_likelihood_unchecked(data, model, draw, hyper.errors))
}

pub(crate) fn log_likelihood_unchecked(
    data: &PairDataset,
    model: DirectionModel,
    draw: &ParamDraw,
    errors: ErrorFamily,
) -> f64 {
    let (h1, h2) = (draw.h1.abs(), draw.h2.abs());
    if h1 < H_FLOOR || h2 < H_FLOOR {
        return f64::NEG_INFINITY;
    }
    let rows = data.rows.iter().zip(&draw.mu_tilde);
    match errors {
        ErrorFamily::Laplace => {
            let (s1, s2) = (h1 / std::f64::consts::SQRT_2, h2 / std::f64::consts::SQRT_2);
            let (mut a1, mut a2) = (0.0, 0.0);
            for (x, mt) in rows {
                let r = residual_row(x, model, draw, mt);
                a1 += r[0].abs();
                a2 += r[1].abs();
            }
            let n = data.n() as f64;
            let l1 = -n * (2.0 * s1).ln() - a1 / s1;
            let l2 = -n * (2.0 * s2).ln() - a2 / s2;
            l1 + l2
        }
        ErrorFamily::Gaussian => {
            const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
            let (mut q1, mut q2) = (0.0, 0.0);
            for (x, mt) in rows {
                let r = residual_row(x, model, draw, mt);
                q1 += r[0] * r[0];
                q2 += r[1] * r[1];
            }
            let n = data.n() as f64;
            let l1 = -n * (LN_SQRT_2PI + h1.ln()) - 0.5 * q1 / (h1 * h1);
            let l2 = -n * (LN_SQRT_2PI + h2.ln()) - 0.5 * q2 / (h2 * h2);
            l1 + l2
        }
    }
}

/// Draw θ from its prior given η.
pub fn sample_prior<R: Rng + ?Sized>(
    hyper: &HyperParams,
    model: DirectionModel,
    n: usize,
    rng: &mut R,
) -> Result<ParamDraw> {
    hyper.validate()?;
    if n == 0 {
        return Err(Error::invalid("sample_prior needs n >= 1"));
    }
    let mut draw = ParamDraw::zeros(n);
    PriorSampler::new(hyper, model).fill(&mut draw, rng);
    Ok(draw)
}

/// Prior sampler with η-dependent constants precomputed, reusing the
/// caller's draw buffer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PriorSampler {
    sd_common: [f64; 5],
    sd_indvdl: [f64; 2],
    corr: UnitCorrNormal,
    prior: PriorFamily,
    skip_indvdl: bool,
}

impl PriorSampler {
    pub(crate) fn new(hyper: &HyperParams, model: DirectionModel) -> Self {
        let t = &hyper.tau_cmmn;
        let tau_b = match model {
            DirectionModel::M1 => t.b21,
            DirectionModel::M2 => t.b12,
        };
        let mut sd_indvdl = [hyper.tau_indvdl[0].sqrt(), hyper.tau_indvdl[1].sqrt()];
        if let PriorFamily::StudentT { nu } = hyper.prior {
            // C^{-1/2} rescales t components to unit variance.
            let c = ((f64::from(nu) - 2.0) / f64::from(nu)).sqrt();
            sd_indvdl = [sd_indvdl[0] * c, sd_indvdl[1] * c];
        }
        Self {
            sd_common: [t.mu1.sqrt(), t.mu2.sqrt(), tau_b.sqrt(), t.h1.sqrt(), t.h2.sqrt()],
            sd_indvdl,
            corr: UnitCorrNormal::new(hyper.sigma12),
            prior: hyper.prior,
            skip_indvdl: hyper.no_individual_effects(),
        }
    }

    /// Overwrite `draw` with a fresh prior draw; `draw.mu_tilde.len()` is n.
    pub(crate) fn fill<R: Rng + ?Sized>(&self, draw: &mut ParamDraw, rng: &mut R) {
        let sd = &self.sd_common;
        draw.mu1 = sd[0] * std_normal(rng);
        draw.mu2 = sd[1] * std_normal(rng);
        draw.b = sd[2] * std_normal(rng);
        draw.h1 = sd[3] * std_normal(rng);
        draw.h2 = sd[4] * std_normal(rng);
        if self.skip_indvdl {
            draw.mu_tilde.iter_mut().for_each(|r| *r = [0.0, 0.0]);
            return;
        }
        let [s1, s2] = self.sd_indvdl;
        match self.prior {
            PriorFamily::StudentT { nu } => {
                for row in draw.mu_tilde.iter_mut() {
                    let u = mvt_draw(&self.corr, nu, rng);
                    *row = [s1 * u[0], s2 * u[1]];
                }
            }
            PriorFamily::Gaussian => {
                for row in draw.mu_tilde.iter_mut() {
                    let z = self.corr.draw(rng);
                    *row = [s1 * z[0], s2 * z[1]];
                }
            }
        }
    }
}

/// `10² × var̂` of the relevant column for each common effect.
pub fn default_tau_cmmn(data: &PairDataset) -> Result<TauCommon> {
    let v1 = data.sample_variance(0);
    let v2 = data.sample_variance(1);
    for (v, label) in [(v1, &data.labels[0]), (v2, &data.labels[1])] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("column '{label}' has zero sample variance")));
        }
    }
    Ok(TauCommon { mu1: 100.0 * v1, mu2: 100.0 * v2, b12: 100.0 * v1, b21: 100.0 * v2, h1: 100.0 * v1, h2: 100.0 * v2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{laplace_logpdf, LaplaceParams, RngStream};

    fn labels() -> [String; 2] {
        ["x1".into(), "x2".into()]
    }

    fn hyper(tau: [f64; 2], sigma12: f64, prior: PriorFamily) -> HyperParams {
        HyperParams { tau_cmmn: TauCommon::uniform(1.0), tau_indvdl: tau, sigma12, prior, errors: ErrorFamily::Laplace }
    }

    fn draw_with(mu: [f64; 2], b: f64, h: [f64; 2], n: usize) -> ParamDraw {
        ParamDraw { mu1: mu[0], mu2: mu[1], b, h1: h[0], h2: h[1], mu_tilde: vec![[0.0; 2]; n] }
    }

    #[test]
    fn residual_examples() {
        let d = PairDataset::from_rows(vec![[2.0, 5.0]], labels()).unwrap();
        let r = residuals(&d, DirectionModel::M1, &draw_with([0.0, 0.0], 2.0, [1.0, 1.0], 1)).unwrap();
        assert_eq!(r, vec![[2.0, 1.0]]);
        let r = residuals(&d, DirectionModel::M2, &draw_with([0.0, 0.0], 0.0, [1.0, 1.0], 1)).unwrap();
        assert_eq!(r, vec![[2.0, 5.0]]);
        let d = PairDataset::from_rows(vec![[1.0, 1.0]], labels()).unwrap();
        let r = residuals(&d, DirectionModel::M1, &draw_with([1.0, 1.0], 0.0, [1.0, 1.0], 1)).unwrap();
        assert_eq!(r, vec![[0.0, 0.0]]);
    }

    #[test]
    fn residual_row_mismatch_is_rejected() {
        let d = PairDataset::from_rows(vec![[2.0, 5.0], [1.0, 1.0]], labels()).unwrap();
        let draw = draw_with([0.0, 0.0], 0.0, [1.0, 1.0], 1);
        assert!(residuals(&d, DirectionModel::M1, &draw).is_err());
        assert!(log_likelihood(&d, DirectionModel::M1, &draw, &hyper([0.0; 2], 0.0, PriorFamily::Gaussian)).is_err());
    }

    #[test]
    fn likelihood_at_mode() {
        let h = hyper([0.0; 2], 0.0, PriorFamily::default());
        let s2 = std::f64::consts::SQRT_2;
        let one = PairDataset::from_rows(vec![[0.0, 0.0]], labels()).unwrap();
        let draw = draw_with([0.0, 0.0], 0.0, [s2, s2], 1);
        let l1 = log_likelihood(&one, DirectionModel::M1, &draw, &h).unwrap();
        assert!((l1 + 2.0 * std::f64::consts::LN_2).abs() < 1e-12);

        let two = PairDataset::from_rows(vec![[0.0, 0.0], [0.0, 0.0]], labels()).unwrap();
        let l2 = log_likelihood(&two, DirectionModel::M1, &draw_with([0.0, 0.0], 0.0, [s2, s2], 2), &h).unwrap();
        assert_eq!(l2, 2.0 * l1);
    }

    #[test]
    fn likelihood_matches_per_term_sum() {
        let mut rng = RngStream::new(17, 0).generator();
        let rows: Vec<[f64; 2]> =
            (0..7).map(|_| [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0]).collect();
        let d = PairDataset::from_rows(rows.clone(), labels()).unwrap();
        let mut draw = draw_with([0.3, -0.2], 0.7, [0.9, -1.3], 7);
        for (i, r) in draw.mu_tilde.iter_mut().enumerate() {
            *r = [0.1 * i as f64, -0.05 * i as f64];
        }
        let h = hyper([1.0, 1.0], 0.0, PriorFamily::default());
        for model in DirectionModel::BOTH {
            // brute force: one density call per observation and variable
            let p1 = LaplaceParams::from_std_dev(0.0, draw.h1).unwrap();
            let p2 = LaplaceParams::from_std_dev(0.0, draw.h2).unwrap();
            let mut want = 0.0;
            for (i, x) in rows.iter().enumerate() {
                let mt = draw.mu_tilde[i];
                let (e1, e2) = match model {
                    DirectionModel::M1 => (x[0] - draw.mu1 - mt[0], x[1] - draw.mu2 - mt[1] - draw.b * x[0]),
                    DirectionModel::M2 => (x[0] - draw.mu1 - mt[0] - draw.b * x[1], x[1] - draw.mu2 - mt[1]),
                };
                want += laplace_logpdf(e1, &p1).unwrap() + laplace_logpdf(e2, &p2).unwrap();
            }
            let got = log_likelihood(&d, model, &draw, &h).unwrap();
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn gaussian_errors_match_per_term_sum() {
        let d = PairDataset::from_rows(vec![[0.5, -1.0], [2.0, 0.3], [-0.7, 0.1]], labels()).unwrap();
        let draw = draw_with([0.1, 0.2], -0.4, [0.8, 1.7], 3);
        let mut h = hyper([0.0; 2], 0.0, PriorFamily::default());
        h.errors = ErrorFamily::Gaussian;
        let r = residuals(&d, DirectionModel::M2, &draw).unwrap();
        let want: f64 = r
            .iter()
            .map(|e| {
                crate::dist::gaussian_logpdf(e[0], 0.0, 0.8).unwrap()
                    + crate::dist::gaussian_logpdf(e[1], 0.0, 1.7).unwrap()
            })
            .sum();
        let got = log_likelihood(&d, DirectionModel::M2, &draw, &h).unwrap();
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn tiny_h_scores_negative_infinity() {
        let d = PairDataset::from_rows(vec![[0.0, 0.0]], labels()).unwrap();
        let h = hyper([0.0; 2], 0.0, PriorFamily::default());
        let draw = draw_with([0.0, 0.0], 0.0, [1e-13, 1.0], 1);
        assert_eq!(log_likelihood(&d, DirectionModel::M1, &draw, &h).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn prior_with_zero_tau_has_zero_effects() {
        let h = hyper([0.0, 0.0], 0.5, PriorFamily::default());
        let draw = sample_prior(&h, DirectionModel::M1, 50, &mut RngStream::new(1, 1).generator()).unwrap();
        assert!(draw.mu_tilde.iter().all(|r| *r == [0.0, 0.0]));
        let h = hyper([0.0, 2.0], 0.5, PriorFamily::default());
        let draw = sample_prior(&h, DirectionModel::M1, 50, &mut RngStream::new(1, 1).generator()).unwrap();
        assert!(draw.mu_tilde.iter().all(|r| r[0] == 0.0));
        assert!(draw.mu_tilde.iter().any(|r| r[1] != 0.0));
    }

    #[test]
    fn prior_uses_direction_specific_b_variance() {
        let mut h = hyper([0.0, 0.0], 0.0, PriorFamily::default());
        h.tau_cmmn.b21 = 4.0;
        h.tau_cmmn.b12 = 1.0;
        let s = RngStream::new(2, 0);
        let d1 = sample_prior(&h, DirectionModel::M1, 1, &mut s.generator()).unwrap();
        let d2 = sample_prior(&h, DirectionModel::M2, 1, &mut s.generator()).unwrap();
        assert!((d1.b - 2.0 * d2.b).abs() < 1e-12);
    }

    #[test]
    fn prior_validates() {
        let mut h = hyper([1.0, 1.0], 0.0, PriorFamily::StudentT { nu: 2 });
        assert!(sample_prior(&h, DirectionModel::M1, 3, &mut RngStream::new(0, 0).generator()).is_err());
        h.prior = PriorFamily::Gaussian;
        h.sigma12 = -1.0;
        assert!(sample_prior(&h, DirectionModel::M1, 3, &mut RngStream::new(0, 0).generator()).is_err());
        h.sigma12 = 0.0;
        h.tau_indvdl = [-1.0, 0.0];
        assert!(h.validate().is_err());
    }

    #[test]
    fn default_tau_examples() {
        // var(x1) = 1, var(x2) = 1
        let d = PairDataset::unlabeled(vec![[-1.0, 1.0], [0.0, 0.0], [1.0, -1.0]]).unwrap();
        assert_eq!(default_tau_cmmn(&d).unwrap().as_array(), [100.0; 6]);
        // var(x1) = 4, var(x2) = 1
        let d = PairDataset::unlabeled(vec![[-2.0, 1.0], [0.0, 0.0], [2.0, -1.0]]).unwrap();
        assert_eq!(default_tau_cmmn(&d).unwrap().as_array(), [400.0, 100.0, 400.0, 100.0, 400.0, 100.0]);
        let c = PairDataset::from_rows(vec![[1.0, 0.0], [1.0, 2.0], [1.0, 3.0]], labels()).unwrap();
        assert!(default_tau_cmmn(&c).is_err());
        assert!(PairDataset::new(vec![[1.0, 0.0], [1.0, 2.0], [1.0, 3.0]], labels()).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(PairDataset::unlabeled(vec![[0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(PairDataset::unlabeled(vec![[0.0, 1.0], [1.0, 0.0], [f64::NAN, 0.0]]).is_err());
        assert!(PairDataset::from_rows(vec![], labels()).is_err());
    }
}
