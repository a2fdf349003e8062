//! Elementary densities and samplers.
//!
//! Every sampler draws from a caller-owned generator. Generators come from an
//! [`RngStream`], a `(seed, stream)` pair that maps onto a counter-based
//! ChaCha8 stream, so identical pairs always replay identical draws and
//! independent grid cells or trials can be given disjoint streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Identity of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream `child` of this stream. Children of distinct parents
    /// get distinct keys, so nesting (trial → cell) never collides.
    pub fn derive(&self, child: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x632B_E59B_D9B4_E019))),
            stream: child,
        }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceParams {
    pub mean: f64,
    /// Classical scale `b`; the variance is `2 b²`.
    pub scale: f64,
}

impl LaplaceParams {
    pub fn new(mean: f64, scale: f64) -> Result<Self> {
        let p = Self { mean, scale };
        p.validate()?;
        Ok(p)
    }

    /// Laplace with standard deviation `|h|`.
    pub fn from_std_dev(mean: f64, h: f64) -> Result<Self> {
        Self::new(mean, h.abs() / std::f64::consts::SQRT_2)
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!("laplace scale must be positive, got {}", self.scale)));
        }
        if !self.mean.is_finite() {
            return Err(Error::invalid("laplace mean must be finite"));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }
}

/// Bivariate Student t with unit-diagonal scale matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvtParams {
    pub nu: u32,
    pub sigma12: f64,
}

impl MvtParams {
    pub fn new(nu: u32, sigma12: f64) -> Result<Self> {
        let p = Self { nu, sigma12 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.nu <= 2 {
            return Err(Error::invalid(format!("degrees of freedom must exceed 2, got {}", self.nu)));
        }
        check_correlation(self.sigma12)
    }

    /// Per-component variance `ν/(ν−2)`.
    pub fn component_variance(&self) -> f64 {
        let nu = f64::from(self.nu);
        nu / (nu - 2.0)
    }
}

pub(crate) fn check_correlation(sigma12: f64) -> Result<()> {
    if sigma12.is_nan() || sigma12.abs() >= 1.0 {
        return Err(Error::invalid(format!("correlation must lie in (-1, 1), got {sigma12}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn laplace_logpdf_unchecked(x: f64, mean: f64, scale: f64) -> f64 {
    -(2.0 * scale).ln() - (x - mean).abs() / scale
}

pub fn laplace_logpdf(x: f64, p: &LaplaceParams) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(Error::invalid(format!("laplace_logpdf at non-finite point {x}")));
    }
    Ok(laplace_logpdf_unchecked(x, p.mean, p.scale))
}

/// Log density of `N(mean, sd²)`.
pub fn gaussian_logpdf(x: f64, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::invalid(format!("gaussian sd must be positive, got {sd}")));
    }
    if !x.is_finite() || !mean.is_finite() {
        return Err(Error::invalid("gaussian_logpdf needs finite arguments"));
    }
    let z = (x - mean) / sd;
    Ok(-LN_SQRT_2PI - sd.ln() - 0.5 * z * z)
}

#[inline]
pub(crate) fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Inverse-CDF Laplace draw.
#[inline]
pub(crate) fn laplace_draw<R: Rng + ?Sized>(rng: &mut R, mean: f64, scale: f64) -> f64 {
    // u in (-1/2, 1/2]; the open lower end keeps ln finite.
    let u: f64 = 0.5 - rng.random::<f64>();
    mean - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

pub fn sample_laplace<R: Rng + ?Sized>(p: &LaplaceParams, rng: &mut R, count: usize) -> Result<Vec<f64>> {
    p.validate()?;
    if count == 0 {
        return Err(Error::invalid("sample_laplace needs count >= 1"));
    }
    Ok((0..count).map(|_| laplace_draw(rng, p.mean, p.scale)).collect())
}

/// Chi-squared with integer degrees of freedom as a sum of squared normals.
pub fn sample_chi_squared<R: Rng + ?Sized>(nu: u32, rng: &mut R) -> f64 {
    (0..nu)
        .map(|_| {
            let z = std_normal(rng);
            z * z
        })
        .sum()
}

/// Precomputed bivariate Gaussian sampler with a unit-diagonal scale matrix.
#[derive(Debug, Clone, Copy)]
pub(crate) struct UnitCorrNormal {
    rho: f64,
    rho_c: f64,
}

impl UnitCorrNormal {
    pub(crate) fn new(rho: f64) -> Self {
        Self { rho, rho_c: (1.0 - rho * rho).max(0.0).sqrt() }
    }

    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z1 = std_normal(rng);
        let z2 = std_normal(rng);
        [z1, self.rho * z1 + self.rho_c * z2]
    }
}

/// One draw of `u = y / sqrt(v/ν)`, `y ~ N(0, Σ)`, `v ~ χ²_ν`.
pub fn sample_mvt<R: Rng + ?Sized>(p: &MvtParams, rng: &mut R) -> Result<[f64; 2]> {
    p.validate()?;
    Ok(mvt_draw(&UnitCorrNormal::new(p.sigma12), p.nu, rng))
}

#[inline]
pub(crate) fn mvt_draw<R: Rng + ?Sized>(normal: &UnitCorrNormal, nu: u32, rng: &mut R) -> [f64; 2] {
    let y = normal.draw(rng);
    let v = sample_chi_squared(nu, rng);
    let k = (f64::from(nu) / v).sqrt();
    [y[0] * k, y[1] * k]
}

/// Zero-mean bivariate Gaussian draw with covariance `sigma`.
pub fn sample_mvn<R: Rng + ?Sized>(sigma: &[[f64; 2]; 2], rng: &mut R) -> Result<[f64; 2]> {
    let [l11, l21, l22] = cholesky_psd(sigma)?;
    let z1 = std_normal(rng);
    let z2 = std_normal(rng);
    Ok([l11 * z1, l21 * z1 + l22 * z2])
}

/// Lower Cholesky factor `[l11, l21, l22]` of a PSD 2×2 matrix.
fn cholesky_psd(s: &[[f64; 2]; 2]) -> Result<[f64; 3]> {
    const TOL: f64 = 1e-12;
    if s.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("covariance has non-finite entries"));
    }
    let scale = s[0][0].abs().max(s[1][1].abs()).max(1.0);
    if (s[0][1] - s[1][0]).abs() > TOL * scale {
        return Err(Error::invalid("covariance is not symmetric"));
    }
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if s[0][0] < 0.0 || s[1][1] < 0.0 || det < -TOL * scale * scale {
        return Err(Error::invalid("covariance is not positive semi-definite"));
    }
    let l11 = s[0][0].sqrt();
    let l21 = if l11 > 0.0 {
        s[1][0] / l11
    } else if s[1][0].abs() > TOL * scale {
        return Err(Error::invalid("covariance is not positive semi-definite"));
    } else {
        0.0
    };
    let l22 = (s[1][1] - l21 * l21).max(0.0).sqrt();
    Ok([l11, l21, l22])
}

/// `log((1/S) Σ exp(v_s))`, shifted by the maximum.
///
/// All-`-∞` input yields `-∞`.
pub fn log_mean_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("log_mean_exp of an empty slice"));
    }
    if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::invalid("log_mean_exp input contains NaN or +inf"));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    Ok(max + (sum / values.len() as f64).ln())
}
