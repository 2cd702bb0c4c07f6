//! Quaternion entry generators and the truncation / centralization /
//! rescaling pipeline.
//!
//! Every generator is a pure function of `(seed, row, col)`: each entry
//! gets its own counter-seeded stream, so parallel generation order can
//! never change the output.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StudentT as StudentTDist};

use crate::embed::QuaternionMatrix;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Entry distributions admitted by the convergence theorem: common mean,
/// finite variance `sigma2 = E||x - Ex||^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryDistribution {
    /// Components `a, b, c, d` independent normal with variance `sigma2/4`.
    Gaussian { sigma2: f64 },
    /// Uniform on the eight signed units `{+-e, +-i, +-j, +-k}`, scaled by
    /// `sqrt(sigma2)`; bounded with norm exactly `sqrt(sigma2)`.
    SignedUnits { sigma2: f64 },
    /// One real Student-t variate (df > 2) in a uniformly random unit
    /// quaternion direction, rescaled to variance `sigma2`.
    StudentT { df: f64, sigma2: f64 },
    /// A base distribution shifted by a constant quaternion mean.
    Shifted {
        base: Box<EntryDistribution>,
        mu: Quaternion,
    },
}

impl EntryDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            EntryDistribution::Gaussian { sigma2 }
            | EntryDistribution::SignedUnits { sigma2 } => positive_sigma2(*sigma2),
            EntryDistribution::StudentT { df, sigma2 } => {
                positive_sigma2(*sigma2)?;
                if !(*df > 2.0) {
                    return Err(Error::Domain(format!(
                        "student_t requires df > 2, got {df}"
                    )));
                }
                Ok(())
            }
            EntryDistribution::Shifted { base, .. } => base.validate(),
        }
    }

    /// Variance `E||x - Ex||^2`.
    pub fn sigma2(&self) -> f64 {
        match self {
            EntryDistribution::Gaussian { sigma2 }
            | EntryDistribution::SignedUnits { sigma2 }
            | EntryDistribution::StudentT { sigma2, .. } => *sigma2,
            EntryDistribution::Shifted { base, .. } => base.sigma2(),
        }
    }

    pub fn mean(&self) -> Quaternion {
        match self {
            EntryDistribution::Shifted { base, mu } => base.mean() + *mu,
            _ => Quaternion::ZERO,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            EntryDistribution::Gaussian { sigma2 } => format!("gaussian(sigma2={sigma2})"),
            EntryDistribution::SignedUnits { sigma2 } => format!("signed_units(sigma2={sigma2})"),
            EntryDistribution::StudentT { df, sigma2 } => {
                format!("student_t(df={df},sigma2={sigma2})")
            }
            EntryDistribution::Shifted { base, mu } => format!(
                "shifted({},mu={}e+{}i+{}j+{}k)",
                base.tag(),
                mu.a,
                mu.b,
                mu.c,
                mu.d
            ),
        }
    }

    /// One draw. Assumes `validate()` passed.
    pub fn draw(&self, rng: &mut impl Rng) -> Quaternion {
        match self {
            EntryDistribution::Gaussian { sigma2 } => {
                let normal = Normal::new(0.0, (sigma2 / 4.0).sqrt()).unwrap();
                Quaternion::new(
                    normal.sample(rng),
                    normal.sample(rng),
                    normal.sample(rng),
                    normal.sample(rng),
                )
            }
            EntryDistribution::SignedUnits { sigma2 } => {
                let units = [
                    Quaternion::E,
                    Quaternion::I,
                    Quaternion::J,
                    Quaternion::K,
                ];
                let idx = rng.random_range(0..8usize);
                let u = units[idx % 4].scale(if idx < 4 { 1.0 } else { -1.0 });
                u.scale(sigma2.sqrt())
            }
            EntryDistribution::StudentT { df, sigma2 } => {
                let t: f64 = StudentTDist::new(*df).unwrap().sample(rng);
                let normal = Normal::new(0.0, 1.0).unwrap();
                let mut dir = Quaternion::new(
                    normal.sample(rng),
                    normal.sample(rng),
                    normal.sample(rng),
                    normal.sample(rng),
                );
                while dir.norm() < 1e-12 {
                    dir = Quaternion::new(
                        normal.sample(rng),
                        normal.sample(rng),
                        normal.sample(rng),
                        normal.sample(rng),
                    );
                }
                let dir = dir.scale(1.0 / dir.norm());
                // E t^2 = df/(df-2), so this scale hits variance sigma2.
                let r = (sigma2 * (df - 2.0) / df).sqrt();
                dir.scale(r * t)
            }
            EntryDistribution::Shifted { base, mu } => base.draw(rng) + *mu,
        }
    }
}

fn positive_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::Domain(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    Ok(())
}

/// SplitMix64 finalizer: full-avalanche 64-bit mixer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a master seed and a stream index
/// (replication number, entry coordinate, ...).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

fn entry_seed(seed: u64, j: usize, k: usize) -> u64 {
    derive_seed(derive_seed(seed, j as u64), k as u64)
}

/// `p x n` matrix of independent draws. Bit-identical output for identical
/// `(p, n, dist, seed)` regardless of evaluation order.
pub fn sample_matrix(
    p: usize,
    n: usize,
    dist: &EntryDistribution,
    seed: u64,
) -> Result<QuaternionMatrix> {
    dist.validate()?;
    if p == 0 || n == 0 {
        return Err(Error::Domain(format!(
            "matrix dimensions must be >= 1, got p={p}, n={n}"
        )));
    }
    Ok(QuaternionMatrix::from_fn(p, n, |j, k| {
        let mut rng = ChaCha8Rng::seed_from_u64(entry_seed(seed, j, k));
        dist.draw(&mut rng)
    }))
}

/// Pipeline stage label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineStage {
    Truncated,
    Centralized,
    Rescaled,
}

/// One stage of the preprocessing pipeline.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub stage: PipelineStage,
    pub matrix: QuaternionMatrix,
    /// Entries substituted by the bounded unit-variance surrogate in the
    /// rescaling stage (zero for the earlier stages).
    pub replaced_count: usize,
    /// Truncation threshold `eta * sqrt(n)`.
    pub threshold: f64,
}

/// Mean and second moment of the truncated entry `x * I(||x|| <= threshold)`.
///
/// Closed forms are used for the symmetric bounded/gaussian cases; other
/// distributions fall back to a 10^6-draw Monte Carlo estimate.
pub fn truncated_moments(
    dist: &EntryDistribution,
    threshold: f64,
    seed: u64,
) -> (Quaternion, f64) {
    match dist {
        EntryDistribution::Gaussian { sigma2 } => {
            // ||x||^2 ~ (sigma2/4) chi^2_4; E[X I(X <= t)] = k F_{k+2}(t)
            // for X ~ chi^2_k, and chi^2_6 has an elementary CDF.
            let t = 4.0 * threshold * threshold / sigma2;
            let chi6_cdf = 1.0 - (-t / 2.0).exp() * (1.0 + t / 2.0 + t * t / 8.0);
            (Quaternion::ZERO, sigma2 * chi6_cdf)
        }
        EntryDistribution::SignedUnits { sigma2 } => {
            let second = if threshold >= sigma2.sqrt() { *sigma2 } else { 0.0 };
            (Quaternion::ZERO, second)
        }
        EntryDistribution::StudentT { .. } => {
            // Symmetric, so the truncated mean is exactly zero.
            let (_, second) = monte_carlo_moments(dist, threshold, seed);
            (Quaternion::ZERO, second)
        }
        EntryDistribution::Shifted { .. } => monte_carlo_moments(dist, threshold, seed),
    }
}

const MOMENT_DRAWS: usize = 1_000_000;

fn monte_carlo_moments(dist: &EntryDistribution, threshold: f64, seed: u64) -> (Quaternion, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6d6f_6d65_6e74));
    let mut mean = Quaternion::ZERO;
    let mut second = 0.0;
    for _ in 0..MOMENT_DRAWS {
        let x = dist.draw(&mut rng);
        if x.norm() <= threshold {
            mean = mean + x;
            second += x.norm_sq();
        }
    }
    (
        mean.scale(1.0 / MOMENT_DRAWS as f64),
        second / MOMENT_DRAWS as f64,
    )
}

/// The bounded, mean-zero, unit-variance surrogate used when truncation
/// destroys too much variance.
fn surrogate() -> EntryDistribution {
    EntryDistribution::SignedUnits { sigma2: 1.0 }
}

/// Truncate at `eta * sqrt(n)`, centralize by the truncated mean, and
/// rescale to unit variance; when the post-centering variance drops below
/// 1/2, entries are replaced by bounded unit-variance surrogate draws
/// instead of being rescaled.
pub fn preprocess_entries(
    x: &QuaternionMatrix,
    dist: &EntryDistribution,
    eta: f64,
    seed: u64,
) -> Result<(PipelineOutput, PipelineOutput, PipelineOutput)> {
    dist.validate()?;
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let threshold = eta * (x.cols() as f64).sqrt();

    let truncated = x.map(|q| if q.norm() <= threshold { q } else { Quaternion::ZERO });

    let (trunc_mean, trunc_second) = truncated_moments(dist, threshold, seed);
    let centralized = truncated.map(|q| q - trunc_mean);
    let centered_variance = trunc_second - trunc_mean.norm_sq();

    let (rescaled, replaced_count) = if centered_variance < 0.5 {
        let zeta = surrogate();
        let zeta_seed = derive_seed(seed, 0x7a65_7461);
        let m = QuaternionMatrix::from_fn(x.rows(), x.cols(), |j, k| {
            let mut rng = ChaCha8Rng::seed_from_u64(entry_seed(zeta_seed, j, k));
            zeta.draw(&mut rng)
        });
        (m, x.rows() * x.cols())
    } else {
        let sigma = centered_variance.sqrt();
        (centralized.map(|q| q.scale(1.0 / sigma)), 0)
    };

    Ok((
        PipelineOutput {
            stage: PipelineStage::Truncated,
            matrix: truncated,
            replaced_count: 0,
            threshold,
        },
        PipelineOutput {
            stage: PipelineStage::Centralized,
            matrix: centralized,
            replaced_count: 0,
            threshold,
        },
        PipelineOutput {
            stage: PipelineStage::Rescaled,
            matrix: rescaled,
            replaced_count,
            threshold,
        },
    ))
}

/// Monte Carlo estimate of the truncated second moment
/// `E ||x||^2 I(||x|| > eta sqrt(n))` that drives the Lindeberg-type
/// condition.
pub fn lindeberg_estimate(
    dist: &EntryDistribution,
    eta: f64,
    n: usize,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    dist.validate()?;
    if draws == 0 {
        return Err(Error::Domain("draws must be >= 1".into()));
    }
    let threshold = eta * (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6c69_6e64));
    let mut acc = 0.0;
    for _ in 0..draws {
        let x = dist.draw(&mut rng);
        let nrm2 = x.norm_sq();
        if nrm2.sqrt() > threshold {
            acc += nrm2;
        }
    }
    Ok(acc / draws as f64)
}
