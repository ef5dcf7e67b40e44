//! Seeded Monte Carlo estimators and the randomized-analysis sample bound.
//!
//! Work is split into a fixed number of partitions. Partition `i` draws from
//! a ChaCha8 generator seeded with the run seed and switched to stream `i`,
//! so results depend only on `(seed, samples, partitions)` and never on the
//! thread pool. Partition counts are integers, which makes the merged
//! estimate bit-identical across runs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::case_study::FirstOrderCase;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5EED_2007;
pub const DEFAULT_PARTITIONS: u32 = 8;
pub const DEFAULT_CONFIDENCE: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub confidence: f64,
    pub seed: u64,
    pub partitions: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            confidence: DEFAULT_CONFIDENCE,
            seed: DEFAULT_SEED,
            partitions: DEFAULT_PARTITIONS,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        if self.partitions == 0 {
            return Err(Error::invalid("partition count must be at least 1"));
        }
        Ok(())
    }
}

/// Point estimate with an exact (Clopper–Pearson) binomial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub n: u64,
    pub confidence: f64,
    pub seed: u64,
    pub partitions: u32,
}

impl ProbabilityEstimate {
    pub fn from_counts(successes: u64, cfg: &McConfig) -> Self {
        let n = cfg.samples;
        let p_hat = successes as f64 / n as f64;
        let (lo, hi) = clopper_pearson(successes, n, cfg.confidence);
        Self {
            p_hat,
            ci_low: lo.min(p_hat),
            ci_high: hi.max(p_hat),
            successes,
            n,
            confidence: cfg.confidence,
            seed: cfg.seed,
            partitions: cfg.partitions,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Generator for one partition: pure function of `(seed, index)`.
pub fn partition_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splits `n` into `parts` near-equal chunks, larger chunks first.
pub fn partition_sizes(n: u64, parts: u32) -> Vec<u64> {
    let parts = u64::from(parts.max(1));
    let base = n / parts;
    let extra = n % parts;
    (0..parts).map(|i| base + u64::from(i < extra)).collect()
}

/// One draw of `(p, q)` from the independent Gaussian parameter law.
pub fn sample_gaussian_pair<R: Rng + ?Sized>(case: &FirstOrderCase, rng: &mut R) -> (f64, f64) {
    let zp: f64 = rng.sample(StandardNormal);
    let zq: f64 = rng.sample(StandardNormal);
    (case.p0 + case.sigma_p * zp, case.q0 + case.sigma_q * zq)
}

/// One uniform draw of `(p, q)` over the box `B(r)`.
pub fn sample_uniform_box<R: Rng + ?Sized>(case: &FirstOrderCase, rng: &mut R) -> (f64, f64) {
    let up: f64 = rng.random();
    let uq: f64 = rng.random();
    (
        case.p0 - case.r + 2.0 * case.r * up,
        case.q0 - case.r + 2.0 * case.r * uq,
    )
}

fn count_events<S, E>(cfg: &McConfig, sampler: S, event: E) -> u64
where
    S: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
    E: Fn(f64, f64) -> bool + Sync,
{
    partition_sizes(cfg.samples, cfg.partitions)
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut rng = partition_rng(cfg.seed, i as u64);
            (0..size)
                .filter(|_| {
                    let (p, q) = sampler(&mut rng);
                    event(p, q)
                })
                .count() as u64
        })
        .sum()
}

/// Estimates `Pr{event(p, q)}` under the Gaussian parameter law.
pub fn estimate_probability<E>(
    event: E,
    case: &FirstOrderCase,
    cfg: &McConfig,
) -> Result<ProbabilityEstimate>
where
    E: Fn(f64, f64) -> bool + Sync,
{
    cfg.validate()?;
    let hits = count_events(cfg, |rng| sample_gaussian_pair(case, rng), event);
    Ok(ProbabilityEstimate::from_counts(hits, cfg))
}

/// Estimates the area fraction of `B(r)` on which `event(p, q)` holds.
pub fn uniform_box_fraction<E>(
    event: E,
    case: &FirstOrderCase,
    cfg: &McConfig,
) -> Result<ProbabilityEstimate>
where
    E: Fn(f64, f64) -> bool + Sync,
{
    cfg.validate()?;
    let hits = count_events(cfg, |rng| sample_uniform_box(case, rng), event);
    Ok(ProbabilityEstimate::from_counts(hits, cfg))
}

/// Exact two-sided binomial interval at the given confidence.
pub fn clopper_pearson(successes: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(successes <= n && n > 0, "need 0 <= successes <= n, n > 0");
    let alpha = 1.0 - confidence;
    let k = successes as f64;
    let n_f = n as f64;
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, k, n_f - k + 1.0)
    };
    let hi = if successes == n {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, k + 1.0, n_f - k)
    };
    (lo, hi)
}

/// Inverse of the regularized incomplete beta function in `x`, by bisection.
pub fn beta_quantile(prob: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if regularized_incomplete_beta(a, b, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `I_x(a, b)` for `a, b > 0`, `x ∈ [0, 1]`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front.exp() * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0)
    } else {
        (1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b).clamp(0.0, 1.0)
    }
}

// Modified Lentz evaluation; converges in O(sqrt(max(a, b))) terms.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..200_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Number of i.i.d. uniform samples that detects an ε-non-robust system with
/// probability greater than `1 - δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub delta: f64,
    /// Least integer strictly greater than `ln(1/δ)/ln(1/(1-ε))`.
    pub n_required: u64,
}

pub fn required_samples(epsilon: f64, delta: f64) -> Result<SamplePlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let bound = (1.0 / delta).ln() / -(-epsilon).ln_1p();
    if bound.is_nan() || bound >= u64::MAX as f64 {
        return Err(Error::invalid(format!(
            "sample bound {bound:e} does not fit in 64 bits"
        )));
    }
    Ok(SamplePlan {
        epsilon,
        delta,
        n_required: bound.floor() as u64 + 1,
    })
}

/// Outcome of repeated fixed-size detection campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub campaigns: u64,
    pub samples_per_campaign: u64,
    pub detected: u64,
    pub rate: f64,
}

/// Runs `campaigns` independent campaigns of `samples_per_campaign` uniform
/// draws over `B(r)` and counts those that hit `violated` at least once.
/// Campaign `c` uses [`partition_rng`]`(seed, c)`.
pub fn detection_rate<E>(
    violated: E,
    case: &FirstOrderCase,
    samples_per_campaign: u64,
    campaigns: u64,
    seed: u64,
) -> Result<DetectionSummary>
where
    E: Fn(f64, f64) -> bool + Sync,
{
    if samples_per_campaign == 0 || campaigns == 0 {
        return Err(Error::invalid(
            "campaign and sample counts must be positive",
        ));
    }
    let detected = (0..campaigns)
        .into_par_iter()
        .filter(|&c| {
            let mut rng = partition_rng(seed, c);
            (0..samples_per_campaign).any(|_| {
                let (p, q) = sample_uniform_box(case, &mut rng);
                violated(p, q)
            })
        })
        .count() as u64;
    Ok(DetectionSummary {
        campaigns,
        samples_per_campaign,
        detected,
        rate: detected as f64 / campaigns as f64,
    })
}
