//! Sampling-based verification at scales where enumeration is infeasible.
//!
//! Determinism contract: trials are partitioned into fixed-size chunks and
//! every chunk draws from its own counter-derived substream of the master
//! seed, so a run is bit-identical for any worker count. Reductions happen
//! in chunk-index order.

use crate::bounds::{mean_upper_bound, upper_tail_bound};
use crate::divergence::{empirical_kl_raw, CountVector, ProbabilityVector};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::oracle::Side;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Default two-sided confidence level for interval construction.
pub const DEFAULT_CONFIDENCE: f64 = 0.999;
/// Trials per deterministic chunk; part of the reproducibility contract.
const TRIALS_PER_CHUNK: u64 = 8192;
/// Bootstrap resamples for the MGF functional.
const BOOTSTRAP_RESAMPLES: usize = 400;
/// Substream namespace for bootstrap resampling, disjoint from trial chunks.
const BOOTSTRAP_STREAM_BASE: u64 = 1 << 32;

/// A Monte Carlo point estimate with its confidence interval and seed
/// provenance. Re-running with the same seed and trial count reproduces
/// every field bit-identically, regardless of worker count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

/// SplitMix64-style counter mix: derives substream seeds from the master
/// seed without correlation between counters.
fn substream_seed(master: u64, counter: u64) -> u64 {
    let mut z = master ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, chunk))
}

/// One multinomial draw by sequential conditional binomials:
/// X₁ ~ Bin(n, p₁), X₂ ~ Bin(n−X₁, p₂/(1−p₁)), …; the last cell takes the
/// remainder, so counts sum to n exactly. The binomial sampler is
/// exact-distribution (inversion for small n·p, BTPE rejection otherwise).
pub fn sample_counts(n: u64, p: &ProbabilityVector, rng: &mut impl Rng) -> CountVector {
    let mut counts = vec![0u64; p.k()];
    sample_counts_into(n, p.probs(), rng, &mut counts);
    CountVector::new(counts).expect("counts sum to n ≥ 1")
}

fn sample_counts_into(n: u64, probs: &[f64], rng: &mut impl Rng, counts: &mut [u64]) {
    let k = probs.len();
    let mut rem_n = n;
    let mut rem_p = 1.0;
    for i in 0..k - 1 {
        if rem_n == 0 || probs[i] <= 0.0 || rem_p <= 0.0 {
            counts[i] = 0;
            rem_p -= probs[i];
            continue;
        }
        let q = (probs[i] / rem_p).clamp(0.0, 1.0);
        let x = if q >= 1.0 {
            rem_n
        } else {
            Binomial::new(rem_n, q).expect("q in [0,1]").sample(rng)
        };
        counts[i] = x;
        rem_n -= x;
        rem_p -= probs[i];
    }
    counts[k - 1] = rem_n;
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::domain("trials must be ≥ 1", 0.0));
    }
    Ok(())
}

fn chunk_bounds(trials: u64, chunk: usize) -> (u64, u64) {
    let start = chunk as u64 * TRIALS_PER_CHUNK;
    (start, (start + TRIALS_PER_CHUNK).min(trials))
}

fn num_chunks(trials: u64) -> usize {
    trials.div_ceil(TRIALS_PER_CHUNK) as usize
}

/// Tail frequency P̂(D̂ ≷ threshold) with an exact Clopper–Pearson interval
/// at `DEFAULT_CONFIDENCE`.
pub fn estimate_tail(
    n: u64,
    p: &ProbabilityVector,
    threshold: f64,
    side: Side,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(estimate_tails_multi(n, p, &[threshold], side, trials, seed, DEFAULT_CONFIDENCE)?
        .pop()
        .expect("one threshold"))
}

/// Tail estimates for several thresholds from one shared set of draws.
pub fn estimate_tails_multi(
    n: u64,
    p: &ProbabilityVector,
    thresholds: &[f64],
    side: Side,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<Vec<McEstimate>> {
    check_trials(trials)?;
    check_confidence(confidence)?;
    let probs = p.probs().to_vec();
    let k = probs.len();
    let chunks = num_chunks(trials);

    let per_chunk: Vec<Vec<u64>> = map_indexed(chunks, |c| {
        let (start, end) = chunk_bounds(trials, c);
        let mut rng = chunk_rng(seed, c as u64);
        let mut counts = vec![0u64; k];
        let mut hits = vec![0u64; thresholds.len()];
        for _ in start..end {
            sample_counts_into(n, &probs, &mut rng, &mut counts);
            let stat = empirical_kl_raw(&counts, n, &probs);
            for (j, &thr) in thresholds.iter().enumerate() {
                let hit = match side {
                    Side::Upper => stat >= thr,
                    Side::Lower => stat <= thr,
                };
                if hit {
                    hits[j] += 1;
                }
            }
        }
        hits
    });

    let mut totals = vec![0u64; thresholds.len()];
    for hits in &per_chunk {
        for (t, &h) in totals.iter_mut().zip(hits) {
            *t += h;
        }
    }

    Ok(totals
        .iter()
        .map(|&successes| {
            let (ci_low, ci_high) = clopper_pearson(successes, trials, confidence);
            McEstimate {
                point: successes as f64 / trials as f64,
                ci_low,
                ci_high,
                trials,
                seed,
                confidence,
            }
        })
        .collect())
}

fn check_confidence(confidence: f64) -> Result<()> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain("confidence must lie in (0,1)", confidence));
    }
    Ok(())
}

/// Exact Clopper–Pearson interval for `successes` out of `trials` at the
/// given two-sided confidence, via beta-distribution quantiles.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let x = successes as f64;
    let n = trials as f64;
    let low = if successes == 0 {
        0.0
    } else {
        beta_quantile(x, n - x + 1.0, alpha / 2.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        beta_quantile(x + 1.0, n - x, 1.0 - alpha / 2.0)
    };
    (low, high)
}

/// Beta(a, b) quantile by bisection on the regularized incomplete beta.
fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let cdf = |x: f64| statrs::function::beta::beta_reg(a, b, x);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Centered log-MGF estimate ln(mean e^{tD̂}) − t·mean(D̂), max-shifted,
/// with a percentile-bootstrap confidence interval (seeded substreams,
/// 400 resamples).
pub fn estimate_centered_log_mgf(
    n: u64,
    p: &ProbabilityVector,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    if t == 0.0 {
        return Ok(McEstimate {
            point: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
            trials,
            seed,
            confidence: DEFAULT_CONFIDENCE,
        });
    }
    let probs = p.probs().to_vec();
    let k = probs.len();
    let chunks = num_chunks(trials);

    let stats: Vec<f64> = map_indexed(chunks, |c| {
        let (start, end) = chunk_bounds(trials, c);
        let mut rng = chunk_rng(seed, c as u64);
        let mut counts = vec![0u64; k];
        let mut out = Vec::with_capacity((end - start) as usize);
        for _ in start..end {
            sample_counts_into(n, &probs, &mut rng, &mut counts);
            out.push(empirical_kl_raw(&counts, n, &probs));
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();

    let shift = stats.iter().map(|&d| t * d).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = stats.iter().map(|&d| (t * d - shift).exp()).collect();
    let functional = |wsum: f64, dsum: f64| {
        (wsum / trials as f64).ln() + shift - t * dsum / trials as f64
    };
    let point = functional(
        crate::numeric::comp_sum(&weights),
        crate::numeric::comp_sum(&stats),
    );

    let mut resampled: Vec<f64> = map_indexed(BOOTSTRAP_RESAMPLES, |b| {
        let mut rng = chunk_rng(seed, BOOTSTRAP_STREAM_BASE + b as u64);
        let mut wsum = 0.0;
        let mut dsum = 0.0;
        for _ in 0..trials {
            let i = rng.random_range(0..trials as usize);
            wsum += weights[i];
            dsum += stats[i];
        }
        functional(wsum, dsum)
    });
    resampled.sort_by(f64::total_cmp);

    let alpha = 1.0 - DEFAULT_CONFIDENCE;
    let lo_idx = ((BOOTSTRAP_RESAMPLES - 1) as f64 * (alpha / 2.0)).floor() as usize;
    let hi_idx = ((BOOTSTRAP_RESAMPLES - 1) as f64 * (1.0 - alpha / 2.0)).ceil() as usize;
    Ok(McEstimate {
        point,
        ci_low: resampled[lo_idx].min(point),
        ci_high: resampled[hi_idx].max(point),
        trials,
        seed,
        confidence: DEFAULT_CONFIDENCE,
    })
}

/// One (n, P) cell of a verification sweep: tail thresholds are placed at
/// the mean upper bound plus each ε, so every estimate is comparable with
/// the closed-form bound at that ε.
#[derive(Debug, Clone, PartialEq)]
pub struct McSweepCell {
    pub n: u64,
    pub p: ProbabilityVector,
    pub eps_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSweepConfig {
    pub cells: Vec<McSweepCell>,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
    /// Multiplies every closed-form bound before comparison. 1.0 for real
    /// verification; smaller values are a self-test that the harness
    /// actually detects violations.
    pub bound_scale: f64,
}

impl McSweepConfig {
    pub fn new(cells: Vec<McSweepCell>, trials: u64, seed: u64) -> Self {
        Self {
            cells,
            trials,
            seed,
            confidence: DEFAULT_CONFIDENCE,
            bound_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McCellResult {
    pub n: u64,
    pub k: usize,
    pub eps: f64,
    pub threshold: f64,
    pub bound: f64,
    pub estimate: McEstimate,
    /// bound − ci_low; negative means the cell is violated.
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct McVerifyReport {
    pub results: Vec<McCellResult>,
    pub violations: usize,
}

impl McVerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Runs the sweep: a cell is violated when the Clopper–Pearson lower
/// confidence limit of its tail estimate exceeds the (scaled) closed-form
/// upper tail bound.
pub fn verify_bounds_mc(config: &McSweepConfig) -> Result<McVerifyReport> {
    check_confidence(config.confidence)?;
    let mut report = McVerifyReport::default();
    for (cell_idx, cell) in config.cells.iter().enumerate() {
        let k_eff = cell.p.effective_k();
        let mean_ub = mean_upper_bound(cell.n, k_eff);
        let thresholds: Vec<f64> = cell.eps_grid.iter().map(|&e| mean_ub + e).collect();
        let cell_seed = substream_seed(config.seed, 0xC0FFEE ^ cell_idx as u64);
        let estimates = estimate_tails_multi(
            cell.n,
            &cell.p,
            &thresholds,
            Side::Upper,
            config.trials,
            cell_seed,
            config.confidence,
        )?;
        for ((&eps, &threshold), estimate) in
            cell.eps_grid.iter().zip(&thresholds).zip(estimates)
        {
            let bound =
                upper_tail_bound(cell.n, k_eff, eps)?.primary * config.bound_scale;
            let margin = bound - estimate.ci_low;
            let violated = estimate.ci_low > bound;
            if violated {
                report.violations += 1;
            }
            report.results.push(McCellResult {
                n: cell.n,
                k: k_eff,
                eps,
                threshold,
                bound,
                estimate,
                margin,
                violated,
            });
        }
    }
    Ok(report)
}
