//! Closed-form concentration bounds for the empirical relative entropy
//! statistic D̂ of n multinomial samples on k cells.
//!
//! The centered log-MGF of D̂ is bounded by that of a gamma distribution
//! with shape 2k and rate n/2; everything here (tails, moments, norms) is
//! a consequence of that envelope, evaluated with the exact constants.
//! All probability-valued bounds are clamped to [0,1].

use crate::error::{Error, Result};
use crate::numeric::ln_choose;

/// Which deviation a tail bound or inversion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Upper,
    Lower,
    TwoSided,
}

impl BoundSide {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundSide::Upper => "upper",
            BoundSide::Lower => "lower",
            BoundSide::TwoSided => "two_sided",
        }
    }
}

/// A tail bound with its relaxation chain, tightest first.
///
/// For the upper side the chain `primary ≤ relaxed_quadratic ≤
/// relaxed_minform` holds pointwise; for the lower side only two forms
/// exist and `relaxed_minform` repeats the quadratic relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundReport {
    pub primary: f64,
    pub relaxed_quadratic: f64,
    pub relaxed_minform: f64,
    pub side: BoundSide,
}

/// A validated query point for the bound formulas. Ops take plain scalars;
/// this bundle exists so callers (the CLI in particular) can validate a
/// parsed parameter set in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub n: u64,
    pub k: usize,
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub m: u32,
    pub q: f64,
}

impl Default for BoundQuery {
    fn default() -> Self {
        Self {
            n: 1,
            k: 2,
            t: 0.0,
            eps: 0.0,
            delta: 1.0,
            m: 1,
            q: 1.0,
        }
    }
}

impl BoundQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("sample size n must be positive", 0.0));
        }
        if self.k == 0 {
            return Err(Error::domain("alphabet size k must be positive", 0.0));
        }
        check_mgf_argument(self.n, self.t)?;
        if self.eps < 0.0 || self.eps.is_nan() {
            return Err(Error::domain("deviation eps must be non-negative", self.eps));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::domain("delta must lie in (0, 1]", self.delta));
        }
        if self.m == 0 {
            return Err(Error::domain("moment order m must be ≥ 1", 0.0));
        }
        if !(self.q >= 1.0) {
            return Err(Error::domain("norm order q must be ≥ 1", self.q));
        }
        Ok(())
    }
}

/// The MGF argument domain t < n/2 is open; reject queries within
/// 1e-9·n of the boundary instead of returning a huge float.
fn check_mgf_argument(n: u64, t: f64) -> Result<()> {
    let half = n as f64 / 2.0;
    if t.is_nan() || t >= half - 1e-9 * n as f64 {
        return Err(Error::domain_with_limit(
            "MGF argument t must satisfy t < n/2",
            t,
            half,
        ));
    }
    Ok(())
}

/// Upper bound on the centered log-MGF of D̂ at argument t < n/2:
/// min{ 4k·t²/n² / (1 − 2t/n),  2k·ln(e^{−2t/n}/(1 − 2t/n)) },
/// additionally min-ed with the trivial |t|·(k−1)/n for t < 0
/// (the statistic is non-negative, so that cheap bound takes over for
/// sufficiently negative t).
pub fn mgf_bound(n: u64, k: usize, t: f64) -> Result<f64> {
    check_mgf_argument(n, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let quad = mgf_bound_quadratic_branch(n, k, t);
    let gamma = mgf_bound_gamma_branch(n, k, t);
    let mut value = quad.min(gamma);
    if t < 0.0 {
        value = value.min(t.abs() * (k as f64 - 1.0) / n as f64);
    }
    Ok(value)
}

/// The subgamma quadratic branch 4k·t²/n² / (1 − 2t/n).
pub fn mgf_bound_quadratic_branch(n: u64, k: usize, t: f64) -> f64 {
    let r = 2.0 * t / n as f64;
    k as f64 * r * r / (1.0 - r)
}

/// The gamma-MGF branch 2k·ln(e^{−2t/n}/(1 − 2t/n)), the centered
/// log-MGF of a gamma distribution with shape 2k and rate n/2.
pub fn mgf_bound_gamma_branch(n: u64, k: usize, t: f64) -> f64 {
    let r = 2.0 * t / n as f64;
    2.0 * k as f64 * (-r - (-r).ln_1p())
}

/// Envelope B(t) on the centered log-MGF of any non-negative variable
/// stochastically dominated by Exponential(1):
/// t²/(1−t) for t ≤ 0, and for t ≥ 0
/// max{ ln(1 + t²/(1−t) − t²/5),  ln(1 + t/5 + t²/(1−t)) − t/5 }.
pub fn subgamma_envelope(t: f64) -> Result<f64> {
    if t.is_nan() || t >= 1.0 {
        return Err(Error::domain_with_limit(
            "envelope argument t must satisfy t < 1",
            t,
            1.0,
        ));
    }
    let ratio = t * t / (1.0 - t);
    if t <= 0.0 {
        Ok(ratio)
    } else {
        let low_mean = (1.0 + ratio - t * t / 5.0).ln();
        let high_mean = (1.0 + t / 5.0 + ratio).ln() - t / 5.0;
        Ok(low_mean.max(high_mean))
    }
}

/// First relaxation of B: t²/(1−t) for all t < 1.
pub fn envelope_relaxation_ratio(t: f64) -> Result<f64> {
    if t.is_nan() || t >= 1.0 {
        return Err(Error::domain_with_limit(
            "envelope argument t must satisfy t < 1",
            t,
            1.0,
        ));
    }
    Ok(t * t / (1.0 - t))
}

/// Second relaxation of B: 2·ln(e^{−t}/(1−t)), the centered log-MGF of a
/// gamma distribution with shape 2 and rate 1.
pub fn envelope_relaxation_gamma(t: f64) -> Result<f64> {
    if t.is_nan() || t >= 1.0 {
        return Err(Error::domain_with_limit(
            "envelope argument t must satisfy t < 1",
            t,
            1.0,
        ));
    }
    Ok(2.0 * (-t - (-t).ln_1p()))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::domain("deviation eps must be non-negative", eps));
    }
    Ok(())
}

fn clamp_prob(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// P(D̂ ≥ E[D̂] + ε) ≤ (1 + nε/4k)^{2k}·e^{−nε/2}, with the two stated
/// relaxations. The primary form is the optimal Chernoff bound of the
/// gamma-branch MGF bound.
pub fn upper_tail_bound(n: u64, k: usize, eps: f64) -> Result<TailBoundReport> {
    check_eps(eps)?;
    let nf = n as f64;
    let kf = k as f64;
    let x = nf * eps;
    // (1 + x/4k)^{2k} e^{-x/2} in log space; ln1p keeps small ε accurate.
    let primary = (2.0 * kf * (x / (4.0 * kf)).ln_1p() - x / 2.0).exp();
    let relaxed_quadratic = (-3.0 * x * x / (48.0 * kf + 8.0 * x)).exp();
    let relaxed_minform = (-(x * x / (24.0 * kf)).min(x / 8.0)).exp();
    Ok(TailBoundReport {
        primary: clamp_prob(primary),
        relaxed_quadratic: clamp_prob(relaxed_quadratic),
        relaxed_minform: clamp_prob(relaxed_minform),
        side: BoundSide::Upper,
    })
}

/// P(D̂ ≤ E[D̂] − ε): exp(−k(1 − √(1 − nε/2k))²) for ε ≤ 2k/n with the
/// quadratic relaxation exp(−n²ε²/16k); identically 0 past 2k/n since the
/// statistic is non-negative and ε then exceeds every admissible mean.
pub fn lower_tail_bound(n: u64, k: usize, eps: f64) -> Result<TailBoundReport> {
    check_eps(eps)?;
    let nf = n as f64;
    let kf = k as f64;
    let edge = 2.0 * kf / nf;
    let (primary, relaxed) = if eps <= edge {
        let root = (1.0 - nf * eps / (2.0 * kf)).max(0.0).sqrt();
        let primary = (-kf * (1.0 - root) * (1.0 - root)).exp();
        let relaxed = (-nf * nf * eps * eps / (16.0 * kf)).exp();
        (primary, relaxed)
    } else if eps > mean_upper_bound(n, k) {
        (0.0, (-nf * nf * eps * eps / (16.0 * kf)).exp())
    } else {
        // Unreachable: ln(1 + (k−1)/n) ≤ (k−1)/n < 2k/n, so any ε past the
        // edge also clears the mean bound. Kept for case completeness.
        ((-kf).exp(), (-nf * nf * eps * eps / (16.0 * kf)).exp())
    };
    let relaxed = clamp_prob(relaxed);
    Ok(TailBoundReport {
        primary: clamp_prob(primary),
        relaxed_quadratic: relaxed,
        relaxed_minform: relaxed,
        side: BoundSide::Lower,
    })
}

/// The certified two-sided deviation bound
/// min{1, 2·exp(−(1/48)·min{n²ε²/(k−1), nε})}. Requires k ≥ 2.
pub fn conjecture_form_bound(n: u64, k: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if k < 2 {
        return Err(Error::domain_with_limit(
            "two-sided form requires k ≥ 2",
            k as f64,
            2.0,
        ));
    }
    let nf = n as f64;
    let x = nf * eps;
    let exponent = (x * x / (k as f64 - 1.0)).min(x) / 48.0;
    Ok(clamp_prob(2.0 * (-exponent).exp()))
}

/// Bound on the (2m)-th central moment: 2^{6m}·(k^m·m! + (2m)!)/n^{2m},
/// evaluated in log space.
pub fn moment_bound(n: u64, k: usize, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be ≥ 1", 0.0));
    }
    let mf = m as f64;
    let ln_a = mf * (k as f64).ln() + crate::numeric::ln_factorial(m as u64);
    let ln_b = crate::numeric::ln_factorial(2 * m as u64);
    let ln_sum = log_add_exp(ln_a, ln_b);
    Ok((6.0 * mf * std::f64::consts::LN_2 + ln_sum - 2.0 * mf * (n as f64).ln()).exp())
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Bound on the q-norm of the centered statistic: (24/n)(√(kq) + q).
pub fn qnorm_bound(n: u64, k: usize, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::domain("norm order q must be ≥ 1", q));
    }
    Ok(24.0 / n as f64 * ((k as f64 * q).sqrt() + q))
}

/// Var(D̂) ≤ 8k/n².
pub fn variance_bound(n: u64, k: usize) -> f64 {
    8.0 * k as f64 / (n as f64 * n as f64)
}

/// E[D̂] ≤ ln(1 + (k−1)/n).
pub fn mean_upper_bound(n: u64, k: usize) -> f64 {
    ((k as f64 - 1.0) / n as f64).ln_1p()
}

/// The weaker linear form (k−1)/n of the mean bound.
pub fn mean_upper_bound_linear(n: u64, k: usize) -> f64 {
    (k as f64 - 1.0) / n as f64
}

/// Method-of-types baseline: P(D̂ ≥ ε) ≤ C(n+k−1, k−1)·e^{−nε},
/// non-trivial only once ε clears the mean scale.
pub fn types_bound(n: u64, k: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let ln_count = ln_choose(n + k as u64 - 1, k as u64 - 1);
    Ok(clamp_prob((ln_count - n as f64 * eps).exp()))
}

/// Conjectured strengthening of the MGF bound: gamma shape k−1 and rate n
/// on 0 ≤ t < n. NOT certified — kept behind the `experimental` feature
/// for empirical falsification runs only, and never used by any bound,
/// inversion, or verification path.
#[cfg(feature = "experimental")]
pub mod experimental {
    use super::*;

    pub fn conjecture_mgf_bound(n: u64, k: usize, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 || t >= n as f64 * (1.0 - 1e-9) {
            return Err(Error::domain_with_limit(
                "conjectured MGF argument must satisfy 0 ≤ t < n",
                t,
                n as f64,
            ));
        }
        let r = t / n as f64;
        Ok((k as f64 - 1.0) * (-r - (-r).ln_1p()))
    }
}
