//! The f-divergence generator φ, its monotone split φ±, KL divergence, and
//! the empirical relative entropy statistic.
//!
//! Conventions fixed here and relied on everywhere else:
//! - all logarithms are natural;
//! - 0·ln 0 = 0, applied termwise by branching on zero counts;
//! - a positive observation on a zero-probability cell yields +∞, which is
//!   a first-class value, not an error.

use crate::error::{Error, Result};
use crate::numeric::comp_sum;

/// Absolute tolerance for Σp_i = 1 at construction time.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A validated probability vector P = (p₁…p_k).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Validates non-negativity and Σp_i = 1 within `PROB_SUM_TOL`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&probs)?;
        let sum = comp_sum(&probs);
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {sum}, not 1 within {PROB_SUM_TOL:e}"
            )));
        }
        Ok(Self { probs })
    }

    /// Rescales non-negative entries to sum exactly to the compensated 1.
    pub fn new_renormalized(mut probs: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&probs)?;
        let sum = comp_sum(&probs);
        if sum <= 0.0 {
            return Err(Error::InvalidProbabilities(
                "entries sum to zero".to_string(),
            ));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Self::new(probs)
    }

    /// The uniform distribution on k cells.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidProbabilities(
                "alphabet size must be positive".to_string(),
            ));
        }
        Self::new_renormalized(vec![1.0; k])
    }

    fn validate_entries(probs: &[f64]) -> Result<()> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("empty vector".to_string()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidProbabilities(format!(
                    "entry {i} is {p}, must be a finite non-negative real"
                )));
            }
        }
        if !probs.iter().any(|&p| p > 0.0) {
            return Err(Error::InvalidProbabilities(
                "no strictly positive entry".to_string(),
            ));
        }
        Ok(())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size k.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Number of strictly positive cells. Zero-probability cells carry no
    /// mass and are dropped for bound evaluation; the statistic is
    /// unchanged and smaller k only tightens the bounds.
    pub fn effective_k(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// A copy restricted to the strictly positive cells.
    pub fn restrict_to_support(&self) -> ProbabilityVector {
        let support: Vec<f64> = self.probs.iter().copied().filter(|&p| p > 0.0).collect();
        ProbabilityVector { probs: support }
    }
}

/// A multinomial observation (X₁…X_k) with n = ΣX_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    /// n is derived as the exact sum of counts and must be ≥ 1.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Shape {
                expected: 1,
                actual: 0,
            });
        }
        let v = Self { counts };
        if v.n() == 0 {
            return Err(Error::domain("sample size n must be positive", 0.0));
        }
        Ok(v)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }
}

/// φ(x) split at x = 1 into its non-decreasing and non-increasing parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    /// φ(x)·[x ≥ 1]
    pub plus: f64,
    /// φ(x)·[x ≤ 1]
    pub minus: f64,
}

impl PhiValue {
    /// φ(x) = φ₊(x) + φ₋(x). One part is always exactly 0 (both at x = 1),
    /// so the sum is the exact φ value.
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

/// φ(x) = x·ln x − x + 1 for x > 0, φ(0) = 1.
///
/// Non-negative, convex, decreasing on [0,1], increasing on [1,∞), zero
/// only at x = 1. Near 1 the direct form cancels badly, so the value is
/// computed as x·ln1p(u) − u with u = x − 1.
pub fn phi(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("phi argument must be non-negative", x));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let u = x - 1.0;
    if u.abs() < 0.5 {
        Ok((x * u.ln_1p() - u).max(0.0))
    } else {
        Ok(x * x.ln() - x + 1.0)
    }
}

/// φ₊ and φ₋ at x. Both parts vanish at x = 1.
pub fn phi_parts(x: f64) -> Result<PhiValue> {
    let value = phi(x)?;
    if x >= 1.0 {
        Ok(PhiValue {
            plus: value,
            minus: 0.0,
        })
    } else {
        Ok(PhiValue {
            plus: 0.0,
            minus: value,
        })
    }
}

/// KL divergence Σ q_i ln(q_i/p_i) with the 0·ln 0 = 0 convention.
///
/// Returns +∞ when some q_i > 0 sits on p_i = 0. In debug builds the
/// result is cross-checked against the f-divergence form
/// Σ p_i·φ(q_i/p_i).
pub fn kl_divergence(q: &ProbabilityVector, p: &ProbabilityVector) -> Result<f64> {
    if q.k() != p.k() {
        return Err(Error::Shape {
            expected: p.k(),
            actual: q.k(),
        });
    }
    let value = kl_terms(q.probs(), p.probs());
    debug_assert!({
        let alt = kl_divergence_phi_form(q, p).unwrap();
        (value.is_infinite() && alt.is_infinite())
            || (value - alt).abs() <= 1e-12 * (1.0 + value.abs())
    });
    Ok(value)
}

fn kl_terms(q: &[f64], p: &[f64]) -> f64 {
    let mut acc = crate::numeric::CompensatedSum::new();
    for (&qi, &pi) in q.iter().zip(p) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return f64::INFINITY;
        }
        acc.add(qi * (qi / pi).ln());
    }
    // KL ≥ 0; shield near-equal inputs from summation rounding.
    acc.value().max(0.0)
}

/// The f-divergence route: Σ p_i·φ(q_i/p_i), with 0·φ(q_i/0) = ∞ for
/// q_i > 0. Kept as an independent evaluation path for self-checks.
pub fn kl_divergence_phi_form(q: &ProbabilityVector, p: &ProbabilityVector) -> Result<f64> {
    if q.k() != p.k() {
        return Err(Error::Shape {
            expected: p.k(),
            actual: q.k(),
        });
    }
    let mut acc = crate::numeric::CompensatedSum::new();
    for (&qi, &pi) in q.probs().iter().zip(p.probs()) {
        if pi == 0.0 {
            if qi > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        acc.add(pi * phi(qi / pi)?);
    }
    Ok(acc.value())
}

/// Empirical relative entropy D̂ = Σ (X_i/n)·ln(X_i/(n·p_i)).
///
/// 2n·D̂ is the likelihood-ratio statistic. Returns +∞ for an observation
/// that is impossible under p.
pub fn empirical_kl(x: &CountVector, p: &ProbabilityVector) -> Result<f64> {
    if x.k() != p.k() {
        return Err(Error::Shape {
            expected: p.k(),
            actual: x.k(),
        });
    }
    Ok(empirical_kl_raw(x.counts(), x.n(), p.probs()))
}

/// Statistic on raw slices; the hot path for the oracle and sampler.
/// Caller guarantees equal lengths and n = Σ counts ≥ 1.
pub(crate) fn empirical_kl_raw(counts: &[u64], n: u64, probs: &[f64]) -> f64 {
    let nf = n as f64;
    let mut acc = crate::numeric::CompensatedSum::new();
    for (&xi, &pi) in counts.iter().zip(probs) {
        if xi == 0 {
            continue;
        }
        if pi == 0.0 {
            return f64::INFINITY;
        }
        let freq = xi as f64 / nf;
        acc.add(freq * (freq / pi).ln());
    }
    // D̂ = KL(empirical ‖ p) ≥ 0; shield the zero statistic from rounding.
    acc.value().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * (1.0 + b.abs()),
            "expected {b}, got {a}"
        );
    }

    #[test]
    fn phi_fixed_points() {
        assert_eq!(phi(1.0).unwrap(), 0.0);
        assert_eq!(phi(0.0).unwrap(), 1.0);
        // 2 ln 2 − 1
        close(phi(2.0).unwrap(), 3.862_943_611_198_906_3e-1, 1e-15);
        assert!(phi(-0.1).is_err());
        assert!(phi(f64::NAN).is_err());
    }

    #[test]
    fn phi_parts_split() {
        let at2 = phi_parts(2.0).unwrap();
        close(at2.plus, 3.862_943_611_198_906_3e-1, 1e-15);
        assert_eq!(at2.minus, 0.0);
        let at_half = phi_parts(0.5).unwrap();
        assert_eq!(at_half.plus, 0.0);
        // 0.5 ln 0.5 + 0.5
        close(at_half.minus, 1.534_264_097_200_273_6e-1, 1e-15);
        let at1 = phi_parts(1.0).unwrap();
        assert_eq!((at1.plus, at1.minus), (0.0, 0.0));
    }

    #[test]
    fn phi_parts_total_is_phi_exactly() {
        for &x in &[0.0, 0.3, 0.99, 1.0, 1.01, 2.5, 40.0] {
            assert_eq!(phi_parts(x).unwrap().total(), phi(x).unwrap());
        }
    }

    #[test]
    fn kl_examples() {
        let half = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(kl_divergence(&half, &half).unwrap(), 0.0);

        let point = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        close(
            kl_divergence(&point, &half).unwrap(),
            std::f64::consts::LN_2,
            1e-15,
        );
        assert_eq!(kl_divergence(&half, &point).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kl_shape_mismatch() {
        let a = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let b = ProbabilityVector::uniform(3).unwrap();
        assert!(matches!(
            kl_divergence(&a, &b),
            Err(Error::Shape {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn empirical_kl_examples() {
        let half = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let x = CountVector::new(vec![3, 1]).unwrap();
        // 0.75 ln 1.5 + 0.25 ln 0.5
        close(
            empirical_kl(&x, &half).unwrap(),
            1.308_120_359_411_369_7e-1,
            1e-14,
        );
        let balanced = CountVector::new(vec![2, 2]).unwrap();
        assert_eq!(empirical_kl(&balanced, &half).unwrap(), 0.0);
        let extreme = CountVector::new(vec![0, 4]).unwrap();
        close(
            empirical_kl(&extreme, &half).unwrap(),
            std::f64::consts::LN_2,
            1e-15,
        );
    }

    #[test]
    fn empirical_kl_impossible_observation() {
        let p = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let x = CountVector::new(vec![1, 1]).unwrap();
        assert_eq!(empirical_kl(&x, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![0.0, 0.0]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let renorm = ProbabilityVector::new_renormalized(vec![1.0, 1.0, 2.0]).unwrap();
        close(renorm.probs()[2], 0.5, 1e-15);
        assert_eq!(renorm.effective_k(), 3);
        let sparse = ProbabilityVector::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(sparse.effective_k(), 2);
        assert_eq!(sparse.restrict_to_support().k(), 2);
    }

    #[test]
    fn count_vector_validation() {
        assert!(CountVector::new(vec![]).is_err());
        assert!(CountVector::new(vec![0, 0]).is_err());
        let x = CountVector::new(vec![4, 0, 1]).unwrap();
        assert_eq!(x.n(), 5);
        assert_eq!(x.k(), 3);
    }
}
