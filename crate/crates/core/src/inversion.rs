//! Numeric inversion of the monotone tail bounds: confidence radii,
//! minimal sample sizes, and finite-sample valid goodness-of-fit p-values.

use crate::bounds::{
    lower_tail_bound, mean_upper_bound, types_bound, upper_tail_bound, BoundSide,
};
use crate::divergence::{empirical_kl_raw, CountVector, ProbabilityVector};
use crate::error::{Error, Result};

/// Relative tolerance of the bisection on ε.
const RADIUS_REL_TOL: f64 = 1e-9;
const MAX_BISECT_ITERS: u32 = 200;

/// A certified inversion: the bound at `radius` is ≤ δ, and (unless the
/// radius is 0) the bound at `radius·(1 − 1e-6)` is > δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceResult {
    pub radius: f64,
    pub side: BoundSide,
    pub achieved_bound: f64,
    pub iterations: u32,
}

fn tail_bound_value(n: u64, k: usize, eps: f64, side: BoundSide) -> Result<f64> {
    Ok(match side {
        BoundSide::Upper => upper_tail_bound(n, k, eps)?.primary,
        BoundSide::Lower => lower_tail_bound(n, k, eps)?.primary,
        // Summing the two one-sided bounds is strictly tighter than the
        // min-form two-sided constant bound.
        BoundSide::TwoSided => (upper_tail_bound(n, k, eps)?.primary
            + lower_tail_bound(n, k, eps)?.primary)
            .min(1.0),
    })
}

/// A bracket endpoint where the selected bound is certainly ≤ δ: solve the
/// min-form relaxation analytically for the upper side, and step past the
/// support edge 2k/n for the lower side.
fn bracket_high(n: u64, k: usize, delta: f64, side: BoundSide) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    let upper_from = |d: f64| {
        let level = (1.0 / d).ln();
        let quad = (24.0 * kf * level).sqrt() / nf;
        let linear = 8.0 * level / nf;
        2.0 * quad.max(linear) + 1.0
    };
    match side {
        BoundSide::Upper => upper_from(delta),
        BoundSide::Lower => 2.0 * kf / nf + 1.0,
        BoundSide::TwoSided => upper_from(delta / 2.0).max(2.0 * kf / nf + 1.0),
    }
}

/// Smallest ε (to relative tolerance 1e-9) such that the selected tail
/// bound at (n, k, ε) is ≤ δ. δ = 1 yields radius 0.
pub fn confidence_radius(
    n: u64,
    k: usize,
    delta: f64,
    side: BoundSide,
) -> Result<ConfidenceResult> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain("delta must lie in (0, 1]", delta));
    }
    let at_zero = tail_bound_value(n, k, 0.0, side)?;
    if at_zero <= delta {
        return Ok(ConfidenceResult {
            radius: 0.0,
            side,
            achieved_bound: at_zero,
            iterations: 0,
        });
    }

    let mut lo = 0.0;
    let mut hi = bracket_high(n, k, delta, side);
    let mut expansions = 0;
    while tail_bound_value(n, k, hi, side)? > delta {
        hi *= 2.0;
        expansions += 1;
        assert!(expansions < 64, "bracket expansion failed");
    }

    let mut iterations = 0;
    while iterations < MAX_BISECT_ITERS && hi - lo > RADIUS_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if tail_bound_value(n, k, mid, side)? <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }

    Ok(ConfidenceResult {
        radius: hi,
        side,
        achieved_bound: tail_bound_value(n, k, hi, side)?,
        iterations,
    })
}

/// Smallest n such that the selected bound at (n, k, ε) is ≤ δ, by
/// exponential then binary search; the bound at n−1 is > δ.
pub fn sample_size(k: usize, eps: f64, delta: f64, side: BoundSide) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive", eps));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta must lie in (0, 1)", delta));
    }
    let satisfied = |n: u64| -> Result<bool> { Ok(tail_bound_value(n, k, eps, side)? <= delta) };

    if satisfied(1)? {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !satisfied(hi)? {
        hi = hi.checked_mul(2).ok_or(Error::domain(
            "no sample size satisfies the bound",
            f64::INFINITY,
        ))?;
    }
    let mut lo = hi / 2; // bound(lo) > δ
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if satisfied(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A finite-sample valid goodness-of-fit result. `pvalue` is the minimum
/// of the method-of-types p-value and the centered-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    /// Observed empirical relative entropy D̂.
    pub statistic: f64,
    /// The likelihood-ratio statistic 2nD̂.
    pub lr_statistic: f64,
    pub pvalue_types: f64,
    pub pvalue_centered: f64,
    pub pvalue: f64,
}

/// p-value for H₀: counts ~ Multinomial(n, p₀).
///
/// The types route bounds P(D̂ ≥ d) directly. The centered route writes
/// d = E + (d − E) and uses the upper tail bound at ε = d − ln(1+(k−1)/n);
/// substituting the mean upper bound for the unknown mean only increases
/// the bound, so validity is preserved. Cells with p₀ = 0 and zero counts
/// are dropped (effective k); a positive count on such a cell makes the
/// observation impossible under H₀: statistic +∞, p-value exactly 0.
pub fn gof_pvalue(x: &CountVector, p0: &ProbabilityVector) -> Result<GofResult> {
    if x.k() != p0.k() {
        return Err(Error::Shape {
            expected: p0.k(),
            actual: x.k(),
        });
    }
    let n = x.n();
    let mut counts = Vec::with_capacity(x.k());
    let mut probs = Vec::with_capacity(p0.k());
    for (&xi, &pi) in x.counts().iter().zip(p0.probs()) {
        if pi == 0.0 {
            if xi > 0 {
                return Ok(GofResult {
                    statistic: f64::INFINITY,
                    lr_statistic: f64::INFINITY,
                    pvalue_types: 0.0,
                    pvalue_centered: 0.0,
                    pvalue: 0.0,
                });
            }
            continue;
        }
        counts.push(xi);
        probs.push(pi);
    }
    let k_eff = probs.len();
    let statistic = empirical_kl_raw(&counts, n, &probs);
    let pvalue_types = types_bound(n, k_eff, statistic)?;
    let mean_ub = mean_upper_bound(n, k_eff);
    let pvalue_centered = if statistic > mean_ub {
        upper_tail_bound(n, k_eff, statistic - mean_ub)?.primary
    } else {
        1.0
    };
    Ok(GofResult {
        statistic,
        lr_statistic: 2.0 * n as f64 * statistic,
        pvalue_types,
        pvalue_centered,
        pvalue: pvalue_types.min(pvalue_centered),
    })
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
    fn radius_zero_when_delta_is_one() {
        let r = confidence_radius(100, 5, 1.0, BoundSide::Upper).unwrap();
        assert_eq!(r.radius, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn radius_golden_and_round_trip() {
        let r = confidence_radius(100, 5, 0.05, BoundSide::Upper).unwrap();
        // root of (1 + 5ε)^{10}·e^{−50ε} = 0.05
        close(r.radius, 1.970_774_341_346_447_4e-1, 1e-8);
        let back = upper_tail_bound(100, 5, r.radius).unwrap().primary;
        assert!(back <= 0.05 && back >= 0.05 * (1.0 - 1e-6), "back = {back}");
        let before = upper_tail_bound(100, 5, r.radius * (1.0 - 1e-6))
            .unwrap()
            .primary;
        assert!(before > 0.05);
        assert!(r.achieved_bound <= 0.05);
    }

    #[test]
    fn radius_two_sided_and_lower() {
        for side in [BoundSide::Lower, BoundSide::TwoSided] {
            let r = confidence_radius(60, 3, 0.01, side).unwrap();
            assert!(r.achieved_bound <= 0.01);
            if r.radius > 0.0 {
                let before = tail_bound_value(60, 3, r.radius * (1.0 - 1e-6), side).unwrap();
                assert!(before > 0.01, "side {side:?}: {before}");
            }
        }
    }

    #[test]
    fn radius_rejects_bad_delta() {
        assert!(confidence_radius(10, 2, 0.0, BoundSide::Upper).is_err());
        assert!(confidence_radius(10, 2, -0.2, BoundSide::Upper).is_err());
        assert!(confidence_radius(10, 2, 1.5, BoundSide::Upper).is_err());
    }

    #[test]
    fn sample_size_golden_and_floor() {
        // frozen by scanning (1 + nε/20)^{10}·e^{−nε/2} over n
        assert_eq!(sample_size(5, 0.1, 0.05, BoundSide::Upper).unwrap(), 198);
        // generous δ and huge ε: the floor n = 1 already satisfies
        assert_eq!(sample_size(2, 10.0, 0.99, BoundSide::Upper).unwrap(), 1);
        assert!(sample_size(5, 0.0, 0.05, BoundSide::Upper).is_err());
        assert!(sample_size(5, 0.1, 1.0, BoundSide::Upper).is_err());
    }

    #[test]
    fn sample_size_minimality_small_cases() {
        for &(k, eps, delta) in &[
            (2usize, 0.5f64, 0.1f64),
            (3, 0.4, 0.05),
            (5, 0.8, 0.2),
            (2, 1.5, 0.01),
        ] {
            let n = sample_size(k, eps, delta, BoundSide::Upper).unwrap();
            let at = tail_bound_value(n, k, eps, BoundSide::Upper).unwrap();
            assert!(at <= delta);
            if n > 1 {
                let prev = tail_bound_value(n - 1, k, eps, BoundSide::Upper).unwrap();
                assert!(prev > delta);
            }
            // exhaustive scan agrees
            let scan = (1..=n)
                .find(|&m| tail_bound_value(m, k, eps, BoundSide::Upper).unwrap() <= delta)
                .unwrap();
            assert_eq!(scan, n);
        }
    }

    #[test]
    fn sample_size_monotone_in_delta() {
        let loose = sample_size(4, 0.3, 0.1, BoundSide::Upper).unwrap();
        let tight = sample_size(4, 0.3, 0.05, BoundSide::Upper).unwrap();
        assert!(tight >= loose);
    }

    #[test]
    fn gof_exact_fit_has_pvalue_one() {
        let p0 = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let x = CountVector::new(vec![5, 5]).unwrap();
        let g = gof_pvalue(&x, &p0).unwrap();
        assert_eq!(g.statistic, 0.0);
        assert_eq!(g.lr_statistic, 0.0);
        assert_eq!(g.pvalue, 1.0);
    }

    #[test]
    fn gof_example_eight_two() {
        let p0 = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let x = CountVector::new(vec![8, 2]).unwrap();
        let g = gof_pvalue(&x, &p0).unwrap();
        // 0.8 ln 1.6 + 0.2 ln 0.4
        close(g.statistic, 1.927_447_570_217_574_2e-1, 1e-12);
        close(g.lr_statistic, 2.0 * 10.0 * g.statistic, 1e-15);
        // 11·e^{−10d} ≈ 1.6, clamped
        assert_eq!(g.pvalue_types, 1.0);
        close(g.pvalue_centered, 9.729_146_648_295_963_2e-1, 1e-10);
        close(g.pvalue, g.pvalue_centered, 1e-15);
    }

    #[test]
    fn gof_example_ninety_ten() {
        let p0 = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let x = CountVector::new(vec![90, 10]).unwrap();
        let g = gof_pvalue(&x, &p0).unwrap();
        close(g.statistic, 3.680_642_071_684_970_8e-1, 1e-12);
        // 101·e^{−100d}; the types branch wins
        close(g.pvalue, 1.045_913_955_672_884_4e-14, 1e-9);
        assert_eq!(g.pvalue, g.pvalue_types.min(g.pvalue_centered));
        assert!(g.pvalue_types < g.pvalue_centered);
    }

    #[test]
    fn gof_impossible_observation() {
        let p0 = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let x = CountVector::new(vec![3, 1]).unwrap();
        let g = gof_pvalue(&x, &p0).unwrap();
        assert_eq!(g.pvalue, 0.0);
        assert!(g.statistic.is_infinite());
    }

    #[test]
    fn gof_drops_dead_cells() {
        let p0 = ProbabilityVector::new(vec![0.5, 0.0, 0.5]).unwrap();
        let with_dead = CountVector::new(vec![8, 0, 2]).unwrap();
        let p0_live = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let live = CountVector::new(vec![8, 2]).unwrap();
        assert_eq!(
            gof_pvalue(&with_dead, &p0).unwrap(),
            gof_pvalue(&live, &p0_live).unwrap()
        );
    }
}
