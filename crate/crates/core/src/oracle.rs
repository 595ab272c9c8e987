//! Exact, enumeration-based law of the statistic for small (n, k).
//!
//! Every closed-form inequality in `bounds` is certified against these
//! oracles: the full multinomial law of D̂ by composition enumeration, the
//! binomial laws behind the product reduction, and the exponential
//! stochastic-domination margins. Enumeration is chunked by the last cell
//! value and reduced in chunk-index order, so results are bit-stable for
//! any worker count.

use crate::divergence::{empirical_kl_raw, phi, ProbabilityVector};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::numeric::{CompensatedSum, LnFactorialTable};

/// Default cap on the number of compositions an enumeration may visit.
pub const DEFAULT_COMPOSITION_BUDGET: u128 = 10_000_000;

/// Atoms closer than this (absolute, on the statistic value) are merged:
/// distinct compositions reach equal values only through exact symmetry,
/// and float noise must not split them.
const ATOM_MERGE_TOL: f64 = 1e-13;

/// Which tail of a distribution a probability refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

/// One support point of an exact law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// The full law of D̂ for n samples from p, as a sorted atom table.
/// Zero-probability cells of the generating vector are dropped on entry
/// (they carry no mass and leave the statistic unchanged), so `p` here is
/// the support-restricted vector and `k()` is the effective alphabet size.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    atoms: Vec<Atom>,
    n: u64,
    p: ProbabilityVector,
}

impl ExactDistribution {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &ProbabilityVector {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.k()
    }
}

/// Number of compositions of n into k non-negative parts, C(n+k−1, k−1),
/// saturating at u128::MAX.
pub fn composition_count(n: u64, k: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    let mut count: u128 = 1;
    for i in 1..k as u128 {
        count = match count.checked_mul(n as u128 + i) {
            Some(c) => c / i,
            None => return u128::MAX,
        };
    }
    count
}

/// Enumerates the law of D̂ with the default composition budget.
pub fn enumerate_statistic(n: u64, p: &ProbabilityVector) -> Result<ExactDistribution> {
    enumerate_statistic_with_budget(n, p, DEFAULT_COMPOSITION_BUDGET)
}

/// Enumerates all compositions of n into the support cells of p, weighting
/// each by its multinomial pmf (log-factorial table), and merges equal
/// statistic values into atoms.
pub fn enumerate_statistic_with_budget(
    n: u64,
    p: &ProbabilityVector,
    budget: u128,
) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::domain("sample size n must be positive", 0.0));
    }
    let support = p.restrict_to_support();
    let k = support.k();
    let count = composition_count(n, k);
    if count > budget {
        return Err(Error::Budget {
            compositions: count,
            budget,
        });
    }

    let table = LnFactorialTable::new(n);
    let ln_probs: Vec<f64> = support.probs().iter().map(|&q| q.ln()).collect();
    let ln_n_fact = table.get(n);
    let probs = support.probs().to_vec();

    // Chunk j holds the compositions whose last cell equals j.
    let chunks: Vec<Vec<(f64, f64)>> = if k == 1 {
        vec![vec![(0.0, 1.0)]]
    } else {
        map_indexed(n as usize + 1, |j| {
            let last = j as u64;
            let mut out = Vec::new();
            let mut counts = vec![0u64; k];
            counts[k - 1] = last;
            for_each_prefix_composition(n - last, k - 1, &mut counts, &mut |c| {
                let mut ln_pmf = ln_n_fact;
                for (i, &x) in c.iter().enumerate() {
                    ln_pmf += x as f64 * ln_probs[i] - table.get(x);
                }
                out.push((empirical_kl_raw(c, n, &probs), ln_pmf.exp()));
            });
            out
        })
    };

    let mut pairs: Vec<(f64, f64)> = chunks.into_iter().flatten().collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut atoms: Vec<Atom> = Vec::new();
    let mut idx = 0;
    while idx < pairs.len() {
        let value = pairs[idx].0;
        let mut mass = CompensatedSum::new();
        while idx < pairs.len() && pairs[idx].0 - value <= ATOM_MERGE_TOL {
            mass.add(pairs[idx].1);
            idx += 1;
        }
        atoms.push(Atom {
            value,
            prob: mass.value(),
        });
    }

    let total: f64 = {
        let mut acc = CompensatedSum::new();
        for a in &atoms {
            acc.add(a.prob);
        }
        acc.value()
    };
    assert!(
        (total - 1.0).abs() <= 1e-10,
        "enumerated probabilities sum to {total}"
    );

    Ok(ExactDistribution {
        atoms,
        n,
        p: support,
    })
}

/// Visits every composition of m into the first r slots of `counts`
/// (colex odometer); `counts` beyond r is left untouched.
fn for_each_prefix_composition(
    m: u64,
    r: usize,
    counts: &mut [u64],
    visit: &mut impl FnMut(&[u64]),
) {
    debug_assert!(r >= 1);
    for c in counts[..r].iter_mut() {
        *c = 0;
    }
    counts[0] = m;
    loop {
        visit(counts);
        if counts[r - 1] == m {
            break;
        }
        let first_nonzero = counts[..r].iter().position(|&c| c > 0).unwrap();
        let v = counts[first_nonzero];
        counts[first_nonzero] = 0;
        counts[0] = v - 1;
        counts[first_nonzero + 1] += 1;
    }
}

/// Exact mean, variance, and (2m)-th central moment of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub mean: f64,
    pub variance: f64,
    /// The (2m)-th central moment for the requested m.
    pub central_even: f64,
}

pub fn exact_moments(d: &ExactDistribution, m: u32) -> ExactMoments {
    let mean = exact_mean(d.atoms());
    let mut var = CompensatedSum::new();
    let mut even = CompensatedSum::new();
    for a in d.atoms() {
        let dev = a.value - mean;
        var.add(a.prob * dev * dev);
        even.add(a.prob * dev.powi(2 * m as i32));
    }
    ExactMoments {
        mean,
        variance: var.value(),
        central_even: even.value(),
    }
}

fn exact_mean(atoms: &[Atom]) -> f64 {
    let mut acc = CompensatedSum::new();
    for a in atoms {
        acc.add(a.prob * a.value);
    }
    acc.value()
}

/// P(value ≥ threshold) for `Side::Upper`, P(value ≤ threshold) for
/// `Side::Lower`; both inequalities are closed.
pub fn exact_tail(d: &ExactDistribution, threshold: f64, side: Side) -> f64 {
    let mut acc = CompensatedSum::new();
    for a in d.atoms() {
        let include = match side {
            Side::Upper => a.value >= threshold,
            Side::Lower => a.value <= threshold,
        };
        if include {
            acc.add(a.prob);
        }
    }
    acc.value().clamp(0.0, 1.0)
}

/// ln E[e^{t(Z − EZ)}] of a finite law, max-shifted for stability.
fn centered_log_mgf(values: &[f64], probs: &[f64], t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let mut mean = CompensatedSum::new();
    for (&v, &p) in values.iter().zip(probs) {
        mean.add(p * v);
    }
    let mean = mean.value();
    let shift = values
        .iter()
        .map(|&v| t * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = CompensatedSum::new();
    for (&v, &p) in values.iter().zip(probs) {
        acc.add(p * (t * v - shift).exp());
    }
    acc.value().ln() + shift - t * mean
}

/// Exact centered log-MGF of the enumerated statistic.
pub fn exact_centered_log_mgf(d: &ExactDistribution, t: f64) -> f64 {
    let values: Vec<f64> = d.atoms().iter().map(|a| a.value).collect();
    let probs: Vec<f64> = d.atoms().iter().map(|a| a.prob).collect();
    centered_log_mgf(&values, &probs, t)
}

/// Binomial(n, p) pmf over x = 0..=n via the log-factorial table.
fn binomial_law(n: u64, p: f64, table: &LnFactorialTable) -> Vec<f64> {
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let ln_n_fact = table.get(n);
    (0..=n)
        .map(|x| {
            let ln_pmf = ln_n_fact - table.get(x) - table.get(n - x)
                + x as f64 * ln_p
                + (n - x) as f64 * ln_q;
            ln_pmf.exp()
        })
        .collect()
}

/// Binary KL divergence KL((q, 1−q) ‖ (p, 1−p)) with 0·ln 0 = 0.
pub fn binary_kl(q: f64, p: f64) -> f64 {
    let mut total = 0.0;
    if q > 0.0 {
        total += q * (q / p).ln();
    }
    if q < 1.0 {
        total += (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln();
    }
    total.max(0.0)
}

fn check_binomial_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("success probability must lie in (0,1)", p));
    }
    Ok(())
}

/// Largest excess of a law's survival function over e^{−x} across its
/// atoms; non-positive certifies stochastic domination by Exponential(1).
fn domination_margin(mut atoms: Vec<(f64, f64)>) -> f64 {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Suffix sums from the top, accumulated in one fixed order.
    let mut tails = vec![0.0; atoms.len()];
    let mut acc = CompensatedSum::new();
    for i in (0..atoms.len()).rev() {
        acc.add(atoms[i].1);
        tails[i] = acc.value();
    }
    let mut margin = f64::NEG_INFINITY;
    for i in 0..atoms.len() {
        if i > 0 && atoms[i].0 == atoms[i - 1].0 {
            continue;
        }
        let excess = tails[i].min(1.0) - (-atoms[i].0).exp();
        margin = margin.max(excess);
    }
    margin
}

/// Margin for Z± = n·KL((X/n, 1−X/n) ‖ (p, 1−p))·[X ≷ np], X ~ Bin(n, p).
/// Both indicators are closed at X = np. A non-positive margin certifies
/// P(Z ≥ x) ≤ e^{−x} at this (n, p).
pub fn binomial_domination_margin(n: u64, p: f64, side: Side) -> Result<f64> {
    check_binomial_p(p)?;
    if n == 0 {
        return Err(Error::domain("n must be positive", 0.0));
    }
    let table = LnFactorialTable::new(n);
    let law = binomial_law(n, p, &table);
    let np = n as f64 * p;
    let atoms: Vec<(f64, f64)> = law
        .iter()
        .enumerate()
        .map(|(x, &prob)| {
            let xf = x as f64;
            let keep = match side {
                Side::Upper => xf >= np,
                Side::Lower => xf <= np,
            };
            let value = if keep {
                n as f64 * binary_kl(xf / n as f64, p)
            } else {
                0.0
            };
            (value, prob)
        })
        .collect();
    Ok(domination_margin(atoms))
}

/// Margin for W± = np·φ±(X/np), X ~ Bin(n, p): the per-cell quantities of
/// the product reduction, scaled to the exponential-domination normal form.
pub fn phi_part_domination_margin(n: u64, p: f64, side: Side) -> Result<f64> {
    check_binomial_p(p)?;
    if n == 0 {
        return Err(Error::domain("n must be positive", 0.0));
    }
    let table = LnFactorialTable::new(n);
    let law = binomial_law(n, p, &table);
    let np = n as f64 * p;
    let mut atoms = Vec::with_capacity(law.len());
    for (x, &prob) in law.iter().enumerate() {
        let ratio = x as f64 / np;
        let keep = match side {
            Side::Upper => ratio >= 1.0,
            Side::Lower => ratio <= 1.0,
        };
        let value = if keep { np * phi(ratio)? } else { 0.0 };
        atoms.push((value, prob));
    }
    Ok(domination_margin(atoms))
}

/// The exact law of W± = p·φ±(X/(np)) for one multinomial cell,
/// X ~ Binomial(n, p). These are the variables whose product of √MGFs
/// dominates the joint MGF.
fn phi_part_cell_law(
    n: u64,
    p: f64,
    side: Side,
    table: &LnFactorialTable,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let law = binomial_law(n, p, table);
    let np = n as f64 * p;
    let mut values = Vec::with_capacity(law.len());
    for x in 0..=n {
        let ratio = x as f64 / np;
        let keep = match side {
            Side::Upper => ratio >= 1.0,
            Side::Lower => ratio <= 1.0,
        };
        values.push(if keep { p * phi(ratio)? } else { 0.0 });
    }
    Ok((values, law))
}

/// Both sides of the multinomial→binomial product reduction at argument t:
/// lhs = E[e^{t(D̂ − E D̂)}] from the joint enumeration, rhs = the product
/// over cells of √(centered MGFs of the φ± cell variables at 2t).
/// lhs ≤ rhs certifies the reduction.
pub fn reduction_gap(n: u64, p: &ProbabilityVector, t: f64) -> Result<(f64, f64)> {
    let d = enumerate_statistic(n, p)?;
    reduction_gap_from(&d, t)
}

/// As [`reduction_gap`], reusing an already-enumerated law for sweeps over
/// many t values.
pub fn reduction_gap_from(d: &ExactDistribution, t: f64) -> Result<(f64, f64)> {
    let n = d.n();
    let lhs = exact_centered_log_mgf(d, t).exp();

    let table = LnFactorialTable::new(n);
    let mut log_rhs = CompensatedSum::new();
    for &pi in d.p().probs() {
        for side in [Side::Upper, Side::Lower] {
            let (values, probs) = phi_part_cell_law(n, pi, side, &table)?;
            log_rhs.add(0.5 * centered_log_mgf(&values, &probs, 2.0 * t));
        }
    }
    Ok((lhs, log_rhs.value().exp()))
}

/// Visits every composition of n into k parts together with its
/// multinomial pmf under `probs` (all entries strictly positive).
pub(crate) fn visit_compositions_with_pmf(
    n: u64,
    probs: &[f64],
    visit: &mut impl FnMut(&[u64], f64),
) {
    let k = probs.len();
    let table = LnFactorialTable::new(n);
    let ln_probs: Vec<f64> = probs.iter().map(|&q| q.ln()).collect();
    let ln_n_fact = table.get(n);
    if k == 1 {
        visit(&[n], 1.0);
        return;
    }
    for last in 0..=n {
        let mut counts = vec![0u64; k];
        counts[k - 1] = last;
        for_each_prefix_composition(n - last, k - 1, &mut counts, &mut |c| {
            let mut ln_pmf = ln_n_fact;
            for (i, &x) in c.iter().enumerate() {
                ln_pmf += x as f64 * ln_probs[i] - table.get(x);
            }
            visit(c, ln_pmf.exp());
        });
    }
}

/// The four exponentially dominated variables built from Binomial(n, p):
/// the half-KL variables Z± and the normalized φ-part variables n·p·φ±.
/// Returns (label, values, probs) triples sharing the binomial law.
pub fn dominated_variable_laws(n: u64, p: f64) -> Result<Vec<(&'static str, Vec<f64>, Vec<f64>)>> {
    check_binomial_p(p)?;
    let table = LnFactorialTable::new(n);
    let law = binomial_law(n, p, &table);
    let np = n as f64 * p;
    let mut out = Vec::with_capacity(4);
    for (label, side) in [("half_kl_upper", Side::Upper), ("half_kl_lower", Side::Lower)] {
        let values: Vec<f64> = (0..=n)
            .map(|x| {
                let xf = x as f64;
                let keep = match side {
                    Side::Upper => xf >= np,
                    Side::Lower => xf <= np,
                };
                if keep {
                    n as f64 * binary_kl(xf / n as f64, p)
                } else {
                    0.0
                }
            })
            .collect();
        out.push((label, values, law.clone()));
    }
    for (label, side) in [("phi_plus", Side::Upper), ("phi_minus", Side::Lower)] {
        let mut values = Vec::with_capacity(law.len());
        for x in 0..=n {
            let ratio = x as f64 / np;
            let keep = match side {
                Side::Upper => ratio >= 1.0,
                Side::Lower => ratio <= 1.0,
            };
            values.push(if keep { np * phi(ratio)? } else { 0.0 });
        }
        out.push((label, values, law.clone()));
    }
    Ok(out)
}

/// Centered log-MGF of an explicit finite law; used to test dominated
/// variables against the subgamma envelope.
pub fn centered_log_mgf_of_law(values: &[f64], probs: &[f64], t: f64) -> f64 {
    centered_log_mgf(values, probs, t)
}

/// Difference between the survival-function integral representation of the
/// centered log-MGF and its direct evaluation; exactly 0 in exact
/// arithmetic for any non-negative variable.
///
/// The integral ∫₀^∞ t(e^{tx} − 1)·P(Z ≥ x) dx is a finite sum of
/// closed-form pieces: the survival function is constant between atoms and
/// t(e^{tx} − 1) has antiderivative e^{tx} − tx.
pub fn mgf_representation_gap(d: &ExactDistribution, t: f64) -> f64 {
    let mean = exact_mean(d.atoms());

    let mut tails = vec![0.0; d.atoms().len()];
    let mut acc = CompensatedSum::new();
    for i in (0..d.atoms().len()).rev() {
        acc.add(d.atoms()[i].prob);
        tails[i] = acc.value();
    }

    let antiderivative = |x: f64| (t * x).exp() - t * x;
    let mut integral = CompensatedSum::new();
    let mut prev = 0.0;
    for (i, a) in d.atoms().iter().enumerate() {
        if a.value <= prev {
            continue;
        }
        integral.add(tails[i] * (antiderivative(a.value) - antiderivative(prev)));
        prev = a.value;
    }

    let rhs = (1.0 + t * mean + integral.value()).ln() - t * mean;
    rhs - exact_centered_log_mgf(d, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * (1.0 + b.abs()),
            "expected {b}, got {a}"
        );
    }

    fn uniform(k: usize) -> ProbabilityVector {
        ProbabilityVector::uniform(k).unwrap()
    }

    #[test]
    fn composition_counts() {
        assert_eq!(composition_count(2, 2), 3);
        assert_eq!(composition_count(4, 2), 5);
        assert_eq!(composition_count(3, 3), 10);
        assert_eq!(composition_count(12, 3), 91);
    }

    #[test]
    fn enumerate_two_coin_flips() {
        let d = enumerate_statistic(2, &uniform(2)).unwrap();
        assert_eq!(d.atoms().len(), 2);
        close(d.atoms()[0].value, 0.0, 1e-15);
        close(d.atoms()[0].prob, 0.5, 1e-15);
        close(d.atoms()[1].value, LN_2, 1e-15);
        close(d.atoms()[1].prob, 0.5, 1e-15);
    }

    #[test]
    fn enumerate_single_draw_is_indicator() {
        let p = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let d = enumerate_statistic(1, &p).unwrap();
        // atoms at ln(1/p_i) weighted p_i, sorted descending in p_i
        assert_eq!(d.atoms().len(), 3);
        close(d.atoms()[0].value, (1.0f64 / 0.5).ln(), 1e-15);
        close(d.atoms()[0].prob, 0.5, 1e-15);
        close(d.atoms()[2].value, (1.0f64 / 0.2).ln(), 1e-15);
        close(d.atoms()[2].prob, 0.2, 1e-15);
    }

    #[test]
    fn enumerate_merges_symmetric_compositions() {
        let d = enumerate_statistic(4, &uniform(2)).unwrap();
        // counts (3,1) and (1,3) share the statistic 0.75 ln 1.5 + 0.25 ln 0.5
        let target = 1.308_120_359_411_369_7e-1;
        let atom = d
            .atoms()
            .iter()
            .find(|a| (a.value - target).abs() < 1e-12)
            .expect("merged atom");
        close(atom.prob, 0.5, 1e-12);
    }

    #[test]
    fn enumerate_drops_zero_cells() {
        let p = ProbabilityVector::new(vec![0.5, 0.0, 0.5]).unwrap();
        let d = enumerate_statistic(2, &p).unwrap();
        assert_eq!(d.k(), 2);
        assert_eq!(d.atoms().len(), 2);
    }

    #[test]
    fn enumerate_budget_guard() {
        let err = enumerate_statistic_with_budget(100, &uniform(3), 100).unwrap_err();
        match err {
            Error::Budget { compositions, .. } => assert_eq!(compositions, 5151),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exact_moments_two_flips() {
        let d = enumerate_statistic(2, &uniform(2)).unwrap();
        let m = exact_moments(&d, 1);
        close(m.mean, LN_2 / 2.0, 1e-14);
        close(m.variance, LN_2 * LN_2 / 4.0, 1e-14);
        close(m.central_even, m.variance, 1e-14);
    }

    #[test]
    fn exact_moments_point_mass() {
        let d = enumerate_statistic(5, &uniform(1)).unwrap();
        let m = exact_moments(&d, 3);
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.variance, 0.0);
        assert_eq!(m.central_even, 0.0);
    }

    #[test]
    fn exact_tail_examples() {
        let d = enumerate_statistic(2, &uniform(2)).unwrap();
        assert_eq!(exact_tail(&d, -1.0, Side::Upper), 1.0);
        close(exact_tail(&d, LN_2, Side::Upper), 0.5, 1e-15);
        close(exact_tail(&d, 0.1, Side::Lower), 0.5, 1e-15);
    }

    #[test]
    fn exact_centered_log_mgf_examples() {
        let d = enumerate_statistic(2, &uniform(2)).unwrap();
        assert_eq!(exact_centered_log_mgf(&d, 0.0), 0.0);
        // ln(0.5 + 0.5·√2) − 0.5·(ln 2)/2
        close(exact_centered_log_mgf(&d, 0.5), 1.493_961_131_961_138_8e-2, 1e-12);
        // ln 1.5 − (ln 2)/2
        close(exact_centered_log_mgf(&d, 1.0), 5.889_151_782_819_172_8e-2, 1e-12);
    }

    #[test]
    fn domination_equality_witnesses() {
        let m1 = binomial_domination_margin(1, 0.5, Side::Upper).unwrap();
        assert!(m1.abs() <= 1e-15, "margin {m1}");
        let m2 = binomial_domination_margin(2, 0.5, Side::Upper).unwrap();
        assert!(m2.abs() <= 1e-15, "margin {m2}");
        assert!(binomial_domination_margin(3, 0.0, Side::Upper).is_err());
    }

    #[test]
    fn phi_part_domination_examples() {
        let m = phi_part_domination_margin(1, 0.5, Side::Upper).unwrap();
        assert!(m <= 1e-12, "margin {m}");
        // the top atom is 0.5·φ(2) with probability 0.5 ≤ e^{−0.5·φ(2)}
        close(
            0.5 - (-0.5 * phi(2.0).unwrap()).exp(),
            0.5 - 8.243_606_353_500_641e-1,
            1e-12,
        );
        let lower = phi_part_domination_margin(4, 0.3, Side::Lower).unwrap();
        assert!(lower <= 1e-12, "margin {lower}");
    }

    #[test]
    fn reduction_gap_examples() {
        let p = uniform(2);
        let (lhs, rhs) = reduction_gap(2, &p, 0.0).unwrap();
        assert_eq!((lhs, rhs), (1.0, 1.0));
        let (lhs, rhs) = reduction_gap(2, &p, 1.0).unwrap();
        // 1.5/√2 from the two-atom law
        close(lhs, 1.060_660_171_779_821_2, 1e-12);
        close(rhs, 1.130_018_454_237_570_4, 1e-10);
        assert!(lhs <= rhs);
        let (lhs3, rhs3) = reduction_gap(3, &uniform(3), 0.5).unwrap();
        assert!(lhs3 <= rhs3 + 1e-12);
    }

    #[test]
    fn representation_gap_vanishes() {
        let d = enumerate_statistic(2, &uniform(2)).unwrap();
        assert!(mgf_representation_gap(&d, 0.5).abs() <= 1e-12);
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let d = enumerate_statistic(4, &p).unwrap();
        assert!(mgf_representation_gap(&d, -1.0).abs() <= 1e-12);
        // point mass: both sides vanish identically
        let point = enumerate_statistic(3, &uniform(1)).unwrap();
        assert_eq!(mgf_representation_gap(&point, 2.0), 0.0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn enumeration_independent_of_worker_count() {
        let p = ProbabilityVector::new(vec![0.15, 0.35, 0.5]).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| enumerate_statistic(40, &p).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn binary_kl_edge_cases() {
        assert_eq!(binary_kl(0.5, 0.5), 0.0);
        close(binary_kl(1.0, 0.5), LN_2, 1e-15);
        close(binary_kl(0.0, 0.5), LN_2, 1e-15);
    }
}
