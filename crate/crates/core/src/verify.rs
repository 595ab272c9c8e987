//! Certification sweeps: every closed-form inequality checked against the
//! exact oracles over dense parameter grids. Each driver returns a
//! [`CheckReport`]; an empty violation list certifies the inequality on
//! the sweep. Sweeps are chunked over n and reduced in order, so reports
//! are deterministic for any worker count.

use crate::bounds::{
    envelope_relaxation_gamma, envelope_relaxation_ratio, lower_tail_bound, mean_upper_bound,
    mgf_bound, moment_bound, subgamma_envelope, upper_tail_bound, variance_bound,
};
use crate::divergence::{CountVector, ProbabilityVector};
use crate::exec::map_indexed;
use crate::inversion::gof_pvalue;
use crate::oracle::{
    binomial_domination_margin, centered_log_mgf_of_law, dominated_variable_laws,
    enumerate_statistic, exact_centered_log_mgf, exact_moments, exact_tail,
    phi_part_domination_margin, reduction_gap_from, visit_compositions_with_pmf, Side,
};

/// Certification tolerances: a few orders above the unit roundoff of the
/// accumulated sums they guard.
pub const MGF_CERT_TOL: f64 = 1e-10;
pub const TAIL_CERT_TOL: f64 = 1e-12;
pub const DOMINATION_TOL: f64 = 1e-12;
pub const ENVELOPE_CERT_TOL: f64 = 1e-10;
pub const REPRESENTATION_TOL: f64 = 1e-10;
pub const REDUCTION_REL_TOL: f64 = 1e-12;

/// One inequality that failed its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub context: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of one certification sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cells: u64,
    /// Largest lhs − rhs seen (≤ 0 means every inequality held with room).
    pub worst_margin: f64,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct Tally {
    cells: u64,
    worst: f64,
    violations: Vec<Violation>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cells: 0,
            worst: f64::NEG_INFINITY,
            violations: Vec::new(),
        }
    }

    /// Records the inequality lhs ≤ rhs + tol.
    fn check(&mut self, lhs: f64, rhs: f64, tol: f64, context: impl Fn() -> String) {
        self.cells += 1;
        let margin = lhs - rhs;
        if margin > self.worst {
            self.worst = margin;
        }
        if margin > tol {
            self.violations.push(Violation {
                context: context(),
                lhs,
                rhs,
            });
        }
    }

    fn merge(mut reports: Vec<Tally>) -> Tally {
        let mut total = Tally::new();
        for mut r in reports.drain(..) {
            total.cells += r.cells;
            total.worst = total.worst.max(r.worst);
            total.violations.append(&mut r.violations);
        }
        total
    }

    fn into_report(self, name: &'static str) -> CheckReport {
        CheckReport {
            name,
            cells: self.cells,
            worst_margin: self.worst,
            violations: self.violations,
        }
    }
}

/// Inclusive linear grid.
pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![a];
    }
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}

/// `points` evenly spaced values strictly inside (a, b).
pub fn interior_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| a + (b - a) * i as f64 / (points + 1) as f64)
        .collect()
}

/// The sweep grid of success probabilities {0.02, 0.05, …, 0.98}.
pub fn default_p_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut i = 0;
    loop {
        let p = 0.02 + 0.03 * i as f64;
        if p > 0.985 {
            break;
        }
        grid.push(p);
        i += 1;
    }
    grid
}

/// Five test distributions per alphabet size: uniform plus progressively
/// skewed shapes.
pub fn default_distributions(k: usize) -> Vec<ProbabilityVector> {
    let make = |v: Vec<f64>| ProbabilityVector::new_renormalized(v).expect("valid grid entry");
    match k {
        1 => vec![ProbabilityVector::uniform(1).unwrap()],
        2 => vec![
            make(vec![0.5, 0.5]),
            make(vec![0.05, 0.95]),
            make(vec![0.1, 0.9]),
            make(vec![0.25, 0.75]),
            make(vec![0.4, 0.6]),
        ],
        3 => vec![
            make(vec![1.0, 1.0, 1.0]),
            make(vec![0.05, 0.05, 0.9]),
            make(vec![0.1, 0.2, 0.7]),
            make(vec![0.2, 0.3, 0.5]),
            make(vec![0.15, 0.35, 0.5]),
        ],
        _ => {
            let uniform = vec![1.0; k];
            let mut one_heavy = vec![0.1 / (k as f64 - 1.0); k];
            one_heavy[k - 1] = 0.9;
            let mut mild = vec![1.0; k];
            mild[0] = 2.0;
            let geometric: Vec<f64> = (0..k).map(|i| 0.5f64.powi(i as i32)).collect();
            let mut two_heavy = vec![0.05 / (k as f64).max(2.0); k];
            two_heavy[0] = 0.5;
            two_heavy[k - 1] = 0.45;
            vec![
                make(uniform),
                make(one_heavy),
                make(mild),
                make(geometric),
                make(two_heavy),
            ]
        }
    }
}

fn fmt_dist(p: &ProbabilityVector) -> String {
    let entries: Vec<String> = p.probs().iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", entries.join(","))
}

/// Exact centered log-MGF ≤ the closed-form MGF bound over
/// n ∈ {1..max_n}, the given alphabet sizes, the default distribution
/// grid, and a t-grid strictly inside (−5n, 0.49n).
pub fn certify_mgf(max_n: u64, ks: &[usize], t_points: usize) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &k in ks {
            for p in default_distributions(k) {
                let d = enumerate_statistic(n, &p).expect("within budget");
                for t in interior_grid(-5.0 * n as f64, 0.49 * n as f64, t_points) {
                    let lhs = exact_centered_log_mgf(&d, t);
                    let rhs = mgf_bound(n, d.k(), t).expect("t inside domain");
                    tally.check(lhs, rhs, MGF_CERT_TOL, || {
                        format!("n={n} k={k} p={} t={t:.6}", fmt_dist(&p))
                    });
                }
            }
        }
        tally
    });
    Tally::merge(parts).into_report("mgf")
}

/// Exact tails ≤ the primary tail bounds, and the upper relaxation chain
/// ordering, over the same sweep with ε ∈ [0, eps_max].
pub fn certify_tails(max_n: u64, ks: &[usize], eps_points: usize, eps_max: f64) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &k in ks {
            for p in default_distributions(k) {
                let d = enumerate_statistic(n, &p).expect("within budget");
                let mean = exact_moments(&d, 1).mean;
                for eps in linspace(0.0, eps_max, eps_points) {
                    let up = upper_tail_bound(n, d.k(), eps).expect("eps ≥ 0");
                    let lo = lower_tail_bound(n, d.k(), eps).expect("eps ≥ 0");
                    let exact_up = exact_tail(&d, mean + eps, Side::Upper);
                    let exact_lo = exact_tail(&d, mean - eps, Side::Lower);
                    let ctx = |what: &str| {
                        let dist = fmt_dist(&p);
                        let what = what.to_string();
                        move || format!("{what} n={n} k={k} p={dist} eps={eps:.6}")
                    };
                    tally.check(exact_up, up.primary, TAIL_CERT_TOL, ctx("upper"));
                    tally.check(exact_lo, lo.primary, TAIL_CERT_TOL, ctx("lower"));
                    tally.check(up.primary, up.relaxed_quadratic, TAIL_CERT_TOL, ctx("chain1"));
                    tally.check(
                        up.relaxed_quadratic,
                        up.relaxed_minform,
                        TAIL_CERT_TOL,
                        ctx("chain2"),
                    );
                    tally.check(
                        lo.primary,
                        lo.relaxed_quadratic,
                        TAIL_CERT_TOL,
                        ctx("lower-chain"),
                    );
                }
            }
        }
        tally
    });
    Tally::merge(parts).into_report("tail")
}

/// Exact central (2m)-moments ≤ the moment bound for m ∈ {1..m_max},
/// exact variance ≤ 8k/n², exact mean ≤ ln(1 + (k−1)/n).
pub fn certify_moments(max_n: u64, ks: &[usize], m_max: u32) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &k in ks {
            for p in default_distributions(k) {
                let d = enumerate_statistic(n, &p).expect("within budget");
                for m in 1..=m_max {
                    let exact = exact_moments(&d, m);
                    let bound = moment_bound(n, d.k(), m).expect("m ≥ 1");
                    tally.check(exact.central_even, bound, TAIL_CERT_TOL, || {
                        format!("moment n={n} k={k} p={} m={m}", fmt_dist(&p))
                    });
                    if m == 1 {
                        tally.check(exact.variance, variance_bound(n, d.k()), TAIL_CERT_TOL, || {
                            format!("variance n={n} k={k} p={}", fmt_dist(&p))
                        });
                        tally.check(exact.mean, mean_upper_bound(n, d.k()), TAIL_CERT_TOL, || {
                            format!("mean n={n} k={k} p={}", fmt_dist(&p))
                        });
                    }
                }
            }
        }
        tally
    });
    Tally::merge(parts).into_report("moments")
}

/// Exponential stochastic domination margins ≤ 0 (within tolerance) for
/// the half-KL variables Z± and the φ-part variables np·φ±(X/np), over
/// n ∈ {1..max_n} and the p grid.
pub fn certify_domination(max_n: u64, p_grid: &[f64]) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &p in p_grid {
            for side in [Side::Upper, Side::Lower] {
                let m = binomial_domination_margin(n, p, side).expect("p in (0,1)");
                tally.check(m, 0.0, DOMINATION_TOL, || {
                    format!("half-kl n={n} p={p:.2} side={}", side.as_str())
                });
                let m = phi_part_domination_margin(n, p, side).expect("p in (0,1)");
                tally.check(m, 0.0, DOMINATION_TOL, || {
                    format!("phi-part n={n} p={p:.2} side={}", side.as_str())
                });
            }
        }
        tally
    });
    Tally::merge(parts).into_report("domination")
}

/// Centered log-MGF of every dominated variable from the domination sweep
/// ≤ B(t) on a t-grid inside (−20, 0.99), plus B(t) ≤ both of its stated
/// relaxations on the same grid.
pub fn certify_envelope(max_n: u64, p_grid: &[f64], t_points: usize) -> CheckReport {
    let t_grid = interior_grid(-20.0, 0.99, t_points);
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &p in p_grid {
            for (label, values, probs) in dominated_variable_laws(n, p).expect("p in (0,1)") {
                for &t in &t_grid {
                    let lhs = centered_log_mgf_of_law(&values, &probs, t);
                    let rhs = subgamma_envelope(t).expect("t < 1");
                    tally.check(lhs, rhs, ENVELOPE_CERT_TOL, || {
                        format!("{label} n={n} p={p:.2} t={t:.4}")
                    });
                }
            }
        }
        tally
    });
    let mut total = Tally::merge(parts);
    for &t in &t_grid {
        let b = subgamma_envelope(t).expect("t < 1");
        total.check(b, envelope_relaxation_ratio(t).unwrap(), TAIL_CERT_TOL, || {
            format!("relaxation-ratio t={t:.4}")
        });
        total.check(b, envelope_relaxation_gamma(t).unwrap(), TAIL_CERT_TOL, || {
            format!("relaxation-gamma t={t:.4}")
        });
    }
    total.into_report("envelope")
}

/// Joint centered MGF ≤ the product of per-cell √MGFs over
/// n ∈ {1..max_n}, the alphabet sizes, and a t-grid inside (−n, n/2).
pub fn certify_reduction(
    max_n: u64,
    ks: &[usize],
    t_points: usize,
    dists_per_k: usize,
) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &k in ks {
            for p in default_distributions(k).into_iter().take(dists_per_k) {
                let d = enumerate_statistic(n, &p).expect("within budget");
                for t in interior_grid(-(n as f64), n as f64 / 2.0, t_points) {
                    let (lhs, rhs) = reduction_gap_from(&d, t).expect("valid cell");
                    let tol = REDUCTION_REL_TOL * rhs.abs().max(1.0);
                    tally.check(lhs, rhs, tol, || {
                        format!("n={n} k={k} p={} t={t:.6}", fmt_dist(&p))
                    });
                }
            }
        }
        tally
    });
    Tally::merge(parts).into_report("reduction")
}

/// |survival-integral representation − direct centered log-MGF| ≤ tol at
/// t ∈ {−2, −0.5, 0.3, 0.9·min(1, n/2)} over the small-case sweep.
pub fn certify_representation(max_n: u64, ks: &[usize]) -> CheckReport {
    let parts = map_indexed(max_n as usize, |ni| {
        let n = ni as u64 + 1;
        let mut tally = Tally::new();
        for &k in ks {
            for p in default_distributions(k) {
                let d = enumerate_statistic(n, &p).expect("within budget");
                let ts = [-2.0, -0.5, 0.3, 0.9 * (n as f64 / 2.0).min(1.0)];
                for t in ts {
                    let gap = crate::oracle::mgf_representation_gap(&d, t).abs();
                    tally.check(gap, 0.0, REPRESENTATION_TOL, || {
                        format!("n={n} k={k} p={} t={t:.4}", fmt_dist(&p))
                    });
                }
            }
        }
        tally
    });
    Tally::merge(parts).into_report("representation")
}

/// Super-uniformity of the goodness-of-fit p-value under H₀:
/// P(pvalue ≤ α) ≤ α, computed exactly by enumerating the null law.
pub fn certify_pvalue_validity(
    ns: &[u64],
    ks: &[usize],
    dists_per_k: usize,
    alphas: &[f64],
) -> CheckReport {
    let mut tally = Tally::new();
    for &n in ns {
        for &k in ks {
            for p0 in default_distributions(k).into_iter().take(dists_per_k) {
                let mut pairs: Vec<(f64, f64)> = Vec::new();
                visit_compositions_with_pmf(n, p0.probs(), &mut |counts, pmf| {
                    let x = CountVector::new(counts.to_vec()).expect("n ≥ 1");
                    let g = gof_pvalue(&x, &p0).expect("matched shapes");
                    pairs.push((g.pvalue, pmf));
                });
                for &alpha in alphas {
                    let mut hit = crate::numeric::CompensatedSum::new();
                    for &(pv, pmf) in &pairs {
                        if pv <= alpha {
                            hit.add(pmf);
                        }
                    }
                    tally.check(hit.value(), alpha, TAIL_CERT_TOL, || {
                        format!("n={n} k={k} p={} alpha={alpha}", fmt_dist(&p0))
                    });
                }
            }
        }
    }
    tally.into_report("pvalue-validity")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_well_formed() {
        let g = linspace(0.0, 3.0, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[6], 3.0);
        let ig = interior_grid(-1.0, 1.0, 5);
        assert_eq!(ig.len(), 5);
        assert!(ig.iter().all(|&t| t > -1.0 && t < 1.0));
        let ps = default_p_grid();
        assert_eq!(ps.len(), 33);
        assert!((ps[0] - 0.02).abs() < 1e-12);
        assert!((ps[32] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn distribution_grids_have_five_entries() {
        for k in [2usize, 3, 5] {
            let dists = default_distributions(k);
            assert!(dists.len() >= 5, "k={k}");
            for d in &dists {
                assert_eq!(d.k(), k);
            }
        }
    }

    #[test]
    fn small_sweeps_pass() {
        let mgf = certify_mgf(4, &[2], 10);
        assert!(mgf.passed(), "{:?}", mgf.violations.first());
        assert!(mgf.worst_margin <= 0.0);
        let tails = certify_tails(4, &[2], 10, 3.0);
        assert!(tails.passed(), "{:?}", tails.violations.first());
        let moments = certify_moments(4, &[2], 2);
        assert!(moments.passed(), "{:?}", moments.violations.first());
        let dom = certify_domination(10, &[0.1, 0.5, 0.9]);
        assert!(dom.passed(), "{:?}", dom.violations.first());
        let env = certify_envelope(6, &[0.2, 0.8], 8);
        assert!(env.passed(), "{:?}", env.violations.first());
        let red = certify_reduction(3, &[2], 6, 2);
        assert!(red.passed(), "{:?}", red.violations.first());
        let rep = certify_representation(3, &[2], );
        assert!(rep.passed(), "{:?}", rep.violations.first());
        let pv = certify_pvalue_validity(&[5], &[2], 2, &[0.05, 0.5]);
        assert!(pv.passed(), "{:?}", pv.violations.first());
    }
}
