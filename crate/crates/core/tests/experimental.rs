//! Falsification run for the uncertified conjectured MGF bound (gamma
//! shape k−1, rate n, 0 ≤ t < n). Finding a violation here would be a
//! result, not a bug; none is known on this sweep.

#![cfg(feature = "experimental")]

use empkl::bounds::experimental::conjecture_mgf_bound;
use empkl::oracle::{enumerate_statistic, exact_centered_log_mgf};
use empkl::verify::{default_distributions, interior_grid};

#[test]
fn conjectured_gamma_bound_survives_small_case_sweep() {
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in 1..=10u64 {
        for k in [2usize, 3] {
            for p in default_distributions(k) {
                let d = enumerate_statistic(n, &p).unwrap();
                for t in interior_grid(0.0, 0.99 * n as f64, 40) {
                    let lhs = exact_centered_log_mgf(&d, t);
                    let rhs = conjecture_mgf_bound(n, d.k(), t).unwrap();
                    worst = worst.max(lhs - rhs);
                    assert!(
                        lhs <= rhs + 1e-10,
                        "counterexample: n={n} k={k} t={t}: {lhs} > {rhs}"
                    );
                }
            }
        }
    }
    println!("conjectured bound unfalsified; worst margin {worst:.3e}");
}
