//! Statevector simulation: exact branch-tracking execution, noisy
//! trajectory sampling and distribution comparison.

pub mod exact;
pub mod gates;
pub mod shots;
pub mod state;

pub use exact::{run_exact, run_exact_with_limit, Distribution};
pub use shots::{run_shots, run_shots_with_limit, sample_counts, Counts};
pub use state::{Statevector, DEFAULT_QUBIT_LIMIT};

use std::collections::HashMap;

/// Normalize counts into an empirical distribution.
pub fn counts_to_distribution(counts: &Counts) -> Distribution {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return HashMap::new();
    }
    counts
        .iter()
        .map(|(&k, &v)| (k, v as f64 / total as f64))
        .collect()
}

/// Bhattacharyya fidelity between two distributions:
/// `(sum_i sqrt(p_i * q_i))^2`. Equals 1 iff the distributions coincide.
pub fn bhattacharyya_fidelity(p: &Distribution, q: &Distribution) -> f64 {
    let mut sum = 0.0;
    for (k, &pv) in p {
        if let Some(&qv) = q.get(k) {
            sum += (pv * qv).sqrt();
        }
    }
    sum * sum
}

/// Most probable outcome and its probability.
pub fn top_outcome(dist: &Distribution) -> Option<(u64, f64)> {
    dist.iter()
        .map(|(&k, &p)| (k, p))
        // deterministic tie-break on the key
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
}

/// Render an outcome key as a bitstring, clbit 0 rightmost.
pub fn format_bitstring(key: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if key & (1 << b) != 0 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(entries: &[(u64, f64)]) -> Distribution {
        entries.iter().copied().collect()
    }

    #[test]
    fn fidelity_identical_is_one() {
        let p = dist(&[(0, 0.5), (3, 0.5)]);
        assert!((bhattacharyya_fidelity(&p, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_disjoint_is_zero() {
        let p = dist(&[(0, 1.0)]);
        let q = dist(&[(1, 1.0)]);
        assert_eq!(bhattacharyya_fidelity(&p, &q), 0.0);
    }

    #[test]
    fn fidelity_symmetric() {
        let p = dist(&[(0, 0.7), (1, 0.3)]);
        let q = dist(&[(0, 0.4), (1, 0.6)]);
        let ab = bhattacharyya_fidelity(&p, &q);
        let ba = bhattacharyya_fidelity(&q, &p);
        assert!((ab - ba).abs() < 1e-15);
        assert!(ab < 1.0 && ab > 0.0);
    }

    #[test]
    fn bitstring_formatting() {
        assert_eq!(format_bitstring(0b101, 4), "0101");
        assert_eq!(format_bitstring(0, 3), "000");
    }

    #[test]
    fn top_outcome_picks_max() {
        let p = dist(&[(0, 0.2), (5, 0.8)]);
        assert_eq!(top_outcome(&p), Some((5, 0.8)));
    }
}
