//! Benjamini-Hochberg step-up adjustment.

use crate::error::{Error, Result};

/// BH-adjusted p-values: sort ascending, scale the i-th order statistic by
/// `m / i`, take the running minimum from the largest down, clip to [0, 1],
/// and report in the original order.
pub fn bh_adjust(p_values: &[f64]) -> Result<Vec<f64>> {
    let m = p_values.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    for (i, &p) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::OutOfRange(format!("p-value at index {i} is {p}")));
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).unwrap());

    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let scaled = p_values[idx] * m as f64 / (rank + 1) as f64;
        running = running.min(scaled);
        // the true adjusted value never falls below the raw one; the max
        // guards against the one-ulp rounding of scaled division
        adjusted[idx] = running.min(1.0).max(p_values[idx]);
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_up_arithmetic() {
        let adj = bh_adjust(&[0.01, 0.02, 0.03, 0.04]).unwrap();
        for v in adj {
            assert!((v - 0.04).abs() < 1e-15);
        }
    }

    #[test]
    fn all_ones_stay_ones() {
        let adj = bh_adjust(&[1.0; 5]).unwrap();
        assert!(adj.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(bh_adjust(&[0.2, 1.5]).is_err());
        assert!(bh_adjust(&[-0.1]).is_err());
        assert!(bh_adjust(&[f64::NAN]).is_err());
    }

    #[test]
    fn matches_independent_step_up_oracle() {
        // a fixed pseudo-random vector
        let mut state = 0x853C49E6748FEA9Bu64;
        let mut unit = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let p: Vec<f64> = (0..37).map(|_| unit()).collect();
        let adj = bh_adjust(&p).unwrap();

        // quadratic-time oracle straight from the definition: the adjusted
        // value of p_i is min over all p_j >= p_i of m * p_j / rank(p_j)
        let m = p.len();
        let mut sorted: Vec<f64> = p.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 0..m {
            let rank_i = sorted.iter().position(|&v| v == p[i]).unwrap() + 1;
            let mut best = f64::INFINITY;
            for (r, &pj) in sorted.iter().enumerate() {
                if r + 1 >= rank_i {
                    best = best.min(m as f64 * pj / (r + 1) as f64);
                }
            }
            let oracle = best.min(1.0);
            assert!((adj[i] - oracle).abs() < 1e-12, "index {i}: {} vs {oracle}", adj[i]);
        }

        // BH never lowers a p-value and preserves order monotonicity
        for i in 0..m {
            assert!(adj[i] >= p[i]);
        }
    }
}
