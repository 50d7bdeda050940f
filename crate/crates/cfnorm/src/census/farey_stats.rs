//! Length statistics of shortest CF expansions over a Farey sequence,
//! against the Khinchin-Levy prediction `L(p/q) ~ ln(m) / lambda_KL`.

use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::farey::farey_iter_u64;
use crate::rational::{rat_int, Rational};
use num_bigint::BigInt;

#[derive(Debug, Clone)]
pub struct LengthStats {
    pub m: u64,
    /// `|F_m|`, counted by the enumeration.
    pub count: u64,
    /// Exact mean of `L(p/q)` over `F_m` (convention `L(0/1) = 0`).
    pub mean_len: Rational,
    /// `ln(m) / lambda_KL`.
    pub predicted: f64,
    /// Histogram of lengths: `length_counts[L]` = number of fractions with
    /// shortest expansion of length `L`.
    pub length_counts: Vec<u64>,
    /// `(z, count of |L - predicted| / sqrt(ln m) >= z)` at half-integer
    /// thresholds; nonincreasing in `z` by construction.
    pub tail_counts: Vec<(f64, u64)>,
    /// Empirical `c1` from the sub-Gaussian shape `count <= m^2 e^(-c1 z^2)`
    /// at each threshold with a positive count.
    pub c1_estimates: Vec<(f64, f64)>,
}

/// Exhaustive length statistics over `F_m`.
pub fn farey_length_stats(m: u64) -> Result<LengthStats> {
    if m < 2 {
        return Err(Error::domain("farey_length_stats needs m >= 2"));
    }
    let mut length_counts: Vec<u64> = Vec::new();
    let mut total_len: u64 = 0;
    let mut count: u64 = 0;
    for (p, q) in farey_iter_u64(m) {
        let len = short_cf_len(p, q);
        if length_counts.len() <= len {
            length_counts.resize(len + 1, 0);
        }
        length_counts[len] += 1;
        total_len += len as u64;
        count += 1;
    }
    let mean_len = Rational::new(BigInt::from(total_len), BigInt::from(count));
    let lambda_inv = Real::Div(
        Box::new(Real::ln(rat_int(m as i64))),
        Box::new(Real::LambdaKl),
    );
    let predicted = lambda_inv.to_f64();
    let spread = (m as f64).ln().sqrt();
    let mut tail_counts = Vec::new();
    let mut c1_estimates = Vec::new();
    let mut z = 0.0f64;
    loop {
        let at_least: u64 = length_counts
            .iter()
            .enumerate()
            .filter(|(len, _)| ((*len as f64) - predicted).abs() / spread >= z)
            .map(|(_, c)| *c)
            .sum();
        tail_counts.push((z, at_least));
        if z > 0.0 && at_least > 0 {
            let ratio = at_least as f64 / ((m as f64) * (m as f64));
            c1_estimates.push((z, -ratio.ln() / (z * z)));
        }
        if at_least == 0 {
            break;
        }
        z += 0.5;
    }
    Ok(LengthStats {
        m,
        count,
        mean_len,
        predicted,
        length_counts,
        tail_counts,
        c1_estimates,
    })
}

/// Length of the shortest CF expansion of `p/q` in lowest terms;
/// `L(0/1) = 0`.
fn short_cf_len(p: u64, q: u64) -> usize {
    let (mut p, mut den) = (p, q);
    let mut len = 0usize;
    while p != 0 {
        let r = den % p;
        den = p;
        p = r;
        len += 1;
    }
    len
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_u64;

    #[test]
    fn tiny_example() {
        // F_2 = {0/1, 1/2, 1/1}: lengths 0, 1, 1
        let s = farey_length_stats(2).unwrap();
        assert_eq!(s.count, 3);
        assert_eq!(s.mean_len, rat_u64(2, 3));
        assert_eq!(s.length_counts, vec![1, 2]);
        assert!(farey_length_stats(1).is_err());
    }

    #[test]
    fn exact_mean_reproducible() {
        let a = farey_length_stats(10).unwrap();
        let b = farey_length_stats(10).unwrap();
        assert_eq!(a.mean_len, b.mean_len);
        assert_eq!(a.count, crate::farey::farey_len(10));
        // mean over F_10 computed by an independent scan
        let mut total = 0u64;
        let mut n = 0u64;
        for (p, q) in farey_iter_u64(10) {
            total += short_cf_len(p, q) as u64;
            n += 1;
        }
        assert_eq!(a.mean_len, Rational::new(BigInt::from(total), BigInt::from(n)));
    }

    #[test]
    fn tail_counts_nonincreasing() {
        let s = farey_length_stats(200).unwrap();
        for w in s.tail_counts.windows(2) {
            assert!(w[0].1 >= w[1].1);
        }
        assert_eq!(s.tail_counts[0].1, s.count);
    }

    #[test]
    fn mean_tracks_prediction_at_moderate_m() {
        let s = farey_length_stats(500).unwrap();
        let mean = crate::rational::rat_to_f64(&s.mean_len);
        assert!((mean - s.predicted).abs() / s.predicted < 0.15);
    }
}
