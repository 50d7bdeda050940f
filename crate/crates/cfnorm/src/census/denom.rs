//! Proportion of a Farey sequence whose CF expansions violate the
//! checkpoint denominator-growth condition: with
//! `m = floor(exp((lambda_KL + eps) N))` and checkpoint stride
//! `floor(sqrt(N))`, a fraction is bad when some expansion `B` of it has a
//! checkpoint `n <= |B| - 2` with `|ln q_n(B) / n - lambda_KL| > eps`.

use crate::enclosure::{floor_exp, Real};
use crate::error::{Error, Result};
use crate::farey::{cf_digits_u64, integer_sqrt, q_prefixes_u64};
use crate::rational::{rat_int, Rational};
use crate::workers::Pool;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[derive(Debug, Clone)]
pub struct DenomCensusReport {
    pub n_param: u64,
    pub epsilon: Rational,
    /// `floor(exp((lambda_KL + eps) N))`.
    pub m: u64,
    /// Checkpoint stride `floor(sqrt(N))`.
    pub stride: u64,
    pub total: u64,
    pub bad: u64,
    pub proportion: Rational,
    /// The qualitative target shape `log N / sqrt(N)`.
    pub predicted_shape: f64,
}

/// Exhaustive denominator-normality census over `F_m`. Refuses when the
/// derived `m` exceeds `cap`.
pub fn denominator_normal_census(
    n_param: u64,
    epsilon: &Rational,
    cap: u64,
    pool: &Pool,
) -> Result<DenomCensusReport> {
    if n_param < 1 {
        return Err(Error::domain("census needs N >= 1"));
    }
    let exponent = Real::Scale(
        rat_int(n_param as i64),
        Box::new(Real::Add(
            Box::new(Real::LambdaKl),
            Box::new(Real::rat(epsilon.clone())),
        )),
    );
    let m_big = floor_exp(&exponent)?;
    let m = m_big
        .to_u64()
        .ok_or_else(|| Error::refused("derived m exceeds u64", None))?;
    if m > cap {
        return Err(Error::refused(
            format!("derived m = {m} exceeds cap = {cap}"),
            Some(m as u128),
        ));
    }
    if m < 1 {
        return Err(Error::domain("derived m is zero"));
    }
    let stride = integer_sqrt(n_param).max(1);
    // Integer thresholds: a checkpoint at n is a violation iff
    // q_n > exp(n (lambda + eps)) or q_n < exp(n (lambda - eps)), i.e.
    // q_n >= hi_threshold(n) or q_n <= lo_threshold(n).
    let max_len = max_len_for(m);
    let mut checkpoints = Vec::new();
    let mut n = stride;
    while n as usize <= max_len {
        let hi_exp = Real::Scale(
            rat_int(n as i64),
            Box::new(Real::Add(
                Box::new(Real::LambdaKl),
                Box::new(Real::rat(epsilon.clone())),
            )),
        );
        let lo_exp = Real::Scale(
            rat_int(n as i64),
            Box::new(Real::Sub(
                Box::new(Real::LambdaKl),
                Box::new(Real::rat(epsilon.clone())),
            )),
        );
        let hi = floor_exp(&hi_exp)?
            .to_u64()
            .map(|v| v.saturating_add(1))
            .unwrap_or(u64::MAX);
        let lo = match floor_exp(&lo_exp) {
            Ok(v) => v.to_u64().unwrap_or(u64::MAX),
            Err(crate::error::Error::Domain(_)) => 0, // exponent below ln 1
            Err(e) => return Err(e),
        };
        checkpoints.push((n as usize, lo, hi));
        n += stride;
    }
    // enumerate F_m by denominator; 0/1 and 1/1 have no checkpoints <= |B|-2
    let (bad, total) = pool.run_reduce(
        1,
        m + 1,
        |from, to| {
            let mut bad = 0u64;
            let mut total = 0u64;
            let mut digits = Vec::with_capacity(64);
            let mut qs = Vec::with_capacity(64);
            for q in from..to {
                if q == 1 {
                    total += 2; // 0/1 and 1/1
                    continue;
                }
                for p in 1..q {
                    if num_integer::gcd(p, q) != 1 {
                        continue;
                    }
                    total += 1;
                    let mut is_bad = false;
                    'variants: for long in [false, true] {
                        cf_digits_u64(p, q, long, &mut digits);
                        if digits.len() < 2 {
                            continue;
                        }
                        q_prefixes_u64(&digits, &mut qs);
                        let limit = digits.len() - 2;
                        for &(n, lo, hi) in &checkpoints {
                            if n > limit {
                                break;
                            }
                            let qn = qs[n];
                            if qn <= lo || qn >= hi {
                                is_bad = true;
                                break 'variants;
                            }
                        }
                    }
                    if is_bad {
                        bad += 1;
                    }
                }
            }
            (bad, total)
        },
        (0u64, 0u64),
        |x, y| (x.0 + y.0, x.1 + y.1),
    );
    let nf = n_param as f64;
    Ok(DenomCensusReport {
        n_param,
        epsilon: epsilon.clone(),
        m,
        stride,
        total,
        bad,
        proportion: Rational::new(BigInt::from(bad), BigInt::from(total)),
        predicted_shape: nf.ln() / nf.sqrt(),
    })
}

/// Longest possible shortest-form expansion for denominators `<= m`.
fn max_len_for(m: u64) -> usize {
    let (mut a, mut b, mut n) = (1u64, 1u64, 1usize);
    while b <= m {
        let c = a + b;
        a = b;
        b = c;
        n += 1;
    }
    n + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_u64;

    #[test]
    fn derived_m_matches_constant() {
        // N = 4, eps = 1/2: m = floor(exp(4 (lambda_KL + 1/2))) = 850
        let pool = Pool::new(1);
        let r = denominator_normal_census(4, &rat_u64(1, 2), 2000, &pool).unwrap();
        assert_eq!(r.m, 850);
        assert_eq!(r.stride, 2);
        assert_eq!(r.total, crate::farey::farey_len(850));
        assert!(r.bad < r.total);
    }

    #[test]
    fn refusal_carries_m() {
        let pool = Pool::new(1);
        let err = denominator_normal_census(4, &rat_u64(1, 2), 100, &pool).unwrap_err();
        match err {
            crate::error::Error::Refused { estimated_cost, .. } => {
                assert_eq!(estimated_cost, Some(850));
            }
            other => panic!("expected refusal, got {other}"),
        }
    }

    #[test]
    fn worker_invariance() {
        let r1 = denominator_normal_census(4, &rat_u64(1, 2), 2000, &Pool::new(1)).unwrap();
        let r4 = denominator_normal_census(4, &rat_u64(1, 2), 2000, &Pool::new(4)).unwrap();
        assert_eq!(r1.bad, r4.bad);
        assert_eq!(r1.total, r4.total);
    }

    #[test]
    fn thresholds_match_certified_checker() {
        // The integer thresholds must reproduce the certified strict
        // comparison |ln q_n / n - lambda_KL| > eps checkpoint by
        // checkpoint. Cross-check over all fractions with q <= 61.
        use crate::normality::{check_denominator_normal, DenomDivisor};
        let eps = rat_u64(1, 2);
        let stride = 2usize;
        let mut digits = Vec::new();
        let mut qs = Vec::new();
        for (p, q) in crate::farey::farey_iter_u64(61) {
            if q == 1 {
                continue;
            }
            for long in [false, true] {
                cf_digits_u64(p, q, long, &mut digits);
                if digits.len() < 2 {
                    continue;
                }
                q_prefixes_u64(&digits, &mut qs);
                let limit = digits.len() - 2;
                // engine verdict via thresholds
                let mut engine_bad = false;
                let mut n = stride as u64;
                while n as usize <= limit {
                    let hi_exp = Real::Scale(
                        rat_int(n as i64),
                        Box::new(Real::Add(
                            Box::new(Real::LambdaKl),
                            Box::new(Real::rat(eps.clone())),
                        )),
                    );
                    let lo_exp = Real::Scale(
                        rat_int(n as i64),
                        Box::new(Real::Sub(
                            Box::new(Real::LambdaKl),
                            Box::new(Real::rat(eps.clone())),
                        )),
                    );
                    let hi = floor_exp(&hi_exp).unwrap().to_u64().unwrap() + 1;
                    let lo = match floor_exp(&lo_exp) {
                        Ok(v) => v.to_u64().unwrap(),
                        Err(_) => 0,
                    };
                    let qn = qs[n as usize];
                    if qn <= lo || qn >= hi {
                        engine_bad = true;
                    }
                    n += stride as u64;
                }
                // certified verdict on the truncated prefix
                let prefix = crate::cf::CfBlock::from_u64s(&digits[..limit]);
                let v = check_denominator_normal(&prefix, &eps, stride, DenomDivisor::PrefixLen)
                    .unwrap();
                assert_eq!(!v.pass, engine_bad, "p={p} q={q} long={long}");
            }
        }
    }
}
