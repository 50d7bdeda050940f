//! Counting base-b strings that fail finite normality: the number of
//! length-l strings that are not `(eps, k)`-normal is exponentially thin,
//! and the stride/star variants thin at rate `b^(-delta m)`.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::workers::Pool;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeMode {
    Plain,
    Stride(usize),
    Star(usize),
}

impl CeMode {
    pub fn parse(s: &str) -> Result<CeMode> {
        if s == "plain" {
            return Ok(CeMode::Plain);
        }
        if let Some(m) = s.strip_prefix("stride:") {
            let m: usize = m
                .parse()
                .map_err(|_| Error::domain(format!("bad stride in mode {s:?}")))?;
            return Ok(CeMode::Stride(m));
        }
        if let Some(m) = s.strip_prefix("star:") {
            let m: usize = m
                .parse()
                .map_err(|_| Error::domain(format!("bad stride in mode {s:?}")))?;
            return Ok(CeMode::Star(m));
        }
        Err(Error::domain(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct CeReport {
    pub base: u64,
    pub len: usize,
    pub k: u32,
    pub mode: CeMode,
    /// Number of failing strings.
    pub count: u64,
    /// `base^len`.
    pub total: u64,
    /// `(l - log_b count)/l` for plain; `(l - log_b count)/m` for the
    /// stride and star modes. `None` when the count is zero.
    pub delta_empirical: Option<f64>,
}

/// Exact count of length-`len` base-`base` strings failing the selected
/// normality mode. Refuses when `base^len` exceeds `budget`.
pub fn ce_string_census(
    base: u64,
    len: usize,
    epsilon: &Rational,
    k: u32,
    mode: CeMode,
    budget: u64,
    pool: &Pool,
) -> Result<CeReport> {
    if base < 2 {
        return Err(Error::domain("base must be >= 2"));
    }
    if k == 0 || (k as usize) > len {
        return Err(Error::domain("need 1 <= k <= len"));
    }
    if !epsilon.is_positive() {
        return Err(Error::domain("epsilon must be > 0"));
    }
    let total = (base as u128).checked_pow(len as u32).ok_or_else(|| {
        Error::refused("base^len overflows the enumeration space", None)
    })?;
    if total > budget as u128 {
        return Err(Error::refused(
            format!("base^len = {total} exceeds the enumeration budget"),
            Some(total),
        ));
    }
    let total = total as u64;
    let word_count = (base as u128).pow(k);
    if word_count > 1 << 22 {
        return Err(Error::refused("b^k table too large", Some(word_count)));
    }
    let word_count = word_count as usize;

    // checkpoint prefix lengths per mode
    let checkpoints: Vec<usize> = match mode {
        CeMode::Plain => vec![len],
        CeMode::Stride(m) | CeMode::Star(m) => {
            if m < 1 {
                return Err(Error::domain("stride must be >= 1"));
            }
            (1..=len / m).map(|i| i * m).collect()
        }
    };
    // pass range of the count at each window size: nu/W within eps of b^-k
    let expected = Rational::new(BigInt::from(1), BigInt::from(base.pow(k)));
    let range_for = |window: u64| -> (u64, u64) {
        let w = Rational::new(BigInt::from(window), BigInt::from(1));
        let lo = &w * (&expected - epsilon);
        let hi = &w * (&expected + epsilon);
        let lo = if lo.is_negative() {
            0
        } else {
            lo.ceil().numer().to_u64().unwrap_or(u64::MAX)
        };
        let hi = hi.floor().numer().to_u64().unwrap_or(u64::MAX).min(window);
        (lo, hi)
    };
    let ranges: Vec<(usize, u64, u64)> = checkpoints
        .iter()
        .filter(|&&ell| ell >= k as usize)
        .map(|&ell| {
            let window = (ell - k as usize + 1) as u64;
            let (lo, hi) = range_for(window);
            (ell, lo, hi)
        })
        .collect();
    // checkpoints shorter than k fail everything by the short-word rule
    let impossible_checkpoint = checkpoints.iter().any(|&ell| ell < k as usize);

    let count = pool.run_reduce(
        0,
        total,
        |from, to| {
            let mut digits = vec![0u64; len];
            let mut counts = vec![0u64; word_count];
            let mut bad = 0u64;
            for code in from..to {
                decode(code, base, &mut digits);
                if impossible_checkpoint
                    || fails(&digits, base, k, &ranges, &mut counts)
                    || (matches!(mode, CeMode::Star(_)) && {
                        digits.reverse();
                        let f = fails(&digits, base, k, &ranges, &mut counts);
                        digits.reverse();
                        f
                    })
                {
                    bad += 1;
                }
            }
            bad
        },
        0u64,
        |a, b| a + b,
    );
    let delta_empirical = if count == 0 {
        None
    } else {
        let logb_count = (count as f64).ln() / (base as f64).ln();
        Some(match mode {
            CeMode::Plain => (len as f64 - logb_count) / len as f64,
            CeMode::Stride(m) | CeMode::Star(m) => (len as f64 - logb_count) / m as f64,
        })
    };
    Ok(CeReport {
        base,
        len,
        k,
        mode,
        count,
        total,
        delta_empirical,
    })
}

fn decode(code: u64, base: u64, digits: &mut [u64]) {
    let mut c = code;
    for slot in digits.iter_mut().rev() {
        *slot = c % base;
        c /= base;
    }
}

/// Does the string fail any checkpoint? `ranges` holds
/// `(prefix_len, lo, hi)` sorted by prefix length; counts are accumulated
/// incrementally along the string.
fn fails(digits: &[u64], base: u64, k: u32, ranges: &[(usize, u64, u64)], counts: &mut [u64]) -> bool {
    counts.fill(0);
    let k = k as usize;
    let mut rolling: usize = 0;
    let modulus = counts.len() / base as usize;
    let mut next_range = 0;
    for (i, &d) in digits.iter().enumerate() {
        rolling = (rolling % modulus.max(1)) * base as usize + d as usize;
        if i + 1 >= k {
            counts[rolling] += 1;
        }
        while next_range < ranges.len() && ranges[next_range].0 == i + 1 {
            let (_, lo, hi) = ranges[next_range];
            if counts.iter().any(|&c| c < lo || c > hi) {
                return true;
            }
            next_range += 1;
        }
    }
    false
}
