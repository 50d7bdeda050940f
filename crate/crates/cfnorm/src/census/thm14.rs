//! Fixed-denominator normality census: for each `a` coprime to `d`, test
//! `(eps, u)`-normality of the CF expansion(s) of `a/d`, and fit the decay
//! of the failing proportion across denominators.

use crate::cf::CfBlock;
use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::farey::cf_digits_u64;
use crate::normality::ExpectedFrequency;
use crate::rational::{rat_int, Rational};
use crate::workers::Pool;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// How the two CF expansions of each fraction enter the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantPolicy {
    /// Test the short expansion only.
    Short,
    /// Test the long expansion only.
    Long,
    /// A fraction is bad when either expansion fails (the default).
    Either,
    /// A fraction is bad when both expansions fail.
    Both,
}

impl VariantPolicy {
    pub fn parse(s: &str) -> Result<VariantPolicy> {
        Ok(match s {
            "short" => VariantPolicy::Short,
            "long" => VariantPolicy::Long,
            "either" => VariantPolicy::Either,
            "both" => VariantPolicy::Both,
            other => return Err(Error::domain(format!("unknown policy {other:?}"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            VariantPolicy::Short => "short",
            VariantPolicy::Long => "long",
            VariantPolicy::Either => "either",
            VariantPolicy::Both => "both",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusRecord {
    pub d: u64,
    pub word: CfBlock,
    pub epsilon: Rational,
    pub policy: VariantPolicy,
    pub bad_count: u64,
    /// `phi(d)`, counted by the enumeration itself.
    pub total: u64,
    pub proportion: Rational,
}

/// Pass ranges for the occurrence count at each window size, fixed once
/// per census: `nu` passes at window `W` iff `ceil(W (mu - eps)) <= nu <=
/// floor(W (mu + eps))`, decided through the certified Gauss measure.
struct PassTable {
    u_digits: Vec<u64>,
    /// `by_window[W]` = inclusive pass range for window size `W >= 1`.
    by_window: Vec<(u64, u64)>,
}

impl PassTable {
    fn build(u: &CfBlock, epsilon: &Rational, max_len: usize) -> Result<PassTable> {
        let u_digits = u
            .digit_u64s()
            .ok_or_else(|| Error::domain("census word digit exceeds u64"))?;
        if u_digits.is_empty() {
            return Err(Error::domain("census word must be nonempty"));
        }
        let freq = ExpectedFrequency::for_cf_block(u)?;
        let mu = freq.as_real();
        let max_window = max_len.saturating_sub(u_digits.len()) + 1;
        let mut by_window = Vec::with_capacity(max_window + 1);
        by_window.push((1, 0)); // window 0: unused, empty range
        for w in 1..=max_window {
            let w_rat = rat_int(w as i64);
            let lo_val = Real::Sub(
                Box::new(Real::Scale(w_rat.clone(), Box::new(mu.clone()))),
                Box::new(Real::rat(&w_rat * epsilon)),
            );
            let hi_val = Real::Add(
                Box::new(Real::Scale(w_rat.clone(), Box::new(mu.clone()))),
                Box::new(Real::rat(&w_rat * epsilon)),
            );
            let lo = lo_val.certified_floor()?; // nu >= floor + 1 unless exact
            let lo = if lo.is_negative() {
                0u64
            } else {
                // W(mu - eps) is irrational here, so ceil = floor + 1
                (lo + BigInt::from(1)).to_u64().unwrap_or(u64::MAX)
            };
            let hi = hi_val.certified_floor()?;
            let hi = if hi.is_negative() {
                return Ok(PassTable {
                    u_digits,
                    by_window: vec![(1, 0); max_window + 1],
                });
            } else {
                hi.to_u64().unwrap_or(u64::MAX)
            };
            by_window.push((lo, hi.min(w as u64)));
        }
        Ok(PassTable {
            u_digits,
            by_window,
        })
    }

    /// Plain `(eps, u)`-normality of a digit slice.
    fn passes(&self, digits: &[u64]) -> bool {
        if digits.len() < self.u_digits.len() {
            return false; // short-word convention
        }
        let window = digits.len() - self.u_digits.len() + 1;
        let count = digits
            .windows(self.u_digits.len())
            .filter(|w| *w == self.u_digits.as_slice())
            .count() as u64;
        let (lo, hi) = self.by_window[window];
        count >= lo && count <= hi
    }
}

/// Longest possible CF expansion length for denominators up to `d` (the
/// all-ones block: Fibonacci denominators), plus the long-variant digit.
fn max_cf_len(d: u64) -> usize {
    let (mut a, mut b, mut n) = (1u64, 1u64, 1usize);
    while b <= d {
        let c = a + b;
        a = b;
        b = c;
        n += 1;
    }
    n + 1
}

/// Census of one denominator.
pub fn fixed_denominator_census(
    d: u64,
    u: &CfBlock,
    epsilon: &Rational,
    policy: VariantPolicy,
    pool: &Pool,
) -> Result<CensusRecord> {
    if d < 2 {
        return Err(Error::domain("census needs d >= 2"));
    }
    if !epsilon.is_positive() {
        return Err(Error::domain("epsilon must be > 0"));
    }
    let table = PassTable::build(u, epsilon, max_cf_len(d))?;
    let (bad, total) = pool.run_reduce(
        1,
        d,
        |from, to| {
            let mut bad = 0u64;
            let mut total = 0u64;
            let mut short = Vec::with_capacity(64);
            let mut long = Vec::with_capacity(64);
            for a in from..to {
                if num_integer::gcd(a, d) != 1 {
                    continue;
                }
                total += 1;
                let is_bad = match policy {
                    VariantPolicy::Short => {
                        cf_digits_u64(a, d, false, &mut short);
                        !table.passes(&short)
                    }
                    VariantPolicy::Long => {
                        cf_digits_u64(a, d, true, &mut long);
                        !table.passes(&long)
                    }
                    VariantPolicy::Either => {
                        cf_digits_u64(a, d, false, &mut short);
                        cf_digits_u64(a, d, true, &mut long);
                        !table.passes(&short) || !table.passes(&long)
                    }
                    VariantPolicy::Both => {
                        cf_digits_u64(a, d, false, &mut short);
                        cf_digits_u64(a, d, true, &mut long);
                        !table.passes(&short) && !table.passes(&long)
                    }
                };
                if is_bad {
                    bad += 1;
                }
            }
            (bad, total)
        },
        (0u64, 0u64),
        |x, y| (x.0 + y.0, x.1 + y.1),
    );
    Ok(CensusRecord {
        d,
        word: u.clone(),
        epsilon: epsilon.clone(),
        policy,
        bad_count: bad,
        total,
        proportion: Rational::new(BigInt::from(bad), BigInt::from(total)),
    })
}

/// Least-squares fit of `ln(proportion)` against `-ln d / ln ln d`; the
/// slope is the empirical exponent of the predicted decay
/// `d^(-eta / ln ln d)`.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub records: Vec<CensusRecord>,
    /// Slope of the fit; `None` when fewer than two usable points exist.
    pub fitted_eta: Option<f64>,
    pub intercept: Option<f64>,
    /// Residuals for the fitted records, in record order.
    pub residuals: Vec<f64>,
    pub degenerate: bool,
}

pub fn census_sweep(
    ds: &[u64],
    u: &CfBlock,
    epsilon: &Rational,
    policy: VariantPolicy,
    pool: &Pool,
    mut on_record: impl FnMut(&CensusRecord),
) -> Result<DecayFit> {
    if ds.is_empty() {
        return Err(Error::domain("census sweep needs at least one d"));
    }
    if ds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("census sweep needs strictly increasing d"));
    }
    let mut records = Vec::with_capacity(ds.len());
    for &d in ds {
        let record = fixed_denominator_census(d, u, epsilon, policy, pool)?;
        on_record(&record);
        records.push(record);
    }
    Ok(fit_decay(records))
}

/// Fit a record set directly; used to refit stable subranges (the
/// asymptotic form `-ln d / ln ln d` gives tiny denominators enormous
/// leverage, so sweeps with very small d are best refit above a cutoff).
pub fn fit_decay(records: Vec<CensusRecord>) -> DecayFit {
    // usable points: proportion > 0 and ln ln d defined and positive
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| !r.proportion.is_zero() && r.d >= 3)
        .map(|r| {
            let d = r.d as f64;
            let x = -d.ln() / d.ln().ln();
            let y = crate::rational::rat_to_f64(&r.proportion).ln();
            (x, y)
        })
        .collect();
    let distinct_x = {
        let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.len()
    };
    if distinct_x < 2 {
        return DecayFit {
            records,
            fitted_eta: None,
            intercept: None,
            residuals: Vec::new(),
            degenerate: true,
        };
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residuals = pts.iter().map(|p| p.1 - (slope * p.0 + intercept)).collect();
    DecayFit {
        records,
        fitted_eta: Some(slope),
        intercept: Some(intercept),
        residuals,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::totient_sieve;
    use crate::normality::{check_normal, cf_word, NormalitySpec, Target, Word};
    use crate::rational::rat_u64;

    fn u1() -> CfBlock {
        CfBlock::from_u64s(&[1])
    }

    #[test]
    fn census_d2() {
        // CF of 1/2 is [2]: zero occurrences of digit 1 against
        // m([1]) = 0.415: bad at eps = 1/10, fine at eps = 1/2
        let pool = Pool::new(1);
        let r = fixed_denominator_census(2, &u1(), &rat_u64(1, 10), VariantPolicy::Short, &pool)
            .unwrap();
        assert_eq!((r.bad_count, r.total), (1, 1));
        let r = fixed_denominator_census(2, &u1(), &rat_u64(1, 2), VariantPolicy::Short, &pool)
            .unwrap();
        assert_eq!((r.bad_count, r.total), (0, 1));
    }

    #[test]
    fn census_totals_are_totients() {
        let pool = Pool::new(1);
        let phi = totient_sieve(60);
        for d in [2u64, 12, 30, 59] {
            let r = fixed_denominator_census(d, &u1(), &rat_u64(1, 10), VariantPolicy::Either, &pool)
                .unwrap();
            assert_eq!(r.total, phi[d as usize]);
        }
    }

    #[test]
    fn long_word_target_marks_everything_bad() {
        let pool = Pool::new(1);
        // no CF expansion of a fraction with d = 10 reaches 30 digits
        let u = CfBlock::from_u64s(&[1; 30]);
        let r =
            fixed_denominator_census(10, &u, &rat_u64(1, 2), VariantPolicy::Either, &pool).unwrap();
        assert_eq!(r.bad_count, r.total);
    }

    #[test]
    fn census_agrees_with_check_normal() {
        // the machine-word pass table matches the certified checker
        let pool = Pool::new(1);
        for d in [7u64, 24, 53] {
            for (eps_n, eps_d) in [(1u64, 10u64), (1, 4), (1, 2)] {
                let eps = rat_u64(eps_n, eps_d);
                let r = fixed_denominator_census(d, &u1(), &eps, VariantPolicy::Short, &pool)
                    .unwrap();
                let mut bad = 0;
                for a in 1..d {
                    if num_integer::gcd(a, d) != 1 {
                        continue;
                    }
                    let b = crate::cf::cf_expand(&rat_u64(a, d), crate::cf::Variant::Short)
                        .unwrap();
                    let spec =
                        NormalitySpec::plain(eps.clone(), Target::Word(cf_word(&[1])));
                    if !check_normal(&Word::cf(b), &spec).unwrap().pass {
                        bad += 1;
                    }
                }
                assert_eq!(r.bad_count, bad, "d={d} eps={eps}");
            }
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        let pool = Pool::new(1);
        let mut last = u64::MAX;
        for eps_d in [20u64, 10, 5, 3, 2] {
            let r = fixed_denominator_census(
                101,
                &u1(),
                &rat_u64(1, eps_d),
                VariantPolicy::Either,
                &pool,
            )
            .unwrap();
            assert!(r.bad_count <= last);
            last = r.bad_count;
        }
    }

    #[test]
    fn policy_consistency() {
        let pool = Pool::new(1);
        let eps = rat_u64(1, 10);
        let d = 97;
        let short = fixed_denominator_census(d, &u1(), &eps, VariantPolicy::Short, &pool)
            .unwrap()
            .bad_count;
        let long = fixed_denominator_census(d, &u1(), &eps, VariantPolicy::Long, &pool)
            .unwrap()
            .bad_count;
        let either = fixed_denominator_census(d, &u1(), &eps, VariantPolicy::Either, &pool)
            .unwrap()
            .bad_count;
        let both = fixed_denominator_census(d, &u1(), &eps, VariantPolicy::Both, &pool)
            .unwrap()
            .bad_count;
        assert!(either <= short + long);
        assert!(both <= short.min(long));
        assert!(either >= short.max(long));
    }

    #[test]
    fn sweep_and_fit() {
        let pool = Pool::new(2);
        let ds: Vec<u64> = vec![3, 9, 27, 81, 243, 729];
        let mut streamed = 0;
        let fit = census_sweep(
            &ds,
            &u1(),
            &rat_u64(1, 10),
            VariantPolicy::Either,
            &pool,
            |_| streamed += 1,
        )
        .unwrap();
        assert_eq!(streamed, ds.len());
        assert!(!fit.degenerate);
        assert!(fit.fitted_eta.is_some());

        // single-d sweep is degenerate
        let fit = census_sweep(
            &[3],
            &u1(),
            &rat_u64(1, 10),
            VariantPolicy::Either,
            &pool,
            |_| {},
        )
        .unwrap();
        assert!(fit.degenerate);
        assert!(census_sweep(&[], &u1(), &rat_u64(1, 10), VariantPolicy::Either, &pool, |_| {})
            .is_err());
        assert!(census_sweep(
            &[5, 5],
            &u1(),
            &rat_u64(1, 10),
            VariantPolicy::Either,
            &pool,
            |_| {}
        )
        .is_err());
    }

    #[test]
    fn worker_count_invariance() {
        let eps = rat_u64(1, 10);
        let r1 = fixed_denominator_census(541, &u1(), &eps, VariantPolicy::Either, &Pool::new(1))
            .unwrap();
        let r4 = fixed_denominator_census(541, &u1(), &eps, VariantPolicy::Either, &Pool::new(4))
            .unwrap();
        assert_eq!(r1.bad_count, r4.bad_count);
        assert_eq!(r1.total, r4.total);
    }
}
