//! Expected frequency `m(u)` of a word: `b^-|u|` in base b (exact), the
//! Gauss measure of the cylinder `C_u` for CF words (a certified real).

use crate::cf::{cylinder, CfBlock};
use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::normality::words::Word;
use crate::rational::{rat_to_f64, Rational};
use num_bigint::BigInt;
use std::cmp::Ordering;

#[derive(Debug, Clone)]
pub enum ExpectedFrequency {
    /// Exact `1 / base^len`.
    Base { base: u64, len: u32 },
    /// `log2(ratio)` with `ratio = (1 + hi)/(1 + lo)` of the cylinder.
    Cf { ratio: Rational },
}

impl ExpectedFrequency {
    pub fn for_word(u: &Word) -> Result<ExpectedFrequency> {
        if u.is_empty() {
            return Err(Error::domain("expected frequency of the empty word"));
        }
        match u {
            Word::Base { base, digits } => Ok(ExpectedFrequency::Base {
                base: *base,
                len: digits.len() as u32,
            }),
            Word::Cf(block) => Ok(ExpectedFrequency::Cf {
                ratio: cylinder(block).gauss_ratio,
            }),
        }
    }

    pub fn for_cf_block(block: &CfBlock) -> Result<ExpectedFrequency> {
        if block.is_empty() {
            return Err(Error::domain("expected frequency of the empty block"));
        }
        Ok(ExpectedFrequency::Cf {
            ratio: cylinder(block).gauss_ratio,
        })
    }

    /// The exact rational value, when one exists (base-b case).
    pub fn exact(&self) -> Option<Rational> {
        match self {
            ExpectedFrequency::Base { base, len } => Some(Rational::new(
                BigInt::from(1),
                BigInt::from(*base).pow(*len),
            )),
            ExpectedFrequency::Cf { .. } => None,
        }
    }

    pub fn as_real(&self) -> Real {
        match self {
            ExpectedFrequency::Base { .. } => Real::rat(self.exact().unwrap()),
            ExpectedFrequency::Cf { ratio } => Real::log2(ratio.clone()),
        }
    }

    pub fn approx_f64(&self) -> f64 {
        match self.exact() {
            Some(r) => rat_to_f64(&r),
            None => self.as_real().to_f64(),
        }
    }

    /// Certified comparison of the frequency against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Result<Ordering> {
        match self {
            ExpectedFrequency::Base { .. } => Ok(self.exact().unwrap().cmp(r)),
            ExpectedFrequency::Cf { ratio } => {
                // log2(ratio) vs r as ln(ratio) - r ln 2 vs 0: avoids
                // interval division
                let x = Real::Sub(
                    Box::new(Real::ln(ratio.clone())),
                    Box::new(Real::Scale(r.clone(), Box::new(Real::ln(Rational::new(
                        BigInt::from(2),
                        BigInt::from(1),
                    ))))),
                );
                x.certified_cmp(&Rational::new(BigInt::from(0), BigInt::from(1)))
            }
        }
    }

    /// Decide `|count/window - m(u)| <= epsilon` exactly.
    pub fn within_epsilon(&self, count: u64, window: u64, epsilon: &Rational) -> Result<bool> {
        debug_assert!(window >= 1);
        let freq = Rational::new(BigInt::from(count), BigInt::from(window));
        let lo = &freq - epsilon;
        let hi = &freq + epsilon;
        Ok(self.cmp_rational(&lo)? != Ordering::Less
            && self.cmp_rational(&hi)? != Ordering::Greater)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normality::words::cf_word;
    use crate::rational::rat_u64;

    #[test]
    fn base_frequency_is_exact() {
        let u = Word::base(2, vec![0, 1]).unwrap();
        let f = ExpectedFrequency::for_word(&u).unwrap();
        assert_eq!(f.exact(), Some(rat_u64(1, 4)));
        // |2/8 - 1/4| = 0 passes even at epsilon 0
        assert!(f.within_epsilon(2, 8, &rat_u64(0, 1)).unwrap());
        // |3/8 - 1/4| = 1/8 <= 1/8 passes (closed comparison)
        assert!(f.within_epsilon(3, 8, &rat_u64(1, 8)).unwrap());
        assert!(!f.within_epsilon(3, 8, &rat_u64(1, 9)).unwrap());
    }

    #[test]
    fn cf_frequency_certified() {
        // m([1]) = log2(4/3) = 0.41503749927884...
        let f = ExpectedFrequency::for_word(&cf_word(&[1])).unwrap();
        assert!(f.exact().is_none());
        assert!((f.approx_f64() - 0.415037499).abs() < 1e-8);
        // |1/2 - m| = 0.0849 <= 1/10
        assert!(f.within_epsilon(1, 2, &rat_u64(1, 10)).unwrap());
        // |0 - m| = 0.415 > 1/10
        assert!(!f.within_epsilon(0, 1, &rat_u64(1, 10)).unwrap());
    }

    #[test]
    fn base_frequencies_sum_to_one() {
        for (base, k) in [(2u64, 3u32), (3, 2), (5, 1)] {
            let mut sum = Rational::new(BigInt::from(0), BigInt::from(1));
            for u in Word::all_base_words(base, k) {
                sum += ExpectedFrequency::for_word(&u).unwrap().exact().unwrap();
            }
            assert_eq!(sum, Rational::new(BigInt::from(1), BigInt::from(1)));
        }
    }

    #[test]
    fn cf_frequencies_approach_one_from_below() {
        // rank-2 cylinders with digit cutoff D: sum of Lebesgue measures
        // grows toward 1; the excluded tail is exactly computable.
        let mut last = Rational::new(BigInt::from(0), BigInt::from(1));
        for cutoff in [2u64, 4, 8, 16] {
            let mut covered = Rational::new(BigInt::from(0), BigInt::from(1));
            for d1 in 1..=cutoff {
                for d2 in 1..=cutoff {
                    covered += cylinder(&CfBlock::from_u64s(&[d1, d2])).lebesgue;
                }
            }
            assert!(covered < Rational::new(BigInt::from(1), BigInt::from(1)));
            assert!(covered > last);
            last = covered;
        }
    }
}
