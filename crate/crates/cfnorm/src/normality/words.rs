//! Words over either digit system: CF blocks or fixed-length base-b digit
//! strings. Base-b strings keep leading zeros; reversal is positional.

use crate::cf::CfBlock;
use crate::error::{Error, Result};
use num_bigint::BigUint;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Word {
    Cf(CfBlock),
    Base { base: u64, digits: Vec<u64> },
}

impl Word {
    pub fn base(base: u64, digits: Vec<u64>) -> Result<Word> {
        if base < 2 {
            return Err(Error::domain("word base must be >= 2"));
        }
        if digits.iter().any(|&d| d >= base) {
            return Err(Error::domain("digit out of range for base"));
        }
        Ok(Word::Base { base, digits })
    }

    pub fn cf(block: CfBlock) -> Word {
        Word::Cf(block)
    }

    pub fn len(&self) -> usize {
        match self {
            Word::Cf(b) => b.len(),
            Word::Base { digits, .. } => digits.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reversed(&self) -> Word {
        match self {
            Word::Cf(b) => Word::Cf(b.reversed()),
            Word::Base { base, digits } => Word::Base {
                base: *base,
                digits: digits.iter().rev().copied().collect(),
            },
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        match self {
            Word::Cf(b) => Word::Cf(b.prefix(len)),
            Word::Base { base, digits } => Word::Base {
                base: *base,
                digits: digits[..len].to_vec(),
            },
        }
    }

    pub fn same_system(&self, other: &Word) -> bool {
        match (self, other) {
            (Word::Cf(_), Word::Cf(_)) => true,
            (Word::Base { base: a, .. }, Word::Base { base: b, .. }) => a == b,
            _ => false,
        }
    }

    /// All base-b words of length `k`, lexicographic.
    pub fn all_base_words(base: u64, k: u32) -> Vec<Word> {
        let mut out = Vec::new();
        let mut digits = vec![0u64; k as usize];
        loop {
            out.push(Word::Base {
                base,
                digits: digits.clone(),
            });
            // odometer increment
            let mut i = k as usize;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < base {
                    break;
                }
                digits[i] = 0;
                if i == 0 {
                    return out;
                }
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Cf(b) => write!(f, "cf:{b}"),
            Word::Base { base, digits } => {
                write!(f, "b{base}:")?;
                if *base <= 10 {
                    for d in digits {
                        write!(f, "{d}")?;
                    }
                } else {
                    let mut first = true;
                    for d in digits {
                        if !first {
                            write!(f, ",")?;
                        }
                        write!(f, "{d}")?;
                        first = false;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Overlapping occurrences of `u` inside the first `ell` digits of `w`.
pub fn count_occurrences(w: &Word, u: &Word, ell: usize) -> Result<u64> {
    if ell > w.len() {
        return Err(Error::domain("count window exceeds word length"));
    }
    if !w.same_system(u) {
        return Err(Error::domain("count_occurrences across digit systems"));
    }
    if u.is_empty() {
        return Err(Error::domain("target word must be nonempty"));
    }
    Ok(match (w, u) {
        (Word::Cf(wb), Word::Cf(ub)) => count_slice(&wb.digits()[..ell], ub.digits()),
        (Word::Base { digits: wd, .. }, Word::Base { digits: ud, .. }) => {
            count_slice(&wd[..ell], ud)
        }
        _ => unreachable!(),
    })
}

fn count_slice<T: PartialEq>(hay: &[T], needle: &[T]) -> u64 {
    if needle.len() > hay.len() {
        return 0;
    }
    hay.windows(needle.len())
        .filter(|w| *w == needle)
        .count() as u64
}

/// CF word from u64 digits; convenience for tests and examples.
pub fn cf_word(digits: &[u64]) -> Word {
    Word::Cf(CfBlock::from_u64s(digits))
}

/// A CF digit as a word of length 1.
pub fn cf_digit_word(d: &BigUint) -> Word {
    Word::Cf(CfBlock::new(vec![d.clone()]).expect("digit >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_count(hay: &[u64], needle: &[u64]) -> u64 {
        let mut n = 0;
        for i in 0..hay.len() {
            if i + needle.len() <= hay.len() && &hay[i..i + needle.len()] == needle {
                n += 1;
            }
        }
        n
    }

    #[test]
    fn occurrence_examples() {
        let w = cf_word(&[1, 1, 2, 1, 1]);
        let u = cf_word(&[1, 1]);
        assert_eq!(count_occurrences(&w, &u, 5).unwrap(), 2);
        assert_eq!(count_occurrences(&w, &u, 2).unwrap(), 1);
        assert_eq!(count_occurrences(&w, &cf_word(&[9, 9, 9, 9, 9, 9]), 5).unwrap(), 0);
        assert!(count_occurrences(&w, &u, 6).is_err());

        let s = Word::base(2, vec![0, 1, 0, 1]).unwrap();
        let u01 = Word::base(2, vec![0, 1]).unwrap();
        assert_eq!(count_occurrences(&s, &u01, 4).unwrap(), 2);
    }

    #[test]
    fn counts_match_naive_scanner() {
        // deterministic pseudo-random words
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let wlen = (next() % 24) as usize;
            let w: Vec<u64> = (0..wlen).map(|_| next() % 3).collect();
            let ulen = 1 + (next() % 3) as usize;
            let u: Vec<u64> = (0..ulen).map(|_| next() % 3).collect();
            let ww = Word::base(3, w.clone()).unwrap();
            let uw = Word::base(3, u.clone()).unwrap();
            assert_eq!(
                count_occurrences(&ww, &uw, wlen).unwrap(),
                naive_count(&w, &u)
            );
        }
    }

    #[test]
    fn all_words_enumeration() {
        let ws = Word::all_base_words(2, 2);
        assert_eq!(ws.len(), 4);
        assert_eq!(
            ws[0],
            Word::Base {
                base: 2,
                digits: vec![0, 0]
            }
        );
        assert_eq!(Word::all_base_words(3, 3).len(), 27);
        assert_eq!(Word::all_base_words(5, 0).len(), 1); // the empty word
    }

    #[test]
    fn base_word_validation() {
        assert!(Word::base(2, vec![0, 2]).is_err());
        assert!(Word::base(1, vec![0]).is_err());
        let w = Word::base(2, vec![0, 0, 1]).unwrap();
        assert_eq!(w.reversed(), Word::base(2, vec![1, 0, 0]).unwrap());
    }
}
