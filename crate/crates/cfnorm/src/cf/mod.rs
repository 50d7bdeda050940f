//! Finite blocks of continued-fraction digits and their exact arithmetic:
//! expansion of a rational, evaluation, convergent tables, reversal, and
//! the last convergent below a denominator threshold.

mod cylinder;
mod window;

pub use cylinder::{cylinder, cylinder_nonempty, CylinderInterval};
pub use window::{
    append_run_length_delta, base_digit_window, cylinder_digit_window, cylinder_window_length,
    to_digits_fixed, DigitWindow, Suffix,
};

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// A finite block of CF digits (partial quotients), each `>= 1`. The empty
/// block is permitted and evaluates to `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CfBlock {
    digits: Vec<BigUint>,
}

/// Which of the two finite CF expansions of a rational to produce: the
/// short form ends in a digit `> 1` (except for `[1]` itself), the long
/// form replaces that last digit `a` with `a-1, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Short,
    Long,
}

impl CfBlock {
    pub fn new(digits: Vec<BigUint>) -> Result<Self> {
        if digits.iter().any(|d| d.is_zero()) {
            return Err(Error::domain("CF digit must be >= 1"));
        }
        Ok(CfBlock { digits })
    }

    pub fn empty() -> Self {
        CfBlock { digits: Vec::new() }
    }

    pub fn from_u64s(digits: &[u64]) -> Self {
        assert!(digits.iter().all(|&d| d >= 1), "CF digit must be >= 1");
        CfBlock {
            digits: digits.iter().map(|&d| BigUint::from(d)).collect(),
        }
    }

    /// `k` copies of the digit 1.
    pub fn ones(k: usize) -> Self {
        CfBlock {
            digits: vec![BigUint::one(); k],
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    pub fn digit_u64s(&self) -> Option<Vec<u64>> {
        self.digits
            .iter()
            .map(|d| u64::try_from(d).ok())
            .collect()
    }

    pub fn push(&mut self, digit: BigUint) {
        assert!(!digit.is_zero(), "CF digit must be >= 1");
        self.digits.push(digit);
    }

    pub fn concat(&self, other: &CfBlock) -> CfBlock {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        CfBlock { digits }
    }

    pub fn prefix(&self, len: usize) -> CfBlock {
        CfBlock {
            digits: self.digits[..len].to_vec(),
        }
    }

    /// The last `len` digits, in order.
    pub fn suffix(&self, len: usize) -> CfBlock {
        CfBlock {
            digits: self.digits[self.digits.len() - len..].to_vec(),
        }
    }

    pub fn reversed(&self) -> CfBlock {
        CfBlock {
            digits: self.digits.iter().rev().cloned().collect(),
        }
    }

    pub fn starts_with(&self, prefix: &CfBlock) -> bool {
        self.digits.len() >= prefix.digits.len()
            && self.digits[..prefix.digits.len()] == prefix.digits[..]
    }
}

impl fmt::Display for CfBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in &self.digits {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for CfBlock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(CfBlock::empty());
        }
        let digits = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<BigUint>()
                    .map_err(|_| Error::domain(format!("bad CF digit {part:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CfBlock::new(digits)
    }
}

/// Convergent numerators and denominators of a block, indexed
/// `n = -1, 0, 1, ..., |B|` with the standard initial conditions
/// `p(-1)=1, p(0)=0, q(-1)=0, q(0)=1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn len(&self) -> usize {
        self.p.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numerator `p_n`, valid for `n` in `[-1, |B|]`.
    pub fn p_at(&self, n: i64) -> &BigInt {
        &self.p[(n + 1) as usize]
    }

    /// Denominator `q_n`, valid for `n` in `[-1, |B|]`.
    pub fn q_at(&self, n: i64) -> &BigInt {
        &self.q[(n + 1) as usize]
    }

    /// `p(B) = p_{|B|}`.
    pub fn p_final(&self) -> &BigInt {
        self.p.last().unwrap()
    }

    /// `q(B) = q_{|B|}`.
    pub fn q_final(&self) -> &BigInt {
        self.q.last().unwrap()
    }

    /// The convergent `p_n / q_n` as a rational, `n` in `[0, |B|]`.
    pub fn value_at(&self, n: i64) -> Rational {
        Rational::new(self.p_at(n).clone(), self.q_at(n).clone())
    }

    /// `r_B` in lowest terms (the recurrence guarantees reducedness).
    pub fn value(&self) -> Rational {
        Rational::new(self.p_final().clone(), self.q_final().clone())
    }
}

/// Convergent table of a block by the standard recurrence.
pub fn convergents(block: &CfBlock) -> ConvergentTable {
    let n = block.len();
    let mut p = Vec::with_capacity(n + 2);
    let mut q = Vec::with_capacity(n + 2);
    p.push(BigInt::one());
    p.push(BigInt::zero());
    q.push(BigInt::zero());
    q.push(BigInt::one());
    for d in block.digits() {
        let d = BigInt::from(d.clone());
        let pn = &d * &p[p.len() - 1] + &p[p.len() - 2];
        let qn = &d * &q[q.len() - 1] + &q[q.len() - 2];
        p.push(pn);
        q.push(qn);
    }
    ConvergentTable { p, q }
}

/// `r_B` by nested-fraction evaluation from the right. Kept independent of
/// the convergent recurrence so the two routes can check each other.
pub fn cf_eval(block: &CfBlock) -> Rational {
    let mut r = Rational::zero();
    for d in block.digits().iter().rev() {
        r = Rational::from_integer(BigInt::one())
            / (Rational::from_integer(BigInt::from(d.clone())) + r);
    }
    r
}

/// CF expansion of a rational in `(0, 1]`.
pub fn cf_expand(r: &Rational, variant: Variant) -> Result<CfBlock> {
    if !r.is_positive() || r > &Rational::one() {
        return Err(Error::domain(format!(
            "cf_expand domain is (0, 1], got {}/{}",
            r.numer(),
            r.denom()
        )));
    }
    let mut p = r.numer().to_biguint().expect("positive numerator");
    let mut q = r.denom().to_biguint().expect("positive denominator");
    let mut digits = Vec::new();
    while !p.is_zero() {
        let (a, rem) = num_integer::Integer::div_rem(&q, &p);
        digits.push(a);
        q = p;
        p = rem;
    }
    let mut block = CfBlock { digits };
    if variant == Variant::Long && !(block.len() == 1 && block.digits[0].is_one()) {
        let last = block.digits.pop().expect("nonempty expansion");
        debug_assert!(last >= BigUint::from(2u32), "short form ends in digit > 1");
        block.digits.push(last - BigUint::one());
        block.digits.push(BigUint::one());
    }
    Ok(block)
}

/// Numerator of `r_{B*}` together with the shared denominator `q(B)`.
///
/// `p*` is the unique integer in `[1, q]` with
/// `p(B) p* + (-1)^{|B|} = 0 (mod q)`.
pub fn reversal_numerator(block: &CfBlock) -> Result<(BigInt, BigInt)> {
    if block.is_empty() {
        return Err(Error::domain("reversal_numerator of the empty block"));
    }
    let table = convergents(&block.reversed());
    Ok((table.p_final().clone(), table.q_final().clone()))
}

/// Longest prefix whose convergent denominator does not exceed `m`,
/// returned as `(prefix_len, r_B(m))`. If even `a_1 > m` the prefix is the
/// empty block and the value is `0/1`.
pub fn last_convergent_at_most(block: &CfBlock, m: &BigInt) -> Result<(usize, Rational)> {
    if m < &BigInt::one() {
        return Err(Error::domain("last_convergent_at_most needs m >= 1"));
    }
    let table = convergents(block);
    let mut n = block.len() as i64;
    while table.q_at(n) > m {
        n -= 1;
    }
    debug_assert!(n >= 0, "q_0 = 1 <= m always");
    Ok((n as usize, table.value_at(n)))
}
