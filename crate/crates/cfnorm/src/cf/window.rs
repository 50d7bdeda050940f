//! Base-b digit windows determined by rational intervals.
//!
//! An interval `I` of measure `lambda` pins down roughly
//! `L_b(I) = -ceil(log_b lambda)` leading base-b digits of its points; the
//! shared digit prefix is `S_b(I)`. Both are computed by exact integer
//! comparison, never by floating-point logarithms.

use crate::cf::{cylinder, CfBlock};
use crate::error::{Error, Result};
use crate::rational::{floor_biguint, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// The base-b digit window of an interval: `length = L_b(I)` digits are
/// determined, with shared prefix value `prefix_value = S_b(I)`, so that
/// `I` is contained in `[S/b^L, (S+2)/b^L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitWindow {
    pub length: u64,
    pub prefix_value: BigUint,
    pub base: u64,
    /// True when `I` straddles `(S+1)/b^L`, so points of `I` may open with
    /// `S` or `S + 1`; run detection downstream must tolerate the off-by-one.
    pub ambiguous_tail: bool,
}

impl DigitWindow {
    /// `prefix_value` written out as exactly `length` base-b digits,
    /// most significant first, preserving leading zeros.
    pub fn digits(&self) -> Vec<u64> {
        to_digits_fixed(&self.prefix_value, self.base, self.length as usize)
    }
}

/// Integer `v` as exactly `len` base-b digits, most significant first.
pub fn to_digits_fixed(v: &BigUint, base: u64, len: usize) -> Vec<u64> {
    let b = BigUint::from(base);
    let mut digits = vec![0u64; len];
    let mut v = v.clone();
    for slot in digits.iter_mut().rev() {
        if v.is_zero() {
            break;
        }
        let (q, r) = num_integer::Integer::div_rem(&v, &b);
        *slot = u64::try_from(&r).expect("digit fits u64");
        v = q;
    }
    debug_assert!(v.is_zero(), "value has more than len digits");
    digits
}

/// Digit window of the half-open interval `[lo, hi)`, which must satisfy
/// `0 <= lo < hi <= 1`.
pub fn base_digit_window(lo: &Rational, hi: &Rational, base: u64) -> Result<DigitWindow> {
    if base < 2 {
        return Err(Error::domain("digit window base must be >= 2"));
    }
    if lo.is_negative() || hi > &Rational::one() || lo >= hi {
        return Err(Error::domain(
            "digit window needs an interval with 0 <= lo < hi <= 1",
        ));
    }
    let lambda = hi - lo;
    // L = largest t >= 0 with lambda <= b^-t, i.e. numer * b^t <= denom.
    let b = BigUint::from(base);
    let numer = lambda.numer().to_biguint().expect("positive measure");
    let denom = lambda.denom().to_biguint().expect("positive denominator");
    let mut length: u64 = 0;
    let mut scaled = numer * &b;
    while scaled <= denom {
        length += 1;
        scaled *= &b;
    }
    let scale = Rational::from_integer(BigInt::from(b.pow(
        u32::try_from(length).map_err(|_| Error::domain("digit window length overflow"))?,
    )));
    let prefix_value = floor_biguint(&(lo * &scale))?;
    let upper = Rational::new(
        BigInt::from(&prefix_value + BigUint::one()),
        scale.numer().clone(),
    );
    let ambiguous_tail = hi > &upper;
    debug_assert!(
        lo >= &Rational::new(BigInt::from(prefix_value.clone()), scale.numer().clone())
            && hi
                <= &Rational::new(
                    BigInt::from(&prefix_value + BigUint::from(2u32)),
                    scale.numer().clone()
                ),
        "window containment"
    );
    Ok(DigitWindow {
        length,
        prefix_value,
        base,
        ambiguous_tail,
    })
}

/// Digit window of a nonempty block's cylinder.
pub fn cylinder_digit_window(block: &CfBlock, base: u64) -> Result<DigitWindow> {
    if block.is_empty() {
        return Err(Error::domain("digit window of the empty-block cylinder"));
    }
    let c = cylinder(block);
    base_digit_window(&c.lo, &c.hi, base)
}

/// Suffix shapes for [`append_run_length_delta`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Suffix {
    /// `k` copies of the digit 1.
    Ones(u64),
    /// A single digit `d >= 1`.
    Digit(BigUint),
}

/// Exact `L_b(C_{B suffix}) - L_b(C_B)`.
///
/// Appending `(1)^k` moves the window length by `2k log_b(phi) + O(1)`;
/// appending a single digit `d` moves it by `2 log_b(d) + O(1)`. The return
/// value is the exact integer; the asymptotic forms are what the tests
/// measure it against.
pub fn append_run_length_delta(block: &CfBlock, suffix: &Suffix, base: u64) -> Result<i64> {
    if block.is_empty() {
        return Err(Error::domain("append_run_length_delta needs |B| >= 1"));
    }
    let before = cylinder_digit_window(block, base)?.length;
    let extended = match suffix {
        Suffix::Ones(k) => block.concat(&CfBlock::ones(*k as usize)),
        Suffix::Digit(d) => {
            if d.is_zero() {
                return Err(Error::domain("appended digit must be >= 1"));
            }
            let mut b = block.clone();
            b.push(d.clone());
            b
        }
    };
    let after = cylinder_digit_window(&extended, base)?.length;
    Ok(after as i64 - before as i64)
}

/// `L_b` of a nonempty block's cylinder; convenience for callers that do
/// not need the digit prefix.
pub fn cylinder_window_length(block: &CfBlock, base: u64) -> Result<u64> {
    Ok(cylinder_digit_window(block, base)?.length)
}
