//! Exact rational values and their canonical `"p/q"` text form.
//!
//! All fractions in this crate are reduced with a positive denominator;
//! `num_rational::BigRational` maintains that invariant for us.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat_u64(p: u64, q: u64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical serialization: `"p/q"` in lowest terms, `q >= 1`; integers keep
/// an explicit `/1` so the format round-trips bit-for-bit.
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"` or a bare integer `"p"`.
pub fn rat_from_str(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::domain(format!("bad rational numerator {num:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::domain(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::domain("rational with zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Floor of a nonnegative rational as an unsigned integer.
pub fn floor_biguint(r: &Rational) -> Result<BigUint> {
    if r.is_negative() {
        return Err(Error::domain("floor_biguint on negative rational"));
    }
    Ok(r.floor().numer().to_biguint().expect("nonnegative floor"))
}

/// Render to `sig` significant decimal digits, deterministically.
///
/// Used for human-facing numeric columns; machine output carries the exact
/// `"p/q"` string instead.
pub fn rat_to_sig_digits(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = 0;
    let ten = rat_int(10);
    let mut t = a.clone();
    if t >= one() {
        while t >= ten {
            t /= ten.clone();
            e += 1;
        }
    } else {
        while t < one() {
            t *= ten.clone();
            e -= 1;
        }
    }
    // round a * 10^(sig-1-e) to nearest integer (ties away from zero)
    let shift = sig as i64 - 1 - e;
    let scaled = if shift >= 0 {
        a.clone() * ten.pow(shift as i32)
    } else {
        a.clone() / ten.pow((-shift) as i32)
    };
    let mut digits = (scaled + Rational::new(BigInt::from(1), BigInt::from(2)))
        .floor()
        .numer()
        .clone();
    // rounding may carry into an extra digit (e.g. 9.99 -> 10.0)
    let limit = BigInt::from(10).pow(sig as u32);
    let mut e = e;
    if digits >= limit {
        digits /= BigInt::from(10);
        e += 1;
    }
    let ds = digits.to_string();
    let mantissa = if ds.len() > 1 {
        format!("{}.{}", &ds[..1], &ds[1..])
    } else {
        ds
    };
    let sign = if neg { "-" } else { "" };
    format!("{sign}{mantissa}e{e}")
}

/// Nearest-f64 view of a rational; fine for diagnostics, never for decisions.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let approx = Rational::new(
            r.numer() * BigInt::from(1u64 << 53) / r.denom(),
            BigInt::from(1u64 << 53),
        );
        approx.to_f64().unwrap_or(f64::NAN)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["7/10", "0/1", "1/1", "-3/4", "5/1"] {
            let r = rat_from_str(s).unwrap();
            let back = rat_to_string(&r);
            let r2 = rat_from_str(&back).unwrap();
            assert_eq!(r, r2);
        }
        assert_eq!(rat_to_string(&rat_from_str("14/20").unwrap()), "7/10");
        assert_eq!(rat_to_string(&rat_from_str("3").unwrap()), "3/1");
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x/2").is_err());
    }

    #[test]
    fn sig_digit_rendering() {
        assert_eq!(rat_to_sig_digits(&rat_u64(1, 3), 5), "3.3333e-1");
        assert_eq!(rat_to_sig_digits(&rat_u64(2, 1), 3), "2.00e0");
        assert_eq!(rat_to_sig_digits(&rat_u64(999, 1000), 2), "1.0e0");
        assert_eq!(
            rat_to_sig_digits(&(-rat_u64(12345, 100)), 4),
            "-1.235e2".to_string()
        );
    }
}
