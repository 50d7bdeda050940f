//! Certified rational enclosures of the transcendental quantities the
//! library compares against: logarithms of rationals, pi, and the
//! Khinchin-Levy constant pi^2/(12 ln 2).
//!
//! Every comparison that mixes a rational with one of these values runs
//! through [`Real::certified_cmp`], which tightens the enclosure until the
//! comparison is decided or the precision cap is hit. The cap only matters
//! when the two sides are exactly equal, which for our operands would
//! require an algebraic relation none of them satisfy; hitting it is
//! reported as [`Error::Boundary`] and treated as a failure by callers.

use crate::error::{Error, Result};
use crate::rational::{rat_int, rat_to_f64, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Precision cap in bits for comparison refinement.
const CAP_BITS: u32 = 8192;

/// Requests at or below this precision are served from process-wide caches
/// (which hold much tighter enclosures than the requests need).
const CACHED_BITS: u32 = 96;

fn ln_cache() -> &'static Mutex<HashMap<Rational, Enclosure>> {
    static CACHE: OnceLock<Mutex<HashMap<Rational, Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_ln(x: &Rational) -> Enclosure {
    if let Some(e) = ln_cache().lock().unwrap().get(x) {
        return e.clone();
    }
    let e = ln_enclosure(x, CACHED_BITS);
    let mut guard = ln_cache().lock().unwrap();
    if guard.len() > 100_000 {
        guard.clear();
    }
    guard.insert(x.clone(), e.clone());
    e
}

fn cached_lambda_kl() -> &'static Enclosure {
    static LKL: OnceLock<Enclosure> = OnceLock::new();
    LKL.get_or_init(|| {
        let pi = pi_enclosure(CACHED_BITS);
        let pi2 = pi.mul(&pi);
        let ln2 = ln_enclosure(&rat_int(2), CACHED_BITS).scale(&rat_int(12));
        pi2.div(&ln2)
    })
}

/// A closed interval `[lo, hi]` of rationals certified to contain a value.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn point(r: Rational) -> Self {
        Enclosure {
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.midpoint())
    }

    fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    fn mul(&self, other: &Enclosure) -> Enclosure {
        let corners = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = corners.iter().min().unwrap().clone();
        let hi = corners.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    /// Interval division; the divisor must exclude zero.
    fn div(&self, other: &Enclosure) -> Enclosure {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "division by interval containing zero"
        );
        let corners = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        let lo = corners.iter().min().unwrap().clone();
        let hi = corners.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    fn scale(&self, c: &Rational) -> Enclosure {
        if c.is_negative() {
            Enclosure {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Enclosure {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Compare the enclosed value with `r`; `None` while undecided.
    fn cmp_rational(&self, r: &Rational) -> Option<Ordering> {
        if &self.hi < r {
            Some(Ordering::Less)
        } else if &self.lo > r {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && &self.lo == r {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

/// A real number built from the handful of forms the library needs, with
/// on-demand enclosures at any requested precision.
#[derive(Debug, Clone)]
pub enum Real {
    Rat(Rational),
    /// Natural log of a positive rational.
    Ln(Rational),
    Pi,
    /// pi^2 / (12 ln 2).
    LambdaKl,
    Add(Box<Real>, Box<Real>),
    Sub(Box<Real>, Box<Real>),
    Mul(Box<Real>, Box<Real>),
    Div(Box<Real>, Box<Real>),
    Scale(Rational, Box<Real>),
}

impl Real {
    pub fn rat(r: Rational) -> Self {
        Real::Rat(r)
    }

    pub fn ln(x: Rational) -> Self {
        assert!(x.is_positive(), "ln of non-positive rational");
        Real::Ln(x)
    }

    /// log2(x) as ln(x)/ln(2); exact powers of two short-circuit to a
    /// rational so that equality comparisons against them can close.
    pub fn log2(x: Rational) -> Self {
        assert!(x.is_positive(), "log2 of non-positive rational");
        let (n, d) = (x.numer(), x.denom());
        let n_mag = n.magnitude();
        let d_mag = d.magnitude();
        if n_mag.count_ones() == 1 && d_mag.count_ones() == 1 {
            let k = n_mag.bits() as i64 - 1 - (d_mag.bits() as i64 - 1);
            return Real::Rat(rat_int(k));
        }
        Real::Div(Box::new(Real::ln(x)), Box::new(Real::Ln(rat_int(2))))
    }

    pub fn enclose(&self, bits: u32) -> Enclosure {
        match self {
            Real::Rat(r) => Enclosure::point(r.clone()),
            Real::Ln(x) => {
                if bits <= CACHED_BITS {
                    cached_ln(x)
                } else {
                    ln_enclosure(x, bits)
                }
            }
            Real::Pi => pi_enclosure(bits),
            Real::LambdaKl => {
                if bits <= CACHED_BITS {
                    return cached_lambda_kl().clone();
                }
                let pi = pi_enclosure(bits);
                let pi2 = pi.mul(&pi);
                let ln2 = ln_enclosure(&rat_int(2), bits).scale(&rat_int(12));
                pi2.div(&ln2)
            }
            Real::Add(a, b) => a.enclose(bits).add(&b.enclose(bits)),
            Real::Sub(a, b) => a.enclose(bits).sub(&b.enclose(bits)),
            Real::Mul(a, b) => a.enclose(bits).mul(&b.enclose(bits)),
            Real::Div(a, b) => a.enclose(bits).div(&b.enclose(bits)),
            Real::Scale(c, a) => a.enclose(bits).scale(c),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).to_f64()
    }

    /// Certified comparison against a rational, refining up to the cap.
    pub fn certified_cmp(&self, r: &Rational) -> Result<Ordering> {
        let mut bits = 64;
        loop {
            if let Some(ord) = self.enclose(bits).cmp_rational(r) {
                return Ok(ord);
            }
            if bits >= CAP_BITS {
                return Err(Error::Boundary(format!(
                    "comparison undecided at {CAP_BITS} bits"
                )));
            }
            bits *= 2;
        }
    }

    /// Certified comparison of two constructed reals.
    pub fn certified_cmp_real(&self, other: &Real) -> Result<Ordering> {
        Real::Sub(Box::new(self.clone()), Box::new(other.clone())).certified_cmp(&Rational::zero())
    }

    /// Largest integer `<= self`, certified.
    pub fn certified_floor(&self) -> Result<BigInt> {
        let mut bits = 64;
        loop {
            let e = self.enclose(bits);
            let lo_floor = e.lo.floor().numer().clone();
            let next = rat_int(lo_floor.clone() + BigInt::one());
            if e.hi < next {
                return Ok(lo_floor);
            }
            if bits >= CAP_BITS {
                return Err(Error::Boundary(format!(
                    "floor undecided at {CAP_BITS} bits"
                )));
            }
            bits *= 2;
        }
    }
}

/// `floor(exp(x))` without ever forming `exp`: find the integer `m` with
/// `ln m <= x < ln(m+1)`.
pub fn floor_exp(x: &Real) -> Result<BigInt> {
    let est = x.to_f64();
    if !(est.is_finite()) || est > 700.0 {
        return Err(Error::domain("floor_exp argument out of supported range"));
    }
    if est < 0.0 {
        // x may still be >= 0; resolve by comparison with ln 1 = 0.
        if x.certified_cmp(&Rational::zero())? == Ordering::Less {
            return Ok(BigInt::zero());
        }
    }
    let mut m = BigInt::from(est.exp().floor().max(1.0) as u128);
    // Walk to the bracket ln m <= x < ln(m+1); the f64 seed is off by at
    // most a few steps at the magnitudes we use.
    loop {
        let ln_m = Real::ln(rat_int(m.clone()));
        if x.certified_cmp_real(&ln_m)? == Ordering::Less {
            m -= BigInt::one();
            if m.is_zero() {
                return Err(Error::domain("floor_exp of value below ln 1"));
            }
            continue;
        }
        let ln_m1 = Real::ln(rat_int(m.clone() + BigInt::one()));
        if x.certified_cmp_real(&ln_m1)? != Ordering::Less {
            m += BigInt::one();
            continue;
        }
        return Ok(m);
    }
}

/// Enclosure of ln(x) for rational x > 0 with tail below 2^-bits.
///
/// Range-reduce to y = x / 2^k in [1, 2), then atanh series at
/// z = (y-1)/(y+1) <= 1/3.
fn ln_enclosure(x: &Rational, bits: u32) -> Enclosure {
    assert!(x.is_positive());
    if x.is_one() {
        return Enclosure::point(Rational::zero());
    }
    // Seed k from bit lengths, then fix up by at most one step either way.
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = shift_down(x, k);
    let two = rat_int(2);
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < Rational::one() {
        y *= &two;
        k -= 1;
    }
    let ln_y = atanh_based_ln(&y, bits);
    if k == 0 {
        return ln_y;
    }
    let ln2 = ln2_enclosure(bits);
    ln_y.add(&ln2.scale(&rat_int(k)))
}

/// x / 2^k for possibly negative k.
fn shift_down(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        Rational::new(x.numer().clone(), x.denom().clone() << (k as usize))
    } else {
        Rational::new(x.numer().clone() << ((-k) as usize), x.denom().clone())
    }
}

fn ln2_enclosure(bits: u32) -> Enclosure {
    // ln 2 = 2 atanh(1/3)
    atanh_enclosure(&Rational::new(BigInt::one(), BigInt::from(3)), bits).scale(&rat_int(2))
}

/// ln(y) for y in [1, 2): 2*atanh((y-1)/(y+1)).
fn atanh_based_ln(y: &Rational, bits: u32) -> Enclosure {
    if y.is_one() {
        return Enclosure::point(Rational::zero());
    }
    let z = (y - Rational::one()) / (y + Rational::one());
    atanh_enclosure(&z, bits).scale(&rat_int(2))
}

/// atanh(z) = sum z^(2t+1)/(2t+1) for 0 < z <= 1/3, with a certified tail.
///
/// The partial sum accumulates unreduced (numerator, denominator) pairs;
/// one reduction happens at the end. This keeps the per-term cost at two
/// big multiplications instead of a gcd on ever-growing operands.
fn atanh_enclosure(z: &Rational, bits: u32) -> Enclosure {
    debug_assert!(z.is_positive() && *z <= Rational::new(BigInt::one(), BigInt::from(3)));
    let z2 = z * z;
    let (zn, zd) = (z.numer().clone(), z.denom().clone());
    let (z2n, z2d) = (z2.numer().clone(), z2.denom().clone());
    let mut term_n = zn; // z^(2t+1) as term_n / term_d, unreduced
    let mut term_d = zd;
    let mut sum_n = BigInt::zero();
    let mut sum_d = BigInt::one();
    let mut t: u32 = 0;
    let eps_den = BigInt::one() << bits.max(8);
    loop {
        // sum += term / (2t+1)
        let piece_d = &term_d * BigInt::from(2 * t as i64 + 1);
        sum_n = sum_n * &piece_d + &term_n * &sum_d;
        sum_d *= piece_d;
        term_n *= &z2n;
        term_d *= &z2d;
        t += 1;
        // tail <= term / ((2t+1)(1 - z^2)) = term_n z2d /
        // (term_d (2t+1)(z2d - z2n)); compare against 2^-bits by
        // cross-multiplication
        let one_minus_z2_n = &z2d - &z2n;
        let tail_den = &term_d * BigInt::from(2 * t as i64 + 1) * &one_minus_z2_n;
        if &term_n * &z2d * &eps_den <= tail_den {
            let sum = Rational::new(sum_n, sum_d);
            let tail = Rational::new(term_n * z2d, tail_den);
            return Enclosure {
                lo: sum.clone(),
                hi: sum + tail,
            };
        }
    }
}

/// Machin's formula with alternating-series brackets:
/// pi = 16 atan(1/5) - 4 atan(1/239).
fn pi_enclosure(bits: u32) -> Enclosure {
    let a5 = atan_enclosure(5u32, bits);
    let a239 = atan_enclosure(239u32, bits);
    a5.scale(&rat_int(16)).sub(&a239.scale(&rat_int(4)))
}

/// atan(1/n) via the alternating Maclaurin series; consecutive partial sums
/// bracket the value.
fn atan_enclosure(n: u32, bits: u32) -> Enclosure {
    let z = Rational::new(BigInt::one(), BigInt::from(n));
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = Rational::zero();
    let mut t: u32 = 0;
    let eps_den = BigInt::one() << bits.max(8);
    loop {
        let contribution = &term / rat_int(2 * t as i64 + 1);
        if t % 2 == 0 {
            sum += &contribution;
        } else {
            sum -= &contribution;
        }
        term *= &z2;
        t += 1;
        let next = &term / rat_int(2 * t as i64 + 1);
        if next <= Rational::new(BigInt::one(), eps_den.clone()) {
            // alternating, decreasing: value lies between sum and sum -/+ next
            return if t % 2 == 0 {
                Enclosure {
                    lo: sum.clone(),
                    hi: sum + next,
                }
            } else {
                Enclosure {
                    lo: &sum - &next,
                    hi: sum,
                }
            };
        }
    }
}
