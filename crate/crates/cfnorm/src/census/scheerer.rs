//! Enclosure of the Gauss measure of the set of points whose first `n` CF
//! digits form a non-`(eps, A)`-normal block.
//!
//! The rank-`n` cylinders with all digits at most `cap` are enumerated
//! exactly; the failing ones contribute a lower bound, and the mass not
//! covered by any capped cylinder widens the upper bound. Gauss measures
//! are summed in log space: the product of the cylinder ratios is tracked
//! as a directed-rounded dyadic interval, and one certified `log2` at the
//! end converts it back.

use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::rational::{rat_int, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

const PROD_BITS: u64 = 192;

#[derive(Debug, Clone, Copy)]
pub struct ScheererOptions {
    pub digit_cap: u64,
    /// Refuse when the capped tree has more nodes than this.
    pub node_budget: u128,
}

impl Default for ScheererOptions {
    fn default() -> Self {
        ScheererOptions {
            digit_cap: 10,
            node_budget: 100_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScheererEnclosure {
    pub lower: Rational,
    pub upper: Rational,
    pub failing_leaves: u64,
    pub total_leaves: u64,
}

/// Enclose the Gauss measure of the non-`(eps, A)`-normal set at depth `n`.
pub fn scheerer_measure(
    epsilon: &Rational,
    a_digits: &[u64],
    n: usize,
    options: &ScheererOptions,
) -> Result<ScheererEnclosure> {
    if a_digits.is_empty() || a_digits.iter().any(|&d| d == 0) {
        return Err(Error::domain("target block must be nonempty with digits >= 1"));
    }
    if n < 2 * (a_digits.len() + 1) {
        return Err(Error::domain("need n >= 2(|A| + 1)"));
    }
    if !epsilon.is_positive() {
        return Err(Error::domain("epsilon must be > 0"));
    }
    let cap = options.digit_cap;
    if cap < 1 {
        return Err(Error::domain("digit cap must be >= 1"));
    }
    // refuse over-budget enumerations up front
    let mut nodes: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..n {
        level = level.saturating_mul(cap as u128);
        nodes = nodes.saturating_add(level);
    }
    if nodes > options.node_budget {
        return Err(Error::refused(
            "capped cylinder tree exceeds the node budget",
            Some(nodes),
        ));
    }
    // certified pass range for the occurrence count
    let window = (n - a_digits.len() + 1) as i64;
    let mu = Real::log2(crate::cf::cylinder(&crate::cf::CfBlock::from_u64s(a_digits)).gauss_ratio);
    let lo_real = Real::Sub(
        Box::new(Real::Scale(rat_int(window), Box::new(mu.clone()))),
        Box::new(Real::rat(rat_int(window) * epsilon)),
    );
    let hi_real = Real::Add(
        Box::new(Real::Scale(rat_int(window), Box::new(mu))),
        Box::new(Real::rat(rat_int(window) * epsilon)),
    );
    let nu_lo = {
        let f = lo_real.certified_floor()?;
        if f.is_negative() {
            0i64
        } else {
            f.to_i64().unwrap_or(i64::MAX) + 1 // irrational bound: ceil = floor + 1
        }
    };
    let nu_hi = hi_real.certified_floor()?.to_i64().unwrap_or(i64::MAX);
    if nu_lo <= 0 && nu_hi >= window {
        // every depth-n block passes: the non-normal set is empty
        return Ok(ScheererEnclosure {
            lower: Rational::zero(),
            upper: Rational::zero(),
            failing_leaves: 0,
            total_leaves: 0,
        });
    }
    let mut walker = Walker {
        n,
        cap,
        a: a_digits,
        nu_lo,
        nu_hi,
        digits: Vec::with_capacity(n),
        fail_prod: DyInterval::one(),
        all_prod: DyInterval::one(),
        failing_leaves: 0,
        total_leaves: 0,
    };
    walker.descend(0, 1, 0, 0, 1, 0);
    let fail = walker.fail_prod.log2()?;
    let all = walker.all_prod.log2()?;
    let lower = fail.0.max(Rational::zero());
    let upper = (fail.1 + (rat_int(1) - all.0)).min(rat_int(1));
    Ok(ScheererEnclosure {
        lower,
        upper,
        failing_leaves: walker.failing_leaves,
        total_leaves: walker.total_leaves,
    })
}

struct Walker<'a> {
    n: usize,
    cap: u64,
    a: &'a [u64],
    nu_lo: i64,
    nu_hi: i64,
    digits: Vec<u64>,
    fail_prod: DyInterval,
    all_prod: DyInterval,
    failing_leaves: u64,
    total_leaves: u64,
}

impl Walker<'_> {
    /// Depth-first over capped blocks, carrying the convergent state
    /// `(p_prev, p, q_prev, q)` and the running occurrence count `nu`.
    fn descend(&mut self, depth: usize, p_prev: u64, p: u64, q_prev: u64, q: u64, nu: i64) {
        if depth == self.n {
            // endpoints r_B = p/q and the mediant; ratio (1+hi)/(1+lo)
            let (hi_n, hi_d, lo_n, lo_d) = if self.n % 2 == 0 {
                (p + p_prev, q + q_prev, p, q)
            } else {
                (p, q, p + p_prev, q + q_prev)
            };
            let num = (hi_n as u128 + hi_d as u128) * lo_d as u128;
            let den = hi_d as u128 * (lo_n as u128 + lo_d as u128);
            self.total_leaves += 1;
            self.all_prod.mul_fraction(num, den);
            if nu < self.nu_lo || nu > self.nu_hi {
                self.failing_leaves += 1;
                self.fail_prod.mul_fraction(num, den);
            }
            return;
        }
        for d in 1..=self.cap {
            let p_new = d * p + p_prev;
            let q_new = d * q + q_prev;
            self.digits.push(d);
            let inc = if self.digits.len() >= self.a.len()
                && self.digits[self.digits.len() - self.a.len()..] == *self.a
            {
                1
            } else {
                0
            };
            self.descend(depth + 1, p, p_new, q, q_new, nu + inc);
            self.digits.pop();
        }
    }
}

/// A positive value enclosed by directed-rounded dyadic bounds
/// `mant * 2^exp` with mantissas capped at `PROD_BITS` bits.
#[derive(Debug, Clone)]
struct DyInterval {
    lo_m: BigUint,
    lo_e: i64,
    hi_m: BigUint,
    hi_e: i64,
}

impl DyInterval {
    fn one() -> Self {
        // mantissas live near PROD_BITS bits so every directed rounding
        // loses at most 2^-PROD_BITS relative accuracy
        DyInterval {
            lo_m: BigUint::one() << PROD_BITS,
            lo_e: -(PROD_BITS as i64),
            hi_m: BigUint::one() << PROD_BITS,
            hi_e: -(PROD_BITS as i64),
        }
    }

    /// Multiply by the exact fraction `num/den` with outward rounding.
    fn mul_fraction(&mut self, num: u128, den: u128) {
        let num_b = BigUint::from(num);
        let den_b = BigUint::from(den);
        self.lo_m = (&self.lo_m * &num_b) / &den_b;
        self.hi_m = (&self.hi_m * &num_b + (&den_b - BigUint::one())) / &den_b;
        let bits = self.lo_m.bits();
        if bits > PROD_BITS {
            let s = bits - PROD_BITS;
            self.lo_m = &self.lo_m >> s;
            self.lo_e += s as i64;
        } else if bits < PROD_BITS {
            let s = PROD_BITS - bits;
            self.lo_m = &self.lo_m << s;
            self.lo_e -= s as i64;
        }
        let bits = self.hi_m.bits();
        if bits > PROD_BITS {
            let s = bits - PROD_BITS;
            let mask = (BigUint::one() << s) - BigUint::one();
            let round_up = !(&self.hi_m & &mask).is_zero();
            self.hi_m = &self.hi_m >> s;
            if round_up {
                self.hi_m += BigUint::one();
            }
            self.hi_e += s as i64;
        } else if bits < PROD_BITS {
            let s = PROD_BITS - bits;
            self.hi_m = &self.hi_m << s;
            self.hi_e -= s as i64;
        }
    }

    /// Certified `log2` of the enclosed interval.
    fn log2(&self) -> Result<(Rational, Rational)> {
        let lo = Real::log2(Rational::new(BigInt::from(self.lo_m.clone()), BigInt::one()))
            .enclose(128);
        let hi = Real::log2(Rational::new(BigInt::from(self.hi_m.clone()), BigInt::one()))
            .enclose(128);
        Ok((
            lo.lo + rat_int(self.lo_e),
            hi.hi + rat_int(self.hi_e),
        ))
    }
}
