//! Cylinder sets of CF blocks as exact rational intervals.

use crate::cf::{convergents, CfBlock};
use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::rational::{rat_int, Rational};
use num_traits::{One, Signed, Zero};

/// The set of `x` in `[0, 1)` whose CF expansion begins with a block `B`,
/// as an interval with exact endpoints.
///
/// The endpoints are `r_B` and the mediant `(p(B') + p(B)) / (q(B') + q(B))`
/// (`B'` = `B` without its last digit); the parity of `|B|` decides which is
/// lower. Membership is half-open with the closed end at `r_B`: each
/// boundary rational, which has one expansion starting with `B` and one
/// that does not, is assigned to the cylinder whose block is a full
/// expansion of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderInterval {
    pub lo: Rational,
    pub hi: Rational,
    /// Parity of `|B|`; even means `r_B` is the lower endpoint.
    pub parity_even: bool,
    /// Exact Lebesgue measure `hi - lo = 1/((q(B') + q(B)) q(B))`.
    pub lebesgue: Rational,
    /// `(1 + hi)/(1 + lo)`; the Gauss measure is `log2` of this.
    pub gauss_ratio: Rational,
    /// Set for the empty block, whose cylinder is all of `[0, 1)`.
    pub degenerate_full: bool,
    r_b: Rational,
}

impl CylinderInterval {
    /// The endpoint equal to `r_B` (the closed end).
    pub fn r_b(&self) -> &Rational {
        &self.r_b
    }

    /// Gauss measure `log2(gauss_ratio)` as a certified real.
    pub fn gauss_measure(&self) -> Real {
        Real::log2(self.gauss_ratio.clone())
    }

    /// Membership under the closed-at-`r_B` convention. `x = 1` is never a
    /// member because the ambient space is `[0, 1)`.
    pub fn contains(&self, x: &Rational) -> bool {
        if self.degenerate_full {
            return !x.is_negative() && x < &Rational::one();
        }
        if x < &self.lo || x > &self.hi {
            return false;
        }
        if x > &self.lo && x < &self.hi {
            return true;
        }
        x == &self.r_b && x < &Rational::one()
    }
}

/// Cylinder interval of a block. The empty block yields the full interval
/// `[0, 1)`, flagged as degenerate.
pub fn cylinder(block: &CfBlock) -> CylinderInterval {
    if block.is_empty() {
        return CylinderInterval {
            lo: Rational::zero(),
            hi: Rational::one(),
            parity_even: true,
            lebesgue: Rational::one(),
            gauss_ratio: rat_int(2),
            degenerate_full: true,
            r_b: Rational::zero(),
        };
    }
    let table = convergents(block);
    let n = block.len() as i64;
    let p = table.p_at(n).clone();
    let q = table.q_at(n).clone();
    let p_prev = table.p_at(n - 1).clone();
    let q_prev = table.q_at(n - 1).clone();
    let r_b = Rational::new(p.clone(), q.clone());
    let mediant = Rational::new(&p_prev + &p, &q_prev + &q);
    let parity_even = block.len() % 2 == 0;
    let (lo, hi) = if parity_even {
        (r_b.clone(), mediant)
    } else {
        (mediant, r_b.clone())
    };
    let lebesgue = Rational::new(num_bigint::BigInt::one(), (&q_prev + &q) * &q);
    debug_assert_eq!(lebesgue, &hi - &lo);
    let gauss_ratio = (Rational::one() + &hi) / (Rational::one() + &lo);
    CylinderInterval {
        lo,
        hi,
        parity_even,
        lebesgue,
        gauss_ratio,
        degenerate_full: false,
        r_b,
    }
}

/// Cylinder of a block required to be nonempty.
pub fn cylinder_nonempty(block: &CfBlock) -> Result<CylinderInterval> {
    if block.is_empty() {
        return Err(Error::domain("cylinder of the empty block is degenerate"));
    }
    Ok(cylinder(block))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_expand, Variant};
    use crate::rational::rat_u64;

    fn block(digits: &[u64]) -> CfBlock {
        CfBlock::from_u64s(digits)
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&block(&[1, 2]));
        assert_eq!((c.lo.clone(), c.hi.clone()), (rat_u64(2, 3), rat_u64(3, 4)));
        assert_eq!(c.lebesgue, rat_u64(1, 12));
        assert_eq!(c.gauss_ratio, rat_u64(21, 20));

        let c = cylinder(&block(&[2, 1]));
        assert_eq!((c.lo.clone(), c.hi.clone()), (rat_u64(1, 3), rat_u64(2, 5)));
        assert_eq!(c.lebesgue, rat_u64(1, 15));
        // same Gauss ratio as its reversal [1,2], different Lebesgue measure
        assert_eq!(c.gauss_ratio, rat_u64(21, 20));

        let c = cylinder(&block(&[1]));
        assert_eq!((c.lo.clone(), c.hi.clone()), (rat_u64(1, 2), rat_u64(1, 1)));
        assert_eq!(c.lebesgue, rat_u64(1, 2));
        assert_eq!(c.gauss_ratio, rat_u64(4, 3));

        let c = cylinder(&CfBlock::empty());
        assert!(c.degenerate_full);
        assert_eq!(c.lebesgue, Rational::one());
    }

    #[test]
    fn lebesgue_q_squared_in_half_one() {
        for digits in [
            vec![1u64],
            vec![2],
            vec![1, 2],
            vec![3, 1, 4],
            vec![1, 1, 1, 1, 1],
            vec![7, 3, 2, 5],
        ] {
            let b = block(&digits);
            let c = cylinder(&b);
            let q = convergents(&b).q_final().clone();
            let v = &c.lebesgue * Rational::from_integer(&q * &q);
            assert!(v >= rat_u64(1, 2) && v <= Rational::one(), "{digits:?}");
        }
    }

    #[test]
    fn membership_matches_expansion_prefix() {
        // For every rational x = a/q and small block B: x is a member iff
        // one of x's expansions starts with B, except the mediant endpoint
        // r_{B1}, which belongs to the adjacent cylinder.
        let blocks: Vec<CfBlock> = [
            vec![1u64],
            vec![2],
            vec![3],
            vec![1, 1],
            vec![1, 2],
            vec![2, 1],
            vec![1, 2, 3],
        ]
        .iter()
        .map(|d| block(d))
        .collect();
        for b in &blocks {
            let c = cylinder(b);
            let mediant = if c.parity_even { &c.hi } else { &c.lo };
            for q in 1u64..=30 {
                for a in 0..q {
                    if num_integer::gcd(a, q) != 1 {
                        continue;
                    }
                    let x = rat_u64(a, q);
                    let prefixed = if x.is_zero() {
                        b.is_empty()
                    } else {
                        cf_expand(&x, Variant::Short).unwrap().starts_with(b)
                            || cf_expand(&x, Variant::Long).unwrap().starts_with(b)
                    };
                    let expect = prefixed && &x != mediant;
                    assert_eq!(c.contains(&x), expect, "B={b} x={a}/{q}");
                }
            }
        }
    }

    #[test]
    fn parity_orientation() {
        // odd-length blocks have r_B as the upper endpoint
        let c = cylinder(&block(&[3]));
        assert_eq!(c.r_b(), &rat_u64(1, 3));
        assert_eq!(c.hi, rat_u64(1, 3));
        assert!(c.contains(&rat_u64(1, 3)));
        assert!(!c.contains(&rat_u64(1, 4)));
        // even-length: r_B is the lower endpoint
        let c = cylinder(&block(&[1, 1, 1, 1]));
        assert_eq!((c.lo.clone(), c.hi.clone()), (rat_u64(3, 5), rat_u64(5, 8)));
        assert!(c.contains(&rat_u64(3, 5)));
        assert!(!c.contains(&rat_u64(5, 8)));
    }
}
