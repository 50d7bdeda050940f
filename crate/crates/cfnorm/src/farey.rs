//! Farey-sequence structure: ordered enumeration, neighbor lookup, the CF
//! forms of neighbors, the comparison of a point against the enclosing
//! Farey pair, and coprime-residue counts inside Farey gaps.

use crate::cf::{cf_expand, convergents, last_convergent_at_most, CfBlock, Variant};
use crate::error::{Error, Result};
use crate::rational::{rat_int, Rational};
use crate::workers::Pool;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Two consecutive elements of `F_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyNeighborPair {
    pub left: Rational,
    pub right: Rational,
    pub order: u64,
}

impl FareyNeighborPair {
    /// `Q P' - P Q'`, which is 1 exactly for a consecutive pair.
    pub fn unimodular_form(&self) -> BigInt {
        self.left.denom() * self.right.numer() - self.left.numer() * self.right.denom()
    }

    pub fn gap(&self) -> Rational {
        &self.right - &self.left
    }
}

/// The consecutive pairs around an element of `F_m`; the endpoints `0/1`
/// and `1/1` come back one-sided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySides {
    pub predecessor: Option<FareyNeighborPair>,
    pub successor: Option<FareyNeighborPair>,
}

/// Iterator over `F_m` as `(p, q)` in lowest terms, increasing, from `0/1`
/// to `1/1`, by the standard next-term recurrence. O(1) state.
pub fn farey_iter_u64(m: u64) -> FareyIterU64 {
    assert!(m >= 1);
    FareyIterU64 {
        m,
        cur: Some((0, 1)),
        next: (1, m),
    }
}

pub struct FareyIterU64 {
    m: u64,
    cur: Option<(u64, u64)>,
    next: (u64, u64),
}

impl Iterator for FareyIterU64 {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        let out = self.cur?;
        if out == (1, 1) {
            self.cur = None;
            return Some(out);
        }
        let (p0, q0) = out;
        let (p1, q1) = self.next;
        let k = (self.m + q0) / q1;
        self.cur = Some((p1, q1));
        self.next = (k * p1 - p0, k * q1 - q0);
        Some(out)
    }
}

/// `F_m` as exact rationals, increasing.
pub fn farey_iter(m: u64) -> impl Iterator<Item = Rational> {
    farey_iter_u64(m).map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// `|F_m| = 1 + sum of phi(q) for q <= m`.
pub fn farey_len(m: u64) -> u64 {
    let phi = crate::census::totient_sieve(m);
    1 + (1..=m).map(|q| phi[q as usize]).sum::<u64>()
}

fn require_in_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || x > &Rational::one() {
        return Err(Error::domain("fraction outside [0, 1]"));
    }
    Ok(())
}

/// Predecessor of `x` in `F_m`, or `None` for `x = 0/1`.
pub fn farey_predecessor(x: &Rational, m: u64) -> Result<Option<Rational>> {
    require_in_unit(x)?;
    let q = x.denom();
    if q > &BigInt::from(m) {
        return Err(Error::domain("x is not a member of F_m"));
    }
    if x.is_zero() {
        return Ok(None);
    }
    if q.is_one() {
        // x = 1/1
        return Ok(Some(Rational::new(BigInt::from(m - 1), BigInt::from(m))));
    }
    // b = P^{-1} mod Q lifted into (m - Q, m]; predecessor is a/b with
    // P b - Q a = 1.
    let p = x.numer();
    let b0 = mod_inverse(p, q)?;
    let b = lift_into_window(&b0, q, m);
    let a = (p * &b - BigInt::one()) / q;
    Ok(Some(Rational::new(a, b)))
}

/// Successor of `x` in `F_m`, or `None` for `x = 1/1`.
pub fn farey_successor(x: &Rational, m: u64) -> Result<Option<Rational>> {
    require_in_unit(x)?;
    let q = x.denom();
    if q > &BigInt::from(m) {
        return Err(Error::domain("x is not a member of F_m"));
    }
    if x == &Rational::one() {
        return Ok(None);
    }
    if q.is_one() {
        // x = 0/1
        return Ok(Some(Rational::new(BigInt::one(), BigInt::from(m))));
    }
    // d = -P^{-1} mod Q lifted into (m - Q, m]; successor is c/d with
    // c Q ... i.e. P d + 1 = Q c.
    let p = x.numer();
    let inv = mod_inverse(p, q)?;
    let d0 = (q - inv).mod_floor(q);
    let d = lift_into_window(&d0, q, m);
    let c = (p * &d + BigInt::one()) / q;
    Ok(Some(Rational::new(c, d)))
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    let e = a.extended_gcd(modulus);
    if !e.gcd.is_one() {
        return Err(Error::domain("fraction not in lowest terms"));
    }
    Ok(e.x.mod_floor(modulus))
}

/// Lift `b0 in [0, Q)` to the unique representative in `(m - Q, m]`.
fn lift_into_window(b0: &BigInt, q: &BigInt, m: u64) -> BigInt {
    let m = BigInt::from(m);
    b0 + q * ((&m - b0).div_floor(q))
}

/// The consecutive pairs `(pred, x)` and `(x, succ)` around `x` in `F_m`.
pub fn farey_neighbors(x: &Rational, m: u64) -> Result<FareySides> {
    let predecessor = farey_predecessor(x, m)?.map(|left| FareyNeighborPair {
        left,
        right: x.clone(),
        order: m,
    });
    let successor = farey_successor(x, m)?.map(|right| FareyNeighborPair {
        left: x.clone(),
        right,
        order: m,
    });
    Ok(FareySides {
        predecessor,
        successor,
    })
}

/// CF forms of the two neighbors of `x = P/Q` inside `F_Q`.
///
/// Writing the short expansion of `x` as a block whose last digit is `> 1`,
/// the neighbors in `F_Q` are the block with its last digit decremented and
/// the block with its last digit dropped, in some order.
pub fn neighbor_cf_forms(x: &Rational, m: u64) -> Result<(CfBlock, CfBlock, CfBlock)> {
    require_in_unit(x)?;
    if x.denom().is_one() {
        return Err(Error::domain("neighbor_cf_forms needs denominator >= 2"));
    }
    if x.denom() > &BigInt::from(m) {
        return Err(Error::domain("x is not a member of F_m"));
    }
    let this = cf_expand(x, Variant::Short)?;
    let k = this.len();
    let mut decremented = this.prefix(k - 1);
    let last = this.digits()[k - 1].clone();
    debug_assert!(last >= 2u32.into());
    decremented.push(last - num_bigint::BigUint::one());
    let dropped = this.prefix(k - 1);
    Ok((this, decremented, dropped))
}

/// Outcome of comparing a block against the Farey pair enclosing `r_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyCompare {
    /// Length of the shortest block evaluating to the preceding fraction.
    pub b1_len: usize,
    /// Length of the prefix of `B` evaluating to `r_B(m)`.
    pub b2_len: usize,
    /// `b2_len - b1_len`, certified to lie in `[-1, 4]`.
    pub defect: i64,
    /// Whether the length-(`b1_len` - 1) prefixes of the two blocks agree.
    pub prefix_agreement: bool,
    pub preceding: Rational,
    pub succeeding: Rational,
    pub rb_at_m: Rational,
}

/// Compare `r_B` to its enclosing consecutive pair in `F_m`.
pub fn compare_point_to_farey(block: &CfBlock, m: u64) -> Result<FareyCompare> {
    if m < 2 {
        return Err(Error::domain("compare_point_to_farey needs m >= 2"));
    }
    let table = convergents(block);
    let q = table.q_final();
    if q < &BigInt::from(m) {
        return Err(Error::domain("compare_point_to_farey needs q(B) >= m"));
    }
    if q == &BigInt::from(m) {
        return Err(Error::domain(
            "r_B lies in F_m; the lemma needs strict enclosure",
        ));
    }
    let x = table.value();
    let (left, right) = enclosing_farey_pair(&x, m);
    let b1 = if left.is_zero() {
        CfBlock::empty()
    } else {
        cf_expand(&left, Variant::Short)?
    };
    let (b2_len, rb_at_m) = last_convergent_at_most(block, &BigInt::from(m))?;
    let b1_len = b1.len();
    let prefix_agreement = if b1_len == 0 {
        true
    } else {
        block.prefix(b1_len - 1) == b1.prefix(b1_len - 1)
    };
    Ok(FareyCompare {
        b1_len,
        b2_len,
        defect: b2_len as i64 - b1_len as i64,
        prefix_agreement,
        preceding: left,
        succeeding: right,
        rb_at_m,
    })
}

/// The consecutive pair of `F_m` strictly enclosing `x` (which must not lie
/// in `F_m`), by a run-batched Stern-Brocot descent.
pub fn enclosing_farey_pair(x: &Rational, m: u64) -> (Rational, Rational) {
    assert!(x.is_positive() && x < &Rational::one());
    assert!(x.denom() > &BigInt::from(m), "x must lie outside F_m");
    let px = x.numer().clone();
    let qx = x.denom().clone();
    let m = BigInt::from(m);
    let mut l = (BigInt::zero(), BigInt::one());
    let mut r = (BigInt::one(), BigInt::one());
    loop {
        // mediant chain toward x with l fixed: r_t = (l.0 t + r.0)/(l.1 t + r.1)
        // stays right of x while t < (qx r.0 - px r.1)/(px l.1 - qx l.0).
        let num = &qx * &r.0 - &px * &r.1;
        let den = &px * &l.1 - &qx * &l.0;
        debug_assert!(num.is_positive() && den.is_positive());
        let t_side = (&num - BigInt::one()).div_floor(&den);
        let t_den = (&m - &r.1).div_floor(&l.1);
        let t = t_side.min(t_den.clone());
        if t.is_positive() {
            r = (&l.0 * &t + &r.0, &l.1 * &t + &r.1);
        }
        if &l.1 + &r.1 > m {
            break;
        }
        // symmetric: the chain l_t = (r.0 t + l.0)/(r.1 t + l.1) stays left
        // of x while t < (px l.1 - qx l.0)/(qx r.0 - px r.1)
        let num = &px * &l.1 - &qx * &l.0;
        let den = &qx * &r.0 - &px * &r.1;
        debug_assert!(num.is_positive() && den.is_positive());
        let t_side = (&num - BigInt::one()).div_floor(&den);
        let t_den = (&m - &l.1).div_floor(&r.1);
        let t = t_side.min(t_den);
        if t.is_positive() {
            l = (&r.0 * &t + &l.0, &r.1 * &t + &l.1);
        }
        if &l.1 + &r.1 > m {
            break;
        }
    }
    (
        Rational::new(l.0, l.1),
        Rational::new(r.0, r.1),
    )
}

/// Count of `a` in `Z_d^*` with `P/Q < a/d < P'/Q'`.
pub fn count_residues_in_gap(d: u64, pair: &FareyNeighborPair) -> u64 {
    if d == 0 {
        return 0;
    }
    let d_big = BigInt::from(d);
    // a > d P/Q  and  a < d P'/Q'
    let lo = (&d_big * pair.left.numer()).div_floor(pair.left.denom()) + BigInt::one();
    let hi_raw = &d_big * pair.right.numer();
    let hi = if (&hi_raw % pair.right.denom()).is_zero() {
        hi_raw / pair.right.denom() - BigInt::one()
    } else {
        hi_raw.div_floor(pair.right.denom())
    };
    let lo = lo.max(BigInt::one());
    let hi = hi.min(d_big.clone());
    let (Ok(lo), Ok(hi)) = (u64::try_from(&lo), u64::try_from(&hi)) else {
        return 0;
    };
    (lo..=hi).filter(|&a| num_integer::gcd(a, d) == 1).count() as u64
}

/// Gap census over a subset `U` of `F_m`: per-gap residue counts, the exact
/// total gap measure, and the certified bound `residues <= 2 d measure`.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub gaps: Vec<(FareyNeighborPair, u64)>,
    pub total_measure: Rational,
    pub residue_total: u64,
    /// `total_measure * m / sqrt(|U|)`, tracked to estimate the implicit
    /// constant in the measure bound; `None` for empty `U`.
    pub measure_ratio: Option<f64>,
    pub bound_holds: bool,
}

pub fn gap_union_report(d: u64, members: &[Rational], m: u64) -> Result<GapReport> {
    if (m as u128) * (m as u128) > d as u128 {
        return Err(Error::domain("gap_union_report needs m^2 <= d"));
    }
    let mut set: Vec<Rational> = members.to_vec();
    set.sort();
    set.dedup();
    let mut gaps = Vec::with_capacity(set.len());
    let mut total_measure = Rational::zero();
    let mut residue_total: u64 = 0;
    for x in &set {
        if x == &Rational::one() {
            return Err(Error::domain("1/1 has no successor in F_m"));
        }
        let succ = farey_successor(x, m)?.expect("non-terminal member");
        let pair = FareyNeighborPair {
            left: x.clone(),
            right: succ,
            order: m,
        };
        let count = count_residues_in_gap(d, &pair);
        total_measure += pair.gap();
        residue_total += count;
        gaps.push((pair, count));
    }
    let bound_holds =
        rat_int(residue_total as i64) <= rat_int(2i64) * rat_int(d as i64) * &total_measure;
    let measure_ratio = if set.is_empty() {
        None
    } else {
        Some(
            crate::rational::rat_to_f64(&total_measure) * m as f64 / (set.len() as f64).sqrt(),
        )
    };
    Ok(GapReport {
        gaps,
        total_measure,
        residue_total,
        measure_ratio,
        bound_holds,
    })
}

/// Exhaustive defect census for the point-vs-Farey comparison: all reduced
/// `a/q` with `q <= max_q`, both expansion variants, a deterministic sample
/// of thresholds `m` per fraction. Entirely in machine words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefectCensus {
    pub checked: u64,
    pub min_defect: i64,
    pub max_defect: i64,
    pub defect_violations: u64,
    pub prefix_violations: u64,
}

impl DefectCensus {
    fn merge(mut self, other: DefectCensus) -> DefectCensus {
        if other.checked > 0 {
            if self.checked == 0 {
                self.min_defect = other.min_defect;
                self.max_defect = other.max_defect;
            } else {
                self.min_defect = self.min_defect.min(other.min_defect);
                self.max_defect = self.max_defect.max(other.max_defect);
            }
        }
        self.checked += other.checked;
        self.defect_violations += other.defect_violations;
        self.prefix_violations += other.prefix_violations;
        self
    }
}

pub fn defect_census(max_q: u64, pool: &Pool) -> DefectCensus {
    pool.run_reduce(
        2,
        max_q + 1,
        |a, b| {
            let mut acc = DefectCensus::default();
            let mut digits = Vec::with_capacity(64);
            let mut qs = Vec::with_capacity(64);
            let mut b1_digits = Vec::with_capacity(64);
            for q in a..b {
                for num in 1..q {
                    if num_integer::gcd(num, q) != 1 {
                        continue;
                    }
                    for long in [false, true] {
                        cf_digits_u64(num, q, long, &mut digits);
                        q_prefixes_u64(&digits, &mut qs);
                        for m in sample_thresholds(q) {
                            check_defect_u64(num, q, m, &digits, &qs, &mut b1_digits, &mut acc);
                        }
                    }
                }
            }
            acc
        },
        DefectCensus::default(),
        DefectCensus::merge,
    )
}

fn sample_thresholds(q: u64) -> impl Iterator<Item = u64> {
    let mut picks = [2u64, 3, 0, 0, 0, 0, 0];
    picks[2] = integer_sqrt(q).max(2);
    picks[3] = (q / 8).max(2);
    picks[4] = (q / 3).max(2);
    picks[5] = (q / 2).max(2);
    picks[6] = q.saturating_sub(1).max(2);
    let mut seen = [0u64; 7];
    let mut n = 0;
    for &p in picks.iter() {
        if p >= 2 && p < q && !seen[..n].contains(&p) {
            seen[n] = p;
            n += 1;
        }
    }
    seen.into_iter().take(n)
}

pub(crate) fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// CF digits of `a/q` in machine words; `long` selects the variant ending
/// in 1.
pub fn cf_digits_u64(a: u64, q: u64, long: bool, out: &mut Vec<u64>) {
    debug_assert!(a >= 1 && a <= q);
    out.clear();
    let (mut p, mut den) = (a, q);
    while p != 0 {
        out.push(den / p);
        let r = den % p;
        den = p;
        p = r;
    }
    if long && !(out.len() == 1 && out[0] == 1) {
        let last = out.pop().unwrap();
        debug_assert!(last >= 2);
        out.push(last - 1);
        out.push(1);
    }
}

/// Convergent denominators `q_0 .. q_n` of a digit slice, in machine words.
pub fn q_prefixes_u64(digits: &[u64], out: &mut Vec<u64>) {
    out.clear();
    out.push(1);
    let mut prev = 0u64;
    let mut cur = 1u64;
    for &d in digits {
        let next = d * cur + prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
}

fn check_defect_u64(
    num: u64,
    q: u64,
    m: u64,
    digits: &[u64],
    qs: &[u64],
    b1_digits: &mut Vec<u64>,
    acc: &mut DefectCensus,
) {
    debug_assert!(m >= 2 && m < q);
    let (lp, lq, _rp, _rq) = enclosing_farey_pair_u64(num, q, m);
    let b1_len = if lp == 0 {
        b1_digits.clear();
        0
    } else {
        cf_digits_u64(lp, lq, false, b1_digits);
        b1_digits.len()
    };
    // largest n with q_n <= m
    let mut b2_len = digits.len();
    while qs[b2_len] > m {
        b2_len -= 1;
    }
    let defect = b2_len as i64 - b1_len as i64;
    if acc.checked == 0 {
        acc.min_defect = defect;
        acc.max_defect = defect;
    } else {
        acc.min_defect = acc.min_defect.min(defect);
        acc.max_defect = acc.max_defect.max(defect);
    }
    acc.checked += 1;
    if !(-1..=4).contains(&defect) {
        acc.defect_violations += 1;
    }
    if b1_len > 0 {
        let k = b1_len - 1;
        if k > digits.len() || b1_digits[..k] != digits[..k] {
            acc.prefix_violations += 1;
        }
    }
}

/// Machine-word Stern-Brocot descent: the consecutive `F_m` pair strictly
/// enclosing `a/q` (requires `q > m`).
pub fn enclosing_farey_pair_u64(a: u64, q: u64, m: u64) -> (u64, u64, u64, u64) {
    debug_assert!(a >= 1 && a < q && q > m);
    let (px, qx) = (a as i128, q as i128);
    let m = m as i128;
    let (mut lp, mut lq) = (0i128, 1i128);
    let (mut rp, mut rq) = (1i128, 1i128);
    loop {
        let num = qx * rp - px * rq;
        let den = px * lq - qx * lp;
        let t_side = (num - 1).div_euclid(den);
        let t_den = (m - rq).div_euclid(lq);
        let t = t_side.min(t_den);
        if t > 0 {
            rp += lp * t;
            rq += lq * t;
        }
        if lq + rq > m {
            break;
        }
        let num = px * lq - qx * lp;
        let den = qx * rp - px * rq;
        let t_side = (num - 1).div_euclid(den);
        let t_den = (m - lq).div_euclid(rq);
        let t = t_side.min(t_den);
        if t > 0 {
            lp += rp * t;
            lq += rq * t;
        }
        if lq + rq > m {
            break;
        }
    }
    (lp as u64, lq as u64, rp as u64, rq as u64)
}
