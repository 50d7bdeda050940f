//! Prefix/suffix decomposition of a block at a denominator threshold.
//!
//! For a block `B` and integers `b >= 2`, `m >= 1` with
//! `q(B)/b <= m^2 < q(B)`, let `B1` be the prefix with `r_{B1} = r_B(m)`
//! and `B2` the suffix with `r_{B2*} = r_{B*}(m)`. The defect
//! `|B1| + |B2| - |B|` always lies in `[-4 ceil(log2(b)/2) - 5, 1]`.

use crate::cf::{convergents, last_convergent_at_most, CfBlock};
use crate::error::{Error, Result};
use crate::farey::{cf_digits_u64, integer_sqrt, q_prefixes_u64};
use crate::workers::Pool;
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Outcome of splitting one block at one threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub b1_len: usize,
    pub b2_len: usize,
    /// `b1_len + b2_len - |B|`.
    pub defect: i64,
    /// `-4 ceil(log2(b)/2) - 5`, the certified lower bound for the defect.
    pub lower_bound: i64,
    /// 1-indexed digit positions counted by both the prefix and the suffix
    /// (nonempty only when the defect is positive, so at most one entry).
    pub overlap_digits: Vec<usize>,
}

/// `-4 ceil(log2(b)/2) - 5` by exact integer comparison (`ceil(log2(b)/2)`
/// is the least `k` with `4^k >= b`).
pub fn split_lower_bound(b: u64) -> i64 {
    assert!(b >= 2);
    let mut k: i64 = 0;
    let mut pow: u128 = 1;
    while pow < b as u128 {
        pow *= 4;
        k += 1;
    }
    -4 * k - 5
}

/// Split `B` at threshold `m` under base `b`; requires
/// `q(B)/b <= m^2 < q(B)`.
pub fn split_block(block: &CfBlock, m: &BigInt, b: u64) -> Result<SplitResult> {
    if b < 2 {
        return Err(Error::domain("split base must be >= 2"));
    }
    let q = convergents(block).q_final().clone();
    let m2 = m * m;
    if m2 >= q {
        return Err(Error::domain(format!(
            "precondition m^2 < q(B) failed: {m2} >= {q}"
        )));
    }
    if &m2 * BigInt::from(b) < q {
        return Err(Error::domain(format!(
            "precondition q(B) <= b m^2 failed: {q} > {b} * {m2}"
        )));
    }
    let (b1_len, _) = last_convergent_at_most(block, m)?;
    let (b2_len, _) = last_convergent_at_most(&block.reversed(), m)?;
    let n = block.len();
    let defect = b1_len as i64 + b2_len as i64 - n as i64;
    let overlap_digits = if defect > 0 {
        ((n - b2_len + 1)..=b1_len).collect()
    } else {
        Vec::new()
    };
    Ok(SplitResult {
        b1_len,
        b2_len,
        defect,
        lower_bound: split_lower_bound(b),
        overlap_digits,
    })
}

/// Which thresholds to sweep in [`verify_split_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MPolicy {
    /// Every `m` with `d/b <= m^2 < d`.
    AllValid,
    /// Only the largest such `m`, when it exists.
    Canonical,
}

/// Exhaustive split-defect report for one denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitReport {
    pub d: u64,
    pub b: u64,
    pub lower_bound: i64,
    pub checked: u64,
    pub min_defect: Option<i64>,
    pub max_defect: Option<i64>,
    pub histogram: BTreeMap<i64, u64>,
    pub violations: u64,
}

impl SplitReport {
    fn merge(mut self, other: SplitReport) -> SplitReport {
        self.checked += other.checked;
        self.violations += other.violations;
        self.min_defect = match (self.min_defect, other.min_defect) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max_defect = match (self.max_defect, other.max_defect) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    fn empty(d: u64, b: u64) -> SplitReport {
        SplitReport {
            d,
            b,
            lower_bound: split_lower_bound(b),
            checked: 0,
            min_defect: None,
            max_defect: None,
            histogram: BTreeMap::new(),
            violations: 0,
        }
    }
}

/// Valid threshold range for `(d, b)`: all `m` with `d <= b m^2` and
/// `m^2 < d`, as an inclusive range (may be empty).
pub fn valid_thresholds(d: u64, b: u64) -> std::ops::RangeInclusive<u64> {
    // smallest m with b m^2 >= d
    let mut lo = integer_sqrt(d / b);
    while (lo as u128) * (lo as u128) * (b as u128) < d as u128 {
        lo += 1;
    }
    let hi = integer_sqrt(d.saturating_sub(1));
    lo..=hi
}

/// Exhaustively verify the defect bounds over every `a` coprime to `d`,
/// both expansion variants, and thresholds per `policy`. The residue range
/// is partitioned into contiguous chunks; merging is associative, so the
/// result is identical for every worker count.
pub fn verify_split_bounds(d: u64, b: u64, policy: MPolicy, pool: &Pool) -> Result<SplitReport> {
    if d < 2 {
        return Err(Error::domain("verify_split_bounds needs d >= 2"));
    }
    if b < 2 {
        return Err(Error::domain("verify_split_bounds needs b >= 2"));
    }
    let range = valid_thresholds(d, b);
    let ms: Vec<u64> = match policy {
        MPolicy::AllValid => range.collect(),
        MPolicy::Canonical => {
            let hi = *range.end();
            if range.contains(&hi) {
                vec![hi]
            } else {
                Vec::new()
            }
        }
    };
    let lower = split_lower_bound(b);
    let report = pool.run_reduce(
        1,
        d as u64 + 1,
        |from, to| {
            let mut acc = SplitReport::empty(d, b);
            let mut digits = Vec::with_capacity(64);
            let mut qs = Vec::with_capacity(64);
            let mut qs_rev = Vec::with_capacity(64);
            let mut rev = Vec::with_capacity(64);
            for a in from..to {
                if num_integer::gcd(a, d) != 1 {
                    continue;
                }
                for long in [false, true] {
                    cf_digits_u64(a, d, long, &mut digits);
                    q_prefixes_u64(&digits, &mut qs);
                    rev.clear();
                    rev.extend(digits.iter().rev());
                    q_prefixes_u64(&rev, &mut qs_rev);
                    let n = digits.len();
                    for &m in &ms {
                        let b1 = largest_at_most(&qs, m);
                        let b2 = largest_at_most(&qs_rev, m);
                        let defect = b1 as i64 + b2 as i64 - n as i64;
                        acc.checked += 1;
                        *acc.histogram.entry(defect).or_insert(0) += 1;
                        acc.min_defect = Some(acc.min_defect.map_or(defect, |v| v.min(defect)));
                        acc.max_defect = Some(acc.max_defect.map_or(defect, |v| v.max(defect)));
                        if defect < lower || defect > 1 {
                            acc.violations += 1;
                        }
                    }
                }
            }
            acc
        },
        SplitReport::empty(d, b),
        SplitReport::merge,
    );
    Ok(report)
}

/// Largest index `n` with `qs[n] <= m`; `qs` is nondecreasing and starts
/// at `q_0 = 1`.
fn largest_at_most(qs: &[u64], m: u64) -> usize {
    debug_assert!(qs[0] == 1 && m >= 1);
    qs.partition_point(|&q| q <= m) - 1
}

/// The identity behind the defect bound, checked exactly for one block:
/// `q_i(B) q_{n-i}(B*) + q_{i-1}(B) q_{n-i-1}(B*) = q(B)` for all
/// `i in [0, n]`, plus the fact that at most two indices satisfy both
/// `q_i(B) < sqrt(q(B))` and `q_{n-i}(B*) < sqrt(q(B))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity_holds: bool,
    pub doubly_small_indices: usize,
}

pub fn denominator_convolution_identity(digits: &[u64]) -> IdentityCheck {
    let n = digits.len();
    // q_{-1} .. q_n with a leading 0
    let mut qs = Vec::with_capacity(n + 2);
    let mut qs_rev = Vec::with_capacity(n + 2);
    let rev: Vec<u64> = digits.iter().rev().copied().collect();
    q_prefixes_with_initial(digits, &mut qs);
    q_prefixes_with_initial(&rev, &mut qs_rev);
    let q = *qs.last().unwrap();
    let mut identity_holds = true;
    let mut doubly_small = 0usize;
    for i in 0..=n {
        // index shift: qs[i+1] = q_i
        let lhs = (qs[i + 1] as u128) * (qs_rev[n - i + 1] as u128)
            + (qs[i] as u128) * (qs_rev[n - i] as u128);
        if lhs != q as u128 {
            identity_holds = false;
        }
        if (qs[i + 1] as u128) * (qs[i + 1] as u128) < q as u128
            && (qs_rev[n - i + 1] as u128) * (qs_rev[n - i + 1] as u128) < q as u128
        {
            doubly_small += 1;
        }
    }
    IdentityCheck {
        identity_holds,
        doubly_small_indices: doubly_small,
    }
}

fn q_prefixes_with_initial(digits: &[u64], out: &mut Vec<u64>) {
    out.clear();
    out.push(0); // q_{-1}
    out.push(1); // q_0
    let mut prev = 0u64;
    let mut cur = 1u64;
    for &d in digits {
        let next = d * cur + prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
}
