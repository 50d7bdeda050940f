//! Candidate scan for one stage: fractions `a/d` inside the built
//! cylinder, `a` ascending with the short variant tried before the long
//! one, first admissible candidate wins. The scan runs in fixed-size
//! windows whose chunks are distributed across workers; the within-window
//! minimum is taken over candidate order, so the outcome is identical for
//! every worker count.

use crate::cf::{cylinder, CfBlock, Variant};
use crate::constructor::conditions::{check_conditions, ConditionReport, StageParams};
use crate::constructor::{ConstructionParams, ConstructionState};
use crate::error::{Error, Result};
use crate::rational::{floor_biguint, Rational};
use crate::workers::Pool;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// First-failure tallies across a scan, one bucket per condition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchTallies {
    pub not_extending: u64,
    pub fail_b: u64,
    pub fail_c: u64,
    pub fail_digit: u64,
    pub fail_segments: u64,
    pub fail_gates: u64,
}

impl SearchTallies {
    fn absorb(&mut self, report: &ConditionReport) {
        match report.first_failure() {
            Some("A") => self.not_extending += 1,
            Some("B") => self.fail_b += 1,
            Some("C") => self.fail_c += 1,
            Some("D") | Some("D'") | Some("E'") => self.fail_digit += 1,
            Some("E") => self.fail_segments += 1,
            Some("gates") => self.fail_gates += 1,
            _ => {}
        }
    }

    fn merge(mut self, other: SearchTallies) -> SearchTallies {
        self.not_extending += other.not_extending;
        self.fail_b += other.fail_b;
        self.fail_c += other.fail_c;
        self.fail_digit += other.fail_digit;
        self.fail_segments += other.fail_segments;
        self.fail_gates += other.fail_gates;
        self
    }
}

impl fmt::Display for SearchTallies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "first failures: not-extending {}, B {}, C {}, digit-prefix {}, segments {}, gates {}",
            self.not_extending,
            self.fail_b,
            self.fail_c,
            self.fail_digit,
            self.fail_segments,
            self.fail_gates
        )
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found {
        a: BigUint,
        variant: Variant,
        block: CfBlock,
        report: ConditionReport,
        scanned: u64,
    },
    Exhausted {
        tallies: SearchTallies,
        scanned: u64,
    },
}

const WINDOW: u64 = 4096;

/// Scan candidates in order and return the first admissible one.
pub fn search_block(
    state: &ConstructionState,
    sp: &StageParams,
    params: &ConstructionParams,
    pool: &Pool,
) -> Result<SearchOutcome> {
    let cyl = cylinder(&state.b_tilde);
    let d_rat = Rational::new(BigInt::from(sp.d.clone()), BigInt::one());
    // candidate range [a_lo, a_hi]: covers the closed endpoint too
    let a_lo = {
        let lo = floor_biguint(&(cyl.lo.clone() * &d_rat))?;
        lo.max(BigUint::one())
    };
    let a_hi = {
        let hi = floor_biguint(&(cyl.hi.clone() * &d_rat))? + BigUint::one();
        hi.min(&sp.d - BigUint::one())
    };
    if a_lo > a_hi {
        return Ok(SearchOutcome::Exhausted {
            tallies: SearchTallies::default(),
            scanned: 0,
        });
    }
    let span = (&a_hi - &a_lo + BigUint::one())
        .to_u64()
        .unwrap_or(u64::MAX);
    let budget = params.search_budget;
    let mut scanned: u64 = 0;
    let mut tallies = SearchTallies::default();
    let mut window_start = a_lo.clone();
    let mut remaining = span;
    while remaining > 0 {
        let this_window = WINDOW.min(remaining);
        let base = window_start.clone();
        let hits = pool.run_chunks(0, this_window, |from, to| {
            let mut best: Option<(u64, u8, CfBlock, ConditionReport)> = None;
            let mut local = SearchTallies::default();
            let mut checked = 0u64;
            for off in from..to {
                let a = &base + BigUint::from(off);
                if (&a % BigUint::from(sp.base)).is_zero() {
                    continue;
                }
                let x = Rational::new(BigInt::from(a.clone()), BigInt::from(sp.d.clone()));
                if !cyl.contains(&x) {
                    continue;
                }
                for (rank, variant) in [(0u8, Variant::Short), (1u8, Variant::Long)] {
                    checked += 1;
                    let (block, report) =
                        match check_conditions(&state.b_tilde, &a, variant, sp) {
                            Ok(v) => v,
                            Err(_) => continue,
                        };
                    if report.pass {
                        if let Some(block) = block {
                            best = Some((off, rank, block, report));
                            break;
                        }
                    }
                    local.absorb(&report);
                }
                if best.is_some() {
                    break;
                }
            }
            (best, local, checked)
        });
        // merge in chunk order; candidates in later chunks lose
        let mut window_best: Option<(u64, u8, CfBlock, ConditionReport)> = None;
        for (best, local, checked) in hits {
            scanned += checked;
            tallies = tallies.merge(local);
            if window_best.is_none() {
                if let Some(hit) = best {
                    window_best = Some(hit);
                }
            }
        }
        if let Some((off, rank, block, report)) = window_best {
            let a = &base + BigUint::from(off);
            return Ok(SearchOutcome::Found {
                a,
                variant: if rank == 0 {
                    Variant::Short
                } else {
                    Variant::Long
                },
                block,
                report,
                scanned,
            });
        }
        if scanned >= budget {
            return Err(Error::refused(
                format!(
                    "candidate scan exceeded the budget at stage ({}, {}): {tallies}",
                    sp.stage.0, sp.stage.1
                ),
                Some(span as u128),
            ));
        }
        window_start += BigUint::from(this_window);
        remaining -= this_window;
    }
    Ok(SearchOutcome::Exhausted { tallies, scanned })
}
