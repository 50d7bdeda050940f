//! Staged construction of CF digit streams from an integer sequence `z`.
//!
//! Stages walk the index set `Delta` in lexicographic order. The first
//! stage emits a run of 1s; each later stage searches the fractions `a/d`
//! (`d` a prime power chosen from the stage base and a derived denominator
//! threshold) whose expansions extend the digits built so far and satisfy
//! the stage conditions, then appends either a truncated prefix of the
//! found block (base-2 stages, and every stage in the two-base regime) or
//! the block followed by a huge digit `M = d^i` and a run of 1s. The
//! resulting stream's base-p digit windows carry forced constant runs whose
//! lengths are dialed by `z`.

mod conditions;
mod search;

pub use conditions::{
    check_conditions, choose_d, ConditionEVariant, ConditionEntry, ConditionReport, StageParams,
};
pub use search::{search_block, SearchOutcome, SearchTallies};

use crate::cf::{base_digit_window, convergents, cylinder, CfBlock, Variant};
use crate::enclosure::{floor_exp, Real};
use crate::error::{Error, Result};
use crate::farey::integer_sqrt;
use crate::rational::{rat_int, Rational};
use crate::workers::Pool;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `Delta = {(i,j): 1 <= j <= i}`, base = j-th prime; base-2 stages
    /// truncate, other stages append `M (1)^K`.
    CfVsBases,
    /// `Delta = {(i,j): j in {1,2}}`, bases alternate 2 and 3; every stage
    /// truncates.
    Base2VsBase3,
}

impl Regime {
    pub fn parse(s: &str) -> Result<Regime> {
        match s {
            "cf-vs-bases" => Ok(Regime::CfVsBases),
            "base2-vs-base3" => Ok(Regime::Base2VsBase3),
            other => Err(Error::domain(format!("unknown regime {other:?}"))),
        }
    }

    /// The `rank`-th element of `Delta` (rank 0 = the initial stage).
    pub fn stage_at(&self, rank: usize) -> (u32, u32) {
        match self {
            Regime::CfVsBases => {
                let mut r = rank;
                let mut i = 1u32;
                while r >= i as usize {
                    r -= i as usize;
                    i += 1;
                }
                (i, r as u32 + 1)
            }
            Regime::Base2VsBase3 => ((rank / 2) as u32 + 1, (rank % 2) as u32 + 1),
        }
    }

    /// Base used at a stage.
    pub fn base(&self, stage: (u32, u32)) -> u64 {
        match self {
            Regime::CfVsBases => nth_prime(stage.1),
            Regime::Base2VsBase3 => {
                if stage.1 == 1 {
                    2
                } else {
                    3
                }
            }
        }
    }
}

fn nth_prime(j: u32) -> u64 {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    SMALL[(j as usize - 1).min(SMALL.len() - 1)]
}

/// Stand-in values for the constants in the strict gates; the paper never
/// pins them numerically, so they are parameters with documented defaults.
#[derive(Debug, Clone, Copy)]
pub struct GateConstants {
    pub renyi_bound: f64,
    pub eta: f64,
    pub xi: f64,
    pub delta: f64,
    pub big_c: f64,
}

impl Default for GateConstants {
    fn default() -> Self {
        GateConstants {
            renyi_bound: 4.0,
            eta: 0.1,
            xi: 10.0,
            delta: 0.05,
            big_c: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub regime: Regime,
    /// Length of the initial run of 1s.
    pub n0: usize,
    /// Per-constructed-stage `N`; the last entry repeats for later stages.
    pub n_floor: Vec<u64>,
    /// `epsilon` at constructed-stage rank `r` is
    /// `epsilon_initial * epsilon_decay^r`.
    pub epsilon_initial: Rational,
    pub epsilon_decay: Rational,
    /// Block family at rank `r`: all blocks with digits and length at most
    /// `min(family_initial + r, family_cap)`.
    pub family_initial: u32,
    pub family_cap: u32,
    /// Enforce (rather than just report) the sufficiently-large-N gates.
    pub strict_inequalities: bool,
    pub gates: GateConstants,
    pub condition_e: ConditionEVariant,
    /// Candidate-scan cap per stage.
    pub search_budget: u64,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams {
            regime: Regime::CfVsBases,
            n0: 9,
            n_floor: vec![6, 11],
            epsilon_initial: Rational::new(BigInt::one(), BigInt::from(2)),
            epsilon_decay: Rational::one(),
            family_initial: 1,
            family_cap: 2,
            strict_inequalities: false,
            gates: GateConstants::default(),
            condition_e: ConditionEVariant::AsWritten,
            search_budget: 2_000_000,
        }
    }
}

impl ConstructionParams {
    pub fn epsilon_at(&self, rank: usize) -> Rational {
        let mut eps = self.epsilon_initial.clone();
        for _ in 0..rank {
            eps *= &self.epsilon_decay;
        }
        eps
    }

    pub fn n_at(&self, rank: usize) -> u64 {
        if self.n_floor.is_empty() {
            6
        } else {
            *self
                .n_floor
                .get(rank)
                .unwrap_or_else(|| self.n_floor.last().unwrap())
        }
    }

    /// The block family at a rank: every block with digits and length at
    /// most `t`, where `t` grows with the rank up to the cap. Nested and
    /// eventually covering every block below the cap.
    pub fn family_at(&self, rank: usize) -> Vec<CfBlock> {
        let t = (self.family_initial as usize + rank)
            .min(self.family_cap as usize)
            .max(1);
        let mut out = Vec::new();
        for len in 1..=t {
            let mut digits = vec![1u64; len];
            loop {
                out.push(CfBlock::from_u64s(&digits));
                // odometer over digits in [1, t]
                let mut pos = len;
                let mut rolled_over = true;
                while pos > 0 {
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] <= t as u64 {
                        rolled_over = false;
                        break;
                    }
                    digits[pos] = 1;
                }
                if rolled_over {
                    break;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentTag {
    InitialOnes,
    SearchResult,
    Truncated,
    AppendedPower,
    OnesRun,
}

impl SegmentTag {
    pub fn name(&self) -> &'static str {
        match self {
            SegmentTag::InitialOnes => "initial-ones",
            SegmentTag::SearchResult => "search-result",
            SegmentTag::Truncated => "truncation",
            SegmentTag::AppendedPower => "appended-power",
            SegmentTag::OnesRun => "ones-run",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub stage: (u32, u32),
    pub tag: SegmentTag,
    pub len: usize,
}

/// A constant digit run found in the base-`base` window of the stage
/// cylinder.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub base: u64,
    /// The stage reached denominator `p^f`.
    pub f: u64,
    pub digit: u64,
    /// 1-indexed start of the run inside the window.
    pub start: usize,
    pub len: usize,
    pub window_len: u64,
    pub predicted_start: u64,
}

#[derive(Debug, Clone)]
pub struct TruncationInfo {
    /// `L_b(C_{B_tilde B_bar})` after truncation.
    pub window_len: u64,
    /// The exact bound `(log_b d)(1 + 1/(z+1))` as a rational.
    pub bound: Rational,
    /// Window length with one more digit kept, when the truncation was
    /// proper; certifies that the kept prefix is maximal.
    pub window_len_next: Option<u64>,
    pub kept: usize,
    pub dropped: usize,
}

#[derive(Debug, Clone)]
pub struct StageLog {
    pub rank: usize,
    pub stage: (u32, u32),
    pub base: u64,
    pub n_param: Option<u64>,
    pub m: Option<BigUint>,
    pub d: Option<BigUint>,
    pub f: Option<u64>,
    pub candidate_a: Option<BigUint>,
    pub candidate_variant: Option<Variant>,
    pub scanned: u64,
    pub report: Option<ConditionReport>,
    pub segments: Vec<Segment>,
    pub truncation: Option<TruncationInfo>,
    pub run_reports: Vec<RunReport>,
}

#[derive(Debug, Clone)]
pub struct ConstructionRun {
    pub digits: CfBlock,
    pub stages: Vec<StageLog>,
}

#[derive(Debug, Clone)]
pub struct ConstructionState {
    pub rank: usize,
    pub b_tilde: CfBlock,
    pub stages: Vec<StageLog>,
}

impl ConstructionState {
    pub fn initial(params: &ConstructionParams) -> ConstructionState {
        let stage = params.regime.stage_at(0);
        let b_tilde = CfBlock::ones(params.n0);
        let log = StageLog {
            rank: 0,
            stage,
            base: params.regime.base(stage),
            n_param: None,
            m: None,
            d: None,
            f: None,
            candidate_a: None,
            candidate_variant: None,
            scanned: 0,
            report: None,
            segments: vec![Segment {
                stage,
                tag: SegmentTag::InitialOnes,
                len: params.n0,
            }],
            truncation: None,
            run_reports: Vec::new(),
        };
        ConstructionState {
            rank: 1,
            b_tilde,
            stages: vec![log],
        }
    }
}

/// Derived parameters of one constructed stage.
pub fn stage_params(
    params: &ConstructionParams,
    state: &ConstructionState,
) -> Result<StageParams> {
    let rank = state.rank;
    let stage = params.regime.stage_at(rank);
    let base = params.regime.base(stage);
    let epsilon = params.epsilon_at(rank - 1);
    let n_param = params.n_at(rank - 1);
    let exponent = Real::Scale(
        rat_int(n_param as i64),
        Box::new(Real::Add(
            Box::new(Real::LambdaKl),
            Box::new(Real::rat(epsilon.clone())),
        )),
    );
    let m = floor_exp(&exponent)?
        .to_biguint()
        .ok_or_else(|| Error::domain("negative m"))?;
    let (d, f) = choose_d(base, &m);
    let n_tilde = state.b_tilde.len() as u64;
    let stride = integer_sqrt(n_tilde).max(1) as usize;
    Ok(StageParams {
        stage,
        base,
        epsilon,
        n_param,
        n_tilde,
        m,
        d,
        f,
        stride,
        sqrt_n: integer_sqrt(n_param).max(1) as usize,
        family: params.family_at(rank - 1),
        condition_e: params.condition_e,
        strict: params.strict_inequalities,
        gates: params.gates,
        regime: params.regime,
    })
}

/// Build one stage: search for the block, shape it per the regime, extend
/// the state, and record the run report.
pub fn build_stage(
    state: &ConstructionState,
    z: &[u64],
    params: &ConstructionParams,
    pool: &Pool,
) -> Result<ConstructionState> {
    let sp = stage_params(params, state)?;
    let (i, _j) = sp.stage;
    if z.len() < 2 * i as usize {
        return Err(Error::domain(format!(
            "z too short: stage ({}, {}) needs z(1..{})",
            sp.stage.0,
            sp.stage.1,
            2 * i
        )));
    }
    let outcome = search_block(state, &sp, params, pool)?;
    let (a, variant, block, report, scanned) = match outcome {
        SearchOutcome::Found {
            a,
            variant,
            block,
            report,
            scanned,
        } => (a, variant, block, report, scanned),
        SearchOutcome::Exhausted { tallies, scanned } => {
            return Err(Error::domain(format!(
                "no admissible block at stage ({}, {}): scanned {scanned} candidates, {tallies}",
                sp.stage.0, sp.stage.1
            )));
        }
    };
    let mut log = StageLog {
        rank: state.rank,
        stage: sp.stage,
        base: sp.base,
        n_param: Some(sp.n_param),
        m: Some(sp.m.clone()),
        d: Some(sp.d.clone()),
        f: Some(sp.f),
        candidate_a: Some(a.clone()),
        candidate_variant: Some(variant),
        scanned,
        report: Some(report),
        segments: Vec::new(),
        truncation: None,
        run_reports: Vec::new(),
    };
    let mut next = state.clone();
    let truncating = match params.regime {
        Regime::CfVsBases => sp.base == 2,
        Regime::Base2VsBase3 => true,
    };
    if truncating {
        // z index: 2i for the main regime's base-2 stages; 2i - sigma in
        // the two-base regime with sigma = 1 exactly when the base is 2.
        let z_index = match params.regime {
            Regime::CfVsBases => 2 * i as usize,
            Regime::Base2VsBase3 => {
                let sigma = if sp.base == 2 { 1 } else { 0 };
                2 * i as usize - sigma
            }
        };
        let z_val = z[z_index - 1];
        let (kept, info) = truncate_block(&state.b_tilde, &block, sp.base, sp.f, z_val)?;
        log.truncation = Some(info);
        let b_bar = block.prefix(kept);
        next.b_tilde = next.b_tilde.concat(&b_bar);
        log.segments.push(Segment {
            stage: sp.stage,
            tag: SegmentTag::Truncated,
            len: kept,
        });
        log.run_reports = run_reports(&next.b_tilde, sp.base, sp.f)?;
    } else {
        // append M = d^i as a single digit, then the ones run
        let z_odd = z[2 * i as usize - 2];
        if z_odd == 0 {
            return Err(Error::domain("z(2i-1) = 0 leaves the ones run undefined"));
        }
        let m_digit = sp.d.pow(i);
        let full = state.b_tilde.concat(&block);
        let k_run = (full.len() as u64).div_ceil(z_odd) as usize;
        next.b_tilde = full.clone();
        next.b_tilde.push(m_digit);
        log.segments.push(Segment {
            stage: sp.stage,
            tag: SegmentTag::SearchResult,
            len: block.len(),
        });
        log.segments.push(Segment {
            stage: sp.stage,
            tag: SegmentTag::AppendedPower,
            len: 1,
        });
        log.run_reports = run_reports(&next.b_tilde, sp.base, sp.f)?;
        next.b_tilde = next.b_tilde.concat(&CfBlock::ones(k_run));
        log.segments.push(Segment {
            stage: sp.stage,
            tag: SegmentTag::OnesRun,
            len: k_run,
        });
    }
    next.rank += 1;
    next.stages.push(log);
    Ok(next)
}

/// Longest prefix of `block` keeping `L_b(C_{b_tilde . prefix})` strictly
/// below `(log_b d)(1 + 1/(z+1))`; `d = base^f` makes `log_b d = f` exact.
fn truncate_block(
    b_tilde: &CfBlock,
    block: &CfBlock,
    base: u64,
    f: u64,
    z: u64,
) -> Result<(usize, TruncationInfo)> {
    let bound = Rational::new(
        BigInt::from(f) * BigInt::from(z + 2),
        BigInt::from(z + 1),
    );
    let table = convergents(&b_tilde.concat(block));
    let start = b_tilde.len();
    let mut kept = 0usize;
    let mut lens: Vec<u64> = Vec::with_capacity(block.len());
    for extra in 1..=block.len() {
        let n = (start + extra) as i64;
        let k = table.q_at(n) * (table.q_at(n) + table.q_at(n - 1));
        let window_len = window_len_from_gap(&k, base);
        lens.push(window_len);
        if rat_int(window_len as i64) < bound {
            kept = extra;
        } else {
            break;
        }
    }
    if kept == 0 {
        return Err(Error::domain(
            "truncation bound excludes even one digit of the block",
        ));
    }
    let info = TruncationInfo {
        window_len: lens[kept - 1],
        bound,
        window_len_next: lens.get(kept).copied(),
        kept,
        dropped: block.len() - kept,
    };
    Ok((kept, info))
}

/// `L_b` of a cylinder whose Lebesgue measure is `1/k`: the largest `t`
/// with `b^t <= k`.
fn window_len_from_gap(k: &BigInt, base: u64) -> u64 {
    debug_assert!(k > &BigInt::zero());
    if base == 2 {
        return k.bits() - 1;
    }
    let mut t = 0u64;
    let mut pow = BigInt::one();
    let base = BigInt::from(base);
    loop {
        pow *= &base;
        if &pow > k {
            return t;
        }
        t += 1;
    }
}

/// Locate the forced constant runs in the base-`p` and base-`2p` windows of
/// the current cylinder, for a stage that reached denominator `p^f`.
fn run_reports(b_tilde: &CfBlock, p: u64, f: u64) -> Result<Vec<RunReport>> {
    let c = cylinder(b_tilde);
    let mut out = Vec::new();
    for base in [p, 2 * p] {
        let w = base_digit_window(&c.lo, &c.hi, base)?;
        let digits = w.digits();
        if let Some((digit, start, len)) = find_run(&digits, base, f) {
            out.push(RunReport {
                base,
                f,
                digit,
                start,
                len,
                window_len: w.length,
                predicted_start: f + 1,
            });
        }
    }
    Ok(out)
}

/// Longest run of the digit 0 or `base - 1` starting within two positions
/// of `f + 1` (1-indexed).
fn find_run(digits: &[u64], base: u64, f: u64) -> Option<(u64, usize, usize)> {
    let lo = (f.saturating_sub(1) as usize).min(digits.len());
    let hi = ((f + 3) as usize).min(digits.len());
    let mut best: Option<(u64, usize, usize)> = None;
    for start in lo..hi {
        let d = digits[start];
        if d != 0 && d != base - 1 {
            continue;
        }
        let mut len = 0;
        while start + len < digits.len() && digits[start + len] == d {
            len += 1;
        }
        if best.as_ref().is_none_or(|b| len > b.2) {
            best = Some((d, start + 1, len));
        }
    }
    best
}

/// Drive the construction for `stages` constructed stages after the
/// initial ones-run.
pub fn phi_prefix(
    z: &[u64],
    stages: usize,
    params: &ConstructionParams,
    pool: &Pool,
) -> Result<ConstructionRun> {
    let mut state = ConstructionState::initial(params);
    for _ in 0..stages {
        state = build_stage(&state, z, params, pool)?;
    }
    Ok(ConstructionRun {
        digits: state.b_tilde,
        stages: state.stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_order() {
        let r = Regime::CfVsBases;
        let seq: Vec<_> = (0..6).map(|k| r.stage_at(k)).collect();
        assert_eq!(seq, vec![(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]);
        let r = Regime::Base2VsBase3;
        let seq: Vec<_> = (0..4).map(|k| r.stage_at(k)).collect();
        assert_eq!(seq, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn stage_bases() {
        let r = Regime::CfVsBases;
        assert_eq!(r.base((2, 1)), 2);
        assert_eq!(r.base((2, 2)), 3);
        assert_eq!(r.base((3, 3)), 5);
        let r = Regime::Base2VsBase3;
        assert_eq!(r.base((1, 1)), 2);
        assert_eq!(r.base((1, 2)), 3);
    }

    #[test]
    fn family_nesting() {
        let p = ConstructionParams {
            family_initial: 1,
            family_cap: 3,
            ..ConstructionParams::default()
        };
        let f0 = p.family_at(0);
        let f1 = p.family_at(1);
        let f2 = p.family_at(2);
        assert_eq!(f0, vec![CfBlock::from_u64s(&[1])]);
        for b in &f0 {
            assert!(f1.contains(b));
        }
        for b in &f1 {
            assert!(f2.contains(b));
        }
        // digits <= 2, len <= 2: [1], [2], [1,1], [1,2], [2,1], [2,2]
        assert_eq!(f1.len(), 6);
    }

    #[test]
    fn stage_zero_emits_initial_ones() {
        let params = ConstructionParams::default();
        let run = phi_prefix(&[], 0, &params, &Pool::new(1)).unwrap();
        assert_eq!(run.digits, CfBlock::ones(params.n0));
        assert_eq!(run.stages.len(), 1);
        assert_eq!(run.stages[0].segments[0].tag, SegmentTag::InitialOnes);
    }

    #[test]
    fn z_length_is_checked() {
        let params = ConstructionParams::default();
        let err = phi_prefix(&[3], 1, &params, &Pool::new(1)).unwrap_err();
        assert!(format!("{err}").contains("z too short"));
    }

    #[test]
    fn run_detection() {
        // digits with a 0-run starting at position 4 (f = 3)
        let digits = vec![1u64, 2, 1, 0, 0, 0, 0, 2, 1];
        let (d, start, len) = find_run(&digits, 3, 3).unwrap();
        assert_eq!((d, start, len), (0, 4, 4));
        // (p-1)-run
        let digits = vec![1u64, 2, 2, 2, 1];
        let (d, start, len) = find_run(&digits, 3, 1).unwrap();
        assert_eq!((d, start, len), (2, 2, 3));
    }
}
