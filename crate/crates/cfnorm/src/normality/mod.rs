//! Finite-word normality statistics for CF blocks and base-b strings.
//!
//! A word is `(eps, u)`-normal when the overlapping frequency of `u` in it
//! deviates from the expected frequency `m(u)` by at most `eps`; words
//! shorter than `u` are non-normal by convention. Stride variants check
//! every prefix whose length is a multiple of `m`; the offset variant
//! checks prefixes of length `N + k n`; the starred variant additionally
//! checks the reversed string. Denominator normality tracks
//! `log q(B') / |B'|` against the Khinchin-Levy constant.

mod concat;
mod freq;
mod words;

pub use concat::{
    binary_add, check_concatenation_normality, concat_discrepancy_bound,
    increment_decomposition, lower_order_normality, ConcatReport, ConcatStage, Decomposition,
    Schedule, ScheduleTarget,
};
pub use freq::ExpectedFrequency;
pub use words::{cf_digit_word, cf_word, count_occurrences, Word};

use crate::cf::{convergents, CfBlock};
use crate::enclosure::Real;
use crate::error::{Error, Result};
use crate::rational::{rat_int, rat_to_f64, Rational};
use num_bigint::BigInt;
use num_traits::Signed;
use std::cmp::Ordering;

/// What to count: one word, a finite set, or every word of a length
/// (base-b only: the CF alphabet is infinite).
#[derive(Debug, Clone)]
pub enum Target {
    Word(Word),
    Set(Vec<Word>),
    AllOfLength(u32),
}

/// A normality requirement to test a word against.
#[derive(Debug, Clone)]
pub struct NormalitySpec {
    pub epsilon: Rational,
    pub target: Target,
    /// Checkpoint stride `m`; 1 means plain (the whole word only).
    pub stride: usize,
    /// Also require the reversed string to pass (base-b strings only).
    pub starred: bool,
    /// 0 for the plain/stride variants; `N` for checkpoints `N + k*stride`.
    pub offset: usize,
}

impl NormalitySpec {
    pub fn plain(epsilon: Rational, target: Target) -> Self {
        NormalitySpec {
            epsilon,
            target,
            stride: 1,
            starred: false,
            offset: 0,
        }
    }

    pub fn strided(epsilon: Rational, target: Target, stride: usize) -> Self {
        NormalitySpec {
            epsilon,
            target,
            stride,
            starred: false,
            offset: 0,
        }
    }

    pub fn starred(epsilon: Rational, target: Target, stride: usize) -> Self {
        NormalitySpec {
            epsilon,
            target,
            stride,
            starred: true,
            offset: 0,
        }
    }

    fn checkpoint_lengths(&self, word_len: usize) -> Vec<usize> {
        if self.offset > 0 {
            let mut out = Vec::new();
            let mut l = self.offset;
            while l <= word_len {
                out.push(l);
                l += self.stride.max(1);
            }
            out
        } else if self.stride <= 1 {
            vec![word_len]
        } else {
            (1..=word_len / self.stride)
                .map(|k| k * self.stride)
                .collect()
        }
    }

    fn target_words(&self, system_of: &Word) -> Result<Vec<Word>> {
        match &self.target {
            Target::Word(u) => Ok(vec![u.clone()]),
            Target::Set(us) => Ok(us.clone()),
            Target::AllOfLength(k) => match system_of {
                Word::Base { base, .. } => Ok(Word::all_base_words(*base, *k)),
                Word::Cf(_) => Err(Error::domain(
                    "all-words-of-length target needs a base-b string (CF alphabet is infinite)",
                )),
            },
        }
    }
}

/// One `(prefix, target word)` measurement inside a verdict.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub prefix_len: usize,
    pub word: Word,
    pub count: u64,
    /// `prefix_len - |u| + 1`, or 0 when the prefix is shorter than `u`.
    pub window: u64,
    /// `count / window` when the window is nonempty.
    pub frequency: Option<Rational>,
    /// `|frequency - m(u)|` as a midpoint approximation, for display.
    pub discrepancy: Option<f64>,
    /// Checkpoint taken on the reversed string.
    pub reversed: bool,
    /// The exact comparison stayed undecided at the precision cap; the
    /// checkpoint is treated as failing.
    pub boundary: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct NormalityVerdict {
    pub pass: bool,
    pub checkpoints: Vec<Checkpoint>,
    pub first_failure: Option<usize>,
}

impl NormalityVerdict {
    fn from_checkpoints(checkpoints: Vec<Checkpoint>) -> Self {
        let first_failure = checkpoints.iter().position(|c| !c.pass);
        NormalityVerdict {
            pass: first_failure.is_none(),
            checkpoints,
            first_failure,
        }
    }
}

/// Evaluate a normality spec against a word.
pub fn check_normal(w: &Word, spec: &NormalitySpec) -> Result<NormalityVerdict> {
    if !spec.epsilon.is_positive() {
        return Err(Error::domain("epsilon must be > 0"));
    }
    if spec.starred && matches!(w, Word::Cf(_)) {
        return Err(Error::domain(
            "starred normality is defined for base-b strings only",
        ));
    }
    let targets = spec.target_words(w)?;
    for u in &targets {
        if !w.same_system(u) {
            return Err(Error::domain("target word from a different digit system"));
        }
        if u.is_empty() {
            return Err(Error::domain("target word must be nonempty"));
        }
    }
    let lengths = spec.checkpoint_lengths(w.len());
    let mut checkpoints = Vec::new();
    let sides: &[bool] = if spec.starred {
        &[false, true]
    } else {
        &[false]
    };
    let reversed_word = if spec.starred { Some(w.reversed()) } else { None };
    for &reversed in sides {
        let word = if reversed {
            reversed_word.as_ref().unwrap()
        } else {
            w
        };
        for &ell in &lengths {
            for u in &targets {
                checkpoints.push(evaluate_checkpoint(word, u, ell, &spec.epsilon, reversed)?);
            }
        }
    }
    Ok(NormalityVerdict::from_checkpoints(checkpoints))
}

fn evaluate_checkpoint(
    w: &Word,
    u: &Word,
    ell: usize,
    epsilon: &Rational,
    reversed: bool,
) -> Result<Checkpoint> {
    if ell < u.len() {
        // words shorter than the target are never normal
        return Ok(Checkpoint {
            prefix_len: ell,
            word: u.clone(),
            count: 0,
            window: 0,
            frequency: None,
            discrepancy: None,
            reversed,
            boundary: false,
            pass: false,
        });
    }
    let count = count_occurrences(w, u, ell)?;
    let window = (ell - u.len() + 1) as u64;
    let freq = Rational::new(BigInt::from(count), BigInt::from(window));
    let expected = ExpectedFrequency::for_word(u)?;
    let (pass, boundary) = match expected.within_epsilon(count, window, epsilon) {
        Ok(p) => (p, false),
        Err(Error::Boundary(_)) => (false, true),
        Err(e) => return Err(e),
    };
    let discrepancy = Some((rat_to_f64(&freq) - expected.approx_f64()).abs());
    Ok(Checkpoint {
        prefix_len: ell,
        word: u.clone(),
        count,
        window,
        frequency: Some(freq),
        discrepancy,
        reversed,
        boundary,
        pass,
    })
}

/// Which divisor the denominator-normality inequality uses. The proofs use
/// the prefix length; the displayed definition uses the literal stride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenomDivisor {
    #[default]
    PrefixLen,
    LiteralStride,
}

#[derive(Debug, Clone)]
pub struct DenomCheckpoint {
    pub prefix_len: usize,
    pub q: BigInt,
    pub log_q_over_div: f64,
    pub boundary: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DenomVerdict {
    pub pass: bool,
    pub checkpoints: Vec<DenomCheckpoint>,
    pub first_failure: Option<usize>,
}

/// `(eps, m)`-denominator normality: every prefix `B'` with `|B'|` a
/// positive multiple of `m` satisfies `|log q(B') / div - lambda_KL| < eps`
/// (strict), where `div` is `|B'|` by default.
pub fn check_denominator_normal(
    block: &CfBlock,
    epsilon: &Rational,
    stride: usize,
    divisor: DenomDivisor,
) -> Result<DenomVerdict> {
    if stride < 1 {
        return Err(Error::domain("denominator-normality stride must be >= 1"));
    }
    if !epsilon.is_positive() {
        return Err(Error::domain("epsilon must be > 0"));
    }
    let table = convergents(block);
    let mut checkpoints = Vec::new();
    let mut len = stride;
    while len <= block.len() {
        let q = table.q_at(len as i64).clone();
        let div = match divisor {
            DenomDivisor::PrefixLen => len,
            DenomDivisor::LiteralStride => stride,
        } as i64;
        // |ln q / div - lambda| < eps  <=>  -div*eps < ln q - div*lambda < div*eps
        let x = Real::Sub(
            Box::new(Real::ln(rat_int(q.clone()))),
            Box::new(Real::Scale(rat_int(div), Box::new(Real::LambdaKl))),
        );
        let bound = rat_int(div) * epsilon;
        let (pass, boundary) = match decide_strict_between(&x, &(-&bound), &bound) {
            Ok(p) => (p, false),
            Err(Error::Boundary(_)) => (false, true),
            Err(e) => return Err(e),
        };
        let approx = x.to_f64() / div as f64;
        checkpoints.push(DenomCheckpoint {
            prefix_len: len,
            q,
            log_q_over_div: approx,
            boundary,
            pass,
        });
        len += stride;
    }
    let first_failure = checkpoints.iter().position(|c| !c.pass);
    Ok(DenomVerdict {
        pass: first_failure.is_none(),
        checkpoints,
        first_failure,
    })
}

fn decide_strict_between(x: &Real, lo: &Rational, hi: &Rational) -> Result<bool> {
    Ok(x.certified_cmp(lo)? == Ordering::Greater && x.certified_cmp(hi)? == Ordering::Less)
}
