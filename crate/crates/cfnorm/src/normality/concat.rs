//! How normality survives concatenation: the disjoint-subword bound, the
//! order-lowering bound for all-words targets, the finite hypotheses of the
//! alternating-concatenation normality tests, and the binary increment
//! decomposition.

use crate::error::{Error, Result};
use crate::normality::{check_normal, NormalitySpec, Target, Word};
use crate::rational::{rat_int, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Certified `(eps', u)`-normality level of a word `v` containing `k`
/// disjoint `(eps, u)`-normal pieces of the given lengths:
/// `eps + (|u|+2)(|v| - sum + 4k + 2)/(|v| - |u| - 1)`.
pub fn concat_discrepancy_bound(
    u_len: usize,
    v_len: usize,
    piece_lens: &[usize],
    epsilon: &Rational,
) -> Result<Rational> {
    if u_len == 0 {
        return Err(Error::domain("target word must be nonempty"));
    }
    if v_len <= u_len + 1 {
        return Err(Error::domain("container must be longer than |u| + 1"));
    }
    if epsilon > &Rational::one() {
        return Err(Error::domain("the bound needs epsilon <= 1"));
    }
    if piece_lens.iter().any(|&l| l < u_len) {
        return Err(Error::domain("each piece must be at least |u| long"));
    }
    let total: usize = piece_lens.iter().sum();
    if total > v_len {
        return Err(Error::domain("pieces exceed the container length"));
    }
    let k = piece_lens.len();
    let numer = rat_int((u_len + 2) as i64) * rat_int((v_len - total + 4 * k + 2) as i64);
    let denom = rat_int((v_len - u_len - 1) as i64);
    Ok(epsilon + numer / denom)
}

/// `(eps, k)`-normality of a base-b word implies
/// `(2k/(|w|-k+1) + b^k eps, ell)`-normality for every `ell < k`.
pub fn lower_order_normality(
    epsilon: &Rational,
    k: u32,
    w_len: usize,
    ell: u32,
    base: u64,
) -> Result<Rational> {
    if ell >= k {
        return Err(Error::domain("order-lowering needs ell < k"));
    }
    if w_len < k as usize {
        return Err(Error::domain("word shorter than k"));
    }
    let first = Rational::new(BigInt::from(2 * k), BigInt::from(w_len as u64 - k as u64 + 1));
    let second = rat_int(BigInt::from(base).pow(k)) * epsilon;
    Ok(first + second)
}

/// Finite truncation of an alternating concatenation `w1 v1 w2 v2 ...`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `(w_i, v_i)` pairs; `v_i` may be empty.
    pub pairs: Vec<(Word, Word)>,
}

#[derive(Debug, Clone)]
pub enum ScheduleTarget {
    Set(Vec<Word>),
    AllOfLength(u32),
}

/// Per-stage normality requirement `(eps_i, U_i or k_i, m_i)`.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub epsilon: Rational,
    pub target: ScheduleTarget,
    pub stride: usize,
}

#[derive(Debug, Clone)]
pub struct ConcatStage {
    pub index: usize,
    /// `w_i` is `(eps_i, U_i, m_i)`-normal.
    pub w_normal: bool,
    /// `|v_1..v_i| / |w_1 v_1 ... w_i|`.
    pub filler_ratio: Rational,
    /// `sum_{j<=i} m_j / |w_1...w_{i-1}|`; `None` at the first stage.
    pub stride_sum_ratio: Option<Rational>,
    /// `2k/(m-k+1) + b^k eps` for all-words-of-length-k schedules.
    pub lower_order_term: Option<Rational>,
    /// `v_i` is a single repeated digit longer than
    /// `eps * |w_1 v_1 ... w_i|` - the non-normality trigger.
    pub obstruction: bool,
}

#[derive(Debug, Clone)]
pub struct ConcatReport {
    pub stages: Vec<ConcatStage>,
    /// Every checkable hypothesis held on this truncation.
    pub hypotheses_hold: bool,
    pub any_obstruction: bool,
}

/// Check every finitely checkable hypothesis of the alternating
/// concatenation tests on a truncation: per-stage normality of the `w_i`,
/// the filler and stride-sum ratios, the order-lowering terms, and the
/// single-digit obstruction that forces non-normality.
pub fn check_concatenation_normality(
    decomposition: &Decomposition,
    schedules: &[Schedule],
    obstruction_epsilon: &Rational,
) -> Result<ConcatReport> {
    if decomposition.pairs.is_empty() {
        return Err(Error::domain("empty decomposition"));
    }
    if schedules.len() != decomposition.pairs.len() {
        return Err(Error::domain(
            "need exactly one schedule per decomposition stage",
        ));
    }
    let system = &decomposition.pairs[0].0;
    for (w, v) in &decomposition.pairs {
        if !w.same_system(system) || (!v.is_empty() && !v.same_system(system)) {
            return Err(Error::domain("mixed digit systems in decomposition"));
        }
    }
    let mut stages = Vec::new();
    let mut w_len_sum: usize = 0; // |w_1 ... w_{i-1}| entering stage i
    let mut v_len_sum: usize = 0;
    let mut full_len: usize = 0; // |w_1 v_1 ... w_{i-1} v_{i-1}|
    let mut stride_sum: usize = 0;
    for (i, ((w, v), schedule)) in decomposition
        .pairs
        .iter()
        .zip(schedules.iter())
        .enumerate()
    {
        let target = match &schedule.target {
            ScheduleTarget::Set(us) => Target::Set(us.clone()),
            ScheduleTarget::AllOfLength(k) => Target::AllOfLength(*k),
        };
        let spec = NormalitySpec::strided(schedule.epsilon.clone(), target, schedule.stride);
        let w_normal = check_normal(w, &spec)?.pass;
        stride_sum += schedule.stride;
        let stride_sum_ratio = if w_len_sum > 0 {
            Some(Rational::new(
                BigInt::from(stride_sum as u64),
                BigInt::from(w_len_sum as u64),
            ))
        } else {
            None
        };
        let lower_order_term = match (&schedule.target, w) {
            (ScheduleTarget::AllOfLength(k), Word::Base { base, .. })
                if schedule.stride > *k as usize =>
            {
                let first = Rational::new(
                    BigInt::from(2 * k),
                    BigInt::from((schedule.stride - *k as usize + 1) as u64),
                );
                Some(first + rat_int(BigInt::from(*base).pow(*k)) * &schedule.epsilon)
            }
            _ => None,
        };
        let prefix_through_w = full_len + w.len();
        let filler_ratio = Rational::new(
            BigInt::from((v_len_sum + v.len()) as u64),
            BigInt::from(prefix_through_w.max(1) as u64),
        );
        let obstruction = is_constant_digit(v)
            && rat_int(v.len() as i64)
                > obstruction_epsilon * rat_int(prefix_through_w as i64);
        stages.push(ConcatStage {
            index: i + 1,
            w_normal,
            filler_ratio,
            stride_sum_ratio,
            lower_order_term,
            obstruction,
        });
        w_len_sum += w.len();
        v_len_sum += v.len();
        full_len += w.len() + v.len();
    }
    let hypotheses_hold = stages.iter().all(|s| s.w_normal);
    let any_obstruction = stages.iter().any(|s| s.obstruction);
    Ok(ConcatReport {
        stages,
        hypotheses_hold,
        any_obstruction,
    })
}

fn is_constant_digit(v: &Word) -> bool {
    if v.is_empty() {
        return false;
    }
    match v {
        Word::Base { digits, .. } => digits.iter().all(|d| d == &digits[0]),
        Word::Cf(b) => b.digits().iter().all(|d| d == &b.digits()[0]),
    }
}

/// Decompose `s + delta` (same-length binary addition, no overflow) into an
/// `(eps, k, m)`-normal prefix and a tail of length at most `m + 2`.
///
/// Requires `s` to be `(eps, k, m)*`-normal with `m - k >= 2` and
/// `eps < 1/6`; those hypotheses cap the trailing-ones run of `s` below
/// `m`, which is what bounds the carry propagation.
pub fn increment_decomposition(
    s: &Word,
    delta: u8,
    epsilon: &Rational,
    k: u32,
    m: usize,
) -> Result<(usize, usize)> {
    let Word::Base { base: 2, digits } = s else {
        return Err(Error::domain("increment decomposition needs a binary string"));
    };
    if !(delta == 1 || delta == 2) {
        return Err(Error::domain("delta must be 1 or 2"));
    }
    if m < k as usize + 2 {
        return Err(Error::domain("need m - k >= 2"));
    }
    if epsilon >= &Rational::new(BigInt::one(), BigInt::from(6)) {
        return Err(Error::domain("need epsilon < 1/6"));
    }
    let spec = NormalitySpec::starred(epsilon.clone(), Target::AllOfLength(k), m);
    if !check_normal(s, &spec)?.pass {
        return Err(Error::domain("s is not (eps,k,m)*-normal"));
    }
    // overflow check: value(s) + delta < 2^n
    let mut value = BigUint::zero();
    for &d in digits {
        value = (value << 1) + BigUint::from(d);
    }
    value += BigUint::from(delta);
    if value.bits() > digits.len() as u64 {
        return Err(Error::domain("increment overflows the string length"));
    }
    let n = digits.len();
    // tail length per the carry cases
    let tail = if n >= 2 && digits[n - 1] == 0 && digits[n - 2] == 0 {
        2
    } else if digits[n - 1] == 1 {
        let j = digits.iter().rev().take_while(|&&d| d == 1).count();
        j + 1
    } else {
        // ends in a single 0 after a run of ones
        let j = digits[..n - 1]
            .iter()
            .rev()
            .take_while(|&&d| d == 1)
            .count();
        j + 2
    };
    let tail = tail.min(n);
    debug_assert!(tail <= m + 2);
    Ok((n - tail, tail))
}

/// `s + delta` as a same-length binary word; errors on overflow.
pub fn binary_add(s: &Word, delta: u8) -> Result<Word> {
    let Word::Base { base: 2, digits } = s else {
        return Err(Error::domain("binary_add needs a binary string"));
    };
    let mut out = digits.clone();
    let mut carry = delta as u64;
    let mut i = out.len();
    while carry > 0 {
        if i == 0 {
            return Err(Error::domain("increment overflows the string length"));
        }
        i -= 1;
        let v = out[i] + (carry & 1);
        out[i] = v & 1;
        carry = (carry >> 1) + (v >> 1);
    }
    Word::base(2, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_u64;

    #[test]
    fn bound_examples() {
        // pieces [40, 40], k = 2, u_len 2, v_len 100, eps 1/10:
        // 1/10 + 4 * 30 / 97
        let b = concat_discrepancy_bound(2, 100, &[40, 40], &rat_u64(1, 10)).unwrap();
        assert_eq!(b, rat_u64(1, 10) + rat_u64(120, 97));

        // exact tiling with one piece: eps + (u+2) * 6 / (v - u - 1)
        let b = concat_discrepancy_bound(2, 50, &[50], &rat_u64(1, 10)).unwrap();
        assert_eq!(b, rat_u64(1, 10) + rat_u64(4 * 6, 47));

        // the bound tends to eps as the container grows with full tiling
        let mut last = None;
        for v_len in [100usize, 1000, 10000] {
            let b = concat_discrepancy_bound(2, v_len, &[v_len], &rat_u64(1, 10)).unwrap();
            if let Some(prev) = last {
                assert!(b < prev);
            }
            last = Some(b);
        }
        assert!(last.unwrap() < rat_u64(1, 10) + rat_u64(1, 100));

        assert!(concat_discrepancy_bound(2, 3, &[2], &rat_u64(1, 10)).is_err());
        assert!(concat_discrepancy_bound(2, 10, &[1], &rat_u64(1, 10)).is_err());
        assert!(concat_discrepancy_bound(2, 10, &[6, 6], &rat_u64(1, 10)).is_err());
    }

    #[test]
    fn lower_order_examples() {
        assert_eq!(
            lower_order_normality(&rat_u64(0, 1).clone(), 3, 1000, 1, 2).unwrap(),
            rat_u64(6, 998)
        );
        assert_eq!(
            lower_order_normality(&rat_u64(1, 100), 2, 100, 1, 2).unwrap(),
            rat_u64(4, 99) + rat_u64(4, 100)
        );
        assert!(lower_order_normality(&rat_u64(1, 100), 2, 100, 2, 2).is_err());
        assert!(lower_order_normality(&rat_u64(1, 100), 2, 100, 3, 2).is_err());
    }

    fn bword2(bits: &[u64]) -> Word {
        Word::base(2, bits.to_vec()).unwrap()
    }

    #[test]
    fn concatenation_report() {
        // balanced pieces, empty fillers: hypotheses hold
        let w = bword_balanced(12);
        let decomp = Decomposition {
            pairs: vec![
                (w.clone(), Word::base(2, vec![]).unwrap()),
                (w.clone(), Word::base(2, vec![]).unwrap()),
            ],
        };
        let schedules = vec![
            Schedule {
                epsilon: rat_u64(1, 4),
                target: ScheduleTarget::AllOfLength(1),
                stride: 4,
            },
            Schedule {
                epsilon: rat_u64(1, 4),
                target: ScheduleTarget::AllOfLength(1),
                stride: 4,
            },
        ];
        let r = check_concatenation_normality(&decomp, &schedules, &rat_u64(1, 10)).unwrap();
        assert!(r.hypotheses_hold);
        assert!(!r.any_obstruction);
        assert!(r.stages[1].stride_sum_ratio.is_some());

        // a long constant filler triggers the obstruction flag
        let decomp = Decomposition {
            pairs: vec![(w.clone(), bword2_const(1, 30))],
        };
        let schedules = vec![Schedule {
            epsilon: rat_u64(1, 4),
            target: ScheduleTarget::AllOfLength(1),
            stride: 4,
        }];
        let r = check_concatenation_normality(&decomp, &schedules, &rat_u64(1, 10)).unwrap();
        assert!(r.any_obstruction);
    }

    fn bword_balanced(n: usize) -> Word {
        Word::base(2, (0..n as u64).map(|i| i % 2).collect()).unwrap()
    }

    fn bword2_const(d: u64, n: usize) -> Word {
        Word::base(2, vec![d; n]).unwrap()
    }

    #[test]
    fn increment_cases() {
        // 0110011100 is (1/7,1,4)*-normal and ends in 00: tail 2
        let s = bword2(&[0, 1, 1, 0, 0, 1, 1, 1, 0, 0]);
        let (prefix, tail) = increment_decomposition(&s, 1, &rat_u64(1, 7), 1, 4).unwrap();
        assert_eq!((prefix, tail), (8, 2));
        let (prefix, tail) = increment_decomposition(&s, 2, &rat_u64(1, 7), 1, 4).unwrap();
        assert_eq!((prefix, tail), (8, 2));

        // 011001100011 ends in a ones run of length 2: the carry of +1
        // ripples through it, tail = 3
        let s = bword2(&[0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 1, 1]);
        let (prefix, tail) = increment_decomposition(&s, 1, &rat_u64(1, 7), 1, 4).unwrap();
        assert_eq!((prefix, tail), (9, 3));
        assert_eq!(
            binary_add(&s, 1).unwrap(),
            bword2(&[0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0])
        );
    }

    #[test]
    fn increment_preconditions() {
        // all-ones strings are never (eps,k,m)*-normal under eps < 1/6
        let s = bword2(&[1; 10]);
        assert!(increment_decomposition(&s, 1, &rat_u64(1, 7), 1, 4).is_err());
        // bad parameter shapes
        let s = bword2(&[0, 1, 1, 0, 0, 1, 1, 0]);
        assert!(increment_decomposition(&s, 3, &rat_u64(1, 7), 1, 4).is_err());
        assert!(increment_decomposition(&s, 1, &rat_u64(1, 6), 1, 4).is_err());
        assert!(increment_decomposition(&s, 1, &rat_u64(1, 7), 3, 4).is_err());
    }

    #[test]
    fn increment_exhaustive_small() {
        // every binary string of length 8 that satisfies the preconditions
        // decomposes into a normal prefix plus a short tail
        let (k, m) = (1u32, 4usize);
        let eps = rat_u64(1, 7);
        for bits in 0u32..(1 << 8) {
            let digits: Vec<u64> = (0..8).rev().map(|i| ((bits >> i) & 1) as u64).collect();
            let s = Word::base(2, digits).unwrap();
            for delta in [1u8, 2] {
                match increment_decomposition(&s, delta, &eps, k, m) {
                    Ok((prefix_len, tail_len)) => {
                        assert!(tail_len <= m + 2);
                        assert_eq!(prefix_len + tail_len, 8);
                        let incremented = binary_add(&s, delta).unwrap();
                        // the prefix is untouched by the carry
                        assert_eq!(incremented.prefix(prefix_len), s.prefix(prefix_len));
                        // and it is (eps,k,m)-normal as a word
                        let spec = NormalitySpec::strided(
                            eps.clone(),
                            Target::AllOfLength(k),
                            m,
                        );
                        assert!(check_normal(&incremented.prefix(prefix_len), &spec)
                            .unwrap()
                            .pass);
                    }
                    Err(_) => {} // precondition failures are fine here
                }
            }
        }
    }
}
