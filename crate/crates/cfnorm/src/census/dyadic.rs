//! Segment census for blocks evaluating to fractions with denominator a
//! prime power: extract the forced digit window in a coprime base, cut it
//! into equal segments, and count the fractions whose interior segments
//! fail starred normality.

use crate::cf::{base_digit_window, cylinder, CfBlock};
use crate::error::{Error, Result};
use crate::farey::cf_digits_u64;
use crate::normality::{check_normal, NormalitySpec, Target, Word};
use crate::rational::{rat_to_f64, Rational};
use num_bigint::BigUint;
use num_traits::{One, Signed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DyadicMode {
    /// Append the digit `M = b^(ell j)` and segment `S_2(C_{BM})`: prefix
    /// `c_0` of length `L_2(C_B)`, interior segments of length
    /// `J = ceil(log2 d) - L_2(C_I)`, remainder `c_t`.
    AppendPower { ell: u32 },
    /// Segment `S_{b'}(C_B)` itself into `c_0 c_1 c_2 c_3` with
    /// `|c_1| = |c_2| = J`.
    CoprimeBase { b_prime: u64 },
}

#[derive(Debug, Clone)]
pub struct DyadicReport {
    pub b: u64,
    pub j: u32,
    pub mode: DyadicMode,
    /// Fractions `a/b^j` in the interval (each contributes two blocks).
    pub a_count: u64,
    /// Fractions with a failing interior segment in either variant.
    pub bad_count: u64,
    /// Per-variant failing block counts `(short, long)`.
    pub bad_blocks: (u64, u64),
    /// `L_{b'}(I)`.
    pub j0: u64,
    /// Interior segment length `J`.
    pub seg_len: u64,
    /// The paper's size assumption `J >= ceil(j log_{b'} b)/2` held.
    pub j_assumption_holds: bool,
    /// Segment shorter than the stride (or missing entirely): every block
    /// counts as bad by the short-word convention.
    pub degenerate: bool,
    /// Every segmentation tiled the window exactly.
    pub tiling_ok: bool,
    /// Observed `|c_3| - j0` range in coprime-base mode.
    pub c3_deviation: Option<(i64, i64)>,
    pub lambda_interval: Rational,
}

/// Count fractions `a / b^j` in `[lo, hi)` whose CF blocks produce a
/// non-`(eps,k,m)*`-normal interior segment.
#[allow(clippy::too_many_arguments)]
pub fn dyadic_segment_census(
    b: u64,
    j: u32,
    lo: &Rational,
    hi: &Rational,
    epsilon: &Rational,
    k: u32,
    m: usize,
    mode: DyadicMode,
) -> Result<DyadicReport> {
    if j == 0 {
        return Err(Error::domain("need j >= 1"));
    }
    match mode {
        DyadicMode::AppendPower { ell } => {
            if b < 3 || b % 2 == 0 || !is_prime_u64(b) {
                return Err(Error::domain("append-power mode needs an odd prime base"));
            }
            if ell == 0 {
                return Err(Error::domain("need ell >= 1"));
            }
        }
        DyadicMode::CoprimeBase { b_prime } => {
            if b_prime < 2 || num_integer::gcd(b, b_prime) != 1 {
                return Err(Error::domain("bases must be coprime and >= 2"));
            }
        }
    }
    if lo.is_negative() || hi > &Rational::one() || lo >= hi {
        return Err(Error::domain("interval must satisfy 0 <= lo < hi <= 1"));
    }
    let d = (b as u128)
        .checked_pow(j)
        .filter(|&v| v <= u64::MAX as u128)
        .ok_or_else(|| Error::refused("b^j exceeds u64", None))? as u64;
    let out_base = match mode {
        DyadicMode::AppendPower { .. } => 2,
        DyadicMode::CoprimeBase { b_prime } => b_prime,
    };
    let window_i = base_digit_window(lo, hi, out_base)?;
    let j0 = window_i.length;
    // ceil(log_{out_base} d) by exact scan
    let ceil_log_d = ceil_log(out_base, &BigUint::from(d));
    let seg_len = ceil_log_d.saturating_sub(j0);
    let j_assumption_holds = 2 * seg_len >= ceil_log_d;
    let spec = NormalitySpec::starred(epsilon.clone(), Target::AllOfLength(k), m);
    let mut a_count = 0u64;
    let mut bad_count = 0u64;
    let mut bad_blocks = (0u64, 0u64);
    let mut degenerate = seg_len == 0 || (seg_len as usize) < m;
    let mut tiling_ok = true;
    let mut c3_dev: Option<(i64, i64)> = None;
    // a over [ceil(lo d), ...] with a/d in [lo, hi), b coprime to a
    let mut a = ceil_times(lo, d);
    if a == 0 {
        a = 1;
    }
    let mut digits = Vec::with_capacity(64);
    while Rational::new(a.into(), d.into()) < *hi && a < d {
        if a % b != 0 {
            a_count += 1;
            let mut a_bad = false;
            for long in [false, true] {
                cf_digits_u64(a, d, long, &mut digits);
                let block = CfBlock::from_u64s(&digits);
                let (window, c3_len) = match mode {
                    DyadicMode::AppendPower { ell } => {
                        let mut extended = block.clone();
                        extended.push(BigUint::from(b).pow(ell * j));
                        let c = cylinder(&extended);
                        (base_digit_window(&c.lo, &c.hi, 2)?, None)
                    }
                    DyadicMode::CoprimeBase { b_prime } => {
                        let c = cylinder(&block);
                        let w = base_digit_window(&c.lo, &c.hi, b_prime)?;
                        // c_3 = whatever remains after c_0 c_1 c_2
                        let c3 = w.length as i64 - j0 as i64 - 2 * seg_len as i64;
                        (w, Some(c3))
                    }
                };
                if let Some(c3) = c3_len {
                    let dev = c3 - j0 as i64;
                    c3_dev = Some(match c3_dev {
                        None => (dev, dev),
                        Some((mn, mx)) => (mn.min(dev), mx.max(dev)),
                    });
                }
                let s = window.digits();
                let (segments, tiled) = interior_segments(&s, j0 as usize, seg_len as usize, mode);
                tiling_ok &= tiled;
                let mut block_bad = false;
                if segments.is_empty() && matches!(mode, DyadicMode::CoprimeBase { .. }) {
                    // the window was too short to host c_1 c_2
                    degenerate = true;
                    block_bad = true;
                }
                for seg in segments {
                    if seg.len() < m || !check_normal(
                        &Word::base(out_base, seg.to_vec())?,
                        &spec,
                    )?
                    .pass
                    {
                        block_bad = true;
                        break;
                    }
                }
                if block_bad {
                    a_bad = true;
                    if long {
                        bad_blocks.1 += 1;
                    } else {
                        bad_blocks.0 += 1;
                    }
                }
            }
            if a_bad {
                bad_count += 1;
            }
        }
        a += 1;
    }
    Ok(DyadicReport {
        b,
        j,
        mode,
        a_count,
        bad_count,
        bad_blocks,
        j0,
        seg_len,
        j_assumption_holds,
        degenerate,
        tiling_ok,
        c3_deviation: c3_dev,
        lambda_interval: hi - lo,
    })
}

/// Interior segments of the window digits: skip `c_0` (length `j0`), then
/// either all full-length segments except the final remainder
/// (append-power mode) or exactly `c_1 c_2` (coprime-base mode). Also
/// reports whether the segmentation tiles the whole window.
fn interior_segments<'a>(
    s: &'a [u64],
    j0: usize,
    seg_len: usize,
    mode: DyadicMode,
) -> (Vec<&'a [u64]>, bool) {
    if seg_len == 0 || s.len() <= j0 {
        return (Vec::new(), true);
    }
    let body = &s[j0.min(s.len())..];
    match mode {
        DyadicMode::AppendPower { .. } => {
            let full = body.len() / seg_len;
            let rem = body.len() % seg_len;
            // c_t is the remainder when nonzero, otherwise the last full
            // segment; interior = everything before c_t
            let t_full = if rem == 0 { full.saturating_sub(1) } else { full };
            let segs: Vec<&[u64]> = (0..t_full)
                .map(|i| &body[i * seg_len..(i + 1) * seg_len])
                .collect();
            let tiled = j0 + t_full * seg_len + (body.len() - t_full * seg_len) == s.len();
            (segs, tiled)
        }
        DyadicMode::CoprimeBase { .. } => {
            if body.len() < 2 * seg_len {
                return (Vec::new(), true);
            }
            let segs = vec![&body[..seg_len], &body[seg_len..2 * seg_len]];
            (segs, true)
        }
    }
}

/// Smallest `t` with `base^t >= value`.
fn ceil_log(base: u64, value: &BigUint) -> u64 {
    let mut t = 0u64;
    let mut pow = BigUint::one();
    let base = BigUint::from(base);
    while &pow < value {
        pow *= &base;
        t += 1;
    }
    t
}

fn ceil_times(r: &Rational, d: u64) -> u64 {
    let v = r * Rational::new(d.into(), 1.into());
    let c = v.ceil();
    num_traits::ToPrimitive::to_u64(c.numer()).unwrap_or(u64::MAX)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Report a failing-count bound factor `(ell or j) * lambda(I) * b^j *
/// base^(-delta m)` for an externally supplied `delta`, and the implied
/// constant `count / factor`.
pub fn implied_constant(report: &DyadicReport, delta: f64, m: usize) -> Option<f64> {
    let ell_or_j = match report.mode {
        DyadicMode::AppendPower { ell } => ell as f64,
        DyadicMode::CoprimeBase { .. } => report.j as f64,
    };
    let out_base = match report.mode {
        DyadicMode::AppendPower { .. } => 2f64,
        DyadicMode::CoprimeBase { b_prime } => b_prime as f64,
    };
    let factor = ell_or_j
        * rat_to_f64(&report.lambda_interval)
        * (report.b as f64).powi(report.j as i32)
        * out_base.powf(-delta * m as f64);
    if factor > 0.0 {
        Some(report.bad_count as f64 / factor)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{one, rat_u64, zero};

    #[test]
    fn degenerate_small_j() {
        // b = 3, j = 1, full interval, stride larger than any segment:
        // every fraction is bad and the report is flagged degenerate
        let r = dyadic_segment_census(
            3,
            1,
            &zero(),
            &one(),
            &rat_u64(1, 10),
            1,
            8,
            DyadicMode::AppendPower { ell: 2 },
        )
        .unwrap();
        assert!(r.degenerate);
        assert_eq!(r.a_count, 2); // 1/3 and 2/3
        assert!(r.bad_count <= r.a_count);
        assert!(r.tiling_ok);
    }

    #[test]
    fn append_power_census_counts() {
        let r = dyadic_segment_census(
            3,
            4,
            &zero(),
            &one(),
            &rat_u64(1, 4),
            1,
            3,
            DyadicMode::AppendPower { ell: 2 },
        )
        .unwrap();
        assert_eq!(r.a_count, 54); // phi(81)
        assert!(r.bad_count <= r.a_count);
        assert!(r.tiling_ok);
        assert!(r.seg_len > 0);
    }

    #[test]
    fn coprime_mode_c3_deviation_is_bounded() {
        let r = dyadic_segment_census(
            5,
            4,
            &rat_u64(1, 3),
            &rat_u64(2, 3),
            &rat_u64(1, 4),
            1,
            3,
            DyadicMode::CoprimeBase { b_prime: 2 },
        )
        .unwrap();
        assert!(r.a_count > 0);
        let (mn, mx) = r.c3_deviation.unwrap();
        // |c_3| = j0 + O(1): deviation within a small absolute constant
        assert!(mn >= -4 && mx <= 4, "{mn} {mx}");
    }

    #[test]
    fn parameter_validation() {
        let e = rat_u64(1, 10);
        assert!(dyadic_segment_census(4, 2, &zero(), &one(), &e, 1, 3, DyadicMode::AppendPower { ell: 1 }).is_err());
        assert!(dyadic_segment_census(2, 2, &zero(), &one(), &e, 1, 3, DyadicMode::AppendPower { ell: 1 }).is_err());
        assert!(dyadic_segment_census(6, 2, &zero(), &one(), &e, 1, 3, DyadicMode::CoprimeBase { b_prime: 2 }).is_err());
        assert!(dyadic_segment_census(3, 2, &rat_u64(1, 2), &rat_u64(1, 3), &e, 1, 3, DyadicMode::AppendPower { ell: 1 }).is_err());
    }

    #[test]
    fn counts_bounded_by_totient() {
        let phi = crate::census::totient_sieve(243);
        let r = dyadic_segment_census(
            3,
            5,
            &zero(),
            &one(),
            &rat_u64(1, 5),
            1,
            4,
            DyadicMode::AppendPower { ell: 1 },
        )
        .unwrap();
        assert_eq!(r.a_count, phi[243]);
        assert!(r.bad_count <= phi[243]);
    }
}
