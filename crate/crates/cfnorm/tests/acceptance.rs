//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its runtime (visible under `cargo test --test acceptance --
//! --nocapture`). The heavy suites serialize on a shared lock so the
//! stated runtime budgets are measured without interference.

use cfnorm::census::{
    ce_string_census, census_sweep, farey_length_stats, primes_up_to, totient_sieve, CeMode,
    VariantPolicy,
};
use cfnorm::cf::{cf_eval, cf_expand, convergents, cylinder, CfBlock, Variant};
use cfnorm::constructor::{
    phi_prefix, ConstructionParams, ConstructionRun, Regime,
};
use cfnorm::farey::{
    cf_digits_u64, defect_census, farey_iter, farey_iter_u64, farey_len, farey_neighbors,
    gap_union_report, neighbor_cf_forms,
};
use cfnorm::normality::{
    binary_add, check_normal, concat_discrepancy_bound, increment_decomposition,
    lower_order_normality, NormalitySpec, Target, Word,
};
use cfnorm::rational::{rat_to_f64, rat_u64, Rational};
use cfnorm::splitter::{denominator_convolution_identity, verify_split_bounds, MPolicy};
use cfnorm::workers::Pool;
use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Mutex;
use std::time::{Duration, Instant};

static SERIAL: Mutex<()> = Mutex::new(());

fn finish(criterion: &str, t: Instant, budget: Option<Duration>, detail: &str) {
    let elapsed = t.elapsed();
    println!("criterion {criterion}: PASS ({elapsed:.2?}) {detail}");
    if let Some(budget) = budget {
        assert!(
            elapsed <= budget,
            "criterion {criterion} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}"
        );
    }
}

fn for_each_block(max_digit: u64, max_len: usize, f: &mut dyn FnMut(&[u64])) {
    let mut stack: Vec<Vec<u64>> = (1..=max_digit).map(|d| vec![d]).collect();
    while let Some(digits) = stack.pop() {
        f(&digits);
        if digits.len() < max_len {
            for d in 1..=max_digit {
                let mut next = digits.clone();
                next.push(d);
                stack.push(next);
            }
        }
    }
}

/// 1. Exact CF identities over all blocks with digits <= 4, length <= 8:
/// determinant, denominator growth, reversal congruence, Gauss-ratio
/// reversal symmetry, and the expansion round trip. Single-threaded,
/// under 10 seconds.
#[test]
fn criterion_01_exact_cf_identities() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let mut count = 0u64;
    for_each_block(4, 8, &mut |digits| {
        count += 1;
        let b = CfBlock::from_u64s(digits);
        let table = convergents(&b);
        let n_len = b.len() as i64;
        for n in 0..=n_len {
            let det = table.p_at(n - 1) * table.q_at(n) - table.p_at(n) * table.q_at(n - 1);
            assert_eq!(det, BigInt::from(if n % 2 == 0 { 1 } else { -1 }), "{digits:?}");
        }
        for n in 0..=(n_len - 2) {
            let lhs = table.q_at(n + 2).clone();
            let rhs = table.q_at(n) * BigInt::from(2);
            assert!(lhs >= rhs, "{digits:?}");
            if n >= 1 {
                assert!(lhs > rhs, "{digits:?}");
            }
        }
        // reversal congruence p p* + (-1)^|B| = 0 (mod q)
        let rev_table = convergents(&b.reversed());
        let p = table.p_final();
        let p_star = rev_table.p_final();
        let q = table.q_final();
        assert_eq!(rev_table.q_final(), q, "{digits:?}");
        let sign = BigInt::from(if b.len() % 2 == 0 { 1 } else { -1 });
        assert!(((p * p_star + sign) % q).bits() == 0, "{digits:?}");
        // Gauss-ratio reversal symmetry, as exact rational equality
        assert_eq!(
            cylinder(&b).gauss_ratio,
            cylinder(&b.reversed()).gauss_ratio,
            "{digits:?}"
        );
        // expansion round trip in the variant matching the block's form
        let value = table.value();
        let is_short_form = b.len() == 1 && digits[0] == 1
            || *digits.last().unwrap() > 1;
        let variant = if is_short_form { Variant::Short } else { Variant::Long };
        assert_eq!(cf_expand(&value, variant).unwrap(), b, "{digits:?}");
        assert_eq!(cf_eval(&b), value, "{digits:?}");
    });
    assert_eq!(count, (4u64.pow(9) - 4) / 3); // 87380 blocks
    finish("1 (exact CF identities)", t, Some(Duration::from_secs(10)),
        &format!("{count} blocks"));
}

/// 2. Splitter defect bounds, exhaustive: d <= 5000, b in {2,3,5}, every
/// coprime a, both variants, every admissible threshold. Zero violations
/// of [-4 ceil(log2(b)/2) - 5, 1], under 5 minutes at 4 workers. Plus the
/// proof's convolution identity over the criterion-1 block set.
#[test]
fn criterion_02_splitter_lemma() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let pool = Pool::new(4);
    let mut checked = 0u64;
    let mut max_defect = i64::MIN;
    let mut min_defect = i64::MAX;
    for b in [2u64, 3, 5] {
        for d in 2..=5000u64 {
            let r = verify_split_bounds(d, b, MPolicy::AllValid, &pool).unwrap();
            assert_eq!(r.violations, 0, "d={d} b={b}");
            checked += r.checked;
            if let (Some(mn), Some(mx)) = (r.min_defect, r.max_defect) {
                min_defect = min_defect.min(mn);
                max_defect = max_defect.max(mx);
            }
        }
    }
    // proof identity on the block family of criterion 1
    for_each_block(4, 8, &mut |digits| {
        let c = denominator_convolution_identity(digits);
        assert!(c.identity_holds, "{digits:?}");
        assert!(c.doubly_small_indices <= 2, "{digits:?}");
    });
    finish("2 (splitter lemma)", t, Some(Duration::from_secs(300)),
        &format!("{checked} splits, defects in [{min_defect}, {max_defect}]"));
}

/// 3. Farey structure, exhaustive m <= 300: unimodularity and the
/// half-order denominator bound on every consecutive pair, the CF forms of
/// neighbors for every member with denominator >= 2, and the totient count.
#[test]
fn criterion_03_farey_structure() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let phi = totient_sieve(300);
    let mut pairs = 0u64;
    for m in 1..=300u64 {
        let mut count = 0u64;
        let mut prev: Option<(u64, u64)> = None;
        for (p, q) in farey_iter_u64(m) {
            count += 1;
            if let Some((pp, pq)) = prev {
                // Q P' - P Q' = 1 with (P/Q, P'/Q') = ((pp,pq), (p,q))
                assert_eq!(pq as i128 * p as i128 - pp as i128 * q as i128, 1, "m={m}");
                assert!(2 * pq.max(q) >= m, "m={m} {pp}/{pq} {p}/{q}");
                pairs += 1;
            }
            prev = Some((p, q));
        }
        let expect = 1 + (1..=m).map(|q| phi[q as usize]).sum::<u64>();
        assert_eq!(count, expect, "m={m}");
        assert_eq!(farey_len(m), expect);
    }
    // neighbor CF forms match the actual neighbors inside F_Q
    let mut members = 0u64;
    for q in 2..=300u64 {
        for p in 1..q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            members += 1;
            let x = rat_u64(p, q);
            let (_, dec, drop) = neighbor_cf_forms(&x, q).unwrap();
            let sides = farey_neighbors(&x, q).unwrap();
            let actual = [
                sides.predecessor.unwrap().left,
                sides.successor.unwrap().right,
            ];
            let predicted = [cf_eval(&dec), cf_eval(&drop)];
            assert!(
                (predicted[0] == actual[0] && predicted[1] == actual[1])
                    || (predicted[0] == actual[1] && predicted[1] == actual[0]),
                "{p}/{q}"
            );
        }
    }
    finish("3 (Farey structure)", t, None,
        &format!("{pairs} consecutive pairs, {members} neighbor forms"));
}

/// 4. Point-vs-Farey defect, exhaustive q(B) <= 2000 over both variants
/// with sampled thresholds: defect in [-1, 4], prefix agreement, zero
/// violations; empirical extremes recorded.
#[test]
fn criterion_04_farey_compare_defect() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let pool = Pool::new(4);
    let c = defect_census(2000, &pool);
    assert_eq!(c.defect_violations, 0);
    assert_eq!(c.prefix_violations, 0);
    assert!(c.min_defect >= -1 && c.max_defect <= 4);
    finish("4 (point-vs-Farey defect)", t, None,
        &format!("{} comparisons, empirical defect range [{}, {}]",
            c.checked, c.min_defect, c.max_defect));
}

/// 5. Residue-gap bound: 10^4 seeded-random (d, U, m) instances with
/// m^2 <= d satisfy residues <= 2 d measure exactly.
#[test]
fn criterion_05_residue_gap_bound() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(0);
    for trial in 0..10_000 {
        let m = rng.gen_range(1..=60u64);
        let d = rng.gen_range(m * m..=m * m * 8);
        let members: Vec<Rational> = farey_iter(m)
            .filter(|x| x != &Rational::one())
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        let r = gap_union_report(d, &members, m).unwrap();
        assert!(r.bound_holds, "trial {trial}: d={d} m={m}");
        // exact form of the bound
        assert!(
            Rational::from_integer(BigInt::from(r.residue_total))
                <= Rational::from_integer(BigInt::from(2 * d)) * &r.total_measure,
            "trial {trial}"
        );
    }
    finish("5 (residue-gap bound)", t, None, "10000 randomized instances");
}

/// 6. Qualitative reproduction of the fixed-denominator decay: powers of
/// three up to 3^10 plus stride-sampled primes below 10^4, u = [1],
/// eps = 1/10, either-variant policy. Proportions quiet down after the
/// small-d noise and the fitted exponent is positive. Under 10 minutes at
/// 4 workers.
#[test]
fn criterion_06_census_decay() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let pool = Pool::new(4);
    let mut ds: Vec<u64> = (1..=10).map(|e| 3u64.pow(e)).collect();
    let primes = primes_up_to(10_000);
    ds.extend(primes.iter().step_by(25).copied());
    ds.sort_unstable();
    ds.dedup();
    let u = CfBlock::from_u64s(&[1]);
    let fit = census_sweep(&ds, &u, &rat_u64(1, 10), VariantPolicy::Either, &pool, |_| {})
        .unwrap();
    let max_small = fit
        .records
        .iter()
        .filter(|r| r.d < 100)
        .map(|r| r.proportion.clone())
        .max()
        .expect("small-d records");
    let max_large = fit
        .records
        .iter()
        .filter(|r| r.d >= 100)
        .map(|r| r.proportion.clone())
        .max()
        .expect("large-d records");
    assert!(
        max_large < max_small,
        "max proportion at d >= 100 ({max_large}) should sit below the small-d maximum ({max_small})"
    );
    // the same small-d allowance applies to the fit: tiny d make
    // -ln d / ln ln d explode and dominate the least squares, so the
    // exponent is fitted over the d >= 100 records
    let stable: Vec<_> = fit
        .records
        .iter()
        .filter(|r| r.d >= 100)
        .cloned()
        .collect();
    let stable_count = stable.len();
    let stable_fit = cfnorm::census::fit_decay(stable);
    let eta = stable_fit.fitted_eta.expect("fit is non-degenerate");
    assert!(eta > 0.0, "fitted eta = {eta}");
    finish("6 (census decay)", t, Some(Duration::from_secs(600)),
        &format!("{} denominators ({} in the fit), eta = {eta:.3}",
            fit.records.len(), stable_count));
}

/// 7. Khinchin-Levy length statistic at m = 1000: exhaustive mean within
/// 15% of ln(1000)/lambda_KL, tail counts nonincreasing.
#[test]
fn criterion_07_khinchin_levy_lengths() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let s = farey_length_stats(1000).unwrap();
    let mean = rat_to_f64(&s.mean_len);
    let rel = (mean - s.predicted).abs() / s.predicted;
    assert!(rel < 0.15, "mean {mean} vs predicted {} ({rel:.3})", s.predicted);
    for w in s.tail_counts.windows(2) {
        assert!(w[0].1 >= w[1].1);
    }
    finish("7 (Khinchin-Levy lengths)", t, None,
        &format!("mean {mean:.4} vs predicted {:.4}", s.predicted));
}

/// 8. Copeland-Erdos census at b = 2, length 20, eps = 1/10, k = 2: the
/// plain failing count is strictly below 2^20 with positive empirical
/// delta, and the starred count is at most twice the stride count.
#[test]
fn criterion_08_copeland_erdos_census() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let pool = Pool::new(4);
    let eps = rat_u64(1, 10);
    let budget = 1u64 << 26;
    let plain = ce_string_census(2, 20, &eps, 2, CeMode::Plain, budget, &pool).unwrap();
    assert!(plain.count < plain.total);
    assert!(plain.count > 0);
    let delta = plain.delta_empirical.unwrap();
    assert!(delta > 0.0);
    let stride = ce_string_census(2, 20, &eps, 2, CeMode::Stride(5), budget, &pool).unwrap();
    let star = ce_string_census(2, 20, &eps, 2, CeMode::Star(5), budget, &pool).unwrap();
    assert!(star.count >= stride.count);
    assert!(star.count <= 2 * stride.count, "star {} vs stride {}", star.count, stride.count);
    finish("8 (Copeland-Erdos census)", t, None,
        &format!("plain {}/{} (delta {delta:.4}), stride {}, star {}",
            plain.count, plain.total, stride.count, star.count));
}

/// Occurrences of the length-`ulen` word `u` among the first `ell` digits
/// of the length-`len` bit string `code` (most significant bit first).
fn count_bits(code: u32, len: usize, u: u32, ulen: usize, ell: usize) -> u64 {
    let mut count = 0;
    for i in 0..ell.saturating_sub(ulen - 1) {
        let shift = len - i - ulen;
        let window = (code >> shift) & ((1 << ulen) - 1);
        if window == u {
            count += 1;
        }
    }
    count
}

/// 9. Concatenation calculus soundness: the disjoint-subword bound over
/// every base-2 container up to length 20 under consecutive chunkings; the
/// order-lowering bound and the increment decomposition exhaustively to
/// length 18.
#[test]
fn criterion_09_concatenation_calculus() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    // --- disjoint-subword bound ---
    // eps = 1/4; piece admission and the final discrepancy comparison are
    // exact integer cross-multiplications. The bound depends only on
    // (ulen, len, chunk, piece count), so cache it.
    let eps = rat_u64(1, 4);
    let mut embeddings = 0u64;
    let mut bound_cache: std::collections::HashMap<(usize, usize, usize, usize), (u128, u128)> =
        std::collections::HashMap::new();
    for len in 4..=20usize {
        for chunk in [2usize, 3, 5] {
            if chunk > len {
                continue;
            }
            for (u, ulen) in [(0u32, 1usize), (1, 1), (0, 2), (1, 2), (2, 2), (3, 2)] {
                if ulen >= chunk || len <= ulen + 1 {
                    continue;
                }
                let pow = 1u64 << ulen; // 2^|u|
                let chunk_window = (chunk - ulen + 1) as u64;
                let total_window = (len - ulen + 1) as u64;
                for code in 0u32..(1u32 << len) {
                    // pieces: consecutive chunks that are (1/4, u)-normal:
                    // |nu/W - 2^-ulen| <= 1/4  <=>  4|nu 2^ulen - W| <= W 2^ulen
                    let mut k = 0usize;
                    for c in 0..len / chunk {
                        let start = c * chunk;
                        let mut nu = 0u64;
                        for i in start..start + chunk - ulen + 1 {
                            let shift = len - i - ulen;
                            if (code >> shift) & ((1 << ulen) - 1) == u {
                                nu += 1;
                            }
                        }
                        let lhs = 4 * (nu * pow).abs_diff(chunk_window);
                        if lhs <= chunk_window * pow {
                            k += 1;
                        }
                    }
                    let (bn, bd) = *bound_cache
                        .entry((ulen, len, chunk, k))
                        .or_insert_with(|| {
                            let b = concat_discrepancy_bound(
                                ulen,
                                len,
                                &vec![chunk; k],
                                &eps,
                            )
                            .unwrap();
                            (
                                u128::try_from(b.numer().clone()).unwrap(),
                                u128::try_from(b.denom().clone()).unwrap(),
                            )
                        });
                    // |nu/W - 2^-ulen| <= bn/bd
                    let nu_total = count_bits(code, len, u, ulen, len);
                    let lhs = (nu_total * pow).abs_diff(total_window) as u128 * bd;
                    let rhs = bn * (total_window * pow) as u128;
                    assert!(
                        lhs <= rhs,
                        "len={len} code={code:b} chunk={chunk} u={u:b}/{ulen} k={k}"
                    );
                    embeddings += 1;
                }
            }
        }
    }
    // --- order-lowering bound, exhaustive to length 18 ---
    let mut order_checked = 0u64;
    for len in 3..=18usize {
        for code in 0u32..(1u32 << len) {
            for (k, eps_num, eps_den) in [(2u32, 1u64, 8u64), (3, 1, 4)] {
                if (k as usize) > len {
                    continue;
                }
                let epsk = rat_u64(eps_num, eps_den);
                // is the word (eps, k)-normal? exact dyadic comparison
                let window = (len - k as usize + 1) as u64;
                let expected = Rational::new(BigInt::one(), BigInt::from(1u64 << k));
                let normal = (0..(1u32 << k)).all(|u| {
                    let nu = count_bits(code, len, u, k as usize, len);
                    let freq = Rational::new(BigInt::from(nu), BigInt::from(window));
                    let disc = if freq >= expected.clone() {
                        &freq - &expected
                    } else {
                        &expected - &freq
                    };
                    disc <= epsk
                });
                if !normal {
                    continue;
                }
                for ell in 1..k {
                    let bound = lower_order_normality(&epsk, k, len, ell, 2).unwrap();
                    let window_l = (len - ell as usize + 1) as u64;
                    let expected_l =
                        Rational::new(BigInt::one(), BigInt::from(1u64 << ell));
                    for u in 0..(1u32 << ell) {
                        let nu = count_bits(code, len, u, ell as usize, len);
                        let freq =
                            Rational::new(BigInt::from(nu), BigInt::from(window_l));
                        let disc = if freq >= expected_l.clone() {
                            &freq - &expected_l
                        } else {
                            &expected_l - &freq
                        };
                        assert!(disc <= bound, "len={len} code={code:b} k={k} ell={ell}");
                        order_checked += 1;
                    }
                }
            }
        }
    }
    // --- increment decomposition, exhaustive to length 18 ---
    let (k, m) = (1u32, 4usize);
    let inc_eps = rat_u64(1, 7);
    let mut inc_checked = 0u64;
    // fast pre-filter for the (1/7, 1, 4)*-normal precondition:
    // |14 nu1 - 7 ell| <= 2 ell at every checkpoint on s and its reversal
    let starred_quick = |code: u64, len: usize| -> bool {
        let mut check = |get: &dyn Fn(usize) -> u64| {
            let mut ell = 4;
            while ell <= len {
                let nu: u64 = (0..ell).map(|i| get(i)).sum();
                if (14 * nu).abs_diff(7 * ell as u64) > 2 * ell as u64 {
                    return false;
                }
                ell += 4;
            }
            true
        };
        check(&|i| (code >> (len - 1 - i)) & 1) && check(&|i| (code >> i) & 1)
    };
    for len in 1..=18usize {
        for code in 0u64..(1u64 << len) {
            if !starred_quick(code, len) {
                continue;
            }
            let digits: Vec<u64> = (0..len).rev().map(|i| (code >> i) & 1).collect();
            let s = Word::base(2, digits).unwrap();
            for delta in [1u8, 2] {
                let Ok((prefix_len, tail_len)) =
                    increment_decomposition(&s, delta, &inc_eps, k, m)
                else {
                    continue;
                };
                assert!(tail_len <= m + 2);
                assert_eq!(prefix_len + tail_len, len);
                let incremented = binary_add(&s, delta).unwrap();
                assert_eq!(incremented.prefix(prefix_len), s.prefix(prefix_len));
                let spec =
                    NormalitySpec::strided(inc_eps.clone(), Target::AllOfLength(k), m);
                assert!(check_normal(&incremented.prefix(prefix_len), &spec)
                    .unwrap()
                    .pass);
                inc_checked += 1;
            }
        }
    }
    assert!(inc_checked > 1000);
    finish("9 (concatenation calculus)", t, None,
        &format!("{embeddings} embeddings, {order_checked} order-lowering checks, {inc_checked} increments"));
}

/// 10. Constructor invariants over 20 toy runs across both regimes:
/// continuity in z, exact condition (A), exact truncation bounds, forced
/// digit runs starting within 2 positions of f + 1, and bit-identical
/// results for 1 and 4 workers.
#[test]
fn criterion_10_constructor_invariants() {
    let _guard = SERIAL.lock().unwrap();
    let t = Instant::now();
    let main_cfgs: &[(&[u64], usize)] = &[
        (&[3, 4, 2, 1], 1),
        (&[3, 4, 2, 1], 2),
        (&[2, 5, 2, 0], 1),
        (&[1, 1, 2, 1], 1),
        (&[4, 2, 2, 0], 1),
        (&[3, 4, 2, 2], 2),
        (&[5, 3, 2, 1], 2),
        (&[2, 2, 2, 1], 2),
        (&[1, 4, 2, 0], 1),
        (&[3, 3, 3, 1], 1),
    ];
    let sec_cfgs: &[(&[u64], usize)] = &[
        (&[3, 2, 1, 2], 1),
        (&[3, 2, 1, 2], 2),
        (&[2, 1, 3, 3], 1),
        (&[2, 1, 3, 3], 2),
        (&[4, 1, 2, 2], 1),
        (&[2, 0, 1, 1], 1),
        (&[4, 1, 1, 2], 2),
        (&[3, 1, 1, 1], 2),
        (&[1, 2, 1, 3], 1),
        (&[1, 1, 1, 1], 2),
    ];
    let mut runs = 0u64;
    let mut run_reports = 0u64;
    for (regime, cfgs) in [
        (Regime::CfVsBases, main_cfgs),
        (Regime::Base2VsBase3, sec_cfgs),
    ] {
        let params = ConstructionParams {
            regime,
            ..ConstructionParams::default()
        };
        for &(z, stages) in cfgs {
            let run1 = phi_prefix(z, stages, &params, &Pool::new(1)).unwrap();
            let run4 = phi_prefix(z, stages, &params, &Pool::new(4)).unwrap();
            assert_eq!(fingerprint(&run1), fingerprint(&run4), "z={z:?}");
            runs += 1;
            for stage in run1.stages.iter().skip(1) {
                // condition (A) exactness via an independent expansion
                let d = stage.d.clone().unwrap();
                let a = stage.candidate_a.clone().unwrap();
                let x = Rational::new(BigInt::from(a), BigInt::from(d.clone()));
                let full = cf_expand(&x, stage.candidate_variant.unwrap()).unwrap();
                assert_eq!(
                    convergents(&full).q_final(),
                    &BigInt::from(d),
                    "z={z:?} stage={:?}",
                    stage.stage
                );
                // truncation-bound exactness: window < bound <= next window
                if let Some(tr) = &stage.truncation {
                    let window = Rational::from_integer(BigInt::from(tr.window_len));
                    assert!(window < tr.bound, "z={z:?}");
                    if let Some(next) = tr.window_len_next {
                        assert!(
                            Rational::from_integer(BigInt::from(next)) >= tr.bound,
                            "z={z:?}"
                        );
                    }
                }
                // forced run in base p within 2 digits of f + 1
                let f = stage.f.unwrap();
                let run = stage
                    .run_reports
                    .iter()
                    .find(|r| r.base == stage.base)
                    .unwrap_or_else(|| panic!("no base-{} run for z={z:?} stage {:?}", stage.base, stage.stage));
                assert!(
                    (run.start as i64 - (f as i64 + 1)).abs() <= 2,
                    "z={z:?} run at {} vs f+1={}",
                    run.start,
                    f + 1
                );
                assert!(run.len >= 1);
                run_reports += 1;
            }
        }
        // continuity: z agreeing through 2i yield identical prefixes
        let (za, zb): (&[u64], &[u64]) = match regime {
            Regime::CfVsBases => (&[3, 4, 2, 1], &[3, 4, 2, 1, 9, 9]),
            Regime::Base2VsBase3 => (&[3, 2, 1, 2], &[3, 2, 9, 9]),
        };
        let stages = match regime {
            Regime::CfVsBases => 2,
            Regime::Base2VsBase3 => 1,
        };
        let run_a = phi_prefix(za, stages, &params, &Pool::new(4)).unwrap();
        let run_b = phi_prefix(zb, stages, &params, &Pool::new(4)).unwrap();
        assert_eq!(fingerprint(&run_a), fingerprint(&run_b), "continuity {regime:?}");
    }
    assert_eq!(runs, 20);
    finish("10 (constructor invariants)", t, None,
        &format!("{runs} toy runs, {run_reports} run reports"));
}

/// Byte-level fingerprint of a run: the digit stream plus the stage data
/// that the spec requires to be deterministic.
fn fingerprint(run: &ConstructionRun) -> String {
    let mut s = run.digits.to_string();
    for stage in &run.stages {
        s.push('|');
        s.push_str(&format!(
            "{:?}/{:?}/{:?}/{:?}/{}",
            stage.stage,
            stage.candidate_a,
            stage.candidate_variant,
            stage.f,
            stage.scanned
        ));
        for seg in &stage.segments {
            s.push_str(&format!(";{}:{}", seg.tag.name(), seg.len));
        }
        for r in &stage.run_reports {
            s.push_str(&format!(";run{}@{}+{}", r.base, r.start, r.len));
        }
    }
    s
}
