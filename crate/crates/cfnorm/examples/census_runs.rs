//! Desk-scale counting experiments: the fixed-denominator census with its
//! decay fit, string counts, Farey length statistics, the
//! denominator-normality proportion, the segment census, and the
//! non-normal measure enclosure.
//!
//! Run with: cargo run --release --example census_runs

use cfnorm::census::{
    ce_string_census, census_sweep, denominator_normal_census, dyadic_segment_census,
    farey_length_stats, scheerer_measure, CeMode, DyadicMode, ScheererOptions, VariantPolicy,
};
use cfnorm::cf::CfBlock;
use cfnorm::rational::{one, rat_to_f64, rat_to_string, rat_u64, zero};
use cfnorm::workers::Pool;

fn main() {
    let pool = Pool::new(4);
    let u = CfBlock::from_u64s(&[1]);

    let ds: Vec<u64> = (1..=8).map(|e| 3u64.pow(e)).collect();
    println!("fixed-denominator census, u = [1], eps = 1/10, either policy:");
    let fit = census_sweep(&ds, &u, &rat_u64(1, 10), VariantPolicy::Either, &pool, |r| {
        println!(
            "  d={:>5} bad {}/{} = {:.4}",
            r.d,
            r.bad_count,
            r.total,
            rat_to_f64(&r.proportion)
        );
    })
    .unwrap();
    println!("  fitted decay exponent: {:?}", fit.fitted_eta);

    let s = farey_length_stats(1000).unwrap();
    println!(
        "F_1000 lengths: mean {} = {:.4} vs predicted {:.4}",
        rat_to_string(&s.mean_len),
        rat_to_f64(&s.mean_len),
        s.predicted
    );

    let r = ce_string_census(2, 16, &rat_u64(1, 10), 2, CeMode::Plain, 1 << 26, &pool).unwrap();
    println!(
        "base-2 strings of length 16 failing (1/10, 2)-normality: {}/{} (delta {:.4})",
        r.count,
        r.total,
        r.delta_empirical.unwrap()
    );

    let r = denominator_normal_census(4, &rat_u64(1, 2), 2000, &pool).unwrap();
    println!(
        "denominator census: N=4 eps=1/2 -> m={} bad {}/{} (shape log N/sqrt N = {:.3})",
        r.m, r.bad, r.total, r.predicted_shape
    );

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
    println!(
        "segment census (b=3, j=4, M=3^8): {}/{} fractions with a bad interior segment",
        r.bad_count, r.a_count
    );

    let r = scheerer_measure(
        &rat_u64(1, 10),
        &[1],
        5,
        &ScheererOptions {
            digit_cap: 8,
            node_budget: 1 << 22,
        },
    )
    .unwrap();
    println!(
        "non-(1/10,[1])-normal measure at depth 5 (digit cap 8): [{:.4}, {:.4}]",
        rat_to_f64(&r.lower),
        rat_to_f64(&r.upper)
    );
}
