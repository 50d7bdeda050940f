//! The prefix/suffix split of a fixed-denominator block at a threshold,
//! its certified defect bounds, and the exhaustive verifier.
//!
//! Run with: cargo run --example split_bounds

use cfnorm::cf::CfBlock;
use cfnorm::splitter::{
    denominator_convolution_identity, split_block, verify_split_bounds, MPolicy,
};
use cfnorm::workers::Pool;
use num_bigint::BigInt;

fn main() {
    let block = CfBlock::from_u64s(&[1, 2, 3]);
    let s = split_block(&block, &BigInt::from(3), 2).unwrap();
    println!(
        "[1,2,3] at m=3: |B1|={} |B2|={} defect={} (bounds [{}, 1])",
        s.b1_len, s.b2_len, s.defect, s.lower_bound
    );

    let check = denominator_convolution_identity(&[1, 2, 3]);
    println!(
        "convolution identity holds: {visible}, doubly-small indices: {count}",
        visible = check.identity_holds,
        count = check.doubly_small_indices
    );

    let pool = Pool::new(4);
    for b in [2u64, 3, 5] {
        let r = verify_split_bounds(500, b, MPolicy::AllValid, &pool).unwrap();
        println!(
            "d=500 b={b}: checked {} splits, defects in [{:?}, {:?}], violations {}",
            r.checked, r.min_defect, r.max_defect, r.violations
        );
        for (defect, count) in &r.histogram {
            println!("    defect {defect}: {count}");
        }
    }
}
