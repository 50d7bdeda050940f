//! Finite-word normality: verdicts in both digit systems, denominator
//! normality, the concatenation bound, and the binary increment split.
//!
//! Run with: cargo run --example normality_verdicts

use cfnorm::cf::CfBlock;
use cfnorm::normality::{
    binary_add, cf_word, check_denominator_normal, check_normal, concat_discrepancy_bound,
    increment_decomposition, lower_order_normality, DenomDivisor, NormalitySpec, Target, Word,
};
use cfnorm::rational::{rat_to_string, rat_u64};

fn main() {
    // CF side: how often the digit pair (1,1) shows up in a block
    let w = cf_word(&[1, 1, 2, 1, 1]);
    let spec = NormalitySpec::plain(rat_u64(1, 2), Target::Word(cf_word(&[1, 1])));
    let v = check_normal(&w, &spec).unwrap();
    let c = &v.checkpoints[0];
    println!(
        "(1,1,2,1,1) vs (1,1): count {} window {} discrepancy {:.4} pass {}",
        c.count,
        c.window,
        c.discrepancy.unwrap(),
        v.pass
    );

    // base-2 side with stride and star
    let s = Word::base(2, vec![0, 0, 0, 0]).unwrap();
    let spec = NormalitySpec::starred(rat_u64(1, 10), Target::AllOfLength(1), 2);
    println!("0000 starred stride-2: pass {}", check_normal(&s, &spec).unwrap().pass);

    // denominator normality of the all-ones block fails: Fibonacci growth
    // is far below the Khinchin-Levy rate
    let fib = CfBlock::from_u64s(&[1; 12]);
    let v = check_denominator_normal(&fib, &rat_u64(3, 10), 4, DenomDivisor::PrefixLen).unwrap();
    println!("(1)^12 denominator-normal at eps=3/10: {}", v.pass);

    // the concatenation bound and its limit behavior
    for v_len in [100usize, 1000, 10000] {
        let bound = concat_discrepancy_bound(2, v_len, &[v_len], &rat_u64(1, 10)).unwrap();
        println!("fully tiled container of {v_len}: bound {}", rat_to_string(&bound));
    }
    println!(
        "order-lowering at (eps=1/100, k=2, |w|=100): {}",
        rat_to_string(&lower_order_normality(&rat_u64(1, 100), 2, 100, 1, 2).unwrap())
    );

    // adding 1 to a starred-normal binary string only disturbs a short tail
    let s = Word::base(2, vec![0, 1, 1, 0, 0, 1, 1, 1, 0, 0]).unwrap();
    let (prefix, tail) = increment_decomposition(&s, 1, &rat_u64(1, 7), 1, 4).unwrap();
    println!(
        "{} + 1 = {}: normal prefix {prefix} digits, tail {tail}",
        s,
        binary_add(&s, 1).unwrap()
    );
}
