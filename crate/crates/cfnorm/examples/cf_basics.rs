//! Exact CF arithmetic on one rational: both expansion variants,
//! convergents, the cylinder interval with its two measures, the reversal
//! symmetry, and the base-2 digit window.
//!
//! Run with: cargo run --example cf_basics

use cfnorm::cf::{
    base_digit_window, cf_eval, cf_expand, convergents, cylinder, reversal_numerator, Variant,
};
use cfnorm::rational::{rat_to_string, rat_u64};

fn main() {
    let r = rat_u64(7, 10);
    let short = cf_expand(&r, Variant::Short).unwrap();
    let long = cf_expand(&r, Variant::Long).unwrap();
    println!("7/10 = [{short}] = [{long}]");
    assert_eq!(cf_eval(&short), r);
    assert_eq!(cf_eval(&long), r);

    let table = convergents(&short);
    for n in 0..=short.len() as i64 {
        println!("  convergent {n}: {}", rat_to_string(&table.value_at(n)));
    }

    let (p_star, q) = reversal_numerator(&short).unwrap();
    println!("  reversal numerator p* = {p_star} (mod {q}); p p* + (-1)^|B| = 0 mod q");

    let cyl = cylinder(&short);
    println!(
        "  cylinder [{}, {}): lebesgue {} gauss_ratio {} gauss measure {:.6}",
        rat_to_string(&cyl.lo),
        rat_to_string(&cyl.hi),
        rat_to_string(&cyl.lebesgue),
        rat_to_string(&cyl.gauss_ratio),
        cyl.gauss_measure().to_f64(),
    );

    let w = base_digit_window(&cyl.lo, &cyl.hi, 2).unwrap();
    println!(
        "  base-2 window: {} digits pinned, prefix {:?} (ambiguous tail: {})",
        w.length,
        w.digits(),
        w.ambiguous_tail
    );
}
