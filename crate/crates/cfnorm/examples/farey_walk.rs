//! Farey structure: the ordered sequence, neighbor lookup by modular
//! inverse, the CF forms of neighbors, and the comparison of a point
//! against its enclosing Farey pair.
//!
//! Run with: cargo run --example farey_walk

use cfnorm::cf::CfBlock;
use cfnorm::farey::{
    compare_point_to_farey, count_residues_in_gap, farey_iter, farey_neighbors, gap_union_report,
    neighbor_cf_forms,
};
use cfnorm::rational::{rat_to_string, rat_u64};

fn main() {
    let f5: Vec<String> = farey_iter(5).map(|x| rat_to_string(&x)).collect();
    println!("F_5 = {}", f5.join(" "));

    let x = rat_u64(2, 5);
    let sides = farey_neighbors(&x, 5).unwrap();
    println!(
        "neighbors of 2/5 in F_5: {} and {}",
        rat_to_string(&sides.predecessor.unwrap().left),
        rat_to_string(&sides.successor.unwrap().right),
    );
    let (this, dec, drop) = neighbor_cf_forms(&x, 5).unwrap();
    println!("CF forms: this [{this}], neighbors [{dec}] and [{drop}]");

    // r_B = 7/10 against F_4: the prefix carrying r_B(4) has the same
    // length as the shortest block for the preceding fraction
    let cmp = compare_point_to_farey(&CfBlock::from_u64s(&[1, 2, 3]), 4).unwrap();
    println!(
        "[1,2,3] vs F_4: preceding {} r_B(4) {} defect {}",
        rat_to_string(&cmp.preceding),
        rat_to_string(&cmp.rb_at_m),
        cmp.defect
    );

    // coprime residues of d = 100 inside the gaps after 1/3
    let report = gap_union_report(100, &[rat_u64(1, 3)], 10).unwrap();
    println!(
        "gap after 1/3 in F_10: measure {} residues {} (bound holds: {})",
        rat_to_string(&report.total_measure),
        report.residue_total,
        report.bound_holds
    );
    let pair = &report.gaps[0].0;
    println!(
        "  residues of 10 in the same gap: {}",
        count_residues_in_gap(10, pair)
    );
}
