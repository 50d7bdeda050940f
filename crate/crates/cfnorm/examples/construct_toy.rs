//! Toy-scale staged construction in both regimes: emit a CF digit stream
//! whose base-p windows carry forced constant runs dialed by z.
//!
//! Run with: cargo run --release --example construct_toy

use cfnorm::constructor::{phi_prefix, ConstructionParams, Regime};
use cfnorm::workers::Pool;

fn main() {
    let pool = Pool::new(4);
    for (regime, z) in [
        (Regime::CfVsBases, vec![3u64, 4, 2, 1]),
        (Regime::Base2VsBase3, vec![3, 2, 1, 2]),
    ] {
        println!("=== {regime:?}, z = {z:?} ===");
        let params = ConstructionParams {
            regime,
            ..ConstructionParams::default()
        };
        let run = phi_prefix(&z, 2, &params, &pool).unwrap();
        println!("digit stream ({} digits): {}", run.digits.len(), run.digits);
        for stage in &run.stages {
            print!(
                "stage ({}, {}) base {}",
                stage.stage.0, stage.stage.1, stage.base
            );
            if let (Some(d), Some(f)) = (&stage.d, stage.f) {
                print!(": d = {d} = {}^{f}, scanned {}", stage.base, stage.scanned);
            }
            println!();
            for seg in &stage.segments {
                println!("    {} ({} digits)", seg.tag.name(), seg.len);
            }
            if let Some(t) = &stage.truncation {
                println!(
                    "    truncation kept {} dropped {} window {} (bound {})",
                    t.kept,
                    t.dropped,
                    t.window_len,
                    cfnorm::rational::rat_to_string(&t.bound)
                );
            }
            for r in &stage.run_reports {
                println!(
                    "    base-{} run of digit {} at position {} ({} digits; predicted start {})",
                    r.base, r.digit, r.start, r.len, r.predicted_start
                );
            }
        }
    }
}
