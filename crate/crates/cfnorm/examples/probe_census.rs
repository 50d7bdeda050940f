use cfnorm::census::{census_sweep, primes_up_to, VariantPolicy};
use cfnorm::cf::CfBlock;
use cfnorm::rational::{rat_to_f64, rat_u64};
use cfnorm::workers::Pool;

fn main() {
    let pool = Pool::new(4);
    let mut ds: Vec<u64> = (1..=10).map(|e| 3u64.pow(e)).collect();
    let primes = primes_up_to(10_000);
    ds.extend(primes.iter().step_by(25).copied());
    ds.sort_unstable();
    ds.dedup();
    let u = CfBlock::from_u64s(&[1]);
    let fit = census_sweep(&ds, &u, &rat_u64(1, 10), VariantPolicy::Either, &pool, |r| {
        println!("d={:>6} prop={:.5} bad={}/{}", r.d, rat_to_f64(&r.proportion), r.bad_count, r.total);
    }).unwrap();
    println!("eta = {:?}", fit.fitted_eta);
}
