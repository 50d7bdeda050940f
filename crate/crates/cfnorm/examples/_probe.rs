use cfnorm::constructor::*;
use cfnorm::workers::Pool;
use std::time::Instant;

fn check(run: &ConstructionRun) -> (bool, String) {
    let mut notes = Vec::new();
    let mut ok = true;
    for s in run.stages.iter().skip(1) {
        let f = s.f.unwrap();
        match s.run_reports.iter().find(|r| r.base == s.base) {
            Some(r) => {
                if (r.start as i64 - (f as i64 + 1)).abs() > 2 {
                    ok = false; notes.push(format!("stage{:?} run at {} vs f+1={}", s.stage, r.start, f + 1));
                }
            }
            None => { ok = false; notes.push(format!("stage{:?} NO RUN", s.stage)); }
        }
    }
    (ok, notes.join("; "))
}

fn main() {
    let pool = Pool::new(4);
    let main_cfgs: Vec<(Vec<u64>, usize)> = vec![];
    let sec_cfgs: Vec<(Vec<u64>, usize)> = vec![
        
        (vec![2,2,3,1], 2),
    ];
    for (regime, cfgs) in [(Regime::CfVsBases, main_cfgs), (Regime::Base2VsBase3, sec_cfgs)] {
        println!("--- {regime:?} ---");
        for (z, stages) in cfgs {
            let t = Instant::now();
            let params = ConstructionParams { regime, ..ConstructionParams::default() };
            match phi_prefix(&z, stages, &params, &pool) {
                Ok(run) => { let (ok, notes) = check(&run); println!("z={z:?} st={stages}: {} {notes} [{:.1?}]", if ok {"RUNOK"} else {"BAD"}, t.elapsed()); }
                Err(e) => println!("z={z:?} st={stages}: ERR {} [{:.1?}]", format!("{e}").chars().take(70).collect::<String>(), t.elapsed()),
            }
        }
    }
    println!("DONE");
}
