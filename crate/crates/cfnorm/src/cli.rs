//! The `cfnorm` command-line front end: one subcommand per subsystem,
//! JSONL/CSV output with exact rationals as strings, deterministic across
//! worker counts.

use crate::census::{
    ce_string_census, census_sweep, denominator_normal_census, dyadic_segment_census,
    farey_length_stats, scheerer_measure, CeMode, DyadicMode, ScheererOptions, VariantPolicy,
};
use crate::cf::{base_digit_window, cf_expand, convergents, cylinder, CfBlock, Variant};
use crate::constructor::{phi_prefix, ConditionEVariant, ConstructionParams, Regime};
use crate::error::Error;
use crate::farey::{farey_iter, farey_neighbors, neighbor_cf_forms};
use crate::normality::{
    check_denominator_normal, check_normal, DenomDivisor, NormalitySpec, Target, Word,
};
use crate::rational::{rat_from_str, rat_to_f64, rat_to_string, Rational};
use crate::splitter::{split_block, verify_split_bounds, MPolicy};
use crate::workers::Pool;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;
#[cfg(test)]
use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "cfnorm",
    about = "Exact continued-fraction and base-b digit statistics",
    version
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Worker threads (CFNORM_WORKERS overrides this flag).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for record streams: jsonl | csv.
    #[arg(long, global = true, default_value = "jsonl")]
    format: String,
    /// Seed for randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optional key=value file mirroring long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a rational, with convergents, cylinder, and digit window.
    Cf {
        /// The rational, as p/q in (0, 1].
        rational: String,
        #[arg(long, default_value = "short")]
        variant: String,
        /// Also report the base-b digit window of the cylinder.
        #[arg(long)]
        base: Option<u64>,
    },
    /// Enumerate F_m or inspect the neighborhood of one member.
    Farey {
        #[arg(long)]
        m: u64,
        /// A member p/q of F_m to report neighbors and CF forms for.
        #[arg(long)]
        around: Option<String>,
    },
    /// Exhaustive split-defect report for one denominator.
    Split {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        b: u64,
        /// Check a single threshold instead of every valid one.
        #[arg(long)]
        m: Option<u64>,
        /// all-valid | canonical
        #[arg(long, default_value = "all-valid")]
        policy: String,
    },
    /// Normality verdict for a word.
    Normal {
        /// cf | base:<b>
        #[arg(long)]
        system: String,
        /// Comma-separated digits of the word.
        #[arg(long)]
        word: String,
        /// u:<csv digits> | k:<len> for all words of a length.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        star: bool,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        /// Check denominator normality of a CF word instead.
        #[arg(long)]
        denominator: bool,
    },
    /// Counting experiments.
    Census {
        #[command(subcommand)]
        which: CensusCommand,
    },
    /// Toy-scale staged construction.
    Construct {
        /// cf-vs-bases | base2-vs-base3
        #[arg(long, default_value = "cf-vs-bases")]
        regime: String,
        /// Comma-separated z values.
        #[arg(long)]
        z: String,
        #[arg(long)]
        stages: usize,
        /// Comma-separated per-stage N values.
        #[arg(long, default_value = "6,11")]
        n_floor: String,
        #[arg(long, default_value_t = 9)]
        n0: usize,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value = "1/1")]
        eps_decay: String,
        #[arg(long)]
        strict: bool,
        /// written | lemma: window formula for the segment condition.
        #[arg(long, default_value = "written")]
        e_variant: String,
        #[arg(long, default_value_t = 2_000_000)]
        search_budget: u64,
    },
    /// Run the small exhaustive invariant suites.
    Selftest {},
}

#[derive(Subcommand, Debug)]
enum CensusCommand {
    /// Fixed-denominator normality census over a list of d.
    Thm14 {
        /// "a..b" (inclusive), comma list, or file:<path> with one d per line.
        #[arg(long)]
        d_list: String,
        /// Target CF word, comma-separated digits.
        #[arg(long)]
        u: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "either")]
        policy: String,
    },
    /// Shortest-expansion length statistics over F_m.
    FareyLengths {
        #[arg(long)]
        m: u64,
    },
    /// Count base-b strings failing finite normality.
    Ce {
        #[arg(long, default_value_t = 2)]
        b: u64,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u32,
        /// plain | stride:<m> | star:<m>
        #[arg(long, default_value = "plain")]
        mode: String,
        #[arg(long, default_value_t = 1 << 26)]
        budget: u64,
    },
    /// Denominator-normality proportion over the derived F_m.
    Denominator {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 20_000)]
        cap: u64,
    },
    /// Segment census over fractions with a prime-power denominator.
    Dyadic {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value = "0/1")]
        lo: String,
        #[arg(long, default_value = "1/1")]
        hi: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: usize,
        /// lemma46:<ell> | lemma47:<b'>
        #[arg(long)]
        mode: String,
    },
    /// Enclose the measure of the non-normal set at CF depth n.
    Scheerer {
        #[arg(long)]
        eps: String,
        /// Target block, comma-separated digits.
        #[arg(long)]
        a: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        cap: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u128,
    },
}

/// Entry point used by the binary: parse, dispatch, map errors to exit
/// codes (0 success, 2 domain, 3 refusal, 64 usage).
pub fn dispatch(argv: &[String]) -> i32 {
    let argv = match apply_config(argv) {
        Ok(v) => v,
        Err(e) => return emit_error(&e),
    };
    let cli = match CliArgs::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 64;
        }
    };
    let pool = Pool::from_env_or(cli.run.workers);
    let mut sink: Box<dyn Write> = match &cli.run.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
                return 2;
            }
        },
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    };
    let result = run_command(cli.command, &cli.run, &pool, &mut sink);
    if sink.flush().is_err() {
        return 2;
    }
    match result {
        Ok(code) => code,
        Err(e) => emit_error(&e),
    }
}

fn emit_error(e: &Error) -> i32 {
    match e {
        Error::Domain(msg) => {
            eprintln!("{}", json!({"error": "domain", "message": msg}));
            2
        }
        Error::Boundary(msg) => {
            eprintln!("{}", json!({"error": "boundary", "message": msg}));
            2
        }
        Error::Refused {
            reason,
            estimated_cost,
        } => {
            eprintln!(
                "{}",
                json!({
                    "error": "refused",
                    "message": reason,
                    "estimated_cost": estimated_cost.map(|c| c.to_string()),
                })
            );
            3
        }
    }
}

/// Merge `key=value` lines from the config file into the argument list,
/// skipping keys the user passed explicitly.
fn apply_config(argv: &[String]) -> Result<Vec<String>, Error> {
    let mut args: Vec<String> = argv.to_vec();
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| Error::domain("--config needs a path"))?
        .clone();
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::domain(format!("config {path}: {e}")))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("config line without '=': {line}")))?;
        let flag = format!("--{}", key.trim());
        if !args.iter().any(|a| a == &flag) {
            args.push(flag);
            args.push(value.trim().to_string());
        }
    }
    Ok(args)
}

fn format_real(x: f64) -> String {
    format!("{x:.11e}")
}

fn parse_block(s: &str) -> Result<CfBlock, Error> {
    s.parse()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::domain(format!("bad integer {p:?}")))
        })
        .collect()
}

fn parse_word(system: &str, digits: &str) -> Result<Word, Error> {
    match system {
        "cf" => Ok(Word::cf(parse_block(digits)?)),
        s => {
            let base = s
                .strip_prefix("base:")
                .and_then(|b| b.parse::<u64>().ok())
                .ok_or_else(|| {
                    Error::domain(format!("system must be cf or base:<b>, got {s:?}"))
                })?;
            Word::base(base, parse_u64_list(digits)?)
        }
    }
}

fn run_command(
    command: Command,
    run: &RunFlags,
    pool: &Pool,
    sink: &mut dyn Write,
) -> Result<i32, Error> {
    match command {
        Command::Cf {
            rational,
            variant,
            base,
        } => {
            let r = rat_from_str(&rational)?;
            let variant = match variant.as_str() {
                "short" => Variant::Short,
                "long" => Variant::Long,
                v => {
                    return Err(Error::domain(format!(
                        "variant must be short|long, got {v:?}"
                    )))
                }
            };
            let block = cf_expand(&r, variant)?;
            let table = convergents(&block);
            let cyl = cylinder(&block);
            let mut obj = json!({
                "rational": rat_to_string(&r),
                "variant": if variant == Variant::Short { "short" } else { "long" },
                "block": block.to_string(),
                "convergents": (0..=block.len() as i64)
                    .map(|n| rat_to_string(&table.value_at(n)))
                    .collect::<Vec<_>>(),
                "cylinder": {
                    "lo": rat_to_string(&cyl.lo),
                    "hi": rat_to_string(&cyl.hi),
                    "lebesgue": rat_to_string(&cyl.lebesgue),
                    "gauss_ratio": rat_to_string(&cyl.gauss_ratio),
                    "gauss_measure": format_real(cyl.gauss_measure().to_f64()),
                },
            });
            if let Some(b) = base {
                let w = base_digit_window(&cyl.lo, &cyl.hi, b)?;
                obj["window"] = json!({
                    "base": b,
                    "length": w.length,
                    "prefix_value": w.prefix_value.to_string(),
                    "digits": w.digits(),
                    "ambiguous_tail": w.ambiguous_tail,
                });
            }
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        Command::Farey { m, around } => {
            match around {
                Some(x) => {
                    let x = rat_from_str(&x)?;
                    let sides = farey_neighbors(&x, m)?;
                    let mut obj = json!({
                        "m": m,
                        "x": rat_to_string(&x),
                        "predecessor": sides.predecessor.as_ref().map(|p| rat_to_string(&p.left)),
                        "successor": sides.successor.as_ref().map(|p| rat_to_string(&p.right)),
                    });
                    if x.denom() > &BigInt::from(1) {
                        let (this, dec, drop) = neighbor_cf_forms(&x, m)?;
                        obj["cf_forms"] = json!({
                            "this": this.to_string(),
                            "decremented": dec.to_string(),
                            "dropped": drop.to_string(),
                        });
                    }
                    writeln!(sink, "{obj}").ok();
                }
                None => {
                    for f in farey_iter(m) {
                        writeln!(sink, "{}", rat_to_string(&f)).ok();
                    }
                }
            }
            Ok(0)
        }
        Command::Split { d, b, m, policy } => {
            match m {
                Some(m) => {
                    let mut histogram = std::collections::BTreeMap::new();
                    let mut checked = 0u64;
                    for a in 1..d {
                        if num_integer::gcd(a, d) != 1 {
                            continue;
                        }
                        for variant in [Variant::Short, Variant::Long] {
                            let block = cf_expand(&crate::rational::rat_u64(a, d), variant)?;
                            let s = split_block(&block, &BigInt::from(m), b)?;
                            *histogram.entry(s.defect).or_insert(0u64) += 1;
                            checked += 1;
                        }
                    }
                    let obj = json!({
                        "d": d, "b": b, "m": m, "checked": checked,
                        "lower_bound": crate::splitter::split_lower_bound(b),
                        "histogram": histogram.iter()
                            .map(|(k, v)| json!({"defect": k, "count": v}))
                            .collect::<Vec<_>>(),
                    });
                    writeln!(sink, "{obj}").ok();
                }
                None => {
                    let policy = match policy.as_str() {
                        "all-valid" => MPolicy::AllValid,
                        "canonical" => MPolicy::Canonical,
                        p => {
                            return Err(Error::domain(format!(
                                "policy must be all-valid|canonical, got {p:?}"
                            )))
                        }
                    };
                    let r = verify_split_bounds(d, b, policy, pool)?;
                    let obj = json!({
                        "d": r.d, "b": r.b, "lower_bound": r.lower_bound,
                        "checked": r.checked,
                        "min_defect": r.min_defect, "max_defect": r.max_defect,
                        "violations": r.violations,
                        "histogram": r.histogram.iter()
                            .map(|(k, v)| json!({"defect": k, "count": v}))
                            .collect::<Vec<_>>(),
                    });
                    writeln!(sink, "{obj}").ok();
                }
            }
            Ok(0)
        }
        Command::Normal {
            system,
            word,
            target,
            eps,
            stride,
            star,
            offset,
            denominator,
        } => {
            let eps = rat_from_str(&eps)?;
            if denominator {
                if system != "cf" {
                    return Err(Error::domain("denominator normality needs --system cf"));
                }
                let block = parse_block(&word)?;
                let v = check_denominator_normal(&block, &eps, stride, DenomDivisor::PrefixLen)?;
                let obj = json!({
                    "pass": v.pass,
                    "first_failure": v.first_failure,
                    "checkpoints": v.checkpoints.iter().map(|c| json!({
                        "prefix_len": c.prefix_len,
                        "q": c.q.to_string(),
                        "log_q_over_len": format_real(c.log_q_over_div),
                        "pass": c.pass,
                        "boundary": c.boundary,
                    })).collect::<Vec<_>>(),
                });
                writeln!(sink, "{obj}").ok();
                return Ok(0);
            }
            let w = parse_word(&system, &word)?;
            let target = target
                .ok_or_else(|| Error::domain("--target is required unless --denominator"))?;
            let target = if let Some(k) = target.strip_prefix("k:") {
                Target::AllOfLength(
                    k.parse()
                        .map_err(|_| Error::domain(format!("bad k in target {target:?}")))?,
                )
            } else {
                let digits = target.strip_prefix("u:").unwrap_or(&target);
                match &w {
                    Word::Cf(_) => Target::Word(Word::cf(parse_block(digits)?)),
                    Word::Base { base, .. } => {
                        Target::Word(Word::base(*base, parse_u64_list(digits)?)?)
                    }
                }
            };
            let spec = NormalitySpec {
                epsilon: eps,
                target,
                stride,
                starred: star,
                offset,
            };
            let v = check_normal(&w, &spec)?;
            let obj = json!({
                "pass": v.pass,
                "first_failure": v.first_failure,
                "checkpoints": v.checkpoints.iter().map(|c| json!({
                    "prefix_len": c.prefix_len,
                    "word": c.word.to_string(),
                    "count": c.count,
                    "window": c.window,
                    "frequency": c.frequency.as_ref().map(rat_to_string),
                    "discrepancy": c.discrepancy.map(format_real),
                    "reversed": c.reversed,
                    "boundary": c.boundary,
                    "pass": c.pass,
                })).collect::<Vec<_>>(),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        Command::Census { which } => run_census(which, run, pool, sink),
        Command::Construct {
            regime,
            z,
            stages,
            n_floor,
            n0,
            eps,
            eps_decay,
            strict,
            e_variant,
            search_budget,
        } => {
            let params = ConstructionParams {
                regime: Regime::parse(&regime)?,
                n0,
                n_floor: parse_u64_list(&n_floor)?,
                epsilon_initial: rat_from_str(&eps)?,
                epsilon_decay: rat_from_str(&eps_decay)?,
                strict_inequalities: strict,
                condition_e: match e_variant.as_str() {
                    "written" => ConditionEVariant::AsWritten,
                    "lemma" => ConditionEVariant::LemmaAligned,
                    v => {
                        return Err(Error::domain(format!(
                            "e-variant must be written|lemma, got {v:?}"
                        )))
                    }
                },
                search_budget,
                ..ConstructionParams::default()
            };
            let z = parse_u64_list(&z)?;
            let run_out = phi_prefix(&z, stages, &params, pool)?;
            let obj = json!({
                "digits": run_out.digits.to_string(),
                "length": run_out.digits.len(),
                "stages": run_out.stages.iter().map(|s| json!({
                    "rank": s.rank,
                    "stage": [s.stage.0, s.stage.1],
                    "base": s.base,
                    "n": s.n_param,
                    "m": s.m.as_ref().map(|v| v.to_string()),
                    "d": s.d.as_ref().map(|v| v.to_string()),
                    "f": s.f,
                    "a": s.candidate_a.as_ref().map(|v| v.to_string()),
                    "variant": s.candidate_variant.map(|v| format!("{v:?}")),
                    "scanned": s.scanned,
                    "conditions": s.report.as_ref().map(|r| r.entries.iter().map(|e| json!({
                        "name": e.name, "pass": e.pass, "detail": e.detail,
                    })).collect::<Vec<_>>()),
                    "segments": s.segments.iter().map(|seg| json!({
                        "stage": [seg.stage.0, seg.stage.1],
                        "tag": seg.tag.name(),
                        "len": seg.len,
                    })).collect::<Vec<_>>(),
                    "truncation": s.truncation.as_ref().map(|t| json!({
                        "window_len": t.window_len,
                        "bound": rat_to_string(&t.bound),
                        "window_len_next": t.window_len_next,
                        "kept": t.kept,
                        "dropped": t.dropped,
                    })),
                    "runs": s.run_reports.iter().map(|r| json!({
                        "base": r.base,
                        "f": r.f,
                        "digit": r.digit,
                        "start": r.start,
                        "len": r.len,
                        "window_len": r.window_len,
                        "predicted_start": r.predicted_start,
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        Command::Selftest {} => selftest(pool, sink),
    }
}

fn run_census(
    which: CensusCommand,
    run: &RunFlags,
    pool: &Pool,
    sink: &mut dyn Write,
) -> Result<i32, Error> {
    match which {
        CensusCommand::Thm14 {
            d_list,
            u,
            eps,
            policy,
        } => {
            let ds = parse_d_list(&d_list)?;
            let u = parse_block(&u)?;
            let eps = rat_from_str(&eps)?;
            let policy = VariantPolicy::parse(&policy)?;
            let csv = run.format == "csv";
            if csv {
                writeln!(sink, "d,word,epsilon,policy,bad_count,total,proportion").ok();
            }
            let mut rows: Vec<String> = Vec::new();
            let fit = census_sweep(&ds, &u, &eps, policy, pool, |r| {
                let line = if csv {
                    format!(
                        "{},{},{},{},{},{},{}",
                        r.d,
                        r.word,
                        rat_to_string(&r.epsilon),
                        r.policy.name(),
                        r.bad_count,
                        r.total,
                        rat_to_string(&r.proportion)
                    )
                } else {
                    json!({
                        "d": r.d,
                        "word": r.word.to_string(),
                        "epsilon": rat_to_string(&r.epsilon),
                        "policy": r.policy.name(),
                        "bad_count": r.bad_count,
                        "total": r.total,
                        "proportion": rat_to_string(&r.proportion),
                    })
                    .to_string()
                };
                rows.push(line);
            })?;
            for row in rows {
                writeln!(sink, "{row}").ok();
            }
            if !csv {
                writeln!(
                    sink,
                    "{}",
                    json!({
                        "fit": {
                            "eta": fit.fitted_eta.map(format_real),
                            "intercept": fit.intercept.map(format_real),
                            "degenerate": fit.degenerate,
                        }
                    })
                )
                .ok();
            }
            Ok(0)
        }
        CensusCommand::FareyLengths { m } => {
            let s = farey_length_stats(m)?;
            let obj = json!({
                "m": s.m,
                "count": s.count,
                "mean_len": rat_to_string(&s.mean_len),
                "mean_len_approx": format_real(rat_to_f64(&s.mean_len)),
                "predicted": format_real(s.predicted),
                "length_counts": s.length_counts,
                "tail_counts": s.tail_counts.iter()
                    .map(|(z, c)| json!({"z": format_real(*z), "count": c}))
                    .collect::<Vec<_>>(),
                "c1_estimates": s.c1_estimates.iter()
                    .map(|(z, c)| json!({"z": format_real(*z), "c1": format_real(*c)}))
                    .collect::<Vec<_>>(),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        CensusCommand::Ce {
            b,
            len,
            eps,
            k,
            mode,
            budget,
        } => {
            let eps = rat_from_str(&eps)?;
            let mode = CeMode::parse(&mode)?;
            let r = ce_string_census(b, len, &eps, k, mode, budget, pool)?;
            let obj = json!({
                "base": r.base,
                "len": r.len,
                "k": r.k,
                "mode": format!("{:?}", r.mode),
                "count": r.count,
                "total": r.total,
                "delta_empirical": r.delta_empirical.map(format_real),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        CensusCommand::Denominator { n, eps, cap } => {
            let eps = rat_from_str(&eps)?;
            let r = denominator_normal_census(n, &eps, cap, pool)?;
            let obj = json!({
                "n": r.n_param,
                "epsilon": rat_to_string(&r.epsilon),
                "m": r.m,
                "stride": r.stride,
                "total": r.total,
                "bad": r.bad,
                "proportion": rat_to_string(&r.proportion),
                "predicted_shape": format_real(r.predicted_shape),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        CensusCommand::Dyadic {
            b,
            j,
            lo,
            hi,
            eps,
            k,
            m,
            mode,
        } => {
            let lo = rat_from_str(&lo)?;
            let hi = rat_from_str(&hi)?;
            let eps = rat_from_str(&eps)?;
            let mode = if let Some(ell) = mode.strip_prefix("lemma46:") {
                DyadicMode::AppendPower {
                    ell: ell
                        .parse()
                        .map_err(|_| Error::domain(format!("bad ell in {mode:?}")))?,
                }
            } else if let Some(bp) = mode.strip_prefix("lemma47:") {
                DyadicMode::CoprimeBase {
                    b_prime: bp
                        .parse()
                        .map_err(|_| Error::domain(format!("bad base in {mode:?}")))?,
                }
            } else {
                return Err(Error::domain(format!(
                    "mode must be lemma46:<ell> or lemma47:<b'>, got {mode:?}"
                )));
            };
            let r = dyadic_segment_census(b, j, &lo, &hi, &eps, k, m, mode)?;
            let obj = json!({
                "b": r.b,
                "j": r.j,
                "mode": format!("{:?}", r.mode),
                "a_count": r.a_count,
                "bad_count": r.bad_count,
                "bad_blocks_short": r.bad_blocks.0,
                "bad_blocks_long": r.bad_blocks.1,
                "j0": r.j0,
                "seg_len": r.seg_len,
                "j_assumption_holds": r.j_assumption_holds,
                "degenerate": r.degenerate,
                "tiling_ok": r.tiling_ok,
                "c3_deviation": r.c3_deviation.map(|(a, b)| json!([a, b])),
                "lambda_interval": rat_to_string(&r.lambda_interval),
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
        CensusCommand::Scheerer {
            eps,
            a,
            n,
            cap,
            budget,
        } => {
            let eps = rat_from_str(&eps)?;
            let a = parse_u64_list(&a)?;
            let r = scheerer_measure(
                &eps,
                &a,
                n,
                &ScheererOptions {
                    digit_cap: cap,
                    node_budget: budget,
                },
            )?;
            let obj = json!({
                "lower": rat_to_string(&r.lower),
                "upper": rat_to_string(&r.upper),
                "lower_approx": format_real(rat_to_f64(&r.lower)),
                "upper_approx": format_real(rat_to_f64(&r.upper)),
                "failing_leaves": r.failing_leaves,
                "total_leaves": r.total_leaves,
            });
            writeln!(sink, "{obj}").ok();
            Ok(0)
        }
    }
}

fn parse_d_list(s: &str) -> Result<Vec<u64>, Error> {
    if let Some(path) = s.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("d-list file {path}: {e}")))?;
        let mut ds = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            ds.push(
                line.parse()
                    .map_err(|_| Error::domain(format!("bad d {line:?}")))?,
            );
        }
        return Ok(ds);
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad range start {a:?}")))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad range end {b:?}")))?;
        if a > b {
            return Err(Error::domain("empty d range"));
        }
        return Ok((a..=b).collect());
    }
    parse_u64_list(s)
}

/// The small exhaustive invariant suites, one pass/fail line each.
fn selftest(pool: &Pool, sink: &mut dyn Write) -> Result<i32, Error> {
    use std::time::Instant;
    let mut all_ok = true;
    let run = |name: &str, sink: &mut dyn Write, f: &dyn Fn() -> bool, all_ok: &mut bool| {
        let t = Instant::now();
        let ok = f();
        *all_ok &= ok;
        writeln!(
            sink,
            "{}",
            json!({
                "suite": name,
                "pass": ok,
                "seconds": format_real(t.elapsed().as_secs_f64()),
            })
        )
        .ok();
    };

    run(
        "determinant-and-growth",
        sink,
        &|| {
            for_each_block(3, 6, &mut |digits| {
                let b = CfBlock::from_u64s(digits);
                let t = convergents(&b);
                for n in 0..=b.len() as i64 {
                    let det = t.p_at(n - 1) * t.q_at(n) - t.p_at(n) * t.q_at(n - 1);
                    let expect = if n % 2 == 0 { 1 } else { -1 };
                    if det != BigInt::from(expect) {
                        return false;
                    }
                }
                for n in 0..=(b.len() as i64 - 2) {
                    let lhs = t.q_at(n + 2).clone();
                    let rhs = t.q_at(n) * BigInt::from(2);
                    if lhs < rhs || (n >= 1 && lhs == rhs) {
                        return false;
                    }
                }
                true
            })
        },
        &mut all_ok,
    );

    run(
        "reversal-congruence",
        sink,
        &|| {
            for_each_block(3, 6, &mut |digits| {
                let b = CfBlock::from_u64s(digits);
                let p = convergents(&b).p_final().clone();
                let (p_star, q) = crate::cf::reversal_numerator(&b).unwrap();
                let sign = if b.len() % 2 == 0 { 1 } else { -1 };
                ((p * p_star + BigInt::from(sign)) % q).bits() == 0
            })
        },
        &mut all_ok,
    );

    run(
        "gauss-ratio-reversal",
        sink,
        &|| {
            for_each_block(3, 6, &mut |digits| {
                let b = CfBlock::from_u64s(digits);
                cylinder(&b).gauss_ratio == cylinder(&b.reversed()).gauss_ratio
            })
        },
        &mut all_ok,
    );

    run(
        "splitter-d500",
        sink,
        &|| {
            for d in 2..=500u64 {
                for b in [2u64, 3, 5] {
                    match verify_split_bounds(d, b, MPolicy::AllValid, pool) {
                        Ok(r) => {
                            if r.violations != 0 {
                                return false;
                            }
                        }
                        Err(_) => return false,
                    }
                }
            }
            true
        },
        &mut all_ok,
    );

    run(
        "farey-m100",
        sink,
        &|| {
            for m in 1..=100u64 {
                let fs: Vec<Rational> = farey_iter(m).collect();
                if fs.len() as u64 != crate::farey::farey_len(m) {
                    return false;
                }
                for w in fs.windows(2) {
                    let det = w[0].denom() * w[1].numer() - w[0].numer() * w[1].denom();
                    if det != BigInt::from(1) {
                        return false;
                    }
                }
            }
            true
        },
        &mut all_ok,
    );

    Ok(if all_ok { 0 } else { 1 })
}

fn for_each_block(max_digit: u64, max_len: usize, f: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    let mut stack: Vec<Vec<u64>> = (1..=max_digit).map(|d| vec![d]).collect();
    while let Some(digits) = stack.pop() {
        if !f(&digits) {
            return false;
        }
        if digits.len() < max_len {
            for d in 1..=max_digit {
                let mut next = digits.clone();
                next.push(d);
                stack.push(next);
            }
        }
    }
    true
}
