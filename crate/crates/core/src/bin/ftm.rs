//! Command-line front end.
//!
//! Exit status: 0 on success (whatever the decision), 1 on usage errors or
//! unmet preconditions, 2 on malformed input files, 3 when a budget or limit
//! runs out before an answer.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use finalize::exact::{ftm_backtrack, ftm_bruteforce, ExactError};
use finalize::gen::{
    firing_to_ftm_rm, normalize_sat, parse_dimacs, parse_firing, random_instance, sat_to_firing, sat_to_ftm,
    FiringError, RandomParams,
};
use finalize::rm::{emit_ip, find_prescription, ftm_rm_marriage, prescription_to_extension, target_set, RmError};
use finalize::rm::{validate_prescription, Mode, RootPolicy, DEFAULT_Z_CAP};
use finalize::sim::{format_table, simulate, SimConfig};
use finalize::{maximal_safe_set, parse_instance, run_da, Instance, Match, MatchSet};

#[derive(Parser)]
#[command(name = "ftm", version, about = "Finalizability of tentative matches in truncated instances")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Query {
    /// Instance file; `-` reads standard input.
    file: PathBuf,
    /// The match under test; defaults to the file's query line.
    #[arg(long, num_args = 2, value_names = ["RESIDENT", "HOSPITAL"])]
    query: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    WithPending,
    POnly,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run deferred acceptance and print prop, rej, tent and pend.
    Da { file: PathBuf },
    /// Maximal safe set with its removal trace.
    Safe { file: PathBuf },
    /// Exact finalizability by backtracking, or by enumeration with --limit.
    Ftm {
        #[command(flatten)]
        q: Query,
        /// Node budget for the backtracking search.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Enumerate completion classes instead, giving up past this many.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// The digraph algorithm for resident-minimal marriage instances.
    FtmRm {
        #[command(flatten)]
        q: Query,
        #[arg(long, value_enum, default_value_t = Policy::WithPending)]
        policy: Policy,
    },
    /// Search for a prescription rejecting the match.
    Presc {
        #[command(flatten)]
        q: Query,
    },
    /// Emit the prescription integer program in LP format.
    Ip {
        #[command(flatten)]
        q: Query,
        /// Largest pending group expanded into subset variables.
        #[arg(long, default_value_t = DEFAULT_Z_CAP)]
        z_cap: usize,
    },
    /// SAT gadget instance from a DIMACS file, with query (r1,h0).
    GenSatFtm { dimacs: PathBuf },
    /// Firing instance from a DIMACS file.
    GenFiring { dimacs: PathBuf },
    /// Resident-minimal instance from a firing file.
    GenFiringFtm { firing: PathBuf },
    /// Random instance.
    GenRandom {
        #[arg(long, default_value_t = 4)]
        residents: usize,
        #[arg(long, default_value_t = 4)]
        hospitals: usize,
        #[arg(long, default_value_t = 2)]
        max_quota: usize,
        /// Resident list length bounds, `MIN..MAX` inclusive; defaults to any length.
        #[arg(long)]
        resident_len: Option<String>,
        /// Hospital list length bounds, `MIN..MAX` inclusive; defaults to any length.
        #[arg(long)]
        hospital_len: Option<String>,
        #[arg(long)]
        resident_minimal: bool,
        #[arg(long)]
        hospital_complete: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Round-one statistics of the student/supervisor market.
    Sim {
        #[arg(long, default_value_t = 100)]
        students: usize,
        #[arg(long, default_value_t = 10)]
        supervisors: usize,
        #[arg(long, default_value_t = 4)]
        topics: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 0.1)]
        sigma1: f64,
        #[arg(long, default_value_t = 0.1)]
        sigma2: f64,
        /// One table row per value.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7])]
        sigma3: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl ToString) -> Failure {
    Failure { code: 1, msg: msg.to_string() }
}

fn bad_input(msg: impl ToString) -> Failure {
    Failure { code: 2, msg: msg.to_string() }
}

fn exhausted(msg: impl ToString) -> Failure {
    Failure { code: 3, msg: msg.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| usage(format!("stdin: {e}")));
    }
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Instance, Option<Match>), Failure> {
    let p = parse_instance(&read(path)?).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    Ok((p.instance, p.query))
}

fn load_query(q: &Query) -> Result<(Instance, Match), Failure> {
    let (inst, from_file) = load(&q.file)?;
    let m = match &q.query {
        Some(v) => inst.find_match(&v[0], &v[1]).ok_or_else(|| usage(format!("unknown match ({},{})", v[0], v[1])))?,
        None => from_file.ok_or_else(|| usage("no --query given and the file has no query line"))?,
    };
    Ok((inst, m))
}

fn pairs(inst: &Instance, set: &MatchSet) -> Value {
    json!(inst.named_pairs(set))
}

fn pair(inst: &Instance, m: Match) -> Value {
    json!([inst.resident_name(m.r), inst.hospital_name(m.h)])
}

fn rm_failure(e: RmError) -> Failure {
    match e {
        RmError::ZCap { .. } => exhausted(e),
        _ => usage(e),
    }
}

fn parse_range(s: &Option<String>, default: (usize, usize)) -> Result<(usize, usize), Failure> {
    let Some(s) = s else {
        return Ok(default);
    };
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("expected MIN..MAX, got `{s}`")))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| usage(format!("bad bound `{x}`")));
    Ok((num(a)?, num(b)?))
}

/// Returns the text to print.
fn dispatch(cmd: Cmd, as_json: bool) -> Result<String, Failure> {
    let out = |v: Value, text: String| if as_json { format!("{v:#}\n") } else { text };
    match cmd {
        Cmd::Da { file } => {
            let (inst, _) = load(&file)?;
            let run = run_da(&inst);
            let v = json!({
                "prop": pairs(&inst, &run.prop),
                "rej": pairs(&inst, &run.rej),
                "tent": pairs(&inst, &run.tent),
                "pend": pairs(&inst, &run.pend),
            });
            let text = format!(
                "prop {}\nrej  {}\ntent {}\npend {}\n",
                inst.fmt_set(&run.prop),
                inst.fmt_set(&run.rej),
                inst.fmt_set(&run.tent),
                inst.fmt_set(&run.pend)
            );
            Ok(out(v, text))
        }
        Cmd::Safe { file } => {
            let (inst, _) = load(&file)?;
            let rep = maximal_safe_set(&inst);
            let trace: Vec<Value> = rep
                .removal_trace
                .iter()
                .map(|(i, removed)| json!({ "iteration": i, "removed": pairs(&inst, removed) }))
                .collect();
            let v = json!({ "maximal_safe": pairs(&inst, &rep.maximal_safe), "trace": trace });
            let mut text = format!("maximal safe set {}\n", inst.fmt_set(&rep.maximal_safe));
            for (i, removed) in &rep.removal_trace {
                text.push_str(&format!("iteration {i}: removed {}\n", inst.fmt_set(removed)));
            }
            Ok(out(v, text))
        }
        Cmd::Ftm { q, budget, limit } => {
            let (inst, m) = load_query(&q)?;
            let ans = match limit {
                Some(l) => ftm_bruteforce(&inst, m, l),
                None => ftm_backtrack(&inst, m, budget),
            }
            .map_err(|e| match e {
                ExactError::LimitExceeded { .. } => exhausted(e),
                ExactError::NotTentative(_) => usage(e),
            })?;
            let Some(fin) = ans.finalizable() else {
                return Err(exhausted(format!("node budget of {budget} exhausted")));
            };
            let cex = ans.counterexample.as_ref().map(|j| j.to_text(Some(m)));
            let v = json!({
                "match": pair(&inst, m),
                "finalizable": fin,
                "stats": ans.stats,
                "counterexample": cex,
            });
            let mut text = format!("{} finalizable: {fin}\n", inst.fmt_match(m));
            text.push_str(&format!("nodes {} leaves {}\n", ans.stats.nodes, ans.stats.completions));
            if let Some(c) = cex {
                text.push_str("counterexample:\n");
                text.push_str(&c);
            }
            Ok(out(v, text))
        }
        Cmd::FtmRm { q, policy } => {
            let (inst, m) = load_query(&q)?;
            let policy = match policy {
                Policy::WithPending => RootPolicy::WithPending,
                Policy::POnly => RootPolicy::POnly,
            };
            let ans = ftm_rm_marriage(&inst, m, policy).map_err(rm_failure)?;
            let path: Option<Vec<Value>> = ans.path.as_ref().map(|p| p.iter().map(|&x| pair(&inst, x)).collect());
            let v = json!({ "match": pair(&inst, m), "finalizable": ans.finalizable, "path": path });
            let mut text = format!("{} finalizable: {}\n", inst.fmt_match(m), ans.finalizable);
            if let Some(p) = &ans.path {
                let steps: Vec<String> = p.iter().map(|&x| inst.fmt_match(x)).collect();
                text.push_str(&format!("chain {}\n", steps.join(" -> ")));
            }
            Ok(out(v, text))
        }
        Cmd::Presc { q } => {
            let (inst, m) = load_query(&q)?;
            let Some(p) = find_prescription(&inst, m).map_err(rm_failure)? else {
                let v = json!({ "match": pair(&inst, m), "prescription": null });
                return Ok(out(v, format!("no prescription rejects {}\n", inst.fmt_match(m))));
            };
            let verdict = validate_prescription(&inst, &p, Mode::General).map_err(rm_failure)?;
            let (ext, _) = prescription_to_extension(&inst, &p).map_err(rm_failure)?;
            let target = target_set(&p);
            let v = json!({
                "match": pair(&inst, m),
                "prescription": { "p": pairs(&inst, &p.p), "x": pairs(&inst, &p.x), "target": pairs(&inst, &target) },
                "valid": verdict.valid,
                "extension": ext.to_text(Some(m)),
            });
            let text = format!(
                "P {}\nX {}\ntarget {}\nvalid {}\nextension:\n{}",
                inst.fmt_set(&p.p),
                inst.fmt_set(&p.x),
                inst.fmt_set(&target),
                verdict.valid,
                ext.to_text(Some(m))
            );
            Ok(out(v, text))
        }
        Cmd::Ip { q, z_cap } => {
            let (inst, m) = load_query(&q)?;
            let lp = emit_ip(&inst, m, z_cap).map_err(rm_failure)?;
            Ok(out(json!({ "match": pair(&inst, m), "lp": lp }), lp.clone()))
        }
        Cmd::GenSatFtm { dimacs } => {
            let s = parse_dimacs(&read(&dimacs)?).map_err(bad_input)?;
            let (inst, m) = sat_to_ftm(&normalize_sat(&s)).map_err(usage)?;
            let text = inst.to_text(Some(m));
            Ok(out(json!({ "instance": text, "query": pair(&inst, m) }), text.clone()))
        }
        Cmd::GenFiring { dimacs } => {
            let s = parse_dimacs(&read(&dimacs)?).map_err(bad_input)?;
            let f = sat_to_firing(&normalize_sat(&s)).map_err(usage)?;
            let text = f.to_text();
            Ok(out(json!({ "firing": text }), text.clone()))
        }
        Cmd::GenFiringFtm { firing } => {
            let f = parse_firing(&read(&firing)?).map_err(|e| match e {
                FiringError::Parse(..) => bad_input(e),
                _ => usage(e),
            })?;
            let (inst, m) = firing_to_ftm_rm(&f).map_err(usage)?;
            let text = inst.to_text(Some(m));
            Ok(out(json!({ "instance": text, "query": pair(&inst, m) }), text.clone()))
        }
        Cmd::GenRandom {
            residents,
            hospitals,
            max_quota,
            resident_len,
            hospital_len,
            resident_minimal,
            hospital_complete,
            seed,
        } => {
            let mut params = RandomParams::new(residents, hospitals, max_quota)
                .resident_minimal(resident_minimal)
                .hospital_complete(hospital_complete);
            params.resident_len = parse_range(&resident_len, params.resident_len)?;
            params.hospital_len = parse_range(&hospital_len, params.hospital_len)?;
            let inst = random_instance(&params, seed).map_err(usage)?;
            let text = inst.to_text(None);
            Ok(out(json!({ "instance": text, "seed": seed }), text.clone()))
        }
        Cmd::Sim { students, supervisors, topics, k, r, sigma1, sigma2, sigma3, runs, seed } => {
            if runs == 0 {
                return Err(usage("runs must be at least 1"));
            }
            let mut rows = Vec::new();
            for s3 in sigma3 {
                let cfg = SimConfig {
                    n_students: students,
                    n_supervisors: supervisors,
                    n_topics: topics,
                    k,
                    r,
                    sigma1,
                    sigma2,
                    sigma3: s3,
                    runs,
                    seed,
                };
                cfg.validate().map_err(usage)?;
                rows.push(simulate(&cfg));
            }
            Ok(out(json!(rows), format_table(&rows)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.cmd, cli.json) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
