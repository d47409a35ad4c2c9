//! `etawb`: runs the verification suites and expands eta quotients.

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use etawb::checks::{
    verify_congruence, verify_dissection, verify_eta_identity, verify_gen9, verify_internal, verify_l_closed_form,
    verify_phi_e6, verify_theorem1, verify_theorem2,
};
use etawb::families::{FamilySpec, Mode};
use etawb::partitions::PartitionKind;
use etawb::report::{sorted, to_json, to_text, CheckReport};
use etawb::EtaQuotient;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "etawb", version, about = "Exact checks of partition congruences via eta quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Expand an eta quotient such as "1^-1 4^1 @ 4".
    Expand(ExpandArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Congruence,
    Internal,
    Dissection,
    Gen9,
    Identity,
    PhiE6,
    Theorem1,
    Theorem2,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct VerifyArgs {
    suite: Suite,
    /// Family parameters, `A..B` (inclusive) or a single `A`.
    #[arg(long, value_parser = parse_alpha, default_value = "1..2")]
    alpha: RangeInclusive<u32>,
    /// Largest n for the congruence and internal suites.
    #[arg(long)]
    n_max: Option<u64>,
    /// Coefficient count for the identity suites.
    #[arg(long)]
    terms: Option<i64>,
    /// Restrict to one partition function.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<PartitionKind>,
    /// Replace the congruence modulus (to see a failing witness).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    modulus: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(clap::Args)]
struct ExpandArgs {
    #[arg(long)]
    eta: String,
    #[arg(long, default_value_t = 20)]
    terms: i64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn default_workers() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

fn parse_alpha(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad alpha '{t}'"));
    let (lo, hi) = (num(lo)?, num(hi)?);
    if lo == 0 || lo > hi {
        return Err(format!("alpha range must satisfy 1 <= A <= B, got {s}"));
    }
    Ok(lo..=hi)
}

fn parse_kind(s: &str) -> Result<PartitionKind, String> {
    s.parse()
}

type Job = Box<dyn Fn() -> CheckReport + Send + Sync>;

fn jobs(args: &VerifyArgs) -> Vec<Job> {
    let kinds: Vec<PartitionKind> = match args.kind {
        Some(k) => vec![k],
        None => PartitionKind::ALL.to_vec(),
    };
    let alphas: Vec<u32> = args.alpha.clone().collect();
    let wants = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut out: Vec<Job> = Vec::new();

    if wants(Suite::Congruence) {
        let n_max = args.n_max.unwrap_or(100);
        for &alpha in &alphas {
            for &kind in &kinds {
                let mut spec = FamilySpec::new(kind, alpha);
                if let Some(m) = args.modulus {
                    spec.modulus = m;
                }
                out.push(Box::new(move || verify_congruence(spec, n_max)));
            }
        }
    }
    if wants(Suite::Internal) {
        let n_max = args.n_max.unwrap_or(150);
        for &kind in &kinds {
            out.push(Box::new(move || verify_internal(kind, n_max)));
        }
    }
    if wants(Suite::Dissection) {
        let t = args.terms.unwrap_or(120);
        out.push(Box::new(move || verify_dissection(t)));
    }
    if wants(Suite::Gen9) {
        let t = args.terms.unwrap_or(100);
        out.push(Box::new(move || verify_gen9(t)));
    }
    if wants(Suite::Identity) {
        let t = args.terms.unwrap_or(40);
        out.push(Box::new(move || verify_eta_identity(t)));
        for &kind in &kinds {
            for &alpha in &alphas {
                let t = args.terms.unwrap_or(40);
                out.push(Box::new(move || verify_l_closed_form(kind, Mode::Family(alpha), t)));
            }
            let t = args.terms.unwrap_or(60);
            out.push(Box::new(move || verify_l_closed_form(kind, Mode::Internal, t)));
        }
    }
    if wants(Suite::PhiE6) {
        out.push(Box::new(verify_phi_e6));
    }
    if wants(Suite::Theorem1) {
        for &alpha in &alphas {
            out.push(Box::new(move || verify_theorem1(alpha)));
        }
    }
    if wants(Suite::Theorem2) {
        out.push(Box::new(verify_theorem2));
    }
    out
}

fn verify(args: VerifyArgs) -> ExitCode {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.workers as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let todo = jobs(&args);
    let mut reports: Vec<CheckReport> = pool.install(|| todo.par_iter().map(|j| j()).collect());
    if args.no_timing {
        reports.iter_mut().for_each(|r| r.elapsed_ms = 0);
    }
    let reports = sorted(reports);
    let body = match args.format {
        Format::Text => to_text(&reports),
        Format::Json => to_json(&reports) + "\n",
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn expand(args: ExpandArgs) -> ExitCode {
    let q: EtaQuotient = match args.eta.parse() {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.terms < 0 {
        eprintln!("error: --terms must be nonnegative");
        return ExitCode::from(2);
    }
    let s = q.expand::<BigInt>(args.terms);
    match args.format {
        Format::Text => println!("{q}\n{s}"),
        Format::Json => {
            let coeffs: Vec<_> = s.terms().map(|(e, c)| json!([e.to_string(), c.to_string()])).collect();
            let v = json!({
                "eta": q.to_string(),
                "weight": q.weight().to_string(),
                "precision": s.precision().to_string(),
                "coefficients": coeffs,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => verify(args),
        Command::Expand(args) => expand(args),
    }
}
