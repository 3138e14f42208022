//! `torus-split`: torus tables, split classification, complement
//! certificates and the self-test suites from the command line.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use torus_split::classify::VerdictRecord;
use torus_split::normlift::{
    certify_recipe, certify_transported, closure_cap_from_env, complement_recipes,
    ComplementCertificate,
};
use torus_split::selftest::{self, Fault, SelftestReport};
use torus_split::torus::{FamilyContext, TorusClassReport};
use torus_split::{
    classify, Epsilon, Error, Exec, Family, GroupFamily, SplitVerdict, TorusLabel, TorusSpec,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "torus-split",
    version,
    about = "Maximal tori and normalizer splitting for finite groups of Lie type"
)]
struct Cli {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Torus table of G2, 2G2 or 3D4 at one or more q.
    Table(TableArgs),
    /// Decide whether the normalizer of a torus splits.
    Classify(ClassifyArgs),
    /// Certify the complement for one torus class.
    Verify(VerifyArgs),
    /// Run the oracle suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated list of field sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<u64>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    family: GroupFamily,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: u64,
    /// `+` or `-`.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<Epsilon>,
    /// Comma-separated cycle lengths; a minus sign marks a negative cycle.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "class"
    )]
    cycles: Option<Vec<i64>>,
    /// Torus class number for the exceptional families.
    #[arg(long)]
    class: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    class: usize,
    #[arg(long)]
    q: u64,
    /// Another lift of the same Weyl element; the complement is transported to it.
    #[arg(long)]
    lift: Option<String>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random cases per randomized suite.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Corrupt the library on purpose to check that the suites notice.
    #[arg(long, value_parser = parse_fault)]
    inject_fault: Option<Fault>,
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    match s {
        "corrupt-eta" => Ok(Fault::CorruptEta),
        other => Err(format!("unknown fault `{other}` (known: corrupt-eta)")),
    }
}

/// What a command produced: the JSON results, a text rendering and whether
/// every check passed.
struct Outcome {
    inputs: Value,
    results: Value,
    text: String,
    ok: bool,
}

/// Input problems exit with 2, failed computations with 1.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ClosureCap { .. }
        | Error::NotFixed { .. }
        | Error::NoSolution(_)
        | Error::SingularTwist => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let (name, result) = match &cli.command {
        Command::Table(a) => ("table", cmd_table(a, exec)),
        Command::Classify(a) => ("classify", cmd_classify(a)),
        Command::Verify(a) => ("verify", cmd_verify(a)),
        Command::Selftest(a) => ("selftest", cmd_selftest(a, exec)),
    };
    match result {
        Ok(out) => {
            if cli.json {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "tool": "torus-split",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": name,
                    "inputs": out.inputs,
                    "results": out.results,
                    "ok": out.ok,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("report serializes")
                );
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn structure_label(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    factors
        .iter()
        .map(|f| format!("Z{f}"))
        .collect::<Vec<_>>()
        .join(" x ")
}

fn cmd_table(a: &TableArgs, exec: Exec) -> torus_split::Result<Outcome> {
    let contexts =
        a.q.iter()
            .map(|&q| FamilyContext::new(a.family, q))
            .collect::<torus_split::Result<Vec<_>>>()?;
    let classes = a.family.num_classes();
    let cells: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|i| (1..=classes).map(move |c| (i, c)))
        .collect();
    let reports = exec
        .map(&cells, |&(i, c)| contexts[i].class_report(c))
        .into_iter()
        .collect::<torus_split::Result<Vec<TorusClassReport>>>()?;
    let ok = reports.iter().all(|r| r.order_matches);
    let mut text = String::new();
    for (i, &q) in a.q.iter().enumerate() {
        let rows = &reports[i * classes..(i + 1) * classes];
        let _ = writeln!(text, "{}(q), q = {q}", a.family);
        let _ = writeln!(
            text,
            "{:<6}{:<14}{:>6}  {:<20}{:>14}{:>14}  check",
            "class", "w", "|C|", "structure", "order", "expected"
        );
        for r in rows {
            let _ = writeln!(
                text,
                "{:<6}{:<14}{:>6}  {:<20}{:>14}{:>14}  {}",
                r.class_id,
                r.representative,
                r.centralizer_order,
                structure_label(&r.invariant_factors),
                r.order,
                r.expected_order,
                if r.order_matches { "ok" } else { "MISMATCH" }
            );
            for note in &r.notes {
                let _ = writeln!(text, "      note: {note}");
            }
        }
        text.push('\n');
    }
    let results =
        a.q.iter()
            .enumerate()
            .map(|(i, q)| json!({ "q": q, "rows": &reports[i * classes..(i + 1) * classes] }))
            .collect();
    Ok(Outcome {
        inputs: json!({ "family": a.family, "q": a.q }),
        results: Value::Array(results),
        text,
        ok,
    })
}

fn cmd_classify(a: &ClassifyArgs) -> torus_split::Result<Outcome> {
    let torus = match (&a.cycles, a.class) {
        (Some(c), _) => TorusLabel::Cycles(c.clone()),
        (None, Some(c)) => TorusLabel::Class(c),
        (None, None) => TorusLabel::Unspecified,
    };
    let spec = TorusSpec {
        family: a.family.clone(),
        n: a.n,
        q: a.q,
        epsilon: a.eps,
        torus,
    };
    let verdict: SplitVerdict = classify(&spec)?;
    let record = VerdictRecord::new(&spec, &verdict);
    let mut text = format!(
        "{} n={} q={} torus {}: {} ({})\n",
        record.family,
        record.n.map_or("-".into(), |n| n.to_string()),
        record.q,
        record.torus,
        record.outcome,
        record.criterion
    );
    if let Some(w) = &record.witness_ref {
        let _ = writeln!(text, "witness: {w}");
    }
    Ok(Outcome {
        inputs: serde_json::to_value(&spec).expect("spec serializes"),
        results: serde_json::to_value(&record).expect("verdict serializes"),
        text,
        ok: true,
    })
}

fn render_certificate(c: &ComplementCertificate) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{} class {} q={}: n = {} (w = {})",
        c.family, c.class_id, c.q, c.n_word, c.weyl_image_of_n
    );
    let _ = writeln!(
        t,
        "torus {} computed modulo {}",
        structure_label(&c.torus_invariant_factors),
        c.modulus
    );
    for g in &c.generators {
        let _ = writeln!(
            t,
            "  {} = {} : exponents {:?}, w = {}, fixed {}",
            g.name, g.recipe, g.exponents, g.weyl_word, g.fixed
        );
    }
    let _ = writeln!(
        t,
        "group order {} (twisted centralizer order {})",
        c.group_order, c.centralizer_order
    );
    let _ = writeln!(t, "image is the twisted centralizer: {}", c.image_ok);
    let _ = writeln!(t, "meets the torus trivially: {}", c.intersection_trivial);
    for r in &c.relations_checked {
        let _ = writeln!(
            t,
            "  relation {} = 1: {}",
            r.relation,
            if r.holds { "holds" } else { "FAILS" }
        );
    }
    for note in &c.corrections {
        let _ = writeln!(t, "  correction: {note}");
    }
    let _ = writeln!(
        t,
        "certificate: {}",
        if c.valid { "valid" } else { "INVALID" }
    );
    t
}

fn cmd_verify(a: &VerifyArgs) -> torus_split::Result<Outcome> {
    let recipe = complement_recipes(a.family, a.class)?;
    let cap = closure_cap_from_env();
    let cert = match &a.lift {
        Some(word) => certify_transported(&recipe, a.q, word, cap)?,
        None => certify_recipe(&recipe, a.q, cap)?,
    };
    Ok(Outcome {
        inputs: json!({ "family": a.family, "class": a.class, "q": a.q, "lift": a.lift, "closure_cap": cap }),
        results: serde_json::to_value(&cert).expect("certificate serializes"),
        text: render_certificate(&cert),
        ok: cert.valid,
    })
}

fn render_selftest(r: &SelftestReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "seed {}", r.seed);
    for s in &r.suites {
        let status = if s.ok() { "pass" } else { "FAIL" };
        let _ = writeln!(
            t,
            "{status} {:<22} {} passed, {} failed",
            s.name, s.passed, s.failed
        );
        for f in &s.failures {
            let _ = writeln!(t, "     {f}");
        }
    }
    let _ = writeln!(t, "total: {} passed, {} failed", r.passed, r.failed);
    t
}

fn cmd_selftest(a: &SelftestArgs, exec: Exec) -> torus_split::Result<Outcome> {
    let report = selftest::run(a.seed, a.count, a.inject_fault, exec);
    Ok(Outcome {
        inputs: json!({ "seed": a.seed, "count": a.count, "inject_fault": a.inject_fault }),
        text: render_selftest(&report),
        ok: report.ok(),
        results: serde_json::to_value(&report).expect("report serializes"),
    })
}
