use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use indexcoding::inner::{
    allserver_program, centralized_cc_enhanced, centralized_cc_original, decoding_space,
    distributed_cc_allserver, distributed_cc_fractional, fractional_program, parse_decoding_tuples,
    DeltaPlan, DeltaStrategy, GrowthOptions, InnerBoundResult, InnerOptions, Objective, Scheme,
    ServerGrouping,
};
use indexcoding::outer::{best_outer, thm1_program, Grounding};
use indexcoding::problem::{enumerate_nonisomorphic, parse_rational, CapacityProfile, Problem};
use indexcoding::report::{self, BoundReport, ReportOptions};
use indexcoding::{load_catalog, Catalog, TableClass};

#[derive(Parser)]
#[command(
    name = "indexcoding",
    version,
    about = "Bounds for distributed index coding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled catalog of non-isomorphic 4-message problems.
    Catalog(CatalogArgs),
    /// Compute an achievable rate with a composite coding scheme.
    Inner(InnerArgs),
    /// Compute the outer bounds on the sum capacity.
    Outer(OuterArgs),
    /// Run inner and outer bounds over the catalog.
    Table(TableArgs),
    /// Enumerate non-isomorphic problems with n messages.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sum,
    Sym,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaArg {
    Full,
    Minmax,
    Grow,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroundingArg {
    Whole,
    PerSubset,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Cc,
    CcEnhanced,
    Dist,
    DistNonenhanced,
    Fractional,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Cc => Scheme::Cc,
            SchemeArg::CcEnhanced => Scheme::CcEnhanced,
            SchemeArg::Dist => Scheme::Dist,
            SchemeArg::DistNonenhanced => Scheme::DistNonenhanced,
            SchemeArg::Fractional => Scheme::Fractional,
        }
    }
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long)]
    no: Option<u32>,
    /// Print only the number of matching entries.
    #[arg(long)]
    count: bool,
    /// Filter by table class, e.g. `open_star`.
    #[arg(long)]
    class: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ProblemArgs {
    /// Catalog problem number.
    #[arg(long, conflicts_with = "problem")]
    no: Option<u32>,
    /// Problem text such as `(1|-),(2|1)`.
    #[arg(long)]
    problem: Option<String>,
    /// Capacity of every server (a single broadcast link for `cc` schemes).
    #[arg(long, conflicts_with = "caps_file")]
    cap: Option<String>,
    /// Capacities as `J_mask=value` lines.
    #[arg(long)]
    caps_file: Option<PathBuf>,
}

#[derive(Args)]
struct InnerArgs {
    #[command(flatten)]
    target: ProblemArgs,
    #[arg(long, value_enum, default_value = "dist")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "sum")]
    objective: ObjectiveArg,
    /// Decoding space; defaults to full for n ≤ 4 and grown otherwise.
    #[arg(long, value_enum)]
    delta: Option<DeltaArg>,
    /// Tuples for `--delta file`, one per line: `{1,2}; {2}; ...`.
    #[arg(long)]
    delta_file: Option<PathBuf>,
    /// Server groups for the fractional scheme, one group of masks per line.
    #[arg(long)]
    groups_file: Option<PathBuf>,
    /// Write the LP in CPLEX LP format instead of solving.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OuterArgs {
    #[command(flatten)]
    target: ProblemArgs,
    #[arg(long, value_enum, default_value = "whole")]
    grounding: GroundingArg,
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Worker threads; 0 means one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Restrict to these problem numbers.
    #[arg(long = "no")]
    only: Vec<u32>,
    /// Also compute the non-enhanced scheme and list where enhancement helps.
    #[arg(long)]
    nonenhanced: bool,
    #[arg(long, value_enum, default_value = "whole")]
    grounding: GroundingArg,
    /// Fail unless every inner value matches the tabulated sum rate.
    #[arg(long)]
    check_table: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, short)]
    n: usize,
    #[arg(long)]
    count: bool,
}

fn fmt_value(v: f64, r: Option<Rational64>) -> String {
    match r {
        Some(r) => format!("{v:.6} ({r})"),
        None => format!("{v:.6}"),
    }
}

fn rational_json(r: Option<Rational64>) -> serde_json::Value {
    r.map(|r| serde_json::Value::String(r.to_string()))
        .unwrap_or(serde_json::Value::Null)
}

fn resolve_problem(args: &ProblemArgs) -> Result<(Option<u32>, Problem)> {
    match (args.no, &args.problem) {
        (Some(no), _) => {
            let catalog = load_catalog()?;
            let entry = catalog
                .get(no)
                .with_context(|| format!("no catalog problem {no}"))?;
            Ok((Some(no), entry.problem.clone()))
        }
        (None, Some(text)) => Ok((None, text.parse()?)),
        (None, None) => bail!("give --no or --problem"),
    }
}

fn capacity_arg(args: &ProblemArgs) -> Result<Option<Rational64>> {
    args.cap
        .as_deref()
        .map(|c| parse_rational(c).map_err(anyhow::Error::msg))
        .transpose()
}

fn resolve_caps(args: &ProblemArgs, n: usize) -> Result<CapacityProfile> {
    if let Some(path) = &args.caps_file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(CapacityProfile::parse(n, &text)?);
    }
    let c = capacity_arg(args)?.unwrap_or_else(|| Rational64::from(1));
    Ok(CapacityProfile::uniform(n, c))
}

fn cmd_catalog(args: &CatalogArgs) -> Result<()> {
    let catalog = load_catalog()?;
    let class: Option<TableClass> = args
        .class
        .as_deref()
        .map(|c| c.parse().map_err(anyhow::Error::msg))
        .transpose()?;
    let entries: Vec<_> = catalog
        .iter()
        .filter(|e| args.no.is_none_or(|no| e.problem_no == no))
        .filter(|e| class.is_none_or(|c| e.table_class == c))
        .collect();
    if let Some(no) = args.no {
        if entries.is_empty() {
            bail!("no catalog problem {no}");
        }
    }
    if args.count {
        println!("{}", entries.len());
        return Ok(());
    }
    match args.format {
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "problem_no": e.problem_no,
                        "problem_text": e.problem.to_string(),
                        "sum_rate": e.table_sum_rate.to_string(),
                        "class": e.table_class.as_str(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&list)?);
        }
        Format::Csv => {
            println!("problem_no,problem_text,sum_rate,class");
            for e in entries {
                println!(
                    "{},\"{}\",{},{}",
                    e.problem_no,
                    e.problem,
                    e.table_sum_rate,
                    e.table_class.as_str()
                );
            }
        }
        Format::Text if args.no.is_some() => {
            let e = entries[0];
            println!("{}  sum_rate={}", e.problem, e.table_sum_rate);
        }
        Format::Text => {
            for e in entries {
                println!(
                    "{:>3}  {}  sum_rate={}  class={}",
                    e.problem_no,
                    e.problem,
                    e.table_sum_rate,
                    e.table_class.as_str()
                );
            }
        }
    }
    Ok(())
}

fn inner_options(args: &InnerArgs, p: &Problem) -> Result<InnerOptions> {
    let objective = match args.objective {
        ObjectiveArg::Sum => Objective::SumRate,
        ObjectiveArg::Sym => Objective::SymmetricRate,
    };
    let delta = match args.delta {
        None => DeltaPlan::Auto,
        Some(DeltaArg::Full) => DeltaPlan::Use(DeltaStrategy::Full),
        Some(DeltaArg::Minmax) => DeltaPlan::Use(DeltaStrategy::MinimalAndMaximal),
        Some(DeltaArg::Grow) => DeltaPlan::Grow(GrowthOptions::default()),
        Some(DeltaArg::File) => {
            let path = args
                .delta_file
                .as_ref()
                .context("--delta file needs --delta-file")?;
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DeltaPlan::Use(DeltaStrategy::Custom(parse_decoding_tuples(p.n(), &text)?))
        }
    };
    Ok(InnerOptions::with_objective(objective).delta(delta))
}

fn run_inner(
    scheme: Scheme,
    p: &Problem,
    args: &InnerArgs,
    opts: &InnerOptions,
) -> Result<InnerBoundResult> {
    let central = || -> Result<Rational64> {
        if args.target.caps_file.is_some() {
            bail!("centralized schemes take a single --cap");
        }
        Ok(capacity_arg(&args.target)?.unwrap_or_else(|| Rational64::from(1)))
    };
    let result = match scheme {
        Scheme::Cc => centralized_cc_original(p, central()?, opts)?,
        Scheme::CcEnhanced => centralized_cc_enhanced(p, central()?, opts)?,
        Scheme::Dist => {
            distributed_cc_allserver(p, &resolve_caps(&args.target, p.n())?, true, opts)?
        }
        Scheme::DistNonenhanced => {
            distributed_cc_allserver(p, &resolve_caps(&args.target, p.n())?, false, opts)?
        }
        Scheme::Fractional => {
            let caps = resolve_caps(&args.target, p.n())?;
            distributed_cc_fractional(p, &caps, &grouping(args, p.n())?, opts)?
        }
    };
    Ok(result)
}

fn grouping(args: &InnerArgs, n: usize) -> Result<ServerGrouping> {
    match &args.groups_file {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(ServerGrouping::parse(n, &text)?)
        }
        None => Ok(ServerGrouping::single(n)),
    }
}

fn dump_inner(
    scheme: Scheme,
    p: &Problem,
    args: &InnerArgs,
    opts: &InnerOptions,
) -> Result<String> {
    let lp = match scheme {
        Scheme::Fractional => {
            let caps = resolve_caps(&args.target, p.n())?;
            fractional_program(p, &caps, &grouping(args, p.n())?, opts)?
        }
        _ => {
            let caps = match scheme {
                Scheme::Cc | Scheme::CcEnhanced => CapacityProfile::centralized(
                    p.n(),
                    capacity_arg(&args.target)?.unwrap_or_else(|| Rational64::from(1)),
                ),
                _ => resolve_caps(&args.target, p.n())?,
            };
            let tuples = match &opts.delta {
                DeltaPlan::Use(s) => decoding_space(p, s)?.tuples,
                _ => decoding_space(p, &DeltaStrategy::Full)?.tuples,
            };
            let enhanced = matches!(scheme, Scheme::CcEnhanced | Scheme::Dist);
            allserver_program(p, &caps, enhanced, &tuples, opts)?
        }
    };
    Ok(lp.to_lp_format())
}

fn cmd_inner(args: &InnerArgs) -> Result<()> {
    let (no, p) = resolve_problem(&args.target)?;
    let scheme: Scheme = args.scheme.into();
    let opts = inner_options(args, &p)?;
    if let Some(path) = &args.dump_lp {
        fs::write(path, dump_inner(scheme, &p, args, &opts)?)?;
        eprintln!("wrote {}", path.display());
        return Ok(());
    }
    let start = Instant::now();
    let r = run_inner(scheme, &p, args, &opts)?;
    let elapsed = start.elapsed().as_secs_f64();
    match args.format {
        Format::Json => {
            let v = serde_json::json!({
                "problem_no": no,
                "problem_text": p.to_string(),
                "scheme": scheme.as_str(),
                "objective": r.objective.to_string(),
                "value": r.value,
                "rational": rational_json(r.rational_value),
                "rates": r.rates,
                "delta": r.delta_used.kind.to_string(),
                "delta_size": r.delta_used.len(),
                "lp": r.lp,
                "seconds": elapsed,
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Csv => {
            println!(
                "problem_no,problem_text,scheme,objective,value,rational,delta,delta_size,seconds"
            );
            println!(
                "{},\"{}\",{},{},{:.6},{},{},{},{:.3}",
                no.map(|x| x.to_string()).unwrap_or_default(),
                p,
                scheme,
                r.objective,
                r.value,
                r.rational_value.map(|x| x.to_string()).unwrap_or_default(),
                r.delta_used.kind,
                r.delta_used.len(),
                elapsed
            );
        }
        Format::Text => {
            println!("problem: {p}");
            println!("scheme: {scheme}  objective: {}", r.objective);
            println!("value: {}", fmt_value(r.value, r.rational_value));
            let rates: Vec<String> = r.rates.iter().map(|x| format!("{x:.6}")).collect();
            println!("rates: {}", rates.join(" "));
            println!(
                "delta: {} ({} tuples)",
                r.delta_used.kind,
                r.delta_used.len()
            );
            println!(
                "lp: {} vars, {} rows, {} nonzeros, {} solves",
                r.lp.variables, r.lp.constraints, r.lp.nonzeros, r.lp.solves
            );
            println!("time: {elapsed:.3}s");
        }
    }
    Ok(())
}

fn grounding_of(g: GroundingArg) -> Grounding {
    match g {
        GroundingArg::Whole => Grounding::Whole,
        GroundingArg::PerSubset => Grounding::PerSubset,
    }
}

fn cmd_outer(args: &OuterArgs) -> Result<()> {
    let (no, p) = resolve_problem(&args.target)?;
    let caps = resolve_caps(&args.target, p.n())?;
    let grounding = grounding_of(args.grounding);
    if let Some(path) = &args.dump_lp {
        fs::write(path, thm1_program(&p, &caps, grounding)?.to_lp_format())?;
        eprintln!("wrote {}", path.display());
        return Ok(());
    }
    let r = best_outer(&p, &caps, grounding, &InnerOptions::default().solver)?;
    let witness = r.thm2.best.as_ref();
    match args.format {
        Format::Json => {
            let v = serde_json::json!({
                "problem_no": no,
                "problem_text": p.to_string(),
                "thm1": r.thm1.value,
                "thm1_rational": rational_json(r.thm1.rational_value),
                "grounding": r.thm1.grounding,
                "thm2": rational_json(r.thm2.value()),
                "u": r.thm2.u.to_string(),
                "v": witness.map(|w| w.v.to_string()),
                "v_candidates": r.thm2.candidates.iter().map(|(v, ok)| {
                    serde_json::json!({"v": v.to_string(), "condition_holds": ok})
                }).collect::<Vec<_>>(),
                "best": r.best,
                "best_rational": rational_json(r.best_rational),
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Csv => {
            println!("problem_no,problem_text,thm1,thm2,best,u,v");
            println!(
                "{},\"{}\",{:.6},{},{:.6},\"{}\",\"{}\"",
                no.map(|x| x.to_string()).unwrap_or_default(),
                p,
                r.thm1.value,
                r.thm2.value().map(|x| x.to_string()).unwrap_or_default(),
                r.best,
                r.thm2.u,
                witness.map(|w| w.v.to_string()).unwrap_or_default()
            );
        }
        Format::Text => {
            let thm2 = r
                .thm2
                .value()
                .map(|x| x.to_string())
                .unwrap_or_else(|| "inapplicable".into());
            let mut line = format!(
                "thm1={} thm2={} best={}",
                fmt_value(r.thm1.value, r.thm1.rational_value),
                thm2,
                fmt_value(r.best, r.best_rational)
            );
            if let Some(w) = witness {
                line += &format!(" U={} V={}", w.u, w.v);
            }
            println!("{line}");
        }
    }
    Ok(())
}

/// Returns whether the run should exit successfully.
fn cmd_table(args: &TableArgs) -> Result<bool> {
    let catalog: Catalog = load_catalog()?;
    let entries: Vec<_> = catalog
        .iter()
        .filter(|e| args.only.is_empty() || args.only.contains(&e.problem_no))
        .collect();
    if entries.is_empty() {
        bail!("no catalog problems selected");
    }
    let opts = ReportOptions {
        grounding: grounding_of(args.grounding),
        with_nonenhanced: args.nonenhanced,
        ..Default::default()
    };
    let results = report::sweep(&entries, &opts, args.jobs)?;
    let mut reports: Vec<BoundReport> = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(e.to_string()),
        }
    }
    let summary = report::summarize(&reports);

    let body = match args.format {
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "reports": reports,
                "failures": failures,
                "summary": summary,
            }))? + "\n"
        }
        Format::Csv => report::to_csv(&reports),
        Format::Text => report::to_text(&reports) + "\n" + &report::summary_text(&summary),
    };
    match &args.output {
        Some(path) => fs::write(path, &body)?,
        None => print!("{body}"),
    }
    if !matches!(args.format, Format::Text) || args.output.is_some() {
        eprint!("{}", report::summary_text(&summary));
    }
    for f in &failures {
        eprintln!("failed: {f}");
    }
    let mismatches: Vec<_> = reports
        .iter()
        .filter(|r| r.table_match == Some(false))
        .filter_map(|r| r.problem_no)
        .collect();
    if args.check_table && !mismatches.is_empty() {
        eprintln!("table mismatches: {mismatches:?}");
    }
    Ok(failures.is_empty() && (!args.check_table || mismatches.is_empty()))
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<()> {
    if args.n == 0 || args.n > 5 {
        bail!("enumeration supports 1 ≤ n ≤ 5");
    }
    let classes = enumerate_nonisomorphic(args.n);
    if args.count {
        println!("{}", classes.len());
    } else {
        for p in classes {
            println!("{p}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Catalog(a) => cmd_catalog(a).map(|_| true),
        Command::Inner(a) => cmd_inner(a).map(|_| true),
        Command::Outer(a) => cmd_outer(a).map(|_| true),
        Command::Table(a) => cmd_table(a),
        Command::Enumerate(a) => cmd_enumerate(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
