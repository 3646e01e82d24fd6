//! `blockset`: generate block languages, run operations, measure state
//! complexity and run the bench tables.
//!
//! Exit codes: 0 ok, 1 usage or input error, 2 length mismatch, 3 empty
//! language, 4 cover budget exhausted, 5 route disagreement or bound violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockset::automata::{to_dot, AutomatonRecord, DotOptions};
use blockset::bench::{self, BenchOptions, Suite};
use blockset::io::{language_from_word_list, language_to_json, read_language, write_language};
use blockset::ops::{run_op, Op, OpResult};
use blockset::synthesis::{measure_with, CoverOptions, DEFAULT_NODE_BUDGET};
use blockset::witnesses::{self, bound_params};
use blockset::{BlockLanguage, Error, RankedAutomaton};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "blockset", version, about = "Block languages, their minimal automata and state complexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a language from a named family.
    Gen(GenArgs),
    /// Apply an operation and report sizes against the formulas.
    Op(OpArgs),
    /// Measure the state complexity of a language.
    Sc(ScArgs),
    /// Tabulate measured sizes against the formulas.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "E", alias = "e")]
    E,
    Parity,
    Ko,
    Full,
    Singleton,
    Subalphabet,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    x: Option<usize>,
    #[arg(long)]
    word: Option<String>,
    #[arg(long)]
    letters: Option<String>,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the family's NFA (ko only).
    #[arg(long)]
    nfa_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    Union,
    Intersect,
    Concat,
    Reverse,
    Complement,
    Star,
    Plus,
    AddWord,
    RemoveWord,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Lang,
    Dfa,
    Nfa,
}

#[derive(Args)]
struct CoverArgs {
    /// Search nodes per rank for the minimum cover search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Use the greedy cover (an upper bound on nsc) when the budget runs out.
    #[arg(long)]
    greedy_fallback: bool,
}

impl CoverArgs {
    fn options(&self) -> CoverOptions {
        CoverOptions {
            node_budget: self.budget,
            fallback_to_greedy: self.greedy_fallback,
        }
    }
}

#[derive(Args)]
struct OpArgs {
    #[arg(value_enum)]
    op: OpName,
    /// Operand language files; two for union, intersect and concat.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    word: Option<String>,
    /// Result file; the outcome JSON goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to `lang`, or `dfa` for star and plus.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Draw the dead state in the DOT output.
    #[arg(long)]
    show_dead: bool,
    #[command(flatten)]
    cover: CoverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Md,
}

#[derive(Args)]
struct ScArgs {
    /// A language file, or a word list with `--words`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Read `--in` as one word per line over `--k` symbols.
    #[arg(long)]
    words: bool,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[command(flatten)]
    cover: CoverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Table2,
    ReversalGrowth,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Md,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Table2)]
    suite: SuiteArg,
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    format: TableFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random operands per operation and length.
    #[arg(long, default_value_t = 2)]
    samples: usize,
    /// Probability of each bit in a random bitmap.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LengthMismatch(_) => 2,
            Error::EmptyLanguage => 3,
            Error::CoverBudgetExceeded { .. } => 4,
            Error::RouteDisagreement { .. } | Error::BoundViolation { .. } => 5,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn write_or_print(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> CliResult {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required for this family")));
    let mut nfa = None;
    let lang = match args.family {
        Family::E => {
            if args.k != 2 {
                return Err(usage("family E is defined for k = 2 only"));
            }
            witnesses::witness_e(need(args.ell, "ell")?)?
        }
        Family::Parity => witnesses::witness_parity(args.k, need(args.d, "d")?, args.x.unwrap_or(0))?,
        Family::Ko => {
            let (lang, a) = witnesses::witness_ko(args.k, need(args.d, "d")?)?;
            nfa = Some(a);
            lang
        }
        Family::Full => witnesses::full(args.k, need(args.ell, "ell")?)?,
        Family::Singleton => {
            let word = args.word.as_deref().ok_or_else(|| usage("--word is required for singleton"))?;
            let lang = witnesses::singleton(args.k, word)?;
            if args.ell.is_some_and(|l| l != lang.ell()) {
                return Err(Error::LengthMismatch(format!("--ell {} but the word has length {}", args.ell.unwrap(), lang.ell())).into());
            }
            lang
        }
        Family::Subalphabet => {
            let letters = args.letters.as_deref().ok_or_else(|| usage("--letters is required for subalphabet"))?;
            witnesses::subalphabet(args.k, need(args.ell, "ell")?, letters)?
        }
    };
    if let Some(path) = &args.nfa_out {
        let nfa = nfa.ok_or_else(|| usage("--nfa-out applies to the ko family only"))?;
        write_or_print(Some(path), &(nfa.to_record().to_json()? + "\n"))?;
    }
    write_or_print(args.out.as_deref(), &(language_to_json(&lang)? + "\n"))
}

fn parse_op(args: &OpArgs, first: &BlockLanguage) -> CliResult<Op> {
    let word = || -> CliResult<Vec<usize>> {
        let w = args.word.as_deref().ok_or_else(|| usage("--word is required for this operation"))?;
        Ok(first.alphabet().parse(w)?)
    };
    Ok(match args.op {
        OpName::Union => Op::Union,
        OpName::Intersect => Op::Intersect,
        OpName::Concat => Op::Concat,
        OpName::Reverse => Op::Reverse,
        OpName::Complement => Op::Complement,
        OpName::Star => Op::Star,
        OpName::Plus => Op::Plus,
        OpName::AddWord => Op::AddWord(word()?),
        OpName::RemoveWord => Op::RemoveWord(word()?),
    })
}

fn op(args: OpArgs) -> CliResult {
    let operands = args
        .inputs
        .iter()
        .map(|p| read_language(p).map_err(|e| usage(format!("{}: {e}", p.display()))))
        .collect::<CliResult<Vec<_>>>()?;
    let op = parse_op(&args, &operands[0])?;
    if operands.len() != op.arity() {
        return Err(usage(format!("{} takes {} --in file(s)", op.name(), op.arity())));
    }
    let run = run_op(&op, &operands, &args.cover.options())?;
    let (record, lang): (AutomatonRecord, Option<&BlockLanguage>) = match (&run.result, args.emit) {
        (OpResult::Block { lang, dfa, .. }, None | Some(Emit::Lang)) => (dfa.to_record(), Some(lang)),
        (OpResult::Block { dfa, .. }, Some(Emit::Dfa)) => (dfa.to_record(), None),
        (OpResult::Block { nfa, .. }, Some(Emit::Nfa)) => (nfa.to_record(), None),
        (OpResult::General { .. }, Some(Emit::Lang)) => {
            return Err(usage(format!("the result of {} is not a block language; use --emit dfa or nfa", op.name())))
        }
        (OpResult::General { dfa, .. }, None | Some(Emit::Dfa)) => (dfa.to_record(), None),
        (OpResult::General { nfa, .. }, Some(Emit::Nfa)) => (nfa.to_record(), None),
    };
    if let Some(path) = &args.out {
        match lang {
            Some(l) => write_language(path, l)?,
            None => write_or_print(Some(path), &(record.to_json()? + "\n"))?,
        }
    }
    if let Some(path) = &args.dot {
        let dot = to_dot(&record, DotOptions { show_dead: args.show_dead });
        write_or_print(Some(path), &dot)?;
    }
    let json = serde_json::to_string_pretty(&run.outcome).map_err(Error::from)?;
    println!("{json}");
    Ok(())
}

fn sc(args: ScArgs) -> CliResult {
    let lang = if args.words {
        let text = std::fs::read_to_string(&args.input).map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
        language_from_word_list(args.k, &text)?
    } else {
        read_language(&args.input).map_err(|e| match e {
            Error::EmptyLanguage => e.into(),
            e => usage(format!("{}: {e}", args.input.display())),
        })?
    };
    let report = measure_with(&lang, &args.cover.options())?;
    let params = if lang.k() >= 2 { Some(bound_params(lang.k(), lang.ell())?) } else { None };
    match args.format {
        ReportFormat::Json => {
            let value = serde_json::json!({ "report": report, "bound_params": params });
            println!("{}", serde_json::to_string_pretty(&value).map_err(Error::from)?);
        }
        ReportFormat::Md => {
            let list = |w: &[usize]| w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
            println!("| quantity | value |\n|---|---|");
            println!("| k | {} |", report.k);
            println!("| ℓ | {} |", lang.ell());
            println!("| dsc | {} |", report.dsc);
            let mark = if report.nsc_exact { "" } else { " (upper bound)" };
            println!("| nsc | {}{mark} |", report.nsc);
            println!("| DFA widths ℓ…0 | {} |", list(report.dfa_width_list()));
            println!("| NFA widths ℓ…0 | {} |", list(report.nfa_width_list()));
            if let Some(p) = params {
                println!("| max dsc(k, ℓ) | {} |", p.max_dsc);
                println!("| r, x, r_kl, t | {}, {}, {}, {} |", p.r, p.x, p.r_kl, p.t);
            }
        }
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> CliResult {
    if !(0.0..=1.0).contains(&args.density) {
        return Err(usage("--density must lie in [0, 1]"));
    }
    let opts = BenchOptions {
        suite: match args.suite {
            SuiteArg::Table2 => Suite::Table2,
            SuiteArg::ReversalGrowth => Suite::ReversalGrowth,
            SuiteArg::All => Suite::All,
        },
        lmax: args.lmax,
        seed: args.seed,
        samples: args.samples,
        density: args.density,
        jobs: args.jobs,
        node_budget: args.budget,
    };
    let rows = bench::run_bench(&opts)?;
    let text = match args.format {
        TableFormat::Csv => bench::to_csv(&rows)?,
        TableFormat::Md => bench::to_markdown(&rows),
    };
    write_or_print(args.out.as_deref(), &text)?;
    let failed = bench::failures(&rows);
    if failed > 0 {
        return Err(Failure {
            code: 5,
            message: format!("{failed} row(s) failed"),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Op(a) => op(a),
        Command::Sc(a) => sc(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
