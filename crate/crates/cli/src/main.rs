use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use millscf::maxerr::{self, ReferenceGrid};
use millscf::report;
use millscf::tails::TabulatedTail;
use millscf::verify::{self, VerifyOptions};
use millscf::{FamilyKind, SlopeRule, TailFamily};

/// Mills ratio approximations from modified continued fractions.
#[derive(Parser)]
#[command(name = "millscf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one approximant and compare it with the reference value.
    Eval(EvalArgs),
    /// Write an `x,approx,reference,error` table over a grid.
    Table(TableArgs),
    /// Report the largest tail error `max |Delta_n|` per depth.
    Maxerr(MaxerrArgs),
    /// Write the error curves of one figure as CSV.
    Figure(FigureArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// classic, limit-ansatz, sqrt, linear, lee, shift-linear, improved-expo or custom
    #[arg(long, default_value = "classic")]
    family: String,
    /// How the improved exponential family picks its linear coefficient.
    #[arg(long, value_enum, default_value_t = SlopeArg::SqrtRate)]
    slope_rule: SlopeArg,
    /// Two-column `x,beta` table defining the custom family.
    #[arg(long)]
    tail_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SlopeArg {
    SqrtRate,
    Displayed,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args)]
struct MaxerrArgs {
    #[arg(long, default_value_t = 0)]
    n_min: usize,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = maxerr::DEFAULT_XMIN, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = maxerr::DEFAULT_XMAX)]
    xmax: f64,
    #[arg(long, default_value_t = maxerr::DEFAULT_STEP)]
    step: f64,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args)]
struct FigureArgs {
    /// 1, 2 or 3 for the depth 0, 1 and 4 curves.
    #[arg(long)]
    id: u32,
    /// Extra column from a two-column `x,beta` table.
    #[arg(long)]
    tail_file: Option<PathBuf>,
    /// Header of the extra column.
    #[arg(long, default_value = "custom")]
    tail_name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named suites (repeatable).
    #[arg(long)]
    suite: Vec<String>,
    /// List suite names and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<millscf::Error> for Failure {
    fn from(e: millscf::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read_tail(path: &Path) -> Result<TabulatedTail, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(TabulatedTail::parse(&text)?)
}

fn family(args: &FamilyArgs) -> Result<TailFamily, Failure> {
    let kind: FamilyKind = args.family.parse()?;
    let rule = match args.slope_rule {
        SlopeArg::SqrtRate => SlopeRule::SqrtRate,
        SlopeArg::Displayed => SlopeRule::Displayed,
    };
    Ok(match kind {
        FamilyKind::ImprovedExponential => TailFamily::ImprovedExponential(rule),
        FamilyKind::Custom => {
            let path = args
                .tail_file
                .as_deref()
                .ok_or_else(|| Failure::Usage("family `custom` needs --tail-file".into()))?;
            TailFamily::Custom(Arc::new(read_tail(path)?))
        }
        other => other.builtin().expect("built-in family"),
    })
}

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_eval(args: EvalArgs) -> CliResult {
    let fam = family(&args.family)?;
    let record = report::eval_record(args.x, &fam, args.n)?;
    print!("{record}");
    Ok(())
}

fn run_table(args: TableArgs) -> CliResult {
    let fam = family(&args.family)?;
    let xs = maxerr::uniform_grid(args.xmin, args.xmax, args.step)?;
    let csv = report::table_csv(&fam, args.n, &xs)?;
    emit(&csv, args.out.as_deref())
}

fn run_maxerr(args: MaxerrArgs) -> CliResult {
    if args.n_min > args.n_max {
        return Err(Failure::Usage(format!(
            "--n-min {} exceeds --n-max {}",
            args.n_min, args.n_max
        )));
    }
    let fam = family(&args.family)?;
    let grid = ReferenceGrid::new(args.xmin, args.xmax, args.step)?;
    let rep = report::maxerr_report(&fam, args.n_min..=args.n_max, &grid)?;
    print!("{rep}");
    Ok(())
}

fn run_figure(args: FigureArgs) -> CliResult {
    let mut custom = Vec::new();
    if let Some(path) = &args.tail_file {
        custom.push((
            args.tail_name.clone(),
            TailFamily::Custom(Arc::new(read_tail(path)?)),
        ));
    }
    let csv = report::figure_csv(args.id, &custom)?;
    emit(&csv, args.out.as_deref())
}

fn run_verify(args: VerifyArgs) -> CliResult {
    let names = verify::suite_names();
    if args.list {
        for name in names {
            println!("{name}");
        }
        return Ok(());
    }
    if let Some(bad) = args.suite.iter().find(|s| !names.contains(&s.as_str())) {
        return Err(Failure::Usage(format!("unknown suite `{bad}`")));
    }
    let opts = VerifyOptions {
        inject_sign_fault: args.inject_fault,
    };
    let selected: Vec<&str> = if args.suite.is_empty() {
        names
    } else {
        args.suite.iter().map(String::as_str).collect()
    };
    let mut failed = 0;
    for name in &selected {
        let r = verify::run_suite(name, &opts).expect("validated suite name");
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<20} {} checks", r.name, r.checks);
        for f in r.failures.iter().take(5) {
            println!("     {f}");
        }
        if r.failures.len() > 5 {
            println!("     ... {} more", r.failures.len() - 5);
        }
        if !r.passed() {
            failed += 1;
        }
    }
    println!(
        "{} of {} suites passed",
        selected.len() - failed,
        selected.len()
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Table(a) => run_table(a),
        Command::Maxerr(a) => run_maxerr(a),
        Command::Figure(a) => run_figure(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Io(msg) => eprintln!("i/o error: {msg}"),
                Failure::Verify => {}
            }
            ExitCode::from(f.code())
        }
    }
}
