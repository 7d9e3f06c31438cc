//! Command-line surface for the extrapolation pipeline.
//!
//! Exit codes: 0 success, 2 usage, 3 parse, 4 solver non-convergence,
//! 5 domain/realness violation.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ssfa_core::io;
use ssfa_core::{
    builtin_cases, convergence_table, evaluate_grid, extrapolate, find_case, Error, Precision, Real,
};

#[derive(Parser)]
#[command(
    name = "ssfa",
    version,
    about = "Extrapolates truncated power series to their large-variable power law via self-similar factor approximants"
)]
struct Cli {
    /// Working precision in decimal digits
    #[arg(
        long,
        global = true,
        env = "SSFA_PRECISION",
        default_value_t = 80,
        value_parser = clap::value_parser!(u32).range(30..=1000)
    )]
    precision: u32,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output destination (a path, or "stdout")
    #[arg(long, global = true, default_value = "stdout")]
    output: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in benchmark cases
    ListCases,
    /// Print the normalized series coefficients of a case
    Coeffs {
        #[arg(long)]
        case: String,
        /// Truncation order k
        #[arg(long)]
        order: usize,
    },
    /// Solve a series file: factor parameters and large-variable limit
    Solve {
        /// Series JSON file
        #[arg(long)]
        series: PathBuf,
        /// Number of matched expansion terms
        #[arg(long)]
        order: usize,
        /// Allow odd orders (closed with the A_1 = 1 convention)
        #[arg(long)]
        odd: bool,
    },
    /// Evaluate an approximant on a grid
    Eval {
        /// Approximant JSON file (as emitted by solve)
        #[arg(long, conflicts_with = "case")]
        approx: Option<PathBuf>,
        /// Built-in case name (solved at --order first)
        #[arg(long, requires = "order")]
        case: Option<String>,
        #[arg(long)]
        order: Option<usize>,
        /// Grid start:stop:count with 0 < start
        #[arg(long)]
        grid: String,
    },
    /// Large-variable power law of an approximant or case
    Asympt {
        #[arg(long, conflicts_with = "case")]
        approx: Option<PathBuf>,
        #[arg(long, requires = "order")]
        case: Option<String>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Convergence table over even orders, with percentage errors
    Table {
        #[arg(long)]
        case: String,
        /// Comma list and/or inclusive ranges, e.g. "2,4,6" or "2..16"
        #[arg(long)]
        orders: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let prec = match Precision::decimal_digits(cli.precision) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    match run(&cli, &prec) {
        Ok(text) => match write_output(&cli.output, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 3,
        Error::NonConvergence { .. } => 4,
        Error::DomainViolation(_) | Error::NonRealResult(_) => 5,
        _ => 2,
    }
}

fn write_output(target: &str, text: &str) -> Result<(), Error> {
    if target == "stdout" {
        print!("{text}");
        std::io::stdout().flush().ok();
        Ok(())
    } else {
        fs::write(target, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write '{target}': {e}")))
    }
}

fn run(cli: &Cli, prec: &Precision) -> Result<String, Error> {
    match &cli.command {
        Command::ListCases => {
            let cases = builtin_cases();
            Ok(match cli.format {
                Format::Csv => io::case_list_to_csv(&cases, prec),
                Format::Json => io::case_list_to_json(&cases, prec),
            })
        }
        Command::Coeffs { case, order } => coeffs(case, *order, cli.format, prec),
        Command::Solve { series, order, odd } => solve(series, *order, *odd, cli.format, prec),
        Command::Eval {
            approx,
            case,
            order,
            grid,
        } => eval(
            approx.as_deref(),
            case.as_deref(),
            *order,
            grid,
            cli.format,
            prec,
        ),
        Command::Asympt {
            approx,
            case,
            order,
        } => asympt(approx.as_deref(), case.as_deref(), *order, cli.format, prec),
        Command::Table { case, orders } => table(case, orders, cli.format, prec),
    }
}

fn coeffs(case: &str, order: usize, format: Format, prec: &Precision) -> Result<String, Error> {
    let case = find_case(case)?;
    let coeffs = case.coefficients(order, prec)?;
    match format {
        Format::Csv => Ok(io::coefficients_to_csv(&coeffs, prec)),
        Format::Json => Ok(io::coefficients_to_json(&coeffs, prec)),
    }
}

fn read_file(path: &std::path::Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read '{}': {e}", path.display())))
}

fn solve(
    series_path: &std::path::Path,
    order: usize,
    odd: bool,
    format: Format,
    prec: &Precision,
) -> Result<String, Error> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    if order % 2 == 1 && !odd {
        return Err(Error::InvalidInput(format!(
            "order {order} is odd; pass --odd to use the A_1 = 1 closure"
        )));
    }
    let series = io::series_from_json(&read_file(series_path)?, prec)?;
    if order > series.order() {
        return Err(Error::OrderTooLarge {
            requested: order,
            available: series.order(),
        });
    }
    let (approx, asym) = extrapolate(&series, order, prec)?;
    match format {
        Format::Csv => Ok(io::solve_report_csv(&approx, &asym, prec)),
        Format::Json => Ok(io::solve_report_json(&approx, &asym, prec)),
    }
}

fn load_approximant(
    approx: Option<&std::path::Path>,
    case: Option<&str>,
    order: Option<usize>,
    prec: &Precision,
) -> Result<ssfa_core::FactorApproximant, Error> {
    match (approx, case) {
        (Some(path), None) => io::approximant_from_json(&read_file(path)?, prec),
        (None, Some(name)) => {
            let order = order.ok_or_else(|| Error::InvalidInput("--case needs --order".into()))?;
            if order % 2 == 1 {
                return Err(Error::InvalidInput(format!(
                    "order {order} is odd; built-in tables use even orders"
                )));
            }
            let case = find_case(name)?;
            let series = case.series(order, prec)?;
            let (approx, _) = extrapolate(&series, order, prec)?;
            Ok(approx)
        }
        _ => Err(Error::InvalidInput(
            "pass exactly one of --approx or --case".into(),
        )),
    }
}

fn parse_grid(spec: &str, prec: &Precision) -> Result<Vec<Real>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(Error::InvalidInput(format!(
            "grid '{spec}' is not start:stop:count"
        )));
    };
    let start = Real::parse(start, prec)
        .map_err(|_| Error::InvalidInput(format!("grid start '{start}' is not a number")))?;
    let stop = Real::parse(stop, prec)
        .map_err(|_| Error::InvalidInput(format!("grid stop '{stop}' is not a number")))?;
    let count: usize = count
        .parse()
        .map_err(|_| Error::InvalidInput(format!("grid count '{count}' is not an integer")))?;
    if !start.is_positive() {
        return Err(Error::InvalidInput("grid start must be > 0".into()));
    }
    if count == 0 {
        return Err(Error::InvalidInput("grid count must be at least 1".into()));
    }
    if count == 1 {
        if stop < start {
            return Err(Error::InvalidInput("grid stop must be >= start".into()));
        }
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(Error::InvalidInput("grid stop must be > start".into()));
    }
    let n = Real::from_i64(count as i64 - 1, prec);
    let step = &(&stop - &start) / &n;
    Ok((0..count)
        .map(|i| &start + &(&step * &Real::from_i64(i as i64, prec)))
        .collect())
}

fn eval(
    approx: Option<&std::path::Path>,
    case: Option<&str>,
    order: Option<usize>,
    grid: &str,
    format: Format,
    prec: &Precision,
) -> Result<String, Error> {
    let approx = load_approximant(approx, case, order, prec)?;
    let xs = parse_grid(grid, prec)?;
    let values = evaluate_grid(&approx, &xs, prec);
    let mut violations = 0usize;
    let points: Vec<(Real, Option<Real>)> = xs
        .into_iter()
        .zip(values)
        .map(|(x, v)| match v {
            Ok(f) => (x, Some(f)),
            Err(_) => {
                violations += 1;
                (x, None)
            }
        })
        .collect();
    if violations > 0 {
        eprintln!(
            "warning: {violations} of {} points outside the evaluation domain",
            points.len()
        );
    }
    match format {
        Format::Csv => Ok(io::grid_to_csv(&points)),
        Format::Json => Ok(io::grid_to_json(&points)),
    }
}

fn asympt(
    approx: Option<&std::path::Path>,
    case: Option<&str>,
    order: Option<usize>,
    format: Format,
    prec: &Precision,
) -> Result<String, Error> {
    let approx = load_approximant(approx, case, order, prec)?;
    let asym = ssfa_core::asymptotic(&approx, prec)?;
    match format {
        Format::Csv => {
            let d = prec.digits() as usize;
            Ok(format!(
                "B,gamma\n{},{}\n",
                asym.amplitude.to_decimal_string(d),
                asym.exponent.to_decimal_string(d)
            ))
        }
        Format::Json => Ok(io::asymptotic_to_json(&asym, prec)),
    }
}

fn parse_orders(spec: &str) -> Result<Vec<usize>, Error> {
    let mut orders = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("order range start '{a}' is not an integer"))
            })?;
            let b: usize = b.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("order range end '{b}' is not an integer"))
            })?;
            if a > b {
                return Err(Error::InvalidInput(format!("empty order range '{part}'")));
            }
            orders.extend((a..=b).filter(|k| k % 2 == 0));
        } else {
            let k: usize = part
                .parse()
                .map_err(|_| Error::InvalidInput(format!("order '{part}' is not an integer")))?;
            orders.push(k);
        }
    }
    if orders.is_empty() {
        return Err(Error::InvalidInput(format!("no orders in '{spec}'")));
    }
    Ok(orders)
}

fn table(case: &str, orders: &str, format: Format, prec: &Precision) -> Result<String, Error> {
    let case = find_case(case)?;
    let orders = parse_orders(orders)?;
    let table = convergence_table(&case, &orders, prec)?;
    match format {
        Format::Csv => Ok(io::table_to_csv(&table)),
        Format::Json => Ok(io::table_to_json(&table)),
    }
}
