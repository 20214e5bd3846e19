//! `polydet`: exact determinants of polynomial matrices from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 parse error, 3 planning failure,
//! 4 workspace error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polydet::modarith::{census, DEFAULT_PRIME_START};
use polydet::pipeline::{plan, predict, RunOutput};
use polydet::sylvester::sylvester;
use polydet::text::{parse_matrix, parse_poly, parse_vars};
use polydet::{resume, run, Config, IntMatrix, ParseError, PipelineError, Workspace};
use serde_json::json;

const CENSUS_ORDERS: &str = "64,128,256,512,4096,8192,65536";

#[derive(Parser)]
#[command(name = "polydet", version, about = "Exact determinants of multivariate integer polynomial matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Determinant of a matrix document.
    Det {
        /// Matrix document (`vars` line, then rows of `;`-separated entries).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Resultant of two polynomials via their Sylvester matrix.
    Resultant {
        /// File with a `vars` line followed by f and g on one line each.
        #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["f", "g", "vars"])]
        input: Option<PathBuf>,
        /// Space-separated variable names, e.g. "x y".
        #[arg(long, requires_all = ["f", "g"])]
        vars: Option<String>,
        #[arg(long, requires = "vars", allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, requires = "vars", allow_hyphen_values = true)]
        g: Option<String>,
        /// Variable to eliminate.
        #[arg(long)]
        var: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Counts primes admitting roots of unity of the given two-power orders.
    Census {
        #[arg(long, value_delimiter = ',', default_value = CENSUS_ORDERS)]
        orders: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// Primes are taken strictly above this value.
        #[arg(long, default_value_t = DEFAULT_PRIME_START)]
        above: u64,
        /// Also print counts by exact 2-adic valuation of p - 1.
        #[arg(long)]
        report: bool,
        #[arg(long)]
        json: bool,
    },
    /// Estimates running time from sampled forward transforms.
    Predict {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Number of distinct entries to time.
        #[arg(long, default_value_t = 3)]
        sample: usize,
        #[arg(long = "primes-min", default_value_t = 2)]
        primes_min: usize,
        #[arg(long)]
        json: bool,
    },
    /// Continues a checkpointed run.
    Resume {
        #[arg(long, value_name = "DIR")]
        workspace: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        report: bool,
        #[arg(long)]
        json: bool,
        #[arg(long = "interrupt-after", hide = true)]
        interrupt_after: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Checkpoint directory; an existing run for the same input is continued.
    #[arg(long, value_name = "DIR")]
    workspace: Option<PathBuf>,
    #[arg(long = "primes-min", default_value_t = 2)]
    primes_min: usize,
    #[arg(long = "prime-start", default_value_t = DEFAULT_PRIME_START)]
    prime_start: u64,
    /// Worker threads (default: one per core). Does not affect the result.
    #[arg(long)]
    threads: Option<usize>,
    /// Print stage timings and primes to stderr.
    #[arg(long)]
    report: bool,
    /// Emit one JSON object on stdout instead of plain text.
    #[arg(long)]
    json: bool,
    /// Stop after this many units (testing aid).
    #[arg(long = "interrupt-after", hide = true)]
    interrupt_after: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> Config {
        let mut config = Config {
            prime_start: self.prime_start,
            min_primes: self.primes_min,
            interrupt_after: self.interrupt_after,
            ..Config::default()
        };
        config.schedule.workers = self.threads;
        config
    }
}

enum Failure {
    Usage(String),
    Parse(String),
    Planning(String),
    Workspace(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Planning(_) => 3,
            Failure::Workspace(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Planning(m) | Failure::Workspace(m) => m,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Arith(_) | PipelineError::Shape(_) | PipelineError::Planning(_) => Failure::Planning(msg),
            PipelineError::InvalidInput(_) | PipelineError::Pool(_) => Failure::Usage(msg),
            PipelineError::CheckpointInvalid(_)
            | PipelineError::StaleWorkspace(_)
            | PipelineError::Interrupted { .. }
            | PipelineError::Io { .. } => Failure::Workspace(msg),
        }
    }
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    Failure::Parse(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    parse_matrix(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn open_workspace(dir: &Path) -> Result<Workspace, Failure> {
    Workspace::open(dir).map_err(|e| Failure::Workspace(e.to_string()))
}

fn execute(m: &IntMatrix, args: &RunArgs) -> Result<(), Failure> {
    let ws = args.workspace.as_deref().map(open_workspace).transpose()?;
    let out = run(m, &args.config(), ws.as_ref())?;
    emit(&out, args.report, args.json);
    Ok(())
}

fn emit(out: &RunOutput, report: bool, as_json: bool) {
    if as_json {
        let plan = &out.plan;
        let doc = json!({
            "determinant": out.determinant.to_text(),
            "vars": out.determinant.vars,
            "degrees": out.determinant.degrees(),
            "order": plan.order,
            "unique_entries": plan.unique,
            "grid": plan.shape,
            "primes": plan.primes.iter().map(|s| s.p).collect::<Vec<_>>(),
            "coefficient_bound": plan.boundary.to_string(),
            "seconds": {
                "fft": out.times.fft.as_secs_f64(),
                "det": out.times.det.as_secs_f64(),
                "ifft": out.times.ifft.as_secs_f64(),
                "crt": out.times.crt.as_secs_f64(),
            },
            "units": { "computed": out.computed, "restored": out.restored },
        });
        println!("{doc}");
    } else {
        println!("{}", out.determinant);
    }
    if report {
        eprint!("{}", report_text(out));
    }
}

fn report_text(out: &RunOutput) -> String {
    let plan = &out.plan;
    let t = &out.times;
    let grid: Vec<String> = plan.shape.iter().map(|n| n.to_string()).collect();
    let mut s = String::new();
    let mut row = |k: &str, v: String| writeln!(s, "{k:<10} {v}").unwrap();
    row("order", plan.order.to_string());
    row("vars", plan.vars.join(" "));
    row("unique", format!("{} of {} (mu {:.3})", plan.unique, plan.order * plan.order, plan.mu()));
    row("grid", grid.join(" x "));
    row("bound", format!("{} bits", plan.boundary.bits()));
    row("primes", plan.primes.iter().map(|s| s.p.to_string()).collect::<Vec<_>>().join(" "));
    row("FFT(s)", format!("{:.6}", t.fft.as_secs_f64()));
    row("DET(s)", format!("{:.6}", t.det.as_secs_f64()));
    row("IFFT(s)", format!("{:.6}", t.ifft.as_secs_f64()));
    row("CRT(s)", format!("{:.6}", t.crt.as_secs_f64()));
    row("total(s)", format!("{:.6}", t.total().as_secs_f64()));
    row("units", format!("{} computed, {} restored", out.computed, out.restored));
    s
}

fn resultant_matrix(
    input: Option<&Path>,
    vars: Option<&str>,
    f: Option<&str>,
    g: Option<&str>,
    var: &str,
) -> Result<IntMatrix, Failure> {
    let (names, f, g) = match (input, vars, f, g) {
        (Some(path), ..) => {
            let text = read(path)?;
            let lines: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
                .filter(|(_, l)| !l.trim().is_empty())
                .collect();
            let [(dl, decl), (fl, f), (gl, g)] = lines[..] else {
                return Err(Failure::Parse(format!(
                    "{}: expected a `vars` line and two polynomial lines, found {} lines",
                    path.display(),
                    lines.len()
                )));
            };
            let names = parse_vars(decl, dl).map_err(|e| parse_failure(path, e))?;
            let at = |line: usize| move |e: ParseError| parse_failure(path, ParseError { line, ..e });
            let fp = parse_poly(f, &names).map_err(at(fl))?;
            let gp = parse_poly(g, &names).map_err(at(gl))?;
            (names, fp, gp)
        }
        (None, Some(vars), Some(f), Some(g)) => {
            let names = parse_vars(&format!("vars {vars}"), 1).map_err(|e| Failure::Parse(format!("--vars: {e}")))?;
            let fp = parse_poly(f, &names).map_err(|e| Failure::Parse(format!("--f: {e}")))?;
            let gp = parse_poly(g, &names).map_err(|e| Failure::Parse(format!("--g: {e}")))?;
            (names, fp, gp)
        }
        _ => return Err(Failure::Usage("give either --in or all of --vars, --f and --g".into())),
    };
    sylvester(&names, &f, &g, var).map_err(|e| Failure::Parse(e.to_string()))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Det { input, run } => execute(&load_matrix(&input)?, &run),
        Command::Resultant { input, vars, f, g, var, run } => {
            let m = resultant_matrix(input.as_deref(), vars.as_deref(), f.as_deref(), g.as_deref(), &var)?;
            execute(&m, &run)
        }
        Command::Census { orders, count, above, report, json: as_json } => {
            if let Some(bad) = orders.iter().find(|n| !n.is_power_of_two()) {
                return Err(Failure::Usage(format!("order {bad} is not a power of two")));
            }
            let rows = census(&orders, count, above);
            let line = |f: fn(&polydet::modarith::CensusRow) -> usize| {
                rows.iter().map(|r| f(r).to_string()).collect::<Vec<_>>().join(" ")
            };
            if as_json {
                let doc = json!({
                    "count": count,
                    "above": above,
                    "orders": orders,
                    "divisible": rows.iter().map(|r| r.divisible).collect::<Vec<_>>(),
                    "exact_valuation": rows.iter().map(|r| r.exact_valuation).collect::<Vec<_>>(),
                });
                println!("{doc}");
            } else {
                println!("{}", line(|r| r.divisible));
            }
            if report {
                eprintln!("{:>8} {:>10} {:>10}", "order", "N | p-1", "v2(p-1)");
                for r in &rows {
                    eprintln!("{:>8} {:>10} {:>10}", r.order, r.divisible, r.exact_valuation);
                }
            }
            Ok(())
        }
        Command::Predict { input, sample, primes_min, json: as_json } => {
            let m = load_matrix(&input)?;
            let config = Config { min_primes: primes_min, ..Config::default() };
            let plan = plan(&m, &config)?;
            let p = predict(&m, &plan, sample)?;
            if as_json {
                let doc = json!({
                    "prime_count": p.prime_count,
                    "order": p.order,
                    "unique_entries": p.unique,
                    "mu": p.mu(),
                    "samples": p.samples,
                    "mean_seconds": p.mean_seconds(),
                    "predicted_seconds": p.total_seconds(),
                });
                println!("{doc}");
            } else {
                let mean = p.samples.iter().sum::<f64>() / p.samples.len() as f64;
                println!("{}", p.total_text());
                eprintln!(
                    "C_p {} r {} mu {:.3} mean T_e {:.6} s (rounded {:.2}) over {} sample(s)",
                    p.prime_count,
                    p.order,
                    p.mu(),
                    mean,
                    p.mean_seconds(),
                    p.samples.len()
                );
            }
            Ok(())
        }
        Command::Resume { workspace, threads, report, json: as_json, interrupt_after } => {
            let ws = open_workspace(&workspace)?;
            let mut config = Config { interrupt_after, ..Config::default() };
            config.schedule.workers = threads;
            let out = resume(&ws, &config)?;
            emit(&out, report, as_json);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("polydet: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
