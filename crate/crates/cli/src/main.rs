use std::fs::File;
use std::io::{self, BufWriter, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::Num;
use tabntt_core::tables::format;
use tabntt_core::{
    make_plan_with, run_bench, run_suite, write_csv, BenchOptions, Error, LeafMode, Multiplier, NttEngine,
    OpCounts, PlanOptions, TableSet, TransformPlan, VerifyLevel,
};

#[derive(Parser)]
#[command(name = "tabntt", version, about = "Table-lookup number theoretic transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the plan for a target length as key=value lines.
    Plan(PlanArgs),
    /// Build the tables for a plan and write them as an NTTB file.
    Preprocess {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward (or inverse) transform of the given values, zero-padded to the realized length.
    Dft {
        #[command(flatten)]
        plan: OptionalPlanArgs,
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long, default_value = "lookup")]
        mode: LeafMode,
        #[arg(long)]
        inverse: bool,
        /// Print operation counts to stderr.
        #[arg(long)]
        counts: bool,
        /// Values in [0, P); read from stdin when omitted.
        values: Vec<u64>,
    },
    /// Exact product of two hexadecimal integers.
    Multiply {
        a: String,
        b: String,
        /// Use a preprocessed table file instead of planning for the operands.
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long, default_value = "lookup")]
        mode: LeafMode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count and time one forward transform per size and mode.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        #[arg(long, alias = "mode", value_delimiter = ',', default_value = "direct,lookup")]
        modes: Vec<LeafMode>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the oracle and cross-mode comparisons.
        #[arg(long)]
        no_verify: bool,
    },
    /// Run the invariant suite on a table file.
    Verify {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long, default_value = "quick")]
        level: VerifyLevel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    rest: PlanFlags,
}

#[derive(Args)]
struct OptionalPlanArgs {
    #[arg(long)]
    n: Option<u64>,
    #[command(flatten)]
    rest: PlanFlags,
}

#[derive(Args)]
struct PlanFlags {
    /// Base-case size; searched when omitted.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    budget_bits: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PlanFlags {
    fn options(&self) -> PlanOptions {
        PlanOptions {
            budget_bits: self.budget_bits,
            seed: self.seed,
            base_size: self.m,
            ..PlanOptions::default()
        }
    }
}

const EXIT_PLAN: u8 = 2;
const EXIT_PREPROCESS: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_FORMAT: u8 = 5;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    /// Errors with a fixed code keep it; the rest get `fallback`.
    fn from_error(err: Error, fallback: u8) -> Self {
        let code = match err {
            Error::Format(_) => EXIT_FORMAT,
            Error::Mismatch(_) => EXIT_VERIFY,
            Error::Capacity(_) | Error::Budget { .. } | Error::TableOverflow { .. } => EXIT_PREPROCESS,
            _ => fallback,
        };
        Failure::new(code, err.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args),
        Command::Preprocess { plan, out } => cmd_preprocess(&plan, &out),
        Command::Dft {
            plan,
            tables,
            mode,
            inverse,
            counts,
            values,
        } => cmd_dft(&plan, tables.as_ref(), mode, inverse, counts, values),
        Command::Multiply { a, b, tables, mode, seed } => cmd_multiply(&a, &b, tables.as_ref(), mode, seed),
        Command::Bench {
            sizes,
            modes,
            csv,
            m,
            budget_bits,
            seed,
            no_verify,
        } => {
            let opts = BenchOptions {
                plan: PlanFlags { m, budget_bits, seed }.options(),
                verify: !no_verify,
            };
            cmd_bench(&sizes, &modes, csv.as_ref(), &opts)
        }
        Command::Verify { tables, level, seed } => cmd_verify(&tables, level, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn plan(args: &PlanArgs) -> Result<TransformPlan, Failure> {
    make_plan_with(args.n, &args.rest.options()).map_err(|e| Failure::from_error(e, EXIT_PLAN))
}

fn cmd_plan(args: &PlanArgs) -> CmdResult {
    // budget failures during planning are still planning failures here
    let plan = make_plan_with(args.n, &args.rest.options()).map_err(|e| Failure::new(EXIT_PLAN, e.to_string()))?;
    println!("{plan}");
    Ok(())
}

fn cmd_preprocess(args: &PlanArgs, out: &PathBuf) -> CmdResult {
    let plan = plan(args)?;
    let tables = TableSet::build(&plan).map_err(|e| Failure::from_error(e, EXIT_PREPROCESS))?;
    format::save(out, &plan, &tables).map_err(|e| Failure::from_error(e, EXIT_PREPROCESS))?;
    println!("wrote {} (n={}, P={}, {} table bits)", out.display(), plan.length_n, plan.field_prime, tables.table_bits());
    Ok(())
}

fn load_engine(path: &PathBuf) -> Result<NttEngine, Failure> {
    let (plan, tables) = format::load(path).map_err(|e| Failure::from_error(e, EXIT_FORMAT))?;
    NttEngine::new(plan, tables).map_err(|e| Failure::from_error(e, EXIT_FORMAT))
}

fn cmd_dft(
    args: &OptionalPlanArgs,
    tables: Option<&PathBuf>,
    mode: LeafMode,
    inverse: bool,
    show_counts: bool,
    mut values: Vec<u64>,
) -> CmdResult {
    if values.is_empty() {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::new(EXIT_PLAN, e.to_string()))?;
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            values.push(tok.parse().map_err(|_| Failure::new(EXIT_PLAN, format!("not an integer: {tok:?}")))?);
        }
    }
    let engine = match (tables, args.n) {
        (Some(path), _) => load_engine(path)?,
        (None, Some(n)) => {
            let plan = plan(&PlanArgs {
                n,
                rest: PlanFlags {
                    m: args.rest.m,
                    budget_bits: args.rest.budget_bits,
                    seed: args.rest.seed,
                },
            })?;
            NttEngine::build(plan).map_err(|e| Failure::from_error(e, EXIT_PREPROCESS))?
        }
        (None, None) => {
            let n = (values.len() as u64).max(4);
            let plan = make_plan_with(n, &args.rest.options()).map_err(|e| Failure::from_error(e, EXIT_PLAN))?;
            NttEngine::build(plan).map_err(|e| Failure::from_error(e, EXIT_PREPROCESS))?
        }
    };
    let n = engine.len();
    if values.len() > n {
        return Err(Failure::new(EXIT_PLAN, format!("{} values do not fit length {n}", values.len())));
    }
    values.resize(n, 0);
    let mut counts = OpCounts::new();
    let out = if inverse {
        engine.inverse(&values, mode, &mut counts)
    } else {
        engine.forward(&values, mode, &mut counts)
    }
    .map_err(|e| Failure::from_error(e, EXIT_PLAN))?;
    let text: Vec<String> = out.iter().map(u64::to_string).collect();
    println!("{}", text.join(","));
    if show_counts {
        eprintln!(
            "n={n} P={} mulmod={} addmod={} table_reads={} compares={}",
            engine.modulus(),
            counts.mulmod,
            counts.addmod,
            counts.table_reads,
            counts.compares
        );
    }
    Ok(())
}

fn parse_hex(s: &str) -> Result<BigUint, Failure> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    BigUint::from_str_radix(digits, 16).map_err(|_| Failure::new(EXIT_PLAN, format!("not a hex integer: {s:?}")))
}

fn cmd_multiply(a: &str, b: &str, tables: Option<&PathBuf>, mode: LeafMode, seed: Option<u64>) -> CmdResult {
    let (a, b) = (parse_hex(a)?, parse_hex(b)?);
    let multiplier = match tables {
        Some(path) => Multiplier::from_engine(load_engine(path)?),
        None => {
            let opts = PlanOptions {
                seed: seed.unwrap_or(0),
                ..PlanOptions::default()
            };
            Multiplier::for_operands(a.bits().max(1), b.bits().max(1), None, &opts)
        }
    }
    .map_err(|e| Failure::from_error(e, EXIT_PLAN))?;
    let product = multiplier
        .multiply(&a, &b, mode, &mut OpCounts::new())
        .map_err(|e| Failure::from_error(e, EXIT_PLAN))?;
    println!("0x{product:x}");
    Ok(())
}

fn cmd_bench(sizes: &[u64], modes: &[LeafMode], csv: Option<&PathBuf>, opts: &BenchOptions) -> CmdResult {
    let records = run_bench(sizes, modes, opts).map_err(|e| Failure::from_error(e, EXIT_PLAN))?;
    let written = match csv {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::new(EXIT_PLAN, format!("{}: {e}", path.display())))?;
            write_csv(BufWriter::new(file), &records)
        }
        None => write_csv(io::stdout().lock(), &records),
    };
    written.map_err(|e| Failure::from_error(e, EXIT_PLAN))
}

fn cmd_verify(path: &PathBuf, level: VerifyLevel, seed: u64) -> CmdResult {
    let (plan, tables) = format::load(path).map_err(|e| Failure::from_error(e, EXIT_FORMAT))?;
    let report = run_suite(&plan, &tables, level, seed).map_err(|e| Failure::from_error(e, EXIT_FORMAT))?;
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VERIFY, "invariant checks failed"))
    }
}
