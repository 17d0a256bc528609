//! Command-line front end: `synth`, `transform`, `verify` and `bench`
//! subcommands over the library pipeline. Exit codes: 0 on success, 1 on
//! a verification failure, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::circuit::{Circuit, DEFAULT_GUARD};
use crate::pprm::{
    builtin, read_pprm_file, read_table_file, write_pprm_file, write_table_file, PprmExpr,
    BUILTIN_NAMES, MAX_TABLE_VARS,
};
use crate::synthesis::{synthesize, Method};
use crate::verify::{check_equivalence, check_preservation, run_benchmarks};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "revsynth",
    about = "Compile Reed-Muller (PPRM) expressions into reversible circuits",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a circuit and print its netlist plus a one-line report
    Synth(SynthArgs),
    /// Convert between `.pprm` expressions and truth-table files
    Transform(TransformArgs),
    /// Check a netlist against a PPRM function
    Verify(VerifyArgs),
    /// Synthesize and verify a set of benchmark functions
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Factor,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::Factor => Method::Factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CostArg {
    Naive,
    Reduced,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Csv,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "builtin"])))]
pub struct SynthArgs {
    /// Path to a `.pprm` expression file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Name of a built-in benchmark (hbfr6, 4mod5, 2of5)
    #[arg(long)]
    pub builtin: Option<String>,
    /// Force the variable count (at least the highest index used plus one)
    #[arg(long)]
    pub vars: Option<usize>,
    /// Synthesis method
    #[arg(long, value_enum, default_value_t = MethodArg::Factor)]
    pub method: MethodArg,
    /// Leave input wires dirty instead of restoring them
    #[arg(long)]
    pub no_restore: bool,
    /// Which cost figures to report
    #[arg(long, value_enum, default_value_t = CostArg::Both)]
    pub cost: CostArg,
    /// Write the netlist here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exhaustive verification limit (input count)
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: usize,
    /// Verify by random sampling when the guard is exceeded
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Input file: `.pprm` converts to a truth table, anything else is
    /// read as a truth table and converts to `.pprm`
    #[arg(long)]
    pub input: PathBuf,
    /// Force the variable count of a `.pprm` input
    #[arg(long)]
    pub vars: Option<usize>,
    /// Write the conversion here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Netlist file
    #[arg(long)]
    pub circuit: PathBuf,
    /// `.pprm` function file
    #[arg(long)]
    pub function: PathBuf,
    /// Exhaustive verification limit (input count)
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: usize,
    /// Verify by random sampling when the guard is exceeded
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark names: built-ins or paths to `.pprm` files
    /// (default: 4mod5 2of5 hbfr6)
    pub names: Vec<String>,
    /// Report circuits without the trailing restore gates
    #[arg(long)]
    pub no_restore: bool,
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exhaustive verification limit (input count)
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: usize,
    /// Number of worker threads
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Run a parsed invocation and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn widen(e: PprmExpr, vars: Option<usize>) -> Result<PprmExpr, String> {
    match vars {
        None => Ok(e),
        Some(n) => PprmExpr::from_terms(n, e.terms().copied()).map_err(|err| err.to_string()),
    }
}

fn load_expr(
    input: &Option<PathBuf>,
    builtin_name: &Option<String>,
    vars: Option<usize>,
) -> Result<PprmExpr, String> {
    let e = match (input, builtin_name) {
        (Some(path), None) => read_pprm_file(&read_to_string(path)?)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(name)) => builtin(name).map_err(|e| e.to_string())?,
        _ => unreachable!("clap enforces exactly one source"),
    };
    widen(e, vars)
}

fn cmd_synth(args: SynthArgs) -> Result<i32, String> {
    let e = load_expr(&args.input, &args.builtin, args.vars)?;
    let restore = !args.no_restore;
    let result = synthesize(&e, args.method.into(), restore);

    let verdict = check_equivalence(&result.circuit, &e, args.guard, args.samples)
        .map_err(|err| err.to_string())?;
    let mut verified = verdict.equivalent;
    if restore && verified {
        verified = check_preservation(&result.circuit, args.guard, args.samples)
            .map_err(|err| err.to_string())?;
    }

    write_output(&args.out, &result.circuit.to_netlist())?;

    let mut report = format!("gates={}", result.gates);
    match args.cost {
        CostArg::Naive => {
            report.push_str(&format!(" cost_naive={}", result.naive_cost));
        }
        CostArg::Reduced => {
            report.push_str(&format!(" cost_reduced={}", result.reduced_cost));
        }
        CostArg::Both => {
            report.push_str(&format!(
                " cost_naive={} cost_reduced={}",
                result.naive_cost, result.reduced_cost
            ));
        }
    }
    report.push_str(&format!(" restored={restore} verified={verified}"));
    println!("{report}");

    if let Some(cx) = verdict.counterexample {
        eprintln!(
            "verification failed at assignment {} (expected {}, got {})",
            cx.assignment, cx.expected as u8, cx.actual as u8
        );
    }
    Ok(if verified { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_transform(args: TransformArgs) -> Result<i32, String> {
    let text = read_to_string(&args.input)?;
    let is_pprm = args
        .input
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("pprm"));
    let converted = if is_pprm {
        let e = widen(
            read_pprm_file(&text).map_err(|e| format!("{}: {e}", args.input.display()))?,
            args.vars,
        )?;
        if e.n() > MAX_TABLE_VARS {
            return Err(format!(
                "{} variables will not tabulate (limit {MAX_TABLE_VARS})",
                e.n()
            ));
        }
        write_table_file(&e.truth_table())
    } else {
        let t = read_table_file(&text).map_err(|e| format!("{}: {e}", args.input.display()))?;
        write_pprm_file(&PprmExpr::from_truth_table(&t))
    };
    write_output(&args.out, &converted)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, String> {
    let circuit = Circuit::from_netlist(&read_to_string(&args.circuit)?)
        .map_err(|e| format!("{}: {e}", args.circuit.display()))?;
    let e = read_pprm_file(&read_to_string(&args.function)?)
        .map_err(|e| format!("{}: {e}", args.function.display()))?;
    let vars = Some(circuit.inputs()).filter(|&n| n >= e.n());
    let e = widen(e, vars)?;
    let verdict =
        check_equivalence(&circuit, &e, args.guard, args.samples).map_err(|err| err.to_string())?;
    match verdict.counterexample {
        None => {
            println!(
                "equivalent ({})",
                match verdict.mode {
                    crate::verify::CheckMode::Exhaustive => "exhaustive".to_string(),
                    crate::verify::CheckMode::Sampled { count } =>
                        format!("sampled, {count} assignments"),
                }
            );
            Ok(EXIT_OK)
        }
        Some(cx) => {
            println!(
                "not equivalent: assignment={} expected={} actual={}",
                cx.assignment, cx.expected as u8, cx.actual as u8
            );
            Ok(EXIT_VERIFY)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<i32, String> {
    let names: Vec<String> = if args.names.is_empty() {
        vec!["4mod5".into(), "2of5".into(), "hbfr6".into()]
    } else {
        args.names.clone()
    };
    let mut benches = Vec::new();
    for name in &names {
        let e = if BUILTIN_NAMES.contains(&name.as_str()) {
            builtin(name).map_err(|e| e.to_string())?
        } else {
            let path = Path::new(name);
            read_pprm_file(&read_to_string(path)?).map_err(|e| format!("{name}: {e}"))?
        };
        benches.push((name.clone(), e));
    }
    match run_benchmarks(&benches, !args.no_restore, args.guard, args.jobs.max(1)) {
        Ok(report) => {
            let rendered = match args.format {
                FormatArg::Text => report.render_text(),
                FormatArg::Csv => report.render_csv(),
            };
            write_output(&args.out, &rendered)?;
            Ok(EXIT_OK)
        }
        Err(err @ crate::verify::VerifyError::NotEquivalent { .. })
        | Err(err @ crate::verify::VerifyError::InputsNotPreserved { .. }) => {
            eprintln!("verification failed: {err}");
            Ok(EXIT_VERIFY)
        }
        Err(err) => Err(err.to_string()),
    }
}
