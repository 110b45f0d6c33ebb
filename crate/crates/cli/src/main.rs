use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ovfree_cli::run::EXIT_USAGE;
use ovfree_cli::job::parse_value;
use ovfree_cli::{exit_code, render_json, run};

#[derive(Parser)]
#[command(name = "ovfree", version, about = "Operator-valued free and Boolean probability over M_d(C)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment series of a distribution.
    Moments(Common),
    /// Free and/or Boolean cumulants.
    Cumulants(Common),
    /// Free or Boolean convolution of two distributions.
    Convolve(Common),
    /// Convolution power with a linear-map exponent.
    Power(Common),
    /// The B_α evolution of a distribution.
    Bbalpha(Common),
    /// The distribution whose Boolean cumulants are the values of a word map.
    Phi(Common),
    /// Run a seeded verification suite.
    Verify(Common),
    /// Gram-matrix positivity check.
    Gram(Common),
    /// Subordination fixed point for a free convolution power.
    Subordinate(Common),
    /// Burgers-equation residual by central differences.
    Burgers(Common),
    /// Fock-space model moments against the transform layer.
    ModelCheck(Common),
}

#[derive(clap::Args)]
struct Common {
    /// Job file (JSON); `-` reads standard input.
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the seed in the job file.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Moments(c) => ("moments", c),
            Command::Cumulants(c) => ("cumulants", c),
            Command::Convolve(c) => ("convolve", c),
            Command::Power(c) => ("power", c),
            Command::Bbalpha(c) => ("bbalpha", c),
            Command::Phi(c) => ("phi", c),
            Command::Verify(c) => ("verify", c),
            Command::Gram(c) => ("gram", c),
            Command::Subordinate(c) => ("subordinate", c),
            Command::Burgers(c) => ("burgers", c),
            Command::ModelCheck(c) => ("model-check", c),
        }
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("ovfree: {msg}");
    ExitCode::from(code as u8)
}

fn read_spec(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn set_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("OVFREE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("OVFREE_THREADS={v:?} is not a thread count"))?;
    if n == 0 {
        return Err("OVFREE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = set_threads() {
        return fail(EXIT_USAGE, e);
    }
    let (command, args) = cli.command.parts();
    let text = match read_spec(&args.spec) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", args.spec.display())),
    };
    // A job file may leave out "command"; the subcommand supplies it.
    let mut doc: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_USAGE, format!("$: invalid JSON: {e}")),
    };
    if let Some(obj) = doc.as_object_mut() {
        match obj.get("command").and_then(|c| c.as_str()) {
            None => {
                obj.insert("command".into(), command.into());
            }
            Some(c) if c != command => {
                return fail(EXIT_USAGE, format!("$.command: job file says {c:?} but the subcommand is {command:?}"));
            }
            _ => {}
        }
        if let Some(seed) = args.seed {
            obj.insert("seed".into(), seed.into());
        }
    }
    let spec = match parse_value(&doc) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let outcome = match run(&spec) {
        Ok(o) => o,
        Err(e) => return fail(exit_code(&e), e),
    };
    let text = match args.format {
        Format::Json => render_json(&outcome.report),
        Format::Table => outcome.table.clone(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.code as u8)
}
