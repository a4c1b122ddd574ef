use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockop::block::Side;
use blockop::commands::run_all;
use blockop::dsl::{self, Command, SpecDocument};
use blockop::numeric::Settings;
use blockop::{Error, GQ};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 66;

/// Symbolic and numeric checks for block operator matrices on L²(0,1).
#[derive(Parser)]
#[command(name = "blockop", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Also write the report as JSON to this path (`-` for stdout, replacing the text report).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Galerkin basis size per component.
    #[arg(long, global = true, default_value_t = 200)]
    galerkin: usize,
    #[arg(long, global = true, default_value_t = 64)]
    quad_nodes: usize,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_pairing: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_resolvent: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the `[run]` section of a spec file.
    Run { file: PathBuf },
    /// Print a spec file in canonical form.
    Print { file: PathBuf },
    /// Adjoint of an operator or block.
    Adjoint { file: PathBuf, name: String },
    /// Closure of an operator or block.
    Closure { file: PathBuf, name: String },
    /// Relative bound of S with respect to T, exact and estimated.
    Relbound { file: PathBuf, s: String, t: String },
    /// Formal versus actual product of two blocks.
    Product { file: PathBuf, a: String, b: String },
    /// Formal adjoint, adjoint and closedness of a block.
    CheckAdjoint { file: PathBuf, block: String },
    /// Frobenius-Schur factorization of a 2×2 block at λ.
    Factorize {
        file: PathBuf,
        block: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        side: u8,
    },
    /// Self-adjointness verdict.
    CheckSa { file: PathBuf, block: String },
    /// Essential self-adjointness verdict.
    CheckEsa { file: PathBuf, block: String },
    /// Numeric evidence for self-adjointness.
    Verify { file: PathBuf, block: String },
    /// Recompute the three worked examples.
    Examples,
}

enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    dsl::parse(&src).map_err(|e| Failure::Data(format!("{}:{e}", path.display())))
}

fn check_names(doc: &SpecDocument, cmd: &Command) -> Result<(), Failure> {
    for n in cmd.names() {
        doc.resolve(n).map_err(|e| Failure::Data(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match real_main(cli) {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Data(m) => (EXIT_DATA, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn real_main(cli: Cli) -> Result<ExitCode, Failure> {
    let o = &cli.opts;
    let settings = Settings {
        seed: o.seed,
        galerkin: o.galerkin,
        quad_nodes: o.quad_nodes,
        tol_pairing: o.tol_pairing,
        tol_resolvent: o.tol_resolvent,
        ..Settings::default()
    };
    if settings.galerkin < 4 || settings.quad_nodes < 2 {
        return Err(Failure::Usage("--galerkin must be at least 4 and --quad-nodes at least 2".into()));
    }
    let (mut doc, cmd) = match cli.cmd {
        Cmd::Run { file } => (load(&file)?, None),
        Cmd::Print { file } => {
            print!("{}", dsl::print(&load(&file)?));
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Adjoint { file, name } => (load(&file)?, Some(Command::Adjoint { name })),
        Cmd::Closure { file, name } => (load(&file)?, Some(Command::Closure { name })),
        Cmd::Relbound { file, s, t } => (load(&file)?, Some(Command::Relbound { s, t })),
        Cmd::Product { file, a, b } => (load(&file)?, Some(Command::Product { a, b })),
        Cmd::CheckAdjoint { file, block } => (load(&file)?, Some(Command::CheckAdjoint { block })),
        Cmd::Factorize { file, block, lambda, side } => {
            let lambda: GQ =
                lambda.parse().map_err(|_| Failure::Usage(format!("malformed scalar `{lambda}` for --lambda")))?;
            let side = if side == 1 { Side::First } else { Side::Second };
            (load(&file)?, Some(Command::Factorize { block, lambda, side }))
        }
        Cmd::CheckSa { file, block } => (load(&file)?, Some(Command::CheckSa { block })),
        Cmd::CheckEsa { file, block } => (load(&file)?, Some(Command::CheckEsa { block })),
        Cmd::Verify { file, block } => (load(&file)?, Some(Command::Verify { block })),
        Cmd::Examples => (SpecDocument::default(), Some(Command::Examples)),
    };
    if let Some(c) = cmd {
        check_names(&doc, &c)?;
        doc.commands = vec![c];
    }
    let report = run_all(&doc, &settings).map_err(|e| match e {
        Error::Usage(m) => Failure::Usage(m),
        other => Failure::Data(other.to_string()),
    })?;
    match &o.json {
        Some(p) if p.as_os_str() == "-" => println!("{}", report.to_json()),
        Some(p) => {
            std::fs::write(p, report.to_json() + "\n").map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_text()),
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}
