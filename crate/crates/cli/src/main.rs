mod number;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Signed;
use symtruss::engine::{analyze, assemble, audit, EngineError};
use symtruss::kernel::{Bindings, Expr, KernelError};
use symtruss::model::{load_model, ModelError, TrussModel};
use symtruss::parser::parse_rational;
use symtruss::sensitivity::{sensitivity, symbols, QuantitySelector, SensitivityError};

use report::{Focus, Format, Numeric, Report, Sensitivity, Tables, Value};

#[derive(Parser, Debug)]
#[command(name = "symtruss", version, about = "Exact symbolic analysis of plane trusses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Model file.
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form displacements, reactions and axial forces.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Partial derivatives of selected outputs.
    Sens {
        #[command(flatten)]
        common: Common,
        /// Output selector: dx:N, dy:N, rx:N, ry:N or n:E. Repeatable.
        #[arg(long, required = true)]
        quantity: Vec<String>,
        /// Parameter to differentiate by. Repeatable; defaults to all parameters.
        #[arg(long)]
        wrt: Vec<String>,
    },
    /// Substitute positive values for some or all parameters.
    Eval {
        #[command(flatten)]
        common: Common,
        /// NAME=VALUE, value a positive integer, fraction or decimal. Repeatable.
        #[arg(long = "set")]
        set: Vec<String>,
        /// Significant digits for fully evaluated quantities.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=17))]
        digits: u32,
    },
    /// Exact equilibrium, symmetry and rigid-body audit of the solution.
    Check {
        /// Model file.
        model: PathBuf,
    },
}

/// Failure with its process exit code.
#[derive(Debug)]
enum Failure {
    User(String),
    Unstable(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::User(_) => 1,
            Failure::Unstable(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::User(m) | Failure::Unstable(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Unstable => Failure::Unstable(e.to_string()),
            EngineError::Invariant(_) | EngineError::NonUnitDirection => Failure::Invariant(e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::User(e.to_string())
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Self {
        Failure::User(e.to_string())
    }
}

impl From<SensitivityError> for Failure {
    fn from(e: SensitivityError) -> Self {
        Failure::User(e.to_string())
    }
}

fn load(path: &Path) -> Result<TrussModel, Failure> {
    load_model(path).map_err(|e| match e {
        ModelError::NotFound(_) => Failure::User(e.to_string()),
        _ => Failure::User(format!("{}: {e}", path.display())),
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::User(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_bindings(m: &TrussModel, set: &[String]) -> Result<(Bindings, Vec<(String, String)>), Failure> {
    let mut bindings = Bindings::new();
    let mut shown = BTreeMap::new();
    for item in set {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::User(format!("--set expects NAME=VALUE, got `{item}`")))?;
        let (name, value) = (name.trim(), value.trim());
        let sym = m.env.symbol(name)?;
        let q = parse_rational(value).map_err(|e| Failure::User(format!("--set {name}: {e}")))?;
        if !q.is_positive() {
            return Err(Failure::User(format!("--set {name}: value must be positive, got {value}")));
        }
        bindings.insert(sym, q);
        shown.insert(name.to_string(), value.to_string());
    }
    Ok((bindings, shown.into_iter().collect()))
}

/// Fully bound quantities become numbers; the rest stay symbolic.
fn evaluate(e: &Expr, b: &Bindings) -> Result<Value, KernelError> {
    let residual = e.substitute(b)?;
    if residual.free_symbols().is_empty() {
        Ok(Value::Number(residual.eval_f64(&BTreeMap::new())?))
    } else {
        Ok(Value::Exact(residual))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common } => {
            let m = load(&common.model)?;
            let r = analyze(&m)?;
            let report = Report::new(&m, &r, Focus::Symbolic, 6);
            emit(&report.render(common.format), common.out.as_deref())
        }
        Command::Sens { common, quantity, wrt } => {
            let m = load(&common.model)?;
            let selectors =
                quantity.iter().map(|q| q.parse::<QuantitySelector>()).collect::<Result<Vec<_>, _>>()?;
            let names = if wrt.is_empty() { m.env.symbol_names() } else { wrt };
            let syms = symbols(&m.env, &names)?;
            let r = analyze(&m)?;
            let mut entries = Vec::new();
            for &q in &selectors {
                for (name, &s) in names.iter().zip(&syms) {
                    entries.push(Sensitivity {
                        quantity: q,
                        wrt: name.clone(),
                        value: sensitivity(&r, q, s)?,
                    });
                }
            }
            let mut report = Report::new(&m, &r, Focus::Sensitivities, 6);
            report.sensitivities = Some(entries);
            emit(&report.render(common.format), common.out.as_deref())
        }
        Command::Eval { common, set, digits } => {
            let m = load(&common.model)?;
            let (bindings, shown) = parse_bindings(&m, &set)?;
            let r = analyze(&m)?;
            let mut report = Report::new(&m, &r, Focus::Numeric, digits as usize);
            report.numeric =
                Some(Numeric { bindings: shown, tables: Tables::try_map(&r, |e| evaluate(e, &bindings))? });
            emit(&report.render(common.format), common.out.as_deref())
        }
        Command::Check { model } => {
            let m = load(&model)?;
            let r = analyze(&m)?;
            let asm = assemble(&m)?;
            let outcomes = audit(&m, &asm, &r);
            let mut text = String::new();
            for c in &outcomes {
                let status = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{status} {}", c.name));
                if let Some(d) = &c.detail {
                    text.push_str(&format!(": {d}"));
                }
                text.push('\n');
            }
            emit(&text, None)?;
            match outcomes.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(Failure::Invariant(format!("{n} invariant check(s) failed"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage mistakes are user errors; 2 is reserved for instability.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
