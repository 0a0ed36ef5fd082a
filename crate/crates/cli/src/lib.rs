//! The `mjv` command: typecheck, verify and run MiniJML programs.

pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use mjv_core::driver::{self, report, BlockMode};
use mjv_core::vcgen::print::{print_cfg, print_passive};
use mjv_core::weave::print::print_body;
use mjv_core::{
    ArithmeticMode, Diagnostic, Inputs, Rac, RunResult, SolverConfig, SourceUnit, Status, Val, VerificationOutcome,
    VerifyOptions,
};

pub use render::{render_outcomes, render_table, render_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mjv", version, about = "Static verifier and runtime checker for MiniJML")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and type-check only.
    Typecheck(TypecheckArgs),
    /// Verify methods against their contracts.
    Check(CheckArgs),
    /// Execute a method with runtime contract checking.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Java,
    Safe,
    Bigint,
}

impl From<Mode> for ArithmeticMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Java => ArithmeticMode::Java,
            Mode::Safe => ArithmeticMode::Safe,
            Mode::Bigint => ArithmeticMode::Bigint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BlockModeArg {
    PerAssertion,
    PerPath,
}

#[derive(Args, Debug)]
pub struct TypecheckArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Verify only these methods (repeatable).
    #[arg(long = "method")]
    pub methods: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Safe)]
    pub mode: Mode,
    /// Solver command line; the script is piped to its standard input.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Per-query timeout in seconds.
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
    #[arg(long)]
    pub logic: Option<String>,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub enumerate: Switch,
    #[arg(long, value_enum, default_value_t = BlockModeArg::PerAssertion)]
    pub block_mode: BlockModeArg,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub feasibility: Switch,
    #[arg(long)]
    pub max_violations: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write every solver script to this directory.
    #[arg(long)]
    pub dump_smt: Option<PathBuf>,
    /// Print the guarded body, CFG and passive graph of each method.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub dump_ir: Switch,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub entry: String,
    /// Argument values in parameter order, e.g. `--arg 3 --arg [1,2] --arg null`.
    #[arg(long = "arg", allow_hyphen_values = true)]
    pub args: Vec<String>,
    /// Initial global values as `name=value`.
    #[arg(long = "global", allow_hyphen_values = true)]
    pub globals: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Safe)]
    pub mode: Mode,
    /// Step budget before giving up.
    #[arg(long)]
    pub fuel: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl CheckArgs {
    pub fn options(&self) -> VerifyOptions {
        let solver = SolverConfig::resolve(self.solver_cmd.as_deref())
            .with_timeout(Duration::from_secs(self.timeout))
            .with_logic(self.logic.clone());
        VerifyOptions {
            mode: self.mode.into(),
            solver,
            enumerate: self.enumerate.on(),
            block_mode: match self.block_mode {
                BlockModeArg::PerAssertion => BlockMode::PerAssertion,
                BlockModeArg::PerPath => BlockMode::PerPath,
            },
            feasibility: self.feasibility.on(),
            max_violations: self.max_violations,
            workers: self.workers,
            dump_smt: self.dump_smt.clone(),
        }
    }
}

/// Aggregate exit code of a set of outcomes. Incomplete answers outrank
/// findings because a violation list is only trustworthy when every query
/// was decided.
pub fn exit_code(outcomes: &[VerificationOutcome]) -> i32 {
    let undecided = outcomes.iter().any(|o| {
        matches!(o.status, Status::Unknown | Status::Timeout | Status::SolverError) || !o.unchecked.is_empty()
    });
    if undecided {
        EXIT_SOLVER
    } else if outcomes
        .iter()
        .any(|o| o.status == Status::Violations || !o.feasibility.is_empty())
    {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

pub fn run_exit_code(r: &RunResult) -> i32 {
    match r {
        RunResult::Normal(_) => EXIT_OK,
        RunResult::ContractViolation { .. } | RunResult::RuntimeError { .. } | RunResult::NotApplicable => {
            EXIT_FINDINGS
        }
        RunResult::NotExecutable { .. } => EXIT_SOLVER,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn diag_text(unit: &SourceUnit, d: &Diagnostic) -> String {
    let line = unit.line_text(d.span.line);
    let caret = format!("{}^", " ".repeat(d.span.col.saturating_sub(1) as usize));
    format!("{}:{d}\n    {line}\n    {caret}\n", unit.path)
}

fn diag_json(d: &Diagnostic) -> Json {
    json!({
        "code": d.code,
        "severity": d.severity,
        "message": d.message,
        "line": d.span.line,
        "col": d.span.col,
    })
}

fn diags_document(unit: &SourceUnit, diags: &[Diagnostic]) -> Json {
    json!({ "file": unit.path, "diagnostics": diags.iter().map(diag_json).collect::<Vec<_>>() })
}

fn read_unit(path: &Path, io: &mut Io) -> Option<SourceUnit> {
    match SourceUnit::from_file(path) {
        Ok(u) => Some(u),
        Err(e) => {
            let _ = writeln!(io.err, "mjv: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn print_json(io: &mut Io, docs: Vec<Json>) {
    let doc = if docs.len() == 1 {
        docs.into_iter().next().unwrap()
    } else {
        Json::Array(docs)
    };
    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
}

fn typecheck(a: &TypecheckArgs, io: &mut Io) -> i32 {
    let mut code = EXIT_OK;
    let mut docs = Vec::new();
    for path in &a.files {
        let Some(unit) = read_unit(path, io) else {
            code = EXIT_USAGE;
            continue;
        };
        let diags = match mjv_core::load(&unit) {
            Ok((_, warnings)) => warnings,
            Err(errors) => {
                code = EXIT_USAGE;
                errors
            }
        };
        match a.format {
            Format::Json => docs.push(diags_document(&unit, &diags)),
            Format::Text => {
                for d in &diags {
                    let _ = write!(io.err, "{}", diag_text(&unit, d));
                }
                if !diags.iter().any(Diagnostic::is_error) {
                    let _ = writeln!(io.out, "{}: ok", unit.path);
                }
            }
        }
    }
    if a.format == Format::Json {
        print_json(io, docs);
    }
    code
}

fn dump_ir(program: &mjv_core::TypedProgram, a: &CheckArgs, io: &mut Io) {
    for m in driver::selected_methods(program, &a.methods) {
        let Ok(p) = driver::prepare(program, m, a.mode.into()) else {
            continue;
        };
        // Keep stdout a single JSON document in JSON mode.
        let w: &mut dyn Write = if a.format == Format::Json {
            &mut *io.err
        } else {
            &mut *io.out
        };
        let _ = writeln!(w, "== {} : guarded body ==\n{}", m.name, print_body(&p.body));
        let _ = writeln!(w, "== {} : cfg ==\n{}", m.name, print_cfg(&p.cfg));
        let _ = writeln!(w, "== {} : passive ==\n{}", m.name, print_passive(&p.graph));
    }
}

fn check(a: &CheckArgs, io: &mut Io) -> i32 {
    let opts = a.options();
    let mut code = EXIT_OK;
    let mut docs = Vec::new();
    let multi = a.files.len() > 1;
    for path in &a.files {
        let Some(unit) = read_unit(path, io) else {
            code = EXIT_USAGE;
            continue;
        };
        let program = match mjv_core::load(&unit) {
            Ok((p, warnings)) => {
                if a.format == Format::Text {
                    for d in &warnings {
                        let _ = write!(io.err, "{}", diag_text(&unit, d));
                    }
                }
                p
            }
            Err(errors) => {
                code = EXIT_USAGE;
                match a.format {
                    Format::Json => docs.push(diags_document(&unit, &errors)),
                    Format::Text => errors.iter().for_each(|d| {
                        let _ = write!(io.err, "{}", diag_text(&unit, d));
                    }),
                }
                continue;
            }
        };
        for m in &a.methods {
            if program.method(m).is_none_or(|t| t.body.is_none()) {
                let _ = writeln!(io.err, "mjv: {}: no method with a body named `{m}`", unit.path);
            }
        }
        if a.dump_ir.on() {
            dump_ir(&program, a, io);
        }
        let outcomes = match driver::verify_program(&program, &a.methods, &opts) {
            Ok(o) => o,
            Err(errors) => {
                code = EXIT_USAGE;
                match a.format {
                    Format::Json => docs.push(diags_document(&unit, &errors)),
                    Format::Text => errors.iter().for_each(|d| {
                        let _ = write!(io.err, "{}", diag_text(&unit, d));
                    }),
                }
                continue;
            }
        };
        if code != EXIT_USAGE {
            code = code.max(exit_code(&outcomes));
        }
        match a.format {
            Format::Json => docs.push(report::document(&unit.path, &outcomes, &unit)),
            Format::Text => {
                if multi {
                    let _ = writeln!(io.out, "== {} ==", unit.path);
                }
                let _ = write!(io.out, "{}", render_outcomes(&outcomes, &unit));
            }
        }
    }
    if a.format == Format::Json {
        print_json(io, docs);
    }
    code
}

fn parse_inputs(program: &mjv_core::TypedProgram, a: &RunArgs) -> Result<Inputs, String> {
    let m = program
        .method(&a.entry)
        .ok_or_else(|| format!("no method named `{}`", a.entry))?;
    if a.args.len() != m.params.len() {
        return Err(format!(
            "`{}` takes {} argument(s), {} given",
            m.name,
            m.params.len(),
            a.args.len()
        ));
    }
    let args = m
        .params
        .iter()
        .zip(&a.args)
        .map(|(p, s)| Val::parse_as(s, p.ty, p.nullable).map_err(|e| format!("argument `{}`: {e}", p.name)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut inputs = Inputs::new(args);
    for g in &a.globals {
        let (name, text) = g
            .split_once('=')
            .ok_or_else(|| format!("`{g}` is not of the form name=value"))?;
        let name = name.trim();
        let decl = program
            .global(name)
            .ok_or_else(|| format!("no global named `{name}`"))?;
        let v = Val::parse_as(text, decl.ty, decl.nullable).map_err(|e| format!("global `{name}`: {e}"))?;
        inputs.globals.insert(name.to_string(), v);
    }
    Ok(inputs)
}

fn run(a: &RunArgs, io: &mut Io) -> i32 {
    let Some(unit) = read_unit(&a.file, io) else {
        return EXIT_USAGE;
    };
    let program = match mjv_core::load(&unit) {
        Ok((p, _)) => p,
        Err(errors) => {
            for d in &errors {
                let _ = write!(io.err, "{}", diag_text(&unit, d));
            }
            return EXIT_USAGE;
        }
    };
    let inputs = match parse_inputs(&program, a) {
        Ok(i) => i,
        Err(e) => {
            let _ = writeln!(io.err, "mjv: {e}");
            return EXIT_USAGE;
        }
    };
    let mut rac = Rac::new(&program, a.mode.into());
    if let Some(f) = a.fuel {
        rac = rac.with_fuel(f);
    }
    let result = rac.run(&a.entry, &inputs);
    if a.format == Format::Text {
        let _ = writeln!(io.out, "{}({}): {result}", a.entry, inputs.describe(&program, &a.entry));
    }
    let _ = writeln!(io.out, "{}", result.to_json());
    run_exit_code(&result)
}

/// Parse `argv` (including the program name) and execute. Clap's own
/// messages go to the given streams.
pub fn main_with(
    argv: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    match &cli.command {
        Command::Typecheck(a) => typecheck(a, &mut io),
        Command::Check(a) => check(a, &mut io),
        Command::Run(a) => run(a, &mut io),
    }
}
