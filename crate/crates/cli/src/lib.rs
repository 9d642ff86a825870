//! The `nmqc3` command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nmqc_core::bell::{format_float, inequality_report_with, parse_weights, BellGame, LhvSearch};
use nmqc_core::protocol::ProgramOutcome;
use nmqc_core::simulator::{chi_square, sample_with_limit, DEFAULT_MAX_SIM_WIDTH};
use nmqc_core::synthesis::{
    delta_width_floor, family_fn, family_table, minimal_support, synthesize_with_report, FamilyRow,
    MAX_MINIMAL_ARITY,
};
use nmqc_core::{fmt_rational, Error, NmqcProgram, Trit, TritFunction, TritVector};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

/// Largest n accepted by `family`.
pub const MAX_FAMILY_N: usize = 12;

/// Significance level for the sampling agreement check.
pub const AGREEMENT_ALPHA: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "nmqc3", version, about = "Exact qutrit GHZ measurement programs: synthesis, Bell bounds, simulation")]
pub struct Cli {
    /// Worker threads for the classical bound search and sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a deterministic program for a function file.
    Synthesize(SynthesizeArgs),
    /// Emit fₙ, its n+1 qutrit program and its evaluation table.
    Family(FamilyArgs),
    /// Classical and quantum values of the Bell inequality of a game.
    Bell(BellArgs),
    /// Sample measurement outcomes of a program at one input.
    Simulate(SimulateArgs),
    /// Smallest exact row support per post-processing trit.
    Minimal(MinimalArgs),
    /// Evaluation tables of f₂ and f₃.
    Tables,
}

#[derive(Args, Debug)]
pub struct SynthesizeArgs {
    /// Function file: arity line, then 3ⁿ trits.
    pub function: PathBuf,
    /// Where to write the program; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    pub n: usize,
    /// Directory for `f<n>.fn` and `f<n>.prog`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BellArgs {
    pub function: PathBuf,
    pub program: PathBuf,
    /// 3ⁿ rationals in input order; uniform when absent.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Largest program width the exhaustive search accepts.
    #[arg(long, default_value_t = nmqc_core::bell::DEFAULT_MAX_LHV_WIDTH)]
    pub max_width: usize,
    /// Fix rᵢ(0) = 0 on sites after the first; same bound, 3^(l-1) fewer strategies.
    #[arg(long)]
    pub fix_offsets: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub program: PathBuf,
    /// Input x, e.g. `1,2`.
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print `m0 m1 … z` for every shot.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_SIM_WIDTH)]
    pub max_width: usize,
}

#[derive(Args, Debug)]
pub struct MinimalArgs {
    pub function: PathBuf,
    /// Refuse functions of larger arity.
    #[arg(long, default_value_t = MAX_MINIMAL_ARITY)]
    pub max_n: usize,
    /// Only try this post-processing trit.
    #[arg(short, long)]
    pub c: Option<u8>,
}

/// A failed run with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn in_file(path: &Path, err: Error) -> Self {
        let mut e = CliError::from(err);
        e.message = format!("{}: {}", path.display(), e.message);
        e
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::ResourceLimit(_) => EXIT_RESOURCE,
            Error::Internal(_) => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        };
        CliError { code, message: err.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::usage(err.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn read_function(path: &Path) -> CliResult<TritFunction> {
    TritFunction::parse_file(&read(path)?).map_err(|e| CliError::in_file(path, e))
}

fn read_program(path: &Path) -> CliResult<NmqcProgram> {
    NmqcProgram::parse_file(&read(path)?).map_err(|e| CliError::in_file(path, e))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn opt_path(v: &Option<PathBuf>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

impl Cli {
    fn name(&self) -> &'static str {
        match self.command {
            Command::Synthesize(_) => "synthesize",
            Command::Family(_) => "family",
            Command::Bell(_) => "bell",
            Command::Simulate(_) => "simulate",
            Command::Minimal(_) => "minimal",
            Command::Tables => "tables",
        }
    }

    fn flags(&self) -> Vec<(&'static str, String)> {
        let mut flags = match &self.command {
            Command::Synthesize(a) => vec![
                ("function", a.function.display().to_string()),
                ("output", opt_path(&a.output)),
            ],
            Command::Family(a) => vec![("n", a.n.to_string()), ("out-dir", opt_path(&a.out_dir))],
            Command::Bell(a) => vec![
                ("function", a.function.display().to_string()),
                ("program", a.program.display().to_string()),
                ("weights", a.weights.as_ref().map_or_else(|| "uniform".into(), |p| p.display().to_string())),
                ("max-width", a.max_width.to_string()),
                ("fix-offsets", a.fix_offsets.to_string()),
            ],
            Command::Simulate(a) => vec![
                ("program", a.program.display().to_string()),
                ("input", a.input.clone()),
                ("shots", a.shots.to_string()),
                ("seed", a.seed.to_string()),
                ("trace", a.trace.to_string()),
                ("max-width", a.max_width.to_string()),
            ],
            Command::Minimal(a) => vec![
                ("function", a.function.display().to_string()),
                ("max-n", a.max_n.to_string()),
                ("c", opt(&a.c)),
            ],
            Command::Tables => Vec::new(),
        };
        flags.push(("threads", opt(&self.threads)));
        flags
    }

    /// `#` lines naming the version, subcommand, every flag and the seed.
    pub fn header(&self) -> String {
        let mut out = format!("# nmqc3 {}\n# command: {}\n", env!("CARGO_PKG_VERSION"), self.name());
        let flags: Vec<String> = self.flags().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "# flags: {}", flags.join(" "));
        if let Command::Simulate(a) = &self.command {
            let _ = writeln!(out, "# seed: {} (ChaCha8, stream = shot index)", a.seed);
        }
        out
    }
}

/// Runs one invocation, writing its report to `out`. Returns the exit code
/// of a completed run (0, or 1 when a check failed).
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<u8> {
    out.write_all(cli.header().as_bytes())?;
    match &cli.command {
        Command::Synthesize(a) => cmd_synthesize(a, out),
        Command::Family(a) => cmd_family(a, out),
        Command::Bell(a) => cmd_bell(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Minimal(a) => cmd_minimal(a, out),
        Command::Tables => cmd_tables(out),
    }
}

fn status(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    }
}

fn cmd_synthesize(a: &SynthesizeArgs, out: &mut dyn Write) -> CliResult<u8> {
    let f = read_function(&a.function)?;
    let report = synthesize_with_report(&f)?;
    let program = &report.program;
    let check = program.verify(&f)?;
    match &a.output {
        Some(path) => write_file(path, &program.to_file_string())?,
        None => out.write_all(program.to_file_string().as_bytes())?,
    }
    if let Some(x) = &check.counterexample {
        writeln!(out, "counterexample x={x}")?;
    }
    writeln!(
        out,
        "width={} c={} verified={}",
        program.width(),
        program.post_trit(),
        check.passed()
    )?;
    Ok(status(check.passed()))
}

/// Column-aligned evaluation table of fₙ.
pub fn render_family_table(n: usize, rows: &[FamilyRow]) -> String {
    let parity = (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join("⊕");
    let header = [
        "x".to_string(),
        format!("f{n}(x)"),
        parity,
        "α^{Σx+2·⊕x}".to_string(),
    ];
    let body: Vec<[String; 4]> = rows
        .iter()
        .map(|r| [r.input.to_string(), r.value.to_string(), r.parity.to_string(), r.cell()])
        .collect();
    let widths: Vec<usize> = (0..4)
        .map(|c| {
            body.iter()
                .map(|row| row[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("{}\n", padded.join(" | ").trim_end())
    };
    let mut out = line(&header);
    for row in &body {
        out.push_str(&line(row));
    }
    out
}

fn cmd_family(a: &FamilyArgs, out: &mut dyn Write) -> CliResult<u8> {
    if a.n < 2 {
        return Err(CliError::usage(format!("the fₙ family starts at n = 2, got {}", a.n)));
    }
    if a.n > MAX_FAMILY_N {
        return Err(CliError {
            code: EXIT_RESOURCE,
            message: format!("n = {} exceeds the limit {MAX_FAMILY_N}", a.n),
        });
    }
    let (f, program) = family_fn(a.n)?;
    let check = program.verify(&f)?;
    match &a.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
            write_file(&dir.join(format!("f{}.fn", a.n)), &f.to_file_string())?;
            write_file(&dir.join(format!("f{}.prog", a.n)), &program.to_file_string())?;
        }
        None => out.write_all(program.to_file_string().as_bytes())?,
    }
    if a.n <= 3 {
        out.write_all(render_family_table(a.n, &family_table(a.n)?).as_bytes())?;
    }
    writeln!(out, "{}→{} qutrits verified={}", a.n, program.width(), check.passed())?;
    Ok(status(check.passed()))
}

fn cmd_bell(a: &BellArgs, out: &mut dyn Write) -> CliResult<u8> {
    let f = read_function(&a.function)?;
    let program = read_program(&a.program)?;
    let game = match &a.weights {
        Some(path) => {
            let w = parse_weights(&read(path)?, f.arity()).map_err(|e| CliError::in_file(path, e))?;
            BellGame::new(f, program, w)?
        }
        None => BellGame::uniform(f, program)?,
    };
    let search = LhvSearch { max_width: a.max_width, fix_offsets: a.fix_offsets, threads: None };
    let report = inequality_report_with(&game, &search)?;
    out.write_all(report.to_text().as_bytes())?;
    out.write_all(report.to_machine().as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<u8> {
    let program = read_program(&a.program)?;
    let x: TritVector = a
        .input
        .parse()
        .map_err(|e: Error| CliError::usage(format!("--input: {e}")))?;
    if x.len() != program.arity() {
        return Err(CliError::usage(format!(
            "--input has {} trits, the program takes {}",
            x.len(),
            program.arity()
        )));
    }
    let samples = sample_with_limit(&program, &x, a.shots, a.seed, a.max_width)?;
    if a.trace {
        for shot in 0..samples.shots() as usize {
            let rec = samples.record(shot);
            let z: Trit = rec.iter().copied().sum();
            let ms: Vec<String> = rec.iter().map(Trit::to_string).collect();
            writeln!(out, "trace {} {z}", ms.join(" "))?;
        }
    }
    for (z, count) in samples.counts.iter().enumerate() {
        writeln!(out, "{z} {count}")?;
    }

    let outcome = program.run_deterministic(&x)?;
    let exact = outcome.distribution();
    let shown: Vec<String> = exact.iter().map(|&p| format_float(p)).collect();
    writeln!(out, "exact {}", shown.join(" "))?;
    match outcome {
        ProgramOutcome::Deterministic(z) => {
            writeln!(out, "deterministic z={z} f(x)={}", z - program.post_trit())?
        }
        ProgramOutcome::Random(_) => writeln!(out, "random")?,
    }
    let test = chi_square(&samples.counts, &exact);
    let agree = test.p_value > AGREEMENT_ALPHA;
    writeln!(
        out,
        "agreement chi2={} dof={} p={} pass={agree}",
        format_float(test.statistic),
        test.dof,
        format_float(test.p_value)
    )?;
    Ok(status(agree))
}

fn cmd_minimal(a: &MinimalArgs, out: &mut dyn Write) -> CliResult<u8> {
    let f = read_function(&a.function)?;
    let n = f.arity();
    let limit = a.max_n.min(MAX_MINIMAL_ARITY);
    if n > limit {
        return Err(CliError {
            code: EXIT_RESOURCE,
            message: format!("arity {n} exceeds the subset search limit {limit}"),
        });
    }
    let cs: Vec<Trit> = match a.c {
        Some(c) => vec![Trit::new(c).ok_or_else(|| CliError::usage(format!("-c must be 0, 1 or 2, got {c}")))?],
        None => Trit::ALL.to_vec(),
    };
    let mut best: Option<(Trit, nmqc_core::synthesis::MinimalSupport)> = None;
    for c in cs {
        match minimal_support(&f, c)? {
            Some(m) => {
                writeln!(out, "c={c} k={} subsets={}", m.size, m.subsets_tested)?;
                if best.as_ref().is_none_or(|(_, b)| m.size < b.size) {
                    best = Some((c, m));
                }
            }
            None => writeln!(out, "c={c} k=none")?,
        }
    }
    let floor = delta_width_floor(n)?;
    match best {
        Some((c, m)) => {
            let rows: Vec<String> = m
                .program
                .rows()
                .iter()
                .zip(m.program.angles())
                .map(|(r, phi)| format!("{r}:{}", fmt_rational(phi)))
                .collect();
            writeln!(out, "best c={c} k={} rows={}", m.size, rows.join(" "))?;
            writeln!(out, "floor={floor} achieved={}", m.size)?;
        }
        None => writeln!(out, "floor={floor} achieved=none")?,
    }
    Ok(EXIT_OK)
}

fn cmd_tables(out: &mut dyn Write) -> CliResult<u8> {
    for n in [2, 3] {
        writeln!(out, "f{n}")?;
        out.write_all(render_family_table(n, &family_table(n)?).as_bytes())?;
        if n == 2 {
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}
