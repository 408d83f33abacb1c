//! Command-line front end.
//!
//! Every subcommand writes a single table (CSV or JSON) or, for `smatrix`, a
//! JSON document. Output depends only on the arguments, never on the number
//! of worker threads.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::ensemble::{run_ensemble, sample_word, EnsembleSpec};
use crate::entropy::{average_scattering_entropy, entropy_curve, period, QuadratureConfig};
use crate::families::{fibonacci_word, FamilyError, FamilyKind, Letter, Word};
use crate::graph::{BoundaryKind, GraphFile, MetricGraph};
use crate::oracle::{bond_scattering_matrix, max_deviation};
use crate::scattering::Scatterer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "QGASE_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("unknown flag: {0}")]
    UnknownFlag(String),
    #[error("missing required argument: {0}")]
    MissingRequired(String),
    #[error("conflicting flags: {0}")]
    ConflictingFlags(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    /// `--help` or `--version`; the payload is the rendered text.
    #[error("{0}")]
    Help(String),
}

#[derive(Debug, Parser)]
#[command(name = "qgase", version, about = "Average scattering entropy of open quantum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LetterArg {
    A,
    B,
}

impl From<LetterArg> for Letter {
    fn from(l: LetterArg) -> Self {
        match l {
            LetterArg::A => Letter::Alpha,
            LetterArg::B => Letter::Beta,
        }
    }
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse().map_err(|e: FamilyError| e.to_string())
}

fn parse_word(s: &str) -> Result<Word, String> {
    s.parse().map_err(|e: FamilyError| e.to_string())
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, PartialEq)]
pub struct Common {
    /// Entrance channel.
    #[arg(long, default_value_t = 0)]
    pub entrance: usize,
    /// Quadrature tolerance on the averaged entropy.
    #[arg(long = "tol", default_value_t = 1e-7, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Common {
    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig::with_tolerance(self.tol)
    }
}

/// Selects one graph: a family plus a word or size, or a JSON graph file.
#[derive(Debug, Clone, Args, PartialEq)]
pub struct GraphSelect {
    #[arg(long, value_parser = parse_family, required_unless_present = "graph_file", conflicts_with = "graph_file")]
    pub family: Option<FamilyKind>,
    /// Word over {a, b}, for line, circle and circle2.
    #[arg(long, value_parser = parse_word, conflicts_with = "n")]
    pub word: Option<Word>,
    /// Uniform word length (with --letter) or unit count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub letter: Option<LetterArg>,
    #[arg(long = "graph-file")]
    pub graph_file: Option<PathBuf>,
    /// Switch every dead end to a Dirichlet condition.
    #[arg(long)]
    pub dirichlet: bool,
}

#[derive(Debug, Clone, Subcommand, PartialEq)]
pub enum Command {
    /// Average scattering entropy of one graph.
    Ase {
        #[command(flatten)]
        graph: GraphSelect,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy and channel probabilities on a uniform k grid.
    Curve {
        #[command(flatten)]
        graph: GraphSelect,
        #[arg(long = "k-min", default_value_t = 0.0, allow_negative_numbers = true)]
        k_min: f64,
        /// Defaults to one period.
        #[arg(long = "k-max", allow_negative_numbers = true)]
        k_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Also evaluate the bond scattering matrix and report the deviation.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// ASE for sizes n_min..=n_max of one family.
    Sweep {
        #[arg(long, value_parser = parse_family)]
        family: FamilyKind,
        #[arg(long = "n-min", default_value_t = 1)]
        n_min: usize,
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long, value_enum)]
        letter: Option<LetterArg>,
        #[command(flatten)]
        common: Common,
    },
    /// ASE of Fibonacci words, generation 1..=max.
    Fibonacci {
        #[arg(long, value_parser = parse_family)]
        family: FamilyKind,
        #[arg(long = "max-generation")]
        max_generation: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Mean and standard deviation of the ASE over random words.
    Ensemble {
        #[arg(long, value_parser = parse_family)]
        family: FamilyKind,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-sample values to this CSV file.
        #[arg(long = "dump-values")]
        dump_values: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Scattering matrix at one wave number, as JSON.
    Smatrix {
        #[command(flatten)]
        graph: GraphSelect,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Ase { common, .. }
            | Command::Curve { common, .. }
            | Command::Sweep { common, .. }
            | Command::Fibonacci { common, .. }
            | Command::Ensemble { common, .. }
            | Command::Smatrix { common, .. } => common,
        }
    }
}

/// Parses `argv` (including the program name) and validates option
/// combinations that clap cannot express.
pub fn parse_invocation<I, T>(argv: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let text = e.to_string();
        let detail = text.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
        match e.kind() {
            ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => CliError::UnknownFlag(detail),
            ErrorKind::MissingRequiredArgument | ErrorKind::MissingSubcommand => CliError::MissingRequired(detail),
            ErrorKind::ArgumentConflict => CliError::ConflictingFlags(detail),
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Help(text),
            _ => CliError::Invalid(detail),
        }
    })?;
    validate(&cli.command)?;
    Ok(cli.command)
}

fn validate(cmd: &Command) -> Result<(), CliError> {
    let common = cmd.common();
    if !(common.tol.is_finite() && common.tol > 0.0) {
        return Err(CliError::Invalid(format!("--tol must be positive, got {}", common.tol)));
    }
    match cmd {
        Command::Ase { graph, .. } | Command::Smatrix { graph, .. } => validate_select(graph),
        Command::Curve { graph, points, k_min, k_max, .. } => {
            validate_select(graph)?;
            if *points == 0 {
                return Err(CliError::Invalid("--points must be at least 1".into()));
            }
            if !k_min.is_finite() || k_max.is_some_and(|k| !k.is_finite()) {
                return Err(CliError::Invalid("grid bounds must be finite".into()));
            }
            Ok(())
        }
        Command::Sweep { family, n_min, n_max, letter, .. } => {
            if n_min > n_max || *n_min == 0 {
                return Err(CliError::Invalid(format!("need 1 <= --n-min <= --n-max, got {n_min}..{n_max}")));
            }
            match (family.takes_word(), letter) {
                (true, None) => Err(CliError::MissingRequired(format!("--letter for family {family}"))),
                (false, Some(_)) => Err(CliError::ConflictingFlags(format!("--letter with family {family}"))),
                _ => Ok(()),
            }
        }
        Command::Fibonacci { family, max_generation, .. } => {
            if !family.takes_word() {
                return Err(CliError::Invalid(format!("family {family} is not built from words")));
            }
            if *max_generation == 0 {
                return Err(CliError::Invalid("--max-generation must be at least 1".into()));
            }
            Ok(())
        }
        Command::Ensemble { family, samples, .. } => {
            if !family.takes_word() {
                return Err(CliError::Invalid(format!("family {family} is not built from words")));
            }
            if *samples < 2 {
                return Err(CliError::Invalid("--samples must be at least 2".into()));
            }
            Ok(())
        }
    }
}

fn validate_select(sel: &GraphSelect) -> Result<(), CliError> {
    let Some(family) = sel.family else {
        if sel.word.is_some() || sel.n.is_some() || sel.letter.is_some() {
            return Err(CliError::ConflictingFlags("--graph-file with --word/--n/--letter".into()));
        }
        return Ok(());
    };
    if family.takes_word() {
        match (&sel.word, sel.n, sel.letter) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => Ok(()),
            (Some(_), _, Some(_)) => Err(CliError::ConflictingFlags("--word and --letter".into())),
            (None, Some(_), None) => Err(CliError::MissingRequired("--letter (with --n)".into())),
            (None, None, _) => Err(CliError::MissingRequired(format!("--word or --n for family {family}"))),
            (Some(_), Some(_), _) => Err(CliError::ConflictingFlags("--word and --n".into())),
        }
    } else {
        match (&sel.word, sel.n, sel.letter) {
            (None, Some(_), None) => Ok(()),
            (None, None, _) => Err(CliError::MissingRequired(format!("--n for family {family}"))),
            _ => Err(CliError::ConflictingFlags(format!("--word/--letter with family {family}"))),
        }
    }
}

/// Builds the graph named by a validated selection, with a short label.
pub fn select_graph(sel: &GraphSelect) -> Result<(String, MetricGraph), crate::Error> {
    let (label, g) = match (sel.family, &sel.graph_file) {
        (Some(family), _) => {
            let spec = if family.takes_word() {
                let word = match (&sel.word, sel.n, sel.letter) {
                    (Some(w), _, _) => w.clone(),
                    (None, Some(n), Some(l)) => Word::uniform(l.into(), n)?,
                    _ => return Err(FamilyError::EmptyWord.into()),
                };
                family.with_word(word)
            } else {
                family.with_count(sel.n.unwrap_or(0))
            }
            .expect("family matches its parameter");
            let label = match &spec {
                s if family.takes_word() => format!("{family}:{}", word_of(s)),
                s => format!("{family}:{}", s.size()),
            };
            (label, spec.build()?)
        }
        (None, Some(path)) => (format!("file:{}", path.display()), GraphFile::read(path)?.into_graph()?),
        (None, None) => unreachable!("validated selection"),
    };
    let g = if sel.dirichlet { g.with_dead_ends(BoundaryKind::Dirichlet) } else { g };
    Ok((label, g))
}

fn word_of(spec: &crate::families::FamilySpec) -> String {
    use crate::families::FamilySpec as S;
    match spec {
        S::Line(w) | S::Circle(w) | S::Circle2(w) => w.to_string(),
        other => other.size().to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Num(v) => format_sig(*v, 12),
                    Cell::Text(s) => csv_escape(s),
                })
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, c)| {
                        let v = match c {
                            Cell::Int(v) => serde_json::Value::from(*v),
                            Cell::Num(v) => serde_json::Value::from(*v),
                            Cell::Text(s) => serde_json::Value::from(s.as_str()),
                        };
                        (name.clone(), v)
                    })
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `%.{digits}g`-style formatting: `digits` significant digits, trailing
/// zeros removed, scientific notation outside `1e-5 <= |x| < 10^digits`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect()
}

/// Executes a parsed command, writing its primary output to `out`.
pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), crate::Error> {
    let common = cmd.common();
    let config = common.quadrature();
    match cmd {
        Command::Ase { graph, .. } => {
            let (label, g) = select_graph(graph)?;
            let r = average_scattering_entropy(&g, common.entrance, &config)?;
            let mut t = Table::new(["graph", "entrance", "ase", "error_estimate", "panels", "singular_retries"]);
            t.push(vec![
                label.into(),
                r.entrance.into(),
                r.value.into(),
                r.error_estimate.into(),
                r.panels.into(),
                r.singular_retries.into(),
            ]);
            t.write(common.format, out)?;
        }
        Command::Curve { graph, k_min, k_max, points, oracle, .. } => {
            let (_, g) = select_graph(graph)?;
            let k_max = match k_max {
                Some(k) => *k,
                None => period(&g)?,
            };
            let grid = linspace(*k_min, k_max, *points);
            let curve = entropy_curve(&g, common.entrance, &grid)?;
            let mut columns = vec!["k".to_string(), "H".to_string()];
            columns.extend((0..g.num_leads()).map(|j| format!("p_{j}")));
            let mut t = Table::new(columns);
            for p in &curve {
                let mut row: Vec<Cell> = vec![p.k.into(), p.entropy.into()];
                row.extend(p.probabilities.entries.iter().map(|&x| Cell::Num(x)));
                t.push(row);
            }
            t.write(common.format, out)?;
            if *oracle {
                let s = Scatterer::new(&g);
                let mut worst: f64 = 0.0;
                for &k in &grid {
                    let eval = s.matrix_jittered(k)?;
                    worst = worst.max(max_deviation(&eval.matrix, &bond_scattering_matrix(&g, eval.matrix.k)?));
                }
                writeln!(err, "oracle max deviation: {}", format_sig(worst, 6))?;
            }
        }
        Command::Sweep { family, n_min, n_max, letter, .. } => {
            let mut t = Table::new(["n", "ase"]);
            for n in *n_min..=*n_max {
                let spec = match letter {
                    Some(l) => family.with_word(Word::uniform((*l).into(), n)?),
                    None => family.with_count(n),
                }
                .expect("validated family");
                let r = average_scattering_entropy(&spec.build()?, common.entrance, &config)?;
                t.push(vec![n.into(), r.value.into()]);
            }
            t.write(common.format, out)?;
        }
        Command::Fibonacci { family, max_generation, .. } => {
            let mut t = Table::new(["generation", "length", "ase"]);
            for m in 1..=*max_generation {
                let word = fibonacci_word(m);
                let len = word.len();
                let spec = family.with_word(word).expect("validated family");
                let ase: Cell = match spec.build() {
                    Ok(g) => average_scattering_entropy(&g, common.entrance, &config)?.value.into(),
                    Err(FamilyError::WordTooShort(_)) => "skip".into(),
                    Err(e) => return Err(e.into()),
                };
                t.push(vec![m.into(), len.into(), ase]);
            }
            t.write(common.format, out)?;
        }
        Command::Ensemble { family, sizes, samples, seed, dump_values, .. } => {
            let spec = EnsembleSpec { family: *family, sizes: sizes.clone(), samples: *samples, seed: *seed, quadrature: config };
            let stats = run_ensemble(&spec)?;
            let mut t = Table::new(["family", "size", "samples", "seed", "mean", "std_dev"]);
            let mut values = Table::new(["family", "size", "sample", "word", "ase"]);
            for s in &stats {
                t.push(vec![family.name().into(), s.size.into(), (*samples).into(), (*seed).into(), s.mean.into(), s.std_dev.into()]);
                for (i, v) in s.values.iter().enumerate() {
                    let word = sample_word(*seed, s.size, i)?.to_string();
                    values.push(vec![family.name().into(), s.size.into(), i.into(), word.into(), (*v).into()]);
                }
            }
            t.write(common.format, out)?;
            if let Some(path) = dump_values {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                values.write_csv(&mut f)?;
                f.flush()?;
            }
        }
        Command::Smatrix { graph, k, oracle, .. } => {
            let (_, g) = select_graph(graph)?;
            let s = Scatterer::new(&g).matrix_jittered(*k)?.matrix;
            let mut json = s.to_json();
            if *oracle {
                json.oracle_max_deviation = Some(max_deviation(&s, &bond_scattering_matrix(&g, s.k)?));
            }
            serde_json::to_writer_pretty(&mut *out, &json).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Full program: parse, run, report. Returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = match parse_invocation(argv) {
        Ok(cmd) => cmd,
        Err(CliError::Help(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let run = || -> Result<(), crate::Error> {
        let mut buf = Vec::new();
        execute(&cmd, &mut buf, &mut std::io::stderr())?;
        match &cmd.common().output {
            Some(path) => std::fs::write(path, &buf)?,
            None => std::io::stdout().write_all(&buf)?,
        }
        Ok(())
    };
    let result = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot start {n} workers: {e}");
                return EXIT_USAGE;
            }
        },
        None => run(),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Command, CliError> {
        parse_invocation(std::iter::once("qgase").chain(s.split_whitespace()))
    }

    #[test]
    fn parses_word_and_uniform_forms() {
        let Command::Ase { graph, common } = parse("ase --family line --word a").unwrap() else { panic!() };
        assert_eq!(graph.word.unwrap().to_string(), "a");
        assert_eq!(common.entrance, 0);
        assert_eq!(common.tol, 1e-7);
        let Command::Ase { graph, .. } = parse("ase --family line --n 4 --letter a").unwrap() else { panic!() };
        let (label, g) = select_graph(&graph).unwrap();
        assert_eq!(label, "line:aaaa");
        assert_eq!(g.num_vertices(), 8);
    }

    #[test]
    fn flag_errors() {
        assert!(matches!(parse("ase --family line --word ab --n 4"), Err(CliError::ConflictingFlags(_))));
        assert!(matches!(parse("ase --family line --bogus 1"), Err(CliError::UnknownFlag(_))));
        assert!(matches!(parse("ase --family line --n 4"), Err(CliError::MissingRequired(_))));
        assert!(matches!(parse("ase"), Err(CliError::MissingRequired(_))));
        assert!(matches!(parse("ase --family gamma --word ab"), Err(CliError::ConflictingFlags(_))));
        assert!(matches!(parse("sweep --family line --n-max 3"), Err(CliError::MissingRequired(_))));
        assert!(matches!(parse("sweep --family line --n-min 4 --n-max 3 --letter a"), Err(CliError::Invalid(_))));
        assert!(matches!(parse("ase --family hexagon --n 3"), Err(CliError::Invalid(_))));
        assert!(matches!(parse("ase --family line --word a --tol -1"), Err(CliError::Invalid(_))));
        assert!(matches!(parse("--help"), Err(CliError::Help(_))));
    }

    #[test]
    fn too_short_ring_is_a_usage_error() {
        assert_eq!(main_with(["qgase", "ase", "--family", "circle", "--n", "2", "--letter", "a"]), EXIT_USAGE);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.503258334775, 12), "0.503258334775");
        assert_eq!(format_sig(0.5032583347754047, 12), "0.503258334775");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(std::f64::consts::TAU, 12), "6.28318530718");
        assert_eq!(format_sig(1.5e-9, 12), "1.5e-09");
        assert_eq!(format_sig(-2.5e13, 12), "-2.5e+13");
        assert_eq!(format_sig(123456.0, 12), "123456");
        assert_eq!(format_sig(0.0, 12), "0");
    }

    #[test]
    fn table_formats() {
        let mut t = Table::new(["n", "ase"]);
        t.push(vec![1usize.into(), 0.5.into()]);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "n,ase\n1,0.5\n");
        assert_eq!(t.to_json(), serde_json::json!([{"n": 1, "ase": 0.5}]));
    }
}
