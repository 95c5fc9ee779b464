//! The `pillow` command-line tool.
//!
//! Exit codes: 0 pass, 1 invariant failure, 2 non-convergence, 64 usage,
//! 65 malformed input, 70 internal inconsistency, 74 I/O.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{io as graph_io, CentralEdgePolicy, ReplacementGraph, Side};
use crate::measure::{
    ball_dimension_estimate, box_dimension_estimate, middle_third_ratios, pushforward_x, tile_doubling_check,
    BallCensus, DimensionEstimate, TileMeasure,
};
use crate::metric::{
    ambient_block_metric, blowup_metric, comparability, cover_preimage, graph_metric, internal_block_metric,
    lipschitz_quotient_check, pi_diagnostic, pi_diagnostic_for, qs_distortion, read_plm, symmetrize, write_plm,
    DistortionBin, GridBall, MetricMatrix, Normalization, PiReport, SymmetrizeMode, TestFunction,
};
use crate::modulus::{conformal_scan, scan_graphs, ModulusProblem, ScanConfig, ScanTable};
use crate::report::{digest_bytes, digest_file, Provenance};
use crate::rule::{cells_per_axis, Alphabet, GroupElement, Word};
use crate::verify::{parse_levels, run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "pillow", version, about = "Finite-level experiments on the pillow space")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build G_n and optionally write it to a file.
    Build(BuildArgs),
    /// Run a named invariant suite.
    Verify(VerifyArgs),
    /// Certified modulus scan of side-to-side crossings.
    Modulus(ModulusArgs),
    #[command(subcommand)]
    Measure(MeasureCommand),
    #[command(subcommand)]
    Metric(MetricCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    On,
    Off,
}

impl From<PolicyArg> for CentralEdgePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::On => CentralEdgePolicy::On,
            PolicyArg::Off => CentralEdgePolicy::Off,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlphabetArg {
    Pillow,
    Grid,
}

impl From<AlphabetArg> for Alphabet {
    fn from(a: AlphabetArg) -> Self {
        match a {
            AlphabetArg::Pillow => Alphabet::Pillow,
            AlphabetArg::Grid => Alphabet::Grid,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
    level: u32,
    #[arg(long, value_enum, default_value = "on")]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value = "pillow")]
    alphabet: AlphabetArg,
}

impl GraphArgs {
    fn build(&self) -> Result<ReplacementGraph> {
        ReplacementGraph::build_with(self.level, self.alphabet.into(), self.policy.into())
    }

    fn config(&self) -> Value {
        json!({
            "level": self.level,
            "policy": CentralEdgePolicy::from(self.policy).name(),
            "alphabet": Alphabet::from(self.alphabet).name(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GraphFormatArg {
    Json,
    Binary,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    graph_format: GraphFormatArg,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    parse_levels(s).map(|r| (*r.start(), *r.end())).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of counts, adjacency-oracle, sheets, automorphisms, self-similar,
    /// singular-measure, quotient, covering, modulus-oracles.
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    /// Inclusive level range `a..b`.
    #[arg(long, value_parser = parse_range)]
    levels: Option<(u32, u32)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModulusArgs {
    /// Graph files to scan; `--levels` builds them instead.
    #[arg(long = "graph", conflicts_with = "levels")]
    graphs: Vec<PathBuf>,
    #[arg(long, value_parser = parse_range)]
    levels: Option<(u32, u32)>,
    #[arg(long, value_enum, default_value = "on")]
    policy: PolicyArg,
    #[arg(long, value_parser = parse_side, default_value = "left")]
    from: Side,
    #[arg(long, value_parser = parse_side, default_value = "right")]
    to: Side,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.0959,2.5,3")]
    p_grid: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Solver rounds per cell before giving up.
    #[arg(long, default_value_t = ModulusProblem::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    /// Also write the critical-exponent table here.
    #[arg(long)]
    critical_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    /// Interval weights of the x-pushforward.
    Pushforward(MeasureArgs),
    /// Middle-third shares of every triadic interval.
    Ratios(MeasureArgs),
    /// Tile-count or ball-count dimension regression.
    Dimension(DimensionArgs),
    /// Tile doubling constant.
    Doubling(MeasureArgs),
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=6))]
    level: u32,
    /// `uniform`, `grid`, `sheet:<bits>` or `dirac:<word>`.
    #[arg(long, default_value = "uniform")]
    measure: String,
    #[command(flatten)]
    output: Output,
}

impl MeasureArgs {
    fn measure(&self) -> Result<TileMeasure> {
        let spec = self.measure.as_str();
        match spec.split_once(':') {
            None if spec == "uniform" => TileMeasure::uniform(Alphabet::Pillow, self.level),
            None if spec == "grid" => TileMeasure::uniform(Alphabet::Grid, self.level),
            Some(("sheet", bits)) => {
                let g: GroupElement = bits.parse()?;
                if g.len() != self.level as usize {
                    return Err(Error::domain(format!("sheet {g} does not have length {}", self.level)));
                }
                TileMeasure::sheet(self.level, &g)
            }
            Some(("dirac", w)) => {
                let w: Word = w.parse()?;
                if w.len() != self.level as usize {
                    return Err(Error::domain(format!("dirac word {w} does not have length {}", self.level)));
                }
                TileMeasure::dirac(Alphabet::Pillow, &w)
            }
            _ => Err(Error::domain(format!(
                "measure {spec:?} is not uniform, grid, sheet:<bits> or dirac:<word>"
            ))),
        }
    }

    fn config(&self) -> Value {
        json!({ "level": self.level, "measure": self.measure })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DimensionVariant {
    Tiles,
    Balls,
}

#[derive(Args, Debug)]
struct DimensionArgs {
    #[arg(long, value_enum, default_value = "tiles")]
    variant: DimensionVariant,
    /// Levels of the tile-count regression.
    #[arg(long, value_parser = parse_range, default_value = "1..5")]
    levels: (u32, u32),
    /// Graph level of the ball-count regression.
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=5))]
    level: Option<u32>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand, Debug)]
enum MetricCommand {
    /// All-pairs graph distances as a PLM1 table.
    Distances(DistancesArgs),
    /// Flip-average of a metric table.
    Symmetrize(SymmetrizeArgs),
    /// Rescaled restriction of a metric to a prefix block.
    Blowup(BlowupArgs),
    /// Empirical quasisymmetry profile of one table against another.
    Distortion(DistortionArgs),
    /// Projected balls against grid balls.
    QuotientCheck(QuotientArgs),
    /// Discrete covering of ball preimages.
    CoverCheck(CoverArgs),
    /// Empirical Poincaré ratios.
    PiDiagnostic(PiArgs),
}

#[derive(Args, Debug)]
struct DistancesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Args, Debug)]
struct SymmetrizeArgs {
    /// PLM1 table; the graph metric of `--level` when absent.
    #[arg(long, conflicts_with = "level")]
    input: Option<PathBuf>,
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=4))]
    level: Option<u32>,
    #[arg(long, value_enum, default_value = "on")]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BlockMode {
    Internal,
    Ambient,
}

#[derive(Args, Debug)]
struct BlowupArgs {
    /// PLM1 table; the graph metric of `--level-from` when absent.
    #[arg(long, conflicts_with = "level_from")]
    input: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
    level_from: Option<u32>,
    #[arg(long, value_enum, default_value = "on")]
    policy: PolicyArg,
    #[arg(long)]
    prefix: String,
    /// Distances inside the block only, or ambient distances.
    #[arg(long, value_enum, default_value = "internal")]
    mode: BlockMode,
    /// `none`, `diameter`, `factor:<x>` or `pair:<a>,<b>`.
    #[arg(long, default_value = "none")]
    normalize: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DistortionArgs {
    #[arg(long)]
    d1: PathBuf,
    #[arg(long)]
    d2: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct QuotientArgs {
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=4))]
    level: u32,
    #[arg(long, value_enum, default_value = "on")]
    policy: PolicyArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_cell(s: &str) -> std::result::Result<(u32, u32), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("{s:?} is not x,y"))?;
    Ok((
        x.trim().parse().map_err(|_| format!("{x:?} is not a cell index"))?,
        y.trim().parse().map_err(|_| format!("{y:?} is not a cell index"))?,
    ))
}

#[derive(Args, Debug)]
struct CoverArgs {
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u32).range(1..=4))]
    level: u32,
    /// Grid cell `x,y` of a single ball.
    #[arg(long, value_parser = parse_cell, requires = "radius")]
    center: Option<(u32, u32)>,
    #[arg(long)]
    radius: Option<u32>,
    /// Number of random balls when no center is given.
    #[arg(long, default_value_t = 40)]
    balls: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "constant", default_value_t = 5)]
    c: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    Random,
    Constant,
    X,
    Y,
}

#[derive(Args, Debug)]
struct PiArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    function: FunctionArg,
    #[command(flatten)]
    output: Output,
}

/// Outcome of a command that did not fail outright.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Failed,
    NotConverged,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => EXIT_OK,
            Status::Failed => EXIT_FAILURE,
            Status::NotConverged => EXIT_NOT_CONVERGED,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Domain(_) | Error::Capacity { .. } => EXIT_USAGE,
        Error::Format(_) => EXIT_DATA,
        Error::Consistency(_) => EXIT_SOFTWARE,
        Error::Io { .. } => EXIT_IO,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let code = match execute(cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("pillow: {e}");
            exit_code(&e)
        }
    };
    eprintln!("pillow: wall-clock {:.3} s", start.elapsed().as_secs_f64());
    code
}

pub fn execute(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Modulus(a) => cmd_modulus(a),
        Command::Measure(m) => match m {
            MeasureCommand::Pushforward(a) => cmd_pushforward(a),
            MeasureCommand::Ratios(a) => cmd_ratios(a),
            MeasureCommand::Dimension(a) => cmd_dimension(a),
            MeasureCommand::Doubling(a) => cmd_doubling(a),
        },
        Command::Metric(m) => match m {
            MetricCommand::Distances(a) => cmd_distances(a),
            MetricCommand::Symmetrize(a) => cmd_symmetrize(a),
            MetricCommand::Blowup(a) => cmd_blowup(a),
            MetricCommand::Distortion(a) => cmd_distortion(a),
            MetricCommand::QuotientCheck(a) => cmd_quotient(a),
            MetricCommand::CoverCheck(a) => cmd_cover(a),
            MetricCommand::PiDiagnostic(a) => cmd_pi(a),
        },
    }
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::domain(format!("{what} is stochastic and needs --seed")))
}

/// Rows of a CSV table, with the column names first.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join(","))?;
        }
        Ok(())
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Writes a table as CSV (with `# ` metadata lines) or the JSON envelope.
fn emit(prov: &Provenance, output: &Output, default: Format, table: &Table, result: &Value, notes: &[String]) -> Result<()> {
    let mut buf = Vec::new();
    match output.format.unwrap_or(default) {
        Format::Csv => {
            prov.csv_header(&mut buf).expect("writing to memory");
            for n in notes {
                writeln!(buf, "# {n}").expect("writing to memory");
            }
            table.write(&mut buf).expect("writing to memory");
        }
        Format::Json => prov.write_json(result, &mut buf)?,
    }
    write_to(output.out.as_deref(), &buf)
}

fn emit_json(prov: &Provenance, out: Option<&Path>, result: &Value) -> Result<()> {
    let mut buf = Vec::new();
    prov.write_json(result, &mut buf)?;
    write_to(out, &buf)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes a PLM1 table and its provenance next to it as `<path>.json`.
fn emit_plm(prov: Provenance, path: &Path, d: &MetricMatrix) -> Result<()> {
    let mut buf = Vec::new();
    write_plm(d, &mut buf)?;
    std::fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
    let u = d.universe();
    let result = json!({
        "file": path.display().to_string(),
        "sha256": digest_bytes("", &buf).sha256,
        "points": d.len(),
        "level": u.level,
        "alphabet": u.alphabet.name(),
        "prefix": u.prefix.to_string(),
        "diameter": d.diameter(),
    });
    emit_json(&prov, Some(&sidecar(path)), &result)
}

fn load_plm(path: &Path) -> Result<(MetricMatrix, crate::report::InputDigest)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let d = read_plm(bytes.as_slice())?;
    Ok((d, digest_bytes(&path.display().to_string(), &bytes)))
}

fn cmd_build(a: BuildArgs) -> Result<Status> {
    let g = a.graph.build()?;
    println!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
    if let Some(path) = &a.out {
        let format = match a.graph_format {
            GraphFormatArg::Json => graph_io::GraphFormat::Json,
            GraphFormatArg::Binary => graph_io::GraphFormat::Binary,
        };
        let mut config = a.graph.config();
        config["tool"] = json!(crate::report::TOOL);
        config["version"] = json!(crate::VERSION);
        graph_io::save(&g, path, format, Some(&config))?;
    }
    Ok(Status::Pass)
}

fn cmd_verify(a: VerifyArgs) -> Result<Status> {
    let (lo, hi) = a.levels.unwrap_or((1, a.suite.max_level().min(3)));
    let report = run_suite(a.suite, lo..=hi, a.seed)?;
    let prov = Provenance::new(
        format!("verify {}", a.suite),
        json!({ "suite": a.suite.name(), "levels": [lo, hi] }),
        Some(a.seed),
    );
    let result = serde_json::to_value(&report).map_err(|e| Error::Format(e.to_string()))?;
    let mut v = prov.json(&result)?;
    v["passed"] = json!(report.passed());
    let mut buf = serde_json::to_vec_pretty(&v).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    if a.out.is_some() {
        for c in &report.checks {
            let level = c.level.map(|n| format!("n={n} ")).unwrap_or_default();
            println!("{} {level}{}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
    }
    write_to(a.out.as_deref(), &buf)?;
    Ok(if report.passed() { Status::Pass } else { Status::Failed })
}

fn scan_table(t: &ScanTable) -> Table {
    let mut table = Table::new(&[
        "level",
        "p",
        "value_lower",
        "value_upper",
        "iterations",
        "converged",
        "ratio_to_previous_level",
    ]);
    for c in &t.cells {
        table.push(vec![
            c.level.to_string(),
            c.p.to_string(),
            format!("{:.12e}", c.value_lower),
            format!("{:.12e}", c.value_upper),
            c.iterations.to_string(),
            c.converged.to_string(),
            c.ratio_to_previous_level.map(|r| format!("{r:.12e}")).unwrap_or_default(),
        ]);
    }
    table
}

fn cmd_modulus(a: ModulusArgs) -> Result<Status> {
    let mut config = ScanConfig::new(Vec::new(), a.p_grid.clone());
    config.from = a.from;
    config.to = a.to;
    config.tolerance = a.tol;
    config.max_iterations = a.max_iterations;
    config.policy = a.policy.into();
    let mut prov_inputs = Vec::new();
    let table = if a.graphs.is_empty() {
        let (lo, hi) = a.levels.unwrap_or((1, 3));
        config.levels = (lo..=hi).collect();
        conformal_scan(&config)?
    } else {
        let mut graphs = Vec::new();
        for path in &a.graphs {
            prov_inputs.push(digest_file(path)?);
            graphs.push(graph_io::load(path)?);
        }
        graphs.sort_by_key(|g| g.level());
        scan_graphs(&config, &graphs)?
    };
    let mut prov = Provenance::new(
        "modulus",
        serde_json::to_value(&table.config).map_err(|e| Error::Format(e.to_string()))?,
        None,
    );
    for i in prov_inputs {
        prov = prov.with_input(i);
    }
    let violations = table.monotonicity_violations();
    let result = serde_json::to_value(&table).map_err(|e| Error::Format(e.to_string()))?;
    let mut notes: Vec<String> = table.mincut.iter().map(|(n, c)| format!("mincut level {n} {c}")).collect();
    for (n, p, q) in &violations {
        notes.push(format!("monotonicity violated at level {n} between p={p} and p={q}"));
    }
    emit(&prov, &a.output, Format::Csv, &scan_table(&table), &result, &notes)?;
    if let Some(path) = &a.critical_out {
        let mut buf = Vec::new();
        prov.csv_header(&mut buf).expect("writing to memory");
        table.write_critical_csv(&mut buf).expect("writing to memory");
        write_to(Some(path), &buf)?;
    }
    Ok(if !table.all_converged() {
        Status::NotConverged
    } else if !violations.is_empty() {
        Status::Failed
    } else {
        Status::Pass
    })
}

fn rational(q: &BigRational) -> String {
    q.to_string()
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn cmd_pushforward(a: MeasureArgs) -> Result<Status> {
    let m = a.measure()?;
    let w = pushforward_x(&m);
    let mut table = Table::new(&["index", "weight", "weight_f64"]);
    for (i, q) in w.weights.iter().enumerate() {
        table.push(vec![i.to_string(), rational(q), format!("{:.17e}", to_f64(q))]);
    }
    let result = json!({
        "level": w.level,
        "weights": w.weights.iter().map(rational).collect::<Vec<_>>(),
    });
    let prov = Provenance::new("measure pushforward", a.config(), None);
    emit(&prov, &a.output, Format::Csv, &table, &result, &[])?;
    Ok(Status::Pass)
}

fn cmd_ratios(a: MeasureArgs) -> Result<Status> {
    let m = a.measure()?;
    let report = middle_third_ratios(&pushforward_x(&m))?;
    let mut table = Table::new(&["level", "index", "ratio"]);
    for r in &report.ratios {
        table.push(vec![r.level.to_string(), r.index.to_string(), rational(&r.ratio)]);
    }
    let common = report.common_ratio().map(rational);
    let result = json!({
        "ratios": report.ratios.iter().map(|r| json!([r.level, r.index, rational(&r.ratio)])).collect::<Vec<_>>(),
        "skipped": report.skipped,
        "common_ratio": common,
    });
    let mut notes = vec![format!("common ratio {}", common.as_deref().unwrap_or("none"))];
    if !report.skipped.is_empty() {
        notes.push(format!("{} zero-weight intervals skipped", report.skipped.len()));
    }
    let prov = Provenance::new("measure ratios", a.config(), None);
    emit(&prov, &a.output, Format::Csv, &table, &result, &notes)?;
    Ok(Status::Pass)
}

fn dimension_json(e: &DimensionEstimate) -> Value {
    json!({
        "variant": e.variant,
        "estimate": e.estimate,
        "residual": e.residual,
        "rows": e.rows.iter().map(|r| json!({
            "scale": r.scale, "log_scale": r.log_scale, "count": r.count, "log_count": r.log_count,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_dimension(a: DimensionArgs) -> Result<Status> {
    let (estimate, config, seed) = match a.variant {
        DimensionVariant::Tiles => {
            let levels: Vec<u32> = (a.levels.0..=a.levels.1).collect();
            (box_dimension_estimate(&levels)?, json!({ "variant": "tiles", "levels": levels }), None)
        }
        DimensionVariant::Balls => {
            let seed = require_seed(a.seed, "the ball-count regression")?;
            let level = a.level.ok_or_else(|| Error::domain("the ball-count regression needs --level"))?;
            let g = ReplacementGraph::build(level, CentralEdgePolicy::On)?;
            let census = BallCensus::for_level(level, a.samples, seed);
            let config = json!({
                "variant": "balls", "level": level, "samples": a.samples, "scales": census.scales,
            });
            (ball_dimension_estimate(&g, &census)?, config, Some(seed))
        }
    };
    let mut table = Table::new(&["scale", "log_scale", "count", "log_count"]);
    for r in &estimate.rows {
        table.push(vec![
            r.scale.to_string(),
            format!("{:.12e}", r.log_scale),
            format!("{:.12e}", r.count),
            format!("{:.12e}", r.log_count),
        ]);
    }
    let notes = [format!("estimate {:.12} residual {:.3e}", estimate.estimate, estimate.residual)];
    let prov = Provenance::new("measure dimension", config, seed);
    emit(&prov, &a.output, Format::Csv, &table, &dimension_json(&estimate), &notes)?;
    Ok(Status::Pass)
}

fn cmd_doubling(a: MeasureArgs) -> Result<Status> {
    let m = a.measure()?;
    let g = ReplacementGraph::build_with(a.level, m.alphabet(), CentralEdgePolicy::On)?;
    let r = tile_doubling_check(&m, &g)?;
    let word = |(n, i): (u32, usize)| Word::from_index(m.alphabet(), n as usize, i).to_string();
    let result = json!({
        "doubling": r.is_doubling(),
        "ratio": r.ratio.as_ref().map(rational),
        "witness": r.witness.map(|(x, y)| [word(x), word(y)]),
        "pairs_checked": r.pairs_checked,
    });
    let mut table = Table::new(&["doubling", "ratio", "witness_a", "witness_b", "pairs_checked"]);
    let (wa, wb) = r.witness.map(|(x, y)| (word(x), word(y))).unwrap_or_default();
    table.push(vec![
        r.is_doubling().to_string(),
        r.ratio.as_ref().map(rational).unwrap_or_default(),
        wa,
        wb,
        r.pairs_checked.to_string(),
    ]);
    let prov = Provenance::new("measure doubling", a.config(), None);
    emit(&prov, &a.output, Format::Json, &table, &result, &[])?;
    Ok(Status::Pass)
}

fn cmd_distances(a: DistancesArgs) -> Result<Status> {
    let g = a.graph.build()?;
    let d = graph_metric(&g)?;
    emit_plm(Provenance::new("metric distances", a.graph.config(), None), &a.out, &d)?;
    Ok(Status::Pass)
}

fn cmd_symmetrize(a: SymmetrizeArgs) -> Result<Status> {
    let (d, input) = match (&a.input, a.level) {
        (Some(path), _) => {
            let (d, digest) = load_plm(path)?;
            (d, Some(digest))
        }
        (None, Some(n)) => (graph_metric(&ReplacementGraph::build(n, a.policy.into())?)?, None),
        (None, None) => return Err(Error::domain("symmetrize needs --input or --level")),
    };
    let (mode, seed) = match a.mode {
        ModeArg::Exact => (SymmetrizeMode::Exact, None),
        ModeArg::Sampled => {
            let seed = require_seed(a.seed, "sampled symmetrization")?;
            (SymmetrizeMode::Sampled { samples: a.samples, seed }, Some(seed))
        }
    };
    let s = symmetrize(&d, mode)?;
    let config = json!({
        "level": a.level,
        "policy": CentralEdgePolicy::from(a.policy).name(),
        "mode": match a.mode { ModeArg::Exact => "exact", ModeArg::Sampled => "sampled" },
        "samples": (a.mode == ModeArg::Sampled).then_some(a.samples),
    });
    let mut prov = Provenance::new("metric symmetrize", config, seed);
    if let Some(i) = input {
        prov = prov.with_input(i);
    }
    emit_plm(prov, &a.out, &s)?;
    Ok(Status::Pass)
}

fn parse_normalization(s: &str) -> Result<Normalization> {
    let bad = || Error::domain(format!("normalization {s:?} is not none, diameter, factor:<x> or pair:<a>,<b>"));
    Ok(match s.split_once(':') {
        None if s == "none" => Normalization::Factor(1.0),
        None if s == "diameter" => Normalization::Diameter,
        Some(("factor", x)) => Normalization::Factor(x.parse().map_err(|_| bad())?),
        Some(("pair", ab)) => {
            let (x, y) = ab.split_once(',').ok_or_else(bad)?;
            Normalization::Pair(x.parse()?, y.parse()?)
        }
        _ => return Err(bad()),
    })
}

fn cmd_blowup(a: BlowupArgs) -> Result<Status> {
    let w: Word = a.prefix.parse()?;
    let norm = parse_normalization(&a.normalize)?;
    let mut input = None;
    let mut notes = json!({});
    let block = match (&a.input, a.level_from) {
        (Some(path), _) => {
            let (d, digest) = load_plm(path)?;
            input = Some(digest);
            d
        }
        (None, Some(n)) => {
            let g = ReplacementGraph::build(n, a.policy.into())?;
            let internal = internal_block_metric(&g, &w)?;
            match a.mode {
                BlockMode::Internal => internal,
                BlockMode::Ambient => {
                    let ambient = ambient_block_metric(&g, &w)?;
                    let c = comparability(&internal, &ambient)?;
                    println!("comparability {c}");
                    notes = json!({ "comparability": c });
                    ambient
                }
            }
        }
        (None, None) => return Err(Error::domain("blowup needs --input or --level-from")),
    };
    let d = blowup_metric(&block, &w, &norm)?;
    let config = json!({
        "level_from": a.level_from,
        "policy": CentralEdgePolicy::from(a.policy).name(),
        "prefix": w.to_string(),
        "mode": match a.mode { BlockMode::Internal => "internal", BlockMode::Ambient => "ambient" },
        "normalize": a.normalize,
        "notes": notes,
    });
    let mut prov = Provenance::new("metric blowup", config, None);
    if let Some(i) = input {
        prov = prov.with_input(i);
    }
    emit_plm(prov, &a.out, &d)?;
    Ok(Status::Pass)
}

fn bins(table: &mut Table, direction: &str, bins: &[DistortionBin]) {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
    for b in bins {
        table.push(vec![
            direction.to_string(),
            b.index.to_string(),
            format!("{:.12e}", b.lower),
            format!("{:.12e}", b.upper),
            b.count.to_string(),
            opt(b.max_ratio),
            opt(b.envelope),
        ]);
    }
}

fn cmd_distortion(a: DistortionArgs) -> Result<Status> {
    let (d1, h1) = load_plm(&a.d1)?;
    let (d2, h2) = load_plm(&a.d2)?;
    let profile = qs_distortion(&d1, &d2, a.samples, a.seed)?;
    let mut table = Table::new(&["direction", "bin", "lower", "upper", "count", "max_ratio", "envelope"]);
    bins(&mut table, "forward", &profile.forward);
    bins(&mut table, "inverse", &profile.inverse);
    let result = serde_json::to_value(&profile).map_err(|e| Error::Format(e.to_string()))?;
    let prov = Provenance::new("metric distortion", json!({ "samples": a.samples }), Some(a.seed))
        .with_input(h1)
        .with_input(h2);
    let notes = [format!("{} triples, {} skipped", profile.samples, profile.skipped)];
    emit(&prov, &a.output, Format::Csv, &table, &result, &notes)?;
    Ok(Status::Pass)
}

fn cmd_quotient(a: QuotientArgs) -> Result<Status> {
    let g = ReplacementGraph::build(a.level, a.policy.into())?;
    let r = lipschitz_quotient_check(&g);
    let mut result = serde_json::to_value(&r).map_err(|e| Error::Format(e.to_string()))?;
    result["passed"] = json!(r.passed());
    if let Some(w) = &r.violation {
        result["violation"]["word"] = json!(g.word(w.vertex).to_string());
    }
    let config = json!({ "level": a.level, "policy": CentralEdgePolicy::from(a.policy).name() });
    emit_json(&Provenance::new("metric quotient-check", config, None), a.out.as_deref(), &result)?;
    Ok(if r.passed() { Status::Pass } else { Status::Failed })
}

fn cmd_cover(a: CoverArgs) -> Result<Status> {
    use rand::{Rng, SeedableRng};

    let g = ReplacementGraph::build(a.level, CentralEdgePolicy::On)?;
    let side = cells_per_axis(a.level) as u32;
    let (balls, seed) = match (a.center, a.radius) {
        (Some(center), Some(radius)) => (vec![GridBall { center, radius }], None),
        _ => {
            let seed = require_seed(a.seed, "sampled cover checks")?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let balls = (0..a.balls)
                .map(|_| GridBall {
                    center: (rng.random_range(0..side), rng.random_range(0..side)),
                    radius: rng.random_range(0..=side / 3),
                })
                .collect();
            (balls, Some(seed))
        }
    };
    let mut reports = Vec::new();
    let mut passed = true;
    let mut overlap = 0;
    for b in balls {
        let r = cover_preimage(&g, b, a.c)?;
        passed &= r.passed();
        overlap = overlap.max(r.overlap);
        reports.push(json!({
            "ball": r.ball,
            "centers": r.centers.iter().map(|&v| g.word(v).to_string()).collect::<Vec<_>>(),
            "ball_radius": r.ball_radius,
            "preimage_size": r.preimage_size,
            "uniform_radius": r.uniform_radius,
            "projects_onto": r.projects_onto,
            "shrunk_disjoint": r.shrunk_disjoint,
            "covers": r.covers,
            "overlap": r.overlap,
            "witness": r.witness,
        }));
    }
    let result = json!({ "passed": passed, "max_overlap": overlap, "balls": reports });
    let config = json!({
        "level": a.level, "constant": a.c, "center": a.center, "radius": a.radius,
        "balls": if a.center.is_some() { 1 } else { a.balls },
    });
    emit_json(&Provenance::new("metric cover-check", config, seed), a.out.as_deref(), &result)?;
    Ok(if passed { Status::Pass } else { Status::Failed })
}

fn pi_table(r: &PiReport) -> Table {
    let mut table = Table::new(&["family", "max_ratio"]);
    for (name, q) in &r.by_family {
        table.push(vec![name.clone(), format!("{q:.12e}")]);
    }
    table
}

fn cmd_pi(a: PiArgs) -> Result<Status> {
    let g = a.graph.build()?;
    let m = TileMeasure::uniform(g.alphabet(), g.level())?;
    let r = match a.function {
        FunctionArg::Random => pi_diagnostic(&g, &m, a.p, a.trials, a.seed)?,
        FunctionArg::Constant => pi_diagnostic_for(&g, &m, a.p, &TestFunction::Constant, a.trials, a.seed)?,
        FunctionArg::X => pi_diagnostic_for(&g, &m, a.p, &TestFunction::XCoord, a.trials, a.seed)?,
        FunctionArg::Y => pi_diagnostic_for(&g, &m, a.p, &TestFunction::YCoord, a.trials, a.seed)?,
    };
    let mut config = a.graph.config();
    config["p"] = json!(a.p);
    config["trials"] = json!(a.trials);
    config["function"] = json!(format!("{:?}", a.function).to_lowercase());
    let result = serde_json::to_value(&r).map_err(|e| Error::Format(e.to_string()))?;
    let notes = [format!("worst ratio {:.12e}, {} of {} trials excluded", r.worst_ratio, r.excluded, r.trials)];
    emit(&Provenance::new("metric pi-diagnostic", config, Some(a.seed)), &a.output, Format::Csv, &pi_table(&r), &result, &notes)?;
    Ok(Status::Pass)
}
