use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tensorcolor::hardness::{reduce_graph, ReductionMode};
use tensorcolor::instance::{gen_base_graph, make_instance, InstanceFile};
use tensorcolor::io::{parse_dimacs, write_dimacs};
use tensorcolor::pipeline::{
    color_with_k_core_components, epsilon_grid, epsilon_search, full_3_coloring, main_reconstruct,
    verify_coloring, verify_reconstruction, write_metrics, ColoringFile, MetricsRow,
    PipelineConfig, PipelineError, ReconstructionFile, VerifyReport, DEFAULT_MAX_COMPONENTS,
    DEFAULT_MAX_K,
};
use tensorcolor::scalar::{format_rational, parse_rational};
use tensorcolor::{BaseGraphKind, Coloring3, DeletionStrategy, Graph, Rational};

/// Exit code for a verification report with a failing check.
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "tensorcolor",
    version,
    about = "Factor and 3-color graphs close to K₃ × G"
)]
struct Cli {
    /// Run the subcommand stored in this JSON file instead.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the effective run configuration as JSON before running.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// One run, as stored by `--save-config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "subcommand")]
pub enum Command {
    /// Generate a labeled noisy tensor instance.
    Gen(GenArgs),
    /// Reconstruct a tensor factorization of H.
    Reconstruct(ReconstructArgs),
    /// 3-color H through its triangle components.
    Color(ColorArgs),
    /// Reduce a 3-coloring instance to a graph near a tensor.
    Reduce(ReduceArgs),
    /// Re-check reconstruction or coloring files against their input.
    Verify(VerifyArgs),
    /// Sweep families and ε values, writing one metrics row per cell.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GType {
    Regular,
    Hypercube,
    Complete,
    OddCycle,
    TwoCliques,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    RoundRobin,
    ConfusablePush,
}

impl From<Strategy> for DeletionStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Random => DeletionStrategy::Random,
            Strategy::RoundRobin => DeletionStrategy::RoundRobin,
            Strategy::ConfusablePush => DeletionStrategy::ConfusablePush,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    WithClouds,
    Plain,
}

/// Limits shared by the pipeline subcommands.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Give up when the candidate graph has more triangles than this.
    #[arg(long, default_value_t = tensorcolor::candidate::DEFAULT_MAX_TRIANGLES)]
    pub max_triangles: usize,
    /// Give up when there are more non-overlapping triangle components.
    #[arg(long, default_value_t = DEFAULT_MAX_COMPONENTS)]
    pub max_components: usize,
    /// Accept a component only if its error is within 260ε|E(H[U])| + |U|.
    #[arg(long)]
    pub strict_threshold: bool,
    /// Enumerate overlapping triangle components in full.
    #[arg(long)]
    pub exact_components: bool,
}

impl Caps {
    fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            max_triangles: self.max_triangles,
            max_components: self.max_components,
            strict_threshold: self.strict_threshold,
            exact_components: self.exact_components,
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GType::Regular)]
    pub g_type: GType,
    /// Vertex count of G (regular, complete, odd-cycle); clique size for two-cliques.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Degree of G for the regular family.
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    /// Hypercube dimension.
    #[arg(long, default_value_t = 5)]
    pub ell: usize,
    /// Hypercube distance fraction, e.g. 3/5.
    #[arg(long, default_value = "3/5", value_parser = rational_arg)]
    pub beta: String,
    /// Per-vertex deletion fraction.
    #[arg(long, default_value = "0", value_parser = rational_arg)]
    pub epsilon: String,
    #[arg(long, value_enum, default_value_t = Strategy::Random)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Labeled instance JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write H alone as DIMACS, without ground truth.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructArgs {
    /// Instance JSON (`.json`) or DIMACS graph.
    #[arg(long)]
    pub input: PathBuf,
    /// Searches a grid of values below 1/40 when absent.
    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics CSV with one row; overwritten if present.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long, default_value = "run")]
    pub label: String,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Tries the grid values in increasing order when absent.
    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Option<String>,
    /// Combine up to this many disjoint components.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceArgs {
    /// DIMACS graph to 3-color.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Plain)]
    pub mode: Mode,
    /// Target nearness; needed with clouds.
    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Option<String>,
    /// Reduced graph, DIMACS.
    #[arg(long)]
    pub out: PathBuf,
    /// Bookkeeping JSON; defaults to `<out>.json`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// The instance or graph the files were computed from.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub reconstruction: Option<PathBuf>,
    #[arg(long)]
    pub coloring: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Families such as `regular:60:20`, `hypercube:5:3/5`, `complete:5`,
    /// `odd-cycle:7`, `two-cliques:5`. Repeat or separate with commas.
    #[arg(long = "family", value_delimiter = ',', required = true)]
    pub families: Vec<String>,
    #[arg(long = "epsilon", value_delimiter = ',', required = true, value_parser = rational_arg)]
    pub epsilons: Vec<String>,
    #[arg(long, value_enum, default_value_t = Strategy::Random)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub caps: Caps,
}

/// Validates a rational literal and stores it in `p/q` form.
fn rational_arg(text: &str) -> Result<String, String> {
    parse_rational(text)
        .map(|r| format_rational(&r))
        .map_err(|e| e.to_string())
}

fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).with_context(|| format!("bad rational `{text}`"))
}

/// Why a run stopped, mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Pipeline(PipelineError),
    Verify,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let file: InstanceFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing instance {}", path.display()))?;
        Ok(file.h_graph()?)
    } else {
        parse_dimacs(&text).with_context(|| format!("parsing DIMACS {}", path.display()))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn base_kind(args: &GenArgs) -> Result<BaseGraphKind> {
    Ok(match args.g_type {
        GType::Regular => BaseGraphKind::RandomRegular {
            n: args.n,
            d: args.d,
        },
        GType::Hypercube => BaseGraphKind::NoisyHypercube {
            ell: args.ell,
            beta: rational(&args.beta)?,
        },
        GType::Complete => BaseGraphKind::Complete { n: args.n },
        GType::OddCycle => BaseGraphKind::OddCycle { n: args.n },
        GType::TwoCliques => BaseGraphKind::TwoCliquesBridged { n: args.n },
    })
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let g = gen_base_graph(&base_kind(args)?, args.seed).context("generating G")?;
    let eps = rational(&args.epsilon)?;
    let inst =
        make_instance(&g, eps, args.strategy.into(), args.seed).context("generating instance")?;
    write_json(&args.out, &inst.to_file())?;
    if let Some(path) = &args.dimacs {
        let text = write_dimacs(&inst.h, &["H only; labels withheld"]);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "wrote {}: |V(G)| = {}, |E(H)| = {}, {} edges deleted",
        args.out.display(),
        g.n(),
        inst.h.m(),
        inst.deleted.len()
    );
    Ok(())
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<(), Failure> {
    let h = read_graph(&args.input)?;
    let config = args.caps.pipeline();
    let started = Instant::now();
    let (eps, result) = match &args.epsilon {
        Some(text) => {
            let eps = rational(text)?;
            (eps, main_reconstruct(&h, eps, &config))
        }
        None => {
            let r = epsilon_search::<Rational>(&h, &config);
            let eps = r
                .as_ref()
                .map_or(*epsilon_grid::<Rational>().last().expect("grid"), |r| {
                    r.epsilon_used
                });
            (eps, r)
        }
    };
    if let Some(path) = &args.metrics {
        let row = MetricsRow::from_result(&args.label, &h, eps, &result, started);
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_metrics(file, &[row]).context("writing metrics")?;
    }
    let r = result?;
    write_json(&args.out, &r.to_file())?;
    println!(
        "ε = {}: error_delta = {}, {} components, error ratio {:.4}",
        format_rational(&r.epsilon_used),
        r.error_delta,
        r.components.len(),
        r.error_ratio(&h)
    );
    Ok(())
}

fn color_once(
    h: &Graph,
    eps: Rational,
    k: Option<usize>,
    config: &PipelineConfig,
) -> Result<Coloring3, PipelineError> {
    match k {
        Some(k) => color_with_k_core_components(h, eps, k, config),
        None => full_3_coloring(h, eps, config),
    }
}

fn cmd_color(args: &ColorArgs) -> Result<(), Failure> {
    let h = read_graph(&args.input)?;
    let config = args.caps.pipeline();
    if args.k.is_some_and(|k| k > DEFAULT_MAX_K) {
        eprintln!(
            "note: k = {} exceeds the usual limit of {DEFAULT_MAX_K}",
            args.k.unwrap_or(0)
        );
    }
    let coloring = match &args.epsilon {
        Some(text) => color_once(&h, rational(text)?, args.k, &config)?,
        None => {
            let mut last = PipelineError::NoColoring;
            let mut found = None;
            for eps in epsilon_grid::<Rational>() {
                match color_once(&h, eps, args.k, &config) {
                    Ok(c) => {
                        found = Some(c);
                        break;
                    }
                    Err(e @ (PipelineError::TriangleCap { .. } | PipelineError::EmptyGraph)) => {
                        return Err(e.into())
                    }
                    Err(e) => last = e,
                }
            }
            found.ok_or(last)?
        }
    };
    let file = ColoringFile::from_coloring(&coloring);
    let report = verify_coloring(&h, &file);
    if !report.passed() {
        return Err(Failure::Other(anyhow::anyhow!(
            "internal error: coloring failed validation\n{report}"
        )));
    }
    write_json(&args.out, &file)?;
    println!(
        "wrote proper 3-coloring of {} vertices to {}",
        h.n(),
        args.out.display()
    );
    Ok(())
}

fn cmd_reduce(args: &ReduceArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let g = parse_dimacs(&text).context("parsing DIMACS")?;
    let mode = match args.mode {
        Mode::WithClouds => ReductionMode::WithClouds,
        Mode::Plain => ReductionMode::Plain,
    };
    let eps = args.epsilon.as_deref().map(rational).transpose()?;
    let (reduced, sidecar) = reduce_graph(&g, mode, eps).context("reducing")?;
    let out = write_dimacs(
        &reduced.graph,
        &["vertex 27v + 9x1 + 3x2 + x3 (1-based ids add one)"],
    );
    fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    let sidecar_path = args.sidecar.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".json");
        p.into()
    });
    write_json(&sidecar_path, &sidecar)?;
    println!(
        "reduced {} vertices to {} ({} edges)",
        g.n(),
        reduced.graph.n(),
        reduced.graph.m()
    );
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.reconstruction.is_none() && args.coloring.is_none() {
        return Err(Failure::Other(anyhow::anyhow!(
            "nothing to verify: pass --reconstruction or --coloring"
        )));
    }
    let h = read_graph(&args.input)?;
    let mut report = VerifyReport { checks: Vec::new() };
    if args.input.extension().is_some_and(|e| e == "json") {
        let file: InstanceFile = read_json(&args.input)?;
        if file.ground_truth.is_some() {
            report.checks.push((
                "instance agrees with its ground truth".into(),
                file.to_instance().is_ok(),
            ));
        }
    }
    if let Some(path) = &args.reconstruction {
        let file: ReconstructionFile = read_json(path)?;
        report
            .checks
            .extend(verify_reconstruction(&h, &file).checks);
    }
    if let Some(path) = &args.coloring {
        let file: ColoringFile = read_json(path)?;
        report.checks.extend(verify_coloring(&h, &file).checks);
    }
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

/// Parses `family:param:param`.
fn parse_family(text: &str) -> Result<BaseGraphKind> {
    let parts: Vec<&str> = text.split(':').collect();
    let count = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .with_context(|| format!("family `{text}` is missing a parameter"))?
            .parse()
            .with_context(|| format!("bad number in family `{text}`"))
    };
    let kind = match parts[0] {
        "regular" => BaseGraphKind::RandomRegular {
            n: count(1)?,
            d: count(2)?,
        },
        "hypercube" => BaseGraphKind::NoisyHypercube {
            ell: count(1)?,
            beta: rational(
                parts
                    .get(2)
                    .with_context(|| format!("family `{text}` needs β"))?,
            )?,
        },
        "complete" => BaseGraphKind::Complete { n: count(1)? },
        "odd-cycle" => BaseGraphKind::OddCycle { n: count(1)? },
        "two-cliques" => BaseGraphKind::TwoCliquesBridged { n: count(1)? },
        other => bail!("unknown family `{other}`"),
    };
    Ok(kind)
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let kinds = args
        .families
        .iter()
        .map(|f| parse_family(f).map(|k| (f.clone(), k)))
        .collect::<Result<Vec<_>>>()?;
    let epsilons = args
        .epsilons
        .iter()
        .map(|e| rational(e))
        .collect::<Result<Vec<_>>>()?;
    let config = args.caps.pipeline();
    let cells: Vec<(usize, usize)> = (0..kinds.len())
        .flat_map(|f| (0..epsilons.len()).map(move |e| (f, e)))
        .collect();
    // Rows come back in grid order whatever order the cells finish in.
    let rows = cells
        .par_iter()
        .map(|&(f, e)| -> Result<MetricsRow> {
            let (name, kind) = &kinds[f];
            let eps = epsilons[e];
            let g =
                gen_base_graph(kind, args.seed).with_context(|| format!("generating {name}"))?;
            let inst = make_instance(&g, eps, args.strategy.into(), args.seed)?;
            let label = format!("{name}@{}", format_rational(&eps));
            let started = Instant::now();
            let result = main_reconstruct(&inst.h, eps, &config);
            Ok(MetricsRow::from_result(
                &label, &inst.h, eps, &result, started,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let file =
        fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_metrics(file, &rows).context("writing metrics")?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Color(a) => cmd_color(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(text) = std::env::var("TENSORCOLOR_THREADS") {
        let threads: usize = text.parse().with_context(|| {
            format!("TENSORCOLOR_THREADS must be a positive integer, got `{text}`")
        })?;
        if threads == 0 {
            bail!("TENSORCOLOR_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn main_inner() -> Result<(), Failure> {
    let cli = Cli::parse();
    configure_threads()?;
    let config = match (&cli.config, cli.command) {
        (Some(path), None) => read_json::<RunConfig>(path)?,
        (None, Some(command)) => RunConfig { command },
        (Some(_), Some(_)) => {
            return Err(anyhow::anyhow!("give either --config or a subcommand, not both").into())
        }
        (None, None) => return Err(anyhow::anyhow!("no subcommand given; see --help").into()),
    };
    if let Some(path) = &cli.save_config {
        write_json(path, &config)?;
    }
    run(&config.command)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
