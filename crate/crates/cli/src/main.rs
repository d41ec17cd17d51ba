use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tsnet_core::pipeline::{analyze_graph, analyze_segments, analyze_series, PipelineOptions};
use tsnet_core::report::{AnalysisReport, ComparisonTable, InputDescriptor};
use tsnet_core::series::{
    load_series, logistic_series, segment_series, write_csv, ColumnSelector, Format, LoadOptions,
    LogisticParams, SegmentMode, SegmentationPlan,
};
use tsnet_core::{Method, PipelineError, VisibilityGraph};

/// Visibility-graph Q-analysis of scalar time series.
#[derive(Parser)]
#[command(name = "tsnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a logistic-map series as CSV.
    Generate(GenerateArgs),
    /// Build the visibility graph and clique complex of a series and report
    /// its characterisers.
    Analyze(AnalyzeArgs),
    /// Tabulate two or more reports side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = LogisticParams::DEFAULT_X0)]
    x0: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = LogisticParams::DEFAULT_TRANSIENT)]
    transient: usize,
    /// Output CSV; stdout when omitted. A `<out>.meta.json` sidecar records
    /// the parameters.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Quadratic,
    DivideAndConquer,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerBlock,
    ConcatenateByLabel,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Series file (CSV or JSON).
    #[arg(long, required_unless_present = "graph", conflicts_with = "graph")]
    input: Option<PathBuf>,
    /// Edge list to analyse directly, bypassing graph construction.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Node count for --graph; defaults to the largest index + 1.
    #[arg(long, requires = "graph")]
    nodes: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Column index or header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// The first CSV row is a header.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value = "quadratic")]
    method: MethodArg,
    /// Report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include the per-node topological dimension list.
    #[arg(long)]
    node_dims: bool,
    /// Write the edge list here.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the maximal cliques here, one per line.
    #[arg(long)]
    cliques: Option<PathBuf>,
    /// Split the series into blocks of this many samples.
    #[arg(long, requires = "labels")]
    block_length: Option<usize>,
    /// Comma-separated labels applied cyclically to blocks.
    #[arg(long, value_delimiter = ',', requires = "block_length")]
    labels: Vec<String>,
    #[arg(long, value_enum, default_value = "per-block")]
    mode: ModeArg,
    /// Drop a trailing partial block instead of failing.
    #[arg(long)]
    truncate: bool,
    /// Directory for per-segment reports; stdout (JSON array) when omitted.
    #[arg(long)]
    report_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(num_args = 2.., required = true)]
    reports: Vec<PathBuf>,
    /// Write the text table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Show at least this many levels.
    #[arg(long, default_value_t = 0)]
    levels: usize,
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy)]
enum Status {
    Usage = 1,
    Input = 2,
    Invariant = 3,
}

struct Failure {
    status: Status,
    error: anyhow::Error,
}

type Outcome = Result<(), Failure>;

trait Classify<T> {
    fn status(self, status: Status) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn status(self, status: Status) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            status,
            error: e.into(),
        })
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let status = if e.is_invariant_violation() {
        Status::Invariant
    } else {
        Status::Input
    };
    Failure {
        status,
        error: e.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Status::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Analyze(args) => analyze(args),
        Command::Compare(args) => compare(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            if matches!(status, Status::Usage) {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(status as u8)
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &[u8]) -> Outcome {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .status(Status::Input)
}

fn generate(args: GenerateArgs) -> Outcome {
    let params = LogisticParams {
        mu: args.mu,
        x0: args.x0,
        n: args.n,
        transient: args.transient,
    };
    let ts = logistic_series(&params).status(Status::Usage)?;
    match &args.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_csv(&ts, &mut buf).status(Status::Input)?;
            write_file(path, &buf)?;
            let meta = serde_json::json!({ "generator": "logistic", "parameters": params });
            let text = serde_json::to_string_pretty(&meta).status(Status::Input)?;
            write_file(&sidecar_path(path), text.as_bytes())
        }
        None => write_csv(&ts, io::stdout().lock()).status(Status::Input),
    }
}

fn read_sidecar(path: &Path) -> Option<LogisticParams> {
    let text = fs::read_to_string(sidecar_path(path)).ok()?;
    let meta: serde_json::Value = serde_json::from_str(&text).ok()?;
    serde_json::from_value(meta.get("parameters")?.clone()).ok()
}

fn analyze(args: AnalyzeArgs) -> Outcome {
    let opts = PipelineOptions {
        method: match args.method {
            MethodArg::Quadratic => Method::Quadratic,
            MethodArg::DivideAndConquer => Method::DivideAndConquer,
        },
        node_dims: args.node_dims,
    };
    let segmented = args.block_length.is_some();
    if segmented && (args.edges.is_some() || args.dot.is_some() || args.cliques.is_some()) {
        return Err(anyhow!(
            "--edges, --dot and --cliques cannot be combined with segmentation"
        ))
        .status(Status::Usage);
    }

    let output = if let Some(graph_path) = &args.graph {
        if segmented {
            return Err(anyhow!("--graph cannot be segmented")).status(Status::Usage);
        }
        let file = fs::File::open(graph_path)
            .with_context(|| format!("opening {}", graph_path.display()))
            .status(Status::Input)?;
        let graph = VisibilityGraph::read_edge_list(BufReader::new(file), args.nodes)
            .with_context(|| format!("reading {}", graph_path.display()))
            .status(Status::Input)?;
        let input = InputDescriptor {
            source: graph_path.display().to_string(),
            label: graph_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned()),
            length: graph.node_count(),
            start_index: 0,
            parameters: None,
            seams: Vec::new(),
        };
        analyze_graph(graph, input, &opts).map_err(pipeline_failure)?
    } else {
        let path = args
            .input
            .as_deref()
            .expect("clap requires --input or --graph");
        let load = LoadOptions {
            format: args.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            }),
            column: args.column.parse::<ColumnSelector>().expect("infallible"),
            header: args.header,
        };
        let ts = load_series(path, &load)
            .with_context(|| format!("loading {}", path.display()))
            .status(Status::Input)?;
        let source = path.display().to_string();

        if let Some(block_length) = args.block_length {
            let plan = SegmentationPlan {
                block_length,
                labels: args.labels.clone(),
                mode: match args.mode {
                    ModeArg::PerBlock => SegmentMode::PerBlock,
                    ModeArg::ConcatenateByLabel => SegmentMode::ConcatenateByLabel,
                },
                truncate: args.truncate,
            };
            let segments = segment_series(&ts, &plan).status(Status::Input)?;
            let reports = analyze_segments(&segments, &source, &opts)
                .into_iter()
                .enumerate()
                .map(|(k, r)| {
                    r.map_err(|e| {
                        let mut f = pipeline_failure(e);
                        f.error = f.error.context(format!("segment {k}"));
                        f
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return write_segment_reports(&reports, args.report_dir.as_deref());
        }

        let mut input = InputDescriptor::for_series(source, &ts);
        input.parameters = read_sidecar(path);
        analyze_series(&ts, input, &opts).map_err(pipeline_failure)?
    };

    if let Some(p) = &args.edges {
        let mut buf = Vec::new();
        output
            .graph
            .write_edge_list(&mut buf)
            .status(Status::Input)?;
        write_file(p, &buf)?;
    }
    if let Some(p) = &args.dot {
        write_file(p, output.graph.to_dot().as_bytes())?;
    }
    if let Some(p) = &args.cliques {
        let mut buf = Vec::new();
        output
            .complex
            .write_simplices(&mut buf)
            .status(Status::Input)?;
        write_file(p, &buf)?;
    }
    let json = output.report.to_json() + "\n";
    match &args.report {
        Some(p) => write_file(p, json.as_bytes()),
        None => io::stdout()
            .write_all(json.as_bytes())
            .status(Status::Input),
    }
}

fn segment_file_name(k: usize, report: &AnalysisReport) -> String {
    let label: String = report
        .input
        .label
        .as_deref()
        .unwrap_or("segment")
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{k:03}-{label}.json")
}

fn write_segment_reports(reports: &[AnalysisReport], dir: Option<&Path>) -> Outcome {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))
                .status(Status::Input)?;
            for (k, r) in reports.iter().enumerate() {
                write_file(
                    &dir.join(segment_file_name(k, r)),
                    (r.to_json() + "\n").as_bytes(),
                )?;
            }
            Ok(())
        }
        None => {
            let text = serde_json::to_string_pretty(reports).status(Status::Input)?;
            writeln!(io::stdout(), "{text}").status(Status::Input)
        }
    }
}

fn compare(args: CompareArgs) -> Outcome {
    let mut named = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .status(Status::Input)?;
        let report = AnalysisReport::from_json(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .status(Status::Input)?;
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        named.push((name, report));
    }
    let table = ComparisonTable::from_reports(&named, args.levels).status(Status::Input)?;
    if let Some(p) = &args.csv {
        write_file(p, table.to_csv().as_bytes())?;
    }
    let text = table.to_text();
    match &args.out {
        Some(p) => write_file(p, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .status(Status::Input),
    }
}
