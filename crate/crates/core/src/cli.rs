//! `semnet` command line: stage-wise subcommands plus a one-shot pipeline.
//!
//! Every stage reads and writes files, so `pipeline` produces exactly the
//! bytes that `extract`, `build`, `layout` and `render` produce when chained.
//! Exit codes: 0 success, 2 usage error, 3 input or parse error, 4 empty result.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::extract::{self, LemmaMap, RetrievalOptions, Stopwords, TermSet, TermSetMeta};
use crate::forge::{self, ForgeError, Phrases};
use crate::kb::{KbKind, KnowledgeBase};
use crate::layout::{self, Layout, LayoutConfig};
use crate::network::{self, BackboneConfig, GraphMeta, LayoutMeta, NetworkError, WeightedGraph};
use crate::render::{self, SvgStyle};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    fn empty(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn in_stage(self, stage: &str) -> Self {
        CliError { code: self.code, message: format!("{stage}: {}", self.message) }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Empty => CliError::empty(e.to_string()),
            NetworkError::Multiplier(_) => CliError::usage(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<ForgeError> for CliError {
    fn from(e: ForgeError) -> Self {
        match e {
            ForgeError::EmptyCounts | ForgeError::AllZero => CliError::empty(e.to_string()),
            ForgeError::Window | ForgeError::DimsOutOfRange { .. } => CliError::usage(e.to_string()),
            ForgeError::Io { .. } => CliError::input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "semnet", version, about = "Semantic-network representations of design descriptions")]
pub struct Cli {
    /// Suppress the human-readable summary on standard output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Retrieve knowledge-base terms from a text and write a term-set JSON.
    Extract(ExtractArgs),
    /// Build the backbone graph JSON from a term-set JSON.
    Build(BuildArgs),
    /// Lay out a graph JSON with ForceAtlas2.
    Layout(LayoutArgs),
    /// Export a graph or layout JSON as json, graphml, dot or svg.
    Render(RenderArgs),
    /// Run extract, build, layout and render in one go.
    Pipeline(PipelineArgs),
    /// Forge an embedding knowledge base from a text corpus.
    Forge(ForgeArgs),
    /// Summarize a graph JSON.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KbType {
    Embedding,
    Taxonomy,
}

impl From<KbType> for KbKind {
    fn from(t: KbType) -> Self {
        match t {
            KbType::Embedding => KbKind::Embedding,
            KbType::Taxonomy => KbKind::Taxonomy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Graphml,
    Dot,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Graphml => "graphml",
            Format::Dot => "dot",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KbArgs {
    #[arg(long, value_name = "PATH")]
    pub kb: PathBuf,
    #[arg(long, value_enum, default_value = "embedding")]
    pub kb_type: KbType,
}

#[derive(Debug, Clone, Args)]
pub struct RetrievalArgs {
    #[arg(long, value_name = "PATH")]
    pub text: PathBuf,
    /// Replaces the built-in English stopword list.
    #[arg(long, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
    /// Tab-separated surface/lemma pairs.
    #[arg(long, value_name = "PATH")]
    pub lemmas: Option<PathBuf>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_n: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ForceArgs {
    #[arg(long, default_value_t = 600)]
    pub iterations: usize,
    #[arg(long = "kr", default_value_t = 2.0)]
    pub k_r: f64,
    #[arg(long = "kg", default_value_t = 1.0)]
    pub k_g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tolerance: f64,
}

impl ForceArgs {
    fn config(&self, seed: u64) -> Result<LayoutConfig, CliError> {
        let config = LayoutConfig {
            iterations: self.iterations,
            seed,
            k_r: self.k_r,
            k_g: self.k_g,
            delta: self.delta,
            tolerance: self.tolerance,
            ..LayoutConfig::default()
        };
        config.validate().map_err(CliError::usage)?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatList(pub Vec<Format>);

fn parse_formats(s: &str) -> Result<FormatList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let f = Format::from_str(part, true).map_err(|_| format!("unknown format {part:?}"))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err("no formats given".into());
    }
    Ok(FormatList(out))
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    #[command(flatten)]
    pub retrieval: RetrievalArgs,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Term-set JSON written by `extract`.
    pub terms: PathBuf,
    #[command(flatten)]
    pub kb: KbArgs,
    #[arg(long, default_value_t = 2.0)]
    pub multiplier: f64,
    /// Recorded in the graph and used as the default layout seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// Graph JSON written by `build`.
    pub graph: PathBuf,
    /// Defaults to the seed recorded in the graph.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub force: ForceArgs,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Graph or layout JSON.
    pub input: PathBuf,
    /// Comma-separated subset of json,graphml,dot,svg.
    #[arg(long, value_parser = parse_formats, default_value = "svg")]
    pub format: FormatList,
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    #[command(flatten)]
    pub retrieval: RetrievalArgs,
    #[arg(long, default_value_t = 2.0)]
    pub multiplier: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub force: ForceArgs,
    /// Comma-separated subset of json,graphml,dot,svg.
    #[arg(long, value_parser = parse_formats, default_value = "json,graphml,dot,svg")]
    pub format: FormatList,
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForgeArgs {
    /// Plain-text corpus files.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub window: u32,
    /// One multiword phrase per line, joined into single terms.
    #[arg(long, value_name = "PATH")]
    pub phrases: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    /// Target vector size; 0 keeps the raw PPMI rows. Clamped to the vocabulary size.
    #[arg(long, default_value_t = 50)]
    pub dims: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Graph or layout JSON.
    pub graph: PathBuf,
    /// Also write the statistics as JSON.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn load_kb(args: &KbArgs) -> Result<KnowledgeBase, CliError> {
    KnowledgeBase::load(&args.kb, args.kb_type.into()).map_err(|e| match e {
        crate::kb::KbError::Parse { .. } => CliError::input(format!("{}: {e}", args.kb.display())),
        _ => CliError::input(e.to_string()),
    })
}

/// Term retrieval over a text, tagged with the KB name. Fails with exit
/// code 4 when nothing is found.
pub fn extract_stage(kb: &KnowledgeBase, args: &RetrievalArgs) -> Result<TermSet, CliError> {
    let text = read_text(&args.text)?;
    let stopwords = match &args.stopwords {
        Some(p) => Stopwords::parse(&read_text(p)?),
        None => Stopwords::english(),
    };
    let lemmas = args.lemmas.as_deref().map(read_text).transpose()?.map(|t| LemmaMap::parse(&t));
    let options = RetrievalOptions { max_n: args.max_n as usize, stopwords, lemmas };
    let mut terms = extract::retrieve_terms(&extract::tokenize(&text), kb, &options);
    if terms.n_terms == 0 {
        return Err(CliError::empty("no lexicon terms found"));
    }
    terms.meta = Some(TermSetMeta {
        kb: kb.name().to_string(),
        max_n: options.max_n,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    });
    Ok(terms)
}

pub fn build_stage(terms: &TermSet, kb: &KnowledgeBase, multiplier: f64, seed: u64) -> Result<WeightedGraph, CliError> {
    let config = BackboneConfig::new(multiplier)?;
    if terms.n_terms != terms.terms.len() {
        return Err(CliError::input("term set n_terms does not match its term list"));
    }
    let matrix = network::build_similarity_matrix(terms, kb)?;
    let meta = GraphMeta::new(kb.name(), matrix.n(), config.multiplier(), seed);
    Ok(network::backbone(&matrix, &config, meta))
}

/// Lays out `graph` and records the run in its meta.
pub fn layout_stage(graph: &mut WeightedGraph, config: &LayoutConfig) -> Layout {
    let layout = layout::layout_graph(graph, config);
    graph.meta.layout = Some(LayoutMeta {
        iterations_run: layout.iterations_run,
        converged: layout.converged,
        seed: config.seed,
        iterations: config.iterations,
        k_r: config.k_r,
        k_g: config.k_g,
        delta: config.delta,
        tolerance: config.tolerance,
    });
    layout
}

pub fn render_stage(graph: &WeightedGraph, layout: Option<&Layout>, format: Format) -> Result<String, CliError> {
    let out = match format {
        Format::Json => render::to_json(graph, layout),
        Format::Graphml => render::to_graphml(graph, layout),
        Format::Dot => Ok(render::to_dot(graph)),
        Format::Svg => match layout {
            Some(l) => render::to_svg(graph, l, &SvgStyle::default()),
            None => return Err(CliError::input("svg output needs a layout JSON (run `layout` first)")),
        },
    };
    out.map_err(|e| match e {
        render::RenderError::EmptyGraph => CliError::empty(e.to_string()),
        other => CliError::input(other.to_string()),
    })
}

fn read_graph(path: &Path) -> Result<(WeightedGraph, Option<Layout>), CliError> {
    render::from_json(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

struct Reporter {
    quiet: bool,
}

impl Reporter {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

fn cmd_extract(args: &ExtractArgs, out: &Reporter) -> Result<(), CliError> {
    let kb = load_kb(&args.kb)?;
    let terms = extract_stage(&kb, &args.retrieval)?;
    write_text(&args.out, &terms.to_json())?;
    out.say(terms.summary());
    Ok(())
}

fn cmd_build(args: &BuildArgs, out: &Reporter) -> Result<(), CliError> {
    let kb = load_kb(&args.kb)?;
    let terms = TermSet::from_json(&read_text(&args.terms)?)
        .map_err(|e| CliError::input(format!("{}: {e}", args.terms.display())))?;
    let graph = build_stage(&terms, &kb, args.multiplier, args.seed)?;
    write_text(&args.out, &render_stage(&graph, None, Format::Json)?)?;
    out.say(format!("nodes={} edges={}", graph.node_count(), graph.edge_count()));
    Ok(())
}

fn cmd_layout(args: &LayoutArgs, out: &Reporter) -> Result<(), CliError> {
    let (mut graph, _) = read_graph(&args.graph)?;
    let config = args.force.config(args.seed.unwrap_or(graph.meta.seed))?;
    let layout = layout_stage(&mut graph, &config);
    write_text(&args.out, &render_stage(&graph, Some(&layout), Format::Json)?)?;
    out.say(format!("iterations_run={} converged={}", layout.iterations_run, layout.converged));
    Ok(())
}

fn cmd_render(args: &RenderArgs, out: &Reporter) -> Result<(), CliError> {
    let (graph, layout) = read_graph(&args.input)?;
    for &format in &args.format.0 {
        let path = with_extension(&args.out_prefix, format.extension());
        write_text(&path, &render_stage(&graph, layout.as_ref(), format)?)?;
        out.say(format!("wrote {}", path.display()));
    }
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs, out: &Reporter) -> Result<(), CliError> {
    let kb = load_kb(&args.kb).map_err(|e| e.in_stage("load"))?;
    let terms = extract_stage(&kb, &args.retrieval).map_err(|e| e.in_stage("extract"))?;
    write_text(&with_extension(&args.out_prefix, "terms.json"), &terms.to_json())?;
    out.say(terms.summary());

    let mut graph = build_stage(&terms, &kb, args.multiplier, args.seed).map_err(|e| e.in_stage("build"))?;
    let graph_json = render_stage(&graph, None, Format::Json).map_err(|e| e.in_stage("build"))?;
    write_text(&with_extension(&args.out_prefix, "graph.json"), &graph_json)?;
    out.say(format!("nodes={} edges={}", graph.node_count(), graph.edge_count()));

    let config = args.force.config(args.seed)?;
    let layout = layout_stage(&mut graph, &config);
    let layout_json = render_stage(&graph, Some(&layout), Format::Json).map_err(|e| e.in_stage("layout"))?;
    write_text(&with_extension(&args.out_prefix, "layout.json"), &layout_json)?;
    out.say(format!("iterations_run={} converged={}", layout.iterations_run, layout.converged));

    for &format in &args.format.0 {
        let path = with_extension(&args.out_prefix, format.extension());
        let text = render_stage(&graph, Some(&layout), format).map_err(|e| e.in_stage("render"))?;
        write_text(&path, &text)?;
        out.say(format!("wrote {}", path.display()));
    }
    Ok(())
}

fn cmd_forge(args: &ForgeArgs, out: &Reporter) -> Result<(), CliError> {
    let mut sentences = Vec::new();
    for path in &args.corpus {
        sentences.extend(forge::corpus_sentences(&read_text(path)?));
    }
    let phrases = args.phrases.as_deref().map(read_text).transpose()?.map(|t| Phrases::parse(&t));
    let counts = forge::count_cooccurrences(&sentences, args.window as usize, phrases.as_ref(), args.min_count)?;
    if counts.vocab.is_empty() {
        return Err(CliError::empty("corpus has no tokens"));
    }
    let vectors = forge::ppmi(&counts)?;
    let rows = match args.dims.min(counts.vocab.len()) {
        0 => vectors.dense_rows(),
        dims => forge::reduce(&vectors, dims, args.seed)?,
    };
    let summary = forge::write_embedding_kb(&vectors.vocab, &rows, &args.out)?;
    out.say(format!(
        "vocab={} written={} dropped_zero={} dims={}",
        counts.vocab.len(),
        summary.written,
        summary.dropped_zero,
        summary.dims
    ));
    Ok(())
}

fn cmd_stats(args: &StatsArgs, out: &Reporter) -> Result<(), CliError> {
    let (graph, _) = read_graph(&args.graph)?;
    let stats = network::graph_stats(&graph);
    if let Some(path) = &args.out {
        let mut json = serde_json::to_string_pretty(&stats).expect("stats serialize");
        json.push('\n');
        write_text(path, &json)?;
    }
    let fmt = |w: Option<f64>| w.map_or("-".to_string(), |w| format!("{w:.4}"));
    out.say(format!(
        "nodes={} edges={} mst_edges={} components={} density={:.4}",
        stats.nodes, stats.edges, stats.mst_edges, stats.components, stats.density
    ));
    out.say(format!(
        "weight min={} max={} mean={}",
        fmt(stats.min_weight),
        fmt(stats.max_weight),
        fmt(stats.mean_weight)
    ));
    let hist: Vec<String> = stats.degree_histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
    out.say(format!("degrees {}", hist.join(" ")));
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let out = Reporter { quiet: cli.quiet };
    match &cli.command {
        Command::Extract(a) => cmd_extract(a, &out),
        Command::Build(a) => cmd_build(a, &out),
        Command::Layout(a) => cmd_layout(a, &out),
        Command::Render(a) => cmd_render(a, &out),
        Command::Pipeline(a) => cmd_pipeline(a, &out),
        Command::Forge(a) => cmd_forge(a, &out),
        Command::Stats(a) => cmd_stats(a, &out),
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
