//! Command implementations. Each returns the text for stdout (empty when the
//! primary output went to `--out`) plus any warnings for stderr.

use std::path::{Path, PathBuf};

use serde::Serialize;

use feedscope_core::analysis::{compare_catalogs, rank_and_filter, LoopProfile};
use feedscope_core::discovery::{
    discover, enumerate_loops, strongest_path_pass, DiscoverConfig, Discovery, FoundAt, LoopCatalog, Method, PassStats,
    Provenance,
};
use feedscope_core::scoring::score_all;
use feedscope_core::sim::{simulate, RunSpec};
use feedscope_core::{LinkScoreSeries, Model, RunResult};

use crate::edges::{parse_edges, EdgeList};
use crate::formats::{self, CatalogJson, RankedLoopJson, ReportJson};
use crate::synth::{generate, SyntheticSpec};
use crate::{fixtures, load_model_file, read_file, CliError};

#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Sends `text` to `out` if given, otherwise to stdout.
fn emit(text: String, out: Option<&Path>, warnings: Vec<String>) -> Result<Output, CliError> {
    let stdout = match out {
        Some(path) => {
            write_file(path, &text)?;
            String::new()
        }
        None => text,
    };
    Ok(Output { stdout, warnings })
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Exhaustive => "exhaustive",
        Method::StrongestPath => "strongest-path",
    }
}

fn cap_exceeded(cap: usize, found: usize) -> CliError {
    CliError::Runtime(format!(
        "cap exceeded: exhaustive enumeration found {found} loops and stopped at the cap of {cap}"
    ))
}

#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub dt: Option<f64>,
}

impl RunOverrides {
    pub fn apply(&self, base: RunSpec) -> Result<RunSpec, CliError> {
        let spec = RunSpec::new(
            self.start.unwrap_or(base.start),
            self.stop.unwrap_or(base.stop),
            self.dt.unwrap_or(base.dt),
        )
        .and_then(|s| s.steps().map(|_| s))
        .map_err(|e| CliError::Usage(format!("invalid run spec: {e}")))?;
        Ok(spec)
    }
}

fn run_model(path: &Path, model: &Model, spec: &RunSpec) -> Result<RunResult, CliError> {
    simulate(model, spec).map_err(|e| CliError::Runtime(format!("{}:{e}", path.display())))
}

pub struct SimulateOpts {
    pub model: PathBuf,
    pub run: RunOverrides,
    pub out: Option<PathBuf>,
}

pub fn simulate_cmd(opts: &SimulateOpts) -> Result<Output, CliError> {
    let loaded = load_model_file(&opts.model)?;
    let spec = opts.run.apply(loaded.model.run_spec)?;
    let run = run_model(&opts.model, &loaded.model, &spec)?;
    emit(formats::run_csv(&run), opts.out.as_deref(), loaded.warnings)
}

#[derive(Clone, Debug)]
pub struct AnalyzeSettings {
    pub method: Method,
    pub cap: usize,
    pub stride: usize,
    pub threshold: f64,
    pub top: Option<usize>,
}

impl Default for AnalyzeSettings {
    fn default() -> Self {
        AnalyzeSettings {
            method: Method::Auto,
            cap: 1000,
            stride: 1,
            threshold: 0.001,
            top: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeMetadata {
    pub model: String,
    pub method: &'static str,
    pub provenance: &'static str,
    pub cap: usize,
    pub cap_exceeded: bool,
    pub stride: usize,
    pub passes: usize,
    pub threshold: f64,
    pub top: Option<usize>,
    pub steps: usize,
    pub loops_found: usize,
    pub loops_retained: usize,
    /// What relative scores are normalized over.
    pub relative_to: &'static str,
    pub search_visits: u64,
    pub search_expansions: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeJson {
    pub metadata: AnalyzeMetadata,
    pub catalog: CatalogJson,
    pub ranking: Vec<RankedLoopJson>,
}

pub struct Analysis {
    pub run: RunResult,
    pub series: LinkScoreSeries,
    pub discovery: Discovery,
    pub ranking: Vec<LoopProfile>,
    pub json: AnalyzeJson,
}

/// Simulate, score, discover and rank.
pub fn analyze_model(path: &Path, model: &Model, settings: &AnalyzeSettings) -> Result<Analysis, CliError> {
    let run = run_model(path, model, &model.run_spec)?;
    let series = score_all(model, &run);
    let cfg = DiscoverConfig {
        cap: settings.cap,
        stride: settings.stride,
        method: settings.method,
        ..DiscoverConfig::default()
    };
    let discovery = discover(&series, &cfg);
    if settings.method == Method::Exhaustive && discovery.cap_exceeded {
        return Err(cap_exceeded(settings.cap, discovery.catalog.len()));
    }
    let ranking = rank_and_filter(&discovery.catalog, &series, settings.threshold, settings.top)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let json = AnalyzeJson {
        metadata: AnalyzeMetadata {
            model: path.display().to_string(),
            method: method_name(settings.method),
            provenance: discovery.catalog.provenance.as_str(),
            cap: settings.cap,
            cap_exceeded: discovery.cap_exceeded,
            stride: settings.stride,
            passes: discovery.passes,
            threshold: settings.threshold,
            top: settings.top,
            steps: run.steps(),
            loops_found: discovery.catalog.len(),
            loops_retained: ranking.len(),
            relative_to: "discovered loops",
            search_visits: discovery.stats.visits,
            search_expansions: discovery.stats.expansions,
        },
        catalog: CatalogJson::from(&discovery.catalog),
        ranking: formats::ranking_json(&ranking),
    };
    Ok(Analysis {
        run,
        series,
        discovery,
        ranking,
        json,
    })
}

pub struct AnalyzeOpts {
    pub model: PathBuf,
    pub settings: AnalyzeSettings,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub scores: Option<PathBuf>,
}

pub fn analyze_cmd(opts: &AnalyzeOpts) -> Result<Output, CliError> {
    let loaded = load_model_file(&opts.model)?;
    let a = analyze_model(&opts.model, &loaded.model, &opts.settings)?;
    if let Some(path) = &opts.csv {
        write_file(path, &formats::analysis_csv(&a.run.times, &a.ranking))?;
    }
    if let Some(path) = &opts.catalog {
        write_file(path, &formats::catalog_json(&a.discovery.catalog))?;
    }
    if let Some(path) = &opts.scores {
        write_file(path, &formats::link_scores_csv(&a.series))?;
    }
    emit(formats::to_json(&a.json), opts.out.as_deref(), loaded.warnings)
}

pub struct GraphLoopsOpts {
    pub edges: PathBuf,
    /// Search start node; all nodes when `None`.
    pub start: Option<String>,
    pub method: Method,
    pub cap: usize,
    pub out: Option<PathBuf>,
}

/// Loops of a static weighted graph.
pub fn graph_loops(graph: &EdgeList, start: Option<&str>, method: Method, cap: usize) -> Result<LoopCatalog, CliError> {
    if let Some(s) = start {
        if !graph.nodes.iter().any(|n| n == s) {
            return Err(CliError::Usage(format!("--start {s}: no such node")));
        }
    }
    let g = graph.weighted(start);
    if method != Method::StrongestPath {
        let catalog = enumerate_loops(&g, cap);
        if !catalog.overflow {
            return Ok(catalog);
        }
        if method == Method::Exhaustive {
            return Err(cap_exceeded(cap, catalog.len()));
        }
    }
    let mut registry = LoopCatalog::new(Provenance::StrongestPath);
    strongest_path_pass(&g, &mut registry, FoundAt::Static, &mut PassStats::default());
    Ok(registry)
}

pub fn graph_loops_cmd(opts: &GraphLoopsOpts) -> Result<Output, CliError> {
    let graph = parse_edges(&opts.edges, &read_file(&opts.edges)?)?;
    let catalog = graph_loops(&graph, opts.start.as_deref(), opts.method, opts.cap)?;
    emit(formats::catalog_json(&catalog), opts.out.as_deref(), Vec::new())
}

pub struct GenOpts {
    pub spec: SyntheticSpec,
    pub out: Option<PathBuf>,
}

pub fn gen_synthetic_cmd(opts: &GenOpts) -> Result<Output, CliError> {
    opts.spec.check().map_err(CliError::Usage)?;
    emit(generate(&opts.spec), opts.out.as_deref(), Vec::new())
}

pub struct CompareOpts {
    pub reference: PathBuf,
    pub candidate: PathBuf,
    /// A model, or a `.csv` edge list for static graphs.
    pub model: PathBuf,
    pub top: usize,
    pub near_miss: f64,
    pub out: Option<PathBuf>,
}

fn load_catalog(path: &Path) -> Result<LoopCatalog, CliError> {
    formats::parse_catalog_json(&read_file(path)?).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn compare_cmd(opts: &CompareOpts) -> Result<Output, CliError> {
    let reference = load_catalog(&opts.reference)?;
    let candidate = load_catalog(&opts.candidate)?;
    let (series, warnings) = if opts.model.extension().is_some_and(|e| e == "csv") {
        let graph = parse_edges(&opts.model, &read_file(&opts.model)?)?;
        (LinkScoreSeries::constant(graph.digraph(), &graph.weights()), Vec::new())
    } else {
        let loaded = load_model_file(&opts.model)?;
        let run = run_model(&opts.model, &loaded.model, &loaded.model.run_spec)?;
        (score_all(&loaded.model, &run), loaded.warnings)
    };
    let report = compare_catalogs(&reference, &candidate, &series, opts.top, opts.near_miss)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", opts.model.display())))?;
    emit(
        formats::to_json(&ReportJson::from(&report)),
        opts.out.as_deref(),
        warnings,
    )
}

pub fn fixture_cmd(name: Option<&str>) -> Result<Output, CliError> {
    let stdout = match name {
        Some(name) => fixtures::find(name)
            .ok_or_else(|| CliError::Usage(format!("unknown fixture {name}")))?
            .source
            .to_string(),
        None => fixtures::ALL
            .iter()
            .map(|f| {
                let summary = f.notes().lines().next().unwrap_or_default().to_string();
                format!("{:<20} {}\n", f.name, summary)
            })
            .collect(),
    };
    Ok(Output {
        stdout,
        warnings: Vec::new(),
    })
}
