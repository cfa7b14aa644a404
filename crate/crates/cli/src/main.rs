//! `commdiff`: compare community structures, rank detection algorithms, and
//! replay whole evaluation manifests from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commdiff_core::community::{load_communities_from_path, CommunitySet, SetKind};
use commdiff_core::detect::{run_detector, DetectorAlgo, DetectorConfig};
use commdiff_core::graph::Graph;
use commdiff_core::metrics::{conductance_with, isolability, modularity, ConductanceAggregation};
use commdiff_core::pipeline::{cap_threads, run_pipeline, RunManifest};
use commdiff_core::ranking::{build_rank_table, grid_from_matrices};
use commdiff_core::report::{
    atv_grid_csv, check_label, compare_json, dtv_csv, heatmap_csv, import_atv_grid, metrics_csv,
    otv_csv, rank_json, MetricRow,
};
use commdiff_core::tv::{set_tv, tv_matrix};
use commdiff_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "commdiff",
    version,
    about = "Compare community structures over one graph and rank detection algorithms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Directed comparison of two community files over one graph, as JSON.
    Compare(CompareArgs),
    /// All-pairs comparison matrix for several algorithms, as CSV.
    Heatmap(HeatmapArgs),
    /// Per-dataset and overall rankings from a score grid or computed live.
    Rank(RankArgs),
    /// Classical quality metrics (isolability, modularity, conductance).
    Metrics(MetricsArgs),
    /// Run a built-in detector and emit its communities.
    Detect(DetectArgs),
    /// Execute a whole manifest and write the report bundle.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct CompareArgs {
    /// Edge-list file for the underlying graph.
    #[arg(long)]
    graph: PathBuf,
    /// Community file whose structure is being evaluated.
    #[arg(long)]
    primary: PathBuf,
    /// Community file providing the reference structure.
    #[arg(long)]
    alt: PathBuf,
    /// Also write the pair assignment (indices, overlaps, analytical node
    /// tokens) to this path as JSON.
    #[arg(long, value_name = "PATH")]
    dump_pairs: Option<PathBuf>,
    /// Emit full-precision values instead of 3-decimal rounding.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Edge-list file for the underlying graph.
    #[arg(long)]
    graph: PathBuf,
    /// Community file per algorithm, repeated: --communities label=path
    #[arg(long = "communities", value_name = "LABEL=PATH", value_parser = parse_labeled_path)]
    communities: Vec<(String, PathBuf)>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Emit full-precision values instead of 3-decimal rounding.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct RankArgs {
    /// Ready-made score grid CSV (rows = algorithms, columns = datasets).
    #[arg(long, value_name = "PATH")]
    atv_grid: Option<PathBuf>,
    /// Edge-list file, for computing the grid from community files instead.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Community file per algorithm, repeated: --communities label=path
    #[arg(long = "communities", value_name = "LABEL=PATH", value_parser = parse_labeled_path)]
    communities: Vec<(String, PathBuf)>,
    /// Dataset label used when computing from community files.
    #[arg(long, default_value = "dataset")]
    dataset: String,
    /// Additionally write atv.csv, dtv.csv, and otv.csv into this directory.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Emit full-precision values instead of 3-decimal rounding.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct MetricsArgs {
    /// Edge-list file for the underlying graph.
    #[arg(long)]
    graph: PathBuf,
    /// Community file per algorithm, repeated: --communities label=path
    #[arg(long = "communities", value_name = "LABEL=PATH", value_parser = parse_labeled_path)]
    communities: Vec<(String, PathBuf)>,
    /// Dataset label recorded in the output rows.
    #[arg(long, default_value = "dataset")]
    dataset: String,
    /// How per-community conductance is aggregated.
    #[arg(long, value_name = "mean|max", default_value = "mean", value_parser = parse_aggregation)]
    conductance: ConductanceAggregation,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Emit full-precision values instead of 3-decimal rounding.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct DetectArgs {
    /// Edge-list file for the underlying graph.
    #[arg(long)]
    graph: PathBuf,
    /// Detector to run: lpa or greedy_modularity (alias gm).
    #[arg(long, value_parser = parse_algo)]
    algo: DetectorAlgo,
    /// Seed for the detector's random choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep limit for the label propagation detector.
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Write the communities here (one per line) instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Manifest file (TOML or JSON by extension).
    #[arg(long)]
    manifest: PathBuf,
    /// Write the bundle here instead of the manifest's output_dir.
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
}

fn parse_labeled_path(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => {
            Ok((label.to_owned(), PathBuf::from(path)))
        }
        _ => Err(format!("expected label=path, got '{s}'")),
    }
}

fn parse_algo(s: &str) -> std::result::Result<DetectorAlgo, String> {
    DetectorAlgo::parse(s).ok_or_else(|| format!("unknown detector '{s}' (expected lpa or greedy_modularity)"))
}

fn parse_aggregation(s: &str) -> std::result::Result<ConductanceAggregation, String> {
    match s {
        "mean" => Ok(ConductanceAggregation::Mean),
        "max" => Ok(ConductanceAggregation::Max),
        _ => Err(format!("unknown aggregation '{s}' (expected mean or max)")),
    }
}

/// Loads the labeled community files against one graph, enforcing label
/// hygiene and uniqueness up front.
fn load_labeled_sets(g: &Graph, entries: &[(String, PathBuf)]) -> Result<Vec<CommunitySet>> {
    let mut sets = Vec::with_capacity(entries.len());
    for (label, path) in entries {
        check_label(label)?;
        if entries.iter().filter(|(l, _)| l == label).count() > 1 {
            return Err(Error::DuplicateLabel {
                kind: "algorithm",
                label: label.clone(),
            });
        }
        sets.push(load_communities_from_path(path, g, label)?);
    }
    Ok(sets)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let g = Graph::from_path(&args.graph)?;
    let primary = load_communities_from_path(&args.primary, &g, "primary")?;
    let alt = load_communities_from_path(&args.alt, &g, "alt")?;
    let s = set_tv(&g, &primary, &alt);
    if let Some(path) = &args.dump_pairs {
        let pairs: Vec<_> = s
            .assignment
            .pairs
            .iter()
            .map(|p| {
                serde_json::json!({
                    "primary_index": p.primary_index,
                    "alt_index": p.alt_index,
                    "overlap": p.overlap,
                    "analytical_nodes": p
                        .analytical_nodes
                        .iter()
                        .map(|&v| g.token(v))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "pairs": pairs,
            "skipped_primary_indices": s.assignment.skipped,
        });
        fs::write(path, pretty(&doc))?;
    }
    print!("{}", pretty(&compare_json(&g, &s, args.full_precision)));
    Ok(())
}

fn cmd_heatmap(args: &HeatmapArgs) -> Result<()> {
    let g = Graph::from_path(&args.graph)?;
    let sets = load_labeled_sets(&g, &args.communities)?;
    let m = tv_matrix(&g, &sets)?;
    emit(&heatmap_csv(&m, args.full_precision), args.out.as_ref())
}

fn cmd_rank(args: &RankArgs) -> Result<()> {
    let table = match (&args.atv_grid, &args.graph) {
        (Some(grid_path), None) => {
            if !args.communities.is_empty() {
                return Err(Error::Manifest {
                    detail: "--communities requires --graph, not --atv-grid".to_owned(),
                });
            }
            let text = fs::read_to_string(grid_path)
                .map_err(|e| Error::from(e).with_path(grid_path))?;
            build_rank_table(import_atv_grid(&text)?)?
        }
        (None, Some(graph_path)) => {
            let g = Graph::from_path(graph_path)?;
            check_label(&args.dataset)?;
            let sets = load_labeled_sets(&g, &args.communities)?;
            let m = tv_matrix(&g, &sets)?;
            let grid = grid_from_matrices(&[(args.dataset.clone(), m)])?;
            build_rank_table(grid)?
        }
        _ => {
            return Err(Error::Manifest {
                detail: "pass exactly one of --atv-grid or --graph with --communities".to_owned(),
            });
        }
    };
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("atv.csv"), atv_grid_csv(&table.grid, args.full_precision))?;
        fs::write(dir.join("dtv.csv"), dtv_csv(&table))?;
        fs::write(dir.join("otv.csv"), otv_csv(&table, args.full_precision))?;
    }
    print!("{}", pretty(&rank_json(&table, args.full_precision)));
    Ok(())
}

fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let g = Graph::from_path(&args.graph)?;
    check_label(&args.dataset)?;
    let sets = load_labeled_sets(&g, &args.communities)?;
    let mut rows = Vec::with_capacity(sets.len());
    for cs in &sets {
        let q = match cs.kind() {
            SetKind::Partition => Some(modularity(&g, cs)?),
            SetKind::Cover => None,
        };
        rows.push(MetricRow {
            algorithm: cs.algorithm().to_owned(),
            dataset: args.dataset.clone(),
            isolability: isolability(&g, cs),
            modularity: q,
            conductance: conductance_with(&g, cs, args.conductance),
        });
    }
    let csv = metrics_csv(&rows, args.conductance.name(), args.full_precision);
    emit(&csv, args.out.as_ref())
}

fn cmd_detect(args: &DetectArgs) -> Result<()> {
    let g = Graph::from_path(&args.graph)?;
    let cfg = DetectorConfig {
        algorithm: args.algo,
        seed: args.seed,
        max_iterations: args.max_iterations,
    };
    let cs = run_detector(&g, &cfg);
    emit(&cs.to_format_a(&g), args.out.as_ref())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    let manifest = RunManifest::from_path(&args.manifest)?;
    let bundle = run_pipeline(&manifest)?;
    let out_dir = args.output_dir.as_ref().unwrap_or(&manifest.output_dir);
    bundle.write_to(out_dir)?;
    println!("wrote {} files to {}", bundle.files.len(), out_dir.display());
    for (name, _) in &bundle.files {
        println!("  {name}");
    }
    Ok(())
}

fn apply_thread_cap() {
    if let Ok(raw) = std::env::var("COMMDIFF_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                cap_threads(n);
            }
            _ => eprintln!("warning: ignoring invalid COMMDIFF_THREADS value '{raw}'"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not failures; everything else is argument
            // validation.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    apply_thread_cap();
    let result = match &cli.command {
        Command::Compare(args) => cmd_compare(args),
        Command::Heatmap(args) => cmd_heatmap(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
