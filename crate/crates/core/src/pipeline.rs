//! Manifest-driven end-to-end runs producing a deterministic report bundle.
//!
//! The whole bundle is computed in memory and only then written, so a
//! failing dataset or algorithm never leaves partial output behind.
//! Re-running the same manifest over the same files reproduces the bundle
//! byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::community::{load_communities_from_path, CommunitySet, SetKind};
use crate::detect::{run_detector, DetectorAlgo, DetectorConfig};
use crate::error::Error;
use crate::graph::Graph;
use crate::ranking::{build_rank_table, grid_from_matrices};
use crate::report;
use crate::tv::{set_tv, TvMatrix};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BundleFormat {
    #[default]
    Csv,
    Json,
}

impl BundleFormat {
    fn extension(self) -> &'static str {
        match self {
            BundleFormat::Csv => "csv",
            BundleFormat::Json => "json",
        }
    }

    fn parse(s: &str) -> Option<BundleFormat> {
        match s {
            "csv" => Some(BundleFormat::Csv),
            "json" => Some(BundleFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub label: String,
    pub graph: PathBuf,
}

/// Where one algorithm's communities come from: per-dataset files, or a
/// bundled detector run on each dataset's graph.
#[derive(Debug, Clone)]
pub enum AlgorithmSource {
    Files(BTreeMap<String, PathBuf>),
    Detector(DetectorConfig),
}

#[derive(Debug, Clone)]
pub struct AlgorithmSpec {
    pub label: String,
    pub source: AlgorithmSource,
}

/// A validated run description. Relative paths in the manifest file are
/// resolved against the manifest's directory, so a run means the same thing
/// from any working directory.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub output_dir: PathBuf,
    pub format: BundleFormat,
    pub datasets: Vec<DatasetSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    output_dir: String,
    #[serde(default)]
    format: Option<String>,
    datasets: Vec<DatasetEntry>,
    algorithms: Vec<AlgorithmEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetEntry {
    label: String,
    graph: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgorithmEntry {
    label: String,
    #[serde(default)]
    detector: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    max_iterations: Option<usize>,
    #[serde(default)]
    communities: Option<BTreeMap<String, String>>,
}

fn manifest_error(detail: impl Into<String>) -> Error {
    Error::Manifest {
        detail: detail.into(),
    }
}

impl RunManifest {
    /// Loads a TOML (`.toml`) or JSON (`.json`) manifest.
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<RunManifest> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).with_path(path))?;
        let parsed: ManifestFile = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(|e| manifest_error(e.to_string()))?,
            Some("json") => {
                serde_json::from_str(&text).map_err(|e| manifest_error(e.to_string()))?
            }
            other => {
                return Err(manifest_error(format!(
                    "unsupported manifest extension {:?} (expected .toml or .json)",
                    other.unwrap_or("")
                )))
            }
        };
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        RunManifest::from_parsed(parsed, base)
    }

    fn from_parsed(parsed: ManifestFile, base: &Path) -> Result<RunManifest> {
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_owned()
            } else {
                base.join(p)
            }
        };
        let format = match parsed.format.as_deref() {
            None => BundleFormat::default(),
            Some(s) => BundleFormat::parse(s)
                .ok_or_else(|| manifest_error(format!("unknown format '{s}' (csv or json)")))?,
        };
        let datasets = parsed
            .datasets
            .iter()
            .map(|d| DatasetSpec {
                label: d.label.clone(),
                graph: resolve(&d.graph),
            })
            .collect();
        let mut algorithms = Vec::with_capacity(parsed.algorithms.len());
        for a in &parsed.algorithms {
            let source = match (&a.detector, &a.communities) {
                (Some(_), Some(_)) => {
                    return Err(manifest_error(format!(
                        "algorithm '{}' sets both detector and communities",
                        a.label
                    )))
                }
                (None, None) => {
                    return Err(manifest_error(format!(
                        "algorithm '{}' needs either detector or communities",
                        a.label
                    )))
                }
                (Some(name), None) => {
                    let algo = DetectorAlgo::parse(name).ok_or_else(|| {
                        manifest_error(format!(
                            "algorithm '{}': unknown detector '{}'",
                            a.label, name
                        ))
                    })?;
                    let defaults = DetectorConfig::default();
                    AlgorithmSource::Detector(DetectorConfig {
                        algorithm: algo,
                        seed: a.seed.unwrap_or(defaults.seed),
                        max_iterations: a.max_iterations.unwrap_or(defaults.max_iterations),
                    })
                }
                (None, Some(map)) => {
                    if a.seed.is_some() || a.max_iterations.is_some() {
                        return Err(manifest_error(format!(
                            "algorithm '{}': seed/max_iterations only apply to detectors",
                            a.label
                        )));
                    }
                    AlgorithmSource::Files(
                        map.iter().map(|(k, v)| (k.clone(), resolve(v))).collect(),
                    )
                }
            };
            algorithms.push(AlgorithmSpec {
                label: a.label.clone(),
                source,
            });
        }
        Ok(RunManifest {
            output_dir: resolve(&parsed.output_dir),
            format,
            datasets,
            algorithms,
        })
    }

    /// Structural checks plus existence of every referenced path.
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::NoDatasets);
        }
        if self.algorithms.len() < 2 {
            return Err(Error::InsufficientAlgorithms {
                got: self.algorithms.len(),
            });
        }
        for (i, d) in self.datasets.iter().enumerate() {
            report::check_label(&d.label)?;
            if self.datasets[..i].iter().any(|o| o.label == d.label) {
                return Err(Error::DuplicateLabel {
                    kind: "dataset",
                    label: d.label.clone(),
                });
            }
            if !d.graph.exists() {
                return Err(Error::PathMissing {
                    path: d.graph.clone(),
                });
            }
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            report::check_label(&a.label)?;
            if self.algorithms[..i].iter().any(|o| o.label == a.label) {
                return Err(Error::DuplicateLabel {
                    kind: "algorithm",
                    label: a.label.clone(),
                });
            }
            if let AlgorithmSource::Files(map) = &a.source {
                for dataset in map.keys() {
                    if !self.datasets.iter().any(|d| &d.label == dataset) {
                        return Err(manifest_error(format!(
                            "algorithm '{}' references unknown dataset '{}'",
                            a.label, dataset
                        )));
                    }
                }
                for d in &self.datasets {
                    let path = map.get(&d.label).ok_or_else(|| Error::MissingPartition {
                        algorithm: a.label.clone(),
                        dataset: d.label.clone(),
                    })?;
                    if !path.exists() {
                        return Err(Error::PathMissing { path: path.clone() });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A fully computed report: relative file name → content. Nothing touches
/// the filesystem until [`ReportBundle::write_to`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub files: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            fs::write(dir.join(name), content)?;
        }
        Ok(())
    }
}

/// Caps the global worker pool driving per-dataset parallelism. Must run
/// before the first parallel region; returns false once the pool already
/// exists (the cap then has no effect).
pub fn cap_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

struct DatasetRun {
    label: String,
    matrix: TvMatrix,
    diagnostics: Vec<String>,
}

fn run_dataset(manifest: &RunManifest, spec: &DatasetSpec) -> Result<DatasetRun> {
    let g = Graph::from_path(&spec.graph).map_err(|e| e.in_context(&spec.label, None))?;
    let mut diagnostics = Vec::new();
    let w = g.warnings();
    diagnostics.push(format!(
        "dataset {}: {} self_loops_dropped={} duplicate_edges_dropped={}",
        spec.label,
        g.stats(),
        w.self_loops_dropped,
        w.duplicate_edges_dropped
    ));

    let mut sets: Vec<CommunitySet> = Vec::with_capacity(manifest.algorithms.len());
    for a in &manifest.algorithms {
        let mut cs = match &a.source {
            AlgorithmSource::Files(map) => {
                let path = &map[&spec.label];
                load_communities_from_path(path, &g, &a.label)
                    .map_err(|e| e.in_context(&spec.label, Some(&a.label)))?
            }
            AlgorithmSource::Detector(cfg) => {
                let mut cs = run_detector(&g, cfg);
                cs.set_algorithm(&a.label);
                cs
            }
        };
        cs.set_dataset(&spec.label);
        let d = cs.validate_against(&g);
        let kind = match cs.kind() {
            SetKind::Partition => "partition",
            SetKind::Cover => "cover",
        };
        diagnostics.push(format!(
            "dataset {} algorithm {}: kind={} communities={} singletons={} uncovered={} overlapping={} empty_lines_skipped={}",
            spec.label,
            a.label,
            kind,
            cs.len(),
            d.singleton_count,
            d.uncovered.len(),
            d.overlapping.len(),
            cs.warnings().empty_lines_skipped
        ));
        sets.push(cs);
    }

    let n = sets.len();
    let mut values = vec![vec![0.0; n]; n];
    for p in 0..n {
        for alt in 0..n {
            if p == alt {
                continue;
            }
            let s = set_tv(&g, &sets[p], &sets[alt]);
            values[p][alt] = s.value;
            diagnostics.push(format!(
                "dataset {} comparison {} vs {}: pairs={} skipped={}{}",
                spec.label,
                sets[p].algorithm(),
                sets[alt].algorithm(),
                s.pair_count(),
                s.assignment.skipped.len(),
                if s.empty_delta() { " empty_delta" } else { "" }
            ));
        }
    }
    Ok(DatasetRun {
        label: spec.label.clone(),
        matrix: TvMatrix {
            algorithms: sets.iter().map(|s| s.algorithm().to_owned()).collect(),
            values,
        },
        diagnostics,
    })
}

/// Runs the whole manifest: per dataset (in parallel) load the graph, obtain
/// every algorithm's communities, and score all ordered comparisons; then
/// aggregate the ATV grid and both rankings. Output does not depend on
/// scheduling.
pub fn run_pipeline(manifest: &RunManifest) -> Result<ReportBundle> {
    manifest.validate()?;
    let runs: Vec<DatasetRun> = manifest
        .datasets
        .par_iter()
        .map(|spec| run_dataset(manifest, spec))
        .collect::<Result<Vec<_>>>()?;

    let per_dataset: Vec<(String, TvMatrix)> = runs
        .iter()
        .map(|r| (r.label.clone(), r.matrix.clone()))
        .collect();
    let grid = grid_from_matrices(&per_dataset)?;
    let table = build_rank_table(grid)?;

    let ext = manifest.format.extension();
    let mut files = Vec::new();
    for run in &runs {
        let content = match manifest.format {
            BundleFormat::Csv => report::heatmap_csv(&run.matrix, false),
            BundleFormat::Json => {
                pretty_json(&report::tv_matrix_json(&run.matrix, false))
            }
        };
        files.push((format!("heatmap_{}.{ext}", run.label), content));
    }
    match manifest.format {
        BundleFormat::Csv => {
            files.push(("atv.csv".to_owned(), report::atv_grid_csv(&table.grid, false)));
            files.push(("dtv.csv".to_owned(), report::dtv_csv(&table)));
            files.push(("otv.csv".to_owned(), report::otv_csv(&table, false)));
        }
        BundleFormat::Json => {
            let rank = report::rank_json(&table, false);
            files.push((
                "atv.json".to_owned(),
                pretty_json(&serde_json::json!({
                    "algorithms": rank.algorithms,
                    "datasets": rank.datasets,
                    "values": rank.atv,
                })),
            ));
            files.push((
                "dtv.json".to_owned(),
                pretty_json(&serde_json::json!({
                    "algorithms": rank.algorithms,
                    "datasets": rank.datasets,
                    "ranks": rank.dtv,
                })),
            ));
            files.push((
                "otv.json".to_owned(),
                pretty_json(&serde_json::json!({
                    "algorithms": rank.algorithms,
                    "mean_atv": rank.otv_scores,
                    "ranks": rank.otv_ranks,
                })),
            ));
        }
    }

    let mut log = format!(
        "manifest datasets={} algorithms={} format={}\n",
        manifest.datasets.len(),
        manifest.algorithms.len(),
        ext
    );
    for run in &runs {
        for line in &run.diagnostics {
            log.push_str(line);
            log.push('\n');
        }
    }
    files.push(("diagnostics.txt".to_owned(), log));

    Ok(ReportBundle { files })
}

fn pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    fn sample_tree(dir: &Path) -> PathBuf {
        write_file(dir, "twin.edges", "1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n");
        write_file(dir, "split.cmty", "1 2 3\n4 5 6\n");
        write_file(dir, "lumped.cmty", "1 2 3 4 5 6\n");
        write_file(
            dir,
            "run.toml",
            r#"
output_dir = "out"

[[datasets]]
label = "twin"
graph = "twin.edges"

[[algorithms]]
label = "split"
[algorithms.communities]
twin = "split.cmty"

[[algorithms]]
label = "lumped"
[algorithms.communities]
twin = "lumped.cmty"
"#,
        )
    }

    #[test]
    fn manifest_loads_and_resolves_relative_paths() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest_path = sample_tree(tmp.path());
        let m = RunManifest::from_path(&manifest_path).unwrap();
        assert_eq!(m.datasets[0].graph, tmp.path().join("twin.edges"));
        assert_eq!(m.output_dir, tmp.path().join("out"));
        assert_eq!(m.format, BundleFormat::Csv);
        m.validate().unwrap();
    }

    #[test]
    fn manifest_rejects_missing_paths() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest_path = sample_tree(tmp.path());
        fs::remove_file(tmp.path().join("split.cmty")).unwrap();
        let m = RunManifest::from_path(&manifest_path).unwrap();
        assert!(matches!(m.validate(), Err(Error::PathMissing { .. })));
    }

    #[test]
    fn manifest_rejects_duplicate_labels() {
        let tmp = tempfile::tempdir().unwrap();
        write_file(tmp.path(), "g.edges", "1 2\n");
        write_file(tmp.path(), "c.cmty", "1 2\n");
        let path = write_file(
            tmp.path(),
            "dup.toml",
            r#"
output_dir = "out"
[[datasets]]
label = "d"
graph = "g.edges"
[[algorithms]]
label = "same"
[algorithms.communities]
d = "c.cmty"
[[algorithms]]
label = "same"
[algorithms.communities]
d = "c.cmty"
"#,
        );
        let m = RunManifest::from_path(&path).unwrap();
        assert!(matches!(
            m.validate(),
            Err(Error::DuplicateLabel {
                kind: "algorithm",
                ..
            })
        ));
    }

    #[test]
    fn manifest_rejects_detector_with_files() {
        let tmp = tempfile::tempdir().unwrap();
        write_file(tmp.path(), "g.edges", "1 2\n");
        write_file(tmp.path(), "c.cmty", "1 2\n");
        let path = write_file(
            tmp.path(),
            "bad.toml",
            r#"
output_dir = "out"
[[datasets]]
label = "d"
graph = "g.edges"
[[algorithms]]
label = "x"
detector = "lpa"
[algorithms.communities]
d = "c.cmty"
[[algorithms]]
label = "y"
detector = "lpa"
"#,
        );
        assert!(matches!(
            RunManifest::from_path(&path),
            Err(Error::Manifest { .. })
        ));
    }

    #[test]
    fn manifest_requires_partitions_for_every_dataset() {
        let tmp = tempfile::tempdir().unwrap();
        write_file(tmp.path(), "g1.edges", "1 2\n");
        write_file(tmp.path(), "g2.edges", "1 2\n");
        write_file(tmp.path(), "c.cmty", "1 2\n");
        let path = write_file(
            tmp.path(),
            "hole.toml",
            r#"
output_dir = "out"
[[datasets]]
label = "d1"
graph = "g1.edges"
[[datasets]]
label = "d2"
graph = "g2.edges"
[[algorithms]]
label = "x"
[algorithms.communities]
d1 = "c.cmty"
[[algorithms]]
label = "y"
detector = "lpa"
"#,
        );
        let m = RunManifest::from_path(&path).unwrap();
        match m.validate().unwrap_err() {
            Error::MissingPartition { algorithm, dataset } => {
                assert_eq!(algorithm, "x");
                assert_eq!(dataset, "d2");
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn pipeline_produces_expected_files() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest_path = sample_tree(tmp.path());
        let m = RunManifest::from_path(&manifest_path).unwrap();
        let bundle = run_pipeline(&m).unwrap();
        let names: Vec<&str> = bundle.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            ["heatmap_twin.csv", "atv.csv", "dtv.csv", "otv.csv", "diagnostics.txt"]
        );
        let heatmap = &bundle.files[0].1;
        let lines: Vec<&str> = heatmap.lines().collect();
        assert_eq!(lines[0], ",split,lumped");
        assert!(lines[1].starts_with("split,0.000,"));
    }

    #[test]
    fn pipeline_replay_is_byte_identical() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest_path = sample_tree(tmp.path());
        let m = RunManifest::from_path(&manifest_path).unwrap();
        let a = run_pipeline(&m).unwrap();
        let b = run_pipeline(&m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pipeline_with_detectors_and_json_format() {
        let tmp = tempfile::tempdir().unwrap();
        write_file(tmp.path(), "twin.edges", "1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n");
        write_file(tmp.path(), "split.cmty", "1 2 3\n4 5 6\n");
        let path = write_file(
            tmp.path(),
            "det.toml",
            r#"
output_dir = "out"
format = "json"
[[datasets]]
label = "twin"
graph = "twin.edges"
[[algorithms]]
label = "lpa1"
detector = "lpa"
seed = 1
[[algorithms]]
label = "split"
[algorithms.communities]
twin = "split.cmty"
"#,
        );
        let m = RunManifest::from_path(&path).unwrap();
        let bundle = run_pipeline(&m).unwrap();
        let names: Vec<&str> = bundle.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            ["heatmap_twin.json", "atv.json", "dtv.json", "otv.json", "diagnostics.txt"]
        );
        for (name, content) in &bundle.files {
            if name.ends_with(".json") {
                serde_json::from_str::<serde_json::Value>(content).unwrap();
            }
        }
        // LPA finds the twin triangles for any seed, so both algorithms agree
        // and every score is zero.
        let atv: serde_json::Value =
            serde_json::from_str(&bundle.files[1].1).unwrap();
        assert_eq!(atv["values"][0][0], 0.0);
        assert_eq!(atv["values"][1][0], 0.0);
    }

    #[test]
    fn bundle_writes_all_files() {
        let tmp = tempfile::tempdir().unwrap();
        let manifest_path = sample_tree(tmp.path());
        let m = RunManifest::from_path(&manifest_path).unwrap();
        let bundle = run_pipeline(&m).unwrap();
        bundle.write_to(&m.output_dir).unwrap();
        for (name, content) in &bundle.files {
            let on_disk = fs::read_to_string(m.output_dir.join(name)).unwrap();
            assert_eq!(&on_disk, content);
        }
    }

    #[test]
    fn load_failures_name_dataset_and_algorithm() {
        let tmp = tempfile::tempdir().unwrap();
        write_file(tmp.path(), "twin.edges", "1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n");
        write_file(tmp.path(), "bad.cmty", "1 2 99\n");
        write_file(tmp.path(), "ok.cmty", "1 2 3\n4 5 6\n");
        let path = write_file(
            tmp.path(),
            "bad.toml",
            r#"
output_dir = "out"
[[datasets]]
label = "twin"
graph = "twin.edges"
[[algorithms]]
label = "broken"
[algorithms.communities]
twin = "bad.cmty"
[[algorithms]]
label = "fine"
[algorithms.communities]
twin = "ok.cmty"
"#,
        );
        let m = RunManifest::from_path(&path).unwrap();
        let err = run_pipeline(&m).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("twin"), "{msg}");
        assert!(msg.contains("broken"), "{msg}");
        assert!(msg.contains("99"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }
}
