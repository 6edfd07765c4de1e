//! Persistence: family manifests (JSON), stage files (plain text) and CSV
//! emission.
//!
//! Formats are line-based and diffable. A manifest records the group, the
//! construction with its master seed and one entry per stage file;
//! regenerating from the same construction and seed reproduces every file
//! byte for byte. Stage files carry either one permutation per generator
//! or an undirected labeled edge list.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::AlmostAction;
use crate::error::{Error, Result};
use crate::generators::{self, ApproximationFamily, Stage, StageMeta};
use crate::graph::LabeledGraph;
use crate::group::GroupModel;
use crate::perm::Permutation;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    FreeAbelian { rank: usize },
    FreeGroup { rank: usize },
    FiniteCyclicPower { modulus: u64, rank: usize },
    SymmetricGroup { degree: usize },
    DirectProduct { factors: Vec<GroupSpec> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupModel> {
        match self {
            GroupSpec::FreeAbelian { rank } => GroupModel::free_abelian(*rank),
            GroupSpec::FreeGroup { rank } => GroupModel::free_group(*rank),
            GroupSpec::FiniteCyclicPower { modulus, rank } => {
                GroupModel::finite_cyclic_power(*modulus, *rank)
            }
            GroupSpec::SymmetricGroup { degree } => GroupModel::symmetric_group(*degree),
            GroupSpec::DirectProduct { factors } => {
                let fs: Result<Vec<GroupModel>> = factors.iter().map(GroupSpec::build).collect();
                GroupModel::direct_product(fs?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Quotient {
        dim: usize,
        moduli: Vec<u64>,
    },
    FolnerBoxes {
        dim: usize,
        boxes: Vec<u64>,
    },
    RandomPermutations {
        rank: usize,
        sizes: Vec<usize>,
    },
    Mixed {
        cycle_blocks: usize,
        total_blocks: usize,
        sizes: Vec<usize>,
        girth_target: u32,
    },
}

impl ConstructionSpec {
    pub fn group_spec(&self) -> Option<GroupSpec> {
        match self {
            ConstructionSpec::Quotient { dim, .. } | ConstructionSpec::FolnerBoxes { dim, .. } => {
                Some(GroupSpec::FreeAbelian { rank: *dim })
            }
            ConstructionSpec::RandomPermutations { rank, .. } => {
                Some(GroupSpec::FreeGroup { rank: *rank })
            }
            ConstructionSpec::Mixed { .. } => None,
        }
    }

    /// Deterministic build of the family described by this spec.
    pub fn build(&self, master_seed: u64, vertex_cap: usize) -> Result<ApproximationFamily> {
        match self {
            ConstructionSpec::Quotient { dim, moduli } => {
                let model = Arc::new(GroupModel::free_abelian(*dim)?);
                generators::quotient_approximation(model, moduli, vertex_cap)
            }
            ConstructionSpec::FolnerBoxes { dim, boxes } => {
                let model = Arc::new(GroupModel::free_abelian(*dim)?);
                generators::folner_approximation(model, boxes, vertex_cap)
            }
            ConstructionSpec::RandomPermutations { rank, sizes } => {
                if let Some(&max) = sizes.iter().max() {
                    if max > vertex_cap {
                        return Err(Error::ResourceCap {
                            what: "stage vertices".into(),
                            cap: vertex_cap,
                        });
                    }
                }
                generators::random_permutation_family(*rank, sizes, master_seed)
            }
            ConstructionSpec::Mixed {
                cycle_blocks,
                total_blocks,
                sizes,
                girth_target,
            } => {
                if let Some(&max) = sizes.iter().max() {
                    if max.saturating_mul(*total_blocks) > vertex_cap {
                        return Err(Error::ResourceCap {
                            what: "stage vertices".into(),
                            cap: vertex_cap,
                        });
                    }
                }
                generators::mixed_family(
                    *cycle_blocks,
                    *total_blocks,
                    sizes,
                    *girth_target,
                    master_seed,
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub size: usize,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_girth: Option<u32>,
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub format_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    /// Edge label alphabet, also the one-sided generator names.
    pub labels: Vec<String>,
    pub construction: ConstructionSpec,
    pub master_seed: u64,
    pub stages: Vec<StageEntry>,
}

fn stage_file_name(index: usize) -> String {
    format!("stages/stage_{index:03}.txt")
}

fn render_perm_stage(action: &AlmostAction) -> String {
    let mut out = format!("n {}\nkind perm\n", action.carrier_size());
    for (i, name) in action.model().generating_set().names().iter().enumerate() {
        out.push_str(name);
        for &img in action.generator_perm(i as u16).images() {
            out.push(' ');
            out.push_str(&img.to_string());
        }
        out.push('\n');
    }
    out
}

fn render_edge_stage(graph: &LabeledGraph) -> Result<String> {
    // undirected stages only: every directed edge must have its reverse
    let mut out = format!("n {}\nkind edges\n", graph.vertex_count());
    for &(u, v, s) in graph.edges() {
        if u > v {
            continue;
        }
        if u != v
            && !graph
                .out_edges(v)
                .iter()
                .any(|&(w, t)| w == u && t == s)
        {
            return Err(Error::invalid(
                "edge stage files require a symmetric graph",
            ));
        }
        out.push_str(&format!("{u} {v} {}\n", graph.labels()[s as usize]));
    }
    Ok(out)
}

/// Writes `manifest.json` plus one stage file per stage under `dir`.
pub fn write_family(
    dir: &Path,
    construction: &ConstructionSpec,
    master_seed: u64,
    family: &ApproximationFamily,
) -> Result<FamilyManifest> {
    fs::create_dir_all(dir.join("stages"))?;
    let labels = family
        .stages
        .first()
        .map(|s| s.graph.labels().to_vec())
        .unwrap_or_default();
    let mut entries = Vec::new();
    for (i, stage) in family.stages.iter().enumerate() {
        let rel = stage_file_name(i);
        let body = match &stage.action {
            Some(action) => render_perm_stage(action),
            None => render_edge_stage(&stage.graph)?,
        };
        fs::write(dir.join(&rel), body)?;
        entries.push(StageEntry {
            size: stage.meta.size,
            path: rel,
            seed: stage.meta.seed,
            achieved_girth: stage.meta.achieved_girth,
            connected: stage.meta.connected,
        });
    }
    let manifest = FamilyManifest {
        format_version: FORMAT_VERSION,
        group: construction.group_spec(),
        labels,
        construction: construction.clone(),
        master_seed,
        stages: entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::invalid(format!("manifest serialization: {e}")))?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(manifest)
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn parse_stage_file(
    path: &Path,
    labels: &[String],
    model: Option<&Arc<GroupModel>>,
) -> Result<(Option<AlmostAction>, LabeledGraph)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let n: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("n "))
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| malformed(path, "missing vertex count header"))?;
    let kind = lines
        .next()
        .and_then(|l| l.strip_prefix("kind "))
        .ok_or_else(|| malformed(path, "missing kind line"))?;
    match kind.trim() {
        "perm" => {
            let model = model
                .ok_or_else(|| malformed(path, "permutation stage without a group"))?
                .clone();
            let mut perms: Vec<Option<Permutation>> = vec![None; labels.len()];
            for line in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let mut tokens = line.split_whitespace();
                let name = tokens.next().unwrap();
                let gen = labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| malformed(path, format!("undeclared generator {name}")))?;
                let images: std::result::Result<Vec<u32>, _> =
                    tokens.map(str::parse::<u32>).collect();
                let images =
                    images.map_err(|e| malformed(path, format!("bad integer: {e}")))?;
                if images.len() != n {
                    return Err(malformed(path, "permutation length mismatch"));
                }
                perms[gen] = Some(Permutation::new(images).map_err(|e| {
                    malformed(path, format!("not a permutation: {e}"))
                })?);
            }
            let perms: Result<Vec<Permutation>> = perms
                .into_iter()
                .enumerate()
                .map(|(i, p)| {
                    p.ok_or_else(|| malformed(path, format!("missing generator {}", labels[i])))
                })
                .collect();
            let action = AlmostAction::new(model, perms?)?;
            let graph = action.labeled_graph();
            Ok((Some(action), graph))
        }
        "edges" => {
            let mut edges = Vec::new();
            for line in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() != 3 {
                    return Err(malformed(path, format!("bad edge line: {line}")));
                }
                let u: u32 = tokens[0]
                    .parse()
                    .map_err(|e| malformed(path, format!("bad endpoint: {e}")))?;
                let v: u32 = tokens[1]
                    .parse()
                    .map_err(|e| malformed(path, format!("bad endpoint: {e}")))?;
                let s = labels
                    .iter()
                    .position(|l| l == tokens[2])
                    .ok_or_else(|| malformed(path, format!("undeclared label {}", tokens[2])))?;
                edges.push((u, v, s as u16));
            }
            let graph = LabeledGraph::from_undirected_edges(n, labels.to_vec(), edges)?;
            Ok((None, graph))
        }
        other => Err(malformed(path, format!("unknown stage kind {other}"))),
    }
}

/// Loads a manifest and all its stage files, reconstructing actions where
/// the stages are permutation blocks.
pub fn load_family(manifest_path: &Path) -> Result<(FamilyManifest, ApproximationFamily)> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest: FamilyManifest = serde_json::from_str(&text)
        .map_err(|e| malformed(manifest_path, format!("bad manifest: {e}")))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(malformed(
            manifest_path,
            format!("unsupported format version {}", manifest.format_version),
        ));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let model = match &manifest.group {
        Some(spec) => Some(Arc::new(spec.build()?)),
        None => None,
    };
    let mut stages = Vec::new();
    let mut last_size = 0usize;
    for entry in &manifest.stages {
        let path: PathBuf = base.join(&entry.path);
        let (action, graph) = parse_stage_file(&path, &manifest.labels, model.as_ref())?;
        if graph.vertex_count() != entry.size {
            return Err(malformed(&path, "size disagrees with the manifest"));
        }
        if entry.size <= last_size {
            return Err(malformed(
                manifest_path,
                "stage sizes must be strictly increasing",
            ));
        }
        last_size = entry.size;
        stages.push(Stage {
            action,
            graph,
            meta: StageMeta {
                size: entry.size,
                seed: entry.seed,
                achieved_girth: entry.achieved_girth,
                connected: entry.connected,
            },
        });
    }
    Ok((manifest, ApproximationFamily { model, stages }))
}

/// Renders rows as CSV with a header line; all formatting is locale-free
/// and deterministic.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, render_csv(header, rows))?;
    Ok(())
}

/// Loads per-stage witness files `witness_000.txt`, one integer per line.
pub fn load_witnesses(dir: &Path, stages: usize) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for i in 0..stages {
        let path = dir.join(format!("witness_{i:03}.txt"));
        let text = fs::read_to_string(&path)?;
        let map: std::result::Result<Vec<u32>, _> =
            text.split_whitespace().map(str::parse::<u32>).collect();
        out.push(map.map_err(|e| malformed(&path, format!("bad witness entry: {e}")))?);
    }
    Ok(out)
}
