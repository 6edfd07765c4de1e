//! Command-line surface: `generate` builds a family on disk, `analyze`
//! runs measurement tasks into CSV files, `compare` verifies or refutes
//! quasi-isometry witnesses between two families, and `report`
//! concatenates CSVs with a metadata header.
//!
//! Exit codes: 0 on success (measurement outcomes such as "witness not
//! found" are data, not errors), 2 for invalid inputs, 3 for blown
//! resource caps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use soficlab::amenability::{self, SearchStrategy};
use soficlab::coarse::{self, Verdict};
use soficlab::error::Error;
use soficlab::generators::ApproximationFamily;
use soficlab::io::{self, ConstructionSpec};
use soficlab::localstats;
use soficlab::spectral;

#[derive(Parser, Debug)]
#[command(
    name = "soficlab",
    version,
    about = "finite approximations of groups and their coarse geometry"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an approximation family and write its manifest and stages.
    Generate(GenerateArgs),
    /// Run measurement tasks over a family; one CSV per task.
    Analyze(AnalyzeArgs),
    /// Verify or refute quasi-isometry witnesses between two families.
    Compare(CompareArgs),
    /// Concatenate the CSVs of a directory under a metadata header.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ConstructionKind {
    Quotient,
    Folner,
    Random,
    Mixed,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    construction: ConstructionKind,
    /// Rank of the free abelian model (quotient and folner).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Quotient moduli, comma separated.
    #[arg(long, value_delimiter = ',')]
    moduli: Vec<u64>,
    /// Box side lengths, comma separated (folner).
    #[arg(long, value_delimiter = ',')]
    boxes: Vec<u64>,
    /// Free rank of the random permutation model.
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Stage sizes, comma separated (random and mixed).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Cycle blocks per mixed stage.
    #[arg(long, default_value_t = 1)]
    cycles: usize,
    /// Total blocks per mixed stage.
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    /// Girth target of the degree-three blocks.
    #[arg(long, default_value_t = 6)]
    girth_target: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = io::DEFAULT_VERTEX_CAP)]
    cap_vertices: usize,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    manifest: PathBuf,
    /// Comma-separated task list.
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    /// Ball radius for good_set, bs_defect, ball_distribution,
    /// amenable_mass_estimate and folner_search.
    #[arg(long, default_value_t = 2)]
    radius: u32,
    /// Folner ratio bound.
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Part size cap for hyperfinite_partition.
    #[arg(long, default_value_t = 8)]
    part_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = io::DEFAULT_VERTEX_CAP)]
    cap_vertices: usize,
}

#[derive(Args, Debug)]
struct CompareArgs {
    manifest_x: PathBuf,
    manifest_y: PathBuf,
    /// Directory of witness_XXX.txt files, one per stage.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    /// Uniformity bound on the multiplicative constant (default: the
    /// first stage's measurement).
    #[arg(long)]
    max_mult: Option<f64>,
    /// Uniformity bound on the additive constant.
    #[arg(long)]
    max_add: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ReportArgs {
    dir: PathBuf,
    /// Output file (default: report.txt inside the directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help and version as non-errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Compare(a) => compare(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceCap { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn generate(a: GenerateArgs) -> soficlab::Result<()> {
    let spec = match a.construction {
        ConstructionKind::Quotient => ConstructionSpec::Quotient {
            dim: a.dim,
            moduli: a.moduli,
        },
        ConstructionKind::Folner => ConstructionSpec::FolnerBoxes {
            dim: a.dim,
            boxes: a.boxes,
        },
        ConstructionKind::Random => ConstructionSpec::RandomPermutations {
            rank: a.rank,
            sizes: a.sizes,
        },
        ConstructionKind::Mixed => ConstructionSpec::Mixed {
            cycle_blocks: a.cycles,
            total_blocks: a.blocks,
            sizes: a.sizes,
            girth_target: a.girth_target,
        },
    };
    let family = spec.build(a.seed, a.cap_vertices)?;
    let manifest = io::write_family(&a.out_dir, &spec, a.seed, &family)?;
    for (i, stage) in manifest.stages.iter().enumerate() {
        if let ConstructionSpec::Mixed { girth_target, .. } = &spec {
            if let Some(g) = stage.achieved_girth {
                if g < *girth_target {
                    println!(
                        "warning: stage {i} achieved girth {g} below the target {girth_target}"
                    );
                }
            }
        }
    }
    println!(
        "wrote {} stages to {}",
        manifest.stages.len(),
        a.out_dir.join("manifest.json").display()
    );
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn require_actions(family: &ApproximationFamily, task: &str) -> soficlab::Result<()> {
    if family.stages.iter().any(|s| s.action.is_none()) {
        return Err(Error::invalid(format!(
            "task {task} needs permutation stages"
        )));
    }
    Ok(())
}

fn fnv1a(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn analyze(a: AnalyzeArgs) -> soficlab::Result<()> {
    if a.tasks.is_empty() {
        return Err(Error::invalid("no tasks given"));
    }
    let (_, family) = io::load_family(&a.manifest)?;
    fs::create_dir_all(&a.out_dir)?;
    for task in &a.tasks {
        let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match task.as_str() {
            "good_set" => {
                require_actions(&family, task)?;
                let model = family.model.as_ref().expect("actions imply a model");
                let f = model.ball_elements(a.radius)?;
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let rep = stage.action.as_ref().unwrap().good_set(&f)?;
                    rows.push(vec![
                        i.to_string(),
                        rep.f_size.to_string(),
                        fmt_f64(rep.defect()),
                    ]);
                }
                (vec!["stage", "f_size", "defect"], rows)
            }
            "finite_core" => {
                require_actions(&family, task)?;
                let model = family.model.as_ref().expect("actions imply a model");
                let f = model.ball_elements(a.radius)?;
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let action = stage.action.as_ref().unwrap();
                    let rep = action.good_set(&f)?;
                    let core = action.finite_core(&f)?;
                    let n = action.carrier_size() as i64;
                    let bound = n - f.len() as i64 * (n - rep.good_count() as i64);
                    rows.push(vec![
                        i.to_string(),
                        f.len().to_string(),
                        core.len().to_string(),
                        bound.to_string(),
                    ]);
                }
                (vec!["stage", "f_size", "core_size", "bound"], rows)
            }
            "bs_defect" => {
                let model = family
                    .model
                    .as_ref()
                    .ok_or_else(|| Error::invalid("task bs_defect needs a group model"))?;
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let rep = localstats::bs_defect(&stage.graph, a.radius, model)?;
                    rows.push(vec![
                        i.to_string(),
                        a.radius.to_string(),
                        fmt_f64(rep.value()),
                    ]);
                }
                (vec!["stage", "radius", "defect"], rows)
            }
            "ball_distribution" => {
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let dist = localstats::ball_distribution(&stage.graph, a.radius)?;
                    for (code, count) in &dist.counts {
                        rows.push(vec![
                            i.to_string(),
                            a.radius.to_string(),
                            format!("{:016x}", fnv1a(code)),
                            fmt_f64(*count as f64 / dist.total as f64),
                        ]);
                    }
                }
                (vec!["stage", "radius", "code_hash", "frequency"], rows)
            }
            "spectral_gap" => {
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let lap = spectral::laplacian(&stage.graph, a.radius.max(1));
                    let (_, comps) = lap.components();
                    let gap = spectral::spectral_gap(&lap, comps)?;
                    let cheeger = if stage.graph.is_connected() {
                        fmt_f64(spectral::cheeger_sweep(&lap, &stage.graph)?.ratio)
                    } else {
                        String::new()
                    };
                    rows.push(vec![
                        i.to_string(),
                        stage.graph.vertex_count().to_string(),
                        lap.radius().to_string(),
                        fmt_f64(gap),
                        cheeger,
                        lap.max_degree().to_string(),
                    ]);
                }
                (
                    vec!["stage", "n", "radius", "lambda2", "cheeger", "d_max"],
                    rows,
                )
            }
            "folner_search" => {
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let found = amenability::folner_search(
                        &stage.graph,
                        a.radius.max(1),
                        a.eps,
                        SearchStrategy::Auto,
                    );
                    let (size, ratio) = match &found {
                        Some(w) => (w.set.len(), fmt_f64(w.ratio())),
                        None => (0, String::new()),
                    };
                    rows.push(vec![
                        i.to_string(),
                        a.radius.max(1).to_string(),
                        fmt_f64(a.eps),
                        size.to_string(),
                        ratio,
                    ]);
                }
                (vec!["stage", "radius", "eps", "witness_size", "ratio"], rows)
            }
            "hyperfinite_partition" => {
                let mut rows = Vec::new();
                for (i, stage) in family.stages.iter().enumerate() {
                    let p = amenability::hyperfinite_partition(&stage.graph, a.part_cap)?;
                    let max_part = p.parts.iter().map(Vec::len).max().unwrap_or(0);
                    rows.push(vec![
                        i.to_string(),
                        p.cap.to_string(),
                        p.parts.len().to_string(),
                        max_part.to_string(),
                        p.cut_edges.to_string(),
                    ]);
                }
                (vec!["stage", "cap", "parts", "max_part", "cut_edges"], rows)
            }
            "amenable_mass_estimate" => {
                let masses = amenability::amenable_mass_estimate(&family, a.radius)?;
                let rows = masses
                    .iter()
                    .map(|m| {
                        vec![
                            m.stage.to_string(),
                            a.radius.to_string(),
                            fmt_f64(m.fraction()),
                        ]
                    })
                    .collect();
                (vec!["stage", "radius", "mass"], rows)
            }
            other => {
                return Err(Error::invalid(format!("unknown task {other}")));
            }
        };
        io::write_csv(&a.out_dir.join(format!("{task}.csv")), &header, &rows)?;
    }
    println!(
        "wrote {} task reports to {}",
        a.tasks.len(),
        a.out_dir.display()
    );
    Ok(())
}

fn compare(a: CompareArgs) -> soficlab::Result<()> {
    let (_, fam_x) = io::load_family(&a.manifest_x)?;
    let (_, fam_y) = io::load_family(&a.manifest_y)?;
    let witnesses = match &a.witness_dir {
        Some(dir) => {
            if fam_x.stages.len() != fam_y.stages.len() {
                return Err(Error::invalid(
                    "witness comparison needs equal stage counts",
                ));
            }
            Some(io::load_witnesses(dir, fam_x.stages.len())?)
        }
        None => None,
    };
    let bound = match (a.max_mult, a.max_add) {
        (Some(l), Some(ad)) => Some((l, ad)),
        (None, None) => None,
        _ => {
            return Err(Error::invalid(
                "give both --max-mult and --max-add or neither",
            ))
        }
    };
    let cmp = coarse::compare_families(&fam_x, &fam_y, witnesses.as_deref(), bound, a.seed)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut verdict = String::new();
    match &cmp.verdict {
        Verdict::Verified {
            mult,
            add,
            codensity,
        } => {
            let _ = writeln!(
                verdict,
                "VERIFIED mult={mult} add={add} codensity={codensity}"
            );
        }
        Verdict::RefutedByWitnessFailure {
            stage,
            mult,
            add,
            witness,
        } => {
            let pair = witness
                .map(|(x, y)| format!(" pair=({x},{y})"))
                .unwrap_or_default();
            let _ = writeln!(
                verdict,
                "REFUTED-BY-WITNESS-FAILURE stage={stage} mult={mult} add={add}{pair}"
            );
        }
        Verdict::Inconclusive => {
            let _ = writeln!(verdict, "INCONCLUSIVE");
            for (i, (px, py)) in cmp.profiles.iter().enumerate() {
                let _ = writeln!(
                    verdict,
                    "stage {i}: ball_growth_x={:?} ball_growth_y={:?} lambda2_x={:?} lambda2_y={:?} girth_x={:?} girth_y={:?}",
                    px.ball_growth, py.ball_growth, px.lambda2, py.lambda2, px.girth, py.girth
                );
            }
        }
    }
    fs::write(a.out_dir.join("verdict.txt"), &verdict)?;
    let rows: Vec<Vec<String>> = cmp
        .constants
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                fmt_f64(c.mult),
                fmt_f64(c.add),
                c.codensity.to_string(),
                c.exact.to_string(),
                c.pairs_evaluated.to_string(),
            ]
        })
        .collect();
    io::write_csv(
        &a.out_dir.join("constants.csv"),
        &["stage", "mult", "add", "codensity", "exact", "pairs"],
        &rows,
    )?;
    print!("{verdict}");
    Ok(())
}

fn report(a: ReportArgs) -> soficlab::Result<()> {
    let out_path = a.out.unwrap_or_else(|| a.dir.join("report.txt"));
    let mut names: Vec<PathBuf> = fs::read_dir(&a.dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::invalid(format!(
            "no CSV files under {}",
            a.dir.display()
        )));
    }
    let mut out = String::from("# soficlab report format=1\n");
    for p in &names {
        let _ = writeln!(out, "# file: {}", p.file_name().unwrap().to_string_lossy());
        out.push_str(&fs::read_to_string(p)?);
    }
    fs::write(&out_path, out)?;
    println!(
        "concatenated {} files into {}",
        names.len(),
        out_path.display()
    );
    Ok(())
}

/// Reads every regular file under a directory into a sorted
/// (relative path, bytes) list; used by the determinism tests.
pub fn snapshot_tree(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(base, &path, out)?;
            } else {
                let rel = path
                    .strip_prefix(base)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.push((rel, fs::read(&path)?));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out)?;
    out.sort();
    Ok(out)
}
