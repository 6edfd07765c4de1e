//! Rooted-ball statistics: canonical forms of labeled balls, empirical
//! ball distributions and the local-convergence defect against a model's
//! Cayley ball.
//!
//! Canonicalization is exact. Graphs in which every vertex has at most one
//! outgoing and one incoming edge per label (in particular every graph
//! built from an almost action, and every Cayley ball) are rigid relative
//! to the root, so a deterministic traversal canonicalizes them in linear
//! time. All other graphs go through color refinement with exhaustive
//! tie-breaking.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generators::ApproximationFamily;
use crate::graph::{LabeledGraph, RootedBall, UNREACHED};
use crate::group::GroupModel;

pub const DEFAULT_CODE_CAP: usize = 512;

/// Induced labeled subgraph on the radius-`r` ball around `v`, rooted at
/// `v` (index 0 of the result).
pub fn extract_ball(graph: &LabeledGraph, v: u32, r: u32) -> RootedBall {
    let verts = graph.ball_vertices(v, r);
    RootedBall {
        graph: graph.induced(&verts),
        root: 0,
        radius: r,
    }
}

/// Per-(vertex, label) successor tables; `None` when some vertex has two
/// outgoing or two incoming edges with one label.
struct LabelLut {
    k: usize,
    out: Vec<u32>,
    inc: Vec<u32>,
}

fn build_lut(graph: &LabeledGraph) -> Option<LabelLut> {
    let n = graph.vertex_count();
    let k = graph.labels().len();
    let mut out = vec![UNREACHED; n * k];
    let mut inc = vec![UNREACHED; n * k];
    for &(u, v, s) in graph.edges() {
        let o = u as usize * k + s as usize;
        let i = v as usize * k + s as usize;
        if out[o] != UNREACHED || inc[i] != UNREACHED {
            return None;
        }
        out[o] = v;
        inc[i] = u;
    }
    Some(LabelLut { k, out, inc })
}

/// Canonical traversal plus compact byte serialization of a rigid rooted
/// graph restricted to `member`. `pos` must come in filled with
/// `UNREACHED` and is left that way; `order` and `buf` are cleared.
fn rigid_code_bytes<F: Fn(u32) -> bool>(
    graph: &LabeledGraph,
    lut: &LabelLut,
    root: u32,
    member: F,
    pos: &mut [u32],
    order: &mut Vec<u32>,
    buf: &mut Vec<u8>,
) {
    order.clear();
    pos[root as usize] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head] as usize;
        head += 1;
        for s in 0..lut.k {
            for w in [lut.out[u * lut.k + s], lut.inc[u * lut.k + s]] {
                if w != UNREACHED && member(w) && pos[w as usize] == UNREACHED {
                    pos[w as usize] = order.len() as u32;
                    order.push(w);
                }
            }
        }
    }
    buf.clear();
    buf.extend_from_slice(&(order.len() as u32).to_le_bytes());
    let mut entries: Vec<(u16, u32)> = Vec::with_capacity(2 * lut.k);
    for &u in order.iter() {
        entries.clear();
        for &(w, s) in graph.out_edges(u) {
            if pos[w as usize] != UNREACHED {
                entries.push((s, pos[w as usize]));
            }
        }
        entries.sort_unstable();
        buf.extend_from_slice(&(entries.len() as u16).to_le_bytes());
        for &(s, p) in &entries {
            buf.extend_from_slice(&s.to_le_bytes());
            buf.extend_from_slice(&p.to_le_bytes());
        }
    }
    for &u in order.iter() {
        pos[u as usize] = UNREACHED;
    }
}

/// Canonical traversal of a rigid rooted graph restricted to `member`;
/// returns the visit order. `member[v]` must hold for the root.
fn rigid_order(lut: &LabelLut, root: u32, member: impl Fn(u32) -> bool, n: usize) -> Vec<u32> {
    let mut pos = vec![UNREACHED; n];
    let mut order = Vec::new();
    pos[root as usize] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head] as usize;
        head += 1;
        for s in 0..lut.k {
            for w in [lut.out[u * lut.k + s], lut.inc[u * lut.k + s]] {
                if w != UNREACHED && member(w) && pos[w as usize] == UNREACHED {
                    pos[w as usize] = order.len() as u32;
                    order.push(w);
                }
            }
        }
    }
    order
}

/// Serializes the labeled digraph under the vertex order `order` (vertex
/// `order[i]` becomes index `i`); edges to vertices outside the order are
/// skipped.
fn encode_under_order(graph: &LabeledGraph, order: &[u32], buf: &mut String) {
    let mut pos = vec![UNREACHED; graph.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    buf.clear();
    let _ = write!(buf, "v{}", order.len());
    for &v in order {
        buf.push('|');
        let mut entries: Vec<(u16, u32)> = graph
            .out_edges(v)
            .iter()
            .filter(|(w, _)| pos[*w as usize] != UNREACHED)
            .map(|&(w, s)| (s, pos[w as usize]))
            .collect();
        entries.sort_unstable();
        for (s, p) in entries {
            let _ = write!(buf, "{s}>{p};");
        }
    }
}

/// Color plus sorted incident-edge signature of one vertex.
type VertexSig = (u32, Vec<(u8, u16, u32)>);

/// One round of color refinement; returns the refined coloring,
/// normalized to `0..classes` in signature order.
fn refine_colors(graph: &LabeledGraph, colors: &[u32]) -> Vec<u32> {
    let n = graph.vertex_count();
    let mut sigs: Vec<VertexSig> = Vec::with_capacity(n);
    for v in 0..n as u32 {
        let mut edge_sig: Vec<(u8, u16, u32)> = Vec::new();
        for &(w, s) in graph.out_edges(v) {
            edge_sig.push((0, s, colors[w as usize]));
        }
        for &(w, s) in graph.in_edges(v) {
            edge_sig.push((1, s, colors[w as usize]));
        }
        edge_sig.sort_unstable();
        sigs.push((colors[v as usize], edge_sig));
    }
    let mut sorted: Vec<&VertexSig> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    let rank: BTreeMap<&VertexSig, u32> = sorted
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();
    sigs.iter().map(|s| rank[s]).collect()
}

fn refine_to_stable(graph: &LabeledGraph, mut colors: Vec<u32>) -> Vec<u32> {
    loop {
        let next = refine_colors(graph, &colors);
        let classes_before = colors.iter().max().copied().unwrap_or(0);
        let classes_after = next.iter().max().copied().unwrap_or(0);
        let stable = classes_before == classes_after;
        colors = next;
        if stable {
            return colors;
        }
    }
}

/// Smallest non-singleton color class; `None` when the coloring is
/// discrete.
fn branch_cell(colors: &[u32]) -> Option<Vec<u32>> {
    let classes = colors.iter().max().map_or(0, |&m| m as usize + 1);
    let mut cells: Vec<Vec<u32>> = vec![Vec::new(); classes];
    for (v, &c) in colors.iter().enumerate() {
        cells[c as usize].push(v as u32);
    }
    cells
        .into_iter()
        .filter(|c| c.len() > 1)
        .min_by_key(|c| (c.len(), c[0]))
}

fn search_min_code(graph: &LabeledGraph, colors: Vec<u32>, best: &mut Option<String>) {
    let colors = refine_to_stable(graph, colors);
    match branch_cell(&colors) {
        None => {
            let mut order: Vec<u32> = (0..graph.vertex_count() as u32).collect();
            order.sort_unstable_by_key(|&v| colors[v as usize]);
            let mut buf = String::new();
            encode_under_order(graph, &order, &mut buf);
            if best.as_ref().is_none_or(|b| buf < *b) {
                *best = Some(buf);
            }
        }
        Some(cell) => {
            for &v in &cell {
                // individualize v ahead of its class and re-refine
                let mut next: Vec<u32> = colors.iter().map(|&c| 2 * c + 1).collect();
                next[v as usize] -= 1;
                search_min_code(graph, next, best);
            }
        }
    }
}

pub fn canonical_code(ball: &RootedBall) -> Result<String> {
    canonical_code_with_cap(ball, DEFAULT_CODE_CAP)
}

/// Equal codes exactly for root-, label- and direction-preserving
/// isomorphic balls.
pub fn canonical_code_with_cap(ball: &RootedBall, cap: usize) -> Result<String> {
    let n = ball.graph.vertex_count();
    if n > cap {
        return Err(Error::ResourceCap {
            what: "canonical code vertices".into(),
            cap,
        });
    }
    if let Some(lut) = build_lut(&ball.graph) {
        let order = rigid_order(&lut, ball.root, |_| true, n);
        if order.len() == n {
            let mut buf = String::new();
            encode_under_order(&ball.graph, &order, &mut buf);
            return Ok(buf);
        }
        // disconnected from the root: fall through to the general search
    }
    // initial invariant: distance from the root
    let dist = ball.graph.bfs_distances(ball.root, None);
    let init: Vec<u32> = dist
        .iter()
        .map(|&d| if d == UNREACHED { u32::MAX - 1 } else { d })
        .collect();
    let init = refine_to_stable(&ball.graph, normalize_colors(&init));
    let mut best = None;
    search_min_code(&ball.graph, init, &mut best);
    Ok(best.expect("search visits at least one leaf"))
}

fn normalize_colors(raw: &[u32]) -> Vec<u32> {
    let mut values: Vec<u32> = raw.to_vec();
    values.sort_unstable();
    values.dedup();
    raw.iter()
        .map(|c| values.binary_search(c).unwrap() as u32)
        .collect()
}

/// Empirical distribution of canonical r-ball codes over all vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallDistribution {
    pub radius: u32,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl BallDistribution {
    pub fn frequency(&self, code: &str) -> f64 {
        *self.counts.get(code).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Code with the largest count; ties go to the lexicographically
    /// smallest code.
    pub fn dominant(&self) -> (&str, u64) {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(c, &k)| (c.as_str(), k))
            .expect("distribution over a nonempty graph")
    }
}

pub fn ball_distribution(graph: &LabeledGraph, r: u32) -> Result<BallDistribution> {
    ball_distribution_with_cap(graph, r, DEFAULT_CODE_CAP)
}

pub fn ball_distribution_with_cap(
    graph: &LabeledGraph,
    r: u32,
    cap: usize,
) -> Result<BallDistribution> {
    let mut counts = BTreeMap::new();
    for v in 0..graph.vertex_count() as u32 {
        let code = canonical_code_with_cap(&extract_ball(graph, v, r), cap)?;
        *counts.entry(code).or_insert(0u64) += 1;
    }
    Ok(BallDistribution {
        radius: r,
        counts,
        total: graph.vertex_count() as u64,
    })
}

/// Total variation distance between two distributions of equal radius,
/// computed in exact integer arithmetic.
pub fn compare_distributions(d1: &BallDistribution, d2: &BallDistribution) -> Result<f64> {
    if d1.radius != d2.radius {
        return Err(Error::invalid("ball distributions have different radii"));
    }
    let mut codes: Vec<&String> = d1.counts.keys().chain(d2.counts.keys()).collect();
    codes.sort_unstable();
    codes.dedup();
    let mut num: u128 = 0;
    for code in codes {
        let a = *d1.counts.get(code).unwrap_or(&0) as u128 * d2.total as u128;
        let b = *d2.counts.get(code).unwrap_or(&0) as u128 * d1.total as u128;
        num += a.abs_diff(b);
    }
    Ok(num as f64 / (2.0 * d1.total as f64 * d2.total as f64))
}

/// Fraction of vertices whose r-ball differs from the model's Cayley
/// r-ball.
#[derive(Debug, Clone)]
pub struct BsDefectReport {
    pub radius: u32,
    pub cayley_code: String,
    pub matching: u64,
    pub total: u64,
}

impl BsDefectReport {
    pub fn value(&self) -> f64 {
        1.0 - self.matching as f64 / self.total as f64
    }
}

pub fn bs_defect(graph: &LabeledGraph, r: u32, model: &GroupModel) -> Result<BsDefectReport> {
    bs_defect_with_caps(graph, r, model, crate::group::DEFAULT_BALL_CAP, DEFAULT_CODE_CAP)
}

pub fn bs_defect_with_caps(
    graph: &LabeledGraph,
    r: u32,
    model: &GroupModel,
    ball_cap: usize,
    code_cap: usize,
) -> Result<BsDefectReport> {
    if graph.labels() != model.generating_set().names() {
        return Err(Error::invalid(
            "graph label alphabet does not match the model's generators",
        ));
    }
    let cayley = model.cayley_ball_with_cap(r, ball_cap)?;
    let cayley_code = canonical_code_with_cap(&cayley, code_cap)?;
    let n = graph.vertex_count();
    let mut matching = 0u64;
    let host_lut = build_lut(graph);
    let cayley_lut = build_lut(&cayley.graph);
    if let (Some(lut), Some(clut)) = (&host_lut, &cayley_lut) {
        // rigid graphs on both sides: compare compact byte codes, reusing
        // the distance and position buffers across vertices
        let mut cayley_bytes = Vec::new();
        {
            let mut cpos = vec![UNREACHED; cayley.graph.vertex_count()];
            let mut corder = Vec::new();
            rigid_code_bytes(
                &cayley.graph,
                clut,
                cayley.root,
                |_| true,
                &mut cpos,
                &mut corder,
                &mut cayley_bytes,
            );
        }
        let mut buf = Vec::new();
        let mut dist = vec![UNREACHED; n];
        let mut pos = vec![UNREACHED; n];
        let mut ball: Vec<u32> = Vec::new();
        let mut order: Vec<u32> = Vec::new();
        for v in 0..n as u32 {
            // truncated breadth-first search
            ball.clear();
            dist[v as usize] = 0;
            ball.push(v);
            let mut head = 0;
            while head < ball.len() {
                let u = ball[head];
                head += 1;
                let du = dist[u as usize];
                if du < r {
                    for &w in graph.neighbors(u) {
                        if dist[w as usize] == UNREACHED {
                            dist[w as usize] = du + 1;
                            ball.push(w);
                        }
                    }
                }
            }
            if ball.len() > code_cap {
                for &t in &ball {
                    dist[t as usize] = UNREACHED;
                }
                return Err(Error::ResourceCap {
                    what: "canonical code vertices".into(),
                    cap: code_cap,
                });
            }
            rigid_code_bytes(
                graph,
                lut,
                v,
                |w| dist[w as usize] != UNREACHED,
                &mut pos,
                &mut order,
                &mut buf,
            );
            if buf == cayley_bytes {
                matching += 1;
            }
            for &t in &ball {
                dist[t as usize] = UNREACHED;
            }
        }
    } else {
        for v in 0..n as u32 {
            let code = canonical_code_with_cap(&extract_ball(graph, v, r), code_cap)?;
            if code == cayley_code {
                matching += 1;
            }
        }
    }
    Ok(BsDefectReport {
        radius: r,
        cayley_code,
        matching,
        total: n as u64,
    })
}

/// The dominant r-ball code of the final stage, traced across all stages.
#[derive(Debug, Clone)]
pub struct DominantBallReport {
    pub radius: u32,
    pub code: String,
    /// `(count, stage size)` of the dominant code per stage.
    pub per_stage: Vec<(u64, u64)>,
}

impl DominantBallReport {
    pub fn masses(&self) -> Vec<f64> {
        self.per_stage
            .iter()
            .map(|&(c, t)| c as f64 / t as f64)
            .collect()
    }
}

pub fn dominant_limit_ball(family: &ApproximationFamily, r: u32) -> Result<DominantBallReport> {
    if family.stages.len() < 2 {
        return Err(Error::invalid("need at least two stages"));
    }
    let dists: Vec<BallDistribution> = family
        .stages
        .iter()
        .map(|s| ball_distribution(&s.graph, r))
        .collect::<Result<_>>()?;
    let (code, _) = dists.last().unwrap().dominant();
    let code = code.to_string();
    let per_stage = dists
        .iter()
        .map(|d| (*d.counts.get(&code).unwrap_or(&0), d.total))
        .collect();
    Ok(DominantBallReport {
        radius: r,
        code,
        per_stage,
    })
}
