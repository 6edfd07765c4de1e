//! Constructors of approximation families: exact quotients, box
//! completions, random permutation models and mixed cycle/high-girth
//! families.
//!
//! Every construction is a deterministic function of its parameters and a
//! master seed; per-stage seeds come from [`stage_seed`].

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::AlmostAction;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::group::{GroupKind, GroupModel};
use crate::perm::Permutation;

/// Per-stage seed derivation: `splitmix64(master + (index+1) * GOLDEN)`.
/// Documented so stage files can be reproduced independently.
pub fn stage_seed(master: u64, stage_index: usize) -> u64 {
    const GOLDEN: u64 = 0x9E3779B97F4A7C15;
    splitmix64(master.wrapping_add(GOLDEN.wrapping_mul(stage_index as u64 + 1)))
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// How a stage was built, with whatever the construction actually achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMeta {
    pub size: usize,
    pub seed: Option<u64>,
    /// Smallest girth over the degree-three blocks of a mixed stage.
    pub achieved_girth: Option<u32>,
    pub connected: bool,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub action: Option<AlmostAction>,
    pub graph: LabeledGraph,
    pub meta: StageMeta,
}

impl Stage {
    fn from_action(action: AlmostAction, seed: Option<u64>) -> Stage {
        let graph = action.labeled_graph();
        let meta = StageMeta {
            size: action.carrier_size(),
            seed,
            achieved_girth: None,
            connected: graph.is_connected(),
        };
        Stage {
            action: Some(action),
            graph,
            meta,
        }
    }
}

/// An ordered family of finite stages approximating one group.
#[derive(Debug, Clone)]
pub struct ApproximationFamily {
    pub model: Option<Arc<GroupModel>>,
    pub stages: Vec<Stage>,
}

impl ApproximationFamily {
    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.meta.size).collect()
    }

    fn check_increasing(sizes: &[usize]) -> Result<()> {
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("stage sizes must be strictly increasing"));
        }
        Ok(())
    }
}

fn require_free_abelian(model: &GroupModel) -> Result<usize> {
    match model.kind() {
        GroupKind::FreeAbelian { rank } => Ok(*rank),
        _ => Err(Error::invalid(
            "this construction needs a free abelian model",
        )),
    }
}

/// Index of the lattice point `coords` in the row-major box `[0, n)^d`.
fn box_index(coords: &[u64], n: u64) -> u32 {
    let mut idx = 0u64;
    for &c in coords {
        idx = idx * n + c;
    }
    idx as u32
}

fn box_translation(d: usize, n: u64, axis: usize, wrap: bool) -> Result<Permutation> {
    let total = (n as usize).pow(d as u32);
    let mut partial: Vec<Option<u32>> = Vec::with_capacity(total);
    let mut coords = vec![0u64; d];
    for _ in 0..total {
        let mut img = coords.clone();
        if img[axis] + 1 < n {
            img[axis] += 1;
            partial.push(Some(box_index(&img, n)));
        } else if wrap {
            img[axis] = 0;
            partial.push(Some(box_index(&img, n)));
        } else {
            partial.push(None);
        }
        for i in (0..d).rev() {
            if coords[i] + 1 < n {
                coords[i] += 1;
                break;
            }
            coords[i] = 0;
        }
    }
    Permutation::complete_partial(&partial)
}

/// Exact finite quotients `(Z/n)^d` acting on themselves by translation.
pub fn quotient_approximation(
    model: Arc<GroupModel>,
    moduli: &[u64],
    cap: usize,
) -> Result<ApproximationFamily> {
    let d = require_free_abelian(&model)?;
    if moduli.is_empty() {
        return Err(Error::invalid("need at least one modulus"));
    }
    if moduli.iter().any(|&n| n < 3) {
        return Err(Error::invalid("moduli must be at least 3"));
    }
    let mut stages = Vec::new();
    for &n in moduli {
        let total = (n as usize)
            .checked_pow(d as u32)
            .filter(|&t| t <= cap)
            .ok_or(Error::ResourceCap {
                what: format!("quotient stage {n}^{d} vertices"),
                cap,
            })?;
        let _ = total;
        let perms: Vec<Permutation> = (0..d)
            .map(|axis| box_translation(d, n, axis, true))
            .collect::<Result<_>>()?;
        let action = AlmostAction::new(model.clone(), perms)?;
        stages.push(Stage::from_action(action, None));
    }
    ApproximationFamily::check_increasing(
        &stages.iter().map(|s| s.meta.size).collect::<Vec<_>>(),
    )?;
    Ok(ApproximationFamily {
        model: Some(model),
        stages,
    })
}

/// Partial translations of the box `[0, n)^d`, completed to permutations
/// by the ascending-index rule.
pub fn folner_approximation(
    model: Arc<GroupModel>,
    box_sizes: &[u64],
    cap: usize,
) -> Result<ApproximationFamily> {
    let d = require_free_abelian(&model)?;
    if box_sizes.is_empty() {
        return Err(Error::invalid("need at least one box size"));
    }
    if box_sizes.iter().any(|&n| n < 3) {
        return Err(Error::invalid("box sizes must be at least 3 per side"));
    }
    let mut stages = Vec::new();
    for &n in box_sizes {
        let total = (n as usize)
            .checked_pow(d as u32)
            .filter(|&t| t <= cap)
            .ok_or(Error::ResourceCap {
                what: format!("box stage {n}^{d} vertices"),
                cap,
            })?;
        let _ = total;
        let perms: Vec<Permutation> = (0..d)
            .map(|axis| box_translation(d, n, axis, false))
            .collect::<Result<_>>()?;
        let action = AlmostAction::new(model.clone(), perms)?;
        stages.push(Stage::from_action(action, None));
    }
    ApproximationFamily::check_increasing(
        &stages.iter().map(|s| s.meta.size).collect::<Vec<_>>(),
    )?;
    Ok(ApproximationFamily {
        model: Some(model),
        stages,
    })
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("shuffle of identity is a permutation")
}

/// `k` independent uniform permutations of `{0..n-1}`, as an almost action
/// of the free group of rank `k`.
pub fn random_permutation_approximation(k: usize, n: usize, seed: u64) -> Result<AlmostAction> {
    if n < 2 || k < 1 {
        return Err(Error::invalid("need n >= 2 and k >= 1"));
    }
    let model = Arc::new(GroupModel::free_group(k)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms = (0..k).map(|_| random_permutation(n, &mut rng)).collect();
    AlmostAction::new(model, perms)
}

/// A family of random free-group stages with one seed per stage.
pub fn random_permutation_family(
    k: usize,
    sizes: &[usize],
    master_seed: u64,
) -> Result<ApproximationFamily> {
    ApproximationFamily::check_increasing(sizes)?;
    let mut stages = Vec::new();
    let mut model = None;
    for (i, &n) in sizes.iter().enumerate() {
        let seed = stage_seed(master_seed, i);
        let action = random_permutation_approximation(k, n, seed)?;
        model = Some(action.model().clone());
        stages.push(Stage::from_action(action, Some(seed)));
    }
    Ok(ApproximationFamily { model, stages })
}

const PAIRING_ATTEMPTS: usize = 200;

/// 3-regular simple graph from the pairing model; `None` if every attempt
/// produced a loop or parallel edge.
fn random_cubic(n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(u32, u32)>> {
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| [v, v, v]).collect();
        stubs.shuffle(rng);
        let mut edges = Vec::with_capacity(3 * n / 2);
        let mut adj = vec![Vec::new(); n];
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u as usize].contains(&v) {
                continue 'attempt;
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            edges.push((u.min(v), u.max(v)));
        }
        return Some(edges);
    }
    None
}

fn girth_of_edges(n: usize, edges: &[(u32, u32)]) -> Option<u32> {
    LabeledGraph::from_undirected_edges(
        n,
        vec!["x".into()],
        edges.iter().map(|&(u, v)| (u, v, 0u16)).collect(),
    )
    .expect("edge list fits")
    .girth()
}

/// Number of vertices lying on a cycle shorter than `target`; 0 means the
/// girth is at least `target`.
fn short_cycle_score(n: usize, adj: &[Vec<u32>], target: u32) -> usize {
    let mut score = 0;
    let radius = target / 2;
    let mut dist = vec![u32::MAX; n];
    let mut touched: Vec<u32> = Vec::new();
    for start in 0..n as u32 {
        let mut best = u32::MAX;
        dist[start as usize] = 0;
        touched.push(start);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((start, start));
        while let Some((v, parent)) = queue.pop_front() {
            let dv = dist[v as usize];
            if dv >= radius {
                continue;
            }
            for &w in &adj[v as usize] {
                if w == parent && v != w {
                    continue;
                }
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dv + 1;
                    touched.push(w);
                    queue.push_back((w, v));
                } else {
                    let len = dv + dist[w as usize] + 1;
                    best = best.min(len);
                }
            }
        }
        if best < target {
            score += 1;
        }
        for &t in &touched {
            dist[t as usize] = u32::MAX;
        }
        touched.clear();
    }
    score
}

/// Rejection sampling plus girth-improving double-edge switches. The
/// result is the best graph reached within the work caps; whether the
/// target was met is visible from the returned girth.
fn cubic_with_girth(
    n: usize,
    target: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<(u32, u32)>, u32)> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid(
            "a 3-regular block needs an even size of at least 4",
        ));
    }
    let mut edges = random_cubic(n, rng)
        .ok_or_else(|| Error::invalid("pairing model failed to produce a simple graph"))?;
    let swap_cap = 200 * n;
    let mut adj = adjacency(n, &edges);
    let mut score = short_cycle_score(n, &adj, target);
    let mut swaps = 0usize;
    while score > 0 && swaps < swap_cap {
        swaps += 1;
        // switch a random pair of disjoint edges and keep the result when
        // it reduces the number of vertices on short cycles
        let i = rng.random_range(0..edges.len());
        let j = rng.random_range(0..edges.len());
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        if a == c || a == d || b == c || b == d {
            continue;
        }
        let (x, y) = if rng.random_bool(0.5) { (c, d) } else { (d, c) };
        if adj[a as usize].contains(&x) || adj[b as usize].contains(&y) {
            continue;
        }
        let mut candidate = edges.clone();
        candidate[i] = (a.min(x), a.max(x));
        candidate[j] = (b.min(y), b.max(y));
        let cand_adj = adjacency(n, &candidate);
        let cand_score = short_cycle_score(n, &cand_adj, target);
        if cand_score < score {
            edges = candidate;
            adj = cand_adj;
            score = cand_score;
        }
    }
    edges.sort_unstable();
    let girth = girth_of_edges(n, &edges).unwrap_or(u32::MAX);
    Ok((edges, girth))
}

fn adjacency(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    adj
}

/// Graph-only family: each stage is the disjoint union of `a` cycles and
/// `b - a` degree-three blocks, all on `size` vertices, so the cycle
/// blocks carry exactly `a/b` of the vertex mass.
pub fn mixed_family(
    a: usize,
    b: usize,
    sizes: &[usize],
    girth_target: u32,
    master_seed: u64,
) -> Result<ApproximationFamily> {
    if a < 1 || a > b {
        return Err(Error::invalid("need 1 <= a <= b"));
    }
    ApproximationFamily::check_increasing(sizes)?;
    if sizes.iter().any(|&s| s < 3) {
        return Err(Error::invalid("stage size must be at least 3"));
    }
    if b > a && sizes.iter().any(|&s| s < 4 || s % 2 != 0) {
        return Err(Error::invalid(
            "degree-three blocks need even stage sizes of at least 4",
        ));
    }
    let labels = vec!["x".to_string()];
    let mut stages = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        let seed = stage_seed(master_seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut blocks: Vec<LabeledGraph> = Vec::with_capacity(b);
        let mut worst_girth: Option<u32> = None;
        for _ in 0..a {
            blocks.push(crate::graph::cycle_graph(size));
        }
        for _ in a..b {
            let (edges, girth) = cubic_with_girth(size, girth_target, &mut rng)?;
            worst_girth = Some(worst_girth.map_or(girth, |w| w.min(girth)));
            blocks.push(LabeledGraph::from_undirected_edges(
                size,
                labels.clone(),
                edges.iter().map(|&(u, v)| (u, v, 0u16)).collect(),
            )?);
        }
        let refs: Vec<&LabeledGraph> = blocks.iter().collect();
        let graph = LabeledGraph::disjoint_union(&refs)?;
        stages.push(Stage {
            action: None,
            meta: StageMeta {
                size: graph.vertex_count(),
                seed: Some(seed),
                achieved_girth: worst_girth,
                connected: graph.is_connected(),
            },
            graph,
        });
    }
    Ok(ApproximationFamily {
        model: None,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_line_stage_is_a_cycle() {
        let model = Arc::new(GroupModel::free_abelian(1).unwrap());
        let fam = quotient_approximation(model, &[6], 1 << 20).unwrap();
        let g = &fam.stages[0].graph;
        assert_eq!(g.vertex_count(), 6);
        assert!(g.is_connected());
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.girth(), Some(6));
    }

    #[test]
    fn quotient_plane_stage_is_a_torus_grid() {
        let model = Arc::new(GroupModel::free_abelian(2).unwrap());
        let fam = quotient_approximation(model, &[4], 1 << 20).unwrap();
        let g = &fam.stages[0].graph;
        assert_eq!(g.vertex_count(), 16);
        assert!(g.is_connected());
        assert_eq!(g.max_degree(), 4);
        assert_eq!(g.simple_edges().len(), 32);
    }

    #[test]
    fn quotient_defect_is_zero() {
        let model = Arc::new(GroupModel::free_abelian(2).unwrap());
        let fam = quotient_approximation(model.clone(), &[8], 1 << 20).unwrap();
        let f = model.ball_elements(2).unwrap();
        let action = fam.stages[0].action.as_ref().unwrap();
        assert_eq!(action.good_set(&f).unwrap().defect(), 0.0);
    }

    #[test]
    fn small_modulus_rejected() {
        let model = Arc::new(GroupModel::free_abelian(1).unwrap());
        assert!(quotient_approximation(model, &[2], 1 << 20).is_err());
    }

    #[test]
    fn box_completion_of_the_line_is_forced_to_the_cycle() {
        let model = Arc::new(GroupModel::free_abelian(1).unwrap());
        let fam = folner_approximation(model, &[7], 1 << 20).unwrap();
        let action = fam.stages[0].action.as_ref().unwrap();
        let p = action.generator_perm(0);
        for i in 0..7u32 {
            assert_eq!(p.apply(i), (i + 1) % 7);
        }
    }

    #[test]
    fn random_actions_are_seed_deterministic() {
        let a1 = random_permutation_approximation(2, 50, 99).unwrap();
        let a2 = random_permutation_approximation(2, 50, 99).unwrap();
        let b = random_permutation_approximation(2, 50, 100).unwrap();
        assert_eq!(a1.generator_perm(0), a2.generator_perm(0));
        assert_eq!(a1.generator_perm(1), a2.generator_perm(1));
        assert_ne!(a1.generator_perm(0), b.generator_perm(0));
    }

    #[test]
    fn single_point_carrier_rejected() {
        assert!(random_permutation_approximation(1, 1, 0).is_err());
    }

    #[test]
    fn random_model_defect_survey() {
        // empirical defect of 20 seeded actions; no asserted constant,
        // only bounds and reproducibility
        let mut total = 0.0;
        for seed in 0..20u64 {
            let action = random_permutation_approximation(2, 1000, seed).unwrap();
            let f = action.model().ball_elements(2).unwrap();
            let d = action.good_set(&f).unwrap().defect();
            assert!((0.0..=1.0).contains(&d));
            total += d;
        }
        let mean = total / 20.0;
        let again = {
            let action = random_permutation_approximation(2, 1000, 0).unwrap();
            let f = action.model().ball_elements(2).unwrap();
            action.good_set(&f).unwrap().defect()
        };
        let first = {
            let action = random_permutation_approximation(2, 1000, 0).unwrap();
            let f = action.model().ball_elements(2).unwrap();
            action.good_set(&f).unwrap().defect()
        };
        assert_eq!(again, first);
        println!("mean empirical defect over 20 seeds: {mean}");
    }

    #[test]
    fn mixed_family_masses_and_sizes() {
        let fam = mixed_family(1, 2, &[8, 12], 4, 7).unwrap();
        assert_eq!(fam.stage_sizes(), vec![16, 24]);
        for stage in &fam.stages {
            let g = &stage.graph;
            let half = g.vertex_count() / 2;
            // first block is the cycle, second is 3-regular
            for v in 0..half as u32 {
                assert_eq!(g.degree(v), 2);
            }
            for v in half as u32..g.vertex_count() as u32 {
                assert_eq!(g.degree(v), 3);
            }
            assert!(stage.meta.achieved_girth.is_some());
        }
    }

    #[test]
    fn pure_cycle_family() {
        let fam = mixed_family(1, 1, &[5, 9], 3, 0).unwrap();
        for stage in &fam.stages {
            assert_eq!(stage.graph.max_degree(), 2);
            assert!(stage.graph.is_connected());
            assert_eq!(stage.meta.achieved_girth, None);
        }
    }

    #[test]
    fn switching_reaches_moderate_girth() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (edges, girth) = cubic_with_girth(60, 6, &mut rng).unwrap();
        assert_eq!(girth_of_edges(60, &edges), Some(girth));
        assert!(girth >= 6, "achieved girth {girth}");
        // every vertex is degree three
        let adj = adjacency(60, &edges);
        assert!(adj.iter().all(|l| l.len() == 3));
    }

    #[test]
    fn mixed_family_is_seed_deterministic() {
        let f1 = mixed_family(1, 2, &[20], 5, 11).unwrap();
        let f2 = mixed_family(1, 2, &[20], 5, 11).unwrap();
        assert_eq!(f1.stages[0].graph, f2.stages[0].graph);
    }

    #[test]
    fn sizes_must_increase() {
        assert!(mixed_family(1, 1, &[6, 6], 3, 0).is_err());
        let model = Arc::new(GroupModel::free_abelian(1).unwrap());
        assert!(quotient_approximation(model, &[8, 4], 1 << 20).is_err());
    }
}
