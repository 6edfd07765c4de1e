//! Almost actions on finite sets: the finite stage of a sofic
//! approximation.
//!
//! An [`AlmostAction`] stores one permutation per one-sided generator;
//! inverse generators act by the inverse permutations, and a group element
//! acts through its shortlex normal-form word. Words act on the right:
//! `sigma_of(w)` applies the letters of `w` in reading order, so
//! `sigma_of(w.concat(v)) = sigma_of(w) followed by sigma_of(v)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::group::{Element, GroupModel, Word};
use crate::perm::Permutation;

/// Default cap on the size of the test set `F` in good-set checks; the
/// check costs O(|F|^2 n).
pub const DEFAULT_F_CAP: usize = 200;

#[derive(Debug, Clone)]
pub struct AlmostAction {
    model: Arc<GroupModel>,
    n: usize,
    /// One permutation per one-sided generator, generator order.
    gen_perms: Vec<Permutation>,
    gen_inverses: Vec<Permutation>,
}

impl AlmostAction {
    pub fn new(model: Arc<GroupModel>, gen_perms: Vec<Permutation>) -> Result<Self> {
        let k = model.generating_set().len();
        if gen_perms.len() != k {
            return Err(Error::invalid(format!(
                "expected {k} permutations, got {}",
                gen_perms.len()
            )));
        }
        let n = gen_perms.first().map_or(0, Permutation::len);
        if n == 0 || gen_perms.iter().any(|p| p.len() != n) {
            return Err(Error::invalid("carrier must be nonempty and uniform"));
        }
        let gen_inverses = gen_perms.iter().map(Permutation::inverse).collect();
        Ok(AlmostAction {
            model,
            n,
            gen_perms,
            gen_inverses,
        })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn generator_perm(&self, gen: u16) -> &Permutation {
        &self.gen_perms[gen as usize]
    }

    /// The permutation of the word `w`, applying letters left to right.
    pub fn sigma_of(&self, w: &Word) -> Result<Permutation> {
        let mut images: Vec<u32> = (0..self.n as u32).collect();
        for l in &w.letters {
            if l.gen as usize >= self.gen_perms.len() {
                return Err(Error::UnknownSymbol(format!("#{}", l.gen)));
            }
            let p = if l.inv {
                &self.gen_inverses[l.gen as usize]
            } else {
                &self.gen_perms[l.gen as usize]
            };
            for img in images.iter_mut() {
                *img = p.apply(*img);
            }
        }
        Permutation::new(images)
    }

    /// The permutation of a group element, via its normal-form word.
    pub fn sigma_elem(&self, g: &Element) -> Result<Permutation> {
        self.sigma_of(&self.model.normal_form(g))
    }

    /// Points where the action is honestly multiplicative on all pairs
    /// from `F` and fixed-point-free off the identity.
    pub fn good_set(&self, f: &[Element]) -> Result<GoodSetReport> {
        self.good_set_with_cap(f, DEFAULT_F_CAP)
    }

    pub fn good_set_with_cap(&self, f: &[Element], cap: usize) -> Result<GoodSetReport> {
        if f.is_empty() {
            return Err(Error::invalid("good-set test set F must be nonempty"));
        }
        if f.len() > cap {
            return Err(Error::ResourceCap {
                what: "good-set test set F".into(),
                cap,
            });
        }
        let id = self.model.identity();
        let perms: Vec<Permutation> = f
            .iter()
            .map(|g| self.sigma_elem(g))
            .collect::<Result<_>>()?;
        let mut good = vec![true; self.n];
        // fixed-point freeness for g in F \ {e}
        for (g, pg) in f.iter().zip(&perms) {
            if *g == id {
                continue;
            }
            for y in 0..self.n as u32 {
                if pg.apply(y) == y {
                    good[y as usize] = false;
                }
            }
        }
        // multiplicativity: doing g then h must equal doing g*h
        for (g, pg) in f.iter().zip(&perms) {
            for (h, ph) in f.iter().zip(&perms) {
                let pgh = self.sigma_elem(&self.model.multiply(g, h))?;
                for y in 0..self.n as u32 {
                    if good[y as usize] && ph.apply(pg.apply(y)) != pgh.apply(y) {
                        good[y as usize] = false;
                    }
                }
            }
        }
        let members: Vec<u32> = (0..self.n as u32)
            .filter(|&y| good[y as usize])
            .collect();
        Ok(GoodSetReport {
            carrier_size: self.n,
            f_size: f.len(),
            members,
        })
    }

    /// The labeled graph of the action: an edge `(x, sigma(s) x, s)` for
    /// every point and every one-sided generator; fixed points keep their
    /// loops.
    pub fn labeled_graph(&self) -> LabeledGraph {
        let labels = self.model.generating_set().names().to_vec();
        let mut edges = Vec::with_capacity(self.n * self.gen_perms.len());
        for (s, p) in self.gen_perms.iter().enumerate() {
            for x in 0..self.n as u32 {
                edges.push((x, p.apply(x), s as u16));
            }
        }
        LabeledGraph::from_directed_edges(self.n, labels, edges)
            .expect("action graph is always valid")
    }

    /// Restricts the action to one connected component whose good-set
    /// density meets `1 - eps`, completing the restricted permutations by
    /// the ascending-index rule.
    ///
    /// Requires `good_set(f).defect() <= eps`, which guarantees a
    /// qualifying component exists.
    pub fn repair_connected(&self, f: &[Element], eps: f64) -> Result<AlmostAction> {
        let report = self.good_set(f)?;
        if report.defect() > eps {
            return Err(Error::invalid(format!(
                "good-set defect {} exceeds eps {eps}",
                report.defect()
            )));
        }
        let graph = self.labeled_graph();
        let (comp, count) = graph.connected_components();
        let mut size = vec![0u64; count];
        let mut good = vec![0u64; count];
        for v in 0..self.n {
            size[comp[v] as usize] += 1;
        }
        for &y in &report.members {
            good[comp[y as usize] as usize] += 1;
        }
        // pick the qualifying component with the highest good density,
        // breaking ties by size and then by id
        let mut best: Option<usize> = None;
        for c in 0..count {
            if (good[c] as f64) < (1.0 - eps) * size[c] as f64 {
                continue;
            }
            best = match best {
                None => Some(c),
                Some(b) => {
                    let lhs = (good[c] * size[b], size[c]);
                    let rhs = (good[b] * size[c], size[b]);
                    if lhs > rhs {
                        Some(c)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let target = best.ok_or_else(|| {
            Error::invalid("no connected component meets the density bound")
        })?;
        let verts: Vec<u32> = (0..self.n as u32)
            .filter(|&v| comp[v as usize] as usize == target)
            .collect();
        let mut local = vec![u32::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut perms = Vec::with_capacity(self.gen_perms.len());
        for p in &self.gen_perms {
            let partial: Vec<Option<u32>> = verts
                .iter()
                .map(|&v| {
                    let img = p.apply(v);
                    let li = local[img as usize];
                    (li != u32::MAX).then_some(li)
                })
                .collect();
            perms.push(Permutation::complete_partial(&partial)?);
        }
        AlmostAction::new(self.model.clone(), perms)
    }

    /// Finite-stage core: the intersection of the images of the good set
    /// under every element of `F`.
    pub fn finite_core(&self, f: &[Element]) -> Result<Vec<u32>> {
        let report = self.good_set(f)?;
        let mut in_core = vec![true; self.n];
        for g in f {
            let p = self.sigma_elem(g)?;
            let mut hit = vec![false; self.n];
            for &y in &report.members {
                hit[p.apply(y) as usize] = true;
            }
            for (c, h) in in_core.iter_mut().zip(&hit) {
                *c &= h;
            }
        }
        Ok((0..self.n as u32)
            .filter(|&v| in_core[v as usize])
            .collect())
    }
}

/// The points of a carrier passing both good-set conditions for a finite
/// test set `F`, with the resulting defect `1 - |Y|/|X|`.
#[derive(Debug, Clone)]
pub struct GoodSetReport {
    pub carrier_size: usize,
    pub f_size: usize,
    /// Sorted members of the good set `Y`.
    pub members: Vec<u32>,
}

impl GoodSetReport {
    pub fn good_count(&self) -> usize {
        self.members.len()
    }

    pub fn defect(&self) -> f64 {
        1.0 - self.members.len() as f64 / self.carrier_size as f64
    }

    pub fn contains(&self, y: u32) -> bool {
        self.members.binary_search(&y).is_ok()
    }
}
