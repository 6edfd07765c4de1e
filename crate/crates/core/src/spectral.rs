//! Entourage Laplacians, spectral gaps, Cheeger sweeps, expander
//! certificates and conditionally negative definite kernels.
//!
//! The Laplacian of a graph at entourage radius `R` has entry -1 for each
//! pair at distance between 1 and `R` and the count of such partners on
//! the diagonal; `R = 1` recovers the unnormalized graph Laplacian and
//! `R = 0` the zero matrix. The gap above the kernel is computed densely
//! up to [`DENSE_LIMIT`] vertices and by deflated inverse iteration with
//! conjugate-gradient solves beyond that.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::{splitmix64, ApproximationFamily};
use crate::graph::{LabeledGraph, UNREACHED};

pub const DENSE_LIMIT: usize = 512;
const RELATIVE_TOL: f64 = 1e-8;

/// Symmetric entourage Laplacian; all off-diagonal entries are -1, so the
/// matrix is stored as per-vertex partner lists.
#[derive(Debug, Clone)]
pub struct SparseLaplacian {
    n: usize,
    radius: u32,
    partners: Vec<Vec<u32>>,
    d_max: usize,
}

impl SparseLaplacian {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Largest number of entourage partners of any vertex.
    pub fn max_degree(&self) -> usize {
        self.d_max
    }

    pub fn diagonal(&self, v: usize) -> f64 {
        self.partners[v].len() as f64
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (v, row) in self.partners.iter().enumerate() {
            let mut acc = row.len() as f64 * x[v];
            for &w in row {
                acc -= x[w as usize];
            }
            y[v] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (v, row) in self.partners.iter().enumerate() {
            m[(v, v)] = row.len() as f64;
            for &w in row {
                m[(v, w as usize)] = -1.0;
            }
        }
        m
    }

    /// Connected components of the partner structure; these span the
    /// kernel.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let mut comp = vec![UNREACHED; self.n];
        let mut count = 0u32;
        for start in 0..self.n {
            if comp[start] != UNREACHED {
                continue;
            }
            let mut stack = vec![start as u32];
            comp[start] = count;
            while let Some(v) = stack.pop() {
                for &w in &self.partners[v as usize] {
                    if comp[w as usize] == UNREACHED {
                        comp[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }
}

/// Builds the Laplacian of the metric entourage of radius `R`.
pub fn laplacian(graph: &LabeledGraph, radius: u32) -> SparseLaplacian {
    let n = graph.vertex_count();
    let mut partners = vec![Vec::new(); n];
    if radius > 0 {
        for v in 0..n as u32 {
            let dist = graph.bfs_distances(v, Some(radius));
            for w in 0..n as u32 {
                if w != v && dist[w as usize] != UNREACHED {
                    partners[v as usize].push(w);
                }
            }
        }
    }
    let d_max = partners.iter().map(Vec::len).max().unwrap_or(0);
    SparseLaplacian {
        n,
        radius,
        partners,
        d_max,
    }
}

/// Mean-per-component projector used to deflate the kernel.
struct KernelProjector {
    comp: Vec<u32>,
    sizes: Vec<f64>,
    sums: Vec<f64>,
}

impl KernelProjector {
    fn new(comp: Vec<u32>, count: usize) -> Self {
        let mut sizes = vec![0.0; count];
        for &c in &comp {
            sizes[c as usize] += 1.0;
        }
        KernelProjector {
            comp,
            sizes,
            sums: vec![0.0; count],
        }
    }

    fn project(&mut self, x: &mut [f64]) {
        self.sums.iter_mut().for_each(|s| *s = 0.0);
        for (v, &c) in self.comp.iter().enumerate() {
            self.sums[c as usize] += x[v];
        }
        for (s, n) in self.sums.iter_mut().zip(&self.sizes) {
            *s /= n;
        }
        for (v, &c) in self.comp.iter().enumerate() {
            x[v] -= self.sums[c as usize];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `L x = b` on the complement of the kernel by conjugate
/// gradients; returns the iteration count used.
fn cg_solve(
    lap: &SparseLaplacian,
    b: &[f64],
    x: &mut [f64],
    proj: &mut KernelProjector,
    rel_tol: f64,
    max_iter: usize,
) -> usize {
    let n = lap.dim();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    lap.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    proj.project(&mut r);
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let nb = norm(b).max(f64::MIN_POSITIVE);
    let mut it = 0;
    while rs.sqrt() > rel_tol * nb && it < max_iter {
        it += 1;
        lap.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        proj.project(&mut r);
        let rs_next = dot(&r, &r);
        let beta = rs_next / rs;
        rs = rs_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    it
}

fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

fn check_kernel_dim(lap: &SparseLaplacian, components: usize) -> Result<()> {
    let (_, count) = lap.components();
    if count != components {
        return Err(Error::invalid(format!(
            "declared kernel dimension {components} but the entourage has {count} components"
        )));
    }
    if components >= lap.dim() {
        return Err(Error::invalid(
            "no spectrum above the kernel: every vertex is isolated",
        ));
    }
    Ok(())
}

/// Smallest eigenvalue above the kernel, by dense symmetric
/// diagonalization.
pub fn lambda2_dense(lap: &SparseLaplacian, components: usize) -> Result<f64> {
    check_kernel_dim(lap, components)?;
    let (values, _) = sorted_eigen(&lap.to_dense());
    if values[0] < -1e-9 {
        return Err(Error::invalid(format!(
            "Laplacian is not positive semidefinite: min eigenvalue {}",
            values[0]
        )));
    }
    Ok(values[components])
}

fn lambda2_dense_with_vector(lap: &SparseLaplacian, components: usize) -> Result<(f64, Vec<f64>)> {
    check_kernel_dim(lap, components)?;
    let (values, vectors) = sorted_eigen(&lap.to_dense());
    let v: Vec<f64> = vectors.column(components).iter().copied().collect();
    Ok((values[components], v))
}

/// Smallest eigenvalue above the kernel by inverse iteration with
/// conjugate-gradient solves, the kernel deflated by per-component mean
/// subtraction. Initialization is a fixed seed-free vector, so results
/// are deterministic.
pub fn lambda2_iterative(lap: &SparseLaplacian, components: usize) -> Result<f64> {
    lambda2_iterative_with_vector(lap, components).map(|(v, _)| v)
}

pub fn lambda2_iterative_with_vector(
    lap: &SparseLaplacian,
    components: usize,
) -> Result<(f64, Vec<f64>)> {
    check_kernel_dim(lap, components)?;
    let n = lap.dim();
    let (comp, count) = lap.components();
    let mut proj = KernelProjector::new(comp, count);
    let mut x: Vec<f64> = (0..n)
        .map(|i| (splitmix64(i as u64) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    proj.project(&mut x);
    let nx = norm(&x);
    if nx == 0.0 {
        return Err(Error::invalid("degenerate start vector"));
    }
    x.iter_mut().for_each(|v| *v /= nx);

    let outer_cap = 10 * n;
    let inner_cap = 20 * n;
    let mut y = vec![0.0; n];
    let mut ly = vec![0.0; n];
    let mut rho_prev = f64::INFINITY;
    let mut res_rel = 1.0f64;
    let mut calm = 0u32;
    let mut best = f64::INFINITY;
    for _ in 0..outer_cap {
        // warm start from the current iterate, scaled by the last Rayleigh
        // quotient
        if rho_prev.is_finite() && rho_prev > 0.0 {
            for i in 0..n {
                y[i] = x[i] / rho_prev;
            }
        } else {
            y.iter_mut().for_each(|v| *v = 0.0);
        }
        let inner_tol = (0.01 * res_rel * res_rel).clamp(1e-13, 1e-5);
        cg_solve(lap, &x, &mut y, &mut proj, inner_tol, inner_cap);
        proj.project(&mut y);
        let ny = norm(&y);
        if ny == 0.0 {
            break;
        }
        y.iter_mut().for_each(|v| *v /= ny);
        lap.matvec(&y, &mut ly);
        let rho = dot(&y, &ly);
        let mut res = 0.0;
        for i in 0..n {
            let d = ly[i] - rho * y[i];
            res += d * d;
        }
        res = res.sqrt();
        res_rel = res / rho.max(f64::MIN_POSITIVE);
        best = rho.min(best);
        let delta_ok = (rho_prev - rho).abs() <= 0.1 * RELATIVE_TOL * rho.max(f64::MIN_POSITIVE);
        calm = if delta_ok { calm + 1 } else { 0 };
        x.copy_from_slice(&y);
        rho_prev = rho;
        if res_rel <= 0.1 * RELATIVE_TOL || calm >= 2 {
            return Ok((rho, y));
        }
    }
    Err(Error::NoConvergence {
        iterations: outer_cap,
        best,
    })
}

/// Smallest eigenvalue above the kernel; dense up to [`DENSE_LIMIT`]
/// vertices, iterative beyond.
pub fn spectral_gap(lap: &SparseLaplacian, components: usize) -> Result<f64> {
    if lap.dim() <= DENSE_LIMIT {
        lambda2_dense(lap, components)
    } else {
        lambda2_iterative(lap, components)
    }
}

pub fn spectral_gap_with_vector(
    lap: &SparseLaplacian,
    components: usize,
) -> Result<(f64, Vec<f64>)> {
    if lap.dim() <= DENSE_LIMIT {
        lambda2_dense_with_vector(lap, components)
    } else {
        lambda2_iterative_with_vector(lap, components)
    }
}

/// A sweep cut: the best prefix (or suffix) of the vertices sorted along
/// the Fiedler vector.
#[derive(Debug, Clone)]
pub struct CheegerReport {
    /// Vertices of the side with at most half the graph.
    pub cut_set: Vec<u32>,
    pub boundary_edges: usize,
    /// `boundary_edges / |cut_set|`.
    pub ratio: f64,
    pub lambda2: f64,
}

/// Sweeps the Fiedler order of a connected graph, minimizing
/// `|edge boundary| / |A|` over prefixes and suffixes of size at most
/// `n/2`.
pub fn cheeger_sweep(lap: &SparseLaplacian, graph: &LabeledGraph) -> Result<CheegerReport> {
    let n = graph.vertex_count();
    if !graph.is_connected() || n < 2 {
        return Err(Error::invalid("cheeger sweep needs a connected graph"));
    }
    let (lambda2, fiedler) = spectral_gap_with_vector(lap, 1)?;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        fiedler[a as usize]
            .total_cmp(&fiedler[b as usize])
            .then(a.cmp(&b))
    });
    let mut in_a = vec![false; n];
    let mut cut = 0usize;
    let mut best: Option<(usize, usize, bool)> = None; // (cut, prefix length, prefix?)
    let mut best_ratio = f64::INFINITY;
    for k in 1..n {
        let v = order[k - 1];
        for &w in graph.neighbors(v) {
            if in_a[w as usize] {
                cut -= 1;
            } else {
                cut += 1;
            }
        }
        in_a[v as usize] = true;
        if 2 * k <= n {
            let ratio = cut as f64 / k as f64;
            if ratio < best_ratio {
                best_ratio = ratio;
                best = Some((cut, k, true));
            }
        }
        if 2 * (n - k) <= n {
            let ratio = cut as f64 / (n - k) as f64;
            if ratio < best_ratio {
                best_ratio = ratio;
                best = Some((cut, k, false));
            }
        }
    }
    let (boundary_edges, k, prefix) = best.expect("n >= 2 yields at least one candidate");
    let mut cut_set: Vec<u32> = if prefix {
        order[..k].to_vec()
    } else {
        order[k..].to_vec()
    };
    cut_set.sort_unstable();
    Ok(CheegerReport {
        ratio: boundary_edges as f64 / cut_set.len() as f64,
        boundary_edges,
        cut_set,
        lambda2,
    })
}

#[derive(Debug, Clone)]
pub struct StageGap {
    pub stage: usize,
    pub size: usize,
    pub components: usize,
    pub gap: f64,
    pub pass: bool,
}

/// Per-stage gap report with a uniform lower bound verdict.
#[derive(Debug, Clone)]
pub struct ExpanderCertificate {
    pub bound: f64,
    pub radius: u32,
    pub stages: Vec<StageGap>,
    pub pass: bool,
}

/// Certifies `lambda2 >= bound` at entourage radius `radius` on every
/// stage. Failures are recorded, not raised.
pub fn expander_certificate(
    family: &ApproximationFamily,
    bound: f64,
    radius: u32,
) -> Result<ExpanderCertificate> {
    let mut stages = Vec::new();
    let mut all = true;
    for (i, stage) in family.stages.iter().enumerate() {
        let lap = laplacian(&stage.graph, radius);
        let (_, count) = lap.components();
        let gap = spectral_gap(&lap, count)?;
        let pass = count == 1 && gap >= bound;
        all &= pass;
        stages.push(StageGap {
            stage: i,
            size: stage.graph.vertex_count(),
            components: count,
            gap,
            pass,
        });
    }
    Ok(ExpanderCertificate {
        bound,
        radius,
        stages,
        pass: all,
    })
}

/// A symmetric kernel with zero diagonal on a finite point set.
#[derive(Debug, Clone)]
pub struct KernelTable {
    n: usize,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = f(i, j);
            }
        }
        Self::from_flat(n, values)
    }

    pub fn from_flat(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::invalid("kernel table must be square"));
        }
        for i in 0..n {
            if values[i * n + i].abs() > 1e-12 {
                return Err(Error::invalid("kernel diagonal must vanish"));
            }
            for j in (i + 1)..n {
                if (values[i * n + j] - values[j * n + i]).abs() > 1e-12 {
                    return Err(Error::invalid("kernel must be symmetric"));
                }
            }
        }
        Ok(KernelTable { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Restriction of the kernel to a subset of points.
    pub fn restrict(&self, points: &[usize]) -> KernelTable {
        let m = points.len();
        let mut values = vec![0.0; m * m];
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                values[a * m + b] = self.get(i, j);
            }
        }
        KernelTable { n: m, values }
    }

    /// Quadratic form `sum_ij c_i c_j K(i, j)`.
    pub fn form(&self, c: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let ci = c[i];
            if ci == 0.0 {
                continue;
            }
            for j in 0..self.n {
                acc += ci * c[j] * self.values[i * self.n + j];
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct CndReport {
    pub passed: bool,
    /// Largest eigenvalue of the centered kernel.
    pub max_centered_eigenvalue: f64,
}

/// Conditional negative definiteness: the quadratic form must stay at or
/// below `tol` on every mean-zero unit vector, decided by the spectrum of
/// the centered kernel `P K P`.
pub fn verify_cnd(kernel: &KernelTable, tol: f64) -> Result<CndReport> {
    let n = kernel.len();
    if n == 0 {
        return Err(Error::invalid("empty kernel"));
    }
    let k = DMatrix::from_fn(n, n, |i, j| kernel.get(i, j));
    let ones = DVector::from_element(n, 1.0 / n as f64);
    let p = DMatrix::identity(n, n) - DVector::from_element(n, 1.0) * ones.transpose();
    let centered = &p * k * p.transpose();
    let sym = (&centered + centered.transpose()) * 0.5;
    let (values, _) = sorted_eigen(&sym);
    let max = *values.last().expect("nonempty");
    Ok(CndReport {
        passed: max <= tol,
        max_centered_eigenvalue: max,
    })
}

#[derive(Debug, Clone)]
pub struct StageEmbeddingReport {
    pub stage: usize,
    pub sandwich_ok: bool,
    /// `(x, y, distance, kernel value)` of the first sandwich violation.
    pub sandwich_violation: Option<(u32, u32, u32, f64)>,
    pub cnd_ok: bool,
    /// Center of the first sampled subset whose restricted kernel failed.
    pub cnd_failure_center: Option<u32>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub stages: Vec<StageEmbeddingReport>,
    pub pass: bool,
}

const EMBEDDING_SUBSET_CAP: usize = 16;
const CND_TOL: f64 = 1e-9;

/// Checks the control-function sandwich on all pairs of every stage and
/// conditional negative definiteness on sampled subsets of diameter at
/// most the per-stage radius.
pub fn verify_asymptotic_embedding(
    family: &ApproximationFamily,
    kernels: &[KernelTable],
    rho1: &dyn Fn(f64) -> f64,
    rho2: &dyn Fn(f64) -> f64,
    radii: &[u32],
    samples: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    if kernels.len() != family.stages.len() || radii.len() != family.stages.len() {
        return Err(Error::invalid("need one kernel and one radius per stage"));
    }
    let mut out = Vec::new();
    let mut all = true;
    for (i, stage) in family.stages.iter().enumerate() {
        let g = &stage.graph;
        let n = g.vertex_count();
        if kernels[i].len() != n {
            return Err(Error::invalid(format!(
                "kernel {i} has {} points but the stage has {n}",
                kernels[i].len()
            )));
        }
        let mut sandwich_ok = true;
        let mut violation = None;
        // distinct pairs only: the kernels are normalized to a zero
        // diagonal
        'pairs: for x in 0..n as u32 {
            let dist = g.bfs_distances(x, None);
            for y in 0..n as u32 {
                let d = dist[y as usize];
                if y == x || d == UNREACHED {
                    continue;
                }
                let k = kernels[i].get(x as usize, y as usize);
                if rho1(d as f64) > k + 1e-12 || k > rho2(d as f64) + 1e-12 {
                    sandwich_ok = false;
                    violation = Some((x, y, d, k));
                    break 'pairs;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (i as u64)));
        let mut cnd_ok = true;
        let mut failure_center = None;
        for _ in 0..samples {
            let center = rng.random_range(0..n as u32);
            let ball = g.ball_vertices(center, radii[i] / 2);
            let mut points: Vec<usize> = ball.iter().map(|&v| v as usize).collect();
            while points.len() > EMBEDDING_SUBSET_CAP {
                let drop = rng.random_range(1..points.len());
                points.swap_remove(drop);
            }
            points.sort_unstable();
            let sub = kernels[i].restrict(&points);
            if !verify_cnd(&sub, CND_TOL)?.passed {
                cnd_ok = false;
                failure_center = Some(center);
                break;
            }
        }
        let pass = sandwich_ok && cnd_ok;
        all &= pass;
        out.push(StageEmbeddingReport {
            stage: i,
            sandwich_ok,
            sandwich_violation: violation,
            cnd_ok,
            cnd_failure_center: failure_center,
            pass,
        });
    }
    Ok(EmbeddingReport {
        stages: out,
        pass: all,
    })
}
