//! Python bindings: group models, approximation families and the main
//! measurement operations.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use soficlab::amenability::{self, SearchStrategy};
use soficlab::coarse;
use soficlab::generators;
use soficlab::group::{GroupModel as CoreModel, Word};
use soficlab::io::ConstructionSpec;
use soficlab::localstats;
use soficlab::spectral;

fn err(e: soficlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finitely generated group with computable multiplication and shortlex
/// normal forms.
#[pyclass(frozen)]
struct GroupModel {
    inner: Arc<CoreModel>,
}

#[pymethods]
impl GroupModel {
    #[staticmethod]
    fn free_abelian(rank: usize) -> PyResult<Self> {
        Ok(GroupModel {
            inner: Arc::new(CoreModel::free_abelian(rank).map_err(err)?),
        })
    }

    #[staticmethod]
    fn free_group(rank: usize) -> PyResult<Self> {
        Ok(GroupModel {
            inner: Arc::new(CoreModel::free_group(rank).map_err(err)?),
        })
    }

    #[staticmethod]
    fn finite_cyclic_power(modulus: u64, rank: usize) -> PyResult<Self> {
        Ok(GroupModel {
            inner: Arc::new(CoreModel::finite_cyclic_power(modulus, rank).map_err(err)?),
        })
    }

    #[staticmethod]
    fn symmetric_group(degree: usize) -> PyResult<Self> {
        Ok(GroupModel {
            inner: Arc::new(CoreModel::symmetric_group(degree).map_err(err)?),
        })
    }

    /// Generator names (one-sided; inverses are written `a^-1`).
    fn generators(&self) -> Vec<String> {
        self.inner.generating_set().names().to_vec()
    }

    /// Number of elements of word length at most `radius`.
    fn ball_size(&self, radius: u32) -> PyResult<usize> {
        Ok(self.inner.ball_elements(radius).map_err(err)?.len())
    }

    /// Whether a whitespace-separated word (e.g. `"a b a^-1"`) evaluates
    /// to the identity.
    fn is_identity(&self, word: &str) -> PyResult<bool> {
        let w = Word::parse(self.inner.generating_set(), word).map_err(err)?;
        self.inner.is_identity_word(&w).map_err(err)
    }
}

/// An ordered family of finite approximation stages.
#[pyclass(frozen)]
struct Family {
    inner: generators::ApproximationFamily,
}

fn build_family(spec: ConstructionSpec, seed: u64, cap: usize) -> PyResult<Family> {
    Ok(Family {
        inner: spec.build(seed, cap).map_err(err)?,
    })
}

#[pymethods]
impl Family {
    /// Exact finite quotients `(Z/n)^dim` acting by translation.
    #[staticmethod]
    #[pyo3(signature = (dim, moduli, cap=1_000_000))]
    fn quotient(dim: usize, moduli: Vec<u64>, cap: usize) -> PyResult<Self> {
        build_family(ConstructionSpec::Quotient { dim, moduli }, 0, cap)
    }

    /// Box translations completed to permutations by the ascending rule.
    #[staticmethod]
    #[pyo3(signature = (dim, boxes, cap=1_000_000))]
    fn folner_boxes(dim: usize, boxes: Vec<u64>, cap: usize) -> PyResult<Self> {
        build_family(ConstructionSpec::FolnerBoxes { dim, boxes }, 0, cap)
    }

    /// Independent uniform permutations per generator and stage.
    #[staticmethod]
    #[pyo3(signature = (rank, sizes, seed, cap=1_000_000))]
    fn random_permutations(rank: usize, sizes: Vec<usize>, seed: u64, cap: usize) -> PyResult<Self> {
        build_family(ConstructionSpec::RandomPermutations { rank, sizes }, seed, cap)
    }

    /// Disjoint unions of cycles and degree-three high-girth blocks of
    /// equal size.
    #[staticmethod]
    #[pyo3(signature = (cycles, blocks, sizes, girth_target, seed, cap=1_000_000))]
    fn mixed(
        cycles: usize,
        blocks: usize,
        sizes: Vec<usize>,
        girth_target: u32,
        seed: u64,
        cap: usize,
    ) -> PyResult<Self> {
        build_family(
            ConstructionSpec::Mixed {
                cycle_blocks: cycles,
                total_blocks: blocks,
                sizes,
                girth_target,
            },
            seed,
            cap,
        )
    }

    fn stage_sizes(&self) -> Vec<usize> {
        self.inner.stage_sizes()
    }

    fn achieved_girths(&self) -> Vec<Option<u32>> {
        self.inner.stages.iter().map(|s| s.meta.achieved_girth).collect()
    }

    /// Good-set defect per stage for the test set `F = B_radius(e)`.
    fn good_set_defects(&self, radius: u32) -> PyResult<Vec<f64>> {
        let model = self
            .inner
            .model
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("family has no group model"))?;
        let f = model.ball_elements(radius).map_err(err)?;
        self.inner
            .stages
            .iter()
            .map(|s| {
                s.action
                    .as_ref()
                    .ok_or_else(|| PyValueError::new_err("stage has no almost action"))
                    .and_then(|a| Ok(a.good_set(&f).map_err(err)?.defect()))
            })
            .collect()
    }

    /// Fraction of vertices whose r-ball differs from the Cayley r-ball.
    fn bs_defects(&self, radius: u32) -> PyResult<Vec<f64>> {
        let model = self
            .inner
            .model
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("family has no group model"))?;
        self.inner
            .stages
            .iter()
            .map(|s| {
                localstats::bs_defect(&s.graph, radius, model)
                    .map(|r| r.value())
                    .map_err(err)
            })
            .collect()
    }

    /// Laplacian gap above the kernel per stage, at the given entourage
    /// radius.
    fn spectral_gaps(&self, entourage: u32) -> PyResult<Vec<f64>> {
        self.inner
            .stages
            .iter()
            .map(|s| {
                let lap = spectral::laplacian(&s.graph, entourage);
                let (_, comps) = lap.components();
                spectral::spectral_gap(&lap, comps).map_err(err)
            })
            .collect()
    }

    /// `(ratio, boundary_edges, set_size)` of the best sweep cut.
    fn cheeger(&self, stage: usize) -> PyResult<(f64, usize, usize)> {
        let s = self
            .inner
            .stages
            .get(stage)
            .ok_or_else(|| PyValueError::new_err("stage out of range"))?;
        let lap = spectral::laplacian(&s.graph, 1);
        let rep = spectral::cheeger_sweep(&lap, &s.graph).map_err(err)?;
        Ok((rep.ratio, rep.boundary_edges, rep.cut_set.len()))
    }

    /// Line-like vertex mass per stage at the given ball radius.
    fn amenable_mass(&self, radius: u32) -> PyResult<Vec<f64>> {
        Ok(amenability::amenable_mass_estimate(&self.inner, radius)
            .map_err(err)?
            .iter()
            .map(|m| m.fraction())
            .collect())
    }

    /// `(set_size, boundary_size, ratio)` of a Folner witness, or None.
    fn folner_witness(
        &self,
        stage: usize,
        radius: u32,
        eps: f64,
    ) -> PyResult<Option<(usize, usize, f64)>> {
        let s = self
            .inner
            .stages
            .get(stage)
            .ok_or_else(|| PyValueError::new_err("stage out of range"))?;
        Ok(
            amenability::folner_search(&s.graph, radius, eps, SearchStrategy::Auto)
                .map(|w| (w.set.len(), w.boundary_size, w.ratio())),
        )
    }

    /// `(part_count, max_part, cut_edges)` of a bounded-part partition.
    fn hyperfinite_partition(&self, stage: usize, cap: usize) -> PyResult<(usize, usize, usize)> {
        let s = self
            .inner
            .stages
            .get(stage)
            .ok_or_else(|| PyValueError::new_err("stage out of range"))?;
        let p = amenability::hyperfinite_partition(&s.graph, cap).map_err(err)?;
        let max_part = p.parts.iter().map(Vec::len).max().unwrap_or(0);
        Ok((p.parts.len(), max_part, p.cut_edges))
    }

    /// Measured `(mult, add, codensity)` of a vertex map between a stage
    /// of this family and a stage of another.
    fn verify_qi(
        &self,
        stage: usize,
        other: &Family,
        other_stage: usize,
        map: Vec<u32>,
    ) -> PyResult<(f64, f64, u32)> {
        let x = &self
            .inner
            .stages
            .get(stage)
            .ok_or_else(|| PyValueError::new_err("stage out of range"))?
            .graph;
        let y = &other
            .inner
            .stages
            .get(other_stage)
            .ok_or_else(|| PyValueError::new_err("stage out of range"))?
            .graph;
        let c = coarse::verify_qi(x, y, &map, 0).map_err(err)?;
        Ok((c.mult, c.add, c.codensity))
    }
}

/// Conditional negative definiteness of a symmetric zero-diagonal kernel,
/// decided by the centered spectrum.
#[pyfunction]
fn verify_cnd(matrix: Vec<Vec<f64>>, tol: f64) -> PyResult<bool> {
    let n = matrix.len();
    let mut flat = Vec::with_capacity(n * n);
    for row in &matrix {
        if row.len() != n {
            return Err(PyValueError::new_err("kernel matrix must be square"));
        }
        flat.extend_from_slice(row);
    }
    let table = spectral::KernelTable::from_flat(n, flat).map_err(err)?;
    Ok(spectral::verify_cnd(&table, tol).map_err(err)?.passed)
}

/// Per-stage seed derived from a master seed.
#[pyfunction]
fn stage_seed(master: u64, index: usize) -> u64 {
    generators::stage_seed(master, index)
}

#[pymodule]
fn soficlab_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GroupModel>()?;
    m.add_class::<Family>()?;
    m.add_function(wrap_pyfunction!(verify_cnd, m)?)?;
    m.add_function(wrap_pyfunction!(stage_seed, m)?)?;
    Ok(())
}
