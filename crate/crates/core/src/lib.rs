//! soficlab: finite approximations of finitely generated groups and their
//! coarse-geometric signatures.
//!
//! The crate builds finite almost actions of concrete group models,
//! measures how good they are (good sets, local ball statistics), and
//! analyzes the resulting graph families: Laplacian spectral gaps and
//! expander certificates, Folner sets and hyperfinite partitions,
//! conditionally negative definite kernels, and quasi-isometry witness
//! verification between families.

pub mod action;
pub mod amenability;
pub mod coarse;
pub mod error;
pub mod generators;
pub mod graph;
pub mod group;
pub mod io;
pub mod localstats;
pub mod perm;
pub mod spectral;

pub use action::{AlmostAction, GoodSetReport};
pub use error::{Error, Result};
pub use generators::{ApproximationFamily, Stage, StageMeta};
pub use graph::{LabeledGraph, RootedBall};
pub use group::{Element, GeneratingSet, GroupKind, GroupModel, Letter, Word};
pub use perm::Permutation;
