#![no_std]
#![warn(rust_2018_idioms, missing_copy_implementations, unused_qualifications)]

//! Part hierarchies of binary shapes from a non-local phase field.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! 1. [`grid`] and [`distance`]: the shape raster and its exact Euclidean
//!    distance transform.
//! 2. [`solver`]: the field ω minimizing a screened Dirichlet energy whose
//!    data term is the distance transform and whose interaction term carries
//!    the squared mean of ω over the shape.
//! 3. [`topology`]: the zero-level split of the shape into a central (ω > 0)
//!    and peripheral (ω < 0) structure, and merge trees of the nested level
//!    sets inside each.
//! 4. [`parts`]: the initial part tree with watershed parts, size and
//!    adjacency filters, and node attributes.
//! 5. [`random`] and [`matching`]: the randomized re-organization of the part
//!    tree and clique-based matching of sampled trees.
//!
//! Everything here is allocation-only; file formats, rendering and the CLI
//! live in the `parthier` crate.

extern crate alloc;

pub mod distance;
pub mod error;
pub mod grid;
pub mod matching;
pub mod parts;
pub mod random;
pub mod rle;
pub mod solver;
pub mod topology;

mod heap;
mod unionfind;

pub use distance::{distance_transform, DistanceField};
pub use error::{Error, ErrorKind, Result};
pub use grid::{Connectivity, Lattice, ShapeGrid, SyntheticShape};
pub use matching::{
    build_association, match_shapes, max_clique, similarity, AssociationGraph, MatchConfig, Matching, ShapeNorms,
};
pub use parts::{apply_filters, build_initial_tree, watershed_parts, FilterConfig, PartNode, PartTree};
pub use random::{organization_distribution, randomize, sample, RandomizedTree, SampledTree};
pub use solver::{default_rho, energy, solve, Field, RhoPolicy, SolverParams};
pub use topology::{euler_characteristic, sign_decompose, split_tree, Sign, SignRegion, SplitForest, SplitTree};
