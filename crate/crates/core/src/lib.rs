//! Existence certificates and a semismooth Newton solver for box-constrained
//! variational inequalities and the quadratic games that reduce to them.
//!
//! A problem `VI(K, F)` asks for `x* ∈ K` with `F(x*)ᵀ(y - x*) >= 0` for all
//! `y ∈ K`. Everything here works through the normal map
//! `F_K^nor(v) = v - Π_K[v] + F(Π_K[v])`, whose zeros `v` give solutions
//! `x* = Π_K[v]`.

// `!(x > 0.0)` is used on purpose: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod error;
pub mod linalg;
pub mod model;
pub mod normal_map;
pub mod problem;
pub mod projection;
pub mod registry;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use model::{game_to_vi, jacobian, BoxSet, Builtin, Mapping, QuadraticGame, VIProblem};
pub use normal_map::{
    coercivity_probe, normal_map, normal_map_jacobian_element, ProbeConfig, ProbeVerdict,
};
pub use problem::{ProblemDef, ProblemKind};
pub use projection::{project, projection_jacobian_element, BoundaryRule};
pub use registry::{lookup, registry, ProblemRegistryEntry};
pub use solver::{
    classify, multistart, solve, Classification, SolveConfig, SolveResult, SolveStatus, StepKind,
};
