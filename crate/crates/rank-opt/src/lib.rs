//! Solvers for rank-constrained and rank-minimization problems.
//!
//! Problems are posed over an affine matrix family
//! `G(θ) = G₀ + Σ_k θ_k·G_k`. A rank constraint `rank(G(θ)) ≤ r` is
//! handled through its certificate form — there must exist `W` in the set
//! `Φ_{n,r}` with `G(θ)·W = 0` — which replaces the rank function with a
//! bilinear equation. The solvers attack that equation with an exterior
//! penalty and exact alternating steps:
//!
//! * the `W`-step has the closed-form Ky Fan solution (projector onto the
//!   trailing eigenvectors of `G(θ)ᵀG(θ)`),
//! * the `θ`-step is a convex quadratic minimization (normal equations, or
//!   projected coordinate descent under box bounds),
//!
//! so the penalized objective is nonincreasing at fixed penalty weight.
//! Answers are certified independently through `rank-cert` before being
//! reported. None of the solvers claims global optimality; reports expose
//! full trajectories so callers can audit the run.

mod constrained;
mod error;
mod problem;
mod project;
mod qp;
mod rank_min;
mod sparse_ls;

pub use constrained::solve_rank_constrained;
pub use error::OptError;
pub use problem::{
    AffineMatrixMap, QuadraticObjective, RankProblem, SolveReport, SolveStatus, SolverConfig,
};
pub use project::project_rank;
pub use rank_min::solve_rank_min;
pub use sparse_ls::solve_sparse_ls;

/// Penalty weights are capped here to avoid conditioning collapse.
pub const PENALTY_CAP: f64 = 1e12;
