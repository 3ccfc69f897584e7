use matrix_core::{sym_eig, Matrix};
use serde::{Deserialize, Serialize};

use crate::OptError;

/// Affine family `G(θ) = G₀ + Σ_k θ_k·G_k` of `m×n` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMatrixMap {
    base: Matrix,
    coefficients: Vec<Matrix>,
}

impl AffineMatrixMap {
    pub fn new(base: Matrix, coefficients: Vec<Matrix>) -> Result<Self, OptError> {
        let (m, n) = base.dims();
        for (index, g) in coefficients.iter().enumerate() {
            if g.dims() != (m, n) {
                return Err(OptError::MapDimensionMismatch {
                    index,
                    rows: g.rows(),
                    cols: g.cols(),
                    expected_rows: m,
                    expected_cols: n,
                });
            }
        }
        Ok(Self { base, coefficients })
    }

    /// A family with no parameters, `G(·) ≡ G₀`.
    pub fn constant(base: Matrix) -> Self {
        Self {
            base,
            coefficients: Vec::new(),
        }
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.coefficients
    }

    /// Number of parameters `p`.
    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.base.dims()
    }

    pub fn eval(&self, theta: &[f64]) -> Matrix {
        assert_eq!(theta.len(), self.arity(), "parameter count mismatch");
        let mut out = self.base.clone();
        for (t, g) in theta.iter().zip(&self.coefficients) {
            if *t != 0.0 {
                out = out.add(&g.scale(*t));
            }
        }
        out
    }
}

/// Convex quadratic `f(θ) = ½·θᵀHθ + cᵀθ + d` with `H` symmetric PSD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticObjective {
    h: Matrix,
    c: Vec<f64>,
    d: f64,
}

impl QuadraticObjective {
    pub fn new(h: Matrix, c: Vec<f64>, d: f64) -> Result<Self, OptError> {
        if !h.is_square() || h.rows() != c.len() {
            return Err(OptError::ObjectiveDimensionMismatch {
                expected: c.len(),
                got: h.rows(),
            });
        }
        let scale = h.frobenius_norm().max(1.0);
        if h.max_asymmetry() > 1e-8 * scale {
            return Err(OptError::ObjectiveNotPsd(f64::NAN));
        }
        let eig = sym_eig(&h.symmetrized())?;
        if let Some(&min) = eig.values.last() {
            if min < -1e-8 * scale {
                return Err(OptError::ObjectiveNotPsd(min));
            }
        }
        Ok(Self { h, c, d })
    }

    pub fn arity(&self) -> usize {
        self.c.len()
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        assert_eq!(theta.len(), self.arity(), "parameter count mismatch");
        let htheta = self.h.matvec(theta);
        let quad: f64 = theta.iter().zip(&htheta).map(|(t, h)| t * h).sum();
        let lin: f64 = theta.iter().zip(&self.c).map(|(t, c)| t * c).sum();
        0.5 * quad + lin + self.d
    }
}

/// A rank-constrained problem: minimize `f(θ)` over an optional box,
/// subject to `rank(G(θ)) ≤ rank_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProblem {
    pub objective: QuadraticObjective,
    pub map: AffineMatrixMap,
    /// Per-coordinate `[lo, hi]` box, or `None` for unconstrained θ.
    pub bounds: Option<Vec<(f64, f64)>>,
    pub rank_bound: usize,
}

impl RankProblem {
    pub fn new(
        objective: QuadraticObjective,
        map: AffineMatrixMap,
        bounds: Option<Vec<(f64, f64)>>,
        rank_bound: usize,
    ) -> Result<Self, OptError> {
        if objective.arity() != map.arity() {
            return Err(OptError::ObjectiveDimensionMismatch {
                expected: map.arity(),
                got: objective.arity(),
            });
        }
        let (_, n) = map.dims();
        if rank_bound > n {
            return Err(OptError::RankBoundTooLarge {
                requested: rank_bound,
                cols: n,
            });
        }
        validate_bounds(&bounds, map.arity())?;
        Ok(Self {
            objective,
            map,
            bounds,
            rank_bound,
        })
    }
}

pub(crate) fn validate_bounds(
    bounds: &Option<Vec<(f64, f64)>>,
    arity: usize,
) -> Result<(), OptError> {
    if let Some(b) = bounds {
        if b.len() != arity {
            return Err(OptError::BoundsDimensionMismatch {
                expected: arity,
                got: b.len(),
            });
        }
        for (index, &(lo, hi)) in b.iter().enumerate() {
            if lo > hi {
                return Err(OptError::InvalidBounds { index, lo, hi });
            }
        }
    }
    Ok(())
}

/// Knobs shared by all solvers. The defaults follow standard exterior
/// penalty practice: unit initial weight, tenfold growth on stall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_outer_iters: usize,
    pub penalty_init: f64,
    pub penalty_growth: f64,
    pub stop_residual: f64,
    pub stop_objective_delta: f64,
    pub seed: u64,
    /// Starting point; when absent the solver minimizes `f` alone over the
    /// box and starts there.
    pub theta_init: Option<Vec<f64>>,
    /// Extra seeded starts tried when a run fails to certify; alternating
    /// minimization can stall at non-global points, and perturbed restarts
    /// are the escape hatch.
    pub restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 200,
            penalty_init: 1.0,
            penalty_growth: 10.0,
            stop_residual: 1e-8,
            stop_objective_delta: 1e-10,
            seed: 0,
            theta_init: None,
            restarts: 8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        if self.max_outer_iters == 0 {
            return Err(OptError::InvalidConfig("max_outer_iters must be positive"));
        }
        if !(self.penalty_init > 0.0) {
            return Err(OptError::InvalidConfig("penalty_init must be positive"));
        }
        if !(self.penalty_growth > 1.0) {
            return Err(OptError::InvalidConfig("penalty_growth must exceed 1"));
        }
        if !(self.stop_residual > 0.0) {
            return Err(OptError::InvalidConfig("stop_residual must be positive"));
        }
        if !(self.stop_objective_delta > 0.0) {
            return Err(OptError::InvalidConfig(
                "stop_objective_delta must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

/// Trajectory and outcome of a solver run.
///
/// `objective_trajectory[t]` is the penalized value
/// `f(θ_t) + λ_t·‖G(θ_t)W_t‖_F²` (for rank minimization the `f` part is
/// `n − trace(W_t)`), with the weight used that round in
/// `penalty_trajectory[t]`; the penalized value is nonincreasing within
/// each fixed-weight phase. `final_objective` and `final_residual` describe
/// the returned point, which may improve on the last logged round through
/// an exact feasibility-restoration step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub theta: Vec<f64>,
    pub w: Matrix,
    pub objective_trajectory: Vec<f64>,
    pub residual_trajectory: Vec<f64>,
    pub penalty_trajectory: Vec<f64>,
    pub final_objective: f64,
    pub final_residual: f64,
    /// Result of the independent certificate check on the returned pair.
    pub certified: bool,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Minimized rank, populated by rank minimization only.
    pub rank_estimate: Option<usize>,
}
