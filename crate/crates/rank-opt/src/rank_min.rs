use matrix_core::{numerical_rank, sym_eig, Matrix, DEFAULT_RANK_TOL};
use rank_cert::{right_certificate, verify_certificate, Side, DEFAULT_CERT_TOL};

use crate::problem::{validate_bounds, AffineMatrixMap, SolveReport, SolveStatus, SolverConfig};
use crate::qp::{clamp_to_bounds, minimize_quadratic, penalty_terms};
use crate::{OptError, PENALTY_CAP};

/// Minimizes `rank(G(θ))` over the box, reporting `r* = n − round(trace(W))`.
///
/// The rank objective is recast through its epigraph: minimize
/// `n − trace(W)` over `0 ⪯ W ⪯ I` subject to `G(θ)W = 0`. For a constant
/// map this collapses to a closed form — `W` is the projector onto the
/// null space of `G` — and for parametric maps the solver alternates the
/// penalized steps: the `W`-step maximizing
/// `trace(W) − λ·trace(G(θ)ᵀG(θ)·W)` is the spectral projector onto
/// eigenvectors of `G(θ)ᵀG(θ)` with eigenvalue below `1/λ`, and the
/// `θ`-step is the usual quadratic solve. The final trace is rounded and
/// the result re-certified at that integer rank; a failed re-certification
/// downgrades the status.
pub fn solve_rank_min(
    map: &AffineMatrixMap,
    bounds: Option<Vec<(f64, f64)>>,
    config: &SolverConfig,
) -> Result<SolveReport, OptError> {
    config.validate()?;
    validate_bounds(&bounds, map.arity())?;
    if map.arity() == 0 {
        return constant_rank_min(map.base(), config);
    }
    parametric_rank_min(map, bounds.as_deref(), config)
}

fn constant_rank_min(g: &Matrix, config: &SolverConfig) -> Result<SolveReport, OptError> {
    let n = g.cols();
    let rank = numerical_rank(g, DEFAULT_RANK_TOL);
    let cert = right_certificate(g, rank, DEFAULT_RANK_TOL)?;
    let residual = cert.residual;
    let verification = verify_certificate(g, &cert.w, Side::Right, DEFAULT_CERT_TOL)?;
    let objective = n as f64 - cert.w.trace();
    Ok(SolveReport {
        theta: Vec::new(),
        w: cert.w,
        objective_trajectory: vec![objective + config.penalty_init * residual * residual],
        residual_trajectory: vec![residual],
        penalty_trajectory: vec![config.penalty_init],
        final_objective: objective,
        final_residual: residual,
        certified: verification.valid && verification.certified_bound == rank,
        iterations: 1,
        status: SolveStatus::Converged,
        rank_estimate: Some(rank),
    })
}

fn parametric_rank_min(
    map: &AffineMatrixMap,
    bounds: Option<&[(f64, f64)]>,
    config: &SolverConfig,
) -> Result<SolveReport, OptError> {
    let n = map.dims().1;
    let p = map.arity();
    let start = config.theta_init.clone().unwrap_or_else(|| vec![0.0; p]);
    if start.len() != p {
        return Err(OptError::InitDimensionMismatch {
            expected: p,
            got: start.len(),
        });
    }
    let mut theta = clamp_to_bounds(&start, bounds);
    let mut lambda = config.penalty_init;
    let mut w = Matrix::zeros(n, n);
    let mut objective_trajectory = Vec::new();
    let mut residual_trajectory = Vec::new();
    let mut penalty_trajectory = Vec::new();
    let mut prev_residual = f64::INFINITY;
    let mut prev_trace = f64::INFINITY;
    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;

    let mut logged: Option<(f64, f64)> = None; // (λ, penalized value) of the last round

    for iter in 1..=config.max_outer_iters {
        iterations = iter;

        let theta_before = theta.clone();
        let w_before = w.clone();

        let g = map.eval(&theta);
        w = trace_max_step(&g, lambda)?;

        // θ-step: only the penalty depends on θ.
        let (gram, lin, _) = penalty_terms(map, &w);
        let b: Vec<f64> = lin.iter().map(|q| 2.0 * lambda * q).collect();
        theta = minimize_quadratic(&gram.scale(2.0 * lambda), &b, bounds, &theta);

        let g = map.eval(&theta);
        let mut residual = g.matmul(&w).frobenius_norm();
        let mut penalized = n as f64 - w.trace() + lambda * residual * residual;

        // Same monotone safeguard as the rank-constrained loop.
        if let Some((logged_lambda, logged_value)) = logged {
            if logged_lambda == lambda && penalized > logged_value {
                theta = theta_before;
                w = w_before;
                let g = map.eval(&theta);
                residual = g.matmul(&w).frobenius_norm();
                penalized = logged_value;
            }
        }
        logged = Some((lambda, penalized));
        let trace = w.trace();
        objective_trajectory.push(penalized);
        residual_trajectory.push(residual);
        penalty_trajectory.push(lambda);

        if residual <= config.stop_residual && (trace - prev_trace).abs() <= 1e-9 {
            status = SolveStatus::Converged;
            break;
        }
        if residual > 0.5 * prev_residual && lambda < PENALTY_CAP {
            lambda = (lambda * config.penalty_growth).min(PENALTY_CAP);
        }
        prev_residual = residual;
        prev_trace = trace;
    }

    let g = map.eval(&theta);
    let trace = w.trace();
    let rank_estimate = n.saturating_sub(trace.round() as usize).min(n);

    // Re-certify at the rounded rank; if the matrix cannot actually be
    // certified there, say so by downgrading.
    let mut certified = false;
    match right_certificate(&g, rank_estimate, DEFAULT_RANK_TOL) {
        Ok(cert) => {
            w = cert.w;
            let verification = verify_certificate(&g, &w, Side::Right, DEFAULT_CERT_TOL)?;
            certified = verification.valid && verification.certified_bound == rank_estimate;
        }
        Err(_) => {
            if status == SolveStatus::Converged {
                status = SolveStatus::MaxIters;
            }
        }
    }

    let final_residual = g.matmul(&w).frobenius_norm();
    Ok(SolveReport {
        theta,
        w,
        objective_trajectory,
        residual_trajectory,
        penalty_trajectory,
        final_objective: rank_estimate as f64,
        final_residual,
        certified: certified && status == SolveStatus::Converged,
        iterations,
        status,
        rank_estimate: Some(rank_estimate),
    })
}

/// Maximizer of `trace(W) − λ·trace(SW)` over `0 ⪯ W ⪯ I` for
/// `S = GᵀG`: the spectral projector onto eigenvectors with `λ_i(S) < 1/λ`.
fn trace_max_step(g: &Matrix, lambda: f64) -> Result<Matrix, OptError> {
    let n = g.cols();
    let gram = g.transpose().matmul(g).symmetrized();
    let eig = sym_eig(&gram)?;
    let threshold = 1.0 / lambda;
    // Eigenvalues are sorted nonincreasing; the kept ones are a suffix.
    let first_kept = eig.values.iter().position(|&v| v < threshold);
    match first_kept {
        None => Ok(Matrix::zeros(n, n)),
        Some(k) => {
            let basis = eig.right_vectors.column_range(k, n);
            Ok(basis.matmul(&basis.transpose()))
        }
    }
}
