use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use harness_cli::bench::{run_bench, BenchConfig};
use harness_cli::error::HarnessError;
use harness_cli::report::{digest, InputDigest, ReportOutput, RunReport};
use harness_cli::{gen, io};
use matrix_core::Matrix;
use rank_cert::{left_certificate, right_certificate, verify_certificate, CertError, Side};
use rank_opt::{
    solve_rank_constrained, solve_rank_min, solve_sparse_ls, QuadraticObjective, RankProblem,
    SolveReport, SolveStatus, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "rankcert",
    version,
    about = "Rank certificates and rank-constrained solvers for dense real matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a rank certificate for a matrix file and verify it.
    Certify {
        /// Matrix file: header "m n", then m rows of n reals.
        matrix: PathBuf,
        /// Rank bound to certify.
        #[arg(short, long)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
        /// Relative tolerance for rank detection and verification.
        #[arg(long, default_value_t = rank_cert::DEFAULT_CERT_TOL)]
        tol: f64,
        /// Also write the report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Solve a problem file (rank-constrained, rank-min, or sparse-ls).
    Solve {
        problem: PathBuf,
        /// Expected problem mode; rejected if the file disagrees.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        penalty_init: Option<f64>,
        #[arg(long)]
        penalty_growth: Option<f64>,
        /// Residual threshold for convergence.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Generate a planted instance and write it to a file.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Planted rank (low-rank, affine-rank) or sparsity (sparse-ls).
        #[arg(long)]
        planted: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination file for the instance.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Run the seeded invariant suites and report pass/fail counts.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to the named suites (repeatable).
        #[arg(long)]
        suite: Vec<String>,
        /// Cap on matrix dimensions drawn by the suites.
        #[arg(long, default_value_t = 8)]
        dims_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(side: SideArg) -> Side {
        match side {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    RankConstrained,
    RankMin,
    SparseLs,
}

impl ModeArg {
    fn file_mode(self) -> &'static str {
        match self {
            ModeArg::RankConstrained => "rank_constrained",
            ModeArg::RankMin => "rank_min",
            ModeArg::SparseLs => "sparse_ls",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    LowRank,
    SparseLs,
    AffineRank,
}

/// Reports are a single structured-text document.
#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, HarnessError> {
    let started = Instant::now();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let (inputs, output, out_path, code) = match command {
        Command::Certify {
            matrix,
            rank,
            side,
            tol,
            out,
            format: FormatArg::Text,
        } => {
            let (inputs, output, code) = cmd_certify(&matrix, rank, side.into(), tol)?;
            (inputs, output, out, code)
        }
        Command::Solve {
            problem,
            mode,
            seed,
            max_iters,
            penalty_init,
            penalty_growth,
            tol,
            out,
            format: FormatArg::Text,
        } => {
            let mut config = SolverConfig {
                seed,
                ..SolverConfig::default()
            };
            if let Some(v) = max_iters {
                config.max_outer_iters = v;
            }
            if let Some(v) = penalty_init {
                config.penalty_init = v;
            }
            if let Some(v) = penalty_growth {
                config.penalty_growth = v;
            }
            if let Some(v) = tol {
                config.stop_residual = v;
            }
            let (inputs, output, code) = cmd_solve(&problem, mode, &config)?;
            (inputs, output, out, code)
        }
        Command::Gen {
            kind,
            rows,
            cols,
            planted,
            noise,
            seed,
            out,
            format: FormatArg::Text,
        } => {
            let output = cmd_gen(kind, rows, cols, planted, noise, seed, &out)?;
            (Vec::new(), output, None, 0)
        }
        Command::Bench {
            seed,
            suite,
            dims_cap,
            out,
            format: FormatArg::Text,
        } => {
            let config = BenchConfig {
                seed,
                dims_cap,
                suites: suite,
            };
            let groups = run_bench(&config);
            let all_passed = groups.iter().all(|g| g.passed);
            let output = ReportOutput::Bench {
                seed,
                dims_cap,
                groups,
                all_passed,
            };
            (Vec::new(), output, out, 0)
        }
    };

    let mut report = RunReport::new(echo, inputs, output);
    report.timing_ms = started.elapsed().as_millis() as u64;
    let text = report.to_text()?;
    print!("{text}");
    if let Some(path) = out_path {
        std::fs::write(&path, &text).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(code)
}

fn cmd_certify(
    path: &Path,
    rank: usize,
    side: Side,
    tol: f64,
) -> Result<(Vec<InputDigest>, ReportOutput, u8), HarnessError> {
    let file = io::MatrixFile::load(path)?;
    let matrix = file.matrix;
    let inputs = vec![digest("matrix", &file.path.display().to_string(), &matrix)];
    let constructed = match side {
        Side::Right => right_certificate(&matrix, rank, tol),
        Side::Left => left_certificate(&matrix, rank, tol),
    };
    match constructed {
        Ok(cert) => {
            let verification = verify_certificate(&matrix, &cert.w, side, tol)?;
            let code = if verification.valid { 0 } else { 2 };
            let output = ReportOutput::Certify {
                side: side.as_str().to_string(),
                requested_rank: rank,
                tol,
                valid: verification.valid,
                certified_bound: verification.certified_bound,
                residual: cert.residual,
                trace: cert.membership.trace,
                min_eigenvalue: cert.membership.min_eigenvalue,
                max_eigenvalue: cert.membership.max_eigenvalue,
                degenerate_cut: cert.degenerate_cut,
                justification: verification.justification,
                w: cert.w,
            };
            Ok((inputs, output, code))
        }
        Err(CertError::RankTooHigh {
            observed,
            requested,
        }) => {
            let output = ReportOutput::RankTooHigh {
                side: side.as_str().to_string(),
                requested_rank: requested,
                observed_rank: observed,
            };
            Ok((inputs, output, 2))
        }
        Err(other) => Err(other.into()),
    }
}

fn cmd_solve(
    path: &Path,
    mode: Option<ModeArg>,
    config: &SolverConfig,
) -> Result<(Vec<InputDigest>, ReportOutput, u8), HarnessError> {
    let file = io::read_problem(path)?;
    if let Some(expected) = mode {
        if expected.file_mode() != file.mode() {
            return Err(HarnessError::Usage(format!(
                "problem file is {}, but --mode asked for {}",
                file.mode(),
                expected.file_mode()
            )));
        }
    }
    let path_str = path.display().to_string();
    let mode_name = file.mode().to_string();
    let (inputs, report) = match file {
        io::ProblemFile::RankConstrained { problem, .. } => {
            let inputs = vec![digest("base", &path_str, problem.map.base())];
            (inputs, solve_rank_constrained(&problem, config)?)
        }
        io::ProblemFile::RankMin { map, bounds } => {
            let inputs = vec![digest("base", &path_str, map.base())];
            (inputs, solve_rank_min(&map, bounds, config)?)
        }
        io::ProblemFile::SparseLs {
            a, b, sparsity, ..
        } => {
            let inputs = vec![digest("a", &path_str, &a)];
            (inputs, solve_sparse_ls(&a, &b, sparsity, config)?)
        }
    };
    let code = match report.status {
        SolveStatus::Infeasible => 2,
        _ => 0,
    };
    Ok((inputs, solve_output(&mode_name, report), code))
}

fn solve_output(mode: &str, report: SolveReport) -> ReportOutput {
    ReportOutput::Solve {
        mode: mode.to_string(),
        status: report.status.as_str().to_string(),
        certified: report.certified,
        iterations: report.iterations,
        rank_estimate: report.rank_estimate,
        final_objective: report.final_objective,
        final_residual: report.final_residual,
        theta: report.theta,
        objective_trajectory: report.objective_trajectory,
        residual_trajectory: report.residual_trajectory,
        penalty_trajectory: report.penalty_trajectory,
        w: report.w,
    }
}

fn cmd_gen(
    kind: KindArg,
    rows: usize,
    cols: usize,
    planted: usize,
    noise: f64,
    seed: u64,
    out: &Path,
) -> Result<ReportOutput, HarnessError> {
    let generator;
    match kind {
        KindArg::LowRank => {
            generator = "low_rank";
            let instance = gen::gen_low_rank(rows, cols, planted, noise, seed)?;
            io::write_matrix(out, &instance.matrix)?;
        }
        KindArg::SparseLs => {
            generator = "sparse_ls";
            let instance = gen::gen_sparse_ls(rows, cols, planted, noise, seed)?;
            io::write_problem(
                out,
                &io::ProblemFile::SparseLs {
                    a: instance.a,
                    b: instance.b,
                    sparsity: instance.sparsity,
                    x_star: Some(instance.x_star),
                },
            )?;
        }
        KindArg::AffineRank => {
            generator = "affine_rank";
            let instance = gen::gen_affine_rank(rows, cols, planted, noise, seed)?;
            let arity = instance.map.arity();
            // Minimum-norm objective over θ keeps the parametric problem
            // well posed without biasing toward the planted solution.
            let objective =
                QuadraticObjective::new(Matrix::identity(arity), vec![0.0; arity], 0.0)
                    .expect("identity Hessian is PSD");
            let problem = RankProblem::new(objective, instance.map, None, instance.rank)
                .expect("generated instance is consistent");
            io::write_problem(
                out,
                &io::ProblemFile::RankConstrained {
                    problem,
                    theta_star: Some(instance.theta_star),
                },
            )?;
        }
    }
    Ok(ReportOutput::Gen {
        generator: generator.to_string(),
        rows,
        cols,
        planted,
        noise,
        seed,
        files: vec![out.display().to_string()],
    })
}
