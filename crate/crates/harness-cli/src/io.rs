//! Flat-file formats.
//!
//! Matrices travel as plain text: a header line `m n` (ASCII decimal
//! integers) followed by `m` lines of `n` whitespace-separated decimal
//! reals (scientific notation allowed, UTF-8, line-feed endings). Problem
//! files are a line-oriented superset: a `problem <mode>` header followed
//! by labelled `matrix`/`vector`/`scalar` sections. Writers emit values
//! with Rust's shortest round-trip formatting, so write → parse → write is
//! a fixed point.

use std::collections::BTreeMap;
use std::path::Path;

use matrix_core::Matrix;
use rank_opt::{AffineMatrixMap, QuadraticObjective, RankProblem};

use crate::HarnessError;

/// A matrix file that parsed successfully; the header dimensions are
/// guaranteed to match the body.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub path: std::path::PathBuf,
    pub matrix: Matrix,
}

impl MatrixFile {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Ok(Self {
            path: path.to_path_buf(),
            matrix: read_matrix(path)?,
        })
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn write_matrix(path: &Path, matrix: &Matrix) -> Result<(), HarnessError> {
    std::fs::write(path, format_matrix(matrix)).map_err(|e| HarnessError::io(path, e))
}

pub fn format_matrix(matrix: &Matrix) -> String {
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        push_number_row(&mut out, matrix.row(i));
    }
    out
}

fn push_number_row(out: &mut String, row: &[f64]) {
    for (j, v) in row.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        out.push_str(&v.to_string());
    }
    out.push('\n');
}

pub fn parse_matrix(text: &str, path: &str) -> Result<Matrix, HarnessError> {
    let mut lines = NumberedLines::new(text);
    let (line_no, header) = lines
        .next_significant()
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_error(path, line_no, "expected header \"m n\""));
    }
    let rows = parse_dim(dims[0], path, line_no)?;
    let cols = parse_dim(dims[1], path, line_no)?;
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line_no, line) = lines
            .next_significant()
            .ok_or_else(|| parse_error(path, lines.last_line() + 1, "missing matrix row"))?;
        parse_number_row(line, cols, &mut entries, path, line_no)?;
    }
    if let Some((line_no, _)) = lines.next_significant() {
        return Err(parse_error(path, line_no, "unexpected trailing content"));
    }
    Matrix::from_vec(rows, cols, entries)
        .map_err(|e| parse_error(path, line_no, &e.to_string()))
}

/// Parsed problem file, one variant per solve mode.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemFile {
    RankConstrained {
        problem: RankProblem,
        theta_star: Option<Vec<f64>>,
    },
    RankMin {
        map: AffineMatrixMap,
        bounds: Option<Vec<(f64, f64)>>,
    },
    SparseLs {
        a: Matrix,
        b: Vec<f64>,
        sparsity: usize,
        x_star: Option<Vec<f64>>,
    },
}

impl ProblemFile {
    pub fn mode(&self) -> &'static str {
        match self {
            ProblemFile::RankConstrained { .. } => "rank_constrained",
            ProblemFile::RankMin { .. } => "rank_min",
            ProblemFile::SparseLs { .. } => "sparse_ls",
        }
    }
}

pub fn read_problem(path: &Path) -> Result<ProblemFile, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_problem(&text, &path.display().to_string())
}

pub fn write_problem(path: &Path, problem: &ProblemFile) -> Result<(), HarnessError> {
    std::fs::write(path, format_problem(problem)).map_err(|e| HarnessError::io(path, e))
}

pub fn format_problem(problem: &ProblemFile) -> String {
    let mut out = String::new();
    match problem {
        ProblemFile::RankConstrained {
            problem,
            theta_star,
        } => {
            out.push_str("problem rank_constrained\n");
            out.push_str(&format!("rank {}\n", problem.rank_bound));
            push_matrix_section(&mut out, "base", problem.map.base());
            for (k, g) in problem.map.coefficients().iter().enumerate() {
                push_matrix_section(&mut out, &format!("coeff{k}"), g);
            }
            push_matrix_section(&mut out, "h", problem.objective.h());
            push_vector_section(&mut out, "c", problem.objective.c());
            out.push_str(&format!("scalar d {}\n", problem.objective.d()));
            push_bounds(&mut out, &problem.bounds);
            if let Some(t) = theta_star {
                push_vector_section(&mut out, "theta_star", t);
            }
        }
        ProblemFile::RankMin { map, bounds } => {
            out.push_str("problem rank_min\n");
            push_matrix_section(&mut out, "base", map.base());
            for (k, g) in map.coefficients().iter().enumerate() {
                push_matrix_section(&mut out, &format!("coeff{k}"), g);
            }
            push_bounds(&mut out, bounds);
        }
        ProblemFile::SparseLs {
            a,
            b,
            sparsity,
            x_star,
        } => {
            out.push_str("problem sparse_ls\n");
            out.push_str(&format!("sparsity {sparsity}\n"));
            push_matrix_section(&mut out, "a", a);
            push_vector_section(&mut out, "b", b);
            if let Some(x) = x_star {
                push_vector_section(&mut out, "x_star", x);
            }
        }
    }
    out
}

fn push_matrix_section(out: &mut String, name: &str, matrix: &Matrix) {
    out.push_str(&format!("matrix {name} {} {}\n", matrix.rows(), matrix.cols()));
    for i in 0..matrix.rows() {
        push_number_row(out, matrix.row(i));
    }
}

fn push_vector_section(out: &mut String, name: &str, values: &[f64]) {
    out.push_str(&format!("vector {name} {}\n", values.len()));
    push_number_row(out, values);
}

fn push_bounds(out: &mut String, bounds: &Option<Vec<(f64, f64)>>) {
    if let Some(bounds) = bounds {
        let lo: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let hi: Vec<f64> = bounds.iter().map(|b| b.1).collect();
        push_vector_section(out, "lo", &lo);
        push_vector_section(out, "hi", &hi);
    }
}

pub fn parse_problem(text: &str, path: &str) -> Result<ProblemFile, HarnessError> {
    let mut lines = NumberedLines::new(text);
    let (line_no, header) = lines
        .next_significant()
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != "problem" {
        return Err(parse_error(path, line_no, "expected header \"problem <mode>\""));
    }
    let mode = tokens[1].to_string();

    let mut matrices: BTreeMap<String, Matrix> = BTreeMap::new();
    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut scalars: BTreeMap<String, f64> = BTreeMap::new();
    let mut rank: Option<usize> = None;
    let mut sparsity: Option<usize> = None;

    while let Some((line_no, line)) = lines.next_significant() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "rank" => {
                let value = single_arg(&tokens, path, line_no)?;
                rank = Some(parse_dim(value, path, line_no)?);
            }
            "sparsity" => {
                let value = single_arg(&tokens, path, line_no)?;
                sparsity = Some(parse_dim(value, path, line_no)?);
            }
            "matrix" => {
                if tokens.len() != 4 {
                    return Err(parse_error(path, line_no, "expected \"matrix <name> <rows> <cols>\""));
                }
                let name = tokens[1].to_string();
                let rows = parse_dim(tokens[2], path, line_no)?;
                let cols = parse_dim(tokens[3], path, line_no)?;
                let mut entries = Vec::with_capacity(rows * cols);
                for _ in 0..rows {
                    let (row_line, row) = lines.next_significant().ok_or_else(|| {
                        parse_error(path, lines.last_line() + 1, "missing matrix row")
                    })?;
                    parse_number_row(row, cols, &mut entries, path, row_line)?;
                }
                let matrix = Matrix::from_vec(rows, cols, entries)
                    .map_err(|e| parse_error(path, line_no, &e.to_string()))?;
                if matrices.insert(name.clone(), matrix).is_some() {
                    return Err(parse_error(path, line_no, &format!("duplicate matrix {name}")));
                }
            }
            "vector" => {
                if tokens.len() != 3 {
                    return Err(parse_error(path, line_no, "expected \"vector <name> <len>\""));
                }
                let name = tokens[1].to_string();
                let len = parse_dim(tokens[2], path, line_no)?;
                let (row_line, row) = lines.next_significant().ok_or_else(|| {
                    parse_error(path, lines.last_line() + 1, "missing vector values")
                })?;
                let mut values = Vec::with_capacity(len);
                parse_number_row(row, len, &mut values, path, row_line)?;
                if vectors.insert(name.clone(), values).is_some() {
                    return Err(parse_error(path, line_no, &format!("duplicate vector {name}")));
                }
            }
            "scalar" => {
                if tokens.len() != 3 {
                    return Err(parse_error(path, line_no, "expected \"scalar <name> <value>\""));
                }
                let value = parse_real(tokens[2], path, line_no)?;
                scalars.insert(tokens[1].to_string(), value);
            }
            other => {
                return Err(parse_error(path, line_no, &format!("unknown directive {other}")));
            }
        }
    }

    let take_matrix = |matrices: &mut BTreeMap<String, Matrix>, name: &str| {
        matrices
            .remove(name)
            .ok_or_else(|| parse_error(path, 1, &format!("missing matrix {name}")))
    };

    let collect_coefficients = |matrices: &mut BTreeMap<String, Matrix>| {
        let mut coefficients = Vec::new();
        let mut k = 0;
        while let Some(g) = matrices.remove(&format!("coeff{k}")) {
            coefficients.push(g);
            k += 1;
        }
        if let Some(stray) = matrices.keys().find(|name| name.starts_with("coeff")) {
            return Err(parse_error(
                path,
                1,
                &format!("non-contiguous coefficient {stray}; expected coeff0..coeff{k}"),
            ));
        }
        Ok(coefficients)
    };

    let bounds = match (vectors.remove("lo"), vectors.remove("hi")) {
        (Some(lo), Some(hi)) => {
            if lo.len() != hi.len() {
                return Err(parse_error(path, 1, "lo and hi lengths differ"));
            }
            Some(lo.into_iter().zip(hi).collect::<Vec<(f64, f64)>>())
        }
        (None, None) => None,
        _ => return Err(parse_error(path, 1, "bounds need both lo and hi")),
    };

    match mode.as_str() {
        "rank_constrained" => {
            let base = take_matrix(&mut matrices, "base")?;
            let coefficients = collect_coefficients(&mut matrices)?;
            let map = AffineMatrixMap::new(base, coefficients)
                .map_err(|e| parse_error(path, 1, &e.to_string()))?;
            let h = take_matrix(&mut matrices, "h")?;
            let c = vectors
                .remove("c")
                .ok_or_else(|| parse_error(path, 1, "missing vector c"))?;
            let d = scalars
                .remove("d")
                .ok_or_else(|| parse_error(path, 1, "missing scalar d"))?;
            let objective = QuadraticObjective::new(h, c, d)
                .map_err(|e| parse_error(path, 1, &e.to_string()))?;
            let rank =
                rank.ok_or_else(|| parse_error(path, 1, "missing rank directive"))?;
            let problem = RankProblem::new(objective, map, bounds, rank)
                .map_err(|e| parse_error(path, 1, &e.to_string()))?;
            Ok(ProblemFile::RankConstrained {
                problem,
                theta_star: vectors.remove("theta_star"),
            })
        }
        "rank_min" => {
            let base = take_matrix(&mut matrices, "base")?;
            let coefficients = collect_coefficients(&mut matrices)?;
            let map = AffineMatrixMap::new(base, coefficients)
                .map_err(|e| parse_error(path, 1, &e.to_string()))?;
            Ok(ProblemFile::RankMin { map, bounds })
        }
        "sparse_ls" => {
            let a = take_matrix(&mut matrices, "a")?;
            let b = vectors
                .remove("b")
                .ok_or_else(|| parse_error(path, 1, "missing vector b"))?;
            let sparsity =
                sparsity.ok_or_else(|| parse_error(path, 1, "missing sparsity directive"))?;
            Ok(ProblemFile::SparseLs {
                a,
                b,
                sparsity,
                x_star: vectors.remove("x_star"),
            })
        }
        other => Err(parse_error(path, line_no, &format!("unknown mode {other}"))),
    }
}

struct NumberedLines<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> NumberedLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            last_line: 0,
        }
    }

    /// Next non-blank line as (1-based number, trimmed content).
    fn next_significant(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.lines.by_ref() {
            self.last_line = idx + 1;
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Some((idx + 1, trimmed));
            }
        }
        None
    }

    fn last_line(&self) -> usize {
        self.last_line
    }
}

fn parse_error(path: &str, line: usize, message: &str) -> HarnessError {
    HarnessError::Parse {
        path: path.to_string(),
        line,
        message: message.to_string(),
    }
}

fn single_arg<'a>(tokens: &[&'a str], path: &str, line: usize) -> Result<&'a str, HarnessError> {
    if tokens.len() != 2 {
        return Err(parse_error(path, line, "expected exactly one argument"));
    }
    Ok(tokens[1])
}

fn parse_dim(token: &str, path: &str, line: usize) -> Result<usize, HarnessError> {
    token
        .parse::<usize>()
        .map_err(|_| parse_error(path, line, &format!("invalid dimension \"{token}\"")))
}

fn parse_real(token: &str, path: &str, line: usize) -> Result<f64, HarnessError> {
    let value = token
        .parse::<f64>()
        .map_err(|_| parse_error(path, line, &format!("invalid number \"{token}\"")))?;
    if !value.is_finite() {
        return Err(parse_error(path, line, &format!("non-finite number \"{token}\"")));
    }
    Ok(value)
}

fn parse_number_row(
    line: &str,
    expected: usize,
    out: &mut Vec<f64>,
    path: &str,
    line_no: usize,
) -> Result<(), HarnessError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != expected {
        return Err(parse_error(
            path,
            line_no,
            &format!("expected {expected} values, found {}", tokens.len()),
        ));
    }
    for token in tokens {
        out.push(parse_real(token, path, line_no)?);
    }
    Ok(())
}
