//! The GMRES minimum-residual polynomial as a preconditioner.
//!
//! For an operator `A` and seed vector `v0`, the power basis
//! `V = [v0, A v0, ..., A^deg v0]` defines the least-squares problem
//! `min_y || v0 - A V y ||`. Its normal equations
//!
//! ```text
//! (AV)^T (AV) y = (AV)^T v0
//! ```
//!
//! are solved by a dense Cholesky factorization, and
//! `p(A) = y_1 + y_2 A + ... + y_{deg+1} A^deg` is then applied as a right
//! preconditioner. `A p(A)` clusters most of the spectrum near 1.
//!
//! `AV` is the power sequence shifted by one column, so building a degree
//! `deg` polynomial costs `deg + 1` operator applications. The Gram matrix is
//! counted as two block inner products.
//!
//! The power basis loses independence quickly as the degree grows. A failed
//! Cholesky factorization (a pivot at or below `dim * eps` times its own
//! diagonal entry) is the signal [`auto_degree`] uses to stop raising the degree.

use std::fmt;

use thiserror::Error;

use crate::counters::CostCounters;
use crate::operator::LinearOperator;
use crate::rng::XorShift64Star;
use crate::vecops::{axpy, dot, norm2};

/// How the seed vector `v0` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMode {
    /// Uniform in [-1, 1] from [`XorShift64Star`] with this seed.
    Random { seed: u64 },
    /// The right-hand side of the system being solved.
    Rhs,
    /// Anything else handed in by the caller.
    Supplied,
}

/// Coefficients `y_1 .. y_{deg+1}` of `p` in the monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoefficients {
    coeffs: Vec<f64>,
    /// `||v0||` before normalization.
    pub seed_norm: f64,
    pub seed_mode: SeedMode,
}

impl PolyCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::InvalidCoefficients("at least one coefficient is required".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::InvalidCoefficients("coefficients must be finite".into()));
        }
        Ok(Self { coeffs, seed_norm: 0.0, seed_mode: SeedMode::Supplied })
    }

    /// `p = 1`.
    pub fn identity() -> Self {
        Self { coeffs: vec![1.0], seed_norm: 0.0, seed_mode: SeedMode::Supplied }
    }

    pub fn with_seed_mode(mut self, mode: SeedMode) -> Self {
        self.seed_mode = mode;
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `p(alpha)` by Horner's rule.
    pub fn eval(&self, alpha: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * alpha + c)
    }
}

/// Normal-equations system for one degree: `matrix` is row-major `dim x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub dim: usize,
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl GramSystem {
    pub fn new(dim: usize, matrix: Vec<f64>, rhs: Vec<f64>) -> Self {
        assert_eq!(matrix.len(), dim * dim);
        assert_eq!(rhs.len(), dim);
        Self { dim, matrix, rhs }
    }

    /// Leading `(deg + 1)`-order system taken from the Gram matrix `K = W^T W`
    /// of an extended power sequence `W = [v0, A v0, A^2 v0, ...]`.
    fn from_power_gram(k: &[Vec<f64>], deg: usize) -> Self {
        let dim = deg + 1;
        let mut matrix = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            matrix.extend_from_slice(&k[i + 1][1..=dim]);
        }
        let rhs = (0..dim).map(|i| k[i + 1][0]).collect();
        Self { dim, matrix, rhs }
    }
}

/// Non-positive (or below-floor) pivot at 1-based position `pivot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("Gram matrix is not numerically positive definite: pivot {pivot} failed")]
pub struct CholeskyFailure {
    pub pivot: usize,
}

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("seed vector is zero")]
    ZeroSeed,
    #[error("dimension mismatch: operator has {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cholesky(#[from] CholeskyFailure),
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
}

/// Solves `G y = rhs` by `G = L L^T`.
///
/// Fails at the first pivot `d_j <= dim * f64::EPSILON * G_jj` (or NaN).
/// `d_j / G_jj` is the squared sine of the angle between column `j` of the
/// basis and the span of the previous columns, so the test does not depend on
/// the very different column scales of a power basis.
pub fn dense_cholesky(g: &GramSystem) -> Result<Vec<f64>, CholeskyFailure> {
    let n = g.dim;
    let a = |i: usize, j: usize| g.matrix[i * n + j];
    let rel_floor = n as f64 * f64::EPSILON;

    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > rel_floor * a(j, j)) {
            return Err(CholeskyFailure { pivot: j + 1 });
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut s = a(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }

    let mut y = g.rhs.clone();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Ok(y)
}

/// `[v, A v, ..., A^applies v]`.
fn power_sequence<O: LinearOperator + ?Sized>(
    op: &O,
    v: Vec<f64>,
    applies: usize,
    counters: &mut CostCounters,
) -> Vec<Vec<f64>> {
    let mut seq = Vec::with_capacity(applies + 1);
    seq.push(v);
    for _ in 0..applies {
        let mut next = vec![0.0; op.dim()];
        op.apply(seq.last().unwrap(), &mut next, counters);
        seq.push(next);
    }
    seq
}

/// `W^T W`, counted as two block inner products.
fn power_gram(w: &[Vec<f64>], counters: &mut CostCounters) -> Vec<Vec<f64>> {
    let m = w.len();
    let mut k = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let d = dot(&w[i], &w[j]);
            k[i][j] = d;
            k[j][i] = d;
        }
    }
    counters.dots += 2;
    counters.scalar_dots += (m * (m + 1) / 2) as u64;
    k
}

fn normalized_seed<O: LinearOperator + ?Sized>(op: &O, v0: &[f64]) -> Result<(Vec<f64>, f64), PolyError> {
    if v0.len() != op.dim() {
        return Err(PolyError::DimensionMismatch { expected: op.dim(), got: v0.len() });
    }
    let nrm = norm2(v0);
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(PolyError::ZeroSeed);
    }
    Ok((v0.iter().map(|x| x / nrm).collect(), nrm))
}

/// Builds the degree-`deg` minimum-residual polynomial of `op` for seed `v0`.
///
/// Cost: `deg + 1` applications of `op`, `dots += 2`.
pub fn build_poly<O: LinearOperator + ?Sized>(
    op: &O,
    v0: &[f64],
    deg: usize,
    counters: &mut CostCounters,
) -> Result<PolyCoefficients, PolyError> {
    let (v, seed_norm) = normalized_seed(op, v0)?;
    let w = power_sequence(op, v, deg + 1, counters);
    let k = power_gram(&w, counters);
    let y = dense_cholesky(&GramSystem::from_power_gram(&k, deg))?;
    Ok(PolyCoefficients { coeffs: y, seed_norm, seed_mode: SeedMode::Supplied })
}

/// Picks the largest degree `d <= cap` whose Gram system still factors.
///
/// One power sequence of `cap + 2` vectors (`cap + 1` applications) and one
/// Gram matrix are shared by all attempts; the leading `(d + 1)`-order block is
/// factored for `d = 1, 2, ...` until the first failure. If even `d = 1` fails
/// the degree-0 polynomial is returned, and if that is degenerate too (or `v0`
/// is zero) the result is `p = 1`.
pub fn auto_degree<O: LinearOperator + ?Sized>(
    op: &O,
    v0: &[f64],
    cap: usize,
    counters: &mut CostCounters,
) -> PolyCoefficients {
    let (v, seed_norm) = match normalized_seed(op, v0) {
        Ok(s) => s,
        Err(PolyError::DimensionMismatch { expected, got }) => {
            panic!("auto_degree: operator has dimension {expected}, seed has {got}")
        }
        Err(_) => return PolyCoefficients::identity(),
    };
    let w = power_sequence(op, v, cap + 1, counters);
    let k = power_gram(&w, counters);

    let mut best = match dense_cholesky(&GramSystem::from_power_gram(&k, 0)) {
        Ok(y) => y,
        Err(_) => return PolyCoefficients::identity(),
    };
    for d in 1..=cap {
        match dense_cholesky(&GramSystem::from_power_gram(&k, d)) {
            Ok(y) if y.iter().all(|c| c.is_finite()) => best = y,
            _ => break,
        }
    }
    PolyCoefficients { coeffs: best, seed_norm, seed_mode: SeedMode::Supplied }
}

/// `out = p(op) v` via `w <- op w`, accumulating `y_{i+1} w`.
///
/// Cost: `deg` applications of `op`, `deg + 1` vector updates.
pub fn apply_poly_into<O: LinearOperator + ?Sized>(
    p: &PolyCoefficients,
    op: &O,
    v: &[f64],
    out: &mut [f64],
    counters: &mut CostCounters,
) {
    assert_eq!(v.len(), op.dim(), "apply_poly: vector length mismatch");
    assert_eq!(out.len(), op.dim(), "apply_poly: output length mismatch");
    let y = p.coeffs();
    for (o, vi) in out.iter_mut().zip(v) {
        *o = y[0] * vi;
    }
    counters.vector_updates += 1;
    if y.len() == 1 {
        return;
    }
    let mut w = v.to_vec();
    let mut next = vec![0.0; v.len()];
    for &c in &y[1..] {
        op.apply(&w, &mut next, counters);
        std::mem::swap(&mut w, &mut next);
        axpy(c, &w, out);
        counters.vector_updates += 1;
    }
}

pub fn apply_poly<O: LinearOperator + ?Sized>(
    p: &PolyCoefficients,
    op: &O,
    v: &[f64],
    counters: &mut CostCounters,
) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    apply_poly_into(p, op, v, &mut out, counters);
    out
}

/// `alpha * p(alpha)` at each point: the image of an eigenvalue `alpha` of `A`
/// under `A p(A)`.
pub fn lambda_p_lambda(p: &PolyCoefficients, points: &[f64]) -> Vec<f64> {
    points.iter().map(|&a| a * p.eval(a)).collect()
}

/// A seed vector with entries uniform in [-1, 1].
pub fn random_seed_vector(n: usize, seed: u64) -> Vec<f64> {
    XorShift64Star::new(seed).symmetric_vector(n)
}

impl fmt::Display for PolyCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p(degree {}) = [", self.degree())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:e}")?;
        }
        write!(f, "]")
    }
}
