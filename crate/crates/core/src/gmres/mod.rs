//! Restarted GMRES(m) with an optional right polynomial preconditioner.
//!
//! Each inner iteration applies `op p(op)` once (`deg + 1` products with `op`)
//! and orthogonalizes with [`icgs`](crate::ortho::icgs). The Hessenberg
//! least-squares problem is updated with Givens rotations, giving a cheap
//! implicit residual after every step. At the end of each cycle the iterate is
//! recovered as `x += p(op) V y` and the true residual `b - op x` is formed
//! explicitly; only that value decides convergence.
//!
//! Relative residuals are normalised by `||b||`.

mod lsq;
mod report;

pub use lsq::hessenberg_lsq;
pub use report::{cost_report, CostReport};

use thiserror::Error;

use crate::counters::CostCounters;
use crate::operator::{LinearOperator, PolyWrapped};
use crate::ortho::icgs;
use crate::polyprec::{apply_poly, PolyCoefficients};
use crate::vecops::{axpy, norm2};
use lsq::GivensLsq;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: operator has {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite value in the Krylov basis at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },
    #[error("Hessenberg matrix is singular at column {column}")]
    SingularHessenberg { column: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresConfig {
    /// Krylov subspace size per cycle.
    pub restart: usize,
    /// Relative residual tolerance, `0 < tol < 1`.
    pub tol: f64,
    /// Cap on total inner iterations.
    pub max_iters: usize,
    pub record_history: bool,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { restart: 50, tol: 1e-8, max_iters: 200_000, record_history: true }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.restart == 0 {
            return Err(SolverError::InvalidConfig("restart must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(SolverError::InvalidConfig(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// Givens estimate inside a cycle.
    Implicit,
    /// Explicit `||b - op x|| / ||b||` at exit.
    True,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub relres: f64,
    pub kind: ResidualKind,
    pub spmvs: u64,
    pub dots: u64,
    pub scalar_dots: u64,
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub converged: bool,
    /// Inner (Arnoldi) iterations.
    pub iterations: usize,
    /// True relative residual at exit.
    pub final_relres: f64,
    /// One implicit entry per inner iteration, then one true entry at exit.
    pub history: Vec<HistoryEntry>,
    /// Totals at exit, including anything already in the counters passed in.
    pub counters: CostCounters,
    /// Completed restart cycles.
    pub cycles: usize,
    /// Applications of `p(op)` to recover the iterate (one per cycle).
    pub recoveries: usize,
    /// Explicit residual evaluations (one at start, one per cycle).
    pub residual_checks: usize,
    /// Degree of the right preconditioner, 0 if none.
    pub poly_degree: usize,
    /// The last cycle ended in a happy breakdown.
    pub breakdown: bool,
}

fn residual<O: LinearOperator + ?Sized>(
    op: &O,
    b: &[f64],
    x: &[f64],
    counters: &mut CostCounters,
) -> (Vec<f64>, f64) {
    let mut r = vec![0.0; b.len()];
    op.apply(x, &mut r, counters);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    counters.vector_updates += 1;
    counters.residual_norms += 1;
    let nrm = norm2(&r);
    (r, nrm)
}

fn snapshot(iteration: usize, relres: f64, kind: ResidualKind, c: &CostCounters) -> HistoryEntry {
    HistoryEntry { iteration, relres, kind, spmvs: c.spmvs, dots: c.dots, scalar_dots: c.scalar_dots }
}

/// Solves `op x = b` with GMRES(m), optionally right-preconditioned by
/// `p(op)`.
///
/// SpMV accounting: `(deg + 1)` per inner iteration, `deg` per recovery and
/// one per explicit residual check. `dots` grows by exactly 3 per inner
/// iteration.
///
/// A happy breakdown ends the solve after recovery and one explicit residual
/// check; `converged` then reflects that check. Running out of `max_iters` is
/// reported through `converged = false`, not as an error.
pub fn solve<O: LinearOperator + ?Sized>(
    op: &O,
    b: &[f64],
    x0: Option<&[f64]>,
    right_prec: Option<&PolyCoefficients>,
    config: &GmresConfig,
    counters: &mut CostCounters,
) -> Result<GmresResult, SolverError> {
    config.validate()?;
    let n = op.dim();
    if b.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, got: b.len() });
    }
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(SolverError::DimensionMismatch { expected: n, got: x0.len() });
        }
    }
    let poly_degree = right_prec.map_or(0, |p| p.degree());
    let wrapped = right_prec.map(|p| PolyWrapped::new(op, p));
    let iter_op: &dyn LinearOperator = match &wrapped {
        Some(w) => w,
        None => &op_ref(op),
    };

    let mut result = GmresResult {
        x: x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec),
        converged: false,
        iterations: 0,
        final_relres: 0.0,
        history: Vec::new(),
        counters: *counters,
        cycles: 0,
        recoveries: 0,
        residual_checks: 0,
        poly_degree,
        breakdown: false,
    };

    let b_norm = norm2(b);
    counters.residual_norms += 1;
    if b_norm == 0.0 {
        result.x = vec![0.0; n];
        result.converged = true;
        if config.record_history {
            result.history.push(snapshot(0, 0.0, ResidualKind::True, counters));
        }
        result.counters = *counters;
        return Ok(result);
    }

    let (mut r, mut r_norm) = residual(op, b, &result.x, counters);
    result.residual_checks += 1;
    let mut relres = r_norm / b_norm;

    loop {
        if relres <= config.tol {
            result.converged = true;
            break;
        }
        if result.breakdown || result.iterations >= config.max_iters {
            break;
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(config.restart + 1);
        basis.push(r.iter().map(|v| v / r_norm).collect());
        counters.vector_updates += 1;
        let mut lsq = GivensLsq::new(r_norm);
        let mut w = vec![0.0; n];

        for _ in 0..config.restart {
            if result.iterations >= config.max_iters {
                break;
            }
            iter_op.apply(basis.last().unwrap(), &mut w, counters);
            let orth = icgs(&basis, &w, counters);
            result.iterations += 1;
            if !orth.new_norm.is_finite() || orth.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(SolverError::NumericalBreakdown { iteration: result.iterations });
            }

            let mut h = orth.coeffs;
            h.push(orth.new_norm);
            let res = match lsq.push_column(h) {
                Ok(res) => res,
                Err(SolverError::SingularHessenberg { .. }) => {
                    // op p(op) is singular on the current Krylov space
                    result.breakdown = true;
                    lsq.residual_norm()
                }
                Err(e) => return Err(e),
            };
            let implicit = res / b_norm;
            if config.record_history {
                result.history.push(snapshot(result.iterations, implicit, ResidualKind::Implicit, counters));
            }
            if result.breakdown {
                break;
            }
            if orth.breakdown {
                result.breakdown = true;
                break;
            }
            basis.push(orth.vector);
            if implicit <= config.tol {
                break;
            }
        }

        // x += p(op) V y
        let y = lsq.solve();
        let mut z = vec![0.0; n];
        for (v, &yi) in basis.iter().zip(&y) {
            axpy(yi, v, &mut z);
        }
        counters.vector_updates += y.len() as u64;
        let update = match right_prec {
            Some(p) => apply_poly(p, op, &z, counters),
            None => z,
        };
        axpy(1.0, &update, &mut result.x);
        counters.vector_updates += 1;
        result.recoveries += 1;
        result.cycles += 1;

        (r, r_norm) = residual(op, b, &result.x, counters);
        result.residual_checks += 1;
        relres = r_norm / b_norm;
    }

    result.final_relres = relres;
    if config.record_history {
        result.history.push(snapshot(result.iterations, relres, ResidualKind::True, counters));
    }
    result.counters = *counters;
    Ok(result)
}

/// Adapter so an unsized `O` can be used as `&dyn LinearOperator`.
struct OpRef<'a, O: ?Sized>(&'a O);

fn op_ref<O: ?Sized>(op: &O) -> OpRef<'_, O> {
    OpRef(op)
}

impl<O: LinearOperator + ?Sized> LinearOperator for OpRef<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn kind(&self) -> crate::operator::OperatorKind {
        self.0.kind()
    }

    fn apply(&self, x: &[f64], y: &mut [f64], counters: &mut CostCounters) {
        self.0.apply(x, y, counters)
    }
}
