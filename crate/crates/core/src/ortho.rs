//! Iterated classical Gram-Schmidt (two full projection passes).

use crate::counters::CostCounters;
use crate::vecops::{axpy, dot, norm2, scale};

/// Relative threshold on the new column norm below which the step is a
/// happy breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoResult {
    /// Projection coefficients summed over both passes.
    pub coeffs: Vec<f64>,
    /// Norm of `w` after projection: the subdiagonal Hessenberg entry.
    pub new_norm: f64,
    /// Unit vector when `!breakdown`; the unnormalised remainder otherwise.
    pub vector: Vec<f64>,
    pub breakdown: bool,
}

/// Orthogonalizes `w` against the orthonormal `basis` with two passes of
/// classical Gram-Schmidt and normalizes the result.
///
/// Cost: three global reductions (two block inner products and a norm), i.e.
/// `dots += 3` and `scalar_dots += 2 * basis.len() + 1`. Both passes always run.
///
/// Breakdown is declared when `new_norm <= 1e-14 * ||w||`; `||w||` is recovered
/// from `||w||^2 = ||coeffs||^2 + new_norm^2` without an extra reduction.
pub fn icgs(basis: &[Vec<f64>], w: &[f64], counters: &mut CostCounters) -> OrthoResult {
    let k = basis.len();
    for q in basis {
        assert_eq!(q.len(), w.len(), "icgs: basis vector length mismatch");
    }
    let mut v = w.to_vec();
    let mut coeffs = vec![0.0; k];
    for _pass in 0..2 {
        let c: Vec<f64> = basis.iter().map(|q| dot(q, &v)).collect();
        for (q, &ci) in basis.iter().zip(&c) {
            axpy(-ci, q, &mut v);
        }
        for (acc, ci) in coeffs.iter_mut().zip(c) {
            *acc += ci;
        }
    }
    let new_norm = norm2(&v);

    counters.dots += 3;
    counters.scalar_dots += 2 * k as u64 + 1;
    counters.vector_updates += 2 * k as u64;

    let w_norm = (coeffs.iter().map(|c| c * c).sum::<f64>() + new_norm * new_norm).sqrt();
    let breakdown = !(new_norm > BREAKDOWN_TOL * w_norm);
    if !breakdown {
        scale(1.0 / new_norm, &mut v);
        counters.vector_updates += 1;
    }
    OrthoResult { coeffs, new_norm, vector: v, breakdown }
}
