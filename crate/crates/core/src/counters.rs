//! Communication-proxy tallies.

use std::ops::Sub;

/// Running tallies of the kernels that dominate communication in a
/// distributed Krylov solve.
///
/// `dots` follows the block convention: one ICGS step is two block inner
/// products plus one norm, i.e. 3, regardless of basis length. `scalar_dots`
/// counts individual length-n inner products instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostCounters {
    /// Products with the system matrix `A`.
    pub spmvs: u64,
    /// Global reductions, block convention.
    pub dots: u64,
    /// Individual length-n inner products and norms.
    pub scalar_dots: u64,
    /// axpy-style updates and scalings of length-n vectors.
    pub vector_updates: u64,
    /// Applications of a left preconditioner (ILU solves). Not SpMVs.
    pub prec_applies: u64,
    /// Norms taken for explicit residual checks at restarts.
    pub residual_norms: u64,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Sub for CostCounters {
    type Output = CostCounters;

    fn sub(self, rhs: CostCounters) -> CostCounters {
        CostCounters {
            spmvs: self.spmvs - rhs.spmvs,
            dots: self.dots - rhs.dots,
            scalar_dots: self.scalar_dots - rhs.scalar_dots,
            vector_updates: self.vector_updates - rhs.vector_updates,
            prec_applies: self.prec_applies - rhs.prec_applies,
            residual_norms: self.residual_norms - rhs.residual_norms,
        }
    }
}
