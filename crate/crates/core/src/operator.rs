//! Linear operators that tally their own cost.

use crate::counters::CostCounters;
use crate::ilu::{ilu0_apply_into, Ilu0Factors};
use crate::polyprec::{apply_poly_into, PolyCoefficients};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    PlainMatrix,
    LeftPreconditioned,
    PolynomialWrapped,
}

/// A square map `x -> y` that records every product with `A` in `counters`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn kind(&self) -> OperatorKind;

    /// `y = op(x)`. Implementations add exactly the number of SpMVs with `A`
    /// they perform to `counters.spmvs`.
    fn apply(&self, x: &[f64], y: &mut [f64], counters: &mut CostCounters);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.nrows()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::PlainMatrix
    }

    fn apply(&self, x: &[f64], y: &mut [f64], counters: &mut CostCounters) {
        self.spmv_into(x, y);
        counters.spmvs += 1;
    }
}

/// `M^{-1} A` with `M = LU` from ILU(0). One SpMV plus one preconditioner
/// solve per application.
#[derive(Debug, Clone, Copy)]
pub struct LeftPreconditioned<'a> {
    pub matrix: &'a CsrMatrix,
    pub factors: &'a Ilu0Factors,
}

impl<'a> LeftPreconditioned<'a> {
    pub fn new(matrix: &'a CsrMatrix, factors: &'a Ilu0Factors) -> Self {
        assert_eq!(matrix.nrows(), factors.dim(), "ILU factors do not match the matrix");
        Self { matrix, factors }
    }

    /// `M^{-1} v`, counted as a preconditioner application only.
    pub fn precondition(&self, v: &[f64], counters: &mut CostCounters) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        ilu0_apply_into(self.factors, v, &mut out);
        counters.prec_applies += 1;
        out
    }
}

impl LinearOperator for LeftPreconditioned<'_> {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::LeftPreconditioned
    }

    fn apply(&self, x: &[f64], y: &mut [f64], counters: &mut CostCounters) {
        let mut ax = vec![0.0; x.len()];
        self.matrix.apply(x, &mut ax, counters);
        ilu0_apply_into(self.factors, &ax, y);
        counters.prec_applies += 1;
    }
}

/// `op p(op)`: the right-polynomial-preconditioned operator, `deg + 1`
/// applications of `op` per call.
pub struct PolyWrapped<'a, O: ?Sized> {
    pub op: &'a O,
    pub poly: &'a PolyCoefficients,
}

impl<'a, O: LinearOperator + ?Sized> PolyWrapped<'a, O> {
    pub fn new(op: &'a O, poly: &'a PolyCoefficients) -> Self {
        Self { op, poly }
    }
}

impl<O: LinearOperator + ?Sized> LinearOperator for PolyWrapped<'_, O> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::PolynomialWrapped
    }

    fn apply(&self, x: &[f64], y: &mut [f64], counters: &mut CostCounters) {
        let mut px = vec![0.0; x.len()];
        apply_poly_into(self.poly, self.op, x, &mut px, counters);
        self.op.apply(&px, y, counters);
    }
}
