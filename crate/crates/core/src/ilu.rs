//! ILU(0): incomplete LU with fill restricted to the pattern of `A`.

use thiserror::Error;

use crate::sparse::CsrMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum IluError {
    #[error("ILU(0) needs a square matrix, got {nrows}x{ncols}")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("row {row} has no structural diagonal entry")]
    MissingDiagonal { row: usize },
    #[error("zero or tiny pivot {value:e} in row {row}")]
    ZeroPivot { row: usize, value: f64 },
}

/// `L` (unit lower, implied diagonal) and `U` packed into one CSR matrix with
/// exactly the sparsity pattern of `A`.
#[derive(Debug, Clone)]
pub struct Ilu0Factors {
    lu: CsrMatrix,
    diag_pos: Vec<usize>,
    shifted_pivots: usize,
}

impl Ilu0Factors {
    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn nnz(&self) -> usize {
        self.lu.nnz()
    }

    /// Combined storage: strictly lower part is `L`, the rest is `U`.
    pub fn packed(&self) -> &CsrMatrix {
        &self.lu
    }

    /// Number of pivots replaced when factoring with a diagonal shift.
    pub fn shifted_pivots(&self) -> usize {
        self.shifted_pivots
    }
}

/// IKJ-ordered ILU(0). Fails on a missing diagonal or on a pivot with
/// `|u_ii| <= eps * max_j |a_ij|`.
pub fn ilu0_factor(a: &CsrMatrix) -> Result<Ilu0Factors, IluError> {
    factor(a, None)
}

/// Like [`ilu0_factor`], but a failing pivot is replaced by `shift` carrying
/// the pivot's sign instead of aborting.
pub fn ilu0_factor_shifted(a: &CsrMatrix, shift: f64) -> Result<Ilu0Factors, IluError> {
    factor(a, Some(shift))
}

fn factor(a: &CsrMatrix, shift: Option<f64>) -> Result<Ilu0Factors, IluError> {
    if !a.is_square() {
        return Err(IluError::NotSquare { nrows: a.nrows(), ncols: a.ncols() });
    }
    let n = a.nrows();
    let diag_pos: Vec<usize> = a
        .diagonal_positions()
        .into_iter()
        .enumerate()
        .map(|(row, p)| p.ok_or(IluError::MissingDiagonal { row }))
        .collect::<Result<_, _>>()?;

    let row_ptr = a.row_ptr().to_vec();
    let col_idx = a.col_idx().to_vec();
    let mut lu = a.clone();
    let vals = lu.values_mut();
    let mut shifted_pivots = 0;

    // column -> position in the current row, usize::MAX when absent
    let mut iw = vec![usize::MAX; n];
    for i in 0..n {
        let (start, end) = (row_ptr[i], row_ptr[i + 1]);
        for p in start..end {
            iw[col_idx[p]] = p;
        }
        let row_scale = vals[start..end].iter().fold(0.0f64, |m, v| m.max(v.abs()));

        for p in start..diag_pos[i] {
            let k = col_idx[p];
            let lik = vals[p] / vals[diag_pos[k]];
            vals[p] = lik;
            for q in diag_pos[k] + 1..row_ptr[k + 1] {
                let pos = iw[col_idx[q]];
                if pos != usize::MAX {
                    vals[pos] -= lik * vals[q];
                }
            }
        }

        let piv = vals[diag_pos[i]];
        if !(piv.abs() > f64::EPSILON * row_scale) {
            match shift {
                Some(s) => {
                    vals[diag_pos[i]] = if piv < 0.0 { -s.abs() } else { s.abs() };
                    shifted_pivots += 1;
                }
                None => return Err(IluError::ZeroPivot { row: i, value: piv }),
            }
        }

        for p in start..end {
            iw[col_idx[p]] = usize::MAX;
        }
    }
    Ok(Ilu0Factors { lu, diag_pos, shifted_pivots })
}

/// `out = (LU)^{-1} v`: forward solve with unit `L`, back solve with `U`.
pub fn ilu0_apply_into(f: &Ilu0Factors, v: &[f64], out: &mut [f64]) {
    let n = f.dim();
    assert_eq!(v.len(), n, "ilu0_apply: vector length mismatch");
    assert_eq!(out.len(), n, "ilu0_apply: output length mismatch");
    let rp = f.lu.row_ptr();
    let ci = f.lu.col_idx();
    let vals = f.lu.values();

    for i in 0..n {
        let mut s = v[i];
        for p in rp[i]..f.diag_pos[i] {
            s -= vals[p] * out[ci[p]];
        }
        out[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = out[i];
        for p in f.diag_pos[i] + 1..rp[i + 1] {
            s -= vals[p] * out[ci[p]];
        }
        out[i] = s / vals[f.diag_pos[i]];
    }
}

pub fn ilu0_apply(f: &Ilu0Factors, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    ilu0_apply_into(f, v, &mut out);
    out
}
