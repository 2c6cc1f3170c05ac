//! Deterministic test matrices.

use super::{CsrMatrix, SparseError};

/// Upper-bidiagonal matrix with the given diagonal and a constant superdiagonal.
/// A zero superdiagonal is not stored.
pub fn gen_bidiag(n: usize, diag_values: &[f64], superdiag: f64) -> Result<CsrMatrix, SparseError> {
    if n == 0 {
        return Err(SparseError::EmptyMatrix);
    }
    if diag_values.len() != n {
        return Err(SparseError::DimensionMismatch { expected: n, got: diag_values.len() });
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(2 * n);
    let mut values = Vec::with_capacity(2 * n);
    row_ptr.push(0);
    for (i, &d) in diag_values.iter().enumerate() {
        col_idx.push(i);
        values.push(d);
        if superdiag != 0.0 && i + 1 < n {
            col_idx.push(i + 1);
            values.push(superdiag);
        }
        row_ptr.push(values.len());
    }
    CsrMatrix::new(n, n, row_ptr, col_idx, values)
}

/// n = 2000, diagonal 1, 2, ..., 2000, superdiagonal 0.05.
pub fn bidiag1() -> CsrMatrix {
    let diag: Vec<f64> = (1..=2000).map(f64::from).collect();
    gen_bidiag(2000, &diag, 0.05).expect("valid by construction")
}

/// n = 5000, diagonal 0.1, 0.2, ..., 0.9, 1, 2, ..., 4991, superdiagonal 0.2.
pub fn bidiag2() -> CsrMatrix {
    let diag: Vec<f64> = (1..=9)
        .map(|k| f64::from(k) / 10.0)
        .chain((1..=4991).map(f64::from))
        .collect();
    gen_bidiag(5000, &diag, 0.2).expect("valid by construction")
}

/// 5-point Laplacian (4 on the diagonal, -1 per neighbour) on a
/// `grid_n x grid_n` interior grid with zero Dirichlet boundary. Not scaled by
/// the mesh width, so the spectrum lies in (0, 8). Row-major ordering.
pub fn gen_laplacian2d(grid_n: usize) -> Result<CsrMatrix, SparseError> {
    if grid_n == 0 {
        return Err(SparseError::EmptyMatrix);
    }
    let g = grid_n;
    let n = g * g;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    for j in 0..g {
        for i in 0..g {
            let k = j * g + i;
            // columns in increasing order: south, west, centre, east, north
            if j > 0 {
                col_idx.push(k - g);
                values.push(-1.0);
            }
            if i > 0 {
                col_idx.push(k - 1);
                values.push(-1.0);
            }
            col_idx.push(k);
            values.push(4.0);
            if i + 1 < g {
                col_idx.push(k + 1);
                values.push(-1.0);
            }
            if j + 1 < g {
                col_idx.push(k + g);
                values.push(-1.0);
            }
            row_ptr.push(values.len());
        }
    }
    CsrMatrix::new(n, n, row_ptr, col_idx, values)
}

/// Right-hand side for `-lap(u) = 1` matching [`gen_laplacian2d`]: every entry
/// is `h^2` with `h = 1 / (grid_n + 1)`.
pub fn gen_laplacian_rhs(grid_n: usize) -> Result<Vec<f64>, SparseError> {
    if grid_n == 0 {
        return Err(SparseError::EmptyMatrix);
    }
    let h = 1.0 / (grid_n as f64 + 1.0);
    Ok(vec![h * h; grid_n * grid_n])
}

/// The recirculating wind `w(x, y) = (2y(1 - x^2), -2x(1 - y^2))`.
pub fn wind(x: f64, y: f64) -> (f64, f64) {
    (2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y))
}

/// Centered finite differences for `-eps lap(u) + w . grad(u) = 0` on
/// `[-1, 1]^2` with `u = 1` on `x = 1` and `u = 0` on the other sides.
///
/// `grid_n` interior points per direction, `h = 2 / (grid_n + 1)`, row-major
/// ordering with `x` varying fastest. For a point with wind `(wx, wy)` the row is
///
/// ```text
/// centre  4 eps / h^2
/// east   -eps / h^2 + wx / (2h)      west   -eps / h^2 - wx / (2h)
/// north  -eps / h^2 + wy / (2h)      south  -eps / h^2 - wy / (2h)
/// ```
///
/// Boundary neighbours are moved to the right-hand side, so only rows next to
/// `x = 1` get a nonzero entry (minus their east coefficient).
pub fn gen_convdiff2d(grid_n: usize, epsilon: f64) -> Result<(CsrMatrix, Vec<f64>), SparseError> {
    if grid_n < 2 {
        return Err(SparseError::InvalidParameter(format!("grid_n must be >= 2, got {grid_n}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SparseError::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let g = grid_n;
    let n = g * g;
    let h = 2.0 / (g as f64 + 1.0);
    let diff = epsilon / (h * h);
    let coord = |k: usize| -1.0 + (k as f64 + 1.0) * h;

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    let mut rhs = vec![0.0; n];
    row_ptr.push(0);
    for j in 0..g {
        let y = coord(j);
        for i in 0..g {
            let x = coord(i);
            let (wx, wy) = wind(x, y);
            let k = j * g + i;
            let east = -diff + wx / (2.0 * h);
            let west = -diff - wx / (2.0 * h);
            let north = -diff + wy / (2.0 * h);
            let south = -diff - wy / (2.0 * h);
            if j > 0 {
                col_idx.push(k - g);
                values.push(south);
            }
            if i > 0 {
                col_idx.push(k - 1);
                values.push(west);
            }
            col_idx.push(k);
            values.push(4.0 * diff);
            if i + 1 < g {
                col_idx.push(k + 1);
                values.push(east);
            } else {
                rhs[k] -= east;
            }
            if j + 1 < g {
                col_idx.push(k + g);
                values.push(north);
            }
            row_ptr.push(values.len());
        }
    }
    Ok((CsrMatrix::new(n, n, row_ptr, col_idx, values)?, rhs))
}
