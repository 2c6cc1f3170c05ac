//! Incremental Givens QR of the Arnoldi Hessenberg matrix.

use super::SolverError;

/// Rotation `(c, s)` with `[c s; -s c] [a; b] = [r; 0]`, `r = hypot(a, b)`.
fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0, a);
    }
    let r = a.hypot(b);
    (a / r, b / r, r)
}

/// Least-squares state for `min || beta e1 - H y ||` as columns of `H` arrive.
#[derive(Debug, Clone)]
pub(crate) struct GivensLsq {
    /// Rotated columns of `H`: column `j` holds `R[0..=j, j]`.
    r: Vec<Vec<f64>>,
    cs: Vec<f64>,
    sn: Vec<f64>,
    /// Rotated right-hand side, one longer than the number of columns.
    g: Vec<f64>,
}

impl GivensLsq {
    pub(crate) fn new(beta: f64) -> Self {
        Self { r: Vec::new(), cs: Vec::new(), sn: Vec::new(), g: vec![beta] }
    }

    /// Appends Hessenberg column `j` (`j + 2` entries) and returns the updated
    /// residual norm `|g_{j+1}|`. A column whose rotated diagonal vanishes is
    /// rejected and the state is left unchanged.
    pub(crate) fn push_column(&mut self, mut h: Vec<f64>) -> Result<f64, SolverError> {
        let j = self.r.len();
        assert_eq!(h.len(), j + 2, "Hessenberg column {j} must have {} entries", j + 2);
        let col_norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..j {
            let (c, s) = (self.cs[i], self.sn[i]);
            let t = c * h[i] + s * h[i + 1];
            h[i + 1] = -s * h[i] + c * h[i + 1];
            h[i] = t;
        }
        let (c, s, rjj) = givens(h[j], h[j + 1]);
        if !(rjj.abs() > f64::EPSILON * col_norm) {
            return Err(SolverError::SingularHessenberg { column: j + 1 });
        }
        h[j] = rjj;
        h.truncate(j + 1);
        self.r.push(h);
        self.cs.push(c);
        self.sn.push(s);
        let gj = self.g[j];
        self.g[j] = c * gj;
        self.g.push(-s * gj);
        Ok(self.g[j + 1].abs())
    }

    pub(crate) fn residual_norm(&self) -> f64 {
        self.g.last().copied().unwrap_or(0.0).abs()
    }

    /// Back substitution `R y = g[0..k]`.
    pub(crate) fn solve(&self) -> Vec<f64> {
        let k = self.r.len();
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            for j in i + 1..k {
                y[i] -= self.r[j][i] * y[j];
            }
            y[i] /= self.r[i][i];
        }
        y
    }
}

/// Solves `min || beta e1 - H y ||` for an upper-Hessenberg `H` given as
/// `j + 1` rows of `j` entries. Returns `y` and the residual norm of the
/// least-squares problem (divide by `||b||` for a relative residual).
pub fn hessenberg_lsq(h: &[Vec<f64>], beta: f64) -> Result<(Vec<f64>, f64), SolverError> {
    let rows = h.len();
    if rows == 0 {
        return Err(SolverError::InvalidInput("Hessenberg matrix has no rows".into()));
    }
    let j = rows - 1;
    if h.iter().any(|r| r.len() != j) {
        return Err(SolverError::InvalidInput(format!("expected {rows} rows of {j} entries")));
    }
    for (i, row) in h.iter().enumerate() {
        if row.iter().enumerate().any(|(c, &v)| i > c + 1 && v != 0.0) {
            return Err(SolverError::InvalidInput("matrix is not upper Hessenberg".into()));
        }
    }
    let mut lsq = GivensLsq::new(beta);
    for c in 0..j {
        lsq.push_column(h[..c + 2].iter().map(|row| row[c]).collect())?;
    }
    Ok((lsq.solve(), lsq.residual_norm()))
}
