#![allow(dead_code)]

use polygmres::{CsrMatrix, XorShift64Star};

/// Random sparse n x n matrix: each off-diagonal entry present with
/// probability `density`, diagonal always present and shifted by `shift`.
pub fn random_sparse(n: usize, density: f64, shift: f64, seed: u64) -> CsrMatrix {
    let mut rng = XorShift64Star::new(seed);
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                t.push((i, j, shift + rng.next_symmetric()));
            } else if rng.next_unit() < density {
                t.push((i, j, rng.next_symmetric()));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

/// Random symmetric positive definite `B^T B + n I` (dense pattern).
pub fn random_spd(n: usize, seed: u64) -> CsrMatrix {
    let mut rng = XorShift64Star::new(seed);
    let b: Vec<Vec<f64>> = (0..n).map(|_| rng.symmetric_vector(n)).collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>();
        }
        d[i][i] += n as f64;
    }
    CsrMatrix::from_dense(&d).unwrap()
}

pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn to_na(a: &CsrMatrix) -> nalgebra::DMatrix<f64> {
    let d = a.to_dense();
    nalgebra::DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| d[i][j])
}
