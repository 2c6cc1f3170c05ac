mod common;

use common::{dense_matvec, random_sparse};
use polygmres::sparse::gen_laplacian2d;
use polygmres::{
    ilu0_apply, ilu0_factor, CostCounters, CsrMatrix, IluError, LeftPreconditioned,
    LinearOperator, OperatorKind, XorShift64Star,
};
use proptest::prelude::*;

/// Dense IKJ elimination that only writes to positions in `pattern`.
fn dense_ilu0(a: &[Vec<f64>], pattern: &[Vec<bool>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut w = a.to_vec();
    for i in 1..n {
        for k in 0..i {
            if !pattern[i][k] {
                continue;
            }
            w[i][k] /= w[k][k];
            for j in k + 1..n {
                if pattern[i][j] && pattern[k][j] {
                    w[i][j] -= w[i][k] * w[k][j];
                }
            }
        }
    }
    w
}

fn pattern_of(a: &CsrMatrix) -> Vec<Vec<bool>> {
    let mut p = vec![vec![false; a.ncols()]; a.nrows()];
    for (i, row) in p.iter_mut().enumerate() {
        for &j in a.row(i).0 {
            row[j] = true;
        }
    }
    p
}

/// Solve (L U) x = v for a packed unit-lower / upper dense factor.
fn dense_lu_solve(lu: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut y = v.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= lu[i][k] * y[k];
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= lu[i][k] * y[k];
        }
        y[i] /= lu[i][i];
    }
    y
}

fn tridiag(n: usize, seed: u64) -> CsrMatrix {
    let mut rng = XorShift64Star::new(seed);
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 4.0 + rng.next_symmetric()));
        if i + 1 < n {
            t.push((i, i + 1, rng.next_symmetric()));
            t.push((i + 1, i, rng.next_symmetric()));
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tridiagonal_factor_is_exact(n in 1usize..200, seed: u64) {
        let a = tridiag(n, seed);
        let f = ilu0_factor(&a).unwrap();
        let ones = vec![1.0; n];
        let x = ilu0_apply(&f, &a.spmv(&ones).unwrap());
        for xi in &x {
            prop_assert!((xi - 1.0).abs() <= 1e-12);
        }
        // columns of M^-1 A are unit vectors
        for j in (0..n).step_by(1 + n / 7) {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = ilu0_apply(&f, &a.spmv(&e).unwrap());
            for (i, ci) in col.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ci - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn matches_dense_restricted_elimination(n in 2usize..40, seed: u64) {
        let a = random_sparse(n, 0.15, 6.0, seed);
        let f = ilu0_factor(&a).unwrap();
        let dense = a.to_dense();
        let pattern = pattern_of(&a);
        let want = dense_ilu0(&dense, &pattern);
        let got = f.packed().to_dense();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((got[i][j] - want[i][j]).abs() <= 1e-12 * want[i][j].abs().max(1.0));
            }
        }
        let v = XorShift64Star::new(seed ^ 7).symmetric_vector(n);
        let x = ilu0_apply(&f, &v);
        let y = dense_lu_solve(&want, &v);
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!((xi - yi).abs() <= 1e-10 * yi.abs().max(1.0));
        }
    }

    #[test]
    fn pattern_is_preserved(n in 2usize..60, seed: u64) {
        let a = random_sparse(n, 0.1, 5.0, seed);
        let f = ilu0_factor(&a).unwrap();
        prop_assert_eq!(f.nnz(), a.nnz());
        prop_assert_eq!(f.packed().row_ptr(), a.row_ptr());
        prop_assert_eq!(f.packed().col_idx(), a.col_idx());
    }

    #[test]
    fn left_preconditioned_composition(n in 2usize..60, seed: u64) {
        let a = random_sparse(n, 0.1, 5.0, seed);
        let f = ilu0_factor(&a).unwrap();
        let op = LeftPreconditioned::new(&a, &f);
        prop_assert_eq!(op.kind(), OperatorKind::LeftPreconditioned);
        let x = XorShift64Star::new(seed).symmetric_vector(n);
        let mut y = vec![0.0; n];
        let mut c = CostCounters::new();
        op.apply(&x, &mut y, &mut c);
        prop_assert_eq!(c.spmvs, 1);
        prop_assert_eq!(c.prec_applies, 1);
        let want = ilu0_apply(&f, &a.spmv(&x).unwrap());
        prop_assert_eq!(y, want);
    }

    #[test]
    fn triangular_matrices_are_factored_exactly(n in 1usize..50, lower: bool, seed: u64) {
        let mut rng = XorShift64Star::new(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + rng.next_unit()));
            for j in 0..n {
                if j != i && (j < i) == lower && rng.next_unit() < 0.3 {
                    t.push((i, j, rng.next_symmetric()));
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let f = ilu0_factor(&a).unwrap();
        let xs = rng.symmetric_vector(n);
        let x = ilu0_apply(&f, &dense_matvec(&a.to_dense(), &xs));
        for (xi, si) in x.iter().zip(&xs) {
            prop_assert!((xi - si).abs() <= 1e-12);
        }
    }
}

#[test]
fn laplacian_factor_matches_oracle() {
    let a = gen_laplacian2d(3).unwrap();
    let f = ilu0_factor(&a).unwrap();
    let dense = a.to_dense();
    let pattern = pattern_of(&a);
    let want = dense_ilu0(&dense, &pattern);
    let got = f.packed().to_dense();
    for i in 0..9 {
        for j in 0..9 {
            assert!((got[i][j] - want[i][j]).abs() <= 1e-14, "({i},{j})");
        }
    }
    // first pivots by hand: 4, 4 - 1/4, 4 - 1/(15/4)
    assert_eq!(got[0][0], 4.0);
    assert!((got[1][1] - 3.75).abs() <= 1e-15);
    assert!((got[2][2] - (4.0 - 4.0 / 15.0)).abs() <= 1e-15);
    assert_eq!(f.shifted_pivots(), 0);
}

#[test]
fn structural_errors() {
    let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
    assert_eq!(ilu0_factor(&a).unwrap_err(), IluError::MissingDiagonal { row: 0 });
    let r = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0)]).unwrap();
    assert!(matches!(ilu0_factor(&r), Err(IluError::NotSquare { .. })));
    let z = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
    assert!(matches!(ilu0_factor(&z), Err(IluError::ZeroPivot { row: 1, .. })));
}
