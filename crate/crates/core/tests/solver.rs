mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomfem_core::solver::{pcg_solve, CsrMatrix, IdentityPreconditioner, JacobiPreconditioner, SolverError};

fn random_spd(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>();
        }
        a[i][i] += n as f64;
    }
    a
}

fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

#[test]
fn sparse_product_matches_dense() {
    let n = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut dense = vec![vec![0.0; n]; n];
    let mut triplets = Vec::new();
    for _ in 0..600 {
        let (i, j, v) = (
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(-1.0..1.0),
        );
        dense[i][j] += v;
        triplets.push((i, j, v));
    }
    let a = CsrMatrix::from_triplets(n, &triplets).unwrap();
    let x = random_vec(n, 2);
    let y = a.matvec(&x).unwrap();
    for i in 0..n {
        let expected: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
        assert!((y[i] - expected).abs() < 1e-12);
    }
}

#[test]
fn random_spd_systems_match_dense_oracle() {
    for (n, seed) in [(5, 1), (20, 2), (50, 3), (100, 4)] {
        let dense = random_spd(n, seed);
        let b = random_vec(n, seed + 100);
        let a = CsrMatrix::from_dense(&dense).unwrap();
        let m = JacobiPreconditioner::new(&a).unwrap();
        let (x, stats) = pcg_solve(&a, &b, &m, 1e-12, 1000).unwrap();
        let oracle = common::dense_solve(&dense, &b);
        assert!(stats.converged);
        assert!(stats.iterations <= n + 5, "n={n}: {} iterations", stats.iterations);
        assert!(rel_err(&x, &oracle) < 1e-8, "n={n}");
    }
}

#[test]
fn energy_error_decreases_monotonically() {
    let n = 40;
    let dense = random_spd(n, 7);
    let b = random_vec(n, 8);
    let a = CsrMatrix::from_dense(&dense).unwrap();
    let exact = common::dense_solve(&dense, &b);
    let energy = |x: &[f64]| {
        let e: Vec<f64> = x.iter().zip(&exact).map(|(p, q)| p - q).collect();
        let ae = a.matvec(&e).unwrap();
        e.iter().zip(&ae).map(|(p, q)| p * q).sum::<f64>()
    };
    let mut previous = f64::INFINITY;
    for k in 1..=15 {
        let (x, _) = pcg_solve(&a, &b, &IdentityPreconditioner, 1e-14, k).unwrap();
        let err = energy(&x);
        assert!(err <= previous * (1.0 + 1e-10), "step {k}: {err} > {previous}");
        previous = err;
    }
}

#[test]
fn preconditioner_does_not_change_the_answer() {
    let dense = random_spd(30, 11);
    let b = random_vec(30, 12);
    let a = CsrMatrix::from_dense(&dense).unwrap();
    let (x1, _) = pcg_solve(&a, &b, &IdentityPreconditioner, 1e-12, 1000).unwrap();
    let (x2, _) = pcg_solve(&a, &b, &JacobiPreconditioner::new(&a).unwrap(), 1e-12, 1000).unwrap();
    assert!(rel_err(&x1, &x2) < 1e-9);
}

#[test]
fn indefinite_matrix_is_reported() {
    let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
    let result = pcg_solve(&a, &[1.0, 1.0], &IdentityPreconditioner, 1e-10, 10);
    assert!(matches!(result, Err(SolverError::Breakdown { .. })));
}
