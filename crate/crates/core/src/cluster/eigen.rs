//! Smallest eigenpairs of a symmetric matrix.
//!
//! Dense symmetric QR below [`DENSE_LIMIT`] nodes; above it, block Krylov
//! Rayleigh-Ritz with full reorthogonalization. The block holds `k + 8`
//! vectors, so eigenvalue multiplicities up to that size are resolved.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const DENSE_LIMIT: usize = 2000;
/// Residual `‖A x - λ x‖` required of every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order and the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn smallest_eigenpairs(a: &DMatrix<f64>, k: usize, seed: u64) -> Result<EigenPairs> {
    smallest_eigenpairs_with_limit(a, k, seed, DENSE_LIMIT)
}

pub(crate) fn smallest_eigenpairs_with_limit(
    a: &DMatrix<f64>,
    k: usize,
    seed: u64,
    dense_limit: usize,
) -> Result<EigenPairs> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::contract(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    if n <= dense_limit {
        Ok(dense(a, k))
    } else {
        block_krylov(a, k, seed)
    }
}

fn take_smallest(values: &DVector<f64>, vectors: &DMatrix<f64>, k: usize) -> EigenPairs {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let order = &order[..k];
    EigenPairs {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: DMatrix::from_fn(vectors.nrows(), k, |r, c| vectors[(r, order[c])]),
    }
}

fn dense(a: &DMatrix<f64>, k: usize) -> EigenPairs {
    let eig = SymmetricEigen::new(a.clone());
    take_smallest(&eig.eigenvalues, &eig.eigenvectors, k)
}

/// Orthogonalizes `v` against `basis` twice (classical Gram-Schmidt with
/// reorthogonalization) and normalizes it; `None` if it collapses.
fn orthonormalize(mut v: DVector<f64>, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    let start = v.norm();
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&v);
            v.axpy(-c, q, 1.0);
        }
    }
    let norm = v.norm();
    if norm <= 1e-10 * start.max(f64::MIN_POSITIVE) || norm == 0.0 {
        None
    } else {
        Some(v / norm)
    }
}

fn random_vector(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

fn block_krylov(a: &DMatrix<f64>, k: usize, seed: u64) -> Result<EigenPairs> {
    let n = a.nrows();
    let block = (k + 8).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut images: Vec<DVector<f64>> = Vec::new();
    let mut frontier: Vec<DVector<f64>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();

    loop {
        let mut added = Vec::new();
        for v in frontier.drain(..) {
            if basis.len() == n {
                break;
            }
            if let Some(q) = orthonormalize(v, &basis) {
                images.push(a * &q);
                basis.push(q);
                added.push(basis.len() - 1);
            }
        }
        // Invariant subspace reached: restart the frontier with fresh vectors.
        while added.is_empty() && basis.len() < n {
            if let Some(q) = orthonormalize(random_vector(n, &mut rng), &basis) {
                images.push(a * &q);
                basis.push(q);
                added.push(basis.len() - 1);
            }
        }
        let m = basis.len();
        if m >= k {
            let q = DMatrix::from_columns(&basis);
            let aq = DMatrix::from_columns(&images);
            let h = q.transpose() * &aq;
            let h = (&h + h.transpose()) * 0.5;
            let eig = SymmetricEigen::new(h);
            let small = take_smallest(&eig.eigenvalues, &eig.eigenvectors, k);
            let x = &q * &small.vectors;
            let ax = &aq * &small.vectors;
            let worst = (0..k)
                .map(|c| (ax.column(c) - x.column(c) * small.values[c]).norm())
                .fold(0.0, f64::max);
            if worst <= RESIDUAL_TOL || m == n {
                if worst > RESIDUAL_TOL * 1e3 {
                    return Err(Error::Numeric(format!(
                        "eigensolver residual {worst:e} after exhausting the space"
                    )));
                }
                return Ok(EigenPairs {
                    values: small.values,
                    vectors: x,
                });
            }
        }
        frontier = added.iter().map(|&i| images[i].clone()).collect();
    }
}
