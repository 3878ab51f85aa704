//! Normalized-cut spectral clustering, unsigned and signed.
//!
//! Both variants embed the nodes with the `k` smallest eigenvectors of
//! `I - D̄^{-1/2} W D̄^{-1/2}`, where `D̄_ii = Σ_j |W_ij|` (isolated rows get
//! degree 1), normalize the embedding rows to unit length and discretize
//! them with k-means. For nonnegative `W` the signed Laplacian reduces to
//! the ordinary symmetric-normalized one, so both paths coincide exactly.

use nalgebra::DMatrix;

use super::eigen::smallest_eigenpairs;
use super::kmeans::kmeans;
use crate::{derive_seed, Error, Result};

fn validate(w: &DMatrix<f64>, k: usize) -> Result<()> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::contract("affinity matrix must be square"));
    }
    if k == 0 || k > n {
        return Err(Error::contract(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let scale = w.amax().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (w[(i, j)], w[(j, i)]);
            if !a.is_finite() || (a - b).abs() > 1e-12 * scale {
                return Err(Error::contract(format!(
                    "affinity matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Row-normalized spectral embedding of `w` (n rows of length k).
pub fn spectral_embedding(w: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = w.nrows();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = w.row(i).iter().map(|x| x.abs()).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]
    });
    let pairs = smallest_eigenpairs(&laplacian, k, derive_seed(seed, "eigen"))?;
    Ok((0..n)
        .map(|i| {
            let row: Vec<f64> = pairs.vectors.row(i).iter().copied().collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.into_iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect())
}

fn cluster(w: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 1 {
        return Ok(vec![0; w.nrows()]);
    }
    let embedding = spectral_embedding(w, k, seed)?;
    kmeans(&embedding, k, seed)
}

/// Normalized-cut spectral clustering of a nonnegative symmetric affinity.
pub fn spectral_cluster(w: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    validate(w, k)?;
    if w.iter().any(|&x| x < 0.0) {
        return Err(Error::contract(
            "spectral_cluster needs nonnegative affinities; use signed_spectral_cluster",
        ));
    }
    cluster(w, k, seed)
}

/// Spectral clustering of a symmetric affinity that may hold negative
/// (repulsive) entries.
pub fn signed_spectral_cluster(w: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    validate(w, k)?;
    cluster(w, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::adjusted_rand_index;

    fn blocks(sizes: &[usize], within: f64, across: f64) -> DMatrix<f64> {
        let mut block = Vec::new();
        for (b, &s) in sizes.iter().enumerate() {
            block.extend(std::iter::repeat_n(b, s));
        }
        let n = block.len();
        DMatrix::from_fn(n, n, |i, j| if block[i] == block[j] { within } else { across })
    }

    #[test]
    fn single_cluster_even_when_disconnected() {
        let w = DMatrix::zeros(5, 5);
        assert_eq!(spectral_cluster(&w, 1, 0).unwrap(), vec![0; 5]);
    }

    #[test]
    fn block_diagonal_split() {
        let w = blocks(&[3, 4], 1.0, 0.0);
        let l = spectral_cluster(&w, 2, 3).unwrap();
        assert_eq!(adjusted_rand_index(&l, &[0, 0, 0, 1, 1, 1, 1]), 1.0);
    }

    #[test]
    fn isolated_node_is_regularized() {
        let mut w = blocks(&[3, 3], 1.0, 0.0);
        w = w.insert_row(6, 0.0).insert_column(6, 0.0);
        let l = spectral_cluster(&w, 2, 0).unwrap();
        assert_eq!(adjusted_rand_index(&l[..6], &[0, 0, 0, 1, 1, 1]), 1.0);
        assert!(l[6] < 2);
    }

    #[test]
    fn contract_violations() {
        let w = blocks(&[2], 1.0, 0.0);
        assert!(spectral_cluster(&w, 3, 0).is_err());
        let mut asym = blocks(&[2, 2], 1.0, 0.1);
        asym[(0, 3)] = 0.5;
        assert!(spectral_cluster(&asym, 2, 0).is_err());
        let neg = blocks(&[2, 2], 1.0, -0.1);
        assert!(spectral_cluster(&neg, 2, 0).is_err());
        assert!(signed_spectral_cluster(&neg, 2, 0).is_ok());
    }

    #[test]
    fn permutation_equivariant_up_to_relabel() {
        let w = blocks(&[4, 3, 5], 0.9, 0.05);
        let base = spectral_cluster(&w, 3, 17).unwrap();
        let perm: Vec<usize> = vec![11, 3, 7, 0, 9, 5, 1, 10, 2, 8, 4, 6];
        let wp = DMatrix::from_fn(12, 12, |i, j| w[(perm[i], perm[j])]);
        let lp = spectral_cluster(&wp, 3, 17).unwrap();
        let unpermuted: Vec<usize> = perm.iter().map(|&p| base[p]).collect();
        assert_eq!(adjusted_rand_index(&lp, &unpermuted), 1.0);
    }

    #[test]
    fn signed_repulsion_splits_positive_pairs() {
        // Strong positive 0-1 and 2-3, negative 0-2 and 1-3.
        let mut w = DMatrix::zeros(4, 4);
        for (i, j, x) in [(0, 1, 1.0), (2, 3, 1.0), (0, 2, -1.0), (1, 3, -1.0)] {
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
        let l = signed_spectral_cluster(&w, 2, 0).unwrap();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
    }

    /// Every 2-partition of `0..n` as a label vector with node 0 in part 0.
    fn bipartitions(n: usize) -> impl Iterator<Item = Vec<usize>> {
        (1..(1u32 << (n - 1))).map(move |mask| (0..n).map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize }).collect())
    }

    fn signed_cut(w: &DMatrix<f64>, l: &[usize]) -> f64 {
        let mut cost = 0.0;
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                let x = w[(i, j)];
                if l[i] != l[j] && x > 0.0 {
                    cost += x;
                }
                if l[i] == l[j] && x < 0.0 {
                    cost -= x;
                }
            }
        }
        cost
    }

    fn ncut(w: &DMatrix<f64>, l: &[usize]) -> f64 {
        let mut cut = 0.0;
        let mut vol = [0.0; 2];
        for i in 0..l.len() {
            for j in 0..l.len() {
                vol[l[i]] += w[(i, j)];
                if l[i] != l[j] {
                    cut += w[(i, j)];
                }
            }
        }
        cut / 2.0 * (1.0 / vol[0] + 1.0 / vol[1])
    }

    fn argmin_partition(n: usize, cost: impl Fn(&[usize]) -> f64) -> Vec<usize> {
        bipartitions(n)
            .min_by(|a, b| cost(a).total_cmp(&cost(b)))
            .unwrap()
    }

    #[test]
    fn signed_matches_enumeration_optimum() {
        let mut w = DMatrix::zeros(4, 4);
        for (i, j, x) in [(0, 1, 5.0), (2, 3, 5.0), (0, 2, -2.0), (1, 3, -2.0), (1, 2, 0.3)] {
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
        let best = argmin_partition(4, |l| signed_cut(&w, l));
        for seed in 0..10 {
            let l = signed_spectral_cluster(&w, 2, seed).unwrap();
            assert_eq!(adjusted_rand_index(&l, &best), 1.0);
        }
    }

    #[test]
    fn noisy_blocks_match_ncut_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for trial in 0..20 {
            let n = 6 + trial % 5;
            let split = 2 + trial % 3;
            let mut w = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let same = (i < split) == (j < split);
                    let x = if same { rng.random_range(0.6..1.0) } else { rng.random_range(0.0..0.1) };
                    w[(i, j)] = x;
                    w[(j, i)] = x;
                }
            }
            let best = argmin_partition(n, |l| ncut(&w, l));
            let l = spectral_cluster(&w, 2, trial as u64).unwrap();
            assert_eq!(adjusted_rand_index(&l, &best), 1.0, "trial {trial}");
        }
    }
}
