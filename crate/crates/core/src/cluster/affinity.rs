use std::collections::BTreeSet;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::inventory::Thesaurus;
use crate::embedding::l2_distance;
use crate::{Error, Result};

/// `(1 + cos(x_i, x_j)) / 2`, so entries lie in `[0, 1]` with unit diagonal.
pub fn cosine_affinity(vectors: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let norms: Vec<f64> = vectors
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    if let Some(i) = norms.iter().position(|&n| n == 0.0 || !n.is_finite()) {
        return Err(Error::contract(format!("cosine affinity: vector {i} has zero or non-finite norm")));
    }
    let n = vectors.len();
    let mut w = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in i + 1..n {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let cos = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            let a = (1.0 + cos) / 2.0;
            w[(i, j)] = a;
            w[(j, i)] = a;
        }
    }
    Ok(w)
}

/// RBF kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// Median of the nonzero pairwise distances.
    Median,
    Fixed(f64),
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// `exp(-‖e_i - e_j‖² / (2σ²))` with unit diagonal.
pub fn rbf_affinity(centroids: &[Vec<f64>], bandwidth: Bandwidth) -> Result<DMatrix<f64>> {
    let n = centroids.len();
    if n < 2 {
        return Err(Error::contract("RBF affinity needs at least 2 centroids"));
    }
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = l2_distance(&centroids[i], &centroids[j]);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    let sigma = match bandwidth {
        Bandwidth::Fixed(s) if s > 0.0 && s.is_finite() => s,
        Bandwidth::Fixed(s) => return Err(Error::contract(format!("invalid RBF bandwidth {s}"))),
        Bandwidth::Median => {
            let nonzero: Vec<f64> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| dist[(i, j)])
                .filter(|&d| d > 0.0)
                .collect();
            if nonzero.is_empty() {
                return Err(Error::Data(
                    "all centroids identical: median bandwidth undefined".into(),
                ));
            }
            median(nonzero)
        }
    };
    let denom = 2.0 * sigma * sigma;
    Ok(dist.map(|d| (-(d * d) / denom).exp()))
}

/// Overwrites every entry between a local cluster of verb `a` and one of
/// verb `b` with `-beta`, for each antonym pair `(a, b)`. `cluster_verbs[i]`
/// is the bare verb of row `i`. `beta = 0` leaves `w` unchanged.
pub fn apply_antonym_edges(
    w: &DMatrix<f64>,
    thesaurus: &Thesaurus,
    cluster_verbs: &[String],
    beta: f64,
) -> Result<DMatrix<f64>> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::contract(format!("antonym weight must be >= 0, got {beta}")));
    }
    if w.nrows() != cluster_verbs.len() || w.ncols() != cluster_verbs.len() {
        return Err(Error::contract("affinity size does not match cluster list"));
    }
    let mut out = w.clone();
    if beta == 0.0 {
        return Ok(out);
    }
    let known: BTreeSet<&str> = cluster_verbs.iter().map(String::as_str).collect();
    let mut unknown = BTreeSet::new();
    for (a, b) in thesaurus.pairs() {
        for v in [a, b] {
            if !known.contains(v) {
                unknown.insert(v.to_string());
            }
        }
        for (i, vi) in cluster_verbs.iter().enumerate() {
            for (j, vj) in cluster_verbs.iter().enumerate() {
                if (vi == a && vj == b) || (vi == b && vj == a) {
                    out[(i, j)] = -beta;
                }
            }
        }
    }
    if !unknown.is_empty() {
        let names: Vec<String> = unknown.into_iter().collect();
        warn!("thesaurus verbs without clusters ignored: {}", names.join(", "));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        let w = cosine_affinity(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![-1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(w[(0, 1)], 1.0);
        assert_eq!(w[(0, 2)], 0.0);
        assert_eq!(w[(0, 3)], 0.5);
        assert_eq!(w, w.transpose());
        assert!((0..4).all(|i| w[(i, i)] == 1.0));
        assert!(cosine_affinity(&[vec![0.0, 0.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn rbf_examples() {
        let sigma = 0.7;
        let d = sigma * 2f64.sqrt();
        let w = rbf_affinity(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![d, 0.0]], Bandwidth::Fixed(sigma)).unwrap();
        assert_eq!(w[(0, 1)], 1.0);
        assert!((w[(0, 2)] - (-1f64).exp()).abs() < 1e-12);
        assert_eq!(w[(2, 2)], 1.0);
    }

    #[test]
    fn rbf_decreasing_in_distance() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.5]).collect();
        let w = rbf_affinity(&pts, Bandwidth::Fixed(1.0)).unwrap();
        for j in 1..5 {
            assert!(w[(0, j)] > w[(0, j + 1)]);
        }
    }

    #[test]
    fn rbf_median_bandwidth() {
        // Distances 1, 2, 3 -> median 2.
        let w = rbf_affinity(&[vec![0.0], vec![1.0], vec![3.0]], Bandwidth::Median).unwrap();
        assert!((w[(0, 1)] - (-1.0f64 / 8.0).exp()).abs() < 1e-15);
        assert!(rbf_affinity(&[vec![1.0], vec![1.0]], Bandwidth::Median).is_err());
        assert!(rbf_affinity(&[vec![1.0]], Bandwidth::Median).is_err());
    }

    #[test]
    fn antonym_edges_local_and_symmetric() {
        let w = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.5 });
        let verbs: Vec<String> = ["love", "love", "hate", "eat"].map(String::from).to_vec();
        let mut t = Thesaurus::default();
        t.insert("love", "hate").unwrap();
        t.insert("buy", "sell").unwrap();
        let out = apply_antonym_edges(&w, &t, &verbs, 1.0).unwrap();
        assert_eq!(out, out.transpose());
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
            assert_eq!(out[(i, j)], -1.0);
        }
        for i in 0..4 {
            for j in 0..4 {
                if ![(0, 2), (1, 2), (2, 0), (2, 1)].contains(&(i, j)) {
                    assert_eq!(out[(i, j)], w[(i, j)]);
                }
            }
        }
        assert_eq!(apply_antonym_edges(&w, &t, &verbs, 0.0).unwrap(), w);
        assert!(apply_antonym_edges(&w, &t, &verbs, -1.0).is_err());
    }
}
