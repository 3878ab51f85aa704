//! k-means++ seeding with Lloyd iterations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const MAX_ITER: usize = 300;
/// Independent k-means++ restarts; the lowest-inertia run wins.
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Labels in `0..k`, numbered by first appearance.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
}

impl KMeansFit {
    pub fn predict(&self, point: &[f64]) -> usize {
        nearest(point, &self.centroids).0
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid (lowest index on ties) and its squared distance.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                if *d > 0.0 && target < *d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if d2[pick] == 0.0 {
                pick = (0..n).rev().find(|&i| d2[i] > 0.0).expect("positive mass");
            }
            pick
        } else {
            // All remaining points coincide with a centre.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn centroids_of(points: &[Vec<f64>], labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut sizes = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        sizes[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&sizes) {
        if n > 0 {
            s.iter_mut().for_each(|x| *x /= n as f64);
        }
    }
    (sums, sizes)
}

/// Moves the point farthest from its own centroid (taken from a cluster of
/// size > 1) into each empty cluster.
fn repair_empty(points: &[Vec<f64>], labels: &mut [usize], k: usize) -> bool {
    let mut repaired = false;
    loop {
        let (centroids, sizes) = centroids_of(points, labels, k);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return repaired;
        };
        let donor = (0..points.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| (i, sq_dist(&points[i], &centroids[labels[i]])))
            .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        match donor {
            Some((i, _)) => {
                labels[i] = empty;
                repaired = true;
            }
            None => return repaired,
        }
    }
}

fn lloyd(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> KMeansFit {
    let mut centroids = plus_plus(points, k, rng);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    for _ in 0..MAX_ITER {
        repair_empty(points, &mut labels, k);
        centroids = centroids_of(points, &labels, k).0;
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    repair_empty(points, &mut labels, k);
    centroids = centroids_of(points, &labels, k).0;
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    canonicalize(KMeansFit {
        labels,
        centroids,
        inertia,
    })
}

/// Renumbers clusters by first appearance.
fn canonicalize(fit: KMeansFit) -> KMeansFit {
    let k = fit.centroids.len();
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &l in &fit.labels {
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
    }
    for m in map.iter_mut().filter(|m| **m == usize::MAX) {
        *m = next;
        next += 1;
    }
    let mut centroids = vec![Vec::new(); k];
    for (old, c) in fit.centroids.into_iter().enumerate() {
        centroids[map[old]] = c;
    }
    KMeansFit {
        labels: fit.labels.iter().map(|&l| map[l]).collect(),
        centroids,
        inertia: fit.inertia,
    }
}

/// Fits k-means with `restarts` k-means++ initializations drawn from one
/// seeded stream and keeps the lowest-inertia run (earliest on ties).
pub fn kmeans_fit(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Result<KMeansFit> {
    if k == 0 || k > points.len() {
        return Err(Error::contract(format!(
            "k-means needs 1 <= k <= #points, got k = {k} for {} points",
            points.len()
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::contract("k-means points have mixed dimensions"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..restarts.max(1) {
        let fit = lloyd(points, k, &mut rng);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Cluster labels in `0..k`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<usize>> {
    Ok(kmeans_fit(points, k, seed, DEFAULT_RESTARTS)?.labels)
}
