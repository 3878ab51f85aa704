use std::collections::BTreeMap;

/// Euclidean distance. Panics on dimension mismatch.
pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "l2_distance: dimension mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `max(0, gamma + pos_dist - neg_dist)`; NaN inputs propagate.
pub fn margin_loss(pos_dist: f64, neg_dist: f64, gamma: f64) -> f64 {
    let x = gamma + pos_dist - neg_dist;
    if x.is_nan() {
        x
    } else {
        x.max(0.0)
    }
}

/// Row indices of a scored triple `head + relation ≈ tail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexedTriple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

/// Read access to parameter rows.
pub(crate) trait RowSource {
    fn read_row(&self, row: usize, out: &mut [f64]);
}

pub(crate) struct DenseRows<'a> {
    pub data: &'a [f64],
    pub dim: usize,
}

impl RowSource for DenseRows<'_> {
    fn read_row(&self, row: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.data[row * self.dim..(row + 1) * self.dim]);
    }
}

/// Translation residual `head + relation - tail` and its norm.
fn residual(src: &impl RowSource, t: IndexedTriple, buf: &mut [f64], scratch: &mut [f64]) -> f64 {
    src.read_row(t.head, buf);
    src.read_row(t.relation, scratch);
    for (b, r) in buf.iter_mut().zip(scratch.iter()) {
        *b += r;
    }
    src.read_row(t.tail, scratch);
    let mut sq = 0.0;
    for (b, t) in buf.iter_mut().zip(scratch.iter()) {
        *b -= t;
        sq += *b * *b;
    }
    sq.sqrt()
}

fn add_scaled(grads: &mut BTreeMap<usize, Vec<f64>>, row: usize, dir: &[f64], scale: f64) {
    let g = grads.entry(row).or_insert_with(|| vec![0.0; dir.len()]);
    for (gi, di) in g.iter_mut().zip(dir) {
        *gi += scale * di;
    }
}

/// Hinge term of one (positive, corrupted) pair. When active, accumulates
/// its gradient into `grads`; returns the term's value.
pub(crate) fn pair_gradient(
    src: &impl RowSource,
    pos: IndexedTriple,
    neg: IndexedTriple,
    margin: f64,
    dim: usize,
    grads: &mut BTreeMap<usize, Vec<f64>>,
) -> f64 {
    let mut pos_res = vec![0.0; dim];
    let mut neg_res = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let pos_d = residual(src, pos, &mut pos_res, &mut scratch);
    let neg_d = residual(src, neg, &mut neg_res, &mut scratch);
    let loss = margin_loss(pos_d, neg_d, margin);
    if loss > 0.0 {
        // ∂d/∂head = ∂d/∂relation = residual / d, ∂d/∂tail = -residual / d.
        // At d = 0 the zero subgradient is used.
        if pos_d > 0.0 {
            let s = 1.0 / pos_d;
            add_scaled(grads, pos.head, &pos_res, s);
            add_scaled(grads, pos.relation, &pos_res, s);
            add_scaled(grads, pos.tail, &pos_res, -s);
        }
        if neg_d > 0.0 {
            let s = 1.0 / neg_d;
            add_scaled(grads, neg.head, &neg_res, -s);
            add_scaled(grads, neg.relation, &neg_res, -s);
            add_scaled(grads, neg.tail, &neg_res, s);
        }
    }
    loss
}

/// Total hinge loss over fixed (positive, corrupted) pairs, as a function of
/// a flat row-major parameter vector.
#[derive(Debug, Clone)]
pub struct HingeObjective {
    pub dimension: usize,
    pub margin: f64,
    pub pairs: Vec<(IndexedTriple, IndexedTriple)>,
}

impl HingeObjective {
    pub fn loss(&self, params: &[f64]) -> f64 {
        self.pairs
            .iter()
            .map(|(p, n)| {
                margin_loss(self.distance(params, *p), self.distance(params, *n), self.margin)
            })
            .sum()
    }

    fn distance(&self, params: &[f64], t: IndexedTriple) -> f64 {
        let d = self.dimension;
        let (h, r, tl) = (
            &params[t.head * d..(t.head + 1) * d],
            &params[t.relation * d..(t.relation + 1) * d],
            &params[t.tail * d..(t.tail + 1) * d],
        );
        let sum: Vec<f64> = h.iter().zip(r).map(|(a, b)| a + b).collect();
        l2_distance(&sum, tl)
    }

    /// Analytic gradient, dense over all parameters.
    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let src = DenseRows {
            data: params,
            dim: self.dimension,
        };
        let mut grads = BTreeMap::new();
        for (p, n) in &self.pairs {
            pair_gradient(&src, *p, *n, self.margin, self.dimension, &mut grads);
        }
        let mut dense = vec![0.0; params.len()];
        for (row, g) in grads {
            dense[row * self.dimension..(row + 1) * self.dimension].copy_from_slice(&g);
        }
        dense
    }

    /// Smallest distance of any pair to a non-differentiable point: either a
    /// hinge argument at zero or a distance at zero.
    pub fn kink_distance(&self, params: &[f64]) -> f64 {
        self.pairs
            .iter()
            .flat_map(|(p, n)| {
                let dp = self.distance(params, *p);
                let dn = self.distance(params, *n);
                [(self.margin + dp - dn).abs(), dp, dn]
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        assert_eq!(l2_distance(&[1.5, -2.0], &[1.5, -2.0]), 0.0);
        assert_eq!(l2_distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn distance_dimension_mismatch_panics() {
        l2_distance(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(margin_loss(0.2, 1.5, 1.0), 0.0);
        assert!((margin_loss(1.0, 1.2, 1.0) - 0.8).abs() < 1e-15);
        assert_eq!(margin_loss(0.7, 0.7, 1.3), 1.3);
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(a in prop::collection::vec(-10.0f64..10.0, 8),
                                 b in prop::collection::vec(-10.0f64..10.0, 8)) {
            prop_assert_eq!(l2_distance(&a, &b), l2_distance(&b, &a));
            prop_assert!(l2_distance(&a, &b) >= 0.0);
        }

        #[test]
        fn margin_is_nonnegative(p in 0.0f64..5.0, n in 0.0f64..5.0, g in 0.01f64..3.0) {
            prop_assert!(margin_loss(p, n, g) >= 0.0);
        }
    }
}
