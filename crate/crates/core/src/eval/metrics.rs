use serde::Serialize;

/// Positive-class precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Undefined ratios (no predicted or no actual positives) are 0.
pub fn f_score(predictions: &[bool], labels: &[bool]) -> Scores {
    assert_eq!(predictions.len(), labels.len(), "f_score: length mismatch");
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Scores {
        precision,
        recall,
        f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect() {
        let l = [true, false, true];
        assert_eq!(f_score(&l, &l).f1, 1.0);
    }

    #[test]
    fn two_thirds() {
        // TP = 2, FP = 1, FN = 1.
        let p = [true, true, true, false, false];
        let l = [true, true, false, true, false];
        let s = f_score(&p, &l);
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_is_zero() {
        let s = f_score(&[false, false], &[true, false]);
        assert_eq!(s.f1, 0.0);
        assert_eq!(f_score(&[false], &[false]).f1, 0.0);
    }

    proptest! {
        #[test]
        fn bounded(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 0..50)) {
            let (p, l): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
            let s = f_score(&p, &l);
            for x in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            prop_assert!(s.f1 <= s.precision.max(s.recall) + 1e-12);
        }
    }
}
