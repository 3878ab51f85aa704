use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::objective::HingeObjective;
use super::train::{IntransitiveTriple, Problem, TrainConfig};
use crate::corpus::TypedTriple;
use crate::{Error, Result};

const STEP: f64 = 1e-5;
/// Points closer than this to a hinge or distance kink are resampled.
const KINK_CLEARANCE: f64 = 1e-3;
const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub resamples: usize,
    pub coordinates: usize,
}

/// Coordinate-wise `|a - n| / max(|a|, |n|)`, taken as the absolute
/// difference where both sides are below 1e-10.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| {
            let scale = a.abs().max(n.abs());
            if scale < 1e-10 {
                (a - n).abs()
            } else {
                (a - n).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Central differences of `objective.loss` at `params`.
pub(crate) fn numeric_gradient(objective: &HingeObjective, params: &[f64]) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let x = p[i];
            p[i] = x + STEP;
            let up = objective.loss(&p);
            p[i] = x - STEP;
            let down = objective.loss(&p);
            p[i] = x;
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

/// Compares the analytic gradient of the total hinge loss over `sample`
/// (one fixed corruption per triple) with central finite differences at a
/// random point away from kinks.
pub fn gradient_check(
    config: &TrainConfig,
    transitive: &[TypedTriple],
    intransitive: &[IntransitiveTriple],
) -> Result<GradientCheck> {
    config.validate()?;
    let mut problem = Problem::build(transitive, intransitive, config.dimension)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pairs = problem
        .triples
        .iter()
        .map(|&(t, intransitive)| problem.corrupt(t, intransitive, &mut rng).map(|n| (t, n)))
        .collect::<Result<Vec<_>>>()?;
    let objective = HingeObjective {
        dimension: config.dimension,
        margin: config.margin,
        pairs,
    };
    for resamples in 0..MAX_RESAMPLES {
        problem.initialize(&mut rng);
        let params = problem.table.data().to_vec();
        if objective.kink_distance(&params) < KINK_CLEARANCE {
            continue;
        }
        let analytic = objective.gradient(&params);
        let numeric = numeric_gradient(&objective, &params);
        return Ok(GradientCheck {
            max_relative_error: max_relative_error(&analytic, &numeric),
            resamples,
            coordinates: params.len(),
        });
    }
    Err(Error::Numeric(format!(
        "no kink-free point found in {MAX_RESAMPLES} samples"
    )))
}
