//! Binary logistic regression fitted by full-batch gradient descent with
//! Armijo backtracking. The objective is `(Σ log-loss + λ‖w‖²/2) / n`, the
//! mean log-loss with the penalty scaled per instance, so λ = 1 is the
//! usual unit-strength setting regardless of corpus size. The bias is not
//! penalized.

use serde::{Deserialize, Serialize};

use super::data::LabeledInstance;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegConfig {
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Use presence (0/1) rather than counts.
    pub binary: bool,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            tol: 1e-6,
            max_iter: 1000,
            binary: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub binary: bool,
}

impl LogisticModel {
    pub fn probability(&self, x: &[f64]) -> f64 {
        let z: f64 = self.bias + self.weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>();
        1.0 / (1.0 + (-z).exp())
    }

    pub fn predict(&self, instance: &LabeledInstance) -> bool {
        self.probability(&instance.features.to_dense(self.binary)) >= 0.5
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// The training objective over a dense design matrix. Parameters are laid
/// out as `[w_0, .., w_{d-1}, bias]`.
#[derive(Debug, Clone)]
pub struct LogLoss {
    pub rows: Vec<Vec<f64>>,
    /// ±1 labels.
    pub targets: Vec<f64>,
    pub lambda: f64,
}

impl LogLoss {
    pub fn new(instances: &[LabeledInstance], lambda: f64, binary: bool) -> Self {
        Self {
            rows: instances.iter().map(|i| i.features.to_dense(binary)).collect(),
            targets: instances.iter().map(|i| if i.label { 1.0 } else { -1.0 }).collect(),
            lambda,
        }
    }

    fn margin(&self, params: &[f64], i: usize) -> f64 {
        let d = params.len() - 1;
        params[d] + self.rows[i].iter().zip(&params[..d]).map(|(x, w)| x * w).sum::<f64>()
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        let d = params.len() - 1;
        let n = self.rows.len() as f64;
        let data: f64 = (0..self.rows.len())
            .map(|i| softplus(-self.targets[i] * self.margin(params, i)))
            .sum::<f64>()
            / n;
        data + 0.5 * self.lambda / n * params[..d].iter().map(|w| w * w).sum::<f64>()
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let d = params.len() - 1;
        let n = self.rows.len() as f64;
        let mut g = vec![0.0; d + 1];
        for (i, row) in self.rows.iter().enumerate() {
            let y = self.targets[i];
            // d/dz softplus(-y z) = -y σ(-y z)
            let c = -y * sigmoid(-y * self.margin(params, i)) / n;
            for (gj, x) in g[..d].iter_mut().zip(row) {
                *gj += c * x;
            }
            g[d] += c;
        }
        for (gj, w) in g[..d].iter_mut().zip(&params[..d]) {
            *gj += self.lambda / n * w;
        }
        g
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn train_logreg(instances: &[LabeledInstance], config: &LogRegConfig) -> Result<LogisticModel> {
    let dim = instances.first().map_or(0, |i| i.features.dim);
    train_logreg_from(instances, config, &vec![0.0; dim + 1])
}

/// Gradient descent from an explicit starting point `[w.., bias]`.
pub fn train_logreg_from(
    instances: &[LabeledInstance],
    config: &LogRegConfig,
    init: &[f64],
) -> Result<LogisticModel> {
    let positives = instances.iter().filter(|i| i.label).count();
    if positives == 0 || positives == instances.len() {
        return Err(Error::Data("logistic regression needs both classes".into()));
    }
    if !(config.lambda >= 0.0) {
        return Err(Error::contract("lambda must be >= 0"));
    }
    let dim = instances[0].features.dim;
    if instances.iter().any(|i| i.features.dim != dim) || init.len() != dim + 1 {
        return Err(Error::contract("inconsistent feature dimensions"));
    }
    let objective = LogLoss::new(instances, config.lambda, config.binary);
    let mut params = init.to_vec();
    let mut value = objective.value(&params);
    let mut grad = objective.gradient(&params);
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < config.max_iter && norm(&grad) > config.tol {
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        step *= 2.0;
        let (candidate, cand_value) = loop {
            let c: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let v = objective.value(&c);
            if v <= value - 0.5 * step * g2 || step < 1e-20 {
                break (c, v);
            }
            step *= 0.5;
        };
        if !cand_value.is_finite() {
            return Err(Error::Numeric("logistic loss became non-finite".into()));
        }
        params = candidate;
        value = cand_value;
        grad = objective.gradient(&params);
        iterations += 1;
    }
    Ok(LogisticModel {
        bias: params[dim],
        weights: params[..dim].to_vec(),
        loss: value,
        gradient_norm: norm(&grad),
        iterations,
        binary: config.binary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::FeatureVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(id: &str, feats: &[usize], dim: usize, label: bool) -> LabeledInstance {
        let mut f = FeatureVector::empty(id, dim);
        for &k in feats {
            f.increment(k);
        }
        LabeledInstance { features: f, label }
    }

    fn random_set(n: usize, dim: usize, seed: u64) -> Vec<LabeledInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let feats: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.4)).collect();
                inst(&i.to_string(), &feats, dim, rng.random_bool(0.5) || i == 0)
            })
            .chain([inst("neg", &[], dim, false)])
            .collect()
    }

    #[test]
    fn separable_pair_fits() {
        let data = vec![inst("a", &[0], 2, true), inst("b", &[1], 2, false)];
        let config = LogRegConfig { lambda: 0.0, ..LogRegConfig::default() };
        let model = train_logreg(&data, &config).unwrap();
        assert!(data.iter().all(|i| model.predict(i) == i.label));
    }

    #[test]
    fn heavy_regularization_gives_prior() {
        let mut data = random_set(40, 3, 5);
        data.truncate(30);
        data.push(inst("x", &[0], 3, false));
        let p = data.iter().filter(|i| i.label).count() as f64 / data.len() as f64;
        let lambda = 1e4;
        let config = LogRegConfig { lambda, tol: 1e-10, max_iter: 100_000, binary: true };
        let model = train_logreg(&data, &config).unwrap();
        // Stationarity in w bounds |w_j| by n / λ for binary features.
        let n = data.len() as f64;
        assert!(model.weights.iter().all(|w| w.abs() <= n / lambda));
        let mean_prob = data
            .iter()
            .map(|i| model.probability(&i.features.to_dense(true)))
            .sum::<f64>()
            / data.len() as f64;
        assert!((mean_prob - p).abs() < 1e-6, "{mean_prob} vs {p}");
        let prior = 1.0 / (1.0 + (-model.bias).exp());
        assert!((prior - p).abs() < 0.02, "{prior} vs {p}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = random_set(25, 4, 9);
        let objective = LogLoss::new(&data, 0.3, false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = objective.gradient(&params);
        let h = 1e-6;
        for j in 0..params.len() {
            let mut up = params.clone();
            up[j] += h;
            let mut down = params.clone();
            down[j] -= h;
            let fd = (objective.value(&up) - objective.value(&down)) / (2.0 * h);
            let rel = (fd - g[j]).abs() / g[j].abs().max(fd.abs()).max(1e-8);
            assert!(rel <= 1e-6, "coordinate {j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn final_loss_independent_of_start() {
        let data = random_set(30, 4, 2);
        let config = LogRegConfig { lambda: 0.5, ..LogRegConfig::default() };
        let a = train_logreg(&data, &config).unwrap();
        let b = train_logreg_from(&data, &config, &[3.0, -2.0, 1.0, 0.5, -4.0]).unwrap();
        assert!((a.loss - b.loss).abs() <= 1e-6);
    }

    #[test]
    fn single_class_rejected() {
        let data = vec![inst("a", &[0], 1, true), inst("b", &[], 1, true)];
        assert!(train_logreg(&data, &LogRegConfig::default()).is_err());
    }
}
