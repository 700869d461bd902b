use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierConfig {
    /// Inverse L2 strength; the penalty is ‖W‖²/(2·C·n).
    pub c: f64,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig { c: 1.0, tolerance: 1e-5, max_iterations: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("class {0:?} has no training example")]
    MissingClass(String),
    #[error("no training examples")]
    Empty,
    #[error("invalid classifier config: {0}")]
    Config(String),
}

/// Multinomial logistic regression, `classes × dim` weights plus a bias
/// per class (the bias is not regularized).
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxClassifier {
    pub classes: usize,
    pub dim: usize,
    /// Row-major weights followed by the biases.
    pub params: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Mean cross-entropy plus the L2 penalty, and its gradient, at `params`.
pub fn objective_and_gradient(params: &[f64], x: &[Vec<f64>], y: &[usize], classes: usize, c: f64) -> (f64, Vec<f64>) {
    let n = x.len() as f64;
    let dim = x.first().map_or(0, Vec::len);
    let nw = classes * dim;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    let mut probs = vec![0.0; classes];
    for (xi, &yi) in x.iter().zip(y) {
        logits_into(params, classes, dim, xi, &mut probs);
        let log_z = log_sum_exp(&probs);
        loss += log_z - probs[yi];
        for k in 0..classes {
            let residual = (probs[k] - log_z).exp() - if k == yi { 1.0 } else { 0.0 };
            for (g, v) in grad[k * dim..(k + 1) * dim].iter_mut().zip(xi) {
                *g += residual * v;
            }
            grad[nw + k] += residual;
        }
    }
    let reg = 1.0 / (c * n);
    let norm2: f64 = params[..nw].iter().map(|w| w * w).sum();
    loss = loss / n + 0.5 * reg * norm2;
    for (i, g) in grad.iter_mut().enumerate() {
        *g /= n;
        if i < nw {
            *g += reg * params[i];
        }
    }
    (loss, grad)
}

fn logits_into(params: &[f64], classes: usize, dim: usize, x: &[f64], out: &mut [f64]) {
    let nw = classes * dim;
    for k in 0..classes {
        out[k] = params[nw + k] + params[k * dim..(k + 1) * dim].iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl SoftmaxClassifier {
    /// Full-batch gradient descent with Barzilai-Borwein steps and Armijo
    /// backtracking, from zero parameters.
    pub fn train(
        x: &[Vec<f64>],
        y: &[usize],
        label_names: &[String],
        config: &ClassifierConfig,
    ) -> Result<SoftmaxClassifier, ClassifierError> {
        let classes = label_names.len();
        if classes < 2 {
            return Err(ClassifierError::TooFewClasses(classes));
        }
        if !(config.c.is_finite() && config.c > 0.0) {
            return Err(ClassifierError::Config("c must be positive".into()));
        }
        if x.is_empty() {
            return Err(ClassifierError::Empty);
        }
        let mut seen = vec![false; classes];
        y.iter().for_each(|&l| seen[l] = true);
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(ClassifierError::MissingClass(label_names[k].clone()));
        }
        let dim = x[0].len();
        let objective = |p: &[f64]| objective_and_gradient(p, x, y, classes, config.c);

        let mut params = vec![0.0; classes * (dim + 1)];
        let (mut f, mut g) = objective(&params);
        let mut step = 1.0;
        let mut iterations = 0;
        let mut converged = norm(&g) < config.tolerance;
        while !converged && iterations < config.max_iterations {
            iterations += 1;
            let g2: f64 = g.iter().map(|v| v * v).sum();
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = params.iter().zip(&g).map(|(p, gi)| p - step * gi).collect();
                let (ft, gt) = objective(&trial);
                if ft <= f - 1e-4 * step * g2 {
                    accepted = Some((trial, ft, gt));
                    break;
                }
                step *= 0.5;
            }
            let Some((trial, ft, gt)) = accepted else { break };
            let s: Vec<f64> = trial.iter().zip(&params).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|v| v * v).sum();
            step = if sy > 0.0 { ss / sy } else { 1.0 };
            params = trial;
            f = ft;
            g = gt;
            converged = norm(&g) < config.tolerance;
        }
        Ok(SoftmaxClassifier { classes, dim, params, iterations, converged })
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.classes];
        logits_into(&self.params, self.classes, self.dim, x, &mut out);
        out
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let z = self.logits(x);
        let lse = log_sum_exp(&z);
        z.iter().map(|v| (v - lse).exp()).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        rank_order(&self.logits(x))[0]
    }

    pub fn rank_of_correct(&self, x: &[f64], label: usize) -> usize {
        rank_of(&self.logits(x), label)
    }
}

/// Label ids sorted by descending score, equal scores by ascending id.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ids
}

/// 1-based rank of `label` in [`rank_order`].
pub fn rank_of(scores: &[f64], label: usize) -> usize {
    let s = scores[label];
    1 + scores.iter().enumerate().filter(|&(j, &v)| v > s || (v == s && j < label)).count()
}
