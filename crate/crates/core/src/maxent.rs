//! Multiclass log-linear (maximum entropy) classifier.
//!
//! Training maximizes the Gaussian-penalized conditional log-likelihood
//!
//! ```text
//! L(w) = Σ_i log p(y_i | x_i) − ‖w‖² / (2σ²),   p(c | x) ∝ exp(Σ_f w[f,c]·x_f)
//! ```
//!
//! with L-BFGS and a backtracking (Armijo) line search, so the objective never
//! decreases between iterations. Every example carries an always-on bias
//! feature so the model can learn class priors.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::io::{read_to_string, write_atomic};
use crate::scalar::Scalar;

pub const BIAS_FEATURE: &str = "<bias>";

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample<T> {
    pub features: FeatureVector<T>,
    pub label: String,
}

impl<T: Scalar> LabeledExample<T> {
    pub fn new(features: FeatureVector<T>, label: impl Into<String>) -> Self {
        LabeledExample {
            features,
            label: label.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig<T> {
    pub sigma: T,
    pub max_iterations: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: T,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            sigma: T::one(),
            max_iterations: 500,
            tolerance: T::from_f64_lossy(1e-6),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingInfo<T> {
    pub iterations: usize,
    /// Final value of the penalized log-likelihood.
    pub objective: T,
    pub converged: bool,
}

/// A trained classifier: per-feature weight rows, one weight per class.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxentModel<T> {
    classes: Vec<String>,
    weights: HashMap<String, Vec<T>>,
    sigma: T,
    info: TrainingInfo<T>,
}

/// The training objective over a fixed example set, exposed so that the
/// analytic gradient can be checked independently.
///
/// Weights are laid out row-major: `w[f * n_classes + c]`.
#[derive(Clone, Debug)]
pub struct Objective<T> {
    features: Vec<String>,
    classes: Vec<String>,
    examples: Vec<(Vec<(usize, T)>, usize)>,
    inv_variance: T,
}

fn log_sum_exp<T: Scalar>(scores: &[T]) -> T {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    max + scores.iter().map(|&s| (s - max).exp()).sum::<T>().ln()
}

fn softmax_in_place<T: Scalar>(scores: &mut [T]) {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    let mut total = T::zero();
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        total = total + *s;
    }
    for s in scores.iter_mut() {
        *s = *s / total;
    }
}

impl<T: Scalar> Objective<T> {
    pub fn new(examples: &[LabeledExample<T>], sigma: T) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::Training("no training examples".into()));
        }
        if !(sigma > T::zero()) {
            return Err(Error::Training(format!("sigma must be positive, got {sigma}")));
        }
        let classes: Vec<String> = examples
            .iter()
            .map(|e| e.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if classes.iter().any(String::is_empty) {
            return Err(Error::Training("empty class label".into()));
        }
        if classes.len() < 2 {
            return Err(Error::Training(format!(
                "need at least two classes, found only `{}`",
                classes[0]
            )));
        }
        let mut names: BTreeSet<&str> = BTreeSet::new();
        names.insert(BIAS_FEATURE);
        for e in examples {
            names.extend(e.features.values().map(|(k, _)| k));
        }
        let features: Vec<String> = names.into_iter().map(str::to_string).collect();
        let index: HashMap<&str, usize> = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();
        let class_index: HashMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let bias = index[BIAS_FEATURE];
        let encoded = examples
            .iter()
            .map(|e| {
                let mut x: Vec<(usize, T)> = vec![(bias, T::one())];
                x.extend(e.features.values().map(|(k, v)| (index[k], v)));
                (x, class_index[e.label.as_str()])
            })
            .collect();
        Ok(Objective {
            features,
            classes,
            examples: encoded,
            inv_variance: T::one() / (sigma * sigma),
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// Number of weights.
    pub fn dim(&self) -> usize {
        self.features.len() * self.classes.len()
    }

    fn scores(&self, w: &[T], x: &[(usize, T)], out: &mut [T]) {
        let c = self.classes.len();
        out.iter_mut().for_each(|s| *s = T::zero());
        for &(f, v) in x {
            let row = &w[f * c..(f + 1) * c];
            for (s, &wk) in out.iter_mut().zip(row) {
                *s = *s + wk * v;
            }
        }
    }

    fn penalty(&self, w: &[T]) -> T {
        let sq: T = w.iter().map(|&x| x * x).sum();
        sq * self.inv_variance / (T::one() + T::one())
    }

    /// Penalized log-likelihood at `w`.
    pub fn value(&self, w: &[T]) -> T {
        let mut scores = vec![T::zero(); self.classes.len()];
        let mut ll = T::zero();
        for (x, y) in &self.examples {
            self.scores(w, x, &mut scores);
            ll = ll + scores[*y] - log_sum_exp(&scores);
        }
        ll - self.penalty(w)
    }

    /// Analytic gradient of [`Objective::value`].
    pub fn gradient(&self, w: &[T]) -> Vec<T> {
        self.value_and_gradient(w).1
    }

    pub fn value_and_gradient(&self, w: &[T]) -> (T, Vec<T>) {
        let c = self.classes.len();
        let mut grad: Vec<T> = w.iter().map(|&x| -x * self.inv_variance).collect();
        let mut probs = vec![T::zero(); c];
        let mut ll = T::zero();
        for (x, y) in &self.examples {
            self.scores(w, x, &mut probs);
            ll = ll + probs[*y] - log_sum_exp(&probs);
            softmax_in_place(&mut probs);
            for &(f, v) in x {
                let row = &mut grad[f * c..(f + 1) * c];
                for (k, g) in row.iter_mut().enumerate() {
                    let observed = if k == *y { T::one() } else { T::zero() };
                    *g = *g + v * (observed - probs[k]);
                }
            }
        }
        (ll - self.penalty(w), grad)
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Trained weights plus the objective value after every accepted iterate
/// (starting with the zero vector).
pub struct TrainTrace<T> {
    pub model: MaxentModel<T>,
    pub objective_history: Vec<T>,
}

const LBFGS_MEMORY: usize = 10;
const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Fits a model with L-BFGS, maximizing the penalized likelihood.
pub fn train<T: Scalar>(examples: &[LabeledExample<T>], config: &TrainConfig<T>) -> Result<MaxentModel<T>> {
    train_traced(examples, config).map(|t| t.model)
}

pub fn train_traced<T: Scalar>(
    examples: &[LabeledExample<T>],
    config: &TrainConfig<T>,
) -> Result<TrainTrace<T>> {
    if config.max_iterations == 0 {
        return Err(Error::Training("max_iterations must be positive".into()));
    }
    if !(config.tolerance > T::zero()) {
        return Err(Error::Training("tolerance must be positive".into()));
    }
    let obj = Objective::new(examples, config.sigma)?;
    let n = obj.dim();
    let armijo = T::from_f64_lossy(ARMIJO_C);
    let half = T::from_f64_lossy(0.5);

    // Minimize f = -L.
    let mut w = vec![T::zero(); n];
    let (v, g) = obj.value_and_gradient(&w);
    let mut f = -v;
    let mut grad: Vec<T> = g.into_iter().map(|x| -x).collect();
    let mut history = vec![-f];
    let mut memory: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        let gnorm = dot(&grad, &grad).sqrt();
        if !gnorm.is_finite() {
            return Err(Error::Numerical("gradient is not finite".into()));
        }
        if gnorm < config.tolerance {
            converged = true;
            break;
        }

        // Two-loop recursion for d = -H·g.
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = *rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, &yi)| *qi = *qi - a * yi);
            alphas.push(a);
        }
        let gamma = match memory.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => T::one() / gnorm,
        };
        q.iter_mut().for_each(|qi| *qi = *qi * gamma);
        for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
            let b = *rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, &si)| *qi = *qi + (a - b) * si);
        }
        let mut dir: Vec<T> = q.into_iter().map(|x| -x).collect();
        let mut slope = dot(&grad, &dir);
        if !(slope < T::zero()) {
            memory.clear();
            dir = grad.iter().map(|&x| -x / gnorm).collect();
            slope = dot(&grad, &dir);
        }

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<T> = w.iter().zip(&dir).map(|(&wi, &di)| wi + step * di).collect();
            let (tv, tg) = obj.value_and_gradient(&trial);
            let tf = -tv;
            if tf.is_finite() && tf <= f + armijo * step * slope {
                accepted = Some((trial, tf, tg));
                break;
            }
            step = step * half;
        }
        let Some((new_w, new_f, new_g)) = accepted else {
            // No decrease possible at machine precision.
            converged = true;
            break;
        };
        let new_grad: Vec<T> = new_g.into_iter().map(|x| -x).collect();
        let s: Vec<T> = new_w.iter().zip(&w).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = new_grad.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::zero() {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, T::one() / sy));
        }
        let improvement = f - new_f;
        w = new_w;
        f = new_f;
        grad = new_grad;
        iterations += 1;
        history.push(-f);
        if improvement <= T::epsilon() * f.abs().max(T::one()) {
            converged = true;
            break;
        }
    }

    let c = obj.classes.len();
    let weights = obj
        .features
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), w[i * c..(i + 1) * c].to_vec()))
        .collect();
    let model = MaxentModel {
        classes: obj.classes.clone(),
        weights,
        sigma: config.sigma,
        info: TrainingInfo {
            iterations,
            objective: -f,
            converged,
        },
    };
    Ok(TrainTrace {
        model,
        objective_history: history,
    })
}

impl<T: Scalar> MaxentModel<T> {
    /// Builds a model from explicit weights, e.g. for tests or hand-made rules.
    /// Missing classes in a row are zero.
    pub fn from_weights(
        classes: Vec<String>,
        weights: BTreeMap<String, BTreeMap<String, T>>,
        sigma: T,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Model("model has no classes".into()));
        }
        let pos: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        if pos.len() != classes.len() {
            return Err(Error::Model("duplicate class".into()));
        }
        let mut rows = HashMap::new();
        for (feature, row) in weights {
            let mut dense = vec![T::zero(); classes.len()];
            for (class, w) in row {
                let k = *pos
                    .get(class.as_str())
                    .ok_or_else(|| Error::Model(format!("weight for unknown class `{class}`")))?;
                dense[k] = w;
            }
            rows.insert(feature, dense);
        }
        Ok(MaxentModel {
            classes,
            weights: rows,
            sigma,
            info: TrainingInfo {
                iterations: 0,
                objective: T::zero(),
                converged: true,
            },
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn info(&self) -> &TrainingInfo<T> {
        &self.info
    }

    pub fn weight(&self, feature: &str, class: &str) -> Option<T> {
        let k = self.classes.iter().position(|c| c == class)?;
        self.weights.get(feature).map(|row| row[k])
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    /// Unnormalized class scores; unseen features contribute nothing.
    pub fn scores(&self, features: &FeatureVector<T>) -> Vec<T> {
        let mut scores = vec![T::zero(); self.classes.len()];
        let bias = self.weights.get(BIAS_FEATURE).map(|row| (row, T::one()));
        let rows = features
            .values()
            .filter_map(|(k, v)| self.weights.get(k).map(|row| (row, v)));
        for (row, v) in bias.into_iter().chain(rows) {
            for (s, &w) in scores.iter_mut().zip(row) {
                *s = *s + w * v;
            }
        }
        scores
    }

    /// Class probabilities aligned with [`MaxentModel::classes`].
    pub fn probabilities(&self, features: &FeatureVector<T>) -> Vec<T> {
        let mut p = self.scores(features);
        softmax_in_place(&mut p);
        p
    }

    pub fn predict_proba(&self, features: &FeatureVector<T>) -> Vec<(&str, T)> {
        self.classes
            .iter()
            .map(String::as_str)
            .zip(self.probabilities(features))
            .collect()
    }

    /// Most probable class; ties go to the earlier class.
    pub fn predict(&self, features: &FeatureVector<T>) -> &str {
        let p = self.probabilities(features);
        let mut best = 0;
        for k in 1..p.len() {
            if p[k] > p[best] {
                best = k;
            }
        }
        &self.classes[best]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#classes\t{}", self.classes.join("\t"));
        let _ = writeln!(out, "#sigma\t{}", self.sigma);
        let _ = writeln!(out, "#iterations\t{}", self.info.iterations);
        let _ = writeln!(out, "#objective\t{}", self.info.objective);
        let _ = writeln!(out, "#converged\t{}", self.info.converged);
        let mut features: Vec<&String> = self.weights.keys().collect();
        features.sort();
        for f in features {
            for (class, w) in self.classes.iter().zip(&self.weights[f]) {
                let _ = writeln!(out, "{f}\t{class}\t{w}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut classes: Option<Vec<String>> = None;
        let mut sigma = None;
        let mut info = TrainingInfo {
            iterations: 0,
            objective: T::zero(),
            converged: false,
        };
        let mut weights: HashMap<String, Vec<T>> = HashMap::new();
        let mut class_pos: HashMap<String, usize> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |what: &str| Error::parse(line_no, format!("bad {what} in model file"));
            if let Some(key) = fields[0].strip_prefix('#') {
                let value = fields.get(1).copied().unwrap_or("");
                match key {
                    "classes" => {
                        let cs: Vec<String> = fields[1..].iter().map(|s| s.to_string()).collect();
                        class_pos = cs.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect();
                        if cs.is_empty() || class_pos.len() != cs.len() {
                            return Err(bad("class list"));
                        }
                        classes = Some(cs);
                    }
                    "sigma" => sigma = Some(value.parse::<T>().map_err(|_| bad("sigma"))?),
                    "iterations" => info.iterations = value.parse().map_err(|_| bad("iteration count"))?,
                    "objective" => info.objective = value.parse::<T>().map_err(|_| bad("objective"))?,
                    "converged" => info.converged = value.parse().map_err(|_| bad("converged flag"))?,
                    _ => return Err(bad("header")),
                }
                continue;
            }
            let cs = classes
                .as_ref()
                .ok_or_else(|| Error::parse(line_no, "weights before `#classes` header"))?;
            if fields.len() != 3 {
                return Err(bad("weight row"));
            }
            let k = *class_pos
                .get(fields[1])
                .ok_or_else(|| Error::parse(line_no, format!("unknown class `{}`", fields[1])))?;
            let w = fields[2].parse::<T>().map_err(|_| bad("weight"))?;
            weights
                .entry(fields[0].to_string())
                .or_insert_with(|| vec![T::zero(); cs.len()])[k] = w;
        }
        let classes = classes.ok_or_else(|| Error::Model("missing `#classes` header".into()))?;
        let sigma = sigma.ok_or_else(|| Error::Model("missing `#sigma` header".into()))?;
        Ok(MaxentModel {
            classes,
            weights,
            sigma,
            info,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path)?)
    }
}

/// Class probabilities as a map from class name.
pub fn predict_proba<T: Scalar>(model: &MaxentModel<T>, features: &FeatureVector<T>) -> BTreeMap<String, T> {
    model
        .predict_proba(features)
        .into_iter()
        .map(|(c, p)| (c.to_string(), p))
        .collect()
}

pub fn predict<'m, T: Scalar>(model: &'m MaxentModel<T>, features: &FeatureVector<T>) -> &'m str {
    model.predict(features)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(indicators: &[&str]) -> FeatureVector<f64> {
        let mut v = FeatureVector::new();
        for i in indicators {
            v.indicators.insert(i.to_string());
        }
        v
    }

    fn ex(indicators: &[&str], label: &str) -> LabeledExample<f64> {
        LabeledExample::new(fv(indicators), label)
    }

    #[test]
    fn uniform_zero_model() {
        let m = MaxentModel::<f64>::from_weights(
            vec!["a".into(), "b".into(), "c".into()],
            BTreeMap::new(),
            1.0,
        )
        .unwrap();
        for (_, p) in m.predict_proba(&fv(&["x=1"])) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        // Ties resolve to the first class.
        assert_eq!(m.predict(&fv(&[])), "a");
    }

    #[test]
    fn hand_softmax() {
        let weights = BTreeMap::from([(
            "f".to_string(),
            BTreeMap::from([("A".to_string(), 1.0), ("B".to_string(), 0.0)]),
        )]);
        let m = MaxentModel::from_weights(vec!["A".into(), "B".into()], weights, 1.0).unwrap();
        let p = predict_proba(&m, &fv(&["f"]));
        let e = std::f64::consts::E;
        assert!((p["A"] - e / (e + 1.0)).abs() < 1e-15);
        assert!((p["A"] - 0.7311).abs() < 1e-4);
        assert_eq!(predict(&m, &fv(&["f"])), "A");
        // Unseen features leave the bias-only (here uniform) distribution.
        assert_eq!(m.probabilities(&fv(&["g"])), vec![0.5, 0.5]);
    }

    #[test]
    fn training_errors() {
        let cfg = TrainConfig::default();
        assert!(matches!(train::<f64>(&[], &cfg), Err(Error::Training(_))));
        let one = vec![ex(&["a"], "x"), ex(&["b"], "x")];
        assert!(matches!(train(&one, &cfg), Err(Error::Training(_))));
        let two = vec![ex(&["a"], "x"), ex(&["b"], "y")];
        let bad_sigma = TrainConfig { sigma: 0.0, ..cfg };
        assert!(train(&two, &bad_sigma).is_err());
    }

    #[test]
    fn contradictory_examples_are_even() {
        let data = vec![ex(&["f"], "x"), ex(&["f"], "y"), ex(&["f"], "x"), ex(&["f"], "y")];
        let m = train(&data, &TrainConfig::default()).unwrap();
        let p = m.probabilities(&fv(&["f"]));
        assert!((p[0] - 0.5).abs() < 1e-6 && (p[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn model_text_round_trip() {
        let data = vec![ex(&["a=1"], "x"), ex(&["b=2"], "y"), ex(&["a=1", "c"], "x")];
        let m = train(&data, &TrainConfig::default()).unwrap();
        let text = m.to_text();
        let back = MaxentModel::<f64>::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
        assert!(MaxentModel::<f64>::parse("a\tx\t1\n").is_err());
    }

    #[test]
    fn generic_over_f32() {
        let mut a = FeatureVector::<f32>::new();
        a.indicator("f", "1");
        let data = vec![
            LabeledExample::new(a.clone(), "x"),
            LabeledExample::new(FeatureVector::new(), "y"),
        ];
        let m = train(&data, &TrainConfig::default()).unwrap();
        assert_eq!(m.predict(&a), "x");
    }
}
