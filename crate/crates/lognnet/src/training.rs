//! Class balancing, head training by per-sample gradient descent,
//! confusion-matrix metrics, and balanced K-fold cross-validation.
//!
//! Balancing equalizes the class counts by cycling each class's members
//! in their original order up to the largest class count, then
//! interleaves the groups round-robin. Training makes `epochs` passes
//! over the balanced sequence in order, descending the cross-entropy loss
//! one sample at a time; only the head weights move, the reservoir and
//! divisors stay frozen.
//!
//! Cross-validation shuffles once with the run seed, splits into
//! stratified folds, and gives every fold its own derived model seed, so
//! fold jobs are independent: parallel and serial execution produce the
//! same report.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaos::GeneratorParams;
use crate::dataset::{normalization_divisors, Dataset, FeatureMask, Sample};
use crate::error::{Error, Result};
use crate::exec;
use crate::network::{init_model, LogNNetModel, NetworkShape};
use crate::seeding;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Ep: passes over the balanced training sequence.
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// K: number of cross-validation folds.
    pub folds: usize,
    /// Stratify folds by class (recommended for imbalanced sets). The
    /// unstratified mode chunks the shuffled order directly.
    pub stratified: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            learning_rate: 0.1,
            seed: 42,
            folds: 5,
            stratified: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// Equalizes class counts by cycling each class's members in original
/// order up to the largest count, then interleaves the class groups
/// round-robin (class order = first appearance). Output length is
/// `classes * MAX`.
pub fn balance_training_set(samples: &[Sample]) -> Result<Vec<Sample>> {
    if samples.is_empty() {
        return Err(Error::Balance("empty training set".into()));
    }
    let mut class_order: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<&Sample>> = Vec::new();
    for s in samples {
        match class_order.iter().position(|&c| c == s.label) {
            Some(g) => groups[g].push(s),
            None => {
                class_order.push(s.label);
                groups.push(vec![s]);
            }
        }
    }
    let max = groups.iter().map(Vec::len).max().unwrap();
    let mut out = Vec::with_capacity(groups.len() * max);
    for i in 0..max {
        for group in &groups {
            out.push(group[i % group.len()].clone());
        }
    }
    Ok(out)
}

/// Cross-entropy of the model's output against the sample's label.
pub fn cross_entropy_loss(model: &LogNNetModel, sample: &Sample) -> Result<f64> {
    let trace = model.forward(&sample.values)?;
    if sample.label >= model.shape.classes {
        return Err(Error::Shape(format!(
            "label {} outside 0..{}",
            sample.label, model.shape.classes
        )));
    }
    Ok(-trace.output[sample.label].max(f64::MIN_POSITIVE).ln())
}

/// Gradients of the cross-entropy loss for one sample with respect to
/// the head weights.
#[derive(Debug, Clone)]
pub struct HeadGradients {
    /// d loss / d hidden_weights, H x (P+1).
    pub hidden: crate::matrix::DenseMatrix,
    /// d loss / d output_weights, M x (H+1).
    pub output: crate::matrix::DenseMatrix,
}

// Backward pass through the head given the forward activations. Returns
// (output deltas, hidden deltas); the weight gradients are their outer
// products with the incoming layers.
fn head_deltas(
    model: &LogNNetModel,
    hidden_act: &[f64],
    output: &[f64],
    label: usize,
) -> (Vec<f64>, Vec<f64>) {
    let m = model.shape.classes;
    let h = model.shape.hidden;
    let mut delta_out = Vec::with_capacity(m);
    for (k, &o) in output.iter().enumerate() {
        delta_out.push(o - if k == label { 1.0 } else { 0.0 });
    }
    let mut delta_hidden = Vec::with_capacity(h);
    for (j, &a) in hidden_act.iter().enumerate() {
        let mut back = 0.0;
        for (k, &d) in delta_out.iter().enumerate() {
            // column j+1 skips the bias weight
            back += model.weights.output.get(k, j + 1) * d;
        }
        delta_hidden.push(back * a * (1.0 - a));
    }
    (delta_out, delta_hidden)
}

/// Computes the per-sample head gradients without touching the model.
pub fn cross_entropy_gradients(model: &LogNNetModel, sample: &Sample) -> Result<HeadGradients> {
    if sample.label >= model.shape.classes {
        return Err(Error::Shape(format!(
            "label {} outside 0..{}",
            sample.label, model.shape.classes
        )));
    }
    let reservoir_layer = model.reservoir_layer(&sample.values)?;
    let (hidden_act, output) = model.head_forward(&reservoir_layer);
    let (delta_out, delta_hidden) = head_deltas(model, &hidden_act, &output, sample.label);

    let h = model.shape.hidden;
    let p1 = model.shape.reservoir_outputs + 1;
    let m = model.shape.classes;
    let mut hidden = crate::matrix::DenseMatrix::zeros(h, p1);
    for (r, &dh) in delta_hidden.iter().enumerate() {
        for (c, &x) in reservoir_layer.iter().enumerate() {
            hidden.set(r, c, dh * x);
        }
    }
    let mut augmented = Vec::with_capacity(h + 1);
    augmented.push(1.0);
    augmented.extend_from_slice(&hidden_act);
    let mut output_grad = crate::matrix::DenseMatrix::zeros(m, h + 1);
    for (r, &dk) in delta_out.iter().enumerate() {
        for (c, &x) in augmented.iter().enumerate() {
            output_grad.set(r, c, dk * x);
        }
    }
    Ok(HeadGradients {
        hidden,
        output: output_grad,
    })
}

/// Trains the head in place: `epochs` passes over `sequence` in its given
/// order, one gradient step per sample. Deterministic given the model,
/// sequence and config.
pub fn train(model: &mut LogNNetModel, sequence: &[Sample], cfg: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    if sequence.is_empty() {
        return Err(Error::Balance("empty training sequence".into()));
    }
    // The reservoir and divisors are frozen, so each element's reservoir
    // layer can be computed once up front.
    let mut features = Vec::with_capacity(sequence.len());
    for s in sequence {
        if s.label >= model.shape.classes {
            return Err(Error::Shape(format!(
                "label {} outside 0..{}",
                s.label, model.shape.classes
            )));
        }
        features.push(model.reservoir_layer(&s.values)?);
    }

    let lr = cfg.learning_rate;
    let h = model.shape.hidden;
    let m = model.shape.classes;
    for _ in 0..cfg.epochs {
        for (reservoir_layer, s) in features.iter().zip(sequence) {
            let (hidden_act, output) = model.head_forward(reservoir_layer);
            let (delta_out, delta_hidden) = head_deltas(model, &hidden_act, &output, s.label);
            for (r, &dk) in delta_out.iter().enumerate().take(m) {
                let row = model.weights.output.row_mut(r);
                row[0] -= lr * dk;
                for (c, &a) in hidden_act.iter().enumerate() {
                    row[c + 1] -= lr * dk * a;
                }
            }
            for (r, &dh) in delta_hidden.iter().enumerate().take(h) {
                let row = model.weights.hidden.row_mut(r);
                for (c, &x) in reservoir_layer.iter().enumerate() {
                    row[c] -= lr * dh * x;
                }
            }
        }
    }
    Ok(())
}

/// Counts with class 1 as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "tp")]
    pub true_positives: usize,
    #[serde(rename = "tn")]
    pub true_negatives: usize,
    #[serde(rename = "fp")]
    pub false_positives: usize,
    #[serde(rename = "fn")]
    pub false_negatives: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }
}

/// Precision/recall/F1 for one class. `undefined` marks a class absent
/// from both truth and prediction, whose metrics are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Accuracy in percent: 100 * (TP + TN) / total.
    pub accuracy: f64,
    /// Index 0 = class 0, index 1 = class 1.
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
}

/// Builds the confusion matrix and per-class metrics from (truth,
/// prediction) pairs with labels in {0, 1}.
pub fn compute_metrics(pairs: &[(usize, usize)]) -> Result<Metrics> {
    if pairs.is_empty() {
        return Err(Error::Config("no (truth, prediction) pairs".into()));
    }
    let (mut tp, mut tn, mut fp, mut fntv) = (0usize, 0usize, 0usize, 0usize);
    for &(truth, pred) in pairs {
        if truth > 1 || pred > 1 {
            return Err(Error::Config(format!(
                "labels must be 0 or 1, got ({truth}, {pred})"
            )));
        }
        match (truth, pred) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fp += 1,
            (1, 0) => fntv += 1,
            _ => unreachable!(),
        }
    }
    let confusion = ConfusionMatrix {
        true_positives: tp,
        true_negatives: tn,
        false_positives: fp,
        false_negatives: fntv,
    };
    let total = confusion.total() as f64;
    let accuracy = 100.0 * (tp + tn) as f64 / total;

    let class_metrics = |correct: usize, predicted: usize, actual: usize| {
        let undefined = predicted == 0 && actual == 0;
        let precision = if predicted > 0 {
            correct as f64 / predicted as f64
        } else {
            0.0
        };
        let recall = if actual > 0 {
            correct as f64 / actual as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            undefined,
        }
    };
    let per_class = vec![
        class_metrics(tn, tn + fntv, tn + fp),
        class_metrics(tp, tp + fp, tp + fntv),
    ];
    Ok(Metrics {
        accuracy,
        per_class,
        confusion,
    })
}

/// Result of one cross-validation run. `pooled` is computed from the
/// concatenated (truth, prediction) pairs of all test folds;
/// `mean_fold_accuracy` averages the per-fold accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub pooled: Metrics,
    pub mean_fold_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

// Fold assignment per sample index, over the shuffled order.
fn assign_folds(
    ds: &Dataset,
    shuffled: &[usize],
    folds: usize,
    stratified: bool,
) -> Result<Vec<usize>> {
    let mut fold_of = vec![0usize; ds.len()];
    if stratified {
        for class in 0..2 {
            let members: Vec<usize> = shuffled
                .iter()
                .copied()
                .filter(|&i| ds.samples[i].label == class)
                .collect();
            if !members.is_empty() && members.len() < folds {
                return Err(Error::Fold(format!(
                    "class {class} has {} members, fewer than {folds} folds \
                     (disable stratification to proceed)",
                    members.len()
                )));
            }
            for (pos, &i) in members.iter().enumerate() {
                fold_of[i] = pos % folds;
            }
        }
    } else {
        let n = shuffled.len();
        let base = n / folds;
        let extra = n % folds;
        let mut start = 0;
        for f in 0..folds {
            let size = base + usize::from(f < extra);
            for &i in &shuffled[start..start + size] {
                fold_of[i] = f;
            }
            start += size;
        }
    }
    Ok(fold_of)
}

/// Balanced K-fold cross-validation of a model specification on a
/// dataset under a feature mask.
///
/// Per fold: divisors are frozen from the masked training parts, the
/// training parts are balanced and the head trained from a fresh
/// fold-seeded initialization, then the held-out fold is predicted.
/// Fold jobs run independently (in parallel with the `parallel` feature)
/// and the report does not depend on the execution order.
pub fn kfold_evaluate(
    ds: &Dataset,
    shape: NetworkShape,
    gen: &GeneratorParams,
    mask: &FeatureMask,
    cfg: &TrainConfig,
) -> Result<CvReport> {
    cfg.validate()?;
    shape.validate()?;
    if ds.is_empty() {
        return Err(Error::Fold("empty dataset".into()));
    }
    if cfg.folds > ds.len() {
        return Err(Error::Fold(format!(
            "{} folds for {} samples",
            cfg.folds,
            ds.len()
        )));
    }
    if shape.inputs != ds.feature_count() {
        return Err(Error::Shape(format!(
            "shape has {} inputs, dataset has {} features",
            shape.inputs,
            ds.feature_count()
        )));
    }
    if mask.feature_count() != ds.feature_count() {
        return Err(Error::Mask(format!(
            "mask covers {} features, dataset has {}",
            mask.feature_count(),
            ds.feature_count()
        )));
    }

    let mut shuffled: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffled.shuffle(&mut rng);
    let fold_of = assign_folds(ds, &shuffled, cfg.folds, cfg.stratified)?;

    type FoldOutcome = (Vec<(usize, usize)>, f64);
    let fold_results: Vec<Result<FoldOutcome>> =
        exec::map_indices(cfg.folds, |fold| {
            let train: Vec<Sample> = shuffled
                .iter()
                .filter(|&&i| fold_of[i] != fold)
                .map(|&i| ds.samples[i].masked(mask))
                .collect();
            let test: Vec<&Sample> = shuffled
                .iter()
                .filter(|&&i| fold_of[i] == fold)
                .map(|&i| &ds.samples[i])
                .collect();
            if train.is_empty() || test.is_empty() {
                return Err(Error::Fold(format!("fold {fold} has an empty split")));
            }
            let divisors = normalization_divisors(&train, mask);
            let balanced = balance_training_set(&train)?;
            let mut model = init_model(shape, *gen, divisors, seeding::fold_seed(cfg.seed, fold))?;
            self::train(&mut model, &balanced, cfg)?;
            let mut pairs = Vec::with_capacity(test.len());
            for s in test {
                let masked = s.masked(mask);
                pairs.push((s.label, model.predict(&masked.values)?));
            }
            let correct = pairs.iter().filter(|(t, p)| t == p).count();
            let accuracy = 100.0 * correct as f64 / pairs.len() as f64;
            Ok((pairs, accuracy))
        });

    let mut pooled = Vec::with_capacity(ds.len());
    let mut fold_accuracies = Vec::with_capacity(cfg.folds);
    for r in fold_results {
        let (pairs, acc) = r?;
        pooled.extend(pairs);
        fold_accuracies.push(acc);
    }
    let mean_fold_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    Ok(CvReport {
        pooled: compute_metrics(&pooled)?,
        mean_fold_accuracy,
        fold_accuracies,
    })
}
