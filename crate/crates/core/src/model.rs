//! The dressed quantum circuit classifier (512 -> 4 linear, 4-qubit circuit,
//! 4 -> 2 linear), the purely classical 512 -> 2 baseline, and the shared
//! training and evaluation loops.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{Sample, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::metrics::{confusion, ConfusionMatrix};
use crate::nn::{softmax_cross_entropy, AdamState, LinearLayer};
use crate::rng::{stream_rng, Stream, DEFAULT_SEED};
use crate::vqc::{vqc_forward, vqc_gradient, VariationalParams, NUM_QUBITS};

pub const NUM_CLASSES: usize = 2;

/// Anything the training loop can optimize: a two-logit classifier whose
/// parameters can be viewed as one flat vector.
pub trait Classifier {
    fn logits(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]>;

    fn num_params(&self) -> usize;

    /// All parameters in declaration order.
    fn flat_params(&self) -> Vec<f64>;

    fn set_flat_params(&mut self, params: &[f64]) -> Result<()>;

    /// Cross-entropy loss of one sample and its gradient, laid out like
    /// [`Classifier::flat_params`].
    fn loss_and_grad(&self, features: &[f64], label: u8) -> Result<(f64, Vec<f64>)>;

    fn loss(&self, features: &[f64], label: u8) -> Result<f64> {
        Ok(softmax_cross_entropy(&self.logits(features)?, label)?.value)
    }
}

/// Class with the larger logit; exact ties go to class 0.
pub fn predict(logits: &[f64; NUM_CLASSES]) -> u8 {
    u8::from(logits[1] > logits[0])
}

fn check_features(features: &[f64]) -> Result<()> {
    if features.len() != FEATURE_DIM {
        return Err(Error::invalid(format!(
            "expected {FEATURE_DIM} features, got {}",
            features.len()
        )));
    }
    Ok(())
}

fn to_logits(v: Vec<f64>) -> [f64; NUM_CLASSES] {
    [v[0], v[1]]
}

fn to_qubits(v: &[f64]) -> [f64; NUM_QUBITS] {
    [v[0], v[1], v[2], v[3]]
}

fn read_layer(layer: &mut LinearLayer, params: &[f64]) -> usize {
    let nw = layer.weights().len();
    let nb = layer.bias().len();
    layer.weights_mut().copy_from_slice(&params[..nw]);
    layer.bias_mut().copy_from_slice(&params[nw..nw + nb]);
    nw + nb
}

fn check_flat(params: &[f64], expected: usize) -> Result<()> {
    if params.len() != expected {
        return Err(Error::invalid(format!(
            "expected {expected} parameters, got {}",
            params.len()
        )));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("parameters must be finite"));
    }
    Ok(())
}

/// Pre-layer (512 -> 4), variational circuit, post-layer (4 -> 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHybrid")]
pub struct HybridModel {
    pre_layer: LinearLayer,
    vqc: VariationalParams,
    post_layer: LinearLayer,
}

#[derive(Deserialize)]
struct RawHybrid {
    pre_layer: LinearLayer,
    vqc: VariationalParams,
    post_layer: LinearLayer,
}

impl TryFrom<RawHybrid> for HybridModel {
    type Error = Error;

    fn try_from(r: RawHybrid) -> Result<Self> {
        HybridModel::new(r.pre_layer, r.vqc, r.post_layer)
    }
}

/// Per-block gradients of a [`HybridModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct HybridGradients {
    pub loss: f64,
    pub pre_weights: Vec<f64>,
    pub pre_bias: Vec<f64>,
    pub vqc: Vec<[f64; NUM_QUBITS]>,
    pub post_weights: Vec<f64>,
    pub post_bias: Vec<f64>,
}

impl HybridGradients {
    pub fn flatten(self) -> Vec<f64> {
        let mut out = self.pre_weights;
        out.extend(self.pre_bias);
        out.extend(self.vqc.into_iter().flatten());
        out.extend(self.post_weights);
        out.extend(self.post_bias);
        out
    }
}

impl HybridModel {
    pub fn new(
        pre_layer: LinearLayer,
        vqc: VariationalParams,
        post_layer: LinearLayer,
    ) -> Result<Self> {
        if pre_layer.in_dim() != FEATURE_DIM || pre_layer.out_dim() != NUM_QUBITS {
            return Err(Error::invalid(format!(
                "pre-layer must be {FEATURE_DIM}->{NUM_QUBITS}, got {}->{}",
                pre_layer.in_dim(),
                pre_layer.out_dim()
            )));
        }
        if post_layer.in_dim() != NUM_QUBITS || post_layer.out_dim() != NUM_CLASSES {
            return Err(Error::invalid(format!(
                "post-layer must be {NUM_QUBITS}->{NUM_CLASSES}, got {}->{}",
                post_layer.in_dim(),
                post_layer.out_dim()
            )));
        }
        Ok(Self {
            pre_layer,
            vqc,
            post_layer,
        })
    }

    /// Glorot-uniform linear layers and `N(0, 0.01)` circuit weights.
    pub fn init(depth: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::ModelInit);
        let pre_layer = LinearLayer::glorot(FEATURE_DIM, NUM_QUBITS, &mut rng).expect("valid dims");
        let normal = Normal::new(0.0, 0.01).expect("valid std");
        let rows = (0..depth)
            .map(|_| std::array::from_fn(|_| normal.sample(&mut rng)))
            .collect();
        let vqc = VariationalParams::new(rows).expect("finite draws");
        let post_layer =
            LinearLayer::glorot(NUM_QUBITS, NUM_CLASSES, &mut rng).expect("valid dims");
        Self {
            pre_layer,
            vqc,
            post_layer,
        }
    }

    /// Every parameter zero.
    pub fn zeros(depth: usize) -> Self {
        Self {
            pre_layer: LinearLayer::zeros(FEATURE_DIM, NUM_QUBITS).expect("valid dims"),
            vqc: VariationalParams::zeros(depth),
            post_layer: LinearLayer::zeros(NUM_QUBITS, NUM_CLASSES).expect("valid dims"),
        }
    }

    pub fn pre_layer(&self) -> &LinearLayer {
        &self.pre_layer
    }

    pub fn vqc(&self) -> &VariationalParams {
        &self.vqc
    }

    pub fn post_layer(&self) -> &LinearLayer {
        &self.post_layer
    }

    pub fn depth(&self) -> usize {
        self.vqc.depth()
    }

    /// Logits of one feature vector; no activation is applied to them.
    pub fn forward(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        check_features(features)?;
        let reduced = to_qubits(&self.pre_layer.forward(features)?);
        let measured = vqc_forward(&reduced, &self.vqc)?;
        Ok(to_logits(self.post_layer.forward(&measured)?))
    }

    /// Exact gradients of the cross-entropy loss of one labelled sample.
    pub fn backward(&self, features: &[f64], label: u8) -> Result<HybridGradients> {
        check_features(features)?;
        let reduced = to_qubits(&self.pre_layer.forward(features)?);
        let measured = vqc_forward(&reduced, &self.vqc)?;
        let logits = to_logits(self.post_layer.forward(&measured)?);
        let loss = softmax_cross_entropy(&logits, label)?;

        let post = self.post_layer.backward(&measured, &loss.grad_logits)?;
        let circuit = vqc_gradient(&reduced, &self.vqc, &to_qubits(&post.input))?;
        let pre = self.pre_layer.backward(features, &circuit.features)?;
        Ok(HybridGradients {
            loss: loss.value,
            pre_weights: pre.weights,
            pre_bias: pre.bias,
            vqc: circuit.params,
            post_weights: post.weights,
            post_bias: post.bias,
        })
    }
}

impl Classifier for HybridModel {
    fn logits(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        self.forward(features)
    }

    fn num_params(&self) -> usize {
        self.pre_layer.num_params() + self.vqc.len() + self.post_layer.num_params()
    }

    fn flat_params(&self) -> Vec<f64> {
        let mut out = self.pre_layer.weights().to_vec();
        out.extend_from_slice(self.pre_layer.bias());
        out.extend(self.vqc.rows().iter().flatten());
        out.extend_from_slice(self.post_layer.weights());
        out.extend_from_slice(self.post_layer.bias());
        out
    }

    fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        check_flat(params, self.num_params())?;
        let mut at = read_layer(&mut self.pre_layer, params);
        for row in self.vqc.rows_mut() {
            row.copy_from_slice(&params[at..at + NUM_QUBITS]);
            at += NUM_QUBITS;
        }
        read_layer(&mut self.post_layer, &params[at..]);
        Ok(())
    }

    fn loss_and_grad(&self, features: &[f64], label: u8) -> Result<(f64, Vec<f64>)> {
        let g = self.backward(features, label)?;
        Ok((g.loss, g.flatten()))
    }
}

/// Single 512 -> 2 linear head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBaseline")]
pub struct ClassicalBaseline {
    head: LinearLayer,
}

#[derive(Deserialize)]
struct RawBaseline {
    head: LinearLayer,
}

impl TryFrom<RawBaseline> for ClassicalBaseline {
    type Error = Error;

    fn try_from(r: RawBaseline) -> Result<Self> {
        ClassicalBaseline::new(r.head)
    }
}

impl ClassicalBaseline {
    pub fn new(head: LinearLayer) -> Result<Self> {
        if head.in_dim() != FEATURE_DIM || head.out_dim() != NUM_CLASSES {
            return Err(Error::invalid(format!(
                "classical head must be {FEATURE_DIM}->{NUM_CLASSES}, got {}->{}",
                head.in_dim(),
                head.out_dim()
            )));
        }
        Ok(Self { head })
    }

    pub fn init(seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::ModelInit);
        Self {
            head: LinearLayer::glorot(FEATURE_DIM, NUM_CLASSES, &mut rng).expect("valid dims"),
        }
    }

    pub fn zeros() -> Self {
        Self {
            head: LinearLayer::zeros(FEATURE_DIM, NUM_CLASSES).expect("valid dims"),
        }
    }

    pub fn head(&self) -> &LinearLayer {
        &self.head
    }

    pub fn forward(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        check_features(features)?;
        Ok(to_logits(self.head.forward(features)?))
    }
}

impl Classifier for ClassicalBaseline {
    fn logits(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        self.forward(features)
    }

    fn num_params(&self) -> usize {
        self.head.num_params()
    }

    fn flat_params(&self) -> Vec<f64> {
        let mut out = self.head.weights().to_vec();
        out.extend_from_slice(self.head.bias());
        out
    }

    fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        check_flat(params, self.num_params())?;
        read_layer(&mut self.head, params);
        Ok(())
    }

    fn loss_and_grad(&self, features: &[f64], label: u8) -> Result<(f64, Vec<f64>)> {
        let logits = self.forward(features)?;
        let loss = softmax_cross_entropy(&logits, label)?;
        let g = self.head.backward(features, &loss.grad_logits)?;
        let mut flat = g.weights;
        flat.extend(g.bias);
        Ok((loss.value, flat))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Hybrid,
    Classical,
}

/// Either model, behind one [`Classifier`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Hybrid(HybridModel),
    Classical(ClassicalBaseline),
}

impl Model {
    pub fn init(kind: ModelKind, depth: usize, seed: u64) -> Self {
        match kind {
            ModelKind::Hybrid => Model::Hybrid(HybridModel::init(depth, seed)),
            ModelKind::Classical => Model::Classical(ClassicalBaseline::init(seed)),
        }
    }

    pub fn zeros(kind: ModelKind, depth: usize) -> Self {
        match kind {
            ModelKind::Hybrid => Model::Hybrid(HybridModel::zeros(depth)),
            ModelKind::Classical => Model::Classical(ClassicalBaseline::zeros()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Hybrid(_) => ModelKind::Hybrid,
            Model::Classical(_) => ModelKind::Classical,
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            Model::Hybrid(m) => m,
            Model::Classical(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Classifier {
        match self {
            Model::Hybrid(m) => m,
            Model::Classical(m) => m,
        }
    }
}

impl Classifier for Model {
    fn logits(&self, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        self.inner().logits(features)
    }

    fn num_params(&self) -> usize {
        self.inner().num_params()
    }

    fn flat_params(&self) -> Vec<f64> {
        self.inner().flat_params()
    }

    fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        self.inner_mut().set_flat_params(params)
    }

    fn loss_and_grad(&self, features: &[f64], label: u8) -> Result<(f64, Vec<f64>)> {
        self.inner().loss_and_grad(features, label)
    }
}

/// Optimization hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub depth: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 1e-4,
            batch_size: 32,
            depth: 3,
            seed: DEFAULT_SEED,
        }
    }
}

impl TrainConfig {
    /// A zero learning rate is accepted (the parameters then stay fixed).
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be positive"));
        }
        if self.depth == 0 {
            return Err(Error::invalid("depth must be positive"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::invalid(format!(
                "learning_rate {} must be finite and non-negative",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Mean loss and accuracy of one epoch, measured after its last update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: Option<f64>,
    pub val_acc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
}

impl History {
    /// `epoch,train_loss,train_acc,val_loss,val_acc`; absent validation
    /// values are left empty.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc\n");
        for r in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.epoch,
                r.train_loss,
                r.train_acc,
                opt(r.val_loss),
                opt(r.val_acc)
            ));
        }
        out
    }
}

struct Prepared {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl Prepared {
    fn new(samples: &[Sample]) -> Self {
        Self {
            features: samples.iter().map(Sample::features_f64).collect(),
            labels: samples.iter().map(Sample::label).collect(),
        }
    }

    fn loss_and_accuracy<C: Classifier + ?Sized>(&self, model: &C) -> Result<(f64, f64)> {
        let mut loss = 0.0;
        let mut correct = 0usize;
        for (x, &y) in self.features.iter().zip(&self.labels) {
            let logits = model.logits(x)?;
            loss += softmax_cross_entropy(&logits, y)?.value;
            correct += usize::from(predict(&logits) == y);
        }
        let n = self.labels.len() as f64;
        Ok((loss / n, correct as f64 / n))
    }
}

/// Mini-batch Adam on the mean batch cross-entropy.
///
/// Each epoch visits the training set in a permutation drawn from
/// `(config.seed, epoch)`; the last partial batch is kept. Per-sample
/// gradients are summed in batch order, so the result is a pure function
/// of the data order and the config.
pub fn train<C: Classifier + ?Sized>(
    model: &mut C,
    train_set: &[Sample],
    validation: Option<&[Sample]>,
    config: &TrainConfig,
) -> Result<History> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    let data = Prepared::new(train_set);
    let val = validation.filter(|v| !v.is_empty()).map(Prepared::new);

    let mut params = model.flat_params();
    let mut adam = AdamState::new(params.len());
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = History::default();

    for epoch in 0..config.epochs {
        order.sort_unstable();
        order.shuffle(&mut stream_rng(
            config.seed,
            Stream::Shuffle {
                epoch: epoch as u64,
            },
        ));
        for batch in order.chunks(config.batch_size) {
            let mut grad = vec![0.0; params.len()];
            for &i in batch {
                let (_, g) = model.loss_and_grad(&data.features[i], data.labels[i])?;
                for (acc, v) in grad.iter_mut().zip(g) {
                    *acc += v;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(&mut params, &grad, config.learning_rate)?;
            model.set_flat_params(&params)?;
        }

        let (train_loss, train_acc) = data.loss_and_accuracy(model)?;
        let (val_loss, val_acc) = match &val {
            Some(v) => {
                let (l, a) = v.loss_and_accuracy(model)?;
                (Some(l), Some(a))
            }
            None => (None, None),
        };
        history.epochs.push(EpochRecord {
            epoch: epoch + 1,
            train_loss,
            train_acc,
            val_loss,
            val_acc,
        });
    }
    Ok(history)
}

/// Predictions, raw logits and confusion matrix over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub predictions: Vec<u8>,
    pub logits: Vec<[f64; NUM_CLASSES]>,
    pub confusion: ConfusionMatrix,
}

impl Evaluation {
    /// `index,label,prediction,logit0,logit1`.
    pub fn predictions_csv(&self, labels: &[u8]) -> String {
        let mut out = String::from("index,label,prediction,logit0,logit1\n");
        for (i, ((p, l), y)) in self
            .predictions
            .iter()
            .zip(&self.logits)
            .zip(labels)
            .enumerate()
        {
            out.push_str(&format!("{i},{y},{p},{},{}\n", l[0], l[1]));
        }
        out
    }
}

pub fn evaluate<C: Classifier + ?Sized>(model: &C, dataset: &[Sample]) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::invalid("evaluation set is empty"));
    }
    let mut predictions = Vec::with_capacity(dataset.len());
    let mut logits = Vec::with_capacity(dataset.len());
    for s in dataset {
        let l = model.logits(&s.features_f64())?;
        predictions.push(predict(&l));
        logits.push(l);
    }
    let labels: Vec<u8> = dataset.iter().map(Sample::label).collect();
    let confusion = confusion(&predictions, &labels)?;
    Ok(Evaluation {
        predictions,
        logits,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_synthetic;
    use crate::vqc::encode_angles;

    fn random_features(seed: u64) -> Vec<f64> {
        gen_synthetic(1, 1.0, 1.0, seed).unwrap()[0].features_f64()
    }

    #[test]
    fn zero_model_gives_zero_logits() {
        let m = HybridModel::zeros(3);
        assert_eq!(m.forward(&random_features(1)).unwrap(), [0.0, 0.0]);
        let b = ClassicalBaseline::zeros();
        assert_eq!(b.forward(&random_features(1)).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn forward_rejects_wrong_length() {
        assert!(HybridModel::zeros(1).forward(&[0.0; 511]).is_err());
        assert!(ClassicalBaseline::zeros().forward(&[0.0; 513]).is_err());
    }

    #[test]
    fn forward_matches_manual_composition() {
        let m = HybridModel::init(2, 9);
        let x = random_features(2);
        let h = m.pre_layer().forward(&x).unwrap();
        let angles_in = [h[0], h[1], h[2], h[3]];
        assert!(encode_angles(&angles_in).is_ok());
        let q = vqc_forward(&angles_in, m.vqc()).unwrap();
        let l = m.post_layer().forward(&q).unwrap();
        assert_eq!(m.forward(&x).unwrap(), [l[0], l[1]]);
    }

    #[test]
    fn parameter_count() {
        for d in 1..=4 {
            let m = HybridModel::init(d, 0);
            assert_eq!(m.num_params(), 512 * 4 + 4 + d * 4 + 4 * 2 + 2);
            assert_eq!(m.flat_params().len(), m.num_params());
        }
        assert_eq!(ClassicalBaseline::zeros().num_params(), 512 * 2 + 2);
    }

    #[test]
    fn flat_params_round_trip() {
        let m = HybridModel::init(3, 4);
        let mut z = HybridModel::zeros(3);
        z.set_flat_params(&m.flat_params()).unwrap();
        assert_eq!(z, m);
        assert!(z.set_flat_params(&[0.0; 3]).is_err());
    }

    #[test]
    fn predict_ties_and_shift_invariance() {
        assert_eq!(predict(&[0.0, 0.0]), 0);
        assert_eq!(predict(&[0.0, 1e-12]), 1);
        assert_eq!(predict(&[2.0, 1.0]), 0);
        for (a, b) in [(0.3, 0.7), (1.0, -1.0), (5.0, 5.0)] {
            assert_eq!(predict(&[a, b]), predict(&[a + 100.0, b + 100.0]));
        }
    }

    #[test]
    fn evaluate_zero_model_predicts_class_zero() {
        let data = gen_synthetic(10, 3.0, 0.5, 1).unwrap();
        let e = evaluate(&HybridModel::zeros(2), &data).unwrap();
        assert!(e.predictions.iter().all(|&p| p == 0));
        assert_eq!(e.confusion.total(), 20);
        assert!(evaluate(&HybridModel::zeros(2), &[]).is_err());
    }

    #[test]
    fn train_rejects_empty_and_bad_config() {
        let mut m = ClassicalBaseline::zeros();
        assert!(train(&mut m, &[], None, &TrainConfig::default()).is_err());
        let data = gen_synthetic(2, 3.0, 0.5, 1).unwrap();
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(train(&mut m, &data, None, &cfg).is_err());
    }

    #[test]
    fn zero_learning_rate_keeps_loss_constant() {
        let data = gen_synthetic(8, 3.0, 0.5, 1).unwrap();
        let mut m = HybridModel::init(1, 3);
        let cfg = TrainConfig {
            epochs: 3,
            learning_rate: 0.0,
            depth: 1,
            ..TrainConfig::default()
        };
        let h = train(&mut m, &data, None, &cfg).unwrap();
        assert_eq!(h.epochs.len(), 3);
        assert!(h
            .epochs
            .iter()
            .all(|r| r.train_loss == h.epochs[0].train_loss));
        assert_eq!(m, HybridModel::init(1, 3));
    }

    #[test]
    fn training_is_deterministic() {
        let data = gen_synthetic(10, 3.0, 0.5, 2).unwrap();
        let cfg = TrainConfig {
            epochs: 2,
            batch_size: 6,
            depth: 1,
            ..TrainConfig::default()
        };
        let run = || {
            let mut m = HybridModel::init(1, 5);
            let h = train(&mut m, &data, Some(&data[..4]), &cfg).unwrap();
            (m, h.to_csv())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn history_csv_shape() {
        let data = gen_synthetic(4, 3.0, 0.5, 2).unwrap();
        let mut m = ClassicalBaseline::init(1);
        let cfg = TrainConfig {
            epochs: 4,
            ..TrainConfig::default()
        };
        let csv = train(&mut m, &data, None, &cfg).unwrap().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "epoch,train_loss,train_acc,val_loss,val_acc");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,") && lines[1].ends_with(",,"));
    }
}
