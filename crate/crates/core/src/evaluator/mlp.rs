//! Fully connected binary classifier with two hidden layers of 22 units and
//! a single sigmoid output, trained by mini-batch gradient descent on binary
//! cross-entropy.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, seeded};

pub const HIDDEN_UNITS: usize = 22;

/// Predicted probabilities are kept this far away from 0 and 1.
const PROB_MARGIN: f64 = 1e-15;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cross-entropy of a logit against a 0/1 target, without forming the
/// probability (stable for large |z|).
#[inline]
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Dense layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn xavier(inputs: usize, outputs: usize, rng: &mut impl Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        Self {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.gen_range(-limit..=limit)).collect(),
            biases: vec![0.0; outputs],
        }
    }

    #[inline]
    fn forward_into(&self, x: &[f64], z: &mut [f64]) {
        for (o, zo) in z.iter_mut().enumerate() {
            let w = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            *zo = self.biases[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    layers: Vec<Layer>,
    hidden: Activation,
}

impl MlpModel {
    /// Fresh `n → 22 → 22 → 1` network with Glorot-uniform weights and zero
    /// biases.
    pub fn new(n_inputs: usize, hidden: Activation, seed: u64) -> Self {
        assert!(n_inputs > 0, "network needs at least one input");
        let mut rng = seeded(derive_seed(seed, 0x1417));
        let sizes = [n_inputs, HIDDEN_UNITS, HIDDEN_UNITS, 1];
        let layers = sizes
            .windows(2)
            .map(|w| Layer::xavier(w[0], w[1], &mut rng))
            .collect();
        Self { layers, hidden }
    }

    /// Network from explicit parameters; layer widths must chain and end in
    /// a single output.
    pub fn from_layers(layers: Vec<Layer>, hidden: Activation) -> Result<Self> {
        let last = layers.last().ok_or_else(|| Error::invalid("network needs a layer"))?;
        if last.outputs != 1 {
            return Err(Error::invalid("output layer must have exactly one unit"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.inputs == 0 || l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::invalid(format!("layer {i} has inconsistent shapes")));
            }
            if i > 0 && layers[i - 1].outputs != l.inputs {
                return Err(Error::invalid(format!("layer {i} input width does not chain")));
            }
        }
        Ok(Self { layers, hidden })
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs)
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].inputs
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                found,
            });
        }
        Ok(())
    }

    fn logit_unchecked(&self, x: &[f64]) -> f64 {
        let mut current = x.to_vec();
        let mut next = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            next.resize(layer.outputs, 0.0);
            layer.forward_into(&current, &mut next);
            if i + 1 < self.layers.len() {
                next.iter_mut().for_each(|z| *z = self.hidden.apply(*z));
            }
            std::mem::swap(&mut current, &mut next);
        }
        current[0]
    }

    /// Output logit (pre-sigmoid).
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.logit_unchecked(x))
    }

    /// Probability of class tag 1, strictly inside (0, 1).
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?).clamp(PROB_MARGIN, 1.0 - PROB_MARGIN))
    }

    pub fn predict_all(&self, samples: &Matrix) -> Result<Vec<f64>> {
        self.check_dim(samples.cols())?;
        Ok(samples
            .iter_rows()
            .map(|r| sigmoid(self.logit_unchecked(r)).clamp(PROB_MARGIN, 1.0 - PROB_MARGIN))
            .collect())
    }

    pub fn n_parameters(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Flattened parameters, layer by layer: weights then biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_parameters());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_parameters() {
            return Err(Error::DimensionMismatch {
                expected: self.n_parameters(),
                found: params.len(),
            });
        }
        let mut off = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[off..off + nw]);
            off += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&params[off..off + nb]);
            off += nb;
        }
        Ok(())
    }

    /// Mean binary cross-entropy over `samples` against 0/1 `targets`.
    pub fn loss(&self, samples: &Matrix, targets: &[f64]) -> Result<f64> {
        self.check_dim(samples.cols())?;
        if samples.rows() != targets.len() || targets.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: samples.rows(),
                found: targets.len(),
            });
        }
        let total: f64 = samples
            .iter_rows()
            .zip(targets)
            .map(|(x, &y)| bce_with_logit(self.logit_unchecked(x), y))
            .sum();
        Ok(total / targets.len() as f64)
    }

    /// Mean loss and its gradient with respect to [`parameters`](Self::parameters).
    pub fn loss_and_gradient(&self, samples: &Matrix, targets: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(samples.cols())?;
        if samples.rows() != targets.len() || targets.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: samples.rows(),
                found: targets.len(),
            });
        }
        let rows: Vec<usize> = (0..samples.rows()).collect();
        let mut scratch = Scratch::new(self);
        let mut grad = vec![0.0; self.n_parameters()];
        let loss = self.accumulate(samples, targets, &rows, &mut scratch, &mut grad);
        let k = rows.len() as f64;
        grad.iter_mut().for_each(|g| *g /= k);
        Ok((loss / k, grad))
    }

    /// Adds the summed gradient over `rows` into `grad`; returns summed loss.
    fn accumulate(
        &self,
        samples: &Matrix,
        targets: &[f64],
        rows: &[usize],
        s: &mut Scratch,
        grad: &mut [f64],
    ) -> f64 {
        let depth = self.layers.len();
        let mut loss = 0.0;
        for &r in rows {
            let x = samples.row(r);
            s.act[0].clear();
            s.act[0].extend_from_slice(x);
            for (li, layer) in self.layers.iter().enumerate() {
                let (before, after) = s.act.split_at_mut(li + 1);
                layer.forward_into(&before[li], &mut s.pre[li]);
                let out = &mut after[0];
                out.clear();
                if li + 1 < depth {
                    out.extend(s.pre[li].iter().map(|&z| self.hidden.apply(z)));
                } else {
                    out.extend_from_slice(&s.pre[li]);
                }
            }
            let z = s.pre[depth - 1][0];
            let y = targets[r];
            loss += bce_with_logit(z, y);

            s.delta[depth - 1].clear();
            s.delta[depth - 1].push(sigmoid(z) - y);
            for li in (0..depth).rev() {
                let layer = &self.layers[li];
                let off = s.offsets[li];
                let input = &s.act[li];
                for o in 0..layer.outputs {
                    let d = s.delta[li][o];
                    if d == 0.0 {
                        continue;
                    }
                    let gw = &mut grad[off + o * layer.inputs..off + (o + 1) * layer.inputs];
                    for (g, a) in gw.iter_mut().zip(input) {
                        *g += d * a;
                    }
                    grad[off + layer.weights.len() + o] += d;
                }
                if li > 0 {
                    let (lower, upper) = s.delta.split_at_mut(li);
                    let below = &mut lower[li - 1];
                    below.clear();
                    below.resize(layer.inputs, 0.0);
                    for (o, &d) in upper[0][..layer.outputs].iter().enumerate() {
                        let w = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                        for (b, wi) in below.iter_mut().zip(w) {
                            *b += d * wi;
                        }
                    }
                    for (j, b) in below.iter_mut().enumerate() {
                        *b *= self.hidden.derivative(s.pre[li - 1][j], s.act[li][j]);
                    }
                }
            }
        }
        loss
    }

    fn step(&mut self, grad: &[f64], scale: f64) {
        let mut off = 0;
        for l in &mut self.layers {
            for w in l.weights.iter_mut() {
                *w -= scale * grad[off];
                off += 1;
            }
            for b in l.biases.iter_mut() {
                *b -= scale * grad[off];
                off += 1;
            }
        }
    }
}

/// Per-layer buffers reused across samples during backpropagation.
struct Scratch {
    act: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
    offsets: Vec<usize>,
}

impl Scratch {
    fn new(model: &MlpModel) -> Self {
        let depth = model.layers.len();
        let mut offsets = Vec::with_capacity(depth);
        let mut off = 0;
        for l in &model.layers {
            offsets.push(off);
            off += l.weights.len() + l.biases.len();
        }
        Self {
            act: vec![Vec::new(); depth + 1],
            pre: model.layers.iter().map(|l| vec![0.0; l.outputs]).collect(),
            delta: model.layers.iter().map(|l| Vec::with_capacity(l.outputs)).collect(),
            offsets,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub hidden: Activation,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 10,
            learning_rate: 0.01,
            hidden: Activation::Relu,
            seed: 0,
        }
    }
}

/// Per-epoch losses. Both curves are the mean cross-entropy over the whole
/// respective set, measured after the epoch's last update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
}

/// 0/1 targets for "tag == 1".
pub fn targets(d: &Dataset) -> Vec<f64> {
    d.labels().iter().map(|&t| f64::from(t)).collect()
}

/// Trains a fresh network to predict the probability of class tag 1.
pub fn mlp_train(train: &Dataset, validation: &Dataset, config: &MlpConfig) -> Result<(MlpModel, TrainingTrace)> {
    if config.epochs == 0 {
        return Err(Error::Config("no training performed: epochs is 0".into()));
    }
    if config.batch_size == 0 {
        return Err(Error::Config("batch_size must be positive".into()));
    }
    if !(config.learning_rate.is_finite() && config.learning_rate >= 0.0) {
        return Err(Error::Config("learning_rate must be finite and non-negative".into()));
    }
    if validation.n_features() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            found: validation.n_features(),
        });
    }
    if train.count_of(0) == 0 || train.count_of(1) == 0 {
        return Err(Error::SingleClass);
    }
    let ys = targets(train);
    let val_ys = targets(validation);
    let mut model = MlpModel::new(train.n_features(), config.hidden, config.seed);
    let mut rng = seeded(derive_seed(config.seed, 0xE90C));
    let mut order: Vec<usize> = (0..train.n_samples()).collect();
    let mut scratch = Scratch::new(&model);
    let mut grad = vec![0.0; model.n_parameters()];
    let mut trace = TrainingTrace {
        train_loss: Vec::with_capacity(config.epochs),
        validation_loss: Vec::with_capacity(config.epochs),
    };
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            model.accumulate(train.samples(), &ys, batch, &mut scratch, &mut grad);
            model.step(&grad, config.learning_rate / batch.len() as f64);
        }
        let tl = model.loss(train.samples(), &ys)?;
        let vl = model.loss(validation.samples(), &val_ys)?;
        if !tl.is_finite() || !vl.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        trace.train_loss.push(tl);
        trace.validation_loss.push(vl);
    }
    Ok((model, trace))
}

/// Scores of `d` as probabilities of `positive`, with matching truth flags.
pub fn score_dataset(model: &MlpModel, d: &Dataset, positive: Tag) -> Result<(Vec<f64>, Vec<bool>)> {
    let p1 = model.predict_all(d.samples())?;
    let probs = if positive == 1 {
        p1
    } else {
        p1.into_iter().map(|p| 1.0 - p).collect()
    };
    let truth = d.labels().iter().map(|&t| t == positive).collect();
    Ok((probs, truth))
}
