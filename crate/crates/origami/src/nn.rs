//! A small feedforward regressor with hand-derived backpropagation.
//!
//! Hidden layers use the sigmoid-weighted ramp `x * sigmoid(x)` — smooth,
//! zero-centered at the origin, linear for large inputs — with He-scaled
//! uniform initialization; the output layer is linear with Glorot scaling.
//! Weights are stored flat and row-major per layer, gradients mirror the
//! weight shapes, and all arithmetic is plain `f64`, so training is
//! bit-reproducible for a fixed seed and data order.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, Rng};

fn ramp(x: f64) -> f64 {
    x * sigmoid(x)
}

fn ramp_derivative(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 + x * (1.0 - s))
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Weights of one dense layer: `output_size x input_size`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub input_size: usize,
    pub output_size: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn uniform(input_size: usize, output_size: usize, scale: f64, rng: &mut Rng) -> Self {
        let weights = (0..input_size * output_size)
            .map(|_| rng.random_range(-scale..scale))
            .collect();
        Self {
            input_size,
            output_size,
            weights,
            biases: vec![0.0; output_size],
        }
    }

    fn glorot(input_size: usize, output_size: usize, rng: &mut Rng) -> Self {
        let scale = (6.0 / (input_size + output_size) as f64).sqrt();
        Self::uniform(input_size, output_size, scale, rng)
    }

    fn he(input_size: usize, output_size: usize, rng: &mut Rng) -> Self {
        let scale = (6.0 / input_size as f64).sqrt();
        Self::uniform(input_size, output_size, scale, rng)
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.output_size {
            let row = &self.weights[o * self.input_size..(o + 1) * self.input_size];
            let z: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum();
            out.push(z + self.biases[o]);
        }
    }
}

/// Multi-layer perceptron: smooth-ramp hidden layers, linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Per-example forward cache: pre-activations and activations per layer.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pre: Vec<Vec<f64>>,
    act: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.act.last().expect("at least one layer")
    }
}

/// Parameter gradients, shaped like the network.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            weights: mlp.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: mlp.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for g in self.weights.iter_mut().flatten() {
            *g *= factor;
        }
        for g in self.biases.iter_mut().flatten() {
            *g *= factor;
        }
    }

    /// Euclidean norm over all parameter gradients.
    pub fn global_norm(&self) -> f64 {
        let sum: f64 = self
            .weights
            .iter()
            .flatten()
            .chain(self.biases.iter().flatten())
            .map(|g| g * g)
            .sum();
        sum.sqrt()
    }
}

impl Mlp {
    /// Build with Glorot-uniform weights and zero biases.
    ///
    /// `layer_sizes` runs input first, output last; at least one layer.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::InvalidArgument(
                "network needs an input and an output size".into(),
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::InvalidArgument("zero-width layer".into()));
        }
        let mut rng = rng_from_seed(seed);
        let last = layer_sizes.len() - 2;
        let layers = layer_sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                if k == last {
                    Layer::glorot(w[0], w[1], &mut rng)
                } else {
                    Layer::he(w[0], w[1], &mut rng)
                }
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("no layers".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].output_size != pair[1].input_size {
                return Err(Error::ShapeMismatch(format!(
                    "layer output {} feeds layer input {}",
                    pair[0].output_size, pair[1].input_size
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Mutable access for parameter perturbation (finite-difference checks).
    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].input_size
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().expect("nonempty").output_size
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.input_size()];
        sizes.extend(self.layers.iter().map(|l| l.output_size));
        sizes
    }

    /// Plain forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut current = input.to_vec();
        let mut z = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            layer.affine(&current, &mut z);
            current.clear();
            if k == last {
                current.extend_from_slice(&z);
            } else {
                current.extend(z.iter().map(|&v| ramp(v)));
            }
        }
        Ok(current)
    }

    /// Forward pass retaining everything backward needs.
    pub fn forward_cached(&self, input: &[f64]) -> Result<ForwardCache> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut act = Vec::with_capacity(self.layers.len());
        let mut current = input.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.affine(&current, &mut z);
            current = if k == last {
                z.clone()
            } else {
                z.iter().map(|&v| ramp(v)).collect()
            };
            pre.push(z);
            act.push(current.clone());
        }
        Ok(ForwardCache { pre, act })
    }

    /// Accumulate parameter gradients for one example given the gradient of
    /// the loss with respect to the network output.
    pub fn backward(
        &self,
        input: &[f64],
        cache: &ForwardCache,
        output_grad: &[f64],
        grads: &mut Gradients,
    ) -> Result<()> {
        if output_grad.len() != self.output_size() {
            return Err(Error::ShapeMismatch(format!(
                "output gradient of {} for output size {}",
                output_grad.len(),
                self.output_size()
            )));
        }
        let mut delta = output_grad.to_vec();
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let below: &[f64] = if k == 0 { input } else { &cache.act[k - 1] };
            let gw = &mut grads.weights[k];
            for (o, &d) in delta.iter().enumerate() {
                grads.biases[k][o] += d;
                let row = &mut gw[o * layer.input_size..(o + 1) * layer.input_size];
                for (g, &x) in row.iter_mut().zip(below) {
                    *g += d * x;
                }
            }
            if k > 0 {
                let mut next = vec![0.0; layer.input_size];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.input_size..(o + 1) * layer.input_size];
                    for (n, &w) in next.iter_mut().zip(row) {
                        *n += d * w;
                    }
                }
                for (n, &z) in next.iter_mut().zip(&cache.pre[k - 1]) {
                    *n *= ramp_derivative(z);
                }
                delta = next;
            }
        }
        Ok(())
    }

    /// One SGD-with-momentum step: `v = momentum * v - lr * g; w += v`.
    pub fn apply_gradients(
        &mut self,
        grads: &Gradients,
        velocity: &mut Gradients,
        learning_rate: f64,
        momentum: f64,
    ) {
        for (k, layer) in self.layers.iter_mut().enumerate() {
            for ((w, v), &g) in layer
                .weights
                .iter_mut()
                .zip(velocity.weights[k].iter_mut())
                .zip(&grads.weights[k])
            {
                *v = momentum * *v - learning_rate * g;
                *w += *v;
            }
            for ((b, v), &g) in layer
                .biases
                .iter_mut()
                .zip(velocity.biases[k].iter_mut())
                .zip(&grads.biases[k])
            {
                *v = momentum * *v - learning_rate * g;
                *b += *v;
            }
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_size() {
            return Err(Error::ShapeMismatch(format!(
                "input of {} for input size {}",
                input.len(),
                self.input_size()
            )));
        }
        Ok(())
    }
}
