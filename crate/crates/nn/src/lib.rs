//! Small dense-network toolkit shared by the pose mapper and the PPO nets:
//! an MLP with hand-written backprop, Adam, and the warmup+cosine schedule.
//! All math is f64; batches are ndarray matrices (rows = samples).

pub mod io;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Gelu,
    Elu,
    Identity,
}

/// Exact-erf GELU: x * Phi(x).
pub fn gelu(x: f64) -> f64 {
    x * 0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

pub fn gelu_prime(x: f64) -> f64 {
    let phi_big = 0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2));
    let phi_small = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    phi_big + x * phi_small
}

pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

pub fn elu_prime(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        x.exp()
    }
}

impl Activation {
    fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Gelu => gelu(x),
            Activation::Elu => elu(x),
            Activation::Identity => x,
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Activation::Gelu => gelu_prime(x),
            Activation::Elu => elu_prime(x),
            Activation::Identity => 1.0,
        }
    }
}

/// Fully connected network: affine layers with `activation` between them and
/// an identity output layer. Weights are stored (in, out) so a batch forward
/// is one gemm per layer.
#[derive(Clone, Debug)]
pub struct Mlp {
    pub dims: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Per-layer pre-activations and inputs saved by `forward_cached`.
pub struct Cache {
    inputs: Vec<Array2<f64>>,
    pre_acts: Vec<Array2<f64>>,
}

#[derive(Clone, Debug)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    /// Gradient with respect to the network input.
    pub input: Array2<f64>,
}

impl Mlp {
    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init for weights and biases.
    pub fn init(dims: &[usize], activation: Activation, rng: &mut ChaCha8Rng) -> Mlp {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..dims.len() - 1 {
            let bound = 1.0 / (dims[l] as f64).sqrt();
            let w = Array2::from_shape_fn((dims[l], dims[l + 1]), |_| rng.gen_range(-bound..bound));
            let b = Array1::from_shape_fn(dims[l + 1], |_| rng.gen_range(-bound..bound));
            weights.push(w);
            biases.push(b);
        }
        Mlp {
            dims: dims.to_vec(),
            activation,
            weights,
            biases,
        }
    }

    pub fn zeros(dims: &[usize], activation: Activation) -> Mlp {
        let weights = (0..dims.len() - 1)
            .map(|l| Array2::zeros((dims[l], dims[l + 1])))
            .collect();
        let biases = (0..dims.len() - 1).map(|l| Array1::zeros(dims[l + 1])).collect();
        Mlp {
            dims: dims.to_vec(),
            activation,
            weights,
            biases,
        }
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn param_count(&self) -> usize {
        self.dims
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut h = x.clone();
        for l in 0..self.num_layers() {
            let mut z = h.dot(&self.weights[l]);
            z += &self.biases[l];
            h = if l + 1 < self.num_layers() {
                z.mapv(|v| self.activation.apply(v))
            } else {
                z
            };
        }
        h
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> (Array2<f64>, Cache) {
        let mut inputs = Vec::with_capacity(self.num_layers());
        let mut pre_acts = Vec::with_capacity(self.num_layers());
        let mut h = x.clone();
        for l in 0..self.num_layers() {
            inputs.push(h.clone());
            let mut z = h.dot(&self.weights[l]);
            z += &self.biases[l];
            pre_acts.push(z.clone());
            h = if l + 1 < self.num_layers() {
                z.mapv(|v| self.activation.apply(v))
            } else {
                z
            };
        }
        (h, Cache { inputs, pre_acts })
    }

    /// Backprop of `grad_out` = dL/d(output) through the cached forward pass.
    pub fn backward(&self, cache: &Cache, grad_out: &Array2<f64>) -> Gradients {
        let layers = self.num_layers();
        let mut dw = vec![Array2::zeros((0, 0)); layers];
        let mut db = vec![Array1::zeros(0); layers];
        let mut delta = grad_out.clone();
        for l in (0..layers).rev() {
            if l + 1 < layers {
                // chain through the activation applied after layer l
                delta = &delta * &cache.pre_acts[l].mapv(|v| self.activation.derivative(v));
            }
            dw[l] = cache.inputs[l].t().dot(&delta);
            db[l] = delta.sum_axis(Axis(0));
            delta = delta.dot(&self.weights[l].t());
        }
        Gradients {
            weights: dw,
            biases: db,
            input: delta,
        }
    }

    /// Parameters flattened layer by layer, each weight row-major then bias.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in 0..self.num_layers() {
            out.extend(self.weights[l].iter());
            out.extend(self.biases[l].iter());
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count());
        let mut at = 0;
        for l in 0..self.num_layers() {
            let (rows, cols) = self.weights[l].dim();
            self.weights[l] =
                Array2::from_shape_vec((rows, cols), flat[at..at + rows * cols].to_vec()).unwrap();
            at += rows * cols;
            self.biases[l] = Array1::from_vec(flat[at..at + cols].to_vec());
            at += cols;
        }
    }
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in 0..self.weights.len() {
            out.extend(self.weights[l].iter());
            out.extend(self.biases[l].iter());
        }
        out
    }
}

/// Adam over a flat parameter vector.
#[derive(Clone, Debug)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(len: usize) -> Adam {
        Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Linear warmup to `base_lr` over `warmup_steps`, then cosine decay to zero
/// at `total_steps`. Step 0 of a nonzero warmup yields lr = 0.
pub fn warmup_cosine_lr(base_lr: f64, total_steps: usize, warmup_steps: usize, step: usize) -> f64 {
    if warmup_steps > 0 && step < warmup_steps {
        return base_lr * step as f64 / warmup_steps as f64;
    }
    if total_steps <= warmup_steps {
        return base_lr;
    }
    let t = (step - warmup_steps) as f64 / (total_steps - warmup_steps) as f64;
    base_lr * 0.5 * (1.0 + (std::f64::consts::PI * t.min(1.0)).cos())
}
