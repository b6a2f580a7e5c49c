use crate::PpoError;
use grove_nn::io::{read_f32_block, read_u32, read_u64, write_f32_block, write_u32, write_u64};
use grove_nn::{Activation, Mlp};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;
pub const LOG_STD_INIT: f64 = -0.5;

const MAGIC: &[u8; 4] = b"GRVP";
const VERSION: u32 = 1;

const LN_2PI: f64 = 1.8378770664093453;

/// Policy-network widths per environment.
pub fn hidden_dims(env_name: &str) -> &'static [usize] {
    match env_name {
        "stick_humanoid" => &[400, 200, 100],
        _ => &[256, 128, 64],
    }
}

/// Diagonal-Gaussian policy with a state-independent log-std vector, plus a
/// separate value network with the same trunk widths.
#[derive(Clone, Debug)]
pub struct PolicyModel {
    pub obs_dim: usize,
    pub action_dim: usize,
    pub mean: Mlp,
    pub log_std: Vec<f64>,
    pub value: Mlp,
}

fn net_dims(obs_dim: usize, hidden: &[usize], out: usize) -> Vec<usize> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(obs_dim);
    dims.extend_from_slice(hidden);
    dims.push(out);
    dims
}

impl PolicyModel {
    pub fn init(obs_dim: usize, action_dim: usize, hidden: &[usize], seed: u64) -> PolicyModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mean = Mlp::init(&net_dims(obs_dim, hidden, action_dim), Activation::Elu, &mut rng);
        let value = Mlp::init(&net_dims(obs_dim, hidden, 1), Activation::Elu, &mut rng);
        PolicyModel {
            obs_dim,
            action_dim,
            mean,
            log_std: vec![LOG_STD_INIT; action_dim],
            value,
        }
    }

    pub fn for_env(spec: &grove_env::EnvSpec, seed: u64) -> PolicyModel {
        PolicyModel::init(spec.obs_dim(), spec.action_dim, hidden_dims(spec.name), seed)
    }

    pub fn std(&self) -> Vec<f64> {
        self.log_std.iter().map(|s| s.exp()).collect()
    }

    pub fn clamp_log_std(&mut self) {
        for s in &mut self.log_std {
            *s = s.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    /// Mean-head parameters followed by the log-std vector; the layout the
    /// policy optimizer steps over.
    pub fn policy_params_flat(&self) -> Vec<f64> {
        let mut out = self.mean.params_flat();
        out.extend_from_slice(&self.log_std);
        out
    }

    pub fn set_policy_params_flat(&mut self, flat: &[f64]) {
        let n_mean = self.mean.param_count();
        assert_eq!(flat.len(), n_mean + self.action_dim);
        self.mean.set_params_flat(&flat[..n_mean]);
        self.log_std.copy_from_slice(&flat[n_mean..]);
        self.clamp_log_std();
    }

    /// Log-density of each row of `actions` under the Gaussian centered on
    /// the matching row of `means`.
    pub fn log_prob_rows(&self, means: &Array2<f64>, actions: &Array2<f64>) -> Vec<f64> {
        let n = means.nrows();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut logp = -0.5 * self.action_dim as f64 * LN_2PI;
            for d in 0..self.action_dim {
                let s = self.log_std[d];
                let z = (actions[(i, d)] - means[(i, d)]) / s.exp();
                logp -= 0.5 * z * z + s;
            }
            out.push(logp);
        }
        out
    }

    /// Per-sample differential entropy of the diagonal Gaussian.
    pub fn entropy(&self) -> f64 {
        self.log_std
            .iter()
            .map(|s| s + 0.5 * (LN_2PI + 1.0))
            .sum()
    }

    /// One action sampled around each mean row; draw order is row-major so a
    /// fixed seed reproduces rollouts exactly.
    pub fn sample_actions(&self, means: &Array2<f64>, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let std = self.std();
        let mut actions = means.clone();
        for mut row in actions.rows_mut() {
            for d in 0..self.action_dim {
                let z: f64 = rng.sample(StandardNormal);
                row[d] += std[d] * z;
            }
        }
        actions
    }

    pub fn save(&self, path: &Path) -> Result<(), PpoError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(MAGIC)?;
        write_u32(&mut out, VERSION)?;
        write_u64(&mut out, self.obs_dim as u64)?;
        write_u64(&mut out, self.action_dim as u64)?;
        write_u32(&mut out, self.mean.dims.len() as u32)?;
        for d in &self.mean.dims {
            write_u64(&mut out, *d as u64)?;
        }
        for l in 0..self.mean.num_layers() {
            write_f32_block(&mut out, self.mean.weights[l].as_slice().unwrap())?;
            write_f32_block(&mut out, self.mean.biases[l].as_slice().unwrap())?;
        }
        write_f32_block(&mut out, &self.log_std)?;
        for l in 0..self.value.num_layers() {
            write_f32_block(&mut out, self.value.weights[l].as_slice().unwrap())?;
            write_f32_block(&mut out, self.value.biases[l].as_slice().unwrap())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PolicyModel, PpoError> {
        let mut input = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(PpoError::BadCheckpoint("wrong magic".to_string()));
        }
        let version = read_u32(&mut input)?;
        if version != VERSION {
            return Err(PpoError::BadCheckpoint(format!(
                "unsupported version {version}"
            )));
        }
        let obs_dim = read_u64(&mut input)? as usize;
        let action_dim = read_u64(&mut input)? as usize;
        let n_dims = read_u32(&mut input)? as usize;
        if n_dims < 2 {
            return Err(PpoError::BadCheckpoint("too few layers".to_string()));
        }
        let mut dims = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            dims.push(read_u64(&mut input)? as usize);
        }
        if dims[0] != obs_dim || *dims.last().unwrap() != action_dim {
            return Err(PpoError::BadCheckpoint(
                "network dims disagree with header".to_string(),
            ));
        }
        let mut mean = Mlp::zeros(&dims, Activation::Elu);
        read_mlp(&mut input, &mut mean)?;
        let log_std = read_f32_block(&mut input, action_dim)?;
        if log_std.iter().any(|s| !s.is_finite()) {
            return Err(PpoError::BadCheckpoint("non-finite log-std".to_string()));
        }
        let mut value_dims = dims.clone();
        *value_dims.last_mut().unwrap() = 1;
        let mut value = Mlp::zeros(&value_dims, Activation::Elu);
        read_mlp(&mut input, &mut value)?;
        let mut model = PolicyModel {
            obs_dim,
            action_dim,
            mean,
            log_std,
            value,
        };
        model.clamp_log_std();
        Ok(model)
    }
}

fn read_mlp(input: &mut impl Read, net: &mut Mlp) -> Result<(), PpoError> {
    for l in 0..net.num_layers() {
        let (rows, cols) = net.weights[l].dim();
        let w = read_f32_block(input, rows * cols)?;
        net.weights[l] = Array2::from_shape_vec((rows, cols), w)
            .map_err(|e| PpoError::BadCheckpoint(e.to_string()))?;
        let b = read_f32_block(input, cols)?;
        net.biases[l] = ndarray::Array1::from_vec(b);
    }
    Ok(())
}
