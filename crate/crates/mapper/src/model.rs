use crate::{MapperError, PoseEmbedder};
use grove_env::PoseVector;
use grove_nn::io::{read_f32_block, read_u32, read_u64, write_f32_block, write_u32, write_u64};
use grove_nn::{Activation, Mlp};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

const HIDDEN: [usize; 2] = [256, 1024];
const CKPT_MAGIC: &[u8; 4] = b"GRVM";
const CKPT_VERSION: u32 = 1;

/// The pose-to-embedding surrogate network: 3J -> 256 -> 1024 -> D with GELU
/// on the hidden layers.
#[derive(Clone)]
pub struct MapperModel {
    pub num_joints: usize,
    pub dims: usize,
    /// Seed of the oracle this model was trained against, carried so reward
    /// computation can rebuild the matching target space.
    pub oracle_seed: u64,
    pub net: Mlp,
}

pub fn mapper_dims(num_joints: usize, dims: usize) -> Vec<usize> {
    vec![3 * num_joints, HIDDEN[0], HIDDEN[1], dims]
}

impl MapperModel {
    pub fn init(num_joints: usize, dims: usize, oracle_seed: u64, seed: u64) -> MapperModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MapperModel {
            num_joints,
            dims,
            oracle_seed,
            net: Mlp::init(&mapper_dims(num_joints, dims), Activation::Gelu, &mut rng),
        }
    }

    pub fn param_count(&self) -> usize {
        self.net.param_count()
    }

    pub fn forward_batch(&self, x: &Array2<f64>) -> Array2<f64> {
        self.net.forward(x)
    }

    pub fn forward(&self, pose: &PoseVector) -> Result<Vec<f64>, MapperError> {
        if pose.num_joints() != self.num_joints {
            return Err(MapperError::DimMismatch {
                expected: self.num_joints,
                got: pose.num_joints(),
            });
        }
        let x = Array2::from_shape_vec((1, 3 * self.num_joints), pose.flat())
            .expect("flat pose length is 3J");
        Ok(self.net.forward(&x).row(0).to_vec())
    }

    pub fn save(&self, path: &Path) -> Result<(), MapperError> {
        let mut w = BufWriter::new(File::create(path)?);
        std::io::Write::write_all(&mut w, CKPT_MAGIC)?;
        write_u32(&mut w, CKPT_VERSION)?;
        write_u64(&mut w, self.num_joints as u64)?;
        write_u64(&mut w, self.dims as u64)?;
        write_u64(&mut w, self.oracle_seed)?;
        write_u32(&mut w, self.net.dims.len() as u32)?;
        for &d in &self.net.dims {
            write_u64(&mut w, d as u64)?;
        }
        for l in 0..self.net.num_layers() {
            let weight = &self.net.weights[l];
            let flat: Vec<f64> = weight.iter().copied().collect();
            write_f32_block(&mut w, &flat)?;
            write_f32_block(&mut w, self.net.biases[l].as_slice().unwrap())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<MapperModel, MapperError> {
        let mut r = BufReader::new(File::open(path)?);
        let bad = |m: &str| MapperError::BadCheckpoint(m.to_string());
        let mut magic = [0u8; 4];
        std::io::Read::read_exact(&mut r, &mut magic)?;
        if &magic != CKPT_MAGIC {
            return Err(bad("missing GRVM magic"));
        }
        let version = read_u32(&mut r)?;
        if version != CKPT_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let num_joints = read_u64(&mut r)? as usize;
        let dims = read_u64(&mut r)? as usize;
        let oracle_seed = read_u64(&mut r)?;
        let n_dims = read_u32(&mut r)? as usize;
        let mut layer_dims = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            layer_dims.push(read_u64(&mut r)? as usize);
        }
        if layer_dims != mapper_dims(num_joints, dims) {
            return Err(bad("layer dims do not match the mapper architecture"));
        }
        let mut net = Mlp::zeros(&layer_dims, Activation::Gelu);
        for l in 0..net.num_layers() {
            let (rows, cols) = (layer_dims[l], layer_dims[l + 1]);
            let flat = read_f32_block(&mut r, rows * cols)?;
            net.weights[l] = Array2::from_shape_vec((rows, cols), flat).unwrap();
            let bias = read_f32_block(&mut r, cols)?;
            net.biases[l] = ndarray::Array1::from_vec(bias);
        }
        Ok(MapperModel {
            num_joints,
            dims,
            oracle_seed,
            net,
        })
    }
}

impl PoseEmbedder for MapperModel {
    fn embed_pose(&self, pose: &PoseVector) -> Result<Vec<f64>, MapperError> {
        self.forward(pose)
    }

    fn dims(&self) -> usize {
        self.dims
    }
}
