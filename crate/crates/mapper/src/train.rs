use crate::{MapperError, MapperModel, SyntheticOracle};
use grove_data::{balanced_sample_from_members, ClusterIndex, PoseDataset};
use grove_nn::{warmup_cosine_lr, Activation, Adam, Gradients, Mlp};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub warmup_fraction: f64,
    pub seed: u64,
    /// Stop as soon as validation mean cosine reaches this value.
    pub target_val_cosine: Option<f64>,
}

impl TrainConfig {
    pub fn new(epochs: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: 1e-4,
            batch_size: 512,
            epochs,
            warmup_fraction: 0.10,
            seed,
            target_val_cosine: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// MSE over the whole training split, evaluated at epoch end (not the
    /// running minibatch average, which carries sampling noise).
    pub train_mse: f64,
    pub val_cosine: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct TrainMetrics {
    pub epochs: Vec<EpochMetrics>,
    pub total_steps: usize,
    pub stopped_early: bool,
    /// Cluster ids held out for validation.
    pub val_clusters: Vec<usize>,
}

/// Mean over batch and dimensions of squared error.
pub fn mse_loss(pred: &Array2<f64>, target: &Array2<f64>) -> Result<f64, MapperError> {
    if pred.dim() != target.dim() {
        return Err(MapperError::ShapeMismatch {
            left: pred.dim(),
            right: target.dim(),
        });
    }
    let n = (pred.nrows() * pred.ncols()) as f64;
    Ok((pred - target).mapv(|d| d * d).sum() / n)
}

/// Loss and exact parameter gradients for one batch.
pub fn loss_gradients(
    net: &Mlp,
    x: &Array2<f64>,
    target: &Array2<f64>,
) -> Result<(f64, Gradients), MapperError> {
    let (pred, cache) = net.forward_cached(x);
    let loss = mse_loss(&pred, target)?;
    let n = (pred.nrows() * pred.ncols()) as f64;
    let grad_out = (&pred - target) * (2.0 / n);
    Ok((loss, net.backward(&cache, &grad_out)))
}

fn cosine_to_unit_target(pred: &[f64], target: &[f64]) -> f64 {
    let dot: f64 = pred.iter().zip(target).map(|(a, b)| a * b).sum();
    let norm: f64 = pred.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    dot / norm
}

fn batch_matrix(dataset: &PoseDataset, indices: &[usize]) -> Array2<f64> {
    let dims = 3 * dataset.num_joints;
    let mut x = Array2::zeros((indices.len(), dims));
    for (row, &i) in indices.iter().enumerate() {
        for (col, v) in dataset.poses[i].flat().into_iter().enumerate() {
            x[[row, col]] = v;
        }
    }
    x
}

fn target_matrix(targets: &[Vec<f64>], indices: &[usize], dims: usize) -> Array2<f64> {
    let mut y = Array2::zeros((indices.len(), dims));
    for (row, &i) in indices.iter().enumerate() {
        for (col, v) in targets[i].iter().enumerate() {
            y[[row, col]] = *v;
        }
    }
    y
}

/// Chunked full-split MSE so epoch metrics never materialize a huge batch.
fn eval_mse(
    net: &Mlp,
    dataset: &PoseDataset,
    targets: &[Vec<f64>],
    indices: &[usize],
    dims: usize,
) -> f64 {
    let mut total = 0.0;
    for chunk in indices.chunks(2048) {
        let x = batch_matrix(dataset, chunk);
        let y = target_matrix(targets, chunk, dims);
        let pred = net.forward(&x);
        total += (&pred - &y).mapv(|d| d * d).sum();
    }
    total / (indices.len() * dims) as f64
}

/// Trains the mapper against the synthetic oracle with Adam and a
/// warmup-then-cosine learning-rate schedule. Validation holds out 10% of
/// clusters whole, so the reported cosine measures generalization to unseen
/// pose modes.
pub fn train_mapper(
    dataset: &PoseDataset,
    clusters: &ClusterIndex,
    oracle: &SyntheticOracle,
    config: &TrainConfig,
) -> Result<(MapperModel, TrainMetrics), MapperError> {
    assert!(config.learning_rate > 0.0, "learning rate must be positive");
    assert!(
        (0.0..1.0).contains(&config.warmup_fraction),
        "warmup fraction must be in [0, 1)"
    );
    assert!(config.batch_size > 0, "batch size must be positive");
    if dataset.is_empty() {
        return Err(MapperError::EmptyDataset);
    }
    assert_eq!(
        clusters.assignment.len(),
        dataset.len(),
        "cluster index was built over a different dataset"
    );
    if oracle.num_joints != dataset.num_joints {
        return Err(MapperError::DimMismatch {
            expected: dataset.num_joints,
            got: oracle.num_joints,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Held-out validation: floor(0.1 k) whole clusters.
    let mut cluster_ids: Vec<usize> = (0..clusters.k).collect();
    cluster_ids.shuffle(&mut rng);
    let n_val = clusters.k / 10;
    let val_clusters: Vec<usize> = cluster_ids[..n_val].to_vec();
    let is_val = {
        let mut mask = vec![false; clusters.k];
        for &c in &val_clusters {
            mask[c] = true;
        }
        mask
    };

    let members = clusters.members();
    let train_members: Vec<Vec<usize>> = members
        .iter()
        .enumerate()
        .filter(|(c, m)| !is_val[*c] && !m.is_empty())
        .map(|(_, m)| m.clone())
        .collect();
    let val_indices: Vec<usize> = members
        .iter()
        .enumerate()
        .filter(|(c, _)| is_val[*c])
        .flat_map(|(_, m)| m.iter().copied())
        .collect();
    let train_indices: Vec<usize> = train_members.iter().flatten().copied().collect();
    let n_train = train_indices.len();
    if n_train == 0 {
        return Err(MapperError::EmptyDataset);
    }

    // Oracle targets, computed once.
    let mut targets: Vec<Vec<f64>> = Vec::with_capacity(dataset.len());
    for pose in &dataset.poses {
        targets.push(oracle.embed(pose)?);
    }
    let val_x = batch_matrix(dataset, &val_indices);
    let val_y: Vec<&Vec<f64>> = val_indices.iter().map(|&i| &targets[i]).collect();

    let mut model = MapperModel {
        num_joints: dataset.num_joints,
        dims: oracle.dims,
        oracle_seed: oracle.seed,
        net: Mlp::init(
            &crate::mapper_dims(dataset.num_joints, oracle.dims),
            Activation::Gelu,
            &mut rng,
        ),
    };

    let steps_per_epoch = n_train.div_ceil(config.batch_size);
    let total_steps = config.epochs * steps_per_epoch;
    let warmup_steps = (config.warmup_fraction * total_steps as f64).floor() as usize;

    let mut params = model.net.params_flat();
    let mut adam = Adam::new(params.len());
    let mut metrics = TrainMetrics::default();
    let mut step = 0usize;

    'epochs: for epoch in 0..config.epochs {
        for _ in 0..steps_per_epoch {
            let batch = balanced_sample_from_members(&train_members, config.batch_size, &mut rng);
            let x = batch_matrix(dataset, &batch);
            let y = target_matrix(&targets, &batch, oracle.dims);
            let (loss, grads) = loss_gradients(&model.net, &x, &y)?;
            if !loss.is_finite() {
                return Err(MapperError::Diverged { step });
            }
            let lr = warmup_cosine_lr(config.learning_rate, total_steps, warmup_steps, step);
            adam.step(&mut params, &grads.flat(), lr);
            model.net.set_params_flat(&params);
            step += 1;
        }
        let train_mse = eval_mse(&model.net, dataset, &targets, &train_indices, oracle.dims);

        let val_cosine = if val_indices.is_empty() {
            None
        } else {
            let pred = model.net.forward(&val_x);
            let mean = pred
                .rows()
                .into_iter()
                .zip(&val_y)
                .map(|(row, target)| {
                    cosine_to_unit_target(row.as_slice().unwrap(), target.as_slice())
                })
                .sum::<f64>()
                / val_indices.len() as f64;
            Some(mean)
        };

        metrics.epochs.push(EpochMetrics {
            epoch,
            train_mse,
            val_cosine,
        });

        if let (Some(target), Some(got)) = (config.target_val_cosine, val_cosine) {
            if got >= target {
                metrics.stopped_early = true;
                break 'epochs;
            }
        }
    }

    metrics.total_steps = step;
    metrics.val_clusters = val_clusters;
    Ok((model, metrics))
}
