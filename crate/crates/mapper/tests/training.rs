//! Trainer-level checks: exact gradients, memorization, determinism,
//! divergence reporting, and the desk-scale generalization target.

use grove_data::{kmeans_pp, synth_corpus, synth_corpus_with_joints};
use grove_mapper::{
    loss_gradients, mse_loss, train_mapper, SyntheticOracle, TrainConfig,
};
use grove_nn::{Activation, Mlp};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mse_hand_cases() {
    let a = Array2::from_shape_vec((2, 3), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    assert_eq!(mse_loss(&a, &a).unwrap(), 0.0);
    let b = a.mapv(|v| v + 1.0);
    assert_eq!(mse_loss(&b, &a).unwrap(), 1.0);
    let c = Array2::zeros((3, 2));
    assert!(mse_loss(&a, &c).is_err());
}

#[test]
fn loss_gradients_match_central_finite_differences() {
    let h = 1e-5;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Mlp::init(&[6, 8, 10, 4], Activation::Gelu, &mut rng);
        let x = Array2::from_shape_fn((5, 6), |_| rng.gen_range(-1.5..1.5));
        let y = Array2::from_shape_fn((5, 4), |_| rng.gen_range(-1.0..1.0));
        let (_, grads) = loss_gradients(&net, &x, &y).unwrap();
        let analytic = grads.flat();

        let mut flat = net.params_flat();
        let mut max_rel: f64 = 0.0;
        for i in 0..flat.len() {
            let orig = flat[i];
            flat[i] = orig + h;
            net.set_params_flat(&flat);
            let lp = mse_loss(&net.forward(&x), &y).unwrap();
            flat[i] = orig - h;
            net.set_params_flat(&flat);
            let lm = mse_loss(&net.forward(&x), &y).unwrap();
            flat[i] = orig;
            net.set_params_flat(&flat);
            let fd = (lp - lm) / (2.0 * h);
            let denom = fd.abs().max(analytic[i].abs()).max(1e-8);
            max_rel = max_rel.max((fd - analytic[i]).abs() / denom);
        }
        assert!(max_rel <= 1e-4, "seed {seed}: max relative error {max_rel}");
    }
}

#[test]
fn memorizes_a_tiny_dataset() {
    let dataset = synth_corpus_with_joints(15, 10, 2, 5);
    let clusters = kmeans_pp(&dataset, 2, 5, 100, 1e-6).unwrap();
    let oracle = SyntheticOracle::new(15, 16, 99);
    let mut config = TrainConfig::new(200, 1);
    config.batch_size = 64;
    config.learning_rate = 2e-3;
    let (_, metrics) = train_mapper(&dataset, &clusters, &oracle, &config).unwrap();

    let final_mse = metrics.epochs.last().unwrap().train_mse;
    assert!(final_mse < 1e-4, "final train MSE {final_mse}");
    // k = 2 clusters means no held-out split.
    assert!(metrics.epochs.iter().all(|e| e.val_cosine.is_none()));
}

#[test]
fn loss_trend_is_non_increasing_under_moving_average() {
    let dataset = synth_corpus_with_joints(15, 2000, 50, 7);
    let clusters = kmeans_pp(&dataset, 50, 7, 100, 1e-6).unwrap();
    let oracle = SyntheticOracle::new(15, 32, 12);
    let config = TrainConfig::new(30, 1);
    let (_, metrics) = train_mapper(&dataset, &clusters, &oracle, &config).unwrap();

    let losses: Vec<f64> = metrics.epochs.iter().map(|e| e.train_mse).collect();
    let avg: Vec<f64> = losses
        .windows(10)
        .map(|w| w.iter().sum::<f64>() / 10.0)
        .collect();
    let violations = avg.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(violations <= 2, "{violations} moving-average increases");
}

#[test]
fn training_is_deterministic() {
    let dataset = synth_corpus_with_joints(15, 60, 4, 8);
    let clusters = kmeans_pp(&dataset, 4, 8, 100, 1e-6).unwrap();
    let oracle = SyntheticOracle::new(15, 8, 3);
    let mut config = TrainConfig::new(5, 17);
    config.batch_size = 32;
    let (m1, k1) = train_mapper(&dataset, &clusters, &oracle, &config).unwrap();
    let (m2, k2) = train_mapper(&dataset, &clusters, &oracle, &config).unwrap();
    assert_eq!(m1.net.params_flat(), m2.net.params_flat());
    assert_eq!(k1.total_steps, k2.total_steps);
    for (a, b) in k1.epochs.iter().zip(&k2.epochs) {
        assert_eq!(a.train_mse, b.train_mse);
        assert_eq!(a.val_cosine, b.val_cosine);
    }
}

#[test]
fn divergence_aborts_with_step_index() {
    let dataset = synth_corpus_with_joints(15, 40, 2, 8);
    let clusters = kmeans_pp(&dataset, 2, 8, 100, 1e-6).unwrap();
    let oracle = SyntheticOracle::new(15, 8, 3);
    let mut config = TrainConfig::new(10, 17);
    config.batch_size = 16;
    config.learning_rate = 1e300;
    config.warmup_fraction = 0.0;
    match train_mapper(&dataset, &clusters, &oracle, &config) {
        Err(grove_mapper::MapperError::Diverged { step }) => {
            assert!(step >= 1, "first step starts from finite params");
        }
        Err(other) => panic!("unexpected error {other}"),
        Ok(_) => panic!("training should have diverged"),
    }
}

#[test]
fn desk_scale_run_generalizes_to_held_out_clusters() {
    let dataset = synth_corpus(10_000, 200, 31);
    let clusters = kmeans_pp(&dataset, 200, 31, 100, 1e-6).unwrap();
    let oracle = SyntheticOracle::new(15, 64, 12);
    let mut config = TrainConfig::new(50, 4);
    config.target_val_cosine = Some(0.85);
    let (model, metrics) = train_mapper(&dataset, &clusters, &oracle, &config).unwrap();

    let best = metrics
        .epochs
        .iter()
        .filter_map(|e| e.val_cosine)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(best >= 0.85, "validation mean cosine peaked at {best}");
    assert_eq!(metrics.val_clusters.len(), 20);
    assert_eq!(model.dims, 64);
}
