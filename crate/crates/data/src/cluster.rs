use crate::{DataError, PoseDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::path::Path;

const INDEX_MAGIC: &[u8; 4] = b"GRVC";
const INDEX_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct ClusterIndex {
    pub k: usize,
    pub num_joints: usize,
    /// k x 3J centroid matrix.
    pub centroids: Vec<Vec<f64>>,
    /// Pose index -> cluster id.
    pub assignment: Vec<usize>,
    /// Within-cluster SSE after each assignment step, in iteration order.
    pub sse_history: Vec<f64>,
}

impl ClusterIndex {
    /// Cluster id -> member pose indices.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (pose, &cluster) in self.assignment.iter().enumerate() {
            out[cluster].push(pose);
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        let dims = 3 * self.num_joints;
        let mut buf = Vec::new();
        buf.extend_from_slice(INDEX_MAGIC);
        buf.extend_from_slice(&INDEX_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.k as u64).to_le_bytes());
        buf.extend_from_slice(&(self.num_joints as u64).to_le_bytes());
        buf.extend_from_slice(&(self.assignment.len() as u64).to_le_bytes());
        for c in &self.centroids {
            assert_eq!(c.len(), dims);
            for v in c {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        for &a in &self.assignment {
            buf.extend_from_slice(&(a as u64).to_le_bytes());
        }
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ClusterIndex, DataError> {
        let bytes = fs::read(path)?;
        let bad = |m: &str| DataError::BadIndexFile(m.to_string());
        if bytes.len() < 32 || &bytes[0..4] != INDEX_MAGIC {
            return Err(bad("missing GRVC magic"));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != INDEX_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let read_u64 = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let k = read_u64(8) as usize;
        let num_joints = read_u64(16) as usize;
        let n = read_u64(24) as usize;
        let dims = 3 * num_joints;
        let expect = 32 + k * dims * 8 + n * 8;
        if bytes.len() != expect {
            return Err(bad("truncated cluster index"));
        }
        let mut off = 32;
        let mut centroids = Vec::with_capacity(k);
        for _ in 0..k {
            let mut c = Vec::with_capacity(dims);
            for _ in 0..dims {
                c.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
                off += 8;
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(bad("non-finite centroid"));
            }
            centroids.push(c);
        }
        let mut assignment = Vec::with_capacity(n);
        for _ in 0..n {
            let a = read_u64(off) as usize;
            off += 8;
            if a >= k {
                return Err(bad("assignment out of range"));
            }
            assignment.push(a);
        }
        Ok(ClusterIndex {
            k,
            num_joints,
            centroids,
            assignment,
            sse_history: Vec::new(),
        })
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first centroid uniform over points, each next sampled
/// with probability proportional to squared distance to the nearest chosen
/// centroid.
pub(crate) fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total <= 0.0 {
            // all remaining points coincide with a centroid; fall back to uniform
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p, &points[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut assignment = Vec::with_capacity(points.len());
    let mut sse = 0.0;
    for p in points {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d = dist2(p, centroid);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        assignment.push(best);
        sse += best_d;
    }
    (assignment, sse)
}

/// Raw k-means fit over flat points, before any pose bookkeeping.
#[derive(Clone, Debug)]
pub struct KmeansFit {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub sse_history: Vec<f64>,
}

/// Lloyd's algorithm with k-means++ seeding. Iterates until the largest
/// centroid shift drops below `tol` or `max_iters` is reached; clusters that
/// empty out are repaired by reseeding to the point farthest from its
/// assigned centroid.
pub fn kmeans_pp(
    dataset: &PoseDataset,
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<ClusterIndex, DataError> {
    let fit = kmeans_points(&dataset.flat_matrix(), k, seed, max_iters, tol)?;
    Ok(ClusterIndex {
        k,
        num_joints: dataset.num_joints,
        centroids: fit.centroids,
        assignment: fit.assignment,
        sse_history: fit.sse_history,
    })
}

pub fn kmeans_points(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<KmeansFit, DataError> {
    let n = points.len();
    if n == 0 {
        return Err(DataError::EmptyDataset);
    }
    if n < k || k == 0 {
        return Err(DataError::TooFewPoses { n, k });
    }
    let dims = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids: Vec<Vec<f64>> = seed_centroids(points, k, &mut rng)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();

    let mut assignment = Vec::new();
    let mut sse_history = Vec::new();
    for _ in 0..max_iters {
        let (mut a, sse) = assign(points, &centroids);

        // Repair empty clusters before the mean update so the update sees a
        // full assignment.
        let mut counts = vec![0usize; k];
        for &c in &a {
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far = 0;
            let mut far_d = -1.0;
            for (i, p) in points.iter().enumerate() {
                if counts[a[i]] <= 1 {
                    continue; // stealing the sole member would empty another cluster
                }
                let d = dist2(p, &centroids[a[i]]);
                if d > far_d {
                    far_d = d;
                    far = i;
                }
            }
            counts[a[far]] -= 1;
            a[far] = c;
            counts[c] = 1;
            centroids[c] = points[far].clone();
        }

        assignment = a;
        sse_history.push(sse);

        let mut sums = vec![vec![0.0; dims]; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            let count = counts[c] as f64;
            let new: Vec<f64> = sums[c].iter().map(|s| s / count).collect();
            shift = shift.max(dist2(&new, &centroids[c]).sqrt());
            centroids[c] = new;
        }
        if shift < tol {
            break;
        }
    }
    // Final assignment against the converged centroids.
    let (a, sse) = assign(points, &centroids);
    assignment.clone_from(&a);
    sse_history.push(sse);

    Ok(KmeansFit {
        centroids,
        assignment,
        sse_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth_corpus_with_joints;

    fn line_points(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn toy_three_points_find_optimal_partition() {
        let points = line_points(&[0.0, 1.0, 10.0]);
        for seed in 0..20 {
            let fit = kmeans_points(&points, 2, seed, 100, 1e-6).unwrap();
            assert_eq!(fit.assignment[0], fit.assignment[1]);
            assert_ne!(fit.assignment[0], fit.assignment[2]);
            let small = fit.assignment[0];
            let big = fit.assignment[2];
            assert_eq!(fit.centroids[small][0], 0.5);
            assert_eq!(fit.centroids[big][0], 10.0);
        }
    }

    #[test]
    fn k_equals_n_gives_zero_sse() {
        let d = synth_corpus_with_joints(2, 30, 3, 7);
        let idx = kmeans_pp(&d, 30, 0, 100, 1e-6).unwrap();
        let mut seen = vec![false; 30];
        for &c in &idx.assignment {
            assert!(!seen[c], "two points share cluster {c}");
            seen[c] = true;
        }
        assert_eq!(*idx.sse_history.last().unwrap(), 0.0);
    }

    #[test]
    fn seeding_weights_follow_squared_distance() {
        // On {0, 1, 10} with first centroid 0, the second pick is 10 with
        // probability 100/101. Monte Carlo over seeds, conditioned on the
        // first pick being point 0.
        let points = line_points(&[0.0, 1.0, 10.0]);
        let mut first_zero = 0u32;
        let mut then_ten = 0u32;
        for seed in 0..30_000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chosen = seed_centroids(&points, 2, &mut rng);
            if chosen[0] == 0 {
                first_zero += 1;
                if chosen[1] == 2 {
                    then_ten += 1;
                }
            }
        }
        assert!(first_zero > 8000);
        let p = f64::from(then_ten) / f64::from(first_zero);
        let expect = 100.0 / 101.0;
        assert!((p - expect).abs() < 0.005, "P(next=10)={p}, want {expect}");
    }

    #[test]
    fn too_small_dataset_rejected() {
        let points = line_points(&[0.0, 1.0]);
        assert!(matches!(
            kmeans_points(&points, 3, 0, 100, 1e-6),
            Err(DataError::TooFewPoses { n: 2, k: 3 })
        ));
    }

    #[test]
    fn sse_history_non_increasing() {
        let d = synth_corpus_with_joints(15, 600, 12, 5);
        for seed in 0..5 {
            let idx = kmeans_pp(&d, 24, seed, 100, 1e-6).unwrap();
            for w in idx.sse_history.windows(2) {
                assert!(w[1] <= w[0], "SSE rose: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn index_round_trips_through_file() {
        let d = synth_corpus_with_joints(15, 200, 8, 5);
        let idx = kmeans_pp(&d, 16, 1, 100, 1e-6).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clusters.bin");
        idx.save(&path).unwrap();
        let back = ClusterIndex::load(&path).unwrap();
        assert_eq!(back.k, idx.k);
        assert_eq!(back.num_joints, idx.num_joints);
        assert_eq!(back.assignment, idx.assignment);
        assert_eq!(back.centroids, idx.centroids);
    }

    #[test]
    fn every_cluster_nonempty_after_fit() {
        let d = synth_corpus_with_joints(15, 500, 4, 11);
        // k far above mode count forces splits; repair must keep all clusters
        // populated.
        let idx = kmeans_pp(&d, 40, 3, 100, 1e-6).unwrap();
        let members = idx.members();
        assert!(members.iter().all(|m| !m.is_empty()));
    }
}
