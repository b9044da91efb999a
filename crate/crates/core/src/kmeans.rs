//! Lloyd's k-means with k-means++ seeding and seeded restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clustering::Labels;
use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 20;
const MAX_LLOYD_ITERS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansConfig {
    pub clusters: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(clusters: usize, seed: u64) -> Self {
        Self {
            clusters,
            restarts: DEFAULT_RESTARTS,
            max_iters: MAX_LLOYD_ITERS,
            seed,
        }
    }
}

/// Best restart of [`kmeans_detailed`].
#[derive(Clone, Debug)]
pub struct KMeansFit {
    pub labels: Labels,
    pub centers: DMatrix<f64>,
    /// Within-cluster sum of squares.
    pub inertia: f64,
    /// Inertia after each Lloyd iteration of the winning restart.
    pub inertia_trace: Vec<f64>,
}

/// Clusters the rows of `points` into `c` groups. Deterministic for a fixed seed.
pub fn kmeans(points: &DMatrix<f64>, c: usize, seed: u64) -> Result<Labels> {
    kmeans_detailed(points, &KMeansConfig::new(c, seed)).map(|f| f.labels)
}

pub fn kmeans_detailed(points: &DMatrix<f64>, cfg: &KMeansConfig) -> Result<KMeansFit> {
    let n = points.nrows();
    let c = cfg.clusters;
    if c == 0 || c > n {
        return Err(Error::InvalidParameter(format!(
            "cluster count {c} must be in [1, {n}]"
        )));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("k-means input is not finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..cfg.restarts.max(1) {
        let centers = plus_plus_seeds(points, c, &mut rng);
        let fit = lloyd(points, centers, cfg.max_iters);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, k: usize) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centers.row(k).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn plus_plus_seeds(points: &DMatrix<f64>, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = points.nrows();
    let mut centers = DMatrix::zeros(c, points.ncols());
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from(&points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers, 0)).collect();
    for k in 1..c {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 && u < d {
                    pick = i;
                    break;
                }
                u -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(k).copy_from(&points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centers, k));
        }
    }
    centers
}

fn assign(points: &DMatrix<f64>, centers: &DMatrix<f64>, labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let mut best = (0, f64::INFINITY);
        for k in 0..centers.nrows() {
            let d = sq_dist(points, i, centers, k);
            if d < best.1 {
                best = (k, d);
            }
        }
        *label = best.0;
        inertia += best.1;
    }
    inertia
}

fn lloyd(points: &DMatrix<f64>, mut centers: DMatrix<f64>, max_iters: usize) -> KMeansFit {
    let (n, c) = (points.nrows(), centers.nrows());
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut inertia = assign(points, &centers, &mut labels);
    trace.push(inertia);
    for _ in 0..max_iters {
        // Update step.
        let mut sums = DMatrix::zeros(c, points.ncols());
        let mut counts = vec![0usize; c];
        for (i, &k) in labels.iter().enumerate() {
            for (acc, v) in sums.row_mut(k).iter_mut().zip(points.row(i).iter()) {
                *acc += v;
            }
            counts[k] += 1;
        }
        for (k, &count) in counts.iter().enumerate() {
            if count > 0 {
                centers.row_mut(k).copy_from(&(sums.row(k) / count as f64));
            }
        }
        // Empty clusters take the point farthest from its own center.
        for k in 0..c {
            if counts[k] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .max_by(|&a, &b| {
                    sq_dist(points, a, &centers, labels[a])
                        .total_cmp(&sq_dist(points, b, &centers, labels[b]))
                });
            if let Some(i) = far {
                counts[labels[i]] -= 1;
                labels[i] = k;
                counts[k] = 1;
                centers.row_mut(k).copy_from(&points.row(i));
            }
        }
        let prev = labels.clone();
        inertia = assign(points, &centers, &mut labels);
        trace.push(inertia);
        if labels == prev {
            break;
        }
    }
    KMeansFit {
        labels: Labels::from_raw(labels),
        centers,
        inertia,
        inertia_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::sca;
    use rand_distr::{Distribution, Normal};

    fn blobs(per: usize, centers: &[[f64; 2]], spread: f64, seed: u64) -> (DMatrix<f64>, Labels) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, spread).unwrap();
        let n = per * centers.len();
        let mut m = DMatrix::zeros(n, 2);
        let mut truth = Vec::new();
        for (k, c) in centers.iter().enumerate() {
            for p in 0..per {
                let i = k * per + p;
                m[(i, 0)] = c[0] + noise.sample(&mut rng);
                m[(i, 1)] = c[1] + noise.sample(&mut rng);
                truth.push(k);
            }
        }
        (m, Labels::from_raw(truth))
    }

    #[test]
    fn separates_distant_blobs() {
        let (pts, truth) = blobs(25, &[[0.0, 0.0], [50.0, 50.0]], 1.0, 4);
        let labels = kmeans(&pts, 2, 9).unwrap();
        assert_eq!(sca(&labels, &truth).unwrap(), 1.0);
    }

    #[test]
    fn one_cluster_per_point() {
        let (pts, _) = blobs(4, &[[0.0, 0.0], [3.0, 1.0]], 1.0, 1);
        let fit = kmeans_detailed(&pts, &KMeansConfig::new(8, 0)).unwrap();
        assert!(fit.inertia.abs() < 1e-20);
        let mut ids = fit.labels.assignments().to_vec();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 8);
    }

    #[test]
    fn duplicates_share_clusters() {
        let (pts, _) = blobs(6, &[[0.0, 0.0], [10.0, 0.0]], 2.0, 2);
        let doubled = DMatrix::from_fn(24, 2, |i, j| pts[(i / 2, j)]);
        let labels = kmeans(&doubled, 2, 5).unwrap();
        for i in 0..12 {
            assert_eq!(labels.get(2 * i), labels.get(2 * i + 1));
        }
    }

    #[test]
    fn inertia_never_increases() {
        let (pts, _) = blobs(30, &[[0.0, 0.0], [2.0, 0.0], [1.0, 2.0]], 1.0, 6);
        for seed in 0..10 {
            let fit = kmeans_detailed(&pts, &KMeansConfig { restarts: 1, ..KMeansConfig::new(3, seed) }).unwrap();
            for pair in fit.inertia_trace.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9);
            }
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let (pts, _) = blobs(20, &[[0.0, 0.0], [1.5, 0.0], [0.0, 1.5]], 1.0, 7);
        assert_eq!(kmeans(&pts, 3, 42).unwrap(), kmeans(&pts, 3, 42).unwrap());
    }

    #[test]
    fn rejects_bad_cluster_counts() {
        let pts = DMatrix::zeros(3, 2);
        assert!(kmeans(&pts, 0, 0).is_err());
        assert!(kmeans(&pts, 4, 0).is_err());
    }

    #[test]
    fn identical_points_do_not_panic() {
        let pts = DMatrix::from_element(5, 3, 1.0);
        let labels = kmeans(&pts, 2, 0).unwrap();
        assert_eq!(labels.len(), 5);
    }
}
