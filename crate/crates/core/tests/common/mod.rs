//! Reference implementations and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use curvelrr::clustering::Labels;
use curvelrr::curve::{normalize_srvf, Curve, Srvf};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-norm SRVF built from a few random harmonics per component.
pub fn random_srvf(len: usize, dim: usize, rng: &mut ChaCha8Rng) -> Srvf {
    let coeffs: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let q = Srvf::from_fn(len, dim, |t| {
        coeffs
            .iter()
            .map(|c| {
                c[0] + c[1] * (2.0 * PI * t).sin()
                    + c[2] * (2.0 * PI * t).cos()
                    + 0.5 * c[3] * (4.0 * PI * t).sin()
                    + 0.5 * c[4] * (4.0 * PI * t).cos()
                    + 0.3 * c[5] * (6.0 * PI * t).sin()
            })
            .collect()
    })
    .unwrap();
    normalize_srvf(&q).unwrap()
}

/// Smooth random curve whose first component is strictly increasing.
pub fn random_curve(len: usize, dim: usize, rng: &mut ChaCha8Rng) -> Curve {
    let c: Vec<[f64; 3]> = (0..dim)
        .map(|_| {
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    Curve::from_fn(len, dim, |t| {
        c.iter()
            .enumerate()
            .map(|(d, k)| {
                let drift = if d == 0 { 2.0 * t } else { 0.0 };
                drift + 0.2 * k[0] * (2.0 * PI * t).sin() + 0.1 * k[1] * (4.0 * PI * t).cos() + k[2]
            })
            .collect()
    })
    .unwrap()
}

/// Unbanded DTW over the full `(n+1) × (m+1)` table, steps {diag, up,
/// right}, absolute-difference local cost.
pub fn naive_dtw(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![f64::INFINITY; m + 1]; n + 1];
    d[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let cost = (a[i - 1] - b[j - 1]).abs();
            d[i][j] = cost + d[i - 1][j - 1].min(d[i - 1][j]).min(d[i][j - 1]);
        }
    }
    d[n][m]
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Accuracy maximized over every relabeling of the predicted ids.
pub fn brute_force_sca(pred: &Labels, truth: &Labels) -> f64 {
    let k = pred.num_clusters().max(truth.num_clusters());
    let best = permutations(k)
        .into_iter()
        .map(|perm| {
            pred.assignments()
                .iter()
                .zip(truth.assignments())
                .filter(|(&p, &t)| perm[p] == t)
                .count()
        })
        .max()
        .unwrap();
    best as f64 / pred.len() as f64
}

/// Singular value thresholding from the eigendecomposition of the symmetric
/// dilation `[[0, M], [Mᵀ, 0]]`, whose positive eigenpairs are
/// `(σ, [u; v] / √2)`.
pub fn svt_by_dilation(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut h = DMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let eig = h.symmetric_eigen();
    let mut out = DMatrix::zeros(r, c);
    for (k, &sigma) in eig.eigenvalues.iter().enumerate() {
        if sigma > tau {
            let x = eig.eigenvectors.column(k);
            let u = x.rows(0, r);
            let v = x.rows(r, c);
            out += (u * v.transpose()) * (2.0 * (sigma - tau));
        }
    }
    out
}

/// Random labels on `n` points using every id in `0..k`.
pub fn random_labels(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Labels {
    let mut ids: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    Labels::new(ids).unwrap()
}

/// Block-diagonal affinity with `sizes.len()` disconnected components.
pub fn component_affinity(sizes: &[usize], rng: &mut ChaCha8Rng) -> (DMatrix<f64>, Labels) {
    let n: usize = sizes.iter().sum();
    let mut truth = Vec::with_capacity(n);
    for (k, &s) in sizes.iter().enumerate() {
        truth.extend(std::iter::repeat_n(k, s));
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if truth[i] == truth[j] {
                let w = rng.random_range(0.2..1.0);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
    }
    (a, Labels::new(truth).unwrap())
}
