//! Affinity matrices, normalized spectral clustering, and the subspace
//! clustering accuracy score.

use nalgebra::{DMatrix, SymmetricEigen};
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};
use crate::kmeans::{kmeans_detailed, KMeansConfig};

/// Degree floor for isolated vertices.
pub const MIN_DEGREE: f64 = 1e-12;

/// Cluster assignments with ids `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labels {
    assignments: Vec<usize>,
}

impl Labels {
    /// Checks that ids form the contiguous range `0..k` with no empty cluster.
    pub fn new(assignments: Vec<usize>) -> Result<Self> {
        let k = assignments.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &a in &assignments {
            seen[a] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "cluster id {empty} has no members"
            )));
        }
        Ok(Self { assignments })
    }

    /// Relabels arbitrary integer ids to `0..k` in increasing id order.
    pub fn from_ids(ids: &[i64]) -> Self {
        let mut distinct: Vec<i64> = ids.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        Self {
            assignments: ids
                .iter()
                .map(|id| distinct.binary_search(id).expect("present"))
                .collect(),
        }
    }

    pub(crate) fn from_raw(assignments: Vec<usize>) -> Self {
        Self { assignments }
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn get(&self, i: usize) -> usize {
        self.assignments[i]
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Number of distinct ids (`max + 1`).
    pub fn num_clusters(&self) -> usize {
        self.assignments.iter().max().map_or(0, |m| m + 1)
    }

    /// Member counts per id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_clusters()];
        for &a in &self.assignments {
            counts[a] += 1;
        }
        counts
    }

    /// One-based ids, as written to label files.
    pub fn to_one_based(&self) -> Vec<i64> {
        self.assignments.iter().map(|&a| a as i64 + 1).collect()
    }
}

/// Symmetric nonnegative affinity matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Affinity {
    matrix: DMatrix<f64>,
}

impl Affinity {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch("affinity must be square".into()));
        }
        if matrix.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "affinity entries must be finite and nonnegative".into(),
            ));
        }
        if (&matrix - matrix.transpose()).amax() > 1e-10 {
            return Err(Error::InvalidParameter("affinity must be symmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `(|W| + |W|ᵀ) / 2`.
pub fn symmetrize(w: &DMatrix<f64>) -> Result<Affinity> {
    if !w.is_square() {
        return Err(Error::ShapeMismatch("coefficient matrix must be square".into()));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("coefficient matrix is not finite".into()));
    }
    let a = w.abs();
    Ok(Affinity {
        matrix: (&a + a.transpose()) * 0.5,
    })
}

/// Outcome of [`spectral_cluster_detailed`].
#[derive(Clone, Debug)]
pub struct SpectralFit {
    pub labels: Labels,
    /// Vertices whose zero degree was floored at [`MIN_DEGREE`].
    pub floored_vertices: Vec<usize>,
    /// Eigenvalues of the normalized Laplacian, ascending.
    pub laplacian_spectrum: Vec<f64>,
}

/// Normalized-cut spectral clustering into `c` groups.
pub fn spectral_cluster(a: &Affinity, c: usize, seed: u64) -> Result<Labels> {
    let fit = spectral_cluster_detailed(a, c, seed)?;
    if !fit.floored_vertices.is_empty() {
        log::warn!(
            "spectral clustering: {} isolated vertices had their degree floored",
            fit.floored_vertices.len()
        );
    }
    Ok(fit.labels)
}

/// Embeds with the `c` eigenvectors of `L = I - D^{-1/2} A D^{-1/2}` of
/// smallest eigenvalue, normalizes rows, and runs seeded k-means.
pub fn spectral_cluster_detailed(a: &Affinity, c: usize, seed: u64) -> Result<SpectralFit> {
    let n = a.size();
    if c == 0 || c > n {
        return Err(Error::InvalidParameter(format!(
            "cluster count {c} must be in [1, {n}]"
        )));
    }
    let mut floored = Vec::new();
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.matrix.row(i).sum();
            if d < MIN_DEGREE {
                floored.push(i);
            }
            1.0 / d.max(MIN_DEGREE).sqrt()
        })
        .collect();
    let normalized = DMatrix::from_fn(n, n, |i, j| {
        a.matrix[(i, j)] * inv_sqrt_deg[i] * inv_sqrt_deg[j]
    });
    let eig = SymmetricEigen::new(normalized);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));
    let mut embedding = DMatrix::zeros(n, c);
    for (col, &k) in order.iter().take(c).enumerate() {
        embedding.set_column(col, &eig.eigenvectors.column(k));
    }
    for mut row in embedding.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let fit = kmeans_detailed(&embedding, &KMeansConfig::new(c, seed))?;
    Ok(SpectralFit {
        labels: fit.labels,
        floored_vertices: floored,
        laplacian_spectrum: order.iter().map(|&k| (1.0 - eig.eigenvalues[k]).max(0.0)).collect(),
    })
}

/// Subspace clustering accuracy: the fraction of points correctly labelled
/// under the best one-to-one matching of predicted ids to true ids.
pub fn sca(predicted: &Labels, truth: &Labels) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predicted labels vs {} true labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("no labels to score".into()));
    }
    let size = predicted.num_clusters().max(truth.num_clusters());
    let mut confusion = Matrix::new(size, size, 0i64);
    for (&p, &t) in predicted.assignments.iter().zip(&truth.assignments) {
        confusion[(p, t)] += 1;
    }
    let (matched, _) = kuhn_munkres(&confusion);
    Ok(matched as f64 / truth.len() as f64)
}
