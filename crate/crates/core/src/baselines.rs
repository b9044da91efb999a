//! Comparison methods: k-means on concatenated samples, dynamic time warping
//! with spectral clustering, and Euclidean low-rank representation.

use nalgebra::DMatrix;

use crate::clustering::Affinity;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::solver::svt;

pub use crate::kmeans::{kmeans, kmeans_detailed, KMeansConfig, KMeansFit};

/// Concatenates the components of a curve dimension-major: all samples of
/// component 0, then all of component 1, and so on.
pub fn flatten(curve: &Curve) -> Vec<f64> {
    // Column-major storage.
    curve.samples().as_slice().to_vec()
}

/// Stacks flattened curves as the rows of an `N × (T·n)` matrix.
pub fn flatten_all(curves: &[Curve]) -> Result<DMatrix<f64>> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidParameter("no curves to flatten".into()))?;
    let width = first.len() * first.dim();
    let mut m = DMatrix::zeros(curves.len(), width);
    for (i, c) in curves.iter().enumerate() {
        let v = flatten(c);
        if v.len() != width {
            return Err(Error::ShapeMismatch(format!(
                "curve {i} flattens to {} values, expected {width}",
                v.len()
            )));
        }
        m.row_mut(i).copy_from_slice(&v);
    }
    Ok(m)
}

/// Sakoe-Chiba band width as a fraction of the sequence length.
#[derive(Clone, Debug, PartialEq)]
pub struct DtwConfig {
    pub window_fraction: f64,
}

impl Default for DtwConfig {
    fn default() -> Self {
        Self {
            window_fraction: 0.10,
        }
    }
}

impl DtwConfig {
    pub fn new(window_fraction: f64) -> Result<Self> {
        if !(window_fraction > 0.0 && window_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "DTW window fraction must lie in (0, 1], got {window_fraction}"
            )));
        }
        Ok(Self { window_fraction })
    }

    /// `ceil(window_fraction · len)`, at least 1.
    pub fn half_width(&self, len: usize) -> usize {
        ((self.window_fraction * len as f64).ceil() as usize).max(1)
    }
}

/// Banded DTW distance with steps {diagonal, up, right} and unsquared
/// Euclidean local cost.
///
/// The band is `|i - j| <= ceil(window_fraction · max(len_a, len_b))`,
/// widened to the length difference when that is larger so that the two
/// corners stay connected.
pub fn dtw_distance(a: &Curve, b: &Curve, cfg: &DtwConfig) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!(
            "DTW between R^{} and R^{} curves",
            a.dim(),
            b.dim()
        )));
    }
    let (n, m) = (a.len(), b.len());
    let mut band = cfg.half_width(n.max(m));
    if band < n.abs_diff(m) {
        log::warn!(
            "DTW band {band} cannot connect lengths {n} and {m}; widening to {}",
            n.abs_diff(m)
        );
        band = n.abs_diff(m);
    }
    Ok(banded_dtw(a.samples(), b.samples(), band))
}

fn local_cost(a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize) -> f64 {
    (0..a.ncols())
        .map(|d| {
            let diff = a[(i, d)] - b[(j, d)];
            diff * diff
        })
        .sum::<f64>()
        .sqrt()
}

fn banded_dtw(a: &DMatrix<f64>, b: &DMatrix<f64>, band: usize) -> f64 {
    let (n, m) = (a.nrows(), b.nrows());
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for i in 0..n {
        cur.fill(f64::INFINITY);
        let lo = i.saturating_sub(band);
        let hi = (i + band).min(m - 1);
        for j in lo..=hi {
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 {
                    best = best.min(prev[j]);
                    if j > 0 {
                        best = best.min(prev[j - 1]);
                    }
                }
                if j > 0 {
                    best = best.min(cur[j - 1]);
                }
                best
            };
            cur[j] = best + local_cost(a, i, b, j);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Symmetric matrix of pairwise DTW distances.
pub fn dtw_distance_matrix(curves: &[Curve], cfg: &DtwConfig) -> Result<DMatrix<f64>> {
    let n = curves.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = dtw_distance(&curves[i], &curves[j], cfg)?;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

/// Kernel bandwidth used to turn distances into affinities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaRule {
    /// Median of the off-diagonal distances.
    Median,
    Fixed(f64),
}

/// Gaussian-kernel affinity `exp(-d² / 2σ²)` from a distance matrix.
/// A zero bandwidth yields the all-ones affinity.
pub fn distance_affinity(d: &DMatrix<f64>, rule: SigmaRule) -> Result<Affinity> {
    let n = d.nrows();
    if n < 2 || !d.is_square() {
        return Err(Error::InvalidParameter(
            "need a square distance matrix of at least 2 points".into(),
        ));
    }
    let sigma = match rule {
        SigmaRule::Fixed(s) => s,
        SigmaRule::Median => {
            let mut off: Vec<f64> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| d[(i, j)])
                .collect();
            off.sort_by(f64::total_cmp);
            let mid = off.len() / 2;
            if off.len() % 2 == 1 {
                off[mid]
            } else {
                0.5 * (off[mid - 1] + off[mid])
            }
        }
    };
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid bandwidth {sigma}")));
    }
    if sigma == 0.0 {
        return Affinity::new(DMatrix::from_element(n, n, 1.0));
    }
    let denom = 2.0 * sigma * sigma;
    Affinity::new(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            let v = (-d[(i, j)] * d[(i, j)] / denom).exp();
            let u = (-d[(j, i)] * d[(j, i)] / denom).exp();
            0.5 * (u + v)
        }
    }))
}

/// DTW distances converted to a Gaussian-kernel affinity.
pub fn dtw_affinity(curves: &[Curve], cfg: &DtwConfig, rule: SigmaRule) -> Result<Affinity> {
    if curves.len() < 2 {
        return Err(Error::InvalidParameter("DTW affinity needs at least 2 curves".into()));
    }
    distance_affinity(&dtw_distance_matrix(curves, cfg)?, rule)
}

/// Euclidean LRR parameters. `lambda` weights the squared-Frobenius fit term.
#[derive(Clone, Debug, PartialEq)]
pub struct LrrConfig {
    pub lambda: f64,
    pub beta0: f64,
    pub beta_max: f64,
    pub rho0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub max_iters: usize,
}

impl Default for LrrConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            beta0: 0.1,
            beta_max: 1e6,
            rho0: 1.1,
            eps1: 1e-4,
            eps2: 1e-4,
            max_iters: 500,
        }
    }
}

impl LrrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("LRR lambda must be positive".into()));
        }
        if !(self.beta0 > 0.0 && self.beta_max >= self.beta0 && self.rho0 > 1.0) {
            return Err(Error::InvalidParameter("invalid LRR penalty schedule".into()));
        }
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidParameter("invalid LRR stopping rule".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LrrReport {
    pub z: DMatrix<f64>,
    /// `||X - XZ||_F`.
    pub fit_residual: f64,
    /// `||X - XZ - E||_F / ||X||_F` at the returned iterate.
    pub constraint_residual: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Low-rank representation of the columns of `x` (`D × N`):
///
/// ```text
/// min_{Z,E} ||Z||_* + λ/2 ||E||_F²   s.t.  X = XZ + E
/// ```
///
/// solved by linearized alternating direction with adaptive penalty.
pub fn euclidean_lrr(x: &DMatrix<f64>, cfg: &LrrConfig) -> Result<LrrReport> {
    cfg.validate()?;
    let n = x.ncols();
    if n < 2 {
        return Err(Error::InvalidParameter("LRR needs at least 2 columns".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("LRR input is not finite".into()));
    }
    let x_norm = x.norm();
    if x_norm == 0.0 {
        return Ok(LrrReport {
            z: DMatrix::zeros(n, n),
            fit_residual: 0.0,
            constraint_residual: 0.0,
            iters: 0,
            converged: true,
        });
    }
    let xt = x.transpose();
    let spectral = x
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure)?
        .singular_values
        .max();
    let eta = 1.02 * spectral * spectral;

    let mut z = DMatrix::<f64>::zeros(n, n);
    let mut e = DMatrix::<f64>::zeros(x.nrows(), n);
    let mut y = DMatrix::<f64>::zeros(x.nrows(), n);
    let mut beta = cfg.beta0;
    let mut converged = false;
    let mut iters = 0;
    let mut constraint = 1.0;

    while iters < cfg.max_iters {
        iters += 1;
        let xz = x * &z;
        let e_next = (&y + (x - &xz) * beta) / (cfg.lambda + beta);
        let r = x - &xz - &e_next;
        let target = &z + &xt * (&y + &r * beta) / (eta * beta);
        let z_next = svt(&target, 1.0 / (eta * beta))?;

        let residual = x - x * &z_next - &e_next;
        constraint = residual.norm() / x_norm;
        let change = (eta.sqrt() * (&z_next - &z).norm()).max((&e_next - &e).norm());
        if !constraint.is_finite() || !change.is_finite() {
            return Err(Error::NonFinite {
                iter: iters,
                primal_residual: constraint,
                step: change,
            });
        }
        let small_step = beta * change / x_norm <= cfg.eps1;
        z = z_next;
        e = e_next;
        if small_step && constraint <= cfg.eps2 {
            converged = true;
            break;
        }
        y += &residual * beta;
        let rho = if small_step { cfg.rho0 } else { 1.0 };
        beta = (beta * rho).min(cfg.beta_max);
    }

    let fit_residual = (x - x * &z).norm();
    Ok(LrrReport {
        z,
        fit_residual,
        constraint_residual: constraint,
        iters,
        converged,
    })
}
