//! Geometry of the unit hypersphere of SRVFs and of its shape quotient
//! (modulo rotations and reparameterizations).
//!
//! The quotient log map at `q0` aligns `q1` to `q0` (alternating orthogonal
//! Procrustes rotation and dynamic-programming reparameterization) and then
//! takes the ordinary sphere log map toward the aligned representative.
//! [`build_gram_tensor`] collects the pairwise inner products of those
//! tangent vectors, one `N × N` block per anchor curve.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::curve::{self, check_same_shape, trapz_inner, Curve, Srvf};
use crate::error::{Error, Result};

/// Angles below this are treated as zero (the log map returns the zero vector).
pub const SMALL_ANGLE: f64 = 1e-9;
/// Angles within this of π are rejected as antipodal.
pub const ANTIPODAL_GUARD: f64 = 1e-6;
const UNIT_TOL: f64 = 1e-6;

/// A discretized reparameterization `γ: [0, 1] -> [0, 1]`, sampled on the
/// uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Warp {
    gamma: Vec<f64>,
}

impl Warp {
    /// Validates `γ(0) = 0`, `γ(1) = 1` and monotonicity.
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() < curve::MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "warp needs at least {} samples",
                curve::MIN_SAMPLES
            )));
        }
        if gamma[0] != 0.0 || *gamma.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter(
                "warp must fix the endpoints 0 and 1".into(),
            ));
        }
        if let Some(k) = gamma
            .windows(2)
            .position(|w| !(w[1] >= w[0]) || !w[1].is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "warp decreases between samples {k} and {}",
                k + 1
            )));
        }
        Ok(Self { gamma })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            gamma: curve::uniform_grid(len),
        }
    }

    /// Samples `f` on the uniform grid, pinning the endpoints to exactly 0 and 1.
    pub fn from_fn(len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut gamma: Vec<f64> = curve::uniform_grid(len).into_iter().map(f).collect();
        gamma[0] = 0.0;
        gamma[len - 1] = 1.0;
        Self::new(gamma)
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Finite-difference `γ̇` on the grid, clamped at zero.
    pub fn derivative(&self) -> Vec<f64> {
        let c = Curve::from_scalar(&self.gamma).expect("warp samples are finite");
        curve::derivative(&c)
            .iter()
            .map(|v| v.max(0.0))
            .collect()
    }

    /// Group action on SRVFs: `(q ∘ γ) sqrt(γ̇)`. No renormalization.
    pub fn act_on_srvf(&self, q: &Srvf) -> Result<Srvf> {
        self.check_len(q.len())?;
        let rate = self.derivative();
        let mut out = DMatrix::zeros(q.len(), q.dim());
        for (k, (&g, &r)) in self.gamma.iter().zip(&rate).enumerate() {
            let scale = r.sqrt();
            for (d, v) in q.eval(g).into_iter().enumerate() {
                out[(k, d)] = v * scale;
            }
        }
        Srvf::from_values(out)
    }

    /// Reparameterizes a curve: `β ∘ γ`.
    pub fn act_on_curve(&self, c: &Curve) -> Result<Curve> {
        self.check_len(c.len())?;
        let mut out = DMatrix::zeros(c.len(), c.dim());
        for (k, &g) in self.gamma.iter().enumerate() {
            for (d, v) in c.eval(g).into_iter().enumerate() {
                out[(k, d)] = v;
            }
        }
        Curve::new(out)
    }

    /// Largest deviation from the identity warp.
    pub fn max_deviation(&self) -> f64 {
        let len = self.gamma.len();
        self.gamma
            .iter()
            .enumerate()
            .map(|(k, g)| (g - curve::grid_point(k, len)).abs())
            .fold(0.0, f64::max)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.gamma.len() {
            return Err(Error::ShapeMismatch(format!(
                "warp has {} samples, function has {len}",
                self.gamma.len()
            )));
        }
        Ok(())
    }
}

/// An element of `SO(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    /// Checks `OᵀO = I` and `det O = 1` within 1e-8.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::InvalidParameter("rotation must be square".into()));
        }
        let gram = matrix.transpose() * &matrix;
        if (gram - DMatrix::identity(n, n)).amax() > 1e-8 {
            return Err(Error::InvalidParameter("matrix is not orthogonal".into()));
        }
        if (matrix.determinant() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter("determinant is not +1".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Planar rotation by `angle` radians.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    /// `t ↦ O q(t)`.
    pub fn act_on_srvf(&self, q: &Srvf) -> Result<Srvf> {
        if q.dim() != self.matrix.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "rotation in R^{} applied to R^{}-valued function",
                self.matrix.nrows(),
                q.dim()
            )));
        }
        Ok(Srvf::from_values_unchecked(
            q.values() * self.matrix.transpose(),
        ))
    }
}

/// A vector in the tangent space of the unit sphere at `anchor`.
#[derive(Clone, Debug)]
pub struct TangentVector {
    values: DMatrix<f64>,
    anchor: Srvf,
}

impl TangentVector {
    pub fn zero(anchor: &Srvf) -> Self {
        Self {
            values: DMatrix::zeros(anchor.len(), anchor.dim()),
            anchor: anchor.clone(),
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn anchor(&self) -> &Srvf {
        &self.anchor
    }

    pub fn norm(&self) -> f64 {
        trapz_inner(&self.values, &self.values).max(0.0).sqrt()
    }

    pub fn inner(&self, other: &TangentVector) -> Result<f64> {
        check_same_shape(&self.values, &other.values)?;
        Ok(trapz_inner(&self.values, &other.values))
    }

    /// `<anchor, v>`; zero up to round-off for a genuine tangent vector.
    pub fn tangency_defect(&self) -> f64 {
        trapz_inner(self.anchor.values(), &self.values)
    }
}

fn check_unit(q: &Srvf, name: &str) -> Result<()> {
    let norm = q.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!(
            "{name} must have unit L2 norm, has {norm}"
        )));
    }
    Ok(())
}

/// Great-circle angle `arccos <q0, q1>` with the argument clamped to `[-1, 1]`.
pub fn sphere_angle(q0: &Srvf, q1: &Srvf) -> Result<f64> {
    Ok(curve::l2_inner(q0, q1)?.clamp(-1.0, 1.0).acos())
}

/// Point at fraction `tau` along the great circle from `q0` to `q1`.
pub fn geodesic(q0: &Srvf, q1: &Srvf, tau: f64) -> Result<Srvf> {
    check_same_shape(q0.values(), q1.values())?;
    check_unit(q0, "q0")?;
    check_unit(q1, "q1")?;
    let theta = sphere_angle(q0, q1)?;
    if theta < SMALL_ANGLE {
        return Ok(q0.clone());
    }
    if std::f64::consts::PI - theta < ANTIPODAL_GUARD {
        return Err(Error::Antipodal { theta });
    }
    let s = theta.sin();
    let a = (theta * (1.0 - tau)).sin() / s;
    let b = (theta * tau).sin() / s;
    Ok(Srvf::from_values_unchecked(
        q0.values() * a + q1.values() * b,
    ))
}

/// Sphere log map `log_{q0}(q1) = θ / sin θ · (q1 - <q0, q1> q0)`.
pub fn log_sphere(q0: &Srvf, q1: &Srvf) -> Result<TangentVector> {
    check_same_shape(q0.values(), q1.values())?;
    check_unit(q0, "q0")?;
    check_unit(q1, "q1")?;
    log_sphere_unchecked(q0, q1)
}

fn log_sphere_unchecked(q0: &Srvf, q1: &Srvf) -> Result<TangentVector> {
    let cos = trapz_inner(q0.values(), q1.values()).clamp(-1.0, 1.0);
    let theta = cos.acos();
    if theta < SMALL_ANGLE {
        return Ok(TangentVector::zero(q0));
    }
    if std::f64::consts::PI - theta < ANTIPODAL_GUARD {
        return Err(Error::Antipodal { theta });
    }
    let scale = theta / theta.sin();
    Ok(TangentVector {
        values: (q1.values() - q0.values() * cos) * scale,
        anchor: q0.clone(),
    })
}

/// Optimal rotation of `q1` onto `q0` (orthogonal Procrustes over `SO(n)`).
///
/// Returns the rotation and the rotated function `O* q1`.
pub fn align_rotation(q0: &Srvf, q1: &Srvf) -> Result<(Rotation, Srvf)> {
    check_same_shape(q0.values(), q1.values())?;
    let n = q0.dim();
    if n == 1 {
        return Ok((Rotation::identity(1), q1.clone()));
    }
    // M = ∫ q0(t) q1(t)ᵀ dt
    let len = q0.len();
    let h = 1.0 / (len - 1) as f64;
    let mut weighted = q0.values().clone();
    weighted.row_mut(0).scale_mut(0.5);
    weighted.row_mut(len - 1).scale_mut(0.5);
    let m = weighted.transpose() * q1.values() * h;
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SvdFailure),
    };
    let mut fix = DMatrix::<f64>::identity(n, n);
    if (&u * &v_t).determinant() < 0.0 {
        fix[(n - 1, n - 1)] = -1.0;
    }
    let rotation = Rotation {
        matrix: u * fix * v_t,
    };
    let rotated = rotation.act_on_srvf(q1)?;
    let before = curve::l2_distance(q0, q1)?;
    let after = curve::l2_distance(q0, &rotated)?;
    if after > before {
        return Ok((Rotation::identity(n), q1.clone()));
    }
    Ok((rotation, rotated))
}

/// Largest lattice step used by [`default_dp_steps`].
pub const DEFAULT_DP_REACH: usize = 5;

/// Admissible lattice moves `(Δt, Δγ)` for the reparameterization DP: every
/// coprime pair with both entries at most `reach`. Warp slopes stay within
/// `[1/reach, reach]`.
pub fn dp_steps(reach: usize) -> Vec<(usize, usize)> {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=reach)
        .flat_map(|a| (1..=reach).map(move |b| (a, b)))
        .filter(|&(a, b)| gcd(a, b) == 1)
        .collect()
}

pub fn default_dp_steps() -> Vec<(usize, usize)> {
    dp_steps(DEFAULT_DP_REACH)
}

/// Settings for quotient-space alignment.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignConfig {
    /// Rotation/reparameterization alternation passes.
    pub iters: usize,
    /// DP lattice side length; `None` uses the SRVF grid size.
    pub grid_size: Option<usize>,
    /// Allowed predecessor steps on the lattice.
    pub steps: Vec<(usize, usize)>,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            iters: 3,
            grid_size: None,
            steps: default_dp_steps(),
        }
    }
}

impl AlignConfig {
    fn validate(&self, len: usize) -> Result<usize> {
        let g = self.grid_size.unwrap_or(len);
        if g < curve::MIN_SAMPLES || g > len {
            return Err(Error::InvalidParameter(format!(
                "DP grid size must be in [{}, {len}], got {g}",
                curve::MIN_SAMPLES
            )));
        }
        if !self.steps.contains(&(1, 1)) || self.steps.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::InvalidParameter(
                "DP steps must be positive and include the diagonal (1, 1)".into(),
            ));
        }
        Ok(g)
    }
}

/// Optimal reparameterization of `q1` toward `q0` by dynamic programming.
///
/// Minimizes `||q0 - (q1 ∘ γ) sqrt(γ̇)||²` over piecewise-linear warps whose
/// pieces follow [`default_dp_steps`] on a `grid_size × grid_size` lattice.
/// The warped function is renormalized to unit norm. If the result would be
/// farther from `q0` than `q1` itself, the identity warp is returned instead.
pub fn align_reparam(q0: &Srvf, q1: &Srvf, grid_size: usize) -> Result<(Warp, Srvf)> {
    let cfg = AlignConfig {
        grid_size: Some(grid_size),
        ..AlignConfig::default()
    };
    align_reparam_with(q0, q1, &cfg)
}

/// [`align_reparam`] with an explicit lattice configuration.
pub fn align_reparam_with(q0: &Srvf, q1: &Srvf, cfg: &AlignConfig) -> Result<(Warp, Srvf)> {
    check_same_shape(q0.values(), q1.values())?;
    let len = q0.len();
    let g = cfg.validate(len)?;

    let (a, b) = if g == len {
        (q0.values().clone(), q1.values().clone())
    } else {
        (resample_values(q0.values(), g), resample_values(q1.values(), g))
    };
    let knots = dp_path(&a, &b, &cfg.steps);

    // Warp knots in parameter units, then evaluated on the SRVF grid.
    let scale = (g - 1) as f64;
    let kt: Vec<f64> = knots.iter().map(|&(i, _)| i as f64 / scale).collect();
    let kg: Vec<f64> = knots.iter().map(|&(_, j)| j as f64 / scale).collect();
    let mut gamma: Vec<f64> = curve::uniform_grid(len)
        .into_iter()
        .map(|t| piecewise_linear(&kt, &kg, t))
        .collect();
    gamma[0] = 0.0;
    gamma[len - 1] = 1.0;
    let warp = Warp::new(gamma)?;

    let before = curve::l2_distance(q0, q1)?;
    let warped = warp
        .act_on_srvf(q1)
        .and_then(|w| curve::normalize_srvf(&w));
    match warped {
        Ok(w) if curve::l2_distance(q0, &w)? <= before => Ok((warp, w)),
        _ => Ok((Warp::identity(len), q1.clone())),
    }
}

fn resample_values(m: &DMatrix<f64>, len: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(len, m.ncols());
    for k in 0..len {
        for (d, v) in curve::interp_row(m, curve::grid_point(k, len))
            .into_iter()
            .enumerate()
        {
            out[(k, d)] = v;
        }
    }
    out
}

fn piecewise_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let idx = xs.partition_point(|&v| v < x);
    if idx == 0 {
        return ys[0];
    }
    if idx >= xs.len() {
        return *ys.last().unwrap();
    }
    let (x0, x1, y0, y1) = (xs[idx - 1], xs[idx], ys[idx - 1], ys[idx]);
    if x1 <= x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// One admissible lattice move with its trapezoid nodes precomputed:
/// `(offset along t, whole offset along γ, fractional offset, weight)`.
struct Move {
    di: usize,
    dj: usize,
    root_slope: f64,
    nodes: Vec<(usize, usize, f64, f64)>,
}

impl Move {
    fn new(di: usize, dj: usize) -> Self {
        let slope = dj as f64 / di as f64;
        let nodes = (0..=di)
            .map(|s| {
                let pos = s as f64 * slope;
                let whole = (pos.floor() as usize).min(dj.saturating_sub(1));
                let w = if s == 0 || s == di { 0.5 } else { 1.0 };
                (s, whole, pos - whole as f64, w)
            })
            .collect();
        Self {
            di,
            dj,
            root_slope: slope.sqrt(),
            nodes,
        }
    }

    /// Trapezoidal `∫ |a(t) - sqrt(m) b(γ(t))|²` over the segment starting at
    /// `(i0, j0)`, without the grid spacing factor.
    #[inline]
    fn cost(&self, a: &[&[f64]], b: &[&[f64]], i0: usize, j0: usize) -> f64 {
        let mut total = 0.0;
        for &(s, whole, frac, w) in &self.nodes {
            let (ia, jb) = (i0 + s, j0 + whole);
            let mut f = 0.0;
            for (ca, cb) in a.iter().zip(b) {
                let bv = if frac == 0.0 {
                    cb[jb]
                } else {
                    cb[jb] + frac * (cb[jb + 1] - cb[jb])
                };
                let diff = ca[ia] - self.root_slope * bv;
                f += diff * diff;
            }
            total += w * f;
        }
        total
    }
}

/// Minimum-cost monotone lattice path from `(0, 0)` to `(g-1, g-1)`.
fn dp_path(a: &DMatrix<f64>, b: &DMatrix<f64>, steps: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let g = a.nrows();
    let cols_a: Vec<&[f64]> = (0..a.ncols())
        .map(|d| &a.as_slice()[d * g..(d + 1) * g])
        .collect();
    let cols_b: Vec<&[f64]> = (0..b.ncols())
        .map(|d| &b.as_slice()[d * g..(d + 1) * g])
        .collect();
    let moves: Vec<Move> = steps.iter().map(|&(di, dj)| Move::new(di, dj)).collect();
    let idx = |i: usize, j: usize| i * g + j;
    let mut cost = vec![f64::INFINITY; g * g];
    let mut pred = vec![usize::MAX; g * g];
    cost[0] = 0.0;
    for i in 1..g {
        for j in 1..g {
            let mut best = f64::INFINITY;
            let mut arg = usize::MAX;
            for mv in &moves {
                if mv.di > i || mv.dj > j {
                    continue;
                }
                let p = idx(i - mv.di, j - mv.dj);
                let base = cost[p];
                if !(base < best) {
                    continue;
                }
                let c = base + mv.cost(&cols_a, &cols_b, i - mv.di, j - mv.dj);
                if c < best {
                    best = c;
                    arg = p;
                }
            }
            cost[idx(i, j)] = best;
            pred[idx(i, j)] = arg;
        }
    }
    let mut path = vec![(g - 1, g - 1)];
    let mut cur = idx(g - 1, g - 1);
    while cur != 0 {
        cur = pred[cur];
        debug_assert!(cur != usize::MAX, "lattice corner unreachable");
        path.push((cur / g, cur % g));
    }
    path.reverse();
    path
}

/// Result of aligning one SRVF to another in the shape quotient.
#[derive(Clone, Debug)]
pub struct Alignment {
    /// Unit-norm representative of `[q1]` aligned to `q0`.
    pub aligned: Srvf,
    /// `||q0 - q̃1||` after each completed pass; entry 0 is the distance before alignment.
    pub pass_distances: Vec<f64>,
}

/// Representative of the orbit of `q1` closest to `q0`, found by alternating
/// rotation and reparameterization alignment `iters` times.
pub fn align_to(q0: &Srvf, q1: &Srvf, iters: usize) -> Result<Srvf> {
    let cfg = AlignConfig {
        iters,
        ..AlignConfig::default()
    };
    Ok(align_to_with(q0, q1, &cfg)?.aligned)
}

/// [`align_to`] with full configuration and per-pass distances.
pub fn align_to_with(q0: &Srvf, q1: &Srvf, cfg: &AlignConfig) -> Result<Alignment> {
    check_same_shape(q0.values(), q1.values())?;
    let mut current = q1.clone();
    let mut distances = vec![curve::l2_distance(q0, &current)?];
    if cfg.iters == 0 {
        return Ok(Alignment {
            aligned: current,
            pass_distances: distances,
        });
    }
    current = curve::normalize_srvf(&current)?;
    for _ in 0..cfg.iters {
        let (_, rotated) = align_rotation(q0, &current)?;
        let (_, warped) = align_reparam_with(q0, &rotated, cfg)?;
        let d = curve::l2_distance(q0, &warped)?;
        let prev = *distances.last().unwrap();
        if d <= prev {
            current = warped;
            distances.push(d);
        } else {
            distances.push(prev);
        }
        // One-dimensional curves: the rotation step is the identity.
        if d < 1e-12 || q0.dim() == 1 {
            break;
        }
    }
    Ok(Alignment {
        aligned: current,
        pass_distances: distances,
    })
}

/// Tangent representative of `log_{[q0]}([q1])` in the shape quotient:
/// the sphere log map at `q0` toward the aligned representative of `[q1]`.
pub fn log_quotient(q0: &Srvf, q1: &Srvf) -> Result<TangentVector> {
    log_quotient_with(q0, q1, &AlignConfig::default())
}

pub fn log_quotient_with(q0: &Srvf, q1: &Srvf, cfg: &AlignConfig) -> Result<TangentVector> {
    check_same_shape(q0.values(), q1.values())?;
    check_unit(q0, "q0")?;
    if q0 == q1 {
        return Ok(TangentVector::zero(q0));
    }
    let aligned = align_to_with(q0, q1, cfg)?.aligned;
    log_sphere_unchecked(q0, &aligned)
}

/// Per-anchor Gram matrices of quotient log maps.
///
/// Block `i` holds `B^i_{jk} = <log_{[q_i]}([q_j]), log_{[q_i]}([q_k])>`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramTensor {
    blocks: Vec<DMatrix<f64>>,
}

impl GramTensor {
    /// Wraps `N` square `N × N` blocks.
    pub fn new(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = blocks.len();
        if let Some(i) = blocks.iter().position(|b| b.shape() != (n, n)) {
            return Err(Error::ShapeMismatch(format!(
                "block {i} is {}x{}, expected {n}x{n}",
                blocks[i].nrows(),
                blocks[i].ncols()
            )));
        }
        if blocks.iter().any(|b| b.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidParameter("non-finite Gram entry".into()));
        }
        Ok(Self { blocks })
    }

    /// All-zero tensor for `n` curves.
    pub fn zeros(n: usize) -> Self {
        Self {
            blocks: vec![DMatrix::zeros(n, n); n],
        }
    }

    /// Number of curves `N`.
    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &DMatrix<f64> {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// `max_i ||B^i||_F`.
    pub fn max_frobenius(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    /// `max_i ||B^i||_2`; for PSD blocks the largest eigenvalue.
    pub fn max_spectral(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                b.clone()
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(0.0_f64, |m, v| m.max(v.abs()))
            })
            .fold(0.0, f64::max)
    }

    /// Largest asymmetry `|B^i_{jk} - B^i_{kj}|` over all blocks.
    pub fn max_asymmetry(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b - b.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.clone().symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the Gram tensor of a set of unit-norm SRVFs on a shared grid.
pub fn build_gram_tensor(srvfs: &[Srvf]) -> Result<GramTensor> {
    build_gram_tensor_with(srvfs, &AlignConfig::default())
}

pub fn build_gram_tensor_with(srvfs: &[Srvf], cfg: &AlignConfig) -> Result<GramTensor> {
    let n = srvfs.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "Gram tensor needs at least 2 curves, got {n}"
        )));
    }
    for (j, q) in srvfs.iter().enumerate().skip(1) {
        check_same_shape(srvfs[0].values(), q.values())
            .map_err(|e| Error::ShapeMismatch(format!("curve {j}: {e}")))?;
    }
    for (j, q) in srvfs.iter().enumerate() {
        check_unit(q, &format!("curve {j}"))?;
    }
    let blocks = (0..n)
        .into_par_iter()
        .map(|i| anchor_block(srvfs, i, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(GramTensor { blocks })
}

fn anchor_block(srvfs: &[Srvf], anchor: usize, cfg: &AlignConfig) -> Result<DMatrix<f64>> {
    let n = srvfs.len();
    let (len, dim) = (srvfs[0].len(), srvfs[0].dim());
    let h = 1.0 / (len - 1) as f64;
    // Row j holds log_{[q_i]}([q_j]) flattened with sqrt trapezoid weights,
    // so that B^i = V Vᵀ.
    let mut v = DMatrix::<f64>::zeros(n, len * dim);
    for j in 0..n {
        if j == anchor {
            continue;
        }
        let tangent = log_quotient_with(&srvfs[anchor], &srvfs[j], cfg).map_err(|e| match e {
            Error::Antipodal { theta } => Error::AntipodalPair {
                anchor,
                other: j,
                theta,
            },
            other => other,
        })?;
        for d in 0..dim {
            for k in 0..len {
                let w = if k == 0 || k + 1 == len { 0.5 } else { 1.0 };
                v[(j, d * len + k)] = tangent.values()[(k, d)] * (w * h).sqrt();
            }
        }
    }
    let mut b = &v * v.transpose();
    for j in 0..n {
        for k in j + 1..n {
            let s = 0.5 * (b[(j, k)] + b[(k, j)]);
            b[(j, k)] = s;
            b[(k, j)] = s;
        }
    }
    Ok(b)
}
