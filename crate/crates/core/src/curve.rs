//! Discretized curves, their square-root velocity functions (SRVFs), and the
//! L2 Hilbert-space arithmetic used everywhere else in the crate.
//!
//! Every curve lives on a uniform grid over `[0, 1]` with `T >= 3` samples;
//! sample row `k` sits at `t_k = k / (T - 1)`. All integrals over the
//! parameter domain use the trapezoidal rule on that grid.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Floor applied to the speed `||β̇(t)||` inside the SRVF square root.
pub const SRVF_EPS: f64 = 1e-8;

/// Minimum number of samples on any grid.
pub const MIN_SAMPLES: usize = 3;

/// A curve `β: [0, 1] -> R^n` sampled at `T` uniformly spaced parameter values.
///
/// Row `k` of [`Curve::samples`] is `β(t_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    samples: DMatrix<f64>,
}

impl Curve {
    /// Wraps a `T × n` sample matrix, checking `T >= 3`, `n >= 1` and finiteness.
    pub fn new(samples: DMatrix<f64>) -> Result<Self> {
        check_grid_matrix(&samples).map_err(Error::InvalidCurve)?;
        Ok(Self { samples })
    }

    /// Samples `f(t)` on a uniform grid of `len` points. `f` must return `n` values.
    pub fn from_fn(len: usize, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        if len < MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!(
                "need at least {MIN_SAMPLES} samples, got {len}"
            )));
        }
        let mut samples = DMatrix::zeros(len, dim);
        for k in 0..len {
            let row = f(grid_point(k, len));
            if row.len() != dim {
                return Err(Error::InvalidCurve(format!(
                    "sample {k} has {} components, expected {dim}",
                    row.len()
                )));
            }
            for (d, v) in row.into_iter().enumerate() {
                samples[(k, d)] = v;
            }
        }
        Self::new(samples)
    }

    /// Scalar-valued curve (`n = 1`) from a slice of samples.
    pub fn from_scalar(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn into_samples(self) -> DMatrix<f64> {
        self.samples
    }

    /// Number of samples `T`.
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.len())
    }

    /// Evaluates the piecewise-linear interpolant at parameter `t` (clamped to `[0, 1]`).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        interp_row(&self.samples, t)
    }

    /// Arc length `∫ ||β̇(t)|| dt` of the piecewise-linear interpolant.
    pub fn arc_length(&self) -> f64 {
        (1..self.len())
            .map(|k| (self.samples.row(k) - self.samples.row(k - 1)).norm())
            .sum()
    }
}

/// A discretized SRVF `q(t) = β̇(t) / sqrt(||β̇(t)||)` on the same uniform grid
/// as the curve it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Srvf {
    values: DMatrix<f64>,
}

impl Srvf {
    /// Wraps a `T × n` value matrix. No normalization is applied.
    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        check_grid_matrix(&values).map_err(Error::InvalidCurve)?;
        Ok(Self { values })
    }

    /// Samples `f(t)` on a uniform grid. No normalization is applied.
    pub fn from_fn(len: usize, dim: usize, f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        Curve::from_fn(len, dim, f).map(|c| Self {
            values: c.into_samples(),
        })
    }

    /// Crate-internal constructor for values already known to be valid.
    pub(crate) fn from_values_unchecked(values: DMatrix<f64>) -> Self {
        debug_assert!(check_grid_matrix(&values).is_ok());
        Self { values }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.len())
    }

    /// L2 norm `sqrt(∫ ||q(t)||² dt)`.
    pub fn norm(&self) -> f64 {
        trapz_inner(&self.values, &self.values).sqrt()
    }

    /// Evaluates the piecewise-linear interpolant at parameter `t` (clamped to `[0, 1]`).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        interp_row(&self.values, t)
    }
}

fn check_grid_matrix(m: &DMatrix<f64>) -> std::result::Result<(), String> {
    if m.nrows() < MIN_SAMPLES {
        return Err(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            m.nrows()
        ));
    }
    if m.ncols() == 0 {
        return Err("dimension must be at least 1".into());
    }
    if let Some(idx) = m.iter().position(|v| !v.is_finite()) {
        let (row, col) = (idx % m.nrows(), idx / m.nrows());
        return Err(format!("non-finite value at sample {row}, component {col}"));
    }
    Ok(())
}

/// `t_k = k / (len - 1)`.
#[inline]
pub fn grid_point(k: usize, len: usize) -> f64 {
    if k + 1 == len {
        1.0
    } else {
        k as f64 / (len - 1) as f64
    }
}

pub fn uniform_grid(len: usize) -> Vec<f64> {
    (0..len).map(|k| grid_point(k, len)).collect()
}

/// Linear interpolation of the rows of `m` (a function on the uniform grid) at `t`.
pub(crate) fn interp_row(m: &DMatrix<f64>, t: f64) -> Vec<f64> {
    let (lo, hi, frac) = bracket(t, m.nrows());
    (0..m.ncols())
        .map(|d| m[(lo, d)] + frac * (m[(hi, d)] - m[(lo, d)]))
        .collect()
}

/// Locates `t` on a uniform grid of `len` points: `(lo, hi, fraction)`.
#[inline]
pub(crate) fn bracket(t: f64, len: usize) -> (usize, usize, f64) {
    let last = len - 1;
    let pos = t.clamp(0.0, 1.0) * last as f64;
    let lo = (pos.floor() as usize).min(last - 1);
    let frac = pos - lo as f64;
    (lo, lo + 1, frac)
}

/// Trapezoidal `∫ <a(t), b(t)> dt` for two functions on the same uniform grid.
pub(crate) fn trapz_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let len = a.nrows();
    let h = 1.0 / (len - 1) as f64;
    let mut acc = 0.0;
    for d in 0..a.ncols() {
        let (ca, cb) = (a.column(d), b.column(d));
        let mut s = 0.5 * (ca[0] * cb[0] + ca[len - 1] * cb[len - 1]);
        for k in 1..len - 1 {
            s += ca[k] * cb[k];
        }
        acc += s;
    }
    acc * h
}

/// Resamples a curve onto a uniform grid of `new_len` points by linear interpolation.
///
/// Endpoints are preserved exactly; `new_len == curve.len()` returns an identical copy.
pub fn resample(curve: &Curve, new_len: usize) -> Result<Curve> {
    if new_len < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "resample length must be at least {MIN_SAMPLES}, got {new_len}"
        )));
    }
    if new_len == curve.len() {
        return Ok(curve.clone());
    }
    let src = curve.samples();
    let mut out = DMatrix::zeros(new_len, curve.dim());
    for k in 0..new_len {
        if k == 0 {
            out.row_mut(0).copy_from(&src.row(0));
        } else if k + 1 == new_len {
            out.row_mut(k).copy_from(&src.row(src.nrows() - 1));
        } else {
            let row = interp_row(src, grid_point(k, new_len));
            for (d, v) in row.into_iter().enumerate() {
                out[(k, d)] = v;
            }
        }
    }
    Curve::new(out)
}

/// Finite-difference estimate of `β̇` on the curve's own grid.
///
/// Central differences in the interior; second-order one-sided differences at
/// the two endpoints.
pub fn derivative(curve: &Curve) -> DMatrix<f64> {
    let x = curve.samples();
    let len = x.nrows();
    let inv_h = (len - 1) as f64;
    let mut out = DMatrix::zeros(len, x.ncols());
    for d in 0..x.ncols() {
        let c = x.column(d);
        out[(0, d)] = 0.5 * inv_h * (-3.0 * c[0] + 4.0 * c[1] - c[2]);
        for k in 1..len - 1 {
            out[(k, d)] = 0.5 * inv_h * (c[k + 1] - c[k - 1]);
        }
        out[(len - 1, d)] = 0.5 * inv_h * (3.0 * c[len - 1] - 4.0 * c[len - 2] + c[len - 3]);
    }
    out
}

/// Square-root velocity function of a curve, projected to unit L2 norm.
///
/// `eps` floors the speed inside the square root; [`SRVF_EPS`] is the usual choice.
pub fn to_srvf(curve: &Curve, eps: f64) -> Result<Srvf> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "SRVF epsilon must be positive, got {eps}"
        )));
    }
    let mut q = derivative(curve);
    let mut moving = false;
    for mut row in q.row_iter_mut() {
        let speed = row.norm();
        moving |= speed > 0.0;
        row /= speed.max(eps).sqrt();
    }
    if !moving {
        return Err(Error::ConstantCurve);
    }
    normalize_srvf(&Srvf::from_values_unchecked(q))
}

/// Scales `q` to unit L2 norm.
pub fn normalize_srvf(q: &Srvf) -> Result<Srvf> {
    let norm = q.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(Srvf::from_values_unchecked(q.values() / norm))
}

/// Trapezoidal L2 inner product `∫ <q1(t), q2(t)> dt`.
pub fn l2_inner(q1: &Srvf, q2: &Srvf) -> Result<f64> {
    check_same_shape(q1.values(), q2.values())?;
    Ok(trapz_inner(q1.values(), q2.values()))
}

/// L2 distance `||q1 - q2||`.
pub fn l2_distance(q1: &Srvf, q2: &Srvf) -> Result<f64> {
    check_same_shape(q1.values(), q2.values())?;
    let diff = q1.values() - q2.values();
    Ok(trapz_inner(&diff, &diff).max(0.0).sqrt())
}

pub(crate) fn check_same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "grid/dimension {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(len: usize, slope: f64) -> Curve {
        Curve::from_fn(len, 2, |t| vec![slope * t, 0.0]).unwrap()
    }

    #[test]
    fn rejects_short_and_non_finite_curves() {
        assert!(Curve::from_scalar(&[0.0, 1.0]).is_err());
        assert!(Curve::from_scalar(&[0.0, f64::NAN, 1.0]).is_err());
        assert!(Curve::new(DMatrix::zeros(5, 0)).is_err());
    }

    #[test]
    fn resample_reproduces_lines_and_endpoints() {
        let c = Curve::from_fn(5, 2, |t| vec![2.0 * t - 1.0, 0.5 * t]).unwrap();
        let r = resample(&c, 9).unwrap();
        assert_eq!(r.len(), 9);
        assert_eq!(r.samples().row(0), c.samples().row(0));
        assert_eq!(r.samples().row(8), c.samples().row(4));
        for (k, t) in r.grid().into_iter().enumerate() {
            assert!((r.samples()[(k, 0)] - (2.0 * t - 1.0)).abs() < 1e-14);
            assert!((r.samples()[(k, 1)] - 0.5 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn resample_same_length_is_identity() {
        let c = Curve::from_fn(17, 3, |t| vec![t.sin(), t * t, (3.0 * t).cos()]).unwrap();
        assert_eq!(resample(&c, 17).unwrap(), c);
        assert!(resample(&c, 2).is_err());
    }

    #[test]
    fn resample_sine_matches_analytic_values() {
        let c = Curve::from_fn(100, 1, |t| vec![(2.0 * PI * t).sin()]).unwrap();
        let r = resample(&c, 50).unwrap();
        for (k, t) in r.grid().into_iter().enumerate() {
            assert!((r.samples()[(k, 0)] - (2.0 * PI * t).sin()).abs() < 1e-3);
        }
    }

    #[test]
    fn derivative_of_line_and_quadratic() {
        let d = derivative(&line(11, 1.0));
        for k in 0..11 {
            assert!((d[(k, 0)] - 1.0).abs() < 1e-12);
            assert_eq!(d[(k, 1)], 0.0);
        }
        let quad = Curve::from_fn(21, 2, |t| vec![t * t, 0.0]).unwrap();
        let d = derivative(&quad);
        for (k, t) in quad.grid().into_iter().enumerate().skip(1).take(19) {
            assert!((d[(k, 0)] - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine_matches_analytic() {
        let c = Curve::from_fn(200, 1, |t| vec![(2.0 * PI * t).sin()]).unwrap();
        let d = derivative(&c);
        for (k, t) in c.grid().into_iter().enumerate() {
            let exact = 2.0 * PI * (2.0 * PI * t).cos();
            assert!((d[(k, 0)] - exact).abs() < 1e-2, "k={k}");
        }
    }

    #[test]
    fn srvf_of_unit_line_is_constant() {
        let q = to_srvf(&line(50, 1.0), SRVF_EPS).unwrap();
        for k in 0..50 {
            assert!((q.values()[(k, 0)] - 1.0).abs() < 1e-12);
            assert!(q.values()[(k, 1)].abs() < 1e-12);
        }
    }

    #[test]
    fn srvf_is_scale_invariant() {
        let q1 = to_srvf(&line(50, 1.0), SRVF_EPS).unwrap();
        let q2 = to_srvf(&line(50, 2.0), SRVF_EPS).unwrap();
        assert!((q1.values() - q2.values()).amax() < 1e-12);
    }

    #[test]
    fn constant_speed_arc_has_constant_norm_srvf() {
        let c = Curve::from_fn(200, 2, |t| {
            vec![(PI * t).cos() / PI, (PI * t).sin() / PI]
        })
        .unwrap();
        let q = to_srvf(&c, SRVF_EPS).unwrap();
        let norms: Vec<f64> = q.values().row_iter().map(|r| r.norm()).collect();
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        assert!(norms.iter().all(|n| (n - mean).abs() < 1e-3));
    }

    #[test]
    fn constant_curve_is_rejected() {
        let c = Curve::from_fn(10, 2, |_| vec![1.0, -3.0]).unwrap();
        assert!(matches!(to_srvf(&c, SRVF_EPS), Err(Error::ConstantCurve)));
        assert!(to_srvf(&line(10, 1.0), 0.0).is_err());
    }

    #[test]
    fn zero_velocity_samples_are_guarded() {
        // β(t) = (t - 1/2)^2 has β̇ = 0 at the midpoint sample.
        let c = Curve::from_fn(21, 1, |t| vec![(t - 0.5).powi(2)]).unwrap();
        let q = to_srvf(&c, SRVF_EPS).unwrap();
        assert!(q.values().iter().all(|v| v.is_finite()));
        assert!((q.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_and_projective() {
        let q = Srvf::from_fn(100, 2, |t| vec![(5.0 * t).sin() + 0.3, t * t - 0.2]).unwrap();
        let u = normalize_srvf(&q).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-10);
        let uu = normalize_srvf(&u).unwrap();
        assert!((uu.values() - u.values()).amax() < 1e-12);
        let scaled = Srvf::from_values(q.values() * 7.0).unwrap();
        let us = normalize_srvf(&scaled).unwrap();
        assert!((us.values() - u.values()).amax() < 1e-12);
        let zero = Srvf::from_values(DMatrix::zeros(10, 1)).unwrap();
        assert!(matches!(normalize_srvf(&zero), Err(Error::ZeroNorm)));
    }

    #[test]
    fn inner_product_examples() {
        let e1 = Srvf::from_fn(30, 2, |_| vec![1.0, 0.0]).unwrap();
        let e2 = Srvf::from_fn(30, 2, |_| vec![0.0, 1.0]).unwrap();
        assert_eq!(l2_inner(&e1, &e2).unwrap(), 0.0);
        assert!((l2_inner(&e1, &e1).unwrap() - 1.0).abs() < 1e-12);

        let one = Srvf::from_fn(101, 1, |_| vec![1.0]).unwrap();
        let ramp = Srvf::from_fn(101, 1, |t| vec![t]).unwrap();
        assert!((l2_inner(&one, &ramp).unwrap() - 0.5).abs() < 1e-6);

        let short = Srvf::from_fn(31, 2, |_| vec![1.0, 0.0]).unwrap();
        assert!(l2_inner(&e1, &short).is_err());
        let flat = Srvf::from_fn(30, 1, |_| vec![1.0]).unwrap();
        assert!(l2_inner(&e1, &flat).is_err());
    }

    #[test]
    fn bracket_handles_endpoints() {
        assert_eq!(bracket(0.0, 5), (0, 1, 0.0));
        assert_eq!(bracket(1.0, 5), (3, 4, 1.0));
        assert_eq!(bracket(1.5, 5), (3, 4, 1.0));
        let (lo, hi, f) = bracket(0.3, 11);
        assert_eq!((lo, hi), (3, 4));
        assert!(f < 1e-12);
    }
}
