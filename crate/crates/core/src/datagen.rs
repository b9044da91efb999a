//! Synthetic functional datasets: progressively warped sine clusters and
//! randomly shifted/stretched copies of smooth basis curves.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::clustering::Labels;
use crate::curve::{self, Curve};
use crate::error::{Error, Result};
use crate::manifold::{self, Warp};

/// Frequency step between sine clusters: cluster `k` (from 1) oscillates at
/// `k · DEFAULT_BASE_FREQUENCY` cycles over the domain.
pub const DEFAULT_BASE_FREQUENCY: f64 = 1.0;

/// Cap on the local warp amplitude; keeps `γ̇ >= 1 - cap > 0`.
const MAX_LOCAL_AMPLITUDE: f64 = 0.9;

/// A labelled collection of curves on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub curves: Vec<Curve>,
    pub truth: Labels,
    /// Generation parameters and provenance.
    pub meta: BTreeMap<String, Value>,
}

impl Dataset {
    /// Checks `|curves| = |truth|` and a shared `T` and `n`.
    pub fn new(
        name: impl Into<String>,
        curves: Vec<Curve>,
        truth: Labels,
        meta: BTreeMap<String, Value>,
    ) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            curves,
            truth,
            meta,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.curves.is_empty() {
            return Err(Error::Dataset("dataset has no curves".into()));
        }
        if self.curves.len() != self.truth.len() {
            return Err(Error::Dataset(format!(
                "{} curves but {} labels",
                self.curves.len(),
                self.truth.len()
            )));
        }
        let (len, dim) = (self.curves[0].len(), self.curves[0].dim());
        for (i, c) in self.curves.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::Dataset(format!(
                    "curve {i} has dimension {}, expected {dim}",
                    c.dim()
                )));
            }
            if c.len() != len {
                return Err(Error::Dataset(format!(
                    "curve {i} has {} samples, expected {len}",
                    c.len()
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Samples per curve `T`.
    pub fn samples(&self) -> usize {
        self.curves[0].len()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.curves[0].dim()
    }

    pub fn num_clusters(&self) -> usize {
        self.truth.num_clusters()
    }
}

/// Random reparameterization parameters.
///
/// A warp moves a random portion of the domain by a shift drawn from
/// `shift_range` and rescales its length by a factor drawn from
/// `stretch_range`, then composes a smooth oscillating warp of relative
/// amplitude `local_warp_amplitude`.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpSpec {
    pub shift_range: (f64, f64),
    pub stretch_range: (f64, f64),
    pub local_warp_amplitude: f64,
    pub seed: u64,
}

impl WarpSpec {
    /// No warping at all.
    pub fn none(seed: u64) -> Self {
        Self {
            shift_range: (0.0, 0.0),
            stretch_range: (1.0, 1.0),
            local_warp_amplitude: 0.0,
            seed,
        }
    }

    /// Defaults for progressively warped sine clusters.
    pub fn sine_default(seed: u64) -> Self {
        Self {
            shift_range: (-0.1, 0.1),
            stretch_range: (0.625, 1.6),
            local_warp_amplitude: 0.8,
            seed,
        }
    }

    /// Defaults for shifted and stretched copies of smooth bases.
    pub fn basis_default(seed: u64) -> Self {
        Self {
            shift_range: (-0.1, 0.1),
            stretch_range: (0.6, 1.6),
            local_warp_amplitude: 0.3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s0, s1) = self.shift_range;
        let (r0, r1) = self.stretch_range;
        if !(s0 <= s1) || !s0.is_finite() || !s1.is_finite() || s0 < -0.5 || s1 > 0.5 {
            return Err(Error::InvalidParameter(
                "shift range must be an ordered interval within [-0.5, 0.5]".into(),
            ));
        }
        if !(r0 > 0.0 && r0 <= r1 && r1.is_finite()) {
            return Err(Error::InvalidParameter(
                "stretch range must be an ordered interval of positive reals".into(),
            ));
        }
        if !(0.0..=MAX_LOCAL_AMPLITUDE).contains(&self.local_warp_amplitude) {
            return Err(Error::InvalidParameter(format!(
                "local warp amplitude must lie in [0, {MAX_LOCAL_AMPLITUDE}]"
            )));
        }
        Ok(())
    }

    fn meta(&self) -> Value {
        json!({
            "shift_range": [self.shift_range.0, self.shift_range.1],
            "stretch_range": [self.stretch_range.0, self.stretch_range.1],
            "local_warp_amplitude": self.local_warp_amplitude,
            "seed": self.seed,
        })
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Draws a warp from `spec`; `progress` in `[0, 1]` scales the local amplitude.
pub fn sample_warp(len: usize, spec: &WarpSpec, progress: f64, rng: &mut ChaCha8Rng) -> Result<Warp> {
    // Shift/stretch: the input portion [a, b] is displayed over
    // [a + δ, a + δ + s (b - a)] in output coordinates.
    let a = rng.random_range(0.1..0.5);
    let b = (a + rng.random_range(0.2f64..0.4)).min(0.9);
    let shift = uniform(rng, spec.shift_range);
    let stretch = uniform(rng, spec.stretch_range);
    let margin = 0.05;
    let out_len = (stretch * (b - a)).clamp(margin, 1.0 - 2.0 * margin);
    let out_start = (a + shift).clamp(margin, (1.0 - margin - out_len).max(margin));
    let knots_t = [0.0, out_start, out_start + out_len, 1.0];
    let knots_g = [0.0, a, b, 1.0];

    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let freq = rng.random_range(1..=2) as f64;
    let amp = sign * (spec.local_warp_amplitude * progress.clamp(0.0, 1.0)).min(MAX_LOCAL_AMPLITUDE);
    let identity_shift = spec.shift_range == (0.0, 0.0) && spec.stretch_range == (1.0, 1.0);

    let gamma: Vec<f64> = curve::uniform_grid(len)
        .into_iter()
        .map(|t| {
            let local = t + amp * (2.0 * PI * freq * t).sin() / (2.0 * PI * freq);
            if identity_shift {
                local
            } else {
                piecewise(&knots_t, &knots_g, local)
            }
        })
        .collect();
    let mut gamma = gamma;
    gamma[0] = 0.0;
    gamma[len - 1] = 1.0;
    for k in 1..len {
        gamma[k] = gamma[k].max(gamma[k - 1]).min(1.0);
    }
    Warp::new(gamma)
}

fn piecewise(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs
        .windows(2)
        .position(|w| x <= w[1])
        .unwrap_or(xs.len() - 2);
    let (x0, x1, y0, y1) = (xs[k], xs[k + 1], ys[k], ys[k + 1]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// `c` clusters of `per_cluster` scalar sine curves with `len` samples.
/// Cluster `k` oscillates at `(k + 1) · DEFAULT_BASE_FREQUENCY` cycles;
/// instance `j` of a cluster is warped with local amplitude scaled by
/// `j / (per_cluster - 1)`, so the first instance is the unwarped base.
pub fn gen_sine_clusters(c: usize, per_cluster: usize, len: usize, spec: &WarpSpec) -> Result<Dataset> {
    gen_sine_clusters_with(c, per_cluster, len, DEFAULT_BASE_FREQUENCY, spec)
}

pub fn gen_sine_clusters_with(
    c: usize,
    per_cluster: usize,
    len: usize,
    base_frequency: f64,
    spec: &WarpSpec,
) -> Result<Dataset> {
    if c == 0 || per_cluster == 0 {
        return Err(Error::InvalidParameter(
            "need at least one cluster and one curve per cluster".into(),
        ));
    }
    if len < curve::MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "curve length must be at least {}",
            curve::MIN_SAMPLES
        )));
    }
    if !(base_frequency > 0.0) || !base_frequency.is_finite() {
        return Err(Error::InvalidParameter("base frequency must be positive".into()));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut curves = Vec::with_capacity(c * per_cluster);
    let mut truth = Vec::with_capacity(c * per_cluster);
    for k in 0..c {
        let freq = base_frequency * (k + 1) as f64;
        for j in 0..per_cluster {
            let progress = if per_cluster > 1 {
                j as f64 / (per_cluster - 1) as f64
            } else {
                0.0
            };
            let warp = sample_warp(len, spec, progress, &mut rng)?;
            let curve = Curve::from_scalar(
                &warp
                    .values()
                    .iter()
                    .map(|g| (2.0 * PI * freq * g).sin())
                    .collect::<Vec<_>>(),
            )?;
            curves.push(curve);
            truth.push(k);
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("generator".into(), json!("sine"));
    meta.insert("clusters".into(), json!(c));
    meta.insert("per_cluster".into(), json!(per_cluster));
    meta.insert("length".into(), json!(len));
    meta.insert("base_frequency".into(), json!(base_frequency));
    meta.insert("warp".into(), spec.meta());
    Dataset::new(
        format!("sine-c{c}-m{per_cluster}-t{len}-s{}", spec.seed),
        curves,
        Labels::new(truth)?,
        meta,
    )
}

/// `per_cluster` randomly warped copies of each basis curve; the true label
/// of a copy is the index of its basis.
pub fn gen_warped_basis_clusters(bases: &[Curve], per_cluster: usize, spec: &WarpSpec) -> Result<Dataset> {
    if bases.is_empty() || per_cluster == 0 {
        return Err(Error::InvalidParameter(
            "need at least one basis and one copy per basis".into(),
        ));
    }
    let (len, dim) = (bases[0].len(), bases[0].dim());
    if let Some(i) = bases.iter().position(|b| b.len() != len || b.dim() != dim) {
        return Err(Error::ShapeMismatch(format!(
            "basis {i} does not share the grid of basis 0"
        )));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut curves = Vec::with_capacity(bases.len() * per_cluster);
    let mut truth = Vec::with_capacity(bases.len() * per_cluster);
    for (k, base) in bases.iter().enumerate() {
        for _ in 0..per_cluster {
            let warp = sample_warp(len, spec, 1.0, &mut rng)?;
            let copy = if warp.max_deviation() == 0.0 {
                base.clone()
            } else {
                warp.act_on_curve(base)?
            };
            curves.push(copy);
            truth.push(k);
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("generator".into(), json!("warped-basis"));
    meta.insert("clusters".into(), json!(bases.len()));
    meta.insert("per_cluster".into(), json!(per_cluster));
    meta.insert("length".into(), json!(len));
    meta.insert("warp".into(), spec.meta());
    Dataset::new(
        format!("warped-basis-c{}-m{per_cluster}-s{}", bases.len(), spec.seed),
        curves,
        Labels::new(truth)?,
        meta,
    )
}

/// Highest harmonic in [`random_smooth_basis`].
pub const MAX_HARMONICS: usize = 5;

/// Smoothness bound: largest discrete second difference times `T²`.
pub const SMOOTHNESS_BOUND: f64 = 100.0;

/// Random low-frequency Fourier mixture in `R^n`, scaled to unit arc length.
///
/// Draws are rejected until the largest discrete second difference is at
/// most `SMOOTHNESS_BOUND / T²`.
pub fn random_smooth_basis(len: usize, dim: usize, seed: u64) -> Result<Curve> {
    if len < 16 {
        return Err(Error::InvalidParameter(format!(
            "smooth basis needs at least 16 samples, got {len}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let harmonics = rng.random_range(2..=MAX_HARMONICS);
        let coeffs: Vec<Vec<(f64, f64)>> = (0..dim)
            .map(|_| {
                (1..=harmonics)
                    .map(|k| {
                        let scale = 1.0 / (k * k) as f64;
                        (
                            rng.random_range(-1.0..1.0) * scale,
                            rng.random_range(-1.0..1.0) * scale,
                        )
                    })
                    .collect()
            })
            .collect();
        let raw = Curve::from_fn(len, dim, |t| {
            coeffs
                .iter()
                .map(|cs| {
                    cs.iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let w = 2.0 * PI * (k + 1) as f64 * t;
                            a * w.sin() + b * w.cos()
                        })
                        .sum()
                })
                .collect()
        })?;
        let length = raw.arc_length();
        if !(length > 1e-9) {
            continue;
        }
        let curve = Curve::new(raw.samples() / length)?;
        if max_second_difference(&curve) * (len * len) as f64 <= SMOOTHNESS_BOUND {
            return Ok(curve);
        }
    }
}

/// Default minimum pairwise elastic distance for [`well_separated_bases`].
pub const DEFAULT_BASIS_SEPARATION: f64 = 0.5;

/// Elastic shape distance: the length of the quotient-space log map between
/// the normalized SRVFs.
pub fn elastic_distance(a: &Curve, b: &Curve) -> Result<f64> {
    let qa = curve::to_srvf(a, curve::SRVF_EPS)?;
    let qb = curve::to_srvf(b, curve::SRVF_EPS)?;
    Ok(manifold::log_quotient(&qa, &qb)?.norm())
}

/// `count` smooth bases whose pairwise elastic distances are all at least
/// `min_distance`. Candidates come from [`random_smooth_basis`] with seeds
/// drawn from `seed`; gives up after `1000 · count` candidates.
pub fn well_separated_bases(
    count: usize,
    len: usize,
    dim: usize,
    min_distance: f64,
    seed: u64,
) -> Result<Vec<Curve>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bases: Vec<Curve> = Vec::with_capacity(count);
    for _ in 0..1000 * count.max(1) {
        if bases.len() == count {
            break;
        }
        let candidate = random_smooth_basis(len, dim, rng.random())?;
        let mut far = true;
        for b in &bases {
            if elastic_distance(b, &candidate)? < min_distance {
                far = false;
                break;
            }
        }
        if far {
            bases.push(candidate);
        }
    }
    if bases.len() < count {
        return Err(Error::InvalidParameter(format!(
            "could not find {count} bases at elastic distance {min_distance}"
        )));
    }
    Ok(bases)
}

/// Largest absolute discrete second difference over all components.
pub fn max_second_difference(c: &Curve) -> f64 {
    let s = c.samples();
    (1..c.len() - 1)
        .flat_map(|k| (0..c.dim()).map(move |d| (s[(k + 1, d)] - 2.0 * s[(k, d)] + s[(k - 1, d)]).abs()))
        .fold(0.0, f64::max)
}

/// Distance between two curves after scaling each to unit L2 norm.
pub fn normalized_distance(a: &Curve, b: &Curve) -> Result<f64> {
    let qa = curve::Srvf::from_values(a.samples().clone())?;
    let qb = curve::Srvf::from_values(b.samples().clone())?;
    let (na, nb) = (curve::normalize_srvf(&qa)?, curve::normalize_srvf(&qb)?);
    curve::l2_distance(&na, &nb)
}
