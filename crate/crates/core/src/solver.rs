//! Linearized alternating-direction solver with adaptive penalty for the
//! curve low-rank representation
//!
//! ```text
//! min_W  λ ||W||_* + ½ Σ_i w_i B^i w_iᵀ    s.t.  W 1 = 1
//! ```
//!
//! where `w_i` is row `i` of `W` and `B^i` is block `i` of a [`GramTensor`].
//! Each iteration linearizes the smooth part of the augmented Lagrangian at
//! the current iterate and solves the resulting proximal problem in closed
//! form with singular value thresholding.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::manifold::GramTensor;

/// Parameters of the cLRR solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Nuclear-norm weight λ.
    pub lambda: f64,
    /// Initial penalty β₀.
    pub beta0: f64,
    pub beta_max: f64,
    /// Penalty growth factor applied once steps become small.
    pub rho0: f64,
    /// Tolerance on `β_k ||W_{k+1} - W_k||_F`.
    pub eps1: f64,
    /// Tolerance on `||W 1 - 1||`.
    pub eps2: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            beta0: 0.1,
            beta_max: 10.0,
            rho0: 1.1,
            eps1: 1e-4,
            eps2: 1e-4,
            max_iters: 500,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad("lambda must be a finite nonnegative number");
        }
        if !(self.beta0 > 0.0) || !(self.beta_max >= self.beta0) || !self.beta_max.is_finite() {
            return bad("need 0 < beta0 <= beta_max < inf");
        }
        if !(self.rho0 > 1.0) {
            return bad("rho0 must exceed 1");
        }
        if !(self.eps1 > 0.0) || !(self.eps2 > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        Ok(())
    }
}

/// Iterate of the solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    /// Coefficient matrix.
    pub w: DMatrix<f64>,
    /// Multiplier of the row-sum constraint `W 1 = 1`.
    pub y: DVector<f64>,
    pub beta: f64,
    /// Linearization constant η.
    pub eta: f64,
    pub iter: usize,
}

impl SolverState {
    /// `W = 0`, `y = 0`, `β = β₀`, and
    /// `η = max(max_i ||B^i||_F, max_i ||B^i||_2²) + N + 1`.
    pub fn initial(gram: &GramTensor, cfg: &SolverConfig) -> Self {
        let n = gram.size();
        let spectral = gram.max_spectral();
        let eta = gram.max_frobenius().max(spectral * spectral) + n as f64 + 1.0;
        Self {
            w: DMatrix::zeros(n, n),
            y: DVector::zeros(n),
            beta: cfg.beta0,
            eta,
            iter: 0,
        }
    }
}

/// Outcome of [`solve`].
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub w: DMatrix<f64>,
    pub iters: usize,
    /// `||W 1 - 1||` at the returned iterate.
    pub primal_residual: f64,
    pub converged: bool,
    /// `λ ||W||_* + ½ Σ w_i B^i w_iᵀ` after every iteration.
    pub objective_trace: Vec<f64>,
    /// Penalty β used in every iteration.
    pub beta_trace: Vec<f64>,
}

fn row_sum_residual(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.nrows();
    let mut r = DVector::from_element(n, -1.0);
    for i in 0..n {
        r[i] += w.row(i).sum();
    }
    r
}

fn check_dims(w: &DMatrix<f64>, gram: &GramTensor) -> Result<()> {
    let n = gram.size();
    if w.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "coefficient matrix is {}x{}, Gram tensor has {n} blocks",
            w.nrows(),
            w.ncols()
        )));
    }
    Ok(())
}

/// Gradient of the smooth part of the augmented Lagrangian,
/// `W ⊙ B + y 1ᵀ + β (W 1 - 1) 1ᵀ`, where row `i` of `W ⊙ B` is `w_i B^i`.
pub fn gradient_f(state: &SolverState, gram: &GramTensor) -> Result<DMatrix<f64>> {
    check_dims(&state.w, gram)?;
    if state.y.len() != gram.size() {
        return Err(Error::ShapeMismatch(format!(
            "multiplier has length {}, expected {}",
            state.y.len(),
            gram.size()
        )));
    }
    let n = gram.size();
    let r = row_sum_residual(&state.w);
    let mut grad = DMatrix::zeros(n, n);
    for i in 0..n {
        let wb = state.w.row(i) * gram.block(i);
        let shift = state.y[i] + state.beta * r[i];
        for j in 0..n {
            grad[(i, j)] = wb[j] + shift;
        }
    }
    Ok(grad)
}

/// Smooth part of the augmented Lagrangian:
/// `½ Σ_i w_i B^i w_iᵀ + <y, W 1 - 1> + β/2 ||W 1 - 1||²`.
pub fn smooth_objective(state: &SolverState, gram: &GramTensor) -> f64 {
    let r = row_sum_residual(&state.w);
    fit_term(&state.w, gram) + state.y.dot(&r) + 0.5 * state.beta * r.norm_squared()
}

/// `½ Σ_i w_i B^i w_iᵀ`.
pub fn fit_term(w: &DMatrix<f64>, gram: &GramTensor) -> f64 {
    (0..gram.size())
        .map(|i| {
            let row = w.row(i);
            0.5 * (row * gram.block(i) * row.transpose())[(0, 0)]
        })
        .sum()
}

/// Nuclear norm (sum of singular values).
pub fn nuclear_norm(m: &DMatrix<f64>) -> Result<f64> {
    m.clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .map(|s| s.singular_values.sum())
        .ok_or(Error::SvdFailure)
}

/// Singular value thresholding: the proximal operator of `τ ||·||_*`.
pub fn svt(m: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    svt_with_norm(m, tau).map(|(x, _)| x)
}

/// [`svt`] also returning the nuclear norm of the result.
pub fn svt_with_norm(m: &DMatrix<f64>, tau: f64) -> Result<(DMatrix<f64>, f64)> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be nonnegative, got {tau}"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("SVT input is not finite".into()));
    }
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure)?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SvdFailure),
    };
    let shrunk = svd.singular_values.map(|s| (s.abs() - tau).max(0.0));
    let norm = shrunk.sum();
    let mut scaled_u = u;
    for (mut col, s) in scaled_u.column_iter_mut().zip(shrunk.iter()) {
        col *= *s;
    }
    Ok((scaled_u * v_t, norm))
}

/// One linearized proximal step:
/// `svt(W - ∂F / (η β), λ / (η β))`.
pub fn update_w(state: &SolverState, gram: &GramTensor, cfg: &SolverConfig) -> Result<DMatrix<f64>> {
    update_w_with_norm(state, gram, cfg).map(|(w, _)| w)
}

fn update_w_with_norm(
    state: &SolverState,
    gram: &GramTensor,
    cfg: &SolverConfig,
) -> Result<(DMatrix<f64>, f64)> {
    let step = state.eta * state.beta;
    let grad = gradient_f(state, gram)?;
    let target = &state.w - grad / step;
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            iter: state.iter,
            primal_residual: row_sum_residual(&state.w).norm(),
            step,
        });
    }
    svt_with_norm(&target, cfg.lambda / step)
}

/// Runs the solver from `W = 0` until both stopping rules hold or
/// `max_iters` is reached (reported as `converged = false`).
pub fn solve(gram: &GramTensor, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let mut state = SolverState::initial(gram, cfg);
    let mut objective_trace = Vec::new();
    let mut beta_trace = Vec::new();
    let mut converged = false;
    let mut residual = row_sum_residual(&state.w).norm();

    while state.iter < cfg.max_iters {
        let (w_next, nuclear) = update_w_with_norm(&state, gram, cfg)?;
        let change = (&w_next - &state.w).norm();
        let r = row_sum_residual(&w_next);
        residual = r.norm();
        if !change.is_finite() || !residual.is_finite() {
            return Err(Error::NonFinite {
                iter: state.iter,
                primal_residual: residual,
                step: change,
            });
        }
        beta_trace.push(state.beta);
        objective_trace.push(cfg.lambda * nuclear + fit_term(&w_next, gram));
        state.iter += 1;

        let small_step = state.beta * change <= cfg.eps1;
        state.w = w_next;
        if small_step && residual <= cfg.eps2 {
            converged = true;
            break;
        }
        state.y += &r * state.beta;
        let rho = if small_step { cfg.rho0 } else { 1.0 };
        state.beta = (rho * state.beta).min(cfg.beta_max);
    }

    Ok(SolveReport {
        w: state.w,
        iters: state.iter,
        primal_residual: residual,
        converged,
        objective_trace,
        beta_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gram(n: usize, rng: &mut ChaCha8Rng) -> GramTensor {
        let blocks = (0..n)
            .map(|i| {
                let v = DMatrix::from_fn(n, 2 * n, |j, _| {
                    if j == i {
                        0.0
                    } else {
                        rng.random_range(-1.0..1.0)
                    }
                });
                &v * v.transpose()
            })
            .collect();
        GramTensor::new(blocks).unwrap()
    }

    fn random_state(n: usize, gram: &GramTensor, rng: &mut ChaCha8Rng) -> SolverState {
        let mut s = SolverState::initial(gram, &SolverConfig::default());
        s.w = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        s.y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        s.beta = rng.random_range(0.1..10.0);
        s
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig { lambda: -1.0, ..Default::default() },
            SolverConfig { beta0: 20.0, ..Default::default() },
            SolverConfig { rho0: 1.0, ..Default::default() },
            SolverConfig { eps1: 0.0, ..Default::default() },
            SolverConfig { max_iters: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn eta_dominates_both_norm_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_gram(5, &mut rng);
        let s = SolverState::initial(&g, &SolverConfig::default());
        assert!(s.eta >= g.max_frobenius() + 6.0);
        assert!(s.eta >= g.max_spectral().powi(2) + 6.0);
    }

    #[test]
    fn gradient_at_origin_is_minus_beta() {
        let g = GramTensor::zeros(4);
        let s = SolverState::initial(&g, &SolverConfig::default());
        let grad = gradient_f(&s, &g).unwrap();
        assert!(grad.iter().all(|&v| (v + 0.1).abs() < 1e-15));
    }

    #[test]
    fn gradient_vanishes_at_feasible_point_without_data() {
        let g = GramTensor::zeros(3);
        let mut s = SolverState::initial(&g, &SolverConfig::default());
        s.w = DMatrix::from_row_slice(3, 3, &[0.2, 0.3, 0.5, 1.0, 0.0, 0.0, -1.0, 1.5, 0.5]);
        let grad = gradient_f(&s, &g).unwrap();
        assert!(grad.amax() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_gram(4, &mut rng);
        let s = random_state(4, &g, &mut rng);
        let grad = gradient_f(&s, &g).unwrap();
        let h = 1e-6;
        for i in 0..4 {
            for j in 0..4 {
                let mut plus = s.clone();
                plus.w[(i, j)] += h;
                let mut minus = s.clone();
                minus.w[(i, j)] -= h;
                let fd = (smooth_objective(&plus, &g) - smooth_objective(&minus, &g)) / (2.0 * h);
                let rel = (fd - grad[(i, j)]).abs() / grad[(i, j)].abs().max(1.0);
                assert!(rel < 1e-4, "({i},{j}) fd={fd} grad={}", grad[(i, j)]);
            }
        }
    }

    #[test]
    fn gradient_rejects_wrong_shapes() {
        let g = GramTensor::zeros(3);
        let mut s = SolverState::initial(&g, &SolverConfig::default());
        s.w = DMatrix::zeros(2, 2);
        assert!(gradient_f(&s, &g).is_err());
    }

    #[test]
    fn svt_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
        assert!((svt(&m, 0.0).unwrap() - &m).amax() < 1e-10);

        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0]));
        let out = svt(&d, 2.0).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((out - want).amax() < 1e-12);

        assert!(svt(&m, -0.1).is_err());
        let mut bad = m.clone();
        bad[(0, 0)] = f64::NAN;
        assert!(svt(&bad, 0.1).is_err());
    }

    #[test]
    fn svt_norm_matches_nuclear_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-2.0..2.0));
        let (x, norm) = svt_with_norm(&m, 0.7).unwrap();
        assert!((nuclear_norm(&x).unwrap() - norm).abs() < 1e-10);
        assert!(norm <= nuclear_norm(&m).unwrap());
    }

    #[test]
    fn update_without_threshold_is_gradient_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = random_gram(4, &mut rng);
        let s = random_state(4, &g, &mut rng);
        let cfg = SolverConfig { lambda: 0.0, ..Default::default() };
        let w = update_w(&s, &g, &cfg).unwrap();
        let step = &s.w - gradient_f(&s, &g).unwrap() / (s.eta * s.beta);
        assert!((w - step).amax() < 1e-10);
    }

    #[test]
    fn update_composes_svt_and_gradient_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let g = random_gram(4, &mut rng);
        let s = random_state(4, &g, &mut rng);
        let cfg = SolverConfig::default();
        let w = update_w(&s, &g, &cfg).unwrap();
        let scale = s.eta * s.beta;
        let step = &s.w - gradient_f(&s, &g).unwrap() / scale;
        let want = svt(&step, cfg.lambda / scale).unwrap();
        assert!((w - want).amax() < 1e-12);
    }

    #[test]
    fn huge_lambda_thresholds_everything() {
        let g = GramTensor::zeros(4);
        let mut s = SolverState::initial(&g, &SolverConfig::default());
        s.w = DMatrix::from_element(4, 4, 0.25);
        let cfg = SolverConfig {
            lambda: s.eta * s.beta * 4.0 * 10.0,
            ..Default::default()
        };
        assert_eq!(update_w(&s, &g, &cfg).unwrap().amax(), 0.0);
    }

    #[test]
    fn zero_gram_converges_to_feasible_point() {
        let g = GramTensor::zeros(6);
        let report = solve(&g, &SolverConfig::default()).unwrap();
        assert!(report.converged, "iters {}", report.iters);
        assert!(report.primal_residual <= 1e-4);
        assert_eq!(report.objective_trace.len(), report.iters);
        for pair in report.beta_trace.windows(2) {
            assert!(pair[1] >= pair[0] && pair[1] <= 10.0);
        }
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_gram(5, &mut rng);
        let cfg = SolverConfig { max_iters: 3, ..Default::default() };
        let report = solve(&g, &cfg).unwrap();
        assert_eq!(report.iters, 3);
        assert!(!report.converged);
    }
}
