//! Method pipelines and the repeated benchmark harness behind the CLI.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::baselines::{self, DtwConfig, LrrConfig, SigmaRule};
use crate::clustering::{self, Labels};
use crate::curve::{self, Curve};
use crate::datagen::{self, Dataset, WarpSpec};
use crate::error::{Error, Result};
use crate::manifold::{self, AlignConfig};
use crate::solver::{self, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Kmeans,
    Dtw,
    Lrr,
    Clrr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Kmeans, Method::Dtw, Method::Lrr, Method::Clrr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kmeans => "kmeans",
            Method::Dtw => "dtw",
            Method::Lrr => "lrr",
            Method::Clrr => "clrr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method {s:?} (expected kmeans, dtw, lrr or clrr)"
                ))
            })
    }
}

/// Parses a comma-separated method list; `all` selects every method.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    let mut methods: Vec<Method> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let m = part.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("empty method list".into()));
    }
    Ok(methods)
}

/// Settings shared by all method pipelines.
#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub lrr: LrrConfig,
    pub dtw: DtwConfig,
    pub sigma: Option<f64>,
    pub align: AlignConfig,
    /// Zero the diagonal of the LRR coefficient matrix before spectral
    /// clustering.
    pub zero_diagonal: bool,
}

impl PipelineConfig {
    /// Sets λ for both cLRR and Euclidean LRR.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.solver.lambda = lambda;
        self.lrr.lambda = lambda;
        self
    }

    fn sigma_rule(&self) -> SigmaRule {
        self.sigma.map_or(SigmaRule::Median, SigmaRule::Fixed)
    }
}

/// Optional JSON settings file; flags override it and it overrides defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambda: Option<f64>,
    pub dtw_window: Option<f64>,
    pub dtw_sigma: Option<f64>,
    pub beta0: Option<f64>,
    pub beta_max: Option<f64>,
    pub rho0: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub max_iters: Option<usize>,
    pub align_iters: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn apply(&self, mut cfg: PipelineConfig) -> Result<PipelineConfig> {
        if let Some(l) = self.lambda {
            cfg = cfg.with_lambda(l);
        }
        if let Some(w) = self.dtw_window {
            cfg.dtw = DtwConfig::new(w)?;
        }
        cfg.sigma = self.dtw_sigma.or(cfg.sigma);
        let s = &mut cfg.solver;
        s.beta0 = self.beta0.unwrap_or(s.beta0);
        s.beta_max = self.beta_max.unwrap_or(s.beta_max);
        s.rho0 = self.rho0.unwrap_or(s.rho0);
        s.eps1 = self.eps1.unwrap_or(s.eps1);
        s.eps2 = self.eps2.unwrap_or(s.eps2);
        s.max_iters = self.max_iters.unwrap_or(s.max_iters);
        cfg.lrr.eps1 = s.eps1;
        cfg.lrr.eps2 = s.eps2;
        cfg.lrr.max_iters = s.max_iters;
        cfg.align.iters = self.align_iters.unwrap_or(cfg.align.iters);
        Ok(cfg)
    }
}

#[derive(Clone, Debug)]
pub struct MethodOutput {
    pub labels: Labels,
    /// Solver iterations, for the LRR-type methods.
    pub iters: Option<usize>,
    pub converged: Option<bool>,
}

/// Runs one method end to end, from raw curves to `c` cluster labels.
pub fn run_method(
    method: Method,
    curves: &[Curve],
    c: usize,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<MethodOutput> {
    if c == 0 || c > curves.len() {
        return Err(Error::InvalidParameter(format!(
            "cluster count {c} must be in [1, {}]",
            curves.len()
        )));
    }
    let plain = |labels| MethodOutput {
        labels,
        iters: None,
        converged: None,
    };
    match method {
        Method::Kmeans => {
            let x = baselines::flatten_all(curves)?;
            Ok(plain(baselines::kmeans(&x, c, seed)?))
        }
        Method::Dtw => {
            let a = baselines::dtw_affinity(curves, &cfg.dtw, cfg.sigma_rule())?;
            Ok(plain(clustering::spectral_cluster(&a, c, seed)?))
        }
        Method::Lrr => {
            let x = baselines::flatten_all(curves)?.transpose();
            let report = baselines::euclidean_lrr(&x, &cfg.lrr)?;
            let a = coefficient_affinity(report.z, cfg.zero_diagonal)?;
            Ok(MethodOutput {
                labels: clustering::spectral_cluster(&a, c, seed)?,
                iters: Some(report.iters),
                converged: Some(report.converged),
            })
        }
        Method::Clrr => {
            let srvfs = curves
                .iter()
                .map(|cv| curve::to_srvf(cv, curve::SRVF_EPS))
                .collect::<Result<Vec<_>>>()?;
            let gram = manifold::build_gram_tensor_with(&srvfs, &cfg.align)?;
            let report = solver::solve(&gram, &cfg.solver)?;
            if !report.converged {
                log::warn!(
                    "cLRR stopped after {} iterations without converging (residual {:e})",
                    report.iters,
                    report.primal_residual
                );
            }
            let a = coefficient_affinity(report.w, cfg.zero_diagonal)?;
            Ok(MethodOutput {
                labels: clustering::spectral_cluster(&a, c, seed)?,
                iters: Some(report.iters),
                converged: Some(report.converged),
            })
        }
    }
}

fn coefficient_affinity(mut w: DMatrix<f64>, zero_diagonal: bool) -> Result<clustering::Affinity> {
    if zero_diagonal {
        w.fill_diagonal(0.0);
    }
    clustering::symmetrize(&w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Sine,
    WarpedBasis,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Sine => "sine",
            DatasetKind::WarpedBasis => "warped-basis",
        }
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(DatasetKind::Sine),
            "warped-basis" => Ok(DatasetKind::WarpedBasis),
            _ => Err(Error::InvalidParameter(format!(
                "unknown dataset kind {s:?} (expected sine or warped-basis)"
            ))),
        }
    }
}

/// Dataset generation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerateParams {
    pub kind: DatasetKind,
    pub clusters: usize,
    pub per_cluster: usize,
    pub length: usize,
    /// Ambient dimension of warped-basis curves; sine curves are scalar.
    pub dim: usize,
    pub seed: u64,
}

impl GenerateParams {
    pub fn sine(clusters: usize, per_cluster: usize, length: usize, seed: u64) -> Self {
        Self {
            kind: DatasetKind::Sine,
            clusters,
            per_cluster,
            length,
            dim: 1,
            seed,
        }
    }

    pub fn warped_basis(clusters: usize, per_cluster: usize, length: usize, seed: u64) -> Self {
        Self {
            kind: DatasetKind::WarpedBasis,
            ..Self::sine(clusters, per_cluster, length, seed)
        }
    }
}

/// Generates the dataset described by `params`.
pub fn generate(params: &GenerateParams) -> Result<Dataset> {
    match params.kind {
        DatasetKind::Sine => datagen::gen_sine_clusters(
            params.clusters,
            params.per_cluster,
            params.length,
            &WarpSpec::sine_default(params.seed),
        ),
        DatasetKind::WarpedBasis => {
            let bases = datagen::well_separated_bases(
                params.clusters,
                params.length,
                params.dim,
                datagen::DEFAULT_BASIS_SEPARATION,
                params.seed,
            )?;
            let mut ds = datagen::gen_warped_basis_clusters(
                &bases,
                params.per_cluster,
                &WarpSpec::basis_default(params.seed),
            )?;
            ds.meta.insert("basis_seed".into(), params.seed.into());
            ds.meta.insert(
                "basis_separation".into(),
                datagen::DEFAULT_BASIS_SEPARATION.into(),
            );
            Ok(ds)
        }
    }
}

/// One method on one repeat.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub repeat: usize,
    pub seed: u64,
    pub sca: f64,
    pub runtime_seconds: f64,
    pub iters: Option<usize>,
    pub converged: Option<bool>,
    /// Set when the method failed; the run then counts with SCA 0.
    pub error: Option<String>,
}

/// Mean, median, max, min and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub min: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("summary of no values".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        Ok(Self {
            mean,
            median,
            max: sorted[sorted.len() - 1],
            min: sorted[0],
            std: var.sqrt(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkResult {
    pub method: Method,
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
    pub mean_runtime: f64,
}

impl BenchmarkResult {
    pub fn from_runs(method: Method, runs: Vec<RunRecord>) -> Result<Self> {
        let scas: Vec<f64> = runs.iter().map(|r| r.sca).collect();
        let summary = Summary::of(&scas)?;
        let mean_runtime = runs.iter().map(|r| r.runtime_seconds).sum::<f64>() / runs.len() as f64;
        Ok(Self {
            method,
            runs,
            summary,
            mean_runtime,
        })
    }
}

/// Runs every method on `repeats` fresh datasets; repeat `r` uses seed
/// `params.seed + r` for both generation and clustering.
pub fn run_benchmark(
    params: &GenerateParams,
    methods: &[Method],
    repeats: usize,
    cfg: &PipelineConfig,
) -> Result<Vec<BenchmarkResult>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods selected".into()));
    }
    let mut runs: Vec<Vec<RunRecord>> = vec![Vec::with_capacity(repeats); methods.len()];
    for r in 0..repeats {
        let seed = params.seed.wrapping_add(r as u64);
        let ds = generate(&GenerateParams { seed, ..params.clone() })?;
        for (m, &method) in methods.iter().enumerate() {
            let start = Instant::now();
            let outcome = run_method(method, &ds.curves, params.clusters, cfg, seed)
                .and_then(|out| Ok((clustering::sca(&out.labels, &ds.truth)?, out)));
            let runtime_seconds = start.elapsed().as_secs_f64();
            let record = match outcome {
                Ok((sca, out)) => RunRecord {
                    repeat: r,
                    seed,
                    sca,
                    runtime_seconds,
                    iters: out.iters,
                    converged: out.converged,
                    error: None,
                },
                Err(e) => {
                    log::warn!("{method} failed on repeat {r}: {e}");
                    RunRecord {
                        repeat: r,
                        seed,
                        sca: 0.0,
                        runtime_seconds,
                        iters: None,
                        converged: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            log::info!(
                "repeat {r} {method}: SCA {:.4} in {:.2}s",
                record.sca,
                record.runtime_seconds
            );
            runs[m].push(record);
        }
    }
    methods
        .iter()
        .zip(runs)
        .map(|(&m, r)| BenchmarkResult::from_runs(m, r))
        .collect()
}

/// Plain-text table: SCA mean, median, max, min and std in percent, plus
/// mean run time.
pub fn format_table(results: &[BenchmarkResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>18}",
        "Method", "Mean", "Median", "Max", "Min", "Std", "Mean Run Time (s)"
    );
    for r in results {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{:<8} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>18.3}",
            r.method.name(),
            100.0 * s.mean,
            100.0 * s.median,
            100.0 * s.max,
            100.0 * s.min,
            100.0 * s.std,
            r.mean_runtime
        );
    }
    out
}

/// Per-run CSV without timings, so it is identical across identical runs.
pub fn runs_csv(results: &[BenchmarkResult]) -> String {
    let mut out = String::from("method,repeat,seed,sca,iters,converged,status\n");
    for r in results {
        for run in &r.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method,
                run.repeat,
                run.seed,
                run.sca,
                run.iters.map_or(String::new(), |i| i.to_string()),
                run.converged.map_or(String::new(), |c| c.to_string()),
                if run.error.is_some() { "failed" } else { "ok" }
            );
        }
    }
    out
}

/// SCA summary per method, in `[0, 1]`.
pub fn summary_csv(results: &[BenchmarkResult]) -> String {
    let mut out = String::from("method,mean,median,max,min,std\n");
    for r in results {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method, s.mean, s.median, s.max, s.min, s.std
        );
    }
    out
}

pub fn timings_csv(results: &[BenchmarkResult]) -> String {
    let mut out = String::from("method,repeat,runtime_seconds\n");
    for r in results {
        for run in &r.runs {
            let _ = writeln!(out, "{},{},{}", r.method, run.repeat, run.runtime_seconds);
        }
    }
    out
}

/// Writes `table.txt`, `runs.csv`, `summary.csv` and `timings.csv` into `dir`.
pub fn write_benchmark(results: &[BenchmarkResult], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("table.txt", format_table(results)),
        ("runs.csv", runs_csv(results)),
        ("summary.csv", summary_csv(results)),
        ("timings.csv", timings_csv(results)),
    ];
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("ssc".parse::<Method>().is_err());
        assert_eq!(parse_methods("clrr, lrr,clrr").unwrap(), vec![Method::Clrr, Method::Lrr]);
        assert_eq!(parse_methods("all").unwrap().len(), 4);
        assert!(parse_methods(",").is_err());
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(s.mean, 0.8125);
        assert_eq!(s.median, 0.875);
        assert_eq!((s.max, s.min), (1.0, 0.5));
        assert!((s.std - 0.04296875f64.sqrt()).abs() < 1e-15);
        assert_eq!(Summary::of(&[0.9]).unwrap().std, 0.0);
        assert!(Summary::of(&[]).is_err());
    }

    #[test]
    fn kmeans_dispatch_on_unwarped_sines() {
        let ds = generate(&GenerateParams::sine(2, 5, 40, 1)).unwrap();
        let out = run_method(Method::Kmeans, &ds.curves, 2, &PipelineConfig::default(), 0).unwrap();
        assert_eq!(out.labels.len(), 10);
        assert!(out.iters.is_none());
        assert!(run_method(Method::Kmeans, &ds.curves, 11, &PipelineConfig::default(), 0).is_err());
    }

    #[test]
    fn failed_runs_count_as_zero() {
        let params = GenerateParams::sine(2, 2, 20, 3);
        let mut cfg = PipelineConfig::default();
        cfg.lrr.lambda = -1.0;
        let results = run_benchmark(&params, &[Method::Lrr, Method::Kmeans], 2, &cfg).unwrap();
        assert!(results[0].runs.iter().all(|r| r.sca == 0.0 && r.error.is_some()));
        assert!(results[1].runs.iter().all(|r| r.error.is_none()));
        assert_eq!(runs_csv(&results).lines().count(), 1 + 2 * 2);
    }

    #[test]
    fn config_file_overrides_defaults() {
        let file: ConfigFile = serde_json::from_str(r#"{"lambda": 0.5, "max_iters": 50}"#).unwrap();
        let cfg = file.apply(PipelineConfig::default()).unwrap();
        assert_eq!(cfg.solver.lambda, 0.5);
        assert_eq!(cfg.lrr.lambda, 0.5);
        assert_eq!(cfg.solver.max_iters, 50);
        assert_eq!(cfg.dtw, DtwConfig::default());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"lamda": 1}"#).is_err());
    }
}
