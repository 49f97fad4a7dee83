use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{
    build_majoranas, build_string_basis, MajoranaSet, OperatorVector, Parity, StringBasis,
};
use crate::bilanczos::{bi_lanczos, BiLanczosOptions, KrylovData, TerminationReason};
use crate::error::{Error, Result};
use crate::lindblad::build_full;
use crate::observables::{
    evolve_full, krylov_complexity_with, krylov_complexity_with_residue, krylov_population,
    krylov_projections, population_distribution, spread_complexity, PopulationConvention, TimeGrid,
};
use crate::syk::{build_hamiltonian, sample_couplings, DisorderSpec};
use crate::C64;

use super::config::{BasisKind, ExperimentConfig, InitialOperator};

/// Largest fraction of failed realizations tolerated per `μ`.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

/// Observables of one disorder realization at one `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    /// `μ/J` as configured.
    pub mu: f64,
    pub realization: usize,
    pub dim: usize,
    pub termination: TerminationReason,
    pub k: Vec<f64>,
    pub c_krylov: Option<Vec<f64>>,
    pub c_string: Option<Vec<f64>>,
    pub norm: Vec<f64>,
    pub a: Vec<C64>,
    pub b: Vec<f64>,
    pub c: Vec<C64>,
    /// Largest `|Im K(t)|` before taking the real part.
    pub max_k_residue: f64,
    pub biorthogonality_error: f64,
}

/// A realization dropped after a numerical failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Exclusion {
    pub mu: f64,
    pub realization: usize,
    pub reason: String,
}

/// Mean, unbiased variance and sample count at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub count: usize,
}

/// Ensemble statistics for one `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuSummary {
    pub mu: f64,
    pub k: SeriesStats,
    pub c_krylov: Option<SeriesStats>,
    pub c_string: Option<SeriesStats>,
    pub norm: SeriesStats,
    pub mk_mean: f64,
    pub mk_var: f64,
    pub n_success: usize,
    pub n_excluded: usize,
    pub terminations: BTreeMap<String, usize>,
    pub max_k_residue: f64,
    pub max_biorthogonality_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultsBundle {
    pub config: ExperimentConfig,
    pub version: String,
    /// Grid in units of `Jt`.
    pub times: Vec<f64>,
    pub summaries: Vec<MuSummary>,
    /// Successful realizations ordered by `(μ, realization)`.
    pub realizations: Vec<RealizationResult>,
    pub exclusions: Vec<Exclusion>,
}

impl ResultsBundle {
    pub fn empty(config: ExperimentConfig) -> Self {
        Self {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            times: vec![],
            summaries: vec![],
            realizations: vec![],
            exclusions: vec![],
        }
    }

    pub fn summary(&self, mu: f64) -> Option<&MuSummary> {
        self.summaries.iter().find(|s| s.mu == mu)
    }
}

/// Settings outside the config file. `workers` never changes results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    pub lanczos: BiLanczosOptions,
    pub convention: PopulationConvention,
}

/// Everything shared by the per-realization pipelines of one run.
pub struct Pipeline {
    config: ExperimentConfig,
    spec: DisorderSpec,
    majoranas: MajoranaSet,
    sector: StringBasis,
    x0: OperatorVector,
    grid: TimeGrid,
    lanczos: BiLanczosOptions,
    convention: PopulationConvention,
}

impl Pipeline {
    pub fn new(config: &ExperimentConfig, lanczos: BiLanczosOptions) -> Result<Self> {
        config.validate()?;
        let majoranas = build_majoranas(config.n_fermions)?;
        let x0_spec: InitialOperator = config.initial_operator.parse()?;
        let x0 = x0_spec.build(&majoranas)?;
        let parity = if x0_spec.string().is_odd() {
            Parity::Odd
        } else {
            Parity::Even
        };
        let sector = build_string_basis(&majoranas, parity)?;
        let grid = TimeGrid::linear(config.t_max / config.coupling, config.n_times)?;
        Ok(Self {
            spec: config.disorder()?,
            config: config.clone(),
            majoranas,
            sector,
            x0,
            grid,
            lanczos,
            convention: PopulationConvention::default(),
        })
    }

    /// Convention for Krylov-chain populations and `K`.
    pub fn with_convention(mut self, convention: PopulationConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn majoranas(&self) -> &MajoranaSet {
        &self.majoranas
    }

    pub fn sector(&self) -> &StringBasis {
        &self.sector
    }

    pub fn initial_operator(&self) -> &OperatorVector {
        &self.x0
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    /// Grid in units of `Jt`.
    pub fn times(&self) -> Vec<f64> {
        self.grid
            .times()
            .iter()
            .map(|t| t * self.config.coupling)
            .collect()
    }

    pub fn superoperator(&self, realization: usize, mu: f64) -> Result<crate::Superoperator> {
        let couplings = sample_couplings(&self.spec, realization)?;
        let h = build_hamiltonian(&couplings, &self.majoranas)?;
        build_full(&h, &self.majoranas, mu * self.config.coupling)
    }

    pub fn krylov(
        &self,
        realization: usize,
        mu: f64,
    ) -> Result<(crate::Superoperator, KrylovData)> {
        let l = self.superoperator(realization, mu)?;
        let k = bi_lanczos(&l, &self.x0, &self.lanczos)?;
        Ok((l, k))
    }

    /// Couplings → ℒ → bi-Lanczos → evolution → observables.
    pub fn run_one(&self, realization: usize, mu: f64) -> Result<RealizationResult> {
        let (l, k) = self.krylov(realization, mu)?;
        // Amplitudes are projected from the exact evolution: once the chain
        // is truncated, X_t leaves the Krylov span and the chain propagator
        // picks up spurious growing modes at late times.
        let series = evolve_full(&l, &self.x0, &self.grid)?;
        let mut k_series = Vec::with_capacity(series.len());
        let mut c_krylov = Vec::with_capacity(series.len());
        let mut c_string = Vec::with_capacity(series.len());
        let mut max_k_residue = 0.0_f64;
        for e in &series {
            let (p, q) = krylov_projections(&k, &e.vector)?;
            let (p, q) = (p.as_slice(), q.as_slice());
            k_series.push(krylov_complexity_with(p, q, self.convention)?);
            if let Ok((_, residue)) = krylov_complexity_with_residue(p, q) {
                max_k_residue = max_k_residue.max(residue.abs());
            }
            if self.config.wants(BasisKind::Krylov) {
                let pop = krylov_population(p, q, self.convention)?;
                c_krylov.push(spread_complexity(&pop).complexity);
            }
            if self.config.wants(BasisKind::String) {
                c_string
                    .push(spread_complexity(&population_distribution(e, &self.sector)?).complexity);
            }
        }

        Ok(RealizationResult {
            mu,
            realization,
            dim: k.dim(),
            termination: k.termination,
            k: k_series,
            c_krylov: self.config.wants(BasisKind::Krylov).then_some(c_krylov),
            c_string: self.config.wants(BasisKind::String).then_some(c_string),
            norm: series.iter().map(|e| e.norm_sq).collect(),
            biorthogonality_error: k.biorthogonality_error(),
            a: k.a,
            b: k.b,
            c: k.c,
            max_k_residue,
        })
    }
}

/// Runs every `(μ, realization)` pipeline of `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsBundle> {
    run_experiment_with(config, &RunOptions::default())
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    options: &RunOptions,
) -> Result<ResultsBundle> {
    let pipeline =
        Pipeline::new(config, options.lanczos.clone())?.with_convention(options.convention);
    let tasks: Vec<(usize, usize)> = (0..config.mu_values.len())
        .flat_map(|m| (0..config.n_realizations).map(move |r| (m, r)))
        .collect();
    let work = || -> Vec<Result<RealizationResult>> {
        tasks
            .par_iter()
            .map(|&(m, r)| {
                let mu = config.mu_values[m];
                let out = pipeline.run_one(r, mu);
                log::debug!(
                    "mu/J = {mu}, realization {r}: {}",
                    if out.is_ok() { "ok" } else { "failed" }
                );
                out
            })
            .collect()
    };
    let outcomes = match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(work)
        }
        None => work(),
    };

    let mut realizations = Vec::new();
    let mut exclusions = Vec::new();
    for (&(m, r), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(res) => realizations.push(res),
            Err(e) => {
                log::warn!(
                    "excluding realization {r} at mu/J = {}: {e}",
                    config.mu_values[m]
                );
                exclusions.push(Exclusion {
                    mu: config.mu_values[m],
                    realization: r,
                    reason: e.to_string(),
                });
            }
        }
    }

    let mut summaries = Vec::with_capacity(config.mu_values.len());
    for &mu in &config.mu_values {
        let n_excluded = exclusions.iter().filter(|e| e.mu == mu).count();
        if n_excluded as f64 > MAX_FAILURE_FRACTION * config.n_realizations as f64 {
            return Err(Error::AbortedRun(format!(
                "{n_excluded} of {} realizations failed at mu/J = {mu}",
                config.n_realizations
            )));
        }
        let runs: Vec<&RealizationResult> = realizations.iter().filter(|r| r.mu == mu).collect();
        summaries.push(summarize(mu, &runs, n_excluded)?);
    }

    Ok(ResultsBundle {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        times: pipeline.times(),
        summaries,
        realizations,
        exclusions,
    })
}

fn summarize(mu: f64, runs: &[&RealizationResult], n_excluded: usize) -> Result<MuSummary> {
    let collect = |f: &dyn Fn(&RealizationResult) -> Option<&Vec<f64>>| -> Option<Vec<Vec<f64>>> {
        runs.iter().map(|r| f(r).cloned()).collect()
    };
    let k = aggregate(&collect(&|r| Some(&r.k)).unwrap_or_default())?;
    let norm = aggregate(&collect(&|r| Some(&r.norm)).unwrap_or_default())?;
    let c_krylov = collect(&|r| r.c_krylov.as_ref())
        .map(|s| aggregate(&s))
        .transpose()?;
    let c_string = collect(&|r| r.c_string.as_ref())
        .map(|s| aggregate(&s))
        .transpose()?;
    let dims: Vec<Vec<f64>> = runs.iter().map(|r| vec![r.dim as f64]).collect();
    let mk = aggregate(&dims)?;
    let mut terminations = BTreeMap::new();
    for r in runs {
        *terminations
            .entry(r.termination.as_str().to_string())
            .or_insert(0) += 1;
    }
    Ok(MuSummary {
        mu,
        k,
        c_krylov,
        c_string,
        norm,
        mk_mean: mk.mean[0],
        mk_var: mk.var[0],
        n_success: runs.len(),
        n_excluded,
        terminations,
        max_k_residue: runs.iter().map(|r| r.max_k_residue).fold(0.0, f64::max),
        max_biorthogonality_error: runs
            .iter()
            .map(|r| r.biorthogonality_error)
            .fold(0.0, f64::max),
    })
}

/// Pointwise mean and unbiased variance over equally long series.
///
/// Values are sorted at each point before summation, so the result does not
/// depend on the order in which realizations finished.
pub fn aggregate(series: &[Vec<f64>]) -> Result<SeriesStats> {
    let Some(first) = series.first() else {
        return Err(Error::AbortedRun(
            "no successful realizations to aggregate".into(),
        ));
    };
    let len = first.len();
    if series.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidArgument("series lengths differ".into()));
    }
    let n = series.len();
    let mut mean = Vec::with_capacity(len);
    let mut var = Vec::with_capacity(len);
    let mut column = Vec::with_capacity(n);
    for i in 0..len {
        column.clear();
        column.extend(series.iter().map(|s| s[i]));
        column.sort_by(f64::total_cmp);
        let m = column.iter().sum::<f64>() / n as f64;
        let v = if n > 1 {
            column.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        mean.push(m);
        var.push(v);
    }
    Ok(SeriesStats {
        mean,
        var,
        count: n,
    })
}
