use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::observables::{lemma_check, random_trial_basis, TimeGrid, TrialBasis};

use super::config::ExperimentConfig;
use super::run::Pipeline;

/// One `(μ, realization, m)` lemma check.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaSweepRow {
    pub mu: f64,
    pub realization: usize,
    pub m: usize,
    pub n_bases: usize,
    pub slopes_ok: bool,
    pub minimal: bool,
    pub minimal_modulus: bool,
    pub worst_slope_deviation: f64,
    pub worst_gap: f64,
    pub worst_gap_modulus: f64,
}

impl LemmaSweepRow {
    pub fn passed(&self) -> bool {
        self.slopes_ok && self.minimal
    }
}

#[derive(Clone, Debug)]
pub struct LemmaSweep {
    /// Realizations per `μ` (the first ones of the ensemble).
    pub realizations: usize,
    pub m_values: Vec<usize>,
    /// Random trial bases per check.
    pub n_trials: usize,
    /// Also test the Majorana string basis when `m = 1`.
    pub include_string_basis: bool,
    /// Log-spaced grid in units of `Jt`.
    pub jt_min: f64,
    pub jt_max: f64,
    pub n_times: usize,
}

impl Default for LemmaSweep {
    fn default() -> Self {
        Self {
            realizations: 5,
            m_values: vec![1, 2],
            n_trials: 20,
            include_string_basis: true,
            jt_min: 1e-3,
            jt_max: 1e-1,
            n_times: 15,
        }
    }
}

/// Runs the lemma checks for every configured `μ`.
pub fn run_lemma_sweep(
    config: &ExperimentConfig,
    sweep: &LemmaSweep,
) -> Result<Vec<LemmaSweepRow>> {
    if sweep.realizations == 0 || sweep.realizations > config.n_realizations {
        return Err(invalid(format!(
            "lemma sweep needs 1..={} realizations, got {}",
            config.n_realizations, sweep.realizations
        )));
    }
    let pipeline = Pipeline::new(config, Default::default())?;
    let grid = TimeGrid::log_spaced(
        sweep.jt_min / config.coupling,
        sweep.jt_max / config.coupling,
        sweep.n_times,
    )?;
    let string_basis = TrialBasis::from_string_basis(pipeline.sector())?;
    let mut rows = Vec::new();
    for (mu_index, &mu) in config.mu_values.iter().enumerate() {
        for r in 0..sweep.realizations {
            let (l, k) = pipeline.krylov(r, mu)?;
            for &m in &sweep.m_values {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6c65_6d6d_6173_7765);
                rng.set_stream(((mu_index * sweep.realizations + r) * 64 + m) as u64);
                let mut bases = (0..sweep.n_trials)
                    .map(|i| {
                        random_trial_basis(&k, m, pipeline.sector(), &mut rng, format!("random{i}"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if m == 1 && sweep.include_string_basis {
                    bases.push(string_basis.clone());
                }
                let report = lemma_check(&l, pipeline.initial_operator(), &k, m, &bases, &grid)?;
                rows.push(LemmaSweepRow {
                    mu,
                    realization: r,
                    m,
                    n_bases: bases.len(),
                    slopes_ok: report.slopes_ok(),
                    minimal: report.minimality_ok(),
                    minimal_modulus: report.minimality_ok_modulus(),
                    worst_slope_deviation: report.worst_slope_deviation(),
                    worst_gap: report.worst_minimality_gap(),
                    worst_gap_modulus: report.worst_minimality_gap_modulus(),
                });
            }
        }
    }
    Ok(rows)
}
