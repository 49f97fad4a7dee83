//! Time evolution, Krylov complexity and spread complexity.

mod evolution;
pub mod lemma;
mod spread;

pub use evolution::{
    evolve_full, evolve_krylov, krylov_projections, EvolvedOperator, KrylovAmplitudes, TimeGrid,
};
pub use lemma::{lemma_check, random_trial_basis, LemmaReport, TrialBasis, TrialOutcome};
pub use spread::{
    expected_position, krylov_complexity, krylov_complexity_with, krylov_complexity_with_residue,
    krylov_population, population_distribution, population_from_overlaps, spread_complexity,
    PopulationConvention, PopulationDistribution, SpreadComplexity, COMPLETENESS_TOL,
};
