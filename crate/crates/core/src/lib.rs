//! Operator growth in open quantum systems.
//!
//! The crate builds Majorana representations and SYK Hamiltonians, assembles
//! the Heisenberg-picture Lindbladian with fermionic jump operators as a dense
//! superoperator, tridiagonalizes it with the bi-Lanczos recursion, and
//! measures Krylov complexity and operator spread complexity in the Krylov
//! and Majorana-string bases.
//!
//! Conventions used throughout:
//!
//! * operators are vectorized by row stacking, so `vec(A X B) = (A ⊗ Bᵀ) vec(X)`;
//! * the operator inner product is `(A|B) = Tr[A†B] / D`;
//! * the stored superoperator is `ℒ`, and dynamics is `dX/dt = iℒX`.

pub mod algebra;
pub mod bilanczos;
pub mod error;
pub mod experiment;
pub mod lindblad;
pub mod observables;
pub mod syk;
pub mod verify;

pub use algebra::{
    build_majoranas, build_string_basis, devectorize, inner_product, vectorize, MajoranaSet,
    MajoranaString, OperatorVector, Parity, StringBasis,
};
pub use bilanczos::{
    bi_lanczos, tridiagonal_matrix, BiLanczosOptions, KrylovData, TerminationReason,
};
pub use error::{Error, Result};
pub use experiment::{
    aggregate, emit, run_experiment, ExperimentConfig, InitialOperator, ResultsBundle,
};
pub use lindblad::{
    build_dissipative_part, build_full, build_unitary_part, JumpStatistics, Superoperator,
};
pub use observables::{
    evolve_full, evolve_krylov, krylov_complexity, krylov_complexity_with, krylov_population,
    lemma_check, population_distribution, spread_complexity, EvolvedOperator, KrylovAmplitudes,
    PopulationConvention, PopulationDistribution, SpreadComplexity, TimeGrid,
};
pub use syk::{build_hamiltonian, sample_couplings, CouplingTensor, DisorderSpec};

/// Complex scalar used for every matrix and vector.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Largest absolute entry of a matrix.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}
