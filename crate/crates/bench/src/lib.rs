//! Shared fixtures for the benchmarks.

use opspread_core::{
    build_full, build_hamiltonian, build_majoranas, sample_couplings, vectorize, DisorderSpec,
    MajoranaSet, OperatorVector, Superoperator, C64,
};

/// One SYK realization with `√2ψ₁` as the initial operator.
pub struct Fixture {
    pub majoranas: MajoranaSet,
    pub x0: OperatorVector,
    pub lindbladian: Superoperator,
}

pub fn fixture(n_fermions: usize, mu: f64) -> Fixture {
    let majoranas = build_majoranas(n_fermions).expect("valid fermion count");
    let spec = DisorderSpec::new(n_fermions, 4, 1.0, 0, 1).expect("valid disorder");
    let couplings = sample_couplings(&spec, 0).expect("realization 0");
    let h = build_hamiltonian(&couplings, &majoranas).expect("hamiltonian");
    let lindbladian = build_full(&h, &majoranas, mu).expect("lindbladian");
    let x0 = vectorize(&(majoranas.psi(1) * C64::new(std::f64::consts::SQRT_2, 0.0)))
        .expect("square matrix");
    Fixture {
        majoranas,
        x0,
        lindbladian,
    }
}
