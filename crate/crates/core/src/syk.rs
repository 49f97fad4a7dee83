//! Disordered SYK couplings and Hamiltonian.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::algebra::{MajoranaSet, MajoranaString};
use crate::error::{invalid, Result};
use crate::{CMatrix, C64};

/// Parameters of the disorder ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderSpec {
    pub n_fermions: usize,
    pub q: usize,
    /// Overall coupling scale `J`; times are reported as `Jt`.
    pub coupling: f64,
    pub seed: u64,
    pub n_realizations: usize,
}

impl DisorderSpec {
    pub fn new(
        n_fermions: usize,
        q: usize,
        coupling: f64,
        seed: u64,
        n_realizations: usize,
    ) -> Result<Self> {
        if q < 2 || q % 2 != 0 || q > n_fermions {
            return Err(invalid(format!(
                "interaction order q={q} must be even with 2 <= q <= N={n_fermions}"
            )));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(invalid(format!(
                "coupling J must be positive, got {coupling}"
            )));
        }
        if n_realizations == 0 {
            return Err(invalid("at least one disorder realization is required"));
        }
        Ok(Self {
            n_fermions,
            q,
            coupling,
            seed,
            n_realizations,
        })
    }

    /// `J²(q−1)!/N^{q−1}`.
    pub fn coupling_variance(&self) -> f64 {
        let factorial: f64 = (1..self.q).map(|k| k as f64).product();
        self.coupling.powi(2) * factorial / (self.n_fermions as f64).powi(self.q as i32 - 1)
    }

    /// Generator for one realization.
    ///
    /// Every realization owns the ChaCha stream numbered by its index under the
    /// shared seed, so realizations are independent of evaluation order.
    pub fn rng(&self, realization_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(realization_index as u64);
        rng
    }
}

/// Real couplings `J_{i₁…i_q}`, one per ascending index tuple in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTensor {
    n_fermions: usize,
    q: usize,
    entries: Vec<(MajoranaString, f64)>,
}

impl CouplingTensor {
    pub fn zeros(n_fermions: usize, q: usize) -> Result<Self> {
        if q > n_fermions {
            return Err(invalid(format!("q={q} exceeds N={n_fermions}")));
        }
        let entries = (1..=n_fermions)
            .combinations(q)
            .map(|c| Ok((MajoranaString::new(c)?, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_fermions,
            q,
            entries,
        })
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn entries(&self) -> &[(MajoranaString, f64)] {
        &self.entries
    }

    pub fn get(&self, indices: &[usize]) -> Option<f64> {
        self.entries
            .iter()
            .find(|(s, _)| s.indices() == indices)
            .map(|&(_, v)| v)
    }

    pub fn set(&mut self, indices: &[usize], value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(invalid("couplings must be finite"));
        }
        let slot = self
            .entries
            .iter_mut()
            .find(|(s, _)| s.indices() == indices)
            .ok_or_else(|| invalid(format!("{indices:?} is not an ascending {}-tuple", self.q)))?;
        slot.1 = value;
        Ok(())
    }
}

/// Draws the Gaussian couplings of realization `realization_index`.
pub fn sample_couplings(spec: &DisorderSpec, realization_index: usize) -> Result<CouplingTensor> {
    if realization_index >= spec.n_realizations {
        return Err(invalid(format!(
            "realization {realization_index} out of range 0..{}",
            spec.n_realizations
        )));
    }
    let normal = Normal::new(0.0, spec.coupling_variance().sqrt())
        .map_err(|e| invalid(format!("coupling distribution: {e}")))?;
    let mut rng = spec.rng(realization_index);
    let mut tensor = CouplingTensor::zeros(spec.n_fermions, spec.q)?;
    for entry in &mut tensor.entries {
        entry.1 = normal.sample(&mut rng);
    }
    Ok(tensor)
}

/// `H = i^{q/2} Σ J_{i₁…i_q} ψ_{i₁} ⋯ ψ_{i_q}`.
pub fn build_hamiltonian(couplings: &CouplingTensor, majoranas: &MajoranaSet) -> Result<CMatrix> {
    if couplings.n_fermions != majoranas.n_fermions() {
        return Err(invalid(format!(
            "couplings for N={} but {} Majoranas supplied",
            couplings.n_fermions,
            majoranas.n_fermions()
        )));
    }
    let d = majoranas.hilbert_dim();
    let phase = C64::new(0.0, 1.0).powu((couplings.q / 2) as u32);
    let mut h = CMatrix::zeros(d, d);
    for (string, value) in couplings.entries.iter().filter(|(_, v)| *v != 0.0) {
        h += majoranas.product(string) * (phase * *value);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_majoranas;
    use crate::max_abs;

    fn spec(n: usize, q: usize, realizations: usize) -> DisorderSpec {
        DisorderSpec::new(n, q, 1.0, 1234, realizations).unwrap()
    }

    #[test]
    fn variance_formula_values() {
        assert!((spec(8, 4, 1).coupling_variance() - 6.0 / 512.0).abs() < 1e-18);
        assert!((spec(2, 2, 1).coupling_variance() - 0.5).abs() < 1e-18);
        let scaled = DisorderSpec::new(8, 4, 2.0, 0, 1).unwrap();
        assert!((scaled.coupling_variance() - 4.0 * 6.0 / 512.0).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(DisorderSpec::new(8, 3, 1.0, 0, 1).is_err());
        assert!(DisorderSpec::new(8, 10, 1.0, 0, 1).is_err());
        assert!(DisorderSpec::new(8, 4, 0.0, 0, 1).is_err());
        assert!(DisorderSpec::new(8, 4, 1.0, 0, 0).is_err());
    }

    #[test]
    fn tensor_has_one_entry_per_tuple() {
        let t = sample_couplings(&spec(8, 4, 3), 2).unwrap();
        assert_eq!(t.entries().len(), 70);
        assert!(t.entries().iter().all(|(_, v)| v.is_finite()));
        assert!(t.entries().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn out_of_range_realization_is_rejected() {
        assert!(sample_couplings(&spec(8, 4, 3), 3).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_streams_differ() {
        let s = spec(8, 4, 10);
        assert_eq!(
            sample_couplings(&s, 4).unwrap(),
            sample_couplings(&s, 4).unwrap()
        );
        assert_ne!(
            sample_couplings(&s, 4).unwrap(),
            sample_couplings(&s, 5).unwrap()
        );
        let other = DisorderSpec {
            seed: 99,
            ..s.clone()
        };
        assert_ne!(
            sample_couplings(&s, 4).unwrap(),
            sample_couplings(&other, 4).unwrap()
        );
    }

    #[test]
    fn sample_mean_of_many_draws_is_zero_within_five_sigma() {
        // N=2, q=2 has a single coupling; 10⁵ realizations give 10⁵ draws.
        let n = 100_000;
        let s = DisorderSpec::new(2, 2, 1.0, 42, n).unwrap();
        let draws: Vec<f64> = (0..n)
            .map(|r| sample_couplings(&s, r).unwrap().entries()[0].1)
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sigma = s.coupling_variance().sqrt();
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn empirical_variance_over_realizations() {
        let s = spec(8, 4, 400);
        let draws: Vec<f64> = (0..400)
            .map(|r| sample_couplings(&s, r).unwrap().get(&[1, 2, 3, 4]).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / 400.0;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 399.0;
        let target = s.coupling_variance();
        assert!(
            (var / target - 1.0).abs() < 0.3,
            "variance {var} vs {target}"
        );
    }

    #[test]
    fn zero_couplings_give_zero_hamiltonian() {
        let m = build_majoranas(8).unwrap();
        let h = build_hamiltonian(&CouplingTensor::zeros(8, 4).unwrap(), &m).unwrap();
        assert_eq!(max_abs(&h), 0.0);
    }

    #[test]
    fn single_vertex_hamiltonian() {
        let m = build_majoranas(4).unwrap();
        let mut c = CouplingTensor::zeros(4, 4).unwrap();
        c.set(&[1, 2, 3, 4], 1.0).unwrap();
        let h = build_hamiltonian(&c, &m).unwrap();
        let expected = -(m.psi(1) * m.psi(2) * m.psi(3) * m.psi(4));
        assert!(max_abs(&(&h - expected)) < 1e-15);
        assert!(max_abs(&(&h - h.adjoint())) < 1e-15);
        // the symbolic oracle agrees that ψ1ψ2ψ3ψ4 is self-adjoint
        assert_eq!(
            MajoranaString::new(vec![1, 2, 3, 4])
                .unwrap()
                .adjoint_sign(),
            1.0
        );
    }

    #[test]
    fn sampled_hamiltonians_are_hermitian_and_traceless() {
        let m = build_majoranas(8).unwrap();
        for q in [2, 4] {
            let s = spec(8, q, 5);
            for r in 0..5 {
                let h = build_hamiltonian(&sample_couplings(&s, r).unwrap(), &m).unwrap();
                assert!(max_abs(&(&h - h.adjoint())) < 1e-10);
                assert!(h.trace().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mismatched_fermion_count_is_rejected() {
        let m = build_majoranas(6).unwrap();
        let c = CouplingTensor::zeros(8, 4).unwrap();
        assert!(build_hamiltonian(&c, &m).is_err());
    }
}
