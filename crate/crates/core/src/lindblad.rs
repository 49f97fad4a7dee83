//! Dense Heisenberg-picture Lindbladian `ℒ = ℒ_U + ℒ_D` on row-stacked operators.
//!
//! With Majorana jump operators `L_n = √μ ψ_n` and the fermionic (minus-sign)
//! master equation, `dX/dt = iℒX` where
//!
//! ```text
//! ℒ_U X = [H, X]
//! ℒ_D X = iμ Σₙ (ψₙ X ψₙ + ¼{𝟙, X}) = iμ (Σₙ ψₙ X ψₙ + (N/2) X)
//! ```

use crate::algebra::{MajoranaSet, OperatorVector};
use crate::error::{invalid, Error, Result};
use crate::{max_abs, CMatrix, C64};

/// Largest Hilbert dimension for which dense superoperators are assembled
/// (`D = 64`, i.e. 12 Majoranas, `D² = 4096`).
pub const MAX_SUPEROPERATOR_HILBERT_DIM: usize = 64;

/// Sign of the jump term in the master equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JumpStatistics {
    /// `−L†XL`: fermionic operator and fermionic jumps.
    #[default]
    Fermionic,
    /// `+L†XL`.
    Bosonic,
}

/// `ℒ = ℒ_U + ℒ_D` as a dense `D²×D²` matrix.
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: CMatrix,
    unitary_part: CMatrix,
    dissipative_part: CMatrix,
    mu: f64,
    hilbert_dim: usize,
}

impl Superoperator {
    pub fn from_parts(unitary_part: CMatrix, dissipative_part: CMatrix, mu: f64) -> Result<Self> {
        let n = unitary_part.nrows();
        if unitary_part.shape() != (n, n) || dissipative_part.shape() != (n, n) {
            return Err(invalid(
                "superoperator parts must be square and equal in size",
            ));
        }
        let hilbert_dim = (n as f64).sqrt().round() as usize;
        if hilbert_dim * hilbert_dim != n {
            return Err(invalid(format!("{n} is not a squared Hilbert dimension")));
        }
        Ok(Self {
            matrix: &unitary_part + &dissipative_part,
            unitary_part,
            dissipative_part,
            mu,
            hilbert_dim,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn unitary_part(&self) -> &CMatrix {
        &self.unitary_part
    }

    pub fn dissipative_part(&self) -> &CMatrix {
        &self.dissipative_part
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// `ℒ†` with respect to `(A|B) = Tr[A†B]/D`; row stacking is orthonormal up
    /// to the constant `1/D`, so this is the conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        self.matrix.adjoint()
    }

    /// The generator `iℒ` of `dX/dt = iℒX`.
    pub fn generator(&self) -> CMatrix {
        &self.matrix * C64::new(0.0, 1.0)
    }

    pub fn apply(&self, x: &OperatorVector) -> Result<OperatorVector> {
        self.check_dim(x)?;
        OperatorVector::from_data(&self.matrix * x.data(), self.hilbert_dim)
    }

    pub fn apply_adjoint(&self, x: &OperatorVector) -> Result<OperatorVector> {
        self.check_dim(x)?;
        OperatorVector::from_data(self.matrix.ad_mul(x.data()), self.hilbert_dim)
    }

    fn check_dim(&self, x: &OperatorVector) -> Result<()> {
        if x.dim() != self.hilbert_dim {
            return Err(invalid(format!(
                "operator of dimension {} applied to a superoperator on dimension {}",
                x.dim(),
                self.hilbert_dim
            )));
        }
        Ok(())
    }
}

fn guard_dim(d: usize) -> Result<()> {
    if d > MAX_SUPEROPERATOR_HILBERT_DIM {
        return Err(Error::ResourceLimit(format!(
            "dense superoperator on Hilbert dimension {d} exceeds {MAX_SUPEROPERATOR_HILBERT_DIM}"
        )));
    }
    Ok(())
}

/// `ℒ_U = H ⊗ 𝟙 − 𝟙 ⊗ Hᵀ`, the commutator `[H, ·]`.
pub fn build_unitary_part(h: &CMatrix) -> Result<CMatrix> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(invalid("Hamiltonian must be square"));
    }
    guard_dim(d)?;
    let asym = max_abs(&(h - h.adjoint()));
    if asym > 1e-8 {
        return Err(invalid(format!(
            "Hamiltonian is not Hermitian (deviation {asym:e})"
        )));
    }
    let id = CMatrix::identity(d, d);
    Ok(h.kronecker(&id) - id.kronecker(&h.transpose()))
}

/// Fermionic dissipator `iμ(Σₙ ψₙ ⊗ ψₙᵀ + (N/2)𝟙)`.
pub fn build_dissipative_part(majoranas: &MajoranaSet, mu: f64) -> Result<CMatrix> {
    build_dissipative_part_with(majoranas, mu, JumpStatistics::Fermionic)
}

/// Dissipator for either sign of the jump term. The bosonic branch is
/// `−iμ(Σₙ ψₙ ⊗ ψₙᵀ − (N/2)𝟙)`.
pub fn build_dissipative_part_with(
    majoranas: &MajoranaSet,
    mu: f64,
    statistics: JumpStatistics,
) -> Result<CMatrix> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(invalid(format!(
            "dissipation strength must be >= 0, got {mu}"
        )));
    }
    let d = majoranas.hilbert_dim();
    guard_dim(d)?;
    let dd = d * d;
    if mu == 0.0 {
        return Ok(CMatrix::zeros(dd, dd));
    }
    let mut sandwich = CMatrix::zeros(dd, dd);
    for psi in majoranas.matrices() {
        sandwich += psi.kronecker(&psi.transpose());
    }
    let half_n = majoranas.n_fermions() as f64 / 2.0;
    let id = CMatrix::identity(dd, dd);
    Ok(match statistics {
        JumpStatistics::Fermionic => (sandwich + id * C64::new(half_n, 0.0)) * C64::new(0.0, mu),
        JumpStatistics::Bosonic => (sandwich - id * C64::new(half_n, 0.0)) * C64::new(0.0, -mu),
    })
}

/// Full fermionic Lindbladian for Hamiltonian `h` and dissipation strength `mu`.
pub fn build_full(h: &CMatrix, majoranas: &MajoranaSet, mu: f64) -> Result<Superoperator> {
    build_full_with(h, majoranas, mu, JumpStatistics::Fermionic)
}

pub fn build_full_with(
    h: &CMatrix,
    majoranas: &MajoranaSet,
    mu: f64,
    statistics: JumpStatistics,
) -> Result<Superoperator> {
    if h.nrows() != majoranas.hilbert_dim() {
        return Err(invalid(format!(
            "Hamiltonian dimension {} does not match Majorana dimension {}",
            h.nrows(),
            majoranas.hilbert_dim()
        )));
    }
    let unitary = build_unitary_part(h)?;
    let dissipative = build_dissipative_part_with(majoranas, mu, statistics)?;
    Superoperator::from_parts(unitary, dissipative, mu)
}

/// `ℒ†` of an assembled superoperator.
pub fn adjoint(s: &Superoperator) -> CMatrix {
    s.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_majoranas, build_string_basis, vectorize, MajoranaString, Parity};
    use crate::syk::{build_hamiltonian, sample_couplings, DisorderSpec};
    use rand::{Rng, SeedableRng};

    fn syk_h(m: &MajoranaSet, r: usize) -> CMatrix {
        let spec = DisorderSpec::new(m.n_fermions(), 4, 1.0, 5, r + 1).unwrap();
        build_hamiltonian(&sample_couplings(&spec, r).unwrap(), m).unwrap()
    }

    fn random_operator(d: usize, rng: &mut impl Rng) -> OperatorVector {
        let a = CMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        vectorize(&a).unwrap()
    }

    #[test]
    fn unitary_part_is_the_commutator() {
        let m = build_majoranas(6).unwrap();
        let h = syk_h(&m, 0);
        let lu = build_unitary_part(&h).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x = random_operator(8, &mut rng);
            let xm = x.to_matrix();
            let got = OperatorVector::from_data(&lu * x.data(), 8)
                .unwrap()
                .to_matrix();
            assert!(max_abs(&(got - (&h * &xm - &xm * &h))) < 1e-10);
        }
        let id = vectorize(&CMatrix::identity(8, 8)).unwrap();
        assert!((&lu * id.data()).norm() < 1e-14);
        let hv = vectorize(&h).unwrap();
        assert!((&lu * hv.data()).norm() < 1e-12);
        // commutator with a Hermitian H is self-adjoint
        assert!(max_abs(&(&lu - lu.adjoint())) < 1e-14);
    }

    #[test]
    fn two_fermion_commutator_matches_symbolic_oracle() {
        let m = build_majoranas(2).unwrap();
        let h = m.psi(1) * m.psi(2);
        // ψ1ψ2 is anti-Hermitian; iψ1ψ2 is the Hermitian (scaled Z) version
        let h = h * C64::new(0.0, 1.0);
        let lu = build_unitary_part(&h).unwrap();
        let x = vectorize(m.psi(1)).unwrap();
        let got = OperatorVector::from_data(&lu * x.data(), 2)
            .unwrap()
            .to_matrix();
        let (coeff, s) = MajoranaString::new(vec![1, 2])
            .unwrap()
            .commutator(&MajoranaString::single(1))
            .unwrap();
        let expected = m.product(&s) * C64::new(0.0, coeff);
        assert!(max_abs(&(got - expected)) < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let m = build_majoranas(4).unwrap();
        let h = m.psi(1) * m.psi(2);
        assert!(matches!(
            build_unitary_part(&h),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn dissipator_matches_operator_form() {
        let m = build_majoranas(6).unwrap();
        let mu = 0.37;
        let ld = build_dissipative_part(&m, mu).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let x = random_operator(8, &mut rng);
        let xm = x.to_matrix();
        let mut expected = &xm * C64::new(3.0, 0.0);
        for psi in m.matrices() {
            expected += psi * &xm * psi;
        }
        expected *= C64::new(0.0, mu);
        let got = OperatorVector::from_data(&ld * x.data(), 8)
            .unwrap()
            .to_matrix();
        assert!(max_abs(&(got - expected)) < 1e-10);
    }

    #[test]
    fn dissipator_zero_mu_and_negative_mu() {
        let m = build_majoranas(4).unwrap();
        assert_eq!(max_abs(&build_dissipative_part(&m, 0.0).unwrap()), 0.0);
        assert!(matches!(
            build_dissipative_part(&m, -0.1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn dissipator_is_linear_in_mu() {
        let m = build_majoranas(6).unwrap();
        let one = build_dissipative_part(&m, 1.0).unwrap();
        let mu = build_dissipative_part(&m, 0.3).unwrap();
        assert!(max_abs(&(mu - one * C64::new(0.3, 0.0))) < 1e-15);
    }

    #[test]
    fn strings_are_dissipator_eigenoperators() {
        let m = build_majoranas(8).unwrap();
        let mu = 0.2;
        let ld = build_dissipative_part(&m, mu).unwrap();
        let basis = build_string_basis(&m, Parity::All).unwrap();
        for (s, v) in basis.strings().iter().zip(basis.elements()) {
            let rate = if s.is_odd() { s.len() } else { 8 - s.len() } as f64;
            let residual = &ld * v.data() - v.data() * C64::new(0.0, mu * rate);
            assert!(residual.camax() < 1e-12, "{s}");
        }
    }

    #[test]
    fn identity_is_an_even_eigenoperator() {
        let m = build_majoranas(8).unwrap();
        let l = build_full(&syk_h(&m, 0), &m, 0.1).unwrap();
        let id = vectorize(&CMatrix::identity(16, 16)).unwrap();
        let out = l.apply(&id).unwrap();
        assert!((out.data() - id.data() * C64::new(0.0, 0.1 * 8.0)).camax() < 1e-12);
    }

    #[test]
    fn full_superoperator_structure() {
        let m = build_majoranas(6).unwrap();
        let h = syk_h(&m, 1);
        let closed = build_full(&h, &m, 0.0).unwrap();
        assert_eq!(max_abs(closed.dissipative_part()), 0.0);
        assert!(max_abs(&(closed.adjoint() - closed.matrix())) < 1e-14);
        let open = build_full(&h, &m, 0.05).unwrap();
        assert_eq!(
            open.matrix(),
            &(open.unitary_part() + open.dissipative_part())
        );
        let back = open.adjoint().adjoint();
        assert_eq!(&back, open.matrix());
    }

    #[test]
    fn adjoint_pairing_identity() {
        let m = build_majoranas(6).unwrap();
        let l = build_full(&syk_h(&m, 2), &m, 0.05).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_operator(8, &mut rng);
            let b = random_operator(8, &mut rng);
            let lhs = l.apply_adjoint(&a).unwrap().inner(&b).unwrap();
            let rhs = a.inner(&l.apply(&b).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn generator_preserves_hermiticity() {
        let m = build_majoranas(6).unwrap();
        let l = build_full(&syk_h(&m, 0), &m, 0.3).unwrap();
        let x =
            vectorize(&(m.psi(1) + m.psi(2) * m.psi(3) * m.psi(4) * C64::new(0.0, 1.0))).unwrap();
        assert!(max_abs(&(x.to_matrix() - x.to_matrix().adjoint())) < 1e-15);
        let dx = OperatorVector::from_data(l.generator() * x.data(), 8)
            .unwrap()
            .to_matrix();
        assert!(max_abs(&(&dx - dx.adjoint())) < 1e-12);
    }

    #[test]
    fn generator_hermitian_part_is_negative_semidefinite() {
        // (iℒ + (iℒ)†)/2 = −μ(Σψ⊗ψᵀ + N/2): every eigenvalue of iℒ has Re <= 0
        let m = build_majoranas(6).unwrap();
        let l = build_full(&syk_h(&m, 0), &m, 0.1).unwrap();
        let g = l.generator();
        let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        assert!(eig.eigenvalues.iter().all(|&e| e <= 1e-12));
    }

    #[test]
    fn bosonic_branch_matches_operator_form() {
        let m = build_majoranas(4).unwrap();
        let mu = 0.4;
        let ld = build_dissipative_part_with(&m, mu, JumpStatistics::Bosonic).unwrap();
        let x = vectorize(&(m.psi(1) * m.psi(2) * m.psi(3))).unwrap();
        let xm = x.to_matrix();
        // dX/dt = μ Σ (ψXψ − ½{ψψ, X})
        let mut rhs = CMatrix::zeros(4, 4);
        for psi in m.matrices() {
            rhs += psi * &xm * psi - (psi * psi * &xm + &xm * psi * psi) * C64::new(0.5, 0.0);
        }
        rhs *= C64::new(mu, 0.0);
        let got = OperatorVector::from_data((&ld * x.data()) * C64::new(0.0, 1.0), 4)
            .unwrap()
            .to_matrix();
        assert!(max_abs(&(got - rhs)) < 1e-12);
    }

    #[test]
    fn oversized_superoperators_are_refused() {
        let m = build_majoranas(14).unwrap();
        assert!(matches!(
            build_dissipative_part(&m, 0.1),
            Err(Error::ResourceLimit(_))
        ));
    }
}
