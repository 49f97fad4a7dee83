//! Majorana fermions, vectorized operators and the infinite-temperature
//! inner product.

mod string;

pub use string::{build_string_basis, MajoranaString, Parity, StringBasis};

use crate::error::{invalid, Error, Result};
use crate::{max_abs, CMatrix, CVector, C64};

/// Largest fermion count accepted by [`build_majoranas`].
pub const MAX_FERMIONS: usize = 14;

const ALGEBRA_TOL: f64 = 1e-12;

/// A concrete matrix representation of `N` Majorana fermions with
/// `{ψᵢ, ψⱼ} = δᵢⱼ 𝟙` on a `2^{N/2}`-dimensional Hilbert space.
///
/// The `1/√2` normalization is stored in the matrices, so `ψᵢ² = 𝟙/2`.
#[derive(Clone, Debug)]
pub struct MajoranaSet {
    n_fermions: usize,
    hilbert_dim: usize,
    matrices: Vec<CMatrix>,
}

impl MajoranaSet {
    /// Jordan–Wigner construction:
    /// `ψ_{2k-1} = Z^{⊗(k-1)} ⊗ X ⊗ 𝟙 / √2` and `ψ_{2k} = Z^{⊗(k-1)} ⊗ Y ⊗ 𝟙 / √2`.
    pub fn jordan_wigner(n_fermions: usize) -> Result<Self> {
        if n_fermions < 2 || n_fermions % 2 != 0 {
            return Err(invalid(format!(
                "fermion count must be even and >= 2, got {n_fermions}"
            )));
        }
        if n_fermions > MAX_FERMIONS {
            return Err(Error::ResourceLimit(format!(
                "{n_fermions} Majorana fermions exceeds the limit of {MAX_FERMIONS}"
            )));
        }
        let sites = n_fermions / 2;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let id = CMatrix::identity(2, 2);
        let x = CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
        let y = CMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]);
        let z = CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
        let scale = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

        let mut matrices = Vec::with_capacity(n_fermions);
        for k in 0..sites {
            for pauli in [&x, &y] {
                let mut m = CMatrix::identity(1, 1);
                for site in 0..sites {
                    let factor = match site.cmp(&k) {
                        std::cmp::Ordering::Less => &z,
                        std::cmp::Ordering::Equal => pauli,
                        std::cmp::Ordering::Greater => &id,
                    };
                    m = m.kronecker(factor);
                }
                matrices.push(m * scale);
            }
        }
        Ok(Self {
            n_fermions,
            hilbert_dim: 1 << sites,
            matrices,
        })
    }

    /// Wraps an arbitrary representation after checking Hermiticity and the
    /// anticommutation relations to `1e-12`.
    pub fn from_matrices(matrices: Vec<CMatrix>) -> Result<Self> {
        let n_fermions = matrices.len();
        if n_fermions < 2 || n_fermions % 2 != 0 {
            return Err(invalid(format!(
                "fermion count must be even and >= 2, got {n_fermions}"
            )));
        }
        let dim = matrices[0].nrows();
        if dim != 1 << (n_fermions / 2) {
            return Err(invalid(format!(
                "{n_fermions} Majoranas need dimension {}, got {dim}",
                1 << (n_fermions / 2)
            )));
        }
        if matrices
            .iter()
            .any(|m| m.nrows() != dim || m.ncols() != dim)
        {
            return Err(invalid("Majorana matrices must share one square shape"));
        }
        let set = Self {
            n_fermions,
            hilbert_dim: dim,
            matrices,
        };
        let herm = set.max_hermiticity_deviation();
        let anti = set.max_anticommutator_deviation();
        if herm > ALGEBRA_TOL || anti > ALGEBRA_TOL {
            return Err(invalid(format!(
                "not a Majorana representation: hermiticity {herm:e}, anticommutator {anti:e}"
            )));
        }
        Ok(set)
    }

    /// The representation `U ψᵢ U†` for a unitary `U`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Self> {
        let adj = unitary.adjoint();
        Self::from_matrices(self.matrices.iter().map(|m| unitary * m * &adj).collect())
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `ψ_k` with the 1-based index used in the physics notation.
    pub fn psi(&self, k: usize) -> &CMatrix {
        &self.matrices[k - 1]
    }

    /// Raw product `ψ_{i₁} ⋯ ψ_{i_s}` (no string normalization).
    pub fn product(&self, string: &MajoranaString) -> CMatrix {
        string.indices().iter().fold(
            CMatrix::identity(self.hilbert_dim, self.hilbert_dim),
            |acc, &k| acc * self.psi(k),
        )
    }

    /// Unit-norm string `2^{s/2} ψ_{i₁} ⋯ ψ_{i_s}`.
    pub fn string_matrix(&self, string: &MajoranaString) -> CMatrix {
        self.product(string) * C64::new(string.normalization(), 0.0)
    }

    pub fn max_hermiticity_deviation(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| max_abs(&(m - m.adjoint())))
            .fold(0.0, f64::max)
    }

    /// `max |{ψᵢ,ψⱼ} − δᵢⱼ𝟙|` over all pairs and entries.
    pub fn max_anticommutator_deviation(&self) -> f64 {
        let id = CMatrix::identity(self.hilbert_dim, self.hilbert_dim);
        let mut worst = 0.0_f64;
        for (i, a) in self.matrices.iter().enumerate() {
            for (j, b) in self.matrices.iter().enumerate().skip(i) {
                let mut anti = a * b + b * a;
                if i == j {
                    anti -= &id;
                }
                worst = worst.max(max_abs(&anti));
            }
        }
        worst
    }
}

/// Jordan–Wigner Majorana set for `n_fermions` modes.
pub fn build_majoranas(n_fermions: usize) -> Result<MajoranaSet> {
    MajoranaSet::jordan_wigner(n_fermions)
}

/// A row-stacked operator: entry `(i, j)` of a `D×D` matrix lives at `i·D + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorVector {
    data: CVector,
    dim: usize,
}

impl OperatorVector {
    pub fn from_matrix(a: &CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(invalid(format!(
                "operator must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let dim = a.nrows();
        let data = CVector::from_iterator(
            dim * dim,
            (0..dim).flat_map(|i| (0..dim).map(move |j| a[(i, j)])),
        );
        Ok(Self { data, dim })
    }

    /// Wraps raw vectorized data for a `dim×dim` operator.
    pub fn from_data(data: CVector, dim: usize) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "vector of length {} cannot hold a {dim}x{dim} operator",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: CVector::zeros(dim * dim),
            dim,
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(self.dim, self.dim, self.data.as_slice())
    }

    pub fn data(&self) -> &CVector {
        &self.data
    }

    pub fn into_data(self) -> CVector {
        self.data
    }

    /// Hilbert-space dimension `D` of the underlying operator.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Tr[A†B] / D`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim != other.dim {
            return Err(invalid(format!(
                "operator dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> C64 {
        self.data.dotc(&other.data) / self.dim as f64
    }

    /// `(X|X)`.
    pub fn norm_sq(&self) -> f64 {
        self.data.norm_squared() / self.dim as f64
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            data: &self.data * factor,
            dim: self.dim,
        }
    }
}

/// Row-stacking vectorization of a square matrix.
pub fn vectorize(a: &CMatrix) -> Result<OperatorVector> {
    OperatorVector::from_matrix(a)
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &OperatorVector) -> CMatrix {
    v.to_matrix()
}

/// Infinite-temperature inner product `(A|B) = Tr[A†B] / D`.
pub fn inner_product(a: &OperatorVector, b: &OperatorVector) -> Result<C64> {
    a.inner(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_majoranas_are_scaled_pauli_x_and_y() {
        let m = build_majoranas(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.)]);
        let y = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -s), c(0., s), c(0., 0.)]);
        assert_eq!(m.psi(1), &x);
        assert_eq!(m.psi(2), &y);
    }

    #[test]
    fn dimension_and_anticommutation() {
        for n in [2, 4, 6, 8, 10] {
            let m = build_majoranas(n).unwrap();
            assert_eq!(m.hilbert_dim(), 1 << (n / 2));
            assert_eq!(m.matrices().len(), n);
            assert!(m.max_anticommutator_deviation() < 1e-12);
            assert!(m.max_hermiticity_deviation() < 1e-12);
        }
    }

    #[test]
    fn rejects_odd_and_oversized_counts() {
        assert!(matches!(build_majoranas(7), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_majoranas(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_majoranas(16), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn from_matrices_rejects_non_majoranas() {
        let m = build_majoranas(4).unwrap();
        let mut mats = m.matrices().to_vec();
        mats[1] = mats[0].clone();
        assert!(MajoranaSet::from_matrices(mats).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let m = build_majoranas(8).unwrap();
        let d = m.hilbert_dim();
        let id = vectorize(&CMatrix::identity(d, d)).unwrap();
        assert_abs_diff_eq!(inner_product(&id, &id).unwrap().re, 1.0, epsilon = 1e-15);

        let sqrt2 = C64::new(std::f64::consts::SQRT_2, 0.0);
        let p1 = vectorize(&(m.psi(1) * sqrt2)).unwrap();
        let p2 = vectorize(&(m.psi(2) * sqrt2)).unwrap();
        assert_abs_diff_eq!(inner_product(&p1, &p1).unwrap().re, 1.0, epsilon = 1e-14);
        assert!(inner_product(&p1, &p2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let a = OperatorVector::zeros(2);
        let b = OperatorVector::zeros(4);
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn vectorization_round_trip_and_zero() {
        let m = build_majoranas(4).unwrap();
        let v = vectorize(m.psi(1)).unwrap();
        assert_eq!(&devectorize(&v), m.psi(1));
        let zero = vectorize(&CMatrix::zeros(4, 4)).unwrap();
        assert_eq!(zero.data().norm(), 0.0);
        assert!(vectorize(&CMatrix::zeros(2, 3)).is_err());
        assert!(OperatorVector::from_data(CVector::zeros(5), 2).is_err());
    }

    #[test]
    fn row_stacking_kronecker_identity() {
        // vec(A X B) = (A ⊗ Bᵀ) vec(X)
        let m = build_majoranas(4).unwrap();
        let a = m.psi(1) * m.psi(3) + m.psi(2) * C64::new(0.3, -0.2);
        let x = m.psi(4) + m.psi(1) * m.psi(2) * C64::new(0.0, 1.5);
        let b = m.psi(3) * C64::new(2.0, 0.5) + CMatrix::identity(4, 4);
        let lhs = vectorize(&(&a * &x * &b)).unwrap();
        let rhs = a.kronecker(&b.transpose()) * vectorize(&x).unwrap().data();
        assert!((lhs.data() - rhs).norm() < 1e-12);
    }

    #[test]
    fn inner_product_is_positive_definite_on_random_operators() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = CMatrix::from_fn(8, 8, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let v = vectorize(&a).unwrap();
            let n = inner_product(&v, &v).unwrap();
            assert!(n.re > 0.0);
            assert!(n.im.abs() < 1e-15);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn operator(d: usize) -> impl Strategy<Value = CMatrix> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
                CMatrix::from_iterator(d, d, v.into_iter().map(|(r, i)| C64::new(r, i)))
            })
        }

        proptest! {
            #[test]
            fn vectorize_is_linear_and_invertible(a in operator(4), b in operator(4)) {
                let va = vectorize(&a).unwrap();
                let vb = vectorize(&b).unwrap();
                let sum = vectorize(&(&a + &b)).unwrap();
                prop_assert!((sum.data() - (va.data() + vb.data())).norm() < 1e-14);
                prop_assert_eq!(devectorize(&va), a);
            }

            #[test]
            fn inner_product_is_conjugate_symmetric(a in operator(4), b in operator(4)) {
                let va = vectorize(&a).unwrap();
                let vb = vectorize(&b).unwrap();
                let ab = inner_product(&va, &vb).unwrap();
                let ba = inner_product(&vb, &va).unwrap();
                prop_assert!((ab - ba.conj()).norm() < 1e-14);
            }
        }
    }
}
