use crate::algebra::StringBasis;
use crate::error::{invalid, Error, Result};
use crate::C64;

use super::EvolvedOperator;

/// Relative tolerance on `Σₙ|(Gₙ|X)|² = (X|X)` for a complete basis.
pub const COMPLETENESS_TOL: f64 = 1e-8;

const NEGATIVE_CLAMP: f64 = 1e-12;

/// How the biorthogonal weights `qₙpₙ` become probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PopulationConvention {
    /// `|qₙpₙ| / Σ|qₘpₘ|`.
    #[default]
    Modulus,
    /// `Re(qₙpₙ) / Σ Re(qₘpₘ)`, negative entries clamped to zero.
    RealPart,
}

/// `P(n, t)` over the elements of one basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationDistribution {
    pub probabilities: Vec<f64>,
    pub basis_label: String,
}

impl PopulationDistribution {
    /// Normalizes non-negative weights. Entries above `−1e−12` relative to the
    /// total are clamped to zero; anything more negative is an error.
    pub fn from_weights(weights: Vec<f64>, basis_label: impl Into<String>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateState(format!("total weight {total}")));
        }
        let mut probabilities = Vec::with_capacity(weights.len());
        for w in weights {
            let p = w / total;
            if p < -NEGATIVE_CLAMP {
                return Err(invalid(format!("negative population {p:e}")));
            }
            probabilities.push(p.max(0.0));
        }
        Ok(Self {
            probabilities,
            basis_label: basis_label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Shannon entropy `F` and spread complexity `C = e^F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadComplexity {
    pub entropy: f64,
    pub complexity: f64,
}

/// Krylov complexity `K = Re[Σ n qₙpₙ / Σ qₙpₙ]` together with the imaginary
/// part of the ratio.
pub fn krylov_complexity_with_residue(p: &[C64], q: &[C64]) -> Result<(f64, f64)> {
    if p.len() != q.len() {
        return Err(invalid("p and q must have equal length"));
    }
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (n, (p, q)) in p.iter().zip(q).enumerate() {
        let w = p * q;
        num += w * n as f64;
        den += w;
        scale += w.norm();
    }
    if den.norm() <= 1e-14 * scale || den.norm() == 0.0 {
        return Err(Error::DegenerateState(format!("Σ qₙpₙ = {den} vanishes")));
    }
    let ratio = num / den;
    if ratio.im.abs() > 1e-6 {
        log::debug!("Krylov complexity has imaginary residue {:e}", ratio.im);
    }
    Ok((ratio.re, ratio.im))
}

pub fn krylov_complexity(p: &[C64], q: &[C64]) -> Result<f64> {
    krylov_complexity_with_residue(p, q).map(|(k, _)| k)
}

/// Mean chain position `Σ n P(n)` of a population.
pub fn expected_position(p: &PopulationDistribution) -> f64 {
    p.probabilities
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Krylov complexity under a population convention. `Modulus` gives the mean
/// position of the normalized `|qₙpₙ|` weights, which stays inside
/// `[0, M_K - 1]`; `RealPart` gives the biorthogonal ratio `Re[Σ n qₙpₙ / Σ qₙpₙ]`.
/// The two agree whenever every `qₙpₙ` is real and non-negative.
pub fn krylov_complexity_with(
    p: &[C64],
    q: &[C64],
    convention: PopulationConvention,
) -> Result<f64> {
    match convention {
        PopulationConvention::Modulus => {
            Ok(expected_position(&krylov_population(p, q, convention)?))
        }
        PopulationConvention::RealPart => krylov_complexity(p, q),
    }
}

/// Population on the Krylov chain from biorthogonal weights `qₙpₙ`.
pub fn krylov_population(
    p: &[C64],
    q: &[C64],
    convention: PopulationConvention,
) -> Result<PopulationDistribution> {
    if p.len() != q.len() {
        return Err(invalid("p and q must have equal length"));
    }
    let weights: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(p, q)| {
            let w = p * q;
            match convention {
                PopulationConvention::Modulus => w.norm(),
                PopulationConvention::RealPart => w.re.max(0.0),
            }
        })
        .collect();
    PopulationDistribution::from_weights(weights, "krylov")
}

/// Population over a complete orthonormal basis given the overlaps `(Gₙ|X)`
/// and `(X|X)`.
pub fn population_from_overlaps(
    overlaps: &[C64],
    norm_sq: f64,
    basis_label: impl Into<String>,
) -> Result<PopulationDistribution> {
    let weights: Vec<f64> = overlaps.iter().map(|z| z.norm_sqr()).collect();
    let captured: f64 = weights.iter().sum();
    if (captured - norm_sq).abs() > COMPLETENESS_TOL * norm_sq.max(f64::MIN_POSITIVE) {
        return Err(Error::BasisIncomplete {
            captured,
            norm: norm_sq,
        });
    }
    PopulationDistribution::from_weights(weights, basis_label)
}

/// `P(n, t) = |(Ŝₙ|X_t)|² / Σₘ|(Ŝₘ|X_t)|²` over a Majorana string basis.
pub fn population_distribution(
    x_t: &EvolvedOperator,
    basis: &StringBasis,
) -> Result<PopulationDistribution> {
    if basis.elements().first().map(|e| e.dim()) != Some(x_t.vector.dim()) {
        return Err(invalid("basis and operator dimensions differ"));
    }
    population_from_overlaps(&basis.overlaps(&x_t.vector), x_t.norm_sq, "string")
}

pub fn spread_complexity(p: &PopulationDistribution) -> SpreadComplexity {
    let entropy: f64 = p
        .probabilities
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    SpreadComplexity {
        entropy,
        complexity: entropy.exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_majoranas, build_string_basis, vectorize, Parity};
    use crate::observables::{evolve_full, TimeGrid};
    use crate::{build_full, build_hamiltonian, CMatrix, CouplingTensor};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn complexity_at_time_zero() {
        assert_eq!(
            krylov_complexity(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)]).unwrap(),
            0.0
        );
        let p =
            krylov_population(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)], Default::default()).unwrap();
        assert_eq!(p.probabilities, vec![1.0, 0.0]);
        let s = spread_complexity(&p);
        assert_eq!(s.entropy, 0.0);
        assert_eq!(s.complexity, 1.0);
    }

    #[test]
    fn closed_case_complexity_is_real_average() {
        let p = [
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.64),
            C64::new(-0.48, 0.0),
        ];
        let q: Vec<C64> = p.iter().map(|z| z.conj()).collect();
        let (k, im) = krylov_complexity_with_residue(&p, &q).unwrap();
        let w: Vec<f64> = p.iter().map(|z| z.norm_sqr()).collect();
        let expected = (w[1] + 2.0 * w[2]) / w.iter().sum::<f64>();
        assert!((k - expected).abs() < 1e-15);
        assert_eq!(im, 0.0);
        let mod_p = krylov_population(&p, &q, PopulationConvention::Modulus).unwrap();
        let re_p = krylov_population(&p, &q, PopulationConvention::RealPart).unwrap();
        for (a, b) in mod_p.probabilities.iter().zip(&re_p.probabilities) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_weights_are_errors() {
        assert!(matches!(
            krylov_complexity(&[c(0.0)], &[c(0.0)]),
            Err(Error::DegenerateState(_))
        ));
        assert!(matches!(
            krylov_population(&[c(0.0)], &[c(1.0)], Default::default()),
            Err(Error::DegenerateState(_))
        ));
        // cancelling weights
        assert!(krylov_complexity(&[c(1.0), c(1.0)], &[c(1.0), c(-1.0)]).is_err());
    }

    #[test]
    fn spread_complexity_examples() {
        let uniform = PopulationDistribution::from_weights(vec![1.0; 128], "u").unwrap();
        assert!((spread_complexity(&uniform).complexity - 128.0).abs() < 1e-10);
        let half = PopulationDistribution::from_weights(vec![0.5, 0.5], "h").unwrap();
        assert!((spread_complexity(&half).complexity - 2.0).abs() < 1e-14);
    }

    #[test]
    fn population_sums_to_one_and_starts_localized() {
        let m = build_majoranas(8).unwrap();
        let basis = build_string_basis(&m, Parity::Odd).unwrap();
        let x = vectorize(&(m.psi(1) * c(std::f64::consts::SQRT_2))).unwrap();
        let mut cpl = CouplingTensor::zeros(8, 4).unwrap();
        cpl.set(&[1, 2, 3, 4], 1.0).unwrap();
        cpl.set(&[3, 5, 6, 8], -0.7).unwrap();
        let h = build_hamiltonian(&cpl, &m).unwrap();
        let l = build_full(&h, &m, 0.1).unwrap();
        let series = evolve_full(&l, &x, &TimeGrid::linear(2.0, 5).unwrap()).unwrap();
        let p0 = population_distribution(&series[0], &basis).unwrap();
        assert_eq!(p0.probabilities[0], 1.0);
        assert!(p0.probabilities[1..].iter().all(|&p| p == 0.0));
        for e in &series {
            let p = population_distribution(e, &basis).unwrap();
            assert!((p.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_vertex_support_matches_commutator_expansion() {
        // With only J₁₂₃₄, ψ₁ mixes with ψ₂ψ₃ψ₄ and nothing else.
        let m = build_majoranas(8).unwrap();
        let basis = build_string_basis(&m, Parity::Odd).unwrap();
        let mut cpl = CouplingTensor::zeros(8, 4).unwrap();
        cpl.set(&[1, 2, 3, 4], 1.0).unwrap();
        let h = build_hamiltonian(&cpl, &m).unwrap();
        let l = build_full(&h, &m, 0.0).unwrap();
        let x = vectorize(&(m.psi(1) * c(std::f64::consts::SQRT_2))).unwrap();
        let e = evolve_full(&l, &x, &TimeGrid::points(vec![0.3]).unwrap()).unwrap();
        let p = population_distribution(&e[0], &basis).unwrap();
        let target = basis
            .position(&crate::MajoranaString::new(vec![2, 3, 4]).unwrap())
            .unwrap();
        for (n, &pn) in p.probabilities.iter().enumerate() {
            if n != 0 && n != target {
                assert!(pn < 1e-20, "{}", basis.strings()[n]);
            }
        }
        assert!(p.probabilities[target] > 1e-3);
        // on the normalized pair (√2ψ₁, 2^{3/2}ψ₂ψ₃ψ₄) the commutator with H is σˣ/2
        assert!((p.probabilities[target] - 0.15f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn incomplete_basis_is_detected() {
        let m = build_majoranas(4).unwrap();
        let basis = build_string_basis(&m, Parity::Odd).unwrap();
        let x = vectorize(&CMatrix::identity(4, 4)).unwrap();
        let e = EvolvedOperator {
            time: 0.0,
            norm_sq: x.norm_sq(),
            vector: x,
        };
        assert!(matches!(
            population_distribution(&e, &basis),
            Err(Error::BasisIncomplete { .. })
        ));
    }
}
