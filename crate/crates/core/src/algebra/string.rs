use std::fmt;

use itertools::Itertools;

use super::{MajoranaSet, OperatorVector};
use crate::error::{invalid, Result};
use crate::{CMatrix, C64};

/// An ordered Majorana string `ψ_{i₁} ψ_{i₂} ⋯ ψ_{i_s}` with `i₁ < i₂ < … < i_s`.
///
/// Indices are 1-based. The empty string is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaString {
    indices: Vec<usize>,
}

impl MajoranaString {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(invalid("Majorana indices are 1-based"));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid(format!(
                "string indices must be strictly ascending: {indices:?}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn identity() -> Self {
        Self { indices: vec![] }
    }

    pub fn single(k: usize) -> Self {
        Self { indices: vec![k] }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.len() % 2 == 1
    }

    /// `2^{s/2}`, the factor making the string unit-norm under `(·|·)`.
    pub fn normalization(&self) -> f64 {
        2f64.powf(self.len() as f64 / 2.0)
    }

    /// Sign `σ` with `S† = σ S`; reversing `s` anticommuting factors gives `(−1)^{s(s−1)/2}`.
    pub fn adjoint_sign(&self) -> f64 {
        let s = self.len();
        if (s * s.saturating_sub(1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Symbolic product of raw strings: `ψ_A ψ_B = coeff · ψ_C`.
    ///
    /// Sorting `B` into `A` costs one sign per pair `a > b`; each repeated
    /// index then contributes `ψ_k² = 1/2`.
    pub fn product(&self, other: &Self) -> (f64, Self) {
        let inversions: usize = self
            .indices
            .iter()
            .map(|&a| other.indices.iter().filter(|&&b| a > b).count())
            .sum();
        let mut coeff = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            match (self.indices.get(i), other.indices.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    coeff *= 0.5;
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    out.push(a);
                    i += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (coeff, Self { indices: out })
    }

    /// Raw commutator `[ψ_A, ψ_B] = coeff · ψ_C`, or `None` when the strings commute.
    pub fn commutator(&self, other: &Self) -> Option<(f64, Self)> {
        let (ab, string) = self.product(other);
        let (ba, _) = other.product(self);
        let coeff = ab - ba;
        (coeff != 0.0).then_some((coeff, string))
    }
}

impl fmt::Display for MajoranaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices.iter().map(|k| format!("psi{k}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Which string lengths a basis contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
    All,
}

impl Parity {
    fn admits(self, length: usize) -> bool {
        match self {
            Parity::Odd => length % 2 == 1,
            Parity::Even => length % 2 == 0,
            Parity::All => true,
        }
    }
}

/// Orthonormal basis of unit-norm Majorana strings, ordered by length and
/// then lexicographically.
#[derive(Clone, Debug)]
pub struct StringBasis {
    strings: Vec<MajoranaString>,
    elements: Vec<OperatorVector>,
    parity: Parity,
    // row n holds conj(vec Ŝₙ)/D so that `overlap_matrix * x` gives (Ŝₙ|x)
    overlap_matrix: CMatrix,
}

impl StringBasis {
    pub fn strings(&self) -> &[MajoranaString] {
        &self.strings
    }

    pub fn elements(&self) -> &[OperatorVector] {
        &self.elements
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn position(&self, s: &MajoranaString) -> Option<usize> {
        self.strings.iter().position(|x| x == s)
    }

    /// All overlaps `(Ŝₙ|x)`.
    pub fn overlaps(&self, x: &OperatorVector) -> Vec<C64> {
        (&self.overlap_matrix * x.data()).iter().copied().collect()
    }

    /// `max |(Ŝᵢ|Ŝⱼ) − δᵢⱼ|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let g = a.inner_unchecked(b);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Builds every normalized string of the requested parity.
pub fn build_string_basis(majoranas: &MajoranaSet, parity: Parity) -> Result<StringBasis> {
    let n = majoranas.n_fermions();
    let d = majoranas.hilbert_dim();
    let mut strings = Vec::new();
    for length in (0..=n).filter(|&s| parity.admits(s)) {
        for combo in (1..=n).combinations(length) {
            strings.push(MajoranaString::new(combo)?);
        }
    }
    let elements = strings
        .iter()
        .map(|s| OperatorVector::from_matrix(&majoranas.string_matrix(s)))
        .collect::<Result<Vec<_>>>()?;
    let scale = 1.0 / d as f64;
    let overlap_matrix = CMatrix::from_fn(elements.len(), d * d, |r, c| {
        elements[r].data()[c].conj() * scale
    });
    Ok(StringBasis {
        strings,
        elements,
        parity,
        overlap_matrix,
    })
}
