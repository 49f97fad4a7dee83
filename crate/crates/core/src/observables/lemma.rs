//! Small-time checks of Krylov-basis minimality.
//!
//! For an orthonormal basis `G` sharing its first `m` elements with the
//! Krylov basis, `P_G(n, t) = O(t^{2m})` for `n ≥ m`, and the Krylov basis
//! minimizes the spread entropy at small times.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{OperatorVector, StringBasis};
use crate::bilanczos::KrylovData;
use crate::error::{invalid, Result};
use crate::lindblad::Superoperator;
use crate::{CVector, C64};

use super::evolution::{evolve_full, krylov_projections, EvolvedOperator, TimeGrid};
use super::spread::{
    krylov_population, population_from_overlaps, spread_complexity, PopulationConvention,
    PopulationDistribution,
};

const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Relative tolerance on fitted Taylor slopes.
pub const SLOPE_TOL: f64 = 0.05;
/// Slack in `F_K ≤ F_G + slack`.
pub const MINIMALITY_SLACK: f64 = 1e-9;
// populations below this are round-off from the amplitude level ~1e-16
const POPULATION_FLOOR: f64 = 1e-26;
// the leading term dominates when the next Taylor term is this small at t_max
const DOMINANCE: f64 = 0.1;

/// A complete orthonormal basis of one parity sector.
#[derive(Clone, Debug)]
pub struct TrialBasis {
    label: String,
    elements: Vec<OperatorVector>,
}

impl TrialBasis {
    pub fn new(label: impl Into<String>, elements: Vec<OperatorVector>) -> Result<Self> {
        if elements.is_empty() {
            return Err(invalid("trial basis is empty"));
        }
        let d = elements[0].dim();
        if elements.iter().any(|e| e.dim() != d) {
            return Err(invalid("trial basis elements have different dimensions"));
        }
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate().skip(i) {
                let g = a.inner_unchecked(b);
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).norm() > ORTHONORMALITY_TOL {
                    return Err(invalid(format!(
                        "trial basis not orthonormal: ({i}|{j}) = {g}"
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            elements,
        })
    }

    pub fn from_string_basis(basis: &StringBasis) -> Result<Self> {
        Self::new("string", basis.elements().to_vec())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> &[OperatorVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn overlaps(&self, x: &OperatorVector) -> Vec<C64> {
        self.elements.iter().map(|e| e.inner_unchecked(x)).collect()
    }
}

fn project_out(v: &mut CVector, basis: &[CVector], scale: f64) {
    for _ in 0..2 {
        for e in basis {
            let c = e.dotc(v) * scale;
            *v -= e * c;
        }
    }
}

/// Gram–Schmidt orthonormalization of the right Krylov vectors.
pub fn orthonormal_krylov(k: &KrylovData) -> Vec<OperatorVector> {
    let Some(first) = k.right_basis.first() else {
        return vec![];
    };
    let d = first.dim();
    let scale = 1.0 / d as f64;
    let mut out: Vec<CVector> = Vec::with_capacity(k.dim());
    for o in &k.right_basis {
        let mut v = o.data().clone();
        project_out(&mut v, &out, scale);
        let n = (v.norm_squared() * scale).sqrt();
        if n > 1e-10 {
            out.push(v / C64::new(n, 0.0));
        }
    }
    out.into_iter()
        .map(|v| OperatorVector::from_data(v, d).expect("dimension preserved"))
        .collect()
}

/// First `m` orthonormalized Krylov elements completed by a Haar-random
/// orthonormal complement of the sector spanned by `sector`.
///
/// The complement is drawn as real Gaussian combinations of the Hermitian
/// rescaled strings `i^{s(s−1)/2} Ŝ`, orthogonalized against everything
/// before it.
pub fn random_trial_basis<R: Rng + ?Sized>(
    k: &KrylovData,
    m: usize,
    sector: &StringBasis,
    rng: &mut R,
    label: impl Into<String>,
) -> Result<TrialBasis> {
    let krylov = orthonormal_krylov(k);
    if m == 0 || m > krylov.len() {
        return Err(invalid(format!(
            "cannot keep {m} Krylov elements out of {}",
            krylov.len()
        )));
    }
    let size = sector.len();
    let d = krylov[0].dim();
    let scale = 1.0 / d as f64;
    let hermitian: Vec<CVector> = sector
        .strings()
        .iter()
        .zip(sector.elements())
        .map(|(s, e)| {
            let phase = C64::new(0.0, 1.0).powu((s.len() * s.len().saturating_sub(1) / 2) as u32);
            e.data() * phase
        })
        .collect();
    let mut basis: Vec<CVector> = krylov[..m].iter().map(|e| e.data().clone()).collect();
    let mut attempts = 0;
    while basis.len() < size {
        attempts += 1;
        if attempts > 4 * size {
            return Err(invalid("could not complete the trial basis"));
        }
        let mut v = CVector::zeros(d * d);
        for h in &hermitian {
            let g: f64 = rng.sample(StandardNormal);
            v += h * C64::new(g, 0.0);
        }
        project_out(&mut v, &basis, scale);
        let n = (v.norm_squared() * scale).sqrt();
        if n > 1e-6 {
            basis.push(v / C64::new(n, 0.0));
        }
    }
    TrialBasis::new(
        label,
        basis
            .into_iter()
            .map(|v| OperatorVector::from_data(v, d))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Least-squares slope of `ln y` against `ln t`.
pub fn log_log_slope(t: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, &y)| y > POPULATION_FLOOR)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Outcome for one trial basis.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub label: String,
    /// `F_G(t)` on the grid.
    pub entropy: Vec<f64>,
    /// `(n, slope)` for elements whose leading Taylor term dominates.
    pub leading_slopes: Vec<(usize, f64)>,
    /// Largest `|(Gₙ|X_t)| / (t^m ‖ℒ‖^m e^{t‖ℒ‖} / m!)` over `n ≥ m` and the
    /// grid. The Taylor remainder bound makes this at most 1 whenever the
    /// first `m` orders vanish.
    pub max_envelope_ratio: f64,
    /// Slope of `Σ_{n≥m} P_G(n, t)`.
    pub tail_slope: f64,
    /// `max_t (F_K − F_G)`, right-population functional.
    pub max_minimality_gap: f64,
    /// `max_t (F_K − F_G)`, biorthogonal modulus functional.
    pub max_minimality_gap_modulus: f64,
}

impl TrialOutcome {
    pub fn slopes_ok(&self, m: usize) -> bool {
        let target = 2.0 * m as f64;
        let close = |s: f64| (s - target).abs() <= SLOPE_TOL * target;
        !self.leading_slopes.is_empty()
            && self.leading_slopes.iter().all(|&(_, s)| close(s))
            && self.max_envelope_ratio <= 1.0
            && close(self.tail_slope)
    }

    pub fn minimal(&self) -> bool {
        self.max_minimality_gap <= MINIMALITY_SLACK
    }

    pub fn minimal_modulus(&self) -> bool {
        self.max_minimality_gap_modulus <= MINIMALITY_SLACK
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub m: usize,
    pub times: Vec<f64>,
    /// `F_K(t)` from the orthonormalized right Krylov vectors.
    pub krylov_entropy: Vec<f64>,
    /// `F_K(t)` from `|qₙpₙ|` weights.
    pub krylov_entropy_modulus: Vec<f64>,
    pub trials: Vec<TrialOutcome>,
}

impl LemmaReport {
    pub fn slopes_ok(&self) -> bool {
        self.trials.iter().all(|t| t.slopes_ok(self.m))
    }

    pub fn minimality_ok(&self) -> bool {
        self.trials.iter().all(TrialOutcome::minimal)
    }

    pub fn minimality_ok_modulus(&self) -> bool {
        self.trials.iter().all(TrialOutcome::minimal_modulus)
    }

    pub fn passed(&self) -> bool {
        self.slopes_ok() && self.minimality_ok()
    }

    /// Largest deviation of a leading or tail slope from `2m`, relative.
    pub fn worst_slope_deviation(&self) -> f64 {
        let target = 2.0 * self.m as f64;
        self.trials
            .iter()
            .flat_map(|t| {
                t.leading_slopes
                    .iter()
                    .map(|&(_, s)| s)
                    .chain(std::iter::once(t.tail_slope))
            })
            .map(|s| (s - target).abs() / target)
            .fold(0.0, f64::max)
    }

    pub fn worst_minimality_gap(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| t.max_minimality_gap)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn worst_minimality_gap_modulus(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| t.max_minimality_gap_modulus)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

// ‖ℒ‖₂ ≤ √(‖ℒ‖₁‖ℒ‖_∞)
fn spectral_norm_bound(l: &crate::CMatrix) -> f64 {
    let col = l
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = l
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    (col * row).sqrt()
}

fn entropy(p: &PopulationDistribution) -> f64 {
    spread_complexity(p).entropy
}

/// Runs the Taylor-order and minimality checks for every trial basis.
pub fn lemma_check(
    l: &Superoperator,
    x0: &OperatorVector,
    k: &KrylovData,
    m: usize,
    trial_bases: &[TrialBasis],
    t_grid: &TimeGrid,
) -> Result<LemmaReport> {
    let krylov = orthonormal_krylov(k);
    if m == 0 || m > krylov.len() {
        return Err(invalid(format!("m = {m} outside 1..={}", krylov.len())));
    }
    let times = t_grid.times();
    if times.iter().any(|&t| t <= 0.0) {
        return Err(invalid("lemma time grid must be strictly positive"));
    }
    for basis in trial_bases {
        for (j, e) in krylov[..m].iter().enumerate() {
            let g = basis.elements().get(j).map(|b| b.inner_unchecked(e).norm());
            if g.is_none_or(|g| (g - 1.0).abs() > 1e-8) {
                return Err(invalid(format!(
                    "trial basis '{}' does not share Krylov element {j}",
                    basis.label()
                )));
            }
        }
    }

    let series = evolve_full(l, x0, t_grid)?;

    // F_K on both functionals
    let mut krylov_entropy = Vec::with_capacity(times.len());
    let mut krylov_entropy_modulus = Vec::with_capacity(times.len());
    for e in &series {
        let w: Vec<f64> = krylov
            .iter()
            .map(|g| g.inner_unchecked(&e.vector).norm_sqr())
            .collect();
        krylov_entropy.push(entropy(&PopulationDistribution::from_weights(w, "krylov")?));
        let (p, q) = krylov_projections(k, &e.vector)?;
        let pk = krylov_population(p.as_slice(), q.as_slice(), PopulationConvention::Modulus)?;
        krylov_entropy_modulus.push(entropy(&pk));
    }

    // Taylor coefficients of the amplitudes: (it)^j ℒ^j X₀ / j!
    let taylor =
        |j: usize| C64::new(0.0, 1.0).powu(j as u32) / (1..=j).map(|k| k as f64).product::<f64>();
    let mut power = x0.data().clone();
    for _ in 0..m {
        power = l.matrix() * power;
    }
    let lead = &power * taylor(m);
    let next = l.matrix() * &power * taylor(m + 1);
    let lead = OperatorVector::from_data(lead, x0.dim())?;
    let next = OperatorVector::from_data(next, x0.dim())?;
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    let op_norm = spectral_norm_bound(l.matrix());
    let m_factorial: f64 = (1..=m).map(|k| k as f64).product();
    let envelope: Vec<f64> = times
        .iter()
        .map(|&t| (t * op_norm).powi(m as i32) * (t * op_norm).exp() / m_factorial)
        .collect();

    let mut trials = Vec::with_capacity(trial_bases.len());
    for basis in trial_bases {
        let overlaps: Vec<Vec<C64>> = series
            .iter()
            .map(|e: &EvolvedOperator| basis.overlaps(&e.vector))
            .collect();
        let populations: Vec<PopulationDistribution> = overlaps
            .iter()
            .zip(&series)
            .map(|(ov, e)| population_from_overlaps(ov, e.norm_sq, basis.label()))
            .collect::<Result<_>>()?;
        let entropy_g: Vec<f64> = populations.iter().map(entropy).collect();

        let lead_ov = basis.overlaps(&lead);
        let next_ov = basis.overlaps(&next);
        let lead_norm = (lead.norm_sq()).sqrt();
        let mut leading_slopes = Vec::new();
        let mut max_envelope_ratio: f64 = 0.0;
        for n in m..basis.len() {
            for (ov, bound) in overlaps.iter().zip(&envelope) {
                max_envelope_ratio = max_envelope_ratio.max(ov[n].norm() / bound);
            }
            let a = lead_ov[n].norm();
            let dominated = a > 1e-6 * lead_norm && next_ov[n].norm() * t_max <= DOMINANCE * a;
            if !dominated {
                continue;
            }
            let y: Vec<f64> = populations.iter().map(|p| p.probabilities[n]).collect();
            if let Some(slope) = log_log_slope(&times, &y) {
                leading_slopes.push((n, slope));
            }
        }
        let tail: Vec<f64> = populations
            .iter()
            .map(|p| p.probabilities[m..].iter().sum())
            .collect();
        let tail_slope = log_log_slope(&times, &tail).unwrap_or(f64::NAN);

        let gap = |fk: &[f64]| {
            fk.iter()
                .zip(&entropy_g)
                .map(|(k, g)| k - g)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        trials.push(TrialOutcome {
            label: basis.label().to_string(),
            max_minimality_gap: gap(&krylov_entropy),
            max_minimality_gap_modulus: gap(&krylov_entropy_modulus),
            entropy: entropy_g,
            leading_slopes,
            max_envelope_ratio,
            tail_slope,
        });
    }
    Ok(LemmaReport {
        m,
        times,
        krylov_entropy,
        krylov_entropy_modulus,
        trials,
    })
}
