use std::collections::HashMap;

use crate::algebra::OperatorVector;
use crate::bilanczos::{tridiagonal_matrix, KrylovData};
use crate::error::{invalid, Result};
use crate::lindblad::Superoperator;
use crate::{CMatrix, CVector, C64};

/// Time points, in units of `1/J`.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeGrid {
    /// `0, step, 2·step, …` with `points` entries.
    Linear { step: f64, points: usize },
    /// Arbitrary non-decreasing, non-negative times.
    Points(Vec<f64>),
}

impl TimeGrid {
    /// `n_times` equally spaced points on `[0, t_max]`.
    pub fn linear(t_max: f64, n_times: usize) -> Result<Self> {
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(invalid(format!(
                "t_max must be finite and >= 0, got {t_max}"
            )));
        }
        if n_times == 0 {
            return Err(invalid("a time grid needs at least one point"));
        }
        if n_times == 1 && t_max != 0.0 {
            return Err(invalid("a single-point grid must have t_max = 0"));
        }
        let step = if n_times == 1 {
            0.0
        } else {
            t_max / (n_times - 1) as f64
        };
        Ok(TimeGrid::Linear {
            step,
            points: n_times,
        })
    }

    /// `n` log-spaced points on `[t_min, t_max]`.
    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && n >= 2) {
            return Err(invalid(format!(
                "log grid needs 0 < t_min < t_max and n >= 2, got [{t_min}, {t_max}], n = {n}"
            )));
        }
        let (l0, l1) = (t_min.ln(), t_max.ln());
        Self::points(
            (0..n)
                .map(|k| (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp())
                .collect(),
        )
    }

    pub fn points(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("a time grid needs at least one point"));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(invalid("times must be finite and non-negative"));
        }
        if !times.windows(2).all(|w| w[0] <= w[1]) {
            return Err(invalid("times must be non-decreasing"));
        }
        Ok(TimeGrid::Points(times))
    }

    pub fn times(&self) -> Vec<f64> {
        match self {
            TimeGrid::Linear { step, points } => (0..*points).map(|k| k as f64 * step).collect(),
            TimeGrid::Points(t) => t.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TimeGrid::Linear { points, .. } => *points,
            TimeGrid::Points(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `X_t = e^{iℒt} X₀` at one grid time.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolvedOperator {
    pub time: f64,
    pub vector: OperatorVector,
    /// `(X_t|X_t)`.
    pub norm_sq: f64,
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Applies `e^{G t}` to `x0` at each grid time by stepping between points.
///
/// Short steps (`‖GΔt‖₁ ≤ ½`) use a Taylor series on the vector; longer steps
/// use a Padé scaling-and-squaring exponential, computed once per distinct
/// step length.
pub(crate) fn propagate(generator: &CMatrix, x0: &CVector, grid: &TimeGrid) -> Vec<CVector> {
    let norm = one_norm(generator);
    let mut cache: HashMap<u64, CMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(grid.len());
    let mut x = x0.clone();
    let mut now = 0.0;
    for t in grid.times() {
        let dt = t - now;
        if dt > 0.0 {
            x = if norm * dt <= 0.5 {
                taylor_step(generator, &x, dt)
            } else {
                let u = cache
                    .entry(dt.to_bits())
                    .or_insert_with(|| (generator * C64::new(dt, 0.0)).exp());
                &*u * &x
            };
        }
        now = t;
        out.push(x.clone());
    }
    out
}

fn taylor_step(generator: &CMatrix, x: &CVector, dt: f64) -> CVector {
    let mut term = x.clone();
    let mut sum = x.clone();
    for k in 1..64 {
        term = generator * &term * C64::new(dt / k as f64, 0.0);
        sum += &term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Full superoperator route.
pub fn evolve_full(
    l: &Superoperator,
    x0: &OperatorVector,
    grid: &TimeGrid,
) -> Result<Vec<EvolvedOperator>> {
    if x0.dim() != l.hilbert_dim() {
        return Err(invalid(
            "initial operator and superoperator dimensions differ",
        ));
    }
    let norm = x0.norm_sq();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!(
            "initial operator must satisfy (X0|X0) = 1, got {norm}"
        )));
    }
    let d = l.hilbert_dim();
    propagate(&l.generator(), x0.data(), grid)
        .into_iter()
        .zip(grid.times())
        .map(|(v, time)| {
            let vector = OperatorVector::from_data(v, d)?;
            let norm_sq = vector.norm_sq();
            Ok(EvolvedOperator {
                time,
                vector,
                norm_sq,
            })
        })
        .collect()
}

/// Chain amplitudes `pₙ(t) = (Õₙ|X_t)` and `qₙ(t) = (X_t|Oₙ)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KrylovAmplitudes {
    pub times: Vec<f64>,
    pub p: Vec<CVector>,
    pub q: Vec<CVector>,
}

impl KrylovAmplitudes {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Krylov chain route: `p(t) = e^{iTt} e₀` and `q = conj(G p)` with `G` the
/// right-basis Gram matrix, which is exact whenever `X_t` stays in the span
/// of the right basis.
pub fn evolve_krylov(k: &KrylovData, grid: &TimeGrid) -> Result<KrylovAmplitudes> {
    let m = k.dim();
    if m == 0 {
        return Err(invalid("empty Krylov data"));
    }
    let generator = tridiagonal_matrix(k) * C64::new(0.0, 1.0);
    let gram = k.right_gram();
    let mut seed = CVector::zeros(m);
    seed[0] = C64::new(1.0, 0.0);
    let p = propagate(&generator, &seed, grid);
    let q = p.iter().map(|p| (&gram * p).map(|z| z.conj())).collect();
    Ok(KrylovAmplitudes {
        times: grid.times(),
        p,
        q,
    })
}

/// `(pₙ, qₙ) = ((Õₙ|X), (X|Oₙ))` projected from a full-space operator.
pub fn krylov_projections(k: &KrylovData, x: &OperatorVector) -> Result<(CVector, CVector)> {
    if k.right_basis.first().map(|o| o.dim()) != Some(x.dim()) {
        return Err(invalid("operator and Krylov basis dimensions differ"));
    }
    let p = CVector::from_iterator(k.dim(), k.left_basis.iter().map(|l| l.inner_unchecked(x)));
    let q = CVector::from_iterator(k.dim(), k.right_basis.iter().map(|o| x.inner_unchecked(o)));
    Ok((p, q))
}
