//! Two-sided (bi-)Lanczos tridiagonalization of a non-Hermitian superoperator.
//!
//! Starting from `|O₀) = |Õ₀) = |X₀)` the recursion builds right vectors
//! `|Oₙ)` and left vectors `|Õₙ)` with `(Õₙ|Oₘ) = δₙₘ` and
//!
//! ```text
//! ℒ |Oₙ)  = aₙ |Oₙ) + bₙ₊₁ |Oₙ₊₁) + cₙ |Oₙ₋₁)
//! ℒ†|Õₙ)  = aₙ*|Õₙ) + cₙ₊₁*|Õₙ₊₁) + bₙ |Õₙ₋₁)
//! ```
//!
//! Right vectors are unit-norm (`bₙ = ‖Aₙ‖`) and `cₙ = (Bₙ|Aₙ)/bₙ` fixes the
//! pairing `(Õₙ|Oₙ) = 1`.

use crate::algebra::OperatorVector;
use crate::error::{invalid, Error, Result};
use crate::lindblad::Superoperator;
use crate::{CMatrix, CVector, C64};

/// Largest tolerated `|(Õₙ|Oₘ) − δₙₘ|` after re-biorthogonalization.
pub const BIORTHOGONALITY_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct BiLanczosOptions {
    /// Relative tolerance for breakdown, alignment and pairing tests.
    pub tol: f64,
    /// Maximum Krylov dimension; `None` means `D²`.
    pub max_dim: Option<usize>,
    /// Stop when the new pair has `Re (Bₙ|Aₙ) ≤ 0`, i.e. when `cₙ` would not
    /// be positive. Without this the recursion continues with complex or
    /// negative `cₙ` until the space is exhausted.
    pub stop_on_indefinite: bool,
    /// Passes of full two-sided re-biorthogonalization per step.
    pub reorthogonalization_passes: usize,
}

impl Default for BiLanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_dim: None,
            stop_on_indefinite: true,
            reorthogonalization_passes: 2,
        }
    }
}

impl BiLanczosOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = Some(max_dim);
        self
    }

    pub fn with_stop_on_indefinite(mut self, stop: bool) -> Self {
        self.stop_on_indefinite = stop;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    /// `bₙ` fell below tolerance: the Krylov space is exhausted.
    Breakdown,
    /// `ℒ|Oₙ)` is parallel to `|Oₙ)`.
    Alignment,
    /// The next pair would have `Re (Bₙ|Aₙ) ≤ 0`.
    IndefinitePairing,
    /// The dimension limit was reached.
    MaxDim,
}

impl TerminationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationReason::Breakdown => "breakdown",
            TerminationReason::Alignment => "alignment",
            TerminationReason::IndefinitePairing => "indefinite_pairing",
            TerminationReason::MaxDim => "max_dim",
        }
    }
}

/// Output of [`bi_lanczos`].
#[derive(Clone, Debug, PartialEq)]
pub struct KrylovData {
    /// `a₀ … a_{M−1}`.
    pub a: Vec<C64>,
    /// `b₁ … b_{M−1}`.
    pub b: Vec<f64>,
    /// `c₁ … c_{M−1}`.
    pub c: Vec<C64>,
    pub right_basis: Vec<OperatorVector>,
    pub left_basis: Vec<OperatorVector>,
    pub termination: TerminationReason,
}

impl KrylovData {
    /// Krylov dimension `M_K`.
    pub fn dim(&self) -> usize {
        self.right_basis.len()
    }

    /// `max |(Õₙ|Oₘ) − δₙₘ|`.
    pub fn biorthogonality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (n, l) in self.left_basis.iter().enumerate() {
            for (m, r) in self.right_basis.iter().enumerate() {
                let target = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((l.inner_unchecked(r) - target).norm());
            }
        }
        worst
    }

    /// Gram matrix `Gₙₘ = (Oₙ|Oₘ)` of the right basis.
    pub fn right_gram(&self) -> CMatrix {
        gram(&self.right_basis)
    }

    pub fn max_abs_real_a(&self) -> f64 {
        self.a.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag_c(&self) -> f64 {
        self.c.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Largest `‖ℒ|Oₙ) − aₙ|Oₙ) − bₙ₊₁|Oₙ₊₁) − cₙ|Oₙ₋₁)‖` over interior `n`
    /// (those with a successor).
    pub fn recurrence_residual(&self, l: &Superoperator) -> f64 {
        let m = self.dim();
        let mut worst = 0.0_f64;
        for n in 0..m.saturating_sub(1) {
            let mut r = l.matrix() * self.right_basis[n].data()
                - self.right_basis[n].data() * self.a[n]
                - self.right_basis[n + 1].data() * C64::new(self.b[n], 0.0);
            if n > 0 {
                r -= self.right_basis[n - 1].data() * self.c[n - 1];
            }
            let dim = self.right_basis[n].dim() as f64;
            worst = worst.max((r.norm_squared() / dim).sqrt());
        }
        worst
    }
}

fn gram(vectors: &[OperatorVector]) -> CMatrix {
    let m = vectors.len();
    let mut g = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = vectors[i].inner_unchecked(&vectors[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

fn dotc(a: &CVector, b: &CVector, scale: f64) -> C64 {
    a.dotc(b) * scale
}

/// Runs the recursion from the normalized operator `x0`.
pub fn bi_lanczos(
    l: &Superoperator,
    x0: &OperatorVector,
    options: &BiLanczosOptions,
) -> Result<KrylovData> {
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(invalid(format!(
            "tolerance must be positive, got {}",
            options.tol
        )));
    }
    if x0.dim() != l.hilbert_dim() {
        return Err(invalid(format!(
            "initial operator of dimension {} for a superoperator on dimension {}",
            x0.dim(),
            l.hilbert_dim()
        )));
    }
    let norm = x0.norm_sq();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!(
            "initial operator must satisfy (X0|X0) = 1, got {norm}"
        )));
    }
    let dd = l.matrix().nrows();
    let max_dim = options.max_dim.unwrap_or(dd).min(dd);
    if max_dim == 0 {
        return Err(invalid("max_dim must be at least 1"));
    }

    let scale = 1.0 / l.hilbert_dim() as f64;
    let lmat = l.matrix();
    let ladj = l.adjoint();
    let tol = options.tol;

    let mut right: Vec<CVector> = vec![x0.data().clone()];
    let mut left: Vec<CVector> = vec![x0.data().clone()];
    let mut a = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut c: Vec<C64> = Vec::new();
    let mut breakdown_scale = None;

    let termination = loop {
        let n = right.len();
        let o = &right[n - 1];
        let ot = &left[n - 1];
        let lo = lmat * o;
        let an = dotc(ot, &lo, scale);
        a.push(an);

        let lo_norm = dotc(&lo, &lo, scale).re.sqrt();
        let threshold = *breakdown_scale.get_or_insert(tol * lo_norm.max(f64::MIN_POSITIVE));
        if lo_norm <= threshold {
            break TerminationReason::Breakdown;
        }
        let cos = dotc(o, &lo, scale).norm() / lo_norm;
        if 1.0 - cos < tol {
            break TerminationReason::Alignment;
        }
        if n >= max_dim {
            break TerminationReason::MaxDim;
        }

        let mut av = &lo - o * an;
        let mut bv = &ladj * ot - ot * an.conj();
        if n > 1 {
            av -= &right[n - 2] * c[n - 2];
            bv -= &left[n - 2] * C64::new(b[n - 2], 0.0);
        }
        for _ in 0..options.reorthogonalization_passes {
            for (r, lt) in right.iter().zip(&left) {
                let pa = dotc(lt, &av, scale);
                av -= r * pa;
                let pb = dotc(r, &bv, scale);
                bv -= lt * pb;
            }
        }

        let bn = dotc(&av, &av, scale).re.sqrt();
        if bn <= threshold {
            break TerminationReason::Breakdown;
        }
        let bv_norm = dotc(&bv, &bv, scale).re.sqrt();
        let w = dotc(&bv, &av, scale);
        if options.stop_on_indefinite && w.re <= tol * bn * bv_norm {
            break TerminationReason::IndefinitePairing;
        }
        if w.norm() <= tol * bn * bv_norm {
            return Err(Error::NumericalBreakdown {
                step: n,
                detail: format!("(B|A) = {w} vanishes for ‖A‖ = {bn:e}, ‖B‖ = {bv_norm:e}"),
            });
        }
        let cn = w / bn;
        let on = av / C64::new(bn, 0.0);
        let otn = bv / cn.conj();

        let mut worst = (dotc(&otn, &on, scale) - 1.0).norm();
        for (r, lt) in right.iter().zip(&left) {
            worst = worst
                .max(dotc(lt, &on, scale).norm())
                .max(dotc(&otn, r, scale).norm());
        }
        if worst > BIORTHOGONALITY_LIMIT {
            return Err(Error::NumericalBreakdown {
                step: n,
                detail: format!("biorthogonality lost: deviation {worst:e}"),
            });
        }
        right.push(on);
        left.push(otn);
        b.push(bn);
        c.push(cn);
    };

    let d = l.hilbert_dim();
    let wrap = |v: Vec<CVector>| {
        v.into_iter()
            .map(|x| OperatorVector::from_data(x, d))
            .collect::<Result<Vec<_>>>()
    };
    Ok(KrylovData {
        a,
        b,
        c,
        right_basis: wrap(right)?,
        left_basis: wrap(left)?,
        termination,
    })
}

/// The `M×M` matrix with `aₙ` on the diagonal, `bₙ` below and `cₙ` above it,
/// i.e. the representation `Tₙₘ = (Õₙ|ℒ|Oₘ)`.
pub fn tridiagonal_matrix(k: &KrylovData) -> CMatrix {
    let m = k.dim();
    let mut t = CMatrix::zeros(m, m);
    for n in 0..m {
        t[(n, n)] = k.a[n];
        if n + 1 < m {
            t[(n + 1, n)] = C64::new(k.b[n], 0.0);
            t[(n, n + 1)] = k.c[n];
        }
    }
    t
}

/// Direct projection `(Õₙ|ℒ|Oₘ)` for checking [`tridiagonal_matrix`].
pub fn projected_matrix(l: &Superoperator, k: &KrylovData) -> CMatrix {
    let m = k.dim();
    let scale = 1.0 / l.hilbert_dim() as f64;
    let images: Vec<CVector> = k
        .right_basis
        .iter()
        .map(|o| l.matrix() * o.data())
        .collect();
    CMatrix::from_fn(m, m, |i, j| dotc(k.left_basis[i].data(), &images[j], scale))
}
