//! Oracle and invariant checks runnable from the command line.

use std::fmt;

use crate::algebra::{
    build_majoranas, build_string_basis, vectorize, MajoranaSet, OperatorVector, Parity,
};
use crate::bilanczos::{bi_lanczos, projected_matrix, tridiagonal_matrix, BiLanczosOptions};
use crate::error::Result;
use crate::lindblad::{build_dissipative_part, build_full, Superoperator};
use crate::observables::{
    evolve_full, evolve_krylov, krylov_complexity, krylov_projections, population_distribution,
    TimeGrid,
};
use crate::syk::{build_hamiltonian, sample_couplings, DisorderSpec};
use crate::{max_abs, CMatrix, CVector, C64};

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        passed: value < limit,
        detail: format!("{value:.3e} (limit {limit:e})"),
    }
}

/// Single-sided Lanczos with full reorthogonalization for a Hermitian
/// superoperator; returns `b₁, b₂, …` until `bₙ ≤ tol·‖ℒX₀‖`.
pub fn hermitian_lanczos(l: &CMatrix, x0: &CVector, dim: usize, tol: f64) -> Vec<f64> {
    let scale = 1.0 / dim as f64;
    let ip = |a: &CVector, b: &CVector| a.dotc(b) * scale;
    let mut basis: Vec<CVector> = vec![x0.clone()];
    let mut bs = Vec::new();
    let threshold = tol * ip(&(l * x0), &(l * x0)).re.sqrt();
    while basis.len() < l.nrows() {
        let mut v = l * basis.last().expect("non-empty");
        for _ in 0..2 {
            for u in &basis {
                let c = ip(u, &v);
                v -= u * c;
            }
        }
        let b = ip(&v, &v).re.sqrt();
        if b <= threshold {
            break;
        }
        bs.push(b);
        basis.push(v / C64::new(b, 0.0));
    }
    bs
}

struct Setup {
    majoranas: MajoranaSet,
    x0: OperatorVector,
    spec: DisorderSpec,
}

impl Setup {
    fn new(seed: u64) -> Result<Self> {
        let majoranas = build_majoranas(8)?;
        let x0 = vectorize(&(majoranas.psi(1) * C64::new(std::f64::consts::SQRT_2, 0.0)))?;
        Ok(Self {
            majoranas,
            x0,
            spec: DisorderSpec::new(8, 4, 1.0, seed, 1)?,
        })
    }

    fn lindbladian(&self, mu: f64) -> Result<Superoperator> {
        let h = build_hamiltonian(&sample_couplings(&self.spec, 0)?, &self.majoranas)?;
        build_full(&h, &self.majoranas, mu)
    }
}

/// Runs every check at N = 8 on the realization drawn from `seed`.
pub fn run_verification(seed: u64) -> Result<Vec<Check>> {
    let s = Setup::new(seed)?;
    let d = s.majoranas.hilbert_dim();
    let opts = BiLanczosOptions::default();
    let mut out = Vec::new();

    out.push(check(
        "anticommutation",
        s.majoranas.max_anticommutator_deviation(),
        1e-12,
    ));

    let mu = 0.3;
    let ld = build_dissipative_part(&s.majoranas, mu)?;
    let basis = build_string_basis(&s.majoranas, Parity::All)?;
    let mut worst: f64 = 0.0;
    for (string, v) in basis.strings().iter().zip(basis.elements()) {
        let rate = if string.is_odd() {
            string.len()
        } else {
            8 - string.len()
        } as f64;
        let r = &ld * v.data() - v.data() * C64::new(0.0, mu * rate);
        worst = worst.max(r.camax());
    }
    out.push(check("dissipator string eigenvalues", worst, 1e-12));

    let decay = build_full(&CMatrix::zeros(d, d), &s.majoranas, mu)?;
    let mut worst: f64 = 0.0;
    for e in evolve_full(&decay, &s.x0, &TimeGrid::linear(10.0, 101)?)? {
        let exact = s.x0.data() * C64::new((-mu * e.time).exp(), 0.0);
        worst = worst.max(((e.vector.data() - exact).norm_squared() / d as f64).sqrt());
    }
    out.push(check("pure dissipation decay", worst, 1e-10));

    let closed = s.lindbladian(0.0)?;
    let k = bi_lanczos(&closed, &s.x0, &opts)?;
    let a_max = k.a.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let bc =
        k.b.iter()
            .zip(&k.c)
            .map(|(b, c)| (c - b).norm())
            .fold(0.0, f64::max);
    let lr = k
        .right_basis
        .iter()
        .zip(&k.left_basis)
        .map(|(r, l)| (r.data() - l.data()).camax())
        .fold(0.0, f64::max);
    let oracle = hermitian_lanczos(closed.matrix(), s.x0.data(), d, opts.tol);
    let n = oracle.len().min(k.b.len());
    let oracle_dev = if oracle.len() == k.b.len() {
        (0..n)
            .map(|i| (oracle[i] - k.b[i]).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    out.push(check("closed limit: |a_n|", a_max, 1e-8));
    out.push(check("closed limit: |b_n - c_n|", bc, 1e-8));
    out.push(check("closed limit: left = right basis", lr, 1e-7));
    out.push(check(
        "closed limit: b_n vs single-sided Lanczos",
        oracle_dev,
        1e-8,
    ));

    for mu in [0.025, 0.05, 0.1] {
        let l = s.lindbladian(mu)?;
        let k = bi_lanczos(&l, &s.x0, &opts)?;
        out.push(check("biorthogonality", k.biorthogonality_error(), 1e-8));
        let diff = tridiagonal_matrix(&k) - projected_matrix(&l, &k);
        out.push(check("tridiagonal projection", max_abs(&diff), 1e-7));
    }

    let grid = TimeGrid::linear(20.0, 41)?;
    for mu in [0.0, 0.05] {
        let l = s.lindbladian(mu)?;
        let k = bi_lanczos(&l, &s.x0, &opts)?;
        let chain = evolve_krylov(&k, &grid)?;
        let mut worst: f64 = 0.0;
        for (i, e) in evolve_full(&l, &s.x0, &grid)?.iter().enumerate() {
            let (p, q) = krylov_projections(&k, &e.vector)?;
            let full = krylov_complexity(p.as_slice(), q.as_slice())?;
            let kry = krylov_complexity(chain.p[i].as_slice(), chain.q[i].as_slice())?;
            worst = worst.max((full - kry).abs() / full.abs().max(1.0));
        }
        out.push(check("K(t) full vs chain", worst, 1e-6));
    }

    let zeno = s.lindbladian(1e4)?;
    let k = bi_lanczos(&zeno, &s.x0, &opts)?;
    out.push(Check {
        name: "strong dissipation M_K = 1",
        passed: k.dim() == 1,
        detail: format!("M_K = {}", k.dim()),
    });

    let l = s.lindbladian(0.05)?;
    let odd = build_string_basis(&s.majoranas, Parity::Odd)?;
    let series = evolve_full(&l, &s.x0, &TimeGrid::linear(20.0, 81)?)?;
    let mut herm: f64 = 0.0;
    let mut total: f64 = 0.0;
    let mut increase: f64 = 0.0;
    for (i, e) in series.iter().enumerate() {
        let xm = e.vector.to_matrix();
        herm = herm.max(max_abs(&(&xm - xm.adjoint())));
        total = total.max((population_distribution(e, &odd)?.total() - 1.0).abs());
        if i > 0 {
            increase = increase.max(e.norm_sq - series[i - 1].norm_sq);
        }
    }
    out.push(check("Hermiticity of X_t", herm, 1e-9));
    out.push(check("sum of string populations", total, 1e-10));
    out.push(Check {
        name: "norm non-increasing",
        passed: increase <= 0.0,
        detail: format!("largest step increase {increase:.3e}"),
    });

    let again = bi_lanczos(&l, &s.x0, &opts)?;
    let first = bi_lanczos(&l, &s.x0, &opts)?;
    out.push(Check {
        name: "determinism",
        passed: again == first,
        detail: "repeated bi-Lanczos runs compared bitwise".into(),
    });
    Ok(out)
}
