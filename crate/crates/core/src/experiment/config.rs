use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{MajoranaSet, MajoranaString, OperatorVector};
use crate::error::{invalid, Error, Result};
use crate::lindblad::MAX_SUPEROPERATOR_HILBERT_DIM;
use crate::syk::DisorderSpec;

/// Bases in which spread complexity is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Krylov,
    String,
}

/// Experiment parameters, read from a TOML file whose keys are exactly the
/// field names below (`N`, `q`, `J`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "N", default = "defaults::n")]
    pub n_fermions: usize,
    #[serde(default = "defaults::q")]
    pub q: usize,
    #[serde(rename = "J", default = "defaults::j")]
    pub coupling: f64,
    #[serde(default = "defaults::mu_values")]
    pub mu_values: Vec<f64>,
    #[serde(default = "defaults::t_max")]
    pub t_max: f64,
    #[serde(default = "defaults::n_times")]
    pub n_times: usize,
    #[serde(default = "defaults::n_realizations")]
    pub n_realizations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::initial_operator")]
    pub initial_operator: String,
    #[serde(default = "defaults::bases")]
    pub bases: Vec<BasisKind>,
    #[serde(default = "defaults::outputs")]
    pub outputs: PathBuf,
}

mod defaults {
    use super::BasisKind;
    use std::path::PathBuf;

    pub fn n() -> usize {
        8
    }
    pub fn q() -> usize {
        4
    }
    pub fn j() -> f64 {
        1.0
    }
    pub fn mu_values() -> Vec<f64> {
        vec![0.0, 0.025, 0.05, 0.075, 0.1]
    }
    pub fn t_max() -> f64 {
        120.0
    }
    pub fn n_times() -> usize {
        241
    }
    pub fn n_realizations() -> usize {
        200
    }
    pub fn initial_operator() -> String {
        "sqrt2*psi1".into()
    }
    pub fn bases() -> Vec<BasisKind> {
        vec![BasisKind::Krylov, BasisKind::String]
    }
    pub fn outputs() -> PathBuf {
        PathBuf::from("results")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_fermions: defaults::n(),
            q: defaults::q(),
            coupling: defaults::j(),
            mu_values: defaults::mu_values(),
            t_max: defaults::t_max(),
            n_times: defaults::n_times(),
            n_realizations: defaults::n_realizations(),
            seed: 0,
            initial_operator: defaults::initial_operator(),
            bases: defaults::bases(),
            outputs: defaults::outputs(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let n = self.n_fermions;
        if n < 2 || n % 2 != 0 {
            return bad(format!("N must be even and >= 2, got {n}"));
        }
        if n / 2 >= usize::BITS as usize || (1usize << (n / 2)) > MAX_SUPEROPERATOR_HILBERT_DIM {
            return Err(Error::ResourceLimit(format!(
                "N = {n} needs a dense superoperator beyond Hilbert dimension \
                 {MAX_SUPEROPERATOR_HILBERT_DIM}"
            )));
        }
        if self.q < 2 || self.q % 2 != 0 || self.q > n {
            return bad(format!("q must be even with 2 <= q <= N, got {}", self.q));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return bad(format!("J must be positive, got {}", self.coupling));
        }
        if self.mu_values.is_empty() {
            return bad("mu_values is empty".into());
        }
        if self.mu_values.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return bad("mu_values must be finite and >= 0".into());
        }
        if !self.mu_values.windows(2).all(|w| w[0] < w[1]) {
            return bad("mu_values must be strictly ascending".into());
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return bad(format!("t_max must be >= 0, got {}", self.t_max));
        }
        if self.n_times == 0 {
            return bad("n_times must be positive".into());
        }
        if self.n_times == 1 && self.t_max != 0.0 {
            return bad("n_times = 1 requires t_max = 0".into());
        }
        if self.n_realizations == 0 {
            return bad("n_realizations must be positive".into());
        }
        if self.bases.is_empty() {
            return bad("bases must name at least one of krylov, string".into());
        }
        let x0: InitialOperator = self.initial_operator.parse()?;
        if x0.string().indices().last().is_some_and(|&k| k > n) {
            return bad(format!(
                "initial_operator '{}' needs more than N = {n} Majoranas",
                self.initial_operator
            ));
        }
        Ok(())
    }

    pub fn disorder(&self) -> Result<DisorderSpec> {
        DisorderSpec::new(
            self.n_fermions,
            self.q,
            self.coupling,
            self.seed,
            self.n_realizations,
        )
    }

    pub fn wants(&self, basis: BasisKind) -> bool {
        self.bases.contains(&basis)
    }

    /// Dissipation strengths `μ = (μ/J)·J`.
    pub fn mu_absolute(&self) -> Vec<f64> {
        self.mu_values.iter().map(|m| m * self.coupling).collect()
    }
}

/// A unit-norm Majorana string used as `X₀`, written as `*`-separated
/// factors: `psiK` for each Majorana and optionally `sqrt2` normalization
/// factors, e.g. `sqrt2*psi1` or `sqrt2*sqrt2*sqrt2*psi1*psi2*psi3`.
///
/// The `sqrt2` factors may be omitted; if given, there must be exactly one per
/// Majorana so that the written operator is the normalized one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialOperator {
    string: MajoranaString,
}

impl InitialOperator {
    pub fn string(&self) -> &MajoranaString {
        &self.string
    }

    pub fn build(&self, majoranas: &MajoranaSet) -> Result<OperatorVector> {
        if let Some(&k) = self.string.indices().last() {
            if k > majoranas.n_fermions() {
                return Err(invalid(format!(
                    "initial operator uses psi{k} but N = {}",
                    majoranas.n_fermions()
                )));
            }
        }
        OperatorVector::from_matrix(&majoranas.string_matrix(&self.string))
    }
}

impl FromStr for InitialOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sqrt2 = 0;
        let mut indices = Vec::new();
        for factor in s.split('*').map(str::trim) {
            if factor == "sqrt2" {
                sqrt2 += 1;
            } else if let Some(k) = factor.strip_prefix("psi") {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Config(format!("bad Majorana factor '{factor}'")))?;
                indices.push(k);
            } else {
                return Err(Error::Config(format!(
                    "initial_operator factor '{factor}' is neither psiK nor sqrt2"
                )));
            }
        }
        if indices.is_empty() {
            return Err(Error::Config(
                "initial_operator needs at least one psiK".into(),
            ));
        }
        if sqrt2 != 0 && sqrt2 != indices.len() {
            return Err(Error::Config(format!(
                "'{s}' is not normalized: {} Majoranas need {} sqrt2 factors",
                indices.len(),
                indices.len()
            )));
        }
        let string =
            MajoranaString::new(indices).map_err(|e| Error::Config(format!("'{s}': {e}")))?;
        Ok(Self { string })
    }
}

impl fmt::Display for InitialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.string.len() {
            write!(f, "sqrt2*")?;
        }
        write!(f, "{}", self.string)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_majoranas;

    #[test]
    fn defaults_from_empty_file() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.n_fermions, 8);
        assert_eq!(c.n_times, 241);
        assert_eq!(c.mu_values, vec![0.0, 0.025, 0.05, 0.075, 0.1]);
    }

    #[test]
    fn explicit_keys_and_round_trip() {
        let text = r#"
            N = 6
            q = 4
            J = 2.0
            mu_values = [0.0, 0.1]
            t_max = 10.0
            n_times = 11
            n_realizations = 3
            seed = 17
            initial_operator = "sqrt2*psi2"
            bases = ["string"]
            outputs = "out"
        "#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.n_fermions, 6);
        assert_eq!(c.coupling, 2.0);
        assert_eq!(c.mu_absolute(), vec![0.0, 0.2]);
        assert!(!c.wants(BasisKind::Krylov));
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_errors() {
        assert!(matches!(
            ExperimentConfig::from_toml_str("n = 8"),
            Err(Error::Config(_))
        ));
        for text in [
            "N = 7",
            "q = 3",
            "J = 0.0",
            "mu_values = [0.1, 0.05]",
            "mu_values = [-0.1]",
            "n_times = 0",
            "n_realizations = 0",
            "bases = []",
            "initial_operator = \"psi2*psi1\"",
            "t_max = 5.0\nn_times = 1",
            "initial_operator = \"psi9\"",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
        assert!(matches!(
            ExperimentConfig::from_toml_str("N = 14"),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn initial_operator_grammar() {
        let m = build_majoranas(8).unwrap();
        let x: InitialOperator = "sqrt2*psi1".parse().unwrap();
        assert_eq!(x.string(), &MajoranaString::single(1));
        assert!((x.build(&m).unwrap().norm_sq() - 1.0).abs() < 1e-14);
        assert_eq!(x.to_string(), "sqrt2*psi1");
        let y: InitialOperator = "psi1*psi2*psi3".parse().unwrap();
        assert!((y.build(&m).unwrap().norm_sq() - 1.0).abs() < 1e-14);
        assert!("sqrt2*psi1*psi2*psi3".parse::<InitialOperator>().is_err());
        assert!("2*psi1".parse::<InitialOperator>().is_err());
        assert!("sqrt2".parse::<InitialOperator>().is_err());
        let z: InitialOperator = "sqrt2*psi9".parse().unwrap();
        assert!(z.build(&m).is_err());
    }
}
