use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::run::{ResultsBundle, SeriesStats};

#[derive(Serialize)]
struct Manifest<'a> {
    artifact_version: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    mu: Vec<MuManifest>,
}

#[derive(Serialize)]
struct MuManifest {
    mu: f64,
    n_success: usize,
    n_excluded: usize,
    excluded_realizations: Vec<usize>,
    exclusion_reasons: Vec<String>,
    mk_mean: f64,
    terminations: BTreeMap<String, usize>,
    max_k_imaginary_residue: f64,
    max_biorthogonality_error: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn mu_tag(mu: f64) -> String {
    format!("mu{mu}")
}

fn column(stats: Option<&SeriesStats>, i: usize) -> [String; 2] {
    match stats {
        Some(s) => [s.mean[i].to_string(), s.var[i].to_string()],
        None => ["nan".into(), "nan".into()],
    }
}

/// Writes the summary, dimension and coefficient tables and the manifest
/// under `outputs`, overwriting earlier files of the same name. Returns the
/// written paths.
pub fn emit(results: &ResultsBundle, outputs: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outputs).map_err(io_err(outputs))?;
    let mut written = Vec::new();

    for s in &results.summaries {
        let path = outputs.join(format!("summary_{}.csv", mu_tag(s.mu)));
        let rows: Vec<Vec<String>> = results
            .times
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let [ck_m, ck_v] = column(s.c_krylov.as_ref(), i);
                let [cs_m, cs_v] = column(s.c_string.as_ref(), i);
                vec![
                    t.to_string(),
                    s.k.mean[i].to_string(),
                    s.k.var[i].to_string(),
                    ck_m,
                    ck_v,
                    cs_m,
                    cs_v,
                    s.norm.mean[i].to_string(),
                ]
            })
            .collect();
        write_table(
            &path,
            &[
                "jt",
                "k_mean",
                "k_var",
                "c_krylov_mean",
                "c_krylov_var",
                "c_string_mean",
                "c_string_var",
                "norm_mean",
            ],
            &rows,
        )?;
        written.push(path);
    }

    if !results.summaries.is_empty() {
        let path = outputs.join("dimensions.csv");
        let rows: Vec<Vec<String>> = results
            .summaries
            .iter()
            .map(|s| {
                vec![
                    s.mu.to_string(),
                    s.mk_mean.to_string(),
                    s.mk_var.to_string(),
                    s.n_success.to_string(),
                    s.n_excluded.to_string(),
                ]
            })
            .collect();
        write_table(
            &path,
            &["mu", "mk_mean", "mk_var", "n_success", "n_excluded"],
            &rows,
        )?;
        written.push(path);
    }

    if !results.realizations.is_empty() {
        let dir = outputs.join("coefficients");
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for r in &results.realizations {
            let path = dir.join(format!("{}_r{}.csv", mu_tag(r.mu), r.realization));
            let rows: Vec<Vec<String>> = (0..r.a.len())
                .map(|n| {
                    let (b, c) = if n == 0 {
                        (0.0, 0.0)
                    } else {
                        (r.b[n - 1], r.c[n - 1].re)
                    };
                    vec![
                        n.to_string(),
                        r.a[n].re.to_string(),
                        r.a[n].im.to_string(),
                        b.to_string(),
                        c.to_string(),
                    ]
                })
                .collect();
            write_table(&path, &["n", "re_a", "im_a", "b", "c"], &rows)?;
            written.push(path);
        }
    }

    let manifest = Manifest {
        artifact_version: &results.version,
        seed: results.config.seed,
        config: &results.config,
        mu: results
            .summaries
            .iter()
            .map(|s| {
                let excluded: Vec<_> = results.exclusions.iter().filter(|e| e.mu == s.mu).collect();
                MuManifest {
                    mu: s.mu,
                    n_success: s.n_success,
                    n_excluded: s.n_excluded,
                    excluded_realizations: excluded.iter().map(|e| e.realization).collect(),
                    exclusion_reasons: excluded.iter().map(|e| e.reason.clone()).collect(),
                    mk_mean: s.mk_mean,
                    terminations: s.terminations.clone(),
                    max_k_imaginary_residue: s.max_k_residue,
                    max_biorthogonality_error: s.max_biorthogonality_error,
                }
            })
            .collect(),
    };
    let path = outputs.join("manifest.toml");
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
