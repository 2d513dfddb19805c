//! Scan execution and result serialization.
//!
//! Each scan point runs independently with a seed derived from the master
//! seed and the point index; outputs are written atomically. The CSV holds
//! only run-to-run reproducible fields (bit-identical for a fixed config
//! and seed); the JSON mirrors it and adds wall time and error details.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use cvvqe::{bh_ground_energy, bose_hubbard_polynomial, optimize, BoseHubbardParams64};

use crate::config::{ExperimentConfig, ScanName};

/// Stable layout marker for the result files.
pub const SCHEMA_VERSION: u32 = 1;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Outcome of one scan point.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub scan_name: String,
    pub scan_value: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub vqe_energy: Option<f64>,
    /// `(n_max, energy)` baselines, one per configured cutoff.
    pub ed_energies: Vec<(usize, f64)>,
    pub squeezing_cost_db: Option<f64>,
    pub subtraction_probability: Option<f64>,
    pub purity: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub wall_time_seconds: f64,
    pub seed: u64,
    pub config_hash: String,
}

fn point_model(config: &ExperimentConfig, name: Option<ScanName>, value: f64) -> Result<BoseHubbardParams64> {
    let mut model = config.model_params()?;
    match name {
        Some(ScanName::U) => model.interaction = value,
        Some(ScanName::T) => model.hopping = value,
        Some(ScanName::Mu) => model.chemical_potential = value,
        Some(ScanName::Subtractions) | None => {}
    }
    Ok(model)
}

fn run_point(
    config: &ExperimentConfig,
    index: usize,
    name: Option<ScanName>,
    value: f64,
) -> ResultRecord {
    let started = Instant::now();
    let seed = config
        .seed
        .wrapping_add((index as u64 + 1).wrapping_mul(SEED_STRIDE));
    let scan_name = name.map_or_else(|| "none".to_string(), |n| n.to_string());
    let hash = config.hash();
    let mut record = ResultRecord {
        schema_version: SCHEMA_VERSION,
        scan_name,
        scan_value: value,
        status: "failed".into(),
        error: None,
        vqe_energy: None,
        ed_energies: Vec::new(),
        squeezing_cost_db: None,
        subtraction_probability: None,
        purity: None,
        iterations: None,
        converged: None,
        wall_time_seconds: 0.0,
        seed,
        config_hash: hash,
    };

    let outcome = (|| -> Result<()> {
        let model = point_model(config, name, value)?;
        let subtractions = match name {
            Some(ScanName::Subtractions) => value as usize,
            _ => config.ansatz.subtractions,
        };
        let hamiltonian = bose_hubbard_polynomial(&model)?;
        let ansatz = config.ansatz_params(subtractions)?;
        let opt = config.optimizer_params(seed);

        for &cutoff in &config.ed_cutoffs {
            let e = bh_ground_energy(&model, cutoff)
                .with_context(|| format!("ED baseline at n_max {cutoff}"))?;
            record.ed_energies.push((cutoff, e));
        }

        let result = optimize(&ansatz, &hamiltonian, &opt)?;
        record.vqe_energy = Some(result.best_energy);
        record.squeezing_cost_db = Some(result.resources.squeezing_cost_db);
        record.subtraction_probability = Some(result.resources.subtraction_probability);
        record.purity = Some(result.resources.purity);
        record.iterations = Some(result.iterations);
        record.converged = Some(result.converged);
        Ok(())
    })();

    match outcome {
        Ok(()) => record.status = "ok".into(),
        Err(e) => {
            record.status = "failed".into();
            record.error = Some(format!("{e:#}"));
            log::warn!("scan point {index} ({}) failed: {e:#}", record.scan_value);
        }
    }
    record.wall_time_seconds = started.elapsed().as_secs_f64();
    record
}

/// Run every scan point (a missing scan section runs the configuration as a
/// single point). Points execute concurrently; record order follows the
/// configured value order.
pub fn run_scan(config: &ExperimentConfig) -> Vec<ResultRecord> {
    let points: Vec<(Option<ScanName>, f64)> = match &config.scan {
        Some(scan) => scan.values.iter().map(|&v| (Some(scan.name), v)).collect(),
        None => vec![(None, f64::NAN)],
    };
    points
        .into_par_iter()
        .enumerate()
        .map(|(index, (name, value))| run_point(config, index, name, value))
        .collect()
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Render records as CSV: header row, UTF-8, `.` decimal separator,
/// 17 significant digits, fixed column order. Wall time is deliberately
/// excluded so identical runs produce identical bytes.
pub fn to_csv(records: &[ResultRecord], cutoffs: &[usize]) -> String {
    let mut out = String::from("schema_version,scan_name,scan_value,status,vqe_energy");
    for c in cutoffs {
        out.push_str(&format!(",ed_energy_{c}"));
    }
    out.push_str(",squeezing_cost_db,subtraction_probability,purity,iterations,converged,seed,config_hash\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}",
            r.schema_version,
            r.scan_name,
            if r.scan_value.is_nan() {
                String::new()
            } else {
                fmt_float(r.scan_value)
            },
            r.status
        ));
        out.push(',');
        out.push_str(&fmt_opt(r.vqe_energy));
        for c in cutoffs {
            out.push(',');
            let found = r.ed_energies.iter().find(|(n, _)| n == c).map(|(_, e)| *e);
            out.push_str(&fmt_opt(found));
        }
        out.push(',');
        out.push_str(&fmt_opt(r.squeezing_cost_db));
        out.push(',');
        out.push_str(&fmt_opt(r.subtraction_probability));
        out.push(',');
        out.push_str(&fmt_opt(r.purity));
        out.push(',');
        out.push_str(&r.iterations.map(|i| i.to_string()).unwrap_or_default());
        out.push(',');
        out.push_str(&r.converged.map(|b| b.to_string()).unwrap_or_default());
        out.push_str(&format!(",{},{}\n", r.seed, r.config_hash));
    }
    out
}

/// Write a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Write results.csv, results.json, and resolved_config.json into `out`.
pub fn write_outputs(out: &Path, config: &ExperimentConfig, records: &[ResultRecord]) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_atomic(&out.join("results.csv"), &to_csv(records, &config.ed_cutoffs))?;
    let json = serde_json::to_string_pretty(records).context("serializing records")? + "\n";
    write_atomic(&out.join("results.json"), &json)?;
    write_atomic(&out.join("resolved_config.json"), &config.resolved_json())?;
    Ok(())
}
