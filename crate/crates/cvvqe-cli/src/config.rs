//! JSON experiment configuration: schema-checked (unknown keys rejected),
//! with every default made explicit in the resolved copy that is echoed
//! next to the outputs.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cvvqe::{
    AnsatzConfig64, Boundary, BoseHubbardParams64, LadderOp, LadderPolynomial64, OptimizerConfig64,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum BoundaryConfig {
    Open,
    Periodic,
}

impl From<BoundaryConfig> for Boundary {
    fn from(b: BoundaryConfig) -> Self {
        match b {
            BoundaryConfig::Open => Boundary::Open,
            BoundaryConfig::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_sites")]
    pub n_sites: usize,
    #[serde(default = "one")]
    pub hopping: f64,
    #[serde(default = "one")]
    pub interaction: f64,
    #[serde(default = "one")]
    pub chemical_potential: f64,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_sites() -> usize {
    2
}
fn one() -> f64 {
    1.0
}
fn default_boundary() -> BoundaryConfig {
    BoundaryConfig::Open
}

/// One ladder operation in a preparation list.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PrepOpConfig {
    pub mode: usize,
    pub kind: PrepKind,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PrepKind {
    Subtract,
    Add,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfigJson {
    /// Number of photon subtractions on `subtraction_mode`; ignored when
    /// `prep_ops` is given.
    #[serde(default = "default_subtractions")]
    pub subtractions: usize,
    #[serde(default = "default_mode")]
    pub subtraction_mode: usize,
    /// Explicit preparation list (applied right to left); overrides
    /// `subtractions`.
    #[serde(default)]
    pub prep_ops: Option<Vec<PrepOpConfig>>,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "one")]
    pub purity_target: f64,
    #[serde(default = "default_tap")]
    pub tap_reflectivity: f64,
}

impl Default for AnsatzConfigJson {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_subtractions() -> usize {
    1
}
fn default_mode() -> usize {
    1
}
fn default_layers() -> usize {
    1
}
fn default_tap() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfigJson {
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_gradient_step")]
    pub gradient_step: f64,
    #[serde(default = "default_convergence_tol")]
    pub convergence_tol: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

impl Default for OptimizerConfigJson {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_max_iterations() -> usize {
    200
}
fn default_gradient_step() -> f64 {
    1e-5
}
fn default_convergence_tol() -> f64 {
    1e-7
}
fn default_restarts() -> usize {
    8
}
fn default_init_scale() -> f64 {
    0.1
}

/// Which model parameter (or the subtraction count) a scan sweeps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub enum ScanName {
    U,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "subtractions")]
    Subtractions,
}

impl std::fmt::Display for ScanName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScanName::U => "U",
            ScanName::T => "t",
            ScanName::Mu => "mu",
            ScanName::Subtractions => "subtractions",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub name: ScanName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub ansatz: AnsatzConfigJson,
    #[serde(default)]
    pub optimizer: OptimizerConfigJson,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default = "default_cutoffs")]
    pub ed_cutoffs: Vec<usize>,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_cutoffs() -> Vec<usize> {
    vec![10, 20, 30]
}
fn default_output() -> String {
    "results".into()
}
fn default_seed() -> u64 {
    42
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).context("configuration does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.n_sites < 2 {
            bail!("model.n_sites must be at least 2");
        }
        if self.model.boundary == BoundaryConfig::Periodic && self.model.n_sites < 3 {
            bail!("periodic boundary needs at least 3 sites");
        }
        if !(0.0 < self.ansatz.purity_target && self.ansatz.purity_target <= 1.0) {
            bail!("ansatz.purity_target must lie in (0, 1]");
        }
        if self.ansatz.layers == 0 {
            bail!("ansatz.layers must be at least 1");
        }
        if let Some(ops) = &self.ansatz.prep_ops {
            for op in ops {
                if op.mode == 0 || op.mode > self.model.n_sites {
                    bail!("prep op mode {} out of range", op.mode);
                }
            }
        }
        if self.ansatz.subtraction_mode == 0 || self.ansatz.subtraction_mode > self.model.n_sites {
            bail!("ansatz.subtraction_mode out of range");
        }
        if let Some(scan) = &self.scan {
            if scan.values.is_empty() {
                bail!("scan.values must not be empty");
            }
            if scan.name == ScanName::Subtractions {
                if self.ansatz.prep_ops.is_some() {
                    bail!("a subtractions scan cannot be combined with explicit prep_ops");
                }
                for v in &scan.values {
                    if v.fract() != 0.0 || *v < 0.0 {
                        bail!("subtraction counts must be non-negative integers, got {v}");
                    }
                }
            }
        }
        if self.ed_cutoffs.is_empty() {
            bail!("ed_cutoffs must not be empty");
        }
        if self.optimizer.restarts == 0 || self.optimizer.max_iterations == 0 {
            bail!("optimizer.restarts and optimizer.max_iterations must be positive");
        }
        Ok(())
    }

    /// Canonical JSON of the fully-resolved configuration.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// SHA-256 of the resolved configuration, hex-encoded. The output
    /// location is not part of the hash: it identifies the experiment, not
    /// where its files land.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_path = String::new();
        let mut hasher = Sha256::new();
        hasher.update(canonical.resolved_json().as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn model_params(&self) -> Result<BoseHubbardParams64> {
        Ok(BoseHubbardParams64::new(
            self.model.n_sites,
            self.model.hopping,
            self.model.interaction,
            self.model.chemical_potential,
            self.model.boundary.clone().into(),
        )?)
    }

    fn prep_polynomial(&self, subtraction_count: usize) -> Result<LadderPolynomial64> {
        let n = self.model.n_sites;
        let ops: Vec<LadderOp> = match &self.ansatz.prep_ops {
            Some(list) => list
                .iter()
                .map(|op| match op.kind {
                    PrepKind::Subtract => LadderOp::annihilate(op.mode),
                    PrepKind::Add => LadderOp::create(op.mode),
                })
                .collect(),
            None => vec![LadderOp::annihilate(self.ansatz.subtraction_mode); subtraction_count],
        };
        Ok(LadderPolynomial64::monomial_real(n, 1.0, ops)?)
    }

    /// Core ansatz for one scan point (the subtraction count may come from
    /// the scan).
    pub fn ansatz_params(&self, subtraction_count: usize) -> Result<AnsatzConfig64> {
        Ok(AnsatzConfig64 {
            n_modes: self.model.n_sites,
            prep: self.prep_polynomial(subtraction_count)?,
            layers: self.ansatz.layers,
            purity_target: self.ansatz.purity_target,
            tap_reflectivity: self.ansatz.tap_reflectivity,
        })
    }

    pub fn optimizer_params(&self, seed: u64) -> OptimizerConfig64 {
        OptimizerConfig64 {
            max_iterations: self.optimizer.max_iterations,
            gradient_step: self.optimizer.gradient_step,
            convergence_tol: self.optimizer.convergence_tol,
            restarts: self.optimizer.restarts,
            rng_seed: seed,
            init_scale: self.optimizer.init_scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_defaults() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg.model.n_sites, 2);
        assert_eq!(cfg.model.hopping, 1.0);
        assert_eq!(cfg.model.interaction, 1.0);
        assert_eq!(cfg.model.chemical_potential, 1.0);
        assert_eq!(cfg.ed_cutoffs, vec![10, 20, 30]);
        assert_eq!(cfg.seed, 42);
        // The resolved echo spells every default out.
        let echo = cfg.resolved_json();
        for key in [
            "hopping",
            "interaction",
            "chemical_potential",
            "purity_target",
            "tap_reflectivity",
            "max_iterations",
            "gradient_step",
            "convergence_tol",
            "restarts",
            "init_scale",
            "ed_cutoffs",
            "output_path",
            "seed",
        ] {
            assert!(echo.contains(key), "resolved config misses {key}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json("{\"banana\": 1}").is_err());
        assert!(ExperimentConfig::from_json("{\"model\": {\"sites\": 2}}").is_err());
    }

    #[test]
    fn empty_scan_is_rejected() {
        let err = ExperimentConfig::from_json("{\"scan\": {\"name\": \"U\", \"values\": []}}");
        assert!(err.is_err());
    }

    #[test]
    fn fractional_subtraction_scan_is_rejected() {
        let err = ExperimentConfig::from_json(
            "{\"scan\": {\"name\": \"subtractions\", \"values\": [0.5]}}",
        );
        assert!(err.is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::from_json("{}").unwrap();
        let b = ExperimentConfig::from_json("{\"seed\": 43}").unwrap();
        assert_eq!(a.hash(), ExperimentConfig::from_json("{}").unwrap().hash());
        assert_ne!(a.hash(), b.hash());
    }
}
