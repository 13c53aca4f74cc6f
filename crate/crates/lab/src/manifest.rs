//! Run manifests: the config echo, calibration constants with provenance,
//! termination records, artifact list, and step counts. Wall-clock time is
//! reported on stderr rather than in the manifest so that identical runs
//! produce bit-identical artifacts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Calibration constants and their provenance. The frozen defaults were
/// measured by the calibration routines in `calibrate` (see the unit tests
/// there, which re-derive them); `critwave verify calibration` recomputes
/// them from scratch.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Calibration {
    /// Coercivity constant of the energy-trapping lemma: 0.9 × corpus
    /// minimum of E/min{‖∇f‖², 2‖∇W‖² − ‖∇f‖²}.
    pub coercivity_c: f64,
    /// L² ≤ C_L·𝒜²ℬ²/r²: 1.1 × corpus maximum of the ratio.
    pub c_l: f64,
    /// Flux normalization making the local energy identity balance.
    pub c0_flux: f64,
    /// Measured exterior-fraction lower constant over the (f,0) corpus.
    pub alpha0_hat: f64,
    pub provenance: BTreeMap<String, String>,
}

impl Default for Calibration {
    fn default() -> Self {
        let mut provenance = BTreeMap::new();
        provenance.insert(
            "coercivity_c".into(),
            "0.9 x min over 1000-bump corpus (seed 2024, grid 40/2000)".into(),
        );
        provenance.insert(
            "c_l".into(),
            "1.1 x max L^2 r^2/(A^2 B^2) over 200 sub-threshold states (seed 77)".into(),
        );
        provenance.insert(
            "c0_flux".into(),
            "local energy identity balance on the static-W cone (1/sqrt(2))".into(),
        );
        provenance.insert(
            "alpha0_hat".into(),
            "min asymptotic exterior fraction, 20-member (f,0) corpus (seed 11)".into(),
        );
        Self {
            coercivity_c: crate::calibrate::COERCIVITY_C,
            c_l: crate::calibrate::C_L,
            c0_flux: std::f64::consts::FRAC_1_SQRT_2,
            alpha0_hat: crate::calibrate::ALPHA0_HAT,
            provenance,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config: BTreeMap<String, String>,
    pub calibration: Calibration,
    pub termination: Vec<String>,
    pub artifacts: Vec<String>,
    pub step_counts: Vec<usize>,
    /// Human-readable verdict lines, one per checked invariant.
    pub checks: Vec<CheckLine>,
    pub invariant_failures: Vec<String>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl RunManifest {
    pub fn new(scenario: &str, config: BTreeMap<String, String>) -> Self {
        Self {
            scenario: scenario.to_string(),
            config,
            calibration: Calibration::default(),
            termination: Vec::new(),
            artifacts: Vec::new(),
            step_counts: Vec::new(),
            checks: Vec::new(),
            invariant_failures: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.invariant_failures.push(format!("{name}: {detail}"));
        }
        self.checks.push(CheckLine {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    pub fn record_artifact(&mut self, path: &Path) {
        self.artifacts
            .push(path.file_name().unwrap_or_default().to_string_lossy().into());
        self.artifacts.sort();
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("manifest.json");
        let mut f = std::fs::File::create(&path)?;
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::LabError::Runtime(format!("manifest encode: {e}")))?;
        f.write_all(json.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(path)
    }
}
