//! Scenario configuration: flat key-value text with sections (TOML), every
//! default embedded and echoed into the run manifest, and validation that
//! reports every offending key at once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Trichotomy,
    StaticW,
    StandingWaveConvergence,
    Channels,
    SelfSimilarProbe,
    GlobalBubble,
    DecompositionDemo,
    LemmaSuite,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Trichotomy,
        Scenario::StaticW,
        Scenario::StandingWaveConvergence,
        Scenario::Channels,
        Scenario::SelfSimilarProbe,
        Scenario::GlobalBubble,
        Scenario::DecompositionDemo,
        Scenario::LemmaSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Trichotomy => "trichotomy",
            Scenario::StaticW => "static-w",
            Scenario::StandingWaveConvergence => "standing-wave-convergence",
            Scenario::Channels => "channels",
            Scenario::SelfSimilarProbe => "self-similar-probe",
            Scenario::GlobalBubble => "global-bubble",
            Scenario::DecompositionDemo => "decomposition-demo",
            Scenario::LemmaSuite => "lemma-suite",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Initial-data description.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct InitialSpec {
    /// ground-state-multiple | bump | superposition | file
    pub kind: String,
    pub amplitude: f64,
    pub scale: f64,
    pub center: f64,
    pub width: f64,
    /// (sign, scale) pairs for superpositions.
    pub bubbles: Vec<(i8, f64)>,
    pub file: String,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self {
            kind: "ground-state-multiple".into(),
            amplitude: 1.0,
            scale: 1.0,
            center: 5.0,
            width: 2.0,
            bubbles: vec![(1, 0.05), (-1, 5.0)],
            file: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolverSpec {
    pub r_max: f64,
    pub cells: usize,
    pub cfl: f64,
    /// cubic | linear
    pub mode: String,
    pub max_time: f64,
    pub snapshot_every: usize,
    pub blowup_sup_factor: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            r_max: 60.0,
            cells: 6000,
            cfl: 0.45,
            mode: "cubic".into(),
            max_time: 40.0,
            snapshot_every: 100,
            blowup_sup_factor: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DiagnosticsSpec {
    pub energy: bool,
    pub strichartz: bool,
    pub checkpoints: bool,
    pub cone_lambda: f64,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        Self {
            energy: true,
            strichartz: false,
            checkpoints: false,
            cone_lambda: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Scenario-specific amplitude list (trichotomy sweep points).
    pub amplitudes: Vec<f64>,
    pub initial: InitialSpec,
    pub solver: SolverSpec,
    pub diagnostics: DiagnosticsSpec,
}

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            seed: 42,
            amplitudes: vec![0.8, 1.2],
            initial: InitialSpec::default(),
            solver: SolverSpec::default(),
            diagnostics: DiagnosticsSpec::default(),
        };
        // scenario-appropriate solver defaults
        match scenario {
            Scenario::StaticW => {
                cfg.solver = SolverSpec {
                    r_max: 20.0,
                    cells: 1000,
                    max_time: 1.0,
                    snapshot_every: 20,
                    ..SolverSpec::default()
                };
            }
            Scenario::StandingWaveConvergence => {
                cfg.solver = SolverSpec {
                    r_max: 26.0,
                    cells: 650,
                    mode: "linear".into(),
                    max_time: 5.0 * std::f64::consts::PI,
                    snapshot_every: 10_000,
                    ..SolverSpec::default()
                };
            }
            Scenario::Channels => {
                cfg.solver = SolverSpec {
                    r_max: 40.0,
                    cells: 800,
                    mode: "linear".into(),
                    max_time: 8.0,
                    snapshot_every: 20,
                    ..SolverSpec::default()
                };
            }
            Scenario::SelfSimilarProbe => {
                cfg.initial.amplitude = 1.2;
                cfg.solver = SolverSpec {
                    r_max: 30.0,
                    cells: 3000,
                    max_time: 20.0,
                    snapshot_every: 5,
                    ..SolverSpec::default()
                };
            }
            Scenario::GlobalBubble | Scenario::DecompositionDemo => {
                cfg.solver = SolverSpec {
                    r_max: 200.0,
                    cells: 6000,
                    max_time: 0.0,
                    ..SolverSpec::default()
                };
            }
            Scenario::LemmaSuite => {
                cfg.solver = SolverSpec {
                    r_max: 40.0,
                    cells: 2000,
                    max_time: 0.0,
                    ..SolverSpec::default()
                };
            }
            Scenario::Trichotomy => {}
        }
        cfg
    }

    /// Parse a TOML config file over the scenario defaults; validation
    /// errors list every offending key.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| LabError::Config(vec![format!("TOML parse error: {e}")]))?;
        let mut errors = Vec::new();

        let scenario = match table.get("scenario") {
            Some(toml::Value::String(s)) => match s.parse::<Scenario>() {
                Ok(sc) => Some(sc),
                Err(e) => {
                    errors.push(format!("scenario: {e}"));
                    None
                }
            },
            Some(_) => {
                errors.push("scenario: expected a string".into());
                None
            }
            None => {
                errors.push(format!(
                    "scenario: required key missing (one of {})",
                    Scenario::ALL.map(|s| s.name()).join(", ")
                ));
                None
            }
        };
        let Some(scenario) = scenario else {
            return Err(LabError::Config(errors));
        };
        let mut cfg = Self::defaults(scenario);

        let known_top = ["scenario", "seed", "amplitudes", "initial", "solver", "diagnostics"];
        for key in table.keys() {
            if !known_top.contains(&key.as_str()) {
                errors.push(format!("unknown key '{key}'"));
            }
        }
        read_u64(&table, "seed", &mut cfg.seed, &mut errors);
        if let Some(v) = table.get("amplitudes") {
            match v.as_array().map(|a| {
                a.iter()
                    .map(|x| x.as_float().or(x.as_integer().map(|i| i as f64)))
                    .collect::<Option<Vec<f64>>>()
            }) {
                Some(Some(vals)) if !vals.is_empty() => cfg.amplitudes = vals,
                _ => errors.push("amplitudes: expected a nonempty array of numbers".into()),
            }
        }

        if let Some(sect) = get_table(&table, "initial", &mut errors) {
            let known = ["kind", "amplitude", "scale", "center", "width", "bubbles", "file"];
            check_keys(sect, "initial", &known, &mut errors);
            read_string(sect, "initial.kind", "kind", &mut cfg.initial.kind, &mut errors);
            read_f64(sect, "initial.amplitude", "amplitude", &mut cfg.initial.amplitude, &mut errors);
            read_f64(sect, "initial.scale", "scale", &mut cfg.initial.scale, &mut errors);
            read_f64(sect, "initial.center", "center", &mut cfg.initial.center, &mut errors);
            read_f64(sect, "initial.width", "width", &mut cfg.initial.width, &mut errors);
            read_string(sect, "initial.file", "file", &mut cfg.initial.file, &mut errors);
            if let Some(v) = sect.get("bubbles") {
                match parse_bubbles(v) {
                    Some(b) => cfg.initial.bubbles = b,
                    None => errors
                        .push("initial.bubbles: expected [[sign, scale], …] pairs".into()),
                }
            }
        }

        if let Some(sect) = get_table(&table, "solver", &mut errors) {
            let known = [
                "r_max", "cells", "cfl", "mode", "max_time", "snapshot_every",
                "blowup_sup_factor",
            ];
            check_keys(sect, "solver", &known, &mut errors);
            read_f64(sect, "solver.r_max", "r_max", &mut cfg.solver.r_max, &mut errors);
            read_usize(sect, "solver.cells", "cells", &mut cfg.solver.cells, &mut errors);
            read_f64(sect, "solver.cfl", "cfl", &mut cfg.solver.cfl, &mut errors);
            read_string(sect, "solver.mode", "mode", &mut cfg.solver.mode, &mut errors);
            read_f64(sect, "solver.max_time", "max_time", &mut cfg.solver.max_time, &mut errors);
            read_usize(
                sect,
                "solver.snapshot_every",
                "snapshot_every",
                &mut cfg.solver.snapshot_every,
                &mut errors,
            );
            read_f64(
                sect,
                "solver.blowup_sup_factor",
                "blowup_sup_factor",
                &mut cfg.solver.blowup_sup_factor,
                &mut errors,
            );
        }

        if let Some(sect) = get_table(&table, "diagnostics", &mut errors) {
            let known = ["energy", "strichartz", "checkpoints", "cone_lambda"];
            check_keys(sect, "diagnostics", &known, &mut errors);
            read_bool(sect, "diagnostics.energy", "energy", &mut cfg.diagnostics.energy, &mut errors);
            read_bool(
                sect,
                "diagnostics.strichartz",
                "strichartz",
                &mut cfg.diagnostics.strichartz,
                &mut errors,
            );
            read_bool(
                sect,
                "diagnostics.checkpoints",
                "checkpoints",
                &mut cfg.diagnostics.checkpoints,
                &mut errors,
            );
            read_f64(
                sect,
                "diagnostics.cone_lambda",
                "cone_lambda",
                &mut cfg.diagnostics.cone_lambda,
                &mut errors,
            );
        }

        cfg.validate_bounds(&mut errors);
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(LabError::Config(errors))
        }
    }

    fn validate_bounds(&self, errors: &mut Vec<String>) {
        if !(self.solver.r_max > 0.0) {
            errors.push("solver.r_max: must be positive".into());
        }
        if self.solver.cells < 8 {
            errors.push("solver.cells: need at least 8".into());
        }
        if !(self.solver.cfl > 0.0 && self.solver.cfl <= 0.9) {
            errors.push(format!("solver.cfl: need 0 < cfl ≤ 0.9, got {}", self.solver.cfl));
        }
        if self.solver.mode != "cubic" && self.solver.mode != "linear" {
            errors.push(format!("solver.mode: expected cubic|linear, got {}", self.solver.mode));
        }
        if self.solver.max_time < 0.0 {
            errors.push("solver.max_time: must be nonnegative".into());
        }
        if !(self.diagnostics.cone_lambda > 0.0 && self.diagnostics.cone_lambda < 1.0) {
            errors.push(format!(
                "diagnostics.cone_lambda: need 0 < λ < 1, got {}",
                self.diagnostics.cone_lambda
            ));
        }
        if !(self.initial.scale > 0.0) {
            errors.push("initial.scale: must be positive".into());
        }
        if !(self.initial.width > 0.0) {
            errors.push("initial.width: must be positive".into());
        }
        let kinds = ["ground-state-multiple", "bump", "superposition", "file"];
        if !kinds.contains(&self.initial.kind.as_str()) {
            errors.push(format!(
                "initial.kind: expected one of {kinds:?}, got {}",
                self.initial.kind
            ));
        }
        for &a in &self.amplitudes {
            if !a.is_finite() {
                errors.push(format!("amplitudes: non-finite entry {a}"));
            }
        }
    }

    /// Echo of the effective configuration as sorted key-value pairs (goes
    /// into the manifest verbatim).
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("scenario".into(), self.scenario.name().into());
        m.insert("seed".into(), self.seed.to_string());
        m.insert(
            "amplitudes".into(),
            self.amplitudes
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("initial.kind".into(), self.initial.kind.clone());
        m.insert("initial.amplitude".into(), self.initial.amplitude.to_string());
        m.insert("initial.scale".into(), self.initial.scale.to_string());
        m.insert("initial.center".into(), self.initial.center.to_string());
        m.insert("initial.width".into(), self.initial.width.to_string());
        m.insert(
            "initial.bubbles".into(),
            self.initial
                .bubbles
                .iter()
                .map(|(s, l)| format!("{s}:{l}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("initial.file".into(), self.initial.file.clone());
        m.insert("solver.r_max".into(), self.solver.r_max.to_string());
        m.insert("solver.cells".into(), self.solver.cells.to_string());
        m.insert("solver.cfl".into(), self.solver.cfl.to_string());
        m.insert("solver.mode".into(), self.solver.mode.clone());
        m.insert("solver.max_time".into(), self.solver.max_time.to_string());
        m.insert(
            "solver.snapshot_every".into(),
            self.solver.snapshot_every.to_string(),
        );
        m.insert(
            "solver.blowup_sup_factor".into(),
            self.solver.blowup_sup_factor.to_string(),
        );
        m.insert("diagnostics.energy".into(), self.diagnostics.energy.to_string());
        m.insert(
            "diagnostics.strichartz".into(),
            self.diagnostics.strichartz.to_string(),
        );
        m.insert(
            "diagnostics.checkpoints".into(),
            self.diagnostics.checkpoints.to_string(),
        );
        m.insert(
            "diagnostics.cone_lambda".into(),
            self.diagnostics.cone_lambda.to_string(),
        );
        m
    }

    /// Apply `key=value` (dotted keys) for sweep axes.
    pub fn set_key(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "initial.amplitude" => self.initial.amplitude = value,
            "initial.scale" => self.initial.scale = value,
            "initial.center" => self.initial.center = value,
            "initial.width" => self.initial.width = value,
            "solver.r_max" => self.solver.r_max = value,
            "solver.cells" => self.solver.cells = value as usize,
            "solver.cfl" => self.solver.cfl = value,
            "solver.max_time" => self.solver.max_time = value,
            "diagnostics.cone_lambda" => self.diagnostics.cone_lambda = value,
            _ => {
                return Err(LabError::Config(vec![format!(
                    "axis key '{key}' is not sweepable"
                )]))
            }
        }
        let mut errors = Vec::new();
        self.validate_bounds(&mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(LabError::Config(errors))
        }
    }
}

fn get_table<'a>(
    table: &'a toml::Table,
    name: &str,
    errors: &mut Vec<String>,
) -> Option<&'a toml::Table> {
    match table.get(name) {
        Some(toml::Value::Table(t)) => Some(t),
        Some(_) => {
            errors.push(format!("{name}: expected a [{name}] section"));
            None
        }
        None => None,
    }
}

fn check_keys(sect: &toml::Table, name: &str, known: &[&str], errors: &mut Vec<String>) {
    for key in sect.keys() {
        if !known.contains(&key.as_str()) {
            errors.push(format!("unknown key '{name}.{key}'"));
        }
    }
}

fn read_f64(
    sect: &toml::Table,
    full: &str,
    key: &str,
    slot: &mut f64,
    errors: &mut Vec<String>,
) {
    if let Some(v) = sect.get(key) {
        match v.as_float().or(v.as_integer().map(|i| i as f64)) {
            Some(x) => *slot = x,
            None => errors.push(format!("{full}: expected a number")),
        }
    }
}

fn read_usize(
    sect: &toml::Table,
    full: &str,
    key: &str,
    slot: &mut usize,
    errors: &mut Vec<String>,
) {
    if let Some(v) = sect.get(key) {
        match v.as_integer() {
            Some(x) if x >= 0 => *slot = x as usize,
            _ => errors.push(format!("{full}: expected a nonnegative integer")),
        }
    }
}

fn read_u64(table: &toml::Table, key: &str, slot: &mut u64, errors: &mut Vec<String>) {
    if let Some(v) = table.get(key) {
        match v.as_integer() {
            Some(x) if x >= 0 => *slot = x as u64,
            _ => errors.push(format!("{key}: expected a nonnegative integer")),
        }
    }
}

fn read_string(
    sect: &toml::Table,
    full: &str,
    key: &str,
    slot: &mut String,
    errors: &mut Vec<String>,
) {
    if let Some(v) = sect.get(key) {
        match v.as_str() {
            Some(s) => *slot = s.to_string(),
            None => errors.push(format!("{full}: expected a string")),
        }
    }
}

fn read_bool(
    sect: &toml::Table,
    full: &str,
    key: &str,
    slot: &mut bool,
    errors: &mut Vec<String>,
) {
    if let Some(v) = sect.get(key) {
        match v.as_bool() {
            Some(b) => *slot = b,
            None => errors.push(format!("{full}: expected true|false")),
        }
    }
}

fn parse_bubbles(v: &toml::Value) -> Option<Vec<(i8, f64)>> {
    let arr = v.as_array()?;
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let pair = item.as_array()?;
        if pair.len() != 2 {
            return None;
        }
        let sign = pair[0].as_integer()?;
        if sign != 1 && sign != -1 {
            return None;
        }
        let scale = pair[1].as_float().or(pair[1].as_integer().map(|i| i as f64))?;
        out.push((sign as i8, scale));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_lists_required_keys() {
        let err = ScenarioConfig::from_toml_str("").unwrap_err();
        match err {
            LabError::Config(msgs) => {
                assert!(msgs.iter().any(|m| m.contains("scenario")), "{msgs:?}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_and_out_of_bounds_keys_are_all_reported() {
        let text = r#"
scenario = "static-w"
bogus = 1

[solver]
cfl = 2.0
wrong = "x"

[diagnostics]
cone_lambda = 1.5
"#;
        let err = ScenarioConfig::from_toml_str(text).unwrap_err();
        match err {
            LabError::Config(msgs) => {
                let joined = msgs.join("\n");
                assert!(joined.contains("unknown key 'bogus'"), "{joined}");
                assert!(joined.contains("unknown key 'solver.wrong'"), "{joined}");
                assert!(joined.contains("solver.cfl"), "{joined}");
                assert!(joined.contains("diagnostics.cone_lambda"), "{joined}");
                assert!(msgs.len() >= 4);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn defaults_overlay_and_echo() {
        let text = r#"
scenario = "trichotomy"
seed = 7
amplitudes = [0.9, 1.05]

[solver]
r_max = 50.0
cells = 5000
"#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.amplitudes, vec![0.9, 1.05]);
        assert_eq!(cfg.solver.r_max, 50.0);
        assert_eq!(cfg.solver.mode, "cubic"); // default survived
        let echo = cfg.echo();
        assert_eq!(echo["solver.cells"], "5000");
        assert_eq!(echo["scenario"], "trichotomy");
    }

    #[test]
    fn bubbles_parse() {
        let text = r#"
scenario = "decomposition-demo"

[initial]
kind = "superposition"
bubbles = [[1, 0.05], [-1, 5.0]]
"#;
        let cfg = ScenarioConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.initial.bubbles, vec![(1, 0.05), (-1, 5.0)]);
    }
}
