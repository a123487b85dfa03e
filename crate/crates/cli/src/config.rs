//! Experiment configuration: a single JSON document, optionally overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use theta_reset::bifurcation::{ContinuationParam, ContinuationSettings, Grid};
use theta_reset::network::SimConfig;
use theta_reset::{Error, ModelParams, Reduction, ResetRate, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Meanfield,
    Branch,
    Scan2,
    Reproduce,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Meanfield => "meanfield",
            Mode::Branch => "branch",
            Mode::Scan2 => "scan2",
            Mode::Reproduce => "reproduce",
        }
    }
}

/// Direct integration of a reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeanFieldRun {
    pub total_time: f64,
    pub dt: f64,
    pub record_stride: usize,
    /// Initial non-reset mean field `[re, im]`.
    pub initial_nr: [f64; 2],
    /// Initial reset mean field (finite-rate system only); defaults to `initial_nr`.
    pub initial_r: Option<[f64; 2]>,
}

impl Default for MeanFieldRun {
    fn default() -> Self {
        Self {
            total_time: 100.0,
            dt: 0.01,
            record_stride: 10,
            initial_nr: [0.0, 0.0],
            initial_r: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    pub param: ContinuationParam,
    pub range: [f64; 2],
    pub settings: ContinuationSettings,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            param: ContinuationParam::Eta0,
            range: [-10.0, 10.0],
            settings: ContinuationSettings::default(),
        }
    }
}

/// Second scan parameter and its sample positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub param: ContinuationParam,
    pub start: f64,
    pub end: f64,
    #[serde(default = "default_grid_points")]
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

fn default_grid_points() -> usize {
    41
}

impl ScanGrid {
    pub fn grid(&self) -> Grid {
        Grid {
            start: self.start,
            end: self.end,
            points: self.points,
            log: self.log,
        }
    }
}

fn default_realizations() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Reduced system; inferred from `params.lambda` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<Reduction>,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub meanfield: MeanFieldRun,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScanGrid>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_output")]
    pub output_path: PathBuf,
    /// Master seed; falls back to `sim.seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Table identifier for `reproduce`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            system: None,
            params: ModelParams::default(),
            sim: SimConfig::default(),
            meanfield: MeanFieldRun::default(),
            continuation: ContinuationConfig::default(),
            grid: None,
            realizations: 1,
            output_path: default_output(),
            seed: None,
            table: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
            .map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))
    }

    pub fn reduction(&self) -> Reduction {
        self.system
            .unwrap_or_else(|| Reduction::for_params(&self.model_params()))
    }

    /// Model parameters as used by the mode. When `lambda` is continued or
    /// scanned, an infinite base rate is replaced by the first swept value.
    pub fn model_params(&self) -> ModelParams {
        let mut p = self.params;
        if !p.lambda.is_infinite() || !matches!(self.mode, Mode::Branch | Mode::Scan2) {
            return p;
        }
        let swept = if self.continuation.param == ContinuationParam::Lambda {
            Some(self.continuation.range[0])
        } else {
            self.grid
                .filter(|g| self.mode == Mode::Scan2 && g.param == ContinuationParam::Lambda)
                .map(|g| g.start)
        };
        if let Some(first) = swept {
            p.lambda = ResetRate::Finite(first);
        }
        p
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(self.sim.seed)
    }

    /// Sets a leaf key given as a dotted path (`sim.dt`, `params.lambda`, …).
    /// The value is parsed as JSON and taken as a string otherwise.
    pub fn set_path(&mut self, key: &str, raw: &str) -> Result<()> {
        let mut doc = serde_json::to_value(&*self)?;
        let value: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut doc;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = node.as_object_mut().ok_or_else(|| {
                Error::InvalidParameter(format!("cannot set {key}: {part} is not an object"))
            })?;
            if i + 1 == parts.len() {
                obj.insert(part.to_string(), value.clone());
                break;
            }
            node = obj
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default()));
        }
        *self = serde_json::from_value(doc)
            .map_err(|e| Error::InvalidParameter(format!("cannot set {key}={raw}: {e}")))?;
        Ok(())
    }

    /// Mode-specific consistency checks.
    pub fn validate(&self) -> Result<()> {
        if self.mode != Mode::Reproduce {
            let params = self.model_params();
            params.validate()?;
            if self.reduction() == Reduction::Finite && params.lambda.is_infinite() {
                return Err(Error::InvalidParameter(
                    "the finite-rate system needs a finite lambda".into(),
                ));
            }
        }
        match self.mode {
            Mode::Simulate => {
                self.sim.validate()?;
                if self.realizations == 0 {
                    return Err(Error::InvalidParameter("realizations must be >= 1".into()));
                }
            }
            Mode::Meanfield => {
                let m = &self.meanfield;
                if !(m.total_time > 0.0) || !(m.dt > 0.0) || m.record_stride == 0 {
                    return Err(Error::InvalidParameter(
                        "meanfield needs total_time > 0, dt > 0 and record_stride >= 1".into(),
                    ));
                }
                for z in std::iter::once(m.initial_nr).chain(m.initial_r) {
                    if !(z[0].hypot(z[1]) <= 1.0) {
                        return Err(Error::Domain(format!(
                            "initial mean field {z:?} lies outside the unit disk"
                        )));
                    }
                }
            }
            Mode::Branch | Mode::Scan2 => {
                let c = &self.continuation;
                c.settings.validate()?;
                let [a, b] = c.range;
                if !a.is_finite() || !b.is_finite() || a == b {
                    return Err(Error::InvalidParameter(format!(
                        "continuation range must be non-empty, got {a}:{b}"
                    )));
                }
                if c.param == ContinuationParam::Lambda && self.reduction() != Reduction::Finite {
                    return Err(Error::InvalidParameter(
                        "lambda can only be varied in the finite-rate system".into(),
                    ));
                }
                if self.mode == Mode::Scan2 {
                    let g = self.grid.ok_or_else(|| {
                        Error::InvalidParameter("scan2 needs a second-parameter grid".into())
                    })?;
                    if g.param == c.param {
                        return Err(Error::InvalidParameter(
                            "scan parameters must differ".into(),
                        ));
                    }
                    if g.param == ContinuationParam::Lambda && self.reduction() != Reduction::Finite
                    {
                        return Err(Error::InvalidParameter(
                            "lambda can only be scanned in the finite-rate system".into(),
                        ));
                    }
                    g.grid().validate()?;
                }
            }
            Mode::Reproduce => {
                if self.table.is_none() {
                    return Err(Error::InvalidParameter("reproduce needs a table id".into()));
                }
            }
        }
        Ok(())
    }
}

/// Parses `a:b`.
pub fn parse_range(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected START:END, got {s:?}"))?;
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: f64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad range end {b:?}: {e}"))?;
    Ok([a, b])
}

/// Parses `start:end:points`.
pub fn parse_grid(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected START:END:POINTS, got {s:?}"));
    }
    let start = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("bad grid start: {e}"))?;
    let end = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("bad grid end: {e}"))?;
    let n = parts[2]
        .trim()
        .parse()
        .map_err(|e| format!("bad grid size: {e}"))?;
    Ok((start, end, n))
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    Ok([
        a.trim()
            .parse()
            .map_err(|e| format!("bad real part: {e}"))?,
        b.trim()
            .parse()
            .map_err(|e| format!("bad imaginary part: {e}"))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_json(r#"{"mode":"branch","bogus":1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = ExperimentConfig::from_json(r#"{"mode":"simulate","sim":{"nn":3}}"#).unwrap_err();
        assert!(err.to_string().contains("nn"));
    }

    #[test]
    fn lambda_accepts_inf_literal() {
        let c = ExperimentConfig::from_json(
            r#"{"mode":"branch","params":{"lambda":"inf","coupling_k":-2}}"#,
        )
        .unwrap();
        assert_eq!(c.params.lambda, ResetRate::Infinite);
        assert_eq!(c.params.coupling_k, -2.0);
        assert_eq!(c.reduction(), Reduction::Infinite);
        let c =
            ExperimentConfig::from_json(r#"{"mode":"branch","params":{"lambda":2.5}}"#).unwrap();
        assert_eq!(c.reduction(), Reduction::Finite);
    }

    #[test]
    fn set_path_updates_leaves() {
        let mut c = ExperimentConfig::new(Mode::Simulate);
        c.set_path("sim.dt", "0.005").unwrap();
        c.set_path("params.lambda", "inf").unwrap();
        c.set_path("continuation.settings.step", "0.01").unwrap();
        assert_eq!(c.sim.dt, 0.005);
        assert_eq!(c.params.lambda, ResetRate::Infinite);
        assert_eq!(c.continuation.settings.step, 0.01);
        assert!(c.set_path("sim.unknown", "1").is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let mut c = ExperimentConfig::new(Mode::Scan2);
        c.params = ModelParams::new(-2.0, 1.5, 0.25).with_lambda(ResetRate::Finite(3.0));
        c.grid = Some(ScanGrid {
            param: ContinuationParam::Gamma,
            start: 0.0,
            end: 1.0,
            points: 21,
            log: false,
        });
        c.seed = Some(7);
        let back = ExperimentConfig::from_json(&serde_json::to_string_pretty(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation_is_mode_specific() {
        let mut c = ExperimentConfig::new(Mode::Simulate);
        c.sim.n_neurons = 0;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("n_neurons must be positive"));
        let mut c = ExperimentConfig::new(Mode::Branch);
        c.continuation.range = [1.0, 1.0];
        assert!(c.validate().is_err());
        let c = ExperimentConfig::new(Mode::Scan2);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Mode::Branch);
        c.continuation.settings.newton_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn flag_value_parsers() {
        assert_eq!(parse_range("-40:40").unwrap(), [-40.0, 40.0]);
        assert!(parse_range("3").is_err());
        assert_eq!(parse_grid("0:1:41").unwrap(), (0.0, 1.0, 41));
        assert_eq!(parse_complex("0.5,-0.25").unwrap(), [0.5, -0.25]);
    }

    #[test]
    fn swept_lambda_replaces_infinite_base_rate() {
        let cfg = ExperimentConfig::from_json(
            r#"{"mode":"scan2","params":{"coupling_k":2},
                "grid":{"param":"lambda","start":0.01,"end":10,"points":41,"log":true}}"#,
        )
        .unwrap();
        assert!(cfg.params.lambda.is_infinite());
        assert_eq!(cfg.model_params().lambda, ResetRate::Finite(0.01));
        assert_eq!(cfg.reduction(), Reduction::Finite);
        cfg.validate().unwrap();

        let mut sim = cfg.clone();
        sim.mode = Mode::Simulate;
        assert!(sim.model_params().lambda.is_infinite());
    }
}
