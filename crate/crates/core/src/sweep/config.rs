//! `key = value` sweep configuration.
//!
//! ```text
//! # detuning sweep for the single-qubit dressed states
//! mode = fig2
//! delta_start = 0
//! delta_stop = 10
//! steps = 200
//! n = 0, 10
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key is optional; missing
//! keys take the defaults of the selected mode.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("`{key}` out of range: {reason}")]
    OutOfRange { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Fig2,
    Fig3,
    Custom,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Fig2 => "fig2",
            SweepMode::Fig3 => "fig3",
            SweepMode::Custom => "custom",
        }
    }
}

impl FromStr for SweepMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig2" => Ok(SweepMode::Fig2),
            "fig3" => Ok(SweepMode::Fig3),
            "custom" => Ok(SweepMode::Custom),
            other => Err(format!(
                "unknown mode `{other}` (expected fig2, fig3 or custom)"
            )),
        }
    }
}

/// Values of Δ/λ visited by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaAxis {
    /// `steps` evenly spaced points from `start` to `stop` inclusive.
    Grid {
        start: f64,
        stop: f64,
        steps: usize,
    },
    Values(Vec<f64>),
}

impl DeltaAxis {
    pub fn points(&self) -> Vec<f64> {
        match self {
            DeltaAxis::Grid { start, stop, steps } => (0..*steps)
                .map(|i| {
                    if i + 1 == *steps {
                        *stop
                    } else {
                        start + (stop - start) * i as f64 / (*steps - 1) as f64
                    }
                })
                .collect(),
            DeltaAxis::Values(v) => v.clone(),
        }
    }
}

/// Which dressed state of each block is analysed, counted from the highest
/// dressed energy (`rank = 0` is the first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenstateSelector {
    pub rank: usize,
}

const ORDINALS: [&str; 4] = ["first", "second", "third", "fourth"];

impl fmt::Display for EigenstateSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match ORDINALS.get(self.rank) {
            Some(word) => f.write_str(word),
            None => write!(f, "{}", self.rank + 1),
        }
    }
}

impl FromStr for EigenstateSelector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(rank) = ORDINALS.iter().position(|w| *w == s) {
            return Ok(Self { rank });
        }
        match s.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Self { rank: i - 1 }),
            _ => Err(format!("invalid eigenstate selector `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub delta: DeltaAxis,
    pub photon_numbers: Vec<usize>,
    pub photon_order: usize,
    pub num_qubits: usize,
    pub flux_ratio: f64,
    pub eigenstate: EigenstateSelector,
    /// Qubit-cavity coupling in units of λ.
    pub coupling: f64,
    /// Fock cutoff; chosen per block when absent.
    pub fock_cutoff: Option<usize>,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn defaults(mode: SweepMode) -> Self {
        match mode {
            SweepMode::Fig2 | SweepMode::Custom => Self {
                mode,
                delta: DeltaAxis::Grid {
                    start: 0.0,
                    stop: 10.0,
                    steps: 200,
                },
                photon_numbers: vec![0, 10],
                photon_order: 1,
                num_qubits: 1,
                flux_ratio: 0.5,
                eigenstate: EigenstateSelector { rank: 0 },
                coupling: 1.0,
                fock_cutoff: None,
                output: None,
            },
            SweepMode::Fig3 => Self {
                mode,
                delta: DeltaAxis::Values(vec![0.0, 0.3]),
                photon_numbers: (0..=10).collect(),
                photon_order: 1,
                num_qubits: 2,
                flux_ratio: 0.5,
                eigenstate: EigenstateSelector { rank: 1 },
                coupling: 1.0,
                fock_cutoff: None,
                output: None,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |key: &str, reason: String| {
            Err(ConfigError::OutOfRange {
                key: key.to_string(),
                reason,
            })
        };
        match &self.delta {
            DeltaAxis::Grid { start, stop, steps } => {
                if *steps < 2 {
                    return range("steps", format!("{steps} < 2"));
                }
                if !(start.is_finite() && stop.is_finite()) || start > stop {
                    return range(
                        "delta_start",
                        format!("grid [{start}, {stop}] is not ordered"),
                    );
                }
            }
            DeltaAxis::Values(v) => {
                if v.is_empty() {
                    return range("delta_values", "empty list".into());
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return range("delta_values", "values must be finite".into());
                }
            }
        }
        if self.photon_numbers.is_empty() {
            return range("n", "empty list".into());
        }
        if self.photon_order == 0 {
            return range("k", "photon order must be at least 1".into());
        }
        if !(1..=2).contains(&self.num_qubits) {
            return range(
                "m",
                format!("{} qubits (supported: 1 or 2)", self.num_qubits),
            );
        }
        match self.mode {
            SweepMode::Fig2 if self.num_qubits != 1 => {
                return range("m", "fig2 sweeps a single qubit".into())
            }
            SweepMode::Fig3 if self.num_qubits != 2 => {
                return range("m", "fig3 sweeps two qubits".into())
            }
            _ => {}
        }
        if !(0.0..1.0).contains(&self.flux_ratio) {
            return range("flux_ratio", format!("{} not in [0, 1)", self.flux_ratio));
        }
        let states = 2usize << (self.num_qubits - 1);
        if self.eigenstate.rank >= states {
            return range(
                "eigenstate",
                format!("block has only {states} dressed states"),
            );
        }
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return range("coupling", format!("{} must be positive", self.coupling));
        }
        if let Some(cutoff) = self.fock_cutoff {
            let max_n = self.photon_numbers.iter().max().copied().unwrap_or(0);
            let need = (max_n + self.num_qubits * self.photon_order).max(2 * self.photon_order + 2);
            if cutoff < need {
                return range(
                    "fock_cutoff",
                    format!("{cutoff} < {need} needed by the sweep"),
                );
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text; parsing it returns an equal spec.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("mode", self.mode.name().into());
        match &self.delta {
            DeltaAxis::Grid { start, stop, steps } => {
                line("delta_start", start.to_string());
                line("delta_stop", stop.to_string());
                line("steps", steps.to_string());
            }
            DeltaAxis::Values(v) => line("delta_values", join(v)),
        }
        line("n", join(&self.photon_numbers));
        line("k", self.photon_order.to_string());
        line("m", self.num_qubits.to_string());
        line("flux_ratio", self.flux_ratio.to_string());
        line("eigenstate", self.eigenstate.to_string());
        line("coupling", self.coupling.to_string());
        line(
            "fock_cutoff",
            self.fock_cutoff
                .map_or("auto".to_string(), |c| c.to_string()),
        );
        if let Some(p) = &self.output {
            line("output", p.display().to_string());
        }
        out
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn parse_list<T: FromStr>(line: usize, value: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|s| {
            s.trim().parse::<T>().map_err(|_| ConfigError::Parse {
                line,
                reason: format!("cannot parse list element `{}`", s.trim()),
            })
        })
        .collect()
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| ConfigError::Parse {
        line,
        reason: format!("invalid value `{value}` for `{key}`"),
    })
}

/// Parses a configuration whose mode defaults to fig2.
pub fn parse_config(text: &[u8]) -> Result<SweepSpec, ConfigError> {
    parse_config_as(text, None)
}

/// Parses a configuration for a command that fixes the mode. A `mode` key in
/// the file must agree with `forced`.
pub fn parse_config_as(text: &[u8], forced: Option<SweepMode>) -> Result<SweepSpec, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::Parse {
        line: 0,
        reason: format!("input is not UTF-8: {e}"),
    })?;

    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            reason: "expected `key = value`".into(),
        })?;
        let key = key.trim().to_string();
        if entries.iter().any(|(_, k, _)| *k == key) {
            return Err(ConfigError::Parse {
                line,
                reason: format!("duplicate key `{key}`"),
            });
        }
        entries.push((line, key, value.trim().to_string()));
    }

    let declared = entries
        .iter()
        .find(|(_, k, _)| k == "mode")
        .map(|(line, _, v)| {
            v.parse::<SweepMode>().map_err(|reason| ConfigError::Parse {
                line: *line,
                reason,
            })
        })
        .transpose()?;
    let mode = match (forced, declared) {
        (Some(f), Some(d)) if f != d => {
            return Err(ConfigError::OutOfRange {
                key: "mode".into(),
                reason: format!(
                    "file declares {} but the command runs {}",
                    d.name(),
                    f.name()
                ),
            })
        }
        (Some(f), _) => f,
        (None, Some(d)) => d,
        (None, None) => SweepMode::Fig2,
    };

    let mut spec = SweepSpec::defaults(mode);
    let mut grid_keys = false;
    let mut list_key = false;
    let (mut start, mut stop, mut steps) = match spec.delta {
        DeltaAxis::Grid { start, stop, steps } => (start, stop, steps),
        DeltaAxis::Values(_) => (0.0, 10.0, 200),
    };

    for (line, key, value) in &entries {
        let line = *line;
        match key.as_str() {
            "mode" => {}
            "delta_start" => {
                start = parse_value(line, key, value)?;
                grid_keys = true;
            }
            "delta_stop" => {
                stop = parse_value(line, key, value)?;
                grid_keys = true;
            }
            "steps" => {
                steps = parse_value(line, key, value)?;
                grid_keys = true;
            }
            "delta_values" => {
                spec.delta = DeltaAxis::Values(parse_list(line, value)?);
                list_key = true;
            }
            "n" => spec.photon_numbers = parse_list(line, value)?,
            "k" => spec.photon_order = parse_value(line, key, value)?,
            "m" => spec.num_qubits = parse_value(line, key, value)?,
            "flux_ratio" => spec.flux_ratio = parse_value(line, key, value)?,
            "eigenstate" => {
                spec.eigenstate = value
                    .parse()
                    .map_err(|reason| ConfigError::Parse { line, reason })?
            }
            "coupling" => spec.coupling = parse_value(line, key, value)?,
            "fock_cutoff" => {
                spec.fock_cutoff = if value == "auto" {
                    None
                } else {
                    Some(parse_value(line, key, value)?)
                }
            }
            "output" => spec.output = Some(PathBuf::from(value)),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.clone(),
                })
            }
        }
    }
    if grid_keys && list_key {
        return Err(ConfigError::OutOfRange {
            key: "delta_values".into(),
            reason: "cannot be combined with delta_start/delta_stop/steps".into(),
        });
    }
    if grid_keys {
        spec.delta = DeltaAxis::Grid { start, stop, steps };
    }
    spec.validate()?;
    Ok(spec)
}
