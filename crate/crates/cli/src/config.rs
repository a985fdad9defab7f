//! Run configuration: an optional TOML file whose values are overridden by flags.
//!
//! ```toml
//! [potential]
//! family = "gaussian"
//! alpha = 1.0
//! gamma = 1.0
//!
//! [model]
//! m = 0.1
//! lambda = "0.1:4.1:0.2"   # or a number, or { start, stop, step }
//! q = 0.0
//!
//! [solver]
//! rel_tol = 1e-10
//!
//! [output]
//! format = "csv"
//! path = "fig2.csv"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shallowdirac::{Error as CoreError, PotentialSpec, SolverConfig};

/// Invalid configuration, located by a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

/// Maps a library parameter error onto the config section it came from.
fn located(section: &str, err: CoreError) -> ConfigError {
    match err {
        CoreError::InvalidParameter { name, reason } => invalid(format!("{section}.{name}"), reason),
        CoreError::DeltaContinuity { .. } => invalid(format!("{section}.gamma"), err.to_string()),
        other => invalid(section, other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialConfig {
    Gaussian { alpha: f64, gamma: f64 },
    Square { depth: f64, half_width: f64 },
    Delta { gamma: f64 },
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec, ConfigError> {
        match *self {
            Self::Gaussian { alpha, gamma } => PotentialSpec::gaussian_pair(alpha, gamma),
            Self::Square { depth, half_width } => PotentialSpec::square_well(depth, half_width),
            Self::Delta { gamma } => PotentialSpec::delta_pair(gamma),
        }
        .map_err(|e| located("potential", e))
    }
}

/// Evenly spaced couplings start, start + step, … up to stop inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RangeInput")]
pub struct LambdaRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeInput {
    Text(String),
    Table { start: f64, stop: f64, step: f64 },
}

impl TryFrom<RangeInput> for LambdaRange {
    type Error = String;

    fn try_from(input: RangeInput) -> Result<Self, String> {
        match input {
            RangeInput::Text(s) => s.parse(),
            RangeInput::Table { start, stop, step } => Ok(Self { start, stop, step }),
        }
    }
}

impl std::str::FromStr for LambdaRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got `{s}`"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{t}` in `{s}`: {e}"))
        };
        Ok(Self {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        })
    }
}

impl LambdaRange {
    fn validate(&self) -> Result<(), ConfigError> {
        let Self { start, stop, step } = *self;
        if ![start, stop, step].iter().all(|v| v.is_finite()) {
            return Err(invalid("model.lambda", "range bounds must be finite"));
        }
        if step <= 0.0 {
            return Err(invalid("model.lambda", format!("step must be positive, got {step}")));
        }
        if stop < start {
            return Err(invalid(
                "model.lambda",
                format!("empty range {start}:{stop}:{step}"),
            ));
        }
        if start < 0.0 {
            return Err(invalid("model.lambda", "couplings must be non-negative"));
        }
        Ok(())
    }

    /// The couplings, rounded to 12 significant digits so that 0.1 + 3·0.2 prints as 0.7.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let x = self.start + i as f64 * self.step;
                format!("{x:.11e}").parse().expect("formatted float")
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lambda {
    Value(f64),
    Range(LambdaRange),
}

impl std::str::FromStr for Lambda {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.contains(':') {
            s.parse().map(Lambda::Range)
        } else {
            s.trim()
                .parse()
                .map(Lambda::Value)
                .map_err(|e| format!("`{s}`: {e}"))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub m: Option<f64>,
    pub lambda: Option<Lambda>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub alpha: Vec<f64>,
    /// Number of γ values spanning [−1, 1].
    pub gamma_steps: usize,
    /// Top of the plotted mass range.
    pub m_max: f64,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            alpha: vec![0.5, 1.0, 2.0],
            gamma_steps: 41,
            m_max: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    /// Wavefunction CSV written by `shoot`.
    pub wavefunction: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Option<PotentialConfig>,
    pub model: ModelConfig,
    pub solver: SolverConfig,
    pub region: RegionConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let offset = named_key_offset(text, &message).or_else(|| e.span().map(|s| s.start));
            let field = offset.map_or_else(|| "config".into(), |o| field_at(text, o));
            invalid(field, message)
        })
    }

    pub fn potential(&self) -> Result<PotentialSpec, ConfigError> {
        self.potential
            .as_ref()
            .ok_or_else(|| invalid("potential", "no potential given; use --family or a [potential] table"))?
            .build()
    }

    pub fn mass(&self) -> Result<f64, ConfigError> {
        match self.model.m {
            None => Err(invalid("model.m", "required; use --m or model.m")),
            Some(m) if m > 0.0 && m.is_finite() => Ok(m),
            Some(m) => Err(invalid("model.m", format!("must be positive, got {m}"))),
        }
    }

    pub fn q(&self) -> Result<f64, ConfigError> {
        match self.model.q {
            None => Ok(0.0),
            Some(q) if q.is_finite() => Ok(q),
            Some(q) => Err(invalid("model.q", format!("must be finite, got {q}"))),
        }
    }

    /// Couplings in input order.
    pub fn couplings(&self) -> Result<Vec<f64>, ConfigError> {
        match self.model.lambda {
            None => Err(invalid("model.lambda", "required; use --lambda or model.lambda")),
            Some(Lambda::Value(l)) if l >= 0.0 && l.is_finite() => Ok(vec![l]),
            Some(Lambda::Value(l)) => Err(invalid(
                "model.lambda",
                format!("must be non-negative, got {l}"),
            )),
            Some(Lambda::Range(r)) => {
                r.validate()?;
                Ok(r.points())
            }
        }
    }

    pub fn single_coupling(&self) -> Result<f64, ConfigError> {
        if let Some(Lambda::Range(_)) = self.model.lambda {
            return Err(invalid("model.lambda", "this command takes a single coupling"));
        }
        self.couplings().map(|v| v[0])
    }

    pub fn solver(&self, spec: &PotentialSpec) -> Result<SolverConfig, ConfigError> {
        self.solver.validate(spec).map_err(|e| located("solver", e))?;
        Ok(self.solver)
    }

    pub fn region(&self) -> Result<&RegionConfig, ConfigError> {
        let r = &self.region;
        if r.alpha.is_empty() {
            return Err(invalid("region.alpha", "need at least one value"));
        }
        if let Some(a) = r.alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(invalid("region.alpha", format!("must be positive, got {a}")));
        }
        if r.gamma_steps < 2 {
            return Err(invalid("region.gamma_steps", "need at least 2"));
        }
        if !(r.m_max > 0.0 && r.m_max.is_finite()) {
            return Err(invalid("region.m_max", format!("must be positive, got {}", r.m_max)));
        }
        Ok(r)
    }
}

/// Dotted path of the TOML key whose value starts at byte `offset`, from the nearest
/// table header above it.
/// Offset of the key quoted in a message such as "unknown field `depth`". Tagged
/// tables report such errors with the span of the whole table.
fn named_key_offset(text: &str, message: &str) -> Option<usize> {
    let key = message.split('`').nth(1)?;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if trimmed.split('=').next().map(str::trim) == Some(key) && trimmed.contains('=') {
            return Some(offset + line.len() - trimmed.len());
        }
        offset += line.len();
    }
    None
}

fn field_at(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let key = text[line_start..]
        .split('=')
        .next()
        .map(str::trim)
        .filter(|k| !k.is_empty() && !k.starts_with('['))
        .unwrap_or("");
    let table = before[..line_start]
        .lines()
        .rev()
        .find_map(|l| {
            let l = l.trim();
            l.strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .map(str::trim)
        })
        .unwrap_or("");
    match (table.is_empty(), key.is_empty()) {
        (true, true) => "config".into(),
        (true, false) => key.into(),
        (false, true) => table.into(),
        (false, false) => format!("{table}.{key}"),
    }
}
