//! Run configuration: built-in defaults, then a preset, then a config file,
//! then command-line flags, each layer deep-merged over the previous one.

use std::fs;
use std::path::{Path, PathBuf};

use delc_core::atomic::{AtomicParams, DressingCase, FixedGains, GainMapping};
use delc_core::{Axis, Criterion, GainGrid, System};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A single value or an inclusive `start..=stop` range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Fixed(f64),
    Range { start: f64, stop: f64, step: f64 },
}

impl AxisSpec {
    pub fn axis(&self, what: &str) -> Result<Axis<f64>, CliError> {
        match *self {
            AxisSpec::Fixed(v) if v.is_finite() => Ok(Axis::fixed(v)),
            AxisSpec::Fixed(v) => Err(CliError::Config(format!("{what}: value {v} is not finite"))),
            AxisSpec::Range { start, stop, step } => {
                Axis::new(start, stop, step).map_err(|e| CliError::Config(format!("{what}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainAxes {
    pub g1: AxisSpec,
    pub g2: AxisSpec,
    #[serde(default)]
    pub g3: Option<AxisSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub description: Option<String>,
    pub system: System,
    pub gains: GainAxes,
    /// Criterion labels such as `D12` or `PPT1|23`; empty means every Duan pair.
    pub criteria: Vec<String>,
    pub cases: Vec<String>,
    pub atomic: AtomicParams<f64>,
    pub delta1: AxisSpec,
    pub mapping: GainMapping<f64>,
    pub fixed_gains: FixedGains<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// CSV for tables; `channels` defaults to JSON when unset.
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let unit_to_three = AxisSpec::Range {
            start: 1.0,
            stop: 3.0,
            step: 0.02,
        };
        Self {
            description: None,
            system: System::Tri,
            gains: GainAxes {
                g1: unit_to_three,
                g2: unit_to_three,
                g3: None,
            },
            criteria: Vec::new(),
            cases: vec![DressingCase::Rho2ByE1.label().to_string()],
            atomic: AtomicParams::defaults(),
            delta1: AxisSpec::Range {
                start: -45.0,
                stop: 45.0,
                step: 0.01,
            },
            mapping: GainMapping::default(),
            fixed_gains: FixedGains { g2: 1.2, g3: None },
            out: None,
            format: None,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn criteria(&self) -> Result<Vec<Criterion>, CliError> {
        if self.criteria.is_empty() {
            let n = self.system.n_modes();
            let mut all = Vec::new();
            for i in 1..=n {
                for j in i + 1..=n {
                    all.push(Criterion::duan(i, j)?);
                }
            }
            return Ok(all);
        }
        self.criteria
            .iter()
            .map(|s| {
                s.parse::<Criterion>()
                    .map_err(|_| CliError::Config(format!("invalid criterion `{s}`")))
            })
            .collect()
    }

    pub fn cases(&self) -> Result<Vec<DressingCase>, CliError> {
        if self.cases.is_empty() {
            return Err(CliError::Config("no dressing case given".into()));
        }
        self.cases
            .iter()
            .map(|s| {
                s.parse::<DressingCase>()
                    .map_err(|_| CliError::Config(format!("unknown dressing case `{s}`")))
            })
            .collect()
    }

    pub fn gain_grid(&self) -> Result<GainGrid<f64>, CliError> {
        let g3 = match (self.system, self.gains.g3) {
            (System::Tri, None) => None,
            (System::Quad, Some(spec)) => Some(spec.axis("gains.g3")?),
            (System::Tri, Some(_)) => return Err(CliError::Config("three-mode system takes no gains.g3".into())),
            (System::Quad, None) => return Err(CliError::Config("four-mode system needs gains.g3".into())),
        };
        Ok(GainGrid {
            system: self.system,
            g1: self.gains.g1.axis("gains.g1")?,
            g2: self.gains.g2.axis("gains.g2")?,
            g3,
        })
    }

    pub fn delta1_axis(&self) -> Result<Axis<f64>, CliError> {
        self.delta1.axis("delta1")
    }

    pub fn atomic(&self) -> Result<AtomicParams<f64>, CliError> {
        self.atomic
            .validate()
            .map_err(|e| CliError::Config(format!("atomic: {e}")))?;
        Ok(self.atomic)
    }
}

/// Values supplied on the command line; `None` leaves the lower layers alone.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

const PRESETS: &[(&str, &str)] = &[
    ("fig3", include_str!("../../../presets/fig3.json")),
    ("fig4", include_str!("../../../presets/fig4.json")),
    ("fig5", include_str!("../../../presets/fig5.json")),
    ("fig6", include_str!("../../../presets/fig6.json")),
    ("fig8_col1", include_str!("../../../presets/fig8_col1.json")),
    ("fig8_col2", include_str!("../../../presets/fig8_col2.json")),
    ("fig8_col3", include_str!("../../../presets/fig8_col3.json")),
    ("figA3_col1", include_str!("../../../presets/figA3_col1.json")),
    ("figA3_col2", include_str!("../../../presets/figA3_col2.json")),
    ("figA3_col3", include_str!("../../../presets/figA3_col3.json")),
    ("fig9_tri", include_str!("../../../presets/fig9_tri.json")),
    ("fig9_quad", include_str!("../../../presets/fig9_quad.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Looks a preset up by name. `DELC_PRESET_DIR`, when set, is searched first
/// so edited copies take effect without a rebuild; a value that names an
/// existing `.json` file is read directly.
fn load_preset(name: &str) -> Result<Value, CliError> {
    let as_path = Path::new(name);
    if as_path.extension().is_some_and(|e| e == "json") && as_path.is_file() {
        return read_json(as_path);
    }
    if let Some(dir) = std::env::var_os("DELC_PRESET_DIR") {
        let path = Path::new(&dir).join(format!("{name}.json"));
        if path.is_file() {
            return read_json(&path);
        }
    }
    let text = PRESETS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset `{name}` (available: {})",
                preset_names().collect::<Vec<_>>().join(", ")
            ))
        })?;
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("preset `{name}`: {e}")))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Objects merge key by key; every other value replaces what was there.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn resolve(preset: Option<&str>, config: Option<&Path>, flags: Overrides) -> Result<RunConfig, CliError> {
    let mut value = serde_json::to_value(RunConfig::default()).expect("default config serializes");
    if let Some(name) = preset {
        merge(&mut value, load_preset(name)?);
    }
    if let Some(path) = config {
        merge(&mut value, read_json(path)?);
    }
    let mut cfg: RunConfig =
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    if let Some(out) = flags.out {
        cfg.out = Some(out);
    }
    if let Some(format) = flags.format {
        cfg.format = Some(format);
    }
    if let Some(jobs) = flags.jobs {
        cfg.jobs = Some(jobs);
    }
    if cfg.jobs == Some(0) {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    Ok(cfg)
}
