//! Run configuration, read from TOML.
//!
//! ```toml
//! model = "lr1"
//! seed_lambda = 0.0
//! seed_guess = "lr1-rest"        # or an explicit vector
//! output_prefix = "out/lr1"
//!
//! [params]                       # LR1 only; any subset of the parameter names
//! g_si = 0.09
//!
//! [settings]
//! ds = 0.1
//! direction = -1
//! lambda_min = -3.0
//! lambda_max = 0.5
//!
//! [locate]
//! tol = 1e-9
//! ```

use std::fmt;
use std::path::Path;

use bifurcate_core::continuation::{ContinuationSettings, Direction};
use bifurcate_core::locate::LocateSettings;
use bifurcate_core::models::lr1::{lr1_system, ParamSet};
use bifurcate_core::{circle_system, fold_normal_form, hopf_normal_form, System};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    Lr1,
    FoldNf,
    HopfNf,
    Circle,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lr1 => "lr1",
            ModelKind::FoldNf => "fold_nf",
            ModelKind::HopfNf => "hopf_nf",
            ModelKind::Circle => "circle",
        }
    }

    /// The shipped default configuration for this model.
    pub fn builtin_config(self) -> &'static str {
        match self {
            ModelKind::Lr1 => include_str!("../configs/lr1.toml"),
            ModelKind::FoldNf => include_str!("../configs/fold_nf.toml"),
            ModelKind::HopfNf => include_str!("../configs/hopf_nf.toml"),
            ModelKind::Circle => include_str!("../configs/circle.toml"),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lr1" => Ok(ModelKind::Lr1),
            "fold_nf" => Ok(ModelKind::FoldNf),
            "hopf_nf" => Ok(ModelKind::HopfNf),
            "circle" => Ok(ModelKind::Circle),
            _ => Err(ConfigError::Invalid(format!("unknown model {s:?}"))),
        }
    }
}

/// Starting guess for the seed solve: an explicit vector or a preset name.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SeedGuess {
    Vector(Vec<f64>),
    Preset(String),
}

/// Any subset of [`ContinuationSettings`]; missing keys keep their defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverrides {
    pub ds: Option<f64>,
    pub max_steps: Option<usize>,
    pub newton_tol: Option<f64>,
    pub newton_max_iter: Option<usize>,
    pub direction: Option<Direction>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub max_halvings: Option<u32>,
    pub restore_after: Option<u32>,
}

impl SettingsOverrides {
    pub fn apply(&self, s: &mut ContinuationSettings) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { s.$f = v; } )* };
        }
        set!(ds, max_steps, newton_tol, newton_max_iter, direction, lambda_min, lambda_max, max_halvings, restore_after);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocateOverrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    seed_lambda: f64,
    seed_guess: SeedGuess,
    #[serde(default)]
    output_prefix: Option<String>,
    #[serde(default)]
    params: Option<ParamSet>,
    #[serde(default)]
    settings: SettingsOverrides,
    #[serde(default)]
    locate: LocateOverrides,
}

/// A validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    /// LR1 parameters; ignored by the other models.
    pub params: ParamSet,
    pub seed_lambda: f64,
    pub seed_guess: SeedGuess,
    pub settings: ContinuationSettings,
    pub locate: LocateSettings,
    pub output_prefix: String,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        if raw.params.is_some() && raw.model != ModelKind::Lr1 {
            return Err(ConfigError::Invalid(format!(
                "model {} takes no [params] table",
                raw.model
            )));
        }
        let mut settings = ContinuationSettings::default();
        raw.settings.apply(&mut settings);
        let mut locate = LocateSettings::default();
        if let Some(t) = raw.locate.tol {
            locate.tol = t;
        }
        if let Some(m) = raw.locate.max_iter {
            locate.max_iter = m;
        }
        let config = RunConfig {
            model: raw.model,
            params: raw.params.unwrap_or_default(),
            seed_lambda: raw.seed_lambda,
            seed_guess: raw.seed_guess,
            settings,
            locate,
            output_prefix: raw.output_prefix.unwrap_or_else(|| raw.model.as_str().to_owned()),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn builtin(model: ModelKind) -> Self {
        Self::from_toml_str(model.builtin_config()).expect("shipped config is valid")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn fmt::Display| ConfigError::Invalid(e.to_string());
        self.settings.validate().map_err(|e| invalid(&e))?;
        if !(self.locate.tol.is_finite() && self.locate.tol > 0.0) || self.locate.max_iter == 0 {
            return Err(ConfigError::Invalid("locate tol and max_iter must be positive".into()));
        }
        if !self.seed_lambda.is_finite() {
            return Err(ConfigError::Invalid("seed_lambda must be finite".into()));
        }
        if self.model == ModelKind::Lr1 {
            self.params.validate().map_err(|e| invalid(&e))?;
        }
        let guess = self.initial_guess()?;
        let dim = self.system()?.dim();
        if guess.len() != dim {
            return Err(ConfigError::Invalid(format!(
                "seed_guess has {} components, model {} has {}",
                guess.len(),
                self.model,
                dim
            )));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<Box<dyn System>, ConfigError> {
        Ok(match self.model {
            ModelKind::Lr1 => {
                Box::new(lr1_system(self.params.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?)
            }
            ModelKind::FoldNf => Box::new(fold_normal_form()),
            ModelKind::HopfNf => Box::new(hopf_normal_form()),
            ModelKind::Circle => Box::new(circle_system()),
        })
    }

    /// Resolves presets: `lr1-rest` is `V = −84`, `[Ca]_i = 2e-4` with every
    /// gate at its voltage steady state; `origin` is the zero vector.
    pub fn initial_guess(&self) -> Result<Vec<f64>, ConfigError> {
        match &self.seed_guess {
            SeedGuess::Vector(v) => Ok(v.clone()),
            SeedGuess::Preset(name) => match (name.as_str(), self.model) {
                ("lr1-rest", ModelKind::Lr1) => {
                    let m = lr1_system(self.params.clone())
                        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                    Ok(m.gated_state(-84.0, 2e-4))
                }
                ("origin", _) => Ok(vec![0.0; self.system()?.dim()]),
                _ => Err(ConfigError::Invalid(format!(
                    "unknown seed_guess preset {name:?} for model {}",
                    self.model
                ))),
            },
        }
    }
}
