//! Run configuration: a strict JSON envelope selecting a command, a seed,
//! an optional output directory, and per-command parameters. Unknown keys
//! are rejected at both levels so typos fail loudly instead of silently
//! running defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::limits::{
    AdditiveLimitConfig, ExtremalLimitConfig, GaussianCltConfig, JointLimitConfig,
};
use crate::experiments::network::{ChainConfig, PercolationConfig, SirConfig};
use crate::experiments::simulate::SimulateFieldConfig;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    SimulateField,
    AdditiveLimit,
    JointLimit,
    ExtremalLimit,
    GaussianClt,
    SirTail,
    SinrChain,
    Percolation,
}

impl CommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandName::SimulateField => "simulate-field",
            CommandName::AdditiveLimit => "additive-limit",
            CommandName::JointLimit => "joint-limit",
            CommandName::ExtremalLimit => "extremal-limit",
            CommandName::GaussianClt => "gaussian-clt",
            CommandName::SirTail => "sir-tail",
            CommandName::SinrChain => "sinr-chain",
            CommandName::Percolation => "percolation",
        }
    }

    pub const ALL: [CommandName; 8] = [
        CommandName::SimulateField,
        CommandName::AdditiveLimit,
        CommandName::JointLimit,
        CommandName::ExtremalLimit,
        CommandName::GaussianClt,
        CommandName::SirTail,
        CommandName::SinrChain,
        CommandName::Percolation,
    ];
}

impl std::fmt::Display for CommandName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: CommandName,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    #[serde(default)]
    params: Value,
}

/// Typed per-command parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandParams {
    SimulateField(SimulateFieldConfig),
    AdditiveLimit(AdditiveLimitConfig),
    JointLimit(JointLimitConfig),
    ExtremalLimit(ExtremalLimitConfig),
    GaussianClt(GaussianCltConfig),
    SirTail(SirConfig),
    SinrChain(ChainConfig),
    Percolation(PercolationConfig),
}

impl CommandParams {
    pub fn command(&self) -> CommandName {
        match self {
            CommandParams::SimulateField(_) => CommandName::SimulateField,
            CommandParams::AdditiveLimit(_) => CommandName::AdditiveLimit,
            CommandParams::JointLimit(_) => CommandName::JointLimit,
            CommandParams::ExtremalLimit(_) => CommandName::ExtremalLimit,
            CommandParams::GaussianClt(_) => CommandName::GaussianClt,
            CommandParams::SirTail(_) => CommandName::SirTail,
            CommandParams::SinrChain(_) => CommandName::SinrChain,
            CommandParams::Percolation(_) => CommandName::Percolation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CommandParams::SimulateField(c) => c.validate(),
            CommandParams::AdditiveLimit(c) => c.validate(),
            CommandParams::JointLimit(c) => c.validate(),
            CommandParams::ExtremalLimit(c) => c.validate(),
            CommandParams::GaussianClt(c) => c.validate(),
            CommandParams::SirTail(c) => c.validate(),
            CommandParams::SinrChain(c) => c.validate(),
            CommandParams::Percolation(c) => c.validate(),
        }
    }

    /// JSON echo of the effective (defaulted) parameters.
    pub fn to_json(&self) -> Result<Value> {
        let v = match self {
            CommandParams::SimulateField(c) => serde_json::to_value(c)?,
            CommandParams::AdditiveLimit(c) => serde_json::to_value(c)?,
            CommandParams::JointLimit(c) => serde_json::to_value(c)?,
            CommandParams::ExtremalLimit(c) => serde_json::to_value(c)?,
            CommandParams::GaussianClt(c) => serde_json::to_value(c)?,
            CommandParams::SirTail(c) => serde_json::to_value(c)?,
            CommandParams::SinrChain(c) => serde_json::to_value(c)?,
            CommandParams::Percolation(c) => serde_json::to_value(c)?,
        };
        Ok(v)
    }

    /// Parameters for `command` from a JSON object (all fields optional).
    pub fn from_json(command: CommandName, params: Value) -> Result<Self> {
        let params = if params.is_null() { json!({}) } else { params };
        if !params.is_object() {
            return Err(Error::Config("params must be a JSON object".into()));
        }
        let parsed = match command {
            CommandName::SimulateField => {
                CommandParams::SimulateField(serde_json::from_value(params)?)
            }
            CommandName::AdditiveLimit => {
                CommandParams::AdditiveLimit(serde_json::from_value(params)?)
            }
            CommandName::JointLimit => CommandParams::JointLimit(serde_json::from_value(params)?),
            CommandName::ExtremalLimit => {
                CommandParams::ExtremalLimit(serde_json::from_value(params)?)
            }
            CommandName::GaussianClt => CommandParams::GaussianClt(serde_json::from_value(params)?),
            CommandName::SirTail => CommandParams::SirTail(serde_json::from_value(params)?),
            CommandName::SinrChain => CommandParams::SinrChain(serde_json::from_value(params)?),
            CommandName::Percolation => CommandParams::Percolation(serde_json::from_value(params)?),
        };
        Ok(parsed)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub params: CommandParams,
}

impl RunConfig {
    pub fn command(&self) -> CommandName {
        self.params.command()
    }

    /// Defaults for a command: default parameters, seed 0, no output files.
    pub fn defaults(command: CommandName) -> Result<Self> {
        Ok(RunConfig {
            seed: DEFAULT_SEED,
            out_dir: None,
            params: CommandParams::from_json(command, json!({}))?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let params = CommandParams::from_json(raw.command, raw.params)?;
        Ok(RunConfig {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            out_dir: raw.out_dir,
            params,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        RunConfig::from_json(&text).map_err(|e| match e {
            Error::Json(inner) => Error::Config(format!("{}: {inner}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()
    }
}
