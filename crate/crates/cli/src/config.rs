//! JSON run configuration with documented defaults and strict validation:
//! unknown keys are rejected and out-of-range values are named.

use exkerr_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Coeffs,
    Certify,
    Divcheck,
    Evolve,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub rstar_min: f64,
    pub rstar_max: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            rstar_min: -50.0,
            rstar_max: 300.0,
            nr: 2048,
            ntheta: 48,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    #[serde(rename = "A")]
    pub amplitude: f64,
    pub r0star: f64,
    pub sigma: f64,
    pub ell: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            r0star: 20.0,
            sigma: 4.0,
            ell: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierConfig {
    pub r_e: f64,
    pub eta: f64,
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        Self { r_e: 1.1, eta: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CoeffsConfig {
    pub n: usize,
    pub r_max: f64,
}

impl Default for CoeffsConfig {
    fn default() -> Self {
        Self { n: 1000, r_max: 50.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub grid_n: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { grid_n: 1_000_000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DivcheckConfig {
    pub h0: f64,
    pub levels: usize,
}

impl Default for DivcheckConfig {
    fn default() -> Self {
        Self { h0: 0.04, levels: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "M")]
    pub mass: f64,
    pub grid: GridConfig,
    pub cfl: f64,
    pub t_end: f64,
    pub output_every: f64,
    pub data: DataConfig,
    pub multiplier: MultiplierConfig,
    pub coeffs: CoeffsConfig,
    pub certify: CertifyConfig,
    pub divcheck: DivcheckConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            grid: GridConfig::default(),
            cfl: 0.4,
            t_end: 200.0,
            output_every: 1.0,
            data: DataConfig::default(),
            multiplier: MultiplierConfig::default(),
            coeffs: CoeffsConfig::default(),
            certify: CertifyConfig::default(),
            divcheck: DivcheckConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mass > 0.0) {
            return Err(Error::Config(format!("M must be positive, got {}", self.mass)));
        }
        if self.multiplier.r_e <= self.mass {
            return Err(Error::Config(format!(
                "multiplier.r_e must exceed M (got r_e = {}, M = {})",
                self.multiplier.r_e, self.mass
            )));
        }
        if !(self.multiplier.eta > 0.0 && self.multiplier.eta < 1.0) {
            return Err(Error::Config(format!(
                "multiplier.eta must lie in (0, 1), got {}",
                self.multiplier.eta
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if self.grid.nr < 16 {
            return Err(Error::Config(format!(
                "grid.nr = {} too coarse (need >= 16)",
                self.grid.nr
            )));
        }
        if self.grid.ntheta < 8 {
            return Err(Error::Config(format!(
                "grid.ntheta = {} too coarse (need >= 8)",
                self.grid.ntheta
            )));
        }
        if self.grid.rstar_min >= self.grid.rstar_max {
            return Err(Error::Config(
                "grid.rstar_min must lie below grid.rstar_max".into(),
            ));
        }
        Ok(())
    }
}

/// Parse a JSON config, then apply dotted-path overrides like
/// `multiplier.r_e=1.05`. Values parse as JSON where possible and fall
/// back to strings.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, Error> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    if !value.is_object() {
        return Err(Error::Config("config root must be a JSON object".into()));
    }
    for ov in overrides {
        let (path, raw) = ov
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{ov}` is not key=value")))?;
        let leaf: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let parts: Vec<&str> = path.split('.').collect();
        set_path(&mut value, &parts, leaf)
            .map_err(|_| Error::Config(format!("override path `{path}` crosses a non-object")))?;
    }
    let cfg: RunConfig = serde_json::from_value(value)
        .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn set_path(node: &mut serde_json::Value, parts: &[&str], leaf: serde_json::Value) -> Result<(), ()> {
    let obj = node.as_object_mut().ok_or(())?;
    if parts.len() == 1 {
        obj.insert(parts[0].to_string(), leaf);
        Ok(())
    } else {
        let child = obj
            .entry(parts[0].to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
        set_path(child, &parts[1..], leaf)
    }
}

/// Short hex digest of the canonical serialized config; stamped into every
/// emitted file so outputs are traceable to their inputs.
pub fn config_hash(cfg: &RunConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}
