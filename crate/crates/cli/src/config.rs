use std::path::Path;

use anyhow::{bail, Context, Result};
use choigram::dynamics::{ModelKind, RateProfile, ScanGrid};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    Pauli,
    Weyl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Model and scan parameters, read from a JSON or TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub gamma0: f64,
    pub a: f64,
    pub omega: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub step: f64,
    pub basis: BasisName,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::AmplitudeDamping,
            gamma0: 0.2,
            a: 1.5,
            omega: 4.0,
            t_max: 6.0,
            n_points: 121,
            step: 1e-3,
            basis: BasisName::Pauli,
            tol: 1e-10,
        }
    }
}

impl RunConfig {
    /// `.json` files are parsed as JSON, everything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: Self = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma0", self.gamma0), ("a", self.a), ("omega", self.omega)] {
            if !v.is_finite() {
                bail!("{name} must be finite");
            }
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            bail!("t_max must be positive, got {}", self.t_max);
        }
        if self.n_points < 2 {
            bail!("n_points must be at least 2, got {}", self.n_points);
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            bail!("step must be positive, got {}", self.step);
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            bail!("tol must be a non-negative number, got {}", self.tol);
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<RateProfile<f64>> {
        Ok(RateProfile::parametric(self.gamma0, self.a, self.omega)?)
    }

    pub fn grid(&self) -> Result<ScanGrid<f64>> {
        Ok(ScanGrid::new(self.t_max, self.n_points)?)
    }
}

/// Scan worker count from `CHOIGRAM_THREADS`; unset means all cores, 0 means sequential.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("CHOIGRAM_THREADS") {
        Ok(v) => v.trim().parse().with_context(|| format!("CHOIGRAM_THREADS={v:?} is not a thread count")),
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Err(e) => bail!("CHOIGRAM_THREADS: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_configs_parse() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("run.toml");
        std::fs::write(&toml_path, "model = \"pure_dephasing\"\na = 0.0\nn_points = 11\nbasis = \"weyl\"\n").unwrap();
        let c = RunConfig::load(&toml_path).unwrap();
        assert_eq!(c.model, ModelKind::PureDephasing);
        assert_eq!((c.a, c.n_points, c.basis, c.gamma0), (0.0, 11, BasisName::Weyl, 0.2));

        let json_path = dir.path().join("run.json");
        std::fs::write(&json_path, r#"{"model": "amplitude_damping", "t_max": 3.0}"#).unwrap();
        assert_eq!(RunConfig::load(&json_path).unwrap().t_max, 3.0);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "n_points = 1\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
        std::fs::write(&path, "unknown_key = 3\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
        std::fs::write(&path, "model = \"spin_boson\"\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
    }
}
