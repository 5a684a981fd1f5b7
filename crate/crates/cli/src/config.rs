use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thurston_willmore::experiments::Thresholds;
use thurston_willmore::{Execution, FunctionalCoefficients, GeometryParams, PerturbationSpec};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Effective settings of one run. Output files echo this record, and a file
/// containing it (bare or under a `config` key) can be passed to `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub geometry: Option<GeometryParams>,
    #[serde(rename = "H", default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub coefficients: Option<FunctionalCoefficients>,
    #[serde(default)]
    pub tolerances: Thresholds,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default)]
    pub perturbation_grid: Option<Vec<PerturbationSpec>>,
    #[serde(default = "default_family_dims")]
    pub family_dims: usize,
    #[serde(default)]
    pub sequential: bool,
}

fn default_family_dims() -> usize {
    3
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: None,
            h: None,
            coefficients: None,
            tolerances: Thresholds::default(),
            output_path: None,
            format: None,
            perturbation: None,
            perturbation_grid: None,
            family_dims: default_family_dims(),
            sequential: false,
        }
    }
}

/// Flag values that override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub k: Option<f64>,
    pub tau: Option<f64>,
    pub h: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub mode: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerances: Vec<String>,
    pub family_dims: Option<usize>,
    pub sequential: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("config {}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value)
            .map_err(|e| Failure::config(format!("config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), Failure> {
        if o.k.is_some() || o.tau.is_some() {
            let k = o.k.or(self.geometry.map(|g| g.k()));
            let tau = o.tau.or(self.geometry.map(|g| g.tau()));
            let (Some(k), Some(tau)) = (k, tau) else {
                return Err(Failure::config("--k and --tau must be given together"));
            };
            self.geometry = Some(GeometryParams::new(k, tau).map_err(Failure::from)?);
        }
        if let Some(h) = o.h {
            if !h.is_finite() {
                return Err(Failure::config(format!("H = {h} is not finite")));
            }
            self.h = Some(h);
        }
        if o.alpha.is_some() || o.beta.is_some() {
            let base = self
                .coefficients
                .or(self.geometry.map(|g| FunctionalCoefficients::canonical(&g)));
            let alpha = o.alpha.or(base.map(|c| c.alpha));
            let beta = o.beta.or(base.map(|c| c.beta));
            let (Some(alpha), Some(beta)) = (alpha, beta) else {
                return Err(Failure::config(
                    "--alpha and --beta need a geometry or each other",
                ));
            };
            self.coefficients =
                Some(FunctionalCoefficients::new(alpha, beta).map_err(Failure::from)?);
        }
        if o.epsilon.is_some() || o.mode.is_some() {
            let base = self.perturbation;
            let spec = PerturbationSpec {
                epsilon: o.epsilon.or(base.map(|p| p.epsilon)).unwrap_or(0.0),
                mode: o.mode.or(base.map(|p| p.mode)).unwrap_or(1),
            };
            spec.validate().map_err(Failure::from)?;
            self.perturbation = Some(spec);
        }
        if let Some(out) = &o.out {
            self.output_path = Some(out.clone());
        }
        if o.format.is_some() {
            self.format = o.format;
        }
        for item in &o.tolerances {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::config(format!("tolerance `{item}` is not NAME=VALUE")))?;
            let name = name.replace('-', "_");
            let value: f64 = value.parse().map_err(|_| {
                Failure::config(format!("tolerance {name}: `{value}` is not a number"))
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(Failure::config(format!(
                    "tolerance {name} must be finite and non-negative"
                )));
            }
            if !self.tolerances.set(&name, value) {
                return Err(Failure::config(format!(
                    "unknown tolerance `{name}`; known: {}",
                    Thresholds::NAMES.join(", ")
                )));
            }
        }
        if let Some(d) = o.family_dims {
            self.family_dims = d;
        }
        self.sequential |= o.sequential;
        Ok(())
    }

    pub fn geometry(&self) -> Result<GeometryParams, Failure> {
        self.geometry.ok_or_else(|| {
            Failure::config("geometry required: pass --k and --tau or a config file")
        })
    }

    pub fn mean_curvature(&self) -> Result<f64, Failure> {
        self.h
            .ok_or_else(|| Failure::config("mean curvature required: pass --H"))
    }

    /// Fills in canonical coefficients so the echo shows the values used.
    pub fn resolve_coefficients(&mut self, g: &GeometryParams) -> FunctionalCoefficients {
        *self
            .coefficients
            .get_or_insert_with(|| FunctionalCoefficients::canonical(g))
    }

    /// The configured format, or `default`; recorded for the echo.
    pub fn resolve_format(&mut self, default: Format) -> Format {
        *self.format.get_or_insert(default)
    }

    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

/// Rewrites `--tol-NAME VALUE` and `--tol-NAME=VALUE` into `--tol NAME=VALUE`.
pub fn expand_tolerance_flags(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut args = args.into_iter();
    while let Some(arg) = args.next() {
        match arg.strip_prefix("--tol-") {
            Some(rest) => {
                out.push("--tol".to_string());
                match rest.split_once('=') {
                    Some((name, value)) => out.push(format!("{name}={value}")),
                    None => out.push(format!("{rest}={}", args.next().unwrap_or_default())),
                }
            }
            None => out.push(arg),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_flags_are_rewritten() {
        let args = [
            "tw",
            "--tol-residual",
            "1e-3",
            "--tol-max-iterations=50",
            "--k",
            "-1",
        ];
        let out = expand_tolerance_flags(args.map(String::from));
        assert_eq!(
            out,
            [
                "tw",
                "--tol",
                "residual=1e-3",
                "--tol",
                "max-iterations=50",
                "--k",
                "-1"
            ]
        );
    }

    #[test]
    fn overrides_layer_on_top_of_the_file() {
        let mut c: RunConfig = serde_json::from_str(
            r#"{"geometry":{"k":0,"tau":0.5},"H":1.0,"tolerances":{"residual":0.5}}"#,
        )
        .unwrap();
        let o = Overrides {
            tau: Some(0.3),
            tolerances: vec!["max-iterations=7".into()],
            ..Default::default()
        };
        c.apply(&o).unwrap();
        assert_eq!(c.geometry.unwrap().tau(), 0.3);
        assert_eq!(c.tolerances.residual, 0.5);
        assert_eq!(c.tolerances.max_iterations, 7);
        assert_eq!(c.tolerances.variation, Thresholds::default().variation);
    }

    #[test]
    fn unknown_tolerance_is_a_config_error() {
        let mut c = RunConfig::default();
        let o = Overrides {
            tolerances: vec!["bogus=1".into()],
            ..Default::default()
        };
        assert_eq!(c.apply(&o).unwrap_err().code, 1);
    }
}
