use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thurston_willmore::experiments::{
    default_sweep_spec, descend_energy_with, first_failure, sweep, verify_criticality_with,
    verify_identities, verify_minimality_with, write_sweep_csv, Check, DescentStart, SweepSpec,
};
use thurston_willmore::functional::{residual_trace, write_residual_trace};
use thurston_willmore::profile::io::{load_profile, sidecar_path, write_samples, ProfileMetadata};
use thurston_willmore::{
    energy, generate_cmc_sphere, perturbed_sphere, GeometryParams, PerturbationSpec, Profile,
};

use crate::config::{Format, RunConfig};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Criticality,
    Minimality,
    Descent,
    Identities,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Criticality => "criticality",
            Suite::Minimality => "minimality",
            Suite::Descent => "descent",
            Suite::Identities => "identities",
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::io(e.to_string()))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

fn document(config: &RunConfig, key: &str, payload: Value) -> Value {
    json!({ "config": to_value(config), key: payload })
}

/// `path`, or `default` when no output path was configured. Records the
/// choice in the config so the echo names the file actually written.
fn output_path(config: &mut RunConfig, default: impl FnOnce() -> PathBuf) -> PathBuf {
    config.output_path.get_or_insert_with(default).clone()
}

fn with_extension(path: &Path, format: Format) -> PathBuf {
    path.with_extension(match format {
        Format::Csv => "csv",
        Format::Json => "json",
    })
}

pub fn generate(mut config: RunConfig) -> Result<(), Failure> {
    let g = config.geometry()?;
    let h = config.mean_curvature()?;
    let format = config.resolve_format(Format::Csv);
    let profile = match config.perturbation {
        Some(spec) if spec.epsilon != 0.0 => perturbed_sphere(&g, h, spec)?,
        _ => generate_cmc_sphere(&g, h)?,
    };
    let path = output_path(&mut config, || with_extension(Path::new("profile"), format));
    let mut meta = to_value(&ProfileMetadata::of(&profile));
    meta["config"] = to_value(&config);
    match format {
        Format::Csv => {
            write_samples(create(&path)?, profile.samples())?;
            write_json(&sidecar_path(&path), &meta)?;
        }
        Format::Json => {
            meta["samples"] = to_value(&profile.samples());
            write_json(&path, &meta)?;
        }
    }
    println!(
        "wrote {} ({} samples, u_max = {}, length = {})",
        path.display(),
        profile.samples().len(),
        profile.max_u(),
        profile.length()
    );
    Ok(())
}

/// Loads a profile and reconciles its geometry with the configured one.
fn profile_for(config: &mut RunConfig, path: &Path) -> Result<(Profile, GeometryParams), Failure> {
    let profile = load_profile(path)?;
    let g = *profile.geometry();
    match config.geometry {
        Some(c) if c != g => {
            return Err(Failure::config(format!(
                "profile {} is in E({}, {}) but the configuration asks for E({}, {})",
                path.display(),
                g.k(),
                g.tau(),
                c.k(),
                c.tau()
            )))
        }
        _ => config.geometry = Some(g),
    }
    if config.h.is_none() {
        config.h = profile.mean_curvature();
    }
    Ok((profile, g))
}

pub fn energy_cmd(mut config: RunConfig, profile_path: &Path) -> Result<(), Failure> {
    let (profile, g) = profile_for(&mut config, profile_path)?;
    let coeffs = config.resolve_coefficients(&g);
    let report = energy(&profile, coeffs)?;
    let format = config.resolve_format(Format::Json);
    let path = output_path(&mut config, || {
        profile_path.with_extension(match format {
            Format::Csv => "energy.csv",
            Format::Json => "energy.json",
        })
    });
    let mut doc = document(&config, "energy", to_value(&report));
    doc["profile"] = json!(profile_path);
    match format {
        Format::Json => write_json(&path, &doc)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(create(&path)?);
            w.serialize(report).map_err(csv_failure)?;
            w.flush().map_err(|e| Failure::io(e.to_string()))?;
            write_json(&sidecar_path(&path), &doc)?;
        }
    }
    println!("E = {}", report.e);
    println!("E - 4pi = {:e}", report.e - 4.0 * PI);
    Ok(())
}

pub fn residual_cmd(mut config: RunConfig, profile_path: &Path) -> Result<(), Failure> {
    let (profile, g) = profile_for(&mut config, profile_path)?;
    let coeffs = config.resolve_coefficients(&g);
    let rows = residual_trace(&profile, coeffs, config.execution())?;
    let format = config.resolve_format(Format::Csv);
    let path = output_path(&mut config, || {
        profile_path.with_extension(match format {
            Format::Csv => "residual.csv",
            Format::Json => "residual.json",
        })
    });
    let max = rows.iter().fold(0.0_f64, |m, r| m.max(r.residual.abs()));
    match format {
        Format::Csv => {
            write_residual_trace(create(&path)?, &rows)?;
            let mut doc = document(&config, "max_residual", json!(max));
            doc["profile"] = json!(profile_path);
            write_json(&sidecar_path(&path), &doc)?;
        }
        Format::Json => {
            let mut doc = document(&config, "residual", to_value(&rows));
            doc["profile"] = json!(profile_path);
            doc["max_residual"] = json!(max);
            write_json(&path, &doc)?;
        }
    }
    println!(
        "max |residual| = {max:e} over {} interior samples",
        rows.len()
    );
    Ok(())
}

/// The minimality grid: `--epsilon` gives `±ε` on `--mode`, otherwise
/// `ε ∈ {±0.05, ±0.1, ±0.2}` on modes 1 and 2.
fn minimality_grid(config: &RunConfig) -> Vec<PerturbationSpec> {
    if let Some(grid) = &config.perturbation_grid {
        return grid.clone();
    }
    if let Some(p) = config.perturbation.filter(|p| p.epsilon != 0.0) {
        return vec![
            PerturbationSpec {
                epsilon: -p.epsilon.abs(),
                mode: p.mode,
            },
            PerturbationSpec {
                epsilon: p.epsilon.abs(),
                mode: p.mode,
            },
        ];
    }
    let mut grid = Vec::new();
    for mode in [1, 2] {
        for epsilon in [-0.2, -0.1, -0.05, 0.05, 0.1, 0.2] {
            grid.push(PerturbationSpec { epsilon, mode });
        }
    }
    grid
}

pub fn verify(mut config: RunConfig, suite: Suite) -> Result<(), Failure> {
    if suite == Suite::Identities {
        config.geometry.get_or_insert(GeometryParams::nil());
        config.h.get_or_insert(1.0);
    }
    let g = config.geometry()?;
    let h = config.mean_curvature()?;
    let thresholds = config.tolerances;
    let exec = config.execution();
    let (report, checks): (Value, Vec<Check>) = match suite {
        Suite::Criticality => {
            let coeffs = config.resolve_coefficients(&g);
            let r = verify_criticality_with(&g, h, coeffs, &thresholds, exec)?;
            (to_value(&r), r.checks)
        }
        Suite::Minimality => {
            let grid = minimality_grid(&config);
            for spec in &grid {
                spec.validate()?;
            }
            config.perturbation_grid = Some(grid.clone());
            let r = verify_minimality_with(&g, h, &grid, &thresholds, exec)?;
            (to_value(&r), r.checks)
        }
        Suite::Descent => {
            let p = *config.perturbation.get_or_insert(PerturbationSpec {
                epsilon: 0.2,
                mode: 1,
            });
            let start = DescentStart {
                epsilon: p.epsilon,
                mode: p.mode,
            };
            let r = descend_energy_with(&g, h, config.family_dims, start, &thresholds)?;
            (to_value(&r), r.checks)
        }
        Suite::Identities => {
            let r = verify_identities(&g, h, &thresholds)?;
            (to_value(&r), r.checks)
        }
    };
    let format = config.resolve_format(Format::Json);
    let path = output_path(&mut config, || {
        with_extension(Path::new(&format!("verify-{}", suite.name())), format)
    });
    let doc = document(&config, suite.name(), report);
    match format {
        Format::Json => write_json(&path, &doc)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(create(&path)?);
            for c in &checks {
                w.serialize(c).map_err(csv_failure)?;
            }
            w.flush().map_err(|e| Failure::io(e.to_string()))?;
            write_json(&sidecar_path(&path), &doc)?;
        }
    }
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} = {:e} (threshold {:e})",
            c.name, c.value, c.threshold
        );
    }
    match first_failure(&checks) {
        None => Ok(()),
        Some(c) => Err(Failure::verification(format!(
            "{} failed: check `{}` = {:e} against threshold {:e}",
            suite.name(),
            c.name,
            c.value,
            c.threshold
        ))),
    }
}

fn validate_sweep(spec: &SweepSpec) -> Result<(), Failure> {
    let all = spec
        .k_values
        .iter()
        .chain(&spec.tau_values)
        .chain(&spec.h_values);
    if let Some(x) = all.into_iter().find(|x| !x.is_finite()) {
        return Err(Failure::config(format!("sweep value {x} is not finite")));
    }
    for p in &spec.perturbation_grid {
        p.validate()?;
    }
    Ok(())
}

pub fn sweep_cmd(mut config: RunConfig, spec_path: Option<&Path>) -> Result<(), Failure> {
    let spec = match spec_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<SweepSpec>(&text)
                .map_err(|e| Failure::config(format!("sweep spec {}: {e}", path.display())))?
        }
        None => default_sweep_spec(),
    };
    validate_sweep(&spec)?;
    let format = config.resolve_format(Format::Csv);
    let rows = sweep(&spec, config.execution());
    let doc = {
        let mut d = document(&config, "sweep", to_value(&spec));
        d["rows"] = to_value(&rows);
        d
    };
    match (&config.output_path, format) {
        (None, Format::Csv) => {
            let stdout = std::io::stdout();
            write_sweep_csv(stdout.lock(), &rows)?;
        }
        (None, Format::Json) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).map_err(|e| Failure::io(e.to_string()))?
            );
        }
        (Some(path), Format::Csv) => {
            write_sweep_csv(create(path)?, &rows)?;
            let mut side = doc.clone();
            side.as_object_mut().map(|m| m.remove("rows"));
            write_json(&sidecar_path(path), &side)?;
        }
        (Some(path), Format::Json) => write_json(path, &doc)?,
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} rows, {failed} with errors", rows.len());
    Ok(())
}

fn csv_failure(e: csv::Error) -> Failure {
    if e.is_io_error() {
        Failure::io(e.to_string())
    } else {
        Failure::config(e.to_string())
    }
}
