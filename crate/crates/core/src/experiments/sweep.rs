use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Execution;
use crate::error::{Error, Result};
use crate::functional::{canonical_coefficients, energy, residual_trace};
use crate::geometry::GeometryParams;
use crate::profile::{generate_cmc_sphere, perturbed_sphere, PerturbationSpec};

/// A grid of `(k, τ, H)` cases, optionally with perturbations to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    #[serde(rename = "H_values")]
    pub h_values: Vec<f64>,
    #[serde(default)]
    pub perturbation_grid: Vec<PerturbationSpec>,
}

impl SweepSpec {
    /// Cases in output order: `k` outermost, then `τ`, then `H`.
    pub fn cases(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &k in &self.k_values {
            for &tau in &self.tau_values {
                for &h in &self.h_values {
                    out.push((k, tau, h));
                }
            }
        }
        out
    }
}

/// The acceptance grid: `k ∈ {−1, −¼, 0, ¼, 1}`, `τ ∈ {−½, 0, 0.3, ½}`,
/// `H ∈ {0.6, 0.8, 1}`. Every pair satisfies `H² > −k/4` with margin.
pub fn default_sweep_spec() -> SweepSpec {
    SweepSpec {
        k_values: vec![-1.0, -0.25, 0.0, 0.25, 1.0],
        tau_values: vec![-0.5, 0.0, 0.3, 0.5],
        h_values: vec![0.6, 0.8, 1.0],
        perturbation_grid: Vec::new(),
    }
}

/// One sweep case. Numbers are absent when the case failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub tau: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub exists: bool,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub max_residual: Option<f64>,
    pub second_summand: Option<f64>,
    pub u_max: Option<f64>,
    pub area: Option<f64>,
    pub error: Option<String>,
    /// Smallest `E(perturbed) − E` over the perturbation grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_perturbed_excess: Option<f64>,
}

fn run_case(k: f64, tau: f64, h: f64, perturbations: &[PerturbationSpec]) -> SweepRow {
    let mut row = SweepRow {
        k,
        tau,
        h,
        exists: true,
        e: None,
        max_residual: None,
        second_summand: None,
        u_max: None,
        area: None,
        error: None,
        min_perturbed_excess: None,
    };
    let outcome = (|| -> Result<()> {
        let g = GeometryParams::new(k, tau)?;
        let coeffs = canonical_coefficients(&g);
        let p = generate_cmc_sphere(&g, h)?;
        let r = energy(&p, coeffs)?;
        let rows = residual_trace(&p, coeffs, Execution::Sequential)?;
        row.e = Some(r.e);
        row.second_summand = Some(r.second_summand);
        row.area = Some(r.area);
        row.u_max = Some(p.max_u());
        row.max_residual = Some(rows.iter().fold(0.0, |m, x| m.max(x.residual.abs())));
        for spec in perturbations {
            let q = perturbed_sphere(&g, h, *spec)?;
            let excess = energy(&q, coeffs)?.e - r.e;
            row.min_perturbed_excess =
                Some(row.min_perturbed_excess.map_or(excess, |m| m.min(excess)));
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.exists = !matches!(
            e,
            Error::ExistenceViolation { .. } | Error::InvalidGeometry(_)
        );
        row.error = Some(e.to_string());
    }
    row
}

/// Runs every case of the grid. Failures are recorded per row; rows come back
/// in [`SweepSpec::cases`] order. `TW_THREADS` caps the parallel pool.
pub fn sweep(spec: &SweepSpec, exec: Execution) -> Vec<SweepRow> {
    let cases = spec.cases();
    let run = || {
        exec.map(&cases, |&(k, tau, h)| {
            run_case(k, tau, h, &spec.perturbation_grid)
        })
    };
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        let threads = std::env::var("TW_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0);
        if let Some(n) = threads {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                return pool.install(run);
            }
        }
    }
    run()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    k: f64,
    tau: f64,
    #[serde(rename = "H")]
    h: f64,
    exists: bool,
    #[serde(rename = "E")]
    e: Option<f64>,
    max_residual: Option<f64>,
    second_summand: Option<f64>,
    u_max: Option<f64>,
    area: Option<f64>,
    error: Option<&'a str>,
}

pub const SWEEP_HEADER: &str = "k,tau,H,exists,E,max_residual,second_summand,u_max,area,error";

/// CSV with header `k,tau,H,exists,E,max_residual,second_summand,u_max,area,error`.
pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    w.write_record(SWEEP_HEADER.split(','))?;
    for r in rows {
        w.serialize(CsvRow {
            k: r.k,
            tau: r.tau,
            h: r.h,
            exists: r.exists,
            e: r.e,
            max_residual: r.max_residual,
            second_summand: r.second_summand,
            u_max: r.u_max,
            area: r.area,
            error: r.error.as_deref(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rows_follow_the_grid_and_flag_missing_spheres() {
        let spec = SweepSpec {
            k_values: vec![-1.0, 0.0],
            tau_values: vec![0.0],
            h_values: vec![0.5, 1.0],
            perturbation_grid: vec![PerturbationSpec::new(0.1, 1).unwrap()],
        };
        let rows = sweep(&spec, Execution::Sequential);
        assert_eq!(rows.len(), 4);
        assert!(!rows[0].exists);
        assert!(rows[0].error.as_deref().unwrap().contains("H^2 > -k/4"));
        let unit = &rows[3];
        assert!((unit.e.unwrap() - 4.0 * PI).abs() < 1e-9);
        assert!((unit.u_max.unwrap() - 1.0).abs() < 1e-12);
        assert!((unit.area.unwrap() - 4.0 * PI).abs() < 1e-8);
        assert!(unit.min_perturbed_excess.unwrap() > 0.0);
    }

    #[test]
    fn empty_grid_writes_only_the_header() {
        let spec = SweepSpec {
            k_values: vec![],
            tau_values: vec![0.0],
            h_values: vec![1.0],
            perturbation_grid: vec![],
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &sweep(&spec, Execution::default())).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn parallel_and_sequential_tables_are_identical() {
        let spec = SweepSpec {
            k_values: vec![-0.25, 1.0],
            tau_values: vec![0.3],
            h_values: vec![0.8, 1.0],
            perturbation_grid: vec![],
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_sweep_csv(&mut a, &sweep(&spec, Execution::Sequential)).unwrap();
        write_sweep_csv(&mut b, &sweep(&spec, Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }
}
