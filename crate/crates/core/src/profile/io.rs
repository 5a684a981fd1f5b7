//! Profile files: a CSV table `s,u,v,sigma` plus a JSON sidecar with the
//! metadata needed to rebuild the [`Profile`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    Closure, Orientation, Profile, ProfileKind, ProfileState, ShootingDiagnostics, AXIS_START,
    AXIS_TOLERANCE, SIGMA_CLOSURE,
};
use crate::error::{Error, Result};
use crate::geometry::GeometryParams;

/// Tolerances that governed generation, echoed into every sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileTolerances {
    pub axis_start: f64,
    pub axis_tolerance: f64,
    pub sigma_closure: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ProfileTolerances {
    fn default() -> Self {
        Self {
            axis_start: AXIS_START,
            axis_tolerance: AXIS_TOLERANCE,
            sigma_closure: SIGMA_CLOSURE,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// Contents of the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub geometry: GeometryParams,
    #[serde(rename = "H")]
    pub mean_curvature: Option<f64>,
    pub closure: Closure,
    pub orientation: Orientation,
    pub source: ProfileKind,
    pub intervals: usize,
    pub tolerances: ProfileTolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ShootingDiagnostics>,
}

impl ProfileMetadata {
    pub fn of(profile: &Profile) -> Self {
        Self {
            geometry: *profile.geometry(),
            mean_curvature: profile.mean_curvature(),
            closure: profile.closure(),
            orientation: profile.orientation(),
            source: profile.kind().clone(),
            intervals: profile.samples().len() - 1,
            tolerances: ProfileTolerances::default(),
            diagnostics: profile.diagnostics().copied(),
        }
    }
}

/// Sidecar path for a profile CSV: same stem, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_samples<W: Write>(writer: W, samples: &[ProfileState]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in samples {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<R: std::io::Read>(reader: R) -> Result<Vec<ProfileState>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["s", "u", "v", "sigma"] {
        return Err(Error::MalformedProfile(format!(
            "expected header s,u,v,sigma, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Writes the CSV at `path` and its sidecar.
pub fn save_profile(profile: &Profile, path: &Path) -> Result<()> {
    write_samples(BufWriter::new(File::create(path)?), profile.samples())?;
    let mut side = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(&mut side, &ProfileMetadata::of(profile))?;
    side.write_all(b"\n")?;
    side.flush()?;
    Ok(())
}

/// Reads a profile saved by [`save_profile`]. Closed spheres are re-validated.
pub fn load_profile(path: &Path) -> Result<Profile> {
    let samples = read_samples(BufReader::new(File::open(path)?))?;
    let meta: ProfileMetadata =
        serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    let profile = match meta.closure {
        Closure::ClosedSphere => {
            Profile::closed_sphere(meta.geometry, samples, meta.mean_curvature, meta.source)?
                .with_orientation(meta.orientation)
        }
        Closure::Open => Profile::open(meta.geometry, samples, meta.mean_curvature, meta.source)?
            .with_orientation(meta.orientation),
    };
    Ok(match meta.diagnostics {
        Some(d) => profile.with_diagnostics(d),
        None => profile,
    })
}
