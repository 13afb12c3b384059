//! Run configuration, read from a TOML file with the sections
//! `surface`, `pml`, `incidence`, `mesh`, `sweep` and `output`.

use crate::CliError;
use pmlbie::geometry::{build_surface, Defect, PiecewiseCurve, Point, Profile};
use pmlbie::pml::{PmlParams, TopBc};
use pmlbie::scattering::{Incidence, Problem};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceConfig,
    pub pml: PmlConfig,
    pub incidence: IncidenceConfig,
    pub mesh: MeshConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Flat,
    Sine,
    /// Sine surface whose centre period is replaced by a straight segment.
    PerturbedSine,
    BinaryGrating,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    None,
    Flat,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub profile: ProfileKind,
    pub period: f64,
    /// Flat surface height.
    pub height: Option<f64>,
    pub amplitude: Option<f64>,
    pub phase: Option<f64>,
    pub offset: Option<f64>,
    pub depth: Option<f64>,
    pub width: Option<f64>,
    pub defect: Option<DefectKind>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TopKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PmlConfig {
    /// Absorbing constant S.
    pub s: f64,
    /// Thickness L.
    pub l: f64,
    /// Height H where the layer starts.
    pub h: f64,
    pub m: u32,
    pub top: TopKind,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum IncidenceKind {
    Cylindrical,
    Plane,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IncidenceConfig {
    pub kind: IncidenceKind,
    /// Refractive index n of the medium above the surface.
    pub index: f64,
    /// Free-space wavelength λ.
    pub wavelength: f64,
    pub source: Option<[f64; 2]>,
    /// Incidence angle θ in radians.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub n_per_segment: usize,
    pub grading: u32,
    pub rdp_level: usize,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub enum SweepParam {
    S,
    L,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Image-source solution, flat surface with cylindrical incidence only.
    Analytic,
    /// The same solver at the largest S and L of the sweep and twice the resolution.
    SelfReference,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub reference: Option<ReferenceKind>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub field_grid: bool,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub nx1: usize,
    pub nx2: usize,
    /// Number J of cells in lateral_decay.csv.
    pub decay_cells: usize,
    /// Write wall-clock times; off makes every output byte-reproducible.
    pub timing: bool,
    /// Write operators.bin with the marching operators.
    pub dump: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            field_grid: true,
            x1: [-5.5, 5.5],
            x2: [-2.0, 3.0],
            nx1: 111,
            nx2: 51,
            decay_cells: 8,
            timing: true,
            dump: false,
        }
    }
}

/// One-line description of a parse error; missing fields are named with their section.
fn describe(e: &toml::de::Error, text: &str) -> String {
    let msg = e.message().trim().to_string();
    let section = e.span().and_then(|sp| {
        let start = text[..sp.start.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
        let line = text[start..].lines().next().unwrap_or("").trim();
        line.strip_prefix('[').and_then(|l| l.strip_suffix(']')).map(|l| l.trim().to_string())
    });
    if let Some(field) = msg.strip_prefix("missing field `").and_then(|m| m.strip_suffix('`')) {
        return match section {
            Some(sec) => format!("missing key `{sec}.{field}`"),
            None => format!("missing key `{field}`"),
        };
    }
    match e.span() {
        Some(sp) => {
            let line = text[..sp.start.min(text.len())].matches('\n').count() + 1;
            format!("{msg} (line {line})")
        }
        None => msg,
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("missing key `{key}`"))
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(describe(&e, text)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_str(&text)
    }

    /// First 16 hex digits of the SHA-256 of the normalized configuration.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("configuration serializes");
        let d = Sha256::digest(text.as_bytes());
        d.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        self.curve()?;
        self.incidence()?;
        self.pml_params(self.pml.s, self.pml.l)?;
        let inc = &self.incidence;
        if !(inc.index > 0.0) || !(inc.wavelength > 0.0) {
            return Err(CliError::Config("incidence.index and incidence.wavelength must be positive".into()));
        }
        if self.mesh.n_per_segment < 4 || self.mesh.n_per_segment % 2 != 0 {
            return Err(CliError::Config(format!(
                "mesh.n_per_segment must be even and at least 4, got {}",
                self.mesh.n_per_segment
            )));
        }
        if self.mesh.grading < 2 {
            return Err(CliError::Config("mesh.grading must be at least 2".into()));
        }
        if self.mesh.rdp_level == 0 {
            return Err(CliError::Config("mesh.rdp_level must be at least 1".into()));
        }
        if let Some(sw) = &self.sweep {
            if sw.steps == 0 {
                return Err(CliError::Config("sweep.steps must be positive".into()));
            }
            if !(sw.from > 0.0) || !(sw.to > 0.0) {
                return Err(CliError::Config("sweep.from and sweep.to must be positive".into()));
            }
            if sw.reference == Some(ReferenceKind::Analytic) && !self.has_analytic_solution() {
                return Err(CliError::Config(
                    "sweep.reference = \"analytic\" needs a flat surface without defect and cylindrical incidence".into(),
                ));
            }
        }
        let o = &self.output;
        if o.field_grid && (o.nx1 == 0 || o.nx2 == 0 || !(o.x1[0] <= o.x1[1]) || !(o.x2[0] <= o.x2[1])) {
            return Err(CliError::Config("output grid needs nx1, nx2 > 0 and ordered x1, x2 ranges".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        2.0 * PI / self.incidence.wavelength * self.incidence.index
    }

    pub fn curve(&self) -> Result<PiecewiseCurve, CliError> {
        let s = &self.surface;
        let get = |v: Option<f64>, key: &str| v.ok_or_else(|| missing(key));
        let profile = match s.profile {
            ProfileKind::Flat => Profile::Flat { height: s.height.unwrap_or(0.0) },
            ProfileKind::Sine | ProfileKind::PerturbedSine => Profile::Sine {
                amplitude: get(s.amplitude, "surface.amplitude")?,
                phase: get(s.phase, "surface.phase")?,
                offset: s.offset.unwrap_or(0.0),
            },
            ProfileKind::BinaryGrating => Profile::BinaryGrating {
                depth: get(s.depth, "surface.depth")?,
                width: get(s.width, "surface.width")?,
            },
        };
        let defect = match (s.profile, s.defect) {
            (ProfileKind::PerturbedSine, None | Some(DefectKind::Flat)) => Defect::Flat,
            (ProfileKind::PerturbedSine, Some(DefectKind::None)) => {
                return Err(CliError::Config("surface.defect = \"none\" contradicts profile perturbed_sine".into()))
            }
            (_, Some(DefectKind::Flat)) => Defect::Flat,
            (_, _) => Defect::None,
        };
        Ok(build_surface(&profile, &defect, s.period)?)
    }

    pub fn incidence(&self) -> Result<Incidence, CliError> {
        let inc = &self.incidence;
        Ok(match inc.kind {
            IncidenceKind::Cylindrical => {
                let p = inc.source.ok_or_else(|| missing("incidence.source"))?;
                Incidence::Cylindrical { source: p as Point }
            }
            IncidenceKind::Plane => Incidence::Plane { theta: inc.theta.ok_or_else(|| missing("incidence.theta"))? },
        })
    }

    pub fn pml_params(&self, s: f64, l: f64) -> Result<PmlParams, CliError> {
        let top = match self.pml.top {
            TopKind::Dirichlet => TopBc::Dirichlet,
            TopKind::Neumann => TopBc::Neumann,
        };
        Ok(PmlParams::new(s, l, self.pml.h, self.pml.m, top)?)
    }

    /// Problem at the given S, L and resolution.
    pub fn problem_with(&self, s: f64, l: f64, n: usize) -> Result<Problem, CliError> {
        Ok(Problem {
            curve: self.curve()?,
            pml: self.pml_params(s, l)?,
            k: self.k(),
            n_per_segment: n,
            grading: self.mesh.grading,
            rdp_level: self.mesh.rdp_level,
        })
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        self.problem_with(self.pml.s, self.pml.l, self.mesh.n_per_segment)
    }

    /// Flat surface without defect, point source: the image-source solution is exact.
    pub fn has_analytic_solution(&self) -> bool {
        self.surface.profile == ProfileKind::Flat
            && self.surface.defect != Some(DefectKind::Flat)
            && self.incidence.kind == IncidenceKind::Cylindrical
    }

    /// Values of the swept parameter, evenly spaced from `from` to `to`.
    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            None => vec![],
            Some(sw) if sw.steps == 1 => vec![sw.from],
            Some(sw) => (0..sw.steps)
                .map(|i| sw.from + (sw.to - sw.from) * i as f64 / (sw.steps - 1) as f64)
                .collect(),
        }
    }
}
