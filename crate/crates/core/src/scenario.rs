//! Run configurations for the two experimental setups and the batch
//! computations behind the command-line tool.
//!
//! A [`ScenarioConfig`] is a TOML document whose physical keys carry their
//! unit in the name (`omega0_mev`, `theta_rad`, ...). Every run returns its
//! output files as in-memory [`OutputFile`]s plus a metadata record holding
//! the fully resolved configuration, so a run is reproduced bit for bit by
//! feeding the metadata's `[config]` table back in.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Pol;
use crate::amplitude::BeamPolarization;
use crate::constants::ELECTRON_MASS;
use crate::cross_section::{physical_panels, PANEL_LABELS};
use crate::entanglement::{
    tau_grid, SolverKind, SolverSettings, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::integration::{
    detector_average, event_rate, total_cross_section, BeamParameters, DetectorWindow,
    IntegrationResult, Process,
};
use crate::kinematics::{threshold_boundary, CollisionSetup, Direction, FinalStateConfig};

/// Published calculation of the detector-averaged cross section for the
/// 0.662 MeV rest-electron experiment, b/sr³. Shown in reports only.
pub const REFERENCE_THEORY_B_SR3: f64 = 4.1e-9;
/// Measured value and its one-standard-deviation error for the same
/// experiment, b/sr³. Shown in reports only.
pub const REFERENCE_EXPERIMENT_B_SR3: (f64, f64) = (8.1e-9, 2.4e-9);

/// Names accepted by [`ScenarioConfig::builtin`].
pub const BUILTIN_SCENARIOS: [&str; 3] = ["mgbr1968", "xfel", "fig4a"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub collision: CollisionSpec,
    pub detectors: DetectorSpec,
    pub beam: BeamSpec,
    pub sampling: SamplingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub luminosity: Option<BeamParameters>,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionSpec {
    /// Incoming electron energy; omitted for an electron at rest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electron_energy_mev: Option<f64>,
    pub omega0_mev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub theta_rad: [f64; 3],
    pub phi_rad: [f64; 3],
    /// Solid angle of each detector; needed for detector averages.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solid_angle_sr: Option<f64>,
    pub threshold_mev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    pub polarization: PolarizationSpec,
}

/// Beam polarization: `"x"`, `"y"`, or a transverse vector `[x, y, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolarizationSpec {
    Label(String),
    Vector([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub budget: u64,
    pub seed: u64,
}

/// Rectangular `(ω₁, ω₂)` grid with inclusive end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub omega1_mev: [f64; 2],
    pub omega2_mev: [f64; 2],
    pub points: [usize; 2],
    /// Samples along `ω₁` for the `ω₃ = ε` boundary curve.
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
}

fn default_boundary_points() -> usize {
    200
}

/// Logarithmic `ω₀` grid with inclusive end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub omega0_mev: [f64; 2],
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// What a run computes; decides which config sections are required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Mgbr1968,
    Grid,
    Totals,
    Scan,
}

impl RunMode {
    pub fn name(&self) -> &'static str {
        match self {
            RunMode::Mgbr1968 => "mgbr1968",
            RunMode::Grid => "grid",
            RunMode::Totals => "totals",
            RunMode::Scan => "scan",
        }
    }
}

/// Quantity tabulated by a grid run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Spin-summed σ5, one file per final polarization triple.
    Sigma5,
    /// Entanglement measure τ of the spin-summed polarization state.
    Tau,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::Sigma5 => "sigma5",
            Observable::Tau => "tau",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma5" => Ok(Observable::Sigma5),
            "tau" => Ok(Observable::Tau),
            _ => Err(Error::InvalidArgument(format!(
                "unknown observable '{s}' (sigma5, tau)"
            ))),
        }
    }
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::config(field, message)
}

fn require(field: &str, ok: bool, message: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(config_error(field, message))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    require(
        field,
        v > 0.0 && v.is_finite(),
        format!("must be positive and finite, got {v}"),
    )
}

impl ScenarioConfig {
    /// Built-in scenario by name (see [`BUILTIN_SCENARIOS`]).
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "mgbr1968" => Some(Self::mgbr1968()),
            "xfel" => Some(Self::xfel()),
            "fig4a" => Some(Self::fig4a()),
            _ => None,
        }
    }

    /// 0.662 MeV photons on electrons at rest, three coplanar detectors at
    /// θ = π/2 with 0.378 sr each, 13 keV threshold.
    pub fn mgbr1968() -> Self {
        ScenarioConfig {
            name: "mgbr1968".into(),
            collision: CollisionSpec {
                electron_energy_mev: None,
                omega0_mev: 0.662,
            },
            detectors: DetectorSpec {
                theta_rad: [PI / 2.0; 3],
                phi_rad: [2.0 * PI / 3.0, 4.0 * PI / 3.0, 0.0],
                solid_angle_sr: Some(0.378),
                threshold_mev: 0.013,
            },
            beam: BeamSpec {
                polarization: PolarizationSpec::Label("x".into()),
            },
            sampling: SamplingSpec {
                budget: 400_000,
                seed: 1,
            },
            grid: None,
            scan: Some(ScanSpec {
                omega0_mev: [0.0662, 66.2],
                points: 7,
            }),
            luminosity: None,
            solver: SolverSpec::default(),
        }
    }

    /// 1 keV photons backscattered on 5 GeV electrons, detectors at
    /// θ = π − 1.5 mrad, 50 MeV threshold, LCLS-like beams.
    pub fn xfel() -> Self {
        let theta = PI - 1.5e-3;
        ScenarioConfig {
            name: "xfel".into(),
            collision: CollisionSpec {
                electron_energy_mev: Some(5000.0),
                omega0_mev: 1e-3,
            },
            detectors: DetectorSpec {
                theta_rad: [theta; 3],
                phi_rad: [2.0 * PI / 3.0, 4.0 * PI / 3.0, 2.0 * PI],
                solid_angle_sr: None,
                threshold_mev: 50.0,
            },
            beam: BeamSpec {
                polarization: PolarizationSpec::Label("x".into()),
            },
            sampling: SamplingSpec {
                budget: 400_000,
                seed: 1,
            },
            grid: Some(GridSpec {
                omega1_mev: [50.0, 1300.0],
                omega2_mev: [50.0, 1300.0],
                points: [26, 26],
                boundary_points: default_boundary_points(),
            }),
            scan: None,
            luminosity: Some(BeamParameters::LCLS),
            solver: SolverSpec::default(),
        }
    }

    /// Rest-electron geometry of the entanglement map: θ = π/2 − 1 rad for
    /// all detectors (the literal reading; set `theta_rad` to π/2 for the
    /// alternative one).
    pub fn fig4a() -> Self {
        let theta = PI / 2.0 - 1.0;
        ScenarioConfig {
            name: "fig4a".into(),
            collision: CollisionSpec {
                electron_energy_mev: None,
                omega0_mev: 0.662,
            },
            detectors: DetectorSpec {
                theta_rad: [theta; 3],
                phi_rad: [2.0 * PI / 3.0, 4.0 * PI / 3.0, 2.0 * PI],
                solid_angle_sr: None,
                threshold_mev: 0.013,
            },
            beam: BeamSpec {
                polarization: PolarizationSpec::Label("x".into()),
            },
            sampling: SamplingSpec {
                budget: 400_000,
                seed: 1,
            },
            grid: Some(GridSpec {
                omega1_mev: [0.013, 0.662],
                omega2_mev: [0.013, 0.662],
                points: [26, 26],
                boundary_points: default_boundary_points(),
            }),
            scan: None,
            luminosity: None,
            solver: SolverSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| {
                    let line = text[..s.start].lines().count().max(1);
                    format!("line {line}")
                })
                .unwrap_or_else(|| "document".into());
            config_error(&field, e.message().to_string())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types serialize to TOML")
    }

    /// Checks every field `mode` needs, reporting the first failure with
    /// its dotted key.
    pub fn validate(&self, mode: RunMode) -> Result<()> {
        let c = &self.collision;
        positive("collision.omega0_mev", c.omega0_mev)?;
        if let Some(e) = c.electron_energy_mev {
            require(
                "collision.electron_energy_mev",
                e.is_finite() && e >= ELECTRON_MASS,
                format!("must be at least the electron mass {ELECTRON_MASS} MeV, got {e}"),
            )?;
        }
        let setup = self.setup()?;

        let d = &self.detectors;
        for t in d.theta_rad {
            require(
                "detectors.theta_rad",
                (0.0..=PI).contains(&t),
                format!("{t} outside [0, π]"),
            )?;
        }
        for p in d.phi_rad {
            require(
                "detectors.phi_rad",
                p.is_finite(),
                format!("{p} is not finite"),
            )?;
        }
        positive("detectors.threshold_mev", d.threshold_mev)?;
        require(
            "detectors.threshold_mev",
            d.threshold_mev < setup.max_photon_energy() || mode == RunMode::Scan,
            format!(
                "{} MeV is above the largest photon energy {} MeV",
                d.threshold_mev,
                setup.max_photon_energy()
            ),
        )?;
        if matches!(mode, RunMode::Mgbr1968 | RunMode::Scan) {
            let omega = d.solid_angle_sr.ok_or_else(|| {
                config_error("detectors.solid_angle_sr", "required for detector averages")
            })?;
            positive("detectors.solid_angle_sr", omega)?;
            for dir in self.directions() {
                DetectorWindow::new(&dir, omega)
                    .map_err(|e| config_error("detectors.solid_angle_sr", e.to_string()))?;
            }
        }

        self.beam_polarization()?;
        require(
            "sampling.budget",
            self.sampling.budget >= 2,
            format!("need at least 2 samples, got {}", self.sampling.budget),
        )?;
        positive("solver.tolerance", self.solver.tolerance)?;
        require(
            "solver.max_iterations",
            self.solver.max_iterations > 0,
            "must be at least 1",
        )?;

        match mode {
            RunMode::Grid => {
                let g = self
                    .grid
                    .as_ref()
                    .ok_or_else(|| config_error("grid", "section required for grid runs"))?;
                for (field, [lo, hi]) in [
                    ("grid.omega1_mev", g.omega1_mev),
                    ("grid.omega2_mev", g.omega2_mev),
                ] {
                    positive(field, lo)?;
                    require(
                        field,
                        hi.is_finite() && hi >= lo,
                        format!("range [{lo}, {hi}] is empty"),
                    )?;
                }
                require(
                    "grid.points",
                    g.points.iter().all(|&n| n >= 1),
                    "need at least one point per axis",
                )?;
                require(
                    "grid.boundary_points",
                    g.boundary_points >= 1,
                    "must be at least 1",
                )?;
            }
            RunMode::Scan => {
                let s = self
                    .scan
                    .as_ref()
                    .ok_or_else(|| config_error("scan", "section required for scans"))?;
                let [lo, hi] = s.omega0_mev;
                positive("scan.omega0_mev", lo)?;
                require(
                    "scan.omega0_mev",
                    hi.is_finite() && hi >= lo,
                    format!("range [{lo}, {hi}] is empty"),
                )?;
                require("scan.points", s.points >= 1, "need at least one point")?;
                require(
                    "collision.electron_energy_mev",
                    c.electron_energy_mev.is_none_or(|e| e == ELECTRON_MASS),
                    "energy scans are defined for an electron at rest",
                )?;
            }
            RunMode::Totals => {
                self.beams()
                    .validate()
                    .map_err(|e| config_error("luminosity", e.to_string()))?;
            }
            RunMode::Mgbr1968 => {}
        }
        Ok(())
    }

    pub fn setup(&self) -> Result<CollisionSetup> {
        self.setup_at(self.collision.omega0_mev)
    }

    fn setup_at(&self, omega0: f64) -> Result<CollisionSetup> {
        let e = self.collision.electron_energy_mev.unwrap_or(ELECTRON_MASS);
        CollisionSetup::new(e, omega0).map_err(|err| config_error("collision", err.to_string()))
    }

    pub fn directions(&self) -> [Direction; 3] {
        let d = &self.detectors;
        std::array::from_fn(|j| Direction::new(d.theta_rad[j], d.phi_rad[j]))
    }

    pub fn beam_polarization(&self) -> Result<BeamPolarization> {
        let pol = match &self.beam.polarization {
            PolarizationSpec::Label(l) if l == "x" => BeamPolarization::Basis(Pol::First),
            PolarizationSpec::Label(l) if l == "y" => BeamPolarization::Basis(Pol::Second),
            PolarizationSpec::Label(l) => {
                return Err(config_error(
                    "beam.polarization",
                    format!("unknown label '{l}' (x, y or [x, y, 0])"),
                ))
            }
            PolarizationSpec::Vector(v) => BeamPolarization::Vector(*v),
        };
        let setup = self.setup()?;
        pol.vector(&setup)
            .map_err(|e| config_error("beam.polarization", e.to_string()))?;
        Ok(pol)
    }

    /// Beam parameters for event rates (LCLS-like when not configured).
    pub fn beams(&self) -> BeamParameters {
        self.luminosity.unwrap_or(BeamParameters::LCLS)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            kind: SolverKind::InteriorPoint,
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
            ..SolverSettings::default()
        }
    }
}

/// `n` points from `lo` to `hi` inclusive; a single point sits at `lo`.
pub fn linear_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive, rounded
/// to 12 significant digits so that decade multiples of `lo` come out as
/// the intended decimal (0.0662 × 10 is 0.662, not 0.6619999999999998).
pub fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    let round = |x: f64| {
        format!("{x:.11e}")
            .parse::<f64>()
            .expect("formatted float parses")
    };
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    round(lo * (ratio * i as f64 / (n - 1) as f64).exp())
                }
            })
            .collect(),
    }
}

/// One named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    fn new(name: impl Into<String>, contents: String) -> Self {
        OutputFile {
            name: name.into(),
            contents,
        }
    }
}

/// Writes `files` into `dir` (created if missing) in the given order.
pub fn write_outputs(dir: &Path, files: &[OutputFile]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for f in files {
        std::fs::write(dir.join(&f.name), &f.contents)?;
    }
    Ok(())
}

/// One grid cell as written to disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub omega1: f64,
    pub omega2: f64,
    pub value: f64,
    pub masked: bool,
}

pub const GRID_HEADER: &str = "omega1_mev\tomega2_mev\tvalue\tmasked";
pub const BOUNDARY_HEADER: &str = "omega1_mev\tomega2_mev";

/// Tab-separated grid table. `{:e}` prints the shortest representation
/// that parses back to the same `f64`, so [`parse_grid`] followed by
/// `write_grid` reproduces the text exactly.
pub fn write_grid(rows: &[GridRow]) -> String {
    let mut s = String::with_capacity(48 * (rows.len() + 1));
    s.push_str(GRID_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:e}\t{:e}\t{:e}\t{}",
            r.omega1,
            r.omega2,
            r.value,
            u8::from(r.masked)
        );
    }
    s
}

pub fn parse_grid(text: &str) -> Result<Vec<GridRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == GRID_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header '{GRID_HEADER}'"),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 columns, found {}", cols.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("'{s}': {e}")));
            let masked = match cols[3] {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("masked flag must be 0 or 1, got '{other}'"))),
            };
            Ok(GridRow {
                omega1: num(cols[0])?,
                omega2: num(cols[1])?,
                value: num(cols[2])?,
                masked,
            })
        })
        .collect()
}

/// File name of σ5 panel `index` in [`PANEL_LABELS`] order: `sigma5_a111.tsv`, ...
pub fn panel_file_name(index: usize) -> String {
    let labels = PANEL_LABELS[index];
    let letter = (b'a' + index as u8) as char;
    format!(
        "sigma5_{letter}{}{}{}.tsv",
        labels[0].index() + 1,
        labels[1].index() + 1,
        labels[2].index() + 1
    )
}

/// σ5 panels on the configured grid, `omega2` fastest. `None` marks a
/// cell that is unphysical or has a photon below threshold.
pub fn sigma5_grid(cfg: &ScenarioConfig) -> Result<Vec<(f64, f64, Option<[f64; 8]>)>> {
    cfg.validate(RunMode::Grid)?;
    let setup = cfg.setup()?;
    let directions = cfg.directions();
    let beam = cfg.beam_polarization()?;
    let threshold = cfg.detectors.threshold_mev;
    let cells = grid_cells(cfg.grid.as_ref().expect("validated"));
    cells
        .par_iter()
        .map(|&(w1, w2)| {
            let fs = FinalStateConfig::new(directions, w1, w2);
            Ok((w1, w2, physical_panels(&setup, &fs, beam, threshold)?))
        })
        .collect()
}

fn grid_axes(g: &GridSpec) -> (Vec<f64>, Vec<f64>) {
    (
        linear_points(g.omega1_mev[0], g.omega1_mev[1], g.points[0]),
        linear_points(g.omega2_mev[0], g.omega2_mev[1], g.points[1]),
    )
}

fn grid_cells(g: &GridSpec) -> Vec<(f64, f64)> {
    let (a, b) = grid_axes(g);
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .collect()
}

/// Points `(ω₁, ω₂)` on the `ω₃ = ε` curve for `ω₁` across the grid range,
/// keeping those with `ω₂ ≥ ε`.
pub fn boundary_curve(cfg: &ScenarioConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate(RunMode::Grid)?;
    let g = cfg.grid.as_ref().expect("validated");
    let setup = cfg.setup()?;
    let directions = cfg.directions();
    let eps = cfg.detectors.threshold_mev;
    Ok(
        linear_points(g.omega1_mev[0], g.omega1_mev[1], g.boundary_points)
            .into_iter()
            .filter_map(|w1| threshold_boundary(&setup, &directions, w1, eps).map(|w2| (w1, w2)))
            .filter(|&(_, w2)| w2 >= eps && w2 <= setup.max_photon_energy())
            .collect(),
    )
}

fn write_boundary(points: &[(f64, f64)]) -> String {
    let mut s = String::from(BOUNDARY_HEADER);
    s.push('\n');
    for (a, b) in points {
        let _ = writeln!(s, "{a:e}\t{b:e}");
    }
    s
}

/// Output of any run: report text (if any) and files to write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub report: Option<String>,
    pub files: Vec<OutputFile>,
}

/// Metadata record: the run description followed by the resolved config.
pub fn metadata(cfg: &ScenarioConfig, mode: RunMode, details: &[(&str, toml::Value)]) -> String {
    let mut run = toml::Table::new();
    run.insert("command".into(), mode.name().into());
    run.insert("code_version".into(), env!("CARGO_PKG_VERSION").into());
    for (k, v) in details {
        run.insert((*k).into(), v.clone());
    }
    let mut doc = toml::Table::new();
    doc.insert("run".into(), toml::Value::Table(run));
    doc.insert(
        "config".into(),
        toml::Value::try_from(cfg).expect("config types serialize to TOML"),
    );
    toml::to_string(&doc).expect("metadata serializes to TOML")
}

/// Recovers the configuration from a metadata record.
pub fn config_from_metadata(text: &str) -> Result<ScenarioConfig> {
    #[derive(Deserialize)]
    struct Record {
        config: ScenarioConfig,
    }
    toml::from_str::<Record>(text)
        .map(|r| r.config)
        .map_err(|e| config_error("config", e.message().to_string()))
}

fn samples(n: u64) -> toml::Value {
    toml::Value::Integer(i64::try_from(n).unwrap_or(i64::MAX))
}

/// Detector-averaged cross section with reference lines.
pub fn run_mgbr1968(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate(RunMode::Mgbr1968)?;
    let result = average_at(cfg, cfg.collision.omega0_mev)?;
    let (exp, exp_err) = REFERENCE_EXPERIMENT_B_SR3;
    let sigmas = (exp - result.value) / exp_err.hypot(result.statistical_error);
    let d = &cfg.detectors;
    let mut r = String::new();
    let _ = writeln!(r, "scenario\t{}", cfg.name);
    let _ = writeln!(r, "omega0_mev\t{:e}", cfg.collision.omega0_mev);
    let _ = writeln!(
        r,
        "solid_angle_sr\t{:e}",
        d.solid_angle_sr.expect("validated")
    );
    let _ = writeln!(r, "threshold_mev\t{:e}", d.threshold_mev);
    let _ = writeln!(r, "samples\t{}", result.n_samples);
    let _ = writeln!(r, "seed\t{}", result.seed);
    let _ = writeln!(r, "average_b_sr3\t{:e}", result.value);
    let _ = writeln!(r, "statistical_error_b_sr3\t{:e}", result.statistical_error);
    let _ = writeln!(r, "reference_theory_b_sr3\t{REFERENCE_THEORY_B_SR3:e}");
    let _ = writeln!(r, "reference_experiment_b_sr3\t{exp:e} +- {exp_err:e}");
    let _ = writeln!(r, "discrepancy_from_experiment_sd\t{sigmas:.2}");
    let meta = metadata(
        cfg,
        RunMode::Mgbr1968,
        &[("samples", samples(result.n_samples))],
    );
    Ok(RunOutput {
        report: Some(r.clone()),
        files: vec![
            OutputFile::new("mgbr1968.txt", r),
            OutputFile::new("metadata.toml", meta),
        ],
    })
}

fn average_at(cfg: &ScenarioConfig, omega0: f64) -> Result<IntegrationResult> {
    let setup = cfg.setup_at(omega0)?;
    let d = &cfg.detectors;
    if d.threshold_mev >= setup.max_photon_energy() {
        // No photon can reach the threshold.
        return Ok(IntegrationResult {
            value: 0.0,
            statistical_error: 0.0,
            n_samples: 0,
            seed: cfg.sampling.seed,
        });
    }
    detector_average(
        &setup,
        &cfg.directions(),
        d.solid_angle_sr.expect("validated"),
        d.threshold_mev,
        cfg.sampling.budget,
        cfg.sampling.seed,
    )
}

/// Grid files: eight σ5 panels or one τ map, the `ω₃ = ε` boundary and the
/// metadata record.
pub fn run_grid(cfg: &ScenarioConfig, observable: Observable) -> Result<RunOutput> {
    cfg.validate(RunMode::Grid)?;
    let mut files = Vec::new();
    match observable {
        Observable::Sigma5 => {
            let cells = sigma5_grid(cfg)?;
            for panel in 0..PANEL_LABELS.len() {
                let rows: Vec<GridRow> = cells
                    .iter()
                    .map(|&(w1, w2, v)| GridRow {
                        omega1: w1,
                        omega2: w2,
                        value: v.map_or(0.0, |p| p[panel]),
                        masked: v.is_none(),
                    })
                    .collect();
                files.push(OutputFile::new(panel_file_name(panel), write_grid(&rows)));
            }
        }
        Observable::Tau => {
            let g = cfg.grid.as_ref().expect("validated");
            let (a, b) = grid_axes(g);
            let cells = tau_grid(
                &cfg.setup()?,
                &cfg.directions(),
                &a,
                &b,
                cfg.beam_polarization()?,
                cfg.detectors.threshold_mev,
                &cfg.solver_settings(),
            )?;
            let rows: Vec<GridRow> = cells
                .iter()
                .map(|c| GridRow {
                    omega1: c.omega1,
                    omega2: c.omega2,
                    value: c.tau,
                    masked: c.masked,
                })
                .collect();
            files.push(OutputFile::new("tau.tsv", write_grid(&rows)));
        }
    }
    files.push(OutputFile::new(
        "boundary.tsv",
        write_boundary(&boundary_curve(cfg)?),
    ));
    let meta = metadata(
        cfg,
        RunMode::Grid,
        &[("observable", observable.name().into())],
    );
    files.push(OutputFile::new("metadata.toml", meta));
    Ok(RunOutput {
        report: None,
        files,
    })
}

/// Total cross sections above threshold and event rates.
pub fn run_totals(cfg: &ScenarioConfig, processes: &[Process]) -> Result<RunOutput> {
    cfg.validate(RunMode::Totals)?;
    if processes.is_empty() {
        return Err(Error::InvalidArgument("no process selected".into()));
    }
    let setup = cfg.setup()?;
    let beams = cfg.beams();
    let mut r = String::from("process\tsigma_b\tstatistical_error_b\tevents_per_s\tsamples\n");
    let mut total_samples = 0;
    for &p in processes {
        let res = total_cross_section(
            &setup,
            cfg.detectors.threshold_mev,
            p,
            cfg.sampling.budget,
            cfg.sampling.seed,
        )?;
        total_samples += res.n_samples;
        let _ = writeln!(
            r,
            "{}\t{:e}\t{:e}\t{:e}\t{}",
            p.name(),
            res.value,
            res.statistical_error,
            event_rate(res.value, &beams),
            res.n_samples
        );
    }
    let names: Vec<toml::Value> = processes.iter().map(|p| p.name().into()).collect();
    let meta = metadata(
        cfg,
        RunMode::Totals,
        &[
            ("processes", toml::Value::Array(names)),
            ("samples", samples(total_samples)),
        ],
    );
    Ok(RunOutput {
        report: Some(r.clone()),
        files: vec![
            OutputFile::new("totals.tsv", r),
            OutputFile::new("metadata.toml", meta),
        ],
    })
}

/// Detector average against `ω₀` on a logarithmic grid.
pub fn run_energy_scan(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate(RunMode::Scan)?;
    let s = cfg.scan.as_ref().expect("validated");
    let mut table = String::from("omega0_mev\taverage_b_sr3\tstatistical_error_b_sr3\n");
    let mut total_samples = 0;
    for w0 in log_points(s.omega0_mev[0], s.omega0_mev[1], s.points) {
        let res = average_at(cfg, w0)?;
        total_samples += res.n_samples;
        let _ = writeln!(
            table,
            "{w0:e}\t{:e}\t{:e}",
            res.value, res.statistical_error
        );
    }
    let meta = metadata(cfg, RunMode::Scan, &[("samples", samples(total_samples))]);
    Ok(RunOutput {
        report: None,
        files: vec![
            OutputFile::new("scan.tsv", table),
            OutputFile::new("metadata.toml", meta),
        ],
    })
}
