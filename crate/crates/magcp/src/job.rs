//! JSON job configuration, grid sweeps and tabular output behind the `magcp`
//! binary. Every command returns an [`Outcome`]; rendering and exit codes are
//! kept separate so the same tables can be produced from library code.

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::materials::SurfaceModel;
use crate::mechanics::{find_equilibrium, force_breakdown, force_breakdown_fd, spin_threshold, ForceSettings, Mode};
use crate::params::{build_particle, check_half_integer, EnvironmentSpec, Geometry, ParticleInputs, ParticleSpec};
use crate::potentials::{potential_breakdown, u_e_ground, u_e_pc_closed, u_m0_pc_closed, u_m_excited0, u_m_ground_broadband, u_m_pc_closed, u_m_static};
use crate::quadrature::QuadratureConfig;

/// First line of every CSV file.
pub const UNITS_LINE: &str = "U in hbar*Gamma0; F in hbar*Gamma0*k_e; z in 1/k_e";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Parse(e.to_string())
    }
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridVariable {
    /// k_e z₀.
    #[default]
    ZTilde,
    /// z₀ in metres.
    Z0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    ZTilde(Vec<f64>),
    Z0(Vec<f64>),
    Log {
        start: f64,
        stop: f64,
        n: usize,
        #[serde(default)]
        variable: GridVariable,
    },
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    /// `log:start:stop:n` in z̃.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || ConfigError::Invalid(format!("grid {s:?} is not log:start:stop:n"));
        match parts.as_slice() {
            ["log", a, b, n] => Ok(GridSpec::Log {
                start: a.parse().map_err(|_| bad())?,
                stop: b.parse().map_err(|_| bad())?,
                n: n.parse().map_err(|_| bad())?,
                variable: GridVariable::ZTilde,
            }),
            _ => Err(bad()),
        }
    }
}

impl GridSpec {
    /// Grid points in z̃; non-empty and strictly increasing.
    pub fn z_tilde(&self, particle: &ParticleSpec) -> Result<Vec<f64>, ConfigError> {
        let (values, var) = match self {
            GridSpec::ZTilde(v) => (v.clone(), GridVariable::ZTilde),
            GridSpec::Z0(v) => (v.clone(), GridVariable::Z0),
            GridSpec::Log { start, stop, n, variable } => {
                if !(*start > 0.0 && *stop > 0.0) {
                    return Err(invalid("log grid bounds must be positive"));
                }
                let (a, b) = (start.ln(), stop.ln());
                let v = match n {
                    0 => vec![],
                    1 => vec![*start],
                    _ => (0..*n).map(|i| (a + (b - a) * i as f64 / (*n - 1) as f64).exp()).collect(),
                };
                (v, *variable)
            }
        };
        if values.is_empty() {
            return Err(invalid("grid is empty"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("grid points must be positive"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid must be strictly increasing"));
        }
        Ok(match var {
            GridVariable::ZTilde => values,
            GridVariable::Z0 => values.into_iter().map(|z| z * particle.k_e).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(invalid(format!("format {s:?} is not csv or json"))),
        }
    }
}

fn default_precision() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Standard output when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Significant digits after the point in CSV (scientific notation).
    #[serde(default = "default_precision")]
    pub precision: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { path: None, format: Format::Csv, precision: default_precision() }
    }
}

fn yes() -> bool {
    true
}

fn default_g() -> f64 {
    crate::params::consts::G_EARTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub particle: ParticleInputs,
    pub surface: SurfaceModel,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Defaults, with rel_tol from `MAGCP_REL_TOL`, when absent.
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "yes")]
    pub include_static: bool,
    #[serde(default = "yes")]
    pub gravity: bool,
    /// m/s².
    #[serde(default = "default_g")]
    pub g: f64,
    /// z̃ search range of the equilibrium command.
    #[serde(default)]
    pub bracket: Option<(f64, f64)>,
    /// Require S and m_S to be half-integers.
    #[serde(default)]
    pub physical_particle: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Reference particle with spin `spin` over `surface`.
    pub fn reference(spin: f64, surface: SurfaceModel) -> Self {
        JobConfig {
            particle: ParticleInputs::reference(spin),
            surface,
            grid: None,
            quadrature: None,
            mode: Mode::Ground,
            include_static: true,
            gravity: true,
            g: default_g(),
            bracket: None,
            physical_particle: false,
            output: OutputSpec::default(),
        }
    }

    pub fn resolve(&self) -> Result<Job, ConfigError> {
        let particle = build_particle(&self.particle).map_err(invalid)?;
        if self.physical_particle {
            check_half_integer(particle.spin, particle.m_s).map_err(invalid)?;
        }
        self.surface.validate().map_err(invalid)?;
        let quad = match &self.quadrature {
            Some(q) => {
                q.validate().map_err(invalid)?;
                q.clone()
            }
            None => QuadratureConfig::from_env().map_err(invalid)?,
        };
        let environment = if self.gravity { EnvironmentSpec::new(self.g).map_err(invalid)? } else { EnvironmentSpec::no_gravity() };
        if let Some((lo, hi)) = self.bracket {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(invalid(format!("bracket [{lo}, {hi}] must satisfy 0 < lo < hi")));
            }
        }
        if self.output.precision > 17 {
            return Err(invalid("precision must be at most 17"));
        }
        Ok(Job {
            config: self.clone(),
            particle,
            surface: self.surface,
            quad,
            settings: ForceSettings { mode: self.mode, include_static: self.include_static, environment },
        })
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub particle: ParticleSpec,
    pub surface: SurfaceModel,
    pub quad: QuadratureConfig,
    pub settings: ForceSettings,
}

impl Job {
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        self.config
            .grid
            .as_ref()
            .ok_or_else(|| invalid("this command needs a grid"))?
            .z_tilde(&self.particle)
    }

    fn geometry(&self, z: f64) -> Geometry {
        Geometry::from_z_tilde(&self.particle, z).expect("grid points are positive")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column, `None` for empty or non-numeric cells.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(
            self.column(name)?
                .into_iter()
                .map(|c| match c {
                    Cell::Num(v) => Some(*v),
                    _ => None,
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Complete,
    /// Rows were written but some integrals (or checks) did not converge.
    NonConverged,
    /// Nothing to report, with the reason.
    NoResult(String),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Complete => 0,
            Status::NoResult(_) => 3,
            Status::NonConverged => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub status: Status,
}

fn status_from(flags: impl IntoIterator<Item = bool>) -> Status {
    if flags.into_iter().all(|f| f) {
        Status::Complete
    } else {
        Status::NonConverged
    }
}

fn sweep<R: Send>(grid: &[f64], f: impl Fn(f64) -> R + Sync) -> Vec<R> {
    // rayon keeps the index order, so output does not depend on scheduling
    grid.par_iter().map(|&z| f(z)).collect()
}

fn failed_row(z: f64, z0: f64, width: usize, what: &str, e: impl std::fmt::Display) -> (Vec<Cell>, bool) {
    log::error!("{what} at z̃ = {z}: {e}");
    let mut row = vec![Cell::Num(z), Cell::Num(z0)];
    row.resize(width - 1, Cell::Empty);
    row.push(Cell::Flag(false));
    (row, false)
}

pub fn cmd_potential(job: &Job) -> Result<Outcome, ConfigError> {
    let grid = job.grid()?;
    let columns = vec![
        "z_tilde",
        "z0_m",
        "u_e_minus",
        "u_m_minus",
        "u_m_z",
        "u_m_excited0",
        "total_ground",
        "total_excited0",
        "converged",
    ];
    let width = columns.len();
    let with_excited = job.settings.mode == Mode::Excited0;
    let rows = sweep(&grid, |z| {
        let g = job.geometry(z);
        match potential_breakdown(&job.particle, &job.surface, &g, &job.quad, with_excited) {
            Ok(b) => {
                let ok = b.converged.all();
                let row = vec![
                    z.into(),
                    g.z0.into(),
                    b.u_e_minus.into(),
                    b.u_m_minus.into(),
                    b.u_m_z.into(),
                    b.u_m_excited0.into(),
                    b.total_ground.into(),
                    b.total_excited0.into(),
                    ok.into(),
                ];
                (row, ok)
            }
            Err(e) => failed_row(z, g.z0, width, "potential", e),
        }
    });
    let status = status_from(rows.iter().map(|r| r.1));
    Ok(Outcome { table: Table { columns, rows: rows.into_iter().map(|r| r.0).collect() }, status })
}

pub fn cmd_force(job: &Job) -> Result<Outcome, ConfigError> {
    let grid = job.grid()?;
    let columns = vec![
        "z_tilde",
        "z0_m",
        "f_e",
        "f_m_minus",
        "f_m_z",
        "f_m_excited0",
        "f_gravity",
        "f_total",
        "f_total_cp",
        "converged",
    ];
    let width = columns.len();
    let rows = sweep(&grid, |z| {
        let g = job.geometry(z);
        match force_breakdown(&job.particle, &job.surface, &g, &job.quad, &job.settings) {
            Ok(f) => {
                let row = vec![
                    z.into(),
                    g.z0.into(),
                    f.f_e.into(),
                    f.f_m_minus.into(),
                    f.f_m_z.into(),
                    f.f_m_excited0.into(),
                    f.f_gravity.into(),
                    f.f_total.into(),
                    f.f_total_cp.into(),
                    f.converged.into(),
                ];
                (row, f.converged)
            }
            Err(e) => failed_row(z, g.z0, width, "force", e),
        }
    });
    let status = status_from(rows.iter().map(|r| r.1));
    Ok(Outcome { table: Table { columns, rows: rows.into_iter().map(|r| r.0).collect() }, status })
}

/// Default z̃ range searched for an equilibrium.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-2, 1e3);

pub fn cmd_equilibrium(job: &Job) -> Result<Outcome, ConfigError> {
    let bracket = job.config.bracket.unwrap_or(DEFAULT_BRACKET);
    match find_equilibrium(&job.particle, &job.surface, &job.quad, &job.settings, bracket) {
        Ok(e) => {
            let columns = vec!["z_tilde_eq", "z0_m", "stable", "slope", "residual_force", "method", "analytic"];
            let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let row = vec![
                e.z_tilde_eq.into(),
                (e.z_tilde_eq / job.particle.k_e).into(),
                e.stable.into(),
                e.slope.into(),
                e.residual_force.into(),
                Cell::Text(method),
                e.analytic.into(),
            ];
            Ok(Outcome { table: Table { columns, rows: vec![row] }, status: Status::Complete })
        }
        Err(e) => {
            let kind = match &e {
                crate::mechanics::MechanicsError::NoEquilibrium { .. } => "no_equilibrium",
                crate::mechanics::MechanicsError::BracketError { .. } => "bracket_error",
                crate::mechanics::MechanicsError::Potential(_) => "quadrature_failure",
                _ => "error",
            };
            let columns = vec!["error", "lo", "hi", "detail"];
            let row = vec![kind.into(), bracket.0.into(), bracket.1.into(), Cell::Text(e.to_string())];
            let status = if kind == "quadrature_failure" { Status::NonConverged } else { Status::NoResult(e.to_string()) };
            Ok(Outcome { table: Table { columns, rows: vec![row] }, status })
        }
    }
}

pub fn cmd_threshold(job: &Job) -> Result<Outcome, ConfigError> {
    let grid = job.grid()?;
    let columns = vec!["z_tilde", "z0_m", "s_with_static", "s_without_static", "converged"];
    let width = columns.len();
    let env = job.settings.environment;
    let rows = sweep(&grid, |z| {
        let g = job.geometry(z);
        let with = spin_threshold(&job.particle, &job.surface, &g, &job.quad, true, &env);
        let without = spin_threshold(&job.particle, &job.surface, &g, &job.quad, false, &env);
        match (with, without) {
            (Ok(a), Ok(b)) => (vec![z.into(), g.z0.into(), a.spin.into(), b.spin.into(), true.into()], true),
            (Err(e), _) | (_, Err(e)) => failed_row(z, g.z0, width, "threshold", e),
        }
    });
    let status = status_from(rows.iter().map(|r| r.1));
    Ok(Outcome { table: Table { columns, rows: rows.into_iter().map(|r| r.0).collect() }, status })
}

struct Check {
    name: &'static str,
    deviation: f64,
    tolerance: f64,
}

fn max_rel(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    pairs.into_iter().map(|(a, b)| ((a - b) / b).abs()).fold(0.0, |m, d| if d.is_nan() || d > m { d } else { m })
}

/// Cross-representation and asymptotic checks at the reference parameters.
/// Failed integrals count as infinite deviation.
pub fn cmd_validate(quad: &QuadratureConfig) -> Result<Outcome, ConfigError> {
    quad.validate().map_err(invalid)?;
    let p = build_particle(&ParticleInputs::reference(100.0)).map_err(invalid)?;
    let at = |z: f64| Geometry::from_z_tilde(&p, z).expect("positive");
    let inf = f64::INFINITY;
    let pc = SurfaceModel::PerfectConductor;
    let zs = [0.01, 0.1, 1.0, 10.0, 100.0];
    let pairs = |f: &dyn Fn(&Geometry) -> Option<(f64, f64)>| -> f64 {
        let v: Option<Vec<_>> = zs.iter().map(|&z| f(&at(z))).collect();
        v.map_or(inf, max_rel)
    };
    // the comparisons below are at 1e-6, which a looser target cannot vouch for
    let mut checks = vec![Check { name: "quadrature_rel_tol", deviation: quad.rel_tol, tolerance: 1e-7 }];
    checks.push(Check {
        name: "pc_electric_double_vs_single",
        deviation: pairs(&|g| Some((u_e_ground(&p, &pc, g, quad).ok()?, u_e_pc_closed(&p, g, quad).ok()?))),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "pc_magnetic_double_vs_single",
        deviation: pairs(&|g| Some((u_m_ground_broadband(&p, &pc, g, quad).ok()?, u_m_pc_closed(&p, g, quad).ok()?))),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "pc_image_term_closed_form",
        deviation: pairs(&|g| Some((u_m_static(&p, &pc, g, quad).ok()?, 3.0 / 32.0 * p.eta * p.spin * p.spin / g.z_tilde.powi(3)))),
        tolerance: 1e-12,
    });
    checks.push(Check {
        name: "drude_image_term_zero",
        deviation: zs
            .iter()
            .map(|&z| u_m_static(&p, &SurfaceModel::gold_drude(), &at(z), quad).map_or(inf, f64::abs))
            .fold(0.0, f64::max),
        tolerance: 0.0,
    });
    let p0 = p.with_m_s(0.0).map_err(invalid)?;
    let a_values = [1e-3, 1e-2, 0.1, 1.0, 10.0];
    let dev: Option<Vec<_>> = a_values
        .iter()
        .map(|&a| {
            let g = Geometry::from_z_tilde(&p0, a / p0.omega_tilde).ok()?;
            Some((u_m_excited0(&p0, &pc, &g, quad).ok()?, u_m0_pc_closed(&p0, &g)))
        })
        .collect();
    checks.push(Check { name: "pc_excited_closed_form", deviation: dev.map_or(inf, max_rel), tolerance: 1e-6 });
    let slope = |z1: f64, z2: f64| -> Option<f64> {
        let u1 = u_e_ground(&p, &pc, &at(z1), quad).ok()?;
        let u2 = u_e_ground(&p, &pc, &at(z2), quad).ok()?;
        Some((u2 / u1).ln() / (z2 / z1).ln())
    };
    checks.push(Check {
        name: "pc_electric_slope_near",
        deviation: slope(1e-4, 1e-3).map_or(inf, |s| ((s + 3.0) / 3.0).abs()),
        tolerance: 1e-2,
    });
    checks.push(Check {
        name: "pc_electric_slope_far",
        deviation: slope(1e3, 1e4).map_or(inf, |s| ((s + 4.0) / 4.0).abs()),
        tolerance: 1e-2,
    });
    let none = EnvironmentSpec::no_gravity();
    let thr = |st: bool| spin_threshold(&p, &pc, &at(1e-3), quad, st, &none).map_or(inf, |t| t.spin);
    checks.push(Check { name: "pc_threshold_with_image", deviation: (thr(true) - (0.5 / p.eta).sqrt()).abs(), tolerance: 0.5 });
    checks.push(Check { name: "pc_threshold_cp_only", deviation: (thr(false) - 1.0 / p.eta).abs(), tolerance: 50.0 });
    let settings = ForceSettings::default().without_gravity();
    let fd = force_breakdown(&p, &pc, &at(1.0), quad, &settings)
        .and_then(|a| Ok((a, force_breakdown_fd(&p, &pc, &at(1.0), quad, &settings)?)))
        .map_or(inf, |(a, b)| max_rel([(b.f_e, a.f_e), (b.f_m_minus, a.f_m_minus), (b.f_m_z, a.f_m_z)]));
    checks.push(Check { name: "pc_force_analytic_vs_difference", deviation: fd, tolerance: 1e-4 });

    let columns = vec!["check", "deviation", "tolerance", "pass"];
    let pass: Vec<bool> = checks.iter().map(|c| c.deviation <= c.tolerance).collect();
    let rows = checks
        .iter()
        .zip(&pass)
        .map(|(c, ok)| vec![c.name.into(), c.deviation.into(), c.tolerance.into(), (*ok).into()])
        .collect();
    Ok(Outcome { table: Table { columns, rows }, status: status_from(pass) })
}

fn format_cell(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => format!("{v:.precision$e}"),
        Cell::Num(v) => v.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) if v.is_finite() => json!(v),
        Cell::Num(v) => json!(v.to_string()),
        Cell::Flag(b) => json!(b),
        Cell::Text(s) => json!(s),
        Cell::Empty => Value::Null,
    }
}

/// CSV: the units line, a header, then one line per row.
pub fn render_csv(table: &Table, precision: usize) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r.iter().map(|c| format_cell(c, precision)))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8 cells");
    Ok(format!("{UNITS_LINE}\n{body}"))
}

/// JSON: units, the configuration that produced the rows, status and rows as
/// objects. `config` parses back as a [`JobConfig`].
pub fn render_json(table: &Table, config: Option<&JobConfig>, status: &Status) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Object(table.columns.iter().zip(r).map(|(k, c)| (k.to_string(), json_cell(c))).collect::<Map<_, _>>()))
        .collect();
    let status = match status {
        Status::Complete => json!("complete"),
        Status::NonConverged => json!("non_converged"),
        Status::NoResult(m) => json!({ "no_result": m }),
    };
    let doc = json!({ "units": UNITS_LINE, "config": config, "status": status, "rows": rows });
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

pub fn render(outcome: &Outcome, config: Option<&JobConfig>, output: &OutputSpec) -> String {
    match output.format {
        Format::Csv => render_csv(&outcome.table, output.precision).expect("in-memory csv"),
        Format::Json => render_json(&outcome.table, config, &outcome.status),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str) -> Result<Job, ConfigError> {
        JobConfig::from_json(text)?.resolve()
    }

    const PC: &str = r#"{"particle": {"spin": 100}, "surface": {"model": "perfect_conductor"}, "grid": {"log": {"start": 0.001, "stop": 1000, "n": 7}}}"#;

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "log:1e-3:1e3:61".parse().unwrap();
        let p = job(PC).unwrap().particle;
        let z = g.z_tilde(&p).unwrap();
        assert_eq!(z.len(), 61);
        assert!((z[0] - 1e-3).abs() < 1e-15 && (z[60] / 1e3 - 1.0).abs() < 1e-12);
        assert!("lin:1:2:3".parse::<GridSpec>().is_err());
        assert!("log:1:x:3".parse::<GridSpec>().is_err());
        assert!(GridSpec::ZTilde(vec![]).z_tilde(&p).is_err());
        assert!(GridSpec::ZTilde(vec![2.0, 1.0]).z_tilde(&p).is_err());
        let z0 = GridSpec::Z0(vec![10e-9]).z_tilde(&p).unwrap();
        assert!((z0[0] - 10e-9 * p.k_e).abs() < 1e-15);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(job(r#"{"particle": {"spin": 1}, "surface": {"model": "plasma", "omega_p": 1e16}, "typo": 1}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(job(r#"{"particle": {"spn": 1}, "surface": {"model": "perfect_conductor"}}"#), Err(ConfigError::Parse(_))));
        let e = job(r#"{"particle": {"spin": 1},
            "surface": {"model": "drude", "omega_p": 1e16}}"#)
        .unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(matches!(job(r#"{"particle": {"spin": 1.3}, "surface": {"model": "perfect_conductor"}, "physical_particle": true}"#), Err(ConfigError::Invalid(_))));
        let empty = job(r#"{"particle": {"spin": 1}, "surface": {"model": "perfect_conductor"}, "grid": {"z_tilde": []}}"#).unwrap();
        assert!(cmd_potential(&empty).is_err());
        assert!(job(r#"{"particle": {"spin": 1}, "surface": {"model": "perfect_conductor"}, "quadrature": {"rel_tol": -1}}"#).is_err());
    }

    #[test]
    fn potential_table_and_laws() {
        let j = job(PC).unwrap();
        let out = cmd_potential(&j).unwrap();
        assert_eq!(out.status, Status::Complete);
        let z: Vec<f64> = out.table.numbers("z_tilde").unwrap().into_iter().flatten().collect();
        let ue: Vec<f64> = out.table.numbers("u_e_minus").unwrap().into_iter().flatten().collect();
        let near = (ue[1] / ue[0]).ln() / (z[1] / z[0]).ln();
        let far = (ue[6] / ue[5]).ln() / (z[6] / z[5]).ln();
        assert!((near + 3.0).abs() < 0.01 && (far + 4.0).abs() < 0.01, "{near} {far}");
        assert!(out.table.numbers("u_m_excited0").unwrap().iter().all(|v| v.is_none()));
    }

    #[test]
    fn csv_is_stable_and_tagged() {
        let j = job(PC).unwrap();
        let a = render(&cmd_force(&j).unwrap(), Some(&j.config), &j.config.output);
        let b = render(&cmd_force(&j).unwrap(), Some(&j.config), &j.config.output);
        assert_eq!(a, b);
        assert!(a.starts_with(UNITS_LINE));
        assert_eq!(a.lines().nth(1).unwrap().split(',').count(), 10);
    }

    #[test]
    fn json_round_trips_config() {
        let mut j = job(PC).unwrap();
        j.config.output.format = Format::Json;
        let text = render(&cmd_potential(&j).unwrap(), Some(&j.config), &j.config.output);
        let v: Value = serde_json::from_str(&text).unwrap();
        let back: JobConfig = serde_json::from_value(v["config"].clone()).unwrap();
        assert_eq!(back, j.config);
        assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn gravity_flag_zeroes_column() {
        let j = job(r#"{"particle": {"spin": 100}, "surface": {"model": "perfect_conductor"}, "gravity": false, "grid": {"z_tilde": [1.0]}}"#).unwrap();
        let out = cmd_force(&j).unwrap();
        assert_eq!(out.table.numbers("f_gravity").unwrap(), vec![Some(0.0)]);
    }

    #[test]
    fn equilibrium_records() {
        let j = job(r#"{"particle": {"spin": 100000}, "surface": {"model": "perfect_conductor"}, "include_static": false}"#).unwrap();
        let out = cmd_equilibrium(&j).unwrap();
        let z = out.table.numbers("z_tilde_eq").unwrap()[0].unwrap();
        assert!((z / 2.925 - 1.0).abs() < 0.1);
        let j = job(r#"{"particle": {"spin": 1}, "surface": {"model": "perfect_conductor"}, "include_static": false}"#).unwrap();
        let out = cmd_equilibrium(&j).unwrap();
        assert_eq!(out.status.exit_code(), 3);
        assert_eq!(out.table.column("error").unwrap()[0], &Cell::Text("no_equilibrium".into()));
    }

    #[test]
    fn validate_passes_and_flags_loose_tolerance() {
        let out = cmd_validate(&QuadratureConfig::default()).unwrap();
        for r in &out.table.rows {
            assert_eq!(r[3], Cell::Flag(true), "{r:?}");
        }
        let loose = QuadratureConfig { rel_tol: 1.0, ..Default::default() };
        let out = cmd_validate(&loose).unwrap();
        assert_eq!(out.status, Status::NonConverged);
    }
}
