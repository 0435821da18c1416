//! Forces, gravity, levitation equilibria and spin thresholds.
//!
//! Sign convention: positive forces point away from the surface, so
//! repulsion is positive and gravity negative. Forces are in ħΓ₀k_e.

use std::cell::RefCell;

use roots::{find_root_brent, Convergency};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::SurfaceModel;
use crate::params::{EnvironmentSpec, Geometry, MassModel, ParticleSpec};
use crate::potentials::{evaluate, Component, PotentialError, Response};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanicsError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("total force has the same sign at both ends of [{lo}, {hi}] ({f_lo}, {f_hi}) but changes sign inside")]
    BracketError { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("total force is {sign} everywhere on [{lo}, {hi}]")]
    NoEquilibrium { lo: f64, hi: f64, sign: &'static str },
    #[error("invalid bracket [{0}, {1}]")]
    InvalidBracket(f64, f64),
    #[error("outside the regime of validity: {0}")]
    RegimeViolation(String),
    #[error("root search failed: {0}")]
    RootSearch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// m_S = −S.
    #[default]
    Ground,
    /// m_S = 0.
    Excited0,
}

/// What goes into the total force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSettings {
    pub mode: Mode,
    pub include_static: bool,
    pub environment: EnvironmentSpec,
}

impl Default for ForceSettings {
    fn default() -> Self {
        ForceSettings { mode: Mode::Ground, include_static: true, environment: EnvironmentSpec::default() }
    }
}

impl ForceSettings {
    pub fn cp_only() -> Self {
        ForceSettings { include_static: false, ..Default::default() }
    }

    pub fn without_gravity(self) -> Self {
        ForceSettings { environment: EnvironmentSpec::no_gravity(), ..self }
    }
}

/// Force components in ħΓ₀k_e. Components that do not enter the chosen
/// mode are 0 (or `None` for the m_S = 0 term), so
/// f_total = f_e + f_m_minus + f_m_z + f_m_excited0 + f_gravity and
/// f_total_cp is the same sum without f_m_z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceBreakdown {
    pub z_tilde: f64,
    pub f_e: f64,
    pub f_m_minus: f64,
    pub f_m_z: f64,
    pub f_m_excited0: Option<f64>,
    pub f_gravity: f64,
    pub f_total: f64,
    pub f_total_cp: f64,
    pub converged: bool,
}

fn sublevel(p: &ParticleSpec, mode: Mode) -> ParticleSpec {
    let m_s = match mode {
        Mode::Ground => -p.spin,
        Mode::Excited0 => 0.0,
    };
    ParticleSpec { m_s, ..p.clone() }
}

fn assemble(
    z: f64,
    settings: &ForceSettings,
    p: &ParticleSpec,
    mut component: impl FnMut(Component) -> Result<(f64, bool), PotentialError>,
) -> Result<ForceBreakdown, PotentialError> {
    let (f_e, mut ok) = component(Component::Electric)?;
    let (mut f_m_minus, mut f_m_z, mut f_m_excited0) = (0.0, 0.0, None);
    match settings.mode {
        Mode::Ground => {
            let (v, c) = component(Component::MagneticBroadband)?;
            f_m_minus = v;
            ok &= c;
            if settings.include_static {
                let (v, c) = component(Component::MagneticStatic)?;
                f_m_z = v;
                ok &= c;
            }
        }
        Mode::Excited0 => {
            let (v, c) = component(Component::MagneticExcited0)?;
            f_m_excited0 = Some(v);
            ok &= c;
        }
    }
    let f_gravity = p.gravity_force(&settings.environment);
    let x = f_m_excited0.unwrap_or(0.0);
    Ok(ForceBreakdown {
        z_tilde: z,
        f_e,
        f_m_minus,
        f_m_z,
        f_m_excited0,
        f_gravity,
        f_total: f_e + f_m_minus + f_m_z + x + f_gravity,
        f_total_cp: f_e + f_m_minus + x + f_gravity,
        converged: ok,
    })
}

/// Forces by differentiating under the integral sign.
pub fn force_breakdown(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    quad: &QuadratureConfig,
    settings: &ForceSettings,
) -> Result<ForceBreakdown, MechanicsError> {
    let p = sublevel(particle, settings.mode);
    Ok(assemble(geometry.z_tilde, settings, &p, |c| {
        let r = evaluate(c, Response::Force, &p, surface, geometry, quad)?;
        Ok((r.value, r.converged))
    })?)
}

/// Relative step of the finite-difference path.
pub const FD_STEP: f64 = 1e-4;

/// Forces as central differences of the shifts, step 10⁻⁴z̃. The shifts are
/// integrated 10⁴ times tighter than `quad` so the difference is not
/// swamped by quadrature noise.
pub fn force_breakdown_fd(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    quad: &QuadratureConfig,
    settings: &ForceSettings,
) -> Result<ForceBreakdown, MechanicsError> {
    let p = sublevel(particle, settings.mode);
    let z = geometry.z_tilde;
    let h = FD_STEP * z;
    let tight = QuadratureConfig {
        rel_tol: (quad.rel_tol * 1e-4).max(1e-13),
        abs_tol: quad.abs_tol * 1e-4,
        max_subdivisions: quad.max_subdivisions.max(1000),
        ..quad.clone()
    };
    let lo = Geometry::from_z_tilde(&p, z - h).map_err(|e| MechanicsError::RegimeViolation(e.to_string()))?;
    let hi = Geometry::from_z_tilde(&p, z + h).map_err(|e| MechanicsError::RegimeViolation(e.to_string()))?;
    Ok(assemble(z, settings, &p, |c| {
        let a = evaluate(c, Response::Shift, &p, surface, &lo, &tight)?;
        let b = evaluate(c, Response::Shift, &p, surface, &hi, &tight)?;
        Ok((-(b.value - a.value) / (2.0 * h), a.converged && b.converged))
    })?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticApprox,
    NumericRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub z_tilde_eq: f64,
    /// Force slope dF/dz̃ negative.
    pub stable: bool,
    pub slope: f64,
    pub residual_force: f64,
    pub method: Method,
    /// Quarter-power estimate for a perfect conductor, when it applies.
    pub analytic: Option<f64>,
}

/// Stops on |Δ ln z̃| < tol; the force itself is never "small enough".
struct LogTolerance(f64);

impl Convergency<f64> for LogTolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() < self.0
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

/// Points of the coarse log scan inside the bracket.
const SCAN_POINTS: usize = 48;
pub const ROOT_REL_TOL: f64 = 1e-6;

/// Root of the total force inside `bracket`, located by a log-spaced scan and
/// refined by Brent's method (bisection with secant and inverse-quadratic
/// steps) in ln z̃. With several sign changes the one closest to the surface
/// is returned.
pub fn find_equilibrium(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    quad: &QuadratureConfig,
    settings: &ForceSettings,
    bracket: (f64, f64),
) -> Result<Equilibrium, MechanicsError> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(MechanicsError::InvalidBracket(lo, hi));
    }
    let total = |z: f64| -> Result<f64, MechanicsError> {
        let g = Geometry::from_z_tilde(particle, z).map_err(|e| MechanicsError::RegimeViolation(e.to_string()))?;
        Ok(force_breakdown(particle, surface, &g, quad, settings)?.f_total)
    };
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|i| ulo + (uhi - ulo) * i as f64 / SCAN_POINTS as f64).collect();
    let values = grid.iter().map(|&u| total(u.exp())).collect::<Result<Vec<_>, _>>()?;
    let (f_lo, f_hi) = (values[0], values[SCAN_POINTS]);
    let change = (0..SCAN_POINTS).find(|&i| values[i] == 0.0 || values[i].signum() != values[i + 1].signum());
    let i = match change {
        None => {
            let sign = if f_lo > 0.0 { "repulsive" } else { "attractive" };
            return Err(MechanicsError::NoEquilibrium { lo, hi, sign });
        }
        Some(_) if f_lo.signum() == f_hi.signum() => {
            return Err(MechanicsError::BracketError { lo, hi, f_lo, f_hi })
        }
        Some(i) => i,
    };
    let failure = RefCell::new(None);
    let f = |u: f64| match total(u.exp()) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let u = if values[i] == 0.0 {
        grid[i]
    } else {
        find_root_brent(grid[i], grid[i + 1], f, &mut LogTolerance(ROOT_REL_TOL))
            .map_err(|e| MechanicsError::RootSearch(format!("{e:?}")))?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let z = u.exp();
    let d = 1e-3;
    let slope = (total(z * (1.0 + d))? - total(z * (1.0 - d))?) / (2.0 * d * z);
    Ok(Equilibrium {
        z_tilde_eq: z,
        stable: slope < 0.0,
        slope,
        residual_force: total(z)?,
        method: Method::NumericRoot,
        analytic: analytic_equilibrium(particle, surface, settings),
    })
}

/// Weight M g/(ħΓ₀k_e) attributed per unit spin: m_u g for the default
/// mass model, M g/S for a fixed mass.
fn weight_per_spin(p: &ParticleSpec, env: &EnvironmentSpec) -> f64 {
    match p.mass {
        MassModel::PerSpin(_) => -p.gravity_coefficients(env).0,
        MassModel::Fixed(_) => -p.gravity_force(env) / p.spin,
    }
}

/// Quarter-power estimates for a perfect conductor with M = S m_u:
///
/// * CP only: (9η/(64 m̃))^(1/4), S-independent.
/// * with the image term: (9ηS/(32 m̃))^(1/4).
/// * m_S = 0: (9ηS/(64 m̃))^(1/4), taking S + 1 ≈ S.
///
/// with m̃ = m_u g/(ħΓ₀k_e). `None` for metals or without gravity.
pub fn analytic_equilibrium(p: &ParticleSpec, surface: &SurfaceModel, settings: &ForceSettings) -> Option<f64> {
    if *surface != SurfaceModel::PerfectConductor || settings.environment.g <= 0.0 {
        return None;
    }
    let m = weight_per_spin(p, &settings.environment);
    let v = match (settings.mode, settings.include_static) {
        (Mode::Ground, false) => 9.0 * p.eta / (64.0 * m),
        (Mode::Ground, true) => 9.0 * p.eta * p.spin / (32.0 * m),
        (Mode::Excited0, _) => 9.0 * p.eta * p.spin / (64.0 * m),
    };
    Some(v.powf(0.25))
}

/// F̃ ≈ 9ηS(S+1)/(64z̃⁴) − Mg/(ħΓ₀k_e) for m_S = 0 near a perfect conductor.
pub fn approx_total_force_excited(
    particle: &ParticleSpec,
    geometry: &Geometry,
    environment: &EnvironmentSpec,
) -> Result<f64, MechanicsError> {
    check_excited_nr(particle, geometry.z_tilde)?;
    let s = particle.spin;
    let cp = 9.0 * particle.eta * s * (s + 1.0) / (64.0 * geometry.z_tilde.powi(4));
    Ok(cp + particle.gravity_force(environment))
}

/// Root of [`approx_total_force_excited`] keeping S(S+1); it exceeds the
/// S + 1 ≈ S estimate by ((S+1)/S)^(1/4).
pub fn approx_equilibrium_excited(particle: &ParticleSpec, environment: &EnvironmentSpec) -> Result<f64, MechanicsError> {
    let w = -particle.gravity_force(environment);
    if w <= 0.0 {
        return Err(MechanicsError::RegimeViolation("no gravity to balance".into()));
    }
    let s = particle.spin;
    let z = (9.0 * particle.eta * s * (s + 1.0) / (64.0 * w)).powf(0.25);
    check_excited_nr(particle, z)?;
    Ok(z)
}

fn check_excited_nr(p: &ParticleSpec, z: f64) -> Result<(), MechanicsError> {
    if p.m_s != 0.0 {
        return Err(MechanicsError::RegimeViolation(format!("m_S = {} is not 0", p.m_s)));
    }
    if p.omega_tilde * z >= 0.1 {
        return Err(MechanicsError::RegimeViolation(format!("ω̃z̃ = {} is not small", p.omega_tilde * z)));
    }
    Ok(())
}

/// Total ground-state force written as B·S² + (A + G)·S + C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForcePolynomial {
    /// Image term per S².
    pub b: f64,
    /// Broadband magnetic term per S.
    pub a: f64,
    /// Gravity per S.
    pub g: f64,
    /// Electric force plus any fixed-mass gravity.
    pub c: f64,
}

impl ForcePolynomial {
    pub fn eval(&self, s: f64) -> f64 {
        self.b * s * s + (self.a + self.g) * s + self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    /// Smallest positive root, or infinity when there is none.
    pub spin: f64,
    pub polynomial: ForcePolynomial,
    pub diagnostic: Option<String>,
}

/// Spin at which the ground-state total force changes sign at fixed z̃.
/// The coefficients come from the forces at S = 1 and S = 2.
pub fn spin_threshold(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    quad: &QuadratureConfig,
    include_static: bool,
    environment: &EnvironmentSpec,
) -> Result<Threshold, MechanicsError> {
    let settings = ForceSettings { mode: Mode::Ground, include_static, environment: EnvironmentSpec::no_gravity() };
    let at = |s: f64| force_breakdown(&particle.with_spin(s), surface, geometry, quad, &settings);
    let (f1, f2) = (at(1.0)?, at(2.0)?);
    if !(f1.converged && f2.converged) {
        log::warn!("threshold at z̃ = {}: force quadrature not converged", geometry.z_tilde);
    }
    let c = f1.f_e;
    let (t1, t2) = (f1.f_total - c, f2.f_total - c);
    let b = (t2 - 2.0 * t1) / 2.0;
    let a = t1 - b;
    let (g, fixed) = match particle.mass {
        MassModel::PerSpin(_) => (particle.gravity_coefficients(environment).0, 0.0),
        MassModel::Fixed(_) => (0.0, particle.gravity_coefficients(environment).1),
    };
    let poly = ForcePolynomial { b, a, g, c: c + fixed };
    let (spin, diagnostic) = match smallest_positive_root(poly.b, poly.a + poly.g, poly.c) {
        Some(s) => (s, None),
        None => (
            f64::INFINITY,
            Some(format!(
                "no positive root of {:e} S² + {:e} S + {:e}",
                poly.b,
                poly.a + poly.g,
                poly.c
            )),
        ),
    };
    Ok(Threshold { spin, polynomial: poly, diagnostic })
}

fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    let roots: Vec<f64> = if a == 0.0 {
        if b == 0.0 {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            vec![]
        } else {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / a, c / q]
            }
        }
    };
    roots.into_iter().filter(|r| *r > 0.0 && r.is_finite()).reduce(f64::min)
}
