//! Surface-induced level shifts and decay-rate corrections.
//!
//! Ground state (m_S = −S), with x = ξ/ω_e and q = cκ⊥/ω_e:
//!
//! ```text
//! Ũ_e   = (3/8π)        ∫dx ∫_x dq e^{−2qz̃} (x² r_s − q² r_p)/(x² + 1)
//! Ũ_m⁻  = (3/8π) ω̃ηS    ∫dx ∫_x dq e^{−2qz̃} (x² r_p − q² r_s)/(x² + ω̃²)
//! Ũ_m^z = −(3/8) ηS²     ∫dq q² e^{−2qz̃} r_s(q, 0)
//! ```
//!
//! Excited sublevel m_S = 0, with p = ck∥/ω_m, a = ω̃z̃ and κ⊥ in units of k_m:
//!
//! ```text
//! I(a)   = ∫dp (p/κ⊥) e^{−2κ⊥a} (r_p + r_s κ⊥²)      (Fresnel at ω_m)
//! Ũ_m⁽⁰⁾ = −(3/16) ηS(S+1) ω̃³ Re I
//! ΔΓ̃_m   = (3/8) η ω̃³ Im I · ⟨Ŝ₊Ŝ₋⟩
//! ΔΓ̃_e   = (3/4) Im J,  J(z̃) = ∫dp (p/κ⊥) e^{−2κ⊥z̃} (r_s + r_p κ⊥²)   (Fresnel at ω_e)
//! ```
//!
//! Forces are the z̃-derivatives taken under the integral sign.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::materials::{reflection_imag, reflection_real, static_rs_plasma, Permittivity, SurfaceModel};
use crate::params::{Geometry, ParticleSpec};
use crate::quadrature::{
    integrate_nested, integrate_oscillatory_split, integrate_semi_infinite, InnerFamily, IntegralResult,
    QuadratureConfig, QuadratureError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{component} did not converge: value {} ± {}", .result.value, .result.error_estimate)]
    QuadratureFailure { component: Component, result: IntegralResult<f64> },
    #[error("{0} requires a perfect conductor")]
    UnsupportedModel(&'static str),
    #[error("excited-state quantities need m_S = 0, got {0}")]
    WrongSublevel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Electric,
    MagneticBroadband,
    MagneticStatic,
    MagneticExcited0,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Component::Electric => "electric shift",
            Component::MagneticBroadband => "broadband magnetic shift",
            Component::MagneticStatic => "magnetostatic shift",
            Component::MagneticExcited0 => "excited-sublevel magnetic shift",
        };
        f.write_str(s)
    }
}

/// Shift or its force −∂/∂z̃.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Shift,
    Force,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluated {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl Evaluated {
    fn exact(value: f64) -> Self {
        Evaluated { value, error_estimate: 0.0, converged: true }
    }

    pub fn into_result(self, component: Component) -> Result<f64, PotentialError> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(PotentialError::QuadratureFailure {
                component,
                result: IntegralResult {
                    value: self.value,
                    error_estimate: self.error_estimate,
                    evaluations: 0,
                    converged: false,
                    failed_level: None,
                },
            })
        }
    }
}

// rel_tol plus the absolute tolerance after scaling to a bare integral
struct Tol {
    rel_tol: f64,
    abs_tol_effective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dipole {
    Electric,
    Magnetic,
}

struct GroundKernel {
    dipole: Dipole,
    response: Response,
    z: f64,
    lorentz: f64,
    model: SurfaceModel,
}

impl GroundKernel {
    fn eps(&self, x: f64) -> Permittivity {
        self.model.eps_imag(x)
    }
}

impl InnerFamily<f64> for GroundKernel {
    fn lower(&self, x: f64) -> f64 {
        x
    }

    fn split_points(&self, x: f64) -> Vec<f64> {
        let d = 0.5 / self.z;
        let mut v = vec![x + d, x + 10.0 * d];
        if let Permittivity::Finite(e) = self.eps(x) {
            let qs = x * (e - 1.0).sqrt();
            if qs.is_finite() && qs > x {
                v.push(qs);
            }
        }
        v
    }

    fn eval(&self, x: f64, q: f64) -> f64 {
        let (rs, rp) = reflection_imag(self.eps(x), (x / q).min(1.0));
        let mut damp = (-2.0 * q * self.z).exp();
        if damp == 0.0 {
            return 0.0;
        }
        if self.response == Response::Force {
            damp *= 2.0 * q;
        }
        let x2 = x * x;
        let num = match self.dipole {
            Dipole::Electric => x2 * rs - q * q * rp,
            Dipole::Magnetic => x2 * rp - q * q * rs,
        };
        num / (x2 + self.lorentz * self.lorentz) * damp
    }
}

/// Natural size of the bare ground-state integrals, used to scale `abs_tol`.
fn ground_envelope(z: f64, response: Response) -> f64 {
    match response {
        Response::Shift => 1.0 / (z.powi(3) + z.powi(4)),
        Response::Force => 1.0 / (z.powi(4) + z.powi(5)),
    }
}

fn material_scales(model: &SurfaceModel, z: f64) -> Vec<f64> {
    match *model {
        SurfaceModel::PerfectConductor => vec![],
        SurfaceModel::Plasma { omega_p } => vec![omega_p],
        SurfaceModel::Drude { omega_p, gamma } => {
            vec![omega_p, gamma, gamma / (4.0 * z * z * omega_p * omega_p)]
        }
    }
}

fn ground_integral(
    dipole: Dipole,
    response: Response,
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    z: f64,
    quad: &QuadratureConfig,
) -> Result<(IntegralResult<f64>, Tol), PotentialError> {
    quad.validate()?;
    let model = surface.scaled(particle.omega_e);
    let lorentz = match dipole {
        Dipole::Electric => 1.0,
        Dipole::Magnetic => particle.omega_tilde,
    };
    let kernel = GroundKernel { dipole, response, z, lorentz, model };
    let abs = quad.abs_tol * ground_envelope(z, response);
    let mut outer = quad.with_points([lorentz, 0.5 / z]);
    outer.split_points.extend(material_scales(&model, z));
    outer.abs_tol = abs;
    let inner = QuadratureConfig {
        rel_tol: quad.rel_tol / 4.0,
        abs_tol: 0.0,
        tail_decades: quad.tail_decades.min(2),
        split_points: Vec::new(),
        ..quad.clone()
    };
    let r = integrate_nested(&kernel, 0.0, &outer, &inner)?;
    Ok((r, Tol { rel_tol: quad.rel_tol, abs_tol_effective: abs }))
}

fn finish(r: IntegralResult<f64>, tol: Tol, k: f64) -> Evaluated {
    let value = k * r.value;
    let error_estimate = (k * r.error_estimate).abs();
    let within = r.error_estimate <= tol.rel_tol * r.value.abs() || r.error_estimate <= tol.abs_tol_effective;
    Evaluated { value, error_estimate, converged: r.converged && within }
}

fn electric(response: Response, p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<Evaluated, PotentialError> {
    let (r, tol) = ground_integral(Dipole::Electric, response, p, s, g.z_tilde, q)?;
    Ok(finish(r, tol, 3.0 / (8.0 * PI)))
}

fn broadband(response: Response, p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<Evaluated, PotentialError> {
    if p.spin == 0.0 {
        return Ok(Evaluated::exact(0.0));
    }
    let (r, tol) = ground_integral(Dipole::Magnetic, response, p, s, g.z_tilde, q)?;
    Ok(finish(r, tol, 3.0 / (8.0 * PI) * p.omega_tilde * p.eta * p.spin))
}

fn magnetostatic(response: Response, p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<Evaluated, PotentialError> {
    let z = g.z_tilde;
    let k = -0.375 * p.eta * (p.spin * p.spin);
    // bare integral ∫ q² e^{−2qz} r_s dq (times 2q for the force)
    match *s {
        SurfaceModel::Drude { .. } => Ok(Evaluated::exact(0.0)),
        SurfaceModel::PerfectConductor => {
            let bare = match response {
                Response::Shift => -0.25 / z.powi(3),
                Response::Force => -0.75 / z.powi(4),
            };
            Ok(Evaluated::exact(k * bare))
        }
        SurfaceModel::Plasma { omega_p } => {
            q.validate()?;
            let pp = omega_p / p.omega_e;
            let cfg = QuadratureConfig {
                abs_tol: q.abs_tol * ground_envelope(z, response),
                ..q.with_points([0.5 / z, 5.0 / z, pp])
            };
            let r = integrate_semi_infinite(
                |x: f64| {
                    let d = (-2.0 * x * z).exp();
                    if d == 0.0 {
                        return 0.0;
                    }
                    let w = if response == Response::Force { 2.0 * x } else { 1.0 };
                    x * x * w * d * static_rs_plasma(x / pp)
                },
                0.0,
                &cfg,
            )?;
            let tol = Tol { rel_tol: q.rel_tol, abs_tol_effective: cfg.abs_tol };
            Ok(finish(r, tol, k))
        }
    }
}

/// Which real-frequency kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resonant {
    /// Magnetic dipole at ω_m: r_p + r_s κ².
    Magnetic,
    /// Electric dipole at ω_e: r_s + r_p κ².
    Electric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

/// ∫dp (p/κ) e^{−2κa} [...] (Shift) or ∫dp p e^{−2κa} [...] (Force), real or
/// imaginary part.
fn real_frequency_integral(
    kind: Resonant,
    response: Response,
    part: Part,
    eps: Option<Complex64>,
    a: f64,
    quad: &QuadratureConfig,
) -> Result<(IntegralResult<f64>, Tol), PotentialError> {
    quad.validate()?;
    let f = |p: f64| -> f64 {
        let k = crate::materials::kappa_perp_real(p);
        let (rs, rp) = reflection_real(eps, p);
        let k2 = k * k;
        let br = match kind {
            Resonant::Magnetic => rp + rs * k2,
            Resonant::Electric => rs + rp * k2,
        };
        let e = (-2.0 * a * k).exp();
        let v = match response {
            Response::Shift => e * br * (p / k),
            Response::Force => e * br * p,
        };
        match part {
            Part::Re => v.re,
            Part::Im => v.im,
        }
    };
    let mut pts = Vec::new();
    for c in [0.5, 5.0, 20.0] {
        let kappa = c / a;
        pts.push((1.0 + kappa * kappa).sqrt());
    }
    if let Some(e) = eps {
        let m = e.norm().sqrt();
        if m > 1.0 {
            pts.push(m);
        }
    }
    let envelope = match (part, response) {
        (Part::Re, Response::Shift) => 1.0 / a.powi(3) + 1.0,
        (Part::Re, Response::Force) => 1.0 / a.powi(4) + 1.0,
        (Part::Im, Response::Shift) => 1.0 + 1.0 / a,
        (Part::Im, Response::Force) => 1.0 + 1.0 / (a * a),
    };
    let cfg = QuadratureConfig { abs_tol: quad.abs_tol * envelope, ..quad.with_points(pts) };
    let r = integrate_oscillatory_split(f, 1.0, 2.0 * a, &cfg)?;
    Ok((r, Tol { rel_tol: quad.rel_tol, abs_tol_effective: cfg.abs_tol }))
}

fn require_m0(p: &ParticleSpec) -> Result<(), PotentialError> {
    if p.m_s == 0.0 {
        Ok(())
    } else {
        Err(PotentialError::WrongSublevel(p.m_s))
    }
}

fn excited0(response: Response, p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<Evaluated, PotentialError> {
    require_m0(p)?;
    let wt = p.omega_tilde;
    let eps = s.scaled(p.omega_e).eps_real(wt);
    let a = wt * g.z_tilde;
    let (r, tol) = real_frequency_integral(Resonant::Magnetic, response, Part::Re, eps, a, q)?;
    let ss = p.spin * (p.spin + 1.0);
    let k = match response {
        Response::Shift => -(3.0 / 16.0) * p.eta * ss * wt.powi(3),
        Response::Force => -(3.0 / 8.0) * p.eta * ss * wt.powi(4),
    };
    Ok(finish(r, tol, k))
}

/// Generic entry point used by the force and sweep layers.
pub fn evaluate(
    component: Component,
    response: Response,
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    quad: &QuadratureConfig,
) -> Result<Evaluated, PotentialError> {
    match component {
        Component::Electric => electric(response, particle, surface, geometry, quad),
        Component::MagneticBroadband => broadband(response, particle, surface, geometry, quad),
        Component::MagneticStatic => magnetostatic(response, particle, surface, geometry, quad),
        Component::MagneticExcited0 => excited0(response, particle, surface, geometry, quad),
    }
}

/// Ũ_e⁽⁻⁾, attractive for every conducting surface.
pub fn u_e_ground(p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    electric(Response::Shift, p, s, g, q)?.into_result(Component::Electric)
}

/// Ũ_m⁽⁻⁾ for the ground sublevel; linear in S.
pub fn u_m_ground_broadband(p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    broadband(Response::Shift, p, s, g, q)?.into_result(Component::MagneticBroadband)
}

/// Ũ_m^(z), the static moment against its image; zero for Drude, (3/32)ηS²/z̃³
/// for a perfect conductor.
pub fn u_m_static(p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    magnetostatic(Response::Shift, p, s, g, q)?.into_result(Component::MagneticStatic)
}

/// Ũ_m⁽⁰⁾ for the m_S = 0 sublevel.
pub fn u_m_excited0(p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    excited0(Response::Shift, p, s, g, q)?.into_result(Component::MagneticExcited0)
}

fn f_pc(y: f64) -> f64 {
    (1.0 + y + y * y) * (-y).exp()
}

fn pc_single(lorentz: f64, z: f64, q: &QuadratureConfig) -> Result<IntegralResult<f64>, PotentialError> {
    // y = x/lorentz keeps the Lorentzian at unit scale
    let c = 2.0 * z * lorentz;
    let cfg = QuadratureConfig { abs_tol: 0.0, ..q.with_points([1.0, 1.0 / c, 10.0 / c]) };
    Ok(integrate_semi_infinite(|y: f64| f_pc(c * y) / (y * y + 1.0), 0.0, &cfg)?)
}

/// −(3/(32πz̃³)) ∫dx f(2xz̃)/(x² + 1), f(y) = (1 + y + y²)e^{−y}.
pub fn u_e_pc_closed(p: &ParticleSpec, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    let _ = p;
    let z = g.z_tilde;
    let r = pc_single(1.0, z, q)?;
    let k = -3.0 / (32.0 * PI * z.powi(3));
    let tol = Tol { rel_tol: q.rel_tol, abs_tol_effective: 0.0 };
    finish(r, tol, k).into_result(Component::Electric)
}

/// (3/(32πz̃³)) ηS ω̃ ∫dx f(2xz̃)/(x² + ω̃²).
pub fn u_m_pc_closed(p: &ParticleSpec, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    let z = g.z_tilde;
    let r = pc_single(p.omega_tilde, z, q)?;
    let k = 3.0 / (32.0 * PI * z.powi(3)) * p.eta * p.spin;
    let tol = Tol { rel_tol: q.rel_tol, abs_tol_effective: 0.0 };
    finish(r, tol, k).into_result(Component::MagneticBroadband)
}

/// (3ηS(S+1)/64z̃³)[cos 2a + 2a sin 2a − 4a² cos 2a], a = ω̃z̃.
pub fn u_m0_pc_closed(p: &ParticleSpec, g: &Geometry) -> f64 {
    let z = g.z_tilde;
    let a = p.omega_tilde * z;
    let (s2, c2) = (2.0 * a).sin_cos();
    let bracket = c2 + 2.0 * a * s2 - 4.0 * a * a * c2;
    3.0 * p.eta * p.spin * (p.spin + 1.0) / (64.0 * z.powi(3)) * bracket
}

/// ⟨S, m|Ŝ₊Ŝ₋|S, m⟩.
pub fn lowering_matrix_element(spin: f64, m_s: f64) -> f64 {
    spin * (spin + 1.0) - m_s * (m_s - 1.0)
}

/// ΔΓ_e/Γ₀ for the electric transition.
pub fn delta_gamma_e(p: &ParticleSpec, s: &SurfaceModel, g: &Geometry, q: &QuadratureConfig) -> Result<f64, PotentialError> {
    let eps = s.scaled(p.omega_e).eps_real(1.0);
    let (r, tol) = real_frequency_integral(Resonant::Electric, Response::Shift, Part::Im, eps, g.z_tilde, q)?;
    finish(r, tol, 0.75).into_result(Component::Electric)
}

/// ΔΓ_m/Γ₀ for |S, m_S⟩ → |S, m_S − 1⟩, matrix element included.
pub fn delta_gamma_m(
    p: &ParticleSpec,
    s: &SurfaceModel,
    g: &Geometry,
    q: &QuadratureConfig,
    m_s: f64,
) -> Result<f64, PotentialError> {
    if !m_s.is_finite() || m_s.abs() > p.spin {
        return Err(PotentialError::WrongSublevel(m_s));
    }
    let me = lowering_matrix_element(p.spin, m_s);
    if me == 0.0 {
        return Ok(0.0);
    }
    let wt = p.omega_tilde;
    let eps = s.scaled(p.omega_e).eps_real(wt);
    let (r, tol) = real_frequency_integral(Resonant::Magnetic, Response::Shift, Part::Im, eps, wt * g.z_tilde, q)?;
    finish(r, tol, 0.375 * p.eta * wt.powi(3) * me).into_result(Component::MagneticExcited0)
}

/// Free-space spin-flip rate in Γ₀ units for the same matrix element.
pub fn free_spin_flip_rate(p: &ParticleSpec, m_s: f64) -> f64 {
    0.5 * p.eta * p.omega_tilde.powi(3) * lowering_matrix_element(p.spin, m_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentFlags {
    pub u_e_minus: bool,
    pub u_m_minus: bool,
    pub u_m_z: bool,
    pub u_m_excited0: bool,
}

impl ComponentFlags {
    pub fn all(&self) -> bool {
        self.u_e_minus && self.u_m_minus && self.u_m_z && self.u_m_excited0
    }
}

/// Shift components in ħΓ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialBreakdown {
    pub u_e_minus: f64,
    pub u_m_minus: f64,
    pub u_m_z: f64,
    pub u_m_excited0: Option<f64>,
    pub total_ground: f64,
    /// Ũ_e⁽⁻⁾ + Ũ_m⁽⁰⁾ when the excited sublevel was requested.
    pub total_excited0: Option<f64>,
    pub converged: ComponentFlags,
}

/// Ground components for the particle's spin; the m_S = 0 shift is added when
/// `with_excited` is set.
pub fn potential_breakdown(
    p: &ParticleSpec,
    s: &SurfaceModel,
    g: &Geometry,
    q: &QuadratureConfig,
    with_excited: bool,
) -> Result<PotentialBreakdown, PotentialError> {
    let ground = p.with_spin(p.spin);
    let ground = ParticleSpec { m_s: -ground.spin, ..ground };
    let e = electric(Response::Shift, &ground, s, g, q)?;
    let m = broadband(Response::Shift, &ground, s, g, q)?;
    let z = magnetostatic(Response::Shift, &ground, s, g, q)?;
    let x = if with_excited {
        Some(excited0(Response::Shift, &ParticleSpec { m_s: 0.0, ..ground.clone() }, s, g, q)?)
    } else {
        None
    };
    Ok(PotentialBreakdown {
        u_e_minus: e.value,
        u_m_minus: m.value,
        u_m_z: z.value,
        u_m_excited0: x.map(|v| v.value),
        total_ground: e.value + m.value + z.value,
        total_excited0: x.map(|v| e.value + v.value),
        converged: ComponentFlags {
            u_e_minus: e.converged,
            u_m_minus: m.converged,
            u_m_z: z.converged,
            u_m_excited0: x.map_or(true, |v| v.converged),
        },
    })
}

/// Rate corrections in Γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBreakdown {
    pub delta_gamma_e: f64,
    pub delta_gamma_m: f64,
}

pub fn decay_breakdown(
    p: &ParticleSpec,
    s: &SurfaceModel,
    g: &Geometry,
    q: &QuadratureConfig,
) -> Result<DecayBreakdown, PotentialError> {
    Ok(DecayBreakdown {
        delta_gamma_e: delta_gamma_e(p, s, g, q)?,
        delta_gamma_m: delta_gamma_m(p, s, g, q, p.m_s)?,
    })
}

/// Ũ_m⁽⁰⁾ assembled from the raising and lowering off-resonant terms plus the
/// resonant term; the off-resonant pair cancels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcitedDecomposition {
    pub off_resonant_raising: f64,
    pub off_resonant_lowering: f64,
    pub resonant: f64,
    pub total: f64,
}

pub fn u_m_excited0_decomposed(
    p: &ParticleSpec,
    s: &SurfaceModel,
    g: &Geometry,
    q: &QuadratureConfig,
) -> Result<ExcitedDecomposition, PotentialError> {
    require_m0(p)?;
    // per unit matrix element the broadband term of the ground state carries
    // ⟨−S|Ŝ₋Ŝ₊|−S⟩ = 2S, so one unit is Ũ_m⁽⁻⁾(S = 1/2)
    let unit = ParticleSpec { spin: 0.5, m_s: -0.5, ..p.clone() };
    let ss = p.spin * (p.spin + 1.0);
    let up = broadband(Response::Shift, &unit, s, g, q)?.into_result(Component::MagneticBroadband)?;
    let down = broadband(Response::Shift, &unit, s, g, q)?.into_result(Component::MagneticBroadband)?;
    let raising = ss * up;
    let lowering = -ss * down;
    let resonant = u_m_excited0(p, s, g, q)?;
    Ok(ExcitedDecomposition {
        off_resonant_raising: raising,
        off_resonant_lowering: lowering,
        resonant,
        total: raising + lowering + resonant,
    })
}
