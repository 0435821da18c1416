//! Particle, geometry and environment parameters, physical constants, and
//! conversion to the dimensionless units used throughout the crate.
//!
//! Units: shifts in ħΓ₀, forces in ħΓ₀k_e, distances in 1/k_e, frequencies
//! in ω_e, with k_e = ω_e/c.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// CODATA 2018 values. The Bohr radius is derived from the others so that
/// the two expressions for η agree to rounding.
pub mod consts {
    pub const C: f64 = 299_792_458.0;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const M_E: f64 = 9.109_383_701_5e-31;
    pub const E: f64 = 1.602_176_634e-19;
    pub const ALPHA: f64 = 7.297_352_569_3e-3;
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    pub const M_U: f64 = 1.660_539_066_60e-27;
    pub const G_EARTH: f64 = 9.81;

    /// a₀ = ħ/(m_e c α).
    pub fn bohr_radius() -> f64 {
        HBAR / (M_E * C * ALPHA)
    }

    /// Gyromagnetic ratio γ₀ = e/m_e (g = 2 electron spin).
    pub fn gyromagnetic() -> f64 {
        E / M_E
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("input `{0}` must be positive and finite")]
    NonPositiveInput(&'static str),
    #[error("sublevel m_s = {m_s} outside [-{spin}, {spin}]")]
    SublevelOutOfRange { m_s: f64, spin: f64 },
    #[error("hierarchy violated: omega_m = {omega_m} >= omega_e = {omega_e}")]
    HierarchyViolation { omega_m: f64, omega_e: f64 },
    #[error("spin {0} is not a non-negative half-integer")]
    NotHalfInteger(f64),
    #[error("unknown quantity kind `{0}`")]
    UnknownKind(String),
}

/// Electric-dipole magnitude with an explicit unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleMoment {
    CoulombMeter(f64),
    /// Multiples of e·a₀.
    AtomicUnits(f64),
}

impl DipoleMoment {
    pub fn coulomb_meter(self) -> f64 {
        match self {
            DipoleMoment::CoulombMeter(d) => d,
            DipoleMoment::AtomicUnits(n) => n * consts::E * consts::bohr_radius(),
        }
    }
}

/// Whether a directly supplied rate is an angular rate or a cyclic frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateConvention {
    #[default]
    Angular,
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gamma0Override {
    pub value: f64,
    #[serde(default)]
    pub convention: RateConvention,
}

impl Gamma0Override {
    pub fn rad_per_s(&self) -> f64 {
        match self.convention {
            RateConvention::Angular => self.value,
            RateConvention::Cyclic => 2.0 * PI * self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassModel {
    /// M = S · mass (kg).
    PerSpin(f64),
    /// M fixed (kg), independent of S.
    Fixed(f64),
}

impl Default for MassModel {
    fn default() -> Self {
        MassModel::PerSpin(consts::M_U)
    }
}

/// Raw inputs in SI units (frequencies in rad/s), turned into a
/// [`ParticleSpec`] by [`build_particle`]. In JSON only `spin` is required;
/// the rest default to [`ParticleInputs::reference`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleInputs {
    #[serde(default = "defaults::omega_e")]
    pub omega_e: f64,
    #[serde(default = "defaults::omega_m")]
    pub omega_m: f64,
    #[serde(default = "defaults::dipole")]
    pub dipole: DipoleMoment,
    pub spin: f64,
    /// Defaults to the ground sublevel −S.
    #[serde(default)]
    pub m_s: Option<f64>,
    /// `null` computes Γ₀ from the dipole moment.
    #[serde(default = "defaults::gamma0")]
    pub gamma0: Option<Gamma0Override>,
    #[serde(default)]
    pub mass: MassModel,
    #[serde(default)]
    pub allow_hierarchy_violation: bool,
}

mod defaults {
    use super::*;
    pub fn omega_e() -> f64 {
        2.0 * PI * 1e15
    }
    pub fn omega_m() -> f64 {
        2.0 * PI * 1e10
    }
    pub fn dipole() -> DipoleMoment {
        DipoleMoment::AtomicUnits(0.5)
    }
    pub fn gamma0() -> Option<Gamma0Override> {
        Some(Gamma0Override { value: 1.8e7, convention: RateConvention::Angular })
    }
}

impl ParticleInputs {
    /// ω_e = 2π·10¹⁵, ω_m = 2π·10¹⁰, Γ₀ = 1.8×10⁷ rad/s, |d| = e·a₀/2.
    pub fn reference(spin: f64) -> Self {
        ParticleInputs {
            omega_e: defaults::omega_e(),
            omega_m: defaults::omega_m(),
            dipole: defaults::dipole(),
            spin,
            m_s: None,
            gamma0: defaults::gamma0(),
            mass: MassModel::default(),
            allow_hierarchy_violation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpec {
    pub omega_e: f64,
    pub omega_m: f64,
    pub dipole_moment: f64,
    pub spin: f64,
    pub m_s: f64,
    pub mass: MassModel,
    pub gamma_0: f64,
    /// Γ₀ from |d| alone, kept for diagnostics when an override is in effect.
    pub gamma_0_free: f64,
    pub eta: f64,
    pub omega_tilde: f64,
    pub k_e: f64,
}

fn positive(v: f64, name: &'static str) -> Result<f64, ParamsError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ParamsError::NonPositiveInput(name))
    }
}

pub fn build_particle(inp: &ParticleInputs) -> Result<ParticleSpec, ParamsError> {
    let omega_e = positive(inp.omega_e, "omega_e")?;
    let omega_m = positive(inp.omega_m, "omega_m")?;
    let d = positive(inp.dipole.coulomb_meter(), "dipole_moment")?;
    if !(inp.spin.is_finite() && inp.spin >= 0.0) {
        return Err(ParamsError::NonPositiveInput("spin"));
    }
    let m_s = inp.m_s.unwrap_or(-inp.spin);
    if !m_s.is_finite() || m_s.abs() > inp.spin {
        return Err(ParamsError::SublevelOutOfRange { m_s, spin: inp.spin });
    }
    if omega_m >= omega_e && !inp.allow_hierarchy_violation {
        return Err(ParamsError::HierarchyViolation { omega_m, omega_e });
    }
    match inp.mass {
        MassModel::PerSpin(m) => positive(m, "mass_per_spin")?,
        MassModel::Fixed(m) => positive(m, "mass")?,
    };

    let k_e = omega_e / consts::C;
    let gamma_0_free = d * d * k_e.powi(3) / (3.0 * PI * consts::EPS0 * consts::HBAR);
    let gamma_0 = match inp.gamma0 {
        Some(g) => {
            let g = positive(g.rad_per_s(), "gamma0")?;
            log::info!(
                "using supplied Gamma0 = {g:.6e} rad/s; |d| implies {gamma_0_free:.6e} rad/s (ratio {:.4})",
                g / gamma_0_free
            );
            g
        }
        None => gamma_0_free,
    };

    Ok(ParticleSpec {
        omega_e,
        omega_m,
        dipole_moment: d,
        spin: inp.spin,
        m_s,
        mass: inp.mass,
        gamma_0,
        gamma_0_free,
        eta: eta_from_gyromagnetic(d),
        omega_tilde: omega_m / omega_e,
        k_e,
    })
}

/// η = ħ²γ₀²/(|d|²c²).
pub fn eta_from_gyromagnetic(d: f64) -> f64 {
    let r = consts::HBAR * consts::gyromagnetic() / (d * consts::C);
    r * r
}

/// η = α²/(|d|/(e a₀))².
pub fn eta_from_fine_structure(d: f64) -> f64 {
    let n = d / (consts::E * consts::bohr_radius());
    consts::ALPHA * consts::ALPHA / (n * n)
}

/// Requires a half-integer spin and a sublevel on the ladder; used for
/// physical-particle input validation.
pub fn check_half_integer(spin: f64, m_s: f64) -> Result<(), ParamsError> {
    let twice = 2.0 * spin;
    if twice.fract() != 0.0 {
        return Err(ParamsError::NotHalfInteger(spin));
    }
    if (spin - m_s).fract() != 0.0 {
        return Err(ParamsError::SublevelOutOfRange { m_s, spin });
    }
    Ok(())
}

impl ParticleSpec {
    /// Same particle with a different spin; the sublevel keeps its relation
    /// to the ladder (ground stays −S, m_S = 0 stays 0).
    pub fn with_spin(&self, spin: f64) -> ParticleSpec {
        let m_s = if self.m_s == -self.spin { -spin } else { self.m_s.clamp(-spin, spin) };
        ParticleSpec { spin, m_s, ..self.clone() }
    }

    pub fn with_m_s(&self, m_s: f64) -> Result<ParticleSpec, ParamsError> {
        if !m_s.is_finite() || m_s.abs() > self.spin {
            return Err(ParamsError::SublevelOutOfRange { m_s, spin: self.spin });
        }
        Ok(ParticleSpec { m_s, ..self.clone() })
    }

    pub fn total_mass(&self) -> f64 {
        match self.mass {
            MassModel::PerSpin(m) => self.spin * m,
            MassModel::Fixed(m) => m,
        }
    }

    pub fn force_unit(&self) -> f64 {
        consts::HBAR * self.gamma_0 * self.k_e
    }

    /// Gravity force −Mg in ħΓ₀k_e.
    pub fn gravity_force(&self, env: &EnvironmentSpec) -> f64 {
        -self.total_mass() * env.g / self.force_unit()
    }

    /// Split of the gravity force into a part per unit spin and a fixed part.
    pub fn gravity_coefficients(&self, env: &EnvironmentSpec) -> (f64, f64) {
        let u = self.force_unit();
        match self.mass {
            MassModel::PerSpin(m) => (-m * env.g / u, 0.0),
            MassModel::Fixed(m) => (0.0, -m * env.g / u),
        }
    }

    pub fn to_dimensionless(&self, value: f64, kind: QuantityKind) -> f64 {
        value / self.unit(kind)
    }

    pub fn from_dimensionless(&self, value: f64, kind: QuantityKind) -> f64 {
        value * self.unit(kind)
    }

    fn unit(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Potential => consts::HBAR * self.gamma_0,
            QuantityKind::Force => self.force_unit(),
            QuantityKind::Distance => 1.0 / self.k_e,
            QuantityKind::Frequency => self.omega_e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    Potential,
    Force,
    Distance,
    Frequency,
}

impl FromStr for QuantityKind {
    type Err = ParamsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "potential" => Ok(QuantityKind::Potential),
            "force" => Ok(QuantityKind::Force),
            "distance" => Ok(QuantityKind::Distance),
            "frequency" => Ok(QuantityKind::Frequency),
            other => Err(ParamsError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub z0: f64,
    pub z_tilde: f64,
}

impl Geometry {
    pub fn new(particle: &ParticleSpec, z0: f64) -> Result<Geometry, ParamsError> {
        let z0 = positive(z0, "z0")?;
        Ok(Geometry { z0, z_tilde: z0 * particle.k_e })
    }

    pub fn from_z_tilde(particle: &ParticleSpec, z_tilde: f64) -> Result<Geometry, ParamsError> {
        let z_tilde = positive(z_tilde, "z_tilde")?;
        Ok(Geometry { z0: z_tilde / particle.k_e, z_tilde })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSpec {
    pub g: f64,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec { g: consts::G_EARTH }
    }
}

impl EnvironmentSpec {
    pub fn new(g: f64) -> Result<Self, ParamsError> {
        if g.is_finite() && g >= 0.0 {
            Ok(EnvironmentSpec { g })
        } else {
            Err(ParamsError::NonPositiveInput("g"))
        }
    }

    pub fn no_gravity() -> Self {
        EnvironmentSpec { g: 0.0 }
    }
}
