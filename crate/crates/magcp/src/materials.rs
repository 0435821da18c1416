//! Surface response: permittivities and Fresnel reflection coefficients on the
//! imaginary and real frequency axes, with μ = 1.
//!
//! The SI entry points take κ⊥, k∥ in 1/m and frequencies in rad/s. The
//! reduced forms ([`reflection_imag`], [`reflection_real`]) work in any unit
//! system with c = 1, which is how the potentials call them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::consts::C;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialsError {
    #[error("negative frequency {0}")]
    NegativeFrequency(f64),
    #[error("kappa_perp = {kappa} below xi/c = {bound}")]
    DomainViolation { kappa: f64, bound: f64 },
    #[error("invalid model parameter `{0}`")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceModel {
    PerfectConductor,
    Drude { omega_p: f64, gamma: f64 },
    Plasma { omega_p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Permittivity {
    Finite(f64),
    /// Perfect conductor.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub r_s: Complex64,
    pub r_p: Complex64,
}

impl FresnelPair {
    pub fn real(r_s: f64, r_p: f64) -> Self {
        FresnelPair { r_s: Complex64::new(r_s, 0.0), r_p: Complex64::new(r_p, 0.0) }
    }

    pub const PERFECT: FresnelPair = FresnelPair {
        r_s: Complex64 { re: -1.0, im: 0.0 },
        r_p: Complex64 { re: 1.0, im: 0.0 },
    };
}

impl SurfaceModel {
    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self, MaterialsError> {
        let m = SurfaceModel::Drude { omega_p, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn plasma(omega_p: f64) -> Result<Self, MaterialsError> {
        let m = SurfaceModel::Plasma { omega_p };
        m.validate()?;
        Ok(m)
    }

    /// Gold as used in the examples: ω_p = 1.36×10¹⁶ rad/s, γ = 10¹⁴ rad/s.
    pub fn gold_drude() -> Self {
        SurfaceModel::Drude { omega_p: 1.36e16, gamma: 1e14 }
    }

    pub fn gold_plasma() -> Self {
        SurfaceModel::Plasma { omega_p: 1.36e16 }
    }

    pub fn validate(&self) -> Result<(), MaterialsError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            SurfaceModel::PerfectConductor => Ok(()),
            SurfaceModel::Plasma { omega_p } => {
                if ok(omega_p) { Ok(()) } else { Err(MaterialsError::InvalidParameter("omega_p")) }
            }
            SurfaceModel::Drude { omega_p, gamma } => {
                if !ok(omega_p) {
                    return Err(MaterialsError::InvalidParameter("omega_p"));
                }
                if !ok(gamma) {
                    return Err(MaterialsError::InvalidParameter("gamma"));
                }
                if gamma > omega_p / 10.0 {
                    log::warn!("Drude gamma = {gamma:e} is not small against omega_p = {omega_p:e}");
                }
                Ok(())
            }
        }
    }

    /// Same model with every frequency divided by `unit`.
    pub fn scaled(&self, unit: f64) -> SurfaceModel {
        match *self {
            SurfaceModel::PerfectConductor => SurfaceModel::PerfectConductor,
            SurfaceModel::Drude { omega_p, gamma } => {
                SurfaceModel::Drude { omega_p: omega_p / unit, gamma: gamma / unit }
            }
            SurfaceModel::Plasma { omega_p } => SurfaceModel::Plasma { omega_p: omega_p / unit },
        }
    }

    pub fn omega_p(&self) -> Option<f64> {
        match *self {
            SurfaceModel::PerfectConductor => None,
            SurfaceModel::Drude { omega_p, .. } | SurfaceModel::Plasma { omega_p } => Some(omega_p),
        }
    }

    /// ε(iξ) without the sign check, any consistent frequency unit.
    pub fn eps_imag(&self, xi: f64) -> Permittivity {
        match *self {
            SurfaceModel::PerfectConductor => Permittivity::Infinite,
            SurfaceModel::Drude { omega_p, gamma } => {
                Permittivity::Finite(1.0 + omega_p * omega_p / (xi * (xi + gamma)))
            }
            SurfaceModel::Plasma { omega_p } => {
                Permittivity::Finite(1.0 + (omega_p / xi) * (omega_p / xi))
            }
        }
    }

    /// ε(ω) on the real axis; `None` for the perfect conductor.
    pub fn eps_real(&self, omega: f64) -> Option<Complex64> {
        match *self {
            SurfaceModel::PerfectConductor => None,
            SurfaceModel::Drude { omega_p, gamma } => {
                let den = Complex64::new(omega * omega, gamma * omega);
                Some(Complex64::new(1.0, 0.0) - omega_p * omega_p / den)
            }
            SurfaceModel::Plasma { omega_p } => {
                Some(Complex64::new(1.0 - (omega_p / omega) * (omega_p / omega), 0.0))
            }
        }
    }
}

pub fn permittivity_imag_axis(model: &SurfaceModel, xi: f64) -> Result<Permittivity, MaterialsError> {
    if xi < 0.0 || xi.is_nan() {
        return Err(MaterialsError::NegativeFrequency(xi));
    }
    Ok(model.eps_imag(xi))
}

/// Reflection amplitudes (r_s, r_p) for ε(iξ) at ρ = ξ/(cκ⊥) ∈ [0, 1].
pub fn reflection_imag(eps: Permittivity, rho: f64) -> (f64, f64) {
    match eps {
        Permittivity::Infinite => (-1.0, 1.0),
        Permittivity::Finite(e) => {
            let t = (e - 1.0) * rho * rho;
            let s = (1.0 + t).sqrt();
            (-t / ((1.0 + s) * (1.0 + s)), (e - s) / (e + s))
        }
    }
}

pub fn fresnel_imag_axis(
    model: &SurfaceModel,
    kappa_perp: f64,
    xi: f64,
) -> Result<FresnelPair, MaterialsError> {
    let eps = permittivity_imag_axis(model, xi)?;
    if xi == 0.0 {
        return fresnel_static_limit(model, kappa_perp);
    }
    let bound = xi / C;
    if !(kappa_perp >= bound * (1.0 - 1e-12)) {
        return Err(MaterialsError::DomainViolation { kappa: kappa_perp, bound });
    }
    let rho = (bound / kappa_perp).min(1.0);
    let (rs, rp) = reflection_imag(eps, rho);
    Ok(FresnelPair::real(rs, rp))
}

/// ξ → 0 limit taken analytically.
pub fn fresnel_static_limit(model: &SurfaceModel, kappa_perp: f64) -> Result<FresnelPair, MaterialsError> {
    if !(kappa_perp > 0.0) {
        return Err(MaterialsError::DomainViolation { kappa: kappa_perp, bound: 0.0 });
    }
    Ok(match *model {
        SurfaceModel::PerfectConductor => FresnelPair::PERFECT,
        SurfaceModel::Drude { .. } => FresnelPair::real(0.0, 1.0),
        SurfaceModel::Plasma { omega_p } => FresnelPair::real(static_rs_plasma(kappa_perp * C / omega_p), 1.0),
    })
}

/// r_s(κ⊥, 0) for the plasma model with q = cκ⊥/ω_p.
pub fn static_rs_plasma(q: f64) -> f64 {
    let s = (q * q + 1.0).sqrt();
    -1.0 / ((q + s) * (q + s))
}

/// κ⊥ in units of ω/c for p = ck∥/ω: real positive above the light line,
/// −i√(1 − p²) below.
pub fn kappa_perp_real(p: f64) -> Complex64 {
    if p >= 1.0 {
        Complex64::new(((p - 1.0) * (p + 1.0)).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -((1.0 - p) * (1.0 + p)).sqrt())
    }
}

fn kappa_medium(p: f64, eps: Complex64) -> Complex64 {
    let k = (Complex64::new(p * p, 0.0) - eps).sqrt();
    if k.re == 0.0 && k.im > 0.0 {
        -k
    } else {
        k
    }
}

/// Real-frequency amplitudes at p = ck∥/ω; `None` means perfect conductor.
pub fn reflection_real(eps: Option<Complex64>, p: f64) -> (Complex64, Complex64) {
    let eps = match eps {
        None => return (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)),
        Some(e) => e,
    };
    let k = kappa_perp_real(p);
    let km = kappa_medium(p, eps);
    let one = Complex64::new(1.0, 0.0);
    let sum = k + km;
    let r_s = if sum == Complex64::new(0.0, 0.0) {
        // κ = κ_m = 0 only when ε = 1 at grazing incidence
        Complex64::new(0.0, 0.0)
    } else {
        (eps - one) / (sum * sum)
    };
    let ek = eps * k;
    let r_p = if km == Complex64::new(0.0, 0.0) {
        if eps == Complex64::new(0.0, 0.0) { -one } else { one }
    } else {
        let t = ek / km;
        (t - one) / (t + one)
    };
    (r_s, r_p)
}

pub fn fresnel_real_freq(model: &SurfaceModel, k_par: f64, omega: f64) -> Result<FresnelPair, MaterialsError> {
    if !(omega > 0.0) {
        return Err(MaterialsError::NegativeFrequency(omega));
    }
    if !(k_par >= 0.0) {
        return Err(MaterialsError::DomainViolation { kappa: k_par, bound: 0.0 });
    }
    let (r_s, r_p) = reflection_real(model.eps_real(omega), k_par * C / omega);
    Ok(FresnelPair { r_s, r_p })
}
