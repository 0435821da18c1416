//! Closed-form limits of the ground-state shifts by distance regime, the
//! metal coefficients that enter them, small-parameter Fresnel expansions,
//! and the non-retarded surface-plasmon form of the m_S = 0 shift.
//!
//! Regimes, with lengths in 1/k_e (c/ω_e = 1, c/ω_m = 1/ω̃, c/ω_p = ω_e/ω_p):
//!
//! * Region I: z̃ below every scale.
//! * Region II: above c/ω_e and c/ω_p, below c/ω_m.
//! * Region III: above every scale.
//!
//! The Drude Region I magnetic law C/z̃ falls off more slowly than the
//! electric C_e/z̃³, so at small enough z̃ the electric attraction always wins;
//! repulsion needs ηS large against the ratio of the two at the distance of
//! interest.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::materials::{FresnelPair, Permittivity, SurfaceModel};
use crate::params::consts::C;
use crate::params::{Geometry, ParticleSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("no closed form in the crossover between regimes")]
    CrossoverRegion,
    #[error("coefficients need a finite plasma frequency")]
    UnsupportedModel,
    #[error("expansion parameter {0} exceeds the validity bound 0.3")]
    ExpansionOutOfValidity(f64),
    #[error("outside the regime of validity: {0}")]
    RegimeViolation(String),
    #[error("margin must be >= 1, got {0}")]
    InvalidMargin(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    I,
    II,
    III,
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Electric,
    /// Broadband plus magnetostatic.
    Magnetic,
}

/// Length scales (c/ω_e, c/ω_p, c/ω_m) in 1/k_e.
pub fn length_scales(particle: &ParticleSpec, surface: &SurfaceModel) -> (f64, Option<f64>, f64) {
    (1.0, surface.omega_p().map(|wp| particle.omega_e / wp), 1.0 / particle.omega_tilde)
}

pub fn classify_region(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    margin: f64,
) -> Result<Region, AsymptoticsError> {
    if !(margin >= 1.0) {
        return Err(AsymptoticsError::InvalidMargin(margin));
    }
    let z = geometry.z_tilde;
    let (le, lp, lm) = length_scales(particle, surface);
    let fast_lo = lp.map_or(le, |p| p.min(le));
    let fast_hi = lp.map_or(le, |p| p.max(le));
    Ok(if z * margin < fast_lo.min(lm) {
        Region::I
    } else if z > fast_hi.max(lm) * margin {
        Region::III
    } else if z > fast_hi * margin && z * margin < lm {
        Region::II
    } else {
        Region::Crossover
    })
}

/// Metal coefficients of the Region I laws: Ũ_e ≈ −c_e3/z̃³, Ũ_m ≈ c_m1/z̃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticCoefficients {
    pub c_e3_drude: f64,
    /// For a plasma surface this is the γ → 0 limit.
    pub c_m1_drude: f64,
    pub c_m1_plasma: f64,
}

pub fn coefficients(particle: &ParticleSpec, surface: &SurfaceModel) -> Result<AsymptoticCoefficients, AsymptoticsError> {
    let (p, g) = match *surface {
        SurfaceModel::PerfectConductor => return Err(AsymptoticsError::UnsupportedModel),
        SurfaceModel::Drude { omega_p, gamma } => (omega_p / particle.omega_e, gamma / particle.omega_e),
        SurfaceModel::Plasma { omega_p } => (omega_p / particle.omega_e, 0.0),
    };
    let w = particle.omega_tilde;
    let es = particle.eta * particle.spin;
    let c_e3 = 3.0 * p / (64.0 * (SQRT_2 + p));
    let lead = 3.0 * w * es * p / 64.0;
    let surface_term = p / (w + p / SQRT_2);
    let log_term = if g > 0.0 { (2.0 * g / PI) * (g / w).ln() } else { 0.0 };
    let c_m1_drude = lead * (surface_term + p * (w + log_term) / (2.0 * (w * w + g * g)));
    let c_m1_plasma = lead * (surface_term + p / (2.0 * w)) + 3.0 / 64.0 * p * p * es * particle.spin;
    Ok(AsymptoticCoefficients { c_e3_drude: c_e3, c_m1_drude, c_m1_plasma })
}

/// The tabulated closed form for `region`; the electric entry for both metal
/// models uses the same Drude coefficient.
pub fn table1_potential(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
    region: Region,
    kind: Kind,
) -> Result<f64, AsymptoticsError> {
    let z = geometry.z_tilde;
    let s = particle.spin;
    let es = particle.eta * s;
    let w = particle.omega_tilde;
    let retarded_e = -3.0 / (16.0 * PI * z.powi(4));
    let retarded_m = 3.0 / (16.0 * PI) * (es / w) / z.powi(4);
    let with_static = 3.0 / 64.0 * es * (2.0 * s + 1.0) / z.powi(3);
    let without_static = 3.0 / 64.0 * es / z.powi(3);
    let image_factor = PI * s * z * w / 2.0 + 1.0;
    use Kind::*;
    use Region::*;
    let v = match (surface, region, kind) {
        (_, Crossover, _) => return Err(AsymptoticsError::CrossoverRegion),
        (_, II | III, Electric) => retarded_e,
        (SurfaceModel::PerfectConductor, I, Electric) => -3.0 / (64.0 * z.powi(3)),
        (_, I, Electric) => -coefficients(particle, surface)?.c_e3_drude / z.powi(3),
        (SurfaceModel::PerfectConductor, I | II, Magnetic) => with_static,
        (SurfaceModel::Drude { .. }, I, Magnetic) => coefficients(particle, surface)?.c_m1_drude / z,
        (SurfaceModel::Plasma { .. }, I, Magnetic) => coefficients(particle, surface)?.c_m1_plasma / z,
        (SurfaceModel::Drude { .. }, II, Magnetic) => without_static,
        (SurfaceModel::Plasma { .. }, II, Magnetic) => with_static,
        (SurfaceModel::Drude { .. }, III, Magnetic) => retarded_m,
        (_, III, Magnetic) => retarded_m * image_factor,
    };
    Ok(v)
}

/// Second-order expansion of (r_s, r_p) in ρ = ξ/(cκ⊥) at fixed ε(iξ).
pub fn nr_expansion(eps: f64, rho: f64) -> Result<(f64, f64), AsymptoticsError> {
    let t = (eps - 1.0) * rho * rho;
    let param = t.sqrt();
    if !(param < 0.3) {
        return Err(AsymptoticsError::ExpansionOutOfValidity(param));
    }
    let ep1 = eps + 1.0;
    let rp = (eps - 1.0) / ep1 - eps * t / (ep1 * ep1);
    Ok((-0.25 * t, rp))
}

pub fn fresnel_nr_expansion(surface: &SurfaceModel, kappa_perp: f64, xi: f64) -> Result<FresnelPair, AsymptoticsError> {
    match surface.eps_imag(xi) {
        Permittivity::Infinite => Err(AsymptoticsError::ExpansionOutOfValidity(f64::INFINITY)),
        Permittivity::Finite(e) => {
            let (rs, rp) = nr_expansion(e, xi / (C * kappa_perp))?;
            Ok(FresnelPair::real(rs, rp))
        }
    }
}

/// Non-retarded m_S = 0 shift and spin-flip rate near a Drude metal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceResonance {
    pub eps_m: (f64, f64),
    /// Q = ω_p/(√2 γ).
    pub q_factor: f64,
    /// δ_p = (ω_m − ω_p/√2)/γ.
    pub delta_p: f64,
    /// −(3ηS(S+1)ω̃²/128z̃) Re[(ε−1)(ε+5)/(ε+1)].
    pub shift: f64,
    /// (3ηS(S+1)ω̃²/64z̃) Q/δ_p, only when Q ≫ |δ_p| ≫ 1.
    pub shift_resonant: Option<f64>,
    /// (3ηS(S+1)ω̃²/64z̃) Im[(ε−1)(ε+5)/(ε+1)], in Γ₀.
    pub spin_flip_rate: f64,
    /// (3ηS(S+1)ω̃²/64z̃) Q/δ_p², in Γ₀.
    pub spin_flip_rate_resonant: Option<f64>,
}

/// (ε−1)(ε+5)/(ε+1).
pub fn resonance_bracket(eps: Complex64) -> Complex64 {
    (eps - 1.0) * (eps + 5.0) / (eps + 1.0)
}

/// Ratio used to decide "≪": Q ≥ ratio·|δ_p| and |δ_p| ≥ ratio.
const WELL_SEPARATED: f64 = 10.0;

pub fn surface_resonance_potential(
    particle: &ParticleSpec,
    surface: &SurfaceModel,
    geometry: &Geometry,
) -> Result<SurfaceResonance, AsymptoticsError> {
    let (wp, gamma) = match *surface {
        SurfaceModel::Drude { omega_p, gamma } => (omega_p, gamma),
        _ => return Err(AsymptoticsError::RegimeViolation("a Drude surface is required".into())),
    };
    let z = geometry.z_tilde;
    let w = particle.omega_tilde;
    if !(w * z * WELL_SEPARATED < 1.0) {
        return Err(AsymptoticsError::RegimeViolation(format!("ω̃z̃ = {} is not small", w * z)));
    }
    let eps = surface.eps_real(particle.omega_m).expect("Drude has finite permittivity");
    let b = resonance_bracket(eps);
    let pre = 3.0 * particle.eta * particle.spin * (particle.spin + 1.0) * w * w / (64.0 * z);
    let q = wp / (SQRT_2 * gamma);
    let d = (particle.omega_m - wp / SQRT_2) / gamma;
    let resonant = q >= WELL_SEPARATED * d.abs() && d.abs() >= WELL_SEPARATED;
    Ok(SurfaceResonance {
        eps_m: (eps.re, eps.im),
        q_factor: q,
        delta_p: d,
        shift: -0.5 * pre * b.re,
        shift_resonant: resonant.then(|| pre * q / d),
        spin_flip_rate: pre * b.im,
        spin_flip_rate_resonant: resonant.then(|| pre * q / (d * d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::reflection_imag;
    use crate::params::{build_particle, ParticleInputs};
    use proptest::prelude::*;

    fn particle(s: f64) -> ParticleSpec {
        build_particle(&ParticleInputs::reference(s)).unwrap()
    }

    fn at(p: &ParticleSpec, z: f64) -> Geometry {
        Geometry::from_z_tilde(p, z).unwrap()
    }

    #[test]
    fn regions() {
        let p = particle(1.0);
        let pc = SurfaceModel::PerfectConductor;
        let g = Geometry::new(&p, 10e-9).unwrap();
        assert_eq!(classify_region(&p, &pc, &g, 10.0).unwrap(), Region::Crossover);
        assert_eq!(classify_region(&p, &pc, &g, 1.0).unwrap(), Region::I);
        assert_eq!(classify_region(&p, &pc, &at(&p, 1e-4), 10.0).unwrap(), Region::I);
        assert_eq!(classify_region(&p, &pc, &at(&p, 1e3 / p.omega_tilde), 10.0).unwrap(), Region::III);
        assert_eq!(classify_region(&p, &pc, &at(&p, 300.0), 10.0).unwrap(), Region::II);
        assert!(classify_region(&p, &pc, &g, 0.5).is_err());
    }

    #[test]
    fn table_entries() {
        let p = particle(50.0);
        let pc = SurfaceModel::PerfectConductor;
        let z: f64 = 30.0;
        let v = table1_potential(&p, &pc, &at(&p, z), Region::II, Kind::Electric).unwrap();
        assert_eq!(v, -3.0 / (16.0 * PI * z.powi(4)));
        let v = table1_potential(&p, &pc, &at(&p, 1e-2), Region::I, Kind::Magnetic).unwrap();
        let expect = 3.0 / 64.0 * 2.130e-4 * 50.0 * 101.0 / 1e-6;
        assert!((v / expect - 1.0).abs() < 1e-3, "{v}");
        assert!((v - 5.04e4).abs() < 0.01e4);
        assert!(matches!(
            table1_potential(&p, &pc, &at(&p, 1.0), Region::Crossover, Kind::Electric),
            Err(AsymptoticsError::CrossoverRegion)
        ));
    }

    #[test]
    fn gold_electric_coefficient() {
        let p = particle(1.0);
        let c = coefficients(&p, &SurfaceModel::gold_drude()).unwrap();
        let pp = 1.36e16 / p.omega_e;
        let expect = 3.0 / 64.0 * 1.36e16 / (SQRT_2 * p.omega_e + 1.36e16);
        assert!((c.c_e3_drude / expect - 1.0).abs() < 1e-14);
        assert!((c.c_e3_drude - 0.0284).abs() < 1e-4);
        assert!((pp - 2.16451).abs() < 1e-5);
        let v = table1_potential(&p, &SurfaceModel::gold_drude(), &at(&p, 1e-3), Region::I, Kind::Electric).unwrap();
        assert!((v * 1e-9 + 0.0284).abs() < 1e-4);
        assert!(coefficients(&p, &SurfaceModel::PerfectConductor).is_err());
    }

    #[test]
    fn gold_magnetic_coefficients_by_hand() {
        // values substituted by hand: P = 2.164507, G = 0.01591549, ω̃ = 1e-5
        let p = particle(1.0);
        let c = coefficients(&p, &SurfaceModel::gold_drude()).unwrap();
        let (pp, g, w) = (1.36e16 / p.omega_e, 1e14 / p.omega_e, 1e-5);
        let eta = p.eta;
        let t1 = pp / (w + pp / SQRT_2);
        let t2 = pp * (w + 2.0 * g / PI * (g / w).ln()) / (2.0 * (w * w + g * g));
        let expect = 3.0 * w * eta * pp / 64.0 * (t1 + t2);
        assert!((c.c_m1_drude / expect - 1.0).abs() < 1e-12);
        assert!((t1 - 1.41420).abs() < 1e-4);
        assert!((t2 - 319.20).abs() < 0.01, "{t2}");
    }

    #[test]
    fn plasma_exceeds_drude() {
        let p = particle(1.0);
        let d = coefficients(&p, &SurfaceModel::gold_drude()).unwrap();
        let pl = coefficients(&p, &SurfaceModel::gold_plasma()).unwrap();
        assert!(pl.c_m1_plasma > d.c_m1_drude);
        let pp = 1.36e16 / p.omega_e;
        let w = p.omega_tilde;
        let lead = 3.0 * w * p.eta * pp / 64.0;
        // plasma minus its own γ → 0 Drude limit is the ηS² static piece only
        assert!((pl.c_m1_plasma - pl.c_m1_drude - 3.0 / 64.0 * pp * pp * p.eta).abs() < 1e-12 * pl.c_m1_plasma);
        // and the γ → 0 limit carries the P/(2ω̃) bracket
        assert!((pl.c_m1_drude - lead * (pp / (w + pp / SQRT_2) + pp / (2.0 * w))).abs() < 1e-12 * pl.c_m1_drude);
    }

    #[test]
    fn log_term_vanishes_at_gamma_equal_omega_m() {
        let p = particle(1.0);
        let s = SurfaceModel::Drude { omega_p: 1.36e16, gamma: p.omega_m };
        let c = coefficients(&p, &s).unwrap();
        let pp = 1.36e16 / p.omega_e;
        let w = p.omega_tilde;
        let expect = 3.0 * w * p.eta * pp / 64.0 * (pp / (w + pp / SQRT_2) + pp * w / (4.0 * w * w));
        assert!((c.c_m1_drude / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_edges() {
        assert_eq!(nr_expansion(1.0, 0.5).unwrap(), (0.0, 0.0));
        assert!(nr_expansion(100.0, 0.5).is_err());
        assert!(fresnel_nr_expansion(&SurfaceModel::PerfectConductor, 1.0, 1.0).is_err());
        // Drude at low frequency: (ε−1)ξ² → 0
        let d = SurfaceModel::gold_drude();
        let f = fresnel_nr_expansion(&d, 1e8, 1e3).unwrap();
        assert!(f.r_s.re.abs() < 1e-10);
    }

    #[test]
    fn expansion_accuracy_at_tenth() {
        let rho: f64 = 0.01;
        let eps = 1.0 + 0.01 / (rho * rho);
        let (a, b) = nr_expansion(eps, rho).unwrap();
        let (ea, eb) = reflection_imag(Permittivity::Finite(eps), rho);
        // error is O(param⁴) = 1e-4 with param = 0.1
        assert!((a - ea).abs() < 1e-4 && (b - eb).abs() < 1e-4);
    }

    #[test]
    fn expansion_error_is_fourth_order() {
        let eps = 50.0;
        let err = |param: f64| {
            let rho = param / (eps - 1.0f64).sqrt();
            let (a, b) = nr_expansion(eps, rho).unwrap();
            let (ea, eb) = reflection_imag(Permittivity::Finite(eps), rho);
            (a - ea).abs() + (b - eb).abs()
        };
        let slope = (err(0.2) / err(0.1)).log2();
        assert!((slope - 4.0).abs() < 0.2, "{slope}");
    }

    #[test]
    fn resonance_bracket_at_three() {
        assert_eq!(resonance_bracket(Complex64::new(3.0, 0.0)).re, 4.0);
    }

    #[test]
    fn resonance_forms() {
        // ω_m fixed; pick γ and ω_p so that Q = 10⁸, δ_p = −10²
        let p = particle(100.0);
        let (q, d) = (1e8, -1e2);
        let gamma = p.omega_m / (q + d);
        let s = SurfaceModel::Drude { omega_p: SQRT_2 * q * gamma, gamma };
        let g = at(&p, 1e-3);
        let r = surface_resonance_potential(&p, &s, &g).unwrap();
        assert!((r.q_factor / q - 1.0).abs() < 1e-9 && (r.delta_p / d - 1.0).abs() < 1e-6);
        let pre = 3.0 * p.eta * 100.0 * 101.0 * p.omega_tilde.powi(2) / (64.0 * 1e-3);
        let qd = r.shift_resonant.unwrap();
        assert!((qd / (-pre * 1e6) - 1.0).abs() < 1e-6);
        assert!(((r.shift - qd) / qd).abs() < 1.0 / d.abs());
        assert!(((r.spin_flip_rate / r.spin_flip_rate_resonant.unwrap()) - 1.0).abs() < 0.1);
        // opposite detuning flips the sign
        let s2 = SurfaceModel::Drude { omega_p: SQRT_2 * q * p.omega_m / (q - d), gamma: p.omega_m / (q - d) };
        let r2 = surface_resonance_potential(&p, &s2, &g).unwrap();
        assert!(r2.shift_resonant.unwrap() > 0.0 && qd < 0.0);
        assert!(surface_resonance_potential(&p, &s, &at(&p, 1e5)).is_err());
    }

    proptest! {
        #[test]
        fn coefficients_positive(wp in 0.1f64..100.0, g in 1e-4f64..1.0, s in 0.5f64..1e6) {
            let p = particle(s);
            let d = SurfaceModel::Drude { omega_p: wp * p.omega_e, gamma: g * wp * p.omega_e };
            let c = coefficients(&p, &d).unwrap();
            prop_assert!(c.c_e3_drude > 0.0 && c.c_m1_drude > 0.0 && c.c_m1_plasma > c.c_m1_drude);
        }
    }
}
