//! Permittivities and Fresnel amplitudes of the three surface models.

use magcp::materials::{fresnel_imag_axis, fresnel_real_freq, permittivity_imag_axis, SurfaceModel};
use magcp::params::consts::C;

fn main() {
    let models = [SurfaceModel::PerfectConductor, SurfaceModel::gold_drude(), SurfaceModel::gold_plasma()];
    let omega_e = 2.0 * std::f64::consts::PI * 1e15;
    let kappa = 2.0 * omega_e / C;

    println!("imaginary axis, kappa_perp = 2 omega_e/c");
    println!("{:>22} {:>10} {:>14} {:>14} {:>14}", "model", "xi/omega_e", "eps(i xi)", "r_s", "r_p");
    for m in &models {
        for x in [0.0, 1e-5, 0.1, 1.0] {
            let xi = x * omega_e;
            let eps = permittivity_imag_axis(m, xi).map(|e| format!("{e:?}")).unwrap_or_default();
            let r = fresnel_imag_axis(m, kappa, xi).unwrap();
            println!("{:>22} {x:>10.0e} {:>14.14} {:>14.6e} {:>14.6e}", name(m), eps, r.r_s.re, r.r_p.re);
        }
    }

    // propagating (k_par < omega/c) and evanescent (k_par > omega/c) sectors at omega_m
    let omega_m = 2.0 * std::f64::consts::PI * 1e10;
    println!("\nreal frequency omega_m, gold Drude");
    for p in [0.0, 0.5, 0.999, 1.001, 10.0, 1e4] {
        let r = fresnel_real_freq(&SurfaceModel::gold_drude(), p * omega_m / C, omega_m).unwrap();
        println!("  c k_par/omega = {p:>8}: r_s = {:.6e}, r_p = {:.6e}", r.r_s, r.r_p);
    }
}

fn name(m: &SurfaceModel) -> &'static str {
    match m {
        SurfaceModel::PerfectConductor => "perfect conductor",
        SurfaceModel::Drude { .. } => "Drude gold",
        SurfaceModel::Plasma { .. } => "plasma gold",
    }
}
