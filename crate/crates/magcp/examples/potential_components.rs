//! Ground-state shift components versus distance for each surface model.

use magcp::materials::SurfaceModel;
use magcp::params::{build_particle, Geometry, ParticleInputs};
use magcp::potentials::potential_breakdown;
use magcp::quadrature::QuadratureConfig;

fn main() {
    let p = build_particle(&ParticleInputs::reference(100.0)).unwrap();
    let q = QuadratureConfig::default();
    println!("S = 100, eta = {:.4e}, omega_m/omega_e = {:.0e}; shifts in hbar Gamma0", p.eta, p.omega_tilde);
    for (name, s) in [
        ("perfect conductor", SurfaceModel::PerfectConductor),
        ("Drude gold", SurfaceModel::gold_drude()),
        ("plasma gold", SurfaceModel::gold_plasma()),
    ] {
        println!("\n{name}");
        println!("{:>8} {:>13} {:>13} {:>13} {:>13}", "z", "U_e", "U_m", "U_m^z", "total");
        for z in [1e-2, 1e-1, 1.0, 10.0, 100.0] {
            let b = potential_breakdown(&p, &s, &Geometry::from_z_tilde(&p, z).unwrap(), &q, false).unwrap();
            println!("{z:>8} {:>13.5e} {:>13.5e} {:>13.5e} {:>13.5e}", b.u_e_minus, b.u_m_minus, b.u_m_z, b.total_ground);
        }
    }
}
