//! Force components, the analytic derivative against finite differences, and
//! the magnetic to electric ratio that sets the repulsion threshold.

use magcp::materials::SurfaceModel;
use magcp::mechanics::{force_breakdown, force_breakdown_fd, ForceSettings};
use magcp::params::{build_particle, Geometry, ParticleInputs};
use magcp::quadrature::QuadratureConfig;

fn main() {
    let p = build_particle(&ParticleInputs::reference(1e5)).unwrap();
    let q = QuadratureConfig::default();
    let s = SurfaceModel::PerfectConductor;
    let set = ForceSettings::cp_only();
    println!("S = 1e5 over a perfect conductor; eta S = {:.2}, eta S/omega~ = {:.3e}", p.eta * p.spin, p.eta * p.spin / p.omega_tilde);
    println!("{:>8} {:>13} {:>13} {:>13} {:>10}", "z", "F_e", "F_m", "F_gravity", "F_m/|F_e|");
    for z in [1e-3, 1e-1, 1.0, 10.0, 1e3, 1e7] {
        let g = Geometry::from_z_tilde(&p, z).unwrap();
        let f = force_breakdown(&p, &s, &g, &q, &set).unwrap();
        println!("{z:>8.0e} {:>13.5e} {:>13.5e} {:>13.5e} {:>10.3e}", f.f_e, f.f_m_minus, f.f_gravity, f.f_m_minus / f.f_e.abs());
    }

    let g = Geometry::from_z_tilde(&p, 1.0).unwrap();
    let a = force_breakdown(&p, &SurfaceModel::gold_drude(), &g, &q, &set).unwrap();
    let b = force_breakdown_fd(&p, &SurfaceModel::gold_drude(), &g, &q, &set).unwrap();
    println!("\nDrude gold at z = 1: F_e {:.10e} vs difference {:.10e}", a.f_e, b.f_e);
}
