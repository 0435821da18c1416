//! Distance regimes and their closed-form laws against the full integrals.

use magcp::asymptotics::{classify_region, coefficients, table1_potential, Kind, Region};
use magcp::materials::SurfaceModel;
use magcp::params::{build_particle, Geometry, ParticleInputs};
use magcp::potentials::{u_e_ground, u_m_ground_broadband, u_m_static};
use magcp::quadrature::QuadratureConfig;

fn main() {
    let p = build_particle(&ParticleInputs::reference(10.0)).unwrap();
    let q = QuadratureConfig::default();
    let c = coefficients(&p, &SurfaceModel::gold_drude()).unwrap();
    println!("gold: C_e = {:.5}, C_m(Drude) = {:.4e}, C_m(plasma) = {:.4e}", c.c_e3_drude, c.c_m1_drude, c.c_m1_plasma);

    for s in [SurfaceModel::PerfectConductor, SurfaceModel::gold_drude(), SurfaceModel::gold_plasma()] {
        println!("\n{s:?}");
        for z in [1e-3, 3e2, 1e4, 1e7] {
            let g = Geometry::from_z_tilde(&p, z).unwrap();
            let region = classify_region(&p, &s, &g, 10.0).unwrap();
            if region == Region::Crossover {
                println!("  z = {z:e}: crossover");
                continue;
            }
            let e = u_e_ground(&p, &s, &g, &q).unwrap();
            let m = u_m_ground_broadband(&p, &s, &g, &q).unwrap() + u_m_static(&p, &s, &g, &q).unwrap();
            let te = table1_potential(&p, &s, &g, region, Kind::Electric).unwrap();
            let tm = table1_potential(&p, &s, &g, region, Kind::Magnetic).unwrap();
            println!("  z = {z:e} ({region:?}): U_e/law = {:.4}, U_m/law = {:.4}", e / te, m / tm);
        }
    }
}
