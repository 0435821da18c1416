//! Smallest spin that makes the total force repulsive at a given distance.

use magcp::materials::SurfaceModel;
use magcp::mechanics::spin_threshold;
use magcp::params::{build_particle, EnvironmentSpec, Geometry, ParticleInputs};
use magcp::quadrature::QuadratureConfig;

fn main() {
    let p = build_particle(&ParticleInputs::reference(1.0)).unwrap();
    let q = QuadratureConfig::default();
    let none = EnvironmentSpec::no_gravity();
    let earth = EnvironmentSpec::default();

    let near = Geometry::from_z_tilde(&p, 1e-3).unwrap();
    let a = spin_threshold(&p, &SurfaceModel::PerfectConductor, &near, &q, true, &none).unwrap();
    let b = spin_threshold(&p, &SurfaceModel::PerfectConductor, &near, &q, false, &none).unwrap();
    println!("perfect conductor, near field, no gravity:");
    println!("  with image term {:.3}   (sqrt(1/2 eta) = {:.3})", a.spin, (0.5 / p.eta).sqrt());
    println!("  without         {:.1}   (1/eta = {:.1})", b.spin, 1.0 / p.eta);

    let g = Geometry::new(&p, 10e-9).unwrap();
    for (name, s) in [("Drude gold", SurfaceModel::gold_drude()), ("plasma gold", SurfaceModel::gold_plasma())] {
        let t = spin_threshold(&p, &s, &g, &q, true, &earth).unwrap();
        let t0 = spin_threshold(&p, &s, &g, &q, true, &none).unwrap();
        println!("{name} at 10 nm: S = {:.3e} with gravity, {:.3e} without", t.spin, t0.spin);
        println!("  force = {:.3e} S^2 + {:.3e} S + {:.3e}", t.polynomial.b, t.polynomial.a + t.polynomial.g, t.polynomial.c);
    }
}
