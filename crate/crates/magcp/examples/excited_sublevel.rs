//! The m_S = 0 sublevel: resonant shift, spin-flip rate and the surface-plasmon
//! enhancement near a Drude metal.

use magcp::asymptotics::surface_resonance_potential;
use magcp::materials::SurfaceModel;
use magcp::params::{build_particle, Geometry, ParticleInputs};
use magcp::potentials::{delta_gamma_e, delta_gamma_m, u_m0_pc_closed, u_m_excited0, u_m_excited0_decomposed};
use magcp::quadrature::QuadratureConfig;

fn main() {
    let p = build_particle(&ParticleInputs::reference(100.0)).unwrap().with_m_s(0.0).unwrap();
    let q = QuadratureConfig::default();
    let pc = SurfaceModel::PerfectConductor;

    println!("perfect conductor, S = 100, m_S = 0");
    for a in [1e-3, 0.1, 1.0, 10.0] {
        let g = Geometry::from_z_tilde(&p, a / p.omega_tilde).unwrap();
        let u = u_m_excited0(&p, &pc, &g, &q).unwrap();
        let rate = delta_gamma_m(&p, &pc, &g, &q, 0.0).unwrap();
        println!("  omega~ z = {a:>5}: U = {u:.6e} (closed form {:.6e}), dGamma_m = {rate:.4e}", u_m0_pc_closed(&p, &g));
    }
    let g = Geometry::from_z_tilde(&p, 1e-3 / p.omega_tilde).unwrap();
    let d = u_m_excited0_decomposed(&p, &pc, &g, &q).unwrap();
    println!("  off-resonant terms {:.3e} + {:.3e} cancel; resonant {:.6e}", d.off_resonant_raising, d.off_resonant_lowering, d.resonant);
    println!("  dGamma_e at z = 0.01: {:.6}", delta_gamma_e(&p, &pc, &Geometry::from_z_tilde(&p, 0.01).unwrap(), &q).unwrap());

    // a Drude metal tuned so that omega_m sits 100 linewidths below omega_p/sqrt 2
    let (qf, delta) = (1e4, -1e2);
    let gamma = p.omega_m / (qf + delta);
    let s = SurfaceModel::Drude { omega_p: std::f64::consts::SQRT_2 * qf * gamma, gamma };
    let g = Geometry::from_z_tilde(&p, 1e-3).unwrap();
    let r = surface_resonance_potential(&p, &s, &g).unwrap();
    let u = u_m_excited0(&p, &s, &g, &q).unwrap();
    let rate = delta_gamma_m(&p, &s, &g, &q, 0.0).unwrap();
    println!("\nnear the surface plasmon: Q = {:.0}, delta_p = {:.1}", r.q_factor, r.delta_p);
    println!("  shift: integral {u:.6e}, non-retarded {:.6e}, Q/delta form {:.6e}", r.shift, r.shift_resonant.unwrap());
    println!("  rate:  integral {rate:.6e}, non-retarded {:.6e}, Q/delta^2 form {:.6e}", r.spin_flip_rate, r.spin_flip_rate_resonant.unwrap());
}
