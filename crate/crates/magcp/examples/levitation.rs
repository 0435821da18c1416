//! Stable levitation points where the spin-driven repulsion balances gravity.

use magcp::materials::SurfaceModel;
use magcp::mechanics::{approx_equilibrium_excited, find_equilibrium, ForceSettings, Mode};
use magcp::params::{build_particle, EnvironmentSpec, ParticleInputs};
use magcp::quadrature::QuadratureConfig;

fn main() {
    let q = QuadratureConfig::default();
    let pc = SurfaceModel::PerfectConductor;
    let z0 = |z: f64, k: f64| z / k * 1e9;

    for s in [1e5, 2e5] {
        let p = build_particle(&ParticleInputs::reference(s)).unwrap();
        let e = find_equilibrium(&p, &pc, &q, &ForceSettings::cp_only(), (0.1, 100.0)).unwrap();
        println!(
            "CP only, S = {s:e}: z = {:.4} ({:.0} nm), quarter-power estimate {:.4}, stable = {}",
            e.z_tilde_eq,
            z0(e.z_tilde_eq, p.k_e),
            e.analytic.unwrap(),
            e.stable
        );
    }

    let p = build_particle(&ParticleInputs::reference(100.0)).unwrap();
    let e = find_equilibrium(&p, &pc, &q, &ForceSettings::default(), (0.1, 100.0)).unwrap();
    println!("with image term, S = 100: z = {:.4}, estimate {:.4}, slope {:.3e}", e.z_tilde_eq, e.analytic.unwrap(), e.slope);

    let p0 = p.with_m_s(0.0).unwrap();
    let set = ForceSettings { mode: Mode::Excited0, ..Default::default() };
    let e = find_equilibrium(&p0, &pc, &q, &set, (0.1, 100.0)).unwrap();
    let approx = approx_equilibrium_excited(&p0, &EnvironmentSpec::default()).unwrap();
    println!("m_S = 0, S = 100: z = {:.4}, closed form {approx:.4}, S+1 ~ S estimate {:.4}", e.z_tilde_eq, e.analytic.unwrap());

    let weak = build_particle(&ParticleInputs::reference(10.0)).unwrap();
    match find_equilibrium(&weak, &pc, &q, &ForceSettings::cp_only(), (0.1, 100.0)) {
        Ok(e) => println!("S = 10: {e:?}"),
        Err(err) => println!("S = 10, CP only: {err}"),
    }
}
