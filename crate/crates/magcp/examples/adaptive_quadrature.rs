//! The integrators used underneath the potentials, on integrals with known values.

use magcp::quadrature::{integrate_finite, integrate_oscillatory_split, integrate_semi_infinite, QuadratureConfig};

fn main() {
    let cfg = QuadratureConfig::default();

    let r = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), 0.0, &cfg).unwrap();
    report("int_0^inf dx/(1+x^2)", r.value, std::f64::consts::FRAC_PI_2, r.error_estimate, r.evaluations);

    let r = integrate_finite(|x: f64| x.sqrt().ln(), 0.0, 1.0, &cfg).unwrap();
    report("int_0^1 ln(sqrt x)", r.value, -0.5, r.error_estimate, r.evaluations);

    // cos(20k)/sqrt(1-k) on [0,1) then exp(-(k-1))/sqrt(k-1) beyond
    let f = |k: f64| if k < 1.0 { (20.0 * k).cos() / (1.0 - k).sqrt() } else { (1.0 - k).exp() / (k - 1.0).sqrt() };
    let r = integrate_oscillatory_split(f, 1.0, 20.0, &cfg).unwrap();
    // first piece by k = 1 - u^2, second is Gamma(1/2)
    let oracle = integrate_finite(|u: f64| 2.0 * (20.0 * (1.0 - u * u)).cos(), 0.0, 1.0, &cfg).unwrap().value
        + std::f64::consts::PI.sqrt();
    report("oscillatory + evanescent", r.value, oracle, r.error_estimate, r.evaluations);

    // a loose target still reports honestly whether it was met
    let loose = QuadratureConfig { rel_tol: 1e-2, max_subdivisions: 10, ..cfg };
    let r = integrate_finite(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &loose).unwrap();
    println!("sin(1/x), 10 panels: {:.6} +- {:.1e}, converged = {}", r.value, r.error_estimate, r.converged);
}

fn report(name: &str, v: f64, exact: f64, err: f64, n: usize) {
    println!("{name:<28} {v:.15} (error {:.1e}, estimate {err:.1e}, {n} evaluations)", (v - exact).abs());
}
