//! A configuration-driven sweep rendered as CSV, as the binary would write it.

use magcp::job::{cmd_force, cmd_threshold, render, JobConfig};

fn main() {
    let config = JobConfig::from_json(
        r#"{
            "particle": {"spin": 100000},
            "surface": {"model": "perfect_conductor"},
            "grid": {"log": {"start": 0.01, "stop": 100, "n": 9}},
            "include_static": false,
            "output": {"precision": 6}
        }"#,
    )
    .unwrap();
    let job = config.resolve().unwrap();
    let out = cmd_force(&job).unwrap();
    print!("{}", render(&out, Some(&config), &config.output));
    println!("exit code would be {}", out.status.exit_code());

    let mut t = config.clone();
    t.surface = magcp::materials::SurfaceModel::gold_plasma();
    t.grid = Some("log:0.1:10:3".parse().unwrap());
    let out = cmd_threshold(&t.resolve().unwrap()).unwrap();
    print!("{}", render(&out, Some(&t), &t.output));
}
