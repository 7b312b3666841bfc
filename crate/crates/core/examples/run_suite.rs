//! Running builtin suites and reading the report.

use qonsager::verify::{self, Mode, RunConfig};

fn main() {
    let cfg = RunConfig { mode: Mode::Symbolic, sites: Some(3), timings: false, ..Default::default() };
    let rep = verify::run_suite_text("builtin:negative-controls", verify::CONTROLS_SUITE, &cfg).unwrap();
    print!("{}", rep.to_text());
    println!("exit code {}", rep.exit_code());

    let json = rep.to_json();
    assert_eq!(verify::Report::from_json(&json).unwrap().to_json(), json);

    let generic = RunConfig { mode: Mode::Generic, seed: Some(7), sites: Some(4), timings: false, ..Default::default() };
    let text = "check hopf { tier = core\n prefix = hopf.uq }";
    let rep = verify::run_suite_text("hopf", text, &generic).unwrap();
    for c in &rep.checks {
        println!("{} {}", c.id, c.status.name());
    }
    println!("quantum affine relations at a random point, 4 sites: {} checks, passed = {}", rep.checks.len(), rep.passed());
}
