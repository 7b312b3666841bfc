//! Golden files under `goldens/`. Regenerate with `UPDATE_GOLDENS=1 cargo test --test goldens`.

use std::path::PathBuf;

use qonsager::coideal::{export_tables, presentation, Algebra, Variant};
use qonsager::dsl;
use qonsager::verify::{self, builtin_sources, emit_operator, Mode, RunConfig};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("goldens")
}

fn check(rel: &str, actual: &str) {
    let path = root().join(rel);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "golden {rel} differs");
}

#[test]
fn presentation_goldens() {
    for alg in Algebra::ALL {
        for v in [Variant::Printed, Variant::Amended] {
            let p = presentation(alg, v);
            let text = p.to_suite_text();
            // The exported text must itself parse back to the same declaration.
            let back = dsl::parse_suite(&text).unwrap();
            assert_eq!(back.algebras[0], p.decl());
            check(&format!("presentations/{}.{}.suite", alg.name(), v.name()), &text);
        }
    }
}

#[test]
fn table_goldens() {
    for alg in Algebra::ALL {
        for v in [Variant::Printed, Variant::Amended] {
            check(&format!("tables/{}.{}.txt", alg.name(), v.name()), &export_tables(alg, v).unwrap());
        }
    }
}

#[test]
fn formatted_suite_goldens() {
    for (name, text) in builtin_sources() {
        let s = dsl::parse_suite(text).unwrap();
        let formatted = dsl::format_suite(&s);
        assert_eq!(dsl::parse_suite(&formatted).unwrap(), s, "{name}");
        assert_eq!(dsl::format_suite(&dsl::parse_suite(&formatted).unwrap()), formatted, "{name}");
        check(&format!("suites/{name}.suite"), &formatted);
    }
}

#[test]
fn emit_goldens() {
    for label in ["psi.W0", "psi.W1", "hamiltonian", "letter.e0", "psi.gl2inv.Y"] {
        let op = emit_operator(label, 2).unwrap();
        check(&format!("emit/{label}.N2.coo"), &op.matrix.to_coordinate_text());
    }
}

#[test]
fn report_golden() {
    let cfg = RunConfig { mode: Mode::Symbolic, sites: Some(3), timings: false, threads: 1, ..Default::default() };
    let rep = verify::run_suite_text("builtin:negative-controls", verify::CONTROLS_SUITE, &cfg).unwrap();
    check("reports/negative-controls.N3.json", &rep.to_json());
    check("reports/negative-controls.N3.txt", &rep.to_text());
}
