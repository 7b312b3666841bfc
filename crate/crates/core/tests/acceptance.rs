//! Acceptance run: one line per criterion, then a check that the failing
//! criteria are exactly the documented set. Criteria that test a printed
//! formula use the printed variant wherever one is catalogued; the amended
//! forms are exercised by `builtin:all`.

use std::collections::BTreeSet;
use std::time::Instant;

use qonsager::coideal::{specialization_table, Case, Variant};
use qonsager::verify::{self, catalog, run_entries, CatalogEntry, CheckResult, Mode, RunConfig, Status, Tier};

/// Criteria whose printed claims the harness refutes; see the decisions ledger.
const EXPECTED_RED: [u32; 5] = [2, 5, 6, 7, 9];

const SEED: u64 = 20240611;

struct Outcome {
    failing: Vec<String>,
    total: usize,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failing: Vec::new(), total: 0, note: String::new() }
    }

    fn absorb(&mut self, rs: &[CheckResult], want: Status) {
        for r in rs {
            self.total += 1;
            if r.status != want {
                let n = r.params.get("sites").and_then(|v| v.as_u64()).map_or(String::new(), |n| format!("@N={n}"));
                self.failing.push(format!("{}{}", r.id, n));
            }
        }
    }
}

fn cfg(mode: Mode, sites: Option<usize>) -> RunConfig {
    RunConfig { mode, seed: (mode == Mode::Generic).then_some(SEED), sites, timings: false, ..Default::default() }
}

fn select(pred: impl Fn(&CatalogEntry) -> bool) -> Vec<CatalogEntry> {
    catalog().into_iter().filter(|e| pred(e)).collect()
}

/// The printed variant of a check when one exists, else the check itself.
fn printed(base: &[CatalogEntry]) -> Vec<CatalogEntry> {
    let all = catalog();
    base.iter()
        .map(|e| all.iter().find(|p| p.id == format!("{}.printed", e.id)).cloned().unwrap_or_else(|| e.clone()))
        .collect()
}

fn run_at(o: &mut Outcome, entries: &[CatalogEntry], mode: Mode, sites: impl IntoIterator<Item = usize>) {
    for n in sites {
        o.absorb(&run_entries(entries, &cfg(mode, Some(n))), Status::Pass);
    }
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let es = select(|e| e.id.starts_with("hopf.") && e.tier == Tier::Core);
    run_at(&mut o, &es, Mode::Symbolic, 1..=4);
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let base = select(|e| {
        e.id.starts_with("rel.") && e.tier == Tier::Core && !e.id.ends_with(".counit")
    });
    let es = printed(&base);
    run_at(&mut o, &es, Mode::Symbolic, [2]);
    run_at(&mut o, &es, Mode::Generic, [3, 4]);
    o
}

fn c3() -> Outcome {
    let mut o = Outcome::new();
    run_at(&mut o, &select(|e| e.id == "chain.boundary-bracket"), Mode::Symbolic, 2..=6);
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    run_at(&mut o, &select(|e| e.id == "chain.local-gamma"), Mode::Symbolic, 3..=5);
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    // Strict support for every generator of every pairing, and the closed
    // forms with the sign given for both W0 and W1.
    let es = select(|e| {
        e.id.starts_with("sym.")
            && e.tier != Tier::Control
            && !e.id.ends_with(".anchored")
            && !e.id.ends_with(".e0e1")
            && e.id != "sym.generic.W1"
    });
    run_at(&mut o, &es, Mode::Symbolic, 3..=5);
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let base = select(|e| e.id.starts_with("desc.") && e.tier == Tier::Core);
    run_at(&mut o, &printed(&base), Mode::Symbolic, 2..=3);
    o
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let mut counts = Vec::new();
    let mut es = Vec::new();
    for case in [Case::Triangular, Case::Diagonal, Case::SpecialB] {
        let n = specialization_table(case, Variant::Printed).unwrap().len();
        counts.push(format!("{}={}", case, n));
        let base = select(|e| e.case == Some(case) && e.id.starts_with("spec.") && e.tier == Tier::Core);
        assert_eq!(base.len(), n, "{case}");
        es.extend(printed(&base));
    }
    run_at(&mut o, &es, Mode::Symbolic, 2..=3);
    // Variant readings must produce a definite verdict, not an error.
    let variants = select(|e| e.id.starts_with("spec.") && e.tier == Tier::Open);
    let rs = run_entries(&variants, &cfg(Mode::Symbolic, Some(3)));
    let mut verdicts = Vec::new();
    for r in &rs {
        o.total += 1;
        if r.status == Status::Error {
            o.failing.push(format!("{} (error)", r.id));
        }
        verdicts.push(format!("{}={}", r.id.trim_start_matches("spec."), r.status.name()));
    }
    o.note = format!("tables {}; variants {}", counts.join(" "), verdicts.join(" "));
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    run_at(&mut o, &select(|e| e.id == "chain.spin-reversal"), Mode::Symbolic, 2..=5);
    o
}

fn c9() -> Outcome {
    let mut o = Outcome::new();
    let base = select(|e| e.id.starts_with("coideal.") && e.tier == Tier::Core);
    o.absorb(&run_entries(&printed(&base), &cfg(Mode::Symbolic, None)), Status::Pass);
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::new();
    let es = select(|e| e.id.starts_with("classical.") && e.tier == Tier::Core);
    run_at(&mut o, &es, Mode::Symbolic, [1, 2]);
    o
}

fn c11() -> Outcome {
    let mut o = Outcome::new();
    let es = select(|e| e.tier == Tier::Control);
    o.absorb(&run_entries(&es, &cfg(Mode::Symbolic, Some(3))), Status::Fail);
    let rep = verify::run_suite_text("builtin:negative-controls", verify::CONTROLS_SUITE, &cfg(Mode::Symbolic, Some(3))).unwrap();
    o.total += 1;
    if rep.exit_code() != 1 {
        o.failing.push(format!("suite exit code {}", rep.exit_code()));
    }
    o
}

fn c12() -> Outcome {
    let mut o = Outcome::new();
    o.absorb(&run_entries(&select(|e| e.id == "dsl.roundtrip" || e.id == "dsl.spans"), &cfg(Mode::Symbolic, None)), Status::Pass);
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qonsager::cli::run(["qonsager", "verify", "builtin:all", "--sites", "3", "--mode", "symbolic"], &mut out, &mut err);
    let secs = start.elapsed().as_secs_f64();
    o.total += 1;
    if code != 0 || secs >= 600.0 {
        o.failing.push(format!("verify builtin:all exit {code} in {secs:.1}s"));
    }
    o.note = format!("verify builtin:all --sites 3: exit {code} in {secs:.1}s");
    o
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "quantum affine relations in chain representations, N=1..4", c1),
        (2, "algebra relations under the image maps, N=2 symbolic, N=3,4 generic", c2),
        (3, "boundary bracket closed form, N=2..6", c3),
        (4, "local bulk identity and diagonal lemmas, N=3..5", c4),
        (5, "Hamiltonian symmetry with far-end support and closed forms, N=3..5", c5),
        (6, "descendant Chevalley forms equal polynomial forms, N=2,3", c6),
        (7, "specialization tables, N=2,3, and variant verdicts", c7),
        (8, "spin-reversal duality, N=2..5", c8),
        (9, "comodule axioms and psi = (id x E) delta", c9),
        (10, "classical limit automorphisms", c10),
        (11, "negative controls fail", c11),
        (12, "suite language round trip, spans, builtin:all run", c12),
    ];
    let mut red = BTreeSet::new();
    for (k, title, f) in criteria {
        let o = f();
        let ok = o.failing.is_empty();
        if !ok {
            red.insert(k);
        }
        let mut line = format!("criterion {k:>2}: {} {title} [{} checks]", if ok { "PASS" } else { "FAIL" }, o.total);
        if !ok {
            let shown: Vec<&str> = o.failing.iter().take(12).map(String::as_str).collect();
            let more = o.failing.len().saturating_sub(shown.len());
            line.push_str(&format!(" failing {}: {}", o.failing.len(), shown.join(", ")));
            if more > 0 {
                line.push_str(&format!(", +{more} more"));
            }
        }
        if !o.note.is_empty() {
            line.push_str(&format!(" ({})", o.note));
        }
        println!("{line}");
    }
    let expected: BTreeSet<u32> = EXPECTED_RED.into_iter().collect();
    println!("red criteria: {:?}; documented: {:?}", red, expected);
    if red != expected {
        eprintln!("acceptance outcome differs from the documented set");
        std::process::exit(1);
    }
}
