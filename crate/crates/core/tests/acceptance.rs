//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness because the mutant switches are
//! process-wide.

use std::process::ExitCode;

use polycat::laws::{find_law, run_law_with, Exec, InstanceGenConfig, LawReport, LAWS};
use polycat::mutation::{self, Mutant};
use polycat::symbolic::{encode, parse_poly_with_inputs};

const SEED: u64 = 42;

fn run(name: &str, cases: usize, size: usize) -> LawReport {
    let law = find_law(name).unwrap_or_else(|| panic!("unknown law {name}"));
    run_law_with(law, &InstanceGenConfig { seed: SEED, max_set_size: size, cases }, Exec::default())
}

fn tally(r: &LawReport, key: &str) -> usize {
    r.tally.get(key).copied().unwrap_or(0)
}

fn summary(reports: &[&LawReport]) -> (bool, String) {
    let ok = reports.iter().all(|r| r.passed());
    let text = reports
        .iter()
        .map(|r| match r.failures.first() {
            None => format!("{}: {} cases", r.law, r.cases),
            Some(f) => format!("{}: {} of {} failed, case {}: {}", r.law, r.failures.len(), r.cases, f.case, f.reason),
        })
        .collect::<Vec<_>>()
        .join("; ");
    (ok, text)
}

fn worked_example() -> (bool, String) {
    let vars: Vec<String> = ["w", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    match parse_poly_with_inputs("x^3y + 2 ; 3x^2z + y", &vars).and_then(|s| encode(&s)) {
        Ok(p) => {
            let (u, m) = (p.mid_src().len(), p.mid_tgt().len());
            (u == 14 && m == 7, format!("|UVar| = {u}, |MSum| = {m}"))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn mutation_sensitivity() -> (bool, String) {
    let cfg = InstanceGenConfig { seed: SEED, max_set_size: 3, cases: 20 };
    let mut ok = true;
    let mut parts = Vec::new();
    for m in Mutant::ALL {
        mutation::set_active(Some(m));
        let caught: Vec<&str> = LAWS
            .iter()
            .filter(|l| {
                run_law_with(l, &cfg, Exec::Sequential).failures.iter().any(|f| !f.counterexample.is_null())
            })
            .map(|l| l.name)
            .collect();
        mutation::set_active(None);
        ok &= !caught.is_empty();
        parts.push(format!("{} caught by [{}]", m.name(), caught.join(", ")));
    }
    // The clean build must still pass what caught the mutants.
    let clean = LAWS.iter().all(|l| run_law_with(l, &cfg, Exec::Sequential).passed());
    parts.push(format!("clean build {}", if clean { "passes" } else { "fails" }));
    (ok && clean, parts.join("; "))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, bool, String)> = Vec::new();

    let (ok, text) = worked_example();
    results.push((1, "worked example cardinalities", ok, text));

    let r = run("oracle-agreement", 200, 3);
    let (ok, text) = summary(&[&r]);
    results.push((2, "oracle agreement", ok, text));

    let r = run("adjunctions", 100, 4);
    let (ok, text) = summary(&[&r]);
    results.push((3, "adjunction hom-set bijections", ok && tally(&r, "exhaustive hom-sets") > 0, text));

    let r = run("delta-criterion", 100, 3);
    let n = tally(&r, "non-terminal candidates");
    let (ok, text) = summary(&[&r]);
    results.push((4, "δ-criterion both directions", ok && n >= 10, format!("{text}, {n} non-terminal candidates")));

    let cc = run("comp-cancel", 50, 3);
    let cube = run("cube", 50, 3);
    let n = tally(&cc, "non-terminal candidates") + tally(&cube, "non-terminal candidates");
    let (ok, text) = summary(&[&cc, &cube]);
    results.push((5, "composition/cancellation and cube", ok && n > 0, text));

    let units = run("units", 100, 3);
    let assoc = run("associativity", 50, 3);
    let pent = run("pentagon", 50, 3);
    let (ok, text) = summary(&[&units, &assoc, &pent]);
    results.push((6, "bicategory laws", ok, text));

    let r = run("coherence", 50, 3);
    let (ok, text) = summary(&[&r]);
    results.push((7, "homomorphism coherence", ok, text));

    let f = run("faithful", 50, 3);
    let c = run("conservative", 50, 3);
    let (ok, text) = summary(&[&f, &c]);
    results.push((8, "faithful and conservative", ok && tally(&c, "invertible instances") > 0, text));

    let r = run("hom-pullback", 50, 3);
    let (ok, text) = summary(&[&r]);
    results.push((9, "hom pullbacks", ok && tally(&r, "doubled squares") > 0, text));

    let r = run("substitution", 50, 3);
    let (ok, text) = summary(&[&r]);
    results.push((10, "composition as substitution", ok, text));

    let (ok, text) = mutation_sensitivity();
    results.push((11, "mutation sensitivity", ok, text));

    let mut all = true;
    for (n, name, ok, text) in &results {
        all &= ok;
        println!("criterion {n:>2} {}: {name}: {text}", if *ok { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
