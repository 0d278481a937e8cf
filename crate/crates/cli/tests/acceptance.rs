//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//!
//! Criteria:
//! 1. relation-algebra laws on random triples vs a brute-force oracle
//! 2. element vs relational lemma forms agree on all congruence triples
//! 3. Klein four-group suite
//! 4. two-element Boolean algebra suite
//! 5. Z2 falsifiers for the ternary-relation properties
//! 6. two-element implication algebra suite
//! 7. zero ledger violations over the bundled corpus, all exact
//! 8. mutation sensitivity (corrupted table changes the facts)
//! 9. byte-identical JSON reports across runs

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ualgebra_core::congruence::{congruence_lattice, is_distributive, is_modular};
use ualgebra_core::harness::{compute_facts, verify_corpus};
use ualgebra_core::lemmas::{
    check_lemma, element_violation, relational_form_holds, verify_lemma_counterexample,
    LemmaKind, TripleClasses,
};
use ualgebra_core::properties::{
    check_dd, check_eeo_commute, check_pp, check_ppoppo, verify_property_witness,
};
use ualgebra_core::rel::{compose, enumerate_relations, BinRel, RelClass};
use ualgebra_core::terms::{
    find_maltsev, find_pixley, find_quaternary_pq, maltsev_system, pixley_system,
    verify_witnesses, SearchStatus,
};
use ualgebra_core::{corpus, DEFAULT_BUDGET};

fn report(criterion: usize, name: &str, pass: bool) {
    println!(
        "acceptance criterion {}: {} ... {}",
        criterion,
        name,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {} ({}) failed", criterion, name);
}

fn random_rel(rng: &mut ChaCha8Rng, dom: usize, cod: usize) -> BinRel {
    let mut r = BinRel::empty(dom, cod);
    for x in 0..dom {
        for y in 0..cod {
            if rng.gen_bool(0.4) {
                r.set(x, y);
            }
        }
    }
    r
}

/// Oracle composition by direct pair enumeration: (x,z) in SR iff there is a
/// y with (x,y) in R and (y,z) in S.
fn oracle_compose(s: &BinRel, r: &BinRel) -> BinRel {
    let mut out = BinRel::empty(r.dom_size(), s.cod_size());
    for (x, y) in r.pairs() {
        for (y2, z) in s.pairs() {
            if y == y2 {
                out.set(x, z);
            }
        }
    }
    out
}

#[test]
fn criterion_1_relation_algebra_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut ok = true;
    for _ in 0..1000 {
        let a = rng.gen_range(1..=5);
        let b = rng.gen_range(1..=5);
        let c = rng.gen_range(1..=5);
        let d = rng.gen_range(1..=5);
        let r = random_rel(&mut rng, a, b);
        let s = random_rel(&mut rng, b, c);
        let t = random_rel(&mut rng, c, d);
        // compose matches the brute-force oracle
        let sr = compose(&s, &r).unwrap();
        ok &= sr == oracle_compose(&s, &r);
        // associativity: T(SR) = (TS)R
        let lhs = compose(&t, &sr).unwrap();
        let rhs = compose(&compose(&t, &s).unwrap(), &r).unwrap();
        ok &= lhs == rhs;
        // converse anti-homomorphism: (SR)° = R°S°
        ok &= sr.converse() == compose(&r.converse(), &s.converse()).unwrap();
    }
    ok &= start.elapsed().as_secs() < 10;
    report(1, "relation-algebra laws", ok);
}

#[test]
fn criterion_2_lemma_form_agreement() {
    let mut ok = true;
    for alg in corpus::bundled_corpus() {
        let e = enumerate_relations(&alg, RelClass::Congruence, DEFAULT_BUDGET).unwrap();
        for kind in [LemmaKind::Shifting, LemmaKind::Triangular, LemmaKind::Trapezoid] {
            for r in &e.rels {
                for s in &e.rels {
                    let rs = r.meet(s).unwrap();
                    for t in &e.rels {
                        if !rs.leq(t).unwrap() {
                            continue;
                        }
                        let elem = element_violation(kind, r, s, t).is_none();
                        let rel = relational_form_holds(kind, r, s, t).unwrap();
                        ok &= elem == rel;
                    }
                }
            }
        }
    }
    report(2, "element and relational lemma forms agree", ok);
}

#[test]
fn criterion_3_klein_group_suite() {
    let start = Instant::now();
    let alg = corpus::klein4();
    let mut ok = true;

    let lat = congruence_lattice(&alg).unwrap();
    ok &= lat.len() == 5;
    ok &= is_modular(&lat);
    ok &= !is_distributive(&lat);

    let cong = TripleClasses::uniform(RelClass::Congruence);
    let sl = check_lemma(&alg, LemmaKind::Shifting, cong, DEFAULT_BUDGET).unwrap();
    ok &= sl.holds && sl.exhaustive;

    let tl = check_lemma(&alg, LemmaKind::Triangular, cong, DEFAULT_BUDGET).unwrap();
    ok &= !tl.holds && tl.exhaustive;
    match &tl.counterexample {
        Some(cx) => {
            ok &= verify_lemma_counterexample(&alg, LemmaKind::Triangular, cong, cx).unwrap()
        }
        None => ok = false,
    }

    let m = find_maltsev(&alg, DEFAULT_BUDGET).unwrap();
    ok &= m.found() && verify_witnesses(&alg, &maltsev_system(), &m).unwrap();

    ok &= start.elapsed().as_secs() < 5;
    report(3, "Klein four-group suite", ok);
}

#[test]
fn criterion_4_boolean_algebra_suite() {
    let start = Instant::now();
    let alg = corpus::bool2();
    let mut ok = true;

    let p = find_pixley(&alg, DEFAULT_BUDGET).unwrap();
    ok &= p.found() && verify_witnesses(&alg, &pixley_system(), &p).unwrap();

    let dd = check_dd(&alg).unwrap();
    ok &= dd.holds && dd.exhaustive;

    let refl = TripleClasses::uniform(RelClass::ReflexiveCompatible);
    let tpl = check_lemma(&alg, LemmaKind::Trapezoid, refl, DEFAULT_BUDGET).unwrap();
    ok &= tpl.holds && tpl.exhaustive;

    ok &= start.elapsed().as_secs() < 30;
    report(4, "Boolean algebra suite", ok);
}

#[test]
fn criterion_5_abelian_group_falsifiers() {
    let start = Instant::now();
    let alg = corpus::z2();
    let mut ok = true;

    let dd = check_dd(&alg).unwrap();
    ok &= !dd.holds;
    match &dd.witness {
        Some(w) => ok &= verify_property_witness(&alg, "dd", w).unwrap(),
        None => ok = false,
    }

    let pp = check_pp(&alg).unwrap();
    ok &= !pp.holds;
    match &pp.witness {
        Some(w) => ok &= verify_property_witness(&alg, "pp", w).unwrap(),
        None => ok = false,
    }

    ok &= start.elapsed().as_secs() < 10;
    report(5, "Z2 ternary-property falsifiers", ok);
}

#[test]
fn criterion_6_implication_algebra_suite() {
    let alg = corpus::impl2();
    let mut ok = true;

    let pq = find_quaternary_pq(&alg, DEFAULT_BUDGET).unwrap();
    ok &= pq.status == SearchStatus::Found;

    let m = find_maltsev(&alg, DEFAULT_BUDGET).unwrap();
    ok &= m.status == SearchStatus::NotFound;

    let eeo = check_eeo_commute(&alg).unwrap();
    ok &= eeo.holds && eeo.exhaustive;
    let ppo = check_ppoppo(&alg).unwrap();
    ok &= ppo.holds && ppo.exhaustive;
    let perm = ualgebra_core::congruence::permutability(&alg).unwrap();
    ok &= perm.perm3;

    report(6, "implication algebra suite", ok);
}

#[test]
fn criterion_7_full_ledger() {
    let start = Instant::now();
    let mut ok = true;
    for report in verify_corpus(DEFAULT_BUDGET).unwrap() {
        ok &= report.violations.is_empty();
        if report.size <= 4 {
            for (name, f) in &report.facts {
                if !f.exhaustive {
                    eprintln!("inexact fact {} on {}", name, report.algebra);
                    ok = false;
                }
            }
        }
    }
    ok &= start.elapsed().as_secs() < 600;
    report(7, "full corpus ledger", ok);
}

#[test]
fn criterion_8_mutation_sensitivity() {
    let mut bad = corpus::klein4();
    bad.operations[0].table[2] = 0; // 0*2 = 0 instead of 2
    let good = compute_facts(&corpus::klein4(), DEFAULT_BUDGET).unwrap();
    let mutated = compute_facts(&bad, DEFAULT_BUDGET).unwrap();
    // the harness must notice the corruption as fact drift against fixtures
    let drift = good
        .iter()
        .filter(|(k, v)| mutated.get(*k).map(|m| m != *v).unwrap_or(true))
        .count();
    report(8, "mutation sensitivity", drift > 0);
}

#[test]
fn criterion_9_deterministic_reports() {
    let exe = env!("CARGO_BIN_EXE_ualgebra");
    let run = || {
        Command::new(exe)
            .args(["verify", "--name", "klein4", "--json"])
            .output()
            .expect("cli runs")
    };
    let a = run();
    let b = run();
    let ok = a.status.code() == Some(0)
        && b.status.code() == Some(0)
        && !a.stdout.is_empty()
        && a.stdout == b.stdout;
    report(9, "byte-identical verify --json runs", ok);
}
