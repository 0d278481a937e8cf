//! Cross-validation harness: computes the full fact vector for an algebra
//! and checks every ledger entry (known implications and equivalences among
//! the facts) against it.
//!
//! Ledger entries are per-algebra theorems, so a violation on any input
//! indicates a defect in at least one decision procedure. Entries touching a
//! fact whose verdict is not exact are reported as `conditional` rather than
//! judged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::FiniteAlgebra;
use crate::congruence::{congruence_lattice, is_distributive, is_modular, permutability};
use crate::error::Result;
use crate::lemmas::{
    check_lemma, check_majority_inequality, LemmaKind, TripleClasses,
};
use crate::properties::{
    check_dd, check_difunctional_all, check_eeo_commute, check_positive_are_equiv,
    check_pp, check_ppoppo, check_refl_symmetric, PropertyVerdict,
};
use crate::rel::RelClass;
use crate::terms::{
    find_lipparini_rs, find_majority, find_maltsev, find_pixley, find_quaternary_pq,
    find_quaternary_pqx, SearchStatus, TermSearchResult,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactOutcome {
    pub value: bool,
    /// True iff the verdict is exact rather than budget- or sample-limited.
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

pub type FactVector = BTreeMap<String, FactOutcome>;

fn term_outcome(res: &TermSearchResult) -> FactOutcome {
    let witness = if res.found() {
        Some(json!(res
            .witnesses
            .iter()
            .map(|w| {
                json!({
                    "unknown": w.unknown,
                    "coords": w.coords,
                    "values": w.values,
                    "term": w.term.as_ref().map(|t| t.display()),
                })
            })
            .collect::<Vec<_>>()))
    } else {
        None
    };
    FactOutcome {
        value: res.found(),
        exhaustive: res.status != SearchStatus::Inconclusive,
        witness,
    }
}

fn property_outcome(v: &PropertyVerdict) -> FactOutcome {
    FactOutcome {
        value: v.holds,
        exhaustive: v.exhaustive,
        witness: v.witness.as_ref().map(|w| json!(w)),
    }
}

const LEMMA_FACTS: [(&str, LemmaKind); 3] = [
    ("sl", LemmaKind::Shifting),
    ("tl", LemmaKind::Triangular),
    ("tpl", LemmaKind::Trapezoid),
];

fn lemma_classes() -> Vec<(&'static str, TripleClasses)> {
    vec![
        ("cong", TripleClasses::uniform(RelClass::Congruence)),
        ("refl", TripleClasses::uniform(RelClass::ReflexiveCompatible)),
        (
            "refl_eq",
            TripleClasses {
                r: RelClass::ReflexiveCompatible,
                s: RelClass::Congruence,
                t: RelClass::ReflexiveCompatible,
            },
        ),
        (
            "pos",
            TripleClasses {
                r: RelClass::ReflexivePositiveCompatible,
                s: RelClass::ReflexiveCompatible,
                t: RelClass::ReflexivePositiveCompatible,
            },
        ),
    ]
}

/// Computes every fact the ledger references.
pub fn compute_facts(alg: &FiniteAlgebra, budget: usize) -> Result<FactVector> {
    let mut facts = FactVector::new();

    for (name, res) in [
        ("maltsev", find_maltsev(alg, budget)?),
        ("pixley", find_pixley(alg, budget)?),
        ("majority_term", find_majority(alg, budget)?),
        ("quaternary_pq", find_quaternary_pq(alg, budget)?),
        ("quaternary_pqx", find_quaternary_pqx(alg, budget)?),
        ("lipparini_rs", find_lipparini_rs(alg, budget)?),
    ] {
        facts.insert(name.into(), term_outcome(&res));
    }

    let perm = permutability(alg)?;
    facts.insert(
        "perm2".into(),
        FactOutcome {
            value: perm.perm2,
            exhaustive: true,
            witness: perm.perm2_witness.map(|w| json!(w)),
        },
    );
    facts.insert(
        "perm3".into(),
        FactOutcome {
            value: perm.perm3,
            exhaustive: true,
            witness: perm.perm3_witness.map(|w| json!(w)),
        },
    );

    let lat = congruence_lattice(alg)?;
    facts.insert(
        "modular".into(),
        FactOutcome {
            value: is_modular(&lat),
            exhaustive: true,
            witness: None,
        },
    );
    facts.insert(
        "distributive".into(),
        FactOutcome {
            value: is_distributive(&lat),
            exhaustive: true,
            witness: None,
        },
    );

    for (suffix, classes) in lemma_classes() {
        for (prefix, kind) in LEMMA_FACTS {
            let v = check_lemma(alg, kind, classes, budget)?;
            facts.insert(
                format!("{}_{}", prefix, suffix),
                FactOutcome {
                    value: v.holds,
                    exhaustive: v.exhaustive,
                    witness: v.counterexample.as_ref().map(|c| json!(c)),
                },
            );
        }
    }

    let mj = check_majority_inequality(alg, RelClass::ReflexiveCompatible, budget)?;
    facts.insert(
        "majority_inequality".into(),
        FactOutcome {
            value: mj.holds,
            exhaustive: mj.exhaustive,
            witness: mj.counterexample.as_ref().map(|c| json!(c)),
        },
    );

    facts.insert(
        "refl_symmetric".into(),
        property_outcome(&check_refl_symmetric(alg)?),
    );
    facts.insert(
        "difunctional_all".into(),
        property_outcome(&check_difunctional_all(alg)?),
    );
    facts.insert(
        "eeo_commute".into(),
        property_outcome(&check_eeo_commute(alg)?),
    );
    facts.insert("ppoppo".into(), property_outcome(&check_ppoppo(alg)?));
    facts.insert("dd".into(), property_outcome(&check_dd(alg)?));
    facts.insert("pp".into(), property_outcome(&check_pp(alg)?));
    facts.insert(
        "positive_are_equiv".into(),
        property_outcome(&check_positive_are_equiv(alg, budget)?),
    );

    Ok(facts)
}

#[derive(Debug, Clone)]
pub enum LedgerRule {
    /// hypotheses all true forces conclusions all true
    Implication {
        hypotheses: Vec<&'static str>,
        conclusions: Vec<&'static str>,
    },
    /// hypotheses all true forces the facts to share one truth value
    Equivalence {
        hypotheses: Vec<&'static str>,
        facts: Vec<&'static str>,
    },
}

#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub id: &'static str,
    pub rule: LedgerRule,
}

fn imp(
    id: &'static str,
    hypotheses: &[&'static str],
    conclusions: &[&'static str],
) -> LedgerEntry {
    LedgerEntry {
        id,
        rule: LedgerRule::Implication {
            hypotheses: hypotheses.to_vec(),
            conclusions: conclusions.to_vec(),
        },
    }
}

fn equiv(id: &'static str, hypotheses: &[&'static str], facts: &[&'static str]) -> LedgerEntry {
    LedgerEntry {
        id,
        rule: LedgerRule::Equivalence {
            hypotheses: hypotheses.to_vec(),
            facts: facts.to_vec(),
        },
    }
}

/// The cross-validation ledger. Every entry is a theorem about a single
/// finite algebra's compatible relations, congruences and term operations.
pub fn ledger() -> Vec<LedgerEntry> {
    vec![
        imp("L1", &["maltsev"], &["refl_symmetric", "difunctional_all", "perm2"]),
        imp("L2", &["quaternary_pq"], &["eeo_commute", "ppoppo", "perm3"]),
        imp("L3a", &["tpl_cong"], &["sl_cong", "tl_cong"]),
        imp("L3b", &["tpl_refl"], &["sl_refl", "tl_refl"]),
        imp("L3c", &["tpl_refl_eq"], &["sl_refl_eq", "tl_refl_eq"]),
        imp("L3d", &["tpl_pos"], &["sl_pos", "tl_pos"]),
        equiv("L4", &["perm2"], &["tl_cong", "tpl_cong", "distributive"]),
        imp("L5", &["quaternary_pq", "tl_cong"], &["tpl_cong"]),
        equiv("L6", &["perm3"], &["tpl_cong", "distributive"]),
        imp("L7", &["majority_term"], &["majority_inequality", "tpl_cong"]),
        imp("L8", &["maltsev", "distributive"], &["tl_refl", "tpl_refl"]),
        imp("L9", &["pixley"], &["dd"]),
        imp("L10", &["dd"], &["difunctional_all"]),
        imp("L11", &["lipparini_rs"], &["pp"]),
        imp("L12", &["pp"], &["ppoppo"]),
        imp("L13", &["quaternary_pq"], &["positive_are_equiv"]),
        imp("L14", &["modular"], &["sl_cong"]),
        imp("L15a", &["perm2"], &["perm3"]),
        imp("L15b", &["distributive"], &["modular"]),
        imp("L15c", &["pixley"], &["maltsev", "majority_term"]),
        imp("L15d", &["maltsev"], &["quaternary_pq"]),
        equiv("L16", &[], &["quaternary_pqx", "lipparini_rs"]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LedgerStatus {
    Pass,
    Violated,
    /// Some referenced fact is not exact; the entry is not judged.
    Conditional,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerEntryResult {
    pub id: String,
    pub status: LedgerStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<String>,
}

fn get<'a>(facts: &'a FactVector, name: &str) -> &'a FactOutcome {
    facts
        .get(name)
        .unwrap_or_else(|| panic!("ledger references unknown fact `{}`", name))
}

pub fn evaluate_entry(entry: &LedgerEntry, facts: &FactVector) -> LedgerEntryResult {
    let (hypotheses, involved): (&[&str], Vec<&str>) = match &entry.rule {
        LedgerRule::Implication {
            hypotheses,
            conclusions,
        } => (
            hypotheses,
            hypotheses.iter().chain(conclusions).copied().collect(),
        ),
        LedgerRule::Equivalence { hypotheses, facts } => (
            hypotheses,
            hypotheses.iter().chain(facts).copied().collect(),
        ),
    };
    if involved.iter().any(|f| !get(facts, f).exhaustive) {
        let vague: Vec<&str> = involved
            .iter()
            .filter(|f| !get(facts, f).exhaustive)
            .copied()
            .collect();
        return LedgerEntryResult {
            id: entry.id.into(),
            status: LedgerStatus::Conditional,
            details: Some(format!("inexact facts: {}", vague.join(", "))),
        };
    }
    if !hypotheses.iter().all(|f| get(facts, f).value) {
        return LedgerEntryResult {
            id: entry.id.into(),
            status: LedgerStatus::Pass,
            details: Some("hypotheses not all satisfied".into()),
        };
    }
    match &entry.rule {
        LedgerRule::Implication { conclusions, .. } => {
            let failed: Vec<&str> = conclusions
                .iter()
                .filter(|f| !get(facts, f).value)
                .copied()
                .collect();
            if failed.is_empty() {
                LedgerEntryResult {
                    id: entry.id.into(),
                    status: LedgerStatus::Pass,
                    details: None,
                }
            } else {
                LedgerEntryResult {
                    id: entry.id.into(),
                    status: LedgerStatus::Violated,
                    details: Some(format!("conclusions failed: {}", failed.join(", "))),
                }
            }
        }
        LedgerRule::Equivalence { facts: members, .. } => {
            let values: Vec<bool> = members.iter().map(|f| get(facts, f).value).collect();
            if values.windows(2).all(|w| w[0] == w[1]) {
                LedgerEntryResult {
                    id: entry.id.into(),
                    status: LedgerStatus::Pass,
                    details: None,
                }
            } else {
                let detail: Vec<String> = members
                    .iter()
                    .zip(&values)
                    .map(|(f, v)| format!("{}={}", f, v))
                    .collect();
                LedgerEntryResult {
                    id: entry.id.into(),
                    status: LedgerStatus::Violated,
                    details: Some(detail.join(", ")),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub ledger_id: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub algebra: String,
    pub size: usize,
    pub facts: FactVector,
    pub ledger: Vec<LedgerEntryResult>,
    pub violations: Vec<Violation>,
    /// Entries skipped because a referenced fact is inexact.
    pub conditional: Vec<Violation>,
}

pub fn verify_algebra(alg: &FiniteAlgebra, budget: usize) -> Result<AlgebraReport> {
    let facts = compute_facts(alg, budget)?;
    let ledger_results: Vec<LedgerEntryResult> = ledger()
        .iter()
        .map(|e| evaluate_entry(e, &facts))
        .collect();
    let pick = |status: LedgerStatus| -> Vec<Violation> {
        ledger_results
            .iter()
            .filter(|r| r.status == status)
            .map(|r| Violation {
                ledger_id: r.id.clone(),
                detail: r.details.clone().unwrap_or_default(),
            })
            .collect()
    };
    let violations = pick(LedgerStatus::Violated);
    let conditional = pick(LedgerStatus::Conditional);
    Ok(AlgebraReport {
        algebra: alg.name.clone(),
        size: alg.size,
        facts,
        ledger: ledger_results,
        violations,
        conditional,
    })
}

pub fn verify_corpus(budget: usize) -> Result<Vec<AlgebraReport>> {
    crate::corpus::bundled_corpus()
        .iter()
        .map(|a| verify_algebra(a, budget))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::subpower::DEFAULT_BUDGET;

    #[test]
    fn ledger_references_only_computed_facts() {
        let facts = compute_facts(&corpus::trivial1(), DEFAULT_BUDGET).unwrap();
        for entry in ledger() {
            // panics inside evaluate_entry if a fact is missing
            let _ = evaluate_entry(&entry, &facts);
        }
    }

    #[test]
    fn trivial_algebra_satisfies_everything() {
        let facts = compute_facts(&corpus::trivial1(), DEFAULT_BUDGET).unwrap();
        for (name, f) in &facts {
            assert!(f.value, "{} should hold on the one-element algebra", name);
            assert!(f.exhaustive, "{} should be exact", name);
        }
    }

    #[test]
    fn z2_fact_anchors() {
        let facts = compute_facts(&corpus::z2(), DEFAULT_BUDGET).unwrap();
        assert!(facts["maltsev"].value);
        assert!(!facts["pixley"].value);
        assert!(!facts["majority_term"].value);
        assert!(facts["perm2"].value);
        assert!(facts["refl_symmetric"].value);
        assert!(facts["difunctional_all"].value);
        // two congruences form a chain: distributive
        assert!(facts["distributive"].value);
        assert!(facts["tpl_cong"].value);
    }

    #[test]
    fn klein4_fact_anchors() {
        let facts = compute_facts(&corpus::klein4(), DEFAULT_BUDGET).unwrap();
        assert!(facts["maltsev"].value);
        assert!(facts["modular"].value);
        assert!(!facts["distributive"].value);
        assert!(!facts["tl_cong"].value);
        assert!(!facts["tpl_cong"].value);
        assert!(facts["sl_cong"].value);
        assert!(!facts["dd"].value);
    }

    #[test]
    fn chain2_fact_anchors() {
        let facts = compute_facts(&corpus::chain2(), DEFAULT_BUDGET).unwrap();
        assert!(!facts["maltsev"].value);
        assert!(facts["majority_term"].value);
        assert!(facts["majority_inequality"].value);
        assert!(facts["distributive"].value);
        assert!(facts["tpl_cong"].value);
        assert!(!facts["refl_symmetric"].value);
        assert!(!facts["dd"].value);
    }

    #[test]
    fn corpus_ledger_has_no_violations() {
        for report in verify_corpus(DEFAULT_BUDGET).unwrap() {
            assert!(
                report.violations.is_empty(),
                "{}: {:?}",
                report.algebra,
                report.violations
            );
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let r1 = verify_algebra(&corpus::impl2(), DEFAULT_BUDGET).unwrap();
        let r2 = verify_algebra(&corpus::impl2(), DEFAULT_BUDGET).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn corrupted_algebra_changes_facts() {
        // breaking one table entry of the Klein group destroys a congruence
        let mut bad = corpus::klein4();
        bad.operations[0].table[2] = 0;
        let good_facts = compute_facts(&corpus::klein4(), DEFAULT_BUDGET).unwrap();
        let bad_facts = compute_facts(&bad, DEFAULT_BUDGET).unwrap();
        assert_ne!(good_facts, bad_facts);
    }
}
