//! Shifting, triangular and trapezoid lemma checks over relation-class
//! triples, plus the majority inequality.
//!
//! Element forms are normative. For the shifting and trapezoid lemmas the
//! premise is a trapezoid of edges (x,u) in S, (y,v) in S, (u,v) in R — the
//! shifting lemma additionally requires (x,y) in R — with (x,y) in T, and the
//! conclusion is (u,v) in T. The triangular lemma uses the triangle
//! (u,y) in T, (y,v) in S, (u,v) in R. All three carry the side condition
//! R meet S <= T. The relational forms (R ^ S(R^T)S <= T, R ^ ST <= T,
//! R ^ STS <= T) are equivalent for equivalence relations and serve as
//! independent oracles there.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{Result, UalgError};
use crate::rel::{chain, enumerate_relations, BinRel, RelClass, RelEnumeration, RelLiteral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaKind {
    Shifting,
    Triangular,
    Trapezoid,
}

impl LemmaKind {
    pub fn parse(text: &str) -> Result<LemmaKind> {
        match text {
            "shifting" | "sl" => Ok(LemmaKind::Shifting),
            "triangular" | "tl" => Ok(LemmaKind::Triangular),
            "trapezoid" | "tpl" => Ok(LemmaKind::Trapezoid),
            other => Err(UalgError::Precondition(format!(
                "unknown lemma kind `{}`",
                other
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LemmaKind::Shifting => "shifting",
            LemmaKind::Triangular => "triangular",
            LemmaKind::Trapezoid => "trapezoid",
        }
    }
}

/// Relation classes for the three roles of a lemma instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleClasses {
    pub r: RelClass,
    pub s: RelClass,
    pub t: RelClass,
}

impl TripleClasses {
    pub fn uniform(c: RelClass) -> TripleClasses {
        TripleClasses { r: c, s: c, t: c }
    }

    /// Parses either a single class name (uniform) or `R=...,S=...,T=...`.
    pub fn parse(spec: &str) -> Result<TripleClasses> {
        if !spec.contains('=') {
            return Ok(TripleClasses::uniform(RelClass::parse(spec)?));
        }
        let (mut r, mut s, mut t) = (None, None, None);
        for part in spec.split(',') {
            let (role, class) = part.split_once('=').ok_or_else(|| {
                UalgError::Precondition(format!("bad class spec `{}`", part))
            })?;
            let c = RelClass::parse(class.trim())?;
            match role.trim() {
                "R" => r = Some(c),
                "S" => s = Some(c),
                "T" => t = Some(c),
                other => {
                    return Err(UalgError::Precondition(format!(
                        "unknown role `{}` in class spec",
                        other
                    )))
                }
            }
        }
        let missing = || UalgError::Precondition("class spec needs R, S and T".into());
        Ok(TripleClasses {
            r: r.ok_or_else(missing)?,
            s: s.ok_or_else(missing)?,
            t: t.ok_or_else(missing)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaCounterexample {
    pub r: RelLiteral,
    pub s: RelLiteral,
    pub t: RelLiteral,
    /// Witness elements: [x, y, u, v] (shifting, trapezoid) or [u, y, v]
    /// (triangular).
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LemmaVerdict {
    pub holds: bool,
    /// True iff the verdict is exact: a failing verdict always is (the
    /// counterexample is re-verified); a holding verdict is exact only when
    /// every relation triple in the classes was scanned.
    pub exhaustive: bool,
    pub triples_checked: usize,
    pub counterexample: Option<LemmaCounterexample>,
}

fn side_condition_ok(r: &BinRel, s: &BinRel, t: &BinRel) -> Result<bool> {
    r.meet(s)?.leq(t)
}

/// First premise instantiation violating the lemma on one triple, if any.
/// Assumes the side condition already holds.
pub fn element_violation(
    kind: LemmaKind,
    r: &BinRel,
    s: &BinRel,
    t: &BinRel,
) -> Option<Vec<usize>> {
    let n = r.dom_size();
    match kind {
        LemmaKind::Triangular => {
            for u in 0..n {
                for y in 0..n {
                    if !t.get(u, y) {
                        continue;
                    }
                    for v in 0..n {
                        if s.get(y, v) && r.get(u, v) && !t.get(u, v) {
                            return Some(vec![u, y, v]);
                        }
                    }
                }
            }
            None
        }
        LemmaKind::Shifting | LemmaKind::Trapezoid => {
            let need_r_top = kind == LemmaKind::Shifting;
            for x in 0..n {
                for y in 0..n {
                    if !t.get(x, y) || (need_r_top && !r.get(x, y)) {
                        continue;
                    }
                    for u in 0..n {
                        if !s.get(x, u) {
                            continue;
                        }
                        for v in 0..n {
                            if s.get(y, v) && r.get(u, v) && !t.get(u, v) {
                                return Some(vec![x, y, u, v]);
                            }
                        }
                    }
                }
            }
            None
        }
    }
}

/// Relational-form oracle; requires equivalence relations, where the element
/// and relational forms coincide.
pub fn relational_form_holds(
    kind: LemmaKind,
    r: &BinRel,
    s: &BinRel,
    t: &BinRel,
) -> Result<bool> {
    if !(r.is_equivalence() && s.is_equivalence() && t.is_equivalence()) {
        return Err(UalgError::Precondition(
            "relational lemma forms require equivalence relations".into(),
        ));
    }
    let lhs = match kind {
        LemmaKind::Shifting => r.meet(&chain(&[s, &r.meet(t)?, s])?)?,
        LemmaKind::Triangular => r.meet(&chain(&[s, t])?)?,
        LemmaKind::Trapezoid => r.meet(&chain(&[s, t, s])?)?,
    };
    lhs.leq(t)
}

struct TripleScan<'a> {
    r: &'a [BinRel],
    s: &'a [BinRel],
    t: &'a [BinRel],
}

impl<'a> TripleScan<'a> {
    fn total(&self) -> usize {
        self.r
            .len()
            .saturating_mul(self.s.len())
            .saturating_mul(self.t.len())
    }

    /// Scans up to `cap` triples in canonical order; returns the first
    /// violation and the number of triples actually checked.
    fn run(
        &self,
        kind: LemmaKind,
        cap: usize,
    ) -> Result<(Option<LemmaCounterexample>, usize)> {
        let mut checked = 0usize;
        for r in self.r {
            for s in self.s {
                let rs = r.meet(s)?;
                for t in self.t {
                    if checked >= cap {
                        return Ok((None, checked));
                    }
                    checked += 1;
                    if !rs.leq(t)? {
                        continue;
                    }
                    if let Some(elements) = element_violation(kind, r, s, t) {
                        return Ok((
                            Some(LemmaCounterexample {
                                r: RelLiteral::of(r),
                                s: RelLiteral::of(s),
                                t: RelLiteral::of(t),
                                elements,
                            }),
                            checked,
                        ));
                    }
                }
            }
        }
        Ok((None, checked))
    }
}

fn enumeration_for(
    alg: &FiniteAlgebra,
    class: RelClass,
    cache: &mut Vec<(RelClass, RelEnumeration)>,
    budget: usize,
) -> Result<usize> {
    if let Some(i) = cache.iter().position(|(c, _)| *c == class) {
        return Ok(i);
    }
    let e = enumerate_relations(alg, class, budget)?;
    cache.push((class, e));
    Ok(cache.len() - 1)
}

/// Decides whether the lemma holds for every (R, S, T) in the given classes
/// that satisfies the side condition R meet S <= T.
///
/// When the full triple scan fits in `budget` it runs outright; otherwise a
/// pre-pass over congruence triples (congruences belong to every class) runs
/// first, followed by a budget-capped scan. A failing verdict is always
/// exact; a holding verdict is exact only if the scan was complete over
/// exhaustive enumerations.
pub fn check_lemma(
    alg: &FiniteAlgebra,
    kind: LemmaKind,
    classes: TripleClasses,
    budget: usize,
) -> Result<LemmaVerdict> {
    let mut cache: Vec<(RelClass, RelEnumeration)> = Vec::new();
    let ir = enumeration_for(alg, classes.r, &mut cache, budget)?;
    let is_ = enumeration_for(alg, classes.s, &mut cache, budget)?;
    let it = enumeration_for(alg, classes.t, &mut cache, budget)?;
    let enums_exhaustive =
        cache[ir].1.exhaustive && cache[is_].1.exhaustive && cache[it].1.exhaustive;

    let scan = TripleScan {
        r: &cache[ir].1.rels,
        s: &cache[is_].1.rels,
        t: &cache[it].1.rels,
    };
    let full_fits = scan.total() <= budget;

    if !full_fits && classes != TripleClasses::uniform(RelClass::Congruence) {
        // counterexamples among congruences settle the question exactly
        let ic = enumeration_for(alg, RelClass::Congruence, &mut cache, budget)?;
        let congs = &cache[ic].1.rels;
        let pre = TripleScan {
            r: congs,
            s: congs,
            t: congs,
        };
        let (cx, checked) = pre.run(kind, budget)?;
        if let Some(cx) = cx {
            debug_assert!(verify_lemma_counterexample(alg, kind, classes, &cx).unwrap());
            return Ok(LemmaVerdict {
                holds: false,
                exhaustive: true,
                triples_checked: checked,
                counterexample: Some(cx),
            });
        }
    }

    let scan_fresh = TripleScan {
        r: &cache[ir].1.rels,
        s: &cache[is_].1.rels,
        t: &cache[it].1.rels,
    };
    let cap = if full_fits { usize::MAX } else { budget };
    let (cx, checked) = scan_fresh.run(kind, cap)?;
    match cx {
        Some(cx) => {
            debug_assert!(verify_lemma_counterexample(alg, kind, classes, &cx).unwrap());
            Ok(LemmaVerdict {
                holds: false,
                exhaustive: true,
                triples_checked: checked,
                counterexample: Some(cx),
            })
        }
        None => Ok(LemmaVerdict {
            holds: true,
            exhaustive: full_fits && enums_exhaustive,
            triples_checked: checked,
            counterexample: None,
        }),
    }
}

/// Independently re-verifies a counterexample: class membership of all three
/// relations, the side condition, every premise edge, and the failed
/// conclusion.
pub fn verify_lemma_counterexample(
    alg: &FiniteAlgebra,
    kind: LemmaKind,
    classes: TripleClasses,
    cx: &LemmaCounterexample,
) -> Result<bool> {
    let r = cx.r.to_rel()?;
    let s = cx.s.to_rel()?;
    let t = cx.t.to_rel()?;
    if !(classes.r.contains(alg, &r)?
        && classes.s.contains(alg, &s)?
        && classes.t.contains(alg, &t)?)
    {
        return Ok(false);
    }
    if !side_condition_ok(&r, &s, &t)? {
        return Ok(false);
    }
    let e = &cx.elements;
    let ok = match kind {
        LemmaKind::Triangular => {
            e.len() == 3 && t.get(e[0], e[1]) && s.get(e[1], e[2]) && r.get(e[0], e[2])
                && !t.get(e[0], e[2])
        }
        LemmaKind::Shifting => {
            e.len() == 4
                && r.get(e[0], e[1])
                && t.get(e[0], e[1])
                && s.get(e[0], e[2])
                && s.get(e[1], e[3])
                && r.get(e[2], e[3])
                && !t.get(e[2], e[3])
        }
        LemmaKind::Trapezoid => {
            e.len() == 4
                && t.get(e[0], e[1])
                && s.get(e[0], e[2])
                && s.get(e[1], e[3])
                && r.get(e[2], e[3])
                && !t.get(e[2], e[3])
        }
    };
    Ok(ok)
}

#[derive(Debug, Clone)]
pub struct MajorityVerdict {
    pub holds: bool,
    pub exhaustive: bool,
    pub triples_checked: usize,
    /// (R, S, T, pair in R^(ST) missing from (R^S)(R^T))
    pub counterexample: Option<(RelLiteral, RelLiteral, RelLiteral, (usize, usize))>,
}

fn majority_violation(
    r: &BinRel,
    s: &BinRel,
    t: &BinRel,
) -> Result<Option<(usize, usize)>> {
    let lhs = r.meet(&chain(&[s, t])?)?;
    let rhs = chain(&[&r.meet(s)?, &r.meet(t)?])?;
    for (x, y) in lhs.pairs() {
        if !rhs.get(x, y) {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// Checks R ^ (ST) <= (R^S)(R^T) for all triples in the class. No side
/// condition.
pub fn check_majority_inequality(
    alg: &FiniteAlgebra,
    class: RelClass,
    budget: usize,
) -> Result<MajorityVerdict> {
    let e = enumerate_relations(alg, class, budget)?;
    let total = e.rels.len().saturating_pow(3);
    // congruence triples settle failure exactly when the full scan is too big
    if total > budget && class != RelClass::Congruence {
        let congs = enumerate_relations(alg, RelClass::Congruence, budget)?;
        if let Some(v) = majority_scan(&congs.rels, usize::MAX)? {
            return Ok(v);
        }
    }
    let cap = if total <= budget { usize::MAX } else { budget };
    match majority_scan(&e.rels, cap)? {
        Some(v) => Ok(v),
        None => Ok(MajorityVerdict {
            holds: true,
            exhaustive: e.exhaustive && total <= budget,
            triples_checked: total.min(cap),
            counterexample: None,
        }),
    }
}

fn majority_scan(rels: &[BinRel], cap: usize) -> Result<Option<MajorityVerdict>> {
    let mut checked = 0usize;
    for r in rels {
        for s in rels {
            for t in rels {
                if checked >= cap {
                    return Ok(None);
                }
                checked += 1;
                if let Some(pair) = majority_violation(r, s, t)? {
                    return Ok(Some(MajorityVerdict {
                        holds: false,
                        exhaustive: true,
                        triples_checked: checked,
                        counterexample: Some((
                            RelLiteral::of(r),
                            RelLiteral::of(s),
                            RelLiteral::of(t),
                            pair,
                        )),
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::subpower::DEFAULT_BUDGET;

    fn cong() -> TripleClasses {
        TripleClasses::uniform(RelClass::Congruence)
    }

    #[test]
    fn element_and_relational_forms_agree_on_congruence_triples() {
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
                            let elem_ok = element_violation(kind, r, s, t).is_none();
                            let rel_ok = relational_form_holds(kind, r, s, t).unwrap();
                            assert_eq!(elem_ok, rel_ok, "{} {:?}", alg.name, kind);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn relational_form_rejects_non_equivalences() {
        let r = BinRel::from_pairs(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        let e = BinRel::identity(2);
        assert!(relational_form_holds(LemmaKind::Shifting, &r, &e, &e).is_err());
    }

    #[test]
    fn z2_satisfies_all_congruence_lemmas() {
        let alg = corpus::z2();
        for kind in [LemmaKind::Shifting, LemmaKind::Triangular, LemmaKind::Trapezoid] {
            let v = check_lemma(&alg, kind, cong(), DEFAULT_BUDGET).unwrap();
            assert!(v.holds, "{:?}", kind);
            assert!(v.exhaustive);
        }
    }

    #[test]
    fn klein4_shifting_holds_triangular_fails() {
        // congruence-modular but not congruence-distributive
        let alg = corpus::klein4();
        let sl = check_lemma(&alg, LemmaKind::Shifting, cong(), DEFAULT_BUDGET).unwrap();
        assert!(sl.holds && sl.exhaustive);
        let tl = check_lemma(&alg, LemmaKind::Triangular, cong(), DEFAULT_BUDGET).unwrap();
        assert!(!tl.holds && tl.exhaustive);
        let cx = tl.counterexample.unwrap();
        assert!(
            verify_lemma_counterexample(&alg, LemmaKind::Triangular, cong(), &cx).unwrap()
        );
        let tpl = check_lemma(&alg, LemmaKind::Trapezoid, cong(), DEFAULT_BUDGET).unwrap();
        assert!(!tpl.holds && tpl.exhaustive);
    }

    #[test]
    fn chain2_trapezoid_splits_between_congruences_and_reflexives() {
        // over congruences ({delta, full}) the lemma holds; over reflexive
        // compatibles the order relations give a genuine counterexample
        // (R = >=, S = <=, T = delta at x=y=0, u=1, v=0)
        let alg = corpus::chain2();
        let v = check_lemma(&alg, LemmaKind::Trapezoid, cong(), DEFAULT_BUDGET).unwrap();
        assert!(v.holds && v.exhaustive);
        let refl = TripleClasses::uniform(RelClass::ReflexiveCompatible);
        let v = check_lemma(&alg, LemmaKind::Trapezoid, refl, DEFAULT_BUDGET).unwrap();
        assert!(!v.holds && v.exhaustive);
        let cx = v.counterexample.unwrap();
        assert!(
            verify_lemma_counterexample(&alg, LemmaKind::Trapezoid, refl, &cx).unwrap()
        );
    }

    #[test]
    fn bare3_shifting_holds_but_triangular_fails() {
        // the partition lattice on three points is modular (M3) but not
        // distributive
        let alg = corpus::bare(3);
        let sl = check_lemma(&alg, LemmaKind::Shifting, cong(), DEFAULT_BUDGET).unwrap();
        assert!(sl.holds && sl.exhaustive);
        let tl = check_lemma(&alg, LemmaKind::Triangular, cong(), DEFAULT_BUDGET).unwrap();
        assert!(!tl.holds && tl.exhaustive);
    }

    #[test]
    fn bare4_shifting_fails_over_congruences() {
        // the partition lattice on four points is not modular
        let alg = corpus::bare(4);
        let v = check_lemma(&alg, LemmaKind::Shifting, cong(), DEFAULT_BUDGET).unwrap();
        assert!(!v.holds && v.exhaustive);
        let cx = v.counterexample.unwrap();
        assert!(verify_lemma_counterexample(&alg, LemmaKind::Shifting, cong(), &cx).unwrap());
    }

    #[test]
    fn bare4_reflexive_triples_exceed_budget_but_fail_exactly() {
        // 4096 reflexive relations: the full scan cannot fit, the congruence
        // pre-pass still finds an exact counterexample
        let alg = corpus::bare(4);
        let refl = TripleClasses::uniform(RelClass::ReflexiveCompatible);
        let v = check_lemma(&alg, LemmaKind::Trapezoid, refl, DEFAULT_BUDGET).unwrap();
        assert!(!v.holds);
        assert!(v.exhaustive);
        let cx = v.counterexample.unwrap();
        assert!(
            verify_lemma_counterexample(&alg, LemmaKind::Trapezoid, refl, &cx).unwrap()
        );
    }

    #[test]
    fn majority_inequality_chain2_holds_bare3_fails() {
        let refl = RelClass::ReflexiveCompatible;
        let ok = check_majority_inequality(&corpus::chain2(), refl, DEFAULT_BUDGET).unwrap();
        assert!(ok.holds && ok.exhaustive);
        // partitions {01}, {12}, {02} of the bare 3-set violate it
        let bad = check_majority_inequality(&corpus::bare(3), refl, DEFAULT_BUDGET).unwrap();
        assert!(!bad.holds && bad.exhaustive);
        // re-verify the reported pair
        let (r, s, t, (x, y)) = bad.counterexample.unwrap();
        let (r, s, t) = (r.to_rel().unwrap(), s.to_rel().unwrap(), t.to_rel().unwrap());
        let lhs = r.meet(&chain(&[&s, &t]).unwrap()).unwrap();
        let rhs = chain(&[&r.meet(&s).unwrap(), &r.meet(&t).unwrap()]).unwrap();
        assert!(lhs.get(x, y) && !rhs.get(x, y));
    }

    #[test]
    fn majority_inequality_fails_on_klein4_congruences() {
        // the three atom congruences of the M3 lattice violate it
        let v = check_majority_inequality(
            &corpus::klein4(),
            RelClass::Congruence,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(!v.holds && v.exhaustive);
        assert_eq!(v.triples_checked <= 125, true);
    }

    #[test]
    fn mixed_class_verdicts_are_consistent_with_uniform_congruence() {
        // congruence triples are a subclass of every mixed choice, so a
        // holding mixed verdict forces a holding congruence verdict
        for alg in [corpus::z2(), corpus::chain2(), corpus::impl2()] {
            for kind in [LemmaKind::Shifting, LemmaKind::Triangular, LemmaKind::Trapezoid] {
                let mixed = TripleClasses {
                    r: RelClass::ReflexiveCompatible,
                    s: RelClass::Congruence,
                    t: RelClass::ReflexiveCompatible,
                };
                let vm = check_lemma(&alg, kind, mixed, DEFAULT_BUDGET).unwrap();
                let vc = check_lemma(&alg, kind, cong(), DEFAULT_BUDGET).unwrap();
                if vm.holds {
                    assert!(vc.holds, "{} {:?}", alg.name, kind);
                }
            }
        }
    }
}
