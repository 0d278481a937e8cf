//! Exact decision procedures for relation properties quantified over all
//! compatible relations of a finite algebra.
//!
//! Every property here is a Horn implication whose conclusion is monotone in
//! the relation. Such a property holds for all relations in a closure-defined
//! class iff it holds for the compatible closure of each premise
//! instantiation: if the conclusion fails on the closure, the closure itself
//! is a counterexample relation; if it holds there, it holds in every
//! compatible superset. This makes the checks exact for any carrier size the
//! closures can handle, with no relation enumeration.

use serde::{Deserialize, Serialize};

use crate::algebra::{product_algebra, FiniteAlgebra};
use crate::error::{Result, UalgError};
use crate::rel::{
    chain, compatible_closure, enumerate_relations, BinRel, RelClass, RelLiteral,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PropertyWitness {
    /// A compatible binary relation violating the property at `elements`.
    BinaryRel {
        rel: RelLiteral,
        elements: Vec<usize>,
    },
    /// A compatible ternary relation violating the property at `elements`.
    TernaryRel {
        triples: Vec<(usize, usize, usize)>,
        elements: Vec<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub exhaustive: bool,
    pub witness: Option<PropertyWitness>,
}

impl PropertyVerdict {
    fn holds_exact() -> PropertyVerdict {
        PropertyVerdict {
            holds: true,
            exhaustive: true,
            witness: None,
        }
    }

    fn fails(witness: PropertyWitness) -> PropertyVerdict {
        PropertyVerdict {
            holds: false,
            exhaustive: true,
            witness: Some(witness),
        }
    }
}

/// Direct difunctionality test: xRu, yRu, yRv imply xRv.
pub fn is_difunctional(r: &BinRel) -> bool {
    let (dn, cn) = (r.dom_size(), r.cod_size());
    for x in 0..dn {
        for u in 0..cn {
            if !r.get(x, u) {
                continue;
            }
            for y in 0..dn {
                if !r.get(y, u) {
                    continue;
                }
                for v in 0..cn {
                    if r.get(y, v) && !r.get(x, v) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn diagonal_seed(n: usize, extra: &[(usize, usize)]) -> BinRel {
    let mut r = BinRel::identity(n);
    for &(x, y) in extra {
        r.set(x, y);
    }
    r
}

/// Every reflexive compatible relation is symmetric (equivalently, every
/// such relation is already a congruence up to transitivity arguments).
pub fn check_refl_symmetric(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    let n = alg.size;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let e = compatible_closure(alg, &diagonal_seed(n, &[(x, y)]));
            if !e.get(y, x) {
                return Ok(PropertyVerdict::fails(PropertyWitness::BinaryRel {
                    rel: RelLiteral::of(&e),
                    elements: vec![x, y],
                }));
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

/// Every compatible relation is difunctional.
pub fn check_difunctional_all(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    let n = alg.size;
    for x in 0..n {
        for y in 0..n {
            for u in 0..n {
                for v in 0..n {
                    let d = compatible_closure(
                        alg,
                        &BinRel::from_pairs(n, n, &[(x, u), (y, u), (y, v)]),
                    );
                    if !d.get(x, v) {
                        return Ok(PropertyVerdict::fails(PropertyWitness::BinaryRel {
                            rel: RelLiteral::of(&d),
                            elements: vec![x, y, u, v],
                        }));
                    }
                }
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

/// EE° = E°E for every reflexive compatible relation E. EE° relates two
/// elements with a common successor, E°E two with a common predecessor.
pub fn check_eeo_commute(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    let n = alg.size;
    for x in 0..n {
        for y in 0..n {
            for u in 0..n {
                // common successor u must yield a common predecessor
                let e = compatible_closure(alg, &diagonal_seed(n, &[(x, u), (y, u)]));
                if !(0..n).any(|w| e.get(w, x) && e.get(w, y)) {
                    return Ok(PropertyVerdict::fails(PropertyWitness::BinaryRel {
                        rel: RelLiteral::of(&e),
                        elements: vec![x, y, u],
                    }));
                }
                // common predecessor u must yield a common successor
                let e = compatible_closure(alg, &diagonal_seed(n, &[(u, x), (u, y)]));
                if !(0..n).any(|w| e.get(x, w) && e.get(y, w)) {
                    return Ok(PropertyVerdict::fails(PropertyWitness::BinaryRel {
                        rel: RelLiteral::of(&e),
                        elements: vec![x, y, u],
                    }));
                }
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

/// PP°PP° = PP° for every compatible relation P: a PP°PP° chain
/// x P u1, y1 P u1, y1 P u2, y P u2 must produce a common successor of x, y.
pub fn check_ppoppo(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    let n = alg.size;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue; // w = u1 works on the closure itself
            }
            for u1 in 0..n {
                for y1 in 0..n {
                    for u2 in 0..n {
                        let p = compatible_closure(
                            alg,
                            &BinRel::from_pairs(
                                n,
                                n,
                                &[(x, u1), (y1, u1), (y1, u2), (y, u2)],
                            ),
                        );
                        if !(0..n).any(|w| p.get(x, w) && p.get(y, w)) {
                            return Ok(PropertyVerdict::fails(
                                PropertyWitness::BinaryRel {
                                    rel: RelLiteral::of(&p),
                                    elements: vec![x, y1, y, u1, u2],
                                },
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

/// Explicit ternary relation between carriers of sizes x_n, a_n, u_n, viewed
/// as a binary relation from X x A to U for the relational forms.
#[derive(Debug, Clone)]
pub struct TernaryRel {
    pub x_n: usize,
    pub a_n: usize,
    pub u_n: usize,
    pub triples: Vec<(usize, usize, usize)>,
}

impl TernaryRel {
    pub fn contains(&self, t: (usize, usize, usize)) -> bool {
        self.triples.contains(&t)
    }

    /// Binary relation from X x A (pair (x,a) encoded x*a_n + a) to U.
    pub fn as_binrel(&self) -> BinRel {
        let pairs: Vec<(usize, usize)> = self
            .triples
            .iter()
            .map(|&(x, a, u)| (x * self.a_n + a, u))
            .collect();
        BinRel::from_pairs(self.x_n * self.a_n, self.u_n, &pairs)
    }

    fn eq_pi(&self, keep_x: bool) -> BinRel {
        let m = self.x_n * self.a_n;
        let mut r = BinRel::empty(m, m);
        for x in 0..self.x_n {
            for a in 0..self.a_n {
                for x2 in 0..self.x_n {
                    for a2 in 0..self.a_n {
                        let same = if keep_x { x == x2 } else { a == a2 };
                        if same {
                            r.set(x * self.a_n + a, x2 * self.a_n + a2);
                        }
                    }
                }
            }
        }
        r
    }

    /// (x,a)Du, (y,b)Du, (y,a)Dv imply (x,a)Dv.
    pub fn has_dd_element(&self) -> bool {
        for &(x, a, u) in &self.triples {
            for &(y, b, u2) in &self.triples {
                if u2 != u {
                    continue;
                }
                let _ = b;
                for &(y2, a2, v) in &self.triples {
                    if y2 == y && a2 == a && !self.contains((x, a, v)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// (x,a)Pu, (y,b)Pu, (y,c)Pv, (z,a)Pv imply a common successor w of
    /// (x,a) and (z,a).
    pub fn has_pp_element(&self) -> bool {
        for &(x, a, _u) in &self.triples {
            for &(y, _b, u2) in &self.triples {
                if !self.contains((x, a, u2)) {
                    continue;
                }
                for &(y2, _c, v) in &self.triples {
                    if y2 != y {
                        continue;
                    }
                    for &(z, a2, v2) in &self.triples {
                        if a2 != a || v2 != v {
                            continue;
                        }
                        if !(0..self.u_n)
                            .any(|w| self.contains((x, a, w)) && self.contains((z, a, w)))
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// (Eq(pi_A) ^ DD°Eq(pi_X))D <= D, read left to right.
    pub fn has_dd_relational(&self) -> Result<bool> {
        let d = self.as_binrel();
        let m = chain(&[&d, &d.converse(), &self.eq_pi(true)])?
            .meet(&self.eq_pi(false))?;
        chain(&[&m, &d])?.leq(&d)
    }

    /// Eq(pi_A) ^ PP°Eq(pi_X)PP° <= PP°, read left to right.
    pub fn has_pp_relational(&self) -> Result<bool> {
        let p = self.as_binrel();
        let ppo = chain(&[&p, &p.converse()])?;
        let lhs = chain(&[&ppo, &self.eq_pi(true), &ppo])?.meet(&self.eq_pi(false))?;
        lhs.leq(&ppo)
    }
}

/// Subuniverse of X x A x U (componentwise operations, same signature)
/// generated by a set of triples, as the triple list. Element (x,a,u) is
/// encoded ((x * |A|) + a) * |U| + u.
fn ternary_closure(
    prod: &FiniteAlgebra,
    a_n: usize,
    u_n: usize,
    seeds: &[(usize, usize, usize)],
) -> Vec<(usize, usize, usize)> {
    let n = prod.size;
    let mut inset = vec![false; n];
    let mut elems: Vec<usize> = Vec::new();
    for &(x, a, u) in seeds {
        let e = (x * a_n + a) * u_n + u;
        if !inset[e] {
            inset[e] = true;
            elems.push(e);
        }
    }
    for (op, t) in prod.operations.iter().enumerate() {
        if t.arity == 0 {
            let e = prod.apply(op, &[]);
            if !inset[e] {
                inset[e] = true;
                elems.push(e);
            }
        }
    }
    let mut processed = 0usize;
    loop {
        // incremental worklist for arity 1 and 2: each new element is
        // combined with every element already processed (both orders)
        while processed < elems.len() {
            let e = elems[processed];
            processed += 1;
            for t in &prod.operations {
                match t.arity {
                    1 => {
                        let v = t.table[e];
                        if !inset[v] {
                            inset[v] = true;
                            elems.push(v);
                        }
                    }
                    2 => {
                        for i in 0..processed {
                            let o = elems[i];
                            for v in [t.table[e * n + o], t.table[o * n + e]] {
                                if !inset[v] {
                                    inset[v] = true;
                                    elems.push(v);
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        // full fixpoint pass for higher arities (rare)
        let before = elems.len();
        for (op, t) in prod.operations.iter().enumerate() {
            let k = t.arity;
            if k < 3 || before == 0 {
                continue;
            }
            let mut idx = vec![0usize; k];
            let mut args = vec![0usize; k];
            'tuples: loop {
                for (pos, &i) in idx.iter().enumerate() {
                    args[pos] = elems[i];
                }
                let v = prod.apply(op, &args);
                if !inset[v] {
                    inset[v] = true;
                    elems.push(v);
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < before {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        if elems.len() == before && processed == before {
            break;
        }
    }
    elems.sort_unstable();
    elems
        .iter()
        .map(|&e| (e / (a_n * u_n), (e / u_n) % a_n, e % u_n))
        .collect()
}

fn triple_product(
    x_alg: &FiniteAlgebra,
    a_alg: &FiniteAlgebra,
    u_alg: &FiniteAlgebra,
) -> Result<FiniteAlgebra> {
    product_algebra(&product_algebra(x_alg, a_alg)?, u_alg)
}

/// Every compatible ternary relation between the three algebras satisfies
/// the difunctionality-strengthening identity
/// (x,a)Du, (y,b)Du, (y,a)Dv => (x,a)Dv.
pub fn check_dd_hetero(
    x_alg: &FiniteAlgebra,
    a_alg: &FiniteAlgebra,
    u_alg: &FiniteAlgebra,
) -> Result<PropertyVerdict> {
    if !(x_alg.same_signature(a_alg) && x_alg.same_signature(u_alg)) {
        return Err(UalgError::SignatureMismatch(
            "ternary relation checks need a common signature".into(),
        ));
    }
    let prod = triple_product(x_alg, a_alg, u_alg)?;
    let (xn, an, un) = (x_alg.size, a_alg.size, u_alg.size);
    for x in 0..xn {
        for y in 0..xn {
            for a in 0..an {
                for b in 0..an {
                    for u in 0..un {
                        for v in 0..un {
                            let seeds = [(x, a, u), (y, b, u), (y, a, v)];
                            let d = ternary_closure(&prod, an, un, &seeds);
                            if !d.contains(&(x, a, v)) {
                                return Ok(PropertyVerdict::fails(
                                    PropertyWitness::TernaryRel {
                                        triples: d,
                                        elements: vec![x, y, a, b, u, v],
                                    },
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

pub fn check_dd(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    check_dd_hetero(alg, alg, alg)
}

/// Every compatible ternary relation satisfies
/// (x,a)Pu, (y,b)Pu, (y,c)Pv, (z,a)Pv => exists w: (x,a)Pw and (z,a)Pw.
pub fn check_pp_hetero(
    x_alg: &FiniteAlgebra,
    a_alg: &FiniteAlgebra,
    u_alg: &FiniteAlgebra,
) -> Result<PropertyVerdict> {
    if !(x_alg.same_signature(a_alg) && x_alg.same_signature(u_alg)) {
        return Err(UalgError::SignatureMismatch(
            "ternary relation checks need a common signature".into(),
        ));
    }
    let prod = triple_product(x_alg, a_alg, u_alg)?;
    let (xn, an, un) = (x_alg.size, a_alg.size, u_alg.size);
    for x in 0..xn {
        for z in 0..xn {
            if x == z {
                continue; // w = u works on the closure itself
            }
            for a in 0..an {
                for u in 0..un {
                    for v in 0..un {
                        for y in 0..xn {
                            for b in 0..an {
                                for c in 0..an {
                                    let seeds =
                                        [(x, a, u), (y, b, u), (y, c, v), (z, a, v)];
                                    let p = ternary_closure(&prod, an, un, &seeds);
                                    let ok = (0..un).any(|w| {
                                        p.contains(&(x, a, w)) && p.contains(&(z, a, w))
                                    });
                                    if !ok {
                                        return Ok(PropertyVerdict::fails(
                                            PropertyWitness::TernaryRel {
                                                triples: p,
                                                elements: vec![x, y, z, a, b, c, u, v],
                                            },
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PropertyVerdict::holds_exact())
}

pub fn check_pp(alg: &FiniteAlgebra) -> Result<PropertyVerdict> {
    check_pp_hetero(alg, alg, alg)
}

/// Every reflexive positive compatible relation is an equivalence.
/// Exhaustive exactly when the positive-class enumeration is.
pub fn check_positive_are_equiv(
    alg: &FiniteAlgebra,
    budget: usize,
) -> Result<PropertyVerdict> {
    let e = enumerate_relations(alg, RelClass::ReflexivePositiveCompatible, budget)?;
    for r in &e.rels {
        if !r.is_equivalence() {
            return Ok(PropertyVerdict::fails(PropertyWitness::BinaryRel {
                rel: RelLiteral::of(r),
                elements: vec![],
            }));
        }
    }
    Ok(PropertyVerdict {
        holds: true,
        exhaustive: e.exhaustive,
        witness: None,
    })
}

/// Re-verifies a failing verdict's witness against the defining property.
pub fn verify_binary_witness(
    alg: &FiniteAlgebra,
    verdict: &PropertyVerdict,
    class: RelClass,
) -> Result<bool> {
    match &verdict.witness {
        Some(PropertyWitness::BinaryRel { rel, .. }) => {
            let r = rel.to_rel()?;
            class.contains(alg, &r)
        }
        _ => Ok(false),
    }
}

/// Independently re-verifies a counterexample witness for the named
/// property: class membership (or ternary compatibility) plus an actual
/// violation of the property by the witness relation.
pub fn verify_property_witness(
    alg: &FiniteAlgebra,
    property: &str,
    witness: &PropertyWitness,
) -> Result<bool> {
    match (property, witness) {
        ("refl-symmetric", PropertyWitness::BinaryRel { rel, .. }) => {
            let r = rel.to_rel()?;
            Ok(RelClass::ReflexiveCompatible.contains(alg, &r)? && !r.is_symmetric())
        }
        ("difunctional-all", PropertyWitness::BinaryRel { rel, .. }) => {
            let r = rel.to_rel()?;
            Ok(RelClass::AllCompatible.contains(alg, &r)? && !is_difunctional(&r))
        }
        ("eeo-commute", PropertyWitness::BinaryRel { rel, .. }) => {
            let e = rel.to_rel()?;
            if !RelClass::ReflexiveCompatible.contains(alg, &e)? {
                return Ok(false);
            }
            let eeo = chain(&[&e, &e.converse()])?;
            let eoe = chain(&[&e.converse(), &e])?;
            Ok(eeo != eoe)
        }
        ("ppoppo", PropertyWitness::BinaryRel { rel, .. }) => {
            let p = rel.to_rel()?;
            if !RelClass::AllCompatible.contains(alg, &p)? {
                return Ok(false);
            }
            let ppo = chain(&[&p, &p.converse()])?;
            Ok(!chain(&[&ppo, &ppo])?.leq(&ppo)?)
        }
        ("positive-are-equiv", PropertyWitness::BinaryRel { rel, .. }) => {
            let r = rel.to_rel()?;
            Ok(RelClass::ReflexivePositiveCompatible.contains(alg, &r)?
                && !r.is_equivalence())
        }
        (p @ ("dd" | "pp"), PropertyWitness::TernaryRel { triples, .. }) => {
            let prod = triple_product(alg, alg, alg)?;
            let mut closed = ternary_closure(&prod, alg.size, alg.size, triples);
            closed.sort_unstable();
            let mut sorted = triples.clone();
            sorted.sort_unstable();
            if sorted != closed {
                return Ok(false); // not compatible
            }
            let t = TernaryRel {
                x_n: alg.size,
                a_n: alg.size,
                u_n: alg.size,
                triples: triples.clone(),
            };
            Ok(if p == "dd" {
                !t.has_dd_element()
            } else {
                !t.has_pp_element()
            })
        }
        _ => Err(UalgError::Precondition(format!(
            "witness shape does not match property `{}`",
            property
        ))),
    }
}
