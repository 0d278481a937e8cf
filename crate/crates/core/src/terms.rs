//! Mal'tsev-condition term searches via subpower membership.
//!
//! A term with prescribed values on finitely many argument tuples exists iff
//! the target vector lies in the subalgebra of A^m generated by the
//! projection vectors, where m is the number of (deduplicated) constraint
//! tuples. Linked constraints (pointwise equality of two unknowns on a
//! pattern) are decided by indexing one closure on its linked-coordinate
//! projection and scanning the other.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{eval_term, FiniteAlgebra, Term};
use crate::error::{Result, UalgError};
use crate::subpower::{generate_subpower, ClosureOutcome, Subpower, TupleVector};

#[derive(Debug, Clone)]
pub struct Unknown {
    pub name: String,
    pub arity: usize,
}

/// Argument patterns are lists of abstract variable indices; instantiation
/// ranges over the full carrier.
#[derive(Debug, Clone)]
pub enum Constraint {
    /// unknown(args pattern) = value variable, for all instantiations
    Fixed {
        unknown: usize,
        args: Vec<usize>,
        value: usize,
    },
    /// left unknown on its pattern equals right unknown on its pattern,
    /// pointwise over all instantiations
    Linked {
        left: (usize, Vec<usize>),
        right: (usize, Vec<usize>),
    },
}

#[derive(Debug, Clone)]
pub struct IdentitySystem {
    pub name: String,
    pub unknowns: Vec<Unknown>,
    /// Number of abstract variables used by the patterns.
    pub vars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    NotFound,
    Inconclusive,
}

/// Value-table certificate for one unknown. The table is the normative
/// witness; the explicit term is reconstructed from closure provenance.
#[derive(Debug, Clone)]
pub struct TermWitness {
    pub unknown: String,
    pub coords: Vec<Vec<usize>>,
    pub values: Vec<usize>,
    pub term: Option<Term>,
}

impl TermWitness {
    pub fn value_at(&self, args: &[usize]) -> Option<usize> {
        self.coords
            .iter()
            .position(|c| c == args)
            .map(|i| self.values[i])
    }
}

#[derive(Debug, Clone)]
pub struct TermSearchResult {
    pub system: String,
    pub status: SearchStatus,
    pub witnesses: Vec<TermWitness>,
}

impl TermSearchResult {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    pub fn witness(&self, unknown: &str) -> Option<&TermWitness> {
        self.witnesses.iter().find(|w| w.unknown == unknown)
    }
}

struct UnknownState {
    /// Sorted, deduplicated constraint tuples.
    coords: Vec<Vec<usize>>,
    /// Required value per coordinate, if fixed.
    fixed: Vec<Option<usize>>,
}

fn enumerate_assignments(vars: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(n.pow(vars as u32));
    let mut cur = vec![0usize; vars];
    loop {
        out.push(cur.clone());
        let mut pos = vars;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < n {
                break;
            }
            cur[pos] = 0;
        }
    }
}

pub fn solve_identity_system(
    alg: &FiniteAlgebra,
    sys: &IdentitySystem,
    budget: usize,
) -> Result<TermSearchResult> {
    let n = alg.size;
    let u_count = sys.unknowns.len();

    // instantiate: per-unknown coordinate maps and the linked pair set
    let mut coord_maps: Vec<BTreeMap<Vec<usize>, Option<usize>>> =
        vec![BTreeMap::new(); u_count];
    let mut links: BTreeSet<(usize, Vec<usize>, usize, Vec<usize>)> = BTreeSet::new();
    for assign in enumerate_assignments(sys.vars, n) {
        for c in &sys.constraints {
            match c {
                Constraint::Fixed {
                    unknown,
                    args,
                    value,
                } => {
                    let tuple: Vec<usize> = args.iter().map(|&v| assign[v]).collect();
                    let val = assign[*value];
                    match coord_maps[*unknown].entry(tuple) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(Some(val));
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            match e.get() {
                                Some(prev) if *prev != val => {
                                    // conflicting required values on one tuple
                                    return Ok(TermSearchResult {
                                        system: sys.name.clone(),
                                        status: SearchStatus::NotFound,
                                        witnesses: vec![],
                                    });
                                }
                                Some(_) => {}
                                None => {
                                    e.insert(Some(val));
                                }
                            }
                        }
                    }
                }
                Constraint::Linked { left, right } => {
                    let lt: Vec<usize> = left.1.iter().map(|&v| assign[v]).collect();
                    let rt: Vec<usize> = right.1.iter().map(|&v| assign[v]).collect();
                    coord_maps[left.0].entry(lt.clone()).or_insert(None);
                    coord_maps[right.0].entry(rt.clone()).or_insert(None);
                    links.insert((left.0, lt, right.0, rt));
                }
            }
        }
    }

    // zero-constraint degenerate case: any projection works
    if coord_maps.iter().all(|m| m.is_empty()) {
        let witnesses = sys
            .unknowns
            .iter()
            .map(|u| TermWitness {
                unknown: u.name.clone(),
                coords: vec![],
                values: vec![],
                term: Some(Term::var(0)),
            })
            .collect();
        return Ok(TermSearchResult {
            system: sys.name.clone(),
            status: SearchStatus::Found,
            witnesses,
        });
    }

    let states: Vec<UnknownState> = coord_maps
        .iter()
        .map(|m| UnknownState {
            coords: m.keys().cloned().collect(),
            fixed: m.values().cloned().collect(),
        })
        .collect();

    // generate each unknown's subpower
    let mut closures: Vec<Subpower> = Vec::with_capacity(u_count);
    for (u, st) in states.iter().enumerate() {
        let arity = sys.unknowns[u].arity;
        let gens: Vec<TupleVector> = (0..arity)
            .map(|i| st.coords.iter().map(|t| t[i] as u8).collect())
            .collect();
        match generate_subpower(alg, st.coords.len(), &gens, budget) {
            ClosureOutcome::Closed(sp) => closures.push(sp),
            ClosureOutcome::BudgetExceeded => {
                return Ok(TermSearchResult {
                    system: sys.name.clone(),
                    status: SearchStatus::Inconclusive,
                    witnesses: vec![],
                })
            }
        }
    }

    // candidates per unknown: closure elements matching all fixed values,
    // in canonical (lexicographic) order
    let candidates: Vec<Vec<usize>> = closures
        .iter()
        .enumerate()
        .map(|(u, sp)| {
            let st = &states[u];
            let mut order: Vec<usize> = (0..sp.len()).collect();
            order.sort_by(|&a, &b| sp.vectors[a].cmp(&sp.vectors[b]));
            order
                .into_iter()
                .filter(|&i| {
                    sp.vectors[i]
                        .iter()
                        .zip(&st.fixed)
                        .all(|(&v, f)| f.map_or(true, |fv| fv == v as usize))
                })
                .collect()
        })
        .collect();

    // group links by unknown pair
    let mut link_groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (lu, lt, ru, rt) in &links {
        let li = states[*lu].coords.binary_search(lt).expect("registered");
        let ri = states[*ru].coords.binary_search(rt).expect("registered");
        link_groups.entry((*lu, *ru)).or_default().push((li, ri));
    }

    let mut chosen: Vec<Option<usize>> = vec![None; u_count];

    // same-unknown links are an intra-element filter
    let mut filtered = candidates;
    for (&(lu, ru), pairs) in &link_groups {
        if lu == ru {
            filtered[lu].retain(|&i| {
                let v = &closures[lu].vectors[i];
                pairs.iter().all(|&(a, b)| v[a] == v[b])
            });
        }
    }

    let cross_groups: Vec<(&(usize, usize), &Vec<(usize, usize)>)> = link_groups
        .iter()
        .filter(|((lu, ru), _)| lu != ru)
        .collect();
    match cross_groups.len() {
        0 => {
            for u in 0..u_count {
                match filtered[u].first() {
                    Some(&i) => chosen[u] = Some(i),
                    None => {
                        return Ok(TermSearchResult {
                            system: sys.name.clone(),
                            status: SearchStatus::NotFound,
                            witnesses: vec![],
                        })
                    }
                }
            }
        }
        1 => {
            let (&(lu, ru), pairs) = cross_groups[0];
            // index the right unknown's candidates by linked projection
            let mut by_proj: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
            for &i in filtered[ru].iter().rev() {
                let v = &closures[ru].vectors[i];
                let proj: Vec<u8> = pairs.iter().map(|&(_, b)| v[b]).collect();
                by_proj.insert(proj, i); // rev() keeps first-in-order on ties
            }
            let mut matched = None;
            for &i in &filtered[lu] {
                let v = &closures[lu].vectors[i];
                let proj: Vec<u8> = pairs.iter().map(|&(a, _)| v[a]).collect();
                if let Some(&j) = by_proj.get(&proj) {
                    matched = Some((i, j));
                    break;
                }
            }
            match matched {
                Some((i, j)) => {
                    chosen[lu] = Some(i);
                    chosen[ru] = Some(j);
                }
                None => {
                    return Ok(TermSearchResult {
                        system: sys.name.clone(),
                        status: SearchStatus::NotFound,
                        witnesses: vec![],
                    })
                }
            }
            for u in 0..u_count {
                if chosen[u].is_none() {
                    match filtered[u].first() {
                        Some(&i) => chosen[u] = Some(i),
                        None => {
                            return Ok(TermSearchResult {
                                system: sys.name.clone(),
                                status: SearchStatus::NotFound,
                                witnesses: vec![],
                            })
                        }
                    }
                }
            }
        }
        _ => {
            return Err(UalgError::UnsupportedSystem(
                "more than one cross-unknown link group".into(),
            ))
        }
    }

    let witnesses: Vec<TermWitness> = (0..u_count)
        .map(|u| {
            let idx = chosen[u].expect("selected");
            let sp = &closures[u];
            TermWitness {
                unknown: sys.unknowns[u].name.clone(),
                coords: states[u].coords.clone(),
                values: sp.vectors[idx].iter().map(|&v| v as usize).collect(),
                term: Some(sp.term_for(alg, idx)),
            }
        })
        .collect();
    let result = TermSearchResult {
        system: sys.name.clone(),
        status: SearchStatus::Found,
        witnesses,
    };
    debug_assert!(verify_witnesses(alg, sys, &result).unwrap_or(false));
    Ok(result)
}

/// Re-verifies a Found result against every constraint instantiation, by
/// table lookup and, when a term is present, by direct evaluation.
pub fn verify_witnesses(
    alg: &FiniteAlgebra,
    sys: &IdentitySystem,
    result: &TermSearchResult,
) -> Result<bool> {
    if result.status != SearchStatus::Found {
        return Ok(false);
    }
    let lookup = |unknown: usize, tuple: &[usize]| -> Result<usize> {
        let w = result
            .witness(&sys.unknowns[unknown].name)
            .ok_or_else(|| UalgError::Precondition("missing witness".into()))?;
        if w.coords.is_empty() {
            // degenerate: evaluate the term directly
            let t = w.term.as_ref().expect("degenerate witness carries a term");
            return eval_term(alg, t, tuple);
        }
        let v = w
            .value_at(tuple)
            .ok_or_else(|| UalgError::Precondition("missing coordinate".into()))?;
        if let Some(t) = &w.term {
            if eval_term(alg, t, tuple)? != v {
                return Ok(usize::MAX); // term disagrees with table
            }
        }
        Ok(v)
    };
    for assign in enumerate_assignments(sys.vars, alg.size) {
        for c in &sys.constraints {
            match c {
                Constraint::Fixed {
                    unknown,
                    args,
                    value,
                } => {
                    let tuple: Vec<usize> = args.iter().map(|&v| assign[v]).collect();
                    if lookup(*unknown, &tuple)? != assign[*value] {
                        return Ok(false);
                    }
                }
                Constraint::Linked { left, right } => {
                    let lt: Vec<usize> = left.1.iter().map(|&v| assign[v]).collect();
                    let rt: Vec<usize> = right.1.iter().map(|&v| assign[v]).collect();
                    if lookup(left.0, &lt)? != lookup(right.0, &rt)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// Named systems. Abstract variables: x = 0, y = 1, z = 2, u = 3, v = 4.

pub fn maltsev_system() -> IdentitySystem {
    IdentitySystem {
        name: "maltsev".into(),
        unknowns: vec![Unknown {
            name: "p".into(),
            arity: 3,
        }],
        vars: 2,
        constraints: vec![
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 1],
                value: 0,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![1, 1, 0],
                value: 0,
            },
        ],
    }
}

pub fn pixley_system() -> IdentitySystem {
    IdentitySystem {
        name: "pixley".into(),
        unknowns: vec![Unknown {
            name: "p".into(),
            arity: 3,
        }],
        vars: 2,
        constraints: vec![
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 1],
                value: 0,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 0, 1],
                value: 1,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 0],
                value: 0,
            },
        ],
    }
}

pub fn majority_system() -> IdentitySystem {
    IdentitySystem {
        name: "majority".into(),
        unknowns: vec![Unknown {
            name: "m".into(),
            arity: 3,
        }],
        vars: 2,
        constraints: vec![
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 0, 1],
                value: 0,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 0],
                value: 0,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![1, 0, 0],
                value: 0,
            },
        ],
    }
}

/// Quaternary p, q with p(x,y,y,z)=x, p(u,u,v,v)=q(u,u,v,v), q(x,y,y,z)=z.
pub fn quaternary_pq_system() -> IdentitySystem {
    IdentitySystem {
        name: "quaternary-pq".into(),
        unknowns: vec![
            Unknown {
                name: "p".into(),
                arity: 4,
            },
            Unknown {
                name: "q".into(),
                arity: 4,
            },
        ],
        vars: 5,
        constraints: vec![
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 1, 2],
                value: 0,
            },
            Constraint::Linked {
                left: (0, vec![3, 3, 4, 4]),
                right: (1, vec![3, 3, 4, 4]),
            },
            Constraint::Fixed {
                unknown: 1,
                args: vec![0, 1, 1, 2],
                value: 2,
            },
        ],
    }
}

/// The strengthened quaternary system: additionally p(x,y,z,x)=x=q(x,y,z,x).
pub fn quaternary_pqx_system() -> IdentitySystem {
    let mut sys = quaternary_pq_system();
    sys.name = "quaternary-pqx".into();
    sys.constraints.push(Constraint::Fixed {
        unknown: 0,
        args: vec![0, 1, 2, 0],
        value: 0,
    });
    sys.constraints.push(Constraint::Fixed {
        unknown: 1,
        args: vec![0, 1, 2, 0],
        value: 0,
    });
    sys
}

/// Ternary r, s with r(x,y,y)=x, r(x,x,y)=s(x,y,y), s(x,x,y)=y and
/// r(x,y,x)=x=s(x,y,x).
pub fn lipparini_rs_system() -> IdentitySystem {
    IdentitySystem {
        name: "lipparini-rs".into(),
        unknowns: vec![
            Unknown {
                name: "r".into(),
                arity: 3,
            },
            Unknown {
                name: "s".into(),
                arity: 3,
            },
        ],
        vars: 2,
        constraints: vec![
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 1],
                value: 0,
            },
            Constraint::Linked {
                left: (0, vec![0, 0, 1]),
                right: (1, vec![0, 1, 1]),
            },
            Constraint::Fixed {
                unknown: 1,
                args: vec![0, 0, 1],
                value: 1,
            },
            Constraint::Fixed {
                unknown: 0,
                args: vec![0, 1, 0],
                value: 0,
            },
            Constraint::Fixed {
                unknown: 1,
                args: vec![0, 1, 0],
                value: 0,
            },
        ],
    }
}

pub fn find_maltsev(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &maltsev_system(), budget)
}

pub fn find_pixley(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &pixley_system(), budget)
}

pub fn find_majority(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &majority_system(), budget)
}

pub fn find_quaternary_pq(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &quaternary_pq_system(), budget)
}

pub fn find_quaternary_pqx(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &quaternary_pqx_system(), budget)
}

pub fn find_lipparini_rs(alg: &FiniteAlgebra, budget: usize) -> Result<TermSearchResult> {
    solve_identity_system(alg, &lipparini_rs_system(), budget)
}

pub fn system_by_kind(kind: &str) -> Result<IdentitySystem> {
    match kind {
        "maltsev" => Ok(maltsev_system()),
        "pixley" => Ok(pixley_system()),
        "majority" => Ok(majority_system()),
        "quaternary-pq" => Ok(quaternary_pq_system()),
        "quaternary-pqx" => Ok(quaternary_pqx_system()),
        "lipparini-rs" => Ok(lipparini_rs_system()),
        other => Err(UalgError::Precondition(format!(
            "unknown term kind `{}`",
            other
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::subpower::DEFAULT_BUDGET;

    fn b() -> usize {
        DEFAULT_BUDGET
    }

    #[test]
    fn z2_maltsev_found_matches_group_witness() {
        let z2 = corpus::z2();
        let res = find_maltsev(&z2, b()).unwrap();
        assert!(res.found());
        let w = res.witness("p").unwrap();
        for (c, t) in w.coords.iter().enumerate() {
            let expected = (t[0] + t[1] + t[2]) % 2; // x - y + z in Z2
            assert_eq!(w.values[c], expected);
        }
        assert!(verify_witnesses(&z2, &maltsev_system(), &res).unwrap());
    }

    #[test]
    fn lattice_has_no_maltsev() {
        let c2 = corpus::chain2();
        assert_eq!(find_maltsev(&c2, b()).unwrap().status, SearchStatus::NotFound);
    }

    #[test]
    fn degenerate_system_is_found() {
        let sys = IdentitySystem {
            name: "degenerate".into(),
            unknowns: vec![Unknown {
                name: "f".into(),
                arity: 2,
            }],
            vars: 1,
            constraints: vec![],
        };
        let res = solve_identity_system(&corpus::bare(3), &sys, b()).unwrap();
        assert!(res.found());
    }

    #[test]
    fn bool2_pixley_found_and_crosschecked() {
        let alg = corpus::bool2();
        let res = find_pixley(&alg, b()).unwrap();
        assert!(res.found());
        assert!(verify_witnesses(&alg, &pixley_system(), &res).unwrap());
        // analytic witness (x ^ z) v (x ^ ~y) v (~y ^ z) agrees on all coords
        let w = res.witness("p").unwrap();
        for (c, t) in w.coords.iter().enumerate() {
            let (x, y, z) = (t[0], t[1], t[2]);
            let expected = (x & z) | (x & (1 - y)) | ((1 - y) & z);
            assert_eq!(w.values[c], expected);
        }
    }

    #[test]
    fn z2_pixley_not_found() {
        assert_eq!(
            find_pixley(&corpus::z2(), b()).unwrap().status,
            SearchStatus::NotFound
        );
    }

    #[test]
    fn chain2_majority_is_median() {
        let alg = corpus::chain2();
        let res = find_majority(&alg, b()).unwrap();
        assert!(res.found());
        let w = res.witness("m").unwrap();
        for (c, t) in w.coords.iter().enumerate() {
            let (x, y, z) = (t[0], t[1], t[2]);
            let median = (x & y) | (y & z) | (x & z);
            assert_eq!(w.values[c], median);
        }
    }

    #[test]
    fn impl2_goursat_but_not_maltsev() {
        let alg = corpus::impl2();
        assert_eq!(find_maltsev(&alg, b()).unwrap().status, SearchStatus::NotFound);
        let res = find_quaternary_pq(&alg, b()).unwrap();
        assert!(res.found(), "implication algebra should carry quaternary p,q");
        assert!(verify_witnesses(&alg, &quaternary_pq_system(), &res).unwrap());
    }

    #[test]
    fn maltsev_implies_quaternary_by_construction() {
        for alg in [corpus::z2(), corpus::z4(), corpus::klein4(), corpus::bool2()] {
            let m = find_maltsev(&alg, b()).unwrap();
            if !m.found() {
                continue;
            }
            let pq = find_quaternary_pq(&alg, b()).unwrap();
            assert!(pq.found(), "{}", alg.name);
            // and the explicit construction p(x,y,z,w) = m(x,y,z), q = 4th
            // projection satisfies the system
            let mt = m.witness("p").unwrap().term.clone().unwrap();
            let n = alg.size;
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let pxyyz = eval_term(&alg, &mt, &[x, y, y]).unwrap();
                        assert_eq!(pxyyz, x);
                        let puuvv = eval_term(&alg, &mt, &[x, x, y]).unwrap();
                        assert_eq!(puuvv, y);
                        let _ = z;
                    }
                }
            }
        }
    }

    #[test]
    fn pixley_implies_maltsev_and_majority_with_verified_witnesses() {
        let alg = corpus::bool2();
        let res = find_pixley(&alg, b()).unwrap();
        assert!(res.found());
        let p = res.witness("p").unwrap().term.clone().unwrap();
        let n = alg.size;
        // p is itself a Mal'tsev witness
        for x in 0..n {
            for y in 0..n {
                assert_eq!(eval_term(&alg, &p, &[x, y, y]).unwrap(), x);
                assert_eq!(eval_term(&alg, &p, &[y, y, x]).unwrap(), x);
            }
        }
        // m(x,y,z) = p(x, p(x,y,z), z) is a majority witness
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let inner = eval_term(&alg, &p, &[x, y, z]).unwrap();
                    let m = eval_term(&alg, &p, &[x, inner, z]).unwrap();
                    let expected = if x == y || x == z {
                        x
                    } else if y == z {
                        y
                    } else {
                        m
                    };
                    assert_eq!(m, expected);
                }
            }
        }
        assert!(find_maltsev(&alg, b()).unwrap().found());
        assert!(find_majority(&alg, b()).unwrap().found());
    }

    #[test]
    fn lipparini_and_strengthened_quaternary_agree_on_corpus() {
        for alg in corpus::bundled_corpus() {
            let rs = find_lipparini_rs(&alg, b()).unwrap();
            let pqx = find_quaternary_pqx(&alg, b()).unwrap();
            if rs.status == SearchStatus::Inconclusive || pqx.status == SearchStatus::Inconclusive
            {
                continue;
            }
            assert_eq!(rs.found(), pqx.found(), "{}", alg.name);
        }
    }

    /// Independent oracle: depth-bounded term-operation enumeration on
    /// 2-element algebras.
    fn clone_functions(alg: &FiniteAlgebra, arity: usize, depth: usize) -> Vec<Vec<usize>> {
        let n = alg.size;
        let dom = n.pow(arity as u32);
        let tuples: Vec<Vec<usize>> = enumerate_assignments(arity, n);
        let mut fns: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..arity {
            fns.insert(tuples.iter().map(|t| t[i]).collect());
        }
        for _ in 0..depth {
            let current: Vec<Vec<usize>> = fns.iter().cloned().collect();
            for (op, table) in alg.operations.iter().enumerate() {
                let k = table.arity;
                if k == 0 {
                    fns.insert(vec![alg.apply(op, &[]); dom]);
                    continue;
                }
                let mut idx = vec![0usize; k];
                'combos: loop {
                    let mut f = vec![0usize; dom];
                    for (slot, out) in f.iter_mut().enumerate() {
                        let args: Vec<usize> =
                            idx.iter().map(|&i| current[i][slot]).collect();
                        *out = alg.apply(op, &args);
                    }
                    fns.insert(f);
                    let mut pos = k;
                    loop {
                        if pos == 0 {
                            break 'combos;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < current.len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                }
            }
        }
        fns.into_iter().collect()
    }

    #[test]
    fn subpower_search_agrees_with_depth_bounded_enumeration() {
        // exact cross-check on the 2-element corpus algebras for the
        // single-unknown systems
        for alg in [
            corpus::bare(2),
            corpus::z2(),
            corpus::chain2(),
            corpus::bool2(),
            corpus::impl2(),
        ] {
            let fns = clone_functions(&alg, 3, 4);
            let tuples = enumerate_assignments(3, alg.size);
            let check = |constraints: &[(Vec<usize>, usize)]| -> bool {
                fns.iter().any(|f| {
                    tuples.iter().enumerate().all(|(i, t)| {
                        constraints.iter().all(|(pat, val)| {
                            // pat/val are abstract over (x,y): instantiate
                            let mut ok = true;
                            for x in 0..alg.size {
                                for y in 0..alg.size {
                                    let inst: Vec<usize> =
                                        pat.iter().map(|&v| [x, y][v]).collect();
                                    if *t == inst && f[i] != [x, y][*val] {
                                        ok = false;
                                    }
                                }
                            }
                            ok
                        })
                    })
                })
            };
            let maltsev = check(&[(vec![0, 1, 1], 0), (vec![1, 1, 0], 0)]);
            assert_eq!(
                find_maltsev(&alg, b()).unwrap().found(),
                maltsev,
                "maltsev on {}",
                alg.name
            );
            let majority = check(&[
                (vec![0, 0, 1], 0),
                (vec![0, 1, 0], 0),
                (vec![1, 0, 0], 0),
            ]);
            assert_eq!(
                find_majority(&alg, b()).unwrap().found(),
                majority,
                "majority on {}",
                alg.name
            );
            let pixley = check(&[
                (vec![0, 1, 1], 0),
                (vec![0, 0, 1], 1),
                (vec![0, 1, 0], 0),
            ]);
            assert_eq!(
                find_pixley(&alg, b()).unwrap().found(),
                pixley,
                "pixley on {}",
                alg.name
            );
        }
    }
}
