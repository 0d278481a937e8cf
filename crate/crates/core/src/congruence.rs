//! Congruences, the congruence lattice, and permutability predicates.
//!
//! Congruences are enumerated by filtering all partitions of the carrier
//! (restricted growth strings), which is exhaustive and feasible up to n = 8
//! (Bell(8) = 4140). Joins are computed by re-closing the union under both the
//! equivalence axioms and the operations.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{Result, UalgError};
use crate::rel::{compatible_closure, compose, is_compatible, BinRel};

pub const MAX_EXHAUSTIVE_CARRIER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    /// Block id per element, normalized to first-occurrence order.
    pub partition: Vec<usize>,
    pub rel: BinRel,
}

impl Congruence {
    pub fn from_partition(partition: &[usize]) -> Congruence {
        let partition = normalize_partition(partition);
        let n = partition.len();
        let mut rel = BinRel::empty(n, n);
        for x in 0..n {
            for y in 0..n {
                if partition[x] == partition[y] {
                    rel.set(x, y);
                }
            }
        }
        Congruence { partition, rel }
    }

    pub fn from_rel(rel: &BinRel) -> Result<Congruence> {
        if !rel.is_equivalence() {
            return Err(UalgError::Precondition(
                "relation is not an equivalence".into(),
            ));
        }
        let n = rel.dom_size();
        let mut partition = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if partition[x] == usize::MAX {
                for y in x..n {
                    if rel.get(x, y) {
                        partition[y] = next;
                    }
                }
                next += 1;
            }
        }
        Ok(Congruence {
            partition,
            rel: rel.clone(),
        })
    }

    pub fn block_count(&self) -> usize {
        self.partition.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.partition.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks
    }

    pub fn is_diagonal(&self) -> bool {
        self.block_count() == self.partition.len()
    }
}

fn normalize_partition(partition: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    let mut next = 0;
    partition
        .iter()
        .map(|&b| {
            *map.entry(b).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

/// Least compatible equivalence containing `pairs`: alternate equivalence
/// closure and operation closure until a fixpoint.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Congruence {
    let n = alg.size;
    let mut rel = BinRel::identity(n);
    for &(x, y) in pairs {
        rel.set(x, y);
    }
    loop {
        let closed = rel
            .symm_close()
            .and_then(|r| r.trans_close())
            .expect("square");
        let compat = compatible_closure(alg, &closed);
        if compat == rel {
            break;
        }
        rel = compat;
    }
    Congruence::from_rel(&rel).expect("fixpoint is an equivalence")
}

/// All partitions of {0..n-1} as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(current: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        let n = current.len();
        if pos == n {
            out.push(current.clone());
            return;
        }
        for b in 0..=max_used + 1 {
            current[pos] = b;
            rec(current, pos + 1, max_used.max(b), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    current[0] = 0;
    rec(&mut current, 1, 0, &mut out);
    out
}

/// Canonical order for lattice elements: block count descending, then
/// partition vector lexicographic.
fn canonical_key(c: &Congruence) -> (std::cmp::Reverse<usize>, Vec<usize>) {
    (std::cmp::Reverse(c.block_count()), c.partition.clone())
}

pub fn all_congruences(alg: &FiniteAlgebra) -> Result<Vec<Congruence>> {
    if alg.size > MAX_EXHAUSTIVE_CARRIER {
        return Err(UalgError::CarrierTooLarge(format!(
            "exhaustive congruence enumeration supports n <= {}, got {}",
            MAX_EXHAUSTIVE_CARRIER, alg.size
        )));
    }
    let mut congs = Vec::new();
    for p in partitions(alg.size) {
        let c = Congruence::from_partition(&p);
        if is_compatible(alg, &c.rel)? {
            congs.push(c);
        }
    }
    congs.sort_by_key(canonical_key);
    Ok(congs)
}

#[derive(Debug, Clone)]
pub struct CongLattice {
    pub elements: Vec<Congruence>,
    /// leq[i][j] iff elements[i] <= elements[j]
    pub leq: Vec<Vec<bool>>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

impl CongLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> usize {
        (0..self.len())
            .find(|&i| self.elements[i].is_diagonal())
            .expect("diagonal is always a congruence")
    }

    pub fn top(&self) -> usize {
        (0..self.len())
            .find(|&i| self.elements[i].block_count() == 1)
            .expect("full relation is always a congruence")
    }
}

pub fn congruence_lattice(alg: &FiniteAlgebra) -> Result<CongLattice> {
    let elements = all_congruences(alg)?;
    let k = elements.len();
    let mut leq = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            leq[i][j] = elements[i].rel.leq(&elements[j].rel)?;
        }
    }
    let index_of = |rel: &BinRel| -> usize {
        elements
            .iter()
            .position(|c| &c.rel == rel)
            .expect("lattice closed under meet and join")
    };
    let mut meet = vec![vec![0usize; k]; k];
    let mut join = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            meet[i][j] = index_of(&elements[i].rel.meet(&elements[j].rel)?);
            let union = elements[i].rel.join_raw(&elements[j].rel)?;
            let gen = congruence_generated(alg, &union.pairs());
            join[i][j] = index_of(&gen.rel);
        }
    }
    Ok(CongLattice {
        elements,
        leq,
        meet,
        join,
    })
}

/// Modular law over all triples: x <= z implies x v (y ^ z) = (x v y) ^ z.
pub fn is_modular(l: &CongLattice) -> bool {
    modularity_violation(l).is_none()
}

pub fn modularity_violation(l: &CongLattice) -> Option<(usize, usize, usize)> {
    let k = l.len();
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                if l.leq[x][z] && l.join[x][l.meet[y][z]] != l.meet[l.join[x][y]][z] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// Horn sentence over all triples: a ^ b <= c implies a ^ (b v c) <= c.
pub fn is_distributive(l: &CongLattice) -> bool {
    distributivity_violation(l).is_none()
}

pub fn distributivity_violation(l: &CongLattice) -> Option<(usize, usize, usize)> {
    let k = l.len();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if l.leq[l.meet[a][b]][c] && !l.leq[l.meet[a][l.join[b][c]]][c] {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutabilityReport {
    pub perm2: bool,
    pub perm3: bool,
    /// On failure: indices of the violating congruence pair plus an element
    /// pair in the symmetric difference of the two composites.
    pub perm2_witness: Option<((usize, usize), (usize, usize))>,
    pub perm3_witness: Option<((usize, usize), (usize, usize))>,
}

pub fn permutability(alg: &FiniteAlgebra) -> Result<PermutabilityReport> {
    let congs = all_congruences(alg)?;
    let mut report = PermutabilityReport {
        perm2: true,
        perm3: true,
        perm2_witness: None,
        perm3_witness: None,
    };
    'outer2: for (i, a) in congs.iter().enumerate() {
        for (j, b) in congs.iter().enumerate() {
            let ab = compose(&a.rel, &b.rel)?;
            let ba = compose(&b.rel, &a.rel)?;
            if ab != ba {
                let diff = first_diff(&ab, &ba);
                report.perm2 = false;
                report.perm2_witness = Some(((i, j), diff));
                break 'outer2;
            }
        }
    }
    'outer3: for (i, a) in congs.iter().enumerate() {
        for (j, b) in congs.iter().enumerate() {
            let aba = compose(&a.rel, &compose(&b.rel, &a.rel)?)?;
            let bab = compose(&b.rel, &compose(&a.rel, &b.rel)?)?;
            if aba != bab {
                let diff = first_diff(&aba, &bab);
                report.perm3 = false;
                report.perm3_witness = Some(((i, j), diff));
                break 'outer3;
            }
        }
    }
    Ok(report)
}

fn first_diff(a: &BinRel, b: &BinRel) -> (usize, usize) {
    for x in 0..a.dom_size() {
        for y in 0..a.cod_size() {
            if a.get(x, y) != b.get(x, y) {
                return (x, y);
            }
        }
    }
    unreachable!("relations differ")
}
