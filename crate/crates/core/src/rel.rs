//! Bitset binary relations between finite carriers, and budgeted enumeration
//! of compatible relations on an algebra.
//!
//! Composition follows the `SR` notation: `compose(s, r)` applies `r` first.
//! Canonical ordering of relations is lexicographic on the bit matrix read in
//! row-major order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::error::{Result, UalgError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinRel {
    dom: usize,
    cod: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BinRel {
    pub fn empty(dom: usize, cod: usize) -> BinRel {
        let words_per_row = cod.div_ceil(64).max(1);
        BinRel {
            dom,
            cod,
            words_per_row,
            bits: vec![0; dom * words_per_row],
        }
    }

    pub fn full(dom: usize, cod: usize) -> BinRel {
        let mut r = BinRel::empty(dom, cod);
        for x in 0..dom {
            for y in 0..cod {
                r.set(x, y);
            }
        }
        r
    }

    pub fn identity(n: usize) -> BinRel {
        let mut r = BinRel::empty(n, n);
        for x in 0..n {
            r.set(x, x);
        }
        r
    }

    pub fn from_pairs(dom: usize, cod: usize, pairs: &[(usize, usize)]) -> BinRel {
        let mut r = BinRel::empty(dom, cod);
        for &(x, y) in pairs {
            r.set(x, y);
        }
        r
    }

    pub fn dom_size(&self) -> usize {
        self.dom
    }

    pub fn cod_size(&self) -> usize {
        self.cod
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        let w = x * self.words_per_row + y / 64;
        self.bits[w] >> (y % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        debug_assert!(x < self.dom && y < self.cod);
        let w = x * self.words_per_row + y / 64;
        self.bits[w] |= 1 << (y % 64);
    }

    pub fn clear(&mut self, x: usize, y: usize) {
        let w = x * self.words_per_row + y / 64;
        self.bits[w] &= !(1 << (y % 64));
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.count());
        for x in 0..self.dom {
            for y in 0..self.cod {
                if self.get(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn check_same_sorts(&self, other: &BinRel) -> Result<()> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(UalgError::SizeMismatch(format!(
                "{}x{} vs {}x{}",
                self.dom, self.cod, other.dom, other.cod
            )));
        }
        Ok(())
    }

    pub fn meet(&self, other: &BinRel) -> Result<BinRel> {
        self.check_same_sorts(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w &= o;
        }
        Ok(r)
    }

    pub fn join_raw(&self, other: &BinRel) -> Result<BinRel> {
        self.check_same_sorts(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        Ok(r)
    }

    pub fn converse(&self) -> BinRel {
        let mut r = BinRel::empty(self.cod, self.dom);
        for x in 0..self.dom {
            for y in 0..self.cod {
                if self.get(x, y) {
                    r.set(y, x);
                }
            }
        }
        r
    }

    pub fn leq(&self, other: &BinRel) -> Result<bool> {
        self.check_same_sorts(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(w, o)| w & !o == 0))
    }

    fn require_square(&self) -> Result<usize> {
        if self.dom != self.cod {
            return Err(UalgError::SizeMismatch(format!(
                "square relation required, got {}x{}",
                self.dom, self.cod
            )));
        }
        Ok(self.dom)
    }

    pub fn refl_close(&self) -> Result<BinRel> {
        let n = self.require_square()?;
        self.join_raw(&BinRel::identity(n))
    }

    pub fn symm_close(&self) -> Result<BinRel> {
        self.require_square()?;
        self.join_raw(&self.converse())
    }

    pub fn trans_close(&self) -> Result<BinRel> {
        let n = self.require_square()?;
        let mut r = self.clone();
        // Warshall on bitset rows
        for k in 0..n {
            for x in 0..n {
                if r.get(x, k) {
                    let (head, tail) = if x < k {
                        let (a, b) = r.bits.split_at_mut(k * r.words_per_row);
                        (
                            &mut a[x * r.words_per_row..(x + 1) * r.words_per_row],
                            &b[..r.words_per_row],
                        )
                    } else if x > k {
                        let (a, b) = r.bits.split_at_mut(x * r.words_per_row);
                        (
                            &mut b[..r.words_per_row],
                            &a[k * r.words_per_row..(k + 1) * r.words_per_row],
                        )
                    } else {
                        continue;
                    };
                    for (w, o) in head.iter_mut().zip(tail.iter()) {
                        *w |= o;
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn is_reflexive(&self) -> bool {
        self.dom == self.cod && (0..self.dom).all(|x| self.get(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.dom == self.cod && *self == self.converse()
    }

    pub fn is_transitive(&self) -> bool {
        self.dom == self.cod && self.trans_close().map(|t| t == *self).unwrap_or(false)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Canonical order: lexicographic on the bit matrix in row-major order.
    pub fn canonical_cmp(&self, other: &BinRel) -> Ordering {
        match (self.dom, self.cod).cmp(&(other.dom, other.cod)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.bits.iter().zip(&other.bits) {
            let d = a ^ b;
            if d != 0 {
                let lowest = d & d.wrapping_neg();
                // the relation missing the first differing pair comes first
                return if a & lowest == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BinRel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.canonical_cmp(other))
    }
}

impl Ord for BinRel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

/// Composite `SR`: apply `r: X -> Y` first, then `s: Y -> Z`.
pub fn compose(s: &BinRel, r: &BinRel) -> Result<BinRel> {
    if r.cod != s.dom {
        return Err(UalgError::SizeMismatch(format!(
            "compose: inner sorts differ ({} vs {})",
            r.cod, s.dom
        )));
    }
    let mut out = BinRel::empty(r.dom, s.cod);
    for x in 0..r.dom {
        for y in 0..r.cod {
            if r.get(x, y) {
                let src = y * s.words_per_row;
                let dst = x * out.words_per_row;
                for w in 0..s.words_per_row {
                    out.bits[dst + w] |= s.bits[src + w];
                }
            }
        }
    }
    Ok(out)
}

/// Left-to-right chain: `chain([a, b, c])` relates x to w when x a y b z c w.
pub fn chain(rels: &[&BinRel]) -> Result<BinRel> {
    let mut iter = rels.iter();
    let first = iter
        .next()
        .ok_or_else(|| UalgError::Precondition("empty chain".into()))?;
    let mut acc = (*first).clone();
    for r in iter {
        acc = compose(r, &acc)?;
    }
    Ok(acc)
}

/// Is `r`, viewed as a subset of A x B, closed under all operations applied
/// componentwise?
pub fn is_compatible_pair(a: &FiniteAlgebra, b: &FiniteAlgebra, r: &BinRel) -> Result<bool> {
    if !a.same_signature(b) {
        return Err(UalgError::SignatureMismatch(format!(
            "{} vs {}",
            a.name, b.name
        )));
    }
    if r.dom != a.size || r.cod != b.size {
        return Err(UalgError::SizeMismatch(format!(
            "relation {}x{} does not match carriers {}x{}",
            r.dom, r.cod, a.size, b.size
        )));
    }
    let pairs = r.pairs();
    for (i, op_a) in a.operations.iter().enumerate() {
        let j = b.op_index(&op_a.name).expect("signature checked");
        let k = op_a.arity;
        if k == 0 {
            let ca = a.apply(i, &[]);
            let cb = b.apply(j, &[]);
            if !r.get(ca, cb) {
                return Ok(false);
            }
            continue;
        }
        if pairs.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; k];
        let mut args_a = vec![0usize; k];
        let mut args_b = vec![0usize; k];
        loop {
            for (pos, &p) in idx.iter().enumerate() {
                args_a[pos] = pairs[p].0;
                args_b[pos] = pairs[p].1;
            }
            if !r.get(a.apply(i, &args_a), b.apply(j, &args_b)) {
                return Ok(false);
            }
            // advance the odometer
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pairs.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if pos == 0 && idx[0] == 0 {
                break;
            }
        }
    }
    Ok(true)
}

pub fn is_compatible(alg: &FiniteAlgebra, r: &BinRel) -> Result<bool> {
    is_compatible_pair(alg, alg, r)
}

/// Set-level positivity certificate: symmetric, and every edge carries both
/// loops. Equivalent to `e = R°R` for some set relation R.
pub fn is_positive_setlevel(e: &BinRel) -> Result<bool> {
    e.require_square()?;
    if !e.is_symmetric() {
        return Ok(false);
    }
    for (x, y) in e.pairs() {
        if !e.get(x, x) || !e.get(y, y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least subset of A x A containing `seed` and closed under the operations.
pub fn compatible_closure(alg: &FiniteAlgebra, seed: &BinRel) -> BinRel {
    let n = alg.size;
    let mut rel = seed.clone();
    for (i, op) in alg.operations.iter().enumerate() {
        if op.arity == 0 {
            let c = alg.apply(i, &[]);
            rel.set(c, c);
        }
    }
    loop {
        let mut changed = false;
        let pairs = rel.pairs();
        for (i, op) in alg.operations.iter().enumerate() {
            let k = op.arity;
            if k == 0 || pairs.is_empty() {
                continue;
            }
            let mut idx = vec![0usize; k];
            let mut args_a = vec![0usize; k];
            let mut args_b = vec![0usize; k];
            'tuples: loop {
                for (pos, &p) in idx.iter().enumerate() {
                    args_a[pos] = pairs[p].0;
                    args_b[pos] = pairs[p].1;
                }
                let (x, y) = (alg.apply(i, &args_a), alg.apply(i, &args_b));
                debug_assert!(x < n && y < n);
                if !rel.get(x, y) {
                    rel.set(x, y);
                    changed = true;
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < pairs.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelClass {
    Congruence,
    ReflexiveCompatible,
    ReflexivePositiveCompatible,
    AllCompatible,
}

impl RelClass {
    pub fn parse(text: &str) -> Result<RelClass> {
        match text {
            "cong" | "congruence" | "equiv" => Ok(RelClass::Congruence),
            "refl" | "reflexive" => Ok(RelClass::ReflexiveCompatible),
            "pos" | "positive" => Ok(RelClass::ReflexivePositiveCompatible),
            "all" => Ok(RelClass::AllCompatible),
            other => Err(UalgError::Precondition(format!(
                "unknown relation class `{}`",
                other
            ))),
        }
    }

    /// Membership predicate for the class (ignoring enumeration strategy).
    pub fn contains(&self, alg: &FiniteAlgebra, r: &BinRel) -> Result<bool> {
        let compatible = is_compatible(alg, r)?;
        Ok(match self {
            RelClass::Congruence => compatible && r.is_equivalence(),
            RelClass::ReflexiveCompatible => compatible && r.is_reflexive(),
            RelClass::ReflexivePositiveCompatible => {
                compatible && r.is_reflexive() && is_positive_setlevel(r)?
            }
            RelClass::AllCompatible => compatible,
        })
    }
}

/// Result of enumerating a relation class. `exhaustive` is false when the
/// enumerator fell back to the sampled generator-set family.
#[derive(Debug, Clone)]
pub struct RelEnumeration {
    pub rels: Vec<BinRel>,
    pub exhaustive: bool,
    /// For the positive class: a compatible witness R with R°R = e, one per
    /// relation, in the same order.
    pub positive_witnesses: Option<Vec<BinRel>>,
}

/// Exhaustive subset enumeration is used when 2^(n^2) <= 2^20, i.e. n <= 4.
const EXHAUSTIVE_BITS: usize = 20;

pub fn enumerate_relations(
    alg: &FiniteAlgebra,
    class: RelClass,
    budget: usize,
) -> Result<RelEnumeration> {
    let n = alg.size;
    match class {
        RelClass::Congruence => {
            let congs = crate::congruence::all_congruences(alg)?;
            Ok(RelEnumeration {
                rels: congs.into_iter().map(|c| c.rel).collect(),
                exhaustive: true,
                positive_witnesses: None,
            })
        }
        RelClass::ReflexiveCompatible => enumerate_subalgebras(alg, true, budget),
        RelClass::AllCompatible => enumerate_subalgebras(alg, false, budget),
        RelClass::ReflexivePositiveCompatible => {
            let refl = enumerate_subalgebras(alg, true, budget)?;
            let all = enumerate_subalgebras(alg, false, budget)?;
            let mut seen = std::collections::BTreeMap::new();
            for witness in refl.rels.iter().chain(all.rels.iter()) {
                // e = R°R (common-successor form): x e z iff x R y and z R y
                let e = compose(&witness.converse(), witness)?;
                if e.is_reflexive() {
                    seen.entry(e).or_insert_with(|| witness.clone());
                }
            }
            let (rels, positive_witnesses): (Vec<_>, Vec<_>) = seen.into_iter().unzip();
            let n_fits = n * n <= EXHAUSTIVE_BITS && refl.exhaustive && all.exhaustive;
            Ok(RelEnumeration {
                rels,
                exhaustive: n_fits,
                positive_witnesses: Some(positive_witnesses),
            })
        }
    }
}

fn enumerate_subalgebras(
    alg: &FiniteAlgebra,
    reflexive: bool,
    _budget: usize,
) -> Result<RelEnumeration> {
    let n = alg.size;
    let mut rels = Vec::new();
    if n * n <= EXHAUSTIVE_BITS {
        let free: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| !reflexive || x != y)
            .collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut r = if reflexive {
                BinRel::identity(n)
            } else {
                BinRel::empty(n, n)
            };
            for (b, &(x, y)) in free.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    r.set(x, y);
                }
            }
            if is_compatible(alg, &r)? {
                rels.push(r);
            }
        }
        rels.sort();
        Ok(RelEnumeration {
            rels,
            exhaustive: true,
            positive_witnesses: None,
        })
    } else {
        // sampled: closures of the diagonal (or constants) plus one or two pairs
        let mut set = std::collections::BTreeSet::new();
        let base = if reflexive {
            BinRel::identity(n)
        } else {
            BinRel::empty(n, n)
        };
        set.insert(compatible_closure(alg, &base));
        let all_pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .collect();
        for &p in &all_pairs {
            let mut seed = base.clone();
            seed.set(p.0, p.1);
            set.insert(compatible_closure(alg, &seed));
        }
        for &p in &all_pairs {
            for &q in &all_pairs {
                let mut seed = base.clone();
                seed.set(p.0, p.1);
                seed.set(q.0, q.1);
                set.insert(compatible_closure(alg, &seed));
            }
        }
        let rels: Vec<BinRel> = set
            .into_iter()
            .filter(|r| !reflexive || r.is_reflexive())
            .collect();
        Ok(RelEnumeration {
            rels,
            exhaustive: false,
            positive_witnesses: None,
        })
    }
}

/// Serializable relation literal: explicit sorts plus a pair list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelLiteral {
    pub dom: usize,
    pub cod: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl RelLiteral {
    pub fn of(r: &BinRel) -> RelLiteral {
        RelLiteral {
            dom: r.dom_size(),
            cod: r.cod_size(),
            pairs: r.pairs(),
        }
    }

    pub fn to_rel(&self) -> Result<BinRel> {
        for &(x, y) in &self.pairs {
            if x >= self.dom || y >= self.cod {
                return Err(UalgError::Precondition(format!(
                    "pair ({},{}) outside {}x{}",
                    x, y, self.dom, self.cod
                )));
            }
        }
        Ok(BinRel::from_pairs(self.dom, self.cod, &self.pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn compose_examples() {
        let r = BinRel::from_pairs(2, 2, &[(0, 1)]);
        let s = BinRel::from_pairs(2, 2, &[(1, 0)]);
        assert_eq!(compose(&s, &r).unwrap(), BinRel::from_pairs(2, 2, &[(0, 0)]));
        let id = BinRel::identity(2);
        assert_eq!(compose(&id, &r).unwrap(), r);
        let r = BinRel::from_pairs(2, 2, &[(0, 0), (0, 1)]);
        let s = BinRel::from_pairs(2, 2, &[(0, 0), (1, 0)]);
        assert_eq!(compose(&s, &r).unwrap(), BinRel::from_pairs(2, 2, &[(0, 0)]));
    }

    #[test]
    fn converse_examples() {
        let r = BinRel::from_pairs(2, 2, &[(0, 1)]);
        assert_eq!(r.converse(), BinRel::from_pairs(2, 2, &[(1, 0)]));
        assert_eq!(r.converse().converse(), r);
        let sym = BinRel::from_pairs(2, 2, &[(0, 1), (1, 0)]);
        assert_eq!(sym.converse(), sym);
        let r = BinRel::from_pairs(2, 2, &[(0, 0), (1, 0)]);
        assert_eq!(r.converse(), BinRel::from_pairs(2, 2, &[(0, 0), (0, 1)]));
    }

    #[test]
    fn meet_and_closures() {
        let r = BinRel::from_pairs(3, 3, &[(0, 1), (1, 2)]);
        assert_eq!(r.meet(&BinRel::full(3, 3)).unwrap(), r);
        assert_eq!(
            r.trans_close().unwrap(),
            BinRel::from_pairs(3, 3, &[(0, 1), (1, 2), (0, 2)])
        );
        let s = BinRel::from_pairs(3, 3, &[(0, 1)]);
        assert_eq!(
            s.symm_close().unwrap(),
            BinRel::from_pairs(3, 3, &[(0, 1), (1, 0)])
        );
        assert!(s.refl_close().unwrap().is_reflexive());
    }

    #[test]
    fn compatibility_examples() {
        let z2 = corpus::z2();
        let diag = BinRel::identity(2);
        assert!(is_compatible(&z2, &diag).unwrap());
        let r = BinRel::from_pairs(2, 2, &[(0, 0), (1, 1), (0, 1)]);
        assert!(!is_compatible(&z2, &r).unwrap());
        let bare = corpus::bare(2);
        assert!(is_compatible(&bare, &r).unwrap());
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive_setlevel(&BinRel::identity(3)).unwrap());
        assert!(is_positive_setlevel(&BinRel::full(3, 3)).unwrap());
        let no_loops = BinRel::from_pairs(2, 2, &[(0, 1), (1, 0)]);
        assert!(!is_positive_setlevel(&no_loops).unwrap());
    }

    #[test]
    fn positivity_union_of_squares_oracle() {
        // for symmetric square e: positive iff e equals the union of
        // {x,y} x {x,y} over its edges
        let n = 3;
        for mask in 0u32..(1 << (n * n)) {
            let mut e = BinRel::empty(n, n);
            for b in 0..(n * n) {
                if mask >> b & 1 == 1 {
                    e.set(b / n, b % n);
                }
            }
            if !e.is_symmetric() {
                continue;
            }
            let mut squares = BinRel::empty(n, n);
            for (x, y) in e.pairs() {
                squares.set(x, x);
                squares.set(x, y);
                squares.set(y, x);
                squares.set(y, y);
            }
            assert_eq!(is_positive_setlevel(&e).unwrap(), squares == e);
        }
    }

    #[test]
    fn enumerate_congruences() {
        let z2 = corpus::z2();
        let e = enumerate_relations(&z2, RelClass::Congruence, 1 << 20).unwrap();
        assert_eq!(e.rels.len(), 2);
        let k4 = corpus::klein4();
        let e = enumerate_relations(&k4, RelClass::Congruence, 1 << 20).unwrap();
        assert_eq!(e.rels.len(), 5);
    }

    #[test]
    fn enumerate_all_on_bare2() {
        let bare = corpus::bare(2);
        let e = enumerate_relations(&bare, RelClass::AllCompatible, 1 << 20).unwrap();
        assert_eq!(e.rels.len(), 16);
        assert!(e.exhaustive);
    }

    #[test]
    fn enumerated_relations_satisfy_class_predicates() {
        for alg in [corpus::z2(), corpus::chain2(), corpus::bare(3), corpus::impl2()] {
            for class in [
                RelClass::Congruence,
                RelClass::ReflexiveCompatible,
                RelClass::ReflexivePositiveCompatible,
                RelClass::AllCompatible,
            ] {
                let e = enumerate_relations(&alg, class, 1 << 20).unwrap();
                for r in &e.rels {
                    assert!(class.contains(&alg, r).unwrap(), "{} {:?}", alg.name, class);
                }
                if let Some(wit) = &e.positive_witnesses {
                    for (e_rel, w) in e.rels.iter().zip(wit) {
                        assert!(is_compatible(&alg, w).unwrap());
                        assert_eq!(&compose(&w.converse(), w).unwrap(), e_rel);
                        assert!(is_positive_setlevel(e_rel).unwrap());
                    }
                }
            }
        }
    }
}
