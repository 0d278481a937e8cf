//! Worklist closure of generated subpowers of A^m, with provenance for term
//! reconstruction.
//!
//! Vectors are indexed by an external coordinate set (constraint tuples in the
//! term searches). Closure order is canonical FIFO; reporting order is
//! lexicographic. Constants are seeded into every closure.

use std::collections::HashMap;

use crate::algebra::{FiniteAlgebra, Term};

pub type TupleVector = Vec<u8>;

pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Work (op application) caps as multiples of the element budget. The packed
/// path gets a larger factor because each application is a few word ops,
/// while generic applications cost O(width) table lookups plus a hash.
const GENERIC_WORK_FACTOR: usize = 4;
const PACKED_WORK_FACTOR: usize = 256;

#[derive(Debug, Clone)]
pub enum Provenance {
    Generator(usize),
    /// Arity-0 operation seeded into the closure.
    Constant(usize),
    Applied { op: usize, args: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct Subpower {
    pub width: usize,
    /// Insertion (FIFO) order.
    pub vectors: Vec<TupleVector>,
    pub provenance: Vec<Provenance>,
    index: HashMap<TupleVector, usize>,
}

impl Subpower {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.index.contains_key(v)
    }

    pub fn position(&self, v: &[u8]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Vectors in lexicographic order (the reporting order).
    pub fn sorted(&self) -> Vec<TupleVector> {
        let mut out = self.vectors.clone();
        out.sort();
        out
    }

    /// Reconstructs an explicit term for the vector at insertion index `idx`.
    /// Shared subterms are reused, so the result is a DAG behind `Rc`.
    pub fn term_for(&self, alg: &FiniteAlgebra, idx: usize) -> Term {
        let mut memo: Vec<Option<Term>> = vec![None; self.vectors.len()];
        self.term_rec(alg, idx, &mut memo)
    }

    fn term_rec(&self, alg: &FiniteAlgebra, idx: usize, memo: &mut Vec<Option<Term>>) -> Term {
        if let Some(t) = &memo[idx] {
            return t.clone();
        }
        let t = match &self.provenance[idx] {
            Provenance::Generator(i) => Term::var(*i),
            Provenance::Constant(op) => Term::apply(alg.operations[*op].name.clone(), vec![]),
            Provenance::Applied { op, args } => {
                let children = args
                    .iter()
                    .map(|&a| self.term_rec(alg, a, memo))
                    .collect();
                Term::apply(alg.operations[*op].name.clone(), children)
            }
        };
        memo[idx] = Some(t.clone());
        t
    }
}

#[derive(Debug)]
pub enum ClosureOutcome {
    Closed(Subpower),
    /// The closure would exceed the budget; no partial set is returned.
    BudgetExceeded,
}

impl ClosureOutcome {
    pub fn closed(self) -> Option<Subpower> {
        match self {
            ClosureOutcome::Closed(s) => Some(s),
            ClosureOutcome::BudgetExceeded => None,
        }
    }
}

/// Least subset of A^m containing `generators` (and all constant vectors)
/// closed under the operations applied coordinatewise.
pub fn generate_subpower(
    alg: &FiniteAlgebra,
    width: usize,
    generators: &[TupleVector],
    budget: usize,
) -> ClosureOutcome {
    if alg.size == 2 && width <= 64 && alg.operations.iter().all(|t| t.arity <= 2) {
        return generate_subpower_packed(alg, width, generators, budget);
    }
    let mut sp = Subpower {
        width,
        vectors: Vec::new(),
        provenance: Vec::new(),
        index: HashMap::new(),
    };
    let push = |sp: &mut Subpower, v: TupleVector, p: Provenance| -> bool {
        if sp.index.contains_key(&v) {
            return true;
        }
        if sp.vectors.len() >= budget {
            return false;
        }
        sp.index.insert(v.clone(), sp.vectors.len());
        sp.vectors.push(v);
        sp.provenance.push(p);
        true
    };
    for (i, g) in generators.iter().enumerate() {
        debug_assert_eq!(g.len(), width);
        debug_assert!(g.iter().all(|&x| (x as usize) < alg.size));
        if !push(&mut sp, g.clone(), Provenance::Generator(i)) {
            return ClosureOutcome::BudgetExceeded;
        }
    }
    for (op, table) in alg.operations.iter().enumerate() {
        if table.arity == 0 {
            let c = alg.apply(op, &[]) as u8;
            if !push(&mut sp, vec![c; width], Provenance::Constant(op)) {
                return ClosureOutcome::BudgetExceeded;
            }
        }
    }
    // the budget also caps closure work (op applications): a closure can
    // saturate under the element budget yet still need quadratically many
    // confirming applications, so unbounded work would hang on pathological
    // (e.g. corrupted-table) inputs
    let work_cap = budget.saturating_mul(GENERIC_WORK_FACTOR);
    let mut work = 0usize;
    let mut out = vec![0u8; width];
    let mut frontier_start = 0usize;
    loop {
        let round_len = sp.vectors.len();
        if frontier_start == round_len {
            break;
        }
        for (op, table) in alg.operations.iter().enumerate() {
            let k = table.arity;
            if k == 0 {
                continue;
            }
            // all k-tuples over the current set with at least one index in
            // the frontier
            let table = &alg.operations[op].table;
            let n = alg.size;
            let mut idx = vec![0usize; k];
            'tuples: loop {
                if idx.iter().any(|&i| i >= frontier_start) {
                    work += 1;
                    if work > work_cap {
                        return ClosureOutcome::BudgetExceeded;
                    }
                    match k {
                        1 => {
                            let a = &sp.vectors[idx[0]];
                            for (c, slot) in out.iter_mut().enumerate() {
                                *slot = table[a[c] as usize] as u8;
                            }
                        }
                        2 => {
                            let (a, b) = (&sp.vectors[idx[0]], &sp.vectors[idx[1]]);
                            for (c, slot) in out.iter_mut().enumerate() {
                                *slot = table[a[c] as usize * n + b[c] as usize] as u8;
                            }
                        }
                        _ => {
                            let mut args = vec![0usize; k];
                            for (c, slot) in out.iter_mut().enumerate() {
                                for (pos, &i) in idx.iter().enumerate() {
                                    args[pos] = sp.vectors[i][c] as usize;
                                }
                                *slot = alg.apply(op, &args) as u8;
                            }
                        }
                    }
                    if !sp.index.contains_key(out.as_slice())
                        && !push(
                            &mut sp,
                            out.clone(),
                            Provenance::Applied {
                                op,
                                args: idx.clone(),
                            },
                        )
                    {
                        return ClosureOutcome::BudgetExceeded;
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < round_len {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        frontier_start = round_len;
    }
    ClosureOutcome::Closed(sp)
}

/// Specialization for 2-element carriers: a vector is one u64 bitmask, ops
/// act as branchless boolean formulas, and the pair loop touches no heap.
/// Same closure order and provenance as the generic path.
fn generate_subpower_packed(
    alg: &FiniteAlgebra,
    width: usize,
    generators: &[TupleVector],
    budget: usize,
) -> ClosureOutcome {
    let mask: u64 = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    let pack = |v: &[u8]| -> u64 {
        v.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    };
    let mut vectors: Vec<u64> = Vec::new();
    let mut provenance: Vec<Provenance> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let push = |vectors: &mut Vec<u64>,
                    provenance: &mut Vec<Provenance>,
                    index: &mut HashMap<u64, usize>,
                    v: u64,
                    p: Provenance|
     -> Option<bool> {
        if index.contains_key(&v) {
            return Some(false);
        }
        if vectors.len() >= budget {
            return None;
        }
        index.insert(v, vectors.len());
        vectors.push(v);
        provenance.push(p);
        Some(true)
    };
    for (i, g) in generators.iter().enumerate() {
        debug_assert_eq!(g.len(), width);
        debug_assert!(g.iter().all(|&x| x < 2));
        if push(
            &mut vectors,
            &mut provenance,
            &mut index,
            pack(g),
            Provenance::Generator(i),
        )
        .is_none()
        {
            return ClosureOutcome::BudgetExceeded;
        }
    }
    for (op, table) in alg.operations.iter().enumerate() {
        if table.arity == 0 {
            let c = if alg.apply(op, &[]) == 1 { mask } else { 0 };
            if push(
                &mut vectors,
                &mut provenance,
                &mut index,
                c,
                Provenance::Constant(op),
            )
            .is_none()
            {
                return ClosureOutcome::BudgetExceeded;
            }
        }
    }
    // per-op minterm masks: out = OR of (input minterm AND table-entry mask);
    // ops visited in declared order so insertion order (and hence provenance)
    // matches the generic path exactly
    let minterms: Vec<[u64; 4]> = alg
        .operations
        .iter()
        .map(|t| {
            let m = |e: usize| {
                if t.table.get(e).copied() == Some(1) {
                    mask
                } else {
                    0
                }
            };
            [m(0), m(1), m(2), m(3)]
        })
        .collect();
    let work_cap = budget.saturating_mul(PACKED_WORK_FACTOR);
    let mut work = 0usize;
    let mut frontier_start = 0usize;
    loop {
        let round_len = vectors.len();
        if frontier_start == round_len {
            break;
        }
        for (op, table) in alg.operations.iter().enumerate() {
            match table.arity {
                1 => {
                    let [m0, m1, _, _] = minterms[op];
                    for i in frontier_start..round_len {
                        work += 1;
                        if work > work_cap {
                            return ClosureOutcome::BudgetExceeded;
                        }
                        let a = vectors[i];
                        let out = ((!a & m0) | (a & m1)) & mask;
                        if push(
                            &mut vectors,
                            &mut provenance,
                            &mut index,
                            out,
                            Provenance::Applied { op, args: vec![i] },
                        )
                        .is_none()
                        {
                            return ClosureOutcome::BudgetExceeded;
                        }
                    }
                }
                2 => {
                    let [m00, m01, m10, m11] = minterms[op];
                    for i in 0..round_len {
                        for j in 0..round_len {
                            if i < frontier_start && j < frontier_start {
                                continue;
                            }
                            work += 1;
                            if work > work_cap {
                                return ClosureOutcome::BudgetExceeded;
                            }
                            let (a, b) = (vectors[i], vectors[j]);
                            let out = ((!a & !b & m00)
                                | (!a & b & m01)
                                | (a & !b & m10)
                                | (a & b & m11))
                                & mask;
                            if !index.contains_key(&out)
                                && push(
                                    &mut vectors,
                                    &mut provenance,
                                    &mut index,
                                    out,
                                    Provenance::Applied {
                                        op,
                                        args: vec![i, j],
                                    },
                                )
                                .is_none()
                            {
                                return ClosureOutcome::BudgetExceeded;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        frontier_start = round_len;
    }
    let unpacked: Vec<TupleVector> = vectors
        .iter()
        .map(|&p| (0..width).map(|i| ((p >> i) & 1) as u8).collect())
        .collect();
    let sp_index: HashMap<TupleVector, usize> = unpacked
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    ClosureOutcome::Closed(Subpower {
        width,
        vectors: unpacked,
        provenance,
        index: sp_index,
    })
}
