//! Finite algebras as dense operation tables, plus term evaluation.
//!
//! The carrier of an algebra of size `n` is `{0, .., n-1}`. An operation of
//! arity `k` is a row-major table of length `n^k`. Products pair elements as
//! `i * |b| + j`; every encoding in the crate follows that convention.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UalgError};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperationTable {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OperationTable {
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<usize>) -> Self {
        OperationTable {
            name: name.into(),
            arity,
            table,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    #[serde(default)]
    pub operations: Vec<OperationTable>,
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        size: usize,
        operations: Vec<OperationTable>,
    ) -> Result<Self> {
        let alg = FiniteAlgebra {
            name: name.into(),
            size,
            operations,
        };
        alg.validate()?;
        Ok(alg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(UalgError::InvalidAlgebra("size must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for op in &self.operations {
            if !seen.insert(op.name.clone()) {
                return Err(UalgError::InvalidAlgebra(format!(
                    "duplicate operation name `{}`",
                    op.name
                )));
            }
            let expected = self.size.checked_pow(op.arity as u32).ok_or_else(|| {
                UalgError::InvalidAlgebra(format!("table for `{}` overflows", op.name))
            })?;
            if op.table.len() != expected {
                return Err(UalgError::InvalidAlgebra(format!(
                    "table for `{}` has {} entries, expected {}",
                    op.name,
                    op.table.len(),
                    expected
                )));
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v >= self.size) {
                return Err(UalgError::InvalidAlgebra(format!(
                    "table for `{}` contains {} outside the carrier",
                    op.name, bad
                )));
            }
        }
        Ok(())
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.operations.iter().position(|o| o.name == name)
    }

    /// Table lookup; `args` must match the operation's arity and stay in the carrier.
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let table = &self.operations[op];
        debug_assert_eq!(args.len(), table.arity);
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < self.size);
            idx = idx * self.size + a;
        }
        table.table[idx]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let alg: FiniteAlgebra = serde_json::from_str(text)?;
        alg.validate()?;
        Ok(alg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serializes")
    }

    /// True when `other` has the same operation names and arities, in any order.
    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        if self.operations.len() != other.operations.len() {
            return false;
        }
        self.operations.iter().all(|op| {
            other
                .operations
                .iter()
                .any(|o| o.name == op.name && o.arity == op.arity)
        })
    }

    /// One-element algebra over the same signature; every operation collapses to 0.
    pub fn trivial_like(&self) -> FiniteAlgebra {
        FiniteAlgebra {
            name: format!("{}-trivial", self.name),
            size: 1,
            operations: self
                .operations
                .iter()
                .map(|op| OperationTable::new(op.name.clone(), op.arity, vec![0]))
                .collect(),
        }
    }
}

/// Componentwise product; element `(i, j)` is encoded as `i * |b| + j`.
pub fn product_algebra(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    if !a.same_signature(b) {
        return Err(UalgError::SignatureMismatch(format!(
            "{} and {} have different signatures",
            a.name, b.name
        )));
    }
    let size = a.size * b.size;
    let mut operations = Vec::new();
    for op_a in &a.operations {
        let ib = b.op_index(&op_a.name).expect("signature checked");
        let arity = op_a.arity;
        let total = size.pow(arity as u32);
        let mut table = vec![0usize; total];
        let mut args = vec![0usize; arity];
        for (idx, slot) in table.iter_mut().enumerate() {
            let mut rest = idx;
            for pos in (0..arity).rev() {
                args[pos] = rest % size;
                rest /= size;
            }
            let args_a: Vec<usize> = args.iter().map(|&x| x / b.size).collect();
            let args_b: Vec<usize> = args.iter().map(|&x| x % b.size).collect();
            let ia = a.op_index(&op_a.name).unwrap();
            *slot = a.apply(ia, &args_a) * b.size + b.apply(ib, &args_b);
        }
        operations.push(OperationTable::new(op_a.name.clone(), arity, table));
    }
    FiniteAlgebra::new(format!("{}x{}", a.name, b.name), size, operations)
}

#[derive(Debug, PartialEq, Eq)]
pub enum TermNode {
    Var(usize),
    Apply(String, Vec<Term>),
}

/// A term over an algebra's signature. Cheap to clone; subterms are shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term(pub Rc<TermNode>);

impl Term {
    pub fn var(i: usize) -> Term {
        Term(Rc::new(TermNode::Var(i)))
    }

    pub fn apply(name: impl Into<String>, children: Vec<Term>) -> Term {
        Term(Rc::new(TermNode::Apply(name.into(), children)))
    }

    /// Largest variable index + 1, or 0 for variable-free terms.
    pub fn input_arity(&self) -> usize {
        match &*self.0 {
            TermNode::Var(i) => i + 1,
            TermNode::Apply(_, children) => {
                children.iter().map(|c| c.input_arity()).max().unwrap_or(0)
            }
        }
    }

    pub fn display(&self) -> String {
        match &*self.0 {
            TermNode::Var(i) => format!("x{}", i),
            TermNode::Apply(name, children) => {
                let inner: Vec<String> = children.iter().map(|c| c.display()).collect();
                format!("{}({})", name, inner.join(","))
            }
        }
    }
}

/// Evaluates `t` under `alg`'s operations. Subterms shared via `Rc` are
/// evaluated once per call.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, args: &[usize]) -> Result<usize> {
    let mut memo: HashMap<*const TermNode, usize> = HashMap::new();
    eval_memo(alg, t, args, &mut memo)
}

fn eval_memo(
    alg: &FiniteAlgebra,
    t: &Term,
    args: &[usize],
    memo: &mut HashMap<*const TermNode, usize>,
) -> Result<usize> {
    let key = Rc::as_ptr(&t.0);
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let value = match &*t.0 {
        TermNode::Var(i) => {
            if *i >= args.len() {
                return Err(UalgError::Precondition(format!(
                    "variable x{} out of range for {} arguments",
                    i,
                    args.len()
                )));
            }
            let v = args[*i];
            if v >= alg.size {
                return Err(UalgError::Precondition(format!(
                    "argument {} outside carrier of size {}",
                    v, alg.size
                )));
            }
            v
        }
        TermNode::Apply(name, children) => {
            let op = alg
                .op_index(name)
                .ok_or_else(|| UalgError::UnknownOp(name.clone()))?;
            let arity = alg.operations[op].arity;
            if children.len() != arity {
                return Err(UalgError::ArityMismatch {
                    name: name.clone(),
                    expected: arity,
                    got: children.len(),
                });
            }
            let mut vals = Vec::with_capacity(children.len());
            for c in children {
                vals.push(eval_memo(alg, c, args, memo)?);
            }
            alg.apply(op, &vals)
        }
    };
    memo.insert(key, value);
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn eval_projection() {
        let z2 = corpus::z2();
        let t = Term::var(0);
        assert_eq!(eval_term(&z2, &t, &[1, 0]).unwrap(), 1);
    }

    #[test]
    fn eval_nested_add() {
        let z2 = corpus::z2();
        let t = Term::apply(
            "add",
            vec![
                Term::var(0),
                Term::apply("add", vec![Term::var(1), Term::var(2)]),
            ],
        );
        assert_eq!(eval_term(&z2, &t, &[1, 1, 1]).unwrap(), 1);
    }

    #[test]
    fn eval_klein4_mul() {
        let k4 = corpus::klein4();
        let t = Term::apply("mul", vec![Term::var(0), Term::var(1)]);
        assert_eq!(eval_term(&k4, &t, &[1, 2]).unwrap(), 3);
    }

    #[test]
    fn eval_unknown_op_and_arity_errors() {
        let z2 = corpus::z2();
        let t = Term::apply("mul", vec![Term::var(0), Term::var(1)]);
        assert!(matches!(
            eval_term(&z2, &t, &[0, 0]),
            Err(UalgError::UnknownOp(_))
        ));
        let t = Term::apply("add", vec![Term::var(0)]);
        assert!(matches!(
            eval_term(&z2, &t, &[0]),
            Err(UalgError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn product_z2_z2_is_klein4() {
        let z2 = corpus::z2();
        let prod = product_algebra(&z2, &z2).unwrap();
        let k4 = corpus::klein4();
        assert_eq!(prod.size, 4);
        assert_eq!(prod.operations[0].table, k4.operations[0].table);
    }

    #[test]
    fn product_with_trivial_preserves_tables() {
        let z4 = corpus::z4();
        let one = z4.trivial_like();
        let prod = product_algebra(&z4, &one).unwrap();
        assert_eq!(prod.size, 4);
        assert_eq!(prod.operations[0].table, z4.operations[0].table);
    }

    #[test]
    fn product_of_chains_is_grid() {
        let c2 = corpus::chain2();
        let grid = product_algebra(&c2, &c2).unwrap();
        assert_eq!(grid.size, 4);
        // componentwise min on the 2x2 grid, elements encoded i*2+j
        let meet = grid.op_index("meet").unwrap();
        assert_eq!(grid.apply(meet, &[1, 2]), 0);
        let join = grid.op_index("join").unwrap();
        assert_eq!(grid.apply(join, &[1, 2]), 3);
        let lat = crate::congruence::congruence_lattice(&grid).unwrap();
        assert!(crate::congruence::is_distributive(&lat));
    }

    #[test]
    fn product_signature_mismatch() {
        let z2 = corpus::z2();
        let c2 = corpus::chain2();
        assert!(product_algebra(&z2, &c2).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let k4 = corpus::klein4();
        let text = k4.to_json();
        let back = FiniteAlgebra::from_json(&text).unwrap();
        assert_eq!(back, k4);
        let bad = r#"{"name":"x","size":2,"operations":[{"name":"f","arity":1,"table":[0,5]}]}"#;
        assert!(FiniteAlgebra::from_json(bad).is_err());
        let short = r#"{"name":"x","size":2,"operations":[{"name":"f","arity":2,"table":[0,1]}]}"#;
        assert!(FiniteAlgebra::from_json(short).is_err());
    }
}
