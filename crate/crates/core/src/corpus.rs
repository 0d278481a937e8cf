//! The bundled algebra corpus used by the cross-validation harness.

use crate::algebra::{FiniteAlgebra, OperationTable};

pub fn trivial1() -> FiniteAlgebra {
    FiniteAlgebra::new("trivial1", 1, vec![]).unwrap()
}

pub fn bare(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(format!("bare{}", n), n, vec![]).unwrap()
}

pub fn z2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "z2",
        2,
        vec![OperationTable::new("add", 2, vec![0, 1, 1, 0])],
    )
    .unwrap()
}

pub fn z4() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            table.push((a + b) % 4);
        }
    }
    FiniteAlgebra::new("z4", 4, vec![OperationTable::new("add", 2, table)]).unwrap()
}

/// Klein four-group as Z2 x Z2, encoded i*2+j; the group operation is xor.
pub fn klein4() -> FiniteAlgebra {
    let mut table = Vec::with_capacity(16);
    for a in 0..4usize {
        for b in 0..4usize {
            table.push(a ^ b);
        }
    }
    FiniteAlgebra::new("klein4", 4, vec![OperationTable::new("mul", 2, table)]).unwrap()
}

fn chain(n: usize) -> FiniteAlgebra {
    let mut meet = Vec::with_capacity(n * n);
    let mut join = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            meet.push(a.min(b));
            join.push(a.max(b));
        }
    }
    FiniteAlgebra::new(
        format!("chain{}", n),
        n,
        vec![
            OperationTable::new("meet", 2, meet),
            OperationTable::new("join", 2, join),
        ],
    )
    .unwrap()
}

pub fn chain2() -> FiniteAlgebra {
    chain(2)
}

pub fn chain3() -> FiniteAlgebra {
    chain(3)
}

/// Two-element Boolean algebra with and, or, not and both constants.
pub fn bool2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "bool2",
        2,
        vec![
            OperationTable::new("and", 2, vec![0, 0, 0, 1]),
            OperationTable::new("or", 2, vec![0, 1, 1, 1]),
            OperationTable::new("not", 1, vec![1, 0]),
            OperationTable::new("zero", 0, vec![0]),
            OperationTable::new("one", 0, vec![1]),
        ],
    )
    .unwrap()
}

/// Two-element implication algebra: x -> y with 1 -> 0 = 0 and 1 elsewhere.
pub fn impl2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "impl2",
        2,
        vec![OperationTable::new("imp", 2, vec![1, 1, 0, 1])],
    )
    .unwrap()
}

/// Canonical corpus order used by `verify` and the fixtures.
pub fn bundled_corpus() -> Vec<FiniteAlgebra> {
    vec![
        trivial1(),
        bare(2),
        bare(3),
        bare(4),
        z2(),
        z4(),
        klein4(),
        chain2(),
        chain3(),
        bool2(),
        impl2(),
    ]
}

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    bundled_corpus().into_iter().find(|a| a.name == name)
}
