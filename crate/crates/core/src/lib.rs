//! Decision procedures for congruence-theoretic properties of finite
//! algebras: relation calculus, congruence lattices, shifting/triangular/
//! trapezoid lemma checks, Mal'tsev-condition term searches, and a
//! cross-validation harness tying them together.

pub mod algebra;
pub mod congruence;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod lemmas;
pub mod properties;
pub mod rel;
pub mod subpower;
pub mod terms;

pub use algebra::{eval_term, FiniteAlgebra, OperationTable, Term};
pub use congruence::{all_congruences, congruence_lattice, CongLattice, Congruence};
pub use error::{Result, UalgError};
pub use harness::{compute_facts, verify_algebra, verify_corpus, AlgebraReport, FactVector};
pub use lemmas::{check_lemma, check_majority_inequality, LemmaKind, LemmaVerdict, TripleClasses};
pub use properties::{PropertyVerdict, PropertyWitness};
pub use rel::{compose, BinRel, RelClass};
pub use subpower::{generate_subpower, ClosureOutcome, Subpower, DEFAULT_BUDGET};
pub use terms::{solve_identity_system, IdentitySystem, SearchStatus, TermSearchResult};
