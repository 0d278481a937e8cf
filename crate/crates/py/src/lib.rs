//! Python bindings. Structured results are returned as JSON strings so the
//! Python side can `json.loads` them without a bespoke type layer.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ualgebra_core::congruence::{
    congruence_lattice, is_distributive, is_modular, permutability,
};
use ualgebra_core::harness::verify_algebra;
use ualgebra_core::lemmas::{check_lemma, check_majority_inequality, LemmaKind, TripleClasses};
use ualgebra_core::rel::RelClass;
use ualgebra_core::terms::{solve_identity_system, system_by_kind};
use ualgebra_core::{corpus, FiniteAlgebra, DEFAULT_BUDGET};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite algebra: carrier {0..size-1} plus finitary operation tables.
#[pyclass(name = "Algebra")]
struct PyAlgebra {
    inner: FiniteAlgebra,
}

#[pymethods]
impl PyAlgebra {
    /// Parse the algebra JSON format: {"name", "size", "operations": [...]}.
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(PyAlgebra {
            inner: FiniteAlgebra::from_json(json).map_err(err)?,
        })
    }

    /// Load a bundled corpus algebra by name.
    #[staticmethod]
    fn corpus(name: &str) -> PyResult<Self> {
        corpus::by_name(name)
            .map(|inner| PyAlgebra { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no bundled algebra `{}`", name)))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// All congruences as partition block lists, canonical order.
    fn congruences(&self) -> PyResult<Vec<Vec<Vec<usize>>>> {
        Ok(ualgebra_core::all_congruences(&self.inner)
            .map_err(err)?
            .iter()
            .map(|c| c.blocks())
            .collect())
    }

    /// Congruence-lattice summary as JSON (modularity, distributivity,
    /// permutability).
    fn lattice(&self) -> PyResult<String> {
        let lat = congruence_lattice(&self.inner).map_err(err)?;
        let perm = permutability(&self.inner).map_err(err)?;
        let blocks: Vec<Vec<Vec<usize>>> =
            lat.elements.iter().map(|c| c.blocks()).collect();
        Ok(serde_json::json!({
            "elements": blocks,
            "modular": is_modular(&lat),
            "distributive": is_distributive(&lat),
            "perm2": perm.perm2,
            "perm3": perm.perm3,
        })
        .to_string())
    }

    /// Check a lemma (shifting|triangular|trapezoid) over a class spec
    /// ("cong" or "R=refl,S=cong,T=refl"). Returns a JSON verdict.
    #[pyo3(signature = (kind, classes="cong", budget=DEFAULT_BUDGET))]
    fn check_lemma(&self, kind: &str, classes: &str, budget: usize) -> PyResult<String> {
        let k = LemmaKind::parse(kind).map_err(err)?;
        let tc = TripleClasses::parse(classes).map_err(err)?;
        let v = check_lemma(&self.inner, k, tc, budget).map_err(err)?;
        Ok(serde_json::json!({
            "holds": v.holds,
            "exhaustive": v.exhaustive,
            "counterexample": v.counterexample,
        })
        .to_string())
    }

    /// Check the majority inequality over one relation class.
    #[pyo3(signature = (class="refl", budget=DEFAULT_BUDGET))]
    fn check_majority_inequality(&self, class: &str, budget: usize) -> PyResult<String> {
        let c = RelClass::parse(class).map_err(err)?;
        let v = check_majority_inequality(&self.inner, c, budget).map_err(err)?;
        Ok(serde_json::json!({
            "holds": v.holds,
            "exhaustive": v.exhaustive,
            "counterexample": v.counterexample,
        })
        .to_string())
    }

    /// Search a named term system (maltsev, pixley, majority, quaternary-pq,
    /// quaternary-pqx, lipparini-rs). Returns a JSON result.
    #[pyo3(signature = (kind, budget=DEFAULT_BUDGET))]
    fn find_term(&self, kind: &str, budget: usize) -> PyResult<String> {
        let sys = system_by_kind(kind).map_err(err)?;
        let res = solve_identity_system(&self.inner, &sys, budget).map_err(err)?;
        let witnesses: Vec<serde_json::Value> = res
            .witnesses
            .iter()
            .map(|w| {
                serde_json::json!({
                    "unknown": w.unknown,
                    "coords": w.coords,
                    "values": w.values,
                    "term": w.term.as_ref().map(|t| t.display()),
                })
            })
            .collect();
        Ok(serde_json::json!({
            "found": res.found(),
            "status": res.status,
            "witness_tables": witnesses,
        })
        .to_string())
    }

    /// Full fact vector plus ledger evaluation as JSON.
    #[pyo3(signature = (budget=DEFAULT_BUDGET))]
    fn verify(&self, budget: usize) -> PyResult<String> {
        let report = verify_algebra(&self.inner, budget).map_err(err)?;
        serde_json::to_string(&report).map_err(err)
    }
}

#[pyfunction]
fn corpus_names() -> Vec<String> {
    corpus::bundled_corpus().iter().map(|a| a.name.clone()).collect()
}

#[pymodule]
fn ualgebra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(corpus_names, m)?)?;
    m.add("DEFAULT_BUDGET", DEFAULT_BUDGET)?;
    Ok(())
}
