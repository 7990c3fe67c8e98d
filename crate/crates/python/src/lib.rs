//! Python bindings: exact sums, synchronized automata, query scripts and
//! the verified function automata.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rarefied::automata::{export_dot, load_text, save_text, Dfa};
use rarefied::logic::{Outcome, QueryScript};
use rarefied::numbers::{self, Numeration};
use rarefied::relations;
use rarefied::theorems::{Target, TheoremConfig, Workbench, THEOREMS};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn target(name: &str) -> PyResult<Target> {
    Target::parse(name).ok_or_else(|| {
        let known: Vec<&str> = Target::ALL.iter().map(|t| t.name()).collect();
        err(format!(
            "unknown function `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

fn system(base: i64) -> PyResult<Numeration> {
    Numeration::new(base).map_err(err)
}

/// `f_{b,j}(n)`: the sum of `(-1)^t(b i + j)` over `i < n`.
#[pyfunction]
fn sum_f(b: u64, j: u64, n: u64) -> PyResult<i64> {
    if b == 0 {
        return Err(err("b must be at least 1"));
    }
    Ok(numbers::rarefied_f(b, j, n))
}

/// `g_{b,j}(n)`, the same sum over the parity of zeros.
#[pyfunction]
fn sum_g(b: u64, j: u64, n: u64) -> PyResult<i64> {
    if b == 0 {
        return Err(err("b must be at least 1"));
    }
    Ok(numbers::rarefied_g(b, j, n))
}

/// Base-`a` digits of `n` read in base `b`.
#[pyfunction]
fn pseudopower(a: u32, b: u32, n: i64) -> PyResult<i64> {
    numbers::pseudopower(a, b, n).map_err(err)
}

/// Canonical msd-first digits of `n` in `base` (negative bases allowed).
#[pyfunction]
fn to_digits(n: i64, base: i64) -> PyResult<Vec<u32>> {
    Ok(numbers::to_digits(n, system(base)?)
        .map_err(err)?
        .digits()
        .iter()
        .map(|&d| d.into())
        .collect())
}

#[pyfunction]
fn from_digits(digits: Vec<u8>, base: i64) -> PyResult<i64> {
    let w = numbers::DigitWord::new(system(base)?, digits).map_err(err)?;
    numbers::from_digits(&w).map_err(err)
}

/// A synchronized multi-track automaton.
#[pyclass(name = "Automaton", module = "pyrarefied", frozen)]
struct PyAutomaton {
    dfa: Dfa,
}

impl From<Dfa> for PyAutomaton {
    fn from(dfa: Dfa) -> Self {
        PyAutomaton { dfa }
    }
}

#[pymethods]
impl PyAutomaton {
    /// Reads the plain-text automaton format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(load_text(text).map_err(err)?.into())
    }

    /// Equality of two values in `base`.
    #[staticmethod]
    fn eq(base: i64) -> PyResult<Self> {
        Ok(relations::eq_relation(system(base)?).into())
    }

    /// `x < y` in `base`.
    #[staticmethod]
    fn lt(base: i64) -> PyResult<Self> {
        Ok(relations::lt_relation(system(base)?).map_err(err)?.into())
    }

    /// `x + y = z` in `base`.
    #[staticmethod]
    fn add(base: i64) -> PyResult<Self> {
        Ok(relations::add_relation(system(base)?).map_err(err)?.into())
    }

    fn accepts(&self, values: Vec<i64>) -> PyResult<bool> {
        self.dfa.accepts(&values).map_err(err)
    }

    /// Signed base of each track.
    #[getter]
    fn tracks(&self) -> Vec<i64> {
        self.dfa.tracks().iter().map(|t| t.base()).collect()
    }

    /// States including a rejecting sink, if any.
    #[getter]
    fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    /// States not counting the rejecting sink.
    #[getter]
    fn states(&self) -> usize {
        self.dfa.trimmed_state_count()
    }

    fn complement(&self) -> Self {
        self.dfa.complement().into()
    }

    fn intersect(&self, other: &PyAutomaton) -> PyResult<Self> {
        Ok(self.dfa.intersect(&other.dfa).map_err(err)?.into())
    }

    fn union(&self, other: &PyAutomaton) -> PyResult<Self> {
        Ok(self.dfa.union(&other.dfa).map_err(err)?.into())
    }

    /// Existential quantification of `track`.
    fn project(&self, track: usize) -> PyResult<Self> {
        Ok(self.dfa.project(track).map_err(err)?.into())
    }

    fn minimize(&self) -> Self {
        self.dfa.minimize().into()
    }

    fn equivalent(&self, other: &PyAutomaton) -> bool {
        self.dfa.equivalent(&other.dfa)
    }

    fn to_dot(&self) -> String {
        export_dot(&self.dfa)
    }

    fn to_text(&self) -> String {
        save_text(&self.dfa)
    }

    fn __repr__(&self) -> String {
        format!(
            "Automaton(tracks={:?}, states={})",
            self.tracks(),
            self.states()
        )
    }
}

/// Inference, verification and query scripts over the six function
/// automata, which are inferred on first use.
#[pyclass(name = "Workbench", module = "pyrarefied", frozen)]
struct PyWorkbench {
    inner: Workbench,
}

#[pymethods]
impl PyWorkbench {
    /// `brute=False` skips the brute-force re-evaluation in `verify`.
    #[new]
    #[pyo3(signature = (brute = true, seed = None))]
    fn new(brute: bool, seed: Option<u64>) -> Self {
        let mut config = TheoremConfig::default();
        if !brute {
            config.brute = None;
        }
        if let Some(s) = seed {
            config.infer.seed = s;
        }
        PyWorkbench {
            inner: Workbench::new(config),
        }
    }

    /// The verified automaton of `f30`, `mf31`, `mf32`, `f50`, `f51` or `g30`.
    fn automaton(&self, py: Python<'_>, name: &str) -> PyResult<PyAutomaton> {
        let t = target(name)?;
        Ok(py.detach(|| self.inner.automaton(t)).map_err(err)?.into())
    }

    /// `[h(0), ..., h(n_max)]`.
    fn table(&self, name: &str, n_max: u64) -> PyResult<Vec<i64>> {
        Ok(target(name)?.table(n_max))
    }

    /// Runs one claim; returns `(passed, report text)`.
    fn verify(&self, py: Python<'_>, id: &str) -> PyResult<(bool, String)> {
        if !THEOREMS.iter().any(|t| t.0 == id) {
            let known: Vec<&str> = THEOREMS.iter().map(|t| t.0).collect();
            return Err(err(format!(
                "unknown claim `{id}` (known: {})",
                known.join(", ")
            )));
        }
        let r = py.detach(|| self.inner.run(id)).map_err(err)?;
        Ok((r.passed(), r.to_string()))
    }

    /// Runs a query script; returns `(name, outcome)` pairs where the
    /// outcome is a bool for `eval` and a message otherwise.
    fn query(&self, py: Python<'_>, source: &str) -> PyResult<Vec<(String, Py<PyAny>)>> {
        let script = QueryScript::parse(source).map_err(err)?;
        let targets: Vec<Target> = Target::ALL
            .into_iter()
            .filter(|t| source.contains(&format!("${}", t.name())))
            .collect();
        let report = py
            .detach(|| {
                self.inner
                    .environment(&targets)
                    .map(|mut env| env.run_script(&script))
            })
            .map_err(err)?;
        report
            .entries
            .into_iter()
            .map(|e| {
                let v = match e.outcome {
                    Outcome::Verdict(v) => v.into_pyobject(py)?.to_owned().into_any().unbind(),
                    Outcome::Defined { states } | Outcome::Sequence { states } => {
                        format!("{states} states")
                            .into_pyobject(py)?
                            .into_any()
                            .unbind()
                    }
                    Outcome::Morphism => "morphism".into_pyobject(py)?.into_any().unbind(),
                    Outcome::Failed(m) => {
                        return Err(err(format!("{} (line {}): {m}", e.name, e.line)))
                    }
                };
                Ok((e.name, v))
            })
            .collect()
    }
}

#[pymodule]
fn pyrarefied(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sum_f, m)?)?;
    m.add_function(wrap_pyfunction!(sum_g, m)?)?;
    m.add_function(wrap_pyfunction!(pseudopower, m)?)?;
    m.add_function(wrap_pyfunction!(to_digits, m)?)?;
    m.add_function(wrap_pyfunction!(from_digits, m)?)?;
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyWorkbench>()?;
    m.add("CLAIMS", THEOREMS.iter().map(|t| t.0).collect::<Vec<_>>())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_functions() {
        assert_eq!(sum_f(3, 0, 8).unwrap(), 6);
        assert_eq!(sum_g(3, 0, 2).unwrap(), 2);
        assert_eq!(to_digits(-5, -2).unwrap(), [1, 1, 1, 1]);
        assert_eq!(from_digits(vec![1, 1, 1, 1], -2).unwrap(), -5);
        assert!(target("f31").is_err());
    }
}
