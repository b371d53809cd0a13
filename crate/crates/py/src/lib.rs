//! Python bindings. Elements, scalars and operators cross the boundary as
//! their text literals (`"3/4*e-1 - f2"`, `"1/2"`, `"thin-delta"`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use deltader_core::dersolve::{
    self, check_delta_derivation, compare_families, default_interior_margin, expected_family,
    solve_delta_derivations, usable_pairs, FamilyBasis,
};
use deltader_core::exactlin::frac;
use deltader_core::locality;
use deltader_core::operators::{materialize, Evaluate, Operator, Window};
use deltader_core::text::{format_element, parse_element, parse_scalar};
use deltader_core::verify::{self, Profile};
use deltader_core::{Algebra, Element, Error, Scalar};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn element(s: &str) -> PyResult<Element> {
    parse_element(s).map_err(err)
}

fn scalar(s: Option<&str>) -> PyResult<Option<Scalar>> {
    s.map(|s| parse_scalar(s).map_err(err)).transpose()
}

/// `(element, feasible, params)` rows returned by [`local`].
type LocalRow = (String, bool, Option<Vec<String>>);

fn scalars(v: &[Scalar]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// One of the catalogued algebras: `wittz`, `wittpos`, `witt1`, `wab`,
/// `thin`, `solv`.
#[pyclass(name = "Algebra", frozen, module = "deltader")]
struct PyAlgebra {
    inner: Algebra,
}

#[pymethods]
impl PyAlgebra {
    #[new]
    #[pyo3(signature = (name, a=None, b=None))]
    fn new(name: &str, a: Option<&str>, b: Option<&str>) -> PyResult<Self> {
        let inner = Algebra::from_name(name, scalar(a)?, scalar(b)?).map_err(err)?;
        Ok(PyAlgebra { inner })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    /// `[x, y]` for element literals.
    fn bracket(&self, x: &str, y: &str) -> PyResult<String> {
        let v = self.inner.bracket_vec(&element(x)?, &element(y)?).map_err(err)?;
        Ok(format_element(&v))
    }

    fn __repr__(&self) -> String {
        format!("Algebra('{}')", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// An operator literal such as `shift:t=2`, `thin-nabla`, `table:e2=e3`.
#[pyclass(name = "Operator", frozen, module = "deltader")]
struct PyOperator {
    inner: Operator,
}

#[pymethods]
impl PyOperator {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        Ok(PyOperator {
            inner: literal.parse().map_err(err)?,
        })
    }

    fn evaluate(&self, x: &str) -> PyResult<String> {
        Ok(format_element(&self.inner.evaluate(&element(x)?).map_err(err)?))
    }

    #[getter]
    fn is_linear(&self) -> bool {
        self.inner.is_linear()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Operator('{}')", self.inner)
    }
}

/// A solved or expected family of maps on a window.
#[pyclass(name = "Family", frozen, module = "deltader")]
struct PyFamily {
    inner: FamilyBasis,
}

#[pymethods]
impl PyFamily {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Basis maps as `e1=...;e2=...` tables.
    #[getter]
    fn basis(&self) -> Vec<String> {
        self.inner.basis.iter().map(|m| m.to_table_string()).collect()
    }

    /// Images of `x` under each basis map.
    fn images_at(&self, x: &str) -> PyResult<Vec<String>> {
        let images = self.inner.images_at(&element(x)?).map_err(err)?;
        Ok(images.iter().map(format_element).collect())
    }

    /// Σ params_k B_k(x).
    fn evaluate(&self, params: Vec<String>, x: &str) -> PyResult<String> {
        let params: Vec<Scalar> = params
            .iter()
            .map(|p| parse_scalar(p).map_err(err))
            .collect::<PyResult<_>>()?;
        if params.len() != self.inner.dim() {
            return Err(PyValueError::new_err("one parameter per basis map"));
        }
        let m = self.inner.combination(&params);
        Ok(format_element(&m.evaluate(&element(x)?).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }
}

fn window(alg: &Algebra, inp: (i64, i64), out: Option<(i64, i64)>) -> PyResult<Window> {
    Window::ranges(alg, inp, out.unwrap_or(inp)).map_err(err)
}

fn delta(d: Option<&str>) -> PyResult<Scalar> {
    Ok(scalar(d)?.unwrap_or_else(|| frac(1, 2)))
}

fn operator_for(alg: &Algebra, literal: &str) -> PyResult<Operator> {
    let op: Operator = literal.parse().map_err(err)?;
    op.validate(alg).map_err(err)?;
    Ok(op)
}

/// Solves for windowed δ-derivations (δ = 1/2 by default).
#[pyfunction]
#[pyo3(signature = (algebra, inp, out=None, delta=None))]
fn solve(algebra: &PyAlgebra, inp: (i64, i64), out: Option<(i64, i64)>, delta: Option<&str>) -> PyResult<PyFamily> {
    let w = window(&algebra.inner, inp, out)?;
    let d = self::delta(delta)?;
    let inner = solve_delta_derivations(&algebra.inner, &d, &w).map_err(err)?;
    Ok(PyFamily { inner })
}

/// Closed-form ½-derivation generators that fit the window.
#[pyfunction]
#[pyo3(signature = (algebra, inp, out=None))]
fn expected(algebra: &PyAlgebra, inp: (i64, i64), out: Option<(i64, i64)>) -> PyResult<PyFamily> {
    let w = window(&algebra.inner, inp, out)?;
    let inner = expected_family(&algebra.inner, &w).map_err(err)?;
    Ok(PyFamily { inner })
}

/// Compares solved and expected ½-derivations on a window.
#[pyfunction]
#[pyo3(signature = (algebra, inp, out=None, margin=None))]
fn compare<'py>(
    py: Python<'py>,
    algebra: &PyAlgebra,
    inp: (i64, i64),
    out: Option<(i64, i64)>,
    margin: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let alg = &algebra.inner;
    let w = window(alg, inp, out)?;
    let solved = dersolve::solve_half_derivations(alg, &w).map_err(err)?;
    let exp = expected_family(alg, &w).map_err(err)?;
    let r = compare_families(&solved, &exp, margin.unwrap_or_else(|| default_interior_margin(alg)));
    let d = PyDict::new(py);
    d.set_item("expected_contained", r.expected_contained)?;
    d.set_item("solved_interior_contained", r.solved_interior_contained)?;
    d.set_item("interior_margin", r.interior_margin)?;
    d.set_item("dim_solved", r.dim_solved)?;
    d.set_item("dim_expected", r.dim_expected)?;
    d.set_item("dim_interior", r.dim_solved_interior)?;
    let offending: Vec<String> = r.offending_vectors.iter().map(|o| format!("{}[{}]", o.family, o.index)).collect();
    d.set_item("offending", offending)?;
    Ok(d)
}

/// Pairs on which the operator fails the δ-derivation identity, as
/// `(x, y, residual)` tuples.
#[pyfunction]
#[pyo3(signature = (algebra, map, inp, out=None, delta=None))]
fn check_map(
    algebra: &PyAlgebra,
    map: &str,
    inp: (i64, i64),
    out: Option<(i64, i64)>,
    delta: Option<&str>,
) -> PyResult<Vec<(String, String, String)>> {
    let alg = &algebra.inner;
    let w = window(alg, inp, out)?;
    let op = operator_for(alg, map)?;
    let d = self::delta(delta)?;
    let pairs = usable_pairs(alg, w.keys(), |k| w.contains(k)).map_err(err)?;
    let violations = if op.is_linear() {
        let m = materialize(&op, &w).map_err(err)?;
        check_delta_derivation(alg, &m, &d, &pairs)
    } else {
        check_delta_derivation(alg, &op, &d, &pairs)
    }
    .map_err(err)?;
    Ok(violations
        .iter()
        .map(|v| (v.pair.0.to_string(), v.pair.1.to_string(), format_element(&v.residual)))
        .collect())
}

/// Local feasibility at each element: `(element, feasible, params)`.
#[pyfunction]
fn local(map: &str, family: &PyFamily, xs: Vec<String>) -> PyResult<Vec<LocalRow>> {
    let op = operator_for(&family.inner.algebra, map)?;
    let xs: Vec<Element> = xs.iter().map(|x| element(x)).collect::<PyResult<_>>()?;
    let reports = locality::check_local(&op, &family.inner, &xs).map_err(err)?;
    Ok(reports
        .into_iter()
        .map(|r| (format_element(&r.element), r.feasible, r.params.as_deref().map(scalars)))
        .collect())
}

/// 2-local feasibility at `(x, y)`: `(feasible, params)`.
#[pyfunction]
fn two_local(map: &str, family: &PyFamily, x: &str, y: &str) -> PyResult<(bool, Option<Vec<String>>)> {
    let op = operator_for(&family.inner.algebra, map)?;
    let r = locality::two_local_feasible_at(&op, &element(x)?, &element(y)?, &family.inner).map_err(err)?;
    Ok((r.feasible, r.params.as_deref().map(scalars)))
}

/// `(nonadditive, map(x + y), map(x) + map(y))`.
#[pyfunction]
fn certify_nonadditive(map: &str, x: &str, y: &str) -> PyResult<(bool, String, String)> {
    let op: Operator = map.parse().map_err(err)?;
    let r = locality::certify_nonadditive(&op, &element(x)?, &element(y)?).map_err(err)?;
    Ok((r.nonadditive, format_element(&r.lhs), format_element(&r.rhs)))
}

/// Runs the acceptance suite; returns `{"passed": bool, "criteria": [...]}`.
#[pyfunction]
#[pyo3(signature = (quick=false))]
fn verify_all<'py>(py: Python<'py>, quick: bool) -> PyResult<Bound<'py, PyDict>> {
    let report = verify::run_suite(if quick { Profile::Quick } else { Profile::Full });
    let criteria = PyList::empty(py);
    for c in &report.criteria {
        let d = PyDict::new(py);
        d.set_item("id", c.id)?;
        d.set_item("title", c.title)?;
        d.set_item("passed", c.passed)?;
        let failing: Vec<(String, String)> = c.failing().map(|k| (k.name.clone(), k.detail.clone())).collect();
        d.set_item("failing", failing)?;
        criteria.append(d)?;
    }
    let out = PyDict::new(py);
    out.set_item("passed", report.passed)?;
    out.set_item("criteria", criteria)?;
    out.set_item("lines", report.lines())?;
    Ok(out)
}

/// Canonical form of an element literal.
#[pyfunction(name = "parse_element")]
fn py_parse_element(text: &str) -> PyResult<String> {
    Ok(format_element(&element(text)?))
}

#[pymodule]
pub fn deltader(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(expected, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(check_map, m)?)?;
    m.add_function(wrap_pyfunction!(local, m)?)?;
    m.add_function(wrap_pyfunction!(two_local, m)?)?;
    m.add_function(wrap_pyfunction!(certify_nonadditive, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add_function(wrap_pyfunction!(py_parse_element, m)?)?;
    Ok(())
}
