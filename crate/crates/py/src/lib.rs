//! Python bindings: fields and their elements, root data, and the endoscopy,
//! cohomology and orbital-integral pipelines. Structured results come back as
//! plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use endoscopy::building::{
    are_conjugate, are_stably_conjugate, cayley, fl_check, kappa_orbital, HElement, HKind, KappaMode, RegularElement,
};
use endoscopy::endoscopy::{enumerate_endoscopic, is_elliptic, DEFAULT_ORDER_BOUND};
use endoscopy::local_field::{self as lf, FieldKind, QuadExtElement};
use endoscopy::root_datum::{builtin_datum, RootDatum as CoreDatum};
use endoscopy::tori_cohomology::{h1 as core_h1, kappa_character, GaloisLattice};
use endoscopy::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Precision(_) | Error::NoConvergence(_) | Error::Overflow => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_u64().expect("integral JSON number").into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

#[pyclass(name = "LocalField", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLocalField(lf::LocalField);

#[pymethods]
impl PyLocalField {
    /// `kind` is `"mixed"` (Q_p) or `"equal"` (F_q((t))).
    #[new]
    #[pyo3(signature = (q, kind = "equal", precision = lf::DEFAULT_PRECISION))]
    fn new(q: u64, kind: &str, precision: usize) -> PyResult<Self> {
        let kind: FieldKind = kind.parse().map_err(err)?;
        let (p, f) = lf::prime_power(q).ok_or_else(|| PyValueError::new_err(format!("{q} is not a prime power")))?;
        Ok(PyLocalField(lf::LocalField::new(p, f, kind, precision).map_err(err)?))
    }

    #[getter]
    fn q(&self) -> u64 {
        self.0.q()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn precision(&self) -> usize {
        self.0.precision()
    }

    #[getter]
    fn u(&self) -> PyFieldElement {
        PyFieldElement(self.0.u())
    }

    fn __call__(&self, expr: &str) -> PyResult<PyFieldElement> {
        self.eval(expr)
    }

    fn eval(&self, expr: &str) -> PyResult<PyFieldElement> {
        Ok(PyFieldElement(lf::eval_expr(expr, &self.0).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        self.0.describe()
    }
}

#[pyclass(name = "FieldElement", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFieldElement(lf::FieldElement);

#[pymethods]
impl PyFieldElement {
    #[getter]
    fn valuation(&self) -> Option<i64> {
        self.0.valuation()
    }

    fn digits(&self, start: i64, end: i64) -> PyResult<Vec<u32>> {
        self.0.digits_range(start, end).map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyFieldElement(self.0.inv().map_err(err)?))
    }

    fn is_square(&self) -> PyResult<bool> {
        lf::is_square(&self.0).map_err(err)
    }

    fn is_norm(&self) -> PyResult<bool> {
        lf::is_norm(&self.0).map_err(err)
    }

    /// `(x_s, x_u)`.
    fn jordan(&self) -> PyResult<(Self, Self)> {
        let (s, u) = lf::jordan_decompose(&self.0).map_err(err)?;
        Ok((PyFieldElement(s), PyFieldElement(u)))
    }

    fn same_at_precision(&self, other: &Self) -> bool {
        self.0.same_at_precision(&other.0)
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(to_py(py, &serde_json::to_value(self.0.to_json()).expect("element serializes"))?.unbind())
    }

    fn __add__(&self, o: &Self) -> Self {
        PyFieldElement(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyFieldElement(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyFieldElement(&self.0 * &o.0)
    }

    fn __neg__(&self) -> Self {
        PyFieldElement(-&self.0)
    }

    fn __pow__(&self, e: i64, _modulo: Option<i64>) -> PyResult<Self> {
        Ok(PyFieldElement(self.0.pow(e).map_err(err)?))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FieldElement({})", self.0)
    }
}

#[pyclass(name = "RootDatum", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRootDatum(CoreDatum);

#[pymethods]
impl PyRootDatum {
    /// `SL2`, `PGL2`, `GL<n>` or `U<n>`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (fam, n) = name.split_at(split);
        let d = match fam.to_ascii_lowercase().as_str() {
            "sl" | "pgl" => builtin_datum(name, 0),
            _ => builtin_datum(fam, n.parse().unwrap_or(0)),
        };
        Ok(PyRootDatum(d.map_err(err)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRootDatum(CoreDatum::from_json(text).map_err(err)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank
    }

    #[getter]
    fn roots(&self) -> Vec<Vec<i64>> {
        self.0.roots.clone()
    }

    #[getter]
    fn coroots(&self) -> Vec<Vec<i64>> {
        self.0.coroots.clone()
    }

    /// Unramified endoscopic data up to isomorphism, each with an
    /// `"elliptic"` flag.
    #[pyo3(signature = (order_bound = DEFAULT_ORDER_BOUND))]
    fn endoscopic_data(&self, py: Python<'_>, order_bound: u32) -> PyResult<Py<PyAny>> {
        let mut out = Vec::new();
        for e in enumerate_endoscopic(&self.0, order_bound).map_err(err)? {
            let mut j = e.to_json();
            j["elliptic"] = Value::Bool(is_elliptic(&e, &self.0).map_err(err)?);
            out.push(j);
        }
        Ok(to_py(py, &Value::Array(out))?.unbind())
    }

    fn __repr__(&self) -> String {
        format!("RootDatum({})", self.0.name.as_deref().unwrap_or("custom"))
    }
}

/// Invariant factors of `H¹(F, T)` for a Galois lattice given as JSON
/// `{"rank": r, "generators": [...]}`.
#[pyfunction]
fn h1(lattice: &str) -> PyResult<Vec<i64>> {
    let l = GaloisLattice::from_json(lattice).map_err(err)?;
    Ok(core_h1(&l).map_err(err)?.invariant_factors)
}

/// `κ` on the generators of `H¹`, as rotation numbers `"n/d"`.
#[pyfunction]
fn kappa(py: Python<'_>, lattice: &str, s: &str) -> PyResult<Py<PyAny>> {
    let l = GaloisLattice::from_json(lattice).map_err(err)?;
    let s = endoscopy::endoscopy::TorsionCharacter::parse(s).map_err(err)?;
    let k = kappa_character(&s, &l).map_err(err)?;
    Ok(to_py(py, &serde_json::to_value(&k).expect("character serializes"))?.unbind())
}

/// `(stable, rational)` conjugacy of two elements of `SL(2, F)`.
#[pyfunction]
fn conjugacy(field: &PyLocalField, a: &str, b: &str) -> PyResult<(bool, bool)> {
    let g1 = RegularElement::parse(a, &field.0).map_err(err)?;
    let g2 = RegularElement::parse(b, &field.0).map_err(err)?;
    let stable = are_stably_conjugate(&g1, &g2).map_err(err)?;
    Ok((stable, stable && are_conjugate(&g1, &g2).map_err(err)?))
}

/// The `κ`-orbital integral of a matrix, with per-class fixed-vertex counts.
#[pyfunction]
#[pyo3(signature = (field, matrix, stable = false))]
fn orbital_integral(py: Python<'_>, field: &PyLocalField, matrix: &str, stable: bool) -> PyResult<Py<PyAny>> {
    let g = RegularElement::parse(matrix, &field.0).map_err(err)?;
    let mode = if stable { KappaMode::Stable } else { KappaMode::Endoscopic };
    Ok(to_py(py, &kappa_orbital(&g, mode).map_err(err)?.to_json())?.unbind())
}

/// Both sides of the fundamental lemma for `γ`, given as `"a,b"` (elliptic),
/// a single expression (split), or via `cayley=y`.
#[pyfunction]
#[pyo3(signature = (field, gamma = None, h = "UE1", cayley_y = None))]
fn fl(
    py: Python<'_>,
    field: &PyLocalField,
    gamma: Option<&str>,
    h: &str,
    cayley_y: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let f = &field.0;
    let el = match (gamma, cayley_y) {
        (None, Some(y)) => HElement::Elliptic(cayley(&lf::eval_expr(y, f).map_err(err)?).map_err(err)?),
        (Some(g), None) => match g.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
            [a] => HElement::Split(lf::eval_expr(a, f).map_err(err)?),
            [a, b] => HElement::Elliptic(QuadExtElement::new(
                lf::eval_expr(a, f).map_err(err)?,
                lf::eval_expr(b, f).map_err(err)?,
            )),
            _ => return Err(PyValueError::new_err("gamma is `a,b` or a single expression")),
        },
        _ => return Err(PyValueError::new_err("give exactly one of gamma, cayley_y")),
    };
    let h: HKind = h.parse().map_err(err)?;
    Ok(to_py(py, &fl_check(&el, h).map_err(err)?.to_json())?.unbind())
}

/// Runs the command-line interface; returns `(exit_code, payload)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> PyResult<(i32, Py<PyAny>)> {
    let argv = std::iter::once("endoscopy".to_string()).chain(args);
    let r = endoscopy::cli::run(argv);
    Ok((r.exit_code, to_py(py, &r.payload)?.unbind()))
}

#[pymodule]
fn pyendoscopy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLocalField>()?;
    m.add_class::<PyFieldElement>()?;
    m.add_class::<PyRootDatum>()?;
    m.add_function(wrap_pyfunction!(h1, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(conjugacy, m)?)?;
    m.add_function(wrap_pyfunction!(orbital_integral, m)?)?;
    m.add_function(wrap_pyfunction!(fl, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
