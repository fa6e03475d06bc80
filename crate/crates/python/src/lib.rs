//! Python bindings. Vector fields are passed as lists of expression strings
//! over the metric's coordinates; points as lists of floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use semireg::cartan::{IdentityChecker, ResidualReport};
use semireg::catalog::{catalog, MetricSpec};
use semireg::chart::VectorField;
use semireg::cli::{cmd_check, cmd_curvature, cmd_verify, Outcome, RunOptions};
use semireg::config::{parse_spec, resolve_spec};
use semireg::curvature::{riemann_at, symmetry_check, table_at};
use semireg::koszul::{radical_stationary_check, KoszulEvaluator};
use semireg::radical::DEFAULT_RANK_TOL;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &semireg::linalg::SquareMatrix) -> Vec<Vec<f64>> {
    m.to_rows()
}

/// A metric on one chart, optionally with sample points.
#[pyclass(frozen, module = "semireg_py")]
struct Metric {
    spec: MetricSpec,
}

impl Metric {
    fn field(&self, comps: Vec<String>) -> PyResult<VectorField> {
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        VectorField::parse(self.spec.chart(), &refs).map_err(err)
    }

    fn evaluator(&self, rank_tol: f64) -> KoszulEvaluator {
        KoszulEvaluator::new(self.spec.metric.clone(), rank_tol)
    }
}

fn residual_dict<'py>(py: Python<'py>, r: &ResidualReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("identity", &r.identity)?;
    d.set_item("point", r.point.clone())?;
    d.set_item("left", r.left)?;
    d.set_item("right", r.right)?;
    d.set_item("abs_residual", r.abs_residual)?;
    d.set_item("rel_residual", r.rel_residual)?;
    d.set_item("on_locus", r.flags.on_locus)?;
    d.set_item("out_of_image", r.flags.out_of_image)?;
    d.set_item("image_residual", r.image_residual)?;
    Ok(d)
}

#[pymethods]
impl Metric {
    /// `entries` maps `(i, j)` with `i <= j` to expression text; missing
    /// entries are zero.
    #[new]
    #[pyo3(signature = (coords, entries, name = "metric".to_string(), points = Vec::new()))]
    fn new(
        coords: Vec<String>,
        entries: Vec<((usize, usize), String)>,
        name: String,
        points: Vec<Vec<f64>>,
    ) -> PyResult<Self> {
        let c: Vec<&str> = coords.iter().map(String::as_str).collect();
        let e: Vec<(usize, usize, &str)> =
            entries.iter().map(|((i, j), s)| (*i, *j, s.as_str())).collect();
        Ok(Metric {
            spec: MetricSpec::new(&name, &c, &e, points).map_err(err)?,
        })
    }

    /// A catalog entry by name, or a config file path.
    #[staticmethod]
    fn load(spec: &str) -> PyResult<Self> {
        Ok(Metric {
            spec: resolve_spec(spec).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_config_text(text: &str) -> PyResult<Self> {
        Ok(Metric {
            spec: parse_spec(text).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    #[getter]
    fn coords(&self) -> Vec<String> {
        self.spec.chart().names().to_vec()
    }

    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.spec.points.clone()
    }

    fn config_text(&self) -> String {
        self.spec.to_config_text()
    }

    fn eval(&self, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.spec.metric.eval(&point).map_err(err)?))
    }

    /// Rank, eigenvalues, pseudo-inverse and image projector at `point`.
    #[pyo3(signature = (point, rank_tol = DEFAULT_RANK_TOL))]
    fn decompose<'py>(&self, py: Python<'py>, point: Vec<f64>, rank_tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let d = semireg::decompose(&self.spec.metric, &point, rank_tol).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("rank", d.rank)?;
        out.set_item("eigenvalues", d.eigenvalues.clone())?;
        out.set_item("pseudo_inverse", rows(&d.pseudo_inverse))?;
        out.set_item("projector", rows(&d.projector))?;
        out.set_item("kernel", d.kernel_basis())?;
        Ok(out)
    }

    fn kosz(&self, x: Vec<String>, y: Vec<String>, z: Vec<String>, point: Vec<f64>) -> PyResult<f64> {
        let (x, y, z) = (self.field(x)?, self.field(y)?, self.field(z)?);
        self.evaluator(DEFAULT_RANK_TOL).kosz(&x, &y, &z, &point).map_err(err)
    }

    /// `K(X,Y,•)K(Z,T,•)` and the two out-of-image residuals.
    #[pyo3(signature = (x, y, z, t, point, rank_tol = DEFAULT_RANK_TOL))]
    fn kosz_contract(
        &self,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        t: Vec<String>,
        point: Vec<f64>,
        rank_tol: f64,
    ) -> PyResult<(f64, [f64; 2])> {
        let (x, y, z, t) = (self.field(x)?, self.field(y)?, self.field(z)?, self.field(t)?);
        let r = self
            .evaluator(rank_tol)
            .kosz_contract(&x, &y, &z, &t, &point)
            .map_err(err)?;
        Ok((r.value, r.in_image_residuals))
    }

    /// `Γ[i][j][k]` of the first kind as a nested list.
    fn christoffel(&self, point: Vec<f64>) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let g = semireg::koszul::christoffel_first(&self.spec.metric, &point).map_err(err)?;
        let n = g.n;
        Ok((0..n)
            .map(|i| (0..n).map(|j| g.covector(i, j)).collect())
            .collect())
    }

    #[pyo3(signature = (x, y, z, t, point, rank_tol = DEFAULT_RANK_TOL))]
    fn riemann(
        &self,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        t: Vec<String>,
        point: Vec<f64>,
        rank_tol: f64,
    ) -> PyResult<f64> {
        let fs = [self.field(x)?, self.field(y)?, self.field(z)?, self.field(t)?];
        let at = self.evaluator(rank_tol).at(&point).map_err(err)?;
        let a: Vec<_> = fs.iter().map(|f| f.at(&point)).collect::<Result<_, _>>().map_err(err)?;
        Ok(riemann_at(&at, &a[0], &a[1], &a[2], &a[3]).value)
    }

    /// Flat list of `R[i][j][k][l]` in row-major order.
    #[pyo3(signature = (point, rank_tol = DEFAULT_RANK_TOL))]
    fn riemann_table(&self, point: Vec<f64>, rank_tol: f64) -> PyResult<Vec<f64>> {
        let at = self.evaluator(rank_tol).at(&point).map_err(err)?;
        Ok(table_at(&at).values().to_vec())
    }

    /// Largest violation of each curvature symmetry, relative to the table scale.
    #[pyo3(signature = (point, rank_tol = DEFAULT_RANK_TOL))]
    fn symmetry_residuals(&self, point: Vec<f64>, rank_tol: f64) -> PyResult<Vec<(String, f64)>> {
        let at = self.evaluator(rank_tol).at(&point).map_err(err)?;
        let s = symmetry_check(&table_at(&at));
        Ok(s.named().iter().map(|(k, v)| (k.to_string(), v / s.scale)).collect())
    }

    #[pyo3(signature = (points, tol = 1e-8, rank_tol = DEFAULT_RANK_TOL))]
    fn classify(&self, points: Vec<Vec<f64>>, tol: f64, rank_tol: f64) -> PyResult<(String, f64)> {
        let r = radical_stationary_check(&self.spec.metric, &points, tol, rank_tol).map_err(err)?;
        Ok((r.verdict.to_string(), r.max_residual()))
    }

    fn koszul_decomposition_residual<'py>(
        &self,
        py: Python<'py>,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        point: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = IdentityChecker::new(self.spec.metric.clone(), DEFAULT_RANK_TOL);
        let r = c
            .koszul_decomposition(&self.field(x)?, &self.field(y)?, &self.field(z)?, &point)
            .map_err(err)?;
        residual_dict(py, &r)
    }

    fn first_structural_residual<'py>(
        &self,
        py: Python<'py>,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        point: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = IdentityChecker::new(self.spec.metric.clone(), DEFAULT_RANK_TOL);
        let r = c
            .first_structural(&self.field(x)?, &self.field(y)?, &self.field(z)?, &point)
            .map_err(err)?;
        residual_dict(py, &r)
    }

    fn second_structural_residual<'py>(
        &self,
        py: Python<'py>,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        t: Vec<String>,
        point: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = IdentityChecker::new(self.spec.metric.clone(), DEFAULT_RANK_TOL);
        let fs = [self.field(x)?, self.field(y)?, self.field(z)?, self.field(t)?];
        let r = c
            .second_structural(&fs[0], &fs[1], &fs[2], &fs[3], &point)
            .map_err(err)?;
        residual_dict(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Metric({:?}, coords={:?})", self.spec.name, self.spec.chart().names())
    }
}

/// Value, gradient and Hessian of an expression at a point.
#[pyfunction]
fn jet(expr: &str, coords: Vec<String>, point: Vec<f64>) -> PyResult<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let e = semireg::parse(expr, &coords).map_err(err)?;
    let j = e.eval_jet2(&point).map_err(err)?;
    Ok((j.value(), j.grad().to_vec(), j.hessian()))
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

fn run(
    f: fn(&MetricSpec, &RunOptions) -> semireg::Result<Outcome>,
    metric: &Metric,
    tol: f64,
    seed: u64,
    points: Option<usize>,
) -> PyResult<(String, i32)> {
    let opts = RunOptions {
        tol,
        rank_tol: DEFAULT_RANK_TOL,
        seed,
        points,
    };
    let o = f(&metric.spec, &opts).map_err(err)?;
    Ok((o.report.render(), o.exit_code))
}

/// Report text and exit code of the `check` command.
#[pyfunction]
#[pyo3(signature = (metric, tol = 1e-8, seed = 0, points = None))]
fn check(metric: &Metric, tol: f64, seed: u64, points: Option<usize>) -> PyResult<(String, i32)> {
    run(cmd_check, metric, tol, seed, points)
}

#[pyfunction]
#[pyo3(signature = (metric, tol = 1e-8, seed = 0, points = None))]
fn curvature(metric: &Metric, tol: f64, seed: u64, points: Option<usize>) -> PyResult<(String, i32)> {
    run(cmd_curvature, metric, tol, seed, points)
}

#[pyfunction]
#[pyo3(signature = (metric, tol = 1e-8, seed = 0, points = None))]
fn verify(metric: &Metric, tol: f64, seed: u64, points: Option<usize>) -> PyResult<(String, i32)> {
    run(cmd_verify, metric, tol, seed, points)
}

#[pymodule]
mod semireg_py {
    #[pymodule_export]
    use super::{catalog_names, check, curvature, jet, verify, Metric};
}
