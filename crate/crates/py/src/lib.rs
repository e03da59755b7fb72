//! Python bindings for the `hypermono` crate.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hypermono::audits::{self, Divisor, QPoly, RationalMap};
use hypermono::cli::{self, Command, RunOptions};
use hypermono::developing::{self, Model};
use hypermono::metriclab::{self, MetricConfig};
use hypermono::moebius::{self, ElementType};
use hypermono::subgroup;

fn err(e: hypermono::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Orientation-preserving isometry of the upper half-plane, z ↦ (az+b)/(cz+d).
#[pyclass(name = "MoebiusMap", module = "hypermono_py", frozen)]
#[derive(Clone, Copy)]
struct PyMoebius(moebius::MoebiusMap);

#[pymethods]
impl PyMoebius {
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        moebius::MoebiusMap::new(a, b, c, d).map(PyMoebius).map_err(err)
    }

    #[staticmethod]
    fn translation(t: f64) -> Self {
        PyMoebius(moebius::MoebiusMap::translation(t))
    }

    #[staticmethod]
    fn rotation(theta: f64) -> Self {
        PyMoebius(moebius::MoebiusMap::rotation(theta))
    }

    /// Normalized entries `(a, b, c, d)`.
    fn entries(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.0.entries();
        (a, b, c, d)
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn inverse(&self) -> Self {
        PyMoebius(self.0.inverse())
    }

    /// `h · self · h⁻¹`.
    fn conjugate_by(&self, h: &PyMoebius) -> Self {
        PyMoebius(self.0.conjugate_by(&h.0))
    }

    fn __matmul__(&self, other: &PyMoebius) -> Self {
        PyMoebius(self.0 * other.0)
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.0.apply_complex(z)
    }

    /// One of "identity", "elliptic", "parabolic", "hyperbolic".
    fn classify(&self) -> &'static str {
        match self.0.classify() {
            ElementType::Identity => "identity",
            ElementType::Elliptic => "elliptic",
            ElementType::Parabolic => "parabolic",
            ElementType::Hyperbolic => "hyperbolic",
        }
    }

    /// Boundary fixed points (None for ∞) and the interior one, if any.
    fn fixed_points(&self) -> PyResult<(Vec<Option<f64>>, Option<Complex64>)> {
        let f = self.0.fixed_points().map_err(err)?;
        let boundary = f.boundary.iter().map(|p| p.finite().map(|z| z.re)).collect();
        Ok((boundary, f.interior))
    }

    /// Image in the disc model as a 2×2 complex matrix.
    fn cayley(&self) -> [[Complex64; 2]; 2] {
        let m = moebius::cayley_map(&self.0);
        [[m.a, m.b], [m.c, m.d]]
    }

    fn is_identity(&self, tol: f64) -> bool {
        self.0.is_identity(tol)
    }

    fn distance(&self, other: &PyMoebius) -> f64 {
        self.0.operator_distance(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("MoebiusMap({})", self.0)
    }
}

/// Classifies the group generated by `gens`; returns `(verdict, conjugator)`.
#[pyfunction]
fn classify_subgroup(gens: Vec<PyMoebius>) -> PyResult<(String, PyMoebius)> {
    let gens: Vec<_> = gens.into_iter().map(|g| g.0).collect();
    let c = subgroup::classify_subgroup(&gens).map_err(err)?;
    Ok((c.verdict.to_string(), PyMoebius(c.conjugator)))
}

/// Returns `W g W⁻¹` for every generator with a seeded random `W`.
#[pyfunction]
fn random_conjugate(gens: Vec<PyMoebius>, seed: u64) -> Vec<PyMoebius> {
    let gens: Vec<_> = gens.into_iter().map(|g| g.0).collect();
    subgroup::random_conjugate(&gens, seed).into_iter().map(PyMoebius).collect()
}

/// Multivalued developing map on the punctured disc.
#[pyclass(name = "DevelopingMap", module = "hypermono_py", frozen)]
struct PyDeveloping(developing::DevelopingMap);

#[pymethods]
impl PyDeveloping {
    /// "u1", "l0" or "blaschke".
    #[getter]
    fn variant(&self) -> &'static str {
        self.0.variant_name()
    }

    /// "disc" or "half_plane".
    #[getter]
    fn model(&self) -> &'static str {
        match self.0.model() {
            Model::Disc => "disc",
            Model::HalfPlane => "half_plane",
        }
    }

    #[getter]
    fn base_point(&self) -> Complex64 {
        self.0.base_point()
    }

    fn poles(&self) -> Vec<Complex64> {
        self.0.poles()
    }

    /// Value of the branch reached along a routed path from the base point.
    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.eval_at(z).map_err(err)
    }

    /// Monodromy of the standard loop around each pole, as Möbius maps.
    fn monodromy_generators(&self) -> PyResult<Vec<PyMoebius>> {
        let loops = self.0.generator_loops().map_err(err)?;
        loops.iter().map(|l| self.0.monodromy_around(l).map(|r| PyMoebius(r.map)).map_err(err)).collect()
    }

    /// Log density `u` of the pulled-back metric.
    fn density(&self, z: Complex64) -> PyResult<f64> {
        metriclab::density_at(&self.0, z).map_err(err)
    }

    /// Finite-difference Gaussian curvature at `z`.
    #[pyo3(signature = (z, h_fd = 1e-3))]
    fn curvature(&self, z: Complex64, h_fd: f64) -> PyResult<f64> {
        let cfg = MetricConfig { h_fd, ..MetricConfig::default() };
        metriclab::curvature_at(&self.0, z, &cfg).map_err(err)
    }

    /// Cone angle estimate at `p` from dyadic radii 2^-k, k in `kmin..=kmax`.
    #[pyo3(signature = (p, kmin = 6, kmax = 16))]
    fn cone_angle(&self, p: Complex64, kmin: i32, kmax: i32) -> PyResult<f64> {
        let radii = metriclab::dyadic_radii(kmin..=kmax);
        metriclab::estimate_cone_angle(&self.0, p, &radii).map(|e| e.theta_estimate).map_err(err)
    }

    /// Spread of the cusp profile at `p`; small means a cusp.
    fn cusp_spread(&self, p: Complex64) -> PyResult<f64> {
        metriclab::check_cusp(&self.0, p).map(|r| r.boundedness_spread).map_err(err)
    }

    fn critical_points(&self) -> PyResult<Vec<(Complex64, usize)>> {
        developing::critical_points(&self.0).map_err(err)
    }
}

/// Member of the disc-valued family with poles `(z, a)`; `lambda_fraction` is λ/T.
#[pyfunction]
#[pyo3(signature = (poles, base_point, entire_part = vec![], lambda_fraction = 0.5))]
fn build_u1(
    poles: Vec<(Complex64, f64)>,
    base_point: Complex64,
    entire_part: Vec<Complex64>,
    lambda_fraction: f64,
) -> PyResult<PyDeveloping> {
    let fam = developing::build_u1_family(&poles, entire_part, base_point).map_err(err)?;
    fam.member(lambda_fraction * fam.upper()).map(PyDeveloping).map_err(err)
}

/// Half-plane-valued map with cusps `(z, r)`.
#[pyfunction]
fn build_l0(cusps: Vec<(Complex64, f64)>, scale: f64, offset: f64, base_point: Complex64) -> PyResult<PyDeveloping> {
    developing::build_l0_map(&cusps, scale, offset, base_point).map(PyDeveloping).map_err(err)
}

/// Finite Blaschke product with zeros `(a, multiplicity)`.
#[pyfunction]
#[pyo3(signature = (zeros, rotation = Complex64::new(1.0, 0.0)))]
fn blaschke(zeros: Vec<(Complex64, u32)>, rotation: Complex64) -> PyResult<PyDeveloping> {
    developing::blaschke(&zeros, rotation).map(PyDeveloping).map_err(err)
}

fn audit_dict<'py>(py: Python<'py>, r: &audits::ResidueAuditReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    let finite: Vec<(Complex64, i64, &str)> = r
        .finite_residues
        .iter()
        .map(|c| (c.point.finite().unwrap_or_default(), c.residue, c.source.name()))
        .collect();
    d.set_item("finite", finite)?;
    d.set_item("infinity", r.infinity_value())?;
    d.set_item("total", r.total)?;
    d.set_item("numeric_total", r.numeric_total)?;
    d.set_item("max_contour_error", r.max_contour_error)?;
    d.set_item("pass", r.pass)?;
    Ok(d)
}

/// Residues of the affine connection of P/Q; coefficients low to high as
/// ints or "p/q" strings.
#[pyfunction]
#[pyo3(signature = (numerator, denominator = vec!["1".to_string()]))]
fn residue_audit<'py>(py: Python<'py>, numerator: Vec<String>, denominator: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
    let p = |c: &[String]| QPoly::parse(&c.iter().map(String::as_str).collect::<Vec<_>>()).map_err(err);
    let f = RationalMap::new(p(&numerator)?, p(&denominator)?).map_err(err)?;
    audit_dict(py, &audits::residue_audit(&f).map_err(err)?)
}

/// Residue audit of a seeded random rational map.
#[pyfunction]
fn random_residue_audit<'py>(py: Python<'py>, seed: u64, max_degree: usize) -> PyResult<Bound<'py, PyDict>> {
    let f = audits::random_rational_map(seed, max_degree);
    audit_dict(py, &audits::residue_audit(&f).map_err(err)?)
}

/// Returns `(chi, slack, admissible)` for labelled cone angles θ.
#[pyfunction]
fn heins(genus: u32, divisor: Vec<(String, f64)>) -> PyResult<(i64, f64, bool)> {
    let d = Divisor::new(divisor).map_err(err)?;
    let r = audits::heins_admissible(genus, &d);
    Ok((r.chi, r.slack, r.admissible))
}

/// Runs a CLI command on a JSON config; returns `(exit_code, report_json)`.
#[pyfunction]
#[pyo3(signature = (command, config, seed = None))]
fn run(command: &str, config: &str, seed: Option<u64>) -> PyResult<(i32, String)> {
    let cmd = Command::parse(command).ok_or_else(|| PyValueError::new_err(format!("unknown command {command:?}")))?;
    let opts = RunOptions { seed, ..RunOptions::default() };
    let out = cli::run_str(cmd, config, &opts).map_err(err)?;
    Ok((out.status.exit_code(), out.report_json()))
}

#[pymodule]
pub fn hypermono_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMoebius>()?;
    m.add_class::<PyDeveloping>()?;
    m.add_function(wrap_pyfunction!(classify_subgroup, m)?)?;
    m.add_function(wrap_pyfunction!(random_conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(build_u1, m)?)?;
    m.add_function(wrap_pyfunction!(build_l0, m)?)?;
    m.add_function(wrap_pyfunction!(blaschke, m)?)?;
    m.add_function(wrap_pyfunction!(residue_audit, m)?)?;
    m.add_function(wrap_pyfunction!(random_residue_audit, m)?)?;
    m.add_function(wrap_pyfunction!(heins, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
