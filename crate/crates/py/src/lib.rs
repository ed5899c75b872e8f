//! Python bindings. Exact values cross the boundary as decimal strings so no
//! digits are lost; counts and flags are native Python values.

use papertorus::certifier::{
    build_bundle, format_bundle, ift_certificate, verify_bundle, SeparationParams,
};
use papertorus::combinatorics::prove_hull_lemma;
use papertorus::geometry::{
    build_pup_tent, cone_angles, convex_hull, develop, is_embedded_float, Configuration,
    PupTentParams,
};
use papertorus::mat3::Mat3;
use papertorus::numeric::{format_decimal, parse_decimal, Precision};
use papertorus::solver::newton::truncate_decimals;
use papertorus::solver::{
    jacobian as jacobian_at, newton_refine_traced, run_chains, JacobianMode, SearchSpec,
};
use papertorus::torus_file::{format_torus, parse_torus, read_torus};
use papertorus::Error;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rug::Float;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn dec(x: &Float) -> String {
    format_decimal(x, Precision::from_bits(x.prec()).digits())
}

fn mat(m: &Mat3) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(dec).collect()).collect()
}

fn number(s: &str, p: Precision) -> PyResult<Float> {
    parse_decimal(s, p).ok_or_else(|| PyValueError::new_err(format!("not a number: {s:?}")))
}

fn params(z: Option<[String; 3]>, p: Precision) -> PyResult<PupTentParams> {
    match z {
        Some(z) => Ok(PupTentParams::new([
            number(&z[0], p)?,
            number(&z[1], p)?,
            number(&z[2], p)?,
        ])),
        None => Ok(PupTentParams::published(p)),
    }
}

/// A triangulated torus with vertex coordinates at a fixed decimal precision.
#[pyclass(module = "papertorus_py", frozen)]
#[derive(Clone)]
pub struct Torus {
    inner: Configuration,
}

#[pymethods]
impl Torus {
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        read_torus(path).map(|inner| Torus { inner }).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_torus(text).map(|inner| Torus { inner }).map_err(err)
    }

    /// The eight-vertex pup tent; `z` overrides the three free heights.
    #[staticmethod]
    #[pyo3(signature = (precision = 64, z = None))]
    fn pup_tent(precision: u32, z: Option<[String; 3]>) -> PyResult<Self> {
        let p = Precision::new(precision);
        build_pup_tent(&params(z, p)?, p)
            .map(|inner| Torus { inner })
            .map_err(err)
    }

    fn to_text(&self) -> String {
        format_torus(&self.inner)
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.precision().digits()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.coordinates().len()
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 3]> {
        self.inner.triangulation().faces().to_vec()
    }

    #[getter]
    fn coordinates(&self) -> Vec<[String; 3]> {
        self.inner
            .coordinates()
            .iter()
            .map(|p| [dec(&p[0]), dec(&p[1]), dec(&p[2])])
            .collect()
    }

    fn cone_angles(&self) -> PyResult<Vec<String>> {
        let r = cone_angles(&self.inner).map_err(err)?;
        Ok(r.cone_angles.iter().map(dec).collect())
    }

    /// Largest `|theta - 2 pi|` over the vertices.
    fn flatness(&self) -> PyResult<String> {
        Ok(dec(&cone_angles(&self.inner).map_err(err)?.max_deviation))
    }

    fn is_embedded(&self) -> bool {
        is_embedded_float(&self.inner)
    }

    fn hull<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let h = convex_hull(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("facet_list", h.facet_list)?;
        d.set_item("on_hull", h.on_hull)?;
        d.set_item("face_number", h.face_number)?;
        d.set_item("torus_faces_on_hull", h.torus_faces_on_hull)?;
        Ok(d)
    }

    #[pyo3(signature = (base = 0))]
    fn develop<'py>(&self, py: Python<'py>, base: usize) -> PyResult<Bound<'py, PyDict>> {
        let dv = develop(&self.inner, base).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("gram", dv.gram().iter().map(dec).collect::<Vec<_>>())?;
        d.set_item(
            "lattice",
            dv.lattice
                .iter()
                .map(|v| [dec(&v[0]), dec(&v[1])])
                .collect::<Vec<_>>(),
        )?;
        d.set_item(
            "rotational_holonomy",
            dv.rotational_holonomy.iter().map(dec).collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    /// Separation certificate bundle for every relevant face pair.
    #[pyo3(signature = (scale = 32, grid = 300, lambda_ = None))]
    fn certify_embedding(&self, scale: u32, grid: i64, lambda_: Option<i128>) -> PyResult<String> {
        let mut sp = SeparationParams {
            grid,
            ..SeparationParams::default()
        };
        if let Some(l) = lambda_ {
            sp.lambda = l;
        }
        let b = build_bundle(&self.inner, scale, &sp, None).map_err(err)?;
        Ok(format_bundle(&b))
    }

    /// Replays a bundle; raises `ValueError` if any certificate fails.
    #[pyo3(signature = (bundle, scale = 32, grid = 300, lambda_ = None))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        bundle: &str,
        scale: u32,
        grid: i64,
        lambda_: Option<i128>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut sp = SeparationParams {
            grid,
            ..SeparationParams::default()
        };
        if let Some(l) = lambda_ {
            sp.lambda = l;
        }
        let r = verify_bundle(bundle, &self.inner, scale, &sp).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("certificates", r.certificates)?;
        d.set_item("min_margin", r.min_margin)?;
        Ok(d)
    }

    fn certify_ift<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = ift_certificate(&self.inner, self.inner.precision()).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("holds", c.links.iter().all(|l| l.holds))?;
        d.set_item(
            "links",
            c.links
                .iter()
                .map(|l| (l.name.clone(), l.holds, l.statement.clone()))
                .collect::<Vec<_>>(),
        )?;
        d.set_item("flatness_at_p", dec(&c.flatness_at_p))?;
        d.set_item("min_abs_eigenvalue", dec(&c.min_abs_eigenvalue))?;
        d.set_item("df_minus_m_inf", dec(&c.df_minus_m_inf))?;
        d.set_item("conclusion_radius", dec(&c.conclusion_radius))?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Torus(vertices={}, faces={}, precision={})",
            self.vertex_count(),
            self.inner.triangulation().faces().len(),
            self.precision()
        )
    }
}

/// Exhaustive face-number proof for the seven-vertex torus.
#[pyfunction]
fn prove7(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let r = prove_hull_lemma().map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("total_patterns", r.total_patterns)?;
    d.set_item("after_degree_filter", r.after_degree_filter)?;
    d.set_item(
        "survivors",
        r.survivors
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>(),
    )?;
    d.set_item("survivor_witness", r.survivor_witness)?;
    d.set_item("automorphism_group_order", r.automorphism_group_order)?;
    d.set_item("survivors_form_one_orbit", r.survivors_form_one_orbit)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (z = None, precision = 64, analytic = true))]
fn jacobian(
    py: Python<'_>,
    z: Option<[String; 3]>,
    precision: u32,
    analytic: bool,
) -> PyResult<Bound<'_, PyDict>> {
    let p = Precision::new(precision);
    let mode = if analytic {
        JacobianMode::Analytic
    } else {
        JacobianMode::CentralDifference
    };
    let r = jacobian_at(&params(z, p)?, p, mode).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("matrix", mat(&r.matrix))?;
    d.set_item("inverse", mat(&r.inverse))?;
    d.set_item("determinant", dec(&r.determinant))?;
    d.set_item("asymmetry", dec(&r.asymmetry))?;
    Ok(d)
}

/// Newton refinement of the pup-tent heights. Without `start`, begins from
/// the built-in heights truncated to `truncate` decimals.
#[pyfunction]
#[pyo3(signature = (start = None, target = "1e-60", precision = 128, truncate = 8))]
fn newton<'py>(
    py: Python<'py>,
    start: Option<[String; 3]>,
    target: &str,
    precision: u32,
    truncate: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p = Precision::new(precision);
    let start = match start {
        Some(z) => params(Some(z), p)?,
        None => {
            let z = PupTentParams::published(p)
                .z
                .map(|z| truncate_decimals(&z, truncate));
            params(Some(z), p)?
        }
    };
    let o = newton_refine_traced(&start, &number(target, p)?, p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("iterations", o.iterations)?;
    d.set_item(
        "deviations",
        o.deviations.iter().map(dec).collect::<Vec<_>>(),
    )?;
    d.set_item("z", o.params.z.iter().map(dec).collect::<Vec<_>>())?;
    let torus = build_pup_tent(&o.params, p).map_err(err)?;
    d.set_item("torus", Torus { inner: torus })?;
    Ok(d)
}

/// Hill-climbing search. `spec` uses the same key = value text as the CLI.
#[pyfunction]
#[pyo3(signature = (spec = "", seed = 0, chains = None, iterations = None))]
fn search<'py>(
    py: Python<'py>,
    spec: &str,
    seed: u64,
    chains: Option<usize>,
    iterations: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut s = SearchSpec::parse(spec).map_err(err)?;
    s.seed = seed;
    if let Some(n) = chains {
        s.chains = n;
    }
    if let Some(n) = iterations {
        s.max_iterations = n;
    }
    let o = py.allow_threads(|| run_chains(&s)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("best", o.best)?;
    d.set_item(
        "chains",
        o.chains
            .iter()
            .map(|c| (c.seed, c.max_deviation, c.face_number))
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "torus",
        Torus {
            inner: o.best().configuration.clone(),
        },
    )?;
    Ok(d)
}

#[pymodule]
fn papertorus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Torus>()?;
    m.add_function(wrap_pyfunction!(prove7, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(newton, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    Ok(())
}
