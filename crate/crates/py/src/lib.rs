//! Python bindings: meshes, grasp evaluation, archive generation, transfer,
//! and dataset output, mirroring the `qdg` CLI pipeline.

use glam::{DQuat, DVec3};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use qdg_core::config::run_config_digest;
use qdg_core::dataset::{write_dataset, DatasetRecord, SourceTag};
use qdg_core::grasp::{
    behavior_descriptor, evaluate_nominal, evaluate_with_quality, DomainRandomizationSpec,
    DomainRandomizedEvaluator, EvalOutcome, GraspGenome, GripperSpec,
};
use qdg_core::mesh::{self, AugmentationSpec, MeshFormat, TriMesh};
use qdg_core::qd::{self, Archive, RunConfig};
use qdg_core::transfer::{bootstrap_run, BootstrapArchive, TransferMode};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn io_err(e: impl std::fmt::Display) -> PyErr {
    PyIOError::new_err(e.to_string())
}

fn vec3(t: (f64, f64, f64)) -> DVec3 {
    DVec3::new(t.0, t.1, t.2)
}

fn tup(v: DVec3) -> (f64, f64, f64) {
    (v.x, v.y, v.z)
}

type Point = (f64, f64, f64);
type Quaternion = (f64, f64, f64, f64);
/// (point, normal, triangle index).
type SampleTuple = (Point, Point, usize);
/// (distance, point, normal, triangle index).
type HitTuple = (f64, Point, Point, usize);
/// (position, quaternion, quality, robust).
type EliteTuple = (Point, Quaternion, f64, bool);

/// A triangle mesh with precomputed geometry queries.
#[pyclass(name = "TriMesh", frozen)]
struct PyTriMesh {
    inner: TriMesh,
}

#[pymethods]
impl PyTriMesh {
    /// Load a mesh from .obj, .stl, or .qdgm.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let inner = mesh::io::load_mesh_auto(std::path::Path::new(path)).map_err(io_err)?;
        Ok(PyTriMesh { inner })
    }

    #[staticmethod]
    fn box_mesh(half_extents: (f64, f64, f64)) -> Self {
        PyTriMesh {
            inner: mesh::primitives::box_mesh(vec3(half_extents)),
        }
    }

    #[staticmethod]
    fn icosphere(radius: f64, subdivisions: u32) -> Self {
        PyTriMesh {
            inner: mesh::primitives::icosphere(radius, subdivisions),
        }
    }

    #[staticmethod]
    fn cylinder(radius: f64, half_height: f64, segments: u32) -> Self {
        PyTriMesh {
            inner: mesh::primitives::cylinder(radius, half_height, segments),
        }
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn triangle_count(&self) -> usize {
        self.inner.triangle_count()
    }

    #[getter]
    fn digest(&self) -> String {
        self.inner.digest_hex()
    }

    #[getter]
    fn total_area(&self) -> f64 {
        self.inner.total_area()
    }

    /// Axis-aligned bounds as (min, max) tuples.
    fn aabb(&self) -> ((f64, f64, f64), (f64, f64, f64)) {
        let b = self.inner.aabb();
        (tup(b.min), tup(b.max))
    }

    /// Diagonal scale about the bounding-box center.
    fn augment(&self, alpha: (f64, f64, f64)) -> PyResult<Self> {
        let spec = AugmentationSpec::new([alpha.0, alpha.1, alpha.2], "py", 0).map_err(value_err)?;
        Ok(PyTriMesh {
            inner: mesh::augment(&self.inner, &spec).map_err(value_err)?,
        })
    }

    /// Vertex-clustering decimation; returns the mesh and the vertex-sampled
    /// Hausdorff distance to the input.
    fn decimate(&self, target_triangles: usize) -> PyResult<(Self, f64)> {
        let out = mesh::decimate(&self.inner, target_triangles).map_err(value_err)?;
        Ok((PyTriMesh { inner: out.mesh }, out.hausdorff))
    }

    /// Area-weighted surface samples: (point, normal, triangle_index) triples.
    fn sample_surface(
        &self,
        seed: u64,
        count: usize,
    ) -> PyResult<Vec<SampleTuple>> {
        let samples = self.inner.sample_surface(seed, count).map_err(value_err)?;
        Ok(samples
            .iter()
            .map(|s| (tup(s.point), tup(s.normal), s.triangle_index))
            .collect())
    }

    /// Nearest ray hit within max_dist: (distance, point, normal, triangle).
    fn raycast(
        &self,
        origin: (f64, f64, f64),
        direction: (f64, f64, f64),
        max_dist: f64,
    ) -> PyResult<Option<HitTuple>> {
        let hit = self
            .inner
            .raycast(vec3(origin), vec3(direction), max_dist)
            .map_err(value_err)?;
        Ok(hit.map(|h| (h.distance, tup(h.point), tup(h.normal), h.triangle_index)))
    }

    fn distance_to_surface(&self, point: (f64, f64, f64)) -> f64 {
        self.inner.distance_to_surface(vec3(point))
    }

    /// Save as .obj, .stl, or .qdgm by extension.
    fn save(&self, path: &str) -> PyResult<()> {
        let p = std::path::Path::new(path);
        match MeshFormat::from_path(p) {
            Some(MeshFormat::Obj) => mesh::save_obj(&self.inner, p),
            Some(MeshFormat::Stl) => mesh::save_stl(&self.inner, p),
            Some(MeshFormat::InternalBinary) => mesh::save_internal_binary(&self.inner, p),
            None => return Err(value_err("unrecognized extension (.obj, .stl, .qdgm)")),
        }
        .map_err(io_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "TriMesh(vertices={}, triangles={})",
            self.inner.vertex_count(),
            self.inner.triangle_count()
        )
    }
}

/// Parallel-jaw gripper parameters.
#[pyclass(name = "GripperSpec", frozen, from_py_object)]
#[derive(Clone)]
struct PyGripperSpec {
    inner: GripperSpec,
}

#[pymethods]
impl PyGripperSpec {
    #[new]
    #[pyo3(signature = (max_opening=None, finger_length=None, friction_coefficient=None, tcp_offset=None, contact_rays=None))]
    fn new(
        max_opening: Option<f64>,
        finger_length: Option<f64>,
        friction_coefficient: Option<f64>,
        tcp_offset: Option<f64>,
        contact_rays: Option<u32>,
    ) -> PyResult<Self> {
        let mut inner = GripperSpec::default();
        if let Some(v) = max_opening {
            inner.max_opening = v;
        }
        if let Some(v) = finger_length {
            inner.finger_length = v;
        }
        if let Some(v) = friction_coefficient {
            inner.friction_coefficient = v;
        }
        if let Some(v) = tcp_offset {
            inner.tcp_offset = v;
        }
        if let Some(v) = contact_rays {
            inner.contact_rays = v;
        }
        inner.validate().map_err(value_err)?;
        Ok(PyGripperSpec { inner })
    }

    #[getter]
    fn max_opening(&self) -> f64 {
        self.inner.max_opening
    }

    #[getter]
    fn friction_coefficient(&self) -> f64 {
        self.inner.friction_coefficient
    }

    #[getter]
    fn digest(&self) -> String {
        self.inner.digest_hex()
    }
}

/// A 6-DoF grasp pose in the object frame.
#[pyclass(name = "GraspGenome", frozen)]
struct PyGraspGenome {
    inner: GraspGenome,
}

#[pymethods]
impl PyGraspGenome {
    /// Build from a position and an (x, y, z, w) quaternion.
    #[new]
    fn new(position: (f64, f64, f64), quaternion: (f64, f64, f64, f64)) -> PyResult<Self> {
        let q = DQuat::from_xyzw(quaternion.0, quaternion.1, quaternion.2, quaternion.3);
        Ok(PyGraspGenome {
            inner: GraspGenome::new(vec3(position), q).map_err(value_err)?,
        })
    }

    #[getter]
    fn position(&self) -> (f64, f64, f64) {
        tup(self.inner.position())
    }

    #[getter]
    fn quaternion(&self) -> (f64, f64, f64, f64) {
        let q = self.inner.orientation();
        (q.x, q.y, q.z, q.w)
    }
}

fn outcome_dict(py: Python<'_>, outcome: &EvalOutcome) -> PyResult<Py<pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let d = PyDict::new(py);
    d.set_item("success", outcome.success)?;
    d.set_item("failure_reason", format!("{:?}", outcome.failure_reason))?;
    d.set_item("closing_width", outcome.closing_width)?;
    d.set_item("quality", outcome.quality)?;
    d.set_item("robust", outcome.robust)?;
    d.set_item("trials_run", outcome.trials_run)?;
    Ok(d.into())
}

/// Evaluate a grasp. With `label=True` the outcome carries the
/// domain-randomized quality and robust flag.
#[pyfunction]
#[pyo3(signature = (mesh, gripper, genome, label=false, seed=0))]
fn evaluate(
    py: Python<'_>,
    mesh: &PyTriMesh,
    gripper: &PyGripperSpec,
    genome: &PyGraspGenome,
    label: bool,
    seed: u64,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let outcome = if label {
        evaluate_with_quality(
            &mesh.inner,
            &gripper.inner,
            &genome.inner,
            &DomainRandomizationSpec::default(),
            seed,
        )
    } else {
        evaluate_nominal(&mesh.inner, &gripper.inner, &genome.inner)
    };
    outcome_dict(py, &outcome)
}

/// Tool-center-point position of a grasp pose.
#[pyfunction]
fn descriptor(genome: &PyGraspGenome, gripper: &PyGripperSpec) -> (f64, f64, f64) {
    tup(behavior_descriptor(&genome.inner, &gripper.inner))
}

/// An elite archive produced by a generation run.
#[pyclass(name = "Archive", frozen)]
struct PyArchive {
    inner: Archive,
    gripper: GripperSpec,
    config: RunConfig,
}

#[pymethods]
impl PyArchive {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn success_count(&self) -> usize {
        self.inner.success_count()
    }

    #[getter]
    fn robust_count(&self) -> usize {
        self.inner.robust_count()
    }

    #[getter]
    fn coverage(&self) -> f64 {
        self.inner.coverage()
    }

    #[getter]
    fn digest(&self) -> String {
        self.inner.digest_hex()
    }

    /// Elites as (position, quaternion, quality, robust) tuples.
    fn elites(&self) -> Vec<EliteTuple> {
        self.inner
            .elites()
            .map(|e| {
                let q = e.genome.orientation();
                (
                    tup(e.genome.position()),
                    (q.x, q.y, q.z, q.w),
                    e.outcome.quality_or_zero(),
                    e.outcome.robust,
                )
            })
            .collect()
    }

    /// Write the archive as a single-record dataset file.
    #[pyo3(signature = (path, object_id, mesh, augmented=false))]
    fn save_dataset(
        &self,
        path: &str,
        object_id: &str,
        mesh: &PyTriMesh,
        augmented: bool,
    ) -> PyResult<()> {
        let record = DatasetRecord::from_archive(
            &self.inner,
            object_id,
            &mesh.inner,
            if augmented {
                SourceTag::Augmented
            } else {
                SourceTag::Core
            },
            None,
            self.gripper.digest_hex(),
            run_config_digest(&self.config),
        );
        write_dataset(&[record], std::path::Path::new(path)).map_err(io_err)
    }
}

/// Run the optimizer from scratch on a mesh.
#[pyfunction]
#[pyo3(signature = (mesh, seed, budget=5000, gripper=None, bins_per_axis=25))]
fn generate(
    mesh: &PyTriMesh,
    seed: u64,
    budget: usize,
    gripper: Option<PyGripperSpec>,
    bins_per_axis: u32,
) -> PyResult<PyArchive> {
    let config = RunConfig {
        eval_budget: budget,
        rng_seed: seed,
        bins_per_axis,
        gripper: gripper.map_or_else(GripperSpec::default, |g| g.inner),
        ..Default::default()
    };
    let evaluator = DomainRandomizedEvaluator {
        gripper: config.gripper.clone(),
        dr: config.dr.clone(),
    };
    let result = qd::run(&mesh.inner, &config, None, &evaluator).map_err(value_err)?;
    Ok(PyArchive {
        inner: result.archive,
        gripper: config.gripper.clone(),
        config,
    })
}

/// Transfer an archive's successful grasps onto an augmentation of the
/// reference mesh. Returns the new archive plus a transfer report dict.
#[pyfunction]
#[pyo3(signature = (reference_mesh, archive, alpha, seed, stop_after_bootstrap=true, budget=5000))]
fn bootstrap(
    py: Python<'_>,
    reference_mesh: &PyTriMesh,
    archive: &PyArchive,
    alpha: (f64, f64, f64),
    seed: u64,
    stop_after_bootstrap: bool,
    budget: usize,
) -> PyResult<(PyArchive, Py<pyo3::types::PyDict>)> {
    use pyo3::types::PyDict;
    let spec = AugmentationSpec::new([alpha.0, alpha.1, alpha.2], "py", seed).map_err(value_err)?;
    let target = mesh::augment(&reference_mesh.inner, &spec).map_err(value_err)?;
    let seeds = BootstrapArchive::from_archive(
        &archive.inner,
        "py",
        archive.gripper.digest_hex(),
        run_config_digest(&archive.config),
    )
    .map_err(value_err)?;
    let config = RunConfig {
        eval_budget: budget.max(seeds.len()),
        rng_seed: seed,
        gripper: archive.gripper.clone(),
        ..archive.config.clone()
    };
    let evaluator = DomainRandomizedEvaluator {
        gripper: config.gripper.clone(),
        dr: config.dr.clone(),
    };
    let outcome = bootstrap_run(
        &target,
        &seeds,
        &spec,
        &config,
        stop_after_bootstrap,
        TransferMode::ScaledPosition,
        &evaluator,
    )
    .map_err(value_err)?;
    let report = PyDict::new(py);
    report.set_item("n_seeds", outcome.report.n_seeds)?;
    report.set_item("n_transferred", outcome.report.n_transferred)?;
    report.set_item("transfer_rate", outcome.report.transfer_rate)?;
    report.set_item("robust_count", outcome.report.robust_count)?;
    report.set_item("evaluations_used", outcome.report.evaluations_used)?;
    Ok((
        PyArchive {
            inner: outcome.archive,
            gripper: config.gripper.clone(),
            config,
        },
        report.into(),
    ))
}

#[pymodule]
fn qdg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriMesh>()?;
    m.add_class::<PyGripperSpec>()?;
    m.add_class::<PyGraspGenome>()?;
    m.add_class::<PyArchive>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(descriptor, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap, m)?)?;
    Ok(())
}
