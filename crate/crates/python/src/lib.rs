//! Python module `tact`: states, exact evolution with its observables and
//! event location, phase-space maps, and the mean-field and closed-form
//! approximations. Heavy calls release the interpreter lock.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tact_core::analysis::{default_t_max, locate_events, Evolution, DEFAULT_SAMPLES};
use tact_core::meanfield::{
    best_time_estimate, find_fixed_points, frozen_spin_prediction, integrate_trajectory, mf_energy, mf_rhs,
    BestTimeModel, FixedPointKind, GaussianModel, MeanFieldState,
};
use tact_core::metrology::{
    fock_probabilities, kitagawa_ueda_parameter, qfi_pure, spin_moments, squeezing_parameter, FidelityProbe,
    ReferenceKind, OBSERVABLE_COLUMNS,
};
use tact_core::phase_space::{fringe_count_on_map, husimi_map, GridCircle, SphereGrid, SphereMap, WignerFunction};
use tact_core::search::Extremum;
use tact_core::{build_spin_matrices, coherent_state, fock_state, Error, HamiltonianKind, ParticleNumber, StateVector};

fn err(e: Error) -> PyErr {
    match e {
        Error::PhaseUndefined(_) | Error::PoleCrossing { .. } | Error::NotBracketed(_) | Error::NotHermitian(_)
        | Error::VanishingMeanSpin => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn particles(n: usize) -> PyResult<ParticleNumber> {
    ParticleNumber::new(n).map_err(err)
}

fn parse_hamiltonian(name: &str) -> PyResult<HamiltonianKind> {
    Ok(match name {
        "tact_original" => HamiltonianKind::TactOriginal,
        "tact_rotated" => HamiltonianKind::TactRotated,
        "tact_equivalent" => HamiltonianKind::TactEquivalent,
        "oat" => HamiltonianKind::Oat,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown hamiltonian {other:?}; expected tact_original, tact_rotated, tact_equivalent or oat"
            )))
        }
    })
}

fn parse_reference(name: &str, alpha: Option<f64>) -> PyResult<ReferenceKind> {
    Ok(match (name, alpha) {
        ("BW", None) => ReferenceKind::BerryWiseman,
        ("EWSS", None) => ReferenceKind::Ewss,
        ("TF", None) => ReferenceKind::TwinFock,
        ("NOON", None) => ReferenceKind::Noon,
        ("Y", Some(alpha)) => ReferenceKind::Yurke { alpha },
        ("Y", None) => return Err(PyValueError::new_err("reference 'Y' needs alpha")),
        (other, _) => {
            return Err(PyValueError::new_err(format!(
                "unknown reference {other:?}; expected BW, EWSS, Y, TF or NOON"
            )))
        }
    })
}

fn grid_for(n: usize, n_theta: Option<usize>, n_phi: Option<usize>) -> PyResult<SphereGrid> {
    let (t, p) = (n_theta.unwrap_or(2 * n + 1), n_phi.unwrap_or(4 * n + 4));
    if t == 0 || p == 0 {
        return Err(PyValueError::new_err("grid sizes must be positive"));
    }
    Ok(SphereGrid::new(t, p))
}

/// `(thetas, phis, values)` with `values[i][j]` at `(thetas[i], phis[j])`.
type MapTriple = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

fn map_triple(m: &SphereMap) -> MapTriple {
    let values = (0..m.grid.n_theta())
        .map(|i| (0..m.grid.n_phi()).map(|j| m.values[(i, j)]).collect())
        .collect();
    (m.grid.thetas().to_vec(), m.grid.phis().to_vec(), values)
}

fn extremum(e: Extremum) -> (f64, f64) {
    (e.t, e.value)
}

/// Pure state of `N` two-mode bosons over the Fock basis `|k, N-k>`.
#[pyclass(name = "State", module = "tact", frozen)]
struct PyState {
    inner: StateVector,
}

#[pymethods]
impl PyState {
    /// Coherent state `|theta, phi>`.
    #[staticmethod]
    fn coherent(n: usize, theta: f64, phi: f64) -> PyResult<Self> {
        let inner = coherent_state(theta, phi, particles(n)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn fock(n: usize, k: usize) -> PyResult<Self> {
        let inner = fock_state(k, particles(n)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Normalizes the given `N + 1` amplitudes.
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        if amplitudes.is_empty() {
            return Err(PyValueError::new_err("need at least two amplitudes"));
        }
        let n = particles(amplitudes.len() - 1)?;
        let v = DVector::from_vec(amplitudes);
        let inner = StateVector::normalized(n, v).map_err(err)?;
        Ok(Self { inner })
    }

    /// Parses `{"N": .., "re": [..], "im": [..]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("state record is plain data")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.particle_number().get()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().iter().copied().collect()
    }

    fn probabilities(&self) -> Vec<f64> {
        fock_probabilities(&self.inner)
    }

    /// `|<self|other>|^2`.
    fn overlap(&self, other: &PyState) -> PyResult<f64> {
        self.inner.overlap_sqr(&other.inner).map_err(err)
    }

    /// `(mean, cov)` of `(Sx, Sy, Sz)`, covariance symmetrized.
    fn moments(&self) -> PyResult<([f64; 3], [[f64; 3]; 3])> {
        let s = build_spin_matrices(self.inner.particle_number());
        let m = spin_moments(&self.inner, &s).map_err(err)?;
        let cov = std::array::from_fn(|i| std::array::from_fn(|j| m.cov[(i, j)]));
        Ok(([m.mean[0], m.mean[1], m.mean[2]], cov))
    }

    /// Wineland parameter `N Var_min / |<S>|^2`.
    fn squeezing(&self) -> PyResult<f64> {
        let n = self.inner.particle_number();
        let m = spin_moments(&self.inner, &build_spin_matrices(n)).map_err(err)?;
        squeezing_parameter(&m, n).map_err(err)
    }

    /// Kitagawa-Ueda parameter `4 Var_min / N`.
    fn kitagawa_ueda(&self) -> PyResult<f64> {
        let n = self.inner.particle_number();
        let m = spin_moments(&self.inner, &build_spin_matrices(n)).map_err(err)?;
        kitagawa_ueda_parameter(&m, n).map_err(err)
    }

    /// Quantum Fisher information `4 lambda_max(cov)`.
    fn qfi(&self) -> PyResult<f64> {
        let m = spin_moments(&self.inner, &build_spin_matrices(self.inner.particle_number())).map_err(err)?;
        Ok(qfi_pure(&m))
    }

    /// Fidelity to one of `BW`, `EWSS`, `Y` (needs `alpha`), `TF`, `NOON`.
    #[pyo3(signature = (reference, alpha = None))]
    fn fidelity(&self, reference: &str, alpha: Option<f64>) -> PyResult<f64> {
        let kind = parse_reference(reference, alpha)?;
        let probe = FidelityProbe::new(&build_spin_matrices(self.inner.particle_number())).map_err(err)?;
        probe.fidelity(kind, &self.inner).map_err(err)
    }

    /// `(alpha, fidelity)` at the best Yurke mixing angle.
    fn best_yurke(&self) -> PyResult<(f64, f64)> {
        let probe = FidelityProbe::new(&build_spin_matrices(self.inner.particle_number())).map_err(err)?;
        probe.best_yurke(&self.inner).map_err(err)
    }

    #[pyo3(signature = (n_theta = None, n_phi = None))]
    fn husimi(&self, py: Python<'_>, n_theta: Option<usize>, n_phi: Option<usize>) -> PyResult<MapTriple> {
        let grid = grid_for(self.n(), n_theta, n_phi)?;
        Ok(py.detach(|| map_triple(&husimi_map(&self.inner, &grid))))
    }

    #[pyo3(signature = (n_theta = None, n_phi = None))]
    fn wigner(&self, py: Python<'_>, n_theta: Option<usize>, n_phi: Option<usize>) -> PyResult<MapTriple> {
        let grid = grid_for(self.n(), n_theta, n_phi)?;
        Ok(py.detach(|| map_triple(&WignerFunction::new(&self.inner).sample(&grid).0)))
    }

    /// Negative lobes of the Wigner function crossed along the equator.
    fn wigner_fringes(&self, py: Python<'_>) -> PyResult<usize> {
        let grid = SphereGrid::for_particles(self.n());
        let map = py.detach(|| WignerFunction::new(&self.inner).sample(&grid).0);
        fringe_count_on_map(&map, GridCircle::Equator).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("State(N={})", self.n())
    }
}

/// Exact evolution from a coherent state under one Hamiltonian, in units
/// with `chi = 1`.
#[pyclass(name = "Evolution", module = "tact", frozen)]
struct PyEvolution {
    inner: Evolution,
}

#[pymethods]
impl PyEvolution {
    #[new]
    #[pyo3(signature = (n, theta = FRAC_PI_2, phi = 0.0, hamiltonian = "tact_rotated"))]
    fn new(py: Python<'_>, n: usize, theta: f64, phi: f64, hamiltonian: &str) -> PyResult<Self> {
        let kind = parse_hamiltonian(hamiltonian)?;
        let n = particles(n)?;
        let inner = py.detach(|| Evolution::from_angles(kind, n, theta, phi)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.particle_number().get()
    }

    fn state(&self, chi_t: f64) -> PyState {
        PyState {
            inner: self.inner.state(chi_t),
        }
    }

    /// NaN when the mean spin vanishes.
    fn squeezing(&self, chi_t: f64) -> f64 {
        self.inner.squeezing(chi_t)
    }

    fn kitagawa_ueda(&self, chi_t: f64) -> f64 {
        self.inner.kitagawa_ueda(chi_t)
    }

    fn qfi(&self, chi_t: f64) -> f64 {
        self.inner.qfi(chi_t)
    }

    /// Observable columns keyed by name, one entry per time. Without
    /// `yurke_alpha` the Yurke fidelity uses the best angle at each time.
    #[pyo3(signature = (times, yurke_alpha = None))]
    fn sweep<'py>(&self, py: Python<'py>, times: Vec<f64>, yurke_alpha: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let rows = py.detach(|| self.inner.sweep(&times, yurke_alpha)).map_err(err)?;
        let out = PyDict::new(py);
        for (c, name) in OBSERVABLE_COLUMNS.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|r| r.values()[c]).collect();
            out.set_item(*name, col)?;
        }
        Ok(out)
    }

    /// `(chi_t, xi2)` at the first squeezing minimum.
    #[pyo3(signature = (t_max = None, samples = DEFAULT_SAMPLES))]
    fn best_squeezing(&self, py: Python<'_>, t_max: Option<f64>, samples: usize) -> PyResult<(f64, f64)> {
        let t_max = t_max.unwrap_or_else(|| default_t_max(self.inner.particle_number()));
        py.detach(|| self.inner.best_squeezing(t_max, samples)).map(extremum).map_err(err)
    }

    /// `(chi_t, F_Q)` at the first Fisher-information maximum.
    #[pyo3(signature = (t_max = None, samples = DEFAULT_SAMPLES))]
    fn first_qfi_maximum(&self, py: Python<'_>, t_max: Option<f64>, samples: usize) -> PyResult<(f64, f64)> {
        let t_max = t_max.unwrap_or_else(|| default_t_max(self.inner.particle_number()));
        py.detach(|| self.inner.first_qfi_maximum(t_max, samples)).map(extremum).map_err(err)
    }

    /// Events A-H as dicts with `label`, `description`, `chi_t`, `value`,
    /// `residual`. Needs even `N`.
    #[pyo3(signature = (t_max = None, samples = DEFAULT_SAMPLES))]
    fn events<'py>(&self, py: Python<'py>, t_max: Option<f64>, samples: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let t_max = t_max.unwrap_or_else(|| default_t_max(self.inner.particle_number()));
        let events = py.detach(|| locate_events(&self.inner, t_max, samples)).map_err(err)?;
        events
            .iter()
            .map(|e| {
                let d = PyDict::new(py);
                d.set_item("label", e.label.to_string())?;
                d.set_item("description", e.description)?;
                d.set_item("chi_t", e.chi_t)?;
                d.set_item("value", e.value)?;
                d.set_item("residual", e.residual)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Evolution(N={})", self.n())
    }
}

/// `3 ln(2 pi N) / (2N)`, the window holding events A-H.
#[pyfunction(name = "default_t_max")]
fn py_default_t_max(n: usize) -> PyResult<f64> {
    Ok(default_t_max(particles(n)?))
}

/// Six fixed points of the mean-field flow as dicts with `phi`, `z`,
/// `kind` and `eigenvalues`.
#[pyfunction]
fn fixed_points(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    find_fixed_points()
        .map_err(err)?
        .iter()
        .map(|f| {
            let d = PyDict::new(py);
            d.set_item("phi", f.location.phi)?;
            d.set_item("z", f.location.z)?;
            let kind = match f.kind {
                FixedPointKind::Saddle => "saddle",
                FixedPointKind::Center => "center",
            };
            d.set_item("kind", kind)?;
            d.set_item("eigenvalues", f.eigenvalues.to_vec())?;
            Ok(d)
        })
        .collect()
}

/// `(dphi/dt, dz/dt)` with time in units of `1/(N chi)`.
#[pyfunction]
fn mean_field_rhs(phi: f64, z: f64) -> PyResult<(f64, f64)> {
    mf_rhs(&MeanFieldState::wrapped(phi, z).map_err(err)?).map_err(err)
}

#[pyfunction]
fn mean_field_energy(phi: f64, z: f64) -> PyResult<f64> {
    Ok(mf_energy(&MeanFieldState::wrapped(phi, z).map_err(err)?))
}

/// RK4 trajectory as columns `t`, `phi`, `z`, `energy`.
#[pyfunction]
fn trajectory(py: Python<'_>, phi: f64, z: f64, t_end: f64, dt: f64) -> PyResult<Bound<'_, PyDict>> {
    let s0 = MeanFieldState::wrapped(phi, z).map_err(err)?;
    let tr = py.detach(|| integrate_trajectory(&s0, t_end, dt)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", tr.points.iter().map(|p| p.t).collect::<Vec<_>>())?;
    d.set_item("phi", tr.points.iter().map(|p| p.phi).collect::<Vec<_>>())?;
    d.set_item("z", tr.points.iter().map(|p| p.z).collect::<Vec<_>>())?;
    d.set_item("energy", tr.points.iter().map(|p| p.energy).collect::<Vec<_>>())?;
    Ok(d)
}

/// Gaussian-model values at `chi_t` for the saddle start.
#[pyfunction]
fn gaussian_model(py: Python<'_>, n: usize, chi_t: f64) -> PyResult<Bound<'_, PyDict>> {
    let p = GaussianModel::new(particles(n)?).at_chi_t(chi_t);
    let d = PyDict::new(py);
    d.set_item("chi_t", p.chi_t)?;
    d.set_item("tau", p.tau)?;
    d.set_item("s_x", p.s_x)?;
    d.set_item("xi2", p.xi2)?;
    d.set_item("fq", p.fq)?;
    d.set_item("valid", p.valid)?;
    Ok(d)
}

/// `(xi2, F_Q)` from the frozen-spin approximation at the stable point.
#[pyfunction]
fn frozen_spin(n: usize, chi_t: f64) -> PyResult<(f64, f64)> {
    Ok(frozen_spin_prediction(particles(n)?, chi_t))
}

/// `ln(2N)/(2N)` for `"squeezing"`, `ln(2 pi N)/(2N)` for `"qfi"`.
#[pyfunction]
fn best_time(n: usize, which: &str) -> PyResult<f64> {
    let model = match which {
        "squeezing" => BestTimeModel::SqueezingModel,
        "qfi" => BestTimeModel::QfiEmpirical,
        other => return Err(PyValueError::new_err(format!("expected 'squeezing' or 'qfi', got {other:?}"))),
    };
    best_time_estimate(particles(n)?, model).map_err(err)
}

#[pymodule]
pub fn tact(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyEvolution>()?;
    m.add_function(wrap_pyfunction!(py_default_t_max, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field_energy, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_model, m)?)?;
    m.add_function(wrap_pyfunction!(frozen_spin, m)?)?;
    m.add_function(wrap_pyfunction!(best_time, m)?)?;
    Ok(())
}
