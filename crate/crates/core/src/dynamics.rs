//! Counter-twisting Hamiltonians and exact propagation by eigendecomposition.
//!
//! Units: `hbar = 1`. A [`Propagator`] built from a [`HamiltonianSpec`]
//! stores energies in units of `chi`, so every time argument is the
//! dimensionless `chi * t`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{ParticleNumber, SpinMatrices, StateVector};

const HERMITICITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// `(chi/2i)(S+^2 - S-^2)`
    TactOriginal,
    /// `-chi(Sy Sz + Sz Sy)`; the original form rotated by `exp(-i pi/2 Sy)`.
    TactRotated,
    /// `chi(Sx^2 - Sy^2)`; stable fixed points sit on the equator.
    TactEquivalent,
    /// One-axis twisting `chi Sz^2`, the comparison baseline.
    Oat,
}

impl HamiltonianKind {
    pub fn name(self) -> &'static str {
        match self {
            HamiltonianKind::TactOriginal => "tact_original",
            HamiltonianKind::TactRotated => "tact_rotated",
            HamiltonianKind::TactEquivalent => "tact_equivalent",
            HamiltonianKind::Oat => "oat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub chi: f64,
    pub n: ParticleNumber,
}

impl HamiltonianSpec {
    pub fn new(kind: HamiltonianKind, chi: f64, n: ParticleNumber) -> Result<Self> {
        if chi == 0.0 || !chi.is_finite() {
            return Err(Error::ZeroCoupling);
        }
        Ok(Self { kind, chi, n })
    }

    /// Unit coupling, the convention used throughout for `chi t` axes.
    pub fn unit(kind: HamiltonianKind, n: ParticleNumber) -> Self {
        Self { kind, chi: 1.0, n }
    }
}

pub fn build_hamiltonian(spec: &HamiltonianSpec, s: &SpinMatrices) -> Result<DMatrix<Complex64>> {
    if spec.n != s.particle_number() {
        return Err(Error::DimensionMismatch {
            expected: spec.n.dim(),
            got: s.dim(),
        });
    }
    if spec.chi == 0.0 || !spec.chi.is_finite() {
        return Err(Error::ZeroCoupling);
    }
    let chi = Complex64::from(spec.chi);
    let h = match spec.kind {
        HamiltonianKind::TactOriginal => {
            let sp = s.s_plus();
            let sm = s.s_minus();
            // chi/(2i) = -i chi/2
            (&sp * &sp - &sm * &sm) * (chi * Complex64::new(0.0, -0.5))
        }
        HamiltonianKind::TactRotated => (s.sy() * s.sz() + s.sz() * s.sy()) * (-chi),
        HamiltonianKind::TactEquivalent => (s.sx() * s.sx() - s.sy() * s.sy()) * chi,
        HamiltonianKind::Oat => s.sz() * s.sz() * chi,
    };
    // symmetrize away rounding so the eigensolver sees an exactly Hermitian input
    Ok((&h + h.adjoint()) * Complex64::from(0.5))
}

pub fn max_hermiticity_defect(h: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition `H = V diag(E) V^dagger`, reused for every evolution time.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: ParticleNumber,
    /// Eigenvalues divided by `scale`, ascending.
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
    scale: f64,
}

/// Diagonalizes a Hermitian matrix. Times passed to the resulting propagator
/// are physical times (`hbar = 1`).
pub fn diagonalize(h: &DMatrix<Complex64>) -> Result<Propagator> {
    diagonalize_scaled(h, 1.0)
}

fn diagonalize_scaled(h: &DMatrix<Complex64>, scale: f64) -> Result<Propagator> {
    if h.nrows() != h.ncols() || h.nrows() < 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix of size >= 2, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let max_entry = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let defect = max_hermiticity_defect(h);
    if defect > HERMITICITY_TOLERANCE * max_entry.max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = ParticleNumber::new(h.nrows() - 1)?;
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j] / scale).collect();
    let eigenvectors =
        DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Propagator {
        n,
        eigenvalues,
        eigenvectors,
        scale,
    })
}

impl Propagator {
    /// Builds and diagonalizes the Hamiltonian; times are then `chi t`.
    pub fn from_spec(spec: &HamiltonianSpec, s: &SpinMatrices) -> Result<Self> {
        let h = build_hamiltonian(spec, s)?;
        diagonalize_scaled(&h, spec.chi)
    }

    pub fn particle_number(&self) -> ParticleNumber {
        self.n
    }

    /// Energies in units of the coupling.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// `V diag(E) V^dagger`, in units of the coupling.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::from(self.eigenvalues[j]);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Coordinates of `psi` in the eigenbasis.
    pub fn project(&self, psi: &StateVector) -> Result<DVector<Complex64>> {
        if psi.particle_number() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.dim(),
                got: psi.dim(),
            });
        }
        Ok(self.eigenvectors.ad_mul(psi.amplitudes()))
    }

    pub(crate) fn evolve_projected(&self, coords: &DVector<Complex64>, t: f64) -> StateVector {
        let phased = DVector::from_iterator(
            coords.len(),
            coords
                .iter()
                .zip(&self.eigenvalues)
                .map(|(&c, &e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        StateVector::from_raw(self.n, &self.eigenvectors * phased)
    }

    /// `psi(t) = V exp(-i E t) V^dagger psi0`.
    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        if t == 0.0 {
            self.project(psi0)?;
            return Ok(psi0.clone());
        }
        let coords = self.project(psi0)?;
        Ok(self.evolve_projected(&coords, t))
    }

    /// Evolves to every time in `times`, sharing the eigenbasis projection.
    pub fn trajectory(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        let coords = self.project(psi0)?;
        Ok(times
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    psi0.clone()
                } else {
                    self.evolve_projected(&coords, t)
                }
            })
            .collect())
    }

    /// `<psi|H|psi>` in units of the coupling.
    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        let coords = self.project(psi)?;
        Ok(coords
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, e)| c.norm_sqr() * e)
            .sum())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

pub fn evolve(prop: &Propagator, psi0: &StateVector, chi_t: f64) -> Result<StateVector> {
    prop.evolve(psi0, chi_t)
}

pub fn trajectory(
    prop: &Propagator,
    psi0: &StateVector,
    times: &[f64],
) -> Result<Vec<StateVector>> {
    prop.trajectory(psi0, times)
}

/// `<psi|A|psi>` for a Hermitian matrix.
pub fn expectation(a: &DMatrix<Complex64>, psi: &StateVector) -> f64 {
    psi.amplitudes().dotc(&(a * psi.amplitudes())).re
}
