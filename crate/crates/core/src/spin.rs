//! Collective spin operators and states in the fixed-N two-mode Fock basis.
//!
//! Basis index `k` counts the occupation of mode `a`, so `|k, N-k>` has
//! `Sz = k - N/2`. The raising operator `S+ = a^dagger b` maps `k -> k+1`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NORM_TOLERANCE: f64 = 1e-10;
const DIRECTION_TOLERANCE: f64 = 1e-12;

/// Number of spin-1/2 particles. The Hilbert space has dimension `N + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ParticleNumber(usize);

impl ParticleNumber {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleNumber(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 + 1
    }

    /// Total spin `S = N/2`.
    pub fn spin(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn require_even(self, what: &'static str) -> Result<()> {
        if self.is_even() {
            Ok(())
        } else {
            Err(Error::OddParticleNumber { what, n: self.0 })
        }
    }
}

impl TryFrom<usize> for ParticleNumber {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ParticleNumber> for usize {
    fn from(n: ParticleNumber) -> usize {
        n.0
    }
}

impl fmt::Display for ParticleNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ln k!` for `k = 0..=n`, accumulated term by term so it stays finite for
/// large `n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Normalized pure state over the Fock basis `|k, N-k>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct StateVector {
    n: ParticleNumber,
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within `1e-10`.
    pub fn from_amplitudes(n: ParticleNumber, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != n.dim() {
            return Err(Error::DimensionMismatch {
                expected: n.dim(),
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n: ParticleNumber, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != n.dim() {
            return Err(Error::DimensionMismatch {
                expected: n.dim(),
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n,
            amps: amps.unscale(norm),
        })
    }

    pub(crate) fn from_raw(n: ParticleNumber, amps: DVector<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), n.dim());
        Self { n, amps }
    }

    pub fn particle_number(&self) -> ParticleNumber {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_n(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sqr(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn check_same_n(&self, other: &StateVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> StateVector {
        let z = Complex64::from_polar(1.0, phase);
        Self::from_raw(self.n, self.amps.map(|c| c * z))
    }

    /// Applies a unitary and returns the resulting state.
    pub fn transformed(&self, unitary: &DMatrix<Complex64>) -> Result<StateVector> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        Ok(Self::from_raw(self.n, unitary * &self.amps))
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    #[serde(rename = "N")]
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<StateRecord> for StateVector {
    type Error = Error;

    fn try_from(rec: StateRecord) -> Result<Self> {
        let n = ParticleNumber::new(rec.n)?;
        if rec.re.len() != rec.im.len() {
            return Err(Error::DimensionMismatch {
                expected: rec.re.len(),
                got: rec.im.len(),
            });
        }
        let amps = DVector::from_iterator(
            rec.re.len(),
            rec.re
                .iter()
                .zip(&rec.im)
                .map(|(&re, &im)| Complex64::new(re, im)),
        );
        StateVector::from_amplitudes(n, amps)
    }
}

impl From<StateVector> for StateRecord {
    fn from(s: StateVector) -> Self {
        StateRecord {
            n: s.n.get(),
            re: s.amps.iter().map(|c| c.re).collect(),
            im: s.amps.iter().map(|c| c.im).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];
}

/// Dense `(N+1) x (N+1)` representations of `Sx`, `Sy`, `Sz`.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    n: ParticleNumber,
    sx: DMatrix<Complex64>,
    sy: DMatrix<Complex64>,
    sz: DMatrix<Complex64>,
}

pub fn build_spin_matrices(n: ParticleNumber) -> SpinMatrices {
    let dim = n.dim();
    let nn = n.as_f64();
    let mut sp = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        let kf = k as f64;
        sp[(k + 1, k)] = Complex64::new(((kf + 1.0) * (nn - kf)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let sx = (&sp + &sm) * half;
    // (S+ - S-)/(2i) = -i/2 (S+ - S-)
    let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);
    let sz = DMatrix::from_diagonal(&DVector::from_fn(dim, |k, _| {
        Complex64::new(k as f64 - nn / 2.0, 0.0)
    }));
    SpinMatrices { n, sx, sy, sz }
}

impl SpinMatrices {
    pub fn new(n: ParticleNumber) -> Self {
        build_spin_matrices(n)
    }

    pub fn particle_number(&self) -> ParticleNumber {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n.dim()
    }

    pub fn sx(&self) -> &DMatrix<Complex64> {
        &self.sx
    }

    pub fn sy(&self) -> &DMatrix<Complex64> {
        &self.sy
    }

    pub fn sz(&self) -> &DMatrix<Complex64> {
        &self.sz
    }

    pub fn get(&self, axis: SpinAxis) -> &DMatrix<Complex64> {
        match axis {
            SpinAxis::X => &self.sx,
            SpinAxis::Y => &self.sy,
            SpinAxis::Z => &self.sz,
        }
    }

    /// `S+ = Sx + i Sy`.
    pub fn s_plus(&self) -> DMatrix<Complex64> {
        &self.sx + &self.sy * Complex64::i()
    }

    /// `S- = Sx - i Sy`.
    pub fn s_minus(&self) -> DMatrix<Complex64> {
        &self.sx - &self.sy * Complex64::i()
    }

    /// `n . S` for a unit direction.
    pub fn along(&self, dir: &BlochDirection) -> DMatrix<Complex64> {
        let [x, y, z] = dir.components();
        &self.sx * Complex64::from(x)
            + &self.sy * Complex64::from(y)
            + &self.sz * Complex64::from(z)
    }

    /// Matrix-vector product exploiting the tridiagonal band of each spin
    /// component; `O(N)` instead of `O(N^2)`.
    pub fn apply(&self, axis: SpinAxis, v: &DVector<Complex64>) -> DVector<Complex64> {
        let m = self.get(axis);
        let dim = self.dim();
        assert_eq!(v.len(), dim, "vector length must match spin dimension");
        DVector::from_fn(dim, |k, _| {
            let mut acc = m[(k, k)] * v[k];
            if k > 0 {
                acc += m[(k, k - 1)] * v[k - 1];
            }
            if k + 1 < dim {
                acc += m[(k, k + 1)] * v[k + 1];
            }
            acc
        })
    }

    pub fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.particle_number() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        Ok(())
    }
}

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection([f64; 3]);

impl BlochDirection {
    pub const X: BlochDirection = BlochDirection([1.0, 0.0, 0.0]);
    pub const Y: BlochDirection = BlochDirection([0.0, 1.0, 0.0]);
    pub const Z: BlochDirection = BlochDirection([0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > DIRECTION_TOLERANCE {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(Self([x, y, z]))
    }

    /// Normalizes any nonzero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    /// Direction at polar angle `theta` from +z and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

/// `exp(-i angle H)` for Hermitian `H` via its eigendecomposition.
pub fn hermitian_exp(h: &DMatrix<Complex64>, angle: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -angle * e)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Unitary `exp(-i angle n.S)`.
pub fn rotation_operator(s: &SpinMatrices, dir: &BlochDirection, angle: f64) -> DMatrix<Complex64> {
    hermitian_exp(&s.along(dir), angle)
}

/// Spin coherent state `|theta, phi>` with
/// `c_k = binom(N,k)^{1/2} cos(theta/2)^k (sin(theta/2) e^{i phi})^{N-k}`.
///
/// `theta` is measured from the pole where mode `a` is fully occupied and may
/// equal `pi`.
pub fn coherent_state(theta: f64, phi: f64, n: ParticleNumber) -> Result<StateVector> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi]",
        });
    }
    if !(-std::f64::consts::PI..std::f64::consts::PI).contains(&phi) {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
            range: "[-pi, pi)",
        });
    }
    Ok(coherent_state_unchecked(theta, phi, n))
}

pub(crate) fn coherent_state_unchecked(theta: f64, phi: f64, n: ParticleNumber) -> StateVector {
    let amps = coherent_amplitudes(theta, phi, n, &ln_factorials(n.get()));
    StateVector::normalized(n, amps).expect("coherent amplitudes are nonzero")
}

/// Real magnitudes `binom(N,k)^{1/2} cos^k sin^{N-k}` of a coherent state at
/// polar angle `theta`.
pub(crate) fn coherent_magnitudes(theta: f64, n: usize, lnfact: &[f64]) -> Vec<f64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let (ls, lc) = (s.abs().ln(), c.abs().ln());
    let pow_ln = |ln_x: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * ln_x };
    (0..=n)
        .map(|k| {
            let ln_binom = lnfact[n] - lnfact[k] - lnfact[n - k];
            let mag = (0.5 * ln_binom + pow_ln(lc, k) + pow_ln(ls, n - k)).exp();
            // signs of cos/sin matter only outside [0, pi]
            let sign = if (c < 0.0 && k % 2 == 1) ^ (s < 0.0 && (n - k) % 2 == 1) {
                -1.0
            } else {
                1.0
            };
            sign * mag
        })
        .collect()
}

fn coherent_amplitudes(
    theta: f64,
    phi: f64,
    n: ParticleNumber,
    lnfact: &[f64],
) -> DVector<Complex64> {
    let nn = n.get();
    let mags = coherent_magnitudes(theta, nn, lnfact);
    DVector::from_iterator(
        nn + 1,
        mags.iter()
            .enumerate()
            .map(|(k, &m)| Complex64::from_polar(m, (nn - k) as f64 * phi)),
    )
}

/// Fock basis vector `|k, N-k>`.
pub fn fock_state(k: usize, n: ParticleNumber) -> Result<StateVector> {
    if k > n.get() {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[0, N]",
        });
    }
    let mut amps = DVector::zeros(n.dim());
    amps[k] = Complex64::new(1.0, 0.0);
    Ok(StateVector::from_raw(n, amps))
}

/// Returns `exp(-i angle n.S) psi`.
pub fn rotate_state(psi: &StateVector, dir: &BlochDirection, angle: f64) -> Result<StateVector> {
    let s = SpinMatrices::new(psi.particle_number());
    rotate_state_with(&s, psi, dir, angle)
}

/// Same as [`rotate_state`] but reuses prebuilt spin matrices.
pub fn rotate_state_with(
    s: &SpinMatrices,
    psi: &StateVector,
    dir: &BlochDirection,
    angle: f64,
) -> Result<StateVector> {
    s.check_state(psi)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    if angle == 0.0 {
        return Ok(psi.clone());
    }
    psi.transformed(&rotation_operator(s, dir, angle))
}
