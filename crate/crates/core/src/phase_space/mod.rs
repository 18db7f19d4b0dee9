//! Husimi and spherical Wigner distributions sampled on the Bloch sphere.

mod cg;
mod wigner;

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spin::{coherent_magnitudes, ln_factorials, StateVector};

pub use cg::{cg_coefficient, cg_doubled, CouplingTable};
pub use wigner::{
    fringe_count, fringe_count_on_map, sign_changes, spherical_harmonic, wigner_map, wigner_value,
    CircleProfile, GreatCircle, GridCircle, Multipoles, WignerFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Husimi,
    Wigner,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes descending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Product quadrature grid: Gauss-Legendre in `cos(theta)`, uniform in `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    thetas: Vec<f64>,
    theta_weights: Vec<f64>,
    phis: Vec<f64>,
}

impl SphereGrid {
    /// `n_phi` uniform azimuths `phi_j = -pi + 2 pi j / n_phi`.
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        assert!(n_theta >= 1 && n_phi >= 1, "empty sphere grid");
        let (x, w) = gauss_legendre(n_theta);
        Self {
            thetas: x.iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect(),
            theta_weights: w,
            phis: (0..n_phi)
                .map(|j| -PI + 2.0 * PI * j as f64 / n_phi as f64)
                .collect(),
        }
    }

    /// `2N+1` polar nodes and `4N+4` azimuths, exact for products of two
    /// degree-`N` spin functions.
    pub fn for_particles(n: usize) -> Self {
        Self::new(2 * n + 1, 4 * n + 4)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn weight(&self, i: usize, _j: usize) -> f64 {
        self.theta_weights[i] * 2.0 * PI / self.phis.len() as f64
    }

    pub fn total_weight(&self) -> f64 {
        (0..self.n_theta()).map(|i| self.weight(i, 0)).sum::<f64>() * self.n_phi() as f64
    }

    /// Index of the azimuth closest to `phi` (cyclically).
    pub fn nearest_phi(&self, phi: f64) -> usize {
        let step = 2.0 * PI / self.n_phi() as f64;
        let j = ((phi + PI) / step).round() as i64;
        j.rem_euclid(self.n_phi() as i64) as usize
    }
}

/// A scalar field on a [`SphereGrid`]; `values[(i, j)]` sits at
/// `(thetas[i], phis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMap {
    pub grid: SphereGrid,
    pub values: DMatrix<f64>,
    pub kind: MapKind,
}

impl SphereMap {
    /// Quadrature of the field over the sphere.
    pub fn integrate(&self) -> f64 {
        self.integrate_with(|v| v)
    }

    pub fn integrate_with(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.n_theta() {
            let row: f64 = (0..self.grid.n_phi()).map(|j| f(self.values[(i, j)])).sum();
            acc += row * self.grid.weight(i, 0);
        }
        acc
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// `(theta, phi)` of the largest sample.
    pub fn argmax(&self) -> (f64, f64) {
        let (mut bi, mut bj) = (0, 0);
        for i in 0..self.grid.n_theta() {
            for j in 0..self.grid.n_phi() {
                if self.values[(i, j)] > self.values[(bi, bj)] {
                    (bi, bj) = (i, j);
                }
            }
        }
        (self.grid.thetas[bi], self.grid.phis[bj])
    }

    /// CSV with header `theta,phi,value`, rows ordered theta-major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theta,phi,value")?;
        for (i, th) in self.grid.thetas.iter().enumerate() {
            for (j, ph) in self.grid.phis.iter().enumerate() {
                writeln!(w, "{th:.12e},{ph:.12e},{:.12e}", self.values[(i, j)])?;
            }
        }
        Ok(())
    }

    /// Two little-endian `u32` dimensions `(n_theta, n_phi)` followed by the
    /// values as row-major little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.grid.n_theta() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.n_phi() as u32).to_le_bytes())?;
        for i in 0..self.grid.n_theta() {
            for j in 0..self.grid.n_phi() {
                w.write_all(&self.values[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Reads back a [`SphereMap::write_binary`] dump as `(n_theta, n_phi, values)`.
pub fn read_binary_dump(bytes: &[u8]) -> io::Result<(usize, usize, Vec<f64>)> {
    let bad = || io::Error::new(io::ErrorKind::InvalidData, "truncated map dump");
    if bytes.len() < 8 {
        return Err(bad());
    }
    let nt = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let np = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != nt * np * 8 {
        return Err(bad());
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((nt, np, values))
}

/// `Q(theta, phi) = |<theta, phi | psi>|^2` on every grid node.
pub fn husimi_map(psi: &StateVector, grid: &SphereGrid) -> SphereMap {
    let n = psi.particle_number().get();
    let lf = ln_factorials(n);
    let amps = psi.amplitudes();
    let rows: Vec<Vec<f64>> = grid
        .thetas
        .par_iter()
        .map(|&theta| {
            let mags = coherent_magnitudes(theta, n, &lf);
            let weighted: Vec<Complex64> = (0..=n).map(|k| amps[k] * mags[k]).collect();
            grid.phis
                .iter()
                .map(|&phi| {
                    // sum_k r_k psi_k e^{-i(N-k)phi}, Horner in e^{-i phi}
                    let z = Complex64::from_polar(1.0, -phi);
                    weighted
                        .iter()
                        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
                        .norm_sqr()
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(grid.n_theta(), grid.n_phi(), |i, j| rows[i][j]);
    SphereMap {
        grid: grid.clone(),
        values,
        kind: MapKind::Husimi,
    }
}
