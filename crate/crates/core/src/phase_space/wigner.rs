use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::cg::coupling_block;
use super::{MapKind, SphereGrid, SphereMap};
use crate::error::{Error, Result};
use crate::spin::StateVector;

/// Normalized associated Legendre functions with the Condon-Shortley phase,
/// `table[l][m]` for `0 <= m <= l <= lmax`, including the `1/sqrt(4 pi)`
/// so that `Y_lm = table[l][m] e^{i m phi}`.
fn legendre_table(lmax: usize, theta: f64) -> Vec<Vec<f64>> {
    let (s, x) = theta.sin_cos();
    let s = s.abs();
    let mut p: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; l + 1]).collect();
    p[0][0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[m][m] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[m - 1][m - 1];
    }
    for m in 0..lmax {
        p[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * x * p[m][m];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}

fn neg_sign(q: usize) -> f64 {
    if q % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Y_KQ(theta, phi)`, orthonormal on the sphere, Condon-Shortley phase.
pub fn spherical_harmonic(k: usize, q: i64, theta: f64, phi: f64) -> Complex64 {
    let aq = q.unsigned_abs() as usize;
    if aq > k {
        return Complex64::new(0.0, 0.0);
    }
    let p = legendre_table(k, theta)[k][aq];
    let sign = if q < 0 { neg_sign(aq) } else { 1.0 };
    Complex64::from_polar(sign * p, q as f64 * phi)
}

/// State multipoles `rho_KQ = <psi| T_KQ^dagger |psi>` for the orthonormal
/// tensor operators `T_KQ = sum_m (-1)^(S-m) <S, m+Q; S, -m | K, Q> |m+Q><m|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipoles {
    n: usize,
    /// `rho[K][Q + K]`.
    rho: Vec<Vec<Complex64>>,
}

impl Multipoles {
    pub fn new(psi: &StateVector) -> Self {
        let n = psi.particle_number().get();
        let c = psi.amplitudes();
        let parity = |x: usize| neg_sign(x);
        // per-Q blocks are independent; each yields rho_{K,+Q} and rho_{K,-Q}
        let per_q: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..=n)
            .into_par_iter()
            .map(|q| {
                let block: DMatrix<f64> = coupling_block(n, q);
                let mut plus = Vec::with_capacity(n + 1 - q);
                let mut minus = Vec::with_capacity(n + 1 - q);
                for kk in q..=n {
                    let row = kk - q;
                    let mut sp = Complex64::new(0.0, 0.0);
                    let mut sm = Complex64::new(0.0, 0.0);
                    for k in 0..=(n - q) {
                        // |k+q><k| with m1 = k+q-S, m2 = S-k
                        sp += parity(n - k) * block[(row, n - k - q)] * c[k + q].conj() * c[k];
                    }
                    for k in q..=n {
                        // |k-q><k|, coefficient mapped onto the +Q block by m -> -m
                        sm += parity(n - k)
                            * parity(n - kk)
                            * block[(row, k - q)]
                            * c[k - q].conj()
                            * c[k];
                    }
                    plus.push(sp.conj());
                    minus.push(sm.conj());
                }
                (plus, minus)
            })
            .collect();
        let mut rho: Vec<Vec<Complex64>> = (0..=n)
            .map(|k| vec![Complex64::new(0.0, 0.0); 2 * k + 1])
            .collect();
        for (q, (plus, minus)) in per_q.into_iter().enumerate() {
            for (row, (p, m)) in plus.into_iter().zip(minus).enumerate() {
                let kk = q + row;
                rho[kk][kk + q] = p;
                rho[kk][kk - q] = m;
            }
        }
        Self { n, rho }
    }

    pub fn particle_number(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, q: i64) -> Complex64 {
        if k > self.n || q.unsigned_abs() as usize > k {
            return Complex64::new(0.0, 0.0);
        }
        self.rho[k][(k as i64 + q) as usize]
    }

    /// `sum_KQ |rho_KQ|^2`, the purity of the state for orthonormal tensors.
    pub fn power(&self) -> f64 {
        self.rho.iter().flatten().map(|r| r.norm_sqr()).sum()
    }
}

/// Spherical Wigner function `W = sum_KQ rho_KQ Y_KQ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    multipoles: Multipoles,
}

impl WignerFunction {
    pub fn new(psi: &StateVector) -> Self {
        Self {
            multipoles: Multipoles::new(psi),
        }
    }

    pub fn multipoles(&self) -> &Multipoles {
        &self.multipoles
    }

    /// Azimuthal Fourier coefficients `A_Q(theta)` for `Q = -N..=N`.
    fn azimuthal(&self, theta: f64) -> Vec<Complex64> {
        let n = self.multipoles.n;
        let p = legendre_table(n, theta);
        let mut a = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        for q in 0..=n {
            let mut plus = Complex64::new(0.0, 0.0);
            let mut minus = Complex64::new(0.0, 0.0);
            for k in q..=n {
                plus += self.multipoles.rho[k][k + q] * p[k][q];
                minus += self.multipoles.rho[k][k - q] * p[k][q];
            }
            a[n + q] = plus;
            if q > 0 {
                a[n - q] = minus * neg_sign(q);
            }
        }
        a
    }

    fn sum_azimuthal(a: &[Complex64], phi: f64) -> Complex64 {
        let n = (a.len() - 1) / 2;
        let e = Complex64::from_polar(1.0, phi);
        let mut acc = a[n];
        let (mut up, mut down) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for q in 1..=n {
            up *= e;
            down *= e.conj();
            acc += a[n + q] * up + a[n - q] * down;
        }
        acc
    }

    /// Complex value of the expansion; the imaginary part is round-off.
    pub fn value_complex(&self, theta: f64, phi: f64) -> Complex64 {
        Self::sum_azimuthal(&self.azimuthal(theta), phi)
    }

    pub fn value(&self, theta: f64, phi: f64) -> f64 {
        self.value_complex(theta, phi).re
    }

    /// Samples the function on a grid; also returns the largest imaginary
    /// part seen.
    pub fn sample(&self, grid: &SphereGrid) -> (SphereMap, f64) {
        let rows: Vec<Vec<Complex64>> = grid
            .thetas()
            .par_iter()
            .map(|&theta| {
                let a = self.azimuthal(theta);
                grid.phis()
                    .iter()
                    .map(|&phi| Self::sum_azimuthal(&a, phi))
                    .collect()
            })
            .collect();
        let residual = rows
            .iter()
            .flatten()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        let values = DMatrix::from_fn(grid.n_theta(), grid.n_phi(), |i, j| rows[i][j].re);
        (
            SphereMap {
                grid: grid.clone(),
                values,
                kind: MapKind::Wigner,
            },
            residual,
        )
    }

    /// Values at evenly spaced points around a great circle.
    pub fn profile(&self, circle: &GreatCircle, samples: usize) -> CircleProfile {
        let pts: Vec<(f64, f64, f64)> = (0..samples)
            .map(|i| {
                let s = 2.0 * PI * i as f64 / samples as f64;
                let (th, ph) = circle.point(s);
                (s, th, ph)
            })
            .collect();
        let values = pts
            .par_iter()
            .map(|&(_, th, ph)| self.value(th, ph))
            .collect();
        CircleProfile {
            kind: MapKind::Wigner,
            arc: pts.iter().map(|p| p.0).collect(),
            values,
        }
    }
}

/// Convenience wrapper: the Wigner map of `psi` on `grid`.
pub fn wigner_map(psi: &StateVector, grid: &SphereGrid) -> SphereMap {
    WignerFunction::new(psi).sample(grid).0
}

pub fn wigner_value(psi: &StateVector, theta: f64, phi: f64) -> f64 {
    WignerFunction::new(psi).value(theta, phi)
}

/// Great circle `p(s) = cos(s) u + sin(s) v` for orthonormal `u`, `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircle {
    u: [f64; 3],
    v: [f64; 3],
}

impl GreatCircle {
    /// Through both poles: down the meridian at `phi`, back up at `phi + pi`.
    pub fn meridian(phi: f64) -> Self {
        Self {
            u: [0.0, 0.0, 1.0],
            v: [phi.cos(), phi.sin(), 0.0],
        }
    }

    pub fn equator() -> Self {
        Self {
            u: [1.0, 0.0, 0.0],
            v: [0.0, 1.0, 0.0],
        }
    }

    /// `(theta, phi)` at arc parameter `s`.
    pub fn point(&self, s: f64) -> (f64, f64) {
        let (sn, cs) = s.sin_cos();
        let p: Vec<f64> = (0..3).map(|i| cs * self.u[i] + sn * self.v[i]).collect();
        (p[2].clamp(-1.0, 1.0).acos(), p[1].atan2(p[0]))
    }
}

/// A closed loop of samples of a sphere function.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleProfile {
    pub kind: MapKind,
    pub arc: Vec<f64>,
    pub values: Vec<f64>,
}

/// Sign changes around a closed loop, ignoring samples with
/// `|v| <= 1e-9 max|v|`.
pub fn sign_changes(values: &[f64]) -> usize {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-9 * top;
    let signs: Vec<bool> = values
        .iter()
        .filter(|v| v.abs() > floor)
        .map(|&v| v > 0.0)
        .collect();
    if signs.len() < 2 {
        return 0;
    }
    let inner = signs.windows(2).filter(|w| w[0] != w[1]).count();
    inner + usize::from(signs[0] != signs[signs.len() - 1])
}

fn require_wigner(kind: MapKind) -> Result<()> {
    match kind {
        MapKind::Wigner => Ok(()),
        MapKind::Husimi => Err(Error::WrongMapKind { expected: "Wigner" }),
    }
}

/// Number of negative lobes crossed by a closed profile: half the sign
/// changes around the loop.
pub fn fringe_count(profile: &CircleProfile) -> Result<usize> {
    require_wigner(profile.kind)?;
    Ok(sign_changes(&profile.values) / 2)
}

/// Great circles that run along grid lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridCircle {
    /// The grid meridian nearest `phi`, closed through the opposite one.
    /// Needs an even azimuth count.
    Meridian(f64),
    /// `theta = pi/2`; needs an odd polar node count.
    Equator,
}

/// [`fringe_count`] evaluated on grid samples only.
pub fn fringe_count_on_map(map: &SphereMap, circle: GridCircle) -> Result<usize> {
    require_wigner(map.kind)?;
    let g = &map.grid;
    let values: Vec<f64> = match circle {
        GridCircle::Meridian(phi) => {
            if g.n_phi() % 2 != 0 {
                return Err(Error::InvalidArgument(
                    "meridian loop needs an even azimuth count".into(),
                ));
            }
            let j = g.nearest_phi(phi);
            let opposite = (j + g.n_phi() / 2) % g.n_phi();
            (0..g.n_theta())
                .map(|i| map.values[(i, j)])
                .chain((0..g.n_theta()).rev().map(|i| map.values[(i, opposite)]))
                .collect()
        }
        GridCircle::Equator => {
            if g.n_theta() % 2 != 1 {
                return Err(Error::InvalidArgument(
                    "equator needs an odd polar node count".into(),
                ));
            }
            map.values.row(g.n_theta() / 2).iter().copied().collect()
        }
    };
    Ok(sign_changes(&values) / 2)
}
