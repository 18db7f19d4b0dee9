//! Classical and semiclassical approximations to the counter-twisting
//! dynamics: the mean-field flow on the `(phi, z)` cylinder, the Gaussian
//! moment model for the saddle start, and the frozen-spin oscillation about a
//! center.
//!
//! Mean-field time is `tau = N chi t`; the Gaussian model uses its own
//! `tau = chi t sqrt(N)`. Public functions taking `chi_t` convert internally.

use std::f64::consts::{E, FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::ParticleNumber;

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Phase and population imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub phi: f64,
    pub z: f64,
}

impl MeanFieldState {
    pub fn new(phi: f64, z: f64) -> Result<Self> {
        if !(-PI..PI).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[-pi, pi)",
            });
        }
        if !(-1.0..=1.0).contains(&z) {
            return Err(Error::OutOfRange {
                name: "z",
                value: z,
                range: "[-1, 1]",
            });
        }
        Ok(Self { phi, z })
    }

    /// Builds a state, wrapping `phi` into range.
    pub fn wrapped(phi: f64, z: f64) -> Result<Self> {
        Self::new(wrap_angle(phi), z)
    }

    pub fn phase_defined(&self) -> bool {
        self.z.abs() < 1.0
    }

    /// Coherent-state angles `(theta, phi)` with `z = cos(theta)`.
    pub fn bloch_angles(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.phi)
    }

    /// Bloch vector `(sqrt(1-z^2) cos phi, sqrt(1-z^2) sin phi, z)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let r = (1.0 - self.z * self.z).max(0.0).sqrt();
        [r * self.phi.cos(), r * self.phi.sin(), self.z]
    }

    /// Distance on the cylinder, with the phase difference wrapped.
    pub fn distance(&self, other: &MeanFieldState) -> f64 {
        wrap_angle(self.phi - other.phi).hypot(self.z - other.z)
    }
}

fn rhs_raw(phi: f64, z: f64) -> (f64, f64) {
    let r = (1.0 - z * z).sqrt();
    (-(1.0 - 2.0 * z * z) / r * phi.sin(), z * r * phi.cos())
}

/// `(d phi/d tau, dz/d tau)`.
pub fn mf_rhs(s: &MeanFieldState) -> Result<(f64, f64)> {
    if !s.phase_defined() {
        return Err(Error::PhaseUndefined(s.z));
    }
    Ok(rhs_raw(s.phi, s.z))
}

/// Energy in units of `chi N^2 / 2`: `-z sqrt(1 - z^2) sin(phi)`.
pub fn mf_energy(s: &MeanFieldState) -> f64 {
    energy_raw(s.phi, s.z)
}

fn energy_raw(phi: f64, z: f64) -> f64 {
    -z * (1.0 - z * z).max(0.0).sqrt() * phi.sin()
}

/// Stability matrix `d(phi', z')/d(phi, z)`.
pub fn jacobian(s: &MeanFieldState) -> Result<[[f64; 2]; 2]> {
    if !s.phase_defined() {
        return Err(Error::PhaseUndefined(s.z));
    }
    let (phi, z) = (s.phi, s.z);
    let q = 1.0 - z * z;
    let r = q.sqrt();
    let (sn, cs) = phi.sin_cos();
    Ok([
        [-(1.0 - 2.0 * z * z) / r * cs, -sn * z * (2.0 * z * z - 3.0) / (q * r)],
        [-z * r * sn, cs * (1.0 - 2.0 * z * z) / r],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Saddle,
    Center,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub location: MeanFieldState,
    pub kind: FixedPointKind,
    /// In units of `N chi`.
    pub eigenvalues: [Complex64; 2],
    /// Real eigenvectors for a saddle; real and imaginary parts of the
    /// `+i omega` eigenvector for a center.
    pub eigenvectors: [[f64; 2]; 2],
}

fn classify(location: MeanFieldState) -> Result<FixedPoint> {
    let j = jacobian(&location)?;
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    let half = tr / 2.0;
    if disc > 0.0 && det < 0.0 {
        let root = disc.sqrt();
        let lams = [half + root, half - root];
        let vecs = lams.map(|l| real_eigenvector(&j, l));
        Ok(FixedPoint {
            location,
            kind: FixedPointKind::Saddle,
            eigenvalues: lams.map(|l| Complex64::new(l, 0.0)),
            eigenvectors: vecs,
        })
    } else if disc < 0.0 && half.abs() < 1e-10 {
        let w = (-disc).sqrt();
        // (J - i w) v = 0 with v = (j01, i w - j00)
        let v = [Complex64::new(j[0][1], 0.0), Complex64::new(-j[0][0], w)];
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        Ok(FixedPoint {
            location,
            kind: FixedPointKind::Center,
            eigenvalues: [Complex64::new(0.0, w), Complex64::new(0.0, -w)],
            eigenvectors: [[v[0].re / norm, v[1].re / norm], [v[0].im / norm, v[1].im / norm]],
        })
    } else {
        Err(Error::InvalidArgument(format!(
            "fixed point at ({}, {}) is neither a saddle nor a center",
            location.phi, location.z
        )))
    }
}

fn real_eigenvector(j: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    let a = [j[0][1], lambda - j[0][0]];
    let b = [lambda - j[1][1], j[1][0]];
    let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Newton iteration on the flow field; `None` if it leaves `|z| < 1` or
/// does not converge.
fn newton(phi0: f64, z0: f64) -> Option<MeanFieldState> {
    let (mut phi, mut z) = (phi0, z0);
    for _ in 0..60 {
        if z.abs() >= 1.0 {
            return None;
        }
        let (f, g) = rhs_raw(phi, z);
        if f.hypot(g) < 1e-14 {
            return MeanFieldState::wrapped(phi, z).ok();
        }
        let s = MeanFieldState { phi, z };
        let j = jacobian(&s).ok()?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        phi -= (j[1][1] * f - j[0][1] * g) / det;
        z -= (-j[1][0] * f + j[0][0] * g) / det;
    }
    None
}

/// The six fixed points: saddles at `(0, 0)` and `(pi, 0)` (stored as
/// `phi = -pi`), centers at `(+-pi/2, +-1/sqrt2)`.
///
/// The analytic roots are checked against Newton iteration from a 32x32 seed
/// grid; an error means the seeds found a root not in the analytic list.
pub fn find_fixed_points() -> Result<Vec<FixedPoint>> {
    let analytic = [
        (0.0, 0.0),
        (-PI, 0.0),
        (FRAC_PI_2, FRAC_1_SQRT_2),
        (FRAC_PI_2, -FRAC_1_SQRT_2),
        (-FRAC_PI_2, FRAC_1_SQRT_2),
        (-FRAC_PI_2, -FRAC_1_SQRT_2),
    ]
    .map(|(p, z)| MeanFieldState { phi: p, z });

    const SEEDS: usize = 32;
    for i in 0..SEEDS {
        for k in 0..SEEDS {
            let phi = -PI + 2.0 * PI * (i as f64 + 0.5) / SEEDS as f64;
            let z = -1.0 + 2.0 * (k as f64 + 0.5) / SEEDS as f64;
            if let Some(root) = newton(phi, z) {
                if !analytic.iter().any(|a| a.distance(&root) < 1e-8) {
                    return Err(Error::InvalidArgument(format!(
                        "unexpected fixed point at ({}, {})",
                        root.phi, root.z
                    )));
                }
            }
        }
    }
    analytic.into_iter().map(classify).collect()
}

/// `|(phi', z')|` at a point, for checking fixed points.
pub fn fixed_point_residual(s: &MeanFieldState) -> Result<f64> {
    let (f, g) = mf_rhs(s)?;
    Ok(f.hypot(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub phi: f64,
    pub z: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.points[0].energy;
        self.points.iter().map(|p| (p.energy - e0).abs()).fold(0.0, f64::max)
    }

    /// CSV with header `t,phi,z,energy`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,phi,z,energy")?;
        for p in &self.points {
            writeln!(w, "{:.12e},{:.12e},{:.12e},{:.12e}", p.t, p.phi, p.z, p.energy)?;
        }
        Ok(())
    }
}

fn rk4_step(phi: f64, z: f64, h: f64) -> (f64, f64) {
    let (a1, b1) = rhs_raw(phi, z);
    let (a2, b2) = rhs_raw(phi + 0.5 * h * a1, z + 0.5 * h * b1);
    let (a3, b3) = rhs_raw(phi + 0.5 * h * a2, z + 0.5 * h * b2);
    let (a4, b4) = rhs_raw(phi + h * a3, z + h * b3);
    (
        phi + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        z + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

fn check_step(t: f64, phi: f64, z: f64) -> Result<()> {
    if !(z.abs() < 1.0) || !phi.is_finite() {
        return Err(Error::PoleCrossing { t, z });
    }
    Ok(())
}

/// Classical RK4 with a fixed step of at most `dt`, in units of `1/(N chi)`.
pub fn integrate_trajectory(s0: &MeanFieldState, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !s0.phase_defined() {
        return Err(Error::PhaseUndefined(s0.z));
    }
    if !(t_end >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument("need t_end >= 0 and dt > 0".into()));
    }
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let (mut phi, mut z) = (s0.phi, s0.z);
    let mut points = Vec::with_capacity(steps + 1);
    points.push(TrajectoryPoint {
        t: 0.0,
        phi: wrap_angle(phi),
        z,
        energy: energy_raw(phi, z),
    });
    for i in 1..=steps {
        (phi, z) = rk4_step(phi, z, h);
        let t = i as f64 * h;
        check_step(t, phi, z)?;
        points.push(TrajectoryPoint {
            t,
            phi: wrap_angle(phi),
            z,
            energy: energy_raw(phi, z),
        });
    }
    Ok(Trajectory { points })
}

/// Period of the closed orbit through `s0`, from the first return to the
/// section through `s0` normal to the initial velocity.
pub fn orbit_period(s0: &MeanFieldState, t_max: f64, dt: f64) -> Result<f64> {
    let (v0, w0) = mf_rhs(s0)?;
    let speed = v0.hypot(w0);
    if speed < 1e-12 {
        return Err(Error::InvalidArgument("orbit starts at a fixed point".into()));
    }
    let section = |phi: f64, z: f64| (wrap_angle(phi - s0.phi) * v0 + (z - s0.z) * w0) / speed;
    let (mut phi, mut z) = (s0.phi, s0.z);
    let mut t = 0.0;
    let mut prev = 0.0;
    let mut left = false;
    while t < t_max {
        let (np, nz) = rk4_step(phi, z, dt);
        check_step(t + dt, np, nz)?;
        let cur = section(np, nz);
        let near = wrap_angle(np - s0.phi).hypot(nz - s0.z) < 0.5;
        if !near || cur < 0.0 {
            left = true;
        }
        if left && near && prev < 0.0 && cur >= 0.0 {
            // bisect on the partial step length
            let (mut lo, mut hi) = (0.0, dt);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (mp, mz) = rk4_step(phi, z, mid);
                if section(mp, mz) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(t + 0.5 * (lo + hi));
        }
        prev = cur;
        (phi, z) = (np, nz);
        t += dt;
    }
    Err(Error::NotBracketed("orbit return".into()))
}

/// One arrow of the phase portrait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortraitSample {
    pub phi: f64,
    pub z: f64,
    pub dphi: f64,
    pub dz: f64,
}

/// Flow field on `n_phi` uniform phases in `[-pi, pi)` and `n_z` interior
/// imbalances `z_k = -1 + 2(k+1)/(n_z+1)`.
pub fn phase_portrait(n_phi: usize, n_z: usize) -> Vec<PortraitSample> {
    let mut out = Vec::with_capacity(n_phi * n_z);
    for i in 0..n_phi {
        let phi = -PI + 2.0 * PI * i as f64 / n_phi as f64;
        for k in 0..n_z {
            let z = -1.0 + 2.0 * (k + 1) as f64 / (n_z + 1) as f64;
            let (dphi, dz) = rhs_raw(phi, z);
            out.push(PortraitSample { phi, z, dphi, dz });
        }
    }
    out
}

/// CSV with header `phi,z,dphi,dz`.
pub fn write_portrait_csv<W: Write>(samples: &[PortraitSample], mut w: W) -> io::Result<()> {
    writeln!(w, "phi,z,dphi,dz")?;
    for s in samples {
        writeln!(w, "{:.12e},{:.12e},{:.12e},{:.12e}", s.phi, s.z, s.dphi, s.dz)?;
    }
    Ok(())
}

/// Second-order moment model for the coherent start at the saddle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    epsilon: f64,
    sx0: f64,
}

/// Model values at one time. `valid` is false once `tau >= 1`, outside the
/// short-time regime the closed forms assume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPoint {
    pub chi_t: f64,
    pub tau: f64,
    pub s_x: f64,
    pub xi2: f64,
    pub fq: f64,
    pub valid: bool,
}

impl GaussianModel {
    pub fn new(n: ParticleNumber) -> Self {
        Self::from_epsilon(1.0 / n.as_f64()).expect("1/N lies in (0, 1]")
    }

    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1]",
            });
        }
        Ok(Self {
            epsilon,
            sx0: 0.5 / epsilon.sqrt(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `s_x(0) = 1/(2 sqrt(eps))`.
    pub fn sx0(&self) -> f64 {
        self.sx0
    }

    pub fn tau(&self, chi_t: f64) -> f64 {
        chi_t / self.epsilon.sqrt()
    }

    pub fn chi_t(&self, tau: f64) -> f64 {
        tau * self.epsilon.sqrt()
    }

    /// Exponent `g` with `xi^2 = e^g` and `F_Q = e^{-g}/eps`.
    fn exponent(&self, tau: f64) -> f64 {
        let a = 4.0 * self.sx0 * tau;
        -a + (a.sinh() - tau) / (4.0 * self.sx0 * self.sx0)
    }

    pub fn at_tau(&self, tau: f64) -> GaussianPoint {
        let a = 4.0 * self.sx0 * tau;
        let g = self.exponent(tau);
        GaussianPoint {
            chi_t: self.chi_t(tau),
            tau,
            s_x: self.sx0 - (a.cosh() - 1.0) / (4.0 * self.sx0),
            xi2: g.exp(),
            fq: (-g).exp() / self.epsilon,
            valid: tau < 1.0,
        }
    }

    pub fn at_chi_t(&self, chi_t: f64) -> GaussianPoint {
        self.at_tau(self.tau(chi_t))
    }

    /// `ln(8 s_x(0)^2) / (4 s_x(0))`.
    pub fn best_tau(&self) -> f64 {
        (8.0 * self.sx0 * self.sx0).ln() / (4.0 * self.sx0)
    }

    /// Truncated right-hand sides `(s_x', delta_yy', delta_zz')` in `tau`,
    /// with `delta` the scaled covariance `eps * Cov`.
    pub fn moment_rates(s_x: f64, delta_yy: f64, delta_zz: f64) -> (f64, f64, f64) {
        (
            2.0 * (delta_yy - delta_zz),
            -4.0 * delta_yy * s_x,
            4.0 * delta_zz * s_x,
        )
    }
}

/// Model evaluation at `tau`.
pub fn gaussian_solution(model: &GaussianModel, tau: f64) -> Result<GaussianPoint> {
    if !(tau >= 0.0) {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau,
            range: "[0, inf)",
        });
    }
    Ok(model.at_tau(tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestTimeModel {
    /// `ln(2N)/(2N)` from the Gaussian model.
    SqueezingModel,
    /// `ln(2 pi N)/(2N)`, fitted to the first Fisher-information maximum.
    QfiEmpirical,
}

pub fn best_time_estimate(n: ParticleNumber, which: BestTimeModel) -> Result<f64> {
    let nf = n.as_f64();
    if n.get() < 2 {
        return Err(Error::InvalidArgument("best-time estimates need N >= 2".into()));
    }
    let c = match which {
        BestTimeModel::SqueezingModel => 2.0,
        BestTimeModel::QfiEmpirical => 2.0 * PI,
    };
    Ok((c * nf).ln() / (2.0 * nf))
}

/// `(e/(2N), (2/e) N^2)`.
pub fn gaussian_asymptotics(n: ParticleNumber) -> (f64, f64) {
    let nf = n.as_f64();
    (E / (2.0 * nf), 2.0 / E * nf * nf)
}

/// `omega = sqrt(2) N chi`, in units of `chi`.
pub fn frozen_spin_frequency(n: ParticleNumber) -> f64 {
    2f64.sqrt() * n.as_f64()
}

/// `(xi^2, F_Q) = (1 - sin^2(omega t)/2, N (1 + sin^2(omega t)))`.
pub fn frozen_spin_prediction(n: ParticleNumber, chi_t: f64) -> (f64, f64) {
    let s2 = (frozen_spin_frequency(n) * chi_t).sin().powi(2);
    (1.0 - 0.5 * s2, n.as_f64() * (1.0 + s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pn(n: usize) -> ParticleNumber {
        ParticleNumber::new(n).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let (a, b) = mf_rhs(&MeanFieldState::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        let (a, b) = mf_rhs(&MeanFieldState::new(FRAC_PI_2, FRAC_1_SQRT_2).unwrap()).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        let (a, b) = mf_rhs(&MeanFieldState::new(FRAC_PI_2, 0.1).unwrap()).unwrap();
        assert_abs_diff_eq!(a, -(1.0 - 0.02) / 0.99f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        assert!(matches!(
            mf_rhs(&MeanFieldState::new(0.3, 1.0).unwrap()),
            Err(Error::PhaseUndefined(_))
        ));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(mf_energy(&MeanFieldState::new(0.0, 0.0).unwrap()), 0.0);
        assert_abs_diff_eq!(
            mf_energy(&MeanFieldState::new(FRAC_PI_2, FRAC_1_SQRT_2).unwrap()),
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn state_ranges() {
        assert!(MeanFieldState::new(PI, 0.0).is_err());
        assert!(MeanFieldState::new(0.0, 1.2).is_err());
        assert_abs_diff_eq!(MeanFieldState::wrapped(PI, 0.0).unwrap().phi, -PI);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI + 0.1), -PI + 0.1, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = 1e-6;
        for &(phi, z) in &[(0.3, 0.2), (-2.0, -0.6), (1.1, 0.9)] {
            let j = jacobian(&MeanFieldState { phi, z }).unwrap();
            let (fp, gp) = rhs_raw(phi + h, z);
            let (fm, gm) = rhs_raw(phi - h, z);
            let (fzp, gzp) = rhs_raw(phi, z + h);
            let (fzm, gzm) = rhs_raw(phi, z - h);
            let fd = [
                [(fp - fm) / (2.0 * h), (fzp - fzm) / (2.0 * h)],
                [(gp - gm) / (2.0 * h), (gzp - gzm) / (2.0 * h)],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    assert_abs_diff_eq!(j[r][c], fd[r][c], epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn fixed_point_structure() {
        let fps = find_fixed_points().unwrap();
        assert_eq!(fps.len(), 6);
        let saddles: Vec<_> = fps.iter().filter(|f| f.kind == FixedPointKind::Saddle).collect();
        assert_eq!(saddles.len(), 2);
        for s in &saddles {
            assert_abs_diff_eq!(s.location.z, 0.0);
            let mut l: Vec<f64> = s.eigenvalues.iter().map(|c| c.re).collect();
            l.sort_by(f64::total_cmp);
            assert_abs_diff_eq!(l[0], -1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(l[1], 1.0, epsilon = 1e-12);
            let [a, b] = s.eigenvectors;
            assert_abs_diff_eq!(a[0] * b[0] + a[1] * b[1], 0.0, epsilon = 1e-12);
        }
        for c in fps.iter().filter(|f| f.kind == FixedPointKind::Center) {
            assert_abs_diff_eq!(c.location.z.abs(), FRAC_1_SQRT_2, epsilon = 1e-15);
            assert_abs_diff_eq!(c.eigenvalues[0].im, 2f64.sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(c.eigenvalues[0].re, 0.0, epsilon = 1e-15);
            assert!(fixed_point_residual(&c.location).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rk4_conserves_energy() {
        let s0 = MeanFieldState::new(1.2, 0.4).unwrap();
        let tr = integrate_trajectory(&s0, 10.0, 1e-3).unwrap();
        assert!(tr.max_energy_drift() < 1e-8);
        let fixed = integrate_trajectory(&MeanFieldState::new(FRAC_PI_2, FRAC_1_SQRT_2).unwrap(), 5.0, 1e-2).unwrap();
        let last = fixed.points.last().unwrap();
        assert_abs_diff_eq!(last.phi, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(last.z, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn small_orbit_period_matches_eigenfrequency() {
        let s0 = MeanFieldState::new(FRAC_PI_2 + 1e-3, FRAC_1_SQRT_2).unwrap();
        let period = orbit_period(&s0, 20.0, 1e-3).unwrap();
        assert_abs_diff_eq!(period, 2.0 * PI / 2f64.sqrt(), epsilon = 1e-5);
    }

    #[test]
    fn orbit_closes_after_one_period() {
        let s0 = MeanFieldState::new(1.2, 0.5).unwrap();
        let period = orbit_period(&s0, 50.0, 1e-3).unwrap();
        let steps = (period / 1e-3).ceil();
        let tr = integrate_trajectory(&s0, period, period / steps).unwrap();
        let end = tr.points.last().unwrap();
        assert!(MeanFieldState { phi: end.phi, z: end.z }.distance(&s0) < 1e-6);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(integrate_trajectory(&MeanFieldState::new(0.0, 1.0).unwrap(), 1.0, 0.1).is_err());
    }

    #[test]
    fn gaussian_initial_values_and_reciprocity() {
        let m = GaussianModel::new(pn(1000));
        let p0 = m.at_tau(0.0);
        assert_abs_diff_eq!(p0.s_x, 0.5 * 1000f64.sqrt(), epsilon = 1e-12);
        assert_eq!(p0.xi2, 1.0);
        assert_abs_diff_eq!(p0.fq, 1000.0, epsilon = 1e-9);
        for tau in [0.01, 0.05, 0.1, 0.2] {
            let p = m.at_tau(tau);
            assert_abs_diff_eq!(p.xi2 * p.fq * m.epsilon(), 1.0, epsilon = 1e-12);
        }
        assert!(!m.at_tau(1.5).valid);
        assert!(gaussian_solution(&m, -1.0).is_err());
    }

    #[test]
    fn gaussian_best_time() {
        let m = GaussianModel::new(pn(1000));
        let best = m.best_tau();
        // numeric argmin of the closed form
        let argmin = (1..20000)
            .map(|i| i as f64 * 1e-5)
            .min_by(|a, b| m.at_tau(*a).xi2.total_cmp(&m.at_tau(*b).xi2))
            .unwrap();
        assert!((argmin - best).abs() / best < 0.05);
        assert_abs_diff_eq!(m.chi_t(best), (2000f64).ln() / 2000.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_estimates() {
        let n = pn(50);
        assert_abs_diff_eq!(
            best_time_estimate(n, BestTimeModel::SqueezingModel).unwrap(),
            100f64.ln() / 100.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            best_time_estimate(n, BestTimeModel::QfiEmpirical).unwrap(),
            (100.0 * PI).ln() / 100.0,
            epsilon = 1e-15
        );
        let mut last = f64::INFINITY;
        for nn in 2..200 {
            let t = best_time_estimate(pn(nn), BestTimeModel::SqueezingModel).unwrap();
            assert!(t < last);
            last = t;
        }
        assert!(best_time_estimate(pn(1), BestTimeModel::QfiEmpirical).is_err());
        let (xi, fq) = gaussian_asymptotics(pn(100));
        assert_abs_diff_eq!(xi, 0.013591409142295225, epsilon = 1e-15);
        assert_abs_diff_eq!(fq, 7357.588823428847, epsilon = 1e-9);
        assert_abs_diff_eq!(xi * fq, 100.0, epsilon = 1e-10);
    }

    #[test]
    fn frozen_spin_values() {
        let n = pn(40);
        assert_eq!(frozen_spin_prediction(n, 0.0), (1.0, 40.0));
        let quarter = FRAC_PI_2 / frozen_spin_frequency(n);
        let (xi, fq) = frozen_spin_prediction(n, quarter);
        assert_abs_diff_eq!(xi, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(fq, 80.0, epsilon = 1e-12);
        let period = PI / (2f64.sqrt() * 40.0);
        let a = frozen_spin_prediction(n, 0.0123);
        let b = frozen_spin_prediction(n, 0.0123 + period);
        assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-12);
    }

    #[test]
    fn center_frequency_matches_frozen_spin() {
        let n = pn(64);
        let c = find_fixed_points()
            .unwrap()
            .into_iter()
            .find(|f| f.kind == FixedPointKind::Center)
            .unwrap();
        assert_abs_diff_eq!(c.eigenvalues[0].im * n.as_f64(), frozen_spin_frequency(n), epsilon = 1e-10);
    }

    #[test]
    fn portrait_layout() {
        let p = phase_portrait(8, 5);
        assert_eq!(p.len(), 40);
        assert!(p.iter().all(|s| s.z.abs() < 1.0));
        let mut buf = Vec::new();
        write_portrait_csv(&p, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("phi,z,dphi,dz\n"));
    }
}
