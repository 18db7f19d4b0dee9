//! Spin moments, the squeezing parameter, pure-state quantum Fisher
//! information, reference metrological states and fidelities.

mod fidelity;
mod reference;
mod sweep;

pub use fidelity::{
    fidelity, fidelity_time_step, optimize_yurke_alpha, yurke_alpha_scan, FidelityProbe,
    PreRotation, YurkeOptimum,
};
pub use reference::{qfi_analytic, reference_state, ReferenceKind, ReferenceState};
pub use sweep::{observable_sweep, ObservableRow, OBSERVABLE_COLUMNS};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::spin::{ParticleNumber, SpinAxis, SpinMatrices, StateVector};

/// Mean spin vector and symmetrized covariance
/// `cov_ij = <S_i S_j + S_j S_i>/2 - <S_i><S_j>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    pub mean: Vector3<f64>,
    pub cov: Matrix3<f64>,
}

impl SpinMoments {
    pub fn variance(&self, axis: SpinAxis) -> f64 {
        let i = axis_index(axis);
        self.cov[(i, i)]
    }

    pub fn mean_component(&self, axis: SpinAxis) -> f64 {
        self.mean[axis_index(axis)]
    }

    /// Variance of `n.S` along an arbitrary unit direction.
    pub fn variance_along(&self, dir: &Vector3<f64>) -> f64 {
        (dir.transpose() * self.cov * dir)[(0, 0)]
    }
}

fn axis_index(axis: SpinAxis) -> usize {
    match axis {
        SpinAxis::X => 0,
        SpinAxis::Y => 1,
        SpinAxis::Z => 2,
    }
}

pub fn spin_moments(psi: &StateVector, s: &SpinMatrices) -> Result<SpinMoments> {
    s.check_state(psi)?;
    let amps = psi.amplitudes();
    let applied: Vec<_> = SpinAxis::ALL.iter().map(|&a| s.apply(a, amps)).collect();
    let mean = Vector3::from_fn(|i, _| amps.dotc(&applied[i]).re);
    // <S_i S_j> = <S_i psi | S_j psi>; its real part is the symmetrized moment
    let cov = Matrix3::from_fn(|i, j| applied[i].dotc(&applied[j]).re - mean[i] * mean[j]);
    Ok(SpinMoments {
        mean,
        cov: (cov + cov.transpose()) * 0.5,
    })
}

/// Orthonormal pair spanning the plane normal to `mean`:
/// `e1 = z x mean` (or `x` when `mean` is along `z`), `e2 = mean x e1`.
pub fn perpendicular_basis(mean: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let unit = mean.normalize();
    let cross = Vector3::z().cross(&unit);
    let e1 = if cross.norm() < 1e-8 {
        Vector3::x()
    } else {
        cross.normalize()
    };
    let e2 = unit.cross(&e1).normalize();
    (e1, e2)
}

/// Smallest variance normal to the mean spin and the direction achieving it.
pub fn min_perpendicular_variance(
    m: &SpinMoments,
    n: ParticleNumber,
) -> Result<(f64, Vector3<f64>)> {
    let len = m.mean.norm();
    if len <= 1e-8 * n.as_f64() {
        return Err(Error::VanishingMeanSpin);
    }
    let (e1, e2) = perpendicular_basis(&m.mean);
    let v11 = m.variance_along(&e1);
    let v22 = m.variance_along(&e2);
    let v12 = (e1.transpose() * m.cov * e2)[(0, 0)];
    let var_min = 0.5 * (v11 + v22 - ((v11 - v22).powi(2) + 4.0 * v12 * v12).sqrt());
    // minor axis of the 2x2 block
    let angle = 0.5 * (2.0 * v12).atan2(v11 - v22) + std::f64::consts::FRAC_PI_2;
    let dir = e1 * angle.cos() + e2 * angle.sin();
    Ok((var_min, dir))
}

/// `xi^2 = N Var_min(S_perp) / |<S>|^2`.
pub fn squeezing_parameter(m: &SpinMoments, n: ParticleNumber) -> Result<f64> {
    let (var_min, _) = min_perpendicular_variance(m, n)?;
    Ok(n.as_f64() * var_min / m.mean.norm_squared())
}

/// Kitagawa-Ueda form `4 Var_min(S_perp) / N`, which ignores the shortening
/// of the mean spin.
pub fn kitagawa_ueda_parameter(m: &SpinMoments, n: ParticleNumber) -> Result<f64> {
    let (var_min, _) = min_perpendicular_variance(m, n)?;
    Ok(4.0 * var_min / n.as_f64())
}

/// `F_Q = 4 lambda_max(cov)` for a pure state.
pub fn qfi_pure(m: &SpinMoments) -> f64 {
    qfi_direction(m).0
}

/// Fisher information and an optimal rotation axis.
pub fn qfi_direction(m: &SpinMoments) -> (f64, Vector3<f64>) {
    let eig = SymmetricEigen::new(m.cov);
    let j = eig.eigenvalues.imax();
    (
        4.0 * eig.eigenvalues[j],
        eig.eigenvectors.column(j).into_owned(),
    )
}

/// `P_k = |c_k|^2`.
pub fn fock_probabilities(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|c| c.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_spin_matrices, coherent_state, fock_state};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn pn(n: usize) -> ParticleNumber {
        ParticleNumber::new(n).unwrap()
    }

    #[test]
    fn coherent_moments() {
        for nn in [2usize, 9, 50] {
            let n = pn(nn);
            let s = build_spin_matrices(n);
            let psi = coherent_state(PI / 2.0, 0.0, n).unwrap();
            let m = spin_moments(&psi, &s).unwrap();
            let half = nn as f64 / 2.0;
            assert_abs_diff_eq!(m.mean[0], half, epsilon = 1e-10);
            assert_abs_diff_eq!(m.mean[1], 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(m.variance(SpinAxis::Y), nn as f64 / 4.0, epsilon = 1e-10);
            assert_abs_diff_eq!(m.variance(SpinAxis::Z), nn as f64 / 4.0, epsilon = 1e-10);
            assert_abs_diff_eq!(squeezing_parameter(&m, n).unwrap(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(qfi_pure(&m), nn as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn kitagawa_ueda_rescales_wineland() {
        let n = pn(20);
        let s = build_spin_matrices(n);
        let mut amps = coherent_state(PI / 2.0, 0.0, n).unwrap().into_amplitudes();
        amps[3] += Complex64::new(0.2, 0.1);
        let psi = StateVector::normalized(n, amps).unwrap();
        let m = spin_moments(&psi, &s).unwrap();
        let wineland = squeezing_parameter(&m, n).unwrap();
        let ku = kitagawa_ueda_parameter(&m, n).unwrap();
        assert_abs_diff_eq!(ku, wineland * m.mean.norm_squared() / 100.0, epsilon = 1e-12);
        let coherent = spin_moments(&coherent_state(1.0, 2.0, n).unwrap(), &s).unwrap();
        assert_abs_diff_eq!(kitagawa_ueda_parameter(&coherent, n).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn twin_fock_moments() {
        let n = pn(10);
        let s = build_spin_matrices(n);
        let tf = fock_state(5, n).unwrap();
        let m = spin_moments(&tf, &s).unwrap();
        assert!(m.mean.norm() < 1e-12);
        assert_abs_diff_eq!(m.variance(SpinAxis::Z), 0.0, epsilon = 1e-12);
        assert_eq!(squeezing_parameter(&m, n), Err(Error::VanishingMeanSpin));
    }

    #[test]
    fn ewss_variance_n4() {
        // (1/5) * sum_k (k-2)^2 = 2
        let n = pn(4);
        let s = build_spin_matrices(n);
        let ewss = reference_state(ReferenceKind::Ewss, n).unwrap();
        let m = spin_moments(&ewss.vector, &s).unwrap();
        let oracle: f64 = (0..=4).map(|k| ((k as f64) - 2.0).powi(2)).sum::<f64>() / 5.0;
        assert_abs_diff_eq!(m.variance(SpinAxis::Z), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn perpendicular_basis_along_z() {
        let (e1, e2) = perpendicular_basis(&Vector3::new(0.0, 0.0, 3.0));
        assert_eq!(e1, Vector3::x());
        assert_abs_diff_eq!(e2.dot(&Vector3::y()).abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pole_coherent_state_squeezing() {
        let n = pn(6);
        let s = build_spin_matrices(n);
        let psi = coherent_state(0.0, 0.0, n).unwrap();
        let m = spin_moments(&psi, &s).unwrap();
        assert_abs_diff_eq!(squeezing_parameter(&m, n).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fock_probability_examples() {
        let n = pn(4);
        assert_eq!(
            fock_probabilities(&fock_state(2, n).unwrap()),
            vec![0.0, 0.0, 1.0, 0.0, 0.0]
        );
        let nn = 12;
        let psi = coherent_state(PI / 2.0, 0.0, pn(nn)).unwrap();
        let p = fock_probabilities(&psi);
        let mut binom = 1.0f64;
        for (k, pk) in p.iter().enumerate() {
            assert_abs_diff_eq!(*pk, binom / 2f64.powi(nn as i32), epsilon = 1e-14);
            binom = binom * (nn - k) as f64 / (k + 1) as f64;
        }
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
