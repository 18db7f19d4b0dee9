use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::reference::{reference_state, ReferenceKind, ReferenceState};
use crate::error::{Error, Result};
use crate::search::golden_max;
use crate::spin::{rotation_operator, BlochDirection, ParticleNumber, SpinMatrices, StateVector};

const ALPHA_GRID: usize = 91;
const ALPHA_TOL: f64 = 1e-5;

/// Unitary applied to the evolved state before projecting on a reference.
#[derive(Debug, Clone)]
pub enum PreRotation {
    /// `exp(-i (pi/2) Sx)` for twin-Fock and Yurke references, identity otherwise.
    KindDefault,
    Identity,
    Unitary(DMatrix<Complex64>),
}

fn default_rotation(s: &SpinMatrices) -> DMatrix<Complex64> {
    rotation_operator(s, &BlochDirection::X, FRAC_PI_2)
}

/// `|<ref| U psi>|^2`.
pub fn fidelity(psi: &StateVector, reference: &ReferenceState, pre: &PreRotation) -> Result<f64> {
    psi.check_same_n(&reference.vector)?;
    let rotated = match pre {
        PreRotation::Identity => psi.clone(),
        PreRotation::KindDefault if !reference.kind.requires_even() => psi.clone(),
        PreRotation::KindDefault => {
            psi.transformed(&default_rotation(&SpinMatrices::new(psi.particle_number())))?
        }
        PreRotation::Unitary(u) => psi.transformed(u)?,
    };
    reference.vector.overlap_sqr(&rotated)
}

/// Grid step used for fidelity-maximum searches: `(1/50) ln(2N)/(2N)`.
pub fn fidelity_time_step(n: ParticleNumber) -> f64 {
    let nf = n.as_f64();
    (2.0 * nf).ln() / (2.0 * nf) / 50.0
}

/// All reference states for one `N` plus the cached pre-rotation, so a
/// trajectory can be scored without rebuilding anything per sample.
#[derive(Debug, Clone)]
pub struct FidelityProbe {
    n: ParticleNumber,
    rotation: DMatrix<Complex64>,
    bw: ReferenceState,
    ewss: ReferenceState,
    noon: ReferenceState,
    twin_fock: Option<ReferenceState>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YurkeOptimum {
    pub alpha: f64,
    pub t: f64,
    pub fidelity: f64,
}

impl FidelityProbe {
    pub fn new(s: &SpinMatrices) -> Result<Self> {
        let n = s.particle_number();
        Ok(Self {
            n,
            rotation: default_rotation(s),
            bw: reference_state(ReferenceKind::BerryWiseman, n)?,
            ewss: reference_state(ReferenceKind::Ewss, n)?,
            noon: reference_state(ReferenceKind::Noon, n)?,
            twin_fock: if n.is_even() {
                Some(reference_state(ReferenceKind::TwinFock, n)?)
            } else {
                None
            },
        })
    }

    pub fn particle_number(&self) -> ParticleNumber {
        self.n
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.particle_number() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.dim(),
                got: psi.dim(),
            });
        }
        Ok(())
    }

    fn rotated(&self, psi: &StateVector) -> DVector<Complex64> {
        &self.rotation * psi.amplitudes()
    }

    /// Fidelity to `kind` with the default pre-rotation.
    pub fn fidelity(&self, kind: ReferenceKind, psi: &StateVector) -> Result<f64> {
        self.check(psi)?;
        let plain = |r: &ReferenceState| r.vector.amplitudes().dotc(psi.amplitudes()).norm_sqr();
        match kind {
            ReferenceKind::BerryWiseman => Ok(plain(&self.bw)),
            ReferenceKind::Ewss => Ok(plain(&self.ewss)),
            ReferenceKind::Noon => Ok(plain(&self.noon)),
            ReferenceKind::TwinFock => match &self.twin_fock {
                Some(tf) => Ok(tf.vector.amplitudes().dotc(&self.rotated(psi)).norm_sqr()),
                None => Err(Error::OddParticleNumber {
                    what: "TF",
                    n: self.n.get(),
                }),
            },
            ReferenceKind::Yurke { alpha } => {
                let (a, b) = self.yurke_components(psi)?;
                Ok(yurke_value(a, b, alpha))
            }
        }
    }

    /// `(a, b)` such that the Yurke fidelity is `|a cos(alpha) + b sin(alpha)|^2`.
    pub fn yurke_components(&self, psi: &StateVector) -> Result<(Complex64, Complex64)> {
        self.check(psi)?;
        self.n.require_even("Y")?;
        let phi = self.rotated(psi);
        let h = self.n.get() / 2;
        let a = phi[h];
        let b = (phi[h + 1] + phi[h - 1]) / 2f64.sqrt();
        Ok((a, b))
    }

    /// Best Yurke mixing angle in `[0, pi/2]` for a single state.
    pub fn best_yurke(&self, psi: &StateVector) -> Result<(f64, f64)> {
        let (a, b) = self.yurke_components(psi)?;
        Ok(yurke_alpha_scan(a, b))
    }
}

fn yurke_value(a: Complex64, b: Complex64, alpha: f64) -> f64 {
    (a * alpha.cos() + b * alpha.sin()).norm_sqr()
}

/// Grid scan over `alpha in [0, pi/2]` followed by golden-section refinement.
/// Returns `(alpha, fidelity)`.
pub fn yurke_alpha_scan(a: Complex64, b: Complex64) -> (f64, f64) {
    let step = FRAC_PI_2 / (ALPHA_GRID - 1) as f64;
    let (best, _) = (0..ALPHA_GRID)
        .map(|i| (i, yurke_value(a, b, i as f64 * step)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    let lo = (best as f64 - 1.0).max(0.0) * step;
    let hi = ((best + 1) as f64 * step).min(FRAC_PI_2);
    let e = golden_max(|al| yurke_value(a, b, al), lo, hi, ALPHA_TOL);
    (e.t, e.value)
}

/// Joint maximization over sampled times and the Yurke angle.
pub fn optimize_yurke_alpha(
    probe: &FidelityProbe,
    samples: &[(f64, StateVector)],
) -> Result<YurkeOptimum> {
    probe.n.require_even("Y")?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let mut best = YurkeOptimum {
        alpha: 0.0,
        t: samples[0].0,
        fidelity: f64::NEG_INFINITY,
    };
    for (t, psi) in samples {
        let (alpha, f) = probe.best_yurke(psi)?;
        if f > best.fidelity {
            best = YurkeOptimum {
                alpha,
                t: *t,
                fidelity: f,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_spin_matrices, coherent_state, rotate_state};
    use approx::assert_abs_diff_eq;

    fn pn(n: usize) -> ParticleNumber {
        ParticleNumber::new(n).unwrap()
    }

    #[test]
    fn self_fidelity_is_one() {
        let n = pn(6);
        for kind in [
            ReferenceKind::BerryWiseman,
            ReferenceKind::Ewss,
            ReferenceKind::Noon,
        ] {
            let r = reference_state(kind, n).unwrap();
            assert_abs_diff_eq!(
                fidelity(&r.vector, &r, &PreRotation::KindDefault).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        let tf = reference_state(ReferenceKind::TwinFock, n).unwrap();
        assert_abs_diff_eq!(
            fidelity(&tf.vector, &tf, &PreRotation::Identity).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn probe_matches_free_function() {
        let n = pn(10);
        let s = build_spin_matrices(n);
        let probe = FidelityProbe::new(&s).unwrap();
        let psi = coherent_state(1.1, 0.4, n).unwrap();
        for kind in [
            ReferenceKind::BerryWiseman,
            ReferenceKind::Ewss,
            ReferenceKind::TwinFock,
            ReferenceKind::Noon,
            ReferenceKind::Yurke { alpha: 0.4 },
        ] {
            let r = reference_state(kind, n).unwrap();
            assert_abs_diff_eq!(
                probe.fidelity(kind, &psi).unwrap(),
                fidelity(&psi, &r, &PreRotation::KindDefault).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn yurke_scan_matches_closed_form() {
        // max over real alpha of |a cos + b sin|^2 is the top eigenvalue of the
        // 2x2 Gram matrix [[|a|^2, Re(a b*)], [Re(a b*), |b|^2]]
        let cases = [
            (Complex64::new(0.3, 0.1), Complex64::new(0.6, -0.2)),
            (Complex64::new(0.8, 0.0), Complex64::new(0.1, 0.05)),
            (Complex64::new(0.2, 0.4), Complex64::new(0.5, 0.3)),
        ];
        for (a, b) in cases {
            let (alpha, f) = yurke_alpha_scan(a, b);
            let p = a.norm_sqr();
            let q = b.norm_sqr();
            let r = (a * b.conj()).re;
            let top = 0.5 * (p + q + ((p - q).powi(2) + 4.0 * r * r).sqrt());
            let opt = 0.5 * (2.0 * r).atan2(p - q);
            if (0.0..=FRAC_PI_2).contains(&opt) {
                assert_abs_diff_eq!(f, top, epsilon = 1e-9);
                assert!((alpha - opt).abs() <= 1e-4);
            } else {
                assert!(f <= top + 1e-12);
            }
        }
    }

    #[test]
    fn yurke_of_twin_fock_trajectory() {
        let n = pn(12);
        let s = build_spin_matrices(n);
        let probe = FidelityProbe::new(&s).unwrap();
        // a state that the default rotation maps onto the twin-Fock state
        let tf = reference_state(ReferenceKind::TwinFock, n).unwrap();
        let pre = rotate_state(&tf.vector, &BlochDirection::X, -FRAC_PI_2).unwrap();
        let best = optimize_yurke_alpha(&probe, &[(0.0, pre)]).unwrap();
        assert!(best.alpha.abs() < 1e-4);
        assert_abs_diff_eq!(best.fidelity, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn odd_n_rejected_for_yurke() {
        let n = pn(5);
        let s = build_spin_matrices(n);
        let probe = FidelityProbe::new(&s).unwrap();
        let psi = coherent_state(1.0, 0.0, n).unwrap();
        assert!(optimize_yurke_alpha(&probe, &[(0.0, psi.clone())]).is_err());
        assert!(probe.fidelity(ReferenceKind::TwinFock, &psi).is_err());
    }
}
