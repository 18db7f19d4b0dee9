use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spin::{ParticleNumber, StateVector};

/// Reference states with Heisenberg-like Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceKind {
    BerryWiseman,
    /// Equally weighted superposition of all Fock states.
    Ewss,
    /// `sin(a)/sqrt2 |N/2+1> + cos(a) |N/2> + sin(a)/sqrt2 |N/2-1>`.
    Yurke {
        alpha: f64,
    },
    TwinFock,
    /// `(|N,0> + |0,N>)/sqrt2`.
    Noon,
}

impl ReferenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            ReferenceKind::BerryWiseman => "BW",
            ReferenceKind::Ewss => "EWSS",
            ReferenceKind::Yurke { .. } => "Y",
            ReferenceKind::TwinFock => "TF",
            ReferenceKind::Noon => "NOON",
        }
    }

    pub fn requires_even(&self) -> bool {
        matches!(self, ReferenceKind::Yurke { .. } | ReferenceKind::TwinFock)
    }

    fn check(&self, n: ParticleNumber) -> Result<()> {
        if self.requires_even() {
            n.require_even(self.label())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub kind: ReferenceKind,
    pub n: ParticleNumber,
    pub vector: StateVector,
}

fn bw_amplitude(k: usize, nn: usize) -> f64 {
    let nf = nn as f64;
    ((k as f64 - nf / 2.0) * PI / (nf + 2.0)).cos()
}

pub fn reference_state(kind: ReferenceKind, n: ParticleNumber) -> Result<ReferenceState> {
    kind.check(n)?;
    let nn = n.get();
    let dim = n.dim();
    let real = |f: &dyn Fn(usize) -> f64| DVector::from_fn(dim, |k, _| Complex64::from(f(k)));
    let amps = match kind {
        ReferenceKind::BerryWiseman => {
            let norm = 1.0 / (1.0 + nn as f64 / 2.0).sqrt();
            real(&|k| norm * bw_amplitude(k, nn))
        }
        ReferenceKind::Ewss => {
            let c = 1.0 / (dim as f64).sqrt();
            real(&|_| c)
        }
        ReferenceKind::Yurke { alpha } => {
            let half = nn / 2;
            let side = alpha.sin() / 2f64.sqrt();
            real(&|k| {
                if k == half {
                    alpha.cos()
                } else if k + 1 == half || k == half + 1 {
                    side
                } else {
                    0.0
                }
            })
        }
        ReferenceKind::TwinFock => real(&|k| if k == nn / 2 { 1.0 } else { 0.0 }),
        ReferenceKind::Noon => {
            let c = 1.0 / 2f64.sqrt();
            real(&|k| if k == 0 || k == nn { c } else { 0.0 })
        }
    };
    let vector = StateVector::normalized(n, amps)?;
    Ok(ReferenceState { kind, n, vector })
}

/// Closed-form Fisher information of each reference state.
pub fn qfi_analytic(kind: ReferenceKind, n: ParticleNumber) -> Result<f64> {
    kind.check(n)?;
    let nn = n.get();
    let nf = nn as f64;
    Ok(match kind {
        ReferenceKind::BerryWiseman => {
            let sum: f64 = (0..=nn)
                .map(|k| bw_amplitude(k, nn).powi(2) * (2.0 * k as f64 - nf).powi(2))
                .sum();
            2.0 / (2.0 + nf) * sum
        }
        ReferenceKind::Ewss => nf * nf / 3.0 * (1.0 + 2.0 / nf),
        ReferenceKind::Yurke { alpha } => {
            let s2 = alpha.sin().powi(2);
            nf / 2.0 * (nf / 2.0 + 1.0) * (2.0 - s2) - 2.0 * s2
        }
        ReferenceKind::TwinFock => nf * nf / 2.0 * (1.0 + 2.0 / nf),
        ReferenceKind::Noon => nf * nf,
    })
}
