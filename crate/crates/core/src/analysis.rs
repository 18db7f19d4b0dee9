//! Time-domain analysis of one evolution: extremum location for the
//! squeezing parameter, Fisher information and fidelities, and the labelled
//! events used for the phase-space snapshots.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{HamiltonianKind, HamiltonianSpec, Propagator};
use crate::error::{Error, Result};
use crate::metrology::{
    kitagawa_ueda_parameter, observable_sweep, qfi_pure, spin_moments, squeezing_parameter, FidelityProbe, ObservableRow,
    ReferenceKind, SpinMoments,
};
use crate::search::{local_maxima, local_minima, refine_grid_max, refine_grid_min, uniform_grid, Extremum};
use crate::spin::{build_spin_matrices, coherent_state, ParticleNumber, SpinMatrices, StateVector};

/// Bracket width at which time refinement stops.
pub const TIME_TOLERANCE: f64 = 1e-9;

/// `3 ln(2 pi N) / (2N)`: long enough to contain every labelled event of the
/// saddle-point start.
pub fn default_t_max(n: ParticleNumber) -> f64 {
    let nf = n.as_f64();
    3.0 * (2.0 * PI * nf).ln() / (2.0 * nf)
}

pub const DEFAULT_SAMPLES: usize = 1000;

/// A Hamiltonian diagonalized once plus an initial state.
#[derive(Debug, Clone)]
pub struct Evolution {
    s: SpinMatrices,
    prop: Propagator,
    psi0: StateVector,
    coords: DVector<Complex64>,
}

impl Evolution {
    pub fn new(kind: HamiltonianKind, psi0: StateVector) -> Result<Self> {
        let n = psi0.particle_number();
        let s = build_spin_matrices(n);
        let prop = Propagator::from_spec(&HamiltonianSpec::unit(kind, n), &s)?;
        let coords = prop.project(&psi0)?;
        Ok(Self {
            s,
            prop,
            psi0,
            coords,
        })
    }

    /// Starts from the coherent state `|theta, phi>`.
    pub fn from_angles(kind: HamiltonianKind, n: ParticleNumber, theta: f64, phi: f64) -> Result<Self> {
        Self::new(kind, coherent_state(theta, phi, n)?)
    }

    pub fn particle_number(&self) -> ParticleNumber {
        self.psi0.particle_number()
    }

    pub fn spin_matrices(&self) -> &SpinMatrices {
        &self.s
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.psi0
    }

    pub fn state(&self, chi_t: f64) -> StateVector {
        if chi_t == 0.0 {
            return self.psi0.clone();
        }
        self.prop.evolve_projected(&self.coords, chi_t)
    }

    pub fn moments(&self, chi_t: f64) -> SpinMoments {
        spin_moments(&self.state(chi_t), &self.s).expect("state built from the same N")
    }

    pub fn qfi(&self, chi_t: f64) -> f64 {
        qfi_pure(&self.moments(chi_t))
    }

    /// NaN when the mean spin vanishes.
    pub fn squeezing(&self, chi_t: f64) -> f64 {
        squeezing_parameter(&self.moments(chi_t), self.particle_number()).unwrap_or(f64::NAN)
    }

    pub fn kitagawa_ueda(&self, chi_t: f64) -> f64 {
        kitagawa_ueda_parameter(&self.moments(chi_t), self.particle_number()).unwrap_or(f64::NAN)
    }

    pub fn sweep(&self, times: &[f64], yurke_alpha: Option<f64>) -> Result<Vec<ObservableRow>> {
        observable_sweep(&self.prop, &self.psi0, &self.s, times, yurke_alpha)
    }

    /// First interior local maximum of `F_Q` on a uniform grid, refined.
    pub fn first_qfi_maximum(&self, t_max: f64, samples: usize) -> Result<Extremum> {
        first_extremum(|t| self.qfi(t), t_max, samples, Kind::Max, "first F_Q maximum")
    }

    /// First interior local minimum of `xi^2`, refined.
    pub fn best_squeezing(&self, t_max: f64, samples: usize) -> Result<Extremum> {
        first_extremum(|t| self.squeezing(t), t_max, samples, Kind::Min, "best squeezing")
    }

    /// First interior local minimum of the Kitagawa-Ueda parameter, refined.
    pub fn best_kitagawa_ueda(&self, t_max: f64, samples: usize) -> Result<Extremum> {
        first_extremum(|t| self.kitagawa_ueda(t), t_max, samples, Kind::Min, "best KU squeezing")
    }

    /// All refined interior local maxima of `F_Q`.
    pub fn qfi_maxima(&self, t_max: f64, samples: usize) -> Vec<Extremum> {
        all_extrema(|t| self.qfi(t), t_max, samples, Kind::Max)
    }

    pub fn qfi_minima(&self, t_max: f64, samples: usize) -> Vec<Extremum> {
        all_extrema(|t| self.qfi(t), t_max, samples, Kind::Min)
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Max,
    Min,
}

fn refine(f: &(impl Fn(f64) -> f64 + Sync), grid: &[f64], values: &[f64], i: usize, kind: Kind) -> Extremum {
    match kind {
        Kind::Max => refine_grid_max(f, grid, values, i, TIME_TOLERANCE),
        Kind::Min => refine_grid_min(f, grid, values, i, TIME_TOLERANCE),
    }
}

fn sample(f: &(impl Fn(f64) -> f64 + Sync), t_max: f64, samples: usize) -> (Vec<f64>, Vec<f64>) {
    use rayon::prelude::*;
    let grid = uniform_grid(t_max, samples);
    let values = grid.par_iter().map(|&t| f(t)).collect();
    (grid, values)
}

fn all_extrema(f: impl Fn(f64) -> f64 + Sync, t_max: f64, samples: usize, kind: Kind) -> Vec<Extremum> {
    let (grid, values) = sample(&f, t_max, samples);
    let idx = match kind {
        Kind::Max => local_maxima(&values),
        Kind::Min => local_minima(&values),
    };
    idx.into_iter().map(|i| refine(&f, &grid, &values, i, kind)).collect()
}

fn first_extremum(
    f: impl Fn(f64) -> f64 + Sync,
    t_max: f64,
    samples: usize,
    kind: Kind,
    what: &str,
) -> Result<Extremum> {
    if !(t_max > 0.0) || samples < 3 {
        return Err(Error::InvalidArgument("need t_max > 0 and at least 3 samples".into()));
    }
    let (grid, values) = sample(&f, t_max, samples);
    let idx = match kind {
        Kind::Max => local_maxima(&values),
        Kind::Min => local_minima(&values),
    };
    match idx.first() {
        Some(&i) => Ok(refine(&f, &grid, &values, i, kind)),
        None => Err(Error::NotBracketed(what.into())),
    }
}

/// Largest value on the grid (endpoints included), refined when interior.
fn global_max(f: impl Fn(f64) -> f64 + Sync, grid: &[f64], values: &[f64]) -> Option<Extremum> {
    let i = crate::search::argmax(values)?;
    if i == 0 || i + 1 == grid.len() {
        return Some(Extremum {
            t: grid[i],
            value: values[i],
            residual: 0.0,
        });
    }
    Some(refine_grid_max(f, grid, values, i, TIME_TOLERANCE))
}

/// Largest fidelity to `kind` over `[0, t_max]`. For the Yurke reference the
/// mixing angle is optimized at every time and returned alongside.
pub fn fidelity_maximum(
    ev: &Evolution,
    kind: ReferenceKind,
    t_max: f64,
    step: f64,
) -> Result<(Extremum, Option<f64>)> {
    let probe = FidelityProbe::new(ev.spin_matrices())?;
    let n = ev.particle_number();
    if kind.requires_even() {
        n.require_even(kind.label())?;
    }
    let grid = crate::search::stepped_grid(t_max, step);
    let score = |t: f64| -> f64 {
        let psi = ev.state(t);
        match kind {
            ReferenceKind::Yurke { .. } => probe.best_yurke(&psi).map(|p| p.1),
            other => probe.fidelity(other, &psi),
        }
        .unwrap_or(f64::NAN)
    };
    let (grid, values) = {
        use rayon::prelude::*;
        let v: Vec<f64> = grid.par_iter().map(|&t| score(t)).collect();
        (grid, v)
    };
    let e = global_max(score, &grid, &values)
        .ok_or_else(|| Error::NotBracketed(format!("{} fidelity maximum", kind.label())))?;
    let alpha = match kind {
        ReferenceKind::Yurke { .. } => Some(probe.best_yurke(&ev.state(e.t))?.0),
        _ => None,
    };
    Ok((e, alpha))
}

/// One labelled time of the saddle-point run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub label: char,
    pub description: &'static str,
    pub chi_t: f64,
    pub value: f64,
    pub residual: f64,
}

pub const EVENT_LABELS: [(char, &str); 8] = [
    ('A', "initial coherent state"),
    ('B', "max F_BW"),
    ('C', "max F_EWSS"),
    ('D', "best squeezing"),
    ('E', "max F_Yurke"),
    ('F', "max F_Q"),
    ('G', "max F_TF"),
    ('H', "second local minimum of F_Q"),
];

/// Locates events A-H. Fidelity events are the largest values in the window,
/// D is the first squeezing minimum, F the first Fisher-information maximum
/// and H the first interior Fisher-information minimum after it (the initial
/// state being the first minimum). Requires even `N`.
pub fn locate_events(ev: &Evolution, t_max: f64, samples: usize) -> Result<Vec<Event>> {
    let n = ev.particle_number();
    n.require_even("event location")?;
    let step = t_max / (samples.max(3) - 1) as f64;
    let nb = |label: char| Error::NotBracketed(label.to_string());
    let mut out = Vec::with_capacity(8);
    let mut push = |label: char, e: Extremum| {
        let description = EVENT_LABELS.iter().find(|l| l.0 == label).unwrap().1;
        out.push(Event {
            label,
            description,
            chi_t: e.t,
            value: e.value,
            residual: e.residual,
        });
    };
    push(
        'A',
        Extremum {
            t: 0.0,
            value: ev.qfi(0.0),
            residual: 0.0,
        },
    );
    let fid = |kind: ReferenceKind, label: char| -> Result<Extremum> {
        let (e, _) = fidelity_maximum(ev, kind, t_max, step)?;
        if e.t <= 0.0 || e.t >= t_max {
            return Err(nb(label));
        }
        Ok(e)
    };
    push('B', fid(ReferenceKind::BerryWiseman, 'B')?);
    push('C', fid(ReferenceKind::Ewss, 'C')?);
    push('D', ev.best_squeezing(t_max, samples).map_err(|_| nb('D'))?);
    push('E', fid(ReferenceKind::Yurke { alpha: 0.0 }, 'E')?);
    let f = ev.first_qfi_maximum(t_max, samples).map_err(|_| nb('F'))?;
    push('F', f);
    push('G', fid(ReferenceKind::TwinFock, 'G')?);
    let h = ev
        .qfi_minima(t_max, samples)
        .into_iter()
        .find(|m| m.t > f.t)
        .ok_or_else(|| nb('H'))?;
    push('H', h);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn saddle_run(n: usize) -> Evolution {
        Evolution::from_angles(HamiltonianKind::TactRotated, ParticleNumber::new(n).unwrap(), FRAC_PI_2, 0.0)
            .unwrap()
    }

    #[test]
    fn coherent_start_values() {
        let ev = saddle_run(10);
        assert!((ev.qfi(0.0) - 10.0).abs() < 1e-10);
        assert!((ev.squeezing(0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn first_maximum_needs_a_bracket() {
        let ev = saddle_run(20);
        let err = ev.first_qfi_maximum(1e-4, 10).unwrap_err();
        assert!(matches!(err, Error::NotBracketed(_)));
    }

    #[test]
    fn events_are_ordered() {
        let n = ParticleNumber::new(20).unwrap();
        let ev = saddle_run(20);
        let events = locate_events(&ev, default_t_max(n), 400).unwrap();
        let labels: String = events.iter().map(|e| e.label).collect();
        assert_eq!(labels, "ABCDEFGH");
        assert!(events.windows(2).all(|w| w[0].chi_t < w[1].chi_t), "{events:?}");
    }

    #[test]
    fn short_window_reports_missing_event() {
        let n = ParticleNumber::new(20).unwrap();
        let ev = saddle_run(20);
        let t = ev.first_qfi_maximum(default_t_max(n), 400).unwrap().t;
        let err = locate_events(&ev, t * 1.1, 200).unwrap_err();
        assert!(matches!(err, Error::NotBracketed(_)), "{err:?}");
    }
}
