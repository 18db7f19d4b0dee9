use rayon::prelude::*;
use serde::Serialize;

use super::fidelity::FidelityProbe;
use super::reference::ReferenceKind;
use super::{qfi_pure, spin_moments, squeezing_parameter};
use crate::dynamics::Propagator;
use crate::error::Result;
use crate::spin::{SpinAxis, SpinMatrices, StateVector};

/// Column order of the observable CSV.
pub const OBSERVABLE_COLUMNS: [&str; 13] = [
    "chi_t", "xi2", "FQ", "mean_Sx", "mean_Sy", "mean_Sz", "var_Sy", "var_Sz", "fid_BW",
    "fid_EWSS", "fid_Y", "fid_TF", "fid_NOON",
];

/// One time sample of the observable sweep. Undefined entries (squeezing
/// with vanishing mean spin, parity-restricted fidelities at odd `N`) are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableRow {
    pub chi_t: f64,
    pub xi2: f64,
    #[serde(rename = "FQ")]
    pub fq: f64,
    #[serde(rename = "mean_Sx")]
    pub mean_sx: f64,
    #[serde(rename = "mean_Sy")]
    pub mean_sy: f64,
    #[serde(rename = "mean_Sz")]
    pub mean_sz: f64,
    #[serde(rename = "var_Sy")]
    pub var_sy: f64,
    #[serde(rename = "var_Sz")]
    pub var_sz: f64,
    #[serde(rename = "fid_BW")]
    pub fid_bw: f64,
    #[serde(rename = "fid_EWSS")]
    pub fid_ewss: f64,
    #[serde(rename = "fid_Y")]
    pub fid_y: f64,
    #[serde(rename = "fid_TF")]
    pub fid_tf: f64,
    #[serde(rename = "fid_NOON")]
    pub fid_noon: f64,
}

impl ObservableRow {
    pub fn values(&self) -> [f64; 13] {
        [
            self.chi_t,
            self.xi2,
            self.fq,
            self.mean_sx,
            self.mean_sy,
            self.mean_sz,
            self.var_sy,
            self.var_sz,
            self.fid_bw,
            self.fid_ewss,
            self.fid_y,
            self.fid_tf,
            self.fid_noon,
        ]
    }

    /// Evaluates every observable for one state. `yurke_alpha = None` takes
    /// the best mixing angle for this state.
    pub fn evaluate(
        chi_t: f64,
        psi: &StateVector,
        s: &SpinMatrices,
        probe: &FidelityProbe,
        yurke_alpha: Option<f64>,
    ) -> Result<Self> {
        let n = s.particle_number();
        let m = spin_moments(psi, s)?;
        let even = n.is_even();
        let fid_y = match (even, yurke_alpha) {
            (false, _) => f64::NAN,
            (true, Some(alpha)) => probe.fidelity(ReferenceKind::Yurke { alpha }, psi)?,
            (true, None) => probe.best_yurke(psi)?.1,
        };
        Ok(Self {
            chi_t,
            xi2: squeezing_parameter(&m, n).unwrap_or(f64::NAN),
            fq: qfi_pure(&m),
            mean_sx: m.mean_component(SpinAxis::X),
            mean_sy: m.mean_component(SpinAxis::Y),
            mean_sz: m.mean_component(SpinAxis::Z),
            var_sy: m.variance(SpinAxis::Y),
            var_sz: m.variance(SpinAxis::Z),
            fid_bw: probe.fidelity(ReferenceKind::BerryWiseman, psi)?,
            fid_ewss: probe.fidelity(ReferenceKind::Ewss, psi)?,
            fid_y,
            fid_tf: if even {
                probe.fidelity(ReferenceKind::TwinFock, psi)?
            } else {
                f64::NAN
            },
            fid_noon: probe.fidelity(ReferenceKind::Noon, psi)?,
        })
    }
}

/// Evolves `psi0` to each time and evaluates the full observable row,
/// parallel over time points.
pub fn observable_sweep(
    prop: &Propagator,
    psi0: &StateVector,
    s: &SpinMatrices,
    times: &[f64],
    yurke_alpha: Option<f64>,
) -> Result<Vec<ObservableRow>> {
    let probe = FidelityProbe::new(s)?;
    let coords = prop.project(psi0)?;
    times
        .par_iter()
        .map(|&t| {
            let psi = prop.evolve_projected(&coords, t);
            ObservableRow::evaluate(t, &psi, s, &probe, yurke_alpha)
        })
        .collect()
}
