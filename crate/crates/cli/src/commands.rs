//! Subcommand pipelines. Per-N work runs on the rayon pool and returns its
//! artifacts; the calling thread writes them in configuration order.

use std::time::Instant;

use rayon::prelude::*;

use tact_core::analysis::{locate_events, Evolution};
use tact_core::meanfield::{
    best_time_estimate, find_fixed_points, fixed_point_residual, frozen_spin_frequency, frozen_spin_prediction,
    gaussian_asymptotics, integrate_trajectory, mf_energy, orbit_period, phase_portrait, BestTimeModel,
    FixedPointKind, GaussianModel, MeanFieldState,
};
use tact_core::metrology::{squeezing_parameter, qfi_pure, ObservableRow, OBSERVABLE_COLUMNS};
use tact_core::phase_space::{fringe_count_on_map, husimi_map, GridCircle, SphereGrid, WignerFunction};
use tact_core::search::uniform_grid;
use tact_core::spin::SpinAxis;
use tact_core::ParticleNumber;

use crate::config::{ConfigError, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Cell, RunManifest, RunWriter, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Scaling,
    Maps,
    Portrait,
    Approx,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Scaling => "scaling",
            Command::Maps => "maps",
            Command::Portrait => "portrait",
            Command::Approx => "approx",
        }
    }
}

/// Runs one subcommand into `cfg.out_dir` and writes the manifest last.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut w = RunWriter::create(&cfg.out_dir, cfg.format)?;
    match command {
        Command::Evolve => evolve(cfg, &mut w)?,
        Command::Scaling => scaling(cfg, &mut w)?,
        Command::Maps => {
            per_n(cfg, &mut w, "maps", maps_for)?;
        }
        Command::Portrait => w.timed("portrait", |w| emit(w, portrait(cfg)?))?,
        Command::Approx => approx(cfg, &mut w)?,
    }
    w.finish(command.name(), cfg)
}

enum Artifact {
    Table(String, Table),
    Raw(String, Vec<u8>),
}

fn emit(w: &mut RunWriter, artifacts: Vec<Artifact>) -> Result<(), CliError> {
    for a in artifacts {
        match a {
            Artifact::Table(stem, t) => w.write_table(&stem, &t)?,
            Artifact::Raw(name, bytes) => w.write_bytes(&name, &bytes)?,
        };
    }
    Ok(())
}

struct NOutput {
    artifacts: Vec<Artifact>,
    summary: Option<Vec<Cell>>,
}

/// Runs `job` for every `N` in parallel, then writes in list order and
/// records one stage per `N`.
fn per_n(
    cfg: &ExperimentConfig,
    w: &mut RunWriter,
    stage: &str,
    job: fn(&ExperimentConfig, ParticleNumber) -> Result<NOutput, CliError>,
) -> Result<Vec<Option<Vec<Cell>>>, CliError> {
    let results: Vec<(Result<NOutput, CliError>, f64)> = cfg
        .n
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let out = ParticleNumber::new(n).map_err(CliError::from).and_then(|n| job(cfg, n));
            (out, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut summaries = Vec::with_capacity(results.len());
    for (&n, (out, seconds)) in cfg.n.iter().zip(results) {
        w.record_stage(format!("{stage} N={n}"), seconds);
        let out = out?;
        emit(w, out.artifacts)?;
        summaries.push(out.summary);
    }
    Ok(summaries)
}

fn summary_table(columns: &[&str], rows: Vec<Option<Vec<Cell>>>) -> Table {
    let mut t = Table::new(columns);
    for r in rows.into_iter().flatten() {
        t.push(r);
    }
    t
}

fn evolution(cfg: &ExperimentConfig, n: ParticleNumber) -> Result<Evolution, CliError> {
    Ok(Evolution::from_angles(cfg.hamiltonian, n, cfg.initial.theta, cfg.initial.phi)?)
}

pub const EVOLVE_SUMMARY_COLUMNS: [&str; 12] = [
    "N",
    "t_max",
    "samples",
    "xi2_min",
    "t_xi2_min",
    "xi2_KU_min",
    "t_xi2_KU_min",
    "FQ_min",
    "FQ_max",
    "t_FQ_max",
    "t_first_FQ_max",
    "FQ_first_max",
];

fn evolve(cfg: &ExperimentConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let o = cfg.outputs;
    if o.observables {
        let rows = per_n(cfg, w, "evolve", evolve_for)?;
        w.write_table("summary", &summary_table(&EVOLVE_SUMMARY_COLUMNS, rows))?;
    }
    if o.approximations {
        approx(cfg, w)?;
    }
    if o.maps {
        per_n(cfg, w, "maps", maps_for)?;
    }
    if o.portrait {
        w.timed("portrait", |w| emit(w, portrait(cfg)?))?;
    }
    Ok(())
}

fn moments_only_row(ev: &Evolution, t: f64) -> ObservableRow {
    let m = ev.moments(t);
    ObservableRow {
        chi_t: t,
        xi2: squeezing_parameter(&m, ev.particle_number()).unwrap_or(f64::NAN),
        fq: qfi_pure(&m),
        mean_sx: m.mean_component(SpinAxis::X),
        mean_sy: m.mean_component(SpinAxis::Y),
        mean_sz: m.mean_component(SpinAxis::Z),
        var_sy: m.variance(SpinAxis::Y),
        var_sz: m.variance(SpinAxis::Z),
        fid_bw: f64::NAN,
        fid_ewss: f64::NAN,
        fid_y: f64::NAN,
        fid_tf: f64::NAN,
        fid_noon: f64::NAN,
    }
}

/// Index of the extreme finite value under `better`.
fn extreme(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| better(v, values[b])) {
            best = Some(i);
        }
    }
    best
}

fn evolve_for(cfg: &ExperimentConfig, n: ParticleNumber) -> Result<NOutput, CliError> {
    let ev = evolution(cfg, n)?;
    let t_max = cfg.t_max_for(n);
    let samples = cfg.time.samples;
    let times = uniform_grid(t_max, samples);
    let rows = if cfg.outputs.fidelities {
        ev.sweep(&times, cfg.yurke_alpha)?
    } else {
        times.par_iter().map(|&t| moments_only_row(&ev, t)).collect()
    };

    let mut obs = Table::new(&OBSERVABLE_COLUMNS);
    for r in &rows {
        obs.push(r.values().iter().map(|&v| Cell::Float(v)).collect());
    }

    // 4 Var_min / N = xi^2 |<S>|^2 * 4 / N^2
    let nf = n.as_f64();
    let xi2: Vec<f64> = rows.iter().map(|r| r.xi2).collect();
    let ku: Vec<f64> = rows
        .iter()
        .map(|r| 4.0 * r.xi2 * (r.mean_sx.powi(2) + r.mean_sy.powi(2) + r.mean_sz.powi(2)) / (nf * nf))
        .collect();
    let fq: Vec<f64> = rows.iter().map(|r| r.fq).collect();
    let at = |idx: Option<usize>, v: &[f64]| match idx {
        Some(i) => (v[i], times[i]),
        None => (f64::NAN, f64::NAN),
    };
    let (xi_min, t_xi) = at(extreme(&xi2, |a, b| a < b), &xi2);
    let (ku_min, t_ku) = at(extreme(&ku, |a, b| a < b), &ku);
    let (fq_min, _) = at(extreme(&fq, |a, b| a < b), &fq);
    let (fq_max, t_fq) = at(extreme(&fq, |a, b| a > b), &fq);
    let (t_first, fq_first) = match ev.first_qfi_maximum(t_max, samples) {
        Ok(e) => (e.t, e.value),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let summary = vec![
        n.get().into(),
        t_max.into(),
        samples.into(),
        xi_min.into(),
        t_xi.into(),
        ku_min.into(),
        t_ku.into(),
        fq_min.into(),
        fq_max.into(),
        t_fq.into(),
        t_first.into(),
        fq_first.into(),
    ];
    Ok(NOutput {
        artifacts: vec![Artifact::Table(format!("observables_N{}", n.get()), obs)],
        summary: Some(summary),
    })
}

pub const SCALING_COLUMNS: [&str; 15] = [
    "N",
    "t_best_xi",
    "xi2_best",
    "t_best_FQ",
    "FQ_best",
    "FQ_best_over_N2",
    "t_best_xi_KU",
    "xi2_KU_best",
    "model_t_best_xi",
    "model_xi2_best",
    "model_t_best_FQ",
    "model_FQ_best",
    "gaussian_t_best",
    "gaussian_xi2_best",
    "gaussian_FQ_best",
];

fn scaling(cfg: &ExperimentConfig, w: &mut RunWriter) -> Result<(), CliError> {
    if cfg.n.len() < 2 {
        return Err(ConfigError::new("N", "scaling needs at least two particle numbers").into());
    }
    if let Some(i) = cfg.n.iter().position(|&n| n < 2) {
        return Err(ConfigError::new(format!("N[{i}]"), "scaling needs N >= 2").into());
    }
    let rows = per_n(cfg, w, "scaling", scaling_for)?;
    w.write_table("scaling", &summary_table(&SCALING_COLUMNS, rows))?;
    Ok(())
}

fn scaling_for(cfg: &ExperimentConfig, n: ParticleNumber) -> Result<NOutput, CliError> {
    let ev = evolution(cfg, n)?;
    let t_max = cfg.t_max_for(n);
    let samples = cfg.time.samples;
    let sq = ev.best_squeezing(t_max, samples)?;
    let fq = ev.first_qfi_maximum(t_max, samples)?;
    let ku = ev.best_kitagawa_ueda(t_max, samples)?;
    let (xi_asym, fq_asym) = gaussian_asymptotics(n);
    let model = GaussianModel::new(n);
    let best = model.at_tau(model.best_tau());
    let nf = n.as_f64();
    let row = vec![
        n.get().into(),
        sq.t.into(),
        sq.value.into(),
        fq.t.into(),
        fq.value.into(),
        (fq.value / (nf * nf)).into(),
        ku.t.into(),
        ku.value.into(),
        best_time_estimate(n, BestTimeModel::SqueezingModel)?.into(),
        xi_asym.into(),
        best_time_estimate(n, BestTimeModel::QfiEmpirical)?.into(),
        fq_asym.into(),
        best.chi_t.into(),
        best.xi2.into(),
        best.fq.into(),
    ];
    Ok(NOutput {
        artifacts: Vec::new(),
        summary: Some(row),
    })
}

pub const EVENT_COLUMNS: [&str; 12] = [
    "label",
    "description",
    "chi_t",
    "value",
    "residual",
    "husimi_max",
    "husimi_argmax_theta",
    "husimi_argmax_phi",
    "wigner_min",
    "wigner_max",
    "wigner_imag_residual",
    "wigner_fringes",
];

fn maps_for(cfg: &ExperimentConfig, n: ParticleNumber) -> Result<NOutput, CliError> {
    if !n.is_even() {
        let i = cfg.n.iter().position(|&m| m == n.get()).unwrap_or(0);
        return Err(ConfigError::new(
            format!("N[{i}]"),
            "maps need an even particle number for the twin-Fock and Yurke events",
        )
        .into());
    }
    let ev = evolution(cfg, n)?;
    let events = locate_events(&ev, cfg.t_max_for(n), cfg.time.samples)?;
    let nn = n.get();
    let grid = match (cfg.maps.n_theta, cfg.maps.n_phi) {
        (None, None) => SphereGrid::for_particles(nn),
        (t, p) => SphereGrid::new(t.unwrap_or(2 * nn + 1), p.unwrap_or(4 * nn + 4)),
    };

    let per_event: Vec<(Vec<Cell>, Vec<Artifact>)> = events
        .par_iter()
        .map(|e| {
            let psi = ev.state(e.chi_t);
            let q = husimi_map(&psi, &grid);
            let (wmap, imag) = WignerFunction::new(&psi).sample(&grid);
            let fringes = fringe_count_on_map(&wmap, GridCircle::Equator)
                .map(Cell::from)
                .unwrap_or(Cell::Float(f64::NAN));
            let (qt, qp) = q.argmax();
            let row = vec![
                e.label.to_string().into(),
                e.description.into(),
                e.chi_t.into(),
                e.value.into(),
                e.residual.into(),
                q.max().into(),
                qt.into(),
                qp.into(),
                wmap.min().into(),
                wmap.max().into(),
                imag.into(),
                fringes,
            ];
            let tag = format!("N{nn}_{}", e.label);
            let mut files = Vec::new();
            for (kind, map) in [("husimi", &q), ("wigner", &wmap)] {
                let mut csv = Vec::new();
                map.write_csv(&mut csv).expect("in-memory write");
                files.push(Artifact::Raw(format!("{kind}_{tag}.csv"), csv));
                if cfg.maps.binary {
                    let mut bin = Vec::new();
                    map.write_binary(&mut bin).expect("in-memory write");
                    files.push(Artifact::Raw(format!("{kind}_{tag}.bin"), bin));
                }
            }
            if cfg.maps.states {
                let mut json = serde_json::to_vec(&psi).expect("state record is plain data");
                json.push(b'\n');
                files.push(Artifact::Raw(format!("state_{tag}.json"), json));
            }
            (row, files)
        })
        .collect();

    let mut table = Table::new(&EVENT_COLUMNS);
    let mut artifacts = Vec::new();
    for (row, files) in per_event {
        table.push(row);
        artifacts.extend(files);
    }
    artifacts.insert(0, Artifact::Table(format!("events_N{nn}"), table));
    Ok(NOutput {
        artifacts,
        summary: None,
    })
}

pub const FIXED_POINT_COLUMNS: [&str; 10] = [
    "phi",
    "z",
    "kind",
    "energy",
    "lambda1_re",
    "lambda1_im",
    "lambda2_re",
    "lambda2_im",
    "residual",
    "index",
];

pub const TRAJECTORY_SUMMARY_COLUMNS: [&str; 7] =
    ["index", "phi0", "z0", "energy", "max_energy_drift", "period", "points"];

fn portrait(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, CliError> {
    let p = &cfg.portrait;
    let mut fixed = Table::new(&FIXED_POINT_COLUMNS);
    for (i, fp) in find_fixed_points()?.iter().enumerate() {
        let s = &fp.location;
        let kind = match fp.kind {
            FixedPointKind::Saddle => "saddle",
            FixedPointKind::Center => "center",
        };
        fixed.push(vec![
            s.phi.into(),
            s.z.into(),
            kind.into(),
            mf_energy(s).into(),
            fp.eigenvalues[0].re.into(),
            fp.eigenvalues[0].im.into(),
            fp.eigenvalues[1].re.into(),
            fp.eigenvalues[1].im.into(),
            fixed_point_residual(s)?.into(),
            i.into(),
        ]);
    }

    let mut field = Table::new(&["phi", "z", "dphi", "dz"]);
    for s in phase_portrait(p.n_phi, p.n_z) {
        field.push(vec![s.phi.into(), s.z.into(), s.dphi.into(), s.dz.into()]);
    }

    let runs: Vec<Result<(Vec<Cell>, Table), CliError>> = p
        .starts
        .par_iter()
        .enumerate()
        .map(|(i, &[phi, z])| {
            let s0 = MeanFieldState::wrapped(phi, z)?;
            let traj = integrate_trajectory(&s0, p.t_end, p.dt)?;
            let period = orbit_period(&s0, p.t_end, p.dt).unwrap_or(f64::NAN);
            let mut t = Table::new(&["t", "phi", "z", "energy"]);
            for q in &traj.points {
                t.push(vec![q.t.into(), q.phi.into(), q.z.into(), q.energy.into()]);
            }
            let row = vec![
                i.into(),
                s0.phi.into(),
                s0.z.into(),
                mf_energy(&s0).into(),
                traj.max_energy_drift().into(),
                period.into(),
                traj.points.len().into(),
            ];
            Ok((row, t))
        })
        .collect();

    let mut summary = Table::new(&TRAJECTORY_SUMMARY_COLUMNS);
    let mut out = vec![
        Artifact::Table("fixed_points".into(), fixed),
        Artifact::Table("portrait".into(), field),
    ];
    for (i, r) in runs.into_iter().enumerate() {
        let (row, t) = r?;
        summary.push(row);
        out.push(Artifact::Table(format!("trajectory_{i:02}"), t));
    }
    out.push(Artifact::Table("trajectories".into(), summary));
    Ok(out)
}

pub const APPROX_SUMMARY_COLUMNS: [&str; 12] = [
    "N",
    "epsilon",
    "sx0",
    "gaussian_tau_best",
    "gaussian_t_best",
    "gaussian_xi2_best",
    "gaussian_FQ_best",
    "asymptotic_xi2_best",
    "asymptotic_FQ_best",
    "model_t_best_xi",
    "model_t_best_FQ",
    "frozen_spin_omega",
];

fn approx(cfg: &ExperimentConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let rows = per_n(cfg, w, "approx", approx_for)?;
    w.write_table("approx_summary", &summary_table(&APPROX_SUMMARY_COLUMNS, rows))?;
    Ok(())
}

fn approx_for(cfg: &ExperimentConfig, n: ParticleNumber) -> Result<NOutput, CliError> {
    let nn = n.get();
    let times = uniform_grid(cfg.t_max_for(n), cfg.time.samples);
    let model = GaussianModel::new(n);
    let mut gauss = Table::new(&["chi_t", "tau", "s_x", "xi2", "FQ", "valid"]);
    let mut frozen = Table::new(&["chi_t", "xi2", "FQ"]);
    for &t in &times {
        let g = model.at_chi_t(t);
        gauss.push(vec![t.into(), g.tau.into(), g.s_x.into(), g.xi2.into(), g.fq.into(), g.valid.into()]);
        let (xi2, fq) = frozen_spin_prediction(n, t);
        frozen.push(vec![t.into(), xi2.into(), fq.into()]);
    }
    let tau_best = model.best_tau();
    let best = model.at_tau(tau_best);
    let (xi_asym, fq_asym) = gaussian_asymptotics(n);
    let estimate = |which| best_time_estimate(n, which).unwrap_or(f64::NAN);
    let row = vec![
        nn.into(),
        model.epsilon().into(),
        model.sx0().into(),
        tau_best.into(),
        best.chi_t.into(),
        best.xi2.into(),
        best.fq.into(),
        xi_asym.into(),
        fq_asym.into(),
        estimate(BestTimeModel::SqueezingModel).into(),
        estimate(BestTimeModel::QfiEmpirical).into(),
        frozen_spin_frequency(n).into(),
    ];
    Ok(NOutput {
        artifacts: vec![
            Artifact::Table(format!("gaussian_N{nn}"), gauss),
            Artifact::Table(format!("frozen_spin_N{nn}"), frozen),
        ],
        summary: Some(row),
    })
}
