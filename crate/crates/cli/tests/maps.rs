mod common;

use std::f64::consts::FRAC_PI_2;
use std::fs;

use common::{min, run_in, Csv};
use tact_cli::{run, CliError, Command};
use tact_core::phase_space::read_binary_dump;
use tact_core::{coherent_state, ParticleNumber, StateVector};

#[test]
fn snapshots_at_events_a_to_h() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_in(tmp.path(), Command::Maps, "N = 50\n[maps]\nbinary = true\n");
    let events = Csv::read(&dir.join("events_N50.csv"));
    let labels: String = events.text("label").concat();
    assert_eq!(labels, "ABCDEFGH");
    let t = events.floats("chi_t");
    assert_eq!(t[0], 0.0);
    assert!(t.windows(2).all(|w| w[0] < w[1]), "{t:?}");
    assert!(events.floats("residual").iter().all(|r| *r < 1e-8));

    // the initial coherent state peaks on +x
    let q = Csv::read(&dir.join("husimi_N50_A.csv"));
    let vals = q.floats("value");
    let best = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    assert!((q.floats("theta")[best] - FRAC_PI_2).abs() < 1e-12);
    assert!(q.floats("phi")[best].abs() < 1e-12);
    assert!((vals[best] - 1.0).abs() < 1e-10);

    // interference fringes at the Fisher-information maximum
    let w = Csv::read(&dir.join("wigner_N50_F.csv")).floats("value");
    assert!(min(&w) < 0.0);
    // map CSVs carry 13 significant digits
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    assert!(near(events.floats("wigner_min")[5], min(&w)));

    // binary dump carries the CSV values
    let (nt, np, bin) = read_binary_dump(&fs::read(dir.join("wigner_N50_F.bin")).unwrap()).unwrap();
    assert_eq!((nt, np), (101, 204));
    assert!(bin.iter().zip(&w).all(|(a, b)| near(*a, *b)));

    // state dump at A is the coherent state
    let psi: StateVector = serde_json::from_slice(&fs::read(dir.join("state_N50_A.json")).unwrap()).unwrap();
    let cs = coherent_state(FRAC_PI_2, 0.0, ParticleNumber::new(50).unwrap()).unwrap();
    assert!((psi.overlap_sqr(&cs).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn short_window_reports_the_missing_event() {
    // at N = 20 event G sits near chi t = 0.138 and H near 0.225
    let tmp = tempfile::tempdir().unwrap();
    let cfg = common::config(tmp.path(), "N = 20\n[time]\nt_max = 0.18\nsamples = 400\n");
    match run(Command::Maps, &cfg) {
        Err(e @ CliError::Numerical(_)) => {
            assert!(e.to_string().contains("event H not bracketed"), "{e}");
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn odd_particle_number_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = common::config(tmp.path(), "N = [10, 11]\n[time]\nsamples = 50\n");
    match run(Command::Maps, &cfg) {
        Err(CliError::Config(e)) => assert_eq!(e.path, "N[1]"),
        other => panic!("{other:?}"),
    }
}
