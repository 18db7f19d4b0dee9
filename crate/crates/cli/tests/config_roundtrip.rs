use std::path::PathBuf;

use proptest::prelude::*;
use tact_cli::config::{InitialState, MapOptions, Outputs, PortraitOptions, TimeGrid};
use tact_cli::{ExperimentConfig, OutputFormat};
use tact_core::HamiltonianKind;

fn kind() -> impl Strategy<Value = HamiltonianKind> {
    prop_oneof![
        Just(HamiltonianKind::TactOriginal),
        Just(HamiltonianKind::TactRotated),
        Just(HamiltonianKind::TactEquivalent),
        Just(HamiltonianKind::Oat),
    ]
}

prop_compose! {
    fn any_config()(
        n in prop::collection::vec(1usize..2000, 1..5),
        hamiltonian in kind(),
        json in any::<bool>(),
        seed in any::<u64>(),
        alpha in prop::option::of(-3.0f64..3.0),
        theta in 0.0f64..=std::f64::consts::PI,
        phi in -std::f64::consts::PI..std::f64::consts::PI,
        t_max in prop::option::of(1e-6f64..10.0),
        samples in 2usize..100_000,
        flags in prop::array::uniform7(any::<bool>()),
        n_theta in prop::option::of(1usize..500),
        n_phi in prop::option::of(1usize..500),
        grid in (1usize..200, 1usize..200, 1e-3f64..100.0, 1e-6f64..0.1),
        starts in prop::collection::vec((-10.0f64..10.0, -0.999f64..0.999), 0..6),
        dir in "[a-z]{1,8}(/[a-z0-9_]{1,8}){0,2}",
    ) -> ExperimentConfig {
        ExperimentConfig {
            n,
            hamiltonian,
            out_dir: PathBuf::from(dir),
            format: if json { OutputFormat::Json } else { OutputFormat::Csv },
            seed,
            yurke_alpha: alpha,
            initial: InitialState { theta, phi },
            time: TimeGrid { t_max, samples },
            outputs: Outputs {
                observables: flags[0],
                fidelities: flags[1],
                maps: flags[2],
                portrait: flags[3],
                approximations: flags[4],
            },
            maps: MapOptions { n_theta, n_phi, binary: flags[5], states: flags[6] },
            portrait: PortraitOptions {
                n_phi: grid.0,
                n_z: grid.1,
                t_end: grid.2,
                dt: grid.3,
                starts: starts.into_iter().map(|(p, z)| [p, z]).collect(),
            },
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parse_of_serialize_is_identity(cfg in any_config()) {
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn default_round_trips() {
    let cfg = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
}

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn center_config_is_the_mean_field_center() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/center.toml");
    let cfg = ExperimentConfig::load(&path).unwrap();
    // z = cos(theta) = 1/sqrt2 at phi = pi/2; three frozen-spin periods
    assert!((cfg.initial.theta.cos() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((cfg.initial.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    let omega = 2f64.sqrt() * 50.0;
    assert!((cfg.time.t_max.unwrap() - 3.0 * std::f64::consts::PI / omega).abs() < 1e-15);
}
