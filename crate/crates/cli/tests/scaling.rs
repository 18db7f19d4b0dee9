mod common;

use std::f64::consts::{E, PI};

use common::{run_in, Csv};
use tact_cli::{run, CliError, Command};

#[test]
fn fisher_information_scales_as_two_thirds_n_squared() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_in(tmp.path(), Command::Scaling, "N = [50, 100, 200]\n");
    let t = Csv::read(&dir.join("scaling.csv"));
    for c in ["N", "t_best_xi", "xi2_best", "t_best_FQ", "FQ_best"] {
        t.idx(c);
    }
    let ns = t.floats("N");
    assert_eq!(ns, vec![50.0, 100.0, 200.0]);
    let fq = t.floats("FQ_best");
    let t_fq = t.floats("t_best_FQ");
    let xi = t.floats("xi2_best");
    for (i, &n) in ns.iter().enumerate() {
        let ratio = fq[i] / (n * n);
        assert!((0.62..=0.72).contains(&ratio), "N={n}: FQ/N^2 = {ratio}");
        assert_eq!(t.floats("FQ_best_over_N2")[i], ratio);
        let guess = (2.0 * PI * n).ln() / (2.0 * n);
        assert!((t_fq[i] / guess - 1.0).abs() <= 0.15, "N={n}: t {} vs {guess}", t_fq[i]);

        // model columns against the closed forms
        let close = |col: &str, want: f64| {
            let got = t.floats(col)[i];
            assert!((got - want).abs() <= 1e-12 * want.abs(), "{col}: {got} vs {want}");
        };
        close("model_t_best_xi", (2.0 * n).ln() / (2.0 * n));
        close("model_t_best_FQ", guess);
        close("model_xi2_best", E / (2.0 * n));
        close("model_FQ_best", 2.0 / E * n * n);
        // ln(8 sx0^2)/(4 sx0) in tau, sx0 = sqrt(N)/2, back to chi t
        close("gaussian_t_best", (2.0 * n).ln() / (2.0 * n));
    }
    // beats the N^(-2/3) one-axis law
    let scaled: Vec<f64> = ns.iter().zip(&xi).map(|(n, x)| x * n.powf(2.0 / 3.0)).collect();
    assert!(scaled.windows(2).all(|w| w[1] < w[0]), "{scaled:?}");
}

#[test]
fn scaling_needs_two_particle_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = common::config(tmp.path(), "N = 50\n");
    match run(Command::Scaling, &cfg) {
        Err(CliError::Config(e)) => assert_eq!(e.path, "N"),
        other => panic!("{other:?}"),
    }
}
