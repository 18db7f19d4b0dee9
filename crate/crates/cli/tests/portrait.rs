mod common;

use std::f64::consts::SQRT_2;

use common::{run_in, Csv};
use tact_cli::Command;

#[test]
fn fixed_points_flow_and_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_in(tmp.path(), Command::Portrait, "");
    let fp = Csv::read(&dir.join("fixed_points.csv"));
    assert_eq!(fp.rows.len(), 6);
    let kinds = fp.text("kind");
    assert_eq!(kinds.iter().filter(|k| *k == "saddle").count(), 2);
    assert_eq!(kinds.iter().filter(|k| *k == "center").count(), 4);
    assert!(fp.floats("residual").iter().all(|r| *r < 1e-10));
    for (i, k) in kinds.iter().enumerate() {
        let (re, im) = (fp.floats("lambda1_re")[i], fp.floats("lambda1_im")[i]);
        if k == "saddle" {
            assert!((re.abs() - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
        } else {
            assert!(re.abs() < 1e-12 && (im.abs() - SQRT_2).abs() < 1e-12);
        }
    }

    // grid nodes that land on a fixed point carry no arrow
    let field = Csv::read(&dir.join("portrait.csv"));
    let (phi, z) = (field.floats("phi"), field.floats("z"));
    let (dphi, dz) = (field.floats("dphi"), field.floats("dz"));
    assert_eq!(phi.len(), 48 * 31);
    let (fphi, fz) = (fp.floats("phi"), fp.floats("z"));
    let mut on_fixed = 0;
    for i in 0..phi.len() {
        if fphi.iter().zip(&fz).any(|(p, q)| (p - phi[i]).abs() < 1e-12 && (q - z[i]).abs() < 1e-12) {
            assert!(dphi[i].hypot(dz[i]) < 1e-10);
            on_fixed += 1;
        }
    }
    assert!(on_fixed >= 2, "the default grid contains both saddles");

    let summary = Csv::read(&dir.join("trajectories.csv"));
    assert_eq!(summary.rows.len(), 6);
    assert!(summary.floats("max_energy_drift").iter().all(|d| *d < 1e-8));
    for i in 0..6 {
        let tr = Csv::read(&dir.join(format!("trajectory_{i:02}.csv")));
        let e = tr.floats("energy");
        let (p, q) = (tr.floats("phi"), tr.floats("z"));
        for k in (0..e.len()).step_by(97) {
            let oracle = -q[k] * (1.0 - q[k] * q[k]).sqrt() * p[k].sin();
            assert!((e[k] - oracle).abs() < 1e-12);
        }
        assert!(e.iter().all(|x| (x - e[0]).abs() < 1e-8));
    }
}
