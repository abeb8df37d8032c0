use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use micromaser_cli::presets::NAMES;
use micromaser_cli::ConfigFile;

fn micromaser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_micromaser"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const FROZEN: &str = "\
# no interaction: everything stays thermal
tau = 0
n_bar = 1
cutoff = 32
n_atoms = 6
snapshots = 0, 6
q_xmin = -2
q_xmax = 2
q_ymin = -1.5
q_ymax = 1.5
q_nx = 5
q_ny = 4
";

#[test]
fn presets_parse_back() {
    for name in NAMES {
        let out = micromaser(&["presets", name]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        ConfigFile::parse(&text).unwrap().run_config().unwrap();
    }
    let all = String::from_utf8(micromaser(&["presets"]).stdout).unwrap();
    for name in NAMES {
        assert!(all.contains(&format!("# preset: {name}")));
    }
    assert_eq!(micromaser(&["presets", "nope"]).status.code(), Some(1));
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "tau = 1\nepsilon=1\n");
    let out = micromaser(&["run", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    assert!(!dir.path().join("series.csv").exists());
}

#[test]
fn frozen_run_writes_constant_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "frozen.cfg", FROZEN);
    let out_dir = dir.path().join("out");
    let out = micromaser(&["run", &cfg, "-o", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let series = rows(&out_dir.join("series.csv"));
    assert_eq!(series[0], ["atom_index", "zeta", "mean_n", "g2"]);
    assert_eq!(series.len(), 1 + 7);
    for (k, row) in series[1..].iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        assert_eq!(row[1..], series[1][1..]);
    }
    // %.12e layout
    let zeta = &series[1][1];
    assert_eq!(zeta.len(), "6.666666665114e-01".len());
    assert!(zeta.ends_with("e-01"));

    for k in [0, 6] {
        let pn = rows(&out_dir.join(format!("pn_{k}.csv")));
        assert_eq!(pn[0], ["n", "p_n"]);
        assert_eq!(pn.len(), 1 + 32);
        let q = rows(&out_dir.join(format!("qgrid_{k}.csv")));
        assert_eq!(q[0], ["x", "y", "q"]);
        assert_eq!(q.len(), 1 + 5 * 4);
        assert!(q[1..].iter().all(|r| r.len() == 3));
    }
    let audit = fs::read_to_string(out_dir.join("audit.txt")).unwrap();
    assert!(audit.starts_with("status: PASS"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let text = "n_bar = 0.5\ncutoff = 24\ntau = 2.3\neps_re = 0.4\nn_atoms = 8\nsnapshots = 8\n\
                q_xmin = -2\nq_xmax = 2\nq_ymin = -2\nq_ymax = 2\nq_nx = 7\nq_ny = 7\n";
    let cfg = write_config(dir.path(), "c.cfg", text);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out_dir = dir.path().join(sub);
            let out = micromaser(&["run", &cfg, "-o", out_dir.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
            out_dir
        })
        .collect();
    for file in ["series.csv", "pn_8.csv", "qgrid_8.csv", "audit.txt"] {
        assert_eq!(
            fs::read(runs[0].join(file)).unwrap(),
            fs::read(runs[1].join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn undersized_cutoff_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "n_bar = 5\ncutoff = 16\n");
    let out = micromaser(&["run", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_audit_still_writes_outputs() {
    // undriven excited atoms pump the field into the top of an 8-level space
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.cfg",
        "n_bar = 0.1\ncutoff = 8\neps_re = 0\ntau = 1\nn_atoms = 30\n",
    );
    let out = micromaser(&["run", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(rows(&dir.path().join("series.csv")).len(), 32);
    let audit = fs::read_to_string(dir.path().join("audit.txt")).unwrap();
    assert!(audit.starts_with("status: FAIL"));
}

#[test]
fn optimize_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.cfg",
        "n_bar = 0.5\ncutoff = 24\neps_re = 0.3\nn_atoms = 10\n\
         tau_scan_lo = 0.5\ntau_scan_hi = 2.0\ntau_scan_step = 0.2\n",
    );
    let out = micromaser(&["optimize", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let scan = rows(&dir.path().join("tau_scan.csv"));
    assert_eq!(scan[0], ["tau", "zeta_min", "argmin_atom_index"]);
    // floor(1.5 / 0.2) + 1
    assert_eq!(scan.len() - 1, 8);
    let best = fs::read_to_string(dir.path().join("best.txt")).unwrap();
    assert!(best.contains("tau_star = "));
    assert!(best.contains("zeta_min = "));
}

#[test]
fn degenerate_scan_picks_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.cfg",
        "n_bar = 1\ncutoff = 32\nn_atoms = 5\ntau_scan_lo = 0\ntau_scan_hi = 0\ntau_scan_step = 0.05\n",
    );
    let out = micromaser(&["optimize", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let best = fs::read_to_string(dir.path().join("best.txt")).unwrap();
    assert!(best.starts_with("tau_star = 0.000000000000e+00\n"));
    assert_eq!(rows(&dir.path().join("tau_scan.csv")).len(), 2);
}

#[test]
fn optimize_requires_scan_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "n_atoms = 3\n");
    let out = micromaser(&["optimize", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau_scan_lo"));
}
