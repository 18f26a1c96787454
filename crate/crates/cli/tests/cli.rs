use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_decoy-akg");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    run(&all)
}

fn distance_in(csv: &str) -> f64 {
    let line = csv.lines().next().unwrap();
    let value = line.split("achievable_distance_km=").nth(1).unwrap();
    value.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "--scenario", "all", "--l-max", "200", "--l-step", "50"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 7);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn csv_has_header_and_one_row_per_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--scenario", "k3-ours", "--l-min", "100", "--l-max", "120", "--l-step", "10"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("k3-ours_forward_pd-zero.csv")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data[0],
        "scenario,L_km,optimal_mu,rate_bits_per_pulse,rate_signed,q1_min,b1_max,q1_min_source_j,b1_max_source_j"
    );
    assert_eq!(data.len(), 4);
    for (row, l) in data[1..].iter().zip([100.0, 110.0, 120.0]) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[0], "k3-ours");
        assert_eq!(cells[1].parse::<f64>().unwrap(), l);
        assert!(cells[3].parse::<f64>().unwrap() > 0.0);
    }
    assert!(text.contains("p0=4e-7"));
}

#[test]
fn gnuplot_output_has_one_block_per_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["run", "--scenario", "k2", "--scenario", "k4", "--l-max", "20", "--l-step", "10", "--format", "gnuplot-data"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("combined.dat")).unwrap();
    let blocks: Vec<&str> = text.split("\n\n\n").collect();
    assert_eq!(blocks.len(), 2);
    for (block, label) in blocks.iter().zip(["k2", "k4"]) {
        assert!(block.starts_with(&format!("# scenario={label} ")));
        let rows: Vec<&str> = block.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 3);
        for row in rows {
            assert_eq!(row.split_whitespace().count(), 8);
            assert!(!row.contains(','));
        }
    }
}

#[test]
fn empty_range_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("never");
    let out = run_in(&target, &["run", "--scenario", "k2", "--l-min", "50", "--l-max", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists());
}

#[test]
fn close_custom_decoys_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("never");
    let out = run_in(&target, &["run", "--scenario", "custom", "--decoys", "0.1,0.15"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("minimum width"));
    assert!(!target.exists());
}

#[test]
fn invalid_flag_combinations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--scenario", "k2", "--dark-mode", "explicit"][..],
        &["run", "--scenario", "k2", "--decoys", "0.1"],
        &["run", "--scenario", "k9"],
        &["run", "--scenario", "k2", "--l-step", "0"],
    ] {
        assert_eq!(run_in(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn universal_reaches_expected_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "--scenario", "universal", "--l-max", "0"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("universal_forward_pd-zero.csv")).unwrap();
    let d = distance_in(&text);
    assert!((d - 225.2).abs() <= 0.5, "{d}");
}

#[test]
fn two_decoy_reverse_with_dark_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["run", "--scenario", "k2", "--direction", "reverse", "--dark-mode", "pd-equals-p0", "--l-max", "0"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("k2_reverse_pd-equals-p0.csv")).unwrap();
    assert!(text.contains("p_dark=4e-7"));
    let d = distance_in(&text);
    assert!((d - 230.7).abs() <= 0.5, "{d}");
}

#[test]
fn params_file_is_applied_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[channel]\ns = 0.02\n[scenario]\nname = \"custom\"\ndecoys = [0.05, 0.2]\ndirection = \"reverse\"\n[sweep]\nl_min = 10.0\nl_max = 30.0\nl_step = 10.0\nformat = \"csv\"\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["run", "--params-file", cfg.to_str().unwrap(), "--l-max", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("custom_reverse_pd-zero.csv")).unwrap();
    assert!(text.contains("decoys=[0.05,0.2]"));
    assert!(text.contains(" s=0.02"));
    assert_eq!(text.lines().filter(|l| l.starts_with("custom,")).count(), 2);

    std::fs::write(&cfg, "[channel]\ntheta = 2.0\n").unwrap();
    let out = run_in(&out_dir, &["run", "--params-file", cfg.to_str().unwrap(), "--scenario", "k2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_datasets_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["paper-figures", "--l-step", "125"]);
    assert!(out.status.success());
    for name in [
        "fig1_forward_pd_zero/fig1_forward_pd_zero.csv",
        "fig2_forward_pd_equals_p0/fig2_forward_pd_equals_p0.csv",
        "fig3_reverse_pd_equals_p0/fig3_reverse_pd_equals_p0.csv",
        "fig4_optimal_mu_reverse_pd_equals_p0.csv",
        "distances_forward_pd_zero.csv",
        "distances_forward_pd_equals_p0.csv",
        "distances_reverse_pd_equals_p0.csv",
    ] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let table = std::fs::read_to_string(dir.path().join("distances_forward_pd_zero.csv")).unwrap();
    assert_eq!(table.lines().count(), 7);
    assert!(table.lines().any(|l| l.starts_with("k3-ma,")));
    let table = std::fs::read_to_string(dir.path().join("distances_reverse_pd_equals_p0.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
}
