use std::fs;
use std::path::Path;

use qnoise_cli::{parse_config_as, run_experiment, ExperimentConfig, Preset, RunError, SummaryRow};
use serde_json::Value;

fn config(preset: Preset, doc: &str, dir: &Path) -> ExperimentConfig {
    let mut cfg = parse_config_as(doc, Some(preset)).unwrap();
    cfg.output_dir = dir.to_path_buf();
    cfg
}

fn lines(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn gram_report_flags_a_zero_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Preset::GramAnalysis, "[sweep]\nm = 2\nn = [1]\n", dir.path());
    let rows = run_experiment(&cfg, |_| {}).unwrap();
    assert_eq!(rows.len(), 1);
    let SummaryRow::Gram {
        eigenvalues,
        min_eigenvalue,
        verdict,
        ..
    } = &rows[0]
    else {
        panic!("{rows:?}")
    };
    assert_eq!(eigenvalues, &[2.0, 1.0, 0.0, 1.0]);
    assert_eq!(*min_eigenvalue, 0.0);
    assert_eq!(verdict, "not identifiable");
    let summary = lines(&dir.path().join("summary.jsonl"));
    assert_eq!(summary[0]["verdict"], "not identifiable");
    assert_eq!(summary[0]["kind"], "gram");
}

#[test]
fn metric_files_hold_one_increasing_record_per_turn() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Preset::Spatial1Use, "repetitions = 2\n[game]\nmax_turns = 12\n", dir.path());
    let rows = run_experiment(&cfg, |_| {}).unwrap();
    assert_eq!(rows.len(), 2);
    for rep in 0..2 {
        let records = lines(&dir.path().join(format!("metrics_main_rep{rep}.jsonl")));
        assert_eq!(records.len(), 12);
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r["turn"].as_u64(), Some(i as u64 + 1));
            for key in ["score", "gen_objective", "kl", "avg_fidelity"] {
                assert!(r[key].as_f64().unwrap().is_finite(), "{key}");
            }
        }
        let dump: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("learnt_main_rep{rep}.json"))).unwrap())
                .unwrap();
        for key in ["target", "learnt"] {
            let v: Vec<f64> = serde_json::from_value(dump[key].clone()).unwrap();
            assert_eq!(v.len(), 4);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        assert_eq!(dump["labels"][2], "Y");
    }
    let SummaryRow::Run { seed, .. } = &rows[1] else { panic!() };
    assert_eq!(*seed, 1);
}

#[test]
fn mu_sweep_summarizes_every_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Preset::SpatialMuSweep, "[game]\nmax_turns = 2\n", dir.path());
    let rows = run_experiment(&cfg, |_| {}).unwrap();
    let mus: Vec<f64> = rows
        .iter()
        .filter_map(|r| match r {
            SummaryRow::MuSweep { mu, runs, .. } => {
                assert_eq!(*runs, 1);
                Some(*mu)
            }
            _ => None,
        })
        .collect();
    assert_eq!(mus, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(lines(&dir.path().join("summary.jsonl")).len(), 10);
}

#[test]
fn sweeps_over_uses_and_probes_report_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        Preset::TemporalMuOnlyNSweep,
        "[sweep]\nn = [2, 3]\n[game]\nmax_turns = 3\n",
        dir.path(),
    );
    let rows = run_experiment(&cfg, |_| {}).unwrap();
    let ns: Vec<usize> = rows
        .iter()
        .filter_map(|r| match r {
            SummaryRow::NSweep { n, turns, .. } => {
                assert_eq!(turns.len(), 1);
                Some(*n)
            }
            _ => None,
        })
        .collect();
    assert_eq!(ns, vec![2, 3]);

    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Preset::MetrologyTable, "repetitions = 2\n[game]\nmax_turns = 3\n", dir.path());
    let rows = run_experiment(&cfg, |_| {}).unwrap();
    let table: Vec<(usize, usize)> = rows
        .iter()
        .filter_map(|r| match r {
            SummaryRow::Table { m, n, runs, std_err, .. } => {
                assert_eq!(*runs, 2);
                assert!(*std_err >= 0.0);
                Some((*m, *n))
            }
            _ => None,
        })
        .collect();
    assert_eq!(table, vec![(2, 1), (2, 2)]);
    assert!(dir.path().join("metrics_m2_n2_rep1.jsonl").exists());
}

#[test]
fn same_seed_gives_identical_metric_files() {
    for (preset, doc) in [
        (Preset::Spatial2UseCorrelated, "seed = 11\n[game]\nmax_turns = 6\n"),
        (Preset::Temporal2Use, "seed = 4\nrepetitions = 2\n[game]\nmax_turns = 6\n"),
        (Preset::MetrologyTable, "[game]\nmax_turns = 6\n"),
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_experiment(&config(preset, doc, a.path()), |_| {}).unwrap();
        run_experiment(&config(preset, doc, b.path()), |_| {}).unwrap();
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n.to_string_lossy().starts_with("metrics_"))
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let x = fs::read(a.path().join(&name)).unwrap();
            let y = fs::read(b.path().join(&name)).unwrap();
            assert!(!x.is_empty());
            assert_eq!(x, y, "{preset} {name:?}");
        }
    }
}

#[test]
fn different_seeds_give_different_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&config(Preset::Spatial1Use, "seed = 1\n[game]\nmax_turns = 3\n", a.path()), |_| {}).unwrap();
    run_experiment(&config(Preset::Spatial1Use, "seed = 2\n[game]\nmax_turns = 3\n", b.path()), |_| {}).unwrap();
    let x = fs::read(a.path().join("metrics_main_rep0.jsonl")).unwrap();
    let y = fs::read(b.path().join("metrics_main_rep0.jsonl")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let cfg = config(Preset::GramAnalysis, "", &blocker.join("sub"));
    let err = run_experiment(&cfg, |_| {}).unwrap_err();
    assert!(matches!(err, RunError::Io { .. }));
    assert_eq!(err.exit_code(), 3);
}
