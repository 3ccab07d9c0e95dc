mod support;

use std::fs;

use l1sudoku::bench::{load_dataset, render_report, run_batch, BatchOptions, ReportFormat};
use l1sudoku::strategy::StrategyOptions;
use l1sudoku::{Error, Formulation, ModelConfig};

#[test]
fn load_errors_carry_location() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    assert!(matches!(load_dataset(&missing), Err(Error::FileNotFound(p)) if p == missing));

    let path = dir.path().join("bad.txt");
    let good = "000000001000000020000003000000040500006000300007810000010020004030000070950000000";
    fs::write(&path, format!("# header\n{good}\n\n{}\n", &good[..80])).unwrap();
    match load_dataset(&path) {
        Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    fs::write(&path, format!("{good}\n# c\n{good}\n")).unwrap();
    let entries = load_dataset(&path).unwrap();
    assert_eq!(entries.iter().map(|e| e.line_number).collect::<Vec<_>>(), vec![1, 3]);
}

#[test]
fn batches_are_reproducible_and_worker_independent() {
    let entries = load_dataset(&support::dataset_path()).unwrap();
    let cfg = ModelConfig::p1(Formulation::Lp2, false);
    let opts = BatchOptions {
        sample_size: Some(10),
        seed: 5,
        workers: 1,
        strategy: StrategyOptions::full(),
    };
    let a = run_batch(&entries, &cfg, &opts).unwrap();
    let b = run_batch(&entries, &cfg, &opts).unwrap();
    let json = |r: &l1sudoku::bench::BatchReport| render_report(&r.without_timing(), ReportFormat::Json).unwrap();
    assert_eq!(json(&a), json(&b));

    let c = run_batch(&entries, &cfg, &BatchOptions { workers: 3, ..opts }).unwrap();
    assert_eq!(
        (a.first_solving, a.step1, a.step2, a.step3, a.solved_total),
        (c.first_solving, c.step1, c.step2, c.step3, c.solved_total)
    );
    let stages = |r: &l1sudoku::bench::BatchReport| r.per_puzzle.iter().map(|p| (p.line_number, p.stage)).collect::<Vec<_>>();
    assert_eq!(stages(&a), stages(&c));
    assert_eq!(a.unverified(), 0);
    assert!(a.solved_total <= a.total && a.total == 10);
}
