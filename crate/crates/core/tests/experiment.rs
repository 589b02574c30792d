use std::collections::BTreeSet;
use std::fs::File;

use gid_core::experiment::{
    exhaustive_weights, replay_witness, run_easy_weights, ExperimentConfig, WeightCoverageReport,
};
use gid_core::oracle::enum_coset;

fn small(q: u64, decomps: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(60, 30, q, 17);
    cfg.decompositions = decomps;
    cfg.iterations = 4;
    cfg
}

#[test]
fn witnesses_replay_to_their_weights() {
    for q in [2, 3, 5] {
        let cfg = small(q, 3);
        let out = run_easy_weights(&cfg).unwrap();
        let inst = cfg.instance().unwrap();
        let reached = out.report.reached();
        assert_eq!(
            out.witnesses
                .iter()
                .map(|w| w.weight)
                .collect::<BTreeSet<_>>(),
            reached
        );
        for w in &out.witnesses {
            let x = replay_witness(&cfg, w).unwrap();
            assert_eq!(x.weight(), w.weight);
            assert_eq!(inst.h.mul_vec(&x).unwrap(), inst.s);
            assert_eq!(
                out.report.first_reached[w.decomp][w.weight - 1],
                Some(w.iteration as u32)
            );
        }
    }
}

#[test]
fn coverage_grows_with_decompositions() {
    let one = run_easy_weights(&small(2, 1)).unwrap().report;
    let many = run_easy_weights(&small(2, 6)).unwrap().report;
    assert!(one.reached().is_subset(&many.reached()));
    assert_eq!(one.first_reached[0], many.first_reached[0]);
}

#[test]
fn worker_count_does_not_change_the_report() {
    let cfg = small(3, 4);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = serial.install(|| run_easy_weights(&cfg).unwrap());
    let b = wide.install(|| run_easy_weights(&cfg).unwrap());
    assert_eq!(a.report.first_reached, b.report.first_reached);
    assert_eq!(a.witnesses, b.witnesses);
}

#[test]
fn reports_round_trip_through_files() {
    let out = run_easy_weights(&small(2, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coverage.csv");
    out.report.write_csv(File::create(&path).unwrap()).unwrap();
    let back = WeightCoverageReport::read_csv(File::open(&path).unwrap()).unwrap();
    assert_eq!(back, out.report);
    let text = std::fs::read_to_string(&path).unwrap();
    let summary = text.lines().last().unwrap();
    let (lo, hi) = out.report.interval().unwrap();
    assert!(summary.starts_with(&format!("summary,{lo},{hi},")));
    let broken = text.replacen("decomp,iteration", "d,it", 1);
    assert!(WeightCoverageReport::read_csv(broken.as_bytes()).is_err());
}

#[test]
fn exhaustive_sweep_equals_oracle_weights() {
    for (q, seed) in [(2, 0), (2, 1), (3, 2), (5, 3)] {
        let cfg = ExperimentConfig::new(6, 3, q, seed);
        let inst = cfg.instance().unwrap();
        let oracle: BTreeSet<usize> = enum_coset(&inst.h, &inst.s)
            .unwrap()
            .solutions
            .iter()
            .map(|x| x.weight())
            .collect();
        assert_eq!(exhaustive_weights(&cfg).unwrap(), oracle);
    }
}
