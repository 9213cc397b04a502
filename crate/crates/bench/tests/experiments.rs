use std::fs;
use std::path::Path;
use std::process::Command;

use boolprop_bench::experiment::Instances;
use boolprop_bench::instance::to_f64;
use boolprop_bench::{run_experiment, ClassSpec, ExperimentConfig};

fn report_bytes(cfg: &ExperimentConfig) -> (Vec<u8>, String) {
    let r = run_experiment(cfg).unwrap();
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    (csv, r.to_json().unwrap())
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = ExperimentConfig::new(ClassSpec::Junta { k: 2 }, 10, vec![0.25, 0.125]);
    cfg.trials = 8;
    cfg.seed = 42;
    cfg.instances = Instances::Far { gamma: None };
    cfg.transcripts = Some(a.path().to_path_buf());
    let first = report_bytes(&cfg);
    cfg.transcripts = Some(b.path().to_path_buf());
    let second = report_bytes(&cfg);
    assert_eq!(first, second);
    let (ta, tb) = (dir_contents(a.path()), dir_contents(b.path()));
    assert_eq!(ta.len(), 16);
    assert_eq!(ta, tb);

    cfg.seed = 43;
    cfg.transcripts = None;
    assert_ne!(report_bytes(&cfg).1, first.1);
}

#[test]
fn transcripts_match_query_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ClassSpec::FourierDegree { d: 1 }, 8, vec![0.3]);
    cfg.trials = 3;
    cfg.transcripts = Some(dir.path().to_path_buf());
    let r = run_experiment(&cfg).unwrap();
    for o in &r.outcomes {
        let name = boolprop_bench::experiment::transcript_name(o.eps_index, o.trial);
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count() as u64, o.verdict.queries_used);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["stage"], "verifier");
    }
}

#[test]
fn median_queries_grow_as_eps_shrinks() {
    let mut cfg = ExperimentConfig::new(ClassSpec::Junta { k: 2 }, 12, vec![0.2, 0.1, 0.05, 0.025]);
    cfg.trials = 20;
    cfg.seed = 5;
    let r = run_experiment(&cfg).unwrap();
    let medians: Vec<f64> = r.rows.iter().map(|row| row.queries_median).collect();
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
}

#[test]
fn far_rows_carry_certificates() {
    let mut cfg = ExperimentConfig::new(ClassSpec::SparsePolyDeg { s: 1, d: 2 }, 8, vec![0.2]);
    cfg.trials = 10;
    cfg.instances = Instances::Far { gamma: None };
    let r = run_experiment(&cfg).unwrap();
    assert!(r.outcomes.iter().all(|o| o.distance.is_some_and(|d| to_f64(d) >= 0.2)));
    assert!(r.rows[0].min_distance.is_some());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boolprop"))
}

#[test]
fn cli_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli().args(["test", "sparse-poly", "--n", "20", "--s", "7", "--trials", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cli().args(["test", "junta", "--n", "8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let f = dir.path().join("f.txt");
    let gen = cli()
        .args(["gen", "junta", "--n", "10", "--k", "1", "--far", "--eps", "0.1", "--seed", "2", "--out"])
        .arg(&f)
        .output()
        .unwrap();
    assert!(gen.status.success());
    assert!(String::from_utf8_lossy(&gen.stderr).starts_with("distance="));

    let conf = dir.path().join("run.conf");
    fs::write(&conf, "class=junta\nk=1\ntrials=5\nseed=3\neps=0.1\nfar=\n").unwrap();
    let csv = dir.path().join("report.csv");
    let run =
        cli().args(["test", "--config"]).arg(&conf).arg("--input").arg(&f).arg("--out").arg(&csv).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("junta k=1,far,10,0.1,5,"), "{text}");
    assert!(dir.path().join("report.json").exists());

    let sweep = cli()
        .args(["sweep", "junta", "--n", "8", "--k", "2", "--trials", "3", "--grid", "eps=0.3,0.2"])
        .output()
        .unwrap();
    assert!(sweep.status.success());
    assert_eq!(String::from_utf8_lossy(&sweep.stdout).lines().count(), 3);
}
