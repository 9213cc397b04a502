//! Seeded, parallel trial runner and its report.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use boolprop::exact::distance_to_class;
use boolprop::learners::{AffineParityMembership, ParityLearner};
use boolprop::oracle::{QueryRecord, TranscriptOracle};
use boolprop::testers::{
    test_fourier_degree, test_k_junta, test_sparse_poly, test_sparse_poly_deg, theorem_tester, JuntaRoute, TheoremRoute,
};
use boolprop::{ExplicitFunction, FunctionOracle, Oracle, Probability, Stage, TesterConfig, Verdict};
use rayon::prelude::*;
use serde::Serialize;
use statrs::statistics::{Data, Distribution, Max, Min, OrderStatistics};

use crate::instance::{generate_instance, to_f64, ClassSpec, InstanceKind, InstanceSpec};
use crate::{derive_seed, BenchError};

/// Where the trial functions come from.
#[derive(Clone, Debug)]
pub enum Instances {
    /// A fresh in-class sample per trial.
    InClass,
    /// A fresh certified far instance per trial, at distance at least
    /// `gamma`, or at least ε when `gamma` is `None`.
    Far { gamma: Option<f64> },
    /// The same function in every trial, with its distance certificate
    /// when it is used as a far instance.
    Given { function: ExplicitFunction, distance: Option<Probability> },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub class: ClassSpec,
    pub n: usize,
    pub instances: Instances,
    pub trials: u64,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub eta: f64,
    pub junta_route: JuntaRoute,
    /// Directory receiving one JSON-lines query transcript per trial.
    pub transcripts: Option<PathBuf>,
    /// CSV report path; the JSON summary goes next to it.
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(class: ClassSpec, n: usize, eps_grid: Vec<f64>) -> Self {
        Self {
            class,
            n,
            instances: Instances::InClass,
            trials: 100,
            seed: 0,
            eps_grid,
            eta: TesterConfig::default().eta,
            junta_route: JuntaRoute::default(),
            transcripts: None,
            out: None,
        }
    }

    fn kind_label(&self) -> &'static str {
        match self.instances {
            Instances::InClass => "in-class",
            Instances::Far { .. } => "far",
            Instances::Given { distance: Some(_), .. } => "far",
            Instances::Given { .. } => "given",
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.eps_grid.is_empty() {
            return Err(BenchError::Config("empty eps grid".into()));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(BenchError::Config(format!("eps {e} outside (0, 1)")));
        }
        if let Instances::Far { gamma: Some(g) } = self.instances {
            if let Some(e) = self.eps_grid.iter().find(|e| **e > g) {
                return Err(BenchError::Config(format!("far margin {g} is below eps {e}")));
            }
        }
        if let Instances::Given { function, distance } = &self.instances {
            if function.arity() != self.n {
                return Err(BenchError::Config(format!("input has n={} but n={}", function.arity(), self.n)));
            }
            if let Some(d) = distance {
                if let Some(e) = self.eps_grid.iter().find(|e| to_f64(*d) < **e) {
                    return Err(BenchError::Config(format!("input is only {d}-far, below eps {e}")));
                }
            }
        }
        TesterConfig { eta: self.eta, seed: 0, junta_route: self.junta_route }.validate()?;
        Ok(())
    }
}

/// Runs the tester for `class` on `f`.
pub fn run_tester(class: ClassSpec, f: &dyn Oracle, eps: f64, cfg: &TesterConfig) -> boolprop::Result<Verdict> {
    match class {
        ClassSpec::Junta { k } => test_k_junta(f, k, eps, cfg),
        ClassSpec::FourierDegree { d } => test_fourier_degree(f, d, eps, cfg),
        ClassSpec::SparsePolyDeg { s, d } => test_sparse_poly_deg(f, s, d, eps, cfg),
        ClassSpec::SparsePoly { s } => test_sparse_poly(f, s, eps, cfg),
        ClassSpec::Parity { k } => theorem_tester(
            f,
            k,
            Arc::new(ParityLearner),
            &AffineParityMembership { k },
            TheoremRoute::ExactLearner,
            eps,
            cfg,
        ),
    }
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub eps_index: usize,
    pub trial: u64,
    pub verdict: Verdict,
    pub distance: Option<Probability>,
}

/// One row per ε of the grid.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub tester: String,
    pub instances: String,
    pub n: usize,
    pub eps: f64,
    pub trials: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub accept_rate: f64,
    pub reject_rate: f64,
    pub queries_min: f64,
    pub queries_q1: f64,
    pub queries_median: f64,
    pub queries_q3: f64,
    pub queries_max: f64,
    pub queries_mean: f64,
    /// Mean queries per stage, over every stage.
    pub stage_means: BTreeMap<String, f64>,
    /// Rejections by the stage that decided them.
    pub reject_stages: BTreeMap<String, u64>,
    /// Smallest certified distance among far instances.
    pub min_distance: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatsReport {
    pub tester: String,
    pub seed: u64,
    pub eta: f64,
    pub rows: Vec<Row>,
    /// Not serialized, so that reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_seconds: f64,
    #[serde(skip)]
    pub outcomes: Vec<TrialOutcome>,
}

const CSV_HEAD: [&str; 15] = [
    "tester",
    "instances",
    "n",
    "eps",
    "trials",
    "accepted",
    "rejected",
    "accept_rate",
    "reject_rate",
    "q_min",
    "q_q1",
    "q_median",
    "q_q3",
    "q_max",
    "q_mean",
];

impl StatsReport {
    pub fn write_csv(&self, w: impl Write) -> Result<(), BenchError> {
        let mut out = csv::Writer::from_writer(w);
        let mut head: Vec<String> = CSV_HEAD.iter().map(|s| s.to_string()).collect();
        head.extend(Stage::ALL.iter().map(|s| format!("mean_{}", s.as_str())));
        head.extend(Stage::ALL.iter().map(|s| format!("rejects_{}", s.as_str())));
        head.push("min_distance".into());
        out.write_record(&head)?;
        for r in &self.rows {
            let mut rec = vec![
                r.tester.clone(),
                r.instances.clone(),
                r.n.to_string(),
                r.eps.to_string(),
                r.trials.to_string(),
                r.accepted.to_string(),
                r.rejected.to_string(),
                r.accept_rate.to_string(),
                r.reject_rate.to_string(),
                r.queries_min.to_string(),
                r.queries_q1.to_string(),
                r.queries_median.to_string(),
                r.queries_q3.to_string(),
                r.queries_max.to_string(),
                r.queries_mean.to_string(),
            ];
            rec.extend(Stage::ALL.iter().map(|s| r.stage_means[s.as_str()].to_string()));
            rec.extend(Stage::ALL.iter().map(|s| r.reject_stages[s.as_str()].to_string()));
            rec.push(r.min_distance.clone().unwrap_or_default());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, BenchError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Writes the CSV to `path` and the JSON summary to `path` with a
    /// `.json` extension.
    pub fn write_files(&self, path: &Path) -> Result<PathBuf, BenchError> {
        self.write_csv(BufWriter::new(fs::File::create(path)?))?;
        let json = path.with_extension("json");
        fs::write(&json, self.to_json()?)?;
        Ok(json)
    }
}

#[derive(Serialize)]
struct TranscriptLine<'a> {
    stage: Option<&'a str>,
    x: String,
    answer: bool,
}

/// File name for a trial's transcript.
pub fn transcript_name(eps_index: usize, trial: u64) -> String {
    format!("eps{eps_index}-trial{trial:06}.jsonl")
}

fn write_transcript(path: &Path, records: &[QueryRecord]) -> Result<(), BenchError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for r in records {
        let line = TranscriptLine { stage: r.stage.map(Stage::as_str), x: r.point.to_hex(), answer: r.answer };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn run_trial(cfg: &ExperimentConfig, eps_index: usize, trial: u64) -> Result<TrialOutcome, BenchError> {
    let eps = cfg.eps_grid[eps_index];
    let (function, distance) = match &cfg.instances {
        Instances::Given { function, distance } => (function.clone(), *distance),
        Instances::InClass => {
            let spec = InstanceSpec { class: cfg.class, n: cfg.n, kind: InstanceKind::InClass };
            let inst = generate_instance(&spec, derive_seed(cfg.seed, &[0, trial]))?;
            (inst.function, None)
        }
        Instances::Far { gamma } => {
            let spec =
                InstanceSpec { class: cfg.class, n: cfg.n, kind: InstanceKind::Far { gamma: gamma.unwrap_or(eps) } };
            let inst = generate_instance(&spec, derive_seed(cfg.seed, &[0, trial]))?;
            (inst.function, inst.distance)
        }
    };
    let tester = TesterConfig {
        eta: cfg.eta,
        seed: derive_seed(cfg.seed, &[1, eps_index as u64, trial]),
        junta_route: cfg.junta_route,
    };
    let verdict = match &cfg.transcripts {
        Some(dir) => {
            let oracle = TranscriptOracle::new(FunctionOracle::new(function));
            let verdict = run_tester(cfg.class, &oracle, eps, &tester)?;
            write_transcript(&dir.join(transcript_name(eps_index, trial)), &oracle.into_records())?;
            verdict
        }
        None => run_tester(cfg.class, &FunctionOracle::new(function), eps, &tester)?,
    };
    Ok(TrialOutcome { eps_index, trial, verdict, distance })
}

fn summarize(cfg: &ExperimentConfig, eps: f64, outcomes: &[TrialOutcome]) -> Row {
    let trials = outcomes.len() as u64;
    let accepted = outcomes.iter().filter(|o| o.verdict.accepted()).count() as u64;
    let mut q = Data::new(outcomes.iter().map(|o| o.verdict.queries_used as f64).collect::<Vec<_>>());
    let stage_means = Stage::ALL
        .iter()
        .map(|&s| {
            let total: u64 = outcomes.iter().map(|o| o.verdict.stage(s)).sum();
            (s.as_str().to_string(), total as f64 / trials as f64)
        })
        .collect();
    let reject_stages = Stage::ALL
        .iter()
        .map(|&s| {
            let c = outcomes.iter().filter(|o| o.verdict.reject_stage == Some(s)).count() as u64;
            (s.as_str().to_string(), c)
        })
        .collect();
    Row {
        tester: cfg.class.to_string(),
        instances: cfg.kind_label().into(),
        n: cfg.n,
        eps,
        trials,
        accepted,
        rejected: trials - accepted,
        accept_rate: accepted as f64 / trials as f64,
        reject_rate: (trials - accepted) as f64 / trials as f64,
        queries_min: q.min(),
        queries_q1: q.lower_quartile(),
        queries_median: q.median(),
        queries_q3: q.upper_quartile(),
        queries_max: q.max(),
        queries_mean: q.mean().unwrap_or(0.0),
        stage_means,
        reject_stages,
        min_distance: outcomes.iter().filter_map(|o| o.distance).min().map(|d| d.to_string()),
    }
}

/// Runs every (ε, trial) pair in parallel and folds the outcomes in
/// (ε index, trial index) order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<StatsReport, BenchError> {
    cfg.validate()?;
    let start = Instant::now();
    if let Some(dir) = &cfg.transcripts {
        fs::create_dir_all(dir)?;
    }
    let jobs: Vec<(usize, u64)> = (0..cfg.eps_grid.len()).flat_map(|e| (0..cfg.trials).map(move |t| (e, t))).collect();
    let outcomes = jobs.par_iter().map(|&(e, t)| run_trial(cfg, e, t)).collect::<Result<Vec<_>, _>>()?;
    let rows = if cfg.trials == 0 {
        Vec::new()
    } else {
        cfg.eps_grid
            .iter()
            .enumerate()
            .map(|(e, &eps)| {
                let of_eps: Vec<TrialOutcome> = outcomes.iter().filter(|o| o.eps_index == e).cloned().collect();
                summarize(cfg, eps, &of_eps)
            })
            .collect()
    };
    Ok(StatsReport {
        tester: cfg.class.to_string(),
        seed: cfg.seed,
        eta: cfg.eta,
        rows,
        wall_seconds: start.elapsed().as_secs_f64(),
        outcomes,
    })
}

/// Checks that a given function is at least `eps`-far from `class`, for
/// far experiments on a fixed input.
pub fn certify_given(class: ClassSpec, f: &ExplicitFunction, eps: f64) -> Result<Probability, BenchError> {
    let d = distance_to_class(f, class.enumerator().as_ref())?;
    if to_f64(d) < eps {
        return Err(BenchError::Config(format!("input is only {d}-far from {class}, below eps {eps}")));
    }
    Ok(d)
}
