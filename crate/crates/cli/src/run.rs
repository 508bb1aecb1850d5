use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qnoise::channels::{
    correlated_table, kl_divergence, kl_divergence_dist, metrology_choi_fidelity, pauli_avg_fidelity,
    pauli_choi_fidelity, CorrelationModel, PauliIndex,
};
use qnoise::game::{generator_table, train, GeneratorMode, TrainingLog};
use qnoise::metrology::{gram_eigenvalues, is_identifiable, run_metrology_game, MetrologyConfig};
use qnoise::{GeneratorMode64, ProbTable64};
use serde::Serialize;

use crate::config::{game_config, ExperimentConfig, GeneratorKind, Preset};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error("{label} repetition {repetition} diverged at turn {turn}; partial log kept in {}", path.display())]
    Diverged {
        label: String,
        repetition: usize,
        turn: usize,
        path: PathBuf,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Diverged { .. } => 2,
            Self::Io { .. } => 3,
        }
    }
}

impl From<qnoise::Error> for RunError {
    fn from(e: qnoise::Error) -> Self {
        Self::Config(e.to_string())
    }
}

/// One line of `summary.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummaryRow {
    Run {
        label: String,
        repetition: usize,
        seed: u64,
        turns: usize,
        converged_turn: Option<usize>,
        final_kl: f64,
        final_avg_fidelity: f64,
        final_choi_fidelity: f64,
    },
    MuSweep {
        mu: f64,
        runs: usize,
        median_kl: f64,
        mean_kl: f64,
    },
    NSweep {
        n: usize,
        runs: usize,
        /// Runs that never reached the threshold count as `max_turns`.
        median_turns: f64,
        unconverged: usize,
        turns: Vec<Option<usize>>,
    },
    Table {
        m: usize,
        n: usize,
        runs: usize,
        mean_kl: f64,
        std_err: f64,
    },
    Gram {
        m: usize,
        n: usize,
        eigenvalues: Vec<f64>,
        min_eigenvalue: f64,
        identifiable: bool,
        verdict: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Group {
    Single,
    Mu(f64),
    N(usize),
    Table { m: usize, n: usize },
}

enum JobKind {
    Pauli {
        target: ProbTable64,
        mode: GeneratorMode64,
    },
    Phase(MetrologyConfig),
}

struct Job {
    label: String,
    group: Group,
    n: usize,
    kind: JobKind,
}

struct Finished {
    group: Group,
    converged_turn: Option<usize>,
    max_turns: usize,
    final_kl: f64,
}

#[derive(Serialize)]
struct Dump<'a> {
    labels: Vec<String>,
    target: &'a [f64],
    learnt: &'a [f64],
}

/// Runs every repetition of `cfg`, writing into `cfg.output_dir`:
/// `metrics_<label>_rep<i>.jsonl`, `learnt_<label>_rep<i>.json`,
/// `summary.jsonl` and the resolved `config.toml`.
///
/// `on_row` sees each summary row as soon as it is known.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    mut on_row: impl FnMut(&SummaryRow),
) -> Result<Vec<SummaryRow>, RunError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    write_file(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;

    let mut rows = Vec::new();
    if cfg.preset == Preset::GramAnalysis {
        let sweep = cfg.sweep.as_ref().expect("resolved sweep");
        let m = sweep.m.expect("resolved m");
        for &n in sweep.n.as_deref().unwrap_or_default() {
            let row = gram_row(m, n)?;
            on_row(&row);
            rows.push(row);
        }
    } else {
        let mut finished = Vec::new();
        for job in jobs(cfg)? {
            for rep in 0..cfg.repetitions {
                let (row, done) = run_one(cfg, &job, rep)?;
                on_row(&row);
                rows.push(row);
                finished.push(done);
            }
        }
        for row in aggregate(&finished) {
            on_row(&row);
            rows.push(row);
        }
    }

    let mut text = Vec::new();
    for row in &rows {
        serde_json::to_writer(&mut text, row).expect("row serializes");
        text.push(b'\n');
    }
    write_file(&dir.join("summary.jsonl"), &text)?;
    Ok(rows)
}

fn gram_row(m: usize, n: usize) -> Result<SummaryRow, RunError> {
    let eigenvalues = gram_eigenvalues(m, n)?;
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let identifiable = is_identifiable(m, n);
    Ok(SummaryRow::Gram {
        m,
        n,
        eigenvalues,
        min_eigenvalue,
        identifiable,
        verdict: if identifiable { "identifiable" } else { "not identifiable" }.into(),
    })
}

fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>, RunError> {
    let target = cfg.target.as_ref().expect("resolved target");
    let sweep = cfg.sweep.as_ref();
    let kind = cfg.generator.expect("resolved generator");
    let prior = || -> Result<ProbTable64, RunError> {
        Ok(ProbTable64::from_f64(1, target.prior.as_deref().expect("resolved prior"))?)
    };
    let mode = |kind: GeneratorKind| -> Result<GeneratorMode64, RunError> {
        Ok(match kind {
            GeneratorKind::Full => GeneratorMode::FullSoftmax,
            GeneratorKind::Factorized => GeneratorMode::FactorizedSoftmax,
            GeneratorKind::MuOnly => GeneratorMode::MuOnly { prior: prior()? },
        })
    };
    let table = |n: usize, mu: f64| -> Result<ProbTable64, RunError> {
        Ok(correlated_table(&CorrelationModel::new(prior()?, mu)?, n)?)
    };
    let single = |n: usize| -> Result<Job, RunError> {
        let target = match (&target.probs, target.mu) {
            (Some(p), _) => ProbTable64::from_f64(n, p)?,
            (None, Some(mu)) => table(n, mu)?,
            (None, None) => prior()?,
        };
        Ok(Job {
            label: "main".into(),
            group: Group::Single,
            n,
            kind: JobKind::Pauli {
                target,
                mode: mode(kind)?,
            },
        })
    };

    Ok(match cfg.preset {
        Preset::Spatial1Use => vec![single(1)?],
        Preset::Spatial2UseCorrelated | Preset::Temporal2Use => vec![single(2)?],
        Preset::SpatialMuSweep => sweep
            .and_then(|s| s.mu.as_deref())
            .unwrap_or_default()
            .iter()
            .map(|&mu| {
                Ok(Job {
                    label: format!("mu{mu}"),
                    group: Group::Mu(mu),
                    n: 2,
                    kind: JobKind::Pauli {
                        target: table(2, mu)?,
                        mode: mode(kind)?,
                    },
                })
            })
            .collect::<Result<_, RunError>>()?,
        Preset::TemporalMuOnlyNSweep => {
            let mu = target.mu.expect("resolved mu");
            sweep
                .and_then(|s| s.n.as_deref())
                .unwrap_or_default()
                .iter()
                .map(|&n| {
                    Ok(Job {
                        label: format!("n{n}"),
                        group: Group::N(n),
                        n,
                        kind: JobKind::Pauli {
                            target: table(n, mu)?,
                            mode: mode(kind)?,
                        },
                    })
                })
                .collect::<Result<_, RunError>>()?
        }
        Preset::MetrologyTable => {
            let s = sweep.expect("resolved sweep");
            let m = s.m.expect("resolved m");
            s.n.as_deref()
                .unwrap_or_default()
                .iter()
                .map(|&n| Job {
                    label: format!("m{m}_n{n}"),
                    group: Group::Table { m, n },
                    n,
                    kind: JobKind::Phase(MetrologyConfig {
                        m,
                        n,
                        target_dist: target.phase.clone().expect("resolved phase"),
                    }),
                })
                .collect()
        }
        Preset::GramAnalysis => unreachable!("no training"),
    })
}

fn run_one(cfg: &ExperimentConfig, job: &Job, rep: usize) -> Result<(SummaryRow, Finished), RunError> {
    let overrides = cfg.game.as_ref().expect("resolved game");
    let seed = cfg.seed.wrapping_add(rep as u64);
    let game = game_config(cfg.preset, overrides, job.n, seed);
    let stem = format!("{}_rep{rep}", job.label);
    let metrics_path = cfg.output_dir.join(format!("metrics_{stem}.jsonl"));

    let diverged = |e: qnoise::Error| -> RunError {
        match e {
            qnoise::Error::Diverged { turn, log } => match write_metrics(&metrics_path, &log) {
                Ok(()) => RunError::Diverged {
                    label: job.label.clone(),
                    repetition: rep,
                    turn,
                    path: metrics_path.clone(),
                },
                Err(io) => io,
            },
            other => other.into(),
        }
    };

    let (log, converged_turn, labels, target, learnt, kl, avg, choi) = match &job.kind {
        JobKind::Pauli { target, mode } => {
            let out = train(target, mode, &game).map_err(diverged)?;
            let learnt = generator_table(&out.generator, job.n)?;
            let labels = (0..target.probs().len())
                .map(|i| PauliIndex::from_flat(job.n, i).to_string())
                .collect();
            (
                out.log,
                out.converged_turn,
                labels,
                target.to_f64_vec(),
                learnt.to_f64_vec(),
                kl_divergence(target, &learnt)?,
                pauli_avg_fidelity(target, &learnt)?,
                pauli_choi_fidelity(target, &learnt)?,
            )
        }
        JobKind::Phase(mc) => {
            let out = run_metrology_game::<f64>(mc, &game).map_err(diverged)?;
            let bins = mc.target_dist.len();
            let labels = (0..bins).map(|b| format!("{b}/{bins}")).collect();
            (
                out.log,
                out.converged_turn,
                labels,
                mc.target_dist.clone(),
                out.learnt.clone(),
                kl_divergence_dist(&mc.target_dist, &out.learnt)?,
                // Diagonal channels agree on every computational basis input.
                1.0,
                metrology_choi_fidelity(&mc.target_dist, &out.learnt, mc.n)?,
            )
        }
    };

    write_metrics(&metrics_path, &log)?;
    let dump = Dump {
        labels,
        target: &target,
        learnt: &learnt,
    };
    let text = serde_json::to_vec_pretty(&dump).expect("dump serializes");
    write_file(&cfg.output_dir.join(format!("learnt_{stem}.json")), &text)?;

    let row = SummaryRow::Run {
        label: job.label.clone(),
        repetition: rep,
        seed,
        turns: log.len(),
        converged_turn,
        final_kl: kl,
        final_avg_fidelity: avg,
        final_choi_fidelity: choi,
    };
    let done = Finished {
        group: job.group,
        converged_turn,
        max_turns: game.max_turns,
        final_kl: kl,
    };
    Ok((row, done))
}

fn aggregate(finished: &[Finished]) -> Vec<SummaryRow> {
    let mut groups: Vec<Group> = Vec::new();
    for f in finished {
        if !groups.contains(&f.group) {
            groups.push(f.group);
        }
    }
    groups
        .into_iter()
        .filter_map(|g| {
            let runs: Vec<&Finished> = finished.iter().filter(|f| f.group == g).collect();
            let kls: Vec<f64> = runs.iter().map(|f| f.final_kl).collect();
            match g {
                Group::Single => None,
                Group::Mu(mu) => Some(SummaryRow::MuSweep {
                    mu,
                    runs: runs.len(),
                    median_kl: median(&kls),
                    mean_kl: mean(&kls),
                }),
                Group::N(n) => {
                    let censored: Vec<f64> = runs
                        .iter()
                        .map(|f| f.converged_turn.unwrap_or(f.max_turns) as f64)
                        .collect();
                    Some(SummaryRow::NSweep {
                        n,
                        runs: runs.len(),
                        median_turns: median(&censored),
                        unconverged: runs.iter().filter(|f| f.converged_turn.is_none()).count(),
                        turns: runs.iter().map(|f| f.converged_turn).collect(),
                    })
                }
                Group::Table { m, n } => Some(SummaryRow::Table {
                    m,
                    n,
                    runs: runs.len(),
                    mean_kl: mean(&kls),
                    std_err: std_err(&kls),
                }),
            }
        })
        .collect()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    match k {
        0 => f64::NAN,
        _ if k % 2 == 1 => v[k / 2],
        _ => 0.5 * (v[k / 2 - 1] + v[k / 2]),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean; zero for a single sample.
pub fn std_err(xs: &[f64]) -> f64 {
    let k = xs.len();
    if k < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (k - 1) as f64;
    (var / k as f64).sqrt()
}

fn write_metrics(path: &Path, log: &TrainingLog) -> Result<(), RunError> {
    let mut text = Vec::new();
    for r in log.records() {
        serde_json::to_writer(&mut text, r).expect("record serializes");
        text.push(b'\n');
    }
    write_file(path, &text)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(bytes).map_err(io)?;
    w.flush().map_err(io)
}
