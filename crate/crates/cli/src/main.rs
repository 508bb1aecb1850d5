use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnoise_cli::{parse_config_as, run_experiment, Preset, SummaryRow};

#[derive(Parser)]
#[command(name = "qnoise", version, about = "Adversarial learning of correlated Pauli and phase noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One use of a Pauli channel.
    #[command(name = "spatial-1use")]
    Spatial1Use(Common),
    /// Two parallel uses of a correlated Pauli channel.
    #[command(name = "spatial-2use-correlated")]
    Spatial2UseCorrelated(Common),
    /// Final KL across correlation strengths, factorized generator by default.
    SpatialMuSweep(Common),
    /// Two sequential uses probed by a comb.
    #[command(name = "temporal-2use")]
    Temporal2Use(Common),
    /// Turns to threshold of the μ-only generator across the number of uses.
    TemporalMuOnlyNSweep(Common),
    /// Final KL of the phase-distribution game per probe count.
    MetrologyTable(Common),
    /// Gram spectrum and identifiability of the phase channel.
    GramAnalysis(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment document.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Base seed; repetition i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Turn budget of every run.
    #[arg(long)]
    max_turns: Option<usize>,
}

impl Command {
    fn split(self) -> (Preset, Common) {
        match self {
            Self::Spatial1Use(c) => (Preset::Spatial1Use, c),
            Self::Spatial2UseCorrelated(c) => (Preset::Spatial2UseCorrelated, c),
            Self::SpatialMuSweep(c) => (Preset::SpatialMuSweep, c),
            Self::Temporal2Use(c) => (Preset::Temporal2Use, c),
            Self::TemporalMuOnlyNSweep(c) => (Preset::TemporalMuOnlyNSweep, c),
            Self::MetrologyTable(c) => (Preset::MetrologyTable, c),
            Self::GramAnalysis(c) => (Preset::GramAnalysis, c),
        }
    }
}

fn main() -> ExitCode {
    let (preset, args) = Cli::parse().command.split();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(3);
            }
        },
        None => String::new(),
    };
    let mut cfg = match parse_config_as(&text, Some(preset)) {
        Ok(c) => c,
        Err(e) => {
            let file = args.config.as_deref().map_or("<defaults>".into(), |p| p.display().to_string());
            eprintln!("error: {file}: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(dir) = args.out {
        cfg.output_dir = dir;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(turns) = args.max_turns {
        if turns == 0 {
            eprintln!("error: --max-turns must be at least 1");
            return ExitCode::from(1);
        }
        cfg.set_max_turns(turns);
    }

    let result = run_experiment(&cfg, |row| match row {
        SummaryRow::Run {
            label,
            repetition,
            turns,
            final_kl,
            final_choi_fidelity,
            ..
        } => eprintln!(
            "{label} rep {repetition}: {turns} turns, KL {final_kl:.3e}, Choi fidelity {final_choi_fidelity:.6}"
        ),
        other => println!("{}", serde_json::to_string(other).expect("row serializes")),
    });
    match result {
        Ok(_) => {
            eprintln!("results in {}", cfg.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
