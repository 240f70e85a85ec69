use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use civiscope::model::Dimension;
use civiscope::pipeline::{run, Command, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Ingest,
    Influencers,
    SelectCandidates,
    Train,
    Classify,
    Dynamics,
    Audience,
    Flow,
    Synth,
    Report,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Ingest => Command::Ingest,
            Sub::Influencers => Command::Influencers,
            Sub::SelectCandidates => Command::SelectCandidates,
            Sub::Train => Command::Train,
            Sub::Classify => Command::Classify,
            Sub::Dynamics => Command::Dynamics,
            Sub::Audience => Command::Audience,
            Sub::Flow => Command::Flow,
            Sub::Synth => Command::Synth,
            Sub::Report => Command::Report,
        }
    }
}

/// Incivility dynamics, audiences and information-flow motifs.
#[derive(Debug, Parser)]
#[command(name = "civiscope", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed (also reseeds `synth`).
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to one dimension.
    #[arg(long, value_parser = parse_dimension)]
    dimension: Option<Dimension>,
    /// Mask account handles and ids in every artifact.
    #[arg(long)]
    mask_handles: bool,
}

fn parse_dimension(s: &str) -> Result<Dimension, String> {
    s.parse().map_err(|e: civiscope::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        dimension: cli.dimension,
        mask_handles: cli.mask_handles,
    };
    match run(cli.command.into(), cli.config.as_deref(), overrides) {
        Ok(outcome) => {
            for p in &outcome.artifacts {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("civiscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
