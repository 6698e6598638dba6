use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use graphcode::generators::GenSpec;
use graphcode::graph::{save_graph, GraphFormat};
use graphcode::partition::{CoderId, Mode};
use graphcode_cli::*;

#[derive(Parser)]
#[command(name = "graphcode", version, about = "Structure coding of graphs and atypicality scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoderArg {
    LabeledIid,
    StructIid,
    Degree,
    Triangle,
}

impl From<CoderArg> for CoderId {
    fn from(c: CoderArg) -> Self {
        match c {
            CoderArg::LabeledIid => CoderId::LabeledIid,
            CoderArg::StructIid => CoderId::StructIid,
            CoderArg::Degree => CoderId::StructDegree,
            CoderArg::Triangle => CoderId::StructTriangle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Learned,
    Universal,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Edgelist,
    Mtx,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Edgelist => GraphFormat::EdgeList,
            FormatArg::Mtx => GraphFormat::MatrixMarket,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate random graphs, e.g. `gen "BA n=100 m=10" --count 5`.
    Gen {
        spec: GenSpec,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Master seed; defaults to the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: FormatArg,
    },
    /// Encode a graph into a container file.
    Encode {
        graph: PathBuf,
        #[arg(long, value_enum)]
        coder: Option<CoderArg>,
        #[arg(long, value_enum, default_value = "universal")]
        mode: ModeArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Input format; guessed from the extension when absent.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Decode a container file back into a graph.
    Decode {
        container: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Learn a typical model from training graphs.
    Train {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Write atypicality scores of graphs to a CSV file.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Universal codelengths of each coder for the given graphs, as CSV.
    Compare {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Run a detection experiment described by a TOML config file.
    Experiment { config: PathBuf },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { spec, count, seed, out, format } => {
            let written = cmd_gen(&spec, count, seed.unwrap_or(spec.seed), &out, format.into())?;
            println!("wrote {} graph(s) to {}", written.len(), out.display());
        }
        Command::Encode { graph, coder, mode, model, out, format } => {
            let g = read_graph(&graph, format.map(Into::into))?;
            let model = model.as_deref().map(load_model).transpose()?;
            let mode = match mode {
                ModeArg::Learned => Mode::Learned,
                ModeArg::Universal => Mode::Universal,
            };
            let (container, report) = cmd_encode(&g, coder.map(Into::into), mode, model.as_ref())?;
            write_container(&container, &out)?;
            println!("{report}");
        }
        Command::Decode { container, model, out, format } => {
            let c = read_container(&container)?;
            let model = model.as_deref().map(load_model).transpose()?;
            let g = cmd_decode(&c, model.as_ref())?;
            let format = format.map_or_else(|| GraphFormat::from_path(&out), Into::into);
            save_graph(&g, &out, format).with_context(|| format!("writing {}", out.display()))?;
            println!("decoded n={} edges={} to {}", g.node_count(), g.edge_count(), out.display());
        }
        Command::Train { graphs, out, format } => {
            let model = cmd_train(&graphs, format.map(Into::into))?;
            model.save(&out).with_context(|| format!("writing {}", out.display()))?;
            println!("typical coder {} from {} graph(s)", model.coder, model.n_train);
        }
        Command::Score { model, graphs, out, format } => {
            let rows = cmd_score(&load_model(&model)?, &graphs, format.map(Into::into))?;
            write_csv(&rows, &out)?;
            println!("scored {} graph(s) into {}", rows.len(), out.display());
        }
        Command::Compare { graphs, out, format } => {
            let rows = graphs
                .iter()
                .map(|p| {
                    let name = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                    compare_row(&name, &read_graph(p, format.map(Into::into))?)
                })
                .collect::<Result<Vec<_>>>()?;
            write_csv(&rows, &out)?;
            println!("compared {} graph(s) into {}", rows.len(), out.display());
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = cmd_experiment(&cfg)?;
            println!("typical coder {}", summary.coder);
            for (family, eer) in &summary.eers {
                println!("{family}: EER {eer:.4}");
            }
            println!("outputs in {}", cfg.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let text = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {text}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
