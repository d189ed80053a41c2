use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gnde::experiment::{
    boxdim_csv, cmd_boxdim, cmd_catalog, cmd_converge, cmd_integrate, cmd_sample, cmd_transfer_audit,
    ExperimentConfig,
};
use gnde::record::Record;
use gnde::Error;

/// Graph neural differential equations on graphon-sampled graphs.
#[derive(Parser)]
#[command(name = "gnde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` config file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; companion files are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trial fan-out.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config override, e.g. `--set graphon=hexaflake`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the shipped graphons.
    Catalog,
    /// Sample a graph and its initial features.
    Sample,
    /// Integrate one GNDE and write its trajectory.
    Integrate,
    /// Trajectory convergence against a large reference graph.
    Converge,
    /// Box-counting dimension of a binary graphon's support boundary.
    Boxdim,
    /// Graphon error of uniform node subsamples.
    TransferAudit,
}

fn load_config(cli: &Cli) -> gnde::Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let mut record = Record::parse(&text)?;
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got `{item}`")))?;
        record.set(k.trim(), v.trim());
    }
    if let Some(seed) = cli.seed {
        record.set("seed", seed);
    }
    ExperimentConfig::from_record(&record)
}

fn companion(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    out.with_file_name(name)
}

fn emit(out: Option<&Path>, text: &str) -> gnde::Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> gnde::Result<()> {
    let cfg = load_config(cli)?;
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Catalog => emit(out, &cmd_catalog()?),
        Command::Sample => {
            let (graph, features) = cmd_sample(&cfg)?;
            match out {
                Some(path) => {
                    std::fs::write(path, graph.to_edge_csv())?;
                    Ok(std::fs::write(companion(path, ".features.csv"), features.to_csv())?)
                }
                None => emit(None, &format!("{}\n{}", graph.to_edge_csv(), features.to_csv())),
            }
        }
        Command::Integrate => {
            let traj = cmd_integrate(&cfg)?;
            if let Some(path) = out {
                std::fs::write(companion(path, ".meta.txt"), traj.meta_record().to_text())?;
            }
            emit(out, &traj.to_csv())
        }
        Command::Converge => {
            let report = cmd_converge(&cfg)?;
            let summary = report.summary_json();
            match out {
                Some(path) => std::fs::write(companion(path, ".summary.json"), &summary)?,
                None => eprint!("{summary}"),
            }
            emit(out, &report.to_csv())
        }
        Command::Boxdim => {
            let count = cmd_boxdim(&cfg)?;
            eprintln!(
                "{}: box dimension {:.4} (stderr {:.4})",
                cfg.graphon.name(),
                count.estimate,
                count.stderr
            );
            emit(out, &boxdim_csv(&count))
        }
        Command::TransferAudit => {
            let report = cmd_transfer_audit(&cfg)?;
            match out {
                Some(path) => std::fs::write(companion(path, ".summary.csv"), report.summary_csv())?,
                None => eprint!("{}", report.summary_csv()),
            }
            emit(out, &report.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
