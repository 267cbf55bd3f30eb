use clap::{Parser, Subcommand};
use exciplex_cli::error::CliError;
use exciplex_cli::scenarios::CATALOG;
use exciplex_cli::{load_config, run_with_threads};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "exciplex-cool", version, about = "Exciplex fibre-cooling scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML config file or by name with defaults.
    Run {
        /// Config file, or a scenario name from `list`.
        config: String,
        /// Output directory (default: the config's `out`, else out/<scenario>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// `section.key=value`, applied in order before validation.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the available scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in CATALOG {
                println!("{:<16} {}", s.name, s.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out,
            seed,
            threads,
            mut overrides,
        } => {
            if let Some(s) = seed {
                overrides.push(format!("seed={s}"));
            }
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let result = load_config(&config, &overrides).and_then(|cfg| {
                let dir = out
                    .or_else(|| cfg.out.clone())
                    .unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario));
                run_with_threads(&cfg, &dir, threads).map(|m| (dir, m))
            });
            match result {
                Ok((dir, m)) => {
                    for o in &m.outputs {
                        println!("{}  {}", o.sha256, dir.join(&o.file).display());
                    }
                    for n in &m.notes {
                        eprintln!("note: {n}");
                    }
                    eprintln!("{} finished in {:.2} s", m.scenario, m.wall_clock_s);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
