use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levy_rare::config::Estimator;
use levy_rare::experiment::{run_cells, validation_reports, write_csv};
use levy_rare::plot_data::write_plot_data;
use levy_rare::{lipschitz_diagnostic, read_csv, render_table, ExperimentConfig, HarnessError, Result};

#[derive(Parser)]
#[command(name = "levy-rare", version, about = "Rare-event simulation for heavy-tailed Levy processes")]
struct Cli {
    /// Write 0 in the wall_time_s column so reruns give identical files.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (estimator, alpha, n) cell of a config.
    Run {
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run only the crude Monte Carlo cells of a config.
    Crude {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the relative-error table, from a CSV or from a fresh run with
    /// the built-in defaults.
    Table1 {
        /// Restrict the run to these tail indices.
        #[arg(long, num_args = 1..)]
        alpha: Vec<f64>,
        /// Render an existing results file instead of running.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Where a fresh run writes its CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Importance-sampling replications per cell.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, num_args = 1..)]
        n: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Config file supplying the remaining settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lipschitz diagnostic for the truncated increments of the config's model.
    Diagnose { config: PathBuf },
    /// Emit the long-format series CSV used for plotting.
    PlotData {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_reports(cfg: &ExperimentConfig) -> Result<()> {
    for (label, report) in validation_reports(cfg)? {
        println!("parameter regime, {label}:\n{report}");
    }
    Ok(())
}

fn run_grid(mut cfg: ExperimentConfig, out: Option<PathBuf>, no_timing: bool) -> Result<()> {
    if let Some(out) = out {
        cfg.output = out;
    }
    if no_timing {
        cfg.record_wall_time = false;
    }
    cfg.validate()?;
    print_reports(&cfg)?;
    let rows = run_cells(&cfg)?;
    write_csv(&cfg.output, &rows)?;
    print!("{}", render_table(&rows));
    println!("wrote {}", cfg.output.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => run_grid(ExperimentConfig::load(&config)?, out, cli.no_timing),
        Command::Crude { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.modes = vec![Estimator::Crude];
            run_grid(cfg, out, cli.no_timing)
        }
        Command::Table1 {
            alpha,
            csv,
            out,
            samples,
            n,
            seed,
            config,
        } => {
            if let Some(path) = csv {
                let mut rows = read_csv(&path)?;
                if !alpha.is_empty() {
                    rows.retain(|r| alpha.contains(&r.alpha));
                }
                print!("{}", render_table(&rows));
                return Ok(());
            }
            let mut cfg = match config {
                Some(p) => ExperimentConfig::load(&p)?,
                None => ExperimentConfig::default(),
            };
            if !alpha.is_empty() {
                cfg.alpha_list = alpha;
            }
            if !n.is_empty() {
                cfg.n_list = n;
            }
            if let Some(s) = samples {
                cfg.samples.is_samples = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            run_grid(cfg, out, cli.no_timing)
        }
        Command::Diagnose { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let model = cfg.model.build(cfg.model.alpha)?;
            let report = lipschitz_diagnostic(&model, &cfg.diagnostic, cfg.seed)?;
            print!("{report}");
            let flagged = report.flagged().count();
            if flagged > 0 {
                println!("{flagged} cell(s) exceed the bound {}", report.bound);
            }
            Ok(())
        }
        Command::PlotData { csv, out } => {
            let rows = read_csv(&csv)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
                    write_plot_data(file, &rows).map_err(|e| HarnessError::Csv { path, source: e })
                }
                None => {
                    let stdout = std::io::stdout();
                    write_plot_data(stdout.lock(), &rows).map_err(|e| HarnessError::Csv { path: "<stdout>".into(), source: e })
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
