use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rainpipe_core::dataset::synth::{write_synthetic_csv, SynthConfig};
use rainpipe_core::eval::report::{markdown_table, write_metrics_csv, EvalReport, MetricsRow};
use rainpipe_core::experiment::{evaluate_saved, explore, run_experiment, ExperimentConfig, Preset};

#[derive(Parser)]
#[command(name = "rainpipe", version, about = "Next-day rain classification experiments")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-column statistics, class distribution and correlation matrix.
    Explore {
        #[arg(long)]
        data: PathBuf,
        /// Directory for summary.csv, class_distribution.csv, correlation.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment from a JSON config or a built-in preset.
    Run(RunArgs),
    /// Score the models saved in a run directory on a CSV file.
    Evaluate {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Write the metrics as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic weather CSV with the full column layout.
    Synth {
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.02)]
        unlabeled_fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// experiment1 (original), experiment2 (undersampled) or experiment3 (SMOTE).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stratified subsample of the labelled rows before splitting.
    #[arg(long)]
    row_limit: Option<usize>,
    /// Score KNN on at most this many rows per evaluation set.
    #[arg(long)]
    knn_test_cap: Option<usize>,
}

impl RunArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), None) => ExperimentConfig::load(path)?,
            (None, Some(name)) => {
                let preset = Preset::parse(name)?;
                let (Some(data), Some(out)) = (self.data.clone(), self.out.clone()) else {
                    bail!(rainpipe_core::Error::Config("--preset needs --data and --out".into()));
                };
                preset.config(data, self.seed.unwrap_or(42), out)
            }
            _ => bail!(rainpipe_core::Error::Config("pass either --config or --preset".into())),
        };
        if self.config.is_some() {
            if let Some(d) = self.data {
                cfg.data_path = d;
            }
            if let Some(o) = self.out {
                cfg.report_dir = o;
            }
            if let Some(s) = self.seed {
                cfg.seed = s;
                cfg.resample.seed = s;
            }
        }
        if self.row_limit.is_some() {
            cfg.row_limit = self.row_limit;
        }
        if self.knn_test_cap.is_some() {
            cfg.knn_test_cap = self.knn_test_cap;
        }
        Ok(cfg)
    }
}

fn print_reports(rows: &[(String, EvalReport)]) {
    let refs: Vec<(&str, &EvalReport)> = rows.iter().map(|(n, r)| (n.as_str(), r)).collect();
    print!("{}", markdown_table(&refs));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Explore { data, out } => {
            let summary = explore(&data)?;
            print!("{}", summary.markdown());
            if let Some(dir) = out {
                summary.write(&dir)?;
                eprintln!("wrote {}", dir.display());
            }
        }
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let summary = run_experiment(&cfg)?;
            println!(
                "{}: training {} No / {} Yes after resampling",
                cfg.name, summary.fit_counts.n_negative, summary.fit_counts.n_positive
            );
            for (rank, &i) in summary.ranking.iter().enumerate() {
                let o = &summary.outcomes[i];
                println!(
                    "{:>2}. {:<16} cv {:.4} ± {:.4}  holdout {:.4}",
                    rank + 1,
                    o.label,
                    o.cv.mean_accuracy,
                    o.cv.std_accuracy,
                    o.holdout.accuracy
                );
            }
            eprintln!("wrote {}", cfg.report_dir.display());
        }
        Command::Evaluate { run, data, out } => {
            let reports = evaluate_saved(&run, &data)?;
            print_reports(&reports);
            if let Some(path) = out {
                let rows: Vec<MetricsRow<'_>> = reports
                    .iter()
                    .map(|(n, r)| MetricsRow { model: n, split: "eval".into(), report: r })
                    .collect();
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_metrics_csv(&rows, BufWriter::new(file))?;
            }
        }
        Command::Synth { rows, seed, unlabeled_fraction, out } => {
            if !(0.0..1.0).contains(&unlabeled_fraction) {
                bail!(rainpipe_core::Error::Config("--unlabeled-fraction must be in [0, 1)".into()));
            }
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_synthetic_csv(&SynthConfig { n_rows: rows, seed, unlabeled_fraction }, BufWriter::new(file))?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<rainpipe_core::Error>())
        .map_or(1, |e| e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
