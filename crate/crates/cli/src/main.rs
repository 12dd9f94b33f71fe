use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use miqfw::bnb::SolverConfig;
use miqfw::ingest::{read_problem, read_report, write_report, Format, RunReport, RunStatus};
use miqfw::metrics::{aggregate, format_table};
use miqfw::portfolio::{default_ell_grid, default_p_grid, run_portfolio, PortfolioConfig};

#[derive(Parser)]
#[command(name = "miqfw", version, about = "Frank-Wolfe primal heuristic for MIQCQPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Canonical,
    Qplib,
}

#[derive(Subcommand)]
enum Command {
    /// Search for good feasible solutions of an instance.
    Solve(SolveArgs),
    /// Aggregate run reports into a Found / TTF / Gap / PI table.
    Metrics {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    path: PathBuf,
    /// Defaults to qplib for `.qplib` files, canonical otherwise.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 8)]
    workers: usize,
    /// Comma-separated penalty exponents.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Comma-separated convexification parameters.
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    fw_iter: usize,
    #[arg(long, default_value_t = 100)]
    restart: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference objective for gap and primal integral.
    #[arg(long = "ref", allow_hyphen_values = true)]
    reference: Option<f64>,
    #[arg(long)]
    no_asens: bool,
    #[arg(long)]
    no_undercover: bool,
    #[arg(long)]
    no_rins: bool,
    #[arg(long)]
    no_ftg: bool,
    #[arg(long)]
    qubo_bipartite: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn config(&self) -> PortfolioConfig {
        let mut base = SolverConfig {
            fw_max_iter: self.fw_iter,
            restart_interval: self.restart,
            ..SolverConfig::default()
        };
        let h = &mut base.heuristics;
        h.asens = !self.no_asens;
        h.undercover = !self.no_undercover;
        h.rins = !self.no_rins;
        h.ftg = !self.no_ftg;
        h.qubo_bipartite = self.qubo_bipartite;
        PortfolioConfig {
            time_limit: self.time_limit,
            workers: self.workers,
            p_grid: self.p.clone().unwrap_or_else(default_p_grid),
            ell_grid: self.ell.clone().unwrap_or_else(default_ell_grid),
            base,
            seed: self.seed,
            reference: self.reference,
            ..PortfolioConfig::default()
        }
    }
}

fn solve(args: &SolveArgs) -> ExitCode {
    let config = args.config();
    let format = match args.format {
        Some(FormatArg::Canonical) => Format::Canonical,
        Some(FormatArg::Qplib) => Format::Qplib,
        None => Format::from_path(&args.path),
    };
    let fallback_name = args
        .path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let report = config
        .validate()
        .and_then(|_| read_problem(&args.path, format))
        .and_then(|problem| {
            let outcome = run_portfolio(&problem, &config)?;
            Ok(RunReport::from_outcome(&problem, &outcome, &config))
        })
        .unwrap_or_else(|e| RunReport::failure(&fallback_name, &config, &e));

    if let Some(msg) = &report.error {
        eprintln!("error: {msg}");
    }
    let text = write_report(&report);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{text}"),
    }
    match report.status {
        RunStatus::Feasible => ExitCode::SUCCESS,
        RunStatus::NoSolution => ExitCode::from(2),
        RunStatus::Error => ExitCode::from(1),
    }
}

fn metrics(paths: &[PathBuf]) -> ExitCode {
    let mut summaries = Vec::with_capacity(paths.len());
    for path in paths {
        let parsed = std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| read_report(&text).map_err(|e| e.to_string()));
        match parsed {
            Ok(r) => summaries.push(r.summary()),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
    }
    print!("{}", format_table(&[("All".to_string(), aggregate(&summaries))]));
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Metrics { reports } => metrics(reports),
    }
}
