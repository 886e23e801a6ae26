//! Command-line front end. Exit codes: 0 success, 2 invalid input or a
//! failed verification, 3 solver time limit, 1 any other unsolved run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use multinash::bench::{run_plan, run_solver, BenchPlan, SolverKind};
use multinash::generators::InstanceSpec;
use multinash::interop::{
    export_model, load_game, read_profile_json, write_atomic, write_game_json, write_nfg, write_report, ReportRecord,
};
use multinash::{build, Error, FormulationId, Game, SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(name = "multinash", version, about = "Nash equilibria via multilinear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a game from an instance spec such as `RG(3,3)` or `CG(3,3,-0.2)#seed=4`.
    Generate {
        spec: String,
        #[arg(long)]
        seed: Option<u64>,
        /// `.nfg` or `.game.json`; JSON on stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a game given as a file, a named game or an instance spec.
    Solve {
        game: String,
        #[arg(value_name = "FORMULATION")]
        formulation_arg: Option<String>,
        #[arg(value_name = "SOLVER")]
        solver_arg: Option<String>,
        #[command(flatten)]
        opts: SolveOpts,
        /// JSON-lines result file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a profile (JSON list of distributions) against a game.
    Verify {
        game: String,
        profile: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// Write a formulation in the MLIR-NASH model text format.
    Export {
        game: String,
        #[arg(value_name = "FORMULATION")]
        formulation_arg: Option<String>,
        #[arg(long = "formulation")]
        formulation_flag: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark plan and print the result table.
    Bench {
        plan: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        /// Output stem: writes `<stem>.results.jsonl` and `<stem>.table.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveOpts {
    #[arg(long)]
    formulation: Option<String>,
    #[arg(long)]
    solver: Option<String>,
    /// Seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Single worker, reproducible reports.
    #[arg(long)]
    deterministic: bool,
    /// `key = value` solver configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SolveOpts {
    fn config(&self) -> multinash::Result<SolverConfig> {
        let mut cfg = match &self.config {
            Some(p) => SolverConfig::parse(&std::fs::read_to_string(p)?)?,
            None => SolverConfig::default(),
        };
        if let Some(t) = self.timeout {
            cfg.time_limit = Some(t);
        }
        if let Some(e) = self.eps {
            cfg.eps_regret = e;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
            cfg.deterministic = false;
        }
        if self.deterministic {
            cfg.deterministic = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn resolve_game(arg: &str) -> multinash::Result<(Game, String)> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok((load_game(path)?, arg.to_string()));
    }
    let spec: InstanceSpec = arg.parse()?;
    Ok((spec.generate()?, spec.to_string()))
}

fn pick(positional: &Option<String>, flag: &Option<String>, default: &str) -> String {
    positional.clone().or_else(|| flag.clone()).unwrap_or_else(|| default.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> multinash::Result<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> multinash::Result<ExitCode> {
    match cli.command {
        Command::Generate { spec, seed, out } => {
            let mut spec: InstanceSpec = spec.parse()?;
            if let Some(s) = seed {
                spec = spec.with_seed(s);
            }
            let game = spec.generate()?;
            let nfg = out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "nfg"));
            emit(&out, &if nfg { write_nfg(&game) } else { write_game_json(&game) })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            game,
            formulation_arg,
            solver_arg,
            opts,
            out,
        } => {
            let (g, label) = resolve_game(&game)?;
            let id: FormulationId = pick(&formulation_arg, &opts.formulation, "MLP2").parse()?;
            let kind: SolverKind = pick(&solver_arg, &opts.solver, "global").parse()?;
            let config = opts.config()?;
            let report = run_solver(&g, id, kind, &config)?;
            let record = ReportRecord::new(&label, &id.to_string(), &kind.to_string(), config.seed, &report);
            let line = write_report(&record);
            match &out {
                Some(p) => write_atomic(p, &line)?,
                None => print!("{line}"),
            }
            eprintln!(
                "{}: max_regret {:.3e}, {} nodes, {:.3} s",
                report.status, report.max_regret, report.nodes_explored, report.wall_time
            );
            Ok(match report.status {
                SolveStatus::EquilibriumFound => ExitCode::SUCCESS,
                SolveStatus::TimeLimit => ExitCode::from(3),
                _ => ExitCode::from(1),
            })
        }
        Command::Verify { game, profile, eps } => {
            let (g, _) = resolve_game(&game)?;
            let p = read_profile_json(&std::fs::read_to_string(&profile)?)?;
            let report = g.regret_report(&p)?;
            let ok = report.max_regret <= eps;
            println!(
                "{} at eps={eps:e}: max_regret {:e}",
                if ok { "eps-Nash" } else { "not eps-Nash" },
                report.max_regret
            );
            for i in 0..g.num_players() {
                println!("player {}: gain from deviating {:e}", i + 1, report.exploitability(i));
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Export {
            game,
            formulation_arg,
            formulation_flag,
            out,
        } => {
            let (g, _) = resolve_game(&game)?;
            let id: FormulationId = pick(&formulation_arg, &formulation_flag, "MLP2").parse()?;
            emit(&out, &export_model(&build(id, &g)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { plan, opts, out } => {
            let plan = BenchPlan::parse(&std::fs::read_to_string(&plan)?)?;
            let base = SolverConfig {
                deterministic: true,
                ..opts.config()?
            };
            let workers = opts.workers.unwrap_or(1);
            let results = run_plan(&plan, &base, workers)?;
            print!("{}", results.table);
            if let Some(stem) = out {
                let lines: String = results.records.iter().map(write_report).collect();
                let with = |ext: &str| {
                    let mut s = stem.clone().into_os_string();
                    s.push(ext);
                    PathBuf::from(s)
                };
                write_atomic(&with(".results.jsonl"), &lines)?;
                write_atomic(&with(".table.json"), &results.table.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Corruption(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
