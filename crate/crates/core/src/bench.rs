//! Benchmark plans, the grid runner and result tables.
//!
//! A run that finds no certified equilibrium is charged the full timeout,
//! so `average_time_s` is comparable across formulations with different
//! success rates; `average_time_on_solved_s` averages the solved runs only.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{validation, Error, Result};
use crate::formulations::{build, FormulationId};
use crate::game::Game;
use crate::generators::InstanceSpec;
use crate::interop::ReportRecord;
use crate::report::SolveReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Global,
    Local,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Global => "global",
            SolverKind::Local => "local",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(SolverKind::Global),
            "local" => Ok(SolverKind::Local),
            _ => Err(validation(format!("unknown solver '{s}' (expected global or local)"))),
        }
    }
}

/// Runs one solver on one game. The local solver ignores `formulation`.
pub fn run_solver(game: &Game, formulation: FormulationId, solver: SolverKind, config: &SolverConfig) -> Result<SolveReport> {
    match solver {
        SolverKind::Global => {
            let program = build(formulation, game)?;
            crate::global::solve(&program, game, config)
        }
        SolverKind::Local => crate::local::multistart(game, config),
    }
}

/// Instance entry of a plan file: a single spec string, or a family spec
/// expanded over seeds `0..seeds`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum InstanceEntry {
    Single(String),
    Family { family: String, seeds: u64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    instances: Vec<InstanceEntry>,
    formulations: Vec<String>,
    solver: SolverKind,
    timeout_s: f64,
    #[serde(default = "one")]
    repetitions: usize,
    #[serde(default)]
    family_timeouts: BTreeMap<String, f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub instances: Vec<InstanceSpec>,
    pub formulations: Vec<FormulationId>,
    pub solver: SolverKind,
    pub timeout_s: f64,
    pub repetitions: usize,
    /// Overrides of `timeout_s` keyed by family label, e.g. `RG(3,5)`.
    pub family_timeouts: BTreeMap<String, f64>,
}

impl BenchPlan {
    pub fn new(instances: Vec<InstanceSpec>, formulations: Vec<FormulationId>, solver: SolverKind, timeout_s: f64) -> Self {
        BenchPlan {
            instances,
            formulations,
            solver,
            timeout_s,
            repetitions: 1,
            family_timeouts: BTreeMap::new(),
        }
    }

    /// Parses the JSON plan schema described in `docs/formats.md`.
    pub fn parse(text: &str) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut instances = Vec::new();
        for entry in file.instances {
            match entry {
                InstanceEntry::Single(s) => instances.push(s.parse()?),
                InstanceEntry::Family { family, seeds } => {
                    let base: InstanceSpec = family.parse()?;
                    instances.extend((0..seeds).map(|s| base.clone().with_seed(s)));
                }
            }
        }
        let formulations = file
            .formulations
            .iter()
            .map(|f| f.parse())
            .collect::<Result<Vec<FormulationId>>>()?;
        let plan = BenchPlan {
            instances,
            formulations,
            solver: file.solver,
            timeout_s: file.timeout_s,
            repetitions: file.repetitions,
            family_timeouts: file.family_timeouts,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() || self.formulations.is_empty() {
            return Err(validation("a plan needs at least one instance and one formulation"));
        }
        if self.repetitions == 0 {
            return Err(validation("repetitions must be positive"));
        }
        for (family, &t) in std::iter::once((&"timeout_s".to_string(), &self.timeout_s)).chain(&self.family_timeouts) {
            if !(t > 0.0 && t.is_finite()) {
                return Err(validation(format!("timeout for {family} must be positive, got {t}")));
            }
        }
        for spec in &self.instances {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn timeout_for(&self, spec: &InstanceSpec) -> f64 {
        self.family_timeouts
            .get(&spec.family_label())
            .copied()
            .unwrap_or(self.timeout_s)
    }

    /// Formulation labels of the table rows; the local solver has one.
    fn columns(&self) -> Vec<Option<FormulationId>> {
        match self.solver {
            SolverKind::Global => self.formulations.iter().copied().map(Some).collect(),
            SolverKind::Local => vec![None],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub formulation: String,
    pub runs: usize,
    pub average_time_s: f64,
    pub percent_solved: f64,
    /// `None` when nothing was solved.
    pub average_time_on_solved_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub solver: SolverKind,
    pub rows: Vec<BenchRow>,
}

/// One completed run of a plan cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub family: String,
    pub formulation: String,
    pub timeout_s: f64,
    pub solved: bool,
    pub wall_time_s: f64,
}

/// Aggregates runs into one row per (family, formulation), in order of
/// first appearance.
pub fn aggregate(solver: SolverKind, runs: &[RunOutcome]) -> BenchTable {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in runs {
        let key = (r.family.clone(), r.formulation.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let rows = keys
        .into_iter()
        .map(|(family, formulation)| {
            let cell: Vec<&RunOutcome> = runs
                .iter()
                .filter(|r| r.family == family && r.formulation == formulation)
                .collect();
            let charged: f64 = cell
                .iter()
                .map(|r| if r.solved { r.wall_time_s } else { r.timeout_s })
                .sum();
            let solved: Vec<f64> = cell.iter().filter(|r| r.solved).map(|r| r.wall_time_s).collect();
            BenchRow {
                runs: cell.len(),
                average_time_s: charged / cell.len() as f64,
                percent_solved: 100.0 * solved.len() as f64 / cell.len() as f64,
                average_time_on_solved_s: (!solved.is_empty()).then(|| solved.iter().sum::<f64>() / solved.len() as f64),
                family,
                formulation,
            }
        })
        .collect();
    BenchTable { solver, rows }
}

impl BenchTable {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables serialise");
        s.push('\n');
        s
    }
}

impl fmt::Display for BenchTable {
    /// Aligned text table; an empty solved average prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = ["family", "formulation", "runs", "avg_s", "solved_%", "avg_solved_s"];
        let body: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.family.clone(),
                    r.formulation.clone(),
                    r.runs.to_string(),
                    format!("{:.3}", r.average_time_s),
                    format!("{:.0}", r.percent_solved),
                    r.average_time_on_solved_s.map_or("-".to_string(), |t| format!("{t:.3}")),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (c, &w))| if k < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            writeln!(f, "{}", parts.join("  ").trim_end())
        };
        line(f, &header.map(String::from))?;
        for row in &body {
            line(f, row)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BenchResults {
    pub records: Vec<ReportRecord>,
    pub table: BenchTable,
}

/// Runs every (instance, formulation, repetition) cell of `plan`. Cells
/// run on `workers` threads; records come back in plan order either way.
/// `base` supplies everything but the time limit.
pub fn run_plan(plan: &BenchPlan, base: &SolverConfig, workers: usize) -> Result<BenchResults> {
    plan.validate()?;
    let mut cells = Vec::new();
    for spec in &plan.instances {
        for column in plan.columns() {
            for rep in 0..plan.repetitions {
                cells.push((spec, column, rep));
            }
        }
    }
    let games: Vec<Game> = plan.instances.iter().map(InstanceSpec::generate).collect::<Result<_>>()?;
    let game_of = |spec: &InstanceSpec| {
        let k = plan.instances.iter().position(|s| std::ptr::eq(s, spec)).expect("spec from plan");
        &games[k]
    };
    let slots: Vec<Mutex<Option<Result<(ReportRecord, RunOutcome)>>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let k = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(spec, column, _)) = cells.get(k) else {
            break;
        };
        let timeout = plan.timeout_for(spec);
        let mut config = base.clone();
        config.time_limit = Some(timeout);
        let formulation = column.unwrap_or(FormulationId::plain(crate::formulations::Base::Mlp2));
        let label = column.map_or("-".to_string(), |f| f.to_string());
        let result = run_solver(game_of(spec), formulation, plan.solver, &config).map(|report| {
            let record = ReportRecord::new(&spec.to_string(), &label, &plan.solver.to_string(), config.seed, &report);
            let outcome = RunOutcome {
                family: spec.family_label(),
                formulation: label.clone(),
                timeout_s: timeout,
                solved: report.is_solved(),
                wall_time_s: report.wall_time,
            };
            (record, outcome)
        });
        *slots[k].lock().expect("slot lock") = Some(result);
    };
    let workers = workers.clamp(1, cells.len().max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(work);
            }
        });
    }
    let mut records = Vec::with_capacity(cells.len());
    let mut outcomes = Vec::with_capacity(cells.len());
    for slot in slots {
        let (record, outcome) = slot.into_inner().expect("slot lock").expect("every cell ran")?;
        records.push(record);
        outcomes.push(outcome);
    }
    Ok(BenchResults {
        records,
        table: aggregate(plan.solver, &outcomes),
    })
}
