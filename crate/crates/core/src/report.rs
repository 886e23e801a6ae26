use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::game::MixedProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    EquilibriumFound,
    Infeasible,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::EquilibriumFound => "EquilibriumFound",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::TimeLimit => "TimeLimit",
            SolveStatus::NodeLimit => "NodeLimit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SolveStatus::EquilibriumFound,
            SolveStatus::Infeasible,
            SolveStatus::TimeLimit,
            SolveStatus::NodeLimit,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| validation(format!("unknown status '{s}'")))
    }
}

/// Outcome of either solver.
///
/// `EquilibriumFound` implies `max_regret <= eps_regret`, where the regret
/// was recomputed from the game. On a limit status `profile` holds the
/// lowest-regret profile seen, if any. For the local solver
/// `nodes_explored` counts starts and `assignment` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub profile: Option<MixedProfile>,
    /// One value per program variable, in declaration order.
    pub assignment: Vec<f64>,
    pub max_regret: f64,
    pub objective: f64,
    pub nodes_explored: usize,
    pub lp_iterations: usize,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
}

impl SolveReport {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::EquilibriumFound
    }
}
