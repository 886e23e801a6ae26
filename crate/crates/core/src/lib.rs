pub mod bench;
pub mod config;
pub mod error;
pub mod formulations;
pub mod game;
pub mod generators;
pub mod global;
pub mod interop;
pub mod local;
pub mod lp;
pub mod relax;
pub mod report;

pub use config::{SolverConfig, StepRule};
pub use error::{Error, Result};
pub use formulations::{build, FormulationId, MultilinearProgram};
pub use game::{Game, MixedProfile, PureProfile, RegretReport};
pub use report::{SolveReport, SolveStatus};
