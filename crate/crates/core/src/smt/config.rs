use std::path::Path;
use std::time::Duration;

pub const SOLVER_ENV: &str = "MJV_SOLVER_CMD";
pub const DEFAULT_SOLVER: &str = "z3 -in";

/// How to start a solver. The script is always fed through standard input
/// and the process must answer each command interactively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub command: Vec<String>,
    /// Overrides automatic logic selection.
    pub logic: Option<String>,
    pub timeout: Duration,
    pub name: String,
}

impl SolverConfig {
    pub fn from_command(cmd: &str) -> SolverConfig {
        let command: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
        let name = command
            .iter()
            .map(|w| {
                Path::new(w)
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or(w)
                    .to_string()
            })
            .find(|w| !w.starts_with('-') && !matches!(w.as_str(), "env" | "python" | "python3"))
            .unwrap_or_else(|| "solver".to_string());
        SolverConfig {
            command,
            logic: None,
            timeout: Duration::from_secs(30),
            name,
        }
    }

    /// Explicit command, else `MJV_SOLVER_CMD`, else z3.
    pub fn resolve(explicit: Option<&str>) -> SolverConfig {
        let env = std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty());
        SolverConfig::from_command(
            explicit
                .map(str::to_string)
                .or(env)
                .as_deref()
                .unwrap_or(DEFAULT_SOLVER),
        )
    }

    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.timeout = t;
        self
    }

    pub fn with_logic(mut self, logic: Option<String>) -> Self {
        self.logic = logic;
        self
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_command(DEFAULT_SOLVER)
    }
}
