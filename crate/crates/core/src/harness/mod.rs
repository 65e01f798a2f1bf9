//! Scenario files, the geometric ground-truth oracle, and run artifacts.

pub mod logs;
pub mod oracle;
pub mod scenario;

pub use logs::{read_trajectory_csv, write_events_csv, write_trajectory_csv, OutcomeSummary, TrajectoryRow};
pub use oracle::{brute_force_collision, clearance, verify_mission, OracleReport};
pub use scenario::{load_scenario, parse_scenario, ScenarioConfig, StartState, WorldConfig};
