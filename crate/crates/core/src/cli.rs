//! Command-line front end: `run`, `render`, `verify`, `gains`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::frames::{CameraPose, Configuration};
use crate::harness::{
    load_scenario, read_trajectory_csv, verify_mission, write_events_csv, write_trajectory_csv, OutcomeSummary,
};
use crate::lqr::{Mode, ModeGains};
use crate::planner::{MissionStatus, Planner, PlannerConfig};
use crate::scene::render_scene_depth;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_TIMED_OUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "depthnav", version, about = "Depth-image collision checking and LQR mission planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fly a mission and write logs to a directory.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one depth image to a PFM file.
    Render {
        scenario: PathBuf,
        /// x,y,z,phi,theta,psi; defaults to the start position, level, facing +x.
        #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
        pose: Option<[f64; 6]>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a previous run against the geometric oracle.
    Verify { dir: PathBuf },
    /// Print LQR gains and Riccati residuals.
    Gains {
        /// Take mode weights from this scenario instead of the defaults.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

fn parse_pose(s: &str) -> std::result::Result<[f64; 6], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let arr: [f64; 6] = vals
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 comma-separated values, got {}", v.len()))?;
    if arr.iter().all(|x| x.is_finite()) {
        Ok(arr)
    } else {
        Err("pose values must be finite".into())
    }
}

/// Parses `argv` (program name first) and executes; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_ERROR,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run { scenario, out: dir } => run_cmd(&scenario, &dir, out),
        Command::Render { scenario, pose, out: file } => render_cmd(&scenario, pose, &file, out),
        Command::Verify { dir } => verify_cmd(&dir, out),
        Command::Gains { scenario } => gains_cmd(scenario.as_deref(), out),
    }
}

fn run_cmd(path: &Path, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let (cfg, scene) = load_scenario(path)?;
    let planner = Planner::new(&scene, cfg.camera, cfg.robot, cfg.planner.clone(), cfg.goal)?;
    let outcome = planner.run(&cfg.start.state())?;

    fs::create_dir_all(dir)?;
    write_trajectory_csv(BufWriter::new(File::create(dir.join("trajectory.csv"))?), &outcome.executed)?;
    write_events_csv(BufWriter::new(File::create(dir.join("events.csv"))?), &outcome.events)?;
    fs::write(dir.join("scenario.json"), serde_json::to_string_pretty(&cfg)?)?;

    let positions: Vec<_> = outcome.executed.iter().map(|s| s.state.p).collect();
    let report = verify_mission(&positions, &scene, cfg.robot.rho);
    let summary = OutcomeSummary::new(&outcome, &report);
    fs::write(dir.join("outcome.json"), serde_json::to_string_pretty(&summary)?)?;

    writeln!(
        out,
        "{} at t = {} s: {} executed samples, {} look-aheads, {} mode switches, {} oracle violations",
        summary.status.name(),
        summary.status.time(),
        summary.executed_samples,
        summary.lookaheads,
        summary.mode_switches,
        summary.oracle_violations,
    )?;
    Ok(match outcome.status {
        MissionStatus::ReachedGoal { .. } => EXIT_OK,
        MissionStatus::Stuck { .. } => EXIT_STUCK,
        MissionStatus::TimedOut { .. } => EXIT_TIMED_OUT,
    })
}

fn render_cmd(path: &Path, pose: Option<[f64; 6]>, file: &Path, out: &mut dyn Write) -> Result<i32> {
    let (cfg, scene) = load_scenario(path)?;
    let q = match pose {
        Some([x, y, z, phi, theta, psi]) => Configuration::new(x, y, z, phi, theta, psi),
        None => Configuration::level(&cfg.start.state().p, cfg.planner.heading),
    };
    let pose = CameraPose::with_offset(&q, &cfg.planner.camera_offset.into());
    let depth = render_scene_depth(&scene, &pose, &cfg.camera);
    let mut w = BufWriter::new(File::create(file)?);
    depth.write_pfm(&mut w)?;
    w.flush()?;
    writeln!(
        out,
        "wrote {}x{} depth image to {} (nearest {} m)",
        depth.width(),
        depth.height(),
        file.display(),
        depth.min_depth()
    )?;
    Ok(EXIT_OK)
}

fn verify_cmd(dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let (cfg, scene) = load_scenario(dir.join("scenario.json"))?;
    let rows = read_trajectory_csv(BufReader::new(File::open(dir.join("trajectory.csv"))?))?;
    if rows.is_empty() {
        return Err(Error::Parse("trajectory.csv has no rows".into()));
    }
    let positions: Vec<_> = rows.iter().map(|r| r.position()).collect();
    let report = verify_mission(&positions, &scene, cfg.robot.rho);
    let clearance = if report.min_clearance == f64::MAX {
        "inf".to_string()
    } else {
        format!("{:.4}", report.min_clearance)
    };
    writeln!(
        out,
        "{} samples, {} violations, min clearance {} m",
        rows.len(),
        report.violations,
        clearance
    )?;
    for (i, _) in report.flags.iter().enumerate().filter(|(_, f)| **f) {
        writeln!(out, "  violation at t = {} ({}, {}, {})", rows[i].t, rows[i].px, rows[i].py, rows[i].pz)?;
    }
    Ok(if report.violations == 0 { EXIT_OK } else { EXIT_ERROR })
}

fn gains_cmd(scenario: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let cfg = match scenario {
        Some(p) => load_scenario(p)?.0.planner,
        None => PlannerConfig::default(),
    };
    for (mode, w) in [(Mode::GoToGoal, cfg.go_to_goal), (Mode::Escape, cfg.escape)] {
        let g = ModeGains::solve(mode, w);
        let a = g.axes[0];
        writeln!(
            out,
            "{}: qp={} qv={} r={} kp={:.12} kv={:.12} residual={:.3e}",
            mode.label(),
            w.qp,
            w.qv,
            w.r,
            a.kp,
            a.kv,
            g.residual()
        )?;
    }
    Ok(EXIT_OK)
}
