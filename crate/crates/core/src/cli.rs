//! Command-line front end: `gen`, `construct`, `simulate`, `verify`.
//!
//! Cone indices in every CSV are 0-based. Times are printed with 12
//! decimals; exact comparisons happen internally.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ann::build_all;
use crate::motion::{int, rat, Rational, TimeInstant, Trajectory};
use crate::oracle::{all_nn_in, CheckReport, Frame};
use crate::scenario::{generate, parse_angle, parse_rational, parse_scenario, GenSpec, Scenario};
use crate::sim::{resolve_theta, AuditLevel, Mode, SimConfig, SimError, Simulation};
use crate::sygraph::{build_static, SemiYaoGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGENCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "kinsy",
    version,
    about = "Kinetic Semi-Yao graph and nearest neighbours of moving points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random scenario.
    Gen(GenArgs),
    /// Static build at t = 0: Semi-Yao edges and nearest neighbours.
    Construct(RunArgs),
    /// Run the kinetic structures to the horizon.
    Simulate(RunArgs),
    /// Run and compare with brute force at every checkpoint.
    Verify(RunArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1", value_parser = rational_arg)]
    pub horizon: Rational,
    #[arg(long, value_parser = angle_arg)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    SemiYao,
    Ann,
    EpsAnn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AuditArg {
    Off,
    Light,
    Full,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Ann)]
    pub mode: ModeArg,
    /// End time; the scenario horizon by default.
    #[arg(long, value_parser = rational_arg)]
    pub until: Option<Rational>,
    /// Number of evenly spaced checkpoints in (0, until].
    #[arg(long, default_value_t = 10)]
    pub checkpoints: u32,
    #[arg(long, value_enum, default_value_t = AuditArg::Off)]
    pub audit: AuditArg,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Cone angle, in radians or as `pi/k`.
    #[arg(long, value_parser = angle_arg)]
    pub theta: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    if let Some(r) = parse_rational(s) {
        return Ok(r);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(crate::motion::rational_from_f64(v)),
        _ => Err(format!("not a number: {}", s)),
    }
}

fn angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s)
        .filter(|v| *v > 0.0)
        .ok_or_else(|| format!("not an angle: {}", s))
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {}", msg);
            EXIT_DIVERGENCE
        }
    }
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::Cone(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn io<T>(r: std::io::Result<T>, path: &Path) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Gen(a) => {
            if a.dim != 2 && a.dim != 3 {
                return Err(CliError::Usage(format!("dimension must be 2 or 3, got {}", a.dim)));
            }
            if a.degree > crate::scenario::MAX_DEGREE {
                return Err(CliError::Usage(format!("degree {} is not supported", a.degree)));
            }
            let sc = generate(&GenSpec {
                n: a.n,
                dim: a.dim,
                degree: a.degree,
                seed: a.seed,
                horizon: a.horizon,
                theta: a.theta,
                eps: a.eps,
            });
            match a.out {
                Some(p) => io(fs::write(&p, sc.to_string()), &p)?,
                None => print!("{}", sc),
            }
            Ok(EXIT_OK)
        }
        Command::Construct(a) => construct(&a),
        Command::Simulate(a) => simulate(&a, false),
        Command::Verify(a) => simulate(&a, true),
    }
}

fn load(a: &RunArgs) -> Result<Scenario, CliError> {
    let text = io(fs::read_to_string(&a.scenario), &a.scenario)?;
    parse_scenario(&text).map_err(|e| CliError::Usage(format!("{}: {}", a.scenario.display(), e)))
}

fn config(a: &RunArgs, sc: &Scenario) -> SimConfig {
    SimConfig {
        mode: match a.mode {
            ModeArg::SemiYao => Mode::SemiYao,
            ModeArg::Ann => Mode::Ann,
            ModeArg::EpsAnn => Mode::EpsAnn,
        },
        theta: a.theta.or(sc.header.theta),
        eps: a.eps.or(sc.header.eps),
        audit: match a.audit {
            AuditArg::Off => AuditLevel::Off,
            AuditArg::Light => AuditLevel::Light,
            AuditArg::Full => AuditLevel::Full,
        },
        record_events: true,
    }
}

fn write_out(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    io(fs::create_dir_all(dir), dir)?;
    let p = dir.join(name);
    io(fs::write(&p, body), &p)
}

pub fn edges_csv(points: &[Trajectory], g: &SemiYaoGraph, t: &TimeInstant) -> String {
    let mut out = String::from("w,l,target,t\n");
    for (w, row) in g.targets.iter().enumerate() {
        for (l, tgt) in row.iter().enumerate() {
            if let Some(q) = tgt {
                writeln!(
                    out,
                    "{},{},{},{}",
                    points[w].point_id, l, points[*q as usize].point_id, t
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn nn_csv(points: &[Trajectory], nn: &[Option<u32>], t: &TimeInstant) -> String {
    let frame = Frame::new(points, t);
    let mut out = String::from("p,nn,sqdist,t\n");
    for (p, q) in nn.iter().enumerate() {
        let (id, d) = match q {
            Some(q) => (
                points[*q as usize].point_id.to_string(),
                format!("{:.12e}", frame.sqdist_f64(p, *q as usize)),
            ),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{},{},{},{}", points[p].point_id, id, d, t).unwrap();
    }
    out
}

pub fn eps_csv(points: &[Trajectory], eps_nn: &[Option<u32>], t: &TimeInstant) -> String {
    let frame = Frame::new(points, t);
    let nn = all_nn_in(&frame);
    let mut out = String::from("p,eps_nn,ratio,t\n");
    for (p, e) in eps_nn.iter().enumerate() {
        let (id, ratio) = match (e, nn[p]) {
            (Some(e), Some(q)) => {
                let de = frame.sqdist_f64(p, *e as usize);
                let dq = frame.sqdist_f64(p, q as usize);
                let r = if dq > 0.0 { (de / dq).sqrt() } else { 1.0 };
                (points[*e as usize].point_id.to_string(), format!("{:.9}", r))
            }
            _ => (String::new(), String::new()),
        };
        writeln!(out, "{},{},{},{}", points[p].point_id, id, ratio, t).unwrap();
    }
    out
}

fn sorted_points(sc: &Scenario) -> Vec<Trajectory> {
    let mut pts = sc.points.clone();
    pts.sort_by_key(|p| p.point_id);
    pts
}

fn construct(a: &RunArgs) -> Result<i32, CliError> {
    let sc = load(a)?;
    let cfg = config(a, &sc);
    let t = TimeInstant::zero();
    let pts = sorted_points(&sc);
    match cfg.mode {
        Mode::EpsAnn => {
            let sim = Simulation::new(pts, sc.header.dim, cfg, t.clone())?;
            let e = sim.eps().unwrap().all_eps_nearest();
            write_out(&a.out_dir, "eps.csv", &eps_csv(sim.points(), &e, &t))?;
            println!("n={} cones={}", sim.points().len(), sim.family().len());
        }
        mode => {
            let theta = resolve_theta(&cfg)?;
            let family = crate::cones::ConeFamily::build(sc.header.dim, theta, mode == Mode::Ann)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let pts = std::sync::Arc::new(pts);
            let g = build_static(pts.clone(), std::sync::Arc::new(family.clone()), &t);
            write_out(&a.out_dir, "edges.csv", &edges_csv(&pts, &g, &t))?;
            if mode == Mode::Ann {
                let nn = build_all(&pts, &g, &t);
                write_out(&a.out_dir, "nn.csv", &nn_csv(&pts, &nn, &t))?;
            }
            println!("n={} cones={} edges={}", pts.len(), family.len(), g.edges().len());
        }
    }
    Ok(EXIT_OK)
}

/// `k` evenly spaced instants `until * i / k`, `i = 1..=k`, after `start`.
pub fn checkpoint_times(start: &Rational, until: &Rational, k: u32) -> Vec<TimeInstant> {
    (1..=k)
        .map(|i| {
            let f = rat(i as i64, k as i64);
            TimeInstant::Exact(start + (until - start) * f)
        })
        .collect()
}

fn report_row(t: &TimeInstant, r: &CheckReport) -> String {
    format!(
        "{},{},{},{},{},{:.9},{}",
        t,
        r.semi_yao_mismatches,
        r.nn_mismatches,
        r.eps_violations,
        r.audit_failures,
        r.max_ratio,
        if r.ok() { "pass" } else { "fail" }
    )
}

fn simulate(a: &RunArgs, verify: bool) -> Result<i32, CliError> {
    let sc = load(a)?;
    let cfg = config(a, &sc);
    let until = a.until.clone().unwrap_or_else(|| sc.header.horizon.clone());
    if until < int(0) {
        return Err(CliError::Usage("--until must not be negative".into()));
    }
    let mut sim = Simulation::new(sorted_points(&sc), sc.header.dim, cfg, TimeInstant::zero())?;
    if a.inject_fault && !sim.inject_fault() {
        return Err(CliError::Usage("no aggregate available to corrupt".into()));
    }
    let checkpoints = checkpoint_times(&int(0), &until, a.checkpoints);
    let mut report =
        String::from("t,semi_yao_mismatches,nn_mismatches,eps_violations,audit_failures,max_ratio,status\n");
    let mut total = CheckReport::default();
    if verify {
        let r = sim.verify_now();
        report.push_str(&report_row(sim.now(), &r));
        report.push('\n');
        total.merge(r);
    }
    let result = sim.run_until(&TimeInstant::Exact(until.clone()), &checkpoints, |s| {
        if verify {
            let r = s.verify_now();
            report.push_str(&report_row(s.now(), &r));
            report.push('\n');
            total.merge(r);
        }
        Ok(())
    });
    let mut events = String::from(crate::sim::EventRecord::CSV_HEADER);
    events.push('\n');
    for e in sim.events() {
        events.push_str(&e.csv_row());
        events.push('\n');
    }
    write_out(&a.out_dir, "events.csv", &events)?;
    let (h, row) = sim.summary_csv();
    write_out(&a.out_dir, "summary.csv", &format!("{}\n{}\n", h, row))?;
    let t = sim.now().clone();
    if let Some(g) = sim.semi_yao() {
        write_out(&a.out_dir, "edges.csv", &edges_csv(sim.points(), &g, &t))?;
    }
    if let Some(ann) = sim.ann() {
        write_out(&a.out_dir, "nn.csv", &nn_csv(sim.points(), &ann.all_nearest(), &t))?;
    }
    if let Some(eps) = sim.eps() {
        write_out(
            &a.out_dir,
            "eps.csv",
            &eps_csv(sim.points(), &eps.all_eps_nearest(), &t),
        )?;
    }
    if verify || a.audit != AuditArg::Off {
        write_out(&a.out_dir, "report.csv", &report)?;
    }
    if let Err(e) = result {
        if let SimError::Divergence { .. } = e {
            eprintln!("divergence: {}", e);
            return Ok(EXIT_DIVERGENCE);
        }
        return Err(e.into());
    }
    println!("{}", h);
    println!("{}", row);
    if verify {
        if !total.ok() {
            eprintln!(
                "divergence: {}",
                total.first_failure.unwrap_or_else(|| "unknown".into())
            );
            return Ok(EXIT_DIVERGENCE);
        }
        println!("verified {} checkpoints: pass", total.checked.max(1));
    }
    Ok(EXIT_OK)
}
