//! `bp-lab`: solve, verify and analyse Burgers–Poisson runs from the shell.

mod checks;
mod error;
mod experiment;
mod output;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bplab_core::characteristics::{Side, SolutionField};
use bplab_core::config::{read_solve_config, KeyValues};
use bplab_core::snapshot::{format_trajectory, parse_trajectory};
use bplab_core::solver::{solve, solve_every_step, CheckTolerance, EntropyModel};
use bplab_core::{SolveConfig, Trajectory};

use checks::Outcome;
use error::{CliError, CliResult};
use experiment::{read_fsigma, Check, ExperimentConfig, FSigmaParams, DEFAULT_T_MIN};
use output::OutDir;

const TOL_SCALE_VAR: &str = "BP_LAB_TOL_SCALE";

#[derive(Parser)]
#[command(name = "bp-lab", version, about = "Burgers–Poisson numerical lab", subcommand_required = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver from a key=value config and write the trajectory.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the `diagnostics.*` flags.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
    },
    /// Run bound, entropy and BV checks on a trajectory file.
    #[command(allow_negative_numbers = true)]
    Verify {
        trajectory: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "l1,linf,oleinik,bv")]
        checks: Vec<String>,
        /// Solver config the trajectory came from; selects the entropy model.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Pairs for the characteristics check.
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        z1: Option<f64>,
        #[arg(long)]
        z2: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Write the F_σ series of a trajectory.
    #[command(allow_negative_numbers = true)]
    Fsigma {
        trajectory: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        z1: f64,
        #[arg(long)]
        z2: f64,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Trace characteristics through a point of a trajectory.
    #[command(allow_negative_numbers = true)]
    Chars {
        trajectory: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        /// Also trace forward from (t, x) to the final time.
        #[arg(long)]
        forward: bool,
    },
    /// Write the BV decomposition of every snapshot.
    Bv {
        trajectory: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    out: PathBuf,
    /// Snapshots before this time are skipped.
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    t_min: f64,
}

fn tol_scale() -> CliResult<f64> {
    match std::env::var(TOL_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(CliError::Usage(format!("{TOL_SCALE_VAR} must be a positive number, got `{s}`"))),
        },
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_trajectory(path: &Path) -> CliResult<Trajectory> {
    let text = read_text(path)?;
    parse_trajectory(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_checks(names: &[String]) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    for n in names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let c = Check::from_name(n).ok_or_else(|| {
            let known: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
            CliError::Usage(format!("unknown check `{n}`; known: {}", known.join(", ")))
        })?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

struct CheckPlan<'a> {
    checks: &'a [Check],
    t_min: f64,
    model: EntropyModel,
    fsigma: Option<FSigmaParams>,
    pairs: usize,
    seed: u64,
}

/// Runs every requested check, writing one CSV per check.
fn run_checks(
    traj: &Trajectory,
    every_step: Option<&Trajectory>,
    plan: &CheckPlan,
    out: &mut OutDir,
) -> CliResult<Vec<Outcome>> {
    let scale = tol_scale()?;
    let tol = CheckTolerance::default().with_scale(scale);
    let mut outcomes = Vec::new();
    for &c in plan.checks {
        let o = match c {
            Check::L1 | Check::Linf | Check::Oleinik => {
                checks::bound_check(c.name(), traj, plan.t_min, &tol, out)?
            }
            Check::Entropy => checks::entropy(every_step.unwrap_or(traj), plan.model, &tol, out)?,
            Check::Bv => checks::bv(traj, plan.t_min, out)?,
            Check::FSigma => {
                let p = plan.fsigma.as_ref().ok_or_else(|| {
                    CliError::Usage("fsigma check needs --sigma, --z1 and --z2".into())
                })?;
                checks::fsigma(traj, p, scale, out)?
            }
            Check::Characteristics => {
                let sigma = plan
                    .fsigma
                    .as_ref()
                    .map(|p| p.sigma)
                    .unwrap_or_else(|| (0.25f64).min(0.25 * traj.end_time()));
                checks::characteristic_pairs(traj, plan.pairs, sigma, plan.seed, scale, out)?
            }
        };
        outcomes.push(o);
    }
    Ok(outcomes)
}

fn report(outcomes: &[Outcome]) -> ExitCode {
    let mut ok = true;
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        if o.passed {
            println!("{status} {}: {}", o.name, o.summary);
        } else {
            eprintln!("{status} {}: {}", o.name, o.summary);
        }
        ok &= o.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[derive(serde::Serialize)]
struct NormRow {
    time: f64,
    l1: f64,
    linf: f64,
    mass: f64,
}

fn manifest(exp: &ExperimentConfig, traj: &Trajectory, files: &[String]) -> String {
    let mut m = String::new();
    writeln!(m, "bp_lab.version={}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(m, "seed={}", exp.seed).unwrap();
    for (k, v) in &exp.echo {
        writeln!(m, "config.{k}={v}").unwrap();
    }
    let cfg = &exp.solve;
    writeln!(m, "resolved.dx={:?}", cfg.grid.dx()).unwrap();
    writeln!(m, "resolved.pad={:?}", cfg.pad).unwrap();
    writeln!(m, "resolved.cfl={:?}", cfg.sweep.cfl()).unwrap();
    writeln!(m, "resolved.max_dt={:?}", cfg.sweep.max_dt()).unwrap();
    writeln!(m, "resolved.splitting={:?}", cfg.splitting).unwrap();
    writeln!(m, "resolved.source_integrator={:?}", cfg.source_integrator).unwrap();
    writeln!(m, "resolved.source_enabled={}", cfg.source_enabled).unwrap();
    writeln!(m, "resolved.substeps={}", cfg.substeps).unwrap();
    writeln!(m, "snapshots={}", traj.len()).unwrap();
    writeln!(m, "u0_l1={:?}", traj.u0_l1()).unwrap();
    let last = traj.profiles().last().unwrap();
    writeln!(m, "final.time={:?}", traj.end_time()).unwrap();
    writeln!(m, "final.l1={:?}", last.l1_norm()).unwrap();
    writeln!(m, "final.linf={:?}", last.linf_norm()).unwrap();
    writeln!(m, "files={}", files.join(",")).unwrap();
    m
}

fn cmd_solve(config: &Path, out: Option<PathBuf>, checks: Option<Vec<String>>) -> CliResult<ExitCode> {
    let text = read_text(config)?;
    let exp = ExperimentConfig::parse(&text)?;
    let dir = out
        .or_else(|| exp.output_dir.clone())
        .ok_or_else(|| CliError::Usage("no output directory: pass --out or set output.dir".into()))?;
    let selected = match checks {
        Some(names) => parse_checks(&names)?,
        None => exp.checks.clone(),
    };
    let traj = solve(&exp.solve)?;
    let every = if selected.contains(&Check::Entropy) {
        Some(solve_every_step(&exp.solve)?)
    } else {
        None
    };
    let mut out = OutDir::create(dir)?;
    out.write("trajectory.txt", format_trajectory(&traj).as_bytes())?;
    let norms: Vec<NormRow> = traj
        .iter()
        .map(|(t, p)| NormRow {
            time: t,
            l1: p.l1_norm(),
            linf: p.linf_norm(),
            mass: p.mass(),
        })
        .collect();
    out.write_csv("norms.csv", &["time", "l1", "linf", "mass"], &norms)?;
    let plan = CheckPlan {
        checks: &selected,
        t_min: exp.t_min,
        model: EntropyModel::for_config(&exp.solve),
        fsigma: exp.fsigma.clone(),
        pairs: exp.pairs,
        seed: exp.seed,
    };
    let outcomes = run_checks(&traj, every.as_ref(), &plan, &mut out)?;
    let mut files = out.written().to_vec();
    files.push("manifest.txt".into());
    out.write("manifest.txt", manifest(&exp, &traj, &files).as_bytes())?;
    Ok(report(&outcomes))
}

fn entropy_model_from(config: Option<&Path>) -> CliResult<EntropyModel> {
    let Some(path) = config else {
        return Ok(EntropyModel::default());
    };
    let mut kv = KeyValues::parse(&read_text(path)?)?;
    let cfg: SolveConfig = read_solve_config(&mut kv)?;
    Ok(EntropyModel::for_config(&cfg))
}

fn fsigma_params(
    sigma: Option<f64>,
    z1: Option<f64>,
    z2: Option<f64>,
    times: Option<Vec<f64>>,
) -> CliResult<Option<FSigmaParams>> {
    let mut text = String::new();
    for (k, v) in [("sigma", sigma), ("z1", z1), ("z2", z2)] {
        if let Some(v) = v {
            writeln!(text, "fsigma.{k}={v:?}").unwrap();
        }
    }
    if let Some(ts) = times.filter(|t| !t.is_empty()) {
        let list: Vec<String> = ts.iter().map(|t| format!("{t:?}")).collect();
        writeln!(text, "fsigma.times={}", list.join(",")).unwrap();
    }
    let mut kv = KeyValues::parse(&text)?;
    Ok(read_fsigma(&mut kv)?)
}

fn write_curve(out: &mut OutDir, name: &str, c: &bplab_core::characteristics::Characteristic) -> CliResult<()> {
    out.write_csv(name, &["s", "xi", "v", "kind"], &checks::curve_rows(c))?;
    Ok(())
}

fn cmd_chars(traj: &Trajectory, t: f64, x: f64, forward: bool, out: &mut OutDir) -> CliResult<ExitCode> {
    let field = SolutionField::new(traj);
    let minus = field.backward(t, x, Side::Minus)?;
    let plus = field.backward(t, x, Side::Plus)?;
    write_curve(out, "backward_minus.csv", &minus)?;
    write_curve(out, "backward_plus.csv", &plus)?;
    if forward {
        let f = field.forward(t, x)?;
        write_curve(out, "forward.csv", &f)?;
    }
    // the minimal curve must stay left of the maximal one
    let dx = traj.grid().dx();
    let worst = minus
        .xi()
        .iter()
        .zip(plus.xi())
        .map(|(a, b)| a - b)
        .fold(f64::MIN, f64::max);
    let (um, up) = field.states(t, x);
    let o = Outcome {
        name: "chars",
        passed: worst <= 2.0 * dx * tol_scale()?,
        summary: format!(
            "u(t,x-)={um:.6}, u(t,x+)={up:.6}, curves reach s={}, largest minus-over-plus overlap {worst:.3e}",
            minus.start_time()
        ),
    };
    Ok(report(&[o]))
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Solve { config, out, checks } => cmd_solve(&config, out, checks),
        Command::Verify {
            trajectory,
            common,
            checks,
            config,
            pairs,
            seed,
            sigma,
            z1,
            z2,
            times,
        } => {
            let selected = parse_checks(&checks)?;
            let traj = load_trajectory(&trajectory)?;
            let plan = CheckPlan {
                checks: &selected,
                t_min: common.t_min,
                model: entropy_model_from(config.as_deref())?,
                fsigma: fsigma_params(sigma, z1, z2, times)?,
                pairs,
                seed,
            };
            let mut out = OutDir::create(common.out)?;
            let outcomes = run_checks(&traj, None, &plan, &mut out)?;
            Ok(report(&outcomes))
        }
        Command::Fsigma {
            trajectory,
            common,
            sigma,
            z1,
            z2,
            times,
        } => {
            let traj = load_trajectory(&trajectory)?;
            let params = fsigma_params(Some(sigma), Some(z1), Some(z2), times)?.expect("all set");
            let mut out = OutDir::create(common.out)?;
            Ok(report(&[checks::fsigma(&traj, &params, tol_scale()?, &mut out)?]))
        }
        Command::Chars {
            trajectory,
            common,
            t,
            x,
            forward,
        } => {
            let traj = load_trajectory(&trajectory)?;
            let mut out = OutDir::create(common.out)?;
            cmd_chars(&traj, t, x, forward, &mut out)
        }
        Command::Bv { trajectory, common } => {
            let traj = load_trajectory(&trajectory)?;
            let mut out = OutDir::create(common.out)?;
            Ok(report(&[checks::bv(&traj, common.t_min, &mut out)?]))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bp-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
