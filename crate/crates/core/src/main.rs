use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cssplit::experiment::{
    default_example1_cells, run_convergence, run_example1, Command, ExperimentConfig, Problem,
};
use cssplit::problems::Mode;
use cssplit::spectral::write_snapshot;
use cssplit::splitting::{certify_ac, certify_dc, make_split, make_split_default};
use cssplit::stability::{region_scan, Window};
use cssplit::stencil::{coeffs_csv, coeffs_pretty, make_stencils, parse_rational, Beta};
use cssplit::stepper::{series_csv, Solver};
use cssplit::Error;

#[derive(Parser)]
#[command(name = "cssplit", version, about = "Generalized BDF consistent splitting schemes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the exact A, B, C stencils.
    Coeffs {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Check the multiplier positivity certificates.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Rasterize the linear stability region.
    Region {
        #[command(flatten)]
        common: Common,
        /// `re_min,re_max,im_min,im_max`.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// `NX,NY`.
        #[arg(long)]
        res: Option<String>,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pgm: Option<PathBuf>,
        /// Print a `#`/`.` picture instead of CSV on stdout.
        #[arg(long)]
        text: bool,
    },
    /// One time-dependent run; writes `series.csv` (and snapshots) to the output directory.
    Run {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Manufactured-solution convergence study over a step ladder.
    Converge {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated steps, largest first.
        #[arg(long)]
        ladder: Option<String>,
    },
    /// Energy evolution of the vortex data for a matrix of schemes.
    Example1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pretty,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// Shift as an integer, `P/Q` or a decimal.
    #[arg(long)]
    beta: Option<String>,
    /// Run independent work items sequentially.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Polynomial degree per direction.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Stokes,
    Nse,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Example1,
    Example2,
}

enum Failure {
    Verdict,
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.into())
    }
}

fn load(common: &Common, name: Command) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment.name = Some(name);
    if let Some(k) = common.k {
        cfg.scheme.k = k;
    }
    if let Some(b) = &common.beta {
        cfg.scheme.beta = b.parse::<Beta>().map_err(|e| Error::Config(e.to_string()))?;
    }
    if common.sequential {
        cfg.experiment.parallel = false;
    }
    Ok(cfg)
}

fn apply_run(cfg: &mut ExperimentConfig, a: &RunArgs) {
    let r = &mut cfg.run;
    if let Some(v) = a.nu {
        r.nu = v;
    }
    if let Some(v) = a.dt {
        r.dt = v;
    }
    if let Some(v) = a.t_end {
        r.t_end = v;
    }
    if let Some(v) = a.n {
        r.n_modes = v;
    }
    if let Some(m) = a.mode {
        r.mode = match m {
            ModeArg::Stokes => Mode::Stokes,
            ModeArg::Nse => Mode::NavierStokes,
        };
    }
    if let Some(p) = a.problem {
        r.problem = match p {
            ProblemArg::Example1 => Problem::Example1,
            ProblemArg::Example2 => Problem::Example2,
        };
    }
    if let Some(d) = &a.out_dir {
        cfg.io.out_dir = d.clone();
    }
}

fn parse_res(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Config(format!("resolution must be NX,NY, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_ladder(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad ladder entry {t:?}"))))
        .collect()
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

fn verdict(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Coeffs { common, format } => {
            let cfg = load(&common, Command::Coeffs)?;
            cfg.validate()?;
            let st = make_stencils(&cfg.spec()?)?;
            match format {
                Format::Csv => print!("{}", coeffs_csv(&st)),
                Format::Pretty => print!("{}", coeffs_pretty(&st)),
            }
            Ok(())
        }
        Cmd::Certify { common, eta, json } => {
            let mut cfg = load(&common, Command::Certify)?;
            if eta.is_some() {
                cfg.scheme.eta = eta;
            }
            cfg.validate()?;
            let spec = cfg.spec()?;
            let split = match &cfg.scheme.eta {
                Some(e) => make_split(&spec, &parse_rational(e)?)?,
                None => make_split_default(&spec)?,
            };
            let certs = [certify_dc(&split), certify_ac(&split.stencils)];
            if json {
                let v: Vec<_> = certs.iter().map(|c| c.to_json()).collect();
                println!("{}", serde_json::Value::Array(v));
            } else {
                for c in &certs {
                    print!("{}", c.pretty());
                }
            }
            verdict(certs.iter().all(|c| c.holds()))
        }
        Cmd::Region { common, window, res, out, pgm, text } => {
            let mut cfg = load(&common, Command::Region)?;
            if let Some(w) = window {
                let w = Window::parse(&w).map_err(|e| Error::Config(e.to_string()))?;
                cfg.region.window = [w.re_min, w.re_max, w.im_min, w.im_max];
            }
            if let Some(r) = res {
                (cfg.region.nx, cfg.region.ny) = parse_res(&r)?;
            }
            cfg.validate()?;
            let raster = region_scan(&cfg.spec()?, cfg.region.window(), cfg.region.nx, cfg.region.ny, cfg.exec())?;
            match &out {
                Some(p) => std::fs::write(p, raster.to_csv())?,
                None if !text => print!("{}", raster.to_csv()),
                None => {}
            }
            if text {
                print!("{}", raster.to_text());
            }
            if let Some(p) = &pgm {
                raster.write_pgm(p)?;
            }
            eprintln!("stable cells: {} of {}", raster.stable_count(), raster.nx * raster.ny);
            Ok(())
        }
        Cmd::Run { common, run } => {
            let mut cfg = load(&common, Command::Run)?;
            apply_run(&mut cfg, &run);
            cfg.validate()?;
            let solver = Solver::new(cfg.run_config()?)?;
            let dir = cfg.io.out_dir.clone();
            create_dir(&dir)?;
            let stride = cfg.io.snapshot_stride.filter(|s| *s > 0);
            let mut snaps = match stride {
                Some(_) => Some(BufWriter::new(File::create(dir.join("snapshots.bin"))?)),
                None => None,
            };
            let basis = solver.basis().clone();
            let mut io_err = None;
            let out = solver.run_with(|st, row| {
                if let (Some(s), Some(w)) = (stride, snaps.as_mut()) {
                    if row.step % s == 0 && io_err.is_none() {
                        let u = st.velocity();
                        let res = write_snapshot(w, &basis, row.time, u.u1())
                            .and_then(|_| write_snapshot(w, &basis, row.time, u.u2()))
                            .and_then(|_| write_snapshot(w, &basis, row.time, st.pressure().field()));
                        io_err = res.err();
                    }
                }
            })?;
            if let Some(e) = io_err {
                return Err(e.into());
            }
            if let Some(mut w) = snaps {
                w.flush()?;
            }
            std::fs::write(dir.join("series.csv"), series_csv(&out.rows))?;
            if let Some(last) = out.last() {
                println!(
                    "t = {:.6}  energy = {:.6e}  div = {:.3e}{}",
                    last.time,
                    last.diag.energy,
                    last.diag.div_norm,
                    last.errors.map_or(String::new(), |e| format!(
                        "  err_u = {:.3e}  err_p = {:.3e}",
                        e.velocity, e.pressure
                    ))
                );
            }
            match &out.blowup {
                Some(b) => {
                    println!("blowup at step {} (t = {}): {}", b.step, b.time, b.reason);
                    Err(Failure::Verdict)
                }
                None => Ok(()),
            }
        }
        Cmd::Converge { common, run, ladder } => {
            let mut cfg = load(&common, Command::Converge)?;
            apply_run(&mut cfg, &run);
            if let Some(l) = ladder {
                cfg.experiment.dt_ladder = parse_ladder(&l)?;
            }
            if cfg.experiment.dt_ladder.is_empty() {
                cfg.experiment.dt_ladder = (0..5).map(|j| cfg.run.dt / 2f64.powi(j)).collect();
            }
            cfg.validate()?;
            let r = &cfg.run;
            let report = run_convergence(
                &cfg.spec()?,
                r.nu,
                r.n_modes,
                r.t_end,
                r.mode,
                &cfg.experiment.dt_ladder,
                cfg.exec(),
            )?;
            create_dir(&cfg.io.out_dir)?;
            let name = format!("convergence_k{}_beta{}.csv", report.k, report.beta.replace('/', "over"));
            std::fs::write(cfg.io.out_dir.join(name), report.to_csv())?;
            print!("{}", report.to_csv());
            print!("{}", report.summary());
            verdict(report.passed())
        }
        Cmd::Example1 { common, run } => {
            let mut cfg = load(&common, Command::Example1)?;
            if common.config.is_none() {
                cfg.run.nu = 0.005;
                cfg.run.n_modes = 64;
            }
            apply_run(&mut cfg, &run);
            cfg.validate()?;
            let cells = if cfg.experiment.cells.is_empty() { default_example1_cells() } else { cfg.experiment.cells.clone() };
            let outcomes = run_example1(
                &cells,
                cfg.run.nu,
                cfg.run.n_modes,
                cfg.run.spin_up_substeps,
                cfg.exec(),
                Some(&cfg.io.out_dir),
            )?;
            for o in &outcomes {
                println!(
                    "{:<28} expect {:<6} -> {}  {}",
                    o.cell.label(),
                    format!("{:?}", o.cell.expect).to_lowercase(),
                    o.verdict(),
                    if o.passed() { "PASS" } else { "FAIL" }
                );
            }
            verdict(outcomes.iter().all(|o| o.passed()))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
