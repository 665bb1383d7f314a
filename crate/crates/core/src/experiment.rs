//! Experiment configuration, reproduction runs and convergence fits.
//!
//! Configuration files are TOML:
//!
//! ```toml
//! [experiment]
//! name = "converge"
//! dt_ladder = [0.1, 0.05, 0.025, 0.0125, 0.00625]
//!
//! [scheme]
//! k = 2
//! beta = "3"
//!
//! [run]
//! nu = 1.0
//! dt = 0.01
//! t_end = 1.0
//! n_modes = 32
//! mode = "navierstokes"
//! problem = "example2"
//!
//! [io]
//! out_dir = "out"
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_slice, Exec};
use crate::problems::{example1_initial, example2_exact, example2_forcing, Mode};
use crate::stability::Window;
use crate::stencil::{Beta, SchemeSpec};
use crate::stepper::{series_csv, BlowupRecord, RunConfig, SeriesRow, Solver, SpinUp};

/// Errors within this factor of the smallest one are treated as floor.
pub const FLOOR_FACTOR: f64 = 100.0;

/// Points a slope fit needs.
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Coeffs,
    Certify,
    Region,
    Run,
    Converge,
    Example1,
}

/// Which reference problem supplies initial data, forcing and exact fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Vortex pair, no forcing, no exact solution.
    Example1,
    /// Manufactured solution with matching forcing.
    #[default]
    Example2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<Command>,
    #[serde(default)]
    pub dt_ladder: Vec<f64>,
    /// Cells of the `example1` matrix; empty means the default matrix.
    #[serde(default)]
    pub cells: Vec<Example1Cell>,
    #[serde(default = "yes")]
    pub parallel: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection { name: None, dt_ladder: Vec::new(), cells: Vec::new(), parallel: true }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub k: usize,
    pub beta: Beta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        SchemeSection { k: 2, beta: Beta::integer(3), eta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Polynomial degree per direction.
    pub n_modes: usize,
    pub mode: Mode,
    pub problem: Problem,
    /// Overrides the integrating spin-up's substep count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_up_substeps: Option<usize>,
    pub blowup_threshold: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            nu: 1.0,
            dt: 0.01,
            t_end: 1.0,
            n_modes: 32,
            mode: Mode::NavierStokes,
            problem: Problem::Example2,
            spin_up_substeps: None,
            blowup_threshold: crate::stepper::BLOWUP_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSection {
    /// `re_min, re_max, im_min, im_max`.
    pub window: [f64; 4],
    pub nx: usize,
    pub ny: usize,
}

impl Default for RegionSection {
    fn default() -> Self {
        let w = Window::DEFAULT;
        RegionSection { window: [w.re_min, w.re_max, w.im_min, w.im_max], nx: 256, ny: 256 }
    }
}

impl RegionSection {
    pub fn window(&self) -> Window {
        let [re_min, re_max, im_min, im_max] = self.window;
        Window { re_min, re_max, im_min, im_max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoSection {
    pub out_dir: PathBuf,
    /// Write velocity and pressure snapshots every this many steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
}

impl Default for IoSection {
    fn default() -> Self {
        IoSection { out_dir: PathBuf::from("out"), snapshot_stride: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub region: RegionSection,
    #[serde(default)]
    pub io: IoSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<SchemeSpec> {
        SchemeSpec::new(self.scheme.k, self.scheme.beta.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn exec(&self) -> Exec {
        if self.experiment.parallel {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }

    /// Checks everything the named experiment will read.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.spec()?;
        if let Some(eta) = &self.scheme.eta {
            crate::stencil::parse_rational(eta).map_err(cfg_err)?;
        }
        let r = &self.run;
        for (name, v) in [("run.nu", r.nu), ("run.dt", r.dt), ("run.blowup_threshold", r.blowup_threshold)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(r.t_end.is_finite() && r.t_end >= 0.0) {
            return Err(Error::Config(format!("run.t_end must be nonnegative, got {}", r.t_end)));
        }
        if r.n_modes < crate::spectral::MIN_DEGREE {
            return Err(Error::Config(format!(
                "run.n_modes must be at least {}, got {}",
                crate::spectral::MIN_DEGREE,
                r.n_modes
            )));
        }
        match self.experiment.name {
            Some(Command::Converge) => validate_ladder(&self.experiment.dt_ladder).map_err(cfg_err)?,
            Some(Command::Region) => {
                self.region.window().validate().map_err(cfg_err)?;
                if self.region.nx < crate::stability::MIN_RESOLUTION || self.region.ny < crate::stability::MIN_RESOLUTION
                {
                    return Err(Error::Config(format!(
                        "region resolution must be at least {0}x{0}",
                        crate::stability::MIN_RESOLUTION
                    )));
                }
            }
            _ => {}
        }
        for c in &self.experiment.cells {
            c.spec().map_err(cfg_err)?;
            if !(c.dt.is_finite() && c.dt > 0.0 && c.t_end.is_finite() && c.t_end >= 0.0) {
                return Err(Error::Config(format!("bad example1 cell {c:?}")));
            }
        }
        Ok(())
    }

    /// The single run described by `[scheme]` and `[run]`.
    pub fn run_config(&self) -> Result<RunConfig> {
        let r = &self.run;
        let mut c = problem_config(self.spec()?, r.problem, r.nu, r.dt, r.t_end, r.n_modes, r.mode);
        if let Some(m) = r.spin_up_substeps {
            c.spin_up = SpinUp::Integrate { substeps: Some(m) };
        }
        c.blowup_threshold = r.blowup_threshold;
        c.exec = self.exec();
        Ok(c)
    }
}

/// Run configuration for one of the reference problems.
pub fn problem_config(
    spec: SchemeSpec,
    problem: Problem,
    nu: f64,
    dt: f64,
    t_end: f64,
    n: usize,
    mode: Mode,
) -> RunConfig {
    let mut c = RunConfig::new(spec, nu, dt, t_end, n, mode);
    match problem {
        Problem::Example1 => c.initial = Some(example1_initial()),
        Problem::Example2 => {
            c.exact = Some(example2_exact());
            c.forcing = Some(example2_forcing(nu, mode));
        }
    }
    c
}

/// A step ladder must be positive, strictly decreasing and have at least
/// [`MIN_FIT_POINTS`] entries.
pub fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "dt ladder needs at least {MIN_FIT_POINTS} entries, got {}",
            ladder.len()
        )));
    }
    if ladder.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidArgument("dt ladder entries must be positive".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("dt ladder must be strictly decreasing".into()));
    }
    Ok(())
}

/// Least-squares slope of `log e` against `log dt`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// Indices into the input that entered the fit.
    pub used: Vec<usize>,
    /// True when a flattening tail was cut by the floor rule.
    pub floor_cut: bool,
    pub rule: String,
}

fn lsq_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Fits the pre-floor segment of `(dt, error)` pairs, largest `dt` first.
///
/// A tail is treated as floored when its last local slope is below half the
/// steepest local slope; the points within [`FLOOR_FACTOR`] of the smallest
/// error are then dropped. Pure power laws keep every point.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let usable: Vec<usize> =
        (0..points.len()).filter(|&i| points[i].0 > 0.0 && points[i].1 > 0.0 && points[i].1.is_finite()).collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs {MIN_FIT_POINTS} positive points, got {}",
            usable.len()
        )));
    }
    let local: Vec<f64> = usable
        .windows(2)
        .map(|w| {
            let (a, b) = (points[w[0]], points[w[1]]);
            (a.1 / b.1).ln() / (a.0 / b.0).ln()
        })
        .collect();
    let steepest = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let last = *local.last().expect("at least two points");
    let mut used = usable.clone();
    let mut floor_cut = false;
    if last < 0.5 * steepest {
        let e_min = usable.iter().map(|&i| points[i].1).fold(f64::INFINITY, f64::min);
        let kept: Vec<usize> = usable.iter().copied().filter(|&i| points[i].1 > FLOOR_FACTOR * e_min).collect();
        if kept.len() < MIN_FIT_POINTS {
            return Err(Error::InvalidArgument(format!(
                "only {} points above the error floor; need {MIN_FIT_POINTS}",
                kept.len()
            )));
        }
        floor_cut = kept.len() < used.len();
        used = kept;
    }
    let pts: Vec<(f64, f64)> = used.iter().map(|&i| points[i]).collect();
    Ok(SlopeFit {
        slope: lsq_slope(&pts),
        used,
        floor_cut,
        rule: format!(
            "tail flattened below half the steepest local slope: drop errors <= {FLOOR_FACTOR} x min; else keep all"
        ),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub velocity: f64,
    pub pressure: f64,
    pub divergence: f64,
    pub blowup: Option<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub k: usize,
    pub beta: String,
    pub rows: Vec<ConvergenceRow>,
    pub velocity: Option<SlopeFit>,
    pub pressure: Option<SlopeFit>,
    pub divergence: Option<SlopeFit>,
    /// Velocity slope within `[k - 0.3, k + 0.5]`.
    pub velocity_pass: bool,
    /// Pressure slope at least `k - 0.5`.
    pub pressure_pass: bool,
    /// Divergence slope at least `k - 0.5`.
    pub divergence_pass: bool,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.velocity_pass && self.pressure_pass && self.divergence_pass
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dt,err_u_L2,err_p_L2,div_norm,diverged\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{}",
                r.dt,
                r.velocity,
                r.pressure,
                r.divergence,
                r.blowup.is_some()
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let show = |f: &Option<SlopeFit>| match f {
            Some(f) => format!("{:.3} (points {:?}{})", f.slope, f.used, if f.floor_cut { ", floor cut" } else { "" }),
            None => "n/a".into(),
        };
        let mark = |b: bool| if b { "PASS" } else { "FAIL" };
        format!(
            "k={} beta={}\n  velocity slope   {} {}\n  pressure slope   {} {}\n  divergence slope {} {}\n",
            self.k,
            self.beta,
            show(&self.velocity),
            mark(self.velocity_pass),
            show(&self.pressure),
            mark(self.pressure_pass),
            show(&self.divergence),
            mark(self.divergence_pass),
        )
    }
}

/// Longest contiguous run of non-diverged rows (later runs win ties).
fn clean_segment(rows: &[ConvergenceRow]) -> std::ops::Range<usize> {
    let mut best = 0..0;
    let mut start = 0;
    for i in 0..=rows.len() {
        if i == rows.len() || rows[i].blowup.is_some() {
            if i - start >= best.len() {
                best = start..i;
            }
            start = i + 1;
        }
    }
    best
}

/// Runs the manufactured problem over `ladder` to `t_end` and fits slopes.
pub fn run_convergence(
    spec: &SchemeSpec,
    nu: f64,
    n: usize,
    t_end: f64,
    mode: Mode,
    ladder: &[f64],
    exec: Exec,
) -> Result<ConvergenceReport> {
    validate_ladder(ladder)?;
    let results: Vec<Result<ConvergenceRow>> = map_slice(exec, ladder, |&dt| {
        let cfg = problem_config(spec.clone(), Problem::Example2, nu, dt, t_end, n, mode);
        let out = Solver::new(cfg)?.run()?;
        let last = out.last().ok_or_else(|| Error::InvalidArgument("empty run".into()))?;
        let e = last.errors.expect("manufactured runs carry errors");
        Ok(ConvergenceRow {
            dt,
            velocity: e.velocity,
            pressure: e.pressure,
            divergence: last.diag.div_norm,
            blowup: out.blowup.map(|b| (b.step, b.time)),
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let seg = clean_segment(&rows);
    let fit = |get: fn(&ConvergenceRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows[seg.clone()].iter().map(|r| (r.dt, get(r))).collect();
        fit_slope(&pts).ok().map(|mut f| {
            f.used.iter_mut().for_each(|i| *i += seg.start);
            f
        })
    };
    let velocity = fit(|r| r.velocity);
    let pressure = fit(|r| r.pressure);
    let divergence = fit(|r| r.divergence);
    let k = spec.k as f64;
    let slope_in = |f: &Option<SlopeFit>, lo: f64, hi: f64| f.as_ref().is_some_and(|f| f.slope >= lo && f.slope <= hi);
    Ok(ConvergenceReport {
        k: spec.k,
        beta: spec.beta.to_string(),
        velocity_pass: slope_in(&velocity, k - 0.3, k + 0.5),
        pressure_pass: slope_in(&pressure, k - 0.5, f64::INFINITY),
        divergence_pass: slope_in(&divergence, k - 0.5, f64::INFINITY),
        rows,
        velocity,
        pressure,
        divergence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Blowup,
    Stable,
}

/// One `(k, beta, dt)` entry of the energy-evolution matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Cell {
    pub k: usize,
    pub beta: Beta,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "stokes")]
    pub mode: Mode,
    pub expect: Expect,
}

fn stokes() -> Mode {
    Mode::Stokes
}

impl Example1Cell {
    pub fn new(k: usize, beta: i64, dt: f64, t_end: f64, expect: Expect) -> Self {
        Example1Cell { k, beta: Beta::integer(beta), dt, t_end, mode: Mode::Stokes, expect }
    }

    pub fn spec(&self) -> Result<SchemeSpec> {
        SchemeSpec::new(self.k, self.beta.clone())
    }

    /// File-name stem, e.g. `stokes_k3_beta1_dt0.0005`.
    pub fn label(&self) -> String {
        let mode = match self.mode {
            Mode::Stokes => "stokes",
            Mode::NavierStokes => "nse",
        };
        format!("{mode}_k{}_beta{}_dt{}", self.k, self.beta.to_string().replace('/', "over"), self.dt)
    }
}

/// Classical BDF3/BDF4 at small steps next to the shifted schemes at a large one.
pub fn default_example1_cells() -> Vec<Example1Cell> {
    vec![
        Example1Cell::new(3, 1, 5e-4, 2.0, Expect::Blowup),
        Example1Cell::new(4, 1, 2e-4, 2.0, Expect::Blowup),
        Example1Cell::new(3, 6, 0.05, 5.0, Expect::Stable),
        Example1Cell::new(4, 9, 0.05, 5.0, Expect::Stable),
    ]
}

#[derive(Clone, Debug)]
pub struct Example1Outcome {
    pub cell: Example1Cell,
    pub initial_energy: f64,
    pub max_energy: f64,
    pub final_energy: f64,
    pub final_time: f64,
    pub blowup: Option<BlowupRecord>,
    pub rows: Vec<SeriesRow>,
}

impl Example1Outcome {
    /// Blowup cells must blow up before their end time; stable cells must
    /// stay below twice the initial energy and end below it.
    pub fn passed(&self) -> bool {
        match self.cell.expect {
            Expect::Blowup => self.blowup.as_ref().is_some_and(|b| b.time <= self.cell.t_end),
            Expect::Stable => {
                self.blowup.is_none()
                    && self.max_energy <= 2.0 * self.initial_energy
                    && self.final_energy < self.initial_energy
            }
        }
    }

    pub fn verdict(&self) -> String {
        match &self.blowup {
            Some(b) => format!("blowup(step {}, t = {:.4})", b.step, b.time),
            None => format!(
                "stable(E0 = {:.4e}, max E = {:.4e}, E(T) = {:.4e})",
                self.initial_energy, self.max_energy, self.final_energy
            ),
        }
    }
}

/// Runs every cell from the vortex initial data; cells run concurrently under
/// `exec` and each writes its own series file when `out_dir` is given.
pub fn run_example1(
    cells: &[Example1Cell],
    nu: f64,
    n: usize,
    spin_up_substeps: Option<usize>,
    exec: Exec,
    out_dir: Option<&Path>,
) -> Result<Vec<Example1Outcome>> {
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let results = map_slice(exec, cells, |cell| -> Result<Example1Outcome> {
        let mut cfg = problem_config(cell.spec()?, Problem::Example1, nu, cell.dt, cell.t_end, n, cell.mode);
        if let Some(m) = spin_up_substeps {
            cfg.spin_up = SpinUp::Integrate { substeps: Some(m) };
        }
        cfg.exec = Exec::Sequential;
        let out = Solver::new(cfg)?.run()?;
        if let Some(dir) = out_dir {
            std::fs::write(dir.join(format!("example1_{}.csv", cell.label())), series_csv(&out.rows))?;
        }
        let initial_energy = out.rows.first().map_or(f64::NAN, |r| r.diag.energy);
        let max_energy = out.rows.iter().map(|r| r.diag.energy).fold(0.0, f64::max);
        let last = out.rows.last();
        Ok(Example1Outcome {
            cell: cell.clone(),
            initial_energy,
            max_energy,
            final_energy: last.map_or(f64::NAN, |r| r.diag.energy),
            final_time: last.map_or(0.0, |r| r.time),
            blowup: out.blowup,
            rows: out.rows,
        })
    });
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(dir) = out_dir {
        let mut s = String::from("k,beta,dt,t_end,mode,expect,verdict,passed\n");
        for o in &outcomes {
            let c = &o.cell;
            let _ = writeln!(
                s,
                "{},{},{},{},{:?},{:?},\"{}\",{}",
                c.k,
                c.beta,
                c.dt,
                c.t_end,
                c.mode,
                c.expect,
                o.verdict(),
                o.passed()
            );
        }
        std::fs::write(dir.join("example1_verdicts.csv"), s)?;
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(d0: f64, n: usize) -> Vec<f64> {
        (0..n).map(|j| d0 / 2f64.powi(j as i32)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let l = ladder(0.1, 5);
        let sq: Vec<_> = l.iter().map(|&d| (d, d * d)).collect();
        let f = fit_slope(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert_eq!(f.used.len(), 5);
        let q: Vec<_> = l.iter().map(|&d| (d, 3.0 * d.powi(4))).collect();
        assert!((fit_slope(&q).unwrap().slope - 4.0).abs() < 1e-12);
    }

    #[test]
    fn floor_is_cut() {
        let l = ladder(0.1, 14);
        let pts: Vec<_> = l.iter().map(|&d| (d, d.powi(3) + 1e-12)).collect();
        let f = fit_slope(&pts).unwrap();
        assert!(f.floor_cut);
        assert!((2.9..=3.1).contains(&f.slope), "{f:?}");
        assert!(!f.used.contains(&13));
    }

    #[test]
    fn too_few_points() {
        assert!(fit_slope(&[(0.1, 0.01), (0.05, 0.0025)]).is_err());
        assert!(fit_slope(&[(0.1, 0.01), (0.05, 0.0), (0.025, 1e-4)]).is_err());
    }

    #[test]
    fn ladder_rules() {
        assert!(validate_ladder(&[0.1, 0.05, 0.025]).is_ok());
        assert!(validate_ladder(&[0.1, 0.1, 0.1]).is_err());
        assert!(validate_ladder(&[0.1, 0.05]).is_err());
        assert!(validate_ladder(&[0.1, 0.2, 0.05]).is_err());
        assert!(validate_ladder(&[0.1, 0.05, -0.1]).is_err());
    }

    #[test]
    fn segment_skips_diverged() {
        let row = |dt: f64, bad: bool| ConvergenceRow {
            dt,
            velocity: dt,
            pressure: dt,
            divergence: dt,
            blowup: bad.then_some((1, dt)),
        };
        let rows = vec![row(0.4, true), row(0.2, false), row(0.1, false), row(0.05, false)];
        assert_eq!(clean_segment(&rows), 1..4);
        let rows = vec![row(0.4, false), row(0.2, true), row(0.1, false), row(0.05, false)];
        assert_eq!(clean_segment(&rows), 2..4);
    }

    #[test]
    fn config_roundtrip_and_defaults() {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.name = Some(Command::Converge);
        cfg.experiment.dt_ladder = vec![0.1, 0.05, 0.025];
        cfg.experiment.cells = default_example1_cells();
        cfg.scheme.beta = "29/10".parse().unwrap();
        cfg.run.spin_up_substeps = Some(7);
        cfg.io.snapshot_stride = Some(3);
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
        let small = ExperimentConfig::from_toml_str("[scheme]\nk = 3\nbeta = 6\n").unwrap();
        assert_eq!(small.spec().unwrap(), SchemeSpec::int(3, 6));
        assert_eq!(small.run, RunSection::default());
    }

    #[test]
    fn config_rejects_bad_input() {
        let bad = [
            "[scheme]\nk = 9\nbeta = 1\n",
            "[scheme]\nk = 2\nbeta = 0\n",
            "[run]\nnu = -1.0\n",
            "[run]\nn_modes = 2\n",
            "[experiment]\nname = \"converge\"\ndt_ladder = [0.1, 0.1, 0.1]\n",
            "[run]\nunknown = 1\n",
            "[run]\nmode = \"euler\"\n",
        ];
        for s in bad {
            assert!(matches!(ExperimentConfig::from_toml_str(s), Err(Error::Config(_))), "{s}");
        }
    }

    #[test]
    fn cell_labels() {
        let c = Example1Cell::new(3, 1, 5e-4, 2.0, Expect::Blowup);
        assert_eq!(c.label(), "stokes_k3_beta1_dt0.0005");
    }
}
