//! Time stepping of the consistent splitting schemes.
//!
//! One step solves, per velocity component,
//!
//! ```text
//! A(u^{n+1})/dt - nu Lap B(u^{n+1}) + grad C(p) [+ C(u) . grad C(u)] = f(t^{n+beta})
//! ```
//!
//! for `u^{n+1}`, then the pressure from the weak Poisson problem
//! `(grad p, grad q) = (f - u.grad u - nu curl curl u, grad q)` at `t^{n+1}`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::par::{join, Exec};
use crate::problems::{ExactSolution, Mode, VectorFn};
use crate::spectral::{
    advect_legendre, dx, dy, helmholtz_solve, lap, pressure_poisson, transform_to_nodes, Basis1D, Field2D,
    PressureField, Space, VelocityField,
};
use crate::splitting::{make_split_default, SplitSet};
use crate::stencil::{make_stencils, SchemeSpec};

/// Default blowup threshold on `||u||_{L2}`.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Smallest spin-up substep.
pub const MIN_SUBSTEP: f64 = 1e-8;

/// How the first `k - 1` levels are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpinUp {
    /// Sample the exact solution when there is one, otherwise integrate.
    #[default]
    Auto,
    Exact,
    /// Integrate with fine substeps; `substeps` per `dt` overrides the
    /// default `dt / max(dt^2, 1e-8)`.
    Integrate { substeps: Option<usize> },
}

#[derive(Clone)]
pub struct RunConfig {
    pub spec: SchemeSpec,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Polynomial degree per direction.
    pub n: usize,
    pub mode: Mode,
    /// `None` is the zero forcing.
    pub forcing: Option<VectorFn>,
    pub exact: Option<ExactSolution>,
    /// Initial velocity when there is no exact solution; only `t = 0` is used.
    pub initial: Option<VectorFn>,
    pub spin_up: SpinUp,
    pub blowup_threshold: f64,
    pub exec: Exec,
}

impl std::fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunConfig")
            .field("spec", &self.spec)
            .field("nu", &self.nu)
            .field("dt", &self.dt)
            .field("t_end", &self.t_end)
            .field("n", &self.n)
            .field("mode", &self.mode)
            .field("forcing", &self.forcing.is_some())
            .field("exact", &self.exact.is_some())
            .field("spin_up", &self.spin_up)
            .finish()
    }
}

impl RunConfig {
    pub fn new(spec: SchemeSpec, nu: f64, dt: f64, t_end: f64, n: usize, mode: Mode) -> Self {
        RunConfig {
            spec,
            nu,
            dt,
            t_end,
            n,
            mode,
            forcing: None,
            exact: None,
            initial: None,
            spin_up: SpinUp::Auto,
            blowup_threshold: BLOWUP_THRESHOLD,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        pos(self.nu, "nu")?;
        pos(self.dt, "dt")?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.exact.is_none() && self.initial.is_none() {
            return Err(Error::InvalidArgument("need an initial velocity or an exact solution".into()));
        }
        if self.spin_up == SpinUp::Exact && self.exact.is_none() {
            return Err(Error::InvalidArgument("exact spin-up without an exact solution".into()));
        }
        Ok(())
    }

    /// Number of steps; `steps * dt` is within half a step of `t_end`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Splitting constants of the scheme (analysis only; stepping uses `B`).
    pub fn split(&self) -> Result<SplitSet> {
        make_split_default(&self.spec)
    }
}

/// Floating stencils of one scheme.
#[derive(Clone, Debug)]
struct Weights {
    k: usize,
    beta: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Weights {
    fn new(spec: &SchemeSpec) -> Result<Self> {
        let st = make_stencils(spec)?;
        Ok(Weights { k: spec.k, beta: spec.beta.to_f64(), a: st.a_f64(), b: st.b_f64(), c: st.c_f64() })
    }
}

/// The last `k` velocity and pressure levels, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct StepperState {
    pub u: VecDeque<VelocityField>,
    pub p: VecDeque<PressureField>,
    /// Index of the newest level.
    pub step: usize,
    /// Time of the newest level.
    pub time: f64,
}

impl StepperState {
    pub fn velocity(&self) -> &VelocityField {
        self.u.back().expect("state holds at least one level")
    }

    pub fn pressure(&self) -> &PressureField {
        self.p.back().expect("state holds at least one level")
    }

    fn push(&mut self, u: VelocityField, p: PressureField, keep: usize) {
        self.u.push_back(u);
        self.p.push_back(p);
        while self.u.len() > keep {
            self.u.pop_front();
            self.p.pop_front();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    /// `0.5 ||u||^2`.
    pub energy: f64,
    pub div_norm: f64,
    pub grad_p_norm: f64,
    /// Seconds spent producing the level.
    pub wall_time: f64,
}

/// `L2` errors against the exact solution; pressures compared mean-free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub velocity: f64,
    pub pressure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    pub time: f64,
    pub diag: StepDiagnostics,
    pub errors: Option<ErrorNorms>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupRecord {
    pub step: usize,
    pub time: f64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<SeriesRow>,
    pub blowup: Option<BlowupRecord>,
    pub state: Option<StepperState>,
}

impl RunOutcome {
    pub fn last(&self) -> Option<&SeriesRow> {
        self.rows.last()
    }
}

/// CSV `step,time,energy,div_norm,grad_p_norm[,err_u_L2,err_p_L2]`.
pub fn series_csv(rows: &[SeriesRow]) -> String {
    let with_err = rows.iter().any(|r| r.errors.is_some());
    let mut out = String::from("step,time,energy,div_norm,grad_p_norm");
    if with_err {
        out.push_str(",err_u_L2,err_p_L2");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{},{:e},{:e},{:e}", r.step, r.time, r.diag.energy, r.diag.div_norm, r.diag.grad_p_norm);
        if with_err {
            match r.errors {
                Some(e) => {
                    let _ = write!(out, ",{:e},{:e}", e.velocity, e.pressure);
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// A configured discretization: basis, stencils and problem data.
pub struct Solver {
    basis: Arc<Basis1D>,
    cfg: RunConfig,
    w: Weights,
}

impl Solver {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        let basis = Arc::new(Basis1D::new(cfg.n)?);
        Self::with_basis(cfg, basis)
    }

    /// Reuses a prebuilt basis; its degree must match `cfg.n`.
    pub fn with_basis(cfg: RunConfig, basis: Arc<Basis1D>) -> Result<Self> {
        cfg.validate()?;
        if basis.degree() != cfg.n {
            return Err(Error::InvalidArgument(format!("basis degree {} != n {}", basis.degree(), cfg.n)));
        }
        let w = Weights::new(&cfg.spec)?;
        for (name, v) in [("a_k", w.a[w.k]), ("b_(k-1)", w.b[w.k - 1])] {
            if v <= 0.0 {
                return Err(Error::Unsupported(format!("{name} = {v} gives an indefinite implicit solve")));
            }
        }
        Ok(Solver { basis, cfg, w })
    }

    pub fn basis(&self) -> &Arc<Basis1D> {
        &self.basis
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    fn forcing_legendre(&self, t: f64) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        let f = self.cfg.forcing.as_ref()?;
        let b = &self.basis;
        let f1 = Field2D::from_fn(b, Space::Full, |x, y| f(t, x, y)[0]).into_coeffs();
        let f2 = Field2D::from_fn(b, Space::Full, |x, y| f(t, x, y)[1]).into_coeffs();
        Some((f1, f2))
    }

    fn exact_velocity(&self, t: f64) -> Option<VelocityField> {
        let e = self.cfg.exact.as_ref()?;
        Some(VelocityField::from_fn(&self.basis, |x, y| (e.velocity)(t, x, y)))
    }

    fn exact_pressure(&self, t: f64) -> Option<PressureField> {
        let e = self.cfg.exact.as_ref()?;
        Some(PressureField::from_fn(&self.basis, |x, y| (e.pressure)(t, x, y)))
    }

    /// Pressure from the weak Poisson problem for a given velocity at time `t`.
    pub fn pressure_from(&self, u: &VelocityField, t: f64) -> Result<PressureField> {
        let b = &*self.basis;
        let u1 = u.u1().to_legendre(b);
        let u2 = u.u2().to_legendre(b);
        let w = dx(b, &u2) - dy(b, &u1);
        let nu = self.cfg.nu;
        let mut g1 = dy(b, &w) * (-nu);
        let mut g2 = dx(b, &w) * nu;
        if let Some((f1, f2)) = self.forcing_legendre(t) {
            g1 += f1;
            g2 += f2;
        }
        if self.cfg.mode == Mode::NavierStokes {
            let (n1, n2) = advect_legendre(b, &u1, &u2);
            g1 -= n1;
            g2 -= n2;
        }
        pressure_poisson(b, (&Field2D::full(g1), &Field2D::full(g2)))
    }

    fn check(&self, u: &VelocityField, step: usize, time: f64) -> Result<()> {
        let norm = u.l2_norm(&self.basis);
        if !u.is_finite() || !norm.is_finite() {
            return Err(Error::Blowup { step, time, reason: "non-finite velocity".into() });
        }
        if norm > self.cfg.blowup_threshold {
            return Err(Error::Blowup { step, time, reason: format!("||u|| = {norm:e} exceeds threshold") });
        }
        Ok(())
    }

    /// One step of scheme `w` with step `dt` on the last `w.k` levels.
    fn advance(&self, w: &Weights, dt: f64, state: &mut StepperState, keep: usize) -> Result<()> {
        let b = &*self.basis;
        let k = w.k;
        let nu = self.cfg.nu;
        if state.u.len() < k {
            return Err(Error::LengthMismatch { what: "history levels".into(), expected: k, got: state.u.len() });
        }
        let off = state.u.len() - k;
        let leg: Vec<(DMatrix<f64>, DMatrix<f64>)> = state
            .u
            .iter()
            .skip(off)
            .map(|u| (u.u1().to_legendre(b), u.u2().to_legendre(b)))
            .collect();
        let n = b.n_full();
        let zero = || DMatrix::<f64>::zeros(n, n);

        let (mut r1, mut r2) = (zero(), zero());
        let (mut bu1, mut bu2) = (zero(), zero());
        let mut cp = zero();
        for q in 0..k {
            r1 -= &leg[q].0 * (w.a[q] / dt);
            r2 -= &leg[q].1 * (w.a[q] / dt);
            if q + 1 < k {
                bu1 += &leg[q + 1].0 * w.b[q];
                bu2 += &leg[q + 1].1 * w.b[q];
            }
            cp += state.p[off + q].field().coeffs() * w.c[q];
        }
        r1 += lap(b, &bu1) * nu;
        r2 += lap(b, &bu2) * nu;
        r1 -= dx(b, &cp);
        r2 -= dy(b, &cp);

        let t_beta = state.time + w.beta * dt;
        if let Some((f1, f2)) = self.forcing_legendre(t_beta) {
            r1 += f1;
            r2 += f2;
        }
        if self.cfg.mode == Mode::NavierStokes {
            let (mut c1, mut c2) = (zero(), zero());
            for q in 0..k {
                c1 += &leg[q].0 * w.c[q];
                c2 += &leg[q].1 * w.c[q];
            }
            let (n1, n2) = advect_legendre(b, &c1, &c2);
            r1 -= n1;
            r2 -= n2;
        }

        let alpha = w.a[k] / dt;
        let diff = nu * w.b[k - 1];
        let (u1, u2) = join(
            self.cfg.exec,
            || helmholtz_solve(b, alpha, diff, &Field2D::full(r1)),
            || helmholtz_solve(b, alpha, diff, &Field2D::full(r2)),
        );
        let u = VelocityField::new(u1?, u2?)?;
        let step = state.step + 1;
        let time = state.time + dt;
        self.check(&u, step, time)?;
        let p = self.pressure_from(&u, time)?;
        if !p.field().is_finite() {
            return Err(Error::Blowup { step, time, reason: "non-finite pressure".into() });
        }
        state.push(u, p, keep);
        state.step = step;
        state.time = time;
        Ok(())
    }

    fn initial_velocity(&self) -> VelocityField {
        match (&self.cfg.initial, &self.cfg.exact) {
            (Some(f), _) => VelocityField::from_fn(&self.basis, |x, y| f(0.0, x, y)),
            (None, Some(_)) => self.exact_velocity(0.0).expect("exact solution present"),
            (None, None) => unreachable!("validated config"),
        }
    }

    /// Substeps per `dt` used by the integrating spin-up.
    pub fn spin_up_substeps(&self) -> usize {
        match self.cfg.spin_up {
            SpinUp::Integrate { substeps: Some(m) } => m.max(1),
            _ => {
                let dt = self.cfg.dt;
                (dt / (dt * dt).max(MIN_SUBSTEP)).ceil().max(1.0) as usize
            }
        }
    }

    /// Produces levels `0 ..= k-1`.
    pub fn spin_up(&self) -> Result<StepperState> {
        let k = self.w.k;
        let dt = self.cfg.dt;
        let exact = match self.cfg.spin_up {
            SpinUp::Exact => true,
            SpinUp::Integrate { .. } => false,
            SpinUp::Auto => self.cfg.exact.is_some(),
        };
        let mut state = StepperState { u: VecDeque::new(), p: VecDeque::new(), step: 0, time: 0.0 };
        if exact {
            for i in 0..k {
                let t = i as f64 * dt;
                let u = self.exact_velocity(t).expect("exact solution present");
                let p = self.exact_pressure(t).expect("exact solution present");
                state.push(u, p, k);
            }
            state.step = k - 1;
            state.time = (k - 1) as f64 * dt;
            return Ok(state);
        }

        let u0 = self.initial_velocity();
        self.check(&u0, 0, 0.0)?;
        let p0 = self.pressure_from(&u0, 0.0)?;
        state.push(u0.clone(), p0.clone(), k);
        if k == 1 {
            return Ok(state);
        }
        let m = self.spin_up_substeps();
        let h = dt / m as f64;
        let euler = Weights::new(&SchemeSpec::int(1, 1))?;
        let bdf = Weights::new(&SchemeSpec::int(2, 3))?;
        let mut fine = StepperState { u: VecDeque::from([u0]), p: VecDeque::from([p0]), step: 0, time: 0.0 };
        for level in 1..k {
            for j in 0..m {
                let first = level == 1 && j == 0;
                let w = if first { &euler } else { &bdf };
                self.advance(w, h, &mut fine, 2).map_err(|e| match e {
                    Error::Blowup { reason, .. } => {
                        Error::Blowup { step: level, time: fine.time, reason: format!("spin-up: {reason}") }
                    }
                    other => other,
                })?;
            }
            let t = level as f64 * dt;
            fine.time = t;
            state.push(fine.velocity().clone(), fine.pressure().clone(), k);
        }
        state.step = k - 1;
        state.time = (k - 1) as f64 * dt;
        Ok(state)
    }

    pub fn stokes_step(&self, state: &mut StepperState) -> Result<()> {
        if self.cfg.mode != Mode::Stokes {
            return Err(Error::InvalidArgument("stokes_step on a Navier-Stokes configuration".into()));
        }
        self.advance(&self.w, self.cfg.dt, state, self.w.k)
    }

    pub fn nse_step(&self, state: &mut StepperState) -> Result<()> {
        if self.cfg.mode != Mode::NavierStokes {
            return Err(Error::InvalidArgument("nse_step on a Stokes configuration".into()));
        }
        self.advance(&self.w, self.cfg.dt, state, self.w.k)
    }

    pub fn step(&self, state: &mut StepperState) -> Result<()> {
        self.advance(&self.w, self.cfg.dt, state, self.w.k)
    }

    pub fn diagnostics(&self, state: &StepperState, wall_time: f64) -> StepDiagnostics {
        let b = &*self.basis;
        let u = state.velocity();
        let div = crate::spectral::div(b, u).l2_norm(b);
        let (gx, gy) = crate::spectral::grad(b, state.pressure().field());
        let gp = (gx.l2_norm(b).powi(2) + gy.l2_norm(b).powi(2)).sqrt();
        StepDiagnostics { energy: u.energy(b), div_norm: div, grad_p_norm: gp, wall_time }
    }

    /// Errors of the newest level, by quadrature on the Lobatto grid.
    pub fn errors(&self, state: &StepperState) -> Option<ErrorNorms> {
        let e = self.cfg.exact.as_ref()?;
        let b = &*self.basis;
        let t = state.time;
        let x = b.nodes();
        let w = b.weights();
        let g1 = transform_to_nodes(b, state.velocity().u1());
        let g2 = transform_to_nodes(b, state.velocity().u2());
        let gp = transform_to_nodes(b, state.pressure().field());
        let m = x.len();
        let (mut eu, mut pm_h, mut pm_e) = (0.0, 0.0, 0.0);
        let mut pe = DMatrix::zeros(m, m);
        for a in 0..m {
            for c in 0..m {
                let v = (e.velocity)(t, x[a], x[c]);
                let wt = w[a] * w[c];
                eu += wt * ((g1[(a, c)] - v[0]).powi(2) + (g2[(a, c)] - v[1]).powi(2));
                pe[(a, c)] = (e.pressure)(t, x[a], x[c]);
                pm_h += wt * gp[(a, c)];
                pm_e += wt * pe[(a, c)];
            }
        }
        let shift = (pm_h - pm_e) / 4.0;
        let mut ep = 0.0;
        for a in 0..m {
            for c in 0..m {
                ep += w[a] * w[c] * (gp[(a, c)] - pe[(a, c)] - shift).powi(2);
            }
        }
        Some(ErrorNorms { velocity: eu.sqrt(), pressure: ep.sqrt() })
    }

    fn row(&self, state: &StepperState, wall: f64) -> SeriesRow {
        SeriesRow {
            step: state.step,
            time: state.time,
            diag: self.diagnostics(state, wall),
            errors: self.errors(state),
        }
    }

    /// Spin-up plus the full time loop; `observe` sees every level.
    pub fn run_with(&self, mut observe: impl FnMut(&StepperState, &SeriesRow)) -> Result<RunOutcome> {
        let mut rows = Vec::new();
        let started = Instant::now();
        let mut state = match self.spin_up() {
            Ok(s) => s,
            Err(Error::Blowup { step, time, reason }) => {
                return Ok(RunOutcome { rows, blowup: Some(BlowupRecord { step, time, reason }), state: None });
            }
            Err(e) => return Err(e),
        };
        let spin_wall = started.elapsed().as_secs_f64();
        let t0 = state.time - (state.u.len() - 1) as f64 * self.cfg.dt;
        for (i, (u, p)) in state.u.iter().zip(&state.p).enumerate() {
            let lvl = StepperState {
                u: VecDeque::from([u.clone()]),
                p: VecDeque::from([p.clone()]),
                step: i,
                time: t0 + i as f64 * self.cfg.dt,
            };
            let row = self.row(&lvl, if i == 0 { 0.0 } else { spin_wall / (state.u.len() - 1) as f64 });
            observe(&lvl, &row);
            rows.push(row);
        }
        let total = self.cfg.n_steps();
        while state.step < total {
            let tic = Instant::now();
            match self.step(&mut state) {
                Ok(()) => {}
                Err(Error::Blowup { step, time, reason }) => {
                    return Ok(RunOutcome {
                        rows,
                        blowup: Some(BlowupRecord { step, time, reason }),
                        state: Some(state),
                    });
                }
                Err(e) => return Err(e),
            }
            let row = self.row(&state, tic.elapsed().as_secs_f64());
            observe(&state, &row);
            rows.push(row);
        }
        Ok(RunOutcome { rows, blowup: None, state: Some(state) })
    }

    pub fn run(&self) -> Result<RunOutcome> {
        self.run_with(|_, _| {})
    }

    /// Galerkin residual of the momentum equation with the given `k + 1`
    /// velocity and `k` pressure levels (oldest first) in place of the
    /// discrete solution; `t_n` is the time of the last pressure level.
    pub fn momentum_residual(&self, u: &[VelocityField], p: &[PressureField], t_n: f64) -> Result<f64> {
        let b = &*self.basis;
        let w = &self.w;
        let k = w.k;
        if u.len() != k + 1 || p.len() != k {
            return Err(Error::LengthMismatch { what: "residual levels".into(), expected: k + 1, got: u.len() });
        }
        let dt = self.cfg.dt;
        let nu = self.cfg.nu;
        let n = b.n_full();
        let leg: Vec<(DMatrix<f64>, DMatrix<f64>)> =
            u.iter().map(|v| (v.u1().to_legendre(b), v.u2().to_legendre(b))).collect();
        let (mut r1, mut r2) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
        let (mut bu1, mut bu2) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
        let (mut c1, mut c2, mut cp) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n));
        for q in 0..=k {
            r1 += &leg[q].0 * (w.a[q] / dt);
            r2 += &leg[q].1 * (w.a[q] / dt);
        }
        for q in 0..k {
            bu1 += &leg[q + 1].0 * w.b[q];
            bu2 += &leg[q + 1].1 * w.b[q];
            c1 += &leg[q].0 * w.c[q];
            c2 += &leg[q].1 * w.c[q];
            cp += p[q].field().coeffs() * w.c[q];
        }
        r1 -= lap(b, &bu1) * nu;
        r2 -= lap(b, &bu2) * nu;
        r1 += dx(b, &cp);
        r2 += dy(b, &cp);
        if self.cfg.mode == Mode::NavierStokes {
            let (n1, n2) = advect_legendre(b, &c1, &c2);
            r1 += n1;
            r2 += n2;
        }
        if let Some((f1, f2)) = self.forcing_legendre(t_n + w.beta * dt) {
            r1 -= f1;
            r2 -= f2;
        }
        let g1 = crate::spectral::galerkin_load(b, &Field2D::full(r1));
        let g2 = crate::spectral::galerkin_load(b, &Field2D::full(r2));
        Ok((g1.norm_squared() + g2.norm_squared()).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_cfg(mode: Mode) -> RunConfig {
        let mut c = RunConfig::new(SchemeSpec::int(3, 6), 0.1, 0.05, 0.2, 8, mode);
        c.initial = Some(Arc::new(|_, _, _| [0.0, 0.0]));
        c
    }

    #[test]
    fn zero_state_stays_zero() {
        for mode in [Mode::Stokes, Mode::NavierStokes] {
            let s = Solver::new(zero_cfg(mode)).unwrap();
            let out = s.run().unwrap();
            assert!(out.blowup.is_none());
            assert_eq!(out.rows.len(), 5);
            for r in &out.rows {
                assert_eq!(r.diag.energy, 0.0);
                assert_eq!(r.diag.grad_p_norm, 0.0);
            }
        }
    }

    #[test]
    fn wrong_mode_step_rejected() {
        let s = Solver::new(zero_cfg(Mode::Stokes)).unwrap();
        let mut st = s.spin_up().unwrap();
        assert_eq!(st.u.len(), 3);
        assert!(s.nse_step(&mut st).is_err());
        assert!(s.stokes_step(&mut st).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut c = zero_cfg(Mode::Stokes);
        c.dt = 0.0;
        assert!(c.validate().is_err());
        let mut c = zero_cfg(Mode::Stokes);
        c.initial = None;
        assert!(c.validate().is_err());
        let c = zero_cfg(Mode::Stokes);
        assert_eq!(c.n_steps(), 4);
    }

    #[test]
    fn csv_header_without_errors() {
        let s = Solver::new(zero_cfg(Mode::Stokes)).unwrap();
        let out = s.run().unwrap();
        let csv = series_csv(&out.rows);
        assert!(csv.starts_with("step,time,energy,div_norm,grad_p_norm\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
