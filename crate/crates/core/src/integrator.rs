//! Semi-discrete right-hand side and third-order SSP Runge-Kutta stepping.

use crate::boundary::{fill_ghosts, BoundaryCondition};
use crate::error::{Error, Result};
use crate::flux::{global_alphas, reconstruct_fluxes, wave_speed, GlobalAlphas};
use crate::mesh::{FieldPair, Grid, Mode, SchemeConfig, VesselGeometry};
use crate::source::{balanced_source, divergence, friction_source, pointwise_source_nonwb, FrozenOperator};

/// Quantities that can be advanced by [`ssp_rk3_step`].
pub trait RkState: Clone {
    /// `self + dt * k`
    fn euler(&self, dt: f64, k: &Self) -> Self;
    /// `self + w (other - self)`, a convex blend for `w` in [0, 1].
    fn blend(&self, w: f64, other: &Self) -> Self;
}

impl RkState for f64 {
    fn euler(&self, dt: f64, k: &Self) -> Self {
        self + dt * k
    }

    fn blend(&self, w: f64, other: &Self) -> Self {
        self + w * (other - self)
    }
}

impl RkState for Vec<f64> {
    fn euler(&self, dt: f64, k: &Self) -> Self {
        self.iter().zip(k).map(|(u, k)| u + dt * k).collect()
    }

    fn blend(&self, w: f64, other: &Self) -> Self {
        self.iter().zip(other).map(|(u, v)| u + w * (v - u)).collect()
    }
}

impl RkState for FieldPair {
    fn euler(&self, dt: f64, k: &Self) -> Self {
        FieldPair {
            a: self.a.euler(dt, &k.a),
            q: self.q.euler(dt, &k.q),
        }
    }

    fn blend(&self, w: f64, other: &Self) -> Self {
        FieldPair {
            a: self.a.blend(w, &other.a),
            q: self.q.blend(w, &other.q),
        }
    }
}

/// Stage weights of the Shu-Osher form: each stage is a convex combination of
/// the old solution and a forward-Euler step.
pub const RK3_STAGE_WEIGHTS: [f64; 3] = [1.0, 0.25, 2.0 / 3.0];
/// Stage times as fractions of `dt`.
pub const RK3_STAGE_TIMES: [f64; 3] = [0.0, 1.0, 0.5];

/// One SSP-RK3 step. `rhs(stage_state, stage_time_fraction, stage_index)`
/// may mutate the stage state (to fill ghost nodes) before evaluating.
pub fn ssp_rk3_step<S, F>(u: &S, dt: f64, mut rhs: F) -> Result<S>
where
    S: RkState,
    F: FnMut(&mut S, f64, u8) -> Result<S>,
{
    let mut u0 = u.clone();
    let k0 = rhs(&mut u0, RK3_STAGE_TIMES[0], 1).map_err(|e| e.with_stage(1))?;
    let mut u1 = u0.euler(dt, &k0);
    let k1 = rhs(&mut u1, RK3_STAGE_TIMES[1], 2).map_err(|e| e.with_stage(2))?;
    let mut u2 = u0.blend(RK3_STAGE_WEIGHTS[1], &u1.euler(dt, &k1));
    let k2 = rhs(&mut u2, RK3_STAGE_TIMES[2], 3).map_err(|e| e.with_stage(3))?;
    Ok(u0.blend(RK3_STAGE_WEIGHTS[2], &u2.euler(dt, &k2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhsEvaluation {
    /// Interior tendencies.
    pub da_dt: Vec<f64>,
    pub dq_dt: Vec<f64>,
    /// CFL-admissible step from this state.
    pub dt_max: f64,
}

/// Time-step rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtRule {
    /// `dt = cfl dx / max(|u| + c)`
    Cfl,
    /// CFL step scaled by `(dx / reference_dx)^{2/3}`, so the RK3 error
    /// shrinks like `dx^5` along with the spatial error.
    AccuracyScaled { reference_dx: f64 },
}

impl std::fmt::Display for DtRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DtRule::Cfl => write!(f, "dt = cfl*dx/max(|u|+c)"),
            DtRule::AccuracyScaled { reference_dx } => write!(
                f,
                "dt = cfl*dx/max(|u|+c) * (dx/{reference_dx:e})^(2/3)"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub max_speed: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: FieldPair,
    pub t: f64,
    pub steps: usize,
    pub log: Vec<StepRecord>,
    pub dt_rule: DtRule,
}

/// Everything needed to advance one vessel in time.
#[derive(Debug, Clone)]
pub struct Solver {
    pub grid: Grid,
    pub geom: VesselGeometry,
    pub config: SchemeConfig,
    pub bc_left: BoundaryCondition,
    pub bc_right: BoundaryCondition,
    /// Linear friction coefficient `C_f` (m^2/s); 0 disables friction.
    pub friction: f64,
    pub dt_rule: DtRule,
}

impl Solver {
    pub fn new(grid: Grid, geom: VesselGeometry, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        if geom.a0.len() != grid.len() {
            return Err(Error::Config("geometry does not match grid".into()));
        }
        Ok(Solver {
            grid,
            geom,
            config,
            bc_left: BoundaryCondition::Transmissive,
            bc_right: BoundaryCondition::Transmissive,
            friction: 0.0,
            dt_rule: DtRule::Cfl,
        })
    }

    pub fn fill_ghosts(&self, state: &mut FieldPair, t: f64) {
        fill_ghosts(state, &self.grid, &self.bc_left, &self.bc_right, t);
    }

    fn max_speed(&self, state: &FieldPair, t: f64) -> Result<f64> {
        state.validate(&self.grid, t)?;
        let (k, rho) = (self.geom.k, self.geom.rho);
        let s = self
            .grid
            .interior()
            .map(|i| (state.q[i] / state.a[i]).abs() + wave_speed(state.a[i], k, rho))
            .fold(0.0, f64::max);
        if !(s > 0.0) {
            return Err(Error::Config("maximum wave speed is zero".into()));
        }
        Ok(s)
    }

    fn dt_from_speed(&self, speed: f64) -> f64 {
        let dt = self.config.cfl * self.grid.dx / speed;
        match self.dt_rule {
            DtRule::Cfl => dt,
            DtRule::AccuracyScaled { reference_dx } => dt * (self.grid.dx / reference_dx).powf(2.0 / 3.0),
        }
    }

    pub fn compute_dt(&self, state: &FieldPair) -> Result<f64> {
        Ok(self.dt_from_speed(self.max_speed(state, f64::NAN)?))
    }

    /// Flux reconstruction of the current stage; exposes the frozen operator
    /// used for the source.
    pub fn flux_sweep(&self, state: &FieldPair, t: f64) -> Result<(Vec<[f64; 2]>, FrozenOperator, GlobalAlphas)> {
        let alphas = global_alphas(state, &self.grid, self.geom.k, self.geom.rho, t)?;
        let (fluxes, op) = reconstruct_fluxes(state, &self.geom, &self.grid, &alphas, &self.config, t)?;
        Ok((fluxes, op, alphas))
    }

    /// Semi-discrete operator at time `t`. Ghost nodes must already hold the
    /// boundary values for `t`.
    pub fn semidiscrete_rhs(&self, state: &FieldPair, t: f64) -> Result<RhsEvaluation> {
        let (fluxes, op, _) = self.flux_sweep(state, t)?;
        let df = divergence(&fluxes, self.grid.dx);
        let src = match self.config.mode {
            Mode::WellBalanced => balanced_source(state, &self.geom, &self.grid, &op),
            Mode::NonWellBalanced => pointwise_source_nonwb(state, &self.geom, &self.grid),
        };
        let n = self.grid.n_cells;
        let mut da_dt = Vec::with_capacity(n);
        let mut dq_dt = Vec::with_capacity(n);
        for j in 0..n {
            da_dt.push(-df[j][0] + src[j][0]);
            dq_dt.push(-df[j][1] + src[j][1]);
        }
        if self.friction != 0.0 {
            for (d, s) in dq_dt.iter_mut().zip(friction_source(state, &self.grid, self.friction)) {
                *d += s[1];
            }
        }
        let dt_max = self.dt_from_speed(self.max_speed(state, t)?);
        Ok(RhsEvaluation { da_dt, dq_dt, dt_max })
    }

    /// Fills ghosts for `t` and evaluates the operator as a full-length
    /// tendency (zero in the ghost slots).
    fn stage_tendency(&self, state: &mut FieldPair, t: f64) -> Result<FieldPair> {
        self.fill_ghosts(state, t);
        let rhs = self.semidiscrete_rhs(state, t)?;
        let mut k = FieldPair::zeros(self.grid.len());
        let r = self.grid.interior();
        k.a[r.clone()].copy_from_slice(&rhs.da_dt);
        k.q[r].copy_from_slice(&rhs.dq_dt);
        Ok(k)
    }

    pub fn rk3_step(&self, state: &FieldPair, t: f64, dt: f64) -> Result<FieldPair> {
        let mut next = ssp_rk3_step(state, dt, |s, frac, _| self.stage_tendency(s, t + frac * dt))?;
        self.fill_ghosts(&mut next, t + dt);
        Ok(next)
    }

    /// Advances from `t0` to `t_end`. Steps are clipped to land exactly on
    /// every entry of `output_times` inside `[t0, t_end]`, where `observer` is
    /// called.
    pub fn run_until<O>(
        &self,
        initial: &FieldPair,
        t0: f64,
        t_end: f64,
        output_times: &[f64],
        mut observer: O,
    ) -> Result<RunOutcome>
    where
        O: FnMut(f64, &FieldPair) -> Result<()>,
    {
        if !(t_end >= t0) {
            return Err(Error::Config(format!("end time {t_end} precedes start {t0}")));
        }
        let mut outputs: Vec<f64> = output_times
            .iter()
            .copied()
            .filter(|&s| s >= t0 && s <= t_end)
            .collect();
        outputs.sort_by(f64::total_cmp);
        outputs.dedup();
        let mut next_out = outputs.iter().peekable();

        let mut state = initial.clone();
        self.fill_ghosts(&mut state, t0);
        state.validate(&self.grid, t0)?;
        let mut t = t0;
        let mut step = 0;
        let mut log = Vec::new();

        while next_out.peek().is_some_and(|&&s| s <= t) {
            observer(t, &state)?;
            next_out.next();
        }
        while t < t_end {
            let target = next_out.peek().map_or(t_end, |&&s| s.min(t_end));
            let speed = self.max_speed(&state, t)?;
            let mut dt = self.dt_from_speed(speed);
            let landing = t + dt >= target;
            if landing {
                dt = target - t;
            }
            state = self.rk3_step(&state, t, dt)?;
            step += 1;
            t = if landing { target } else { t + dt };
            if state.a.iter().chain(&state.q).any(|v| !v.is_finite()) {
                return Err(Error::BlowUp { step, time: t });
            }
            log.push(StepRecord {
                step,
                t,
                dt,
                max_speed: speed,
            });
            while next_out.peek().is_some_and(|&&s| s <= t) {
                observer(t, &state)?;
                next_out.next();
            }
        }
        Ok(RunOutcome {
            state,
            t,
            steps: step,
            log,
            dt_rule: self.dt_rule,
        })
    }
}
