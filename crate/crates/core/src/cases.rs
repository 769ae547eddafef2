//! Benchmark problems, their exact or reference solutions, error norms and
//! the grid-convergence driver.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::boundary::{BoundaryCondition, DampedWave};
use crate::error::{Error, Result};
use crate::flux::wave_speed;
use crate::integrator::{DtRule, Solver};
use crate::mesh::{FieldPair, Grid, SchemeConfig, VesselGeometry, GHOST_WIDTH};

pub const RHO_BLOOD: f64 = 1060.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseName {
    Tourniquet,
    Wave,
    EternalRest,
    PulseToExpansion,
    PulseFromExpansion,
    WaveDamping,
}

impl CaseName {
    pub const ALL: [CaseName; 6] = [
        CaseName::Tourniquet,
        CaseName::Wave,
        CaseName::EternalRest,
        CaseName::PulseToExpansion,
        CaseName::PulseFromExpansion,
        CaseName::WaveDamping,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseName::Tourniquet => "tourniquet",
            CaseName::Wave => "wave",
            CaseName::EternalRest => "eternal_rest",
            CaseName::PulseToExpansion => "pulse_to_expansion",
            CaseName::PulseFromExpansion => "pulse_from_expansion",
            CaseName::WaveDamping => "wave_damping",
        }
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        CaseName::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| {
                let names: Vec<_> = CaseName::ALL.iter().map(|c| c.as_str()).collect();
                Error::Usage(format!("unknown case '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

impl std::fmt::Display for CaseName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shape of the initial radius bump of the wave case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveProfile {
    /// `sin(pi (x - 0.4L)/(0.2L))` on `[0.4L, 0.6L]`. Has slope jumps at the ends.
    #[default]
    SineBump,
    /// `exp(-((x - L/2)/(0.05L))^2)`, smooth; for clean convergence studies.
    Gaussian,
}

impl FromStr for WaveProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" | "sine_bump" => Ok(WaveProfile::SineBump),
            "gaussian" => Ok(WaveProfile::Gaussian),
            _ => Err(Error::Usage(format!("unknown wave profile '{s}' (expected sine or gaussian)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub r0: f64,
    pub eps: f64,
    pub length: f64,
    pub profile: WaveProfile,
}

impl WaveParams {
    /// Bump `Phi`, scaled by `R0`, so that `R(x, 0) = R0 + eps Phi(x)`.
    pub fn phi(&self, x: f64) -> f64 {
        match self.profile {
            WaveProfile::SineBump => {
                let (a, b) = (0.4 * self.length, 0.6 * self.length);
                if (a..=b).contains(&x) {
                    self.r0 * (PI * (x - a) / (0.2 * self.length)).sin()
                } else {
                    0.0
                }
            }
            WaveProfile::Gaussian => {
                let z = (x - 0.5 * self.length) / (0.05 * self.length);
                self.r0 * (-z * z).exp()
            }
        }
    }
}

/// Aneurism: smooth bulge of height `delta_r` between `x1` and `x4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AneurismParams {
    pub r_tilde: f64,
    pub delta_r: f64,
    pub length: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl AneurismParams {
    pub fn radius(&self, x: f64) -> f64 {
        let p = self;
        if x <= p.x1 || x >= p.x4 {
            p.r_tilde
        } else if x <= p.x2 {
            p.r_tilde
                + 0.5 * p.delta_r * (((x - p.x1) / (p.x2 - p.x1) * PI - 0.5 * PI).sin() + 1.0)
        } else if x <= p.x3 {
            p.r_tilde + p.delta_r
        } else {
            p.r_tilde + 0.5 * p.delta_r * (((x - p.x3) / (p.x4 - p.x3) * PI).cos() + 1.0)
        }
    }
}

/// Expansion from `r_right + delta_r` (left) to `r_right` over `[x1, x2]`
/// with a sine pulse of relative amplitude `eps` on `[pulse_start, pulse_start + 0.2L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub r_right: f64,
    pub delta_r: f64,
    pub length: f64,
    pub x1: f64,
    pub x2: f64,
    pub eps: f64,
    pub pulse_start: f64,
}

impl PulseParams {
    pub fn rest_radius(&self, x: f64) -> f64 {
        if x <= self.x1 {
            self.r_right + self.delta_r
        } else if x <= self.x2 {
            self.r_right + 0.5 * self.delta_r * (1.0 + ((x - self.x1) / (self.x2 - self.x1) * PI).cos())
        } else {
            self.r_right
        }
    }

    pub fn pulse_end(&self) -> f64 {
        self.pulse_start + 0.2 * self.length
    }

    pub fn initial_radius(&self, x: f64) -> f64 {
        let r0 = self.rest_radius(x);
        if (self.pulse_start..=self.pulse_end()).contains(&x) {
            r0 * (1.0 + self.eps * (PI * (x - self.pulse_start) / (0.2 * self.length)).sin())
        } else {
            r0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    pub r0: f64,
    pub q_amp: f64,
    pub t_pulse: f64,
    pub cf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseKind {
    Tourniquet { r_left: f64, r_right: f64 },
    Wave(WaveParams),
    EternalRest(AneurismParams),
    Pulse(PulseParams),
    WaveDamping(DampingParams),
}

/// A benchmark: domain, constants, initial and boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub name: CaseName,
    pub x_min: f64,
    pub x_max: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub k: f64,
    pub rho: f64,
    pub kind: CaseKind,
    pub bc_left: BoundaryCondition,
    pub bc_right: BoundaryCondition,
}

/// Builds a benchmark. `cf` is only used by the wave-damping case.
pub fn build_case(name: CaseName, cf: f64) -> Result<CaseSpec> {
    let tr = BoundaryCondition::Transmissive;
    let spec = match name {
        CaseName::Tourniquet => CaseSpec {
            name,
            x_min: -0.04,
            x_max: 0.04,
            t_end: 0.005,
            snapshots: vec![0.0, 0.005],
            k: 1e7,
            rho: RHO_BLOOD,
            kind: CaseKind::Tourniquet {
                r_left: 5e-3,
                r_right: 4e-3,
            },
            bc_left: tr,
            bc_right: tr,
        },
        CaseName::Wave => CaseSpec {
            name,
            x_min: 0.0,
            x_max: 0.16,
            t_end: 0.006,
            snapshots: vec![0.0, 0.002, 0.004, 0.006],
            k: 1e8,
            rho: RHO_BLOOD,
            kind: CaseKind::Wave(WaveParams {
                r0: 4e-3,
                eps: 5e-3,
                length: 0.16,
                profile: WaveProfile::SineBump,
            }),
            bc_left: tr,
            bc_right: tr,
        },
        CaseName::EternalRest => CaseSpec {
            name,
            x_min: 0.0,
            x_max: 0.14,
            t_end: 5.0,
            snapshots: vec![0.0, 5.0],
            k: 1e8,
            rho: RHO_BLOOD,
            kind: CaseKind::EternalRest(AneurismParams {
                r_tilde: 4e-3,
                delta_r: 1e-3,
                length: 0.14,
                x1: 1e-2,
                x2: 3.05e-2,
                x3: 4.95e-2,
                x4: 7e-2,
            }),
            bc_left: tr,
            bc_right: tr,
        },
        CaseName::PulseToExpansion | CaseName::PulseFromExpansion => {
            let length = 0.16;
            let pulse_start = if name == CaseName::PulseToExpansion {
                0.65 * length
            } else {
                0.15 * length
            };
            CaseSpec {
                name,
                x_min: 0.0,
                x_max: length,
                t_end: 0.006,
                snapshots: vec![0.0, 0.002, 0.006],
                k: 1e8,
                rho: RHO_BLOOD,
                kind: CaseKind::Pulse(PulseParams {
                    r_right: 4e-3,
                    delta_r: 1e-3,
                    length,
                    x1: 19.0 * length / 40.0,
                    x2: length / 2.0,
                    eps: 5e-3,
                    pulse_start,
                }),
                bc_left: tr,
                bc_right: tr,
            }
        }
        CaseName::WaveDamping => {
            if !(cf >= 0.0) || !cf.is_finite() {
                return Err(Error::Config(format!("friction coefficient {cf} must be >= 0")));
            }
            let p = DampingParams {
                r0: 4e-3,
                q_amp: 3.45e-7,
                t_pulse: 0.5,
                cf,
            };
            let (k, rho) = (1e8, RHO_BLOOD);
            let wave = damped_wave(&p, k, rho);
            CaseSpec {
                name,
                x_min: 0.0,
                x_max: 3.0,
                t_end: 25.0,
                snapshots: vec![25.0],
                k,
                rho,
                kind: CaseKind::WaveDamping(p),
                bc_left: BoundaryCondition::InflowDischarge {
                    q_amp: p.q_amp,
                    omega: wave.omega,
                },
                bc_right: BoundaryCondition::OutflowDampedWave(wave),
            }
        }
    };
    Ok(spec)
}

/// Wave number and decay rate of the linearized frictional wave.
pub fn damped_wave(p: &DampingParams, k: f64, rho: f64) -> DampedWave {
    let omega = 2.0 * PI / p.t_pulse;
    let c0 = (k * p.r0 / (2.0 * rho)).sqrt();
    let a0 = PI * p.r0 * p.r0;
    let modulus = ((omega / c0).powi(4) + (omega * p.cf / (a0 * c0 * c0)).powi(2)).powf(0.25);
    let phase = 0.5 * (-p.cf / (a0 * omega)).atan();
    DampedWave {
        q_amp: p.q_amp,
        omega,
        k_r: modulus * phase.cos(),
        k_i: modulus * phase.sin(),
    }
}

/// Exact discharge of the damping-wave case.
pub fn exact_damping_wave(x: f64, t: f64, p: &DampingParams, k: f64, rho: f64) -> f64 {
    damped_wave(p, k, rho).discharge(x, t)
}

/// Linear-acoustics solution of the wave case: `(R, u)`.
///
/// Each travelling half carries `u = +-2 c0 R'/R0`, the Riemann-invariant
/// relation of the linearized system.
pub fn exact_wave_solution(x: f64, t: f64, p: &WaveParams, k: f64, rho: f64) -> (f64, f64) {
    let c0 = (k * p.r0 / (2.0 * rho)).sqrt();
    let right = p.phi(x - c0 * t);
    let left = p.phi(x + c0 * t);
    let r = p.r0 + 0.5 * p.eps * (right + left);
    let u = -p.eps * (c0 / p.r0) * (-right + left);
    (r, u)
}

impl CaseSpec {
    /// Replaces the bump shape of a wave case; other cases are unchanged.
    pub fn with_wave_profile(mut self, profile: WaveProfile) -> Self {
        if let CaseKind::Wave(p) = &mut self.kind {
            p.profile = profile;
        }
        self
    }

    pub fn rest_radius(&self, x: f64) -> f64 {
        match &self.kind {
            CaseKind::Tourniquet { r_right, .. } => *r_right,
            CaseKind::Wave(p) => p.r0,
            CaseKind::EternalRest(p) => p.radius(x),
            CaseKind::Pulse(p) => p.rest_radius(x),
            CaseKind::WaveDamping(p) => p.r0,
        }
    }

    /// `(A, Q)` at `t = 0`.
    pub fn initial_state(&self, x: f64) -> (f64, f64) {
        let area = |r: f64| PI * r * r;
        match &self.kind {
            CaseKind::Tourniquet { r_left, r_right } => {
                (area(if x <= 0.0 { *r_left } else { *r_right }), 0.0)
            }
            CaseKind::Wave(p) => {
                let s = 1.0 + p.eps * p.phi(x) / p.r0;
                (area(p.r0) * s * s, 0.0)
            }
            CaseKind::EternalRest(p) => (area(p.radius(x)), 0.0),
            CaseKind::Pulse(p) => (area(p.initial_radius(x)), 0.0),
            CaseKind::WaveDamping(p) => (area(p.r0), 0.0),
        }
    }

    /// Exact `(A, Q)` where one is known.
    pub fn exact_state(&self, x: f64, t: f64) -> Option<(f64, f64)> {
        match &self.kind {
            CaseKind::Wave(p) => {
                let (r, u) = exact_wave_solution(x, t, p, self.k, self.rho);
                let a = PI * r * r;
                Some((a, a * u))
            }
            CaseKind::EternalRest(p) => Some((PI * p.radius(x).powi(2), 0.0)),
            _ => None,
        }
    }

    pub fn grid(&self, n_cells: usize) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, n_cells, GHOST_WIDTH)
    }

    /// Solver and initial state on `n_cells` cells.
    pub fn setup(&self, n_cells: usize, config: &SchemeConfig) -> Result<(Solver, FieldPair)> {
        let grid = self.grid(n_cells)?;
        let geom = VesselGeometry::sample(|x| self.rest_radius(x), &grid, self.k, self.rho)?;
        let mut state = FieldPair::from_fn(&grid, |x| self.initial_state(x));
        let mut solver = Solver::new(grid, geom, config.clone())?;
        solver.bc_left = self.bc_left;
        solver.bc_right = self.bc_right;
        if let CaseKind::WaveDamping(p) = &self.kind {
            solver.friction = p.cf;
        }
        solver.fill_ghosts(&mut state, 0.0);
        Ok((solver, state))
    }

    /// Pulse amplitude `eps R0` at the pulse location, where defined.
    pub fn pulse_amplitude(&self) -> Option<f64> {
        match &self.kind {
            CaseKind::Wave(p) => Some(p.eps * p.r0),
            CaseKind::Pulse(p) => Some(p.eps * p.rest_radius(p.pulse_start + 0.1 * p.length)),
            _ => None,
        }
    }

    pub fn rest_wave_speed(&self, x: f64) -> f64 {
        let r = self.rest_radius(x);
        wave_speed(PI * r * r, self.k, self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub linf: f64,
}

/// `l1 = dx * sum |num - ref|`, `linf = max |num - ref|`.
pub fn error_norms(numerical: &[f64], reference: &[f64], dx: f64) -> Norms {
    debug_assert_eq!(numerical.len(), reference.len());
    let mut n = Norms::default();
    for (a, b) in numerical.iter().zip(reference) {
        let e = (a - b).abs();
        n.l1 += e;
        n.linf = n.linf.max(e);
    }
    n.l1 *= dx;
    n
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub n_cells: usize,
    pub a: Norms,
    pub q: Norms,
    pub r: Norms,
}

/// Errors of the interior state against nodal reference values of (A, Q).
pub fn error_report(grid: &Grid, state: &FieldPair, ref_a: &[f64], ref_q: &[f64]) -> ErrorReport {
    let num_r: Vec<f64> = state.interior_a(grid).iter().map(|a| (a / PI).sqrt()).collect();
    let ref_r: Vec<f64> = ref_a.iter().map(|a| (a / PI).sqrt()).collect();
    ErrorReport {
        n_cells: grid.n_cells,
        a: error_norms(state.interior_a(grid), ref_a, grid.dx),
        q: error_norms(state.interior_q(grid), ref_q, grid.dx),
        r: error_norms(&num_r, &ref_r, grid.dx),
    }
}

/// Errors against the case's exact solution at time `t`.
pub fn exact_error_report(case: &CaseSpec, grid: &Grid, state: &FieldPair, t: f64) -> Option<ErrorReport> {
    let (ra, rq): (Vec<f64>, Vec<f64>) = grid
        .interior_coords()
        .into_iter()
        .map(|x| case.exact_state(x, t))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .unzip();
    Some(error_report(grid, state, &ra, &rq))
}

/// `log(e_prev / e) / log(n / n_prev)` between successive levels; `None` for
/// the first level and wherever an error vanishes.
pub fn observed_orders(levels: &[usize], errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None; errors.len()];
    for i in 1..errors.len() {
        let (e0, e1) = (errors[i - 1], errors[i]);
        if e0 > 0.0 && e1 > 0.0 && e0.is_finite() && e1.is_finite() {
            out[i] = Some((e0 / e1).ln() / (levels[i] as f64 / levels[i - 1] as f64).ln());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub l1_a: f64,
    pub order_a: Option<f64>,
    pub l1_q: f64,
    pub order_q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub case: CaseName,
    pub t: f64,
    pub dt_rule: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_errors(case: CaseName, t: f64, dt_rule: String, levels: &[usize], l1_a: &[f64], l1_q: &[f64]) -> Self {
        let oa = observed_orders(levels, l1_a);
        let oq = observed_orders(levels, l1_q);
        let rows = levels
            .iter()
            .enumerate()
            .map(|(i, &n)| ConvergenceRow {
                n_cells: n,
                l1_a: l1_a[i],
                order_a: oa[i],
                l1_q: l1_q[i],
                order_q: oq[i],
            })
            .collect();
        ConvergenceTable { case, t, dt_rule, rows }
    }
}

/// Grid-refinement study against the exact solution at time `t`.
///
/// Time steps follow [`DtRule::AccuracyScaled`] relative to the coarsest
/// level so that the temporal error stays below the spatial one.
pub fn convergence_study(case: &CaseSpec, levels: &[usize], t: f64, config: &SchemeConfig) -> Result<ConvergenceTable> {
    if levels.len() < 2 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage("convergence levels must be increasing, at least two".into()));
    }
    let coarse_dx = (case.x_max - case.x_min) / levels[0] as f64;
    let rule = DtRule::AccuracyScaled { reference_dx: coarse_dx };
    let mut l1_a = Vec::new();
    let mut l1_q = Vec::new();
    for &n in levels {
        let (mut solver, init) = case.setup(n, config)?;
        solver.dt_rule = rule;
        let out = solver.run_until(&init, 0.0, t, &[], |_, _| Ok(()))?;
        let rep = exact_error_report(case, &solver.grid, &out.state, t)
            .ok_or_else(|| Error::Usage(format!("case {} has no exact solution", case.name)))?;
        l1_a.push(rep.a.l1);
        l1_q.push(rep.q.l1);
    }
    Ok(ConvergenceTable::from_errors(case.name, t, rule.to_string(), levels, &l1_a, &l1_q))
}

/// Self-convergence study: the error of level `i` is measured against level
/// `i + 1` interpolated to the coarse nodes, so the table has one row fewer
/// than `levels`. Needs no exact solution.
pub fn self_convergence_study(case: &CaseSpec, levels: &[usize], t: f64, config: &SchemeConfig) -> Result<ConvergenceTable> {
    if levels.len() < 3 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage("self-convergence needs at least three increasing levels".into()));
    }
    let coarse_dx = (case.x_max - case.x_min) / levels[0] as f64;
    let rule = DtRule::AccuracyScaled { reference_dx: coarse_dx };
    let mut runs = Vec::new();
    for &n in levels {
        let (mut solver, init) = case.setup(n, config)?;
        solver.dt_rule = rule;
        let out = solver.run_until(&init, 0.0, t, &[], |_, _| Ok(()))?;
        runs.push((solver.grid, out.state));
    }
    let mut l1_a = Vec::new();
    let mut l1_q = Vec::new();
    for pair in runs.windows(2) {
        let (g, s) = &pair[0];
        let reference = FineReference {
            grid: pair[1].0.clone(),
            snapshots: vec![(t, pair[1].1.clone())],
        };
        let (ra, rq) = reference.restrict(0, g);
        let rep = error_report(g, s, &ra, &rq);
        l1_a.push(rep.a.l1);
        l1_q.push(rep.q.l1);
    }
    let used = &levels[..levels.len() - 1];
    Ok(ConvergenceTable::from_errors(case.name, t, format!("{rule}, self-reference"), used, &l1_a, &l1_q))
}

/// Six-point Lagrange interpolation of interior nodal values at `x`, the
/// stencil shifted inward near the domain ends.
pub fn interpolate(grid: &Grid, values: &[f64], x: f64) -> f64 {
    const P: usize = 6;
    let n = grid.n_cells;
    debug_assert_eq!(values.len(), n);
    let s = (x - grid.x_min) / grid.dx - 0.5;
    let base = (s.floor() as isize - (P as isize / 2 - 1)).clamp(0, (n - P) as isize) as usize;
    let mut sum = 0.0;
    for i in 0..P {
        let xi = (base + i) as f64;
        let mut w = 1.0;
        for m in 0..P {
            if m != i {
                let xm = (base + m) as f64;
                w *= (s - xm) / (xi - xm);
            }
        }
        sum += w * values[base + i];
    }
    sum
}

/// Fine-grid solution used as a stand-in for an exact one.
#[derive(Debug, Clone)]
pub struct FineReference {
    pub grid: Grid,
    /// Interior states at the requested times, in order.
    pub snapshots: Vec<(f64, FieldPair)>,
}

impl FineReference {
    /// Restricts the snapshot at index `k` to the interior nodes of `coarse`:
    /// returns `(A, Q)` nodal arrays.
    pub fn restrict(&self, k: usize, coarse: &Grid) -> (Vec<f64>, Vec<f64>) {
        let st = &self.snapshots[k].1;
        let a = st.interior_a(&self.grid);
        let q = st.interior_q(&self.grid);
        coarse
            .interior_coords()
            .into_iter()
            .map(|x| (interpolate(&self.grid, a, x), interpolate(&self.grid, q, x)))
            .unzip()
    }
}

/// Runs the case on `n_fine` cells and keeps the states at `times`.
pub fn reference_solution(case: &CaseSpec, n_fine: usize, config: &SchemeConfig, times: &[f64]) -> Result<FineReference> {
    let (solver, init) = case.setup(n_fine, config)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let mut snapshots = Vec::new();
    solver.run_until(&init, 0.0, t_end, times, |t, s| {
        snapshots.push((t, s.clone()));
        Ok(())
    })?;
    Ok(FineReference {
        grid: solver.grid,
        snapshots,
    })
}
