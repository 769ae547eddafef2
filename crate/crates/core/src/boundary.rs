//! Ghost-node filling.

use crate::mesh::{FieldPair, Grid};

/// Parameters of the damped discharge wave
/// `Q = Q_amp sin(omega t - k_r x) exp(k_i x)` behind the front `k_r x <= omega t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedWave {
    pub q_amp: f64,
    pub omega: f64,
    pub k_r: f64,
    pub k_i: f64,
}

impl DampedWave {
    pub fn discharge(&self, x: f64, t: f64) -> f64 {
        if self.k_r * x > self.omega * t {
            0.0
        } else {
            self.q_amp * (self.omega * t - self.k_r * x).sin() * (self.k_i * x).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Zeroth-order extrapolation of (A, Q).
    Transmissive,
    /// Imposed `Q = Q_amp sin(omega t)`, A extrapolated linearly.
    InflowDischarge { q_amp: f64, omega: f64 },
    /// Imposed damped-wave discharge at the ghost coordinates, A extrapolated
    /// linearly.
    OutflowDampedWave(DampedWave),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl BoundaryCondition {
    fn apply(&self, state: &mut FieldPair, grid: &Grid, side: Side, t: f64) {
        let g = grid.ghost_width;
        let n = grid.n_cells;
        let (ghosts, edge, inner) = match side {
            Side::Left => (0..g, g, g + 1),
            Side::Right => (g + n..g + n + g, g + n - 1, g + n - 2),
        };
        let (a_edge, q_edge) = (state.a[edge], state.q[edge]);
        // Imposed-discharge ends see steep smooth A gradients in the damped
        // regime; a constant A there costs a first-order error.
        let slope = match self {
            BoundaryCondition::Transmissive => 0.0,
            _ => a_edge - state.a[inner],
        };
        for i in ghosts {
            state.a[i] = a_edge + slope * i.abs_diff(edge) as f64;
            state.q[i] = match self {
                BoundaryCondition::Transmissive => q_edge,
                BoundaryCondition::InflowDischarge { q_amp, omega } => q_amp * (omega * t).sin(),
                BoundaryCondition::OutflowDampedWave(w) => w.discharge(grid.storage_x(i), t),
            };
        }
    }
}

pub fn fill_ghosts(
    state: &mut FieldPair,
    grid: &Grid,
    left: &BoundaryCondition,
    right: &BoundaryCondition,
    t: f64,
) {
    left.apply(state, grid, Side::Left, t);
    right.apply(state, grid, Side::Right, t);
}
