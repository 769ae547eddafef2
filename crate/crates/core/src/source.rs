//! Source-term discretization.
//!
//! The geometric source `k A/(rho sqrt(pi)) d(sqrt A0)/dx` is split into
//! `k/(rho sqrt(pi)) (A - A0) d(sqrt A0)/dx + k/(3 rho sqrt(pi)) d(A0^{3/2})/dx`
//! and both derivatives are taken with the [`FrozenOperator`]: the linear
//! stencil obtained by freezing the WENO coefficients of the flux
//! reconstruction at the current stage. At `A = A0, Q = 0` the second piece
//! reproduces the flux difference operation for operation, so flux gradient
//! and source cancel exactly.

use crate::flux::{EigenSystem, Vec2};
use crate::mesh::{FieldPair, Grid, VesselGeometry};
use crate::weno::{ReconstructionResult, WINDOW};

/// Frozen reconstruction data at one interface `x_{j+1/2}`.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceCoeffs {
    pub eig: EigenSystem,
    /// Plus-part reconstruction per characteristic field, window `j-2..=j+2`.
    pub plus: [ReconstructionResult; 2],
    /// Minus-part reconstruction per characteristic field, window `j-1..=j+3`.
    pub minus: [ReconstructionResult; 2],
}

/// Linear derivative operator `D_f` built from the frozen coefficients of the
/// `n_cells + 1` interfaces of the current flux evaluation.
#[derive(Debug, Clone)]
pub struct FrozenOperator {
    pub dx: f64,
    pub ghost_width: usize,
    /// Interface `m` sits between storage nodes `ghost_width - 1 + m` and
    /// `ghost_width + m`.
    pub interfaces: Vec<InterfaceCoeffs>,
}

impl FrozenOperator {
    pub fn n_cells(&self) -> usize {
        self.interfaces.len() - 1
    }

    /// Left storage node of interface `m`.
    #[inline]
    pub fn interface_node(&self, m: usize) -> usize {
        self.ghost_width - 1 + m
    }

    /// Interface values of the vector grid function `(0, g)` in physical
    /// variables: project with the interface's left eigenvectors, apply half of
    /// the plus and half of the minus coefficients, project back.
    pub fn interface_values(&self, g: &[f64]) -> Vec<Vec2> {
        self.interfaces
            .iter()
            .enumerate()
            .map(|(m, ic)| {
                let j = self.interface_node(m);
                let mut proj = [[0.0; WINDOW + 1]; 2];
                for (o, n) in (j - 2..=j + 3).enumerate() {
                    let w = ic.eig.to_characteristic([0.0, g[n]]);
                    proj[0][o] = 0.5 * w[0];
                    proj[1][o] = 0.5 * w[1];
                }
                let mut out = [0.0; 2];
                for f in 0..2 {
                    let wp: &[f64; WINDOW] = proj[f][..WINDOW].try_into().unwrap();
                    let wm: &[f64; WINDOW] = proj[f][1..].try_into().unwrap();
                    out[f] = ic.plus[f].apply(wp) + ic.minus[f].apply(wm);
                }
                ic.eig.from_characteristic(out)
            })
            .collect()
    }

    /// `D_f((0, g))` at every interior node.
    pub fn derivative(&self, g: &[f64]) -> Vec<Vec2> {
        divergence(&self.interface_values(g), self.dx)
    }

    /// Scalar stencil row `beta` of characteristic field `field` at interior
    /// node `j`, over nodes `j-3..=j+3`. Ignores the change of eigenbasis
    /// between the two interfaces.
    pub fn row(&self, j: usize, field: usize) -> [f64; 7] {
        let (left, right) = (&self.interfaces[j], &self.interfaces[j + 1]);
        assemble_row(
            &left.plus[field].combined_coeffs,
            &right.plus[field].combined_coeffs,
            &left.minus[field].combined_coeffs,
            &right.minus[field].combined_coeffs,
            self.dx,
        )
    }

    /// Applies the scalar rows of `field` to `g` (storage layout).
    pub fn apply_scalar(&self, field: usize, g: &[f64]) -> Vec<f64> {
        (0..self.n_cells())
            .map(|j| {
                let i = self.ghost_width + j;
                self.row(j, field)
                    .iter()
                    .zip(&g[i - 3..=i + 3])
                    .map(|(b, v)| b * v)
                    .sum()
            })
            .collect()
    }
}

/// Difference of interface values divided by `dx`.
pub fn divergence(interface_values: &[Vec2], dx: f64) -> Vec<Vec2> {
    interface_values
        .windows(2)
        .map(|w| [(w[1][0] - w[0][0]) / dx, (w[1][1] - w[0][1]) / dx])
        .collect()
}

/// Derivative stencil over `j-3..=j+3` from the plus/minus coefficient rows at
/// `x_{j-1/2}` and `x_{j+1/2}`:
/// `beta = [(plus_R - plus_L) + (minus_R - minus_L)] / (2 dx)`.
pub fn assemble_row(
    plus_left: &[f64; WINDOW],
    plus_right: &[f64; WINDOW],
    minus_left: &[f64; WINDOW],
    minus_right: &[f64; WINDOW],
    dx: f64,
) -> [f64; 7] {
    let mut beta = [0.0; 7];
    for l in 0..WINDOW {
        // plus at j+1/2 covers j-2..j+2 (offset 1), at j-1/2 covers j-3..j+1 (offset 0)
        beta[l + 1] += plus_right[l];
        beta[l] -= plus_left[l];
        // minus at j+1/2 covers j-1..j+3 (offset 2), at j-1/2 covers j-2..j+2 (offset 1)
        beta[l + 2] += minus_right[l];
        beta[l + 1] -= minus_left[l];
    }
    let s = 0.5 / dx;
    beta.map(|b| b * s)
}

/// Well-balanced geometric source at the interior nodes.
pub fn balanced_source(state: &FieldPair, geom: &VesselGeometry, grid: &Grid, op: &FrozenOperator) -> Vec<Vec2> {
    if geom.is_uniform() {
        return vec![[0.0; 2]; grid.n_cells];
    }
    let pc = geom.pressure_coef();
    let s2: Vec<f64> = geom.a0_32.iter().map(|v| pc * v).collect();
    let d1 = op.derivative(&geom.sqrt_a0);
    let d2 = op.derivative(&s2);
    grid.interior()
        .zip(d1.iter().zip(&d2))
        .map(|(i, (d1, d2))| {
            let c1 = 3.0 * pc * (state.a[i] - geom.a0[i]);
            [d2[0] + c1 * d1[0], d2[1] + c1 * d1[1]]
        })
        .collect()
}

/// Sixth-order central difference (the linear-weight limit of the frozen
/// operator) at storage index `i`.
#[inline]
pub fn central_derivative(g: &[f64], i: usize, dx: f64) -> f64 {
    (45.0 * (g[i + 1] - g[i - 1]) - 9.0 * (g[i + 2] - g[i - 2]) + (g[i + 3] - g[i - 3])) / (60.0 * dx)
}

/// Straightforward pointwise source `k A/(rho sqrt(pi)) d(sqrt A0)/dx` used
/// by the non-well-balanced scheme.
pub fn pointwise_source_nonwb(state: &FieldPair, geom: &VesselGeometry, grid: &Grid) -> Vec<Vec2> {
    let pc = geom.pressure_coef();
    grid.interior()
        .map(|i| [0.0, 3.0 * pc * state.a[i] * central_derivative(&geom.sqrt_a0, i, grid.dx)])
        .collect()
}

/// Linear friction `-C_f Q/A` in the momentum equation.
pub fn friction_source(state: &FieldPair, grid: &Grid, cf: f64) -> Vec<Vec2> {
    grid.interior()
        .map(|i| [0.0, -cf * state.q[i] / state.a[i]])
        .collect()
}
