//! Fifth-order WENO reconstruction of interface values.
//!
//! Besides the reconstructed value, every call returns the effective
//! coefficients that multiply the five window values. Holding those fixed
//! turns the nonlinear reconstruction into a linear stencil, which is what the
//! well-balanced source discretization reuses.

use crate::error::{Error, Result};

/// Stencil half-width of the fifth-order scheme.
pub const R: usize = 2;
/// Window length `2r + 1`.
pub const WINDOW: usize = 2 * R + 1;

pub const DEFAULT_EPS: f64 = 1e-6;

/// Constant coefficients of the third-order candidate reconstructions and the
/// linear weights that combine them into the fifth-order one.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilTables {
    /// `a_coeffs[k][l]` multiplies the `l`-th value of candidate stencil `k`,
    /// which covers window entries `k..=k+2`.
    pub a_coeffs: [[f64; R + 1]; R + 1],
    pub linear_weights: [f64; R + 1],
}

impl StencilTables {
    pub const fn fifth_order() -> Self {
        StencilTables {
            a_coeffs: [
                [1.0 / 3.0, -7.0 / 6.0, 11.0 / 6.0],
                [-1.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0],
                [1.0 / 3.0, 5.0 / 6.0, -1.0 / 6.0],
            ],
            linear_weights: [0.1, 0.6, 0.3],
        }
    }

    /// Coefficients of the linear (optimal-weight) fifth-order reconstruction.
    pub fn linear_coeffs(&self) -> [f64; WINDOW] {
        combine(&self.a_coeffs, &self.linear_weights)
    }
}

impl Default for StencilTables {
    fn default() -> Self {
        Self::fifth_order()
    }
}

pub static TABLES: StencilTables = StencilTables::fifth_order();

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionResult {
    pub value: f64,
    pub weights: [f64; R + 1],
    /// Effective coefficients in natural (left-to-right) window order.
    pub combined_coeffs: [f64; WINDOW],
    /// Set for the mirrored (minus) reconstruction; fixes the summation order.
    pub mirrored: bool,
}

impl ReconstructionResult {
    /// Applies the frozen coefficients to another window, summing in the same
    /// order as the original reconstruction so that identical windows give
    /// bit-identical results.
    #[inline]
    pub fn apply(&self, window: &[f64; WINDOW]) -> f64 {
        if self.mirrored {
            dot_mirrored(&self.combined_coeffs, window)
        } else {
            dot(&self.combined_coeffs, window)
        }
    }
}

#[inline]
pub(crate) fn dot(c: &[f64; WINDOW], w: &[f64; WINDOW]) -> f64 {
    c[0] * w[0] + c[1] * w[1] + c[2] * w[2] + c[3] * w[3] + c[4] * w[4]
}

#[inline]
pub(crate) fn dot_mirrored(c: &[f64; WINDOW], w: &[f64; WINDOW]) -> f64 {
    c[4] * w[4] + c[3] * w[3] + c[2] * w[2] + c[1] * w[1] + c[0] * w[0]
}

fn as_window(window: &[f64]) -> Result<[f64; WINDOW]> {
    window.try_into().map_err(|_| {
        Error::Usage(format!(
            "WENO window must have {WINDOW} values, got {}",
            window.len()
        ))
    })
}

/// Smoothness indicators of the three candidate stencils.
pub fn smoothness_indicators(window: &[f64]) -> Result<[f64; R + 1]> {
    Ok(indicators(&as_window(window)?))
}

#[inline]
pub(crate) fn indicators(v: &[f64; WINDOW]) -> [f64; R + 1] {
    const C13_12: f64 = 13.0 / 12.0;
    let d0 = v[0] - 2.0 * v[1] + v[2];
    let e0 = v[0] - 4.0 * v[1] + 3.0 * v[2];
    let d1 = v[1] - 2.0 * v[2] + v[3];
    let e1 = v[1] - v[3];
    let d2 = v[2] - 2.0 * v[3] + v[4];
    let e2 = 3.0 * v[2] - 4.0 * v[3] + v[4];
    [
        C13_12 * d0 * d0 + 0.25 * e0 * e0,
        C13_12 * d1 * d1 + 0.25 * e1 * e1,
        C13_12 * d2 * d2 + 0.25 * e2 * e2,
    ]
}

pub fn nonlinear_weights(is: &[f64; R + 1], tables: &StencilTables, eps: f64) -> [f64; R + 1] {
    let mut alpha = [0.0; R + 1];
    for k in 0..=R {
        let d = eps + is[k];
        alpha[k] = tables.linear_weights[k] / (d * d);
    }
    let sum: f64 = alpha.iter().sum();
    alpha.map(|a| a / sum)
}

fn combine(a: &[[f64; R + 1]; R + 1], w: &[f64; R + 1]) -> [f64; WINDOW] {
    let mut c = [0.0; WINDOW];
    for k in 0..=R {
        for l in 0..=R {
            c[k + l] += w[k] * a[k][l];
        }
    }
    c
}

/// Upwind reconstruction at `x_{j+1/2}` from the window `(g_{j-2}, ..., g_{j+2})`.
pub fn reconstruct_plus(window: &[f64; WINDOW], eps: f64) -> ReconstructionResult {
    let weights = nonlinear_weights(&indicators(window), &TABLES, eps);
    let combined_coeffs = combine(&TABLES.a_coeffs, &weights);
    ReconstructionResult {
        value: dot(&combined_coeffs, window),
        weights,
        combined_coeffs,
        mirrored: false,
    }
}

/// Mirror image of [`reconstruct_plus`] about `x_{j+1/2}`, window
/// `(g_{j-1}, ..., g_{j+3})`.
pub fn reconstruct_minus(window: &[f64; WINDOW], eps: f64) -> ReconstructionResult {
    let mut reversed = *window;
    reversed.reverse();
    let weights = nonlinear_weights(&indicators(&reversed), &TABLES, eps);
    let mut combined_coeffs = combine(&TABLES.a_coeffs, &weights);
    let value = dot(&combined_coeffs, &reversed);
    combined_coeffs.reverse();
    ReconstructionResult {
        value,
        weights,
        combined_coeffs,
        mirrored: true,
    }
}
