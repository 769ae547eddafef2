//! Physical flux, eigen-structure of its Jacobian and the Lax-Friedrichs
//! split in local characteristic variables.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{pressure_coef, FieldPair, Grid, Mode, SchemeConfig, VesselGeometry};
use crate::source::{FrozenOperator, InterfaceCoeffs};
use crate::weno::{reconstruct_minus, reconstruct_plus, WINDOW};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// `(Q, Q^2/A + k/(3 rho sqrt(pi)) A^{3/2})`.
///
/// `A^{3/2}` is evaluated as `A * sqrt(A)` so that it matches the stored
/// `A0^{3/2}` bit for bit when `A == A0`.
#[inline]
pub fn physical_flux(a: f64, q: f64, pcoef: f64) -> Vec2 {
    [q, q * q / a + pcoef * (a * a.sqrt())]
}

/// Checked variant of [`physical_flux`] taking the wall constants.
pub fn physical_flux_checked(a: f64, q: f64, k: f64, rho: f64) -> Result<Vec2> {
    if !(a > 0.0) {
        return Err(Error::State {
            node: 0,
            time: 0.0,
            stage: None,
            detail: format!("flux evaluated at A = {a:e}"),
        });
    }
    Ok(physical_flux(a, q, pressure_coef(k, rho)))
}

/// Pulse wave speed `sqrt(k sqrt(A) / (2 rho sqrt(pi)))`.
#[inline]
pub fn wave_speed(a: f64, k: f64, rho: f64) -> f64 {
    (k * a.sqrt() / (2.0 * rho * PI.sqrt())).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Columns are the right eigenvectors `(1, lambda_i)`.
    pub right: Mat2,
    /// Inverse of `right`; rows are left eigenvectors.
    pub left: Mat2,
}

impl EigenSystem {
    /// Eigen-decomposition of `f'(U)` at `(a, q)`: `lambda = u -/+ c`.
    pub fn at(a: f64, q: f64, k: f64, rho: f64) -> Option<Self> {
        if !(a > 0.0) || !a.is_finite() || !q.is_finite() {
            return None;
        }
        let u = q / a;
        let c = wave_speed(a, k, rho);
        let (l1, l2) = (u - c, u + c);
        let inv = 1.0 / (l2 - l1);
        Some(EigenSystem {
            lambda1: l1,
            lambda2: l2,
            right: [[1.0, 1.0], [l1, l2]],
            left: [[l2 * inv, -inv], [-l1 * inv, inv]],
        })
    }

    #[inline]
    pub fn to_characteristic(&self, v: Vec2) -> Vec2 {
        mat_vec(&self.left, v)
    }

    #[inline]
    pub fn from_characteristic(&self, w: Vec2) -> Vec2 {
        mat_vec(&self.right, w)
    }
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Eigen-system at the arithmetic mean of two neighbouring states.
pub fn eigen_system(u_left: Vec2, u_right: Vec2, k: f64, rho: f64) -> Option<EigenSystem> {
    EigenSystem::at(
        0.5 * (u_left[0] + u_right[0]),
        0.5 * (u_left[1] + u_right[1]),
        k,
        rho,
    )
}

/// Global Lax-Friedrichs viscosities, one per characteristic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalAlphas {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl GlobalAlphas {
    pub fn as_array(&self) -> Vec2 {
        [self.alpha1, self.alpha2]
    }
}

/// `alpha_i = max_j |lambda_i(U_j)|` over the interior nodes.
pub fn global_alphas(state: &FieldPair, grid: &Grid, k: f64, rho: f64, time: f64) -> Result<GlobalAlphas> {
    let mut alphas = GlobalAlphas {
        alpha1: 0.0,
        alpha2: 0.0,
    };
    for i in grid.interior() {
        let (a, q) = (state.a[i], state.q[i]);
        if !(a > 0.0) || !a.is_finite() || !q.is_finite() {
            return Err(Error::State {
                node: i - grid.ghost_width,
                time,
                stage: None,
                detail: format!("A = {a:e}, Q = {q:e}"),
            });
        }
        let u = q / a;
        let c = wave_speed(a, k, rho);
        alphas.alpha1 = alphas.alpha1.max((u - c).abs());
        alphas.alpha2 = alphas.alpha2.max((u + c).abs());
    }
    Ok(alphas)
}

/// `f^{+-} = (f_char +- alpha v_char) / 2` for one characteristic component.
///
/// `v_char` is the projection of `(A - A0, Q)` in well-balanced mode and of
/// `(A, Q)` in the classic split.
#[inline]
pub fn modified_lf_split(f_char: f64, v_char: f64, alpha: f64) -> (f64, f64) {
    let visc = alpha * v_char;
    (0.5 * (f_char + visc), 0.5 * (f_char - visc))
}

/// Interface fluxes of the WENO-LF scheme with local characteristic
/// decomposition, together with the frozen coefficients of every
/// reconstruction (the data behind the source operator).
///
/// Ghost nodes of `state` must be filled. Interface `m` lies between storage
/// nodes `g - 1 + m` and `g + m`, `m = 0..=n_cells`.
pub fn reconstruct_fluxes(
    state: &FieldPair,
    geom: &VesselGeometry,
    grid: &Grid,
    alphas: &GlobalAlphas,
    config: &SchemeConfig,
    time: f64,
) -> Result<(Vec<Vec2>, FrozenOperator)> {
    let g = grid.ghost_width;
    let len = grid.len();
    let pc = geom.pressure_coef();
    let (k, rho) = (geom.k, geom.rho);
    let eps = config.eps_weno;
    let alpha = alphas.as_array();

    let mut f = Vec::with_capacity(len);
    let mut v = Vec::with_capacity(len);
    for i in 0..len {
        let (a, q) = (state.a[i], state.q[i]);
        if !(a > 0.0) || !a.is_finite() || !q.is_finite() {
            return Err(Error::State {
                node: i.saturating_sub(g),
                time,
                stage: None,
                detail: format!("A = {a:e}, Q = {q:e} entering the flux reconstruction (storage slot {i})"),
            });
        }
        f.push(physical_flux(a, q, pc));
        v.push(match config.mode {
            Mode::WellBalanced => [a - geom.a0[i], q],
            Mode::NonWellBalanced => [a, q],
        });
    }

    let mut fluxes = Vec::with_capacity(grid.n_cells + 1);
    let mut interfaces = Vec::with_capacity(grid.n_cells + 1);
    for j in g - 1..g + grid.n_cells {
        let eig = eigen_system([state.a[j], state.q[j]], [state.a[j + 1], state.q[j + 1]], k, rho)
            .ok_or_else(|| Error::Internal(format!("singular eigensystem at interface {j}+1/2")))?;
        let mut fp = [[0.0; WINDOW]; 2];
        let mut fm = [[0.0; WINDOW]; 2];
        for (o, n) in (j - 2..=j + 3).enumerate() {
            let fc = eig.to_characteristic(f[n]);
            let vc = eig.to_characteristic(v[n]);
            for fld in 0..2 {
                let (p, m) = modified_lf_split(fc[fld], vc[fld], alpha[fld]);
                if o < WINDOW {
                    fp[fld][o] = p;
                }
                if o > 0 {
                    fm[fld][o - 1] = m;
                }
            }
        }
        let plus = [reconstruct_plus(&fp[0], eps), reconstruct_plus(&fp[1], eps)];
        let minus = [reconstruct_minus(&fm[0], eps), reconstruct_minus(&fm[1], eps)];
        let fc = [
            plus[0].value + minus[0].value,
            plus[1].value + minus[1].value,
        ];
        fluxes.push(eig.from_characteristic(fc));
        interfaces.push(InterfaceCoeffs { eig, plus, minus });
    }
    Ok((
        fluxes,
        FrozenOperator {
            dx: grid.dx,
            ghost_width: g,
            interfaces,
        },
    ))
}
