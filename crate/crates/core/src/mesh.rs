//! Uniform cell-centred grid, nodal state storage with ghost layers and the
//! vessel geometry at rest.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ghost layers needed by the widest frozen-operator stencil (2r+3 points, r = 2).
pub const GHOST_WIDTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
    pub ghost_width: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, ghost_width: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Config(format!(
                "domain [{x_min}, {x_max}] has non-positive extent"
            )));
        }
        if n_cells < 2 * ghost_width || n_cells == 0 {
            return Err(Error::Config(format!(
                "{n_cells} cells is too few for ghost width {ghost_width}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_cells,
            dx: (x_max - x_min) / n_cells as f64,
            ghost_width,
        })
    }

    /// Total storage length including both ghost layers.
    pub fn len(&self) -> usize {
        self.n_cells + 2 * self.ghost_width
    }

    pub fn is_empty(&self) -> bool {
        self.n_cells == 0
    }

    /// Storage indices of the interior nodes.
    pub fn interior(&self) -> std::ops::Range<usize> {
        self.ghost_width..self.ghost_width + self.n_cells
    }

    /// Coordinate of interior node `j` (0-based, cell centre).
    pub fn node_x(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx
    }

    /// Coordinate of storage slot `i`; ghosts lie outside `[x_min, x_max]`.
    pub fn storage_x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 - self.ghost_width as f64 + 0.5) * self.dx
    }

    pub fn interior_coords(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.node_x(j)).collect()
    }
}

/// Conserved nodal variables (A, Q), ghost layers included.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub a: Vec<f64>,
    pub q: Vec<f64>,
}

impl FieldPair {
    pub fn zeros(len: usize) -> Self {
        FieldPair {
            a: vec![0.0; len],
            q: vec![0.0; len],
        }
    }

    /// Samples `init(x) -> (A, Q)` at every storage slot, ghosts included.
    pub fn from_fn(grid: &Grid, init: impl Fn(f64) -> (f64, f64)) -> Self {
        let (a, q) = (0..grid.len()).map(|i| init(grid.storage_x(i))).unzip();
        FieldPair { a, q }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Checks A > 0 and finiteness at the interior nodes.
    pub fn validate(&self, grid: &Grid, time: f64) -> Result<()> {
        if self.a.len() != grid.len() || self.q.len() != grid.len() {
            return Err(Error::Internal(format!(
                "state length {}/{} does not match grid length {}",
                self.a.len(),
                self.q.len(),
                grid.len()
            )));
        }
        for i in grid.interior() {
            let (a, q) = (self.a[i], self.q[i]);
            if !(a > 0.0) || !a.is_finite() || !q.is_finite() {
                return Err(Error::State {
                    node: i - grid.ghost_width,
                    time,
                    stage: None,
                    detail: format!("A = {a:e}, Q = {q:e}"),
                });
            }
        }
        Ok(())
    }

    /// Interior (R, u) pairs.
    pub fn primitives(&self, grid: &Grid, time: f64) -> Result<Vec<Primitive>> {
        grid.interior()
            .map(|i| {
                Primitive::from_conserved(self.a[i], self.q[i]).ok_or_else(|| Error::State {
                    node: i - grid.ghost_width,
                    time,
                    stage: None,
                    detail: format!("cannot convert A = {:e} to a radius", self.a[i]),
                })
            })
            .collect()
    }

    pub fn interior_a(&self, grid: &Grid) -> &[f64] {
        &self.a[grid.interior()]
    }

    pub fn interior_q(&self, grid: &Grid) -> &[f64] {
        &self.q[grid.interior()]
    }
}

/// Primitive variables: vessel radius and axial velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub radius: f64,
    pub velocity: f64,
}

impl Primitive {
    /// `None` when `a <= 0` (collapsed vessel) or non-finite.
    pub fn from_conserved(a: f64, q: f64) -> Option<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return None;
        }
        Some(Primitive {
            radius: (a / PI).sqrt(),
            velocity: q / a,
        })
    }

    pub fn to_conserved(self) -> (f64, f64) {
        let a = PI * self.radius * self.radius;
        (a, a * self.velocity)
    }
}

/// Cross-section at rest sampled on the grid, together with the wall and
/// blood constants.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselGeometry {
    pub a0: Vec<f64>,
    pub sqrt_a0: Vec<f64>,
    /// `A0^{3/2}`, stored as `A0 * sqrt(A0)`.
    pub a0_32: Vec<f64>,
    /// Arterial stiffness (Pa/m).
    pub k: f64,
    /// Blood density (kg/m^3).
    pub rho: f64,
}

impl VesselGeometry {
    /// Samples `A0 = pi R0(x)^2` at interior nodes; ghosts copy the nearest
    /// interior value.
    pub fn sample(
        radius_profile: impl Fn(f64) -> f64,
        grid: &Grid,
        k: f64,
        rho: f64,
    ) -> Result<Self> {
        if !(k > 0.0 && rho > 0.0) {
            return Err(Error::Config(format!(
                "stiffness and density must be positive (k = {k}, rho = {rho})"
            )));
        }
        let g = grid.ghost_width;
        let mut a0 = vec![0.0; grid.len()];
        for j in 0..grid.n_cells {
            let x = grid.node_x(j);
            let r = radius_profile(x);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config(format!(
                    "non-positive rest radius {r:e} at x = {x}"
                )));
            }
            a0[g + j] = PI * r * r;
        }
        let (first, last) = (a0[g], a0[g + grid.n_cells - 1]);
        a0[..g].fill(first);
        a0[g + grid.n_cells..].fill(last);
        Ok(Self::from_areas(a0, k, rho))
    }

    pub fn from_areas(a0: Vec<f64>, k: f64, rho: f64) -> Self {
        let sqrt_a0: Vec<f64> = a0.iter().map(|a| a.sqrt()).collect();
        let a0_32 = a0.iter().zip(&sqrt_a0).map(|(a, s)| a * s).collect();
        VesselGeometry {
            a0,
            sqrt_a0,
            a0_32,
            k,
            rho,
        }
    }

    /// `k / (3 rho sqrt(pi))`, the coefficient of `A^{3/2}` in the momentum flux.
    pub fn pressure_coef(&self) -> f64 {
        pressure_coef(self.k, self.rho)
    }

    /// True when the rest area is the same at every node.
    pub fn is_uniform(&self) -> bool {
        self.a0.iter().all(|&a| a == self.a0[0])
    }

    /// The "man at eternal rest" equilibrium: A = A0, Q = 0.
    pub fn rest_state(&self) -> FieldPair {
        FieldPair {
            a: self.a0.clone(),
            q: vec![0.0; self.a0.len()],
        }
    }
}

pub fn pressure_coef(k: f64, rho: f64) -> f64 {
    k / (3.0 * rho * PI.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    WellBalanced,
    /// Classic Lax-Friedrichs split on (A, Q) with a pointwise source.
    NonWellBalanced,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wb" | "well_balanced" | "well-balanced" => Ok(Mode::WellBalanced),
            "nonwb" | "non-wb" | "non_wb" | "non_well_balanced" => Ok(Mode::NonWellBalanced),
            other => Err(Error::Usage(format!("unknown mode '{other}' (expected wb|nonwb)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::WellBalanced => "wb",
            Mode::NonWellBalanced => "nonwb",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Stencil half-width; only 2 (fifth order) is implemented.
    pub r: usize,
    pub eps_weno: f64,
    pub cfl: f64,
    pub mode: Mode,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            r: 2,
            eps_weno: 1e-6,
            cfl: 0.6,
            mode: Mode::WellBalanced,
        }
    }
}

impl SchemeConfig {
    pub fn with_mode(mode: Mode) -> Self {
        SchemeConfig {
            mode,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r != 2 {
            return Err(Error::Config(format!(
                "stencil half-width r = {} unsupported (only r = 2)",
                self.r
            )));
        }
        if !(self.eps_weno > 0.0) {
            return Err(Error::Config("eps_weno must be positive".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("CFL {} outside (0, 1]", self.cfl)));
        }
        Ok(())
    }
}
