//! Right-hand side, time stepping and the fractional heat kernel.

mod dispersion;
mod evolve;
mod integrator;
pub mod kernel;
mod rhs;
mod semigroup;


use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub use dispersion::{linear_frequency, measured_frequency};
pub use evolve::{evolve, EvolveOptions, RunStatus, Trajectory, BASE_COLUMNS};
pub use integrator::{auto_dt, stability_bound, step, Stepper};
pub use kernel::{kernel_eval, kernel_properties, Kernel, KernelReport, KernelSpec};
pub use rhs::rhs;
pub use semigroup::{semigroup_consistency, SemigroupResidual};


/// `eps`, `lambda`, `mu`. `mu = 0` is the fractal system, `eps = mu = 0`
/// the classical one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(eps: f64, lambda: f64, mu: f64) -> Result<Self> {
        let p = ModelParams { eps, lambda, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn classical() -> Self {
        ModelParams {
            eps: 0.0,
            lambda: 1.0,
            mu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::param("eps", self.eps, "a finite real >= 0"));
        }
        if !(self.lambda > 0.0 && self.lambda <= 2.0) {
            return Err(Error::param("lambda", self.lambda, "in (0, 2]"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::param("mu", self.mu, "a finite real >= 0"));
        }
        Ok(())
    }
}

/// Diagnostic switches. Both on is the full system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Physics {
    /// `(u zeta)_x` and `u u_x`.
    pub nonlinear: bool,
    /// `u_x` in the first equation and `zeta_x` in the second.
    pub coupling: bool,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            nonlinear: true,
            coupling: true,
        }
    }
}

impl Physics {
    pub fn linear() -> Self {
        Physics {
            nonlinear: false,
            coupling: true,
        }
    }

    /// No nonlinearity, no coupling: `zeta_t = -eps g_lambda zeta` when `mu = 0`.
    pub fn diffusion_only() -> Self {
        Physics {
            nonlinear: false,
            coupling: false,
        }
    }
}

/// Source terms `(S_zeta, S_u)` added inside the brackets of both equations,
/// before the Helmholtz inversions.
pub trait Forcing: Send + Sync {
    fn eval(&self, t: f64, grid: &Arc<Grid>) -> (SpectralField, SpectralField);
}

#[derive(Clone, Default)]
pub struct Model {
    pub params: ModelParams,
    pub physics: Physics,
    pub forcing: Option<Arc<dyn Forcing>>,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::classical()
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("params", &self.params)
            .field("physics", &self.physics)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl Model {
    pub fn new(params: ModelParams) -> Self {
        Model {
            params,
            physics: Physics::default(),
            forcing: None,
        }
    }

    pub fn with_physics(mut self, physics: Physics) -> Self {
        self.physics = physics;
        self
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Lawson integrating-factor RK4 on the `eps |xi|^lambda` damping.
    Ifrk4,
    Rk4,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Scheme> {
        match s.to_ascii_lowercase().as_str() {
            "ifrk4" => Some(Scheme::Ifrk4),
            "rk4" => Some(Scheme::Rk4),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ifrk4 => "ifrk4",
            Scheme::Rk4 => "rk4",
        }
    }
}

/// `(zeta, u)` at time `t`.
#[derive(Debug, Clone)]
pub struct State {
    pub zeta: SpectralField,
    pub u: SpectralField,
    pub t: f64,
}

impl State {
    pub fn new(zeta: SpectralField, u: SpectralField, t: f64) -> Result<Self> {
        zeta.same_grid(&u)?;
        Ok(State { zeta, u, t })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        State {
            zeta: SpectralField::zeros(grid),
            u: SpectralField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.zeta.grid()
    }

    /// `min_x (1 + zeta)` over the nodes.
    pub fn min_depth(&self) -> f64 {
        1.0 + self.zeta.min()
    }

    pub fn dealias(&self) -> State {
        State {
            zeta: self.zeta.dealias(),
            u: self.u.dealias(),
            t: self.t,
        }
    }

    /// `|zeta - other.zeta|_{H^sz} + |u - other.u|_{H^su}`.
    pub fn distance(&self, other: &State, sz: f64, su: f64) -> Result<f64> {
        self.zeta.same_grid(&other.zeta)?;
        Ok(self.zeta.sub(&other.zeta).sobolev_norm(sz) + self.u.sub(&other.u).sobolev_norm(su))
    }
}
