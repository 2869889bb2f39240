use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real, even Fourier symbol `m(xi)`.
#[derive(Clone)]
pub enum MultiplierSpec {
    Identity,
    /// `|xi|^lambda`, with `m(0) = 0` for every lambda.
    Fractal { lambda: f64 },
    /// `1 / (1 + mu xi^2)`.
    HelmholtzInverse { mu: f64 },
    /// `1 + mu xi^2`.
    Helmholtz { mu: f64 },
    /// `(1 + xi^2)^(s/2)`, i.e. `Lambda^s`.
    Bessel { s: f64 },
    /// `exp(-a |xi|^lambda)`.
    Semigroup { a: f64, lambda: f64 },
    /// Indicator of `|xi| <= cutoff`.
    SharpCutoff { cutoff: f64 },
    Custom {
        name: String,
        symbol: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl MultiplierSpec {
    pub fn custom(name: impl Into<String>, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MultiplierSpec::Custom {
            name: name.into(),
            symbol: Arc::new(symbol),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MultiplierSpec::Identity => "identity".into(),
            MultiplierSpec::Fractal { lambda } => format!("g_lambda(lambda={lambda})"),
            MultiplierSpec::HelmholtzInverse { mu } => format!("helmholtz_inverse(mu={mu})"),
            MultiplierSpec::Helmholtz { mu } => format!("helmholtz(mu={mu})"),
            MultiplierSpec::Bessel { s } => format!("bessel(s={s})"),
            MultiplierSpec::Semigroup { a, lambda } => format!("semigroup(a={a},lambda={lambda})"),
            MultiplierSpec::SharpCutoff { cutoff } => format!("sharp_cutoff({cutoff})"),
            MultiplierSpec::Custom { name, .. } => name.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MultiplierSpec::Fractal { lambda } | MultiplierSpec::Semigroup { lambda, .. }
                if !(lambda > 0.0 && lambda <= 2.0) =>
            {
                Err(Error::param("lambda", lambda, "in (0, 2]"))
            }
            MultiplierSpec::HelmholtzInverse { mu } | MultiplierSpec::Helmholtz { mu }
                if !(mu >= 0.0 && mu.is_finite()) =>
            {
                Err(Error::param("mu", mu, "a finite real >= 0"))
            }
            MultiplierSpec::Semigroup { a, .. } if !(a >= 0.0 && a.is_finite()) => {
                Err(Error::param("a", a, "a finite real >= 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let ax = xi.abs();
        match self {
            MultiplierSpec::Identity => 1.0,
            MultiplierSpec::Fractal { lambda } => {
                if ax == 0.0 {
                    0.0
                } else {
                    ax.powf(*lambda)
                }
            }
            MultiplierSpec::HelmholtzInverse { mu } => 1.0 / (1.0 + mu * xi * xi),
            MultiplierSpec::Helmholtz { mu } => 1.0 + mu * xi * xi,
            MultiplierSpec::Bessel { s } => (1.0 + xi * xi).powf(0.5 * s),
            MultiplierSpec::Semigroup { a, lambda } => {
                if ax == 0.0 {
                    1.0
                } else {
                    (-a * ax.powf(*lambda)).exp()
                }
            }
            MultiplierSpec::SharpCutoff { cutoff } => {
                if ax <= *cutoff * (1.0 + 1e-12) {
                    1.0
                } else {
                    0.0
                }
            }
            MultiplierSpec::Custom { symbol, .. } => symbol(xi),
        }
    }
}
