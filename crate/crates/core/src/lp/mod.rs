//! Littlewood-Paley projectors and empirical checks of the commutator,
//! product, coercivity and Cordoba-Cordoba estimates.

pub mod cutoff;
mod estimates;

pub use estimates::{
    caps, refinement_drift, verify_cm1, verify_coercivity, verify_cordoba, verify_products, Convex, EstimateReport,
    Verifier, DEFAULT_MODES, EXACT_TOL,
};

use crate::error::{Error, Result};
use crate::spectral::{MultiplierSpec, SpectralField};

/// Which Littlewood-Paley operator `project` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `P_N`
    Block,
    /// `P~_N = P_{N/2} + P_N + P_{2N}`
    Wide,
    /// `P_{<<N}`
    Low,
    /// `P_{>~N}`
    High,
}

#[derive(Debug, Clone)]
pub struct LpBlock {
    pub scale: f64,
    pub block: SpectralField,
    pub l2_norm: f64,
    pub linf_norm: f64,
}

/// Dyadic scales `2^j` whose blocks cover every nonzero wavenumber of the grid.
///
/// With this choice `sum_N phi_N = 1` on all nonzero modes and the leftover
/// low-frequency part is the mean.
pub fn scales(f: &SpectralField) -> Vec<f64> {
    let g = f.grid();
    let j0 = g.dxi().log2().floor() as i32;
    let j1 = g.xi_max().log2().ceil() as i32;
    (j0..=j1).map(|j| 2f64.powi(j)).collect()
}

fn check_scale(f: &SpectralField, n: f64) -> Result<()> {
    let s = scales(f);
    let (lo, hi) = (s[0], *s.last().unwrap());
    if !(n >= lo && n <= hi) {
        return Err(Error::ScaleOutOfRange { scale: n, min: lo, max: hi });
    }
    let j = n.log2();
    if (j - j.round()).abs() > 1e-12 {
        return Err(Error::param("N", n, "a power of two"));
    }
    Ok(())
}

pub(crate) fn apply(f: &SpectralField, n: f64, mode: Projection) -> SpectralField {
    let sym: fn(f64, f64) -> f64 = match mode {
        Projection::Block => cutoff::phi_n,
        Projection::Wide => cutoff::phi_wide,
        Projection::Low => cutoff::low_symbol,
        Projection::High => cutoff::high_symbol,
    };
    f.map_coeffs(|xi, c| c * sym(xi, n))
}

/// Applies `P_N` (or one of its variants) to `f`.
pub fn project(f: &SpectralField, n: f64, mode: Projection) -> Result<LpBlock> {
    check_scale(f, n)?;
    let block = apply(f, n, mode);
    Ok(LpBlock {
        scale: n,
        l2_norm: block.l2_norm(),
        linf_norm: block.linf_norm(),
        block,
    })
}

/// All blocks `P_N f` over the resolvable scales, low to high.
pub fn decompose(f: &SpectralField) -> Vec<LpBlock> {
    scales(f)
        .into_iter()
        .map(|n| project(f, n, Projection::Block).expect("scale from scales()"))
        .collect()
}

/// `[P_N, P_{<<N} f] d_x g = P_N(P_{<<N} f g_x) - P_{<<N} f P_N g_x`.
pub fn commutator(f: &SpectralField, g: &SpectralField, n: f64) -> Result<SpectralField> {
    f.same_grid(g)?;
    let fl = apply(f, n, Projection::Low);
    let gx = g.dx();
    let a = apply(&fl.mul(&gx), n, Projection::Block);
    let b = fl.mul(&apply(&gx, n, Projection::Block));
    Ok(a.sub(&b))
}

/// `sum_N <N>^{2s} |P_N f|^2 + |P_low f|^2`, the dyadic form of `|f|^2_{H^s}`.
pub fn dyadic_sobolev_sq(f: &SpectralField, s: f64) -> f64 {
    let mut acc = 0.0;
    for b in decompose(f) {
        acc += (1.0 + b.scale * b.scale).powf(s) * b.l2_norm * b.l2_norm;
    }
    let low = 2.0 * f.grid().half_length() * f.coeffs()[0].norm_sqr();
    acc + low
}

/// Sharp truncation `S_n`, the Fourier cutoff of `[-n, n]`.
pub fn sharp_truncation(f: &SpectralField, n: f64) -> SpectralField {
    f.apply_multiplier(&MultiplierSpec::SharpCutoff { cutoff: n })
        .expect("indicator symbol is finite")
}
