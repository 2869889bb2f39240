//! Initial data, sharp truncation and mollification.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::rng::SeedStream;
use crate::spectral::{Grid, SpectralField};

/// Smallest admissible `min(1 + zeta0)` of the rough and random generators.
pub const ROUGH_FLOOR: f64 = 0.2;
/// Fourier decay exponent of the rough height profile.
pub const ROUGH_DECAY: f64 = 1.1;
/// Largest admissible `|zeta0|, |u0|` on the outer 5% of the box.
pub const EDGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    Zero,
    SmoothBump,
    MultiBump,
    NearCavitation,
    RoughOrlicz,
    SeededRandom,
}

impl DataKind {
    pub const EXPECTED: &'static str = "one of zero, smooth-bump, multi-bump, near-cavitation, rough-orlicz, seeded-random";

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "zero" => DataKind::Zero,
            "smooth-bump" => DataKind::SmoothBump,
            "multi-bump" => DataKind::MultiBump,
            "near-cavitation" => DataKind::NearCavitation,
            "rough-orlicz" => DataKind::RoughOrlicz,
            "seeded-random" => DataKind::SeededRandom,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DataKind::Zero => "zero",
            DataKind::SmoothBump => "smooth-bump",
            DataKind::MultiBump => "multi-bump",
            DataKind::NearCavitation => "near-cavitation",
            DataKind::RoughOrlicz => "rough-orlicz",
            DataKind::SeededRandom => "seeded-random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub kind: DataKind,
    /// Peak `|zeta0|` (unused by near-cavitation).
    pub amplitude: f64,
    /// `min(1 + zeta0)` of near-cavitation data.
    pub floor: f64,
    /// Highest wavenumber of the random generators.
    pub cutoff: f64,
    /// Regularity index steering the seeded-random spectrum.
    pub s: f64,
    pub seed: u64,
}

fn gauss(x: f64, c: f64, w: f64) -> f64 {
    (-((x - c) / w).powi(2)).exp()
}

impl InitialData {
    /// `(zeta0, u0)` on `grid`. Random profiles are built from wavenumbers,
    /// not grid slots, so grids of equal `L` receive the same data.
    pub fn build(&self, grid: &Arc<Grid>) -> Result<State> {
        let a = self.amplitude;
        let (z, u) = match self.kind {
            DataKind::Zero => (SpectralField::zeros(grid), SpectralField::zeros(grid)),
            DataKind::SmoothBump => {
                let z = SpectralField::from_fn(grid, |x| a * gauss(x, 0.0, 2.0));
                let u = z.scale(0.5);
                (z, u)
            }
            DataKind::MultiBump => (
                SpectralField::from_fn(grid, |x| {
                    a * (gauss(x, -8.0, 2.0) + 0.6 * gauss(x, 6.0, 1.5) - 0.5 * gauss(x, 0.0, 2.5))
                }),
                SpectralField::from_fn(grid, |x| 0.5 * a * gauss(x, -8.0, 2.0)),
            ),
            DataKind::NearCavitation => {
                if !(self.floor > 0.0 && self.floor < 1.0) {
                    return Err(Error::param("floor", self.floor, "in (0, 1)"));
                }
                let d = 1.0 - self.floor;
                (SpectralField::from_fn(grid, |x| -d * gauss(x, 0.0, 2.0)), SpectralField::zeros(grid))
            }
            DataKind::RoughOrlicz | DataKind::SeededRandom => {
                check_reach(grid, self.cutoff)?;
                // generated and scaled on a grid fixed by L and the cutoff
                let reference = reference_grid(grid.half_length(), self.cutoff)?;
                let (label, dz) = match self.kind {
                    DataKind::RoughOrlicz => ("rough-orlicz", ROUGH_DECAY),
                    _ => ("seeded-random", self.s + 1.5),
                };
                let seeds = SeedStream::new(self.seed).child(label);
                let z = windowed_random(&reference, &seeds, "zeta", dz, self.cutoff)?;
                let u = windowed_random(&reference, &seeds, "u", dz + 1.0, self.cutoff)?;
                (fit_height(&z, a).resample(grid)?, fit_sup(&u, 0.5 * a).resample(grid)?)
            }
        };
        check_edges(grid, &z, "zeta0")?;
        check_edges(grid, &u, "u0")?;
        State::new(z, u, 0.0)
    }
}

fn fit_sup(f: &SpectralField, target: f64) -> SpectralField {
    let m = f.linf_norm();
    if m == 0.0 {
        f.clone()
    } else {
        f.scale(target / m)
    }
}

/// Scales to sup norm `target`, then further if needed for `min(1 + f) >= ROUGH_FLOOR`.
fn fit_height(f: &SpectralField, target: f64) -> SpectralField {
    let g = fit_sup(f, target);
    let lo = g.min();
    if 1.0 + lo < ROUGH_FLOOR {
        g.scale((1.0 - ROUGH_FLOOR) / -lo)
    } else {
        g
    }
}

fn check_edges(grid: &Grid, f: &SpectralField, name: &str) -> Result<()> {
    let l = grid.half_length();
    let worst = grid
        .nodes()
        .iter()
        .zip(f.samples())
        .filter(|(x, _)| x.abs() >= 0.95 * l)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    if worst > EDGE_TOL {
        return Err(Error::Config(format!(
            "{name} is {worst:e} near the box edge (above {EDGE_TOL:e}); increase L"
        )));
    }
    Ok(())
}

fn window_width(l: f64) -> f64 {
    l / 5.5
}

/// Highest wavenumber of a windowed field with the given cutoff; the window
/// widens the spectrum by about 12 / width before e^{-36}.
fn reach(l: f64, cutoff: f64) -> f64 {
    cutoff + 12.0 / window_width(l)
}

fn check_reach(grid: &Grid, cutoff: f64) -> Result<()> {
    let r = reach(grid.half_length(), cutoff);
    if r > grid.xi_max_dealiased() {
        return Err(Error::Config(format!(
            "data_cutoff {cutoff} needs a dealiased band of {r:.3}, grid has {:.3}; lower data_cutoff or raise n",
            grid.xi_max_dealiased()
        )));
    }
    Ok(())
}

/// Power-of-two grid resolving `reach` with eightfold oversampling.
fn reference_grid(l: f64, cutoff: f64) -> Result<Arc<Grid>> {
    let r = reach(l, cutoff);
    let mut n = 256usize;
    while Grid::new(l, n)?.xi_max_dealiased() < 8.0 * r {
        n *= 2;
    }
    Grid::new(l, n)
}

/// Gaussian window `exp(-(x/l)^2)` times a random band-limited field with
/// `|c_k| ~ <xi_k>^{-decay}` for `0 < xi_k <= cutoff`.
pub(crate) fn windowed_random(grid: &Arc<Grid>, seeds: &SeedStream, label: &str, decay: f64, cutoff: f64) -> Result<SpectralField> {
    check_reach(grid, cutoff)?;
    let width = window_width(grid.half_length());
    let mut rng = seeds.rng(label, 0);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    let dxi = grid.dxi();
    let mut k = 1i64;
    while k as f64 * dxi <= cutoff {
        let xi = k as f64 * dxi;
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let v = Complex64::new(re, im) * (0.5f64.sqrt() * (1.0 + xi * xi).powf(-0.5 * decay));
        let i = grid.slot(k).expect("cutoff inside the band");
        let j = grid.slot(-k).expect("cutoff inside the band");
        c[i] = v;
        c[j] = v.conj();
        k += 1;
    }
    let f = SpectralField::from_coeffs(grid, c)?;
    let w = SpectralField::from_fn(grid, |x| (-(x / width).powi(2)).exp());
    let prod: Vec<f64> = f.samples().iter().zip(w.samples()).map(|(a, b)| a * b).collect();
    SpectralField::from_samples(grid, prod)
}

/// Smooth mollifier on `[0, 1]` with unit mass:
/// `c exp(-1 / (4 y (1 - y)))`.
pub fn mollifier(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        0.0
    } else {
        MOLLIFIER_NORM * (-1.0 / (4.0 * y * (1.0 - y))).exp()
    }
}

const MOLLIFIER_NORM: f64 = 1.0 / 0.221_996_908_084_039_66;

/// `int_0^1 rho(y) cos(xi (y - 1/2)) dy`; `rho^(xi) = e^{-i xi/2}` times this.
fn mollifier_symbol_even(xi: f64) -> f64 {
    const M: usize = 2048;
    let h = 1.0 / M as f64;
    (1..M)
        .map(|j| {
            let y = j as f64 * h;
            mollifier(y) * (xi * (y - 0.5)).cos()
        })
        .sum::<f64>()
        * h
}

/// `rho_n * f` with `rho_n(x) = n rho(n x)`, exact on the trigonometric
/// interpolant of `f`.
pub fn mollify(f: &SpectralField, n: u32) -> SpectralField {
    let n = n as f64;
    f.map_coeffs(|xi, c| {
        let x = xi / n;
        c * Complex64::from_polar(mollifier_symbol_even(x), -0.5 * x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mollifier_unit_mass() {
        assert!((mollifier_symbol_even(0.0) - 1.0).abs() < 1e-12);
        assert!(mollifier_symbol_even(100.0).abs() < 1e-3);
        assert!(mollifier_symbol_even(400.0).abs() < 1e-6);
    }

    #[test]
    fn mollify_matches_direct_quadrature() {
        let g = Grid::new(8.0, 256).unwrap();
        let f = SpectralField::from_fn(&g, |x| (-(x * x)).exp());
        let m = mollify(&f, 2);
        // (rho_2 * f)(x) = int_0^{1/2} 2 rho(2y) f(x - y) dy
        let x0 = 0.25;
        let q = 4000;
        let h = 0.5 / q as f64;
        let direct: f64 = (1..q)
            .map(|j| {
                let y = j as f64 * h;
                2.0 * mollifier(2.0 * y) * (-(x0 - y) * (x0 - y)).exp()
            })
            .sum::<f64>()
            * h;
        let i = g.nodes().iter().position(|&x| (x - x0).abs() < 1e-12).unwrap();
        assert!((m.samples()[i] - direct).abs() < 1e-10);
    }

    #[test]
    fn random_data_is_resolution_independent() {
        let d = InitialData {
            kind: DataKind::RoughOrlicz,
            amplitude: 0.5,
            floor: 0.1,
            cutoff: 8.0,
            s: 0.75,
            seed: 3,
        };
        let a = d.build(&Grid::new(16.0 * PI, 512).unwrap()).unwrap();
        let b = d.build(&Grid::new(16.0 * PI, 1024).unwrap()).unwrap();
        assert!(a.min_depth() >= ROUGH_FLOOR - 1e-12);
        for k in 1..100i64 {
            let ca = a.zeta.coeffs()[a.grid().slot(k).unwrap()];
            let cb = b.zeta.coeffs()[b.grid().slot(k).unwrap()];
            assert!((ca - cb).norm() < 1e-12);
        }
    }
}
