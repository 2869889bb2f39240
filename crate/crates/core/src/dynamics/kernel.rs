//! The kernel `K(t, x)` of `exp(-eps t g_lambda)` on the real line.
//!
//! `K` is synthesised by an inverse FFT of `exp(-a |xi|^lambda)`, `a = eps t`,
//! on a periodic box `[-L, L)`, which yields the periodisation
//! `sum_m K(x + 2mL)`. The images `m != 0` are removed with the large-`|x|`
//! expansion
//!
//! `K(x) ~ (1/pi) sum_j (-1)^{j+1}/j! Gamma(lambda j + 1) sin(pi lambda j / 2) a^j |x|^{-lambda j - 1}`,
//!
//! whose image sums are Hurwitz zeta values. The same expansion gives the
//! mass of `K` outside the box, which for `lambda < 2` is far from
//! negligible on any practical box.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num_serde;
use crate::spectral::Grid;

/// Smallest `a xi_max^lambda` of the internal grid.
const SPECTRAL_DEPTH: f64 = 40.0;
/// Largest internal grid.
const MAX_INTERNAL: usize = 1 << 22;
/// Box half-width of the automatic grid, in units of `a^{1/lambda}`.
const AUTO_WIDTHS: f64 = 200.0;
/// Smallest admissible box half-width, same units.
const MIN_WIDTHS: f64 = 20.0;
/// Largest admissible truncation estimate for the image expansion.
const REMAINDER_TOL: f64 = 1e-6;

/// `| |K|_{L^1} - 1 |` tolerance.
pub const L1_TOL: f64 = 1e-6;
/// Relative tolerance on `|K_x|_{L^1} (eps t)^{1/lambda}` against `c_1`.
pub const C1_TOL: f64 = 0.01;
/// Self-similarity and closed-form tolerance.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub lambda: f64,
    pub eps: f64,
    pub t: f64,
}

impl KernelSpec {
    pub fn new(lambda: f64, eps: f64, t: f64) -> Result<Self> {
        let k = KernelSpec { lambda, eps, t };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 2.0) {
            return Err(Error::param("lambda", self.lambda, "in (0, 2]"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::param("eps", self.eps, "a finite positive real"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::param("t", self.t, "a finite positive real"));
        }
        Ok(())
    }

    /// `a = eps t`.
    pub fn a(&self) -> f64 {
        self.eps * self.t
    }

    /// Natural width `a^{1/lambda}`.
    pub fn width(&self) -> f64 {
        self.a().powf(1.0 / self.lambda)
    }

    /// `K(0) = Gamma(1 + 1/lambda) / (pi a^{1/lambda})`.
    pub fn peak(&self) -> f64 {
        libm::tgamma(1.0 + 1.0 / self.lambda) / (PI * self.width())
    }

    /// `c_1` with `|d_x K|_{L^1} = c_1 a^{-1/lambda}`; equals `2 K(0) a^{1/lambda}`.
    pub fn c1(&self) -> f64 {
        2.0 * libm::tgamma(1.0 + 1.0 / self.lambda) / PI
    }
}

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-p}` for `p > 1`, `q > 0`, by
/// Euler-Maclaurin.
pub fn hurwitz_zeta(p: f64, q: f64) -> f64 {
    const N: usize = 12;
    // B_{2k} / (2k)!
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-p);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - p) / (p - 1.0) + 0.5 * a.powf(-p);
    let mut poch = p;
    let mut apow = a.powf(-p - 1.0);
    for (k, b) in B.iter().enumerate() {
        let term = b * poch * apow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * k as f64;
        poch *= (p + m + 1.0) * (p + m + 2.0);
        apow /= a * a;
    }
    sum
}

/// Coefficients `b_j` of `K(x) ~ sum_j b_j |x|^{-lambda j - 1}`, truncated
/// where terms at `|x| = r` stop decreasing or drop below round-off.
/// Returns `(coefficients, truncation estimate at r)`.
pub(crate) fn tail_series(spec: &KernelSpec, r: f64) -> (Vec<f64>, f64) {
    let lam = spec.lambda;
    if lam == 2.0 {
        return (Vec::new(), 0.0);
    }
    let a = spec.a();
    let mut out = Vec::new();
    let mut prev = f64::INFINITY;
    let mut remainder = 0.0;
    for j in 1..=60 {
        let jf = j as f64;
        let s = (0.5 * PI * lam * jf).sin();
        let log_mag = jf * a.ln() + libm::lgamma(lam * jf + 1.0) - libm::lgamma(jf + 1.0) - PI.ln();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let b = sign * s * log_mag.exp();
        let at_r = (log_mag - (lam * jf + 1.0) * r.ln()).exp();
        if at_r > prev {
            remainder = prev;
            break;
        }
        out.push(b);
        prev = at_r;
        if at_r < 1e-20 {
            remainder = at_r;
            break;
        }
        remainder = at_r;
    }
    (out, remainder)
}

/// `sum_{m != 0} |x + 2mL|^{-p}` for `|x| <= L`.
fn image_sum(p: f64, x: f64, l: f64) -> f64 {
    let two_l = 2.0 * l;
    two_l.powf(-p) * (hurwitz_zeta(p, 1.0 + x / two_l) + hurwitz_zeta(p, 1.0 - x / two_l))
}

/// `d/dx sum_{m != 0} |x + 2mL|^{-p}`.
fn image_sum_dx(p: f64, x: f64, l: f64) -> f64 {
    let two_l = 2.0 * l;
    -p * two_l.powf(-p - 1.0) * (hurwitz_zeta(p + 1.0, 1.0 + x / two_l) - hurwitz_zeta(p + 1.0, 1.0 - x / two_l))
}

/// Kernel samples on a box, with the out-of-box mass.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub spec: KernelSpec,
    /// Internal grid the kernel was synthesised on.
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub dx_values: Vec<f64>,
    /// `int_{|x| > L} K`.
    pub tail_mass: f64,
    /// `K(L)`, so that `int_{|x| > L} |K'| = 2 K(L)`.
    pub edge_value: f64,
    /// Size of the first neglected term of the image expansion at `|x| = L`.
    pub remainder: f64,
    /// `|K^{(2k)}(0)|`, `k = 1, 2, 3`.
    even_derivs: [f64; 3],
}

impl Kernel {
    /// Kernel on the automatic box `L = 200 a^{1/lambda}`.
    pub fn auto(spec: &KernelSpec) -> Result<Self> {
        spec.validate()?;
        let l = AUTO_WIDTHS * spec.width();
        let xi_c = (SPECTRAL_DEPTH / spec.a()).powf(1.0 / spec.lambda);
        let n = ((2.0 * l * xi_c / PI) as usize + 2).next_power_of_two().max(256);
        Self::synthesise(spec, l, n)
    }

    /// Kernel on an oversampled copy of `grid`; see `kernel_eval`.
    pub fn on_grid(spec: &KernelSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        let l = grid.half_length();
        let xi_c = (SPECTRAL_DEPTH / spec.a()).powf(1.0 / spec.lambda);
        let mut n = grid.len();
        while PI * (n / 2 - 1) as f64 / l < xi_c {
            n *= 2;
            if n > MAX_INTERNAL {
                return Err(Error::Domain(format!(
                    "resolving exp(-a|xi|^lambda) to depth {SPECTRAL_DEPTH} on L = {l} needs more than {MAX_INTERNAL} nodes"
                )));
            }
        }
        Self::synthesise(spec, l, n)
    }

    fn synthesise(spec: &KernelSpec, l: f64, n: usize) -> Result<Self> {
        let w = spec.width();
        if l < MIN_WIDTHS * w {
            return Err(Error::Domain(format!(
                "box half-width {l} is below {MIN_WIDTHS} kernel widths ({w:e})"
            )));
        }
        if n > MAX_INTERNAL {
            return Err(Error::Domain(format!("internal grid of {n} nodes exceeds {MAX_INTERNAL}")));
        }
        let grid = Grid::new(l, n)?;
        let a = spec.a();
        let lam = spec.lambda;
        let inv = 1.0 / (2.0 * l);
        let ny = grid.nyquist_slot();
        let c: Vec<Complex64> = grid
            .xi()
            .iter()
            .map(|&xi| Complex64::new(if xi == 0.0 { inv } else { inv * (-a * xi.abs().powf(lam)).exp() }, 0.0))
            .collect();
        let cd: Vec<Complex64> = c
            .iter()
            .zip(grid.xi())
            .enumerate()
            .map(|(i, (v, &xi))| if i == ny { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, xi) * v })
            .collect();
        let mut even_derivs = [0.0; 3];
        for (v, &xi) in c.iter().zip(grid.xi()) {
            let x2 = xi * xi;
            even_derivs[0] += x2 * v.re;
            even_derivs[1] += x2 * x2 * v.re;
            even_derivs[2] += x2 * x2 * x2 * v.re;
        }
        let mut values = grid.inverse(&c);
        let mut dx_values = grid.inverse(&cd);

        let (b, remainder) = tail_series(spec, l);
        if remainder > REMAINDER_TOL * spec.peak() {
            return Err(Error::Domain(format!(
                "image expansion does not converge on L = {l}: truncation estimate {remainder:e}"
            )));
        }
        if !b.is_empty() {
            for (j, &x) in grid.nodes().iter().enumerate() {
                let mut img = 0.0;
                let mut img_dx = 0.0;
                for (k, &bk) in b.iter().enumerate() {
                    let p = lam * (k + 1) as f64 + 1.0;
                    img += bk * image_sum(p, x, l);
                    img_dx += bk * image_sum_dx(p, x, l);
                }
                values[j] -= img;
                dx_values[j] -= img_dx;
            }
        }
        let (tail_mass, edge_value) = if lam == 2.0 {
            (libm::erfc(l / (2.0 * a.sqrt())), (-l * l / (4.0 * a)).exp() / (4.0 * PI * a).sqrt())
        } else {
            let mut m = 0.0;
            let mut e = 0.0;
            for (k, &bk) in b.iter().enumerate() {
                let q = lam * (k + 1) as f64;
                m += 2.0 * bk * l.powf(-q) / q;
                e += bk * l.powf(-q - 1.0);
            }
            (m, e)
        };
        Ok(Kernel {
            spec: *spec,
            grid,
            values,
            dx_values,
            tail_mass,
            edge_value,
            remainder,
            even_derivs,
        })
    }

    /// `int |K|` over the line: box quadrature plus the analytic tail.
    pub fn l1_norm(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.abs()).sum::<f64>() + self.tail_mass
    }

    /// `int |K_x|` over the line. `|K_x|` has a corner at the origin, so the
    /// box quadrature carries Euler-Maclaurin corrections there.
    pub fn dx_l1_norm(&self) -> f64 {
        let h = self.grid.dx();
        let h2 = h * h;
        let [m2, m4, m6] = self.even_derivs;
        let corner = h2 * m2 / 6.0 + h2 * h2 * m4 / 360.0 + h2 * h2 * h2 * m6 / 15120.0;
        h * self.dx_values.iter().map(|v| v.abs()).sum::<f64>() + corner + 2.0 * self.edge_value.abs()
    }

    /// `max |K| a^{1/lambda} (1 + a^{-2/lambda} x^2)` over the box.
    pub fn envelope_constant(&self) -> f64 {
        let w = self.spec.width();
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(x, k)| k.abs() * w * (1.0 + (x / w).powi(2)))
            .fold(0.0, f64::max)
    }

    /// Max-abs gap to the closed form (`lambda` = 1 or 2) over the box.
    pub fn closed_form_error(&self) -> Option<f64> {
        let spec = self.spec;
        closed_form(&spec, 0.0)?;
        Some(
            self.grid
                .nodes()
                .iter()
                .zip(&self.values)
                .map(|(&x, v)| (v - closed_form(&spec, x).expect("checked")).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Value at the internal node closest to `x`.
    pub fn value_near(&self, x: f64) -> f64 {
        let g = &self.grid;
        let j = (((x + g.half_length()) / g.dx()).round() as i64).rem_euclid(g.len() as i64) as usize;
        self.values[j]
    }
}

/// Heat kernel for `lambda = 2`, Poisson kernel for `lambda = 1`.
pub fn closed_form(spec: &KernelSpec, x: f64) -> Option<f64> {
    let a = spec.a();
    if spec.lambda == 2.0 {
        Some((-x * x / (4.0 * a)).exp() / (4.0 * PI * a).sqrt())
    } else if spec.lambda == 1.0 {
        Some(a / (PI * (a * a + x * x)))
    } else {
        None
    }
}

/// `K_lambda(t, x_j)` at the nodes of `grid`, on the real line (no periodisation).
pub fn kernel_eval(spec: &KernelSpec, grid: &Grid) -> Result<Vec<f64>> {
    let k = Kernel::on_grid(spec, grid)?;
    let stride = k.grid.len() / grid.len();
    Ok(k.values.iter().step_by(stride).copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub spec: KernelSpec,
    #[serde(with = "num_serde::real")]
    pub half_length: f64,
    pub n_internal: usize,
    #[serde(with = "num_serde::real")]
    pub l1_norm: f64,
    #[serde(with = "num_serde::real")]
    pub dx_l1_norm: f64,
    /// `|d_x K|_{L^1} (eps t)^{1/lambda}`, independent of `t`.
    #[serde(with = "num_serde::real")]
    pub dx_l1_scaled: f64,
    #[serde(with = "num_serde::real")]
    pub c1_expected: f64,
    #[serde(with = "num_serde::real")]
    pub peak: f64,
    #[serde(with = "num_serde::real")]
    pub peak_expected: f64,
    /// `max |K(t, x) - t^{-1/lambda} K(1, x t^{-1/lambda})|`.
    #[serde(with = "num_serde::real")]
    pub self_similarity_residual: f64,
    #[serde(with = "num_serde::real")]
    pub envelope_constant: f64,
    #[serde(with = "num_serde::real")]
    pub tail_mass: f64,
    #[serde(with = "num_serde::real")]
    pub series_remainder: f64,
    #[serde(with = "num_serde::real_opt")]
    pub closed_form_error: Option<f64>,
}

pub fn kernel_properties(spec: &KernelSpec) -> Result<KernelReport> {
    let k = Kernel::auto(spec)?;
    let unit = KernelSpec { t: 1.0, ..*spec };
    let s = spec.t.powf(1.0 / spec.lambda);
    let k1 = Kernel::synthesise(&unit, k.grid.half_length() / s, k.grid.len())?;
    let self_sim = k
        .values
        .iter()
        .zip(&k1.values)
        .map(|(a, b)| (a - b / s).abs())
        .fold(0.0, f64::max);
    let dx_l1 = k.dx_l1_norm();
    Ok(KernelReport {
        spec: *spec,
        half_length: k.grid.half_length(),
        n_internal: k.grid.len(),
        l1_norm: k.l1_norm(),
        dx_l1_norm: dx_l1,
        dx_l1_scaled: dx_l1 * spec.width(),
        c1_expected: spec.c1(),
        peak: k.value_near(0.0),
        peak_expected: spec.peak(),
        self_similarity_residual: self_sim,
        envelope_constant: k.envelope_constant(),
        tail_mass: k.tail_mass,
        series_remainder: k.remainder,
        closed_form_error: k.closed_form_error(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_against_riemann() {
        // zeta(2) = pi^2/6, zeta(4) = pi^4/90
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // zeta(2, 1/2) = 3 zeta(2)
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
        // direct sum check at a non-integer exponent
        let p = 1.65;
        let q = 1.3;
        let direct: f64 = (0..2_000_000).map(|k| (q + k as f64).powf(-p)).sum::<f64>()
            + (q + 2e6f64).powf(1.0 - p) / (p - 1.0);
        assert!((hurwitz_zeta(p, q) - direct).abs() < 1e-9);
    }

    #[test]
    fn poisson_series_matches_closed_form() {
        let spec = KernelSpec::new(1.0, 0.1, 1.0).unwrap();
        let (b, _) = tail_series(&spec, 20.0);
        let x: f64 = 25.0;
        let series: f64 = b.iter().enumerate().map(|(j, bj)| bj * x.powf(-(j as f64 + 2.0))).sum();
        let exact = 0.1 / (PI * (0.01 + x * x));
        assert!((series - exact).abs() < 1e-15 * exact.max(1.0));
    }

    #[test]
    fn rejects_small_box() {
        let spec = KernelSpec::new(1.0, 1.0, 1.0).unwrap();
        let g = Grid::new(5.0, 256).unwrap();
        assert!(matches!(Kernel::on_grid(&spec, &g), Err(Error::Domain(_))));
    }
}
