use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)` with `n` nodes.
///
/// Nodes are `x_j = -L + j dx`, `dx = 2L/n`. Wavenumbers `xi_k = pi k / L`
/// are stored in FFT order (`k = 0, 1, .., n/2-1, -n/2, .., -1`).
pub struct Grid {
    half_length: f64,
    n: usize,
    x: Vec<f64>,
    xi: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Arc<Grid>> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::param("L", half_length, "a finite positive real"));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::param("n_modes", n, "a power of two >= 8"));
        }
        let dx = 2.0 * half_length / n as f64;
        let x = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let xi = (0..n)
            .map(|i| std::f64::consts::PI * signed_index(i, n) as f64 / half_length)
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            half_length,
            n,
            x,
            xi,
            fft,
            ifft,
        }))
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Fundamental wavenumber `pi / L`.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Wavenumbers in FFT storage order.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Wavenumbers sorted ascending, `k = -n/2 .. n/2-1`.
    pub fn xi_sorted(&self) -> Vec<f64> {
        let h = self.n / 2;
        (0..self.n).map(|i| self.xi[(i + h) % self.n]).collect()
    }

    /// Signed integer wavenumber of storage slot `i`.
    pub fn k(&self, i: usize) -> i64 {
        signed_index(i, self.n)
    }

    /// Storage slot of signed wavenumber `k`, if representable.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if k < -h || k >= h {
            return None;
        }
        Some(k.rem_euclid(self.n as i64) as usize)
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    /// Largest `|k|` kept by the 2/3 rule (`3|k| < n`).
    pub fn dealias_kmax(&self) -> usize {
        (self.n - 1) / 3
    }

    pub fn xi_max(&self) -> f64 {
        self.dxi() * (self.n / 2 - 1) as f64
    }

    pub fn xi_max_dealiased(&self) -> f64 {
        self.dxi() * self.dealias_kmax() as f64
    }

    pub(crate) fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= if i % 2 == 0 { scale } else { -scale };
        }
        buf
    }

    pub(crate) fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
            .collect();
        self.ifft.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0, 6).is_err());
        assert!(Grid::new(1.0, 4).is_err());
        assert!(Grid::new(-1.0, 16).is_err());
        assert!(Grid::new(1.0, 16).is_ok());
    }

    #[test]
    fn wavenumbers_sorted_and_symmetric() {
        let g = Grid::new(std::f64::consts::PI, 16).unwrap();
        let xs = g.xi_sorted();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(xs[0], -8.0);
        for k in 1..8 {
            assert!((xs[8 + k] + xs[8 - k]).abs() < 1e-14);
        }
        assert_eq!(g.slot(-8), Some(8));
        assert_eq!(g.slot(8), None);
        assert_eq!(g.k(15), -1);
    }

    #[test]
    fn dealias_band() {
        let g = Grid::new(1.0, 256).unwrap();
        assert_eq!(g.dealias_kmax(), 85);
    }
}
