use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::Grid;
use super::multiplier::MultiplierSpec;
use crate::error::{Error, Result};

/// A real periodic field, held as samples and/or Fourier coefficients.
///
/// Whichever representation is missing is synthesised on first access and
/// cached. Coefficients follow `c_k = (1/2L) * int f(x) exp(-i xi_k x) dx`,
/// so `int |f|^2 = 2L sum |c_k|^2`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    samples: OnceLock<Vec<f64>>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl SpectralField {
    pub fn from_samples(grid: &Arc<Grid>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_samples_unchecked(grid, samples))
    }

    pub(crate) fn from_samples_unchecked(grid: &Arc<Grid>, samples: Vec<f64>) -> Self {
        let s = OnceLock::new();
        let _ = s.set(samples);
        SpectralField {
            grid: grid.clone(),
            samples: s,
            coeffs: OnceLock::new(),
        }
    }

    /// Builds a field from coefficients, projecting onto the Hermitian
    /// (real-valued) subspace.
    pub fn from_coeffs(grid: &Arc<Grid>, mut coeffs: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        if coeffs.len() != n {
            return Err(Error::GridMismatch);
        }
        coeffs[0].im = 0.0;
        coeffs[n / 2].im = 0.0;
        for i in 1..n / 2 {
            let avg = 0.5 * (coeffs[i] + coeffs[n - i].conj());
            coeffs[i] = avg;
            coeffs[n - i] = avg.conj();
        }
        Ok(Self::from_coeffs_unchecked(grid, coeffs))
    }

    pub(crate) fn from_coeffs_unchecked(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        let c = OnceLock::new();
        let _ = c.set(coeffs);
        SpectralField {
            grid: grid.clone(),
            samples: OnceLock::new(),
            coeffs: c,
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let s = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::from_samples_unchecked(grid, s)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
        c[0] = Complex64::new(value, 0.0);
        let f = Self::from_coeffs_unchecked(grid, c);
        let _ = f.samples.set(vec![value; grid.len()]);
        f
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        self.samples.get_or_init(|| {
            let c = self.coeffs.get().expect("field has no representation");
            self.grid.inverse(c)
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let s = self.samples.get().expect("field has no representation");
            self.grid.forward(s)
        })
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples();
        self.samples.into_inner().unwrap()
    }

    pub fn same_grid(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Trigonometric interpolation onto another grid of the same period:
    /// modes shared by both grids are kept, the rest (and both Nyquist modes)
    /// dropped.
    pub fn resample(&self, grid: &Arc<Grid>) -> Result<SpectralField> {
        if (grid.half_length() - self.grid.half_length()).abs() > 1e-12 * grid.half_length() {
            return Err(Error::GridMismatch);
        }
        let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
        let ny = self.grid.nyquist_slot();
        for (i, v) in self.coeffs().iter().enumerate() {
            if i == ny {
                continue;
            }
            if let Some(j) = grid.slot(self.grid.k(i)) {
                if j != grid.nyquist_slot() {
                    c[j] = *v;
                }
            }
        }
        Ok(SpectralField::from_coeffs_unchecked(grid, c))
    }

    /// Coefficient-wise map `c_k -> h(xi_k, c_k)`.
    pub fn map_coeffs(&self, h: impl Fn(f64, Complex64) -> Complex64) -> SpectralField {
        let c = self
            .coeffs()
            .iter()
            .zip(self.grid.xi())
            .map(|(&c, &xi)| h(xi, c))
            .collect();
        Self::from_coeffs_unchecked(&self.grid, c)
    }

    /// Pointwise map on samples. The result is generally not band-limited.
    pub fn map_samples(&self, h: impl Fn(f64) -> f64) -> SpectralField {
        let s = self.samples().iter().map(|&v| h(v)).collect();
        Self::from_samples_unchecked(&self.grid, s)
    }

    pub fn apply_multiplier(&self, m: &MultiplierSpec) -> Result<SpectralField> {
        m.validate()?;
        let xi = self.grid.xi();
        let mut vals = Vec::with_capacity(xi.len());
        for &x in xi {
            let v = m.eval(x);
            if !v.is_finite() {
                return Err(Error::SingularMultiplier {
                    symbol: m.name(),
                    xi: x,
                    value: v,
                });
            }
            vals.push(v);
        }
        let c = self.coeffs().iter().zip(&vals).map(|(&c, &v)| c * v).collect();
        Ok(Self::from_coeffs_unchecked(&self.grid, c))
    }

    /// `g_lambda f`, the multiplier `|xi|^lambda`.
    pub fn g_lambda(&self, lambda: f64) -> Result<SpectralField> {
        self.apply_multiplier(&MultiplierSpec::Fractal { lambda })
    }

    /// `(1 - mu d_xx)^{-1} f`.
    pub fn helmholtz_inverse(&self, mu: f64) -> Result<SpectralField> {
        self.apply_multiplier(&MultiplierSpec::HelmholtzInverse { mu })
    }

    /// `Lambda^s f = (1 - d_xx)^{s/2} f`.
    pub fn bessel(&self, s: f64) -> SpectralField {
        self.map_coeffs(|xi, c| c * (1.0 + xi * xi).powf(0.5 * s))
    }

    /// Spectral derivative; the unpaired Nyquist mode is dropped.
    pub fn dx(&self) -> SpectralField {
        let ny = self.grid.nyquist_slot();
        let c = self
            .coeffs()
            .iter()
            .zip(self.grid.xi())
            .enumerate()
            .map(|(i, (&c, &xi))| {
                if i == ny {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(-xi * c.im, xi * c.re)
                }
            })
            .collect();
        Self::from_coeffs_unchecked(&self.grid, c)
    }

    /// Zeroes every mode with `3|k| >= n`.
    pub fn dealias(&self) -> SpectralField {
        let kmax = self.grid.dealias_kmax() as i64;
        let g = self.grid.clone();
        let c = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| if g.k(i).abs() <= kmax { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self::from_coeffs_unchecked(&self.grid, c)
    }

    /// True if every mode outside the 2/3 band is below `tol` in modulus.
    pub fn is_dealiased(&self, tol: f64) -> bool {
        let kmax = self.grid.dealias_kmax() as i64;
        self.coeffs()
            .iter()
            .enumerate()
            .all(|(i, c)| self.grid.k(i).abs() <= kmax || c.norm() <= tol)
    }

    /// Pointwise product followed by 2/3-rule truncation.
    pub fn mul(&self, other: &SpectralField) -> SpectralField {
        debug_assert!(self.same_grid(other).is_ok());
        let s = self
            .samples()
            .iter()
            .zip(other.samples())
            .map(|(a, b)| a * b)
            .collect();
        Self::from_samples_unchecked(&self.grid, s).dealias()
    }

    pub fn lincomb(a: f64, f: &SpectralField, b: f64, g: &SpectralField) -> SpectralField {
        debug_assert!(f.same_grid(g).is_ok());
        let c = f
            .coeffs()
            .iter()
            .zip(g.coeffs())
            .map(|(&x, &y)| x * a + y * b)
            .collect();
        Self::from_coeffs_unchecked(&f.grid, c)
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        Self::lincomb(1.0, self, 1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        Self::lincomb(1.0, self, -1.0, other)
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        let c = self.coeffs().iter().map(|&x| x * a).collect();
        Self::from_coeffs_unchecked(&self.grid, c)
    }

    /// `int f dx = 2L c_0`.
    pub fn integral(&self) -> f64 {
        2.0 * self.grid.half_length() * self.coeffs()[0].re
    }

    pub fn mean(&self) -> f64 {
        self.coeffs()[0].re
    }

    pub fn min(&self) -> f64 {
        self.samples().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// L2 norm from the coefficient side.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// Discrete L^p norm of the samples; `p = f64::INFINITY` gives the max.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::param("p", p, ">= 1"));
        }
        if p.is_infinite() {
            return Ok(self.linf_norm());
        }
        let dx = self.grid.dx();
        let sum: f64 = self.samples().iter().map(|v| v.abs().powf(p)).sum();
        Ok((dx * sum).powf(1.0 / p))
    }

    /// `( sum_k 2L (1 + xi_k^2)^s |c_k|^2 )^(1/2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let two_l = 2.0 * self.grid.half_length();
        let sum: f64 = self
            .coeffs()
            .iter()
            .zip(self.grid.xi())
            .map(|(c, &xi)| (1.0 + xi * xi).powf(s) * c.norm_sqr())
            .sum();
        (two_l * sum).sqrt()
    }

    /// `(f, g)_{L2}` from the coefficient side.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let two_l = 2.0 * self.grid.half_length();
        two_l
            * self
                .coeffs()
                .iter()
                .zip(other.coeffs())
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
    }

    pub fn all_finite(&self) -> bool {
        match (self.samples.get(), self.coeffs.get()) {
            (Some(s), _) => s.iter().all(|v| v.is_finite()),
            (None, Some(c)) => c.iter().all(|v| v.re.is_finite() && v.im.is_finite()),
            (None, None) => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Grid::new(PI, 32).unwrap()
    }

    #[test]
    fn sine_norms() {
        let g = grid();
        let f = SpectralField::from_fn(&g, f64::sin);
        assert!((f.sobolev_norm(0.0) - PI.sqrt()).abs() < 1e-12);
        assert!((f.sobolev_norm(1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((f.lp_norm(2.0).unwrap() - PI.sqrt()).abs() < 1e-12);
        assert!((f.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!(SpectralField::zeros(&g).sobolev_norm(3.0) == 0.0);
    }

    #[test]
    fn constant_l1() {
        let g = grid();
        let f = SpectralField::constant(&g, 2.0);
        assert!((f.lp_norm(1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid();
        let f = SpectralField::from_fn(&g, |x| (3.0 * x).sin());
        let d = f.dx();
        for (x, v) in g.nodes().iter().zip(d.samples()) {
            assert!((v - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplier_examples() {
        let g = grid();
        let s = SpectralField::from_fn(&g, f64::sin);
        let g2 = s.g_lambda(2.0).unwrap();
        assert!(g2.sub(&s).linf_norm() < 1e-13);
        let s3 = SpectralField::from_fn(&g, |x| (3.0 * x).sin());
        assert!(s3.g_lambda(1.0).unwrap().sub(&s3.scale(3.0)).linf_norm() < 1e-12);
        assert!(SpectralField::constant(&g, 5.0).g_lambda(0.7).unwrap().linf_norm() < 1e-14);
        let c2 = SpectralField::from_fn(&g, |x| 2.0 * x.cos());
        let c = SpectralField::from_fn(&g, f64::cos);
        assert!(c2.helmholtz_inverse(1.0).unwrap().sub(&c).linf_norm() < 1e-14);
        assert!(s.g_lambda(2.5).is_err());
        assert!(s.g_lambda(0.0).is_err());
    }

    #[test]
    fn singular_multiplier_is_reported() {
        let g = grid();
        let f = SpectralField::from_fn(&g, f64::sin);
        let m = MultiplierSpec::custom("inv", |xi: f64| 1.0 / xi.abs());
        assert!(matches!(f.apply_multiplier(&m), Err(Error::SingularMultiplier { .. })));
    }

    #[test]
    fn product_is_dealiased() {
        let g = grid();
        let a = SpectralField::from_fn(&g, |x| (4.0 * x).cos());
        let p = a.mul(&a);
        let want = SpectralField::from_fn(&g, |x| 0.5 + 0.5 * (8.0 * x).cos());
        assert!(p.sub(&want).linf_norm() < 1e-13);
        let hi = SpectralField::from_fn(&g, |x| (10.0 * x).cos());
        assert!(hi.mul(&hi).sub(&SpectralField::constant(&g, 0.5)).linf_norm() < 1e-13);
    }

    #[test]
    fn from_coeffs_projects_to_real() {
        let g = grid();
        let mut c = vec![Complex64::new(0.0, 0.0); 32];
        c[1] = Complex64::new(1.0, 0.0);
        let f = SpectralField::from_coeffs(&g, c).unwrap();
        for (x, v) in g.nodes().iter().zip(f.samples()) {
            assert!((v - x.cos()).abs() < 1e-13);
        }
    }
}
