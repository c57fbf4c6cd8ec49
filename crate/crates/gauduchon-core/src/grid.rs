//! Periodic grid over the flat complex torus ℂⁿ/Λ and spectrally accurate
//! complex differential operators ∂ᵢ, ∂ⱼ̄ on scalar fields.
//!
//! Real coordinates are x¹..x^{2n} with zⁱ = xⁱ + √−1 x^{n+i}. Fields are
//! stored as flat arrays in row-major axis order x¹..x^{2n} (x¹ slowest,
//! x^{2n} fastest), so dumps are reproducible bit-exactly.

use num_complex::Complex64;
use thiserror::Error;

use crate::fft;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("complex dimension {0} unsupported (only n = 2, 3)")]
    UnsupportedDimension(usize),
    #[error("resolution {0} invalid: need res ≥ 4 and even")]
    BadResolution(usize),
    #[error("resolution {res} too large for n = 3 (max 16)")]
    ResolutionTooLarge { res: usize },
    #[error("period must be positive, got {0}")]
    BadPeriod(f64),
    #[error("complex axis {axis} out of range for n = {n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("grids differ: {0}")]
    GridMismatch(&'static str),
    #[error("field is not real: max |Im| = {max_im:e} vs max |value| = {max_abs:e}")]
    NotReal { max_im: f64, max_abs: f64 },
}

/// Uniform periodic discretisation of the flat torus ℂⁿ/Λ.
///
/// There are 2n real axes of `res` points each, `res.pow(2n)` points in
/// total, and every axis has the same real side length `period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    n: usize,
    res: usize,
    period: f64,
}

impl TorusGrid {
    /// Grid with unit period. `n ∈ {2, 3}`, `res ≥ 4` and even; n = 3 is
    /// capped at res ≤ 16 (the point count is res⁶).
    pub fn new(n: usize, res: usize) -> Result<Self, GridError> {
        Self::with_period(n, res, 1.0)
    }

    pub fn with_period(n: usize, res: usize, period: f64) -> Result<Self, GridError> {
        if !(2..=3).contains(&n) {
            return Err(GridError::UnsupportedDimension(n));
        }
        if res < 4 || res % 2 != 0 {
            return Err(GridError::BadResolution(res));
        }
        if n == 3 && res > 16 {
            return Err(GridError::ResolutionTooLarge { res });
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(GridError::BadPeriod(period));
        }
        Ok(Self { n, res, period })
    }

    /// Complex dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of real axes, 2n.
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Points per real axis.
    pub fn res(&self) -> usize {
        self.res
    }

    /// Real side length per axis.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total point count res^{2n}.
    pub fn num_points(&self) -> usize {
        self.res.pow(self.axes() as u32)
    }

    /// Real coordinates of the flat index (length 2n, entries in [0, period)).
    pub fn coords_of(&self, mut idx: usize) -> [f64; 6] {
        let mut x = [0.0f64; 6];
        let h = self.period / self.res as f64;
        for a in (0..self.axes()).rev() {
            x[a] = (idx % self.res) as f64 * h;
            idx /= self.res;
        }
        x
    }

    /// Flat index of the axis digits (x¹ slowest).
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.axes());
        digits.iter().fold(0, |acc, &d| acc * self.res + d % self.res)
    }

    pub fn same_grid(&self, other: &TorusGrid) -> Result<(), GridError> {
        if self == other {
            Ok(())
        } else {
            Err(GridError::GridMismatch("operands live on different grids"))
        }
    }
}

/// A complex scalar field over the grid. Real quantities (potentials,
/// residuals, log-densities) are carried with zero imaginary part; use
/// [`ScalarField::check_real`] to enforce that.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.num_points()],
        }
    }

    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.num_points()],
        }
    }

    /// Build from a function of the real coordinates x¹..x^{2n}.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.num_points())
            .map(|i| f(&grid.coords_of(i)[..grid.axes()]))
            .collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_values(grid: TorusGrid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.num_points());
        Self { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.norm_sqr()))
            .sqrt()
    }

    /// Sup norm of the real part.
    pub fn sup_re(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.re.abs()))
    }

    pub fn max_im(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// Grid average (the zero Fourier mode).
    pub fn mean(&self) -> Complex64 {
        let sum: Complex64 = self.values.iter().sum();
        sum / self.values.len() as f64
    }

    /// A field counts as real when max |Im| ≤ rel_tol · max |value|.
    pub fn is_real(&self, rel_tol: f64) -> bool {
        self.max_im() <= rel_tol * self.max_abs()
    }

    pub fn check_real(&self, rel_tol: f64) -> Result<(), GridError> {
        if self.is_real(rel_tol) {
            Ok(())
        } else {
            Err(GridError::NotReal {
                max_im: self.max_im(),
                max_abs: self.max_abs(),
            })
        }
    }

    /// Drop imaginary round-off from a field known to be real.
    pub fn re_field(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        }
    }

    pub fn conj(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(Complex64, Complex64) -> Complex64) -> ScalarField {
        self.grid.same_grid(&other.grid).expect("zip_with");
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> ScalarField {
        self.map(|v| v * c)
    }

    pub fn scale_re(&self, c: f64) -> ScalarField {
        self.map(|v| v * c)
    }

    pub fn axpy(&mut self, c: Complex64, other: &ScalarField) {
        self.grid.same_grid(&other.grid).expect("axpy");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    /// ∂ᵢ f = ½(∂_{xⁱ} − √−1 ∂_{x^{n+i}}) f by trigonometric differentiation;
    /// exact for band-limited fields. Complex axes are indexed 0..n.
    pub fn d_holo(&self, axis: usize) -> Result<ScalarField, GridError> {
        self.d_complex(axis, false)
    }

    /// ∂ⱼ̄ f = ½(∂_{xʲ} + √−1 ∂_{x^{n+j}}) f; mirror of [`Self::d_holo`].
    pub fn d_antiholo(&self, axis: usize) -> Result<ScalarField, GridError> {
        self.d_complex(axis, true)
    }

    fn d_complex(&self, axis: usize, barred: bool) -> Result<ScalarField, GridError> {
        let n = self.grid.dim();
        if axis >= n {
            return Err(GridError::AxisOutOfRange { axis, n });
        }
        let spectrum = fft::forward(&self.grid, &self.values);
        let tau = std::f64::consts::TAU;
        // ∂ᵢ ↦ (π√−1/L)(kᵢ − √−1 k_{n+i}) per mode; the barred operator
        // conjugates the bracket.
        let values = fft::apply_symbol(&self.grid, &spectrum, |k| {
            let kappa = if barred {
                Complex64::new(k[axis], k[n + axis])
            } else {
                Complex64::new(k[axis], -k[n + axis])
            };
            Complex64::i() * (0.5 * tau) * kappa
        });
        Ok(ScalarField {
            grid: self.grid,
            values,
        })
    }

    /// Forward spectrum (unnormalised); pair with [`Self::from_spectrum_symbol`]
    /// to evaluate several derivative symbols off one transform.
    pub(crate) fn spectrum(&self) -> Vec<Complex64> {
        fft::forward(&self.grid, &self.values)
    }

    pub(crate) fn from_spectrum_symbol<F>(grid: TorusGrid, spectrum: &[Complex64], symbol: F) -> ScalarField
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        ScalarField {
            grid,
            values: fft::apply_symbol(&grid, spectrum, symbol),
        }
    }
}
