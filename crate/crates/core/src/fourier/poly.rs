use num_complex::Complex64;

use super::freq::{unflatten, FrequencyIndex};
use crate::error::{Error, Result};

/// Relative tolerance for Hermitian symmetry checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Anything that can report continuous Fourier coefficients `f^(xi)`.
pub trait CoefficientSource {
    fn dim(&self) -> usize;
    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64>;
}

impl<T: CoefficientSource + ?Sized> CoefficientSource for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        (**self).coefficient(xi)
    }
}

/// A trigonometric polynomial of coordinate-wise degree at most `m` on the
/// `d`-torus, stored densely over the block `|xi|_inf <= m`.
///
/// Storage is row-major with the first frequency component slowest, so the
/// storage order coincides with lexicographic frequency order.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl TrigPolynomial {
    pub fn zeros(dim: usize, degree: usize) -> Self {
        assert!(dim >= 1);
        let len = (2 * degree + 1).pow(dim as u32);
        Self {
            dim,
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
            real: true,
        }
    }

    /// Build from a function of the frequency. The real flag is inferred.
    pub fn from_fn(dim: usize, degree: usize, mut f: impl FnMut(&FrequencyIndex) -> Complex64) -> Self {
        let mut p = Self::zeros(dim, degree);
        for flat in 0..p.coeffs.len() {
            let xi = FrequencyIndex::new(unflatten(flat, dim, degree as u64));
            p.coeffs[flat] = f(&xi);
        }
        p.real = p.hermitian_defect() <= HERMITIAN_TOL;
        p
    }

    /// Wrap a dense coefficient block; the real flag is inferred.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let len = (2 * degree + 1).pow(dim as u32);
        if coeffs.len() != len {
            return Err(Error::Dimension {
                expected: len,
                found: coeffs.len(),
            });
        }
        let mut p = Self {
            dim,
            degree,
            coeffs,
            real: false,
        };
        p.real = p.hermitian_defect() <= HERMITIAN_TOL;
        Ok(p)
    }

    /// Like [`from_coeffs`](Self::from_coeffs) but projects onto the
    /// Hermitian-symmetric subspace, so the result is a real function.
    pub fn real_from_coeffs(dim: usize, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut p = Self::from_coeffs(dim, degree, coeffs)?;
        p.symmetrize();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn side(&self) -> usize {
        2 * self.degree + 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Flat storage offset of `xi`, or `None` outside the block.
    pub fn offset(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.dim {
            return None;
        }
        let m = self.degree as i64;
        let side = self.side();
        let mut flat = 0usize;
        for &c in xi {
            if c < -m || c > m {
                return None;
            }
            flat = flat * side + (c + m) as usize;
        }
        Some(flat)
    }

    pub fn frequency_at(&self, flat: usize) -> FrequencyIndex {
        FrequencyIndex::new(unflatten(flat, self.dim, self.degree as u64))
    }

    /// Coefficient at `xi`; zero outside the block.
    pub fn coeff(&self, xi: &FrequencyIndex) -> Complex64 {
        self.offset(xi.components())
            .map(|k| self.coeffs[k])
            .unwrap_or_default()
    }

    /// Set a coefficient. Clears the real flag unless the value keeps symmetry.
    pub fn set(&mut self, xi: &FrequencyIndex, value: Complex64) -> Result<()> {
        let k = self
            .offset(xi.components())
            .ok_or_else(|| Error::Parameter(format!("{xi} outside degree-{} block", self.degree)))?;
        self.coeffs[k] = value;
        if self.real {
            let mirror = self.offset(&xi.neg().components().to_vec()).unwrap();
            if !close(self.coeffs[mirror].conj(), value) {
                self.real = false;
            }
        }
        Ok(())
    }

    /// Flat offset of `-xi` given the flat offset of `xi`.
    pub(crate) fn mirror_offset(&self, flat: usize) -> usize {
        self.coeffs.len() - 1 - flat
    }

    /// Largest relative violation of `c(-xi) = conj(c(xi))`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for k in 0..self.coeffs.len() {
            let d = (self.coeffs[k] - self.coeffs[self.mirror_offset(k)].conj()).norm();
            worst = worst.max(d);
        }
        worst / scale
    }

    /// Project onto the Hermitian-symmetric subspace.
    pub fn symmetrize(&mut self) {
        let n = self.coeffs.len();
        for k in 0..=n / 2 {
            let j = n - 1 - k;
            let avg = (self.coeffs[k] + self.coeffs[j].conj()) * 0.5;
            self.coeffs[k] = avg;
            self.coeffs[j] = avg.conj();
        }
        self.real = true;
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient-space l2 norm, which equals the L2 norm under the
    /// normalized measure on the torus.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Re-embed into a block of degree `degree`, truncating if smaller.
    pub fn with_degree(&self, degree: usize) -> Self {
        if degree == self.degree {
            return self.clone();
        }
        let mut out = Self::zeros(self.dim, degree);
        let lo = self.degree.min(degree);
        for xi in super::freq::block(self.dim, lo as u64) {
            let k = out.offset(xi.components()).unwrap();
            out.coeffs[k] = self.coeff(&xi);
        }
        out.real = self.real;
        out
    }

    pub fn scale(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= t);
        out
    }

    /// `self - other`, with the result at the larger of the two degrees.
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    fn combine(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let degree = self.degree.max(other.degree);
        let a = self.with_degree(degree);
        let b = other.with_degree(degree);
        Self {
            dim: self.dim,
            degree,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| op(x, y)).collect(),
            real: self.real && other.real,
        }
    }

    /// Largest coefficient-wise difference, comparing on the union of blocks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Spectral partial derivatives: the `j`-th component has coefficients
    /// `i xi_j c(xi)`. Degree and real flag are preserved.
    pub fn gradient(&self) -> Vec<TrigPolynomial> {
        (0..self.dim)
            .map(|axis| {
                let mut g = self.clone();
                for (k, c) in g.coeffs.iter_mut().enumerate() {
                    let xi = unflatten(k, self.dim, self.degree as u64);
                    *c *= Complex64::new(0.0, xi[axis] as f64);
                }
                g
            })
            .collect()
    }

    /// Iterate `(frequency, coefficient)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (FrequencyIndex, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.frequency_at(k), c))
    }
}

impl CoefficientSource for TrigPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        if xi.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: xi.dim(),
            });
        }
        Ok(self.coeff(xi))
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= HERMITIAN_TOL * a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}
