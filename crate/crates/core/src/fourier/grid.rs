use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::NdFft;
use super::freq::unflatten;
use super::poly::TrigPolynomial;
use crate::error::{param, Error, Result};

/// Values on the uniform torus grid `{2 pi j / G : 0 <= j < G}^d`,
/// row-major with the first axis slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    dim: usize,
    points: usize,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(dim: usize, points: usize, values: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || points == 0 {
            return param("grid needs d >= 1 and G >= 1");
        }
        let want = points.pow(dim as u32);
        if values.len() != want {
            return Err(Error::Dimension {
                expected: want,
                found: values.len(),
            });
        }
        Ok(Self { dim, points, values })
    }

    pub fn from_real(dim: usize, points: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(dim, points, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Sample a function of the grid coordinates.
    pub fn from_fn(dim: usize, points: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let total = points.pow(dim as u32);
        let mut x = vec![0.0; dim];
        let values = (0..total)
            .map(|k| {
                grid_point(k, dim, points, &mut x);
                Complex64::new(f(&x), 0.0)
            })
            .collect();
        Self::new(dim, points, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn check_aligned(&self, other: &GridField) -> Result<()> {
        if self.dim != other.dim || self.points != other.points {
            return Err(Error::GridMismatch(format!(
                "{}-d grid with G={} vs {}-d grid with G={}",
                self.dim, self.points, other.dim, other.points
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.check_aligned(other)?;
        Ok(GridField {
            dim: self.dim,
            points: self.points,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// Coordinates of grid point `k`.
    pub fn coordinates(&self, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        grid_point(k, self.dim, self.points, &mut x);
        x
    }

    /// Discrete Fourier analysis onto `|xi|_inf <= degree`. Exact for
    /// samples of a polynomial of that degree when `G >= 2 degree + 1`.
    pub fn project(&self, degree: usize) -> Result<TrigPolynomial> {
        let t = GridTransform::new(self.dim, degree, self.points)?;
        let coeffs = t.analyze(&self.values);
        TrigPolynomial::from_coeffs(self.dim, degree, coeffs)
    }
}

pub(crate) fn grid_point(mut k: usize, dim: usize, points: usize, x: &mut [f64]) {
    let h = 2.0 * PI / points as f64;
    for j in (0..dim).rev() {
        x[j] = (k % points) as f64 * h;
        k /= points;
    }
}

/// Synthesis/analysis between a degree-`m` coefficient block and a `G^d`
/// grid, with precomputed FFT plans.
pub struct GridTransform {
    dim: usize,
    degree: usize,
    points: usize,
    fft: NdFft,
    slots: Vec<usize>,
}

impl GridTransform {
    pub fn new(dim: usize, degree: usize, points: usize) -> Result<Self> {
        let needed = 2 * degree + 1;
        if points < needed {
            return Err(Error::Aliasing {
                points,
                degree,
                needed,
            });
        }
        let side = needed;
        let slots = (0..side.pow(dim as u32))
            .map(|k| {
                unflatten(k, dim, degree as u64)
                    .iter()
                    .fold(0usize, |acc, &c| acc * points + c.rem_euclid(points as i64) as usize)
            })
            .collect();
        Ok(Self {
            dim,
            degree,
            points,
            fft: NdFft::new(&vec![points; dim]),
            slots,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn grid_len(&self) -> usize {
        self.fft.len()
    }

    pub fn coeff_len(&self) -> usize {
        self.slots.len()
    }

    /// `values(x_j) = sum_xi c(xi) e^{i xi . x_j}`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut grid = vec![Complex64::default(); self.grid_len()];
        self.synthesize_into(coeffs, &mut grid);
        grid
    }

    pub fn synthesize_into(&self, coeffs: &[Complex64], grid: &mut [Complex64]) {
        assert_eq!(coeffs.len(), self.slots.len());
        grid.iter_mut().for_each(|v| *v = Complex64::default());
        for (&slot, &c) in self.slots.iter().zip(coeffs) {
            grid[slot] = c;
        }
        self.fft.process(grid, FftDirection::Inverse);
    }

    /// `c(xi) = G^{-d} sum_j values(x_j) e^{-i xi . x_j}` for `|xi|_inf <= m`.
    pub fn analyze(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut work = values.to_vec();
        self.analyze_in_place(&mut work)
    }

    /// Analysis that reuses (and clobbers) `work`.
    pub fn analyze_in_place(&self, work: &mut [Complex64]) -> Vec<Complex64> {
        assert_eq!(work.len(), self.grid_len());
        self.fft.process(work, FftDirection::Forward);
        let norm = 1.0 / self.grid_len() as f64;
        self.slots.iter().map(|&s| work[s] * norm).collect()
    }
}

/// Evaluate `p` on the `G^d` grid. Refuses grids that would alias.
pub fn evaluate_on_grid(p: &TrigPolynomial, points: usize) -> Result<GridField> {
    let t = GridTransform::new(p.dim(), p.degree(), points)?;
    GridField::new(p.dim(), points, t.synthesize(p.coeffs()))
}

/// `(G^{-d} sum |v|^p)^{1/p}` under the normalized counting measure;
/// `p = inf` gives the max modulus.
pub fn lp_norm_grid(g: &GridField, p: f64) -> Result<f64> {
    lp_norm_values(g.values().iter().map(|v| v.norm()), g.len(), p)
}

pub(crate) fn lp_norm_values(mags: impl Iterator<Item = f64>, n: usize, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return param(format!("L_p norm needs p >= 1, got {p}"));
    }
    if p.is_infinite() {
        return Ok(mags.fold(0.0, f64::max));
    }
    let sum: f64 = if p == 1.0 {
        mags.sum()
    } else if p == 2.0 {
        mags.map(|a| a * a).sum()
    } else {
        mags.map(|a| a.powf(p)).sum()
    };
    Ok((sum / n as f64).powf(1.0 / p))
}
