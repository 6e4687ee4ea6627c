use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{unflatten, GridTransform, TrigPolynomial};

/// Discrete gradient of a real degree-`m` polynomial sampled on a `G^d`
/// grid with `G >= 4m + 1`.
///
/// Inner products are normalized: grid fields use `G^{-d} sum`, coefficient
/// vectors the plain sum. With that convention `B^* B` is the diagonal
/// `|xi|^2` on Hermitian coefficient vectors, because synthesis from the
/// degree-`m` block onto the grid has orthonormal columns.
pub struct GradientOperator {
    transform: GridTransform,
    /// `xi` per coefficient offset, as floats.
    freqs: Vec<Vec<f64>>,
    mirror: Vec<usize>,
    work: Vec<Complex64>,
}

/// Gradient samples: one real field per axis.
pub type GradientField = Vec<Vec<f64>>;

impl GradientOperator {
    pub fn new(dim: usize, degree: usize, points: usize) -> Result<Self> {
        let needed = 4 * degree + 1;
        if points < needed {
            return Err(Error::Aliasing {
                points,
                degree,
                needed,
            });
        }
        let transform = GridTransform::new(dim, degree, points)?;
        let n = transform.coeff_len();
        let freqs = (0..n)
            .map(|k| unflatten(k, dim, degree as u64).iter().map(|&c| c as f64).collect())
            .collect();
        let work = vec![Complex64::default(); transform.grid_len()];
        Ok(Self {
            transform,
            freqs,
            mirror: (0..n).rev().collect(),
            work,
        })
    }

    pub fn dim(&self) -> usize {
        self.transform.dim()
    }

    pub fn degree(&self) -> usize {
        self.transform.degree()
    }

    pub fn points(&self) -> usize {
        self.transform.points()
    }

    pub fn grid_len(&self) -> usize {
        self.transform.grid_len()
    }

    pub fn coeff_len(&self) -> usize {
        self.transform.coeff_len()
    }

    /// `|xi|^2` per coefficient offset.
    pub fn diagonal(&self) -> Vec<f64> {
        self.freqs.iter().map(|xi| xi.iter().map(|c| c * c).sum()).collect()
    }

    pub fn zero_field(&self) -> GradientField {
        vec![vec![0.0; self.grid_len()]; self.dim()]
    }

    /// `B c`: spectral derivatives synthesized on the grid, real parts.
    /// Axes are processed in pairs packed into one complex transform.
    pub fn apply(&mut self, coeffs: &[Complex64], out: &mut GradientField) {
        let d = self.dim();
        let i = Complex64::new(0.0, 1.0);
        let mut axis = 0;
        while axis < d {
            let pair = axis + 1 < d;
            let spec: Vec<Complex64> = coeffs
                .iter()
                .zip(&self.freqs)
                .map(|(&c, xi)| {
                    let a = i * xi[axis] * c;
                    if pair {
                        a + i * (i * xi[axis + 1] * c)
                    } else {
                        a
                    }
                })
                .collect();
            self.transform.synthesize_into(&spec, &mut self.work);
            for (k, v) in self.work.iter().enumerate() {
                out[axis][k] = v.re;
                if pair {
                    out[axis + 1][k] = v.im;
                }
            }
            axis += 2;
        }
    }

    /// `B^* w`, the adjoint under the normalized inner products.
    pub fn adjoint(&mut self, field: &GradientField, out: &mut [Complex64]) {
        let d = self.dim();
        out.iter_mut().for_each(|c| *c = Complex64::default());
        let i = Complex64::new(0.0, 1.0);
        let mut axis = 0;
        while axis < d {
            let pair = axis + 1 < d;
            for (k, w) in self.work.iter_mut().enumerate() {
                *w = Complex64::new(field[axis][k], if pair { field[axis + 1][k] } else { 0.0 });
            }
            let packed = self.transform.analyze_in_place(&mut self.work);
            for k in 0..out.len() {
                let a = packed[k];
                let b = packed[self.mirror[k]].conj();
                let (wa, wb) = if pair {
                    ((a + b) * 0.5, (a - b) / (2.0 * i))
                } else {
                    ((a + b) * 0.5, Complex64::default())
                };
                let xi = &self.freqs[k];
                out[k] += -i * xi[axis] * wa;
                if pair {
                    out[k] += -i * xi[axis + 1] * wb;
                }
            }
            axis += 2;
        }
    }

    /// Isotropic discrete TV `G^{-d} sum_j |(B c)_j|_2`.
    pub fn tv(&mut self, coeffs: &[Complex64]) -> f64 {
        let mut f = self.zero_field();
        self.apply(coeffs, &mut f);
        iso_l1(&f)
    }
}

pub(crate) fn iso_l1(field: &GradientField) -> f64 {
    let n = field[0].len();
    let mut acc = 0.0;
    for k in 0..n {
        acc += field.iter().map(|ch| ch[k] * ch[k]).sum::<f64>().sqrt();
    }
    acc / n as f64
}

/// Build the discrete gradient operator for degree `m` on a `G`-point axis grid.
pub fn gradient_grid_operator(dim: usize, degree: usize, points: usize) -> Result<GradientOperator> {
    GradientOperator::new(dim, degree, points)
}

/// `||B p||_{l1}` for a real polynomial on the grid used by the solver.
pub fn bv_objective(p: &TrigPolynomial, points: usize) -> Result<f64> {
    let mut op = GradientOperator::new(p.dim(), p.degree(), points)?;
    Ok(op.tv(p.coeffs()))
}
