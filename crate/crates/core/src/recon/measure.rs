use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::design::SamplingDesign;
use crate::error::{Error, Result};
use crate::fourier::io::{read_coefficient_rows, write_coefficient_rows};
use crate::fourier::{CoefficientSource, FrequencyIndex, HERMITIAN_TOL};

/// Exact Fourier coefficients observed at a set of frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurements {
    dim: usize,
    values: BTreeMap<FrequencyIndex, Complex64>,
    source: String,
    real: bool,
}

impl Measurements {
    /// Build from explicit pairs. `real` declares that the measured function
    /// is real-valued, so `f^(-xi) = conj f^(xi)` is known for every sampled
    /// `xi`; pairs present on both sides must agree.
    pub fn new(
        dim: usize,
        pairs: impl IntoIterator<Item = (FrequencyIndex, Complex64)>,
        source: impl Into<String>,
        real: bool,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (xi, v) in pairs {
            if xi.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: xi.dim(),
                });
            }
            if values.insert(xi.clone(), v).is_some() {
                return Err(Error::Duplicate(xi.to_string()));
            }
        }
        let scale = values.values().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for (xi, v) in &values {
            if let Some(w) = values.get(&xi.neg()) {
                if (w.conj() - v).norm() > HERMITIAN_TOL * scale && real {
                    return Err(Error::Infeasible(format!(
                        "values at {xi} and its mirror are not conjugate"
                    )));
                }
            }
            if real && xi.is_zero() && v.im.abs() > HERMITIAN_TOL * scale {
                return Err(Error::Infeasible("the mean of a real function must be real".into()));
            }
        }
        Ok(Self {
            dim,
            values,
            source: source.into(),
            real,
        })
    }

    /// Sample `f` at every design frequency.
    pub fn from_source<S: CoefficientSource + ?Sized>(
        design: &SamplingDesign,
        f: &S,
        source: impl Into<String>,
        real: bool,
    ) -> Result<Self> {
        if f.dim() != design.dim() {
            return Err(Error::Dimension {
                expected: design.dim(),
                found: f.dim(),
            });
        }
        let pairs = design
            .freqs()
            .iter()
            .map(|xi| Ok((xi.clone(), f.coefficient(xi)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(design.dim(), pairs, source, real)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FrequencyIndex, &Complex64)> {
        self.values.iter()
    }

    pub fn get(&self, xi: &FrequencyIndex) -> Option<Complex64> {
        self.values.get(xi).copied()
    }

    /// Value at `xi`, using conjugate symmetry for real measurements.
    pub fn lookup(&self, xi: &FrequencyIndex) -> Option<Complex64> {
        self.get(xi)
            .or_else(|| if self.real { self.get(&xi.neg()).map(|v| v.conj()) } else { None })
    }

    pub fn max_sup_norm(&self) -> u64 {
        self.values.keys().map(|f| f.sup_norm()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(|(k, v)| (k.clone(), v * t)).collect(),
            source: self.source.clone(),
            real: self.real,
        }
    }

    /// Coefficient CSV with the sampled rows only.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_coefficient_rows(path, self.dim, self.values.iter().map(|(k, v)| (k, *v)))
    }

    pub fn read(path: &Path, source: impl Into<String>, real: bool) -> Result<Self> {
        let (dim, rows) = read_coefficient_rows(path)?;
        Self::new(dim, rows, source, real)
    }
}

impl CoefficientSource for Measurements {
    fn dim(&self) -> usize {
        self.dim
    }
    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        self.lookup(xi).ok_or_else(|| Error::MissingFrequency(xi.to_string()))
    }
}
