//! de la Vallée Poussin sums and the dyadic band decomposition built on them.

use num_complex::Complex64;

use super::freq::FrequencyIndex;
use super::grid::{lp_norm_values, GridTransform};
use super::poly::{CoefficientSource, TrigPolynomial};
use crate::error::{param, Result};

fn check_order(m: usize) -> Result<()> {
    if m < 2 || m % 2 != 0 {
        return param(format!("de la Vallée Poussin order must be even and >= 2, got {m}"));
    }
    Ok(())
}

/// One-dimensional multiplier `nu_m(k)`: 1 on `|k| <= m/2`, linear ramp
/// `2(1 - |k|/(m+1))` on `m/2 < |k| <= m`, zero beyond.
pub fn vdp_multiplier(m: usize, k: i64) -> Result<f64> {
    check_order(m)?;
    Ok(multiplier_unchecked(m, k))
}

fn multiplier_unchecked(m: usize, k: i64) -> f64 {
    let a = k.unsigned_abs() as usize;
    if 2 * a <= m {
        1.0
    } else if a <= m {
        2.0 * (1.0 - a as f64 / (m as f64 + 1.0))
    } else {
        0.0
    }
}

/// Tensor-product weight `prod_j nu_m(xi_j)`.
pub fn vdp_weight(m: usize, xi: &FrequencyIndex) -> Result<f64> {
    check_order(m)?;
    Ok(weight_unchecked(m, xi.components()))
}

fn weight_unchecked(m: usize, xi: &[i64]) -> f64 {
    xi.iter().map(|&k| multiplier_unchecked(m, k)).product()
}

/// `V_m f`, a polynomial of degree `m`.
pub fn vdp_sum<S: CoefficientSource + ?Sized>(f: &S, m: usize) -> Result<TrigPolynomial> {
    check_order(m)?;
    let raw = fetch_block(f, m)?;
    Ok(apply_vdp(&raw, m))
}

/// Fetch all coefficients of `f` on `|xi|_inf <= degree`.
pub fn fetch_block<S: CoefficientSource + ?Sized>(f: &S, degree: usize) -> Result<TrigPolynomial> {
    let dim = f.dim();
    let mut coeffs = Vec::with_capacity((2 * degree + 1).pow(dim as u32));
    for xi in super::freq::block(dim, degree as u64) {
        coeffs.push(f.coefficient(&xi)?);
    }
    TrigPolynomial::from_coeffs(dim, degree, coeffs)
}

/// Apply the `V_m` multiplier to a polynomial, returning degree `m`.
pub(crate) fn apply_vdp(p: &TrigPolynomial, m: usize) -> TrigPolynomial {
    let src = p.with_degree(m);
    let coeffs = src
        .iter()
        .map(|(xi, c)| c * weight_unchecked(m, xi.components()))
        .collect();
    // Real multipliers preserve Hermitian symmetry exactly.
    let mut out = TrigPolynomial::from_coeffs(p.dim(), m, coeffs).expect("block size");
    if p.is_real() && !out.is_real() {
        out.symmetrize();
    }
    out
}

/// Pieces `f_0 = V_2 f` and `f_k = V_{2^{k+1}} f - V_{2^k} f`.
#[derive(Clone, Debug)]
pub struct BandDecomposition {
    pieces: Vec<TrigPolynomial>,
}

impl BandDecomposition {
    pub fn pieces(&self) -> &[TrigPolynomial] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Sum of all pieces, which telescopes to `V_{2^r} f`.
    pub fn sum(&self) -> TrigPolynomial {
        let top = self.pieces.last().map(|p| p.degree()).unwrap_or(0);
        let dim = self.pieces[0].dim();
        self.pieces
            .iter()
            .fold(TrigPolynomial::zeros(dim, top), |acc, p| acc.add(p))
    }
}

/// Inclusive `|xi|_inf` range of band `k`: `[floor(2^{k-1}), 2^{k+1}]` for
/// `k >= 1`, and `[0, 2]` for `k = 0`.
pub fn band_bounds(k: u32) -> (u64, u64) {
    if k == 0 {
        (0, 2)
    } else {
        (1u64 << (k - 1), 1u64 << (k + 1))
    }
}

pub fn band_decompose<S: CoefficientSource + ?Sized>(f: &S, r: u32) -> Result<BandDecomposition> {
    if r < 1 {
        return param("band decomposition needs r >= 1");
    }
    let top = 1usize << r;
    let raw = fetch_block(f, top)?;
    let sums: Vec<TrigPolynomial> = (1..=r).map(|k| apply_vdp(&raw, 1 << k)).collect();
    let mut pieces = Vec::with_capacity(r as usize);
    pieces.push(sums[0].clone());
    for k in 1..r as usize {
        let mut piece = sums[k].sub(&sums[k - 1]);
        let (lo, hi) = band_bounds(k as u32);
        let real = piece.is_real();
        let coeffs: Vec<Complex64> = piece
            .iter()
            .map(|(xi, c)| {
                let n = xi.sup_norm();
                if n < lo || n > hi {
                    Complex64::default()
                } else {
                    c
                }
            })
            .collect();
        piece = TrigPolynomial::from_coeffs(piece.dim(), piece.degree(), coeffs)?;
        debug_assert!(!real || piece.is_real());
        pieces.push(piece);
    }
    Ok(BandDecomposition { pieces })
}

/// Diagnostic upper proxy for the `B^s_inf(L_1)` semi-norm:
/// `max_{k <= k_max} 2^{ks} ||f - V_{2^{k+1}} f||_{L_1}`, with `f`
/// truncated at degree `2^{k_max+1}` and the `L_1` norm taken on a grid
/// oversampled by four. Not normalized; only meaningful for comparisons.
pub fn besov_proxy<S: CoefficientSource + ?Sized>(f: &S, s: f64, k_max: u32) -> Result<f64> {
    if !(s > 0.0) {
        return param("besov proxy needs s > 0");
    }
    let top = 1usize << (k_max + 1);
    let raw = fetch_block(f, top)?;
    let transform = GridTransform::new(raw.dim(), top, 4 * top + 1)?;
    let mut best = 0.0f64;
    let mut residual = vec![Complex64::default(); raw.coeffs().len()];
    for k in 0..=k_max {
        let m = 1usize << (k + 1);
        let mut any = false;
        for (flat, (xi, c)) in raw.iter().enumerate() {
            let r = c * (1.0 - weight_unchecked(m, xi.components()));
            any |= r != Complex64::default();
            residual[flat] = r;
        }
        if !any {
            continue;
        }
        let values = transform.synthesize(&residual);
        let l1 = lp_norm_values(values.iter().map(|v| v.norm()), values.len(), 1.0)?;
        best = best.max(2f64.powf(k as f64 * s) * l1);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_values() {
        assert_eq!(vdp_multiplier(4, 2).unwrap(), 1.0);
        assert!((vdp_multiplier(4, 4).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(vdp_multiplier(4, 5).unwrap(), 0.0);
        assert_eq!(vdp_multiplier(4, -3).unwrap(), vdp_multiplier(4, 3).unwrap());
        assert!(vdp_multiplier(3, 0).is_err());
        assert!(vdp_multiplier(0, 0).is_err());
    }

    #[test]
    fn single_mode_at_three() {
        let mut f = TrigPolynomial::zeros(1, 3);
        f.set(&FrequencyIndex::from([3]), Complex64::new(1.0, 0.0)).unwrap();
        let v = vdp_sum(&f, 4).unwrap();
        assert!((v.coeff(&FrequencyIndex::from([3])).re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_in_zero_out() {
        let f = TrigPolynomial::zeros(2, 5);
        assert_eq!(vdp_sum(&f, 8).unwrap().max_abs(), 0.0);
        let bands = band_decompose(&f, 3).unwrap();
        assert!(bands.pieces().iter().all(|p| p.max_abs() == 0.0));
        assert_eq!(besov_proxy(&f, 1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn band_bounds_table() {
        assert_eq!(band_bounds(0), (0, 2));
        assert_eq!(band_bounds(1), (1, 4));
        assert_eq!(band_bounds(3), (4, 16));
    }

    #[test]
    fn besov_proxy_of_low_degree_polynomial_saturates() {
        let f = TrigPolynomial::from_fn(1, 4, |xi| Complex64::new(1.0 / (1 + xi.sup_norm()) as f64, 0.0));
        // V_{2^{k+1}} f = f once 2^k >= 4, so only k <= 1 contribute; the
        // remaining drift is the grid L1 quadrature converging.
        let a = besov_proxy(&f, 1.0, 2).unwrap();
        let b = besov_proxy(&f, 1.0, 5).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-2 * a, "{a} {b}");
    }
}
