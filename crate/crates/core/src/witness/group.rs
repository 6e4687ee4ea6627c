use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// `Z/N_1 x ... x Z/N_r`. Elements are stored as flat row-major offsets
/// (first factor slowest), which is also the lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    moduli: Vec<usize>,
}

impl GroupSpec {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|&n| n < 2) {
            return param(format!("group moduli must be >= 2, got {moduli:?}"));
        }
        moduli
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Parameter("group too large".into()))?;
        Ok(Self { moduli })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `(Z/N)^d`.
    pub fn power(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn size(&self) -> usize {
        self.moduli.iter().product()
    }

    pub fn tuple(&self, mut flat: usize) -> Vec<usize> {
        let mut t = vec![0; self.rank()];
        for j in (0..self.rank()).rev() {
            t[j] = flat % self.moduli[j];
            flat /= self.moduli[j];
        }
        t
    }

    /// Flat offset of a tuple whose entries are reduced modulo `N_j`.
    pub fn flat(&self, t: &[i64]) -> Result<usize> {
        if t.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: t.len(),
            });
        }
        Ok(t.iter()
            .zip(&self.moduli)
            .fold(0, |acc, (&c, &n)| acc * n + c.rem_euclid(n as i64) as usize))
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, 1)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, -1)
    }

    fn combine(&self, mut a: usize, mut b: usize, sign: i64) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for &n in self.moduli.iter().rev() {
            let c = ((a % n) as i64 + sign * (b % n) as i64).rem_euclid(n as i64) as usize;
            out += c * stride;
            stride *= n;
            a /= n;
            b /= n;
        }
        out
    }

    /// Phase `sum_j a_j g_j / N_j` reduced to `[0, 1)`, computed in exact
    /// integer arithmetic per factor.
    fn phase(&self, a: usize, g: usize) -> f64 {
        let (ta, tg) = (self.tuple(a), self.tuple(g));
        let mut acc = 0.0;
        for j in 0..self.rank() {
            let n = self.moduli[j] as u128;
            acc += ((ta[j] as u128 * tg[j] as u128) % n) as f64 / n as f64;
        }
        acc.fract()
    }

    /// `chi_a(g)` for flat offsets, no range checks.
    pub(crate) fn chi(&self, a: usize, g: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.phase(a, g))
    }
}

/// `chi_a(g) = exp(2 pi i sum_j a_j g_j / N_j)`.
pub fn character_eval(group: &GroupSpec, a: &[usize], g: &[usize]) -> Result<Complex64> {
    for (name, t) in [("character index", a), ("element", g)] {
        if t.len() != group.rank() {
            return Err(Error::Dimension {
                expected: group.rank(),
                found: t.len(),
            });
        }
        if t.iter().zip(group.moduli()).any(|(&c, &n)| c >= n) {
            return param(format!("{name} {t:?} out of range for moduli {:?}", group.moduli()));
        }
    }
    let to_i = |t: &[usize]| t.iter().map(|&c| c as i64).collect::<Vec<_>>();
    Ok(group.chi(group.flat(&to_i(a))?, group.flat(&to_i(g))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_four() {
        let g = GroupSpec::cyclic(4).unwrap();
        let v = character_eval(&g, &[1], &[1]).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        for e in 0..4 {
            assert_eq!(character_eval(&g, &[0], &[e]).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert!(character_eval(&g, &[4], &[0]).is_err());
        assert!(character_eval(&g, &[0, 0], &[0]).is_err());
    }

    #[test]
    fn arithmetic_and_tuples() {
        let g = GroupSpec::new(vec![3, 4]).unwrap();
        assert_eq!(g.size(), 12);
        assert_eq!(g.tuple(7), vec![1, 3]);
        assert_eq!(g.flat(&[-2, 7]).unwrap(), 7);
        assert_eq!(g.tuple(g.add(7, 11)), vec![0, 2]);
        assert_eq!(g.tuple(g.sub(0, 7)), vec![2, 1]);
        assert!(GroupSpec::new(vec![1]).is_err());
        assert!(GroupSpec::new(vec![]).is_err());
    }
}
