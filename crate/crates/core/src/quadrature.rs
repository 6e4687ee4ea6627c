//! Adaptive Gauss–Kronrod (7/15) quadrature on intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`, bisecting the
/// interval with the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = kronrod(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..20_000 {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(pieces.iter().map(|p| p.2).sum());
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (a0, b0, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a0 + b0);
        let (v1, e1) = kronrod(&mut f, a0, mid);
        let (v2, e2) = kronrod(&mut f, mid, b0);
        pieces.push((a0, mid, v1, e1));
        pieces.push((mid, b0, v2, e2));
    }
    Err(Error::Numerical(format!("quadrature on [{a}, {b}] did not reach {tol:e}")))
}

/// Integrate over `[a, b]` split at the given interior breakpoints.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let share = tol / (pts.len() - 1) as f64;
    let mut sum = 0.0;
    for w in pts.windows(2) {
        sum += integrate(&mut f, w[0], w[1], share)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, -1.0, 3.0, 1e-13).unwrap();
        assert!((v - (729.0 - 1.0) / 6.0 + 8.0).abs() < 1e-11);
    }

    #[test]
    fn oscillatory() {
        let v = integrate(|x| (7.0 * x).cos(), 0.0, std::f64::consts::PI / 14.0, 1e-14).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breaks() {
        let v = integrate_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0], 1e-14).unwrap();
        assert!((v - 2.5).abs() < 1e-13);
    }
}
