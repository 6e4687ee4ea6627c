//! Piecewise-constant ground truths with exact Fourier coefficients.
//!
//! The default phantom is the rectangle `[1,5] x [2,4]` with weight `-0.75`
//! plus the solid diamond `|x-3| + |y-4| <= 1` with weight `-1`. Coefficients
//! use the normalized convention `f^(xi) = (2 pi)^{-2} int f(x) e^{-i xi.x} dx`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::fourier::{CoefficientSource, FrequencyIndex, GridField};

const TWO_PI: f64 = 2.0 * PI;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectRegion {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Solid diamond `|x - cx| + |y - cy| <= r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondRegion {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// Diamond annulus `r_in <= |x - cx| + |y - cy| <= r_out`, expanded into the
/// difference of two solid diamonds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondAnnulus {
    pub cx: f64,
    pub cy: f64,
    pub r_in: f64,
    pub r_out: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Shape {
    Rect(RectRegion),
    Diamond(DiamondRegion),
    DiamondAnnulus(DiamondAnnulus),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(flatten)]
    pub shape: Shape,
    pub weight: f64,
}

/// `int_a^b e^{-ikx} dx / (2 pi)`.
fn interval_factor(a: f64, b: f64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new((b - a) / TWO_PI, 0.0);
    }
    let k = k as f64;
    let num = Complex64::from_polar(1.0, -k * a) - Complex64::from_polar(1.0, -k * b);
    num / Complex64::new(0.0, TWO_PI * k)
}

/// `int_{-r}^{r} e^{-i p w / 2} dp`.
fn diamond_factor(r: f64, w: i64) -> f64 {
    if w == 0 {
        2.0 * r
    } else {
        let h = w as f64 / 2.0;
        2.0 * (r * h).sin() / h
    }
}

fn two_d(xi: &FrequencyIndex) -> Result<(i64, i64)> {
    match xi.components() {
        &[a, b] => Ok((a, b)),
        c => Err(Error::Dimension {
            expected: 2,
            found: c.len(),
        }),
    }
}

impl RectRegion {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let r = Self { x0, x1, y0, y1 };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let inside = |a: f64, b: f64| (0.0..TWO_PI).contains(&a) && a < b && b <= TWO_PI;
        if !inside(self.x0, self.x1) || !inside(self.y0, self.y1) {
            return param(format!("rectangle {self:?} must be a nonempty box inside [0, 2pi)^2"));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Unweighted coefficient of the indicator.
    pub fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        let (k1, k2) = two_d(xi)?;
        Ok(interval_factor(self.x0, self.x1, k1) * interval_factor(self.y0, self.y1, k2))
    }
}

impl DiamondRegion {
    pub fn new(cx: f64, cy: f64, r: f64) -> Result<Self> {
        let d = Self { cx, cy, r };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let fits = |c: f64| c - self.r >= 0.0 && c + self.r < TWO_PI;
        if !(self.r > 0.0) || !fits(self.cx) || !fits(self.cy) {
            return param(format!("diamond {self:?} must have r > 0 and lie inside [0, 2pi)^2"));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.cx).abs() + (y - self.cy).abs() <= self.r
    }

    pub fn area(&self) -> f64 {
        2.0 * self.r * self.r
    }

    /// Unweighted coefficient of the indicator, via the rotated coordinates
    /// `p = x + y`, `q = x - y` in which the diamond is a square.
    pub fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        let (k1, k2) = two_d(xi)?;
        let shift = Complex64::from_polar(1.0, -(k1 as f64 * self.cx + k2 as f64 * self.cy));
        let mag = 0.5 * diamond_factor(self.r, k1 + k2) * diamond_factor(self.r, k1 - k2) / (TWO_PI * TWO_PI);
        Ok(shift * mag)
    }
}

/// A single weighted primitive after annulus expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Primitive {
    Rect(RectRegion),
    Diamond(DiamondRegion),
}

impl Primitive {
    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Primitive::Rect(r) => r.contains(x, y),
            Primitive::Diamond(d) => d.contains(x, y),
        }
    }

    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        match self {
            Primitive::Rect(r) => r.coefficient(xi),
            Primitive::Diamond(d) => d.coefficient(xi),
        }
    }
}

/// A weighted sum of region indicators, extended 2 pi-periodically.
#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    regions: Vec<Region>,
    parts: Vec<(Primitive, f64)>,
}

impl Phantom {
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.is_empty() {
            return param("a phantom needs at least one region");
        }
        let mut parts = Vec::new();
        for reg in &regions {
            match reg.shape {
                Shape::Rect(r) => {
                    r.validate()?;
                    parts.push((Primitive::Rect(r), reg.weight));
                }
                Shape::Diamond(d) => {
                    d.validate()?;
                    parts.push((Primitive::Diamond(d), reg.weight));
                }
                Shape::DiamondAnnulus(a) => {
                    if !(0.0 < a.r_in && a.r_in < a.r_out) {
                        return param(format!("annulus {a:?} needs 0 < r_in < r_out"));
                    }
                    let outer = DiamondRegion::new(a.cx, a.cy, a.r_out)?;
                    let inner = DiamondRegion::new(a.cx, a.cy, a.r_in)?;
                    parts.push((Primitive::Diamond(outer), reg.weight));
                    parts.push((Primitive::Diamond(inner), -reg.weight));
                }
            }
        }
        Ok(Self { regions, parts })
    }

    /// The default ground truth.
    pub fn standard() -> Self {
        Self::new(vec![
            Region {
                shape: Shape::Rect(RectRegion {
                    x0: 1.0,
                    x1: 5.0,
                    y0: 2.0,
                    y1: 4.0,
                }),
                weight: -0.75,
            },
            Region {
                shape: Shape::Diamond(DiamondRegion {
                    cx: 3.0,
                    cy: 4.0,
                    r: 1.0,
                }),
                weight: -1.0,
            },
        ])
        .expect("default phantom is valid")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Sum of the region coefficients at `xi`.
    pub fn coeff(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for (p, w) in &self.parts {
            acc += p.coefficient(xi)? * *w;
        }
        Ok(acc)
    }

    /// Exact pointwise value; region boundaries count as inside.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.parts
            .iter()
            .filter(|(p, _)| p.contains(x, y))
            .map(|(_, w)| w)
            .sum()
    }

    /// Render on the `G x G` grid by direct indicator tests.
    pub fn render(&self, points: usize) -> Result<GridField> {
        GridField::from_fn(2, points, |x| self.value_at(x[0], x[1]))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.regions)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl CoefficientSource for Phantom {
    fn dim(&self) -> usize {
        2
    }
    fn coefficient(&self, xi: &FrequencyIndex) -> Result<Complex64> {
        self.coeff(xi)
    }
}

/// Free-function forms of the coefficient closed forms.
pub fn rect_coeff(rect: &RectRegion, weight: f64, xi: &FrequencyIndex) -> Result<Complex64> {
    Ok(rect.coefficient(xi)? * weight)
}

pub fn diamond_coeff(dia: &DiamondRegion, weight: f64, xi: &FrequencyIndex) -> Result<Complex64> {
    Ok(dia.coefficient(xi)? * weight)
}

pub fn phantom_coeff(ph: &Phantom, xi: &FrequencyIndex) -> Result<Complex64> {
    ph.coeff(xi)
}

pub fn phantom_render(ph: &Phantom, points: usize) -> Result<GridField> {
    ph.render(points)
}
