//! Compactly supported initial states.
//!
//! The initial wavefunction is `A f(x - x0) exp(i p0 x / hbar)` on the window
//! `|x - x0| <= pi * delta_x / 2` and exactly zero outside, with `f` either
//! `cos^m((x - x0) / delta_x)` (even `m >= 2`) or `1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::units::PhysicalUnits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Shape {
    /// `cos^m(x / delta_x)`; `m` is even and at least 2.
    CosPow(u32),
    /// Flat profile, `f(x) = 1`.
    Rect,
}

impl Shape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Shape::CosPow(m) if m < 2 || m % 2 != 0 => Err(invalid(
                "shape",
                format!("cosine exponent must be even and >= 2, got {m}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::CosPow(m) => write!(f, "cos{m}"),
            Shape::Rect => f.write_str("rect"),
        }
    }
}

impl FromStr for Shape {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let shape = match lower.as_str() {
            "rect" | "rectangular" => Shape::Rect,
            other => {
                let digits = other
                    .strip_prefix("cos^")
                    .or_else(|| other.strip_prefix("cos"))
                    .ok_or_else(|| invalid("shape", format!("unknown shape `{s}`")))?;
                let m = digits
                    .parse::<u32>()
                    .map_err(|_| invalid("shape", format!("unknown shape `{s}`")))?;
                Shape::CosPow(m)
            }
        };
        shape.validate()?;
        Ok(shape)
    }
}

impl TryFrom<String> for Shape {
    type Error = crate::Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Shape> for String {
    fn from(s: Shape) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub shape: Shape,
    pub delta_x: f64,
    pub p0: f64,
    #[serde(default)]
    pub x0: f64,
}

impl WavepacketSpec {
    pub fn new(shape: Shape, delta_x: f64, p0: f64) -> Result<Self> {
        let spec = Self {
            shape,
            delta_x,
            p0,
            x0: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_center(mut self, x0: f64) -> Result<Self> {
        self.x0 = x0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if !(self.delta_x.is_finite() && self.delta_x > 0.0) {
            return Err(invalid(
                "delta_x",
                format!("must be finite and > 0, got {}", self.delta_x),
            ));
        }
        if !self.p0.is_finite() {
            return Err(invalid("p0", "must be finite"));
        }
        if !self.x0.is_finite() {
            return Err(invalid("x0", "must be finite"));
        }
        Ok(())
    }

    /// Half the support length, `pi * delta_x / 2`.
    pub fn half_width(&self) -> f64 {
        PI * self.delta_x / 2.0
    }

    pub fn support(&self) -> (f64, f64) {
        let a = self.half_width();
        (self.x0 - a, self.x0 + a)
    }

    /// Unnormalized real profile `f(x - x0)` including the step window.
    pub fn profile(&self, x: f64) -> f64 {
        let u = x - self.x0;
        if u.abs() > self.half_width() {
            return 0.0;
        }
        match self.shape {
            Shape::Rect => 1.0,
            Shape::CosPow(m) => (u / self.delta_x).cos().powi(m as i32),
        }
    }

    /// `\int f^2 dx` over the support, in closed form.
    pub fn profile_norm_sq(&self) -> f64 {
        match self.shape {
            Shape::Rect => PI * self.delta_x,
            Shape::CosPow(m) => {
                // \int_{-pi/2}^{pi/2} cos^{2m} = pi (2m-1)!! / (2m)!!
                let mut ratio = 1.0;
                for j in 1..=m {
                    ratio *= (2 * j - 1) as f64 / (2 * j) as f64;
                }
                PI * self.delta_x * ratio
            }
        }
    }

    /// Normalized initial amplitude `psi(0, x)`.
    pub fn amplitude(&self, x: f64, units: &PhysicalUnits) -> Complex64 {
        let f = self.profile(x);
        if f == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let a = f / self.profile_norm_sq().sqrt();
        Complex64::from_polar(a, self.p0 * x / units.hbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_parsing() {
        assert_eq!("cos8".parse::<Shape>().unwrap(), Shape::CosPow(8));
        assert_eq!("COS^2".parse::<Shape>().unwrap(), Shape::CosPow(2));
        assert_eq!("rect".parse::<Shape>().unwrap(), Shape::Rect);
        assert!("cos3".parse::<Shape>().is_err());
        assert!("cos0".parse::<Shape>().is_err());
        assert!("gauss".parse::<Shape>().is_err());
        assert_eq!(Shape::CosPow(8).to_string(), "cos8");
    }

    #[test]
    fn support_window() {
        let s = WavepacketSpec::new(Shape::CosPow(8), 1.0, 0.0).unwrap();
        assert_eq!(s.support(), (-PI / 2.0, PI / 2.0));
        assert_eq!(s.profile(1.6), 0.0);
        assert_eq!(s.profile(0.0), 1.0);
        let r = WavepacketSpec::new(Shape::Rect, 2.0, 0.0).unwrap();
        assert_eq!(r.support(), (-PI, PI));
    }

    #[test]
    fn analytic_norm_matches_quadrature() {
        for shape in [Shape::Rect, Shape::CosPow(2), Shape::CosPow(8)] {
            let s = WavepacketSpec::new(shape, 0.7, 1.5).unwrap();
            let (lo, hi) = s.support();
            let n = 20_000;
            let h = (hi - lo) / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * s.profile(lo + i as f64 * h).powi(2);
            }
            let rel = (acc * h - s.profile_norm_sq()).abs() / s.profile_norm_sq();
            assert!(rel < 1e-7, "{shape}: {rel}");
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(WavepacketSpec::new(Shape::Rect, 0.0, 0.0).is_err());
        assert!(WavepacketSpec::new(Shape::CosPow(5), 1.0, 0.0).is_err());
        assert!(WavepacketSpec::new(Shape::Rect, 1.0, f64::NAN).is_err());
    }
}
