//! Uniform spatial and momentum grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(invalid("n_points", format!("need at least 2 points, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(invalid("x_max", format!("grid [{x_min}, {x_max}] is not increasing")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid with spacing at most `max_spacing` covering `[center - half, center + half]`.
    /// The point count is odd so `center` is a grid point.
    pub fn symmetric(center: f64, half: f64, max_spacing: f64) -> Result<Self> {
        if !(half > 0.0 && max_spacing > 0.0) {
            return Err(invalid("max_spacing", "half-width and spacing must be > 0"));
        }
        let intervals = (2.0 * half / max_spacing).ceil() as usize;
        let intervals = intervals + intervals % 2;
        Self::new(center - half, center + half, intervals + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.x_min <= lo && self.x_max >= hi
    }
}

/// Uniform momentum grid `p_k = p_min + k * spacing`, `k = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub n_points: usize,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(invalid("n_points", format!("need at least 2 points, got {n_points}")));
        }
        if !(p_min.is_finite() && p_max.is_finite() && p_max > p_min) {
            return Err(invalid("p_max", format!("grid [{p_min}, {p_max}] is not increasing")));
        }
        Ok(Self { p_min, p_max, n_points })
    }

    /// Grid on `[center - half, center + half]` with exactly `spacing` between points.
    pub fn centered(center: f64, half: f64, spacing: f64) -> Result<Self> {
        let n_half = (half / spacing).ceil() as usize;
        let half = n_half as f64 * spacing;
        Self::new(center - half, center + half, 2 * n_half + 1)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.p_min + self.p_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.p_max - self.p_min)
    }

    pub fn spacing(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_points - 1) as f64
    }

    /// Points are generated symmetrically about the center so that
    /// `p(k) - center == -(p(n - 1 - k) - center)` holds exactly.
    pub fn point(&self, k: usize) -> f64 {
        self.center() + self.offset(k)
    }

    /// `p(k) - center`.
    pub fn offset(&self, k: usize) -> f64 {
        let mid = (self.n_points - 1) as f64 / 2.0;
        (k as f64 - mid) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    pub fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5
        } else {
            1.0
        }
    }
}
