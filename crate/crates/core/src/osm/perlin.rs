use serde::{Deserialize, Serialize};

use crate::hashing::{hash_words, unit_f64};

/// Seeded 2D gradient noise remapped into a value range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerlinField {
    pub seed: u64,
    /// Pixels per lattice cell.
    pub cell_size: f64,
    /// Output range `[lo, hi]`.
    pub out_range: (f64, f64),
}

impl PerlinField {
    /// Greenery heights in meters, 64 px lattice.
    pub fn greenery(seed: u64) -> Self {
        Self {
            seed,
            cell_size: 64.0,
            out_range: (8.0, 16.0),
        }
    }

    #[inline]
    fn gradient(&self, ix: i64, iy: i64) -> (f64, f64) {
        let angle = unit_f64(hash_words(self.seed, &[ix as u64, iy as u64])) * std::f64::consts::TAU;
        (angle.cos(), angle.sin())
    }

    /// Raw noise. Unit gradients bound the magnitude by √2/2, so the
    /// result stays strictly inside (-1, 1) and is exactly 0 on lattice points.
    pub fn raw(&self, x: f64, y: f64) -> f64 {
        let u = x / self.cell_size;
        let v = y / self.cell_size;
        let (x0, y0) = (u.floor(), v.floor());
        let (fx, fy) = (u - x0, v - y0);
        let (ix, iy) = (x0 as i64, y0 as i64);
        let dot = |cx: i64, cy: i64, dx: f64, dy: f64| {
            let (gx, gy) = self.gradient(cx, cy);
            gx * dx + gy * dy
        };
        let n00 = dot(ix, iy, fx, fy);
        let n10 = dot(ix + 1, iy, fx - 1.0, fy);
        let n01 = dot(ix, iy + 1, fx, fy - 1.0);
        let n11 = dot(ix + 1, iy + 1, fx - 1.0, fy - 1.0);
        let (sx, sy) = (fade(fx), fade(fy));
        let nx0 = n00 + sx * (n10 - n00);
        let nx1 = n01 + sx * (n11 - n01);
        nx0 + sy * (nx1 - nx0)
    }

    /// Noise mapped affinely from [-1, 1] onto `out_range`.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = self.out_range;
        lo + (self.raw(x, y) + 1.0) * 0.5 * (hi - lo)
    }
}

/// Quintic fade `6t^5 - 15t^4 + 10t^3`.
#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

/// Free-function form of [`PerlinField::sample`].
pub fn perlin_sample(field: &PerlinField, x: f64, y: f64) -> f64 {
    field.sample(x, y)
}
