use std::collections::VecDeque;

use crate::layout::{Grid, SemanticMap};

/// Canny parameters. Thresholds are fractions of the peak gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            low: 0.1,
            high: 0.3,
        }
    }
}

/// Edges of the road/highway mask.
pub fn detect_road_edges(semantic: &SemanticMap) -> Grid<bool> {
    canny(&semantic.mask(|c| c.is_road()), CannyParams::default())
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut k: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

fn clamp_get(img: &[f64], w: usize, h: usize, x: i64, y: i64) -> f64 {
    let x = x.clamp(0, w as i64 - 1) as usize;
    let y = y.clamp(0, h as i64 - 1) as usize;
    img[y * w + x]
}

/// Gaussian blur, Sobel gradients, non-maximum suppression, double
/// threshold and hysteresis. Borders replicate the edge pixels.
pub fn canny(mask: &Grid<bool>, params: CannyParams) -> Grid<bool> {
    let (w, h) = mask.dims();
    let src: Vec<f64> = mask.as_slice().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let k = gaussian_kernel(params.sigma);
    let r = (k.len() / 2) as i64;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * clamp_get(&src, w, h, x as i64 + i as i64 - r, y as i64))
                .sum();
        }
    }
    let mut blur = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            blur[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * clamp_get(&tmp, w, h, x as i64, y as i64 + i as i64 - r))
                .sum();
        }
    }

    let mut mag = vec![0.0; w * h];
    let mut dir = vec![0u8; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let p = |dx: i64, dy: i64| clamp_get(&blur, w, h, x + dx, y + dy);
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let idx = y as usize * w + x as usize;
            mag[idx] = gx.hypot(gy);
            // Quantize the gradient direction into 0°, 45°, 90°, 135°.
            let mut a = gy.atan2(gx).to_degrees();
            if a < 0.0 {
                a += 180.0;
            }
            dir[idx] = if !(22.5..157.5).contains(&a) {
                0
            } else if a < 67.5 {
                1
            } else if a < 112.5 {
                2
            } else {
                3
            };
        }
    }

    let peak = mag.iter().copied().fold(0.0, f64::max);
    let mut out = Grid::filled(w, h, false);
    if peak <= 1e-12 {
        return out;
    }
    let (lo, hi) = (params.low * peak, params.high * peak);

    // 0 = none, 1 = weak, 2 = strong
    let mut class = vec![0u8; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let idx = y as usize * w + x as usize;
            let m = mag[idx];
            if m < lo {
                continue;
            }
            let (dx, dy) = match dir[idx] {
                0 => (1, 0),
                1 => (1, 1),
                2 => (0, 1),
                _ => (-1, 1),
            };
            let a = clamp_get(&mag, w, h, x + dx, y + dy);
            let b = clamp_get(&mag, w, h, x - dx, y - dy);
            // Ties keep only the pixel on the positive side, so plateaus stay one pixel wide.
            if m > a && m >= b {
                class[idx] = if m >= hi { 2 } else { 1 };
            }
        }
    }

    let mut queue: VecDeque<usize> = (0..w * h).filter(|&i| class[i] == 2).collect();
    for &i in &queue {
        out.as_mut_slice()[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if class[j] == 1 && !out.as_slice()[j] {
                    out.as_mut_slice()[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    out
}
