//! Scene parameterizations: the generative hash grid over position and a
//! scene feature, periodic sin/cos encodings, and the seeded stand-ins for
//! the scene encoders.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::hashing::{hash_words, signed_unit, Hasher64};
use crate::layout::{LocalWindow, SemanticClass, WindowSize};
use crate::{Error, Result};

/// The published hash primes; the first two scale the scene-feature
/// dimensions, the last three scale x, y and z.
pub const HASH_PRIMES: [u64; 5] = [1, 2654435761, 805459861, 3674653429, 2097192037];
/// Scene-level feature size for the background and vehicles.
pub const GLOBAL_FEATURE_DIM: usize = 2;
/// Channels of the building pixel feature.
pub const BUILDING_FEATURE_CHANNELS: usize = 63;
/// Frequency levels of the sin/cos encoding.
pub const SINCOS_LEVELS: usize = 10;
/// Canonical vehicle coordinates are divided by this before encoding.
pub const VEHICLE_HALF_EXTENT: f64 = (WindowSize::VEHICLE.w / 2) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct HashGridConfig {
    pub levels: usize,
    /// Entries per level; a power of two.
    pub entries: usize,
    pub channels: usize,
    pub primes: [u64; 5],
    /// Lattice resolution of level 0 over the unit cube.
    pub base_resolution: f64,
    /// Resolution growth from one level to the next.
    pub per_level_scale: f64,
}

impl Default for HashGridConfig {
    fn default() -> Self {
        Self {
            levels: 16,
            entries: 1 << 19,
            channels: 8,
            primes: HASH_PRIMES,
            base_resolution: 16.0,
            per_level_scale: 2.0,
        }
    }
}

impl HashGridConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.entries.is_power_of_two() || self.levels == 0 || self.channels == 0 {
            return Err(Error::invalid("hash grid needs a power-of-two table and at least one level and channel"));
        }
        if self.primes != HASH_PRIMES {
            return Err(Error::invalid("hash primes are fixed"));
        }
        Ok(())
    }

    pub fn resolution(&self, level: usize) -> f64 {
        self.base_resolution * self.per_level_scale.powi(level as i32)
    }

    pub fn output_len(&self) -> usize {
        self.levels * self.channels
    }
}

/// XOR hash of quantized scene-feature and position coordinates, reduced
/// modulo the table size. Multiplications wrap at 64 bits.
pub fn hash_index(p: [i64; 3], f: &[i64], cfg: &HashGridConfig) -> usize {
    let mut h = 0u64;
    for (i, &fi) in f.iter().enumerate() {
        h ^= (fi as u64).wrapping_mul(cfg.primes[i % 2]);
    }
    for (j, &pj) in p.iter().enumerate() {
        h ^= (pj as u64).wrapping_mul(cfg.primes[2 + j]);
    }
    (h & (cfg.entries as u64 - 1)) as usize
}

/// Seeded table of hash-grid entries in [−1, 1]. Entries are computed from
/// `(seed, level, index, channel)` on demand; nothing is stored, so the
/// full 16 × 2^19 × 8 table costs no memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureTable {
    pub seed: u64,
}

impl FeatureTable {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    pub fn value(&self, level: usize, index: usize, channel: usize) -> f64 {
        signed_unit(hash_words(self.seed, &[level as u64, index as u64, channel as u64]))
    }

    pub fn row(&self, level: usize, index: usize, channels: usize) -> Vec<f64> {
        (0..channels).map(|c| self.value(level, index, c)).collect()
    }
}

/// Multi-resolution hash-grid feature of a point `p` in the unit cube and a
/// scene feature `f`. At each level both are scaled by the level resolution
/// and floored; the rows of the eight lattice corners around `p` are blended
/// trilinearly while the quantized `f` stays fixed. Levels are concatenated.
pub fn hash_feature(p: [f64; 3], f: &[f64], table: &FeatureTable, cfg: &HashGridConfig) -> Vec<f64> {
    let mut out = vec![0.0; cfg.output_len()];
    hash_feature_into(p, f, table, cfg, 0..cfg.levels, cfg.channels, &mut out);
    out
}

/// Partial hash-grid lookup: only `levels`, and only the first `channels`
/// channels of each, written level-major into `out`.
pub fn hash_feature_into(
    p: [f64; 3],
    f: &[f64],
    table: &FeatureTable,
    cfg: &HashGridConfig,
    levels: std::ops::Range<usize>,
    channels: usize,
    out: &mut [f64],
) {
    let channels = channels.min(cfg.channels);
    let mut fq = [0i64; 8];
    let fq = &mut fq[..f.len().min(8)];
    for (slot_idx, level) in levels.enumerate() {
        let res = cfg.resolution(level);
        for (q, &v) in fq.iter_mut().zip(f) {
            *q = (v * res).floor() as i64;
        }
        let pos = p.map(|c| c * res);
        let base = pos.map(|c| c.floor());
        let frac = [pos[0] - base[0], pos[1] - base[1], pos[2] - base[2]];
        let cell = base.map(|c| c as i64);
        let slot = &mut out[slot_idx * channels..(slot_idx + 1) * channels];
        slot.iter_mut().for_each(|s| *s = 0.0);
        for corner in 0..8 {
            let bit = |k: usize| (corner >> k) & 1;
            let mut w = 1.0;
            for k in 0..3 {
                w *= if bit(k) == 1 { frac[k] } else { 1.0 - frac[k] };
            }
            if w == 0.0 {
                continue;
            }
            let c = [cell[0] + bit(0) as i64, cell[1] + bit(1) as i64, cell[2] + bit(2) as i64];
            let idx = hash_index(c, fq, cfg);
            for (ch, s) in slot.iter_mut().enumerate() {
                *s += w * table.value(level, idx, ch);
            }
        }
    }
}

static CLAMPED: AtomicU64 = AtomicU64::new(0);

/// How many inputs to [`sincos_encode`] fell outside [−1, 1] and were
/// clamped since the process started.
pub fn clamp_count() -> u64 {
    CLAMPED.load(Ordering::Relaxed)
}

/// Appends the encoding of one element: `sin(2^i π x), cos(2^i π x)` for
/// `i` in `0..levels`.
fn encode_element(x: f64, levels: usize, out: &mut Vec<f64>) {
    let x = if (-1.0..=1.0).contains(&x) {
        x
    } else {
        CLAMPED.fetch_add(1, Ordering::Relaxed);
        if x.is_nan() {
            0.0
        } else {
            x.clamp(-1.0, 1.0)
        }
    };
    let mut freq = PI;
    for _ in 0..levels {
        let (s, c) = (freq * x).sin_cos();
        out.push(s);
        out.push(c);
        freq *= 2.0;
    }
}

/// NeRF-style periodic encoding, element-major: for each element, the
/// sin/cos pair of every level in turn. Output length is `2·levels·x.len()`.
pub fn sincos_encode(x: &[f64], levels: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * levels * x.len());
    for &v in x {
        encode_element(v, levels, &mut out);
    }
    out
}

/// Compact scene feature of a window: a seeded hash of its per-class voxel
/// counts and its height sums, spread into `d` values in [−1, 1].
pub fn scene_feature_global(window: &LocalWindow, d: usize, seed: u64) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::invalid("feature dimension must be at least 1"));
    }
    let mut h = Hasher64::new(seed);
    for count in window.voxel_histogram() {
        h.write(count);
    }
    let (w, ht) = window.semantic.cells.dims();
    let (mut bu_sum, mut td_sum) = (0u64, 0u64);
    for y in 0..ht {
        for x in 0..w {
            let (class, bu, td) = window.column(x, y);
            if !class.is_null() {
                bu_sum += bu as u64;
                td_sum += td as u64;
            }
        }
    }
    h.write(bu_sum);
    h.write(td_sum);
    let key = h.finish();
    Ok((0..d).map(|k| signed_unit(hash_words(key, &[k as u64]))).collect())
}

/// Seeded 63-channel pixel feature at a parent-layout column, derived from
/// the column's location, class and heights.
pub fn building_pixel_feature(px: i64, py: i64, column: (SemanticClass, u16, u16), seed: u64) -> [f64; BUILDING_FEATURE_CHANNELS] {
    let key = hash_words(
        seed,
        &[px as u64, py as u64, column.0.id() as u64, column.1 as u64, column.2 as u64],
    );
    std::array::from_fn(|c| signed_unit(hash_words(key, &[c as u64])))
}

/// Encoded pixel-feature part of a building point: the sin/cos encoding of
/// the 63 channels at window column `(x, y)`. Shared by every point of the
/// column.
pub fn building_column_encoding(window: &LocalWindow, x: usize, y: usize, seed: u64) -> Vec<f64> {
    let (px, py) = (window.origin.0 + x as i64, window.origin.1 + y as i64);
    sincos_encode(&building_pixel_feature(px, py, window.column(x, y), seed), SINCOS_LEVELS)
}

/// Height normalized to [−1, 1] over the window depth.
pub fn normalized_height(z: f64, depth: usize) -> f64 {
    2.0 * z / depth as f64 - 1.0
}

/// Building point feature: the sin/cos encoding of the column's pixel
/// feature concatenated with the normalized height. `p` is in window
/// coordinates.
pub fn building_point_feature(p: [f64; 3], window: &LocalWindow, seed: u64) -> Result<Vec<f64>> {
    let [w, h, d] = [window.size.w as f64, window.size.h as f64, window.size.d as f64];
    if !(p[0] >= 0.0 && p[0] < w && p[1] >= 0.0 && p[1] < h && p[2] >= 0.0 && p[2] <= d) {
        return Err(Error::Range(format!("point {p:?} outside the {w}x{h}x{d} window")));
    }
    let mut out = building_column_encoding(window, p[0] as usize, p[1] as usize, seed);
    encode_element(normalized_height(p[2], window.size.d), SINCOS_LEVELS, &mut out);
    Ok(out)
}

/// Vehicle point feature: the sin/cos encoding of the scene feature
/// concatenated with the canonical coordinates. `p_canonical` is measured in
/// vehicle-window voxels from the window center, so dividing by the half
/// extent maps the window onto [−1, 1].
pub fn vehicle_point_feature(p_canonical: [f64; 3], f_global: &[f64]) -> Vec<f64> {
    let mut x = f_global.to_vec();
    x.extend(p_canonical.iter().map(|c| c / VEHICLE_HALF_EXTENT));
    sincos_encode(&x, SINCOS_LEVELS)
}
