use crate::layout::SemanticClass;
use crate::render::camera::V3;
use crate::{Error, Result};

/// Alpha above which a pixel belongs to a layer's mask.
pub const MASK_THRESHOLD: f64 = 0.5;

/// Everything the integrator produces for one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelSample {
    pub color: V3,
    pub semantic: SemanticClass,
    /// Expected hit distance along the ray, `∞` when nothing visible was hit.
    pub depth: f64,
    /// Summed weight of visible segments.
    pub alpha: f64,
    /// Face normal of the strongest visible segment, zero on a miss.
    pub normal: V3,
    /// Transmittance left after the last segment.
    pub transmittance: f64,
    /// Weight absorbed by occluders that are not part of this layer.
    pub hidden: f64,
}

impl PixelSample {
    pub fn miss(sky: V3) -> Self {
        Self {
            color: sky,
            semantic: SemanticClass::Null,
            depth: f64::INFINITY,
            alpha: 0.0,
            normal: [0.0; 3],
            transmittance: 1.0,
            hidden: 0.0,
        }
    }
}

/// Per-pixel output of one render layer, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderBuffers {
    pub width: usize,
    pub height: usize,
    /// Linear RGB in [0, 1] (texture modulation may overshoot slightly).
    pub color: Vec<V3>,
    pub semantic: Vec<SemanticClass>,
    /// Building id, `VEHICLE_INSTANCE_BASE + vehicle id`, or 0.
    pub instance: Vec<u32>,
    pub depth: Vec<f64>,
    pub alpha: Vec<f64>,
    pub normal: Vec<V3>,
    pub transmittance: Vec<f64>,
    pub hidden: Vec<f64>,
}

impl RenderBuffers {
    /// Buffers where every ray misses.
    pub fn empty(width: usize, height: usize, sky: V3) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            color: vec![sky; n],
            semantic: vec![SemanticClass::Null; n],
            instance: vec![0; n],
            depth: vec![f64::INFINITY; n],
            alpha: vec![0.0; n],
            normal: vec![[0.0; 3]; n],
            transmittance: vec![1.0; n],
            hidden: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn mask(&self, i: usize) -> bool {
        self.alpha[i] > MASK_THRESHOLD
    }

    pub fn mask_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.mask(i)).count()
    }

    pub fn put(&mut self, i: usize, s: &PixelSample) {
        self.color[i] = s.color;
        self.semantic[i] = s.semantic;
        self.depth[i] = s.depth;
        self.alpha[i] = s.alpha;
        self.normal[i] = s.normal;
        self.transmittance[i] = s.transmittance;
        self.hidden[i] = s.hidden;
    }

    pub fn sample(&self, i: usize) -> PixelSample {
        PixelSample {
            color: self.color[i],
            semantic: self.semantic[i],
            depth: self.depth[i],
            alpha: self.alpha[i],
            normal: self.normal[i],
            transmittance: self.transmittance[i],
            hidden: self.hidden[i],
        }
    }

    /// Sets the instance id on every masked pixel.
    pub fn tag_instance(&mut self, id: u32) {
        for i in 0..self.len() {
            self.instance[i] = if self.mask(i) { id } else { 0 };
        }
    }

    /// Largest deviation of `alpha + hidden + transmittance` from one.
    pub fn energy_error(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.alpha[i] + self.hidden[i] + self.transmittance[i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks that a pixel with zero alpha has NULL semantics and infinite
    /// depth, and the other way round.
    pub fn check_coverage(&self) -> Result<()> {
        for i in 0..self.len() {
            let empty = [self.alpha[i] == 0.0, self.semantic[i].is_null(), self.depth[i].is_infinite()];
            if empty[0] != empty[1] || empty[1] != empty[2] {
                return Err(Error::invalid(format!(
                    "pixel {i}: alpha {} semantic {:?} depth {}",
                    self.alpha[i], self.semantic[i], self.depth[i]
                )));
            }
        }
        Ok(())
    }
}
