use crate::layout::{CityLayout, SemanticClass};

/// Axis-aligned integer cell bounds, `min` inclusive and `max` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBounds {
    pub min: [i64; 3],
    pub max: [i64; 3],
}

impl CellBounds {
    pub fn from_dims(dims: [usize; 3]) -> Self {
        Self {
            min: [0; 3],
            max: [dims[0] as i64, dims[1] as i64, dims[2] as i64],
        }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|a| self.max[a] <= self.min[a])
    }

    pub fn intersect(&self, other: &CellBounds) -> CellBounds {
        let mut out = *self;
        for a in 0..3 {
            out.min[a] = out.min[a].max(other.min[a]);
            out.max[a] = out.max[a].min(other.max[a]);
        }
        out
    }

    pub fn contains(&self, c: [i64; 3]) -> bool {
        (0..3).all(|a| c[a] >= self.min[a] && c[a] < self.max[a])
    }
}

/// A discrete label volume addressed by integer cells.
///
/// Cells outside `dims` are NULL. `content_bounds` may be tighter than
/// `dims`; it must contain every non-NULL cell.
pub trait Volume: Sync {
    fn dims(&self) -> [usize; 3];

    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass;

    fn content_bounds(&self) -> Option<CellBounds> {
        Some(CellBounds::from_dims(self.dims()))
    }
}

/// Label of voxel `(i, j, k)` in the implicit layout volume.
///
/// A column is occupied from its bottom-up to its top-down height, both
/// ends inclusive. Anything outside the raster is empty.
#[inline]
pub fn volume_lookup(layout: &CityLayout, i: i64, j: i64, k: i64) -> SemanticClass {
    if k < 0 || !layout.semantic.cells.contains(i, j) {
        return SemanticClass::Null;
    }
    let (class, bu, td) = layout.column(i as usize, j as usize);
    if class.is_null() || k < bu as i64 || k > td as i64 {
        SemanticClass::Null
    } else {
        class
    }
}

impl Volume for CityLayout {
    fn dims(&self) -> [usize; 3] {
        let depth = self.max_top().map_or(0, |t| t as usize + 1);
        [self.width(), self.height(), depth]
    }

    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass {
        volume_lookup(self, x, y, z)
    }
}

/// Dense materialized label volume, indexed `[z][y][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVolume {
    dims: [usize; 3],
    labels: Vec<SemanticClass>,
}

impl DenseVolume {
    pub fn new(dims: [usize; 3]) -> Self {
        Self {
            dims,
            labels: vec![SemanticClass::Null; dims[0] * dims[1] * dims[2]],
        }
    }

    /// Samples every cell of `src` inside `dims`.
    pub fn materialize(src: &dyn Volume, dims: [usize; 3]) -> Self {
        let mut v = Self::new(dims);
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    let c = src.label(x as i64, y as i64, z as i64);
                    v.set(x, y, z, c);
                }
            }
        }
        v
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, c: SemanticClass) {
        let idx = (z * self.dims[1] + y) * self.dims[0] + x;
        self.labels[idx] = c;
    }

    pub fn labels(&self) -> &[SemanticClass] {
        &self.labels
    }
}

impl Volume for DenseVolume {
    fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass {
        if !CellBounds::from_dims(self.dims).contains([x, y, z]) {
            return SemanticClass::Null;
        }
        let (x, y, z) = (x as usize, y as usize, z as usize);
        self.labels[(z * self.dims[1] + y) * self.dims[0] + x]
    }
}
