use crate::layout::SemanticClass;
use crate::{Error, Result};

/// Dense row-major 2D grid. `x` is the column, `y` the row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "grid data has {} cells, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn get_mut(&mut self, x: usize, y: usize) -> &mut T {
        &mut self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn checked(&self, x: i64, y: i64) -> Option<&T> {
        self.contains(x, y).then(|| self.get(x as usize, y as usize))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Per-pixel semantic classes plus the horizontal ground resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap {
    pub cells: Grid<SemanticClass>,
    /// Meters per pixel.
    pub pixel_scale: f64,
}

impl SemanticMap {
    pub fn new(width: usize, height: usize, pixel_scale: f64) -> Self {
        Self {
            cells: Grid::filled(width, height, SemanticClass::Null),
            pixel_scale,
        }
    }

    pub fn width(&self) -> usize {
        self.cells.width()
    }

    pub fn height(&self) -> usize {
        self.cells.height()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> SemanticClass {
        *self.cells.get(x, y)
    }

    /// Pixels matching `pred`, as a binary mask.
    pub fn mask(&self, pred: impl Fn(SemanticClass) -> bool) -> Grid<bool> {
        self.cells.map(|&c| pred(c))
    }
}

/// Bottom-up and top-down heights in vertical cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightFieldPair {
    pub bottom_up: Grid<u16>,
    pub top_down: Grid<u16>,
}

impl HeightFieldPair {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            bottom_up: Grid::filled(width, height, 0),
            top_down: Grid::filled(width, height, 0),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.top_down.dims()
    }
}

/// Semantic map and dual height fields defining an implicit label volume.
#[derive(Debug, Clone, PartialEq)]
pub struct CityLayout {
    pub semantic: SemanticMap,
    pub heights: HeightFieldPair,
}

impl CityLayout {
    pub fn empty(width: usize, height: usize, pixel_scale: f64) -> Self {
        Self {
            semantic: SemanticMap::new(width, height, pixel_scale),
            heights: HeightFieldPair::zeros(width, height),
        }
    }

    /// Validates dimensions and the NULL/height invariants.
    pub fn new(semantic: SemanticMap, heights: HeightFieldPair) -> Result<Self> {
        let layout = Self { semantic, heights };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = self.semantic.cells.dims();
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::invalid("layout must be at least 1x1"));
        }
        for hf in [&self.heights.bottom_up, &self.heights.top_down] {
            if hf.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: hf.dims(),
                });
            }
        }
        for (idx, &c) in self.semantic.cells.as_slice().iter().enumerate() {
            let bu = self.heights.bottom_up.as_slice()[idx];
            let td = self.heights.top_down.as_slice()[idx];
            if c.is_null() && (bu != 0 || td != 0) {
                return Err(Error::invalid(format!(
                    "NULL cell {} carries heights ({bu}, {td})",
                    idx
                )));
            }
            if !c.is_null() && bu > td {
                return Err(Error::invalid(format!(
                    "cell {} has bottom-up {bu} above top-down {td}",
                    idx
                )));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.semantic.width()
    }

    pub fn height(&self) -> usize {
        self.semantic.height()
    }

    pub fn pixel_scale(&self) -> f64 {
        self.semantic.pixel_scale
    }

    /// Writes one column. NULL always carries zero heights.
    pub fn set_column(&mut self, x: usize, y: usize, class: SemanticClass, bu: u16, td: u16) {
        let (bu, td) = if class.is_null() { (0, 0) } else { (bu.min(td), td) };
        self.semantic.cells.set(x, y, class);
        self.heights.bottom_up.set(x, y, bu);
        self.heights.top_down.set(x, y, td);
    }

    #[inline]
    pub fn column(&self, x: usize, y: usize) -> (SemanticClass, u16, u16) {
        let idx = self.semantic.cells.index(x, y);
        (
            self.semantic.cells.as_slice()[idx],
            self.heights.bottom_up.as_slice()[idx],
            self.heights.top_down.as_slice()[idx],
        )
    }

    /// Highest occupied voxel layer, if any cell is non-NULL.
    pub fn max_top(&self) -> Option<u16> {
        self.semantic
            .cells
            .as_slice()
            .iter()
            .zip(self.heights.top_down.as_slice())
            .filter(|(c, _)| !c.is_null())
            .map(|(_, &td)| td)
            .max()
    }
}
