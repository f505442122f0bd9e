use serde::{Deserialize, Serialize};

use crate::layout::volume::{CellBounds, Volume};
use crate::layout::{CityLayout, HeightFieldPair, InstanceMap, SemanticClass, SemanticMap};

/// Window extent in cells: rows (`h`), columns (`w`) and vertical layers (`d`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSize {
    pub h: usize,
    pub w: usize,
    pub d: usize,
}

impl WindowSize {
    pub const fn new(h: usize, w: usize, d: usize) -> Self {
        Self { h, w, d }
    }

    /// Background window used for aerial-imagery scale scenes.
    pub const GOOGLE_EARTH_BACKGROUND: WindowSize = WindowSize::new(1536, 1536, 640);
    /// Background window used for synthetic street-level scenes.
    pub const CITYTOPIA_BACKGROUND: WindowSize = WindowSize::new(3072, 3072, 2560);
    pub const GOOGLE_EARTH_BUILDING: WindowSize = WindowSize::new(672, 672, 640);
    pub const CITYTOPIA_BUILDING: WindowSize = WindowSize::new(768, 768, 2560);
    pub const VEHICLE: WindowSize = WindowSize::new(32, 32, 32);
}

/// A crop of a layout, padded with empty cells where it leaves the parent.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalWindow {
    /// Parent-layout coordinates `(x, y)` of the window's cell `(0, 0)`.
    pub origin: (i64, i64),
    pub size: WindowSize,
    pub semantic: SemanticMap,
    pub heights: HeightFieldPair,
    instance: Option<u32>,
    roof_split: bool,
    bounds: Option<CellBounds>,
}

impl LocalWindow {
    /// Builds a window directly from cropped rasters. Top-down heights are
    /// clamped to the vertical extent; columns starting above it are dropped.
    pub fn from_parts(
        origin: (i64, i64),
        depth: usize,
        mut semantic: SemanticMap,
        mut heights: HeightFieldPair,
    ) -> Self {
        assert!(depth >= 1, "window depth must be positive");
        let (w, h) = semantic.cells.dims();
        assert!(w >= 1 && h >= 1, "window must be at least 1x1");
        let cap = (depth - 1).min(u16::MAX as usize) as u16;
        for idx in 0..w * h {
            let class = semantic.cells.as_slice()[idx];
            let bu = heights.bottom_up.as_slice()[idx];
            let td = heights.top_down.as_slice()[idx];
            if class.is_null() || bu > cap {
                semantic.cells.as_mut_slice()[idx] = SemanticClass::Null;
                heights.bottom_up.as_mut_slice()[idx] = 0;
                heights.top_down.as_mut_slice()[idx] = 0;
            } else {
                heights.top_down.as_mut_slice()[idx] = td.min(cap);
            }
        }
        let mut win = Self {
            origin,
            size: WindowSize::new(h, w, depth),
            semantic,
            heights,
            instance: None,
            roof_split: false,
            bounds: None,
        };
        win.bounds = win.compute_bounds();
        win
    }

    fn compute_bounds(&self) -> Option<CellBounds> {
        let mut min = [i64::MAX; 3];
        let mut max = [i64::MIN; 3];
        let (w, h) = self.semantic.cells.dims();
        for y in 0..h {
            for x in 0..w {
                let class = self.semantic.get(x, y);
                if class.is_null() {
                    continue;
                }
                let bu = *self.heights.bottom_up.get(x, y) as i64;
                let td = *self.heights.top_down.get(x, y) as i64;
                let lo = [x as i64, y as i64, bu];
                let hi = [x as i64 + 1, y as i64 + 1, td + 1];
                for a in 0..3 {
                    min[a] = min[a].min(lo[a]);
                    max[a] = max[a].max(hi[a]);
                }
            }
        }
        (min[0] != i64::MAX).then_some(CellBounds { min, max })
    }

    /// Instance this window was isolated to, if any.
    pub fn instance(&self) -> Option<u32> {
        self.instance
    }

    pub fn roof_split(&self) -> bool {
        self.roof_split
    }

    /// Column data in window coordinates: class, bottom-up, top-down.
    #[inline]
    pub fn column(&self, x: usize, y: usize) -> (SemanticClass, u16, u16) {
        let idx = self.semantic.cells.index(x, y);
        (
            self.semantic.cells.as_slice()[idx],
            self.heights.bottom_up.as_slice()[idx],
            self.heights.top_down.as_slice()[idx],
        )
    }

    /// True when every cell is NULL.
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    /// Converts the window back into a layout in window coordinates.
    pub fn to_layout(&self) -> CityLayout {
        CityLayout {
            semantic: self.semantic.clone(),
            heights: self.heights.clone(),
        }
    }

    /// Counts occupied voxels per class under the window's lookup rule.
    pub fn voxel_histogram(&self) -> [u64; SemanticClass::COUNT] {
        let mut hist = [0u64; SemanticClass::COUNT];
        let (w, h) = self.semantic.cells.dims();
        for y in 0..h {
            for x in 0..w {
                let (class, bu, td) = self.column(x, y);
                if class.is_null() {
                    continue;
                }
                let n = (td - bu) as u64 + 1;
                if self.roof_split && class.is_building() {
                    hist[SemanticClass::BuildingRoof.id() as usize] += 1;
                    hist[SemanticClass::BuildingFacade.id() as usize] += n - 1;
                } else {
                    hist[class.id() as usize] += n;
                }
            }
        }
        hist
    }
}

impl Volume for LocalWindow {
    fn dims(&self) -> [usize; 3] {
        [self.size.w, self.size.h, self.size.d]
    }

    #[inline]
    fn label(&self, x: i64, y: i64, z: i64) -> SemanticClass {
        if z < 0 || !self.semantic.cells.contains(x, y) {
            return SemanticClass::Null;
        }
        let (class, bu, td) = self.column(x as usize, y as usize);
        if class.is_null() || z < bu as i64 || z > td as i64 {
            return SemanticClass::Null;
        }
        if self.roof_split && class.is_building() {
            if z == td as i64 {
                SemanticClass::BuildingRoof
            } else {
                SemanticClass::BuildingFacade
            }
        } else {
            class
        }
    }

    fn content_bounds(&self) -> Option<CellBounds> {
        self.bounds
    }
}

/// Crops a `size` window centered on `center = (x, y)`.
///
/// The center lands on window index `(w / 2, h / 2)`. Parts outside the
/// layout are NULL and heights are capped at `size.d - 1`.
pub fn extract_local_window(layout: &CityLayout, center: (i64, i64), size: WindowSize) -> LocalWindow {
    assert!(size.h >= 1 && size.w >= 1 && size.d >= 1, "window size must be positive");
    let origin = (center.0 - (size.w / 2) as i64, center.1 - (size.h / 2) as i64);
    let mut semantic = SemanticMap::new(size.w, size.h, layout.pixel_scale());
    let mut heights = HeightFieldPair::zeros(size.w, size.h);
    let (lw, lh) = (layout.width() as i64, layout.height() as i64);
    // Copy only the overlapping rectangle.
    let x0 = origin.0.max(0);
    let x1 = (origin.0 + size.w as i64).min(lw);
    let y0 = origin.1.max(0);
    let y1 = (origin.1 + size.h as i64).min(lh);
    for py in y0..y1 {
        for px in x0..x1 {
            let (class, bu, td) = layout.column(px as usize, py as usize);
            let (wx, wy) = ((px - origin.0) as usize, (py - origin.1) as usize);
            semantic.cells.set(wx, wy, class);
            heights.bottom_up.set(wx, wy, bu);
            heights.top_down.set(wx, wy, td);
        }
    }
    LocalWindow::from_parts(origin, size.d, semantic, heights)
}

/// Keeps only the building cells of instance `id`; everything else is NULL.
///
/// `instances` is indexed in parent-layout coordinates. An unknown id
/// yields an all-NULL window.
pub fn isolate_instance(window: &LocalWindow, instances: &InstanceMap, id: u32) -> LocalWindow {
    let (w, h) = window.semantic.cells.dims();
    let mut semantic = SemanticMap::new(w, h, window.semantic.pixel_scale);
    let mut heights = HeightFieldPair::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (class, bu, td) = window.column(x, y);
            if !class.is_building() {
                continue;
            }
            let (px, py) = (window.origin.0 + x as i64, window.origin.1 + y as i64);
            if instances.id_at(px, py) != Some(id) {
                continue;
            }
            semantic.cells.set(x, y, class);
            heights.bottom_up.set(x, y, bu);
            heights.top_down.set(x, y, td);
        }
    }
    let mut out = LocalWindow::from_parts(window.origin, window.size.d, semantic, heights);
    out.instance = Some(id);
    out
}

/// Switches the window to the facade/roof lookup rule: the top-most layer
/// of each building column is roof, the layers below it are facade.
pub fn relabel_facade_roof(window: &LocalWindow, id: u32) -> LocalWindow {
    let mut out = window.clone();
    out.roof_split = true;
    out.instance = Some(id);
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{instantiate_buildings, volume_lookup};

    fn small_layout() -> CityLayout {
        let mut l = CityLayout::empty(2, 2, 1.0);
        l.set_column(0, 0, SemanticClass::Road, 0, 3);
        l.set_column(1, 0, SemanticClass::BuildingFacade, 0, 6);
        l.set_column(0, 1, SemanticClass::Water, 0, 0);
        l
    }

    #[test]
    fn identity_window() {
        let l = small_layout();
        let win = extract_local_window(&l, (1, 1), WindowSize::new(2, 2, 16));
        assert_eq!(win.origin, (0, 0));
        assert_eq!(win.semantic, l.semantic);
        assert_eq!(win.heights, l.heights);
    }

    #[test]
    fn padded_window() {
        let l = small_layout();
        let win = extract_local_window(&l, (0, 0), WindowSize::new(4, 4, 8));
        assert_eq!(win.origin, (-2, -2));
        assert_eq!(win.semantic.cells.dims(), (4, 4));
        assert_eq!(win.semantic.get(2, 2), SemanticClass::Road);
        assert_eq!(win.semantic.get(3, 2), SemanticClass::BuildingFacade);
        let non_null = win.semantic.cells.as_slice().iter().filter(|c| !c.is_null()).count();
        assert_eq!(non_null, 3);
        assert!(win.semantic.get(0, 0).is_null());
    }

    #[test]
    fn depth_cap() {
        let l = small_layout();
        let win = extract_local_window(&l, (1, 1), WindowSize::new(2, 2, 4));
        assert_eq!(*win.heights.top_down.get(1, 0), 3);
        assert_eq!(win.label(1, 0, 3), SemanticClass::BuildingFacade);
        assert!(win.label(1, 0, 4).is_null());
    }

    #[test]
    fn large_profile_accepted() {
        let l = small_layout();
        let win = extract_local_window(&l, (1, 1), WindowSize::GOOGLE_EARTH_BACKGROUND);
        assert_eq!(win.dims(), [1536, 1536, 640]);
        assert_eq!(win.origin, (1 - 768, 1 - 768));
        assert_eq!(win.label(768, 767, 5), SemanticClass::BuildingFacade);
    }

    #[test]
    fn window_agrees_with_parent() {
        let l = small_layout();
        let win = extract_local_window(&l, (1, 0), WindowSize::new(3, 3, 10));
        for y in 0..3i64 {
            for x in 0..3i64 {
                for z in 0..10i64 {
                    let parent = volume_lookup(&l, x + win.origin.0, y + win.origin.1, z);
                    assert_eq!(win.label(x, y, z), parent);
                }
            }
        }
    }

    #[test]
    fn isolate_and_relabel() {
        let mut l = CityLayout::empty(5, 1, 1.0);
        l.set_column(0, 0, SemanticClass::BuildingFacade, 0, 10);
        l.set_column(1, 0, SemanticClass::Road, 0, 2);
        l.set_column(3, 0, SemanticClass::BuildingFacade, 0, 0);
        let inst = instantiate_buildings(&l.semantic);
        let win = extract_local_window(&l, (2, 0), WindowSize::new(1, 5, 16));

        let only1 = isolate_instance(&win, &inst, 1);
        assert_eq!(only1.semantic.get(0, 0), SemanticClass::BuildingFacade);
        assert!(only1.semantic.get(1, 0).is_null());
        assert!(only1.semantic.get(3, 0).is_null());

        let none = isolate_instance(&win, &inst, 7);
        assert!(none.is_empty());

        let r1 = relabel_facade_roof(&only1, 1);
        assert_eq!(r1.label(0, 0, 10), SemanticClass::BuildingRoof);
        assert_eq!(r1.label(0, 0, 9), SemanticClass::BuildingFacade);
        assert!(r1.label(0, 0, 11).is_null());

        let r2 = relabel_facade_roof(&isolate_instance(&win, &inst, 2), 2);
        assert_eq!(r2.label(3, 0, 0), SemanticClass::BuildingRoof);
    }

    #[test]
    fn isolating_the_only_instance_keeps_building_cells() {
        let mut l = CityLayout::empty(3, 3, 1.0);
        l.set_column(1, 1, SemanticClass::BuildingFacade, 0, 4);
        l.set_column(1, 2, SemanticClass::BuildingFacade, 1, 5);
        let inst = instantiate_buildings(&l.semantic);
        let win = extract_local_window(&l, (1, 1), WindowSize::new(3, 3, 8));
        let iso = isolate_instance(&win, &inst, 1);
        assert_eq!(iso.semantic, win.semantic);
        assert_eq!(iso.heights, win.heights);
    }
}
