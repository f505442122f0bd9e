use std::collections::VecDeque;

use crate::layout::{Grid, SemanticMap};

/// Per-pixel building instance ids; 0 means no instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMap {
    pub labels: Grid<u32>,
    count: u32,
}

impl InstanceMap {
    pub fn from_labels(labels: Grid<u32>) -> Self {
        let count = labels.as_slice().iter().copied().max().unwrap_or(0);
        Self { labels, count }
    }

    /// Number of instances, `n_B`.
    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn id_at(&self, x: i64, y: i64) -> Option<u32> {
        self.labels.checked(x, y).copied().filter(|&id| id != 0)
    }

    /// Per-instance pixel bounding boxes `[x0, y0, x1, y1]` (inclusive),
    /// indexed by `id - 1`.
    pub fn bounding_boxes(&self) -> Vec<[usize; 4]> {
        let mut boxes = vec![[usize::MAX, usize::MAX, 0, 0]; self.count as usize];
        for y in 0..self.labels.height() {
            for x in 0..self.labels.width() {
                let id = *self.labels.get(x, y);
                if id == 0 {
                    continue;
                }
                let b = &mut boxes[id as usize - 1];
                b[0] = b[0].min(x);
                b[1] = b[1].min(y);
                b[2] = b[2].max(x);
                b[3] = b[3].max(y);
            }
        }
        boxes
    }

    /// Integer center of each instance's bounding box.
    pub fn centers(&self) -> Vec<(i64, i64)> {
        self.bounding_boxes()
            .iter()
            .map(|b| (((b[0] + b[2]) / 2) as i64, ((b[1] + b[3]) / 2) as i64))
            .collect()
    }

    pub fn pixel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.count as usize];
        for &id in self.labels.as_slice() {
            if id != 0 {
                counts[id as usize - 1] += 1;
            }
        }
        counts
    }
}

/// Labels 4-connected building components. Ids are assigned in raster-scan
/// order of each component's first pixel, starting at 1.
pub fn instantiate_buildings(semantic: &SemanticMap) -> InstanceMap {
    let (w, h) = semantic.cells.dims();
    let mut labels = Grid::filled(w, h, 0u32);
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !semantic.get(x, y).is_building() || *labels.get(x, y) != 0 {
                continue;
            }
            next += 1;
            labels.set(x, y, next);
            queue.push_back((x, y));
            while let Some((cx, cy)) = queue.pop_front() {
                let neighbors = [
                    (cx.wrapping_sub(1), cy),
                    (cx + 1, cy),
                    (cx, cy.wrapping_sub(1)),
                    (cx, cy + 1),
                ];
                for (nx, ny) in neighbors {
                    if nx < w && ny < h && *labels.get(nx, ny) == 0 && semantic.get(nx, ny).is_building() {
                        labels.set(nx, ny, next);
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    InstanceMap { labels, count: next }
}
