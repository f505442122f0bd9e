use crate::layout::{CityLayout, Grid, SemanticClass};
use crate::traffic::sim::VehicleState;
use crate::Exec;

/// Whether a planar point lies in a vehicle's footprint rectangle.
pub fn footprint_contains(v: &VehicleState, x: f64, y: f64) -> bool {
    let (s, c) = v.yaw.to_radians().sin_cos();
    let (dx, dy) = (x - v.center[0], y - v.center[1]);
    // Heading (sin, −cos) and its lateral axis (cos, sin).
    let along = dx * s - dy * c;
    let across = dx * c + dy * s;
    along.abs() <= v.dims[0] / 2.0 && across.abs() <= v.dims[1] / 2.0
}

/// Vertical extent of a vehicle in height cells.
pub fn vertical_extent(v: &VehicleState) -> (u16, u16) {
    let bu = (v.center[2] - v.dims[2] / 2.0).round().clamp(0.0, u16::MAX as f64) as u16;
    let td = (v.center[2] + v.dims[2] / 2.0).round().clamp(0.0, u16::MAX as f64) as u16;
    (bu, td.max(bu))
}

/// Rasterizes one frame of vehicle boxes: every cell whose center lies in a
/// footprint becomes VEHICLE with the box's rounded bottom and top heights.
/// Where footprints overlap, the taller top wins (then the lower id).
pub fn boxes_to_maps(frame: &[VehicleState], width: usize, height: usize, pixel_scale: f64, exec: Exec) -> CityLayout {
    let mut cells: Vec<(SemanticClass, u16, u16)> = vec![(SemanticClass::Null, 0, 0); width * height];
    let boxes: Vec<(&VehicleState, [i64; 4], (u16, u16))> = frame
        .iter()
        .map(|v| {
            let r = 0.5 * v.dims[0].hypot(v.dims[1]);
            let bbox = [
                (v.center[0] - r).floor() as i64 - 1,
                (v.center[1] - r).floor() as i64 - 1,
                (v.center[0] + r).ceil() as i64 + 1,
                (v.center[1] + r).ceil() as i64 + 1,
            ];
            (v, bbox, vertical_extent(v))
        })
        .collect();
    exec.for_each_row(&mut cells, width, |y, row| {
        let yc = y as f64 + 0.5;
        for &(v, b, (bu, td)) in &boxes {
            if (y as i64) < b[1] || (y as i64) > b[3] {
                continue;
            }
            let x0 = b[0].max(0) as usize;
            let x1 = (b[2].min(width as i64 - 1)).max(-1);
            if x1 < 0 {
                continue;
            }
            for (x, cell) in row.iter_mut().enumerate().take(x1 as usize + 1).skip(x0) {
                if !footprint_contains(v, x as f64 + 0.5, yc) {
                    continue;
                }
                if cell.0 == SemanticClass::Null || td > cell.2 {
                    *cell = (SemanticClass::Vehicle, bu, td);
                }
            }
        }
    });
    let mut layout = CityLayout::empty(width, height, pixel_scale);
    for (i, &(c, bu, td)) in cells.iter().enumerate() {
        if c != SemanticClass::Null {
            layout.set_column(i % width, i / width, c, bu, td);
        }
    }
    layout
}

/// Boolean footprint mask of a frame.
pub fn footprint_mask(layout: &CityLayout) -> Grid<bool> {
    layout.semantic.mask(|c| c == SemanticClass::Vehicle)
}
