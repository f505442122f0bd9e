use std::ops::ControlFlow;

use crate::layout::CellBounds;
use crate::render::camera::V3;
use crate::{Error, Result};

/// A piece of a ray inside one cell: `t0 ≤ t < t1` along the ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub cell: [i64; 3],
    pub t0: f64,
    pub t1: f64,
    /// Outward normal of the face through which the ray entered the cell,
    /// as (axis, sign); `None` when the ray starts inside it.
    pub entry_face: Option<(usize, i8)>,
}

impl Segment {
    pub fn normal(&self) -> Option<V3> {
        self.entry_face.map(|(axis, sign)| {
            let mut n = [0.0; 3];
            n[axis] = sign as f64;
            n
        })
    }
}

/// Parametric interval of the ray inside the box, clipped to `[0, t_max]`,
/// with the entry face when the ray starts outside.
pub fn clip_ray(bounds: &CellBounds, o: V3, d: V3, t_max: f64) -> Option<(f64, f64, Option<(usize, i8)>)> {
    if bounds.is_empty() {
        return None;
    }
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    let mut face = None;
    for a in 0..3 {
        let (lo, hi) = (bounds.min[a] as f64, bounds.max[a] as f64);
        if d[a] == 0.0 {
            if o[a] < lo || o[a] >= hi {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d[a];
        let (mut ta, mut tb) = ((lo - o[a]) * inv, (hi - o[a]) * inv);
        let mut sign = -1i8;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
            sign = 1;
        }
        if ta > t0 {
            t0 = ta;
            face = Some((a, sign));
        }
        t1 = t1.min(tb);
    }
    (t0 < t1).then_some((t0, t1, face))
}

/// Walks the cells of `bounds` pierced by `o + t·d` for `t` in `[0, t_max]`,
/// front to back, calling `visit` with each segment until it breaks.
/// Consecutive segments share endpoints, so together they cover the clipped
/// interval without gaps or overlaps.
pub fn dda_visit(
    bounds: &CellBounds,
    o: V3,
    d: V3,
    t_max: f64,
    mut visit: impl FnMut(Segment) -> ControlFlow<()>,
) -> Result<()> {
    if !(d.iter().all(|c| c.is_finite()) && d.iter().any(|&c| c != 0.0)) {
        return Err(Error::invalid("ray direction must be finite and non-zero"));
    }
    let Some((t_start, t_end, mut face)) = clip_ray(bounds, o, d, t_max) else {
        return Ok(());
    };
    let p = [o[0] + t_start * d[0], o[1] + t_start * d[1], o[2] + t_start * d[2]];
    let mut cell = [0i64; 3];
    let mut step = [0i64; 3];
    let mut t_next = [f64::INFINITY; 3];
    let mut t_delta = [f64::INFINITY; 3];
    for a in 0..3 {
        cell[a] = (p[a].floor() as i64).clamp(bounds.min[a], bounds.max[a] - 1);
        if d[a] > 0.0 {
            step[a] = 1;
            t_next[a] = ((cell[a] + 1) as f64 - o[a]) / d[a];
            t_delta[a] = 1.0 / d[a];
        } else if d[a] < 0.0 {
            step[a] = -1;
            t_next[a] = (cell[a] as f64 - o[a]) / d[a];
            t_delta[a] = -1.0 / d[a];
        }
    }
    let mut t = t_start;
    loop {
        let axis = if t_next[0] <= t_next[1] && t_next[0] <= t_next[2] {
            0
        } else if t_next[1] <= t_next[2] {
            1
        } else {
            2
        };
        let exit = t_next[axis].min(t_end);
        if exit > t {
            let seg = Segment {
                cell,
                t0: t,
                t1: exit,
                entry_face: face,
            };
            if visit(seg).is_break() {
                return Ok(());
            }
            t = exit;
        }
        if t_next[axis] >= t_end {
            return Ok(());
        }
        cell[axis] += step[axis];
        if cell[axis] < bounds.min[axis] || cell[axis] >= bounds.max[axis] {
            return Ok(());
        }
        face = Some((axis, -step[axis] as i8));
        t_next[axis] += t_delta[axis];
    }
}

/// All segments of [`dda_visit`] as a list.
pub fn dda_traverse(bounds: &CellBounds, o: V3, d: V3, t_max: f64) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    dda_visit(bounds, o, d, t_max, |s| {
        out.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}
