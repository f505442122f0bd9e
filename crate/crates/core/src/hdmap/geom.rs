//! Polyline helpers in layout pixel coordinates.

pub type P2 = [f64; 2];
pub type P3 = [f64; 3];

#[inline]
pub fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: P2, b: P2) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn unit(a: P2) -> P2 {
    let n = norm(a);
    if n > 0.0 {
        [a[0] / n, a[1] / n]
    } else {
        [0.0, 0.0]
    }
}

/// Normal pointing to the right of travel on a y-down map.
#[inline]
pub fn right_normal(d: P2) -> P2 {
    [-d[1], d[0]]
}

pub fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let d = sub(b, a);
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

pub fn point_polyline_distance(p: P2, line: &[P2]) -> f64 {
    match line.len() {
        0 => f64::INFINITY,
        1 => dist(p, line[0]),
        _ => line
            .windows(2)
            .map(|s| point_segment_distance(p, s[0], s[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

pub fn polyline_length(line: &[P2]) -> f64 {
    line.windows(2).map(|s| dist(s[0], s[1])).sum()
}

/// Douglas–Peucker simplification; endpoints are always kept.
pub fn douglas_peucker(line: &[P2], eps: f64) -> Vec<P2> {
    if line.len() <= 2 {
        return line.to_vec();
    }
    let mut keep = vec![false; line.len()];
    keep[0] = true;
    keep[line.len() - 1] = true;
    let mut stack = vec![(0usize, line.len() - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let (mut best, mut best_d) = (a, -1.0);
        for (i, &p) in line.iter().enumerate().take(b).skip(a + 1) {
            let d = point_segment_distance(p, line[a], line[b]);
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        if best_d > eps {
            keep[best] = true;
            stack.push((a, best));
            stack.push((best, b));
        }
    }
    line.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
}

/// Simplifies a closed ring given without the repeated closing vertex.
/// The result repeats its first vertex at the end.
pub fn douglas_peucker_closed(ring: &[P2], eps: f64) -> Vec<P2> {
    if ring.len() < 3 {
        let mut out = ring.to_vec();
        if let Some(&f) = ring.first() {
            out.push(f);
        }
        return out;
    }
    let far = (1..ring.len())
        .max_by(|&i, &j| dist(ring[0], ring[i]).total_cmp(&dist(ring[0], ring[j])))
        .unwrap_or(1);
    let mut first: Vec<P2> = ring[..=far].to_vec();
    let mut second: Vec<P2> = ring[far..].to_vec();
    second.push(ring[0]);
    first = douglas_peucker(&first, eps);
    second = douglas_peucker(&second, eps);
    first.pop();
    first.extend(second);
    first
}

/// Offsets a polyline sideways by `offset` (positive = right of travel)
/// with mitered joins. Straight runs keep the exact perpendicular distance.
pub fn offset_polyline(line: &[P2], offset: f64) -> Vec<P2> {
    let n = line.len();
    if n < 2 || offset == 0.0 {
        return line.to_vec();
    }
    let seg_normals: Vec<P2> = line
        .windows(2)
        .map(|s| right_normal(unit(sub(s[1], s[0]))))
        .collect();
    (0..n)
        .map(|i| {
            let nrm = if i == 0 {
                seg_normals[0]
            } else if i == n - 1 {
                seg_normals[n - 2]
            } else {
                let (a, b) = (seg_normals[i - 1], seg_normals[i]);
                let avg = unit([a[0] + b[0], a[1] + b[1]]);
                let cos_half = (avg[0] * a[0] + avg[1] * a[1]).max(0.25);
                [avg[0] / cos_half, avg[1] / cos_half]
            };
            [line[i][0] + nrm[0] * offset, line[i][1] + nrm[1] * offset]
        })
        .collect()
}

/// Cuts `from_start` and `from_end` of arc length off a polyline.
pub fn trim_polyline(line: &[P2], from_start: f64, from_end: f64) -> Vec<P2> {
    let total = polyline_length(line);
    if line.len() < 2 || from_start + from_end >= total {
        return line.to_vec();
    }
    let (s0, s1) = (from_start, total - from_end);
    let mut out = vec![point_at(line, s0).0];
    let mut acc = 0.0;
    for s in line.windows(2) {
        let next = acc + dist(s[0], s[1]);
        if next > s0 && next < s1 {
            out.push(s[1]);
        }
        acc = next;
    }
    out.push(point_at(line, s1).0);
    out.dedup_by(|a, b| dist(*a, *b) < 1e-12);
    out
}

/// Point and unit tangent at arc length `s`, clamped to the ends.
pub fn point_at(line: &[P2], s: f64) -> (P2, P2) {
    if line.len() == 1 {
        return (line[0], [1.0, 0.0]);
    }
    let mut acc = 0.0;
    for seg in line.windows(2) {
        let len = dist(seg[0], seg[1]);
        if len <= 0.0 {
            continue;
        }
        if s <= acc + len {
            let t = ((s - acc) / len).clamp(0.0, 1.0);
            let d = sub(seg[1], seg[0]);
            return ([seg[0][0] + t * d[0], seg[0][1] + t * d[1]], unit(d));
        }
        acc += len;
    }
    let k = line.len() - 1;
    (line[k], unit(sub(line[k], line[k - 1])))
}
