use std::collections::VecDeque;

use crate::layout::Grid;

/// Ring offsets P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

#[inline]
fn at(g: &Grid<bool>, x: i64, y: i64) -> bool {
    g.checked(x, y).copied().unwrap_or(false)
}

fn ring(g: &Grid<bool>, x: i64, y: i64) -> [bool; 8] {
    RING.map(|(dx, dy)| at(g, x + dx, y + dy))
}

/// Number of set 8-neighbors.
pub fn degree(g: &Grid<bool>, x: i64, y: i64) -> usize {
    ring(g, x, y).iter().filter(|&&b| b).count()
}

/// Number of set neighbors under mixed adjacency: a diagonal neighbor only
/// counts when neither of the two 4-neighbors it shares with the pixel is set.
/// A clean crossing then has a single pixel of degree four instead of a
/// cluster of five pixels with three or more 8-neighbors.
pub fn m_degree(g: &Grid<bool>, x: i64, y: i64) -> usize {
    m_neighbors(g, x, y).len()
}

/// Set neighbors under mixed adjacency, in ring order.
pub fn m_neighbors(g: &Grid<bool>, x: i64, y: i64) -> Vec<(i64, i64)> {
    let p = ring(g, x, y);
    (0..8)
        .filter(|&i| p[i] && (i % 2 == 0 || (!p[(i + 7) % 8] && !p[(i + 1) % 8])))
        .map(|i| (x + RING[i].0, y + RING[i].1))
        .collect()
}

/// 0→1 transitions around the ring.
fn transitions(p: &[bool; 8]) -> usize {
    (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count()
}

/// Whether the set ring pixels form a single 8-connected group within the ring.
fn ring_connected(p: &[bool; 8]) -> bool {
    let set: Vec<usize> = (0..8).filter(|&i| p[i]).collect();
    if set.len() <= 1 {
        return true;
    }
    // Ring positions adjacent in the 3x3 neighborhood: consecutive ring
    // entries, plus edge pixels two apart around a corner that is unset.
    let adjacent = |a: usize, b: usize| {
        let d = (a + 8 - b) % 8;
        if d == 1 || d == 7 {
            return true;
        }
        // Both edge-centered (even index) and two apart: share a corner.
        a % 2 == 0 && b % 2 == 0 && (d == 2 || d == 6)
    };
    let mut seen = vec![set[0]];
    let mut frontier = vec![set[0]];
    while let Some(a) = frontier.pop() {
        for &b in &set {
            if !seen.contains(&b) && adjacent(a, b) {
                seen.push(b);
                frontier.push(b);
            }
        }
    }
    seen.len() == set.len()
}

/// Removing the pixel keeps its neighbors connected and it is not an end.
fn deletable(g: &Grid<bool>, x: i64, y: i64) -> bool {
    let p = ring(g, x, y);
    let b = p.iter().filter(|&&v| v).count();
    b >= 2 && transitions(&p) == 1
}

/// Zhang–Suen thinning to a fixpoint.
///
/// Each subiteration marks candidates in parallel as in the classic
/// scheme; candidates are then removed in raster order, skipping any whose
/// removal would no longer be topology-preserving. This keeps small blobs
/// (a 2×2 square would otherwise vanish) and 8-connectivity intact. A final
/// pass removes redundant staircase corners so the skeleton is one pixel
/// thick under 8-connectivity.
pub fn skeletonize(mask: &Grid<bool>) -> Grid<bool> {
    let (w, h) = mask.dims();
    let mut img = mask.clone();
    loop {
        let mut changed = false;
        for step in 0..2 {
            let mut candidates = Vec::new();
            for y in 0..h as i64 {
                for x in 0..w as i64 {
                    if !at(&img, x, y) {
                        continue;
                    }
                    let p = ring(&img, x, y);
                    let b = p.iter().filter(|&&v| v).count();
                    if !(2..=6).contains(&b) || transitions(&p) != 1 {
                        continue;
                    }
                    let [n, _, e, _, s, _, wv, _] = p;
                    let ok = if step == 0 {
                        !(n && e && s) && !(e && s && wv)
                    } else {
                        !(n && e && wv) && !(n && s && wv)
                    };
                    if ok {
                        candidates.push((x, y));
                    }
                }
            }
            for (x, y) in candidates {
                if deletable(&img, x, y) {
                    img.set(x as usize, y as usize, false);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    remove_staircases(&mut img);
    img
}

/// Drops corner pixels whose two orthogonal neighbors already touch
/// diagonally, and breaks any remaining 2×2 blocks.
fn remove_staircases(img: &mut Grid<bool>) {
    let (w, h) = img.dims();
    loop {
        let mut changed = false;
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if !at(img, x, y) {
                    continue;
                }
                let p = ring(img, x, y);
                let b = p.iter().filter(|&&v| v).count();
                if !(2..=3).contains(&b) || !ring_connected(&p) {
                    continue;
                }
                let [n, _, e, _, s, _, wv, _] = p;
                let corner = (n && e) || (e && s) || (s && wv) || (wv && n);
                if corner {
                    img.set(x as usize, y as usize, false);
                    changed = true;
                }
            }
        }
        for y in 0..h.saturating_sub(1) as i64 {
            for x in 0..w.saturating_sub(1) as i64 {
                if at(img, x, y) && at(img, x + 1, y) && at(img, x, y + 1) && at(img, x + 1, y + 1) {
                    for (cx, cy) in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
                        let p = ring(img, cx, cy);
                        if p.iter().filter(|&&v| v).count() >= 2 && ring_connected(&p) {
                            img.set(cx as usize, cy as usize, false);
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Removes side branches shorter than `min_len` pixels that end in an
/// endpoint and attach to a junction. Chains without junctions are kept.
pub fn prune_spurs(skeleton: &Grid<bool>, min_len: usize, rounds: usize) -> Grid<bool> {
    let (w, h) = skeleton.dims();
    let mut img = skeleton.clone();
    for _ in 0..rounds {
        let mut removed = false;
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if !at(&img, x, y) || m_degree(&img, x, y) != 1 {
                    continue;
                }
                let mut chain = vec![(x, y)];
                let (mut px, mut py) = (x, y);
                let mut prev = (i64::MIN, i64::MIN);
                let mut hit_junction = false;
                while chain.len() <= min_len {
                    let next: Vec<(i64, i64)> = m_neighbors(&img, px, py)
                        .into_iter()
                        .filter(|&q| q != prev && !chain.contains(&q))
                        .collect();
                    if next.len() != 1 {
                        break;
                    }
                    let (nx, ny) = next[0];
                    if m_degree(&img, nx, ny) >= 3 {
                        hit_junction = true;
                        break;
                    }
                    prev = (px, py);
                    px = nx;
                    py = ny;
                    chain.push((px, py));
                }
                if hit_junction && chain.len() < min_len {
                    for (cx, cy) in chain {
                        img.set(cx as usize, cy as usize, false);
                    }
                    removed = true;
                }
            }
        }
        if !removed {
            break;
        }
        remove_staircases(&mut img);
    }
    img
}

/// Number of 8-connected components.
pub fn count_components(mask: &Grid<bool>) -> usize {
    let (w, h) = mask.dims();
    let mut seen = Grid::filled(w, h, false);
    let mut n = 0;
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            if !*mask.get(x, y) || *seen.get(x, y) {
                continue;
            }
            n += 1;
            seen.set(x, y, true);
            queue.push_back((x as i64, y as i64));
            while let Some((cx, cy)) = queue.pop_front() {
                for (dx, dy) in RING {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if at(mask, nx, ny) && !*seen.get(nx as usize, ny as usize) {
                        seen.set(nx as usize, ny as usize, true);
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    n
}

/// True when some 2×2 block is fully set.
pub fn has_full_2x2(mask: &Grid<bool>) -> bool {
    let (w, h) = mask.dims();
    (0..h.saturating_sub(1)).any(|y| {
        (0..w.saturating_sub(1))
            .any(|x| *mask.get(x, y) && *mask.get(x + 1, y) && *mask.get(x, y + 1) && *mask.get(x + 1, y + 1))
    })
}

/// Pads a mask by replicating its border pixels outward.
pub fn pad_replicate(mask: &Grid<bool>, pad: usize) -> Grid<bool> {
    let (w, h) = mask.dims();
    Grid::from_fn(w + 2 * pad, h + 2 * pad, |x, y| {
        let sx = (x as i64 - pad as i64).clamp(0, w as i64 - 1) as usize;
        let sy = (y as i64 - pad as i64).clamp(0, h as i64 - 1) as usize;
        *mask.get(sx, sy)
    })
}

pub fn crop(mask: &Grid<bool>, pad: usize, w: usize, h: usize) -> Grid<bool> {
    Grid::from_fn(w, h, |x, y| *mask.get(x + pad, y + pad))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> Grid<bool> {
        Grid::from_fn(rows[0].len(), rows.len(), |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[test]
    fn bar_thins_to_middle_row() {
        let m = Grid::from_fn(24, 7, |x, y| (2..22).contains(&x) && (2..5).contains(&y));
        let s = skeletonize(&m);
        let on: Vec<(usize, usize)> = (0..7)
            .flat_map(|y| (0..24).map(move |x| (x, y)))
            .filter(|&(x, y)| *s.get(x, y))
            .collect();
        assert!(on.iter().all(|&(_, y)| y == 3), "{on:?}");
        assert!(on.len() >= 16);
        assert_eq!(count_components(&s), 1);
    }

    #[test]
    fn thin_line_unchanged() {
        let m = Grid::from_fn(20, 5, |x, y| y == 2 && (3..17).contains(&x));
        assert_eq!(skeletonize(&m), m);
    }

    #[test]
    fn plus_has_one_junction() {
        let m = Grid::from_fn(21, 21, |x, y| ((9..12).contains(&y) && (1..20).contains(&x)) || ((9..12).contains(&x) && (1..20).contains(&y)));
        let s = skeletonize(&m);
        let junctions = (0..21i64)
            .flat_map(|y| (0..21i64).map(move |x| (x, y)))
            .filter(|&(x, y)| at(&s, x, y) && m_degree(&s, x, y) >= 3)
            .count();
        assert_eq!(junctions, 1);
        assert!(!has_full_2x2(&s));
    }

    #[test]
    fn small_square_survives() {
        let m = from_rows(&["....", ".##.", ".##.", "...."]);
        let s = skeletonize(&m);
        assert_eq!(count_components(&s), 1);
        assert!(!has_full_2x2(&s));
    }

    #[test]
    fn ring_connectivity() {
        // N and E touch diagonally.
        assert!(ring_connected(&[true, false, true, false, false, false, false, false]));
        // N and S do not.
        assert!(!ring_connected(&[true, false, false, false, true, false, false, false]));
        // Corner pixels two apart (NE, SE) are separated by E.
        assert!(!ring_connected(&[false, true, false, true, false, false, false, false]));
    }

    #[test]
    fn spur_pruning() {
        let m = Grid::from_fn(30, 12, |x, y| (y == 6 && (1..29).contains(&x)) || (x == 15 && (3..6).contains(&y)));
        assert_eq!(count_components(&m), 1);
        let p = prune_spurs(&m, 5, 3);
        assert!(!*p.get(15, 3));
        assert!(*p.get(1, 6) && *p.get(28, 6));
    }
}
