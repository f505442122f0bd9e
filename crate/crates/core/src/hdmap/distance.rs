use crate::layout::Grid;

const FAR: f64 = 1e20;

/// 1D squared distance transform of a sampled function (lower envelope of
/// parabolas).
fn dt1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: replace the first parabola.
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Euclidean distance from each set pixel's center to the nearest unset
/// pixel's center (0 on unset pixels). Pixels outside the raster do not
/// count as unset.
pub fn distance_transform(mask: &Grid<bool>) -> Grid<f64> {
    let (w, h) = mask.dims();
    let mut g: Vec<f64> = mask.as_slice().iter().map(|&b| if b { FAR } else { 0.0 }).collect();
    let mut col = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = g[y * w + x];
        }
        dt1d(&col, &mut col_out);
        for y in 0..h {
            g[y * w + x] = col_out[y];
        }
    }
    let mut row_out = vec![0.0; w];
    for y in 0..h {
        dt1d(&g[y * w..(y + 1) * w], &mut row_out);
        g[y * w..(y + 1) * w].copy_from_slice(&row_out);
    }
    Grid::from_vec(w, h, g.into_iter().map(|d| d.min(FAR).sqrt()).collect()).expect("same dims")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(mask: &Grid<bool>) -> Grid<f64> {
        let (w, h) = mask.dims();
        Grid::from_fn(w, h, |x, y| {
            if !*mask.get(x, y) {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for yy in 0..h {
                for xx in 0..w {
                    if !*mask.get(xx, yy) {
                        let d = ((x as f64 - xx as f64).powi(2) + (y as f64 - yy as f64).powi(2)).sqrt();
                        best = best.min(d);
                    }
                }
            }
            best
        })
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 12345u64;
        for _ in 0..5 {
            let m = Grid::from_fn(23, 17, |_, _| {
                state = crate::hashing::mix64(state);
                state % 5 != 0
            });
            let fast = distance_transform(&m);
            let slow = brute(&m);
            for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
                if b.is_finite() {
                    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn band_center() {
        let m = Grid::from_fn(30, 13, |_, y| (1..12).contains(&y));
        let d = distance_transform(&m);
        assert_eq!(*d.get(15, 6), 6.0);
        assert_eq!(*d.get(15, 1), 1.0);
    }
}
