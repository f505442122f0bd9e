/// Row-major 3×3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// Rotation taking world offsets into a vehicle's canonical frame, where the
/// vehicle faces −y. `theta` is the yaw measured from the −y axis and
/// `gamma` the pitch, both in degrees.
pub fn rotation_matrix(theta: f64, gamma: f64) -> Mat3 {
    let (st, ct) = theta.to_radians().sin_cos();
    let (sg, cg) = gamma.to_radians().sin_cos();
    [
        [ct, st, 0.0],
        [-st * cg, ct * cg, sg],
        [st * sg, -ct * sg, cg],
    ]
}

pub fn mat_vec(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
}

pub fn transpose(m: &Mat3) -> Mat3 {
    std::array::from_fn(|r| std::array::from_fn(|c| m[c][r]))
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..3).map(|k| a[r][k] * b[k][c]).sum()))
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Canonical coordinates `R·(p − c)` of a world point relative to a vehicle
/// centered at `center` with the given yaw and pitch.
pub fn canonicalize(p: [f64; 3], center: [f64; 3], yaw: f64, pitch: f64) -> [f64; 3] {
    let r = rotation_matrix(yaw, pitch);
    mat_vec(&r, [p[0] - center[0], p[1] - center[1], p[2] - center[2]])
}

/// Inverse of [`canonicalize`].
pub fn decanonicalize(q: [f64; 3], center: [f64; 3], yaw: f64, pitch: f64) -> [f64; 3] {
    let rt = transpose(&rotation_matrix(yaw, pitch));
    let d = mat_vec(&rt, q);
    [d[0] + center[0], d[1] + center[1], d[2] + center[2]]
}

/// Yaw in degrees, in (−180, 180], of a planar heading: the heading of yaw
/// θ is (sin θ, −cos θ).
pub fn yaw_from_heading(dx: f64, dy: f64) -> f64 {
    let deg = dx.atan2(-dy).to_degrees();
    if deg <= -180.0 {
        deg + 360.0
    } else {
        deg
    }
}

/// Pitch in degrees for a climb of `rise` over `run` (same units). Going
/// uphill gives a negative pitch, which makes the canonical forward axis
/// exactly −y.
pub fn pitch_from_grade(rise: f64, run: f64) -> f64 {
    if run <= 0.0 && rise == 0.0 {
        return 0.0;
    }
    let g = -(rise.atan2(run)).to_degrees();
    g.clamp(-89.999, 89.999)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_quarter_turn() {
        let i = rotation_matrix(0.0, 0.0);
        assert_eq!(i, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = rotation_matrix(90.0, 0.0);
        let want = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((r[a][b] - want[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn yaw_convention() {
        assert_eq!(yaw_from_heading(0.0, -1.0), 0.0);
        assert!((yaw_from_heading(1.0, 0.0) - 90.0).abs() < 1e-12);
        assert_eq!(yaw_from_heading(0.0, 1.0), 180.0);
        assert!((yaw_from_heading(-1.0, 0.0) + 90.0).abs() < 1e-12);
    }

    #[test]
    fn heading_maps_to_minus_y() {
        for &(dx, dy, rise) in &[(1.0, 0.0, 0.0), (0.3, -0.7, 0.2), (-0.5, 0.5, -0.3)] {
            let run = f64::hypot(dx, dy);
            let yaw = yaw_from_heading(dx, dy);
            let pitch = pitch_from_grade(rise, run);
            let n = (run * run + rise * rise).sqrt();
            let q = mat_vec(&rotation_matrix(yaw, pitch), [dx / n, dy / n, rise / n]);
            assert!(q[0].abs() < 1e-12 && (q[1] + 1.0).abs() < 1e-12 && q[2].abs() < 1e-12, "{q:?}");
        }
    }

    #[test]
    fn center_maps_to_origin() {
        let c = [10.0, -3.0, 2.5];
        assert_eq!(canonicalize(c, c, 33.0, 12.0), [0.0, 0.0, 0.0]);
        assert_eq!(canonicalize([11.0, -1.0, 5.5], c, 0.0, 0.0), [1.0, 2.0, 3.0]);
    }
}
