use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::traffic::pose::Mat3;
use crate::{Error, Result};

pub type V3 = [f64; 3];

#[inline]
pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn sub3(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale3(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn norm3(a: V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize3(a: V3) -> Option<V3> {
    let n = norm3(a);
    (n > 0.0 && n.is_finite()).then(|| scale3(a, 1.0 / n))
}

/// JSON form of a camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub w: usize,
    pub h: usize,
    pub position: V3,
    pub look_at: V3,
    #[serde(default = "default_up")]
    pub up: V3,
}

fn default_up() -> V3 {
    [0.0, 0.0, 1.0]
}

/// Pinhole camera in layout cells. `rotation` maps camera axes (right,
/// down, forward) to world directions; its columns are those axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub position: V3,
    pub rotation: Mat3,
}

impl Camera {
    /// Camera at `position` looking at `target`. Image x runs along
    /// `up × forward` and image y along `right × forward`.
    pub fn look_at(position: V3, target: V3, up: V3, fx: f64, fy: f64, width: usize, height: usize) -> Result<Camera> {
        Camera::from_spec(&CameraSpec {
            fx,
            fy,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            w: width,
            h: height,
            position,
            look_at: target,
            up,
        })
    }

    pub fn from_spec(s: &CameraSpec) -> Result<Camera> {
        if !(s.fx > 0.0 && s.fy > 0.0) || s.w == 0 || s.h == 0 {
            return Err(Error::invalid("camera needs positive focal lengths and image size"));
        }
        let f = normalize3(sub3(s.look_at, s.position)).ok_or_else(|| Error::invalid("camera position equals look_at"))?;
        let r = normalize3(cross(s.up, f)).ok_or_else(|| Error::invalid("camera up is parallel to the view direction"))?;
        let d = cross(r, f);
        Ok(Camera {
            fx: s.fx,
            fy: s.fy,
            cx: s.cx,
            cy: s.cy,
            width: s.w,
            height: s.h,
            position: s.position,
            rotation: [[r[0], d[0], f[0]], [r[1], d[1], f[1]], [r[2], d[2], f[2]]],
        })
    }

    pub fn load(path: &Path) -> Result<Camera> {
        let bytes = std::fs::read(path)?;
        let spec: CameraSpec = serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Camera::from_spec(&spec)
    }

    pub fn forward(&self) -> V3 {
        [self.rotation[0][2], self.rotation[1][2], self.rotation[2][2]]
    }

    /// Unit world direction through the center of pixel `(u, v)`.
    pub fn ray_dir(&self, u: usize, v: usize) -> V3 {
        let x = (u as f64 + 0.5 - self.cx) / self.fx;
        let y = (v as f64 + 0.5 - self.cy) / self.fy;
        let r = &self.rotation;
        let d = [
            r[0][0] * x + r[0][1] * y + r[0][2],
            r[1][0] * x + r[1][1] * y + r[1][2],
            r[2][0] * x + r[2][1] * y + r[2][2],
        ];
        scale3(d, 1.0 / norm3(d))
    }

    /// Camera-space coordinates (right, down, forward) of a world point.
    pub fn to_camera(&self, p: V3) -> V3 {
        let d = sub3(p, self.position);
        let r = &self.rotation;
        [
            r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2],
            r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2],
            r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2],
        ]
    }

    /// Continuous pixel coordinates and ray distance of a world point, or
    /// `None` behind the camera.
    pub fn project(&self, p: V3) -> Option<(f64, f64, f64)> {
        let c = self.to_camera(p);
        if c[2] <= 1e-9 {
            return None;
        }
        Some((self.fx * c[0] / c[2] + self.cx, self.fy * c[1] / c[2] + self.cy, norm3(c)))
    }

    /// Pixel rectangle `[u0, u1) × [v0, v1)` covering the projection of an
    /// axis-aligned box, or the whole image when part of the box is behind
    /// the camera. `None` when the box is entirely behind it or off screen.
    pub fn screen_rect(&self, lo: V3, hi: V3) -> Option<[usize; 4]> {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        let mut behind = 0;
        for corner in 0..8 {
            let p = [
                if corner & 1 == 0 { lo[0] } else { hi[0] },
                if corner & 2 == 0 { lo[1] } else { hi[1] },
                if corner & 4 == 0 { lo[2] } else { hi[2] },
            ];
            match self.project(p) {
                Some((u, v, _)) => {
                    min = [min[0].min(u), min[1].min(v)];
                    max = [max[0].max(u), max[1].max(v)];
                }
                None => behind += 1,
            }
        }
        if behind == 8 {
            return None;
        }
        if behind > 0 {
            return Some([0, self.width, 0, self.height]);
        }
        let u0 = (min[0].floor() - 1.0).max(0.0) as usize;
        let v0 = (min[1].floor() - 1.0).max(0.0) as usize;
        let u1 = ((max[0].ceil() + 1.0).max(0.0) as usize).min(self.width);
        let v1 = ((max[1].ceil() + 1.0).max(0.0) as usize).min(self.height);
        (u0 < u1 && v0 < v1).then_some([u0, u1, v0, v1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn north_facing_camera_sees_east_on_the_right() {
        let cam = Camera::look_at([0.0, 0.0, 0.0], [0.0, -10.0, 0.0], [0.0, 0.0, 1.0], 100.0, 100.0, 64, 48).unwrap();
        let (u, v, _) = cam.project([1.0, -10.0, 0.0]).unwrap();
        assert!(u > 32.0 && (v - 24.0).abs() < 1e-9);
        let (_, v, _) = cam.project([0.0, -10.0, 1.0]).unwrap();
        assert!(v < 24.0);
    }

    #[test]
    fn rotation_is_orthonormal() {
        let cam = Camera::look_at([3.0, 4.0, 50.0], [40.0, 60.0, 0.0], [0.0, 0.0, 1.0], 500.0, 500.0, 960, 540).unwrap();
        let r = cam.rotation;
        for a in 0..3 {
            for b in 0..3 {
                let d: f64 = (0..3).map(|k| r[k][a] * r[k][b]).sum();
                assert!((d - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ray_and_projection_agree() {
        let cam = Camera::look_at([3.0, 4.0, 50.0], [40.0, 60.0, 0.0], [0.0, 0.0, 1.0], 500.0, 400.0, 96, 54).unwrap();
        let d = cam.ray_dir(10, 40);
        let p = add3(cam.position, scale3(d, 37.0));
        let (u, v, t) = cam.project(p).unwrap();
        assert!((u - 10.5).abs() < 1e-9 && (v - 40.5).abs() < 1e-9 && (t - 37.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Camera::look_at([0.0; 3], [0.0; 3], [0.0, 0.0, 1.0], 1.0, 1.0, 4, 4).is_err());
        assert!(Camera::look_at([0.0; 3], [0.0, 0.0, -1.0], [0.0, 0.0, 1.0], 1.0, 1.0, 4, 4).is_err());
    }
}
