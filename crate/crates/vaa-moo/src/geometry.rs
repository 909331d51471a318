//! Small 3D geometry helpers shared by every physical model in the crate.

use serde::{Deserialize, Serialize};

/// A point in the 3D Cartesian mission frame (meters). The ground plane is
/// `z = 0` and altitudes are positive `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point on the ground plane.
    pub const fn ground(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Distance of the horizontal (xy) projections.
    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Arithmetic centroid of a non-empty point set.
    pub fn centroid<'a, I: IntoIterator<Item = &'a Point3>>(points: I) -> Option<Point3> {
        let mut n = 0usize;
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for p in points {
            sx += p.x;
            sy += p.y;
            sz += p.z;
            n += 1;
        }
        if n == 0 {
            return None;
        }
        let inv = 1.0 / n as f64;
        Some(Point3::new(sx * inv, sy * inv, sz * inv))
    }
}

/// Axis-aligned square region on the ground plane, described by its center
/// and side length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRegion {
    pub center_x: f64,
    pub center_y: f64,
    pub side: f64,
}

impl SquareRegion {
    pub const fn new(center_x: f64, center_y: f64, side: f64) -> Self {
        Self { center_x, center_y, side }
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.center_x - self.side / 2.0, self.center_x + self.side / 2.0)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.center_y - self.side / 2.0, self.center_y + self.side / 2.0)
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        // Tolerance absorbs round-tripped boundary samples.
        const EPS: f64 = 1e-9;
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        x >= x0 - EPS && x <= x1 + EPS && y >= y0 - EPS && y <= y1 + EPS
    }

    pub fn clamp_xy(&self, x: f64, y: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        (x.clamp(x0, x1), y.clamp(y0, y1))
    }
}
