//! Plane geometry primitives: points, the 2D cross product, triangle centers.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Real-valued 2D cross product `a_x b_y - a_y b_x`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }

    pub fn midpoint(self, other: Vec2) -> Vec2 {
        self.lerp(other, 0.5)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle `(p, q, r)`; positive when counterclockwise.
pub fn signed_area2(p: Vec2, q: Vec2, r: Vec2) -> f64 {
    (q - p).cross(r - p)
}

pub fn triangle_area(p: Vec2, q: Vec2, r: Vec2) -> f64 {
    0.5 * signed_area2(p, q, r).abs()
}

/// Corner angles of the triangle in radians, in vertex order.
pub fn triangle_angles(p: Vec2, q: Vec2, r: Vec2) -> [f64; 3] {
    let ang = |a: Vec2, b: Vec2, c: Vec2| {
        let u = b - a;
        let v = c - a;
        let c = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
        c.acos()
    };
    [ang(p, q, r), ang(q, r, p), ang(r, p, q)]
}

/// Center of the circle through the three vertices. `None` for (near-)collinear input.
pub fn circumcenter(p: Vec2, q: Vec2, r: Vec2) -> Option<Vec2> {
    let d = 2.0 * signed_area2(p, q, r);
    let scale = (q - p).norm_squared().max((r - p).norm_squared());
    if d.abs() < 1e-14 * scale {
        return None;
    }
    let p2 = p.norm_squared();
    let q2 = q.norm_squared();
    let r2 = r.norm_squared();
    let ux = p2 * (q.y - r.y) + q2 * (r.y - p.y) + r2 * (p.y - q.y);
    let uy = p2 * (r.x - q.x) + q2 * (p.x - r.x) + r2 * (q.x - p.x);
    Some(Vec2::new(ux / d, uy / d))
}

pub fn barycenter(p: Vec2, q: Vec2, r: Vec2) -> Vec2 {
    (p + q + r) / 3.0
}

/// Incenter: side-length-weighted vertex average, weights the opposite side lengths.
pub fn incenter(p: Vec2, q: Vec2, r: Vec2) -> Vec2 {
    let a = (q - r).norm();
    let b = (p - r).norm();
    let c = (p - q).norm();
    (p * a + q * b + r * c) / (a + b + c)
}

/// Circumradius of the triangle, or `None` when collinear.
pub fn circumradius(p: Vec2, q: Vec2, r: Vec2) -> Option<f64> {
    circumcenter(p, q, r).map(|c| (p - c).norm())
}

/// Dense 3x3 matrix used for the per-triangle Hodge blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn zeros() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by adjugate; `None` when the determinant underflows the matrix scale.
    pub fn inverse(&self) -> Option<Mat3> {
        let m = &self.0;
        let det = self.determinant();
        let scale: f64 = m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
            .powi(3);
        if det.abs() < 1e-300 || det.abs() < 1e-16 * scale.max(1e-300) {
            return None;
        }
        let inv = |r1: usize, c1: usize, r2: usize, c2: usize| {
            m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
        };
        let adj = [
            [inv(1, 1, 2, 2), -inv(0, 1, 2, 2), inv(0, 1, 1, 2)],
            [-inv(1, 0, 2, 2), inv(0, 0, 2, 2), -inv(0, 0, 1, 2)],
            [inv(1, 0, 2, 1), -inv(0, 0, 2, 1), inv(0, 0, 1, 1)],
        ];
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = adj[i][j] / det;
            }
        }
        Some(Mat3(out))
    }

    pub fn one_norm(&self) -> f64 {
        (0..3)
            .map(|j| (0..3).map(|i| self.0[i][j].abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    }

    /// 1-norm condition estimate; `f64::INFINITY` when singular.
    pub fn cond_1(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.one_norm() * inv.one_norm(),
            None => f64::INFINITY,
        }
    }
}
