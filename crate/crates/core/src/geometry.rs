//! Planar geometry shared by the field, robot and sensor models.
//!
//! World frame: x/y in metres, headings counter-clockwise from +x.
//! Body frame: x forward, y to the left.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub type Vec2 = Vector2<f64>;

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::new(self.theta.cos(), self.theta.sin())
    }

    /// Unit vector pointing to the left of the heading.
    pub fn left(&self) -> Vec2 {
        Vec2::new(-self.theta.sin(), self.theta.cos())
    }

    /// Maps a body-frame point into the world frame.
    pub fn transform_point(&self, body: Vec2) -> Vec2 {
        self.position() + self.heading() * body.x + self.left() * body.y
    }

    /// Maps a world-frame point into this pose's body frame.
    pub fn inverse_transform_point(&self, world: Vec2) -> Vec2 {
        let d = world - self.position();
        Vec2::new(d.dot(&self.heading()), d.dot(&self.left()))
    }

    /// Composes `self ∘ offset`, where `offset` is expressed in this pose's body frame.
    pub fn compose(&self, offset: &Pose2D) -> Pose2D {
        let p = self.transform_point(offset.position());
        Pose2D::new(p.x, p.y, self.theta + offset.theta)
    }
}

/// An infinite 2D line through `point` along unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line2 {
    pub point: Vec2,
    pub direction: Vec2,
}

impl Line2 {
    pub fn through(a: Vec2, b: Vec2) -> Option<Self> {
        let d = b - a;
        let n = d.norm();
        (n > 0.0).then(|| Self {
            point: a,
            direction: d / n,
        })
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::new(-self.direction.y, self.direction.x)
    }

    /// Signed distance; positive on the left of `direction`.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        (p - self.point).dot(&self.normal())
    }

    pub fn project(&self, p: Vec2) -> f64 {
        (p - self.point).dot(&self.direction)
    }

    pub fn at(&self, s: f64) -> Vec2 {
        self.point + self.direction * s
    }

    pub fn intersect(&self, other: &Line2) -> Option<Vec2> {
        let denom = cross(self.direction, other.direction);
        if denom.abs() < 1e-12 {
            return None;
        }
        let s = cross(other.point - self.point, other.direction) / denom;
        Some(self.at(s))
    }
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed angle from `a` to `b`, counter-clockwise positive, in (-pi, pi].
pub fn signed_angle(a: Vec2, b: Vec2) -> f64 {
    cross(a, b).atan2(a.dot(&b))
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Total least-squares line through a point set (principal axis of the scatter).
///
/// Returns `None` for fewer than two distinct points.
pub fn fit_line(points: &[Vec2]) -> Option<Line2> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::zeros(), |acc, p| acc + p) / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    if sxx + syy == 0.0 {
        return None;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    Some(Line2 {
        point: mean,
        direction: Vec2::new(angle.cos(), angle.sin()),
    })
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc += cross(a, b);
    }
    0.5 * acc.abs()
}

fn ensure_ccw(poly: &[Vec2]) -> Vec<Vec2> {
    let mut acc = 0.0;
    for i in 0..poly.len() {
        acc += cross(poly[i], poly[(i + 1) % poly.len()]);
    }
    let mut out = poly.to_vec();
    if acc < 0.0 {
        out.reverse();
    }
    out
}

/// Keeps the part of `poly` on the left of the directed edge `a -> b`.
pub fn clip_half_plane(poly: &[Vec2], a: Vec2, b: Vec2) -> Vec<Vec2> {
    let inside = |p: Vec2| cross(b - a, p - a) >= -1e-12;
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let cur = poly[i];
        let prev = poly[(i + poly.len() - 1) % poly.len()];
        let (ci, pi) = (inside(cur), inside(prev));
        if ci != pi {
            let d = cur - prev;
            let denom = cross(b - a, d);
            if denom.abs() > 1e-15 {
                let t = -cross(b - a, prev - a) / denom;
                out.push(prev + d * t);
            }
        }
        if ci {
            out.push(cur);
        }
    }
    out
}

/// Intersection of two convex polygons (Sutherland-Hodgman).
pub fn convex_intersection(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    if subject.len() < 3 || clip.len() < 3 {
        return Vec::new();
    }
    let clip = ensure_ccw(clip);
    let mut out = ensure_ccw(subject);
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        out = clip_half_plane(&out, clip[i], clip[(i + 1) % clip.len()]);
    }
    out
}

pub fn is_convex(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let z = cross(b - a, c - b);
        if z.abs() < 1e-12 {
            continue;
        }
        if sign == 0.0 {
            sign = z.signum();
        } else if z.signum() != sign {
            return false;
        }
    }
    sign != 0.0
}

/// Median with the even-count convention of averaging the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wrap_is_half_open() {
        assert_relative_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(7.0 * PI), PI, epsilon = 1e-9);
    }

    #[test]
    fn pose_round_trip() {
        let pose = Pose2D::new(1.0, -2.0, 0.7);
        let p = Vec2::new(0.3, 0.4);
        let back = pose.inverse_transform_point(pose.transform_point(p));
        assert_relative_eq!(back, p, epsilon = 1e-12);
    }

    #[test]
    fn square_intersection_area() {
        let a = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
        ];
        let b: Vec<_> = a.iter().map(|p| p + Vec2::new(1.0, 1.0)).collect();
        assert_relative_eq!(polygon_area(&convex_intersection(&a, &b)), 1.0, epsilon = 1e-12);
        let far: Vec<_> = a.iter().map(|p| p + Vec2::new(5.0, 0.0)).collect();
        assert_eq!(polygon_area(&convex_intersection(&a, &far)), 0.0);
    }

    #[test]
    fn fit_line_recovers_direction() {
        let pts: Vec<_> = (0..10).map(|i| Vec2::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        let line = fit_line(&pts).unwrap();
        assert_relative_eq!(line.direction.y / line.direction.x, 2.0, epsilon = 1e-12);
        assert_relative_eq!(line.signed_distance(Vec2::new(0.0, 1.0)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn median_even_count_averages() {
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
