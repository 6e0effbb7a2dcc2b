//! Generalized "minimum enclosing x" framework: shape families described by a
//! center, a non-negative size, and a ranking distance, plus the sampling
//! primitives and solvers built on top of them.
//!
//! A family must satisfy three properties, spot-checked at random by
//! [`check_shape_properties`]:
//!
//! 1. for a fixed center, sizes order the shapes by inclusion;
//! 2. the ranking distance orders points consistently with membership: if
//!    `p0` is inside a shape and `f(c, p) <= f(c, p0)` then `p` is inside too;
//! 3. every (center, point) pair has a touch size: the minimal size whose
//!    shape contains the point.

pub mod kcenter;
pub mod linefit;
mod sampling;
pub mod svm;

pub use sampling::{
    generalized_rank, generalized_sandwich, generalized_uniform_adaptive, sandwich_sample_size,
    uniform_adaptive_sample_size,
};

use serde::{Deserialize, Serialize};

use crate::dataset::{PointSet, Rng64};
use crate::error::{Error, Result};
use crate::meb::{Center, Kernel, PreparedCenter};

/// A registered shape family. `Center` is the family's notion of a shape
/// center; shapes are `x(center, size)`.
pub trait ShapeFamily {
    type Center;

    fn name(&self) -> &'static str;

    /// Ranking distance `f(center, p)`; used only to order points and may be
    /// negative.
    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64;

    /// Minimal size `r0` with the point inside `x(center, r0)`; +inf when no
    /// size covers the point.
    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64;

    /// Membership test for `x(center, size)`.
    fn contains(&self, center: &Self::Center, size: f64, points: &PointSet, idx: usize) -> bool {
        self.touch_size(center, points, idx) <= size
    }
}

/// Balls in feature space; sizes are radii and the ranking distance is the
/// (kernelized) Euclidean distance.
#[derive(Debug, Clone, Copy)]
pub struct BallFamily {
    pub kernel: Kernel,
}

impl ShapeFamily for BallFamily {
    type Center = PreparedCenter;

    fn name(&self) -> &'static str {
        "balls"
    }

    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        center.dist(points, idx)
    }

    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        center.dist(points, idx)
    }
}

/// Unions of at most k balls sharing one radius; the distance to the center
/// set is the minimum over the individual centers.
#[derive(Debug, Clone, Copy)]
pub struct KBallFamily {
    pub kernel: Kernel,
}

impl ShapeFamily for KBallFamily {
    type Center = Vec<PreparedCenter>;

    fn name(&self) -> &'static str {
        "k-ball-unions"
    }

    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        center
            .iter()
            .map(|c| c.dist(points, idx))
            .fold(f64::INFINITY, f64::min)
    }

    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        self.rank_distance(center, points, idx)
    }
}

/// A line in R^d with cached products for fast point-to-line distances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Line {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    point_norm_sq: f64,
    point_dot_dir: f64,
}

impl Line {
    pub fn new(point: Vec<f64>, direction: Vec<f64>) -> Result<Self> {
        let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("line direction must be a unit vector"));
        }
        if point.len() != direction.len() {
            return Err(Error::invalid("line point/direction dimension mismatch"));
        }
        let point_norm_sq = point.iter().map(|x| x * x).sum();
        let point_dot_dir = point.iter().zip(&direction).map(|(a, b)| a * b).sum();
        Ok(Line {
            point,
            direction,
            point_norm_sq,
            point_dot_dir,
        })
    }

    pub fn through(a: &[f64], b: &[f64]) -> Option<Self> {
        let mut dir: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for x in &mut dir {
            *x /= norm;
        }
        Line::new(a.to_vec(), dir).ok()
    }

    /// Euclidean distance from stored point `idx` to the line. Dense rows use
    /// the explicit residual (the squared-norm form cancels catastrophically
    /// for points near the line); sparse rows fall back to the cached-norm
    /// form.
    pub fn dist(&self, points: &PointSet, idx: usize) -> f64 {
        if points.is_dense() {
            let row = points.row(idx);
            let mut along = 0.0;
            for ((x, a), v) in row.iter().zip(&self.point).zip(&self.direction) {
                along += (x - a) * v;
            }
            let mut res_sq = 0.0;
            for ((x, a), v) in row.iter().zip(&self.point).zip(&self.direction) {
                let r = x - a - along * v;
                res_sq += r * r;
            }
            res_sq.sqrt()
        } else {
            let p_dot_a = points.dot(idx, &self.point);
            let p_dot_v = points.dot(idx, &self.direction);
            let rel_sq = points.norm_sq(idx) - 2.0 * p_dot_a + self.point_norm_sq;
            let along = p_dot_v - self.point_dot_dir;
            (rel_sq - along * along).max(0.0).sqrt()
        }
    }

    pub fn dist_vec(&self, p: &[f64]) -> f64 {
        let along: f64 = p
            .iter()
            .zip(&self.point)
            .zip(&self.direction)
            .map(|((x, a), v)| (x - a) * v)
            .sum();
        let res_sq: f64 = p
            .iter()
            .zip(&self.point)
            .zip(&self.direction)
            .map(|((x, a), v)| {
                let r = x - a - along * v;
                r * r
            })
            .sum();
        res_sq.sqrt()
    }
}

/// Slabs around a line (j = 1 flats): all points within `width` of the line.
#[derive(Debug, Clone, Copy)]
pub struct SlabFamily;

impl ShapeFamily for SlabFamily {
    type Center = Line;

    fn name(&self) -> &'static str {
        "slabs"
    }

    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        center.dist(points, idx)
    }

    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        center.dist(points, idx)
    }
}

/// Closed half-spaces not covering the origin: the center is the unit normal
/// `u`, and a shape of size `s > 0` is `{ y : <y, u> >= 1/s }`. Larger sizes
/// move the bounding hyperplane toward the origin (larger shapes), so
/// minimizing the size maximizes the separation margin. The ranking distance
/// is `-<p, u>`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpaceFamily;

impl ShapeFamily for HalfSpaceFamily {
    type Center = Vec<f64>;

    fn name(&self) -> &'static str {
        "half-spaces"
    }

    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        -points.dot(idx, center)
    }

    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        let proj = points.dot(idx, center);
        if proj > 0.0 {
            1.0 / proj
        } else {
            f64::INFINITY
        }
    }

    fn contains(&self, center: &Self::Center, size: f64, points: &PointSet, idx: usize) -> bool {
        size > 0.0 && points.dot(idx, center) >= 1.0 / size
    }
}

/// A union of at most k ball centers with a common radius.
#[derive(Debug, Clone)]
pub struct KBallUnion {
    pub centers: Vec<Center>,
    pub radius: f64,
}

/// A slab: line plus half-width.
#[derive(Debug, Clone)]
pub struct Slab {
    pub line: Line,
    pub width: f64,
}

/// A separating half-space margin: unit normal and shape size (the reciprocal
/// of the origin-to-hyperplane distance).
#[derive(Debug, Clone)]
pub struct HalfSpaceMargin {
    pub normal: Vec<f64>,
    pub size: f64,
}

impl HalfSpaceMargin {
    pub fn new(normal: Vec<f64>, size: f64) -> Result<Self> {
        let norm: f64 = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("margin normal must be a unit vector"));
        }
        if !(size > 0.0) {
            return Err(Error::invalid("margin size must be positive"));
        }
        Ok(HalfSpaceMargin { normal, size })
    }

    /// Distance from the origin to the separating hyperplane.
    pub fn margin(&self) -> f64 {
        1.0 / self.size
    }
}

/// Randomized spot-check of the three family properties on one center.
/// Returns the number of violations over `trials` random triples.
pub fn check_shape_properties<F: ShapeFamily>(
    family: &F,
    center: &F::Center,
    points: &PointSet,
    size_scale: f64,
    trials: usize,
    rng: &mut Rng64,
) -> usize {
    use rand::Rng;
    let n = points.len();
    let mut violations = 0;
    for _ in 0..trials {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let s1 = rng.gen::<f64>() * size_scale;
        let s2 = s1 + rng.gen::<f64>() * size_scale;
        // P1: inclusion ordering by size.
        if family.contains(center, s1, points, i) && !family.contains(center, s2, points, i) {
            violations += 1;
        }
        // P2: ranking distance respects membership.
        if family.contains(center, s2, points, j)
            && family.rank_distance(center, points, i) <= family.rank_distance(center, points, j)
            && !family.contains(center, s2, points, i)
        {
            violations += 1;
        }
        // P3: touch size is tight.
        let touch = family.touch_size(center, points, i);
        if touch.is_finite() {
            if !family.contains(center, touch + touch.abs() * 1e-15 + 1e-300, points, i) {
                violations += 1;
            }
            let below = touch - 1e-9 - touch.abs() * 1e-12;
            if below > 0.0 && family.contains(center, below, points, i) {
                violations += 1;
            }
        }
    }
    violations
}
