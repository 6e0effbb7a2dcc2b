//! Minimum enclosing ball types: centers (explicit or convex-combination),
//! balls, kernels, and the greedy core-set state.

mod coreset;

pub use coreset::{approx_center, badoiu_clarkson, eval_distance, farthest_point, SupportSolver};

use serde::{Deserialize, Serialize};

use crate::dataset::PointSet;
use crate::error::{Error, Result};

/// Kernel used for feature-space distances. `Linear` is plain Euclidean
/// geometry; `Rbf` maps points through the Gaussian kernel, in which case
/// centers are only representable as convex combinations of input points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Kernel {
    Linear,
    Rbf { bandwidth: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        if let Kernel::Rbf { bandwidth } = self {
            if !(*bandwidth > 0.0) {
                return Err(Error::invalid("rbf bandwidth must be positive"));
            }
        }
        Ok(())
    }

    /// Inner product `<phi(p_i), phi(p_j)>`.
    pub fn eval(&self, points: &PointSet, i: usize, j: usize) -> f64 {
        match self {
            Kernel::Linear => points.dot_rows(i, j),
            Kernel::Rbf { bandwidth } => {
                let d2 =
                    (points.norm_sq(i) + points.norm_sq(j) - 2.0 * points.dot_rows(i, j)).max(0.0);
                (-d2 / (2.0 * bandwidth * bandwidth)).exp()
            }
        }
    }

    /// `<phi(p_i), phi(p_i)>`.
    pub fn eval_self(&self, points: &PointSet, i: usize) -> f64 {
        match self {
            Kernel::Linear => points.norm_sq(i),
            Kernel::Rbf { .. } => 1.0,
        }
    }
}

/// A ball center: either explicit coordinates or a convex combination of
/// support points of a `PointSet` (the only representation available under
/// non-linear kernels).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "kebab-case")]
pub enum Center {
    Explicit { coords: Vec<f64> },
    Combination { support: Vec<(usize, f64)> },
}

impl Center {
    pub fn explicit(coords: Vec<f64>) -> Self {
        Center::Explicit { coords }
    }

    pub fn combination(support: Vec<(usize, f64)>) -> Self {
        Center::Combination { support }
    }

    pub fn point_of(i: usize) -> Self {
        Center::Combination {
            support: vec![(i, 1.0)],
        }
    }

    /// Checks combination invariants: valid indices, non-negative weights
    /// summing to 1 within 1e-12.
    pub fn validate(&self, points: &PointSet) -> Result<()> {
        match self {
            Center::Explicit { coords } => {
                if coords.len() != points.dim() {
                    return Err(Error::invalid("explicit center has wrong dimension"));
                }
            }
            Center::Combination { support } => {
                if support.is_empty() {
                    return Err(Error::invalid("empty combination center"));
                }
                let mut sum = 0.0;
                for &(i, w) in support {
                    if i >= points.len() {
                        return Err(Error::invalid(format!("support index {i} out of range")));
                    }
                    if w < 0.0 {
                        return Err(Error::invalid("combination weight is negative"));
                    }
                    sum += w;
                }
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "combination weights sum to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A ball with non-negative radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ball {
    pub center: Center,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Center, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Ball { center, radius }
    }

    /// Number of points within `radius + tol` of the center.
    pub fn coverage(&self, points: &PointSet, kernel: Kernel, tol: f64) -> Result<usize> {
        let prep = PreparedCenter::new(points, &self.center, kernel)?;
        Ok((0..points.len())
            .filter(|&i| prep.dist(points, i) <= self.radius + tol)
            .count())
    }
}

/// Working state of the greedy core-set construction: the support set `T`,
/// its approximate center, the iteration counter, and the parameters
/// `(epsilon, s, xi)` with `xi = s * epsilon / (1 + epsilon)`.
#[derive(Debug, Clone)]
pub struct CoreSetState {
    pub t: Vec<usize>,
    pub center: Center,
    pub iteration: usize,
    pub epsilon: f64,
    pub s: f64,
    pub xi: f64,
}

impl CoreSetState {
    /// Size bound `ceil(2 / ((1-s) epsilon)) + 1` (the initial point plus the
    /// bounded number of greedy additions).
    pub fn size_bound(epsilon: f64, s: f64) -> usize {
        ceil_tol(2.0 / ((1.0 - s) * epsilon)) + 1
    }
}

/// Ceiling with a 1e-9 guard so values that are integers up to floating-point
/// noise do not round up an extra step.
pub fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// A center pre-processed for fast repeated distance evaluation: explicit
/// coordinates under the linear kernel, or support weights plus the cached
/// self inner product under RBF.
#[derive(Debug, Clone)]
pub struct PreparedCenter {
    explicit: Option<(Vec<f64>, f64)>,
    support: Vec<(usize, f64)>,
    self_term: f64,
    kernel: Kernel,
}

impl PreparedCenter {
    pub fn new(points: &PointSet, center: &Center, kernel: Kernel) -> Result<Self> {
        kernel.validate()?;
        center.validate(points)?;
        match (center, kernel) {
            (Center::Explicit { coords }, Kernel::Linear) => {
                let norm_sq = coords.iter().map(|x| x * x).sum();
                Ok(PreparedCenter {
                    explicit: Some((coords.clone(), norm_sq)),
                    support: Vec::new(),
                    self_term: 0.0,
                    kernel,
                })
            }
            (Center::Explicit { .. }, Kernel::Rbf { .. }) => Err(Error::invalid(
                "explicit centers are unrepresentable in RBF feature space; use a combination",
            )),
            (Center::Combination { support }, Kernel::Linear) => {
                let mut coords = vec![0.0; points.dim()];
                for &(i, w) in support {
                    points.axpy(i, w, &mut coords);
                }
                let norm_sq = coords.iter().map(|x| x * x).sum();
                Ok(PreparedCenter {
                    explicit: Some((coords, norm_sq)),
                    support: Vec::new(),
                    self_term: 0.0,
                    kernel,
                })
            }
            (Center::Combination { support }, Kernel::Rbf { .. }) => {
                let mut self_term = 0.0;
                for &(i, wi) in support {
                    for &(j, wj) in support {
                        self_term += wi * wj * kernel.eval(points, i, j);
                    }
                }
                Ok(PreparedCenter {
                    explicit: None,
                    support: support.clone(),
                    self_term,
                    kernel,
                })
            }
        }
    }

    /// Feature-space distance from point `i` to the center.
    pub fn dist(&self, points: &PointSet, i: usize) -> f64 {
        self.dist_sq(points, i).sqrt()
    }

    pub fn dist_sq(&self, points: &PointSet, i: usize) -> f64 {
        if let Some((coords, norm_sq)) = &self.explicit {
            points.dist_sq_to(i, coords, *norm_sq)
        } else {
            let cross: f64 = self
                .support
                .iter()
                .map(|&(j, w)| w * self.kernel.eval(points, i, j))
                .sum();
            (self.kernel.eval_self(points, i) - 2.0 * cross + self.self_term).max(0.0)
        }
    }

    /// Explicit coordinates when the kernel admits them.
    pub fn coords(&self) -> Option<&[f64]> {
        self.explicit.as_ref().map(|(c, _)| c.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_invariants_enforced() {
        let p = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(Center::combination(vec![(0, 0.5), (1, 0.5)])
            .validate(&p)
            .is_ok());
        assert!(Center::combination(vec![(0, 0.7), (1, 0.5)])
            .validate(&p)
            .is_err());
        assert!(Center::combination(vec![(0, 1.5), (1, -0.5)])
            .validate(&p)
            .is_err());
        assert!(Center::combination(vec![(7, 1.0)]).validate(&p).is_err());
    }

    #[test]
    fn explicit_rbf_rejected() {
        let p = PointSet::from_rows(vec![vec![0.0]]).unwrap();
        let c = Center::explicit(vec![0.0]);
        assert!(PreparedCenter::new(&p, &c, Kernel::Rbf { bandwidth: 1.0 }).is_err());
    }

    #[test]
    fn linear_combination_matches_explicit_expansion() {
        let p = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let comb = Center::combination(vec![(0, 0.5), (1, 0.5)]);
        let prep = PreparedCenter::new(&p, &comb, Kernel::Linear).unwrap();
        assert!((prep.dist(&p, 2) - 1.0).abs() < 1e-12);
        let exp = Center::explicit(vec![1.0, 0.0]);
        let prep2 = PreparedCenter::new(&p, &exp, Kernel::Linear).unwrap();
        for i in 0..3 {
            assert!((prep.dist(&p, i) - prep2.dist(&p, i)).abs() < 1e-9);
        }
    }

    #[test]
    fn rbf_point_center_distance_zero_to_itself() {
        let p = PointSet::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let c = Center::point_of(0);
        let prep = PreparedCenter::new(&p, &c, Kernel::Rbf { bandwidth: 1.0 }).unwrap();
        assert!(prep.dist(&p, 0).abs() < 1e-12);
        assert!(prep.dist(&p, 1) > 0.0);
    }
}
