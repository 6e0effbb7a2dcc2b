//! Synthetic instance families with planted ground truth.
//!
//! Planted optima are exact by construction: ball-shaped families pin the
//! radius with an antipodal anchor pair on the boundary, margin families pin
//! the margin with an anchor pair realizing the planted width, and the slab
//! family records the measured maximum inlier deviation as its width.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{PointSet, Rng64, RngStream};

/// Ground-truth shape center for a planted instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlantedCenter {
    Point {
        coords: Vec<f64>,
    },
    Points {
        coords: Vec<Vec<f64>>,
    },
    Line {
        point: Vec<f64>,
        direction: Vec<f64>,
    },
    Direction {
        coords: Vec<f64>,
    },
}

/// Known optimum for a planted instance: the inlier set and the planted
/// optimal size (radius / width / margin), plus the planted center.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedTruth {
    pub inlier_indices: Vec<usize>,
    pub optimum_size: f64,
    pub optimum_center: Option<PlantedCenter>,
}

/// Instance family selector with per-family parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    UniformBall {
        n: usize,
        d: usize,
        radius: f64,
    },
    Simplex {
        d: usize,
    },
    PlantedOutliers {
        n: usize,
        d: usize,
        gamma: f64,
        radius: f64,
        separation: f64,
    },
    TwoClassMargin {
        n1: usize,
        n2: usize,
        d: usize,
        margin: f64,
        spread: f64,
        gamma1: f64,
        gamma2: f64,
        separation: f64,
    },
    LineWithNoise {
        n: usize,
        d: usize,
        gamma: f64,
        length: f64,
        width: f64,
        separation: f64,
    },
    KClusters {
        k: usize,
        n: usize,
        d: usize,
        gamma: f64,
        radius: f64,
        spread: f64,
        separation: f64,
    },
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub points: PointSet,
    pub gamma: f64,
    pub truth: PlantedTruth,
    /// Class labels (+1/-1), present only for the two-class margin family.
    pub labels: Option<Vec<i32>>,
}

pub fn generate(family: &Family, stream: RngStream) -> Result<GeneratedInstance> {
    let mut rng = stream.rng();
    match family {
        Family::UniformBall { n, d, radius } => uniform_ball(*n, *d, *radius, &mut rng),
        Family::Simplex { d } => simplex(*d),
        Family::PlantedOutliers {
            n,
            d,
            gamma,
            radius,
            separation,
        } => planted_outliers(*n, *d, *gamma, *radius, *separation, &mut rng),
        Family::TwoClassMargin {
            n1,
            n2,
            d,
            margin,
            spread,
            gamma1,
            gamma2,
            separation,
        } => two_class_margin(
            *n1,
            *n2,
            *d,
            *margin,
            *spread,
            *gamma1,
            *gamma2,
            *separation,
            &mut rng,
        ),
        Family::LineWithNoise {
            n,
            d,
            gamma,
            length,
            width,
            separation,
        } => line_with_noise(*n, *d, *gamma, *length, *width, *separation, &mut rng),
        Family::KClusters {
            k,
            n,
            d,
            gamma,
            radius,
            spread,
            separation,
        } => k_clusters(*k, *n, *d, *gamma, *radius, *spread, *separation, &mut rng),
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma {gamma} must be in [0, 1)")));
    }
    Ok(())
}

fn outlier_count(n: usize, gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    let m = (gamma * n as f64).ceil() as usize;
    if m >= n {
        return Err(Error::invalid(format!(
            "n = {n} too small for outlier fraction {gamma}"
        )));
    }
    Ok(m)
}

fn gaussian_vec(d: usize, rng: &mut Rng64) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit_vec(d: usize, rng: &mut Rng64) -> Vec<f64> {
    loop {
        let mut v = gaussian_vec(d, rng);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

/// Uniform point in the ball of radius `r` around `c`.
fn ball_point(c: &[f64], r: f64, rng: &mut Rng64) -> Vec<f64> {
    let d = c.len();
    let dir = unit_vec(d, rng);
    let u: f64 = rng.gen::<f64>();
    let scale = r * u.powf(1.0 / d as f64);
    dir.iter().zip(c).map(|(x, cc)| cc + scale * x).collect()
}

fn shuffle_with_inliers(
    mut rows: Vec<Vec<f64>>,
    mut is_inlier: Vec<bool>,
    mut labels: Option<Vec<i32>>,
    rng: &mut Rng64,
) -> (Vec<Vec<f64>>, Vec<usize>, Option<Vec<i32>>) {
    let n = rows.len();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        rows.swap(i, j);
        is_inlier.swap(i, j);
        if let Some(l) = labels.as_mut() {
            l.swap(i, j);
        }
    }
    let inliers = is_inlier
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect();
    (rows, inliers, labels)
}

/// Uniform-in-ball instance; an antipodal anchor pair on the boundary pins
/// the optimum radius exactly.
fn uniform_ball(n: usize, d: usize, radius: f64, rng: &mut Rng64) -> Result<GeneratedInstance> {
    if n < 2 || d < 1 || radius <= 0.0 {
        return Err(Error::invalid(
            "uniform-ball needs n >= 2, d >= 1, radius > 0",
        ));
    }
    let center = vec![0.0; d];
    let axis = unit_vec(d, rng);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    rows.push(axis.iter().map(|x| radius * x).collect());
    rows.push(axis.iter().map(|x| -radius * x).collect());
    for _ in 2..n {
        rows.push(ball_point(&center, radius, rng));
    }
    let is_inlier = vec![true; n];
    let (rows, inliers, _) = shuffle_with_inliers(rows, is_inlier, None, rng);
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma: 0.0,
        truth: PlantedTruth {
            inlier_indices: inliers,
            optimum_size: radius,
            optimum_center: Some(PlantedCenter::Point { coords: center }),
        },
        labels: None,
    })
}

/// Regular d-dimensional simplex with unit side: d+1 points in R^d, pairwise
/// distance 1, circumradius sqrt(d / (2(d+1))) at the centroid.
fn simplex(d: usize) -> Result<GeneratedInstance> {
    if d < 1 {
        return Err(Error::invalid("simplex needs d >= 1"));
    }
    let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = inv_sqrt2;
        rows.push(v);
    }
    // Last vertex on the diagonal: solve d*a^2 - sqrt(2)*a - 1/2 = 0.
    let a = (std::f64::consts::SQRT_2 + (2.0 + 2.0 * d as f64).sqrt()) / (2.0 * d as f64);
    rows.push(vec![a; d]);
    let centroid: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / (d as f64 + 1.0))
        .collect();
    let radius = (d as f64 / (2.0 * (1.0 + d as f64))).sqrt();
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma: 0.0,
        truth: PlantedTruth {
            inlier_indices: (0..=d).collect(),
            optimum_size: radius,
            optimum_center: Some(PlantedCenter::Point { coords: centroid }),
        },
        labels: None,
    })
}

fn planted_outliers(
    n: usize,
    d: usize,
    gamma: f64,
    radius: f64,
    separation: f64,
    rng: &mut Rng64,
) -> Result<GeneratedInstance> {
    let m = outlier_count(n, gamma)?;
    if n - m < 2 || radius <= 0.0 || separation <= 1.0 {
        return Err(Error::invalid(
            "planted-outliers needs >= 2 inliers, radius > 0, separation > 1",
        ));
    }
    let center = vec![0.0; d];
    let axis = unit_vec(d, rng);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut is_inlier = Vec::with_capacity(n);
    rows.push(axis.iter().map(|x| radius * x).collect());
    rows.push(axis.iter().map(|x| -radius * x).collect());
    is_inlier.push(true);
    is_inlier.push(true);
    for _ in 2..(n - m) {
        rows.push(ball_point(&center, radius, rng));
        is_inlier.push(true);
    }
    for _ in 0..m {
        let dir = unit_vec(d, rng);
        let dist = radius * separation * (1.000001 + rng.gen::<f64>());
        rows.push(dir.iter().map(|x| dist * x).collect());
        is_inlier.push(false);
    }
    let (rows, inliers, _) = shuffle_with_inliers(rows, is_inlier, None, rng);
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma,
        truth: PlantedTruth {
            inlier_indices: inliers,
            optimum_size: radius,
            optimum_center: Some(PlantedCenter::Point { coords: center }),
        },
        labels: None,
    })
}

/// Two classes separated by a margin of exactly `margin` along a random unit
/// direction; an anchor pair at +/- margin/2 on the axis realizes the width.
/// Flipped far points (fractions gamma1/gamma2 per class) sit on the wrong
/// side at projection depth at least `separation * margin`.
#[allow(clippy::too_many_arguments)]
fn two_class_margin(
    n1: usize,
    n2: usize,
    d: usize,
    margin: f64,
    spread: f64,
    gamma1: f64,
    gamma2: f64,
    separation: f64,
    rng: &mut Rng64,
) -> Result<GeneratedInstance> {
    let m1 = outlier_count(n1, gamma1)?;
    let m2 = outlier_count(n2, gamma2)?;
    if n1 - m1 < 1 || n2 - m2 < 1 || margin <= 0.0 || spread < 0.0 || separation <= 0.0 {
        return Err(Error::invalid("two-class-margin parameters out of range"));
    }
    let u = unit_vec(d, rng);
    let half = margin / 2.0;
    let place = |proj: f64, perp_scale: f64, rng: &mut Rng64| -> Vec<f64> {
        let g = gaussian_vec(d, rng);
        let along: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
        (0..d)
            .map(|j| proj * u[j] + perp_scale * (g[j] - along * u[j]))
            .collect()
    };
    let mut rows = Vec::with_capacity(n1 + n2);
    let mut labels = Vec::with_capacity(n1 + n2);
    let mut is_inlier = Vec::with_capacity(n1 + n2);
    // Anchor pair with zero perpendicular components: hull distance == margin.
    rows.push(u.iter().map(|x| half * x).collect());
    labels.push(1);
    is_inlier.push(true);
    rows.push(u.iter().map(|x| -half * x).collect());
    labels.push(-1);
    is_inlier.push(true);
    for _ in 1..(n1 - m1) {
        let proj = half + rng.gen::<f64>() * spread;
        rows.push(place(proj, spread * 0.5, rng));
        labels.push(1);
        is_inlier.push(true);
    }
    for _ in 1..(n2 - m2) {
        let proj = -(half + rng.gen::<f64>() * spread);
        rows.push(place(proj, spread * 0.5, rng));
        labels.push(-1);
        is_inlier.push(true);
    }
    for _ in 0..m1 {
        let proj = -(half + separation * margin * (1.0 + rng.gen::<f64>()));
        rows.push(place(proj, spread * 0.5, rng));
        labels.push(1);
        is_inlier.push(false);
    }
    for _ in 0..m2 {
        let proj = half + separation * margin * (1.0 + rng.gen::<f64>());
        rows.push(place(proj, spread * 0.5, rng));
        labels.push(-1);
        is_inlier.push(false);
    }
    let n = rows.len();
    let gamma = (m1 + m2) as f64 / n as f64;
    let (rows, inliers, labels) = shuffle_with_inliers(rows, is_inlier, Some(labels), rng);
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma,
        truth: PlantedTruth {
            inlier_indices: inliers,
            optimum_size: margin,
            optimum_center: Some(PlantedCenter::Direction { coords: u }),
        },
        labels,
    })
}

fn line_with_noise(
    n: usize,
    d: usize,
    gamma: f64,
    length: f64,
    width: f64,
    separation: f64,
    rng: &mut Rng64,
) -> Result<GeneratedInstance> {
    if d < 2 {
        return Err(Error::invalid("line-with-noise needs d >= 2"));
    }
    let m = outlier_count(n, gamma)?;
    if n - m < 2 || length <= 0.0 || width < 0.0 || separation <= 1.0 {
        return Err(Error::invalid("line-with-noise parameters out of range"));
    }
    let dir = unit_vec(d, rng);
    let origin = vec![0.0; d];
    let perp = |rng: &mut Rng64| -> Vec<f64> {
        loop {
            let g = gaussian_vec(d, rng);
            let along: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let mut p: Vec<f64> = g.iter().zip(&dir).map(|(a, b)| a - along * b).collect();
            let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for x in &mut p {
                    *x /= norm;
                }
                return p;
            }
        }
    };
    let mut rows = Vec::with_capacity(n);
    let mut is_inlier = Vec::with_capacity(n);
    let mut max_dev: f64 = 0.0;
    for _ in 0..(n - m) {
        let t = (rng.gen::<f64>() - 0.5) * length;
        let dev = rng.gen::<f64>() * width;
        max_dev = max_dev.max(dev);
        let p = perp(rng);
        rows.push(
            (0..d)
                .map(|j| origin[j] + t * dir[j] + dev * p[j])
                .collect(),
        );
        is_inlier.push(true);
    }
    // Planted width is the measured maximum inlier deviation.
    let opt = max_dev;
    let out_base = if opt > 0.0 { opt } else { length * 0.05 };
    for _ in 0..m {
        let t = (rng.gen::<f64>() - 0.5) * length;
        let dev = out_base * separation * (1.000001 + rng.gen::<f64>());
        let p = perp(rng);
        rows.push(
            (0..d)
                .map(|j| origin[j] + t * dir[j] + dev * p[j])
                .collect(),
        );
        is_inlier.push(false);
    }
    let (rows, inliers, _) = shuffle_with_inliers(rows, is_inlier, None, rng);
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma,
        truth: PlantedTruth {
            inlier_indices: inliers,
            optimum_size: opt,
            optimum_center: Some(PlantedCenter::Line {
                point: origin,
                direction: dir,
            }),
        },
        labels: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn k_clusters(
    k: usize,
    n: usize,
    d: usize,
    gamma: f64,
    radius: f64,
    spread: f64,
    separation: f64,
    rng: &mut Rng64,
) -> Result<GeneratedInstance> {
    if k < 1 || radius <= 0.0 || spread <= 2.0 || separation <= 1.0 {
        return Err(Error::invalid(
            "k-clusters needs k >= 1, radius > 0, spread > 2, separation > 1",
        ));
    }
    let m = outlier_count(n, gamma)?;
    let inlier_n = n - m;
    if inlier_n < 2 * k {
        return Err(Error::invalid("too few inliers for k clusters"));
    }
    // Cluster centers at pairwise distance >= spread * radius.
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::invalid("could not place separated cluster centers"));
        }
        let dir = unit_vec(d, rng);
        let c: Vec<f64> = dir
            .iter()
            .map(|x| x * spread * radius * (1.0 + rng.gen::<f64>()))
            .collect();
        let ok = centers.iter().all(|e| {
            let dist: f64 = e
                .iter()
                .zip(&c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dist >= spread * radius
        });
        if ok {
            centers.push(c);
        }
    }
    let mut rows = Vec::with_capacity(n);
    let mut is_inlier = Vec::with_capacity(n);
    for (j, c) in centers.iter().enumerate() {
        // Anchor pair pins each cluster's radius.
        let axis = unit_vec(d, rng);
        rows.push(c.iter().zip(&axis).map(|(cc, x)| cc + radius * x).collect());
        rows.push(c.iter().zip(&axis).map(|(cc, x)| cc - radius * x).collect());
        is_inlier.push(true);
        is_inlier.push(true);
        let share = inlier_n / k + usize::from(j < inlier_n % k);
        for _ in 2..share {
            rows.push(ball_point(c, radius, rng));
            is_inlier.push(true);
        }
    }
    let far = (spread + separation + 2.0) * radius;
    let mut placed = 0;
    let mut attempts = 0;
    while placed < m {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::invalid("could not place separated outliers"));
        }
        let dir = unit_vec(d, rng);
        let p: Vec<f64> = dir
            .iter()
            .map(|x| x * far * (1.000001 + rng.gen::<f64>()))
            .collect();
        let min_dist = centers
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        if min_dist > separation * radius {
            rows.push(p);
            is_inlier.push(false);
            placed += 1;
        }
    }
    let (rows, inliers, _) = shuffle_with_inliers(rows, is_inlier, None, rng);
    Ok(GeneratedInstance {
        points: PointSet::from_rows(rows)?,
        gamma,
        truth: PlantedTruth {
            inlier_indices: inliers,
            optimum_size: radius,
            optimum_center: Some(PlantedCenter::Points { coords: centers }),
        },
        labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn simplex_pairwise_unit_distance() {
        let inst = generate(&Family::Simplex { d: 3 }, RngStream::from_seed(0)).unwrap();
        let p = &inst.points;
        assert_eq!(p.len(), 4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!((p.dist_rows(i, j) - 1.0).abs() < 1e-12, "pair {i},{j}");
            }
        }
        assert!((inst.truth.optimum_size - 0.6123724356957945).abs() < 1e-12);
        // Centroid is the circumcenter: equidistant at the planted radius.
        if let Some(PlantedCenter::Point { coords }) = &inst.truth.optimum_center {
            for i in 0..4 {
                let row = p.row_dense(i);
                assert!((dist(&row, coords) - inst.truth.optimum_size).abs() < 1e-12);
            }
        } else {
            panic!("simplex truth center missing");
        }
    }

    #[test]
    fn planted_outlier_counts_and_separation() {
        let fam = Family::PlantedOutliers {
            n: 100,
            d: 8,
            gamma: 0.05,
            radius: 1.0,
            separation: 10.0,
        };
        let inst = generate(&fam, RngStream::from_seed(7)).unwrap();
        assert_eq!(inst.truth.inlier_indices.len(), 95);
        let center = match inst.truth.optimum_center.as_ref().unwrap() {
            PlantedCenter::Point { coords } => coords.clone(),
            _ => panic!(),
        };
        let inliers: std::collections::HashSet<_> =
            inst.truth.inlier_indices.iter().copied().collect();
        for i in 0..inst.points.len() {
            let row = inst.points.row_dense(i);
            let dd = dist(&row, &center);
            if inliers.contains(&i) {
                assert!(dd <= 1.0 + 1e-12);
            } else {
                assert!(dd > 10.0, "outlier at distance {dd}");
            }
        }
    }

    #[test]
    fn uniform_ball_radius_pinned_by_anchors() {
        let fam = Family::UniformBall {
            n: 50,
            d: 6,
            radius: 2.0,
        };
        let inst = generate(&fam, RngStream::from_seed(3)).unwrap();
        let mut max_pair: f64 = 0.0;
        for i in 0..inst.points.len() {
            for j in (i + 1)..inst.points.len() {
                max_pair = max_pair.max(inst.points.dist_rows(i, j));
            }
        }
        assert!(
            (max_pair - 4.0).abs() < 1e-9,
            "anchored diameter, got {max_pair}"
        );
    }

    #[test]
    fn two_class_margin_geometry() {
        let fam = Family::TwoClassMargin {
            n1: 40,
            n2: 40,
            d: 5,
            margin: 2.0,
            spread: 1.0,
            gamma1: 0.1,
            gamma2: 0.1,
            separation: 5.0,
        };
        let inst = generate(&fam, RngStream::from_seed(11)).unwrap();
        let labels = inst.labels.as_ref().unwrap();
        let u = match inst.truth.optimum_center.as_ref().unwrap() {
            PlantedCenter::Direction { coords } => coords.clone(),
            _ => panic!(),
        };
        let inliers: std::collections::HashSet<_> =
            inst.truth.inlier_indices.iter().copied().collect();
        for (i, &label) in labels.iter().enumerate() {
            let proj: f64 = inst
                .points
                .row_dense(i)
                .iter()
                .zip(&u)
                .map(|(a, b)| a * b)
                .sum();
            if inliers.contains(&i) {
                if label == 1 {
                    assert!(proj >= 1.0 - 1e-12);
                } else {
                    assert!(proj <= -1.0 + 1e-12);
                }
            } else if label == 1 {
                assert!(proj <= -1.0 - 2.0 * 5.0 + 1e-9);
            } else {
                assert!(proj >= 1.0 + 2.0 * 5.0 - 1e-9);
            }
        }
    }

    #[test]
    fn line_family_deviations() {
        let fam = Family::LineWithNoise {
            n: 60,
            d: 4,
            gamma: 0.1,
            length: 10.0,
            width: 0.5,
            separation: 8.0,
        };
        let inst = generate(&fam, RngStream::from_seed(5)).unwrap();
        let (a, v) = match inst.truth.optimum_center.as_ref().unwrap() {
            PlantedCenter::Line { point, direction } => (point.clone(), direction.clone()),
            _ => panic!(),
        };
        let w = inst.truth.optimum_size;
        assert!(w <= 0.5 + 1e-12);
        let inliers: std::collections::HashSet<_> =
            inst.truth.inlier_indices.iter().copied().collect();
        for i in 0..inst.points.len() {
            let row = inst.points.row_dense(i);
            let rel: Vec<f64> = row.iter().zip(&a).map(|(x, y)| x - y).collect();
            let along: f64 = rel.iter().zip(&v).map(|(x, y)| x * y).sum();
            let dev = rel
                .iter()
                .zip(&v)
                .map(|(x, y)| x - along * y)
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            if inliers.contains(&i) {
                assert!(dev <= w + 1e-12);
            } else {
                assert!(dev > 8.0 * w, "outlier deviation {dev} vs width {w}");
            }
        }
    }

    #[test]
    fn k_clusters_separation_and_anchors() {
        let fam = Family::KClusters {
            k: 3,
            n: 120,
            d: 8,
            gamma: 0.1,
            radius: 1.0,
            spread: 8.0,
            separation: 6.0,
        };
        let inst = generate(&fam, RngStream::from_seed(21)).unwrap();
        let centers = match inst.truth.optimum_center.as_ref().unwrap() {
            PlantedCenter::Points { coords } => coords.clone(),
            _ => panic!(),
        };
        assert_eq!(centers.len(), 3);
        let inliers: std::collections::HashSet<_> =
            inst.truth.inlier_indices.iter().copied().collect();
        for i in 0..inst.points.len() {
            let row = inst.points.row_dense(i);
            let min_d = centers
                .iter()
                .map(|c| dist(&row, c))
                .fold(f64::INFINITY, f64::min);
            if inliers.contains(&i) {
                assert!(min_d <= 1.0 + 1e-12);
            } else {
                assert!(min_d > 6.0, "outlier at distance {min_d}");
            }
        }
    }

    #[test]
    fn uniform_ball_truth_matches_oracle() {
        let fam = Family::UniformBall {
            n: 300,
            d: 3,
            radius: 2.0,
        };
        let inst = generate(&fam, RngStream::from_seed(22)).unwrap();
        let oracle = crate::oracle::exact_meb(&inst.points).unwrap();
        assert!((oracle.optimum_size - inst.truth.optimum_size).abs() < 1e-9);
        // Sanity bound: optimum within [max pairwise / 2, generation radius].
        let mut diam: f64 = 0.0;
        for i in 0..inst.points.len() {
            for j in (i + 1)..inst.points.len() {
                diam = diam.max(inst.points.dist_rows(i, j));
            }
        }
        assert!(oracle.optimum_size <= 2.0 + 1e-9);
        assert!(oracle.optimum_size >= diam / 2.0 - 1e-9);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(generate(
            &Family::PlantedOutliers {
                n: 3,
                d: 2,
                gamma: 0.9,
                radius: 1.0,
                separation: 10.0
            },
            RngStream::from_seed(0)
        )
        .is_err());
        assert!(generate(
            &Family::UniformBall {
                n: 10,
                d: 2,
                radius: -1.0
            },
            RngStream::from_seed(0)
        )
        .is_err());
    }
}
