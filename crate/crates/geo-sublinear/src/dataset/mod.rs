//! Point storage, seeded sampling, ingestion, and synthetic instance generation.

mod generate;
mod io;

pub use generate::{generate, Family, GeneratedInstance, PlantedCenter, PlantedTruth};
pub use io::{load_dense, load_sparse, write_csv, write_libsvm};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::RunStats;

/// Row storage for a point set. Dense rows are a flat row-major buffer;
/// sparse rows hold strictly increasing `(index, value)` pairs.
#[derive(Debug, Clone)]
pub enum Rows {
    Dense(Vec<f64>),
    Sparse(Vec<Vec<(u32, f64)>>),
}

/// An immutable n x d collection of points with cached squared norms.
///
/// Distances against sparse rows are evaluated through
/// `|a-b|^2 = |a|^2 + |b|^2 - 2<a,b>` so a scan touches only non-zero entries.
#[derive(Debug, Clone)]
pub struct PointSet {
    n: usize,
    d: usize,
    rows: Rows,
    norms_sq: Vec<f64>,
    nnz: usize,
}

/// Sparse inputs with dimension at most this bound are densified on load;
/// the distance kernels dominate runtime and dense rows scan faster.
pub const DENSIFY_DIM: usize = 64;

impl PointSet {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::invalid("points must have dimension >= 1"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::invalid(format!(
                "row {i} has {} coordinates, expected {d}",
                r.len()
            )));
        }
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * d);
        for r in &rows {
            flat.extend_from_slice(r);
        }
        Ok(Self::from_flat(flat, n, d))
    }

    pub fn from_flat(flat: Vec<f64>, n: usize, d: usize) -> Self {
        assert_eq!(flat.len(), n * d);
        let norms_sq = (0..n)
            .map(|i| flat[i * d..(i + 1) * d].iter().map(|x| x * x).sum())
            .collect();
        PointSet {
            n,
            d,
            rows: Rows::Dense(flat),
            norms_sq,
            nnz: n * d,
        }
    }

    pub fn from_sparse(rows: Vec<Vec<(u32, f64)>>, d: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        if d == 0 {
            return Err(Error::invalid("points must have dimension >= 1"));
        }
        for (i, r) in rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            for &(j, _) in r {
                if j as usize >= d {
                    return Err(Error::invalid(format!(
                        "row {i}: index {j} out of range for dimension {d}"
                    )));
                }
                if let Some(p) = prev {
                    if j <= p {
                        return Err(Error::invalid(format!(
                            "row {i}: sparse indices must be strictly increasing"
                        )));
                    }
                }
                prev = Some(j);
            }
        }
        if d <= DENSIFY_DIM {
            let n = rows.len();
            let mut flat = vec![0.0; n * d];
            for (i, r) in rows.iter().enumerate() {
                for &(j, v) in r {
                    flat[i * d + j as usize] = v;
                }
            }
            return Ok(Self::from_flat(flat, n, d));
        }
        let n = rows.len();
        let nnz = rows.iter().map(|r| r.len()).sum();
        let norms_sq = rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v * v).sum())
            .collect();
        Ok(PointSet {
            n,
            d,
            rows: Rows::Sparse(rows),
            norms_sq,
            nnz,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.rows, Rows::Dense(_))
    }

    /// Squared Euclidean norm of point `i`.
    pub fn norm_sq(&self, i: usize) -> f64 {
        self.norms_sq[i]
    }

    /// Dense view of row `i`; panics on sparse storage.
    pub fn row(&self, i: usize) -> &[f64] {
        match &self.rows {
            Rows::Dense(flat) => &flat[i * self.d..(i + 1) * self.d],
            Rows::Sparse(_) => panic!("row() called on sparse storage"),
        }
    }

    /// Materializes row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match &self.rows {
            Rows::Dense(_) => self.row(i).to_vec(),
            Rows::Sparse(rows) => {
                let mut out = vec![0.0; self.d];
                for &(j, v) in &rows[i] {
                    out[j as usize] = v;
                }
                out
            }
        }
    }

    /// Inner product `<p_i, x>` for a dense vector `x` of length `d`.
    pub fn dot(&self, i: usize, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        match &self.rows {
            Rows::Dense(flat) => flat[i * self.d..(i + 1) * self.d]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum(),
            Rows::Sparse(rows) => rows[i].iter().map(|&(j, v)| v * x[j as usize]).sum(),
        }
    }

    /// Inner product `<p_i, p_j>` between two stored points.
    pub fn dot_rows(&self, i: usize, j: usize) -> f64 {
        match &self.rows {
            Rows::Dense(flat) => {
                let a = &flat[i * self.d..(i + 1) * self.d];
                let b = &flat[j * self.d..(j + 1) * self.d];
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            Rows::Sparse(rows) => {
                let (a, b) = (&rows[i], &rows[j]);
                let (mut ia, mut ib, mut acc) = (0, 0, 0.0);
                while ia < a.len() && ib < b.len() {
                    match a[ia].0.cmp(&b[ib].0) {
                        std::cmp::Ordering::Less => ia += 1,
                        std::cmp::Ordering::Greater => ib += 1,
                        std::cmp::Ordering::Equal => {
                            acc += a[ia].1 * b[ib].1;
                            ia += 1;
                            ib += 1;
                        }
                    }
                }
                acc
            }
        }
    }

    /// Squared Euclidean distance between point `i` and a dense vector `x`
    /// with known squared norm. Clamped at zero.
    pub fn dist_sq_to(&self, i: usize, x: &[f64], x_norm_sq: f64) -> f64 {
        (self.norms_sq[i] + x_norm_sq - 2.0 * self.dot(i, x)).max(0.0)
    }

    /// Euclidean distance between two stored points.
    pub fn dist_rows(&self, i: usize, j: usize) -> f64 {
        (self.norms_sq[i] + self.norms_sq[j] - 2.0 * self.dot_rows(i, j))
            .max(0.0)
            .sqrt()
    }

    /// Accumulates `p_i` into `acc` with weight `w` (dense accumulator).
    pub fn axpy(&self, i: usize, w: f64, acc: &mut [f64]) {
        match &self.rows {
            Rows::Dense(flat) => {
                for (a, &v) in acc.iter_mut().zip(&flat[i * self.d..(i + 1) * self.d]) {
                    *a += w * v;
                }
            }
            Rows::Sparse(rows) => {
                for &(j, v) in &rows[i] {
                    acc[j as usize] += w * v;
                }
            }
        }
    }
}

/// A reproducible RNG handle: `(seed, stream_id)` fully determines the draw
/// sequence on every platform. Streams are single-owner; parallel work derives
/// child streams instead of sharing one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

pub type Rng64 = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn from_seed(seed: u64) -> Self {
        RngStream { seed, stream_id: 0 }
    }

    /// Child stream `k`; mixing keeps distinct (stream, k) pairs from colliding.
    pub fn child(&self, k: u64) -> Self {
        RngStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(k.wrapping_add(1))),
        }
    }

    pub fn rng(&self) -> Rng64 {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }
}

/// Draws `m` indices i.i.d. uniform over `[0, n)` with replacement.
pub fn uniform_sample(points: &PointSet, m: usize, stream: RngStream) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut rng = stream.rng();
    Ok(sample_indices(
        points.len(),
        m,
        &mut rng,
        &mut RunStats::default(),
    ))
}

/// Internal sampling primitive shared by the solvers; counts drawn points.
pub(crate) fn sample_indices(
    n: usize,
    m: usize,
    rng: &mut Rng64,
    stats: &mut RunStats,
) -> Vec<usize> {
    stats.points_sampled += m as u64;
    (0..m).map(|_| rng.gen_range(0..n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_construction_caches_norms() {
        let p = PointSet::from_rows(vec![vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.norm_sq(0), 25.0);
        assert_eq!(p.dist_rows(0, 1), 5.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(PointSet::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn sparse_kept_sparse_above_densify_bound() {
        let d = DENSIFY_DIM + 10;
        let rows = vec![vec![(0u32, 1.0), (70u32, 2.0)], vec![(5u32, -1.0)]];
        let p = PointSet::from_sparse(rows, d).unwrap();
        assert!(!p.is_dense());
        assert_eq!(p.nnz(), 3);
        assert_eq!(p.norm_sq(0), 5.0);
        let x = p.row_dense(0);
        assert_eq!(x[70], 2.0);
    }

    #[test]
    fn sparse_densified_below_bound() {
        let p = PointSet::from_sparse(vec![vec![(0u32, 1.0)], vec![(1u32, 1.0)]], 2).unwrap();
        assert!(p.is_dense());
        assert!((p.dist_rows(0, 1) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn sparse_indices_must_increase() {
        assert!(PointSet::from_sparse(vec![vec![(1u32, 1.0), (1u32, 2.0)]], 4).is_err());
        assert!(PointSet::from_sparse(vec![vec![(2u32, 1.0), (0u32, 2.0)]], 4).is_err());
    }

    #[test]
    fn uniform_sample_deterministic_and_single_point() {
        let p = PointSet::from_rows(vec![vec![0.0]]).unwrap();
        let s = uniform_sample(&p, 5, RngStream::from_seed(9)).unwrap();
        assert_eq!(s, vec![0, 0, 0, 0, 0]);

        let q = PointSet::from_rows((0..10).map(|i| vec![i as f64]).collect()).unwrap();
        let a = uniform_sample(&q, 100, RngStream::new(42, 7)).unwrap();
        let b = uniform_sample(&q, 100, RngStream::new(42, 7)).unwrap();
        assert_eq!(a, b);
        assert!(uniform_sample(&q, 0, RngStream::from_seed(1)).is_err());
    }

    #[test]
    fn uniform_sample_chi_square() {
        // Frequencies over 1e5 draws from 10 indices; chi-square with 9 degrees
        // of freedom at significance 0.001 has critical value 27.877164871.
        let q = PointSet::from_rows((0..10).map(|i| vec![i as f64]).collect()).unwrap();
        let m = 100_000usize;
        let s = uniform_sample(&q, m, RngStream::new(2024, 3)).unwrap();
        let mut counts = [0usize; 10];
        for i in s {
            counts[i] += 1;
        }
        let expected = m as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum();
        assert!(chi2 < 27.877164871256568, "chi2 = {chi2}");
        // Each frequency within 3 sigma of the binomial mean.
        let sigma = (m as f64 * 0.1 * 0.9).sqrt();
        for &c in &counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn child_streams_differ() {
        let base = RngStream::new(1, 0);
        let mut a = base.child(0).rng();
        let mut b = base.child(1).rng();
        let xa: u64 = a.gen();
        let xb: u64 = b.gen();
        assert_ne!(xa, xb);
    }
}
