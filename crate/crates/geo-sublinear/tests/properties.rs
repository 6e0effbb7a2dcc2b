//! Property tests for the storage and ranking invariants.

use geo_sublinear::dataset::PointSet;
use geo_sublinear::meb::{Center, Kernel, PreparedCenter};
use geo_sublinear::mex::{generalized_rank, BallFamily, Line};
use geo_sublinear::RunStats;
use proptest::prelude::*;

fn finite_coord() -> impl Strategy<Value = f64> {
    (-50.0..50.0f64).prop_filter("finite", |x| x.is_finite())
}

fn point_rows(n: std::ops::Range<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(finite_coord(), d), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Sparse and dense storage agree on norms and pairwise distances.
    #[test]
    fn sparse_dense_distance_agreement(rows in point_rows(2..12, 80)) {
        // d = 80 stays above the densify bound, so this path is sparse.
        let sparse_rows: Vec<Vec<(u32, f64)>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() > 25.0) // sparsify
                    .map(|(j, v)| (j as u32, *v))
                    .collect()
            })
            .collect();
        let dense_rows: Vec<Vec<f64>> = sparse_rows
            .iter()
            .map(|r| {
                let mut out = vec![0.0; 80];
                for &(j, v) in r {
                    out[j as usize] = v;
                }
                out
            })
            .collect();
        let sparse = PointSet::from_sparse(sparse_rows, 80).unwrap();
        let dense = PointSet::from_rows(dense_rows).unwrap();
        prop_assert!(!sparse.is_dense());
        for i in 0..sparse.len() {
            prop_assert!((sparse.norm_sq(i) - dense.norm_sq(i)).abs() < 1e-9);
            for j in 0..sparse.len() {
                prop_assert!((sparse.dist_rows(i, j) - dense.dist_rows(i, j)).abs() < 1e-9);
            }
        }
    }

    /// A convex-combination center evaluates exactly like its explicit
    /// expansion under the linear kernel.
    #[test]
    fn combination_matches_explicit(rows in point_rows(2..10, 4), raw in prop::collection::vec(0.01..1.0f64, 10)) {
        let points = PointSet::from_rows(rows).unwrap();
        let n = points.len();
        let total: f64 = raw[..n].iter().sum();
        let support: Vec<(usize, f64)> = raw[..n]
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w / total))
            .collect();
        let comb = Center::combination(support.clone());
        let mut coords = vec![0.0; 4];
        for &(i, w) in &support {
            for (c, v) in coords.iter_mut().zip(points.row(i)) {
                *c += w * v;
            }
        }
        let explicit = Center::explicit(coords);
        let pc = PreparedCenter::new(&points, &comb, Kernel::Linear).unwrap();
        let pe = PreparedCenter::new(&points, &explicit, Kernel::Linear).unwrap();
        for i in 0..n {
            prop_assert!((pc.dist(&points, i) - pe.dist(&points, i)).abs() < 1e-9);
        }
    }

    /// The rank primitive returns exactly the t farthest points and the
    /// (t+1)-th largest distance, matching a full sort.
    #[test]
    fn rank_matches_sort_oracle(rows in point_rows(3..40, 3), t_frac in 0.05..0.95f64) {
        let points = PointSet::from_rows(rows).unwrap();
        let n = points.len();
        let t = ((t_frac * n as f64) as usize).clamp(1, n - 1);
        let center = PreparedCenter::new(
            &points,
            &Center::explicit(vec![0.0; 3]),
            Kernel::Linear,
        )
        .unwrap();
        let family = BallFamily { kernel: Kernel::Linear };
        let (q, l) = generalized_rank(&family, &center, &points, t, &mut RunStats::default()).unwrap();
        let mut keyed: Vec<(f64, usize)> = (0..n).map(|i| (center.dist(&points, i), i)).collect();
        keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        let mut got = q;
        got.sort_unstable();
        let mut want: Vec<usize> = keyed[..t].iter().map(|&(_, i)| i).collect();
        want.sort_unstable();
        prop_assert_eq!(got, want);
        prop_assert!((l - keyed[t].0).abs() < 1e-12);
    }

    /// Point-to-line distances are invariant under sliding the anchor along
    /// the direction and are zero for points on the line.
    #[test]
    fn line_distance_invariants(
        anchor in prop::collection::vec(finite_coord(), 4),
        shift in -20.0..20.0f64,
        along in -30.0..30.0f64,
    ) {
        let mut dir = vec![0.5f64, -0.5, 0.5, 0.5];
        let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut dir {
            *x /= norm;
        }
        let line = Line::new(anchor.clone(), dir.clone()).unwrap();
        let slid_anchor: Vec<f64> = anchor.iter().zip(&dir).map(|(a, v)| a + shift * v).collect();
        let slid = Line::new(slid_anchor, dir.clone()).unwrap();
        let on_line: Vec<f64> = anchor.iter().zip(&dir).map(|(a, v)| a + along * v).collect();
        prop_assert!(line.dist_vec(&on_line) < 1e-9);
        let probe: Vec<f64> = anchor.iter().enumerate().map(|(j, a)| a + (j as f64) - 1.5).collect();
        prop_assert!((line.dist_vec(&probe) - slid.dist_vec(&probe)).abs() < 1e-8);
    }
}
