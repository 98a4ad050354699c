use proptest::prelude::*;
use radon_center::depth::tukey_depth_exact;
use radon_center::rng::seeded_rng;
use radon_center::{halfspace_count, radon_point, Halfspace, Point, PointSet};
use rand::Rng;

fn random_points(rng: &mut impl Rng, k: usize, d: usize) -> Vec<Point> {
    (0..k).map(|_| Point::new((0..d).map(|_| rng.random_range(-10.0..10.0)).collect()).unwrap()).collect()
}

/// Least-squares affine weights of `x` with respect to `pts` (sum fixed to 1),
/// via the normal equations; returns the weights and the reconstruction residual.
#[allow(clippy::needless_range_loop)]
fn barycentric(pts: &[&[f64]], x: &[f64]) -> (Vec<f64>, f64) {
    let k = pts.len();
    let d = x.len();
    let row = |r: usize, j: usize| if r < d { pts[j][r] } else { 1.0 };
    let rhs = |r: usize| if r < d { x[r] } else { 1.0 };
    let mut m = vec![vec![0.0; k + 1]; k];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = (0..=d).map(|r| row(r, a) * row(r, b)).sum();
        }
        m[a][k] = (0..=d).map(|r| row(r, a) * rhs(r)).sum();
    }
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for r in 0..k {
            if r != c && m[c][c] != 0.0 {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    let w: Vec<f64> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    let residual = (0..d).map(|r| ((0..k).map(|j| w[j] * pts[j][r]).sum::<f64>() - x[r]).abs()).fold(0.0, f64::max);
    (w, residual)
}

fn check_partition(pts: &[Point]) {
    let rp = radon_point(pts).unwrap();
    let d = pts[0].dim();
    assert!(!rp.part1.is_empty() && !rp.part2.is_empty());
    let mut all: Vec<usize> = rp.part1.iter().chain(&rp.part2).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..d + 2).collect::<Vec<_>>());
    let scale = 1.0 + pts.iter().flat_map(|p| p.coords()).fold(0.0_f64, |m, c| m.max(c.abs()));
    for part in [&rp.part1, &rp.part2] {
        let refs: Vec<&[f64]> = part.iter().map(|&i| pts[i].coords()).collect();
        let (w, res) = barycentric(&refs, rp.point.coords());
        assert!(w.iter().all(|&x| x >= -1e-9), "weights {w:?}");
        assert!(res <= 1e-8 * scale, "residual {res}");
    }
}

#[test]
fn unit_square() {
    let pts: Vec<Point> =
        [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].iter().map(|c| Point::new(c.to_vec()).unwrap()).collect();
    let rp = radon_point(&pts).unwrap();
    assert!((rp.point.coords()[0] - 0.5).abs() < 1e-12 && (rp.point.coords()[1] - 0.5).abs() < 1e-12);
    let mut parts = [rp.part1.clone(), rp.part2.clone()];
    parts.sort();
    assert_eq!(parts, [vec![0, 2], vec![1, 3]]);
}

#[test]
fn interior_point() {
    let pts: Vec<Point> =
        [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [1.0, 1.0]].iter().map(|c| Point::new(c.to_vec()).unwrap()).collect();
    let rp = radon_point(&pts).unwrap();
    assert!((rp.point.coords()[0] - 1.0).abs() < 1e-12 && (rp.point.coords()[1] - 1.0).abs() < 1e-12);
    let mut parts = [rp.part1.clone(), rp.part2.clone()];
    parts.sort_by_key(Vec::len);
    assert_eq!(parts[0], vec![3]);
}

#[test]
fn seeded_planar_tuples_pass_barycentric_oracle() {
    let mut rng = seeded_rng(10);
    for _ in 0..10 {
        check_partition(&random_points(&mut rng, 4, 2));
    }
}

/// Points of `pts` in the closed halfspace `<u, x - q> >= 0`, counting points
/// within `tol` of the boundary as inside.
fn tolerant_count(pts: &[Point], q: &[f64], u: &[f64], tol: f64) -> usize {
    let un = u.iter().map(|c| c * c).sum::<f64>().sqrt();
    pts.iter()
        .filter(|p| p.coords().iter().zip(q).zip(u).map(|((a, b), c)| (a - b) * c).sum::<f64>() >= -tol * un)
        .count()
}

// The Radon point is computed in floating point, so it may sit a rounding
// error away from the faces it lies on; its depth is checked at 1e-9 scale.
#[test]
fn radon_point_has_depth_two() {
    let mut rng = seeded_rng(11);
    for d in 2..=3 {
        for _ in 0..200 {
            let pts = random_points(&mut rng, d + 2, d);
            let q = radon_point(&pts).unwrap().point;
            let q = q.coords();
            let tol = 1e-9 * 10.0;
            let set = PointSet::from_points(&pts).unwrap();
            let exact = tukey_depth_exact(&set, q).unwrap();
            assert!(tolerant_count(&pts, q, &exact.witness.normal, tol) >= 2);
            for _ in 0..2000 {
                let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                assert!(tolerant_count(&pts, q, &u, tol) >= 2);
            }
        }
    }
}

#[test]
fn halfspace_with_one_point_excludes_radon_point() {
    let mut rng = seeded_rng(12);
    for d in 2..=6 {
        for _ in 0..100 {
            let pts = random_points(&mut rng, d + 2, d);
            let rp = radon_point(&pts).unwrap();
            let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut proj: Vec<(f64, usize)> =
                pts.iter().enumerate().map(|(i, p)| (p.coords().iter().zip(&u).map(|(a, b)| a * b).sum(), i)).collect();
            proj.sort_by(|a, b| a.0.total_cmp(&b.0));
            let top = proj[d + 1].0;
            let next = proj[d].0;
            if top - next < 1e-6 {
                continue;
            }
            let h = Halfspace::new(u, 0.5 * (top + next)).unwrap();
            assert_eq!(pts.iter().filter(|p| h.contains(p.coords())).count(), 1);
            assert!(h.excludes(rp.point.coords()));
        }
    }
}

proptest! {
    #[test]
    fn partitions_are_valid(d in 1usize..=6, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        check_partition(&random_points(&mut rng, d + 2, d));
    }

    #[test]
    fn permutation_keeps_point(d in 1usize..=5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let pts = random_points(&mut rng, d + 2, d);
        let a = radon_point(&pts).unwrap().point;
        let mut rev = pts.clone();
        rev.reverse();
        let b = radon_point(&rev).unwrap().point;
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn halfspace_count_matches_naive(seed in any::<u64>(), n in 1usize..60, d in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let pts = random_points(&mut rng, n, d);
        let set = PointSet::from_points(&pts).unwrap();
        let normal: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        prop_assume!(normal.iter().any(|c| *c != 0.0));
        let offset = rng.random_range(-5.0..5.0);
        let h = Halfspace::new(normal.clone(), offset).unwrap();
        let mut naive = 0;
        for p in &pts {
            let mut s = 0.0;
            for (a, b) in normal.iter().zip(p.coords()) {
                s += a * b;
            }
            if s >= offset {
                naive += 1;
            }
        }
        prop_assert_eq!(halfspace_count(&set, &h).unwrap(), naive);
    }
}
