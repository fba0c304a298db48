use nalgebra::{DMatrix, DVector};
use qcap_bounds::{HalfSpace, RateRegion};

const TOL: f64 = 1e-9;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit normal of the hyperplane through the `k` points `ys` in `R^k`
/// (`k <= 3`), or `None` when they are affinely dependent.
fn hyperplane_normal(ys: &[&DVector<f64>], k: usize) -> Option<DVector<f64>> {
    let n = match k {
        1 => DVector::from_element(1, 1.0),
        2 => {
            let d = ys[1] - ys[0];
            DVector::from_vec(vec![-d[1], d[0]])
        }
        3 => {
            let a = nalgebra::Vector3::new(ys[1][0] - ys[0][0], ys[1][1] - ys[0][1], ys[1][2] - ys[0][2]);
            let b = nalgebra::Vector3::new(ys[2][0] - ys[0][0], ys[2][1] - ys[0][1], ys[2][2] - ys[0][2]);
            let c = a.cross(&b);
            DVector::from_vec(vec![c[0], c[1], c[2]])
        }
        _ => unreachable!("hull dimension above 3"),
    };
    let norm = n.norm();
    (norm > TOL).then(|| n.unscale(norm))
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn advance(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if idx[i] < n - k + i {
            break;
        }
    }
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Convex hull of `points` as a [`RateRegion`]: facets are found by testing
/// every hyperplane through affinely independent point subsets inside the
/// affine hull, and the affine hull itself contributes equality pairs.
pub fn convex_hull(label: &str, axes: &[&str], points: &[Vec<f64>]) -> RateRegion {
    let dim = axes.len();
    assert!(dim <= 3, "convex_hull supports up to three axes");
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| q.iter().zip(p).all(|(a, b)| (a - b).abs() <= TOL)) {
            pts.push(p.clone());
        }
    }
    if pts.is_empty() {
        // An empty hull: an infeasible constraint.
        let mut n = vec![0.0; dim];
        n[0] = 1.0;
        return RateRegion::new(label, axes, vec![HalfSpace::new(n, -1.0, "empty")]);
    }
    let scale = pts.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let x0: Vec<f64> = (0..dim).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64).collect();
    let cov = DMatrix::from_fn(dim, dim, |r, c| pts.iter().map(|p| (p[r] - x0[r]) * (p[c] - x0[c])).sum::<f64>());
    let eig = cov.symmetric_eigen();
    let mut basis = Vec::new();
    let mut complement = Vec::new();
    for (i, l) in eig.eigenvalues.iter().enumerate() {
        let col: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        if *l > (TOL * scale).powi(2) * pts.len() as f64 {
            basis.push(col);
        } else {
            complement.push(col);
        }
    }
    let k = basis.len();
    let mut hs: Vec<HalfSpace> = Vec::new();
    for (i, u) in complement.iter().enumerate() {
        let b = dot(u, &x0);
        hs.push(HalfSpace::new(u.clone(), b, format!("flat{i}+")));
        hs.push(HalfSpace::new(u.iter().map(|a| -a).collect(), -b, format!("flat{i}-")));
    }
    if k > 0 {
        let ys: Vec<DVector<f64>> = pts
            .iter()
            .map(|p| DVector::from_fn(k, |i, _| basis[i].iter().zip(p).zip(&x0).map(|((b, x), c)| b * (x - c)).sum()))
            .collect();
        let mut facets: Vec<(DVector<f64>, f64)> = Vec::new();
        if k == 1 {
            let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), y| (l.min(y[0]), h.max(y[0])));
            facets.push((DVector::from_element(1, 1.0), hi));
            facets.push((DVector::from_element(1, -1.0), -lo));
        } else {
            let tol = TOL * scale;
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let sel: Vec<&DVector<f64>> = idx.iter().map(|&i| &ys[i]).collect();
                if let Some(n) = hyperplane_normal(&sel, k) {
                    let b = n.dot(sel[0]);
                    let (mut above, mut below) = (false, false);
                    for y in &ys {
                        let s = n.dot(y) - b;
                        above |= s > tol;
                        below |= s < -tol;
                        if above && below {
                            break;
                        }
                    }
                    let oriented = match (above, below) {
                        (false, _) => Some((n, b)),
                        (true, false) => Some((-n, -b)),
                        _ => None,
                    };
                    if let Some((n, b)) = oriented {
                        if !facets.iter().any(|(m, c)| (m - &n).norm() < 1e-7 && (c - b).abs() < 1e-7 * scale) {
                            facets.push((n, b));
                        }
                    }
                }
                if !advance(&mut idx, ys.len()) {
                    break;
                }
            }
        }
        for (i, (n, b)) in facets.iter().enumerate() {
            // Snap eigenbasis round-off so axis-aligned facets come out exact.
            let normal: Vec<f64> = (0..dim)
                .map(|c| (0..k).map(|r| basis[r][c] * n[r]).sum::<f64>())
                .map(|x| if x.abs() < 1e-12 { 0.0 } else { x })
                .collect();
            let offset = b + dot(&normal, &x0);
            let offset = if offset.abs() < 1e-12 * scale { 0.0 } else { offset };
            hs.push(HalfSpace::new(normal, offset, format!("facet{i}")));
        }
    }
    RateRegion::new(label, axes, hs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.iter().zip(q).all(|(x, y)| (x - y).abs() < 1e-9))
    }

    #[test]
    fn cube_corners_give_six_facets() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        let h = convex_hull("cube", &["x", "y", "z"], &pts);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.inequalities.len(), 6 + 3);
        assert!(h.contains(&[0.2, 0.9, 0.4], 1e-12));
        assert!(!h.contains(&[1.1, 0.5, 0.5], 1e-9));
    }

    #[test]
    fn flat_and_collinear_point_sets() {
        let tri = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.2, 0.2, 0.0]];
        let h = convex_hull("tri", &["x", "y", "z"], &tri);
        assert!(same_points(&h.vertices, &[vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]));
        assert!(!h.contains(&[0.1, 0.1, 0.1], 1e-9));

        let seg = vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 1.0]];
        let h = convex_hull("seg", &["x", "y", "z"], &seg);
        assert!(same_points(&h.vertices, &[vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 2.0]]));

        let pt = vec![vec![0.5, 0.0, 0.25]];
        let h = convex_hull("pt", &["x", "y", "z"], &pt);
        assert_eq!(h.vertices.len(), 1);
        assert!((h.vertices[0][0] - 0.5).abs() < 1e-12 && (h.vertices[0][2] - 0.25).abs() < 1e-12);
    }
}
