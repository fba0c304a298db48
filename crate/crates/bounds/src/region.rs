use nalgebra::{DMatrix, DVector};

/// Feasibility tolerance used when filtering candidate vertices.
pub const VERTEX_TOL: f64 = 1e-9;

/// `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub name: String,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64, name: impl Into<String>) -> Self {
        Self {
            normal,
            offset,
            name: name.into(),
        }
    }

    /// `normal . x - offset`; positive means violated.
    pub fn excess(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

/// A polyhedron of rate tuples given by half-spaces, always including
/// nonnegativity of every coordinate, with its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    pub label: String,
    pub axes: Vec<String>,
    pub inequalities: Vec<HalfSpace>,
    /// Sorted lexicographically, duplicates removed.
    pub vertices: Vec<Vec<f64>>,
}

impl RateRegion {
    /// Appends `x_i >= 0` for each axis and enumerates vertices by
    /// intersecting every `dim`-subset of the bounding hyperplanes.
    pub fn new(label: impl Into<String>, axes: &[&str], mut inequalities: Vec<HalfSpace>) -> Self {
        let dim = axes.len();
        for (i, name) in axes.iter().enumerate() {
            let mut n = vec![0.0; dim];
            n[i] = -1.0;
            inequalities.push(HalfSpace::new(n, 0.0, format!("{name} >= 0")));
        }
        let vertices = enumerate_vertices(&inequalities, dim);
        Self {
            label: label.into(),
            axes: axes.iter().map(|s| s.to_string()).collect(),
            inequalities,
            vertices,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Largest excess over all inequalities (negative inside).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.inequalities
            .iter()
            .map(|h| h.excess(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) <= tol
    }

    /// Names of the inequalities that hold with equality at `x` within `tol`.
    pub fn tight(&self, x: &[f64], tol: f64) -> Vec<&str> {
        self.inequalities
            .iter()
            .filter(|h| h.excess(x).abs() <= tol)
            .map(|h| h.name.as_str())
            .collect()
    }

    /// No vertex survived, which for a region containing the nonnegative
    /// orthant's apex means the feasible set is empty.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn scale(h: &HalfSpace) -> f64 {
    h.normal.iter().map(|a| a.abs()).fold(1.0, f64::max).max(h.offset.abs())
}

/// Every point where `dim` linearly independent bounding hyperplanes meet
/// and all inequalities hold within [`VERTEX_TOL`].
pub fn enumerate_vertices(hs: &[HalfSpace], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    if dim == 0 || hs.len() < dim {
        return out;
    }
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let a = DMatrix::from_fn(dim, dim, |r, c| hs[idx[r]].normal[c]);
        let b = DVector::from_fn(dim, |r, _| hs[idx[r]].offset);
        let lu = a.lu();
        if lu.determinant().abs() > 1e-12 {
            if let Some(x) = lu.solve(&b) {
                let x: Vec<f64> = x.iter().map(|v| if v.abs() < 1e-15 { 0.0 } else { *v }).collect();
                if x.iter().all(|v| v.is_finite())
                    && hs.iter().all(|h| h.excess(&x) <= VERTEX_TOL * scale(h))
                    && !out.iter().any(|y| close(y, &x))
                {
                    out.push(x);
                }
            }
        }
        // Next combination in lexicographic order.
        let n = hs.len();
        let mut i = dim;
        loop {
            if i == 0 {
                out.sort_by(|p, q| p.partial_cmp(q).expect("finite coordinates"));
                return out;
            }
            i -= 1;
            if idx[i] < n - dim + i {
                break;
            }
        }
        idx[i] += 1;
        for k in i + 1..dim {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= VERTEX_TOL)
}
