use crate::{is_hermitian, max_abs, min_eigenvalue, trace_re, CMat, CVec, LinalgError, SystemLayout, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Normalized,
    Subnormalized,
}

/// Positive operator with trace at most one on a labeled space.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMat,
    layout: SystemLayout,
    normalization: Normalization,
}

impl DensityOperator {
    /// Validated constructor using the default tolerances.
    pub fn new(
        matrix: CMat,
        layout: SystemLayout,
        normalization: Normalization,
    ) -> Result<Self, LinalgError> {
        Self::new_with(matrix, layout, normalization, &Tolerances::DEFAULT)
    }

    pub fn new_with(
        matrix: CMat,
        layout: SystemLayout,
        normalization: Normalization,
        tol: &Tolerances,
    ) -> Result<Self, LinalgError> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(LinalgError::DimMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        if !is_hermitian(&matrix, tol.hermitian) {
            return Err(LinalgError::NotHermitian(max_abs(&(&matrix - matrix.adjoint()))));
        }
        let lmin = min_eigenvalue(&matrix);
        if lmin < tol.psd_floor {
            return Err(LinalgError::NotPsd(lmin));
        }
        let t = trace_re(&matrix);
        let ok = match normalization {
            Normalization::Normalized => (t - 1.0).abs() <= tol.trace,
            Normalization::Subnormalized => t <= 1.0 + tol.trace,
        };
        if !ok {
            return Err(LinalgError::BadTrace(t));
        }
        Ok(Self {
            matrix,
            layout,
            normalization,
        })
    }

    /// Normalized state on a single factor.
    pub fn on(label: &str, matrix: CMat) -> Result<Self, LinalgError> {
        let d = matrix.nrows();
        Self::new(matrix, SystemLayout::single(label, d), Normalization::Normalized)
    }

    /// Construct without validation. The caller guarantees the invariants up
    /// to solver accuracy (used for optimizer outputs and internal plumbing).
    pub fn from_parts_unchecked(
        matrix: CMat,
        layout: SystemLayout,
        normalization: Normalization,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self {
            matrix,
            layout,
            normalization,
        }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self::from_parts_unchecked(
            CMat::identity(d, d).unscale(d as f64),
            layout,
            Normalization::Normalized,
        )
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.matrix)
    }

    /// Same matrix on a relabeled layout with identical dimensions.
    pub fn relabel(&self, layout: SystemLayout) -> Result<Self, LinalgError> {
        if layout.dims() != self.layout.dims() {
            return Err(LinalgError::DimMismatch {
                expected: self.layout.total_dim(),
                found: layout.total_dim(),
            });
        }
        Ok(Self {
            matrix: self.matrix.clone(),
            layout,
            normalization: self.normalization,
        })
    }

    /// Same matrix with a different normalization tag (validated).
    pub fn retag(&self, normalization: Normalization) -> Result<Self, LinalgError> {
        Self::new(self.matrix.clone(), self.layout.clone(), normalization)
    }

    /// `s * rho`, tagged subnormalized.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            layout: self.layout.clone(),
            normalization: Normalization::Subnormalized,
        }
    }
}

/// Unit vector on a labeled space.
#[derive(Debug, Clone)]
pub struct PureState {
    vector: CVec,
    layout: SystemLayout,
}

impl PureState {
    pub fn new(vector: CVec, layout: SystemLayout) -> Result<Self, LinalgError> {
        if vector.len() != layout.total_dim() {
            return Err(LinalgError::DimMismatch {
                expected: layout.total_dim(),
                found: vector.len(),
            });
        }
        let n = vector.norm();
        if (n - 1.0).abs() > Tolerances::DEFAULT.norm {
            return Err(LinalgError::BadNorm(n));
        }
        Ok(Self { vector, layout })
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    /// `|psi><psi|` as a normalized density operator.
    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(
            &self.vector * self.vector.adjoint(),
            self.layout.clone(),
            Normalization::Normalized,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn validation_catches_bad_inputs() {
        let l = SystemLayout::single("A", 2);
        let mut m = CMat::identity(2, 2).scale(0.5);
        assert!(DensityOperator::new(m.clone(), l.clone(), Normalization::Normalized).is_ok());
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(
            DensityOperator::new(m.clone(), l.clone(), Normalization::Normalized),
            Err(LinalgError::NotHermitian(_))
        ));
        let neg = CMat::from_diagonal(&CVec::from_vec(vec![c64(1.1, 0.0), c64(-0.1, 0.0)]));
        assert!(matches!(
            DensityOperator::new(neg, l.clone(), Normalization::Normalized),
            Err(LinalgError::NotPsd(_))
        ));
        let half = CMat::identity(2, 2).scale(0.25);
        assert!(DensityOperator::new(half.clone(), l.clone(), Normalization::Normalized).is_err());
        assert!(DensityOperator::new(half, l, Normalization::Subnormalized).is_ok());
    }
}
