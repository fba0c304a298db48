use crate::BoundsError;
use qcap_channels::ChannelRep;
use qcap_linalg::{
    c64, dephase_matrix, eye, hermitian_part, kron, max_abs, outer, partial_trace_matrix, CMat, CVec,
    DensityOperator, Normalization, SystemLayout,
};

const BLOCK_TOL: f64 = 1e-10;
const MIXED_TOL: f64 = 1e-8;

/// A source state `rho` on `S_c x S_r x A`, block diagonal in `S_c`.
#[derive(Debug, Clone)]
pub struct InputEnsemble {
    rho: CMat,
    d_c: usize,
    d_r: usize,
    d_a: usize,
}

impl InputEnsemble {
    /// `rho` on `S_c x S_r x A` (row-major in that order).
    pub fn new(rho: CMat, d_c: usize, d_r: usize) -> Result<Self, BoundsError> {
        let n = rho.nrows();
        if d_c == 0 || d_r == 0 || n % (d_c * d_r) != 0 || rho.ncols() != n {
            return Err(BoundsError::Precondition(format!(
                "state of dimension {n} does not factor as {d_c} x {d_r} x d_A"
            )));
        }
        let d_a = n / (d_c * d_r);
        let res = max_abs(&(&rho - dephase_matrix(&rho, &[d_c, d_r * d_a], 0)));
        if res > BLOCK_TOL {
            return Err(BoundsError::NotBlockDiagonal(res));
        }
        // Validates trace and positivity.
        let layout = SystemLayout::new(vec![("Sc", d_c), ("Sr", d_r), ("A", d_a)])?;
        DensityOperator::new(rho.clone(), layout, Normalization::Normalized)?;
        Ok(Self { rho, d_c, d_r, d_a })
    }

    /// `(1/d_c) sum_j |j><j| x rho_j` for states `rho_j` on `S_r x A`.
    pub fn from_blocks(blocks: &[CMat], d_r: usize) -> Result<Self, BoundsError> {
        let d_c = blocks.len();
        let n = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        if d_c == 0 || blocks.iter().any(|b| b.nrows() != n) {
            return Err(BoundsError::Precondition("blocks must be non-empty and of equal size".into()));
        }
        let mut rho = CMat::zeros(d_c * n, d_c * n);
        for (j, b) in blocks.iter().enumerate() {
            rho.view_mut((j * n, j * n), (n, n)).copy_from(&b.unscale(d_c as f64));
        }
        Self::new(rho, d_c, d_r)
    }

    /// `Phi_d` on `S_r x A` with trivial `S_c`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self::new(outer(&qcap_linalg::max_entangled(d)), 1, d).expect("valid state")
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn d_c(&self) -> usize {
        self.d_c
    }

    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn d_s(&self) -> usize {
        self.d_c * self.d_r
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    /// `max |rho^S - 1/d_S|`.
    pub fn mixed_residual(&self) -> f64 {
        let d_s = self.d_s();
        let rho_s = partial_trace_matrix(&self.rho, &[d_s, self.d_a], &[0]);
        max_abs(&(rho_s - eye(d_s).unscale(d_s as f64)))
    }

    pub(crate) fn require_mixed(&self) -> Result<(), BoundsError> {
        let r = self.mixed_residual();
        if r > MIXED_TOL {
            return Err(BoundsError::SourceNotMixed(r));
        }
        Ok(())
    }

    /// `(id_S x N)(rho)` on `Sc x Sr x B`; factors of dimension one are
    /// kept so labels stay fixed.
    pub fn output(&self, channel: &ChannelRep) -> Result<DensityOperator, BoundsError> {
        if channel.d_in() != self.d_a {
            return Err(BoundsError::Precondition(format!(
                "channel input dimension {} differs from dim A = {}",
                channel.d_in(),
                self.d_a
            )));
        }
        let id = eye(self.d_s());
        let d_b = channel.d_out();
        let n = self.d_s() * d_b;
        let m = channel.kraus().iter().fold(CMat::zeros(n, n), |acc, k| {
            let big = kron(&id, k);
            acc + &big * &self.rho * big.adjoint()
        });
        let layout = SystemLayout::new(vec![("Sc", self.d_c), ("Sr", self.d_r), ("B", d_b)])?;
        Ok(DensityOperator::from_parts_unchecked(hermitian_part(&m), layout, Normalization::Normalized))
    }

    /// The same ensemble with all of `S` dephased in the computational basis.
    pub fn dephased(&self) -> Self {
        let d_s = self.d_s();
        let m = dephase_matrix(&self.rho, &[d_s, self.d_a], 0);
        Self {
            rho: m,
            ..self.clone()
        }
    }

    /// `rho' = (1/d) sum_j |j><j| x rho` on `S_c' x (S_c S_r) x A`, i.e. the
    /// whole old `S` becomes the new `S_r`.
    pub fn pad_classical(&self, d: usize) -> Self {
        let blocks = vec![self.rho.clone(); d.max(1)];
        Self::from_blocks(&blocks, self.d_s()).expect("padding preserves validity")
    }
}

/// Parameters of the ensemble family used for optimization: block `j` is
/// `(1 - p) |psi_j><psi_j| + p pi_{S_r} x pi_A` with
/// `|psi_j> = (I x R(j theta)) sum_{i < d_r} |i>|i> / sqrt(d_r)` and `R` a real
/// rotation in the span of `|0>, |1>` of `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPoint {
    pub d_c: usize,
    pub d_r: usize,
    pub p: f64,
    pub theta: f64,
}

impl FamilyPoint {
    pub fn ensemble(&self, d_a: usize) -> Result<InputEnsemble, BoundsError> {
        if self.d_r > d_a || d_a < 2 {
            return Err(BoundsError::Precondition(format!(
                "family needs d_r <= d_A and d_A >= 2 (d_r = {}, d_A = {d_a})",
                self.d_r
            )));
        }
        let p = self.p.clamp(0.0, 1.0);
        let d_r = self.d_r;
        let n = d_r * d_a;
        let noise = eye(n).unscale(n as f64);
        let blocks: Vec<CMat> = (0..self.d_c)
            .map(|j| {
                let angle = j as f64 * self.theta;
                let mut rot = eye(d_a);
                rot[(0, 0)] = c64(angle.cos(), 0.0);
                rot[(1, 0)] = c64(angle.sin(), 0.0);
                rot[(0, 1)] = c64(-angle.sin(), 0.0);
                rot[(1, 1)] = c64(angle.cos(), 0.0);
                let mut v = CVec::zeros(n);
                for i in 0..d_r {
                    v[i * d_a + i] = c64(1.0 / (d_r as f64).sqrt(), 0.0);
                }
                let v = kron(&eye(d_r), &rot) * v;
                outer(&v).scale(1.0 - p) + noise.scale(p)
            })
            .collect();
        InputEnsemble::from_blocks(&blocks, d_r)
    }
}
