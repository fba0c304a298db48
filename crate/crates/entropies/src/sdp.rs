//! Block-diagonal semidefinite programs.
//!
//! Problems are stated as `maximize c^T y` subject to linear matrix
//! inequalities `F_0 + sum_i y_i F_i >= 0` with complex Hermitian blocks.
//! Complex blocks are embedded as real symmetric matrices
//! `[[Re M, -Im M], [Im M, Re M]]` and the real problem is solved by a
//! primal-dual interior point method (HKM search direction, Mehrotra
//! predictor-corrector).

use nalgebra::{DMatrix, DVector};
use qcap_linalg::{c64, CMat, Complex64};

/// Environment variable overriding the relative gap tolerance.
pub const TOL_ENV: &str = "QCAP_SOLVER_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub gap_tol: f64,
    pub feas_tol: f64,
    /// Results whose relative gap exceeds this are flagged near-optimal.
    pub near_optimal_gap: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            near_optimal_gap: 1e-5,
            max_iter: 120,
        }
    }
}

impl SolverSettings {
    /// Defaults, with the gap tolerance taken from `QCAP_SOLVER_TOL` when it
    /// holds a positive number.
    pub fn from_env() -> Self {
        Self::with_override(std::env::var(TOL_ENV).ok().as_deref())
    }

    /// Defaults with an optional textual gap tolerance; unparsable or
    /// non-positive values are ignored.
    pub fn with_override(tol: Option<&str>) -> Self {
        let mut s = Self::default();
        if let Some(t) = tol
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
        {
            s.gap_tol = t;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    /// Upper bound on the optimum (primal certificate).
    pub upper: f64,
    /// Objective at `y`, a lower bound up to the feasibility tolerance.
    pub value: f64,
    pub rel_gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

/// Matrix of affine functions of the decision variables.
#[derive(Debug, Clone)]
pub struct VarMat {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, var, coef)`.
    pub entries: Vec<(usize, usize, usize, Complex64)>,
}

impl VarMat {
    /// `I_d x self`.
    pub fn kron_identity_left(&self, d: usize) -> VarMat {
        let mut entries = Vec::with_capacity(self.entries.len() * d);
        for a in 0..d {
            for &(r, c, v, w) in &self.entries {
                entries.push((a * self.rows + r, a * self.cols + c, v, w));
            }
        }
        VarMat {
            rows: self.rows * d,
            cols: self.cols * d,
            entries,
        }
    }

    /// `Re Tr(self)` as `(var, coef)` terms.
    pub fn trace_terms(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .filter(|e| e.0 == e.1)
            .map(|e| (e.2, e.3.re))
            .collect()
    }

    /// `Re Tr(self * m)` as `(var, coef)` terms.
    pub fn re_trace_product(&self, m: &CMat) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .map(|&(r, c, v, w)| (v, (w * m[(c, r)]).re))
            .filter(|t| t.1 != 0.0)
            .collect()
    }

    pub fn value(&self, y: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.rows, self.cols);
        for &(r, c, v, w) in &self.entries {
            m[(r, c)] += w * y[v];
        }
        m
    }
}

/// One linear matrix inequality `F(y) >= 0` of fixed dimension.
#[derive(Debug, Clone)]
pub struct Lmi {
    dim: usize,
    /// `(row, col, var or constant, coef)`, all entries stored explicitly.
    entries: Vec<(usize, usize, Option<usize>, Complex64)>,
}

impl Lmi {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn push(&mut self, r: usize, c: usize, v: Option<usize>, w: Complex64, mirror: bool) {
        if w == c64(0.0, 0.0) {
            return;
        }
        self.entries.push((r, c, v, w));
        if mirror {
            self.entries.push((c, r, v, w.conj()));
        }
    }

    /// Places `m` at offset `(r0, c0)`. Off the diagonal the adjoint is
    /// placed at `(c0, r0)` as well; on the diagonal `m` must be Hermitian.
    pub fn add_const(&mut self, r0: usize, c0: usize, m: &CMat) {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                self.push(r0 + r, c0 + c, None, m[(r, c)], r0 != c0);
            }
        }
    }

    /// Places `scale * x` with the same mirroring rule as [`Lmi::add_const`].
    pub fn add_var(&mut self, r0: usize, c0: usize, x: &VarMat, scale: f64) {
        for &(r, c, v, w) in &x.entries {
            self.push(r0 + r, c0 + c, Some(v), w * scale, r0 != c0);
        }
    }

    /// Scalar constant at `(r, c)`, mirrored when `r != c`.
    pub fn add_const_entry(&mut self, r: usize, c: usize, w: Complex64) {
        self.push(r, c, None, w, r != c);
    }

    /// `coef * y_var` at `(r, c)`, mirrored when `r != c`.
    pub fn add_var_entry(&mut self, r: usize, c: usize, var: usize, coef: Complex64) {
        self.push(r, c, Some(var), coef, r != c);
    }

    /// Linear form `sum coef * y_var` placed at a diagonal entry.
    pub fn add_terms(&mut self, r: usize, terms: &[(usize, f64)]) {
        for &(v, w) in terms {
            self.push(r, r, Some(v), c64(w, 0.0), false);
        }
    }
}

/// Problem builder: `maximize c^T y` over the LMIs.
#[derive(Debug, Clone, Default)]
pub struct Sdp {
    objective: Vec<f64>,
    blocks: Vec<Lmi>,
}

impl Sdp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Allocates `k` scalar variables and returns the first index.
    pub fn new_vars(&mut self, k: usize) -> usize {
        let start = self.objective.len();
        self.objective.resize(start + k, 0.0);
        start
    }

    pub fn scalar_var(&mut self) -> usize {
        self.new_vars(1)
    }

    /// Hermitian `d x d` variable; `real` restricts it to real symmetric.
    pub fn hermitian_var(&mut self, d: usize, real: bool) -> VarMat {
        let mut entries = Vec::new();
        for r in 0..d {
            let v = self.scalar_var();
            entries.push((r, r, v, c64(1.0, 0.0)));
            for c in r + 1..d {
                let x = self.scalar_var();
                entries.push((r, c, x, c64(1.0, 0.0)));
                entries.push((c, r, x, c64(1.0, 0.0)));
                if !real {
                    let y = self.scalar_var();
                    entries.push((r, c, y, c64(0.0, 1.0)));
                    entries.push((c, r, y, c64(0.0, -1.0)));
                }
            }
        }
        VarMat {
            rows: d,
            cols: d,
            entries,
        }
    }

    /// Unstructured `rows x cols` variable; `real` drops imaginary parts.
    pub fn matrix_var(&mut self, rows: usize, cols: usize, real: bool) -> VarMat {
        let mut entries = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let x = self.scalar_var();
                entries.push((r, c, x, c64(1.0, 0.0)));
                if !real {
                    let y = self.scalar_var();
                    entries.push((r, c, y, c64(0.0, 1.0)));
                }
            }
        }
        VarMat { rows, cols, entries }
    }

    pub fn add_objective(&mut self, terms: &[(usize, f64)]) {
        for &(v, w) in terms {
            self.objective[v] += w;
        }
    }

    pub fn add_lmi(&mut self, lmi: Lmi) {
        self.blocks.push(lmi);
    }

    /// `constant + sum coef * y_var >= 0`.
    pub fn add_scalar(&mut self, constant: f64, terms: &[(usize, f64)]) {
        let mut l = Lmi::new(1);
        l.add_const_entry(0, 0, c64(constant, 0.0));
        l.add_terms(0, terms);
        self.blocks.push(l);
    }

    pub fn solve(&self, settings: &SolverSettings) -> SdpSolution {
        let real = self.realify();
        let mut sol = solve_real(&real, settings);
        if sol.status != SolveStatus::Infeasible {
            sol.status = if sol.rel_gap <= settings.near_optimal_gap && sol.status == SolveStatus::Optimal {
                SolveStatus::Optimal
            } else {
                SolveStatus::NearOptimal
            };
        }
        sol
    }

    fn realify(&self) -> RealSdp {
        let m = self.objective.len();
        let mut sizes = Vec::new();
        let mut c = Vec::new();
        let mut a: Vec<Vec<(usize, usize, usize, f64)>> = vec![Vec::new(); m];
        for (k, blk) in self.blocks.iter().enumerate() {
            let complex = blk.entries.iter().any(|e| e.3.im != 0.0);
            let n = blk.dim;
            let size = if complex { 2 * n } else { n };
            let mut ck = DMatrix::<f64>::zeros(size, size);
            for &(r, cc, v, w) in &blk.entries {
                let mut place = |i: usize, j: usize, x: f64| {
                    if x == 0.0 {
                        return;
                    }
                    match v {
                        None => ck[(i, j)] += x,
                        // F_i enters with A_i = -F_i.
                        Some(v) => a[v].push((k, i, j, -x)),
                    }
                };
                place(r, cc, w.re);
                if complex {
                    place(r + n, cc + n, w.re);
                    place(r + n, cc, w.im);
                    place(r, cc + n, -w.im);
                }
            }
            sizes.push(size);
            c.push(ck);
        }
        for list in &mut a {
            list.sort_by(|x, y| (x.0, x.1, x.2).cmp(&(y.0, y.1, y.2)));
            let mut merged: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(list.len());
            for &e in list.iter() {
                match merged.last_mut() {
                    Some(last) if (last.0, last.1, last.2) == (e.0, e.1, e.2) => last.3 += e.3,
                    _ => merged.push(e),
                }
            }
            merged.retain(|e| e.3 != 0.0);
            *list = merged;
        }
        RealSdp {
            sizes,
            c,
            a,
            b: self.objective.clone(),
        }
    }
}

/// `min <C, X>` s.t. `<A_i, X> = b_i`, `X >= 0`, and its dual
/// `max b^T y` s.t. `Z = C - sum y_i A_i >= 0`.
struct RealSdp {
    sizes: Vec<usize>,
    c: Vec<DMatrix<f64>>,
    /// Per variable: `(block, row, col, value)`, symmetric entries explicit.
    a: Vec<Vec<(usize, usize, usize, f64)>>,
    b: Vec<f64>,
}

type Blocks = Vec<DMatrix<f64>>;

fn inner(x: &Blocks, y: &Blocks) -> f64 {
    x.iter().zip(y).map(|(a, b)| a.dot(b)).sum()
}

fn frob(x: &Blocks) -> f64 {
    inner(x, x).sqrt()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// `<A_i, M>` for a (possibly nonsymmetric) block matrix, as `Tr(A_i M)`.
fn trace_with(ai: &[(usize, usize, usize, f64)], m: &Blocks) -> f64 {
    ai.iter().map(|&(k, r, c, w)| w * m[k][(c, r)]).sum()
}

/// Largest `alpha` with `x + alpha dx >= 0` (infinite if unbounded); `None`
/// when `x` is not positive definite.
fn max_step(x: &Blocks, dx: &Blocks) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (xk, dk) in x.iter().zip(dx) {
        let l = xk.clone().cholesky()?.l();
        let li = l.clone().try_inverse()?;
        let t = &li * dk * li.transpose();
        let t = sym(t);
        let lmin = t.symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Some(alpha)
}

fn solve_real(p: &RealSdp, s: &SolverSettings) -> SdpSolution {
    let m = p.b.len();
    let nb = p.sizes.len();
    let n_tot: usize = p.sizes.iter().sum();
    let mut by_block: Vec<Vec<(usize, usize, usize, f64)>> = vec![Vec::new(); nb];
    let mut blocks_of: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut a_norm = vec![vec![0.0f64; nb]; m];
    for (i, ai) in p.a.iter().enumerate() {
        for &(k, r, c, w) in ai {
            by_block[k].push((i, r, c, w));
            a_norm[i][k] += w * w;
            if blocks_of[i].last() != Some(&k) {
                blocks_of[i].push(k);
            }
        }
    }
    let norm_b = p.b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_c = frob(&p.c);

    let mut x: Blocks = Vec::with_capacity(nb);
    let mut z: Blocks = Vec::with_capacity(nb);
    for k in 0..nb {
        let n = p.sizes[k] as f64;
        let mut amax: f64 = 0.0;
        let mut ratio: f64 = 0.0;
        for i in 0..m {
            let an = a_norm[i][k].sqrt();
            amax = amax.max(an);
            if an > 0.0 {
                ratio = ratio.max((1.0 + p.b[i].abs()) / (1.0 + an));
            }
        }
        let xi = 10f64.max(n.sqrt()).max(n * ratio);
        let eta = 10f64.max(n.sqrt()).max(p.c[k].norm()).max(amax);
        x.push(DMatrix::identity(p.sizes[k], p.sizes[k]) * xi);
        z.push(DMatrix::identity(p.sizes[k], p.sizes[k]) * eta);
    }
    let mut y = vec![0.0f64; m];

    let mut status = SolveStatus::NearOptimal;
    let mut rel_gap = f64::INFINITY;
    let mut iterations = 0;
    let mut best: Option<(f64, Vec<f64>, f64, f64)> = None;
    let mut stalls = 0;

    for it in 0..s.max_iter {
        iterations = it;
        // Residuals.
        let mut rd: Blocks = p.c.iter().zip(&z).map(|(c, z)| c - z).collect();
        for (i, ai) in p.a.iter().enumerate() {
            for &(k, r, c, w) in ai {
                rd[k][(r, c)] -= y[i] * w;
            }
        }
        let rp: Vec<f64> = (0..m).map(|i| p.b[i] - trace_with(&p.a[i], &x)).collect();
        let pobj = inner(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let xz = inner(&x, &z);
        let mu = xz / n_tot as f64;
        let scale = 1.0 + pobj.abs() + dobj.abs();
        let gap = ((pobj - dobj).abs().max(xz.max(0.0))) / scale;
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let dinf = frob(&rd) / (1.0 + norm_c);
        rel_gap = gap;
        if pinf < s.feas_tol && dinf < s.feas_tol {
            let better = best.as_ref().is_none_or(|b| gap < b.0);
            if better {
                best = Some((gap, y.clone(), pobj, dobj));
            }
            if gap < s.gap_tol {
                status = SolveStatus::Optimal;
                break;
            }
        }
        if !dobj.is_finite() || dobj.abs() > 1e12 || pobj.abs() > 1e14 {
            status = SolveStatus::Infeasible;
            break;
        }

        let zinv: Option<Blocks> = z
            .iter()
            .map(|zk| zk.clone().cholesky().map(|c| c.inverse()))
            .collect();
        let Some(zinv) = zinv else { break };

        // Schur complement M_ij = Tr(A_i X A_j Z^-1).
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for &k in &blocks_of[i] {
                let n = p.sizes[k];
                let mut bi = DMatrix::<f64>::zeros(n, n);
                for &(kk, r, c, w) in &p.a[i] {
                    if kk != k {
                        continue;
                    }
                    // B += w Zinv[:, r] X[c, :]
                    let zc = zinv[k].column(r);
                    let xr = x[k].row(c);
                    bi.ger(w, &zc, &xr.transpose(), 1.0);
                }
                for &(j, r, c, w) in &by_block[k] {
                    if j >= i {
                        schur[(i, j)] += w * bi[(c, r)];
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                schur[(i, j)] = schur[(j, i)];
            }
        }
        let chol = match schur.clone().cholesky() {
            Some(c) => Some(c),
            None => {
                let reg = 1e-13 * (1.0 + schur.diagonal().amax());
                let mut sr = schur.clone();
                for i in 0..m {
                    sr[(i, i)] += reg;
                }
                sr.cholesky()
            }
        };
        let Some(chol) = chol else { break };

        let solve_dir = |sigma_mu: f64, corr: Option<(&Blocks, &Blocks)>| -> (Vec<f64>, Blocks, Blocks) {
            // R = sigma mu Z^-1 - X - X Rd Z^-1 [- dXp dZp Z^-1]
            let mut rmat: Blocks = Vec::with_capacity(nb);
            for k in 0..nb {
                let mut r = &zinv[k] * sigma_mu - &x[k] - &x[k] * &rd[k] * &zinv[k];
                if let Some((dxp, dzp)) = corr {
                    r -= &dxp[k] * &dzp[k] * &zinv[k];
                }
                rmat.push(r);
            }
            let rhs = DVector::from_iterator(m, (0..m).map(|i| rp[i] - trace_with(&p.a[i], &rmat)));
            let dy = chol.solve(&rhs);
            let mut dz: Blocks = rd.clone();
            for (i, ai) in p.a.iter().enumerate() {
                for &(k, r, c, w) in ai {
                    dz[k][(r, c)] -= dy[i] * w;
                }
            }
            let mut dx: Blocks = Vec::with_capacity(nb);
            for k in 0..nb {
                let mut d = &zinv[k] * sigma_mu - &x[k] - &x[k] * &dz[k] * &zinv[k];
                if let Some((dxp, dzp)) = corr {
                    d -= &dxp[k] * &dzp[k] * &zinv[k];
                }
                dx.push(sym(d));
            }
            (dy.iter().copied().collect(), dx, dz)
        };

        // Predictor.
        let (_, dxp, dzp) = solve_dir(0.0, None);
        let (Some(ap), Some(ad)) = (max_step(&x, &dxp), max_step(&z, &dzp)) else {
            break;
        };
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let xa: Blocks = x.iter().zip(&dxp).map(|(a, d)| a + d * ap).collect();
        let za: Blocks = z.iter().zip(&dzp).map(|(a, d)| a + d * ad).collect();
        let mu_aff = inner(&xa, &za) / n_tot as f64;
        let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
        let sigma = if mu > 0.0 {
            (mu_aff / mu).max(0.0).powf(expon).min(1.0)
        } else {
            0.0
        };

        // Corrector.
        let (dy, dx, dz) = solve_dir(sigma * mu, Some((&dxp, &dzp)));
        let (Some(ap), Some(ad)) = (max_step(&x, &dx), max_step(&z, &dz)) else {
            break;
        };
        let gamma = 0.9 + 0.09 * ap.min(ad).min(1.0);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls > 3 {
                break;
            }
        }
        for k in 0..nb {
            x[k] += &dx[k] * ap;
            z[k] += &dz[k] * ad;
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }

    let (y_out, upper, value, gap) = match (&status, best) {
        (SolveStatus::Infeasible, _) => (y.clone(), f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY),
        (_, Some((g, yb, pobj, dobj))) => (yb, pobj, dobj, g),
        (_, None) => {
            let pobj = inner(&p.c, &x);
            let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
            (y.clone(), pobj, dobj, rel_gap)
        }
    };
    if status == SolveStatus::NearOptimal && gap < s.gap_tol {
        status = SolveStatus::Optimal;
    }
    SdpSolution {
        y: y_out,
        upper,
        value,
        rel_gap: gap.max(0.0),
        status,
        iterations,
    }
}
