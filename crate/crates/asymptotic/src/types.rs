use crate::AsymptoticError;
use qcap_linalg::{eigh, kron_all, CMat};

/// Empirical distribution of a length-`n` sequence, stored as counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeDistribution {
    pub counts: Vec<usize>,
    pub n: usize,
}

impl TypeDistribution {
    pub fn new(counts: Vec<usize>) -> Self {
        let n = counts.iter().sum();
        Self { counts, n }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }
}

/// Type of `seq` over an alphabet of `alphabet` letters.
pub fn type_of(seq: &[usize], alphabet: usize) -> TypeDistribution {
    let mut counts = vec![0; alphabet];
    for &x in seq {
        counts[x] += 1;
    }
    TypeDistribution::new(counts)
}

/// All compositions of `n` into `alphabet` nonnegative parts, in
/// lexicographically decreasing order of the counts.
pub fn enumerate_types(alphabet: usize, n: usize) -> Vec<TypeDistribution> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<TypeDistribution>) {
        if slots == 1 {
            prefix.push(left);
            out.push(TypeDistribution::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in (0..=left).rev() {
            prefix.push(c);
            rec(left - c, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if alphabet > 0 {
        rec(n, alphabet, &mut Vec::new(), &mut out);
    }
    out
}

/// Multinomial coefficient `n! / prod_x (n t(x))!`.
pub fn type_class_size(t: &TypeDistribution) -> u128 {
    let mut size: u128 = 1;
    let mut placed = 0u128;
    for &c in &t.counts {
        // Multiply by binomial(placed + c, c) incrementally; stays exact.
        for k in 1..=c as u128 {
            placed += 1;
            size = size * placed / k;
        }
    }
    size
}

/// `sum` over sequences `x^n` of type `t` of `|b_{x_1}><b_{x_1}| x ... x
/// |b_{x_n}><b_{x_n}|`, where `b_x` is column `x` of `basis`.
pub fn type_projector(t: &TypeDistribution, basis: &CMat) -> Result<CMat, AsymptoticError> {
    let d = basis.nrows();
    if basis.ncols() != t.counts.len() {
        return Err(AsymptoticError::Type(format!(
            "alphabet of size {} does not match {} basis vectors",
            t.counts.len(),
            basis.ncols()
        )));
    }
    let dim = d.pow(t.n as u32);
    let mut proj = CMat::zeros(dim, dim);
    let letters = t.counts.len();
    let rank_one: Vec<CMat> = (0..letters)
        .map(|x| {
            let b = basis.column(x);
            &b * b.adjoint()
        })
        .collect();
    let mut seq = vec![0usize; t.n];
    loop {
        if type_of(&seq, letters) == *t {
            let factors: Vec<CMat> = seq.iter().map(|&x| rank_one[x].clone()).collect();
            proj += kron_all(&factors);
        }
        // Odometer over sequences.
        let mut i = t.n;
        loop {
            if i == 0 {
                return Ok(proj);
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < letters {
                break;
            }
            seq[i] = 0;
        }
    }
}

/// Type projectors of `n` copies in the eigenbasis of `rho`, paired with
/// their types over the eigenvalue index.
pub fn state_type_projectors(rho: &CMat, n: usize) -> Result<Vec<(TypeDistribution, CMat)>, AsymptoticError> {
    let (_, vecs) = eigh(rho);
    enumerate_types(rho.nrows(), n)
        .into_iter()
        .map(|t| {
            let p = type_projector(&t, &vecs)?;
            Ok((t, p))
        })
        .collect()
}
