use crate::{bipartite, EntropyError};
use qcap_linalg::{eigh, partial_trace, CMat, DensityOperator};

/// `-sum l log2 l` over the eigenvalues of a PSD matrix, with `0 log 0 = 0`.
pub fn entropy_matrix(m: &CMat) -> f64 {
    eigh(m)
        .0
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// `H(labels)` of the reduced state.
pub fn von_neumann(rho: &DensityOperator, labels: &[&str]) -> Result<f64, EntropyError> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_matrix(partial_trace(rho, labels)?.matrix()))
}

/// `H(A|B) = H(AB) - H(B)`.
pub fn von_neumann_cond(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
) -> Result<f64, EntropyError> {
    let (m, _, _) = bipartite(rho, a, b)?;
    let hab = entropy_matrix(&m);
    Ok(hab - von_neumann(rho, b)?)
}

/// `I(A:B) = H(A) + H(B) - H(AB)`.
pub fn mutual_info(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64, EntropyError> {
    let (m, _, _) = bipartite(rho, a, b)?;
    Ok(von_neumann(rho, a)? + von_neumann(rho, b)? - entropy_matrix(&m))
}

/// `I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn cond_mutual_info(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64, EntropyError> {
    let cat = |x: &[&str], y: &[&str]| -> Vec<String> {
        x.iter().chain(y).map(|s| s.to_string()).collect()
    };
    let ac = cat(a, c);
    let bc = cat(b, c);
    let abc: Vec<String> = cat(a, b).into_iter().chain(c.iter().map(|s| s.to_string())).collect();
    let h = |l: &[String]| -> Result<f64, EntropyError> {
        let v: Vec<&str> = l.iter().map(|s| s.as_str()).collect();
        von_neumann(rho, &v)
    };
    Ok(h(&ac)? + h(&bc)? - h(&abc)? - von_neumann(rho, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcap_linalg::{max_entangled, outer, Normalization, SystemLayout};

    #[test]
    fn bell_state_values() {
        let l = SystemLayout::new(vec![("A", 2), ("B", 2)]).unwrap();
        let phi = DensityOperator::new(outer(&max_entangled(2)), l, Normalization::Normalized)
            .unwrap();
        assert!((von_neumann_cond(&phi, &["A"], &["B"]).unwrap() + 1.0).abs() < 1e-12);
        assert!((mutual_info(&phi, &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        assert!((cond_mutual_info(&phi, &["A"], &["B"], &[]).unwrap() - 2.0).abs() < 1e-12);
    }
}
