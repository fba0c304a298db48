use crate::polytope::EntropyProfile;
use crate::AsymptoticError;
use qcap_bounds::InputEnsemble;
use qcap_channels::ChannelRep;

/// Below this magnitude `-H(S_r|BS_c)` counts as zero and both vertex
/// subsets are returned.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVertex {
    pub label: &'static str,
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVertices {
    pub vertices: Vec<LabeledVertex>,
    /// `-H(S_r|BS_c)` of `N(rho)`.
    pub coherent_info: f64,
    pub degenerate: bool,
}

const POSITIVE: [&str; 7] = ["P0", "P1+", "P2", "P3+", "P4", "P5", "P6"];
const NEGATIVE: [&str; 5] = ["P1-", "P2", "P3-", "P4", "P6"];

/// All nine closed-form points `(C, Q, E)` from the entropies of `N(rho)`.
pub fn all_points(p: &EntropyProfile) -> Vec<LabeledVertex> {
    let h = p.h_sr_given_bsc;
    let half = 0.5 * p.i_s_b;
    let half_r = 0.5 * p.i_sr_b_given_sc();
    let v = |label, point| LabeledVertex { label, point };
    vec![
        v("P0", [0.0, 0.0, 0.0]),
        v("P1+", [0.0, -h, 0.0]),
        v("P1-", [0.0, 0.0, h]),
        v("P2", [0.0, half, half + h]),
        v("P3+", [p.i_sc_b, -h, 0.0]),
        v("P3-", [p.i_sc_b, 0.0, h]),
        v("P4", [p.i_sc_b, half_r, half_r + h]),
        v("P5", [p.classical_face(), 0.0, 0.0]),
        v("P6", [p.i_s_b, 0.0, p.h_sr_given_sc]),
    ]
}

/// The vertices of the entanglement-consuming region selected by the sign
/// of `-H(S_r|BS_c)`. The conditional mutual information in `P4` is taken
/// with respect to the channel output `B`, which is where the faces
/// `C+2Q` and `C+Q-E`, `Q-E` meet at `C = I(S_c:B)`.
pub fn lambda_vertices(channel: &ChannelRep, ens: &InputEnsemble) -> Result<LambdaVertices, AsymptoticError> {
    let p = EntropyProfile::of(channel, ens)?;
    let ci = -p.h_sr_given_bsc;
    let degenerate = ci.abs() < DEGENERACY_TOL;
    let keep = |l: &str| {
        if degenerate {
            true
        } else if ci > 0.0 {
            POSITIVE.contains(&l)
        } else {
            NEGATIVE.contains(&l)
        }
    };
    Ok(LambdaVertices {
        vertices: all_points(&p).into_iter().filter(|v| keep(v.label)).collect(),
        coherent_info: ci,
        degenerate,
    })
}
