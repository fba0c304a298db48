use crate::hull::convex_hull;
use crate::AsymptoticError;
use qcap_bounds::{HalfSpace, InputEnsemble, RateRegion};
use qcap_channels::ChannelRep;
use qcap_entropies::{mutual_info, von_neumann, von_neumann_cond};
use qcap_linalg::permute_matrix;
use rayon::prelude::*;

/// Axis names of the asymptotic regions.
pub const AXES: [&str; 3] = ["C", "Q", "E"];

/// Von Neumann quantities of `N(rho)` on `S_c S_r B` entering the regions,
/// in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyProfile {
    pub h_sc: f64,
    pub h_sr_given_sc: f64,
    pub h_s_given_b: f64,
    pub h_sr_given_bsc: f64,
    pub i_s_b: f64,
    pub i_sc_b: f64,
}

impl EntropyProfile {
    pub fn of(channel: &ChannelRep, ens: &InputEnsemble) -> Result<Self, AsymptoticError> {
        let out = ens.output(channel)?;
        Ok(Self {
            h_sc: von_neumann(&out, &["Sc"])?,
            h_sr_given_sc: von_neumann_cond(&out, &["Sr"], &["Sc"])?,
            h_s_given_b: von_neumann_cond(&out, &["Sc", "Sr"], &["B"])?,
            h_sr_given_bsc: von_neumann_cond(&out, &["Sr"], &["B", "Sc"])?,
            i_s_b: mutual_info(&out, &["Sc", "Sr"], &["B"])?,
            i_sc_b: mutual_info(&out, &["Sc"], &["B"])?,
        })
    }

    /// `H(S_c) - H(S|B)`, the bound on `C + Q - E`.
    pub fn classical_face(&self) -> f64 {
        self.h_sc - self.h_s_given_b
    }

    /// `I(S_r:B|S_c) = I(S:B) - I(S_c:B)`.
    pub fn i_sr_b_given_sc(&self) -> f64 {
        self.i_s_b - self.i_sc_b
    }

    /// The two faces shared by both regions.
    fn common_faces(&self) -> Vec<HalfSpace> {
        vec![
            HalfSpace::new(vec![1.0, 1.0, -1.0], self.classical_face(), "C+Q-E"),
            HalfSpace::new(vec![0.0, 1.0, -1.0], -self.h_sr_given_bsc, "Q-E"),
        ]
    }

    pub fn theta(&self, label: impl Into<String>) -> RateRegion {
        let mut hs = vec![HalfSpace::new(vec![0.0, 1.0, 1.0], self.h_sr_given_sc, "Q+E")];
        hs.extend(self.common_faces());
        RateRegion::new(label, &AXES, hs)
    }

    pub fn lambda(&self, label: impl Into<String>) -> RateRegion {
        let mut hs = vec![HalfSpace::new(vec![1.0, 2.0, 0.0], self.i_s_b, "C+2Q")];
        hs.extend(self.common_faces());
        RateRegion::new(label, &AXES, hs)
    }
}

/// The region bounded by `Q+E <= H(S_r|S_c)`, `C+Q-E <= H(S_c) - H(S|B)`,
/// `Q-E <= -H(S_r|BS_c)` and nonnegativity.
pub fn theta_region(channel: &ChannelRep, ens: &InputEnsemble) -> Result<RateRegion, AsymptoticError> {
    Ok(EntropyProfile::of(channel, ens)?.theta("theta"))
}

/// As [`theta_region`] with `C+2Q <= I(S:B)` replacing the `Q+E` face.
pub fn lambda_region(channel: &ChannelRep, ens: &InputEnsemble) -> Result<RateRegion, AsymptoticError> {
    Ok(EntropyProfile::of(channel, ens)?.lambda("lambda"))
}

/// `rho x rho` regrouped as `(S_c S_c') (S_r S_r') (A A')`.
pub fn tensor_square(ens: &InputEnsemble) -> Result<InputEnsemble, AsymptoticError> {
    let (d_c, d_r, d_a) = (ens.d_c(), ens.d_r(), ens.d_a());
    let m = qcap_linalg::kron(ens.matrix(), ens.matrix());
    let m = permute_matrix(&m, &[d_c, d_r, d_a, d_c, d_r, d_a], &[0, 3, 1, 4, 2, 5]);
    Ok(InputEnsemble::new(m, d_c * d_c, d_r * d_r)?)
}

/// Convex hull of the vertices of `(1/n) Theta(N^{x n}, rho)` over the
/// family for `n = 1..=n_max`, where the `n`-copy sources are the tensor
/// powers of the family members. Sources must have maximally mixed `S`
/// marginals.
pub fn region_union(
    channel: &ChannelRep,
    family: &[InputEnsemble],
    n_max: usize,
) -> Result<RateRegion, AsymptoticError> {
    if n_max > 2 {
        return Err(AsymptoticError::TooManyCopies(n_max));
    }
    let squared = if n_max == 2 { Some(channel.tensor_power(2)?) } else { None };
    let points: Vec<Vec<Vec<f64>>> = family
        .par_iter()
        .map(|ens| {
            let r = ens.mixed_residual();
            if r > 1e-8 {
                return Err(qcap_bounds::BoundsError::SourceNotMixed(r).into());
            }
            let mut pts = theta_region(channel, ens)?.vertices;
            if let Some(ch2) = &squared {
                let reg = theta_region(ch2, &tensor_square(ens)?)?;
                pts.extend(reg.vertices.into_iter().map(|v| v.iter().map(|x| x / 2.0).collect()));
            }
            Ok(pts)
        })
        .collect::<Result<_, AsymptoticError>>()?;
    let all: Vec<Vec<f64>> = points.into_iter().flatten().collect();
    Ok(convex_hull(&format!("union n<={n_max}"), &AXES, &all))
}
