use crate::{ChannelError, ChannelRep};
use qcap_linalg::random::ginibre;
use qcap_linalg::{c64, CMat, SystemLayout};
use rand::Rng;
use std::str::FromStr;

/// Qubit channels with a single real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardChannel {
    Identity,
    /// `rho -> (1-p) rho + p I/2`.
    Depolarizing,
    /// `rho -> (1-p/2) rho + (p/2) Z rho Z`.
    Dephasing,
    AmplitudeDamping,
    /// `rho -> (1-p) rho + p |e><e|` with flag `|e> = |2>`.
    Erasure,
}

impl FromStr for StandardChannel {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "identity" | "id" => Ok(Self::Identity),
            "depolarizing" => Ok(Self::Depolarizing),
            "dephasing" => Ok(Self::Dephasing),
            "amplitude_damping" => Ok(Self::AmplitudeDamping),
            "erasure" => Ok(Self::Erasure),
            _ => Err(ChannelError::UnknownStandard(s.to_string())),
        }
    }
}

impl StandardChannel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Depolarizing => "depolarizing",
            Self::Dephasing => "dephasing",
            Self::AmplitudeDamping => "amplitude_damping",
            Self::Erasure => "erasure",
        }
    }
}

fn m2(a: [[(f64, f64); 2]; 2]) -> CMat {
    CMat::from_fn(2, 2, |i, j| c64(a[i][j].0, a[i][j].1))
}

/// Qubit channel `A -> B` from the zoo. `param` must lie in `[0, 1]`.
pub fn standard_channel(kind: StandardChannel, param: f64) -> Result<ChannelRep, ChannelError> {
    if !(0.0..=1.0).contains(&param) {
        return Err(ChannelError::BadParam {
            name: kind.name().to_string(),
            param,
        });
    }
    let p = param;
    let x = m2([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]]);
    let y = m2([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]]);
    let z = m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]]);
    let id = CMat::identity(2, 2);
    let kraus = match kind {
        StandardChannel::Identity => vec![id],
        StandardChannel::Depolarizing => {
            let s = (p / 4.0).sqrt();
            vec![
                id.scale((1.0 - 3.0 * p / 4.0).sqrt()),
                x.scale(s),
                y.scale(s),
                z.scale(s),
            ]
        }
        StandardChannel::Dephasing => {
            vec![id.scale((1.0 - p / 2.0).sqrt()), z.scale((p / 2.0).sqrt())]
        }
        StandardChannel::AmplitudeDamping => vec![
            m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), ((1.0 - p).sqrt(), 0.0)]]),
            m2([[(0.0, 0.0), (p.sqrt(), 0.0)], [(0.0, 0.0), (0.0, 0.0)]]),
        ],
        StandardChannel::Erasure => {
            let keep = CMat::from_fn(3, 2, |b, a| {
                c64(if a == b { (1.0 - p).sqrt() } else { 0.0 }, 0.0)
            });
            let mut out = vec![keep];
            for a in 0..2 {
                let mut k = CMat::zeros(3, 2);
                k[(2, a)] = c64(p.sqrt(), 0.0);
                out.push(k);
            }
            out
        }
    };
    ChannelRep::kraus_ab(kraus)
}

/// Haar-random Stinespring isometry `A -> B x E`, returned in Kraus form.
pub fn random_channel<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    env_dim: usize,
    rng: &mut R,
) -> Result<ChannelRep, ChannelError> {
    let rows = d_out * env_dim;
    if rows < d_in {
        return Err(qcap_linalg::LinalgError::Invalid(format!(
            "d_out * env_dim = {rows} is smaller than d_in = {d_in}"
        ))
        .into());
    }
    let g = ginibre(rows, d_in, rng);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Column phases from the diagonal of r make the distribution Haar.
    let iso = CMat::from_fn(rows, d_in, |i, j| {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        q[(i, j)] * ph
    });
    let kraus: Vec<CMat> = (0..env_dim)
        .map(|k| CMat::from_fn(d_out, d_in, |b, a| iso[(b * env_dim + k, a)]))
        .collect();
    ChannelRep::from_kraus(
        kraus,
        SystemLayout::single("A", d_in),
        SystemLayout::single("B", d_out),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TraceFlag;
    use qcap_linalg::{max_abs, outer, ket};
    use rand::SeedableRng;

    #[test]
    fn zoo_is_trace_preserving() {
        for k in [
            StandardChannel::Identity,
            StandardChannel::Depolarizing,
            StandardChannel::Dephasing,
            StandardChannel::AmplitudeDamping,
            StandardChannel::Erasure,
        ] {
            for p in [0.0, 0.3, 1.0] {
                let ch = standard_channel(k, p).unwrap();
                assert_eq!(ch.trace_flag(), TraceFlag::TracePreserving, "{k:?} {p}");
            }
        }
        assert_eq!(standard_channel(StandardChannel::Erasure, 0.2).unwrap().d_out(), 3);
    }

    #[test]
    fn amplitude_damping_kraus_and_residual() {
        let ch = standard_channel(StandardChannel::AmplitudeDamping, 0.3).unwrap();
        let k = ch.kraus();
        assert!((k[0][(1, 1)].re - 0.7f64.sqrt()).abs() < 1e-15);
        assert!((k[1][(0, 1)].re - 0.3f64.sqrt()).abs() < 1e-15);
        let s = k.iter().fold(CMat::zeros(2, 2), |acc, x| acc + x.adjoint() * x);
        assert!(max_abs(&(s - CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn dephasing_one_kills_coherence() {
        let ch = standard_channel(StandardChannel::Dephasing, 1.0).unwrap();
        let plus = outer(&(ket(2, 0) + ket(2, 1))).scale(0.5);
        assert!(max_abs(&(ch.apply_matrix(&plus) - CMat::identity(2, 2).scale(0.5))) < 1e-14);
    }

    #[test]
    fn names_parse() {
        assert_eq!(
            "amplitude-damping".parse::<StandardChannel>().unwrap(),
            StandardChannel::AmplitudeDamping
        );
        assert!("teleport".parse::<StandardChannel>().is_err());
        assert!(standard_channel(StandardChannel::Depolarizing, 1.5).is_err());
    }

    #[test]
    fn random_channel_is_tp() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        assert_eq!(ch.trace_flag(), TraceFlag::TracePreserving);
    }
}
