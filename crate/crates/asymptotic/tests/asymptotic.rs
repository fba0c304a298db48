use proptest::prelude::*;
use qcap_asymptotic::*;
use qcap_bounds::FamilyPoint;
use qcap_channels::{random_channel, standard_channel, ChannelRep, StandardChannel};
use qcap_entropies::{cond_mutual_info, von_neumann};
use qcap_linalg::CMat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

fn identity() -> ChannelRep {
    standard_channel(StandardChannel::Identity, 0.0).unwrap()
}

fn useless() -> ChannelRep {
    standard_channel(StandardChannel::Depolarizing, 1.0).unwrap()
}

fn family(d_c: usize, d_r: usize, p: f64, theta: f64) -> InputEnsemble {
    FamilyPoint { d_c, d_r, p, theta }.ensemble(2).unwrap()
}

fn random_instance(seed: u64, shape: usize, p: f64, theta: f64) -> (ChannelRep, InputEnsemble) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ch = random_channel(2, 2, 2, &mut rng).unwrap();
    let (d_c, d_r) = [(1, 2), (2, 1), (2, 2)][shape];
    (ch, family(d_c, d_r, p, theta))
}

#[test]
fn identity_with_a_maximally_entangled_source_reaches_one_qubit() {
    let phi = InputEnsemble::maximally_entangled(2);
    let theta = theta_region(&identity(), &phi).unwrap();
    assert!(theta.contains(&[0.0, 1.0, 0.0], 1e-9));
    assert!(!theta.contains(&[0.0, 1.01, 0.0], 1e-9));
    let lambda = lambda_region(&identity(), &phi).unwrap();
    assert!(lambda.contains(&[0.0, 1.0, 0.0], 1e-9));
    // Superdense coding: two bits with one ebit.
    assert!(lambda.contains(&[2.0, 0.0, 1.0], 1e-9));
}

#[test]
fn useless_channel_collapses_to_the_entanglement_axis() {
    for ens in [InputEnsemble::maximally_entangled(2), family(2, 2, 0.3, 0.7)] {
        let p = EntropyProfile::of(&useless(), &ens).unwrap();
        let hr = p.h_sr_given_sc;
        let theta = p.theta("theta");
        for v in &theta.vertices {
            assert!(v[0].abs() < 1e-9 && v[1].abs() < 1e-9, "{v:?}");
            assert!(v[2] > -1e-9 && v[2] < hr + 1e-9);
        }
        assert!(theta.contains(&[0.0, 0.0, hr], 1e-9));
        let lambda = p.lambda("lambda");
        assert!(lambda.contains(&[0.0, 0.0, hr + 5.0], 1e-9));
        assert!(!lambda.contains(&[0.0, 0.0, hr - 0.1], 1e-9));
        assert!(!lambda.contains(&[1e-3, 0.0, hr + 5.0], 1e-9));
        assert!(!lambda.contains(&[0.0, 1e-3, hr + 5.0], 1e-9));
    }
}

#[test]
fn chain_rule_for_conditional_mutual_information() {
    for seed in 0..6 {
        let (ch, ens) = random_instance(seed, (seed % 3) as usize, 0.2, 0.9);
        let p = EntropyProfile::of(&ch, &ens).unwrap();
        let out = ens.output(&ch).unwrap();
        let direct = cond_mutual_info(&out, &["Sr"], &["B"], &["Sc"]).unwrap();
        assert!((p.i_sr_b_given_sc() - direct).abs() < 1e-9);
        let h_s = von_neumann(&out, &["Sc", "Sr"]).unwrap();
        assert!((p.h_sc + p.h_sr_given_sc - h_s).abs() < 1e-9);
    }
}

#[test]
fn vertex_subset_matches_the_sign_of_the_coherent_information() {
    // Identity with Phi: coherent information +1.
    let v = lambda_vertices(&identity(), &InputEnsemble::maximally_entangled(2)).unwrap();
    assert!(!v.degenerate && (v.coherent_info - 1.0).abs() < 1e-9);
    let labels: Vec<&str> = v.vertices.iter().map(|x| x.label).collect();
    assert_eq!(labels, ["P0", "P1+", "P2", "P3+", "P4", "P5", "P6"]);
    // Depolarizing noise makes it negative.
    let dep = standard_channel(StandardChannel::Depolarizing, 0.9).unwrap();
    let v = lambda_vertices(&dep, &InputEnsemble::maximally_entangled(2)).unwrap();
    assert!(v.coherent_info < -1e-3);
    let labels: Vec<&str> = v.vertices.iter().map(|x| x.label).collect();
    assert_eq!(labels, ["P1-", "P2", "P3-", "P4", "P6"]);
    // A purely classical source has zero coherent information.
    let v = lambda_vertices(&identity(), &family(2, 1, 0.0, FRAC_PI_2)).unwrap();
    assert!(v.degenerate);
    assert_eq!(v.vertices.len(), 9);
}

fn check_vertices(ch: &ChannelRep, ens: &InputEnsemble) {
    let v = lambda_vertices(ch, ens).unwrap();
    let lambda = lambda_region(ch, ens).unwrap();
    for lv in &v.vertices {
        assert!(lambda.contains(&lv.point, 1e-8), "{} = {:?} outside", lv.label, lv.point);
        if !v.degenerate {
            let tight = lambda.tight(&lv.point, 1e-8);
            assert!(tight.len() >= 3, "{} tight on {tight:?}", lv.label);
        }
    }
    if v.degenerate {
        return;
    }
    // Every enumerated vertex of the polytope is one of the closed forms.
    for x in &lambda.vertices {
        assert!(
            v.vertices.iter().any(|lv| lv.point.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-8)),
            "vertex {x:?} missing from {:?}",
            v.vertices
        );
    }
}

#[test]
fn closed_form_vertices_are_the_polytope_vertices() {
    check_vertices(&identity(), &InputEnsemble::maximally_entangled(2));
    check_vertices(&standard_channel(StandardChannel::Depolarizing, 0.9).unwrap(), &family(2, 2, 0.1, 0.4));
    check_vertices(&standard_channel(StandardChannel::AmplitudeDamping, 0.3).unwrap(), &family(2, 2, 0.0, 1.1));
    for seed in 0..8 {
        let (ch, ens) = random_instance(seed, 2, 0.05 * seed as f64, 0.3 + 0.1 * seed as f64);
        check_vertices(&ch, &ens);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_lies_inside_lambda(seed in 0u64..1000, shape in 0usize..3, p in 0.0f64..1.0, theta in 0.0f64..FRAC_PI_2) {
        let (ch, ens) = random_instance(seed, shape, p, theta);
        let prof = EntropyProfile::of(&ch, &ens).unwrap();
        let inner = prof.theta("theta");
        let outer = prof.lambda("lambda");
        for v in &inner.vertices {
            prop_assert!(outer.contains(v, 1e-9), "{v:?}");
        }
    }

    #[test]
    fn union_is_convex(t in 0.0f64..1.0, i in 0usize..64, j in 0usize..64) {
        let fam = [InputEnsemble::maximally_entangled(2), family(2, 1, 0.0, FRAC_PI_2), family(2, 2, 0.3, 0.5)];
        let union = region_union(&dephasing(), &fam, 1).unwrap();
        let vs = &union.vertices;
        let (a, b) = (&vs[i % vs.len()], &vs[j % vs.len()]);
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        prop_assert!(union.contains(&mid, 1e-9));
    }
}

fn dephasing() -> ChannelRep {
    standard_channel(StandardChannel::Dephasing, 0.4).unwrap()
}

#[test]
fn identity_union_reaches_both_axes() {
    let fam = [InputEnsemble::maximally_entangled(2), family(2, 1, 0.0, FRAC_PI_2)];
    let union = region_union(&identity(), &fam, 1).unwrap();
    assert!(union.contains(&[1.0, 0.0, 0.0], 1e-9));
    assert!(union.contains(&[0.0, 1.0, 0.0], 1e-9));
    assert!(union.contains(&[0.5, 0.5, 0.0], 1e-9));
    assert!(!union.contains(&[1.1, 0.0, 0.0], 1e-9));
}

#[test]
fn two_copy_union_contains_the_single_copy_union() {
    let ch = standard_channel(StandardChannel::AmplitudeDamping, 0.25).unwrap();
    let fam = [InputEnsemble::maximally_entangled(2), family(2, 1, 0.0, FRAC_PI_2)];
    let one = region_union(&ch, &fam, 1).unwrap();
    let two = region_union(&ch, &fam, 2).unwrap();
    for v in &one.vertices {
        assert!(two.contains(v, 1e-8), "{v:?}");
    }
    assert!(matches!(region_union(&ch, &fam, 3), Err(AsymptoticError::TooManyCopies(3))));
}

#[test]
fn union_rejects_sources_with_a_biased_marginal() {
    let skew = InputEnsemble::from_blocks(
        &[CMat::from_diagonal(&nalgebra::DVector::from_vec(
            [0.9, 0.0, 0.0, 0.1].map(|x| qcap_linalg::c64(x, 0.0)).to_vec(),
        ))],
        2,
    )
    .unwrap();
    assert!(region_union(&identity(), &[skew], 1).is_err());
}

#[test]
fn type_counts_and_class_sizes() {
    assert_eq!(enumerate_types(2, 2).len(), 3);
    for (alphabet, n) in [(2, 5), (3, 4), (4, 3)] {
        let types = enumerate_types(alphabet, n);
        assert!(types.len() <= (n + 1).pow(alphabet as u32));
        let total: u128 = types.iter().map(type_class_size).sum();
        assert_eq!(total, (alphabet as u128).pow(n as u32));
    }
    assert_eq!(type_of(&[0, 2, 2, 1], 3).counts, vec![1, 1, 2]);
}

#[test]
fn type_projectors_resolve_the_identity_and_flatten_the_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = qcap_linalg::random::ginibre(3, 3, &mut rng);
    let rho = {
        let m = &g * g.adjoint();
        let tr = m.trace();
        m.unscale(tr.re)
    };
    let n = 3;
    let projs = state_type_projectors(&rho, n).unwrap();
    let dim = 27;
    let mut sum = CMat::zeros(dim, dim);
    let (evals, _) = qcap_linalg::eigh(&rho);
    let rho_n = qcap_linalg::kron_all(&vec![rho.clone(); n]);
    for (a, (t, p)) in projs.iter().enumerate() {
        sum += p;
        assert!((p * p - p).norm() < 1e-10);
        assert!((p.trace().re - type_class_size(t) as f64).abs() < 1e-9);
        for (_, q) in projs.iter().skip(a + 1) {
            assert!((p * q).norm() < 1e-10);
        }
        let q_t: f64 = t.counts.iter().zip(&evals).map(|(&c, &l)| l.powi(c as i32)).product();
        assert!((p * &rho_n * p - p.scale(q_t)).norm() < 1e-10);
    }
    assert!((sum - CMat::identity(dim, dim)).norm() < 1e-10);
}
