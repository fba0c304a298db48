use proptest::prelude::*;
use qcap_channels::*;
use qcap_linalg::random::random_density;
use qcap_linalg::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn on_a(m: CMat) -> DensityOperator {
    DensityOperator::on("A", m).unwrap()
}

#[test]
fn completely_depolarizing_choi_is_product_of_mixed() {
    let ch = standard_channel(StandardChannel::Depolarizing, 1.0).unwrap();
    let j = ch.to_choi().unwrap();
    assert!(max_abs(&(j.matrix() - CMat::identity(4, 4).scale(0.25))) < 1e-12);
    let s = on_a(outer(&ket(2, 1)));
    let back = choi_inverse(&j, &s).unwrap();
    assert!(max_abs(&(back.matrix() - CMat::identity(2, 2).scale(0.5))) < 1e-12);
}

#[test]
fn tensor_power_of_identity_is_identity() {
    let id = standard_channel(StandardChannel::Identity, 0.0).unwrap();
    let id2 = id.tensor_power(2).unwrap();
    assert_eq!(id2.in_layout().labels(), vec!["A_1", "A_2"]);
    assert_eq!(id2.kraus().len(), 1);
    assert!(max_abs(&(&id2.kraus()[0] - CMat::identity(4, 4))) < 1e-15);
    let once = id.tensor_power(1).unwrap();
    assert_eq!(once.in_layout().labels(), id.in_layout().labels());
}

#[test]
fn depolarizing_zero_is_identity() {
    let ch = standard_channel(StandardChannel::Depolarizing, 0.0).unwrap();
    let id = standard_channel(StandardChannel::Identity, 0.0).unwrap();
    assert!(max_abs(&(ch.choi_matrix() - id.choi_matrix())) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn choi_marginal_is_maximally_mixed(seed in any::<u64>(), d_in in 2usize..4, d_out in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(d_in, d_out, 3, &mut rng).unwrap();
        let j = ch.to_choi().unwrap();
        let a = partial_trace(&j, &["A"]).unwrap();
        let pi = CMat::identity(d_in, d_in).unscale(d_in as f64);
        prop_assert!(max_abs(&(a.matrix() - pi)) < 1e-8);
    }

    #[test]
    fn choi_inverse_matches_apply(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(3, 2, 2, &mut rng).unwrap();
        let s = on_a(random_density(3, 3, &mut rng));
        let via_choi = choi_inverse(&ch.to_choi().unwrap(), &s).unwrap();
        let direct = ch.apply(&s).unwrap();
        prop_assert!(max_abs(&(via_choi.matrix() - direct.matrix())) < 1e-9);
    }

    #[test]
    fn choi_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, 3, 2, &mut rng).unwrap();
        let j = ch.choi_matrix();
        let back = ChannelRep::from_choi(j.clone(), ch.in_layout().clone(), ch.out_layout().clone()).unwrap();
        prop_assert_eq!(back.trace_flag(), TraceFlag::TracePreserving);
        prop_assert!(max_abs(&(back.to_kraus_rep().choi_matrix() - j)) < 1e-8);
    }

    #[test]
    fn stinespring_reproduces_channel(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, 2, 3, &mut rng).unwrap();
        let st = ch.stinespring();
        let (iso, e) = st.isometry();
        prop_assert!(e <= 4);
        prop_assert!(max_abs(&(iso.adjoint() * &iso - CMat::identity(2, 2))) < 1e-8);
        let rho = random_density(2, 2, &mut rng);
        let joint = &iso * &rho * iso.adjoint();
        let b = partial_trace_matrix(&joint, &[2, e], &[0]);
        prop_assert!(max_abs(&(b - ch.apply_matrix(&rho))) < 1e-8);
        let env = partial_trace_matrix(&joint, &[2, e], &[1]);
        prop_assert!(max_abs(&(env - ch.complementary().apply_matrix(&rho))) < 1e-8);
    }

    #[test]
    fn double_complement_has_same_output_spectrum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, 3, 2, &mut rng).unwrap();
        let cc = ch.complementary().complementary();
        let rho = random_density(2, 2, &mut rng);
        let (mut a, _) = eigh(&ch.apply_matrix(&rho));
        let (mut b, _) = eigh(&cc.apply_matrix(&rho));
        a.retain(|x| x.abs() > 1e-9);
        b.retain(|x| x.abs() > 1e-9);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn apply_is_linear(seed in any::<u64>(), alpha in 0.0f64..2.0, beta in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let r = random_density(2, 2, &mut rng);
        let s = random_density(2, 1, &mut rng);
        let lhs = ch.apply_matrix(&(r.scale(alpha) + s.scale(beta)));
        let rhs = ch.apply_matrix(&r).scale(alpha) + ch.apply_matrix(&s).scale(beta);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn tensor_power_factorizes_on_products(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = standard_channel(StandardChannel::Depolarizing, p).unwrap();
        let ch2 = ch.tensor_power(2).unwrap();
        let r = random_density(2, 2, &mut rng);
        let s = random_density(2, 2, &mut rng);
        let lhs = ch2.apply_matrix(&kron(&r, &s));
        let rhs = kron(&ch.apply_matrix(&r), &ch.apply_matrix(&s));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn apply_preserves_subnormalization_tag(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let l = SystemLayout::new(vec![("A", 2), ("C", 3)]).unwrap();
        let rho = DensityOperator::new(random_density(6, 4, &mut rng), l, Normalization::Normalized)
            .unwrap()
            .scaled(0.5);
        let out = ch.apply(&rho).unwrap();
        prop_assert_eq!(out.normalization(), Normalization::Subnormalized);
        prop_assert_eq!(out.layout().labels(), vec!["B", "C"]);
        prop_assert!((out.trace() - 0.5).abs() < 1e-10);
        let c_in = partial_trace(&rho, &["C"]).unwrap();
        let c_out = partial_trace(&out, &["C"]).unwrap();
        prop_assert!(max_abs(&(c_in.matrix() - c_out.matrix())) < 1e-10);
    }
}
