use proptest::prelude::*;
use qcap_bounds::*;
use qcap_channels::{standard_channel, ChannelRep, StandardChannel};
use qcap_entropies::{hmax_smooth_with, SolverSettings};
use std::f64::consts::FRAC_PI_2;

fn identity() -> ChannelRep {
    standard_channel(StandardChannel::Identity, 0.0).unwrap()
}

fn depolarizing() -> ChannelRep {
    standard_channel(StandardChannel::Depolarizing, 1.0).unwrap()
}

/// `(1/2)(|00><00| + |11><11|)` on `S_c x A`: a classical bit sent into `A`.
fn classical_bit() -> InputEnsemble {
    FamilyPoint { d_c: 2, d_r: 1, p: 0.0, theta: FRAC_PI_2 }.ensemble(2).unwrap()
}

fn code(c: f64, q: f64, e: f64, delta: f64) -> CodeParams {
    CodeParams::new(c, q, e, delta).unwrap()
}

#[test]
fn half_qubit_half_ebit_over_identity_is_feasible() {
    let ens = InputEnsemble::maximally_entangled(2);
    let budget = SmoothingBudget { delta2: 0.5, ..Default::default() };
    let r = direct_feasible(&ens, &identity(), &code(0.0, 0.5, 0.5, 2.0), &budget).unwrap();
    assert!(r.feasible, "{r:?}");
    assert_eq!(r.slacks[1], None);
    // Both remaining inequalities are tight: q+e = 1 and q-e = 1 + log 0.5.
    assert!(r.slacks[0].unwrap().abs() < 1e-12);
    assert!(r.slacks[2].unwrap().abs() < 1e-6);
    assert!((r.achieved_error - 2.0 * 0.5f64.sqrt().sqrt()).abs() < 1e-12);
}

#[test]
fn classical_only_code_drops_the_quantum_inequality() {
    let budget = SmoothingBudget { delta1: 0.25, delta2: 0.9, ..Default::default() };
    let r = direct_feasible(&classical_bit(), &identity(), &code(0.5, 0.0, 0.0, 2.0), &budget).unwrap();
    assert_eq!(r.slacks[2], None);
    assert!((r.achieved_error - 2.0 * 0.25f64.sqrt().sqrt()).abs() < 1e-12);
    // c <= -H_max(S|B) + log 1 + log 1/4 = 0 - 2.
    assert!((r.slacks[1].unwrap() - (-2.5)).abs() < 1e-6);
    assert!(!r.feasible);
}

#[test]
fn ten_bits_through_a_qubit_is_infeasible() {
    let r = direct_feasible(&classical_bit(), &identity(), &code(10.0, 0.0, 0.0, 2.0), &SmoothingBudget::default())
        .unwrap();
    assert!(!r.feasible);
    assert!(!r.dimension_ok);
    assert!(r.slacks[1].unwrap() < 0.0);
}

#[test]
fn direct_rejects_non_uniform_sources_and_wrong_channels() {
    let skew = InputEnsemble::new(
        qcap_linalg::CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            qcap_linalg::c64(0.7, 0.0),
            qcap_linalg::c64(0.0, 0.0),
            qcap_linalg::c64(0.0, 0.0),
            qcap_linalg::c64(0.3, 0.0),
        ])),
        2,
        1,
    )
    .unwrap();
    let c = code(0.0, 0.0, 0.0, 1.0);
    assert!(matches!(
        direct_feasible(&skew, &identity(), &c, &SmoothingBudget::default()),
        Err(BoundsError::SourceNotMixed(_))
    ));
    let erasure = standard_channel(StandardChannel::Erasure, 0.5).unwrap();
    let big = InputEnsemble::maximally_entangled(3);
    assert!(matches!(
        direct_feasible(&big, &erasure, &c, &SmoothingBudget::default()),
        Err(BoundsError::Precondition(_))
    ));
}

#[test]
fn converse_at_unit_error_is_saturated() {
    let ens = InputEnsemble::maximally_entangled(2);
    let r = converse_holds(&ens, &identity(), &code(0.0, 1.0, 0.0, 1.0), 1.0).unwrap();
    assert!((r.lambda - 16.0).abs() < 1e-12);
    assert!(r.saturated && r.holds);
    assert_eq!((r.slacks[1], r.slacks[2]), (None, None));
}

#[test]
fn identity_channel_quantum_bit_satisfies_the_converse() {
    let ens = InputEnsemble::maximally_entangled(2);
    let delta = 1e-34;
    let r = converse_holds(&ens, &identity(), &code(0.0, 1.0, 0.0, delta), 1e-3).unwrap();
    assert!(!r.saturated, "{r:?}");
    assert!(r.holds);
    // -H_max^lambda(S|B) >= 1 for Phi_2, so both entropic slacks exceed
    // -log iota - 1 + 1.
    assert!(r.slacks[1].unwrap() >= 1e-3f64.log2().abs() - 1e-6);
    assert!(r.slacks[2].unwrap() >= 1e-3f64.log2().abs() - 1e-6);
    let over = converse_holds(&ens, &identity(), &code(0.0, 2.0, 0.0, delta), 1e-3).unwrap();
    assert!(!over.holds);
}

#[test]
fn entanglement_assisted_identity_and_useless_channel() {
    let ens = InputEnsemble::maximally_entangled(2);
    let b = SmoothingBudget::default();
    for (cq, slack) in [((0.0, 1.0), 0.0), ((2.0, 0.0), 0.0), ((1.0, 0.0), 1.0)] {
        let r = unlimited_direct(&ens, &identity(), cq, &b).unwrap();
        assert!(r.ok);
        assert!((r.slack.unwrap() - slack).abs() < 1e-6);
    }
    let half = SmoothingBudget { delta_prime: 0.5, ..b };
    let r = unlimited_direct(&ens, &identity(), (2.0, 0.0), &half).unwrap();
    assert!(!r.ok);
    assert!((r.parameter - 2.0 * (1.0 + 0.5f64.sqrt()).sqrt()).abs() < 1e-12);

    assert!(unlimited_direct(&ens, &depolarizing(), (0.0, 0.0), &b).unwrap().ok);
    assert!(!unlimited_direct(&ens, &depolarizing(), (0.1, 0.0), &b).unwrap().ok);
    let bad = SmoothingBudget { epsilon: 0.3, delta_prime: 0.5, ..b };
    assert!(unlimited_direct(&ens, &identity(), (0.0, 0.0), &bad).is_err());
}

#[test]
fn entanglement_assisted_converse() {
    let ens = InputEnsemble::maximally_entangled(2);
    let r = unlimited_converse(&ens, &identity(), (2.0, 0.0), 0.01, 1e-34).unwrap();
    assert!(!r.saturated && r.ok);
    assert!((r.parameter - capacity_lambda(1e-34, 0.01)).abs() < 1e-15);
    assert!(r.slack.unwrap() >= 0.01f64.log2().abs() - 1e-6);
    let v = unlimited_converse(&ens, &identity(), (50.0, 0.0), 0.01, 0.5).unwrap();
    assert!(v.saturated && v.ok && v.slack.is_none());
}

#[test]
fn padded_ensemble_reproduces_the_reduction_identities() {
    let settings = SolverSettings { gap_tol: 1e-11, ..Default::default() };
    let ens = FamilyPoint { d_c: 1, d_r: 2, p: 0.3, theta: 0.0 }.ensemble(2).unwrap();
    let padded = ens.pad_classical(2);
    assert!(padded.mixed_residual() < 1e-12);
    for ch in [identity(), standard_channel(StandardChannel::AmplitudeDamping, 0.3).unwrap()] {
        let out = ens.output(&ch).unwrap();
        let pout = padded.output(&ch).unwrap();
        for eps in [0.0, 0.05] {
            let h = hmax_smooth_with(&out, &["Sc", "Sr"], &["B"], eps, &settings).unwrap().value;
            let hr = hmax_smooth_with(&pout, &["Sr"], &["B", "Sc"], eps, &settings).unwrap().value;
            let hs = hmax_smooth_with(&pout, &["Sc", "Sr"], &["B"], eps, &settings).unwrap().value;
            assert!((h - hr).abs() < 1e-8, "eps {eps}: {h} vs {hr}");
            assert!(hr >= hs - 1.0 - 1e-8, "eps {eps}: {hr} vs {hs}");
        }
    }
}

#[test]
fn direct_points_pass_the_converse() {
    let family = [
        InputEnsemble::maximally_entangled(2),
        classical_bit(),
        FamilyPoint { d_c: 1, d_r: 1, p: 0.0, theta: 0.0 }.ensemble(2).unwrap(),
    ];
    for ch in [identity(), depolarizing()] {
        for delta in [1e-34, 0.5, 1.0] {
            for ens in &family {
                for (c, q, e) in [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.5, 0.5)] {
                    let k = code(c, q, e, delta);
                    let (_, d) = best_direct_budget(ens, &ch, &k, &[0.0]).unwrap();
                    if !d.feasible {
                        continue;
                    }
                    for iota in [1.0, 1e-2, 1e-4] {
                        let r = converse_holds(ens, &ch, &k, iota).unwrap();
                        assert!(r.holds, "{c},{q},{e} at delta {delta}, iota {iota}: {r:?}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn feasibility_is_monotone_in_delta(c in 0.0f64..1.0, q in 0.0f64..1.0, e in 0.0f64..1.0, which in 0usize..3) {
        let ens = match which {
            0 => InputEnsemble::maximally_entangled(2),
            1 => classical_bit(),
            _ => FamilyPoint { d_c: 2, d_r: 2, p: 0.1, theta: 0.4 }.ensemble(2).unwrap(),
        };
        let mut was_feasible = false;
        for delta in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let (budget, r) = best_direct_budget(&ens, &identity(), &code(c, q, e, delta), &[0.0, 0.01]).unwrap();
            prop_assert!(!was_feasible || r.feasible, "lost feasibility at delta {}", delta);
            if r.feasible {
                prop_assert!(r.achieved_error <= delta * (1.0 + 1e-12));
                let again = direct_feasible(&ens, &identity(), &code(c, q, e, delta), &budget).unwrap();
                prop_assert!(again.feasible);
            }
            was_feasible |= r.feasible;
        }
    }
}

#[test]
fn capacity_estimates_on_reference_channels() {
    let quick = SearchConfig { grid_points: 3, refine_iters: 0, delta_primes: 2, ..Default::default() };
    let deph = standard_channel(StandardChannel::Dephasing, 1.0).unwrap();
    let r = capacity_estimate(&deph, Scenario::ClassicalNone, 2.0, &quick).unwrap();
    assert!((r.lower - 1.0).abs() < 1e-6, "{r:?}");
    assert_eq!(r.upper, None);

    for s in [
        Scenario::ClassicalNone,
        Scenario::ClassicalUnlimited,
        Scenario::QuantumNone,
        Scenario::QuantumUnlimited,
    ] {
        let r = capacity_estimate(&depolarizing(), s, 1.0, &quick).unwrap();
        assert_eq!(r.lower, 0.0, "{}", s.name());
    }

    let r = capacity_estimate(&identity(), Scenario::QuantumNone, 0.5, &quick).unwrap();
    assert_eq!(r.lower, 0.0);
    assert_eq!(r.upper, None);
    let r = capacity_estimate(&identity(), Scenario::QuantumNone, 2.0, &quick).unwrap();
    assert!((r.lower - 1.0).abs() < 1e-6);

    let tiny = SearchConfig { iotas: vec![1e-3, 1e-4], ..quick };
    let r = capacity_estimate(&identity(), Scenario::QuantumNone, 1e-34, &tiny).unwrap();
    let up = r.upper.expect("non-vacuous converse");
    assert!(r.lower <= up);
    assert!(up >= 1.0 + 1e-3f64.log2().abs() - 1e-6);
}

#[test]
fn refinement_never_lowers_the_grid_optimum() {
    let amp = standard_channel(StandardChannel::AmplitudeDamping, 0.2).unwrap();
    let grid = SearchConfig { grid_points: 3, refine_iters: 0, delta_primes: 1, ..Default::default() };
    let refined = SearchConfig { refine_iters: 10, ..grid.clone() };
    let a = capacity_estimate(&amp, Scenario::ClassicalUnlimited, 2.0, &grid).unwrap();
    let b = capacity_estimate(&amp, Scenario::ClassicalUnlimited, 2.0, &refined).unwrap();
    assert!(b.lower >= a.lower);
    assert!(a.lower > 0.5, "{a:?}");
}

fn small_family() -> Vec<InputEnsemble> {
    vec![
        InputEnsemble::maximally_entangled(2),
        classical_bit(),
        FamilyPoint { d_c: 2, d_r: 2, p: 0.0, theta: FRAC_PI_2 }.ensemble(2).unwrap(),
    ]
}

#[test]
fn inner_region_sits_inside_outer_region() {
    let grid = RegionGrid { delta_primes: 2, ..Default::default() };
    for ch in [identity(), depolarizing()] {
        for delta in [0.5, 1.0] {
            let r = simultaneous_region(&ch, delta, &small_family(), &grid).unwrap();
            assert!(r.skipped.is_empty());
            for (inner, outer) in r.inner.chunks(2).zip(&r.outer) {
                for reg in inner {
                    for v in &reg.vertices {
                        assert!(outer.max_violation(v) <= 1e-8, "{v:?} outside {}", outer.label);
                    }
                }
            }
        }
    }
}

#[test]
fn useless_channel_inner_region_is_the_origin() {
    let r = simultaneous_region(&depolarizing(), 1.0, &small_family(), &RegionGrid::default()).unwrap();
    assert_eq!(r.inner_vertices(), vec![vec![0.0, 0.0]]);
}

#[test]
fn identity_inner_region_at_unit_error_stays_at_the_origin() {
    // With delta' <= 1/16 the log delta' penalty exceeds what a qubit can
    // carry, so not even half a classical bit is certified.
    let r = simultaneous_region(&identity(), 1.0, &small_family(), &RegionGrid::default()).unwrap();
    assert!(!r.inner_contains(&[0.5, 0.0], 1e-9));
    assert_eq!(r.inner_vertices(), vec![vec![0.0, 0.0]]);
    // The outer region is vacuous apart from the dimension face.
    assert!(r.outer_contains(&[5.0, 1.0], 0.0));
}
