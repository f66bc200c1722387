use nosig_core::boxworld::{
    chsh_value, deterministic_strategies, is_nosignaling_box, pr_box, singlet_box, uniform_box,
};
use nosig_core::dsum::{ds_commutation_defect, ds_local_effect_span, random_local_op, DSumModel};
use nosig_core::numkit::{
    herm_coords, partial_trace_matrix, span_rank, tensor, CMatrix, HermOp, Side, RANK_TOL,
};
use nosig_core::opcore::classical::{ClassicalBipartite, ClassicalModel};
use nosig_core::opcore::harness::{commutation_nosig_suite, framework_suite};
use nosig_core::opcore::ModelSampler;
use nosig_core::qmodel::{
    partial_positivity_min_eig, quantum_nosig_check, random_instrument, DensityOp,
    QuantumBipartite, QuantumModel,
};
use nosig_core::sampling::{complex_gaussian, ginibre_state, random_psd, trial_rng, uniform};
use nosig_core::tomo::{affine_dims, expand_in_ic, quantum_minimal_ic, Observable};
use proptest::prelude::*;

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative_and_bilinear(seed in any::<u64>(), d in 1usize..4, lambda in -2.0f64..2.0) {
        let mut rng = trial_rng(seed, 0);
        let a = complex_gaussian(&mut rng, d, d);
        let a2 = complex_gaussian(&mut rng, d, d);
        let b = complex_gaussian(&mut rng, 2, 2);
        let c = complex_gaussian(&mut rng, 2, d);
        let lhs = tensor(&tensor(&a, &b), &c);
        let rhs = tensor(&a, &tensor(&b, &c));
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);

        let s = nalgebra::Complex::new(lambda, 0.0);
        let lin = tensor(&(a.clone() * s + &a2), &b);
        let parts = tensor(&a, &b) * s + tensor(&a2, &b);
        prop_assert!(max_diff(&lin, &parts) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut rng = trial_rng(seed, 1);
        let x = complex_gaussian(&mut rng, d1, d1);
        let y = complex_gaussian(&mut rng, d2, d2);
        let xy = tensor(&x, &y);
        let keep_x = partial_trace_matrix(&xy, d1, d2, Side::Two).unwrap();
        prop_assert!(max_diff(&keep_x, &(x.clone() * y.trace())) < 1e-12);
        let keep_y = partial_trace_matrix(&xy, d1, d2, Side::One).unwrap();
        prop_assert!(max_diff(&keep_y, &(y * x.trace())) < 1e-12);
    }

    #[test]
    fn span_rank_ignores_order_and_positive_scale(seed in any::<u64>(), n in 1usize..8, k in 0usize..8) {
        let mut rng = trial_rng(seed, 2);
        let ops: Vec<HermOp> = (0..n).map(|_| random_psd(&mut rng, 2)).collect();
        let base = span_rank(&ops, RANK_TOL).unwrap();
        let mut shuffled: Vec<HermOp> = ops.iter().map(|o| o.scale(0.1 + 5.0 * uniform(&mut rng))).collect();
        shuffled.rotate_left(k % n);
        prop_assert_eq!(span_rank(&shuffled, RANK_TOL).unwrap(), base);
        prop_assert!(base <= 4);
    }

    #[test]
    fn herm_coords_preserve_hilbert_schmidt(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = trial_rng(seed, 3);
        let a = random_psd(&mut rng, d);
        let b = random_psd(&mut rng, d);
        let dot: f64 = herm_coords(a.matrix()).iter().zip(herm_coords(b.matrix())).map(|(x, y)| x * y).sum();
        prop_assert!((dot - a.trace_product(&b)).abs() < 1e-10);
    }

    #[test]
    fn partial_positivity(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let mut rng = trial_rng(seed, 4);
        let a = random_psd(&mut rng, d1);
        let r = DensityOp::new(random_psd(&mut rng, d1 * d2)).unwrap();
        prop_assert!(partial_positivity_min_eig(&a, &r).unwrap() >= -1e-10);
    }

    #[test]
    fn instruments_never_signal(seed in any::<u64>(), outcomes in 2usize..5, d2 in 2usize..4) {
        let mut rng = trial_rng(seed, 5);
        let r = DensityOp::new(ginibre_state(&mut rng, 2 * d2)).unwrap();
        let inst = random_instrument(&mut rng, 2, outcomes);
        let rep = quantum_nosig_check(&r, &inst, 2, d2, 1e-10).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn direct_sum_ops_commute(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let mut rng = trial_rng(seed, 6);
        let a = random_local_op(&mut rng, Side::One, d1);
        let b = random_local_op(&mut rng, Side::Two, d2);
        prop_assert!(ds_commutation_defect(&a, &b, d1, d2).unwrap() <= 1e-12);
    }

    #[test]
    fn chsh_is_affine(i in 0usize..16, j in 0usize..16, lambda in 0.0f64..=1.0) {
        let all = deterministic_strategies();
        let mix = all[i].mix(lambda, &all[j]).unwrap();
        let want = lambda * chsh_value(&all[i]) + (1.0 - lambda) * chsh_value(&all[j]);
        prop_assert!((chsh_value(&mix) - want).abs() <= 1e-12);
        let q = pr_box().mix(lambda, &uniform_box()).unwrap();
        prop_assert!((chsh_value(&q) - 4.0 * lambda).abs() <= 1e-12);
        prop_assert!(is_nosignaling_box(&q, 1e-15));
    }

    #[test]
    fn singlet_boxes_do_not_signal(angles in prop::array::uniform4(-7.0f64..7.0)) {
        let bx = singlet_box(angles);
        prop_assert!(is_nosignaling_box(&bx, 1e-10));
        prop_assert!(chsh_value(&bx).abs() <= 2.0 * 2f64.sqrt() + 1e-9);
    }
}

#[test]
fn framework_laws_hold_in_every_model() {
    let classical = framework_suite(&ClassicalModel::new(3).unwrap(), 1, 100, 3, 1e-9).unwrap();
    let quantum = framework_suite(&QuantumModel::new(2).unwrap(), 1, 100, 3, 1e-9).unwrap();
    let dsum = framework_suite(&DSumModel::new(2, 2).unwrap(), 1, 100, 4, 1e-9).unwrap();
    for r in [classical, quantum, dsum] {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn commutation_gives_no_signaling_in_every_composite() {
    let reports = [
        commutation_nosig_suite(&ClassicalBipartite::new(2, 2).unwrap(), 2, 50, 3, 1e-10).unwrap(),
        commutation_nosig_suite(&QuantumBipartite::new(2, 2).unwrap(), 2, 50, 3, 1e-10).unwrap(),
        commutation_nosig_suite(&DSumModel::new(2, 3).unwrap(), 2, 50, 3, 1e-10).unwrap(),
    ];
    for r in reports {
        assert!(r.pass, "{r:?}");
        assert_eq!(r.witness.unwrap()["commuting_trials"], 50);
    }
}

#[test]
fn expansions_reconstruct_random_effects() {
    for d in [2, 3] {
        let q = QuantumModel::new(d).unwrap();
        let obs = Observable::new(&q, quantum_minimal_ic(d).unwrap()).unwrap();
        let mut rng = trial_rng(9, d as u64);
        for _ in 0..100 {
            let e = nosig_core::opcore::TheoryModel::effect_of(&q, &q.random_transform(&mut rng));
            let x = expand_in_ic(&e, &obs, &q).unwrap();
            assert!(x.residual <= 1e-9);
        }
    }
    let cl = ClassicalModel::new(4).unwrap();
    let obs = Observable::new(&cl, cl.point_observable()).unwrap();
    let mut rng = trial_rng(9, 99);
    for _ in 0..100 {
        let e = nosig_core::opcore::TheoryModel::effect_of(&cl, &cl.random_transform(&mut rng));
        assert!(expand_in_ic(&e, &obs, &cl).unwrap().residual <= 1e-9);
    }
}

#[test]
fn state_and_effect_dimensions_are_dual() {
    let dims = [
        affine_dims(&ClassicalModel::new(3).unwrap()).unwrap(),
        affine_dims(&QuantumModel::new(2).unwrap()).unwrap(),
        affine_dims(&QuantumModel::new(4).unwrap()).unwrap(),
        affine_dims(&DSumModel::new(2, 3).unwrap()).unwrap(),
    ];
    for (s, e) in dims {
        assert_eq!(s + 1, e);
    }
}

#[test]
fn direct_sum_span_is_block_diagonal() {
    for (d1, d2) in [(1, 2), (2, 2), (2, 3), (3, 3)] {
        let n = (d1 + d2) * (d1 + d2);
        assert_eq!(
            ds_local_effect_span(d1, d2, n + 4).unwrap(),
            d1 * d1 + d2 * d2
        );
    }
}
