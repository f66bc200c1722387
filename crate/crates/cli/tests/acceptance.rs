//! End-to-end acceptance criteria. Each criterion prints one `PASS`/`FAIL` line.

use std::f64::consts::SQRT_2;
use std::process::Command;
use std::time::{Duration, Instant};

use nosig_core::boxworld::{
    chsh_value, classical_chsh_max, deterministic_strategies, is_nosignaling_box, pr_box,
    singlet_box, OPTIMAL_ANGLES,
};
use nosig_core::dsum::{
    ds_commutation_defect, ds_condition, ds_conditional_quotient, ds_local_prob, ds_nosig_check,
    random_local_action, random_local_op, DSumModel,
};
use nosig_core::numkit::{max_abs_diff, CMatrix, Side};
use nosig_core::opcore::classical::ClassicalModel;
use nosig_core::opcore::harness::framework_suite;
use nosig_core::opcore::{ModelSampler, EPS_COND};
use nosig_core::qmodel::fixtures::{singlet, x_instrument, z_instrument};
use nosig_core::qmodel::{
    apply_quantum_op, instrument_nosig_suite, local_embed, local_state, partial_positivity_suite,
    steering_witness, trace_reduced_suite, QuantumBipartite, QuantumModel,
};
use nosig_core::sampling::trial_rng;
use nosig_core::tomo::{dimension_identity_check, local_observability_audit, LocalTomography};
use serde_json::Value;

fn report(id: u32, name: &str, ok: bool, detail: String) -> bool {
    println!(
        "criterion {id:>2} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn criterion_1() -> bool {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for d1 in [2, 3] {
        for d2 in [2, 3] {
            worst = worst.min(partial_positivity_suite(101, 500, d1, d2).unwrap());
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "partial positivity",
        worst >= -1e-10 && elapsed < Duration::from_secs(5),
        format!("min eig {worst:.3e} over 4x500 pairs in {elapsed:.2?}"),
    )
}

fn criterion_2() -> bool {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (d1, d2) in [(2, 2), (2, 3), (3, 2)] {
        let r = trace_reduced_suite(202, 200, d1, d2).unwrap();
        let w = r.witness.clone().unwrap();
        ok &= r.pass && w["violations"] == 0 && w["trace_preserving_samples"].as_u64().unwrap() > 0;
        detail.push(format!(
            "({d1},{d2}) worst {:.1e} violations {}",
            r.max_defect, w["violations"]
        ));
    }
    let elapsed = start.elapsed();
    report(
        2,
        "trace preservation iff reduced state preserved",
        ok && elapsed < Duration::from_secs(10),
        format!("{} in {elapsed:.2?}", detail.join("; ")),
    )
}

fn criterion_3() -> bool {
    let r = instrument_nosig_suite(303, 200, 2, 3, 1e-10).unwrap();
    let r2 = instrument_nosig_suite(304, 200, 3, 2, 1e-10).unwrap();
    let rho = singlet();
    let half = CMatrix::identity(2, 2).scale(0.5);
    let mut fixture = 0.0f64;
    for inst in [z_instrument(), x_instrument()] {
        let after = apply_quantum_op(&local_embed(&inst.total(), 2, Side::One), &rho).unwrap();
        let bob = local_state(&after, 2, 2, Side::Two).unwrap();
        fixture = fixture.max(max_abs_diff(bob.matrix(), &half));
    }
    report(
        3,
        "complete instruments leave the remote state invariant",
        r.pass && r2.pass && fixture <= 1e-12,
        format!(
            "random {:.1e}/{:.1e}, singlet z/x vs I/2 {fixture:.1e}",
            r.max_defect, r2.max_defect
        ),
    )
}

fn criterion_4() -> bool {
    let p0 = z_instrument().outcomes()[0].clone();
    let r = steering_witness(&singlet(), &p0, 2, 2, 1e-10).unwrap();
    let w = r.witness.clone().unwrap();
    let shift = w["conditional_shift"].as_f64().unwrap();
    let avg = w["instrument_defect"].as_f64().unwrap();
    report(
        4,
        "selective outcome steers, full instrument does not",
        (shift - 1.0).abs() <= 1e-10 && avg <= 1e-10 && r.pass,
        format!("conditional shift {shift:.12}, instrument average defect {avg:.1e}"),
    )
}

fn criterion_5() -> bool {
    let mut comm = 0.0f64;
    let mut nosig = 0.0f64;
    let mut quotient = 0.0f64;
    for (d1, d2) in [(2, 2), (2, 3)] {
        let m = DSumModel::new(d1, d2).unwrap();
        for i in 0..200 {
            let mut rng = trial_rng(505, i);
            let a = random_local_op(&mut rng, Side::One, d1);
            let b = random_local_op(&mut rng, Side::Two, d2);
            comm = comm.max(ds_commutation_defect(&a, &b, d1, d2).unwrap());
            let omega = m.random_state(&mut rng);
            let action = random_local_action(&mut rng, Side::One, d1, 2 + (i as usize % 3));
            let probes: Vec<_> = (0..3)
                .map(|_| random_local_op(&mut rng, Side::Two, d2))
                .collect();
            let r = ds_nosig_check(&omega, &action, &probes, 1e-10).unwrap();
            nosig = nosig.max(if r.pass { r.max_defect } else { f64::INFINITY });
            if ds_local_prob(&omega, &a).unwrap() > EPS_COND {
                let cond = ds_condition(&omega, &a).unwrap();
                let q = ds_conditional_quotient(&omega, &a, &b).unwrap();
                quotient = quotient.max((ds_local_prob(&cond, &b).unwrap() - q).abs());
            }
        }
    }
    report(
        5,
        "direct-sum commutation, no-signaling and conditioning",
        comm <= 1e-12 && nosig <= 1e-10 && quotient <= 1e-10,
        format!("commutation {comm:.1e}, no-signaling {nosig:.1e}, quotient {quotient:.1e}"),
    )
}

fn identity_numbers<B>(bip: &B) -> (bool, Value)
where
    B: LocalTomography,
    B::Joint: ModelSampler,
{
    let r = dimension_identity_check(bip).unwrap();
    (r.pass, r.witness.unwrap())
}

fn criterion_6() -> bool {
    let cases: [(&str, (bool, Value), u64, u64); 3] = [
        (
            "qubit x qubit",
            identity_numbers(&QuantumBipartite::new(2, 2).unwrap()),
            15,
            16,
        ),
        (
            "qubit x qutrit",
            identity_numbers(&QuantumBipartite::new(2, 3).unwrap()),
            35,
            36,
        ),
        (
            "bit x bit",
            identity_numbers(
                &nosig_core::opcore::classical::ClassicalBipartite::new(2, 2).unwrap(),
            ),
            3,
            4,
        ),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, (pass, w), adm, count) in cases {
        let (a1, a2) = (
            w["adm_left"].as_u64().unwrap(),
            w["adm_right"].as_u64().unwrap(),
        );
        ok &= pass && w["adm_joint"] == adm && a1 * a2 + a1 + a2 == adm && w["outcomes"] == count;
        ok &= w["outcomes"] == (a1 + 1) * (a2 + 1);
        detail.push(format!(
            "{name}: {adm} = {a1}*{a2}+{a1}+{a2}, {count} outcomes"
        ));
    }
    report(6, "affine dimension identity", ok, detail.join("; "))
}

fn criterion_7() -> bool {
    let q = local_observability_audit(&QuantumBipartite::new(2, 2).unwrap()).unwrap();
    let q23 = local_observability_audit(&QuantumBipartite::new(2, 3).unwrap()).unwrap();
    let cl = local_observability_audit(
        &nosig_core::opcore::classical::ClassicalBipartite::new(2, 2).unwrap(),
    )
    .unwrap();
    let rank = |r: &nosig_core::VerificationReport| {
        let w = r.witness.as_ref().unwrap();
        (
            w["rank"].as_u64().unwrap(),
            w["effect_space_dim"].as_u64().unwrap(),
        )
    };
    let ds22 = local_observability_audit(&DSumModel::new(2, 2).unwrap()).unwrap();
    let ds23 = local_observability_audit(&DSumModel::new(2, 3).unwrap()).unwrap();
    let ok = q.pass
        && q23.pass
        && cl.pass
        && !ds22.pass
        && !ds23.pass
        && rank(&ds22) == (8, 16)
        && rank(&ds23) == (13, 25)
        && rank(&q) == (16, 16);
    report(
        7,
        "local observability separates tensor from direct sum",
        ok,
        format!(
            "quantum {:?} {:?}, classical {:?}, dsum {:?} {:?}",
            rank(&q),
            rank(&q23),
            rank(&cl),
            rank(&ds22),
            rank(&ds23)
        ),
    )
}

fn criterion_8() -> bool {
    let classical = classical_chsh_max();
    let pr = pr_box();
    let s_pr = chsh_value(&pr);
    let s_q = chsh_value(&singlet_box(OPTIMAL_ANGLES));
    let ok = deterministic_strategies().len() == 16
        && classical == 2.0
        && s_pr == 4.0
        && is_nosignaling_box(&pr, 0.0)
        && (s_q - 2.0 * SQRT_2).abs() <= 1e-9;
    report(
        8,
        "CHSH landmarks",
        ok,
        format!("classical {classical}, singlet {s_q:.12}, PR {s_pr}"),
    )
}

fn criterion_9() -> bool {
    let reports = [
        framework_suite(&ClassicalModel::new(3).unwrap(), 909, 200, 3, 1e-9).unwrap(),
        framework_suite(&QuantumModel::new(2).unwrap(), 909, 200, 3, 1e-9).unwrap(),
        framework_suite(&QuantumModel::new(3).unwrap(), 909, 100, 4, 1e-9).unwrap(),
        framework_suite(&DSumModel::new(2, 3).unwrap(), 909, 200, 4, 1e-9).unwrap(),
    ];
    let ok = reports.iter().all(|r| r.pass);
    let detail = reports
        .iter()
        .map(|r| format!("{} {:.1e}", r.suite, r.max_defect))
        .collect::<Vec<_>>()
        .join("; ");
    report(9, "framework laws in every model", ok, detail)
}

fn criterion_10() -> bool {
    let code = |suite: &str, fixture: &str| {
        Command::new(env!("CARGO_BIN_EXE_nosig"))
            .args(["--suite", suite, "--fixture", fixture])
            .output()
            .unwrap()
            .status
            .code()
    };
    let instrument = code("quantum-nosig", "scaled-instrument");
    let signaling = code("boxworld", "signaling-box");
    let control = code("quantum-nosig", "singlet-z");
    report(
        10,
        "mutants are rejected",
        instrument == Some(1) && signaling == Some(1) && control == Some(0),
        format!("scaled instrument exit {instrument:?}, signaling box exit {signaling:?}, control exit {control:?}"),
    )
}

fn main() {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
