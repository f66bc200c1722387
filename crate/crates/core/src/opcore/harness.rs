//! Randomized invariant suites generic over [`TheoryModel`] and [`Bipartite`].
//!
//! The same code runs against the classical, quantum and direct-sum models,
//! so a model that breaks a framework law shows up here regardless of which
//! concrete representation it uses.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    add_coexistent, commutation_defect, completeness_defect, compose, condition,
    no_signaling_check, prob, BipartiteSampler, ModelSampler, TheoryModel,
};
use crate::error::Result;
use crate::report::{max_defect, VerificationReport};
use crate::sampling::trial_rng;

/// Bayes-chain checks are skipped when the conditioning event is rarer than this.
const BAYES_FLOOR: f64 = 1e-6;
/// Commutation defect under which two local operations count as commuting.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Worst defect per framework law over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FrameworkDefects {
    pub completeness: f64,
    pub bayes: f64,
    pub linearity: f64,
    pub distributivity: f64,
    pub monoid: f64,
    pub additivity: f64,
}

impl FrameworkDefects {
    fn merge(self, o: Self) -> Self {
        FrameworkDefects {
            completeness: max_defect(self.completeness, o.completeness),
            bayes: max_defect(self.bayes, o.bayes),
            linearity: max_defect(self.linearity, o.linearity),
            distributivity: max_defect(self.distributivity, o.distributivity),
            monoid: max_defect(self.monoid, o.monoid),
            additivity: max_defect(self.additivity, o.additivity),
        }
    }

    pub fn worst(&self) -> f64 {
        [
            self.completeness,
            self.bayes,
            self.linearity,
            self.distributivity,
            self.monoid,
            self.additivity,
        ]
        .into_iter()
        .fold(0.0, max_defect)
    }
}

fn framework_trial<M: ModelSampler>(
    model: &M,
    seed: u64,
    index: u64,
    outcomes: usize,
) -> Result<FrameworkDefects> {
    let mut rng = trial_rng(seed, index);
    let omega = model.random_state(&mut rng);
    let omega2 = model.random_state(&mut rng);
    let action = model.random_action(&mut rng, outcomes.max(2));
    let a = model.random_transform(&mut rng);
    let b = model.random_transform(&mut rng);
    let c = model.random_transform(&mut rng);
    let lambda = crate::sampling::uniform(&mut rng);
    let mut d = FrameworkDefects::default();

    let total_prob: f64 = action
        .iter()
        .map(|t| prob(model, &omega, t))
        .sum::<Result<f64>>()?;
    d.completeness = max_defect(
        (total_prob - 1.0).abs(),
        completeness_defect(model, &action)?,
    );

    let p_a = prob(model, &omega, &a)?;
    if p_a > BAYES_FLOOR {
        let lhs = prob(model, &omega, &compose(model, &a, &b)?)?;
        let rhs = prob(model, &condition(model, &omega, &a)?, &b)? * p_a;
        d.bayes = (lhs - rhs).abs();
    }

    let mix = model.combine_states(lambda, &omega, 1.0 - lambda, &omega2);
    let lin_lhs = model.apply(&a, &mix);
    let lin_rhs = model.combine_states(
        lambda,
        &model.apply(&a, &omega),
        1.0 - lambda,
        &model.apply(&a, &omega2),
    );
    d.linearity = model.state_distance(&lin_lhs, &lin_rhs);

    // two outcomes of one action are coexistent
    let (x, y) = (&action[0], &action[1]);
    let sum = add_coexistent(model, x, y)?;
    let dist_lhs = model.compose(&sum, &c);
    let dist_rhs = add_coexistent(model, &model.compose(x, &c), &model.compose(y, &c))?;
    d.distributivity = model.transform_distance(&dist_lhs, &dist_rhs);

    let id = model.identity();
    let assoc = model.transform_distance(
        &model.compose(&model.compose(&a, &b), &c),
        &model.compose(&a, &model.compose(&b, &c)),
    );
    let left_id = model.transform_distance(&model.compose(&id, &a), &a);
    let right_id = model.transform_distance(&model.compose(&a, &id), &a);
    d.monoid = assoc.max(left_id).max(right_id);

    let p_sum = prob(model, &omega, &sum)?;
    let p_parts = prob(model, &omega, x)? + prob(model, &omega, y)?;
    let apply_sum = model.apply(&sum, &omega);
    let apply_parts =
        model.combine_states(1.0, &model.apply(x, &omega), 1.0, &model.apply(y, &omega));
    d.additivity = (p_sum - p_parts)
        .abs()
        .max(model.state_distance(&apply_sum, &apply_parts));
    Ok(d)
}

/// Runs the framework laws (completeness, Bayes chain, mixture linearity,
/// distributivity, monoid laws, additivity) on `trials` random samples.
pub fn framework_suite<M>(
    model: &M,
    seed: u64,
    trials: usize,
    outcomes: usize,
    tol: f64,
) -> Result<VerificationReport>
where
    M: ModelSampler + Sync,
{
    let per_trial: Vec<FrameworkDefects> = (0..trials as u64)
        .into_par_iter()
        .map(|i| framework_trial(model, seed, i, outcomes))
        .collect::<Result<_>>()?;
    let defects = per_trial
        .into_iter()
        .fold(FrameworkDefects::default(), FrameworkDefects::merge);
    Ok(VerificationReport::from_defect(
        format!("opcore[{}]", model.name()),
        seed,
        trials,
        defects.worst(),
        tol,
    )
    .with_witness(serde_json::to_value(defects).unwrap_or_default()))
}

/// Commutation of local operations implies no-signaling: over random joint
/// states, complete side-1 actions and side-2 probes, reports the worst
/// no-signaling defect among trials whose commutation defect is below
/// [`COMMUTATION_TOL`].
pub fn commutation_nosig_suite<B>(
    bip: &B,
    seed: u64,
    trials: usize,
    outcomes: usize,
    tol: f64,
) -> Result<VerificationReport>
where
    B: BipartiteSampler + Sync,
    <B::Joint as TheoryModel>::State: Send,
{
    let per_trial: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let omega = bip.random_joint_state(&mut rng);
            let action = bip.random_left_action(&mut rng, outcomes);
            let probes: Vec<B::RightOp> = (0..3).map(|_| bip.random_right_op(&mut rng)).collect();
            let mut comm: f64 = 0.0;
            for a in &action {
                for b in &probes {
                    comm = max_defect(comm, commutation_defect(bip, a, b)?);
                }
            }
            let nosig = no_signaling_check(bip, &omega, &action, &probes, tol)?.max_defect;
            Ok((comm, nosig))
        })
        .collect::<Result<_>>()?;
    let max_comm = per_trial.iter().map(|p| p.0).fold(0.0, max_defect);
    let commuting: Vec<f64> = per_trial
        .iter()
        .filter(|p| p.0 <= COMMUTATION_TOL)
        .map(|p| p.1)
        .collect();
    let worst = commuting.iter().copied().fold(0.0, max_defect);
    Ok(VerificationReport::from_defect(
        format!("commutation-nosig[{}]", bip.joint().name()),
        seed,
        trials,
        worst,
        tol,
    )
    .with_witness(json!({
        "max_commutation_defect": max_comm,
        "commuting_trials": commuting.len(),
    })))
}
