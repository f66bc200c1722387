//! Operational framework: states as probability rules over transformations,
//! effects as informational equivalence classes, and the generic verifiers for
//! no-signaling built on top of any [`TheoryModel`].
//!
//! Conventions:
//! * `compose(first, then)` is the transformation "`first`, then `then`".
//! * States are weighted: `apply` never renormalizes, `condition` does.
//! * `prob` is the probability rule of the *normalized* state.

pub mod classical;
pub mod harness;

use std::fmt::Debug;

use serde_json::json;

use crate::error::{Error, Result};
use crate::numkit::{real_rank, RANK_TOL};
use crate::report::{VerificationReport, Worst};
use crate::sampling::TrialRng;

/// Conditioning on events rarer than this raises `ZeroProbability`.
pub const EPS_COND: f64 = 1e-12;
/// Tolerance for completeness, coexistence and equivalence decisions.
pub const TOL_FRAMEWORK: f64 = 1e-9;
/// Maximum number of outcomes drawn by the action samplers.
pub const MAX_OUTCOMES: usize = 16;

/// A physical theory: states, transformations and effects with their
/// composition and convex structure.
pub trait TheoryModel {
    type State: Clone + Debug + Send + Sync;
    type Transform: Clone + Debug + Send + Sync;
    type Effect: Clone + Debug + Send + Sync;

    fn name(&self) -> String;

    /// Linear dimension of the span of the effects.
    fn effect_space_dim(&self) -> usize;

    fn check_state(&self, s: &Self::State) -> Result<()>;
    fn check_transform(&self, t: &Self::Transform) -> Result<()>;

    /// Unnormalized action of `t` on `s`.
    fn apply(&self, t: &Self::Transform, s: &Self::State) -> Self::State;
    /// `a * s1 + b * s2`.
    fn combine_states(&self, a: f64, s1: &Self::State, b: f64, s2: &Self::State) -> Self::State;
    /// Real coordinates of a state, linear in the state.
    fn state_coords(&self, s: &Self::State) -> Vec<f64>;
    /// Distance between two states (trace norm or its classical analogue).
    fn state_distance(&self, s1: &Self::State, s2: &Self::State) -> f64;

    fn identity(&self) -> Self::Transform;
    fn compose(&self, first: &Self::Transform, then: &Self::Transform) -> Self::Transform;
    /// Sum of two transformations without a coexistence check.
    fn add_transforms(&self, t1: &Self::Transform, t2: &Self::Transform) -> Self::Transform;
    /// `lambda * t` without a range check.
    fn scale_transform(&self, lambda: f64, t: &Self::Transform) -> Self::Transform;
    /// A transformation whose effect is `unit - effect_of(t)`; assumes `effect_of(t) <= unit`.
    fn complement_transform(&self, t: &Self::Transform) -> Self::Transform;
    /// Representation-independent distance between two transformations.
    fn transform_distance(&self, t1: &Self::Transform, t2: &Self::Transform) -> f64;

    fn effect_of(&self, t: &Self::Transform) -> Self::Effect;
    fn unit_effect(&self) -> Self::Effect;
    fn evaluate(&self, e: &Self::Effect, s: &Self::State) -> f64;
    fn add_effects(&self, e1: &Self::Effect, e2: &Self::Effect) -> Self::Effect;
    /// `sup` over normalized states of `|e1(s) - e2(s)|`.
    fn effect_distance(&self, e1: &Self::Effect, e2: &Self::Effect) -> f64;
    /// `sup` over normalized states of `e(s) - 1`; positive means `e` exceeds the unit.
    fn effect_excess(&self, e: &Self::Effect) -> f64;

    /// Dual coordinates of an effect, when the model exposes them.
    fn effect_coords(&self, _e: &Self::Effect) -> Option<Vec<f64>> {
        None
    }

    /// Normalization `evaluate(unit, s)`.
    fn weight(&self, s: &Self::State) -> f64 {
        self.evaluate(&self.unit_effect(), s)
    }

    fn scale_state(&self, f: f64, s: &Self::State) -> Self::State {
        self.combine_states(f, s, 0.0, s)
    }
}

/// Samplers used by the randomized suites.
pub trait ModelSampler: TheoryModel {
    /// A normalized random state.
    fn random_state(&self, rng: &mut TrialRng) -> Self::State;
    /// A random transformation with effect below the unit.
    fn random_transform(&self, rng: &mut TrialRng) -> Self::Transform;
    /// A random complete action with (about) `outcomes` transformations.
    fn random_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<Self::Transform>;
}

/// A finite, complete set of mutually exclusive transformations.
#[derive(Debug, Clone)]
pub struct Action<T> {
    transforms: Vec<T>,
}

impl<T: Clone> Action<T> {
    pub fn new<M>(model: &M, transforms: Vec<T>) -> Result<Self>
    where
        M: TheoryModel<Transform = T>,
    {
        let defect = completeness_defect(model, &transforms)?;
        if defect > TOL_FRAMEWORK {
            return Err(Error::IncompleteAction(defect));
        }
        Ok(Action { transforms })
    }

    pub fn transforms(&self) -> &[T] {
        &self.transforms
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }
}

/// Distance between the summed effects of `transforms` and the unit effect.
pub fn completeness_defect<M: TheoryModel>(model: &M, transforms: &[M::Transform]) -> Result<f64> {
    let (first, rest) = transforms.split_first().ok_or(Error::Empty("action"))?;
    model.check_transform(first)?;
    let mut sum = model.effect_of(first);
    for t in rest {
        model.check_transform(t)?;
        sum = model.add_effects(&sum, &model.effect_of(t));
    }
    Ok(model.effect_distance(&sum, &model.unit_effect()))
}

/// Probability of `t` occurring on the normalized version of `state`.
pub fn prob<M: TheoryModel>(model: &M, state: &M::State, t: &M::Transform) -> Result<f64> {
    model.check_state(state)?;
    model.check_transform(t)?;
    let w = model.weight(state);
    if w <= EPS_COND {
        return Err(Error::ZeroProbability(w));
    }
    Ok(model.evaluate(&model.effect_of(t), state) / w)
}

/// Conditional state after `t` is known to have occurred.
pub fn condition<M: TheoryModel>(
    model: &M,
    state: &M::State,
    t: &M::Transform,
) -> Result<M::State> {
    let p = prob(model, state, t)?;
    if p <= EPS_COND {
        return Err(Error::ZeroProbability(p));
    }
    let out = model.apply(t, state);
    let w = model.weight(&out);
    Ok(model.scale_state(1.0 / w, &out))
}

pub fn compose<M: TheoryModel>(
    model: &M,
    first: &M::Transform,
    then: &M::Transform,
) -> Result<M::Transform> {
    model.check_transform(first)?;
    model.check_transform(then)?;
    Ok(model.compose(first, then))
}

/// Coarse-grained sum of two coexistent transformations.
pub fn add_coexistent<M: TheoryModel>(
    model: &M,
    t1: &M::Transform,
    t2: &M::Transform,
) -> Result<M::Transform> {
    model.check_transform(t1)?;
    model.check_transform(t2)?;
    let e = model.add_effects(&model.effect_of(t1), &model.effect_of(t2));
    let excess = model.effect_excess(&e);
    if excess > TOL_FRAMEWORK {
        return Err(Error::NotCoexistent(excess));
    }
    Ok(model.add_transforms(t1, t2))
}

pub fn scale<M: TheoryModel>(model: &M, lambda: f64, t: &M::Transform) -> Result<M::Transform> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::ScaleOutOfRange(lambda));
    }
    model.check_transform(t)?;
    Ok(model.scale_transform(lambda, t))
}

/// The deterministic transformation obtained by summing every outcome of an action.
pub fn total_of_action<M: TheoryModel>(
    model: &M,
    action: &Action<M::Transform>,
) -> Result<M::Transform> {
    total_of(model, action.transforms())
}

fn total_of<M: TheoryModel>(model: &M, transforms: &[M::Transform]) -> Result<M::Transform> {
    let defect = completeness_defect(model, transforms)?;
    if defect > TOL_FRAMEWORK {
        return Err(Error::IncompleteAction(defect));
    }
    let (first, rest) = transforms.split_first().ok_or(Error::Empty("action"))?;
    Ok(rest
        .iter()
        .fold(first.clone(), |acc, t| model.add_transforms(&acc, t)))
}

/// A transformation completing `t` to a two-outcome action.
pub fn complement<M: TheoryModel>(model: &M, t: &M::Transform) -> Result<M::Transform> {
    model.check_transform(t)?;
    let excess = model.effect_excess(&model.effect_of(t));
    if excess > TOL_FRAMEWORK {
        return Err(Error::EffectExceedsUnit(excess));
    }
    Ok(model.complement_transform(t))
}

/// Checks that normalized probes span the state space: their coordinates must
/// have linear rank equal to the effect-space dimension.
pub fn probe_span_check<M: TheoryModel>(model: &M, probes: &[M::State]) -> Result<()> {
    let needed = model.effect_space_dim();
    let rank = if probes.is_empty() {
        0
    } else {
        let coords: Vec<Vec<f64>> = probes
            .iter()
            .map(|s| {
                let w = model.weight(s);
                model.state_coords(&model.scale_state(1.0 / w, s))
            })
            .collect();
        real_rank(&coords, RANK_TOL)?
    };
    if rank < needed {
        return Err(Error::IndeterminateSpan { rank, needed });
    }
    Ok(())
}

/// Same occurrence probability on every state.
///
/// Uses an exact comparison of dual coordinates when the model exposes them,
/// otherwise requires `probes` to span the state space.
pub fn informationally_equivalent<M: TheoryModel>(
    model: &M,
    t1: &M::Transform,
    t2: &M::Transform,
    probes: &[M::State],
) -> Result<bool> {
    model.check_transform(t1)?;
    model.check_transform(t2)?;
    let (e1, e2) = (model.effect_of(t1), model.effect_of(t2));
    if let (Some(c1), Some(c2)) = (model.effect_coords(&e1), model.effect_coords(&e2)) {
        let dev = c1
            .iter()
            .zip(&c2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        return Ok(c1.len() == c2.len() && dev <= TOL_FRAMEWORK);
    }
    probe_span_check(model, probes)?;
    for s in probes {
        if (prob(model, s, t1)? - prob(model, s, t2)?).abs() > TOL_FRAMEWORK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Same conditional states on every probe where both occur.
pub fn dynamically_equivalent<M: TheoryModel>(
    model: &M,
    t1: &M::Transform,
    t2: &M::Transform,
    probes: &[M::State],
) -> Result<bool> {
    model.check_transform(t1)?;
    model.check_transform(t2)?;
    probe_span_check(model, probes)?;
    for s in probes {
        let (p1, p2) = (prob(model, s, t1)?, prob(model, s, t2)?);
        if p1 <= EPS_COND || p2 <= EPS_COND {
            continue;
        }
        let c1 = condition(model, s, t1)?;
        let c2 = condition(model, s, t2)?;
        if model.state_distance(&c1, &c2) > TOL_FRAMEWORK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two dynamically independent systems: local operations on either side
/// embed into the joint theory.
pub trait Bipartite {
    type Joint: TheoryModel;
    type LeftOp: Clone + Debug + Send + Sync;
    type RightOp: Clone + Debug + Send + Sync;

    fn joint(&self) -> &Self::Joint;
    fn embed_left(&self, a: &Self::LeftOp) -> Result<<Self::Joint as TheoryModel>::Transform>;
    fn embed_right(&self, b: &Self::RightOp) -> Result<<Self::Joint as TheoryModel>::Transform>;
}

/// Samplers for local operations and joint states.
pub trait BipartiteSampler: Bipartite {
    fn random_joint_state(&self, rng: &mut TrialRng) -> <Self::Joint as TheoryModel>::State;
    fn random_left_op(&self, rng: &mut TrialRng) -> Self::LeftOp;
    fn random_right_op(&self, rng: &mut TrialRng) -> Self::RightOp;
    fn random_left_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<Self::LeftOp>;
}

/// Joint probability `Omega(a, b)` of the local pair `a` on side 1, `b` on side 2.
pub fn joint_prob<B: Bipartite>(
    bip: &B,
    omega: &<B::Joint as TheoryModel>::State,
    a: &<B::Joint as TheoryModel>::Transform,
    b: &<B::Joint as TheoryModel>::Transform,
) -> Result<f64> {
    let joint = bip.joint();
    prob(joint, omega, &joint.compose(a, b))
}

/// `max |A o B - B o A|` for a side-1 operation and a side-2 operation.
pub fn commutation_defect<B: Bipartite>(bip: &B, a: &B::LeftOp, b: &B::RightOp) -> Result<f64> {
    let joint = bip.joint();
    let ea = bip.embed_left(a)?;
    let eb = bip.embed_right(b)?;
    Ok(joint.transform_distance(&joint.compose(&ea, &eb), &joint.compose(&eb, &ea)))
}

/// Verifies that a complete action on side 1 leaves every side-2 probe unchanged.
///
/// For each probe `B` three quantities are compared with `Omega(I, B)`:
/// the joint probability `Omega(S(A), B)`, the probability of `B` on the
/// state conditioned on `S(A)`, and the outcome-weighted mixture of the
/// conditional states `Omega_{A_j, I}`.
pub fn no_signaling_check<B: Bipartite>(
    bip: &B,
    omega: &<B::Joint as TheoryModel>::State,
    action: &[B::LeftOp],
    probes: &[B::RightOp],
    tol: f64,
) -> Result<VerificationReport> {
    let joint = bip.joint();
    let embedded: Vec<_> = action
        .iter()
        .map(|a| bip.embed_left(a))
        .collect::<Result<_>>()?;
    let total = total_of(joint, &embedded)?;
    let id = joint.identity();
    let conditioned_on_total = condition(joint, omega, &total)?;
    let outcome_probs: Vec<f64> = embedded
        .iter()
        .map(|a| joint_prob(bip, omega, a, &id))
        .collect::<Result<_>>()?;
    let norm: f64 = outcome_probs.iter().sum();

    let mut worst = Worst::default();
    for b in probes {
        let eb = bip.embed_right(b)?;
        let local = joint_prob(bip, omega, &id, &eb)?;
        worst.push((joint_prob(bip, omega, &total, &eb)? - local).abs());
        worst.push((prob(joint, &conditioned_on_total, &eb)? - local).abs());
        let mut mixture = 0.0;
        for (a, &p) in embedded.iter().zip(&outcome_probs) {
            if p <= EPS_COND {
                continue;
            }
            let cond = condition(joint, omega, a)?;
            mixture += prob(joint, &cond, &eb)? * p / norm;
        }
        worst.push((mixture - local).abs());
    }
    Ok(
        VerificationReport::from_defect("no-signaling", 0, probes.len(), worst.value(), tol)
            .with_witness(json!({
                "outcomes": action.len(),
                "total_probability": norm,
            })),
    )
}

/// Checks both directions of `Omega(A, I) = 1  <=>  Omega(A, B) = Omega(I, B) for all B`
/// on the supplied probes.
pub fn determinism_equivalence_check<B: Bipartite>(
    bip: &B,
    omega: &<B::Joint as TheoryModel>::State,
    t: &B::LeftOp,
    probes: &[B::RightOp],
    tol: f64,
) -> Result<VerificationReport> {
    let joint = bip.joint();
    let a = bip.embed_left(t)?;
    let id = joint.identity();
    let p_a = joint_prob(bip, omega, &a, &id)?;
    let mut worst = Worst::default();
    for b in probes {
        let eb = bip.embed_right(b)?;
        worst.push((joint_prob(bip, omega, &a, &eb)? - joint_prob(bip, omega, &id, &eb)?).abs());
    }
    let probe_defect = worst.value();
    let deterministic = (p_a - 1.0).abs() <= tol;
    let forward = !deterministic || probe_defect <= tol;
    let backward = probe_defect <= tol || p_a < 1.0 - tol;
    let consistent = forward && backward;
    let max_defect = if deterministic {
        probe_defect
    } else if consistent {
        0.0
    } else {
        f64::INFINITY
    };
    let mut report = VerificationReport::from_defect(
        "determinism-equivalence",
        0,
        probes.len(),
        max_defect,
        tol,
    );
    report.pass = consistent && !max_defect.is_nan();
    Ok(report.with_witness(json!({
        "omega_a_identity": p_a,
        "deterministic": deterministic,
        "max_probe_defect": probe_defect,
    })))
}
