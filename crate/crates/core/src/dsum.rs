//! Direct-sum composite of two quantum systems.
//!
//! A joint state is a block pair `rho_+ (+) rho_-` with `Tr rho_+ + Tr rho_- = 1`.
//! A local operation on system 1 acts as `A_+ (+) p_A I_-`, one on system 2 as
//! `p_B I_+ (+) B_-`. Such operations always commute, so the composite is
//! dynamically independent and no-signaling, yet products of local effects only
//! reach the block-diagonal operators: `d1^2 + d2^2` dimensions out of
//! `(d1 + d2)^2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::numkit::{
    check_same_dim, direct_sum, eigvals_herm, herm_coords, max_abs_diff, max_eig_herm, span_rank,
    trace_norm_herm, CMatrix, HermOp, MatrixJson, Side, RANK_TOL,
};
use crate::opcore::{
    Bipartite, BipartiteSampler, ModelSampler, TheoryModel, EPS_COND, MAX_OUTCOMES, TOL_FRAMEWORK,
};
use crate::qmodel::{
    apply_quantum_op, random_instrument, random_quantum_op, DensityOp, QuantumOp, TOL_KRAUS,
};
use crate::report::{max_defect, VerificationReport, Worst};
use crate::sampling::{ginibre_state, trial_rng, uniform, TrialRng};

/// Block state `rho_+ (+) rho_-`.
#[derive(Debug, Clone, PartialEq)]
pub struct DSumState {
    rho_plus: DensityOp,
    rho_minus: DensityOp,
}

impl DSumState {
    /// A normalized block state: both blocks PSD, traces summing to one.
    pub fn new(rho_plus: DensityOp, rho_minus: DensityOp) -> Result<Self> {
        let s = DSumState {
            rho_plus,
            rho_minus,
        };
        let w = s.weight();
        if (w - 1.0).abs() > TOL_FRAMEWORK {
            return Err(Error::InvalidArgument(format!(
                "block traces sum to {w}, expected 1"
            )));
        }
        Ok(s)
    }

    fn weighted(rho_plus: DensityOp, rho_minus: DensityOp) -> Self {
        DSumState {
            rho_plus,
            rho_minus,
        }
    }

    pub fn rho_plus(&self) -> &DensityOp {
        &self.rho_plus
    }

    pub fn rho_minus(&self) -> &DensityOp {
        &self.rho_minus
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rho_plus.dim(), self.rho_minus.dim())
    }

    pub fn weight(&self) -> f64 {
        self.rho_plus.weight() + self.rho_minus.weight()
    }

    /// The block-diagonal operator on `H_1 (+) H_2`.
    pub fn as_matrix(&self) -> CMatrix {
        direct_sum(self.rho_plus.matrix(), self.rho_minus.matrix()).expect("blocks are square")
    }
}

/// JSON fixture form `{"rho_plus": CMatrix, "rho_minus": CMatrix}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DSumStateJson {
    pub rho_plus: MatrixJson,
    pub rho_minus: MatrixJson,
}

impl From<&DSumState> for DSumStateJson {
    fn from(s: &DSumState) -> Self {
        DSumStateJson {
            rho_plus: MatrixJson::from(s.rho_plus.matrix()),
            rho_minus: MatrixJson::from(s.rho_minus.matrix()),
        }
    }
}

impl TryFrom<&DSumStateJson> for DSumState {
    type Error = Error;

    fn try_from(j: &DSumStateJson) -> Result<DSumState> {
        let plus = DensityOp::from_matrix(CMatrix::try_from(&j.rho_plus)?)?;
        let minus = DensityOp::from_matrix(CMatrix::try_from(&j.rho_minus)?)?;
        DSumState::new(plus, minus)
    }
}

/// A local operation `A_+ (+) p I_-` (side one) or `p I_+ (+) B_-` (side two).
#[derive(Debug, Clone, PartialEq)]
pub struct DSumLocalOp {
    side: Side,
    op_block: QuantumOp,
    p: f64,
}

impl DSumLocalOp {
    pub fn new(side: Side, op_block: QuantumOp, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ScaleOutOfRange(p));
        }
        check_same_dim(op_block.d_in(), op_block.d_out())?;
        let excess = max_eig_herm(&op_block.k_operator()) - 1.0;
        if excess > TOL_KRAUS {
            return Err(Error::EffectExceedsUnit(excess));
        }
        Ok(DSumLocalOp { side, op_block, p })
    }

    pub fn identity(side: Side, d: usize) -> Self {
        DSumLocalOp {
            side,
            op_block: QuantumOp::identity(d),
            p: 1.0,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn op_block(&self) -> &QuantumOp {
        &self.op_block
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A block-diagonal transformation `T_+ (+) T_-` of the composite.
#[derive(Debug, Clone, PartialEq)]
pub struct DSumTransform {
    pub plus: QuantumOp,
    pub minus: QuantumOp,
}

/// A block-diagonal effect `K_+ (+) K_-`.
#[derive(Debug, Clone, PartialEq)]
pub struct DSumEffect {
    pub plus: HermOp,
    pub minus: HermOp,
}

impl DSumEffect {
    pub fn as_herm(&self) -> HermOp {
        HermOp::symmetrized(
            direct_sum(self.plus.matrix(), self.minus.matrix()).expect("blocks are square"),
        )
    }
}

fn trace_after(op: &QuantumOp, rho: &DensityOp) -> Result<f64> {
    Ok(apply_quantum_op(op, rho)?.weight())
}

fn check_state_dims(omega: &DSumState, op: &DSumLocalOp) -> Result<()> {
    let (d1, d2) = omega.dims();
    match op.side {
        Side::One => check_same_dim(d1, op.op_block.d_in()),
        Side::Two => check_same_dim(d2, op.op_block.d_in()),
    }
}

/// `Omega(A, I) = Tr[A_+(rho_+)] + p_A Tr[rho_-]`, or the mirror image for a side-two operation.
pub fn ds_local_prob(omega: &DSumState, a: &DSumLocalOp) -> Result<f64> {
    check_state_dims(omega, a)?;
    let w = omega.weight();
    let raw = match a.side {
        Side::One => trace_after(&a.op_block, &omega.rho_plus)? + a.p * omega.rho_minus.weight(),
        Side::Two => a.p * omega.rho_plus.weight() + trace_after(&a.op_block, &omega.rho_minus)?,
    };
    Ok(raw / w)
}

/// `Omega(A, B) = p_B Tr[A_+(rho_+)] + p_A Tr[B_-(rho_-)]`.
pub fn ds_joint_prob(omega: &DSumState, a: &DSumLocalOp, b: &DSumLocalOp) -> Result<f64> {
    let (a, b) = match (a.side, b.side) {
        (Side::One, Side::Two) => (a, b),
        (Side::Two, Side::One) => (b, a),
        _ => return Err(Error::SameSide),
    };
    check_state_dims(omega, a)?;
    check_state_dims(omega, b)?;
    let raw = b.p * trace_after(&a.op_block, &omega.rho_plus)?
        + a.p * trace_after(&b.op_block, &omega.rho_minus)?;
    Ok(raw / omega.weight())
}

/// Conditional state after a side-one operation: `(A_+(rho_+), p_A rho_-)` renormalized.
pub fn ds_condition(omega: &DSumState, a: &DSumLocalOp) -> Result<DSumState> {
    if a.side != Side::One {
        return Err(Error::WrongSide { expected: 1 });
    }
    let p = ds_local_prob(omega, a)?;
    if p <= EPS_COND {
        return Err(Error::ZeroProbability(p));
    }
    let plus = apply_quantum_op(&a.op_block, &omega.rho_plus)?;
    let minus = omega.rho_minus.herm().scale(a.p);
    let norm = plus.weight() + minus.trace();
    Ok(DSumState::weighted(
        DensityOp::from_herm_unchecked(plus.herm().scale(1.0 / norm)),
        DensityOp::from_herm_unchecked(minus.scale(1.0 / norm)),
    ))
}

/// The closed-form conditional probability
/// `Omega_{A,I}(B) = (p_B Tr[A_+ rho_+] + p_A Tr[B_- rho_-]) / (Tr[A_+ rho_+] + p_A Tr[rho_-])`.
pub fn ds_conditional_quotient(omega: &DSumState, a: &DSumLocalOp, b: &DSumLocalOp) -> Result<f64> {
    if a.side != Side::One || b.side != Side::Two {
        return Err(Error::WrongSide { expected: 1 });
    }
    let ta = trace_after(&a.op_block, &omega.rho_plus)?;
    let tb = trace_after(&b.op_block, &omega.rho_minus)?;
    let den = ta + a.p * omega.rho_minus.weight();
    if den <= EPS_COND {
        return Err(Error::ZeroProbability(den));
    }
    Ok((b.p * ta + a.p * tb) / den)
}

/// Embeds a local operation as a block-diagonal transformation of the composite.
pub fn ds_embed(op: &DSumLocalOp, d1: usize, d2: usize) -> DSumTransform {
    match op.side {
        Side::One => DSumTransform {
            plus: op.op_block.clone(),
            minus: QuantumOp::identity(d2).scaled(op.p),
        },
        Side::Two => DSumTransform {
            plus: QuantumOp::identity(d1).scaled(op.p),
            minus: op.op_block.clone(),
        },
    }
}

/// `max |A o B - B o A|` on Liouville matrices of both blocks.
pub fn ds_commutation_defect(
    a: &DSumLocalOp,
    b: &DSumLocalOp,
    d1: usize,
    d2: usize,
) -> Result<f64> {
    if a.side == b.side {
        return Err(Error::SameSide);
    }
    let m = DSumModel::new(d1, d2)?;
    let (ea, eb) = (ds_embed(a, d1, d2), ds_embed(b, d1, d2));
    Ok(m.transform_distance(&m.compose(&ea, &eb), &m.compose(&eb, &ea)))
}

/// Completeness of a side-one action: `sum_j K_{j,+} = I` and `sum_j p_j = 1`.
pub fn ds_action_defect(action: &[DSumLocalOp]) -> Result<f64> {
    let first = action.first().ok_or(Error::Empty("action"))?;
    let d = first.op_block.d_in();
    let mut k = HermOp::zeros(d);
    let mut p = 0.0;
    for a in action {
        if a.side != Side::One {
            return Err(Error::WrongSide { expected: 1 });
        }
        k = k.add(&a.op_block.k_operator())?;
        p += a.p;
    }
    let kdev = eigvals_herm(&k.sub(&HermOp::identity(d))?)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    Ok(kdev.max((p - 1.0).abs()))
}

/// No-signaling in the direct-sum composite: `max_B |Omega(S(A), B) - Omega(I, B)|`,
/// also comparing the outcome-weighted conditional states against `Omega(I, B)`.
pub fn ds_nosig_check(
    omega: &DSumState,
    action: &[DSumLocalOp],
    probes: &[DSumLocalOp],
    tol: f64,
) -> Result<VerificationReport> {
    let defect = ds_action_defect(action)?;
    if defect > TOL_FRAMEWORK {
        return Err(Error::IncompleteAction(defect));
    }
    let d1 = omega.dims().0;
    let total_block = action[1..]
        .iter()
        .fold(action[0].op_block.clone(), |acc, a| acc.plus(&a.op_block));
    let total_p: f64 = action.iter().map(|a| a.p).sum();
    let total = DSumLocalOp {
        side: Side::One,
        op_block: total_block,
        p: total_p.min(1.0),
    };
    let id1 = DSumLocalOp::identity(Side::One, d1);
    let mut worst = Worst::default();
    for b in probes {
        if b.side != Side::Two {
            return Err(Error::WrongSide { expected: 2 });
        }
        let local = ds_joint_prob(omega, &id1, b)?;
        worst.push((ds_joint_prob(omega, &total, b)? - local).abs());
        let mut mixture = 0.0;
        for a in action {
            let pa = ds_local_prob(omega, a)?;
            if pa <= EPS_COND {
                continue;
            }
            mixture += ds_conditional_quotient(omega, a, b)? * pa;
        }
        worst.push((mixture - local).abs());
    }
    Ok(VerificationReport::from_defect(
        "dsum-nosig",
        0,
        probes.len(),
        worst.value(),
        tol,
    ))
}

/// Random side-one or side-two local operation.
pub fn random_local_op(rng: &mut TrialRng, side: Side, d: usize) -> DSumLocalOp {
    DSumLocalOp {
        side,
        op_block: random_quantum_op(rng, d),
        p: uniform(rng),
    }
}

fn random_probabilities(rng: &mut TrialRng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - uniform(rng)).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Random complete local action: Haar instrument blocks, probability vector for the `p_j`.
pub fn random_local_action(
    rng: &mut TrialRng,
    side: Side,
    d: usize,
    outcomes: usize,
) -> Vec<DSumLocalOp> {
    let inst = random_instrument(rng, d, outcomes);
    let ps = random_probabilities(rng, inst.outcomes().len());
    inst.outcomes()
        .iter()
        .zip(ps)
        .map(|(m, p)| DSumLocalOp {
            side,
            op_block: m.clone(),
            p,
        })
        .collect()
}

/// Span rank of the joint effects `p_B K_A (+) p_A K_B` of `samples` random local pairs.
///
/// Coordinates cover the whole of `Herm(H_1 (+) H_2)`, off-block entries included.
pub fn ds_local_effect_span(d1: usize, d2: usize, samples: usize) -> Result<usize> {
    let full = (d1 + d2) * (d1 + d2);
    if samples < full {
        return Err(Error::InvalidArgument(format!(
            "need at least {full} samples, got {samples}"
        )));
    }
    let m = DSumModel::new(d1, d2)?;
    let mut rng = trial_rng(0x005e_edd5_u64, (d1 * 16 + d2) as u64);
    let effects: Vec<HermOp> = (0..samples)
        .map(|_| {
            let a = random_local_op(&mut rng, Side::One, d1);
            let b = random_local_op(&mut rng, Side::Two, d2);
            m.effect_of(&m.compose(&ds_embed(&a, d1, d2), &ds_embed(&b, d1, d2)))
                .as_herm()
        })
        .collect();
    span_rank(&effects, RANK_TOL)
}

/// The direct-sum composite as a single theory and as a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DSumModel {
    d1: usize,
    d2: usize,
}

impl DSumModel {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument(
                "direct-sum blocks need dim >= 1".into(),
            ));
        }
        Ok(DSumModel { d1, d2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    /// Effect-space dimension of a quantum system on `H_1 (+) H_2`.
    pub fn ambient_effect_dim(&self) -> usize {
        (self.d1 + self.d2) * (self.d1 + self.d2)
    }

    pub fn embed(&self, op: &DSumLocalOp) -> Result<DSumTransform> {
        let d = match op.side {
            Side::One => self.d1,
            Side::Two => self.d2,
        };
        check_same_dim(d, op.op_block.d_in())?;
        Ok(ds_embed(op, self.d1, self.d2))
    }
}

impl TheoryModel for DSumModel {
    type State = DSumState;
    type Transform = DSumTransform;
    type Effect = DSumEffect;

    fn name(&self) -> String {
        format!("dsum(d1={},d2={})", self.d1, self.d2)
    }

    fn effect_space_dim(&self) -> usize {
        self.d1 * self.d1 + self.d2 * self.d2
    }

    fn check_state(&self, s: &DSumState) -> Result<()> {
        check_same_dim(self.d1, s.rho_plus.dim())?;
        check_same_dim(self.d2, s.rho_minus.dim())
    }

    fn check_transform(&self, t: &DSumTransform) -> Result<()> {
        for (op, d) in [(&t.plus, self.d1), (&t.minus, self.d2)] {
            check_same_dim(d, op.d_in())?;
            check_same_dim(d, op.d_out())?;
        }
        let excess = self.effect_excess(&self.effect_of(t));
        if excess > TOL_KRAUS {
            return Err(Error::EffectExceedsUnit(excess));
        }
        Ok(())
    }

    fn apply(&self, t: &DSumTransform, s: &DSumState) -> DSumState {
        DSumState::weighted(
            apply_quantum_op(&t.plus, &s.rho_plus).expect("dimensions checked by caller"),
            apply_quantum_op(&t.minus, &s.rho_minus).expect("dimensions checked by caller"),
        )
    }

    fn combine_states(&self, a: f64, s1: &DSumState, b: f64, s2: &DSumState) -> DSumState {
        let mix = |x: &DensityOp, y: &DensityOp| {
            DensityOp::from_herm_unchecked(HermOp::symmetrized(
                x.matrix().scale(a) + y.matrix().scale(b),
            ))
        };
        DSumState::weighted(
            mix(&s1.rho_plus, &s2.rho_plus),
            mix(&s1.rho_minus, &s2.rho_minus),
        )
    }

    fn state_coords(&self, s: &DSumState) -> Vec<f64> {
        herm_coords(&s.as_matrix())
    }

    fn state_distance(&self, s1: &DSumState, s2: &DSumState) -> f64 {
        let diff = |x: &DensityOp, y: &DensityOp| {
            x.herm()
                .sub(y.herm())
                .map(|d| trace_norm_herm(&d))
                .unwrap_or(f64::INFINITY)
        };
        diff(&s1.rho_plus, &s2.rho_plus) + diff(&s1.rho_minus, &s2.rho_minus)
    }

    fn identity(&self) -> DSumTransform {
        DSumTransform {
            plus: QuantumOp::identity(self.d1),
            minus: QuantumOp::identity(self.d2),
        }
    }

    fn compose(&self, first: &DSumTransform, then: &DSumTransform) -> DSumTransform {
        DSumTransform {
            plus: first.plus.then(&then.plus),
            minus: first.minus.then(&then.minus),
        }
    }

    fn add_transforms(&self, t1: &DSumTransform, t2: &DSumTransform) -> DSumTransform {
        DSumTransform {
            plus: t1.plus.plus(&t2.plus),
            minus: t1.minus.plus(&t2.minus),
        }
    }

    fn scale_transform(&self, lambda: f64, t: &DSumTransform) -> DSumTransform {
        DSumTransform {
            plus: t.plus.scaled(lambda),
            minus: t.minus.scaled(lambda),
        }
    }

    fn complement_transform(&self, t: &DSumTransform) -> DSumTransform {
        DSumTransform {
            plus: t.plus.complement(),
            minus: t.minus.complement(),
        }
    }

    fn transform_distance(&self, t1: &DSumTransform, t2: &DSumTransform) -> f64 {
        max_abs_diff(&t1.plus.liouville(), &t2.plus.liouville())
            .max(max_abs_diff(&t1.minus.liouville(), &t2.minus.liouville()))
    }

    fn effect_of(&self, t: &DSumTransform) -> DSumEffect {
        DSumEffect {
            plus: t.plus.k_operator(),
            minus: t.minus.k_operator(),
        }
    }

    fn unit_effect(&self) -> DSumEffect {
        DSumEffect {
            plus: HermOp::identity(self.d1),
            minus: HermOp::identity(self.d2),
        }
    }

    fn evaluate(&self, e: &DSumEffect, s: &DSumState) -> f64 {
        e.plus.trace_product(s.rho_plus.herm()) + e.minus.trace_product(s.rho_minus.herm())
    }

    fn add_effects(&self, e1: &DSumEffect, e2: &DSumEffect) -> DSumEffect {
        DSumEffect {
            plus: HermOp::symmetrized(e1.plus.matrix() + e2.plus.matrix()),
            minus: HermOp::symmetrized(e1.minus.matrix() + e2.minus.matrix()),
        }
    }

    fn effect_distance(&self, e1: &DSumEffect, e2: &DSumEffect) -> f64 {
        let block = |x: &HermOp, y: &HermOp| {
            eigvals_herm(&HermOp::symmetrized(x.matrix() - y.matrix()))
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max)
        };
        block(&e1.plus, &e2.plus).max(block(&e1.minus, &e2.minus))
    }

    fn effect_excess(&self, e: &DSumEffect) -> f64 {
        max_eig_herm(&e.plus).max(max_eig_herm(&e.minus)) - 1.0
    }

    fn effect_coords(&self, e: &DSumEffect) -> Option<Vec<f64>> {
        Some(herm_coords(e.as_herm().matrix()))
    }
}

impl ModelSampler for DSumModel {
    fn random_state(&self, rng: &mut TrialRng) -> DSumState {
        let t = uniform(rng);
        DSumState::weighted(
            DensityOp::from_herm_unchecked(ginibre_state(rng, self.d1).scale(t)),
            DensityOp::from_herm_unchecked(ginibre_state(rng, self.d2).scale(1.0 - t)),
        )
    }

    fn random_transform(&self, rng: &mut TrialRng) -> DSumTransform {
        let a = random_local_op(rng, Side::One, self.d1);
        let b = random_local_op(rng, Side::Two, self.d2);
        self.compose(
            &ds_embed(&a, self.d1, self.d2),
            &ds_embed(&b, self.d1, self.d2),
        )
    }

    /// Products `A_j o B_k` of two complete local actions.
    fn random_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<DSumTransform> {
        let outcomes = outcomes.clamp(1, MAX_OUTCOMES);
        let n1 = outcomes.min(2);
        let n2 = (outcomes / n1).max(1);
        let left = random_local_action(rng, Side::One, self.d1, n1);
        let right = random_local_action(rng, Side::Two, self.d2, n2);
        left.iter()
            .flat_map(|a| {
                right.iter().map(move |b| {
                    self.compose(
                        &ds_embed(a, self.d1, self.d2),
                        &ds_embed(b, self.d1, self.d2),
                    )
                })
            })
            .collect()
    }
}

impl Bipartite for DSumModel {
    type Joint = DSumModel;
    type LeftOp = DSumLocalOp;
    type RightOp = DSumLocalOp;

    fn joint(&self) -> &DSumModel {
        self
    }

    fn embed_left(&self, a: &DSumLocalOp) -> Result<DSumTransform> {
        if a.side != Side::One {
            return Err(Error::WrongSide { expected: 1 });
        }
        self.embed(a)
    }

    fn embed_right(&self, b: &DSumLocalOp) -> Result<DSumTransform> {
        if b.side != Side::Two {
            return Err(Error::WrongSide { expected: 2 });
        }
        self.embed(b)
    }
}

impl BipartiteSampler for DSumModel {
    fn random_joint_state(&self, rng: &mut TrialRng) -> DSumState {
        self.random_state(rng)
    }

    fn random_left_op(&self, rng: &mut TrialRng) -> DSumLocalOp {
        random_local_op(rng, Side::One, self.d1)
    }

    fn random_right_op(&self, rng: &mut TrialRng) -> DSumLocalOp {
        random_local_op(rng, Side::Two, self.d2)
    }

    fn random_left_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<DSumLocalOp> {
        random_local_action(rng, Side::One, self.d1, outcomes)
    }
}

/// Worst defects of the direct-sum checks over random samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DSumSuiteDefects {
    pub commutation: f64,
    pub nosig: f64,
    pub conditioning: f64,
    pub bayes: f64,
}

/// Commutation of random local pairs, no-signaling of random complete actions,
/// and the conditioning quotient, over `trials` samples.
pub fn dsum_suite(
    seed: u64,
    trials: usize,
    d1: usize,
    d2: usize,
    outcomes: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let model = DSumModel::new(d1, d2)?;
    let per_trial: Vec<DSumSuiteDefects> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let omega = model.random_state(&mut rng);
            let a = random_local_op(&mut rng, Side::One, d1);
            let b = random_local_op(&mut rng, Side::Two, d2);
            let action = random_local_action(&mut rng, Side::One, d1, outcomes.max(1));
            let probes: Vec<DSumLocalOp> = (0..3)
                .map(|_| random_local_op(&mut rng, Side::Two, d2))
                .collect();
            let mut d = DSumSuiteDefects {
                commutation: ds_commutation_defect(&a, &b, d1, d2)?,
                nosig: ds_nosig_check(&omega, &action, &probes, tol)?.max_defect,
                ..Default::default()
            };
            let pa = ds_local_prob(&omega, &a)?;
            if pa > EPS_COND {
                let cond = ds_condition(&omega, &a)?;
                d.conditioning =
                    (ds_local_prob(&cond, &b)? - ds_conditional_quotient(&omega, &a, &b)?).abs();
                d.bayes = (ds_local_prob(&cond, &b)? * pa - ds_joint_prob(&omega, &a, &b)?).abs();
            }
            Ok(d)
        })
        .collect::<Result<_>>()?;
    let d = per_trial
        .into_iter()
        .fold(DSumSuiteDefects::default(), |x, y| DSumSuiteDefects {
            commutation: max_defect(x.commutation, y.commutation),
            nosig: max_defect(x.nosig, y.nosig),
            conditioning: max_defect(x.conditioning, y.conditioning),
            bayes: max_defect(x.bayes, y.bayes),
        });
    let worst = [d.commutation, d.nosig, d.conditioning, d.bayes]
        .into_iter()
        .fold(0.0, max_defect);
    Ok(VerificationReport::from_defect("dsum", seed, trials, worst, tol).with_witness(json!(d)))
}
