//! Quantum instantiation: density operators, Kraus operations, instruments,
//! and the tensor-product composite.
//!
//! The verifiers here check, on sampled inputs, that a complete local
//! instrument never changes the remote reduced state, that a single outcome
//! preserving the trace of a joint operator leaves the remote reduced
//! operator untouched, and that `Tr_1[(A (x) I) R]` stays positive.

use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::numkit::{
    c, check_same_dim, eigvals_herm, herm_apply, herm_coords, herm_sqrt, is_psd, max_abs_diff,
    max_eig_herm, min_eig_herm, partial_trace, partial_trace_matrix, tensor, trace_norm_herm,
    CMatrix, HermOp, Side, C64,
};
use crate::opcore::{Bipartite, BipartiteSampler, ModelSampler, TheoryModel, MAX_OUTCOMES};
use crate::report::{max_defect, VerificationReport};
use crate::sampling::{
    complex_gaussian, ginibre_state, random_instrument_kraus, random_isometry, random_psd,
    random_pure_state, random_unitary, trial_rng, uniform, TrialRng,
};

/// Slack allowed on `K <= I` and on `sum_j K_j = I`.
pub const TOL_KRAUS: f64 = 1e-9;

/// A (possibly subnormalized) density operator; its weight is its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp(HermOp);

impl DensityOp {
    pub fn new(m: HermOp) -> Result<Self> {
        if !is_psd(&m) {
            return Err(Error::NotPositive(min_eig_herm(&m)));
        }
        Ok(DensityOp(m))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        DensityOp::new(HermOp::new(m)?)
    }

    /// Pure state `|v><v|` (not renormalized).
    pub fn pure(v: &DVector<C64>) -> Self {
        DensityOp(HermOp::symmetrized(v * v.adjoint()))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOp(HermOp::identity(d).scale(1.0 / d as f64))
    }

    pub(crate) fn from_herm_unchecked(m: HermOp) -> Self {
        DensityOp(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn weight(&self) -> f64 {
        self.0.trace()
    }

    pub fn herm(&self) -> &HermOp {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn normalized(&self) -> Result<DensityOp> {
        let w = self.weight();
        if w <= crate::opcore::EPS_COND {
            return Err(Error::ZeroProbability(w));
        }
        Ok(DensityOp(self.0.scale(1.0 / w)))
    }
}

/// Trace-nonincreasing operation in Kraus form, `rho -> sum_k M_k rho M_k^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOp {
    kraus: Vec<CMatrix>,
}

impl QuantumOp {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let op = QuantumOp::new_unchecked(kraus)?;
        let excess = max_eig_herm(&op.k_operator()) - 1.0;
        if excess > TOL_KRAUS {
            return Err(Error::EffectExceedsUnit(excess));
        }
        Ok(op)
    }

    /// Builds the operation checking shapes only; `K <= I` is not enforced.
    pub fn new_unchecked(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty("Kraus list"))?;
        let shape = first.shape();
        for k in &kraus {
            if k.shape() != shape {
                return Err(Error::DimensionMismatch {
                    expected: shape.0 * shape.1,
                    found: k.nrows() * k.ncols(),
                });
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(QuantumOp { kraus })
    }

    pub fn identity(d: usize) -> Self {
        QuantumOp {
            kraus: vec![CMatrix::identity(d, d)],
        }
    }

    /// The operation that never occurs.
    pub fn zero(d: usize) -> Self {
        QuantumOp {
            kraus: vec![CMatrix::zeros(d, d)],
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn d_out(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// `K = sum_k M_k^dag M_k`, so that `Tr[M(rho)] = Tr[K rho]`.
    pub fn k_operator(&self) -> HermOp {
        let d = self.d_in();
        HermOp::symmetrized(
            self.kraus
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, m| acc + m.adjoint() * m),
        )
    }

    /// Liouville matrix `sum_k M_k (x) conj(M_k)` acting on row-major vectorized operators.
    pub fn liouville(&self) -> CMatrix {
        let (o, i) = (self.d_out(), self.d_in());
        self.kraus
            .iter()
            .fold(CMatrix::zeros(o * o, i * i), |acc, m| {
                acc + tensor(m, &m.conjugate())
            })
    }

    /// `then o self`: Kraus products `N_l M_k`.
    pub fn then(&self, next: &QuantumOp) -> QuantumOp {
        let kraus = next
            .kraus
            .iter()
            .flat_map(|n| self.kraus.iter().map(move |m| n * m))
            .collect();
        QuantumOp { kraus }
    }

    pub fn plus(&self, other: &QuantumOp) -> QuantumOp {
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        QuantumOp { kraus }
    }

    pub fn scaled(&self, lambda: f64) -> QuantumOp {
        let s = lambda.max(0.0).sqrt();
        QuantumOp {
            kraus: self.kraus.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Single-Kraus completion `(I - K)^{1/2}`.
    pub fn complement(&self) -> QuantumOp {
        let d = self.d_in();
        let rest = HermOp::identity(d)
            .sub(&self.k_operator())
            .expect("K has the input dimension");
        QuantumOp {
            kraus: vec![herm_sqrt(&rest).into_matrix()],
        }
    }
}

/// A complete set of quantum operations: `sum_j K_j = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    outcomes: Vec<QuantumOp>,
}

impl Instrument {
    pub fn new(outcomes: Vec<QuantumOp>) -> Result<Self> {
        let defect = instrument_completeness_defect(&outcomes)?;
        if defect > TOL_KRAUS {
            return Err(Error::IncompleteAction(defect));
        }
        Ok(Instrument { outcomes })
    }

    pub fn outcomes(&self) -> &[QuantumOp] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].d_in()
    }

    /// The non-selective operation `sum_j M_j`.
    pub fn total(&self) -> QuantumOp {
        self.outcomes[1..]
            .iter()
            .fold(self.outcomes[0].clone(), |acc, m| acc.plus(m))
    }
}

/// Largest `|eig(sum_j K_j - I)|`.
pub fn instrument_completeness_defect(outcomes: &[QuantumOp]) -> Result<f64> {
    let first = outcomes.first().ok_or(Error::Empty("instrument"))?;
    let d = first.d_in();
    let mut sum = HermOp::zeros(d);
    for m in outcomes {
        check_same_dim(d, m.d_in())?;
        check_same_dim(d, m.d_out())?;
        sum = sum.add(&m.k_operator())?;
    }
    let diff = sum.sub(&HermOp::identity(d))?;
    Ok(eigvals_herm(&diff)
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max))
}

pub fn apply_quantum_op(m: &QuantumOp, rho: &DensityOp) -> Result<DensityOp> {
    check_same_dim(m.d_in(), rho.dim())?;
    let r = rho.matrix();
    let d = m.d_out();
    let out = m
        .kraus
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k * r * k.adjoint());
    Ok(DensityOp::from_herm_unchecked(HermOp::symmetrized(out)))
}

pub fn k_operator(m: &QuantumOp) -> HermOp {
    m.k_operator()
}

/// Embeds `m` on factor `side` of `C^d1 (x) C^d2`, with `d_other` the dimension of the untouched factor.
pub fn local_embed(m: &QuantumOp, d_other: usize, side: Side) -> QuantumOp {
    let id = CMatrix::identity(d_other, d_other);
    let kraus = m
        .kraus
        .iter()
        .map(|k| match side {
            Side::One => tensor(k, &id),
            Side::Two => tensor(&id, k),
        })
        .collect();
    QuantumOp { kraus }
}

/// Reduced state on factor `keep`.
pub fn local_state(r: &DensityOp, d1: usize, d2: usize, keep: Side) -> Result<DensityOp> {
    let red = partial_trace(r.herm(), d1, d2, keep.other())?;
    Ok(DensityOp::from_herm_unchecked(HermOp::symmetrized(
        red.into_matrix(),
    )))
}

/// Smallest eigenvalue of `Tr_1[(A (x) I) R]` for PSD `A` on factor 1 and PSD `R` on the joint space.
pub fn partial_positivity_min_eig(a: &HermOp, r: &DensityOp) -> Result<f64> {
    if !is_psd(a) {
        return Err(Error::NotPositive(min_eig_herm(a)));
    }
    if !is_psd(r.herm()) {
        return Err(Error::NotPositive(min_eig_herm(r.herm())));
    }
    let d1 = a.dim();
    if d1 == 0 || !r.dim().is_multiple_of(d1) {
        return Err(Error::DimensionMismatch {
            expected: d1,
            found: r.dim(),
        });
    }
    let d2 = r.dim() / d1;
    let prod = tensor(a.matrix(), &CMatrix::identity(d2, d2)) * r.matrix();
    let red = HermOp::new(partial_trace_matrix(&prod, d1, d2, Side::One)?)?;
    Ok(min_eig_herm(&red))
}

fn reduced_after(r: &DensityOp, m: &QuantumOp, d1: usize, d2: usize) -> Result<DensityOp> {
    check_same_dim(d1, m.d_in())?;
    let out = apply_quantum_op(&local_embed(m, d2, Side::One), r)?;
    local_state(&out, d1, d2, Side::Two)
}

fn trace_distance_ops(a: &DensityOp, b: &DensityOp) -> Result<f64> {
    Ok(trace_norm_herm(&a.herm().sub(b.herm())?))
}

/// `|| Tr_1[sum_j (M_j (x) I)(R)] - Tr_1[R] ||_1` for an arbitrary list of side-1 operations.
///
/// Does not require the list to be complete, so it also measures how far an
/// invalid instrument moves the remote state.
pub fn reduced_state_defect(
    r: &DensityOp,
    outcomes: &[QuantumOp],
    d1: usize,
    d2: usize,
) -> Result<f64> {
    check_same_dim(d1 * d2, r.dim())?;
    let first = outcomes.first().ok_or(Error::Empty("instrument"))?;
    let total = outcomes[1..]
        .iter()
        .fold(first.clone(), |acc, m| acc.plus(m));
    let after = reduced_after(r, &total, d1, d2)?;
    let before = local_state(r, d1, d2, Side::Two)?;
    trace_distance_ops(&after, &before)
}

/// Remote reduced state invariance for a complete instrument acting on side 1.
///
/// Reports the trace-norm defect of the non-selective instrument and, for each
/// single outcome that preserves `Tr[R]` within `tol`, that outcome's own
/// reduced-state defect.
pub fn quantum_nosig_check(
    r: &DensityOp,
    inst: &Instrument,
    d1: usize,
    d2: usize,
    tol: f64,
) -> Result<VerificationReport> {
    check_same_dim(d1, inst.dim())?;
    let total_defect = reduced_state_defect(r, inst.outcomes(), d1, d2)?;
    let before = local_state(r, d1, d2, Side::Two)?;
    let mut worst = total_defect;
    let mut preserving = Vec::new();
    for (j, m) in inst.outcomes().iter().enumerate() {
        let after = reduced_after(r, m, d1, d2)?;
        if (after.weight() - r.weight()).abs() <= tol {
            let d = trace_distance_ops(&after, &before)?;
            worst = max_defect(worst, d);
            preserving.push(json!({"outcome": j, "defect": d}));
        }
    }
    Ok(
        VerificationReport::from_defect("quantum-nosig", 0, 1, worst, tol).with_witness(json!({
            "total_defect": total_defect,
            "trace_preserving_outcomes": preserving,
        })),
    )
}

/// Contrasts the conditional remote state after a selective outcome `m`
/// with the unconditional one, and checks that the instrument `{m, m#}`
/// still leaves the remote state invariant.
///
/// The conditional change is informational; the report passes iff the
/// completed instrument is non-signaling.
pub fn steering_witness(
    r: &DensityOp,
    m: &QuantumOp,
    d1: usize,
    d2: usize,
    tol: f64,
) -> Result<VerificationReport> {
    check_same_dim(d1 * d2, r.dim())?;
    let after = reduced_after(r, m, d1, d2)?;
    if (after.weight() - r.weight()).abs() <= tol {
        return Err(Error::NotSelective);
    }
    let unconditional = local_state(r, d1, d2, Side::Two)?.normalized()?;
    let conditional = after.normalized()?;
    let shift = trace_distance_ops(&conditional, &unconditional)?;
    let inst = Instrument::new(vec![m.clone(), m.complement()])?;
    let avg = reduced_state_defect(r, inst.outcomes(), d1, d2)?;
    Ok(
        VerificationReport::from_defect("steering", 0, 1, avg, tol).with_witness(json!({
            "outcome_probability": after.weight() / r.weight(),
            "conditional_shift": shift,
            "instrument_defect": avg,
        })),
    )
}

/// Quantum theory on `C^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumModel {
    dim: usize,
}

impl QuantumModel {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "quantum model needs dim >= 1".into(),
            ));
        }
        Ok(QuantumModel { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl TheoryModel for QuantumModel {
    type State = DensityOp;
    type Transform = QuantumOp;
    type Effect = HermOp;

    fn name(&self) -> String {
        format!("quantum(d={})", self.dim)
    }

    fn effect_space_dim(&self) -> usize {
        self.dim * self.dim
    }

    fn check_state(&self, s: &DensityOp) -> Result<()> {
        check_same_dim(self.dim, s.dim())
    }

    fn check_transform(&self, t: &QuantumOp) -> Result<()> {
        check_same_dim(self.dim, t.d_in())?;
        check_same_dim(self.dim, t.d_out())?;
        let excess = max_eig_herm(&t.k_operator()) - 1.0;
        if excess > TOL_KRAUS {
            return Err(Error::EffectExceedsUnit(excess));
        }
        Ok(())
    }

    fn apply(&self, t: &QuantumOp, s: &DensityOp) -> DensityOp {
        apply_quantum_op(t, s).expect("dimensions checked by caller")
    }

    fn combine_states(&self, a: f64, s1: &DensityOp, b: f64, s2: &DensityOp) -> DensityOp {
        DensityOp::from_herm_unchecked(HermOp::symmetrized(
            s1.matrix().scale(a) + s2.matrix().scale(b),
        ))
    }

    fn state_coords(&self, s: &DensityOp) -> Vec<f64> {
        herm_coords(s.matrix())
    }

    fn state_distance(&self, s1: &DensityOp, s2: &DensityOp) -> f64 {
        trace_distance_ops(s1, s2).unwrap_or(f64::INFINITY)
    }

    fn identity(&self) -> QuantumOp {
        QuantumOp::identity(self.dim)
    }

    fn compose(&self, first: &QuantumOp, then: &QuantumOp) -> QuantumOp {
        first.then(then)
    }

    fn add_transforms(&self, t1: &QuantumOp, t2: &QuantumOp) -> QuantumOp {
        t1.plus(t2)
    }

    fn scale_transform(&self, lambda: f64, t: &QuantumOp) -> QuantumOp {
        t.scaled(lambda)
    }

    fn complement_transform(&self, t: &QuantumOp) -> QuantumOp {
        t.complement()
    }

    fn transform_distance(&self, t1: &QuantumOp, t2: &QuantumOp) -> f64 {
        max_abs_diff(&t1.liouville(), &t2.liouville())
    }

    fn effect_of(&self, t: &QuantumOp) -> HermOp {
        t.k_operator()
    }

    fn unit_effect(&self) -> HermOp {
        HermOp::identity(self.dim)
    }

    fn evaluate(&self, e: &HermOp, s: &DensityOp) -> f64 {
        e.trace_product(s.herm())
    }

    fn add_effects(&self, e1: &HermOp, e2: &HermOp) -> HermOp {
        HermOp::symmetrized(e1.matrix() + e2.matrix())
    }

    fn effect_distance(&self, e1: &HermOp, e2: &HermOp) -> f64 {
        eigvals_herm(&HermOp::symmetrized(e1.matrix() - e2.matrix()))
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    fn effect_excess(&self, e: &HermOp) -> f64 {
        max_eig_herm(e) - 1.0
    }

    fn effect_coords(&self, e: &HermOp) -> Option<Vec<f64>> {
        Some(herm_coords(e.matrix()))
    }
}

/// A random trace-decreasing operation: two outcomes of a random three-outcome instrument.
pub fn random_quantum_op(rng: &mut TrialRng, d: usize) -> QuantumOp {
    let ks = random_instrument_kraus(rng, d, 3);
    QuantumOp {
        kraus: ks[..2].to_vec(),
    }
}

/// A random instrument with `outcomes` single-Kraus outcomes from a Haar isometry.
pub fn random_instrument(rng: &mut TrialRng, d: usize, outcomes: usize) -> Instrument {
    let outcomes = random_instrument_kraus(rng, d, outcomes.clamp(1, MAX_OUTCOMES))
        .into_iter()
        .map(|k| QuantumOp { kraus: vec![k] })
        .collect();
    Instrument { outcomes }
}

impl ModelSampler for QuantumModel {
    fn random_state(&self, rng: &mut TrialRng) -> DensityOp {
        DensityOp::from_herm_unchecked(ginibre_state(rng, self.dim))
    }

    fn random_transform(&self, rng: &mut TrialRng) -> QuantumOp {
        random_quantum_op(rng, self.dim)
    }

    fn random_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<QuantumOp> {
        random_instrument(rng, self.dim, outcomes).outcomes
    }
}

/// Tensor-product composite `C^d1 (x) C^d2`.
#[derive(Debug, Clone, Copy)]
pub struct QuantumBipartite {
    left: QuantumModel,
    right: QuantumModel,
    joint: QuantumModel,
}

impl QuantumBipartite {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        Ok(QuantumBipartite {
            left: QuantumModel::new(d1)?,
            right: QuantumModel::new(d2)?,
            joint: QuantumModel::new(d1 * d2)?,
        })
    }

    pub fn left(&self) -> &QuantumModel {
        &self.left
    }

    pub fn right(&self) -> &QuantumModel {
        &self.right
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.left.dim, self.right.dim)
    }
}

impl Bipartite for QuantumBipartite {
    type Joint = QuantumModel;
    type LeftOp = QuantumOp;
    type RightOp = QuantumOp;

    fn joint(&self) -> &QuantumModel {
        &self.joint
    }

    fn embed_left(&self, a: &QuantumOp) -> Result<QuantumOp> {
        self.left.check_transform(a)?;
        Ok(local_embed(a, self.right.dim, Side::One))
    }

    fn embed_right(&self, b: &QuantumOp) -> Result<QuantumOp> {
        self.right.check_transform(b)?;
        Ok(local_embed(b, self.left.dim, Side::Two))
    }
}

impl BipartiteSampler for QuantumBipartite {
    fn random_joint_state(&self, rng: &mut TrialRng) -> DensityOp {
        self.joint.random_state(rng)
    }

    fn random_left_op(&self, rng: &mut TrialRng) -> QuantumOp {
        self.left.random_transform(rng)
    }

    fn random_right_op(&self, rng: &mut TrialRng) -> QuantumOp {
        self.right.random_transform(rng)
    }

    fn random_left_action(&self, rng: &mut TrialRng, outcomes: usize) -> Vec<QuantumOp> {
        self.left.random_action(rng, outcomes)
    }
}

/// Partial positivity over `trials` random PSD pairs: returns the smallest eigenvalue seen.
///
/// Half the trials use rank-one operators to reach the boundary of the cone.
pub fn partial_positivity_suite(seed: u64, trials: usize, d1: usize, d2: usize) -> Result<f64> {
    let mins: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (a, r) = if i % 2 == 0 {
                (random_psd(&mut rng, d1), random_psd(&mut rng, d1 * d2))
            } else {
                (
                    random_pure_state(&mut rng, d1),
                    random_pure_state(&mut rng, d1 * d2),
                )
            };
            partial_positivity_min_eig(&a, &DensityOp::from_herm_unchecked(r))
        })
        .collect::<Result<_>>()?;
    Ok(mins.into_iter().fold(f64::INFINITY, |a, b| {
        if a.is_nan() || b.is_nan() {
            f64::NAN
        } else {
            a.min(b)
        }
    }))
}

/// One sampled `(R, M)` pair for the trace / reduced-state biconditional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReducedSample {
    pub trace_defect: f64,
    pub reduced_defect: f64,
}

/// Thresholds of the biconditional check.
pub const TR_TRACE_PRESERVED: f64 = 1e-10;
pub const TR_REDUCED_EQUAL: f64 = 1e-8;
pub const TR_REDUCED_CHANGED: f64 = 1e-6;
pub const TR_TRACE_CHANGED: f64 = 1e-8;

impl TraceReducedSample {
    /// True when the sample contradicts either direction of the biconditional.
    pub fn violates(&self) -> bool {
        (self.trace_defect <= TR_TRACE_PRESERVED && self.reduced_defect > TR_REDUCED_EQUAL)
            || (self.reduced_defect > TR_REDUCED_CHANGED && self.trace_defect <= TR_TRACE_CHANGED)
    }
}

pub fn trace_reduced_sample(
    r: &DensityOp,
    m: &QuantumOp,
    d1: usize,
    d2: usize,
) -> Result<TraceReducedSample> {
    let after = reduced_after(r, m, d1, d2)?;
    let before = local_state(r, d1, d2, Side::Two)?;
    Ok(TraceReducedSample {
        trace_defect: (after.weight() - r.weight()).abs(),
        reduced_defect: trace_distance_ops(&after, &before)?,
    })
}

/// Draws a trace-decreasing operation together with a joint operator.
///
/// Even trials draw a generic pair (trace not preserved). Odd trials build
/// `K` with eigenvalue 1 on a random subspace `S` and `R` supported on
/// `S (x) C^d2`, so the trace is preserved although `M` is trace-decreasing.
pub fn trace_reduced_pair(
    rng: &mut TrialRng,
    d1: usize,
    d2: usize,
    preserving: bool,
) -> (DensityOp, QuantumOp) {
    if !preserving || d1 < 2 {
        let r = DensityOp::from_herm_unchecked(ginibre_state(rng, d1 * d2));
        return (r, random_quantum_op(rng, d1));
    }
    let u = random_unitary(rng, d1);
    let k_dim = 1 + (uniform(rng) * (d1 - 1) as f64) as usize;
    let k_dim = k_dim.min(d1 - 1);
    let contraction = 0.9 * uniform(rng);
    let spec: Vec<f64> = (0..d1)
        .map(|i| if i < k_dim { 1.0 } else { contraction })
        .collect();
    let proj: Vec<f64> = (0..d1).map(|i| if i < k_dim { 1.0 } else { 0.0 }).collect();
    let conj = |diag: &[f64]| {
        HermOp::symmetrized(&u * HermOp::from_real_diagonal(diag).matrix() * u.adjoint())
    };
    let k = conj(&spec);
    let sqrt_k = herm_apply(&k, |v| v.max(0.0).sqrt());
    let v = random_isometry(rng, 2 * d1, d1);
    let kraus = (0..2)
        .map(|j| v.rows(j * d1, d1) * sqrt_k.matrix())
        .collect();
    let pi = tensor(conj(&proj).matrix(), &CMatrix::identity(d2, d2));
    let g = complex_gaussian(rng, d1 * d2, d1 * d2);
    let raw = &pi * &g * g.adjoint() * &pi;
    let tr = raw.trace().re;
    let r = DensityOp::from_herm_unchecked(HermOp::symmetrized(raw.scale(1.0 / tr)));
    (r, QuantumOp { kraus })
}

/// Runs the biconditional over `trials` pairs; the report's `max_defect` is
/// the worst reduced-state defect among trace-preserving samples.
pub fn trace_reduced_suite(
    seed: u64,
    trials: usize,
    d1: usize,
    d2: usize,
) -> Result<VerificationReport> {
    let samples: Vec<TraceReducedSample> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (r, m) = trace_reduced_pair(&mut rng, d1, d2, i % 2 == 1);
            trace_reduced_sample(&r, &m, d1, d2)
        })
        .collect::<Result<_>>()?;
    let violations = samples.iter().filter(|s| s.violates()).count();
    let preserving: Vec<&TraceReducedSample> = samples
        .iter()
        .filter(|s| s.trace_defect <= TR_TRACE_PRESERVED)
        .collect();
    let worst = preserving
        .iter()
        .map(|s| s.reduced_defect)
        .fold(0.0, max_defect);
    let min_changed_trace = samples
        .iter()
        .filter(|s| s.reduced_defect > TR_REDUCED_CHANGED)
        .map(|s| s.trace_defect)
        .fold(f64::INFINITY, f64::min);
    let mut report =
        VerificationReport::from_defect("trace-reduced", seed, trials, worst, TR_REDUCED_EQUAL);
    report.pass = report.pass && violations == 0;
    Ok(report.with_witness(json!({
        "violations": violations,
        "trace_preserving_samples": preserving.len(),
        "min_trace_defect_when_reduced_changed": if min_changed_trace.is_finite() { json!(min_changed_trace) } else { json!(null) },
    })))
}

/// Remote-state invariance under random instruments with 2 to 4 outcomes on side 1
/// over random joint states; reports the worst remote trace-norm defect.
pub fn instrument_nosig_suite(
    seed: u64,
    trials: usize,
    d1: usize,
    d2: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let defects: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let r = DensityOp::from_herm_unchecked(ginibre_state(&mut rng, d1 * d2));
            let outcomes = 2 + (i % 3) as usize;
            let inst = random_instrument(&mut rng, d1, outcomes);
            Ok(quantum_nosig_check(&r, &inst, d1, d2, tol)?.max_defect)
        })
        .collect::<Result<_>>()?;
    let worst = defects.into_iter().fold(0.0, max_defect);
    Ok(VerificationReport::from_defect(
        "quantum-nosig",
        seed,
        trials,
        worst,
        tol,
    ))
}

/// Named fixtures: the singlet and the two Pauli projective instruments.
pub mod fixtures {
    use super::*;

    /// `|Psi^-> = (|01> - |10>) / sqrt2`.
    pub fn singlet() -> DensityOp {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)]);
        DensityOp::pure(&v)
    }

    fn projective(vectors: [[C64; 2]; 2]) -> Instrument {
        let outcomes = vectors
            .iter()
            .map(|v| QuantumOp {
                kraus: vec![DensityOp::pure(&DVector::from_column_slice(v))
                    .matrix()
                    .clone()],
            })
            .collect();
        Instrument { outcomes }
    }

    /// Projective measurement of `sigma_z`: outcomes `|0>`, `|1>`.
    pub fn z_instrument() -> Instrument {
        projective([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]])
    }

    /// Projective measurement of `sigma_x`: outcomes `|+>`, `|->`.
    pub fn x_instrument() -> Instrument {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        projective([[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]])
    }

    /// Projective measurement of `cos(theta) sigma_z + sin(theta) sigma_x`;
    /// outcome 0 is the `+1` eigenvector.
    pub fn bloch_instrument(theta: f64) -> Instrument {
        let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        projective([[c(ch, 0.), c(sh, 0.)], [c(-sh, 0.), c(ch, 0.)]])
    }
}
